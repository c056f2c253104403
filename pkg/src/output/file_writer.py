"""Writers for posterior summaries and model-selection score tables."""

import json
import logging
import os
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from src.evalsel.predictive import PpScore
from src.evalsel.selection import Selection
from src.output.base_output import BaseOutput

logger = logging.getLogger(__name__)

SCORE_COLUMNS = ["model", "log_pp", "se", "n_test", "n_pred_draws", "seed"]


class SummaryWriter(BaseOutput):
    """Writes the dictionary returned by `summarize_chain` as JSON."""

    DEFAULT_FILENAME = "summary.json"

    def __init__(self):
        self.filename: str = self.DEFAULT_FILENAME
        self.indent: Optional[int] = 2

    def configure(self, config: Dict[str, Any]):
        self.filename = config.get("summary_file", self.DEFAULT_FILENAME)
        self.indent = config.get("indent", 2)
        logger.debug(f"SummaryWriter configured. File: '{self.filename}', indent: {self.indent}")

    def output(self, result: Dict[str, Any], out_dir: str) -> str:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, self.filename)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(result, f, indent=self.indent)
        logger.info(f"Posterior summary of '{result.get('model')}' written to '{path}'")
        return path


class ScoreTableWriter(BaseOutput):
    """Writes per-model scores as CSV and the selected model as JSON.

    `output` takes (scores, selection); selection may be None when only one
    model was scored.
    """

    DEFAULT_FILENAME = "scores.csv"
    DEFAULT_SELECTION_FILENAME = "selection.json"

    def __init__(self):
        self.filename: str = self.DEFAULT_FILENAME
        self.selection_filename: str = self.DEFAULT_SELECTION_FILENAME

    def configure(self, config: Dict[str, Any]):
        self.filename = config.get("scores_file", self.DEFAULT_FILENAME)
        self.selection_filename = config.get("selection_file", self.DEFAULT_SELECTION_FILENAME)
        logger.debug(f"ScoreTableWriter configured. Scores: '{self.filename}', selection: '{self.selection_filename}'")

    def output(self, result: Tuple[Sequence[PpScore], Optional[Selection]], out_dir: str) -> List[str]:
        scores, selection = result
        os.makedirs(out_dir, exist_ok=True)
        frame = pd.DataFrame([s.to_row() for s in scores], columns=SCORE_COLUMNS)
        path = os.path.join(out_dir, self.filename)
        frame.to_csv(path, index=False, float_format="%.17g")
        paths = [path]
        logger.info(f"Scores of {len(frame)} models written to '{path}'")
        if selection is not None:
            sel_path = os.path.join(out_dir, self.selection_filename)
            with open(sel_path, "w", encoding="utf-8") as f:
                json.dump(
                    {"model": selection.model, "log_pp": selection.log_pp, "tie": selection.tie, "tied_with": selection.tied_with},
                    f,
                    indent=2,
                )
            paths.append(sel_path)
        return paths
