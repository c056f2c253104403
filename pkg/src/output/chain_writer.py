"""Writes chains as JSON lines and reads them back."""

import glob
import json
import logging
import os
from typing import Any, Dict, List

from src.errors import ChainAbortedError, DatasetFormatError
from src.models.model_spec import ModelSpec
from src.models.param_state import ParamState
from src.output.base_output import BaseOutput
from src.samplers.chain import Chain

logger = logging.getLogger(__name__)


class ChainWriter(BaseOutput):
    """One `chain_<i>.jsonl` per chain: a header record, then one draw per line.

    An aborted run writes its finished chains under the usual pattern and the
    draws of the aborted chain under `partial_chain_pattern`.
    """

    DEFAULT_PATTERN = "chain_{index}.jsonl"
    DEFAULT_PARTIAL_PATTERN = "partial_chain_{index}.jsonl"

    def __init__(self):
        self.pattern: str = self.DEFAULT_PATTERN
        self.partial_pattern: str = self.DEFAULT_PARTIAL_PATTERN

    def configure(self, config: Dict[str, Any]):
        self.pattern = config.get("chain_pattern", self.DEFAULT_PATTERN)
        self.partial_pattern = config.get("partial_chain_pattern", self.DEFAULT_PARTIAL_PATTERN)
        for key, pattern in (("chain_pattern", self.pattern), ("partial_chain_pattern", self.partial_pattern)):
            if "{index}" not in pattern:
                raise ValueError(f"{key} must contain '{{index}}', got '{pattern}'")
        logger.debug(f"ChainWriter configured with patterns '{self.pattern}' and '{self.partial_pattern}'")

    def output(self, result: List[Chain], out_dir: str) -> List[str]:
        os.makedirs(out_dir, exist_ok=True)
        paths = [self._write(chain, os.path.join(out_dir, self.pattern.format(index=i))) for i, chain in enumerate(result)]
        logger.info(f"Wrote {len(paths)} chain files to '{out_dir}'")
        return paths

    def output_aborted(self, error: ChainAbortedError, out_dir: str) -> List[str]:
        """Writes what an aborted run left behind: finished chains and the partial one."""
        os.makedirs(out_dir, exist_ok=True)
        paths = [
            self._write(chain, os.path.join(out_dir, self.pattern.format(index=i)))
            for i, chain in sorted(error.completed.items())
        ]
        if error.partial_chain is not None:
            index = error.chain_index if error.chain_index is not None else 0
            paths.append(self._write(error.partial_chain, os.path.join(out_dir, self.partial_pattern.format(index=index))))
        logger.warning(f"Run aborted; wrote {len(paths)} chain files (partial included) to '{out_dir}'")
        return paths

    @staticmethod
    def _write(chain: Chain, path: str) -> str:
        header = chain.header()
        header["diagnostics"] = chain.diagnostics
        with open(path, "w", encoding="utf-8") as f:
            f.write(json.dumps(header) + "\n")
            for j, draw in enumerate(chain.draws):
                f.write(json.dumps({"record": "draw", "index": j, **draw.to_dict()}) + "\n")
        return path


def read_chain(path: str) -> Chain:
    """Reads one chain file written by ChainWriter.

    Raises:
        DatasetFormatError: On a missing header, malformed line or a draw count
            that does not match the header.
    """
    header = None
    draws: List[ParamState] = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise DatasetFormatError(f"{path}: invalid JSON ({e})", line=line_no) from e
            kind = record.pop("record", None)
            if kind == "header":
                header = record
            elif kind == "draw" and header is not None:
                record.pop("index", None)
                draws.append(ParamState.from_dict(record))
            else:
                raise DatasetFormatError(f"{path}: unexpected record '{kind}'", line=line_no)
    if header is None:
        raise DatasetFormatError(f"{path}: no header record", line=1)
    if len(draws) != header["n_keep"]:
        raise DatasetFormatError(f"{path}: header promises {header['n_keep']} draws, found {len(draws)}")
    return Chain(
        spec=ModelSpec.from_dict(header["spec"]),
        draws=draws,
        seed=int(header["seed"]),
        n_warmup=int(header["n_warmup"]),
        n_keep=int(header["n_keep"]),
        thin=int(header.get("thin", 1)),
        stats=header.get("stats", {}),
        diagnostics=header.get("diagnostics", {}),
    )


def read_chains(directory: str, pattern: str = "chain_*.jsonl") -> List[Chain]:
    """Reads every chain file of a fit directory, in index order."""
    paths = glob.glob(os.path.join(directory, pattern))
    if not paths:
        raise DatasetFormatError(f"No chain files matching '{pattern}' in '{directory}'")
    paths.sort(key=lambda p: int("".join(ch for ch in os.path.basename(p) if ch.isdigit()) or 0))
    chains = [read_chain(p) for p in paths]
    hashes = {c.spec.spec_hash() for c in chains}
    if len(hashes) > 1:
        raise DatasetFormatError(f"Chain files in '{directory}' come from different model specifications")
    logger.info(f"Read {len(chains)} chains of {chains[0].spec.name} from '{directory}'")
    return chains
