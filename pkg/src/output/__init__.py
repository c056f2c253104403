"""Writers for chains, posterior summaries and model-selection scores."""

from src.output.base_output import BaseOutput
from src.output.chain_writer import ChainWriter, read_chain, read_chains
from src.output.file_writer import ScoreTableWriter, SummaryWriter

__all__ = ["BaseOutput", "ChainWriter", "ScoreTableWriter", "SummaryWriter", "read_chain", "read_chains"]
