"""Defines the abstract base class for all result writers."""

from abc import ABC, abstractmethod
from typing import Any, Dict


class BaseOutput(ABC):
    """Interface shared by the writers of chains, summaries and score tables.

    Concrete writers read their file names from a config section in
    `configure` and write one kind of result in `output`, so the driver can
    hand results to whichever writers are configured.
    """

    @abstractmethod
    def __init__(self):
        pass

    @abstractmethod
    def configure(self, config: Dict[str, Any]):
        """Reads file names and formatting options from the `output` config section."""
        raise NotImplementedError

    @abstractmethod
    def output(self, result: Any, out_dir: str) -> Any:
        """Writes `result` under `out_dir` and returns what was written (paths)."""
        raise NotImplementedError
