"""Per-query operation counters exposed by the LCE indexes."""
from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass
class QueryStats:
    """Running counters; call :meth:`reset` between measurements.

    ``comparisons`` counts single-symbol comparisons, ``lookups`` name
    comparisons and hash-table probes, ``traversal`` node pairs visited by the
    tree-tree traversal.
    """

    queries: int = 0
    levels: int = 0
    comparisons: int = 0
    lookups: int = 0
    rmq: int = 0
    pred: int = 0
    traversal: int = 0

    def reset(self) -> None:
        for k in asdict(self):
            setattr(self, k, 0)

    @property
    def work(self) -> int:
        """Symbol comparisons plus lookups."""
        return self.comparisons + self.lookups

    def as_dict(self) -> dict:
        return asdict(self)
