"""Tabular results for parameter scans."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import DomainError

__all__ = ["GridScan"]


@dataclass(frozen=True)
class GridScan:
    """A (parameter -> value) table produced by a scan.

    grid holds the swept parameter values; columns maps a column name to a
    sequence of the same length.  meta carries anything worth keeping that
    is not per-row (fit slopes, conventions chosen at run time, timings).
    """

    parameter: str
    grid: tuple[float, ...]
    columns: Mapping[str, tuple]
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.grid:
            raise DomainError("empty grid")
        for name, col in self.columns.items():
            if len(col) != len(self.grid):
                raise DomainError(f"column {name!r} has {len(col)} rows, "
                                  f"grid has {len(self.grid)}")

    def column(self, name: str) -> np.ndarray:
        return np.asarray(self.columns[name])

    def rows(self) -> list[tuple]:
        names = list(self.columns)
        return [(g, *(self.columns[n][i] for n in names))
                for i, g in enumerate(self.grid)]

    def header(self) -> list[str]:
        return [self.parameter, *self.columns.keys()]


def as_grid_scan(parameter: str, grid: Sequence[float],
                 columns: Mapping[str, Sequence], **meta: Any) -> GridScan:
    """Convenience constructor that freezes sequences into tuples."""
    return GridScan(parameter=parameter, grid=tuple(float(g) for g in grid),
                    columns={k: tuple(v) for k, v in columns.items()},
                    meta=dict(meta))
