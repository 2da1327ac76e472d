"""Deterministic accumulation helpers.

Every series in this package is summed in a fixed index order so that
repeated runs (and runs under different worker counts) produce bit-identical
results.  Two regimes:

* small or precision-critical sums go through `math.fsum`, which returns the
  correctly rounded double for any input order we feed it;
* large vectorized sums use numpy's pairwise reduction over fixed-size
  chunks, with the chunk partials combined by `fsum`.  The chunk size is a
  module constant, never derived from thread count, so the reduction tree is
  identical no matter how the work was produced.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

CHUNK = 1 << 14


def fsum(values: Iterable[float]) -> float:
    return math.fsum(values)


def csum(arr: np.ndarray) -> float:
    """Compensated sum of a float array, fixed chunk order."""
    a = np.asarray(arr, dtype=np.float64).ravel()
    if a.size <= CHUNK:
        return math.fsum(a.tolist())
    parts = [float(np.sum(a[i:i + CHUNK])) for i in range(0, a.size, CHUNK)]
    return math.fsum(parts)


def csum_complex(arr: np.ndarray) -> complex:
    a = np.asarray(arr, dtype=np.complex128).ravel()
    return complex(csum(a.real), csum(a.imag))


class Kahan:
    """Streaming Kahan accumulator for loops that cannot batch."""

    __slots__ = ("s", "c")

    def __init__(self) -> None:
        self.s = 0.0
        self.c = 0.0

    def add(self, x: float) -> None:
        y = x - self.c
        t = self.s + y
        self.c = (t - self.s) - y
        self.s = t

    @property
    def value(self) -> float:
        return self.s
