"""Exact integer combinatorics behind the moment predictions.

Sum-product collisions of small multisets, the product-grouped
coefficient sums D_{2k}, their decomposition into a cosine polynomial in
the centre phase, the off-diagonal correction VO_{2k}, and the 4-tuple
collision atlas with its divisor-bound multiplicity check.

Collision arithmetic stays in exact integers and rationals throughout;
floating point enters only where measure coefficients r_n are attached
to integer-keyed groups.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import Mapping, Sequence

import numpy as np

from .accum import csum, fsum
from .errors import BudgetError, DomainError
from .measure import CantorSpec, r_table
from .parallel import pmap

__all__ = [
    "MultisetCollision", "CollisionRecord", "CollisionAtlas",
    "multiset_collisions", "d2k", "trig_decomposition",
    "trig_reconstruction", "vo_2k", "collision_atlas", "tau",
    "divisor_log_sum",
]

# one vectorized enumeration pass may touch this many tuples at most
_COMBO_BUDGET = 200_000_000


@dataclass(frozen=True)
class MultisetCollision:
    """Two or more k-multisets sharing both their sum and their product."""

    S: int
    P: int
    multisets: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.multisets) < 2:
            raise DomainError("a collision needs at least two multisets")
        for ms in self.multisets:
            if sum(ms) != self.S or math.prod(ms) != self.P:
                raise DomainError(f"multiset {ms} does not match "
                                  f"(S={self.S}, P={self.P})")


@dataclass(frozen=True)
class CollisionRecord:
    """A 4-tuple whose two pairs collide at exactly one rational point."""

    tuple4: tuple[int, int, int, int]
    h: int
    p: int
    alpha_star: Fraction

    def __post_init__(self) -> None:
        m1, m2, m3, m4 = self.tuple4
        if sorted((m1, m2)) == sorted((m3, m4)):
            raise DomainError("the two pairs must differ as multisets")
        if self.h != (m3 + m4) - (m1 + m2) or self.h == 0:
            raise DomainError("h must be the nonzero sum defect")
        if self.p != m1 * m2 - m3 * m4:
            raise DomainError("p must be the product defect")
        a = self.alpha_star
        if a != Fraction(self.p, self.h):
            raise DomainError("alpha_star must equal p/h")
        # the defining collision, re-verified in exact rationals
        if (m1 + a) * (m2 + a) != (m3 + a) * (m4 + a):
            raise DomainError("collision identity failed in exact "
                              "arithmetic")


def _pair_collisions(max_element: int) -> list[MultisetCollision]:
    # a(S-a) is strictly monotone in a on [1, S/2]: the enumeration can
    # never find two pairs sharing (S, P), and honestly confirms it
    out: list[MultisetCollision] = []
    for S in range(2, 2 * max_element + 1):
        a = np.arange(max(1, S - max_element), S // 2 + 1, dtype=np.int64)
        if a.size == 0:
            continue
        prods = a * (S - a)
        uniq, counts = np.unique(prods, return_counts=True)
        for P in uniq[counts >= 2]:
            hits = a[prods == P]
            out.append(MultisetCollision(
                S=S, P=int(P),
                multisets=tuple((int(x), int(S - x)) for x in hits)))
    return out


def _triples_for_sums(args: tuple[int, ...], max_element: int
                      ) -> list[MultisetCollision]:
    out: list[MultisetCollision] = []
    for S in args:
        a = np.arange(max(1, S - 2 * max_element), S // 3 + 1,
                      dtype=np.int64)
        if a.size == 0:
            continue
        lo = np.maximum(a, S - a - max_element)
        hi = (S - a) // 2
        lens = np.maximum(0, hi - lo + 1)
        total = int(lens.sum())
        if total == 0:
            continue
        ar = np.repeat(a, lens)
        base = np.repeat(np.cumsum(lens) - lens, lens)
        br = np.repeat(lo, lens) + (np.arange(total) - base)
        cr = S - ar - br
        prods = ar * br * cr
        uniq, counts = np.unique(prods, return_counts=True)
        for P in uniq[counts >= 2]:
            mask = prods == P
            out.append(MultisetCollision(
                S=S, P=int(P),
                multisets=tuple(
                    (int(x), int(y), int(z))
                    for x, y, z in zip(ar[mask], br[mask], cr[mask]))))
    return out


def multiset_collisions(k: int, max_element: int
                        ) -> list[MultisetCollision]:
    """All groups of >= 2 k-multisets in [1, max_element] sharing sum and
    product, sorted by sum then product.

    Pair collisions cannot exist (a quadratic is determined by its root
    sum and product); the k=2 branch runs the enumeration anyway and
    returns the empty list it proves.
    """
    if k < 2:
        raise DomainError("k >= 2")
    if k > 3:
        raise BudgetError("enumeration supports k in {2, 3}")
    if max_element < 1:
        raise DomainError("max_element >= 1")
    cap = 5000 if k == 2 else 1000
    if max_element > cap:
        raise BudgetError(f"k={k} enumeration capped at "
                          f"max_element={cap}")
    if k == 2:
        return _pair_collisions(max_element)
    sums = list(range(3, 3 * max_element + 1))
    if max_element > 400:
        chunks = [tuple(sums[i:i + 64]) for i in range(0, len(sums), 64)]
        parts = pmap(partial(_triples_for_sums, max_element=max_element),
                     chunks)
        return [g for part in parts for g in part]
    return _triples_for_sums(tuple(sums), max_element)


# --------------------------------------------------------------- D_2k


_D2K_CAPS = {1: 1_000_000, 2: 3000, 3: 300}


def _coeff_over_sqrt(spec: CantorSpec, N: int) -> np.ndarray:
    n = np.arange(1, N + 1, dtype=np.float64)
    return (r_table(spec, N) / np.sqrt(n)) * np.exp(1j * n * spec.phi)


def d2k(spec: CantorSpec, k: int, N: int) -> float:
    """Product-matched coefficient sum over ordered k-tuples up to N.

    Tuples are grouped by their exact integer product P; the group
    amplitude A(P) accumulates prod nu_hat(n_i)/sqrt(P) over ordered
    tuples, and the result is sum_P |A(P)|^2, real by construction.
    """
    if k not in _D2K_CAPS:
        raise DomainError("k in {1, 2, 3}")
    if N < 1:
        raise DomainError("N >= 1")
    if N > _D2K_CAPS[k]:
        raise BudgetError(f"k={k} capped at N={_D2K_CAPS[k]}")
    if k == 1:
        r = r_table(spec, N)
        n = np.arange(1, N + 1, dtype=np.float64)
        return csum((r * r) * (1.0 / n))
    c = _coeff_over_sqrt(spec, N)
    idx = np.arange(1, N + 1, dtype=np.int64)
    keys = np.multiply.outer(idx, idx).ravel()
    vals = np.multiply.outer(c, c).ravel()
    size = N * N + 1
    a_re = np.bincount(keys, weights=vals.real, minlength=size)
    a_im = np.bincount(keys, weights=vals.imag, minlength=size)
    if k == 2:
        return csum(a_re * a_re + a_im * a_im)
    live = (a_re != 0.0) | (a_im != 0.0)
    pk = np.nonzero(live)[0]
    v2 = a_re[pk] + 1j * a_im[pk]
    b_re = np.zeros(N ** 3 + 1)
    b_im = np.zeros(N ** 3 + 1)
    for n1 in range(1, N + 1):
        term = c[n1 - 1] * v2
        at = n1 * pk  # pk is duplicate-free, so fancy += is safe
        b_re[at] += term.real
        b_im[at] += term.imag
    return csum(b_re * b_re + b_im * b_im)


def trig_decomposition(spec: CantorSpec, k: int, N: int,
                       delta_max: int) -> dict[int, float]:
    """Weights W_delta of the centre-phase cosine expansion of D_4.

    Product-matched pairs of ordered pairs are grouped by the additive
    defect delta = (n1+n2) - (m1+m2); the phase prod e^{i n phi} then
    contributes e^{i delta phi}, so D_4(phi) = W_0 +
    2 sum_{delta>0} W_delta cos(delta phi) with real weights.
    """
    if k != 2:
        raise DomainError("only the fourth moment decomposes here")
    if N < 1 or delta_max < 0:
        raise DomainError("N >= 1 and delta_max >= 0")
    if N > 1000:
        raise BudgetError("decomposition capped at N=1000")
    idx = np.arange(1, N + 1, dtype=np.int64)
    r = r_table(spec, N)
    base = r / np.sqrt(idx.astype(np.float64))
    stride = 2 * N + 1
    keys = (np.multiply.outer(idx, idx) * stride
            + np.add.outer(idx, idx)).ravel()
    vals = np.multiply.outer(base, base).ravel()
    uk, inv = np.unique(keys, return_inverse=True)
    V = np.bincount(inv, weights=vals, minlength=uk.size)
    sums = (uk % stride).astype(np.int64)
    # uk is sorted, so equal products sit in contiguous runs
    prods = uk // stride
    cuts = np.flatnonzero(np.diff(prods)) + 1
    starts = np.concatenate(([0], cuts))
    stops = np.concatenate((cuts, [uk.size]))
    weights: dict[int, float] = {0: 0.0}
    for lo, hi in zip(starts, stops):
        g = hi - lo
        weights[0] += float(np.dot(V[lo:hi], V[lo:hi]))
        for i in range(lo, hi):
            for j in range(i + 1, hi):
                delta = int(sums[j] - sums[i])
                if delta <= delta_max:
                    weights[delta] = weights.get(delta, 0.0) + float(
                        V[i] * V[j])
    return weights


def trig_reconstruction(weights: Mapping[int, float], phi: float) -> float:
    """Evaluate W_0 + 2 sum_{delta>0} W_delta cos(delta phi)."""
    total = weights.get(0, 0.0)
    return total + 2.0 * fsum([w * math.cos(d * phi)
                               for d, w in weights.items() if d > 0])


def vo_2k(spec: CantorSpec, k: int, N: int) -> float:
    """Off-diagonal collision correction to the 2k-th coefficient moment.

    Each (S, P) collision group contributes (1/P) times the ordered sum
    over distinct multiset pairs of mult(M) mult(M') R(M) R(M'), with
    mult the multinomial repetition count and R the product of r-values.
    The weight is pinned by the defining relation: averaging D_2k over
    the phase offset kills every cross term except the equal-sum ones,
    and each ordered tuple pair carries exactly 1/P there.

    At k=2 Vieta leaves no collision groups, so the sum is empty and the
    result is exactly 0.0.
    """
    if k not in (2, 3):
        raise DomainError("k in {2, 3}")
    if N > 400:
        raise BudgetError("collision moment capped at N=400")
    r = r_table(spec, max(N, 1))
    total = []
    for group in multiset_collisions(k, N):
        vals = []
        for ms in group.multisets:
            mult = math.factorial(k)
            R = 1.0
            for value, count in Counter(ms).items():
                mult //= math.factorial(count)
                R *= r[value - 1] ** count
            vals.append(mult * R)
        s1 = fsum(vals)
        s2 = fsum([v * v for v in vals])
        # s1^2 - s2 enumerates ordered distinct pairs (M, M')
        total.append((s1 * s1 - s2) / group.P)
    return fsum(total)


# -------------------------------------------------------------- atlas


@dataclass(frozen=True)
class CollisionAtlas:
    """Exhaustive pair-vs-pair collision table at one truncation."""

    M: int
    h_values: tuple[int, ...]
    records: tuple[CollisionRecord, ...]
    truncated: bool
    multiplicity: Mapping[tuple[int, int], int]
    fitted_C: float

    def mu(self, h: int, p: int) -> int:
        return self.multiplicity.get((h, p), 0)

    def alpha_stars_in_window(self, lo: float, hi: float
                              ) -> list[tuple[int, int]]:
        """Keys whose collision point has fractional part inside [lo, hi]."""
        out = []
        for h, p in self.multiplicity:
            a = Fraction(p, h)
            frac = a - math.floor(a)
            if lo <= frac <= hi:
                out.append((h, p))
        return out

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write("m1,m2,m3,m4,h,p,alpha_star_num,alpha_star_den\n")
            for rec in self.records:
                m1, m2, m3, m4 = rec.tuple4
                fh.write(f"{m1},{m2},{m3},{m4},{rec.h},{rec.p},"
                         f"{rec.alpha_star.numerator},"
                         f"{rec.alpha_star.denominator}\n")


def collision_atlas(M: int, h_values: Sequence[int] | None = None,
                    max_records: int = 20000) -> CollisionAtlas:
    """Enumerate ordered pairs of distinct index pairs below M.

    For each unordered pair A = {m1 <= m2}, B = {m3 <= m4} with elements
    in [1, M-1] and sum defect h = (m3+m4)-(m1+m2) != 0, the product
    defect p = m1 m2 - m3 m4 defines the unique rational collision point
    p/h.  Multiplicities mu(h, p) are tabulated for every requested h;
    records carry explicit witness tuples, emitted in (h, m1, m2, m3, m4)
    order up to max_records.  The fitted constant reports
    max mu(h, p) / (M tau(2|h|) log M) over the table.
    """
    if M < 3:
        raise DomainError("M >= 3")
    if M > 500:
        raise BudgetError("atlas capped at M=500")
    m1, m2 = np.triu_indices(M - 1)
    m1 = (m1 + 1).astype(np.int64)
    m2 = (m2 + 1).astype(np.int64)
    s = m1 + m2
    order = np.lexsort((m2, m1, s))
    m1, m2, s = m1[order], m2[order], s[order]
    q = m1 * m2
    s_max = 2 * (M - 1)
    bucket_lo = np.searchsorted(s, np.arange(0, s_max + 2))
    counts_by_sum = np.diff(bucket_lo)

    if h_values is None:
        hs = [h for h in range(-(s_max - 2), s_max - 1) if h != 0]
    else:
        hs = sorted(set(int(h) for h in h_values))
        if any(h == 0 for h in hs):
            raise DomainError("h = 0 is not a collision defect")
        if any(abs(h) > s_max - 2 for h in hs):
            raise DomainError(f"|h| exceeds the defect range at M={M}")
    combos = 0
    for h in hs:
        for sa in range(2, s_max + 1):
            sb = sa + h
            if 2 <= sb <= s_max:
                combos += int(counts_by_sum[sa]) * int(counts_by_sum[sb])
    if combos > _COMBO_BUDGET:
        raise BudgetError(f"atlas pass would touch {combos} tuples; "
                          f"restrict h_values or lower M")

    records: list[CollisionRecord] = []
    truncated = False
    multiplicity: dict[tuple[int, int], int] = {}
    for h in hs:
        diffs = []
        for sa in range(2, s_max + 1):
            sb = sa + h
            if not 2 <= sb <= s_max:
                continue
            a0, a1 = bucket_lo[sa], bucket_lo[sa + 1]
            b0, b1 = bucket_lo[sb], bucket_lo[sb + 1]
            if a0 == a1 or b0 == b1:
                continue
            block = q[a0:a1, None] - q[None, b0:b1]
            diffs.append(block.ravel())
            if len(records) < max_records:
                for i in range(a0, a1):
                    for j in range(b0, b1):
                        if len(records) >= max_records:
                            break
                        pp = int(q[i] - q[j])
                        records.append(CollisionRecord(
                            tuple4=(int(m1[i]), int(m2[i]),
                                    int(m1[j]), int(m2[j])),
                            h=h, p=pp, alpha_star=Fraction(pp, h)))
        if diffs:
            vals, cnts = np.unique(np.concatenate(diffs),
                                   return_counts=True)
            for p, c in zip(vals.tolist(), cnts.tolist()):
                multiplicity[(h, p)] = multiplicity.get((h, p), 0) + c
    if sum(multiplicity.values()) > len(records):
        truncated = True
    log_m = math.log(M)
    fitted = 0.0
    for (h, _p), count in multiplicity.items():
        fitted = max(fitted, count / (M * tau(2 * abs(h)) * log_m))
    return CollisionAtlas(M=M, h_values=tuple(hs), records=tuple(records),
                          truncated=truncated, multiplicity=multiplicity,
                          fitted_C=fitted)


# ------------------------------------------------------------ divisors


def tau(n: int) -> int:
    """Divisor count by trial factorization."""
    if n < 1:
        raise DomainError("n >= 1")
    total = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            total *= e + 1
        d += 1
    if n > 1:
        total *= 2
    return total


def divisor_log_sum(X: int) -> float:
    """sum_{h <= X} tau(h) log h via a divisor-count sieve."""
    if X < 2:
        raise DomainError("X >= 2")
    if X > 10 ** 7:
        raise BudgetError("sieve capped at X=1e7")
    counts = np.zeros(X + 1, dtype=np.int32)
    for d in range(1, X + 1):
        counts[d::d] += 1
    logs = np.log(np.arange(1, X + 1, dtype=np.float64))
    return float(np.dot(counts[1:].astype(np.float64), logs))
