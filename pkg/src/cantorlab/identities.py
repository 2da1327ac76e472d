"""Exact identity chain connecting the partial sums to the lag sums.

Everything in this module is algebra, not analysis: each check computes
one object two ways that must agree to rounding.  The cast, on the
critical line s = 1/2 + it with M = floor(sqrt t):

    P(x)  = sum_{m<M} m^{-s} e^{imx}          the restriction polynomial
    TRI(x)= sum_{m<=n<M} n^{s-1} m^{-s} e^{i(m-n)x}   its upper triangle
    J_h   = sum_n n^{s-1} (n+h)^{-s}          the lag sums (ranges vary)
    OD'   = sum_{h>=1} c(h) J_h^{[1, M-1-h]}  with c(h) the measure
                                              coefficients sum_j w_j e^{ihx_j}

Triangle regrouping writes TRI as H_{M-1} + sum_l conj(J_l) e^{-ilx};
averaging against the measure cancels the harmonic term between |P|^2
and TRI, leaving OD' (the h-cancellation).  Abel summation regroups the
full lag sum over the cumulative tails B(K) = sum_{k>K} c(k); its
boundary pieces stay O(1) because Re[e^{ix}/(1-e^{ix})] = -1/2 at every
point of the support.

Two conventions are fixed here after numerical validation rather than
taken from a display:

* Swap boundary.  Expanding the four index-shifted products of the swap
  identity over m in [k+2, M-1] and re-basing each on n in [2, M-2-k]
  leaves exactly four stray summands,

      (M-1-k)^{s-1} [(M-1)^{-s} - M^{-s}] + (k+3)^{-s} - (k+2)^{-s},

  validated against brute expansion at M <= 8 before use at scale.

* Second-kernel B2 and the bridge sign.  With B2(K) := sum_j w_j
  e^{i(K+1)x_j} (1-e^{ix_j})^{-2}, a one-line telescope gives
  Delta B2 = -B, which is the property the bridge needs; iterating,
  Delta^2 [B - B2](K) = -c(K+2).  The sign is minus for this kernel and
  is frozen below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .accum import csum, csum_complex
from .errors import DomainError, PoleError
from .measure import DEFAULT_SPEC, MeasureAtoms, build_atoms, nu_hat_table
from .moments import od_t
from .reporting import GridScan
from .special_functions import default_length, j_sum

__all__ = [
    "IdentityReport", "AbelPieces", "BRIDGE_SIGN", "DEFAULT_T_GRID",
    "check_tri", "check_h_cancellation", "restriction_scan", "check_swap",
    "abel_decomposition", "dod2_scan", "check_bridge",
]

# frozen by the K <= 50 scan; see the module docstring
BRIDGE_SIGN = -1.0

# the standard restriction grid: 24 log-spaced heights
DEFAULT_T_GRID = tuple(float(t) for t in np.geomspace(200.0, 2.0e5, 24))


@dataclass(frozen=True)
class IdentityReport:
    """Two evaluations of one identity and their disagreement."""

    name: str
    lhs: complex
    rhs: complex
    residual: float
    tolerance: float
    passed: bool
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.passed != (self.residual <= self.tolerance):
            raise DomainError("passed must mirror residual <= tolerance")

    def __str__(self) -> str:
        mark = "ok" if self.passed else "FAIL"
        return (f"[{mark}] {self.name}: residual {self.residual:.3e} "
                f"(tol {self.tolerance:.1e})")


def _report(name: str, lhs: complex, rhs: complex, tolerance: float,
            **params: Any) -> IdentityReport:
    residual = abs(complex(lhs) - complex(rhs))
    return IdentityReport(name=name, lhs=complex(lhs), rhs=complex(rhs),
                          residual=residual, tolerance=tolerance,
                          passed=residual <= tolerance, params=params)


@dataclass(frozen=True)
class AbelPieces:
    """Abel-summation split of the lag sum, with its two closed constants."""

    piece_I: complex
    piece_II: complex
    piece_III: complex
    a_infinity: complex
    beta: complex

    def __post_init__(self) -> None:
        if abs(self.a_infinity.real + 0.5) > 1.0e-10:
            raise DomainError("Re A(inf) must be -1/2 for a probability "
                              "measure avoiding the origin")

    @property
    def total(self) -> complex:
        return self.piece_I + self.piece_II + self.piece_III


# ------------------------------------------------------------ triangle


def check_tri(theta: float, t: float) -> IdentityReport:
    """Upper-triangle double sum vs its lag regrouping.

    sum_{m<=n<M} n^{s-1} m^{-s} e^{i(m-n)theta}
        = H_{M-1} + sum_{l=1}^{M-2} conj(J_l^{[1, M-1-l]}) e^{-il theta}

    On the critical line conj(J_l) is sum_m m^{-s} (m+l)^{s-1}, so both
    sides draw on one table of powers; what the check exercises is the
    diagonal regrouping of the phases and indices.
    """
    if t < 4.0:
        raise DomainError("check_tri needs t >= 4 (M >= 2)")
    M = default_length(t, "identities")
    s = complex(0.5, t)
    n = np.arange(1, M, dtype=np.float64)
    up = np.exp((s - 1.0) * np.log(n))      # n^{s-1}
    low = np.exp(-s * np.log(n))            # n^{-s}
    ph = np.exp(1j * theta * n)
    lhs = csum_complex(up * np.conj(ph) * np.cumsum(low * ph))

    terms = [complex(csum(1.0 / n))]
    for ell in range(1, M - 1):
        conj_j = np.dot(low[:M - 1 - ell], up[ell:])
        terms.append(conj_j * np.exp(-1j * ell * theta))
    rhs = csum_complex(np.asarray(terms, dtype=np.complex128))
    return _report("tri", lhs, rhs, 1.0e-12, theta=theta, t=t, M=M)


# ------------------------------------------------------- h-cancellation


def _triangle_pieces(t: float, atoms: MeasureAtoms,
                     chunk: int = 1024) -> tuple[float, complex, float, int]:
    """Measure averages of |P|^2 and TRI, with the harmonic number."""
    M = default_length(t, "identities")
    s = complex(0.5, t)
    n = np.arange(1, M, dtype=np.float64)
    ln = np.log(n)
    H = csum(1.0 / n)
    up = np.exp((s - 1.0) * ln)
    low = np.exp(-s * ln)
    int_p2 = 0.0
    int_tri = 0.0 + 0.0j
    for lo in range(0, atoms.points.size, chunk):
        x = atoms.points[lo:lo + chunk]
        w = atoms.weights[lo:lo + chunk]
        E = np.exp(1j * np.outer(x, n))
        P = E @ low
        int_p2 += float(w @ (P.real ** 2 + P.imag ** 2))
        run = np.cumsum(E * low[None, :], axis=1)
        tri = (np.conj(E) * up[None, :] * run).sum(axis=1)
        int_tri += complex(w @ tri)
    return int_p2, int_tri, H, M


def od_prime(t: float, atoms: MeasureAtoms) -> complex:
    """OD' = sum_{h=1}^{M-2} c(h) J_h over [1, M-1-h], M = floor(sqrt t)."""
    M = default_length(t, "identities")
    s = complex(0.5, t)
    if M < 3:
        return 0.0 + 0.0j
    coeff = nu_hat_table(atoms, M - 2)
    terms = [coeff[h - 1] * j_sum(h, s, 1, M - 1 - h) for h in range(1, M - 1)]
    return csum_complex(np.asarray(terms, dtype=np.complex128))


def check_h_cancellation(t: float,
                         atoms: MeasureAtoms) -> tuple[IdentityReport,
                                                       complex]:
    """Harmonic-term cancellation between the averaged |P|^2 and TRI.

    Verifies three relations at once (all through the same OD'):
        int |P|^2 d(atoms) = H + 2 Re OD'
        int TRI   d(atoms) = H + conj(OD')
        difference         = OD'
    and returns the report together with OD'.
    """
    if t < 10.0:
        raise DomainError("check_h_cancellation needs t >= 10")
    int_p2, int_tri, H, M = _triangle_pieces(t, atoms)
    odp = od_prime(t, atoms)
    r1 = abs(int_p2 - (H + 2.0 * odp.real))
    r2 = abs(int_tri - (H + np.conj(odp)))
    r3 = abs((int_p2 - int_tri) - odp)
    residual = max(r1, r2, r3)
    report = IdentityReport(
        name="h-cancellation", lhs=complex(int_p2), rhs=H + 2.0 * odp.real,
        residual=residual, tolerance=1.0e-8, passed=residual <= 1.0e-8,
        params={"t": t, "M": M, "harmonic": H, "triangle": complex(int_tri)})
    return report, odp


def restriction_scan(t_grid, atoms: MeasureAtoms) -> GridScan:
    """Restriction quotient int |P|^2 d(atoms) / H_{M-1} and 2 Re OD' over
    a height grid, with the least-squares drift of the latter in log t.

    Passing t_grid=None uses the standard 24-point grid.  The quotient is
    assembled from the verified cancellation identity, so each grid point
    also re-checks it.
    """
    grid = DEFAULT_T_GRID if t_grid is None else tuple(float(t)
                                                       for t in t_grid)
    if any(not (100.0 <= t <= 1.0e6) for t in grid):
        raise DomainError("grid heights must lie in [1e2, 1e6]")
    quot, two_re, harm = [], [], []
    for t in grid:
        report, odp = check_h_cancellation(t, atoms)
        if not report.passed:
            raise RuntimeError(f"cancellation identity failed at t={t}: "
                               f"{report}")
        H = report.params["harmonic"]
        quot.append(1.0 + 2.0 * odp.real / H)
        two_re.append(2.0 * odp.real)
        harm.append(H)
    x = np.log(np.asarray(grid))
    y = np.asarray(two_re)
    (slope, intercept), cov = np.polyfit(x, y, 1, cov=True)
    return GridScan(parameter="t", grid=grid,
                    columns={"quotient": tuple(quot),
                             "two_re_od_prime": tuple(two_re),
                             "harmonic": tuple(harm)},
                    meta={"slope": float(slope),
                          "slope_se": float(math.sqrt(cov[0, 0])),
                          "intercept": float(intercept)})


# ------------------------------------------------------------------ swap


def check_swap(k: int, t: float, M: int) -> IdentityReport:
    """Swap identity with explicitly derived boundary terms.

    LHS: sum_{m=k+2}^{M-1} [m^{-s} - (m+1)^{-s}]
                           [(m-k)^{s-1} - (m-1-k)^{s-1}]
    RHS: (J_k - 2 J_{k+1} + J_{k+2}) on [2, M-2-k] plus the boundary
         (M-1-k)^{s-1} [(M-1)^{-s} - M^{-s}] + (k+3)^{-s} - (k+2)^{-s}.
    """
    if not (1 <= k <= M - 4):
        raise DomainError("need 1 <= k <= M - 4")
    s = complex(0.5, t)
    m = np.arange(k + 2, M, dtype=np.float64)
    lhs = csum_complex(
        (np.exp(-s * np.log(m)) - np.exp(-s * np.log(m + 1.0)))
        * (np.exp((s - 1.0) * np.log(m - k))
           - np.exp((s - 1.0) * np.log(m - 1.0 - k))))
    core = (j_sum(k, s, 2, M - 2 - k)
            - 2.0 * j_sum(k + 1, s, 2, M - 2 - k)
            + j_sum(k + 2, s, 2, M - 2 - k))
    bdry = ((M - 1 - k) ** (s - 1.0) * ((M - 1) ** (-s) - M ** (-s))
            + (k + 3) ** (-s) - (k + 2) ** (-s))
    return _report("swap", lhs, core + bdry, 1.0e-12, k=k, t=t, M=M)


# ------------------------------------------------------------------ Abel


def _geometric_tables(atoms: MeasureAtoms) -> tuple[np.ndarray, np.ndarray,
                                                    np.ndarray]:
    z = np.exp(1j * atoms.points)
    denom = 1.0 - z
    if float(np.abs(denom).min()) < 1.0e-12:
        raise PoleError("an atom sits at the origin of the circle")
    return z, denom, atoms.weights


def abel_decomposition(t: float, atoms: MeasureAtoms) -> AbelPieces:
    """Abel regrouping of the full lag sum sum_{h<=H} c(h) J_h^{[1,H]},
    H = M-1, against the cumulative tails B(K) = A(inf) - A(K):

        (I)   = A(inf) J_1
        (II)  = -B(H) J_H
        (III) = -sum_{h<H} B(h) [J_h - J_{h+1}]

    The regrouped total is checked against the direct h-sum (the od_t
    integer-full variant) to 1e-8 before returning.
    """
    if t < 100.0:
        raise DomainError("abel_decomposition needs t >= 100")
    z, denom, w = _geometric_tables(atoms)
    a_inf = complex(w @ (z / denom))
    # beta = A(inf) - sum w z/(1-z)^2, the geometric-tail constant of the
    # beta-peel; equals -B2(1) after the telescope, base k = 1
    beta = a_inf - complex(w @ (z / (denom * denom)))
    M = default_length(t, "identities")
    H = M - 1
    s = complex(0.5, t)
    coeff = nu_hat_table(atoms, H)
    A = np.concatenate(([0.0 + 0.0j], np.cumsum(coeff)))
    B = a_inf - A
    J = np.asarray([j_sum(h, s, 1, H) for h in range(1, H + 1)])
    piece_I = B[0] * J[0]
    piece_II = -B[H] * J[H - 1]
    piece_III = -csum_complex(B[1:H] * (J[:H - 1] - J[1:]))
    pieces = AbelPieces(piece_I=complex(piece_I), piece_II=complex(piece_II),
                        piece_III=complex(piece_III), a_infinity=a_inf,
                        beta=beta)
    direct, _ = od_t(t, atoms, variant="integer-full", length=M)
    if abs(pieces.total - direct) > 1.0e-8:
        raise RuntimeError(f"Abel regrouping drifted from the direct sum "
                           f"by {abs(pieces.total - direct):.2e} at t={t}")
    return pieces


# ------------------------------------------------------------------ dOD2


def dod2_scan(t_grid=None) -> GridScan:
    """|dOD2| and its cancellation ratio over a height grid.

    dOD2 = sum_{h>=3} c(h) [J_h - J_{h-2}], both lag sums truncated to
    [1, M-1-h], the ranges the partial-sum length imposes; the h-sum
    truncates itself at M-2 once the range empties.  The second column
    is the same sum with absolute values over |dOD2|, the price the
    sign structure pays.
    """
    grid = tuple(float(t) for t in (np.geomspace(300.0, 1.0e5, 16)
                                    if t_grid is None else t_grid))
    if any(not (300.0 <= t <= 1.0e5) for t in grid):
        raise DomainError("grid heights must lie in [300, 1e5]")
    atoms = build_atoms(DEFAULT_SPEC, "nu_tilde")
    mags, ratios = [], []
    for t in grid:
        M = default_length(t, "identities")
        s = complex(0.5, t)
        coeff = nu_hat_table(atoms, max(1, M - 2))
        total = 0.0 + 0.0j
        gross = 0.0
        for h in range(3, M - 1):
            dj = (j_sum(h, s, 1, M - 1 - h)
                  - j_sum(h - 2, s, 1, M - 1 - h))
            total += coeff[h - 1] * dj
            gross += abs(coeff[h - 1]) * abs(dj)
        mags.append(abs(total))
        ratios.append(gross / abs(total))
    return GridScan(parameter="t", grid=grid,
                    columns={"dod2": tuple(mags),
                             "cancellation": tuple(ratios)},
                    meta={"range": "[1, M-1-h]", "h_start": 3})


# ---------------------------------------------------------------- bridge


def check_bridge(K: int, atoms: MeasureAtoms) -> IdentityReport:
    """Bridge between the tail A-sums and the second geometric kernel.

    With B(K) the coefficient tail and B2 the squared-kernel sum, checks
    Delta B(K) = -c(K+1), Delta B2(K) = -B(K), and the second difference
    Delta^2 [B - B2](K) = -c(K+2) (sign frozen as BRIDGE_SIGN).
    """
    if K < 0:
        raise DomainError("K >= 0")
    z, denom, w = _geometric_tables(atoms)
    a_inf = complex(w @ (z / denom))
    coeff = nu_hat_table(atoms, K + 3)
    A = np.concatenate(([0.0 + 0.0j], np.cumsum(coeff)))
    B = a_inf - A[K:K + 3]          # B(K), B(K+1), B(K+2)
    zp = z ** (K + 1)
    B2 = np.asarray([complex(w @ (zp * z ** j / (denom * denom)))
                     for j in range(3)])
    r1 = abs((B[1] - B[0]) + coeff[K])
    r2 = abs((B2[1] - B2[0]) + B[0])
    d2 = (B[2] - B2[2]) - 2.0 * (B[1] - B2[1]) + (B[0] - B2[0])
    rhs = BRIDGE_SIGN * coeff[K + 1]
    r3 = abs(d2 - rhs)
    residual = max(r1, r2, r3)
    return IdentityReport(name="bridge", lhs=complex(d2), rhs=complex(rhs),
                          residual=residual, tolerance=1.0e-10,
                          passed=residual <= 1.0e-10,
                          params={"K": K, "sign": BRIDGE_SIGN,
                                  "delta_b": r1, "delta_b2": r2})
