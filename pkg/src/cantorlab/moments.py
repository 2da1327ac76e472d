"""Second and fourth moment diagnostics on the critical line.

Everything here averages |partial sums|^2 or |partial sums|^4 against the
pushforward measures or against Lebesgue t, and compares the result with
the diagonal predictions.  The off-diagonal pieces come in two flavors:
the literal shifted-base pair sums (the objects the moment bounds are
about) and their integer-frequency counterparts (the objects the exact
identity chain manipulates); od_t exposes both so the two layers can be
compared without conflating them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .accum import csum, csum_complex, fsum
from .errors import CollisionError, DomainError, QuadratureError
from .measure import (CantorSpec, DEFAULT_SPEC, MeasureAtoms, build_atoms,
                      nu_hat_table, r_table, wick_constants)
from .reporting import GridScan
from .special_functions import (TAU, atom_level_for, chi_phases,
                                default_length, hurwitz_zeta, j_sum,
                                suggested_level)

__all__ = [
    "MomentResult", "MvBreakdown", "od_t", "fp_coefficients",
    "second_moment_L", "mv_fourth", "mv_integral_ratio", "od4_scan",
    "lebesgue_alpha_oracle",
]


@dataclass(frozen=True)
class MomentResult:
    """A single moment value against its predicted main term."""

    T: float
    value: float
    main_term: float
    ratio: float
    quadrature_points: int

    def __post_init__(self) -> None:
        if self.quadrature_points < 1:
            raise DomainError("quadrature_points >= 1")
        if not math.isfinite(self.value):
            raise DomainError("non-finite moment value")


@dataclass(frozen=True)
class MvBreakdown:
    """Diagonal and gap-weighted error budget of a fourth-moment sum."""

    diagonal: float
    error_sum: float
    generic_part: float
    accidental_part: float

    def __post_init__(self) -> None:
        if min(self.diagonal, self.error_sum, self.generic_part,
               self.accidental_part) < 0.0:
            raise DomainError("all parts must be nonnegative")
        gap = abs(self.error_sum - self.generic_part - self.accidental_part)
        if gap > 1e-9 * max(1.0, self.error_sum):
            raise DomainError("generic + accidental must equal error_sum")


@lru_cache(maxsize=64)
def _atoms(spec: CantorSpec, target: str, level: int) -> MeasureAtoms:
    return build_atoms(spec, target, level=level)


# ------------------------------------------------------------- second moment

def od_t(t: float, atoms: MeasureAtoms, *, variant: str = "lerch",
         length: int | None = None) -> tuple[complex, float]:
    """Off-diagonal and diagonal of the dual second moment at height t.

    Writing S(alpha) = sum_{1 <= m < sqrt t} (m+alpha)^{-1/2-it}, the
    'lerch' variant returns

        od = int |S|^2 d(atoms)  -  int sum_m (m+alpha)^{-1} d(atoms)

    i.e. the genuine shifted-base pair sum (a real number up to rounding).
    It is cross-checked internally against the lag-grouped half sum
    2 Re sum_m conj(u_m) (u_1 + ... + u_{m-1}), a pure regrouping that
    must agree to 1e-9.

    The integer-frequency variants replace the shifted bases by integer
    frequencies modulated through the measure coefficients:

        'integer-full'       sum_{h=1}^{K} c(h) J_h,   J_h over [1, K]
        'integer-truncated'  sum_{h=1}^{K-1} c(h) J_h, J_h over [1, K-h]

    with K the largest admissible m, c(h) = sum_k w_k e^{i h x_k} and
    J_h = sum_n n^{s-1}(n+h)^{-s}.  These are complex half sums; the
    lerch pair sum corresponds to twice the real part.  The diagonal
    returned is the same in all variants.

    Beware that od is a wildly oscillating function of t: near t = 1e4
    it swings through [-1.2, 1.4] on a t-scale of a few units, while its
    local mean stays below 0.1.  Pointwise values are reproducible;
    smoothed summaries depend entirely on the window.

    length overrides the truncation: m then runs over [1, length - 1].
    """
    if t < 100.0:
        raise DomainError("od_t needs t >= 100")
    if atoms.points.size == 0:
        raise DomainError("empty atoms")
    # default truncation is the literal m < sqrt(t)
    M = math.ceil(math.sqrt(t)) if length is None else int(length)
    if M < 3:
        raise DomainError("need at least two m terms")
    s = complex(0.5, t)
    m = np.arange(1, M, dtype=np.float64)
    base = m[:, None] + atoms.points[None, :]
    diag = float(atoms.weights @ (1.0 / base).sum(axis=0))

    if variant in ("integer-full", "integer-truncated"):
        coeff = nu_hat_table(atoms, M - 1)
        if variant == "integer-full":
            terms = [coeff[h - 1] * j_sum(h, s, 1, M - 1)
                     for h in range(1, M)]
        else:
            terms = [coeff[h - 1] * j_sum(h, s, 1, M - 1 - h)
                     for h in range(1, M - 1)]
        return csum_complex(np.array(terms)), diag
    if variant != "lerch":
        raise DomainError(f"unknown variant {variant!r}")

    lb = np.log(base)
    u = np.exp(-0.5 * lb) * np.exp(-1j * (t * lb))
    S = u.sum(axis=0)
    full = float(atoms.weights @ (S.real ** 2 + S.imag ** 2))
    od = full - diag

    # regrouping cross-check: on the half line the pair (m, m') with m > m'
    # contributes conj(u_m) u_{m'}, so summing conj(u_m) against the running
    # prefix sum and doubling the real part must reproduce od exactly
    pref = np.cumsum(u, axis=0)
    half = np.einsum("ma,ma->a", np.conj(u[1:]), pref[:-1])
    od_regrouped = 2.0 * float(atoms.weights @ half.real)
    if abs(od - od_regrouped) > 1e-9 * max(1.0, abs(full)):
        raise RuntimeError("pair-sum regrouping check failed; "
                           f"{od:.3e} vs {od_regrouped:.3e} at t={t}")
    return complex(od), diag


def fp_coefficients(t: float, k_max: int, atoms: MeasureAtoms | None = None,
                    *, grid_points: int | None = None,
                    full_output: bool = False):
    """Fourier coefficients F_k = int_0^1 |S_M(alpha)|^2 e^{-2 pi i k alpha}
    d(alpha) for k = 0..k_max, M = floor(sqrt t), via an FFT on a power-of-
    two grid fine enough for the fastest oscillation.

    The run validates itself by resumming: F_0 + 2 Re sum_k F_k c(k) must
    reproduce the direct atom average of |S_M|^2, where c(k) is the circle
    coefficient sum_j w_j e^{+-2 pi i k alpha_j}; the phase sign that wins
    is recorded in the info dict (full_output=True returns it).  The
    allowed mismatch is the tail bound read off the data: twice the
    absolute sum of the last computed octave of resummation terms
    (floored at 2 percent); beyond that raises QuadratureError.
    """
    if t < 100.0:
        raise DomainError("fp_coefficients needs t >= 100")
    if k_max < 64:
        raise DomainError("k_max >= 64")
    if atoms is None:
        atoms = _atoms(DEFAULT_SPEC, "nu_tilde", DEFAULT_SPEC.level)
    M = default_length(t, "identities")
    need = max(8 * M, 2 * (k_max + 1), int(8.0 * t / TAU))
    if grid_points is None:
        P = 1 << max(8, (need - 1).bit_length())
        if P > (1 << 24):
            raise QuadratureError(f"needs {P} grid points; > 2^24")
    else:
        P = int(grid_points)
        if P < need:
            raise QuadratureError(
                f"{P} grid points cannot resolve the integrand; need "
                f">= {need}")

    alpha = np.arange(P, dtype=np.float64) / P
    m = np.arange(1, M, dtype=np.float64)
    s = complex(0.5, t)

    def _S(points: np.ndarray) -> np.ndarray:
        acc = np.zeros(points.size, dtype=np.complex128)
        blk = max(1, (1 << 22) // points.size)
        for lo in range(0, M - 1, blk):
            lb = np.log(m[lo:lo + blk, None] + points[None, :])
            acc += np.exp(-s * lb).sum(axis=0)
        return acc

    Sg = _S(alpha)
    f = Sg.real ** 2 + Sg.imag ** 2
    F = np.fft.fft(f)[:k_max + 1] / P

    # the atom points sit off the grid; evaluate |S|^2 exactly there
    k = np.arange(1, k_max + 1, dtype=np.float64)
    S_at = _S(atoms.points)
    direct = float(atoms.weights @ (S_at.real ** 2 + S_at.imag ** 2))

    best = None
    for sign in (+1.0, -1.0):
        circ = np.exp(2j * np.pi * sign * np.outer(k, atoms.points)) \
            @ atoms.weights
        terms = 2.0 * (F[1:] * circ).real
        recon = F[0].real + csum(terms)
        err = abs(recon - direct) / max(1e-30, abs(direct))
        if best is None or err < best[1]:
            best = (sign, err, recon, terms)
    sign, rel_err, recon, terms = best
    # the resummation is truncated at k_max; the omitted tail is bounded
    # by the (signed, hence cancelling) last octave actually computed
    tail = 2.0 * float(np.abs(terms[k_max // 2:]).sum()) \
        / max(1e-30, abs(direct))
    if rel_err > max(0.02, tail):
        raise QuadratureError(
            f"resummation off by {rel_err:.2e} (tail bound {tail:.2e}); "
            "grid under-resolved or k_max too small for the measure tail")
    if not full_output:
        return F
    return F, {"sign": sign, "relative_error": rel_err, "grid_points": P,
               "direct": direct, "reconstructed": recon}


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _chi_plus_row(ts: np.ndarray) -> np.ndarray:
    out = np.empty(ts.size, dtype=np.complex128)
    for i, t in enumerate(ts):
        out[i] = chi_phases(complex(0.5, float(t)))[0]
    return out


def _afe_batch(ts: np.ndarray, spec: CantorSpec, cap: int) -> np.ndarray:
    """L(1/2 + i t) for an ascending array of heights, via the symmetric
    functional-equation form with shared coefficient tables.

    Points are grouped by the common truncation B = floor(sqrt(t/2pi)); the
    main sum is one matrix product per group and the dual sum one product
    per (group, m) with the atom level chosen per m.
    """
    out = np.empty(ts.size, dtype=np.complex128)
    B = np.sqrt(ts / TAU).astype(np.int64)
    a_min = float(_atoms(spec, "nu_tilde", 2).points.min())
    chi = _chi_plus_row(ts)
    for k in np.unique(B):
        idx = np.nonzero(B == k)[0]
        tg = ts[idx]
        N = max(1, int(k))
        r = r_table(spec, N)
        n = np.arange(1, N + 1, dtype=np.float64)
        ln = np.log(n)
        coeff = r * np.exp(1j * spec.phi * n) / np.sqrt(n)
        vals = np.exp(-1j * np.outer(tg, ln)) @ coeff
        # level choice keyed to the top of the B-group, not to whichever
        # subset of nodes lands here, so re-evaluations are bit-identical
        t_hi = TAU * float(k + 1) ** 2
        dual = np.zeros(tg.size, dtype=np.complex128)
        for m in range(N):
            atoms = _atoms(spec, "nu_tilde",
                           atom_level_for(t_hi, m, a_min, spec, cap))
            la = np.log(m + atoms.points)
            dual += np.exp(1j * np.outer(tg, la)) @ \
                (atoms.weights / np.sqrt(m + atoms.points))
        out[idx] = vals + chi[idx] * dual
    return out


def second_moment_L(T: float, spec: CantorSpec = DEFAULT_SPEC, *,
                    panel_width: float = 0.5, gl_nodes: int = 8,
                    level: int | None = None) -> MomentResult:
    """int_T^{2T} |L(1/2+it)|^2 dt against the diagonal prediction C T.

    Gauss-Legendre panels of fixed width; with the default width the
    integrand completes well under one oscillation per panel, and a
    doubled-order recomputation of one mid panel guards the step choice.
    """
    if T < 1.0e3:
        raise DomainError("second_moment_L needs T >= 1e3")
    if panel_width <= 0.0 or panel_width > 2.0:
        raise DomainError("panel_width in (0, 2]")
    n_panels = int(round(T / panel_width))
    edges = T + panel_width * np.arange(n_panels + 1)
    x, wq = _gl(gl_nodes)
    centers = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * panel_width
    ts = (centers[:, None] + half * x[None, :]).ravel()
    tw = np.tile(half * wq, n_panels)
    cap = suggested_level(2.0 * T, spec) if level is None else level

    vals = _afe_batch(ts, spec, cap)
    dens = vals.real ** 2 + vals.imag ** 2
    value = csum(tw * dens)

    # redo one interior panel at doubled order; a visible shift means the
    # panel width is too coarse for this height
    j = n_panels // 2
    x2, w2 = _gl(2 * gl_nodes)
    t2 = centers[j] + half * x2
    v2 = _afe_batch(t2, spec, cap)
    coarse = fsum((half * wq * dens[j * gl_nodes:(j + 1) * gl_nodes])
                  .tolist())
    fine = csum(half * w2 * (v2.real ** 2 + v2.imag ** 2))
    if abs(fine - coarse) > 1.0e-6 * max(abs(fine), 1.0e-12):
        raise QuadratureError(
            f"panel refinement moved {coarse:.6e} -> {fine:.6e}; "
            "reduce panel_width")

    c_nu = wick_constants(spec, 10 ** 6).c_nu
    main = c_nu * T
    return MomentResult(T=float(T), value=float(value), main_term=main,
                        ratio=float(value / main),
                        quadrature_points=int(ts.size))


# ------------------------------------------------------------- fourth moment

def _pair_index(M: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Index pairs (m1, m2) with 1 <= m1 <= m2 <= M-1 and the weight
    1 + [m1 < m2] each pair carries in the squared partial sum."""
    i1, i2 = np.triu_indices(M - 1)
    mult = np.where(i1 < i2, 2.0, 1.0)
    return i1, i2, mult


def mv_fourth(alpha: float, M: int) -> MvBreakdown:
    """Gap-weighted fourth-moment budget of S_M at a single alpha.

    The squared partial sum is a trigonometric polynomial with frequencies
    log((m1+alpha)(m2+alpha)); by the Vieta argument these are pairwise
    distinct for irrational alpha.  The mean-value error budget weights
    each |coefficient|^2 by the reciprocal of the gap to the nearest other
    frequency, split into the generic part (nearest neighbor is
    (m1, m2 +- 1)) and the accidental rest.
    """
    if not (0.0 < alpha < 2.0):
        raise DomainError("alpha in (0, 2)")
    if M < 10:
        raise DomainError("M >= 10")
    i1, i2, mult = _pair_index(M)
    a = alpha + np.arange(1, M, dtype=np.float64)
    Q = a[i1] * a[i2]
    c2 = (mult * mult) / Q
    lam = np.log(Q)

    order = np.argsort(lam)
    ls = lam[order]
    gaps = np.diff(ls)
    if gaps.size and float(gaps.min()) < 1.0e-13:
        j = int(gaps.argmin())
        raise CollisionError(
            f"frequencies {ls[j]:.15f} and {ls[j + 1]:.15f} collide; "
            "alpha is (numerically) rational")
    left = np.concatenate(([np.inf], gaps))
    right = np.concatenate((gaps, [np.inf]))
    delta = np.minimum(left, right)
    nb_pos = np.where(left <= right,
                      np.arange(ls.size) - 1, np.arange(ls.size) + 1)
    nb_pos = np.clip(nb_pos, 0, ls.size - 1)

    i1s, i2s = i1[order], i2[order]
    generic = (i1s[nb_pos] == i1s) & (np.abs(i2s[nb_pos] - i2s) == 1)
    contrib = c2[order] / delta
    generic_part = csum(contrib[generic])
    accidental_part = csum(contrib[~generic])

    diagonal = csum(c2)
    # pure algebra: the pair weights must resum to 2 (sum 1/a)^2 - sum 1/a^2
    s1 = fsum((1.0 / a).tolist())
    s2 = fsum((1.0 / (a * a)).tolist())
    closed = 2.0 * s1 * s1 - s2
    if abs(diagonal - closed) > 1.0e-12 * max(1.0, closed):
        raise RuntimeError(f"pair-weight resummation {diagonal!r} drifted "
                           f"from the closed form {closed!r}")
    return MvBreakdown(diagonal=diagonal,
                       error_sum=generic_part + accidental_part,
                       generic_part=generic_part,
                       accidental_part=accidental_part)


def mv_integral_ratio(M_list, atoms: MeasureAtoms, *,
                      chunk: int = 256) -> GridScan:
    """Atom average of the mv_fourth budget, normalized by M^2 (log M)^2,
    with the accidental share alongside."""
    M_list = [int(M) for M in M_list]
    if any(not 20 <= M <= 200 for M in M_list):
        raise DomainError("every M must be in [20, 200]")
    ratios, shares = [], []
    for M in M_list:
        i1, i2, mult = _pair_index(M)
        m = np.arange(1, M, dtype=np.float64)
        c2w = mult * mult
        tot = 0.0
        acc = 0.0
        ch = max(16, min(chunk, (1 << 21) // i1.size))
        for lo in range(0, atoms.points.size, ch):
            al = atoms.points[lo:lo + ch]
            w = atoms.weights[lo:lo + ch]
            a = al[:, None] + m[None, :]
            Q = a[:, i1] * a[:, i2]
            lam = np.log(Q)
            order = np.argsort(lam, axis=1)
            ls = np.take_along_axis(lam, order, axis=1)
            gaps = np.diff(ls, axis=1)
            if float(gaps.min()) < 1.0e-13:
                raise CollisionError("frequency collision inside the "
                                     "support; unexpected for these atoms")
            pad = np.full((al.size, 1), np.inf)
            left = np.concatenate((pad, gaps), axis=1)
            right = np.concatenate((gaps, pad), axis=1)
            delta = np.minimum(left, right)
            pos = np.arange(ls.shape[1])[None, :]
            nb = np.clip(np.where(left <= right, pos - 1, pos + 1),
                         0, ls.shape[1] - 1)
            i1s = np.take_along_axis(np.broadcast_to(i1[None, :], lam.shape),
                                     order, axis=1)
            i2s = np.take_along_axis(np.broadcast_to(i2[None, :], lam.shape),
                                     order, axis=1)
            generic = (np.take_along_axis(i1s, nb, axis=1) == i1s) \
                & (np.abs(np.take_along_axis(i2s, nb, axis=1) - i2s) == 1)
            contrib = np.take_along_axis(c2w[None, :] / Q, order, axis=1) \
                / delta
            tot += float(w @ contrib.sum(axis=1))
            acc += float(w @ np.where(generic, 0.0, contrib).sum(axis=1))
        norm = M * M * math.log(M) ** 2
        ratios.append(tot / norm)
        shares.append(acc / tot)
    return GridScan(parameter="M", grid=tuple(float(M) for M in M_list),
                    columns={"ratio": tuple(ratios),
                             "accidental_share": tuple(shares)},
                    meta={"normalization": "M^2 (log M)^2"})


def _od4_level(T: float, atoms: MeasureAtoms) -> int:
    """Coarsest atom level keeping the cross-term phase drift across one
    cell below the usual O(1) budget at height 2T (worst term m = 1)."""
    spec = atoms.spec
    a_min = float(np.min(atoms.points))
    arg = 2.0 * T * spec.w / (TAU * 1.34 * (1.0 + a_min))
    if arg <= 1.0:
        return 2
    lev = math.ceil(math.log(arg) / math.log(spec.base))
    return min(atoms.level, max(2, lev))


def od4_scan(T_grid, atoms: MeasureAtoms, *, panel_width: float = 0.5,
             gl_nodes: int = 8) -> GridScan:
    """Fourth moment of S_M over the window [T, 2T] per grid point, with
    the t-averaged diagonal removed:

        od4 = int_T^{2T} int |S_M|^4 d(atoms) dt - T int sum_j |c_j|^2

    where the c_j are the product-variable coefficients and M is the
    truncation sqrt(T/2pi).  The t integral uses the same fixed-width
    Gauss-Legendre panels as second_moment_L; per node the atom average
    costs O(atoms * M) through |S_M(alpha)|^4 directly (the pair
    expansion is never materialized).  Atoms are coarsened to the level
    the height actually resolves, identically in both terms.  Columns
    report od4/T and the double integral over T (log M)^2, the
    truncation-matched form of the Gaussian prediction 2 sigma^4 (it
    drifts down toward 2 as M grows).
    """
    T_grid = [float(T) for T in T_grid]
    if any(not (300.0 <= T <= 3.0e4) for T in T_grid):
        raise DomainError("every T must lie in [300, 3e4]")
    x, wq = _gl(gl_nodes)
    od_col, dbl_col, m_col = [], [], []
    for T in T_grid:
        M = max(3, int(math.sqrt(T / TAU)))
        at = _atoms(atoms.spec, atoms.kind, _od4_level(T, atoms))
        na = at.points.size
        m = np.arange(1, M, dtype=np.float64)
        base = m[:, None] + at.points[None, :]
        lb = np.log(base)
        amp = 1.0 / np.sqrt(base)
        inv = 1.0 / base
        # nu-averaged Wick diagonal: 2 (sum 1/(m+a))^2 - sum 1/(m+a)^2
        s1 = inv.sum(axis=0)
        diag = float(at.weights @ (2.0 * s1 * s1 - (inv * inv).sum(axis=0)))

        n_panels = int(round(T / panel_width))
        half = 0.5 * panel_width
        # e^{-i t log b} factors over t = center + offset; the offset
        # part is the same gl_nodes x atoms table for every panel.
        off = np.exp(-1j * half * x[:, None, None] * lb[None, :, :])
        parts = []
        blk = max(8, (1 << 21) // (gl_nodes * na))
        for lo in range(0, n_panels, blk):
            cent = T + panel_width * (np.arange(lo, min(lo + blk, n_panels))
                                      + 0.5)
            S = np.zeros((cent.size, gl_nodes, na), dtype=np.complex128)
            for j in range(M - 1):
                at_cent = np.exp(-1j * np.outer(cent, lb[j]))
                S += amp[j] * at_cent[:, None, :] * off[None, :, j, :]
            p2 = S.real ** 2 + S.imag ** 2
            vals = (p2 * p2) @ at.weights
            parts.append(half * float(np.dot(
                np.tile(wq, cent.size), vals.reshape(-1))))
        total = fsum(parts)
        od_col.append((total - T * diag) / T)
        dbl_col.append(total / (T * math.log(M) ** 2))
        m_col.append(float(M))
    return GridScan(parameter="T", grid=tuple(T_grid),
                    columns={"od4_over_T": tuple(od_col),
                             "double_over_main": tuple(dbl_col),
                             "M": tuple(m_col)},
                    meta={"window": "[T, 2T]", "length": "sqrt(T/2pi)",
                          "panel_width": panel_width,
                          "gl_nodes": gl_nodes})


def lebesgue_alpha_oracle(t: float, delta: float) -> MomentResult:
    """Lebesgue control: int_delta^{1-delta} |zeta(1/2+it, alpha)|^2 d(alpha)
    against log(t/2pi) + 2 gamma - 2 log(2 sin(pi delta)).

    The integrand oscillates at rate ~ t/alpha, so the panels are geometric
    in alpha, about three oscillations per 16-node panel.
    """
    if t < 1.0e3:
        raise DomainError("t >= 1e3")
    if not (0.0 < delta < 0.5):
        raise DomainError("delta in (0, 0.5)")
    step = 1.0 + 3.0 * TAU / t
    n_panels = max(1, math.ceil(math.log((1.0 - delta) / delta)
                                / math.log(step)))
    edges = np.geomspace(delta, 1.0 - delta, n_panels + 1)
    x, wq = _gl(16)
    centers = 0.5 * (edges[:-1] + edges[1:])
    halfw = 0.5 * np.diff(edges)
    alphas = (centers[:, None] + halfw[:, None] * x[None, :]).ravel()
    weights = (halfw[:, None] * wq[None, :]).ravel()
    z = hurwitz_zeta(complex(0.5, t), alphas)
    value = csum(weights * (z.real ** 2 + z.imag ** 2))
    main = math.log(t / TAU) + 2.0 * np.euler_gamma \
        - 2.0 * math.log(2.0 * math.sin(math.pi * delta))
    return MomentResult(T=float(t), value=float(value), main_term=main,
                        ratio=float(value / main),
                        quadrature_points=int(alphas.size))
