"""Self-similar digit measures on an interval and their Fourier data.

The central object is the equal-weight self-similar measure nu on
[theta0, theta1] built from `keep_count` evenly spaced digits in base
`base`.  With center phi = (theta0+theta1)/2, width w = theta1-theta0 and
digit offsets u in [-1, 1], a point of the attractor is

    theta = phi + (w*(base-1)/2) * sum_j u_{d_j} * base^{-j},

so the support is exactly [theta0, theta1] (the extreme digit strings give
the endpoints).  The Fourier transform factorizes through the digit
averages:

    nu_hat(n) = e^{i n phi} * r_n,
    r_n = prod_j mean_digits cos(n * (w*(base-1)/2) * u * base^{-j}).

For the default 2-of-3 (middle-thirds) case the digit offsets are {-1, +1}
and the factor collapses to cos(w*n*3^{-j}); the product telescopes as
r_{3n} = cos(w*n) * r_n.

Note on the width convention: a variant of the cosine product with argument
w*n/(2*3^j) circulates, which would place the support on the middle half of
[theta0, theta1].  That variant is inconsistent with the derived constants
this package reproduces (the quadratic coefficient sum ~1.156, the
pushforward support [1/(4 pi), 1/pi] for [0.5, 2.0], and the clearance
1/3 - 1/pi of the point 1/3).  The full-width convention above satisfies
all of them and is used throughout.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .accum import csum, csum_complex, fsum
from .errors import BudgetError, DomainError, SingularityError

TAU = 2.0 * math.pi

# a cosine factor 1 - cos(x) < 1e-18 changes nothing in double precision
_TRUNC_X = math.sqrt(2e-18)

# below this argument the per-level log-factor series through x^4 is
# accurate to x^6 ~ 1e-18, so the remaining levels sum geometrically
_SERIES_X = 1e-3

_ATOM_BUDGET = 2_000_000


@dataclass(frozen=True)
class CantorSpec:
    """Parameters of the rescaled digit measure."""

    theta0: float = 0.5
    theta1: float = 2.0
    level: int = 12
    keep_count: int = 2
    base: int = 3

    def __post_init__(self) -> None:
        if not (0.0 < self.theta0 < self.theta1 < TAU):
            raise DomainError("need 0 < theta0 < theta1 < 2*pi")
        if not (2 <= self.keep_count < self.base):
            raise DomainError("need 2 <= keep_count < base")
        if self.level < 1:
            raise DomainError("level >= 1")

    @property
    def phi(self) -> float:
        return 0.5 * (self.theta0 + self.theta1)

    @property
    def w(self) -> float:
        return self.theta1 - self.theta0

    @property
    def dimension(self) -> float:
        return math.log(self.keep_count) / math.log(self.base)

    @property
    def digit_offsets(self) -> np.ndarray:
        """Evenly spaced digit positions in [-1, 1], endpoints included."""
        k = self.keep_count
        return -1.0 + 2.0 * np.arange(k) / (k - 1)

    @property
    def digit_scale(self) -> float:
        """Displacement unit: offsets*scale*base^{-j} fills [-w/2, w/2]."""
        return self.w * (self.base - 1) / 2.0


DEFAULT_SPEC = CantorSpec()


@dataclass(frozen=True)
class MeasureAtoms:
    """Discrete level-L approximation of the measure or a pushforward."""

    points: np.ndarray
    weights: np.ndarray
    kind: str  # native | nu_tilde | nu_tilde_prime
    level: int
    spec: CantorSpec = field(repr=False)

    def __post_init__(self) -> None:
        if self.points.size == 0:
            raise DomainError("empty atom list")
        if abs(fsum(self.weights.tolist()) - 1.0) > 1e-15:
            raise DomainError("weights must sum to 1")

    @property
    def support_width(self) -> float:
        return float(self.points.max() - self.points.min())

    @property
    def resolution(self) -> float:
        """Diameter of a finest-level cell."""
        scale = self.spec.w if self.kind == "native" else self.spec.w / TAU
        return scale * self.spec.base ** (-self.level)


def build_atoms(spec: CantorSpec, target: str = "native",
                level: int | None = None) -> MeasureAtoms:
    """Enumerate the level-L atoms of nu or of a circle pushforward.

    target 'native' keeps theta in [theta0, theta1]; 'nu_tilde' maps
    alpha = theta/(2 pi); 'nu_tilde_prime' maps alpha = 1 - theta/(2 pi).
    Atom order is lexicographic in the digit string, most significant digit
    first, so tables are reproducible.
    """
    if target not in ("native", "nu_tilde", "nu_tilde_prime"):
        raise DomainError(f"unknown target {target!r}")
    lv = spec.level if level is None else level
    if lv < 1:
        raise DomainError("level >= 1")
    if spec.keep_count ** lv > _ATOM_BUDGET:
        raise BudgetError(f"{spec.keep_count}^{lv} atoms exceed budget")
    offs = spec.digit_offsets * spec.digit_scale
    pts = np.array([spec.phi])
    for j in range(1, lv + 1):
        step = offs * float(spec.base) ** (-j)
        pts = (pts[:, None] + step[None, :]).ravel()
    if target == "nu_tilde":
        pts = pts / TAU
    elif target == "nu_tilde_prime":
        pts = 1.0 - pts / TAU
    n = pts.size
    return MeasureAtoms(points=pts, weights=np.full(n, 1.0 / n),
                        kind=target, level=lv, spec=spec)


def _digit_factor(spec: CantorSpec, x: np.ndarray | float):
    """mean over digits of cos(x*u): one level's Fourier factor."""
    u = np.asarray(spec.digit_offsets, dtype=np.float64)
    if np.isscalar(x):
        return float(np.mean(np.cos(x * u)))
    # the offsets are symmetric about 0 and cos is even: one cosine per
    # distinct |u|, weighted by multiplicity
    uu, cnt = np.unique(np.abs(u), return_counts=True)
    w = cnt / float(u.size)
    x = np.asarray(x, dtype=np.float64)
    out = np.full(x.shape, w[0]) if uu[0] == 0.0 else w[0] * np.cos(uu[0] * x)
    for k in range(1, uu.size):
        out += w[k] * np.cos(uu[k] * x)
    return out


def r_value(spec: CantorSpec, n: int) -> float:
    """The real amplitude r_n of nu_hat(n), by direct product accumulation."""
    if n == 0:
        return 1.0
    r = 1.0
    j = 1
    while True:
        x = spec.digit_scale * abs(n) * spec.base ** (-float(j))
        if x < _TRUNC_X:
            break
        r *= _digit_factor(spec, x)
        j += 1
    return r


def r_table(spec: CantorSpec, N: int) -> np.ndarray:
    """r_n for n = 1..N, vectorized over n."""
    if N < 1:
        raise DomainError("N >= 1")
    n = np.arange(1, N + 1, dtype=np.float64)
    r = np.ones(N)
    j = 1
    while True:
        scale = spec.digit_scale * spec.base ** (-float(j))
        if scale * N < _SERIES_X:
            break
        r *= _digit_factor(spec, scale * n)
        j += 1
    if scale * N >= _TRUNC_X:
        # remaining levels have argument x_j = scale*n*b^{-k}; their
        # log-factors -m2/2 x^2 + (m4/24 - m2^2/8) x^4 + O(x^6) sum as
        # geometric series, with total error below x^6 ~ 1e-18
        u = np.asarray(spec.digit_offsets, dtype=np.float64)
        m2 = float(np.mean(u * u))
        m4 = float(np.mean(u ** 4))
        b2 = float(spec.base) ** -2.0
        x2 = (scale * n) ** 2
        r *= np.exp((-0.5 * m2 / (1.0 - b2)) * x2
                    + ((m4 / 24.0 - m2 * m2 / 8.0) / (1.0 - b2 * b2)) * x2 * x2)
    return r


def nu_hat(spec: CantorSpec, n):
    """Fourier coefficient nu_hat(n) = e^{i n phi} r_n; n scalar or array."""
    if np.isscalar(n):
        if n < 0:
            raise DomainError("n >= 0")
        return complex(np.exp(1j * n * spec.phi) * r_value(spec, int(n)))
    n = np.asarray(n)
    if np.any(n < 0):
        raise DomainError("n >= 0")
    out = np.empty(n.shape, dtype=np.complex128)
    nz = n > 0
    nmax = int(n.max()) if n.size else 0
    table = r_table(spec, max(nmax, 1))
    out[~nz] = 1.0
    nn = n[nz].astype(np.int64)
    out[nz] = np.exp(1j * nn * spec.phi) * table[nn - 1]
    return out


def _exact_points(atoms: MeasureAtoms) -> np.ndarray:
    """Digit coordinates of the atoms in extended precision.

    The stored double positions carry ~3e-15 construction rounding, which a
    phase factor e^{inx} amplifies to ~n*3e-15; at n ~ 1e4 that noise would
    dominate a machine-precision comparison with the cosine product.  The
    digit expansion is cheap to re-evaluate in float128, where the identity
    survives to ~1e-16.
    """
    spec = atoms.spec
    one = np.float128(1.0)
    w = np.float128(spec.theta1) - np.float128(spec.theta0)
    scale = w * np.float128(spec.base - 1) / 2
    offs = spec.digit_offsets.astype(np.float128) * scale
    pts = np.array([(np.float128(spec.theta0) + np.float128(spec.theta1)) / 2])
    for j in range(1, atoms.level + 1):
        step = offs * np.float128(spec.base) ** np.float128(-j)
        pts = (pts[:, None] + step[None, :]).ravel()
    pi128 = np.float128("3.14159265358979323846264338327950288")
    if atoms.kind == "nu_tilde":
        pts = pts / (2 * pi128)
    elif atoms.kind == "nu_tilde_prime":
        pts = one - pts / (2 * pi128)
    return pts


def nu_hat_empirical(atoms: MeasureAtoms, n: int) -> complex:
    """Sum w_k e^{i n x_k} over the atoms (cross-check of the product form)."""
    if atoms.points.size == 0:
        raise DomainError("empty atoms")
    pts = _exact_points(atoms)
    ph = np.float128(n) * pts
    w0 = np.float128(1.0) / pts.size
    return complex(float(np.cos(ph).sum() * w0), float(np.sin(ph).sum() * w0))


def nu_hat_table(atoms: MeasureAtoms, H: int) -> np.ndarray:
    """Fourier coefficients sum_k w_k e^{i h x_k} for h = 1..H, as an array.

    Doubles are enough here: h*x stays below ~1e3 rad for the supports we
    use, so the phase rounding sits around 1e-13 absolute.
    """
    if H < 1:
        raise DomainError("H >= 1")
    if atoms.points.size == 0:
        raise DomainError("empty atoms")
    h = np.arange(1, H + 1, dtype=np.float64)
    ph = np.outer(h, atoms.points)
    return np.exp(1j * ph) @ atoms.weights


def strichartz_partial(spec: CantorSpec, N: int) -> float:
    """Quadratic partial sum sum_{n<=N} |nu_hat(n)|^2."""
    r = r_table(spec, N)
    return csum(r * r)


def strichartz_fit(spec: CantorSpec, N_max: int) -> tuple[float, list[tuple[int, float]]]:
    """Least-squares constant C in S(N) ~ C N^{1-d} over dyadic N.

    Returns (C, [(N, S(N)) ...]).  The fit is linear through the origin in
    the variable N^{1-d}.
    """
    d = spec.dimension
    r = r_table(spec, N_max)
    sq = np.cumsum(r * r)
    pts = []
    N = 2
    while N <= N_max:
        pts.append((N, float(sq[N - 1])))
        N *= 2
    x = np.array([p[0] ** (1.0 - d) for p in pts])
    y = np.array([p[1] for p in pts])
    C = float(np.dot(x, y) / np.dot(x, x))
    return C, pts


@dataclass(frozen=True)
class WickConstants:
    """Weighted power sums of |nu_hat| used by the moment predictions."""

    c_nu: float
    c4: float
    c6: float
    truncation_N: int

    def __post_init__(self) -> None:
        if not (0.0 < self.c6 < self.c4 < self.c_nu):
            raise DomainError("expected 0 < c6 < c4 < c_nu")

    @property
    def wick4(self) -> float:
        """Gaussian-pairing prediction for the fourth coefficient moment."""
        return 2.0 * self.c_nu ** 2 - self.c4

    @property
    def wick6(self) -> float:
        """Gaussian-pairing prediction for the sixth coefficient moment."""
        return 6.0 * self.c_nu ** 3 - 9.0 * self.c_nu * self.c4 + 4.0 * self.c6


def wick_constants(spec: CantorSpec, N: int) -> WickConstants:
    """c_nu = sum r^2/n, c4 = sum r^4/n^2, c6 = sum r^6/n^3 up to N."""
    if N < 1000:
        raise DomainError("N >= 1e3 for stable constants")
    r = r_table(spec, N)
    n = np.arange(1, N + 1, dtype=np.float64)
    r2 = r * r
    inv = 1.0 / n
    return WickConstants(
        c_nu=csum(r2 * inv),
        c4=csum(r2 * r2 * inv * inv),
        c6=csum(r2 * r2 * r2 * inv * inv * inv),
        truncation_N=N,
    )


def ball_mass_profile(atoms: MeasureAtoms, deltas) -> list[float]:
    """max over centers of the measure of [c-delta, c+delta], per delta.

    The maximum over all real centers of the count of atoms in a window of
    length 2*delta is attained with the window's left edge at an atom, so a
    two-pointer sweep over the sorted atoms gives the exact maximum (it
    dominates any center grid).
    """
    pts = np.sort(atoms.points)
    w0 = 1.0 / pts.size  # equal weights
    out = []
    for d in deltas:
        if d <= 0:
            raise DomainError("delta > 0")
        hi = np.searchsorted(pts, pts + 2.0 * d, side="right")
        out.append(float((hi - np.arange(pts.size)).max() * w0))
    return out


def ball_mass_slope(atoms: MeasureAtoms, deltas) -> tuple[float, list[bool]]:
    """Log-log slope of the ball-mass profile against delta.

    Deltas below the atom resolution are flagged (True) and excluded: at
    that scale the discrete approximation no longer sees the measure.
    """
    masses = ball_mass_profile(atoms, deltas)
    res = atoms.resolution
    flagged = [d < res for d in deltas]
    xs = [math.log(d) for d, f in zip(deltas, flagged) if not f]
    ys = [math.log(m) for m, f in zip(masses, flagged) if not f]
    if len(xs) < 2:
        raise DomainError("not enough resolvable deltas for a slope")
    slope = float(np.polyfit(xs, ys, 1)[0])
    return slope, flagged


def riesz_potential(atoms: MeasureAtoms, alpha_star: float) -> float:
    """sum of weight/|x - alpha_star| over the atoms.

    alpha_star must keep clearance above the atom resolution; points buried
    inside the support raise SingularityError.
    """
    dist = np.abs(atoms.points - alpha_star)
    if float(dist.min()) <= atoms.resolution:
        raise SingularityError(
            f"alpha_star={alpha_star} within resolution of an atom")
    return csum(atoms.weights / dist)


# ---------------------------------------------------------------------------
# coefficient cache (text, one line per n)

def write_coefficient_cache(path, spec: CantorSpec, N: int) -> None:
    """Write nu_hat(1..N) as 'n,re,im' lines with 17 significant digits."""
    coeff = nu_hat(spec, np.arange(1, N + 1))
    with open(path, "w") as f:
        f.write(
            "# cantorlab-coefficients"
            f" theta0={spec.theta0:.17g} theta1={spec.theta1:.17g}"
            f" level={spec.level} keep_count={spec.keep_count}"
            f" base={spec.base} factor_tol=1e-18 N={N}\n")
        for i, z in enumerate(coeff, start=1):
            f.write(f"{i},{z.real:.17g},{z.imag:.17g}\n")


def read_coefficient_cache(path) -> tuple[dict, np.ndarray]:
    """Read a cache file; returns (header fields, coefficients for n>=1)."""
    with open(path) as f:
        header = f.readline()
        if not header.startswith("# cantorlab-coefficients"):
            raise DomainError("not a coefficient cache")
        meta: dict = {}
        for tok in header.split()[2:]:
            k, v = tok.split("=")
            meta[k] = float(v) if "." in v or "e" in v else int(v)
        rows = [line.rstrip("\n").split(",") for line in f if line.strip()]
    out = np.empty(len(rows), dtype=np.complex128)
    for n, re_, im_ in rows:
        out[int(n) - 1] = complex(float(re_), float(im_))
    return meta, out


def cache_checksum(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def with_center(spec: CantorSpec, phi: float) -> CantorSpec:
    """Same measure shape translated to center phi (width preserved)."""
    half = spec.w / 2.0
    return replace(spec, theta0=phi - half, theta1=phi + half)
