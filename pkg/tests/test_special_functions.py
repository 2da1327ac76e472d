import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cantorlab.errors import (
    AccuracyWarning,
    BudgetError,
    DivergenceError,
    DomainError,
    PoleError,
)
from cantorlab.measure import DEFAULT_SPEC, build_atoms
from cantorlab.special_functions import (
    ComplexPoint,
    PartialSumSpec,
    afe_eval,
    atom_level_for,
    chi_factor,
    chi_phases,
    default_length,
    harmonic,
    hurwitz_zeta,
    hurwitz_zeta_afe,
    j_sum,
    jensen_ratio,
    l_eval,
    log_gamma,
    partial_sums,
    periodic_zeta,
    suggested_level,
)

TAU = 2.0 * math.pi
GAMMA = 0.5772156649015329

# Multiprecision reference values (mpmath at 40 digits), keyed by
# (sigma, t, alpha). The t = 1e6 row is the stress case for the phase
# accumulation in the main sum.
HURWITZ_REF = {
    (2.0, 0.0, 1.0): (1.64493406684822644, 0.0),
    (2.0, 0.0, 0.25): (17.1973291545071107, 0.0),
    (0.5, 5.0, 0.5): (-1.53857410135908331, -0.856871962543084555),
    (0.5, 100.0, 0.07957747154594767): (0.748054251858135397, 2.62329947556080544),
    (0.5, 100.0, 0.3183098861837907): (-1.91620310623693497, -0.378500110557084071),
    (0.5, 1000.0, 0.2): (0.158197075293943757, 1.19192167901786461),
    (1.5, 1000.0, 0.7): (-0.040802014248474774, -2.10874895596693967),
    (0.5, 10000.0, 0.25): (-0.864710255566539704, -0.577157809718279367),
    (3.0, 50.0, 0.9): (0.798727780704494823, -1.25009365877458786),
    (0.1, 300.0, 0.6): (2.47326354723889003, -0.552706554516047116),
    (2.5, 100000.0, 0.33): (13.6836055887915374, -7.83650260649465528),
    (0.5, 1000000.0, 0.25): (-0.803736095764466036, -2.60869248760455573),
}

# F(theta, s) references, keyed by (theta, sigma, t). The sigma = 1.5 row
# exercises the direct branch, the rest the functional-equation branch.
PERIODIC_REF = {
    (1.0, 3.0, 0.0): (0.448573007280017398, 0.94286923678411146),
    (1.0, 0.5, 10.0): (2.91593113015480112, 2.06515942868200098),
    (1.25, 0.0, 50.0): (2.41035656208487191, -14.8898935949940626),
    (0.5, 0.5, 30.0): (-0.197549451807838584, 1.84091526482132017),
    (2.0, 1.5, 12.0): (-0.751971008763799018, 0.916971923537866505),
}

# Gamma(1 - s) (2 pi)^{s - 1} at s = 1/2 + 100i; modulus ~ e^{-pi t / 2}
CHI_FACTOR_100 = complex(4.20717608192979557e-69, -4.33655395568801362e-69)


# ------------------------------------------------------------- containers


def test_complex_point_value():
    s = ComplexPoint(0.5, 14.0)
    assert s.value == complex(0.5, 14.0)
    with pytest.raises(DomainError):
        ComplexPoint(math.inf, 0.0)


def test_partial_sum_spec_defaults():
    p = PartialSumSpec(40)
    assert (p.range_lo, p.range_hi) == (1, 39)
    # M = 1 leaves an empty range, which is legal and sums to zero
    e = PartialSumSpec(1)
    assert e.range_hi == e.range_lo - 1
    with pytest.raises(DomainError):
        PartialSumSpec(0)
    with pytest.raises(DomainError):
        PartialSumSpec(10, range_lo=3, range_hi=1)


def test_default_length():
    assert default_length(TAU * 100.0) == 10
    assert default_length(400.0, context="identities") == 20
    assert default_length(1.0) == 1
    with pytest.raises(DomainError):
        default_length(0.0)
    with pytest.raises(DomainError):
        default_length(100.0, context="dual")


# -------------------------------------------------------------- log gamma


def test_log_gamma_known_points():
    assert log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-14)
    assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-14)
    z = complex(3.25, -2.0)
    assert log_gamma(z.conjugate()) == pytest.approx(
        log_gamma(z).conjugate(), rel=1e-13)


def test_log_gamma_duplication():
    # log G(2z) = log G(z) + log G(z + 1/2) + (2z-1) log 2 - log(pi)/2,
    # up to a multiple of 2 pi i in the imaginary part
    for z in (complex(3.7, 4.2), complex(0.8, -11.0), complex(6.0, 0.9)):
        lhs = log_gamma(2.0 * z)
        rhs = (log_gamma(z) + log_gamma(z + 0.5)
               + (2.0 * z - 1.0) * math.log(2.0) - 0.5 * math.log(math.pi))
        assert lhs.real == pytest.approx(rhs.real, rel=1e-12)
        wrap = (lhs.imag - rhs.imag) / TAU
        assert abs(wrap - round(wrap)) < 1e-12


# ----------------------------------------------------------- hurwitz zeta


@pytest.mark.parametrize("key", sorted(HURWITZ_REF))
def test_hurwitz_reference_values(key):
    sigma, t, alpha = key
    want = complex(*HURWITZ_REF[key])
    got = hurwitz_zeta(complex(sigma, t), alpha)
    assert abs(got - want) <= 5e-11 * abs(want)


def test_hurwitz_vectorized_matches_scalar():
    # reduction order differs between the 1-column and 4-column layouts,
    # so agreement is to rounding, not bitwise
    s = complex(0.5, 1000.0)
    alphas = np.array([0.2, 0.55, 0.8, 1.0])
    vec = hurwitz_zeta(s, alphas)
    for a, v in zip(alphas, vec):
        assert abs(hurwitz_zeta(s, float(a)) - v) <= 5e-13 * abs(v)


def test_hurwitz_shift_override_consistent():
    s = complex(2.0, 30.0)
    base = hurwitz_zeta(s, 0.25)
    assert hurwitz_zeta(s, 0.25, m0=500) == pytest.approx(base, rel=1e-11)


def test_hurwitz_halving_at_half():
    # zeta(s, 1/2) = (2^s - 1) zeta(s), a closed-form cross check
    for s in (2.0 + 0.0j, 3.0 + 0.0j, complex(0.5, 5.0)):
        lhs = hurwitz_zeta(s, 0.5)
        rhs = (2.0 ** s - 1.0) * hurwitz_zeta(s, 1.0)
        assert abs(lhs - rhs) <= 1e-11 * (1.0 + abs(rhs))


@settings(max_examples=30, deadline=None)
@given(
    alpha=st.floats(min_value=0.05, max_value=1.0),
    sigma=st.floats(min_value=0.3, max_value=2.5),
    t=st.floats(min_value=0.0, max_value=2e4),
)
def test_hurwitz_dyadic_splitting(alpha, sigma, t):
    # splitting m into even/odd: zeta(s,a) = 2^{-s} [zeta(s,a/2) + zeta(s,(a+1)/2)]
    s = complex(sigma, t)
    assume(abs(s - 1.0) > 0.05)  # near the pole both sides cancel in eps
    lhs = hurwitz_zeta(s, alpha)
    rhs = 2.0 ** (-s) * (hurwitz_zeta(s, alpha / 2.0)
                         + hurwitz_zeta(s, (alpha + 1.0) / 2.0))
    assert abs(lhs - rhs) <= 1e-9 * (1.0 + abs(lhs))


@settings(max_examples=30, deadline=None)
@given(
    alpha=st.floats(min_value=0.05, max_value=1.0),
    sigma=st.floats(min_value=0.3, max_value=2.5),
    t=st.floats(min_value=0.0, max_value=2e4),
)
def test_hurwitz_shift_recurrence(alpha, sigma, t):
    s = complex(sigma, t)
    assume(abs(s - 1.0) > 0.05)  # near the pole both sides cancel in eps
    lhs = hurwitz_zeta(s, alpha) - hurwitz_zeta(s, alpha + 1.0)
    rhs = alpha ** (-s)
    assert abs(lhs - rhs) <= 1e-9 * (1.0 + abs(rhs))


def test_hurwitz_domain():
    with pytest.raises(PoleError):
        hurwitz_zeta(1.0, 0.5)
    with pytest.raises(DomainError):
        hurwitz_zeta(2.0, 0.0)
    with pytest.raises(DomainError):
        hurwitz_zeta(2.0, np.array([0.5, -0.1]))


def test_hurwitz_afe_accuracy_band():
    # cheap estimator: absolute error scales like t^{-1/4} with a constant
    # near 2 to 2.5 measured across alpha; allow headroom but keep the
    # exponent honest
    for t in (300.0, 3000.0):
        bound = 3.5 * t ** -0.25
        errs = []
        for alpha in np.linspace(0.05, 1.0, 12):
            exact = hurwitz_zeta(complex(0.5, t), float(alpha))
            errs.append(abs(hurwitz_zeta_afe(t, float(alpha)) - exact))
            assert errs[-1] <= bound
        assert np.median(errs) <= 0.8 * bound


def test_hurwitz_afe_domain():
    with pytest.raises(DomainError):
        hurwitz_zeta_afe(10.0, 0.5)
    with pytest.raises(DomainError):
        hurwitz_zeta_afe(300.0, 1.5)


# ---------------------------------------------------------- periodic zeta


@pytest.mark.parametrize("key", sorted(PERIODIC_REF))
def test_periodic_reference_values(key):
    theta, sigma, t = key
    want = complex(*PERIODIC_REF[key])
    got = periodic_zeta(theta, complex(sigma, t))
    assert abs(got - want) <= 1e-11 * abs(want)


def test_periodic_at_pi():
    # F(pi, 2) = sum (-1)^n / n^2 = -pi^2 / 12
    got = periodic_zeta(math.pi, 2.0)
    assert got.real == pytest.approx(-math.pi ** 2 / 12.0, abs=1e-12)
    assert abs(got.imag) <= 1e-12


def test_periodic_against_brute_force():
    n = np.arange(1, 200001, dtype=np.float64)
    for theta in (0.7, 2.9):
        brute = complex(np.sum(np.exp(1j * theta * n) / n ** 3))
        assert periodic_zeta(theta, 3.0) == pytest.approx(brute, abs=1e-9)


def test_periodic_branches_agree_on_overlap():
    # integer s >= 2 would put Gamma(1-s) at a pole, so probe off-integer
    for theta in (0.5, 1.25, 2.0):
        for s in (complex(1.5, 7.0), complex(1.9, 0.3)):
            d = periodic_zeta(theta, s, branch="direct")
            f = periodic_zeta(theta, s, branch="fe")
            assert abs(d - f) <= 1e-9 * (1.0 + abs(d))


def test_periodic_conjugation():
    for theta, s in ((0.9, complex(0.5, 12.0)), (1.7, complex(1.6, 3.0))):
        lhs = periodic_zeta(TAU - theta, s.conjugate())
        assert lhs == pytest.approx(periodic_zeta(theta, s).conjugate(),
                                    rel=1e-12)


def test_periodic_theta_zero():
    assert periodic_zeta(0.0, 2.0) == pytest.approx(math.pi ** 2 / 6.0,
                                                    rel=1e-12)
    # 2 pi reduces to 0
    assert periodic_zeta(TAU, 3.0) == pytest.approx(1.2020569031595943,
                                                    rel=1e-11)
    with pytest.raises(DivergenceError):
        periodic_zeta(0.0, complex(0.5, 10.0))


def test_periodic_critical_growth_stays_subconvex():
    # |F(phi, 1/2 + it)| along dyadic t: the fitted log-log slope should
    # sit well under the trivial 1/2 + eps
    ts = 100.0 * 2.0 ** np.arange(11)
    vals = [abs(periodic_zeta(1.25, complex(0.5, t))) for t in ts]
    slope = np.polyfit(np.log(ts), np.log(vals), 1)[0]
    assert slope <= 0.55
    assert np.all(np.isfinite(vals))


def test_periodic_direct_branch_domain():
    with pytest.raises(DomainError):
        periodic_zeta(1.0, complex(0.8, 5.0), branch="direct")
    with pytest.raises(DomainError):
        periodic_zeta(1.0, 2.0, branch="euler")


# ------------------------------------------------------------ chi factors


def test_chi_factor_reference():
    got = chi_factor(100.0)
    assert abs(got - CHI_FACTOR_100) <= 1e-10 * abs(CHI_FACTOR_100)
    assert abs(got) == pytest.approx(6.04202207832e-69, rel=1e-9)


def test_chi_factor_underflows_silently():
    assert chi_factor(1000.0) == 0.0


def test_chi_factor_warns_near_real_axis():
    with pytest.warns(AccuracyWarning):
        chi_factor(0.5)


def test_chi_phases_critical_modulus():
    # |chi_plus(1/2 + it)| = (1 + e^{-2 pi t})^{-1/2}, which is 1.0 in
    # double precision already at modest t
    chip, chim = chi_phases(complex(0.5, 100.0))
    assert abs(chip) == pytest.approx(1.0, abs=1e-12)
    assert abs(chim) == pytest.approx(math.exp(-math.pi * 100.0), rel=1e-9)


def test_chi_phases_conjugate_symmetry():
    for s in (complex(0.5, 60.0), complex(0.3, 200.0)):
        chip, chim = chi_phases(s)
        chip_c, chim_c = chi_phases(s.conjugate())
        assert chip_c == pytest.approx(chim.conjugate(), rel=1e-12)
        assert chim_c == pytest.approx(chip.conjugate(), rel=1e-12)


# ------------------------------------------------------------ finite sums


def test_harmonic_values():
    assert harmonic(2) == 1.0
    assert harmonic(4) == pytest.approx(11.0 / 6.0, abs=1e-15)
    M = 1000
    assert harmonic(M) == pytest.approx(
        math.log(M) + GAMMA - 0.5 / M, abs=1.0 / M ** 2)
    with pytest.raises(DomainError):
        harmonic(1)


def test_j_sum_values():
    # single term: 1^{s-1} (1+1)^{-s} at s = 1/2
    assert j_sum(1, 0.5, 1, 1) == pytest.approx(1.0 / math.sqrt(2.0),
                                                rel=1e-15)
    # h = 0 collapses to the harmonic sum
    assert j_sum(0, complex(0.5, 333.0), 1, 39).real == pytest.approx(
        harmonic(40), rel=1e-14)
    assert j_sum(2, complex(0.5, 10.0), 5, 4) == 0.0


def test_j_sum_first_shift_stays_bounded():
    # |J_1(1/2 + it; 1, M-1)| at M = floor(sqrt(t)): exponent-pair lore
    # says O(1); anything drifting past 10 means a phase bug
    for t in np.geomspace(300.0, 1e5, 8):
        M = default_length(t, context="identities")
        assert abs(j_sum(1, complex(0.5, t), 1, M - 1)) <= 10.0


def test_partial_sums_mirror_bitwise():
    p = PartialSumSpec(200)
    for theta, t in ((0.9, 1234.5), (2.2, 77.0)):
        s = complex(0.5, t)
        P = partial_sums(theta, s, p, "P")
        Q = partial_sums(theta, s, p, "Q")
        assert Q == P.conjugate()
        S = partial_sums(0.37, s, p, "S_hurwitz")
        D = partial_sums(0.37, s, p, "dual")
        assert D == S.conjugate()


def test_partial_sums_empty_and_domain():
    assert partial_sums(1.0, complex(0.5, 10.0), PartialSumSpec(1), "P") == 0.0
    with pytest.raises(DomainError):
        partial_sums(-0.2, complex(0.5, 10.0), PartialSumSpec(5), "S_hurwitz")
    with pytest.raises(DomainError):
        partial_sums(1.0, complex(0.5, 10.0), PartialSumSpec(5), "R")


@settings(max_examples=25, deadline=None)
@given(
    alpha=st.floats(min_value=0.05, max_value=1.0),
    t=st.floats(min_value=0.0, max_value=1e4),
    M=st.integers(min_value=2, max_value=4096),
)
def test_partial_sums_trivial_bound(alpha, t, M):
    val = partial_sums(alpha, complex(0.5, t), PartialSumSpec(M), "S_hurwitz")
    assert abs(val) <= alpha ** -0.5 + 2.0 * math.sqrt(M + 1.0)


# ----------------------------------------------------------------- levels


def test_suggested_level_clamps():
    assert suggested_level(50.0) == 8
    assert suggested_level(1e6) == DEFAULT_SPEC.level
    ts = np.geomspace(50.0, 1e6, 40)
    levels = [suggested_level(t) for t in ts]
    assert all(a <= b for a, b in zip(levels, levels[1:]))
    with pytest.raises(DomainError):
        suggested_level(0.0)


def test_atom_level_for_decreases_in_m():
    a_min = 1.0 / (4.0 * math.pi)
    levels = [atom_level_for(1e4, m, a_min, DEFAULT_SPEC, 12)
              for m in range(0, 40)]
    assert all(a >= b for a, b in zip(levels, levels[1:]))
    assert max(levels) <= 12
    assert min(levels) >= 2
    # far terms barely rotate the phase across a cell
    assert atom_level_for(60.0, 500, a_min, DEFAULT_SPEC, 12) == 2


# ------------------------------------------------------------------- L(s)


def test_l_eval_accepts_plain_complex():
    spec = DEFAULT_SPEC
    a = l_eval(complex(2.0, 1.0), "measure_average", spec)
    b = l_eval(ComplexPoint(2.0, 1.0), "measure_average", spec)
    assert a == b


def test_l_eval_direct_matches_measure_average():
    got = l_eval(ComplexPoint(2.0, 0.0), "direct", rtol=1e-6)
    ref = l_eval(ComplexPoint(2.0, 0.0), "measure_average")
    assert abs(got - ref) <= 2e-6 * abs(ref)
    got5 = l_eval(ComplexPoint(2.0, 5.0), "direct", rtol=1e-6)
    ref5 = l_eval(ComplexPoint(2.0, 5.0), "measure_average")
    assert abs(got5 - ref5) <= 2e-6 * abs(ref5)


def test_measure_average_branches_agree():
    # sigma > 1.25 runs the shared-frequency direct path; rebuilding the
    # functional-equation path by hand at the same point must agree
    spec = DEFAULT_SPEC
    s = complex(2.0, 0.5)
    tilde = build_atoms(spec, "nu_tilde")
    prime = build_atoms(spec, "nu_tilde_prime")
    chip, chim = chi_phases(s)
    fe = (chip * np.dot(tilde.weights, hurwitz_zeta(1.0 - s, tilde.points))
          + chim * np.dot(prime.weights, hurwitz_zeta(1.0 - s, prime.points)))
    got = l_eval(s, "measure_average", spec)
    assert abs(got - fe) <= 1e-9 * abs(got)


def test_l_eval_afe_tracks_measure_average():
    # sharp-cutoff AFE: the boundary terms cost O(t^{-1/4}), so only a
    # few-percent agreement is on offer here
    for t in (1000.0, 10000.0):
        s = ComplexPoint(0.5, t)
        afe = l_eval(s, "afe")
        ref = l_eval(s, "measure_average")
        assert abs(afe - ref) <= 8e-2 * abs(ref)


def test_afe_eval_lengths_override():
    t = 2000.0
    B = int(math.sqrt(t / TAU))
    assert afe_eval(complex(0.5, t)) == afe_eval(complex(0.5, t),
                                                 lengths=(B, B))


def test_l_eval_domain_gates():
    with pytest.raises(DomainError):
        l_eval(ComplexPoint(1.0, 0.0), "direct")
    with pytest.raises(DomainError):
        l_eval(ComplexPoint(0.6, 100.0), "afe")
    with pytest.raises(DomainError):
        l_eval(ComplexPoint(0.5, 10.0), "afe")
    with pytest.raises(DomainError):
        l_eval(ComplexPoint(2.0, 0.0), "newton")
    with pytest.raises(BudgetError):
        l_eval(ComplexPoint(1.3, 0.0), "direct", rtol=1e-9)


def test_jensen_ratio_band():
    # the pointwise bound |L|^2 <= 8 (I+ + I-) overshoots |L| by a factor
    # in the high single digits to mid teens at these heights
    for t in (300.0, 1000.0):
        r = jensen_ratio(t)
        assert 5.0 <= r <= 25.0
    with pytest.raises(DomainError):
        jensen_ratio(10.0)
