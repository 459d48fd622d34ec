import math

import numpy as np
import pytest

import hlp_sharp.quad as quad
from hlp_sharp.hgroup import GroupParams, HPoint, hnorm_arrays, identity
from hlp_sharp.operators import RadialProfile
from hlp_sharp.params import ExponentSet, ParamSet, derive_exponents
from hlp_sharp.quad import (
    DivergenceError,
    MCSpec,
    QuadratureSpec,
    SamplingError,
    derive_seed,
    hilbert_constant_oracle,
    hlp_constant_oracle,
    integrate_curve,
    mc_ball_integral,
    radial_integral,
    thread_count,
)
from hlp_sharp.specfun import beta as beta_fn

# Frozen reference values for the bilinear example (m=2, n=1, q=2, q_j=4,
# lambda=-1/4, lambda_j=-1/8, gamma_j=0, alpha=0), obtained from an
# independent high-sample Monte Carlo pilot and a 50-digit quadrature check.
FROZEN_A2 = 254.4564010684145
FROZEN_B2 = 104.83263451184757


def bilinear_exponents():
    p = ParamSet(
        m=2,
        n=1,
        q=2.0,
        q_list=(4.0, 4.0),
        lam=-0.25,
        lam_list=(-0.125, -0.125),
        gamma_list=(0.0, 0.0),
        alpha=0.0,
    )
    return derive_exponents(p)


# ---------------------------------------------------------------------------
# Spec validation
# ---------------------------------------------------------------------------


def test_quadrature_spec_rejects_bad_settings():
    with pytest.raises(ValueError):
        QuadratureSpec(scheme="simpson")
    with pytest.raises(ValueError):
        QuadratureSpec(infinity_transform="mobius")
    with pytest.raises(ValueError):
        QuadratureSpec(panels=0)
    with pytest.raises(ValueError):
        QuadratureSpec(rel_target=0.5)


def test_mc_spec_rejects_bad_settings():
    with pytest.raises(ValueError):
        MCSpec(samples=999)
    with pytest.raises(ValueError):
        MCSpec(shards=0)


def test_derive_seed_is_deterministic_and_index_sensitive():
    assert derive_seed(7, 1, 2) == derive_seed(7, 1, 2)
    assert derive_seed(7, 1, 2) != derive_seed(7, 2, 1)
    assert derive_seed(7, 1) != derive_seed(8, 1)
    assert 0 <= derive_seed(0) < 2**63


def test_thread_count_honors_env(monkeypatch):
    monkeypatch.setenv("HLP_SHARP_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("HLP_SHARP_THREADS", "not-a-number")
    assert thread_count() >= 1
    monkeypatch.delenv("HLP_SHARP_THREADS")
    assert 1 <= thread_count() <= 4


# ---------------------------------------------------------------------------
# 1-D engine
# ---------------------------------------------------------------------------


def test_integrate_curve_beta_integral(quad_spec):
    # int_0^inf t^(a-1) (1+t)^(-(a+b)) dt = B(a, b): singular origin plus a
    # power tail through the rational fold.
    for a, b in ((0.3, 1.2), (0.9, 0.4), (1.7, 2.5)):
        got = integrate_curve(
            lambda t, a=a, b=b: t ** (a - 1.0) * (1.0 + t) ** (-(a + b)),
            quad_spec,
            breakpoints=(1.0,),
        )
        assert got == pytest.approx(beta_fn(a, b), rel=1e-9)


def test_integrate_curve_double_exponential_scheme():
    # mild endpoint singularity: the tanh-sinh edge-mass guard certifies it
    spec = QuadratureSpec(scheme="double_exponential")
    got = integrate_curve(
        lambda t: t ** (0.7 - 1.0) * (1.0 + t) ** (-1.9),
        spec,
        breakpoints=(1.0,),
    )
    assert got == pytest.approx(beta_fn(0.7, 1.2), rel=1e-9)


def test_integrate_curve_exponential_tail_both_transforms(quad_spec):
    # int_0^inf r^3 e^(-r) dr = Gamma(4) = 6
    def g(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(over="ignore", under="ignore"):
            e = np.exp(-r)
        return np.where(e == 0.0, 0.0, r**3 * e)

    assert integrate_curve(g, quad_spec, breakpoints=(1.0, 8.0)) == pytest.approx(
        6.0, rel=1e-9
    )
    spec = QuadratureSpec(infinity_transform="exp_map")
    assert integrate_curve(g, spec, breakpoints=(1.0, 8.0)) == pytest.approx(
        6.0, rel=1e-9
    )


def test_integrate_curve_respects_bounds_and_breakpoints(quad_spec):
    assert integrate_curve(lambda r: r, quad_spec, lower=2.0, upper=1.0) == 0.0
    got = integrate_curve(
        lambda r: np.where(np.asarray(r) < 1.0, 1.0, 0.0),
        quad_spec,
        breakpoints=(1.0,),
        upper=3.0,
    )
    assert got == pytest.approx(1.0, rel=1e-10)


def test_integrate_curve_flags_origin_divergence(quad_spec):
    with pytest.raises(DivergenceError) as exc:
        integrate_curve(lambda r: 1.0 / np.asarray(r), quad_spec, upper=1.0)
    assert "origin" in exc.value.conditions


def test_integrate_curve_flags_tail_divergence(quad_spec):
    with pytest.raises(DivergenceError) as exc:
        integrate_curve(lambda r: 1.0 / (1.0 + np.asarray(r)), quad_spec)
    assert "tail" in exc.value.conditions


def test_radial_integral_callable(gp1, quad_spec):
    # omega_Q int_0^inf e^(-r^4) r^3 dr = omega_Q / 4 (= pi^2/2 on H^1)
    def f(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(over="ignore", under="ignore"):
            e = np.exp(-(r**4))
        return np.where(r > 50.0, 0.0, e)

    assert radial_integral(f, gp1, quad_spec) == pytest.approx(
        gp1.omega_Q / 4.0, rel=1e-8
    )


def test_radial_integral_profile(gp1, quad_spec):
    f = RadialProfile.truncated_power(-1.0, 0.5, 2.0)
    exact = gp1.omega_Q * (2.0**3 - 0.5**3) / 3.0
    assert radial_integral(f, gp1, quad_spec) == pytest.approx(exact, rel=1e-10)
    zero = RadialProfile.power(-1.0).scaled(0.0)
    assert radial_integral(zero, gp1, quad_spec) == 0.0


# ---------------------------------------------------------------------------
# Constant oracles
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("q", [1.5, 2.0, 3.0, 5.0])
def test_oracles_match_classical_anchors_m1(q, gp1, quad_spec):
    Q = gp1.Q
    e = ExponentSet(sigma_list=(-Q / q,), sigma=-Q / q)
    a_ref = gp1.Omega_Q * q * q / (q - 1.0)
    b_ref = gp1.Omega_Q * math.pi / math.sin(math.pi / q)
    assert hlp_constant_oracle(e, gp1, quad_spec) == pytest.approx(a_ref, rel=1e-8)
    assert hilbert_constant_oracle(e, gp1, quad_spec) == pytest.approx(b_ref, rel=1e-8)


def test_oracles_match_frozen_bilinear_values(gp1, quad_spec):
    e = bilinear_exponents()
    assert hlp_constant_oracle(e, gp1, quad_spec) == pytest.approx(
        FROZEN_A2, rel=1e-8
    )
    assert hilbert_constant_oracle(e, gp1, quad_spec) == pytest.approx(
        FROZEN_B2, rel=1e-8
    )


def test_oracles_reject_inadmissible_exponents(gp1, quad_spec):
    bad_sigma = ExponentSet(sigma_list=(-0.5,), sigma=0.5)
    for oracle in (hlp_constant_oracle, hilbert_constant_oracle):
        with pytest.raises(DivergenceError) as exc:
            oracle(bad_sigma, gp1, quad_spec)
        assert any(c.startswith("sigma<0 violated") for c in exc.value.conditions)

    bad_sigma_j = ExponentSet(sigma_list=(-0.5, -4.0), sigma=-1.0)
    for oracle in (hlp_constant_oracle, hilbert_constant_oracle):
        with pytest.raises(DivergenceError) as exc:
            oracle(bad_sigma_j, gp1, quad_spec)
        assert any(c.startswith("Q+sigma_j>0 violated") for c in exc.value.conditions)


def test_hilbert_oracle_flags_divergent_beta_factor(gp1, quad_spec):
    # Individually admissible sigma_j may still break the nested reduction
    # when their sum is nonnegative.
    e = ExponentSet(sigma_list=(1.0, 1.0), sigma=-1.0)
    with pytest.raises(DivergenceError) as exc:
        hilbert_constant_oracle(e, gp1, quad_spec)
    assert "beta factor" in exc.value.conditions


def test_oracles_reject_large_m(gp1, quad_spec):
    e = ExponentSet(sigma_list=(-0.5,) * 5, sigma=-2.5)
    with pytest.raises(ValueError):
        hlp_constant_oracle(e, gp1, quad_spec)
    with pytest.raises(ValueError):
        hilbert_constant_oracle(e, gp1, quad_spec)


# ---------------------------------------------------------------------------
# Monte Carlo ball integrals
# ---------------------------------------------------------------------------


def ones(pts):
    return np.ones(len(pts))


def test_mc_ball_volume_within_three_sigma(gp1, mc_small):
    center = HPoint((0.3, -0.2, 0.4))
    est, se = mc_ball_integral(ones, center, 1.0, gp1, mc_small)
    assert se > 0.0
    assert abs(est - gp1.Omega_Q) <= 3.0 * se


def test_mc_ball_scale_covariance_is_exact(gp1, mc_small):
    center = HPoint((0.3, -0.2, 0.4))
    est1, se1 = mc_ball_integral(ones, center, 1.0, gp1, mc_small)
    est2, se2 = mc_ball_integral(ones, center, 2.0, gp1, mc_small)
    # Same seed, same accepted candidates; the box volume scales by 2^Q = 16,
    # an exact power of two, so the estimates match bit for bit.
    assert est2 == 16.0 * est1
    assert se2 == 16.0 * se1


def test_mc_ball_importance_matches_origin_singularity(gp1, mc_small):
    # f = |x|^(-2) on B(0, 1): omega_Q int_0^1 r^(3-2) dr = omega_Q/2.
    def f(pts):
        return hnorm_arrays(pts, gp1.n) ** -2.0

    exact = gp1.omega_Q / 2.0
    est, se = mc_ball_integral(
        f, identity(gp1.n), 1.0, gp1, mc_small, origin_exponent=-2.0
    )
    # The tilted radial law matches the integrand exactly, so the only error
    # is roundoff; keep the statistical slack anyway.
    assert abs(est - exact) <= 3.0 * se + 1e-12 * exact


def test_mc_ball_window_containment_is_exact(gp1, mc_small):
    est, se = mc_ball_integral(
        ones, identity(gp1.n), 1.0, gp1, mc_small, radial_window=(0.0, 0.5)
    )
    exact = gp1.Omega_Q * 0.5**gp1.Q
    assert abs(est - exact) <= 3.0 * se + 1e-12 * exact
    assert se <= 1e-12 * exact


def test_mc_ball_window_empty_intersection_is_exact_zero(gp1, mc_small):
    est, se = mc_ball_integral(
        ones, identity(gp1.n), 1.0, gp1, mc_small, radial_window=(2.0, 3.0)
    )
    assert (est, se) == (0.0, 0.0)


def test_mc_ball_window_partial_overlap_is_honest(gp1, mc_small):
    center = HPoint((0.6, 0.0, 0.0))
    est, se = mc_ball_integral(
        ones, center, 0.5, gp1, mc_small, radial_window=(0.0, 10.0)
    )
    exact = gp1.Omega_Q * 0.5**gp1.Q
    assert se > 0.0
    assert abs(est - exact) <= 3.0 * se


def test_mc_ball_determinism_and_thread_invariance(gp1, mc_small, monkeypatch):
    center = HPoint((0.2, 0.1, -0.3))

    def f(pts):
        return 1.0 + hnorm_arrays(pts, gp1.n)

    first = mc_ball_integral(f, center, 1.5, gp1, mc_small)
    second = mc_ball_integral(f, center, 1.5, gp1, mc_small)
    assert first == second

    monkeypatch.setenv("HLP_SHARP_THREADS", "1")
    serial = mc_ball_integral(f, center, 1.5, gp1, mc_small)
    monkeypatch.setenv("HLP_SHARP_THREADS", "4")
    threaded = mc_ball_integral(f, center, 1.5, gp1, mc_small)
    assert serial == threaded == first


def test_mc_ball_rejects_bad_arguments(gp1, mc_small):
    with pytest.raises(ValueError):
        mc_ball_integral(ones, identity(1), 0.0, gp1, mc_small)
    with pytest.raises(ValueError):
        mc_ball_integral(ones, identity(2), 1.0, gp1, mc_small)
    with pytest.raises(ValueError):
        mc_ball_integral(
            ones, identity(1), 1.0, gp1, mc_small, origin_exponent=-gp1.Q
        )


def test_mc_ball_sampling_error_on_vanishing_acceptance(gp1, monkeypatch):
    monkeypatch.setattr(quad, "_ACCEPT_FLOOR", 0.99)
    mc = MCSpec(samples=100_000, seed=3, shards=8)
    with pytest.raises(SamplingError):
        mc_ball_integral(ones, HPoint((0.1, 0.0, 0.0)), 1.0, gp1, mc)


def test_mc_ball_pointwise_fallback(gp1):
    # A scalar-only integrand exercises the HPoint fallback in _eval_batch.
    def f(x):
        return 1.0 if x.coords[0] > 0 else 1.0

    mc = MCSpec(samples=1000, seed=5, shards=2)
    est, se = mc_ball_integral(f, HPoint((0.3, 0.0, 0.2)), 1.0, gp1, mc)
    assert abs(est - gp1.Omega_Q) <= 4.0 * se
