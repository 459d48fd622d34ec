"""Integration engine.

Three layers:

* a 1-D engine for integrals over (0, inf) of radial curves with possible
  power singularities at the origin and power/exponential tails: composite
  Gauss-Legendre on panels geometrically refined toward the singular
  endpoint, with geometric-series extrapolation of the leftover mass, or a
  tanh-sinh (double-exponential) rule per piece; infinite tails are folded
  to (0, 1/2] by the rational map r = c(1-s)/s (or an exponential map as a
  fallback for rapidly decaying tails);
* quadrature oracles for the two sharp constants, built on the region
  decomposition of the max kernel and the iterated Beta-type reduction of
  the additive kernel — independent of the closed forms they certify;
* Monte Carlo integration over gauge balls with stratified radial sampling
  and importance sampling for origin singularities.

Runs are reproducible: all randomness is derived from (seed, purpose,
shard, stratum) via SeedSequence feeding a counter-based Philox generator,
and reductions happen in fixed shard order regardless of threading.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .hgroup import GroupParams, HPoint, dilate_arrays, hnorm_arrays, mul_arrays
from .params import ExponentSet, admissibility_violations


class DivergenceError(ArithmeticError):
    """The requested integral does not converge (or cannot be certified)."""

    def __init__(self, message: str, conditions: tuple = ()):
        super().__init__(message)
        self.conditions = tuple(conditions)


class SamplingError(RuntimeError):
    """Monte Carlo sampling failed (e.g. vanishing acceptance ratio)."""


_SCHEMES = ("gauss_legendre_composite", "double_exponential")
_TRANSFORMS = ("rational_map", "exp_map")


@dataclass(frozen=True)
class QuadratureSpec:
    """Settings for the deterministic integration engine."""

    scheme: str = "gauss_legendre_composite"
    panels: int = 96
    nodes_per_panel: int = 12
    infinity_transform: str = "rational_map"
    rel_target: float = 1e-10

    def __post_init__(self):
        if self.scheme not in _SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {_SCHEMES}")
        if self.infinity_transform not in _TRANSFORMS:
            raise ValueError(
                f"unknown infinity_transform {self.infinity_transform!r}; "
                f"expected one of {_TRANSFORMS}"
            )
        if self.panels < 1 or self.nodes_per_panel < 1:
            raise ValueError("panels and nodes_per_panel must be positive")
        if not (0.0 < self.rel_target <= 1e-2):
            raise ValueError("rel_target must lie in (0, 1e-2]")


@dataclass(frozen=True)
class MCSpec:
    """Settings for Monte Carlo ball integration."""

    samples: int = 100_000
    seed: int = 0
    shards: int = 8

    def __post_init__(self):
        if self.samples < 1000:
            raise ValueError("MCSpec.samples must be >= 1000")
        if self.shards < 1:
            raise ValueError("MCSpec.shards must be >= 1")


def thread_count() -> int:
    """Worker cap: HLP_SHARP_THREADS if set, else min(4, cpu count)."""
    env = os.environ.get("HLP_SHARP_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(4, os.cpu_count() or 1))


def derive_seed(seed: int, *indices: int) -> int:
    """Stable 63-bit stream seed derived from a base seed and index tuple."""
    ss = np.random.SeedSequence((int(seed),) + tuple(int(i) for i in indices))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


# ---------------------------------------------------------------------------
# 1-D engine
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _leggauss(k: int):
    x, w = np.polynomial.legendre.leggauss(k)
    return x, w


def _panel_sums(g, edges: np.ndarray, nodes: int) -> np.ndarray:
    """Gauss-Legendre sums of g over consecutive panels [edges_i, edges_{i+1}]."""
    x, w = _leggauss(nodes)
    a = edges[:-1]
    h = 0.5 * (edges[1:] - a)
    mid = a + h
    pts = mid[:, None] + h[:, None] * x[None, :]
    with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
        vals = np.asarray(g(pts.ravel()), dtype=float).reshape(pts.shape)
    return h * (vals @ w)


def _int_smooth(g, a: float, b: float, spec: QuadratureSpec) -> float:
    """Piece without endpoint singularities; panels log-spaced when a > 0."""
    if b <= a:
        return 0.0
    if a > 0.0 and b / a > 4.0:
        decades = math.log10(b / a)
        count = max(4, min(spec.panels, int(math.ceil(6.0 * decades)) + 4))
        edges = a * (b / a) ** (np.arange(count + 1) / count)
    else:
        count = max(4, min(spec.panels, 16))
        edges = np.linspace(a, b, count + 1)
    return float(np.sum(_panel_sums(g, edges, spec.nodes_per_panel)))


def _int_singular0(g, b: float, spec: QuadratureSpec, where: str) -> float:
    """Integral over (0, b] with a possible power singularity at 0.

    Panels are geometric toward 0; the mass below the innermost breakpoint is
    estimated by geometric-series extrapolation of the trailing panel sums,
    which is exact for pure power integrands.  Panel sums that fail to decay
    signal a non-integrable endpoint.
    """
    if b <= 0.0:
        return 0.0
    K = max(8, spec.panels)
    # half-octave refinement toward 0: resolves sharp decay near b while the
    # geometric-series extrapolation still handles the sub-panel mass exactly
    # for power behavior
    edges = b * np.exp2(-0.5 * np.arange(K + 1, dtype=float))[::-1]  # ascending
    sums = _panel_sums(g, edges, spec.nodes_per_panel)[::-1]  # [0]=outermost
    total = float(np.sum(sums))
    tail = sums[-1]
    scale = max(abs(total), float(np.max(np.abs(sums))), 1e-300)
    if abs(tail) <= 1e-16 * scale:
        return total
    # decay ratio from the last few panels (geometric for power behavior)
    j = 3 if abs(sums[-4]) > 0 and sums[-4] * tail > 0 else 1
    prev = sums[-1 - j]
    if prev == 0.0:
        return total
    q = tail / prev
    if q <= 0.0:
        return total  # oscillating remainder, bounded by |tail|
    rho = q ** (1.0 / j)
    if rho >= 0.9999:
        raise DivergenceError(
            f"non-convergent integral near {where}: panel sums stop decaying "
            f"(ratio {rho:.6f})",
            conditions=(where,),
        )
    return total + float(tail) * rho / (1.0 - rho)


# -- tanh-sinh rule ---------------------------------------------------------

@lru_cache(maxsize=32)
def _ts_nodes(level: int):
    """tanh-sinh nodes/weights on (0,1) at step h = 0.5/2^level.

    Returns only the nodes new at this level (odd multiples of h for
    level > 0), as (x, 1-x, weight) arrays.  The window |t| <= 4.6 keeps the
    innermost nodes near 1e-68 from either endpoint, so power singularities
    with exponent above ~1/4 integrate to full precision while integrand
    composition stays inside double range; slower endpoint behavior is
    rejected by the edge-mass check in the caller.
    """
    h = 0.5 / (1 << level)
    tmax = 4.6
    kmax = int(math.floor(tmax / h))
    if level == 0:
        ks = np.arange(-kmax, kmax + 1)
    else:
        ks = np.arange(-kmax, kmax + 1)
        ks = ks[ks % 2 != 0]
    t = ks * h
    z = math.pi * np.sinh(t)
    # sigmoid and its complement, stably
    x = np.where(z >= 0, 1.0 / (1.0 + np.exp(-z)), np.exp(z) / (1.0 + np.exp(z)))
    xm = np.where(z >= 0, np.exp(-z) / (1.0 + np.exp(-z)), 1.0 / (1.0 + np.exp(z)))
    w = h * math.pi * np.cosh(t) * x * xm
    keep = (w > 0) & (x > 0) & (xm > 0)
    return x[keep], xm[keep], w[keep]


def _int_piece_de(g, a: float, b: float, spec: QuadratureSpec, where: str) -> float:
    """tanh-sinh integration of g over (a, b); endpoint singularities allowed."""
    if b <= a:
        return 0.0
    span = b - a
    total = 0.0
    prev = math.inf
    edge_mass = 0.0
    for level in range(10):
        x, xm, w = _ts_nodes(level)
        if a == 0.0:
            r = b * x  # exact distance to the singular endpoint
        else:
            r = a + span * x
        with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
            vals = np.asarray(g(r), dtype=float)
        terms = w * vals
        contrib = span * float(np.sum(terms))
        if level == 0:
            # mass carried by the outermost nodes; if it is not negligible the
            # truncated tanh-sinh window cannot certify the endpoint behavior
            edge_mass = span * float(np.sum(np.abs(terms[:3])) + np.sum(np.abs(terms[-3:])))
        total = total / 2.0 + contrib if level > 0 else contrib
        if not math.isfinite(total):
            raise DivergenceError(
                f"non-convergent integral near {where}: tanh-sinh sum overflowed",
                conditions=(where,),
            )
        if level >= 2 and abs(total - prev) <= spec.rel_target * max(abs(total), 1e-300):
            break
        prev = total
    else:
        if abs(total - prev) > 1e-6 * max(abs(total), 1e-300):
            raise DivergenceError(
                f"non-convergent integral near {where}: tanh-sinh refinement stalled",
                conditions=(where,),
            )
    if edge_mass > max(spec.rel_target, 1e-12) * max(abs(total), 1e-300):
        raise DivergenceError(
            f"non-convergent integral near {where}: endpoint decay too slow for "
            f"the tanh-sinh window (edge mass {edge_mass:.2e})",
            conditions=(where,),
        )
    return total


def _int_piece(g, a: float, b: float, spec: QuadratureSpec, where: str) -> float:
    if spec.scheme == "double_exponential":
        return _int_piece_de(g, a, b, spec, where)
    if a == 0.0:
        return _int_singular0(g, b, spec, where)
    return _int_smooth(g, a, b, spec)


def _int_tail(g, c: float, spec: QuadratureSpec) -> float:
    """Integral of g over (c, inf), folded to a finite piece.

    rational_map: r = c(1-s)/s, s in (0, 1/2]  (exact for power tails);
    exp_map:      r = c(1 - ln s), s in (0, 1]  (for exponential tails).
    """
    if spec.infinity_transform == "exp_map":
        def h(s):
            vals = np.asarray(g(c * (1.0 - np.log(s))), dtype=float)
            jac = np.where(vals == 0.0, 0.0, c / s)
            return vals * jac

        return _int_piece(h, 0.0, 1.0, spec, "tail")

    def h(s):
        vals = np.asarray(g(c * (1.0 - s) / s), dtype=float)
        # a decayed integrand kills the (possibly overflowing) Jacobian
        jac = np.where(vals == 0.0, 0.0, c / (s * s))
        return vals * jac

    return _int_piece(h, 0.0, 0.5, spec, "tail")


def integrate_curve(
    g,
    spec: QuadratureSpec,
    breakpoints=(),
    lower: float = 0.0,
    upper: float = math.inf,
) -> float:
    """Integral of a vectorized curve g over (lower, upper).

    Splits at the supplied breakpoints (kernel kinks, support edges, knots),
    treats the origin endpoint as possibly power-singular, and folds an
    infinite upper limit through the configured transform.
    """
    if upper <= lower:
        return 0.0
    pts = sorted({float(t) for t in breakpoints if lower < t < upper})
    finite_top = upper if math.isfinite(upper) else (pts[-1] if pts else max(1.0, 2.0 * lower))
    edges = [lower] + [t for t in pts if t < finite_top] + [finite_top]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += _int_piece(g, a, b, spec, "origin" if a == 0.0 else "interior")
    if not math.isfinite(upper):
        total += _int_tail(g, finite_top, spec)
    return total


# ---------------------------------------------------------------------------
# Radial integrals and constant oracles
# ---------------------------------------------------------------------------

def radial_integral(f, gp: GroupParams, spec: QuadratureSpec) -> float:
    """omega_Q * int_0^inf f(r) r^(Q-1) dr for a radial profile or callable f.

    f may be a RadialProfile (its support and knot structure guide the panel
    split) or any vectorized callable on positive radii.
    """
    Q = gp.Q

    if hasattr(f, "segments"):
        lo, hi = f.support()
        if hi <= lo:
            return 0.0
        breaks = f.breakpoints()

        def g(r):
            return f(r) * r ** (Q - 1)

        return gp.omega_Q * integrate_curve(g, spec, breakpoints=breaks, upper=hi)

    def g(r):
        vals = np.asarray(f(r), dtype=float)
        pw = np.where(vals == 0.0, 0.0, r)  # avoid 0 * inf at huge folded radii
        return vals * pw ** (Q - 1)

    return gp.omega_Q * integrate_curve(g, spec, breakpoints=(1.0,))


def _require_admissible(e: ExponentSet, gp: GroupParams):
    bad = admissibility_violations(e, gp.Q)
    if bad:
        raise DivergenceError(
            "constant integral diverges: " + "; ".join(bad), conditions=tuple(bad)
        )


def hlp_constant_oracle(e: ExponentSet, gp: GroupParams, spec: QuadratureSpec) -> float:
    """Quadrature value of the max-kernel constant integral.

    Decomposes the domain by which variable realizes the max: on E_0 (all
    radii below 1) the kernel is 1 and the integral is a product of power
    integrals in closed form; on E_i the inner variables integrate in closed
    form below the outer radius, leaving one residual 1-D integral over
    (1, inf) evaluated numerically.  The sum never touches the closed-form
    constant it certifies.
    """
    _require_admissible(e, gp)
    if e.m > 4:
        raise ValueError("constant oracle supports m <= 4")
    Q = gp.Q
    sig = e.sigma_list
    m = e.m

    total = 1.0
    for sj in sig:
        total *= 1.0 / (Q + sj)  # E_0: prod int_0^1 r^(Q-1+sigma_j) dr

    for i, si in enumerate(sig):
        others = [sj for k, sj in enumerate(sig) if k != i]

        def g(r, si=si, others=others):
            vals = r ** (Q - 1.0 + si - m * Q)
            for sj in others:
                vals = vals * r ** (Q + sj) / (Q + sj)
            return vals

        total += _int_tail(g, 1.0, spec)

    return gp.omega_Q**m * total


def hilbert_constant_oracle(e: ExponentSet, gp: GroupParams, spec: QuadratureSpec) -> float:
    """Quadrature value of the additive-kernel constant integral.

    After substituting u_j = r_j^Q the integral factors through the nested
    Beta-type reduction: peeling the last variable with outer power s_m = m
    leaves outer power s_{k-1} = s_k - a_k, a_k = 1 + sigma_k/Q.  Each factor
    int_0^inf u^(a-1) (1+u)^(-s) du is evaluated numerically, keeping the
    oracle independent of the Gamma implementation.
    """
    _require_admissible(e, gp)
    if e.m > 4:
        raise ValueError("constant oracle supports m <= 4")
    Q = gp.Q
    a_list = [1.0 + sj / Q for sj in e.sigma_list]

    value = gp.Omega_Q ** e.m
    s = float(e.m)
    for a in reversed(a_list):
        if not (a > 0.0 and s - a > 0.0):
            raise DivergenceError(
                f"beta-type factor diverges: a = {a:.6g}, s - a = {s - a:.6g}",
                conditions=("beta factor",),
            )

        def g(u, a=a, s=s):
            return u ** (a - 1.0) * (1.0 + u) ** (-s)

        value *= integrate_curve(g, spec, breakpoints=(1.0,))
        s -= a
    return value


# ---------------------------------------------------------------------------
# Monte Carlo over gauge balls
# ---------------------------------------------------------------------------

_ACCEPT_FLOOR = 1e-4
_PURPOSE_BALL = 17


def _eval_batch(f, pts: np.ndarray) -> np.ndarray:
    """Evaluate f on an (N, 2n+1) batch; falls back to pointwise HPoint calls."""
    try:
        vals = np.asarray(f(pts), dtype=float)
        if vals.shape == (pts.shape[0],):
            return vals
    except Exception:
        pass
    return np.array([float(f(HPoint(row))) for row in pts], dtype=float)


def _polar_directions(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    """Unit-gauge-norm directions with the polar sphere density.

    Uniform box candidates are rejected to the unit ball and projected to the
    unit sphere along dilations; the projected law is exactly the surface
    measure of the polar decomposition.
    """
    d = 2 * n + 1
    out = np.empty((count, d))
    have = 0
    drawn = 0
    accepted = 0
    while have < count:
        chunk = max(4096, int(1.3 * (count - have) * _box_ball_ratio(n)) + 64)
        u = rng.uniform(-1.0, 1.0, size=(chunk, d))
        norms = hnorm_arrays(u, n)
        good = norms > 0
        good &= norms < 1.0
        drawn += chunk
        accepted += int(np.count_nonzero(good))
        if drawn >= 200_000 and accepted / drawn < _ACCEPT_FLOOR:
            raise SamplingError(
                f"ball rejection acceptance ratio {accepted / drawn:.2e} below {_ACCEPT_FLOOR}"
            )
        sel = u[good]
        take = min(count - have, sel.shape[0])
        if take:
            block = sel[:take]
            out[have : have + take] = dilate_arrays(
                1.0 / hnorm_arrays(block, n), block, n
            )
            have += take
    return out


@lru_cache(maxsize=8)
def _box_ball_ratio(n: int) -> float:
    """Rough acceptance count scaling helper: 2^(2n+1) / Omega_Q."""
    from .hgroup import _unit_ball_volume

    return 2.0 ** (2 * n + 1) / _unit_ball_volume(n)


def _mc_shard_plain(f, center, radius, gp, seed, shard, count):
    """Box-rejection shard: z = delta_R(u) for u uniform in the unit box,
    accepted when |u|_h < 1, translated to center o z.

    The acceptance test never involves the ball-volume constant, so f = 1
    yields a genuinely geometric volume estimate.  Returns (mean, var_of_mean).
    """
    n = gp.n
    d = gp.dim
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence((int(seed), _PURPOSE_BALL, shard, 0)))
    )
    u = rng.uniform(-1.0, 1.0, size=(count, d))
    acc = hnorm_arrays(u, n) < 1.0
    vbox = 2.0 ** (2 * n + 1) * radius**gp.Q
    w = np.zeros(count)
    if np.any(acc):
        z = dilate_arrays(radius, u[acc], n)
        pts = mul_arrays(center, z, n)
        w[acc] = _eval_batch(f, pts) * vbox
    mean = float(w.mean())
    var = float(w.var(ddof=1) / count) if count > 1 else 0.0
    return mean, var, int(np.count_nonzero(acc)), count


def _mc_shard_importance(
    f, true_center, radius, gp, seed, shard, strata, per_block, beta, w_lo, w_hi
):
    """Polar shard with the radial law tilted to r^(Q-1+beta) on the window
    [w_lo, w_hi], stratified over radius shells; membership in
    B(center, radius) is tested via hdist.  Returns (mean of block means,
    variance part)."""
    n = gp.n
    p = gp.Q + beta
    lo_p = 0.0 if w_lo == 0.0 else w_lo**p
    span = w_hi**p - lo_p
    dens_c = p / (gp.omega_Q * span)  # density factor / r^beta
    test_center = float(hnorm_arrays(true_center, n)) > 0.0
    block_means = np.empty(strata)
    block_vars = np.empty(strata)
    for k in range(strata):
        rng = np.random.Generator(
            np.random.Philox(np.random.SeedSequence((int(seed), _PURPOSE_BALL, shard, k)))
        )
        u = (k + rng.random(per_block)) / strata
        r = (lo_p + u * span) ** (1.0 / p)
        xi = _polar_directions(rng, per_block, n)
        pts = dilate_arrays(r, xi, n)
        w = _eval_batch(f, pts) / (dens_c * r**beta)
        if test_center:
            offset = mul_arrays(-true_center, pts, n)
            w = np.where(hnorm_arrays(offset, n) < radius, w, 0.0)
        block_means[k] = w.mean()
        block_vars[k] = w.var(ddof=1) / per_block if per_block > 1 else 0.0
    return float(block_means.mean()), float(block_vars.sum())


def mc_ball_integral(
    f,
    center: HPoint,
    radius: float,
    gp: GroupParams,
    mc: MCSpec,
    origin_exponent: float = 0.0,
    radial_window=None,
):
    """Monte Carlo estimate of int_{B(center, radius)} f dx.

    Returns (estimate, stderr).  The default path draws box candidates,
    rejects to the unit gauge ball (a scale-free test) and maps them into the
    ball by dilation and left translation.  When f carries an |x|^beta
    singularity at an interior origin, pass origin_exponent = beta in (-Q, 0]:
    sampling switches to a polar law with radial density proportional to
    r^(Q-1+beta) on the enclosing origin-centered ball, radius-stratified,
    with ball membership tested via hdist.

    When the gauge-radial support of f is known, pass it as
    radial_window = (s_lo, s_hi): the polar law is then restricted to the
    window intersected with the radial shell [|c| - R, |c| + R] swept by the
    ball (the gauge norm satisfies the triangle inequality), which removes
    the volume-dilution variance when the support is much smaller than the
    ball.  An empty intersection returns (0.0, 0.0) exactly.
    """
    radius = float(radius)
    if not radius > 0.0:
        raise ValueError("radius must be positive")
    if center.coords.size != gp.dim:
        raise ValueError("center dimension does not match GroupParams")
    beta = float(origin_exponent)
    if beta > 0.0:
        beta = 0.0
    if beta <= -gp.Q:
        raise ValueError("origin_exponent must exceed -Q")

    c_norm = float(hnorm_arrays(center.coords, gp.n))
    shards = mc.shards
    workers = thread_count()

    use_polar = radial_window is not None or (beta < 0.0 and c_norm < radius)
    if use_polar:
        if radial_window is None:
            w_lo, w_hi = 0.0, c_norm + radius
        else:
            w_lo = max(float(radial_window[0]), c_norm - radius, 0.0)
            w_hi = min(float(radial_window[1]), c_norm + radius)
            if not w_hi > w_lo:
                return 0.0, 0.0
        strata = max(1, min(16, mc.samples // (shards * 8)))
        per_block = max(2, mc.samples // (shards * strata))
        args = [
            (f, center.coords, radius, gp, mc.seed, s, strata, per_block, beta, w_lo, w_hi)
            for s in range(shards)
        ]
        if workers > 1 and shards > 1:
            with ThreadPoolExecutor(max_workers=min(workers, shards)) as ex:
                results = list(ex.map(lambda a: _mc_shard_importance(*a), args))
        else:
            results = [_mc_shard_importance(*a) for a in args]
        means = np.array([r[0] for r in results])
        var_parts = np.array([r[1] for r in results])
        estimate = float(means.mean())
        stderr = float(math.sqrt(var_parts.sum()) / (shards * strata))
        return estimate, stderr

    per_shard = max(2, mc.samples // shards)
    args = [(f, center.coords, radius, gp, mc.seed, s, per_shard) for s in range(shards)]
    if workers > 1 and shards > 1:
        with ThreadPoolExecutor(max_workers=min(workers, shards)) as ex:
            results = list(ex.map(lambda a: _mc_shard_plain(*a), args))
    else:
        results = [_mc_shard_plain(*a) for a in args]
    accepted = sum(r[2] for r in results)
    drawn = sum(r[3] for r in results)
    if drawn >= 100_000 and accepted / drawn < _ACCEPT_FLOOR:
        raise SamplingError(
            f"ball rejection acceptance ratio {accepted / drawn:.2e} below {_ACCEPT_FLOOR}"
        )
    means = np.array([r[0] for r in results])
    var_parts = np.array([r[1] for r in results])
    estimate = float(means.mean())
    stderr = float(math.sqrt(var_parts.sum()) / shards)
    return estimate, stderr
