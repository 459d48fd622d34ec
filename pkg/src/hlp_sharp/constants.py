"""Closed-form sharp constants A_m and B_m, the Beta recursion for I_m,
and the classical one-dimensional anchors.

Sign convention (recorded in every SharpConstant.convention_note): the
denominator of A_m uses the positive quantities (-sigma) and (Q + sigma_i),
and B_m uses Gamma(1 + sigma_i/Q) and Gamma(-sigma/Q), whose arguments are
positive exactly on the admissible region.  Equivalent-looking bracket forms
with the opposite signs are identically inadmissible; the quadrature oracles
certify the convention implemented here.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .hgroup import GroupParams
from .params import ExponentSet, ParamSet, admissibility_violations, derive_exponents
from .quad import QuadratureSpec, hilbert_constant_oracle, hlp_constant_oracle
from .report import VerificationReport, compare
from .specfun import log_gamma

__all__ = [
    "SharpConstant",
    "hlp_closed_form",
    "hilbert_closed_form",
    "beta_recursion_Im",
    "classical_anchors",
    "reconcile",
]

_HLP_NOTE = (
    "A_m = m*Q*omega_Q^m / ((-sigma) * prod(Q + sigma_i)); "
    "convention: (-sigma) > 0 and (Q + sigma_i) > 0 on the admissible region"
)
_HILBERT_NOTE = (
    "B_m = Omega_Q^m * prod Gamma(1 + sigma_i/Q) * Gamma(-sigma/Q) / Gamma(m); "
    "convention: Gamma arguments 1 + sigma_i/Q and -sigma/Q are positive on "
    "the admissible region"
)


@dataclass(frozen=True)
class SharpConstant:
    """A sharp operator-norm constant carrying its sign-convention note."""

    kind: str  # "hlp" | "hilbert"
    value: float
    convention_note: str = ""

    def __post_init__(self) -> None:
        if self.kind not in ("hlp", "hilbert"):
            raise ValueError(f"unknown constant kind {self.kind!r}")
        if not (math.isfinite(self.value) and self.value > 0.0):
            raise ValueError("sharp constant must be positive and finite")


def _require_admissible(e: ExponentSet, Q: float) -> None:
    violations = admissibility_violations(e, Q)
    if violations:
        raise ValueError("inadmissible exponents: " + "; ".join(violations))


def hlp_closed_form(e: ExponentSet, gp: GroupParams) -> SharpConstant:
    """A_m = m*Q*omega_Q^m / ((-sigma) * prod(Q + sigma_i))."""
    _require_admissible(e, gp.Q)
    m = e.m
    # Sorting the factors makes the product bitwise permutation-invariant.
    denom = -e.sigma
    for s_i in sorted(e.sigma_list):
        denom *= gp.Q + s_i
    value = m * gp.Q * gp.omega_Q**m / denom
    return SharpConstant(kind="hlp", value=value, convention_note=_HLP_NOTE)


def hilbert_closed_form(e: ExponentSet, gp: GroupParams) -> SharpConstant:
    """B_m = Omega_Q^m * prod Gamma(1 + sigma_i/Q) * Gamma(-sigma/Q) / Gamma(m).

    Evaluated in log-Gamma space so intermediate Gamma values cannot
    overflow; m >= 170 is rejected outright (Gamma(m) overflow).
    """
    _require_admissible(e, gp.Q)
    m = e.m
    if m >= 170:
        raise ValueError("hilbert_closed_form supports m < 170 (Gamma overflow)")
    log_value = m * math.log(gp.Omega_Q)
    for s_i in sorted(e.sigma_list):
        log_value += log_gamma(1.0 + s_i / gp.Q)
    log_value += log_gamma(-e.sigma / gp.Q)
    log_value -= log_gamma(float(m))
    return SharpConstant(
        kind="hilbert", value=math.exp(log_value), convention_note=_HILBERT_NOTE
    )


def beta_recursion_Im(exponents: Sequence[float], outer_power: float) -> float:
    """Evaluate I_m by peeling one Beta factor per step.

    I_m(a_1..a_m; s) = B(a_m, s - a_m) * I_{m-1}(a_1..a_{m-1}; s - a_m) with
    I_0 = 1, equal to prod Gamma(a_i) * Gamma(s - sum a_i) / Gamma(s).
    Computed in log space; every peeled Beta must have positive arguments.
    """
    a_list = [float(a) for a in exponents]
    s = float(outer_power)
    log_value = 0.0
    for a in reversed(a_list):
        if a <= 0.0 or s - a <= 0.0:
            raise ValueError(
                f"nonpositive Beta argument in recursion: B({a}, {s - a})"
            )
        log_value += log_gamma(a) + log_gamma(s - a) - log_gamma(s)
        s -= a
    return math.exp(log_value)


def classical_anchors(q: float) -> Tuple[float, float]:
    """One-dimensional anchor values (q^2/(q-1), pi/sin(pi/q)) for q > 1."""
    q = float(q)
    if not q > 1.0:
        raise ValueError("classical anchors require q > 1")
    return q * q / (q - 1.0), math.pi / math.sin(math.pi / q)


def reconcile(
    p: ParamSet,
    kind: str,
    gp: Optional[GroupParams] = None,
    spec: Optional[QuadratureSpec] = None,
    tolerance: float = 1e-6,
) -> VerificationReport:
    """Compare the closed-form constant against its quadrature oracle."""
    if gp is None:
        gp = GroupParams(n=p.n)
    if spec is None:
        spec = QuadratureSpec()
    e = derive_exponents(p)
    start = time.perf_counter()
    if kind == "hlp":
        const = hlp_closed_form(e, gp)
        oracle = hlp_constant_oracle(e, gp, spec)
    elif kind == "hilbert":
        const = hilbert_closed_form(e, gp)
        oracle = hilbert_constant_oracle(e, gp, spec)
    else:
        raise ValueError(f"unknown constant kind {kind!r}")
    runtime_ms = int(round(1000.0 * (time.perf_counter() - start)))
    label = f"{kind}-constant m={e.m} n={gp.n}"
    return compare(
        label,
        const.value,
        oracle,
        tolerance,
        convention_note=const.convention_note,
        runtime_ms=runtime_ms,
    )
