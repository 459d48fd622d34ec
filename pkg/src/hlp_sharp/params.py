"""Parameter bookkeeping and exponent algebra.

A ParamSet carries every exponent of the m-linear setting: the target pair
(q, lambda), the factor exponents (q_j, lambda_j, gamma_j) and the weight
exponent alpha.  From these the scaling exponents

    sigma_j = Q*lambda_j - gamma_j/q + alpha*(lambda_j + 1/q_j)
    sigma   = Q*lambda   - gamma/q   + alpha*(lambda   + 1/q)

are derived (Q = 2n+2, gamma = sum gamma_j).  Admissibility of the sharp
constants is convergence of the defining integrals: sigma < 0 and
Q + sigma_j > 0 for every j.  The violation strings produced here carry the
same condition tokens the quadrature oracles raise with, so a rejected set
can be matched to the oracle's divergence report.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


_COUPLING_TOL = 1e-12


@dataclass(frozen=True)
class ParamSet:
    """Full parameter pack for the m-linear operators on H^n."""

    m: int
    n: int
    q: float
    q_list: tuple
    lam: float
    lam_list: tuple
    gamma_list: tuple
    alpha: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "q_list", tuple(float(v) for v in self.q_list))
        object.__setattr__(self, "lam_list", tuple(float(v) for v in self.lam_list))
        object.__setattr__(self, "gamma_list", tuple(float(v) for v in self.gamma_list))

    @property
    def Q(self) -> int:
        return 2 * self.n + 2

    @property
    def gamma(self) -> float:
        return sum(self.gamma_list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "m": self.m,
                "n": self.n,
                "q": self.q,
                "q_list": list(self.q_list),
                "lambda": self.lam,
                "lambda_list": list(self.lam_list),
                "gamma_list": list(self.gamma_list),
                "alpha": self.alpha,
            }
        )

    @staticmethod
    def from_json(text: str) -> "ParamSet":
        d = json.loads(text)
        return ParamSet(
            m=int(d["m"]),
            n=int(d["n"]),
            q=float(d["q"]),
            q_list=tuple(d["q_list"]),
            lam=float(d["lambda"]),
            lam_list=tuple(d["lambda_list"]),
            gamma_list=tuple(d["gamma_list"]),
            alpha=float(d.get("alpha", 0.0)),
        )


@dataclass(frozen=True)
class ExponentSet:
    """Derived scaling exponents sigma_j and sigma."""

    sigma_list: tuple
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "sigma_list", tuple(float(v) for v in self.sigma_list))

    @property
    def m(self) -> int:
        return len(self.sigma_list)


@dataclass(frozen=True)
class ValidationResult:
    """Outcome of validate(): ok iff the violation list is empty."""

    ok: bool
    violations: tuple = field(default_factory=tuple)

    def __bool__(self) -> bool:
        return self.ok


def derive_exponents(p: ParamSet) -> ExponentSet:
    """Compute sigma_j and sigma from a ParamSet (Q = 2n+2)."""
    Q = p.Q
    sig = tuple(
        Q * lj - gj / p.q + p.alpha * (lj + 1.0 / qj)
        for qj, lj, gj in zip(p.q_list, p.lam_list, p.gamma_list)
    )
    sigma = Q * p.lam - p.gamma / p.q + p.alpha * (p.lam + 1.0 / p.q)
    return ExponentSet(sigma_list=sig, sigma=sigma)


def admissibility_violations(e: ExponentSet, Q: float) -> list:
    """Convergence conditions for the constant integrals, as violation strings."""
    out = []
    if not e.sigma < 0.0:
        out.append(f"sigma<0 violated: sigma = {e.sigma:.6g} is not negative")
    for j, sj in enumerate(e.sigma_list, start=1):
        if not Q + sj > 0.0:
            out.append(
                f"Q+sigma_j>0 violated: Q + sigma_{j} = {Q + sj:.6g} is not positive"
            )
    return out


def validate(p: ParamSet, strict_sharpness: bool = False) -> ValidationResult:
    """Check all ParamSet invariants plus admissibility of the derived exponents.

    With strict_sharpness, additionally require lambda_j strictly inside
    (-1/q_j, 0) and the coupling q*lambda = q_j*lambda_j.  Returns a
    structured list of violated conditions; never raises.
    """
    v = []
    if not (isinstance(p.m, int) and p.m >= 1):
        v.append(f"m>=1 violated: m = {p.m}")
    if not (isinstance(p.n, int) and p.n >= 1):
        v.append(f"n>=1 violated: n = {p.n}")
    if not (len(p.q_list) == len(p.lam_list) == len(p.gamma_list) == p.m):
        v.append(
            "list lengths violated: q_list, lambda_list, gamma_list must all have m entries"
        )
        return ValidationResult(ok=False, violations=tuple(v))
    if not (math.isfinite(p.q) and p.q >= 1.0):
        v.append(f"q>=1 violated: q = {p.q}")
    for j, qj in enumerate(p.q_list, start=1):
        if not (math.isfinite(qj) and qj > 1.0):
            v.append(f"q_j>1 violated: q_{j} = {qj}")
    if v:
        return ValidationResult(ok=False, violations=tuple(v))

    if abs(1.0 / p.q - sum(1.0 / qj for qj in p.q_list)) > _COUPLING_TOL:
        v.append(
            f"1/q=sum(1/q_j) violated: 1/q = {1.0 / p.q:.12g}, "
            f"sum = {sum(1.0 / qj for qj in p.q_list):.12g}"
        )
    if not (-1.0 / p.q <= p.lam < 0.0):
        v.append(f"lambda in [-1/q,0) violated: lambda = {p.lam}, -1/q = {-1.0 / p.q}")
    for j, (qj, lj) in enumerate(zip(p.q_list, p.lam_list), start=1):
        if not (-1.0 / qj <= lj < 0.0):
            v.append(
                f"lambda_j in [-1/q_j,0) violated: lambda_{j} = {lj}, -1/q_{j} = {-1.0 / qj}"
            )
    Q = p.Q
    if not p.alpha > -Q:
        v.append(f"alpha>-Q violated: alpha = {p.alpha}, -Q = {-Q}")

    e = derive_exponents(p)
    v.extend(admissibility_violations(e, Q))

    if strict_sharpness:
        for j, (qj, lj) in enumerate(zip(p.q_list, p.lam_list), start=1):
            if not (-1.0 / qj < lj < 0.0):
                v.append(
                    f"lambda_j in (-1/q_j,0) violated (strict): lambda_{j} = {lj}"
                )
            if abs(p.q * p.lam - qj * lj) > _COUPLING_TOL:
                v.append(
                    f"q*lambda=q_j*lambda_j violated: q*lambda = {p.q * p.lam:.12g}, "
                    f"q_{j}*lambda_{j} = {qj * lj:.12g}"
                )

    return ValidationResult(ok=not v, violations=tuple(v))
