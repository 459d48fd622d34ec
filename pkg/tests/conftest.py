import numpy as np
import pytest

from hlp_sharp.hgroup import GroupParams
from hlp_sharp.params import ParamSet, derive_exponents, validate
from hlp_sharp.quad import MCSpec, QuadratureSpec


@pytest.fixture(scope="session")
def gp1():
    return GroupParams(n=1)


@pytest.fixture(scope="session")
def gp2():
    return GroupParams(n=2)


@pytest.fixture(scope="session")
def quad_spec():
    return QuadratureSpec()


@pytest.fixture
def mc_small():
    return MCSpec(samples=10_000, seed=11, shards=4)


def make_admissible(rng: np.random.Generator, m: int, n: int) -> ParamSet:
    """One random admissible ParamSet with comfortable margins.

    lambda_j is tied to lambda through q*lambda = q_j*lambda_j, gamma_j is
    drawn freely, and the draw is retried until sigma <= -0.1 and
    Q + sigma_j >= 0.2 for every factor.
    """
    Q = 2 * n + 2
    for _ in range(1000):
        q_inv_parts = rng.uniform(0.1, 0.8, size=m)
        q_inv_parts /= q_inv_parts.sum() / rng.uniform(0.2, 0.8)
        q_list = tuple(float(1.0 / u) for u in q_inv_parts)
        q = float(1.0 / sum(1.0 / qj for qj in q_list))
        if q < 1.0 or any(qj <= 1.05 for qj in q_list):
            continue
        lam = float(rng.uniform(-1.0 / q, 0.0) * 0.9)
        if lam >= -1e-3:
            continue
        lam_list = tuple(q * lam / qj for qj in q_list)
        gamma_list = tuple(float(g) for g in rng.uniform(-1.5, 1.5, size=m))
        alpha = float(rng.uniform(-Q + 0.5, Q))
        p = ParamSet(
            m=m, n=n, q=q, q_list=q_list, lam=lam,
            lam_list=lam_list, gamma_list=gamma_list, alpha=alpha,
        )
        e = derive_exponents(p)
        if e.sigma <= -0.1 and all(Q + sj >= 0.2 for sj in e.sigma_list):
            if validate(p).ok:
                return p
    raise RuntimeError("could not draw an admissible parameter set")
