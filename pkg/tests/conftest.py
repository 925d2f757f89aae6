import math

import numpy as np

from goldman_lab.pants import BoundaryInvariant, PantsParams


def random_invariant(rng) -> BoundaryInvariant:
    lam = rng.uniform(0.05, 0.9)
    lo = 2.0 / math.sqrt(lam)
    hi = 1.0 / lam ** 2 + lam
    tau = lo + rng.uniform(0.05, 0.9) * (hi - lo)
    return BoundaryInvariant(lam, tau)


def random_params(rng, chart="st", spread=1.5) -> PantsParams:
    R = tuple(random_invariant(rng) for _ in range(3))
    s = math.exp(rng.uniform(-spread, spread))
    internal = math.exp(rng.uniform(-spread, spread))
    return PantsParams(R=R, s=s, internal=internal, chart=chart)
