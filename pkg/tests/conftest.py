from functools import lru_cache

import pytest

from realdirac import (
    PhysParams,
    RadialGrid,
    StateLabel,
    build_eta_set,
    build_s_map,
    solve_radial,
)

ALPHA = 0.0072973525693


@lru_cache(maxsize=None)
def solved(n, kappa, za, mj=0.5, points=4000, r_max_n=None):
    """Cached bound state at ``alpha = za``, ``Z = 1``."""
    params = PhysParams(alpha=za, Z=1)
    grid = RadialGrid.default(params, r_max_n or n, points)
    return solve_radial(StateLabel(n, kappa, mj), params, grid)


@pytest.fixture(scope="session")
def eta():
    return build_eta_set()


@pytest.fixture(scope="session")
def smap():
    return build_s_map()
