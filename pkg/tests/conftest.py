import numpy as np
import pytest

from hybridgas import VelocityGrid, maxwellian


@pytest.fixture
def vg16():
    return VelocityGrid(v_max=8.0, n_per_axis=16)


@pytest.fixture
def vg24():
    return VelocityGrid(v_max=8.0, n_per_axis=24)


def random_mixture(vg, rng, n_components=3):
    """Positive mixture of Maxwellians kept inside the grid envelope."""
    f = 0.0
    for _ in range(n_components):
        rho = rng.uniform(0.2, 1.5)
        u = np.concatenate([rng.uniform(-1.0, 1.0, 1), rng.uniform(-0.5, 0.5, 2)])
        T = rng.uniform(0.3, 1.5)
        f = f + maxwellian(rho, u, T, vg)
    return f
