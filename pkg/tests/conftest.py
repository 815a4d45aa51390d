import numpy as np
import pytest

from persuasionlab import GridFn, Scenario, make_grid, validate_chain

# the chain used across the suite; stationary law (4/7, 3/7)
CANON_M = [[0.7, 0.3], [0.4, 0.6]]


@pytest.fixture(scope="session")
def chain2():
    return validate_chain(np.array(CANON_M))


@pytest.fixture(scope="session")
def grid2():
    return make_grid(2, 200)


@pytest.fixture(scope="session")
def tent(grid2):
    q2 = grid2.points[:, 1]
    return GridFn(grid2, 1.0 - np.abs(2.0 * q2 - 1.0))


@pytest.fixture(scope="session")
def parabola(grid2):
    q2 = grid2.points[:, 1]
    return GridFn(grid2, (2.0 * q2 - 1.0) ** 2)


@pytest.fixture(scope="session")
def scenario(chain2, tent, parabola):
    """Factory for canonical scenarios; payoff is "tent" or "parabola"."""

    payoffs = {"tent": tent, "parabola": parabola}

    def make(payoff="tent", discount=0.9, reveal_rate=0.5, **kw):
        return Scenario(chain=chain2, u=payoffs[payoff], discount=discount,
                        reveal_rate=reveal_rate, seed=kw.pop("seed", 42), **kw)

    return make
