import pytest

from vortexsheets.functionals import SheetConfig
from vortexsheets.solver import newton_solve


class SolutionCache:
    """Solves once per (mode, m, d, eps, N, Q) for the whole session."""

    def __init__(self):
        self._store = {}

    def get(self, eps, m=2, d=2.0, mode="co-rotating", N=32, Q=256):
        key = (mode, m, d, eps, N, Q)
        if key not in self._store:
            self._store[key] = newton_solve(SheetConfig(mode=mode, m=m, d=d, N=N, Q=Q), eps)
        return self._store[key]


@pytest.fixture(scope="session")
def solutions():
    return SolutionCache()
