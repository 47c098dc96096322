"""Linearization at the point-vortex state and the numerical Jacobian.

At eps = 0 the residual map acts on the modes (a_j cos jx of f, b_j cos jx
of g) through the 2x2 blocks

    M_j = [[-j/2, 1/2], [(2 - j)/2, -1/2]],    det M_j = (j - 1)/2,

so M_1 is singular.  Its kernel is f = -g = cos x, which is why the unknowns
are tied by b_1 = -a_1 and the equation for the cos x mode of F2 is traded
for the speed.  Reduced unknowns are (a_1..a_N, b_2..b_N) and the reduced
residual is (p_1..p_N, q_2..q_N).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .fourier import EvenSeries, OddSeries, differentiate, half_laplacian, hilbert
from .functionals import ClosedResidual, SheetConfig, SheetState, closed_residual
from .quadrature import InadmissibleStateError

FD_STEP = 1e-6
FD_RETRY_STEP = 1e-7
RANGE_TOL = 1e-10


class RangeError(ValueError):
    """Input does not satisfy the first-mode constraint p_1 = -q_1."""


@dataclass(frozen=True)
class FreqBlock:
    j: int
    matrix: np.ndarray
    det: float
    exact: tuple  # the four entries as Fractions, row major


def block(j: int) -> FreqBlock:
    if j < 1:
        raise ValueError(f"frequency must be >= 1, got {j}")
    e = (Fraction(-j, 2), Fraction(1, 2), Fraction(2 - j, 2), Fraction(-1, 2))
    mat = np.array([[float(e[0]), float(e[1])], [float(e[2]), float(e[3])]])
    det = e[0] * e[3] - e[1] * e[2]
    return FreqBlock(j, mat, float(det), e)


def block_inverse(j: int) -> np.ndarray:
    if j < 2:
        raise ValueError("M_1 is singular; the j = 1 mode is handled by the first-mode tie")
    return np.array([[-1.0, -1.0], [j - 2.0, -float(j)]]) / (j - 1)


def _modes(N):
    return np.arange(1, N + 1)


def apply_base_linearization(h1: EvenSeries, h2: EvenSeries, form: str = "operator"):
    """Action of the eps = 0 linearization on (h1, h2).

    ``form="operator"`` uses (h1'/2 + H h2 / 2, h1 - |D| h1 / 2 - h2 / 2);
    ``form="matrix"`` applies M_j mode by mode.
    """
    N = max(h1.N, h2.N)
    h1, h2 = h1.resize(N), h2.resize(N)
    if form == "operator":
        u = 0.5 * differentiate(h1) + 0.5 * hilbert(h2)
        v = h1 - 0.5 * half_laplacian(h1) - 0.5 * h2
        return OddSeries(u.coeffs), EvenSeries(v.coeffs)
    if form != "matrix":
        raise ValueError(f"unknown form {form!r}")
    p = np.empty(N)
    q = np.empty(N)
    for j in _modes(N):
        p[j - 1], q[j - 1] = block(j).matrix @ (h1.coeffs[j - 1], h2.coeffs[j - 1])
    return OddSeries(p), EvenSeries(q)


def solve_base_linearization(u: OddSeries, v: EvenSeries):
    """Inverse of the eps = 0 linearization on pairs with p_1 = -q_1."""
    N = max(u.N, v.N)
    p, q = u.resize(N).coeffs, v.resize(N).coeffs
    if abs(p[0] + q[0]) > RANGE_TOL * max(1.0, abs(p[0])):
        raise RangeError(f"first sine coefficient {p[0]} is not minus the first cosine coefficient {q[0]}")
    a = np.empty(N)
    b = np.empty(N)
    a[0], b[0] = -p[0], p[0]
    for j in range(2, N + 1):
        a[j - 1], b[j - 1] = block_inverse(j) @ (p[j - 1], q[j - 1])
    return EvenSeries(a), EvenSeries(b)


def pack_state(state: SheetState) -> np.ndarray:
    return np.concatenate([state.f.coeffs, state.g.coeffs[1:]])


def unpack_state(vec: np.ndarray, eps: float, N: int) -> SheetState:
    vec = np.asarray(vec, float)
    f = vec[:N]
    g = np.concatenate([[-f[0]], vec[N:]])
    return SheetState(eps, EvenSeries(f), EvenSeries(g))


def pack_residual(res: ClosedResidual) -> np.ndarray:
    return np.concatenate([res.normal.coeffs, res.tangential.coeffs[1:]])


def reduced_base_matrix(N: int) -> np.ndarray:
    """blockdiag(M_j) in reduced coordinates; the (p_1, a_1) entry is -1."""
    J = np.zeros((2 * N - 1, 2 * N - 1))
    J[0, 0] = -1.0
    for j in range(2, N + 1):
        rows = [j - 1, N + j - 2]
        J[np.ix_(rows, rows)] = block(j).matrix
    return J


def column_labels(N: int):
    return [("f", j) for j in range(1, N + 1)] + [("g", j) for j in range(2, N + 1)]


@dataclass(frozen=True)
class JacobianMatrix:
    entries: np.ndarray
    columns: list
    step: float

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def reduced_residual(cfg: SheetConfig, vec: np.ndarray, eps: float) -> np.ndarray:
    return pack_residual(closed_residual(cfg, unpack_state(vec, eps, cfg.N)))


def numerical_jacobian(cfg: SheetConfig, state: SheetState, step: float = FD_STEP) -> JacobianMatrix:
    """Central differences of the closed, reduced residual map."""
    x0 = pack_state(SheetState(state.epsilon, state.f.resize(cfg.N), state.g.resize(cfg.N)))
    for h in (step, FD_RETRY_STEP):
        try:
            J = np.empty((x0.size, x0.size))
            for k in range(x0.size):
                e = np.zeros(x0.size)
                e[k] = h
                rp = reduced_residual(cfg, x0 + e, state.epsilon)
                rm = reduced_residual(cfg, x0 - e, state.epsilon)
                J[:, k] = (rp - rm) / (2 * h)
            return JacobianMatrix(J, column_labels(cfg.N), h)
        except InadmissibleStateError:
            if h == FD_RETRY_STEP:
                raise
    raise AssertionError("unreachable")
