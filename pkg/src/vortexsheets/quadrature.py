"""Periodic mean-value integrals, including cotangent-type principal values.

All integrals are normalized means, (1/2pi) * integral over one period.
Principal values use the alternate-point trapezoid rule: with the singular
point on node q, only nodes at odd offset from q are used, with weight 2/Q.
For periodic integrands whose singular part is odd about the singular point
(cot((x - y)/2) times something smooth) the rule converges spectrally.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fourier import EvenSeries, grid

MIN_RADIUS = 0.1


class InadmissibleStateError(ValueError):
    """The sheet radius 1 + eps*f is not safely positive."""


class NonFiniteIntegrandError(ArithmeticError):
    pass


class PVAlignmentError(ValueError):
    """A principal-value singular point does not sit on a grid node."""


@dataclass(frozen=True)
class PVGrid:
    Q: int
    alternate: bool = True

    def __post_init__(self):
        if self.Q <= 0 or self.Q % 2:
            raise ValueError(f"PVGrid needs an even positive Q, got {self.Q}")

    @property
    def nodes(self) -> np.ndarray:
        return grid(self.Q)

    def mean(self, s) -> float:
        return mean(s, self)

    def pv_mean(self, s, x: float) -> float:
        return pv_mean(s, x, self)


def _sample(s, y):
    vals = np.asarray(s(y) if callable(s) else s, float)
    if vals.shape != np.shape(y):
        vals = np.broadcast_to(vals, np.shape(y))
    if not np.all(np.isfinite(vals)):
        raise NonFiniteIntegrandError("integrand is not finite at every quadrature node")
    return vals


def mean(s, g: PVGrid) -> float:
    """Trapezoid mean of a smooth periodic integrand, (1/Q) sum s(x_q)."""
    return float(np.mean(_sample(s, g.nodes)))


def node_index(x: float, Q: int) -> int:
    k = x * Q / (2 * np.pi)
    q = int(np.rint(k))
    if abs(k - q) > 1e-9:
        raise PVAlignmentError(f"singular point x={x!r} is not a node of the Q={Q} grid")
    return q % Q


@lru_cache(maxsize=16)
def odd_offsets(Q: int) -> np.ndarray:
    off = np.arange(1, Q, 2)
    off.setflags(write=False)
    return off


def pv_mean(s, x: float, g: PVGrid) -> float:
    """Alternate-point principal value mean of s(y) with a singularity at y = x."""
    q = node_index(x, g.Q)
    y = g.nodes[(q + odd_offsets(g.Q)) % g.Q]
    return float(2.0 / g.Q * np.sum(_sample(s, y)))


@dataclass(frozen=True)
class SelfStencil:
    """Gather indices and offset-only kernel factors for the alternate-point rule.

    Row q lists the nodes y at odd offset k from x_q, so u = x - y = -2 pi k / Q
    and every factor below depends on the offset alone.
    """

    Q: int
    idx: np.ndarray  # (Q, Q/2) node indices
    sin2: np.ndarray  # sin^2(u/2)
    cot: np.ndarray  # cot(u/2)
    sin: np.ndarray  # sin(u)
    cos: np.ndarray  # cos(u)

    @property
    def weight(self) -> float:
        return 2.0 / self.Q


@lru_cache(maxsize=16)
def self_stencil(Q: int) -> SelfStencil:
    off = odd_offsets(Q)
    idx = (np.arange(Q)[:, None] + off[None, :]) % Q
    u = -2 * np.pi * off / Q
    arrs = [idx, np.sin(u / 2) ** 2, 1.0 / np.tan(u / 2), np.sin(u), np.cos(u)]
    for a in arrs:
        a.setflags(write=False)
    return SelfStencil(Q, *arrs)


def radius_check(eps: float, fv: np.ndarray) -> np.ndarray:
    R = 1.0 + eps * np.asarray(fv, float)
    if np.min(R) < MIN_RADIUS:
        raise InadmissibleStateError(
            f"radius 1 + eps*f drops to {np.min(R):.3g} (< {MIN_RADIUS}); state is inadmissible"
        )
    return R


def denominator(eps: float, f: EvenSeries, x, y):
    """eps^2 (f(x) - f(y))^2 + 4 R(x) R(y) sin^2((x - y)/2), R = 1 + eps f."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    fx, fy = f(x), f(y)
    Rx = radius_check(eps, fx)
    Ry = radius_check(eps, fy)
    return eps**2 * (fx - fy) ** 2 + 4 * Rx * Ry * np.sin((x - y) / 2) ** 2


def _diagonal_finite_part(eps, f: EvenSeries, x):
    # Laurent coefficients of D(x, x + u) = a2 u^2 + a3 u^3 + a4 u^4 + ...
    j = np.arange(1, f.N + 1)
    a = f.coeffs
    c = np.cos(np.multiply.outer(x, j))
    s = np.sin(np.multiply.outer(x, j))
    f0 = c @ a
    f1 = s @ (-j * a)
    f2 = c @ (-(j**2) * a)
    f3 = s @ (j**3 * a)
    R = radius_check(eps, f0)
    a2 = eps**2 * f1**2 + R**2
    a3 = eps**2 * f1 * f2 + eps * R * f1
    a4 = eps**2 * (f2**2 / 4 + f1 * f3 / 3) + eps * R * f2 / 2 - R**2 / 12
    c1, c2 = a3 / a2, a4 / a2
    return (c1**2 - c2) / a2


def kernel_correction(eps: float, f: EvenSeries, x, y):
    """K = (1/eps)(1/D - 1/(4 sin^2((x - y)/2))).

    Off the diagonal this is evaluated in the cancellation-free form
    -(4 s^2 (f(x) + f(y) + eps f(x) f(y)) + eps (f(x) - f(y))^2) / (4 s^2 D),
    which also gives the eps -> 0 limit.  K carries a 1/sin^2 singularity
    whenever R^2 + eps^2 f'^2 != 1 at x, so on the diagonal the value returned
    is the finite part: the u^0 coefficient of the Laurent expansion in
    u = y - x.  At eps = 0 the diagonal value is the eps-derivative of that
    finite part.
    """
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    fx, fy = f(x), f(y)
    radius_check(eps, fx)
    radius_check(eps, fy)
    s2 = 4 * np.sin((x - y) / 2) ** 2
    diag = np.isclose(np.mod(x - y + np.pi, 2 * np.pi), np.pi, rtol=0, atol=1e-12)
    out = np.empty(x.shape)
    off = ~diag
    if np.any(off):
        fxo, fyo, s2o = fx[off], fy[off], s2[off]
        Ro, Rt = 1 + eps * fxo, 1 + eps * fyo
        D = eps**2 * (fxo - fyo) ** 2 + Ro * Rt * s2o
        out[off] = -(s2o * (fxo + fyo + eps * fxo * fyo) + eps * (fxo - fyo) ** 2) / (s2o * D)
    if np.any(diag):
        xd = x[diag]
        if eps == 0:
            out[diag] = _diag_limit_eps0(f, xd)
        else:
            out[diag] = (_diagonal_finite_part(eps, f, xd) - 1.0 / 12) / eps
    return out if out.ndim else float(out)


def _diag_limit_eps0(f: EvenSeries, x):
    # d/d eps of the finite part at eps = 0: a2 = 1 + 2 eps f, a3 = eps f',
    # a4 = eps f''/2 - (1 + 2 eps f)/12 to first order
    j = np.arange(1, f.N + 1)
    f0 = np.cos(np.multiply.outer(x, j)) @ f.coeffs
    f2 = np.cos(np.multiply.outer(x, j)) @ (-(j**2) * f.coeffs)
    # finite part = -a4/a2^2 + O(eps^2) = (1/12)(1 - 2 eps f) - eps f''/2 + O(eps^2)
    return -f0 / 6 - f2 / 2


@dataclass(frozen=True)
class KernelSplit:
    """1/D = leading + eps * correction."""

    epsilon: float
    f: EvenSeries

    def leading(self, x, y):
        return 1.0 / (4 * np.sin((np.asarray(x) - np.asarray(y)) / 2) ** 2)

    def correction(self, x, y):
        return kernel_correction(self.epsilon, self.f, x, y)

    def reconstruct(self, x, y):
        return self.leading(x, y) + self.epsilon * self.correction(x, y)

