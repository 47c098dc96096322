"""Truncated cosine/sine series on the torus.

Series carry no constant mode: coefficient ``coeffs[j - 1]`` multiplies
``cos(jx)`` (or ``sin(jx)``) for ``j = 1..N``.  Transforms to and from a
grid are direct O(NQ) sums, which is plenty for N <= 128, Q <= 4096.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

PARITY_TOL = 1e-10


class GridTooSmallError(ValueError):
    """Sampling grid cannot resolve the requested truncation order."""


class ParityError(ArithmeticError):
    """Sampled data has the wrong symmetry about x = 0."""


def _as_coeffs(coeffs) -> np.ndarray:
    arr = np.array(coeffs, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class EvenSeries:
    """u(x) = sum_j a_j cos(jx), j = 1..N."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs))

    @property
    def N(self) -> int:
        return self.coeffs.size

    @classmethod
    def zeros(cls, N: int) -> "EvenSeries":
        return cls(np.zeros(N))

    @classmethod
    def mode(cls, j: int, N: int, amplitude: float = 1.0) -> "EvenSeries":
        c = np.zeros(N)
        c[j - 1] = amplitude
        return cls(c)

    def __call__(self, x):
        j = np.arange(1, self.N + 1)
        return np.cos(np.multiply.outer(np.asarray(x, float), j)) @ self.coeffs

    def resize(self, N: int) -> "EvenSeries":
        return type(self)(_resize(self.coeffs, N))

    def __add__(self, other):
        return type(self)(_add(self.coeffs, other.coeffs))

    def __sub__(self, other):
        return type(self)(_add(self.coeffs, -other.coeffs))

    def __neg__(self):
        return type(self)(-self.coeffs)

    def __mul__(self, scalar: float):
        return type(self)(scalar * self.coeffs)

    __rmul__ = __mul__

    def __repr__(self):
        return f"{type(self).__name__}(N={self.N}, coeffs={np.array2string(self.coeffs, threshold=6)})"


@dataclass(frozen=True, eq=False)
class OddSeries(EvenSeries):
    """u(x) = sum_j p_j sin(jx), j = 1..N."""

    def __call__(self, x):
        j = np.arange(1, self.N + 1)
        return np.sin(np.multiply.outer(np.asarray(x, float), j)) @ self.coeffs


def _resize(c: np.ndarray, N: int) -> np.ndarray:
    out = np.zeros(N)
    n = min(N, c.size)
    out[:n] = c[:n]
    return out


def _add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = max(a.size, b.size)
    return _resize(a, n) + _resize(b, n)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Values at the equispaced nodes x_q = 2 pi q / Q."""

    values: np.ndarray

    def __post_init__(self):
        v = _as_coeffs(self.values)
        if v.size == 0 or v.size % 2:
            raise ValueError(f"grid size must be even and positive, got {v.size}")
        object.__setattr__(self, "values", v)

    @property
    def Q(self) -> int:
        return self.values.size

    @property
    def nodes(self) -> np.ndarray:
        return grid(self.Q)


@lru_cache(maxsize=32)
def grid(Q: int) -> np.ndarray:
    x = 2 * np.pi * np.arange(Q) / Q
    x.setflags(write=False)
    return x


@lru_cache(maxsize=64)
def _trig_table(Q: int, N: int):
    # exact integer products keep cos(j x_q) symmetric in q -> Q - q
    jq = np.multiply.outer(np.arange(Q), np.arange(1, N + 1)) % Q
    ang = 2 * np.pi * jq / Q
    c, s = np.cos(ang), np.sin(ang)
    c.setflags(write=False)
    s.setflags(write=False)
    return c, s


def _check_grid(N: int, Q: int) -> None:
    if Q % 2 or Q <= 0:
        raise GridTooSmallError(f"grid size must be even and positive, got Q={Q}")
    if Q < 2 * N + 2:
        raise GridTooSmallError(f"Q={Q} cannot resolve order N={N}; need Q >= {2 * N + 2}")


def synth(u: EvenSeries, Q: int) -> SampledFunction:
    """Sample a cosine (or sine) series on the Q-point grid."""
    _check_grid(u.N, Q)
    c, s = _trig_table(Q, u.N)
    table = s if isinstance(u, OddSeries) else c
    return SampledFunction(table @ u.coeffs)


def synth_values(u: EvenSeries, Q: int) -> np.ndarray:
    return synth(u, Q).values


def parity_violation(values: np.ndarray, parity: str) -> float:
    """Energy of the wrong-parity part relative to total energy."""
    v = np.asarray(values, float)
    mirrored = np.roll(v[::-1], 1)  # v(-x_q)
    wrong = 0.5 * (v - mirrored) if parity == "even" else 0.5 * (v + mirrored)
    total = float(v @ v)
    if total == 0.0:
        return 0.0
    return float(wrong @ wrong) / total


def analyze(s, N: int, parity: str = "even", check: bool = True, scale: float = 0.0):
    """Project grid samples onto cos(jx) (even) or sin(jx) (odd), j = 1..N.

    The mean is discarded.  With ``check`` the wrong-parity energy must stay
    below ``PARITY_TOL`` relative to ``max(total energy, Q * scale**2)``;
    ``scale`` lets callers supply the size of the terms that were summed to
    produce near-zero samples, so rounding noise is not mistaken for a
    symmetry bug.
    """
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    values = s.values if isinstance(s, SampledFunction) else np.asarray(s, float)
    Q = values.size
    _check_grid(N, Q)
    if check:
        v = values
        mirrored = np.roll(v[::-1], 1)
        wrong = 0.5 * (v - mirrored) if parity == "even" else 0.5 * (v + mirrored)
        ref = max(float(v @ v), Q * scale**2)
        if ref > 0 and float(wrong @ wrong) > PARITY_TOL * ref:
            raise ParityError(
                f"expected {parity} samples; wrong-parity energy fraction "
                f"{float(wrong @ wrong) / ref:.3e} exceeds {PARITY_TOL:g}"
            )
    c, sn = _trig_table(Q, N)
    if parity == "even":
        return EvenSeries((2.0 / Q) * (values @ c))
    return OddSeries((2.0 / Q) * (values @ sn))


def mean_value(s) -> float:
    values = s.values if isinstance(s, SampledFunction) else np.asarray(s, float)
    return float(values.mean())


def differentiate(u: EvenSeries):
    """d/dx of a cosine series (sine series) or of a sine series (cosine series)."""
    j = np.arange(1, u.N + 1)
    if isinstance(u, OddSeries):
        return EvenSeries(j * u.coeffs)
    return OddSeries(-j * u.coeffs)


def hilbert(u: EvenSeries):
    """Periodic Hilbert transform: cos(jx) -> sin(jx), sin(jx) -> -cos(jx)."""
    if isinstance(u, OddSeries):
        return EvenSeries(-u.coeffs)
    return OddSeries(u.coeffs.copy())


def half_laplacian(u: EvenSeries):
    """(-Laplacian)^(1/2): multiplies mode j by j."""
    j = np.arange(1, u.N + 1)
    return type(u)(j * u.coeffs)


def strip_norm(u: EvenSeries, k: float = 0.0, a: float = 0.0) -> float:
    """Discrete analytic-strip H^k norm, (sum (1 + j^2k) cosh(2ja) |a_j|^2)^(1/2).

    At k = 0 the Sobolev weight is taken as 1 so the norm reduces to the
    plain l2 norm of the coefficients.  cosh(2ja) is the average of
    |cos(j(x +- ia))|^2 over the two strip edges.  Diagnostic only.
    """
    if k < 0 or a < 0:
        raise ValueError("strip_norm needs k >= 0 and a >= 0")
    j = np.arange(1, u.N + 1, dtype=float)
    sobolev = 1.0 + j ** (2 * k) if k > 0 else np.ones_like(j)
    return float(np.sqrt(np.sum(sobolev * np.cosh(2 * j * a) * u.coeffs**2)))
