"""Direct Birkhoff-Rott checks of computed sheets.

Nothing here reuses the residual algebra in ``functionals``.  Velocities are
built in complex form,

    u - i v = (1 / 2 pi i) PV integral gamma(y) dy / (z(x) - z(y)),

summed over every sheet in the configuration, with the self-induced
principal value handled by subtracting (gamma(x)/z'(x)) (1/2) cot((x - y)/2)
(whose principal value vanishes) and integrating the smooth remainder with
the full trapezoid rule.  Derivatives come from numpy's FFT.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fourier import EvenSeries, SampledFunction
from .functionals import SheetState, closed_residual

ORACLE_Q = 1024


class DegenerateCurveError(ValueError):
    pass


@dataclass(frozen=True)
class VelocitySample:
    point: np.ndarray
    velocity: np.ndarray


@dataclass(frozen=True)
class EquilibriumReport:
    normal_residual_sup: float
    tangential_constancy: float
    tangential_mean: float
    curvature_min: float
    curve_is_convex: bool

    def as_dict(self) -> dict:
        return {
            "normal_residual_sup": self.normal_residual_sup,
            "tangential_constancy": self.tangential_constancy,
            "tangential_mean": self.tangential_mean,
            "curvature_min": self.curvature_min,
            "curve_is_convex": self.curve_is_convex,
        }


def _cosine_samples(coeffs, Q: int) -> np.ndarray:
    # modes at or above Q/2 cannot be represented on the grid and are dropped
    c = np.asarray(coeffs, float)[: Q // 2 - 1]
    modes = np.zeros(Q // 2 + 1, complex)
    modes[1:c.size + 1] = c * (Q / 2)
    return np.fft.irfft(modes, Q)


def _fft_derivative(values: np.ndarray, order: int = 1) -> np.ndarray:
    Q = values.size
    k = np.fft.fftfreq(Q, 1.0 / Q)
    k[Q // 2] = 0.0  # Nyquist mode has no well-defined odd derivative
    return np.fft.ifft((1j * k) ** order * np.fft.fft(values))


@dataclass(frozen=True)
class Curve:
    x: np.ndarray
    R: np.ndarray
    z: np.ndarray
    dz: np.ndarray
    d2z: np.ndarray
    gamma: np.ndarray
    dgamma: np.ndarray


def sheet_curve(eps: float, f_coeffs, g_coeffs, Q: int = ORACLE_Q) -> Curve:
    x = 2 * np.pi * np.arange(Q) / Q
    R = 1 + eps * _cosine_samples(f_coeffs, Q)
    gamma = 1 + eps * _cosine_samples(g_coeffs, Q)
    z = eps * R * np.exp(1j * x)
    if eps == 0:
        # zero-size sheet: keep the parametrization direction for normals
        dz = 1j * np.exp(1j * x)
        d2z = -np.exp(1j * x)
    else:
        dz = _fft_derivative(z)
        d2z = _fft_derivative(z, 2)
    dgamma = _fft_derivative(gamma.astype(complex)).real
    return Curve(x, R, z, dz, d2z, gamma, dgamma)


def _self_velocity_conj(c: Curve) -> np.ndarray:
    Q = c.x.size
    if np.min(np.abs(c.dz)) < 1e-10:
        raise DegenerateCurveError("|dz/dx| < 1e-10 on the sheet")
    dx = c.x[:, None] - c.x[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        kern = c.gamma[None, :] / (c.z[:, None] - c.z[None, :])
        sub = (c.gamma / c.dz)[:, None] * 0.5 / np.tan(dx / 2)
        body = kern - sub
    diag = -c.dgamma / c.dz + c.gamma * c.d2z / (2 * c.dz**2)
    body[np.arange(Q), np.arange(Q)] = diag
    return body.sum(axis=1) / (1j * Q)


def _copies(mode: str, m: int, d: float):
    """(map from sheet-0 positions to copy positions, strength sign) for the other sheets."""
    c = complex(d, 0)
    if mode == "co-rotating":
        out = []
        for i in range(1, m):
            rot = np.exp(2j * np.pi * i / m)
            out.append((lambda z, rot=rot: c + rot * (z - c), 1.0))
        return out
    return [(lambda z: 2 * c - z, -1.0)]


def velocity_field(mode: str, m: int, d: float, c: Curve, include_self: bool = True) -> np.ndarray:
    """Complex velocity u + i v at each node of sheet 0."""
    Q = c.x.size
    conj_v = _self_velocity_conj(c) if include_self and np.any(c.z != 0) else np.zeros(Q, complex)
    for to_copy, sign in _copies(mode, m, d):
        zc = to_copy(c.z)
        conj_v = conj_v + sign * ((1.0 / (c.z[:, None] - zc[None, :])) @ c.gamma) / (1j * Q)
    return np.conj(conj_v)


def _params(sol):
    cfg = sol.config
    return cfg.mode, cfg.m, cfg.d, sol.epsilon, sol.f.coeffs, sol.g.coeffs, sol.speed.total


def br_velocity(sol, x: float, Q: int = ORACLE_Q) -> VelocitySample:
    """Birkhoff-Rott velocity at the node x of the Q-point oracle grid."""
    k = x * Q / (2 * np.pi)
    q = int(np.rint(k))
    if abs(k - q) > 1e-9:
        raise ValueError(f"x={x} is not a node of the Q={Q} oracle grid")
    mode, m, d, eps, fc, gc, _ = _params(sol)
    c = sheet_curve(eps, fc, gc, Q)
    v = velocity_field(mode, m, d, c)[q % Q]
    zq = c.z[q % Q]
    return VelocitySample(np.array([zq.real, zq.imag]), np.array([v.real, v.imag]))


def frame_velocity(mode: str, d: float, speed: float, z: np.ndarray) -> np.ndarray:
    if mode == "co-rotating":
        return -1j * speed * (z - d)  # speed * (z - c)^perp
    return np.full(z.shape, -1j * speed)


def _dot(a, b):
    return (np.conj(a) * b).real


def relative_velocity(sol, Q: int = ORACLE_Q):
    mode, m, d, eps, fc, gc, speed = _params(sol)
    c = sheet_curve(eps, fc, gc, Q)
    U = velocity_field(mode, m, d, c) + frame_velocity(mode, d, speed, c.z)
    return c, U


def curvature_values(eps: float, f_coeffs, Q: int = ORACLE_Q) -> np.ndarray:
    """eps * kappa = (R^2 + 2 R'^2 - R R'') / (R^2 + R'^2)^(3/2)."""
    R = 1 + eps * _cosine_samples(f_coeffs, Q)
    R1 = _fft_derivative(R.astype(complex)).real
    R2 = _fft_derivative(R.astype(complex), 2).real
    return (R**2 + 2 * R1**2 - R * R2) / (R**2 + R1**2) ** 1.5


def curvature_profile(sol, Q: int = ORACLE_Q):
    k = curvature_values(sol.epsilon, sol.f.coeffs, Q)
    return SampledFunction(k), float(k.min())


def equilibrium_residual(sol, Q: int = ORACLE_Q) -> EquilibriumReport:
    c, U = relative_velocity(sol, Q)
    if np.min(np.abs(c.dz)) < 1e-10:
        raise DegenerateCurveError("|dz/dx| < 1e-10 on the sheet")
    normal = -1j * c.dz / np.abs(c.dz)
    un = _dot(normal, U)
    t = _dot(c.dz, U) * c.gamma / np.abs(c.dz) ** 2
    kappa = curvature_values(sol.epsilon, sol.f.coeffs, Q)
    return EquilibriumReport(
        normal_residual_sup=float(np.max(np.abs(un))),
        tangential_constancy=float(np.max(np.abs(t - t.mean()))),
        tangential_mean=float(t.mean()),
        curvature_min=float(kappa.min()),
        curve_is_convex=bool(kappa.min() > 0),
    )


def mirror_state(sol, half_turn: bool = False):
    """(-eps, f(-x), g(-x)); even series are unchanged by x -> -x.

    With ``half_turn`` the parameter is also shifted by pi and f, g change
    sign, i.e. a_j -> (-1)^(j+1) a_j.  That state traces exactly the same
    sheet as the original.
    """
    f, g = sol.f.coeffs, sol.g.coeffs
    if half_turn:
        sign = (-1.0) ** (np.arange(1, f.size + 1) + 1)
        f, g = sign * f, sign * g
    return SheetState(-sol.epsilon, EvenSeries(f), EvenSeries(g))


def mirror_check(sol, half_turn: bool = False) -> float:
    """Sup of the closed residual at the mirrored state, without re-solving."""
    return closed_residual(sol.config, mirror_state(sol, half_turn)).sup()
