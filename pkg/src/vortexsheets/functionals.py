"""Residual functionals for co-rotating and traveling vortex sheets.

One sheet is z(x) = eps R(x) (cos x, sin x) with R = 1 + eps f and strength
gamma = 1 + eps g per unit parameter, so the total circulation is 2 pi.
With n = (R' sin + R cos, R sin - R' cos) and t = (R' cos - R sin,
R' sin + R cos) (the outward normal and the tangent, both divided by eps) and
U the sheet velocity in the moving frame, the residuals are

    F1 = -U.n,                    F2 = (I - P)[-(U.t) gamma / |n|^2]

where P takes the mean.  The sign is chosen so that the linearization at the
point-vortex state is exactly blockdiag(M_j) (see ``linear``).

Every functional is affine in the frame speed s (Omega or W):
F = B + s A.  ``sample_system`` returns the four sampled pieces.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .fourier import (
    EvenSeries,
    OddSeries,
    SampledFunction,
    analyze,
    differentiate,
    grid,
    hilbert,
    synth_values,
)
from .quadrature import InadmissibleStateError, MIN_RADIUS, self_stencil

CO_ROTATING = "co-rotating"
TRAVELING = "traveling"
MODES = (CO_ROTATING, TRAVELING)


class ConfigError(ValueError):
    pass


class DegenerateClosureError(ArithmeticError):
    """The speed drops out of the first-mode balance."""


@dataclass(frozen=True)
class SheetConfig:
    mode: str = CO_ROTATING
    m: int = 2
    d: float = 2.0
    N: int = 32
    Q: int = 256
    newton_tol: float = 1e-11
    newton_max_iter: int = 20

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if int(self.m) != self.m or self.m < 2:
            raise ConfigError(f"fold count m must be an integer >= 2, got {self.m}")
        if not self.d > 1:
            raise ConfigError(f"center offset must satisfy d > 1, got d={self.d}")
        if self.N < 1:
            raise ConfigError(f"truncation N must be positive, got {self.N}")
        if self.Q % 2 or self.Q < 2 * self.N + 2:
            raise ConfigError(f"Q must be even and >= 2N+2 = {2 * self.N + 2}, got Q={self.Q}")
        if not self.newton_tol > 0 or self.newton_max_iter < 1:
            raise ConfigError("newton_tol must be positive and newton_max_iter >= 1")

    @property
    def copies(self) -> int:
        """Number of sheets in the configuration."""
        return self.m if self.mode == CO_ROTATING else 2

    @property
    def base_speed(self) -> float:
        if self.mode == CO_ROTATING:
            return (self.m - 1) / (2 * self.d**2)
        return 1 / (2 * self.d)

    def refined(self, factor: int = 2) -> "SheetConfig":
        return replace(self, N=self.N * factor, Q=self.Q * factor)


@dataclass(frozen=True, eq=False)
class SheetState:
    """(eps, f, g) with the first-mode tie a_1(g) = -a_1(f)."""

    epsilon: float
    f: EvenSeries
    g: EvenSeries

    def __post_init__(self):
        if not -0.5 < self.epsilon < 0.5:
            raise InadmissibleStateError(f"epsilon must lie in (-1/2, 1/2), got {self.epsilon}")
        if self.f.N != self.g.N:
            raise ValueError("f and g must share a truncation order")
        a1f, a1g = self.f.coeffs[0], self.g.coeffs[0]
        if abs(a1f + a1g) > 1e-12 * max(1.0, abs(a1f)):
            raise ValueError(f"first-mode constraint a1(g) = -a1(f) violated: {a1g} vs {a1f}")

    @classmethod
    def build(cls, epsilon, f, g) -> "SheetState":
        """Construct, overwriting a_1(g) with -a_1(f)."""
        f = f if isinstance(f, EvenSeries) else EvenSeries(f)
        g = g if isinstance(g, EvenSeries) else EvenSeries(g)
        gc = np.array(g.coeffs)
        gc[0] = -f.coeffs[0]
        return cls(float(epsilon), f, EvenSeries(gc))

    @classmethod
    def trivial(cls, N: int, epsilon: float = 0.0) -> "SheetState":
        return cls(float(epsilon), EvenSeries.zeros(N), EvenSeries.zeros(N))

    @property
    def N(self) -> int:
        return self.f.N


@dataclass(frozen=True)
class SpeedClosure:
    base: float
    correction: float
    total: float


@dataclass(frozen=True)
class SampledSystem:
    """F1 = B1 + s A1 and tilde-F2 = B2 + s A2 on the grid (F2 before mean removal)."""

    B1: np.ndarray
    A1: np.ndarray
    B2: np.ndarray
    A2: np.ndarray

    def normal(self, s: float) -> np.ndarray:
        return self.B1 + s * self.A1

    def tangential(self, s: float) -> np.ndarray:
        return self.B2 + s * self.A2


@dataclass(frozen=True)
class Geometry:
    x: np.ndarray
    f: np.ndarray
    fp: np.ndarray
    g: np.ndarray
    R: np.ndarray
    Rp: np.ndarray
    gamma: np.ndarray
    z: np.ndarray  # complex positions
    n: np.ndarray  # complex scaled normal
    t: np.ndarray  # complex scaled tangent

    @property
    def nsq(self) -> np.ndarray:
        return self.R**2 + self.Rp**2


def check_admissible(state: SheetState, fv: np.ndarray, gv: np.ndarray) -> None:
    eps = state.epsilon
    if eps == 0:
        return
    bound = 0.9 / abs(eps)
    if np.max(np.abs(fv)) > bound or np.max(np.abs(gv)) > bound:
        raise InadmissibleStateError(f"|f| or |g| exceeds the admissible bound 0.9/|eps| = {bound:.3g}")
    if np.min(1 + eps * fv) < MIN_RADIUS:
        raise InadmissibleStateError("radius 1 + eps*f falls below 0.1")


def geometry(state: SheetState, Q: int) -> Geometry:
    eps = state.epsilon
    x = grid(Q)
    fv = synth_values(state.f, Q)
    gv = synth_values(state.g, Q)
    check_admissible(state, fv, gv)
    fp = synth_values(differentiate(state.f), Q)
    R = 1 + eps * fv
    Rp = eps * fp
    e = np.exp(1j * x)
    return Geometry(
        x=x, f=fv, fp=fp, g=gv, R=R, Rp=Rp, gamma=1 + eps * gv,
        z=eps * R * e, n=(R - 1j * Rp) * e, t=(Rp + 1j * R) * e,
    )


def self_terms(state: SheetState, geo: Geometry, Q: int):
    """Self-induced pieces of -v.n and of -v.t (the latter without its -1/(2 eps) constant).

    The singular 1/(2 eps) cot((x - y)/2) part of the normal integral is the
    exact Hilbert transform of g; the rest is integrated with the
    alternate-point rule.
    """
    eps = state.epsilon
    st = self_stencil(Q)
    idx = st.idx
    fx = geo.f[:, None]
    df = fx - geo.f[idx]
    Rt = geo.R[idx]
    gam = geo.gamma[idx]
    df2 = df * df
    D = eps**2 * df2 + 4 * geo.R[:, None] * Rt * st.sin2
    fpx = geo.fp[:, None]
    s1 = fpx * (eps * df + 2 * Rt * st.sin2) / D - eps * 0.5 * st.cot * df2 / D
    s2 = (-geo.R[:, None] * df + 0.5 * eps * df2 + fpx * Rt * st.sin) / D
    w = st.weight
    S1 = 0.5 * synth_values(hilbert(state.g), Q) + w * np.sum(s1 * gam, axis=1)
    S2 = w * np.sum(s2 * gam, axis=1)
    return S1, S2


def _rot(theta: float) -> complex:
    return complex(np.cos(theta), np.sin(theta))


def interaction_terms(cfg: SheetConfig, geo: Geometry):
    """Sum over the other sheets of (w^perp . n, w^perp . t) gamma(y) / |w|^2, averaged in y.

    w^perp . a / |w|^2 = Im(conj(a) / conj(w)).  For the traveling pair the
    mirror sheet has strength -gamma, which enters as an overall minus sign.
    """
    Q = geo.x.size
    c = complex(cfg.d, 0.0)
    if cfg.mode == CO_ROTATING:
        copies = [(_rot(2 * np.pi * i / cfg.m), 1.0) for i in range(1, cfg.m)]
    else:
        copies = [(-1.0 + 0j, -1.0)]
    acc = np.zeros(Q, complex)
    for rot, sign in copies:
        zi = c + rot * (geo.z - c)
        w = geo.z[:, None] - zi[None, :]
        acc += sign * (1.0 / np.conj(w)) @ geo.gamma
    acc /= Q
    return np.imag(np.conj(geo.n) * acc), np.imag(np.conj(geo.t) * acc)


def frame_terms(cfg: SheetConfig, geo: Geometry, eps: float):
    """Coefficients of the speed in -U.n and -U.t."""
    x, R, Rp, d = geo.x, geo.R, geo.Rp, cfg.d
    s, co = np.sin(x), np.cos(x)
    if cfg.mode == CO_ROTATING:
        # frame velocity Omega (z - c)^perp
        an = -(eps * R * Rp - d * Rp * co + d * R * s)
        at = -(-eps * R**2 + d * R * co + d * Rp * s)
    else:
        # frame velocity -W e2
        an = R * s - Rp * co
        at = Rp * s + R * co
    return an, at


def sample_system(cfg: SheetConfig, state: SheetState) -> SampledSystem:
    if state.N > cfg.N:
        raise ValueError(f"state order {state.N} exceeds config truncation {cfg.N}")
    Q = cfg.Q
    eps = state.epsilon
    geo = geometry(state, Q)
    S1, S2 = self_terms(state, geo, Q)
    I1, I2 = interaction_terms(cfg, geo)
    an, at = frame_terms(cfg, geo, eps)
    nsq = geo.nsq
    lam = geo.gamma / nsq
    chi = (geo.g - 2 * geo.f - eps * geo.f**2 - eps * geo.fp**2) / nsq
    # lam * (-1/(2 eps) + S2 + ...) with the constant -1/(2 eps) removed
    B2 = -0.5 * chi + lam * (S2 + I2)
    return SampledSystem(B1=S1 + I1, A1=an, B2=B2, A2=lam * at)


def remove_mean(s) -> SampledFunction:
    values = s.values if isinstance(s, SampledFunction) else np.asarray(s, float)
    return SampledFunction(values - values.mean())


PARITY_SCALE = 1.0


def _odd(values, N) -> OddSeries:
    return analyze(values, N, "odd", scale=PARITY_SCALE)


def _even(values, N) -> EvenSeries:
    return analyze(remove_mean(values), N, "even", scale=PARITY_SCALE)


def _require(cfg: SheetConfig, mode: str):
    if cfg.mode != mode:
        raise ConfigError(f"this functional needs mode {mode!r}, config has {cfg.mode!r}")


def eval_F1(cfg: SheetConfig, omega: float, state: SheetState) -> OddSeries:
    _require(cfg, CO_ROTATING)
    return _odd(sample_system(cfg, state).normal(omega), cfg.N)


def eval_F2(cfg: SheetConfig, omega: float, state: SheetState) -> EvenSeries:
    _require(cfg, CO_ROTATING)
    return _even(sample_system(cfg, state).tangential(omega), cfg.N)


def eval_G1(cfg: SheetConfig, W: float, state: SheetState) -> OddSeries:
    _require(cfg, TRAVELING)
    return _odd(sample_system(cfg, state).normal(W), cfg.N)


def eval_G2(cfg: SheetConfig, W: float, state: SheetState) -> EvenSeries:
    _require(cfg, TRAVELING)
    return _even(sample_system(cfg, state).tangential(W), cfg.N)


def first_mode_balance(values1: np.ndarray, values2: np.ndarray) -> float:
    """sin-coefficient of the normal part plus cos-coefficient of the tangential part."""
    Q = values1.size
    x = grid(Q)
    return float(2.0 / Q * (values1 @ np.sin(x) + values2 @ np.cos(x)))


def solve_speed(system: SampledSystem) -> float:
    a = first_mode_balance(system.A1, system.A2)
    b = first_mode_balance(system.B1, system.B2)
    scale = np.max(np.abs(system.A1)) + np.max(np.abs(system.A2))
    if abs(a) <= 1e-12 * max(scale, 1.0):
        raise DegenerateClosureError(
            "speed drops out of the first-mode balance; d or the state is outside the admissible range"
        )
    return -b / a


def closure_speed(cfg: SheetConfig, state: SheetState) -> SpeedClosure:
    """Speed that makes the sin x mode of the normal residual cancel the cos x mode of the tangential one."""
    return _closure(cfg.base_speed, solve_speed(sample_system(cfg, state)), state.epsilon)


def _closure(base: float, solved: float, eps: float) -> SpeedClosure:
    # at eps = 0 the solved speed agrees with the base value to rounding;
    # the record keeps total = base + eps * correction exactly
    if eps == 0:
        return SpeedClosure(base, 0.0, base)
    correction = (solved - base) / eps
    return SpeedClosure(base, correction, base + eps * correction)


@dataclass(frozen=True)
class ClosedResidual:
    normal: OddSeries
    tangential: EvenSeries
    speed: SpeedClosure

    def sup(self) -> float:
        Q = 2 * self.normal.N + 2
        Q = max(Q, 64)
        return max(
            float(np.max(np.abs(synth_values(self.normal, Q)))),
            float(np.max(np.abs(synth_values(self.tangential, Q)))),
        )

    def l2(self) -> float:
        return float(np.sqrt(0.5 * (self.normal.coeffs @ self.normal.coeffs
                                    + self.tangential.coeffs @ self.tangential.coeffs)))


def closed_residual(cfg: SheetConfig, state: SheetState) -> ClosedResidual:
    """Residual series with the speed set by the closure at this state."""
    system = sample_system(cfg, state)
    speed = _closure(cfg.base_speed, solve_speed(system), state.epsilon)
    return ClosedResidual(
        normal=_odd(system.normal(speed.total), cfg.N),
        tangential=_even(system.tangential(speed.total), cfg.N),
        speed=speed,
    )
