"""Newton iteration and continuation in eps from the point-vortex state."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .fourier import EvenSeries, grid, synth_values
from .functionals import SheetConfig, SheetState, SpeedClosure, closed_residual
from .linear import numerical_jacobian, pack_residual, pack_state, unpack_state
from .quadrature import InadmissibleStateError

log = logging.getLogger(__name__)

MIN_SINGULAR_VALUE = 1e-12
MAX_HALVINGS = 5


class SolveError(RuntimeError):
    pass


class MaxIterationsError(SolveError):
    pass


class SingularJacobianError(SolveError):
    pass


class LineSearchError(SolveError):
    """The Newton step left the admissible set."""


@dataclass(frozen=True, eq=False)
class SheetSolution:
    config: SheetConfig
    epsilon: float
    speed: SpeedClosure
    f: EvenSeries
    g: EvenSeries
    residual_sup: float
    residual_l2: float
    newton_iters: int
    history: tuple = ()

    @property
    def state(self) -> SheetState:
        return SheetState(self.epsilon, self.f, self.g)

    @property
    def x(self) -> np.ndarray:
        return grid(self.config.Q)

    @property
    def radius(self) -> np.ndarray:
        return 1 + self.epsilon * synth_values(self.f, self.config.Q)

    @property
    def strength(self) -> np.ndarray:
        return 1 + self.epsilon * synth_values(self.g, self.config.Q)

    @property
    def curve(self) -> np.ndarray:
        """Complex positions z(x_q) of the sheet centered at the origin."""
        return self.epsilon * self.radius * np.exp(1j * self.x)


def _solution(cfg, state, res, iters, history) -> SheetSolution:
    return SheetSolution(
        config=cfg, epsilon=state.epsilon, speed=res.speed, f=state.f, g=state.g,
        residual_sup=res.sup(), residual_l2=res.l2(), newton_iters=iters, history=tuple(history),
    )


def _fit(cfg: SheetConfig, state: SheetState) -> SheetState:
    return SheetState.build(state.epsilon, state.f.resize(cfg.N), state.g.resize(cfg.N))


def newton_solve(cfg: SheetConfig, eps: float, guess: SheetState | None = None) -> SheetSolution:
    """Solve the closed reduced system at fixed eps, starting from ``guess``."""
    if guess is None:
        guess = SheetState.trivial(cfg.N, eps)
    state = _fit(cfg, SheetState.build(eps, guess.f, guess.g))
    res = closed_residual(cfg, state)
    history = [res.sup()]
    log.debug("eps=%g iter 0 residual %.3e", eps, history[-1])
    for it in range(1, cfg.newton_max_iter + 1):
        if history[-1] <= cfg.newton_tol:
            return _solution(cfg, state, res, it - 1, history)
        J = numerical_jacobian(cfg, state).entries
        smin = np.linalg.svd(J, compute_uv=False).min()
        if smin < MIN_SINGULAR_VALUE:
            raise SingularJacobianError(f"Jacobian is numerically singular at eps={eps} (sigma_min={smin:.2e})")
        x0 = pack_state(state)
        dx = np.linalg.solve(J, -pack_residual(res))
        try:
            trial = unpack_state(x0 + dx, eps, cfg.N)
            tres = closed_residual(cfg, trial)
            if tres.sup() > history[-1]:
                trial = unpack_state(x0 + 0.5 * dx, eps, cfg.N)
                tres = closed_residual(cfg, trial)
        except InadmissibleStateError as exc:
            raise LineSearchError(f"Newton step left the admissible set at eps={eps}: {exc}") from exc
        state, res = trial, tres
        history.append(res.sup())
        log.debug("eps=%g iter %d residual %.3e", eps, it, history[-1])
    if history[-1] <= cfg.newton_tol:
        return _solution(cfg, state, res, cfg.newton_max_iter, history)
    raise MaxIterationsError(
        f"no convergence at eps={eps} after {cfg.newton_max_iter} iterations (residual {history[-1]:.3e})"
    )


@dataclass
class ContinuationRun:
    config: SheetConfig
    targets: tuple
    solutions: list = field(default_factory=list)
    step_policy: str = "halving-on-failure"
    empirical_eps0: float | None = None
    failure: str | None = None

    @property
    def complete(self) -> bool:
        return self.failure is None


def _extrapolate(path, eps, N) -> SheetState:
    if len(path) == 1:
        e0, s0 = path[-1]
        return SheetState.build(eps, s0.f.resize(N), s0.g.resize(N))
    (e1, s1), (e2, s2) = path[-2], path[-1]
    t = (eps - e2) / (e2 - e1)
    v1, v2 = pack_state(_fit_n(s1, N)), pack_state(_fit_n(s2, N))
    return unpack_state(v2 + t * (v2 - v1), eps, N)


def _fit_n(state, N):
    return SheetState.build(state.epsilon, state.f.resize(N), state.g.resize(N))


def continue_family(cfg: SheetConfig, targets, start: SheetState | None = None) -> ContinuationRun:
    """Solve at each eps in ``targets`` in order, seeding from earlier solutions.

    A failed solve halves the step (at most five times per target) and the
    reduced step is kept until the target is reached.  When the halvings run
    out the run stops and records the last accepted eps as ``empirical_eps0``.
    """
    targets = tuple(float(e) for e in targets)
    run = ContinuationRun(cfg, targets)
    if not targets:
        return run
    direction = np.sign(targets[0]) or 1.0
    if any(direction * (b - a) <= 0 for a, b in zip(targets, targets[1:])):
        raise ValueError("targets must move monotonically away from eps = 0")
    path = [(0.0, start or SheetState.trivial(cfg.N))]
    for target in targets:
        step = target - path[-1][0]
        halvings = 0
        while path[-1][0] != target:
            last = path[-1][0]
            trial = target if direction * (target - (last + step)) <= 0 else last + step
            try:
                sol = newton_solve(cfg, trial, _extrapolate(path, trial, cfg.N))
            except (SolveError, InadmissibleStateError) as exc:
                log.info("eps=%g failed (%s)", trial, exc)
                if halvings == MAX_HALVINGS:
                    run.empirical_eps0 = last
                    run.failure = f"step halving exhausted between eps={last} and eps={target}: {exc}"
                    return run
                halvings += 1
                step *= 0.5
                continue
            path.append((trial, sol.state))
            if trial == target:
                run.solutions.append(sol)
        run.empirical_eps0 = target
    return run


def spectral_diagnostics(sol: SheetSolution):
    """(tail energy fraction in the top quarter of modes, fitted geometric decay rate)."""
    amp = np.hypot(sol.f.coeffs, sol.g.coeffs)
    total = float(amp @ amp)
    if total == 0.0:
        return 0.0, 0.0
    N = amp.size
    tail = amp[N - N // 4:] if N >= 4 else amp[-1:]
    tail_ratio = float(tail @ tail) / total
    j = np.arange(1, N + 1)
    keep = amp > 1e-14
    if keep.sum() < 2:
        return tail_ratio, 0.0
    slope = np.polyfit(j[keep], np.log(amp[keep]), 1)[0]
    return tail_ratio, float(np.exp(slope))
