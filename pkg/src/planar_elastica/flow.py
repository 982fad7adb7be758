"""Explicit time stepping of the planar elastic flow.

The normal speed at vertex ``i`` is

    V_i = -k_ss - k**3 / 2 + lam * k

with the scalar curvature ``k_i = <T_i - T_{i-1}, N_i> / ell_i`` (exact on
uniformly sampled circles) and a non-uniform second difference for ``k_ss``.
For planar curves the normal part of the second arc-length derivative of the
curvature vector is ``k_ss N``, so the vector flow reduces to ``V N``.

``lam`` is either a fixed penalty (length penalized flow) or the quotient
that makes the discrete length derivative ``-sum ell_i k_i V_i`` vanish
(length preserving flow).
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field, replace

import numba
import numpy as np

from .curves import (
    DiscreteCurve,
    as_curve,
    elastic_energy,
    length,
    self_intersections,
)
from .elliptic import constants

log = logging.getLogger(__name__)

DT_FACTOR = 0.1  # explicit stability needs dt <= h**4 / 8 for the fourth-order term
MAX_HALVINGS = 20
ENERGY_RTOL = 1e-6
REDISTRIBUTION_RELAXATION = 0.5
ZERO_ENERGY = 1e-14


class FlowMode(str, enum.Enum):
    PENALIZED = "penalized"
    PRESERVE = "preserve"


class Redistribution(str, enum.Enum):
    EVERY_STEP = "every_step"
    NEVER = "never"


class StepFailure(RuntimeError):
    """Raised when the energy keeps increasing after repeated dt halving."""


class ZeroEnergyError(ZeroDivisionError):
    """Raised when the length-preserving multiplier has a vanishing denominator."""


@numba.njit(cache=True, fastmath=True, error_model="numpy")
def _speed(x, lam, preserve, d, ell, nx, ny, k, V):
    """Fill vertex frame and normal speed buffers; return the multiplier used."""
    n = x.shape[0]
    tx = np.empty(n)
    ty = np.empty(n)
    for i in range(n):
        j = i + 1
        if j == n:
            j = 0
        ex = x[j, 0] - x[i, 0]
        ey = x[j, 1] - x[i, 1]
        di = math.sqrt(ex * ex + ey * ey)
        d[i] = di
        tx[i] = ex / di
        ty[i] = ey / di
    p = n - 1
    for i in range(n):
        ell[i] = 0.5 * (d[p] + d[i])
        ax = tx[p] + tx[i]
        ay = ty[p] + ty[i]
        nt = math.sqrt(ax * ax + ay * ay)
        nx[i] = -ay / nt
        ny[i] = ax / nt
        k[i] = ((tx[i] - tx[p]) * nx[i] + (ty[i] - ty[p]) * ny[i]) / ell[i]
        p = i
    num = 0.0
    den = 0.0
    p = n - 1
    for i in range(n):
        q = i + 1
        if q == n:
            q = 0
        kss = ((k[q] - k[i]) / d[i] - (k[i] - k[p]) / d[p]) / ell[i]
        V[i] = -kss - 0.5 * k[i] ** 3
        num -= ell[i] * k[i] * V[i]
        den += ell[i] * k[i] * k[i]
        p = i
    if preserve:
        lam = num / den
    for i in range(n):
        V[i] += lam * k[i]
    return lam


@numba.njit(cache=True, fastmath=True, error_model="numpy")
def _advance(x, dt, lam, preserve, nsteps, omega):
    """Run ``nsteps`` explicit Euler steps in place; return (lam, sup |V|)."""
    n = x.shape[0]
    d = np.empty(n)
    ell = np.empty(n)
    nx = np.empty(n)
    ny = np.empty(n)
    k = np.empty(n)
    V = np.empty(n)
    lam_eff = lam
    vmax = 0.0
    for _ in range(nsteps):
        lam_eff = _speed(x, lam, preserve, d, ell, nx, ny, k, V)
        vmax = 0.0
        p = n - 1
        for i in range(n):
            v = dt * V[i]
            if abs(V[i]) > vmax:
                vmax = abs(V[i])
            # tangential slide towards equal edge lengths; the unit tangent is (ny, -nx)
            w = omega * 0.5 * (d[i] - d[p])
            x[i, 0] += v * nx[i] + w * ny[i]
            x[i, 1] += v * ny[i] - w * nx[i]
            p = i
    return lam_eff, vmax


def _frame(c, lam: float, preserve: bool):
    x = np.ascontiguousarray(as_curve(c).vertices, dtype=float)
    n = x.shape[0]
    bufs = [np.empty(n) for _ in range(6)]
    lam_eff = _speed(x, float(lam), bool(preserve), *bufs)
    d, ell, nx, ny, k, V = bufs
    return lam_eff, ell, np.column_stack([nx, ny]), k, V


def curvature_vectors(c) -> np.ndarray:
    """Discrete curvature vectors ``k_i N_i``; equals ``(T_i - T_{i-1}) / ell_i``."""
    _, _, N, k, _ = _frame(c, 0.0, False)
    return k[:, None] * N


def lambda_length_preserving(c) -> float:
    """Multiplier that keeps the discrete length stationary to first order."""
    _, ell, _, k, _ = _frame(c, 0.0, False)
    if float((ell * k * k).sum()) < ZERO_ENERGY:
        raise ZeroEnergyError("curve has (numerically) zero bending energy")
    lam, *_ = _frame(c, 0.0, True)
    return float(lam)


def velocity_field(c, lam: float) -> np.ndarray:
    """Per-vertex flow velocity ``V_i N_i`` for a fixed multiplier ``lam``."""
    _, _, N, _, V = _frame(c, lam, False)
    return V[:, None] * N


def penalized_energy(c, lam: float) -> float:
    c = as_curve(c)
    return elastic_energy(c) + lam * length(c)


def fit_circle(points) -> tuple:
    """Algebraic least-squares circle fit; returns (center, radius, rms residual)."""
    x = np.asarray(getattr(points, "vertices", points), dtype=float)
    A = np.column_stack([2 * x, np.ones(len(x))])
    b = (x**2).sum(axis=1)
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    center = sol[:2]
    radius = math.sqrt(sol[2] + center @ center)
    resid = np.hypot(*(x - center).T) - radius
    return center, radius, float(np.sqrt(np.mean(resid**2)))


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FlowConfig:
    """Time stepping parameters.

    ``dt=None`` picks ``DT_FACTOR * h_min**4`` from the initial curve.
    ``stop_tol=None`` means ``1e-6 * E0 / L0``.  ``record_every`` and
    ``monitor_every`` count steps between diagnostics and embeddedness checks.
    """

    mode: FlowMode = FlowMode.PRESERVE
    lam: float = 0.0
    dt: float | None = None
    max_steps: int = 10_000
    redistribution: Redistribution = Redistribution.EVERY_STEP
    stop_tol: float | None = None
    record_every: int = 100
    monitor_every: int = 10

    def __post_init__(self):
        object.__setattr__(self, "mode", FlowMode(self.mode))
        object.__setattr__(self, "redistribution", Redistribution(self.redistribution))
        if self.mode is FlowMode.PENALIZED and not self.lam >= 0:
            raise ValueError(f"penalized flow needs lam >= 0, got {self.lam}")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.max_steps < 0 or self.record_every < 1 or self.monitor_every < 1:
            raise ValueError("step counts must be positive")


@dataclass(frozen=True)
class FlowDiagnostics:
    step: int
    time: float
    energy: float
    length: float
    product: float
    lam: float
    penalized_energy: float
    embedded: bool | None
    circle_residual: float
    radius: float
    sup_velocity: float

    def as_dict(self) -> dict:
        return {
            "step": self.step,
            "time": self.time,
            "energy": self.energy,
            "length": self.length,
            "product": self.product,
            "lambda": self.lam,
            "penalized_energy": self.penalized_energy,
            "embedded": self.embedded,
            "circle_residual": self.circle_residual,
            "radius": self.radius,
            "sup_velocity": self.sup_velocity,
        }


@dataclass
class FlowState:
    curve: DiscreteCurve
    time: float = 0.0
    step: int = 0
    dt: float | None = None
    lam: float = 0.0
    history: list = field(default_factory=list)
    converged: bool = False
    violations: list = field(default_factory=list)

    @property
    def initial(self) -> FlowDiagnostics:
        return self.history[0]

    @property
    def final(self) -> FlowDiagnostics:
        return self.history[-1]


def _lyapunov(c: DiscreteCurve, config: FlowConfig) -> float:
    # the flow is the L2 gradient flow of E/2 + lam*L; with fixed length that is E/2
    if config.mode is FlowMode.PRESERVE:
        return elastic_energy(c)
    return 0.5 * elastic_energy(c) + config.lam * length(c)


def default_dt(c) -> float:
    return DT_FACTOR * float(as_curve(c).edge_lengths.min()) ** 4


def diagnose(c, step: int, time: float, lam: float, sup_velocity: float, monitor: bool = True) -> FlowDiagnostics:
    c = as_curve(c)
    E, L = elastic_energy(c), length(c)
    _, radius, resid = fit_circle(c)
    return FlowDiagnostics(
        step=step,
        time=time,
        energy=E,
        length=L,
        product=E * L,
        lam=lam,
        penalized_energy=E + lam * L,
        embedded=(not self_intersections(c)) if monitor else None,
        circle_residual=resid,
        radius=radius,
        sup_velocity=sup_velocity,
    )


def initial_state(c0, config: FlowConfig) -> FlowState:
    c0 = as_curve(c0)
    preserve = config.mode is FlowMode.PRESERVE
    lam, _, _, _, V = _frame(c0, config.lam, preserve)
    dt = config.dt if config.dt is not None else default_dt(c0)
    diag = diagnose(c0, 0, 0.0, lam if preserve else config.lam, float(np.abs(V).max()))
    return FlowState(curve=c0, dt=dt, lam=diag.lam, history=[diag])


def _try_advance(c: DiscreteCurve, dt: float, config: FlowConfig, nsteps: int):
    x = np.array(c.vertices, dtype=float)
    omega = REDISTRIBUTION_RELAXATION if config.redistribution is Redistribution.EVERY_STEP else 0.0
    lam, vmax = _advance(x, dt, float(config.lam), config.mode is FlowMode.PRESERVE, int(nsteps), omega)
    if not np.all(np.isfinite(x)):
        return None, lam, vmax
    try:
        return DiscreteCurve(x), lam, vmax
    except ValueError:
        return None, lam, vmax


def _advance_checked(state: FlowState, config: FlowConfig, nsteps: int, e_ref: float):
    """Advance with dt halving whenever the Lyapunov functional goes up."""
    f0 = _lyapunov(state.curve, config)
    dt = state.dt
    for _ in range(MAX_HALVINGS + 1):
        new, lam, vmax = _try_advance(state.curve, dt, config, nsteps)
        if new is not None and _lyapunov(new, config) <= f0 + ENERGY_RTOL * e_ref:
            return new, dt, lam, vmax
        log.debug("energy increase at step %d, halving dt=%g", state.step, dt)
        dt *= 0.5
    raise StepFailure(f"energy still increasing after {MAX_HALVINGS} dt halvings at step {state.step}")


def step(state: FlowState, config: FlowConfig) -> FlowState:
    """One explicit Euler step; returns a new state with a diagnostics record."""
    if state.dt is None:
        state = replace(state, dt=config.dt or default_dt(state.curve))
    e_ref = state.history[0].energy if state.history else elastic_energy(state.curve)
    new, dt, lam, vmax = _advance_checked(state, config, 1, e_ref)
    lam_rec = lam if config.mode is FlowMode.PRESERVE else config.lam
    diag = diagnose(new, state.step + 1, state.time + dt, lam_rec, vmax, monitor=True)
    return FlowState(
        curve=new,
        time=state.time + dt,
        step=state.step + 1,
        dt=dt,
        lam=lam_rec,
        history=state.history + [diag],
        converged=vmax < _stop_tol(state, config),
        violations=list(state.violations),
    )


def _stop_tol(state: FlowState, config: FlowConfig) -> float:
    if config.stop_tol is not None:
        return config.stop_tol
    d0 = state.history[0]
    return 1e-6 * d0.energy / d0.length


def theorem_hypothesis(c, config: FlowConfig) -> bool:
    """Whether the initial curve satisfies the energy bound that guarantees embeddedness."""
    c = as_curve(c)
    E, L = elastic_energy(c), length(c)
    c_star = constants().c_star
    if config.mode is FlowMode.PRESERVE:
        return E * L < c_star
    if config.lam <= 0:
        return False
    return (E + config.lam * L) ** 2 / (4 * config.lam) < c_star


def run(c0, config: FlowConfig, callback=None) -> FlowState:
    """Flow ``c0`` until ``sup |V| < stop_tol`` or ``max_steps`` steps.

    Diagnostics are recorded every ``record_every`` steps and at the end;
    embeddedness is checked every ``monitor_every`` steps.  A crossing found
    while the initial curve satisfies the embeddedness hypothesis is stored in
    ``state.violations``.
    """
    state = initial_state(c0, config)
    hypothesis = theorem_hypothesis(state.curve, config)
    tol = _stop_tol(state, config)
    e_ref = state.history[0].energy
    chunk = max(1, min(config.record_every, config.monitor_every))
    if callback is not None:
        callback(state, state.history[-1])
    while state.step < config.max_steps and not state.converged:
        nsteps = min(chunk, config.max_steps - state.step)
        new, dt, lam, vmax = _advance_checked(state, config, nsteps, e_ref)
        state.curve = new
        state.time += dt * nsteps
        state.step += nsteps
        state.dt = dt
        state.lam = lam if config.mode is FlowMode.PRESERVE else config.lam
        state.converged = vmax < tol
        record = state.step % config.record_every == 0 or state.converged or state.step >= config.max_steps
        monitor = state.step % config.monitor_every == 0 or record
        if monitor and not record:
            if self_intersections(new):
                _note_crossing(state, hypothesis)
        if record:
            diag = diagnose(new, state.step, state.time, state.lam, vmax, monitor=True)
            state.history.append(diag)
            if not diag.embedded:
                _note_crossing(state, hypothesis)
            if callback is not None:
                callback(state, diag)
    return state


def _note_crossing(state: FlowState, hypothesis: bool) -> None:
    if hypothesis:
        state.violations.append(state.step)
        log.error("self-intersection at step %d although the initial energy bound holds", state.step)
