"""Vessel flow solvers: the leading-order radius equation and the averaged system.

Leading order (dimensionless, ``R`` in units of ``R0``, ``x`` in units of ``L``)::

    R R_t = 1/16 (R^4 p_x)_x,    p = tau phi(R) - sigma R R_xx

is advanced for ``w = R^2`` in conservative form on a cell-centred grid,
``w_t = 1/8 (R^4 p_x)_x``, so ``int R^2 dx`` changes only through the two
boundary faces.  The boundary radius closes the curvature stencil through a
mirrored ghost cell and the prescribed pressure gradient sets the boundary
face flux directly.

Averaged system (SI units)::

    A_t + Q_x = 0
    Q_t + k (Q^2/A)_x = -(A/rho) p_x + 2 pi nu psi'(1) Q/A
    p = G phi(R/R0) - T R R_xx,    R = sqrt(A/pi)

with a Rusanov flux for the conservative part and a centred pressure
gradient.  ``k = 2 int psi^2 z dz`` is half the shape factor returned by
:func:`lymphflow.constitutive.shape_factor` (4/3 for Poiseuille); the
friction carries the ``pi`` that makes the steady state the Poiseuille law
``Q = -p_x pi R^4 / (8 rho nu)``.

Both solvers step with the three-stage SSP Runge-Kutta scheme.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize

from .constitutive import PowerLaw, PowerLawProfile, PressureLaw, shape_factor
from .errors import CollapseError, DomainError, ParameterError, StabilityError

log = logging.getLogger(__name__)

_DT_FLOOR = 1e-15


def _value(v, t):
    return float(v(t)) if callable(v) else float(v)


def _ssp_rk3(u, dt, rhs):
    """One Shu-Osher step; returns the new state and the stage weights' flux log."""
    k0, f0 = rhs(u, 0.0)
    u1 = u + dt * k0
    k1, f1 = rhs(u1, 1.0)
    u2 = 0.75 * u + 0.25 * (u1 + dt * k1)
    k2, f2 = rhs(u2, 0.5)
    new = u / 3.0 + 2.0 / 3.0 * (u2 + dt * k2)
    flux = (f0 + f1) / 6.0 + 2.0 / 3.0 * f2
    return new, flux


def _output_times(t_end, save_dt):
    if save_dt is None:
        return [t_end]
    if not save_dt > 0:
        raise ParameterError("save_dt must be positive", field="save_dt")
    n = int(math.floor(t_end / save_dt + 1e-9))
    ts = [k * save_dt for k in range(1, n + 1)]
    if not ts or t_end - ts[-1] > 1e-12 * t_end:
        ts.append(t_end)
    return ts


# ---------------------------------------------------------------------------
# leading-order radius equation


@dataclass(frozen=True)
class LeadingOrderConfig:
    """Dimensionless parameters of the leading-order equation.

    ``tension=False`` drops the ``sigma`` term (arteries, veins).
    """

    tau: float
    sigma: float = 0.0
    law: PressureLaw = field(default_factory=PowerLaw)
    length: float = 1.0
    cfl: float = 0.1
    tension: bool = True

    def __post_init__(self):
        if not self.tau > 0:
            raise ParameterError("tau must be positive", field="tau")
        if not self.sigma >= 0:
            raise ParameterError("sigma must be nonnegative", field="sigma")
        if not (self.length > 0 and self.cfl > 0):
            raise ParameterError("length and cfl must be positive")

    @property
    def sigma_eff(self) -> float:
        return self.sigma if self.tension else 0.0


@dataclass(frozen=True)
class LeadingOrderBC:
    """Boundary radii and pressure gradients at ``x = 0`` and ``x = length``.

    Each entry is a number or a callable of time.
    """

    r_left: float | Callable = 1.0
    r_right: float | Callable = 1.0
    grad_left: float | Callable = 0.0
    grad_right: float | Callable = 0.0


@dataclass
class VesselState:
    t: float
    x: np.ndarray
    R: np.ndarray
    A: np.ndarray | None = None
    Q: np.ndarray | None = None


@dataclass
class SolverResult:
    states: list
    steps: int
    dt_last: float
    boundary_inflow: float = 0.0     # time-integrated flux through the left face
    boundary_outflow: float = 0.0    # time-integrated flux through the right face
    valve_events: list = field(default_factory=list)

    @property
    def final(self) -> VesselState:
        return self.states[-1]


def cell_centres(n: int, length: float) -> np.ndarray:
    dx = length / n
    return (np.arange(n) + 0.5) * dx


def _lo_fluxes(w, t, cfg, bc, dx):
    if np.any(~(w > 0)):
        raise CollapseError("nonpositive radius in leading-order solver", snapshot=np.sqrt(np.clip(w, 0, None)))
    R = np.sqrt(w)
    rl, rr = _value(bc.r_left, t), _value(bc.r_right, t)
    Rg = np.concatenate(([2.0 * rl - R[0]], R, [2.0 * rr - R[-1]]))
    p = cfg.tau * np.asarray(cfg.law.phi(R), dtype=float)
    sig = cfg.sigma_eff
    if sig:
        p = p - sig * R * (Rg[2:] - 2.0 * R + Rg[:-2]) / dx ** 2
    Rf = 0.5 * (R[1:] + R[:-1])
    inner = Rf ** 4 * (p[1:] - p[:-1]) / dx / 8.0
    left = rl ** 4 * _value(bc.grad_left, t) / 8.0
    right = rr ** 4 * _value(bc.grad_right, t) / 8.0
    return np.concatenate(([left], inner, [right]))


def leading_order_dt(R, cfg: LeadingOrderConfig, dx: float) -> float:
    """``cfl * min(dx^2 / max(R^4 tau |phi'|), dx^4 / max(R^4 sigma))``."""
    r4 = np.max(R) ** 4
    diff = np.max(R ** 4 * cfg.tau * np.abs(cfg.law.dphi(R)))
    bounds = [cfg.cfl * dx ** 2 / diff] if diff > 0 else []
    if cfg.sigma_eff:
        bounds.append(cfg.cfl * dx ** 4 / (r4 * cfg.sigma_eff))
    return min(bounds) if bounds else math.inf


def solve_leading_order(R0, bc: LeadingOrderBC, cfg: LeadingOrderConfig, t_end: float,
                        save_dt: float | None = None, dt: float | None = None) -> SolverResult:
    """Advance the leading-order radius equation to ``t_end``.

    Parameters
    ----------
    R0
        Initial radius at the cell centres ``(i + 1/2) length / n``.
    bc
        Boundary radii and pressure gradients.
    save_dt
        Snapshot spacing; by default only the final state is kept.
    dt
        Fixed step; must not exceed the stability bound.

    Returns
    -------
    SolverResult
        ``boundary_inflow``/``boundary_outflow`` integrate ``-(1/8) R^4 p_x``
        at the left and right faces, so ``int R^2 dx`` changes by their difference.
    """
    R = np.asarray(R0, dtype=float).copy()
    if R.ndim != 1 or R.size < 3:
        raise ParameterError("initial radius must be a 1-D array with at least 3 cells")
    if np.any(~(R > 0)):
        raise CollapseError("initial radius must be positive", snapshot=R)
    n = R.size
    dx = cfg.length / n
    x = cell_centres(n, cfg.length)
    w = R ** 2
    t, steps = 0.0, 0
    inflow = outflow = 0.0
    states = [VesselState(t=0.0, x=x, R=R.copy())]

    for t_out in _output_times(t_end, save_dt):
        while t < t_out:
            bound = leading_order_dt(np.sqrt(w), cfg, dx)
            if dt is not None:
                if dt > bound * (1 + 1e-12):
                    raise StabilityError(f"dt = {dt:.3g} exceeds the stability bound {bound:.3g}")
                h = dt
            else:
                h = bound
            h = min(h, t_out - t)
            if h < _DT_FLOOR * max(1.0, t_end) and t_out - t > _DT_FLOOR * max(1.0, t_end):
                raise StabilityError(f"time step underflow (dt = {h:.3g}) at t = {t:.6g}")
            t_now = t

            def rhs(u, frac, t_now=t_now, h=h):
                flux = _lo_fluxes(u, t_now + frac * h, cfg, bc, dx)
                return (flux[1:] - flux[:-1]) / dx, np.array([flux[0], flux[-1]])

            w, fl = _ssp_rk3(w, h, rhs)
            if np.any(~(w > 0)):
                raise CollapseError(f"radius collapsed at t = {t + h:.6g}", snapshot=np.sqrt(np.clip(w, 0, None)))
            # face flux F = R^4 p_x / 8 enters w_t = F_x; outward flux at the left face is F
            inflow += -h * fl[0]
            outflow += -h * fl[1]
            t = t_now + h if t_out - (t_now + h) > 1e-9 * h else t_out
            steps += 1
        states.append(VesselState(t=t, x=x, R=np.sqrt(w)))
    return SolverResult(states=states, steps=steps, dt_last=h if steps else 0.0,
                        boundary_inflow=inflow, boundary_outflow=outflow)


def leading_order_mass(R, length: float) -> float:
    """Discrete ``int R^2 dx`` on the cell-centred grid."""
    R = np.asarray(R, dtype=float)
    return float(np.sum(R ** 2) * length / R.size)


# ---------------------------------------------------------------------------
# valves


class Side(str, enum.Enum):
    INLET = "inlet"
    OUTLET = "outlet"


class Activation(str, enum.Enum):
    HEAVISIDE = "heaviside"
    SIGMOID = "sigmoid"


class Trigger(str, enum.Enum):
    PRESSURE_DROP = "pressure"
    CALCIUM = "calcium"


@dataclass(frozen=True)
class ValveBC:
    """Valve boundary radius switching between ``r_minus`` (closed) and ``r_plus`` (open).

    ``PRESSURE_DROP``: ``R = r_- + (r_+ - r_-) f(dp - threshold)`` with
    ``dp`` the upstream-minus-downstream pressure across the valve, using
    ``external_pressure`` on the outside.  ``CALCIUM``:
    ``R = r_- + (r_+ - r_-) (1 - f(C - threshold))`` with ``C(t)``
    interpolated from the ``calcium`` series ``(times, values)``.
    """

    side: Side
    r_minus: float
    r_plus: float
    threshold: float = 0.0
    activation: Activation = Activation.HEAVISIDE
    steepness: float = 1.0
    trigger: Trigger = Trigger.PRESSURE_DROP
    external_pressure: float = 0.0
    calcium: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "side", Side(self.side))
        object.__setattr__(self, "activation", Activation(self.activation))
        object.__setattr__(self, "trigger", Trigger(self.trigger))
        if not 0 < self.r_minus < self.r_plus:
            raise ParameterError("valve radii need 0 < r_minus < r_plus", field="r_minus")
        if not self.steepness > 0:
            raise ParameterError("sigmoid steepness must be positive", field="steepness")
        if self.trigger == Trigger.CALCIUM:
            if self.calcium is None:
                raise ParameterError("calcium trigger needs a (times, values) series", field="calcium")
            ts, cs = (np.asarray(a, dtype=float) for a in self.calcium)
            if ts.shape != cs.shape or ts.size < 1 or np.any(np.diff(ts) <= 0):
                raise ParameterError("calcium series must have increasing times and matching values",
                                     field="calcium")
            object.__setattr__(self, "calcium", (ts, cs))

    def activation_value(self, s: float) -> float:
        if self.activation == Activation.HEAVISIDE:
            return 1.0 if s > 0 else 0.0
        return 0.5 * (1.0 + math.tanh(0.5 * self.steepness * s))

    def calcium_at(self, t: float) -> float:
        ts, cs = self.calcium
        return float(np.interp(t, ts, cs))


def valve_radius(bc: ValveBC, trigger_value: float) -> float:
    """Boundary radius for a trigger value (``dp`` or ``C``)."""
    f = bc.activation_value(trigger_value - bc.threshold)
    if bc.trigger == Trigger.CALCIUM:
        f = 1.0 - f
    return bc.r_minus + (bc.r_plus - bc.r_minus) * f


# ---------------------------------------------------------------------------
# averaged area-flux system


@dataclass(frozen=True)
class PressureBC:
    side: Side
    pressure: float | Callable

    def __post_init__(self):
        object.__setattr__(self, "side", Side(self.side))


@dataclass(frozen=True)
class VesselConfig:
    """Vessel parameters (SI) for the averaged solver.

    ``T`` is the wall tension coefficient in Pa: ``T R R_xx`` is a pressure.
    """

    length: float
    rho: float
    nu: float
    G: float
    R0: float
    T: float = 0.0
    law: PressureLaw = field(default_factory=PowerLaw)
    profile: object = field(default_factory=lambda: PowerLawProfile(2.0))
    tension: bool = False
    cfl: float = 0.5

    def __post_init__(self):
        for name in ("length", "rho", "nu", "G", "R0", "cfl"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive", field=name)
        if not self.T >= 0:
            raise ParameterError("T must be nonnegative", field="T")

    @property
    def momentum_coefficient(self) -> float:
        """Coefficient of ``(Q^2/A)_x``: ``2 int psi^2 z dz``."""
        return 0.5 * shape_factor(self.profile)

    @property
    def wall_slope(self) -> float:
        return float(self.profile.wall_slope())

    @property
    def tension_eff(self) -> float:
        return self.T if self.tension else 0.0

    def elastic_pressure(self, R):
        return self.G * np.asarray(self.law.phi(np.asarray(R) / self.R0), dtype=float)

    def wave_speed_sq(self, R):
        """Linearized ``c^2 = (A/rho) dp/dA = G R phi'(R/R0) / (2 rho R0)``."""
        R = np.asarray(R, dtype=float)
        return self.G * R * np.asarray(self.law.dphi(R / self.R0), dtype=float) / (2.0 * self.rho * self.R0)

    def radius_for_pressure(self, p: float) -> float:
        """Radius whose elastic pressure equals ``p`` (``phi`` assumed increasing)."""
        target = p / self.G
        g = lambda z: float(self.law.phi(z)) - target
        lo, hi = 1.0, 1.0
        while g(lo) > 0:
            lo *= 0.5
            if lo < 1e-8:
                raise DomainError(f"no radius gives pressure {p} Pa (wall collapse)")
        while g(hi) < 0:
            hi *= 2.0
            if hi > 1e8:
                raise DomainError(f"no radius gives pressure {p} Pa")
        if g(lo) == 0:
            return lo * self.R0
        if g(hi) == 0:
            return hi * self.R0
        z = optimize.brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        return z * self.R0


def _boundary(bc, t, R_edge, p_edge, cfg):
    """Boundary radius and pressure at the face for one side."""
    if isinstance(bc, PressureBC):
        pb = _value(bc.pressure, t)
        return cfg.radius_for_pressure(pb), pb
    if bc.trigger == Trigger.CALCIUM:
        trig = bc.calcium_at(t)
    elif bc.side == Side.INLET:
        trig = bc.external_pressure - p_edge
    else:
        trig = p_edge - bc.external_pressure
    Rb = valve_radius(bc, trig)
    return Rb, float(cfg.elastic_pressure(Rb))


class _Averaged:
    def __init__(self, cfg: VesselConfig, bcs, dx):
        self.cfg, self.dx = cfg, dx
        self.left, self.right = bcs
        self.k = cfg.momentum_coefficient
        self.fric = 2.0 * math.pi * cfg.nu * cfg.wall_slope
        self.valve_state = {}

    def rhs(self, A, Q, t):
        cfg, dx = self.cfg, self.dx
        if np.any(~(A > 0)):
            raise CollapseError("nonpositive area in averaged solver", snapshot=(A.copy(), Q.copy()))
        R = np.sqrt(A / math.pi)
        pe = cfg.elastic_pressure(R)
        Rl, pl = _boundary(self.left, t, R[0], pe[0], cfg)
        Rr, pr = _boundary(self.right, t, R[-1], pe[-1], cfg)
        self.boundary = (Rl, Rr)
        Rg = np.concatenate(([2.0 * Rl - R[0]], R, [2.0 * Rr - R[-1]]))
        if Rg[0] <= 0 or Rg[-1] <= 0:
            raise CollapseError("ghost radius nonpositive: boundary radius too small for the edge cell",
                                snapshot=(A.copy(), Q.copy()))
        p = pe
        T = cfg.tension_eff
        if T:
            p = pe - T * R * (Rg[2:] - 2.0 * R + Rg[:-2]) / dx ** 2
        pg = np.concatenate(([2.0 * pl - p[0]], p, [2.0 * pr - p[-1]]))
        p_x = (pg[2:] - pg[:-2]) / (2.0 * dx)

        Ag = math.pi * Rg ** 2
        Qg = np.concatenate(([Q[0]], Q, [Q[-1]]))
        Ug = Qg / Ag
        c2 = np.abs(cfg.wave_speed_sq(Rg))
        speed = np.abs(self.k * Ug) + np.sqrt(c2 + np.abs(self.k * (self.k - 1.0)) * Ug ** 2)
        s = np.maximum(speed[1:], speed[:-1])
        fa = 0.5 * (Qg[1:] + Qg[:-1]) - 0.5 * s * (Ag[1:] - Ag[:-1])
        mom = self.k * Qg * Ug
        fq = 0.5 * (mom[1:] + mom[:-1]) - 0.5 * s * (Qg[1:] - Qg[:-1])

        dA = -(fa[1:] - fa[:-1]) / dx
        dQ = -(fq[1:] - fq[:-1]) / dx - A / cfg.rho * p_x + self.fric * Q / A
        return dA, dQ, np.array([fa[0], fa[-1]])

    def max_dt(self, A, Q):
        cfg, dx = self.cfg, self.dx
        R = np.sqrt(A / math.pi)
        U = Q / A
        c2 = np.abs(cfg.wave_speed_sq(R))
        speed = np.max(np.abs(self.k * U) + np.sqrt(c2 + abs(self.k * (self.k - 1.0)) * U ** 2))
        bounds = [dx / speed] if speed > 0 else []
        T = cfg.tension_eff
        if T:
            bounds.append(dx ** 2 / (4.0 * np.sqrt(T * np.max(R) ** 2 / (2.0 * cfg.rho))))
        if self.fric:
            bounds.append(np.min(A) / abs(self.fric))
        return cfg.cfl * min(bounds) if bounds else math.inf


def _check_bcs(bcs):
    if len(bcs) != 2:
        raise ParameterError("give exactly two boundary conditions (inlet, outlet)")
    for bc, side in zip(bcs, (Side.INLET, Side.OUTLET)):
        if not isinstance(bc, (PressureBC, ValveBC)):
            raise ParameterError(f"unsupported boundary condition {bc!r}")
        if bc.side != side:
            raise ParameterError(f"boundary conditions must be ordered (inlet, outlet), got {bc.side.value} "
                                 f"in the {side.value} slot")


def solve_averaged(A0, Q0, bcs, cfg: VesselConfig, t_end: float, save_dt: float | None = None,
                   dt: float | None = None) -> SolverResult:
    """Advance the averaged area-flux system to ``t_end``.

    Parameters
    ----------
    A0, Q0
        Initial area and flux at the cell centres ``(i + 1/2) L / n``.
    bcs
        ``(inlet, outlet)``, each a :class:`PressureBC` or :class:`ValveBC`.
    dt
        Fixed step; raises :class:`StabilityError` if above the bound.

    Returns
    -------
    SolverResult
        ``boundary_inflow``/``boundary_outflow`` are the time integrals of the
        numerical mass flux at the inlet and outlet faces, so that
        ``sum(A) dx`` changes by exactly their difference.
    """
    _check_bcs(bcs)
    A = np.asarray(A0, dtype=float).copy()
    Q = np.asarray(Q0, dtype=float).copy()
    if A.ndim != 1 or A.shape != Q.shape or A.size < 3:
        raise ParameterError("A0 and Q0 must be 1-D arrays of equal length (>= 3)")
    if np.any(~(A > 0)):
        raise CollapseError("initial area must be positive", snapshot=(A, Q))
    if np.any(cfg.wave_speed_sq(np.sqrt(A / math.pi)) < 0):
        raise DomainError("pressure law decreases at the initial radius: the system is not hyperbolic there")
    n = A.size
    dx = cfg.length / n
    x = cell_centres(n, cfg.length)
    solver = _Averaged(cfg, bcs, dx)
    U = np.concatenate([A, Q])
    t, steps, h = 0.0, 0, 0.0
    inflow = outflow = 0.0
    events = []
    solver.rhs(A, Q, 0.0)
    open_state = _valve_open(bcs, solver.boundary)
    states = [VesselState(t=0.0, x=x, R=np.sqrt(A / math.pi), A=A.copy(), Q=Q.copy())]

    for t_out in _output_times(t_end, save_dt):
        while t < t_out:
            bound = solver.max_dt(U[:n], U[n:])
            if dt is not None:
                if dt > bound * (1 + 1e-12):
                    raise StabilityError(f"dt = {dt:.3g} exceeds the stability bound {bound:.3g}")
                h = dt
            else:
                h = bound
            h = min(h, t_out - t)
            if h < _DT_FLOOR * max(1.0, t_end) and t_out - t > _DT_FLOOR * max(1.0, t_end):
                raise StabilityError(f"time step underflow (dt = {h:.3g}) at t = {t:.6g}")
            t_now = t

            def rhs(u, frac, t_now=t_now, h=h):
                dA, dQ, fb = solver.rhs(u[:n], u[n:], t_now + frac * h)
                return np.concatenate([dA, dQ]), fb

            U, fb = _ssp_rk3(U, h, rhs)
            if np.any(~(U[:n] > 0)):
                raise CollapseError(f"area collapsed at t = {t + h:.6g}", snapshot=(U[:n].copy(), U[n:].copy()))
            inflow += h * fb[0]
            outflow += h * fb[1]
            t = t_now + h if t_out - (t_now + h) > 1e-9 * h else t_out
            steps += 1
            if any(isinstance(bc, ValveBC) for bc in bcs):
                solver.rhs(U[:n], U[n:], t)
                now = _valve_open(bcs, solver.boundary)
                for side, before, after in zip((Side.INLET, Side.OUTLET), open_state, now):
                    if before is not None and before != after:
                        ev = (float(t), side.value, "open" if after else "closed")
                        events.append(ev)
                        log.info("valve %s %s at t = %.6g s", side.value, ev[2], t)
                open_state = now
        A, Q = U[:n], U[n:]
        states.append(VesselState(t=t, x=x, R=np.sqrt(A / math.pi), A=A.copy(), Q=Q.copy()))
    return SolverResult(states=states, steps=steps, dt_last=h, boundary_inflow=inflow,
                        boundary_outflow=outflow, valve_events=events)


def _valve_open(bcs, radii):
    """Open if the boundary radius is above the valve midpoint; ``None`` for pressure BCs."""
    out = []
    for bc, r in zip(bcs, radii):
        out.append(r > 0.5 * (bc.r_minus + bc.r_plus) if isinstance(bc, ValveBC) else None)
    return out


def averaged_mass(A, length: float) -> float:
    A = np.asarray(A, dtype=float)
    return float(np.sum(A) * length / A.size)


def poiseuille_flux(R, p_x, rho, nu) -> float:
    """Steady throughput ``-p_x pi R^4 / (8 rho nu)``."""
    return -p_x * math.pi * R ** 4 / (8.0 * rho * nu)


# ---------------------------------------------------------------------------
# two equivalent forms of the averaged equations


def _d(f, dx, order=1):
    for _ in range(order):
        f = np.gradient(f, dx, edge_order=2)
    return f


def averaged_rhs_aq(A, Q, dx, cfg: VesselConfig, coefficient: float | None = None):
    """Pointwise ``(A_t, Q_t)`` of the area-flux form from finite differences."""
    k = cfg.momentum_coefficient if coefficient is None else coefficient
    R = np.sqrt(A / math.pi)
    p = cfg.elastic_pressure(R) - cfg.tension_eff * R * _d(R, dx, 2)
    A_t = -_d(Q, dx)
    Q_t = -k * _d(Q * Q / A, dx) - A / cfg.rho * _d(p, dx) + 2.0 * math.pi * cfg.nu * cfg.wall_slope * Q / A
    return A_t, Q_t


def averaged_rhs_ur(R, U, dx, cfg: VesselConfig, coefficient: float | None = None):
    """Pointwise ``((R^2)_t, (U R^2)_t)`` of the radius-velocity form.

    ``p_x = (G/R0) phi'(R/R0) R_x - T (R_x R_xx + R R_xxx)``.
    """
    k = cfg.momentum_coefficient if coefficient is None else coefficient
    R_x, R_xx, R_xxx = _d(R, dx), _d(R, dx, 2), _d(R, dx, 3)
    T = cfg.tension_eff
    p_x = cfg.G / cfg.R0 * np.asarray(cfg.law.dphi(R / cfg.R0)) * R_x - T * (R_x * R_xx + R * R_xxx)
    r2_t = -_d(U * R ** 2, dx)
    ur2_t = -k * _d(U ** 2 * R ** 2, dx) - R ** 2 / cfg.rho * p_x + 2.0 * cfg.nu * cfg.wall_slope * U
    return r2_t, ur2_t
