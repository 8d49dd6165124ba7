"""Event-detecting simulation of the discontinuous kinetics.

Each smooth piece is integrated with the embedded Runge-Kutta 4(5) pair of
:func:`scipy.integrate.solve_ivp`; a terminal event on ``C - level`` stops the
piece, the crossing is classified from the fields on both sides, and the
integration restarts on the other side.  Event times are located by Brent's
method on the dense-output interpolant.

Conventions for the non-generic cases:

* a trajectory that reaches the line where the field on the far side points
  back (a tangency or the end of a repelling segment) keeps its incoming
  field and a ``TangencyGraze`` event is logged;
* a start exactly on a repelling segment uses the lower field F1;
* with two thresholds the C-rate is continuous across the NO line ``C = theta``
  and trajectories can spiral into the point where it vanishes, with event
  times accumulating.  Once the C-rate at an event is below ``zeno_tol`` the
  state is set to that point, a ``SlidingEntry`` event is logged and the
  trajectory stays there (it is a Filippov equilibrium).  The jump in N is
  about ``zeno_tol / (alpha theta)``; the spiral closes in slowly, so each
  factor of ten in ``zeno_tol`` costs roughly ten times as many events.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, EventResolutionError, ParameterError, UnsupportedConfigurationError
from .filippov import Field, State, f1, f2, lie1
from .params import NondimParams


class EventKind(str, enum.Enum):
    CROSS_UP = "CrossUp"
    CROSS_DOWN = "CrossDown"
    TANGENCY_GRAZE = "TangencyGraze"
    SLIDING_ENTRY = "SlidingEntry"
    SLIDING_EXIT = "SlidingExit"


@dataclass(frozen=True)
class IntegratorConfig:
    step: float = 1e-3
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    event_tol: float = 1e-10
    max_time: float = 50.0
    max_step: float = math.inf
    max_events: int = 100_000
    zeno_tol: float = 1e-4

    def __post_init__(self):
        for name in ("step", "rel_tol", "abs_tol", "event_tol", "max_time", "max_step"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive", field=name)
        if not self.event_tol < self.abs_tol * 1e3:
            raise ParameterError("event_tol must be below 1000 * abs_tol", field="event_tol")


@dataclass(frozen=True)
class Event:
    t: float
    kind: EventKind
    state: State
    level: float = 1.0


@dataclass
class Trajectory:
    t: np.ndarray
    states: np.ndarray          # shape (len(t), 2): columns N, C
    fields: list                # active field label per sample
    events: list = field(default_factory=list)

    @property
    def n(self):
        return self.states[:, 0]

    @property
    def c(self):
        return self.states[:, 1]

    @property
    def final_state(self) -> State:
        return State(*self.states[-1])

    def events_of(self, kind: EventKind, level: float | None = None) -> list:
        return [e for e in self.events if e.kind == kind and (level is None or e.level == level)]


def _label(above_ca, above_no):
    base = "F2" if above_ca else "F1"
    if above_ca == above_no:
        return base
    return base + ("|N+" if above_no else "|N-")


def _c_rate(n, c, p, on_ca):
    return -p.alpha * (1 + n) * c + p.beta + (p.gamma if on_ca else 0.0)


def _choose_side(n, c, p, flags, idx, kinds, incoming=None):
    """Side (True = above) to continue on at manifold ``idx``, plus a graze flag."""
    lo, hi = list(flags), list(flags)
    lo[idx], hi[idx] = False, True
    rate_lo = _c_rate(n, c, p, _ca_on(lo, kinds))
    rate_hi = _c_rate(n, c, p, _ca_on(hi, kinds))
    if rate_hi > 0 and rate_lo >= 0:
        return True, False
    if rate_lo < 0 and rate_hi <= 0:
        return False, False
    # the fields disagree: repelling contact, tangency or (for gamma < 0) sliding
    if incoming is None:
        return False, False
    return incoming, True


def _ca_on(flags, kinds):
    return any(f for f, k in zip(flags, kinds) if k in ("ca", "both"))


def _no_on(flags, kinds):
    return any(f for f, k in zip(flags, kinds) if k in ("no", "both"))


def _dip_step(y, p, src_ca, src_no):
    """A tenth of the time a trajectory leaving a line needs to come back.

    With C-rate ``r`` and its derivative ``r'`` of opposite signs the excursion
    lasts about ``2|r/r'|``; a first step that short keeps the return
    crossing out of the first step, where it could not be bracketed.
    """
    n, c = float(y[0]), float(y[1])
    a = float(p.alpha)
    r = -a * (1.0 + n) * c + float(p.beta) + src_ca
    dr = -a * c * (-n + src_no) - a * (1.0 + n) * r
    if r * dr < 0:
        return max(0.1 * abs(r / dr), 1e-12)
    return math.inf


def _two_fold(y, p, flags, kinds, cfg):
    """Near the point of the NO line where the (continuous) C-rate vanishes,
    with the N-components of the two sides pointing towards each other."""
    n, c = y
    rate = _c_rate(n, c, p, _ca_on(flags, kinds))
    return abs(rate) <= cfg.zeno_tol and 0.0 < n < float(p.zeta)


def _run(x0, p: NondimParams, cfg: IntegratorConfig, levels, kinds) -> Trajectory:
    n0, c0 = float(x0[0]), float(x0[1])
    if n0 < 0 or c0 < 0:
        raise DomainError("initial state must lie in the nonnegative quadrant")
    a, b, g, z = float(p.alpha), float(p.beta), float(p.gamma), float(p.zeta)

    flags = [c0 > lev for lev in levels]
    for i, lev in enumerate(levels):
        if c0 == lev:
            flags[i], _ = _choose_side(n0, c0, p, flags, i, kinds)

    t0, y0 = 0.0, np.array([n0, c0])
    ts, ys, labels, events = [np.array([0.0])], [y0[:, None]], [_label(_ca_on(flags, kinds), _no_on(flags, kinds))], []
    stalls = 0
    while t0 < cfg.max_time and len(events) < cfg.max_events:
        src_ca = g if _ca_on(flags, kinds) else 0.0
        src_no = z if _no_on(flags, kinds) else 0.0

        def rhs(t, y, src_ca=src_ca, src_no=src_no):
            return [-y[0] + src_no, -a * (1.0 + y[0]) * y[1] + b + src_ca]

        evs = []
        for i, lev in enumerate(levels):
            d = -1 if flags[i] else 1

            # a few-ulp hysteresis: a restart sitting on the line is not itself a
            # root, and the located state is snapped back onto the line below
            eta = 8.0 * np.finfo(float).eps * max(1.0, abs(lev))

            def ev(t, y, lev=lev, shift=d * eta):
                return y[1] - lev + shift
            ev.terminal = True
            ev.direction = d
            evs.append(ev)
        first = min(cfg.step, cfg.max_time - t0)
        if any(y0[1] == lev for lev in levels):
            first = min(first, _dip_step(y0, p, src_ca, src_no))
        sol = solve_ivp(rhs, (t0, cfg.max_time), y0, method="RK45", rtol=cfg.rel_tol,
                        atol=cfg.abs_tol, first_step=first,
                        max_step=cfg.max_step, events=evs)
        if sol.status == -1:
            raise EventResolutionError(f"integration failed: {sol.message}",
                                       state=State(*sol.y[:, -1]), t=float(sol.t[-1]))
        label = _label(_ca_on(flags, kinds), _no_on(flags, kinds))
        ts.append(sol.t[1:])
        ys.append(sol.y[:, 1:])
        labels.extend([label] * (len(sol.t) - 1))
        if sol.status == 0:
            break

        hit = [i for i, te in enumerate(sol.t_events) if len(te)]
        i = min(hit, key=lambda k: sol.t_events[k][0])
        t_ev = float(sol.t_events[i][0])
        y_ev = np.array(sol.y_events[i][0], dtype=float)
        lev = levels[i]
        if abs(y_ev[1] - lev) > cfg.event_tol:
            raise EventResolutionError("event state off the switching line", state=State(*y_ev), t=t_ev)
        y_ev[1] = lev
        y_ev = np.where((y_ev < 0) & (y_ev >= -cfg.abs_tol), 0.0, y_ev)
        stalls = stalls + 1 if t_ev - t0 <= 1e-12 else 0
        if stalls > 100:
            raise EventResolutionError("events do not advance in time (chattering)", state=State(*y_ev), t=t_ev)

        if kinds[i] == "no" and _two_fold(y_ev, p, flags, kinds, cfg):
            # spiral into the two-fold of the NO line: the Filippov solution
            # reaches the fold equilibrium in finite time and stays there
            n_e = (b + (g if _ca_on(flags, kinds) else 0.0)) / (a * lev) - 1.0
            x_e = State(n_e, lev)
            events.append(Event(t=t_ev, kind=EventKind.SLIDING_ENTRY, state=x_e, level=lev))
            if ts[-1].size and ts[-1][-1] == t_ev:
                ys[-1][:, -1] = x_e
                labels[-1] = "Sliding"
            if t_ev < cfg.max_time:
                ts.append(np.array([cfg.max_time]))
                ys.append(np.array([[n_e], [lev]]))
                labels.append("Sliding")
            break

        was_above = flags[i]
        side, graze = _choose_side(y_ev[0], y_ev[1], p, flags, i, kinds, incoming=was_above)
        if graze or side == was_above:
            kind = EventKind.TANGENCY_GRAZE
        else:
            kind = EventKind.CROSS_UP if side else EventKind.CROSS_DOWN
        flags[i] = side
        events.append(Event(t=t_ev, kind=kind, state=State(*y_ev), level=lev))
        # the event point itself closes the previous piece
        if ts[-1].size and ts[-1][-1] == t_ev:
            ys[-1][:, -1] = y_ev
        t0, y0 = t_ev, y_ev

    return Trajectory(t=np.concatenate(ts), states=np.concatenate(ys, axis=1).T,
                      fields=labels, events=events)


def simulate(x0, p: NondimParams, cfg: IntegratorConfig | None = None) -> Trajectory:
    """Integrate the single-threshold system (F1 below ``C = 1``, F2 above)."""
    if p.theta != 1:
        raise UnsupportedConfigurationError("simulate needs theta == 1; use simulate_two_threshold")
    return _run(x0, p, cfg or IntegratorConfig(), levels=[1.0], kinds=["both"])


def simulate_two_threshold(x0, p: NondimParams, cfg: IntegratorConfig | None = None) -> Trajectory:
    """Integrate with separate thresholds: Ca2+ source at ``C = 1``, NO source at ``C = theta``.

    With ``theta == 1`` the two lines coincide and this reduces to :func:`simulate`.
    """
    cfg = cfg or IntegratorConfig()
    theta = float(p.theta)
    if theta == 1.0:
        return _run(x0, p, cfg, levels=[1.0], kinds=["both"])
    if theta == 0.0:
        # H(C - 0) is identically one on the open quadrant: a level out of reach
        return _run(x0, p, cfg, levels=[1.0, -1.0], kinds=["ca", "no"])
    return _run(x0, p, cfg, levels=[1.0, theta], kinds=["ca", "no"])


def sliding_field(x, p: NondimParams) -> tuple:
    """Filippov convex combination ``F1 + lam (F2 - F1)`` tangent to ``C = 1``."""
    if x[1] != 1:
        raise DomainError("sliding field is defined on the switching line C = 1 only")
    l1 = lie1(x, p, Field.F1)
    l2 = lie1(x, p, Field.F2)
    if l2 == l1:
        raise DomainError("degenerate convex combination: both fields have equal normal components")
    lam = -l1 / (l2 - l1)
    v1, v2 = f1(x, p), f2(x, p)
    return (v1[0] + lam * (v2[0] - v1[0]), v1[1] + lam * (v2[1] - v1[1]))


def sliding_weight(x, p: NondimParams):
    l1 = lie1(x, p, Field.F1)
    l2 = lie1(x, p, Field.F2)
    return -l1 / (l2 - l1)


def arc_durations(traj: Trajectory) -> list:
    """``(field, n_start, n_end, duration)`` for each arc between consecutive crossings."""
    crossings = [e for e in traj.events if e.kind in (EventKind.CROSS_UP, EventKind.CROSS_DOWN)]
    out = []
    for e0, e1 in zip(crossings[:-1], crossings[1:]):
        fld = Field.F2 if e0.kind == EventKind.CROSS_UP else Field.F1
        out.append((fld, e0.state.n, e1.state.n, e1.t - e0.t))
    return out
