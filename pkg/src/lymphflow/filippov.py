"""Piecewise-smooth (Filippov) structure of the Ca2+/NO oscillator.

The scaled kinetics with equal thresholds read, with ``x = (N, C)``::

    F1(x) = (-N,         -alpha (N+1) C + beta)           for C < 1
    F2(x) = (-N + zeta,  -alpha (N+1) C + beta + gamma)   for C > 1

separated by the switching line ``H(x) = C - 1 = 0``.  Everything here is
plain arithmetic, so :class:`fractions.Fraction` parameters give exact
classifications on boundary cases.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import UnsupportedConfigurationError
from .params import NondimParams


class State(NamedTuple):
    """Point ``(n, c)``: NO (scaled by 1/m) and Ca2+ (scaled by C_shear)."""

    n: float
    c: float


class Field(str, enum.Enum):
    F1 = "F1"
    F2 = "F2"
    SLIDING = "Sliding"


class Region(str, enum.Enum):
    CROSSING = "Crossing"
    ATTRACTING_SLIDING = "AttractingSliding"
    REPELLING_SLIDING = "RepellingSliding"


class Visibility(str, enum.Enum):
    VISIBLE = "Visible"
    INVISIBLE = "Invisible"
    DEGENERATE = "Degenerate"  # second Lie derivative vanishes


class Status(str, enum.Enum):
    ADMISSIBLE = "Admissible"
    VIRTUAL = "Virtual"
    BOUNDARY = "Boundary"


class NodeType(str, enum.Enum):
    STABLE_NODE = "StableNode"
    STABLE_DEGENERATE_NODE = "StableDegenerateNode"
    OTHER = "Other"


@dataclass(frozen=True)
class Segment:
    lo: float
    hi: float
    label: Region


@dataclass(frozen=True)
class TangentPoint:
    location: State
    visibility_f1: Visibility
    visibility_f2: Visibility
    second_lie_f1: float
    second_lie_f2: float


@dataclass(frozen=True)
class BoundaryClassification:
    segments: list
    tangent_points: list


@dataclass(frozen=True)
class EquilibriumReport:
    point: State
    field: Field
    status: Status
    eigenvalues: tuple
    node_type: NodeType
    weight: float | None = None  # convex weight of F2 for pseudo-equilibria


def _exact(v):
    """Exact rational image of a real, for sign decisions on boundary lines."""
    return v if isinstance(v, (int, Fraction)) else Fraction(float(v))


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def require_single_threshold(p: NondimParams) -> None:
    if p.theta != 1:
        raise UnsupportedConfigurationError(
            f"Filippov analysis needs c_thresh == c_shear (theta = 1), got theta = {p.theta}; "
            "use integrator.simulate_two_threshold for simulation only")


def H(x) -> float:
    """Switching function ``C - 1``."""
    return x[1] - 1


def f1(x, p: NondimParams) -> tuple:
    n, c = x
    return (-n, -p.alpha * (n + 1) * c + p.beta)


def f2(x, p: NondimParams) -> tuple:
    n, c = x
    return (-n + p.zeta, -p.alpha * (n + 1) * c + p.beta + p.gamma)


def field_value(x, p: NondimParams, field: Field) -> tuple:
    return f1(x, p) if field == Field.F1 else f2(x, p)


def lie1(x, p: NondimParams, field: Field):
    """First Lie derivative ``<grad H, F>`` (the C-component of the field)."""
    n, c = x
    base = -p.alpha * (n + 1) * c + p.beta
    return base + p.gamma if field == Field.F2 else base


def lie2(x, p: NondimParams, field: Field):
    """Second Lie derivative of ``H`` along ``field``.

    Equals ``<grad(lie1), F>`` with ``grad(lie1) = (-alpha C, -alpha (N+1))``.
    """
    n, c = x
    a, b, g, z = p.alpha, p.beta, p.gamma, p.zeta
    common = a * a * n * n * c + 2 * a * a * n * c + a * n * c + a * a * c
    if field == Field.F1:
        return common - a * b * n - a * b
    return common - a * z * c - a * b * n - a * g * n - a * b - a * g


def tangency_n(p: NondimParams, field: Field):
    """N-coordinate where ``field`` is tangent to the switching line."""
    src = p.beta + p.gamma if field == Field.F2 else p.beta
    return src / p.alpha - 1


def region_at(n, p: NondimParams):
    """Label of the switching line at ``(n, 1)``; ``None`` at a tangency."""
    l1 = _sign(_exact(lie1((n, 1), p, Field.F1)))
    l2 = _sign(_exact(lie1((n, 1), p, Field.F2)))
    if l1 == 0 or l2 == 0:
        return None
    if l1 == l2:
        return Region.CROSSING
    if l2 < 0 < l1:
        return Region.ATTRACTING_SLIDING
    return Region.REPELLING_SLIDING


def tangent_points(p: NondimParams) -> list:
    """Tangent points ``S1`` (of F1) and ``S2`` (of F2) with ``N >= 0``.

    F1 lives below the line, so it is visible when its second Lie derivative is
    negative; F2 lives above and is visible when it is positive.
    """
    require_single_threshold(p)
    out = []
    for fld in (Field.F1, Field.F2):
        n = tangency_n(p, fld)
        if _exact(n) < 0:
            continue
        if out and _exact(out[-1].location.n) == _exact(n):
            continue  # gamma == 0: both tangencies coincide
        x = State(n, 1)
        l2_1 = lie2(x, p, Field.F1)
        l2_2 = lie2(x, p, Field.F2)
        out.append(TangentPoint(location=x,
                                visibility_f1=_visibility(-_sign(_exact(l2_1))),
                                visibility_f2=_visibility(_sign(_exact(l2_2))),
                                second_lie_f1=l2_1, second_lie_f2=l2_2))
    return out


def _visibility(s):
    if s == 0:
        return Visibility.DEGENERATE
    return Visibility.VISIBLE if s > 0 else Visibility.INVISIBLE


def classify_boundary(p: NondimParams, n_max=None) -> BoundaryClassification:
    """Partition ``{C = 1, 0 <= N < n_max}`` into crossing and sliding segments.

    ``n_max`` defaults to ``zeta + 1``.  Break points are the tangent points;
    each open segment is labelled from the signs of the first Lie
    derivatives at its midpoint.
    """
    require_single_threshold(p)
    if n_max is None:
        n_max = p.zeta + 1
    if not n_max > 0:
        raise ValueError("n_max must be positive")
    tps = tangent_points(p)
    breaks = sorted({tp.location.n for tp in tps if 0 < _exact(tp.location.n) < _exact(n_max)},
                    key=_exact)
    edges = [0, *breaks, n_max]
    segments = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        label = region_at((lo + hi) / 2, p)
        if segments and segments[-1].label == label and segments[-1].hi == lo:
            segments[-1] = Segment(segments[-1].lo, hi, label)
        else:
            segments.append(Segment(lo, hi, label))
    return BoundaryClassification(segments=segments, tangent_points=tps)


def _status_below(c) -> Status:
    """Status of an F1 equilibrium from its C-coordinate (F1 lives in C < 1)."""
    s = _sign(_exact(c) - 1)
    return Status.BOUNDARY if s == 0 else (Status.ADMISSIBLE if s < 0 else Status.VIRTUAL)


def f1_status(p: NondimParams) -> Status:
    """Status of ``P_st^- = (0, beta/alpha)``: compares ``beta`` with ``alpha``."""
    s = _sign(_exact(p.beta) - _exact(p.alpha))
    return Status.BOUNDARY if s == 0 else (Status.ADMISSIBLE if s < 0 else Status.VIRTUAL)


def f2_status(p: NondimParams) -> Status:
    """Status of ``P_st^+``: compares ``beta`` with ``alpha (zeta+1) - gamma``."""
    a, b, g, z = (_exact(v) for v in (p.alpha, p.beta, p.gamma, p.zeta))
    s = _sign(b - (a * (z + 1) - g))
    return Status.BOUNDARY if s == 0 else (Status.ADMISSIBLE if s > 0 else Status.VIRTUAL)


def _node_type(lam1, lam2) -> NodeType:
    if lam1 < 0 and lam2 < 0:
        return NodeType.STABLE_DEGENERATE_NODE if lam1 == lam2 else NodeType.STABLE_NODE
    return NodeType.OTHER


def equilibria(p: NondimParams) -> list:
    """Regular equilibria ``P_st^-`` of F1 and ``P_st^+`` of F2.

    Both Jacobians are lower triangular, so the eigenvalues are the diagonal
    entries ``-1`` and ``-alpha (N* + 1)``.
    """
    require_single_threshold(p)
    a, b, g, z = p.alpha, p.beta, p.gamma, p.zeta
    out = []
    lam = sorted((-1, -a))
    out.append(EquilibriumReport(point=State(0, b / a), field=Field.F1, status=f1_status(p),
                                 eigenvalues=tuple(lam), node_type=_node_type(*lam)))
    lam = sorted((-1, -a * (z + 1)))
    out.append(EquilibriumReport(point=State(z, (b + g) / (a * (z + 1))), field=Field.F2,
                                 status=f2_status(p), eigenvalues=tuple(lam),
                                 node_type=_node_type(*lam)))
    return out


def pseudo_weight(p: NondimParams):
    """Convex weight ``(alpha - beta)/(gamma - alpha zeta)``; ``None`` if undefined."""
    den = p.gamma - p.alpha * p.zeta
    if _exact(den) == 0:
        return None
    return (p.alpha - p.beta) / den


def pseudo_equilibrium(p: NondimParams):
    """Equilibrium of the sliding flow on ``C = 1``.

    Returns ``None`` when ``gamma == alpha zeta`` (the weight is undefined).
    The reported eigenvalue is that of the one-dimensional sliding dynamics
    ``dN/dt = (alpha zeta / gamma - 1) N + zeta (alpha - beta) / gamma``.
    """
    require_single_threshold(p)
    w = pseudo_weight(p)
    if w is None:
        return None
    we = _exact(w)
    if 0 < we < 1:
        status = Status.ADMISSIBLE
    elif we == 0 or we == 1:
        status = Status.BOUNDARY
    else:
        status = Status.VIRTUAL
    eig = (p.alpha * p.zeta / p.gamma - 1,) if p.gamma != 0 else (float("nan"),)
    return EquilibriumReport(point=State(p.zeta * w, 1), field=Field.SLIDING, status=status,
                             eigenvalues=eig, node_type=NodeType.OTHER, weight=w)
