"""Closed-form flows across ``C = 1``, the return map and the limit cycle.

Below the switching line N decays as ``exp(-t)`` and C can be written as a
function of N; the same holds above the line with N relaxing to ``zeta``.
Solving the linear ODEs ``dC/dN`` with ``C(N0) = 1`` gives

    C-(N) = (N/N0)^a e^{a(N-N0)} + beta  * int_N^N0  (N/s)^a e^{a(N-s)} ds/s
    C+(N) = e^{a(N-N0)} ((z-N)/(z-N0))^k
            + (beta+gamma) * int_N0^N e^{a(N-s)} ((z-N)/(z-s))^k ds/(z-s)

with ``a = alpha``, ``z = zeta`` and ``k = alpha (zeta + 1)``.  Both
integrals are evaluated after the logarithmic substitution ``s = N e^u``
(resp. ``z - s = (z - N) e^u``), which turns the endpoint singularities at
``N = 0`` and ``N = zeta`` into smooth, exponentially decaying integrands.

The return map starts on the right crossing branch ``N > (beta+gamma)/alpha - 1``,
follows C- down to the left branch ``N_half < beta/alpha - 1``, then C+ back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError, ExistenceError, MapEvaluationError, ParameterError
from .filippov import require_single_threshold
from .params import NondimParams

SINGULARITY_GUARD = 1e-8
QUAD_EPSABS = 1e-13
ROOT_XTOL = 1e-14


def _quad(f, a, b):
    val, _ = integrate.quad(f, a, b, epsabs=QUAD_EPSABS, epsrel=1e-13, limit=400)
    return val


def flow_minus(n, n0, p: NondimParams, guard: float = SINGULARITY_GUARD) -> float:
    """C along the F1 arc through ``(n0, 1)``, evaluated at ``0 < n <= n0``."""
    a, b = float(p.alpha), float(p.beta)
    if n > n0:
        raise DomainError(f"flow_minus needs n <= n0 (N decreases under F1), got n={n}, n0={n0}")
    if n < guard:
        return b / a
    if n == n0:
        return 1.0
    top = math.log(n0 / n)
    integral = _quad(lambda u: math.exp(-a * u + a * n * (1.0 - math.exp(u))), 0.0, top)
    return math.exp(a * (math.log(n / n0) + n - n0)) + b * integral


def flow_plus(n, n0, p: NondimParams, guard: float = SINGULARITY_GUARD) -> float:
    """C along the F2 arc through ``(n0, 1)``, evaluated at ``n0 <= n < zeta``."""
    a, z = float(p.alpha), float(p.zeta)
    src = float(p.beta + p.gamma)
    k = a * (z + 1.0)
    if n >= z:
        raise DomainError(f"flow_plus needs n < zeta = {z}, got {n}")
    if n < n0:
        raise DomainError(f"flow_plus needs n >= n0 (N increases under F2), got n={n}, n0={n0}")
    if z - n < guard:
        return src / k
    if n == n0:
        return 1.0
    gap = z - n
    top = math.log((z - n0) / gap)
    integral = _quad(lambda u: math.exp(-k * u + a * gap * (math.exp(u) - 1.0)), 0.0, top)
    return math.exp(a * (n - n0) - k * top) + src * integral


@dataclass(frozen=True)
class OscillationCheck:
    holds: bool
    f1_virtual: bool
    f2_virtual: bool
    margin_f1: float   # beta/alpha - 1
    margin_f2: float   # 1 - (beta+gamma)/(alpha(zeta+1))

    def __bool__(self):
        return self.holds


def oscillation_conditions(p: NondimParams) -> OscillationCheck:
    """Both regular equilibria virtual: ``beta/alpha > 1`` and ``(beta+gamma)/(alpha(zeta+1)) < 1``."""
    from .filippov import Status, f1_status, f2_status

    v1 = f1_status(p) == Status.VIRTUAL
    v2 = f2_status(p) == Status.VIRTUAL
    m1 = float(p.beta / p.alpha - 1)
    m2 = float(1 - (p.beta + p.gamma) / (p.alpha * (p.zeta + 1)))
    return OscillationCheck(holds=v1 and v2, f1_virtual=v1, f2_virtual=v2, margin_f1=m1, margin_f2=m2)


def _require_oscillatory(p):
    require_single_threshold(p)
    chk = oscillation_conditions(p)
    if not chk:
        raise ParameterError(
            "oscillation conditions violated: need beta/alpha > 1 and (beta+gamma)/(alpha(zeta+1)) < 1 "
            f"(margins {chk.margin_f1:.6g}, {chk.margin_f2:.6g})")
    return chk


def branches(p: NondimParams):
    """Tangency abscissae ``(beta/alpha - 1, (beta+gamma)/alpha - 1)``."""
    return float(p.beta / p.alpha - 1), float((p.beta + p.gamma) / p.alpha - 1)


def half_map(n, p: NondimParams) -> float:
    """Left-branch return ``N_half`` of the F1 arc leaving ``(n, 1)``."""
    s1, _ = branches(p)
    g = lambda x: flow_minus(x, n, p) - 1.0
    lo, hi = SINGULARITY_GUARD, min(s1, n)
    g_lo, g_hi = g(lo), g(hi)
    if not (g_lo > 0 > g_hi):
        raise MapEvaluationError(
            f"C- from N0={n} does not return to C=1 in ({lo}, {hi}): g={g_lo:.3g}, {g_hi:.3g}")
    return optimize.brentq(g, lo, hi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)


def plus_map(n_half, p: NondimParams) -> float:
    """Right-branch return of the F2 arc leaving ``(n_half, 1)``."""
    _, s2 = branches(p)
    z = float(p.zeta)
    g = lambda x: flow_plus(x, n_half, p) - 1.0
    lo, hi = max(s2, n_half), z - SINGULARITY_GUARD
    g_lo, g_hi = g(lo), g(hi)
    if not (g_lo > 0 > g_hi):
        raise MapEvaluationError(
            f"C+ from N0={n_half} does not return to C=1 in ({lo}, {hi}): g={g_lo:.3g}, {g_hi:.3g}")
    return optimize.brentq(g, lo, hi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)


def poincare_map(n, p: NondimParams, _checked: bool = False) -> float:
    """Return map on the section ``C = 1`` restricted to the right branch."""
    if not _checked:
        _require_oscillatory(p)
    _, s2 = branches(p)
    if not s2 < n < float(p.zeta):
        raise DomainError(f"map argument must lie in ({s2}, {float(p.zeta)}), got {n}")
    return plus_map(half_map(n, p), p)


@dataclass(frozen=True)
class CycleReport:
    n_star: float
    n_half: float
    period: float
    iterations: int
    residual: float

    def to_dict(self) -> dict:
        return {"n_star": self.n_star, "n_half": self.n_half, "period": self.period,
                "iterations": self.iterations, "residual": self.residual}


def cycle_period(n_star, n_half, zeta) -> float:
    """Time of flight: ``ln(n*/n_half)`` below the line plus ``ln((z-n_half)/(z-n*))`` above."""
    return math.log(n_star / n_half) + math.log((zeta - n_half) / (zeta - n_star))


def find_limit_cycle(p: NondimParams, tol: float = 1e-12, lo=None, hi=None) -> CycleReport:
    """Fixed point of the return map by bisection on ``F(N) - N``.

    The default bracket is the invariant interval ``((beta+gamma)/alpha - 1, zeta)``
    inset by ``1e-9 zeta``.

    Raises
    ------
    ParameterError
        Oscillation conditions do not hold.
    ExistenceError
        No sign change of ``F(N) - N`` in the bracket.
    """
    _require_oscillatory(p)
    _, s2 = branches(p)
    z = float(p.zeta)
    delta = 1e-9 * z
    lo = s2 + delta if lo is None else lo
    hi = z - delta if hi is None else hi
    g = lambda x: poincare_map(x, p, _checked=True) - x
    g_lo, g_hi = g(lo), g(hi)
    if not (g_lo >= 0 >= g_hi):
        raise ExistenceError(f"no sign change of F(N)-N on [{lo}, {hi}]: {g_lo:.3g}, {g_hi:.3g}")
    it = 0
    mid, g_mid = (lo, g_lo) if abs(g_lo) < abs(g_hi) else (hi, g_hi)
    while hi - lo > tol and g_mid != 0:
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        it += 1
        if g_mid > 0:
            lo = mid
        else:
            hi = mid
        if it > 200:
            break
    n_star = mid
    n_half = half_map(n_star, p)
    return CycleReport(n_star=n_star, n_half=n_half, period=cycle_period(n_star, n_half, z),
                       iterations=it, residual=abs(g_mid))


def scan_fixed_points(p: NondimParams, samples: int = 64, tol: float = 1e-12) -> list:
    """All fixed points found from sign changes of ``F(N) - N`` on a uniform grid."""
    _require_oscillatory(p)
    _, s2 = branches(p)
    z = float(p.zeta)
    delta = 1e-9 * z
    grid = np.linspace(s2 + delta, z - delta, samples)
    vals = [poincare_map(x, p, _checked=True) - x for x in grid]
    out = []
    for (a, ga), (b, gb) in zip(zip(grid[:-1], vals[:-1]), zip(grid[1:], vals[1:])):
        if ga == 0:
            out.append(find_limit_cycle(p, tol, lo=a, hi=a))
        elif ga > 0 > gb:
            out.append(find_limit_cycle(p, tol, lo=a, hi=b))
    return out


def cycle_polyline(report: CycleReport, p: NondimParams, samples: int = 200) -> np.ndarray:
    """Closed ``(N, C)`` polyline of the cycle: F1 arc then F2 arc."""
    n_lo, n_hi = report.n_half, report.n_star
    down = np.linspace(n_hi, n_lo, samples)
    up = np.linspace(n_lo, n_hi, samples)[1:]
    rows = [(x, flow_minus(x, n_hi, p)) for x in down]
    rows += [(x, flow_plus(x, n_lo, p)) for x in up]
    return np.array(rows)
