import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from lymphflow.cycle import (CycleReport, branches, cycle_period, cycle_polyline, find_limit_cycle,
                             flow_minus, flow_plus, half_map, oscillation_conditions, poincare_map,
                             scan_fixed_points)
from lymphflow.errors import DomainError, ParameterError
from lymphflow.integrator import IntegratorConfig, simulate
from lymphflow.params import NondimParams

REF = NondimParams(5.01, 6.23, 3.33, 1.07)


def _ode_minus(n_end, n0, p):
    a, b = float(p.alpha), float(p.beta)
    sol = solve_ivp(lambda n, c: (a * (1 + n) * c - b) / n, (n0, n_end), [1.0],
                    method="DOP853", rtol=1e-12, atol=1e-14)
    return sol.y[0, -1]


def _ode_plus(n_end, n0, p):
    a, z = float(p.alpha), float(p.zeta)
    s = float(p.beta + p.gamma)
    sol = solve_ivp(lambda n, c: (-a * (1 + n) * c + s) / (z - n), (n0, n_end), [1.0],
                    method="DOP853", rtol=1e-12, atol=1e-14)
    return sol.y[0, -1]


@pytest.fixture(scope="module")
def cycle():
    return find_limit_cycle(REF)


def test_flow_minus_matches_ode_at_interior_points():
    for n in np.linspace(0.05, 0.95, 50):
        assert flow_minus(n, 1.0, REF) == pytest.approx(_ode_minus(n, 1.0, REF), abs=1e-7)


def test_flow_plus_matches_ode_at_interior_points():
    n0 = 0.2
    for n in np.linspace(0.25, 1.05, 50):
        assert flow_plus(n, n0, REF) == pytest.approx(_ode_plus(n, n0, REF), abs=1e-7)


def test_flow_minus_matches_simulation():
    # N = exp(-t) under F1, so N = 0.5 at t = ln 2, before the arc returns to C = 1
    cfg = IntegratorConfig(max_time=math.log(2.0), rel_tol=1e-12, abs_tol=1e-14, event_tol=1e-13)
    end = simulate((1.0, 1.0), REF, cfg).final_state
    assert end.n == pytest.approx(0.5, abs=1e-10)
    assert flow_minus(0.5, 1.0, REF) == pytest.approx(end.c, abs=1e-7)


def test_endpoint_values():
    assert flow_minus(0.7, 0.7, REF) == 1.0
    assert flow_plus(0.3, 0.3, REF) == 1.0


def test_removable_singularities_decrease():
    lim_minus = float(REF.beta / REF.alpha)
    lim_plus = float((REF.beta + REF.gamma) / (REF.alpha * (REF.zeta + 1)))
    z = float(REF.zeta)
    err_m = [abs(flow_minus(e, 1.0, REF) - lim_minus) for e in (1e-2, 1e-4, 1e-6)]
    err_p = [abs(flow_plus(z - e, 0.2, REF) - lim_plus) for e in (1e-2, 1e-4, 1e-6)]
    assert err_m[0] > err_m[1] > err_m[2]
    assert err_p[0] > err_p[1] > err_p[2]
    assert err_m[2] < 1e-5 and err_p[2] < 1e-5


def test_domain_errors():
    with pytest.raises(DomainError):
        flow_minus(1.2, 1.0, REF)
    with pytest.raises(DomainError):
        flow_plus(1.07, 0.2, REF)
    with pytest.raises(DomainError):
        flow_plus(0.1, 0.2, REF)
    _, s2 = branches(REF)
    with pytest.raises(DomainError):
        poincare_map(s2 - 0.01, REF)


def test_oscillation_conditions_at_reference_values():
    chk = oscillation_conditions(REF)
    assert chk and chk.f1_virtual and chk.f2_virtual
    assert chk.margin_f1 == pytest.approx(6.23 / 5.01 - 1)
    assert chk.margin_f2 == pytest.approx(1 - 9.56 / (5.01 * 2.07))


def test_oscillation_boundary_is_not_oscillatory():
    assert not oscillation_conditions(REF.replace(beta=REF.alpha))


def test_precondition_rejected():
    p = REF.replace(beta=4.0)
    with pytest.raises(ParameterError):
        find_limit_cycle(p)
    with pytest.raises(ParameterError):
        poincare_map(1.0, p)


def test_map_image_contained():
    _, s2 = branches(REF)
    z = float(REF.zeta)
    for n in np.linspace(s2 + 1e-6, z - 1e-6, 100):
        assert s2 < poincare_map(n, REF) < z


def test_cycle_invariants(cycle):
    s1, s2 = branches(REF)
    assert s2 < cycle.n_star < float(REF.zeta)
    assert 0 < cycle.n_half < s1
    assert cycle.residual <= 1e-9
    assert abs(poincare_map(cycle.n_star, REF) - cycle.n_star) <= 1e-9
    assert cycle.period == pytest.approx(cycle_period(cycle.n_star, cycle.n_half, 1.07))
    assert cycle.period > 0


def test_cycle_is_contracting(cycle):
    h = 1e-5
    slope = (poincare_map(cycle.n_star + h, REF) - poincare_map(cycle.n_star - h, REF)) / (2 * h)
    assert 0 < slope < 1


def test_iterates_monotone_from_top(cycle):
    n = 1.07 * (1 - 1e-3)
    seq = [n]
    for _ in range(8):
        seq.append(poincare_map(seq[-1], REF))
    # the map contracts so hard that iterates sit on the fixed point after two steps
    assert all(b <= a + 1e-12 for a, b in zip(seq[:-1], seq[1:]))
    assert seq[1] < seq[0]
    assert abs(seq[-1] - cycle.n_star) < 1e-9


def test_scan_finds_single_cycle(cycle):
    found = scan_fixed_points(REF, samples=16)
    assert len(found) == 1
    assert found[0].n_star == pytest.approx(cycle.n_star, abs=1e-10)


def test_polyline_closes(cycle):
    poly = cycle_polyline(cycle, REF, samples=50)
    assert poly.shape == (99, 2)
    assert poly[0] == pytest.approx([cycle.n_star, 1.0])
    assert poly[-1, 0] == pytest.approx(cycle.n_star)
    assert poly[-1, 1] == pytest.approx(1.0, abs=1e-9)
    assert np.all(poly[1:49, 1] < 1.0) and np.all(poly[50:-1, 1] > 1.0)


def test_report_to_dict(cycle):
    d = cycle.to_dict()
    assert set(d) == {"n_star", "n_half", "period", "iterations", "residual"}
    assert isinstance(cycle, CycleReport)


@settings(max_examples=15, deadline=None)
@given(alpha=st.floats(2.0, 8.0), r1=st.floats(0.1, 0.5), r2=st.floats(0.2, 0.8), zeta=st.floats(0.8, 2.0))
def test_cycle_invariants_random(alpha, r1, r2, zeta):
    beta = alpha * (1 + r1)
    # choose gamma so that (beta+gamma)/(alpha(zeta+1)) = r2 * 1 + (1-r2) * beta/(alpha(zeta+1)) < 1
    top = alpha * (zeta + 1)
    if beta >= top:
        return
    gamma = r2 * (top - beta)
    p = NondimParams(alpha, beta, gamma, zeta)
    assert oscillation_conditions(p)
    s1, s2 = branches(p)
    if s2 >= zeta * (1 - 1e-3):
        return
    rep = find_limit_cycle(p)
    assert s2 < rep.n_star < zeta
    assert 0 < rep.n_half < s1
    assert abs(poincare_map(rep.n_star, p) - rep.n_star) < 1e-9
    assert half_map(rep.n_star, p) == pytest.approx(rep.n_half)
