from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from lymphflow.errors import UnsupportedConfigurationError
from lymphflow.filippov import (Field, NodeType, Region, State, Status, Visibility, classify_boundary,
                                equilibria, f1, f2, lie1, lie2, pseudo_equilibrium, region_at,
                                tangent_points)
from lymphflow.params import NondimParams

REF = NondimParams(5.01, 6.23, 3.33, 1.07)
pos = st.floats(0.05, 20.0)

# symbolic oracle for the Lie derivatives
_N, _C, _a, _b, _g, _z = sp.symbols("N C alpha beta gamma zeta")
_F1 = sp.Matrix([-_N, -_a * (_N + 1) * _C + _b])
_F2 = sp.Matrix([-_N + _z, -_a * (_N + 1) * _C + _b + _g])


def _sym_lie2(F):
    l1 = F[1]
    return sp.diff(l1, _N) * F[0] + sp.diff(l1, _C) * F[1]


_L2 = {Field.F1: sp.lambdify((_N, _C, _a, _b, _g, _z), _sym_lie2(_F1)),
       Field.F2: sp.lambdify((_N, _C, _a, _b, _g, _z), _sym_lie2(_F2))}


@settings(max_examples=100, deadline=None)
@given(pos, pos, pos, pos, st.floats(0, 3), st.floats(0, 3))
def test_lie2_matches_symbolic(a, b, g, z, n, c):
    p = NondimParams(a, b, g, z)
    for fld in (Field.F1, Field.F2):
        ref = _L2[fld](n, c, a, b, g, z)
        assert lie2((n, c), p, fld) == pytest.approx(ref, rel=1e-10, abs=1e-9 * (1 + abs(ref)))


def test_lie2_values_at_tangencies_symbolic():
    s1 = {_N: _b / _a - 1, _C: 1}
    s2 = {_N: (_b + _g) / _a - 1, _C: 1}
    assert sp.simplify(_sym_lie2(_F1).subs(s1) - (_b - _a)) == 0
    assert sp.simplify(_sym_lie2(_F2).subs(s2) - (_b + _g - _a * (_z + 1))) == 0
    assert sp.simplify(_sym_lie2(_F2).subs(s1) - (_b - _a - _a * _z - _b * _g)) == 0
    # F1 at S2: gamma*beta + gamma^2 + beta + gamma - alpha
    assert sp.simplify(_sym_lie2(_F1).subs(s2) - (_b * _g + _g ** 2 + _b + _g - _a)) == 0


@settings(max_examples=200, deadline=None)
@given(pos, pos, pos, pos)
def test_lie1_vanishes_at_tangent_points(a, b, g, z):
    p = NondimParams(a, b, g, z)
    n1, n2 = b / a - 1, (b + g) / a - 1
    assert lie1((n1, 1), p, Field.F1) == pytest.approx(0, abs=1e-12 * (1 + b))
    assert lie1((n2, 1), p, Field.F2) == pytest.approx(0, abs=1e-12 * (1 + b + g))


def test_fields_match_definition():
    assert f1((0.5, 2.0), REF) == pytest.approx((-0.5, -5.01 * 1.5 * 2 + 6.23))
    assert f2((0.5, 2.0), REF) == pytest.approx((-0.5 + 1.07, -5.01 * 1.5 * 2 + 6.23 + 3.33))


def test_boundary_at_reference_parameters():
    bc = classify_boundary(REF)
    labels = [s.label for s in bc.segments]
    assert labels == [Region.CROSSING, Region.REPELLING_SLIDING, Region.CROSSING]
    s1, s2 = bc.tangent_points
    assert s1.location.n == pytest.approx(6.23 / 5.01 - 1)
    assert s2.location.n == pytest.approx(9.56 / 5.01 - 1)
    assert s1.second_lie_f1 == pytest.approx(6.23 - 5.01)
    assert s1.visibility_f1 == Visibility.INVISIBLE
    assert s2.second_lie_f2 == pytest.approx(9.56 - 5.01 * 2.07)
    assert s2.visibility_f2 == Visibility.INVISIBLE
    assert bc.segments[-1].hi == pytest.approx(2.07)


def test_attracting_sliding_for_negative_contrast():
    # gamma = 0 collapses the tangencies; segments are crossing only
    p = NondimParams(1.0, 2.0, 0.0, 1.0)
    assert len(tangent_points(p)) == 1
    assert all(s.label == Region.CROSSING for s in classify_boundary(p).segments)


def test_region_none_at_tangency():
    p = NondimParams(Fraction(1), Fraction(2), Fraction(1), Fraction(1))
    assert region_at(Fraction(1), p) is None
    assert region_at(Fraction(3, 2), p) == Region.REPELLING_SLIDING


def test_equilibria_statuses_and_eigenvalues():
    e1, e2 = equilibria(REF)
    assert e1.status == Status.VIRTUAL and e2.status == Status.VIRTUAL
    assert sorted(e1.eigenvalues) == pytest.approx([-5.01, -1.0])
    assert sorted(e2.eigenvalues) == pytest.approx([-5.01 * 2.07, -1.0])
    assert e2.point.c == pytest.approx(9.56 / (5.01 * 2.07))


def test_exact_boundary_status():
    a = Fraction(3, 10)
    assert equilibria(NondimParams(a, a, Fraction(1, 2), Fraction(2)))[0].status == Status.BOUNDARY
    b = a * 3 - Fraction(1, 2)
    assert equilibria(NondimParams(a, b, Fraction(1, 2), Fraction(2)))[1].status == Status.BOUNDARY
    # float inputs on the line are also classified exactly
    assert equilibria(NondimParams(0.3, 0.3, 0.5, 2.0))[0].status == Status.BOUNDARY


def test_degenerate_node_when_eigenvalues_coincide():
    e1, e2 = equilibria(NondimParams(0.5, 0.2, 0.1, 1.0))
    assert e2.node_type == NodeType.STABLE_DEGENERATE_NODE
    assert e1.node_type == NodeType.STABLE_NODE
    e1, _ = equilibria(NondimParams(1.0, 0.2, 0.1, 1.0))
    assert e1.node_type == NodeType.STABLE_DEGENERATE_NODE


def test_pseudo_equilibrium_at_reference_parameters():
    pe = pseudo_equilibrium(REF)
    w = (5.01 - 6.23) / (3.33 - 5.01 * 1.07)
    assert pe.weight == pytest.approx(w)
    assert pe.status == Status.ADMISSIBLE
    assert pe.point.n == pytest.approx(1.07 * w)
    assert pe.eigenvalues[0] == pytest.approx(5.01 * 1.07 / 3.33 - 1)
    # the convex combination vanishes there
    x = (pe.point.n, 1.0)
    v = [u + w * (v2 - u) for u, v2 in zip(f1(x, REF), f2(x, REF))]
    assert v == pytest.approx([0, 0], abs=1e-12)


def test_pseudo_equilibrium_undefined_on_degenerate_line():
    assert pseudo_equilibrium(NondimParams(0.3, 0.5, 0.6, 2.0)) is None


def test_two_thresholds_unsupported():
    with pytest.raises(UnsupportedConfigurationError):
        classify_boundary(NondimParams(1, 2, 1, 1, theta=2))
