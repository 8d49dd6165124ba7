"""Boundary equilibrium bifurcations (BEB) with ``beta`` as the parameter.

A regular equilibrium of F1 hits the switching line at ``beta* = alpha``;
one of F2 at ``beta* = alpha (zeta+1) - gamma``.  At such a point the
linearization ``N = F_x``, ``M = F_beta``, ``C^T = grad H``, ``D = H_beta``
and the other field's value ``E`` decide the outcome: with the sign
convention used here ``C^T N^{-1} E = zeta - gamma/alpha > 0`` gives
persistence (the equilibrium turns into a pseudo-equilibrium) and ``< 0`` a
non-smooth fold (it annihilates with one).

Status decisions use exact rational arithmetic so that points on the
boundary lines are labelled ``Boundary`` rather than binned by rounding.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cycle import oscillation_conditions
from .filippov import (Field, State, Status, _exact, f1, f2, f1_status, f2_status, pseudo_equilibrium,
                       require_single_threshold)
from .params import NondimParams


class BebType(str, enum.Enum):
    PERSISTENCE = "Persistence"
    NONSMOOTH_FOLD = "NonsmoothFold"
    DEGENERATE = "Degenerate"


class EqLabel(str, enum.Enum):
    REGULAR = "Regular"
    VIRTUAL = "Virtual"
    BOUNDARY = "Boundary"


class PseudoLabel(str, enum.Enum):
    ADMISSIBLE = "Admissible"
    VIRTUAL = "Virtual"
    UNDEFINED = "Undefined"


@dataclass(frozen=True)
class BebMatrices:
    N: np.ndarray
    M: np.ndarray
    C: np.ndarray
    D: float
    E: np.ndarray

    @property
    def n_inv(self):
        return np.linalg.inv(self.N)

    def transversality(self) -> float:
        """``D - C^T N^{-1} M``."""
        return float(self.D - self.C @ self.n_inv @ self.M)

    def discriminant(self) -> float:
        """``C^T N^{-1} E``."""
        return float(self.C @ self.n_inv @ self.E)


@dataclass(frozen=True)
class BebCertificate:
    field: Field
    beta_star: float
    x_star: State
    equilibrium_of_one_field: bool
    on_manifold: bool
    jacobian_invertible: bool
    transversal: bool
    transversality_value: float
    jacobian_det: float
    other_field_value: tuple
    matrices: BebMatrices

    @property
    def conditions(self) -> tuple:
        return (self.equilibrium_of_one_field, self.on_manifold,
                self.jacobian_invertible, self.transversal)

    @property
    def valid(self) -> bool:
        return all(self.conditions)


def _certificate(fld, beta_star, x, own, other, jac):
    M = np.array([0.0, 1.0])         # d/dbeta of both fields
    C = np.array([0.0, 1.0])         # grad H, H = C - 1
    mats = BebMatrices(N=jac, M=M, C=C, D=0.0, E=np.array(other, dtype=float))
    det = float(np.linalg.det(jac))
    trans = mats.transversality() if det != 0 else float("nan")
    return BebCertificate(
        field=fld, beta_star=beta_star, x_star=x,
        equilibrium_of_one_field=(own == (0, 0)) and other != (0, 0),
        on_manifold=_exact(x.c) == 1,
        jacobian_invertible=det != 0,
        transversal=det != 0 and trans != 0,
        transversality_value=trans, jacobian_det=det,
        other_field_value=tuple(other), matrices=mats)


def beb_f1(p: NondimParams) -> BebCertificate:
    """Certificate for the F1 equilibrium ``(0, beta/alpha)`` reaching ``C = 1`` at ``beta = alpha``."""
    require_single_threshold(p)
    q = p.replace(beta=p.alpha)
    x = State(0, q.beta / q.alpha)
    a = float(q.alpha)
    jac = np.array([[-1.0, 0.0], [-a * float(x.c), -a * (1.0 + float(x.n))]])
    return _certificate(Field.F1, q.beta, x, f1(x, q), f2(x, q), jac)


def beb_f2(p: NondimParams) -> BebCertificate:
    """Certificate for the F2 equilibrium reaching ``C = 1`` at ``beta = alpha (zeta+1) - gamma``."""
    require_single_threshold(p)
    beta_star = p.alpha * (p.zeta + 1) - p.gamma
    q = p.replace(beta=beta_star) if _exact(beta_star) >= 0 else None
    a, z = float(p.alpha), float(p.zeta)
    x = State(p.zeta, 1 if q is None else (q.beta + q.gamma) / (q.alpha * (q.zeta + 1)))
    jac = np.array([[-1.0, 0.0], [-a * float(x.c), -a * (z + 1.0)]])
    if q is None:
        # beta* < 0 lies outside the parameter domain; evaluate the fields formally
        return _certificate(Field.F2, float(beta_star), x, (0, 0), (-p.zeta, -p.gamma), jac)
    return _certificate(Field.F2, q.beta, x, f2(x, q), f1(x, q), jac)


def beb_discriminant(p: NondimParams):
    """Closed form ``zeta - gamma/alpha``."""
    return p.zeta - p.gamma / p.alpha


@dataclass(frozen=True)
class BebClassification:
    kind: BebType
    discriminant: float
    matrix_discriminant: float
    det_nonzero: bool
    transversality_nonzero: bool


def classify_beb(p: NondimParams) -> BebClassification:
    """Persistence / non-smooth fold / degenerate from the sign of ``alpha zeta - gamma``.

    The sign is decided exactly; the matrix-assembled ``C^T N^{-1} E`` of the
    F1 certificate is reported alongside as a consistency check.
    """
    cert = beb_f1(p)
    s = _exact(p.alpha) * _exact(p.zeta) - _exact(p.gamma)
    kind = BebType.PERSISTENCE if s > 0 else (BebType.NONSMOOTH_FOLD if s < 0 else BebType.DEGENERATE)
    return BebClassification(kind=kind, discriminant=float(beb_discriminant(p)),
                             matrix_discriminant=cert.matrices.discriminant(),
                             det_nonzero=cert.jacobian_invertible,
                             transversality_nonzero=cert.transversal)


# ---------------------------------------------------------------------------
# regimes

_EQ = {Status.ADMISSIBLE: EqLabel.REGULAR, Status.VIRTUAL: EqLabel.VIRTUAL,
       Status.BOUNDARY: EqLabel.BOUNDARY}


@dataclass(frozen=True)
class RegimeLabel:
    eq_f1: EqLabel
    eq_f2: EqLabel
    pseudo: PseudoLabel
    oscillatory: bool

    @property
    def short(self) -> str:
        """Two-letter code such as ``RV`` (F1 regular, F2 virtual)."""
        return self.eq_f1.value[0] + self.eq_f2.value[0]

    def to_dict(self) -> dict:
        return {"eq_f1": self.eq_f1.value, "eq_f2": self.eq_f2.value,
                "pseudo": self.pseudo.value, "oscillatory": self.oscillatory}


def regime(p: NondimParams) -> RegimeLabel:
    """Equilibrium-level regime of a parameter point."""
    require_single_threshold(p)
    pe = pseudo_equilibrium(p)
    if pe is None:
        pseudo = PseudoLabel.UNDEFINED
    elif pe.status == Status.VIRTUAL:
        pseudo = PseudoLabel.VIRTUAL
    else:
        # weight 0 or 1 puts it on the closure of the sliding segment
        pseudo = PseudoLabel.ADMISSIBLE
    return RegimeLabel(eq_f1=_EQ[f1_status(p)], eq_f2=_EQ[f2_status(p)], pseudo=pseudo,
                       oscillatory=bool(oscillation_conditions(p)))


def beta_breakpoints(p: NondimParams) -> list:
    """Exact ``beta`` values where an equilibrium sits on ``C = 1`` (nonnegative ones only)."""
    a, g, z = (_exact(v) for v in (p.alpha, p.gamma, p.zeta))
    return sorted({b for b in (a, a * (z + 1) - g) if b >= 0})


def parse_range(text: str) -> tuple:
    """``"lo:hi:n"`` to ``(lo, hi, n)``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"range must look like lo:hi:n, got {text!r}")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    if not (hi > lo and n >= 2):
        raise ValueError(f"range needs hi > lo and n >= 2, got {text!r}")
    return lo, hi, n


def beta_scan(p: NondimParams, beta_range=(0.05, 1.2, 200), exact_breaks: bool = True) -> list:
    """``(beta, RegimeLabel)`` pairs on a uniform grid, plus the exact breakpoints inside it."""
    lo, hi, n = beta_range
    betas = [Fraction(float(b)) for b in np.linspace(lo, hi, n)]
    if exact_breaks:
        betas += [b for b in beta_breakpoints(p) if lo <= b <= hi]
    betas = sorted(set(betas))
    return [(b, regime(p.replace(beta=b))) for b in betas]


def beta_sequence(p: NondimParams, beta_range=(0.05, 1.2, 400)) -> list:
    """Distinct consecutive regime codes along increasing ``beta``."""
    seq = []
    for _, lab in beta_scan(p, beta_range):
        if not seq or seq[-1] != lab.short:
            seq.append(lab.short)
    return seq


def sweep(p_base: NondimParams, beta_range=(0.05, 1.2, 201), gamma_range=(0.05, 1.2, 201)) -> list:
    """Regime grid over ``(beta, gamma)`` as rows ``(beta, gamma, RegimeLabel)``.

    ``gamma_range`` is either ``(lo, hi, n)`` or an explicit list of values.
    """
    if isinstance(gamma_range, tuple) and len(gamma_range) == 3 and isinstance(gamma_range[2], int):
        gammas = np.linspace(*gamma_range)
    else:
        gammas = list(gamma_range)
    betas = np.linspace(*beta_range)
    rows = []
    for g in gammas:
        q = p_base.replace(gamma=float(g))
        for b in betas:
            rows.append((float(b), float(g), regime(q.replace(beta=float(b)))))
    return rows
