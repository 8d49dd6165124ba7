"""Parameter records, nondimensionalization and lubrication scales.

Two families of parameters live here:

* the Ca2+/NO kinetics constants (:class:`PhysicalParams`) and the four
  dimensionless groups they reduce to (:class:`NondimParams`);
* the vessel scales (:class:`VesselScales`) and the dimensionless numbers of
  the slender-tube flow model (:class:`ScaleSet`).

Presets are shipped as JSON files under ``lymphflow/data``.  The vessel
presets use the midpoints of typical physiological ranges; the lymphangion
preset is tuned so that its tube number, scaled capillary term and capillary
number sit at the customary values 32.7, 3.48e-3 and 2.21e-5.

``k_no_plus`` is treated as a dimensionless production coefficient and
``c_shear``/``c_thresh`` share the same (arbitrary) concentration unit.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from importlib import resources
from numbers import Real
from typing import Callable

from .errors import DomainError, ParameterError

# Reference values of the nondimensional kinetics groups, kept for discrepancy
# reports; nondimensionalize() never returns these, it always recomputes.
REFERENCE_NONDIM = {"alpha": 5.01, "beta": 6.23, "gamma": 3.33, "zeta": 1.07}


def _check_positive(obj, names):
    for name in names:
        value = getattr(obj, name)
        if not isinstance(value, Real) or not value > 0 or not math.isfinite(value):
            raise ParameterError(f"{name} must be a finite positive number, got {value!r}", field=name)


def _check_nonnegative(obj, names):
    for name in names:
        value = getattr(obj, name)
        if not isinstance(value, Real) or not value >= 0 or not math.isfinite(value):
            raise ParameterError(f"{name} must be a finite nonnegative number, got {value!r}", field=name)


@dataclass(frozen=True)
class PhysicalParams:
    """Dimensional constants of the Ca2+/NO kinetics.

    Rates are in 1/s, stresses in Pa, ``radius`` and ``r_crit`` are ratios to
    the reference radius, concentrations are in model units.
    """

    k_no_minus: float
    k_no_plus: float
    k_ca_minus: float
    k_ca_plus: float
    m: float
    radius: float
    r_crit: float
    tau_ref: float
    tau_xx: float
    c_shear: float
    c_thresh: float
    stretch_exponent: float = 11.0

    def __post_init__(self):
        _check_positive(self, ("k_no_minus", "k_no_plus", "k_ca_minus", "m", "r_crit",
                               "tau_ref", "tau_xx", "c_shear", "c_thresh", "stretch_exponent"))
        # zero production / zero radius are meaningful degenerate inputs
        _check_nonnegative(self, ("k_ca_plus", "radius"))

    def stretch(self, z: float) -> float:
        """Stretch-activation response ``S(z) = z**k``."""
        return z ** self.stretch_exponent

    @classmethod
    def from_dict(cls, data: dict) -> "PhysicalParams":
        return cls(**_pick(cls, data))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class NondimParams:
    """Dimensionless groups of the kinetics model.

    ``theta`` is the threshold ratio ``c_thresh / c_shear``; the Filippov
    analysis requires ``theta == 1``.  The source terms ``beta`` and ``gamma``
    may be zero (degenerate, no production), and so may ``theta`` (the NO
    source is then always on); ``alpha`` and ``zeta`` must be positive.
    Fields accept floats or :class:`fractions.Fraction` for exact work.
    """

    alpha: float
    beta: float
    gamma: float
    zeta: float
    theta: float = 1

    def __post_init__(self):
        _check_positive(self, ("alpha", "zeta"))
        _check_nonnegative(self, ("beta", "gamma", "theta"))

    def require_strict(self) -> "NondimParams":
        """Raise unless every group is strictly positive."""
        _check_positive(self, ("alpha", "beta", "gamma", "zeta", "theta"))
        return self

    def replace(self, **changes) -> "NondimParams":
        data = asdict(self)
        data.update(changes)
        return NondimParams(**data)

    @classmethod
    def from_dict(cls, data: dict) -> "NondimParams":
        return cls(**_pick(cls, data))

    def to_dict(self) -> dict:
        return {k: float(v) for k, v in asdict(self).items()}


@dataclass(frozen=True)
class VesselScales:
    """Characteristic vessel scales (SI units).

    R0 [m], L [m], Vx [m/s], rho [kg/m^3], nu [m^2/s], G [Pa], T [Pa].
    """

    R0: float
    L: float
    Vx: float
    rho: float
    nu: float
    G: float
    T: float

    def __post_init__(self):
        _check_positive(self, [f.name for f in fields(self)])

    @classmethod
    def from_dict(cls, data: dict) -> "VesselScales":
        return cls(**_pick(cls, data))


@dataclass(frozen=True)
class ScaleSet:
    epsilon: float
    reynolds: float
    pressure_scale: float
    tube_number: float
    sigma: float
    capillary: float

    def to_dict(self) -> dict:
        return asdict(self)


def _pick(cls, data):
    names = {f.name for f in fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ParameterError(f"unknown field(s) for {cls.__name__}: {sorted(unknown)}",
                             field=sorted(unknown)[0])
    return {k: v for k, v in data.items() if k in names}


def nondimensionalize(phys: PhysicalParams,
                      stretch: Callable[[float], float] | None = None) -> NondimParams:
    """Reduce the kinetics constants to ``(alpha, beta, gamma, zeta, theta)``.

    Time is scaled by ``1/k_no_minus``, Ca2+ by ``c_shear`` and NO by ``1/m``.

    Parameters
    ----------
    phys
        Dimensional constants.
    stretch
        Stretch-activation function ``S``; defaults to ``z**stretch_exponent``.
    """
    S = phys.stretch if stretch is None else stretch
    kd = phys.k_no_minus
    z = phys.radius / phys.r_crit
    alpha = phys.k_ca_minus / kd
    beta = phys.k_ca_plus * (1.0 + S(z)) / (kd * phys.c_shear)
    gamma = 10.0 * phys.k_ca_plus / (kd * phys.c_shear)
    zeta = phys.k_no_plus * phys.m * (phys.tau_xx / phys.tau_ref) / kd
    theta = phys.c_thresh / phys.c_shear
    return NondimParams(alpha=alpha, beta=beta, gamma=gamma, zeta=zeta, theta=theta)


def reference_discrepancy(nd: NondimParams) -> dict:
    """Absolute differences between computed groups and the reference ones."""
    return {k: float(getattr(nd, k)) - v for k, v in REFERENCE_NONDIM.items()}


def shear_stress(delta_p: float, radius: float, length: float) -> float:
    """Poiseuille wall shear stress ``-radius * delta_p / (2 * length)`` in Pa."""
    if length == 0:
        raise DomainError("vessel length must be nonzero")
    if length < 0:
        raise DomainError(f"vessel length must be positive, got {length}")
    return -radius * delta_p / (2.0 * length)


def lubrication_scales(vessel: VesselScales) -> ScaleSet:
    """Dimensionless numbers of the slender-tube (lubrication) scaling."""
    eps = vessel.R0 / vessel.L
    re = vessel.L * vessel.Vx / vessel.nu
    dyn = vessel.rho * vessel.Vx ** 2
    pressure = dyn / (eps ** 2 * re)
    tube = eps ** 2 * re * vessel.G / dyn
    ca = vessel.rho * vessel.nu * vessel.Vx / (vessel.T * vessel.L)
    return ScaleSet(epsilon=eps, reynolds=re, pressure_scale=pressure,
                    tube_number=tube, sigma=eps ** 4 / ca, capillary=ca)


def _load_json(name):
    with resources.files("lymphflow.data").joinpath(name).open("r") as fh:
        return json.load(fh)


VESSEL_PRESETS = ("artery", "vein", "lymphangion")


def vessel_preset(name: str) -> VesselScales:
    """Load a shipped vessel preset (``artery``, ``vein`` or ``lymphangion``)."""
    if name not in VESSEL_PRESETS:
        raise ParameterError(f"unknown vessel preset {name!r}; choose from {VESSEL_PRESETS}")
    return VesselScales.from_dict(_load_json(f"{name}.json"))


def reference_kinetics() -> PhysicalParams:
    """Kinetics constants of the reference lymphangion."""
    return PhysicalParams.from_dict(_load_json("reference_kinetics.json"))


def load_params(path) -> dict:
    """Read a JSON parameter file into a plain dict."""
    with open(path, "r") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ParameterError(f"{path}: expected a JSON object")
    return data
