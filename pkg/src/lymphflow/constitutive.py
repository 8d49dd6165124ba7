"""Wall pressure-radius laws, their least-squares fitting, velocity profiles.

Three laws for the dimensionless transmural response ``phi(z)`` of the
radius ratio ``z = R/R0`` are provided:

* :class:`PowerLaw`  ``z**gamma_exp - 1``
* :class:`Rahbar`    ``P0 * (exp(Sp*(z - z0)) + a*z**-3 - b)``
* :class:`Reciprocal` ``g/(z0 - lam*z) - a*z**-3 + b``

Note that ``Rahbar`` only determines ``P0*exp(-Sp*z0)`` (not ``P0`` and
``z0`` separately) and ``Reciprocal`` only determines ``g/lam`` and
``z0/lam``; a fit of all coefficients converges to *an* equivalent set.  Pass
``fixed=`` to :func:`fit_pressure_law` to pin a gauge.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass, field, fields
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from .errors import ConvergenceError, DomainError, ParameterError, SingularityError

# ---------------------------------------------------------------------------
# pressure laws


class PressureLaw:
    """Common interface of the pressure-radius laws."""

    tag: str = ""

    @property
    def names(self) -> tuple:
        return tuple(f.name for f in fields(self))

    def coefficients(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    def with_coefficients(self, values) -> "PressureLaw":
        return type(self)(*(float(v) for v in values))

    def phi(self, z):
        raise NotImplementedError

    def dphi(self, z):
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {"law": self.tag, **{n: float(v) for n, v in zip(self.names, astuple(self))}}


@dataclass(frozen=True)
class PowerLaw(PressureLaw):
    gamma_exp: float = 1.0
    tag = "power"

    def __post_init__(self):
        if not self.gamma_exp > 0:
            raise ParameterError("power-law exponent must be positive", field="gamma_exp")

    def phi(self, z):
        return np.power(z, self.gamma_exp) - 1.0

    def dphi(self, z):
        return self.gamma_exp * np.power(z, self.gamma_exp - 1.0)


@dataclass(frozen=True)
class Rahbar(PressureLaw):
    P0: float
    Sp: float
    z0: float
    a: float
    b: float
    tag = "rahbar"

    def phi(self, z):
        z = np.asarray(z, dtype=float)
        return self.P0 * (np.exp(self.Sp * (z - self.z0)) + self.a * z ** -3 - self.b)

    def dphi(self, z):
        z = np.asarray(z, dtype=float)
        return self.P0 * (self.Sp * np.exp(self.Sp * (z - self.z0)) - 3.0 * self.a * z ** -4)


@dataclass(frozen=True)
class Reciprocal(PressureLaw):
    g: float
    z0: float
    lam: float
    a: float
    b: float
    tag = "reciprocal"

    def _denominator(self, z):
        den = self.z0 - self.lam * np.asarray(z, dtype=float)
        if np.any(den == 0):
            raise SingularityError(f"reciprocal law is singular at z = z0/lam = {self.z0 / self.lam}")
        return den

    def phi(self, z):
        z = np.asarray(z, dtype=float)
        return self.g / self._denominator(z) - self.a * z ** -3 + self.b

    def dphi(self, z):
        z = np.asarray(z, dtype=float)
        return self.g * self.lam / self._denominator(z) ** 2 + 3.0 * self.a * z ** -4


LAWS = {cls.tag: cls for cls in (PowerLaw, Rahbar, Reciprocal)}


def make_law(tag: str, coefficients) -> PressureLaw:
    """Build a law from its tag (``power``, ``rahbar``, ``reciprocal``)."""
    try:
        cls = LAWS[tag]
    except KeyError:
        raise ParameterError(f"unknown pressure law {tag!r}; choose from {sorted(LAWS)}") from None
    if isinstance(coefficients, dict):
        return cls(**coefficients)
    return cls(*coefficients)


def law_from_dict(data: dict) -> PressureLaw:
    data = dict(data)
    return make_law(data.pop("law"), data)


def _check_z(z):
    z = np.asarray(z, dtype=float)
    if np.any(~(z > 0)):
        raise DomainError("radius ratio z must be positive")
    return z


def phi_eval(law: PressureLaw, z):
    """Dimensionless wall pressure ``phi(z)``."""
    return law.phi(_check_z(z))


def phi_deriv(law: PressureLaw, z):
    """Analytic derivative ``dphi/dz``."""
    return law.dphi(_check_z(z))


# ---------------------------------------------------------------------------
# fitting


@dataclass
class FitReport:
    residual_norm: float
    initial_residual_norm: float
    iterations: int
    converged: bool
    damping: float
    history: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"residual_norm": self.residual_norm,
                "initial_residual_norm": self.initial_residual_norm,
                "iterations": self.iterations,
                "converged": self.converged,
                "damping": self.damping}


def _residuals(law, theta, free, z, p):
    full = law.coefficients()
    full[free] = theta
    try:
        trial = law.with_coefficients(full)
        with np.errstate(all="ignore"):
            r = trial.phi(z) - p
    except (SingularityError, ParameterError):
        return None
    if not np.all(np.isfinite(r)):
        return None
    return r


def fit_pressure_law(data, variant: str, init, fixed: Sequence[str] = (),
                     max_iter: int = 500, damping0: float = 1e-3, factor: float = 10.0,
                     fd_step: float = 1e-7, xtol: float = 1e-14, ftol: float = 1e-15,
                     max_damping: float = 1e20):
    """Least-squares fit of a pressure law by damped Gauss-Newton.

    Levenberg-Marquardt with diagonal scaling: the damping is divided by
    ``factor`` after an accepted step and multiplied by it after a rejected one,
    so the residual never increases between accepted iterates.  The Jacobian is
    a forward difference with relative step ``fd_step``.

    Parameters
    ----------
    data
        Sequence of ``(z, p)`` pairs or an ``(n, 2)`` array.
    variant
        Law tag: ``power``, ``rahbar`` or ``reciprocal``.
    init
        Initial coefficients (sequence, dict or a law instance).
    fixed
        Coefficient names held at their initial values.

    Returns
    -------
    (PressureLaw, FitReport)

    Raises
    ------
    ParameterError
        Fewer data points than free coefficients, or a bad initial guess.
    ConvergenceError
        The damped normal equations stay singular, or ``max_iter`` is hit;
        ``err.best`` is the best law found.
    """
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ParameterError("fit data must be a sequence of (z, p) pairs")
    z, p = arr[:, 0], arr[:, 1]
    _check_z(z)
    law = init if isinstance(init, PressureLaw) else make_law(variant, init)
    if law.tag != variant:
        raise ParameterError(f"initial law is {law.tag!r}, expected {variant!r}")
    unknown = set(fixed) - set(law.names)
    if unknown:
        raise ParameterError(f"cannot fix unknown coefficient(s) {sorted(unknown)}")
    free = np.array([n not in fixed for n in law.names])
    if len(z) < free.sum():
        raise ParameterError(f"need at least {free.sum()} data points, got {len(z)}")

    theta = law.coefficients()[free]
    r = _residuals(law, theta, free, z, p)
    if r is None:
        raise ParameterError("initial coefficients give non-finite residuals")
    cost = float(r @ r)
    initial = np.sqrt(cost)
    lam = damping0
    history = [initial]
    it = 0

    def best():
        full = law.coefficients()
        full[free] = theta
        return law.with_coefficients(full)

    converged = cost == 0.0
    while not converged:
        if it >= max_iter:
            raise ConvergenceError(f"no convergence after {max_iter} iterations", best=best())
        it += 1
        h = fd_step * np.maximum(np.abs(theta), 1.0)
        J = np.empty((len(z), len(theta)))
        for j in range(len(theta)):
            tj = theta.copy()
            tj[j] += h[j]
            rj = _residuals(law, tj, free, z, p)
            if rj is None:
                tj[j] = theta[j] - h[j]
                rj = _residuals(law, tj, free, z, p)
                if rj is None:
                    raise ConvergenceError("Jacobian undefined at current iterate", best=best())
                J[:, j] = (r - rj) / h[j]
            else:
                J[:, j] = (rj - r) / h[j]
        A = J.T @ J
        g = J.T @ r
        scale = np.diag(A).copy()
        scale[scale == 0] = 1.0
        while True:
            try:
                step = np.linalg.solve(A + lam * np.diag(scale), -g)
            except np.linalg.LinAlgError:
                step = None
            if step is None or not np.all(np.isfinite(step)):
                lam *= factor
                if lam > max_damping:
                    raise ConvergenceError("singular normal equations at maximum damping", best=best())
                continue
            r_new = _residuals(law, theta + step, free, z, p)
            cost_new = np.inf if r_new is None else float(r_new @ r_new)
            if cost_new < cost:
                break
            lam *= factor
            if lam > max_damping:
                # no descent direction left at machine precision: stationary point
                converged = True
                break
        if converged:
            break
        theta = theta + step
        decrease = cost - cost_new
        r, cost = r_new, cost_new
        history.append(np.sqrt(cost))
        lam = max(lam / factor, 1e-300)
        if (cost == 0.0 or decrease <= ftol * cost
                or np.linalg.norm(step) <= xtol * (np.linalg.norm(theta) + xtol)):
            converged = True

    report = FitReport(residual_norm=float(np.sqrt(cost)), initial_residual_norm=float(initial),
                       iterations=it, converged=True, damping=lam, history=history)
    return best(), report


def read_fit_csv(path) -> np.ndarray:
    """Read two-column ``z,p`` data with a header row."""
    arr = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if arr.shape[1] != 2:
        raise ParameterError(f"{path}: expected two columns (z, p)")
    return arr


def shipped_pressure_data() -> np.ndarray:
    """Bundled synthetic ``(z, p)`` set: Rahbar(2, 3, 1, 0.5, 1.5), 50 points, 1% noise, seed 0.

    Synthetic, not measured: it stands in for digitized pressure-radius data.
    """
    from importlib import resources

    with resources.files("lymphflow.data").joinpath("pressure_radius_synthetic.csv").open("r") as fh:
        return np.loadtxt(fh, delimiter=",", skiprows=1, ndmin=2)


def synthetic_pressure_data(law: PressureLaw, z, noise: float = 0.0, seed: int = 0) -> np.ndarray:
    """Samples of ``law`` with optional relative Gaussian noise (stand-in for digitized data)."""
    z = np.asarray(z, dtype=float)
    p = law.phi(z)
    if noise:
        rng = np.random.default_rng(seed)
        p = p * (1.0 + noise * rng.standard_normal(p.shape))
    return np.column_stack([z, p])


# ---------------------------------------------------------------------------
# velocity profiles

_NORM_TOL = 1e-10


@dataclass(frozen=True)
class PowerLawProfile:
    """``psi(z) = (2+g)/g * (1 - z**g)``; ``g = 2`` is Poiseuille."""

    gamma_exp: float

    def __post_init__(self):
        if not self.gamma_exp > 0:
            raise ParameterError("profile exponent must be positive", field="gamma_exp")

    def psi(self, z):
        g = self.gamma_exp
        return (2.0 + g) / g * (1.0 - np.power(z, g))

    def wall_slope(self) -> float:
        """``psi'(1)``."""
        return -(2.0 + self.gamma_exp)


class CustomProfile:
    """A user profile given as a callable or as samples on ``[0, 1]``.

    Samples are interpolated by a not-a-knot cubic spline.
    """

    def __init__(self, psi: Callable | None = None, samples=None, dpsi: Callable | None = None):
        if (psi is None) == (samples is None):
            raise ParameterError("give exactly one of psi or samples")
        self._dpsi = dpsi
        if samples is not None:
            z, v = (np.asarray(a, dtype=float) for a in samples)
            if z[0] != 0.0 or z[-1] != 1.0 or np.any(np.diff(z) <= 0):
                raise ParameterError("profile samples must be increasing and span [0, 1]")
            spline = CubicSpline(z, v)
            self._psi = spline
            self._dpsi = self._dpsi or spline.derivative()
            self._knots = z
        else:
            self._psi = psi
            self._knots = None

    def psi(self, z):
        return self._psi(z)

    def dpsi(self, z):
        if self._dpsi is not None:
            return self._dpsi(z)
        h = 1e-6
        lo, hi = max(z - h, 0.0), min(z + h, 1.0)
        return (self._psi(hi) - self._psi(lo)) / (hi - lo)

    def wall_slope(self) -> float:
        return float(self.dpsi(1.0))

    def _quad(self, f):
        pts = None if self._knots is None else self._knots[1:-1][:200]
        val, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=500, points=pts)
        return val

    def validate(self):
        """Check normalization, no-slip and the centreline symmetry condition."""
        norm = self._quad(lambda z: float(self.psi(z)) * z)
        if abs(norm - 0.5) > _NORM_TOL:
            raise ParameterError(f"profile not normalized: int psi z dz = {norm!r} (want 1/2)")
        if abs(float(self.psi(1.0))) > _NORM_TOL:
            raise ParameterError("profile must vanish at the wall")
        if abs(float(self.dpsi(0.0))) > 1e-6:
            raise ParameterError("profile slope must vanish on the axis")
        return self


def profile_integral(profile) -> float:
    """``4 * int_0^1 psi(z)**2 z dz`` by quadrature (no closed form used)."""
    if isinstance(profile, PowerLawProfile):
        f = lambda z: profile.psi(z) ** 2 * z
        val, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=500)
        return 4.0 * val
    return 4.0 * profile._quad(lambda z: float(profile.psi(z)) ** 2 * z)


def shape_factor(profile) -> float:
    """Momentum shape factor ``alpha = 4 int psi^2 z dz``.

    Closed form ``2(2+g)/(1+g)`` for :class:`PowerLawProfile`; quadrature for
    custom profiles, which are validated first.
    """
    if isinstance(profile, PowerLawProfile):
        g = profile.gamma_exp
        return 2 * (2 + g) / (1 + g)
    profile.validate()
    return profile_integral(profile)


def profile_from_dict(data: dict):
    if data.get("profile", "power") != "power":
        raise ParameterError("only power-law profiles can be read from config files")
    return PowerLawProfile(float(data.get("gamma_exp", 2.0)))


def poiseuille_velocity(r, R, p_x):
    """Axial Poiseuille velocity ``-(p_x/4) R^2 (1 - (r/R)^2)`` (lubrication units)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r > R):
        raise DomainError("Poiseuille velocity requires 0 <= r <= R")
    u = -(p_x / 4.0) * R ** 2 * (1.0 - (r / R) ** 2)
    return float(u) if u.ndim == 0 else u
