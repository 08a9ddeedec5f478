"""Temperature-dependent material coefficients.

The thermal model needs two coefficient curves: the effective volumetric
heat capacity s(T) in J/(m^3 K), which carries the enthalpy of fusion as a
bump smeared over the solidus-liquidus corridor, and the effective thermal
conductivity, split into a radial and an axial curve to model
convection-enhanced transfer in the melt pool.  All curves are C1 piecewise
cubics with linear tails, built from linear least-squares fits to sample
data in the purely solid and purely liquid ranges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

import numpy as np
import yaml

from .errors import InvalidDataError, InvalidModelError

# Range over which coefficient curves must stay positive, sampled at 1 K.
POSITIVITY_RANGE_K = (250.0, 3500.0)


def fit_linear_segment(samples):
    """Ordinary least-squares line through (temperature, value) samples.

    Returns (slope, intercept).  Requires at least two samples with
    distinct temperatures; data generated from an exact line is reproduced
    with zero residual (up to rounding).
    """
    pts = np.asarray(samples, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise InvalidDataError("need at least two (temperature, value) samples")
    t, v = pts[:, 0], pts[:, 1]
    tm = t.mean()
    var = np.sum((t - tm) ** 2)
    if var == 0.0:
        raise InvalidDataError("all sample temperatures are equal")
    slope = np.sum((t - tm) * (v - v.mean())) / var
    intercept = v.mean() - slope * tm
    return float(slope), float(intercept)


@dataclass(frozen=True)
class PhaseConstants:
    """Solid/liquid transition data of the alloy.

    latent_heat is the specific enthalpy of fusion (J/kg); it is
    volumetrized with reference_density (kg/m^3) when embedded into the
    effective heat capacity.
    """

    solidus: float
    liquidus: float
    latent_heat: float
    reference_density: float

    def __post_init__(self):
        if not self.solidus < self.liquidus:
            raise InvalidDataError(
                f"solidus ({self.solidus}) must lie below liquidus ({self.liquidus})"
            )
        if self.latent_heat <= 0 or self.reference_density <= 0:
            raise InvalidDataError("latent_heat and reference_density must be positive")

    @property
    def volumetric_latent_heat(self):
        """Enthalpy of fusion per unit volume, J/m^3."""
        return self.latent_heat * self.reference_density


@dataclass(frozen=True)
class CubicSpline:
    """C1 piecewise cubic in Hermite form with linear extrapolation tails.

    knots are strictly increasing; values/derivs give the function value
    and first derivative at each knot.  Interval coefficients (power basis
    in theta - knot[i]) are derived once; outside the knot range the curve
    continues linearly with the boundary slope.
    """

    knots: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    coeffs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        values = np.asarray(self.values, dtype=float)
        derivs = np.asarray(self.derivs, dtype=float)
        if knots.ndim != 1 or knots.size < 2:
            raise InvalidDataError("spline needs at least two knots")
        if not (np.diff(knots) > 0).all():
            raise InvalidDataError("spline knots must be strictly increasing")
        if values.shape != knots.shape or derivs.shape != knots.shape:
            raise InvalidDataError("values/derivs must match the knot count")
        h = np.diff(knots)
        v0, v1 = values[:-1], values[1:]
        d0, d1 = derivs[:-1], derivs[1:]
        # Hermite cubic -> power basis on each interval.
        c0 = v0
        c1 = d0
        c2 = (3.0 * (v1 - v0) / h - 2.0 * d0 - d1) / h
        c3 = (2.0 * (v0 - v1) / h + d0 + d1) / h**2
        coeffs = np.stack([c0, c1, c2, c3], axis=1)
        for name, arr in (("knots", knots), ("values", values),
                          ("derivs", derivs), ("coeffs", coeffs)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def _locate(self, theta):
        theta = np.asarray(theta, dtype=float)
        if np.isnan(theta).any():
            raise InvalidDataError("spline evaluated at NaN temperature")
        # interval index, clipped so tails reuse the boundary cubic's
        # endpoint value/slope (tail evaluation is explicitly linear below)
        idx = np.clip(np.searchsorted(self.knots, theta, side="right") - 1,
                      0, len(self.knots) - 2)
        return theta, idx

    def __call__(self, theta):
        theta, idx = self._locate(theta)
        lo, hi = self.knots[0], self.knots[-1]
        t = theta - self.knots[idx]
        c = self.coeffs[idx]
        inner = c[..., 0] + t * (c[..., 1] + t * (c[..., 2] + t * c[..., 3]))
        below = self.values[0] + self.derivs[0] * (theta - lo)
        above = self.values[-1] + self.derivs[-1] * (theta - hi)
        out = np.where(theta < lo, below, np.where(theta > hi, above, inner))
        return out if out.ndim else float(out)

    def derivative(self, theta):
        theta, idx = self._locate(theta)
        lo, hi = self.knots[0], self.knots[-1]
        t = theta - self.knots[idx]
        c = self.coeffs[idx]
        inner = c[..., 1] + t * (2.0 * c[..., 2] + t * 3.0 * c[..., 3])
        out = np.where(theta < lo, self.derivs[0],
                       np.where(theta > hi, self.derivs[-1], inner))
        return out if out.ndim else float(out)

    @classmethod
    def constant(cls, value):
        """Constant curve, handy for verification problems."""
        return cls(knots=np.array([0.0, 1.0]),
                   values=np.array([value, value]),
                   derivs=np.array([0.0, 0.0]))


def _check_side(samples, bound, side, what):
    pts = np.asarray(samples, dtype=float)
    if side == "below" and (pts[:, 0] > bound).any():
        raise InvalidDataError(f"{what} samples must lie at or below {bound} K")
    if side == "above" and (pts[:, 0] < bound).any():
        raise InvalidDataError(f"{what} samples must lie at or above {bound} K")


def _hermite_mid(h, v0, d0, v1, d1):
    # value and slope of the corridor fill cubic at the interval midpoint
    vm = 0.5 * (v0 + v1) + h * (d0 - d1) / 8.0
    dm = 1.5 * (v1 - v0) / h - 0.25 * (d0 + d1)
    return vm, dm


def build_heat_capacity(solid_samples, liquid_samples, phase):
    """Effective volumetric heat capacity spline s(T).

    Three steps: least-squares lines through the solid and liquid samples,
    the unique C1 cubic filling the solidus-liquidus gap, and a symmetric
    two-piece cubic bump on the corridor (zero value and slope at both
    ends) whose integral equals the volumetric enthalpy of fusion.
    """
    _check_side(solid_samples, phase.solidus, "below", "solid")
    _check_side(liquid_samples, phase.liquidus, "above", "liquid")
    a_s, b_s = fit_linear_segment(solid_samples)
    a_l, b_l = fit_linear_segment(liquid_samples)

    sol, liq = phase.solidus, phase.liquidus
    h = liq - sol
    mid = sol + 0.5 * h
    v0 = a_s * sol + b_s
    v1 = a_l * liq + b_l
    vm, dm = _hermite_mid(h, v0, a_s, v1, a_l)
    # bump peak: two mirrored cubics with flat ends integrate to peak*(h/2)
    peak = phase.volumetric_latent_heat / (0.5 * h)
    return CubicSpline(
        knots=np.array([sol, mid, liq]),
        values=np.array([v0, vm + peak, v1]),
        derivs=np.array([a_s, dm, a_l]),
    )


def build_conductivity(solid_samples, liquid_slope_rad, liquid_slope_ax, phase):
    """Radial and axial effective conductivity splines.

    Both equal the solid-range least-squares line below the solidus.  Above
    the liquidus they continue from the solid line's liquidus value with
    the supplied slopes (radial raised, axial lowered by melt convection).
    The corridor is filled with the unique C1 cubic.
    """
    _check_side(solid_samples, phase.solidus, "below", "solid")
    a_s, b_s = fit_linear_segment(solid_samples)
    sol, liq = phase.solidus, phase.liquidus
    v0 = a_s * sol + b_s
    v1 = a_s * liq + b_s

    def one(slope_liquid):
        spline = CubicSpline(
            knots=np.array([sol, liq]),
            values=np.array([v0, v1]),
            derivs=np.array([a_s, slope_liquid]),
        )
        _require_positive(spline, "conductivity")
        return spline

    return one(liquid_slope_rad), one(liquid_slope_ax)


def _require_positive(spline, name):
    lo, hi = POSITIVITY_RANGE_K
    theta = np.arange(lo, hi + 1.0)
    vals = spline(theta)
    if not (vals > 0.0).all():
        bad = theta[np.argmin(vals)]
        raise InvalidModelError(
            f"{name} curve is non-positive near {bad:.0f} K; "
            "check samples and liquid extrapolation slopes"
        )


@dataclass(frozen=True)
class MaterialModel:
    """Bundle of coefficient curves and phase constants.

    Immutable after construction; safe to share between threads and
    processes.  absorptivity is the fraction of incident laser power
    deposited through the irradiated surface.
    """

    s: CubicSpline
    kappa_rad: CubicSpline
    kappa_ax: CubicSpline
    phase: PhaseConstants
    absorptivity: float

    def __post_init__(self):
        if not 0.0 < self.absorptivity <= 1.0:
            raise InvalidModelError("absorptivity must lie in (0, 1]")
        _require_positive(self.s, "heat capacity")
        _require_positive(self.kappa_rad, "radial conductivity")
        _require_positive(self.kappa_ax, "axial conductivity")


def material_from_dict(cfg):
    """Build a MaterialModel from a parsed material config mapping."""
    try:
        ph = cfg["phase"]
        phase = PhaseConstants(
            solidus=float(ph["solidus_K"]),
            liquidus=float(ph["liquidus_K"]),
            latent_heat=float(ph["latent_heat_J_kg"]),
            reference_density=float(ph["reference_density_kg_m3"]),
        )
        s = build_heat_capacity(
            cfg["heat_capacity"]["solid_samples"],
            cfg["heat_capacity"]["liquid_samples"],
            phase,
        )
        kr, ka = build_conductivity(
            cfg["conductivity"]["solid_samples"],
            float(cfg["conductivity"]["liquid_slope_radial"]),
            float(cfg["conductivity"]["liquid_slope_axial"]),
            phase,
        )
        return MaterialModel(s=s, kappa_rad=kr, kappa_ax=ka, phase=phase,
                             absorptivity=float(cfg["absorptivity"]))
    except KeyError as err:
        raise InvalidDataError(f"material config is missing key {err}") from err


def load_material(path=None):
    """Load a material config file, or the packaged default dataset."""
    if path is None:
        text = resources.files("weldopt.data").joinpath("default_material.yaml").read_text()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    return material_from_dict(yaml.safe_load(text))


def dump_coefficient_table(material, path, lo=None, hi=None):
    """Write (theta, s, kappa_rad, kappa_ax) CSV at 1 K resolution."""
    lo = POSITIVITY_RANGE_K[0] if lo is None else lo
    hi = POSITIVITY_RANGE_K[1] if hi is None else hi
    theta = np.arange(lo, hi + 1.0)
    table = np.column_stack([theta, material.s(theta),
                             material.kappa_rad(theta),
                             material.kappa_ax(theta)])
    header = "theta_K,s_J_m3K,kappa_rad_W_mK,kappa_ax_W_mK"
    np.savetxt(path, table, delimiter=",", header=header, comments="")
