"""Path-loss models for over-sea links.

Free space, plane-earth two-ray, round-earth two-ray with an effective
reflection coefficient (the REL family), Bullington's plane-earth-plus-shadow
method, a reduced ITU-R P.2001 evaluation (free space plus spherical-earth
diffraction under median conditions), and the empirical log-distance model.
All models return loss in dB as a function of distance.
"""

from __future__ import annotations

import cmath
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from .errors import (
    AntennaTooHigh,
    BullingtonValidityWarning,
    ConfigError,
    FrequencyOutOfRange,
    NoCoverage,
    SeaLossError,
    UnboundedRange,
    UnsupportedTimePercentage,
)
from .geometry import (
    EarthModel,
    LinkGeometry,
    fresnel60_distance,
    horizon_distance,
    reflection_geometry,
    wavelength,
)
from .sea import EffectiveReflection, Polarization, SeaState, effective_reflection

MODEL_IDS = (
    "free-space",
    "two-ray-flat",
    "two-ray-round",
    "rel",
    "bullington",
    "itu",
    "log-distance",
)

# Sea-water constants used by the spherical-earth diffraction term.
SEA_PERMITTIVITY = 80.0
SEA_CONDUCTIVITY = 5.0

MAX_RANGE_CAP = 100_000.0  # m; search cap for link-budget range solving

# Bullington's plane-earth method is stated for antennas below 15 m at
# 868 MHz; the ceiling scales as f^(-1/3) away from that band.
_BULLINGTON_CEILING_M = 15.0
_BULLINGTON_BAND = (768e6, 968e6)


@dataclass(frozen=True)
class RadioConfig:
    """Link hardware: frequency, powers, gains and receiver sensitivity (dB units)."""

    frequency: float
    tx_power: float
    tx_antenna_gain: float = 0.0
    rx_antenna_gain: float = 0.0
    polarization_loss: float = 0.0
    rx_sensitivity: float = -138.0

    def __post_init__(self):
        if not self.frequency > 0:
            raise ValueError("frequency must be positive")
        if self.polarization_loss < 0:
            raise ValueError("polarization loss must be non-negative")
        for name in ("tx_power", "tx_antenna_gain", "rx_antenna_gain", "rx_sensitivity"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def budget(self) -> float:
        """Maximum tolerable path loss: powers and gains against sensitivity."""
        return (
            self.tx_power
            + self.tx_antenna_gain
            + self.rx_antenna_gain
            - self.polarization_loss
            - self.rx_sensitivity
        )


@dataclass(frozen=True)
class LogDistanceParams:
    """Log-distance model: loss L_p0 at reference d_0 plus 10 n per decade."""

    n: float
    l_p0: float
    d_0: float

    def __post_init__(self):
        if not self.d_0 > 0:
            raise ValueError("reference distance must be positive")
        if not (math.isfinite(self.n) and math.isfinite(self.l_p0)):
            raise ValueError("parameters must be finite")


@dataclass(frozen=True)
class ItuParams:
    """Reduced ITU-R P.2001 inputs: annual time percentage and median k-factor."""

    time_percentage: float = 50.0
    median_effective_radius_factor: float = 4.0 / 3.0

    def __post_init__(self):
        if not 0.0 < self.time_percentage < 100.0:
            raise ValueError("time percentage must lie in (0, 100)")
        if not self.median_effective_radius_factor > 0:
            raise ValueError("median effective radius factor must be positive")


@dataclass(frozen=True)
class ModelCurve:
    """A model evaluated over a distance grid; unevaluable points are skipped, not faked."""

    model_id: str
    distances: tuple
    losses: tuple
    skipped: tuple = ()

    def __post_init__(self):
        if len(self.distances) != len(self.losses):
            raise ValueError("distances and losses must have equal length")
        for a, b in zip(self.distances, self.distances[1:]):
            if not b > a:
                raise ValueError("distances must be strictly increasing")
        if any(not math.isfinite(v) for v in self.losses):
            raise ValueError("losses must be finite")


@dataclass(frozen=True)
class ModelContext:
    """Everything the model family needs besides the distance.

    The antenna heights and earth model act as the link template; per-point
    geometries are produced with geometry_at(d).
    """

    h_t: float
    h_r: float
    frequency: float
    earth: EarthModel = field(default_factory=EarthModel)
    sea: SeaState = field(default_factory=SeaState)
    polarization: Polarization = Polarization.VERTICAL
    itu: ItuParams = field(default_factory=ItuParams)
    log_distance: LogDistanceParams | None = None

    def geometry_at(self, d: float) -> LinkGeometry:
        return LinkGeometry(h_t=self.h_t, h_r=self.h_r, d=d, earth=self.earth)


def free_space_loss(d: float, frequency: float) -> float:
    """Free-space path loss 20 log10(4 pi d / lambda) in dB."""
    if d <= 0:
        raise ValueError("distance must be positive")
    return 20.0 * math.log10(4.0 * math.pi * d / wavelength(frequency))


def _two_ray_db(l: float, r: float, reflection: complex, frequency: float) -> float:
    """Two-ray loss given direct length l, reflected length r and coefficient R."""
    lam = wavelength(frequency)
    phase = 2.0 * math.pi * (r - l) / lam
    field_sum = 1.0 / l + reflection * cmath.exp(1j * phase) / r
    # |1/l + R e^{j phi}/r| >= 1/l - |R|/r > 0 for |R| <= 1 and r > l, so the
    # log never sees zero for passive reflections.
    return 20.0 * math.log10(4.0 * math.pi / lam) - 20.0 * math.log10(abs(field_sum))


def two_ray_flat(
    d: float,
    h_t: float,
    h_r: float,
    frequency: float,
    reflection: complex = -1.0,
) -> float:
    """Plane-earth two-ray loss with an arbitrary reflection coefficient.

    The direct ray has length sqrt(d^2 + (h_t - h_r)^2), the reflected one
    sqrt(d^2 + (h_t + h_r)^2) via the image point; equal antenna gain is
    assumed toward both rays.  reflection = 0 degenerates to free space over
    the direct-ray length.
    """
    if d <= 0:
        raise ValueError("distance must be positive")
    l = math.hypot(d, h_t - h_r)
    r = math.hypot(d, h_t + h_r)
    return _two_ray_db(l, r, complex(reflection), frequency)


def two_ray_round_earth(g: LinkGeometry, frequency: float, r_eff: EffectiveReflection) -> float:
    """Two-ray loss in the round-earth geometry with an effective reflection.

    Ray lengths come from the specular-point solution on the curved sea;
    raises NoSpecularPoint beyond the horizon.
    """
    rg = reflection_geometry(g)
    return _two_ray_db(rg.l, rg.x + rg.x_prime, r_eff.value, frequency)


def _first_term_diffraction(
    d_m: float,
    h_t: float,
    h_r: float,
    radius_m: float,
    frequency: float,
    polarization: Polarization,
    permittivity: float,
    conductivity: float,
) -> float:
    """First-term residue-series smooth-sphere attenuation, dB over free space.

    Normalized-coordinate form (distance term F(X) plus height-gain terms
    G(Y)) with the surface-admittance factor K and ground parameter beta; the
    inner formulas are bound to GHz / km / m units.
    """
    f_ghz = frequency / 1e9
    a_km = radius_m / 1000.0
    d_km = d_m / 1000.0
    k_factor = (
        0.036
        * (a_km * f_ghz) ** (-1.0 / 3.0)
        * ((permittivity - 1.0) ** 2 + (18.0 * conductivity / f_ghz) ** 2) ** (-1.0 / 4.0)
    )
    if polarization is not Polarization.HORIZONTAL:
        k_factor *= math.sqrt(permittivity ** 2 + (18.0 * conductivity / f_ghz) ** 2)
    k2 = k_factor * k_factor
    beta = (1.0 + 1.6 * k2 + 0.67 * k2 * k2) / (1.0 + 4.5 * k2 + 1.53 * k2 * k2)

    x_norm = 21.88 * beta * (f_ghz / a_km ** 2) ** (1.0 / 3.0) * d_km
    if x_norm >= 1.6:
        f_x = 11.0 + 10.0 * math.log10(x_norm) - 17.6 * x_norm
    else:
        f_x = -20.0 * math.log10(x_norm) - 5.6488 * x_norm ** 1.425

    def height_gain(h: float) -> float:
        y_norm = 0.9575 * beta * (f_ghz ** 2 / a_km) ** (1.0 / 3.0) * h
        b = beta * y_norm
        if b > 2.0:
            g_y = 17.6 * math.sqrt(b - 1.1) - 5.0 * math.log10(b - 1.1) - 8.0
        else:
            g_y = 20.0 * math.log10(b + 0.1 * b ** 3)
        return max(g_y, 2.0 + 20.0 * math.log10(k_factor))

    return -f_x - height_gain(h_t) - height_gain(h_r)


def smooth_earth_diffraction_loss(
    g: LinkGeometry,
    frequency: float,
    polarization: Polarization = Polarization.VERTICAL,
    permittivity: float = SEA_PERMITTIVITY,
    conductivity: float = SEA_CONDUCTIVITY,
) -> float:
    """Smooth-sea spherical-earth diffraction loss in dB over free space.

    First-term residue-series attenuation with the link's effective earth
    radius; floored at 0 dB where the term would predict gain at short range.
    """
    if g.d <= 0:
        raise ValueError("distance must be positive")
    loss = _first_term_diffraction(
        g.d, g.h_t, g.h_r, g.earth.effective_radius, frequency,
        polarization, permittivity, conductivity,
    )
    return max(0.0, loss)


def _check_bullington_heights(g: LinkGeometry, frequency: float) -> None:
    h_max = max(g.h_t, g.h_r)
    if _BULLINGTON_BAND[0] <= frequency <= _BULLINGTON_BAND[1]:
        if h_max > _BULLINGTON_CEILING_M:
            raise AntennaTooHigh(
                f"antenna height {h_max:.1f} m exceeds the {_BULLINGTON_CEILING_M:.0f} m "
                f"Bullington ceiling at {frequency / 1e6:.0f} MHz"
            )
    else:
        ceiling = _BULLINGTON_CEILING_M * (868e6 / frequency) ** (1.0 / 3.0)
        if h_max > ceiling:
            warnings.warn(
                f"antenna height {h_max:.1f} m exceeds the scaled Bullington ceiling "
                f"{ceiling:.1f} m at {frequency / 1e6:.0f} MHz",
                BullingtonValidityWarning,
                stacklevel=3,
            )


def _log_bridge(d: float, d_60: float, d_h: float, end_value: float) -> float:
    """Diffraction onset bridged linearly in log10(d) from 0 at d_60 to end_value at d_h."""
    if d <= d_60 or d_60 >= d_h:
        return 0.0
    frac = (math.log10(d) - math.log10(d_60)) / (math.log10(d_h) - math.log10(d_60))
    return end_value * min(frac, 1.0)


def bullington_loss(g: LinkGeometry, frequency: float) -> float:
    """Plane-earth two-ray over a perfect conductor plus a shadow-loss correction.

    Within the horizon the loss is the plane-earth two-ray result with R = -1;
    the shadow loss relative to that plane-earth field is bridged linearly in
    log10(d) from 0 at the 60 %-clearance distance to its horizon value, and
    beyond the horizon the loss is free space plus the smooth-sphere
    diffraction term.  Both seams are continuous by construction.

    Raises AntennaTooHigh above the 15 m validity ceiling near 868 MHz; at
    other frequencies a BullingtonValidityWarning is emitted above the
    f^(-1/3)-scaled ceiling instead.
    """
    _check_bullington_heights(g, frequency)
    d_h = horizon_distance(g)
    if g.d >= d_h:
        return free_space_loss(g.d, frequency) + smooth_earth_diffraction_loss(g, frequency)
    d_60 = fresnel60_distance(g, frequency)
    flat = two_ray_flat(g.d, g.h_t, g.h_r, frequency, reflection=-1.0)
    horizon_g = replace(g, d=d_h)
    shadow_at_horizon = (
        free_space_loss(d_h, frequency)
        + smooth_earth_diffraction_loss(horizon_g, frequency)
        - two_ray_flat(d_h, g.h_t, g.h_r, frequency, reflection=-1.0)
    )
    return flat + _log_bridge(g.d, d_60, d_h, shadow_at_horizon)


def rel_loss(
    g: LinkGeometry,
    frequency: float,
    sea: SeaState,
    pol: Polarization = Polarization.VERTICAL,
) -> float:
    """Round-earth two-ray with an effective sea reflection plus diffraction onset.

    The two-ray term uses the composed reflection coefficient (Fresnel x
    roughness x shadowing x divergence); the smooth-sphere diffraction loss is
    bridged in from 0 at the 60 %-clearance distance to its full horizon value
    at d_h.  Beyond the horizon, where no specular point exists, the loss
    degrades gracefully to free space plus the full diffraction term.
    """
    d_h = horizon_distance(g)
    if g.d >= d_h:
        return free_space_loss(g.d, frequency) + smooth_earth_diffraction_loss(g, frequency)
    d_60 = fresnel60_distance(g, frequency)
    r_eff = effective_reflection(g, frequency, sea, pol)
    base = two_ray_round_earth(g, frequency, r_eff)
    horizon_g = replace(g, d=d_h)
    diffraction_at_horizon = smooth_earth_diffraction_loss(horizon_g, frequency)
    return base + _log_bridge(g.d, d_60, d_h, diffraction_at_horizon)


def _itu_spherical_diffraction(
    d_m: float,
    h_t: float,
    h_r: float,
    radius_m: float,
    frequency: float,
    polarization: Polarization,
) -> float:
    """Spherical-earth diffraction loss with marginal-LoS interpolation.

    Beyond the marginal line-of-sight distance the first term applies
    directly; inside it, the smallest clearance of the curved-earth ray is
    compared with the clearance needed for zero diffraction loss, and the
    first term evaluated at the effective radius that would make the path
    marginally line-of-sight is scaled accordingly.  km / m units inside.
    """
    a_km = radius_m / 1000.0
    d_km = d_m / 1000.0
    lam = wavelength(frequency)

    def first_term(adft_km: float) -> float:
        return _first_term_diffraction(
            d_m, h_t, h_r, adft_km * 1000.0, frequency,
            polarization, SEA_PERMITTIVITY, SEA_CONDUCTIVITY,
        )

    d_los = math.sqrt(2.0 * a_km) * (math.sqrt(0.001 * h_t) + math.sqrt(0.001 * h_r))
    if d_km >= d_los:
        return max(0.0, first_term(a_km))

    # Smallest clearance between the curved-earth path and the direct ray.
    c = (h_t - h_r) / (h_t + h_r)
    m = 250.0 * d_km * d_km / (a_km * (h_t + h_r))
    b = (
        2.0
        * math.sqrt((m + 1.0) / (3.0 * m))
        * math.cos(
            math.pi / 3.0
            + math.acos(1.5 * c * math.sqrt(3.0 * m / (m + 1.0) ** 3)) / 3.0
        )
    )
    d_se1 = 0.5 * d_km * (1.0 + b)
    d_se2 = d_km - d_se1
    h_se = (
        (h_t - 500.0 * d_se1 * d_se1 / a_km) * d_se2
        + (h_r - 500.0 * d_se2 * d_se2 / a_km) * d_se1
    ) / d_km
    h_req = 17.456 * math.sqrt(d_se1 * d_se2 * lam / d_km)
    if h_se > h_req:
        return 0.0
    a_marginal = 500.0 * (d_km / (math.sqrt(h_t) + math.sqrt(h_r))) ** 2
    loss = first_term(a_marginal)
    if loss < 0.0:
        return 0.0
    return (1.0 - h_se / h_req) * loss


def itu_p2001_reduced_loss(
    g: LinkGeometry,
    frequency: float,
    itu: ItuParams,
    polarization: Polarization = Polarization.VERTICAL,
) -> float:
    """Reduced ITU-R P.2001 loss: free space plus spherical-sea diffraction.

    Only the normal-propagation path under median conditions is evaluated;
    the diffraction term uses the model's own median effective radius factor
    rather than the link's.  Raises FrequencyOutOfRange outside 30 MHz-50 GHz
    and UnsupportedTimePercentage for any time percentage other than 50.
    """
    if not 30e6 <= frequency <= 50e9:
        raise FrequencyOutOfRange(
            f"{frequency / 1e6:.1f} MHz outside the 30 MHz - 50 GHz model range"
        )
    if itu.time_percentage != 50.0:
        raise UnsupportedTimePercentage(
            "only the median (T_pc = 50) path is computed by the reduced model"
        )
    radius_m = itu.median_effective_radius_factor * g.earth.true_radius
    diffraction = _itu_spherical_diffraction(
        g.d, g.h_t, g.h_r, radius_m, frequency, polarization
    )
    return free_space_loss(g.d, frequency) + diffraction


def log_distance_loss(d: float, p: LogDistanceParams) -> float:
    """Empirical log-distance loss L_p0 + 10 n log10(d / d_0)."""
    if d <= 0:
        raise ValueError("distance must be positive")
    return p.l_p0 + 10.0 * p.n * math.log10(d / p.d_0)


def evaluate_model(model_id: str, ctx: ModelContext, d: float) -> float:
    """Evaluate one model of the family at a single distance."""
    if model_id == "free-space":
        return free_space_loss(d, ctx.frequency)
    if model_id == "two-ray-flat":
        return two_ray_flat(d, ctx.h_t, ctx.h_r, ctx.frequency, reflection=-1.0)
    if model_id == "two-ray-round":
        g = ctx.geometry_at(d)
        r_eff = effective_reflection(g, ctx.frequency, ctx.sea, ctx.polarization)
        return two_ray_round_earth(g, ctx.frequency, r_eff)
    if model_id == "rel":
        return rel_loss(ctx.geometry_at(d), ctx.frequency, ctx.sea, ctx.polarization)
    if model_id == "bullington":
        return bullington_loss(ctx.geometry_at(d), ctx.frequency)
    if model_id == "itu":
        return itu_p2001_reduced_loss(ctx.geometry_at(d), ctx.frequency, ctx.itu, ctx.polarization)
    if model_id == "log-distance":
        if ctx.log_distance is None:
            raise ConfigError("log-distance model requires fitted parameters in the context")
        return log_distance_loss(d, ctx.log_distance)
    raise ConfigError(f"unknown model id: {model_id!r}")


def distance_grid(d_min: float, d_max: float, n_points: int, spacing: str = "log") -> list:
    """Distance grid with exact endpoints, linear or logarithmic."""
    d_min, d_max = float(d_min), float(d_max)
    if not 0 < d_min < d_max:
        raise ValueError("require 0 < d_min < d_max")
    if n_points < 2:
        raise ValueError("need at least two grid points")
    if spacing == "linear":
        step = (d_max - d_min) / (n_points - 1)
        grid = [d_min + i * step for i in range(n_points)]
    elif spacing == "log":
        lg_min, lg_max = math.log10(d_min), math.log10(d_max)
        step = (lg_max - lg_min) / (n_points - 1)
        grid = [10.0 ** (lg_min + i * step) for i in range(n_points)]
    else:
        raise ValueError(f"unknown spacing: {spacing!r}")
    grid[0], grid[-1] = d_min, d_max
    return grid


def sweep(
    model_id: str,
    ctx: ModelContext,
    d_min: float,
    d_max: float,
    n_points: int,
    spacing: str = "log",
    threads: int = 1,
) -> ModelCurve:
    """Evaluate a model over a distance grid into a ModelCurve.

    Distances where the model raises a domain error (e.g. a beyond-horizon
    two-ray) are recorded in the curve's skipped list rather than fabricated.
    Results are identical regardless of the thread count since points are
    gathered in grid order.
    """
    grid = distance_grid(d_min, d_max, n_points, spacing)

    def one(d: float):
        try:
            return evaluate_model(model_id, ctx, d)
        except ConfigError:
            raise  # not a per-point domain error
        except SeaLossError as exc:
            return exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, grid))
    else:
        results = [one(d) for d in grid]

    distances, losses, skipped = [], [], []
    for d, res in zip(grid, results):
        if isinstance(res, SeaLossError):
            skipped.append((d, f"{type(res).__name__}: {res}"))
        else:
            distances.append(d)
            losses.append(res)
    return ModelCurve(
        model_id=model_id,
        distances=tuple(distances),
        losses=tuple(losses),
        skipped=tuple(skipped),
    )


def max_range(
    model_id: str,
    ctx: ModelContext,
    radio: RadioConfig,
    d_min: float = 1.0,
    d_cap: float = MAX_RANGE_CAP,
) -> float:
    """Largest distance at which the link budget still closes, in metres.

    A dense logarithmic scan locates the outermost distance where the
    predicted loss stays within the budget (robust against the oscillatory
    two-ray region), then the crossing is refined by bisection.

    Raises NoCoverage if the budget fails even at d_min and UnboundedRange if
    it still holds at the search cap.
    """
    budget = radio.budget

    def closes(d: float) -> bool:
        try:
            return evaluate_model(model_id, ctx, d) <= budget
        except ConfigError:
            raise
        except SeaLossError:
            return False

    n_scan = 2048
    grid = distance_grid(d_min, d_cap, n_scan, "log")
    ok = [closes(d) for d in grid]
    if ok[-1]:
        raise UnboundedRange(d_cap)
    last = max((i for i, v in enumerate(ok) if v), default=-1)
    if last < 0:
        raise NoCoverage(f"budget {budget:.1f} dB fails even at {d_min:.0f} m")
    lo, hi = grid[last], grid[last + 1]
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if closes(mid):
            lo = mid
        else:
            hi = mid
    return lo
