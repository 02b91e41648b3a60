"""Electrical and statistical description of the sea surface.

Everything that turns the ideal reflection coefficient of the two-ray model
into an effective one: lossy-dielectric Fresnel coefficients for sea water,
Miller-Brown-Vegh specular roughness attenuation, Smith shadowing by the
surface slopes, and the spherical-earth divergence factor.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

from scipy.special import erfc, i0e

from .geometry import LinkGeometry, ReflectionGeometry, reflection_geometry, wavelength

VACUUM_PERMITTIVITY = 8.8541878128e-12  # F/m


class Polarization(str, Enum):
    VERTICAL = "vertical"
    HORIZONTAL = "horizontal"
    # Circular links take the vertical coefficient for the specular term; the
    # 3 dB polarisation mismatch belongs in the link budget, not here.
    CIRCULAR = "circular"


@dataclass(frozen=True)
class SeaState:
    """Statistical roughness and electrical parameters of the sea surface.

    sigma_h is the surface-HEIGHT standard deviation in metres (the
    conventional pairing with an RMS slope; some texts blur the two) and
    beta_0 the RMS surface slope in radians; sigma_h = beta_0 = 0 is a
    perfectly smooth sea.  The defaults are placeholder values for a
    moderately rough sea and UHF sea water, not measured constants.
    """

    sigma_h: float = 0.1
    beta_0: float = 0.05
    relative_permittivity: float = 70.0
    conductivity: float = 5.0

    def __post_init__(self):
        if self.sigma_h < 0 or self.beta_0 < 0:
            raise ValueError("roughness parameters must be non-negative")
        if not self.relative_permittivity > 1:
            raise ValueError("relative permittivity must exceed 1")
        if self.conductivity < 0:
            raise ValueError("conductivity must be non-negative")

    def complex_permittivity(self, frequency: float) -> complex:
        """eps_r - j sigma / (2 pi f eps_0) for the e^{+j omega t} convention."""
        return complex(
            self.relative_permittivity,
            -self.conductivity / (2.0 * math.pi * frequency * VACUUM_PERMITTIVITY),
        )


@dataclass(frozen=True)
class EffectiveReflection:
    """Composed reflection coefficient with its component breakdown retained."""

    magnitude: float
    phase: float
    fresnel: complex
    roughness: float
    shadowing: float
    divergence: float

    def __post_init__(self):
        recomposed = abs(self.fresnel) * self.roughness * self.shadowing * self.divergence
        if abs(self.magnitude - recomposed) > 1e-12:
            raise ValueError("magnitude does not equal the product of its components")

    @property
    def components(self) -> dict:
        return {
            "fresnel": self.fresnel,
            "roughness": self.roughness,
            "shadowing": self.shadowing,
            "divergence": self.divergence,
        }

    @property
    def value(self) -> complex:
        """The effective coefficient as a complex number."""
        return self.magnitude * cmath.exp(1j * self.phase)


def fresnel_reflection(
    grazing_angle: float,
    frequency: float,
    sea: SeaState,
    pol: Polarization = Polarization.VERTICAL,
) -> complex:
    """Fresnel reflection coefficient of the lossy sea at a grazing angle.

    Standard smooth-surface coefficients for a dielectric with complex
    permittivity eps = eps_r - j sigma/(2 pi f eps_0).  Circular polarisation
    is evaluated with the vertical coefficient (dominant co-polar term of the
    sea reflection; documented simplification).  Both linear coefficients tend
    to -1 at grazing incidence.
    """
    if not 0.0 < grazing_angle <= math.pi / 2.0:
        raise ValueError("grazing angle must lie in (0, pi/2]")
    eps = sea.complex_permittivity(frequency)
    sin_psi = math.sin(grazing_angle)
    cos2_psi = math.cos(grazing_angle) ** 2
    root = cmath.sqrt(eps - cos2_psi)
    if pol is Polarization.HORIZONTAL:
        return (sin_psi - root) / (sin_psi + root)
    return (eps * sin_psi - root) / (eps * sin_psi + root)


def roughness_factor(
    grazing_angle: float,
    wavelength: float,
    sea: SeaState,
    method: str = "miller-brown",
) -> float:
    """Specular scattering attenuation of a rough sea, in [0, 1].

    Miller-Brown-Vegh: rho = exp(-2 g^2) I0(2 g^2) with the Rayleigh roughness
    parameter g = 2 pi sigma_h sin(psi) / lambda.  method="ament" gives the
    plain exp(-2 g^2) factor instead.
    """
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    g = 2.0 * math.pi * sea.sigma_h * math.sin(grazing_angle) / wavelength
    if method == "miller-brown":
        # i0e(x) = exp(-x) I0(x), so this is exp(-2g^2) I0(2g^2) without overflow.
        return float(i0e(2.0 * g * g))
    if method == "ament":
        return math.exp(-2.0 * g * g)
    raise ValueError(f"unknown roughness method: {method!r}")


def shadowing_factor(grazing_angle: float, sea: SeaState) -> float:
    """Smith shadowing function for a Gaussian-slope surface, in [0, 1].

    S = (1 - erfc(v)/2) / (Lambda(v) + 1) with v = tan(psi) / (sqrt(2) beta_0)
    and Lambda(v) = (exp(-v^2) / (v sqrt(pi)) - erfc(v)) / 2.  A zero RMS
    slope means no shadowing.
    """
    if grazing_angle <= 0:
        raise ValueError("grazing angle must be positive")
    if sea.beta_0 == 0.0:
        return 1.0
    v = math.tan(grazing_angle) / (math.sqrt(2.0) * sea.beta_0)
    erfc_v = float(erfc(v))
    lam = (math.exp(-v * v) / (v * math.sqrt(math.pi)) - erfc_v) / 2.0
    return (1.0 - erfc_v / 2.0) / (lam + 1.0)


def divergence_factor(rg: ReflectionGeometry, g: LinkGeometry) -> float:
    """Amplitude reduction of the reflected ray from defocusing by the convex earth.

    Classical spherical-earth form D = [1 + 2 x x' / (r_e (x + x') sin psi)]^(-1/2)
    evaluated with the tangent-plane quantities of the reflection geometry.
    """
    r_e = g.earth.effective_radius
    x, xp = rg.ground_x, rg.ground_x_prime
    term = 2.0 * x * xp / (r_e * (x + xp) * math.sin(rg.grazing_angle))
    return 1.0 / math.sqrt(1.0 + term)


def effective_reflection(
    g: LinkGeometry,
    frequency: float,
    sea: SeaState,
    pol: Polarization = Polarization.VERTICAL,
    include_roughness: bool = True,
    include_shadowing: bool = True,
    include_divergence: bool = True,
    roughness_method: str = "miller-brown",
) -> EffectiveReflection:
    """Compose Fresnel x roughness x shadowing x divergence for a link.

    Each statistical factor can be toggled off (it then enters as 1) so the
    contributions stay auditable one at a time.  Raises NoSpecularPoint
    beyond the horizon (propagated from the geometry).
    """
    rg = reflection_geometry(g)
    fresnel = fresnel_reflection(rg.grazing_angle, frequency, sea, pol)
    rho = (
        roughness_factor(rg.grazing_angle, wavelength(frequency), sea, roughness_method)
        if include_roughness else 1.0
    )
    shadow = shadowing_factor(rg.grazing_angle, sea) if include_shadowing else 1.0
    div = divergence_factor(rg, g) if include_divergence else 1.0
    return EffectiveReflection(
        magnitude=abs(fresnel) * rho * shadow * div,
        phase=cmath.phase(fresnel),
        fresnel=fresnel,
        roughness=rho,
        shadowing=shadow,
        divergence=div,
    )
