"""Cloud-induced link attenuation.

The simulator uses fixed specific attenuations applied along the slant path
through the cloud layer. The ITU cloud model and Kim's visibility model are
provided as closed-form reference calculators.
"""

from dataclasses import dataclass
import math

import numpy as np


@dataclass(frozen=True)
class BandCoefficients:
    rf_specific_attenuation: float = 3.0  # dB/km
    fso_specific_attenuation: float = 300.0  # dB/km
    fso_detector_cap: float = 100.0  # dB

    def __post_init__(self):
        if self.rf_specific_attenuation <= 0 or self.fso_specific_attenuation <= 0:
            raise ValueError("specific attenuations must be positive")
        if self.fso_detector_cap < 0:
            raise ValueError("detector cap must be non-negative")


@dataclass(frozen=True)
class DielectricParams:
    f: float  # GHz
    eps_prime: float
    eps_double_prime: float


@dataclass(frozen=True)
class VisibilityParams:
    visibility: float  # km
    wavelength: float  # nm


def slant_attenuation(thickness, elevation, specific_attenuation):
    """Attenuation in dB of a ray crossing ``thickness`` km of cloud at ``elevation``."""
    elevation = np.asarray(elevation, dtype=float)
    if np.any(elevation <= 0):
        raise ValueError("elevation must be above the horizon")
    out = specific_attenuation * np.asarray(thickness, dtype=float) / np.sin(elevation)
    return float(out) if out.ndim == 0 else out


def fso_observed_attenuation(raw, band=BandCoefficients()):
    """What the optical detector reports: the raw attenuation saturated at its cap."""
    out = np.minimum(np.asarray(raw, dtype=float), band.fso_detector_cap)
    return float(out) if out.ndim == 0 else out


def itu_specific_attenuation(params):
    """Rayleigh specific attenuation k_l in (dB/km)/(g/m^3)."""
    if params.eps_double_prime == 0:
        raise ZeroDivisionError("imaginary permittivity must be non-zero")
    eta = (2.0 + params.eps_prime) / params.eps_double_prime
    return 0.819 * params.f / (params.eps_double_prime * (1.0 + eta**2))


def itu_cloud_attenuation(L, k_l, elevation):
    """Cloud attenuation in dB for total columnar liquid ``L`` kg/m^2."""
    if elevation <= 0:
        raise ValueError("elevation must be above the horizon")
    if L < 0:
        raise ValueError("columnar liquid content must be non-negative")
    return L * k_l / math.sin(elevation)


def kim_size_exponent(visibility):
    if visibility > 50:
        return 1.6
    # V == 6 km is assigned to the average-visibility branch
    if visibility >= 6:
        return 1.3
    return 0.585 * visibility ** (1.0 / 3.0)


def kim_attenuation_coefficient(params):
    """Optical attenuation coefficient in dB/km from visibility and wavelength."""
    if params.visibility <= 0:
        raise ValueError("visibility must be positive")
    if params.wavelength <= 0:
        raise ValueError("wavelength must be positive")
    x = kim_size_exponent(params.visibility)
    return 3.91 / params.visibility * (params.wavelength / 550.0) ** (-x)
