"""Stationary-phase closed form of the plate return.

For each pair the oscillatory plate integral collapses around the specular
point (y = 0, z_s = (z_l + z_l')/2), giving the per-pair model

    u(t) = xi * alpha * exp(-j 2 k r_s) / r_s * s(t - 2 r_s / c)

with xi = -k eta L^2 I0 / (8 pi) common to all pairs and alpha a product of
conjugate Fresnel integrals measuring how much of the plate contributes:

    alpha = F*(sqrt(Dy^2 / (lambda r_s)))
            * [F*((Dz/2 - z_s) 2R / sqrt(lambda r_s^3))
               + F*((Dz/2 + z_s) 2R / sqrt(lambda r_s^3))]
            * 1{|z_s| <= Dz/2}

The two z arguments are the distances from the specular point to the plate
edges in Fresnel units; both are nonnegative whenever the specular point is
on the plate. The array-valued helpers at the bottom are the same formulas
broadcast over hypothesized ranges; the estimator builds its model signals
from them so there is exactly one implementation of the physics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import SPEED_OF_LIGHT, AntennaPair, Scenario
from .signal import WaveformRef, waveform_value
from .special_fn import fresnel_conj


@dataclass(frozen=True)
class SpecularGeometry:
    """Specular point of one pair: y_s is always 0; r_s is the common
    distance from either antenna to the specular point."""

    y_s: float
    z_s: float
    r_s: float
    on_plate: bool


@dataclass(frozen=True)
class PairCoefficient:
    """Everything multiplying the delayed waveform in the pair model."""

    alpha: complex
    xi: complex
    full_gain: complex
    delay: float


def specular_geometry(pair: AntennaPair, scenario: Scenario) -> SpecularGeometry:
    """Specular-point coordinates and distance for one pair.

    z_s = (z_l + z_l')/2 exactly; r_s = sqrt(R^2 + (z_l - z_s)^2). A point
    exactly on the plate edge counts as on-plate.
    """
    z_s = (pair.tx_z + pair.rx_z) / 2.0
    # same expression as the vectorized helpers, so scalar and bulk paths
    # round identically
    d = pair.tx_z - z_s
    r_s = float(np.sqrt(scenario.range * scenario.range + d * d))
    on_plate = abs(z_s) <= scenario.plate_height / 2.0
    return SpecularGeometry(y_s=0.0, z_s=z_s, r_s=r_s, on_plate=on_plate)


def spa_phase_expansion(geom: SpecularGeometry, scenario: Scenario, y, z):
    """Quadratic expansion of the phase about the specular point:

    psi ~ -2 k r_s - (k / r_s) y^2 - (k R^2 / r_s^3) (z - z_s)^2
    """
    k = scenario.wavenumber
    R = scenario.range
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    out = (-2.0 * k * geom.r_s
           - (k / geom.r_s) * y * y
           - (k * R * R / geom.r_s ** 3) * (z - geom.z_s) ** 2)
    return float(out) if out.ndim == 0 else out


def _alpha_from_geometry(z_s, r_s, R, wavelength, plate_width, plate_height):
    # argument forms: Dy/sqrt(lambda r) in y, edge distances scaled by
    # 2R/sqrt(lambda r^3) in z
    y_arg = np.sqrt(plate_width ** 2 / (wavelength * r_s))
    z_scale = 2.0 * R / np.sqrt(wavelength * r_s ** 3)
    upper = (plate_height / 2.0 - z_s) * z_scale
    lower = (plate_height / 2.0 + z_s) * z_scale
    on_plate = np.abs(z_s) <= plate_height / 2.0
    return (fresnel_conj(y_arg)
            * (fresnel_conj(upper) + fresnel_conj(lower))
            * on_plate)


def alpha_coefficient(pair: AntennaPair, scenario: Scenario) -> complex:
    """Fresnel-integral pair coefficient; exactly 0 off-plate.

    Depends on the pair only through z_l + z_l', so swapping tx and rx
    leaves it unchanged.
    """
    geom = specular_geometry(pair, scenario)
    if not geom.on_plate:
        return 0.0 + 0.0j
    return complex(_alpha_from_geometry(
        geom.z_s, geom.r_s, scenario.range, scenario.wavelength,
        scenario.plate_width, scenario.plate_height))


def xi(scenario: Scenario) -> complex:
    """Common prefactor -k eta L^2 I0 / (8 pi); real and negative."""
    return complex(-scenario.wavenumber * scenario.free_space_impedance
                   * scenario.antenna_gain_factor / (8.0 * np.pi))


def pair_coefficient(pair: AntennaPair, scenario: Scenario) -> PairCoefficient:
    """Assembled gain xi * alpha * exp(-j 2 k r_s) / r_s and delay 2 r_s / c."""
    geom = specular_geometry(pair, scenario)
    alpha = alpha_coefficient(pair, scenario)
    xi_val = xi(scenario)
    k = scenario.wavenumber
    gain = xi_val * alpha * np.exp(-2j * k * geom.r_s) / geom.r_s
    return PairCoefficient(alpha=alpha, xi=xi_val, full_gain=complex(gain),
                           delay=2.0 * geom.r_s / SPEED_OF_LIGHT)


def spa_received_signal(pair: AntennaPair, scenario: Scenario, t,
                        waveform: WaveformRef):
    """full_gain times the waveform at the delayed time."""
    coeff = pair_coefficient(pair, scenario)
    t = np.asarray(t, dtype=float)
    out = coeff.full_gain * waveform_value(waveform, t - coeff.delay)
    return complex(out) if np.ndim(out) == 0 else out


def pair_offsets(scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """Per-pair specular z and antenna offset d = z_l - z_s for all N^2
    pairs in tx-major order. r_s(R) = sqrt(R^2 + d^2) for any hypothesized
    standoff R, so these two arrays are the whole pair geometry."""
    n = scenario.n_antennas
    z = (np.arange(n) - (n - 1) / 2.0) * scenario.spacing
    tx = np.repeat(z, n)
    rx = np.tile(z, n)
    z_s = (tx + rx) / 2.0
    return z_s, tx - z_s


def gain_and_delay_arrays(scenario: Scenario, z_s: np.ndarray,
                          d: np.ndarray, R) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized pair gains and delays at hypothesized standoff R.

    z_s and d come from pair_offsets; R broadcasts against them (e.g. shape
    (1, G) against (P, 1) for a grid of hypotheses). Same formulas as
    pair_coefficient, evaluated in bulk.
    """
    R = np.asarray(R, dtype=float)
    r_s = np.sqrt(R * R + d * d)
    alpha = _alpha_from_geometry(z_s, r_s, R, scenario.wavelength,
                                 scenario.plate_width, scenario.plate_height)
    k = scenario.wavenumber
    gain = xi(scenario) * alpha * np.exp(-2j * k * r_s) / r_s
    return gain, 2.0 * r_s / SPEED_OF_LIGHT
