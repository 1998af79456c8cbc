"""Maximum-likelihood range estimation, ambiguity curves, and the numerical
Cramer-Rao bound.

The estimator correlates the received multistatic traces against model
signals regenerated at hypothesized standoffs R_hat. Two knowledge levels:

  full_information     model traces are the complete closed-form synthesis
                       at R_hat, per-pair Fresnel coefficients included;
  partial_information  only the delay and carrier-phase structure is kept,
                       s(t - 2 r_s(R_hat)/c) exp(-j 2 k r_s(R_hat)) per
                       pair, with the unknown complex gains profiled out.

The matched-energy objective is

    J(R_hat) = |sum_p <m_p, y_p>|^2 / sum_p ||m_p||^2      (coherent)
    J(R_hat) = sum_p |<m_p, y_p>|^2 / ||m_p||^2            (incoherent)

where m are the model traces and y the received ones. The incoherent
variant drops every cross-pair phase relation; for partial templates that
cancels the carrier phase per pair entirely, so it is bandwidth-only and
cannot see the near-field carrier information. Coherent is the default for
that reason.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .scenario import SPEED_OF_LIGHT, Scenario
from .signal import SignalSet, WaveformRef, synthesize, waveform_value
from .em_spa import gain_and_delay_arrays, pair_offsets

_COHERENCE = ("coherent", "incoherent")

# grid chunk for the vectorized objective; fixed so summation order (and
# bitwise output) never depends on grid length or available memory
_GRID_CHUNK = 64


class ModelKind(enum.Enum):
    FULL_INFORMATION = "full"
    PARTIAL_INFORMATION = "partial"

    @classmethod
    def parse(cls, text: str) -> "ModelKind":
        for kind in cls:
            if text in (kind.value, kind.name.lower()):
                return kind
        raise ValueError(f"unknown model kind {text!r}")


@dataclass(frozen=True, eq=False)
class AmbiguityCurve:
    """Objective over a grid of hypothesized ranges.

    values holds the normalized amplitude of the matched-energy statistic
    (the square root of the objective), scaled so the global max is 1.
    The amplitude convention is what makes the half-power width of a
    bandwidth-limited curve come out at the classic c/2B.
    """

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.grid.ndim != 1 or self.grid.size != self.values.size:
            raise ValueError("grid and values must be 1-D and equal length")
        if self.grid.size > 1 and not np.all(np.diff(self.grid) > 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(self.values < 0) or np.any(self.values > 1 + 1e-12):
            raise ValueError("values must lie in [0, 1]")


@dataclass(frozen=True)
class CrbResult:
    """Variance lower bound at one range: bound = noise / (2 |J''|)."""

    range: float
    bound: float
    curvature: float


def _validate_hypothesis(scenario: Scenario, r_hat) -> None:
    floor = scenario.min_range_wavelengths * scenario.wavelength
    r_hat = np.asarray(r_hat, dtype=float)
    if np.any(~np.isfinite(r_hat)) or np.any(r_hat <= 0):
        raise ValueError("hypothesized range must be positive and finite")
    if np.any(r_hat < floor):
        raise ValueError(
            f"hypothesized range below validity floor {floor:g} m "
            f"({scenario.min_range_wavelengths:g} wavelengths)")


def model_signals(scenario: Scenario, r_hat: float, kind: ModelKind,
                  window: tuple[float, float] | None = None,
                  sample_rate: float | None = None) -> SignalSet:
    """Model SignalSet at hypothesized standoff r_hat.

    Full information returns the closed-form synthesis at r_hat; partial
    information returns unit-gain templates carrying only the delay and
    carrier phase of each pair. The window is not required to cover the
    hypothesized delay (off-window hypotheses are legitimate grid points),
    so coverage validation is skipped here.
    """
    _validate_hypothesis(scenario, r_hat)
    if kind is ModelKind.FULL_INFORMATION:
        return synthesize(scenario, true_range=r_hat, backend="spa",
                          window=window, sample_rate=sample_rate,
                          validate_window=False)
    base = synthesize(scenario, true_range=r_hat, backend="spa",
                      window=window, sample_rate=sample_rate,
                      validate_window=False)
    z_s, d = pair_offsets(scenario)
    r_s = np.sqrt(r_hat * r_hat + d * d)
    k = scenario.wavenumber
    phase = np.exp(-2j * k * r_s)
    w = WaveformRef.sinc(scenario.bandwidth)
    t = base.times
    traces = phase[:, None] * waveform_value(
        w, t[None, :] - (2.0 * r_s / SPEED_OF_LIGHT)[:, None])
    return SignalSet(sample_rate=base.sample_rate, t_start=base.t_start,
                     n_samples=base.n_samples, pairs=base.pairs,
                     traces=traces)


def pair_inner_products(received: SignalSet, model: SignalSet
                        ) -> tuple[np.ndarray, np.ndarray]:
    """Per-pair <m_p, y_p> and ||m_p||^2 on a shared time base."""
    if not received.same_time_base(model):
        raise ValueError("received and model do not share a time base")
    ip = np.einsum("pn,pn->p", np.conj(model.traces), received.traces)
    energy = np.einsum("pn,pn->p",
                       np.abs(model.traces), np.abs(model.traces))
    return ip, energy.real


def ml_objective(received: SignalSet, model: SignalSet,
                 coherence: str = "coherent") -> float:
    """Matched-energy objective; higher is a better fit.

    Invariant to a global phase rotation of the received set; scaling the
    received set by complex c scales the objective by |c|^2.
    """
    if coherence not in _COHERENCE:
        raise ValueError(f"unknown coherence {coherence!r}")
    ip, energy = pair_inner_products(received, model)
    if coherence == "coherent":
        total = energy.sum()
        if total == 0.0:
            return 0.0
        return float(np.abs(ip.sum()) ** 2 / total)
    with np.errstate(invalid="ignore", divide="ignore"):
        per_pair = np.where(energy > 0.0, np.abs(ip) ** 2 / energy, 0.0)
    return float(per_pair.sum())


def pair_contributions(received: SignalSet, model: SignalSet) -> np.ndarray:
    """Per-pair matched energies |<m_p, y_p>|^2 / ||m_p||^2 (zero where the
    model trace is identically zero). Diagnostic surface for symmetry and
    weighting checks."""
    ip, energy = pair_inner_products(received, model)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(energy > 0.0, np.abs(ip) ** 2 / energy, 0.0)


def _objective_on_grid(received: SignalSet, scenario: Scenario,
                       grid: np.ndarray, kind: ModelKind,
                       coherence: str) -> np.ndarray:
    """Raw objective J over a grid of hypotheses, vectorized over pairs and
    grid chunks. Identical by construction to looping ml_objective over
    model_signals (a unit test asserts the equality)."""
    if coherence not in _COHERENCE:
        raise ValueError(f"unknown coherence {coherence!r}")
    _validate_hypothesis(scenario, grid)
    z_s, d = pair_offsets(scenario)
    t = received.times
    y = received.traces
    k = scenario.wavenumber
    w = WaveformRef.sinc(scenario.bandwidth)

    out = np.empty(grid.size, dtype=float)
    for start in range(0, grid.size, _GRID_CHUNK):
        rh = grid[start:start + _GRID_CHUNK]
        if kind is ModelKind.FULL_INFORMATION:
            gain, delay = gain_and_delay_arrays(
                scenario, z_s[:, None], d[:, None], rh[None, :])
        else:
            r_s = np.sqrt(rh[None, :] ** 2 + d[:, None] ** 2)
            gain = np.exp(-2j * k * r_s)
            delay = 2.0 * r_s / SPEED_OF_LIGHT
        # envelope block (P, g, n); the only n-sized allocation
        env = waveform_value(
            w, t[None, None, :] - delay[:, :, None])
        corr = np.einsum("pgn,pn->pg", env, y)
        env_sq = np.einsum("pgn,pgn->pg", env, env)
        ip = np.conj(gain) * corr
        energy = np.abs(gain) ** 2 * env_sq
        if coherence == "coherent":
            num = np.abs(ip.sum(axis=0)) ** 2
            den = energy.sum(axis=0)
            with np.errstate(invalid="ignore", divide="ignore"):
                out[start:start + _GRID_CHUNK] = \
                    np.where(den > 0.0, num / den, 0.0)
        else:
            with np.errstate(invalid="ignore", divide="ignore"):
                per_pair = np.where(energy > 0.0,
                                    np.abs(ip) ** 2 / energy, 0.0)
            out[start:start + _GRID_CHUNK] = per_pair.sum(axis=0)
    return out


def ambiguity(scenario: Scenario, true_range: float, grid,
              kind: ModelKind = ModelKind.PARTIAL_INFORMATION,
              coherence: str = "coherent",
              received: SignalSet | None = None) -> AmbiguityCurve:
    """Normalized amplitude of the objective over the grid, noise-free
    received signals generated at true_range. The grid must cover the true
    range so the peak is observable."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty grid")
    if not (grid[0] <= true_range <= grid[-1]):
        raise ValueError("grid does not cover the true range")
    if received is None:
        received = synthesize(scenario, true_range=true_range, backend="spa")
    raw = _objective_on_grid(received, scenario, grid, kind, coherence)
    amplitude = np.sqrt(np.maximum(raw, 0.0))
    peak = amplitude.max()
    if peak == 0.0:
        raise ValueError("objective identically zero over the grid")
    return AmbiguityCurve(grid=grid, values=amplitude / peak)


def estimate_range(received: SignalSet, scenario: Scenario, grid,
                   kind: ModelKind = ModelKind.PARTIAL_INFORMATION,
                   coherence: str = "coherent") -> float:
    """Grid argmax of the objective, refined by 3-point parabolic
    interpolation on the amplitude curve. Ties break toward smaller range;
    an edge peak is returned unrefined."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty grid")
    raw = _objective_on_grid(received, scenario, grid, kind, coherence)
    amp = np.sqrt(np.maximum(raw, 0.0))
    i = int(np.argmax(amp))  # first max: tie toward smaller range
    if i == 0 or i == grid.size - 1:
        return float(grid[i])
    x0, x1, x2 = grid[i - 1:i + 2]
    v0, v1, v2 = amp[i - 1:i + 2]
    # vertex of the quadratic through the three points (uniform or not)
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (v1 - v0) + x1 * (v0 - v2) + x0 * (v2 - v1)) / denom
    b = (x2 * x2 * (v0 - v1) + x1 * x1 * (v2 - v0)
         + x0 * x0 * (v1 - v2)) / denom
    if a >= 0.0:
        return float(x1)
    vertex = -b / (2.0 * a)
    lo, hi = min(x0, x2), max(x0, x2)
    return float(min(max(vertex, lo), hi))


def half_power_width(curve: AmbiguityCurve) -> float:
    """Width of the contiguous region around the global peak where the
    curve stays at or above half its peak value, with linear-interpolated
    crossings. Requires a unique interior global max and a crossing on
    each side inside the grid."""
    values = curve.values
    grid = curve.grid
    vmax = values.max()
    peaks = np.flatnonzero(values == vmax)
    if peaks.size != 1:
        raise ValueError("global max is not unique")
    i = int(peaks[0])
    if i == 0 or i == values.size - 1:
        raise ValueError("global max at grid edge")
    half = 0.5 * vmax

    j = i
    while j > 0 and values[j - 1] >= half:
        j -= 1
    if j == 0 and values[0] >= half:
        raise ValueError("no half-power crossing left of the peak")
    left = grid[j - 1] + (half - values[j - 1]) * (grid[j] - grid[j - 1]) \
        / (values[j] - values[j - 1])

    j = i
    while j < values.size - 1 and values[j + 1] >= half:
        j += 1
    if j == values.size - 1 and values[-1] >= half:
        raise ValueError("no half-power crossing right of the peak")
    right = grid[j] + (half - values[j]) * (grid[j + 1] - grid[j]) \
        / (values[j + 1] - values[j])
    return float(right - left)


def default_crb_step(scenario: Scenario) -> float:
    """Stencil step resolving both carrier-scale lobes (lambda/4) and the
    bandwidth-limited main lobe (c/(80B), about width/35)."""
    return min(scenario.wavelength / 4.0,
               SPEED_OF_LIGHT / (80.0 * scenario.bandwidth))


def crb(scenario: Scenario, R: float,
        kind: ModelKind = ModelKind.FULL_INFORMATION,
        step: float | None = None, snr: float = 1.0,
        snr_normalization: str = "total",
        coherence: str = "coherent") -> CrbResult:
    """Numerical variance bound at range R from the objective curvature.

    The noise-free objective is evaluated at R - step, R, R + step; the
    central second difference gives the curvature, and the bound is
    noise_power / (2 |J''|) with noise_power set by the constant receive
    SNR convention: "total" references the mean sample power over all
    traces, "per_pair" the strongest pair's mean sample power. Absolute
    levels therefore depend on that convention; shapes across sweeps do
    not. The step must resolve the main lobe (about width/20 or finer), or
    the stencil stops being concave and is rejected.
    """
    if snr <= 0:
        raise ValueError("snr must be positive")
    if snr_normalization not in ("total", "per_pair"):
        raise ValueError(
            f"unknown snr normalization {snr_normalization!r}")
    h = default_crb_step(scenario) if step is None else float(step)
    if h <= 0:
        raise ValueError("step must be positive")
    received = synthesize(scenario, true_range=R, backend="spa")
    stencil = np.array([R - h, R, R + h])
    j0, j1, j2 = _objective_on_grid(received, scenario, stencil, kind,
                                    coherence)
    if not (j1 > j0 and j1 > j2):
        raise ValueError(
            "non-concave stencil at R: step does not resolve the "
            "objective curvature (too large for the main lobe, or so "
            "small the objective change is below float resolution)")
    curvature = abs(j0 - 2.0 * j1 + j2) / (h * h)
    power = np.abs(received.traces) ** 2
    if snr_normalization == "total":
        signal_power = float(power.mean())
    else:
        signal_power = float(power.mean(axis=1).max())
    noise_power = signal_power / snr
    return CrbResult(range=float(R), bound=noise_power / (2.0 * curvature),
                     curvature=curvature)
