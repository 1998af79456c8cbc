"""Waveforms, sampled multistatic signal synthesis, and noise injection.

Signals are complex baseband: the carrier phase exp(-j 2 k r_s) lives in
the pair gain while the waveform is evaluated at the true delay, so nothing
is ever sampled at the carrier rate. Each transmitter gets its own
orthogonal time slot, so the N^2 traces are independent clean observations
with no inter-transmitter interference term.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .scenario import SPEED_OF_LIGHT, AntennaPair, Scenario, all_pairs

DEFAULT_OVERSAMPLING = 4.0
# window half-span around the nominal delay, in units of 1/B; +-16/B keeps
# the side lobes the ML objective uses while staying compact
DEFAULT_WINDOW_HALFSPAN = 16.0
# cost guard: the exact backend needs ~lambda/10 plate sampling, which gets
# expensive fast; raise explicitly (or via --slow in the CLI) to go higher
DEFAULT_EXACT_CARRIER_CEILING = 12e9


@dataclass(frozen=True)
class WaveformRef:
    """Transmit waveform: a unit sinc of bandwidth B, or the constant 1.

    The sinc kind is s(t) = sin(pi B t) / (pi B t) with s(0) = 1; the
    constant kind is what the narrowband model validation transmits.
    """

    kind: str
    bandwidth: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("sinc", "constant"):
            raise ValueError(f"unknown waveform kind {self.kind!r}")
        if self.kind == "sinc":
            if self.bandwidth is None or self.bandwidth <= 0:
                raise ValueError("sinc waveform requires bandwidth > 0")

    @classmethod
    def sinc(cls, bandwidth: float) -> "WaveformRef":
        return cls(kind="sinc", bandwidth=bandwidth)

    @classmethod
    def constant(cls) -> "WaveformRef":
        return cls(kind="constant")


def waveform_value(w: WaveformRef, t):
    """Waveform sample(s) at time t (seconds), scalar or array."""
    t = np.asarray(t, dtype=float)
    if w.kind == "constant":
        out = np.ones_like(t)
    else:
        # np.sinc(x) = sin(pi x)/(pi x), singularity handled
        out = np.sinc(w.bandwidth * t)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class SignalSet:
    """Sampled complex traces, one per ordered (tx, rx) pair.

    All traces share the uniform time base t_start + n / sample_rate,
    n = 0 .. n_samples-1. traces has shape (len(pairs), n_samples).
    Identity comparison only (the array field makes elementwise == a trap).
    """

    sample_rate: float
    t_start: float
    n_samples: int
    pairs: tuple[AntennaPair, ...]
    traces: np.ndarray

    def __post_init__(self) -> None:
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.traces.shape != (len(self.pairs), self.n_samples):
            raise ValueError(
                f"traces shape {self.traces.shape} does not match "
                f"({len(self.pairs)}, {self.n_samples})")

    @property
    def times(self) -> np.ndarray:
        return self.t_start + np.arange(self.n_samples) / self.sample_rate

    @property
    def window(self) -> tuple[float, float]:
        """(t_start, t_start + n_samples / sample_rate): the span that,
        passed back to synthesize or model_signals with this sample_rate,
        reproduces this exact time base."""
        return self.t_start, self.t_start + self.n_samples / self.sample_rate

    def same_time_base(self, other: "SignalSet") -> bool:
        return (self.sample_rate == other.sample_rate
                and self.t_start == other.t_start
                and self.n_samples == other.n_samples)


def default_window(scenario: Scenario, true_range: float | None = None
                   ) -> tuple[float, float]:
    """(t0, t1) covering +-16/B around the nominal round trip 2R/c."""
    R = scenario.range if true_range is None else true_range
    center = 2.0 * R / SPEED_OF_LIGHT
    half = DEFAULT_WINDOW_HALFSPAN / scenario.bandwidth
    return center - half, center + half


def synthesize(scenario: Scenario, true_range: float | None = None,
               backend: str = "spa",
               window: tuple[float, float] | None = None,
               sample_rate: float | None = None,
               waveform: WaveformRef | None = None,
               quad=None,
               exact_carrier_ceiling: float = DEFAULT_EXACT_CARRIER_CEILING,
               validate_window: bool = True) -> SignalSet:
    """Noise-free SignalSet at plate standoff true_range.

    backend "spa" uses the closed-form pair model; "exact" integrates the
    physical-optics field (refused above exact_carrier_ceiling; slow).
    window defaults to +-16/B around 2R/c and, when validate_window is on,
    must cover at least +-8/B around it. sample_rate defaults to 4B.
    waveform defaults to the unit sinc of the scenario bandwidth.
    """
    if backend not in ("spa", "exact"):
        raise ValueError(f"unknown backend {backend!r}")
    R = scenario.range if true_range is None else float(true_range)
    if waveform is None:
        waveform = WaveformRef.sinc(scenario.bandwidth)
    if window is None:
        window = default_window(scenario, R)
    t0, t1 = window
    if validate_window:
        center = 2.0 * R / SPEED_OF_LIGHT
        need = 8.0 / scenario.bandwidth
        if t0 > center - need or t1 < center + need:
            raise ValueError(
                "window too short: must cover 2R/c +- 8/B "
                f"([{center - need:g}, {center + need:g}] s)")
    if sample_rate is None:
        sample_rate = DEFAULT_OVERSAMPLING * scenario.bandwidth
    if sample_rate < 2.0 * scenario.bandwidth:
        raise ValueError("sample_rate must be at least 2B")

    n_samples = max(int(round((t1 - t0) * sample_rate)), 1)
    t = t0 + np.arange(n_samples) / sample_rate
    pairs = tuple(all_pairs(scenario))

    if backend == "spa":
        from .em_spa import gain_and_delay_arrays, pair_offsets
        z_s, d = pair_offsets(scenario)
        gain, delay = gain_and_delay_arrays(scenario, z_s, d, R)
        traces = gain[:, None] * waveform_value(
            waveform, t[None, :] - delay[:, None])
    else:
        if scenario.carrier_freq > exact_carrier_ceiling:
            raise ValueError(
                f"exact backend refused at carrier {scenario.carrier_freq:g} Hz "
                f"(ceiling {exact_carrier_ceiling:g} Hz); raise the ceiling "
                "explicitly to accept the cost")
        from .em_exact import exact_received_signal
        work = scenario if R == scenario.range else \
            dataclasses.replace(scenario, range=R)
        traces = np.empty((len(pairs), n_samples), dtype=complex)
        for i, pair in enumerate(pairs):
            if waveform.kind == "constant":
                # t-independent integrand: one integral serves every sample
                traces[i, :] = exact_received_signal(pair, work, 0.0,
                                                     waveform, quad)
            else:
                for j, tj in enumerate(t):
                    traces[i, j] = exact_received_signal(pair, work, tj,
                                                         waveform, quad)

    return SignalSet(sample_rate=float(sample_rate), t_start=float(t0),
                     n_samples=n_samples, pairs=pairs,
                     traces=np.ascontiguousarray(traces, dtype=complex))


def add_awgn(signals: SignalSet, noise_power: float, seed: int) -> SignalSet:
    """Adds circular complex Gaussian noise, variance noise_power per
    complex sample (noise_power/2 per quadrature component).

    Per-trace child seeds are spawned from the root seed, so a run that
    processes traces in parallel and a serial run produce bitwise-identical
    noise.
    """
    if noise_power < 0:
        raise ValueError("noise_power must be nonnegative")
    if noise_power == 0:
        return dataclasses.replace(signals, traces=signals.traces.copy())
    scale = np.sqrt(noise_power / 2.0)
    children = np.random.SeedSequence(seed).spawn(len(signals.pairs))
    noisy = signals.traces.copy()
    for i, child in enumerate(children):
        rng = np.random.Generator(np.random.PCG64(child))
        noisy[i] += scale * (rng.standard_normal(signals.n_samples)
                             + 1j * rng.standard_normal(signals.n_samples))
    return dataclasses.replace(signals, traces=noisy)


def save_signal_set(signals: SignalSet, path) -> None:
    """Columnar dump, one row per sample: tx,rx,time,re,im (CSV, header row).

    Floats use repr-faithful %.17g so a dump is reproducible byte for byte.
    """
    t = signals.times
    with open(path, "w", encoding="ascii") as fh:
        fh.write("tx,rx,time,re,im\n")
        for pair, trace in zip(signals.pairs, signals.traces):
            for tj, v in zip(t, trace):
                fh.write(f"{pair.tx_index},{pair.rx_index},"
                         f"{tj:.17g},{v.real:.17g},{v.imag:.17g}\n")
