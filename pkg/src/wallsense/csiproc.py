"""CSI amplitude processing: outlier removal, smoothing, peak picking,
respiration-rate estimation, and the measured-vs-simulated scale fit.

Traces are rectangular (samples x subcarriers) amplitude arrays with
strictly increasing timestamps.  The respiration pipeline runs Hampel ->
Savitzky-Golay -> peak detection on one subcarrier (highest variance by
default) and converts peak spacing to breaths per minute.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# MAD-to-sigma factor for Gaussian data.
MAD_SCALE = 1.4826

# Ratios above this report as saturated: the interference estimate is
# filter leakage rather than a measurable noise floor.
SATURATION_RATIO = 1e6


class CsiError(ValueError):
    pass


@dataclass(frozen=True)
class FilterConfig:
    """Pipeline defaults tuned for 1 kHz CSI capture and 0.1-0.5 Hz breathing."""

    hampel_half_window: int = 50
    hampel_n_sigma: float = 3.0
    sg_window: int = 501
    sg_polyorder: int = 3
    peak_min_distance_s: float = 1.2
    peak_prominence_factor: float = 0.3


@dataclass(frozen=True)
class CsiTrace:
    """Amplitude samples per subcarrier at a fixed sample rate."""

    sample_rate_hz: float
    timestamps_s: np.ndarray
    amplitude: np.ndarray  # shape (samples, subcarriers)

    def __post_init__(self) -> None:
        if not self.sample_rate_hz > 0:
            raise CsiError("sample_rate_hz must be positive")
        if self.amplitude.ndim != 2:
            raise CsiError("amplitude must be 2-D (samples, subcarriers)")
        if self.timestamps_s.shape[0] != self.amplitude.shape[0]:
            raise CsiError("timestamps and amplitude row counts differ")
        if np.any(np.diff(self.timestamps_s) <= 0):
            raise CsiError("timestamps must be strictly increasing")
        if np.any(self.amplitude < 0):
            raise CsiError("amplitudes must be nonnegative")

    @property
    def subcarrier_count(self) -> int:
        return self.amplitude.shape[1]

    @property
    def duration_s(self) -> float:
        return float(self.timestamps_s[-1] - self.timestamps_s[0])

    def best_subcarrier(self) -> int:
        """Highest-variance subcarrier: the usual sensitivity proxy."""
        return int(np.argmax(np.var(self.amplitude, axis=0)))


@dataclass(frozen=True)
class RespirationEstimate:
    """rate_bpm is None when fewer than two peaks were found."""

    rate_bpm: float | None
    peak_indices: np.ndarray
    window_s: float
    subcarrier: int


@dataclass(frozen=True)
class EmpiricalSsnr:
    dynamic_power: float
    interference_power: float
    saturated: bool

    @property
    def ratio(self) -> float | None:
        if self.saturated:
            return None
        return self.dynamic_power / self.interference_power

    @property
    def db(self) -> float | None:
        r = self.ratio
        if r is None:
            return None
        return 10.0 * math.log10(r) if r > 0 else -math.inf


def hampel_filter(series: np.ndarray, half_window: int, n_sigma: float) -> np.ndarray:
    """Replace samples deviating from the window median by > n_sigma MADs.

    Windows are centred and truncated at the edges.  A zero-MAD window (all
    equal values) replaces anything that deviates at all.
    """
    if half_window < 1:
        raise CsiError("half_window must be >= 1")
    if not n_sigma > 0:
        raise CsiError("n_sigma must be positive")
    x = np.asarray(series, dtype=float)
    n = x.size
    if n == 0:
        return x.copy()
    out = x.copy()

    lo = max(0, n - 2 * half_window)
    interior = n - 2 * half_window
    if interior > 0:
        win = np.lib.stride_tricks.sliding_window_view(x, 2 * half_window + 1)
        med = np.median(win, axis=1)
        mad = np.median(np.abs(win - med[:, None]), axis=1)
        centre = x[half_window : n - half_window]
        bad = np.abs(centre - med) > n_sigma * MAD_SCALE * mad
        out[half_window : n - half_window] = np.where(bad, med, centre)

    edge_idx = list(range(min(half_window, n))) + list(range(max(half_window, n - half_window), n))
    for i in edge_idx:
        w = x[max(0, i - half_window) : min(n, i + half_window + 1)]
        med = float(np.median(w))
        mad = float(np.median(np.abs(w - med)))
        if abs(x[i] - med) > n_sigma * MAD_SCALE * mad:
            out[i] = med
    return out


def _sg_edge_value(x: np.ndarray, i: int, lo: int, hi: int, polyorder: int) -> float:
    idx = np.arange(lo, hi, dtype=float) - i
    order = min(polyorder, hi - lo - 1)
    # Offsets scaled to [-1, 1] keep the Vandermonde well conditioned.
    span = max(abs(idx[0]), abs(idx[-1]), 1.0)
    a = np.vander(idx / span, order + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(a, x[lo:hi], rcond=None)
    return float(coef[0])


def savitzky_golay(series: np.ndarray, window: int, polyorder: int) -> np.ndarray:
    """Least-squares polynomial smoothing over a centred window.

    Interior samples use the closed-form convolution weights; edge samples
    refit over the truncated window (with the order capped by the sample
    count).  A degree <= polyorder polynomial passes through unchanged.
    """
    if window < 1 or window % 2 == 0:
        raise CsiError("window must be a positive odd sample count")
    if polyorder < 0 or polyorder >= window:
        raise CsiError("polyorder must satisfy 0 <= polyorder < window")
    x = np.asarray(series, dtype=float)
    n = x.size
    if n == 0:
        return x.copy()
    if window == 1:
        return x.copy()

    half = window // 2
    offsets = np.arange(-half, half + 1, dtype=float) / half
    a = np.vander(offsets, polyorder + 1, increasing=True)
    # Row of the pseudoinverse that evaluates the fit at the window centre.
    weights = np.linalg.pinv(a)[0]

    out = np.empty_like(x)
    if n >= window:
        out[half : n - half] = np.convolve(x, weights[::-1], mode="valid")
    for i in range(min(half, n)):
        out[i] = _sg_edge_value(x, i, 0, min(n, i + half + 1), polyorder)
    for i in range(max(half, n - half), n):
        out[i] = _sg_edge_value(x, i, max(0, i - half), n, polyorder)
    return out


def _local_maxima(x: np.ndarray) -> list[int]:
    """Strict local maxima; plateaus report their middle sample."""
    peaks: list[int] = []
    n = x.size
    i = 1
    while i < n - 1:
        if x[i] > x[i - 1]:
            j = i
            while j < n - 1 and x[j + 1] == x[i]:
                j += 1
            if j < n - 1 and x[j + 1] < x[i]:
                peaks.append((i + j) // 2)
            i = j + 1
        else:
            i += 1
    return peaks


def peak_prominence(x: np.ndarray, peak: int) -> float:
    """Topographic prominence: drop to the higher of the two flanking bases.

    Each base is the minimum between the peak and the nearest strictly
    higher sample on that side (or the signal end when none exists).
    """
    h = x[peak]
    left = x[:peak]
    higher = np.nonzero(left > h)[0]
    cut = higher[-1] + 1 if higher.size else 0
    left_min = float(np.min(left[cut:], initial=h))
    right = x[peak + 1 :]
    higher = np.nonzero(right > h)[0]
    cut = higher[0] if higher.size else right.size
    right_min = float(np.min(right[:cut], initial=h))
    return float(h - max(left_min, right_min))


def detect_peaks(series: np.ndarray, min_distance: int, min_prominence: float) -> np.ndarray:
    """Prominent local maxima, thinned so survivors sit >= min_distance apart.

    Thinning is greedy by descending height (ties: lower index wins), which
    keeps the dominant peak of each cluster.
    """
    if min_distance < 1:
        raise CsiError("min_distance must be >= 1")
    x = np.asarray(series, dtype=float)
    candidates = [p for p in _local_maxima(x) if peak_prominence(x, p) >= min_prominence]
    candidates.sort(key=lambda p: (-x[p], p))
    kept: list[int] = []
    for p in candidates:
        if all(abs(p - q) >= min_distance for q in kept):
            kept.append(p)
    return np.array(sorted(kept), dtype=int)


def respiration_rate(
    trace: CsiTrace,
    subcarrier: int | None = None,
    window_s: float = 60.0,
    config: FilterConfig = FilterConfig(),
) -> RespirationEstimate:
    """Breaths per minute from peak spacing on the trailing window.

    rate = 60 * (peak count - 1) / (time from first to last peak).  Fewer
    than two peaks yields rate_bpm=None.  Uniform amplitude scaling leaves
    the estimate unchanged (the prominence threshold is scale-relative).
    """
    if trace.duration_s + 1.0 / trace.sample_rate_hz < window_s:
        raise CsiError(f"trace ({trace.duration_s:.1f} s) is shorter than the window ({window_s} s)")
    sc = trace.best_subcarrier() if subcarrier is None else subcarrier
    if not 0 <= sc < trace.subcarrier_count:
        raise CsiError(f"subcarrier {sc} out of range")

    n_window = int(round(window_s * trace.sample_rate_hz))
    x = trace.amplitude[-n_window:, sc]
    times = trace.timestamps_s[-n_window:]

    filtered = savitzky_golay(
        hampel_filter(x, config.hampel_half_window, config.hampel_n_sigma),
        config.sg_window,
        config.sg_polyorder,
    )
    # A flat window has no breathing signal; without this guard the
    # scale-relative prominence threshold would chase rounding ripples.
    span = float(np.max(filtered) - np.min(filtered))
    level = float(np.max(np.abs(filtered)))
    if level == 0.0 or span <= 1e-9 * level:
        return RespirationEstimate(None, np.array([], dtype=int), window_s, sc)

    min_distance = max(1, int(round(config.peak_min_distance_s * trace.sample_rate_hz)))
    prominence = config.peak_prominence_factor * float(np.std(filtered))
    peaks = detect_peaks(filtered, min_distance, prominence)

    if len(peaks) < 2:
        return RespirationEstimate(None, peaks, window_s, sc)
    span = float(times[peaks[-1]] - times[peaks[0]])
    rate = 60.0 * (len(peaks) - 1) / span
    return RespirationEstimate(rate, peaks, window_s, sc)


def moving_average(series: np.ndarray, window: int) -> np.ndarray:
    """Centred moving average with truncated edge windows."""
    if window < 1:
        raise CsiError("window must be >= 1")
    x = np.asarray(series, dtype=float)
    n = x.size
    half = window // 2
    csum = np.concatenate([[0.0], np.cumsum(x)])
    lo = np.maximum(0, np.arange(n) - half)
    hi = np.minimum(n, np.arange(n) + half + 1)
    return (csum[hi] - csum[lo]) / (hi - lo)


def empirical_ssnr(
    trace: CsiTrace,
    window_s: float,
    config: FilterConfig = FilterConfig(),
    subcarrier: int | None = None,
) -> EmpiricalSsnr:
    """Measured SSNR from one amplitude stream.

    Dynamic power is the mean squared deviation from the moving average over
    the observation window; interference power is the mean squared residual
    between the raw and filtered (Hampel + Savitzky-Golay) amplitude.  A
    vanishing or filter-leakage-level interference estimate reports as
    saturated instead of an unbounded ratio.
    """
    if trace.duration_s + 1.0 / trace.sample_rate_hz < window_s:
        raise CsiError(f"trace ({trace.duration_s:.1f} s) is shorter than the window ({window_s} s)")
    sc = trace.best_subcarrier() if subcarrier is None else subcarrier
    x = trace.amplitude[:, sc]

    avg_window = max(1, int(round(window_s * trace.sample_rate_hz)))
    dynamic = float(np.mean((x - moving_average(x, avg_window)) ** 2))

    filtered = savitzky_golay(
        hampel_filter(x, config.hampel_half_window, config.hampel_n_sigma),
        config.sg_window,
        config.sg_polyorder,
    )
    interference = float(np.mean((x - filtered) ** 2))

    saturated = interference <= 0.0 or (dynamic > 0 and dynamic / interference > SATURATION_RATIO)
    return EmpiricalSsnr(dynamic, interference, saturated)


def fit_model_scale(measured, simulated) -> tuple[float, float]:
    """Least-squares scalar s minimising ||measured - s * simulated||.

    Returns (s, rms residual).  Needs at least two points and a nonzero
    simulated vector.
    """
    m = np.asarray(measured, dtype=float)
    s = np.asarray(simulated, dtype=float)
    if m.shape != s.shape or m.ndim != 1:
        raise CsiError("measured and simulated must be equal-length 1-D sequences")
    if m.size < 2:
        raise CsiError("need at least two points to fit a scale")
    denom = float(np.dot(s, s))
    if denom == 0.0:
        raise CsiError("simulated values are all zero")
    scale = float(np.dot(m, s)) / denom
    rms = float(np.sqrt(np.mean((m - scale * s) ** 2)))
    return scale, rms


def mean_absolute_error(estimates, truths) -> float:
    e = np.asarray(estimates, dtype=float)
    t = np.asarray(truths, dtype=float)
    if e.shape != t.shape:
        raise CsiError("estimate and truth lengths differ")
    return float(np.mean(np.abs(e - t)))


def load_trace_csv(path) -> CsiTrace:
    """Read a trace CSV: header ``time_s,sc_0,...,sc_{N-1}``.

    The sample rate is inferred from the median timestamp spacing.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "time_s" or len(header) < 2:
            raise CsiError(f"{path}: expected header time_s,sc_0,...")
        rows = [[float(v) for v in row] for row in reader if row]
    if len(rows) < 2:
        raise CsiError(f"{path}: need at least two samples")
    data = np.asarray(rows, dtype=float)
    times = data[:, 0]
    dt = float(np.median(np.diff(times)))
    if dt <= 0:
        raise CsiError(f"{path}: timestamps must be strictly increasing")
    return CsiTrace(sample_rate_hz=1.0 / dt, timestamps_s=times, amplitude=data[:, 1:])


def save_trace_csv(trace: CsiTrace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        cols = ",".join(f"sc_{i}" for i in range(trace.subcarrier_count))
        fh.write(f"time_s,{cols}\n")
        for t, row in zip(trace.timestamps_s, trace.amplitude):
            fh.write(f"{float(t)!r}," + ",".join(repr(float(v)) for v in row) + "\n")


def synthesize_breathing_trace(
    duration_s: float,
    sample_rate_hz: float = 1000.0,
    rate_bpm: float = 15.0,
    amplitude: float = 1.0,
    baseline: float = 10.0,
    noise_sigma: float = 0.0,
    subcarriers: int = 1,
    rng: np.random.Generator | None = None,
) -> CsiTrace:
    """Synthetic amplitude trace with a sinusoidal breathing component."""
    rng = rng if rng is not None else np.random.default_rng(0)
    n = int(round(duration_s * sample_rate_hz))
    t = np.arange(n) / sample_rate_hz
    f = rate_bpm / 60.0
    clean = baseline + amplitude * np.sin(2.0 * math.pi * f * t)
    amp = np.empty((n, subcarriers))
    for k in range(subcarriers):
        noise = rng.normal(0.0, noise_sigma, n) if noise_sigma > 0 else 0.0
        damp = 1.0 / (1.0 + k)  # later subcarriers carry weaker motion
        amp[:, k] = baseline + (clean - baseline) * damp + noise
    amp = np.clip(amp, 0.0, None)
    return CsiTrace(sample_rate_hz=sample_rate_hz, timestamps_s=t, amplitude=amp)
