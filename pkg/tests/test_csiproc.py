import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wallsense.csiproc import (
    CsiError,
    CsiTrace,
    FilterConfig,
    detect_peaks,
    empirical_ssnr,
    fit_model_scale,
    hampel_filter,
    load_trace_csv,
    mean_absolute_error,
    moving_average,
    peak_prominence,
    respiration_rate,
    save_trace_csv,
    savitzky_golay,
    synthesize_breathing_trace,
)

MAD_SCALE = 1.4826


def hampel_oracle(x, half_window, n_sigma):
    """Direct per-sample median/MAD recomputation over truncated windows."""
    x = np.asarray(x, dtype=float)
    out = x.copy()
    for i in range(x.size):
        w = x[max(0, i - half_window) : min(x.size, i + half_window + 1)]
        med = np.median(w)
        mad = np.median(np.abs(w - med))
        if abs(x[i] - med) > n_sigma * MAD_SCALE * mad:
            out[i] = med
    return out


def savgol_oracle(x, window, polyorder):
    """Per-sample polynomial least squares (numpy polyfit) on each window."""
    x = np.asarray(x, dtype=float)
    n = x.size
    half = window // 2
    out = np.empty(n)
    for i in range(n):
        lo, hi = max(0, i - half), min(n, i + half + 1)
        t = np.arange(lo, hi, dtype=float) - i
        order = min(polyorder, hi - lo - 1)
        coeffs = np.polyfit(t, x[lo:hi], order)
        out[i] = np.polyval(coeffs, 0.0)
    return out


def prominence_oracle(x, peak):
    """O(n^2)-style scan: walk out to the nearest higher sample each side."""
    h = x[peak]
    left_min = h
    i = peak - 1
    while i >= 0 and x[i] <= h:
        left_min = min(left_min, x[i])
        i -= 1
    right_min = h
    i = peak + 1
    while i < len(x) and x[i] <= h:
        right_min = min(right_min, x[i])
        i += 1
    return h - max(left_min, right_min)


class TestHampel:
    def test_spike_replaced(self):
        x = np.full(50, 3.0)
        x[20] = 100.0
        y = hampel_filter(x, 5, 3.0)
        assert y[20] == 3.0
        assert np.all(y == 3.0)

    def test_monotone_ramp_untouched(self):
        x = np.arange(100, dtype=float)
        y = hampel_filter(x, 5, 50.0)
        assert np.array_equal(y, x)

    def test_matches_bruteforce_oracle(self):
        rng = np.random.default_rng(11)
        x = rng.normal(0, 1, 400)
        x[rng.integers(0, 400, 12)] += rng.normal(0, 25, 12)
        got = hampel_filter(x, 7, 2.5)
        expect = hampel_oracle(x, 7, 2.5)
        assert np.allclose(got, expect, atol=1e-9)

    def test_empty(self):
        assert hampel_filter(np.array([]), 3, 3.0).size == 0

    def test_idempotent_on_constant(self):
        x = np.full(64, 1.5)
        assert np.array_equal(hampel_filter(x, 4, 3.0), x)

    def test_bad_params(self):
        with pytest.raises(CsiError):
            hampel_filter(np.zeros(5), 0, 3.0)


class TestSavitzkyGolay:
    def test_polynomial_reproduced(self):
        t = np.linspace(0, 1, 200)
        x = 2.0 - 1.3 * t + 0.7 * t**2 + 0.2 * t**3
        y = savitzky_golay(x, 21, 3)
        assert np.allclose(y[10:-10], x[10:-10], atol=1e-9)
        # truncated-window refits are exact on polynomials too
        assert np.allclose(y, x, atol=1e-9)

    def test_window_one_is_identity(self):
        x = np.random.default_rng(0).normal(0, 1, 50)
        assert np.array_equal(savitzky_golay(x, 1, 0), x)

    def test_matches_per_window_least_squares(self):
        rng = np.random.default_rng(5)
        x = rng.normal(0, 1, 300)
        got = savitzky_golay(x, 11, 3)
        expect = savgol_oracle(x, 11, 3)
        assert np.allclose(got, expect, atol=1e-9)

    def test_even_window_rejected(self):
        with pytest.raises(CsiError):
            savitzky_golay(np.zeros(10), 4, 2)

    def test_order_ge_window_rejected(self):
        with pytest.raises(CsiError):
            savitzky_golay(np.zeros(10), 5, 5)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=0, max_value=3))
    def test_idempotent_on_low_degree_polynomials(self, degree):
        t = np.linspace(-1, 1, 120)
        x = sum((0.5 + d) * t**d for d in range(degree + 1))
        once = savitzky_golay(x, 15, 3)
        twice = savitzky_golay(once, 15, 3)
        assert np.allclose(once, twice, atol=1e-9)


class TestDetectPeaks:
    def test_triangular_pulse(self):
        x = np.concatenate([np.linspace(0, 1, 20), np.linspace(1, 0, 20)[1:]])
        peaks = detect_peaks(x, 1, 0.5)
        assert list(peaks) == [19]

    def test_sinusoid_spacing(self):
        t = np.arange(1000)
        period = 100
        x = np.sin(2 * math.pi * t / period)
        peaks = detect_peaks(x, 50, 0.5)
        assert len(peaks) >= 9
        assert np.all(np.diff(peaks) == period)

    def test_matches_exhaustive_prominence(self):
        rng = np.random.default_rng(9)
        t = np.arange(2000)
        x = np.sin(2 * math.pi * t / 130) + 0.4 * np.sin(2 * math.pi * t / 23) + 0.05 * rng.normal(size=2000)
        for p in detect_peaks(x, 40, 0.3):
            assert peak_prominence(x, p) == pytest.approx(prominence_oracle(x, p), abs=1e-12)
            assert prominence_oracle(x, p) >= 0.3

    def test_min_distance_thinning_keeps_tallest(self):
        x = np.zeros(30)
        x[10] = 1.0
        x[13] = 2.0
        peaks = detect_peaks(x, 5, 0.1)
        assert list(peaks) == [13]

    def test_plateau_reports_middle(self):
        x = np.array([0, 1, 2, 2, 2, 1, 0], dtype=float)
        peaks = detect_peaks(x, 1, 0.5)
        assert list(peaks) == [3]


class TestRespirationRate:
    def test_clean_quarter_hz(self):
        tr = synthesize_breathing_trace(60.0, 1000.0, 15.0, noise_sigma=0.0)
        est = respiration_rate(tr, window_s=60.0)
        assert est.rate_bpm == pytest.approx(15.0, abs=0.5)

    def test_noisy_quarter_hz(self):
        tr = synthesize_breathing_trace(
            60.0, 1000.0, 15.0, amplitude=1.0, noise_sigma=math.sqrt(0.05),
            rng=np.random.default_rng(17),
        )
        est = respiration_rate(tr, window_s=60.0)
        assert est.rate_bpm == pytest.approx(15.0, abs=1.0)

    def test_constant_trace_undefined(self):
        n = 40_000
        t = np.arange(n) / 1000.0
        amp = np.full((n, 1), 5.0)
        tr = CsiTrace(1000.0, t, amp)
        est = respiration_rate(tr, window_s=40.0)
        assert est.rate_bpm is None

    def test_scale_invariance(self):
        tr = synthesize_breathing_trace(
            40.0, 500.0, 18.0, amplitude=0.8, noise_sigma=0.1, rng=np.random.default_rng(3)
        )
        scaled = CsiTrace(tr.sample_rate_hz, tr.timestamps_s, tr.amplitude * 37.5)
        a = respiration_rate(tr, window_s=40.0)
        b = respiration_rate(scaled, window_s=40.0)
        assert a.rate_bpm == pytest.approx(b.rate_bpm, rel=1e-12)
        assert np.array_equal(a.peak_indices, b.peak_indices)

    def test_short_trace_rejected(self):
        tr = synthesize_breathing_trace(10.0, 100.0, 15.0)
        with pytest.raises(CsiError):
            respiration_rate(tr, window_s=30.0)


class TestEmpiricalSsnr:
    def test_pure_sinusoid_saturates(self):
        tr = synthesize_breathing_trace(60.0, 1000.0, 15.0, amplitude=1.0, noise_sigma=0.0)
        e = empirical_ssnr(tr, window_s=30.0)
        assert e.interference_power < 1e-6
        assert e.saturated
        assert e.ratio is None

    def test_noise_variance_recovered(self):
        v = 0.04
        tr = synthesize_breathing_trace(
            60.0, 1000.0, 15.0, amplitude=1.0, noise_sigma=math.sqrt(v),
            rng=np.random.default_rng(7),
        )
        e = empirical_ssnr(tr, window_s=30.0)
        assert e.interference_power == pytest.approx(v, rel=0.2)

    def test_larger_oscillation_larger_ssnr(self):
        rng = np.random.default_rng(21)
        small = synthesize_breathing_trace(40.0, 500.0, 15.0, amplitude=0.5,
                                           noise_sigma=0.2, rng=rng)
        rng = np.random.default_rng(21)
        large = synthesize_breathing_trace(40.0, 500.0, 15.0, amplitude=2.0,
                                           noise_sigma=0.2, rng=rng)
        e_small = empirical_ssnr(small, window_s=40.0)
        e_large = empirical_ssnr(large, window_s=40.0)
        assert e_large.db > e_small.db

    def test_monotone_in_oscillation_to_noise(self):
        ratios = []
        for amp in (0.5, 1.0, 2.0, 4.0):
            tr = synthesize_breathing_trace(
                40.0, 500.0, 15.0, amplitude=amp, noise_sigma=0.25,
                rng=np.random.default_rng(2),
            )
            ratios.append(empirical_ssnr(tr, window_s=40.0).ratio)
        assert all(a < b for a, b in zip(ratios, ratios[1:]))


class TestMovingAverage:
    def test_truncated_edges(self):
        x = np.array([1.0, 2.0, 3.0, 4.0])
        got = moving_average(x, 3)
        assert got == pytest.approx([1.5, 2.0, 3.0, 3.5])


class TestFitModelScale:
    def test_exact_factor(self):
        sim = np.array([1.0, 2.0, 3.0])
        scale, rms = fit_model_scale(2 * sim, sim)
        assert scale == pytest.approx(2.0, rel=1e-12)
        assert rms == pytest.approx(0.0, abs=1e-12)

    def test_single_point_rejected(self):
        with pytest.raises(CsiError):
            fit_model_scale([1.0], [2.0])

    def test_all_zero_simulated_rejected(self):
        with pytest.raises(CsiError):
            fit_model_scale([1.0, 2.0], [0.0, 0.0])

    def test_recovers_planted_scale_under_noise(self):
        rng = np.random.default_rng(13)
        sim = rng.uniform(0.5, 5.0, 40)
        planted = 3.7
        measured = planted * sim * (1 + rng.normal(0, 0.01, 40))
        scale, rms = fit_model_scale(measured, sim)
        assert scale == pytest.approx(planted, rel=0.02)
        # closed-form least squares oracle
        expect = float(np.dot(measured, sim) / np.dot(sim, sim))
        assert scale == pytest.approx(expect, rel=1e-12)

    def test_zero_residual_on_proportional_inputs(self):
        sim = np.linspace(0.1, 2.0, 17)
        _, rms = fit_model_scale(0.331 * sim, sim)
        assert rms == pytest.approx(0.0, abs=1e-12)


class TestTraceCsv:
    def test_roundtrip(self, tmp_path):
        tr = synthesize_breathing_trace(2.0, 50.0, 20.0, subcarriers=3,
                                        noise_sigma=0.05, rng=np.random.default_rng(1))
        path = tmp_path / "trace.csv"
        save_trace_csv(tr, path)
        back = load_trace_csv(path)
        assert back.sample_rate_hz == pytest.approx(tr.sample_rate_hz, rel=1e-9)
        assert np.array_equal(back.amplitude, tr.amplitude)
        assert np.array_equal(back.timestamps_s, tr.timestamps_s)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(CsiError):
            load_trace_csv(path)


class TestMae:
    def test_value(self):
        assert mean_absolute_error([15.0, 16.0], [15.5, 15.0]) == pytest.approx(0.75)
