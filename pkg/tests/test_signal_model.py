"""Echo synthesis contract: trajectory law, dwell gating, noise calibration,
and the raw-chain matched filter."""

import numpy as np
import pytest

from wrfrft import (DwellError, NoiseSpec, OutOfWindowError, RadarParams,
                    TargetTruth, ValidationError, measure_peak_snr_db,
                    pulse_compress, synthesize_compressed_echo,
                    synthesize_raw_echo, trajectory_range)
from wrfrft.signal_model import C_LIGHT, reference_chirp


def sband(t1=4.0):
    return RadarParams(fc=6e9, bandwidth=10e6, fs=50e6, prf=200.0,
                       tp=10e-6, t0=0.0, t1=t1)


def single_target():
    return TargetTruth(r0=861.0, v=90.0, a=26.0, tb=0.755, te=3.0)


def test_radar_derived_quantities():
    r = sband()
    assert r.wavelength == pytest.approx(0.05)
    assert r.prt == pytest.approx(0.005)
    assert r.cell_size == pytest.approx(3.0)
    assert r.num_pulses == 800


def test_trajectory_range_examples():
    t = single_target()
    assert trajectory_range(t, 0.755) == pytest.approx(861.0)
    assert trajectory_range(t, 1.755) == pytest.approx(977.0)
    assert trajectory_range(t, 0.760) == pytest.approx(861.45065)


def test_trajectory_range_outside_dwell():
    t = single_target()
    with pytest.raises(DwellError):
        trajectory_range(t, 0.5)
    with pytest.raises(DwellError):
        trajectory_range(t, 3.2)


def test_invalid_params_rejected():
    with pytest.raises(ValidationError):
        RadarParams(fc=6e9, bandwidth=60e6, fs=50e6, prf=200.0, tp=1e-5, t0=0, t1=1)
    with pytest.raises(ValidationError):
        TargetTruth(r0=1.0, v=0.0, a=0.0, tb=2.0, te=1.0)


def test_noiseless_peak_cells_follow_trajectory_and_gate():
    radar = sband()
    tgt = single_target()
    echo = synthesize_compressed_echo(radar, [tgt], None)
    times = echo.pulse_times()
    mags = np.abs(echo.data)
    inside = (times >= tgt.tb) & (times <= tgt.te)
    # dwell gating: columns outside [tb, te] are exactly zero
    assert np.all(mags[:, ~inside] == 0.0)
    # peak cell tracks round(2 R(t) / c * fs); an exact half-cell offset is
    # a symmetric tie, so assert nearest-cell distance
    peak_cells = mags[:, inside].argmax(axis=0)
    k_float = 2 * tgt.range_at(times[inside]) / C_LIGHT * radar.fs
    assert np.abs(peak_cells - k_float).max() <= 0.5 + 1e-9


def test_phase_law_at_peak_cell():
    radar = sband()
    tgt = single_target()
    echo = synthesize_compressed_echo(radar, [tgt], None)
    times = echo.pulse_times()
    inside = np.where((times >= tgt.tb) & (times <= tgt.te))[0]
    rng_t = tgt.range_at(times[inside])
    cells = np.round(2 * rng_t / C_LIGHT * radar.fs).astype(int)
    vals = echo.data[cells, inside]
    expected = np.exp(-4j * np.pi * rng_t / radar.wavelength)
    err = np.angle(vals * np.conj(expected))
    assert np.abs(err).max() < 1e-9


def test_arc_is_exhibited():
    radar = sband()
    tgt = single_target()
    assert tgt.v * (tgt.te - tgt.tb) > radar.cell_size
    echo = synthesize_compressed_echo(radar, [tgt], None)
    times = echo.pulse_times()
    inside = (times >= tgt.tb) & (times <= tgt.te)
    cells = np.abs(echo.data[:, inside]).argmax(axis=0)
    assert cells.max() - cells.min() >= 1


def test_noise_only_variance():
    radar = sband(t1=2.0)
    echo = synthesize_compressed_echo(radar, [], NoiseSpec(0.0, seed=7), num_cells=512)
    # snr 0 dB relative to a unit target: sigma_n = 1
    var = np.mean(np.abs(echo.data) ** 2)
    assert echo.data.size >= 1e5
    assert var == pytest.approx(1.0, rel=0.05)


def test_noise_calibration_mean_over_seeds():
    radar = sband(t1=1.0)
    tgt = TargetTruth(r0=861.0, v=90.0, a=26.0, tb=0.25, te=0.9)
    clean = synthesize_compressed_echo(radar, [tgt], None, num_cells=400)
    vals = []
    for seed in range(100):
        noisy = synthesize_compressed_echo(radar, [tgt], NoiseSpec(4.0, seed=seed),
                                           num_cells=400)
        vals.append(measure_peak_snr_db(noisy, clean))
    assert np.mean(vals) == pytest.approx(4.0, abs=0.3)


def test_noise_stream_is_keyed_by_pulse():
    radar = sband(t1=1.0)
    a = synthesize_compressed_echo(radar, [], NoiseSpec(4.0, seed=3), num_cells=64)
    b = synthesize_compressed_echo(radar, [], NoiseSpec(4.0, seed=3), num_cells=64)
    assert np.array_equal(a.data, b.data)
    c = synthesize_compressed_echo(radar, [], NoiseSpec(4.0, seed=4), num_cells=64)
    assert not np.array_equal(a.data, c.data)


def test_trajectory_leaving_window_rejected():
    radar = sband()
    tgt = TargetTruth(r0=1500.0, v=90.0, a=26.0, tb=0.755, te=3.0)
    with pytest.raises(OutOfWindowError):
        synthesize_compressed_echo(radar, [tgt], None, num_cells=512)


def test_multi_target_entry_pulses():
    radar = sband()
    cell = radar.cell_size
    targets = [
        TargetTruth(r0=287 * cell, v=90.0, a=25.0, tb=0.705, te=3.0),
        TargetTruth(r0=323 * cell, v=70.0, a=25.0, tb=0.705, te=3.0),
        TargetTruth(r0=269 * cell, v=75.0, a=17.0, tb=0.905, te=3.4),
        TargetTruth(r0=305 * cell, v=95.0, a=13.0, tb=1.005, te=3.2),
    ]
    echo = synthesize_compressed_echo(radar, targets, None)
    first_active = np.abs(echo.data).sum(axis=0).nonzero()[0][0]
    assert first_active == int(round(0.705 * radar.prf))
    # four distinct trajectories: at a time when all four are present the
    # column shows four separated local maxima
    p = int(round(2.0 * radar.prf))
    col = np.abs(echo.data[:, p])
    strong = {int(np.round(2 * t.range_at(2.0) / C_LIGHT * radar.fs)) for t in targets}
    assert len(strong) == 4
    for cell_idx in strong:
        assert col[cell_idx] > 0.5


# ---------------------------------------------------------------------------
# raw chain / pulse compression
# ---------------------------------------------------------------------------

def test_pulse_compress_stationary_point_target():
    radar = sband(t1=0.1)
    tgt = TargetTruth(r0=900.0, v=0.0, a=0.0, tb=0.0, te=0.1)
    raw = synthesize_raw_echo(radar, [tgt], num_cells=1200)
    comp = pulse_compress(raw, radar)
    k = int(np.abs(comp.data[:, 0]).argmax())
    assert k == int(round(2 * 900.0 / C_LIGHT * radar.fs))
    assert np.abs(comp.data[k, 0]) == pytest.approx(1.0, rel=1e-6)
    # compressed phase carries the two-way carrier term
    ph = np.angle(comp.data[k, 0] * np.exp(4j * np.pi * 900.0 / radar.wavelength))
    assert abs(ph) < 1e-6


def test_pulse_compress_noise_only_variance_ratio():
    radar = sband(t1=0.25)
    nchirp = int(round(radar.tp * radar.fs))
    raw = synthesize_raw_echo(radar, [], num_cells=1024, noise_sigma=1.0, seed=5)
    comp = pulse_compress(raw, radar)
    # filter norm 1/sqrt(L): variance drops by L where the filter fully overlaps
    full = comp.data[:1024 - nchirp]
    ratio = np.mean(np.abs(full) ** 2) / np.mean(np.abs(raw.data) ** 2)
    assert ratio == pytest.approx(1.0 / nchirp, rel=0.1)


def test_pulse_compress_gain_matches_time_bandwidth():
    radar = sband(t1=0.25)
    tgt = TargetTruth(r0=900.0, v=0.0, a=0.0, tb=0.0, te=0.25)
    # input SNR defined in the signal bandwidth: -16 dB
    # (white noise over fs carries bandwidth/fs of its power in band)
    in_band_snr_db = -16.0
    sigma_r = np.sqrt(10 ** (-in_band_snr_db / 10) / (radar.bandwidth / radar.fs))
    raw = synthesize_raw_echo(radar, [tgt], num_cells=1200, noise_sigma=sigma_r, seed=9)
    comp = pulse_compress(raw, radar)
    clean = pulse_compress(synthesize_raw_echo(radar, [tgt], num_cells=1200), radar)
    nchirp = int(round(radar.tp * radar.fs))
    noise = (comp.data - clean.data)[:1200 - nchirp]  # full-overlap zone
    out_snr = 10 * np.log10(np.abs(clean.data).max() ** 2 / np.mean(np.abs(noise) ** 2))
    gain = 10 * np.log10(radar.bandwidth * radar.tp)
    assert out_snr == pytest.approx(in_band_snr_db + gain, abs=0.7)


def test_pulse_compress_rejects_short_chirp():
    radar = RadarParams(fc=6e9, bandwidth=10e6, fs=50e6, prf=200.0,
                        tp=2e-8, t0=0.0, t1=0.1)
    with pytest.raises(ValidationError):
        reference_chirp(radar)
