"""Full-window integrators: peak placement, closed-form levels, ordering."""

import numpy as np
import pytest

from wrfrft import (NoiseSpec, RadarParams, Scenario, TargetTruth,
                    equivalent_full_window_params, grft, mtd, rfrft, rft,
                    synthesize_compressed_echo)
from wrfrft.detection import _method_peak, _trial_seed
from wrfrft.search import build_grid


def sband(t1=1.28):
    return RadarParams(fc=6e9, bandwidth=10e6, fs=50e6, prf=200.0,
                       tp=10e-6, t0=0.0, t1=t1)


def test_equivalent_params_overlay_the_trajectory():
    tgt = TargetTruth(r0=861.0, v=90.0, a=26.0, tb=0.755, te=3.0)
    r0e, ve, ae = equivalent_full_window_params(tgt, 0.0)
    t = np.linspace(0.755, 3.0, 17)
    direct = tgt.range_at(t)
    anchored = r0e + ve * t + ae * t * t
    assert np.abs(direct - anchored).max() < 1e-9


def test_mtd_stationary_target():
    radar = sband()
    tgt = TargetTruth(r0=300.0, v=0.0, a=0.0, tb=0.0, te=radar.t1 - radar.prt)
    echo = synthesize_compressed_echo(radar, [tgt], None, num_cells=128)
    m = mtd(echo)
    i, j = np.unravel_index(int(np.argmax(m.amplitude)), m.amplitude.shape)
    assert i == int(round(2 * 300.0 / 3e8 * radar.fs))
    assert abs(m.axes["doppler_hz"][j]) < radar.prf / echo.num_pulses + 1e-9
    # coherent full-window sum of a stationary unit target
    assert m.peak_value == pytest.approx(np.sqrt(echo.num_pulses), rel=0.02)


def test_mtd_migrating_target_loses_energy():
    radar = sband()
    n = radar.num_pulses
    # migration must clearly exceed the compressed-envelope width (first
    # null at fs/bandwidth = 5 cells); avoid velocities aliasing to DC
    v = 31.1
    tgt = TargetTruth(r0=300.0, v=v, a=0.0, tb=0.0, te=radar.t1 - radar.prt)
    assert v * (radar.t1 - radar.prt) / radar.cell_size > 2 * radar.fs / radar.bandwidth
    echo = synthesize_compressed_echo(radar, [tgt], None, num_cells=128)
    m = mtd(echo)
    assert m.peak_value <= 0.8 * np.sqrt(n)


def test_rft_matches_constant_velocity_target():
    radar = sband()
    tgt = TargetTruth(r0=300.0, v=9.0, a=0.0, tb=0.0, te=radar.t1 - radar.prt)
    echo = synthesize_compressed_echo(radar, [tgt], None, num_cells=128)
    r0s = 300.0 + np.arange(-2, 3) * 15.0
    vs = 9.0 + np.arange(-2, 3) * 3.0
    m = rft(echo, r0s, vs)
    assert m.peak_coords["r0_m"] == pytest.approx(300.0)
    assert m.peak_coords["v_mps"] == pytest.approx(9.0)
    assert m.peak_value > 0.95 * np.sqrt(echo.num_pulses)


def test_rft_defocused_on_accelerating_partial_dwell_target():
    radar = sband()
    tgt = TargetTruth(r0=300.0, v=30.0, a=15.0, tb=0.32, te=0.8)
    echo = synthesize_compressed_echo(radar, [tgt], None, num_cells=192)
    r0e, ve, _ = equivalent_full_window_params(tgt, radar.t0)
    m = rft(echo, r0e + np.arange(-2, 3) * 15.0, ve + np.arange(-2, 3) * 1.0)
    n_dwell = int(round((tgt.te - tgt.tb) * radar.prf)) + 1
    matched_level = np.sqrt(n_dwell)
    assert m.peak_value < 0.5 * matched_level


def test_grft_full_span_closed_form():
    radar = sband()
    tgt = TargetTruth(r0=300.0, v=12.0, a=6.0, tb=0.0, te=radar.t1 - radar.prt)
    echo = synthesize_compressed_echo(radar, [tgt], None, num_cells=128)
    m = grft(echo, [300.0 - 15, 300.0, 300.0 + 15],
             [11.0, 12.0, 13.0], [5.5, 6.0, 6.5])
    assert m.peak_coords["r0_m"] == pytest.approx(300.0)
    assert m.peak_coords["v_mps"] == pytest.approx(12.0)
    assert m.peak_coords["a_mps2"] == pytest.approx(6.0)
    # unit-energy compensation: coherent sum reaches sqrt(pulses) x sigma0
    assert m.peak_value == pytest.approx(np.sqrt(echo.num_pulses), rel=0.1)


def test_rfrft_matches_grft_optimum_noiseless_full_span():
    radar = sband()
    tgt = TargetTruth(r0=300.0, v=12.0, a=6.0, tb=0.0, te=radar.t1 - radar.prt)
    echo = synthesize_compressed_echo(radar, [tgt], None, num_cells=128)
    grids = ([285.0, 300.0, 315.0], [11.0, 12.0, 13.0], [5.5, 6.0, 6.5])
    mg = grft(echo, *grids)
    mr = rfrft(echo, *grids, alpha_count=33)
    assert mr.peak_coords == mg.peak_coords
    assert mr.peak_value == pytest.approx(mg.peak_value, rel=0.02)


def desk_scenario():
    from wrfrft import load_preset
    cfg = load_preset("desk-pd")
    return Scenario(cfg.radar, tuple(cfg.targets), cfg.bounds, cfg.coarsen,
                    num_cells=cfg.num_cells, rfrft_alpha_count=cfg.rfrft_alpha_count,
                    grid_offset=tuple(cfg.grid_offset.items()))


def test_mean_peak_ordering_at_moderate_snr():
    scen = desk_scenario()
    grid = build_grid(scen.bounds, scen.radar, scen.coarsen)
    sums = {m: 0.0 for m in ("wrfrft", "rfrft", "grft", "rft")}
    trials = 50
    for t in range(trials):
        seed = _trial_seed(77, 0, t)
        echo = synthesize_compressed_echo(scen.radar, [scen.truth()],
                                          NoiseSpec(4.0, seed=seed), num_cells=192)
        for m in sums:
            peak, _ = _method_peak(m, echo, scen, grid)
            sums[m] += peak
    means = {m: s / trials for m, s in sums.items()}
    assert means["wrfrft"] > means["rfrft"] > means["grft"] > means["rft"]
