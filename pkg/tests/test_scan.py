"""Delay scans, beat spectra, revival diagnostics, robustness sweeps."""

import math

import numpy as np
import pytest

from papsim import (C_CM_PER_PS, EfficiencyMap, K_RAD_PS_PER_CM,
                    SyntheticMoleculeSpec, build_synthetic_molecule,
                    build_three_level, fft_delta_t, resolve_workers,
                    revival_diagnostics, robustness_sweep, run_pair_train,
                    scan_2d)

BASE = {"n_pairs": 5, "pump_area": math.pi, "dump_area": math.pi}


def test_single_cell_matches_direct_run():
    sys3 = build_three_level()
    emap = scan_2d(sys3, BASE, [10.0], [4.0])
    direct = run_pair_train(sys3, delta_T=10.0, delta_t_small=4.0,
                            record="none", **BASE)
    assert emap.efficiency.shape == (1, 1)
    assert emap.efficiency[0, 0] == direct.final_target_population
    assert emap.config_fingerprint


def test_worker_count_does_not_change_values():
    sys3 = build_three_level()
    dTs = [8.0, 10.0, 12.0]
    dts = [2.0, 3.0, 4.0]
    serial = scan_2d(sys3, BASE, dTs, dts, workers=1)
    parallel = scan_2d(sys3, BASE, dTs, dts, workers=2)
    assert np.array_equal(serial.efficiency, parallel.efficiency)
    assert serial.config_fingerprint == parallel.config_fingerprint


def test_invalid_cells_become_nan():
    sys3 = build_three_level()
    # 0.05 ps is inside one pulse support: that schedule cannot exist
    emap = scan_2d(sys3, BASE, [10.0], [0.05, 4.0])
    assert math.isnan(emap.efficiency[0, 0])
    assert np.isfinite(emap.efficiency[1, 0])


def test_scan_grid_validation():
    sys3 = build_three_level()
    with pytest.raises(ValueError):
        scan_2d(sys3, BASE, [10.0, 9.0], [4.0])
    with pytest.raises(ValueError):
        scan_2d(sys3, BASE, [], [4.0])
    with pytest.raises(ValueError):
        scan_2d(sys3, {"pump_area": math.pi}, [10.0], [4.0])
    with pytest.raises(ValueError):
        resolve_workers(0)


def test_workers_environment_default(monkeypatch):
    monkeypatch.delenv("PAPSIM_WORKERS", raising=False)
    assert resolve_workers() == 1
    monkeypatch.setenv("PAPSIM_WORKERS", "3")
    assert resolve_workers() == 3
    assert resolve_workers(2) == 2


def _cosine_map(freq_cm=45.0, n=64, h=0.05):
    dts = 1.0 + h * np.arange(n)
    col = 0.5 + 0.1 * np.cos(K_RAD_PS_PER_CM * freq_cm * dts)
    return EfficiencyMap(np.array([10.0]), dts, col[:, None], "")


def test_fft_peak_and_halfspectrum():
    emap = _cosine_map()
    spec = fft_delta_t(emap, 0)
    n = len(emap.delta_t_axis)
    assert len(spec.frequency_axis) == n // 2 + 1
    assert np.all(spec.frequency_axis >= 0.0)
    assert np.all(spec.magnitude >= 0.0)
    # mean subtraction empties the zero bin
    assert spec.magnitude[0] < 1e-12
    assert abs(spec.peak_frequency - 45.0) <= spec.bin_width
    assert abs(spec.bin_width - 1.0 / (C_CM_PER_PS * n * 0.05)) < 1e-9


def test_fft_parseval():
    rng = np.random.default_rng(7)
    dts = 1.0 + 0.05 * np.arange(64)
    col = 0.3 + 0.1 * rng.normal(size=64)
    spec = fft_delta_t(EfficiencyMap(np.array([10.0]), dts, col[:, None], ""), 0)
    mag2 = spec.magnitude ** 2
    n = len(spec.signal)
    # rfft halves carry interior bins twice
    energy_f = (mag2[0] + 2.0 * mag2[1:-1].sum()
                + (mag2[-1] if n % 2 == 0 else 2.0 * mag2[-1])) / n
    assert abs(energy_f - np.sum(spec.signal ** 2)) < 1e-9


def test_fft_window_and_validation():
    emap = _cosine_map()
    windowed = fft_delta_t(emap, 0, window="hann")
    assert abs(windowed.peak_frequency - 45.0) <= 2.0 * windowed.bin_width
    with pytest.raises(ValueError):
        fft_delta_t(emap, 0, window="kaiser")

    ragged = EfficiencyMap(np.array([10.0]),
                           np.array([1.0, 1.1, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8]),
                           np.ones((8, 1)), "")
    with pytest.raises(ValueError):
        fft_delta_t(ragged, 0)

    short = EfficiencyMap(np.array([10.0]), 1.0 + 0.1 * np.arange(4),
                          np.ones((4, 1)), "")
    with pytest.raises(ValueError):
        fft_delta_t(short, 0)

    holed = _cosine_map()
    eff = holed.efficiency.copy()
    eff[3, 0] = math.nan
    with pytest.raises(ValueError):
        fft_delta_t(EfficiencyMap(holed.delta_T_axis, holed.delta_t_axis,
                                  eff, ""), 0)


def test_revivals_of_an_even_progression():
    mol = build_synthetic_molecule(SyntheticMoleculeSpec(3, 11200.0, (25.0,)))
    T_rev = 1.0 / (C_CM_PER_PS * 25.0)
    rep = revival_diagnostics(mol, np.ones(3), t_max=3.0 * T_rev,
                              dt=T_rev / 100.0)
    # full rephasing once per 1/(c * spacing)
    k = int(np.argmin(np.abs(rep.times - T_rev)))
    assert rep.fidelity[k] > 1.0 - 1e-10
    assert len(rep.revival_times) >= 2
    assert rep.revival_fidelities[0] > 1.0 - 1e-10
    residues = rep.revival_times / T_rev
    assert np.max(np.abs(residues - np.round(residues))) < 0.02


def test_revivals_single_level_and_incommensurate():
    single = build_synthetic_molecule(SyntheticMoleculeSpec(1, 11200.0, ()))
    rep = revival_diagnostics(single, np.ones(1), t_max=5.0, dt=0.01)
    assert np.max(np.abs(rep.fidelity - 1.0)) < 1e-12

    golden = (1.0 + 5.0 ** 0.5) / 2.0
    mol = build_synthetic_molecule(
        SyntheticMoleculeSpec(3, 11200.0, (25.0, 25.0 * golden)))
    rep2 = revival_diagnostics(mol, np.ones(3), t_max=3.0, dt=1e-3,
                               threshold=0.9999)
    assert len(rep2.revival_times) == 0
    assert rep2.fidelity[rep2.times > 0.05].max() < 0.95


def test_revival_validation():
    mol = build_synthetic_molecule(SyntheticMoleculeSpec(3, 11200.0, (25.0,)))
    with pytest.raises(ValueError):
        revival_diagnostics(mol, np.ones(2), t_max=1.0, dt=0.01)
    with pytest.raises(ValueError):
        revival_diagnostics(mol, np.zeros(3), t_max=1.0, dt=0.01)
    with pytest.raises(ValueError):
        revival_diagnostics(mol, np.ones(3), t_max=1.0, dt=2.0)


def test_sweep_rows_match_individual_runs():
    sys3 = build_three_level()
    base = {"delta_T": 10.0, "delta_t_small": 5.0,
            "pump_area": math.pi, "dump_area": math.pi}
    sweep = robustness_sweep(sys3, "pairs", "n_pairs", [5, 20], base_config=base)
    for v, eff in zip(sweep.values, sweep.efficiency):
        direct = run_pair_train(sys3, n_pairs=int(v), record="none", **base)
        assert eff == direct.final_target_population
    assert sweep.spread() >= 0.0


def test_area_scale_sweep_stays_efficient():
    sys3 = build_three_level()
    base = {"n_pairs": 50, "delta_T": 10.0,
            "pump_area": 5.0 * math.pi, "dump_area": 5.0 * math.pi}
    sweep = robustness_sweep(sys3, "stirap", "area_scale", [0.8, 1.0, 1.2],
                             base_config=base)
    # a 20 percent calibration error must not matter much
    assert np.all(sweep.efficiency >= 0.9)
    assert sweep.efficiency[1] >= 0.99


def test_sweep_validation_and_failures():
    sys3 = build_three_level()
    with pytest.raises(ValueError):
        robustness_sweep(sys3, "ramsey", "n_pairs", [5])
    with pytest.raises(ValueError):
        robustness_sweep(sys3, "pairs", "fwhm", [100.0])
    with pytest.raises(ValueError):
        robustness_sweep(sys3, "stirap", "alpha", [0.1])
    with pytest.raises(ValueError):
        robustness_sweep(sys3, "pairs", "n_pairs", [])
    with pytest.raises(ValueError):
        robustness_sweep(sys3, "stirap", "area_scale", [1.0],
                         base_config={"n_pairs": 5, "delta_T": 10.0})
    # impossible schedules turn into NaN rows, not a crash
    bad = robustness_sweep(sys3, "pairs", "n_pairs", [2],
                           base_config={"delta_T": 10.0, "delta_t_small": 0.01,
                                        "pump_area": 1.0, "dump_area": 1.0})
    assert math.isnan(bad.efficiency[0])


def _beat_probe_system(dipole_phases=None):
    """Anchor on a comb tooth plus a probe level 18 teeth above it."""
    e_anchor = 11145.0
    tooth = 1.0 / (C_CM_PER_PS * e_anchor)
    delta_T = round(20.0 / tooth) * tooth
    probe_offset = 18.0 / (C_CM_PER_PS * delta_T)
    mol = build_synthetic_molecule(SyntheticMoleculeSpec(
        2, e_anchor, (probe_offset,), ground_b_energies=(-500.0,),
        dipole_phases=dipole_phases))
    return mol, delta_T, probe_offset


def _oscillation_column(mol, delta_T, period):
    dts = 1.0 + (period / 16.0) * np.arange(240)
    base = {"n_pairs": 8, "pump_area": math.pi / 5.0,
            "dump_area": math.pi / 5.0}
    emap = scan_2d(mol, base, [delta_T], dts)
    return dts, emap.column(0)


def _fitted_period(dts, column):
    signal = column - column.mean()
    padded = np.fft.rfft(signal, n=8 * len(signal))
    mag = np.abs(padded)
    j = int(np.argmax(mag[1:])) + 1
    # quadratic interpolation around the peak bin
    num = 0.5 * (mag[j - 1] - mag[j + 1])
    den = mag[j - 1] - 2.0 * mag[j] + mag[j + 1]
    shift = num / den if den != 0.0 else 0.0
    df = 1.0 / (8.0 * len(signal) * (dts[1] - dts[0]))
    return 1.0 / ((j + shift) * df)


def test_weak_train_oscillates_at_the_level_spacing():
    """Intra-pair delay scans beat at the probe's offset from the anchor.

    The pump kicks a two-level superposition; the pump-dump delay sets
    the accumulated relative phase, so the per-pair transfer amplitude
    interferes with period 2 pi / (K * offset). A probe 30 cm^-1 above
    the anchor therefore shows a 1.11 ps beat.
    """
    mol, delta_T, probe_offset = _beat_probe_system()
    period = 2.0 * math.pi / (K_RAD_PS_PER_CM * probe_offset)
    dts, column = _oscillation_column(mol, delta_T, period)
    assert np.ptp(column) > 1e-3
    fitted = _fitted_period(dts, column)
    assert abs(fitted - period) / period < 0.02


def test_dump_dipole_phase_shifts_the_beat():
    # a pi/2 dipole phase on the probe's dump leg moves the oscillation
    # by 3 pi / 2: the interference term picks up the phase twice over
    mol0, delta_T, probe_offset = _beat_probe_system()
    mol1, _, _ = _beat_probe_system(dipole_phases=(0.0, math.pi / 2.0))
    period = 2.0 * math.pi / (K_RAD_PS_PER_CM * probe_offset)
    dts, col0 = _oscillation_column(mol0, delta_T, period)
    _, col1 = _oscillation_column(mol1, delta_T, period)

    f = 1.0 / period
    probe = np.exp(-2j * math.pi * f * dts)
    z0 = np.sum((col0 - col0.mean()) * probe)
    z1 = np.sum((col1 - col1.mean()) * probe)
    shift = (np.angle(z1) - np.angle(z0)) % (2.0 * math.pi)
    assert abs(shift - 1.5 * math.pi) < 0.1
