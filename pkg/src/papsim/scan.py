"""Delay-scan landscapes, beat extraction, revivals, robustness sweeps.

The 2D scan evaluates the unshaped pair-train transfer on a grid of
inter-pair delays delta_T (columns) and intra-pair delays delta_t
(rows). Cells are independent runs, so the scan parallelizes over
columns; a failed cell (overlapping pulses, numerical blowup) becomes
NaN rather than aborting the scan.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import config_fingerprint
from .levels import LevelSystem, system_to_dict
from .propagator import NumericsError
from .protocols import run_pair_train, run_piecewise_crp, run_piecewise_stirap
from .units import C_CM_PER_PS, K_RAD_PS_PER_CM

WORKERS_ENV_VAR = "PAPSIM_WORKERS"


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit argument, else environment, else serial."""
    if workers is None:
        env = os.environ.get(WORKERS_ENV_VAR)
        workers = int(env) if env else 1
    if workers < 1:
        raise ValueError("workers must be >= 1")
    return workers


@dataclass(frozen=True)
class EfficiencyMap:
    """Transfer efficiency over the (delta_T, delta_t) delay plane.

    efficiency[i, j] belongs to delta_t_axis[i] and delta_T_axis[j];
    NaN marks cells whose schedule was invalid. config_fingerprint
    hashes the full scan configuration so exports can be traced back to
    the run that made them.
    """

    delta_T_axis: np.ndarray
    delta_t_axis: np.ndarray
    efficiency: np.ndarray
    config_fingerprint: str
    details: dict = field(default_factory=dict)

    def column(self, j: int) -> np.ndarray:
        """Efficiency against delta_t at delta_T_axis[j]."""
        return self.efficiency[:, j]

    def row(self, i: int) -> np.ndarray:
        """Efficiency against delta_T at delta_t_axis[i]."""
        return self.efficiency[i, :]


def _validate_axis(axis: np.ndarray, name: str) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or axis.size == 0:
        raise ValueError(f"{name} must be a non-empty 1D grid")
    if axis.size > 1 and not np.all(np.diff(axis) > 0):
        raise ValueError(f"{name} must be strictly increasing")
    return axis


def _scan_column(args) -> np.ndarray:
    """One delta_T column of the map; module-level so workers can pickle it."""
    system, base, delta_T, delta_t_axis = args
    out = np.empty(delta_t_axis.size)
    for i, dt_small in enumerate(delta_t_axis):
        try:
            res = run_pair_train(system, delta_T=float(delta_T),
                                 delta_t_small=float(dt_small),
                                 record="none", **base)
            out[i] = res.final_target_population
        except (ValueError, NumericsError):
            out[i] = math.nan
    return out


def scan_2d(levels: LevelSystem, base_config: dict,
            delta_T_grid, delta_t_grid, *,
            workers: int | None = None) -> EfficiencyMap:
    """Pair-train efficiency on the delay grid, Raman lock per delta_T.

    base_config holds the run_pair_train keyword arguments that stay
    fixed across the grid (n_pairs, areas, shape, fwhm, f0_pump, ...).
    Each cell rebuilds its comb-locked frame from its own delta_T, which
    is how a repetition-rate scan with a maintained Raman lock works.
    Results are deterministic and independent of the worker count: cells
    are pure functions of (levels, base_config, delta_T, delta_t).
    """
    delta_T_axis = _validate_axis(delta_T_grid, "delta_T_grid")
    delta_t_axis = _validate_axis(delta_t_grid, "delta_t_grid")
    base = dict(base_config)
    if "n_pairs" not in base:
        raise ValueError("base_config must set n_pairs")
    base.pop("record", None)

    jobs = [(levels, base, dT, delta_t_axis) for dT in delta_T_axis]
    n_workers = min(resolve_workers(workers), len(jobs))
    if n_workers == 1:
        columns = [_scan_column(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            columns = list(pool.map(_scan_column, jobs))

    fingerprint = config_fingerprint({
        "protocol": "pairs",
        "system": system_to_dict(levels),
        "base": base,
        "delta_T_grid": [float(x) for x in delta_T_axis],
        "delta_t_grid": [float(x) for x in delta_t_axis],
    })
    details = {"n_pairs": base.get("n_pairs"), "workers": n_workers}
    return EfficiencyMap(delta_T_axis, delta_t_axis,
                         np.column_stack(columns), fingerprint, details)


@dataclass(frozen=True)
class BeatSpectrum:
    """Magnitude spectrum of one delta_t efficiency column.

    frequency_axis is in wavenumbers (cm^-1): the delay-domain
    frequency over the speed of light. signal is the mean-subtracted
    column the spectrum came from, kept for energy checks.
    """

    frequency_axis: np.ndarray
    magnitude: np.ndarray
    delta_t_axis: np.ndarray
    signal: np.ndarray

    @property
    def bin_width(self) -> float:
        """Frequency resolution in cm^-1."""
        return float(self.frequency_axis[1] - self.frequency_axis[0])

    @property
    def peak_frequency(self) -> float:
        """Frequency (cm^-1) of the largest nonzero-frequency magnitude."""
        if self.magnitude.size < 2:
            return 0.0
        return float(self.frequency_axis[1 + int(np.argmax(self.magnitude[1:]))])


def fft_delta_t(map: EfficiencyMap, delta_T_index: int,
                window: str | None = None) -> BeatSpectrum:
    """Beat spectrum of the delta_t dependence at one delta_T.

    The column is mean-subtracted and Fourier transformed along the
    (uniform) delta_t axis; magnitudes of the non-negative half-spectrum
    are returned with the axis converted from 1/ps to cm^-1. Efficiency
    oscillating as cos(K * spacing * delta_t) therefore peaks at
    spacing. window=None by default; "hann" tapers the column first.
    """
    delta_t = np.asarray(map.delta_t_axis, dtype=float)
    if delta_t.size < 8:
        raise ValueError("need at least 8 delta_t samples")
    steps = np.diff(delta_t)
    h = steps[0]
    if not np.allclose(steps, h, rtol=1e-9, atol=0.0):
        raise ValueError("delta_t axis must be uniform")
    column = np.asarray(map.column(delta_T_index), dtype=float)
    if np.any(~np.isfinite(column)):
        raise ValueError("column contains missing cells")

    signal = column - column.mean()
    if window is None:
        tapered = signal
    elif window == "hann":
        tapered = signal * np.hanning(signal.size)
    else:
        raise ValueError(f"unknown window {window!r}")

    spectrum = np.fft.rfft(tapered)
    freq_cm1 = np.fft.rfftfreq(signal.size, d=h) / C_CM_PER_PS
    return BeatSpectrum(freq_cm1, np.abs(spectrum), delta_t, signal)


@dataclass(frozen=True)
class RevivalReport:
    """Free-evolution rephasing fidelity of an excited wave packet."""

    times: np.ndarray
    fidelity: np.ndarray
    revival_times: np.ndarray
    revival_fidelities: np.ndarray


def revival_diagnostics(levels: LevelSystem, initial_excited_amplitudes,
                        t_max: float, dt: float, *,
                        threshold: float = 0.5) -> RevivalReport:
    """Autocorrelation fidelity of a freely evolving excited packet.

    F(t) = |sum_k p_k exp(-i K E_k t)|^2 with p_k the normalized level
    populations of the given amplitudes: the chance of finding the
    packet back in its initial shape, decay excluded. Local maxima of
    F above threshold, best first, are the candidate inter-pair delays
    for a train that wants to hit the packet in phase.
    """
    amps = np.asarray(initial_excited_amplitudes, dtype=complex)
    if amps.size != levels.n_excited:
        raise ValueError("need one amplitude per excited level")
    weights = np.abs(amps) ** 2
    total = weights.sum()
    if total <= 0:
        raise ValueError("excited amplitudes are all zero")
    if t_max <= 0 or dt <= 0 or dt > t_max:
        raise ValueError("need 0 < dt <= t_max")
    weights = weights / total

    energies = np.array([lv.energy for lv in levels.excited])
    times = np.arange(0.0, t_max + dt / 2.0, dt)
    phases = np.exp(-1j * K_RAD_PS_PER_CM * np.outer(times, energies))
    fidelity = np.abs(phases @ weights) ** 2

    interior = np.flatnonzero(
        (fidelity[1:-1] >= fidelity[:-2]) & (fidelity[1:-1] > fidelity[2:])
        & (fidelity[1:-1] >= threshold)) + 1
    interior = interior[times[interior] > 0.0]
    order = np.argsort(fidelity[interior])[::-1]
    ranked = interior[order]
    return RevivalReport(times, fidelity, times[ranked], fidelity[ranked])


@dataclass(frozen=True)
class SweepResult:
    """Efficiency table of a one-parameter robustness sweep."""

    parameter: str
    values: np.ndarray
    efficiency: np.ndarray
    details: dict = field(default_factory=dict)

    def spread(self) -> float:
        """max - min efficiency over the swept values (NaN-aware)."""
        return float(np.nanmax(self.efficiency) - np.nanmin(self.efficiency))


SWEEP_PARAMETERS = ("n_pairs", "area_scale", "alpha")
SWEEP_PROTOCOLS = ("stirap", "crp", "pairs")


def robustness_sweep(levels: LevelSystem, protocol: str, parameter: str,
                     values, *, base_config: dict | None = None) -> SweepResult:
    """One protocol run per parameter value, everything else constant.

    parameter "n_pairs" varies the pulse count at fixed total integral
    action (areas are totals, so the per-pulse action rescales by
    itself), "area_scale" multiplies both channel areas, "alpha" sets
    both chirp staircases of the crp protocol. Failed rows become NaN.
    """
    if protocol not in SWEEP_PROTOCOLS:
        raise ValueError(f"protocol must be one of {SWEEP_PROTOCOLS}")
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError(f"parameter must be one of {SWEEP_PARAMETERS}")
    if parameter == "alpha" and protocol != "crp":
        raise ValueError("alpha sweeps only apply to the crp protocol")
    vals = np.asarray(values, dtype=float)
    if vals.size == 0:
        raise ValueError("values must be non-empty")
    base = dict(base_config or {})
    base.setdefault("record", "none")

    effs = np.empty(vals.size)
    for i, v in enumerate(vals):
        kwargs = dict(base)
        if parameter == "n_pairs":
            kwargs["n_pairs"] = int(round(v))
        elif parameter == "area_scale":
            for key in ("pump_area", "dump_area"):
                ref = base.get(key)
                if ref is None:
                    raise ValueError(f"area_scale sweep needs {key} in base_config")
                kwargs[key] = ref * v
        else:
            kwargs["alpha_pump"] = v
            kwargs["alpha_dump"] = v
        try:
            effs[i] = _run_sweep_point(levels, protocol, kwargs)
        except (ValueError, NumericsError):
            effs[i] = math.nan
    return SweepResult(parameter, vals, effs,
                       {"protocol": protocol, "base": base})


def _run_sweep_point(levels: LevelSystem, protocol: str, kwargs: dict) -> float:
    if protocol == "stirap":
        res = run_piecewise_stirap(levels, **kwargs)
    elif protocol == "crp":
        res = run_piecewise_crp(levels, **kwargs)
    else:
        res = run_pair_train(levels, **kwargs)
    return res.final_target_population
