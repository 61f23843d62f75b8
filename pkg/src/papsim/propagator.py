"""State propagation in the two-frequency rotating frame.

One rotation per channel: ground_a amplitudes rotate at the initial
level's frequency, excited amplitudes additionally at the pump frame
frequency, ground_b additionally at pump minus dump. In this frame the
Hamiltonian of level k carries the diagonal d_k - i Gamma_k / 2 with

    d_g = K (E_g - E_i)                      (ground_a)
    d_e = K (E_e - E_i) - omega_pump         (excited)
    d_b = K (E_b - E_i) - omega_pump + omega_dump   (ground_b)

and a pulse couples its channel with the envelope Rabi rate times
exp(-i phi(t)) on the absorption leg (lower manifold -> excited for the
pump, ground_b -> excited for the dump). phi(t) is the carrier phase,
d phi = K * carrier_detuning per unit time plus the per-pulse constant;
it is evaluated analytically from the schedule, never integrated.

Free evolution is exact: a_k <- a_k exp(-i d_k dt - Gamma_k dt / 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import PulseSpec, TrainSchedule, rabi_envelope
from .levels import LevelSystem, raman_shift
from .units import K_RAD_PS_PER_CM

# fixed-step RK4 with at least this many steps per pulse support; the
# contract caps the step at support/400, the default stays 2x inside it
MIN_STEPS_PER_PULSE = 800

ORACLE_MAX_LEVELS = 32


class NumericsError(RuntimeError):
    """Propagation produced non-finite amplitudes."""


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Complex amplitudes over ground_a ++ excited ++ ground_b at a time (ps)."""

    amplitudes: np.ndarray
    time: float

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


def ground_state(system: LevelSystem, time: float = 0.0) -> QuantumState:
    """All population in the system's initial level."""
    amps = np.zeros(system.n_levels, dtype=complex)
    amps[system.initial_global_index] = 1.0
    return QuantumState(amps, time)


@dataclass(frozen=True)
class PhaseFrame:
    """Reference frequencies (rad/ps) of the two rotating channels.

    Carrier phases of scheduled pulses are exact functions of the event
    times and comb parameters; nothing here is ever obtained by
    integrating optical cycles.
    """

    omega_pump: float
    omega_dump: float

    @classmethod
    def for_system(cls, system: LevelSystem, pump_offset: float = 0.0,
                   two_photon_offset: float = 0.0) -> "PhaseFrame":
        """Raman-locked frame resonant with the system's carrier anchor.

        pump_offset detunes the pump reference (cm^-1, positive = carrier
        above the anchor transition); two_photon_offset detunes the
        two-photon reference so the target level sits that many cm^-1
        from two-photon resonance.
        """
        e_init = system.initial_level.energy
        omega_pump = K_RAD_PS_PER_CM * (system.anchor_energy() - e_init + pump_offset)
        omega_dump = omega_pump + K_RAD_PS_PER_CM * (raman_shift(system) - two_photon_offset)
        return cls(omega_pump, omega_dump)

    @classmethod
    def comb_locked(cls, system: LevelSystem, delta_T: float,
                    f0_pump: float = 0.0) -> "PhaseFrame":
        """Frame at the comb tooth nearest the anchor transition.

        The comb has f_rep = 1/delta_T (THz) and pump offset f0_pump; the
        pump carrier snaps to the nearest tooth 2 pi (N f_rep + f0_pump)
        and the dump carrier keeps the exact Raman offset from it, which
        is what a locked dump comb provides. Detunings of the levels from
        the snapped carrier then vary with delta_T exactly as the teeth
        slide across the spectrum.
        """
        if delta_T <= 0:
            raise ValueError("delta_T must be positive")
        f_rep = 1.0 / delta_T
        e_init = system.initial_level.energy
        f_nominal = K_RAD_PS_PER_CM * (system.anchor_energy() - e_init) / (2.0 * math.pi)
        n_tooth = round((f_nominal - f0_pump) / f_rep)
        omega_pump = 2.0 * math.pi * (n_tooth * f_rep + f0_pump)
        omega_dump = omega_pump + K_RAD_PS_PER_CM * raman_shift(system)
        return cls(omega_pump, omega_dump)

    def detunings(self, system: LevelSystem) -> np.ndarray:
        """Frame-referenced diagonal (rad/ps) of every level, global order."""
        e = system.energies()
        e_init = system.initial_level.energy
        d = K_RAD_PS_PER_CM * (e - e_init)
        d[system.slice_excited()] -= self.omega_pump
        d[system.slice_ground_b()] -= self.omega_pump - self.omega_dump
        return d


def pulse_center_phase(pulse: PulseSpec, center_time: float) -> float:
    """Analytic carrier phase of a pulse at its center time (rad)."""
    return pulse.carrier_phase + K_RAD_PS_PER_CM * pulse.carrier_detuning * center_time


# --- Hamiltonian assembly ---

def _absorption_matrix(system: LevelSystem, pulse: PulseSpec) -> np.ndarray:
    """Absorption-leg coupling matrix A (excited rows) for a unit envelope.

    H(t) = diag + w(t) * (exp(-i phi(t)) A + exp(+i phi(t)) A^dagger).
    Dump couplings carry the per-level dipole phases and any pulse phase
    mask in this (absorption) quadrature.
    """
    n = system.n_levels
    A = np.zeros((n, n), dtype=complex)
    sl_e = system.slice_excited()
    if pulse.channel == "pump":
        sl_g = system.slice_ground_a()
        A[sl_e, sl_g] = -0.5 * system.pump_dipoles.T
    else:
        couplings = system.dump_dipoles.T.astype(complex)
        if system.dipole_phases is not None:
            couplings = couplings * np.exp(1j * system.dipole_phases)[:, None]
        if pulse.phase_mask is not None:
            if len(pulse.phase_mask) != system.n_excited:
                raise ValueError("phase_mask must hold one phase per excited level")
            couplings = couplings * np.exp(1j * np.asarray(pulse.phase_mask))[:, None]
        sl_b = system.slice_ground_b()
        A[sl_e, sl_b] = -0.5 * couplings
    return A


def _diagonal(system: LevelSystem, frame: PhaseFrame) -> np.ndarray:
    return frame.detunings(system) - 0.5j * system.decay_rates()


def _integrate_pulse(y: np.ndarray, system: LevelSystem, pulse: PulseSpec,
                     frame: PhaseFrame, center_phase: float, steps: int,
                     sample_stride: int | None = None):
    """RK4 over one pulse support. y is a state vector or an operator.

    The carrier phase is center_phase at the support midpoint and slides
    at K * carrier_detuning away from it. Returns (y, samples) where
    samples is None or a list of (tau, y_copy) at every sample_stride
    steps.
    """
    T = pulse.support_ps
    h = T / steps
    diag = _diagonal(system, frame)
    A = _absorption_matrix(system, pulse)
    Ah = A.conj().T
    delta_omega = K_RAD_PS_PER_CM * pulse.carrier_detuning
    amp_is_matrix = y.ndim == 2

    def rhs(tau: float, state: np.ndarray) -> np.ndarray:
        w = float(rabi_envelope(pulse, tau))
        phi = center_phase + delta_omega * (tau - T / 2.0)
        drive = w * np.exp(-1j * phi)
        if amp_is_matrix:
            out = diag[:, None] * state
        else:
            out = diag * state
        out = out + drive * (A @ state) + np.conj(drive) * (Ah @ state)
        return -1j * out

    samples = [] if sample_stride else None
    for k in range(steps):
        t = k * h
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2.0, y + (h / 2.0) * k1)
        k3 = rhs(t + h / 2.0, y + (h / 2.0) * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if samples is not None and (k + 1) % sample_stride == 0:
            samples.append(((k + 1) * h, y.copy()))
    if not np.all(np.isfinite(y)):
        raise NumericsError(
            f"non-finite amplitudes while integrating a {pulse.channel} pulse")
    return y, samples


def propagate_pulse(state: QuantumState, system: LevelSystem, pulse: PulseSpec,
                    frame: PhaseFrame, steps: int | None = None) -> QuantumState:
    """Propagate through one pulse whose support starts at state.time.

    Fixed-step RK4, by default MIN_STEPS_PER_PULSE steps over the
    support (override via ``steps``). The carrier phase at the pulse
    center is pulse.carrier_phase plus the analytic comb slip
    K * carrier_detuning * t_center.
    """
    n_steps = MIN_STEPS_PER_PULSE if steps is None else max(int(steps), 4)
    t_center = state.time + pulse.support_ps / 2.0
    phi_c = pulse_center_phase(pulse, t_center)
    y, _ = _integrate_pulse(state.amplitudes.astype(complex), system, pulse,
                            frame, phi_c, n_steps)
    return QuantumState(y, state.time + pulse.support_ps)


def free_evolve(state: QuantumState, system: LevelSystem, dt: float,
                frame: PhaseFrame | None = None) -> QuantumState:
    """Exact field-free evolution for dt >= 0 picoseconds."""
    if dt < 0:
        raise ValueError("free evolution requires dt >= 0")
    if frame is None:
        frame = PhaseFrame.for_system(system)
    factor = np.exp((-1j * frame.detunings(system) - 0.5 * system.decay_rates()) * dt)
    return QuantumState(state.amplitudes * factor, state.time + dt)


# --- schedules ---

@dataclass(frozen=True, eq=False)
class Trajectory:
    """Recorded populations along a run.

    times (ps), populations (len(times) x n_levels), norms (total
    population, i.e. 1 minus what has decayed away), and the final state.
    """

    times: np.ndarray
    populations: np.ndarray
    norms: np.ndarray
    labels: tuple[str, ...]
    final_state: QuantumState


def _phase_conjugation(system: LevelSystem, pulse: PulseSpec,
                       phi: float) -> np.ndarray:
    """Diagonal Z with Z H(0) Z^dagger = H(phi) for this pulse's channel."""
    z = np.ones(system.n_levels, dtype=complex)
    sl = system.slice_ground_a() if pulse.channel == "pump" else system.slice_ground_b()
    z[sl] = np.exp(1j * phi)
    return z


def _operator_cache_key(pulse: PulseSpec):
    return (pulse.shape, pulse.fwhm, pulse.area, pulse.carrier_detuning,
            pulse.channel, pulse.phase_mask)


def run_schedule(state: QuantumState, system: LevelSystem,
                 schedule: TrainSchedule, frame: PhaseFrame | None = None,
                 record: str = "compressed", dense_stride: int = 20,
                 steps: int | None = None) -> Trajectory:
    """Propagate a state through every event of a schedule.

    record policies: "compressed" stores populations at every event
    boundary, "dense" additionally samples inside each pulse every
    dense_stride RK4 steps, "none" records only the endpoints.

    Identical pulses reuse one integrated evolution operator; per-event
    carrier phases enter through an exact diagonal conjugation, so a
    train of equal pulses costs one integration plus matrix-vector
    products.
    """
    if record not in ("compressed", "dense", "none"):
        raise ValueError(f"unknown record policy {record!r}")
    if frame is None:
        frame = PhaseFrame.for_system(system)
    if len(state.amplitudes) != system.n_levels:
        raise ValueError("state length does not match system")
    if not schedule.events:
        pops = state.populations()[None, :]
        return Trajectory(np.array([state.time]), pops, pops.sum(axis=1),
                          system.labels, state)
    if state.time > schedule.start_time + 1e-12:
        raise ValueError(
            f"state at t={state.time} ps starts after the first pulse support "
            f"({schedule.start_time} ps)")

    n_steps = MIN_STEPS_PER_PULSE if steps is None else max(int(steps), 4)
    times = [state.time]
    pops = [state.populations()]
    dense = record == "dense"
    cache: dict = {}

    current = state
    for ev in schedule.events:
        start = ev.time - ev.pulse.support_ps / 2.0
        dt = start - current.time
        if dt > 0:
            current = free_evolve(current, system, dt, frame)
        phi_c = pulse_center_phase(ev.pulse, ev.time)
        if dense:
            y, samples = _integrate_pulse(
                current.amplitudes.astype(complex), system, ev.pulse, frame,
                phi_c, n_steps, sample_stride=dense_stride)
            for tau, ys in samples[:-1]:
                times.append(start + tau)
                pops.append(np.abs(ys) ** 2)
            current = QuantumState(y, start + ev.pulse.support_ps)
        else:
            key = _operator_cache_key(ev.pulse)
            U = cache.get(key)
            if U is None:
                eye = np.eye(system.n_levels, dtype=complex)
                U, _ = _integrate_pulse(eye, system, ev.pulse, frame, 0.0, n_steps)
                cache[key] = U
            z = _phase_conjugation(system, ev.pulse, phi_c)
            amps = z * (U @ (np.conj(z) * current.amplitudes))
            current = QuantumState(amps, start + ev.pulse.support_ps)
        if record != "none" or ev is schedule.events[-1]:
            times.append(current.time)
            pops.append(current.populations())

    pops_arr = np.array(pops)
    return Trajectory(
        times=np.array(times),
        populations=pops_arr,
        norms=pops_arr.sum(axis=1),
        labels=system.labels,
        final_state=current,
    )


def propagate_window(state: QuantumState, system: LevelSystem,
                     pump_rabi, dump_rabi, frame: PhaseFrame,
                     duration: float, steps: int,
                     pump_phase=None, dump_phase=None,
                     record_stride: int | None = None) -> Trajectory:
    """RK4 over a window where both channels may drive simultaneously.

    pump_rabi / dump_rabi are callables Omega(t) (rad/ps) of absolute
    time; pump_phase / dump_phase optionally give the carrier phases
    phi(t) (rad). Smooth adiabatic references with overlapping envelopes
    use this; scheduled trains never need it.
    """
    if duration <= 0:
        raise ValueError("duration must be positive")
    steps = max(int(steps), 4)
    h = duration / steps
    diag = _diagonal(system, frame)
    n = system.n_levels
    sl_e = system.slice_excited()
    sl_g = system.slice_ground_a()
    sl_b = system.slice_ground_b()

    Ap = np.zeros((n, n), dtype=complex)
    Ap[sl_e, sl_g] = -0.5 * system.pump_dipoles.T
    Aph = Ap.conj().T
    dump_couplings = system.dump_dipoles.T.astype(complex)
    if system.dipole_phases is not None:
        dump_couplings = dump_couplings * np.exp(1j * system.dipole_phases)[:, None]
    Ad = np.zeros((n, n), dtype=complex)
    Ad[sl_e, sl_b] = -0.5 * dump_couplings
    Adh = Ad.conj().T

    zero = lambda t: 0.0
    pp = pump_phase or zero
    dp = dump_phase or zero

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        wp = pump_rabi(t) * np.exp(-1j * pp(t))
        wd = dump_rabi(t) * np.exp(-1j * dp(t))
        out = diag * y
        out = out + wp * (Ap @ y) + np.conj(wp) * (Aph @ y)
        out = out + wd * (Ad @ y) + np.conj(wd) * (Adh @ y)
        return -1j * out

    y = state.amplitudes.astype(complex)
    t0 = state.time
    times = [t0]
    pops = [np.abs(y) ** 2]
    for k in range(steps):
        t = t0 + k * h
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2.0, y + (h / 2.0) * k1)
        k3 = rhs(t + h / 2.0, y + (h / 2.0) * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if record_stride and ((k + 1) % record_stride == 0 or k == steps - 1):
            times.append(t0 + (k + 1) * h)
            pops.append(np.abs(y) ** 2)
    if not np.all(np.isfinite(y)):
        raise NumericsError("non-finite amplitudes in windowed propagation")
    if not record_stride:
        times.append(t0 + duration)
        pops.append(np.abs(y) ** 2)
    pops_arr = np.array(pops)
    final = QuantumState(y, t0 + duration)
    return Trajectory(np.array(times), pops_arr, pops_arr.sum(axis=1),
                      system.labels, final)


# --- dense matrix-exponential oracle (tests only) ---

def oracle_propagate(state: QuantumState, system: LevelSystem,
                     schedule: TrainSchedule, frame: PhaseFrame,
                     steps_per_pulse: int = 2000) -> QuantumState:
    """Reference propagation: piecewise-constant H, one expm per step.

    Deliberately independent of the RK4 path: the Hamiltonian is
    reassembled entrywise here and each step applies
    expm(-i H(midpoint) h). At least 2000 steps per pulse; systems are
    capped at 32 levels. Intended for verification, not production.
    """
    from scipy.linalg import expm

    if system.n_levels > ORACLE_MAX_LEVELS:
        raise ValueError(f"oracle supports at most {ORACLE_MAX_LEVELS} levels")
    steps = max(int(steps_per_pulse), 2000)
    if not schedule.events:
        return state
    if state.time > schedule.start_time + 1e-12:
        raise ValueError("state starts after the first pulse support")

    energies = system.energies()
    gammas = system.decay_rates()
    e_init = system.initial_level.energy
    n = system.n_levels
    sl_e = system.slice_excited()

    diag = np.zeros(n, dtype=complex)
    for k in range(n):
        d = K_RAD_PS_PER_CM * (energies[k] - e_init)
        if sl_e.start <= k < sl_e.stop:
            d -= frame.omega_pump
        elif k >= sl_e.stop:
            d -= frame.omega_pump - frame.omega_dump
        diag[k] = d - 0.5j * gammas[k]

    amps = state.amplitudes.astype(complex)
    t_now = state.time
    for ev in schedule.events:
        start = ev.time - ev.pulse.support_ps / 2.0
        gap = start - t_now
        if gap > 0:
            amps = amps * np.exp(-1j * diag * gap)
        pulse = ev.pulse
        T = pulse.support_ps
        h = T / steps
        phi_c = pulse_center_phase(pulse, ev.time)
        dw = K_RAD_PS_PER_CM * pulse.carrier_detuning
        for k in range(steps):
            tau = (k + 0.5) * h
            H = np.zeros((n, n), dtype=complex)
            H[np.arange(n), np.arange(n)] = diag
            w = float(rabi_envelope(pulse, tau))
            phi = phi_c + dw * (tau - T / 2.0)
            if pulse.channel == "pump":
                for i in range(system.n_ground_a):
                    for j in range(system.n_excited):
                        c = -0.5 * system.pump_dipoles[i, j] * w * np.exp(-1j * phi)
                        H[sl_e.start + j, i] += c
                        H[i, sl_e.start + j] += np.conj(c)
            else:
                for i in range(system.n_ground_b):
                    for j in range(system.n_excited):
                        mu = complex(system.dump_dipoles[i, j])
                        if system.dipole_phases is not None:
                            mu *= np.exp(1j * system.dipole_phases[j])
                        if pulse.phase_mask is not None:
                            mu *= np.exp(1j * pulse.phase_mask[j])
                        c = -0.5 * mu * w * np.exp(-1j * phi)
                        H[sl_e.start + j, sl_e.stop + i] += c
                        H[sl_e.stop + i, sl_e.start + j] += np.conj(c)
            amps = expm(-1j * H * h) @ amps
        t_now = start + T
        if not np.all(np.isfinite(amps)):
            raise NumericsError("oracle produced non-finite amplitudes")
    return QuantumState(amps, t_now)
