"""Initial states and Schroedinger-equation integration in the excitation subspaces.

Three subspaces are handled: a single field excitation without atom
(amplitudes A_n), one excitation shared between atom and field (B, C_n),
and two excitations (D_n, E_n, F_nm). All evolution is in the interaction
picture; the one- and two-excitation sectors are integrated with a
fixed-step classical RK4 on the complex amplitude vector.

The doubly-occupied pair amplitudes F_nm are symmetric in (n, m) and are
stored packed over pairs n < m, which makes the symmetry structural.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .model import CavityModel, WavePacketSpec, check_consistency, gaussian_weight

SQRT2 = np.sqrt(2.0)

NORM_DRIFT_TOL = 1e-6
STABILITY_LIMIT = 0.1


class IntegratorAccuracyError(RuntimeError):
    """Norm drift exceeded tolerance; a smaller dt is required."""


class DegenerateStateError(ValueError):
    """Initial state norm vanishes (fully destructive interference)."""


# ---------------------------------------------------------------------------
# state containers


@dataclass(frozen=True)
class FieldOnlyState:
    """One field excitation, no atom: sum_n A_n |1_n>."""

    A: np.ndarray
    t: float = 0.0

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.A) ** 2))


@dataclass(frozen=True)
class OneExcitationState:
    """One excitation with atom: B |e,0> + sum_n C_n |g,1_n>."""

    B: complex
    C: np.ndarray
    t: float = 0.0

    def norm_sq(self) -> float:
        return float(abs(self.B) ** 2 + np.sum(np.abs(self.C) ** 2))


@dataclass(frozen=True)
class TwoExcitationState:
    """Two excitations: D_n |e,1_n> + E_n |g,2_n> + (1/2) sum_{n!=m} F_nm |g,1_n,1_m>.

    F is stored packed over pairs n < m (attribute ``F``); ``F_full``
    reconstructs the symmetric matrix with zero diagonal.
    """

    D: np.ndarray
    E: np.ndarray
    F: np.ndarray
    t: float = 0.0

    @property
    def n_modes(self) -> int:
        return self.D.shape[0]

    def F_full(self) -> np.ndarray:
        return unpack_pairs(self.F, self.n_modes)

    def norm_sq(self) -> float:
        # packed pairs each stand for the two ordered entries (n,m), (m,n)
        return float(np.sum(np.abs(self.D) ** 2) + np.sum(np.abs(self.E) ** 2)
                     + np.sum(np.abs(self.F) ** 2))


@dataclass(frozen=True)
class Trajectory:
    """Sampled states of one integration run."""

    times: np.ndarray
    states: list
    norm_drift: float

    def populations(self) -> np.ndarray:
        from .observables import population
        return np.array([population(s) for s in self.states])


# ---------------------------------------------------------------------------
# pair packing helpers


def pair_indices(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Row/column indices (n < m) of the packed pair amplitudes."""
    return np.triu_indices(N, k=1)


def unpack_pairs(packed: np.ndarray, N: int) -> np.ndarray:
    """Packed pair vector -> full symmetric matrix with zero diagonal."""
    iu = pair_indices(N)
    out = np.zeros(packed.shape[:-1] + (N, N), dtype=packed.dtype)
    out[..., iu[0], iu[1]] = packed
    out[..., iu[1], iu[0]] = packed
    return out


def pack_pairs(full: np.ndarray) -> np.ndarray:
    """Full symmetric matrix -> packed pair vector (n < m)."""
    N = full.shape[-1]
    iu = pair_indices(N)
    return full[..., iu[0], iu[1]]


# ---------------------------------------------------------------------------
# initial states


def init_wave_packet(model: CavityModel, spec: WavePacketSpec) -> FieldOnlyState:
    """Free single-photon Gaussian wave packet at z0."""
    return FieldOnlyState(A=gaussian_weight(spec, model), t=0.0)


def init_excited_atom(model: CavityModel) -> OneExcitationState:
    """Excited atom, all modes in vacuum: B = 1, C = 0."""
    return OneExcitationState(B=1.0 + 0.0j,
                              C=np.zeros(model.N, dtype=complex), t=0.0)


def _warn_off_resonance(model: CavityModel, spec: WavePacketSpec):
    if abs(spec.k0 - model.omega_A) > 1e-9 * model.omega_A:
        warnings.warn(
            f"wave packet carrier k0={spec.k0} is off-resonant with the atom "
            f"(omega_A={model.omega_A}); published scenarios assume resonance",
            stacklevel=3)


def init_photon_plus_excited_atom(model: CavityModel,
                                  spec: WavePacketSpec) -> TwoExcitationState:
    """Excited atom plus a single-photon Gaussian packet (stimulation setup)."""
    _warn_off_resonance(model, spec)
    D = gaussian_weight(spec, model)
    N = model.N
    P = N * (N - 1) // 2
    return TwoExcitationState(D=D, E=np.zeros(N, dtype=complex),
                              F=np.zeros(P, dtype=complex), t=0.0)


def _packet_phases(model: CavityModel, spec: WavePacketSpec, z: float) -> np.ndarray:
    from .model import gaussian_profile
    G = gaussian_profile(model.k, spec.k0, spec.sigma)
    return G * np.exp(-1j * model.k * z)


def init_two_photons(model: CavityModel, spec: WavePacketSpec,
                     z1: float, z2: float) -> tuple[TwoExcitationState, float]:
    """Two single-photon packets at z1 and z2, atom in the ground state.

    The product of two packet-creation operators is not exactly unit-norm
    for overlapping packets; the state is normalized numerically and the
    applied factor is returned alongside the state.
    """
    check_consistency(spec, model)
    _warn_off_resonance(model, spec)
    w1 = _packet_phases(model, spec, z1)
    w2 = _packet_phases(model, spec, z2)
    inv_Omega = model.dk  # 1 / Omega_N
    E = SQRT2 * w1 * w2 * inv_Omega
    iu = pair_indices(model.N)
    F = (w1[iu[0]] * w2[iu[1]] + w2[iu[0]] * w1[iu[1]]) * inv_Omega
    state = TwoExcitationState(D=np.zeros(model.N, dtype=complex), E=E, F=F, t=0.0)
    return _normalized(state)


def init_phase_coherent_double(model: CavityModel, spec: WavePacketSpec,
                               z1: float, z2: float,
                               Phi_S: float) -> tuple[TwoExcitationState, float]:
    """Double pulse with a constant relative phase Phi_S, squared onto the vacuum.

    Amplitudes follow [W^dag(z1) + e^{i Phi_S} W^dag(z2)]^2 |0>, normalized
    numerically. Returns the state and the applied normalization factor.
    """
    check_consistency(spec, model)
    _warn_off_resonance(model, spec)
    w1 = _packet_phases(model, spec, z1)
    w2 = _packet_phases(model, spec, z2)
    ph = np.exp(1j * Phi_S)
    u = w1 + ph * w2
    inv_Omega = model.dk
    # (a_n^dag)^2 |0> = sqrt(2) |2_n>, so E_n = sqrt(2) u_n^2 / Omega_N and
    # the ordered-pair terms give F_nm = 2 u_n u_m / Omega_N.
    E = SQRT2 * u ** 2 * inv_Omega
    iu = pair_indices(model.N)
    F = 2.0 * u[iu[0]] * u[iu[1]] * inv_Omega
    state = TwoExcitationState(D=np.zeros(model.N, dtype=complex), E=E, F=F, t=0.0)
    return _normalized(state)


def _normalized(state: TwoExcitationState,
                floor: float = 1e-8) -> tuple[TwoExcitationState, float]:
    nrm = np.sqrt(state.norm_sq())
    if nrm < floor:
        raise DegenerateStateError(
            f"state norm {nrm:.3e} below {floor}; fully destructive overlap")
    factor = 1.0 / nrm
    return replace(state, D=state.D * factor, E=state.E * factor,
                   F=state.F * factor), factor


# ---------------------------------------------------------------------------
# evolution


def evolve_free(state: FieldOnlyState, model: CavityModel,
                t: float) -> FieldOnlyState:
    """Exact free evolution A_n(t) = A_n(t0) e^{-i omega_n (t - t0)}."""
    dt = t - state.t
    return FieldOnlyState(A=state.A * np.exp(-1j * model.omega * dt), t=t)


def _check_step(model: CavityModel, dt: float):
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    dmax = float(np.abs(model.Delta).max())
    if dt * dmax > STABILITY_LIMIT:
        raise ValueError(
            f"dt={dt} violates the stability guard dt*max|Delta| <= "
            f"{STABILITY_LIMIT} (max|Delta|={dmax:.3g}); use dt <= "
            f"{STABILITY_LIMIT / dmax:.3g}")


def _rk4(y: np.ndarray, rhs, n_steps: int, dt: float, stride: int,
         record) -> None:
    """Fixed-step RK4, calling record(step_index, y) at each sample point."""
    record(0, y)
    for i in range(n_steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * dt * k1)
        k3 = rhs(y + 0.5 * dt * k2)
        k4 = rhs(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (i + 1) % stride == 0 or i == n_steps - 1:
            record(i + 1, y)


def _drift_check(states, dt: float):
    drift = abs(states[-1].norm_sq() - states[0].norm_sq())
    if drift > NORM_DRIFT_TOL:
        raise IntegratorAccuracyError(
            f"norm drift {drift:.3e} exceeds {NORM_DRIFT_TOL}; "
            f"try dt <= {dt / 2}")
    return drift


def evolve_one_excitation(state: OneExcitationState, model: CavityModel,
                          t_end: float, dt: float = 0.01,
                          stride: int = 50) -> Trajectory:
    """Integrate the one-excitation amplitudes (B, C_n) up to t_end."""
    _check_step(model, dt)
    g, Delta = model.g, model.Delta
    n_steps = max(1, int(round((t_end - state.t) / dt)))

    def rhs(y):
        B, C = y[0], y[1:]
        dB = 1j * np.dot(g, C)
        dC = -1j * Delta * C + 1j * g * B
        return np.concatenate(([dB], dC))

    times, states = [], []

    def record(i, y):
        times.append(state.t + i * dt)
        states.append(OneExcitationState(B=y[0], C=y[1:].copy(),
                                         t=state.t + i * dt))

    y0 = np.concatenate(([state.B], state.C)).astype(complex)
    _rk4(y0, rhs, n_steps, dt, stride, record)
    drift = _drift_check(states, dt)
    return Trajectory(times=np.array(times), states=states, norm_drift=drift)


def _two_excitation_rhs(model: CavityModel):
    """Right-hand side of the two-excitation equations of motion.

    Operates on a batch of flattened states of shape (..., 2N + P); the
    pair amplitudes are unpacked to a full symmetric matrix per call for
    the row sums entering the D equation.
    """
    N = model.N
    g, Delta = model.g, model.Delta
    iu_n, iu_m = pair_indices(N)
    Delta_pair = Delta[iu_n] + Delta[iu_m]
    g_n, g_m = g[iu_n], g[iu_m]

    def rhs(y):
        D = y[..., :N]
        E = y[..., N:2 * N]
        Fp = y[..., 2 * N:]
        F = unpack_pairs(Fp, N)
        # sum_m g_m F_nm: the coupling of |e,1_n> to the pair states carries
        # the g of the annihilated partner mode (Hermitian counterpart of
        # the -g_m D_n term in the pair equation)
        gF = F @ g
        dD = -1j * (Delta * D - gF - SQRT2 * g * E)
        dE = -1j * (2.0 * Delta * E - SQRT2 * g * D)
        dF = -1j * (Delta_pair * Fp - g_n * np.take(D, iu_m, axis=-1)
                    - g_m * np.take(D, iu_n, axis=-1))
        return np.concatenate((dD, dE, dF), axis=-1)

    return rhs


def _flatten2(state: TwoExcitationState) -> np.ndarray:
    return np.concatenate((state.D, state.E, state.F)).astype(complex)


def _unflatten2(y: np.ndarray, N: int, t: float) -> TwoExcitationState:
    return TwoExcitationState(D=y[:N].copy(), E=y[N:2 * N].copy(),
                              F=y[2 * N:].copy(), t=t)


def evolve_two_excitation(state: TwoExcitationState, model: CavityModel,
                          t_end: float, dt: float = 0.01,
                          stride: int = 50) -> Trajectory:
    """Integrate the two-excitation amplitudes (D, E, F) up to t_end."""
    _check_step(model, dt)
    rhs = _two_excitation_rhs(model)
    n_steps = max(1, int(round((t_end - state.t) / dt)))
    times, states = [], []

    def record(i, y):
        times.append(state.t + i * dt)
        states.append(_unflatten2(y, model.N, state.t + i * dt))

    _rk4(_flatten2(state), rhs, n_steps, dt, stride, record)
    drift = _drift_check(states, dt)
    return Trajectory(times=np.array(times), states=states, norm_drift=drift)


def evolve_two_excitation_batch(states: list[TwoExcitationState],
                                model: CavityModel, t_end: float,
                                dt: float = 0.01,
                                stride: int = 50) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Propagate several two-excitation states at once, recording populations.

    All states must share the starting time. Returns (times, P) where P has
    shape (n_samples, n_states) with the atomic populations sum_n |D_n|^2.
    Used for phase scans, where only the population history is needed.
    """
    t0 = states[0].t
    if any(s.t != t0 for s in states):
        raise ValueError("batch states must share the starting time")
    _check_step(model, dt)
    rhs = _two_excitation_rhs(model)
    n_steps = max(1, int(round((t_end - t0) / dt)))
    N = model.N
    times, pops = [], []

    def record(i, y):
        times.append(t0 + i * dt)
        pops.append(np.sum(np.abs(y[..., :N]) ** 2, axis=-1))

    y0 = np.stack([_flatten2(s) for s in states])
    norm0 = np.sum(np.abs(y0) ** 2, axis=-1)
    _rk4(y0, rhs, n_steps, dt, stride, record)
    return np.array(times), np.array(pops), norm0


# ---------------------------------------------------------------------------
# interaction-picture energy (conserved; used as an integration diagnostic)


def interaction_energy(state, model: CavityModel) -> float:
    """Expectation value of the interaction-picture Hamiltonian."""
    g, Delta = model.g, model.Delta
    if isinstance(state, FieldOnlyState):
        return float(np.sum(Delta * np.abs(state.A) ** 2))
    if isinstance(state, OneExcitationState):
        diag = np.sum(Delta * np.abs(state.C) ** 2)
        coup = -2.0 * np.real(np.conj(state.B) * np.dot(g, state.C))
        return float(diag + coup)
    if isinstance(state, TwoExcitationState):
        F = state.F_full()
        diag = (np.sum(Delta * np.abs(state.D) ** 2)
                + 2.0 * np.sum(Delta * np.abs(state.E) ** 2)
                + np.sum((Delta[:, None] + Delta[None, :]) * np.abs(F) ** 2) / 2.0)
        coup = -2.0 * np.real(
            SQRT2 * np.sum(g * np.conj(state.D) * state.E)
            + np.sum(np.conj(state.D) * (F @ g)))
        return float(diag + coup)
    raise TypeError(f"unsupported state type {type(state).__name__}")
