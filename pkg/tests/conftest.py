"""Shared fixtures: figure-scale runs reused across the acceptance tests."""

from __future__ import annotations

import numpy as np
import pytest

from stimdyn.dynamics import (evolve_one_excitation, evolve_two_excitation,
                              evolve_free, init_excited_atom,
                              init_phase_coherent_double,
                              init_photon_plus_excited_atom, init_wave_packet)
from stimdyn.model import WavePacketSpec, build_model
from stimdyn.observables import phase_scan

L = 80.0 * np.pi
OMEGA = 1000.0
GAMMA = 0.05
SIGMA = 0.25
Z1, Z2 = 95.7, 75.7


def small_model(N: int = 6, Gamma_A: float = 0.3, L_small: float = 2.0,
                omega: float = 10.0, z_A: float | None = None):
    """Tiny cavity for brute-force oracles (N <= 6 keeps expm cheap)."""
    return build_model(L=L_small, omega_A=omega, Gamma_A=Gamma_A,
                       omega_0=omega, N=N, z_A=z_A)


@pytest.fixture(scope="session")
def fig_model():
    """The published cavity: L = 80 pi, Gamma = 0.05, omega = 1000, N = 200."""
    return build_model(L=L, omega_A=OMEGA, Gamma_A=GAMMA, omega_0=OMEGA,
                       N=200)


def packet(z0: float) -> WavePacketSpec:
    return WavePacketSpec(z0=z0, k0=OMEGA, sigma=SIGMA)


@pytest.fixture(scope="session")
def spon_traj(fig_model):
    """Spontaneous decay of the excited atom to t = 80."""
    return evolve_one_excitation(init_excited_atom(fig_model), fig_model,
                                 t_end=80.0, dt=0.02, stride=5)


@pytest.fixture(scope="session")
def stim_early_traj(fig_model):
    """Photon in front of the atom (z0 = 117.7), integrated to t = 40."""
    state = init_photon_plus_excited_atom(fig_model, packet(117.7))
    return evolve_two_excitation(state, fig_model, t_end=40.0, dt=0.02,
                                 stride=5)


@pytest.fixture(scope="session")
def stim_late_traj(fig_model):
    """Photon arriving late (z0 = 87.7), integrated to t = 60."""
    state = init_photon_plus_excited_atom(fig_model, packet(87.7))
    return evolve_two_excitation(state, fig_model, t_end=60.0, dt=0.02,
                                 stride=5)


@pytest.fixture(scope="session")
def double_pulse_traj(fig_model):
    """Phase-coherent double packet (z1, z2), integrated to t = 45."""
    state, _ = init_phase_coherent_double(fig_model, packet(Z1), Z1, Z2, 0.0)
    return evolve_two_excitation(state, fig_model, t_end=45.0, dt=0.02,
                                 stride=5)


@pytest.fixture(scope="session")
def phase_scan_64(fig_model):
    """64-point relative-phase scan (the long run of the suite)."""
    phis = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    return phase_scan(fig_model, packet(Z1), Z1, Z2, phis,
                      window=(50.0, 62.0), dt=0.02, stride=50)


@pytest.fixture(scope="session")
def signature_states(fig_model):
    """The three reference states at t_ref = 96 for the intensity signatures."""
    spec = packet(117.7)
    t_ref = 96.0
    st3 = evolve_two_excitation(init_photon_plus_excited_atom(fig_model, spec),
                                fig_model, t_end=t_ref, dt=0.02,
                                stride=10 ** 9).states[-1]
    st2 = evolve_one_excitation(init_excited_atom(fig_model), fig_model,
                                t_end=t_ref, dt=0.02,
                                stride=10 ** 9).states[-1]
    st1 = evolve_free(init_wave_packet(fig_model, spec), fig_model, t_ref)
    return st1, st2, st3
