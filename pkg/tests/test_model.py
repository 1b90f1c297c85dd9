"""Mode table, wave-packet spec and consistency checks."""

import numpy as np
import pytest

from stimdyn.model import (ConsistencyError, ModelError, WavePacketSpec,
                           build_model, captured_mass, check_consistency,
                           gaussian_profile, gaussian_weight)

from conftest import small_model


def test_mode_table_published_values():
    model = build_model(L=80 * np.pi, omega_A=1000.0, Gamma_A=0.05,
                        omega_0=1000.0, N=200)
    assert model.n0 == 80000
    assert model.N == 200
    assert len(model.k) == 200
    # window is contiguous and centered on the resonant index
    assert model.mode_indices[0] == 80000 - 99
    assert model.mode_indices[-1] == 80000 + 100
    # linear dispersion: omega = k exactly
    np.testing.assert_array_equal(model.omega, model.k)
    assert model.d_eg == pytest.approx(np.sqrt(0.05 / 1000.0))
    # centered atom: even-index modes decouple exactly
    assert np.all(model.g[model.mode_indices % 2 == 0] == 0.0)
    assert np.max(np.abs(model.g)) == pytest.approx(1.411e-2, rel=1e-3)


def test_golden_rule_matches_input_rate():
    model = build_model(L=80 * np.pi, omega_A=1000.0, Gamma_A=0.05,
                        omega_0=1000.0, N=200)
    assert model.golden_rule_estimate() == pytest.approx(0.05, rel=1e-3)


def test_build_model_validation():
    with pytest.raises(ModelError):
        build_model(L=-1.0, omega_A=10.0, Gamma_A=0.1, omega_0=10.0, N=6)
    with pytest.raises(ModelError):  # odd N
        build_model(L=2.0, omega_A=10.0, Gamma_A=0.1, omega_0=10.0, N=5)
    with pytest.raises(ModelError):  # window reaches non-positive indices
        build_model(L=2.0, omega_A=10.0, Gamma_A=0.1, omega_0=10.0, N=100)
    with pytest.raises(ModelError):  # atom outside the cavity
        build_model(L=2.0, omega_A=10.0, Gamma_A=0.1, omega_0=10.0, N=6,
                    z_A=3.0)


def test_wave_packet_spec():
    spec = WavePacketSpec(z0=10.0, k0=1000.0, sigma=0.25)
    assert spec.T_P == pytest.approx(16.0)
    with pytest.raises(ModelError):
        WavePacketSpec(z0=10.0, k0=1000.0, sigma=-1.0)


def test_gaussian_profile_normalized():
    k = np.linspace(990.0, 1010.0, 20001)
    G = gaussian_profile(k, 1000.0, 0.25)
    assert np.trapezoid(G ** 2, k) == pytest.approx(1.0, abs=1e-9)


def test_gaussian_weight_normalized_on_window():
    model = build_model(L=80 * np.pi, omega_A=1000.0, Gamma_A=0.05,
                        omega_0=1000.0, N=200)
    spec = WavePacketSpec(z0=10.0, k0=1000.0, sigma=0.25)
    A = gaussian_weight(spec, model)
    assert np.sum(np.abs(A) ** 2) == pytest.approx(1.0, abs=1e-3)


def test_consistency_rejects_too_narrow_window():
    model = small_model(N=6)
    # sigma much wider than the window in momentum space
    spec = WavePacketSpec(z0=1.0, k0=model.omega_A, sigma=50.0)
    assert captured_mass(spec, model) < 0.9
    with pytest.raises(ConsistencyError):
        check_consistency(spec, model)


def test_shifted_indices_center():
    model = build_model(L=80 * np.pi, omega_A=1000.0, Gamma_A=0.05,
                        omega_0=1000.0, N=200)
    s = model.shifted_indices()
    assert s[np.argmin(np.abs(model.Delta))] == 100


def test_off_center_atom_couples_even_modes():
    model = small_model(N=6, z_A=0.7)
    assert np.all(model.g != 0.0)
