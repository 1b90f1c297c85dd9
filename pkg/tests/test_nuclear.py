"""Fe-57 broadband double-pulse event-rate estimates (SI units)."""

import numpy as np
import pytest

from stimdyn.nuclear import (HBAR, NuclearTarget, XrayPulseSpec,
                             broadband_amplitude, collective_scale,
                             decay_curve, default_time_window, delayed_signal,
                             delta_D, run_double_pulse, stimulated_event_rate,
                             wigner_weisskopf_3d)


def test_target_validation():
    with pytest.raises(ValueError):
        NuclearTarget(Q=150.0)
    with pytest.raises(ValueError):
        NuclearTarget(N_coh=0)
    with pytest.raises(ValueError):
        NuclearTarget(d_beam=-1.0)


def test_geometry_scalings():
    t1 = NuclearTarget(d_beam=1e-6)
    t2 = NuclearTarget(d_beam=2e-6)
    # quadrupling the beam area quadruples nuclei and coherence volumes
    assert t2.N_n / t1.N_n == pytest.approx(4.0, rel=1e-12)
    assert t2.M_coh / t1.M_coh == pytest.approx(4.0, rel=1e-12)
    assert t1.A_target == pytest.approx(t1.A_beam / np.sin(2.5e-3), rel=1e-12)
    assert t1.Gamma_Ncoh == pytest.approx(25 * 7.1e6)


def test_wigner_weisskopf_3d_consistent_with_measured_rate():
    target = NuclearTarget()
    rate = wigner_weisskopf_3d(target.omega_A, target.d_eg)
    # the dipole moment quoted for the transition reproduces the measured
    # single-nucleus rate to within a few percent
    assert rate == pytest.approx(target.Gamma_A, rel=0.1)


def test_collective_scale():
    target = NuclearTarget(N_coh=25)
    rabi, gamma = collective_scale(target)
    assert rabi == pytest.approx(5.0)
    assert gamma == pytest.approx(25 * target.Gamma_A)


def test_amplitude_scaling_laws():
    target = NuclearTarget()
    s1 = XrayPulseSpec(T_P=100e-15, n_res=1.0)
    s2 = XrayPulseSpec(T_P=100e-15, n_res=4.0)
    s3 = XrayPulseSpec(T_P=200e-15, n_res=1.0)
    E1, _ = broadband_amplitude(s1, target)
    E2, _ = broadband_amplitude(s2, target)
    E3, _ = broadband_amplitude(s3, target)
    assert E2 / E1 == pytest.approx(2.0, rel=1e-12)     # E0 ~ sqrt(n_res)
    assert E3 / E1 == pytest.approx(0.5, rel=1e-12)     # E0 ~ 1 / sigma_t


def test_broadband_warns_when_not_broadband():
    target = NuclearTarget()
    slow = XrayPulseSpec(T_P=1e-7)  # 100 ns pulse: comparable to lifetime
    with pytest.warns(UserWarning, match="broadband"):
        broadband_amplitude(slow, target)


def test_delayed_signal_closed_form():
    target = NuclearTarget()
    G = target.Gamma_Ncoh
    T0, T1 = 10e-12, 50e-9
    D = delayed_signal(0.3, target, T0, T1)
    t = np.linspace(T0, T1, 200001)
    ref = target.M_coh * 0.3 * np.trapezoid(np.exp(-G * t), t) / (T1 - T0)
    assert D == pytest.approx(ref, rel=1e-6)
    with pytest.raises(ValueError):
        delayed_signal(0.3, target, T1, T0)


def test_delta_D_sign_convention():
    assert delta_D(2.0, 1.0) > 0   # signal below reference: emission
    assert delta_D(1.0, 2.0) < 0   # signal above reference: absorption


def test_event_rate_proportional_to_coherence_volumes():
    from stimdyn.semiclassical import PerturbativeBreakdown
    b = PerturbativeBreakdown(R_sd=0.0, R_se=1e-6, R_ab=0.0, R_Phi1=0.0,
                              R_Phi2=1e-7, Phi_M=np.pi, t_int=0.0, T_P=1.0)
    t1 = NuclearTarget(d_beam=1e-6)
    t2 = NuclearTarget(d_beam=2e-6)
    r1 = stimulated_event_rate(b, t1)
    r2 = stimulated_event_rate(b, t2)
    assert r2 / r1 == pytest.approx(t2.M_coh / t1.M_coh, rel=1e-12)


def test_default_time_window():
    target = NuclearTarget()
    spec = XrayPulseSpec(T_P=100e-15, tau_d=5e-12)
    T0, T1 = default_time_window(spec, target)
    assert T0 == pytest.approx(5e-12 + 100e-15)
    assert T1 > 100.0 / target.Gamma_Ncoh * 0.1
    assert T1 < 1e-3


def test_run_double_pulse_reference_is_single_pulse():
    target = NuclearTarget()
    spec = XrayPulseSpec(T_P=100e-15, tau_d=5e-12, Phi_M=np.pi)
    rep = run_double_pulse(spec, target)
    assert rep.rho22_signal >= 0.0
    assert rep.rho22_ref > 0.0
    assert rep.Delta_D == pytest.approx(rep.D_ref - rep.D_signal)
    # the excitation stays deep in the perturbative regime
    assert rep.rho22_ref < 1e-6


def test_decay_curve_normalized():
    target = NuclearTarget()
    t, y = decay_curve(0.2, target, 1e-11, 1e-7)
    assert y[0] == pytest.approx(1.0)
    assert np.all(np.diff(y) <= 0)
