"""Scenario runner: every published experiment as a reproducible command.

Usage::

    stimdyn run <scenario> [--config FILE] [--set key=value ...] [--out DIR]
    stimdyn list

Each run writes one directory containing ``manifest.json`` (the fully
resolved configuration plus a timestamp), one or more CSV data files and a
flat ``summary.json`` keyed by signature name. Identical configurations
produce byte-identical CSV/JSON output; the timestamp lives only in the
manifest. Exit codes: 0 success, 2 configuration error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (IntegratorAccuracyError, evolve_free,
                       evolve_one_excitation, evolve_two_excitation,
                       init_excited_atom, init_phase_coherent_double,
                       init_photon_plus_excited_atom, init_wave_packet)
from .model import (ConsistencyError, ModelError, WavePacketSpec, build_model)
from .nuclear import (NuclearTarget, XrayPulseSpec, decay_curve,
                      run_double_pulse)
from .observables import (center_of_mass, decay_rate, induced_packet,
                          intensity, intensity_differences, phase_scan,
                          population_series, spectrum)
from .semiclassical import (PulsePair, TraceDriftError, evolve_obe_pulses,
                            normalize_amplitude_1d, perturbative_terms,
                            predicted_rho22, stimulated_count)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    """Invalid scenario configuration."""


# ---------------------------------------------------------------------------
# configuration plumbing

CAVITY_DEFAULTS = {
    "L": 80.0 * np.pi,
    "omega_A": 1000.0,
    "Gamma_A": 0.05,
    "omega_0": 1000.0,
    "sigma": 0.25,
}


def _fmt(x) -> str:
    """Full-double-precision text for CSV cells."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path: Path, header: list[str], columns: list[np.ndarray]):
    rows = zip(*columns)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(float(v)) if np.isrealobj(np.asarray(v)) else _fmt(v)
                        for v in row])


def _coerce(key: str, raw: str, default):
    try:
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: cannot parse {raw!r} "
                          f"as {type(default).__name__}") from exc
    return raw


def resolve_config(scenario: str, config_file: str | None,
                   overrides: list[str]) -> dict:
    """Merge defaults <- config file <- --set overrides; reject unknown keys."""
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; see `stimdyn list`")
    cfg = dict(SCENARIOS[scenario].defaults)

    def apply(key: str, raw: str, origin: str):
        if key not in cfg:
            raise ConfigError(f"unknown key {key!r} ({origin}) for scenario "
                              f"{scenario!r}; known: {sorted(cfg)}")
        cfg[key] = _coerce(key, raw, cfg[key])

    if config_file is not None:
        parser = configparser.ConfigParser()
        text = Path(config_file).read_text()
        if not text.lstrip().startswith("["):
            text = "[run]\n" + text
        parser.read_string(text)
        for section in parser.sections():
            for key, raw in parser.items(section):
                apply(key, raw, f"file {config_file}, section [{section}]")

    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        apply(key.strip(), raw.strip(), "--set")
    return cfg


def _model_from(cfg: dict, N_key: str = "n_modes"):
    return build_model(L=cfg["L"], omega_A=cfg["omega_A"],
                       Gamma_A=cfg["Gamma_A"], omega_0=cfg["omega_0"],
                       N=cfg[N_key])


def _packet_from(cfg: dict, z0: float) -> WavePacketSpec:
    return WavePacketSpec(z0=z0, k0=cfg["omega_0"], sigma=cfg["sigma"])


# ---------------------------------------------------------------------------
# scenario runners; each returns a flat summary dict and writes CSVs


def run_free_wp(cfg: dict, out: Path) -> dict:
    model = _model_from(cfg)
    spec = _packet_from(cfg, cfg["z0"])
    state0 = init_wave_packet(model, spec)
    summary = {}
    I0 = intensity(state0, model, mode=cfg["intensity_mode"])
    for t in (cfg["t_snap1"], cfg["t_snap2"]):
        st = evolve_free(state0, model, t)
        prof = intensity(st, model, mode=cfg["intensity_mode"])
        write_csv(out / f"intensity_t{t:g}.csv", ["z", "I"], [prof.z, prof.I])
        summary[f"peak_z_t{t:g}"] = float(prof.z[np.argmax(prof.I)])
    st = evolve_free(state0, model, cfg["t_snap2"])
    S = spectrum(st)
    write_csv(out / "spectrum.csv", ["n_shifted", "S"],
              [model.shifted_indices().astype(float), S])
    # rigidity: shifted late profile vs initial profile
    shift = (cfg["t_snap2"] - 0.0) % (2.0 * model.L)
    summary["rigidity_rms"] = float(np.sqrt(np.mean(
        (np.interp(I0.z, I0.z + shift, I0.I, left=0.0, right=0.0)
         - intensity(st, model, mode=cfg["intensity_mode"]).I) ** 2))
        / np.max(I0.I))
    summary["captured_mass"] = float(np.sum(np.abs(state0.A) ** 2))
    return summary


def run_spon_decay(cfg: dict, out: Path) -> dict:
    model = _model_from(cfg)
    traj = evolve_one_excitation(init_excited_atom(model), model,
                                 t_end=cfg["t_end"], dt=cfg["dt"],
                                 stride=cfg["stride"])
    pop = population_series(traj)
    rate = decay_rate(pop, smoothing_window=cfg["smoothing_window"])
    write_csv(out / "population.csv", ["t", "P2"], [pop.t, pop.values])
    write_csv(out / "decay_rate.csv", ["t", "Gamma2"], [rate.t, rate.values])
    sel = (rate.t >= cfg["avg_t_lo"]) & (rate.t <= cfg["avg_t_hi"])
    return {
        "mean_rate": float(np.nanmean(rate.values[sel])),
        "golden_rule_rate": model.golden_rule_estimate(),
        "population_final": float(pop.values[-1]),
    }


def _stimulated_run(cfg: dict, out: Path, want_signatures: bool) -> dict:
    model = _model_from(cfg)
    spec = _packet_from(cfg, cfg["z0"])
    state0 = init_photon_plus_excited_atom(model, spec)
    traj = evolve_two_excitation(state0, model, t_end=cfg["t_end"],
                                 dt=cfg["dt"], stride=cfg["stride"])
    pop = population_series(traj)
    rate = decay_rate(pop, smoothing_window=cfg["smoothing_window"])
    write_csv(out / "population.csv", ["t", "P3"], [pop.t, pop.values])
    write_csv(out / "decay_rate.csv", ["t", "Gamma3"], [rate.t, rate.values])
    # the interaction window: packet center reaches the atom at z_A - z0
    t_hit = model.z_A - cfg["z0"]
    sel = (rate.t >= t_hit - spec.T_P) & (rate.t <= t_hit + spec.T_P)
    summary = {
        "t_interaction": float(t_hit),
        "max_rate_over_Gamma": float(np.nanmax(rate.values[sel]) / model.Gamma_A),
        "min_rate_over_Gamma": float(np.nanmin(rate.values[sel]) / model.Gamma_A),
    }
    if want_signatures:
        t_ref = cfg["t_ref"]
        st3 = evolve_two_excitation(state0, model, t_end=t_ref, dt=cfg["dt"],
                                    stride=10 ** 9).states[-1]
        st2 = evolve_one_excitation(init_excited_atom(model), model,
                                    t_end=t_ref, dt=cfg["dt"],
                                    stride=10 ** 9).states[-1]
        st1 = evolve_free(init_wave_packet(model, spec), model, t_ref)
        I1 = intensity(st1, model, mode=cfg["intensity_mode"])
        I2 = intensity(st2, model, mode=cfg["intensity_mode"])
        I3 = intensity(st3, model, mode=cfg["intensity_mode"])
        write_csv(out / f"intensity_t{t_ref:g}.csv", ["z", "I1", "I2", "I3"],
                  [I1.z, I1.I, I2.I, I3.I])
        dl, dr, dtot = intensity_differences(I1, I2, I3, model.L)
        ind = induced_packet(I3, I1, model)
        write_csv(out / "induced_packet.csv", ["z", "I"], [ind.z, ind.I])
        summary.update({
            "dI_left": dl, "dI_right": dr, "dI_tot": dtot,
            "induced_com": center_of_mass(ind),
            "stimulating_com": center_of_mass(I1),
            "com_offset": abs(center_of_mass(ind) - center_of_mass(I1)),
            "T_P": spec.T_P,
        })
    return summary


def run_stim_early(cfg: dict, out: Path) -> dict:
    return _stimulated_run(cfg, out, want_signatures=True)


def run_stim_late(cfg: dict, out: Path) -> dict:
    return _stimulated_run(cfg, out, want_signatures=False)


def run_double_pulse_wp(cfg: dict, out: Path) -> dict:
    model = _model_from(cfg)
    spec = _packet_from(cfg, cfg["z1"])
    state0, _ = init_phase_coherent_double(model, spec, cfg["z1"], cfg["z2"],
                                           cfg["phi_s"])
    traj = evolve_two_excitation(state0, model, t_end=cfg["t_end"],
                                 dt=cfg["dt"], stride=cfg["stride"])
    pop = population_series(traj)
    write_csv(out / "population.csv", ["t", "P3"], [pop.t, pop.values])
    for t_snap in (cfg["t_spec1"], cfg["t_spec2"]):
        i = int(np.argmin(np.abs(pop.t - t_snap)))
        S = spectrum(traj.states[i])
        write_csv(out / f"spectrum_t{t_snap:g}.csv", ["n_shifted", "S"],
                  [model.shifted_indices().astype(float), S])
    first = (pop.t >= cfg["first_t_lo"]) & (pop.t <= cfg["first_t_hi"])
    return {
        "max_population_first_pulse": float(pop.values[first].max()),
        "max_population": float(pop.values.max()),
        "final_population": float(pop.values[-1]),
    }


def run_phase_scan(cfg: dict, out: Path) -> dict:
    model = _model_from(cfg)
    spec = _packet_from(cfg, cfg["z1"])
    phis = np.linspace(0.0, 2.0 * np.pi, cfg["n_phi"], endpoint=False)
    res = phase_scan(model, spec, cfg["z1"], cfg["z2"], phis,
                     window=(cfg["window_lo"], cfg["window_hi"]),
                     dt=cfg["dt"], stride=cfg["stride"])
    write_csv(out / "scan.csv", ["phi", "max_population"],
              [res.phis, res.max_population])
    return {"phi_min": res.phi_min, "phi_max": res.phi_max,
            "population_at_min": float(res.max_population.min()),
            "population_at_max": float(res.max_population.max())}


def run_semiclassical_compare(cfg: dict, out: Path) -> dict:
    amp = normalize_amplitude_1d(cfg["n_res"], cfg["a_beam"], cfg["sigma"],
                                 cfg["omega_0"])
    d_eg = np.sqrt(cfg["Gamma_A"] / cfg["omega_A"])
    phis = np.linspace(0.0, 2.0 * np.pi, cfg["n_phi"], endpoint=False)
    maxpops = []
    for phi in phis:
        pulses = PulsePair(amplitude=amp, sigma_c=cfg["sigma"],
                           Lambda1=cfg["lambda1"], Lambda2=cfg["lambda2"],
                           Phi_M=phi)
        traj = evolve_obe_pulses(pulses, d_eg, cfg["Gamma_A"],
                                 t_end=cfg["window_hi"], dt=cfg["dt"],
                                 stride=5)
        sel = (traj.times >= cfg["window_lo"]) & (traj.times <= cfg["window_hi"])
        maxpops.append(float(traj.rho22[sel].max()))
    maxpops = np.array(maxpops)
    write_csv(out / "scan.csv", ["phi_m", "max_rho22"], [phis, maxpops])

    from .observables import _refine_extremum
    pm_min = _refine_extremum(phis, maxpops, int(np.argmin(maxpops)))
    pm_max = _refine_extremum(phis, maxpops, int(np.argmax(maxpops)))
    expected = ((cfg["lambda2"] - cfg["lambda1"]) * cfg["omega_0"]) % (2 * np.pi)
    return {
        "phi_m_min": pm_min, "phi_m_max": pm_max,
        "expected_offset": expected,
        "offset_min": (pm_min - cfg["phi_s_min"]) % (2.0 * np.pi),
        "offset_max": (pm_max - cfg["phi_s_max"]) % (2.0 * np.pi),
        "amplitude": amp,
    }


def run_perturbative_breakdown(cfg: dict, out: Path) -> dict:
    sigma_c = cfg["sigma"]
    T_P = 4.0 / sigma_c
    areas = [float(a) for a in cfg["areas"].split(",")]
    amp1 = cfg["area1"] / T_P
    t_int = cfg["lambda2"] - cfg["t_before"]
    rows = {k: [] for k in ("area", "R_sd", "R_se", "R_ab", "R_Phi1",
                            "R_Phi2", "actual", "predicted", "error", "N_se")}
    for area in areas:
        amp2 = area / T_P
        pulses = PulsePair(amplitude=1.0, sigma_c=sigma_c,
                           Lambda1=cfg["lambda1"], Lambda2=cfg["lambda2"],
                           Phi_M=cfg["phi_m"], scale1=amp1, scale2=amp2)
        traj = evolve_obe_pulses(pulses, 1.0, cfg["Gamma_A"], t_end=t_int,
                                 dt=cfg["dt"])
        rho = traj.state_at(t_int)
        env = lambda t, a=amp2: a * np.exp(-(t - cfg["lambda2"]) ** 2
                                           * sigma_c ** 2)
        b = perturbative_terms(rho, env, cfg["phi_m"], T_P, cfg["Gamma_A"])
        full = evolve_obe_pulses(pulses, 1.0, cfg["Gamma_A"],
                                 t_end=t_int + T_P, dt=cfg["dt"])
        actual = full.state_at(t_int + T_P).rho22
        pred = predicted_rho22(rho, b)
        for k, v in (("area", area), ("R_sd", b.R_sd), ("R_se", b.R_se),
                     ("R_ab", b.R_ab), ("R_Phi1", b.R_Phi1),
                     ("R_Phi2", b.R_Phi2), ("actual", actual),
                     ("predicted", pred), ("error", abs(actual - pred)),
                     ("N_se", stimulated_count(b))):
            rows[k].append(float(v))
    write_csv(out / "breakdown.csv", list(rows), [np.array(v) for v in rows.values()])
    slope = float(np.polyfit(np.log(rows["area"]), np.log(rows["error"]), 1)[0])
    return {"error_slope": slope,
            "N_se_largest_area": rows["N_se"][0],
            "max_error": max(rows["error"])}


def _nuclear_run(cfg: dict, out: Path) -> dict:
    target = NuclearTarget(d_beam=cfg["d_beam"], Q=cfg["q_factor"],
                           N_coh=cfg["n_coh"])
    summary = dict(target.geometry_report())
    phis = [float(p) for p in cfg["phi_list"].split(",")]
    cols = {k: [] for k in ("phi", "Delta_D", "D_signal", "D_ref",
                            "rho22_signal", "rho22_ref")}
    for phi in phis:
        spec = XrayPulseSpec(T_P=cfg["t_p"], n_res=cfg["n_res"],
                             tau_d=cfg["tau_d"], Phi_M=phi,
                             scale2=cfg["scale2"])
        rep = run_double_pulse(spec, target)
        cols["phi"].append(phi)
        cols["Delta_D"].append(rep.Delta_D)
        cols["D_signal"].append(rep.D_signal)
        cols["D_ref"].append(rep.D_ref)
        cols["rho22_signal"].append(rep.rho22_signal)
        cols["rho22_ref"].append(rep.rho22_ref)
        summary[f"Delta_D_phi{phi:g}"] = rep.Delta_D
    write_csv(out / "rates.csv", list(cols), [np.array(v) for v in cols.values()])
    summary["E0"] = rep.E0
    summary["spectral_ratio"] = rep.spectral_ratio
    t, y = decay_curve(rep.rho22_ref, target, rep.T_start, rep.T_end)
    write_csv(out / "decay_curve.csv", ["t", "signal"], [t, y])
    return summary


def run_fel_rates(cfg: dict, out: Path) -> dict:
    return _nuclear_run(cfg, out)


def run_synchrotron_rates(cfg: dict, out: Path) -> dict:
    return _nuclear_run(cfg, out)


# ---------------------------------------------------------------------------
# scenario registry


class Scenario:
    def __init__(self, name, description, defaults, runner):
        self.name = name
        self.description = description
        self.defaults = defaults
        self.runner = runner


_WP = dict(CAVITY_DEFAULTS, n_modes=200, dt=0.02, stride=5,
           smoothing_window=5, intensity_mode="envelope")

_NUC = {"t_p": 100e-15, "tau_d": 5e-12, "n_res": 1.0, "scale2": 1.0,
        "d_beam": 1e-6, "q_factor": 50.0, "n_coh": 25,
        "phi_list": "3.141592653589793,6.283185307179586"}

SCENARIOS = {
    "free-wp": Scenario(
        "free-wp", "rigid propagation of a free single-photon wave packet",
        dict(CAVITY_DEFAULTS, n_modes=1000, z0=10.0, t_snap1=70.0,
             t_snap2=160.0, intensity_mode="envelope"),
        run_free_wp),
    "spon-decay": Scenario(
        "spon-decay", "exponential spontaneous decay of the excited atom",
        dict(CAVITY_DEFAULTS, n_modes=200, t_end=80.0, dt=0.02, stride=5,
             smoothing_window=5, avg_t_lo=20.0, avg_t_hi=80.0),
        run_spon_decay),
    "stim-early": Scenario(
        "stim-early", "photon arrives early: stimulated-emission enhancement",
        dict(_WP, z0=117.7, t_end=96.0, t_ref=96.0),
        run_stim_early),
    "stim-late": Scenario(
        "stim-late", "photon arrives late: transient absorption",
        dict(CAVITY_DEFAULTS, n_modes=200, z0=87.7, t_end=80.0, dt=0.02,
             stride=5, smoothing_window=5),
        run_stim_late),
    "double-pulse": Scenario(
        "double-pulse", "two phase-coherent packets exciting the atom",
        dict(CAVITY_DEFAULTS, n_modes=200, z1=95.7, z2=75.7, phi_s=0.0,
             t_end=100.0, dt=0.02, stride=25, t_spec1=50.0, t_spec2=90.0,
             first_t_lo=30.0, first_t_hi=45.0),
        run_double_pulse_wp),
    "phase-scan": Scenario(
        "phase-scan", "relative-phase scan of the double pulse",
        dict(CAVITY_DEFAULTS, n_modes=200, z1=95.7, z2=75.7, n_phi=64,
             window_lo=50.0, window_hi=62.0, dt=0.02, stride=50),
        run_phase_scan),
    "semiclassical-compare": Scenario(
        "semiclassical-compare",
        "optical-Bloch phase scan and offset to the quantum scan",
        dict(omega_A=1000.0, omega_0=1000.0, Gamma_A=0.05, sigma=0.25,
             n_res=1.0, a_beam=1.0, lambda1=30.0, lambda2=50.0, n_phi=64,
             window_lo=50.0, window_hi=62.0, dt=0.01,
             phi_s_min=2.51, phi_s_max=5.66),
        run_semiclassical_compare),
    "perturbative-breakdown": Scenario(
        "perturbative-breakdown",
        "second-order decomposition of the second pulse and its error scaling",
        dict(Gamma_A=5e-4, sigma=0.25, lambda1=30.0, lambda2=50.0,
             phi_m=np.pi / 3.0, area1=0.2, areas="0.3,0.15,0.075",
             t_before=8.0, dt=0.005),
        run_perturbative_breakdown),
    "fel-rates": Scenario(
        "fel-rates", "Fe-57 event-rate estimate for an FEL double pulse",
        dict(_NUC),
        run_fel_rates),
    "synchrotron-rates": Scenario(
        "synchrotron-rates",
        "Fe-57 event-rate estimate for a synchrotron double pulse",
        dict(_NUC, t_p=100e-12, tau_d=8e-9, scale2=0.5),
        run_synchrotron_rates),
}


# ---------------------------------------------------------------------------
# entry points


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def run_scenario(scenario: str, cfg: dict, out_dir: Path) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = SCENARIOS[scenario].runner(cfg, out_dir)
    manifest = {
        "scenario": scenario,
        "version": __version__,
        "config": cfg,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, default=_json_default) + "\n")
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True,
                   default=_json_default) + "\n")
    return summary


def list_scenarios() -> str:
    width = max(len(n) for n in SCENARIOS)
    lines = [f"{name:<{width}}  {sc.description}"
             for name, sc in SCENARIOS.items()]
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="stimdyn",
        description="Simulate the temporal dynamics of stimulated emission.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a scenario")
    p_run.add_argument("scenario")
    p_run.add_argument("--config", default=None, help="key=value config file")
    p_run.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a config key")
    p_run.add_argument("--out", default=None, help="output directory")
    sub.add_parser("list", help="list available scenarios")

    args = parser.parse_args(argv)
    if args.command == "list":
        print(list_scenarios())
        return EXIT_OK

    try:
        cfg = resolve_config(args.scenario, args.config, args.overrides)
    except (ConfigError, ModelError, OSError, configparser.Error) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out_dir = Path(args.out) if args.out else Path("runs") / args.scenario
    try:
        summary = run_scenario(args.scenario, cfg, out_dir)
    except (ConfigError, ModelError, ConsistencyError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegratorAccuracyError, TraceDriftError,
            FloatingPointError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        print(f"offending config: {cfg}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(json.dumps(summary, indent=2, sort_keys=True,
                     default=_json_default))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
