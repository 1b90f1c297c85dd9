"""Temporal dynamics of stimulated emission.

Exact quantum evolution of a two-level emitter in a multimode 1D cavity
(one- and two-excitation subspaces), a semiclassical optical-Bloch
counterpart with a perturbative stimulated/absorption decomposition, and
event-rate estimates for nuclear stimulated emission with broadband x-ray
double pulses.
"""

from .model import (CavityModel, ConsistencyError, ModelError, WavePacketSpec,
                    build_model, check_consistency, gaussian_weight)
from .dynamics import (FieldOnlyState, IntegratorAccuracyError,
                       OneExcitationState, Trajectory, TwoExcitationState,
                       evolve_free, evolve_one_excitation,
                       evolve_two_excitation, evolve_two_excitation_batch,
                       init_excited_atom, init_phase_coherent_double,
                       init_photon_plus_excited_atom, init_two_photons,
                       init_wave_packet)
from .observables import (PhaseScanResult, SpatialProfile, TimeSeries,
                          center_of_mass, decay_rate, induced_packet,
                          intensity, intensity_differences, phase_scan,
                          population, population_series, spectrum)
from .semiclassical import (DensityState, OBETrajectory,
                            PerturbativeBreakdown, PulsePair, TraceDriftError,
                            evolve_obe, evolve_obe_pulses,
                            normalize_amplitude_1d, perturbative_terms,
                            predicted_rho22, stimulated_count)
from .nuclear import (DoublePulseReport, NuclearTarget, XrayPulseSpec,
                      broadband_amplitude, delayed_signal, delta_D,
                      run_double_pulse, stimulated_event_rate,
                      wigner_weisskopf_3d)

__version__ = "0.1.0"
