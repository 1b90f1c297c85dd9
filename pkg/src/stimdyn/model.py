"""Cavity, mode grid, atom and coupling constants shared by the dynamical modules.

All quantities are in dimensionless units (hbar = c = epsilon_0 = 1). The
cavity has perfect mirrors at z = 0 and z = L, so the field modes are
standing waves sin(k_n z) with k_n = n*pi/L.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ModelError(ValueError):
    """Invalid cavity/atom parameters."""


class ConsistencyError(ValueError):
    """The retained mode window does not capture the wave packet."""


@dataclass(frozen=True)
class CavityModel:
    """Immutable mode table for a two-level atom in a 1D cavity.

    The retained modes are a window of N consecutive physical indices
    centered on the resonant index n0 = round(omega_0 * L / pi). Even
    modes are kept (their coupling vanishes for z_A = L/2) so that field
    observables remain complete.
    """

    L: float
    z_A: float
    omega_A: float
    Gamma_A: float
    omega_0: float
    N: int
    n0: int
    d_eg: float
    mode_indices: np.ndarray = field(repr=False)
    k: np.ndarray = field(repr=False)
    omega: np.ndarray = field(repr=False)
    Delta: np.ndarray = field(repr=False)
    g: np.ndarray = field(repr=False)

    @property
    def dk(self) -> float:
        """Mode spacing pi/L."""
        return np.pi / self.L

    @property
    def Omega_N(self) -> float:
        """Wave-packet normalization factor L/pi (inverse mode spacing)."""
        return self.L / np.pi

    def shifted_indices(self) -> np.ndarray:
        """Plot-friendly indices n_s = n - n0 + N/2 (resonant mode at N/2)."""
        return self.mode_indices - self.n0 + self.N // 2

    def golden_rule_estimate(self, band: float = 0.25) -> float:
        """Estimate the decay rate from the couplings near resonance.

        Averages g_n^2 over an even-length window of modes around the
        resonant index (even modes carry g = 0 but account for half the
        mode density, so they must be paired with their odd neighbors)
        and applies the golden rule with mode density L/pi.
        """
        center = int(np.argmin(np.abs(self.Delta)))
        half = max(1, int(round(band * self.N / 2)))
        lo = max(0, center - half)
        hi = min(self.N, lo + 2 * half)
        return 2.0 * np.pi * float(np.mean(self.g[lo:hi] ** 2)) * self.Omega_N


@dataclass(frozen=True)
class WavePacketSpec:
    """Gaussian single-photon wave packet, Gaussian in momentum space.

    Parameters
    ----------
    z0 : center position at t = 0.
    k0 : carrier wavenumber (equals the carrier frequency, c = 1).
    sigma : momentum-space width.
    epsilon : tolerated probability mass outside the mode window.
    """

    z0: float
    k0: float
    sigma: float
    epsilon: float = 1e-3

    def __post_init__(self):
        if self.sigma <= 0:
            raise ModelError(f"sigma must be positive, got {self.sigma}")

    @property
    def T_P(self) -> float:
        """Pulse duration, approximately 4/(c*sigma)."""
        return 4.0 / self.sigma


def build_model(L: float, omega_A: float, Gamma_A: float, omega_0: float,
                N: int, z_A: float | None = None) -> CavityModel:
    """Construct the cavity mode table.

    The dipole moment is fixed by inverting the 1D Wigner-Weisskopf rate,
    d_eg = sqrt(Gamma_A / omega_A), and the couplings are
    g_n = sqrt(omega_n / L) * d_eg * sin(k_n z_A).
    """
    if L <= 0 or omega_A <= 0 or Gamma_A <= 0 or omega_0 <= 0:
        raise ModelError("L, omega_A, Gamma_A and omega_0 must be positive")
    if N % 2 != 0 or N <= 0:
        raise ModelError(f"N must be a positive even integer, got {N}")
    if z_A is None:
        z_A = L / 2.0
    if not 0.0 < z_A < L:
        raise ModelError(f"atom position z_A={z_A} outside the cavity (0, {L})")

    n0 = int(round(omega_0 * L / np.pi))
    if N >= 2 * n0:
        raise ModelError(
            f"mode window N={N} around n0={n0} would include non-positive indices")

    mode_indices = np.arange(n0 - N // 2 + 1, n0 + N // 2 + 1)
    k = mode_indices * np.pi / L
    omega = k.copy()
    Delta = omega - omega_A
    d_eg = np.sqrt(Gamma_A / omega_A)
    g = np.sqrt(omega / L) * d_eg * np.sin(k * z_A)
    # kill exactly-vanishing couplings lost to floating point sin(n*pi/2)
    if abs(z_A - L / 2.0) < 1e-12 * L:
        g[mode_indices % 2 == 0] = 0.0

    return CavityModel(L=L, z_A=z_A, omega_A=omega_A, Gamma_A=Gamma_A,
                       omega_0=omega_0, N=N, n0=n0, d_eg=d_eg,
                       mode_indices=mode_indices, k=k, omega=omega,
                       Delta=Delta, g=g)


def gaussian_profile(k: np.ndarray, k0: float, sigma: float) -> np.ndarray:
    """Normalized Gaussian momentum-space weight G(k)."""
    return (2.0 * np.pi * sigma ** 2) ** (-0.25) * np.exp(-(k - k0) ** 2 / (4.0 * sigma ** 2))


def captured_mass(spec: WavePacketSpec, model: CavityModel) -> float:
    """Probability mass of the Gaussian captured by the mode window."""
    G = gaussian_profile(model.k, spec.k0, spec.sigma)
    return float(np.sum(G ** 2) * model.dk)


def check_consistency(spec: WavePacketSpec, model: CavityModel) -> float:
    """Verify the window contains the packet; return the captured mass."""
    mass = captured_mass(spec, model)
    if not (1.0 - spec.epsilon) <= mass <= 1.0 + spec.epsilon:
        raise ConsistencyError(
            f"mode window captures probability mass {mass:.6f}, "
            f"outside [{1 - spec.epsilon:.4f}, 1]; widen N or adjust sigma")
    return mass


def gaussian_weight(spec: WavePacketSpec, model: CavityModel) -> np.ndarray:
    """Initial single-photon amplitudes A_n(0) = G(k_n) e^{-i k_n z0} / sqrt(L/pi)."""
    check_consistency(spec, model)
    G = gaussian_profile(model.k, spec.k0, spec.sigma)
    return G * np.exp(-1j * model.k * spec.z0) / np.sqrt(model.Omega_N)
