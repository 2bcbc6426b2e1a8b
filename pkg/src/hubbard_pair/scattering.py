"""Scattering continuum of two asymptotically free bosons.

Scattering wavefunctions use the standing-wave form ``2 cos(k|r_i| + delta)``,
i.e. unit incoming and outgoing plane-wave amplitudes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .core import LatticeParams, QuasiMomentum, as_momentum, collective_hopping, single_particle_energy
from .errors import (
    FlatBandError,
    OutsideBandError,
    SingularRelativeMomentumError,
    ZeroInteractionError,
)

SCATTERING = "scattering"
DIMER = "dimer"
LOCALIZED = "localized"

UNIT_SUM_OF_SQUARES = "unit-sum-of-squares"
PLANE_WAVE_AMPLITUDE = "plane-wave-amplitude"

SiteRange = Union[int, Iterable[int]]


@dataclass(frozen=True)
class ScatteringState:
    K: QuasiMomentum
    k: QuasiMomentum
    energy: float
    phase_shift: float
    # True when sin(kd) = 0 and U != 0: phase_shift holds the limiting value.
    at_band_edge: bool = False


@dataclass(frozen=True)
class RelativeWavefunction:
    """Relative-coordinate amplitudes ``psi_K(r_i)`` sampled at integer sites ``i``."""

    kind: str
    K: QuasiMomentum
    sites: np.ndarray
    amplitudes: np.ndarray
    normalization: str

    @property
    def samples(self) -> list[tuple[int, float]]:
        return list(zip(self.sites.tolist(), self.amplitudes.tolist()))

    def amplitude(self, i: int) -> float:
        idx = np.flatnonzero(self.sites == i)
        if idx.size == 0:
            raise KeyError(i)
        return float(self.amplitudes[idx[0]])

    def positions(self, params: LatticeParams) -> np.ndarray:
        """Relative coordinates ``r_i = d*i``."""
        return params.d * self.sites


def site_array(i_range: SiteRange) -> np.ndarray:
    """``n`` means sites -n..n; an iterable is taken as given, sorted."""
    if isinstance(i_range, (int, np.integer)):
        n = int(i_range)
        if n < 0:
            raise ValueError("site range half-width must be non-negative")
        return np.arange(-n, n + 1)
    sites = np.unique(np.asarray(list(i_range), dtype=int))
    if sites.size == 0:
        raise ValueError("empty site range")
    return sites


def scattering_energy(K, k, params: LatticeParams) -> float:
    """``-2 J_K cos(kd)``."""
    K = as_momentum(K, params)
    k = as_momentum(k, params)
    return -2.0 * collective_hopping(K, params) * math.cos(k.kd)


def free_pair_energy(K, k, params: LatticeParams) -> float:
    """Sum of the two single-particle energies at ``K/2 + k`` and ``K/2 - k``."""
    K = as_momentum(K, params)
    k = as_momentum(k, params)
    qx = QuasiMomentum(0.5 * K.kd + k.kd, params.d)
    qy = QuasiMomentum(0.5 * K.kd - k.kd, params.d)
    return single_particle_energy(qx, params) + single_particle_energy(qy, params)


def band_edges(K, params: LatticeParams) -> tuple[float, float]:
    JK = collective_hopping(K, params)
    return -2.0 * JK + 0.0, 2.0 * JK


def _checked_tangent_inputs(K, k, params):
    K = as_momentum(K, params)
    k = as_momentum(k, params)
    JK = collective_hopping(K, params)
    if JK == 0.0:
        raise FlatBandError("J_K = 0 at |K| = pi/d: scattering band is flat")
    return K, k, JK


def phase_shift(K, k, params: LatticeParams) -> float:
    """Scattering phase shift from ``tan(delta) = -U csc(kd) / (2 J_K)``.

    Raises
    ------
    FlatBandError
        If J_K = 0.
    SingularRelativeMomentumError
        If sin(kd) = 0 while U != 0; see :func:`scattering_state` for the limit.
    """
    K, k, JK = _checked_tangent_inputs(K, k, params)
    if params.U == 0.0:
        return 0.0
    # sin(pi) is ~1e-16 in floating point, so the zone edge is tested on kd itself
    if k.kd == 0.0 or abs(k.kd) == math.pi:
        raise SingularRelativeMomentumError("sin(kd) = 0: phase shift is at its band-edge limit")
    s = math.sin(k.kd)
    delta = math.atan(-params.U / (2.0 * JK * s))
    return delta + 0.0


def band_edge_phase_shift(params: LatticeParams) -> float:
    """Limiting phase shift ``-sign(U) pi/2`` at sin(kd) = 0."""
    if params.U == 0.0:
        return 0.0
    return -math.copysign(math.pi / 2, params.U)


def scattering_state(K, k, params: LatticeParams) -> ScatteringState:
    """Energy and phase shift of the (K, k) scattering state.

    At sin(kd) = 0 with U != 0 the limiting phase shift is reported and
    ``at_band_edge`` is set.
    """
    K, k, _ = _checked_tangent_inputs(K, k, params)
    energy = scattering_energy(K, k, params)
    try:
        return ScatteringState(K, k, energy, phase_shift(K, k, params))
    except SingularRelativeMomentumError:
        return ScatteringState(K, k, energy, band_edge_phase_shift(params), at_band_edge=True)


def scattering_wavefunction(K, k, params: LatticeParams, i_range: SiteRange = 10) -> RelativeWavefunction:
    """Standing-wave scattering solution ``2 cos(k|r_i| + delta)``."""
    K, k, _ = _checked_tangent_inputs(K, k, params)
    delta = phase_shift(K, k, params)
    sites = site_array(i_range)
    amplitudes = 2.0 * np.cos(k.kd * np.abs(sites) + delta)
    return RelativeWavefunction(SCATTERING, K, sites, amplitudes, PLANE_WAVE_AMPLITUDE)


def scattering_length(K, params: LatticeParams) -> float:
    """Generalized scattering length ``a_K = -2 d J_K / U``."""
    if params.U == 0.0:
        raise ZeroInteractionError("scattering length diverges at U = 0")
    return -2.0 * params.d * collective_hopping(K, params) / params.U + 0.0


def density_of_states(E: float, K, L: float, params: LatticeParams) -> float:
    """Relative-momentum density of states at fixed K for quantization length L."""
    if L <= 0:
        raise ValueError("quantization length must be positive")
    JK = collective_hopping(K, params)
    if JK == 0.0:
        raise FlatBandError("density of states undefined on a flat band")
    if abs(E) >= 2.0 * JK:
        raise OutsideBandError(f"|E| = {abs(E)!r} outside the open band (-{2 * JK!r}, {2 * JK!r})")
    return L / (2.0 * math.pi * params.d) / math.sqrt((2.0 * JK) ** 2 - E * E)


def relative_residual(wavefunction: RelativeWavefunction, energy: float, params: LatticeParams,
                      *, interior_only: bool = True) -> np.ndarray:
    """Residual of the relative-coordinate lattice equation at the sampled sites.

    Computes ``-J_K [psi(i-1) + psi(i+1)] + U delta_{i0} psi(i) - E psi(i)``.
    With ``interior_only`` the residual is returned only where both neighbours
    are sampled; otherwise missing neighbours count as zero amplitude.
    """
    JK = collective_hopping(wavefunction.K, params)
    lookup = dict(zip(wavefunction.sites.tolist(), wavefunction.amplitudes.tolist()))
    out = []
    for i, psi in lookup.items():
        left, right = lookup.get(i - 1), lookup.get(i + 1)
        if interior_only and (left is None or right is None):
            continue
        left = 0.0 if left is None else left
        right = 0.0 if right is None else right
        onsite = params.U * psi if i == 0 else 0.0
        out.append(-JK * (left + right) + onsite - energy * psi)
    return np.asarray(out)
