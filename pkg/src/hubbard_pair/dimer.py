"""Interaction-bound dimer branch and its strong-coupling limit."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import LatticeParams, QuasiMomentum, as_momentum, collective_hopping
from .errors import FlatBandError, ZeroInteractionError
from .scattering import (
    DIMER,
    LOCALIZED,
    UNIT_SUM_OF_SQUARES,
    RelativeWavefunction,
    SiteRange,
    band_edges,
    site_array,
)

ATTRACTIVE = "attractive"
REPULSIVE = "repulsive"

# default sample range keeps the truncated norm deficit below ~e^-72
_TRUNCATION_LOG = 36.0


def _require_interaction(params: LatticeParams):
    if params.U == 0.0:
        raise ZeroInteractionError("no bound state at U = 0")


@dataclass(frozen=True)
class DimerState:
    K: QuasiMomentum
    alpha: Optional[float]
    energy: float
    binding_energy: float
    normalization_C: float
    interaction_sign: str


def _reduced_coupling(JK: float, U: float) -> float:
    """``|U| / (2 J_K)``, the magnitude of the reduced interaction."""
    return abs(U) / (2.0 * JK)


def dimer_alpha(K, params: LatticeParams) -> float:
    """Decay ratio ``alpha_K`` of the bound state ``psi(r_i) = C alpha^|i|``.

    Positive for attraction, negative for repulsion, ``|alpha| < 1``.
    Evaluated as ``1/(|U_K| + sqrt(U_K^2 + 1))``, which equals
    ``sqrt(U_K^2 + 1) - |U_K|`` without the cancellation at large ``|U_K|``.
    """
    _require_interaction(params)
    JK = collective_hopping(K, params)
    if JK == 0.0:
        raise FlatBandError("alpha undefined at |K| = pi/d; the state is localized")
    u = _reduced_coupling(JK, params.U)
    magnitude = 1.0 / (u + math.hypot(u, 1.0))
    return magnitude if params.U < 0 else -magnitude


def normalization_constant(K, params: LatticeParams) -> float:
    """``sqrt|U_K| / (U_K^2 + 1)^(1/4)``; 1 at the zone edge."""
    _require_interaction(params)
    JK = collective_hopping(K, params)
    if JK == 0.0:
        return 1.0
    # C^2 = |U_K| / sqrt(U_K^2 + 1) = 1 / sqrt(1 + (2 J_K / U)^2)
    g = 2.0 * JK / params.U
    return (1.0 + g * g) ** -0.25


def dimer_energy(K, params: LatticeParams) -> float:
    """``sign(U) sqrt(U^2 + 4 J_K^2)``; equals U at the zone edge."""
    _require_interaction(params)
    JK = collective_hopping(K, params)
    return math.copysign(math.hypot(params.U, 2.0 * JK), params.U)


def binding_energy(K, params: LatticeParams) -> float:
    """Dimer energy measured from the nearest scattering-band edge."""
    E = dimer_energy(K, params)
    lo, hi = band_edges(K, params)
    return E - (lo if params.U < 0 else hi)


def dimer_state(K, params: LatticeParams) -> DimerState:
    K = as_momentum(K, params)
    _require_interaction(params)
    alpha = None if collective_hopping(K, params) == 0.0 else dimer_alpha(K, params)
    return DimerState(
        K=K,
        alpha=alpha,
        energy=dimer_energy(K, params),
        binding_energy=binding_energy(K, params),
        normalization_C=normalization_constant(K, params),
        interaction_sign=ATTRACTIVE if params.U < 0 else REPULSIVE,
    )


def default_site_range(K, params: LatticeParams) -> int:
    """Half-width ``ceil(36/|ln alpha|)`` so the truncated norm deficit is negligible."""
    _require_interaction(params)
    if collective_hopping(K, params) == 0.0:
        return 0
    alpha = abs(dimer_alpha(K, params))
    return max(1, math.ceil(_TRUNCATION_LOG / abs(math.log(alpha))))


def dimer_wavefunction(K, params: LatticeParams, i_range: Optional[SiteRange] = None) -> RelativeWavefunction:
    """Normalized bound-state amplitudes ``C alpha^|i|``.

    At |K| = pi/d the state is localized on ``i = 0``. When ``i_range`` is
    omitted the sample range is chosen by :func:`default_site_range`.
    """
    K = as_momentum(K, params)
    _require_interaction(params)
    sites = site_array(default_site_range(K, params) if i_range is None else i_range)
    if collective_hopping(K, params) == 0.0:
        return RelativeWavefunction(LOCALIZED, K, sites, (sites == 0).astype(float), UNIT_SUM_OF_SQUARES)
    alpha = dimer_alpha(K, params)
    C = normalization_constant(K, params)
    amplitudes = C * np.power(alpha, np.abs(sites).astype(float))
    return RelativeWavefunction(DIMER, K, sites, amplitudes, UNIT_SUM_OF_SQUARES)


def dimer_effective_mass(params: LatticeParams) -> float:
    """Band-curvature mass of the dimer at K = 0, positive for U < 0."""
    _require_interaction(params)
    J, d = params.J, params.d
    mass = params.hbar**2 * math.hypot(params.U, 4.0 * J) / (4.0 * d * d * J * J)
    return mass if params.U < 0 else -mass


def dimer_curvature_mass(K, params: LatticeParams, step: float = 1e-3) -> float:
    """Finite-difference ``hbar^2 / E''(K)`` of the dimer dispersion at any K.

    ``step`` is in units of 1/d. Near the zone edge the stencil wraps
    through the zone boundary, which is harmless because the dispersion is
    2 pi/d periodic.
    """
    K = as_momentum(K, params)
    h = step / params.d
    e0 = dimer_energy(K, params)
    ep = dimer_energy(K.value + h, params)
    em = dimer_energy(K.value - h, params)
    return params.hbar**2 * h * h / (ep - 2.0 * e0 + em)


def effective_pair_hopping(params: LatticeParams) -> float:
    """Second-order dimer tunnelling rate ``J2 = -2 J^2 / U``."""
    _require_interaction(params)
    return -2.0 * params.J**2 / params.U


def strong_coupling_energy(K, params: LatticeParams) -> float:
    """``(U - 2 J2) - 2 J2 cos(Kd)``, the |U| >> J expansion of the dimer energy."""
    K = as_momentum(K, params)
    J2 = effective_pair_hopping(params)
    return (params.U - 2.0 * J2) - 2.0 * J2 * math.cos(K.kd)


def strong_coupling_error_bound(params: LatticeParams) -> float:
    """``32 J^4 / |U|^3``, the Taylor-remainder bound on the strong-coupling error."""
    _require_interaction(params)
    return 32.0 * params.J**4 / abs(params.U) ** 3
