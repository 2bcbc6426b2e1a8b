"""Model parameters, Brillouin-zone arithmetic and single-particle results.

Momenta are held internally as the dimensionless product ``q*d`` in
``[-pi, pi]``, which keeps folding exact for rational multiples of pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HubbardPairError

# |Kd| within this distance of pi is treated as the zone edge.
ZONE_EDGE_ATOL = 1e-12 * math.pi


@dataclass(frozen=True)
class LatticeParams:
    """Physical constants of the two-boson Hubbard chain.

    Parameters
    ----------
    J : float
        Tunnel coupling between adjacent sites, strictly positive.
    U : float
        On-site interaction, any real value.
    d : float
        Lattice constant, strictly positive.
    hbar : float
        Reduced Planck constant, 1 by convention.
    """

    J: float = 1.0
    U: float = 0.0
    d: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("J", "U", "d", "hbar"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise HubbardPairError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.J <= 0:
            raise HubbardPairError("J must be positive")
        if self.d <= 0:
            raise HubbardPairError("d must be positive")
        if self.hbar <= 0:
            raise HubbardPairError("hbar must be positive")

    def with_U(self, U: float) -> "LatticeParams":
        return LatticeParams(J=self.J, U=U, d=self.d, hbar=self.hbar)

    @property
    def zone_half_width(self) -> float:
        return math.pi / self.d


@dataclass(frozen=True)
class QuasiMomentum:
    """A folded quasi-momentum, stored as the dimensionless ``kd``."""

    kd: float
    d: float = 1.0

    @property
    def value(self) -> float:
        """Momentum in inverse-length units."""
        return self.kd / self.d

    @property
    def zone_half_width(self) -> float:
        return math.pi / self.d

    @property
    def at_zone_edge(self) -> bool:
        return math.pi - abs(self.kd) <= ZONE_EDGE_ATOL

    @classmethod
    def from_kd(cls, kd: float, params: LatticeParams) -> "QuasiMomentum":
        """Fold a dimensionless ``kd`` into the zone."""
        if not math.isfinite(kd):
            raise HubbardPairError(f"momentum must be finite, got {kd!r}")
        return cls(math.remainder(kd, 2 * math.pi), params.d)

    def __float__(self):
        return self.value


def fold_to_zone(q, params: LatticeParams) -> QuasiMomentum:
    """Fold a raw momentum ``q`` (inverse-length units) into [-pi/d, pi/d]."""
    if isinstance(q, QuasiMomentum):
        return QuasiMomentum.from_kd(q.kd, params)
    q = float(q)
    if not math.isfinite(q):
        raise HubbardPairError(f"momentum must be finite, got {q!r}")
    return QuasiMomentum.from_kd(q * params.d, params)


def as_momentum(q, params: LatticeParams) -> QuasiMomentum:
    """Accept a QuasiMomentum as is, fold anything else."""
    if isinstance(q, QuasiMomentum):
        return q
    return fold_to_zone(q, params)


def single_particle_energy(q, params: LatticeParams) -> float:
    """Bloch band of one particle, ``-2J cos(qd)``."""
    q = as_momentum(q, params)
    return -2.0 * params.J * math.cos(q.kd)


def single_particle_effective_mass(params: LatticeParams) -> float:
    """``hbar^2 / (2 J d^2)``, the band-bottom effective mass."""
    return params.hbar**2 / (2.0 * params.J * params.d**2)


def collective_hopping(K, params: LatticeParams) -> float:
    """Relative-motion hopping ``J_K = 2J cos(Kd/2)``; exactly zero at the zone edge."""
    K = as_momentum(K, params)
    if K.at_zone_edge:
        return 0.0
    return 2.0 * params.J * math.cos(0.5 * K.kd)


def momentum_grid(n_points: int, params: LatticeParams) -> list[QuasiMomentum]:
    """``n_points`` momenta spanning [-pi/d, pi/d] with both endpoints included.

    The endpoints are set to exactly -pi and pi instead of being folded,
    so that a sweep keeps both zone edges.
    """
    if n_points < 2:
        raise HubbardPairError("grid needs at least 2 points")
    kds = np.linspace(-math.pi, math.pi, n_points)
    return [QuasiMomentum(float(kd), params.d) for kd in kds]
