"""Exact-diagonalization oracle for the two-boson problem.

Two independent constructions are provided:

* the relative-coordinate chain at fixed center-of-mass momentum K, open
  boundaries, sites ``i = -N..N``;
* the full two-boson ring of M sites in the symmetrized occupation basis,
  block-diagonalized by projecting onto eigenspaces of the ring shift.

Neither construction uses the exponential bound-state ansatz, so their
eigenpairs can be held against the closed forms in :mod:`.dimer` and
:mod:`.scattering`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np
import scipy.linalg
from scipy import integrate

from .core import LatticeParams, QuasiMomentum, as_momentum, collective_hopping
from .dimer import dimer_alpha, dimer_energy, dimer_wavefunction
from .errors import (
    ConvergenceError,
    HubbardPairError,
    MemoryBudgetError,
    NonSymmetricError,
)
from .scattering import density_of_states

DEFAULT_MEMORY_BUDGET = 512 * 2**20  # bytes of dense float64 storage


def _check_budget(dim: int, budget: int, what: str):
    need = dim * dim * 8
    if need > budget:
        raise MemoryBudgetError(
            f"{what} of dimension {dim} needs {need} bytes, budget is {budget}"
        )


@dataclass(frozen=True)
class RelativeHamiltonian:
    """Tridiagonal relative-motion Hamiltonian on sites ``-N..N``.

    Only the two bands are stored; :meth:`dense` materializes the matrix.
    """

    K: QuasiMomentum
    N: int
    diagonal: np.ndarray
    off_diagonal: np.ndarray

    @property
    def dimension(self) -> int:
        return 2 * self.N + 1

    @property
    def sites(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    @property
    def center(self) -> int:
        return self.N

    def dense(self) -> np.ndarray:
        H = np.diag(self.diagonal)
        idx = np.arange(self.dimension - 1)
        H[idx, idx + 1] = self.off_diagonal
        H[idx + 1, idx] = self.off_diagonal
        return H

    def gershgorin_bounds(self) -> tuple[float, float]:
        radius = np.zeros(self.dimension)
        radius[:-1] += np.abs(self.off_diagonal)
        radius[1:] += np.abs(self.off_diagonal)
        return float(np.min(self.diagonal - radius)), float(np.max(self.diagonal + radius))


def build_relative_hamiltonian(K, params: LatticeParams, N: int,
                               memory_budget: int = DEFAULT_MEMORY_BUDGET) -> RelativeHamiltonian:
    if N < 1:
        raise HubbardPairError("N must be at least 1")
    K = as_momentum(K, params)
    _check_budget(2 * N + 1, memory_budget, "relative Hamiltonian")
    diagonal = np.zeros(2 * N + 1)
    diagonal[N] = params.U
    off_diagonal = np.full(2 * N, -collective_hopping(K, params))
    return RelativeHamiltonian(K, N, diagonal, off_diagonal)


@dataclass(frozen=True)
class FullHamiltonian:
    """Two bosons on a periodic ring of M sites.

    ``basis[n] = (a, b)`` with ``a <= b`` labels ``|2_a>`` when ``a == b`` and
    ``|1_a, 1_b>`` otherwise.
    """

    M: int
    basis: tuple
    matrix: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def index(self) -> dict:
        return {state: n for n, state in enumerate(self.basis)}

    def shift(self, state, s: int = 1):
        a, b = state
        a, b = (a + s) % self.M, (b + s) % self.M
        return (a, b) if a <= b else (b, a)

    def translation_matrix(self) -> np.ndarray:
        """Permutation matrix of the ring shift ``j -> j + 1``."""
        T = np.zeros((self.dimension, self.dimension))
        index = self.index()
        for n, state in enumerate(self.basis):
            T[index[self.shift(state)], n] = 1.0
        return T


def two_boson_basis(M: int) -> tuple:
    return tuple((a, b) for a in range(M) for b in range(a, M))


def build_full_hamiltonian(params: LatticeParams, M: int,
                           memory_budget: int = DEFAULT_MEMORY_BUDGET) -> FullHamiltonian:
    """Bose-Hubbard Hamiltonian for two particles on an M-site ring.

    Matrix elements come from ``b_t^dagger b_s`` acting on occupation
    vectors, so the sqrt(2) factors between doubly and singly occupied
    configurations appear on their own.
    """
    if M < 4:
        raise HubbardPairError("M must be at least 4")
    basis = two_boson_basis(M)
    dim = len(basis)
    _check_budget(dim, memory_budget, "full Hamiltonian")
    index = {state: n for n, state in enumerate(basis)}
    H = np.zeros((dim, dim))
    for col, (a, b) in enumerate(basis):
        occ = {a: 2} if a == b else {a: 1, b: 1}
        if a == b:
            H[col, col] = params.U
        for s, n_s in occ.items():
            for t in ((s + 1) % M, (s - 1) % M):
                n_t = occ.get(t, 0)
                amp = -params.J * math.sqrt(n_s) * math.sqrt(n_t + 1)
                new = dict(occ)
                new[s] -= 1
                new[t] = n_t + 1
                sites = sorted(j for j, n in new.items() for _ in range(n))
                H[index[tuple(sites)], col] += amp
    return FullHamiltonian(M, basis, H)


def ring_momenta(M: int) -> list[float]:
    """Allowed total momenta ``2 pi n / M`` (times d) folded into (-pi, pi]."""
    return [2 * math.pi * n / M for n in range(-((M - 1) // 2), M // 2 + 1)]


def translation_block(full: FullHamiltonian, kd: float) -> np.ndarray:
    """Hamiltonian restricted to the ring-shift eigenspace with eigenvalue ``exp(-i kd)``.

    Basis vectors are ``p^-1/2 sum_s exp(-i kd s) T^s |r>`` over orbit
    representatives ``r`` of period ``p``; orbits incompatible with ``kd``
    drop out.
    """
    index = full.index()
    seen = set()
    columns = []
    for state in full.basis:
        if state in seen:
            continue
        orbit = [state]
        nxt = full.shift(state)
        while nxt != state:
            orbit.append(nxt)
            nxt = full.shift(nxt)
        seen.update(orbit)
        p = len(orbit)
        if abs(np.exp(1j * kd * p) - 1.0) > 1e-9:
            continue
        v = np.zeros(full.dimension, dtype=complex)
        for s, member in enumerate(orbit):
            v[index[member]] = np.exp(-1j * kd * s) / math.sqrt(p)
        columns.append(v)
    if not columns:
        return np.zeros((0, 0), dtype=complex)
    V = np.column_stack(columns)
    block = V.conj().T @ full.matrix @ V
    return 0.5 * (block + block.conj().T)


def diagonalize_symmetric(matrix, *, eigvals_only: bool = False,
                          select: Optional[tuple[int, int]] = None, check: bool = False):
    """Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.

    ``matrix`` is a square ndarray or a :class:`RelativeHamiltonian`, the
    latter routed to LAPACK's tridiagonal solver. ``select`` restricts the
    output to the inclusive index range ``(lo, hi)``. With ``check`` the
    residual and orthonormality contracts are verified on the way out.

    Returns the eigenvalue array, or ``(eigenvalues, eigenvectors)`` with
    eigenvectors as columns.
    """
    try:
        if isinstance(matrix, RelativeHamiltonian):
            if select is not None:
                kwargs = {"select": "i", "select_range": select}
            else:
                # full spectrum without vectors: the root-free QL/QR iteration is fastest
                kwargs = {"lapack_driver": "sterf"} if eigvals_only else {}
            out = scipy.linalg.eigh_tridiagonal(
                matrix.diagonal, matrix.off_diagonal, eigvals_only=eigvals_only, **kwargs)
            A = matrix.dense() if check else None
        else:
            A = np.asarray(matrix)
            if A.ndim != 2 or A.shape[0] != A.shape[1]:
                raise NonSymmetricError(f"expected a square matrix, got shape {A.shape}")
            if np.iscomplexobj(A):
                raise NonSymmetricError("expected a real matrix")
            scale = np.max(np.abs(A)) if A.size else 0.0
            if np.max(np.abs(A - A.T), initial=0.0) > 1e-12 * scale:
                raise NonSymmetricError("matrix is not symmetric")
            out = scipy.linalg.eigh(A, eigvals_only=eigvals_only, subset_by_index=select)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise ConvergenceError(str(exc)) from exc
    if check and not eigvals_only:
        _check_eigenpairs(A, *out)
    return out


def _check_eigenpairs(A, w, V, tol=1e-10):
    norm = max(np.linalg.norm(A, 2), np.finfo(float).tiny)
    residual = np.linalg.norm(A @ V - V * w, axis=0)
    if np.any(residual >= tol * norm):
        raise ConvergenceError(f"eigenpair residual {residual.max():.3e} exceeds {tol}*||H||")
    gram = V.T @ V
    if np.max(np.abs(gram - np.eye(gram.shape[0]))) >= tol:
        raise ConvergenceError("eigenvectors are not orthonormal")


def fix_sign(vector: np.ndarray, center: int) -> np.ndarray:
    """Make the amplitude at ``center`` (or the first nonzero one) positive."""
    v = np.asarray(vector)
    pivot = v[center]
    if abs(pivot) < 1e-14 * np.max(np.abs(v)):
        pivot = v[np.flatnonzero(np.abs(v) > 1e-14 * np.max(np.abs(v)))[0]]
    return -v if pivot < 0 else v


@dataclass(frozen=True)
class SpectrumClassification:
    band: np.ndarray
    bound: Optional[float]
    bound_index: Optional[int]


def classify_spectrum(eigenvalues, K, params: LatticeParams, eps: float = 1e-9) -> SpectrumClassification:
    """Split a relative-chain spectrum into band states and at most one bound state.

    An eigenvalue is a bound candidate when it lies outside
    ``[-2 J_K - eps*J, 2 J_K + eps*J]``.
    """
    w = np.asarray(eigenvalues, dtype=float)
    JK = collective_hopping(K, params)
    margin = 2.0 * JK + eps * params.J
    outside = np.flatnonzero(np.abs(w) > margin)
    if outside.size > 1:
        raise HubbardPairError(f"{outside.size} eigenvalues outside the band; expected at most one")
    if outside.size == 0:
        return SpectrumClassification(w, None, None)
    n = int(outside[0])
    return SpectrumClassification(np.delete(w, n), float(w[n]), n)


@dataclass(frozen=True)
class Tolerances:
    """Pass thresholds; energies are in units of J."""

    energy: float = 1e-8
    overlap: float = 1e-8
    dos_bin: float = 0.05
    parity: float = 1e-10
    ring_factor: float = 2.0
    # round-off floor for the ring check, relative to max(|U|, J)
    float_floor: float = 1e-12


@dataclass
class Discrepancy:
    label: str
    analytic: Optional[float]
    numeric: Optional[float]
    abs_error: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return bool(self.abs_error <= self.tolerance)


@dataclass
class Overlap:
    label: str
    overlap: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return bool(self.overlap >= 1.0 - self.tolerance)


@dataclass
class HistogramBin:
    lo: float
    hi: float
    count: int
    predicted: float
    rel_error: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return bool(self.rel_error <= self.tolerance)


@dataclass
class OracleReport:
    parameter_point: dict
    eigenvalue_discrepancies: list = field(default_factory=list)
    wavefunction_overlaps: list = field(default_factory=list)
    band_histogram: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (all(x.ok for x in self.eigenvalue_discrepancies)
                and all(x.ok for x in self.wavefunction_overlaps)
                and all(x.ok for x in self.band_histogram))

    def failures(self) -> list[str]:
        out = [f"{x.label}: |{x.analytic} - {x.numeric}| = {x.abs_error:.3e} > {x.tolerance:.1e}"
               for x in self.eigenvalue_discrepancies if not x.ok]
        out += [f"{x.label}: overlap {x.overlap!r} < 1 - {x.tolerance:.1e}"
                for x in self.wavefunction_overlaps if not x.ok]
        out += [f"DOS bin [{x.lo:.4g}, {x.hi:.4g}]: rel. error {x.rel_error:.3e} > {x.tolerance}"
                for x in self.band_histogram if not x.ok]
        return out

    def to_dict(self) -> dict:
        """Plain-JSON form; non-finite errors (one path missing a bound state) become null."""
        def row(x):
            out = {k: (v if not isinstance(v, float) or math.isfinite(v) else None)
                   for k, v in asdict(x).items()}
            out["ok"] = x.ok
            return out

        return {
            "parameter_point": dict(self.parameter_point),
            "eigenvalue_discrepancies": [row(x) for x in self.eigenvalue_discrepancies],
            "wavefunction_overlaps": [row(x) for x in self.wavefunction_overlaps],
            "band_histogram": [row(x) for x in self.band_histogram],
            "notes": list(self.notes),
            "pass": self.passed,
        }


def dos_histogram(K, params: LatticeParams, N: int = 400, bins: int = 10,
                  interior_fraction: float = 0.9, tolerance: float = 0.05) -> list[HistogramBin]:
    """Compare eigenvalue counts of the open chain with the integrated density of states.

    The chain of ``2N+1`` sites between hard walls at ``+-(N+1)`` holds
    standing waves, which corresponds to a quantization length
    ``L = 2 (2N + 2) d``. Bins tile ``interior_fraction`` of the band.
    """
    K = as_momentum(K, params)
    JK = collective_hopping(K, params)
    H = build_relative_hamiltonian(K, params, N)
    w = classify_spectrum(diagonalize_symmetric(H, eigvals_only=True), K, params).band
    half = interior_fraction * 2.0 * JK
    edges = np.linspace(-half, half, bins + 1)
    counts, _ = np.histogram(w, edges)
    L = 2.0 * (2 * N + 2) * params.d
    out = []
    for lo, hi, count in zip(edges[:-1], edges[1:], counts):
        predicted, _ = integrate.quad(density_of_states, lo, hi, args=(K, L, params))
        out.append(HistogramBin(float(lo), float(hi), int(count), predicted,
                                abs(count - predicted) / predicted, tolerance))
    return out


def relative_bound_state(K, params: LatticeParams, N: int, eps: float = 1e-9):
    """Bound eigenpair of the relative chain, or ``(None, None)``.

    Only the two lowest and two highest eigenvalues are computed; any bound
    state sits at one end of the spectrum. The eigenvector is sign-fixed to
    be positive at ``i = 0``.
    """
    H = build_relative_hamiltonian(K, params, N)
    n = H.dimension
    if n < 4:
        w = diagonalize_symmetric(H, eigvals_only=True)
        index = np.arange(n)
    else:
        lo = diagonalize_symmetric(H, eigvals_only=True, select=(0, 1))
        hi = diagonalize_symmetric(H, eigvals_only=True, select=(n - 2, n - 1))
        w = np.concatenate([lo, hi])
        index = np.array([0, 1, n - 2, n - 1])
    found = classify_spectrum(w, K, params, eps)
    if found.bound is None:
        return None, None
    m = int(index[found.bound_index])
    value, vec = diagonalize_symmetric(H, select=(m, m))
    return float(value[0]), fix_sign(vec[:, 0], H.center)


def odd_part_norm(vector: np.ndarray) -> float:
    """Norm of the part of a chain vector that is odd under ``i -> -i``."""
    v = np.asarray(vector)
    return float(np.linalg.norm(0.5 * (v - v[::-1])))


def numeric_phase_shift(K, params: LatticeParams, N: int, target_kd: float) -> tuple[float, float]:
    """Relative momentum and phase shift read off an even open-chain eigenstate.

    Picks the even band eigenstate whose energy is closest to
    ``-2 J_K cos(target_kd)``, infers ``kd`` from its energy and fits
    ``A cos(kd i + delta)`` on ``i = 0..N``. Returns ``(kd, delta)`` with
    ``delta`` reduced to (-pi/2, pi/2].
    """
    K = as_momentum(K, params)
    JK = collective_hopping(K, params)
    H = build_relative_hamiltonian(K, params, N)
    w, V = diagonalize_symmetric(H)
    target = -2.0 * JK * math.cos(target_kd)
    order = np.argsort(np.abs(w - target))
    for n in order:
        if abs(w[n]) < 2.0 * JK and odd_part_norm(V[:, n]) < 1e-8:
            break
    else:
        raise HubbardPairError("no even band eigenstate found")
    kd = math.acos(-w[n] / (2.0 * JK))
    i = np.arange(0, N + 1)
    psi = V[N:, n]
    design = np.column_stack([np.cos(kd * i), np.sin(kd * i)])
    (a, b), *_ = np.linalg.lstsq(design, psi, rcond=None)
    # a cos + b sin = A cos(kd i + delta) with A cos(delta) = a, A sin(delta) = -b
    delta = math.atan2(-b, a)
    if delta > math.pi / 2:
        delta -= math.pi
    elif delta <= -math.pi / 2:
        delta += math.pi
    return kd, delta


def _compare_k_point(params, K, N, dos_N, tol, report):
    J = params.J
    numeric, vec = relative_bound_state(K, params, N)
    if params.U == 0.0:
        if numeric is None:
            report.notes.append("no bound state (both paths)")
        else:
            report.eigenvalue_discrepancies.append(
                Discrepancy("bound energy", None, numeric, math.inf, tol.energy * J))
    else:
        analytic = dimer_energy(K, params)
        if numeric is None:
            report.eigenvalue_discrepancies.append(
                Discrepancy("bound energy", analytic, None, math.inf, tol.energy * J))
        else:
            report.eigenvalue_discrepancies.append(
                Discrepancy("bound energy", analytic, numeric, abs(analytic - numeric), tol.energy * J))
            psi = dimer_wavefunction(K, params, N).amplitudes
            report.wavefunction_overlaps.append(
                Overlap("bound wavefunction", min(1.0, abs(float(psi @ vec))), tol.overlap))
            report.eigenvalue_discrepancies.append(
                Discrepancy("bound odd-part norm", 0.0, odd_part_norm(vec), odd_part_norm(vec), tol.parity))
    if collective_hopping(K, params) > 0.0:
        report.band_histogram.extend(dos_histogram(K, params, dos_N, tolerance=tol.dos_bin))
    else:
        report.notes.append("flat band at |K| = pi/d: DOS check skipped")


def _compare_ring(params, M, tol, report):
    full = build_full_hamiltonian(params, M)
    floor = tol.float_floor * max(abs(params.U), params.J)
    bound_seen = False
    for kd in ring_momenta(M):
        K = QuasiMomentum.from_kd(kd, params)
        block = translation_block(full, kd)
        w = np.linalg.eigvalsh(block)
        found = classify_spectrum(w, K, params)
        if params.U == 0.0:
            if found.bound is not None:
                report.eigenvalue_discrepancies.append(
                    Discrepancy(f"ring bound energy K={kd:.6f}", None, found.bound, math.inf, floor))
            continue
        analytic = dimer_energy(K, params)
        alpha = 0.0 if collective_hopping(K, params) == 0.0 else abs(dimer_alpha(K, params))
        allowed = max(tol.ring_factor * alpha ** (M / 2) * params.J, floor)
        if found.bound is None:
            report.eigenvalue_discrepancies.append(
                Discrepancy(f"ring bound energy K={kd:.6f}", analytic, None, math.inf, allowed))
            continue
        bound_seen = True
        report.eigenvalue_discrepancies.append(
            Discrepancy(f"ring bound energy K={kd:.6f}", analytic, found.bound,
                        abs(found.bound - analytic), allowed))
    if not bound_seen and params.U == 0.0:
        report.notes.append("no bound state (both paths)")


def compare_with_analytic(params: LatticeParams, *, K=None, M: Optional[int] = None, N: int = 200,
                          dos_N: int = 400, tolerances: Tolerances = Tolerances()) -> OracleReport:
    """Run the oracle at one parameter point and compare with the closed forms.

    Pass exactly one of ``K`` (relative chain of half-width ``N`` plus a DOS
    histogram on a chain of half-width ``dos_N``) or ``M`` (full ring,
    every allowed total momentum).
    """
    if (K is None) == (M is None):
        raise HubbardPairError("pass exactly one of K or M")
    point = {"J": params.J, "U": params.U, "d": params.d}
    if K is not None:
        K = as_momentum(K, params)
        point.update(K=K.value, N=N)
        report = OracleReport(point)
        _compare_k_point(params, K, N, dos_N, tolerances, report)
    else:
        point.update(M=M)
        report = OracleReport(point)
        _compare_ring(params, M, tolerances, report)
    return report


def ring_bound_energies(params: LatticeParams, M: int) -> list[tuple[float, Optional[float]]]:
    """``(kd, bound energy or None)`` for every translation block of the M-site ring."""
    full = build_full_hamiltonian(params, M)
    out = []
    for kd in ring_momenta(M):
        K = QuasiMomentum.from_kd(kd, params)
        w = np.linalg.eigvalsh(translation_block(full, kd))
        out.append((kd, classify_spectrum(w, K, params).bound))
    return out
