import itertools
import math

import numpy as np
import pytest

from hubbard_pair.core import collective_hopping
from hubbard_pair.dimer import dimer_alpha, dimer_energy
from hubbard_pair.errors import HubbardPairError, MemoryBudgetError, NonSymmetricError
from hubbard_pair.oracle import (
    Tolerances,
    build_full_hamiltonian,
    build_relative_hamiltonian,
    classify_spectrum,
    compare_with_analytic,
    diagonalize_symmetric,
    dos_histogram,
    fix_sign,
    odd_part_norm,
    relative_bound_state,
    ring_bound_energies,
    ring_momenta,
    translation_block,
)

from conftest import PI, params


class TestRelativeHamiltonian:
    def test_structure(self):
        H = build_relative_hamiltonian(0.6, params(U=-2.0), 3)
        A = H.dense()
        assert A.shape == (7, 7)
        assert np.array_equal(A, A.T)
        assert A[3, 3] == -2.0 and np.count_nonzero(np.diag(A)) == 1
        assert np.allclose(np.diag(A, 1), -collective_hopping(0.6, params()))

    def test_three_site_noninteracting(self):
        w = diagonalize_symmetric(build_relative_hamiltonian(0.4, params(), 1), eigvals_only=True)
        JK = collective_hopping(0.4, params())
        np.testing.assert_allclose(w, [-math.sqrt(2) * JK, 0, math.sqrt(2) * JK], atol=1e-14)

    @pytest.mark.parametrize("U", [-5.0, 0.7, 3.0])
    def test_three_site_general(self, U):
        JK = 2.0
        w = diagonalize_symmetric(build_relative_hamiltonian(0, params(U=U), 1), eigvals_only=True)
        r = math.sqrt(U * U + 8 * JK * JK)
        np.testing.assert_allclose(w, sorted([0, (U - r) / 2, (U + r) / 2]), atol=1e-13)

    def test_three_site_against_characteristic_polynomial(self):
        A = build_relative_hamiltonian(0, params(U=-5.0), 1).dense()
        w = diagonalize_symmetric(A, eigvals_only=True)
        expected = [(-5 - math.sqrt(57)) / 2, 0.0, (-5 + math.sqrt(57)) / 2]
        np.testing.assert_allclose(w, expected, atol=1e-13)
        assert np.max(np.abs(np.polyval(np.poly(A), w))) < 1e-11

    def test_gershgorin(self):
        for U, K in itertools.product((-7.0, 0.0, 2.5), (0.0, 1.0, PI)):
            H = build_relative_hamiltonian(K, params(U=U), 30)
            lo, hi = H.gershgorin_bounds()
            JK = collective_hopping(K, params())
            assert lo >= -2 * JK - abs(U) - 1e-15 and hi <= 2 * JK + abs(U) + 1e-15
            w = diagonalize_symmetric(H, eigvals_only=True)
            assert w[0] >= lo - 1e-12 and w[-1] <= hi + 1e-12

    def test_memory_budget(self):
        with pytest.raises(MemoryBudgetError):
            build_relative_hamiltonian(0, params(), 1000, memory_budget=1000)
        with pytest.raises(HubbardPairError):
            build_relative_hamiltonian(0, params(), 0)

    def test_lowest_eigenvalue_N200(self):
        value, _ = relative_bound_state(0, params(U=-5.0), 200)
        assert value == pytest.approx(-6.403124, abs=1e-6)
        assert abs(value + math.sqrt(41)) < 1e-8


class TestDiagonalize:
    def test_scalar(self):
        w, V = diagonalize_symmetric(np.array([[2.5]]))
        assert w.tolist() == [2.5] and V.tolist() == [[1.0]]

    def test_two_by_two(self):
        w = diagonalize_symmetric(np.array([[0.0, -1.3], [-1.3, 0.0]]), eigvals_only=True)
        np.testing.assert_allclose(w, [-1.3, 1.3])

    def test_rejects_non_symmetric(self):
        with pytest.raises(NonSymmetricError):
            diagonalize_symmetric(np.array([[0.0, 1.0], [0.0, 0.0]]))
        with pytest.raises(NonSymmetricError):
            diagonalize_symmetric(np.zeros((2, 3)))

    @pytest.mark.parametrize("source", ["dense", "tridiagonal"])
    def test_contract(self, source):
        H = build_relative_hamiltonian(0.3, params(U=-1.7), 40)
        w, V = diagonalize_symmetric(H.dense() if source == "dense" else H, check=True)
        A = H.dense()
        assert np.all(np.diff(w) >= 0)
        norm = np.linalg.norm(A, 2)
        assert np.max(np.linalg.norm(A @ V - V * w, axis=0)) < 1e-10 * norm
        assert np.max(np.abs(V.T @ V - np.eye(len(w)))) < 1e-10

    def test_select(self):
        H = build_relative_hamiltonian(0.3, params(U=2.0), 20)
        full = diagonalize_symmetric(H, eigvals_only=True)
        w, V = diagonalize_symmetric(H, select=(40, 40))
        assert w[0] == pytest.approx(full[-1], abs=1e-13) and V.shape == (41, 1)


class TestClassify:
    def test_no_bound_state_without_interaction(self):
        p = params()
        w = diagonalize_symmetric(build_relative_hamiltonian(0, p, 100), eigvals_only=True)
        c = classify_spectrum(w, 0, p)
        assert c.bound is None and len(c.band) == 201

    def test_attractive(self):
        p = params(U=-5.0)
        w = diagonalize_symmetric(build_relative_hamiltonian(0, p, 200), eigvals_only=True)
        c = classify_spectrum(w, 0, p)
        assert c.bound == pytest.approx(-6.403124, abs=1e-6) and c.bound_index == 0

    def test_shallow_repulsive_needs_large_chain(self):
        p = params(U=0.1)
        alpha = abs(dimer_alpha(0, p))
        assert 36 / abs(math.log(alpha)) == pytest.approx(1440, rel=0.01)
        value, vec = relative_bound_state(0, p, 1500)
        assert value == pytest.approx(math.sqrt(0.01 + 16), abs=1e-10)
        assert value > 4.0

    def test_rejects_two_outliers(self):
        with pytest.raises(HubbardPairError):
            classify_spectrum([-10.0, 0.0, 10.0], 0, params(U=1.0))


class TestFullHamiltonian:
    def test_dimension(self):
        assert build_full_hamiltonian(params(), 4).dimension == 10
        with pytest.raises(HubbardPairError):
            build_full_hamiltonian(params(), 3)
        with pytest.raises(MemoryBudgetError):
            build_full_hamiltonian(params(), 30, memory_budget=10_000)

    def test_matrix_elements(self):
        p = params(J=1.0, U=3.0)
        full = build_full_hamiltonian(p, 6)
        idx = full.index()
        H = full.matrix
        assert np.array_equal(H, H.T)
        assert H[idx[(2, 2)], idx[(2, 2)]] == 3.0
        assert H[idx[(2, 3)], idx[(2, 3)]] == 0.0
        assert H[idx[(2, 2)], idx[(2, 3)]] == pytest.approx(-math.sqrt(2))
        assert H[idx[(2, 2)], idx[(1, 2)]] == pytest.approx(-math.sqrt(2))
        assert H[idx[(1, 4)], idx[(2, 4)]] == -1.0
        assert H[idx[(0, 5)], idx[(5, 5)]] == pytest.approx(-math.sqrt(2))  # ring closure
        assert H[idx[(1, 4)], idx[(2, 2)]] == 0.0

    def test_translation_invariant(self):
        full = build_full_hamiltonian(params(U=-2.0), 8)
        T = full.translation_matrix()
        assert np.allclose(T @ full.matrix, full.matrix @ T, atol=0)

    def test_free_spectrum_enumeration(self):
        M = 12
        full = build_full_hamiltonian(params(), M)
        q = 2 * PI * np.arange(M) / M
        expected = sorted(-2 * math.cos(q[a]) - 2 * math.cos(q[b]) for a in range(M) for b in range(a, M))
        w = diagonalize_symmetric(full.matrix, eigvals_only=True)
        np.testing.assert_allclose(w, expected, atol=1e-10)

    def test_blocks_reassemble_full_spectrum(self):
        M = 10
        full = build_full_hamiltonian(params(U=1.3), M)
        blocks = np.concatenate([np.linalg.eigvalsh(translation_block(full, kd)) for kd in ring_momenta(M)])
        np.testing.assert_allclose(np.sort(blocks), np.linalg.eigvalsh(full.matrix), atol=1e-11)

    def test_ring_bound_energies_converge(self):
        p = params(U=-5.0)
        errs = {}
        for M in (24, 48):
            errs[M] = []
            for kd, E in ring_bound_energies(p, M):
                alpha = 0.0 if collective_hopping(kd, p) == 0 else abs(dimer_alpha(kd, p))
                err = abs(E - dimer_energy(kd, p))
                errs[M].append(err)
                assert err <= max(2 * alpha ** (M / 2), 1e-12 * 5)
        assert max(errs[48]) < max(errs[24])


class TestInvariants:
    @pytest.mark.parametrize("U, K", [(-3.0, 0.2), (4.0, 1.9), (0.5, 0.0)])
    def test_staggering_duality(self, U, K):
        w = diagonalize_symmetric(build_relative_hamiltonian(K, params(U=U), 50), eigvals_only=True)
        w_flip = diagonalize_symmetric(build_relative_hamiltonian(K, params(U=-U), 50), eigvals_only=True)
        np.testing.assert_allclose(w, np.sort(-w_flip), atol=1e-12)

    @pytest.mark.parametrize("U", [-5.0, 2.0, 20.0])
    def test_bound_state_is_even(self, U):
        _, vec = relative_bound_state(0.5, params(U=U), 100)
        assert odd_part_norm(vec) < 1e-10

    def test_convergence_in_N(self):
        p = params(U=-0.5)
        exact = dimer_energy(0, p)
        errs = [abs(relative_bound_state(0, p, N)[0] - exact) for N in (25, 50, 100, 200, 400)]
        floor = 1e-14
        assert all(b <= a or b < floor for a, b in zip(errs, errs[1:]))
        assert errs[0] > 1e-6 and errs[-1] < 1e-12

    def test_fix_sign(self):
        assert fix_sign(np.array([0.1, -0.5, 0.2]), 1).tolist() == [-0.1, 0.5, -0.2]
        assert fix_sign(np.array([-0.3, 0.0, 0.4]), 1).tolist() == [0.3, -0.0, -0.4]


class TestReports:
    def test_attractive_point_passes(self):
        r = compare_with_analytic(params(U=-5.0), K=0, N=200)
        assert r.passed
        assert r.eigenvalue_discrepancies[0].abs_error < 1e-8
        assert r.wavefunction_overlaps[0].overlap >= 1 - 1e-8
        assert len(r.band_histogram) == 10

    def test_noninteracting_point(self):
        r = compare_with_analytic(params(), K=0.7)
        assert r.passed and "no bound state (both paths)" in r.notes
        assert not r.eigenvalue_discrepancies

    def test_repulsive_half_zone(self):
        r = compare_with_analytic(params(U=5.0), K=PI / 2, N=200)
        assert r.passed
        d = r.eigenvalue_discrepancies[0]
        assert d.analytic == pytest.approx(math.sqrt(33)) and d.numeric == pytest.approx(math.sqrt(33))

    def test_tight_tolerance_fails(self):
        r = compare_with_analytic(params(U=-5.0), K=0.3, tolerances=Tolerances(dos_bin=1e-6))
        assert not r.passed
        assert r.failures()[0].startswith("DOS bin")

    def test_ring_report(self):
        r = compare_with_analytic(params(U=-5.0), M=24)
        assert r.passed and len(r.eigenvalue_discrepancies) == 24
        assert compare_with_analytic(params(), M=12).passed

    def test_report_dict(self):
        doc = compare_with_analytic(params(U=2.0), K=0.0).to_dict()
        assert doc["pass"] is True
        assert set(doc) >= {"parameter_point", "eigenvalue_discrepancies", "wavefunction_overlaps",
                            "band_histogram", "pass"}
        for row in doc["wavefunction_overlaps"]:
            assert 0 <= row["overlap"] <= 1

    def test_requires_one_of_K_or_M(self):
        with pytest.raises(HubbardPairError):
            compare_with_analytic(params(), K=0, M=8)

    def test_dos_histogram_noninteracting(self):
        bins = dos_histogram(0, params(), N=400)
        assert len(bins) == 10 and all(b.rel_error < 0.05 for b in bins)
