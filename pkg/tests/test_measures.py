import numpy as np
import pytest

from ryddark.linalg import kron
from ryddark.measures import (
    fidelity,
    log_negativity,
    measure_state,
    negativity,
    population,
    purity,
)
from ryddark.model import ground_entangled_state, initial_mixed_state, target_state


def random_density(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_state(rng, d):
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return psi / np.linalg.norm(psi)


def bell_pair():
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1 / np.sqrt(2)
    return np.outer(psi, psi.conj())


def qutrit_maximal():
    psi = np.zeros(9, dtype=complex)
    for j in range(3):
        psi[3 * j + j] = 1 / np.sqrt(3)
    return np.outer(psi, psi.conj())


class TestFidelity:
    def test_pure_target(self):
        psi = target_state(1.0, 3.85)
        assert fidelity(np.outer(psi, psi.conj()), psi) == pytest.approx(1.0)

    def test_maximally_mixed(self):
        psi = target_state(1.0, 3.85)
        assert fidelity(np.eye(49) / 49, psi) == pytest.approx(1 / 49)

    def test_initial_mixture_contraction(self):
        psi = target_state(1.0, 3.85)
        rho = initial_mixed_state()
        oracle = sum(abs(psi[7 * j + jp]) ** 2 / 9
                     for j in range(3) for jp in range(3))
        assert fidelity(rho, psi) == pytest.approx(oracle, abs=1e-14)

    def test_linearity(self):
        rng = np.random.default_rng(30)
        rho1, rho2 = random_density(rng, 5), random_density(rng, 5)
        psi = random_state(rng, 5)
        p = 0.3
        mix = p * rho1 + (1 - p) * rho2
        expect = p * fidelity(rho1, psi) + (1 - p) * fidelity(rho2, psi)
        assert fidelity(mix, psi) == pytest.approx(expect, abs=1e-12)

    def test_global_phase_invariance(self):
        rng = np.random.default_rng(31)
        rho = random_density(rng, 4)
        psi = random_state(rng, 4)
        assert fidelity(rho, np.exp(1.7j) * psi) == pytest.approx(
            fidelity(rho, psi), abs=1e-13)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fidelity(np.eye(4) / 4, np.ones(3) / np.sqrt(3))

    def test_out_of_range_rejected(self):
        psi = np.array([1.0, 0.0], dtype=complex)
        with pytest.raises(ValueError):
            fidelity(2 * np.outer(psi, psi.conj()), psi)


class TestPurity:
    def test_pure(self):
        rng = np.random.default_rng(32)
        psi = random_state(rng, 6)
        assert purity(np.outer(psi, psi.conj())) == pytest.approx(1.0)

    def test_initial_mixture(self):
        assert purity(initial_mixed_state()) == pytest.approx(1 / 9)

    def test_mixture_against_elementwise_oracle(self):
        rng = np.random.default_rng(33)
        rho = 0.6 * random_density(rng, 5) + 0.4 * random_density(rng, 5)
        # for Hermitian rho: Tr[rho^2] = sum_ij |rho_ij|^2
        assert purity(rho) == pytest.approx(float(np.sum(np.abs(rho) ** 2)),
                                            abs=1e-13)


class TestNegativity:
    def test_product_states(self):
        rng = np.random.default_rng(34)
        for _ in range(5):
            rho = kron(random_density(rng, 2), random_density(rng, 3))
            assert negativity(rho, (2, 3), 0) == pytest.approx(0.0, abs=1e-10)
            assert negativity(rho, (2, 3), 1) == pytest.approx(0.0, abs=1e-10)

    def test_bell_pair(self):
        assert negativity(bell_pair(), (2, 2), 0) == pytest.approx(0.5)

    def test_qutrit_maximal_brute_force(self):
        rho = qutrit_maximal()
        # brute-force oracle: transpose atom-A indices element by element,
        # then sum the absolute eigenvalues
        pt = np.zeros((9, 9), dtype=complex)
        for i in range(3):
            for k in range(3):
                for j in range(3):
                    for l in range(3):
                        pt[3 * j + k, 3 * i + l] = rho[3 * i + k, 3 * j + l]
        tn = np.abs(np.linalg.eigvalsh(pt)).sum()
        assert tn == pytest.approx(3.0, abs=1e-12)
        assert negativity(rho, (3, 3), 0) == pytest.approx((tn - 1) / 2)
        assert negativity(rho, (3, 3), 0) == pytest.approx(1.0)

    def test_log_negativity_values(self):
        assert log_negativity(qutrit_maximal(), (3, 3), 1) == pytest.approx(
            np.log2(3))
        rng = np.random.default_rng(35)
        rho = kron(random_density(rng, 3), random_density(rng, 3))
        assert log_negativity(rho, (3, 3), 1) == pytest.approx(0.0, abs=1e-9)

    def test_identity_between_measures(self):
        rng = np.random.default_rng(36)
        for _ in range(5):
            rho = random_density(rng, 9)
            n = negativity(rho, (3, 3), 1)
            ln = log_negativity(rho, (3, 3), 1)
            assert ln == pytest.approx(np.log2(2 * n + 1), abs=1e-12)

    def test_embedding_invariance(self):
        # a state supported on the 3x3 ground block of the full two-atom
        # space must give the same negativity as its 9-dim restriction
        rng = np.random.default_rng(37)
        small = random_density(rng, 9)
        big = np.zeros((49, 49), dtype=complex)
        for j in range(3):
            for jp in range(3):
                for k in range(3):
                    for kp in range(3):
                        big[7 * j + jp, 7 * k + kp] = small[3 * j + jp, 3 * k + kp]
        assert negativity(big, (7, 7), 1) == pytest.approx(
            negativity(small, (3, 3), 1), abs=1e-10)

    def test_ground_entangled_state(self):
        psi = ground_entangled_state()
        rho = np.outer(psi, psi.conj())
        assert negativity(rho, (7, 7), 1) == pytest.approx(1.0)
        assert log_negativity(rho, (7, 7), 1) == pytest.approx(np.log2(3))

    def test_target_state_negativity(self):
        # the entangled dark state has three equal Schmidt weights for any
        # drive ratio, hence negativity 1 like the bare ground version
        psi = target_state(1.0, 3.85)
        rho = np.outer(psi, psi.conj())
        assert negativity(rho, (7, 7), 1) == pytest.approx(1.0, abs=1e-10)


class TestPopulation:
    def test_orthogonal(self):
        rho = np.diag([1.0, 0.0]).astype(complex)
        assert population(rho, np.array([0.0, 1.0])) == pytest.approx(0.0)

    def test_matching_pure_state(self):
        rng = np.random.default_rng(38)
        psi = random_state(rng, 4)
        assert population(np.outer(psi, psi.conj()), psi) == pytest.approx(1.0)

    def test_half_overlap(self):
        rho = np.zeros((4, 4), dtype=complex)
        rho[1, 1] = 1.0
        dark = np.zeros(4, dtype=complex)
        dark[1], dark[3] = 1 / np.sqrt(2), -1 / np.sqrt(2)
        assert population(rho, dark) == pytest.approx(0.5)


class TestMeasureState:
    def test_report_identity_exact(self):
        rng = np.random.default_rng(39)
        rho = random_density(rng, 9)
        psi = random_state(rng, 9)
        rep = measure_state(rho, psi, dims=(3, 3), split=1)
        assert rep.log_negativity == np.log2(2 * rep.negativity + 1)

    def test_single_system_reports_zero_negativity(self):
        rng = np.random.default_rng(40)
        rho = random_density(rng, 4)
        psi = random_state(rng, 4)
        rep = measure_state(rho, psi, dims=(4,))
        assert rep.negativity == 0.0
        assert rep.log_negativity == 0.0

    def test_populations(self):
        rho = initial_mixed_state()
        psi = ground_entangled_state()
        rep = measure_state(rho, psi, dims=(7, 7),
                            populations={"ground_00": np.eye(49)[0]})
        assert rep.populations["ground_00"] == pytest.approx(1 / 9)
