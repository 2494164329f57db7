import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose

from qutrit_geom import mat3
from qutrit_geom.exceptions import DegenerateEigenvalue, NotAnEigenvalue, NotHermitian, NotPSD, NotUnitTrace
from qutrit_geom.invariants import discriminant, symmetric_polynomials

import oracles


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


finite = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)
complex3x3 = arrays(np.float64, (2, 3, 3), elements=finite).map(lambda a: a[0] + 1j * a[1])


class TestClosedForms:
    def test_identity(self):
        assert mat3.det3(np.eye(3)) == 1
        assert_allclose(mat3.adj3(np.eye(3)), np.eye(3))

    def test_diagonal_det(self):
        assert mat3.det3(np.diag([2.0, 3.0, 5.0])) == 30.0

    def test_dagger_involution(self, rng):
        m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        assert np.array_equal(mat3.dagger(mat3.dagger(m)), m)

    def test_trace_and_norm(self):
        m = np.array([[1, 2j, 0], [0, 3, 0], [1, 0, -1j]])
        assert mat3.trace(m) == 4 - 1j
        assert mat3.frobenius_norm(m) == pytest.approx(math.sqrt(1 + 4 + 9 + 1 + 1))

    def test_against_minors_and_permutations(self, rng):
        for _ in range(50):
            m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            assert_allclose(mat3.adj3(m), oracles.adjugate_by_minors(m), atol=1e-13)
            assert mat3.det3(m) == pytest.approx(oracles.det_by_permutations(m), abs=1e-13)

    def test_batched_matches_single(self, rng):
        m = rng.standard_normal((4, 3, 3)) + 1j * rng.standard_normal((4, 3, 3))
        assert_allclose(mat3.det3(m), [mat3.det3(x) for x in m])
        assert_allclose(mat3.adj3(m), [mat3.adj3(x) for x in m])

    @settings(max_examples=300, deadline=None)
    @given(complex3x3)
    def test_adjugate_identity(self, m):
        norm = mat3.frobenius_norm(m)
        if norm < 1e-6:
            return
        m = m / norm
        assert_allclose(m @ mat3.adj3(m), mat3.det3(m) * np.eye(3), atol=1e-12)

    def test_rejects_bad_shapes_and_nan(self):
        with pytest.raises(ValueError):
            mat3.as_matrix3(np.eye(2))
        bad = np.eye(3)
        bad[0, 0] = np.nan
        with pytest.raises(ValueError):
            mat3.as_matrix3(bad)


class TestEigHermitian:
    def test_diagonal(self):
        assert mat3.eig_hermitian(np.diag([0.2, 0.5, 0.3])) == pytest.approx((0.5, 0.3, 0.2), abs=1e-15)

    def test_scalar(self):
        assert mat3.eig_hermitian(np.eye(3) / 3) == pytest.approx((1 / 3,) * 3, abs=1e-15)

    def test_unitary_invariance(self, rng):
        for _ in range(20):
            u = oracles.random_unitary(rng)
            rho = u @ np.diag([0.6, 0.4, 0.0]) @ u.conj().T
            lam = mat3.eig_hermitian(rho)
            assert lam == pytest.approx((0.6, 0.4, 0.0), abs=1e-12)
            assert lam == pytest.approx(oracles.jacobi_eigvals(rho), abs=1e-12)

    def test_jacobi_oracle_is_sound(self, rng):
        rho = oracles.random_density(rng)
        assert_allclose(oracles.jacobi_eigvals(rho), np.linalg.eigvalsh(rho)[::-1], atol=1e-14)

    def test_agrees_with_jacobi_on_1000_matrices(self, rng):
        worst = 0.0
        for k in range(1000):
            rho = oracles.random_density(rng, rank=1 + k % 3)
            lam = mat3.eig_hermitian(rho)
            worst = max(worst, np.max(np.abs(np.array(lam) - oracles.jacobi_eigvals(rho))))
        assert worst <= 1e-10

    def test_characteristic_coefficients_round_trip(self, rng):
        for _ in range(200):
            rho = oracles.random_density(rng)
            s1, s2, s3 = symmetric_polynomials(mat3.eig_hermitian(rho))
            tr, pair, det = mat3.char_coefficients(rho)
            assert abs(s1 - tr) <= 1e-10
            assert abs(s2 - pair) <= 1e-10
            assert abs(s3 - det) <= 1e-10

    @pytest.mark.parametrize("diag", [
        (1.0, 0.0, 0.0),
        (0.5, 0.5, 0.0),
        (0.4, 0.3, 0.3),
        (1 / 3, 1 / 3, 1 / 3),
        (0.4, 0.4 - 1e-9, 0.2 + 1e-9),
    ])
    def test_rotated_degenerate_spectra(self, rng, diag):
        for _ in range(50):
            u = oracles.random_unitary(rng)
            rho = u @ np.diag(diag) @ u.conj().T
            assert_allclose(mat3.eig_hermitian(rho), oracles.jacobi_eigvals(rho), atol=1e-13)
            assert_allclose(mat3.eig_hermitian(rho), diag, atol=1e-13)

    def test_batched(self, rng):
        rhos = np.array([oracles.random_density(rng) for _ in range(10)])
        lam = mat3.eigvalsh3(rhos)
        assert lam.shape == (10, 3)
        for r, l in zip(rhos, lam):
            assert_allclose(l, oracles.jacobi_eigvals(r), atol=1e-12)

    def test_det_refines_smallest_eigenvalue(self):
        c = np.diag([0.8, 0.6, 1e-9]).astype(complex)
        c /= np.linalg.norm(c)
        rho = c @ c.conj().T
        lam = mat3.eigvalsh3(rho, det=abs(mat3.det3(c)) ** 2)
        assert lam[2] == pytest.approx(abs(c[2, 2]) ** 2, rel=1e-12)

    def test_clamps_tiny_negative(self):
        rho = np.diag([0.6, 0.4 + 5e-11, -5e-11])
        assert mat3.eig_hermitian(rho).l3 == 0.0

    def test_errors(self):
        with pytest.raises(NotHermitian):
            mat3.eig_hermitian(np.array([[0.5, 0.1, 0], [0.2, 0.5, 0], [0, 0, 0]]))
        with pytest.raises(NotUnitTrace):
            mat3.eig_hermitian(np.diag([0.5, 0.5, 0.5]))
        with pytest.raises(NotPSD):
            mat3.eig_hermitian(np.diag([0.7, 0.4, -0.1]))


class TestAdjugateEigenvector:
    def test_diagonal_middle(self):
        rho = np.diag([0.5, 0.3, 0.2])
        a = mat3.adj3(rho - 0.3 * np.eye(3))
        assert_allclose(a[:, 1], [0, -0.02, 0], atol=1e-17)
        v = mat3.adjugate_eigenvector(rho, 0.3)
        assert_allclose(np.abs(v), [0, 1, 0], atol=1e-15)

    def test_diagonal_top(self):
        v = mat3.adjugate_eigenvector(np.diag([0.6, 0.3, 0.1]), 0.6)
        assert_allclose(np.abs(v), [1, 0, 0], atol=1e-15)

    def test_degenerate(self):
        with pytest.raises(DegenerateEigenvalue):
            mat3.adjugate_eigenvector(np.eye(3) / 3, 1 / 3)

    def test_not_an_eigenvalue(self):
        with pytest.raises(NotAnEigenvalue):
            mat3.adjugate_eigenvector(np.diag([0.5, 0.3, 0.2]), 0.4)

    def test_residual_on_random_states(self, rng):
        for _ in range(300):
            rho = oracles.random_density(rng)
            for lam in mat3.eig_hermitian(rho):
                v = mat3.adjugate_eigenvector(rho, lam)
                assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
                assert np.linalg.norm(rho @ v - lam * v) <= 1e-8

    def test_nullspace_fallback_on_degenerate(self, rng):
        u = oracles.random_unitary(rng)
        rho = u @ np.diag([0.4, 0.4, 0.2]) @ u.conj().T
        lam = mat3.eig_hermitian(rho)
        for x in lam:
            v = mat3.eigenvector(rho, x)
            assert np.linalg.norm(rho @ v - x * v) <= 1e-8


def test_discriminant_equals_gap_product(rng):
    for _ in range(1000):
        lam = rng.dirichlet(np.ones(3))
        _, s2, s3 = symmetric_polynomials(lam)
        assert abs(discriminant(s2, s3) - oracles.gap_discriminant(lam)) <= 1e-10
