import pytest
import sys
import os

import numpy as np
import scipy.linalg as la

# Add the project root to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from bose_core import linalg
from bose_core.exceptions import (
    DimensionMismatch,
    NotHermitian,
    NotPositiveSemidefinite,
    SpectralDomainError,
)
from bose_core.models import HermitianMatrix
from bose_core.utils import random_hermitian, random_unitary, seed_stream


class TestAsHermitian:
    """Ingestion and symmetrization"""

    def test_exact_hermitian_passes_unchanged(self):
        h = linalg.as_hermitian([[1, 1j], [-1j, 2]])
        assert isinstance(h, HermitianMatrix)
        assert h.dim == 2
        assert h.residual == 0.0
        np.testing.assert_allclose(h.entries, [[1, 1j], [-1j, 2]])

    def test_small_asymmetry_is_averaged(self):
        a = np.array([[1.0, 2.0 + 1e-14], [2.0, 3.0]])
        h = linalg.as_hermitian(a)
        assert h.residual == pytest.approx(1e-14, rel=1e-3)
        assert h.entries[0, 1] == h.entries[1, 0].conjugate()

    def test_large_asymmetry_is_rejected(self):
        with pytest.raises(NotHermitian) as excinfo:
            linalg.as_hermitian([[1.0, 2.0], [0.0, 1.0]])
        assert excinfo.value.residual == pytest.approx(2.0)

    def test_non_square_is_rejected(self):
        with pytest.raises(DimensionMismatch):
            linalg.as_hermitian(np.ones((2, 3)))

    def test_non_finite_is_rejected(self):
        with pytest.raises(ValueError):
            linalg.as_hermitian([[np.nan, 0.0], [0.0, 1.0]])

    def test_existing_matrix_is_returned(self):
        h = linalg.as_hermitian(np.eye(2))
        assert linalg.as_hermitian(h) is h

    def test_entries_are_read_only(self):
        h = linalg.as_hermitian(np.eye(2))
        with pytest.raises(ValueError):
            h.entries[0, 0] = 5.0


class TestEigendecompose:
    """Eigendecomposition and reconstruction"""

    def test_reconstruction_random_d6(self):
        a = random_hermitian(6, seed_stream(11, 0))
        system = linalg.eigendecompose(a)
        assert np.all(np.diff(system.eigenvalues) >= 0.0)
        assert np.max(np.abs(system.reconstruct() - a)) <= 1e-10

    def test_eigenvectors_are_orthonormal(self):
        system = linalg.eigendecompose(random_hermitian(5, seed_stream(12, 0)))
        v = system.eigenvectors
        np.testing.assert_allclose(v.conj().T @ v, np.eye(5), atol=1e-12)

    def test_rotate_diagonalizes(self):
        a = random_hermitian(4, seed_stream(13, 0))
        system = linalg.eigendecompose(a)
        np.testing.assert_allclose(system.rotate(a), np.diag(system.eigenvalues), atol=1e-10)


class TestSpectralApply:
    """Matrix functions through the spectrum"""

    def test_log_of_exp_round_trip(self):
        a = 0.5 * random_hermitian(4, seed_stream(21, 0))
        exp_a = la.expm(a)
        log_exp_a = linalg.spectral_apply(exp_a, np.log)
        assert np.max(np.abs(log_exp_a.entries - a)) <= 1e-9

    def test_log_of_negative_eigenvalue_fails(self):
        with pytest.raises(SpectralDomainError) as excinfo:
            linalg.spectral_apply(np.diag([1.0, -1.0]), np.log)
        assert excinfo.value.eigenvalue == -1.0

    def test_log_of_zero_fails(self):
        with pytest.raises(SpectralDomainError):
            linalg.spectral_apply(np.diag([0.0, 1.0]), np.log)

    def test_constant_function(self):
        out = linalg.spectral_apply(np.diag([1.0, 2.0, 3.0]), lambda v: 2.0)
        np.testing.assert_allclose(out.entries, 2.0 * np.eye(3), atol=1e-14)

    def test_identity_function(self):
        a = random_hermitian(5, seed_stream(22, 0))
        out = linalg.spectral_apply(a, lambda v: v)
        np.testing.assert_allclose(out.entries, a, atol=1e-10)

    @pytest.mark.parametrize("seed", range(3))
    def test_commutes_with_unitary_conjugation(self, seed):
        rng = seed_stream(23, seed)
        a = random_hermitian(4, rng)
        U = random_unitary(4, rng)
        rotated = linalg.spectral_apply(U @ a @ U.conj().T, np.exp)
        expected = U @ linalg.spectral_apply(a, np.exp).entries @ U.conj().T
        np.testing.assert_allclose(rotated.entries, expected, atol=1e-9)


class TestTraces:
    """Trace products and norms"""

    def test_identity_trace(self):
        assert linalg.trace_product(np.eye(3), np.eye(3)) == pytest.approx(3.0)

    def test_random_pair_matches_entrywise_sum(self):
        a = random_hermitian(5, seed_stream(31, 0))
        b = random_hermitian(5, seed_stream(31, 1))
        expected = sum(a[i, j] * b[j, i] for i in range(5) for j in range(5)).real
        assert linalg.trace_product(a, b) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("seed", range(3))
    def test_symmetric(self, seed):
        a = random_hermitian(4, seed_stream(32, seed))
        b = random_hermitian(4, seed_stream(33, seed))
        assert linalg.trace_product(a, b) == pytest.approx(linalg.trace_product(b, a), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            linalg.trace_product(np.eye(2), np.eye(3))

    def test_complex_trace_is_rejected(self):
        """A non-Hermitian pair can give Tr[AB] = i"""
        with pytest.raises(NotHermitian) as excinfo:
            linalg.trace_product(np.array([[0.0, 1.0], [0.0, 0.0]]), np.array([[0.0, 0.0], [1j, 0.0]]))
        assert excinfo.value.residual == pytest.approx(1.0)

    def test_norms(self):
        a = np.diag([1.0, -3.0])
        assert linalg.trace_norm(a) == pytest.approx(4.0)
        assert linalg.operator_norm(a) == pytest.approx(3.0)


class TestClipSpectrum:
    """PSD clipping"""

    def test_tiny_negative_is_clipped(self):
        clipped = linalg.clip_spectrum(np.array([-1e-15, 1.0]))
        assert clipped[0] == 0.0
        assert clipped[1] == 1.0

    def test_negative_eigenvalue_raises(self):
        with pytest.raises(NotPositiveSemidefinite) as excinfo:
            linalg.clip_spectrum(np.array([-0.1, 1.0]))
        assert excinfo.value.min_eigenvalue == pytest.approx(-0.1)

    def test_psd_spectrum_of_projector(self):
        values, vectors = linalg.psd_spectrum(np.diag([0.0, 1.0]))
        np.testing.assert_allclose(values, [0.0, 1.0])
        assert vectors.shape == (2, 2)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
