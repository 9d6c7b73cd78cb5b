"""Dense Hermitian eigensolver helpers with deterministic ordering."""

from __future__ import annotations

import numpy as np

HERMITICITY_ATOL = 1e-9


def assert_hermitian(matrix: np.ndarray, atol: float = HERMITICITY_ATOL) -> None:
    """Raise if the matrix deviates from its conjugate transpose."""
    deviation = np.max(np.abs(matrix - matrix.conj().T))
    if deviation > atol:
        raise ValueError(f"matrix is not Hermitian (deviation {deviation:.3e})")


def ordered_eigh(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition with a deterministic ordering and phase convention.

    Eigenvalues come back ascending (they are real for Hermitian input).
    Each eigenvector is rotated by a global phase so its first component
    of significant magnitude is real and positive. This pins the output
    even in the presence of degeneracies up to subspace rotations.
    """
    values, vectors = np.linalg.eigh(matrix)
    vectors = vectors.copy()
    for k in range(vectors.shape[1]):
        column = vectors[:, k]
        # first component carrying at least 1e-8 of the norm fixes the phase
        idx = np.argmax(np.abs(column) > 1e-8)
        pivot = column[idx]
        if np.abs(pivot) > 0:
            vectors[:, k] = column * (np.conj(pivot) / np.abs(pivot))
    return values, vectors
