"""Bracket, adjoint and trace calculus on metric Lie algebras."""
import logging
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from .const import RANK_RCOND
from .exceptions import DimensionMismatch, NotOrthonormal
from .models import Entry, MetricLieAlgebra, Subspace

_LOGGER = logging.getLogger(__name__)


def make_algebra(
    dim: int,
    entries: Iterable[Entry],
    gram: Optional[Sequence[Sequence[float]]] = None,
    labels: Optional[Sequence[str]] = None,
) -> MetricLieAlgebra:
    """Build a validated algebra from `(i, j, k, value)` bracket entries.

    Entries with `i > j` are folded onto `(j, i, k, -value)`; the antisymmetric
    closure is applied on construction.
    """
    return MetricLieAlgebra.from_entries(dim, entries, gram, labels)


def _vector(alg: MetricLieAlgebra, x: Sequence[float]) -> np.ndarray:
    vector = np.asarray(x, dtype=float)
    if vector.shape != (alg.dim,):
        raise DimensionMismatch(
            f"Expected a vector of length {alg.dim}, got shape {vector.shape}"
        )
    return vector


def basis_vector(alg: MetricLieAlgebra, index: int) -> np.ndarray:
    """Coordinate vector of the basis element `e_index`."""
    vector = np.zeros(alg.dim)
    vector[index] = 1.0
    return vector


def bracket(
    alg: MetricLieAlgebra, x: Sequence[float], y: Sequence[float]
) -> np.ndarray:
    """Return [x, y]."""
    return np.einsum("i,j,ijk->k", _vector(alg, x), _vector(alg, y), alg.c)


def ad_operator(
    alg: MetricLieAlgebra, x: Sequence[float], adjoint: bool = False
) -> np.ndarray:
    """Matrix of ad_x, or of its metric adjoint ad_x^t when `adjoint` is set."""
    matrix = np.einsum("i,ijk->kj", _vector(alg, x), alg.c)
    if not adjoint:
        return matrix
    return metric_transpose(matrix, alg.gram)


def metric_transpose(matrix: np.ndarray, gram: np.ndarray) -> np.ndarray:
    """Adjoint G^-1 A^T G of an operator for the inner product `gram`."""
    return linalg.cho_solve(linalg.cho_factor(gram), matrix.T @ gram)


def jacobi_tensor(alg: MetricLieAlgebra) -> np.ndarray:
    """`J[i, j, k]` = [e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]]."""
    nested = np.einsum("jkl,ilm->ijkm", alg.c, alg.c)
    return (
        nested
        + np.einsum("jkim->ijkm", nested)
        + np.einsum("kijm->ijkm", nested)
    )


def jacobi_residual(
    alg: MetricLieAlgebra,
) -> Tuple[float, Optional[Tuple[int, int, int]]]:
    """Largest Jacobi cycle norm over basis triples, with the worst triple."""
    if alg.dim < 3:
        return 0.0, None
    cycles = jacobi_tensor(alg)
    squared = np.einsum("ijkm,mn,ijkn->ijk", cycles, alg.gram, cycles)
    norms = np.sqrt(np.maximum(squared, 0.0))
    worst, worst_triple = -1.0, None
    for i in range(alg.dim):
        for j in range(i + 1, alg.dim):
            for k in range(j + 1, alg.dim):
                if norms[i, j, k] > worst:
                    worst, worst_triple = float(norms[i, j, k]), (i, j, k)
    return worst, worst_triple


def trace_ad(alg: MetricLieAlgebra, x: Sequence[float]) -> float:
    """Trace of ad_x."""
    return float(np.trace(ad_operator(alg, x)))


def orthonormalize(
    vectors: np.ndarray, gram: np.ndarray, rcond: float = RANK_RCOND
) -> np.ndarray:
    """Gram-orthonormal rows spanning the row space of `vectors`.

    The rank is decided by singular values above `rcond` times the largest.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    dim = gram.shape[0]
    if vectors.size == 0:
        return np.zeros((0, dim))
    _, singular, rows = np.linalg.svd(vectors, full_matrices=False)
    if singular.size == 0 or singular[0] == 0:
        return np.zeros((0, dim))
    rank = int(np.sum(singular > rcond * singular[0]))
    return gram_schmidt(rows[:rank], gram)


def gram_schmidt(rows: np.ndarray, gram: np.ndarray) -> np.ndarray:
    """Gram-orthonormalize linearly independent rows, keeping their order."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.shape[0] == 0:
        return rows.reshape(0, gram.shape[0])
    lower = linalg.cholesky(rows @ gram @ rows.T, lower=True)
    return linalg.solve_triangular(lower, rows, lower=True)


def check_orthonormal(frame: np.ndarray, gram: np.ndarray, tol: float) -> None:
    """Raise NotOrthonormal unless the rows of `frame` are gram-orthonormal."""
    frame = np.atleast_2d(frame)
    if frame.shape[0] == 0:
        return
    error = np.abs(frame @ gram @ frame.T - np.eye(frame.shape[0])).max()
    if error > tol:
        raise NotOrthonormal("Frame is not orthonormal", {"error": float(error)})


def block_frame(alg: MetricLieAlgebra, indices: Sequence[int]) -> np.ndarray:
    """Gram-orthonormal frame of the span of some coordinate axes."""
    axes = np.eye(alg.dim)[list(indices)]
    return gram_schmidt(axes, alg.gram)


def complement_frame(
    alg: MetricLieAlgebra, frame: np.ndarray, within: np.ndarray
) -> np.ndarray:
    """Orthonormal frame of the complement of `frame` inside span(`within`)."""
    within = np.atleast_2d(within)
    if frame.shape[0] == 0:
        return orthonormalize(within, alg.gram)
    projected = within - (within @ alg.gram @ frame.T) @ frame
    return orthonormalize(projected, alg.gram)


def compress(
    alg: MetricLieAlgebra, operator: np.ndarray, frame: np.ndarray
) -> np.ndarray:
    """Matrix of P o operator restricted to span(frame), in that orthonormal frame."""
    return frame @ alg.gram @ operator @ frame.T


def derived_subalgebra(alg: MetricLieAlgebra) -> Subspace:
    """Orthonormal basis of [g, g]."""
    upper = np.triu_indices(alg.dim, k=1)
    return Subspace(orthonormalize(alg.c[upper], alg.gram))


def bracket_span(
    alg: MetricLieAlgebra, left: np.ndarray, right: np.ndarray
) -> np.ndarray:
    """Orthonormal frame of the span of [left_p, right_q] over all row pairs."""
    left, right = np.atleast_2d(left), np.atleast_2d(right)
    if left.shape[0] == 0 or right.shape[0] == 0:
        return np.zeros((0, alg.dim))
    images = np.einsum("pi,qj,ijk->pqk", left, right, alg.c).reshape(-1, alg.dim)
    return orthonormalize(images, alg.gram)


def is_solvable(alg: MetricLieAlgebra) -> bool:
    """Return True when the derived series reaches zero."""
    current = np.eye(alg.dim)
    while current.shape[0]:
        following = bracket_span(alg, current, current)
        if following.shape[0] == current.shape[0]:
            return False
        current = following
    return True


def is_nilpotent(alg: MetricLieAlgebra) -> bool:
    """Return True when the lower central series reaches zero."""
    whole = np.eye(alg.dim)
    current = whole
    while current.shape[0]:
        following = bracket_span(alg, whole, current)
        if following.shape[0] == current.shape[0]:
            return False
        current = following
    return True


def change_basis(
    alg: MetricLieAlgebra, frame: np.ndarray, labels: Optional[Sequence[str]] = None
) -> MetricLieAlgebra:
    """Re-express the algebra in the basis given by the rows of `frame`.

    The gram matrix of the result is the old metric restricted to the new
    basis, so an orthonormal frame yields the identity.
    """
    frame = np.asarray(frame, dtype=float)
    if frame.shape != (alg.dim, alg.dim):
        raise DimensionMismatch(f"Expected a {alg.dim}x{alg.dim} frame")
    images = np.einsum("pi,qj,ijk->pqk", frame, frame, alg.c)
    coords = np.linalg.solve(frame.T, images.reshape(-1, alg.dim).T).T
    coords = coords.reshape(alg.dim, alg.dim, alg.dim)
    upper = np.triu(np.ones((alg.dim, alg.dim), dtype=bool), k=1)
    c = np.where(upper[:, :, None], coords, 0.0)
    c = c - c.transpose(1, 0, 2)
    gram = frame @ alg.gram @ frame.T
    gram = (gram + gram.T) / 2
    if np.allclose(gram, np.eye(alg.dim), rtol=0.0, atol=1e-12):
        gram = np.eye(alg.dim)
    _LOGGER.debug("Changed basis of %d-dimensional algebra", alg.dim)
    return MetricLieAlgebra(c, gram, labels)
