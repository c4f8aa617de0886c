"""Left-invariant Riemannian geometry computed from structure constants.

Curvature follows R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
and K(X,Y) = <R(X,Y)Y,X> / (|X|^2 |Y|^2 - <X,Y>^2). With this convention the
hyperbolic plane has K = -1.
"""
import logging
from typing import Sequence, Tuple

import numpy as np

from .algebra import block_frame, check_orthonormal, jacobi_residual
from .const import (
    ASCENT_ITERATIONS,
    ASCENT_STARTS,
    DEFAULT_BUDGET,
    DEFAULT_SEED,
    DEFAULT_TOLERANCE,
    FD_STEP,
)
from .exceptions import DegeneratePlane, DimensionMismatch, NotALieAlgebra
from .models import ConnectionCoeffs, MetricLieAlgebra, ScanResult, Subspace

_LOGGER = logging.getLogger(__name__)

_CHUNK = 4096


def _require_lie(alg: MetricLieAlgebra, tol: float) -> None:
    residual, triple = jacobi_residual(alg)
    if residual > tol:
        raise NotALieAlgebra(
            "Jacobi identity fails", {"residual": residual, "triple": triple}
        )


def koszul_coefficients(alg: MetricLieAlgebra) -> ConnectionCoeffs:
    """Koszul formula for left-invariant fields, without the Jacobi check.

    2<nabla_X Y, Z> = <[X,Y],Z> - <[Y,Z],X> + <[Z,X],Y>.
    """
    lowered = np.einsum("ijl,lk->ijk", alg.c, alg.gram)
    gamma = 0.5 * (
        lowered - np.einsum("jki->ijk", lowered) + np.einsum("kij->ijk", lowered)
    )
    return ConnectionCoeffs(gamma)


def connection_coeffs(
    alg: MetricLieAlgebra, tol: float = DEFAULT_TOLERANCE
) -> ConnectionCoeffs:
    """Lowered Levi-Civita coefficients `<nabla_ei ej, ek>`."""
    _require_lie(alg, tol)
    return koszul_coefficients(alg)


def _raised(alg: MetricLieAlgebra, gamma: np.ndarray) -> np.ndarray:
    """Coordinates of nabla_ei ej."""
    dim = alg.dim
    flat = alg.gram_solve(gamma.reshape(dim * dim, dim).T).T
    return flat.reshape(dim, dim, dim)


def covariant_derivative(
    alg: MetricLieAlgebra, x: Sequence[float], y: Sequence[float]
) -> np.ndarray:
    """nabla_x y for left-invariant fields."""
    raised = _raised(alg, koszul_coefficients(alg).gamma)
    return np.einsum("i,j,ijk->k", np.asarray(x, float), np.asarray(y, float), raised)


def curvature_tensor(
    alg: MetricLieAlgebra, tol: float = DEFAULT_TOLERANCE
) -> np.ndarray:
    """`R[i, j, k, l] = <R(e_i, e_j) e_k, e_l>`."""
    _require_lie(alg, tol)
    raised = _raised(alg, koszul_coefficients(alg).gamma)
    twice = np.einsum("jkm,imn->ijkn", raised, raised)
    swapped = np.einsum("jikn->ijkn", twice)
    along_bracket = np.einsum("ijm,mkn->ijkn", alg.c, raised)
    return np.einsum("ijkn,nl->ijkl", twice - swapped - along_bracket, alg.gram)


def _plane_curvature(
    tensor: np.ndarray, gram: np.ndarray, x: np.ndarray, y: np.ndarray, tol: float
) -> float:
    denominator = (x @ gram @ x) * (y @ gram @ y) - (x @ gram @ y) ** 2
    if denominator <= tol:
        raise DegeneratePlane(
            "Vectors do not span a plane", {"denominator": denominator}
        )
    return float(np.einsum("ijkl,i,j,k,l->", tensor, x, y, y, x) / denominator)


def sectional_curvature(
    alg: MetricLieAlgebra,
    x: Sequence[float],
    y: Sequence[float],
    tol: float = DEFAULT_TOLERANCE,
) -> float:
    """Sectional curvature of the plane spanned by x and y."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape != (alg.dim,) or y.shape != (alg.dim,):
        raise DimensionMismatch(f"Expected vectors of length {alg.dim}")
    return _plane_curvature(curvature_tensor(alg, tol), alg.gram, x, y, tol)


def _orthonormal_pairs(
    gram: np.ndarray, pairs: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    x, y = pairs[:, 0], pairs[:, 1]
    x = x / np.sqrt(np.einsum("bi,ij,bj->b", x, gram, x))[:, None]
    y = y - np.einsum("bi,ij,bj->b", y, gram, x)[:, None] * x
    y = y / np.sqrt(np.einsum("bi,ij,bj->b", y, gram, y))[:, None]
    return x, y


def _ascend(
    tensor: np.ndarray, gram: np.ndarray, x: np.ndarray, y: np.ndarray, tol: float
) -> Tuple[float, np.ndarray, np.ndarray]:
    """Projected ascent of K over orthonormal 2-frames with backtracking."""
    dim = x.shape[0]

    def value(frame: np.ndarray) -> float:
        return _plane_curvature(tensor, gram, frame[:dim], frame[dim:], tol)

    def reframe(frame: np.ndarray) -> np.ndarray:
        first, second = _orthonormal_pairs(gram, frame.reshape(1, 2, dim))
        return np.concatenate([first[0], second[0]])

    frame = np.concatenate([x, y])
    current = value(frame)
    step = 1.0
    for _ in range(ASCENT_ITERATIONS):
        gradient = np.empty_like(frame)
        for slot in range(frame.size):
            shift = np.zeros_like(frame)
            shift[slot] = FD_STEP
            rise = value(frame + shift) - value(frame - shift)
            gradient[slot] = rise / (2 * FD_STEP)
        if not np.any(gradient):
            break
        improved = False
        while step > 1e-12:
            try:
                candidate = reframe(frame + step * gradient)
                candidate_value = value(candidate)
            except DegeneratePlane:
                candidate_value = -np.inf
            if candidate_value > current:
                improved = candidate_value - current > 1e-15
                frame, current = candidate, candidate_value
                step = min(2 * step, 1.0)
                break
            step /= 2
        if not improved:
            break
    return current, frame[:dim], frame[dim:]


def curvature_scan(
    alg: MetricLieAlgebra,
    budget: int = DEFAULT_BUDGET,
    seed: int = DEFAULT_SEED,
    tol: float = DEFAULT_TOLERANCE,
) -> ScanResult:
    """Search for the largest sectional curvature.

    Draws `budget` seeded random planes, evaluates all of them in vectorised
    chunks, then refines the best few by finite-difference ascent over the
    Grassmannian. The output is fully determined by (alg, budget, seed).
    Sampling is evidence of non-positive curvature, not a certificate.
    """
    if budget < 1:
        raise ValueError("Scan budget must be at least 1")
    if alg.dim < 2:
        raise DegeneratePlane("An algebra of dimension 1 has no planes")
    tensor = curvature_tensor(alg, tol)
    rng = np.random.default_rng(seed)
    pairs = rng.standard_normal((budget, 2, alg.dim))
    x, y = _orthonormal_pairs(alg.gram, pairs)

    values = np.empty(budget)
    for start in range(0, budget, _CHUNK):
        stop = min(start + _CHUNK, budget)
        partial = np.einsum("ijkl,bi,bj->bkl", tensor, x[start:stop], y[start:stop])
        values[start:stop] = np.einsum(
            "bkl,bk,bl->b", partial, y[start:stop], x[start:stop]
        )

    order = np.argsort(-values, kind="stable")[:ASCENT_STARTS]
    best_value, best_x, best_y = -np.inf, x[order[0]], y[order[0]]
    for index in order:
        found, fx, fy = _ascend(tensor, alg.gram, x[index], y[index], tol)
        _LOGGER.debug("Ascent from sample %d: %g -> %g", index, values[index], found)
        if found > best_value:
            best_value, best_x, best_y = found, fx, fy

    max_k = _plane_curvature(tensor, alg.gram, best_x, best_y, tol)
    return ScanResult(max_k, (best_x, best_y), budget)


def _frame(alg: MetricLieAlgebra, v: Subspace, tol: float) -> np.ndarray:
    frame = np.atleast_2d(v.basis)
    if frame.shape[0] and frame.shape[1] != alg.dim:
        raise DimensionMismatch(f"Expected vectors of length {alg.dim}")
    check_orthonormal(frame, alg.gram, max(tol, 1e-9))
    return frame


def _normal_part(
    alg: MetricLieAlgebra, frame: np.ndarray, vectors: np.ndarray
) -> np.ndarray:
    if frame.shape[0] == 0:
        return vectors
    return vectors - (vectors @ alg.gram @ frame.T) @ frame


def mean_curvature(
    alg: MetricLieAlgebra, v: Subspace, tol: float = DEFAULT_TOLERANCE
) -> np.ndarray:
    """Mean curvature vector sum_i nabla_fi fi, projected off the distribution."""
    frame = _frame(alg, v, tol)
    if frame.shape[0] == 0:
        return np.zeros(alg.dim)
    raised = _raised(alg, koszul_coefficients(alg).gamma)
    total = np.einsum("pi,pj,ijk->k", frame, frame, raised)
    return _normal_part(alg, frame, total)


def second_fundamental_form(
    alg: MetricLieAlgebra, v: Subspace, tol: float = DEFAULT_TOLERANCE
) -> np.ndarray:
    """`B[p, q]` = normal part of the symmetrised nabla_fp fq."""
    frame = _frame(alg, v, tol)
    raised = _raised(alg, koszul_coefficients(alg).gamma)
    pairs = np.einsum("pi,qj,ijk->pqk", frame, frame, raised)
    symmetric = (pairs + pairs.transpose(1, 0, 2)) / 2
    rank = frame.shape[0]
    normal = _normal_part(alg, frame, symmetric.reshape(rank * rank, alg.dim))
    return normal.reshape(rank, rank, alg.dim)


def is_totally_geodesic(
    alg: MetricLieAlgebra, v: Subspace, tol: float = DEFAULT_TOLERANCE
) -> bool:
    """Return True when the second fundamental form vanishes."""
    form = second_fundamental_form(alg, v, tol)
    return bool(form.size == 0 or np.abs(form).max() <= tol)


def is_integrable(
    alg: MetricLieAlgebra, indices: Sequence[int], tol: float = DEFAULT_TOLERANCE
) -> bool:
    """Return True when the span of the given axes is closed under the bracket."""
    frame = block_frame(alg, indices)
    images = alg.c[np.ix_(list(indices), list(indices))].reshape(-1, alg.dim)
    if images.size == 0:
        return True
    return bool(np.abs(_normal_part(alg, frame, images)).max() <= tol)
