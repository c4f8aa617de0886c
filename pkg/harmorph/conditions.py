"""Existence conditions for harmonic morphisms and conformal foliations."""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from .algebra import (
    ad_operator,
    basis_vector,
    block_frame,
    compress,
    gram_schmidt,
    jacobi_residual,
    metric_transpose,
    trace_ad,
)
from .const import (
    COND_A_SUBALGEBRA,
    COND_I,
    COND_II,
    COND_III,
    COND_IV,
    COND_IV_V,
    COND_JACOBI,
    COND_V,
    COND_VI,
    COND_VII,
    DEFAULT_TOLERANCE,
    UNSOUND_JACOBI,
)
from .exceptions import BadDecomposition, DimensionMismatch, TooSmall
from .geometry import koszul_coefficients
from .models import (
    CheckItem,
    CheckReport,
    ConformalSplit,
    Decomposition,
    IsotropicFrame,
    MetricLieAlgebra,
)

_LOGGER = logging.getLogger(__name__)

UNSOUND_NOTE = "unsound: Jacobi identity fails, theorem conditions not evaluated"


def conformal_decompose(
    operator: np.ndarray,
    gram: Optional[np.ndarray] = None,
    tol: float = DEFAULT_TOLERANCE,
) -> ConformalSplit:
    """Split L as `lam * I + (L - L^t)/2 + remainder`.

    The residual is the operator norm of the trace-free symmetric
    remainder; it vanishes exactly when L is conformal, i.e. lies in
    R * I + so(m). When it exceeds `tol` the split carries a witness pair
    of orthonormal vectors Z, W maximising |<LZ,Z> - <LW,W>|.
    """
    operator = np.asarray(operator, dtype=float)
    size = operator.shape[0] if operator.ndim == 2 else 0
    if size < 1 or operator.shape != (size, size):
        raise DimensionMismatch(
            f"Expected a square operator, got shape {operator.shape}"
        )
    gram = np.eye(size) if gram is None else np.asarray(gram, dtype=float)
    if gram.shape != (size, size):
        raise DimensionMismatch(
            f"Gram of shape {gram.shape} for a {size}x{size} operator"
        )

    transpose = metric_transpose(operator, gram)
    lam = float(np.trace(operator)) / size
    skew = (operator - transpose) / 2
    remainder = (operator + transpose) / 2 - lam * np.eye(size)

    # Symmetric form of the remainder in an orthonormal frame.
    lower = linalg.cholesky(gram, lower=True)
    upper_rem = lower.T @ remainder
    symmetric = linalg.solve_triangular(lower, upper_rem.T, lower=True).T
    symmetric = (symmetric + symmetric.T) / 2
    eigenvalues, eigenvectors = np.linalg.eigh(symmetric)
    residual = float(np.abs(eigenvalues).max())

    witness = None
    if residual > tol and size > 1:
        back = linalg.solve_triangular(lower.T, eigenvectors, lower=False)
        witness = (back[:, 0], back[:, -1])
    return ConformalSplit(lam, skew, residual, witness)


def lemma_predicates(
    operator: np.ndarray,
    gram: Optional[np.ndarray] = None,
    samples: int = 100,
    rng: Optional[np.random.Generator] = None,
    tol: float = DEFAULT_TOLERANCE,
) -> Tuple[bool, bool, bool]:
    """Evaluate the three equivalent characterisations of conformal operators.

    (i) L = lam * I + (L - L^t)/2, decided exactly;
    (ii) <LZ,Z> = <LW,W> for sampled Z, W of equal norm;
    (iii) <LZ,Z> = <LW,W> and <LZ,W> + <LW,Z> = 0 for sampled orthonormal Z, W.
    """
    operator = np.asarray(operator, dtype=float)
    size = operator.shape[0]
    gram = np.eye(size) if gram is None else np.asarray(gram, dtype=float)
    rng = np.random.default_rng(0) if rng is None else rng

    def form(x: np.ndarray, y: np.ndarray) -> float:
        return float(x @ gram @ operator @ y)

    exact = conformal_decompose(operator, gram, tol).residual <= tol

    equal_norm = True
    for _ in range(samples):
        z, w = rng.standard_normal((2, size))
        z = z / np.sqrt(z @ gram @ z)
        w = w / np.sqrt(w @ gram @ w)
        if abs(form(z, z) - form(w, w)) > tol:
            equal_norm = False
            break

    orthonormal = True
    if size > 1:
        for _ in range(samples):
            z, w = gram_schmidt(rng.standard_normal((2, size)), gram)
            diagonal = form(z, z) - form(w, w)
            mixed = form(w, z) + form(z, w)
            if max(abs(diagonal), abs(mixed)) > tol:
                orthonormal = False
                break
    return exact, equal_norm, orthonormal


def _label(alg: MetricLieAlgebra, index: int) -> str:
    return alg.labels[index]


def _inclusion(
    alg: MetricLieAlgebra,
    left: Sequence[int],
    right: Sequence[int],
    target: Sequence[int],
    condition: str,
    tol: float,
) -> CheckItem:
    """Check [left, right] within target on basis pairs."""
    outside = [index for index in range(alg.dim) if index not in set(target)]
    worst, witness = 0.0, None
    for i in left:
        for j in right:
            component = np.zeros(alg.dim)
            component[outside] = alg.c[i, j, outside]
            size = float(np.sqrt(component @ alg.gram @ component))
            if size > worst:
                worst, witness = size, (i, j)
    detail = ""
    if witness is not None and worst > tol:
        i, j = witness
        detail = f"[{_label(alg, i)}, {_label(alg, j)}] leaves the target block"
    return CheckItem(condition, worst <= tol, worst, witness, detail)


def _trace_item(
    alg: MetricLieAlgebra, indices: Sequence[int], condition: str, tol: float
) -> CheckItem:
    worst, witness = 0.0, None
    for index in indices:
        trace = abs(trace_ad(alg, basis_vector(alg, index)))
        if trace > worst:
            worst, witness = trace, (index,)
    detail = ""
    if witness is not None and worst > tol:
        detail = f"trace ad_{_label(alg, witness[0])} = {worst:g}"
    return CheckItem(condition, worst <= tol, worst, witness, detail)


def _conformal_item(
    alg: MetricLieAlgebra, d: Decomposition, condition: str, tol: float
) -> Tuple[CheckItem, Dict[str, float]]:
    """Conformality of the m-compression of ad_H for each basis H of a."""
    lambdas: Dict[str, float] = {}
    if not d.m_idx:
        return CheckItem(condition, True, 0.0), lambdas
    frame = block_frame(alg, d.m_idx)
    worst, witness = 0.0, None
    for index in d.a_idx:
        block = compress(alg, ad_operator(alg, basis_vector(alg, index)), frame)
        split = conformal_decompose(block, tol=tol)
        lambdas[_label(alg, index)] = split.lam
        if split.residual > worst:
            worst = split.residual
            pair = split.witness
            witness = (index,)
            if pair is not None:
                witness = (index, pair[0] @ frame, pair[1] @ frame)
    detail = ""
    if witness is not None and worst > tol:
        detail = f"ad_{_label(alg, witness[0])} is not conformal on m"
    return CheckItem(condition, worst <= tol, worst, witness, detail), lambdas


def _jacobi_item(alg: MetricLieAlgebra, tol: float) -> Tuple[CheckItem, bool]:
    residual, triple = jacobi_residual(alg)
    item = CheckItem(COND_JACOBI, residual <= tol, residual, triple)
    return item, residual > UNSOUND_JACOBI


def check_morphism(
    alg: MetricLieAlgebra, d: Decomposition, tol: float = DEFAULT_TOLERANCE
) -> CheckReport:
    """Check the conditions under which g = a + k + m yields a harmonic morphism.

    Items: the Jacobi identity; [a, a] in a; (i) [a, k] in k; (ii) [a, m]
    in m; (iii) [n, n] in k; (iv) trace ad_Z = 0 on m; (v) ad_H conformal
    on m for every H in a. The values of the conformal functional lambda on
    the a-basis are reported under `values["lambda"]`.
    """
    d.validate(alg, tol)
    jacobi, unsound = _jacobi_item(alg, tol)
    if unsound:
        _LOGGER.debug(
            "Jacobi residual %g, skipping theorem conditions", jacobi.residual
        )
        return CheckReport([jacobi], [UNSOUND_NOTE])

    items: List[CheckItem] = [
        jacobi,
        _inclusion(alg, d.a_idx, d.a_idx, d.a_idx, COND_A_SUBALGEBRA, tol),
        _inclusion(alg, d.a_idx, d.k_idx, d.k_idx, COND_I, tol),
        _inclusion(alg, d.a_idx, d.m_idx, d.m_idx, COND_II, tol),
        _inclusion(alg, d.n_idx, d.n_idx, d.k_idx, COND_III, tol),
        _trace_item(alg, d.m_idx, COND_IV, tol),
    ]
    conformal, lambdas = _conformal_item(alg, d, COND_V, tol)
    items.append(conformal)
    return CheckReport(items, values={"lambda": lambdas})


def isotropic_frame(m: int) -> IsotropicFrame:
    """Maximal isotropic frame `e_{2j-1} + i e_{2j}` of C^m."""
    if m < 2:
        raise TooSmall(f"C^{m} has no nonzero isotropic vectors")
    vectors = np.zeros((m // 2, m), dtype=complex)
    for j in range(m // 2):
        vectors[j, 2 * j] = 1.0
        vectors[j, 2 * j + 1] = 1.0j
    return IsotropicFrame(vectors)


def orthogonal_family(frame: IsotropicFrame, values: np.ndarray) -> np.ndarray:
    """Components (Phi, v) of R^m-valued map values along an isotropic frame."""
    values = np.asarray(values, dtype=float)
    if values.shape[-1] != frame.vectors.shape[1]:
        raise DimensionMismatch("Values and frame live in different dimensions")
    return values @ frame.vectors.T


def omega_form(
    alg: MetricLieAlgebra, d: Decomposition, tol: float = DEFAULT_TOLERANCE
) -> Tuple[np.ndarray, float]:
    """The 1-form omega on the basis and the size of d(omega).

    omega(E) = (n-2)/n sum_k <V nabla_Zk Zk, E> - sum_r <H nabla_Ar Ar, E>
    - sum_s <H nabla_Xs Xs, E> with n = dim m. On left-invariant fields
    d(omega)(E, F) = -omega([E, F]), so the closedness residual is the
    largest |omega([e_i, e_j])|.
    """
    d.validate(alg, tol)
    n = len(d.m_idx)
    if n < 1:
        raise BadDecomposition("The 1-form needs a nonzero horizontal block m")
    gamma = koszul_coefficients(alg).gamma

    def mean(indices: Sequence[int]) -> np.ndarray:
        frame = block_frame(alg, indices)
        return np.einsum("pi,pj,ijk->k", frame, frame, gamma)

    horizontal = np.zeros(alg.dim, dtype=bool)
    horizontal[list(d.m_idx)] = True
    fibre_mean = mean(d.m_idx)
    vertical_mean = mean(d.vertical_idx) if d.vertical_idx else np.zeros(alg.dim)

    omega = np.where(horizontal, -vertical_mean, (n - 2) / n * fibre_mean)
    upper = np.triu_indices(alg.dim, k=1)
    closedness = float(np.abs(alg.c[upper] @ omega).max()) if alg.dim > 1 else 0.0
    return omega, closedness


def check_foliation(
    alg: MetricLieAlgebra, d: Decomposition, tol: float = DEFAULT_TOLERANCE
) -> CheckReport:
    """Check that a + k integrates to a conformal foliation by harmonic morphisms.

    Items: the Jacobi identity; (i) a + k closed under the bracket;
    (ii) [a, m] in k + m; (iii) [n, n] in k; (iv+v) the m-compression of
    each ad_H is conformal; (vi) trace ad_Z = 0 on m; (vii) the 1-form
    omega vanishes on [g, g].
    """
    d.validate(alg, tol)
    jacobi, unsound = _jacobi_item(alg, tol)
    if unsound:
        return CheckReport([jacobi], [UNSOUND_NOTE])

    vertical = d.vertical_idx
    items: List[CheckItem] = [
        jacobi,
        _inclusion(alg, vertical, vertical, vertical, COND_I, tol),
        _inclusion(alg, d.a_idx, d.m_idx, d.n_idx, COND_II, tol),
        _inclusion(alg, d.n_idx, d.n_idx, d.k_idx, COND_III, tol),
    ]
    conformal, lambdas = _conformal_item(alg, d, COND_IV_V, tol)
    items.append(conformal)
    items.append(_trace_item(alg, d.m_idx, COND_VI, tol))

    values: Dict[str, object] = {"lambda": lambdas}
    if d.m_idx:
        omega, closedness = omega_form(alg, d, tol)
        items.append(CheckItem(COND_VII, closedness <= tol, closedness))
        values["omega"] = {
            label: float(value) for label, value in zip(alg.labels, omega)
        }
    else:
        items.append(CheckItem(COND_VII, True, 0.0, detail="m is trivial"))
    return CheckReport(items, values=values)
