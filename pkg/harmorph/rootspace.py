"""Root spaces of the abelian action, normality tests and Carnot algebras."""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from .algebra import (
    ad_operator,
    basis_vector,
    block_frame,
    change_basis,
    complement_frame,
    compress,
    jacobi_residual,
    orthonormalize,
)
from .conditions import check_morphism
from .const import (
    COND_I,
    COND_I_CONFORMAL,
    COND_II,
    COND_III,
    COND_THEOREM,
    DEFAULT_SEED,
    DEFAULT_TOLERANCE,
    NORMALITY_SAMPLES,
    RANK_RCOND,
    ROOT_CLUSTER,
    ROOT_RETRIES,
)
from .exceptions import (
    BadDecomposition,
    DimensionMismatch,
    FormatError,
    GradingViolation,
    JacobiViolation,
    NotAbelianAction,
    NotInvariant,
    RootDecompositionFailed,
    RootSpaceMismatch,
)
from .models import (
    CheckItem,
    CheckReport,
    Decomposition,
    MetricLieAlgebra,
    NormalityReport,
    RootSpace,
)

_LOGGER = logging.getLogger(__name__)

LayerBracket = Tuple[int, int, int, int, Sequence[float]]


def normality_report(
    operator: np.ndarray, tol: float = DEFAULT_TOLERANCE
) -> NormalityReport:
    """Normality and almost-normality of L for the standard Hermitian product.

    4N(L) = (L + L*)^2 + [L + L*, L - L*]; L is almost normal when N(L) is
    positive semi-definite. Normal operators are almost normal.
    """
    operator = np.asarray(operator, dtype=complex)
    if operator.size == 0:
        return NormalityReport(True, True, 0.0, 0.0)
    if operator.ndim != 2 or operator.shape[0] != operator.shape[1]:
        raise DimensionMismatch(
            f"Expected a square operator, got shape {operator.shape}"
        )
    if not np.isfinite(operator).all():
        raise FormatError("The operator has non-finite entries")
    adjoint = operator.conj().T
    commutator = operator @ adjoint - adjoint @ operator
    commutator_norm = float(np.linalg.norm(commutator, 2))

    hermitian = operator + adjoint
    skew = operator - adjoint
    # Hermitian up to rounding: [L + L*, L - L*] is Hermitian.
    product = (hermitian @ hermitian + hermitian @ skew - skew @ hermitian) / 4
    min_eig = float(np.linalg.eigvalsh((product + product.conj().T) / 2).min())

    is_normal = commutator_norm <= tol
    almost = is_normal or min_eig >= -tol
    return NormalityReport(is_normal, almost, commutator_norm, min_eig)


def _validate_split(
    alg: MetricLieAlgebra, a_idx: Sequence[int], n_idx: Sequence[int], tol: float
) -> List[np.ndarray]:
    """Check s = a + n and return ad_H restricted to n for the a-basis."""
    Decomposition(a_idx, n_idx, ()).validate(alg, tol)
    outside = [index for index in range(alg.dim) if index not in set(n_idx)]
    restricted = []
    for position, h in enumerate(a_idx):
        for other in a_idx[position + 1 :]:
            if np.abs(alg.c[h, other]).max() > tol:
                raise NotAbelianAction(
                    f"[{alg.labels[h]}, {alg.labels[other]}] does not vanish"
                )
        operator = ad_operator(alg, basis_vector(alg, h))
        leak = np.abs(operator[np.ix_(outside, list(n_idx))]).max() if outside else 0.0
        if leak > tol:
            raise NotInvariant(
                f"ad_{alg.labels[h]} does not preserve n", {"residual": float(leak)}
            )
        restricted.append(operator[np.ix_(list(n_idx), list(n_idx))])

    for first in range(len(restricted)):
        for second in range(first + 1, len(restricted)):
            left, right = restricted[first], restricted[second]
            size = float(np.abs(left @ right - right @ left).max())
            if size > tol:
                raise NotAbelianAction(
                    "The adjoint action of a on n is not abelian",
                    {"pair": (a_idx[first], a_idx[second]), "residual": size},
                )
    return restricted


def _cluster(eigenvalues: np.ndarray) -> List[Tuple[float, float, int]]:
    """Chain eigenvalues into roots, pairing conjugates.

    Returns (real part, non-negative imaginary part, multiplicity) triples,
    the multiplicity counting both members of a conjugate pair.
    """
    scale = max(1.0, float(np.abs(eigenvalues).max(initial=0.0)))
    points = sorted((float(z.real), abs(float(z.imag))) for z in eigenvalues)
    groups: List[List[Tuple[float, float]]] = []
    for point in points:
        for group in groups:
            reach = ROOT_CLUSTER * scale
            if any(np.hypot(point[0] - q[0], point[1] - q[1]) <= reach for q in group):
                group.append(point)
                break
        else:
            groups.append([point])
    clusters = []
    for group in groups:
        real = float(np.mean([p[0] for p in group]))
        imag = float(np.mean([p[1] for p in group]))
        if imag <= ROOT_CLUSTER * scale:
            imag = 0.0
        clusters.append((real, imag, len(group)))
    return clusters


def _kernel_power(shift: np.ndarray, expected: int) -> Optional[Tuple[np.ndarray, int]]:
    """Smallest power whose kernel has the expected dimension."""
    power = np.eye(shift.shape[0], dtype=shift.dtype)
    for order in range(1, shift.shape[0] + 1):
        power = power @ shift
        kernel = linalg.null_space(power, rcond=RANK_RCOND)
        if kernel.shape[1] == expected:
            return kernel, order
        if kernel.shape[1] > expected:
            return None
    return None


def _nilpotency(shift: np.ndarray) -> int:
    """Smallest k with shift^k = 0 up to rounding."""
    size = shift.shape[0]
    scale = max(1.0, float(np.abs(shift).max(initial=0.0)))
    power = np.eye(size, dtype=shift.dtype)
    for order in range(1, size + 1):
        power = power @ shift
        if np.abs(power).max() <= 1e-7 * scale ** order:
            return order
    return size


def _normalized(beta: np.ndarray, tol: float) -> np.ndarray:
    beta = np.where(np.abs(beta) <= tol, 0.0, beta)
    nonzero = np.flatnonzero(beta)
    if nonzero.size and beta[nonzero[0]] < 0:
        beta = -beta
    return beta


def _attempt(
    alg: MetricLieAlgebra,
    n_idx: Sequence[int],
    restricted: List[np.ndarray],
    coeffs: np.ndarray,
    tol: float,
) -> Optional[List[RootSpace]]:
    size = len(n_idx)
    generic = np.tensordot(coeffs, np.array(restricted), axes=1)
    spaces = []
    for real, imag, multiplicity in _cluster(np.linalg.eigvals(generic)):
        if imag == 0.0:
            found = _kernel_power(generic - real * np.eye(size), multiplicity)
            complex_found = found
        else:
            shifted = generic - real * np.eye(size)
            quadratic = shifted @ shifted + imag ** 2 * np.eye(size)
            found = _kernel_power(quadratic, multiplicity)
            complex_found = _kernel_power(
                generic - (real + 1j * imag) * np.eye(size), multiplicity // 2
            )
        if found is None or complex_found is None:
            return None
        kernel, _ = found
        complex_kernel, _ = complex_found

        alpha, beta, order = [], [], 1
        for operator in restricted:
            inside = linalg.lstsq(kernel, operator @ kernel)[0]
            if np.abs(operator @ kernel - kernel @ inside).max() > 1e-6 * max(
                1.0, float(np.abs(operator).max())
            ):
                return None
            on_complex = linalg.lstsq(complex_kernel, operator @ complex_kernel)[0]
            root = np.trace(on_complex) / complex_kernel.shape[1]
            spread = np.linalg.eigvals(on_complex) - root
            if np.abs(spread).max() > 1e-4 * max(1.0, abs(root)):
                return None
            alpha.append(root.real)
            beta.append(root.imag)
            shift = inside - root.real * np.eye(multiplicity)
            if imag != 0.0:
                shift = shift @ shift + root.imag ** 2 * np.eye(multiplicity)
            order = max(order, _nilpotency(shift))

        embedded = np.zeros((multiplicity, alg.dim))
        embedded[:, list(n_idx)] = kernel.T
        spaces.append(
            RootSpace(
                np.array(alpha),
                _normalized(np.array(beta), max(tol, 1e-10)),
                orthonormalize(embedded, alg.gram),
                order,
            )
        )

    if sum(space.dim for space in spaces) != size:
        return None
    stacked = np.vstack([space.basis for space in spaces])
    if np.linalg.matrix_rank(stacked) != size:
        return None
    return spaces


def root_decomposition(
    alg: MetricLieAlgebra,
    a_idx: Sequence[int],
    n_idx: Sequence[int],
    tol: float = DEFAULT_TOLERANCE,
    seed: int = DEFAULT_SEED,
) -> List[RootSpace]:
    """Split n into the real generalized root spaces of the abelian action.

    A random combination H0 of the a-basis separates the roots; its
    generalized eigenspaces are computed as kernels of powered shifts and
    each basis H is then read off on them. Conjugate roots alpha +- i beta
    share one real space. The result is sorted by (alpha, beta).
    """
    a_idx, n_idx = tuple(a_idx), tuple(n_idx)
    restricted = _validate_split(alg, a_idx, n_idx, tol)
    if not n_idx:
        return []
    if not a_idx:
        basis = block_frame(alg, n_idx)
        return [RootSpace(np.zeros(0), np.zeros(0), basis, 1)]

    rng = np.random.default_rng(seed)
    for attempt in range(ROOT_RETRIES):
        coeffs = rng.standard_normal(len(a_idx))
        spaces = _attempt(alg, n_idx, restricted, coeffs, tol)
        if spaces is not None:
            return sorted(
                spaces,
                key=lambda space: (
                    tuple(np.round(space.alpha, 12)),
                    tuple(np.round(space.beta, 12)),
                ),
            )
        _LOGGER.debug(
            "Generic element %s did not separate the roots (attempt %d)",
            coeffs,
            attempt + 1,
        )
    raise RootDecompositionFailed(
        f"No generic element separated the roots after {ROOT_RETRIES} attempts"
    )


def almost_normal_action(
    alg: MetricLieAlgebra,
    a_idx: Sequence[int],
    n_idx: Sequence[int],
    tol: float = DEFAULT_TOLERANCE,
) -> NormalityReport:
    """Worst normality report of ad_H on n over the a-basis."""
    _validate_split(alg, tuple(a_idx), tuple(n_idx), tol)
    frame = block_frame(alg, n_idx)
    reports = []
    for h in a_idx:
        operator = ad_operator(alg, basis_vector(alg, h))
        reports.append(normality_report(compress(alg, operator, frame), tol))
    if not reports:
        return NormalityReport(True, True, 0.0, 0.0)
    return NormalityReport(
        all(report.is_normal for report in reports),
        all(report.is_almost_normal for report in reports),
        max(report.commutator_norm for report in reports),
        min(report.min_eig_N for report in reports),
    )


def _root_frame(
    alg: MetricLieAlgebra,
    a_idx: Sequence[int],
    n_idx: Sequence[int],
    root: RootSpace,
    tol: float,
) -> np.ndarray:
    basis = np.atleast_2d(np.asarray(root.basis, dtype=float))
    if basis.shape[1] != alg.dim:
        raise RootSpaceMismatch(f"Root space vectors must have length {alg.dim}")
    if basis.shape[0] < 2:
        raise RootSpaceMismatch("The root space must have dimension at least 2")
    if len(root.alpha) != len(a_idx):
        raise RootSpaceMismatch("The root does not live on the given abelian part")
    outside = [index for index in range(alg.dim) if index not in set(n_idx)]
    if outside and np.abs(basis[:, outside]).max() > tol:
        raise RootSpaceMismatch("The root space is not contained in n")
    frame = orthonormalize(basis, alg.gram)
    if frame.shape[0] != basis.shape[0]:
        raise RootSpaceMismatch("The root space basis is degenerate")
    for h in a_idx:
        image = frame @ ad_operator(alg, basis_vector(alg, h)).T
        leak = image - (image @ alg.gram @ frame.T) @ frame
        if np.abs(leak).max() > 1e-6:
            raise RootSpaceMismatch(
                f"The root space is not invariant under ad_{alg.labels[h]}"
            )
    return frame


def check_hadamard_morphism(
    alg: MetricLieAlgebra,
    a_idx: Sequence[int],
    n_idx: Sequence[int],
    root: RootSpace,
    tol: float = DEFAULT_TOLERANCE,
    seed: int = DEFAULT_SEED,
) -> CheckReport:
    """Check that a root space m = n_(alpha, beta) yields a harmonic morphism.

    Items: (i) ad_H is normal on the root space for the a-basis and
    seeded random combinations of it (a sampled test, since normality is
    not linear in H); i-conformal, (ad_H + ad_H^t) = 2 alpha(H) I on the
    root space for the a-basis (exact); (ii) [n, n] orthogonal to the
    root space; (iii) ad_H preserves the complement of the root space in
    n. When these pass the algebra is rewritten in an adapted basis and
    the main theorem check is run on it.
    """
    a_idx, n_idx = tuple(a_idx), tuple(n_idx)
    try:
        _validate_split(alg, a_idx, n_idx, tol)
    except BadDecomposition as exception:
        raise RootSpaceMismatch("Invalid splitting s = a + n") from exception
    frame = _root_frame(alg, a_idx, n_idx, root, tol)
    rest = complement_frame(alg, frame, block_frame(alg, n_idx))
    rng = np.random.default_rng(seed)

    operators = [ad_operator(alg, basis_vector(alg, h)) for h in a_idx]
    combos = list(np.eye(len(a_idx)))
    if a_idx:
        combos += list(rng.standard_normal((NORMALITY_SAMPLES, len(a_idx))))
    worst, witness = 0.0, None
    for weights in combos:
        operator = np.tensordot(weights, np.array(operators), axes=1)
        report = normality_report(compress(alg, operator, frame), tol)
        if report.commutator_norm > worst:
            worst, witness = report.commutator_norm, (np.asarray(weights),)
    items = [CheckItem(COND_I, worst <= tol, worst, witness)]

    worst, witness = 0.0, None
    for position, operator in enumerate(operators):
        block = compress(alg, operator, frame)
        defect = block + block.T - 2 * root.alpha[position] * np.eye(block.shape[0])
        size = float(np.linalg.norm(defect, 2))
        if size > worst:
            worst, witness = size, (a_idx[position],)
    items.append(CheckItem(COND_I_CONFORMAL, worst <= tol, worst, witness))

    worst, witness = 0.0, None
    for position, i in enumerate(n_idx):
        for j in n_idx[position + 1 :]:
            size = float(np.linalg.norm(alg.c[i, j] @ alg.gram @ frame.T))
            if size > worst:
                worst, witness = size, (i, j)
    items.append(CheckItem(COND_II, worst <= tol, worst, witness))

    worst, witness = 0.0, None
    for position, operator in enumerate(operators):
        for row in rest:
            size = float(np.linalg.norm((operator @ row) @ alg.gram @ frame.T))
            if size > worst:
                worst, witness = size, (a_idx[position], row)
    items.append(CheckItem(COND_III, worst <= tol, worst, witness))

    values = {}
    if all(item.passed for item in items):
        adapted = np.vstack([block_frame(alg, a_idx), rest, frame])
        labels = [alg.labels[h] for h in a_idx]
        labels += [f"K{p + 1}" for p in range(rest.shape[0])]
        labels += [f"M{p + 1}" for p in range(frame.shape[0])]
        induced_alg = change_basis(alg, adapted, labels)
        start = len(a_idx)
        middle = start + rest.shape[0]
        induced = check_morphism(
            induced_alg,
            Decomposition(range(start), range(start, middle), range(middle, alg.dim)),
            max(tol, 1e-9),
        )
        residual = max((item.residual for item in induced.items), default=0.0)
        detail = "" if induced.passed else "failed: " + ", ".join(induced.failed())
        items.append(CheckItem(COND_THEOREM, induced.passed, residual, detail=detail))
        values["induced"] = induced.to_dict()
    return CheckReport(items, values=values)


def build_carnot(
    layer_dims: Sequence[int],
    layer_brackets: Sequence[LayerBracket] = (),
    tol: float = DEFAULT_TOLERANCE,
) -> Tuple[MetricLieAlgebra, Decomposition]:
    """Carnot algebra a + n_1 + ... + n_k with ad_H = r on the layer n_r.

    Layer brackets are `(r, s, i, j, target)`: the bracket of the i-th vector
    of layer r with the j-th vector of layer s, with `target` its coordinates
    in layer r + s. Brackets landing beyond the last layer must vanish. The
    returned splitting has m = n_1 and k = n_2 + ... + n_k.
    """
    layer_dims = [int(size) for size in layer_dims]
    if not layer_dims or min(layer_dims) < 1:
        raise GradingViolation(f"Layer dimensions must be positive, got {layer_dims}")
    depth = len(layer_dims)
    offsets = np.concatenate([[1], 1 + np.cumsum(layer_dims)]).astype(int)
    dim = int(offsets[-1])

    def axis(layer: int, index: int) -> int:
        if not 1 <= layer <= depth or not 0 <= index < layer_dims[layer - 1]:
            raise GradingViolation(f"No vector {index} in layer {layer}")
        return int(offsets[layer - 1]) + index

    labels = ["H"] + [
        f"X{layer}_{index + 1}"
        for layer in range(1, depth + 1)
        for index in range(layer_dims[layer - 1])
    ]
    entries = [
        (0, axis(layer, index), axis(layer, index), float(layer))
        for layer in range(1, depth + 1)
        for index in range(layer_dims[layer - 1])
    ]
    for r, s, i, j, target in layer_brackets:
        left, right = axis(r, i), axis(s, j)
        target = np.asarray(target, dtype=float)
        if r + s > depth:
            if np.any(target):
                raise GradingViolation(
                    f"[n_{r}, n_{s}] must vanish beyond the last layer",
                    {"target": target.tolist()},
                )
            continue
        if target.shape != (layer_dims[r + s - 1],):
            raise GradingViolation(
                f"Target of [n_{r}, n_{s}] needs {layer_dims[r + s - 1]} coordinates"
            )
        for index, value in enumerate(target):
            if value:
                entries.append((left, right, axis(r + s, index), float(value)))

    alg = MetricLieAlgebra.from_entries(dim, entries, labels=labels)
    residual, triple = jacobi_residual(alg)
    if residual > tol:
        raise JacobiViolation(
            "Layer brackets violate the Jacobi identity",
            {"residual": residual, "triple": triple},
        )
    first = tuple(range(int(offsets[0]), int(offsets[1])))
    deeper = tuple(range(int(offsets[1]), dim))
    _LOGGER.debug("Built Carnot algebra with layers %s", layer_dims)
    return alg, Decomposition((0,), deeper, first)
