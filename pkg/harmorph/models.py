"""Models for metric Lie algebras and check reports."""
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import attr
import numpy as np
from scipy import linalg

from .const import SCHEMA_VERSION, VERDICT_FAIL, VERDICT_PASS
from .exceptions import (
    BadDecomposition,
    DuplicateEntry,
    FormatError,
    GramNotSPD,
    IndexOutOfRange,
    InvalidEntry,
)
from .polynomial import PolyExpr

Entry = Tuple[int, int, int, float]


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return np.stack([value.real, value.imag], axis=-1).tolist()
        return value.tolist()
    if isinstance(value, (tuple, list)):
        return [_jsonable(item) for item in value]
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    return value


@attr.s(frozen=True, eq=False)
class MetricLieAlgebra:
    """Structure constants and inner product of a metric Lie algebra.

    `c[i, j, k]` is the coefficient of `e_k` in `[e_i, e_j]`. The tensor is
    antisymmetric in its first two slots and the gram matrix is symmetric
    positive definite; both are checked on construction.
    """

    c: np.ndarray = attr.ib(converter=lambda c: np.array(c, dtype=float))
    gram: np.ndarray = attr.ib(
        default=None,
        converter=attr.converters.optional(lambda g: np.array(g, dtype=float)),
    )
    labels: Tuple[str, ...] = attr.ib(default=None)
    _gram_cho: Tuple[np.ndarray, bool] = attr.ib(init=False, repr=False)

    def __attrs_post_init__(self) -> None:
        dim = self.c.shape[0] if self.c.ndim == 3 else -1
        if dim < 1 or self.c.shape != (dim, dim, dim):
            raise IndexOutOfRange(f"Structure constants of shape {self.c.shape}")
        if not np.array_equal(self.c, -self.c.transpose(1, 0, 2)):
            raise InvalidEntry("Structure constants are not antisymmetric")

        gram = np.eye(dim) if self.gram is None else self.gram
        if gram.shape != (dim, dim):
            raise GramNotSPD(f"Gram matrix of shape {gram.shape} for dimension {dim}")
        if not np.allclose(gram, gram.T, rtol=0.0, atol=1e-12):
            raise GramNotSPD("Gram matrix is not symmetric")
        smallest = float(np.linalg.eigvalsh(gram).min())
        if smallest <= 0:
            raise GramNotSPD(
                "Gram matrix is not positive definite", {"smallest": smallest}
            )
        object.__setattr__(self, "gram", gram)

        labels = tuple(self.labels or (f"e{i}" for i in range(dim)))
        if len(labels) != dim:
            raise FormatError(f"Expected {dim} labels, got {len(labels)}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_gram_cho", linalg.cho_factor(gram))

    @property
    def dim(self) -> int:
        """Dimension of the algebra."""
        return int(self.c.shape[0])

    def gram_solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve `gram @ x = rhs` with the cached Cholesky factor."""
        return linalg.cho_solve(self._gram_cho, rhs)

    def inner(self, x: np.ndarray, y: np.ndarray) -> float:
        """Metric inner product of two coordinate vectors."""
        return float(np.asarray(x) @ self.gram @ np.asarray(y))

    @staticmethod
    def from_entries(
        dim: int,
        entries: Iterable[Entry],
        gram: Optional[Sequence[Sequence[float]]] = None,
        labels: Optional[Sequence[str]] = None,
    ) -> "MetricLieAlgebra":
        """Build an algebra from `(i, j, k, value)` entries of `[e_i, e_j]`."""
        if dim < 1:
            raise IndexOutOfRange(f"Dimension must be positive, got {dim}")
        seen: Dict[Tuple[int, int, int], float] = {}
        for i, j, k, value in entries:
            if not all(0 <= index < dim for index in (i, j, k)):
                raise IndexOutOfRange(f"Entry ({i}, {j}, {k}) outside dimension {dim}")
            value = float(value)
            if i == j:
                if value != 0:
                    raise InvalidEntry(f"[e{i}, e{i}] must vanish, got {value}")
                continue
            if i > j:
                i, j, value = j, i, -value
            previous = seen.get((i, j, k))
            if previous is not None and previous != value:
                raise DuplicateEntry(
                    f"Conflicting values for [e{i}, e{j}] along e{k}",
                    {"first": previous, "second": value},
                )
            seen[(i, j, k)] = value

        c = np.zeros((dim, dim, dim))
        for (i, j, k), value in seen.items():
            c[i, j, k] = value
            c[j, i, k] = -value
        return MetricLieAlgebra(c, gram, labels)

    @staticmethod
    def from_dict(data: Mapping[str, Any]) -> "MetricLieAlgebra":
        """Return an algebra from its JSON document."""
        try:
            dim = int(data["dim"])
            entries = []
            for bracket in data.get("brackets", []):
                i, j = int(bracket["i"]), int(bracket["j"])
                if i >= j:
                    raise FormatError(f"Bracket entries need i < j, got ({i}, {j})")
                for k, value in bracket["coeffs"].items():
                    entries.append((i, j, int(k), float(value)))
        except (KeyError, TypeError, ValueError, AttributeError) as exception:
            raise FormatError("Malformed algebra document") from exception
        return MetricLieAlgebra.from_entries(
            dim, entries, data.get("gram"), data.get("labels")
        )

    def to_dict(self) -> Dict[str, Any]:
        """Return the JSON document of this algebra."""
        brackets = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                coeffs = {
                    str(k): float(self.c[i, j, k])
                    for k in range(self.dim)
                    if self.c[i, j, k] != 0
                }
                if coeffs:
                    brackets.append({"i": i, "j": j, "coeffs": coeffs})
        data: Dict[str, Any] = {
            "dim": self.dim,
            "labels": list(self.labels),
            "brackets": brackets,
        }
        if not np.array_equal(self.gram, np.eye(self.dim)):
            data["gram"] = self.gram.tolist()
        return data


@attr.s(auto_attribs=True, frozen=True)
class Decomposition:
    """Orthogonal splitting g = a + k + m by blocks of basis indices."""

    a_idx: Tuple[int, ...] = attr.ib(converter=tuple, default=())
    k_idx: Tuple[int, ...] = attr.ib(converter=tuple, default=())
    m_idx: Tuple[int, ...] = attr.ib(converter=tuple, default=())

    @property
    def n_idx(self) -> Tuple[int, ...]:
        """Indices of n = k + m."""
        return self.k_idx + self.m_idx

    @property
    def vertical_idx(self) -> Tuple[int, ...]:
        """Indices of the fibre directions a + k."""
        return self.a_idx + self.k_idx

    def validate(self, alg: MetricLieAlgebra, tol: float) -> None:
        """Raise BadDecomposition unless the blocks split `alg` orthogonally."""
        blocks = (self.a_idx, self.k_idx, self.m_idx)
        flat = [index for block in blocks for index in block]
        if sorted(flat) != list(range(alg.dim)):
            raise BadDecomposition(
                "Blocks must partition the basis", {"indices": flat, "dim": alg.dim}
            )
        for first in range(3):
            for second in range(first + 1, 3):
                if not blocks[first] or not blocks[second]:
                    continue
                cross = alg.gram[np.ix_(blocks[first], blocks[second])]
                if np.abs(cross).max() > tol:
                    raise BadDecomposition(
                        "Blocks are not orthogonal",
                        {"cross": float(np.abs(cross).max())},
                    )

    @staticmethod
    def from_dict(data: Mapping[str, Any]) -> "Decomposition":
        """Return a decomposition from the `decomposition` JSON block."""
        try:
            return Decomposition(
                [int(i) for i in data.get("a", [])],
                [int(i) for i in data.get("k", [])],
                [int(i) for i in data.get("m", [])],
            )
        except (TypeError, ValueError, AttributeError) as exception:
            raise FormatError("Malformed decomposition") from exception

    def to_dict(self) -> Dict[str, List[int]]:
        """Return the `decomposition` JSON block."""
        return {"a": list(self.a_idx), "k": list(self.k_idx), "m": list(self.m_idx)}


@attr.s(frozen=True, eq=False)
class Subspace:
    """Subspace spanned by gram-orthonormal coordinate vectors (rows)."""

    basis: np.ndarray = attr.ib(converter=lambda b: np.array(b, dtype=float))

    @property
    def rank(self) -> int:
        """Number of basis vectors."""
        return int(self.basis.shape[0])


@attr.s(frozen=True, eq=False)
class ConformalSplit:
    """Split of an operator as `lam * I + skew + remainder`."""

    lam: float = attr.ib()
    skew: np.ndarray = attr.ib()
    residual: float = attr.ib()
    witness: Optional[Tuple[np.ndarray, np.ndarray]] = attr.ib(default=None)


@attr.s(frozen=True)
class CheckItem:
    """Verdict on one condition."""

    condition: str = attr.ib()
    passed: bool = attr.ib()
    residual: float = attr.ib(converter=float)
    witness: Optional[Tuple[Any, ...]] = attr.ib(default=None, eq=False)
    detail: str = attr.ib(default="")

    def to_dict(self) -> Dict[str, Any]:
        """Return the JSON form of this item."""
        return {
            "condition": self.condition,
            "passed": bool(self.passed),
            "residual": self.residual,
            "witness": _jsonable(self.witness),
            "detail": self.detail,
        }


@attr.s(frozen=True)
class CheckReport:
    """Per-condition verdicts; passes iff every item passes."""

    items: Tuple[CheckItem, ...] = attr.ib(converter=tuple)
    notes: Tuple[str, ...] = attr.ib(converter=tuple, default=())
    values: Dict[str, Any] = attr.ib(factory=dict, eq=False)

    @property
    def verdict(self) -> str:
        """`pass` when every item passed, `fail` otherwise."""
        return VERDICT_PASS if all(item.passed for item in self.items) else VERDICT_FAIL

    @property
    def passed(self) -> bool:
        """Return True when the verdict is pass."""
        return self.verdict == VERDICT_PASS

    def item(self, condition: str) -> CheckItem:
        """Return the item for a condition id."""
        for item in self.items:
            if item.condition == condition:
                return item
        raise KeyError(condition)

    def failed(self) -> Tuple[str, ...]:
        """Ids of the failing conditions."""
        return tuple(item.condition for item in self.items if not item.passed)

    def to_dict(self) -> Dict[str, Any]:
        """Return the JSON form of this report."""
        return {
            "verdict": self.verdict,
            "items": [item.to_dict() for item in self.items],
            "notes": list(self.notes),
            "values": _jsonable(self.values),
        }


@attr.s(frozen=True, eq=False)
class IsotropicFrame:
    """Complex vectors spanning an isotropic subspace of C^m."""

    vectors: np.ndarray = attr.ib(converter=lambda v: np.array(v, dtype=complex))

    def products(self) -> np.ndarray:
        """Matrix of complex-bilinear products (v_i, v_j)."""
        return self.vectors @ self.vectors.T


@attr.s(frozen=True, eq=False)
class ConnectionCoeffs:
    """Lowered Levi-Civita coefficients `gamma[i, j, k] = <nabla_ei ej, ek>`."""

    gamma: np.ndarray = attr.ib()


@attr.s(frozen=True, eq=False)
class ScanResult:
    """Largest sectional curvature found by a seeded scan."""

    max_k: float = attr.ib()
    witness: Tuple[np.ndarray, np.ndarray] = attr.ib()
    samples_used: int = attr.ib()

    def to_dict(self) -> Dict[str, Any]:
        """Return the JSON form of this scan."""
        return {
            "max_k": self.max_k,
            "witness": _jsonable(self.witness),
            "samples_used": self.samples_used,
        }


@attr.s(frozen=True, eq=False)
class RootSpace:
    """Real generalized root space for the root `alpha +- i beta`."""

    alpha: np.ndarray = attr.ib()
    beta: np.ndarray = attr.ib()
    basis: np.ndarray = attr.ib()
    generalized_order: int = attr.ib()

    @property
    def dim(self) -> int:
        """Dimension of the root space."""
        return int(self.basis.shape[0])

    def to_dict(self) -> Dict[str, Any]:
        """Return the JSON form of this root space."""
        return {
            "alpha": _jsonable(self.alpha),
            "beta": _jsonable(self.beta),
            "dim": self.dim,
            "basis": _jsonable(self.basis),
            "generalized_order": self.generalized_order,
        }


@attr.s(auto_attribs=True, frozen=True)
class NormalityReport:
    """Normality and almost-normality of a complex operator."""

    is_normal: bool
    is_almost_normal: bool
    commutator_norm: float
    min_eig_N: float

    def to_dict(self) -> Dict[str, Any]:
        """Return the JSON form of this report."""
        return attr.asdict(self)


Brackets = Dict[Tuple[int, int], Dict[int, PolyExpr]]


@attr.s(frozen=True, eq=False)
class ParametricAlgebra:
    """Structure constants given as polynomials in named parameters.

    Only brackets with `i < j` are stored; the others follow by
    antisymmetry, so antisymmetry holds exactly.
    """

    dim: int = attr.ib()
    params: Tuple[str, ...] = attr.ib(converter=tuple)
    brackets: Brackets = attr.ib()
    labels: Tuple[str, ...] = attr.ib(default=None)

    def __attrs_post_init__(self) -> None:
        cleaned: Brackets = {}
        for (i, j), coeffs in self.brackets.items():
            if not all(0 <= index < self.dim for index in (i, j, *coeffs)):
                raise IndexOutOfRange(
                    f"Bracket ({i}, {j}) outside dimension {self.dim}"
                )
            if i == j:
                if any(not p.is_zero for p in coeffs.values()):
                    raise InvalidEntry(f"[e{i}, e{i}] must vanish")
                continue
            sign = 1
            if i > j:
                i, j, sign = j, i, -1
            target = cleaned.setdefault((i, j), {})
            for k, poly in coeffs.items():
                if poly.params != self.params:
                    raise FormatError("Coefficient over foreign parameters")
                if k in target and target[k] != sign * poly:
                    raise DuplicateEntry(
                        f"Conflicting values for [e{i}, e{j}] along e{k}"
                    )
                if not poly.is_zero:
                    target[k] = sign * poly
        object.__setattr__(self, "brackets", cleaned)
        labels = tuple(self.labels or (f"e{i}" for i in range(self.dim)))
        if len(labels) != self.dim:
            raise FormatError(f"Expected {self.dim} labels, got {len(labels)}")
        object.__setattr__(self, "labels", labels)

    def coefficient(self, i: int, j: int, k: int) -> PolyExpr:
        """Coefficient of e_k in [e_i, e_j]."""
        if i == j:
            return PolyExpr.zero(self.params)
        if i < j:
            return self.brackets.get((i, j), {}).get(k, PolyExpr.zero(self.params))
        return -self.brackets.get((j, i), {}).get(k, PolyExpr.zero(self.params))

    def bracket_vector(self, i: int, j: int) -> List[PolyExpr]:
        """All coefficients of [e_i, e_j]."""
        return [self.coefficient(i, j, k) for k in range(self.dim)]

    @staticmethod
    def from_dict(data: Mapping[str, Any]) -> "ParametricAlgebra":
        """Return a parametric algebra from its ansatz JSON document."""
        try:
            dim = int(data["dim"])
            params = tuple(str(name) for name in data.get("params", []))
            brackets: Brackets = {}
            for bracket in data.get("brackets", []):
                i, j = int(bracket["i"]), int(bracket["j"])
                if i >= j:
                    raise FormatError(f"Bracket entries need i < j, got ({i}, {j})")
                brackets[(i, j)] = {
                    int(k): PolyExpr.parse(str(text), params)
                    for k, text in bracket["coeffs"].items()
                }
        except (KeyError, TypeError, ValueError, AttributeError) as exception:
            raise FormatError("Malformed ansatz document") from exception
        return ParametricAlgebra(dim, params, brackets, data.get("labels"))

    def to_dict(self) -> Dict[str, Any]:
        """Return the ansatz JSON document."""
        brackets = [
            {
                "i": i,
                "j": j,
                "coeffs": {str(k): str(poly) for k, poly in sorted(coeffs.items())},
            }
            for (i, j), coeffs in sorted(self.brackets.items())
            if coeffs
        ]
        return {
            "dim": self.dim,
            "labels": list(self.labels),
            "params": list(self.params),
            "brackets": brackets,
        }


@attr.s(frozen=True)
class Inequality:
    """Strict polynomial inequality `lhs < rhs`."""

    id: str = attr.ib()
    lhs: PolyExpr = attr.ib()
    rhs: PolyExpr = attr.ib()


@attr.s(frozen=True)
class FamilySpec:
    """A catalog family: bracket table, splitting, constraints and sample."""

    id: str = attr.ib()
    title: str = attr.ib()
    dims: Tuple[Optional[int], Optional[int], Optional[int]] = attr.ib()
    params: Tuple[Tuple[str, str], ...] = attr.ib(converter=tuple)
    constraints: Tuple[PolyExpr, ...] = attr.ib(converter=tuple)
    curvature_predicate: Optional[str] = attr.ib(default=None)
    sample: Dict[str, Any] = attr.ib(factory=dict, eq=False)
    needs_n: bool = attr.ib(default=False)
    notes: str = attr.ib(default="")

    @property
    def free(self) -> Tuple[str, ...]:
        """Names of the requested parameters."""
        return tuple(name for name, _ in self.params)

    def to_dict(self) -> Dict[str, Any]:
        """Return the JSON listing form of this family."""
        return {
            "id": self.id,
            "title": self.title,
            "dims": list(self.dims),
            "params": [{"name": name, "range": rng} for name, rng in self.params],
            "constraints": [str(poly) for poly in self.constraints],
            "curvature_predicate": self.curvature_predicate,
            "sample": {key: str(value) for key, value in self.sample.items()},
            "needs_n": self.needs_n,
            "notes": self.notes,
        }


@attr.s(frozen=True)
class Report:
    """Outcome of one CLI command."""

    command: str = attr.ib()
    verdict: str = attr.ib()
    items: Tuple[Dict[str, Any], ...] = attr.ib(converter=tuple, default=())
    tolerance: float = attr.ib(default=0.0)
    seed: Optional[int] = attr.ib(default=None)
    data: Dict[str, Any] = attr.ib(factory=dict, eq=False)

    def to_dict(self) -> Dict[str, Any]:
        """Return the versioned JSON object of this report."""
        return {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "verdict": self.verdict,
            "items": _jsonable(list(self.items)),
            "tolerance": self.tolerance,
            "seed": self.seed,
            "data": _jsonable(self.data),
        }
