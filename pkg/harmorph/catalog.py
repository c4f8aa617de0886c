"""Catalog of metric Lie algebras carrying harmonic morphisms to C.

Each family bundles a bracket table in an orthonormal basis, its splitting
g = a + k + m, the relations its free parameters must satisfy and, where
known, polynomial inequalities guaranteeing non-positive curvature.
Parameters that are eliminated by the Jacobi identity are computed from
the free ones and cannot be passed in.
"""
import logging
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import attr
import numpy as np

from .const import DEFAULT_TOLERANCE
from .exceptions import (
    BranchUnsolvable,
    ConstraintViolated,
    DegenerateBranch,
    FormatError,
    MissingParameter,
    NoPredicate,
    TooSmall,
    UnknownFamily,
)
from .models import (
    Decomposition,
    FamilySpec,
    Inequality,
    MetricLieAlgebra,
    ParametricAlgebra,
)
from .polynomial import Number, PolyExpr, to_fraction
from .rootspace import build_carnot
from .symbolic import random_rational, substitute, variety_point

_LOGGER = logging.getLogger(__name__)

# Rows are (left, right, {target: coefficient}) over the labels.
Row = Tuple[str, str, Dict[str, str]]

PREDICATE_ATTEMPTS = 100_000
PREDICATE_BOX = 2.0

_ROTATION_A = [
    ("A", "Z", {"Z": "alpha", "W": "beta"}),
    ("A", "W", {"Z": "-beta", "W": "alpha"}),
]
_ROTATION_B = [
    ("B", "Z", {"Z": "x", "W": "y"}),
    ("B", "W", {"Z": "-y", "W": "x"}),
]
_FIBRE_ACTION = [
    ("X", "Y", {"X": "z", "Y": "w"}),
    ("Z", "X", {"X": "r", "Y": "s"}),
    ("Z", "Y", {"X": "t", "Y": "-r"}),
    ("W", "X", {"X": "rho", "Y": "sigma"}),
    ("W", "Y", {"X": "tau", "Y": "-rho"}),
    ("Z", "W", {"X": "theta"}),
]

_SECTIONS: Dict[str, Tuple[Tuple[str, ...], Tuple[str, ...], List[Row]]] = {
    "2-0-2": (
        ("A", "B", "Z", "W"),
        ("a", "b", "alpha", "beta", "x", "y"),
        [("A", "B", {"A": "a", "B": "b"})] + _ROTATION_A + _ROTATION_B,
    ),
    "1-1-2": (
        ("A", "X", "Z", "W"),
        ("lambda", "alpha", "beta", "theta"),
        [("A", "X", {"X": "lambda"}), ("Z", "W", {"X": "theta"})] + _ROTATION_A,
    ),
    "0-2-2": (
        ("X", "Y", "Z", "W"),
        ("z", "w", "r", "s", "t", "rho", "sigma", "tau", "theta"),
        _FIBRE_ACTION,
    ),
    "2-1-2": (
        ("A", "B", "X", "Z", "W"),
        ("a", "b", "lambda", "mu", "alpha", "beta", "x", "y", "theta"),
        [
            ("A", "B", {"A": "a", "B": "b"}),
            ("A", "X", {"X": "lambda"}),
            ("B", "X", {"X": "mu"}),
            ("Z", "W", {"X": "theta"}),
        ]
        + _ROTATION_A
        + _ROTATION_B,
    ),
    "1-2-2": (
        ("A", "X", "Y", "Z", "W"),
        (
            "gamma", "delta", "c", "d", "alpha", "beta",
            "z", "w", "r", "s", "t", "rho", "sigma", "tau", "theta",
        ),
        [
            ("A", "X", {"X": "gamma", "Y": "delta"}),
            ("A", "Y", {"X": "c", "Y": "d"}),
        ]
        + _ROTATION_A
        + _FIBRE_ACTION,
    ),
}

ANSATZ_NAMES = tuple(_SECTIONS) + ("1-n-2/ex1", "1-n-2/ex2", "carnot")


def _table(
    labels: Sequence[str], params: Sequence[str], rows: Sequence[Row]
) -> ParametricAlgebra:
    position = {label: index for index, label in enumerate(labels)}
    brackets: Dict[Tuple[int, int], Dict[int, PolyExpr]] = {}
    for left, right, targets in rows:
        brackets[(position[left], position[right])] = {
            position[target]: PolyExpr.parse(text, params)
            for target, text in targets.items()
        }
    return ParametricAlgebra(len(labels), params, brackets, labels)


def _fibre_params(n: int) -> Tuple[str, ...]:
    return tuple(f"c_{k}_{j}" for k in range(1, n + 1) for j in range(1, n + 1))


def _check_n(n: Optional[int]) -> int:
    if n is None:
        raise MissingParameter("This family needs the dimension n")
    if int(n) < 1:
        raise TooSmall(f"n must be at least 1, got {n}")
    return int(n)


def ansatz(name: str, n: int = 1) -> ParametricAlgebra:
    """Parametric bracket table of a section, in an orthonormal basis."""
    if name in _SECTIONS:
        labels, params, rows = _SECTIONS[name]
        return _table(labels, params, rows)
    if name not in ANSATZ_NAMES:
        raise UnknownFamily(f"Unknown ansatz {name!r}", ANSATZ_NAMES)
    n = _check_n(n)
    if name == "carnot":
        labels = ("H",) + tuple(f"X1_{i}" for i in range(1, 2 * n + 1)) + ("X2_1",)
        rows = [("H", f"X1_{i}", {f"X1_{i}": "1"}) for i in range(1, 2 * n + 1)]
        rows.append(("H", "X2_1", {"X2_1": "2"}))
        rows += [
            (f"X1_{2 * i - 1}", f"X1_{2 * i}", {"X2_1": "theta"})
            for i in range(1, n + 1)
        ]
        return _table(labels, ("theta",), rows)

    fibres = tuple(f"X{k}" for k in range(1, n + 1))
    labels = ("A",) + fibres + ("Z", "W")
    if name == "1-n-2/ex1":
        params = ("alpha", "beta") + _fibre_params(n)
        rows = [
            ("A", f"X{k}", {f"X{j}": f"c_{k}_{j}" for j in range(1, n + 1)})
            for k in range(1, n + 1)
        ]
    else:
        params = ("alpha", "beta")
        rows = [("A", fibre, {fibre: "1"}) for fibre in fibres]
        rows.append(("Z", "W", {"X1": "1"}))
    return _table(labels, params, rows + _ROTATION_A)


@attr.s(frozen=True)
class _Family:
    """Catalog entry: listing data plus how to build the algebra."""

    spec: FamilySpec = attr.ib()
    section: str = attr.ib()
    derived: Dict[str, Tuple[str, Optional[str]]] = attr.ib(factory=dict)
    predicate: Tuple[Inequality, ...] = attr.ib(default=())


def _ranges(
    names: str, denominators: Sequence[str] = ()
) -> Tuple[Tuple[str, str], ...]:
    return tuple(
        (name, "nonzero real" if name in denominators else "real")
        for name in names.split()
    )


def _inequalities(free: Sequence[str], texts: Sequence[str]) -> Tuple[Inequality, ...]:
    result = []
    for text in texts:
        lhs, rhs = text.split("<")
        result.append(
            Inequality(text, PolyExpr.parse(lhs, free), PolyExpr.parse(rhs, free))
        )
    return tuple(result)


def _family(
    family_id: str,
    title: str,
    dims: Tuple[Optional[int], Optional[int], Optional[int]],
    section: str,
    free: str,
    sample: Dict[str, Any],
    derived: Optional[Dict[str, Tuple[str, Optional[str]]]] = None,
    constraints: Sequence[str] = (),
    predicate: Optional[Sequence[str]] = None,
    denominators: Sequence[str] = (),
    notes: str = "",
) -> _Family:
    params = _ranges(free, denominators)
    names = tuple(name for name, _ in params)
    spec = FamilySpec(
        family_id,
        title,
        dims,
        params,
        [PolyExpr.parse(text, names) for text in constraints],
        None if predicate is None else family_id,
        sample,
        needs_n=section.startswith("1-n-2") or section == "carnot",
        notes=notes,
    )
    return _Family(spec, section, derived or {}, _inequalities(names, predicate or ()))


_ONE = Fraction(1)
_HALF = Fraction(1, 2)

_FAMILIES: Tuple[_Family, ...] = (
    _family(
        "case-2-0-2",
        "dim(a,k,m) = (2,0,2)",
        (2, 0, 2),
        "2-0-2",
        "a b alpha beta x y",
        {"a": _ONE, "b": _ONE, "alpha": _ONE, "beta": _ONE, "x": -_ONE, "y": -_ONE},
        constraints=["a*alpha + b*x", "a*beta + b*y"],
        notes="a generates a totally geodesic foliation; m is integrable",
    ),
    _family(
        "case-1-1-2",
        "dim(a,k,m) = (1,1,2)",
        (1, 1, 2),
        "1-1-2",
        "lambda alpha beta theta",
        {"theta": _ONE, "lambda": _ONE, "alpha": _HALF, "beta": 0},
        constraints=["theta*lambda - 2*theta*alpha"],
        notes="m is integrable iff theta = 0",
    ),
    _family(
        "case-0-2-2/ex1",
        "dim(a,k,m) = (0,2,2), first example",
        (0, 2, 2),
        "0-2-2",
        "z w t tau",
        {"z": _ONE, "w": _ONE, "t": _ONE, "tau": _ONE},
        derived={
            "r": ("-w*t", "z"),
            "s": ("-w^2*t", "z^2"),
            "rho": ("-w*tau", "z"),
            "sigma": ("-w^2*tau", "z^2"),
        },
        denominators=["z"],
    ),
    _family(
        "case-0-2-2/ex2",
        "dim(a,k,m) = (0,2,2), second example",
        (0, 2, 2),
        "0-2-2",
        "w s sigma",
        {"w": _ONE, "s": _ONE, "sigma": _ONE},
    ),
    _family(
        "case-0-2-2/ex3",
        "dim(a,k,m) = (0,2,2), third example",
        (0, 2, 2),
        "0-2-2",
        "r s t rho theta",
        {"r": _ONE, "s": _ONE, "t": _ONE, "rho": _ONE, "theta": _ONE},
        derived={"sigma": ("s*rho", "r"), "tau": ("t*rho", "r")},
        denominators=["r"],
    ),
    _family(
        "case-0-2-2/ex4",
        "dim(a,k,m) = (0,2,2), fourth example",
        (0, 2, 2),
        "0-2-2",
        "s t sigma theta",
        {"s": _ONE, "t": _ONE, "sigma": _ONE, "theta": _ONE},
        derived={"tau": ("t*sigma", "s")},
        denominators=["s"],
    ),
    _family(
        "case-0-2-2/ex5",
        "dim(a,k,m) = (0,2,2), fifth example",
        (0, 2, 2),
        "0-2-2",
        "rho sigma tau theta",
        {"rho": _ONE, "sigma": _ONE, "tau": _ONE, "theta": _ONE},
    ),
    _family(
        "case-0-2-2/ex6",
        "dim(a,k,m) = (0,2,2), sixth example",
        (0, 2, 2),
        "0-2-2",
        "t tau theta",
        {"t": _ONE, "tau": _ONE, "theta": _ONE},
    ),
    _family(
        "case-2-1-2/ex1",
        "dim(a,k,m) = (2,1,2), first example",
        (2, 1, 2),
        "2-1-2",
        "a b mu x y",
        {"a": _ONE, "b": _ONE, "mu": 2 * _ONE, "x": 2 * _ONE, "y": 0},
        derived={
            "lambda": ("-b*mu", "a"),
            "alpha": ("-b*x", "a"),
            "beta": ("-b*y", "a"),
        },
        predicate=[
            "a^3 < b^2*mu",
            "a^3 < b^2*x",
            "b^2 < a*mu",
            "b^2 < a*x",
            "0 < a",
            "0 < mu",
            "0 < x",
        ],
        denominators=["a"],
    ),
    _family(
        "case-2-1-2/ex2",
        "dim(a,k,m) = (2,1,2), second example",
        (2, 1, 2),
        "2-1-2",
        "a b x y theta",
        {"a": _ONE, "b": _ONE, "x": 2 * _ONE, "y": 0, "theta": _ONE},
        derived={
            "lambda": ("-2*b*x", "a"),
            "mu": ("2*x", None),
            "alpha": ("-b*x", "a"),
            "beta": ("-b*y", "a"),
        },
        predicate=[
            "theta^2*a^2 < 8*x^2*a^2 + 8*x^2*b^2",
            "a^3 < b^2*x",
            "b^2 < a*x",
            "0 < a",
            "0 < x",
        ],
        denominators=["a"],
    ),
    _family(
        "case-2-1-2/ex3",
        "dim(a,k,m) = (2,1,2), third example",
        (2, 1, 2),
        "2-1-2",
        "alpha beta x y theta",
        {"alpha": _ONE, "beta": 0, "x": _ONE, "y": 0, "theta": _ONE},
        derived={"lambda": ("2*alpha", None), "mu": ("2*x", None)},
        predicate=["theta^2 < 8*x^2 + 8*alpha^2"],
        notes="curvature bound read as theta^2 < 8(x^2 + alpha^2)",
    ),
    _family(
        "case-2-1-2/ex4",
        "dim(a,k,m) = (2,1,2), fourth example",
        (2, 1, 2),
        "2-1-2",
        "b alpha beta theta",
        {"b": _ONE, "alpha": _ONE, "beta": 0, "theta": _ONE},
        derived={"lambda": ("2*alpha", None)},
        predicate=["0 < alpha*b", "theta^2 < 8*alpha^2"],
    ),
    _family(
        "case-2-1-2/ex5",
        "dim(a,k,m) = (2,1,2), fifth example",
        (2, 1, 2),
        "2-1-2",
        "lambda mu alpha beta x y",
        {"lambda": _ONE, "mu": _ONE, "alpha": _ONE, "beta": 0, "x": _ONE, "y": 0},
        predicate=["0 < mu*x + lambda*alpha"],
    ),
    _family(
        "case-2-1-2/ex6",
        "dim(a,k,m) = (2,1,2), sixth example",
        (2, 1, 2),
        "2-1-2",
        "b lambda alpha beta",
        {"b": _ONE, "lambda": _ONE, "alpha": _ONE, "beta": 0},
        predicate=["0 < alpha*b", "0 < alpha*lambda", "0 < b*lambda"],
    ),
    _family(
        "case-1-2-2/ex1",
        "dim(a,k,m) = (1,2,2), first example",
        (1, 2, 2),
        "1-2-2",
        "d r rho theta",
        {"d": _ONE, "r": _ONE, "rho": _ONE, "theta": _ONE},
        notes="no curvature predicate is known for this family",
    ),
    _family(
        "case-1-2-2/ex2",
        "dim(a,k,m) = (1,2,2), second example",
        (1, 2, 2),
        "1-2-2",
        "alpha r rho theta",
        {"alpha": _ONE, "r": _HALF, "rho": _HALF, "theta": _ONE},
        derived={
            "gamma": ("2*alpha", None),
            "c": ("alpha", None),
            "d": ("3*alpha", None),
            "s": ("r", None),
            "t": ("-r", None),
            "sigma": ("rho", None),
            "tau": ("-rho", None),
        },
        predicate=[
            "4*rho^2 + 4*r^2 < 23*alpha^2",
            "theta^2 < 8*alpha^2 + 4*r^2",
            "theta^2 < 8*alpha^2 + 4*rho^2",
        ],
    ),
    _family(
        "case-1-2-2/ex3",
        "dim(a,k,m) = (1,2,2), third example",
        (1, 2, 2),
        "1-2-2",
        "alpha c t tau theta",
        {"alpha": _ONE, "c": _ONE, "t": _ONE, "tau": _ONE, "theta": _ONE},
        derived={"gamma": ("2*alpha", None), "d": ("alpha", None)},
        predicate=[
            "c^2 < 16*alpha^2",
            "theta^2 + tau^2 < 8*alpha^2",
            "theta^2 + t^2 < 8*alpha^2",
            "t^2 + tau^2 + c^2 < 8*alpha^2",
        ],
    ),
    _family(
        "case-1-2-2/ex4",
        "dim(a,k,m) = (1,2,2), fourth example",
        (1, 2, 2),
        "1-2-2",
        "alpha s sigma theta",
        {"alpha": _ONE, "s": _ONE, "sigma": _ONE, "theta": _ONE},
        derived={"gamma": ("2*alpha", None), "d": ("3*alpha", None)},
        predicate=[
            "s^2 < 12*alpha^2",
            "sigma^2 < 12*alpha^2",
            "theta^2 < 3*s^2 + 8*alpha^2",
            "theta^2 < 3*sigma^2 + 8*alpha^2",
        ],
    ),
    _family(
        "case-1-2-2/ex5",
        "dim(a,k,m) = (1,2,2), fifth example",
        (1, 2, 2),
        "1-2-2",
        "alpha r s theta",
        {"alpha": _ONE, "r": _ONE, "s": _ONE, "theta": _ONE},
        derived={
            "gamma": ("2*alpha", None),
            "c": ("alpha*r", "s"),
            "d": ("3*alpha", None),
            "t": ("-r^2", "s"),
        },
        predicate=[
            "r^2 < 16*s^2",
            "theta^2 < 8*alpha^2",
            "2*r^2*s^2 + r^4 + alpha^2*r^2 + s^4 < 24*alpha^2*s^2",
            "theta^2*s^2 + r^4 < 3*s^4 + 2*r^2*s^2 + 8*alpha^2*s^2",
            "s^4 < 12*alpha^2*s^2 + 2*r^2*s^2 + 3*r^4",
        ],
        denominators=["s"],
    ),
    _family(
        "case-1-n-2/ex1",
        "dim(a,k,m) = (1,n,2), first example",
        (1, None, 2),
        "1-n-2/ex1",
        "alpha beta",
        {"alpha": _ONE, "beta": _HALF, "c_1_1": _ONE},
        notes="the entries c_k_j of ad_A on k are optional and default to 0",
    ),
    _family(
        "case-1-n-2/ex2",
        "dim(a,k,m) = (1,n,2), second example",
        (1, None, 2),
        "1-n-2/ex2",
        "beta",
        {"beta": 0},
        derived={"alpha": ("1/2", None)},
        predicate=[],
        notes="the Jacobi identity forces alpha = 1/2; no curvature conditions",
    ),
    _family(
        "carnot",
        "Heisenberg-type Carnot algebra with n pairs",
        (1, 1, None),
        "carnot",
        "theta",
        {"theta": _ONE},
        notes="layers of dimension (2n, 1) with [Z_i, W_i] = theta X",
    ),
)

_BY_ID = {family.spec.id: family for family in _FAMILIES}


def list_families() -> List[FamilySpec]:
    """All catalog families in a stable order."""
    return [family.spec for family in _FAMILIES]


def _lookup(family_id: str) -> _Family:
    try:
        return _BY_ID[family_id]
    except KeyError:
        raise UnknownFamily(f"Unknown family {family_id!r}", sorted(_BY_ID)) from None


def get_family(family_id: str) -> FamilySpec:
    """Return the listing of one family."""
    return _lookup(family_id).spec


def _is_zero(value: Number) -> bool:
    if isinstance(value, Fraction):
        return value == 0
    return abs(value) <= DEFAULT_TOLERANCE


def _normalize_values(values: Mapping[str, Any]) -> Dict[str, Number]:
    converted: Dict[str, Number] = {}
    for name, value in values.items():
        if isinstance(value, (int, Fraction, str)):
            converted[name] = to_fraction(value)
        else:
            converted[name] = float(value)
    return converted


def _free_values(
    family: _Family, values: Mapping[str, Any], n: Optional[int]
) -> Dict[str, Number]:
    values = _normalize_values(values)
    optional = set(_fibre_params(n)) if family.section == "1-n-2/ex1" and n else set()
    free = family.spec.free
    for name in values:
        if name in family.derived:
            raise FormatError(f"{name} is computed from the free parameters")
        if name not in free and name not in optional:
            raise FormatError(f"Unknown parameter {name!r} for {family.spec.id}", free)
    missing = [name for name in free if name not in values]
    if missing:
        raise MissingParameter(f"No value for {', '.join(missing)}", missing)
    return values


def _full_values(
    family: _Family, free_values: Mapping[str, Number], params: Sequence[str]
) -> Dict[str, Number]:
    names = family.spec.free
    for constraint in family.spec.constraints:
        if not _is_zero(constraint.evaluate(free_values)):
            raise ConstraintViolated(
                f"{family.spec.id} requires {constraint} = 0", str(constraint)
            )
    full: Dict[str, Number] = {name: Fraction(0) for name in params}
    full.update(free_values)
    scope = tuple(names)
    for name, (numerator, denominator) in family.derived.items():
        value = PolyExpr.parse(numerator, scope).evaluate(free_values)
        if denominator is not None:
            below = PolyExpr.parse(denominator, scope).evaluate(free_values)
            if _is_zero(below):
                raise DegenerateBranch(
                    f"{family.spec.id} is undefined where {denominator} = 0",
                    denominator,
                )
            value = value / below
        full[name] = value
    return full


def instantiate(
    family_id: str, values: Mapping[str, Any], n: Optional[int] = None
) -> Tuple[MetricLieAlgebra, Decomposition]:
    """Build a family member at the given free parameter values.

    Rational inputs are handled exactly; the constraints must then hold
    exactly, and within the default tolerance for float inputs.
    """
    family = _lookup(family_id)
    if family.spec.needs_n:
        n = _check_n(n)
    free_values = _free_values(family, values, n)

    if family.section == "carnot":
        assert n is not None
        theta = float(free_values["theta"])
        brackets = [(1, 1, 2 * i, 2 * i + 1, [theta]) for i in range(n)]
        alg, d = build_carnot([2 * n, 1], brackets)
        _LOGGER.debug("Instantiated %s with n=%d", family_id, n)
        return alg, d

    p = ansatz(family.section, n or 1)
    full = _full_values(family, free_values, p.params)
    alg = substitute(p, full)
    a_dim = family.spec.dims[0] or 0
    m_dim = family.spec.dims[2] or 0
    d = Decomposition(
        range(a_dim), range(a_dim, alg.dim - m_dim), range(alg.dim - m_dim, alg.dim)
    )
    _LOGGER.debug("Instantiated %s at %s", family_id, free_values)
    return alg, d


def export_family(
    family_id: str, values: Mapping[str, Any], n: Optional[int] = None
) -> Dict[str, Any]:
    """Algebra JSON document of a family member, with its splitting."""
    alg, d = instantiate(family_id, values, n)
    data = alg.to_dict()
    data["decomposition"] = d.to_dict()
    return data


def export_ansatz(name: str, n: int = 1) -> Dict[str, Any]:
    """Ansatz JSON document of a section bracket table."""
    return ansatz(name, n).to_dict()


def hadamard_predicate(
    family_id: str, values: Mapping[str, Any]
) -> Tuple[bool, List[Tuple[str, float]]]:
    """Evaluate the non-positive curvature conditions of a family.

    Returns whether every strict inequality `lhs < rhs` holds, and the
    slack `rhs - lhs` of each.
    """
    family = _lookup(family_id)
    if family.spec.curvature_predicate is None:
        raise NoPredicate(f"No curvature conditions are known for {family_id}")
    values = _normalize_values(values)
    margins = []
    for inequality in family.predicate:
        slack = inequality.rhs.evaluate(values) - inequality.lhs.evaluate(values)
        margins.append((inequality.id, float(slack)))
    return all(slack > 0 for _, slack in margins), margins


def sample_parameters(
    family_id: str, rng: np.random.Generator, n: Optional[int] = None
) -> Dict[str, Fraction]:
    """Seeded rational free parameters satisfying the family constraints."""
    family = _lookup(family_id)
    names = family.spec.free
    point = dict(variety_point(family.spec.constraints, names, rng))
    if family.section == "1-n-2/ex1":
        for name in _fibre_params(_check_n(n)):
            point[name] = random_rational(rng)
    return point


def sample_predicate_point(
    family_id: str,
    rng: np.random.Generator,
    margin: float = 0.1,
) -> Dict[str, float]:
    """Seeded free parameters with every curvature slack at least `margin`."""
    family = _lookup(family_id)
    if family.spec.curvature_predicate is None:
        raise NoPredicate(f"No curvature conditions are known for {family_id}")
    names = family.spec.free
    for _ in range(PREDICATE_ATTEMPTS):
        draw = rng.uniform(-PREDICATE_BOX, PREDICATE_BOX, len(names))
        point = {name: float(value) for name, value in zip(names, draw)}
        slacks = [
            float(q.rhs.evaluate(point) - q.lhs.evaluate(point))
            for q in family.predicate
        ]
        if all(slack >= margin for slack in slacks):
            return point
    raise BranchUnsolvable(f"No parameters of {family_id} met the curvature conditions")
