"""Jacobi constraint systems of parametric structure constants."""
import logging
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .const import DEFAULT_SEED, VARIETY_ATTEMPTS, VARIETY_SAMPLES
from .exceptions import BranchUnsolvable, FormatError, MissingParameter
from .models import MetricLieAlgebra, ParametricAlgebra
from .polynomial import Number, PolyExpr

_LOGGER = logging.getLogger(__name__)

Triple = Tuple[int, int, int]


def jacobi_components(p: ParametricAlgebra) -> Dict[Triple, List[PolyExpr]]:
    """Raw Jacobi cycle components for every basis triple i < j < k.

    Component m of [e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]].
    """
    dim = p.dim
    table = [[p.bracket_vector(i, j) for j in range(dim)] for i in range(dim)]
    components: Dict[Triple, List[PolyExpr]] = {}
    for i in range(dim):
        for j in range(i + 1, dim):
            for k in range(j + 1, dim):
                cycle = [PolyExpr.zero(p.params) for _ in range(dim)]
                for first, second, third in ((i, j, k), (j, k, i), (k, i, j)):
                    inner = table[second][third]
                    for middle, coeff in enumerate(inner):
                        if coeff.is_zero:
                            continue
                        for target, outer in enumerate(table[first][middle]):
                            if not outer.is_zero:
                                cycle[target] = cycle[target] + coeff * outer
                components[(i, j, k)] = cycle
    return components


def jacobi_system(p: ParametricAlgebra) -> List[PolyExpr]:
    """Distinct nonzero Jacobi equations in normalized form.

    Exact duplicates and scalar multiples collapse onto one equation;
    linear combinations are kept apart. Order follows the first occurrence
    over triples and components.
    """
    system: List[PolyExpr] = []
    seen = set()
    for cycle in jacobi_components(p).values():
        for poly in cycle:
            if poly.is_zero:
                continue
            normalized = poly.normalize()
            if normalized.terms not in seen:
                seen.add(normalized.terms)
                system.append(normalized)
    return system


def substitute(p: ParametricAlgebra, values: Mapping[str, Number]) -> MetricLieAlgebra:
    """Evaluate the structure constants at a full parameter assignment."""
    missing = [name for name in p.params if name not in values]
    if missing:
        raise MissingParameter(f"No value for parameters {', '.join(missing)}", missing)
    c = np.zeros((p.dim, p.dim, p.dim))
    for (i, j), coeffs in p.brackets.items():
        for k, poly in coeffs.items():
            value = float(poly.evaluate(values))
            c[i, j, k] = value
            c[j, i, k] = -value
    return MetricLieAlgebra(c, labels=p.labels)


def system_residual(polys: Sequence[PolyExpr], values: Mapping[str, Number]) -> float:
    """Largest absolute value of the polynomials at a point."""
    return max((abs(float(poly.evaluate(values))) for poly in polys), default=0.0)


def random_rational(rng: np.random.Generator) -> Fraction:
    """Small nonzero random rational."""
    numerator = int(rng.integers(1, 10)) * (1 if rng.random() < 0.5 else -1)
    return Fraction(numerator, int(rng.integers(1, 5)))


def _try_point(
    constraints: Sequence[PolyExpr],
    params: Sequence[str],
    rng: np.random.Generator,
    order: Sequence[str],
) -> Optional[Dict[str, Fraction]]:
    values: Dict[str, Fraction] = {}
    pending = [poly for poly in constraints if not poly.is_zero]
    while pending:
        poly = pending.pop(0).substitute(values)
        if poly.is_zero:
            continue
        unknowns = poly.variables()
        if not unknowns:
            return None
        linear = [name for name in unknowns if poly.linear_split(name) is not None]
        if not linear:
            name = unknowns[int(rng.integers(len(unknowns)))]
            values[name] = random_rational(rng)
            pending.insert(0, poly)
            continue
        pinned = [name for name in order if name in linear]
        target = pinned[0] if pinned else linear[int(rng.integers(len(linear)))]
        split = poly.linear_split(target)
        assert split is not None
        for name in unknowns:
            if name != target:
                values[name] = random_rational(rng)
        factor = split[0].evaluate(values)
        if factor == 0:
            return None
        values[target] = -split[1].evaluate(values) / factor
    for name in params:
        values.setdefault(name, random_rational(rng))
    if any(poly.evaluate(values) != 0 for poly in constraints):
        return None
    return values


def variety_point(
    constraints: Sequence[PolyExpr],
    params: Sequence[str],
    rng: np.random.Generator,
    order: Sequence[str] = (),
) -> Dict[str, Fraction]:
    """Random rational point on the variety cut out by the constraints.

    Constraints are solved one after the other for a variable in which
    they are linear, the remaining unknowns drawn at random; `order` pins
    the preferred variables. Different random branches are tried before
    giving up.
    """
    for attempt in range(VARIETY_ATTEMPTS):
        point = _try_point(constraints, params, rng, order)
        if point is not None:
            return point
        _LOGGER.debug("Variety branch failed (attempt %d)", attempt + 1)
    raise BranchUnsolvable(
        "Constraints could not be solved on any branch",
        [str(poly) for poly in constraints],
    )


def verify_family_constraints(
    p: ParametricAlgebra,
    constraints: Sequence[PolyExpr],
    samples: int = VARIETY_SAMPLES,
    seed: int = DEFAULT_SEED,
    order: Sequence[str] = (),
) -> Tuple[bool, Optional[PolyExpr]]:
    """Decide whether the constraints imply the whole Jacobi system.

    Every Jacobi equation is evaluated exactly at `samples` seeded random
    rational points of the constraint variety. The first equation that
    does not vanish is returned as witness.
    """
    for poly in constraints:
        if poly.params != p.params:
            raise FormatError("Constraints and ansatz use different parameters")
    system = jacobi_system(p)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        point = variety_point(constraints, p.params, rng, order)
        for equation in system:
            if equation.evaluate(point) != 0:
                return False, equation
    return True, None


def parse_constraints(texts: Sequence[str], params: Sequence[str]) -> List[PolyExpr]:
    """Parse constraint polynomials, each meaning `poly = 0`."""
    return [PolyExpr.parse(text, params) for text in texts]
