"""Command line front end for the harmorph checkers and builders."""
import argparse
import json
import logging
import sys
from typing import IO, Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import jacobi_residual
from .catalog import (
    export_ansatz,
    export_family,
    get_family,
    hadamard_predicate,
    list_families,
)
from .conditions import check_foliation, check_morphism
from .const import (
    COND_JACOBI,
    DEFAULT_BUDGET,
    DEFAULT_SEED,
    DEFAULT_TOLERANCE,
    VERDICT_FAIL,
    VERDICT_INFO,
    VERDICT_PASS,
)
from .exceptions import FormatError, HarmorphError, RootSpaceMismatch
from .geometry import curvature_scan, sectional_curvature
from .models import (
    CheckItem,
    CheckReport,
    Decomposition,
    MetricLieAlgebra,
    ParametricAlgebra,
    Report,
)
from .polynomial import span_dimension
from .rootspace import (
    almost_normal_action,
    check_hadamard_morphism,
    root_decomposition,
)
from .symbolic import jacobi_system, parse_constraints, verify_family_constraints

_LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


class _Context:
    """Parsed arguments plus the input stream for `-`."""

    def __init__(self, args: argparse.Namespace, stdin: IO[str]) -> None:
        self.args = args
        self.stdin = stdin

    def load(self, path: str) -> Any:
        if path == "-":
            return json.loads(self.stdin.read())
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)


def _indices(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exception:
        raise FormatError(
            f"Expected comma separated indices, got {text!r}"
        ) from exception


def _vector(text: str) -> np.ndarray:
    try:
        return np.array([float(part) for part in text.split(",")])
    except ValueError as exception:
        raise FormatError(
            f"Expected comma separated numbers, got {text!r}"
        ) from exception


def _assignments(pairs: Sequence[str]) -> Dict[str, str]:
    values = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or not name.strip():
            raise FormatError(f"Expected name=value, got {pair!r}")
        values[name.strip()] = value.strip()
    return values


def _algebra(ctx: _Context) -> Tuple[MetricLieAlgebra, Dict[str, Any]]:
    data = ctx.load(ctx.args.file)
    if not isinstance(data, dict):
        raise FormatError("An algebra document must be a JSON object")
    return MetricLieAlgebra.from_dict(data), data


def _decomposition(data: Dict[str, Any]) -> Decomposition:
    if "decomposition" not in data:
        raise FormatError("This check needs a decomposition block")
    return Decomposition.from_dict(data["decomposition"])


def _from_check(
    command: str, report: CheckReport, tol: float, seed: Optional[int] = None
) -> Report:
    return Report(
        command,
        report.verdict,
        [item.to_dict() for item in report.items],
        tol,
        seed,
        {"notes": list(report.notes), "values": report.values},
    )


def _check_jacobi(ctx: _Context) -> Report:
    alg, _ = _algebra(ctx)
    tol = ctx.args.tol
    residual, triple = jacobi_residual(alg)
    item = CheckItem(COND_JACOBI, residual <= tol, residual, triple)
    return _from_check("check jacobi", CheckReport([item]), tol)


def _check_morphism(ctx: _Context) -> Report:
    alg, data = _algebra(ctx)
    report = check_morphism(alg, _decomposition(data), ctx.args.tol)
    return _from_check("check morphism", report, ctx.args.tol)


def _check_foliation(ctx: _Context) -> Report:
    alg, data = _algebra(ctx)
    report = check_foliation(alg, _decomposition(data), ctx.args.tol)
    return _from_check("check foliation", report, ctx.args.tol)


def _check_hadamard(ctx: _Context) -> Report:
    alg, _ = _algebra(ctx)
    a_idx, n_idx = _indices(ctx.args.a), _indices(ctx.args.n)
    args = ctx.args
    roots = root_decomposition(alg, a_idx, n_idx, args.tol, args.seed)
    if not 0 <= args.root < len(roots):
        raise RootSpaceMismatch(f"No root space {args.root}; found {len(roots)}")
    report = check_hadamard_morphism(
        alg, a_idx, n_idx, roots[args.root], args.tol, args.seed
    )
    result = _from_check("check hadamard", report, args.tol, args.seed)
    result.data["root"] = roots[args.root].to_dict()
    return result


def _rootspaces(ctx: _Context) -> Report:
    alg, _ = _algebra(ctx)
    args = ctx.args
    a_idx, n_idx = _indices(args.a), _indices(args.n)
    roots = root_decomposition(alg, a_idx, n_idx, args.tol, args.seed)
    normality = almost_normal_action(alg, a_idx, n_idx, args.tol)
    data = {
        "roots": [root.to_dict() for root in roots],
        "almost_normal": normality.to_dict(),
    }
    return Report("rootspaces", VERDICT_INFO, (), args.tol, args.seed, data)


def _curvature_scan(ctx: _Context) -> Report:
    alg, _ = _algebra(ctx)
    args = ctx.args
    scan = curvature_scan(alg, args.budget, args.seed, args.tol)
    verdict = VERDICT_INFO
    items: List[Dict[str, Any]] = []
    if args.assert_nonpositive:
        passed = scan.max_k <= args.tol
        verdict = VERDICT_PASS if passed else VERDICT_FAIL
        items.append(
            CheckItem(
                "nonpositive", passed, max(scan.max_k, 0.0), scan.witness
            ).to_dict()
        )
    data = scan.to_dict()
    return Report("curvature scan", verdict, items, args.tol, args.seed, data)


def _curvature_plane(ctx: _Context) -> Report:
    alg, _ = _algebra(ctx)
    x, y = _vector(ctx.args.x), _vector(ctx.args.y)
    value = sectional_curvature(alg, x, y, ctx.args.tol)
    data = {"sectional_curvature": value, "x": x, "y": y}
    return Report("curvature plane", VERDICT_INFO, (), ctx.args.tol, None, data)


def _catalog_list(ctx: _Context) -> Report:
    data = {"families": [spec.to_dict() for spec in list_families()]}
    return Report("catalog list", VERDICT_INFO, (), ctx.args.tol, None, data)


def _catalog_instantiate(ctx: _Context) -> Any:
    args = ctx.args
    document = export_family(args.id, _assignments(args.set), args.n)
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(json.dumps(document, sort_keys=True, indent=2) + "\n")
        data = {"family": get_family(args.id).to_dict(), "out": args.out}
        return Report("catalog instantiate", VERDICT_INFO, (), args.tol, None, data)
    return document


def _catalog_predicate(ctx: _Context) -> Report:
    args = ctx.args
    satisfied, margins = hadamard_predicate(args.id, _assignments(args.set))
    items = [
        CheckItem(inequality, slack > 0, slack).to_dict()
        for inequality, slack in margins
    ]
    verdict = VERDICT_PASS if satisfied else VERDICT_FAIL
    data = {"family": args.id}
    return Report("catalog predicate", verdict, items, args.tol, None, data)


def _catalog_ansatz(ctx: _Context) -> Any:
    return export_ansatz(ctx.args.name, ctx.args.n or 1)


def _constraints(ctx: _Context) -> Report:
    args = ctx.args
    target = list(args.target)
    if target[0] == "verify":
        if len(target) != 2 or not args.given:
            raise FormatError("Usage: constraints verify <ansatz-file> --given <file>")
        ansatz = ParametricAlgebra.from_dict(ctx.load(target[1]))
        given = ctx.load(args.given)
        texts = given.get("constraints", []) if isinstance(given, dict) else given
        if not isinstance(texts, list):
            raise FormatError("Constraints must be a list of polynomial strings")
        constraints = parse_constraints([str(text) for text in texts], ansatz.params)
        implied, witness = verify_family_constraints(
            ansatz, constraints, seed=args.seed
        )
        item = CheckItem(
            "implied",
            implied,
            0.0 if implied else 1.0,
            None,
            "" if implied else str(witness),
        )
        verdict = VERDICT_PASS if implied else VERDICT_FAIL
        return Report(
            "constraints verify", verdict, [item.to_dict()], args.tol, args.seed
        )

    if len(target) != 1:
        raise FormatError("Usage: constraints <ansatz-file> [--reduce]")
    system = jacobi_system(ParametricAlgebra.from_dict(ctx.load(target[0])))
    data: Dict[str, Any] = {
        "equations": [str(poly) for poly in system],
        "count": len(system),
    }
    if args.reduce:
        data["span_dimension"] = span_dimension(system)
    return Report("constraints", VERDICT_INFO, (), args.tol, None, data)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)
    common.add_argument("--json", action="store_true", help="machine readable output")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(
        prog="harmorph",
        description="Harmonic morphism checks on metric Lie algebras.",
    )
    commands = parser.add_subparsers(dest="command")
    commands.required = True

    check = commands.add_parser("check", help="run a checker")
    check = check.add_subparsers(dest="check")
    check.required = True
    for name, handler in (
        ("jacobi", _check_jacobi),
        ("morphism", _check_morphism),
        ("foliation", _check_foliation),
    ):
        sub = check.add_parser(name, parents=[common])
        sub.add_argument("file")
        sub.set_defaults(handler=handler)
    hadamard = check.add_parser("hadamard", parents=[common])
    hadamard.add_argument("file")
    hadamard.add_argument("--a", required=True)
    hadamard.add_argument("--n", required=True)
    hadamard.add_argument("--root", type=int, required=True)
    hadamard.set_defaults(handler=_check_hadamard)

    curvature = commands.add_parser("curvature").add_subparsers(dest="curvature")
    curvature.required = True
    scan = curvature.add_parser("scan", parents=[common])
    scan.add_argument("file")
    scan.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    scan.add_argument("--assert-nonpositive", action="store_true")
    scan.set_defaults(handler=_curvature_scan)
    plane = curvature.add_parser("plane", parents=[common])
    plane.add_argument("file")
    plane.add_argument("--x", required=True)
    plane.add_argument("--y", required=True)
    plane.set_defaults(handler=_curvature_plane)

    roots = commands.add_parser("rootspaces", parents=[common])
    roots.add_argument("file")
    roots.add_argument("--a", required=True)
    roots.add_argument("--n", required=True)
    roots.set_defaults(handler=_rootspaces)

    catalog = commands.add_parser("catalog").add_subparsers(dest="catalog")
    catalog.required = True
    catalog.add_parser("list", parents=[common]).set_defaults(handler=_catalog_list)
    instantiate = catalog.add_parser("instantiate", parents=[common])
    instantiate.add_argument("id")
    instantiate.add_argument("--set", action="append", default=[])
    instantiate.add_argument("--n", type=int)
    instantiate.add_argument("--out")
    instantiate.set_defaults(handler=_catalog_instantiate)
    predicate = catalog.add_parser("predicate", parents=[common])
    predicate.add_argument("id")
    predicate.add_argument("--set", action="append", default=[])
    predicate.set_defaults(handler=_catalog_predicate)
    ansatz = catalog.add_parser("ansatz", parents=[common])
    ansatz.add_argument("name")
    ansatz.add_argument("--n", type=int)
    ansatz.set_defaults(handler=_catalog_ansatz)

    constraints = commands.add_parser("constraints", parents=[common])
    constraints.add_argument("target", nargs="+")
    constraints.add_argument("--reduce", action="store_true")
    constraints.add_argument("--given")
    constraints.set_defaults(handler=_constraints)
    return parser


def _render(report: Report) -> str:
    lines = [f"{report.command}: {report.verdict}"]
    for item in report.items:
        status = "ok" if item["passed"] else "FAIL"
        line = f"  {item['condition']:<14} {status:<5} residual={item['residual']:.3e}"
        if item.get("detail"):
            line += f"  {item['detail']}"
        lines.append(line)
    for note in report.data.get("notes", []):
        lines.append(f"  note: {note}")
    if "max_k" in report.data:
        lines.append(f"  max_k = {report.data['max_k']:.6e}")
        lines.append(f"  samples = {report.data['samples_used']}")
    if "sectional_curvature" in report.data:
        lines.append(f"  K = {report.data['sectional_curvature']:.6e}")
    for root in report.data.get("roots", []):
        lines.append(
            f"  alpha={root['alpha']} beta={root['beta']} dim={root['dim']}"
            f" order={root['generalized_order']}"
        )
    for family in report.data.get("families", []):
        lines.append(f"  {family['id']:<18} dims={family['dims']}  {family['title']}")
    for equation in report.data.get("equations", []):
        lines.append(f"  {equation} = 0")
    if "span_dimension" in report.data:
        lines.append(f"  span dimension = {report.data['span_dimension']}")
    return "\n".join(lines) + "\n"


def run(argv: Sequence[str], stdin: Optional[IO[str]] = None) -> Tuple[int, str]:
    """Run one command; return the exit code and the text for stdout."""
    parser = _parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exit_:
        return int(exit_.code or 0), ""
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr)

    try:
        result = args.handler(_Context(args, stdin or sys.stdin))
    except (HarmorphError, OSError, ValueError) as exception:
        _LOGGER.debug("Command failed", exc_info=True)
        sys.stderr.write(f"harmorph: {exception}\n")
        return EXIT_ERROR, ""

    if not isinstance(result, Report):
        return EXIT_OK, json.dumps(result, sort_keys=True, indent=2) + "\n"
    if args.json:
        text = json.dumps(result.to_dict(), sort_keys=True, indent=2) + "\n"
    else:
        text = _render(result)
    code = EXIT_OK if result.verdict in (VERDICT_PASS, VERDICT_INFO) else EXIT_FAILED
    return code, text


def main() -> None:
    """Console entry point."""
    code, text = run(sys.argv[1:])
    sys.stdout.write(text)
    sys.exit(code)
