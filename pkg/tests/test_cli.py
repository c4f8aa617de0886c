"""Tests for the harmorph command line interface."""
import io
import json

import pytest
from harmorph.cli import EXIT_ERROR, EXIT_FAILED, EXIT_OK, run


def rotating_extension(alpha=0.5):
    """Algebra document of A acting on the 3-dimensional Heisenberg algebra."""
    return {
        "dim": 4,
        "labels": ["A", "X", "Z", "W"],
        "brackets": [
            {"i": 0, "j": 1, "coeffs": {"1": 1}},
            {"i": 0, "j": 2, "coeffs": {"2": alpha, "3": 0.7}},
            {"i": 0, "j": 3, "coeffs": {"2": -0.7, "3": alpha}},
            {"i": 2, "j": 3, "coeffs": {"1": 1}},
        ],
        "decomposition": {"a": [0], "k": [1], "m": [2, 3]},
    }


@pytest.fixture
def write(tmp_path):
    """Write a JSON document and return its path."""

    def _write(name, document):
        path = tmp_path / name
        path.write_text(json.dumps(document))
        return str(path)

    return _write


def test_check_morphism(write):
    """Test a passing check prints its items and exits 0."""
    code, text = run(["check", "morphism", write("alg.json", rotating_extension())])
    assert code == EXIT_OK
    assert text.splitlines()[0] == "check morphism: pass"
    assert "iv" in text


def test_check_failure_exits_1(write):
    """Test a failing verdict exits 1 and reports the unsound note."""
    path = write("alg.json", rotating_extension(alpha=0.6))
    code, text = run(["check", "morphism", path, "--json"])
    assert code == EXIT_FAILED
    report = json.loads(text)
    assert report["verdict"] == "fail"
    assert report["items"][0]["condition"] == "jacobi"
    assert report["items"][0]["residual"] == pytest.approx(0.2)
    assert report["data"]["notes"]

    code, _ = run(["check", "jacobi", path])
    assert code == EXIT_FAILED


def test_json_report_is_deterministic(write):
    """Test equal invocations print identical JSON."""
    path = write("alg.json", rotating_extension())
    argv = ["check", "foliation", path, "--json", "--tol", "1e-8"]
    first, second = run(argv), run(argv)
    assert first == second
    report = json.loads(first[1])
    assert report["schema"] == 1
    assert report["command"] == "check foliation"
    assert report["tolerance"] == 1e-8
    assert list(report) == sorted(report)


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "jacobi", "{alg}"],
        ["check", "morphism", "{alg}"],
        ["check", "foliation", "{alg}"],
        ["check", "hadamard", "{alg}", "--a", "0", "--n", "1,2,3", "--root", "0"],
        ["rootspaces", "{alg}", "--a", "0", "--n", "1,2,3"],
        ["curvature", "scan", "{alg}", "--budget", "200"],
        ["curvature", "plane", "{alg}", "--x", "1,0,0,0", "--y", "0,0,1,0"],
        ["catalog", "list"],
        ["catalog", "instantiate", "carnot", "--set", "theta=2", "--n", "2"],
        ["catalog", "predicate", "case-2-1-2/ex3"]
        + ["--set", "alpha=1", "--set", "x=1", "--set", "theta=1"],
        ["catalog", "ansatz", "1-2-2"],
        ["constraints", "{ansatz}", "--reduce"],
        ["constraints", "verify", "{ansatz}", "--given", "{given}"],
    ],
)
def test_every_command_is_deterministic(write, argv):
    """Test three equal invocations of each command print identical JSON."""
    ansatz = json.loads(run(["catalog", "ansatz", "1-1-2"])[1])
    given = {"constraints": ["theta*lambda - 2*theta*alpha"]}
    paths = {
        "{alg}": write("alg.json", rotating_extension()),
        "{ansatz}": write("ansatz.json", ansatz),
        "{given}": write("given.json", given),
    }
    argv = [paths.get(arg, arg) for arg in argv] + ["--json", "--seed", "3"]
    outputs = [run(argv) for _ in range(3)]
    assert outputs[0][0] != EXIT_ERROR
    assert outputs[0][1]
    assert outputs[1] == outputs[0]
    assert outputs[2] == outputs[0]


def test_input_errors_exit_2(write, tmp_path, capsys):
    """Test unreadable, malformed and incomplete input."""
    assert run(["check", "jacobi", str(tmp_path / "missing.json")])[0] == EXIT_ERROR
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert run(["check", "jacobi", str(broken)])[0] == EXIT_ERROR
    document = rotating_extension()
    del document["decomposition"]
    code, text = run(["check", "morphism", write("plain.json", document)])
    assert (code, text) == (EXIT_ERROR, "")
    assert "decomposition" in capsys.readouterr().err
    assert run(["check", "nothing"])[0] == EXIT_ERROR
    argv = ["curvature", "plane", write("alg.json", rotating_extension())]
    assert run(argv + ["--x", "1,a", "--y", "0,1"])[0] == EXIT_ERROR


def test_instantiate_pipes_into_check():
    """Test `catalog instantiate` output feeds `check morphism -`."""
    code, document = run(
        [
            "catalog",
            "instantiate",
            "case-1-1-2",
            "--set",
            "lambda=1",
            "--set",
            "alpha=1/2",
            "--set",
            "beta=0",
            "--set",
            "theta=1",
        ]
    )
    assert code == EXIT_OK
    assert json.loads(document)["decomposition"] == {"a": [0], "k": [1], "m": [2, 3]}
    code, text = run(["check", "morphism", "-"], stdin=io.StringIO(document))
    assert code == EXIT_OK
    assert text.startswith("check morphism: pass")


def test_instantiate_to_file(tmp_path):
    """Test `--out` writes the document and reports where."""
    out = tmp_path / "carnot.json"
    code, text = run(
        ["catalog", "instantiate", "carnot", "--set", "theta=2", "--n", "2"]
        + ["--out", str(out), "--json"]
    )
    assert code == EXIT_OK
    assert json.loads(text)["data"]["out"] == str(out)
    assert json.loads(out.read_text())["dim"] == 6
    assert run(["check", "foliation", str(out)])[0] == EXIT_OK


def test_instantiate_errors():
    """Test catalog errors exit 2."""
    assert run(["catalog", "instantiate", "nope"])[0] == EXIT_ERROR
    argv = ["catalog", "instantiate", "case-1-1-2", "--set", "theta"]
    assert run(argv)[0] == EXIT_ERROR
    argv = ["catalog", "instantiate", "case-1-n-2/ex2", "--n", "1"]
    assert run(argv + ["--set", "alpha=1/2", "--set", "beta=0"])[0] == EXIT_ERROR


def test_catalog_list():
    """Test the listing covers every family."""
    code, text = run(["catalog", "list", "--json"])
    assert code == EXIT_OK
    families = json.loads(text)["data"]["families"]
    assert len(families) == 22
    assert families[0]["id"] == "case-2-0-2"
    assert "case-1-2-2/ex3" in run(["catalog", "list"])[1]


def test_catalog_predicate():
    """Test predicate verdicts map to exit codes."""
    argv = ["catalog", "predicate", "case-2-1-2/ex3", "--set", "x=1"]
    argv += ["--set", "alpha=1"]
    assert run(argv + ["--set", "theta=1"])[0] == EXIT_OK
    code, text = run(argv + ["--set", "theta=5", "--json"])
    assert code == EXIT_FAILED
    assert json.loads(text)["items"][0]["residual"] == -9.0
    assert run(["catalog", "predicate", "case-1-2-2/ex1"])[0] == EXIT_ERROR


def test_constraints(write):
    """Test the Jacobi system and its reduction for an ansatz document."""
    code, document = run(["catalog", "ansatz", "0-2-2"])
    assert code == EXIT_OK
    path = write("ansatz.json", json.loads(document))
    code, text = run(["constraints", path, "--reduce", "--json"])
    assert code == EXIT_OK
    data = json.loads(text)["data"]
    assert data["count"] == 8
    assert data["span_dimension"] == 8
    assert "= 0" in run(["constraints", path])[1]


def test_constraints_verify(write):
    """Test verifying that given relations imply the Jacobi system."""
    code, document = run(["catalog", "ansatz", "1-1-2"])
    path = write("ansatz.json", json.loads(document))
    given = write("given.json", {"constraints": ["theta*lambda - 2*theta*alpha"]})
    assert run(["constraints", "verify", path, "--given", given])[0] == EXIT_OK
    empty = write("empty.json", [])
    code, text = run(["constraints", "verify", path, "--given", empty, "--json"])
    assert code == EXIT_FAILED
    assert json.loads(text)["items"][0]["detail"]
    assert run(["constraints", "verify", path])[0] == EXIT_ERROR


def test_rootspaces_and_hadamard(write):
    """Test root spaces and the root space morphism check."""
    path = write("alg.json", rotating_extension())
    code, text = run(["rootspaces", path, "--a", "0", "--n", "1,2,3", "--json"])
    assert code == EXIT_OK
    report = json.loads(text)
    assert report["verdict"] == "info"
    assert [root["dim"] for root in report["data"]["roots"]] == [2, 1]
    assert report["data"]["almost_normal"]["is_normal"]

    argv = ["check", "hadamard", path, "--a", "0", "--n", "1,2,3"]
    code, text = run(argv + ["--root", "0", "--json"])
    assert code == EXIT_OK
    assert json.loads(text)["data"]["root"]["alpha"] == [pytest.approx(0.5)]
    assert run(argv + ["--root", "5"])[0] == EXIT_ERROR
    assert run(argv + ["--root", "1"])[0] == EXIT_ERROR


def test_curvature_commands(write):
    """Test the plane and scan commands."""
    hyperbolic = write(
        "hyp.json",
        {"dim": 2, "brackets": [{"i": 0, "j": 1, "coeffs": {"1": 1}}]},
    )
    code, text = run(["curvature", "plane", hyperbolic, "--x", "1,0", "--y", "0,1"])
    assert code == EXIT_OK
    assert "K = -1.000000e+00" in text

    scan = ["curvature", "scan", hyperbolic, "--budget", "20"]
    assert run(scan)[0] == EXIT_OK
    code, text = run(scan + ["--assert-nonpositive", "--json"])
    assert code == EXIT_OK
    assert json.loads(text)["data"]["max_k"] == pytest.approx(-1.0)

    so3 = write(
        "so3.json",
        {
            "dim": 3,
            "brackets": [
                {"i": 0, "j": 1, "coeffs": {"2": 1}},
                {"i": 1, "j": 2, "coeffs": {"0": 1}},
                {"i": 0, "j": 2, "coeffs": {"1": -1}},
            ],
        },
    )
    code, _ = run(["curvature", "scan", so3, "--budget", "50", "--assert-nonpositive"])
    assert code == EXIT_FAILED
