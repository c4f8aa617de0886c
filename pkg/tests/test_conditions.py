"""Tests for the harmonic morphism and foliation conditions."""
import numpy as np
import pytest
from harmorph.algebra import make_algebra
from harmorph.conditions import (
    UNSOUND_NOTE,
    check_foliation,
    check_morphism,
    conformal_decompose,
    isotropic_frame,
    lemma_predicates,
    omega_form,
    orthogonal_family,
)
from harmorph.exceptions import BadDecomposition, DimensionMismatch, TooSmall
from harmorph.models import Decomposition


def rotating_extension(alpha=0.5, beta=0.0):
    """A acting on X by 1 and on span{Z, W} by alpha I + beta J, [Z,W]=X."""
    entries = [
        (0, 1, 1, 1.0),
        (0, 2, 2, alpha),
        (0, 2, 3, beta),
        (0, 3, 2, -beta),
        (0, 3, 3, alpha),
        (2, 3, 1, 1.0),
    ]
    return make_algebra(4, entries, labels=["A", "X", "Z", "W"])


def scaling_extension(alpha):
    """A scaling three commuting vectors by alpha."""
    entries = [(0, i, i, alpha) for i in (1, 2, 3)]
    return make_algebra(4, entries, labels=["A", "Z1", "Z2", "Z3"])


def conformal_operator(rng, size, gram=None):
    """lam I plus a skew operator for the given metric."""
    gram = np.eye(size) if gram is None else gram
    root = rng.standard_normal((size, size))
    skew = np.linalg.solve(gram, root - root.T)
    return rng.standard_normal() * np.eye(size) + skew


def random_metric(rng, size):
    """Random positive definite Gram matrix."""
    root = rng.standard_normal((size, size))
    return root @ root.T + size * np.eye(size)


def test_conformal_decompose_identity_metric():
    """Test the split of a conformal and a non-conformal operator."""
    split = conformal_decompose([[2.0, -1.0], [1.0, 2.0]])
    assert split.lam == pytest.approx(2.0)
    np.testing.assert_allclose(split.skew, [[0.0, -1.0], [1.0, 0.0]])
    assert split.residual == pytest.approx(0.0, abs=1e-12)
    assert split.witness is None

    split = conformal_decompose(np.diag([1.0, 2.0]))
    assert split.lam == pytest.approx(1.5)
    assert split.residual == pytest.approx(0.5)
    z, w = split.witness
    assert abs((z @ np.diag([1.0, 2.0]) @ z) - (w @ np.diag([1.0, 2.0]) @ w)) == (
        pytest.approx(1.0)
    )


def test_conformal_decompose_with_metric():
    """Test conformality is measured with respect to the given metric."""
    rng = np.random.default_rng(7)
    gram = np.array([[2.0, 0.5, 0.0], [0.5, 1.0, 0.0], [0.0, 0.0, 3.0]])
    operator = conformal_operator(rng, 3, gram)
    split = conformal_decompose(operator, gram)
    assert split.residual == pytest.approx(0.0, abs=1e-10)
    assert split.lam == pytest.approx(np.trace(operator) / 3)
    assert conformal_decompose(operator).residual > 1e-3


def test_conformal_decompose_rejects_bad_shapes():
    """Test non-square operators and mismatched metrics."""
    with pytest.raises(DimensionMismatch):
        conformal_decompose(np.zeros((2, 3)))
    with pytest.raises(DimensionMismatch):
        conformal_decompose(np.eye(2), np.eye(3))


@pytest.mark.parametrize("size", [2, 3, 4, 5, 6])
def test_lemma_characterisations_agree(size):
    """Test the three conformality predicates agree on random operators."""
    rng = np.random.default_rng(11 + size)
    for index in range(100):
        gram = random_metric(rng, size) if index % 2 else None
        operator = conformal_operator(rng, size, gram)
        assert lemma_predicates(operator, gram, rng=rng, tol=1e-8) == (True,) * 3
        generic = rng.standard_normal((size, size))
        assert lemma_predicates(generic, gram, rng=rng, tol=1e-8) == (False,) * 3


def test_scalar_operator_on_a_line_is_conformal():
    """Test every 1x1 operator is conformal."""
    split = conformal_decompose([[3.0]])
    assert split.lam == 3.0
    assert split.residual == 0.0


def test_morphism_passes_on_rotating_extension():
    """Test a solvable extension of the Heisenberg algebra passes."""
    alg = rotating_extension(beta=0.7)
    report = check_morphism(alg, Decomposition([0], [1], [2, 3]))
    assert report.verdict == "pass"
    assert report.failed() == ()
    assert report.values["lambda"]["A"] == pytest.approx(0.5)
    conditions = [item.condition for item in report.items]
    assert conditions == ["jacobi", "a-subalgebra", "i", "ii", "iii", "iv", "v"]


def test_morphism_fails_only_conformality():
    """Test ad_A with distinct eigenvalues on m fails condition (v)."""
    entries = [(0, 2, 2, 1.0), (0, 3, 3, 2.0)]
    alg = make_algebra(4, entries, labels=["A", "X", "Z", "W"])
    report = check_morphism(alg, Decomposition([0], [1], [2, 3]))
    assert report.failed() == ("v",)
    assert report.item("v").residual == pytest.approx(0.5)
    assert report.item("v").witness[0] == 0
    assert "ad_A" in report.item("v").detail


def test_morphism_fails_only_trace():
    """Test a non-unimodular horizontal direction fails condition (iv)."""
    alg = make_algebra(3, [(1, 0, 0, 1.0)], labels=["X", "Z", "W"])
    report = check_morphism(alg, Decomposition([], [0], [1, 2]))
    assert report.failed() == ("iv",)
    assert report.item("iv").residual == pytest.approx(1.0)
    assert report.item("iv").witness == (1,)


def test_morphism_fails_only_vertical_bracket():
    """Test [m, m] outside k fails condition (iii)."""
    alg = make_algebra(3, [(0, 1, 2, 1.0)], labels=["Z1", "Z2", "Z3"])
    report = check_morphism(alg, Decomposition([], [], [0, 1, 2]))
    assert report.failed() == ("iii",)
    assert report.item("iii").witness == (0, 1)


def test_morphism_on_broken_jacobi_is_unsound():
    """Test conditions are skipped when the Jacobi identity fails."""
    alg = rotating_extension(alpha=0.6)
    report = check_morphism(alg, Decomposition([0], [1], [2, 3]))
    assert report.verdict == "fail"
    assert [item.condition for item in report.items] == ["jacobi"]
    assert report.item("jacobi").residual == pytest.approx(0.2)
    assert report.notes == (UNSOUND_NOTE,)


def test_morphism_validates_decomposition():
    """Test a decomposition that misses a basis vector is rejected."""
    with pytest.raises(BadDecomposition):
        check_morphism(rotating_extension(), Decomposition([0], [], [2, 3]))


def test_foliation_passes_and_reports_omega():
    """Test the 1-form of a scaling extension is closed."""
    alpha = 0.75
    alg = scaling_extension(alpha)
    decomposition = Decomposition([0], [], [1, 2, 3])
    omega, closedness = omega_form(alg, decomposition)
    assert omega[0] == pytest.approx(alpha)
    np.testing.assert_allclose(omega[1:], 0.0, atol=1e-12)
    assert closedness == pytest.approx(0.0, abs=1e-12)

    report = check_foliation(alg, decomposition)
    assert report.verdict == "pass"
    assert report.values["omega"]["A"] == pytest.approx(alpha)
    conditions = [item.condition for item in report.items]
    assert conditions == ["jacobi", "i", "ii", "iii", "iv+v", "vi", "vii"]
    assert check_morphism(alg, decomposition).values["lambda"]["A"] == (
        pytest.approx(alpha)
    )


def test_foliation_fails_only_trace():
    """Test the trace condition is item (vi) for foliations."""
    alg = make_algebra(3, [(1, 0, 0, 1.0)], labels=["X", "Z", "W"])
    report = check_foliation(alg, Decomposition([], [0], [1, 2]))
    assert report.failed() == ("vi",)


def test_omega_needs_horizontal_block():
    """Test omega is undefined without m."""
    alg = make_algebra(2, [])
    with pytest.raises(BadDecomposition):
        omega_form(alg, Decomposition([0], [1], []))


def test_isotropic_frame():
    """Test the frame vectors are isotropic and mutually orthogonal."""
    for size in (2, 3, 4, 5):
        frame = isotropic_frame(size)
        assert frame.vectors.shape == (size // 2, size)
        np.testing.assert_allclose(frame.products(), 0.0)
    with pytest.raises(TooSmall):
        isotropic_frame(1)


def test_orthogonal_family():
    """Test components of map values along the isotropic frame."""
    frame = isotropic_frame(4)
    components = orthogonal_family(frame, [1.0, 2.0, 3.0, 4.0])
    np.testing.assert_allclose(components, [1.0 + 2.0j, 3.0 + 4.0j])
    with pytest.raises(DimensionMismatch):
        orthogonal_family(frame, [1.0, 2.0])
