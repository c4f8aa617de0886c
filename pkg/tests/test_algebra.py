"""Tests for bracket, adjoint and trace calculus."""
import numpy as np
import pytest
from harmorph.algebra import (
    ad_operator,
    basis_vector,
    bracket,
    change_basis,
    check_orthonormal,
    derived_subalgebra,
    is_nilpotent,
    is_solvable,
    jacobi_residual,
    make_algebra,
    metric_transpose,
    orthonormalize,
    trace_ad,
)
from harmorph.exceptions import DimensionMismatch, NotOrthonormal

SO3 = [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)]


def rank_one_extension(alpha=0.5, beta=0.0):
    """Algebra on A, X, Z, W with [A,X]=X, [Z,W]=X and A rotating Z, W."""
    entries = [
        (0, 1, 1, 1.0),
        (0, 2, 2, alpha),
        (0, 2, 3, beta),
        (0, 3, 2, -beta),
        (0, 3, 3, alpha),
        (2, 3, 1, 1.0),
    ]
    return make_algebra(4, entries, labels=["A", "X", "Z", "W"])


def random_algebra(rng, dim):
    """Antisymmetric structure constants with a random metric."""
    c = rng.standard_normal((dim, dim, dim))
    c = c - c.transpose(1, 0, 2)
    root = rng.standard_normal((dim, dim))
    gram = root @ root.T + dim * np.eye(dim)
    entries = [
        (i, j, k, c[i, j, k])
        for i in range(dim)
        for j in range(i + 1, dim)
        for k in range(dim)
    ]
    return make_algebra(dim, entries, gram)


def test_abelian_algebra():
    """Test an algebra without brackets."""
    alg = make_algebra(2, [])
    np.testing.assert_array_equal(alg.c, np.zeros((2, 2, 2)))
    assert not bracket(alg, [1, 2], [3, 4]).any()
    assert not ad_operator(alg, [1, 0]).any()
    assert jacobi_residual(alg) == (0.0, None)
    assert trace_ad(alg, [1, 1]) == 0.0
    assert derived_subalgebra(alg).rank == 0


def test_bracket():
    """Test brackets of basis vectors."""
    alg = rank_one_extension()
    z, w = basis_vector(alg, 2), basis_vector(alg, 3)
    np.testing.assert_array_equal(bracket(alg, z, w), [0, 1, 0, 0])
    np.testing.assert_array_equal(bracket(alg, w, z), [0, -1, 0, 0])
    so3 = make_algebra(3, SO3)
    e1 = basis_vector(so3, 1)
    assert not bracket(so3, e1, e1).any()
    with pytest.raises(DimensionMismatch):
        bracket(alg, [1, 0], z)


def test_ad_operator():
    """Test ad_A acts as alpha times the identity on span{Z, W}."""
    alg = rank_one_extension()
    operator = ad_operator(alg, basis_vector(alg, 0))
    np.testing.assert_allclose(operator[2:, 2:], 0.5 * np.eye(2))
    np.testing.assert_allclose(operator @ basis_vector(alg, 1), basis_vector(alg, 1))


def test_ad_operator_adjoint_with_metric():
    """Test the metric adjoint for a non-identity gram."""
    alg = make_algebra(2, [(0, 1, 1, 1.0)], gram=[[1, 0], [0, 4]])
    operator = ad_operator(alg, [1, 0])
    adjoint = ad_operator(alg, [1, 0], adjoint=True)
    np.testing.assert_allclose(operator, [[0, 0], [0, 1]])
    np.testing.assert_allclose(adjoint, operator)
    for v in np.eye(2):
        for w in np.eye(2):
            expected = alg.inner(v, operator @ w)
            assert alg.inner(adjoint @ v, w) == pytest.approx(expected)


def test_adjoint_identity_random():
    """Test <ad_x^t v, w> = <v, ad_x w> for random metrics."""
    rng = np.random.default_rng(3)
    for _ in range(20):
        alg = random_algebra(rng, 4)
        x, v, w = rng.standard_normal((3, 4))
        left = alg.inner(ad_operator(alg, x, adjoint=True) @ v, w)
        right = alg.inner(v, ad_operator(alg, x) @ w)
        assert left == pytest.approx(right, abs=1e-10)


def test_adjoint_matches_metric_transpose():
    """Test ad_x^t is the metric transpose of ad_x for any inner product."""
    rng = np.random.default_rng(8)
    for dim in (2, 3, 5):
        alg = random_algebra(rng, dim)
        x = rng.standard_normal(dim)
        operator = ad_operator(alg, x)
        np.testing.assert_allclose(
            ad_operator(alg, x, adjoint=True),
            metric_transpose(operator, alg.gram),
            atol=1e-12,
        )
        np.testing.assert_allclose(
            metric_transpose(metric_transpose(operator, alg.gram), alg.gram),
            operator,
            atol=1e-10,
        )


def test_jacobi_residual():
    """Test the Jacobi residual on valid and invalid brackets."""
    assert jacobi_residual(make_algebra(3, SO3))[0] == pytest.approx(0.0, abs=1e-12)
    assert jacobi_residual(rank_one_extension())[0] == pytest.approx(0.0, abs=1e-12)
    residual, triple = jacobi_residual(rank_one_extension(alpha=0.6))
    assert residual == pytest.approx(0.2)
    assert triple == (0, 2, 3)


def test_jacobi_residual_grows_linearly():
    """Test the residual is |1 - 2 alpha| for the rotating extension."""
    for delta in (0.05, 0.1, 0.3):
        residual, _ = jacobi_residual(rank_one_extension(alpha=0.5 + delta))
        assert residual == pytest.approx(2 * delta)


def test_trace_ad():
    """Test traces of adjoint operators."""
    alg = rank_one_extension()
    assert trace_ad(alg, basis_vector(alg, 0)) == pytest.approx(2.0)
    assert trace_ad(alg, basis_vector(alg, 2)) == 0.0
    rng = np.random.default_rng(1)
    random = random_algebra(rng, 5)
    x, y = rng.standard_normal((2, 5))
    total = trace_ad(random, x + y)
    assert total == pytest.approx(trace_ad(random, x) + trace_ad(random, y), abs=1e-12)


def test_derived_subalgebra():
    """Test the derived algebra dimension."""
    assert derived_subalgebra(rank_one_extension()).rank == 3
    assert derived_subalgebra(make_algebra(3, SO3)).rank == 3
    basis = derived_subalgebra(rank_one_extension()).basis
    np.testing.assert_allclose(basis @ basis.T, np.eye(3), atol=1e-12)
    assert np.abs(basis[:, 0]).max() < 1e-12


def test_solvable_and_nilpotent():
    """Test the derived and lower central series."""
    heisenberg = make_algebra(3, [(0, 1, 2, 1.0)])
    assert is_nilpotent(heisenberg)
    assert is_solvable(heisenberg)
    assert is_solvable(rank_one_extension())
    assert not is_nilpotent(rank_one_extension())
    assert not is_solvable(make_algebra(3, SO3))


def test_orthonormalize():
    """Test rank detection and gram-orthonormality."""
    gram = np.diag([1.0, 2.0, 3.0])
    frame = orthonormalize([[1, 1, 0], [2, 2, 0], [0, 0, 1]], gram)
    assert frame.shape == (2, 3)
    np.testing.assert_allclose(frame @ gram @ frame.T, np.eye(2), atol=1e-12)
    assert orthonormalize(np.zeros((2, 3)), gram).shape == (0, 3)
    check_orthonormal(frame, gram, 1e-9)
    with pytest.raises(NotOrthonormal):
        check_orthonormal(np.eye(3), gram, 1e-9)


def test_change_basis():
    """Test rewriting an algebra in a rotated orthonormal basis."""
    alg = rank_one_extension(beta=0.7)
    angle = 0.4
    frame = np.eye(4)
    frame[2:, 2:] = [[np.cos(angle), np.sin(angle)], [-np.sin(angle), np.cos(angle)]]
    rotated = change_basis(alg, frame, ["A", "X", "P", "Q"])
    np.testing.assert_array_equal(rotated.gram, np.eye(4))
    assert jacobi_residual(rotated)[0] == pytest.approx(0.0, abs=1e-12)
    for p in range(4):
        for q in range(4):
            expected = bracket(alg, frame[p], frame[q])
            np.testing.assert_allclose(rotated.c[p, q] @ frame, expected, atol=1e-12)
    with pytest.raises(DimensionMismatch):
        change_basis(alg, np.eye(3))
