import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entmono import linalg
from entmono.exceptions import NumericError, ShapeError, SizeError


def _rand(rng, n, m=None):
    m = n if m is None else m
    return rng.uniform(-1, 1, (n, m)) + 1j * rng.uniform(-1, 1, (n, m))


def _rand_herm(rng, n):
    a = _rand(rng, n)
    return (a + a.conj().T) / 2


def test_kron_examples():
    np.testing.assert_array_equal(linalg.kron(np.eye(2), np.eye(2)), np.eye(4))
    x = [[0, 1], [1, 0]]
    np.testing.assert_array_equal(linalg.kron(x, [[1]]), x)
    np.testing.assert_array_equal(linalg.kron(np.diag([1, 2]), np.diag([3, 4])), np.diag([3, 4, 6, 8]))


def test_kron_block_structure():
    rng = np.random.default_rng(0)
    a, b = _rand(rng, 2, 3), _rand(rng, 4, 2)
    k = linalg.kron(a, b)
    assert k.shape == (8, 6)
    for i in range(2):
        for j in range(3):
            np.testing.assert_allclose(k[4 * i : 4 * i + 4, 2 * j : 2 * j + 2], a[i, j] * b)


def test_kron_size_limit():
    with pytest.raises(SizeError):
        linalg.kron(np.eye(64), np.eye(32))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4]), st.sampled_from([2, 4]))
def test_kron_associative(seed, n, m):
    rng = np.random.default_rng(seed)
    a, b, c = _rand(rng, n), _rand(rng, m), _rand(rng, 2)
    lhs = linalg.kron(linalg.kron(a, b), c)
    rhs = linalg.kron(a, linalg.kron(b, c))
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_partial_trace_examples():
    p00 = np.zeros((4, 4))
    p00[0, 0] = 1
    np.testing.assert_allclose(linalg.partial_trace(p00, [2, 2], [0]), [[1, 0], [0, 0]])
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    np.testing.assert_allclose(linalg.partial_trace(np.outer(phi, phi), [2, 2], [0]), np.eye(2) / 2, atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_partial_trace_of_product(seed):
    rng = np.random.default_rng(seed)
    a, b = _rand(rng, 2), _rand(rng, 4)
    got = linalg.partial_trace(linalg.kron(a, b), [2, 4], [0])
    assert np.max(np.abs(got - a * np.trace(b))) <= 1e-12
    got = linalg.partial_trace(linalg.kron(a, b), [2, 4], [1])
    assert np.max(np.abs(got - b * np.trace(a))) <= 1e-12


def test_partial_trace_middle_and_trace_preserved():
    rng = np.random.default_rng(3)
    a, b, c = _rand(rng, 2), _rand(rng, 3), _rand(rng, 2)
    m = linalg.kron(linalg.kron(a, b), c)
    red = linalg.partial_trace(m, [2, 3, 2], [0, 2])
    np.testing.assert_allclose(red, np.trace(b) * linalg.kron(a, c), atol=1e-12)
    assert np.trace(red) == pytest.approx(np.trace(m))


@pytest.mark.parametrize(
    "dims, keep, exc",
    [([2, 2], [0], ShapeError), ([2, 2, 2], [], ValueError), ([2, 2, 2], [0, 1, 2], ValueError), ([2, 2, 2], [5], ValueError)],
)
def test_partial_trace_errors(dims, keep, exc):
    m = np.eye(8) / 8
    with pytest.raises(exc):
        linalg.partial_trace(m, dims, keep)


def test_hermitian_eig_examples():
    np.testing.assert_allclose(linalg.hermitian_eig(np.eye(4)).eigenvalues, [1, 1, 1, 1])
    np.testing.assert_allclose(linalg.hermitian_eig(np.diag([3.0, 1.0, 2.0])).eigenvalues, [3, 2, 1])
    np.testing.assert_allclose(linalg.hermitian_eig([[0, 1], [1, 0]]).eigenvalues, [1, -1], atol=1e-15)


@pytest.mark.parametrize("n", [2, 4, 8, 16, 32])
def test_hermitian_eig_invariants(n):
    rng = np.random.default_rng(n)
    for _ in range(10):
        h = _rand_herm(rng, n)
        eig = linalg.hermitian_eig(h)
        q = eig.eigenvectors
        assert np.all(np.diff(eig.eigenvalues) <= 0)
        assert abs(eig.eigenvalues.sum() - np.trace(h).real) <= 1e-10
        assert np.max(np.abs(q.conj().T @ q - np.eye(n))) <= 1e-10
        assert np.max(np.abs(eig.reconstruct() - h)) <= 1e-10


def test_hermitian_eig_deterministic():
    h = _rand_herm(np.random.default_rng(9), 8)
    a, b = linalg.hermitian_eig(h), linalg.hermitian_eig(h.copy())
    np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)
    np.testing.assert_array_equal(a.eigenvectors, b.eigenvectors)


def test_hermitian_gate():
    h = np.array([[1, 1e-12j], [0, 1]])
    linalg.hermitian_eig(h)  # below the gate: symmetrized
    with pytest.raises(ValueError, match="not Hermitian"):
        linalg.hermitian_eig([[1, 1e-6], [0, 1]])


def test_hermitian_eig_nonconvergence_is_numeric_error(monkeypatch):
    def boom(_):
        raise np.linalg.LinAlgError("no convergence")

    monkeypatch.setattr(np.linalg, "eigh", boom)
    with pytest.raises(NumericError):
        linalg.hermitian_eig(np.eye(2))


def test_qr_retract_gives_isometry():
    rng = np.random.default_rng(1)
    for d in (2, 3, 4):
        x = linalg.qr_retract(_rand(rng, d, 2))
        np.testing.assert_allclose(x.conj().T @ x, np.eye(2), atol=1e-13)
    u = linalg.qr_retract(_rand(rng, 4))
    np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-13)
    # already an isometry with positive R diagonal: unchanged
    np.testing.assert_allclose(linalg.qr_retract(np.eye(4)[:, :2]), np.eye(4)[:, :2])


def test_psd_sqrt():
    rng = np.random.default_rng(2)
    g = _rand(rng, 4)
    p = g @ g.conj().T
    s = linalg.psd_sqrt(p)
    np.testing.assert_allclose(s @ s, p, atol=1e-12)


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        linalg.kron([[np.nan]], [[1]])
