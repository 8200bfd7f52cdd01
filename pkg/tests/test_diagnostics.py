import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scarcechain.assembly import FEvaluator
from scarcechain.diagnostics import (JacobianBundle, classify, jacobi_eigenvalues, jacobian,
                                     lowest_eigenvalue)

from _builders import random_tiny_model


def test_trivial_eigenvalues():
    for n in (1, 3, 7):
        assert lowest_eigenvalue(np.eye(n)) == pytest.approx(1.0, abs=1e-12)
    assert lowest_eigenvalue(np.diag([2.0, 5.0])) == 2.0
    assert lowest_eigenvalue([[0.0, 1.0], [1.0, 0.0]]) == pytest.approx(-1.0, abs=1e-12)


def test_rejects_non_symmetric():
    with pytest.raises(ValueError):
        lowest_eigenvalue([[0.0, 1.0], [-1.0, 0.0]])


def _char_roots(S):
    """Closed-form eigenvalues of a symmetric 2x2 or 3x3 matrix."""
    if len(S) == 2:
        a, b, c = S[0, 0], S[0, 1], S[1, 1]
        r = np.hypot((a - c) / 2, b)
        return sorted([(a + c) / 2 - r, (a + c) / 2 + r])
    # trigonometric solution of the depressed cubic
    q = np.trace(S) / 3
    p1 = S[0, 1] ** 2 + S[0, 2] ** 2 + S[1, 2] ** 2
    p2 = ((S[0, 0] - q) ** 2 + (S[1, 1] - q) ** 2 + (S[2, 2] - q) ** 2 + 2 * p1)
    p = np.sqrt(p2 / 6)
    if p == 0:
        return [q] * 3
    B = (S - q * np.eye(3)) / p
    r = np.clip(np.linalg.det(B) / 2, -1, 1)
    phi = np.arccos(r) / 3
    e1 = q + 2 * p * np.cos(phi)
    e3 = q + 2 * p * np.cos(phi + 2 * np.pi / 3)
    return sorted([e1, 3 * q - e1 - e3, e3])


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 3), st.integers(0, 2**32 - 1))
def test_jacobi_matches_closed_form(n, seed):
    A = np.random.default_rng(seed).uniform(-10, 10, (n, n))
    S = (A + A.T) / 2
    assert np.allclose(jacobi_eigenvalues(S), _char_roots(S), atol=1e-8, rtol=0)


def test_decomposition_identities(ex11):
    b = jacobian(ex11.model)
    assert np.abs(b.J - b.D - b.N).max() == 0
    assert np.array_equal(b.N_bar, b.N_bar.T)
    assert np.abs(b.J_sym - b.J_sym.T).max() <= 1e-12
    assert not np.diag(b.N).any()


def test_single_variable_bundle():
    b = JacobianBundle.from_matrix([[5.0]])
    assert b.D.tolist() == [[5.0]] and b.N.tolist() == [[0.0]]


def test_classification_cases():
    v = classify(np.eye(4))
    assert v.kind == "strongly" and v.lambda_min_sym == pytest.approx(1.0)
    v = classify(np.array([[0.0, 1.0], [-1.0, 0.0]]))
    assert v.kind == "monotone" and v.lambda_min_sym == 0.0
    assert classify(np.array([[1.0, 0.0], [0.0, -1.0]])).kind == "indefinite"


def test_uniqueness_condition():
    v = classify(np.array([[3.0, 1.0], [1.0, 3.0]]))
    assert v.uniqueness_condition_holds
    # a zero diagonal row makes the inequality fail
    assert not classify(np.array([[0.0, 1.0], [-1.0, 2.0]])).uniqueness_condition_holds


def test_glove_network_is_monotone(ex11):
    v = classify(ex11.model)
    assert v.lambda_min_sym >= -1e-6
    assert v.kind == "monotone"
    assert v.lambda_min_sym == pytest.approx(np.linalg.eigvalsh(jacobian(ex11.model).J_sym)[0],
                                             abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_random_instances_agree_with_lapack(seed):
    model = random_tiny_model(np.random.default_rng(seed))
    b = jacobian(FEvaluator(model))
    assert np.allclose(jacobi_eigenvalues(b.N_bar), np.linalg.eigvalsh(b.N_bar), atol=1e-9)
