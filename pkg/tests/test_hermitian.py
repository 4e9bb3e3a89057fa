import numpy as np
import pytest
from hypothesis import given, strategies as st

from bltransform.hermitian import (
    DimensionError,
    HermitianForm,
    NotPositiveDefiniteError,
    block_diag,
    congruence,
    evaluate,
    generalized_eigvals,
    invert,
    is_positive_definite,
    random_invertible,
    random_pd,
    relative_error,
    sqrtm_psd,
)

from conftest import cvec


def test_evaluate_convention_is_linear_in_first_slot(rng):
    G = np.array([[2.0, 1j], [-1j, 3.0]])
    v, w = cvec(rng, 2), cvec(rng, 2)
    assert evaluate(G, v, w) == pytest.approx(sum(v[j] * G[j, k] * np.conj(w[k]) for j in range(2) for k in range(2)))
    c = 0.3 - 2j
    assert evaluate(G, c * v, w) == pytest.approx(c * evaluate(G, v, w))
    assert evaluate(G, v, c * w) == pytest.approx(np.conj(c) * evaluate(G, v, w))


def test_evaluate_hermitian_symmetry_and_realness(rng):
    H = random_pd(3, rng, 30.0)
    v, w = cvec(rng, (1000, 3)), cvec(rng, (1000, 3))
    assert np.allclose(evaluate(H, v, w), np.conj(evaluate(H, w, v)))
    q = evaluate(H, v, v)
    assert np.max(np.abs(q.imag)) <= 1e-12 * np.max(np.abs(q.real))
    assert np.all(q.real > 0)


def test_non_hermitian_gram_rejected():
    with pytest.raises(ValueError):
        HermitianForm(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(DimensionError):
        HermitianForm(np.ones((2, 3)))


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        evaluate(np.eye(2), np.ones(3), np.ones(3))
    with pytest.raises(DimensionError):
        congruence(np.eye(2), np.eye(3))


def test_congruence_examples(rng):
    A = np.diag([2.0, 1.0])
    assert np.allclose(congruence(np.eye(2), A).gram, np.diag([4.0, 1.0]))
    H = random_pd(3, rng)
    B = random_invertible(3, rng)
    u, v = cvec(rng, 3), cvec(rng, 3)
    assert evaluate(congruence(H, B), u, v) == pytest.approx(evaluate(H, B @ u, B @ v))


def test_invert_examples_and_errors(rng):
    assert np.allclose(invert(np.diag([2.0, 4.0])).gram, np.diag([0.5, 0.25]))
    with pytest.raises(NotPositiveDefiniteError):
        invert(np.diag([1.0, 0.0]))
    with pytest.raises(NotPositiveDefiniteError):
        invert(np.diag([1.0, -1.0]))


def test_positive_definite_flag():
    assert is_positive_definite(np.eye(2))
    assert not is_positive_definite(np.diag([1.0, -1e-3]))


def test_random_pd_condition(rng):
    H = random_pd(4, rng, 100.0)
    lam = H.eigvalsh()
    assert lam.max() / lam.min() == pytest.approx(100.0)


def test_sqrtm_and_generalized_eigs(rng):
    H = random_pd(3, rng, 10.0)
    S = sqrtm_psd(H.gram)
    assert np.allclose(S @ S, H.gram)
    lam = generalized_eigvals(H.scaled(3.0), H)
    assert np.allclose(lam, 3.0)


def test_block_diag_and_json_roundtrip(rng):
    H = block_diag(HermitianForm.diag([0.5]), HermitianForm.identity(2).scaled(0.75))
    assert np.allclose(H.gram, np.diag([0.5, 0.75, 0.75]))
    K = random_pd(2, rng)
    assert np.array_equal(HermitianForm.from_json(K.to_json()).gram, K.gram)


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@given(seeds, st.integers(min_value=1, max_value=4), st.floats(min_value=1.0, max_value=1e3))
def test_congruence_round_trip(seed, n, cond):
    rng = np.random.default_rng(seed)
    H = random_pd(n, rng, cond)
    A = random_invertible(n, rng, 10.0)
    back = congruence(congruence(H, A), np.linalg.inv(A))
    assert relative_error(back, H) <= 1e-9


@given(seeds, st.integers(min_value=1, max_value=4), st.floats(min_value=1.0, max_value=1e3))
def test_invert_is_involution(seed, n, cond):
    H = random_pd(n, np.random.default_rng(seed), cond)
    assert relative_error(invert(invert(H)), H) <= 1e-9
