import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncdomain.acceptance import random_homogeneous, random_row_contraction
from ncdomain.domains import DomainError, MatrixTuple, defect_matrix
from ncdomain.fock import (PolyElement, TruncatedFock, build_shifts, defect_operator, evaluate,
                           homogeneous_norm, homogeneous_part, monomial_norm, numerical_norm,
                           parse_poly, poisson_kernel, psd_sqrt, radial_truncation, read_shifts,
                           serialize_poly, vacuum_projection, write_shifts)
from ncdomain.symbol import Symbol
from ncdomain.weights import compute_weights

from conftest import symbols

I = 1j


def test_shift_entry(f):
    W = build_shifts(f, 2)
    fock = W.fock
    assert W[1][fock.index((1, 2)), fock.index((2,))] == pytest.approx(math.sqrt(0.5), abs=1e-15)


def test_top_level_columns_vanish(f):
    W = build_shifts(f, 3)
    top = [W.fock.index(w) for w in W.fock.words() if len(w) == 3]
    for m in W.mats:
        assert abs(m[:, top]).sum() == 0


def test_monomial_norms(f, g):
    assert monomial_norm(compute_weights(f, 2), (1, 2)) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert monomial_norm(compute_weights(g, 2), (1, 2)) == pytest.approx(math.sqrt(2 / 3), abs=1e-12)
    assert monomial_norm(compute_weights(f, 2), (1,)) == 1.0


def test_homogeneous_norm_examples(f):
    wf = compute_weights(f, 3)
    assert homogeneous_norm(wf, {(1, 1): 1, (1, 2): 1}) == pytest.approx(math.sqrt(1.5), abs=1e-12)
    W = build_shifts(f, 3)
    numeric = numerical_norm(W.assemble(PolyElement(2, {(1, 1): 1, (1, 2): 1})))
    assert numeric == pytest.approx(math.sqrt(1.5), abs=1e-10)
    assert homogeneous_norm(wf, {(2, 1): 3}) == pytest.approx(3 * monomial_norm(wf, (2, 1)))
    lin = compute_weights(Symbol.linear(3), 1)
    c = {(1,): 1 + 2 * I, (2,): -0.5, (3,): 2 * I}
    assert homogeneous_norm(lin, c) == pytest.approx(math.sqrt(5 + 0.25 + 4), abs=1e-12)
    with pytest.raises(ValueError):
        homogeneous_norm(wf, {(1,): 1, (1, 2): 1})


def test_numerical_norm_basics():
    assert numerical_norm(np.zeros((3, 3))) == 0.0
    assert numerical_norm(np.eye(4)) == 1.0
    with pytest.raises(ValueError):
        numerical_norm(np.array([[np.nan]]))


@pytest.mark.parametrize("name", ["f", "g", "linear"])
@pytest.mark.parametrize("L", [4, 5])
def test_defect_is_vacuum_projection(name, L, f, g):
    sym = {"f": f, "g": g, "linear": Symbol.linear(2)}[name]
    D = defect_operator(sym, L)
    assert numerical_norm(D - vacuum_projection(D.shape[0])) <= 1e-12


def test_defect_needs_enough_levels():
    s = Symbol(2, {(1,): 1, (2,): 1, (1, 1, 2): 0.3})
    with pytest.raises(ValueError):
        defect_operator(s, 2)


def test_evaluate_examples():
    A = np.array([[1, 2], [3, 4]], dtype=complex)
    B = np.array([[0, 1], [1, I]], dtype=complex)
    T = MatrixTuple((A, B))
    assert np.array_equal(evaluate(PolyElement.monomial(2, (1,)), T), A)
    assert np.array_equal(evaluate(PolyElement.monomial(2, ()), T), np.eye(2))
    assert np.allclose(evaluate(PolyElement.monomial(2, (1, 2)), T), A @ B)
    with pytest.raises(DomainError):
        evaluate(PolyElement.monomial(3, (1,)), T)


def test_radial_and_homogeneous_parts():
    p = PolyElement(2, {(1,): 1, (1, 2): 1})
    assert radial_truncation(p, 0.5) == PolyElement(2, {(1,): 0.5, (1, 2): 0.25})
    assert radial_truncation(PolyElement(2, {(): 3}), 0.3) == PolyElement(2, {(): 3})
    assert homogeneous_part(p, 1) == PolyElement(2, {(1,): 1})
    assert homogeneous_part(p, 5).coeffs == {}
    with pytest.raises(ValueError):
        radial_truncation(p, 1.0)


def test_poisson_zero_tuple(f):
    pk = poisson_kernel(f, MatrixTuple.zeros(2, 3), 6)
    assert pk.rho1 == 0.0 and pk.rho2 == 0.0
    assert np.array_equal(pk.K[:3], np.eye(3))
    assert not pk.K[3:].any()


def test_poisson_scalar_decay(f):
    T = MatrixTuple.scalars([0.3, 0.2])
    rhos = [poisson_kernel(f, T, L).rho1 for L in (4, 8, 12)]
    assert rhos[2] <= 1e-6
    assert rhos[0] > rhos[1] > rhos[2]


def test_poisson_decreases_with_L():
    lin = Symbol.linear(2)
    T0 = random_row_contraction(np.random.default_rng(3), 2, 2, 1.0)
    for r in (0.5, 0.9):
        T = T0.scaled(r)
        res = [poisson_kernel(lin, T, L) for L in (4, 8, 12)]
        assert res[0].rho1 > res[1].rho1 > res[2].rho1
        assert res[0].rho2 > res[1].rho2 > res[2].rho2


def test_poisson_rejects_outside_tuple(f):
    with pytest.raises(DomainError, match="not in domain"):
        poisson_kernel(f, MatrixTuple.scalars([0.9, 0.9]), 4)


def test_psd_sqrt():
    D = np.array([[4, 0], [0, 9]], dtype=float)
    assert np.allclose(psd_sqrt(D), np.diag([2, 3]))
    assert np.allclose(psd_sqrt(np.diag([1.0, -1e-13])), np.diag([1.0, 0.0]))


def test_poly_roundtrip():
    text = "n=2\ne -2I\n2 0.5\n12 1+0.25I\n"
    p = parse_poly(text)
    assert p.coeffs == {(): -2j, (2,): 0.5, (1, 2): 1 + 0.25j}
    assert parse_poly(serialize_poly(p)) == p


def test_shift_file_roundtrip(g):
    W = build_shifts(g, 3)
    buf = io.StringIO()
    write_shifts(W, buf)
    first = buf.getvalue().splitlines()[0]
    assert first == f"{W.fock.dim} 2 3"
    buf.seek(0)
    fock, mats = read_shifts(buf)
    assert fock == TruncatedFock(2, 3)
    for a, b in zip(mats, W.mats):
        assert abs(a - b).max() == 0


@settings(max_examples=25, deadline=None)
@given(symbols(n=2), st.integers(0, 3), st.integers(0, 2 ** 32 - 1))
def test_norm_oracle(s, k, seed):
    W = build_shifts(s, k + 1)
    x = random_homogeneous(np.random.default_rng(seed), 2, k)
    closed = homogeneous_norm(W.weights, x)
    assert abs(closed - numerical_norm(W.assemble(PolyElement(2, x)))) <= 1e-10 * max(1, closed)


@settings(max_examples=25, deadline=None)
@given(symbols())
def test_generator_norms(s):
    W = build_shifts(s, 3)
    for i in range(1, s.n + 1):
        assert numerical_norm(W[i]) == pytest.approx(1 / math.sqrt(W.weights[(i,)]), rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(symbols(max_degree=3))
def test_defect_property(s):
    D = defect_operator(s, 3)
    assert numerical_norm(D - vacuum_projection(D.shape[0])) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(symbols(n=2))
def test_word_product_consistency(s):
    L = 4
    W = build_shifts(s, L)
    low = [W.fock.index(w) for w in W.fock.words() if len(w) <= L - 2]
    for k in (1, 2):
        for l in (1, 2):
            lhs = (W[k] @ W[l])[:, low].toarray()
            rhs = W.word_operator((k, l))[:, low].toarray()
            assert np.allclose(lhs, rhs, atol=1e-15)


@settings(max_examples=50)
@given(st.lists(st.integers(1, 2), max_size=3).map(tuple),
       st.lists(st.integers(1, 2), max_size=3).map(tuple), st.integers(0, 2 ** 32 - 1))
def test_evaluate_multiplicative(alpha, beta, seed):
    rng = np.random.default_rng(seed)
    T = MatrixTuple(tuple(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(2)))
    pa, pb = PolyElement.monomial(2, alpha), PolyElement.monomial(2, beta)
    assert np.allclose(evaluate(pa * pb, T), evaluate(pa, T) @ evaluate(pb, T))


def test_delta_matches_defect(f):
    T = MatrixTuple.scalars([0.3, 0.2])
    pk = poisson_kernel(f, T, 5)
    assert np.allclose(pk.delta @ pk.delta, defect_matrix(f, T))
