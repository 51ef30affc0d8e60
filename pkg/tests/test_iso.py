import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncdomain.acceptance import random_symbol
from ncdomain.domains import DomainError, MatrixTuple, Status, domain_membership
from ncdomain.fock import PolyElement
from ncdomain.iso import (ConstraintSystem, IsoError, LinearCandidate, Outcome, degree_d_constraints,
                          disk_detector, disk_witness, linear_maps, obstruction_search, pushforward,
                          sunada_equivalence, zero_fixing_known)
from ncdomain.symbol import Symbol, collapse, normalize, permute, rescale, symbol_from_terms
from ncdomain.weights import compute_weights
from ncdomain.words import enumerate_words, level_offset

from conftest import symbols

SWAP = (2, 1)


def test_sunada_flagship(f, g):
    m = sunada_equivalence(f, g)
    assert m.sigma == (1, 2) and m.s == (1.0, 1.0)


def test_sunada_planted(f):
    h = permute(rescale(f, (2, 1)), SWAP)
    matches = sunada_equivalence(f, h, all=True)
    assert any(m.sigma == SWAP and np.allclose(m.s, (1, 4), rtol=1e-12) for m in matches)
    for m in matches:
        # the match carries D_f onto D_h on sample points
        for z in [(0.3, 0.4), (0.7, 0.1j)]:
            assert collapse(h).value(m.apply(z)) == pytest.approx(collapse(f).value(z), rel=1e-12)


def test_sunada_support_mismatch(f):
    assert sunada_equivalence(Symbol.linear(2), f) is None
    assert sunada_equivalence(Symbol.linear(2), f, all=True) == []
    assert sunada_equivalence(Symbol.linear(2), Symbol.linear(3)) is None


def test_sunada_first_in_lex_order():
    s = Symbol.linear(2)
    assert sunada_equivalence(s, s).sigma == (1, 2)
    assert [m.sigma for m in sunada_equivalence(s, s, all=True)] == [(1, 2), (2, 1)]


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 3), st.integers(0, 2 ** 32 - 1))
def test_sunada_symmetric_up_to_inversion(n, seed):
    rng = np.random.default_rng(seed)
    f = random_symbol(rng, n)
    sigma = tuple(int(x) + 1 for x in rng.permutation(n))
    g = permute(rescale(f, rng.uniform(0.5, 2, n)), sigma)
    m = sunada_equivalence(f, g)
    assert m is not None
    back = sunada_equivalence(g, f, all=True)
    inv = m.inverse()
    assert any(b.sigma == inv.sigma and np.allclose(b.s, inv.s, rtol=1e-9) for b in back)


def test_linear_candidate_validation():
    LinearCandidate.two_by_two(0.3)
    with pytest.raises(IsoError):
        LinearCandidate(np.array([[0.5, 0.5], [0.2, 0.8]]))
    with pytest.raises(IsoError):
        LinearCandidate(np.ones((2, 3)) / 2)


def test_flagship_constraint_polynomial(f, g):
    sys2 = degree_d_constraints(f, g, 2)
    polys = dict(zip(sys2.words, sys2.polynomials()))
    r = polys[(1, 1)]
    assert np.allclose(r.coef[:3], [0, -2 / 3, 2 / 3], atol=1e-15)
    for p in np.linspace(0, 1, 11):
        P = LinearCandidate.two_by_two(p).P
        assert np.allclose([q(p) for q in sys2.polynomials()], sys2.residuals(P), atol=1e-14)


def test_degree_constraints_need_normalized(f):
    with pytest.raises(IsoError):
        degree_d_constraints(rescale(f, (2, 1)), f, 2)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_permutation_reduces_to_weight_matching(data):
    f = normalize(data.draw(symbols()))[0]
    g = normalize(data.draw(symbols(n=f.n)))[0]
    sigma = tuple(data.draw(st.permutations(range(1, f.n + 1))))
    P = LinearCandidate.from_permutation(sigma).P
    wf, wg = compute_weights(f, 3), compute_weights(g, 3)
    for d in (1, 2, 3):
        system = degree_d_constraints(f, g, d, wf, wg)
        words = enumerate_words(f.n, d)[level_offset(f.n, d):]
        expected = [1 / wg[tuple(sigma[i - 1] for i in beta)] - 1 / wf[beta] for beta in words]
        assert np.allclose(system.residuals(P), expected, atol=1e-12)


def test_flagship_obstructed(f, g):
    v = obstruction_search(f, g, 2, resolution=10001)
    assert v.outcome == Outcome.OBSTRUCTED and v.exit_code == 2
    zs = v.certificate.zero_set
    assert zs.word == "11" and zs.zeros == pytest.approx([0.0, 1.0], abs=1e-9)
    for p in zs.zeros:
        assert zs.violations[p]["21"] == pytest.approx(1 - math.sqrt(2 / 3), abs=1e-12)
    assert v.certificate.lower_bound > 0
    assert "zero character" in v.assumption


def test_flagship_obstructed_at_higher_degree(f, g):
    assert obstruction_search(f, g, 3, resolution=2001).outcome == Outcome.OBSTRUCTED


def test_candidate_cases(f):
    v = obstruction_search(f, f, 4)
    assert v.outcome == Outcome.CANDIDATE_FOUND and v.exit_code == 0
    assert np.allclose(v.candidate.P, np.eye(2))
    v = obstruction_search(f, permute(f, SWAP), 3)
    assert v.outcome == Outcome.CANDIDATE_FOUND
    assert np.allclose(v.candidate.P, [[0, 1], [1, 0]])


def test_disk_cases(f):
    assert obstruction_search(f, Symbol.linear(2), 2).outcome == Outcome.OBSTRUCTED
    assert obstruction_search(Symbol.linear(2), Symbol.linear(2), 3).outcome == Outcome.CANDIDATE_FOUND


def test_search_arguments(f):
    with pytest.raises(IsoError):
        obstruction_search(f, f, 1)
    with pytest.raises(IsoError):
        obstruction_search(f, f, 2, resolution=5)
    with pytest.raises(IsoError):
        obstruction_search(f, Symbol.linear(3), 2)


def test_single_variable():
    a = Symbol(1, {(1,): 1.0, (1, 1): 0.5})
    b = Symbol(1, {(1,): 1.0, (1, 1): 0.25})
    assert obstruction_search(a, a, 3).outcome == Outcome.CANDIDATE_FOUND
    assert obstruction_search(a, b, 3).outcome == Outcome.OBSTRUCTED


def test_three_variables():
    f3 = symbol_from_terms(3, [("1", 1), ("2", 1), ("3", 1), ("12", 1)])
    sigma = (3, 1, 2)
    v = obstruction_search(f3, permute(f3, sigma), 2)
    assert v.outcome == Outcome.CANDIDATE_FOUND
    assert obstruction_search(f3, Symbol.linear(3), 2).outcome == Outcome.OBSTRUCTED
    # all degree-2 weights of g lie below the smallest target 1/2: range obstruction
    g3 = symbol_from_terms(3, [("1", 1), ("2", 1), ("3", 1)] +
                           [(f"{i}{j}", 2) for i in "123" for j in "123"])
    v = obstruction_search(f3, g3, 2)
    assert v.outcome == Outcome.OBSTRUCTED and v.certificate.method == "range"


def test_three_variables_deterministic_with_seed():
    a = symbol_from_terms(3, [("1", 1), ("2", 1), ("3", 1), ("12", 0.5), ("23", 0.5)])
    b = symbol_from_terms(3, [("1", 1), ("2", 1), ("3", 1), ("12", 0.5), ("31", 0.5)])
    v1 = obstruction_search(a, b, 2, seed=7, restarts=3)
    v2 = obstruction_search(a, b, 2, seed=7, restarts=3)
    assert v1.outcome == v2.outcome and v1.residual == v2.residual


@settings(max_examples=25, deadline=None)
@given(symbols(max_degree=3))
def test_self_candidate(s):
    s = normalize(s)[0]
    for d in (2, 4):
        assert obstruction_search(s, s, d, resolution=101).outcome == Outcome.CANDIDATE_FOUND


def test_disk_detector_examples(f, g):
    assert disk_detector(Symbol.linear(2, [2, 3]))
    assert disk_detector(Symbol.linear(4))
    assert not disk_detector(f) and not disk_detector(g)
    assert disk_witness(Symbol.linear(2, [2, 3])) == (math.sqrt(2), math.sqrt(3))
    assert disk_witness(f) is None


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.2, 5.0), min_size=1, max_size=3))
def test_disk_implies_identity_candidate(c):
    s = Symbol.linear(len(c), c)
    assert disk_detector(s)
    v = obstruction_search(normalize(s)[0], Symbol.linear(len(c)), 3, resolution=101)
    assert v.outcome == Outcome.CANDIDATE_FOUND
    assert np.allclose(v.candidate.P, np.eye(len(c)))


def test_zero_fixing_known(f, g):
    assert zero_fixing_known(f, g)
    assert not zero_fixing_known(f, Symbol.linear(2))


def test_pushforward_examples(f):
    rng = np.random.default_rng(0)
    T = MatrixTuple(tuple(0.3 * rng.normal(size=(2, 2)) for _ in range(2)))
    ident = [PolyElement.monomial(2, (1,)), PolyElement.monomial(2, (2,))]
    out = pushforward(ident, T, f)
    assert all(np.array_equal(a, b) for a, b in zip(out.mats, T.mats))
    M = np.array([[0.6, 0.8], [-0.8, 0.6]])
    out = pushforward(linear_maps(M), T, f)
    assert np.allclose(out[1], 0.6 * T[1] + 0.8 * T[2])
    zero = pushforward([PolyElement(2, {(1,): 1, (1, 2): 3})] * 2, MatrixTuple.zeros(2, 2), f)
    assert not np.any(zero.mats[0]) and not np.any(zero.mats[1])
    with pytest.raises(DomainError):
        pushforward(ident, MatrixTuple.scalars([0.9, 0.9]), f)


def test_pushforward_preserves_membership(f):
    # the swap carries D_f onto D_{permute(f, swap)} with the same margin
    rng = np.random.default_rng(5)
    swap = linear_maps(np.array([[0, 1], [1, 0]]))
    h = permute(f, SWAP)
    for _ in range(50):
        T = MatrixTuple(tuple(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(2)))
        margin = domain_membership(f, T).margin
        if margin < -1e-9:
            continue
        image = pushforward(swap, T, f)
        assert domain_membership(h, image).margin == pytest.approx(margin, abs=1e-12)
        image = pushforward([PolyElement.monomial(2, (1,)), PolyElement.monomial(2, (2,))], T, f)
        assert domain_membership(f, image).status != Status.OUTSIDE


def test_constraint_system_is_exposed():
    assert ConstraintSystem.stochastic_residuals(np.eye(3)).tolist() == [0.0] * 6
