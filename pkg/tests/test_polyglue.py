import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from formring.elemword import GenSymbol, default_table, word
from formring.errors import NilpotentElement, NotACover, NotNormalizedAtZero
from formring.formparam import lambda_max
from formring.poly import PolyRing
from formring.polyglue import (at_zero, check_localization_injectivity, dilate,
                               local_global_glue, random_normalized_word, round_trip_cover,
                               subst, suslin_theta, theta_word)
from formring.ring import make_ring


def _setup(spec, n=2):
    R = make_ring(spec)
    param = lambda_max(R)
    return R, param, PolyRing(R), n


@pytest.fixture(scope="module")
def table():
    return default_table()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_substitution_is_multiplicative(seed):
    R, param, P, n = _setup("Zmod 6, trivial, lambda=1")
    rng = random.Random(seed)
    A = random_normalized_word(P, param, n, 3, rng).evaluate()
    B = random_normalized_word(P, param, n, 3, rng).evaluate()
    X, T = P.var("X"), P.var("T")
    for target in (P.mul(X, T), P.add(X, T), P.scale(rng.randrange(6), X), P.pow(T, 2)):
        s = {"X": target}
        assert subst(A @ B, s) == subst(A, s) @ subst(B, s)


def test_substitution_examples():
    R, param, P, n = _setup("Zmod 6, trivial, lambda=1")
    X, T = P.var("X"), P.var("T")
    w = word(P, param, n, [("eps", 1, 2, X)])
    XT3 = P.mul(X, P.pow(T, 3))
    assert subst(w, {"X": XT3}).items == (GenSymbol("eps", 1, 2, XT3),)
    assert subst(w, {"X": X}) == w
    rng = random.Random(2)
    u = word(P, param, n, [("eps", 2, 1, P.add(P.const(3), X)), ("r", 1, 2, P.const(2))])
    assert at_zero(u.evaluate()) == subst(u, {"X": P.zero}).evaluate()
    assert random_normalized_word(P, param, n, 4, rng).evaluate() != at_zero(u.evaluate())


def test_theta_examples():
    R, param, P, n = _setup("Zmod 6, trivial, lambda=1")
    X = P.var("X")
    one = word(P, param, n).evaluate()
    assert suslin_theta(one).is_identity()
    g = word(P, param, n, [("eps", 1, 2, X)]).evaluate()
    assert suslin_theta(g) == g
    with pytest.raises(NotNormalizedAtZero):
        suslin_theta(word(P, param, n, [("eps", 1, 2, P.add(P.one, X))]).evaluate())


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_theta_boundary_values(seed):
    R, param, P, n = _setup("Zmod 6, trivial, lambda=-1")
    rng = random.Random(seed)
    w = random_normalized_word(P, param, n, 3, rng)
    alpha = w.evaluate()
    theta = suslin_theta(alpha)
    assert subst(theta, {"T": P.zero}) == alpha
    assert subst(theta, {"X": P.zero}).is_identity()
    assert theta_word(w).evaluate() == theta


@pytest.mark.parametrize("seed", range(4))
def test_dilation_contract_z12(seed, table):
    R, param, P, n = _setup("Zmod 12, trivial, lambda=1")
    rng = random.Random(seed)
    w = random_normalized_word(P, param, n, 4, rng)
    (s, local), = round_trip_cover(w, [2])
    dl = dilate(w.evaluate(), s, local, table)
    assert dl.b in {0, 4, 8}
    B = dl.beta.evaluate()
    assert at_zero(B).is_identity()


def test_dilation_with_explicit_local_part(table):
    # alpha = eps(2X) eps(-2X) times a word that is nontrivial only after localizing
    R, param, P, n = _setup("Zmod 12, trivial, lambda=1")
    X = P.var("X")
    w = word(P, param, n, [("eps", 1, 2, P.scale(2, X)), ("eps", 1, 2, P.scale(10, X)),
                           ("eps", 2, 1, P.scale(4, X)), ("r", 1, 2, P.scale(8, X))])
    (s, local), = round_trip_cover(w, [2])
    dl = dilate(w.evaluate(), s, local, table)
    assert dl.b % 4 == 0
    with pytest.raises(NilpotentElement):
        R4, param4, P4, _ = _setup("Zmod 4, trivial, lambda=1")
        v = word(P4, param4, n, [("eps", 1, 2, P4.var("X"))])
        dilate(v.evaluate(), 2, v, table)


def test_dilation_without_localization(table):
    R, param, P, n = _setup("Zmod 6, trivial, lambda=1")
    rng = random.Random(5)
    w = random_normalized_word(P, param, n, 3, rng)
    (s, local), = round_trip_cover(w, [1])
    dl = dilate(w.evaluate(), 1, local, table)
    assert dl.b == 1
    assert dl.beta.evaluate() == subst(w.evaluate(), {"X": P.scale(1, P.var("X"))})


@pytest.mark.parametrize("seed", range(3))
def test_glue_round_trip_z6(seed, table):
    R, param, P, n = _setup("Zmod 6, trivial, lambda=1", 3)
    rng = random.Random(100 + seed)
    w = random_normalized_word(P, param, n, 4, rng)
    alpha = w.evaluate()
    res = local_global_glue(alpha, round_trip_cover(w, [2, 3]), table)
    assert res.word.evaluate() == alpha
    assert R.sum(res.b) == R.one


def test_glue_trivial_cover(table):
    R, param, P, n = _setup("Zmod 6, trivial, lambda=-1")
    rng = random.Random(9)
    w = random_normalized_word(P, param, n, 3, rng)
    res = local_global_glue(w.evaluate(), round_trip_cover(w, [1]), table)
    assert res.word.evaluate() == w.evaluate()
    with pytest.raises(NotACover):
        local_global_glue(w.evaluate(), round_trip_cover(w, [2]), table)


def _gq2_zmod(N):
    # n = 1, lambda = 1, Lambda = {a : 2a = 0}: sigma^T H sigma = H suffices
    out = []
    for a, b, c, d in product(range(N), repeat=4):
        if (2 * a * c) % N == 0 and (2 * b * d) % N == 0 and (a * d + b * c) % N == 1:
            out.append((a, b, c, d))
    return out


def _least_injective_k(N, s, to_local):
    group = _gq2_zmod(N)
    for k in range(0, 6):
        mod = pow(s, k, N)
        ideal = {(mod * x) % N for x in range(N)}
        sub = [g for g in group
               if all((x - y) % N in ideal for x, y in zip(g, (1, 0, 0, 1)))]
        images = {tuple(to_local(x) for x in g) for g in sub}
        if len(images) == len(sub):
            return k
    return None


@pytest.mark.parametrize("N,s,local_mod", [(6, 2, 3), (6, 3, 2), (12, 2, 3)])
def test_injectivity_against_crt_oracle(N, s, local_mod):
    R = make_ring(f"Zmod {N}, trivial, lambda=1")
    rep = check_localization_injectivity(R, s, n=1)
    assert rep.least_k == _least_injective_k(N, s, lambda x: x % local_mod)
    again = check_localization_injectivity(R, s, n=1)
    assert rep.to_json() == again.to_json()


def test_injectivity_trivial_cases():
    F = make_ring("GF 5, trivial, lambda=1")
    rep = check_localization_injectivity(F, 2, k=1, n=1)
    assert rep.verdicts[0][1]
    R = make_ring("Zmod 6, trivial, lambda=1")
    assert check_localization_injectivity(R, 1, n=1).least_k == 0
