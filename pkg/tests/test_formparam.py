from itertools import combinations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from formring.errors import GeneratorOutsideLambdaMax
from formring.formparam import (enumerate_form_params, form_param_closure, form_param_from_spec,
                                induce_localized, lambda_max, lambda_min, poly_in_lambda,
                                poly_param_member)
from formring.poly import PolyRing
from formring.ring import localize_at, make_ring

from conftest import BASE_SPECS, form_ring_grid, grid_id


def _subsets(R):
    els = list(R.elements)
    for k in range(len(els) + 1):
        for c in combinations(els, k):
            yield frozenset(c)


def _brute_form_params(R):
    """Additive subgroups between the bounds closed under x_bar * a * x."""
    lo = {R.sub(a, R.mul(R.lam, R.conj(a))) for a in R.elements}
    hi = {a for a in R.elements if a == R.neg(R.mul(R.lam, R.conj(a)))}
    out = set()
    for S in _subsets(R):
        if not (lo <= S <= hi):
            continue
        if any(R.add(a, b) not in S for a, b in product(S, S)):
            continue
        if any(R.mul(R.mul(R.conj(x), a), x) not in S for a in S for x in R.elements):
            continue
        out.add(S)
    return out


@pytest.mark.parametrize("spec", BASE_SPECS)
def test_enumeration_matches_subset_filter(spec):
    from formring.ring import all_lambdas
    base = make_ring(spec)
    for lam in all_lambdas(base):
        R = base.with_lambda(lam)
        got = {p.elements for p in enumerate_form_params(R)}
        assert got == _brute_form_params(R)


def test_bounds_examples():
    R = make_ring("Zmod 6, trivial, lambda=-1")
    assert lambda_min(R).elements == {0, 2, 4}
    assert lambda_max(R).elements == set(range(6))
    R = make_ring("Zmod 6, trivial, lambda=1")
    assert lambda_min(R).elements == {0}
    assert lambda_max(R).elements == {0, 3}
    F = make_ring("GF 2, trivial, lambda=1")
    assert lambda_min(F).elements == {0} and lambda_max(F).elements == {0, 1}


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 8, 9, 12])
def test_trivial_involution_bounds(n):
    R = make_ring(f"Zmod {n}, trivial, lambda=-1")
    assert lambda_min(R).elements == {(2 * a) % n for a in range(n)}
    assert lambda_max(R).elements == set(range(n))
    R = make_ring(f"Zmod {n}, trivial, lambda=1")
    assert lambda_min(R).elements == {0}
    assert lambda_max(R).elements == {a for a in range(n) if (2 * a) % n == 0}


def test_closure_examples():
    R = make_ring("Zmod 6, trivial, lambda=1")
    assert form_param_closure(R, []).elements == {0}
    assert form_param_closure(R, [3]).elements == {0, 3}
    Rm = make_ring("Zmod 6, trivial, lambda=-1")
    assert form_param_closure(Rm, [1]).elements == set(range(6))
    with pytest.raises(GeneratorOutsideLambdaMax):
        form_param_closure(R, [1])


def test_enumeration_examples():
    def sets(spec):
        return [sorted(p.elements) for p in enumerate_form_params(make_ring(spec))]
    assert sets("GF 2, trivial, lambda=1") == [[0], [0, 1]]
    assert sets("Zmod 6, trivial, lambda=1") == [[0], [0, 3]]
    assert sets("Zmod 6, trivial, lambda=-1") == [[0, 2, 4], list(range(6))]


@pytest.mark.parametrize("item", form_ring_grid(), ids=grid_id)
def test_bounds_closed_under_conjugation(item):
    R, param = item
    for P in (lambda_min(R), lambda_max(R), param):
        for a in P.elements:
            for x in R.elements:
                assert R.mul(R.mul(R.conj(x), a), x) in P.elements


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(form_ring_grid()), st.data())
def test_closure_idempotent_and_monotone(item, data):
    R, _ = item
    hi = sorted(lambda_max(R).elements)
    g1 = data.draw(st.lists(st.sampled_from(hi), max_size=3))
    g2 = data.draw(st.lists(st.sampled_from(hi), max_size=2))
    A = form_param_closure(R, g1)
    assert form_param_closure(R, sorted(A.elements)).elements == A.elements
    B = form_param_closure(R, g1 + g2)
    assert A.elements <= B.elements


def test_localized_param():
    R = make_ring("Zmod 6, trivial, lambda=1")
    loc = localize_at(R, 3)
    img = induce_localized(form_param_closure(R, [3]), loc)
    assert img.elements == set(loc.target.elements)
    assert induce_localized(lambda_min(R), localize_at(R, 2)).elements == \
        lambda_min(localize_at(R, 2).target).elements
    same = localize_at(R, 1)
    assert induce_localized(lambda_max(R), same).elements == lambda_max(R).elements


def test_poly_membership_examples():
    Rm = make_ring("Zmod 6, trivial, lambda=-1")
    P = PolyRing(Rm)
    lmin = lambda_min(Rm)
    assert poly_param_member(lmin, P.const(2), 3, P)
    assert poly_param_member(lmin, P.monomial(2, X=1), 3, P)
    R = make_ring("Zmod 6, trivial, lambda=1")
    P = PolyRing(R)
    assert not poly_param_member(lambda_min(R), P.monomial(3, X=1), 4, P)
    # odd-degree terms need Lambda_min, squares only Lambda
    lmax = lambda_max(R)
    assert not poly_param_member(lmax, P.monomial(3, X=1), 4, P)
    assert poly_param_member(lmax, P.monomial(3, X=2), 4, P)
    assert not poly_in_lambda(lmax, P, P.monomial(3, X=1))


@pytest.mark.parametrize("spec,D", [("Zmod 6, trivial, lambda=1", 3),
                                    ("Zmod 6, trivial, lambda=-1", 2),
                                    ("Zmod 4, trivial, lambda=1", 3),
                                    ("Zmod 4, trivial, lambda=-1", 3),
                                    ("GF 3, trivial, lambda=-1", 2),
                                    ("GaussMod 3, conj, lambda=1", 1)])
def test_truncated_closure_agrees_with_square_rule(spec, D):
    R = make_ring(spec)
    P = PolyRing(R)
    for param in enumerate_form_params(R):
        for coeffs in product(R.elements, repeat=D + 1):
            p = P.from_coeffs(list(coeffs))
            assert bool(poly_param_member(param, p, D, P)) == poly_in_lambda(param, P, p)


def test_param_from_spec():
    R = make_ring("Zmod 6, trivial, lambda=1")
    assert form_param_from_spec(R, "max").elements == {0, 3}
    assert form_param_from_spec(R, "min").elements == {0}
    assert form_param_from_spec(R, "gens:[3]").elements == {0, 3}
    with pytest.raises(ValueError):
        form_param_from_spec(R, "everything")
