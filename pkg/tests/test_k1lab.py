import random

import numpy as np
import pytest

from formring.errors import CapExceeded, TooLarge
from formring.formparam import form_param_closure, lambda_max
from formring.k1lab import (MatOps, closure, enum_eq, enum_gq_bruteforce, enum_gq_literal,
                            eq_generators, k1_compute, stab_map_test, stabilizer_decomp_test,
                            unimodular_orbit_test, vector_orbit, whitehead_test)
from formring.quadgroup import is_in_gq, matrix
from formring.ring import make_ring

F2 = make_ring("GF 2, trivial, lambda=1")
F3_SP = make_ring("GF 3, trivial, lambda=-1")


def _batch_preserves_form(els, lam, p):
    """sigma^T H sigma == H mod p for every stored matrix (trivial involution)."""
    N = els.shape[1]
    n = N // 2
    H = np.zeros((N, N), dtype=np.int64)
    H[np.arange(n), n + np.arange(n)] = 1
    H[n + np.arange(n), np.arange(n)] = lam
    S = els.astype(np.int64)
    out = np.einsum("kji,jl,klm->kim", S, H, S) % p
    return np.all(out == H % p, axis=(1, 2))


def test_trivial_closure():
    G = closure([], F2, 2)
    assert G.order == 1
    G = closure([np.eye(4, dtype=np.int64)], F2, 2)
    assert G.order == 1


def test_sp4_f2_counts():
    param = lambda_max(F2)
    brute = enum_gq_bruteforce(F2, param, 2)
    literal = enum_gq_literal(F2, param, 2)
    eq = enum_eq(F2, param, 2)
    assert brute.order == literal.order == eq.order == 720
    assert np.array_equal(brute.keys, literal.keys)
    assert np.array_equal(brute.keys, eq.keys)


def test_quadratic_type_f2_is_strict_subgroup():
    small = enum_gq_bruteforce(F2, form_param_closure(F2, []), 2)
    big = enum_gq_bruteforce(F2, lambda_max(F2), 2)
    assert small.order == 72
    assert np.all(big.contains(small.elements))
    assert enum_gq_literal(F2, form_param_closure(F2, []), 2).order == 72


def test_closure_elements_pass_membership():
    param = lambda_max(F2)
    eq = enum_eq(F2, param, 2)
    for rows in eq:
        assert is_in_gq(matrix(2, F2, param, rows))


def test_brute_force_limits():
    with pytest.raises(TooLarge):
        enum_gq_bruteforce(make_ring("Zmod 6, trivial, lambda=1"), lambda_max(make_ring(
            "Zmod 6, trivial, lambda=1")), 3)
    with pytest.raises(CapExceeded) as info:
        enum_eq(F3_SP, lambda_max(F3_SP), 2, cap=1000)
    partial = info.value.partial
    assert not partial.complete and partial.order > 1000


def test_k1_f2_symplectic():
    rep = k1_compute(F2, lambda_max(F2), 2)
    assert rep.coset_count == 1 and rep.normal
    assert rep.gq_order == rep.eq_order * rep.coset_count
    assert rep.below_stable_range
    assert rep.to_json()["invariants"] == []
    assert np.array_equal(rep.representatives[0], np.eye(4, dtype=rep.representatives[0].dtype))


def test_k1_f2_quadratic_type():
    rep = k1_compute(F2, form_param_closure(F2, []), 2)
    assert 72 % rep.coset_count == 0
    assert rep.gq_order == rep.eq_order * rep.coset_count
    if rep.normal and rep.abelian:
        assert int(np.prod(rep.invariants or [1])) == rep.coset_count


def test_k1_f3_symplectic():
    rep = k1_compute(F3_SP, lambda_max(F3_SP), 2)
    assert rep.gq_order == 51840
    assert rep.coset_count == 1


def test_orbit_transitivity_f2():
    rep = unimodular_orbit_test(F2, lambda_max(F2), 3)
    assert rep.orbit_size == rep.um_size == 63
    assert rep.transitive and rep.in_hypothesis
    zero = unimodular_orbit_test(F2, lambda_max(F2), 3, ideal=[0])
    assert zero.orbit_size == zero.um_size == 1
    low = unimodular_orbit_test(F2, lambda_max(F2), 2)
    assert low.to_json()["hypothesis"] == "outside-hypothesis"


def test_orbit_independent_of_generator_order():
    param = lambda_max(F3_SP)
    gens = eq_generators(F3_SP, param, 2)
    start = np.array([0, 0, 0, 1])
    a, _ = vector_orbit(gens, F3_SP, 2, start)
    shuffled = gens[:]
    random.Random(4).shuffle(shuffled)
    b, _ = vector_orbit(shuffled, F3_SP, 2, start)
    assert np.array_equal(a, b)
    assert len(a) == 80  # nonzero vectors of F_3^4


def test_stab_map_n1_to_n2():
    rep = stab_map_test(F2, lambda_max(F2), 1)
    assert rep.generators_to_generators and rep.eq_into_eq and rep.well_defined
    assert rep.target.coset_count == 1
    assert rep.mapping == [0] and rep.injective and rep.surjective
    low = stab_map_test(F2, form_param_closure(F2, []), 1)
    assert low.mapping == [0, 1] and low.injective and low.surjective


def test_stab_map_lower_bound_target():
    R = make_ring("Zmod 4, trivial, lambda=1")
    rep = stab_map_test(R, form_param_closure(R, []), 1)
    assert rep.well_defined and rep.eq_into_eq
    assert rep.mapping is None and rep.to_json()["lower_bound_only"]


def test_stabilizer_decomposition_f2():
    rep = stabilizer_decomp_test(F2, lambda_max(F2), 2)
    assert rep.all_pass and rep.checked == 48


def test_whitehead_reported():
    rep = whitehead_test(F2, lambda_max(F2), 2)
    data = rep.to_json()
    assert data["label"] == "EXPERIMENT"
    assert rep.gq_order == 720 and 720 % rep.commutator_order == 0


def test_matops_inverse_and_product():
    R = make_ring("Zmod 4, trivial, lambda=-1")
    param = lambda_max(R)
    ops = MatOps(R, 4)
    gens = np.stack(eq_generators(R, param, 2))
    inv = np.stack([ops.inverse_gq(g) for g in gens])
    prod = ops.matmul(gens, inv)
    assert np.all(prod == ops.identity()[None])


@pytest.mark.slow
def test_sp6_f2_closure():
    param = lambda_max(F2)
    eq = enum_eq(F2, param, 3)
    assert eq.order == 1451520
    assert np.all(_batch_preserves_form(eq.elements, 1, 2))


@pytest.mark.slow
def test_stab_map_f2_n2_to_n3():
    rep = stab_map_test(F2, lambda_max(F2), 2)
    assert rep.well_defined and rep.eq_into_eq and rep.generators_to_generators
    # the n=3 group is only a closure, so bijectivity stays open
    assert rep.target.lower_bound_only
    assert rep.injective is None and rep.surjective is None
