import itertools
import random
from math import factorial

import numpy as np
import pytest

from adjoint_invariants.errors import BudgetExceeded, WrongFamily
from adjoint_invariants.generators import (
    EPSILON,
    TRACE,
    GeneratorDescriptor,
    enumerate_generators,
    epsilon_chain_tensor,
    epsilon_descriptors,
    pi_chain,
    realize,
    structure_tensor_from_traces,
    trace_tensor,
)
from adjoint_invariants.tensor_core import Permutation, permute, tensor_product

from conftest import ALL_SPECS, algebra


def brute_trace(alg, idx):
    m = np.eye(alg.dim_v, dtype=object)
    for a in idx:
        m = m.dot(alg.basis[a])
    return sum(m[i, i] for i in range(alg.dim_v))


def brute_epsilon(alg, lengths, idx):
    """Direct sum over all permutations of V indices."""
    ginv = alg.form_inverse
    r, n = alg.rank, alg.dim_v
    factors, pos = [], 0
    for k in lengths:
        m = np.eye(n, dtype=object)
        for a in idx[pos:pos + k]:
            m = m.dot(alg.basis[a])
        factors.append(m.dot(ginv))
        pos += k
    total = 0
    for p in itertools.permutations(range(n)):
        term = Permutation(p).sign()
        for i in range(r):
            term *= factors[i][p[r + i], p[i]]
            if not term:
                break
        total += term
    return total


def test_a1_degree2_trace_is_frozen():
    t = trace_tensor(algebra("A_1"), 2)
    assert t.num.tolist() == [[0, 1, 0], [1, 0, 0], [0, 0, 2]]


@pytest.mark.parametrize("label, k", [("A_2", 3), ("B_2", 3), ("C_2", 4), ("D_3", 3)])
def test_trace_tensor_entries(label, k):
    alg = algebra(label)
    t = trace_tensor(alg, k)
    rng = random.Random(1)
    for _ in range(40):
        idx = tuple(rng.randrange(alg.dim_g) for _ in range(k))
        assert t[idx] == brute_trace(alg, idx)


@pytest.mark.parametrize("label", ["A_2", "C_2", "D_3"])
def test_trace_cyclic_invariance(label):
    t = trace_tensor(algebra(label), 4)
    assert permute((1, 2, 3, 0), t) == t


@pytest.mark.parametrize("label", ALL_SPECS)
def test_adjoint_trace_is_killing(label):
    alg = algebra(label)
    assert np.array_equal(trace_tensor(alg, 2, rep="adjoint").num, alg.killing)


def test_pi_chain_slots():
    alg = algebra("B_2")
    chain = pi_chain(alg, 2)
    assert chain.trace() == trace_tensor(alg, 2)
    assert chain.slot(0, 4)[3, 5] == alg.basis[3].dot(alg.basis[5])[0, 4]


def test_realize_trace_products_by_hand():
    alg = algebra("A_2")
    t2, t1 = trace_tensor(alg, 2), trace_tensor(alg, 1)
    prod = tensor_product(t2, t2)
    # cycles (1 3)(2 4): tr(X1 X3) tr(X2 X4)
    d = GeneratorDescriptor(TRACE, 4, cycles=((0, 2), (1, 3)))
    assert realize(alg, d) == permute((0, 2, 1, 3), prod)
    assert d.id == "tr(1 3)(2 4)"
    # trace tensor of degree 1 vanishes (sl is traceless)
    assert t1.is_zero()
    d3 = GeneratorDescriptor(TRACE, 3, cycles=((0, 2, 1),))
    t = realize(alg, d3)
    for idx in [(0, 1, 2), (3, 4, 7), (6, 6, 1)]:
        assert t[idx] == brute_trace(alg, (idx[0], idx[2], idx[1]))


def test_realize_applies_perm():
    alg = algebra("A_1")
    base = GeneratorDescriptor(TRACE, 3, cycles=((0, 1), (2,)))
    moved = GeneratorDescriptor(TRACE, 3, cycles=((0, 1), (2,)), perm=Permutation((1, 2, 0)))
    assert realize(alg, moved) == permute((1, 2, 0), realize(alg, base))
    assert moved.id == "tr(1 2)(3)^231"


@pytest.mark.parametrize("lengths", [(1, 1, 1), (2, 1, 1), (1, 2, 1)])
def test_epsilon_chain_matches_permutation_sum(lengths):
    alg = algebra("D_3")
    e = epsilon_chain_tensor(alg, lengths)
    rng = random.Random(sum(lengths))
    nonzero = 0
    for _ in range(60):
        idx = tuple(rng.randrange(alg.dim_g) for _ in range(sum(lengths)))
        ref = brute_epsilon(alg, lengths, idx)
        assert e[idx] == ref
        nonzero += ref != 0
    assert not e.is_zero()


def test_epsilon_chain_block_symmetries():
    alg = algebra("D_3")
    e211 = epsilon_chain_tensor(alg, (2, 1, 1))
    e121 = epsilon_chain_tensor(alg, (1, 2, 1))
    # E_(1,2,1)(a, b, c, d) == E_(2,1,1)(b, c, a, d)
    assert e121 == permute(Permutation((1, 2, 0, 3)).inverse(), e211)
    # reversing a chain of length 2 flips the sign: (-1)^(2+1)
    assert permute((1, 0, 2, 3), e211) == -e211


def test_epsilon_chain_reorder_is_exact_symmetry():
    alg = algebra("D_3")
    e = epsilon_chain_tensor(alg, (2, 1, 1))
    moved = epsilon_chain_tensor(alg, (1, 1, 2))
    # E_(2,1,1)(a, b, c, d) == E_(1,1,2)(c, d, a, b)
    assert e == permute(Permutation((2, 3, 0, 1)).inverse(), moved)


def test_epsilon_only_for_d():
    with pytest.raises(WrongFamily):
        epsilon_chain_tensor(algebra("B_3"), (1, 1, 1))
    d = GeneratorDescriptor(EPSILON, 3, chain_lengths=(1, 1, 1))
    with pytest.raises(WrongFamily):
        realize(algebra("C_3"), d)


@pytest.mark.parametrize("k, count", [(2, 0), (3, 1), (4, 6), (5, 45)])
def test_epsilon_descriptor_counts_d3(k, count):
    assert len(epsilon_descriptors(algebra("D_3"), k)) == count


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_trace_descriptor_count(k):
    descs = enumerate_generators(algebra("B_2"), k)
    assert len(descs) == factorial(k)
    assert len({d.id for d in descs}) == factorial(k)


def test_generator_ids():
    ids = [d.id for d in enumerate_generators(algebra("A_1"), 3)]
    assert ids == ["tr(1 2 3)", "tr(1 3 2)", "tr(1)(2 3)", "tr(1 2)(3)", "tr(1 3)(2)", "tr(1)(2)(3)"]
    ids = [d.id for d in epsilon_descriptors(algebra("D_3"), 4)]
    assert ids[:3] == ["eps[1][2][3 4]", "eps[1][3][2 4]", "eps[1][4][2 3]"]


def test_descriptor_validation():
    with pytest.raises(ValueError):
        GeneratorDescriptor(TRACE, 3, cycles=((0, 1),))
    with pytest.raises(ValueError):
        GeneratorDescriptor(EPSILON, 4, chain_lengths=(1, 1, 1))
    with pytest.raises(ValueError):
        GeneratorDescriptor("other", 1)


def test_pfaffian_descriptor_with_three_cycle():
    alg = algebra("D_3")
    perm = Permutation((1, 2, 0))
    d = GeneratorDescriptor(EPSILON, 3, chain_lengths=(1, 1, 1), perm=perm)
    assert realize(alg, d) == permute(perm, epsilon_chain_tensor(alg, (1, 1, 1)))


@pytest.mark.parametrize("label", ["A_1", "B_2", "C_2", "D_3"])
def test_structure_tensor_from_traces(label):
    alg = algebra(label)
    lowered = structure_tensor_from_traces(alg)
    expect = np.tensordot(alg.structure_array, alg.trace_form().astype(np.int64), axes=([2], [0]))
    assert np.array_equal(lowered.num.astype(np.int64), expect)


def test_budget_refusal():
    with pytest.raises(BudgetExceeded):
        trace_tensor(algebra("D_4"), 6, budget=10**6)
