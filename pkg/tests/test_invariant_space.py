import numpy as np
import pytest

from adjoint_invariants import exact
from adjoint_invariants.classical_lie import exponent_table
from adjoint_invariants.errors import BudgetExceeded, DegreeMismatch
from adjoint_invariants.generators import trace_tensor
from adjoint_invariants.invariant_space import (
    action_operator,
    exact_membership,
    kernel_dimension,
    kernel_dimension_unreduced,
    primitive_degrees,
    span_rank,
    symmetric_invariant_dimension,
    verify_theorem,
    zero_weight_tuples,
)
from adjoint_invariants.tensor_core import AdjointTensor

from conftest import ALL_SPECS, algebra
from oracles import trivial_multiplicity

# dim (g^{(x)k})^g for k = 1, 2, ...; frozen from the character oracle in tests/oracles.py
KERNEL_DIMS = {
    "A_1": [0, 1, 1, 3, 6, 15],
    "A_2": [0, 1, 2, 8],
    "A_3": [0, 1, 2, 9],
    "B_2": [0, 1, 1, 6],
    "C_2": [0, 1, 1, 6],
    "D_3": [0, 1, 2, 9],
    "B_3": [0, 1, 1],
    "C_3": [0, 1, 1],
    "D_4": [0, 1, 1],
}
CASES = [(label, k, dim) for label, dims in KERNEL_DIMS.items() for k, dim in enumerate(dims, 1)]


@pytest.mark.parametrize("label, k, dim", CASES)
def test_kernel_dimension_frozen(label, k, dim):
    op = action_operator(algebra(label), k)
    assert kernel_dimension(op) == dim


@pytest.mark.parametrize("label, k", [("A_1", 5), ("A_2", 3), ("B_2", 4), ("D_3", 3), ("C_3", 3)])
def test_frozen_values_match_character_oracle(label, k):
    assert trivial_multiplicity(algebra(label), k) == KERNEL_DIMS[label][k - 1]


@pytest.mark.parametrize("label, k", [("A_1", 3), ("A_1", 4), ("A_2", 2), ("A_2", 3), ("B_2", 2),
                                      ("B_2", 3), ("C_2", 3), ("D_3", 2)])
def test_reduced_operator_matches_unreduced(label, k):
    op = action_operator(algebra(label), k)
    p = 2147483647
    full = kernel_dimension_unreduced(op, p)
    assert kernel_dimension(op, [p]) == full
    assert kernel_dimension(op, [p], rows="all") == full


@pytest.mark.parametrize("k", [2, 3, 4])
def test_a1_kernel_over_rationals(k):
    op = action_operator(algebra("A_1"), k)
    m = op.dense_matrix()
    assert op.n - exact.rank(m) == KERNEL_DIMS["A_1"][k - 1]


@pytest.mark.parametrize("primes", [(3,), (5,), (7,), (2147483629,)])
def test_kernel_mod_p_never_below_rational(primes):
    op = action_operator(algebra("B_2"), 3)
    assert kernel_dimension(op, primes) >= KERNEL_DIMS["B_2"][2]


def test_zero_weight_tuples():
    alg = algebra("A_1")
    tuples = zero_weight_tuples(alg, 2)
    # E01 (x) E10, E10 (x) E01, H (x) H
    assert sorted(tuples) == [(0, 1), (1, 0), (2, 2)]


@pytest.mark.parametrize("label", ALL_SPECS)
def test_killing_and_trace_are_members(label):
    alg = algebra(label)
    op = action_operator(alg, 2)
    assert exact_membership(op, AdjointTensor(alg.killing))
    assert exact_membership(op, trace_tensor(alg, 2))


def test_non_invariant_rejected():
    alg = algebra("A_2")
    op = action_operator(alg, 2)
    t = np.zeros((8, 8), dtype=np.int64)
    t[0, 0] = 1
    assert not exact_membership(op, AdjointTensor(t))
    with pytest.raises(DegreeMismatch):
        exact_membership(op, trace_tensor(alg, 3))


def test_span_rank():
    alg = algebra("B_2")
    t = trace_tensor(alg, 2)
    assert span_rank([t, t.scale(3), t + t]) == 1
    assert span_rank([]) == 0


@pytest.mark.parametrize("label, k", [("A_1", 4), ("A_2", 3), ("B_2", 3), ("C_2", 3), ("D_3", 3)])
def test_verify_theorem_agrees(label, k):
    rep = verify_theorem(algebra(label), k)
    assert rep.agreement and rep.certified
    assert rep.kernel_dim == rep.span_rank == KERNEL_DIMS[label][k - 1]
    assert rep.membership_failures == []


def test_d3_needs_epsilon_chains():
    rep = verify_theorem(algebra("D_3"), 3, include_epsilon=False)
    assert not rep.agreement
    assert (rep.span_rank, rep.kernel_dim) == (1, 2)


def test_report_dict_is_deterministic():
    d = verify_theorem(algebra("A_1"), 2).to_dict()
    assert "timings" not in d
    assert list(d) == ["family", "rank", "degree", "kernel_dim", "generator_count", "span_rank",
                       "trace_span_rank", "membership_failures", "primes", "agreement", "certified"]
    assert "timings" in verify_theorem(algebra("A_1"), 2).to_dict(timings=True)


def test_budget_enforced():
    with pytest.raises(BudgetExceeded):
        verify_theorem(algebra("D_4"), 5, membership_budget=10**6)


@pytest.mark.parametrize("label, k, dim", [("B_2", 2, 1), ("B_2", 3, 0), ("B_2", 4, 2),
                                           ("A_2", 3, 1), ("D_3", 3, 1), ("D_3", 4, 2)])
def test_symmetric_invariant_dimension(label, k, dim):
    assert symmetric_invariant_dimension(algebra(label), k) == dim


@pytest.mark.parametrize("label", ALL_SPECS)
def test_primitive_degrees_match_table(label):
    alg = algebra(label)
    assert primitive_degrees(alg) == [e + 1 for e in exponent_table(alg.family, alg.rank)]
    assert alg.exponents == exponent_table(alg.family, alg.rank)


@pytest.mark.parametrize("label", ["A_1", "B_2", "C_2", "D_3"])
def test_lowered_structure_constants_are_invariant(label):
    alg = algebra(label)
    lowered = np.tensordot(alg.structure_array, alg.killing.astype(np.int64), axes=([2], [0]))
    assert exact_membership(action_operator(alg, 3), AdjointTensor(lowered))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_a2_trace_generators_are_members(k):
    from adjoint_invariants.generators import enumerate_generators, realize

    alg = algebra("A_2")
    op = action_operator(alg, k)
    assert all(exact_membership(op, realize(alg, d)) for d in enumerate_generators(alg, k))


def test_pfaffian_tensor_is_member():
    from adjoint_invariants.generators import epsilon_chain_tensor
    from adjoint_invariants.tensor_core import symmetrize

    alg = algebra("D_3")
    op = action_operator(alg, 3)
    assert exact_membership(op, symmetrize(epsilon_chain_tensor(alg, (1, 1, 1))))


def test_a1_degree3_span_is_one():
    from adjoint_invariants.generators import enumerate_generators, realize

    alg = algebra("A_1")
    assert span_rank([realize(alg, d) for d in enumerate_generators(alg, 3)]) == 1
