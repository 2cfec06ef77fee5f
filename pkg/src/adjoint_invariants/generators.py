"""Generating tensors: permuted trace products and the D_r epsilon chains.

Index conventions.  ``trace_tensor(alg, k)[a_1, ..., a_k]`` is
``tr(pi(X_a1) pi(X_a2) ... pi(X_ak))``.  A :class:`MatrixChain` of degree
``k`` stores the ordered product ``pi(X_a1) ... pi(X_ak)`` so that its
trace is the trace tensor.  The epsilon chain with lengths
``(k_1, ..., k_r)`` is

    E(X_1, ..., X_k) = sum eps[a_1 .. a_2r] prod_i (C_i g^{-1})[a_{r+i}, a_i]

where ``C_i`` is the chain on the i-th consecutive block of arguments and
``eps[0, 1, ..., 2r-1] = +1`` in the fixed basis of ``V``.  With all
``k_i = 1`` each factor ``pi(X) g^{-1}`` is antisymmetric and the
symmetrized tensor is a multiple of the polarized Pfaffian.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np

from .classical_lie import adjoint_matrices
from .errors import DegreeMismatch, WrongFamily
from .tensor_core import (
    AdjointTensor,
    Permutation,
    check_budget,
    entry_count,
    permute,
    tensor_product_all,
)

TRACE = "trace"
EPSILON = "epsilon"


def _rep_matrices(alg, rep):
    if rep == "defining":
        return alg.basis_array
    if rep == "adjoint":
        return np.array([m.astype(np.int64) for m in adjoint_matrices(alg.structure)])
    raise ValueError(f"rep must be 'defining' or 'adjoint', got {rep!r}")


def _chain_array(mats, k):
    """``(d,)*k + (N, N)`` array of ordered products; int64 when provably safe."""
    d, n, _ = mats.shape
    hi = int(np.abs(mats).max()) if mats.size else 0
    safe = (n * max(hi, 1)) ** k < 2**62
    m = mats if safe else mats.astype(object)
    acc = m
    for _ in range(k - 1):
        # acc[..., i, j] * m[b, j, l] -> [..., b, i, l]
        acc = np.einsum("...ij,bjl->...bil", acc, m) if safe else _object_chain_step(acc, m)
    return acc


def _object_chain_step(acc, m):
    lead = acc.shape[:-2]
    n = m.shape[1]
    flat = acc.reshape((-1, n, n))
    out = np.empty((flat.shape[0], m.shape[0], n, n), dtype=object)
    for i in range(flat.shape[0]):
        for b in range(m.shape[0]):
            out[i, b] = np.dot(flat[i], m[b])
    return out.reshape(lead + (m.shape[0], n, n))


@dataclass(frozen=True)
class MatrixChain:
    """``entries[a_1..a_k, i, j] = (pi(X_a1) ... pi(X_ak))[i, j]``."""

    degree: int
    entries: np.ndarray

    def slot(self, i, j):
        """The degree-k adjoint tensor sitting in matrix entry ``(i, j)``."""
        return AdjointTensor(self.entries[..., i, j])

    def trace(self):
        return AdjointTensor(np.trace(self.entries, axis1=-2, axis2=-1))


def pi_chain(alg, k, budget=None):
    if k < 1:
        raise DegreeMismatch("chains have degree >= 1")
    check_budget(f"pi chain {alg.spec} degree {k}", entry_count(alg.dim_g, k) * alg.dim_v**2, budget)
    return MatrixChain(k, _chain_array(alg.basis_array, k))


def trace_tensor(alg, k, rep="defining", budget=None):
    """``T[a_1..a_k] = tr(rho(X_a1) ... rho(X_ak))`` for ``rep`` in {defining, adjoint}."""
    if k < 1:
        raise DegreeMismatch("trace tensors have degree >= 1")
    mats = _rep_matrices(alg, rep)
    check_budget(f"trace tensor {alg.spec} degree {k}", entry_count(alg.dim_g, k), budget)
    if k == 1:
        return AdjointTensor(np.trace(mats, axis1=1, axis2=2))
    prefix = _chain_array(mats, k - 1)
    if prefix.dtype == object or mats.dtype == object:
        tail = mats.astype(object)
        out = np.tensordot(prefix, tail, axes=([-2, -1], [2, 1]))
    else:
        n = mats.shape[1]
        hi = max(int(np.abs(prefix).max()), 1) * max(int(np.abs(mats).max()), 1) * n
        if hi < 2**62:
            out = np.tensordot(prefix, mats, axes=([-2, -1], [2, 1]))
        else:
            out = np.tensordot(prefix.astype(object), mats.astype(object), axes=([-2, -1], [2, 1]))
    return AdjointTensor(out)


def _interleave_sign(r):
    """Sign of reordering eps slots (a_1..a_r, a_{r+1}..a_2r) into (a_1, a_{r+1}, a_2, ...)."""
    order = [p for i in range(r) for p in (i, r + i)]
    return Permutation(order).sign()


def _above(v, mask):
    return bin(mask >> (v + 1)).count("1")


def epsilon_chain_tensor(alg, chain_lengths, budget=None):
    """The D_r generator built from one Levi-Civita tensor and ``r`` matrix chains."""
    if alg.family != "D":
        raise WrongFamily(f"epsilon chains are defined for family D, not {alg.spec}")
    r = alg.rank
    chain_lengths = tuple(int(x) for x in chain_lengths)
    if len(chain_lengths) != r or min(chain_lengths) < 1:
        raise ValueError(f"{alg.spec} needs {r} positive chain lengths, got {chain_lengths}")
    k = sum(chain_lengths)
    check_budget(f"epsilon chain {alg.spec} degree {k}", entry_count(alg.dim_g, k), budget)
    n = alg.dim_v
    ginv = np.array(alg.form_inverse, dtype=object)
    factors = []
    for ki in chain_lengths:
        chain = _chain_array(alg.basis_array, ki).astype(object)
        factors.append(np.tensordot(chain, ginv, axes=([-1], [0])))  # (..., y, x) = (C g^-1)[y, x]
    bound = factorial(n)
    for f in factors:
        bound *= max((abs(int(v)) for v in f.flat), default=0)
    if bound < 2**62:
        factors = [f.astype(np.int64) for f in factors]

    # Walk the eps slots in interleaved order (a_1, a_{r+1}, a_2, a_{r+2}, ...);
    # appending value v adds one inversion per already used value above v.
    states = {0: np.ones((), dtype=factors[0].dtype)}
    for f in factors:
        nxt = {}
        for mask, acc in states.items():
            free = [v for v in range(n) if not mask >> v & 1]
            for x, y in itertools.combinations(free, 2):
                newmask = mask | (1 << x) | (1 << y)
                # (x, y) and (y, x) both land on newmask
                s_xy = (-1) ** (_above(x, mask) + _above(y, mask | 1 << x))
                s_yx = (-1) ** (_above(y, mask) + _above(x, mask | 1 << y))
                local = s_xy * f[..., y, x] + s_yx * f[..., x, y]
                term = np.multiply.outer(acc, local)
                nxt[newmask] = nxt[newmask] + term if newmask in nxt else term
        states = nxt
    (full,) = states.values()
    return AdjointTensor(alg.orientation * _interleave_sign(r) * full)


@dataclass(frozen=True)
class GeneratorDescriptor:
    """Recipe for one generator.

    ``kind == "trace"``: ``cycles`` is a tuple of slot cycles; the tensor is
    ``prod_c tr(prod_{j in c} pi(X_j))`` (then ``perm`` applied).
    ``kind == "epsilon"``: the epsilon chain with ``chain_lengths`` whose
    arguments are the slots of ``perm.inverse()`` read in order.
    """

    kind: str
    degree: int
    cycles: tuple = ()
    chain_lengths: tuple = ()
    perm: Permutation = None

    def __post_init__(self):
        if self.perm is None:
            object.__setattr__(self, "perm", Permutation.identity(self.degree))
        if self.kind == TRACE:
            slots = sorted(s for c in self.cycles for s in c)
            if slots != list(range(self.degree)):
                raise ValueError(f"cycles {self.cycles} do not partition range({self.degree})")
        elif self.kind == EPSILON:
            if sum(self.chain_lengths) != self.degree:
                raise ValueError("chain lengths must sum to the degree")
        else:
            raise ValueError(f"unknown generator kind {self.kind!r}")

    @property
    def id(self):
        if self.kind == TRACE:
            body = "".join("(" + " ".join(str(s + 1) for s in c) + ")" for c in self.cycles)
            out = f"tr{body}"
        else:
            word = self.perm.inverse()
            blocks, pos = [], 0
            for ki in self.chain_lengths:
                blocks.append(word[pos:pos + ki])
                pos += ki
            return "eps" + "".join("[" + " ".join(str(s + 1) for s in b) + "]" for b in blocks)
        if self.perm != Permutation.identity(self.degree):
            out += "^" + "".join(str(i + 1) for i in self.perm)
        return out


@lru_cache(maxsize=64)
def _cached_trace(alg, k, budget):
    return trace_tensor(alg, k, budget=budget)


@lru_cache(maxsize=64)
def _cached_epsilon(alg, lengths, budget):
    return epsilon_chain_tensor(alg, lengths, budget)


def realize(alg, d, budget=None):
    """Assemble the tensor described by ``d``."""
    if d.kind == TRACE:
        factors = [_cached_trace(alg, len(c), budget) for c in d.cycles]
        word = [s for c in d.cycles for s in c]
        t = permute(Permutation(word).inverse(), tensor_product_all(factors))
        return permute(d.perm, t)
    if alg.family != "D":
        raise WrongFamily(f"epsilon chains are defined for family D, not {alg.spec}")
    return permute(d.perm, _cached_epsilon(alg, tuple(d.chain_lengths), budget))


def _cycle_decompositions(k):
    """Every permutation of ``range(k)`` as canonical cycles (each starts at its minimum)."""
    out = []
    for images in itertools.permutations(range(k)):
        seen, cycles = set(), []
        for start in range(k):
            if start in seen:
                continue
            cyc, j = [], start
            while j not in seen:
                seen.add(j)
                cyc.append(j)
                j = images[j]
            cycles.append(tuple(cyc))
        out.append(tuple(cycles))
    return sorted(out, key=lambda cs: (len(cs), [len(c) for c in cs], cs))


def _compositions(k, parts):
    for cuts in itertools.combinations(range(1, k), parts - 1):
        bounds = (0,) + cuts + (k,)
        yield tuple(b - a for a, b in zip(bounds, bounds[1:]))


def epsilon_descriptors(alg, k):
    """Epsilon-chain descriptors of degree ``k`` modulo block reordering and block reversal.

    Reordering chains is an exact symmetry (an even permutation of eps
    slots); reversing a chain of length m multiplies the tensor by
    (-1)^(m+1), so it does not change the span.
    """
    r = alg.rank
    if k < r:
        return []
    seen = set()
    out = []
    for lengths in _compositions(k, r):
        for word in itertools.permutations(range(k)):
            blocks, pos = [], 0
            for ki in lengths:
                b = word[pos:pos + ki]
                blocks.append(min(b, b[::-1]))
                pos += ki
            canon = tuple(sorted(blocks, key=lambda b: (len(b), b)))
            if canon in seen:
                continue
            seen.add(canon)
            flat = [s for b in canon for s in b]
            out.append(GeneratorDescriptor(
                EPSILON, k, chain_lengths=tuple(len(b) for b in canon),
                perm=Permutation(flat).inverse()))
    return out


def enumerate_generators(alg, k, include_epsilon=True, budget=None):
    """All trace-product descriptors (k! of them) plus, for D_r, epsilon chains."""
    if k < 1:
        raise DegreeMismatch("degree must be >= 1")
    check_budget(f"generators {alg.spec} degree {k}", entry_count(alg.dim_g, k), budget)
    descs = [GeneratorDescriptor(TRACE, k, cycles=cs) for cs in _cycle_decompositions(k)]
    if include_epsilon and alg.family == "D":
        descs.extend(epsilon_descriptors(alg, k))
    return descs


def structure_tensor_from_traces(alg):
    """``tr([pi_a, pi_b] pi_c)``: the structure constants lowered by the trace form."""
    t3 = trace_tensor(alg, 3)
    return t3 - permute((1, 0, 2), t3)

