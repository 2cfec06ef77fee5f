"""Brute-force invariant subspaces of ``g^{(x)k}`` and of ``S^k(g)``.

A degree-``k`` tensor ``T`` (a multilinear function on ``g``) is invariant
when for every basis element ``X_b``

    sum_i T(X_1, ..., [X_b, X_i], ..., X_k) == 0.

Stacking these maps over ``b`` gives the action operator.  Its kernel is
computed modulo primes after two exact reductions that do not change it:

* the Cartan rows force invariants into the weight-zero coordinates, so
  only weight-zero columns are kept (and the Cartan rows then vanish);
* on weight-zero vectors, annihilation by the simple-root vectors already
  implies invariance (such a vector generates a highest-weight module of
  weight zero, i.e. a trivial one).  ``rows="all"`` keeps every root vector
  instead; both choices are cross-checked against the unreduced operator
  in the test-suite.

Mod-``p`` ranks never exceed rational ranks, so the kernel dimension found
is an upper bound; a span of exact invariants reaching it certifies it.
"""

import itertools
import time
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import modular
from .errors import DegreeMismatch
from .tensor_core import AdjointTensor, check_budget, entry_count, reduce_mod, to_int64

MEMBERSHIP_BUDGET = 2**22
RANK_BUDGET = 2**24


@dataclass(frozen=True, eq=False)
class ActionOperator:
    """Infinitesimal adjoint action on degree-``k`` tensors of ``alg``."""

    alg: object
    degree: int

    @property
    def dim(self):
        return self.alg.dim_g

    @property
    def n(self):
        return entry_count(self.dim, self.degree)

    @property
    def row_count(self):
        return self.dim * self.n

    @cached_property
    def _moves(self):
        """``moves[b][y] = [(x, c[b, x, y]), ...]``: column ``y`` feeds row ``x``."""
        c = self.alg.structure_array
        d = self.dim
        moves = []
        for b in range(d):
            per = [[] for _ in range(d)]
            xs, ys = np.nonzero(c[b])
            for x, y in zip(xs.tolist(), ys.tolist()):
                per[y].append((x, int(c[b, x, y])))
            moves.append(per)
        return moves

    def apply(self, t):
        """Exact ``(op T)[b, a_1..a_k]``; a degree ``k+1`` numerator array and denominator."""
        if t.degree != self.degree:
            raise DegreeMismatch(f"operator of degree {self.degree} applied to degree {t.degree}")
        k = self.degree
        c = self.alg.structure_array
        cmax = int(np.abs(c).max()) if c.size else 0
        num = to_int64(t.num, max(1, cmax * self.dim * max(k, 1)))
        if num is None:
            num = t.num
            c = c.astype(object)
        out = None
        for i in range(k):
            # c[b, x, y] * T[..., y (slot i), ...] -> (b, ..., x (slot i), ...)
            term = np.tensordot(c, num, axes=([2], [i]))
            term = np.moveaxis(term, 1, i + 1)
            out = term if out is None else out + term
        if out is None:
            out = np.zeros((self.dim,), dtype=np.int64)
        return out, t.den

    def annihilates(self, t):
        out, _ = self.apply(t)
        return not np.any(out != 0)

    def sparse_rows(self):
        """All ``dim_g * n`` rows as ``{column: value}`` dicts (unreduced; small cases only)."""
        d, k = self.dim, self.degree
        rows = {}
        strides = [d ** (k - 1 - i) for i in range(k)]
        for b in range(d):
            for flat, idx in enumerate(itertools.product(range(d), repeat=k)):
                for i, y in enumerate(idx):
                    for x, v in self._moves[b][y]:
                        row = b * self.n + flat - (y - x) * strides[i]
                        r = rows.setdefault(row, {})
                        r[flat] = r.get(flat, 0) + v
        return list(rows.values())

    def dense_matrix(self):
        """Full operator as an int64 matrix (testing oracle; tiny cases only)."""
        m = np.zeros((self.row_count, self.n), dtype=np.int64)
        d, k = self.dim, self.degree
        strides = [d ** (k - 1 - i) for i in range(k)]
        for b in range(d):
            for flat, idx in enumerate(itertools.product(range(d), repeat=k)):
                for i, y in enumerate(idx):
                    for x, v in self._moves[b][y]:
                        m[b * self.n + flat - (y - x) * strides[i], flat] += v
        return m

    def zero_weight_indices(self):
        return zero_weight_tuples(self.alg, self.degree)

    def reduced_columns(self, rows="simple"):
        """Sparse images of weight-zero basis tensors under root-vector rows."""
        betas = _row_elements(self.alg, rows)
        d, k = self.dim, self.degree
        strides = [d ** (k - 1 - i) for i in range(k)]
        n = self.n
        cols = []
        for idx in self.zero_weight_indices():
            flat = sum(a * s for a, s in zip(idx, strides))
            vec = {}
            for bi, b in enumerate(betas):
                moves = self._moves[b]
                base = bi * n + flat
                for i, y in enumerate(idx):
                    for x, v in moves[y]:
                        key = base - (y - x) * strides[i]
                        vec[key] = vec.get(key, 0) + v
            cols.append(vec)
        return cols


def _row_elements(alg, rows):
    if rows == "simple":
        return list(alg.simple_roots)
    if rows == "all":
        return [b for b in range(alg.dim_g) if b not in set(alg.cartan)]
    raise ValueError(f"rows must be 'simple' or 'all', got {rows!r}")


def _weight_enumerate(alg, degree, nondecreasing):
    ws = alg.weights
    d = alg.dim_g
    bound = max((abs(x) for w in ws for x in w), default=0)
    r = len(ws[0]) if ws else 0
    out = []
    cur = []

    def rec(start, acc, left):
        if left == 0:
            if not any(acc):
                out.append(tuple(cur))
            return
        lim = bound * left
        if any(abs(x) > lim for x in acc):
            return
        for a in range(start if nondecreasing else 0, d):
            cur.append(a)
            rec(a, [x + y for x, y in zip(acc, ws[a])], left - 1)
            cur.pop()

    rec(0, [0] * r, degree)
    return out


def zero_weight_tuples(alg, degree):
    """Multi-indices of total weight zero, in lexicographic order."""
    return _weight_enumerate(alg, degree, nondecreasing=False)


def zero_weight_monomials(alg, degree):
    """Sorted index tuples (monomials of ``S^k(g)``) of total weight zero."""
    return _weight_enumerate(alg, degree, nondecreasing=True)


def action_operator(alg, k, budget=RANK_BUDGET):
    """Build the operator, refusing sizes past ``budget`` and self-checking on the Killing form."""
    check_budget(f"action operator {alg.spec} degree {k}", entry_count(alg.dim_g, k), budget)
    op = ActionOperator(alg, k)
    if not ActionOperator(alg, 2).annihilates(AdjointTensor(alg.killing.astype(object))):
        raise AssertionError(f"{alg.spec}: Killing form not annihilated by the action operator")
    return op


def kernel_dimension(op, primes=None, rows="simple", return_primes=False):
    """``dim ker(op)`` modulo the given primes (must agree, escalating once)."""
    primes = modular.validate_primes(primes or modular.default_primes())
    cols = op.reduced_columns(rows)
    ncols = len(cols)

    rank_value, used = modular.rank_over_primes(
        lambda p: modular.rank_sparse_mod_p(cols, p), primes,
        f"kernel of {op.alg.spec} degree {op.degree}")
    dim = ncols - rank_value
    return (dim, used) if return_primes else dim


def kernel_dimension_unreduced(op, p):
    """Kernel of the full stacked operator (all rows, all columns) mod ``p``; testing oracle."""
    return op.n - modular.rank_sparse_mod_p(op.sparse_rows(), p)


def exact_membership(op, t):
    """True iff ``op . T == 0`` in exact arithmetic."""
    if t.degree != op.degree:
        raise DegreeMismatch(f"degree {t.degree} tensor against a degree-{op.degree} operator")
    return op.annihilates(t)


def span_rank(tensors, primes=None, return_primes=False):
    """Rank of the span of same-degree tensors, computed modulo primes (a lower bound)."""
    primes = modular.validate_primes(primes or modular.default_primes())
    tensors = list(tensors)
    if not tensors:
        return (0, primes) if return_primes else 0
    shape = tensors[0].num.shape
    for t in tensors:
        if t.num.shape != shape:
            raise DegreeMismatch("span_rank needs tensors of a common degree and dimension")

    def compute(p):
        rows = [reduce_mod(t.num, t.den, p) for t in tensors]
        mat = np.array(rows, dtype=np.int64)
        nzcols = np.nonzero(mat.any(axis=0))[0]
        return modular.rank_dense_mod_p(mat[:, nzcols], p)

    value, used = modular.rank_over_primes(compute, primes, "span rank")
    return (value, used) if return_primes else value


# symmetric invariants -----------------------------------------------------


def symmetric_columns(alg, degree, rows="simple"):
    """Images of weight-zero monomials under root vectors acting as derivations."""
    betas = _row_elements(alg, rows)
    op = ActionOperator(alg, 1)
    index = {}
    cols = []
    for mono in zero_weight_monomials(alg, degree):
        vec = {}
        counts = Counter(mono)
        for b in betas:
            moves = op._moves[b]
            for y, mult in counts.items():
                rest = list(mono)
                rest.remove(y)
                for x, v in moves[y]:
                    key = (b, tuple(sorted(rest + [x])))
                    kid = index.setdefault(key, len(index))
                    vec[kid] = vec.get(kid, 0) + mult * v
        cols.append(vec)
    return cols


def symmetric_invariant_dimension(alg, degree, primes=None, rows="simple"):
    """``dim S^degree(g)^G`` (invariant polynomials of that degree)."""
    if degree == 0:
        return 1
    primes = modular.validate_primes(primes or modular.default_primes())
    cols = symmetric_columns(alg, degree, rows)
    rank, _ = modular.rank_over_primes(
        lambda p: modular.rank_sparse_mod_p(cols, p), primes,
        f"symmetric invariants of {alg.spec} degree {degree}")
    return len(cols) - rank


def _products_count(degrees, k):
    """Coefficient of ``t^k`` in ``prod 1/(1 - t^d)``."""
    coeffs = [1] + [0] * k
    for d in degrees:
        for j in range(d, k + 1):
            coeffs[j] += coeffs[j - d]
    return coeffs[k]


def primitive_degrees(alg, primes=None, max_degree=None):
    """Degrees of a minimal homogeneous generating set of invariant polynomials.

    At each degree the number of new generators is the invariant dimension
    minus the number of monomials in generators already found.  Stops once
    ``rank`` generators are known.
    """
    max_degree = max_degree or 2 * alg.dim_v + 2
    found = []
    for k in range(1, max_degree + 1):
        dim = symmetric_invariant_dimension(alg, k, primes)
        new = dim - _products_count(found, k)
        if new < 0:
            raise AssertionError(f"{alg.spec}: negative generator count at degree {k}")
        found.extend([k] * new)
        if len(found) >= alg.rank:
            break
    if len(found) != alg.rank:
        raise AssertionError(f"{alg.spec}: found generator degrees {found}, expected {alg.rank}")
    return found


# theorem verification ----------------------------------------------------


@dataclass
class VerificationReport:
    spec: object
    degree: int
    kernel_dim: int
    generator_count: int
    span_rank: int
    membership_failures: list
    primes: list
    agreement: bool
    certified: bool
    trace_span_rank: int = None
    timings: dict = field(default_factory=dict)

    def to_dict(self, timings=False):
        out = {
            "family": self.spec.family,
            "rank": self.spec.rank,
            "degree": self.degree,
            "kernel_dim": self.kernel_dim,
            "generator_count": self.generator_count,
            "span_rank": self.span_rank,
            "trace_span_rank": self.trace_span_rank,
            "membership_failures": list(self.membership_failures),
            "primes": list(self.primes),
            "agreement": self.agreement,
            "certified": self.certified,
        }
        if timings:
            out["timings"] = {k: round(v, 3) for k, v in self.timings.items()}
        return out


def verify_theorem(alg, k, primes=None, include_epsilon=True,
                   membership_budget=MEMBERSHIP_BUDGET, rank_budget=RANK_BUDGET):
    """Compare the span of the generating tensors with the full invariant space."""
    from .generators import enumerate_generators, realize

    primes = modular.validate_primes(primes or modular.default_primes())
    entries = entry_count(alg.dim_g, k)
    check_budget(f"membership {alg.spec} degree {k}", entries, membership_budget)
    timings = {}

    t0 = time.perf_counter()
    op = action_operator(alg, k, rank_budget)
    descs = enumerate_generators(alg, k, include_epsilon=include_epsilon)
    tensors = [realize(alg, d) for d in descs]
    timings["realize"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    failures = [d.id for d, t in zip(descs, tensors) if not exact_membership(op, t)]
    timings["membership"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    kdim, used_k = kernel_dimension(op, primes, return_primes=True)
    timings["kernel"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    srank, used_s = span_rank(tensors, primes, return_primes=True)
    trace_only = [t for d, t in zip(descs, tensors) if d.kind == "trace"]
    trank = srank if len(trace_only) == len(tensors) else span_rank(trace_only, primes)
    timings["span"] = time.perf_counter() - t0

    used = sorted(set(used_k) | set(used_s))
    agreement = not failures and srank == kdim
    # exact members spanning a space of mod-p dimension equal to the mod-p
    # kernel pin both bounds: span_p <= span_Q <= ker_Q <= ker_p.
    certified = agreement
    return VerificationReport(
        spec=alg.spec, degree=k, kernel_dim=kdim, generator_count=len(descs),
        span_rank=srank, membership_failures=failures, primes=used,
        agreement=agreement, certified=certified, trace_span_rank=trank, timings=timings)
