"""Classical simple Lie algebras in their defining representations.

Conventions (fixed, see ``BASIS_CONVENTION``):

* ``A_r``: ``sl(r+1)``.  Basis is the off-diagonal elementary matrices
  ``E_ij`` (i != j) in lexicographic order, followed by the Cartan
  differences ``E_ii - E_{i+1,i+1}``.
* ``B_r``/``D_r``: matrices ``X`` with ``X^T g = -g X`` where ``g`` is the
  split symmetric form with ones on the antidiagonal.
* ``C_r``: the same condition with ``f = [[0, I_r], [-I_r, 0]]``.

For B/C/D the basis is obtained by walking the elementary matrices ``E_ij``
in lexicographic order, projecting each onto the algebra with
``M -> M - F^{-1} M^T F``, dividing out the content, and keeping the result
when it is independent of the matrices kept so far.  Every basis matrix is
then a weight vector for the diagonal Cartan subalgebra and has integer
entries.
"""

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from math import gcd

import numpy as np

from . import exact
from .errors import InvalidRank, NotProportional

BASIS_CONVENTION = "split-antidiagonal-g/standard-f/lex-v1"

FAMILIES = ("A", "B", "C", "D")
_MIN_RANK = {"A": 1, "B": 2, "C": 1, "D": 3}

# Cross-check only; exponents are recomputed from invariant dimensions.
def exponent_table(family, rank):
    if family == "A":
        return list(range(1, rank + 1))
    if family in ("B", "C"):
        return list(range(1, 2 * rank, 2))
    if family == "D":
        return sorted(list(range(1, 2 * rank - 2, 2)) + [rank - 1])
    raise ValueError(family)


@dataclass(frozen=True, order=True)
class AlgebraSpec:
    family: str
    rank: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidRank(f"unknown family {self.family!r}; expected one of A, B, C, D")
        if not isinstance(self.rank, int) or isinstance(self.rank, bool):
            raise InvalidRank(f"rank must be an integer, got {self.rank!r}")
        lo = _MIN_RANK[self.family]
        if self.rank < lo:
            raise InvalidRank(f"{self.family}_{self.rank}: rank >= {lo} required")

    @classmethod
    def parse(cls, label):
        """Parse ``"A_2"``, ``"A2"`` or ``"a2"``."""
        text = label.strip().upper().replace("_", "")
        if len(text) < 2 or not text[1:].isdigit():
            raise InvalidRank(f"cannot parse algebra label {label!r}")
        return cls(text[0], int(text[1:]))

    @property
    def label(self):
        return f"{self.family}_{self.rank}"

    @property
    def dim_v(self):
        r = self.rank
        return {"A": r + 1, "B": 2 * r + 1, "C": 2 * r, "D": 2 * r}[self.family]

    @property
    def dim_g(self):
        r = self.rank
        return {
            "A": (r + 1) ** 2 - 1,
            "B": r * (2 * r + 1),
            "C": r * (2 * r + 1),
            "D": r * (2 * r - 1),
        }[self.family]

    def __str__(self):
        return self.label


@dataclass(frozen=True, eq=False)
class ClassicalAlgebra:
    """Defining representation plus the derived adjoint data.

    ``structure[a, b, c]`` is the coefficient of ``X_c`` in ``[X_a, X_b]``.
    ``form`` is ``g`` (B, D), ``f`` (C) or ``None`` (A); ``form_inverse`` is
    its matrix inverse, used as the dual form.  ``orientation`` is the value
    of the Levi-Civita symbol on the ordered basis ``e_0, ..., e_{N-1}``
    (+1 unless the algebra was obtained by :func:`transport`).
    """

    spec: AlgebraSpec
    basis: tuple
    structure: np.ndarray
    killing: np.ndarray
    killing_inverse: np.ndarray
    form: object = None
    form_inverse: object = None
    orientation: int = 1
    _exponents: list = field(default=None, repr=False)

    @property
    def dim_v(self):
        return self.basis[0].shape[0]

    @property
    def dim_g(self):
        return len(self.basis)

    @property
    def family(self):
        return self.spec.family

    @property
    def rank(self):
        return self.spec.rank

    @cached_property
    def basis_array(self):
        """Basis as an int64 array of shape ``(dim_g, N, N)``."""
        return np.array([b.astype(np.int64) for b in self.basis])

    @cached_property
    def structure_array(self):
        """Integer structure constants as int64 (all conventions here are integral)."""
        return _int64_or_raise(self.structure)

    @cached_property
    def structure_sparse(self):
        """``{(a, b): [(c, coeff), ...]}`` for the nonzero brackets."""
        out = {}
        for (a, b, c), v in np.ndenumerate(self.structure):
            if v != 0:
                out.setdefault((a, b), []).append((c, v))
        return out

    @cached_property
    def cartan(self):
        """Indices of the diagonal basis matrices."""
        return [i for i, b in enumerate(self.basis) if not np.any(b - np.diag(np.diag(b)))]

    @cached_property
    def weights(self):
        """Weight of each basis element under ``ad`` of the Cartan basis elements."""
        c = self.structure
        ws = []
        for beta in range(self.dim_g):
            w = []
            for h in self.cartan:
                col = c[h, beta, :]
                if any(col[g] != 0 for g in range(self.dim_g) if g != beta):
                    raise ValueError(f"basis element {beta} is not a weight vector")
                w.append(int(col[beta]))
            ws.append(tuple(w))
        return ws

    @cached_property
    def positive_roots(self):
        r = len(self.cartan)
        probe = [10 ** (r - j) for j in range(r)]
        return [b for b, w in enumerate(self.weights)
                if any(w) and sum(x * y for x, y in zip(w, probe)) > 0]

    @cached_property
    def simple_roots(self):
        """Indices of the basis elements spanning simple positive root spaces."""
        pos = {self.weights[b] for b in self.positive_roots}
        sums = {tuple(x + y for x, y in zip(u, v)) for u in pos for v in pos}
        simple = [b for b in self.positive_roots if self.weights[b] not in sums]
        if len(simple) != self.rank:
            raise ValueError(f"found {len(simple)} simple roots, expected {self.rank}")
        return simple

    @property
    def exponents(self):
        """Exponents recovered from symmetric invariant dimensions (computed on first use)."""
        if self._exponents is None:
            from .invariant_space import primitive_degrees

            degrees = primitive_degrees(self)
            object.__setattr__(self, "_exponents", [d - 1 for d in degrees])
        return list(self._exponents)

    def trace_form(self):
        """``tr_V(pi(X_a) pi(X_b))`` as an exact matrix."""
        b = self.basis_array
        return np.einsum("aij,bji->ab", b, b).astype(object)


def _int64_or_raise(a):
    return np.asarray(a, dtype=object).astype(np.int64)


def _elementary(n, i, j):
    m = np.zeros((n, n), dtype=object)
    m[i, j] = 1
    return m


def _content_normalize(m):
    g = 0
    for x in m.flat:
        g = gcd(g, int(x))
    if g == 0:
        return m
    out = m // g
    # fix the sign so that the first nonzero entry is positive
    first = next(x for x in out.flat if x != 0)
    return out if first > 0 else -out


def defining_form(spec):
    """The invariant bilinear form in the fixed convention, or ``None`` for A."""
    n = spec.dim_v
    if spec.family in ("B", "D"):
        g = np.zeros((n, n), dtype=object)
        for i in range(n):
            g[i, n - 1 - i] = 1
        return g
    if spec.family == "C":
        r = spec.rank
        f = np.zeros((n, n), dtype=object)
        for i in range(r):
            f[i, r + i] = 1
            f[r + i, i] = -1
        return f
    return None


def _basis_matrices(spec, form, form_inv):
    n = spec.dim_v
    if spec.family == "A":
        mats = [_elementary(n, i, j) for i in range(n) for j in range(n) if i != j]
        for i in range(n - 1):
            mats.append(_elementary(n, i, i) - _elementary(n, i + 1, i + 1))
        return mats
    # Each projection is supported on an orbit of the involution
    # (i, j) -> transpose-through-the-form, so orbits identify duplicates.
    mats = []
    seen = set()
    for i in range(n):
        for j in range(n):
            e = _elementary(n, i, j)
            p = e - exact.matmul(exact.matmul(form_inv, e.T), form)
            if exact.is_zero(p):
                continue
            support = frozenset(idx for idx, x in np.ndenumerate(p) if x != 0)
            if support in seen:
                continue
            seen.add(support)
            mats.append(_content_normalize(exact.simplify(p)))
    flat = np.array([list(m.flat) for m in mats], dtype=object)
    if exact.rank(flat) != len(mats):
        raise AssertionError(f"{spec}: projected basis is not independent")
    return mats


def _coordinate_solver(basis):
    """Return a function mapping a matrix in the span to its basis coordinates."""
    flat = np.array([list(b.flat) for b in basis], dtype=object)
    _, pivots = exact.row_reduce(flat)
    sub_inv = exact.inverse(flat[:, pivots])

    def coords(m):
        v = np.array([m.flat[p] for p in pivots], dtype=object)
        x = exact.simplify(np.dot(v, sub_inv))
        recon = sum((x[a] * basis[a] for a in range(len(basis))), np.zeros_like(m))
        if not exact.is_zero(recon - m):
            raise ValueError("matrix not in the span of the basis (bracket closure failed)")
        return x

    return coords


def structure_constants(basis):
    """``c[a, b, c]`` with ``[X_a, X_b] = sum_c c[a, b, c] X_c``; closure is checked exactly."""
    d = len(basis)
    coords = _coordinate_solver(basis)
    c = np.zeros((d, d, d), dtype=object)
    for a in range(d):
        for b in range(a + 1, d):
            x = coords(exact.matmul(basis[a], basis[b]) - exact.matmul(basis[b], basis[a]))
            c[a, b, :] = x
            c[b, a, :] = -x
    return c


def adjoint_matrices(structure):
    """``ad(X_a)`` with ``(ad X_a)[c, b] = structure[a, b, c]``."""
    return [structure[a].T.copy() for a in range(structure.shape[0])]


def killing_form(structure):
    ad = adjoint_matrices(structure)
    d = len(ad)
    k = np.zeros((d, d), dtype=object)
    for a in range(d):
        for b in range(a, d):
            k[a, b] = k[b, a] = np.trace(np.dot(ad[a], ad[b]))
    return exact.simplify(k)


def build_algebra(spec):
    """Construct the :class:`ClassicalAlgebra` for ``spec`` (an ``AlgebraSpec`` or label)."""
    if not isinstance(spec, AlgebraSpec):
        spec = AlgebraSpec.parse(spec) if isinstance(spec, str) else AlgebraSpec(*spec)
    form = defining_form(spec)
    form_inv = exact.inverse(form) if form is not None else None
    basis = _basis_matrices(spec, form, form_inv)
    if len(basis) != spec.dim_g:
        raise AssertionError(f"{spec}: built {len(basis)} basis matrices, expected {spec.dim_g}")
    c = structure_constants(basis)
    k = killing_form(c)
    k_inv = exact.inverse(k)
    alg = ClassicalAlgebra(spec=spec, basis=tuple(basis), structure=c, killing=k,
                           killing_inverse=k_inv, form=form, form_inverse=form_inv)
    return alg


def adjoint_rep(alg):
    """Adjoint representation matrices ``ad(X_a)`` (exact, ``dim_g x dim_g``)."""
    return adjoint_matrices(alg.structure)


def killing_ratio(alg):
    """The scalar ``lam`` with ``K[a, b] == lam * tr_V(pi_a pi_b)`` for every pair."""
    tf = alg.trace_form()
    lam = None
    for idx, t in np.ndenumerate(tf):
        k = alg.killing[idx]
        if t == 0:
            if k != 0:
                raise NotProportional(f"{alg.spec}: K{idx}={k} but trace form vanishes")
            continue
        ratio = Fraction(k) / Fraction(t)
        if lam is None:
            lam = ratio
        elif ratio != lam:
            raise NotProportional(f"{alg.spec}: ratio {ratio} at {idx} differs from {lam}")
    if lam is None:
        raise NotProportional(f"{alg.spec}: trace form is identically zero")
    return lam


def transport(alg, s):
    """Re-express ``alg`` in the basis of ``V`` moved by the invertible matrix ``s``.

    Basis matrices become ``s pi s^-1``, the form becomes ``s^-T F s^-1`` and
    the Levi-Civita symbol picks up ``det(s)^-1``; structure constants and
    the Killing form are unchanged because conjugation is an automorphism.
    """
    s = np.asarray(s, dtype=object)
    s_inv = exact.inverse(s)
    d = exact.det(s)
    if d not in (1, -1):
        raise ValueError("transport expects a unimodular matrix")
    basis = tuple(exact.matmul(exact.matmul(s, b), s_inv) for b in alg.basis)
    form = form_inv = None
    if alg.form is not None:
        form = exact.matmul(exact.matmul(s_inv.T, alg.form), s_inv)
        form_inv = exact.inverse(form)
    return replace(alg, basis=basis, form=form, form_inverse=form_inv,
                   orientation=alg.orientation * int(d), _exponents=alg._exponents)


def outer_reflection(alg):
    """Orientation-reversing ``g``-orthogonal map for ``D_r``: swap coordinates r-1 and r.

    In the split basis these two coordinates are paired by ``g``, so the swap
    preserves ``g`` and has determinant -1.
    """
    if alg.family != "D":
        raise ValueError("the outer reflection is defined here for family D")
    n, r = alg.dim_v, alg.rank
    s = np.eye(n, dtype=int).astype(object)
    s[[r - 1, r]] = s[[r, r - 1]]
    return s


def conjugate_basis(alg, s):
    """``s pi(X_a) s^-1`` for every basis element (the automorphism acting on g only)."""
    s = np.asarray(s, dtype=object)
    s_inv = exact.inverse(s)
    return replace(alg, basis=tuple(exact.matmul(exact.matmul(s, b), s_inv) for b in alg.basis),
                   _exponents=alg._exponents)
