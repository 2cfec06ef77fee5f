"""Exact-rational dense tensors over adjoint indices.

An :class:`AdjointTensor` stores an integer numerator array (numpy object
dtype holding Python ints, so arbitrary precision) and one positive common
denominator.  The pair is kept in lowest terms, so two tensors are equal
exactly when their numerators and denominators agree.

Slot permutations follow

    (sigma . T)(X_1, ..., X_k) = T(X_{sigma^-1(1)}, ..., X_{sigma^-1(k)})

which on arrays is ``np.transpose(T, sigma)`` with ``sigma`` given by its
0-based images.  Because it substitutes arguments, this composes as
``sigma . (tau . T) = (tau o sigma) . T`` (a right action).
"""

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, gcd, lcm, prod

import numpy as np

from .errors import BadPrime, BudgetExceeded, DegreeMismatch, DimMismatch

DEFAULT_ENTRY_BUDGET = 2**27
_INT64_SAFE = 2**62


def check_budget(what, entries, budget=None):
    budget = DEFAULT_ENTRY_BUDGET if budget is None else budget
    if entries > budget:
        raise BudgetExceeded(what, entries, budget)


def fits_int64(num, factor=1):
    """True when ``|entry| * factor`` stays below 2**62 for every entry."""
    if num.size == 0:
        return True
    if num.dtype != object:
        hi = int(np.abs(num).max())
    else:
        hi = max(abs(int(x)) for x in num.flat)
    return hi * factor < _INT64_SAFE


def to_int64(num, factor=1):
    """int64 copy of ``num`` if arithmetic scaled by ``factor`` cannot overflow, else None."""
    if num.dtype == np.int64:
        return num if fits_int64(num, factor) else None
    return num.astype(np.int64) if fits_int64(num, factor) else None


def as_object(num):
    if num.dtype == object:
        return num
    return num.astype(object)


class Permutation(tuple):
    """A permutation of ``range(k)`` stored by its images."""

    def __new__(cls, images):
        images = tuple(int(i) for i in images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation of range({len(images)}): {images}")
        return super().__new__(cls, images)

    @classmethod
    def identity(cls, k):
        return cls(range(k))

    @classmethod
    def from_cycles(cls, k, cycles):
        images = list(range(k))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                images[a] = b
        return cls(images)

    @property
    def degree(self):
        return len(self)

    def __call__(self, i):
        return self[i]

    def compose(self, other):
        """``self o other`` (apply ``other`` first)."""
        if len(other) != len(self):
            raise DegreeMismatch("composing permutations of different degrees")
        return Permutation(self[other[i]] for i in range(len(self)))

    def inverse(self):
        inv = [0] * len(self)
        for i, j in enumerate(self):
            inv[j] = i
        return Permutation(inv)

    def sign(self):
        seen = [False] * len(self)
        s = 1
        for i in range(len(self)):
            if seen[i]:
                continue
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = self[j]
                length += 1
            if length % 2 == 0:
                s = -s
        return s


class AdjointTensor:
    """Degree-``k`` tensor on a ``dim``-dimensional space with exact rational entries."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1, *, normalize=True):
        num = np.asarray(num)
        if num.dtype != object:
            if not np.issubdtype(num.dtype, np.integer):
                raise TypeError(f"numerators must be integers, got dtype {num.dtype}")
            num = as_object(num)
        den = int(den)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = -num, -den
        if normalize and den != 1:
            g = den
            for x in num.flat:
                g = gcd(g, x)
                if g == 1:
                    break
            if g != 1:
                num = num // g
                den //= g
        num.flags.writeable = False
        self.num = num
        self.den = den

    # construction -------------------------------------------------------
    @classmethod
    def from_entries(cls, entries):
        """Build from an array of ints/Fractions."""
        arr = np.asarray(entries, dtype=object)
        dens = [Fraction(x).denominator for x in arr.flat]
        den = lcm(*dens) if dens else 1
        num = np.empty(arr.shape, dtype=object)
        for idx, x in np.ndenumerate(arr):
            x = Fraction(x)
            num[idx] = x.numerator * (den // x.denominator)
        return cls(num, den)

    @classmethod
    def zeros(cls, dim, degree):
        return cls(np.zeros((dim,) * degree, dtype=np.int64))

    @classmethod
    def scalar(cls, value=1):
        return cls.from_entries(np.array(Fraction(value), dtype=object))

    # shape ----------------------------------------------------------------
    @property
    def degree(self):
        return self.num.ndim

    @property
    def dim(self):
        return self.num.shape[0] if self.num.ndim else None

    @property
    def size(self):
        return self.num.size

    def __getitem__(self, idx):
        return Fraction(int(self.num[idx]), self.den)

    def entries(self):
        """Entries as an object array of ``Fraction``."""
        out = np.empty(self.num.shape, dtype=object)
        for idx, x in np.ndenumerate(self.num):
            out[idx] = Fraction(int(x), self.den)
        return out

    def is_zero(self):
        return not any(x != 0 for x in self.num.flat)

    # arithmetic ---------------------------------------------------------
    def _aligned(self, other):
        if self.num.shape != other.num.shape:
            if self.degree != other.degree:
                raise DegreeMismatch(f"degrees {self.degree} and {other.degree}")
            raise DimMismatch(f"shapes {self.num.shape} and {other.num.shape}")
        d = lcm(self.den, other.den)
        return self.num * (d // self.den), other.num * (d // other.den), d

    def __add__(self, other):
        a, b, d = self._aligned(other)
        return AdjointTensor(a + b, d)

    def __sub__(self, other):
        a, b, d = self._aligned(other)
        return AdjointTensor(a - b, d)

    def __neg__(self):
        return AdjointTensor(-self.num, self.den, normalize=False)

    def scale(self, c):
        c = Fraction(c)
        return AdjointTensor(self.num * c.numerator, self.den * c.denominator)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, AdjointTensor):
            return NotImplemented
        return (self.num.shape == other.num.shape and self.den == other.den
                and all(x == y for x, y in zip(self.num.flat, other.num.flat)))

    __hash__ = None

    def __repr__(self):
        return f"AdjointTensor(degree={self.degree}, dim={self.dim}, den={self.den})"

    def ratio_to(self, other):
        """The scalar ``mu`` with ``self == mu * other``, or None if not proportional."""
        if self.num.shape != other.num.shape:
            return None
        mu = None
        for x, y in zip(self.num.flat, other.num.flat):
            if y == 0:
                if x != 0:
                    return None
                continue
            r = Fraction(int(x), int(y))
            if mu is None:
                mu = r
            elif r != mu:
                return None
        if mu is None:
            return Fraction(0) if self.is_zero() else None
        return mu * Fraction(other.den, self.den)


def permute(sigma, t):
    """Slot permutation ``(sigma . T)``; ``sigma`` is a :class:`Permutation` or image sequence."""
    sigma = Permutation(sigma)
    if sigma.degree != t.degree:
        raise DegreeMismatch(f"permutation of degree {sigma.degree} on a degree-{t.degree} tensor")
    return AdjointTensor(np.transpose(t.num, sigma), t.den, normalize=False)


def _swap_axes(a, i, j):
    return np.swapaxes(a, i, j)


def _coset_sum(num, sign, axes=None):
    """Sum (optionally signed) of ``num`` over all permutations of ``axes`` (default: all).

    Uses ``S_j = union_i (i j) S_{j-1}`` so only k(k-1)/2 transposes are needed.
    """
    axes = list(range(num.ndim)) if axes is None else list(axes)
    acc = num
    for j in range(1, len(axes)):
        nxt = acc.copy()
        for i in range(j):
            swapped = _swap_axes(acc, axes[i], axes[j])
            nxt = nxt - swapped if sign else nxt + swapped
        acc = nxt
    return acc


def _group_sum(t, sign, slots=None):
    k = t.degree if slots is None else len(slots)
    n = factorial(k)
    fast = to_int64(t.num, n)
    num = _coset_sum(fast if fast is not None else t.num, sign, slots)
    return AdjointTensor(num, t.den * n)


def symmetrize(t, slots=None):
    """``(1/k!) sum_sigma sigma . T`` over permutations of ``slots`` (default: all k slots)."""
    return _group_sum(t, sign=False, slots=slots)


def antisymmetrize(t, slots=None):
    """``(1/k!) sum_sigma sign(sigma) sigma . T`` over permutations of ``slots``."""
    return _group_sum(t, sign=True, slots=slots)


def tensor_product(s, t):
    if s.degree and t.degree and s.dim != t.dim:
        raise DimMismatch(f"dims {s.dim} and {t.dim}")
    return AdjointTensor(np.multiply.outer(s.num, t.num), s.den * t.den, normalize=False)


def tensor_product_all(tensors):
    out = tensors[0]
    for t in tensors[1:]:
        out = tensor_product(out, t)
    return out


def contract(s, i, t, j):
    """Contract slot ``i`` of ``s`` with slot ``j`` of ``t`` (remaining slots of s, then t)."""
    if s.dim != t.dim:
        raise DimMismatch(f"dims {s.dim} and {t.dim}")
    return AdjointTensor(np.tensordot(s.num, t.num, axes=([i], [j])), s.den * t.den)


def from_matrix(m):
    """Degree-2 tensor from an exact matrix."""
    return AdjointTensor.from_entries(np.asarray(m, dtype=object))


@dataclass(frozen=True)
class PrimeVector:
    prime: int
    coords: np.ndarray
    denominator: int = 1

    def __add__(self, other):
        if self.prime != other.prime:
            raise ValueError("different primes")
        return PrimeVector(self.prime, (self.coords + other.coords) % self.prime,
                           lcm(self.denominator, other.denominator))

    def scale(self, c):
        return PrimeVector(self.prime, (self.coords * (int(c) % self.prime)) % self.prime,
                           self.denominator)


def reduce_mod(num, den, p):
    """Flattened residues of ``num / den`` modulo ``p`` as int64."""
    if den % p == 0:
        raise BadPrime(f"denominator {den} vanishes modulo {p}")
    inv = pow(den, -1, p)
    if num.dtype == np.int64:
        res = num.reshape(-1) % p
    else:
        res = np.fromiter((int(x) % p for x in num.flat), dtype=np.int64, count=num.size)
    if inv != 1:
        res = (res * inv) % p
    return res


def to_prime_vector(t, p):
    return PrimeVector(p, reduce_mod(t.num, t.den, p), t.den)


def entry_count(dim, degree):
    return prod([dim] * degree) if degree else 1
