"""Rank computations over prime fields ``F_p`` with ``p < 2**31``.

Products of two residues stay below ``2**62`` so int64 arithmetic is exact.
"""

import heapq
import os
from collections import Counter

import numpy as np
import sympy

from .errors import BadPrime, PrimeDisagreement

DEFAULT_PRIMES = (2147483647, 2147483629)
ESCALATION_PRIME = 2147483587
PRIMES_ENV_VAR = "ADJINV_PRIMES"


def default_primes():
    """Primes from ``$ADJINV_PRIMES`` (comma-separated) or the two built-in 31-bit primes."""
    text = os.environ.get(PRIMES_ENV_VAR, "").strip()
    if not text:
        return DEFAULT_PRIMES
    return validate_primes(int(x) for x in text.split(",") if x.strip())


def validate_primes(primes):
    primes = tuple(int(p) for p in primes)
    if not primes:
        raise BadPrime("at least one prime is required")
    for p in primes:
        if not (2 < p < 2**31) or not sympy.isprime(p):
            raise BadPrime(f"{p} is not an odd prime below 2**31")
    return primes


def rank_dense_mod_p(a, p):
    """Rank of an integer matrix modulo ``p`` by row elimination."""
    m = np.array(a, dtype=np.int64) % p
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        inv = pow(int(m[r, c]), -1, p)
        m[r] = (m[r] * inv) % p
        below = r + 1 + np.nonzero(m[r + 1:, c])[0]
        if below.size:
            m[below] = (m[below] - np.outer(m[below, c], m[r]) % p) % p
        r += 1
    return r


def rank_sparse_mod_p(rows, p):
    """Rank of sparse integer vectors (dicts ``column -> value``) modulo ``p``.

    Incremental elimination: shortest rows first; every new pivot row is
    reduced against all earlier pivots and its pivot column is the entry
    whose column is least populated (Markowitz-style, limits fill-in).
    Earlier pivot rows are never back-substituted, so a row is reduced by
    popping pivot columns in insertion order.
    """
    work = []
    for r in rows:
        d = {c: v % p for c, v in r.items() if v % p}
        if d:
            work.append(d)
    work.sort(key=len)
    col_count = Counter(c for r in work for c in r)
    pivots = {}
    for r in work:
        heap = [(pivots[c][0], c) for c in r if c in pivots]
        heapq.heapify(heap)
        while heap:
            _, c = heapq.heappop(heap)
            v = r.get(c)
            if not v:
                continue
            for cc, pv in pivots[c][1].items():
                nv = (r.get(cc, 0) - v * pv) % p
                if nv:
                    if cc not in r and cc in pivots:
                        heapq.heappush(heap, (pivots[cc][0], cc))
                    r[cc] = nv
                else:
                    r.pop(cc, None)
        if r:
            c = min(r, key=lambda x: (col_count[x], x))
            inv = pow(r[c], -1, p)
            pivots[c] = (len(pivots), {cc: (vv * inv) % p for cc, vv in r.items()})
    return len(pivots)


def rank_over_primes(compute, primes, what):
    """Run ``compute(p)`` for every prime; on disagreement add the escalation prime once.

    Returns ``(value, primes_used)``.  A rank mod ``p`` never exceeds the
    rational rank, so with a disagreement the majority cannot be trusted
    blindly; we escalate and require the maximum to be attained twice.
    """
    primes = tuple(primes)
    results = {p: compute(p) for p in primes}
    if len(set(results.values())) == 1:
        return next(iter(results.values())), primes
    if ESCALATION_PRIME not in results:
        results[ESCALATION_PRIME] = compute(ESCALATION_PRIME)
        primes = primes + (ESCALATION_PRIME,)
    best = max(results.values())
    if sum(1 for v in results.values() if v == best) >= 2:
        return best, primes
    raise PrimeDisagreement(f"{what}: primes disagree {results}")
