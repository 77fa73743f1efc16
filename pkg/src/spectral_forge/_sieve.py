"""Integer sieves shared by the series engines.

Everything here is arithmetic bookkeeping independent of any particular
eigensystem: prime tables, smallest-prime-power factorizations, divisor
sums, and a counter-based hash used to draw reproducible per-prime
uniforms.  The factorization cache is the workhorse that lets a
multiplicative function be filled over 1..N with a handful of vectorized
gather passes instead of a per-integer Python loop.
"""

from __future__ import annotations

import threading

import numpy as np

__all__ = [
    "primes_up_to",
    "FactorCache",
    "shared_cache",
    "sigma1_table",
    "uniform_hash",
]


def primes_up_to(n: int) -> np.ndarray:
    """All primes <= n as an int64 array (Eratosthenes)."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


class FactorCache:
    """Smallest-prime-power split of every integer up to N.

    For n >= 2 write n = a * b where a = p^v, p the smallest prime factor
    of n and v its exact multiplicity; then b < n is coprime to p.  Any
    multiplicative function f can be filled over 1..N by first computing
    f on prime powers and then sweeping f[n] = f[a[n]] * f[b[n]] in waves
    ordered by the number of distinct prime factors, so every gather only
    reads entries already written.  The wave index arrays are precomputed
    once; filling a new function is then pure vectorized work.
    """

    def __init__(self, limit: int):
        if limit < 1:
            raise ValueError("limit must be >= 1")
        self.limit = int(limit)
        n = self.limit
        n_arr = np.arange(n + 1, dtype=np.int64)

        spf = np.zeros(n + 1, dtype=np.int64)
        for p in range(2, int(n**0.5) + 1):
            if spf[p] == 0:
                sl = spf[p * p :: p]
                sl[sl == 0] = p
        spf[spf == 0] = n_arr[spf == 0]
        spf[0] = 0
        spf[1] = 1
        self.spf = spf

        # a[n] = spf(n)^multiplicity, b[n] = n / a[n]
        aa = np.ones(n + 1, dtype=np.int64)
        mm = n_arr.copy()
        idx = np.nonzero(n_arr >= 2)[0]
        pp = spf[idx]
        while len(idx):
            aa[idx] *= pp
            mm[idx] //= pp
            keep = (mm[idx] % pp) == 0
            idx = idx[keep]
            pp = pp[keep]
        self.a = aa
        self.b = n_arr // aa

        self.primes = primes_up_to(n)

        # distinct-prime-factor count, for the wave schedule
        omega = np.zeros(n + 1, dtype=np.int8)
        for p in self.primes:
            omega[p::p] += 1
        self.omega = omega

        dtype = np.int64 if n > np.iinfo(np.int32).max else np.int32
        waves = []
        k = 2
        while True:
            wave = np.nonzero((omega == k) & (self.b > 1))[0].astype(dtype)
            if len(wave) == 0:
                break
            waves.append(wave)
            k += 1
        # pre-gathered a/b per wave: the per-fill cost is then 2 gathers + 1 multiply
        self._wave_ab = [
            (self.a[w].astype(dtype), self.b[w].astype(dtype)) for w in waves
        ]
        self._waves = waves

    def fill_multiplicative(self, prime_power_fill, dtype=np.complex128) -> np.ndarray:
        """Fill f(1..N) for a multiplicative f.

        ``prime_power_fill(out)`` must write f at every prime power <= N
        into the array ``out`` (f[1] is preset to 1).  Composite values
        are then completed by the wave sweep.
        """
        n = self.limit
        out = np.zeros(n + 1, dtype=dtype)
        if n >= 1:
            out[1] = 1
        prime_power_fill(out)
        for wave, (a, b) in zip(self._waves, self._wave_ab):
            out[wave] = out[a] * out[b]
        return out


_shared_lock = threading.Lock()
_shared: FactorCache | None = None


def shared_cache(limit: int) -> FactorCache:
    """Process-wide cache, grown monotonically to the largest request."""
    global _shared
    with _shared_lock:
        if _shared is None or _shared.limit < limit:
            _shared = FactorCache(limit)
        return _shared


def sigma1_table(limit: int, cache: FactorCache | None = None) -> np.ndarray:
    """sigma_1(n) = sum of divisors, exact in int64, for n = 0..limit."""
    cache = cache if cache is not None and cache.limit >= limit else shared_cache(limit)

    def fill(out):
        p = cache.primes[cache.primes <= limit]
        pk = p.copy()
        acc = 1 + p  # sigma1(p); sigma1(p^(k+1)) = sigma1(p^k)*p + 1
        while len(pk):
            out[pk] = acc
            keep = pk <= limit // p
            p, pk, acc = p[keep], pk[keep] * p[keep], acc[keep] * p[keep] + 1

    table = cache.fill_multiplicative(fill, dtype=np.int64)
    table[0] = 0
    return table[: limit + 1]


# splitmix64 constants
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def uniform_hash(seed: int, values, stream: int = 0) -> np.ndarray:
    """Deterministic uniforms in [0,1) keyed by (seed, stream, value).

    splitmix64-style finalizer on a counter derived from the key; this is
    evaluation-order independent, so a lazily drawn per-prime value never
    depends on which primes were requested first.
    """
    v = np.atleast_1d(np.asarray(values, dtype=np.uint64))
    key = np.uint64((seed & 0xFFFFFFFFFFFFFFFF) ^ ((stream & 0xFFFF) << 48))
    with np.errstate(over="ignore"):
        z = key ^ (v * _GOLDEN)
        z = z + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) / float(1 << 53)
