"""Synthetic Hecke eigensystems.

A system is determined by its level, an even nebentypus, a spectral
parameter, a parity sign, and seed values at primes; every other
coefficient follows from the three-term recurrence at unramified primes,
full multiplicativity at ramified primes, and multiplicativity across
coprime parts.  Seeds at primes dividing the level must respect the
ramified magnitude law: modulus 1 when the prime power dividing the
level exactly matches the one in the nebentypus conductor, p^(-1/2) when
the prime divides the level exactly once and misses the conductor, and 0
otherwise.

Coefficients are memoized with a fixed evaluation order (ascending prime
powers, right-associated products) so repeated lookups are bit-stable
run to run.  The vectorized table fill follows the same algebraic order;
SIMD rounding paths may differ from the scalar path in the last ulp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import arith
from ._sieve import FactorCache, shared_cache, uniform_hash

__all__ = [
    "HeckeEigenSystem",
    "coefficient",
    "coefficient_table",
    "verify_hecke_relation",
    "twist",
    "random_system",
    "ramified_magnitude",
]

MEMO_LIMIT_DEFAULT = 10**6


def ramified_magnitude(p: int, level: int, conductor: int) -> float:
    """Required |seed| at a prime dividing the level."""
    if level % p != 0:
        raise ValueError(f"{p} does not divide the level {level}")
    k = 0
    q = level
    while q % p == 0:
        q //= p
        k += 1
    kc = 0
    c = conductor
    while c % p == 0:
        c //= p
        kc += 1
    if k == kc:
        return 1.0
    if k == 1 and kc == 0:
        return p**-0.5
    return 0.0


def _check_ramified_seed(p: int, value: complex, level: int, conductor: int):
    mag = ramified_magnitude(p, level, conductor)
    if abs(abs(value) - mag) > 1e-9:
        raise ValueError(
            f"seed at ramified prime {p} has |value| = {abs(value):.6g}, "
            f"the magnitude law requires {mag:.6g}"
        )


@dataclass
class HeckeEigenSystem:
    """Level, nebentypus, spectral data, and prime seeds.

    ``unramified_seed`` optionally supplies values at primes not present
    in ``prime_seeds`` (vectorized callable over an int64 array);
    unseeded unramified primes default to 0.  After construction the
    system is immutable apart from the memo table, which behaves as a
    write-once cache: the same key always receives the same value, so
    concurrent readers at worst duplicate work.
    """

    level: int
    nebentypus: arith.DirichletCharacter
    s_phi: complex
    parity: int
    eta: complex = 1.0 + 0.0j
    prime_seeds: dict[int, complex] = field(default_factory=dict)
    unramified_seed: Callable[[np.ndarray], np.ndarray] | None = None
    tempered: bool = True
    memo_limit: int = MEMO_LIMIT_DEFAULT

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("level must be a positive integer")
        if self.nebentypus.modulus != self.level:
            raise ValueError("nebentypus modulus must equal the level")
        if not self.nebentypus.is_even:
            raise ValueError("nebentypus must be even")
        if self.parity not in (1, -1):
            raise ValueError("parity must be +1 or -1")
        self.s_phi = complex(self.s_phi)
        self.eta = complex(self.eta)
        cond = self.nebentypus.conductor
        for p, _ in arith.factorize(self.level):
            if p not in self.prime_seeds:
                raise ValueError(f"missing seed at ramified prime {p}")
        for p, v in self.prime_seeds.items():
            if self.level % p == 0:
                _check_ramified_seed(p, v, self.level, cond)
            elif self.tempered and abs(v) > 2.0 + 1e-9:
                raise ValueError(
                    f"unramified seed at {p} violates |value| <= 2 (tempered); "
                    "construct with tempered=False to allow it"
                )
        self._memo: dict[int, complex] = {1: 1.0 + 0.0j}

    # eigenvalue of the Laplacian this system models
    @property
    def laplace_eigenvalue(self) -> complex:
        return self.s_phi * (1 - self.s_phi)

    @property
    def conductor(self) -> int:
        return self.nebentypus.conductor

    def seed(self, p: int) -> complex:
        v = self.prime_seeds.get(p)
        if v is not None:
            return complex(v)
        if self.unramified_seed is not None:
            return complex(self.unramified_seed(np.array([p], dtype=np.int64))[0])
        return 0.0 + 0.0j

    def seeds_at(self, primes: np.ndarray) -> np.ndarray:
        """Vectorized seed lookup for an ascending prime array."""
        if len(primes) == 0:
            return np.zeros(0, dtype=np.complex128)
        if self.unramified_seed is not None:
            vals = self.unramified_seed(primes).astype(np.complex128)
        else:
            vals = np.zeros(len(primes), dtype=np.complex128)
        for p, v in self.prime_seeds.items():
            i = int(np.searchsorted(primes, p))
            if i < len(primes) and primes[i] == p:
                vals[i] = v
        return vals

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "nebentypus_ref": self.nebentypus.to_json(),
            "s_phi": [self.s_phi.real, self.s_phi.imag],
            "parity": self.parity,
            "eta": [self.eta.real, self.eta.imag],
            "seeds": {str(p): [v.real, v.imag] for p, v in sorted(self.prime_seeds.items())},
        }

    @staticmethod
    def from_json(rec: dict, unramified_seed=None) -> "HeckeEigenSystem":
        return HeckeEigenSystem(
            level=rec["level"],
            nebentypus=arith.DirichletCharacter.from_json(rec["nebentypus_ref"]),
            s_phi=complex(*rec["s_phi"]),
            parity=rec["parity"],
            eta=complex(*rec["eta"]),
            prime_seeds={int(p): complex(*v) for p, v in rec["seeds"].items()},
            unramified_seed=unramified_seed,
        )


def _prime_power_value(sys: HeckeEigenSystem, p: int, k: int) -> complex:
    """lambda(p^k) by the exact recurrence, memoized at each power."""
    memo = sys._memo
    lam_p = memo.get(p)
    if lam_p is None:
        lam_p = sys.seed(p)
        if p <= sys.memo_limit:
            memo[p] = lam_p
    if k == 1:
        return lam_p
    chi_p = complex(sys.nebentypus(p))
    prev2, prev1 = 1.0 + 0.0j, lam_p
    pk = p
    for _ in range(2, k + 1):
        pk *= p
        cached = memo.get(pk)
        if cached is not None:
            prev2, prev1 = prev1, cached
            continue
        nxt = lam_p * prev1 - chi_p * prev2
        if pk <= sys.memo_limit:
            memo[pk] = nxt
        prev2, prev1 = prev1, nxt
    return prev1


def coefficient(sys: HeckeEigenSystem, n: int) -> complex:
    """The n-th coefficient; negative n picks up the parity sign."""
    if n == 0:
        raise ValueError("coefficient undefined at n = 0")
    if n < 0:
        return sys.parity * coefficient(sys, -n)
    cached = sys._memo.get(n)
    if cached is not None:
        return cached
    # right-associated product over prime powers, descending prime, so the
    # multiplication order matches the vectorized table fill exactly
    acc = 1.0 + 0.0j
    for p, k in reversed(arith.factorize(n)):
        acc = _prime_power_value(sys, p, k) * acc
    if n <= sys.memo_limit:
        sys._memo[n] = acc
    return acc


def coefficient_table(
    sys: HeckeEigenSystem, limit: int, cache: FactorCache | None = None
) -> np.ndarray:
    """Vectorized table of coefficients at 1..limit (index 0 unused)."""
    cache = cache if cache is not None and cache.limit >= limit else shared_cache(limit)
    primes = cache.primes[cache.primes <= limit]
    chi_p = sys.nebentypus(primes)
    seeds = sys.seeds_at(primes)

    def fill(out):
        out[primes] = seeds
        pk = primes.copy()
        pkm1 = np.ones(len(primes), dtype=primes.dtype)
        p, lam_p, chi = primes, seeds, chi_p
        while True:
            keep = pk <= limit // p
            if not keep.any():
                break
            p, lam_p, chi = p[keep], lam_p[keep], chi[keep]
            pk_next = pk[keep] * p
            out[pk_next] = lam_p * out[pk[keep]] - chi * out[pkm1[keep]]
            pkm1, pk = pk[keep], pk_next

    table = cache.fill_multiplicative(fill, dtype=np.complex128)
    return table[: limit + 1]


def verify_hecke_relation(sys: HeckeEigenSystem, m: int, n: int) -> float:
    """|lambda(m) lambda(n) - sum over d | (m, n) of chi(d) lambda(m n / d^2)|."""
    if m < 1 or n < 1:
        raise ValueError("arguments must be positive")
    lhs = coefficient(sys, m) * coefficient(sys, n)
    rhs = 0.0 + 0.0j
    for d in arith.divisors(math.gcd(m, n)):
        rhs += sys.nebentypus(d) * coefficient(sys, m * n // (d * d))
    return abs(lhs - rhs)


class _TwistedSeed:
    """Unramified seeds of a twisted system: psi(p) times the base seed."""

    def __init__(self, base: HeckeEigenSystem, psi: arith.DirichletCharacter):
        self.base = base
        self.psi = psi

    def __call__(self, primes: np.ndarray) -> np.ndarray:
        return self.psi(primes) * self.base.seeds_at(primes)


def twist(sys: HeckeEigenSystem, psi: arith.DirichletCharacter) -> HeckeEigenSystem:
    """Twist by a primitive character psi of conductor r.

    The new level is lcm(q, q* r, r^2) with q* the nebentypus conductor;
    the nebentypus becomes chi psi^2 read mod the new level, the parity
    multiplies by psi(-1), and every coefficient at m coprime to the new
    level is psi(m) times the old one.  Seeds at primes dividing r are
    set to 0, the only magnitude the ramified law admits there; seeds at
    primes dividing q but not r carry over as psi(p) lambda(p).
    """
    if not psi.is_primitive:
        raise ValueError("twisting character must be primitive")
    q = sys.level
    r = psi.modulus
    q_star = sys.nebentypus.conductor
    new_level = math.lcm(q, q_star * r, r * r)

    res = np.arange(new_level)
    chi_psi2 = sys.nebentypus(res) * psi(res) ** 2
    chi_psi2[np.gcd(res, new_level) > 1] = 0.0
    if new_level == 1:
        chi_psi2 = np.ones(1, dtype=np.complex128)
    nebentypus = arith.character_from_values(new_level, chi_psi2)

    seeds: dict[int, complex] = {}
    for p, _ in arith.factorize(new_level):
        if r % p == 0:
            seeds[p] = 0.0 + 0.0j
        else:  # p | q, p coprime to r
            seeds[p] = complex(psi(p)) * coefficient(sys, p)

    parity = sys.parity * int(round(psi(psi.modulus - 1).real)) if r > 1 else sys.parity

    return HeckeEigenSystem(
        level=new_level,
        nebentypus=nebentypus,
        s_phi=sys.s_phi,
        parity=parity,
        eta=sys.eta,
        prime_seeds=seeds,
        unramified_seed=_TwistedSeed(sys, psi),
        tempered=sys.tempered,
        memo_limit=sys.memo_limit,
    )


class _HashSeed:
    """Deterministic unramified seeds 2 cos(2 pi u) keyed by (seed, p)."""

    def __init__(self, seed: int):
        self.seed = int(seed)

    def __call__(self, primes: np.ndarray) -> np.ndarray:
        u = uniform_hash(self.seed, primes, stream=0)
        return (2.0 * np.cos(2.0 * np.pi * u)).astype(np.complex128)


def random_system(
    seed: int,
    q: int,
    chi: arith.DirichletCharacter,
    s_phi: complex = 0.5 + 5.0j,
    parity: int = -1,
) -> HeckeEigenSystem:
    """Deterministic synthetic system for a given seed.

    Unramified values are 2 cos(theta_p) with theta_p uniform; ramified
    values take the magnitude the law dictates with a uniform phase.
    """
    if not chi.is_even:
        raise ValueError("nebentypus must be even")
    seeds: dict[int, complex] = {}
    for p, _ in arith.factorize(q):
        mag = ramified_magnitude(p, q, chi.conductor)
        phase = uniform_hash(seed, [p], stream=1)[0]
        seeds[p] = mag * np.exp(2j * np.pi * phase)
    eta_phase = uniform_hash(seed, [0], stream=2)[0]
    return HeckeEigenSystem(
        level=q,
        nebentypus=chi,
        s_phi=s_phi,
        parity=parity,
        eta=complex(np.exp(2j * np.pi * eta_phase)),
        prime_seeds=seeds,
        unramified_seed=_HashSeed(seed),
    )
