"""Dirichlet characters and the integer arithmetic built on top of them.

Characters are stored as full value tables, so evaluation is a single
array lookup; construction goes through discrete logarithms on the unit
group of each prime-power factor (two generators -1 and 5 at powers of
2, a primitive root elsewhere) glued by CRT.  Conductors come from the
orders of the generator images, cross-checked in the test suite against
a brute-force divisor search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "DirichletCharacter",
    "GroupCharacterView",
    "enumerate_characters",
    "conductor_decompose",
    "gauss_sum",
    "sigma1",
    "euler_phi",
    "factorize",
    "divisors",
]


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization [(p, multiplicity), ...] by trial division."""
    if n < 1:
        raise ValueError("factorize expects n >= 1")
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            k = 0
            while m % p == 0:
                m //= p
                k += 1
            out.append((p, k))
        p += 1 if p == 2 else 2
    if m > 1:
        out.append((m, 1))
    return out


def divisors(n: int) -> list[int]:
    """All positive divisors of n, ascending."""
    ds = [1]
    for p, k in factorize(n):
        ds = [d * p**j for d in ds for j in range(k + 1)]
    return sorted(ds)


def euler_phi(n: int) -> int:
    phi = 1
    for p, k in factorize(n):
        phi *= p ** (k - 1) * (p - 1)
    return phi


def sigma1(n: int) -> int:
    """Sum of divisors, exact."""
    if n < 1:
        raise ValueError("sigma1 expects n >= 1")
    total = 1
    for p, k in factorize(n):
        total *= (p ** (k + 1) - 1) // (p - 1)
    return total


def _primitive_root(p: int) -> int:
    """Smallest primitive root mod an odd prime p."""
    order = p - 1
    prime_parts = [q for q, _ in factorize(order)]
    for g in range(2, p):
        if all(pow(g, order // q, p) != 1 for q in prime_parts):
            return g
    raise ArithmeticError(f"no primitive root mod {p}")  # unreachable for prime p


@lru_cache(maxsize=None)
def _unit_group_structure(pe: int, p: int, e: int):
    """Generators and orders of (Z/p^e)^*, plus discrete-log tables.

    Returns (orders, dlogs) where dlogs[r] is the exponent tuple of the
    residue r on the generators, or None for r not coprime.  At p = 2,
    e >= 3 the group is <-1> x <5>.
    """
    if p == 2:
        if e == 1:
            return (), {1: ()}
        if e == 2:
            return (2,), {1: (0,), 3: (1,)}
        half = pe // 4  # order of 5 mod 2^e
        dlogs = {}
        val = 1
        for j in range(half):
            dlogs[val % pe] = (0, j)
            dlogs[(-val) % pe] = (1, j)
            val = (val * 5) % pe
        return (2, half), dlogs
    g = _primitive_root(p)
    if e > 1 and pow(g, p - 1, p * p) == 1:
        g += p
    order = pe // p * (p - 1)
    dlogs = {}
    val = 1
    for j in range(order):
        dlogs[val] = (j,)
        val = (val * g) % pe
    return (order,), dlogs


def _local_conductor(p: int, e: int, orders, exps) -> int:
    """Conductor of the local character with generator exponents ``exps``."""
    if p == 2:
        if e == 1 or not exps:
            return 1
        if e == 2:
            return 4 if exps[0] % 2 else 1
        k_sign, k_five = exps
        m5 = orders[1] // math.gcd(orders[1], k_five)  # order of the <5>-part
        if m5 > 1:
            return 4 * m5
        return 4 if k_sign % 2 else 1
    m = orders[0] // math.gcd(orders[0], exps[0])
    if m == 1:
        return 1
    v = 0
    while m % p == 0:
        m //= p
        v += 1
    return p ** (v + 1)


@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character mod q as a dense value table.

    ``values[r]`` is the value at the residue r; zero when gcd(r, q) > 1.
    The modulus-1 character is the constant 1 on every integer, which
    keeps Euler products over all primes uniform.
    """

    modulus: int
    values: np.ndarray
    conductor: int
    is_even: bool
    _exponents: tuple = field(default=(), compare=False, repr=False)

    def __call__(self, n: int | np.ndarray):
        return self.values[np.asarray(n) % self.modulus] if np.ndim(n) else self.values[int(n) % self.modulus]

    @property
    def is_principal(self) -> bool:
        return self.conductor == 1

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def conjugate(self) -> "DirichletCharacter":
        return DirichletCharacter(
            self.modulus, np.conj(self.values), self.conductor, self.is_even
        )

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        """Pointwise product, defined mod lcm of the two moduli."""
        m = self.modulus * other.modulus // math.gcd(self.modulus, other.modulus)
        return character_from_values(m, _product_table(self, other, m))

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "conductor": self.conductor,
            "parity": "even" if self.is_even else "odd",
            "values": [[float(v.real), float(v.imag)] for v in self.values],
        }

    @staticmethod
    def from_json(rec: dict) -> "DirichletCharacter":
        vals = np.array([complex(re, im) for re, im in rec["values"]])
        chi = character_from_values(rec["modulus"], vals)
        if chi.conductor != rec["conductor"]:
            raise ValueError("stored conductor disagrees with recomputed value")
        return chi


def _product_table(a: DirichletCharacter, b: DirichletCharacter, m: int) -> np.ndarray:
    r = np.arange(m)
    vals = a.values[r % a.modulus] * b.values[r % b.modulus]
    # zero out residues sharing a factor with the lcm modulus
    g = np.gcd(r, m)
    vals[g > 1] = 0.0
    if m == 1:
        vals[:] = 1.0
    return vals


def _build_character(q: int, factors, structures, exps_per_factor) -> DirichletCharacter:
    values = np.ones(q, dtype=np.complex128)
    conductor = 1
    flat_exps = []
    for (p, e), (orders, dlogs), exps in zip(factors, structures, exps_per_factor):
        pe = p**e
        local = np.zeros(pe, dtype=np.complex128)
        for r, dl in dlogs.items():
            ang = sum(exps[i] * dl[i] / orders[i] for i in range(len(orders)))
            local[r] = np.exp(2j * np.pi * ang)
        values *= local[np.arange(q) % pe]
        conductor *= _local_conductor(p, e, orders, exps)
        flat_exps.append(tuple(exps))
    if q == 1:
        values = np.ones(1, dtype=np.complex128)
    is_even = bool(abs(values[(q - 1) % q] - 1.0) < 1e-9) if q > 1 else True
    return DirichletCharacter(q, values, conductor, is_even, tuple(flat_exps))


def enumerate_characters(q: int) -> list[DirichletCharacter]:
    """All phi(q) Dirichlet characters mod q, in a fixed generator order."""
    if q < 1:
        raise ValueError("modulus must be >= 1")
    if q == 1:
        return [DirichletCharacter(1, np.ones(1, dtype=np.complex128), 1, True)]
    factors = factorize(q)
    structures = [_unit_group_structure(p**e, p, e) for p, e in factors]
    ranges = []
    for orders, _ in structures:
        ranges.append([tuple()] if not orders else None)
    out = []

    def rec(i, chosen):
        if i == len(factors):
            out.append(_build_character(q, factors, structures, chosen))
            return
        orders, _ = structures[i]
        if not orders:
            rec(i + 1, chosen + [()])
            return
        def loop(j, exps):
            if j == len(orders):
                rec(i + 1, chosen + [tuple(exps)])
                return
            for k in range(orders[j]):
                loop(j + 1, exps + [k])
        loop(0, [])

    rec(0, [])
    return out


def character_from_values(q: int, values) -> DirichletCharacter:
    """Wrap an explicit value table; conductor found by divisor search."""
    vals = np.asarray(values, dtype=np.complex128)
    if vals.shape != (q,):
        raise ValueError("value table must have length q")
    conductor = q
    for d in divisors(q):
        if _is_induced_from(q, vals, d):
            conductor = d
            break
    is_even = bool(abs(vals[(q - 1) % q] - 1.0) < 1e-9) if q > 1 else True
    return DirichletCharacter(q, vals, conductor, is_even)


def _is_induced_from(q: int, vals: np.ndarray, d: int) -> bool:
    """True when the table factors through residues mod d on units."""
    units = [r for r in range(q) if math.gcd(r, q) == 1]
    seen: dict[int, complex] = {}
    for r in units:
        key = r % d
        v = vals[r]
        if key in seen:
            if abs(seen[key] - v) > 1e-9:
                return False
        else:
            seen[key] = v
    return True


def conductor_decompose(chi: DirichletCharacter) -> tuple[DirichletCharacter, int]:
    """Split chi into its primitive core: returns (chi_star, q_star).

    chi_star is primitive mod q_star = chi.conductor and agrees with chi
    on every n coprime to the modulus.
    """
    q, f = chi.modulus, chi.conductor
    if f == q:
        return chi, f
    vals = np.zeros(f, dtype=np.complex128)
    for r in range(f):
        if math.gcd(r, f) != 1:
            continue
        # lift r to a residue mod q coprime to q (exists since (r, f) = 1)
        m = r
        while math.gcd(m, q) != 1:
            m += f
        vals[r] = chi.values[m % q]
    if f == 1:
        vals = np.ones(1, dtype=np.complex128)
    star = character_from_values(f, vals)
    if star.conductor != f:
        raise ArithmeticError("primitive core failed its own conductor check")
    return star, f


def gauss_sum(psi: DirichletCharacter) -> complex:
    """tau(psi) = sum over a mod r of psi(a) e^(2*pi*i*a/r)."""
    r = psi.modulus
    a = np.arange(r)
    return complex(np.sum(psi.values * np.exp(2j * np.pi * a / r)))


@dataclass(frozen=True)
class GroupCharacterView:
    """The induced character on the Hecke congruence group of the modulus.

    Evaluation at an integer matrix [[a, b], [c, d]] with determinant one
    and the modulus dividing c returns the base character at d.
    """

    base: DirichletCharacter

    def __call__(self, mat) -> complex:
        (a, b), (c, d) = mat
        if a * d - b * c != 1:
            raise ValueError("matrix must have determinant 1")
        if c % self.base.modulus != 0:
            raise ValueError("lower-left entry must be divisible by the modulus")
        return complex(self.base(d))
