"""Weight-2 Eisenstein combinations and evaluation of Maass Fourier data.

The weight-2 Eisenstein series is only quasi-modular; the level-q
difference E2(z) - q E2(qz) repairs it, and differencing once more in a
second level produces a holomorphic weight-2 form whose constant term
vanishes, the deformation direction every pairing downstream uses.
Truncation orders are chosen from Im z so the q-expansion tail stays
below 1e-12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import arith
from ._sieve import shared_cache, sigma1_table
from .special import bessel_k

__all__ = [
    "HolomorphicQExpansion",
    "MaassFourierData",
    "e2_coefficients",
    "e2_eval",
    "quasimodular_residual",
    "g_q",
    "g_q1q2",
    "maass_eval",
    "twist_average_residual",
    "MIN_IM",
]

MIN_IM = 0.2  # q-expansions are never evaluated below this height


@dataclass(frozen=True)
class HolomorphicQExpansion:
    """Coefficients b_0..b_N of a weight-2 q-expansion at a given level."""

    coefficients: np.ndarray
    level: int
    weight: int = 2

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", np.asarray(self.coefficients, dtype=np.complex128)
        )

    @property
    def cuspidal_at_infinity(self) -> bool:
        return self.coefficients[0] == 0

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def eval(self, z: complex) -> complex:
        """Sum of b_n e^(2 pi i n z) over the stored coefficients."""
        z = complex(z)
        if z.imag < MIN_IM:
            raise ValueError(f"Im z = {z.imag:.3g} is below the supported height {MIN_IM}")
        n = np.arange(len(self.coefficients))
        qpow = np.exp(2j * np.pi * z * n)
        return complex(np.sum(self.coefficients * qpow))

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "weight": self.weight,
            "coefficients": [[c.real, c.imag] for c in self.coefficients],
        }


def _e2_terms_needed(im_z: float, eps: float = 1e-12) -> int:
    """Smallest N with the sigma-weighted tail below eps at height im_z."""
    x = math.exp(-2 * math.pi * im_z)
    n = 8
    while 48.0 * (n + 1) ** 2 * x ** (n + 1) / (1 - x) ** 3 > eps:
        n += 8
        if n > 500000:
            raise ValueError("requested height too small for a certified tail")
    return n


def e2_coefficients(N: int) -> HolomorphicQExpansion:
    """b_0 = 1, b_n = -24 sigma_1(n): the weight-2 Eisenstein expansion."""
    if N < 0:
        raise ValueError("N must be >= 0")
    coeff = np.zeros(N + 1, dtype=np.complex128)
    coeff[0] = 1.0
    if N >= 1:
        coeff[1:] = -24.0 * sigma1_table(N)[1:].astype(np.float64)
    return HolomorphicQExpansion(coeff, level=1)


def e2_eval(z: complex, N: int | None = None) -> complex:
    """E2 at z from the q-expansion, truncation certified from Im z."""
    z = complex(z)
    if z.imag < MIN_IM:
        raise ValueError(f"Im z = {z.imag:.3g} below supported height {MIN_IM}")
    n = N if N is not None else max(200, _e2_terms_needed(z.imag))
    return e2_coefficients(n).eval(z)


def quasimodular_residual(gamma, z: complex, N: int = 200) -> float:
    """Defect of the weight-2 transformation law with its linear anomaly.

    |E2(gz) - (cz+d)^2 E2(z) + (6i/pi) c (cz+d)| with both evaluations
    truncated; the truncation order is raised adaptively when the mapped
    point sits lower in the strip.
    """
    (a, b), (c, d) = gamma
    if a * d - b * c != 1:
        raise ValueError("matrix must have determinant 1")
    z = complex(z)
    gz = (a * z + b) / (c * z + d)
    if min(z.imag, gz.imag) < MIN_IM:
        raise ValueError("both z and gz must satisfy the minimum-height bound")
    n_z = max(N, _e2_terms_needed(z.imag))
    n_gz = max(N, _e2_terms_needed(gz.imag))
    lhs = e2_eval(gz, n_gz)
    rhs = (c * z + d) ** 2 * e2_eval(z, n_z) - (6j / np.pi) * c * (c * z + d)
    return float(abs(lhs - rhs))


def g_q(q: int, N: int) -> HolomorphicQExpansion:
    """E2(z) - q E2(qz): modular of level q, constant term 1 - q."""
    if q < 2:
        raise ValueError("q must be >= 2")
    base = e2_coefficients(N).coefficients
    coeff = base.copy()
    coeff[0] = 1.0 - q
    idx = np.arange(0, N + 1, q)[1:]
    coeff[idx] -= q * base[idx // q]
    return HolomorphicQExpansion(coeff, level=q)


def g_q1q2(q1: int, q2: int, N: int) -> HolomorphicQExpansion:
    """G_{q1}(z) - G_{q1}(q2 z): cuspidal at infinity, level q1 q2.

    First coefficient is always -24.
    """
    if q1 < 2 or q2 < 2:
        raise ValueError("both factors must be >= 2")
    gq = g_q(q1, N).coefficients
    coeff = gq.copy()
    idx = np.arange(0, N + 1, q2)
    coeff[idx] -= gq[idx // q2]
    return HolomorphicQExpansion(coeff, level=q1 * q2)


@dataclass(frozen=True)
class MaassFourierData:
    """Fourier data of a weight-0 eigenfunction: rho(n) for 0 < |n| <= N.

    The parity sign ties negative indices to positive ones exactly:
    rho(-n) = parity * rho(n) is enforced at construction.
    """

    coefficients: dict[int, complex]
    s_phi: complex
    parity: int
    _max_index: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.parity not in (1, -1):
            raise ValueError("parity must be +1 or -1")
        coeffs = {int(n): complex(v) for n, v in self.coefficients.items()}
        if 0 in coeffs:
            raise ValueError("index 0 is not part of the expansion")
        for n, v in list(coeffs.items()):
            if n > 0:
                want = self.parity * v
                if -n in coeffs:
                    if abs(coeffs[-n] - want) > 0:
                        raise ValueError(f"parity relation broken at n = {n}")
                else:
                    coeffs[-n] = want
        for n in list(coeffs):
            if n < 0 and -n not in coeffs:
                coeffs[-n] = self.parity * coeffs[n]
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "_max_index", max(abs(n) for n in coeffs) if coeffs else 0)

    @staticmethod
    def from_positive(coeffs: dict[int, complex], s_phi: complex, parity: int) -> "MaassFourierData":
        return MaassFourierData({n: v for n, v in coeffs.items() if n > 0}, s_phi, parity)

    def twisted(self, psi: arith.DirichletCharacter) -> "MaassFourierData":
        """Coefficientwise twist psi(n) rho(n); parity picks up psi(-1)."""
        new = {n: complex(psi(n)) * v for n, v in self.coefficients.items()}
        new_parity = self.parity * int(round(psi(-1).real))
        return MaassFourierData(
            {n: v for n, v in new.items() if n > 0}, self.s_phi, new_parity
        )

    def to_json(self) -> dict:
        return {
            "s_phi": [self.s_phi.real, self.s_phi.imag],
            "parity": self.parity,
            "coeffs": {str(n): [v.real, v.imag] for n, v in sorted(self.coefficients.items()) if n > 0},
        }


def _maass_components(data: MaassFourierData, y: float, N: int):
    """(indices, rho(n) sqrt(y) K_nu(2 pi |n| y)) for 0 < |n| <= N.

    The radial factors depend only on |n|, so callers evaluating several
    horizontal translates reuse one Bessel pass.
    """
    nu = data.s_phi - 0.5
    limit = min(N, data._max_index)
    pos = np.array([n for n in range(1, limit + 1) if n in data.coefficients], dtype=np.int64)
    if len(pos) == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.complex128)
    args = 2.0 * np.pi * pos * y
    keep = args < 700.0  # beyond this the radial factor underflows
    pos = pos[keep]
    if len(pos) == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.complex128)
    radial = math.sqrt(y) * bessel_k(nu, 2.0 * np.pi * pos * y)
    return pos, radial


def maass_eval(data: MaassFourierData, z: complex, N: int) -> complex:
    """Truncated Fourier sum rho(n) sqrt(y) K_nu(2 pi |n| y) e^(2 pi i n x)."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("evaluation point must be in the upper half-plane")
    pos, radial = _maass_components(data, z.imag, N)
    if len(pos) == 0:
        return 0.0 + 0.0j
    x = z.real
    phase = np.exp(2j * np.pi * pos * x)
    rho_pos = np.array([data.coefficients[int(n)] for n in pos])
    rho_neg = np.array([data.coefficients[-int(n)] for n in pos])
    return complex(np.sum(radial * (rho_pos * phase + rho_neg / phase)))


def maass_tail_bound(data: MaassFourierData, y: float, N: int) -> float:
    """Crude tail bound from |rho(n)| <= C sqrt(n) and exponential decay."""
    if not data.coefficients:
        return 0.0
    c = max(abs(v) / math.sqrt(abs(n)) for n, v in data.coefficients.items())
    t = 2.0 * math.pi * (N + 1) * y
    return 4.0 * c * (N + 1) * math.exp(-t) / (1.0 - math.exp(-2.0 * math.pi * y))


def twist_average_residual(
    data: MaassFourierData, psi: arith.DirichletCharacter, z: complex, N: int
) -> float:
    """Gap between the shift-averaged twist and the coefficientwise twist.

    Compares tau(conj psi)^-1 sum over a mod r of conj(psi)(a) times the
    evaluation at z + a/r against the evaluation of the data twisted
    coefficientwise by psi.  The character weight in the average is what
    the Gauss-sum expansion of psi(n) forces.
    """
    if not psi.is_primitive:
        raise ValueError("twisting character must be primitive")
    z = complex(z)
    r = psi.modulus
    psi_bar = psi.conjugate()
    tau_bar = arith.gauss_sum(psi_bar)
    pos, radial = _maass_components(data, z.imag, N)
    lhs = 0.0 + 0.0j
    for a in range(r):
        w = complex(psi_bar(a))
        if w == 0:
            continue
        za = z + a / r
        if len(pos):
            phase = np.exp(2j * np.pi * pos * za.real)
            rho_pos = np.array([data.coefficients[int(n)] for n in pos])
            rho_neg = np.array([data.coefficients[-int(n)] for n in pos])
            lhs += w * complex(np.sum(radial * (rho_pos * phase + rho_neg / phase)))
    lhs /= tau_bar
    rhs = maass_eval(data.twisted(psi), z, N)
    return float(abs(lhs - rhs))
