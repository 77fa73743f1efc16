"""Dirichlet series, Euler products, completed L-functions, and the
divisor-weighted factorization they satisfy.

Everything is evaluated strictly inside half-planes of absolute
convergence; there is no analytic continuation here.  Each evaluation
returns the truncated value together with a rigorous tail bound under a
declared coefficient-growth model (recorded in the result), so callers
can decide whether the truncation is good enough.  Three independent
routes exist for the divisor-weighted series: the direct sum, the
product of closed-form local factors, and the quotient of L-values; the
test suite plays them against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import arith, hecke
from ._accum import block_dot, block_sum
from ._sieve import shared_cache, sigma1_table
from .special import log_gamma

__all__ = [
    "SeriesEvaluation",
    "DomainError",
    "l_series",
    "euler_product",
    "completed_l",
    "log_completed_l",
    "dirichlet_l",
    "completed_dirichlet_l",
    "log_completed_dirichlet_l",
    "rankin_sigma_series",
    "rankin_local_factor",
    "rankin_local_product",
    "rankin_closed_form",
    "twist_nonvanishing_scan",
]


class DomainError(ValueError):
    """Evaluation requested outside a region where the value is defined."""


@dataclass(frozen=True)
class SeriesEvaluation:
    """A truncated series value with its certificate.

    ``tail_bound`` is a rigorous bound on |value - limit| under the
    growth model named in ``model``; it is infinite whenever the
    requested point lies outside the model's convergence region.
    """

    value: complex
    terms_used: int
    tail_bound: float
    model: str

    def to_json(self) -> dict:
        return {
            "value": [self.value.real, self.value.imag],
            "terms": self.terms_used,
            "tail_bound": self.tail_bound,
            "model": self.model,
        }


def _growth_exponent(sys: hecke.HeckeEigenSystem) -> float:
    """theta in the model |lambda(n)| <= d(n) n^theta."""
    return 0.0 if sys.tempered else max(0.0, sys.s_phi.real - 0.5)


def _lambda_tail(N: int, sigma: float, theta: float) -> float:
    """Bound on the tail of sum d(n) n^theta n^-sigma past N (d(n) <= 2 sqrt n)."""
    a = sigma - theta - 1.5
    if a <= 0:
        return math.inf
    return 2.0 * N**-a / a * (1.0 + a / N)


def _power_weights(N: int, s: complex) -> np.ndarray:
    """n^-s for n = 1..N (index 0 unused, set to 0)."""
    n = np.arange(N + 1, dtype=np.float64)
    n[0] = 1.0
    logs = np.log(n)
    if s.imag == 0.0:
        w = np.exp(-s.real * logs)
    else:
        w = np.exp(-complex(s) * logs)
    w[0] = 0.0
    return w


def l_series(sys: hecke.HeckeEigenSystem, s: complex, N: int) -> SeriesEvaluation:
    """Partial sum of the coefficient Dirichlet series up to N.

    Defined for any s, but the tail bound is infinite unless Re s exceeds
    the abscissa the growth model certifies.
    """
    s = complex(s)
    if N < 1:
        raise ValueError("need at least one term")
    theta = _growth_exponent(sys)
    lam = hecke.coefficient_table(sys, N)
    w = _power_weights(N, s)
    if np.iscomplexobj(w):
        value = block_sum(w * lam)
    else:
        value = block_dot(w, np.ascontiguousarray(lam.real), np.ascontiguousarray(lam.imag))
    model = f"|lambda(n)| <= d(n) n^{theta:g}" if theta else "|lambda(n)| <= d(n)"
    return SeriesEvaluation(complex(value), N, _lambda_tail(N, s.real, theta), model)


def euler_product(sys: hecke.HeckeEigenSystem, s: complex, P: int) -> SeriesEvaluation:
    """Product of local factors (1 - lambda(p) p^-s + chi(p) p^-2s)^-1 over p <= P.

    Accumulated in the log domain.  A vanishing local factor is a domain
    error; it cannot occur for tempered data with Re s > 1.
    """
    s = complex(s)
    if P < 0:
        raise ValueError("P must be >= 0")
    theta = _growth_exponent(sys)
    cache = shared_cache(max(P, 2))
    primes = cache.primes[cache.primes <= P]
    if len(primes) == 0:
        model = "empty product"
        return SeriesEvaluation(1.0 + 0.0j, 0, _euler_tail(max(P, 1), s.real, theta), model)
    lam_p = sys.seeds_at(primes)
    chi_p = sys.nebentypus(primes)
    x = np.exp(-s * np.log(primes.astype(np.float64)))
    local = 1.0 - lam_p * x + chi_p * x * x
    if np.any(np.abs(local) < 1e-14):
        bad = primes[np.abs(local) < 1e-14][0]
        raise DomainError(f"local factor vanishes at p = {bad}")
    value = complex(np.exp(-block_sum(np.log(local))))
    model = f"|lambda(p)| <= 2 p^{theta:g}" if theta else "|lambda(p)| <= 2"
    return SeriesEvaluation(value, len(primes), _euler_tail(P, s.real, theta), model)


def _euler_tail(P: int, sigma: float, theta: float) -> float:
    """Bound on |log of the omitted factors| for primes past P, propagated
    to a relative bound on the product (small-x regime)."""
    a = sigma - theta - 1.0
    if a <= 0 or sigma <= 0.5:
        return math.inf
    log_tail = 2.0 * P**-a / a + P ** (1.0 - 2 * sigma) / (2 * sigma - 1.0)
    return math.inf if log_tail > 0.5 else 2.0 * log_tail


def log_completed_l(
    sys: hecke.HeckeEigenSystem, s: complex, N: int, P: int | None = None
) -> complex:
    """log of the completed L-function: conductor power, two gamma
    factors with the parity shift, and the log of the L-value.

    The L-value itself comes from the truncated series, or from the
    Euler product over p <= P when P is given (the faster route when
    high accuracy is needed close to the convergence boundary).
    """
    s = complex(s)
    if s.real <= 1:
        raise DomainError("completed L-function needs Re s > 1 here")
    nu = sys.s_phi - 0.5
    shift = (1 - sys.parity) / 4.0
    ell = euler_product(sys, s, P).value if P is not None else l_series(sys, s, N).value
    if ell == 0:
        raise DomainError("L-value vanished; log undefined")
    return complex(
        s * np.log(math.sqrt(sys.level) / math.pi)
        + log_gamma((s + nu) / 2 + shift)
        + log_gamma((s - nu) / 2 + shift)
        + np.log(complex(ell))
    )


def completed_l(
    sys: hecke.HeckeEigenSystem, s: complex, N: int, P: int | None = None
) -> complex:
    """Gamma-completed L-value at s (absolute-convergence region only)."""
    return complex(np.exp(log_completed_l(sys, s, N, P)))


def dirichlet_l(chi: arith.DirichletCharacter, s: complex, N: int) -> SeriesEvaluation:
    """Truncated Dirichlet L-series of a character."""
    s = complex(s)
    if N < 1:
        raise ValueError("need at least one term")
    vals = chi(np.arange(N + 1))
    w = _power_weights(N, s)
    value = complex(block_sum(w * vals))
    sigma = s.real
    tail = N ** (1 - sigma) / (sigma - 1) if sigma > 1 else math.inf
    return SeriesEvaluation(value, N, tail, "|chi(n)| <= 1")


def log_completed_dirichlet_l(chi: arith.DirichletCharacter, s: complex, N: int) -> complex:
    """log of (q/pi)^(s/2) Gamma(s/2) L(s, chi) with q the character's
    own modulus, primitive or not: the ambient-level convention."""
    s = complex(s)
    if s.real <= 1:
        raise DomainError("needs Re s > 1")
    ell = dirichlet_l(chi, s, N).value
    if ell == 0:
        raise DomainError("L-value vanished; log undefined")
    return complex(
        (s / 2) * np.log(chi.modulus / math.pi) + log_gamma(s / 2) + np.log(complex(ell))
    )


def completed_dirichlet_l(chi: arith.DirichletCharacter, s: complex, N: int) -> complex:
    return complex(np.exp(log_completed_dirichlet_l(chi, s, N)))


def rankin_sigma_series(sys: hecke.HeckeEigenSystem, s: complex, N: int) -> SeriesEvaluation:
    """Partial sum of the divisor-weighted series sigma_1(n) lambda(n) n^-s."""
    s = complex(s)
    if N < 1:
        raise ValueError("need at least one term")
    theta = _growth_exponent(sys)
    cache = shared_cache(N)
    lam = hecke.coefficient_table(sys, N, cache)
    sig = sigma1_table(N, cache).astype(np.float64)
    w = _power_weights(N, s)
    weights = w * sig
    if np.iscomplexobj(weights):
        value = block_sum(weights * lam)
    else:
        value = block_dot(weights, np.ascontiguousarray(lam.real), np.ascontiguousarray(lam.imag))
    # |sigma_1(n) lambda(n)| <= n d(n) * d(n) n^theta <= 4 n^(2 + theta)
    a = s.real - theta - 3.0
    tail = 4.0 * N**-a / a * (1 + a / N) if a > 0 else math.inf
    return SeriesEvaluation(complex(value), N, tail, f"|sigma1 lambda| <= 4 n^{2+theta:g}")


def rankin_local_factor(sys: hecke.HeckeEigenSystem, p: int, s: complex) -> complex:
    """Closed form of one local factor of the divisor-weighted series.

    (1 - chi(p) p^(1-2s)) divided by the two quadratic local factors at
    shifts s-1 and s.
    """
    s = complex(s)
    lam = hecke.coefficient(sys, p)
    chi = complex(sys.nebentypus(p))
    x = p ** (-s) if s.imag == 0 else complex(np.exp(-s * math.log(p)))
    num = 1.0 - chi * p * x * x
    d1 = 1.0 - lam * p * x + chi * (p * x) ** 2
    d2 = 1.0 - lam * x + chi * x * x
    if min(abs(d1), abs(d2)) < 1e-14:
        raise DomainError(f"local denominator vanishes at p = {p}")
    return num / (d1 * d2)


def rankin_local_product(sys: hecke.HeckeEigenSystem, s: complex, P: int) -> complex:
    """Product of the closed local factors over p <= P."""
    cache = shared_cache(max(P, 2))
    primes = cache.primes[cache.primes <= P]
    acc = 0.0 + 0.0j
    for p in primes:
        acc += np.log(rankin_local_factor(sys, int(p), s))
    return complex(np.exp(acc))


def rankin_closed_form(
    sys: hecke.HeckeEigenSystem, s: complex, N: int, P: int | None = None
) -> complex:
    """L(s-1) L(s) / L(2s-1, chi), each piece in its convergence region."""
    s = complex(s)
    if s.real <= 2:
        raise DomainError("needs Re s > 2 so that L(s-1) converges")
    if P is not None:
        l_shift = euler_product(sys, s - 1, P).value
        l_plain = euler_product(sys, s, P).value
    else:
        l_shift = l_series(sys, s - 1, N).value
        l_plain = l_series(sys, s, N).value
    chi_n = max(1000, int(2 * N ** 0.5))
    l_chi = dirichlet_l(sys.nebentypus, 2 * s - 1, chi_n).value
    if abs(l_chi) < 1e-12:
        raise DomainError("character L-value too close to zero")
    return complex(l_shift * l_plain / l_chi)


def twist_nonvanishing_scan(
    sys: hecke.HeckeEigenSystem,
    s: complex,
    M: int,
    r_max: int,
    threshold: float,
    N: int = 20000,
) -> list[tuple[arith.DirichletCharacter, float]]:
    """Even primitive twists whose truncated L-value clears a threshold.

    Scans conductors r <= r_max coprime to M, twists the system, and
    keeps each character whose |L(s, twisted)| exceeds threshold plus the
    truncation tail.  An empty result is a legitimate outcome.
    """
    s = complex(s)
    if s.real <= 1:
        raise DomainError("scan needs Re s > 1")
    found = []
    for r in range(2, r_max + 1):
        if math.gcd(r, M) != 1:
            continue
        for psi in arith.enumerate_characters(r):
            if not (psi.is_primitive and psi.is_even):
                continue
            twisted = hecke.twist(sys, psi)
            ev = l_series(twisted, s, N)
            est = abs(ev.value)
            guard = ev.tail_bound if math.isfinite(ev.tail_bound) else 0.0
            if est > threshold + guard:
                found.append((psi, est))
    return found
