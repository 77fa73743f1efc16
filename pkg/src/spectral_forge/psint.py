"""The deformation pairing evaluated three independent ways.

For an even system every mode returns exactly zero: the parity branch is
taken before any summation.  For an odd system the three routes are

* ``ps_series``: closed gamma factor times the coefficient pairing
  series summed directly;
* ``ps_quadrature``: the same pairing but with the exponentially
  weighted K-Bessel moment evaluated by quadrature instead of its
  gamma closed form;
* ``ps_closed``: no pairing series at all; a product of ramified local
  corrections and a quotient of completed L-functions, with each
  L-value taken from its Euler product.

Agreement of the three at matching truncations is the quantitative
content this package exists to check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import hecke, lfunc
from ._accum import block_dot, block_sum
from ._sieve import shared_cache
from .forms import HolomorphicQExpansion
from .lfunc import DomainError, _power_weights
from .special import bessel_moment, bessel_moment_quadrature, log_gamma

__all__ = ["PSResult", "ps_series", "ps_quadrature", "ps_closed"]


@dataclass(frozen=True)
class PSResult:
    """One evaluation of the pairing, with its accuracy report."""

    value: complex
    mode: str
    s: complex
    parity: int
    terms_used: int = 0
    tail_bound: float = 0.0
    conditioning: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "s": [self.s.real, self.s.imag],
            "value": [self.value.real, self.value.imag],
            "parity": self.parity,
            "terms": self.terms_used,
            "tail_bound": self.tail_bound,
            "conditioning": {k: float(v) for k, v in self.conditioning.items()},
        }


def _pole_distance(z: complex) -> float:
    k = min(0.0, round(z.real))
    return abs(z - k)


def _gamma_conditioning(s: complex, s_phi: complex) -> dict:
    return {
        "gamma_pole_distance": min(
            _pole_distance(s + s_phi), _pole_distance(s - s_phi + 1), _pole_distance(s)
        )
    }


def _pairing_series(sys: hecke.HeckeEigenSystem, f: HolomorphicQExpansion, s: complex, N: int):
    """sum of b_n lambda(n) n^-(s + 1/2) over 1 <= n <= min(N, order of f)."""
    n_terms = min(N, f.order)
    if n_terms < 1:
        raise ValueError("the q-expansion provides no coefficients to pair")
    sigma = s + 0.5
    b = f.coefficients[: n_terms + 1]
    lam = hecke.coefficient_table(sys, n_terms, shared_cache(n_terms))
    w = _power_weights(n_terms, sigma)
    if np.iscomplexobj(w) or np.any(b.imag):
        value = complex(block_sum(w * b * lam))
    else:
        wb = w * b.real
        value = block_dot(wb, np.ascontiguousarray(lam.real), np.ascontiguousarray(lam.imag))
    # tail model: |b_n| <= C n (1 + log n) with C read off the computed range
    n = np.arange(1, n_terms + 1, dtype=np.float64)
    c = float(np.max(np.abs(b[1:]) / (n * (1.0 + np.log(n)))))
    theta = 0.0 if sys.tempered else max(0.0, sys.s_phi.real - 0.5)
    e = sigma.real - theta - 2.5
    if e <= 0:
        tail = math.inf
    else:
        tail = 2.0 * c * n_terms**-e * ((1.0 + math.log(n_terms)) / e + 1.0 / e**2)
    return complex(value), n_terms, tail


def ps_series(
    sys: hecke.HeckeEigenSystem,
    f: HolomorphicQExpansion,
    s: complex,
    N: int,
    scale: complex = 1.0,
) -> PSResult:
    """Closed gamma factor times the truncated pairing series.

    The prefactor is 2 / (2^2s pi^(s-1)) * G(s + s_phi) G(s - s_phi + 1)
    / G(s); an even system short-circuits to exactly zero.
    """
    s = complex(s)
    if sys.parity == 1:
        return PSResult(0.0 + 0.0j, "series", s, 1)
    if s.real <= 1.5:
        raise DomainError("pairing series needs Re s > 3/2")
    value, terms, tail = _pairing_series(sys, f, s, N)
    gamma_fac = np.exp(
        math.log(2.0)
        - 2 * s * math.log(2.0)
        - (s - 1) * math.log(math.pi)
        + log_gamma(s + sys.s_phi)
        + log_gamma(s - sys.s_phi + 1)
        - log_gamma(s)
    )
    out = complex(scale) * complex(gamma_fac) * value
    return PSResult(
        out, "series", s, -1, terms, abs(gamma_fac) * tail, _gamma_conditioning(s, sys.s_phi)
    )


def ps_quadrature(
    sys: hecke.HeckeEigenSystem,
    f: HolomorphicQExpansion,
    s: complex,
    N: int,
    scale: complex = 1.0,
    moment_step: float = 0.02,
) -> PSResult:
    """The pairing with the K-Bessel moment taken by direct quadrature.

    Assembles s / (2 pi)^(s - 1/2) times the quadrature moment times the
    series of b_n (rho(n) - rho(-n)) n^-(s + 1/2); the parity difference
    cancels termwise for an even system.
    """
    s = complex(s)
    if sys.parity == 1:
        return PSResult(0.0 + 0.0j, "quadrature", s, 1)
    if s.real <= 1.5:
        raise DomainError("pairing series needs Re s > 3/2")
    value, terms, tail = _pairing_series(sys, f, s, N)
    value = (1 - sys.parity) * value  # rho(n) - rho(-n) termwise
    moment = bessel_moment_quadrature(s, sys.s_phi, step=moment_step)
    front = s * complex(np.exp(-(s - 0.5) * math.log(2 * math.pi)))
    out = complex(scale) * front * moment * value
    cond = _gamma_conditioning(s, sys.s_phi)
    cond["moment_magnitude"] = abs(moment)
    return PSResult(out, "quadrature", s, -1, terms, 2 * abs(front * moment) * tail, cond)


def ps_closed(
    sys: hecke.HeckeEigenSystem,
    q1: int,
    q2: int,
    s: complex,
    N: int,
    P: int | None = None,
    scale: complex = 1.0,
) -> PSResult:
    """Ramified local corrections times a quotient of completed L-values.

    -24 (1 - lambda(q1) q1^-(s-1/2)) (1 - lambda(q2) q2^-(s+1/2))
    times Lambda(s-1/2) Lambda(s+1/2) / Lambda(2s, chi); requires
    q1 q2 to equal the level so the ramified coefficients multiply.
    """
    s = complex(s)
    if q1 < 2 or q2 < 2:
        raise ValueError("both level factors must be >= 2")
    if q1 * q2 != sys.level:
        raise ValueError(f"q1 q2 = {q1 * q2} must equal the level {sys.level}")
    if sys.parity == 1:
        return PSResult(0.0 + 0.0j, "closed", s, 1)
    if s.real <= 1.5:
        raise DomainError("needs Re s > 3/2 so the shifted L-value converges")
    lam1 = hecke.coefficient(sys, q1)
    lam2 = hecke.coefficient(sys, q2)
    pref = (1.0 - lam1 * q1 ** -(s - 0.5)) * (1.0 - lam2 * q2 ** -(s + 0.5))
    chi_n = max(4000, N // 100)
    log_quot = (
        lfunc.log_completed_l(sys, s - 0.5, N, P)
        + lfunc.log_completed_l(sys, s + 0.5, N, P)
        - lfunc.log_completed_dirichlet_l(sys.nebentypus, 2 * s, chi_n)
    )
    chi_val = lfunc.dirichlet_l(sys.nebentypus, 2 * s, chi_n).value
    if abs(chi_val) < 1e-10:
        raise DomainError("character L-value at 2s is numerically zero")
    out = complex(scale) * (-24.0) * pref * complex(np.exp(log_quot))
    cond = _gamma_conditioning(s, sys.s_phi)
    cond["chi_l_magnitude"] = abs(chi_val)
    cond["ramified_prefactor_magnitude"] = abs(pref)
    return PSResult(out, "closed", s, -1, 0, 0.0, cond)
