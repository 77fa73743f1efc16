"""Finite-dimensional sandbox for asymptotic spectral perturbation.

A family T + eps T1 + eps^2 T2 of self-adjoint matrices stands in for
the unbounded deformation this machinery is designed around; in finite
dimension the region of boundedness is simply the complement of the
spectrum, so stability reduces to contour separation.  The operations
here are the ones whose identities are checkable by plain linear
algebra: resolvents with their norm bound, contour eigenprojections,
reduced resolvents, and the first- and second-order expansion data of
eigenvalues under the family.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "OperatorFamily",
    "SpectralWindow",
    "SpectralPointError",
    "ContourError",
    "resolvent",
    "contour_projection",
    "reduced_resolvent",
    "expansion_check",
    "ExpansionReport",
    "resolvent_convergence",
    "random_family",
]


class SpectralPointError(ValueError):
    """The requested point sits on (or numerically on) the spectrum."""


class ContourError(RuntimeError):
    """The integration contour does not separate the spectrum."""


def _require_selfadjoint(m: np.ndarray, name: str, tol: float = 1e-14):
    m = np.asarray(m)
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.conj().T)) > tol * scale:
        raise ValueError(f"{name} is not self-adjoint to {tol:g} (entrywise)")
    return m.astype(np.complex128)


@dataclass
class OperatorFamily:
    """Self-adjoint triple; the member at eps is T + eps T1 + eps^2 T2."""

    T: np.ndarray
    T1: np.ndarray
    T2: np.ndarray

    def __post_init__(self):
        self.T = _require_selfadjoint(self.T, "T")
        self.T1 = _require_selfadjoint(self.T1, "T1")
        self.T2 = _require_selfadjoint(self.T2, "T2")
        if not (self.T.shape == self.T1.shape == self.T2.shape):
            raise ValueError("family members must share one dimension")
        if self.T.shape[0] != self.T.shape[1]:
            raise ValueError("matrices must be square")

    @property
    def dimension(self) -> int:
        return self.T.shape[0]

    def member(self, eps: float) -> np.ndarray:
        return self.T + eps * self.T1 + eps * eps * self.T2

    def to_json(self) -> dict:
        def flat(m):
            return [[v.real, v.imag] for v in np.asarray(m).ravel()]

        return {
            "dimension": self.dimension,
            "T": flat(self.T),
            "T1": flat(self.T1),
            "T2": flat(self.T2),
        }

    @staticmethod
    def from_json(rec: dict) -> "OperatorFamily":
        d = rec["dimension"]

        def unflat(entries):
            return np.array([complex(re, im) for re, im in entries]).reshape(d, d)

        return OperatorFamily(unflat(rec["T"]), unflat(rec["T1"]), unflat(rec["T2"]))


@dataclass(frozen=True)
class SpectralWindow:
    """Circle of the contour integral: center, radius, node count."""

    center: float
    radius: float
    points: int = 64

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.points < 8:
            raise ValueError("need at least 8 contour points")


def resolvent(m: np.ndarray, zeta: complex) -> np.ndarray:
    """(M - zeta)^-1 by a backward-stable solve."""
    m = np.asarray(m, dtype=np.complex128)
    d = m.shape[0]
    shifted = m - complex(zeta) * np.eye(d)
    if np.linalg.cond(shifted) > 1e13:
        raise SpectralPointError(f"zeta = {zeta} is numerically on the spectrum")
    return np.linalg.solve(shifted, np.eye(d, dtype=np.complex128))


def contour_projection(fam: OperatorFamily, eps: float, win: SpectralWindow) -> np.ndarray:
    """Eigenprojection from the contour integral of the resolvent.

    Trapezoid rule on the circle, node count doubled until the
    idempotency defect stabilizes below 1e-10; a persistent defect means
    the contour fails to separate the spectrum and raises.
    """
    m = fam.member(eps)
    n = win.points
    for _ in range(5):
        theta = 2.0 * np.pi * np.arange(n) / n
        zeta = win.center + win.radius * np.exp(1j * theta)
        proj = -(win.radius / n) * sum(
            resolvent(m, z) * np.exp(1j * t) for z, t in zip(zeta, theta)
        )
        defect = float(np.linalg.norm(proj @ proj - proj, 2))
        if defect <= 1e-10:
            return proj
        n *= 2
    raise ContourError(
        f"idempotency defect {defect:.3g} did not stabilize; "
        "the contour does not separate the spectrum"
    )


def reduced_resolvent(T: np.ndarray, lam: float, win: SpectralWindow) -> np.ndarray:
    """Pseudo-inverse of (T - lam) off the lam-eigenspace.

    Satisfies (T - lam) S = 1 - P and S P = 0 for the eigenprojection P
    of the cluster inside the window; the cluster must consist of lam
    alone (isolation is checked).
    """
    T = _require_selfadjoint(T, "T", tol=1e-12)
    evals, vecs = np.linalg.eigh(T)
    inside = np.abs(evals - lam) < win.radius
    if not inside.any():
        raise SpectralPointError(f"no eigenvalue inside the window around {lam}")
    scale = max(1.0, float(np.max(np.abs(evals))))
    if np.max(np.abs(evals[inside] - lam)) > 1e-8 * scale:
        raise SpectralPointError("window contains spectrum distinct from lam")
    g = np.where(inside, 0.0, 1.0 / (evals - lam))
    return (vecs * g) @ vecs.conj().T


@dataclass(frozen=True)
class ExpansionReport:
    """Numerical first/second-order expansion data at a stable eigenvalue."""

    center: float
    first_order: tuple[float, ...]
    residual_slope: float
    residuals: dict = field(default_factory=dict)
    identity_errors: dict = field(default_factory=dict)
    identity_slope: float = 0.0

    def to_json(self) -> dict:
        return {
            "center": self.center,
            "first_order": list(self.first_order),
            "residual_slope": self.residual_slope,
            "residuals": {f"{k:g}": v for k, v in self.residuals.items()},
            "identity_errors": {f"{k:g}": v for k, v in self.identity_errors.items()},
            "identity_slope": self.identity_slope,
        }


def expansion_check(fam: OperatorFamily, win: SpectralWindow, eps_grid) -> ExpansionReport:
    """Check the asymptotic eigenvalue and projection expansions.

    (a) the first-order shifts are the eigenvalues of T1 compressed to
    the window's eigenspace; (b) the residual of the eigenvalue expansion
    after removing the first-order term decays at least quadratically on
    a log-log fit over the grid; (c) the derivative of the projection,
    taken by Richardson-extrapolated central differences at each grid
    point, satisfies (T - lam) dP = -(1 - P)(T1 - mu1) P up to first
    order in eps.
    """
    eps_grid = sorted(float(e) for e in eps_grid)
    if not eps_grid or eps_grid[0] <= 0:
        raise ValueError("eps grid must be positive")
    lam = win.center
    T, T1 = fam.T, fam.T1
    evals = np.linalg.eigvalsh(T)
    cluster = np.abs(evals - lam) < win.radius
    gap_candidates = np.abs(evals[~cluster] - lam)
    gap = float(gap_candidates.min()) if len(gap_candidates) else np.inf
    t1_norm = float(np.linalg.norm(T1, 2))
    if t1_norm > 0 and eps_grid[-1] > gap / (4.0 * t1_norm):
        raise ValueError(
            f"eps grid exceeds the stability margin gap/(4 |T1|) = {gap / (4 * t1_norm):.3g}"
        )

    P = contour_projection(fam, 0.0, win)
    m = int(round(float(np.trace(P).real)))
    u, _, _ = np.linalg.svd(P)
    basis = u[:, :m]
    compressed = basis.conj().T @ T1 @ basis
    mu1 = np.sort(np.linalg.eigvalsh((compressed + compressed.conj().T) / 2))

    residuals = {}
    for eps in eps_grid:
        pe = np.sort(np.linalg.eigvalsh(fam.member(eps)))
        idx = np.argsort(np.abs(pe - lam))[:m]
        cluster_vals = np.sort(pe[idx])
        residuals[eps] = float(np.max(np.abs(cluster_vals - (lam + eps * mu1))))

    xs = np.log(np.array(eps_grid))
    ys = np.log(np.maximum(np.array([residuals[e] for e in eps_grid]), 1e-300))
    slope = float(np.polyfit(xs, ys, 1)[0]) if len(eps_grid) >= 2 else np.nan

    # first-order projection identity along the grid
    mu1_scalar = float(np.mean(mu1)) if m else 0.0
    one = np.eye(fam.dimension)
    rhs = -(one - P) @ (T1 - mu1_scalar * one) @ P
    identity_errors = {}
    for eps in eps_grid:
        h = eps / 8.0
        d1 = (contour_projection(fam, eps + h, win) - contour_projection(fam, eps - h, win)) / (2 * h)
        d2 = (
            contour_projection(fam, eps + h / 2, win)
            - contour_projection(fam, eps - h / 2, win)
        ) / h
        dp = (4.0 * d2 - d1) / 3.0
        identity_errors[eps] = float(np.linalg.norm((T - lam * one) @ dp - rhs, 2))
    ys2 = np.log(np.maximum(np.array([identity_errors[e] for e in eps_grid]), 1e-300))
    id_slope = float(np.polyfit(xs, ys2, 1)[0]) if len(eps_grid) >= 2 else np.nan

    return ExpansionReport(
        center=lam,
        first_order=tuple(float(x) for x in mu1),
        residual_slope=slope,
        residuals=residuals,
        identity_errors=identity_errors,
        identity_slope=id_slope,
    )


def resolvent_convergence(fam: OperatorFamily, zeta: complex, eps_grid) -> list[float]:
    """Norms of R_eps(zeta) - R_0(zeta) along a decreasing eps grid."""
    base = resolvent(fam.T, zeta)
    return [
        float(np.linalg.norm(resolvent(fam.member(e), zeta) - base, 2)) for e in eps_grid
    ]


def random_family(
    rng: np.random.Generator, dimension: int, *, gap: float = 1.0, degenerate: bool = False
) -> tuple[OperatorFamily, SpectralWindow]:
    """A random self-adjoint family with an isolated low eigenvalue.

    The base operator has one eigenvalue at 0 (double when ``degenerate``)
    and the rest spread beyond ``gap``; perturbations are dense random
    Hermitian matrices of unit scale.
    """
    d = dimension
    k = 2 if degenerate else 1
    rest = gap + np.abs(rng.normal(1.0, 0.5, size=d - k)) * gap
    diag = np.concatenate([np.zeros(k), np.cumsum(rest)])

    def haar(rng, d):
        z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        q, r = np.linalg.qr(z)
        return q * (np.diagonal(r) / np.abs(np.diagonal(r)))

    u = haar(rng, d)
    T = u @ np.diag(diag) @ u.conj().T
    T = (T + T.conj().T) / 2

    def herm(rng, d):
        z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        return (z + z.conj().T) / 2

    fam = OperatorFamily(T, herm(rng, d), herm(rng, d))
    win = SpectralWindow(center=0.0, radius=min(0.45 * gap, 0.5))
    return fam, win
