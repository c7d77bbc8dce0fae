"""Dirichlet spectrum: the positive real zeros z_n of y(pi; omega).

Indexing is certified through the scaled Pruefer phase: theta(pi; omega)
crosses k*pi exactly at the k-th phase crossing, so the n-th positive zero
satisfies theta(pi; z_n) = (n + offset)*pi, where ``offset`` counts spectrum
below the positive-omega floor (nonzero only when the operator has a
nonpositive eigenvalue; those are reported, not indexed).

Two independent routes are kept deliberately separate:

* :func:`spectrum` - integrator-based (Pruefer bracketing + Newton polish on
  the shot value, using the variational omega-derivative);
* :func:`oracle_spectrum` - closed-form transfer-matrix characteristic
  function, sign-change scan + bisection; only for piecewise-constant
  potentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (BoundaryCollisionError, ConvergenceError, DomainError,
                     UnsupportedPotentialError)
from .potential import PI, SingularPotential, integral, potential_hash
from .shooting import (DEFAULT_CONFIG, SolverConfig, pruefer_angle_many,
                       shoot_many, transfer_matrix_many)

__all__ = [
    "EigenvalueEntry",
    "Spectrum",
    "count_below",
    "nth_eigenvalue",
    "spectrum",
    "oracle_spectrum",
    "spectrum_to_csv",
]

OMEGA_FLOOR = 0.05          # probe frequency standing in for omega -> 0+
PHASE_TOL = 1e-6            # boundary-collision tolerance on theta/pi
NEWTON_CAP = 25
SIMPLICITY_FLOOR = 1e-4     # |dy/domega| >= floor * pi / z_n at every zero


@dataclass(frozen=True)
class EigenvalueEntry:
    n: int
    z: float
    residual: float
    dy_domega: float


@dataclass(frozen=True)
class Spectrum:
    potential_hash: str
    eigenvalues: tuple            # EigenvalueEntry, strictly increasing in n
    index_offset: int = 0         # count of unindexed nonpositive-lambda modes

    def __post_init__(self):
        ns = [e.n for e in self.eigenvalues]
        zs = [e.z for e in self.eigenvalues]
        if ns != list(range(1, len(ns) + 1)):
            raise ValueError("eigenvalue indices must be 1..N without gaps")
        if any(b <= a for a, b in zip(zs[:-1], zs[1:])):
            raise ValueError("eigenvalues must be strictly increasing")
        for e in self.eigenvalues:
            if abs(e.dy_domega) < SIMPLICITY_FLOOR * PI / max(e.z, 1.0):
                raise ValueError(
                    f"zero z_{e.n} fails the simplicity floor "
                    f"(|dy/domega| = {abs(e.dy_domega):.3e})")

    @property
    def n_max(self) -> int:
        return len(self.eigenvalues)

    def z_values(self) -> np.ndarray:
        return np.array([e.z for e in self.eigenvalues])


@lru_cache(maxsize=256)
def _phase_offset(p: SingularPotential, cfg: SolverConfig) -> int:
    """floor(theta(pi; 0+)/pi): modes below the positive-frequency window."""
    th = float(pruefer_angle_many(p, [OMEGA_FLOOR], cfg)[0])
    return int(math.floor(th / PI))


def count_below(p: SingularPotential, omega_max: float,
                cfg: SolverConfig = DEFAULT_CONFIG) -> int:
    """Number of positive Dirichlet eigenvalues in (0, omega_max)."""
    if omega_max <= 0.0:
        raise DomainError("counting threshold must be positive")
    th = float(pruefer_angle_many(p, [omega_max], cfg)[0])
    if abs(th / PI - round(th / PI)) < PHASE_TOL:
        raise BoundaryCollisionError(
            f"omega_max = {omega_max} sits on an eigenvalue "
            f"(theta/pi = {th / PI:.9f}); nudge the threshold")
    return int(math.floor(th / PI)) - _phase_offset(p, cfg)


def _polish_newton(p, z0, lo, hi, cfg):
    """Newton on y(pi; omega) from z0, confined to [lo, hi] with bisection
    fallback; returns (z, residual, dy)."""
    z = float(z0)
    for _ in range(NEWTON_CAP):
        y, _, dy = shoot_many(p, [z], cfg, with_omega_derivative=True)
        yv, dyv = float(np.real(y[0])), float(np.real(dy[0]))
        if dyv == 0.0:
            break
        step = yv / dyv
        z_new = z - step
        if not lo < z_new < hi:
            z_new = 0.5 * (lo + hi)
        if abs(z_new - z) <= 1e-13 * max(1.0, abs(z)):
            z = z_new
            break
        z = z_new
    y, _, dy = shoot_many(p, [z], cfg, with_omega_derivative=True)
    return z, abs(float(np.real(y[0]))), float(np.real(dy[0]))


def nth_eigenvalue(p: SingularPotential, n: int,
                   cfg: SolverConfig = DEFAULT_CONFIG):
    """(z_n, residual): bracket through the Pruefer phase, polish by Newton."""
    if n < 1:
        raise DomainError("eigenvalue index must be >= 1")
    entry = _solve_indices(p, [n], cfg)[0]
    return entry.z, entry.residual


def _solve_indices(p, indices, cfg):
    """Solve a batch of eigenvalue indices in lockstep; returns entries."""
    indices = list(indices)
    offset = _phase_offset(p, cfg)
    targets = (np.array(indices, dtype=float) + offset) * PI
    shift = integral(p, 0.0, PI) / (2.0 * PI)
    guesses = np.array(indices, dtype=float) + offset  # track the phase index
    guesses = np.maximum(guesses + shift / np.maximum(guesses, 1.0), OMEGA_FLOOR * 2)

    # establish brackets [lo, hi] with theta(lo) < target < theta(hi)
    lo = np.maximum(guesses - 0.75, OMEGA_FLOOR)
    hi = guesses + 0.75
    for attempt in range(60):
        th_lo = pruefer_angle_many(p, lo, cfg)
        bad = th_lo >= targets
        if not bad.any():
            break
        if np.any(bad & (lo <= OMEGA_FLOOR + 1e-12)):
            raise UnsupportedPotentialError(
                "requested index collides with spectrum at or below the "
                "positive-frequency floor")
        lo = np.where(bad, np.maximum(lo - (0.5 + 0.5 * attempt), OMEGA_FLOOR), lo)
    else:
        raise ConvergenceError("could not establish a lower bracket")
    for attempt in range(60):
        th_hi = pruefer_angle_many(p, hi, cfg)
        bad = th_hi <= targets
        if not bad.any():
            break
        hi = np.where(bad, hi + (0.5 + 0.5 * attempt), hi)
    else:
        raise ConvergenceError("could not establish an upper bracket")

    # bisect the phase down to a narrow bracket
    for _ in range(24):
        mid = 0.5 * (lo + hi)
        th = pruefer_angle_many(p, mid, cfg)
        below = th < targets
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if float(np.max(hi - lo)) < 2e-3:
            break

    entries = []
    for idx, n in enumerate(indices):
        z, res, dy = _polish_newton(p, 0.5 * (lo[idx] + hi[idx]),
                                    lo[idx] - 0.1, hi[idx] + 0.1, cfg)
        tol = 1e-10 * max(1.0, abs(dy))
        if res > tol:
            raise ConvergenceError(
                f"Newton residual {res:.3e} for z_{n} exceeds {tol:.3e}")
        entries.append(EigenvalueEntry(n=n, z=z, residual=res, dy_domega=dy))
    return entries


def spectrum(p: SingularPotential, n_max: int,
             cfg: SolverConfig = DEFAULT_CONFIG) -> Spectrum:
    """First n_max positive zeros with an independent count consistency check."""
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    entries = _solve_indices(p, range(1, n_max + 1), cfg)
    zs = [e.z for e in entries]
    gap = zs[-1] - zs[-2] if n_max >= 2 else 1.0
    n_check = count_below(p, zs[-1] + 0.5 * gap, cfg)
    if n_check != n_max:
        raise ConvergenceError(
            f"count consistency failed: counted {n_check} zeros below "
            f"z_N + gap/2, expected {n_max}")
    return Spectrum(potential_hash=potential_hash(p),
                    eigenvalues=tuple(entries),
                    index_offset=_phase_offset(p, cfg))


# ---------------------------------------------------------------------------
# transfer-matrix oracle route (piecewise-constant potentials only)

def oracle_spectrum(p: SingularPotential, n_max: int,
                    scan_step: float = 0.01) -> Spectrum:
    """Positive zeros of the closed-form characteristic function.

    Dense sign-change scan followed by bisection; fully independent of the
    integrator and of the Pruefer phase.
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    # z_n ~ n + O(1); scan generously past n_max and truncate
    upper = n_max + 4.0 + abs(integral(p, 0.0, PI)) / PI
    grid = np.arange(OMEGA_FLOOR, upper, scan_step)
    g = np.real(transfer_matrix_many(p, grid)[0])
    sgn = np.sign(g)
    sgn[sgn == 0] = 1.0
    flips = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
    lo, hi = grid[flips].copy(), grid[flips + 1].copy()
    g_lo = g[flips].copy()
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        gm = np.real(transfer_matrix_many(p, mid)[0])
        move_hi = g_lo * gm <= 0
        hi = np.where(move_hi, mid, hi)
        lo = np.where(move_hi, lo, mid)
        g_lo = np.where(move_hi, g_lo, gm)
    roots = 0.5 * (lo + hi)
    if len(roots) < n_max:
        raise ConvergenceError(
            f"oracle scan found only {len(roots)} zeros below {upper:.1f}")
    roots = roots[:n_max]
    y, _, dy = transfer_matrix_many(p, roots, with_omega_derivative=True)
    entries = tuple(EigenvalueEntry(n=i + 1, z=float(roots[i]),
                                    residual=abs(float(np.real(y[i]))),
                                    dy_domega=float(np.real(dy[i])))
                    for i in range(n_max))
    return Spectrum(potential_hash=potential_hash(p), eigenvalues=entries)


def spectrum_to_csv(spec: Spectrum, path, tool_version: str = "0") -> None:
    """CSV with '#' metadata comments; 17 significant digits."""
    with open(path, "w") as fh:
        fh.write(f"# potential={spec.potential_hash} tool=slsing {tool_version}\n")
        fh.write(f"# index_offset={spec.index_offset}\n")
        fh.write("n,z_n,residual,z_minus_n\n")
        for e in spec.eigenvalues:
            fh.write(f"{e.n},{e.z:.17g},{e.residual:.17g},{e.z - e.n:.17g}\n")
