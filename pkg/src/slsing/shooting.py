"""Boundary-value shots for -y'' + p(x) y = omega^2 y, y(0)=0, y'(0)=1.

Two independent routes:

* :func:`shoot` integrates the initial-value problem with a fixed-step
  explicit Runge-Kutta scheme of order 8, splitting exactly at every jump
  location (the right-hand side is polynomial between breakpoints, so the
  one-step method keeps its full order).  Batches of frequencies are
  integrated in lockstep.
* :func:`transfer_matrix_shoot` propagates the exact 2x2 fundamental matrix
  across the pieces of a piecewise-constant potential; it serves as a
  closed-form oracle for the integrator.

The scaled phase of :func:`pruefer_angle` (y = r sin(theta), y' = omega r
cos(theta)) counts Dirichlet eigenvalues: theta(pi; omega) crosses multiples
of pi exactly at eigenvalues, upward.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, OverflowBudgetError, ValidationError
from .potential import PI, SingularPotential, is_piecewise_constant, \
    constant_segments, segment_polynomials

__all__ = [
    "SolverConfig",
    "ShotResult",
    "DEFAULT_CONFIG",
    "shoot",
    "shoot_many",
    "transfer_matrix_shoot",
    "transfer_matrix_many",
    "pruefer_angle",
    "pruefer_angle_many",
]

# Propagation tableau of the Dormand-Prince 8(5,3) pair; only the 8th-order
# weights are used (fixed steps, no embedded error estimate).
try:
    from scipy.integrate._ivp import dop853_coefficients as _dop

    _STAGES = _dop.N_STAGES
    _A = np.array(_dop.A[:_STAGES, :_STAGES])
    _B = np.array(_dop.B)
    _C = np.array(_dop.C[:_STAGES])
    _ORDER = 8
except ImportError:  # pragma: no cover - classical RK4 fallback
    _STAGES = 4
    _A = np.zeros((4, 4))
    _A[1, 0] = 0.5
    _A[2, 1] = 0.5
    _A[3, 2] = 1.0
    _B = np.array([1.0, 2.0, 2.0, 1.0]) / 6.0
    _C = np.array([0.0, 0.5, 0.5, 1.0])
    _ORDER = 4


@dataclass(frozen=True)
class SolverConfig:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_step: float = 0.05
    exp_budget: float = 700.0  # cap on |Im omega| * pi

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "exp_budget"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"solver config field {name} must be positive")

    def phase_per_step(self) -> float:
        # local error ~ (k h)^(order+1)/(order+1)!; solve for the phase k*h
        # that meets rel_tol, with a safety margin.
        target = self.rel_tol * math.factorial(_ORDER + 1) * 0.01
        return min(0.5, max(0.02, target ** (1.0 / (_ORDER + 1))))


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True)
class ShotResult:
    omega: complex
    y_end: complex
    dy_end: complex
    y_omega_derivative: complex | None = None


def _check_budget(omegas, cfg):
    im_max = float(np.max(np.abs(np.imag(omegas)))) if np.size(omegas) else 0.0
    if im_max * PI > cfg.exp_budget:
        raise OverflowBudgetError(
            f"|Im omega|*pi = {im_max * PI:.1f} exceeds the exponent budget "
            f"{cfg.exp_budget:.0f}")
    if not np.all(np.isfinite(omegas)):
        raise DomainError("omega must be finite")


def _rk_fixed(rhs, x0, x1, y, n_steps):
    """March y' = rhs(x, y) from x0 to x1 in n_steps equal RK stages.

    y has shape (dim, K); rhs must return the same shape.
    """
    h = (x1 - x0) / n_steps
    k_stages = np.empty((_STAGES,) + y.shape, dtype=y.dtype)
    for i in range(n_steps):
        x = x0 + i * h
        k_stages[0] = rhs(x, y)
        for s in range(1, _STAGES):
            ys = y + h * np.tensordot(_A[s, :s], k_stages[:s], axes=1)
            k_stages[s] = rhs(x + _C[s] * h, ys)
        y = y + h * np.tensordot(_B, k_stages, axes=1)
    return y


def _segment_steps(p, omegas, cfg, phase_scale=1.0):
    """Per-segment step counts resolving the local oscillation k = sqrt(|om^2 - p|)."""
    segs = segment_polynomials(p)
    om_max = float(np.max(np.abs(omegas)))
    plan = []
    for a, b, coeffs in segs:
        grid = np.linspace(a, b, 8)
        pmax = float(np.max(np.abs(np.polynomial.polynomial.polyval(grid, coeffs))))
        k = math.sqrt(om_max ** 2 + pmax) + 1.0
        h_target = phase_scale * cfg.phase_per_step() / k
        n = max(8, int(math.ceil((b - a) / min(h_target, cfg.max_step))))
        plan.append((a, b, coeffs, n))
    return plan


def shoot_many(p: SingularPotential, omegas, cfg: SolverConfig = DEFAULT_CONFIG,
               with_omega_derivative: bool = False):
    """Vectorized shot: returns (y_end, dy_end, y_omega_derivative or None) arrays."""
    omegas = np.atleast_1d(np.asarray(omegas))
    _check_budget(omegas, cfg)
    complex_input = np.iscomplexobj(omegas) and np.any(np.imag(omegas) != 0.0)
    dtype = complex if complex_input else float
    om2 = (omegas.astype(complex) ** 2) if complex_input else np.real(omegas) ** 2
    k_lanes = omegas.shape[0]

    dim = 4 if with_omega_derivative else 2
    y = np.zeros((dim, k_lanes), dtype=dtype)
    y[1] = 1.0
    two_om = 2.0 * (omegas.astype(complex) if complex_input else np.real(omegas))

    for a, b, coeffs, n in _segment_steps(p, omegas, cfg):
        if with_omega_derivative:
            def rhs(x, u, _c=coeffs):
                q = np.polynomial.polynomial.polyval(x, _c) - om2
                return np.stack((u[1], q * u[0], u[3], q * u[2] - two_om * u[0]))
        else:
            def rhs(x, u, _c=coeffs):
                q = np.polynomial.polynomial.polyval(x, _c) - om2
                return np.stack((u[1], q * u[0]))
        y = _rk_fixed(rhs, a, b, y, n)

    deriv = y[2] if with_omega_derivative else None
    return y[0], y[1], deriv


def shoot(p: SingularPotential, omega, cfg: SolverConfig = DEFAULT_CONFIG,
          with_omega_derivative: bool = False) -> ShotResult:
    """Boundary data (y(pi), y'(pi)) for one frequency; see :func:`shoot_many`."""
    y0, y1, dw = shoot_many(p, [omega], cfg, with_omega_derivative)
    return ShotResult(omega=complex(omega), y_end=complex(y0[0]),
                      dy_end=complex(y1[0]),
                      y_omega_derivative=None if dw is None else complex(dw[0]))


# ---------------------------------------------------------------------------
# exact transfer-matrix propagation for piecewise-constant potentials

def transfer_matrix_many(p: SingularPotential, omegas, with_omega_derivative=False):
    """Exact boundary data over an omega array for piecewise-constant p.

    Per piece of constant value v the fundamental matrix is
    [[cos(kh), sin(kh)/k], [-k sin(kh), cos(kh)]] with k = sqrt(omega^2 - v);
    the k -> 0 limit [[1, h], [0, 1]] is reached through sin(kh)/k = h sinc.
    Entries are even in k, so the branch of the square root is immaterial.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=complex))
    pieces = constant_segments(p)
    y = np.zeros_like(omegas)
    dy = np.ones_like(omegas)
    if with_omega_derivative:
        # derivative of the whole product via the product rule, accumulated
        # alongside: d/domega [M_n ... M_1] acting on (0, 1)^T
        wy = np.zeros_like(omegas)
        wdy = np.zeros_like(omegas)
    for a, b, v in pieces:
        h = b - a
        k2 = omegas ** 2 - v
        k = np.sqrt(k2)
        kh = k * h
        c = np.cos(kh)
        s_over_k = h * np.sinc(kh / np.pi)        # sin(kh)/k, exact at k = 0
        ms = -k2 * s_over_k                       # -k sin(kh)
        if with_omega_derivative:
            # dM/domega = dM/d(k^2) * 2 omega, with
            # d cos(kh)/d(k2) = -h sin(kh)/(2k) ; d (sin(kh)/k)/d(k2) =
            #   (h cos(kh) - sin(kh)/k)/(2 k2)  -> series-safe via limits
            sin_kh = k * s_over_k
            dc = -0.5 * h * s_over_k
            small = np.abs(kh) < 1e-4
            with np.errstate(divide="ignore", invalid="ignore"):
                dsk = (h * c - s_over_k) / (2.0 * k2)
            # series: sin(kh)/k = h - k2 h^3/6 + k2^2 h^5/120 -> d/dk2
            dsk_series = -h ** 3 / 6.0 + k2 * h ** 5 / 60.0
            dsk = np.where(small, dsk_series, dsk)
            dms = -s_over_k - k2 * dsk
            two_om = 2.0 * omegas
            wy_new = c * wy + s_over_k * wdy + two_om * (dc * y + dsk * dy)
            wdy_new = ms * wy + c * wdy + two_om * (dms * y + dc * dy)
            wy, wdy = wy_new, wdy_new
        y, dy = c * y + s_over_k * dy, ms * y + c * dy
    if with_omega_derivative:
        return y, dy, wy
    return y, dy, None


def transfer_matrix_shoot(p: SingularPotential, omega,
                          with_omega_derivative=False) -> ShotResult:
    y, dy, w = transfer_matrix_many(p, [omega], with_omega_derivative)
    return ShotResult(omega=complex(omega), y_end=complex(y[0]),
                      dy_end=complex(dy[0]),
                      y_omega_derivative=None if w is None else complex(w[0]))


# ---------------------------------------------------------------------------
# scaled Pruefer phase

def pruefer_angle_many(p: SingularPotential, omegas,
                       cfg: SolverConfig = DEFAULT_CONFIG):
    """theta(pi; omega) for an array of positive real omegas.

    Integrates theta' = omega - (p(x)/omega) sin^2(theta), theta(0) = 0: the
    phase of (y, y'/omega).  Crossings of multiples of pi happen exactly at
    zeros of y and are transversal upward (theta' = omega there), so the phase
    is continuous by construction, with no atan2 unwrapping.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    if np.any(omegas <= 0.0):
        raise DomainError("Pruefer phase requires real omega > 0")
    theta = np.zeros_like(omegas)
    om_min = float(np.min(omegas))
    # phase accuracy only needs to resolve pi-crossings by a wide margin; the
    # stiffness scale is max(omega, |p|/omega)
    segs = segment_polynomials(p)
    for a, b, coeffs in segs:
        grid = np.linspace(a, b, 8)
        pmax = float(np.max(np.abs(np.polynomial.polynomial.polyval(grid, coeffs))))
        rate = max(float(np.max(omegas)), pmax / om_min) + 1.0
        n = max(12, int(math.ceil((b - a) * rate / 0.4)))

        def rhs(x, th, _c=coeffs):
            q = np.polynomial.polynomial.polyval(x, _c)
            return omegas - (q / omegas) * np.sin(th) ** 2

        theta = _rk_fixed(rhs, a, b, theta[None, :], n)[0]
    return theta


def pruefer_angle(p: SingularPotential, omega: float,
                  cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    return float(pruefer_angle_many(p, [omega], cfg)[0])
