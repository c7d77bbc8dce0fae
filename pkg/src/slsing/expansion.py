"""Large-frequency expansion of y(pi; omega) and its exponential-sum form.

The truncated expansion keeps, at odd order ``order``:

    sin(om*pi)/om
    + sum_{m=1}^{(order-1)/2}  2 (-1)^m     [2om]^{-2m}   cos(om*pi) * C[m-1]
    + sum_{m=1}^{(order-1)/2}  2 (-1)^{m+1} [2om]^{-2m-1} sin(om*pi) * S[m-1]
    + sum_{m=0}^{(order-1)/2-1} over order-2m jumps (x, c):
          2 (-1)^m     [2om]^{-2m-3} c sin(om*(pi - 2x))
    + sum_{m=0}^{(order-1)/2-1} over order-(2m+1) jumps (x, c):
          2 (-1)^{m+1} [2om]^{-2m-4} c cos(om*(pi - 2x))

with C, S the boundary coefficient blocks of
:func:`slsing.potential.spectral_coefficients` (C[0] is the integral of p,
appearing once, inside the m=1 cosine term).  The dropped remainder is
O(omega^{-order}) on the real axis.

Rotating omega -> z/i and multiplying by z turns every trigonometric factor
into real-frequency exponentials: the model

    Y(z) = z * y(pi; z/i) ~ sum_j A_j z^{d_j} e^{theta_j z}

with frequencies {+-pi} u {+-(pi - 2 x_j)}.  :func:`to_exp_sum` builds that
sum with amplitudes collected per (degree, frequency).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RegimeError, ValidationError
from .potential import PI, SingularPotential, spectral_coefficients

__all__ = ["ExpSum", "eval_expansion", "eval_expansion_many", "to_exp_sum",
           "eval_exp_sum"]


def _blocks(p: SingularPotential, order: int):
    if order % 2 == 0 or order < 1:
        raise DomainError(f"expansion order must be odd and >= 1, got {order}")
    if order > p.smoothness_order:
        raise DomainError(
            f"expansion order {order} exceeds potential smoothness M={p.smoothness_order}")
    half = (order - 1) // 2
    sc = spectral_coefficients(p)
    even_terms = [(t.order // 2, t.location, t.coefficient)
                  for t in p.terms if t.order % 2 == 0 and t.order // 2 <= half - 1]
    odd_terms = [((t.order - 1) // 2, t.location, t.coefficient)
                 for t in p.terms if t.order % 2 == 1 and (t.order - 1) // 2 <= half - 1]
    return half, sc, even_terms, odd_terms


def eval_expansion_many(p: SingularPotential, omegas, order: int):
    """Truncated expansion over an array of frequencies (|omega| >= 1)."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=complex))
    if np.any(np.abs(omegas) < 1.0):
        raise RegimeError("expansion requires |omega| >= 1")
    half, sc, even_terms, odd_terms = _blocks(p, order)
    sin_pi = np.sin(omegas * PI)
    cos_pi = np.cos(omegas * PI)
    total = sin_pi / omegas
    two_om = 2.0 * omegas
    for m in range(1, half + 1):
        total = total + 2.0 * (-1) ** m * two_om ** (-2 * m) * cos_pi * sc.cos_block[m - 1]
        total = total + 2.0 * (-1) ** (m + 1) * two_om ** (-2 * m - 1) * sin_pi * sc.sin_block[m - 1]
    for m, x, c in even_terms:
        total = total + 2.0 * (-1) ** m * two_om ** (-2 * m - 3) * c * np.sin(omegas * (PI - 2 * x))
    for m, x, c in odd_terms:
        total = total + 2.0 * (-1) ** (m + 1) * two_om ** (-2 * m - 4) * c * np.cos(omegas * (PI - 2 * x))
    return total


def eval_expansion(p: SingularPotential, omega, order: int) -> complex:
    return complex(eval_expansion_many(p, [omega], order)[0])


@dataclass(frozen=True)
class ExpSum:
    """Finite sum  sum_j  A_j z^{d_j} e^{theta_j z}.

    ``terms`` holds (amplitude, degree, frequency) records; (degree,
    frequency) pairs are distinct, amplitudes nonzero, and a frequency may
    carry several degrees (its 1/z amplitude polynomial).
    """

    terms: tuple

    def __post_init__(self):
        cleaned = tuple((complex(a), int(d), float(th)) for a, d, th in self.terms)
        if any(a == 0 for a, _, _ in cleaned):
            raise ValidationError("exponential-sum amplitudes must be nonzero")
        keys = [(d, th) for _, d, th in cleaned]
        if len(set(keys)) != len(keys):
            raise ValidationError("(degree, frequency) pairs must be distinct")
        cleaned = tuple(sorted(cleaned, key=lambda t: (t[2], -t[1])))
        object.__setattr__(self, "terms", cleaned)

    def frequencies(self) -> tuple:
        """Distinct frequencies, ascending."""
        return tuple(sorted({th for _, _, th in self.terms}))

    def leading(self, frequency: float):
        """(amplitude, degree) of the highest-degree term at ``frequency``."""
        cands = [(d, a) for a, d, th in self.terms if abs(th - frequency) < 1e-12]
        if not cands:
            raise DomainError(f"no term at frequency {frequency}")
        d, a = max(cands)
        return a, d

    def subsum(self, freq_lo: float, freq_hi: float) -> "ExpSum":
        """The two-frequency partial sum attached to one frequency gap."""
        picked = tuple(t for t in self.terms
                       if abs(t[2] - freq_lo) < 1e-12 or abs(t[2] - freq_hi) < 1e-12)
        if not picked:
            raise DomainError("no terms at the requested frequencies")
        return ExpSum(picked)

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(z == 0) and any(d < 0 for _, d, _ in self.terms):
            raise DomainError("sum with negative degrees is singular at z = 0")
        out = np.zeros_like(z)
        for a, d, th in self.terms:
            out = out + a * z ** d * np.exp(th * z)
        return out

    def eval_derivative(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for a, d, th in self.terms:
            out = out + a * z ** d * np.exp(th * z) * (th + d / z)
        return out

    def term_magnitude(self, z):
        """max_j |A_j z^{d_j} e^{theta_j z}|: the local scale of the sum."""
        z = np.asarray(z, dtype=complex)
        mags = [np.abs(a) * np.abs(z) ** d * np.exp(th * np.real(z))
                for a, d, th in self.terms]
        return np.max(mags, axis=0)

    def to_json(self, path) -> None:
        records = [[a.real, a.imag, d, th] for a, d, th in self.terms]
        with open(path, "w") as fh:
            json.dump({"terms": records}, fh, indent=1)
            fh.write("\n")

    @classmethod
    def from_json(cls, path) -> "ExpSum":
        with open(path) as fh:
            data = json.load(fh)
        return cls(tuple((complex(re, im), int(d), float(th))
                         for re, im, d, th in data["terms"]))


def eval_exp_sum(s: ExpSum, z):
    """sum_j A_j z^{d_j} e^{theta_j z} (singular at z = 0 if any d_j < 0)."""
    out = s.eval(z)
    return complex(out) if np.isscalar(z) or np.ndim(z) == 0 else out


def to_exp_sum(p: SingularPotential, truncation_degree: int) -> ExpSum:
    """Exponential-sum model of Y(z) = z*y(pi; z/i), keeping z-degrees
    >= -truncation_degree.

    Amplitudes are real; the sum is an odd real function of z, so its zeros
    come in conjugate and antipodal pairs around the imaginary axis, where
    the rotated Dirichlet eigenvalues live.
    """
    if truncation_degree < 0:
        raise DomainError("truncation degree must be >= 0")
    order = p.smoothness_order
    for t in p.terms:
        needed = t.order + 3 if t.order % 2 == 0 else t.order + 2
        if order < needed:
            raise RegimeError(
                f"jump of order {t.order} needs smoothness order M >= {needed} "
                f"to appear in the exponential-sum model (potential has M={order})")
    half, sc, even_terms, odd_terms = _blocks(p, order)
    acc = {}

    def add(amp, deg, freq):
        if amp == 0.0 or deg < -truncation_degree:
            return
        key = (deg, freq)
        acc[key] = acc.get(key, 0.0) + amp

    add(+0.5, 0, PI)
    add(-0.5, 0, -PI)
    for m in range(1, half + 1):
        cm = sc.cos_block[m - 1] * 4.0 ** (-m)
        add(cm, 1 - 2 * m, PI)
        add(cm, 1 - 2 * m, -PI)
        sm = sc.sin_block[m - 1] * 2.0 ** (-2 * m - 1)
        add(-sm, -2 * m, PI)
        add(+sm, -2 * m, -PI)
    for m, x, c in even_terms:
        w = c * 2.0 ** (-2 * m - 3)
        add(-w, -2 * m - 2, PI - 2 * x)
        add(+w, -2 * m - 2, -(PI - 2 * x))
    for m, x, c in odd_terms:
        w = c * 2.0 ** (-2 * m - 4)
        add(-w, -2 * m - 3, PI - 2 * x)
        add(-w, -2 * m - 3, -(PI - 2 * x))
    terms = tuple((amp, deg, freq) for (deg, freq), amp in acc.items() if amp != 0.0)
    return ExpSum(terms)
