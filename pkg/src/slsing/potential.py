"""Piecewise-smooth potentials on [0, pi] with derivative-jump singularities.

A potential is a finite sum of one-sided power terms

    c * 1_{[x0, oo)}(x) * (x - x0)^m / m!

(each one a jump of size ``c`` in the m-th derivative at ``x0``) plus a
polynomial smooth remainder.  All jump locations live strictly inside
(0, pi/2) and are pairwise distinct.  Everything here is exact closed-form
arithmetic on that representation; no quadrature, no finite differences.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError

PI = math.pi

__all__ = [
    "JumpTerm",
    "SmoothTail",
    "SingularPotential",
    "SpectralCoefficients",
    "evaluate",
    "integral",
    "q_derivative",
    "spectral_coefficients",
    "segment_polynomials",
    "is_piecewise_constant",
    "constant_segments",
    "potential_from_dict",
    "potential_to_dict",
    "load_potential",
    "save_potential",
    "potential_hash",
]


@dataclass(frozen=True)
class JumpTerm:
    """One singular term: the potential's ``order``-th derivative jumps by
    ``coefficient`` at ``location``."""

    order: int
    location: float
    coefficient: float

    def __post_init__(self):
        if not isinstance(self.order, int) or self.order < 0:
            raise ValidationError(
                f"jump order must be a non-negative integer, got {self.order!r}")
        if not 0.0 < self.location < PI / 2:
            raise ValidationError(
                f"jump location must lie strictly inside (0, pi/2), got {self.location}")
        if not math.isfinite(self.location):
            raise ValidationError("jump location must be finite")
        if self.coefficient == 0.0 or not math.isfinite(self.coefficient):
            raise ValidationError(
                f"jump coefficient must be nonzero and finite, got {self.coefficient}")

    def value(self, x: float) -> float:
        """c * 1_{[x0, oo)}(x) * (x - x0)^m / m!  (indicator closed on the left)."""
        if x < self.location:
            return 0.0
        return self.coefficient * (x - self.location) ** self.order / math.factorial(self.order)


@dataclass(frozen=True)
class SmoothTail:
    """Polynomial smooth remainder, coefficients in ascending powers of x.

    The empty tuple is the zero remainder.
    """

    coefficients: tuple = ()

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if any(not math.isfinite(c) for c in coeffs):
            raise ValidationError("tail coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def value(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def derivative_value(self, k: int, x: float) -> float:
        """k-th derivative at x, exact."""
        acc = 0.0
        for j in range(len(self.coefficients) - 1, k - 1, -1):
            acc = acc * x + self.coefficients[j] * math.perm(j, k)
        return acc

    def integral(self, a: float, b: float) -> float:
        """Exact integral over [a, b]."""
        def anti(x):
            acc = 0.0
            for j in reversed(range(len(self.coefficients))):
                acc = acc * x + self.coefficients[j] / (j + 1)
            return acc * x
        return anti(b) - anti(a)


@dataclass(frozen=True)
class SingularPotential:
    """A potential with finitely many derivative-jump singularities.

    ``smoothness_order`` is the odd integer M bounding how deep the boundary
    expansion machinery may differentiate; every jump order must be <= M - 1.
    """

    terms: tuple = ()
    tail: SmoothTail = SmoothTail()
    smoothness_order: int = 7

    def __post_init__(self):
        terms = tuple(self.terms)
        object.__setattr__(self, "terms", terms)
        m = self.smoothness_order
        if not isinstance(m, int) or m < 1:
            raise ValidationError(f"smoothness order M must be an integer >= 1, got {m!r}")
        if m % 2 == 0:
            raise ValidationError(
                f"smoothness order M must be odd (even M is unsupported), got {m}")
        locations = [t.location for t in terms]
        if len(set(locations)) != len(locations):
            raise ValidationError("jump locations must be pairwise distinct")
        for t in terms:
            if t.order > m - 1:
                raise ValidationError(
                    f"jump order {t.order} exceeds M - 1 = {m - 1}")

    @property
    def jump_count(self) -> int:
        return len(self.terms)

    @property
    def locations(self) -> tuple:
        """Sorted jump locations (the singular points)."""
        return tuple(sorted(t.location for t in self.terms))

    def breakpoints(self) -> tuple:
        """Integration breakpoints: 0, the sorted singular points, pi."""
        return (0.0,) + self.locations + (PI,)


ZERO_POTENTIAL = SingularPotential()


def evaluate(p: SingularPotential, x: float) -> float:
    """Potential value at x in [0, pi]; right-continuous at jump locations."""
    if not 0.0 <= x <= PI:
        raise DomainError(f"x must lie in [0, pi], got {x}")
    return sum(t.value(x) for t in p.terms) + p.tail.value(x)


def integral(p: SingularPotential, a: float, b: float) -> float:
    """Exact integral of p over [a, b] (closed-form antiderivative)."""
    if not (0.0 <= a <= b <= PI):
        raise DomainError(f"need 0 <= a <= b <= pi, got a={a}, b={b}")
    total = p.tail.integral(a, b)
    for t in p.terms:
        mm = t.order + 1
        fb = max(b - t.location, 0.0) ** mm
        fa = max(a - t.location, 0.0) ** mm
        total += t.coefficient * (fb - fa) / math.factorial(mm)
    return total


def q_derivative(p: SingularPotential, m: int, x: float) -> float:
    """m-th derivative of the part of p that is C^{m-1}-smooth or better.

    Only jump terms of order >= m participate (lower orders are not m times
    differentiable); at a singular location the right-hand limit is returned.
    """
    if not isinstance(m, int) or m < 0:
        raise DomainError(f"derivative order must be a non-negative integer, got {m!r}")
    if m > p.smoothness_order:
        raise DomainError(
            f"derivative order {m} exceeds the potential smoothness order M={p.smoothness_order}")
    if not 0.0 <= x <= PI:
        raise DomainError(f"x must lie in [0, pi], got {x}")
    total = p.tail.derivative_value(m, x)
    for t in p.terms:
        if t.order >= m and x >= t.location:
            k = t.order - m
            total += t.coefficient * (x - t.location) ** k / math.factorial(k)
    return total


@dataclass(frozen=True)
class SpectralCoefficients:
    """Boundary functionals entering the large-frequency expansion.

    ``cos_block[j]`` weights the cos-phase 1/omega^{2j+2} corrections
    (cos_block[0] is the integral of p); ``sin_block[j]`` weights the
    sin-phase 1/omega^{2j+3} corrections.
    """

    cos_block: tuple
    sin_block: tuple


def spectral_coefficients(p: SingularPotential) -> SpectralCoefficients:
    """Evaluate the boundary coefficient functionals out to the order M allows."""
    half = (p.smoothness_order - 1) // 2
    cos_block = [integral(p, 0.0, PI)]
    for m in range(1, half + 1):
        cos_block.append(q_derivative(p, 2 * m - 1, PI) - q_derivative(p, 2 * m - 1, 0.0))
    sin_block = [q_derivative(p, 2 * m, PI) + q_derivative(p, 2 * m, 0.0)
                 for m in range(half)]
    return SpectralCoefficients(tuple(cos_block), tuple(sin_block))


def segment_polynomials(p: SingularPotential):
    """Per-segment power-basis form of p.

    Returns a list of (a, b, coeffs) with ``p(x) = sum coeffs[k] x^k`` on
    [a, b]; segment ends are consecutive breakpoints, so p is a single
    polynomial on each.
    """
    bps = p.breakpoints()
    max_deg = max([p.tail.degree] + [t.order for t in p.terms], default=0)
    max_deg = max(max_deg, 0)
    segments = []
    for a, b in zip(bps[:-1], bps[1:]):
        coeffs = np.zeros(max_deg + 1)
        n_tail = len(p.tail.coefficients)
        if n_tail:
            coeffs[:n_tail] += p.tail.coefficients
        for t in p.terms:
            if t.location <= a:
                # expand c (x - x0)^m / m! into powers of x
                m, x0 = t.order, t.location
                base = t.coefficient / math.factorial(m)
                for k in range(m + 1):
                    coeffs[k] += base * math.comb(m, k) * (-x0) ** (m - k)
        segments.append((a, b, coeffs))
    return segments


def is_piecewise_constant(p: SingularPotential) -> bool:
    """True when all jumps have order 0 and the tail is constant (or empty)."""
    return all(t.order == 0 for t in p.terms) and p.tail.degree <= 0


def constant_segments(p: SingularPotential):
    """For a piecewise-constant potential, the list of (a, b, value) pieces."""
    if not is_piecewise_constant(p):
        raise DomainError("potential is not piecewise constant "
                          "(a term of order >= 1 or a non-constant tail is present)")
    base = p.tail.coefficients[0] if p.tail.coefficients else 0.0
    bps = p.breakpoints()
    jumps = {t.location: t.coefficient for t in p.terms}
    pieces = []
    level = base
    for a, b in zip(bps[:-1], bps[1:]):
        if a in jumps:
            level += jumps[a]
        pieces.append((a, b, level))
    return pieces


# ---------------------------------------------------------------------------
# file format: {"M": int, "terms": [{"m": int, "x": float, "c": float}],
#               "tail": [float, ...]}

def potential_to_dict(p: SingularPotential) -> dict:
    return {
        "M": p.smoothness_order,
        "terms": [{"m": t.order, "x": t.location, "c": t.coefficient}
                  for t in p.terms],
        "tail": list(p.tail.coefficients),
    }


def potential_from_dict(data: dict) -> SingularPotential:
    try:
        m_order = data["M"]
        raw_terms = data.get("terms", [])
        tail = data.get("tail", [])
    except (TypeError, KeyError) as exc:
        raise ValidationError(f"potential definition missing required key: {exc}") from exc
    terms = tuple(JumpTerm(order=int(t["m"]), location=float(t["x"]),
                           coefficient=float(t["c"]))
                  for t in raw_terms)
    return SingularPotential(terms=terms, tail=SmoothTail(tuple(tail)),
                             smoothness_order=int(m_order))


def load_potential(path) -> SingularPotential:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"potential file is not valid JSON: {exc}") from exc
    return potential_from_dict(data)


def save_potential(p: SingularPotential, path) -> None:
    with open(path, "w") as fh:
        json.dump(potential_to_dict(p), fh, indent=1)
        fh.write("\n")


def potential_hash(p: SingularPotential) -> str:
    """Short stable identifier of the potential definition."""
    canon = json.dumps(potential_to_dict(p), sort_keys=True,
                       separators=(",", ":"), default=float)
    return hashlib.sha256(canon.encode()).hexdigest()[:12]
