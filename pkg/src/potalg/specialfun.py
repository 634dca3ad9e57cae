"""Jacobi polynomials P_n^(alpha,beta) over complex arguments.

The extension machinery needs these at negative, non-integer index pairs
(alpha, beta) and at complex arguments (cosh x on the half line, i sinh x on
the full line), so everything here is complex-safe and tolerant of the
parameter regions where the classical three-term recurrence degenerates.

Evaluation strategy:

* default: three-term recurrence in the degree, seeded with
  P_0 = 1,  P_1 = (alpha - beta)/2 + (alpha + beta + 2) z / 2;
* fallback: Horner evaluation of the exact monomial coefficients (computed
  once per (n, alpha, beta) in rational arithmetic).  Used whenever
  nu + alpha + beta is a nonpositive integer for some intermediate degree
  nu <= n (there the recurrence divides by zero or the leading coefficients
  vanish and the recurrence cancels catastrophically), and for large |z|
  where the same near-cancellation degrades the recurrence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError

# fallback trigger: nu + alpha + beta within this distance of a nonpositive integer
_DEGENERACY_TOL = 1e-9
# beyond this |z| the monomial form is better conditioned than the recurrence
_LARGE_Z = 1e2


@dataclass(frozen=True)
class JacobiParams:
    """Degree and index pair of one Jacobi polynomial."""

    n: int
    alpha: float
    beta: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise DomainError(f"degree n must be a nonnegative integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise DomainError("alpha and beta must be finite")


def _is_degenerate(n: int, alpha: float, beta: float) -> bool:
    s = alpha + beta
    for nu in range(2, n + 1):
        t = nu + s
        if abs(t - round(t)) <= _DEGENERACY_TOL and round(t) <= 0:
            return True
    return False


@lru_cache(maxsize=4096)
def _monomial_coeffs(n: int, alpha: float, beta: float) -> tuple[float, ...]:
    """Exact monomial coefficients (low degree first) of P_n^(alpha,beta).

    Built from the finite-sum representation
    P_n = 2^-n sum_s C(n+alpha, s) C(n+beta, n-s) (z-1)^(n-s) (z+1)^s
    in Fraction arithmetic, so vanishing leading coefficients come out as
    exact zeros rather than rounding debris.
    """
    A, Bf = Fraction(alpha), Fraction(beta)
    total = [Fraction(0)] * (n + 1)
    for s in range(n + 1):
        w = Fraction(1)
        for i in range(s):
            w *= (n + A - i) / (i + 1)
        for i in range(n - s):
            w *= (n + Bf - i) / (i + 1)
        if w == 0:
            continue
        poly = [Fraction(1)]
        for _ in range(n - s):  # multiply by (z - 1)
            poly = [(poly[j - 1] if j else Fraction(0))
                    - (poly[j] if j < len(poly) else Fraction(0))
                    for j in range(len(poly) + 1)]
        for _ in range(s):  # multiply by (z + 1)
            poly = [(poly[j - 1] if j else Fraction(0))
                    + (poly[j] if j < len(poly) else Fraction(0))
                    for j in range(len(poly) + 1)]
        for j, c in enumerate(poly):
            total[j] += w * c
    half = Fraction(1, 2 ** n)
    return tuple(float(c * half) for c in total)


def _horner(coeffs: tuple[float, ...], z: np.ndarray) -> np.ndarray:
    out = np.zeros_like(z)
    for c in reversed(coeffs):
        out = out * z + c
    return out


def _recurrence(n: int, alpha: float, beta: float, z: np.ndarray) -> np.ndarray:
    pm2 = np.ones_like(z)
    if n == 0:
        return pm2
    pm1 = (alpha - beta) / 2.0 + (alpha + beta + 2.0) * z / 2.0
    if n == 1:
        return pm1
    s = alpha + beta
    for nu in range(2, n + 1):
        c1 = 2.0 * nu * (nu + s) * (2.0 * nu + s - 2.0)
        c2 = 2.0 * nu + s - 1.0
        c3 = (2.0 * nu + s) * (2.0 * nu + s - 2.0)
        c4 = alpha * alpha - beta * beta
        c5 = 2.0 * (nu + alpha - 1.0) * (nu + beta - 1.0) * (2.0 * nu + s)
        p = (c2 * (c3 * z + c4) * pm1 - c5 * pm2) / c1
        pm2, pm1 = pm1, p
    return pm1


def _as_complex_array(z) -> tuple[np.ndarray, bool]:
    arr = np.asarray(z, dtype=np.complex128)
    scalar = arr.ndim == 0
    if not np.all(np.isfinite(arr)):
        raise DomainError("argument z must be finite")
    return np.atleast_1d(arr), scalar


def jacobi_poly(p: JacobiParams, z):
    """Evaluate P_n^(alpha,beta)(z) for complex scalar or array z.

    Standard normalization P_n^(alpha,beta)(1) = C(n+alpha, n).
    """
    zz, scalar = _as_complex_array(z)
    if p.n == 0:
        out = np.ones_like(zz)
    elif _is_degenerate(p.n, p.alpha, p.beta) or np.any(np.abs(zz) > _LARGE_Z):
        out = _horner(_monomial_coeffs(p.n, p.alpha, p.beta), zz)
    else:
        out = _recurrence(p.n, p.alpha, p.beta, zz)
    return complex(out[0]) if scalar else out


def jacobi_poly_derivative(p: JacobiParams, z):
    """Evaluate d/dz P_n^(alpha,beta)(z) via the index-raising identity

    d/dz P_n^(alpha,beta) = (n + alpha + beta + 1)/2 * P_(n-1)^(alpha+1,beta+1).
    """
    zz, scalar = _as_complex_array(z)
    if p.n == 0:
        out = np.zeros_like(zz)
    else:
        lowered = JacobiParams(p.n - 1, p.alpha + 1.0, p.beta + 1.0)
        out = (p.n + p.alpha + p.beta + 1.0) / 2.0 * np.atleast_1d(
            np.asarray(jacobi_poly(lowered, zz))
        )
    return complex(out[0]) if scalar else out
