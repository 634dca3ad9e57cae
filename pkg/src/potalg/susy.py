"""Superpotential, partner potentials, and the shape-invariance remainder.

The superpotential at shifted label a is W(x, a) = a F(x) - G(x) + U(x, a);
its partner combinations W^2 +- W' reproduce the family potential up to a
constant, and shape invariance with translation a -> a + 1 makes

    D(x) = [W^2(x, a) - W'(x, a)] - [W^2(x, a+1) + W'(x, a+1)]

an x-independent constant whose magnitude is the remainder R = 2a + 1.
Telescoping the remainders down the ladder reproduces the closed-form
energies exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import AlgebraFunctions, energy_closed_form, make_algebra_functions
from .errors import BoundStateRangeError, UsageError
from .params import Family, PotentialParams, ensure_valid


@dataclass(frozen=True)
class SuperpotentialEval:
    """W = w1 + w2 at one (a, x), with the analytic x-derivative."""

    a: float
    x: float
    w1: complex  # a F - G
    w2: complex  # U(x, a)
    w: complex
    w_prime: complex


def _functions(p: PotentialParams) -> AlgebraFunctions:
    ensure_valid(p)
    return make_algebra_functions(p)


def superpotential(p: PotentialParams, a: float, x: float,
                   af: AlgebraFunctions | None = None) -> SuperpotentialEval:
    """Evaluate the superpotential and its derivative at shifted label a."""
    af = af if af is not None else _functions(p)
    w1 = complex(np.asarray(af.f(x)).item() * a - np.asarray(af.g(x)).item())
    w2 = complex(np.asarray(af.u(x, a)).item())
    w1p = complex(a * np.asarray(af.f_prime(x)).item() - np.asarray(af.g_prime(x)).item())
    w2p = complex(np.asarray(af.u_prime(x, a)).item())
    return SuperpotentialEval(a=float(a), x=float(x), w1=w1, w2=w2,
                              w=w1 + w2, w_prime=w1p + w2p)


def partner_pair(p: PotentialParams, a: float, x: float) -> tuple[complex, complex]:
    """(W^2 + W', W^2 - W') at (a, x); their difference is 2 W' identically."""
    ev = superpotential(p, a, x)
    w2 = ev.w * ev.w
    return (w2 + ev.w_prime, w2 - ev.w_prime)


@dataclass(frozen=True)
class ShapeInvarianceReport:
    """Constancy measurement of the shape-invariance defect D(x).

    ``sign_convention`` records which pairing of the two partner
    combinations came out constant: "minus_plus" is the ladder-closing one
    ([W^2 - W'](a) against [W^2 + W'](a+1)).  ``r_mean`` is sign-normalized
    so a satisfied shape invariance reports r_mean ~ 2a + 1.
    """

    a: float
    r_mean: float
    r_stddev: float
    r_expected: float
    sign_convention: str
    r_imag_max: float = 0.0
    violation: str | None = None


def shape_invariance_residual(p: PotentialParams, a: float, grid) -> ShapeInvarianceReport:
    """Measure D(x) over the grid under both sign pairings and report the
    constant one.  Both a and a + 1 must be valid shifted labels for the
    family (for the half-line family this needs B comfortably above a + 1,
    otherwise the extension at the shifted label develops poles)."""
    af = _functions(p)
    xs = np.atleast_1d(np.asarray(grid, dtype=float))
    if xs.size < 2:
        raise UsageError("shape-invariance measurement needs at least 2 grid points")
    f = np.asarray(af.f(xs))
    g = np.asarray(af.g(xs))
    fp = np.asarray(af.f_prime(xs))
    gp = np.asarray(af.g_prime(xs))

    def w_and_prime(label: float):
        w = label * f - g + np.asarray(af.u(xs, label))
        wp = label * fp - gp + np.asarray(af.u_prime(xs, label))
        return w, wp

    w_lo, wp_lo = w_and_prime(a)
    w_hi, wp_hi = w_and_prime(a + 1.0)
    # pairing 1: V_-(a) - V_+(a+1); pairing 2: V_+(a) - V_-(a+1)
    d_mp = (w_lo * w_lo - wp_lo) - (w_hi * w_hi + wp_hi)
    d_pm = (w_lo * w_lo + wp_lo) - (w_hi * w_hi - wp_hi)
    stats = {}
    for name, dd in (("minus_plus", d_mp), ("plus_minus", d_pm)):
        mean = complex(np.mean(dd))
        stats[name] = (mean, float(np.std(dd)), float(np.max(np.abs(dd.imag))))
    winner = min(stats, key=lambda nm: stats[nm][1])
    mean, stddev, imax = stats[winner]
    r_mean = -mean.real if mean.real < 0 else mean.real  # sign-normalized remainder
    expected = 2.0 * a + 1.0
    violation = None
    if all(st[1] > 1e-6 * abs(st[0]) for st in stats.values()):
        violation = ("neither sign pairing is constant: stddev/|mean| = "
                     + ", ".join(f"{nm}: {st[1] / max(abs(st[0]), 1e-300):.3g}"
                                 for nm, st in stats.items()))
    return ShapeInvarianceReport(
        a=float(a), r_mean=r_mean, r_stddev=stddev, r_expected=expected,
        sign_convention=winner, r_imag_max=imax, violation=violation,
    )


def energy_from_remainders(k: float, n: int) -> float:
    """Telescoped remainder sum sum_{s=1..n} R(a - s) with a = k - 1/2 and
    R(y) = 2y + 1; agrees with the closed form bit for bit (both sides are
    evaluated in exact rational arithmetic)."""
    from .params import n_max_below

    if int(n) != n or n < 0 or not n < k - 0.5:
        raise BoundStateRangeError(int(n), n_max_below(k))
    a = Fraction(k) - Fraction(1, 2)
    total = Fraction(0)
    for s in range(1, int(n) + 1):
        total += 2 * (a - s) + 1
    assert float(total) == energy_closed_form(k, n)
    return float(total)


def si_default_grid(family: Family, n: int = 200) -> np.ndarray:
    """Grid for shape-invariance measurements: the residual-check grids."""
    from .algebra import default_residual_grid

    return default_residual_grid(family, n)
