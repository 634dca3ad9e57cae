"""Modified ladder-operator realization: the (F, G, U) function triple per
family, residuals of the two closure constraints, the Casimir-assembled
k-dependent potential, and the closed-form bound-state ladder.

The construction modifies the usual first-order ladder operators by a
rational term U(x, a) evaluated at the shifted labels a = k -+ 1/2.  Closing
the algebra requires

    F' + F^2 = 1,        G' + F G = 0                       (structure)

and the index-shift constraint linking the two shifted components

    [U^2(a-) - U'(a-) + 2 U(a-) (a- F - G)]
  - [U^2(a+) + U'(a+) + 2 U(a+) (a+ F - G)] = 0,   a-+ = k -+ 1/2.

`rest1_residuals` and `rest2_residual` measure exactly these left-hand
sides with analytic derivatives, so they report algebra violations rather
than discretization noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import BoundStateRangeError, SingularityError, UsageError
from .params import Family, PotentialParams, ensure_valid
from .specialfun import JacobiParams, jacobi_poly, jacobi_poly_derivative

# GPT evaluations below this x are rejected rather than returning +-inf
GPT_DOMAIN_FLOOR = 1e-8
# denominators smaller than this are treated as genuine poles
_POLE_TOL = 1e-12


def _asarray_domain(family: Family, x) -> tuple[np.ndarray, bool]:
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    if family is Family.GPT and np.any(xa < GPT_DOMAIN_FLOOR):
        raise SingularityError(
            f"GPT potential lives on x > 0; refusing x < {GPT_DOMAIN_FLOOR:g}"
        )
    return xa, scalar


def _maybe_scalar(out: np.ndarray, scalar: bool):
    return complex(out[0]) if scalar else out


@dataclass(frozen=True)
class AlgebraFunctions:
    """The realization's (F, G, U) with their analytic x-derivatives.

    ``u`` and ``u_prime`` take (x, a) with a the shifted label; all callables
    accept scalars or arrays of x and return complex values.
    """

    family: Family
    params: PotentialParams
    f: Callable
    f_prime: Callable
    g: Callable
    g_prime: Callable
    u: Callable
    u_prime: Callable
    u_form: str  # "zero", "explicit" or "jacobi"


def _gpt_fg(B: float):
    def f(x):
        xa, s = _asarray_domain(Family.GPT, x)
        e = np.exp(-xa)
        return _maybe_scalar((1.0 + e * e) / (1.0 - e * e) + 0j, s)

    def f_prime(x):
        xa, s = _asarray_domain(Family.GPT, x)
        e = np.exp(-xa)
        csch = 2.0 * e / (1.0 - e * e)
        return _maybe_scalar(-csch * csch + 0j, s)

    def g(x):
        xa, s = _asarray_domain(Family.GPT, x)
        e = np.exp(-xa)
        return _maybe_scalar(B * 2.0 * e / (1.0 - e * e) + 0j, s)

    def g_prime(x):
        xa, s = _asarray_domain(Family.GPT, x)
        e = np.exp(-xa)
        csch = 2.0 * e / (1.0 - e * e)
        cth = (1.0 + e * e) / (1.0 - e * e)
        return _maybe_scalar(-B * csch * cth + 0j, s)

    return f, f_prime, g, g_prime


def _scarf_fg(B: float):
    # G = -iB sech x.  The displayed rational extension and the assembled
    # potential close the algebra only with this sign of the purely
    # imaginary coefficient; rest1 holds for either sign, rest2 does not.
    def f(x):
        xa, s = _asarray_domain(Family.SCARF2, x)
        return _maybe_scalar(np.tanh(xa) + 0j, s)

    def f_prime(x):
        xa, s = _asarray_domain(Family.SCARF2, x)
        e = np.exp(-np.abs(xa))
        sech = 2.0 * e / (1.0 + e * e)
        return _maybe_scalar(sech * sech + 0j, s)

    def g(x):
        xa, s = _asarray_domain(Family.SCARF2, x)
        e = np.exp(-np.abs(xa))
        return _maybe_scalar(-1j * B * 2.0 * e / (1.0 + e * e), s)

    def g_prime(x):
        xa, s = _asarray_domain(Family.SCARF2, x)
        e = np.exp(-np.abs(xa))
        sech = 2.0 * e / (1.0 + e * e)
        return _maybe_scalar(1j * B * sech * np.tanh(xa), s)

    return f, f_prime, g, g_prime


# ---------------------------------------------------------------------------
# extension term U(x, a)
# ---------------------------------------------------------------------------

def _u_zero():
    def u(x, a):
        xa = np.asarray(x, dtype=float)
        z = np.zeros(np.atleast_1d(xa).shape, dtype=complex)
        return complex(0) if xa.ndim == 0 else z

    return u, u


def _check_poles(den: np.ndarray, what: str):
    if np.any(np.abs(den) < _POLE_TOL):
        raise SingularityError(f"{what} has a pole at a requested evaluation point")


def _u_gpt_explicit(B: float):
    """Two-term m=1 form, written in e^-x so large x never overflows.

    q(c) = 2B sinh x / (2B cosh x - c),  r(c) = 2B cosh x / (2B cosh x - c);
    U = q(2a+1) - q(2a-1),  U' = r(2a+1) - r(2a-1) - (q(2a+1)^2 - q(2a-1)^2).
    """

    def pieces(xa, a):
        t = np.exp(-xa)
        d_lo = B * (1.0 + t * t) - (2.0 * a + 1.0) * t
        d_hi = B * (1.0 + t * t) - (2.0 * a - 1.0) * t
        _check_poles(d_lo, "m=1 extension denominator")
        _check_poles(d_hi, "m=1 extension denominator")
        q_lo = B * (1.0 - t * t) / d_lo
        q_hi = B * (1.0 - t * t) / d_hi
        r_lo = B * (1.0 + t * t) / d_lo
        r_hi = B * (1.0 + t * t) / d_hi
        return q_lo, q_hi, r_lo, r_hi

    def u(x, a):
        xa, s = _asarray_domain(Family.GPT, x)
        q_lo, q_hi, _, _ = pieces(xa, a)
        return _maybe_scalar(q_lo - q_hi + 0j, s)

    def u_prime(x, a):
        xa, s = _asarray_domain(Family.GPT, x)
        q_lo, q_hi, r_lo, r_hi = pieces(xa, a)
        return _maybe_scalar(r_lo - r_hi - (q_lo * q_lo - q_hi * q_hi) + 0j, s)

    return u, u_prime


def _u_scarf_explicit(B: float):
    """Two-term m=1 form: U = 2iB cosh x [1/(D - 1) - 1/(D + 1)],
    D = -2iB sinh x + 2a, stabilized through e^-|x|."""

    def pieces(xa, a):
        w = np.exp(-np.abs(xa))
        sg = np.sign(xa)
        base = -1j * B * sg * (1.0 - w * w)  # -2iB sinh x, times w
        d_lo = base + (2.0 * a - 1.0) * w
        d_hi = base + (2.0 * a + 1.0) * w
        _check_poles(d_lo, "m=1 extension denominator")
        _check_poles(d_hi, "m=1 extension denominator")
        qc_lo = 1j * B * (1.0 + w * w) / d_lo  # 2iB cosh x / (den)
        qc_hi = 1j * B * (1.0 + w * w) / d_hi
        qs_lo = 1j * B * sg * (1.0 - w * w) / d_lo  # 2iB sinh x / (den)
        qs_hi = 1j * B * sg * (1.0 - w * w) / d_hi
        return qc_lo, qc_hi, qs_lo, qs_hi

    def u(x, a):
        xa, s = _asarray_domain(Family.SCARF2, x)
        qc_lo, qc_hi, _, _ = pieces(xa, a)
        return _maybe_scalar(qc_lo - qc_hi, s)

    def u_prime(x, a):
        xa, s = _asarray_domain(Family.SCARF2, x)
        qc_lo, qc_hi, qs_lo, qs_hi = pieces(xa, a)
        return _maybe_scalar(qs_lo - qs_hi + (qc_lo * qc_lo - qc_hi * qc_hi), s)

    return u, u_prime


def _u_jacobi(family: Family, B: float, m: int):
    """General X_m form: a prefactor times a difference of two ratios of
    Jacobi polynomials of degrees m-1 over m, evaluated at cosh x (GPT) or
    i sinh x (Scarf-II)."""

    def index_set(a: float):
        return (
            JacobiParams(m - 1, -B + a + 0.5, -B - a - 0.5),  # numerator 1
            JacobiParams(m, -B + a - 0.5, -B - a - 1.5),      # denominator 1
            JacobiParams(m - 1, -B + a - 0.5, -B - a + 0.5),  # numerator 2
            JacobiParams(m, -B + a - 1.5, -B - a - 0.5),      # denominator 2
        )

    def geometry(xa: np.ndarray):
        if family is Family.GPT:
            y = np.cosh(xa).astype(complex)
            dy = np.sinh(xa).astype(complex)
            pref = (m - 2.0 * B - 1.0) * np.sinh(xa) / 2.0 + 0j
            dpref = (m - 2.0 * B - 1.0) * np.cosh(xa) / 2.0 + 0j
        else:
            y = 1j * np.sinh(xa)
            dy = 1j * np.cosh(xa)
            pref = (m - 2.0 * B - 1.0) * 1j * np.cosh(xa) / 2.0
            dpref = (m - 2.0 * B - 1.0) * 1j * np.sinh(xa) / 2.0
        return y, dy, pref, dpref

    def evaluate(xa: np.ndarray, a: float):
        y, dy, pref, dpref = geometry(xa)
        n1p, d1p, n2p, d2p = index_set(a)
        n1 = np.atleast_1d(np.asarray(jacobi_poly(n1p, y)))
        d1 = np.atleast_1d(np.asarray(jacobi_poly(d1p, y)))
        n2 = np.atleast_1d(np.asarray(jacobi_poly(n2p, y)))
        d2 = np.atleast_1d(np.asarray(jacobi_poly(d2p, y)))
        _check_poles(d1, f"X_{m} extension denominator")
        _check_poles(d2, f"X_{m} extension denominator")
        dn1 = np.atleast_1d(np.asarray(jacobi_poly_derivative(n1p, y)))
        dd1 = np.atleast_1d(np.asarray(jacobi_poly_derivative(d1p, y)))
        dn2 = np.atleast_1d(np.asarray(jacobi_poly_derivative(n2p, y)))
        dd2 = np.atleast_1d(np.asarray(jacobi_poly_derivative(d2p, y)))
        ratio = n1 / d1 - n2 / d2
        dratio = ((dn1 * d1 - n1 * dd1) / (d1 * d1)
                  - (dn2 * d2 - n2 * dd2) / (d2 * d2)) * dy
        return pref * ratio, dpref * ratio + pref * dratio

    def u(x, a):
        xa, s = _asarray_domain(family, x)
        val, _ = evaluate(xa, a)
        return _maybe_scalar(val, s)

    def u_prime(x, a):
        xa, s = _asarray_domain(family, x)
        _, der = evaluate(xa, a)
        return _maybe_scalar(der, s)

    return u, u_prime


def make_algebra_functions(p: PotentialParams, u_form: str = "auto") -> AlgebraFunctions:
    """Build the family's (F, G, U) triple with analytic derivatives.

    ``u_form`` selects the extension-term evaluation path for m = 1:
    "explicit" is the two-term rational display, "jacobi" the general
    polynomial-ratio form; the two agree to rounding and both are exposed
    so that agreement can be asserted.  "auto" uses the explicit form for
    m <= 1 and the polynomial-ratio form beyond.
    """
    ensure_valid(p)
    if u_form not in ("auto", "explicit", "jacobi"):
        raise UsageError(f"unknown u_form {u_form!r}")
    if p.family is Family.GPT:
        f, fp, g, gp = _gpt_fg(p.B)
    else:
        f, fp, g, gp = _scarf_fg(p.B)

    if p.m == 0:
        u, up = _u_zero()
        form = "zero"
    elif p.m == 1 and u_form in ("auto", "explicit"):
        u, up = (_u_gpt_explicit(p.B) if p.family is Family.GPT
                 else _u_scarf_explicit(p.B))
        form = "explicit"
    else:
        if u_form == "explicit" and p.m != 1:
            raise UsageError("the explicit two-term form exists only for m = 1")
        u, up = _u_jacobi(p.family, p.B, p.m)
        form = "jacobi"
    return AlgebraFunctions(
        family=p.family, params=p,
        f=f, f_prime=fp, g=g, g_prime=gp, u=u, u_prime=up, u_form=form,
    )


# ---------------------------------------------------------------------------
# constraint residuals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidualReport:
    """Max-abs residuals of the closure constraints over a sample grid."""

    rest1_F_max: float
    rest1_G_max: float
    rest2_max: float
    casimir_vs_closed_max: float
    sample_count: int
    sample_domain: tuple[float, float]


def _check_xs(af: AlgebraFunctions, xs) -> np.ndarray:
    xa = np.atleast_1d(np.asarray(xs, dtype=float))
    if xa.size == 0:
        raise UsageError("empty sample grid")
    if af.family is Family.GPT and np.any(xa <= 1e-6):
        raise SingularityError("GPT residual samples must stay above x = 1e-6")
    return xa


def rest1_residuals(af: AlgebraFunctions, xs) -> tuple[float, float]:
    """Max |F' + F^2 - 1| and max |G' + F G| over the sample points."""
    xa = _check_xs(af, xs)
    f = np.asarray(af.f(xa))
    fp = np.asarray(af.f_prime(xa))
    g = np.asarray(af.g(xa))
    gp = np.asarray(af.g_prime(xa))
    return (
        float(np.max(np.abs(fp + f * f - 1.0))),
        float(np.max(np.abs(gp + f * g))),
    )


def rest2_residual(af: AlgebraFunctions, k: float, xs) -> float:
    """Max-abs of the index-shift closure constraint at labels k -+ 1/2."""
    xa = _check_xs(af, xs)
    a_lo, a_hi = k - 0.5, k + 0.5
    f = np.asarray(af.f(xa))
    g = np.asarray(af.g(xa))
    u_lo = np.asarray(af.u(xa, a_lo))
    u_hi = np.asarray(af.u(xa, a_hi))
    du_lo = np.asarray(af.u_prime(xa, a_lo))
    du_hi = np.asarray(af.u_prime(xa, a_hi))
    lhs = u_lo * u_lo - du_lo + 2.0 * u_lo * (f * a_lo - g)
    rhs = u_hi * u_hi + du_hi + 2.0 * u_hi * (f * a_hi - g)
    return float(np.max(np.abs(lhs - rhs)))


def casimir_potential(p: PotentialParams, x):
    """k-dependent potential assembled term by term from the realization:

    V_k = (F^2 - 1)(k^2 - 1/4) + 2k G' + G^2 + (k - 1/2)^2
          + U^2(a) + 2 (a F - G) U(a) - U'(a),        a = k - 1/2.
    """
    af = make_algebra_functions(p)
    xa, scalar = _asarray_domain(p.family, x)
    k, a = p.k, p.k - 0.5
    f = np.asarray(af.f(xa))
    g = np.asarray(af.g(xa))
    gp = np.asarray(af.g_prime(xa))
    u = np.asarray(af.u(xa, a))
    du = np.asarray(af.u_prime(xa, a))
    v = ((f * f - 1.0) * (k * k - 0.25) + 2.0 * k * gp + g * g + a * a
         + u * u + 2.0 * (a * f - g) * u - du)
    return _maybe_scalar(v, scalar)


# ---------------------------------------------------------------------------
# closed-form ladder
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundState:
    """One ladder entry: level index n, series label j, potential label k,
    and the closed-form energy."""

    n: int
    j: float
    k: float
    energy: float


def energy_closed_form(k: float, n: int) -> float:
    """E_n = (k - 1/2)^2 - (n - (k - 1/2))^2 for 0 <= n < k - 1/2.

    Evaluated in exact rational arithmetic so the telescoped remainder sum
    reproduces it bit for bit.
    """
    from .params import n_max_below

    if int(n) != n or n < 0 or not n < k - 0.5:
        raise BoundStateRangeError(int(n), n_max_below(k))
    a = Fraction(k) - Fraction(1, 2)
    return float(a * a - (a - int(n)) ** 2)


def bound_state_labels(p: PotentialParams) -> list[BoundState]:
    """The full finite ladder for the given parameters.

    The energies do not depend on the extension index m; the series label is
    stored as j = -(n + 1)/2, the discrete-series convention.
    """
    ensure_valid(p)
    return [
        BoundState(n=n, j=-(n + 1) / 2.0, k=p.k, energy=energy_closed_form(p.k, n))
        for n in range(p.n_max + 1)
    ]


def default_residual_grid(family: Family, n: int = 200) -> np.ndarray:
    """Sampling grid for residual checks: log-spaced on [1e-2, 25] for the
    half-line family (probes both the singular side and the tail), linear on
    [-15, 15] for the full-line family."""
    family = Family(family)
    if n < 1:
        raise UsageError("grid must contain at least one point")
    if family is Family.GPT:
        return np.logspace(np.log10(1e-2), np.log10(25.0), n)
    return np.linspace(-15.0, 15.0, n)
