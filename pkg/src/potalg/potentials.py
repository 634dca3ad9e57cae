"""Closed-form potentials: conventional piece, rational extension piece,
and the cross-check channel against the Casimir assembly.

All values are carried as complex numbers for both families; reality of the
half-line family is an asserted invariant, not a type restriction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import hyperbolic as hyp
from .algebra import _asarray_domain, _maybe_scalar, casimir_potential
from .errors import SingularityError
from .params import (Family, PotentialParams, ValidationReport, ensure_valid,
                     validate)


def validate_params(p: PotentialParams) -> ValidationReport:
    """Accept/reject the parameter set, naming any violated constraint and
    reporting the ladder size n_max and the continuum threshold."""
    return validate(p)


def potential_conventional(p: PotentialParams, x):
    """The unextended (m = 0) potential of the family.

    GPT:      (k-1/2)^2 + [B^2 + (k-1/2)(k+1/2)] csch^2 x
                        - B (2(k-1/2)+1) csch x coth x
    Scarf-II: (k-1/2)^2 + [(iB)^2 - (k-1/2)(k+1/2)] sech^2 x
                        + iB (2(k-1/2)+1) sech x tanh x
    """
    ensure_valid(p)
    xa, scalar = _asarray_domain(p.family, x)
    B, k = p.B, p.k
    const = (k - 0.5) ** 2
    if p.family is Family.GPT:
        cs = hyp.csch(xa)
        v = (const + (B * B + (k - 0.5) * (k + 0.5)) * cs * cs
             - B * 2.0 * k * cs * hyp.coth(xa)) + 0j
    else:
        se = hyp.sech(xa)
        v = (const + (-B * B - (k - 0.5) * (k + 0.5)) * se * se
             + 1j * B * 2.0 * k * se * np.tanh(xa))
    return _maybe_scalar(v, scalar)


def potential_rational(p: PotentialParams, x):
    """The rational correction V_total - V_conventional.

    m = 0 returns zero; m = 1 uses the closed two-term forms

    GPT:      4k/(2B cosh x - 2k) - 2 (4B^2 - 4k^2)/(2B cosh x - 2k)^2
    Scarf-II: -4k/(-2iB sinh x + 2k) + 2 (4(iB)^2 + 4k^2)/(-2iB sinh x + 2k)^2

    and m >= 2 is defined through the Casimir assembly, for which no closed
    two-term form exists.
    """
    ensure_valid(p)
    xa, scalar = _asarray_domain(p.family, x)
    B, k = p.B, p.k
    if p.m == 0:
        return _maybe_scalar(np.zeros_like(xa, dtype=complex), scalar)
    if p.m == 1:
        if p.family is Family.GPT:
            inv = hyp.inv_gpt_denominator(B, k, xa)
            if np.any(~np.isfinite(inv)):
                raise SingularityError("vanishing m=1 denominator (unreachable for valid B, k)")
            v = (4.0 * k * inv - 2.0 * (4.0 * B * B - 4.0 * k * k) * inv * inv) + 0j
        else:
            inv = hyp.inv_scarf_denominator(B, k, xa)
            v = -4.0 * k * inv + 2.0 * (-4.0 * B * B + 4.0 * k * k) * inv * inv
        return _maybe_scalar(v, scalar)
    v_cas = np.atleast_1d(np.asarray(casimir_potential(p, xa)))
    v_conv = np.atleast_1d(np.asarray(potential_conventional(p, xa)))
    return _maybe_scalar(v_cas - v_conv, scalar)


def potential_total(p: PotentialParams, x):
    """Conventional plus rational piece (equal to the Casimir assembly)."""
    xa, scalar = _asarray_domain(p.family, x)
    v = (np.atleast_1d(np.asarray(potential_conventional(p, xa)))
         + np.atleast_1d(np.asarray(potential_rational(p, xa))))
    return _maybe_scalar(v, scalar)


@dataclass(frozen=True)
class PotentialEvaluation:
    """All potential channels at one point, with the assembly cross-check."""

    x: float
    v_conventional: complex
    v_rational: complex
    v_total: complex
    v_casimir: complex
    family: Family
    params: PotentialParams

    @property
    def assembly_gap(self) -> float:
        return abs(self.v_total - self.v_casimir)


def evaluate_potential(p: PotentialParams, x: float) -> PotentialEvaluation:
    """Evaluate every channel at one point; v_total = v_conventional +
    v_rational by construction."""
    v_conv = complex(potential_conventional(p, x))
    v_rat = complex(potential_rational(p, x))
    return PotentialEvaluation(
        x=float(x),
        v_conventional=v_conv,
        v_rational=v_rat,
        v_total=v_conv + v_rat,
        v_casimir=complex(casimir_potential(p, x)),
        family=p.family,
        params=p,
    )
