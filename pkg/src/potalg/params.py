"""Potential families and their parameter sets.

Two one-dimensional families are supported:

* ``gpt`` -- generalized Poschl-Teller on the half line x > 0, real.
* ``scarf2`` -- PT-symmetric complex Scarf-II on the full line.

``PotentialParams`` instances are plain records; they can always be
constructed, and :func:`validate` reports whether they satisfy the family
constraints.  Compute operations reject invalid parameters up front.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import ParameterError


class Family(str, Enum):
    GPT = "gpt"
    SCARF2 = "scarf2"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


@dataclass(frozen=True)
class PotentialParams:
    """Parameters (family, B, k, m) of one rationally extended potential.

    B is the potential strength, k the algebra label entering the
    k-dependent potential family, and m >= 0 the extension index
    (m = 0 is the conventional, unextended potential).
    """

    family: Family
    B: float
    k: float
    m: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not (math.isfinite(self.B) and math.isfinite(self.k)):
            raise ParameterError("B and k must be finite")
        if int(self.m) != self.m or self.m < 0:
            raise ParameterError(f"extension index m must be a nonnegative integer, got {self.m}")
        object.__setattr__(self, "m", int(self.m))

    @property
    def threshold(self) -> float:
        """Continuum threshold (k - 1/2)^2; bound states lie strictly below it."""
        return (self.k - 0.5) ** 2

    @property
    def n_max(self) -> int:
        """Largest ladder index: the largest integer strictly below k - 1/2."""
        return n_max_below(self.k)


def n_max_below(k: float) -> int:
    """Largest integer n with n < k - 1/2 (-1 when no bound state exists)."""
    a = k - 0.5
    n = math.ceil(a) - 1
    return max(n, -1)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of parameter validation, with ladder metadata."""

    params: PotentialParams
    valid: bool
    violations: tuple[str, ...]
    n_max: int
    threshold: float
    warnings: tuple[str, ...] = ()


def validate(p: PotentialParams) -> ValidationReport:
    """Check the family constraints and report the bound-state count.

    GPT requires B > k + 1/2 > 1, which keeps the m = 1 denominator
    2B cosh x - 2k positive on the half line.  Scarf-II requires B > 0 and
    k > 1/2, which keeps |2k - 2iB sinh x| bounded away from zero.
    """
    violations: list[str] = []
    warnings: list[str] = []
    if p.family is Family.GPT:
        if not p.k + 0.5 > 1.0:
            violations.append(f"k + 1/2 > 1 fails ({p.k + 0.5:g} <= 1)")
        if not p.B > p.k + 0.5:
            violations.append(f"B > k + 1/2 fails ({p.B:g} <= {p.k + 0.5:g})")
    else:
        if not p.B > 0.0:
            violations.append(f"B > 0 fails ({p.B:g})")
        if not p.k > 0.5:
            violations.append(f"k > 1/2 fails ({p.k:g})")
        warnings.append(
            "scarf2 ladder truncated at n < k - 1/2; the weaker printed rule "
            "n_max < k + 1/2 would admit one more level, any such numerical "
            "state is reported but never asserted"
        )
    return ValidationReport(
        params=p,
        valid=not violations,
        violations=tuple(violations),
        n_max=n_max_below(p.k),
        threshold=(p.k - 0.5) ** 2,
        warnings=tuple(warnings),
    )


def ensure_valid(p: PotentialParams) -> PotentialParams:
    """Raise :class:`ParameterError` naming the violated constraint, else pass through."""
    report = validate(p)
    if not report.valid:
        raise ParameterError(
            f"invalid parameters for family {p.family.value}: " + "; ".join(report.violations)
        )
    return p
