"""Independent numerical verification of the closed-form spectra.

-psi'' + V(x) psi = E psi is discretized with the three-point stencil on a
uniform grid (Dirichlet walls one spacing outside [x_min, x_max], so an
N-point grid yields an N x N tridiagonal operator and N eigenvalues).  The
half-line family gives a real symmetric tridiagonal matrix; the full-line
family gives a complex-symmetric (not Hermitian) one, for which LAPACK has
no tridiagonal driver, so eigenvalues come from an implicit-shift QL
iteration carried out in complex arithmetic.

Bound states are identified against the closed-form ladder: each predicted
level is matched to the nearest sub-threshold eigenvalue, and any remaining
sub-threshold eigenvalues are reported (never silently dropped or asserted
away).  Grid refinement with Richardson extrapolation supplies error
estimates and the converged values.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from numba import njit

from .algebra import GPT_DOMAIN_FLOOR, bound_state_labels
from .errors import (DomainError, NonConvergenceError, UsageError,
                     WrongEngineError)
from .params import Family, PotentialParams, ensure_valid
from .potentials import potential_total

DEFAULT_REALITY_TOL = 1e-6


@dataclass(frozen=True)
class GridSpec:
    """Uniform 1-D grid: n_points nodes spanning [x_min, x_max] inclusive."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise UsageError(f"x_min must be below x_max, got [{self.x_min}, {self.x_max}]")
        if int(self.n_points) != self.n_points or self.n_points < 16:
            raise UsageError(f"n_points must be an integer >= 16, got {self.n_points}")
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    def refined(self, factor: int) -> "GridSpec":
        return GridSpec(self.x_min, self.x_max, self.n_points * factor)


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric tridiagonal operator 2/h^2 + V(x_i) on the diagonal and a
    constant -1/h^2 coupling neighbours (complex-symmetric when V is)."""

    diagonal: np.ndarray
    off_diagonal: float
    h: float

    def __post_init__(self):
        object.__setattr__(self, "diagonal",
                           np.ascontiguousarray(self.diagonal, dtype=np.complex128))

    @property
    def n(self) -> int:
        return self.diagonal.shape[0]

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.diagonal.imag == 0.0))


def discretize_function(v, g: GridSpec) -> TridiagonalOperator:
    """Discretize -d^2/dx^2 + v(x) for an arbitrary vectorized potential."""
    xs = g.points()
    values = np.asarray(v(xs), dtype=np.complex128)
    if values.shape != xs.shape:
        raise UsageError("potential callable must return one value per grid point")
    h = g.h
    return TridiagonalOperator(diagonal=2.0 / h**2 + values,
                               off_diagonal=-1.0 / h**2, h=h)


def discretize(p: PotentialParams, g: GridSpec) -> TridiagonalOperator:
    """Discretize the family potential; rejects grids touching the GPT
    half-line singularity."""
    ensure_valid(p)
    if p.family is Family.GPT and g.x_min < GPT_DOMAIN_FLOOR:
        raise DomainError(
            f"GPT grid must keep x_min >= {GPT_DOMAIN_FLOOR:g} (singular at x = 0)")
    return discretize_function(lambda xs: potential_total(p, xs), g)


# ---------------------------------------------------------------------------
# eigensolvers
# ---------------------------------------------------------------------------

def eigen_real_tridiagonal(op: TridiagonalOperator) -> np.ndarray:
    """All eigenvalues of a real symmetric tridiagonal operator, ascending."""
    if not op.is_real:
        raise WrongEngineError(
            "operator has a complex diagonal; use eigen_complex_tridiagonal")
    d = op.diagonal.real.astype(np.float64)
    if op.n == 1:
        return d.copy()
    e = np.full(op.n - 1, float(op.off_diagonal))
    return scipy.linalg.eigvalsh_tridiagonal(d, e)


@njit(cache=True, nogil=True)
def _cql_kernel(d, e, tol, max_iter, exc_every):  # pragma: no cover - jitted
    """Implicit-shift QL for a complex-symmetric tridiagonal matrix.

    d (length n) holds the diagonal and is overwritten with eigenvalues;
    e (length n) holds the subdiagonal in e[0..n-2].  Rotations use the
    complex-orthogonal convention c^2 + s^2 = 1.  2 x 2 blocks deflate
    through the closed-form quadratic (this also covers defective blocks).
    Returns -1 on success, otherwise the index of the stuck block.
    """
    n = d.shape[0]
    if n <= 1:
        return -1
    dsave = np.empty(n, dtype=np.complex128)
    esave = np.empty(n, dtype=np.complex128)
    for l in range(n):
        its = 0
        while True:
            m = n - 1
            for i in range(l, n - 1):
                if abs(e[i]) <= tol * (abs(d[i]) + abs(d[i + 1])):
                    m = i
                    break
            if m == l:
                break
            if m == l + 1:
                t = (d[l] + d[l + 1]) / 2.0
                disc = cmath.sqrt(((d[l] - d[l + 1]) / 2.0) ** 2 + e[l] ** 2)
                d[l] = t - disc
                d[l + 1] = t + disc
                e[l] = 0.0
                break
            if its >= max_iter:
                return l
            its += 1
            # Wilkinson-style shift from the leading 2 x 2 of the block;
            # the larger-magnitude root avoids cancellation, and stalled
            # blocks get the shift nudged every exc_every sweeps.
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = cmath.sqrt(g * g + 1.0)
            den = g + r if abs(g + r) >= abs(g - r) else g - r
            if its % exc_every == 0:
                den = den * (1.0 + 0.618 * (its // exc_every))
            g = d[m] - d[l] + e[l] / den
            s = 1.0 + 0.0j
            c = 1.0 + 0.0j
            p = 0.0 + 0.0j
            for i in range(l, m + 1):
                dsave[i] = d[i]
                esave[i] = e[i]
            failed = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = cmath.sqrt(f * f + g * g)
                e[i + 1] = r
                if abs(r) <= 1e-8 * (abs(f) + abs(g)):
                    # isotropic rotation vector (f^2 + g^2 ~ 0): restore the
                    # block and retry with the next (nudged) shift
                    failed = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            if failed:
                for i in range(l, m + 1):
                    d[i] = dsave[i]
                    e[i] = esave[i]
                continue
            d[l] = d[l] - p
            e[l] = g
            e[m] = 0.0
    return -1


def eigen_complex_tridiagonal(op: TridiagonalOperator, *, tol: float = 1e-12,
                              max_iterations: int = 30,
                              exceptional_every: int = 10) -> np.ndarray:
    """All eigenvalues of the complex-symmetric tridiagonal operator, sorted
    by real part (then imaginary part).  Raises
    :class:`NonConvergenceError` naming the stuck block if a deflation fails
    to converge within the iteration cap."""
    d = op.diagonal.astype(np.complex128).copy()
    e = np.zeros(op.n, dtype=np.complex128)
    if op.n > 1:
        e[: op.n - 1] = op.off_diagonal
    status = _cql_kernel(d, e, tol, max_iterations, exceptional_every)
    if status >= 0:
        raise NonConvergenceError(
            f"QL iteration did not converge within {max_iterations} sweeps "
            f"at deflation block {status}", block_index=int(status))
    order = np.lexsort((d.imag, d.real))
    return d[order]


def _solve_operator(op: TridiagonalOperator) -> np.ndarray:
    if op.is_real:
        return eigen_real_tridiagonal(op).astype(np.complex128)
    return eigen_complex_tridiagonal(op)


# ---------------------------------------------------------------------------
# bound-state identification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Spectrum:
    """Converged bound-state energies with their closed-form targets.

    ``bound_energies`` holds the ladder-matched states that passed both the
    continuum-edge margin and the reality tolerance.  Sub-threshold
    eigenvalues that do not belong to the predicted ladder are reported in
    ``extra_states``; margin casualties land in ``near_threshold`` and
    reality violations in ``pt_violations``.
    """

    energies: np.ndarray
    bound_energies: tuple[float, ...]
    threshold: float
    refinement_error: tuple[float, ...]
    params: PotentialParams
    grid: GridSpec
    targets: tuple[float, ...]
    ladder: tuple[complex, ...]
    extra_states: tuple[complex, ...] = ()
    near_threshold: tuple[complex, ...] = ()
    pt_violations: tuple[complex, ...] = ()
    warnings: tuple[str, ...] = ()
    level_bound_energies: tuple[tuple[complex, ...], ...] = ()
    level_h: tuple[float, ...] = ()

    @property
    def deltas(self) -> tuple[float, ...]:
        """|matched - target| per ladder level (nan where unmatched)."""
        return tuple(
            abs(e.real - t) if not cmath.isnan(e.real) else float("nan")
            for e, t in zip(self.ladder, self.targets)
        )


def _match_targets(eigs: np.ndarray, targets: tuple[float, ...],
                   threshold: float) -> tuple[list[complex], list[complex]]:
    """Greedy nearest-match of each predicted level to a sub-threshold
    eigenvalue; returns (matched-per-target with nan placeholders, extras)."""
    cands = [complex(z) for z in eigs if z.real < threshold]
    used = [False] * len(cands)
    matched: list[complex] = []
    for t in targets:
        best_j, best_dist = -1, float("inf")
        for j, z in enumerate(cands):
            if not used[j] and abs(z.real - t) < best_dist:
                best_j, best_dist = j, abs(z.real - t)
        if best_j < 0:
            matched.append(complex(float("nan"), float("nan")))
        else:
            used[best_j] = True
            matched.append(cands[best_j])
    extras = [z for j, z in enumerate(cands) if not used[j]]
    return matched, extras


def bound_states_from_spectrum(eigs, p: PotentialParams,
                               reality_tol: float = DEFAULT_REALITY_TOL,
                               *, refinement_error: tuple[float, ...] = (),
                               grid: GridSpec | None = None) -> Spectrum:
    """Classify an eigenvalue list against the closed-form ladder.

    States must lie below threshold minus a continuum-edge margin of ten
    times the refinement error (zero when no refinement data is supplied);
    matched states with |Im E| >= reality_tol are recorded as reality
    violations rather than silently accepted or raised on.
    """
    ensure_valid(p)
    eigs = np.asarray(eigs, dtype=np.complex128).ravel()
    order = np.lexsort((eigs.imag, eigs.real))
    eigs = eigs[order]
    threshold = p.threshold
    targets = tuple(s.energy for s in bound_state_labels(p))
    margin = 10.0 * max(refinement_error, default=0.0)

    matched, extras = _match_targets(eigs, targets, threshold)
    warnings: list[str] = []
    bound: list[float] = []
    near: list[complex] = []
    violations: list[complex] = []
    for t, z in zip(targets, matched):
        if cmath.isnan(z.real):
            warnings.append(f"no sub-threshold eigenvalue found for predicted level E={t:g}")
            continue
        if z.real >= threshold - margin:
            near.append(z)
            warnings.append(f"matched level at {z.real:.6g} lies within the "
                            f"continuum-edge margin {margin:.3g} of threshold")
            continue
        if abs(z.imag) >= reality_tol:
            violations.append(z)
            warnings.append(f"matched level at {z:.6g} violates the reality "
                            f"tolerance {reality_tol:g}")
            continue
        bound.append(z.real)
    kept_extras: list[complex] = []
    for z in extras:
        if z.real >= threshold - margin:
            near.append(z)
        else:
            kept_extras.append(z)
    if kept_extras:
        warnings.append(
            "sub-threshold states beyond the predicted ladder: "
            + ", ".join(f"{z.real:.6g}{z.imag:+.2g}j" for z in kept_extras))
    if grid is None:
        grid = GridSpec(-1.0, 1.0, max(16, len(eigs))) if len(eigs) else GridSpec(-1.0, 1.0, 16)
    return Spectrum(
        energies=eigs,
        bound_energies=tuple(sorted(bound)),
        threshold=threshold,
        refinement_error=tuple(refinement_error),
        params=p,
        grid=grid,
        targets=targets,
        ladder=tuple(matched),
        extra_states=tuple(kept_extras),
        near_threshold=tuple(near),
        pt_violations=tuple(violations),
        warnings=tuple(warnings),
    )


def converge_spectrum(p: PotentialParams, base: GridSpec, levels: int = 3,
                      reality_tol: float = DEFAULT_REALITY_TOL) -> Spectrum:
    """Solve on grids of N, 2N, 4N, ... points and Richardson-extrapolate.

    The stencil error is O(h^2); each ladder state is extrapolated from the
    two finest levels using the exact h ratio, with the per-state refinement
    error |E(2N) - E(N)| retained.  A ladder state appearing or vanishing
    between levels raises :class:`NonConvergenceError`.
    """
    ensure_valid(p)
    if levels < 2:
        raise UsageError("refinement needs at least 2 levels")
    targets = tuple(s.energy for s in bound_state_labels(p))
    grids = [base.refined(2 ** lev) for lev in range(levels)]
    level_matched: list[list[complex]] = []
    level_extras: list[list[complex]] = []
    finest_eigs: np.ndarray = np.empty(0, dtype=np.complex128)
    for g in grids:
        eigs = _solve_operator(discretize(p, g))
        finest_eigs = eigs
        matched, extras = _match_targets(eigs, targets, p.threshold)
        level_matched.append(matched)
        level_extras.append(extras)
    counts = [sum(0 if cmath.isnan(z.real) else 1 for z in lm) for lm in level_matched]
    if len(set(counts)) > 1:
        raise NonConvergenceError(
            f"matched bound-state count changed between refinement levels: {counts}")

    fine, prev = level_matched[-1], level_matched[-2]
    h_fine, h_prev = grids[-1].h, grids[-2].h
    ratio2 = (h_prev / h_fine) ** 2
    extrapolated: list[complex] = []
    referr: list[float] = []
    for zf, zp in zip(fine, prev):
        if cmath.isnan(zf.real) or cmath.isnan(zp.real):
            extrapolated.append(complex(float("nan"), float("nan")))
            referr.append(float("nan"))
            continue
        extrapolated.append(zf + (zf - zp) / (ratio2 - 1.0))
        referr.append(abs(zf - zp))

    warnings: list[str] = []
    bound: list[float] = []
    near: list[complex] = []
    violations: list[complex] = []
    for t, z, err in zip(targets, extrapolated, referr):
        if cmath.isnan(z.real):
            warnings.append(f"no sub-threshold eigenvalue found for predicted level E={t:g}")
            continue
        margin = 10.0 * err
        if z.real >= p.threshold - margin:
            near.append(z)
            warnings.append(f"level matched at {z.real:.6g} lies within the "
                            f"continuum-edge margin {margin:.3g} of threshold; reported, not kept")
            continue
        if abs(z.imag) >= reality_tol:
            violations.append(z)
            warnings.append(f"level at {z:.6g} violates the reality tolerance {reality_tol:g}")
            continue
        bound.append(z.real)
    edge_margin = 10.0 * max((e for e in referr if not np.isnan(e)), default=0.0)
    kept_extras: list[complex] = []
    for z in level_extras[-1]:
        if z.real >= p.threshold - edge_margin:
            near.append(z)
        else:
            kept_extras.append(z)
    if kept_extras:
        warnings.append(
            "sub-threshold states beyond the predicted ladder: "
            + ", ".join(f"{z.real:.6g}{z.imag:+.2g}j" for z in kept_extras))

    return Spectrum(
        energies=finest_eigs,
        bound_energies=tuple(sorted(bound)),
        threshold=p.threshold,
        refinement_error=tuple(referr),
        params=p,
        grid=grids[-1],
        targets=targets,
        ladder=tuple(extrapolated),
        extra_states=tuple(kept_extras),
        near_threshold=tuple(near),
        pt_violations=tuple(violations),
        warnings=tuple(warnings),
        level_bound_energies=tuple(tuple(lm) for lm in level_matched),
        level_h=tuple(g.h for g in grids),
    )
