"""Command-line interface: tabulate potentials, compare spectra against the
closed forms, run the verification suites, and sweep parameters.

Exit status: 0 pass, 1 verification tolerance failure, 2 usage/parameter
error, 3 numerical non-convergence.  Output is byte-identical for identical
configuration (no timestamps; the metadata header carries only the config
echo and the tool version).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .algebra import (bound_state_labels, casimir_potential,
                      default_residual_grid, make_algebra_functions,
                      rest1_residuals, rest2_residual)
from .errors import (NonConvergenceError, ParameterError, PotalgError,
                     UsageError)
from .params import Family, PotentialParams, validate
from .potentials import (potential_conventional, potential_rational,
                         potential_total)
from .spectral import GridSpec, converge_spectrum
from .susy import energy_from_remainders, shape_invariance_residual, si_default_grid

EXIT_PASS = 0
EXIT_TOLERANCE = 1
EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3

_FAMILY_DEFAULTS = {
    Family.GPT: dict(B=5.0, k=3.5, x_min=0.01, x_max=25.0),
    Family.SCARF2: dict(B=2.0, k=2.5, x_min=-15.0, x_max=15.0),
}
TAIL_CRITERION = 1e-8
_TAIL_WIDEN_STEP = 5.0
_TAIL_WIDEN_TRIES = 4


def _fmt(x) -> str:
    """Round-trip-safe decimal rendering (17 significant digits)."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    return format(float(x), ".17g")


@dataclass
class RunConfig:
    command: str
    params: PotentialParams
    grid: GridSpec
    levels: int
    output_format: str
    output_path: str | None
    tolerances: dict[str, float]
    ranges: dict[str, list] = field(default_factory=dict)

    def echo(self) -> dict[str, str]:
        d = {
            "command": self.command,
            "family": self.params.family.value,
            "B": _fmt(self.params.B),
            "k": _fmt(self.params.k),
            "m": str(self.params.m),
            "x_min": _fmt(self.grid.x_min),
            "x_max": _fmt(self.grid.x_max),
            "n": str(self.grid.n_points),
            "levels": str(self.levels),
            "format": self.output_format,
        }
        for name, vals in sorted(self.ranges.items()):
            d[f"{name}_range"] = ",".join(_fmt(v) for v in vals)
        for name, tol in sorted(self.tolerances.items()):
            d[f"tol_{name}"] = _fmt(tol)
        return d


@dataclass
class CommandResult:
    columns: list[str]
    rows: list[list]
    config: dict[str, str]
    warnings: list[str]
    passed: bool
    exit_code: int


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _render_csv(res: CommandResult) -> str:
    lines = [f"# potalg {__version__}"]
    lines.append("# config: " + " ".join(f"{k}={v}" for k, v in res.config.items()))
    for w in res.warnings:
        lines.append(f"# warning: {w}")
    lines.append(",".join(res.columns))
    for row in res.rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _render_json(res: CommandResult) -> str:
    import json

    payload = {
        "schema_version": "1",
        "tool": "potalg",
        "tool_version": __version__,
        "config": res.config,
        "columns": res.columns,
        "rows": [[_fmt(v) for v in row] for row in res.rows],
        "warnings": list(res.warnings),
        "pass": bool(res.passed),
    }
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def _emit(res: CommandResult, fmt: str, out_path: str | None) -> None:
    text = _render_csv(res) if fmt == "csv" else _render_json(res)
    if out_path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out_path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".potalg-", dir=directory, text=True)
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, out_path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def run_potential(cfg: RunConfig) -> CommandResult:
    """One row per grid point with every potential channel and the gap
    between the closed-form total and the assembled potential."""
    p = cfg.params
    xs = cfg.grid.points()
    v_conv = np.atleast_1d(np.asarray(potential_conventional(p, xs)))
    v_rat = np.atleast_1d(np.asarray(potential_rational(p, xs)))
    v_tot = v_conv + v_rat
    v_cas = np.atleast_1d(np.asarray(casimir_potential(p, xs)))
    columns = ["x", "re_v_conventional", "im_v_conventional", "re_v_rational",
               "im_v_rational", "re_v_total", "im_v_total", "re_v_casimir",
               "im_v_casimir", "abs_gap"]
    rows = [
        [x, vc.real, vc.imag, vr.real, vr.imag, vt.real, vt.imag,
         va.real, va.imag, abs(vt - va)]
        for x, vc, vr, vt, va in zip(xs, v_conv, v_rat, v_tot, v_cas)
    ]
    return CommandResult(columns, rows, cfg.echo(), [], True, EXIT_PASS)


def _tail_gap(p: PotentialParams, grid: GridSpec) -> float:
    edges = [grid.x_max] if p.family is Family.GPT else [grid.x_min, grid.x_max]
    return max(abs(complex(potential_total(p, e)) - p.threshold) for e in edges)


def ensure_tail(p: PotentialParams, grid: GridSpec) -> tuple[GridSpec, list[str]]:
    """Enforce |V(edge) - threshold| < 1e-8, widening the box (at fixed
    spacing) and warning when the requested domain is too short."""
    warnings: list[str] = []
    g = grid
    for _ in range(_TAIL_WIDEN_TRIES):
        gap = _tail_gap(p, g)
        if gap < TAIL_CRITERION:
            return g, warnings
        h = g.h
        if p.family is Family.GPT:
            new = GridSpec(g.x_min, g.x_max + _TAIL_WIDEN_STEP,
                           g.n_points + math.ceil(_TAIL_WIDEN_STEP / h))
        else:
            extra = math.ceil(_TAIL_WIDEN_STEP / h)
            new = GridSpec(g.x_min - _TAIL_WIDEN_STEP, g.x_max + _TAIL_WIDEN_STEP,
                           g.n_points + 2 * extra)
        warnings.append(
            f"tail criterion |V(edge) - threshold| = {gap:.3g} >= {TAIL_CRITERION:g}; "
            f"widening domain to [{new.x_min:g}, {new.x_max:g}]")
        g = new
    return g, warnings


def _spectrum_rows(spec, targets):
    rows = []
    for n, (t, z, err) in enumerate(zip(targets, spec.ladder, spec.refinement_error)):
        if isinstance(z, complex) and math.isnan(z.real):
            rows.append(["ladder", n, t, None, None, None, None, None])
            continue
        rows.append(["ladder", n, t, z.real, z.imag, abs(z.real - t), err, abs(z.imag)])
    for z in spec.extra_states:
        rows.append(["extra", None, None, z.real, z.imag, None, None, abs(z.imag)])
    for z in spec.near_threshold:
        rows.append(["near-threshold", None, None, z.real, z.imag, None, None, abs(z.imag)])
    return rows


def run_spectrum(cfg: RunConfig) -> CommandResult:
    """Converged numerical ladder against the closed form; exit 1 when any
    matched level misses its target by more than 10x the refinement error."""
    p = cfg.params
    grid, warnings = ensure_tail(p, cfg.grid)
    spec = converge_spectrum(p, grid, cfg.levels)
    warnings.extend(spec.warnings)
    columns = ["kind", "n", "e_closed", "re_e_numeric", "im_e_numeric",
               "abs_delta", "refinement_error", "abs_im"]
    rows = _spectrum_rows(spec, spec.targets)
    passed = True
    for t, z, err in zip(spec.targets, spec.ladder, spec.refinement_error):
        if math.isnan(z.real) or abs(z.real - t) > 10.0 * err:
            passed = False
    return CommandResult(columns, rows, cfg.echo(), warnings, passed,
                         EXIT_PASS if passed else EXIT_TOLERANCE)


def _residual_grid(cfg: RunConfig) -> np.ndarray:
    """Residual sampling grid: log-spaced for the half-line family (probes
    the singular side and the tail), linear for the full-line one."""
    g, p = cfg.grid, cfg.params
    if p.family is Family.GPT:
        if g.x_min <= 0:
            raise UsageError("GPT residual grid needs x_min > 0")
        return np.logspace(math.log10(g.x_min), math.log10(g.x_max), g.n_points)
    return np.linspace(g.x_min, g.x_max, g.n_points)


def run_verify(cfg: RunConfig, functions_override=None) -> CommandResult:
    """Residual suite.  ``verify-algebra`` measures the closure constraints
    and the closed-form/assembly gap; ``verify-susy`` measures the
    shape-invariance defect and the telescoped remainder sum.  The optional
    ``functions_override`` substitutes the algebra functions under test
    (used to demonstrate fault detection)."""
    p = cfg.params
    tol = cfg.tolerances
    xs = _residual_grid(cfg)
    columns = ["check", "value", "tolerance", "status"]
    rows: list[list] = []
    warnings: list[str] = []
    passed = True

    def add(check: str, value, tolerance=None, info=False):
        nonlocal passed
        if info or tolerance is None:
            rows.append([check, value, None, "info"])
            return
        ok = value <= tolerance
        passed = passed and ok
        rows.append([check, value, tolerance, "pass" if ok else "fail"])

    if cfg.command == "verify-algebra":
        af = functions_override or make_algebra_functions(p)
        f = np.asarray(af.f(xs))
        res_f = np.abs(np.asarray(af.f_prime(xs)) + f * f - 1.0)
        res_g = np.abs(np.asarray(af.g_prime(xs)) + f * np.asarray(af.g(xs)))
        r1f, r1g = float(np.max(res_f)), float(np.max(res_g))
        add("rest1_F_max", r1f, tol["rest1"])
        add("rest1_G_max", r1g, tol["rest1"])
        if r1f > tol["rest1"]:
            warnings.append(f"largest rest1 F-residual at x = {xs[int(np.argmax(res_f))]:.6g}")
        if r1g > tol["rest1"]:
            warnings.append(f"largest rest1 G-residual at x = {xs[int(np.argmax(res_g))]:.6g}")
        add("rest2_max", rest2_residual(af, p.k, xs), tol["rest2"])
        v_closed = np.atleast_1d(np.asarray(potential_total(p, xs)))
        v_cas = np.atleast_1d(np.asarray(casimir_potential(p, xs)))
        add("casimir_vs_closed_max", float(np.max(np.abs(v_closed - v_cas))), tol["gap"])
        if p.m == 1:
            ex = make_algebra_functions(p, u_form="explicit")
            ja = make_algebra_functions(p, u_form="jacobi")
            dual = float(np.max(np.abs(
                np.asarray(ex.u(xs, p.k - 0.5)) - np.asarray(ja.u(xs, p.k - 0.5)))))
            add("m1_dual_path_max", dual, 1e-10)
        add("sample_count", len(xs), info=True)
    else:  # verify-susy
        a = p.k - 0.5
        rep = shape_invariance_residual(p, a, xs)
        add("si_r_mean", rep.r_mean, info=True)
        add("si_stddev", rep.r_stddev, tol["si"])
        add("si_mean_vs_expected", abs(rep.r_mean - rep.r_expected), tol["si"])
        add("si_imag_max", rep.r_imag_max, tol["si"])
        rows.append(["si_sign_convention", rep.sign_convention, None, "info"])
        if rep.violation:
            warnings.append(rep.violation)
            passed = False
        tele = max(
            (abs(energy_from_remainders(p.k, s.n) - s.energy)
             for s in bound_state_labels(p)),
            default=0.0)
        add("telescoping_max_gap", tele, 0.0)
    return CommandResult(columns, rows, cfg.echo(), warnings, passed,
                         EXIT_PASS if passed else EXIT_TOLERANCE)


def _sweep_values(spec_str: str | None, fixed) -> list:
    if spec_str is None:
        return [fixed]
    try:
        lo, hi, step = (float(tok) for tok in spec_str.split(":"))
    except ValueError as exc:
        raise UsageError(f"range must look like lo:hi:step, got {spec_str!r}") from exc
    if step <= 0:
        raise UsageError("range step must be positive")
    out, v, i = [], lo, 0
    while v <= hi + 1e-12 * max(1.0, abs(step)):
        out.append(round(v, 12))
        i += 1
        v = lo + i * step
    return out


def run_sweep(cfg: RunConfig) -> CommandResult:
    """Cartesian sweep over B, k, m; one row per bound level per tuple plus
    an isospectrality-deviation column against the tuple's m = 0 baseline.
    Invalid tuples produce an error record instead of aborting the sweep."""
    bs = cfg.ranges.get("B", [cfg.params.B])
    ks = cfg.ranges.get("k", [cfg.params.k])
    ms = [int(v) for v in cfg.ranges.get("m", [cfg.params.m])]
    tuples = [(b, k, m) for b in bs for k in ks for m in ms]
    if len(tuples) > 10_000:
        raise UsageError(f"sweep too large: {len(tuples)} tuples exceeds the 10000 cap")
    columns = ["B", "k", "m", "n", "e_closed", "re_e_numeric", "im_e_numeric",
               "abs_delta", "refinement_error", "iso_deviation", "status", "error"]
    warnings: list[str] = []

    def ladder_reals(spec):
        return [z.real for z in spec.ladder]

    baselines: dict[tuple[float, float], object] = {}

    def compute_baseline(bk):
        b, k = bk
        p0 = PotentialParams(cfg.params.family, b, k, 0)
        if not validate(p0).valid:
            return None
        return converge_spectrum(p0, cfg.grid, cfg.levels)

    def compute_tuple(tup):
        b, k, m = tup
        p = PotentialParams(cfg.params.family, b, k, m)
        report = validate(p)
        if not report.valid:
            return tup, ("invalid", "; ".join(report.violations), None)
        try:
            spec = converge_spectrum(p, cfg.grid, cfg.levels)
        except (PotalgError, FloatingPointError) as exc:
            return tup, ("error", str(exc), None)
        return tup, ("ok", None, spec)

    distinct_bk = sorted({(b, k) for b, k, _ in tuples})
    with ThreadPoolExecutor(max_workers=min(8, os.cpu_count() or 1)) as pool:
        for bk, spec0 in zip(distinct_bk, pool.map(compute_baseline, distinct_bk)):
            baselines[bk] = spec0
        results = dict(
            (tup, outcome) for tup, outcome in pool.map(compute_tuple, tuples))

    rows: list[list] = []
    for tup in sorted(tuples):
        b, k, m = tup
        status, err_msg, spec = results[tup]
        if status != "ok":
            rows.append([b, k, m, None, None, None, None, None, None, None,
                         status, err_msg])
            continue
        base = baselines.get((b, k))
        base_ladder = ladder_reals(base) if base is not None else []
        iso = None
        if base_ladder:
            pairs = [
                abs(zr - br)
                for zr, br in zip(ladder_reals(spec), base_ladder)
                if not (math.isnan(zr) or math.isnan(br))
            ]
            iso = max(pairs) if pairs else None
        for n, (t, z, err) in enumerate(zip(spec.targets, spec.ladder,
                                            spec.refinement_error)):
            if math.isnan(z.real):
                rows.append([b, k, m, n, t, None, None, None, None, iso,
                             "missing", None])
            else:
                rows.append([b, k, m, n, t, z.real, z.imag, abs(z.real - t),
                             err, iso, "ok", None])
        warnings.extend(f"(B={b:g}, k={k:g}, m={m}) {w}" for w in spec.warnings)
    return CommandResult(columns, rows, cfg.echo(), warnings, True, EXIT_PASS)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="potalg",
        description="Rationally extended shape-invariant potentials: "
                    "closed forms, algebra verification, and numerical spectra.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--family", choices=[f.value for f in Family], default="gpt")
        sp.add_argument("--B", type=float, default=None, help="potential strength")
        sp.add_argument("--k", type=float, default=None, help="algebra label")
        sp.add_argument("--m", type=int, default=1, help="extension index (0 = conventional)")
        sp.add_argument("--x-min", type=float, default=None)
        sp.add_argument("--x-max", type=float, default=None)
        sp.add_argument("--n", type=int, default=None, help="grid points")
        sp.add_argument("--levels", type=int, default=3, help="refinement levels")
        sp.add_argument("--format", choices=["csv", "json"],
                        default=os.environ.get("POTALG_DEFAULT_FORMAT", "csv"))
        sp.add_argument("--out", default=None, help="output path (atomic write)")

    sp = sub.add_parser("potential", help="tabulate all potential channels")
    common(sp)
    sp = sub.add_parser("spectrum", help="numerical vs closed-form bound energies")
    common(sp)
    for name in ("verify-algebra", "verify-susy"):
        sp = sub.add_parser(name, help="residual verification suite")
        common(sp)
        sp.add_argument("--tol-rest1", type=float, default=1e-9)
        sp.add_argument("--tol-rest2", type=float, default=1e-9)
        sp.add_argument("--tol-gap", type=float, default=1e-9)
        sp.add_argument("--tol-si", type=float, default=1e-8)
    sp = sub.add_parser("sweep", help="cartesian parameter sweep")
    common(sp)
    sp.add_argument("--B-range", default=None, metavar="lo:hi:step")
    sp.add_argument("--k-range", default=None, metavar="lo:hi:step")
    sp.add_argument("--m-range", default=None, metavar="lo:hi:step")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    family = Family(args.family)
    defaults = _FAMILY_DEFAULTS[family]
    B = args.B if args.B is not None else defaults["B"]
    k = args.k if args.k is not None else defaults["k"]
    params = PotentialParams(family, B, k, args.m)
    if args.command in ("potential", "verify-algebra", "verify-susy"):
        default_n = 200
    else:
        default_n = 1000
    grid = GridSpec(
        x_min=args.x_min if args.x_min is not None else defaults["x_min"],
        x_max=args.x_max if args.x_max is not None else defaults["x_max"],
        n_points=args.n if args.n is not None else default_n,
    )
    tolerances = {
        "rest1": getattr(args, "tol_rest1", 1e-9),
        "rest2": getattr(args, "tol_rest2", 1e-9),
        "gap": getattr(args, "tol_gap", 1e-9),
        "si": getattr(args, "tol_si", 1e-8),
    }
    ranges = {}
    for name in ("B", "k", "m"):
        spec_str = getattr(args, f"{name}_range", None)
        if spec_str is not None:
            fixed = {"B": B, "k": k, "m": args.m}[name]
            ranges[name] = _sweep_values(spec_str, fixed)
    cfg = RunConfig(
        command=args.command, params=params, grid=grid, levels=args.levels,
        output_format=args.format, output_path=args.out,
        tolerances=tolerances, ranges=ranges,
    )
    return cfg


_RUNNERS = {
    "potential": run_potential,
    "spectrum": run_spectrum,
    "verify-algebra": run_verify,
    "verify-susy": run_verify,
    "sweep": run_sweep,
}


def run_config(cfg: RunConfig) -> CommandResult:
    """Validate parameters, dispatch, and serialize; library-level entry."""
    report = validate(cfg.params)
    if not report.valid:
        raise ParameterError(
            f"invalid parameters for family {cfg.params.family.value}: "
            + "; ".join(report.violations))
    return _RUNNERS[cfg.command](cfg)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        cfg = config_from_args(args)
        result = run_config(cfg)
    except (ParameterError, UsageError) as exc:
        print(f"potalg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergenceError as exc:
        print(f"potalg: non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except PotalgError as exc:
        print(f"potalg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for w in result.warnings:
        print(f"potalg: warning: {w}", file=sys.stderr)
    try:
        _emit(result, cfg.output_format, cfg.output_path)
    except OSError as exc:
        print(f"potalg: cannot write {cfg.output_path}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return result.exit_code


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
