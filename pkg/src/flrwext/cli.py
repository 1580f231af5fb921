"""Command-line front end.

Exit codes:
  0  success
  1  input error (unparseable expression, bad flag, evaluation failure)
  2  a limit needed for the verdict was inconclusive
  3  hypothesis violation (e.g. a Milne chart requested for a non-Milne-like scale factor)
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import dsl
from .classifier import (
    EUCLIDEAN,
    GEOMETRIES,
    HYPERBOLIC,
    a_prime_at_zero,
    check_open_flrw,
    classify_milne_like,
)
from .errors import FlrwError, HypothesisViolation
from .extensions import (
    BOUNDARY,
    build_2d_null_extension,
    build_milne_extension,
    boundary_slice_length,
    closed_form_factor,
    known_gauge,
    metric_determinants,
    milne_grid,
    verify_isometry,
)
from .geometry import (
    distance_lower_bound,
    lift_path,
    lorentzian_length,
    curvature_scale,
    random_timelike_polyline,
    scalar_curvature,
)
from .numerics import json_float
from .scale_factor import parse_gauge, parse_scale_factor
from .sss import SssChart, analyze_sss, verify_sss_identities, write_curve_csv, write_sweep_csv

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INCONCLUSIVE = 2
EXIT_HYPOTHESIS = 3


class InputError(FlrwError, ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    scale_factor: str
    geometry: str = HYPERBOLIC
    dim: int = 3
    gauge: str | None = None
    tol: float = 1e-6
    grid: tuple[int, int] = (20, 20)
    seed: int = 0
    out: str | None = None

    def __post_init__(self):
        if not self.tol > 0.0:
            raise InputError("tolerances must be positive")
        if self.dim < 1:
            raise InputError("dimension must be >= 1")
        if self.geometry not in GEOMETRIES:
            raise InputError(f"geometry must be one of {GEOMETRIES}")
        if min(self.grid) < 2:
            raise InputError("grid needs at least 2 points per axis")


# -- output -----------------------------------------------------------------------


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return json_float(float(obj))
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def write_atomic(path: str | Path, text: str) -> None:
    """Write via a temporary sibling and rename, so failures never leave partial files."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(path: str | None, text: str) -> None:
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _write_via_temp(path: str, writer: Callable[[str], None]) -> None:
    """Run a file-writing helper against a temporary path, then rename into place."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent if str(target.parent) else ".", prefix=f".{target.name}.")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- argument helpers ------------------------------------------------------------------


def parse_grid(text: str) -> tuple[int, int]:
    try:
        n, m = (int(v) for v in text.lower().split("x"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid must look like NxM, got {text!r}") from exc
    if n < 2 or m < 2:
        raise argparse.ArgumentTypeError("grid needs at least 2 points per axis")
    return n, m


def parse_float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; '#' starts a comment; dashes and underscores are interchangeable."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def constant_value(text: str) -> float:
    """Evaluate a constant expression such as ``sinh(1)`` or ``0.5``."""
    node = dsl.parse(text, "s")
    if dsl.free_variables(node):
        raise InputError(f"expected a constant, got {text!r}")
    return float(dsl.compile_value(node, "s")(0.0))


def _config(args) -> RunConfig:
    return RunConfig(
        scale_factor=args.scale_factor,
        geometry=args.geometry,
        dim=args.dim,
        gauge=args.gauge,
        tol=args.tol,
        grid=args.grid,
        seed=args.seed,
        out=args.out,
    )


# -- commands -------------------------------------------------------------------


def cmd_classify(args) -> int:
    cfg = _config(args)
    sf = parse_scale_factor(cfg.scale_factor)
    flrw = check_open_flrw(sf, cfg.geometry, args.tmax, cfg.tol)
    report = {"scale_factor": cfg.scale_factor, "geometry": cfg.geometry, "open_flrw": flrw.to_dict()}
    inconclusive = flrw.inconclusive
    if cfg.geometry == HYPERBOLIC:
        milne = classify_milne_like(sf, cfg.tol)
        report["milne_like"] = milne.to_dict()
        report["is_milne_like"] = milne.is_milne_like
        report["a_prime_zero"] = milne.a_prime_limit.to_dict()
        inconclusive = inconclusive or milne.inconclusive
    else:
        report["milne_like"] = "not applicable (Milne-like needs hyperbolic slices)"
        report["is_milne_like"] = None
        report["a_prime_zero"] = a_prime_at_zero(sf, cfg.tol).to_dict()
    report["is_open_flrw"] = flrw.overall
    report["inconclusive"] = inconclusive
    _emit(cfg.out, dumps(report))
    return EXIT_INCONCLUSIVE if inconclusive else EXIT_OK


def _power_fit(ts: np.ndarray, values: np.ndarray) -> float | None:
    mask = np.abs(values) > 0.0
    if mask.sum() < 2:
        return None
    slope, _ = np.polyfit(np.log(ts[mask]), np.log(np.abs(values[mask])), 1)
    return float(slope)


def cmd_curvature(args) -> int:
    cfg = _config(args)
    sf = parse_scale_factor(cfg.scale_factor)
    ts = np.geomspace(args.tmin, args.tmax, args.points)
    rs = np.array([scalar_curvature(sf, cfg.geometry, cfg.dim, float(t)) for t in ts])
    # flat when every value is round-off relative to the size of the individual terms
    sizes = np.array([curvature_scale(sf, cfg.geometry, cfg.dim, float(t)) for t in ts])
    flat = bool(np.all(np.abs(rs) <= 1e-12 * sizes))
    head = max(2, args.points // 5)
    exponent = None if flat else _power_fit(ts[:head], rs[:head])
    a_min = sf.value(float(ts[0]))
    summary = {
        "scale_factor": cfg.scale_factor,
        "geometry": cfg.geometry,
        "dim": cfg.dim,
        "t_range": [float(ts[0]), float(ts[-1])],
        "max_abs_R": float(np.abs(rs).max()),
        "flat": flat,
        "blow_up": bool(np.abs(rs).max() > args.threshold),
        "power_law_exponent": exponent,
        "R_t_squared_at_tmin": float(rs[0] * ts[0] ** 2),
        "R_a_over_4d_at_tmin": float(rs[0] * a_min / (4 * cfg.dim)),
    }
    _emit(cfg.out, _csv_text(["t", "R_scalar"], zip(ts, rs)))
    if args.report:
        write_atomic(args.report, dumps(summary))
    else:
        sys.stderr.write(dumps(summary))
    return EXIT_OK


def _extend_milne(args, cfg, sf) -> dict:
    gauge = constant_value(cfg.gauge) if cfg.gauge else (known_gauge(cfg.scale_factor) or 1.0)
    chart = build_milne_extension(sf, gauge, cfg.dim, cfg.tol)
    n, m = cfg.grid
    orig = [(t, r) for t in np.linspace(0.1, 3.0, n) for r in np.linspace(0.0, 2.0, m)]
    limit = chart.boundary_limit(tol=cfg.tol)
    past = 1.0 / chart.b_prime_zero.value**2
    report = {
        "chart": "milne",
        "gauge": gauge,
        "b_prime_zero": chart.b_prime_zero.to_dict(),
        "isometry_residual": verify_isometry(chart, orig),
        "isometry_residual_fd": verify_isometry(chart, orig, "fd"),
        "boundary_limit": limit.to_dict(),
        "past_factor": past,
        "boundary_continuity_gap": abs(limit.value - past),
        "boundary_continuous": bool(limit.conclusive and abs(limit.value - past) < 1e-6),
        "slice_lengths": {str(k): boundary_slice_length(chart, k).slice_length for k in (10, 100, 1000)},
    }
    pts = milne_grid(n, m)
    closed = [closed_form_factor(cfg.scale_factor, T, R) for T, R in pts]
    if closed[0] is not None:
        report["closed_form_max_rel_diff"] = max(
            abs(chart.conformal_factor(p) - c) / abs(c) for p, c in zip(pts, closed)
        )
    if args.csv:
        rows = [(T, R, chart.conformal_factor((T, R)), chart.region((T, R))) for T, R in pts]
        rows += [(R, R, chart.conformal_factor((R, R)), BOUNDARY) for R in np.linspace(0.0, 1.0, m)]
        write_atomic(args.csv, _csv_text(["T", "R", "factor", "region"], rows))
    report["inconclusive"] = not limit.conclusive
    return report


def _extend_null(args, cfg, sf) -> dict:
    chart = build_2d_null_extension(sf)
    n, m = cfg.grid
    orig = [(t, x) for t in np.linspace(0.1, 3.0, n) for x in np.linspace(-2.0, 2.0, m)]
    rng = np.random.default_rng(cfg.seed)
    tt = np.concatenate([rng.uniform(-2.0, 2.0, 998), [0.0, 0.0]])
    pts = [(float(a), float(b)) for a, b in zip(tt, rng.uniform(-2.0, 2.0, tt.size))]
    dets = metric_determinants(chart, pts)
    report = {
        "chart": "null2d",
        "isometry_residual": verify_isometry(chart, orig),
        "isometry_residual_fd": verify_isometry(chart, orig, "fd"),
        "det_samples": int(dets.size),
        "det_max_deviation": float(np.abs(dets + 1.0).max()),
        "slice_lengths": {str(k): boundary_slice_length(chart, k).slice_length for k in (10, 100, 1000)},
        "inconclusive": False,
    }
    if args.csv:
        rows = [(p[0], p[1], chart.metric(p)[1, 1], d) for p, d in zip(pts, dets)]
        write_atomic(args.csv, _csv_text(["t_tilde", "x_tilde", "g_xx", "det"], rows))
    return report


def cmd_extend(args) -> int:
    cfg = _config(args)
    sf = parse_scale_factor(cfg.scale_factor)
    if args.chart == "milne":
        report = _extend_milne(args, cfg, sf)
    else:
        report = _extend_null(args, cfg, sf)
    report["scale_factor"] = cfg.scale_factor
    _emit(cfg.out, dumps(report))
    return EXIT_INCONCLUSIVE if report["inconclusive"] else EXIT_OK


def cmd_sss(args) -> int:
    cfg = _config(args)
    sf = parse_scale_factor(cfg.scale_factor)
    f = parse_gauge(cfg.gauge or "s")
    chart = SssChart(sf, cfg.geometry, f)
    n, m = cfg.grid
    grid = []
    for t in np.linspace(args.tmin, args.tmax, n):
        r_star = chart.degenerate_radius(float(t))
        for r in np.linspace(0.0, 2.0, m):
            if r_star is None or abs(r - r_star) >= 1e-3:
                grid.append((float(r), float(t)))
    residual = verify_sss_identities(chart, grid)
    report = analyze_sss(sf, cfg.geometry, args.radius, f, (args.tmin, args.tmax), cfg.tol)
    out = {"scale_factor": cfg.scale_factor, "gauge": f.source, "identity_residual": residual, **report.to_dict()}
    if cfg.geometry == HYPERBOLIC:
        ts = np.linspace(args.tmin, args.tmax, 25)
        out["G_samples_at_R"] = [
            [float(t), chart.evaluate(math.asinh(args.radius / sf.value(float(t))), float(t)).G] for t in ts
        ]
    _emit(cfg.out, dumps(out))
    if args.csv:
        _write_via_temp(args.csv, lambda p: write_sweep_csv(chart, grid, p))
    if args.curve_csv and report.curve is not None:
        _write_via_temp(args.curve_csv, lambda p: write_curve_csv(report.curve, p))
    return EXIT_INCONCLUSIVE if report.inconclusive else EXIT_OK


def cmd_divergence(args) -> int:
    rows = []
    for T in args.T:
        d_h = args.dh if args.dh is not None else T - args.tau0 - args.eps
        try:
            bound = distance_lower_bound(args.tau0, T, d_h).bound
            rows.append((T, d_h, bound, ""))
        except (FlrwError, ValueError) as exc:
            rows.append((T, d_h, "", str(exc)))
    _emit(args.out, _csv_text(["T", "d_h", "bound", "error"], rows))

    rng = np.random.default_rng(args.seed)
    curve = random_timelike_polyline(rng, n_vertices=args.points, spatial_dim=max(1, args.dim), tau0=args.tau0)
    worst = 0.0
    for j in range(1, curve.params.size):
        chord = float(np.linalg.norm(curve.points[j, 1:] - curve.points[0, 1:]))
        length = lorentzian_length(None, EUCLIDEAN, lift_path(curve, j))
        worst = max(worst, abs(length - distance_lower_bound(curve.params[0], curve.params[j], chord).bound))
    demo = {"seed": args.seed, "lifts": int(curve.params.size - 1), "max_length_vs_bound": worst}
    if args.report:
        write_atomic(args.report, dumps(demo))
    else:
        sys.stderr.write(dumps(demo))
    return EXIT_OK


# -- parser ------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, geometry_default: str = HYPERBOLIC) -> None:
    p.add_argument("-a", "--scale-factor", dest="scale_factor", help="scale factor a(t), e.g. 't + t^2'")
    p.add_argument("-g", "--geometry", choices=GEOMETRIES, default=geometry_default)
    p.add_argument("-d", "--dim", type=int, default=3, help="spatial dimension d (spacetime is d+1)")
    p.add_argument("--gauge", default=None, help="SSS gauge f(s), or Milne gauge constant b(1)")
    p.add_argument("--tol", type=float, default=1e-6, help="limit tolerance")
    p.add_argument("--grid", type=parse_grid, default=(20, 20), help="verification grid NxM")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", default=None, help="output file (default stdout)")
    p.add_argument("--config", default=None, help="key=value file with defaults for these flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flrwext",
        description="Classify FLRW scale factors and build or probe extensions through the big bang.",
        epilog="exit codes: 0 ok, 1 input error, 2 inconclusive limit, 3 hypothesis violation",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="open-FLRW and Milne-like conditions (JSON)")
    _common(p)
    p.add_argument("--tmax", type=float, default=100.0, help="upper end of the sampled range")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("curvature", help="scalar curvature sweep (CSV) with power-law fit")
    _common(p)
    p.add_argument("--tmin", type=float, default=1e-4)
    p.add_argument("--tmax", type=float, default=1.0)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--threshold", type=float, default=1e3, help="|R| above this flags a blow-up")
    p.add_argument("--report", default=None, help="JSON summary path (default stderr)")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("extend", help="build and verify an extension chart (JSON)")
    _common(p)
    p.add_argument("--chart", choices=("null2d", "milne"), default="milne")
    p.add_argument("--csv", default=None, help="chart sweep CSV")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("sss", help="strongly spherically symmetric chart diagnostics (JSON)")
    _common(p, EUCLIDEAN)
    p.add_argument("-R", "--radius", type=float, default=1.0, help="fixed areal radius for limits")
    p.add_argument("--tmin", type=float, default=0.01)
    p.add_argument("--tmax", type=float, default=2.0)
    p.add_argument("--csv", default=None, help="sweep CSV (r, t, T, R, F, G, J)")
    p.add_argument("--curve-csv", dest="curve_csv", default=None, help="degeneracy curve CSV (t, r*)")
    p.set_defaults(func=cmd_sss)

    p = sub.add_parser("divergence", help="future-divergence bound table (CSV)")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--tau0", type=float, default=0.0)
    p.add_argument("--T", type=parse_float_list, default=[1.0, 10.0, 100.0, 1000.0], help="comma-separated T")
    p.add_argument("--dh", type=float, default=None, help="fixed d_h instead of T - tau0 - eps")
    p.add_argument("-d", "--dim", type=int, default=3)
    p.add_argument("--points", type=int, default=20, help="vertices of the demonstration curve")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", default=None)
    p.add_argument("--report", default=None, help="JSON summary of the sampled-curve check")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_divergence)
    return parser


def _parse(parser: argparse.ArgumentParser, argv: Sequence[str] | None) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if args.config:
        values = read_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        defaults = {}
        for key, value in values.items():
            if key not in known:
                raise InputError(f"unknown config key {key!r}")
            action = known[key]
            defaults[key] = action.type(value) if action.type else value
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    if args.command != "divergence" and not args.scale_factor:
        raise InputError("a scale factor is required (-a or scale_factor in --config)")
    return args


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = _parse(parser, argv)
        return args.func(args)
    except HypothesisViolation as exc:
        sys.stderr.write(f"flrwext: hypothesis violation: {exc}\n")
        return EXIT_HYPOTHESIS
    except (FlrwError, ValueError, ArithmeticError, OSError) as exc:
        sys.stderr.write(f"flrwext: error: {exc}\n")
        return EXIT_INPUT
    except SystemExit as exc:  # argparse usage errors
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
