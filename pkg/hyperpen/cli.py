"""Command line entry point, ``hyperpen <command> <action> [flags]``.

Every action produces a list of report rows. The process exits 0 when every
row passes, 1 when a check fails or a library error is raised, and 2 on usage
errors (argparse).
"""
import argparse
import json
import sys
import time
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from . import __version__, constants, dioph, engine, heis, lemmas, scene
from .entities import (
    INFINITY,
    Boundary,
    HeisPoint,
    ObstacleFamily,
    Point,
    QMat2,
    ReportRow,
    body_converter,
)
from .enums import Model, PenKind, Ring
from .exceptions import HyperpenException
from .penetration import check_family
from .utils import as_json_dict

logger = structlog.get_logger()

DEFAULT_SEED = 0
DEFAULT_WINDOW = "-1,2"
Result = Tuple[List[ReportRow], Dict[str, Any]]


def configure_logging(verbose: bool = False) -> None:
    """Render structlog events to stderr, keeping stdout for tables and JSON."""
    level = 10 if verbose else 30
    structlog.configure(
        processors=[
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(level),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


# argument parsing helpers


def _floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma separated numbers, got {!r}".format(text))


def _eps_arg(text: str) -> Any:
    if text.strip().lower() in ("inf", "infinity"):
        return INFINITY
    return float(text)


def _point_arg(text: str) -> Point:
    """``x,y`` in the half-plane or ``x,y,z`` in the upper half-space."""
    values = _floats(text)
    if len(values) == 2:
        return Point(values[0], values[1])
    if len(values) == 3:
        return Point(complex(values[0], values[1]), values[2])
    raise argparse.ArgumentTypeError("a point needs 2 or 3 coordinates, got {!r}".format(text))


def _boundary_arg(text: str) -> Boundary:
    """``inf``, ``re`` or ``re,im``."""
    if text.strip().lower() in ("inf", "infinity"):
        return INFINITY
    values = _floats(text)
    if len(values) == 1:
        return complex(values[0])
    if len(values) == 2:
        return complex(values[0], values[1])
    raise argparse.ArgumentTypeError("a boundary point is inf, re or re,im, got {!r}".format(text))


def _window_arg(text: str) -> Tuple[float, float]:
    values = _floats(text)
    if len(values) != 2 or not values[0] < values[1]:
        raise argparse.ArgumentTypeError("a window is lo,hi with lo < hi, got {!r}".format(text))
    return values[0], values[1]


def _complex_arg(text: str) -> complex:
    values = _floats(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError("expected re,im, got {!r}".format(text))
    return complex(values[0], values[1])


def _matrix_arg(text: str) -> QMat2:
    """Sixteen numbers, the quaternion entries a, b, c, d in order."""
    values = _floats(text.replace(";", ","))
    if len(values) != 16:
        raise argparse.ArgumentTypeError("a quaternion matrix needs 16 numbers, got {}".format(len(values)))
    return QMat2(values[0:4], values[4:8], values[8:12], values[12:16])


def load_obstacles(spec: str, delta0: float = 0.0, designated: Optional[int] = None) -> ObstacleFamily:
    """``ford:Q`` (rational Ford circles up to denominator Q) or a JSON file of obstacle records."""
    if spec.startswith("ford:"):
        bound = int(spec[5:])
        fam = dioph.ford_family(bound, Ring.RATIONAL, (complex(-1, 0), complex(2, 0)))
        obstacles = fam.as_obstacles(delta0)
        if designated is not None:
            return ObstacleFamily(obstacles.bodies, delta0, designated, obstacles.note)
        return obstacles
    with open(spec) as f:
        records = json.load(f)
    bodies = [body_converter(r) for r in records]
    logger.info("obstacles_loaded", path=spec, count=len(bodies))
    return ObstacleFamily(bodies, delta0=delta0, designated_index=designated, note=spec)


def _write_svg(path: Optional[str], fam: ObstacleFamily, geodesics, window: Tuple[float, float]) -> None:
    if not path:
        return
    with open(path, "w") as f:
        f.write(scene.render(fam.bodies, geodesics, window))
    logger.info("svg_written", path=path)


def _trace_rows(trace) -> List[ReportRow]:
    converged = trace.checks["converged"]
    return [ReportRow("steps", len(trace.steps)), ReportRow("converged", str(converged), passed=converged)]


# commands


def cmd_constants(args: argparse.Namespace) -> Result:
    if args.action == "audit":
        return constants.audit(), {}
    p = constants.params_for(args.eps, args.delta, args.kappa)
    return constants.table(p), {"params": p.as_dict()}


def cmd_lemmas(args: argparse.Namespace) -> Result:
    if args.action == "list":
        return [ReportRow(lemma_id, lemmas.REGISTRY[lemma_id].statement) for lemma_id in lemmas.lemma_ids()], {}
    ids = args.id or lemmas.lemma_ids()
    reports = [lemmas.check_inequality(i, args.trials, args.seed, args.dim) for i in ids]
    rows = [ReportRow(r.lemma, r.violations, 0.0, 0.0) for r in reports]
    return rows, {"reports": [r.as_dict() for r in reports]}


def cmd_uncloud(args: argparse.Namespace) -> Result:
    fam = load_obstacles(args.obstacles)
    source = args.source if args.source is not None else args.start
    trace = engine.uncloud(fam, source, args.mu1, args.horizon, args.max_iter, args.endpoint)
    checks = trace.checks
    mu5 = checks["avoidance_radius"]
    rows = _trace_rows(trace) + [
        ReportRow("avoidance_radius", mu5, passed=mu5 <= constants.MU0),
        ReportRow("max_depth", checks["max_depth"], passed=checks["avoids"]),
        ReportRow("min_entry_gap", min(checks["entry_gaps"], default=0.0), passed=checks["gaps_ok"]),
        ReportRow("cauchy_excess", checks["cauchy_excess"], passed=checks["cauchy_ok"]),
    ]
    _write_svg(args.svg, fam, [s.geodesic for s in trace.steps], args.window)
    return rows, {"trace": trace.as_dict() if args.trace else None, "warnings": list(trace.warnings)}


def _prescribe_inputs(args: argparse.Namespace) -> engine.DeskInstance:
    if args.desk == "ford":
        return engine.ford_prescribe_instance(h=args.h if args.h is not None else 7.0, horizon=args.horizon)
    if args.desk == "ball":
        return engine.ball_prescribe_instance(h=args.h if args.h is not None else 110.0)
    if args.obstacles is None or args.h is None:
        raise HyperpenException("prescribe needs --obstacles and --h, or a --desk instance")
    fam = load_obstacles(args.obstacles, args.delta, args.target)
    source = args.source if args.source is not None else args.start
    if source is None:
        raise HyperpenException("prescribe needs --start or --from")
    return engine.DeskInstance(
        family=fam,
        source=source,
        horizon=args.horizon,
        kind=PenKind(args.f0),
        h=args.h,
        params=constants.params_for(args.eps, args.delta, args.kappa),
        endpoint=args.endpoint,
    )


def cmd_prescribe(args: argparse.Namespace) -> Result:
    inst = _prescribe_inputs(args)
    run = engine.prescribe_line if args.line else engine.prescribe
    trace = run(
        inst.family,
        inst.kind,
        inst.h,
        inst.params,
        inst.source,
        horizon=inst.horizon,
        max_iter=args.max_iter,
        h0_prime=args.h0_prime,
        endpoint=args.endpoint if args.endpoint is not None else inst.endpoint,
        model=Model(args.model),
    )
    checks = trace.checks
    rows = _trace_rows(trace) + [
        ReportRow("f0", checks["f0"], inst.h, engine.REPORT_TOL),
        ReportRow("max_length", checks["max_length"], passed=checks["bound_ok"]),
        ReportRow("h1_prime", checks["h1_prime"]),
        ReportRow("min_entry_gap", min(checks["entry_gaps"], default=0.0), passed=checks["gaps_ok"]),
    ]
    if args.line:
        rows.append(ReportRow("two_sided_max", checks["two_sided_max"], passed=checks["two_sided_ok"]))
    for warning in trace.warnings:
        logger.warning("prescribe_warning", message=warning)
    _write_svg(args.svg, inst.family, [s.geodesic for s in trace.steps], args.window)
    return rows, {"trace": trace.as_dict() if args.trace else None, "warnings": list(trace.warnings)}


def cmd_dioph(args: argparse.Namespace) -> Result:
    if args.action == "constant":
        if args.complex is not None:
            c = dioph.complex_approx_constant(args.complex, args.qmax)
            return [ReportRow("complex_approx_constant", c), ReportRow("height", dioph.spectrum_map(c))], {}
        e = dioph.parse_cf(args.x)
        rows = []
        if e.is_periodic:
            c = dioph.approx_constant(e)
            rows += [ReportRow("approx_constant", c), ReportRow("height", dioph.spectrum_map(c))]
        q_lo = min(1000, max(1, args.qmax // 10))
        rows.append(ReportRow("window_minimum", dioph.approx_constant_bruteforce(dioph.cf_value(e), q_lo, args.qmax)))
        return rows, {"cf": e.as_dict()}
    if args.action == "limsup":
        res = engine.limsup_prescribe(args.target, args.budget)
        rows = [
            ReportRow("achieved_limsup", res.achieved_limsup, args.target, args.tol),
            ReportRow("non_peak_max", res.non_peak_max, passed=res.non_peak_max < args.target),
            ReportRow("peaks", len(res.peaks)),
        ]
        return rows, {"digits": list(res.cf_digits)}
    if args.action == "excursions":
        heights = dioph.excursions(args.x, args.horizon)
        rows = [ReportRow("excursion_{}".format(n), v) for n, v in enumerate(heights, start=1)]
        rows.append(ReportRow("limsup_estimate", dioph.limsup_estimate(heights)))
        return rows, {}
    fam = dioph.ford_family(args.bound, Ring(args.ring))
    gap = check_family(fam.as_obstacles())
    return [ReportRow("count", fam.count), ReportRow("min_gap", gap, passed=gap >= -1e-12)], {}


def cmd_heis(args: argparse.Namespace) -> Result:
    if args.action in ("dist", "tangency"):
        p = HeisPoint([args.zeta], args.v)
        if args.action == "dist":
            value = heis.cygan_mod_norm(p) if args.modified else heis.cygan_norm(p)
            return [ReportRow("cygan_mod" if args.modified else "cygan", value)], {}
        s = heis.tangency_s(p)
        return [ReportRow("s", s), ReportRow("discriminant", heis.tangency_discriminant(p, s), 0.0, 1e-9)], {}
    if args.action == "h5-dist":
        # default: the inversion z -> -1/z
        m = args.matrix or QMat2(0, -1, 1, 0)
        closed = heis.horoball_dist_h5(m, args.s)
        return [
            ReportRow("dieudonne", heis.dieudonne(m), 1.0, 1e-9),
            ReportRow("distance", closed),
            ReportRow("distance_direct", heis.horoball_dist_h5_direct(m, args.s), closed, 1e-9),
        ], {}
    res = heis.eq35_sign(np.random.default_rng(args.seed), args.samples)
    rows = [
        ReportRow("plus", res["plus"]),
        ReportRow("minus", res["minus"]),
        ReportRow("uniform_sign", ",".join(str(s) for s in res["uniform"]) or "none", passed=bool(res["uniform"])),
    ]
    return rows, {}


# parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="print one JSON object instead of a table")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--verbose", action="store_true", help="log debug events to stderr")


def _add_construction(p: argparse.ArgumentParser) -> None:
    p.add_argument("--start", type=_point_arg, default=None, help="interior source point x,y[,z]")
    p.add_argument("--from", dest="source", type=_boundary_arg, default=None, help="boundary source inf|re[,im]")
    p.add_argument("--endpoint", type=_boundary_arg, default=None)
    p.add_argument("--horizon", type=float, default=engine.DEFAULT_HORIZON)
    p.add_argument("--max-iter", type=int, default=engine.DEFAULT_MAX_ITER)
    p.add_argument("--svg", default=None, help="write the planar scene to this file")
    p.add_argument("--window", type=_window_arg, default=_window_arg(DEFAULT_WINDOW))
    p.add_argument("--trace", action="store_true", help="include the step trace in the JSON output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperpen", description="Penetration properties and geodesic constructions in hyperbolic space.")
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command")
    commands.required = True

    p = commands.add_parser("constants", help="constant calculus")
    p.add_argument("action", choices=["audit", "table"])
    p.add_argument("--eps", type=_eps_arg, default=INFINITY)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--kappa", type=float, default=constants.C1_PRIME_INF)
    _add_common(p)
    p.set_defaults(func=cmd_constants)

    p = commands.add_parser("lemmas", help="randomised inequality checks")
    p.add_argument("action", choices=["check", "list"])
    p.add_argument("--id", action="append", default=None)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--dim", type=int, choices=[2, 3], default=3)
    _add_common(p)
    p.set_defaults(func=cmd_lemmas)

    p = commands.add_parser("uncloud", help="geodesics avoiding a family of bodies")
    p.add_argument("--obstacles", default="ford:40")
    p.add_argument("--mu1", type=float, default=1.042)
    _add_construction(p)
    p.set_defaults(start=_point_arg("0.5,0.9"))
    _add_common(p)
    p.set_defaults(func=cmd_uncloud)

    p = commands.add_parser("prescribe", help="geodesics with a prescribed penetration")
    p.add_argument("--model", choices=[m.value for m in Model], default=Model.H3.value)
    p.add_argument("--desk", choices=["ford", "ball"], default=None)
    p.add_argument("--obstacles", default=None)
    p.add_argument("--target", type=int, default=0, help="index of the designated body")
    p.add_argument("--f0", choices=["ph", "ipp", "ftp"], default="ph")
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--h0-prime", type=float, default=None)
    p.add_argument("--eps", type=_eps_arg, default=INFINITY)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--kappa", type=float, default=constants.C1_PRIME_INF)
    p.add_argument("--line", action="store_true", help="two passes, a geodesic line")
    _add_construction(p)
    _add_common(p)
    p.set_defaults(func=cmd_prescribe)

    p = commands.add_parser("dioph", help="continued fractions and Ford families")
    p.add_argument("action", choices=["constant", "limsup", "excursions", "ford"])
    p.add_argument("--x", default="sqrt:2", help="cf:a0,a1,...|sqrt:D|float")
    p.add_argument("--qmax", type=int, default=10 ** 5)
    p.add_argument("--complex", type=_complex_arg, default=None)
    p.add_argument("--target", type=float, default=8.0)
    p.add_argument("--budget", type=int, default=400)
    p.add_argument("--tol", type=float, default=0.15)
    p.add_argument("--horizon", type=int, default=40)
    p.add_argument("--bound", type=int, default=10)
    p.add_argument("--ring", choices=[r.value for r in Ring], default=Ring.RATIONAL.value)
    _add_common(p)
    p.set_defaults(func=cmd_dioph)

    p = commands.add_parser("heis", help="complex and quaternionic hyperbolic space")
    p.add_argument("action", choices=["dist", "tangency", "h5-dist", "eq35"])
    p.add_argument("--zeta", type=_complex_arg, default=complex(1, 0))
    p.add_argument("--v", type=float, default=0.0)
    p.add_argument("--modified", action="store_true")
    p.add_argument("--matrix", type=_matrix_arg, default=None, help="16 numbers, the quaternions a, b, c, d")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=1000)
    _add_common(p)
    p.set_defaults(func=cmd_heis)
    return parser


def _format_value(v: Any) -> str:
    if isinstance(v, float):
        return "{:.6g}".format(v)
    return str(v)


def render_table(rows: Sequence[ReportRow]) -> str:
    header = ("name", "computed", "expected", "tol", "pass")
    lines = [header] + [
        (
            r.name,
            _format_value(r.computed),
            "" if r.expected is None else _format_value(r.expected),
            "" if r.tol is None else _format_value(r.tol),
            "" if r.passed is None else ("ok" if r.passed else "FAIL"),
        )
        for r in rows
    ]
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip() for line in lines) + "\n"


def render_json(rows: Sequence[ReportRow], details: Dict[str, Any], seed: int, runtime_ms: float) -> str:
    out = {
        "rows": [r.as_dict() for r in rows],
        "meta": {"seed": seed, "version": __version__, "runtime_ms": round(runtime_ms, 3)},
    }
    details = {k: v for k, v in details.items() if v is not None}
    if details:
        out["details"] = details
    return json.dumps(as_json_dict(out), sort_keys=True) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    handler: Callable[[argparse.Namespace], Result] = args.func
    started = time.perf_counter()
    try:
        rows, details = handler(args)
    except (HyperpenException, OSError, ValueError) as e:
        logger.error("command_failed", command=args.command, error=type(e).__name__)
        sys.stderr.write("error: {}\n".format(e))
        return 1
    runtime_ms = (time.perf_counter() - started) * 1000.0
    if args.json:
        sys.stdout.write(render_json(rows, details, args.seed, runtime_ms))
    else:
        sys.stdout.write(render_table(rows))
    ok = all(r.passed is not False for r in rows)
    logger.info("command_done", command=args.command, ok=ok, rows=len(rows))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
