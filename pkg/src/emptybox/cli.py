"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error, 3 scale-guard refusal,
4 failed verification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import pointgen
from .approx_box import approx_max_empty_box
from .approx_cube import approx_max_empty_cube
from .bounds import (
    algorithm_count_bounds,
    bounds_Ad,
    bounds_Aprime,
    restricted_count_bounds,
)
from .core import (
    AffineTransform,
    EmptyBoxError,
    OpenBox,
    PointSet,
    ScaleGuardError,
    bounding_region,
    normalize_to_unit,
)
from .oracle import (
    DEFAULT_GUARDS,
    enumerate_restricted_boxes,
    exact_max_empty_box,
    exact_max_empty_cube,
    exact_max_empty_rect_2d,
)

SCHEMA = 1
SEED_ENV = "EMPTYBOX_SEED"
REGION_PAD = 0.01

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_GUARD = 3
EXIT_VERIFY = 4

GENERATORS = ("vdc", "halton", "restricted-lb", "grid", "uniform", "tight2", "tight4")


class DataError(EmptyBoxError, ValueError):
    """Malformed input file."""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- ingestion

def _parse_float(text: str, line: int, col: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise DataError(f"line {line}: field {col} is not a number: {text.strip()!r}") from None
    if not math.isfinite(v):
        raise DataError(f"line {line}: field {col} is not finite: {text.strip()!r}")
    return v


def parse_csv(text: str, dim: int | None = None) -> PointSet:
    """One point per line; an optional non-numeric header line is skipped."""
    rows = []
    width = dim
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if lineno == 1:
            try:
                [float(c) for c in row]
            except ValueError:
                continue  # header
        vals = [_parse_float(c, lineno, j + 1) for j, c in enumerate(row)]
        if width is None:
            width = len(vals)
        elif len(vals) != width:
            raise DataError(f"line {lineno}: expected {width} fields, got {len(vals)}")
        rows.append(vals)
    if width is None:
        raise DataError("no points and no dimension given")
    return PointSet(width, np.array(rows, dtype=np.float64).reshape(len(rows), width))


def parse_json(text: str) -> tuple[PointSet, OpenBox | None]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict) or "points" not in doc:
        raise DataError('JSON input must be an object with a "points" array')
    pts = doc["points"]
    dim = doc.get("dim")
    if not isinstance(pts, list):
        raise DataError('"points" must be an array')
    if dim is None:
        if not pts:
            raise DataError('empty "points" needs an explicit "dim"')
        dim = len(pts[0]) if isinstance(pts[0], list) else -1
    if not isinstance(dim, int) or dim < 1:
        raise DataError(f'"dim" must be a positive integer, got {dim!r}')
    rows = []
    for i, p in enumerate(pts):
        if not isinstance(p, list) or len(p) != dim:
            raise DataError(f"point {i}: expected {dim} coordinates, got {p!r}")
        row = []
        for j, v in enumerate(p):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise DataError(f"point {i}: coordinate {j} is not a finite number: {v!r}")
            row.append(float(v))
        rows.append(row)
    region = None
    if doc.get("region") is not None:
        reg = doc["region"]
        try:
            lo, hi = reg["lo"], reg["hi"]
        except (TypeError, KeyError):
            raise DataError('"region" must have "lo" and "hi" arrays') from None
        if len(lo) != dim or len(hi) != dim:
            raise DataError(f'"region" bounds must have {dim} entries')
        region = OpenBox(lo, hi)
    return PointSet(dim, np.array(rows, dtype=np.float64).reshape(len(rows), dim)), region


def ingest(path: str, fmt: str | None = None, dim: int | None = None) -> tuple[PointSet, OpenBox, bool]:
    """Read points and the enclosing region; returns ``(points, region, region_given)``.

    Without an explicit region the points' bounding box, widened by 1% of
    its extent per axis, is used.
    """
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise DataError(f"cannot read {path}: {exc.strerror}") from None
    if fmt is None:
        fmt = "json" if path.endswith(".json") or text.lstrip().startswith("{") else "csv"
    if fmt == "json":
        points, region = parse_json(text)
    else:
        points, region = parse_csv(text, dim), None
    if dim is not None and points.dim != dim:
        raise DataError(f"input is {points.dim}-dimensional but --dim is {dim}")
    given = region is not None
    if region is None:
        region = bounding_region(points, REGION_PAD)
    return points, region, given


def points_document(points: PointSet, region: OpenBox) -> dict:
    return {
        "dim": points.dim,
        "region": {"lo": list(region.lo), "hi": list(region.hi)},
        "points": points.tolist(),
    }


# ----------------------------------------------------------------- reports

@dataclass
class RunReport:
    command: str
    dimension: int
    n: int
    parameters: dict = field(default_factory=dict)
    region: dict | None = None
    result: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "dimension": self.dimension,
            "n": self.n,
            "parameters": self.parameters,
            "region": self.region,
            "result": self.result,
            "stats": self.stats,
            "bounds": self.bounds,
            "timing": self.timing,
        }


def _box_entry(box_unit: OpenBox, tr: AffineTransform) -> dict:
    box_in = tr.invert_box(box_unit)
    return {
        "unit": {"lo": list(box_unit.lo), "hi": list(box_unit.hi)},
        "input": {"lo": list(box_in.lo), "hi": list(box_in.hi)},
        "volume_unit": box_unit.volume(),
        "volume_input": box_in.volume(),
    }


def _clean_stats(stats: dict) -> tuple[dict, float | None]:
    stats = dict(stats)
    elapsed = stats.pop("elapsed", None)
    return stats, elapsed


def _bound_entry(rep, volume: float | None = None) -> dict:
    out = {"lower": rep.lower, "upper": rep.upper, "formulas": rep.formulas}
    if volume is not None:
        out["volume"] = volume
        out["at_least_lower"] = volume >= rep.lower
        out["below_upper"] = volume < rep.upper
    return out


# ------------------------------------------------------------------ commands

def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _require(args, name: str):
    v = getattr(args, name)
    if v is None:
        raise UsageError(f"--{name.replace('_', '-')} is required for {args.command}")
    return v


def _load(args):
    path = _require(args, "input")
    points, region, given = ingest(path, args.format, args.dim)
    if args.unique:
        points = points.unique()
    unit, tr = normalize_to_unit(points, region)
    return points, region, given, unit, tr


def cmd_gen(args) -> dict:
    gen = _require(args, "generator")
    seed = _seed(args)
    if gen == "vdc":
        points = pointgen.van_der_corput(_require(args, "n"))
    elif gen == "halton":
        points = pointgen.halton_hammersley(_require(args, "n"), _require(args, "dim"))
    elif gen == "restricted-lb":
        counts = _require(args, "counts")
        points = pointgen.embed_in_unit_cube(pointgen.restricted_lb_construction(len(counts), counts))
    elif gen == "grid":
        points = pointgen.grid_vertices(_require(args, "n"), _require(args, "dim"))
    elif gen == "uniform":
        points = pointgen.uniform_random(_require(args, "n"), _require(args, "dim"), seed)
    elif gen == "tight2":
        points = pointgen.known_tight_configs("two_point_xi")
    else:
        points = pointgen.known_tight_configs("four_point_quarter")
    return points_document(points, OpenBox.unit(points.dim))


def _approx(args, cube: bool) -> RunReport:
    started = time.perf_counter()
    eps = _require(args, "epsilon")
    if not 0.0 < eps < 1.0:
        raise UsageError(f"--epsilon must lie in (0, 1), got {eps}")
    seed = _seed(args)
    points, region, given, unit, tr = _load(args)
    jitter = not args.no_jitter
    if cube:
        res = approx_max_empty_cube(unit, eps, seed=seed, jitter=jitter)
    else:
        res = approx_max_empty_box(unit, eps, seed=seed, jitter=jitter, threads=args.threads)
    stats, elapsed = _clean_stats(res.stats)
    d = points.dim
    result = _box_entry(res.best_box, tr)
    result["exponents"] = list(res.exponents)
    result["anchor"] = list(res.anchor)
    n_used = len(unit)
    bounds = {}
    if cube:
        if n_used:
            bounds["A_prime_d"] = _bound_entry(bounds_Aprime(n_used, d), result["volume_unit"])
    else:
        bounds["A_d"] = _bound_entry(bounds_Ad(n_used, d), result["volume_unit"])
        if n_used:
            cb = algorithm_count_bounds(n_used, d, eps)
            entry = {
                "binomial": cb.upper,
                "observed": stats["canonical_boxes_enumerated"],
                "within_binomial": stats["canonical_boxes_enumerated"] <= cb.upper,
            }
            if "canonical_closed_form" in cb.extra:
                entry["closed_form"] = cb.extra["canonical_closed_form"]
                entry["placement_closed_form"] = cb.extra["placement_closed_form"]
                entry["observed_placements"] = stats["max_placements_per_grid"]
            bounds["canonical_count"] = entry
    return RunReport(
        args.command, d, len(points),
        parameters={"epsilon": eps, "epsilon_effective": res.params.epsilon_effective,
                    "seed": seed, "jitter": jitter, "m": res.params.m, "k": res.params.k,
                    "n_interior": n_used},
        region={"lo": list(region.lo), "hi": list(region.hi), "given": given},
        result=result, stats=stats, bounds=bounds,
        timing={"search_seconds": elapsed, "total_seconds": time.perf_counter() - started},
    )


def _exact(args, cube: bool) -> RunReport:
    started = time.perf_counter()
    points, region, given, unit, tr = _load(args)
    d = points.dim
    if cube:
        box, _ = exact_max_empty_cube(unit, force=args.force, guards=DEFAULT_GUARDS)
    elif d == 2:
        box, _ = exact_max_empty_rect_2d(unit)
    else:
        box, _ = exact_max_empty_box(unit, force=args.force, guards=DEFAULT_GUARDS)
    result = _box_entry(box, tr)
    n_used = len(unit)
    bounds = {}
    if cube:
        if n_used:
            bounds["A_prime_d"] = _bound_entry(bounds_Aprime(n_used, d), result["volume_unit"])
    else:
        bounds["A_d"] = _bound_entry(bounds_Ad(n_used, d), result["volume_unit"])
    return RunReport(
        args.command, d, len(points), parameters={"n_interior": n_used, "force": args.force},
        region={"lo": list(region.lo), "hi": list(region.hi), "given": given},
        result=result, bounds=bounds,
        timing={"total_seconds": time.perf_counter() - started},
    )


def cmd_restricted(args) -> RunReport:
    started = time.perf_counter()
    points, region, given, unit, tr = _load(args)
    d = points.dim
    boxes = enumerate_restricted_boxes(unit, force=args.force, guards=DEFAULT_GUARDS)
    rep = restricted_count_bounds(len(unit), d)
    result = {
        "count": len(boxes),
        "boxes": [_box_entry(b, tr) for b in boxes],
    }
    return RunReport(
        args.command, d, len(points), parameters={"n_interior": len(unit), "force": args.force},
        region={"lo": list(region.lo), "hi": list(region.hi), "given": given},
        result=result,
        bounds={"restricted_count": {"lower": rep.lower, "upper": rep.upper,
                                     "formulas": rep.formulas, "degenerate": rep.degenerate}},
        timing={"total_seconds": time.perf_counter() - started},
    )


def cmd_bounds(args) -> RunReport:
    started = time.perf_counter()
    n = _require(args, "n")
    d = _require(args, "dim")
    out = {"A_d": bounds_Ad(n, d).to_dict()}
    if n >= 1:
        out["A_prime_d"] = bounds_Aprime(n, d).to_dict()
    out["restricted_count"] = restricted_count_bounds(n, d).to_dict()
    if args.epsilon is not None:
        out["canonical_count"] = algorithm_count_bounds(n, d, args.epsilon).to_dict()
    return RunReport(args.command, d, n, parameters={"epsilon": args.epsilon}, bounds=out,
                     timing={"total_seconds": time.perf_counter() - started})


def cmd_verify(args) -> int:
    from .verify import Suite, run_all

    results = run_all(Suite())
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_VERIFY


# ------------------------------------------------------------------ output

def _text_report(rep: RunReport) -> str:
    lines = [f"{rep.command}: d={rep.dimension}, n={rep.n}"]
    for key, val in rep.parameters.items():
        lines.append(f"  {key}: {val}")
    res = rep.result
    if "unit" in res:
        lines.append(f"  box (unit):  lo={res['unit']['lo']} hi={res['unit']['hi']}")
        lines.append(f"  box (input): lo={res['input']['lo']} hi={res['input']['hi']}")
        lines.append(f"  volume: {res['volume_unit']:.12g} (unit), {res['volume_input']:.12g} (input)")
    if "count" in res:
        lines.append(f"  maximal empty boxes: {res['count']}")
    for key, val in rep.stats.items():
        lines.append(f"  {key}: {val}")
    for key, val in rep.bounds.items():
        lo = val.get("lower")
        hi = val.get("upper")
        if lo is not None:
            lines.append(f"  {key}: lower {lo:.6g}, upper {hi:.6g}")
        else:
            lines.append(f"  {key}: {val}")
    return "\n".join(lines)


def _points_text(doc: dict) -> str:
    return "\n".join(",".join(repr(v) for v in p) for p in doc["points"])


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="emptybox", description="Largest empty boxes and hypercubes among points.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, data=True):
        if data:
            sp.add_argument("--input", help="CSV or JSON point file ('-' for stdin)")
            sp.add_argument("--format", choices=("csv", "json"), help="input format (default: by extension)")
            sp.add_argument("--unique", action="store_true", help="drop duplicate points")
        sp.add_argument("--dim", type=int, help="dimension")
        sp.add_argument("--output", choices=("json", "text"), default="json")
        sp.add_argument("--seed", type=int, default=None,
                        help=f"random seed (default: ${SEED_ENV} or 0)")
        sp.add_argument("-v", "--verbose", action="store_true")

    g = sub.add_parser("gen", help="generate a point set")
    common(g, data=False)
    g.add_argument("--generator", choices=GENERATORS)
    g.add_argument("--n", type=int, help="number of points (grid: points per axis)")
    g.add_argument("--counts", type=lambda s: [int(v) for v in s.split(",")],
                   help="group sizes for restricted-lb, e.g. 3,4")

    for name, helptext in (("approx-box", "approximate largest empty box"),
                           ("approx-cube", "approximate largest empty hypercube")):
        a = sub.add_parser(name, help=helptext)
        common(a)
        a.add_argument("--epsilon", type=float)
        a.add_argument("--no-jitter", action="store_true", help="use epsilon exactly")
        a.add_argument("--threads", type=int, default=1)

    for name, helptext in (("exact-box", "exact largest empty box (small inputs)"),
                           ("exact-cube", "exact largest empty hypercube (small inputs)"),
                           ("restricted-count", "enumerate maximal empty boxes (small inputs)")):
        e = sub.add_parser(name, help=helptext)
        common(e)
        e.add_argument("--force", action="store_true", help="run beyond the scale guard")

    b = sub.add_parser("bounds", help="closed-form bounds")
    common(b, data=False)
    b.add_argument("--n", type=int)
    b.add_argument("--epsilon", type=float)

    v = sub.add_parser("verify", help="run the acceptance checks")
    v.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "gen":
            doc = cmd_gen(args)
            print(json.dumps(doc) if args.output == "json" else _points_text(doc))
            return EXIT_OK
        if args.command in ("approx-box", "approx-cube"):
            rep = _approx(args, args.command == "approx-cube")
        elif args.command in ("exact-box", "exact-cube"):
            rep = _exact(args, args.command == "exact-cube")
        elif args.command == "restricted-count":
            rep = cmd_restricted(args)
        else:
            rep = cmd_bounds(args)
    except UsageError as exc:
        print(f"emptybox: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScaleGuardError as exc:
        print(f"emptybox: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (EmptyBoxError, ValueError) as exc:
        print(f"emptybox: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(json.dumps(rep.to_dict()) if args.output == "json" else _text_report(rep))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
