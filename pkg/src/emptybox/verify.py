"""Acceptance checks shared by the ``verify`` command and the test suite.

Each ``criterion_*`` function returns a ``CriterionResult``. Instances used
by several checks (the random grid, the exact optima) are computed once per
``Suite`` and reused.
"""

from __future__ import annotations

import io
import json
import math
import time
from contextlib import redirect_stdout
from dataclasses import dataclass, field

from . import pointgen
from .approx_box import approx_max_empty_box
from .approx_cube import approx_max_empty_cube
from .bounds import algorithm_count_bounds, bounds_Aprime, restricted_count_bounds
from .core import OpenBox, PointSet
from .oracle import (
    enumerate_restricted_boxes,
    exact_max_empty_box,
    exact_max_empty_cube,
    exact_max_empty_rect_2d,
    is_maximal_empty,
)

TOL = 1e-12
GRID_DIMS = (2, 3)
GRID_SIZES = (4, 8, 12)
GRID_EPS = (0.1, 0.25, 0.5)
INSTANCES = 50
SEEDS = 5
VDC_SIZES = (8, 16, 32, 64, 128)
HALTON_EXACT = (8, 10, 12)
HALTON_APPROX = (64, 216)
HALTON_EPS = 0.1
RESTRICTED_CASES = ((2, (2, 2)), (2, (3, 3)), (3, (2, 2, 2)))


def instance_seed(d: int, n: int, i: int) -> int:
    """Seed of the ``i``-th random instance of the ``(d, n)`` grid cell."""
    return 1_000_000 * d + 1_000 * n + i


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0
    failures: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d}: {self.title} ({self.detail}; {self.seconds:.1f}s)"


@dataclass
class GridRun:
    d: int
    n: int
    index: int
    epsilon: float
    seed: int
    volume: float
    exact: float
    k: int
    canonical: int


class Suite:
    """Lazily computed instances and runs shared between criteria."""

    def __init__(self, instances: int = INSTANCES):
        self.instances = instances
        self._points: dict = {}
        self._exact_box: dict = {}
        self._exact_cube: dict = {}
        self._box_runs: list | None = None
        self._cube_runs: list | None = None
        self._vdc: dict = {}
        self._halton_exact: dict = {}

    def points(self, d: int, n: int, i: int) -> PointSet:
        key = (d, n, i)
        if key not in self._points:
            self._points[key] = pointgen.uniform_random(n, d, instance_seed(d, n, i))
        return self._points[key]

    def exact_box(self, d: int, n: int, i: int) -> float:
        key = (d, n, i)
        if key not in self._exact_box:
            self._exact_box[key] = exact_max_empty_box(self.points(d, n, i))[1]
        return self._exact_box[key]

    def exact_cube(self, d: int, n: int, i: int) -> float:
        key = (d, n, i)
        if key not in self._exact_cube:
            self._exact_cube[key] = exact_max_empty_cube(self.points(d, n, i))[1]
        return self._exact_cube[key]

    def _grid(self, solver, exact) -> list:
        runs = []
        for d in GRID_DIMS:
            for n in GRID_SIZES:
                for i in range(self.instances):
                    ps = self.points(d, n, i)
                    v_exact = exact(d, n, i)
                    for eps in GRID_EPS:
                        seed = i % SEEDS
                        res = solver(ps, eps, seed=seed)
                        runs.append(GridRun(d, n, i, eps, seed, res.volume, v_exact,
                                            res.params.k, res.stats["canonical_boxes_enumerated"]))
        return runs

    def box_runs(self) -> list:
        if self._box_runs is None:
            self._box_runs = self._grid(approx_max_empty_box, self.exact_box)
        return self._box_runs

    def cube_runs(self) -> list:
        if self._cube_runs is None:
            self._cube_runs = self._grid(approx_max_empty_cube, self.exact_cube)
        return self._cube_runs

    def vdc_exact(self, n: int) -> float:
        if n not in self._vdc:
            self._vdc[n] = exact_max_empty_rect_2d(pointgen.van_der_corput(n))[1]
        return self._vdc[n]

    def halton_exact(self, n: int) -> float:
        if n not in self._halton_exact:
            self._halton_exact[n] = exact_max_empty_box(pointgen.halton_hammersley(n, 3))[1]
        return self._halton_exact[n]


def _ratio_failures(runs) -> list:
    bad = []
    for r in runs:
        if not (1.0 - r.epsilon) * r.exact - TOL <= r.volume <= r.exact + TOL:
            bad.append(f"d={r.d} n={r.n} i={r.index} eps={r.epsilon}: {r.volume} vs exact {r.exact}")
    return bad


def _finish(number: int, title: str, failures: list, detail: str, started: float) -> CriterionResult:
    return CriterionResult(number, title, not failures, detail, time.perf_counter() - started, failures)


def _grid_detail(runs) -> str:
    worst = min(r.volume / r.exact for r in runs)
    return f"{len(runs)} runs, smallest approx/exact ratio {worst:.4f}"


def criterion_1(suite: Suite) -> CriterionResult:
    t = time.perf_counter()
    runs = suite.box_runs()
    return _finish(1, "approximate box within (1 - eps) of the exact optimum",
                   _ratio_failures(runs), _grid_detail(runs), t)


def criterion_2(suite: Suite) -> CriterionResult:
    t = time.perf_counter()
    runs = suite.cube_runs()
    return _finish(2, "approximate hypercube within (1 - eps) of the exact optimum",
                   _ratio_failures(runs), _grid_detail(runs), t)


def criterion_3(suite: Suite) -> CriterionResult:
    t = time.perf_counter()
    bad = []
    parts = []
    for n in VDC_SIZES:
        v = suite.vdc_exact(n)
        parts.append(f"n={n}: {v * n:.3f}/n")
        if not v < 4.0 / n:
            bad.append(f"n={n}: {v} >= {4.0 / n}")
    return _finish(3, "van der Corput largest empty rectangle below 4/n", bad, ", ".join(parts), t)


def criterion_4(suite: Suite) -> CriterionResult:
    t = time.perf_counter()
    bad = []
    parts = []
    for n in HALTON_EXACT:
        v = suite.halton_exact(n)
        parts.append(f"exact n={n}: {v * n:.3f}/n")
        if not v < 24.0 / n:
            bad.append(f"exact n={n}: {v} >= {24.0 / n}")
    for n in HALTON_APPROX:
        res = approx_max_empty_box(pointgen.halton_hammersley(n, 3), HALTON_EPS, seed=0)
        upper = res.volume / (1.0 - HALTON_EPS)
        parts.append(f"approx n={n}: {upper * n:.3f}/n")
        if not upper < 24.0 / n:
            bad.append(f"approx n={n}: {upper} >= {24.0 / n}")
    return _finish(4, "Halton-Hammersley largest empty box below 24/n (d = 3)", bad, ", ".join(parts), t)


def criterion_5(suite: Suite) -> CriterionResult:
    t = time.perf_counter()
    bad = []
    expected = {"two_point_xi": (3.0 - math.sqrt(5.0)) / 2.0, "four_point_quarter": 0.25}
    parts = []
    for name, want in expected.items():
        v = exact_max_empty_box(pointgen.known_tight_configs(name))[1]
        parts.append(f"{name}={v:.15f}")
        if abs(v - want) > TOL:
            bad.append(f"{name}: {v} != {want}")
    return _finish(5, "tight small configurations", bad, ", ".join(parts), t)


def criterion_6(suite: Suite) -> CriterionResult:
    t = time.perf_counter()
    bad = []
    checked = 0
    for d in GRID_DIMS:
        for n in GRID_SIZES:
            for i in range(suite.instances):
                checked += 1
                v = suite.exact_box(d, n, i)
                if v < 1.0 / (n + 1):
                    bad.append(f"d={d} n={n} i={i}: {v} < 1/(n+1)")
    for n in VDC_SIZES:
        checked += 1
        if suite.vdc_exact(n) < 1.0 / (n + 1):
            bad.append(f"van der Corput n={n}")
    for n in HALTON_EXACT:
        checked += 1
        if suite.halton_exact(n) < 1.0 / (n + 1):
            bad.append(f"Halton-Hammersley n={n}")
    return _finish(6, "exact optimum at least 1/(n+1)", bad, f"{checked} exact instances", t)


def criterion_7(suite: Suite) -> CriterionResult:
    t = time.perf_counter()
    bad = []
    for k in (1, 2, 3):
        v = exact_max_empty_cube(pointgen.grid_vertices(k, 2))[1]
        if abs(v - 1.0 / (k + 1) ** 2) > TOL:
            bad.append(f"k={k}: {v} != {1.0 / (k + 1) ** 2}")
    rep = bounds_Aprime(9, 2)
    if not (rep.lower == 1.0 / 16 and rep.upper == 1.0 / 16):
        bad.append(f"bounds for n=9, d=2: ({rep.lower}, {rep.upper})")
    return _finish(7, "empty hypercubes among grid vertices and their bounds", bad,
                   "k=1,2,3 and n=9", t)


def criterion_8(suite: Suite) -> CriterionResult:
    t = time.perf_counter()
    bad = []
    parts = []
    for d, counts in RESTRICTED_CASES:
        ps = pointgen.embed_in_unit_cube(pointgen.restricted_lb_construction(d, counts))
        count = len(enumerate_restricted_boxes(ps))
        rep = restricted_count_bounds(len(ps), d)
        parts.append(f"{counts}: {rep.lower:g} <= {count} <= {rep.upper:g}")
        if not rep.lower <= count <= rep.upper:
            bad.append(f"{counts}: {count} outside [{rep.lower}, {rep.upper}]")
    raw = pointgen.restricted_lb_construction(2, (3, 4))
    region = OpenBox((-5.0, -5.0), (5.0, 5.0))
    if not is_maximal_empty(OpenBox((-3.0, -3.0), (2.0, 3.0)), raw, region):
        bad.append("(-3,2)x(-3,3) is not maximal among the (3,4) construction")
    return _finish(8, "maximal empty box count between its bounds", bad, "; ".join(parts), t)


def criterion_9(suite: Suite, instances: int = 200, seed: int = 9) -> CriterionResult:
    import numpy as np

    from . import gridcount

    t = time.perf_counter()
    rng = np.random.default_rng(seed)
    bad = []
    for trial in range(instances):
        d = int(rng.integers(2, 5))
        n = int(rng.integers(0, 51))
        pts = rng.random((n, d))
        shape = tuple(int(v) for v in rng.integers(1, 7 if d < 4 else 5, size=d))
        grid = gridcount.GridSpec(tuple(1.0 / s for s in shape))
        sizes = tuple(int(rng.integers(1, s + 1)) for s in grid.extents)
        cells = gridcount.cell_counts(pts, grid)
        got = gridcount.all_box_counts(gridcount.corner_counts(cells), sizes).values
        raw = cells.values
        want = np.zeros_like(got)
        for j in np.ndindex(*got.shape):
            sl = tuple(slice(a, a + s) for a, s in zip(j, sizes))
            want[j] = raw[sl].sum()
        if not np.array_equal(got, want):
            bad.append(f"trial {trial}: d={d} n={n} shape={shape} window={sizes}")
    return _finish(9, "window counts equal direct counting", bad, f"{instances} random instances", t)


def criterion_10(suite: Suite) -> CriterionResult:
    t = time.perf_counter()
    bad = []
    for r in suite.box_runs():
        cap = math.comb(r.k + r.d, r.d)
        if r.canonical > cap:
            bad.append(f"d={r.d} n={r.n} i={r.index} eps={r.epsilon}: {r.canonical} > C(k+d,d)={cap}")
    ps = pointgen.uniform_random(100, 3, instance_seed(3, 100, 0))
    res = approx_max_empty_box(ps, 0.5, seed=0)
    rep = algorithm_count_bounds(100, 3, 0.5)
    canon = res.stats["canonical_boxes_enumerated"]
    place = res.stats["max_placements_per_grid"]
    if not canon <= rep.upper:
        bad.append(f"n=100: {canon} canonical boxes > C(k+d,d)={rep.upper:g}")
    if not canon <= rep.extra["canonical_closed_form"]:
        bad.append(f"n=100: {canon} canonical boxes > {rep.extra['canonical_closed_form']:.4g}")
    if not place <= rep.extra["placement_closed_form"]:
        bad.append(f"n=100: {place} placements > {rep.extra['placement_closed_form']:.4g}")
    detail = (f"n=100: {canon} boxes vs {rep.extra['canonical_closed_form']:.3g}, "
              f"{place} placements vs {rep.extra['placement_closed_form']:.3g}")
    return _finish(10, "search statistics within the counting bounds", bad, detail, t)


def _run_cli(argv) -> tuple[int, str]:
    from .cli import main

    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


def strip_timing(report: dict) -> dict:
    """A report without its wall-clock fields."""
    return {k: v for k, v in report.items() if k != "timing"}


def criterion_11(suite: Suite, workdir=None) -> CriterionResult:
    import tempfile
    from pathlib import Path

    t = time.perf_counter()
    bad = []
    with tempfile.TemporaryDirectory(dir=workdir) as tmp:
        path = Path(tmp) / "points.json"
        code, text = _run_cli(["gen", "--generator", "uniform", "--n", "40", "--dim", "3",
                               "--seed", "11", "--output", "json"])
        if code != 0:
            bad.append(f"gen exited with {code}")
        path.write_text(text)
        outputs = []
        for threads in (1, 2, 4):
            code, text = _run_cli(["approx-box", "--input", str(path), "--epsilon", "0.25",
                                   "--seed", "7", "--threads", str(threads), "--output", "json"])
            if code != 0:
                bad.append(f"approx-box --threads {threads} exited with {code}")
            outputs.append(json.dumps(strip_timing(json.loads(text)), sort_keys=False))
        if len(set(outputs)) != 1:
            bad.append("reports differ between thread counts")
    return _finish(11, "reports identical across thread counts", bad, "threads 1, 2, 4", t)


CRITERIA = (
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
    criterion_7, criterion_8, criterion_9, criterion_10, criterion_11,
)


def run_all(suite: Suite | None = None, echo=print) -> list[CriterionResult]:
    suite = suite or Suite()
    results = []
    for fn in CRITERIA:
        res = fn(suite)
        results.append(res)
        if echo is not None:
            echo(res.line())
            for f in res.failures[:5]:
                echo(f"    {f}")
    return results
