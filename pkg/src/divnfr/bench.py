"""Scenario sweeps, cost/entropy trade-off curves and report tables.

Every optimized row is expressed relative to the baseline recommender of
the same scenario (``100 * value / baseline value``).  When the baseline
value is zero the percentage is reported as 100 by convention.
"""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from importlib import resources
from pathlib import Path

import numpy as np

from .baseline import baseline_for_scenario
from .catalog import DEFAULT_DENSITY, load_scenario, parse_scenario, synth_relevance
from .errors import SolverStatusError
from .optimizer import (FairnessSpec, build_diverse_lp, build_fair_diverse_lp,
                        build_fair_lp, build_nfr_lp, make_cuts, solve_and_recover,
                        validate_solution)


@dataclass
class SweepRow:
    scenario: str
    tag: str
    b: float
    c_f: float
    kind: str
    status: str
    cost: float
    cost_pct: float
    entropy: float
    entropy_pct: float
    claimed_entropy: float
    entropy_gap: float
    valid: bool
    iterations: int
    solve_time: float = 0.0


CSV_FIELDS = [f.name for f in fields(SweepRow) if f.name != "solve_time"]


def percent(value, reference):
    if reference == 0.0:
        return 100.0
    return 100.0 * value / reference


def _tag(kind, b, c_f):
    if kind == "none":
        return f"Diverse(b={b:g})"
    if b == 0.0:
        return f"Fair-{kind}(cf={c_f:g})"
    return f"FairDiverse-{kind}(b={b:g},cf={c_f:g})"


class SweepResult:
    def __init__(self, rows=None):
        self.rows = list(rows or [])

    def extend(self, other):
        self.rows.extend(other.rows)
        return self

    def scenarios(self):
        seen = []
        for r in self.rows:
            if r.scenario not in seen:
                seen.append(r.scenario)
        return seen

    def select(self, scenario=None, prefix=None):
        return [r for r in self.rows
                if (scenario is None or r.scenario == scenario)
                and (prefix is None or r.tag.startswith(prefix))]

    def bsr(self, scenario):
        (row,) = [r for r in self.rows if r.scenario == scenario and r.tag == "BSR"]
        return row

    def to_csv(self, path=None, timing=False):
        """Serialize; with ``path`` the file is written atomically.

        Wall-clock times are left out unless ``timing`` is set, so equal
        inputs give byte-identical files.
        """
        cols = CSV_FIELDS + (["solve_time"] if timing else [])
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            rec = asdict(r)
            w.writerow([_fmt(rec[c]) for c in cols])
        text = buf.getvalue()
        if path is not None:
            atomic_write(path, text)
        return text

    @classmethod
    def from_csv(cls, path):
        rows = []
        with Path(path).open(newline="") as fh:
            for rec in csv.DictReader(fh):
                rows.append(SweepRow(
                    scenario=rec["scenario"], tag=rec["tag"], b=float(rec["b"]),
                    c_f=float(rec["c_f"]), kind=rec["kind"], status=rec["status"],
                    cost=float(rec["cost"]), cost_pct=float(rec["cost_pct"]),
                    entropy=float(rec["entropy"]), entropy_pct=float(rec["entropy_pct"]),
                    claimed_entropy=float(rec["claimed_entropy"]),
                    entropy_gap=float(rec["entropy_gap"]), valid=rec["valid"] == "1",
                    iterations=int(rec["iterations"]),
                    solve_time=float(rec.get("solve_time") or 0.0)))
        return cls(rows)


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return "nan" if math.isnan(v) else f"{v:.12g}"
    return str(v)


def atomic_write(path, text):
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def scenario_id(cfg):
    return (f"K{cfg.K}_N{cfg.N}_C{cfg.C}_a{cfg.alpha:g}_pop{cfg.pop:g}"
            f"_q{cfg.q:g}_s{cfg.seed}")


def scenario_relevance(cfg, density=DEFAULT_DENSITY):
    """Synthetic relevance matrix tied to the scenario seed."""
    return synth_relevance(cfg.K, density, cfg.seed)


def _solved_row(sid, tag, b, c_f, kind, lp, profile, cfg, fair, cuts, diverse, backend):
    t0 = time.perf_counter()
    try:
        sol = solve_and_recover(lp, profile, cfg, backend=backend)
    except SolverStatusError as exc:
        nan = math.nan
        return SweepRow(sid, tag, b, c_f, kind, exc.status, nan, nan, nan, nan, nan, nan,
                        False, exc.report.iterations if exc.report else 0,
                        time.perf_counter() - t0), None
    elapsed = time.perf_counter() - t0
    report = validate_solution(sol, profile, cfg.replace(b=b), fair=fair,
                               cuts=cuts, diverse=diverse)
    claimed = sol.claimed_entropy if diverse else sol.realized_entropy
    gap = sol.entropy_gap if diverse else 0.0
    row = SweepRow(
        sid, tag, b, c_f, kind, "optimal", sol.cost,
        percent(sol.cost, profile.cost_bs), sol.realized_entropy,
        percent(sol.realized_entropy, profile.entropy_bs), claimed, gap,
        report.ok, sol.iterations, elapsed)
    return row, sol


def run_scenario(cfg, U=None, b_list=None, cf_list=None, kinds=None,
                 backend="highs", sid=None):
    """Baseline, plain NFR, Diverse-NFR at each ``b``, and optionally
    Fair-NFR / Fair-Diverse-NFR rows for each fairness kind and bound.

    Solver failures are recorded as rows with a non-optimal status; the
    sweep carries on.
    """
    if U is None:
        U = scenario_relevance(cfg)
    sid = sid or scenario_id(cfg)
    b_list = [cfg.b] if b_list is None else list(b_list)
    if kinds is None:
        kinds = [] if cfg.fairness_kind == "none" else [cfg.fairness_kind]
    cf_list = [cfg.c_f] if cf_list is None else list(cf_list)
    profile = baseline_for_scenario(cfg, U)
    cuts = make_cuts(cfg.cut_mode, cfg.M_cuts)

    rows = [SweepRow(sid, "BSR", 1.0, math.inf, "none", "optimal", profile.cost_bs, 100.0,
                     profile.entropy_bs, 100.0, profile.entropy_bs, 0.0, True, 0)]
    nfr = build_nfr_lp(profile, cfg)
    rows.append(_solved_row(sid, "NFR", 0.0, math.inf, "none", nfr, profile, cfg,
                            None, None, False, backend)[0])
    for b in b_list:
        c = cfg.replace(b=b)
        lp = build_diverse_lp(profile, c, cuts=cuts)
        rows.append(_solved_row(sid, _tag("none", b, 0.0), b, math.inf, "none", lp,
                                profile, c, None, cuts, True, backend)[0])
    for kind in kinds:
        for c_f in cf_list:
            fair = FairnessSpec(kind, c_f)
            lp = build_fair_lp(profile, cfg, fair=fair)
            rows.append(_solved_row(sid, _tag(kind, 0.0, c_f), 0.0, c_f, kind, lp,
                                    profile, cfg, fair, None, False, backend)[0])
            for b in b_list:
                if b == 0.0:
                    continue
                c = cfg.replace(b=b)
                lp = build_fair_diverse_lp(profile, c, cuts=cuts, fair=fair)
                rows.append(_solved_row(sid, _tag(kind, b, c_f), b, c_f, kind, lp,
                                        profile, c, fair, cuts, True, backend)[0])
    return SweepResult(rows)


def compare_fairness(cfg, U, b_list, cf_list, kinds, backend="highs"):
    """Diverse-NFR curve over ``b_list`` next to Fair-NFR curves over
    ``cf_list`` and Fair-Diverse-NFR curves for every (kind, c_f)."""
    return run_scenario(cfg, U, b_list=b_list, cf_list=cf_list, kinds=kinds,
                        backend=backend)


def _run_one(args):
    text, b_list, cf_list, kinds, backend = args
    cfg = parse_scenario(text)
    return run_scenario(cfg, None, b_list, cf_list, kinds, backend).rows


def sweep(configs, b_list=None, cf_list=None, kinds=None, backend="highs", jobs=1):
    """Run several scenarios (each with its synthetic relevance matrix).

    With ``jobs > 1`` scenarios run in worker processes; rows come back in
    input order either way.
    """
    tasks = [(cfg.to_text(), b_list, cf_list, kinds, backend) for cfg in configs]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_run_one, tasks))
    else:
        parts = [_run_one(t) for t in tasks]
    return SweepResult([row for part in parts for row in part])


# --- curves ---------------------------------------------------------------


def tradeoff_curve(result, scenario=None, prefix="Diverse"):
    """``(cost_pct, entropy_pct, tag)`` points: the NFR point, the rows with
    ``prefix`` ordered by ``b`` (then ``c_f``), and the baseline at
    (100, 100).  Non-optimal rows are skipped."""
    scenario = scenario or result.scenarios()[0]
    pts = []
    nfr = [r for r in result.select(scenario) if r.tag == "NFR" and r.status == "optimal"]
    pts.extend((r.cost_pct, r.entropy_pct, r.tag) for r in nfr)
    chosen = [r for r in result.select(scenario, prefix) if r.status == "optimal"]
    chosen.sort(key=lambda r: (r.b, -r.c_f if prefix.startswith("Fair-") else 0.0))
    pts.extend((r.cost_pct, r.entropy_pct, r.tag) for r in chosen)
    bsr = result.bsr(scenario)
    pts.append((bsr.cost_pct, bsr.entropy_pct, "BSR"))
    return pts


def curve_csv(points, path=None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["cost_pct", "entropy_pct", "tag"])
    for x, y, tag in points:
        w.writerow([f"{x:.6f}", f"{y:.6f}", tag])
    if path is not None:
        atomic_write(path, buf.getvalue())
    return buf.getvalue()


def is_concave(points, tol=1e-6, min_dx=1e-6):
    """Discrete concavity of a curve given as ``(x, y, ...)`` points.

    Points closer than ``min_dx`` in ``x`` are merged (keeping the higher
    ``y``); consecutive slopes must then be non-increasing up to ``tol``.
    """
    xy = sorted((float(p[0]), float(p[1])) for p in points)
    merged = []
    for x, y in xy:
        if merged and x - merged[-1][0] < min_dx:
            merged[-1] = (merged[-1][0], max(merged[-1][1], y))
        else:
            merged.append((x, y))
    slopes = [(y2 - y1) / (x2 - x1) for (x1, y1), (x2, y2) in zip(merged, merged[1:])]
    return all(s2 <= s1 + tol * max(1.0, abs(s1)) for s1, s2 in zip(slopes, slopes[1:]))


def interpolate_entropy(points, cost):
    """Entropy of a curve at ``cost`` by linear interpolation; ``nan``
    outside its cost range."""
    xy = sorted((float(p[0]), float(p[1])) for p in points)
    xs = np.array([p[0] for p in xy])
    ys = np.array([p[1] for p in xy])
    if cost < xs[0] - 1e-9 or cost > xs[-1] + 1e-9:
        return math.nan
    # upper envelope at repeated x
    ux, uy = [], []
    for x, y in zip(xs, ys):
        if ux and abs(x - ux[-1]) < 1e-9:
            uy[-1] = max(uy[-1], y)
        else:
            ux.append(x)
            uy.append(y)
    return float(np.interp(cost, ux, uy))


# --- report ---------------------------------------------------------------


def format_report(result):
    """Text table: one block per scenario with cost, cost % of baseline,
    entropy and entropy % of baseline (percentages rounded to integers)."""
    lines = []
    header = f"{'scenario':<34} {'RS':<30} {'cost':>8} {'cost%':>6} {'entropy':>8} {'ent%':>5} {'ok':>3}"
    for sid in result.scenarios():
        lines.append(header)
        lines.append("=" * len(header))
        for r in result.select(sid):
            if r.status != "optimal":
                lines.append(f"{sid:<34} {r.tag:<30} {r.status:>32}")
                continue
            lines.append(
                f"{sid:<34} {r.tag:<30} {r.cost:8.3f} {r.cost_pct:6.0f} "
                f"{r.entropy:8.3f} {r.entropy_pct:5.0f} {'y' if r.valid else 'n':>3}")
        lines.append("")
    return "\n".join(lines)


# --- bundled scenarios ----------------------------------------------------


def bundled_scenarios():
    """Names of the scenario files shipped with the package."""
    root = resources.files("divnfr") / "data" / "scenarios"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".txt"))


def load_bundled(name):
    root = resources.files("divnfr") / "data" / "scenarios"
    return parse_scenario((root / name).read_text())


def bundled_path(name):
    return Path(str(resources.files("divnfr") / "data" / "scenarios" / name))


__all__ = [
    "SweepResult", "SweepRow", "atomic_write", "bundled_scenarios", "compare_fairness",
    "curve_csv", "format_report", "interpolate_entropy", "is_concave", "load_bundled",
    "load_scenario", "percent", "run_scenario", "scenario_id", "scenario_relevance",
    "sweep", "tradeoff_curve",
]
