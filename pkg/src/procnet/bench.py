"""Benchmark harness: run designs on seeded random matrices, verify against
the functional reference, and emit comparable reports.

Speeds are reported in items per cycle — one result entry per simulator
cycle — since no wall clock is modeled; on real hardware multiply by the
clock rate to get items per second. Area is proxied by (process_count,
channel_count) of the built network.

Three commands mirror the CLI and service surface:

  cmd_run      every (design, dims) pair gets one RunReport
  cmd_compare  one dims, two or more designs, sorted fastest first
  cmd_sweep_k  pipelined designs only: cycles versus k at fixed (n, m),
               with an affine fit (steady-state pipelines grow linearly
               in the number of columns; the fit residual proves it)

Reports serialize to JSON (array of objects), CSV (one row per report)
and a plain-text table; JSON and CSV round-trip exactly. All output is
reproducible byte-for-byte from (seed, config).
"""

import csv
import hashlib
import io
import json
import random
from dataclasses import dataclass, field

from . import oracle
from .designs import DESIGN_IDS, DESIGN_LABELS, K_INDEPENDENT, run_design
from .runtime import (CycleBudgetError, DeadlockError, DEFAULT_MAX_CYCLES,
                      ProtocolError)
from .words import DEFAULT_WIDTH, MAX_WIDTH, MIN_WIDTH, word_range

MAX_SEED = 2 ** 64 - 1
SMALL_RANGE = (-8, 8)
AFFINE_TOLERANCE = 1.0  # max |residual| in cycles for a sweep to count as affine

FORMATS = ("json", "csv", "table")

REPORT_FIELDS = ("design", "dims", "cycles", "communications",
                 "process_count", "channel_count", "items_out",
                 "throughput_items_per_cycle", "verified", "warnings")

SWEEP_FIELDS = ("design", "n", "m", "k", "cycles", "process_count",
                "channel_count", "verified", "slope", "intercept",
                "max_abs_residual", "affine")


class UsageError(Exception):
    """Bad configuration; callers should exit with status 3."""


# -- reports -----------------------------------------------------------------

@dataclass
class RunReport:
    design: str
    dims: tuple
    cycles: int
    communications: int
    process_count: int
    channel_count: int
    items_out: int
    throughput_items_per_cycle: float | None
    verified: bool
    warnings: list = field(default_factory=list)

    def to_dict(self):
        d = {f: getattr(self, f) for f in REPORT_FIELDS}
        d["dims"] = list(self.dims)
        d["warnings"] = list(self.warnings)
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(design=d["design"], dims=tuple(d["dims"]),
                   cycles=d["cycles"], communications=d["communications"],
                   process_count=d["process_count"],
                   channel_count=d["channel_count"],
                   items_out=d["items_out"],
                   throughput_items_per_cycle=d["throughput_items_per_cycle"],
                   verified=d["verified"], warnings=list(d["warnings"]))

    @property
    def ran_clean(self):
        """False when the run itself failed (deadlock, budget, protocol)."""
        return not any(w.startswith(("deadlock:", "cycle-budget:", "protocol:"))
                       for w in self.warnings)


@dataclass
class Config:
    designs: list
    dims: list
    seed: int = 42
    width: int = DEFAULT_WIDTH
    max_cycles: int = DEFAULT_MAX_CYCLES
    small_values: bool = False
    fmt: str = "table"


def validate_config(cfg):
    if not cfg.designs:
        raise UsageError("designs: pick at least one of " + ", ".join(DESIGN_IDS))
    seen = set()
    for d in cfg.designs:
        if d not in DESIGN_IDS:
            raise UsageError(f"designs: unknown design {d!r}; choose from "
                             + ", ".join(DESIGN_IDS))
        if d in seen:
            raise UsageError(f"designs: {d} listed twice")
        seen.add(d)
    if not cfg.dims:
        raise UsageError("dims: give at least one n,m,k triple")
    for t in cfg.dims:
        if (len(t) != 3 or not all(isinstance(v, int) and not isinstance(v, bool)
                                   for v in t)):
            raise UsageError(f"dims: expected three ints n,m,k, got {t!r}")
        if min(t) < 1:
            raise UsageError(f"dims: n, m, k must all be >= 1, got "
                             f"{t[0]},{t[1]},{t[2]}")
    if not isinstance(cfg.seed, int) or isinstance(cfg.seed, bool) \
            or not 0 <= cfg.seed <= MAX_SEED:
        raise UsageError(f"seed: must be an unsigned 64-bit int, got {cfg.seed!r}")
    if not isinstance(cfg.width, int) or isinstance(cfg.width, bool) \
            or not MIN_WIDTH <= cfg.width <= MAX_WIDTH:
        raise UsageError(f"width: must be an int in [{MIN_WIDTH}, {MAX_WIDTH}], "
                         f"got {cfg.width!r}")
    if not isinstance(cfg.max_cycles, int) or cfg.max_cycles < 1:
        raise UsageError(f"max_cycles: must be >= 1, got {cfg.max_cycles!r}")
    if cfg.fmt not in FORMATS:
        raise UsageError(f"format: choose one of {', '.join(FORMATS)}, "
                         f"got {cfg.fmt!r}")
    return cfg


def parse_designs(text):
    items = [p.strip() for p in text.split(",") if p.strip()]
    if not items:
        raise UsageError("designs: empty design list")
    return items


def parse_dims(text):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise UsageError(f"dims: expected n,m,k, got {text!r}")
    try:
        n, m, k = (int(p) for p in parts)
    except ValueError:
        raise UsageError(f"dims: expected three ints, got {text!r}") from None
    return (n, m, k)


# -- seeded inputs -------------------------------------------------------------

def random_matrices(seed, n, m, k, width=DEFAULT_WIDTH, small_values=False):
    """Deterministic operands for one (seed, dims) job.

    Every design benchmarked at the same seed and dims sees the same
    matrices. The derivation hashes seed and dims together so neighboring
    seeds do not produce shifted copies of one another.
    """
    digest = hashlib.sha256(f"{seed}:{n}:{m}:{k}".encode()).digest()
    rng = random.Random(int.from_bytes(digest[:8], "big"))
    lo, hi = SMALL_RANGE if small_values else word_range(width)
    ass_rows = [[rng.randint(lo, hi) for _ in range(m)] for _ in range(n)]
    bss_cols = [[rng.randint(lo, hi) for _ in range(m)] for _ in range(k)]
    return ass_rows, bss_cols


# -- running -------------------------------------------------------------------

def run_one(design, dims, cfg):
    """Run one (design, dims) job and report, never raising for run failures."""
    n, m, k = dims
    ass_rows, bss_cols = random_matrices(cfg.seed, n, m, k, cfg.width,
                                         cfg.small_values)
    expected = oracle.matrix_product(ass_rows, bss_cols, cfg.width)
    try:
        run = run_design(design, ass_rows, bss_cols, width=cfg.width,
                         max_cycles=cfg.max_cycles)
    except DeadlockError as exc:
        return _failed_report(design, dims, exc, f"deadlock: {exc}")
    except CycleBudgetError as exc:
        return _failed_report(design, dims, exc, f"cycle-budget: {exc}")
    except ProtocolError as exc:
        return _failed_report(design, dims, exc, f"protocol: {exc}")
    met = run.metrics
    return RunReport(design=design, dims=dims, cycles=met.cycles,
                     communications=met.communications,
                     process_count=met.process_count,
                     channel_count=met.channel_count,
                     items_out=met.items_out,
                     throughput_items_per_cycle=met.throughput,
                     verified=run.css_cols == expected,
                     warnings=list(run.warnings))


def _failed_report(design, dims, exc, note):
    met = getattr(exc, "partial_metrics", None)
    warnings = list(getattr(exc, "net_warnings", ())) + [note]
    return RunReport(design=design, dims=dims,
                     cycles=met.cycles if met else 0,
                     communications=met.communications if met else 0,
                     process_count=met.process_count if met else 0,
                     channel_count=met.channel_count if met else 0,
                     items_out=0, throughput_items_per_cycle=None,
                     verified=False, warnings=warnings)


def exit_code(reports):
    """0 all verified; 1 verification failure; 2 any run that broke down."""
    if any(not r.ran_clean for r in reports):
        return 2
    if any(not r.verified for r in reports):
        return 1
    return 0


def cmd_run(cfg):
    """One report per (design, dims), in (design, dims) key order."""
    validate_config(cfg)
    jobs = sorted((d, t) for d in cfg.designs for t in cfg.dims)
    return [run_one(d, t, cfg) for d, t in jobs]


def cmd_compare(cfg):
    """Reports for one dims across designs, fastest first."""
    validate_config(cfg)
    if len(cfg.designs) < 2:
        raise UsageError("designs: compare needs at least two designs")
    if len(cfg.dims) != 1:
        raise UsageError("dims: compare takes exactly one n,m,k triple")
    reports = [run_one(d, cfg.dims[0], cfg) for d in sorted(cfg.designs)]
    reports.sort(key=lambda r: (-(r.throughput_items_per_cycle or 0.0), r.design))
    return reports


def affine_fit(xs, ys):
    """Least-squares fit ys ~ intercept + slope * xs; returns
    (slope, intercept, max abs residual)."""
    if len(xs) != len(ys) or len(set(xs)) < 2:
        raise UsageError("dims: an affine fit needs at least two distinct k")
    npts = len(xs)
    mx = sum(xs) / npts
    my = sum(ys) / npts
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = my - slope * mx
    resid = max(abs(y - (intercept + slope * x)) for x, y in zip(xs, ys))
    return slope, intercept, resid


def cmd_sweep_k(cfg):
    """Cycles versus k for pipelined designs at fixed (n, m).

    The k values come from the dims list (all must share n and m); a k=1
    baseline point is always included. Each series carries an affine fit —
    a steady-state pipeline's cycle count is intercept + slope*k, so the
    fit residual certifies k-independence of the structure.
    """
    validate_config(cfg)
    for d in cfg.designs:
        if d not in K_INDEPENDENT:
            raise UsageError(
                f"designs: {d} is not a pipelined design; sweep-k covers "
                f"{', '.join(K_INDEPENDENT)} — use compare for the rest")
    base = (cfg.dims[0][0], cfg.dims[0][1])
    for t in cfg.dims:
        if (t[0], t[1]) != base:
            raise UsageError("dims: sweep-k needs every triple to share n,m "
                             f"(got {t[0]},{t[1]} after {base[0]},{base[1]})")
    n, m = base
    ks = sorted({t[2] for t in cfg.dims} | {1})

    series = []
    for design in sorted(cfg.designs):
        reports = [run_one(design, (n, m, k), cfg) for k in ks]
        clean = all(r.ran_clean for r in reports)
        counts = {(r.process_count, r.channel_count) for r in reports}
        entry = {
            "design": design,
            "n": n,
            "m": m,
            "ks": ks,
            "cycles": [r.cycles for r in reports],
            "process_count": reports[0].process_count,
            "channel_count": reports[0].channel_count,
            "counts_constant": len(counts) == 1,
            "verified": all(r.verified for r in reports),
            "ran_clean": clean,
            "warnings": sorted({w for r in reports for w in r.warnings}),
        }
        if clean and len(ks) >= 2:
            slope, intercept, resid = affine_fit(ks, entry["cycles"])
            entry["fit"] = {"slope": slope, "intercept": intercept,
                            "max_abs_residual": resid}
            entry["affine"] = resid < AFFINE_TOLERANCE
        else:
            entry["fit"] = None
            entry["affine"] = False
        series.append(entry)
    return series


def sweep_exit_code(series):
    if any(not s["ran_clean"] for s in series):
        return 2
    if any(not (s["verified"] and s["affine"] and s["counts_constant"])
           for s in series):
        return 1
    return 0


# -- serialization --------------------------------------------------------------

def reports_to_json(reports):
    return json.dumps([r.to_dict() for r in reports], indent=2) + "\n"


def reports_from_json(text):
    return [RunReport.from_dict(d) for d in json.loads(text)]


def reports_to_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_FIELDS)
    for r in reports:
        w.writerow([
            r.design,
            "x".join(str(v) for v in r.dims),
            r.cycles, r.communications, r.process_count, r.channel_count,
            r.items_out,
            "" if r.throughput_items_per_cycle is None
            else repr(r.throughput_items_per_cycle),
            "true" if r.verified else "false",
            json.dumps(r.warnings),
        ])
    return buf.getvalue()


def reports_from_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != REPORT_FIELDS:
        raise UsageError("csv: missing or mangled header row")
    out = []
    for row in rows[1:]:
        cells = dict(zip(REPORT_FIELDS, row))
        out.append(RunReport(
            design=cells["design"],
            dims=tuple(int(v) for v in cells["dims"].split("x")),
            cycles=int(cells["cycles"]),
            communications=int(cells["communications"]),
            process_count=int(cells["process_count"]),
            channel_count=int(cells["channel_count"]),
            items_out=int(cells["items_out"]),
            throughput_items_per_cycle=(
                None if cells["throughput_items_per_cycle"] == ""
                else float(cells["throughput_items_per_cycle"])),
            verified=cells["verified"] == "true",
            warnings=json.loads(cells["warnings"]),
        ))
    return out


def _table(headers, rows):
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    def line(cells):
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    out = [line(headers), line(["-" * w for w in widths])]
    out.extend(line(r) for r in rows)
    return "\n".join(out) + "\n"


def reports_to_table(reports):
    rows = []
    for r in reports:
        thr = ("-" if r.throughput_items_per_cycle is None
               else f"{r.throughput_items_per_cycle:.4f}")
        note = "; ".join(r.warnings)
        rows.append([
            r.design, "x".join(str(v) for v in r.dims), str(r.cycles),
            str(r.communications), str(r.process_count), str(r.channel_count),
            str(r.items_out), thr, "yes" if r.verified else "NO", note,
        ])
    headers = ["design", "dims", "cycles", "comms", "procs", "chans",
               "items", "items/cycle", "verified", "warnings"]
    return _table(headers, rows)


def sweep_to_json(series):
    return json.dumps(series, indent=2) + "\n"


def _sweep_rows(series):
    rows = []
    for s in series:
        fit = s["fit"] or {}
        for k, cycles in zip(s["ks"], s["cycles"]):
            rows.append({
                "design": s["design"], "n": s["n"], "m": s["m"],
                "k": k, "cycles": cycles,
                "process_count": s["process_count"],
                "channel_count": s["channel_count"],
                "verified": s["verified"],
                "slope": fit.get("slope"),
                "intercept": fit.get("intercept"),
                "max_abs_residual": fit.get("max_abs_residual"),
                "affine": s["affine"],
            })
    return rows


def sweep_to_csv(series):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_FIELDS)
    for row in _sweep_rows(series):
        w.writerow(["" if row[f] is None
                    else ("true" if row[f] is True
                          else "false" if row[f] is False
                          else repr(row[f]) if isinstance(row[f], float)
                          else str(row[f]))
                    for f in SWEEP_FIELDS])
    return buf.getvalue()


def sweep_to_table(series):
    blocks = []
    for s in series:
        rows = [[str(k), str(c)] for k, c in zip(s["ks"], s["cycles"])]
        head = (f"{s['design']} ({DESIGN_LABELS[s['design']]}) at "
                f"n={s['n']}, m={s['m']}: "
                f"procs={s['process_count']}, chans={s['channel_count']}")
        if s["fit"]:
            head += (f"\ncycles ~ {s['fit']['intercept']:.2f} + "
                     f"{s['fit']['slope']:.2f}*k  "
                     f"(max residual {s['fit']['max_abs_residual']:.3f}, "
                     f"{'affine' if s['affine'] else 'NOT affine'})")
        block = head + "\n" + _table(["k", "cycles"], rows)
        if s["warnings"]:
            block += "warnings: " + "; ".join(s["warnings"]) + "\n"
        blocks.append(block)
    return "\n".join(blocks)


def format_reports(reports, fmt):
    if fmt == "json":
        return reports_to_json(reports)
    if fmt == "csv":
        return reports_to_csv(reports)
    return reports_to_table(reports)


def format_sweep(series, fmt):
    if fmt == "json":
        return sweep_to_json(series)
    if fmt == "csv":
        return sweep_to_csv(series)
    return sweep_to_table(series)
