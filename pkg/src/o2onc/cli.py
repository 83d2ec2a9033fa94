"""Command-line batch runner: scenarios in, CSV rows and summaries out.

Exit codes: 0 success, 2 usage error, 3 invalid configuration or scenario
file, 4 output I/O failure. ``O2ONC_SEED`` overrides the default master seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import math
import os
import statistics
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from scipy import stats

from o2onc.packets import PacketSet
from o2onc.sim import Row, Scenario, ScenarioTemplate, Scheduler, run_batch

CSV_HEADER = ["scheduler", "seed", "M", "N", "eps_mean", "completion_time",
              "beneficial_total", "oracle_divergences"]
SCENARIO_MAGIC = "o2onc-scenario v1"
DEFAULT_MASTER_SEED = 20130101


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending option."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class RunConfig:
    receivers: tuple[int, ...] = (60,)
    packets: int = 30
    eps_mean: tuple[float, ...] = (0.15,)
    eps_spread: float = 0.10
    has_prob: float = 0.5
    seeds: tuple[int, ...] = tuple(range(100))
    schedulers: tuple[Scheduler, ...] = tuple(Scheduler)
    scenario_path: Path | None = None
    out_path: Path = Path("o2onc_results.csv")
    oracle: bool = False
    master_seed: int = DEFAULT_MASTER_SEED
    workers: int = 1
    exact_cap: int = 80

    def validate(self) -> None:
        if any(m < 1 for m in self.receivers):
            raise ConfigError("receivers", "must be >= 1")
        if self.packets < 1:
            raise ConfigError("packets", "must be >= 1")
        if self.packets > 256:
            raise ConfigError("packets", "at most 256 packets are supported")
        if any(not 0.0 <= e < 1.0 for e in self.eps_mean):
            raise ConfigError("eps-mean", "must lie in [0, 1)")
        if self.eps_spread < 0:
            raise ConfigError("eps-spread", "must be >= 0")
        if not 0.0 <= self.has_prob <= 1.0:
            raise ConfigError("has-prob", "must lie in [0, 1]")
        if not self.seeds:
            raise ConfigError("seeds", "need at least one seed")
        if not self.schedulers:
            raise ConfigError("schedulers", "need at least one scheduler")
        if self.workers < 1:
            raise ConfigError("workers", "must be >= 1")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _schedulers(text: str) -> tuple[Scheduler, ...]:
    try:
        return tuple(Scheduler(t.strip()) for t in text.split(","))
    except ValueError:
        names = ", ".join(s.value for s in Scheduler)
        raise argparse.ArgumentTypeError(f"unknown scheduler in {text!r} (choose from {names})")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="o2onc",
        description="Completion-time simulation of IDNC and order-2 opportunistic "
                    "network coding over broadcast erasure channels.")
    p.add_argument("--receivers", type=_int_list, default=(60,),
                   help="receiver count M, or a comma list to sweep (default 60)")
    p.add_argument("--packets", type=int, default=30, help="frame size N (default 30)")
    p.add_argument("--eps-mean", type=_float_list, default=(0.15,),
                   help="mean erasure probability, or a comma list to sweep (default 0.15)")
    p.add_argument("--eps-spread", type=float, default=0.10,
                   help="half-width of the uniform erasure spread (default 0.10)")
    p.add_argument("--has-prob", type=float, default=0.5,
                   help="probability a receiver initially holds a packet (default 0.5)")
    p.add_argument("--seeds", default="100",
                   help="number of seeds, or an explicit comma list of seeds (default 100)")
    p.add_argument("--master-seed", type=int, default=None,
                   help="master seed (default: $O2ONC_SEED or %d)" % DEFAULT_MASTER_SEED)
    p.add_argument("--schedulers", type=_schedulers, default=tuple(Scheduler),
                   help="comma list from: " + ", ".join(s.value for s in Scheduler))
    p.add_argument("--scenario", type=Path, default=None,
                   help="scenario file fixing side information and erasure rates")
    p.add_argument("--out", type=Path, default=Path("o2onc_results.csv"),
                   help="CSV destination (default o2onc_results.csv)")
    p.add_argument("--oracle", action="store_true",
                   help="audit every reception with GF(256) rank checks")
    p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    p.add_argument("--exact-cap", type=int, default=80,
                   help="largest graph solved exactly by the *-exact schedulers")
    return p


def parse_args(argv: Sequence[str] | None = None) -> RunConfig:
    """Map flags onto a validated ``RunConfig``.

    Unknown flags exit with status 2 through argparse; invalid values raise
    ``ConfigError``.
    """
    ns = build_parser().parse_args(argv)
    if "," in ns.seeds:
        try:
            seeds = _int_list(ns.seeds)
        except argparse.ArgumentTypeError as exc:
            raise ConfigError("seeds", str(exc))
    else:
        try:
            count = int(ns.seeds)
        except ValueError:
            raise ConfigError("seeds", f"expected a count or comma list, got {ns.seeds!r}")
        if count < 1:
            raise ConfigError("seeds", "need at least one seed")
        seeds = tuple(range(count))
    master = ns.master_seed
    if master is None:
        env = os.environ.get("O2ONC_SEED")
        if env is not None:
            try:
                master = int(env)
            except ValueError:
                raise ConfigError("O2ONC_SEED", f"not an integer: {env!r}")
        else:
            master = DEFAULT_MASTER_SEED
    cfg = RunConfig(receivers=ns.receivers, packets=ns.packets, eps_mean=ns.eps_mean,
                    eps_spread=ns.eps_spread, has_prob=ns.has_prob, seeds=seeds,
                    schedulers=ns.schedulers, scenario_path=ns.scenario,
                    out_path=ns.out, oracle=ns.oracle, master_seed=master,
                    workers=ns.workers, exact_cap=ns.exact_cap)
    cfg.validate()
    return cfg


def load_scenario(path: Path) -> Scenario:
    """Parse a scenario file.

    Layout::

        o2onc-scenario v1
        receivers 3
        packets 4
        epsilon 0.1 0.2 0.1      # one value, or one per receiver
        seed 7                   # optional
        has
        1 0 1 0
        0 1 0 0
        0 0 0 1

    ``#`` starts a comment. The ``has`` block is an M x N 0/1 matrix.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("scenario", f"cannot read {path}: {exc}")
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != SCENARIO_MAGIC:
        raise ConfigError("scenario", f"first line must be {SCENARIO_MAGIC!r}")
    keys: dict[str, list[str]] = {}
    matrix: list[list[int]] | None = None
    for ln in lines[1:]:
        if matrix is not None:
            try:
                row = [int(t) for t in ln.split()]
            except ValueError:
                raise ConfigError("scenario", f"bad has-matrix row {ln!r}")
            if any(v not in (0, 1) for v in row):
                raise ConfigError("scenario", f"has-matrix entries must be 0/1: {ln!r}")
            matrix.append(row)
            continue
        key, *vals = ln.split()
        if key == "has":
            matrix = []
        elif key in ("receivers", "packets", "epsilon", "seed"):
            keys[key] = vals
        else:
            raise ConfigError("scenario", f"unknown key {key!r}")
    try:
        m = int(keys["receivers"][0])
        n = int(keys["packets"][0])
        eps = [float(v) for v in keys["epsilon"]]
        seed = int(keys["seed"][0]) if "seed" in keys else 0
    except (KeyError, IndexError, ValueError) as exc:
        raise ConfigError("scenario", f"missing or malformed key: {exc}")
    if len(eps) == 1:
        eps = eps * m
    if len(eps) != m:
        raise ConfigError("scenario", f"expected 1 or {m} epsilon values, got {len(eps)}")
    if matrix is None or len(matrix) != m or any(len(r) != n for r in matrix):
        raise ConfigError("scenario", f"has block must be {m} rows of {n} entries")
    has = tuple(PacketSet(j for j, v in enumerate(r) if v) for r in matrix)
    try:
        return Scenario(n, tuple(eps), has, seed)
    except ValueError as exc:
        raise ConfigError("scenario", str(exc))


def execute(cfg: RunConfig) -> list[Row]:
    if cfg.scenario_path is not None:
        scenario = load_scenario(cfg.scenario_path)
        return run_batch(scenario, cfg.seeds, cfg.schedulers, cfg.oracle,
                         cfg.exact_cap, cfg.workers)
    rows: list[Row] = []
    for m, eps in itertools.product(cfg.receivers, cfg.eps_mean):
        template = ScenarioTemplate(m, cfg.packets, eps, cfg.eps_spread, cfg.has_prob,
                                    cfg.master_seed)
        rows.extend(run_batch(template, cfg.seeds, cfg.schedulers, cfg.oracle,
                              cfg.exact_cap, cfg.workers))
    return rows


def _fmt(x: float) -> str:
    return format(x, ".6g")


def csv_text(rows: Sequence[Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.scheduler, r.seed, r.m, r.n, _fmt(r.eps_mean), r.completion_time,
                    r.beneficial_total, r.oracle_divergences])
    return buf.getvalue()


def read_csv(path: Path) -> list[Row]:
    with open(path, newline="") as fh:
        return [Row(d["scheduler"], int(d["seed"]), int(d["M"]), int(d["N"]),
                    float(d["eps_mean"]), int(d["completion_time"]),
                    int(d["beneficial_total"]), int(d["oracle_divergences"]))
                for d in csv.DictReader(fh)]


@dataclass(frozen=True)
class Summary:
    m: int
    n: int
    eps_mean: float
    scheduler: str
    count: int
    mean: float
    stddev: float
    ci95: float


def summarize(rows: Sequence[Row]) -> list[Summary]:
    """Per (M, N, eps_mean, scheduler) statistics, in first-seen order."""
    groups: dict[tuple, list[int]] = {}
    for r in rows:
        groups.setdefault((r.m, r.n, r.eps_mean, r.scheduler), []).append(r.completion_time)
    out = []
    for (m, n, eps, sch), vals in groups.items():
        mean = statistics.fmean(vals)
        if len(vals) > 1:
            sd = statistics.stdev(vals)
            ci = float(stats.t.ppf(0.975, len(vals) - 1)) * sd / math.sqrt(len(vals))
        else:
            sd, ci = 0.0, math.nan
        out.append(Summary(m, n, eps, sch, len(vals), mean, sd, ci))
    return out


def format_summary(summaries: Sequence[Summary]) -> str:
    lines = []
    current = None
    for s in summaries:
        key = (s.m, s.n, s.eps_mean)
        if key != current:
            lines.append(f"M={s.m} N={s.n} eps_mean={_fmt(s.eps_mean)}")
            current = key
        ci = "n/a" if math.isnan(s.ci95) else f"+/-{s.ci95:.3f}"
        lines.append(f"  {s.scheduler:<13} n={s.count:<5d} mean={s.mean:8.3f} "
                     f"sd={s.stddev:7.3f} ci95={ci}")
    return "\n".join(lines) + "\n"


def emit_results(rows: Sequence[Row], out_path: Path) -> str:
    """Write the CSV and return the summary text."""
    if not rows:
        raise ValueError("no rows to write")
    Path(out_path).write_text(csv_text(rows))
    return format_summary(summarize(rows))


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = parse_args(argv)
        rows = execute(cfg)
    except ConfigError as exc:
        print(f"o2onc: invalid configuration: {exc}", file=sys.stderr)
        return 3
    try:
        summary = emit_results(rows, cfg.out_path)
    except OSError as exc:
        print(f"o2onc: cannot write {cfg.out_path}: {exc}", file=sys.stderr)
        return 4
    sys.stdout.write(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
