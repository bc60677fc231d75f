"""Command-line experiments.

Every output starts with ``#`` comment lines echoing the tool version and
all parameters that affect the result, followed by CSV. Given the same
parameters and ``--seed`` the output is byte-identical, whatever ``--workers``.

Settings are resolved as: command defaults < ``--config`` JSON file < flags.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from . import __version__
from .degree_sets import DegreeSet, parse_degree_set
from .generator import GeneratorConfig, derive_seed, run
from .mean_field import SegmentParams, fixed_points, isolated_limit, relationship, relationship_profile
from .metrics import SURVIVED, sustainability_verdict
from .redistributed import redistributed_run, write_chains

FULL_SCALE_STEPS = 30000
FULL_SCALE_REPLICATES = 20


def _isolated_grid() -> list[float]:
    fine = [round(0.001 + 0.0005 * i, 4) for i in range(18)]
    coarse = [round(0.01 + 0.005 * i, 3) for i in range(39)]
    return fine + coarse


DEFAULTS = {
    "simulate": dict(d=0.1, ss="[0,0]", sc="[0,0]", n0=100, steps=3000, replicates=1, seed=0,
                     edges=True, method="auto"),
    "isolated": dict(d_list=None, n0=None, steps=3000, replicates=20, seed=0, burn_in=200, method="auto"),
    "nervousness-sweep": dict(d=0.05, cells="20:60,40:100,65:145", n0=None, steps=3000, replicates=20,
                              seed=0, method="auto"),
    "analyze": dict(d=0.05, m=2, M=5, n_max=None, search_cap=None, report=None),
    "redistributed": dict(d=0.05, m=2, M=5, n0=1000, steps=3000, replicates=20, seed=0),
}
# affect how the work runs, not what it produces
_NOT_ECHOED = {"out", "workers", "config", "paper_scale", "report"}


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--config", help="JSON file of settings; flags override it")
    p.add_argument("--d", type=float, help="connection threshold")
    p.add_argument("--ss", help="conservation set, e.g. nat, empty, {0,3}, [2,5], [4,inf]")
    p.add_argument("--sc", help="creation set, same syntax as --ss")
    p.add_argument("--m", type=int, help="segment lower bound")
    p.add_argument("--M", type=int, dest="M", help="segment upper bound")
    p.add_argument("--n0", type=int, help="seed graph order")
    p.add_argument("--steps", type=int)
    p.add_argument("--replicates", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--paper-scale", action="store_true", dest="paper_scale",
                   help=f"{FULL_SCALE_STEPS} steps and {FULL_SCALE_REPLICATES} replicates unless given explicitly")
    p.add_argument("--workers", type=int, help="worker processes (default 1)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="d3g3", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"d3g3 {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = [_common_parser()]
    kw = dict(parents=common, argument_default=argparse.SUPPRESS)

    p = sub.add_parser("simulate", help="per-step trajectory of the generator", **kw)
    p.add_argument("--no-edges", dest="edges", action="store_false", help="skip edge nervousness")
    p.add_argument("--method", choices=["auto", "brute", "grid"])

    p = sub.add_parser("isolated", help="S={0}: closed-form vs simulated conserved count", **kw)
    p.add_argument("--d-list", dest="d_list", help="comma-separated thresholds")
    p.add_argument("--burn-in", dest="burn_in", type=int)
    p.add_argument("--method", choices=["auto", "brute", "grid"])

    p = sub.add_parser("nervousness-sweep", help="mean vertex nervousness over (m, M) segments", **kw)
    p.add_argument("--cells", help="comma-separated m:M pairs")
    p.add_argument("--method", choices=["auto", "brute", "grid"])

    p = sub.add_parser("analyze", help="mean-field relationship curve and fixed points", **kw)
    p.add_argument("--n-max", dest="n_max", type=int, help="last order of the curve")
    p.add_argument("--search-cap", dest="search_cap", type=int)
    p.add_argument("--report", help="also write the JSON report to this file")

    sub.add_parser("redistributed", help="order chains of the redistributed model", **kw)
    return parser


def resolve_settings(args: argparse.Namespace) -> dict:
    given = dict(vars(args))
    command = given.pop("command")
    from_file = {}
    if "config" in given:
        with open(given.pop("config")) as fh:
            from_file = {k.replace("-", "_"): v for k, v in json.load(fh).items()}
    allowed = set(DEFAULTS[command]) | {"out", "workers", "paper_scale"}
    unknown = set(from_file) - allowed
    if unknown:
        raise ValueError(f"unknown settings for {command}: {sorted(unknown)}")
    s = {**DEFAULTS[command], **from_file, **given}
    explicit = set(from_file) | set(given)
    if s.get("paper_scale"):
        if "steps" in s and "steps" not in explicit:
            s["steps"] = FULL_SCALE_STEPS
        if "replicates" in s and "replicates" not in explicit:
            s["replicates"] = FULL_SCALE_REPLICATES
    s["command"] = command
    for key in ("steps", "replicates", "n0"):
        if s.get(key) is not None and s[key] < (1 if key == "replicates" else 0):
            raise ValueError(f"--{key} out of range: {s[key]}")
    return s


def _header(s: dict) -> str:
    lines = [f"# d3g3 {__version__} {s['command']}"]
    for k in sorted(s):
        if k not in _NOT_ECHOED and k != "command":
            lines.append(f"# {k}={s[k]}")
    return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (Fraction, float, np.floating)):
        return repr(float(x))
    return str(x)


def _map(fn, items, workers):
    items = list(items)
    if not workers or workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------- simulate

def _simulate_one(job):
    cfg, steps, edges = job
    traj = run(cfg, steps, record_snapshots=False, edge_nervousness=edges)
    verdict = sustainability_verdict(traj)
    rows = [[s.t, s.order, s.conserved, s.created, _fmt(s.vn), _fmt(s.en) if edges else "", "running"]
            for s in traj.summary]
    rows.append([traj.final_t, traj.final.order, "", "", "", "", verdict.kind])
    return rows


def cmd_simulate(s: dict, out) -> None:
    base = GeneratorConfig(
        d=s["d"], ss=parse_degree_set(s["ss"]), sc=parse_degree_set(s["sc"]),
        seed_order=s["n0"], rng_seed=s["seed"], method=s["method"],
    )
    jobs = [(base.replicate(r), s["steps"], s["edges"]) for r in range(s["replicates"])]
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["replicate", "t", "order", "conserved", "created", "vn", "en", "verdict"])
    for r, rows in enumerate(_map(_simulate_one, jobs, s.get("workers"))):
        for row in rows:
            w.writerow([r] + row)


# --------------------------------------------------------------- isolated

def _isolated_one(job):
    d, n0, steps, burn_in, seed, method = job
    zero = DegreeSet.segment(0, 0)
    cfg = GeneratorConfig(d=d, ss=zero, sc=zero, seed_order=n0, rng_seed=seed, method=method)
    traj = run(cfg, steps, record_snapshots=False, edge_nervousness=False)
    kept = [x.conserved for x in traj.summary if x.t >= burn_in]
    return sum(kept), len(kept)


def cmd_isolated(s: dict, out) -> None:
    grid = _isolated_grid() if s["d_list"] is None else [float(x) for x in str(s["d_list"]).split(",")]
    s["d_list"] = ",".join(repr(d) for d in grid)
    jobs = []
    for i, d in enumerate(grid):
        n0 = s["n0"] if s["n0"] is not None else max(1, round(isolated_limit(d).order))
        for r in range(s["replicates"]):
            jobs.append((d, n0, s["steps"], s["burn_in"], derive_seed(s["seed"], i, r), s["method"]))
    results = _map(_isolated_one, jobs, s.get("workers"))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["Expected", "Survivors"])
    k = s["replicates"]
    for i, d in enumerate(grid):
        chunk = results[i * k:(i + 1) * k]
        total, count = sum(c[0] for c in chunk), sum(c[1] for c in chunk)
        w.writerow([_fmt(isolated_limit(d).conserved), _fmt(total / count) if count else ""])


# -------------------------------------------------------- nervousness sweep

def _parse_cells(text: str) -> list[tuple[int, int]]:
    cells = []
    for part in str(text).split(","):
        m, M = (int(v) for v in part.split(":"))
        if not 0 <= m <= M:
            raise ValueError(f"cell {part!r} needs 0 <= m <= M")
        cells.append((m, M))
    if not cells:
        raise ValueError("empty cell grid")
    return cells


def default_sweep_start(m: int, M: int, d: float) -> int:
    """Largest mean-field fixed point: the order the segment model settles at."""
    fps = fixed_points(SegmentParams(m, M, d))
    return max(1, fps[-1])


def _sweep_one(job):
    m, M, d, n0, steps, seed, method = job
    seg = DegreeSet.segment(m, M)
    cfg = GeneratorConfig(d=d, ss=seg, sc=seg, seed_order=n0, rng_seed=seed, method=method)
    traj = run(cfg, steps, record_snapshots=False, edge_nervousness=False)
    vns = [float(x.vn) for x in traj.summary if x.vn is not None]
    return sustainability_verdict(traj).kind == SURVIVED, math.fsum(vns), len(vns)


def cmd_nervousness_sweep(s: dict, out) -> None:
    cells = _parse_cells(s["cells"])
    jobs = []
    for i, (m, M) in enumerate(cells):
        n0 = s["n0"] if s["n0"] is not None else default_sweep_start(m, M, s["d"])
        for r in range(s["replicates"]):
            jobs.append((m, M, s["d"], n0, s["steps"], derive_seed(s["seed"], i, r), s["method"]))
    results = _map(_sweep_one, jobs, s.get("workers"))
    k = s["replicates"]
    rows, dead = [], []
    for i, (m, M) in enumerate(cells):
        chunk = results[i * k:(i + 1) * k]
        alive = sum(1 for c in chunk if c[0])
        if alive == 0:
            dead.append(f"{m}:{M}")
            continue
        total, count = math.fsum(c[1] for c in chunk), sum(c[2] for c in chunk)
        rows.append(f"{m};{M};{total / count!r}")
    out.write(f"# dead_cells={','.join(dead) if dead else 'none'}\n")
    out.write("mS;MS;Nervousness\n")
    for row in rows:
        out.write(row + "\n")


# ---------------------------------------------------------------- analyze

def cmd_analyze(s: dict, out) -> None:
    params = SegmentParams(s["m"], s["M"], s["d"])
    prof = relationship_profile(params, s["search_cap"])
    report = json.dumps(prof.as_dict(), sort_keys=True)
    if s["report"]:
        with open(s["report"], "w") as fh:
            fh.write(report + "\n")
    out.write(f"# report={report}\n")
    n_max = s["n_max"] if s["n_max"] is not None else max(prof.collapse_bound + 1, 2 * prof.n_star, 10)
    n = np.arange(n_max + 1)
    f = relationship(params, n)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["n", "f"])
    for a, b in zip(n.tolist(), f.tolist()):
        w.writerow([a, repr(b)])


# ---------------------------------------------------------- redistributed

def cmd_redistributed(s: dict, out) -> None:
    params = SegmentParams(s["m"], s["M"], s["d"])
    chains = [redistributed_run(s["n0"], params, s["steps"], derive_seed(s["seed"], r))
              for r in range(s["replicates"])]
    write_chains(out, chains)


COMMANDS = {
    "simulate": cmd_simulate,
    "isolated": cmd_isolated,
    "nervousness-sweep": cmd_nervousness_sweep,
    "analyze": cmd_analyze,
    "redistributed": cmd_redistributed,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    buf = io.StringIO()
    try:
        s = resolve_settings(args)
        COMMANDS[s["command"]](s, buf)
    except (ValueError, OverflowError) as exc:
        print(f"d3g3: error: {exc}", file=sys.stderr)
        return 2
    text = _header(s) + buf.getvalue()
    with (open(s["out"], "w") if s.get("out") else contextlib.nullcontext(sys.stdout)) as fh:
        fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
