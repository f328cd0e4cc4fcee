"""Command-line runner: ``torsion-lab [--suite S] [--manifold NAME[:k=v,...]] ...``.

Runs every (suite, manifold, point) combination, prints a summary table and
optionally writes a JSON-Lines report.  Exit status is 0 when nothing fails,
1 when some check fails and 2 on a usage or configuration error.
"""
import argparse
import datetime
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import catalog
from .errors import TorsionLabError
from .identities import identity_table
from .suites import SUITES, PointData, run_suite

DEFAULT_POINTS = 25
DEFAULT_SEED = 1
DEFAULT_TOL = 1e-8


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    suites: list = field(default_factory=lambda: list(SUITES))
    manifolds: list = field(default_factory=list)    # [(name, params)]
    points: int = DEFAULT_POINTS
    seed: int = DEFAULT_SEED
    tol: float = DEFAULT_TOL
    report_path: str = None

    def validate(self):
        if self.points < 1:
            raise ConfigError("--points must be at least 1")
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise ConfigError("--tol must be positive")
        for s in self.suites:
            if s not in SUITES:
                raise ConfigError(f"unknown suite {s!r}; known: {', '.join(SUITES)}")
        for name, params in self.manifolds:
            try:
                catalog.get_spec(name).resolve(params)
            except TorsionLabError as exc:
                raise ConfigError(str(exc)) from None


def parse_manifold(text):
    """``name`` or ``name:k=v,k=v`` to (name, {k: float})."""
    name, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise ConfigError(f"bad manifold parameter {item!r}; expected key=value")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"parameter {key}={value!r} is not a number") from None
    return name.strip(), params


def _thread_count():
    try:
        n = int(os.environ.get("TORSION_LAB_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else min(4, os.cpu_count() or 1)


def _point_records(fields, name, params, index, coords, suites, tol, seed):
    data = PointData(fields, coords, index)
    records = []
    for suite in suites:
        for r in run_suite(suite, data, tol, seed):
            records.append({
                "suite": suite, "manifold": name, "params": params, "point_index": index,
                "coords": [float(c) for c in coords], "identity": r.id,
                "residual": r.residual if math.isfinite(r.residual) else None,
                "tol": r.tol, "status": r.status, "skip_reason": r.skip_reason})
    return records


def collect(config):
    """All report records of a run, in (manifold, point, suite, check) order."""
    manifolds = config.manifolds or [(name, {}) for name in catalog.REGISTRY]
    records = []
    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        for name, params in manifolds:
            spec = catalog.get_spec(name)
            resolved = spec.resolve(params)
            fields = catalog.instantiate(name, resolved)
            points = catalog.sample_points(fields, config.points, config.seed)
            jobs = [pool.submit(_point_records, fields, name, resolved, i, p, config.suites,
                                config.tol, config.seed) for i, p in enumerate(points)]
            for job in jobs:
                records.extend(job.result())
    return records


def summarize(records):
    """Rows (suite, identity, run, passed, failed, skipped, max residual)."""
    table = {}
    for r in records:
        key = (r["suite"], r["identity"])
        row = table.setdefault(key, [0, 0, 0, 0, None])
        row[0] += 1
        row[{"pass": 1, "fail": 2, "skipped": 3}[r["status"]]] += 1
        if r["status"] != "skipped" and r["residual"] is not None:
            row[4] = r["residual"] if row[4] is None else max(row[4], r["residual"])
    return [(s, i, *v) for (s, i), v in table.items()]


def format_summary(rows):
    lines = [f"{'suite':<18} {'identity':<26} {'run':>5} {'pass':>5} {'fail':>5} {'skip':>5}"
             f" {'max residual':>13}"]
    for suite, ident, run, ok, bad, skipped, worst in rows:
        worst = "-" if worst is None else f"{worst:.3e}"
        lines.append(f"{suite:<18} {ident:<26} {run:>5} {ok:>5} {bad:>5} {skipped:>5} {worst:>13}")
    totals = [sum(r[k] for r in rows) for k in (2, 3, 4, 5)]
    lines.append(f"total: {totals[0]} checks, {totals[1]} passed, {totals[2]} failed, "
                 f"{totals[3]} skipped")
    return "\n".join(lines)


def write_report(path, config, records):
    header = {"record": "header",
              "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
              "suites": config.suites, "points": config.points, "seed": config.seed,
              "tol": config.tol}
    with open(path, "w") as fh:
        fh.write(json.dumps(header) + "\n")
        for rec in records:
            fh.write(json.dumps(rec, allow_nan=False) + "\n")


def run(config, out=None):
    records = collect(config)
    print(format_summary(summarize(records)), file=out or sys.stdout)
    if config.report_path:
        write_report(config.report_path, config, records)
    return 1 if any(r["status"] == "fail" for r in records) else 0


def list_manifolds():
    lines = []
    for spec in catalog.REGISTRY.values():
        lines.append(f"{spec.name} (dim {spec.dim_of(spec.defaults)}): {spec.description}")
        for key, doc in spec.param_doc.items():
            default = spec.defaults.get(key)
            shown = "" if default is None else f" [default {default:g}]"
            lines.append(f"    {key}{shown}: {doc}")
    return "\n".join(lines)


def list_identities():
    return "\n".join(f"{ident:<20} {kind:<12} {anchor}" for ident, kind, anchor in identity_table())


def build_parser():
    p = argparse.ArgumentParser(
        prog="torsion-lab",
        description="Check Einstein-connection torsion formulas and identities against a "
                    "pointwise linear-system oracle.")
    p.add_argument("--suite", action="append", metavar="NAME",
                   help=f"suite to run (repeatable; default all): {', '.join(SUITES)}")
    p.add_argument("--manifold", action="append", metavar="NAME[:k=v,...]",
                   help="catalog structure with optional parameters (repeatable; default all)")
    p.add_argument("--points", type=int, default=DEFAULT_POINTS, help="points per manifold")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="sampling seed")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="default residual tolerance")
    p.add_argument("--report", metavar="PATH", help="write a JSON-Lines report")
    p.add_argument("--list-manifolds", action="store_true", help="print the catalog and exit")
    p.add_argument("--list-identities", action="store_true",
                   help="print the identity table and exit")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    if args.list_manifolds or args.list_identities:
        if args.list_manifolds:
            print(list_manifolds())
        if args.list_identities:
            print(list_identities())
        return 0
    try:
        config = RunConfig(
            suites=args.suite or list(SUITES),
            manifolds=[parse_manifold(m) for m in args.manifold or []],
            points=args.points, seed=args.seed, tol=args.tol, report_path=args.report)
        config.validate()
        return run(config)
    except (ConfigError, TorsionLabError) as exc:
        print(f"torsion-lab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
