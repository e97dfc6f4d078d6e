"""Command-line entry point.

Exit status: 0 when every executed check passes, 1 when any fails or errors,
2 on usage or configuration errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .models import get_model, list_models, model_names
from .report import SCHEMA_VERSION, CheckReport, reports_json
from .verify import KINDS, CheckSpec, operator_names, full_suite, run_suite, specs_from_json


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser, numeric: bool = False) -> None:
    p.add_argument("--json", action="store_true", help="machine-readable reports on stdout")
    p.add_argument("--out", type=Path, help="directory for report.json, manifest.json and CSV")
    if numeric:
        p.add_argument("--grid", type=int, help="number of grid points (power of two)")
        p.add_argument("--dt", type=float, help="time step")
        p.add_argument("--T", type=float, help="final time")
        p.add_argument("--seed", type=int, help="seed of the random smooth initial data")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ch3lab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"ch3lab {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = sub.add_parser("list-models", help="registered model bundles")
    _common(p)
    p = sub.add_parser("check", help="run one verification")
    p.add_argument("--model", required=True)
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--params", default="{}", help="JSON object of check parameters")
    _common(p, numeric=True)
    p = sub.add_parser("suite", help="run a suite of checks (default: every positive claim)")
    p.add_argument("--file", type=Path, help="JSON suite file")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    _common(p, numeric=True)
    for name, text in (("simulate", "evolve random smooth data"),
                       ("transform", "evolve and test the transformed system")):
        p = sub.add_parser(name, help=text)
        _common(p, numeric=True)
    p = sub.add_parser("report", help="validate and summarize an existing report.json")
    p.add_argument("--file", type=Path, required=True)
    _common(p)
    return ap


def _overrides(args) -> dict:
    out = {}
    for flag, key in (("grid", "N"), ("dt", "dt"), ("T", "T"), ("seed", "seed")):
        v = getattr(args, flag, None)
        if v is not None:
            out[key] = v
    return out


def _numeric_config(args):
    from .numeric.checks import NumericConfig

    try:
        base = {**NumericConfig().as_dict(), **_overrides(args)}
        # coarse grids get the widest spectrum they resolve
        base["kmax"] = min(base["kmax"], base["N"] // 2 - 1)
        cfg = NumericConfig(**base)
        from .numeric import Grid, SimConfig

        SimConfig(Grid(cfg.N), cfg.dt, cfg.T).steps
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return cfg


def _emit(args, reports, manifest: dict, stream) -> int:
    reports = sorted(reports, key=lambda r: r.id)
    if args.json:
        stream.write(reports_json(reports))
    else:
        for r in reports:
            stream.write(r.line() + "\n")
            if not r.passed:
                stream.write("    " + r.residual.replace("\n", "\n    ") + "\n")
        n_ok = sum(r.passed for r in reports)
        stream.write(f"{n_ok}/{len(reports)} passed\n")
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "report.json").write_text(reports_json(reports))
        from .numeric.output import write_manifest

        manifest = {
            "version": __version__,
            "report_schema": SCHEMA_VERSION,
            "timings": {r.id: round(r.seconds, 6) for r in reports},
            **manifest,
        }
        write_manifest(args.out / "manifest.json", manifest)
    return 0 if all(r.passed for r in reports) else 1


def _cmd_list(args, stream) -> int:
    models = list_models()
    if args.json:
        stream.write(json.dumps({"schema": SCHEMA_VERSION, "reports": [], "models": models},
                                indent=2, sort_keys=True) + "\n")
    else:
        for m in models:
            stream.write(f"{m['name']:8} {m['variables']} fields  checks: {', '.join(m['checks'])}\n")
    if args.out is not None:
        import io

        return _emit(argparse.Namespace(json=False, out=args.out), [],
                     {"command": "list-models", "models": models}, io.StringIO())
    return 0


def _cmd_check(args, stream) -> int:
    try:
        params = json.loads(args.params)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--params is not valid JSON: {exc}") from exc
    if not isinstance(params, dict):
        raise UsageError("--params must be a JSON object")
    if args.model not in model_names():
        raise UsageError(f"unknown model {args.model!r}; known: {', '.join(model_names())}")
    if args.kind in ("skew", "jacobi") and "scalar" not in params:
        ops = operator_names(get_model(args.model))
        if params.get("operator") not in ops:
            raise UsageError(f"--kind {args.kind} needs --params '{{\"operator\": ...}}' with one of "
                             f"{', '.join(ops) or '(none)'}, or a 'scalar' operator")
    spec = CheckSpec(f"{args.model}.{args.kind}", args.model, args.kind, params)
    overrides = _numeric_config(args).as_dict() if _overrides(args) else None
    reports = run_suite([spec], overrides)
    return _emit(args, reports, {"command": "check", "model": args.model, "kind": args.kind,
                                 "params": params}, stream)


def _cmd_suite(args, stream) -> int:
    if args.file is not None:
        try:
            specs = specs_from_json(args.file.read_text())
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"cannot read suite file {args.file}: {exc}") from exc
    else:
        specs = full_suite()
    for s in specs:
        if s.model not in model_names():
            raise UsageError(f"check {s.id!r}: unknown model {s.model!r}")
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    cfg = _numeric_config(args)

    def live(r: CheckReport) -> None:
        if not args.json:
            sys.stderr.write(f"  done {r.id}: {r.status}\n")

    reports = run_suite(specs, cfg.as_dict(), args.jobs, live)
    return _emit(args, reports, {"command": "suite", "file": str(args.file) if args.file else None,
                                 "numeric_config": cfg.as_dict(),
                                 "checks": [s.id for s in specs]}, stream)


def _cmd_simulate(args, stream, transform: bool = False) -> int:
    from .numeric import Grid, SimConfig, simulate, smooth_state
    from .numeric.checks import check_transform, fmt, transform_runs
    from .numeric.output import write_fields_csv

    cfg = _numeric_config(args)
    g = Grid(cfg.N)
    t0 = time.perf_counter()
    st = smooth_state(g, cfg.seed, cfg.amplitude, cfg.decay, cfg.kmax)
    manifest: dict = {"command": "transform" if transform else "simulate",
                      "numeric_config": cfg.as_dict(), "outputs": []}
    if transform:
        runs = transform_runs(cfg)
        reports = check_transform(runs, cfg)
        manifest["norms"] = {k: {"N": r.N, "dt": r.dt, "evolution": r.residual["evolution"],
                                 "F": r.residual["F"], "drift": r.drift}
                             for k, r in runs.items()}
        tr = simulate(SimConfig(g, cfg.dt, cfg.T, monitor_every=round(cfg.T / cfg.dt)), st)
    else:
        tr = simulate(SimConfig(g, cfg.dt, cfg.T, monitor_every=round(cfg.T / cfg.dt)), st)
        drift = tr.diagnostics["drift"]
        ok = all(v <= cfg.tol_drift for v in drift.values())
        reports = [CheckReport("numeric.drift", "ch3", "pass" if ok else "fail",
                               "; ".join(f"{k}={fmt(v)}" for k, v in drift.items()),
                               "conservation of H0, H1 and Iv", time.perf_counter() - t0,
                               {"v margin": fmt(tr.diagnostics["v_margin"])})]
    manifest["drift_table"] = {"initial": tr.diagnostics["initial"],
                               "final": tr.diagnostics["final"], "drift": tr.diagnostics["drift"]}
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        for tag, snap in (("initial", tr.snapshots[0]), ("final", tr.snapshots[-1])):
            s = snap.state
            path = write_fields_csv(args.out / f"fields_{tag}.csv", "x", g.x,
                                    {n: getattr(s, n) for n in "pqruvw"})
            manifest["outputs"].append(path.name)
        if transform:
            from .numeric.transform import reciprocal_map

            snap = tr.snapshots[-1]
            ts = reciprocal_map(snap.state, snap.Y0)
            path = write_fields_csv(args.out / "fields_y.csv", "y", ts.grid.x, ts.fields)
            manifest["outputs"].append(path.name)
            manifest["y_map"] = {"Y0": snap.Y0, "period": ts.grid.L, **ts.diagnostics}
    return _emit(args, reports, manifest, stream)


def _cmd_report(args, stream) -> int:
    try:
        data = json.loads(args.file.read_text())
        if data.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"schema {data.get('schema')!r}, expected {SCHEMA_VERSION!r}")
        reports = [CheckReport(d["id"], d["model"], d["status"], d["residual"],
                               d.get("anchor", ""), 0.0, d.get("details", {}))
                   for d in data["reports"]]
        if any(r.status not in ("pass", "fail", "error") for r in reports):
            raise ValueError("unknown status in report")
    except (OSError, ValueError, KeyError, TypeError, AttributeError) as exc:
        raise UsageError(f"cannot read report {args.file}: {exc}") from exc
    return _emit(args, reports, {"command": "report", "source": str(args.file)}, stream)


def main(argv=None, stream=None) -> int:
    stream = stream or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if args.cmd == "list-models":
            return _cmd_list(args, stream)
        if args.cmd == "check":
            return _cmd_check(args, stream)
        if args.cmd == "suite":
            return _cmd_suite(args, stream)
        if args.cmd in ("simulate", "transform"):
            return _cmd_simulate(args, stream, args.cmd == "transform")
        return _cmd_report(args, stream)
    except UsageError as exc:
        sys.stderr.write(f"ch3lab: error: {exc}\n")
        return 2
    except SystemExit as exc:  # --help, --version
        return int(exc.code or 0)
    except Exception as exc:
        sys.stderr.write(f"ch3lab: error: {type(exc).__name__}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
