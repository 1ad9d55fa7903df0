"""Command-line interface.

Subcommands:

* simulate: one scattering experiment, report + plot-ready CSV output.
* sweep: velocity sweep over one or more couplings, CSV table + slopes.
* verify: run the built-in verification suites, print PASS/FAIL lines.
* kernels: tabulate scattering coefficients and resolvent samples.
* plotdata: turn a sweep table or a report into plain column files.

Configuration can come from a JSON file (keys mirror ExperimentConfig) and
every value can be overridden with a flag.  Each run writes a manifest
recording the tool version, the effective configuration, and the outputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import fields as dataclass_fields
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .graph import CouplingKind, InvalidParameterError, VertexCoupling
from .linops import (
    NumericFailureError,
    coupling_for_rescaled,
    rescaled_coefficients,
    resolvent_kernel,
    scattering_coefficients,
)
from .evolution import TruncationViolationError
from .experiments import (
    ExperimentConfig,
    SUITE_NAMES,
    normalize_coupling_spec,
    run_scattering_experiment,
    run_sweep,
    verify,
)

_CONFIG_KEYS = {f.name for f in dataclass_fields(ExperimentConfig)}


def _load_config_file(path: str) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise InvalidParameterError(f"config file {path} must hold a JSON object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise InvalidParameterError(
            f"config file {path} has unknown keys: {sorted(unknown)}; valid keys: {sorted(_CONFIG_KEYS)}"
        )
    return data


def _build_config(args) -> ExperimentConfig:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(_load_config_file(args.config))
    overrides = {
        "kind": getattr(args, "coupling", None),
        "tilde": getattr(args, "tilde", None),
        "v": getattr(args, "v", None),
        "delta": getattr(args, "delta", None),
        "log_time_factor": getattr(args, "log_time_factor", None),
        "x0": getattr(args, "x0", None),
        "dx": getattr(args, "dx", None),
        "dt": getattr(args, "dt", None),
        "edge_length": getattr(args, "edge_length", None),
        "edge_margin": getattr(args, "edge_margin", None),
        "scheme": getattr(args, "scheme", None),
        "incoming_edge": getattr(args, "incoming_edge", None),
        "n_snapshots": getattr(args, "n_snapshots", None),
        "far_end_threshold": getattr(args, "far_end_threshold", None),
        "label": getattr(args, "label", None),
    }
    values.update({key: val for key, val in overrides.items() if val is not None})
    if "kind" in values:
        values["kind"] = CouplingKind(values["kind"])
    return ExperimentConfig(**values)


def _config_dict(config: ExperimentConfig) -> dict:
    out = {}
    for f in dataclass_fields(config):
        value = getattr(config, f.name)
        out[f.name] = value.value if isinstance(value, CouplingKind) else value
    out["resolved"] = {
        "x0": config.resolved_x0,
        "dx": config.resolved_dx,
        "dt": config.resolved_dt,
        "edge_length": config.resolved_length(),
    }
    return out


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_manifest(out_dir: Path, command: str, config: dict, outputs: list, certificates: dict) -> None:
    manifest = {
        "tool": "gnls",
        "version": __version__,
        "command": command,
        "written_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": config,
        "certificates": certificates,
        "outputs": sorted(outputs),
    }
    _write_json(out_dir / "manifest.json", manifest)


def _add_experiment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--coupling", choices=[k.value for k in CouplingKind], help="vertex coupling kind")
    parser.add_argument("--tilde", type=float, help="rescaled coupling strength (alpha or beta tilde)")
    parser.add_argument("--v", type=float, help="soliton velocity")
    parser.add_argument("--delta", type=float, help="schedule exponent in (0, 1)")
    parser.add_argument("--log-time-factor", dest="log_time_factor", type=float, help="observation window factor T in t3 = t2 + T ln v")
    parser.add_argument("--x0", type=float, help="initial soliton center (default v^(1-delta))")
    parser.add_argument("--dx", type=float, help="grid spacing (default from velocity)")
    parser.add_argument("--dt", type=float, help="time step (default dx / max(4, v))")
    parser.add_argument("--edge-length", dest="edge_length", type=float, help="edge length override")
    parser.add_argument("--edge-margin", dest="edge_margin", type=float, help="extra edge length beyond the outgoing reach")
    parser.add_argument("--scheme", choices=["split_step_exact", "crank_nicolson"], help="time integrator")
    parser.add_argument("--incoming-edge", dest="incoming_edge", type=int, help="edge carrying the initial soliton")
    parser.add_argument("--n-snapshots", dest="n_snapshots", type=int, help="observation-window snapshot count")
    parser.add_argument("--far-end-threshold", dest="far_end_threshold", type=float, help="truncation certificate threshold")
    parser.add_argument("--label", help="run label used in outputs")
    parser.add_argument("--out", default="runs", help="output directory (default: runs)")


def _out_dir(args, fallback: str) -> Path:
    base = Path(args.out)
    label = getattr(args, "label", None) or fallback
    out = base / label
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_simulate(args) -> int:
    config = _build_config(args)
    report = run_scattering_experiment(config)
    out = _out_dir(args, f"{config.coupling_label().replace(':', '_')}_v{config.v:g}")

    _write_json(out / "report.json", report.to_dict())
    with open(out / "e3_vs_t.csv", "w") as fh:
        fh.write("t,e3,ratio1,ratio2,ratio3\n")
        for t, e, ratios in zip(report.snapshot_times, report.e3, report.ratios_at_snapshots):
            fh.write(f"{t:.9g},{e:.9e},{ratios[0]:.9e},{ratios[1]:.9e},{ratios[2]:.9e}\n")
    certificates = {
        "far_end_max": report.far_end_max,
        "far_end_threshold": config.far_end_threshold,
        "mass_drift": report.mass_drift,
        "energy_drift": report.energy_drift,
    }
    _write_manifest(out, "simulate", _config_dict(config), ["report.json", "e3_vs_t.csv"], certificates)

    print(f"coupling {report.coupling_label}, v = {report.v:g}, delta = {report.delta:g}")
    print(f"schedule: t1 = {report.t1:.4f}, t2 = {report.t2:.4f}, t3 = {report.t3:.4f}")
    print(f"e1 = {report.e1:.3e}, e2 = {report.e2_out:.3e}, sup e3 = {report.sup_e3:.3e}")
    ratios = ", ".join(f"{r:.4f}" for r in report.ratios)
    targets = ", ".join(f"{r:.4f}" for r in report.ratio_targets)
    print(f"mass ratios at t = {report.ratio_time:.3f}: ({ratios}); targets ({targets})")
    print(f"wrote {out}/report.json")
    return 0


def _parse_float_list(text: str) -> list:
    return [float(part) for part in text.split(",") if part.strip()]


def _cmd_sweep(args) -> int:
    base = _build_config(args)
    v_list = _parse_float_list(args.v_list)
    couplings = [part.strip() for part in args.couplings.split(",") if part.strip()]
    result = run_sweep(base, v_list, couplings, workers=args.workers)
    out = _out_dir(args, "sweep")
    result.to_csv(out / "sweep.csv")
    _write_json(out / "slopes.json", result.slopes)
    certificates = {
        "rows_total": len(result.rows),
        "rows_failed": sum(1 for row in result.rows if not row.ok),
    }
    _write_manifest(out, "sweep", _config_dict(base), ["sweep.csv", "slopes.json"], certificates)
    for row in result.rows:
        if row.ok:
            r = row.report
            print(
                f"v = {row.v:5g}  {row.coupling_label:>14}: e2 = {r.e2_out:.3e}, "
                f"sup e3 = {r.sup_e3:.3e}, max ratio error = {r.max_ratio_error:.3e}"
            )
        else:
            print(f"v = {row.v:5g}  {row.coupling_label:>14}: FAILED ({row.message})")
    for label, entry in result.slopes.items():
        if "e2_slope" in entry:
            print(
                f"slopes [{label}]: e2 {entry['e2_slope']:+.3f}, sup e3 {entry['sup_e3_slope']:+.3f}, "
                f"ratio error decreasing: {entry['ratio_error_decreasing']}"
            )
    print(f"wrote {out}/sweep.csv")
    return 0


def _cmd_verify(args) -> int:
    results = verify(tuple(args.suite) if args.suite else ("all",))
    failed = 0
    for name, checks in results.items():
        print(f"suite {name}:")
        for check in checks:
            print("  " + check.line())
            failed += 0 if check.passed else 1
    print(f"{'all checks passed' if failed == 0 else f'{failed} check(s) failed'}")
    return 0 if failed == 0 else 1


def _coupling_from_label(label: str, v: float | None) -> VertexCoupling:
    kind, tilde = normalize_coupling_spec(label)
    if kind == CouplingKind.KIRCHHOFF:
        return VertexCoupling.kirchhoff()
    if v is not None:
        return coupling_for_rescaled(kind, tilde, v)
    if kind == CouplingKind.DELTA:
        return VertexCoupling.delta(tilde)
    return VertexCoupling.delta_prime(tilde)


def _cmd_kernels(args) -> int:
    ks = _parse_float_list(args.k)
    labels = [part.strip() for part in args.couplings.split(",") if part.strip()]
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    rows = []
    for label in labels:
        coupling = _coupling_from_label(label, args.v)
        for k in ks:
            rt = scattering_coefficients(coupling, k)
            kernel = resolvent_kernel(coupling, 1j * args.kappa, args.x, args.y)
            rows.append(
                [
                    label, f"{k:.9g}",
                    f"{rt.r.real:.12e}", f"{rt.r.imag:.12e}",
                    f"{rt.t.real:.12e}", f"{rt.t.imag:.12e}",
                    f"{rt.unitarity_defect:.3e}",
                    f"{kernel[0, 0].real:.12e}", f"{kernel[0, 0].imag:.12e}",
                    f"{kernel[0, 1].real:.12e}", f"{kernel[0, 1].imag:.12e}",
                ]
            )
        if args.v is not None:
            kind, tilde = normalize_coupling_spec(label)
            rc = rescaled_coefficients(kind, tilde, args.v)
            print(
                f"rescaled [{label}] at v = {args.v:g}: r = {rc.r.real:+.6f}{rc.r.imag:+.6f}i, "
                f"t = {rc.t.real:+.6f}{rc.t.imag:+.6f}i"
            )
    with open(out_path, "w") as fh:
        fh.write(
            "coupling,k,r_re,r_im,t_re,t_im,unitarity_defect,"
            "resolvent11_re,resolvent11_im,resolvent12_re,resolvent12_im\n"
        )
        fh.write("\n".join(",".join(row) for row in rows) + "\n")
    print(f"wrote {out_path}")
    return 0


def _cmd_plotdata(args) -> int:
    src = Path(args.source)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if src.suffix == ".json":
        report = json.loads(src.read_text())
        path = out / "e3_vs_t.csv"
        with open(path, "w") as fh:
            fh.write("t,e3\n")
            for t, e in zip(report["snapshot_times"], report["e3"]):
                fh.write(f"{t:.9g},{e:.9e}\n")
        written.append(path)
        path = out / "ratio_vs_t.csv"
        with open(path, "w") as fh:
            fh.write("t,ratio1,ratio2,ratio3\n")
            for t, ratios in zip(report["snapshot_times"], report["ratios_at_snapshots"]):
                fh.write(f"{t:.9g},{ratios[0]:.9e},{ratios[1]:.9e},{ratios[2]:.9e}\n")
        written.append(path)
    else:
        with open(src) as fh:
            rows = [row for row in csv.DictReader(fh) if row["status"] == "ok"]
        labels = sorted({row["coupling"] for row in rows})
        for label in labels:
            path = out / f"error_vs_v_{label.replace(':', '_')}.csv"
            with open(path, "w") as fh:
                fh.write("v,e1,e2_out,sup_e3,max_ratio_error\n")
                for row in rows:
                    if row["coupling"] != label:
                        continue
                    worst = max(float(row["ratio_err1"]), float(row["ratio_err2"]), float(row["ratio_err3"]))
                    fh.write(f"{row['v']},{row['e1']},{row['e2_out']},{row['sup_e3']},{worst:.9e}\n")
            written.append(path)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gnls",
        description="Cubic NLS on a three-edge star graph: scattering experiments and checks.",
    )
    parser.add_argument("--version", action="version", version=f"gnls {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scattering experiment")
    _add_experiment_flags(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="run a velocity sweep over couplings")
    _add_experiment_flags(p)
    p.add_argument("--v-list", dest="v_list", default="8,16,32", help="comma-separated velocities")
    p.add_argument(
        "--couplings",
        default="kirchhoff,delta:1,delta_prime:1",
        help="comma-separated coupling specs, e.g. kirchhoff,delta:1",
    )
    p.add_argument("--workers", type=int, default=1, help="concurrent sweep members")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", action="append", choices=list(SUITE_NAMES) + ["all"], help="suite to run (repeatable)")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("kernels", help="tabulate scattering coefficients and resolvent samples")
    p.add_argument("--couplings", default="kirchhoff,delta:1,delta_prime:1")
    p.add_argument("--k", default="0.5,1,2,4,8", help="comma-separated wavenumbers")
    p.add_argument("--v", type=float, help="velocity for the rescaled coefficients")
    p.add_argument("--kappa", type=float, default=1.0, help="resolvent spectral parameter: k = i kappa")
    p.add_argument("--x", type=float, default=1.0, help="resolvent first coordinate")
    p.add_argument("--y", type=float, default=0.5, help="resolvent second coordinate")
    p.add_argument("--out", default="kernels.csv", help="output CSV path")
    p.set_defaults(func=_cmd_kernels)

    p = sub.add_parser("plotdata", help="emit plot-ready columns from a sweep CSV or report JSON")
    p.add_argument("source", help="sweep.csv or report.json")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=_cmd_plotdata)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidParameterError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (TruncationViolationError, NumericFailureError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
