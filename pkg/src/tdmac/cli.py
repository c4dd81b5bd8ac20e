"""``tdmac-sim`` command-line front end.

Parameter precedence is flag > config file > built-in default. For the
seed: ``--seed`` > ``TDMAC_SEED`` > config file > default.

Exit codes: 0 success, 2 config error, 3 usage or operand error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, csvio
from .config import ConfigError, default_params, load, params_from_dict, params_to_dict, validate
from .delay import CutoffError
from .engine import ARCHITECTURES, MacEngine
from .frontend import thermal_noise_sigma
from .metrics import (
    SAMPLINGS,
    energy_report,
    ktc_monte_carlo,
    linearity_metrics,
    quantization_errors,
    transfer_curve,
)
from .validation import OperandError, VectorOperands, parse_codes

EXIT_OK, EXIT_CONFIG, EXIT_USAGE = 0, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _set_override(text: str) -> tuple[list[str], object]:
    if "=" not in text:
        raise UsageError(f"--set expects KEY=VALUE, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip().split("."), value


def resolve_params(args):
    params = default_params()
    if args.config:
        try:
            params = load(args.config)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {args.config}") from None

    nested: dict = {}
    for item in args.set or []:
        path, value = _set_override(item)
        node = nested
        for part in path[:-1]:
            node = node.setdefault(part, {})
        node[path[-1]] = value
    if "delay_model" in nested:
        current = params_to_dict(params)["delay_model"]
        if nested["delay_model"].get("variant", current["variant"]) == current["variant"]:
            nested["delay_model"] = {**current, **nested["delay_model"]}
    if "dac_nonideality" in nested and params.dac_nonideality is not None:
        current = params_to_dict(params)["dac_nonideality"]
        nested["dac_nonideality"] = {**current, **nested["dac_nonideality"]}
    if nested:
        params = params_from_dict(nested, params)

    if args.seed is not None:
        params = params.replace(seed=args.seed)
    elif os.environ.get("TDMAC_SEED"):
        try:
            params = params.replace(seed=int(os.environ["TDMAC_SEED"]))
        except ValueError:
            raise ConfigError(f"TDMAC_SEED is not an integer: {os.environ['TDMAC_SEED']!r}") from None

    problems = validate(params)
    if problems:
        raise ConfigError("\n".join(problems))
    return params


def write_manifest(out: Path, args, params, argv, workers: int = 1) -> None:
    manifest = {
        "config_path": args.config,
        "command": args.command,
        "argv": list(argv),
        "seed": params.seed,
        "output_dir": str(out),
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "workers": workers,
        "params": params_to_dict(params),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# --- commands ----------------------------------------------------------------

def cmd_simulate(args, params, argv) -> int:
    inputs, weights = parse_codes(args.inputs), parse_codes(args.weights)
    ops = VectorOperands(tuple(inputs), tuple(weights))
    engine = MacEngine(params)
    r = engine.run(ops, args.arch)
    print(f"architecture: {r.architecture}")
    print(f"oracle: {r.oracle}")
    print(f"d_out: {r.d_out}")
    print(f"t_acc_ns: {r.t_acc * 1e9:.6f}")
    print(f"latency_ns: {r.latency * 1e9:.6f}")
    print(f"energy_pj: {r.energy * 1e12:.6f}")
    if r.saturated_cells:
        print(f"saturated_cells: {' '.join(map(str, r.saturated_cells))}")
    if args.out:
        out = _outdir(args)
        csvio.write_readout(out / "readout.csv", r)
        csvio.write_trace(out / "trace.csv", engine.trace)
        write_manifest(out, args, params, argv)
    return EXIT_OK


def _curve(args, params, arch):
    return transfer_curve(arch, params, args.sampling, n=args.n, k=args.k, n_jobs=args.jobs)


def cmd_compare(args, params, argv) -> int:
    out = _outdir(args)
    reports = {}
    for arch in ARCHITECTURES:
        records = _curve(args, params, arch)
        report = linearity_metrics(records)
        csvio.write_transfer(out / f"transfer_{arch}.csv", records)
        csvio.write_linearity(out / f"linearity_{arch}.csv", records, report)
        reports[arch] = report
    verdict = min(ARCHITECTURES, key=lambda a: (reports[a].inl_max, a))
    lines = [f"{a}: inl_max={reports[a].inl_max:.4f} rms={reports[a].rms_error:.4f} "
             f"r2={reports[a].r_squared:.6f}" for a in ARCHITECTURES]
    lines.append(f"verdict: {verdict} (lower inl_max)")
    (out / "summary.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    write_manifest(out, args, params, argv, workers=args.jobs)
    return EXIT_OK


def cmd_sweep(args, params, argv) -> int:
    out = _outdir(args)
    records = _curve(args, params, args.arch)
    csvio.write_transfer(out / f"transfer_{args.arch}.csv", records)
    try:
        report = linearity_metrics(records)
    except ValueError:
        report = None
    if report is not None:
        csvio.write_linearity(out / f"linearity_{args.arch}.csv", records, report)
        print(f"{args.arch}: {len(records)} records, inl_max={report.inl_max:.4f}, "
              f"gain={report.gain:.6f} counts/unit, offset={report.offset:.4f}")
    else:
        print(f"{args.arch}: {len(records)} records")
    write_manifest(out, args, params, argv, workers=args.jobs)
    return EXIT_OK


def cmd_noise(args, params, argv) -> int:
    if args.trials < 1000:
        raise UsageError("--trials must be at least 1000")
    out = _outdir(args)
    errors = quantization_errors(args.n_cells, params, args.trials)
    empirical = float(np.var(errors, ddof=1))
    predicted = args.n_cells * params.t_clk_tdc**2 / 12
    csvio.write_noise(out / "noise.csv", errors)
    print(f"quantization: trials={args.trials} n_cells={args.n_cells} "
          f"empirical_var={empirical:.6e} s^2 predicted_var={predicted:.6e} s^2 "
          f"ratio={empirical / predicted:.4f}")
    if args.trials < 10_000:
        print("note: small-sample run; expect ratio scatter of several percent")

    expected = thermal_noise_sigma(params.c_int, params.temperature)
    if params.noise_enabled:
        v = ktc_monte_carlo(params, samples=args.ktc_samples)
        observed = float(np.std(v, ddof=1))
        print(f"ktc: samples={args.ktc_samples} sigma_observed={observed * 1e6:.3f} uV "
              f"sigma_expected={expected * 1e6:.3f} uV ratio={observed / expected:.4f}")
    else:
        print(f"ktc: noise disabled, sigma_observed=0 uV (sigma_expected={expected * 1e6:.3f} uV if enabled)")
    write_manifest(out, args, params, argv)
    return EXIT_OK


def cmd_energy(args, params, argv) -> int:
    out = _outdir(args)
    report = energy_report(params, args.arch, n=args.n, f_op=args.f_op,
                           ops_per_cycle=args.ops_per_cycle, p_total=args.calibrate_power,
                           mode=args.mode)
    csvio.write_energy(out / "energy.csv", report)
    for field, value, unit in csvio.energy_rows(report):
        print(f"{field}: {value} {unit}")
    write_manifest(out, args, params, argv)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
    "noise": cmd_noise,
    "energy": cmd_energy,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON config file (field names as in CircuitParams)")
    common.add_argument("--seed", type=int, help="PRNG seed (falls back to TDMAC_SEED, then the config)")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config field, e.g. --set t_clk_tdc=5e-10 or "
                             "--set delay_model.stages=4 (repeatable; flags win over the file)")

    sampling = _Parser(add_help=False)
    sampling.add_argument("--sampling", choices=SAMPLINGS, default="diagonal")
    sampling.add_argument("--n", type=int, default=4, help="cells per MAC (default 4)")
    sampling.add_argument("--k", type=int, default=1000, help="vectors for random sampling")
    sampling.add_argument("--jobs", type=int, default=1, help="parallel workers")

    parser = _Parser(prog="tdmac-sim", description=__doc__.split("\n\n")[0],
                     epilog="Precedence: flag > config file > default.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", parents=[common], help="run one MAC")
    p.add_argument("--arch", choices=ARCHITECTURES, default="cascade")
    p.add_argument("--inputs", required=True, help="comma-separated input codes")
    p.add_argument("--weights", required=True, help="comma-separated weight codes")
    p.add_argument("--out", help="directory for readout.csv, trace.csv and manifest.json")

    p = sub.add_parser("compare", parents=[common, sampling],
                       help="linearity of both architectures on identical operands")
    p.add_argument("--out", default="tdmac_out")

    p = sub.add_parser("sweep", parents=[common, sampling], help="transfer curve for one architecture")
    p.add_argument("--arch", choices=ARCHITECTURES, default="cascade")
    p.add_argument("--out", default="tdmac_out")

    p = sub.add_parser("noise", parents=[common], help="quantization and kT/C noise Monte Carlo")
    p.add_argument("--n-cells", type=int, default=4)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--ktc-samples", type=int, default=100_000)
    p.add_argument("--out", default="tdmac_out")

    p = sub.add_parser("energy", parents=[common], help="power and TOPS/W report")
    p.add_argument("--arch", choices=ARCHITECTURES, default="cascade")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--f-op", type=float, default=40e6, help="MAC rate in Hz (default 40e6)")
    p.add_argument("--ops-per-cycle", type=int, default=None, help="ops convention (default 2N)")
    p.add_argument("--calibrate-power", type=float, default=None, metavar="WATTS",
                   help="force p_total and back-compute TOPS/W")
    p.add_argument("--mode", choices=("average", "worst"), default="average")
    p.add_argument("--out", default="tdmac_out")
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    try:
        params = resolve_params(args)
    except ConfigError as exc:
        print(f"config error:\n{exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args, params, argv)
    except (OperandError, UsageError) as exc:
        print(f"operand error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CutoffError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
