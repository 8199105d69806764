"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 numeric or degeneracy
error, 3 validation failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .config import Scenario, load_config
from .errors import ConfigError, DegenerateError, OutOfRangeError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDATION = 0, 1, 2, 3


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chirasim", description="Entangled-probe chiral polarimetry simulator")
    p.add_argument("--version", action="version", version=f"chirasim {__version__}")
    p.add_argument("--workers", type=int, default=None, help="worker threads (capped by CHIRASIM_THREADS)")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a scenario config")
    run.add_argument("--config", required=True, type=Path)
    run.add_argument("--scenario", choices=[s.value for s in Scenario])
    run.add_argument("--seed", type=_u64)
    run.add_argument("--out", type=Path)

    val = sub.add_parser("validate", help="run the invariant and oracle checks")
    val.add_argument("--quick", action="store_true", help="smaller sample counts")
    val.add_argument("--seed", type=_u64, default=12345)

    spec = sub.add_parser("spectrum", help="write one detected noise spectrum as CSV")
    spec.add_argument("--config", required=True, type=Path)
    spec.add_argument("--out", required=True, type=Path)
    spec.add_argument("--probe", choices=["coherent", "entangled"], default="entangled")
    return p


def _resolve(args) -> "ScenarioConfig":  # noqa: F821
    cfg = load_config(args.config)
    update = {}
    if getattr(args, "scenario", None):
        update["scenario"] = Scenario(args.scenario)
    if getattr(args, "seed", None) is not None:
        update["seed"] = args.seed
    if getattr(args, "out", None) is not None and args.command == "run":
        update["output"] = cfg.output.model_copy(update={"dir": str(args.out)})
    return cfg.model_copy(update=update) if update else cfg


def _cmd_run(args) -> int:
    from .outputs import emit_outputs
    from .scenarios import run_scenario

    cfg = _resolve(args)
    report = run_scenario(cfg, workers=args.workers)
    files = emit_outputs(report, cfg.output.dir)
    for f in files:
        print(f)
    if report.checks:
        _print_checks(report.checks)
        return EXIT_OK if report.passed else EXIT_VALIDATION
    return EXIT_OK


def _print_checks(checks: list[dict]) -> None:
    for c in checks:
        print(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}: {c['detail']}")


def _cmd_validate(args) -> int:
    from .validation import run_checks

    checks = [c.as_dict() for c in run_checks(quick=args.quick, seed=args.seed, workers=args.workers)]
    _print_checks(checks)
    return EXIT_OK if all(c["passed"] for c in checks) else EXIT_VALIDATION


def _cmd_spectrum(args) -> int:
    from .dsp import spectrum, synthesize_trace, write_spectrum_csv
    from .scenarios import probe_pair

    cfg = _resolve(args)
    d = cfg.dsp
    probe = probe_pair(cfg)[args.probe]
    trace = synthesize_trace(
        probe,
        0.0,
        d.noise.model(),
        f_mod=cfg.probe.f_mod_hz,
        mod_depth=cfg.probe.mod_depth,
        duration=1.0 / d.vbw_hz,
        sample_rate=d.sample_rate_hz,
        seed=cfg.seed,
    )
    args.out.parent.mkdir(parents=True, exist_ok=True)
    print(write_spectrum_csv(spectrum(trace, d.rbw_hz, d.vbw_hz), args.out))
    return EXIT_OK


COMMANDS = {"run": _cmd_run, "validate": _cmd_validate, "spectrum": _cmd_spectrum}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DegenerateError, OutOfRangeError, ArithmeticError, ValueError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
