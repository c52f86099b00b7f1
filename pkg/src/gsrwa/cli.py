"""``gsrwa`` command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .exceptions import ConfigError, GsrwaError
from .sweep import build_config, read_config_file, render_svg, run

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

SUBCOMMANDS = {
    "sweep-coupling": "coupling_sweep",
    "sweep-detuning": "detuning_sweep",
    "entanglement": "entanglement",
    "crossing": "crossing",
    "point": "point",
}

# flag name -> help text; the config key is the flag with '-' replaced by '_'
_VALUE_FLAGS = {
    "omega": "oscillator frequency (energy unit)",
    "delta": "qubit frequency, or a comma-separated list",
    "g1-start": "first g1 value",
    "g1-stop": "last g1 value (inclusive)",
    "g1-step": "g1 increment",
    "g1": "fixed g1 (detuning sweep, point)",
    "delta-start": "first delta (detuning sweep)",
    "delta-stop": "last delta (detuning sweep)",
    "delta-step": "delta increment (detuning sweep)",
    "g2-rule": "equal | ratio:R | fixed:V",
    "methods": "comma-separated subset of gsrwa,gsrwa_analytic,gvm,grwa,exact",
    "oracle-tol": "truncation convergence tolerance of the exact oracle",
    "omega-ghz": "oscillator frequency in GHz (sets omega = 1, delta = delta_ghz/omega_ghz)",
    "delta-ghz": "qubit frequency in GHz",
    "offdiag": "first-excited block off-diagonal: hop | full",
    "jobs": "worker processes for independent rows",
    "out": "output CSV path (default: stdout)",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gsrwa", description="Anisotropic Rabi model ground-state sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="flat key = value config file")
        for flag, text in _VALUE_FLAGS.items():
            sp.add_argument(f"--{flag}", dest=flag.replace("-", "_"), help=text)
        sp.add_argument("--svg", action="store_true", default=None, help="also write a sibling .svg plot")
    return parser


def _mapping(args) -> dict[str, str]:
    values = read_config_file(args.config) if args.config else {}
    mode = SUBCOMMANDS[args.command]
    if values.get("mode", mode) != mode:
        raise ConfigError(f"config mode {values['mode']!r} does not match subcommand {args.command!r}")
    values["mode"] = mode
    for flag in _VALUE_FLAGS:
        key = flag.replace("-", "_")
        if getattr(args, key) is not None:
            values[key] = getattr(args, key)
    if args.svg:
        values["svg"] = "true"
    return values


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = build_config(_mapping(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        table = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GsrwaError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    text = table.csv()
    if cfg.output_path:
        path = Path(cfg.output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(text.encode("utf-8"))
        if cfg.emit_svg and table.plot_x:
            path.with_suffix(".svg").write_bytes(render_svg(table).encode("utf-8"))
    else:
        sys.stdout.write(text)
    for line in table.messages:
        print(line, file=sys.stderr)
    return EXIT_NUMERICAL if table.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
