"""Command-line interface: ``sweep``, ``figure``, ``verify`` and ``list-presets``."""

from __future__ import annotations

import argparse
import dataclasses
import re
import sys
from pathlib import Path

from .density import BellKind
from .noise import Channel
from .presets import PRESETS, figure_preset
from .protocols import ConfigurationError, Protocol
from .sweep import GridConfig, RunConfig, emit_csv, run_grid, run_sweep, verify_all

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_USAGE = 0, 1, 2

CONFIG_KEYS = ("protocol", "channel", "regime", "gamma_ratio", "depol_ratios", "initial", "tmax", "steps", "mode", "out")


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _number(token: str, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise UsageError(f"malformed number {token!r} for {what}") from None
    if value != value or value in (float("inf"), float("-inf")):
        raise UsageError(f"malformed number {token!r} for {what}")
    return value


def _slot_ratios(tokens: list[str]) -> tuple:
    """``r`` applies to every slot; ``slotN=r`` overrides one slot."""
    default, explicit = None, {}
    for raw in tokens:
        for token in filter(None, (t.strip() for t in raw.split(","))):
            m = re.fullmatch(r"slot([1-4])\s*=\s*(.+)", token)
            if m:
                explicit[int(m.group(1))] = _number(m.group(2), f"slot{m.group(1)}")
            elif "=" in token:
                raise UsageError(f"bad --gamma-ratio token {token!r}; use r or slotN=r")
            else:
                default = _number(token, "--gamma-ratio")
    return tuple(explicit.get(s, default) for s in (1, 2, 3, 4))


def _depol_ratios(text: str) -> tuple[float, float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise UsageError(f"--depol-ratios needs three comma-separated values, got {text!r}")
    return tuple(_number(p, "--depol-ratios") for p in parts)


def read_config_text(text: str) -> dict[str, object]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected key = value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"config line {lineno}: unknown key {key!r}")
        values[key] = [value] if key == "gamma_ratio" else value
    return values


def _sweep_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--protocol")
    parser.add_argument("--channel")
    parser.add_argument("--regime")
    parser.add_argument("--gamma-ratio", dest="gamma_ratio", action="append", metavar="R|slotN=R")
    parser.add_argument("--depol-ratios", dest="depol_ratios", metavar="R1,R2,R3")
    parser.add_argument("--initial")
    parser.add_argument("--tmax")
    parser.add_argument("--steps")
    parser.add_argument("--mode")
    parser.add_argument("--out")
    parser.add_argument("--config")


def config_from_values(flags: dict[str, object], file_values: dict[str, object] | None = None) -> RunConfig:
    """Merge file values and flags (flags win) into a validated :class:`RunConfig`."""
    file_values = dict(file_values or {})
    flags = {k: v for k, v in flags.items() if v is not None and k != "config"}
    ratio_from_flags = "gamma_ratio" in flags or "depol_ratios" in flags
    if ratio_from_flags and "regime" not in flags:
        # explicit ratios on the command line override a regime read from the file
        file_values.pop("regime", None)
    merged = {**file_values, **flags}

    for key in ("protocol", "channel"):
        if key not in merged:
            raise UsageError(f"missing --{key}")
    try:
        protocol = Protocol.parse(merged["protocol"])
        channel = Channel(str(merged["channel"]).strip().lower())
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    gamma = _slot_ratios(merged["gamma_ratio"]) if "gamma_ratio" in merged else None
    depol = _depol_ratios(str(merged["depol_ratios"])) if "depol_ratios" in merged else None
    regime = merged.get("regime")
    if regime is None:
        regime = "custom" if (gamma is not None or depol is not None) else "strong"
    initial = None
    if "initial" in merged:
        try:
            initial = BellKind.parse(str(merged["initial"]))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    steps = _number(str(merged.get("steps", 400)), "--steps")
    if steps != int(steps):
        raise UsageError(f"malformed integer {merged['steps']!r} for --steps")
    try:
        return RunConfig(
            protocol=protocol,
            channel=channel,
            regime=str(regime).strip().lower(),
            gamma_ratios=gamma,
            depol_ratios=depol,
            initial=initial,
            tmax=_number(str(merged.get("tmax", 20.0)), "--tmax"),
            steps=int(steps),
            mode=str(merged.get("mode", "analytic")).strip().lower(),
            out=merged.get("out"),
        )
    except ConfigurationError as exc:
        raise UsageError(str(exc)) from None


def parse_config(argv: list[str]) -> RunConfig:
    """Build a run configuration from ``sweep`` flags and an optional ``--config`` file."""
    parser = _Parser(prog="nmqcrypt sweep", add_help=False)
    _sweep_arguments(parser)
    ns, unknown = parser.parse_known_args(argv)
    if unknown:
        raise UsageError(f"unrecognised argument {unknown[0]!r}")
    file_values = {}
    if ns.config:
        try:
            text = Path(ns.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read config file {ns.config!r}: {exc.strerror}") from None
        file_values = read_config_text(text)
    return config_from_values(vars(ns), file_values)


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9.+-]+", "_", text).strip("_") or "run"


def run_figure(name: str, out_dir: Path, mode: str | None = None) -> list[Path]:
    """Compute every member of a preset and write one CSV per member."""
    members = figure_preset(name)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for i, member in enumerate(members):
        if isinstance(member, GridConfig):
            result = run_grid(member)
            result.metadata["figure"] = name
        else:
            if mode is not None:
                member = dataclasses.replace(member, mode=mode)
            result = run_sweep(member)
            result.metadata["figure"] = name
        path = out_dir / f"{name}_{i:02d}_{_slug(member.label)}.csv"
        emit_csv(result, path)
        written.append(path)
    return written


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nmqcrypt", description="Average fidelity of quantum cryptography protocols over non-Markovian channels.")
    sub = parser.add_subparsers(dest="command")
    sweep = sub.add_parser("sweep", help="sample one protocol/channel over time and write CSV")
    _sweep_arguments(sweep)
    fig = sub.add_parser("figure", help="regenerate the data of a figure preset")
    fig.add_argument("name")
    fig.add_argument("--out", default="figures", help="output directory (default: figures)")
    fig.add_argument("--mode", choices=("analytic", "oracle", "both"))
    ver = sub.add_parser("verify", help="cross-check every closed form against the Kraus oracle")
    ver.add_argument("--density", type=int, default=100)
    sub.add_parser("list-presets", help="list figure preset names")
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        if argv and argv[0] == "sweep" and not {"-h", "--help"} & set(argv[1:]):
            config = parse_config(argv[1:])
            curve = run_sweep(config)
            if config.out:
                emit_csv(curve, config.out)
            else:
                emit_csv(curve, sys.stdout)
            if curve.max_abs_diff is not None and curve.max_abs_diff > 1e-10:
                print(f"analytic and oracle disagree by {curve.max_abs_diff:.3e}", file=sys.stderr)
                return EXIT_VERIFY_FAILED
            return EXIT_OK
        args = parser.parse_args(argv)
        if args.command == "figure":
            for path in run_figure(args.name, Path(args.out), args.mode):
                print(path)
            return EXIT_OK
        if args.command == "verify":
            report = verify_all(args.density)
            print(report.render())
            return report.exit_code
        if args.command == "list-presets":
            for name, build in PRESETS.items():
                print(f"{name}\t{len(build())} member(s)")
            return EXIT_OK
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    except (UsageError, ConfigurationError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
