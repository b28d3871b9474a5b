"""
Command-line front end.

    dressed-cavity evolve --omega-bar 1.0 --g 0.5 --delta 0.1 --xi 0.6 --out evolve.csv
    dressed-cavity figures --which 2 --out fig2.csv

Values resolve as command-line flags, then the --config file (flat key=value,
keys spelled like the flags), then DRESSED_CAVITY_* environment defaults.
"""

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any, NoReturn, Optional

from dotenv import dotenv_values

from dressed_cavity import __version__
from dressed_cavity.errors import EXIT_OK, EXIT_USAGE, CavityError, UsageError
from dressed_cavity.models.schemas import (
    FINE_STRUCTURE,
    CavityConfig,
    RunSpec,
    SuperpositionSpec,
    TimeGrid,
    Tolerances,
    validated,
)
from dressed_cavity.runner import run
from dressed_cavity.settings import get_settings

logger = logging.getLogger("dressed_cavity.cli")

DEFAULT_OMEGA_BAR = 1.0
DEFAULT_G = 0.5
FIGURE_THREE_DELTA = 0.1
FIGURE_T_END = {1: lambda g: 15.0, 2: lambda g: 20.0 / g, 3: lambda g: 200.0}

TRUE_WORDS = {"1", "true", "yes", "on"}
FALSE_WORDS = {"0", "false", "no", "off"}


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting."""

    def error(self, message: str) -> NoReturn:
        raise UsageError(message, command=self.prog)


class ComponentFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        record.component = record.name.rsplit(".", 1)[-1]
        return True


def configure_logging(level: str = "INFO") -> None:
    """Console logging to stderr as '[component] message'."""
    root = logging.getLogger("dressed_cavity")
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.addFilter(ComponentFilter())
    handler.setFormatter(logging.Formatter("[%(component)s] %(levelname)s %(message)s"))
    root.addHandler(handler)
    try:
        root.setLevel(level.upper())
    except ValueError as e:
        raise UsageError(f"unknown log level {level!r}", flag="--log-level") from e
    root.propagate = False


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    physics = common.add_argument_group("cavity")
    physics.add_argument("--omega-bar", type=float, help="renormalised oscillator frequency")
    physics.add_argument("--g", type=float, help="coupling constant")
    physics.add_argument("--radius", type=float, help="cavity radius R")
    physics.add_argument("--wave-speed", type=float, help="field propagation speed c")
    physics.add_argument("--delta", type=float, help="gR/(pi c); sets R with c = 1")
    physics.add_argument(
        "--alpha-coupling", action="store_true", help="set g = omega_bar / 137"
    )
    physics.add_argument("--truncation", type=int, help="number of field modes K")
    physics.add_argument("--small-truncation", type=int, help="modes kept by the expansion")
    physics.add_argument("--ground-mode", choices=["printed", "self_consistent"])
    physics.add_argument(
        "--no-ground-check",
        action="store_true",
        help="do not reject cavities outside the ground-mode condition",
    )
    physics.add_argument("--drop-eta-term", action="store_true")

    state = common.add_argument_group("initial state")
    state.add_argument("--xi", type=float, help="excited-state weight, 0 < xi < 1")
    state.add_argument("--phi", type=float, help="relative phase")

    grid = common.add_argument_group("time grid")
    grid.add_argument("--t-start", type=float)
    grid.add_argument("--t-end", type=float)
    grid.add_argument("--n-points", type=int)
    grid.add_argument("--log-time", action="store_true", help="logarithmic spacing")

    run_opts = common.add_argument_group("run")
    run_opts.add_argument("--out", help="CSV output path ('-' for stdout)")
    run_opts.add_argument("--config", help="key=value file with default flag values")
    run_opts.add_argument("--tolerance", type=float, help="root-finding relative tolerance")
    run_opts.add_argument("--metrics-file", help="write Prometheus metrics here")
    run_opts.add_argument("--log-level")
    return common


def build_parser() -> CliParser:
    parser = CliParser(prog="dressed-cavity", description="Dressed oscillator in a cavity")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", parser_class=CliParser, required=True)
    common = _common_options()

    def command(name: str, help_text: str) -> CliParser:
        return commands.add_parser(
            name, parents=[common], help=help_text, argument_default=argparse.SUPPRESS
        )

    spectrum = command("spectrum", "normal-mode frequencies and couplings")
    spectrum.add_argument("--method", choices=["mode-sum", "small-cavity"])
    spectrum.add_argument("--couplings", action="store_true", help="add t0r and defect columns")
    spectrum.add_argument("--tk-matrix", help="write the field rows t_k^r to this path")

    evolve = command("evolve", "survival amplitude and reduced density matrix")
    evolve.add_argument("--method", choices=["mode-sum", "small-cavity", "continuum"])

    continuum = command("continuum", "infinite-cavity evolution")
    continuum.add_argument("--approximation", choices=["exact", "weak", "strong"])

    command("small-cavity", "small-cavity population against the exact sum")
    command("compare", "mode sum against the continuum and small-cavity paths")

    figures = command("figures", "figure datasets")
    figures.add_argument("--which", type=int, choices=[1, 2, 3])

    classify = command("classify", "dissipative or nondissipative")
    classify.add_argument("--continuum", action="store_true", help="classify the infinite cavity")
    classify.add_argument("--floor", type=float, help="empirical floor as a fraction of xi")
    return parser


def _option_actions(parser: CliParser, command: str) -> dict[str, argparse.Action]:
    subparsers = next(
        action for action in parser._actions if isinstance(action, argparse._SubParsersAction)
    )
    sub = subparsers.choices[command]
    return {
        action.dest: action
        for action in sub._actions
        if action.option_strings and action.dest not in ("help", "config")
    }


def _convert(action: argparse.Action, raw: Optional[str]) -> Any:
    flag = action.option_strings[0]
    text = (raw or "").strip()
    if isinstance(action, argparse._StoreTrueAction):
        if text.lower() in TRUE_WORDS:
            return True
        if text.lower() in FALSE_WORDS:
            return False
        raise UsageError(f"{flag} expects true or false, got {raw!r}", flag=flag)
    try:
        value = action.type(text) if action.type else text
    except (TypeError, ValueError) as e:
        raise UsageError(f"{flag}: invalid value {raw!r}", flag=flag) from e
    if action.choices is not None and value not in action.choices:
        raise UsageError(f"{flag}: {value!r} is not one of {list(action.choices)}", flag=flag)
    return value


def read_config_file(path: str, actions: dict[str, argparse.Action]) -> dict[str, Any]:
    if not Path(path).is_file():
        raise UsageError(f"config file {path} not found", flag="--config")
    values = {}
    for key, raw in dotenv_values(path).items():
        dest = key.strip().lstrip("-").replace("-", "_").lower()
        if dest not in actions:
            raise UsageError(f"unknown key {key!r} in {path}", flag="--config", key=key)
        values[dest] = _convert(actions[dest], raw)
    return values


def collect_options(argv: Optional[Sequence[str]] = None) -> tuple[str, dict[str, Any]]:
    """Command name and the merged option values, flags over config file."""
    parser = build_parser()
    namespace = vars(parser.parse_args(argv))
    command = namespace.pop("command")
    values: dict[str, Any] = {}
    config_path = namespace.pop("config", None)
    if config_path:
        values.update(read_config_file(config_path, _option_actions(parser, command)))
    values.update(namespace)
    return command, values


def _coupling(values: dict[str, Any], omega_bar: float) -> float:
    if values.get("alpha_coupling"):
        if "g" in values:
            raise UsageError("--g and --alpha-coupling are mutually exclusive", flag="--g")
        return omega_bar * FINE_STRUCTURE
    return values.get("g", DEFAULT_G)


def _cavity(
    values: dict[str, Any], omega_bar: float, g: float, default_delta: Optional[float]
) -> Optional[CavityConfig]:
    truncation = values.get("truncation")
    if "delta" in values and "radius" in values:
        raise UsageError("--delta and --radius are mutually exclusive", flag="--delta")
    if "delta" in values and "wave_speed" in values:
        raise UsageError("--delta fixes the wave speed to 1", flag="--wave-speed")
    if "radius" in values:
        fields: dict[str, Any] = dict(
            omega_bar=omega_bar,
            g=g,
            radius=values["radius"],
            wave_speed=values.get("wave_speed", 1.0),
        )
        if truncation is not None:
            fields["truncation"] = truncation
        return validated(CavityConfig, **fields)
    delta = values.get("delta", default_delta)
    if delta is None:
        return None
    return CavityConfig.from_delta(omega_bar, g, delta, truncation)


def build_run_spec(command: str, values: dict[str, Any]) -> RunSpec:
    omega_bar = values.get("omega_bar", DEFAULT_OMEGA_BAR)
    if not omega_bar > 0:
        raise UsageError("--omega-bar must be > 0", flag="--omega-bar")
    g = _coupling(values, omega_bar)

    which = values.get("which")
    if command == "figures" and which is None:
        raise UsageError("figures needs --which 1, 2 or 3", flag="--which")
    default_delta = FIGURE_THREE_DELTA if command == "figures" and which == 3 else None
    config = _cavity(values, omega_bar, g, default_delta)

    grid: dict[str, Any] = {
        key: values[key] for key in ("t_start", "t_end", "n_points") if key in values
    }
    if values.get("log_time"):
        grid["spacing"] = "log"
    if command == "figures" and "t_end" not in grid:
        grid["t_end"] = FIGURE_T_END[which](g)

    tolerances: dict[str, Any] = {}
    if "tolerance" in values:
        tolerances["root_rtol"] = values["tolerance"]
    if "floor" in values:
        tolerances["dissipation_floor"] = values["floor"]

    superposition: dict[str, Any] = {"xi": values.get("xi", 0.5)}
    if "phi" in values:
        superposition["phi"] = values["phi"]

    fields: dict[str, Any] = dict(
        command=command,
        omega_bar=omega_bar,
        g=g,
        config=config,
        superposition=validated(SuperpositionSpec, **superposition),
        time_grid=validated(TimeGrid, **grid),
        output_path=values.get("out"),
        tolerances=validated(Tolerances, **tolerances),
        which=which,
        keep_eta_term=not values.get("drop_eta_term", False),
        enforce_ground=not values.get("no_ground_check", False),
        couplings=values.get("couplings", False),
        tk_matrix_path=values.get("tk_matrix"),
        continuum=values.get("continuum", False),
        metrics_file=values.get("metrics_file"),
    )
    for key in ("method", "ground_mode", "approximation", "small_truncation"):
        if key in values:
            fields[key] = values[key]
    return validated(RunSpec, **fields)


def parse_run_spec(argv: Optional[Sequence[str]] = None) -> RunSpec:
    command, values = collect_options(argv)
    return build_run_spec(command, values)


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging(get_settings().log_level)
    try:
        command, values = collect_options(argv)
        if "log_level" in values:
            configure_logging(values["log_level"])
        spec = build_run_spec(command, values)
    except CavityError as e:
        logger.error(e.describe())
        return e.exit_code
    except SystemExit as e:
        # --help and --version
        return EXIT_OK if not e.code else EXIT_USAGE

    report = run(spec)
    if report.error is not None:
        logger.error(report.error.describe())
    logger.info(
        "%s: %d rows, max defect %.3e, %d warnings, %.3fs",
        report.command,
        report.rows_emitted,
        report.max_defect,
        len(report.warnings),
        report.wall_time,
    )
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
