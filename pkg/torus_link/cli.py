"""Command-line front-end: JSON configurations in, JSON reports out.

Reports go to stdout, logs and the error envelope to stderr. Exit codes are
0 on success or agreement, 1 on input and domain errors, 2 when the methods
disagree or an integrality check fails.
"""

import functools
import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Union

import click

from torus_link import closed_form, core, oracle, spectral, t2
from torus_link.config import config
from torus_link.errors import ParseError, TorusLinkError, ValidationError
from torus_link.logging_config import setup_logging

logger = logging.getLogger(__name__)

MODES = ("t3", "t2")
DIMENSIONS = {"t3": 3, "t2": 2}
DISAGREEMENT_EXIT_CODE = 2


@dataclass
class InputConfig:
    """Validated configuration: two collections and the method options"""

    mode: str
    gamma: Union[core.MultiGeodesic, List[t2.T2Geodesic]]
    upsilon: Union[core.MultiGeodesic, List[t2.T2Geodesic]]
    options: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "mode": self.mode,
            "gamma": [g.to_dict() for g in self.gamma],
            "upsilon": [g.to_dict() for g in self.upsilon],
            "options": dict(self.options),
        }


def _integer(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{where} must be an integer", field=where)
    return value


def _rational(value, where):
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ValidationError(f"{where} must be a rational string like \"1/4\"", field=where)
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"{where} is not a rational number: {value!r}", field=where)


def _curve(record, mode, where):
    if not isinstance(record, dict):
        raise ValidationError(f"{where} must be an object", field=where)
    size = DIMENSIONS[mode]
    for key in ("direction", "origin"):
        value = record.get(key)
        if not isinstance(value, list) or len(value) != size:
            raise ValidationError(f"{where}.{key} must be a list of {size} entries", field=f"{where}.{key}")
    direction = [_integer(c, f"{where}.direction[{i}]") for i, c in enumerate(record["direction"])]
    origin = [_rational(c, f"{where}.origin[{i}]") for i, c in enumerate(record["origin"])]
    if not any(direction):
        raise ValidationError(f"{where}.direction must be nonzero", field=f"{where}.direction")
    if mode == "t3":
        return core.Geodesic.of(direction, origin)
    return t2.T2Geodesic.of(direction, origin)


def _collection(document, name, mode):
    records = document.get(name)
    if not isinstance(records, list) or not records:
        raise ValidationError(f"{name} must be a nonempty list of curves", field=name)
    curves = [_curve(record, mode, f"{name}[{i}]") for i, record in enumerate(records)]
    return core.MultiGeodesic(tuple(curves)) if mode == "t3" else curves


def _options(document):
    options = document.get("options", {})
    if not isinstance(options, dict):
        raise ValidationError("options must be an object", field="options")
    result = {}
    if "t" in options:
        values = options["t"] if isinstance(options["t"], list) else [options["t"]]
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0 for v in values):
            raise ValidationError("options.t must hold positive numbers", field="options.t")
        result["t"] = [float(v) for v in values]
    if "kmax" in options:
        result["kmax"] = parse_kmax(options["kmax"], "options.kmax")
    if "require_trivial" in options:
        if not isinstance(options["require_trivial"], bool):
            raise ValidationError("options.require_trivial must be a boolean", field="options.require_trivial")
        result["require_trivial"] = options["require_trivial"]
    return result


def parse_kmax(value, where="kmax"):
    if value == spectral.AUTO:
        return spectral.AUTO
    try:
        kmax = int(value)
    except (TypeError, ValueError):
        kmax = 0
    if isinstance(value, bool) or kmax < 1 or str(kmax) != str(value).strip():
        raise ValidationError(f"{where} must be a positive integer or 'auto', got {value!r}", field=where)
    return kmax


def parse_input(text):
    """Parse and validate a JSON configuration document"""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno)
    if not isinstance(document, dict):
        raise ValidationError("configuration must be a JSON object", field="$")

    mode = document.get("mode", "t3")
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {', '.join(MODES)}, got {mode!r}", field="mode")
    return InputConfig(
        mode=mode,
        gamma=_collection(document, "gamma", mode),
        upsilon=_collection(document, "upsilon", mode),
        options=_options(document),
    )


def read_input(path):
    if path in (None, "-"):
        return parse_input(click.get_text_stream("stdin").read())
    try:
        with open(path, encoding="utf-8") as handle:
            return parse_input(handle.read())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", path=path)
    except UnicodeDecodeError:
        raise ParseError(f"{path} is not UTF-8 text", path=path)


# -- reports ----------------------------------------------------------------

def _summary(report, indent=""):
    lines = []
    for key, value in report.items():
        if isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            lines.extend(_summary(value, indent + "  "))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{indent}{key}: {len(value)} entries")
        else:
            lines.append(f"{indent}{key}: {value}")
    return lines


def emit(report, pretty=False):
    if pretty:
        click.echo("\n".join(_summary(report)))
    else:
        click.echo(json.dumps(report))


def _require_mode(cfg, mode):
    if cfg.mode != mode:
        raise ValidationError(f"this command needs a {mode} configuration, got {cfg.mode}", field="mode")


def _heat_times(ctx, cfg, cli_times):
    if cli_times:
        return list(cli_times)
    return cfg.options.get("t", list(ctx.obj["HEAT_TIMES"]))


def _spectral_run(ctx, cfg, times, kmax):
    settings = ctx.obj
    results = []
    warnings = []
    for t in times:
        params = spectral.SpectralParams(t=t, kmax=kmax, threshold=settings["AUTO_KMAX_THRESHOLD"])
        total = spectral.spectral_total(cfg.gamma, cfg.upsilon, params)
        results.append({"t": t, "kmax": kmax, "total": total})
        logger.info("spectral total %.17g at t=%g", total, t)
        warnings += spectral.convergence_warnings(
            cfg.gamma,
            cfg.upsilon,
            t,
            margin=settings["DISCONTINUITY_MARGIN"],
            widths=settings["CONVERGENCE_WIDTHS"],
        )
    return results, warnings


def _guarded(command):
    """Render domain errors as the JSON envelope on stderr with their exit code"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return command(*args, **kwargs)
        except TorusLinkError as exc:
            logger.error("%s: %s", type(exc).__name__, exc.message)
            click.echo(json.dumps(exc.to_dict()), err=True)
            ctx.exit(exc.exit_code)

    return wrapper


def input_options(command):
    command = click.option("--pretty", is_flag=True, help="Human-readable summary instead of JSON.")(command)
    command = click.option(
        "--input", "input_path", default="-", show_default=True, help="Configuration file, '-' for stdin."
    )(command)
    return command


def spectral_options(command):
    command = click.option("--kmax", default=None, help="Series cutoff: a positive integer or 'auto'.")(command)
    command = click.option("--t", "times", type=float, multiple=True, help="Heat time; repeat for a schedule.")(command)
    return command


# -- commands ---------------------------------------------------------------

@click.group(name="torus-link")
@click.option(
    "--profile",
    type=click.Choice(sorted(config)),
    default="default",
    show_default=True,
    help="Configuration profile.",
)
@click.pass_context
def cli(ctx, profile):
    """Linking numbers of closed geodesics on the flat 3-torus."""
    settings = config[profile].init_app({})
    setup_logging(settings["LOG_LEVEL"])
    ctx.obj = settings
    logger.debug("profile %s", profile)


@click.command("closed-form")
@input_options
@click.option("--require-trivial", is_flag=True, help="Reject homologically non-trivial collections.")
@click.pass_context
@_guarded
def closed_form_command(ctx, input_path, pretty, require_trivial):
    """Exact rational linking number."""
    cfg = read_input(input_path)
    _require_mode(cfg, "t3")
    require_trivial = require_trivial or cfg.options.get("require_trivial", False)
    report = closed_form.linking_number(cfg.gamma, cfg.upsilon, require_trivial=require_trivial)
    emit({"closed_form": report.to_dict()}, pretty)


@click.command("spectral")
@input_options
@spectral_options
@click.pass_context
@_guarded
def spectral_command(ctx, input_path, pretty, times, kmax):
    """Heat-regularized spectral series."""
    cfg = read_input(input_path)
    _require_mode(cfg, "t3")
    kmax = parse_kmax(kmax, "--kmax") if kmax is not None else cfg.options.get("kmax", spectral.AUTO)
    heat_times = list(times) if times else cfg.options.get("t", [min(ctx.obj["HEAT_TIMES"])])
    results, warnings = _spectral_run(ctx, cfg, heat_times, kmax)
    emit({"spectral": results, "warnings": warnings}, pretty)


@click.command("oracle")
@input_options
@click.pass_context
@_guarded
def oracle_command(ctx, input_path, pretty):
    """Signed intersections with a bounding chain."""
    cfg = read_input(input_path)
    _require_mode(cfg, "t3")
    result = oracle.run_oracle(cfg.gamma, cfg.upsilon, max_retries=ctx.obj["MAX_APEX_RETRIES"])
    emit({"oracle": result.to_dict()}, pretty)


@click.command("verify")
@input_options
@spectral_options
@click.option("--tol", type=float, default=None, help="Spectral tolerance at the smallest heat time.")
@click.pass_context
@_guarded
def verify_command(ctx, input_path, pretty, times, kmax, tol):
    """Run all three methods and compare them."""
    cfg = read_input(input_path)
    _require_mode(cfg, "t3")
    tolerance = tol if tol is not None else ctx.obj["VERIFY_TOLERANCE"]
    kmax = parse_kmax(kmax, "--kmax") if kmax is not None else cfg.options.get("kmax", spectral.AUTO)

    exact = closed_form.linking_number(cfg.gamma, cfg.upsilon, require_trivial=True)
    results, warnings = _spectral_run(ctx, cfg, sorted(_heat_times(ctx, cfg, times), reverse=True), kmax)
    counted = oracle.run_oracle(cfg.gamma, cfg.upsilon, max_retries=ctx.obj["MAX_APEX_RETRIES"])

    finest = results[-1]["total"]
    spectral_error = abs(finest - float(exact.total))
    agree = spectral_error <= tolerance and counted.total == exact.total
    report = {
        "closed_form": exact.to_dict(),
        "spectral": results,
        "oracle": counted.to_dict(),
        "spectral_error": spectral_error,
        "tolerance": tolerance,
        "verdict": "pass" if agree else "fail",
        "warnings": warnings,
    }
    emit(report, pretty)
    if not agree:
        logger.error("methods disagree: closed form %s, oracle %d, spectral %.17g",
                     exact.total, counted.total, finest)
        ctx.exit(DISAGREEMENT_EXIT_CODE)


@click.command("t2")
@input_options
@click.option("--cross-check", is_flag=True, help="Also count with the oracle on rationalized lifts.")
@click.pass_context
@_guarded
def t2_command(ctx, input_path, pretty, cross_check):
    """Geodesic-flow orbits of T^2 via the intersection-angle formula."""
    cfg = read_input(input_path)
    _require_mode(cfg, "t2")
    settings = ctx.obj
    report = t2.corollary_report(cfg.gamma, cfg.upsilon, tolerance=settings["T2_INTEGRALITY_TOLERANCE"])
    lifted = t2.lifted_closed_form(cfg.gamma, cfg.upsilon)
    output = {"corollary": report.to_dict(), "lifted_closed_form": lifted, "warnings": report.warnings}
    agree = math.isclose(report.total, lifted, rel_tol=0.0, abs_tol=settings["T2_INTEGRALITY_TOLERANCE"])

    if cross_check:
        bits = settings["LIFT_DENOMINATOR_BITS"]
        safe = t2.perturbation_is_safe(cfg.gamma, cfg.upsilon, bits)
        lifted_gamma = core.MultiGeodesic(tuple(t2.rationalize_lift(g, bits) for g in cfg.gamma))
        lifted_upsilon = core.MultiGeodesic(tuple(t2.rationalize_lift(h, bits) for h in cfg.upsilon))
        counted = oracle.run_oracle(lifted_gamma, lifted_upsilon, max_retries=settings["MAX_APEX_RETRIES"])
        output["oracle"] = {**counted.to_dict(), "perturbation_safe": safe}
        if safe:
            agree = agree and counted.total == report.nearest_integer
        else:
            output["warnings"].append(f"rounding lift heights to 2^-{bits} may change the oracle count")

    output["verdict"] = "pass" if agree else "fail"
    emit(output, pretty)
    if not agree:
        ctx.exit(DISAGREEMENT_EXIT_CODE)


COMMANDS = (closed_form_command, spectral_command, oracle_command, verify_command, t2_command)
