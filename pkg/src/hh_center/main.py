"""Command-line interface for hh-center."""

import csv
import functools
import io
import json
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List

import click
from dotenv import load_dotenv
from pydantic import ValidationError

from . import __version__
from .bounds import OPTIMIZER_TOL, ConvexGauge, PiecewiseLinearConvex, evaluate_bound, make_gauge, slope_trace
from .center import SLICE_TIE_TOL, find_center
from .conesolver import BISECTION_TOL
from .config import RunConfig, Tolerances, parse_point, parse_seed_range
from .errors import DegenerateBodyError, InputError
from .geometry import Polytope3
from .schemas import load_body, load_function, load_gauge
from .utils import dump_json, ensure_directory, get_logger
from .verify import format_repro_table, repro_table, section_bound_check, sweep

# Load environment variables
load_dotenv()

logger = get_logger(__name__)

EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_VIOLATION = 4


def handle_errors(command: Callable) -> Callable:
    """Map library exceptions to exit codes."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (InputError, ValidationError, json.JSONDecodeError) as e:
            click.echo(f"Input error: {e}", err=True)
            sys.exit(EXIT_INPUT)
        except DegenerateBodyError as e:
            click.echo(f"Degenerate geometry: {e}", err=True)
            sys.exit(EXIT_DEGENERATE)
        except Exception as e:
            click.echo(f"Error: {e}", err=True)
            logger.exception("Command failed")
            sys.exit(1)

    return wrapper


def _load(loader: Callable, path: Path):
    try:
        return loader(path)
    except ValidationError as e:
        raise InputError(f"{path}: {e}") from e
    except OSError as e:
        raise InputError(f"{path}: {e}") from e


def _flatten(data: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{name}."))
        else:
            flat[name] = json.dumps(value) if isinstance(value, list) else value
    return flat


def _csv(rows: List[Dict[str, Any]]) -> str:
    buffer = io.StringIO()
    flat = [_flatten(row) for row in rows]
    writer = csv.DictWriter(buffer, fieldnames=list(flat[0].keys()), lineterminator="\n")
    writer.writeheader()
    writer.writerows(flat)
    return buffer.getvalue().rstrip("\n")


def _table(data: Dict[str, Any]) -> str:
    flat = _flatten(data)
    width = max(len(k) for k in flat)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in flat.items())


def _emit(data: Dict[str, Any], fmt: str) -> None:
    if fmt == "json":
        click.echo(dump_json(data))
    elif fmt == "csv":
        click.echo(_csv([data]))
    else:
        click.echo(_table(data))


def _gauge(config: RunConfig) -> ConvexGauge:
    if config.gauge == "pwl":
        gauge = _load(load_gauge, config.gauge_file)
        if not isinstance(gauge, PiecewiseLinearConvex):
            raise InputError(f"{config.gauge_file}: expected a pwl-convex gauge")
        return gauge
    return make_gauge(config.gauge, config.alpha)


def _tolerances(**values: float) -> Tolerances:
    """Tolerances from the --tol-* options."""
    return Tolerances(**{name.removeprefix("tol_"): value for name, value in values.items()})


def _center(body, f, config: RunConfig):
    tol = config.tolerances
    return find_center(
        body, f, x0=config.start_point, knot_count=config.knot_count, tie_tol=tol.slice_tie, cone_tol=tol.cone
    )


format_option = click.option(
    "--format", "output_format", type=click.Choice(["json", "table", "csv"]), default="json", help="Output format (default: json)"
)
knots_option = click.option("--knots", "knot_count", type=int, default=1025, help="Uniform profile knots (default: 1025)")
start_option = click.option("--start-point", type=str, default=None, help='Start point "x,y[,z]" (default: centroid)')


def tolerance_options(command: Callable) -> Callable:
    command = click.option(
        "--tol-optimizer", type=float, default=OPTIMIZER_TOL, help=f"Golden-section width on the slope (default: {OPTIMIZER_TOL:g})"
    )(command)
    command = click.option(
        "--tol-cone", type=float, default=BISECTION_TOL, help=f"Bisection width of the cone solver (default: {BISECTION_TOL:g})"
    )(command)
    command = click.option(
        "--tol-slice-tie", type=float, default=SLICE_TIE_TOL, help=f"Relative tie gap on the median slice (default: {SLICE_TIE_TOL:g})"
    )(command)
    return command


def gauge_options(command: Callable) -> Callable:
    command = click.option("--gauge-file", type=click.Path(path_type=Path), default=None, help="Knots of a pwl gauge (JSON)")(command)
    command = click.option("--alpha", type=float, default=None, help="Exponent of the power gauge (>= 1)")(command)
    command = click.option(
        "--phi", type=click.Choice(["power", "exp", "exp-square", "pwl"]), default="power", help="Convex gauge (default: power)"
    )(command)
    return command


@click.group()
@click.version_option(version=__version__)
def cli():
    """hh-center: center points and truncated-cone bounds for concave functions.

    Computes the center point of a convex body for a concave function,
    evaluates the sharp upper bound for averages of phi(f), and checks it
    against direct integration.
    """
    pass


@cli.command()
@click.argument("body_file", type=click.Path(path_type=Path))
@click.argument("function_file", type=click.Path(path_type=Path))
@start_option
@knots_option
@tolerance_options
@format_option
@handle_errors
def center(body_file, function_file, start_point, knot_count, tol_slice_tie, tol_cone, tol_optimizer, output_format):
    """Compute the center point of a body for a concave function.

    Example:
        hh-center center triangle.json f.json
        hh-center center square.json f.json --start-point "0.2,0.4" --format table
    """
    config = RunConfig(
        command="center",
        body_file=body_file,
        function_file=function_file,
        start_point=parse_point(start_point) if start_point else None,
        knot_count=knot_count,
        output_format=output_format,
        tolerances=_tolerances(tol_slice_tie=tol_slice_tie, tol_cone=tol_cone, tol_optimizer=tol_optimizer),
    )
    body = _load(load_body, config.body_file)
    f = _load(load_function, config.function_file)
    result = _center(body, f, config)
    _emit(result.to_dict(), config.output_format)


@cli.command()
@click.argument("body_file", type=click.Path(path_type=Path))
@click.argument("function_file", type=click.Path(path_type=Path))
@gauge_options
@click.option(
    "--method",
    type=click.Choice(["generic", "closed-form-2d", "closed-form-3d", "conjecture"]),
    default="generic",
    help="Bound evaluation method (default: generic)",
)
@click.option("--per-volume", is_flag=True, help="Divide the bound by the body volume")
@click.option("--trace", "trace_file", type=click.Path(path_type=Path), default=None, help="Write (m, F(m)) rows to CSV")
@start_option
@knots_option
@tolerance_options
@format_option
@handle_errors
def bound(
    body_file,
    function_file,
    phi,
    alpha,
    gauge_file,
    method,
    per_volume,
    trace_file,
    start_point,
    knot_count,
    tol_slice_tie,
    tol_cone,
    tol_optimizer,
    output_format,
):
    """Evaluate the truncated-cone bound for ∫ phi(f) over a body.

    Example:
        hh-center bound triangle.json f.json --phi power --alpha 1
        hh-center bound square.json f.json --phi exp --per-volume --trace trace.csv
    """
    config = RunConfig(
        command="bound",
        body_file=body_file,
        function_file=function_file,
        gauge=phi,
        alpha=alpha,
        gauge_file=gauge_file,
        method=method,
        per_volume=per_volume,
        trace_file=trace_file,
        start_point=parse_point(start_point) if start_point else None,
        knot_count=knot_count,
        output_format=output_format,
        tolerances=_tolerances(tol_slice_tie=tol_slice_tie, tol_cone=tol_cone, tol_optimizer=tol_optimizer),
    )
    gauge = _gauge(config)
    body = _load(load_body, config.body_file)
    f = _load(load_function, config.function_file)
    result = _center(body, f, config)
    report = evaluate_bound(
        body.dim, body.volume(), result.f_at_center, gauge, config.method, tol=config.tolerances.optimizer
    )
    if config.per_volume:
        report = report.per_unit_volume()
    if config.trace_file is not None:
        rows = slope_trace(body.dim, body.volume(), result.f_at_center, gauge)
        ensure_directory(config.trace_file.resolve().parent)
        with open(config.trace_file, "w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=["m", "F", "r_m", "t_m"], lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        logger.info(f"Wrote {len(rows)} trace rows to {config.trace_file}")
    data = report.to_dict()
    data["point"] = result.point.tolist()
    _emit(data, config.output_format)


@cli.command()
@click.option("--seeds", required=True, help='Seed range "A..B" (inclusive)')
@click.option("--dim", type=int, default=2, help="Dimension of the random bodies (2 or 3)")
@gauge_options
@click.option(
    "--method",
    type=click.Choice(["generic", "closed-form-2d", "closed-form-3d", "conjecture"]),
    default="generic",
    help="Bound evaluation method (default: generic)",
)
@click.option("--threads", type=int, default=None, help="Worker threads (default: HHC_THREADS or CPU count)")
@click.option("--tol-equality", type=float, default=1e-7, help="Equality tolerance (default: 1e-7)")
@click.option("--tol-violation", type=float, default=1e-7, help="Violation tolerance (default: 1e-7)")
@knots_option
@tolerance_options
@format_option
@handle_errors
def verify(
    seeds,
    dim,
    phi,
    alpha,
    gauge_file,
    method,
    threads,
    tol_equality,
    tol_violation,
    knot_count,
    tol_slice_tie,
    tol_cone,
    tol_optimizer,
    output_format,
):
    """Check the inequality on seeded random instances.

    Exits with status 4 when any instance violates the bound.

    Example:
        hh-center verify --seeds 1..100 --dim 2 --phi power --alpha 2
        hh-center verify --seeds 1..10 --dim 3 --phi exp --format table
    """
    options = dict(
        command="verify",
        seeds=parse_seed_range(seeds),
        dim=dim,
        gauge=phi,
        alpha=alpha,
        gauge_file=gauge_file,
        method=method,
        knot_count=knot_count,
        output_format=output_format,
        tolerances=_tolerances(
            tol_equality=tol_equality,
            tol_violation=tol_violation,
            tol_slice_tie=tol_slice_tie,
            tol_cone=tol_cone,
            tol_optimizer=tol_optimizer,
        ),
    )
    if threads is not None:
        options["threads"] = threads
    config = RunConfig(**options)
    gauge = _gauge(config)
    records, summary = sweep(
        config.seeds,
        config.dim,
        gauge,
        threads=config.threads,
        method=config.method,
        knot_count=config.knot_count,
        tolerances=config.tolerances,
    )
    rows = [r.to_dict() for r in records]
    if config.output_format == "json":
        for row in rows:
            click.echo(json.dumps(row, sort_keys=True, ensure_ascii=False))
        click.echo(json.dumps({"summary": summary.to_dict()}, sort_keys=True))
    elif config.output_format == "csv":
        click.echo(_csv([{k: v for k, v in row.items() if k != "center"} for row in rows]))
    else:
        click.echo("seed | status | integral | bound | slack")
        for r in records:
            click.echo(f"{r.seed} | {r.status} | {r.integral:.10g} | {r.bound:.10g} | {r.slack:.3e}")
        click.echo(_table({"summary": summary.to_dict()}))
    if summary.violations:
        sys.exit(EXIT_VIOLATION)


@cli.command("section-bound")
@click.argument("body_file", type=click.Path(path_type=Path))
@click.option("--plane", type=click.Choice(["xy", "xz", "yz"]), default="xy", help="Coordinate plane of the shadow")
@knots_option
@tolerance_options
@format_option
@handle_errors
def section_bound(body_file, plane, knot_count, tol_slice_tie, tol_cone, tol_optimizer, output_format):
    """Check the section/projection volume bound for a 3D polytope.

    Example:
        hh-center section-bound cube.json --plane xz
    """
    config = RunConfig(
        command="section-bound",
        body_file=body_file,
        plane=plane,
        knot_count=knot_count,
        output_format=output_format,
        tolerances=_tolerances(tol_slice_tie=tol_slice_tie, tol_cone=tol_cone, tol_optimizer=tol_optimizer),
    )
    body = _load(load_body, config.body_file)
    if not isinstance(body, Polytope3):
        raise InputError(f"{config.body_file}: section-bound needs a polytope3 body")
    record = section_bound_check(body, config.plane, knot_count=config.knot_count, tolerances=config.tolerances)
    _emit(record.to_dict(), config.output_format)
    if record.is_violation:
        sys.exit(EXIT_VIOLATION)


@cli.command()
@click.option(
    "--format", "output_format", type=click.Choice(["json", "table", "csv"]), default="table", help="Output format (default: table)"
)
@handle_errors
def repro(output_format):
    """Print the printed constants next to the optimizer values.

    Flagged rows are informational; the exit status is 0.
    """
    rows = repro_table()
    if output_format == "table":
        click.echo(format_repro_table(rows))
    elif output_format == "csv":
        click.echo(_csv([row.to_dict() for row in rows]))
    else:
        click.echo(dump_json([row.to_dict() for row in rows]))


if __name__ == "__main__":
    cli()
