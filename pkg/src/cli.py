#!/usr/bin/env python3
"""
Command-line entry point.

Exit codes: 0 success, 1 internal fault, 2 invalid arguments,
3 resource limits, 4 partial result (artifacts still written).
"""

import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import click

from src.config import config
from src.enums import DecayMode, ErrorInfo, LatticeVector, MeasureMethod
from src.errors import ActionableError, InternalConsistencyError, InvalidArgumentError, ResourceLimitError, TechnicalError
from src.lattice import coprime_density, enumerate_generators, prime_slope_gap
from src.reporting import RunReport, quantity, read_json, write_csv, write_json
from src.riesz import assemble_lambda, certify_block, spot_check_subblocks
from src.setbuilder import (
    build_bad_set,
    descriptor_from_dict,
    descriptor_to_dict,
    measure_estimate,
    strip_family,
)
from src.spectrum import (
    DECAY_HEADER,
    decay_is_monotone,
    fourier_coefficients,
    rasterize,
    rectangle_table,
    table_from_dict,
    table_to_dict,
    thm1_decay_experiment,
)
from src.utils.logger import error as log_error, get_logger
from src.worker_pool import worker_pool

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2
EXIT_RESOURCE = 3
EXIT_PARTIAL = 4


def _int_list(value: str, name: str) -> List[int]:
    try:
        items = [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}", param_hint=name)
    if not items:
        raise click.BadParameter("expected at least one integer", param_hint=name)
    return items


def _vector(value: str, name: str) -> LatticeVector:
    items = _int_list(value, name)
    if len(items) != 2:
        raise click.BadParameter(f"expected a,b, got {value!r}", param_hint=name)
    return LatticeVector.of(*items)


def _float_list(value: str, name: str, count: int) -> List[float]:
    try:
        items = [float(part) for part in value.split(",")]
    except ValueError:
        raise click.BadParameter(f"expected {count} comma-separated numbers, got {value!r}", param_hint=name)
    if len(items) != count:
        raise click.BadParameter(f"expected {count} comma-separated numbers, got {value!r}", param_hint=name)
    return items


def _strip(value: str) -> Tuple[Tuple[int, int], float]:
    try:
        w, rho = value.split(":")
        a, b = (int(part) for part in w.split(","))
        return (a, b), float(rho)
    except ValueError:
        raise click.BadParameter(f"expected a,b:rho, got {value!r}", param_hint="--strip")


def _store_run_option(ctx: click.Context, param: click.Parameter, value: Optional[int]) -> Optional[int]:
    if value is None:
        return None
    if param.name == "threads" and value < 1:
        raise click.BadParameter("must be >= 1", param_hint="--threads")
    ctx.meta[f"rgap.{param.name}"] = value
    return value


_RUN_OPTIONS = [
    click.option("--threads", type=int, default=None, expose_value=False, callback=_store_run_option,
                 help="Worker threads; overrides the group option."),
    click.option("--seed", type=int, default=None, expose_value=False, callback=_store_run_option,
                 help="Seed for sampled steps; overrides the group option."),
]


def _run_options(func: Callable) -> Callable:
    for option in reversed(_RUN_OPTIONS):
        func = option(func)
    return func


def _run_setting(ctx: click.Context, name: str) -> Any:
    """Subcommand value of --threads/--seed, else the group value."""
    return ctx.meta.get(f"rgap.{name}", ctx.find_root().params.get(name))


def _execute(ctx: click.Context, command: str, body: Callable[[RunReport], int]) -> None:
    """Run a command body, map errors to exit codes and emit the run report."""
    params = ctx.find_root().params
    threads = _run_setting(ctx, "threads") or config.threads
    worker_pool.resize(threads)
    report = RunReport(
        command=command,
        parameters={**ctx.params, "threads": threads, "seed": _run_setting(ctx, "seed")},
    )

    code = EXIT_OK
    try:
        with report.timed("total"):
            code = body(report)
    except InvalidArgumentError as e:
        code = EXIT_INVALID
        report.error = ErrorInfo(type=type(e).__name__, message=str(e), code=e.code)
    except ResourceLimitError as e:
        code = EXIT_RESOURCE
        report.error = ErrorInfo(type=type(e).__name__, message=str(e), code=e.code)
    except ActionableError as e:
        code = EXIT_INVALID
        report.error = ErrorInfo(type=type(e).__name__, message=str(e), code=e.code)
    except TechnicalError as e:
        code = EXIT_INTERNAL
        report.error = ErrorInfo(type=type(e).__name__, message=str(e), code=e.code)
        log_error(f"{command} failed", e, logger)

    if report.error is not None:
        click.echo(f"Error: {report.error.message}", err=True)

    report_path = params.get("report")
    if report_path:
        Path(report_path).write_text(report.to_json() + "\n", encoding="utf-8")
    else:
        click.echo(report.to_json())
    ctx.exit(code)


@click.group()
@click.option("--threads", type=int, default=None, help="Worker threads (default from RGAP_THREADS).")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for sampled steps.")
@click.option("--report", type=click.Path(dir_okay=False), default=None, help="Write the run report here instead of stdout.")
def cli(threads: Optional[int], seed: int, report: Optional[str]) -> None:
    """Bad sets on T^2 and certified Riesz sequences of exponentials."""
    if threads is not None and threads < 1:
        raise click.BadParameter("must be >= 1", param_hint="--threads")


# ----------------------------------------------------------------- generators

@cli.group()
def gen() -> None:
    """Coprime generator enumeration."""


@gen.command("enumerate")
@_run_options
@click.option("--radius", type=float, required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.pass_context
def gen_enumerate(ctx: click.Context, radius: float, out: str) -> None:
    """Write the generator table m, a, b, |v_m|, |v_m|/sqrt(m)."""

    def body(report: RunReport) -> int:
        generators = enumerate_generators(radius)
        rows = [
            [g.index_m, g.v.a, g.v.b, repr(g.norm), repr(g.norm / math.sqrt(g.index_m))]
            for g in generators
        ]
        write_csv(out, ["m", "a", "b", "norm", "norm_over_sqrt_m"], rows)
        ratios = [g.norm / math.sqrt(g.index_m) for g in generators]
        report.results = {
            "count": quantity(len(generators)),
            "min_norm_over_sqrt_m": quantity(min(ratios)),
            "out": out,
        }
        return EXIT_OK

    _execute(ctx, "gen enumerate", body)


@gen.command("density")
@_run_options
@click.option("--radius", type=float, required=True)
@click.pass_context
def gen_density(ctx: click.Context, radius: float) -> None:
    """Share of coprime points in the disk of the given radius."""

    def body(report: RunReport) -> int:
        density = coprime_density(radius)
        report.results = {
            "density": quantity(density),
            "limit": quantity(6.0 / math.pi ** 2),
            "deviation": quantity(abs(density - 6.0 / math.pi ** 2)),
        }
        return EXIT_OK

    _execute(ctx, "gen density", body)


# ---------------------------------------------------------------------- sets

@cli.group("set")
def set_group() -> None:
    """Bad set construction and measurement."""


def _measure_results(estimate: Any) -> Dict[str, Any]:
    return {
        "measure": quantity(estimate.value, estimate.error_bound),
        "method": estimate.method.value,
        "certified_lower_bound": quantity(estimate.certified_lower_bound),
        "tail_bound": quantity(estimate.tail_bound),
    }


@set_group.command("build")
@_run_options
@click.option("--epsilon", type=float, required=True)
@click.option("--truncation", type=int, required=True, help="Truncation W: strips with |w|_inf <= W.")
@click.option("--grid", type=int, default=1024, show_default=True, help="Grid resolution of the measure estimate.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.pass_context
def set_build(ctx: click.Context, epsilon: float, truncation: int, grid: int, out: str) -> None:
    """Build S_W and write its descriptor."""

    def body(report: RunReport) -> int:
        desc = build_bad_set(epsilon, truncation)
        write_json(out, descriptor_to_dict(desc))
        estimate = measure_estimate(desc, MeasureMethod.GRID, n=grid)
        report.results = {
            "out": out,
            "epsilon": desc.epsilon,
            "strips": len(desc.distinct_strips()),
            **_measure_results(estimate),
        }
        return EXIT_OK

    _execute(ctx, "set build", body)


@set_group.command("strips")
@_run_options
@click.option("--strip", "strips", multiple=True, required=True, help="Strip as a,b:rho (repeatable).")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.pass_context
def set_strips(ctx: click.Context, strips: Tuple[str, ...], out: str) -> None:
    """Write the descriptor of an explicit strip family."""
    family = dict(_strip(s) for s in strips)

    def body(report: RunReport) -> int:
        desc = strip_family(family)
        write_json(out, descriptor_to_dict(desc))
        report.results = {"out": out, "strips": len(desc.distinct_strips())}
        return EXIT_OK

    _execute(ctx, "set strips", body)


@set_group.command("measure")
@_run_options
@click.option("--set", "set_path", type=click.Path(dir_okay=False), required=True)
@click.option("--grid", type=int, default=None, help="Grid resolution (default 1024).")
@click.option("--samples", type=int, default=None, help="Monte-Carlo sample count; seeded by --seed.")
@click.pass_context
def set_measure(ctx: click.Context, set_path: str, grid: Optional[int], samples: Optional[int]) -> None:
    """Estimate |S_W| for a stored descriptor on a grid or from samples."""
    if grid is not None and samples is not None:
        raise click.BadParameter("give at most one of --grid or --samples", param_hint="--samples")
    method = MeasureMethod.GRID if samples is None else MeasureMethod.MONTECARLO
    seed = _run_setting(ctx, "seed")

    def body(report: RunReport) -> int:
        desc = descriptor_from_dict(read_json(set_path))
        estimate = measure_estimate(desc, method, n=grid or 1024, samples=samples, seed=seed)
        report.results = _measure_results(estimate)
        return EXIT_OK

    _execute(ctx, "set measure", body)



# ------------------------------------------------------------------- fourier

@cli.group()
def fourier() -> None:
    """Indicator Fourier tables."""


@fourier.command("build")
@_run_options
@click.option("--set", "set_path", type=click.Path(dir_okay=False), default=None)
@click.option("--grid", type=int, default=1024, show_default=True)
@click.option("--rect", default=None, help="Rectangle a1,b1,a2,b2 (exact table).")
@click.option("--max-freq", type=int, default=None, help="Largest |lambda|_inf stored.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.pass_context
def fourier_build(
    ctx: click.Context, set_path: Optional[str], grid: int, rect: Optional[str], max_freq: Optional[int], out: str
) -> None:
    """Build a table from a set descriptor raster or an exact rectangle."""
    if (set_path is None) == (rect is None):
        raise click.UsageError("give exactly one of --set or --rect")
    bounds = _float_list(rect, "--rect", 4) if rect else None

    def body(report: RunReport) -> int:
        if bounds is not None:
            table = rectangle_table(*bounds, max_freq=max_freq)
        else:
            desc = descriptor_from_dict(read_json(set_path))
            table = fourier_coefficients(rasterize(desc, grid), max_freq or grid // 4)
        write_json(out, table_to_dict(table))
        report.results = {
            "out": out,
            "max_freq": table.max_freq,
            "measure": quantity(table.set_measure, table.error_bound),
            "parseval_mass": quantity(table.parseval_mass(), table.error_bound),
        }
        return EXIT_OK

    _execute(ctx, "fourier build", body)


# --------------------------------------------------------------- decay tables

@cli.command()
@_run_options
@click.option("--set", "set_path", type=click.Path(dir_okay=False), required=True)
@click.option("--alpha", type=float, required=True)
@click.option("--sizes", required=True, help="Increasing sizes N, comma-separated.")
@click.option("--mode", type=click.Choice([m.value for m in DecayMode]), default=DecayMode.RANK1.value)
@click.option("--generator", default=None, help="Generator a,b for fixed_generator mode.")
@click.option("--out", type=click.Path(dir_okay=False), default="decay.csv", show_default=True)
@click.option("--plot-out", type=click.Path(dir_okay=False), default=None, help="Plot data N,value,bound.")
@click.pass_context
def thm1(
    ctx: click.Context,
    set_path: str,
    alpha: float,
    sizes: str,
    mode: str,
    generator: Optional[str],
    out: str,
    plot_out: Optional[str],
) -> None:
    """Polynomial mass over S for GAPs with steps of length N^alpha."""
    if not 0.0 < alpha < 1.0:
        raise click.BadParameter(f"alpha must lie in (0, 1), got {alpha}", param_hint="--alpha")
    size_list = _int_list(sizes, "--sizes")
    v = _vector(generator, "--generator") if generator else None

    def body(report: RunReport) -> int:
        desc = descriptor_from_dict(read_json(set_path))
        rows = thm1_decay_experiment(desc, alpha, size_list, DecayMode(mode), generator=v)
        for row in rows:
            r = row.report
            if r.bound is not None and r.value > r.bound + r.error_bound:
                raise InternalConsistencyError(
                    f"N={row.N}: value {r.value:.6g} exceeds the decay bound {r.bound:.6g}"
                )
        write_csv(out, DECAY_HEADER, [row.to_row() for row in rows])
        if plot_out:
            write_csv(
                plot_out,
                ["N", "value", "bound"],
                [[row.N, repr(row.report.value), "" if row.report.bound is None else repr(row.report.bound)] for row in rows],
            )
        report.results = {
            "out": out,
            "monotone": decay_is_monotone(rows),
            "rows": [
                {"N": row.N, "value": quantity(row.report.value, row.report.error_bound), "bound": row.report.bound}
                for row in rows
            ],
        }
        return EXIT_OK

    _execute(ctx, "thm1", body)


# --------------------------------------------------------------------- riesz

@cli.group()
def riesz() -> None:
    """Riesz certificates and Lambda assembly."""


@riesz.command("certify")
@_run_options
@click.option("--fourier", "fourier_path", type=click.Path(dir_okay=False), required=True)
@click.option("--block", required=True, help="Prime-slope block p,k.")
@click.option("--target", type=float, required=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def riesz_certify(ctx: click.Context, fourier_path: str, block: str, target: float, out: Optional[str]) -> None:
    """Certify a lower Riesz bound for B(p, k)."""
    pk = _int_list(block, "--block")
    if len(pk) != 2:
        raise click.BadParameter(f"expected p,k, got {block!r}", param_hint="--block")
    p, k = pk

    def body(report: RunReport) -> int:
        table = table_from_dict(read_json(fourier_path))
        cert = certify_block(table, prime_slope_gap(p, k), target)
        if out:
            write_json(out, cert.model_dump(mode="json"))
        report.results = {
            "gamma": quantity(cert.gamma, cert.residual + cert.fourier_error),
            "method": cert.method.value,
            "lambda_min": quantity(cert.lambda_min, cert.residual),
            "hs_bound": quantity(cert.hs_bound),
            "success": cert.success,
        }
        return EXIT_OK if cert.success else EXIT_PARTIAL

    _execute(ctx, "riesz certify", body)


def _assemble(
    ctx: click.Context, command: str, fourier_path: str, primes: str, gamma_frac: float, out: str, spot_checks: int
) -> None:
    prime_list = _int_list(primes, "--primes")
    if not 0.0 < gamma_frac < 1.0:
        raise click.BadParameter(f"must lie in (0, 1), got {gamma_frac}", param_hint="--gamma-frac")
    seed = _run_setting(ctx, "seed")

    def body(report: RunReport) -> int:
        table = table_from_dict(read_json(fourier_path))
        result = assemble_lambda(table, prime_list, gamma_frac)
        write_json(
            out,
            {
                "sections": [
                    {"p": s.p, "k": s.k, "M": [s.M.a, s.M.b], "gamma": s.certificate.gamma}
                    for s in result.sections
                ],
                "global_gamma": result.global_gamma,
                "set_measure": result.set_measure,
                "target": result.target,
                "frequencies": [[f.a, f.b] for f in result.frequencies],
                "partial": result.partial,
                "notes": result.notes,
            },
        )
        results: Dict[str, Any] = {
            "out": out,
            "sections": len(result.sections),
            "frequencies": len(result.frequencies),
            "target": quantity(result.target),
            "partial": result.partial,
            "notes": result.notes,
        }
        if result.global_certificate is not None:
            cert = result.global_certificate
            results["global_gamma"] = quantity(cert.gamma, cert.residual + cert.fourier_error)
            if spot_checks and len(result.frequencies) > 1:
                size = max(1, len(result.frequencies) // 2)
                lows = spot_check_subblocks(table, result.frequencies, spot_checks, size, seed)
                results["spot_check_min"] = quantity(min(lows))
        report.results = results
        click.echo(f"global gamma: {result.global_gamma}", err=True)
        return EXIT_PARTIAL if result.partial or result.empty else EXIT_OK

    _execute(ctx, command, body)


_ASSEMBLY_OPTIONS = [
    click.option("--fourier", "fourier_path", type=click.Path(dir_okay=False), required=True),
    click.option("--primes", required=True, help="Ascending primes, comma-separated."),
    click.option("--gamma-frac", type=float, default=0.5, show_default=True),
    click.option("--out", type=click.Path(dir_okay=False), default="lambda.json", show_default=True),
    click.option("--spot-checks", type=int, default=20, show_default=True, help="Random sub-blocks to check."),
]


def _assembly_options(func: Callable) -> Callable:
    for option in reversed(_ASSEMBLY_OPTIONS):
        func = option(func)
    return func


@riesz.command("assemble")
@_run_options
@_assembly_options
@click.pass_context
def riesz_assemble(ctx: click.Context, fourier_path: str, primes: str, gamma_frac: float, out: str, spot_checks: int) -> None:
    """Greedy assembly of certified, translated prime-slope blocks."""
    _assemble(ctx, "riesz assemble", fourier_path, primes, gamma_frac, out, spot_checks)


@cli.command()
@_run_options
@_assembly_options
@click.pass_context
def thm2(ctx: click.Context, fourier_path: str, primes: str, gamma_frac: float, out: str, spot_checks: int) -> None:
    """Assemble Lambda and print its global lower Riesz bound."""
    _assemble(ctx, "thm2", fourier_path, primes, gamma_frac, out, spot_checks)


def main() -> None:
    cli(prog_name="rgap")


if __name__ == "__main__":
    main()
