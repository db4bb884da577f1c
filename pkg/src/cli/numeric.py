"""Numeric commands: simulate and convergence."""
from typing import Optional, Sequence

import click

from src.cli.common import command_body, load, output_options, scheme_argument, validated
from src.config import settings
from src.schemas import ArithmeticMode, InitialProfile, Report, RunConfig
from src.services.convergence_service import REFERENCES, ConvergenceService
from src.services.simulation_service import equivalence_compare, simulate as run_simulation


@click.command("simulate")
@scheme_argument
@output_options
@click.option("--mode", type=click.Choice([m.value for m in ArithmeticMode]), default="rational",
              show_default=True, help="Aritmética exacta o doble precisión")
@click.option("--cells", type=click.IntRange(min=1), default=settings.default_cells, show_default=True)
@click.option("--steps", type=click.IntRange(min=0), default=settings.default_steps, show_default=True)
@click.option("--profile", type=click.Choice([p.value for p in InitialProfile]), default="random",
              show_default=True, help="Dato inicial de los momentos conservados")
@click.option("--amplitude", default="1", show_default=True)
@click.option("--wavenumber", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=settings.random_seed, show_default=True)
@click.option("--compare", is_flag=True, help="Comparar además con el esquema FD equivalente")
@command_body("simulate")
def simulate(scheme_path: str, binds: Sequence[str], mode: str, cells: int, steps: int, profile: str,
             amplitude: str, wavenumber: int, seed: int, compare: bool) -> Report:
    """Correr el esquema LBM y reportar las sumas globales de los momentos conservados."""
    service, scheme = load(scheme_path, binds)
    report = Report(command="simulate", scheme=scheme.name or scheme_path)
    if not validated(service, scheme, report):
        return report

    try:
        cfg = RunConfig(mode=mode, cells=cells, steps=steps, profile=profile, amplitude=amplitude,
                        wavenumber=wavenumber, seed=seed)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--amplitude")
    report.simulation = run_simulation(scheme, cfg)
    if compare:
        equivalence = equivalence_compare(scheme, cfg)
        report.equivalence.append(equivalence)
        report.passed = equivalence.passed
    return report


@click.command("convergence")
@scheme_argument
@output_options
@click.option("--reference", type=click.Choice(REFERENCES), default="advection-diffusion", show_default=True,
              help="Solución exacta de referencia")
@click.option("--expected-order", type=float, default=None, help="Orden esperado (tolerancia de la configuración)")
@click.option("--grid", "grids", type=click.IntRange(min=2), multiple=True,
              help="Número de celdas de cada malla (repetible)")
@click.option("--wavenumber", type=int, default=1, show_default=True)
@command_body("convergence")
def convergence(scheme_path: str, binds: Sequence[str], reference: str, expected_order: Optional[float],
                grids: Sequence[int], wavenumber: int) -> Report:
    """Medir el orden de convergencia del esquema LBM contra una solución de un modo."""
    service, scheme = load(scheme_path, binds)
    report = Report(command="convergence", scheme=scheme.name or scheme_path)
    if not validated(service, scheme, report):
        return report

    study = ConvergenceService(scheme).study(reference, expected_order, wavenumber, list(grids) or None)
    report.convergence.append(study)
    if study.passed is False:
        report.passed = False
    return report


commands = [simulate, convergence]
