"""Symbolic commands: validate, derive-fd, equivalent-eqs and maxwell."""
from typing import Optional, Sequence

import click

from src.cli.common import command_body, load, output_options, scheme_argument, truncation_option, validated
from src.jets import pde_equal
from src.schemas import CheckVerdict, Report, Verdict
from src.services.derivation_service import DerivationService
from src.services.fd_service import FDReductionService
from src.services.maxwell_service import MaxwellService
from src.services.report_service import fd_section, pde_section
from src.utils.logger import get_logger

logger = get_logger(__name__)

ROUTES = ("series", "closed", "unreduced")


@click.command("validate")
@scheme_argument
@output_options
@command_body("validate")
def validate(scheme_path: str, binds: Sequence[str]) -> Report:
    """Validar un archivo de esquema (invertibilidad, conservación, tasas)."""
    service, scheme = load(scheme_path, binds)
    report = Report(command="validate", scheme=scheme.name or scheme_path)
    validated(service, scheme, report)
    return report


@click.command("derive-fd")
@scheme_argument
@output_options
@click.option("--specialize", is_flag=True, help="Sustituir los parámetros fijados y mostrar los pesos numéricos")
@command_body("derive-fd")
def derive_fd(scheme_path: str, binds: Sequence[str], specialize: bool) -> Report:
    """Obtener el esquema de diferencias finitas equivalente para cada momento conservado."""
    service, scheme = load(scheme_path, binds)
    report = Report(command="derive-fd", scheme=scheme.name or scheme_path)
    if not validated(service, scheme, report):
        return report

    reducer = FDReductionService(scheme)
    schemes = reducer.reduce_multi()
    if specialize:
        schemes = [reducer.specialize_stencil(fd).scheme for fd in schemes]
    report.fd_schemes = [fd_section(fd) for fd in schemes]
    report.notes.append(f"{len(schemes)} FD scheme(s); conserved relaxation rates do not enter the reduction")
    return report


@click.command("equivalent-eqs")
@scheme_argument
@output_options
@truncation_option
@click.option("--order", type=click.IntRange(1, 2), default=2, show_default=True, help="Orden en dx")
@click.option("--route", type=click.Choice(ROUTES), default="series", show_default=True,
              help="Camino de derivación reportado")
@click.option("--cross-check/--no-cross-check", default=True, show_default=True,
              help="Comparar con la fórmula cerrada")
@command_body("equivalent-eqs")
def equivalent_eqs(scheme_path: str, binds: Sequence[str], truncation: Optional[int], order: int, route: str,
                   cross_check: bool) -> Report:
    """Derivar las ecuaciones macroscópicas equivalentes a orden 1 o 2."""
    service, scheme = load(scheme_path, binds)
    report = Report(command="equivalent-eqs", scheme=scheme.name or scheme_path)
    if not validated(service, scheme, report):
        return report

    derivations = DerivationService(scheme, truncation)
    if route == "series":
        system = derivations.derive_via_series(order)
    elif route == "closed":
        system = derivations.derive_closed(order)
    else:
        system = derivations.derive_unreduced(order)
    report.pdes.append(pde_section(system, order))

    if cross_check and route != "unreduced":
        other = derivations.derive_closed(order) if route == "series" else derivations.derive_via_series(order)
        comparison = pde_equal(system, other)
        report.checks.append(CheckVerdict(name=f"routes-order-{order}",
                                          verdict=Verdict.PASS if comparison.equal else Verdict.FAIL,
                                          detail=comparison.describe()))
        report.passed = comparison.equal
    return report


@click.command("maxwell")
@scheme_argument
@output_options
@truncation_option
@click.option("--order", type=click.IntRange(1, 2), default=2, show_default=True, help="Orden en dx")
@click.option("--moment", type=click.IntRange(min=1), default=None,
              help="Mostrar además la expansión de la fila de este momento")
@command_body("maxwell")
def maxwell(scheme_path: str, binds: Sequence[str], truncation: Optional[int], order: int,
            moment: Optional[int]) -> Report:
    """Ecuaciones macroscópicas por iteración de Maxwell."""
    service, scheme = load(scheme_path, binds)
    report = Report(command="maxwell", scheme=scheme.name or scheme_path)
    if not validated(service, scheme, report):
        return report

    maxwell_service = MaxwellService(scheme, truncation)
    report.pdes.append(pde_section(maxwell_service.maxwell_pde(order), order))
    if moment is not None:
        if moment > scheme.q:
            raise click.BadParameter(f"moment {moment} exceeds q={scheme.q}", param_hint="--moment")
        row = maxwell_service.maxwell_moment_row(moment - 1, order)
        report.notes += [f"m{moment}^({order}), dx^{r}: {p.text()}" for r, p in enumerate(row)]
    return report


commands = [validate, derive_fd, equivalent_eqs, maxwell]
