"""Shared options, scheme loading and report output for the CLI commands."""
import functools
from typing import Callable, Dict, Optional, Sequence, Tuple

import click

from src.config import settings
from src.models import LBMScheme
from src.schemas import Report, ValidationReport
from src.services.report_service import FORMATS, ReportService
from src.services.scheme_file_service import SchemeFileService, parse_binding
from src.utils.errors import LBMFDError, SchemeValidationError
from src.utils.logger import get_logger

logger = get_logger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1


def scheme_argument(f: Callable) -> Callable:
    return click.argument("scheme_path", metavar="SCHEME", type=click.Path(exists=True, dir_okay=False))(f)


def output_options(f: Callable) -> Callable:
    f = click.option("--format", "fmt", type=click.Choice(FORMATS), default="text", show_default=True,
                     help="Formato del reporte")(f)
    f = click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None,
                     help="Escribir el reporte también en este archivo")(f)
    f = click.option("--bind", "binds", multiple=True, metavar="NAME=VALUE",
                     help="Fijar un parámetro del esquema (repetible)")(f)
    return f


def truncation_option(f: Callable) -> Callable:
    return click.option("--truncation", type=click.IntRange(min=0), default=None,
                        help="Orden de truncación de las series en dx")(f)


def load(scheme_path: str, binds: Sequence[str]) -> Tuple[SchemeFileService, LBMScheme]:
    bindings: Dict[str, object] = dict(parse_binding(b) for b in binds)
    service = SchemeFileService(scheme_path)
    return service, service.load(bindings)


def validated(service: SchemeFileService, scheme: LBMScheme, report: Report) -> bool:
    """Attach the validation section; False when the scheme has errors."""
    validation: ValidationReport = service.validate(scheme)
    report.validation = validation
    if not validation.valid:
        report.passed = False
    return validation.valid


def emit(report: Report, fmt: str, report_path: Optional[str]) -> None:
    service = ReportService(report)
    click.echo(service.render(fmt))
    path = report_path or settings.report_path
    if path:
        service.write(path, fmt)


def command_body(command: str) -> Callable:
    """Run a command body that fills a Report; domain errors become a failed report."""

    def decorator(body: Callable[..., Report]) -> Callable:
        @functools.wraps(body)
        def wrapper(scheme_path: str, fmt: str, report_path: Optional[str], **kwargs):
            try:
                report = body(scheme_path=scheme_path, **kwargs)
            except SchemeValidationError as exc:
                logger.error(f"{command}: invalid scheme {scheme_path}: {exc}")
                report = Report(command=command, scheme=scheme_path, passed=False,
                                notes=[f"invalid scheme: {issue}" for issue in exc.issues])
            except LBMFDError as exc:
                logger.error(f"{command}: {type(exc).__name__}: {exc}")
                report = Report(command=command, scheme=scheme_path, passed=False,
                                notes=[f"{type(exc).__name__}: {exc}"])
            emit(report, fmt, report_path)
            click.get_current_context().exit(EXIT_PASS if report.passed else EXIT_FAIL)

        return wrapper

    return decorator
