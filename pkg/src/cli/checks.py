"""The ``check`` command: full cross-check battery."""
from typing import Optional, Sequence

import click

from src.cli.common import command_body, load, output_options, scheme_argument, truncation_option, validated
from src.schemas import Report, Verdict
from src.services.check_service import CheckService


@click.command("check")
@scheme_argument
@output_options
@truncation_option
@click.option("--only", "names", multiple=True, help="Ejecutar solo estos chequeos (repetible)")
@click.option("--trials", type=click.IntRange(min=1), default=3, show_default=True,
              help="Tasas conservadas aleatorias para el chequeo de invariancia")
@click.option("--seed", type=int, default=None, help="Semilla de los chequeos aleatorios")
@command_body("check")
def check(scheme_path: str, binds: Sequence[str], truncation: Optional[int], names: Sequence[str], trials: int,
          seed: Optional[int]) -> Report:
    """Ejecutar la batería de verificaciones cruzadas sobre un esquema."""
    service, scheme = load(scheme_path, binds)
    report = Report(command="check", scheme=scheme.name or scheme_path)
    if not validated(service, scheme, report):
        return report

    checks = CheckService(scheme, truncation, trials=trials, seed=seed)
    try:
        report.checks = checks.run(list(names) or None)
    except ValueError as exc:
        if "Unknown checks" not in str(exc):
            raise
        raise click.BadParameter(f"{exc}; available: {', '.join(checks.checks())}", param_hint="--only")
    report.passed = all(c.verdict != Verdict.FAIL for c in report.checks)
    return report


commands = [check]
