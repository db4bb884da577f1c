"""lbmfd - lattice Boltzmann schemes as finite-difference schemes and their equivalent equations."""
import click

from src.cli import checks, derive, numeric
from src.config import settings
from src.utils.logger import get_logger

logger = get_logger(__name__)

VERSION = "1.0.0"


@click.group(name="lbmfd", context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(VERSION, prog_name="lbmfd")
def cli():
    """Reducir esquemas LBM a esquemas de diferencias finitas y derivar sus ecuaciones equivalentes."""
    logger.debug(f"🚀 lbmfd {VERSION} (truncation {settings.truncation_order}, log level {settings.log_level})")


# Register commands
for module in (derive, checks, numeric):
    for command in module.commands:
        cli.add_command(command)


def main():
    cli(prog_name="lbmfd")


if __name__ == "__main__":
    main()
