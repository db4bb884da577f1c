"""Write FD schemes and order-2 equivalent equations of the bundled schemes to reports/."""
import glob
import os
import sys

from src.schemas import Report
from src.services.derivation_service import DerivationService
from src.services.fd_service import FDReductionService
from src.services.report_service import ReportService, fd_section, pde_section
from src.services.scheme_file_service import SchemeFileService
from src.utils.errors import LBMFDError
from src.utils.logger import get_logger

logger = get_logger("export_reference_reports")

SCHEMES_GLOB = os.path.join("schemes", "*.yaml")
OUTPUT_DIR = "reports"


def export(path: str) -> bool:
    service = SchemeFileService(path)
    scheme = service.load()
    report = Report(command="reference", scheme=scheme.name or path)
    report.validation = service.validate(scheme)
    if not report.validation.valid:
        report.passed = False
    else:
        reducer = FDReductionService(scheme)
        report.fd_schemes = [fd_section(fd) for fd in reducer.reduce_multi()]
        report.pdes = [pde_section(DerivationService(scheme).derive_via_series(2), 2)]
    name = os.path.splitext(os.path.basename(path))[0]
    ReportService(report).write(os.path.join(OUTPUT_DIR, f"{name}.json"), "json")
    return report.passed


def main() -> int:
    status = 0
    for path in sorted(glob.glob(SCHEMES_GLOB)):
        try:
            if not export(path):
                status = 1
        except LBMFDError as exc:
            logger.error(f"{path}: {exc}")
            status = 1
    return status


if __name__ == "__main__":
    sys.exit(main())
