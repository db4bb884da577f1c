"""Pydantic schemas for scheme files, run configuration and reports."""
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, Field, field_validator

SCHEME_FORMAT = "lbmfd-scheme/1"

Scalar = Union[int, float, str]


class SchemeFileModel(BaseModel):
    """Documento declarativo de un esquema MRT"""
    format: str = SCHEME_FORMAT
    name: str = ""
    dimension: int
    velocities: List[List[int]]
    lattice_speed: Scalar
    moments: List[List[Scalar]]
    conserved: int
    relaxation: List[Scalar]
    equilibria: List[Scalar]
    parameters: Dict[str, Optional[Scalar]] = {}

    @field_validator("format")
    @classmethod
    def check_format(cls, value: str) -> str:
        if value != SCHEME_FORMAT:
            raise ValueError(f"unsupported format {value!r}, expected {SCHEME_FORMAT!r}")
        return value

    @field_validator("dimension")
    @classmethod
    def check_dimension(cls, value: int) -> int:
        if value not in (1, 2, 3):
            raise ValueError("dimension must be 1, 2 or 3")
        return value

    @field_validator("conserved")
    @classmethod
    def check_conserved(cls, value: int) -> int:
        if value < 1:
            raise ValueError("at least one conserved moment is required")
        return value

    class Config:
        extra = "forbid"


class ArithmeticMode(str, Enum):
    RATIONAL = "rational"
    DOUBLE = "double"


class InitialProfile(str, Enum):
    RANDOM = "random"
    SINE = "sine"
    CONSTANT = "constant"
    DELTA = "delta"
    ZERO = "zero"


class RunConfig(BaseModel):
    """Configuración de una corrida numérica"""
    mode: ArithmeticMode = ArithmeticMode.RATIONAL
    cells: int = Field(16, ge=1)
    steps: int = Field(20, ge=0)
    profile: InitialProfile = InitialProfile.RANDOM
    amplitude: str = "1"
    wavenumber: int = 1
    seed: int = 20240611
    warmup: Optional[int] = None

    @field_validator("amplitude")
    @classmethod
    def check_rational(cls, value: str) -> str:
        try:
            Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"{value!r} is not a rational number")
        return value


class IssueLevel(str, Enum):
    ERROR = "error"
    WARNING = "warning"


class ValidationIssue(BaseModel):
    level: IssueLevel
    component: str
    message: str


class ValidationReport(BaseModel):
    valid: bool
    issues: List[ValidationIssue] = []

    @property
    def errors(self) -> List[ValidationIssue]:
        return [i for i in self.issues if i.level == IssueLevel.ERROR]

    @property
    def warnings(self) -> List[ValidationIssue]:
        return [i for i in self.issues if i.level == IssueLevel.WARNING]


class StencilTerm(BaseModel):
    """Término (nivel temporal, desplazamiento, peso) de un esquema FD"""
    kind: str
    source: int
    time_level: int
    offset: List[int]
    weight: str


class FDSchemeReport(BaseModel):
    index: int
    steps: int
    text: str
    latex: str
    terms: List[StencilTerm] = []


class PDEReport(BaseModel):
    route: str
    order: int
    equations: List[str]
    latex: List[str]
    notes: List[str] = []


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIP = "skip"


class CheckVerdict(BaseModel):
    name: str
    verdict: Verdict
    detail: List[str] = []


class EquivalenceReport(BaseModel):
    mode: ArithmeticMode
    cells: int
    steps: int
    deviation: str
    tolerance: Optional[float] = None
    passed: bool


class ConvergenceRow(BaseModel):
    cells: int
    dx: float
    error: float


class ConvergenceReport(BaseModel):
    label: str
    rows: List[ConvergenceRow]
    observed_order: float
    expected_order: Optional[float] = None
    tolerance: Optional[float] = None
    passed: Optional[bool] = None
    warnings: List[str] = []


class SimulationRow(BaseModel):
    step: int
    sums: List[str]


class SimulationReport(BaseModel):
    mode: ArithmeticMode
    cells: int
    steps: int
    rows: List[SimulationRow]
    drift: List[str]


class Report(BaseModel):
    """Reporte unificado de todos los comandos"""
    command: str
    scheme: str
    passed: bool = True
    validation: Optional[ValidationReport] = None
    fd_schemes: List[FDSchemeReport] = []
    pdes: List[PDEReport] = []
    checks: List[CheckVerdict] = []
    equivalence: List[EquivalenceReport] = []
    convergence: List[ConvergenceReport] = []
    simulation: Optional[SimulationReport] = None
    notes: List[str] = []
