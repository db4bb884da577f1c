"""Scheme file service: load, validate and serialize declarative scheme documents."""
import os
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Tuple

import yaml
from pydantic import ValidationError

from src.algebra import CoeffField, coeff_text
from src.matrix import RingMatrix
from src.models import LBMScheme
from src.schemas import SCHEME_FORMAT, SchemeFileModel, ValidationIssue, ValidationReport
from src.services.scheme_service import SchemeService
from src.utils.errors import SchemeFileError, ShapeError
from src.utils.expression_parser import parse_coefficient, parse_equilibrium
from src.utils.logger import get_logger

logger = get_logger(__name__)

Path = Tuple[Any, ...]
Mark = Tuple[int, int]


def _collect_marks(node: yaml.Node, path: Path, marks: Dict[Path, Mark]) -> None:
    marks[path] = (node.start_mark.line + 1, node.start_mark.column + 1)
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            marks[path + (key.value,)] = (key.start_mark.line + 1, key.start_mark.column + 1)
            _collect_marks(value, path + (key.value,), marks)
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            _collect_marks(item, path + (i,), marks)


def _as_text(value: Any) -> Any:
    """Floats are read as their decimal text so 0.1 stays 1/10."""
    if isinstance(value, float):
        return repr(value)
    return value


def parse_binding(text: str) -> Tuple[str, Fraction]:
    """``name=value`` as given to --bind."""
    name, sep, value = text.partition("=")
    name = name.strip()
    if not sep or not name.isidentifier():
        raise SchemeFileError(f"Binding {text!r} is not of the form name=value", key="--bind")
    try:
        return name, Fraction(value.strip())
    except (ValueError, ZeroDivisionError):
        raise SchemeFileError(f"Binding value {value.strip()!r} is not a rational number", key=f"--bind {name}")


class SchemeFileService:
    def __init__(self, path: Optional[str] = None):
        self.path = path
        self.marks: Dict[Path, Mark] = {}

    def _where(self, path: Path) -> Dict[str, Any]:
        for cut in range(len(path), -1, -1):
            if path[:cut] in self.marks:
                line, column = self.marks[path[:cut]]
                return {"line": line, "column": column, "key": ".".join(str(p) for p in path) or None}
        return {"key": ".".join(str(p) for p in path) or None}

    def read(self) -> str:
        if not self.path or not os.path.exists(self.path):
            raise SchemeFileError(f"Scheme file not found: {self.path}")
        with open(self.path, encoding="utf-8") as handle:
            return handle.read()

    def load(self, bindings: Optional[Mapping[str, Any]] = None) -> LBMScheme:
        return self.loads(self.read(), bindings)

    def loads(self, text: str, bindings: Optional[Mapping[str, Any]] = None) -> LBMScheme:
        """Parse a scheme document; ``bindings`` override the file parameters."""
        try:
            root = yaml.compose(text)
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            raise SchemeFileError(f"Malformed YAML: {getattr(exc, 'problem', exc)}",
                                  mark.line + 1 if mark else None, mark.column + 1 if mark else None)
        if not isinstance(data, dict):
            raise SchemeFileError("Scheme document must be a mapping", 1, 1)
        self.marks = {}
        _collect_marks(root, (), self.marks)

        try:
            model = SchemeFileModel(**data)
        except ValidationError as exc:
            first = exc.errors()[0]
            raise SchemeFileError(first["msg"], **self._where(tuple(first["loc"]))) from exc
        scheme = self.build(model, bindings)
        logger.info(f"Loaded scheme {scheme.name or self.path or 'document'}: d={scheme.dim}, q={scheme.q}, "
                    f"N={scheme.conserved}")
        return scheme

    def _check_shapes(self, model: SchemeFileModel) -> None:
        q = len(model.velocities)
        for i, c in enumerate(model.velocities):
            if len(c) != model.dimension:
                raise ShapeError(f"velocity {i + 1} has {len(c)} components, dimension is {model.dimension}",
                                 **self._where(("velocities", i)))
        if len(model.moments) != q:
            raise ShapeError(f"moment matrix has {len(model.moments)} rows, expected {q}",
                             **self._where(("moments",)))
        for i, row in enumerate(model.moments):
            if len(row) != q:
                raise ShapeError(f"moment row {i + 1} has {len(row)} entries, expected {q}",
                                 **self._where(("moments", i)))
        for name in ("relaxation", "equilibria"):
            values = getattr(model, name)
            if len(values) != q:
                raise ShapeError(f"{name} has {len(values)} entries, expected {q}", **self._where((name,)))
        if model.conserved >= q:
            raise ShapeError(f"{model.conserved} conserved moments leave no relaxing moment (q={q})",
                             **self._where(("conserved",)))

    def _coefficient(self, value: Any, field: CoeffField, path: Path):
        where = self._where(path)
        return parse_coefficient(_as_text(value), field, where.get("line"), where.get("key"))

    def build(self, model: SchemeFileModel, bindings: Optional[Mapping[str, Any]] = None) -> LBMScheme:
        self._check_shapes(model)
        field = CoeffField(list(model.parameters))
        q, n = len(model.velocities), model.conserved

        merged: Dict[str, Fraction] = {}
        for name, value in model.parameters.items():
            if value is not None:
                try:
                    merged[name] = Fraction(str(_as_text(value)))
                except (ValueError, ZeroDivisionError):
                    raise SchemeFileError(f"Binding {value!r} is not a rational number",
                                          **self._where(("parameters", name)))
        for name, value in (bindings or {}).items():
            if name not in field.names:
                raise SchemeFileError(f"Unknown parameter {name!r} in bindings; declared: {', '.join(field.names)}",
                                      key="--bind")
            merged[name] = Fraction(value)

        rows = [[self._coefficient(v, field, ("moments", i, j)) for j, v in enumerate(row)]
                for i, row in enumerate(model.moments)]
        equilibria = []
        for i, text in enumerate(model.equilibria):
            where = self._where(("equilibria", i))
            equilibria.append(parse_equilibrium(_as_text(text), field, n, where.get("line"), where.get("key")))

        return LBMScheme(
            field=field,
            dim=model.dimension,
            velocities=tuple(tuple(c) for c in model.velocities),
            lam=self._coefficient(model.lattice_speed, field, ("lattice_speed",)),
            moments=RingMatrix(rows, field.zero, field.one),
            conserved=n,
            rates=tuple(self._coefficient(s, field, ("relaxation", i)) for i, s in enumerate(model.relaxation)),
            equilibria=tuple(equilibria),
            bindings=merged,
            name=model.name,
        )

    def validate(self, scheme: LBMScheme) -> ValidationReport:
        """Scheme validation with issues pointed at their place in the file."""
        report = SchemeService(scheme).validate()
        issues: List[ValidationIssue] = []
        for issue in report.issues:
            path = self._component_path(issue.component, scheme)
            where = self._where(path) if path else {}
            suffix = f" (line {where['line']}, column {where['column']})" if "line" in where else ""
            issues.append(issue.model_copy(update={"message": issue.message + suffix}))
        return ValidationReport(valid=report.valid, issues=issues)

    @staticmethod
    def _component_path(component: str, scheme: LBMScheme) -> Optional[Path]:
        head, _, rest = component.partition("[")
        rest = rest.rstrip("]")
        if not rest:
            return (head,)
        if head == "relaxation" and rest.startswith("s") and rest[1:].isdigit():
            return (head, int(rest[1:]) - 1)
        if rest.isdigit():
            return (head, int(rest) - 1)
        return (head,)

    @staticmethod
    def dump(scheme: LBMScheme) -> Dict[str, Any]:
        """Document form of a scheme, readable back by ``loads``."""
        q = scheme.q
        return {
            "format": SCHEME_FORMAT,
            "name": scheme.name,
            "dimension": scheme.dim,
            "velocities": [list(c) for c in scheme.velocities],
            "lattice_speed": coeff_text(scheme.lam),
            "moments": [[coeff_text(scheme.moments[i, j]) for j in range(q)] for i in range(q)],
            "conserved": scheme.conserved,
            "relaxation": [coeff_text(s) for s in scheme.rates],
            "equilibria": [eq.to_text() for eq in scheme.equilibria],
            "parameters": {name: (str(scheme.bindings[name]) if name in scheme.bindings else None)
                           for name in scheme.field.names},
        }

    def dumps(self, scheme: LBMScheme) -> str:
        return yaml.safe_dump(self.dump(scheme), sort_keys=False, allow_unicode=True)


def load_scheme(path: str, bindings: Optional[Mapping[str, Any]] = None) -> LBMScheme:
    return SchemeFileService(path).load(bindings)
