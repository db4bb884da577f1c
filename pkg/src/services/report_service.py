"""Report service: build report sections and render them as text, JSON or LaTeX."""
import json
import os
from typing import Any, Dict, List, Optional, Sequence

from src.algebra import coeff_latex, coeff_text
from src.jets import AXES, PDESystem
from src.models import FDScheme
from src.schemas import FDSchemeReport, PDEReport, Report, StencilTerm
from src.utils.logger import get_logger

logger = get_logger(__name__)

FORMATS = ("text", "json", "latex")


def _source_name(kind: str, j: int) -> str:
    return f"m{j + 1}eq" if kind == "equilibrium" else f"m{j + 1}"


def _time_text(level: int) -> str:
    # stored levels are t and earlier
    if level == 0:
        return "t"
    return "t-dt" if level == -1 else f"t-{-level}*dt"


def _space_text(offset: Sequence[int]) -> str:
    parts = []
    for axis, v in enumerate(offset):
        name = AXES[axis]
        if v == 0:
            parts.append(name)
        elif v == 1:
            parts.append(f"{name}-d{name}")
        elif v == -1:
            parts.append(f"{name}+d{name}")
        else:
            parts.append(f"{name}{'-' if v > 0 else '+'}{abs(v)}*d{name}")
    return ", ".join(parts)


def _time_latex(level: int) -> str:
    if level == 0:
        return "t"
    step = r"\Delta t" if abs(level) == 1 else rf"{abs(level)}\Delta t"
    return f"t - {step}" if level < 0 else f"t + {step}"


def _space_latex(offset: Sequence[int]) -> str:
    parts = []
    for axis, v in enumerate(offset):
        name = AXES[axis]
        if v == 0:
            parts.append(name)
        else:
            step = rf"\Delta {name}" if abs(v) == 1 else rf"{abs(v)}\Delta {name}"
            parts.append(f"{name} - {step}" if v > 0 else f"{name} + {step}")
    return ", ".join(parts)


def stencil_text(fd: FDScheme) -> str:
    """Explicit update rule for m_i at t+dt."""
    target = f"m{fd.index + 1}(t+dt, {_space_text((0,) * fd.lhs.dim)})"
    terms = [f"({coeff_text(w)})*{_source_name(kind, j)}({_time_text(level)}, {_space_text(offset)})"
             for kind, j, level, offset, w in fd.explicit_terms()]
    return f"{target} = " + (" + ".join(terms) if terms else "0")


def stencil_latex(fd: FDScheme) -> str:
    target = rf"m_{{{fd.index + 1}}}(t + \Delta t, {_space_latex((0,) * fd.lhs.dim)})"
    terms = []
    for kind, j, level, offset, w in fd.explicit_terms():
        name = rf"m_{{{j + 1}}}^{{\mathrm{{eq}}}}" if kind == "equilibrium" else rf"m_{{{j + 1}}}"
        terms.append(rf"\left({coeff_latex(w)}\right) {name}({_time_latex(level)}, {_space_latex(offset)})")
    return f"{target} = " + (" + ".join(terms) if terms else "0")


def fd_section(fd: FDScheme) -> FDSchemeReport:
    terms = [StencilTerm(kind=kind, source=j + 1, time_level=level, offset=list(offset), weight=coeff_text(w))
             for kind, j, level, offset, w in fd.explicit_terms()]
    return FDSchemeReport(index=fd.index + 1, steps=fd.steps, text=stencil_text(fd), latex=stencil_latex(fd),
                          terms=terms)


def pde_section(system: PDESystem, order: Optional[int] = None) -> PDEReport:
    return PDEReport(
        route=system.route,
        order=system.order if order is None else order,
        equations=[e.text() for e in system.equations],
        latex=[e.latex() for e in system.equations],
        notes=list(system.notes),
    )


class ReportService:
    def __init__(self, report: Report):
        self.report = report

    def to_dict(self) -> Dict[str, Any]:
        return self.report.model_dump(mode="json")

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    def to_text(self) -> str:
        data = self.to_dict()
        lines = [f"{data['command']}: {data['scheme']}", f"status: {'pass' if data['passed'] else 'fail'}"]

        validation = data.get("validation")
        if validation:
            lines.append("")
            lines.append(f"validation: {'valid' if validation['valid'] else 'invalid'}")
            lines += [f"  {i['level']}: {i['component']}: {i['message']}" for i in validation["issues"]]

        for fd in data["fd_schemes"]:
            lines.append("")
            lines.append(f"FD scheme for m{fd['index']} ({fd['steps']} time levels)")
            lines.append(f"  {fd['text']}")
            for t in fd["terms"]:
                lines.append(f"    {t['kind']:<11} m{t['source']:<3} level {t['time_level']:>3} "
                             f"offset {tuple(t['offset'])}  weight {t['weight']}")

        for pde in data["pdes"]:
            lines.append("")
            lines.append(f"order-{pde['order']} equations ({pde['route']} route)")
            lines += [f"  {eq}" for eq in pde["equations"]]
            lines += [f"  note: {n}" for n in pde["notes"]]

        if data["checks"]:
            lines.append("")
            lines.append("checks")
            for check in data["checks"]:
                lines.append(f"  {check['verdict'].upper():<5} {check['name']}")
                lines += [f"        {d}" for d in check["detail"]]

        for eq in data["equivalence"]:
            lines.append("")
            lines.append(f"equivalence ({eq['mode']}, {eq['cells']} cells x {eq['steps']} steps): "
                         f"deviation {eq['deviation']} -> {'pass' if eq['passed'] else 'fail'}")

        for conv in data["convergence"]:
            lines.append("")
            lines.append(f"convergence {conv['label']}")
            lines.append(f"  {'cells':>6} {'dx':>12} {'error':>12}")
            lines += [f"  {r['cells']:>6} {r['dx']:>12.4e} {r['error']:>12.4e}" for r in conv["rows"]]
            expected = "" if conv["expected_order"] is None else f" (expected {conv['expected_order']})"
            lines.append(f"  observed order {conv['observed_order']:.3f}{expected}")
            lines += [f"  warning: {w}" for w in conv["warnings"]]

        simulation = data.get("simulation")
        if simulation:
            lines.append("")
            lines.append(f"simulation ({simulation['mode']}, {simulation['cells']} cells x "
                         f"{simulation['steps']} steps)")
            for row in simulation["rows"]:
                lines.append(f"  {row['step']:>5}  " + "  ".join(row["sums"]))
            lines.append("  drift: " + "  ".join(simulation["drift"]))

        if data["notes"]:
            lines.append("")
            lines += [f"note: {n}" for n in data["notes"]]
        return "\n".join(lines)

    def to_latex(self) -> str:
        data = self.to_dict()
        blocks: List[str] = [f"% {data['command']}: {data['scheme']}"]
        for fd in data["fd_schemes"]:
            blocks.append(f"% FD scheme for m{fd['index']}\n\\begin{{equation*}}\n{fd['latex']}\n\\end{{equation*}}")
        for pde in data["pdes"]:
            body = " \\\\\n".join(pde["latex"])
            blocks.append(f"% order-{pde['order']} equations ({pde['route']} route)\n"
                          f"\\begin{{align*}}\n{body}\n\\end{{align*}}")
        for conv in data["convergence"]:
            rows = "\n".join(f"{r['cells']} & {r['dx']:.4e} & {r['error']:.4e} \\\\" for r in conv["rows"])
            blocks.append(f"% convergence {conv['label']}, observed order {conv['observed_order']:.3f}\n"
                          f"\\begin{{tabular}}{{rrr}}\nN & $\\Delta x$ & error \\\\\n\\hline\n{rows}\n"
                          f"\\end{{tabular}}")
        if data["checks"]:
            rows = "\n".join(f"{c['name']} & {c['verdict']} \\\\" for c in data["checks"])
            blocks.append(f"\\begin{{tabular}}{{ll}}\ncheck & verdict \\\\\n\\hline\n{rows}\n\\end{{tabular}}")
        return "\n\n".join(blocks)

    def render(self, fmt: str = "text") -> str:
        if fmt not in FORMATS:
            raise ValueError(f"Unknown report format {fmt!r}, expected one of {FORMATS}")
        return {"text": self.to_text, "json": self.to_json, "latex": self.to_latex}[fmt]()

    def write(self, path: str, fmt: str = "text") -> None:
        directory = os.path.dirname(path)
        if directory and not os.path.exists(directory):
            os.makedirs(directory)
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(self.render(fmt) + "\n")
        logger.info(f"Report written to {path}")
