"""Simulation service: reference LBM runs, FD stencil runs and their comparison."""
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.algebra import OperatorPoly, apply_operator, shift_grid
from src.config import settings
from src.models import LBMScheme, Stencil, evaluate_numeric
from src.schemas import (ArithmeticMode, EquivalenceReport, InitialProfile, RunConfig, SimulationReport,
                         SimulationRow)
from src.services.fd_service import FDReductionService
from src.services.scheme_service import SchemeService
from src.utils.errors import HistoryError
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class GridState:
    """All q moments on a periodic grid at one time index."""

    dim: int
    shape: tuple
    moments: np.ndarray
    time: int

    def conserved(self, n: int) -> List[np.ndarray]:
        return [self.moments[i] for i in range(n)]


class Arithmetic:
    """Exact fractions in object arrays, or float64."""

    def __init__(self, mode: ArithmeticMode):
        self.mode = ArithmeticMode(mode)

    @property
    def exact(self) -> bool:
        return self.mode == ArithmeticMode.RATIONAL

    def number(self, value: Any) -> Any:
        return Fraction(value) if self.exact else float(value)

    def array(self, values: Any) -> np.ndarray:
        if self.exact:
            data = np.asarray(values, dtype=object)
            return np.vectorize(Fraction, otypes=[object])(data) if data.size else data
        return np.asarray(values, dtype=float)

    def zeros(self, shape: Sequence[int]) -> np.ndarray:
        if self.exact:
            out = np.empty(tuple(shape), dtype=object)
            out.fill(Fraction(0))
            return out
        return np.zeros(tuple(shape), dtype=float)


def initial_profile(cfg: RunConfig, dim: int, conserved: int) -> List[np.ndarray]:
    """Initial conserved moments on a cfg.cells^dim grid."""
    arith = Arithmetic(cfg.mode)
    shape = (cfg.cells,) * dim
    amplitude = Fraction(cfg.amplitude)
    if cfg.profile == InitialProfile.RANDOM:
        rng = np.random.default_rng(cfg.seed)
        draws = rng.integers(-50, 51, size=(conserved,) + shape)
        return [arith.array([Fraction(int(v), 50) * amplitude for v in draws[i].ravel()]).reshape(shape)
                for i in range(conserved)]
    fields = [arith.zeros(shape) for _ in range(conserved)]
    if cfg.profile == InitialProfile.CONSTANT:
        for f in fields:
            f.fill(arith.number(amplitude))
    elif cfg.profile == InitialProfile.DELTA:
        fields[0][(0,) * dim] = arith.number(amplitude)
    elif cfg.profile == InitialProfile.SINE:
        x = np.arange(cfg.cells) / cfg.cells
        wave = float(amplitude) * np.sin(2 * math.pi * cfg.wavenumber * x)
        profile = arith.array(wave.tolist())
        fields[0] = np.broadcast_to(profile.reshape((cfg.cells,) + (1,) * (dim - 1)), shape).copy()
    return fields


class LBMSimulator:
    """Collide in moment space, stream the distributions by np.roll."""

    def __init__(self, scheme: LBMScheme, mode: ArithmeticMode = ArithmeticMode.RATIONAL):
        self.scheme = scheme
        self.arith = Arithmetic(mode)
        double = not self.arith.exact
        m, minv, rates = SchemeService(scheme.canonical()).numeric_moments(double)
        kind = float if double else object
        self.m = np.array(m, dtype=kind)
        self.minv = np.array(minv, dtype=kind)
        self.rates = np.array(rates, dtype=kind)
        self.equilibria = [[(key, self.arith.number(c)) for key, c in eq.numeric_terms(scheme.bindings)]
                           for eq in scheme.equilibria]

    def equilibrium(self, conserved: Sequence[np.ndarray]) -> np.ndarray:
        return np.stack([evaluate_numeric(terms, conserved) for terms in self.equilibria])

    def initial_state(self, conserved: Sequence[np.ndarray]) -> GridState:
        """Non-conserved moments start at equilibrium."""
        moments = self.equilibrium(conserved)
        return GridState(self.scheme.dim, moments.shape[1:], moments, 0)

    def collide(self, moments: np.ndarray) -> np.ndarray:
        meq = self.equilibrium([moments[i] for i in range(self.scheme.conserved)])
        rates = self.rates.reshape((-1,) + (1,) * self.scheme.dim)
        return moments + rates * (meq - moments)

    def stream(self, moments: np.ndarray) -> np.ndarray:
        f = np.tensordot(self.minv, moments, axes=1)
        f = np.stack([shift_grid(f[j], c) for j, c in enumerate(self.scheme.velocities)])
        return np.tensordot(self.m, f, axes=1)

    def step(self, state: GridState) -> GridState:
        moments = self.stream(self.collide(state.moments))
        return GridState(state.dim, state.shape, moments, state.time + 1)

    def run(self, initial: Sequence[np.ndarray], steps: int) -> List[GridState]:
        states = [self.initial_state(initial)]
        for _ in range(steps):
            states.append(self.step(states[-1]))
        return states


def lbm_run(scheme: LBMScheme, cfg: RunConfig, initial: Optional[Sequence[np.ndarray]] = None) -> List[GridState]:
    simulator = LBMSimulator(scheme, cfg.mode)
    if initial is None:
        initial = initial_profile(cfg, scheme.dim, scheme.conserved)
    states = simulator.run(initial, cfg.steps)
    logger.info(f"LBM run finished: {cfg.steps} steps on {cfg.cells} cells ({cfg.mode.value})")
    return states


class FDRunner:
    """Advance the conserved moments with specialized multi-step stencils."""

    def __init__(self, scheme: LBMScheme, stencils: Sequence[Stencil], mode: ArithmeticMode):
        self.scheme = scheme
        self.stencils = list(stencils)
        self.arith = Arithmetic(mode)
        self.depth = max(s.steps for s in self.stencils)
        self.equilibria: Dict[int, list] = {}
        for stencil in self.stencils:
            for j, terms in stencil.equilibria.items():
                self.equilibria[j] = [(key, self.arith.number(c)) for key, c in terms]

    def _number(self, value: Fraction) -> Any:
        return self.arith.number(value)

    def advance(self, history: List[List[np.ndarray]]) -> List[np.ndarray]:
        """New conserved level from the stored ones (history[-1] is the newest)."""
        if len(history) < self.depth:
            raise HistoryError(f"FD scheme needs {self.depth} stored levels, got {len(history)}")
        n = self.scheme.conserved
        sources: Dict[int, List[np.ndarray]] = {i: [level[i] for level in history] for i in range(n)}
        for j, terms in self.equilibria.items():
            sources[j] = [evaluate_numeric(terms, level) for level in history]
        new = []
        for stencil in self.stencils:
            fd = stencil.scheme
            base = len(history) - fd.steps
            rest = fd.lhs - OperatorPoly.z(fd.lhs.field, fd.lhs.dim, fd.steps)
            value = -apply_operator(rest, sources[fd.index], base, self._number) if rest else \
                self.arith.zeros(history[-1][0].shape)
            for op, j in fd.rhs_conserved + fd.rhs_equilibrium:
                value = value + apply_operator(op, sources[j], base, self._number)
            new.append(value)
        return new

    def run(self, seed: List[List[np.ndarray]], levels: int) -> List[List[np.ndarray]]:
        history = list(seed)
        while len(history) < levels:
            history.append(self.advance(history))
        return history


def fd_run(scheme: LBMScheme, stencils: Sequence[Stencil], cfg: RunConfig,
           seed: List[List[np.ndarray]]) -> List[List[np.ndarray]]:
    """Conserved-moment levels 0..cfg.steps, the first ones taken from the seed."""
    runner = FDRunner(scheme, stencils, cfg.mode)
    if len(seed) < runner.depth:
        raise HistoryError(f"Seed has {len(seed)} levels, the FD scheme needs {runner.depth}")
    return runner.run(seed, cfg.steps + 1)


def _max_abs(values: Sequence[np.ndarray], exact: bool) -> Any:
    best = Fraction(0) if exact else 0.0
    for v in values:
        if v.size:
            m = max(abs(x) for x in v.ravel()) if exact else float(np.max(np.abs(v)))
            best = max(best, m)
    return best


def equivalence_compare(scheme: LBMScheme, cfg: RunConfig) -> EquivalenceReport:
    """Max deviation between LBM and FD conserved moments after the seeded levels."""
    reducer = FDReductionService(scheme)
    stencils = [reducer.specialize_stencil(fd) for fd in reducer.reduce_multi()]
    depth = max(s.steps for s in stencils)
    warmup = depth if cfg.warmup is None else cfg.warmup
    states = lbm_run(scheme, cfg)
    lbm_levels = [state.conserved(scheme.conserved) for state in states]
    fd_levels = fd_run(scheme, stencils, cfg, lbm_levels[:warmup])
    diffs = [a - b for lbm, fd in zip(lbm_levels[warmup:], fd_levels[warmup:]) for a, b in zip(lbm, fd)]
    exact = cfg.mode == ArithmeticMode.RATIONAL
    deviation = _max_abs(diffs, exact)
    if exact:
        passed = deviation == 0
        tolerance = None
    else:
        tolerance = settings.double_tolerance
        passed = deviation <= tolerance
    logger.info(f"Equivalence ({cfg.mode.value}): deviation {deviation} over {cfg.steps} steps")
    return EquivalenceReport(mode=cfg.mode, cells=cfg.cells, steps=cfg.steps, deviation=str(deviation),
                             tolerance=tolerance, passed=passed)


def global_sums(state: GridState, conserved: int) -> List[Any]:
    return [state.moments[i].sum() for i in range(conserved)]


def simulate(scheme: LBMScheme, cfg: RunConfig) -> SimulationReport:
    """LBM run with per-step totals of the conserved moments."""
    states = lbm_run(scheme, cfg)
    n = scheme.conserved
    rows = []
    first = global_sums(states[0], n)
    drift = [Fraction(0) if cfg.mode == ArithmeticMode.RATIONAL else 0.0] * n
    for state in states:
        sums = global_sums(state, n)
        rows.append(SimulationRow(step=state.time, sums=[str(v) for v in sums]))
        drift = [max(d, abs(v - v0)) for d, v, v0 in zip(drift, sums, first)]
    return SimulationReport(mode=cfg.mode, cells=cfg.cells, steps=cfg.steps, rows=rows,
                            drift=[str(d) for d in drift])
