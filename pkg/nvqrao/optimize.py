"""Derivative-free angle optimization and the fixed-parameter protocol."""

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import minimize

from .evolution.methods import EvolutionKind
from .graph import Graph
from .qaoa import AnsatzMode, AnsatzSpec, AnsatzTemplate, ParameterSchedule, energy

logger = logging.getLogger(__name__)

DEFAULT_RESTARTS = 10
DEFAULT_BUDGET = 5000

# Nelder-Mead stopping tolerances on parameters and energy
XATOL = 1e-5
FATOL = 1e-6

GAMMA_BOX = (0.0, math.pi)
BETA_BOX = (0.0, math.pi / 2)

# Period of every mixer rotation in beta (up to a global phase)
BETA_PERIOD = math.pi

CONCENTRATION_COLUMNS = ["p", "layer", "which", "mean", "std", "min", "max", "n"]


class _BudgetExhausted(Exception):
    pass


@dataclass
class OptimizationResult:
    """Best schedule found by a multi-start search."""

    best_params: ParameterSchedule
    best_energy: float
    evaluations: int
    trace: List[Tuple[ParameterSchedule, float]] = field(default_factory=list)
    """Every evaluation that improved on the best so far, in order."""

    restarts: int = 0


class _Objective:
    """Energy with an evaluation budget and a best-so-far trace."""

    def __init__(self, spec: AnsatzSpec, budget: int):
        self.spec = spec
        self.budget = budget
        self.calls = 0
        self.best: Optional[Tuple[ParameterSchedule, float]] = None
        self.trace: List[Tuple[ParameterSchedule, float]] = []

    def __call__(self, vector: np.ndarray) -> float:
        if self.calls >= self.budget:
            raise _BudgetExhausted()
        self.calls += 1
        schedule = ParameterSchedule.from_vector(vector)
        value = energy(self.spec, schedule)
        if self.best is None or value < self.best[1]:
            self.best = (schedule, value)
            self.trace.append(self.best)
        return value


def _random_point(rng: np.random.Generator, p: int) -> np.ndarray:
    gammas = rng.uniform(GAMMA_BOX[0], GAMMA_BOX[1], size=p)
    betas = rng.uniform(BETA_BOX[0], BETA_BOX[1], size=p)
    return np.concatenate([gammas, betas])


def interpolate_schedule(schedule: ParameterSchedule) -> ParameterSchedule:
    """
    Lift a depth-p schedule to depth p+1 by linear interpolation.

    ``new[j] = j/p * old[j-1] + (p-j)/p * old[j]`` with zeros outside the old range.
    """
    p = schedule.p
    if p == 0:
        return ParameterSchedule((0.0,), (0.0,))

    def lift(values: Tuple[float, ...]) -> Tuple[float, ...]:
        padded = (0.0,) + values + (0.0,)
        return tuple((j / p) * padded[j] + ((p - j) / p) * padded[j + 1] for j in range(p + 1))

    return ParameterSchedule(lift(schedule.gammas), lift(schedule.betas))


def optimize_params(
    spec: AnsatzSpec,
    p: int,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    warm_start: Optional[ParameterSchedule] = None,
) -> OptimizationResult:
    """
    Minimize the ansatz energy over p layers of angles.

    Runs Nelder-Mead from ``restarts`` starting points drawn uniformly from
    the box gamma in [0, pi], beta in [0, pi/2]. A warm start, if given,
    replaces the first random start.

    ``budget`` applies to each restart separately, so a call spends up to
    ``restarts * budget`` energy evaluations in total.

    Args:
        spec: Ansatz to optimize
        p: Number of layers
        restarts: Number of starting points
        seed: Seed for the starting points
        budget: Maximum energy evaluations per restart
        warm_start: Optional depth-p starting schedule

    Returns:
        OptimizationResult with the best schedule over all restarts
    """
    if budget < 1:
        raise ValueError(f"budget must be at least 1, got {budget}")
    if restarts < 1:
        raise ValueError(f"restarts must be at least 1, got {restarts}")
    if warm_start is not None and warm_start.p != p:
        raise ValueError(f"Warm start has p={warm_start.p}, expected {p}")

    if p == 0:
        empty = ParameterSchedule()
        value = energy(spec, empty)
        return OptimizationResult(empty, value, 1, [(empty, value)], restarts=1)

    rng = np.random.default_rng(seed)
    best: Optional[Tuple[ParameterSchedule, float]] = None
    trace: List[Tuple[ParameterSchedule, float]] = []
    evaluations = 0

    for restart in range(restarts):
        start = _random_point(rng, p)
        if restart == 0 and warm_start is not None:
            start = warm_start.to_vector()

        objective = _Objective(spec, budget)
        try:
            minimize(
                objective,
                start,
                method="Nelder-Mead",
                options={"maxfev": budget, "xatol": XATOL, "fatol": FATOL},
            )
        except _BudgetExhausted:
            pass

        evaluations += objective.calls
        assert objective.best is not None
        logger.debug(
            "p=%d restart %d: energy %.8f after %d evaluations",
            p,
            restart,
            objective.best[1],
            objective.calls,
        )
        if best is None or objective.best[1] < best[1]:
            best = objective.best
            for entry in objective.trace:
                if not trace or entry[1] < trace[-1][1]:
                    trace.append(entry)

    assert best is not None
    return OptimizationResult(best[0], best[1], evaluations, trace, restarts=restarts)


def optimize_depths(
    spec: AnsatzSpec,
    p_max: int,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    p_min: int = 1,
) -> Dict[int, OptimizationResult]:
    """
    Optimize every depth in ``p_min..p_max``, warm-starting each from the
    interpolated optimum of the previous depth.

    The seed used at depth p depends only on (seed, p).
    """
    results: Dict[int, OptimizationResult] = {}
    previous: Optional[ParameterSchedule] = None
    for p in range(p_min, p_max + 1):
        warm = interpolate_schedule(previous) if previous is not None else None
        depth_seed = int(np.random.SeedSequence([seed, p]).generate_state(1)[0])
        results[p] = optimize_params(spec, p, restarts, depth_seed, budget, warm_start=warm)
        previous = results[p].best_params
    return results


def cost_period(spec: AnsatzSpec) -> Optional[float]:
    """
    Period of the state in each gamma, or None if it is not periodic.

    Integer-coefficient diagonal Hamiltonians repeat every pi. A plain
    Trotter product of unit Pauli terms repeats every pi*T.
    """
    integer = all(float(c).is_integer() for c, _ in spec.hamiltonian.terms)
    if not integer:
        return None
    if spec.mode == AnsatzMode.STANDARD or spec.hamiltonian.is_diagonal:
        return math.pi
    if spec.evolution.kind == EvolutionKind.TROTTER:
        return math.pi * spec.evolution.steps
    return None


def canonicalize_schedule(
    schedule: ParameterSchedule,
    gamma_period: Optional[float],
    beta_period: Optional[float] = BETA_PERIOD,
) -> ParameterSchedule:
    """Wrap angles into ``[0, period)``; a None period leaves them as they are."""
    gammas = schedule.gammas
    betas = schedule.betas
    if gamma_period:
        gammas = tuple(float(np.mod(g, gamma_period)) for g in gammas)
    if beta_period:
        betas = tuple(float(np.mod(b, beta_period)) for b in betas)
    return ParameterSchedule(gammas, betas)


def performance_ratio(fixed: float, optimized: float) -> float:
    """alpha(fixed) / alpha(optimized)."""
    if optimized == 0:
        raise ValueError("Performance ratio is undefined for an optimized score of 0")
    return fixed / optimized


@dataclass
class FixedParameterTable:
    """
    Instance-independent schedules per depth, averaged over training optima.
    """

    mode: str
    mixer: str
    m: Optional[int] = None
    evolution: str = "exact"

    schedules: Dict[int, ParameterSchedule] = field(default_factory=dict)
    """Averaged schedule for each depth p."""

    per_instance: Dict[int, List[ParameterSchedule]] = field(default_factory=dict)
    """Canonicalized per-instance optima for each p, in instance order."""

    provenance: Dict[str, Any] = field(default_factory=dict)
    """Seeds, sizes, optimizer settings and anything else needed to regenerate the table."""

    def schedule_for(self, p: int) -> ParameterSchedule:
        if p == 0:
            return ParameterSchedule()
        if p not in self.schedules:
            raise ValueError(f"Fixed-parameter table has no schedule for p={p}")
        return self.schedules[p]

    def matches(self, mode: str, mixer: str, m: Optional[int]) -> bool:
        if self.mode != mode or self.mixer != mixer:
            return False
        return mode != AnsatzMode.QRAO.value or self.m == m

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode,
            "mixer": self.mixer,
            "m": self.m,
            "evolution": self.evolution,
            "schedules": {str(p): s.to_dict() for p, s in sorted(self.schedules.items())},
            "per_instance": {
                str(p): [s.to_dict() for s in rows] for p, rows in sorted(self.per_instance.items())
            },
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FixedParameterTable":
        """
        Load a table; ``per_instance`` and ``provenance`` are optional, so a
        hand-written angle table of the same shape also loads.
        """
        if "schedules" not in data:
            raise ValueError("Fixed-parameter table requires 'schedules'")
        return cls(
            mode=data.get("mode", AnsatzMode.QRAO.value),
            mixer=data.get("mixer", "X"),
            m=data.get("m"),
            evolution=data.get("evolution", "exact"),
            schedules={
                int(p): ParameterSchedule.from_dict(s) for p, s in data["schedules"].items()
            },
            per_instance={
                int(p): [ParameterSchedule.from_dict(s) for s in rows]
                for p, rows in data.get("per_instance", {}).items()
            },
            provenance=data.get("provenance", {}),
        )

    @classmethod
    def from_json(cls, text: str) -> "FixedParameterTable":
        return cls.from_dict(json.loads(text))


def _optimize_instance(
    args: Tuple[Graph, AnsatzTemplate, int, int, int, int]
) -> Dict[int, ParameterSchedule]:
    g, template, p_max, restarts, seed, budget = args
    spec = template.build(g)
    period = cost_period(spec)
    results = optimize_depths(spec, p_max, restarts, seed, budget)
    return {p: canonicalize_schedule(r.best_params, period) for p, r in results.items()}


def build_fixed_parameters(
    instances: Sequence[Graph],
    p_max: int,
    template: AnsatzTemplate,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> FixedParameterTable:
    """
    Optimize every training instance at p = 1..p_max and average the optima.

    Each optimum is wrapped into the canonical box before the component-wise
    mean is taken. Instances are optimized in parallel when ``workers > 1``;
    the reduction always runs in instance order.

    Raises:
        ValueError: If no instances are given
    """
    if not instances:
        raise ValueError("build_fixed_parameters needs at least one instance")
    if p_max < 1:
        raise ValueError(f"p_max must be at least 1, got {p_max}")

    jobs = [(g, template, p_max, restarts, seed, budget) for g in instances]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            optima = list(executor.map(_optimize_instance, jobs))
    else:
        optima = [_optimize_instance(job) for job in jobs]
    logger.info("Optimized %d training instances up to p=%d", len(instances), p_max)

    table = FixedParameterTable(
        mode=template.mode.value,
        mixer=template.mixer.value,
        m=template.m if template.mode == AnsatzMode.QRAO else None,
        evolution=str(template.evolution),
    )
    for p in range(1, p_max + 1):
        rows = [instance[p] for instance in optima]
        mean = np.mean([row.to_vector() for row in rows], axis=0)
        table.schedules[p] = ParameterSchedule.from_vector(mean)
        table.per_instance[p] = rows

    table.provenance = {
        "seed": seed,
        "restarts": restarts,
        "budget": budget,
        "p_max": p_max,
        "n_instances": len(instances),
        "sizes": sorted({g.n_nodes for g in instances}),
        "template": template.describe(),
        "optimizer": {"method": "Nelder-Mead", "xatol": XATOL, "fatol": FATOL},
    }
    return table


def concentration_report(table: FixedParameterTable) -> pd.DataFrame:
    """
    Spread of the per-instance optima for every (p, layer, gamma/beta).

    Standard deviations are population values (ddof=0).

    Raises:
        ValueError: If the table carries no per-instance optima
    """
    if not table.per_instance:
        raise ValueError("Concentration report needs per-instance optima")

    records = []
    for p, rows in sorted(table.per_instance.items()):
        for which in ("gamma", "beta"):
            values = np.array([row.gammas if which == "gamma" else row.betas for row in rows])
            for layer in range(p):
                column = values[:, layer]
                records.append(
                    {
                        "p": p,
                        "layer": layer + 1,
                        "which": which,
                        "mean": float(column.mean()),
                        "std": float(column.std(ddof=0)),
                        "min": float(column.min()),
                        "max": float(column.max()),
                        "n": int(column.size),
                    }
                )
    return pd.DataFrame.from_records(records, columns=CONCENTRATION_COLUMNS)
