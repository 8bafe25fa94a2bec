"""Experiment configuration for the nvqrao command line."""

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from ..encoding import AXIS_ORDER
from ..evolution.methods import EvolutionMethod
from ..pauli import PauliAxis
from ..qaoa import AnsatzMode
from ..statevector import InitialState

PARAMS_SOURCES = ("optimize", "fixed-table", "explicit")
ENTROPY_UNITS = ("nats", "bits")
SUPPORTED_PRNGS = ("PCG64",)


class ConfigError(ValueError):
    """Raised for invalid or inconsistent experiment settings."""


@dataclass
class ExperimentConfig:
    """
    Settings shared by every subcommand. Loaded from one JSON file; command
    line flags override individual fields.
    """

    sizes: List[int] = field(default_factory=lambda: [10, 12])
    """Graph sizes N to generate."""

    instances_per_size: int = 30
    degree: int = 3

    prng: str = "PCG64"
    """Bit generator behind every seeded draw. Recorded for provenance."""

    seed: int = 0
    """Base seed for instance generation and optimizer restarts."""

    m: int = 3
    """Bits per qubit of the QRAC (2 or 3)."""

    mode: str = AnsatzMode.QRAO.value
    mixer: str = "Z"

    init: Optional[str] = None
    """Initial state (zero, plus, minus-i). Defaults to the mixer's paired state."""

    evolutions: List[str] = field(default_factory=lambda: ["exact"])
    """Cost-layer methods: ``exact``, ``trotter:T``, ``grouped:T``."""

    p_min: int = 1
    p_max: int = 6

    encoding_seed: Optional[int] = None
    shuffle_terms: Optional[int] = None
    """Seed for shuffling cost-term order; None keeps edge order."""

    restarts: int = 10
    budget: int = 5000
    """Energy evaluations per optimizer restart."""

    workers: int = 1

    output: str = "runs/default"
    """Output store: a directory, ``file://`` or ``s3://`` URI."""

    instances: Optional[str] = None
    """Store holding ``instances/manifest.json``. Defaults to ``output``."""

    instance_ids: Optional[List[str]] = None
    """Instances evaluated by ``run``; None means all."""

    train_ids: Optional[List[str]] = None
    """Instances used by ``fixed-params``; None means all."""

    params_source: str = "optimize"
    angle_table: Optional[str] = None
    """Fixed-parameter table JSON, required when params_source is ``fixed-table``."""

    explicit_params: Optional[str] = None
    """Schedule or table JSON, required when params_source is ``explicit``."""

    permutations: int = 10
    """Random bipartitions averaged per entropy value."""

    entropy_unit: str = "nats"

    sampled_shots: Optional[int] = None
    """Shots per axis for sampled Pauli rounding; None rounds exactly."""

    max_nodes: int = 30
    """Largest graph handed to the brute-force oracle."""

    dump_states: bool = False

    report_inputs: List[str] = field(default_factory=list)
    """Run stores aggregated by ``report``. Defaults to ``[output]``."""

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """
        Raises:
            ConfigError: On any invalid field
        """
        if not self.sizes or any(int(n) < 1 for n in self.sizes):
            raise ConfigError(f"sizes must be positive integers, got {self.sizes}")
        if self.instances_per_size < 0:
            raise ConfigError("instances_per_size must be non-negative")
        if self.degree < 0:
            raise ConfigError("degree must be non-negative")
        if self.prng not in SUPPORTED_PRNGS:
            raise ConfigError(f"Unsupported prng: {self.prng}")
        if self.m not in AXIS_ORDER:
            raise ConfigError(f"m must be 2 or 3, got {self.m}")
        try:
            AnsatzMode(self.mode)
            PauliAxis.parse(self.mixer)
            if self.init is not None:
                InitialState(self.init)
            for text in self.evolutions:
                EvolutionMethod.parse(text)
        except ValueError as e:
            raise ConfigError(str(e))
        if not self.evolutions:
            raise ConfigError("At least one evolution method is required")
        if not 0 <= self.p_min <= self.p_max:
            raise ConfigError(f"Need 0 <= p_min <= p_max, got {self.p_min}..{self.p_max}")
        if self.restarts < 1 or self.budget < 1 or self.workers < 1:
            raise ConfigError("restarts, budget and workers must be at least 1")
        if self.params_source not in PARAMS_SOURCES:
            raise ConfigError(f"Unknown params source: {self.params_source}")
        if self.params_source == "fixed-table" and not self.angle_table:
            raise ConfigError("params_source 'fixed-table' requires angle_table")
        if self.params_source == "explicit" and not self.explicit_params:
            raise ConfigError("params_source 'explicit' requires explicit_params")
        if self.permutations < 1:
            raise ConfigError("permutations must be at least 1")
        if self.entropy_unit not in ENTROPY_UNITS:
            raise ConfigError(f"Unknown entropy unit: {self.entropy_unit}")
        if self.sampled_shots is not None and self.sampled_shots < 1:
            raise ConfigError("sampled_shots must be positive")

    @property
    def entropy_base(self) -> Optional[float]:
        return 2.0 if self.entropy_unit == "bits" else None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def with_overrides(self, **overrides: Any) -> "ExperimentConfig":
        """Copy with every non-None override applied (and re-validated)."""
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigError(f"Unknown config fields: {sorted(unknown)}")
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def config_hash(config: ExperimentConfig) -> str:
    """First 16 hex digits of the sha256 of the canonical config JSON."""
    canonical = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


# Fields that choose which cells are evaluated, where they come from or where
# they go. A cell's values never depend on them.
SCOPE_FIELDS = frozenset(
    {
        "sizes",
        "instances_per_size",
        "degree",
        "evolutions",
        "p_max",
        "workers",
        "output",
        "instances",
        "instance_ids",
        "train_ids",
        "angle_table",
        "explicit_params",
        "max_nodes",
        "dump_states",
        "report_inputs",
    }
)


def settings_hash(config: ExperimentConfig, extra: Optional[Dict[str, Any]] = None) -> str:
    """
    Digest of every setting that determines a metrics cell's values.

    Scope fields are left out, so widening a run (more depths, more
    instances) keeps its finished cells. The mixer and initial state are
    normalized, so ``mixer="x"`` and an explicit ``init="plus"`` hash like
    the defaults they spell. ``extra`` carries inputs read from files, such
    as the loaded angle schedules.
    """
    settings = {k: v for k, v in config.to_dict().items() if k not in SCOPE_FIELDS}
    mixer = PauliAxis.parse(config.mixer)
    settings["mixer"] = mixer.value
    settings["init"] = config.init or InitialState.for_mixer(mixer).value
    settings["extra"] = extra
    canonical = json.dumps(settings, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def load_config(source: Optional[Union[str, Path, Dict[str, Any]]] = None) -> ExperimentConfig:
    """
    Build a config from a JSON file, a dict, or defaults.

    Raises:
        ConfigError: For unreadable JSON, unknown keys or invalid values
    """
    if source is None:
        return ExperimentConfig()
    if isinstance(source, dict):
        data = source
    else:
        path = Path(source)
        if not path.is_file():
            raise ConfigError(f"Config file not found: {path}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"Config file {path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise ConfigError("Config JSON must be an object")

    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"Unknown config fields: {sorted(unknown)}")
    try:
        return ExperimentConfig(**data)
    except TypeError as e:
        raise ConfigError(str(e))
