"""
Subcommand implementations.

Every command takes an ExperimentConfig, writes its artifacts through an
output store and returns a small JSON-serializable summary.
"""

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..adapters.base import StorageReadParams, StorageWriteParams
from ..encoding import assign_qubits, relaxed_hamiltonian
from ..evolution.methods import EvolutionMethod
from ..graph import (
    ClassicalExtrema,
    GenerationError,
    Graph,
    brute_force_extrema,
    generate_random_regular,
)
from ..optimize import (
    FixedParameterTable,
    build_fixed_parameters,
    concentration_report,
    optimize_depths,
    performance_ratio,
)
from ..pauli import PauliAxis, extremal_eigenvalues, format_hamiltonian
from ..qaoa import AnsatzMode, AnsatzTemplate, ParameterSchedule, run_ansatz
from ..rounding import CSV_COLUMNS, MetricsRecord, entropy_trajectory, score_state
from ..statevector import InitialState
from ..storage import create_storage_adapter
from .config import ConfigError, ExperimentConfig, config_hash, settings_hash

logger = logging.getLogger(__name__)

MANIFEST_KEY = "instances/manifest.json"
METRICS_KEY = "metrics.csv"
ENTROPY_KEY = "entropy.csv"
FIXED_PARAMS_KEY = "fixed_params.json"
CONCENTRATION_KEY = "concentration.csv"
REPORT_MANIFEST_KEY = "report/manifest.json"

ENTROPY_COLUMNS = ["instance", "p", "evolution", "settings_hash", "layer", "entropy"]

# (instance, p, evolution, settings_hash)
RowKey = Tuple[str, int, str, str]


class Store:
    """JSON/CSV helpers over a storage adapter; names are resolved against its prefix."""

    def __init__(self, uri: Optional[str]):
        self.adapter = create_storage_adapter(uri)

    def key(self, name: str) -> str:
        return self.adapter.resolve_key(name)

    def exists(self, name: str) -> bool:
        return self.adapter.exists(self.key(name))

    def read_text(self, name: str) -> str:
        return self.adapter.read_text(StorageReadParams(key=self.key(name)))

    def read_json(self, name: str) -> Any:
        return json.loads(self.read_text(name))

    def read_frame(self, name: str, as_text: bool = False) -> pd.DataFrame:
        stream = self.adapter.open_read_stream(StorageReadParams(key=self.key(name)))
        try:
            if as_text:
                return pd.read_csv(stream, dtype=str, keep_default_na=False)
            return pd.read_csv(stream)
        finally:
            stream.close()

    def names(self, prefix: str = "") -> List[str]:
        """Stored names under ``prefix``, relative to this store, sorted."""
        root = self.key("")
        names = [key[len(root) :] for key in self.adapter.list_keys(root)]
        return [name for name in names if name.startswith(prefix)]

    def write(self, name: str, body: Any, content_type: Optional[str] = None) -> str:
        result = self.adapter.write(
            StorageWriteParams(key=self.key(name), body=body, content_type=content_type)
        )
        return result.key

    def write_json(self, name: str, data: Any) -> str:
        return self.write(
            name, json.dumps(data, indent=2, sort_keys=True) + "\n", "application/json"
        )

    def write_frame(self, name: str, frame: pd.DataFrame) -> str:
        return self.write(name, frame.to_csv(index=False), "text/csv")

    def __str__(self) -> str:
        return str(self.adapter)


def instance_id(n: int, index: int) -> str:
    return f"n{n:02d}-{index:03d}"


def derive_seed(*entropy: int) -> int:
    """Stable 32-bit seed from a tuple of integers."""
    return int(np.random.SeedSequence(list(entropy)).generate_state(1)[0])


def build_template(config: ExperimentConfig, evolution: str) -> AnsatzTemplate:
    return AnsatzTemplate(
        mode=AnsatzMode(config.mode),
        m=config.m,
        mixer=PauliAxis.parse(config.mixer),
        init=InitialState(config.init) if config.init else None,
        evolution=EvolutionMethod.parse(evolution),
        encoding_seed=config.encoding_seed,
        shuffle_seed=config.shuffle_terms,
    )


def _map_jobs(fn: Callable, jobs: Sequence, workers: int) -> Iterator:
    """Results of ``fn`` over ``jobs`` in job order."""
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            yield from executor.map(fn, jobs)
    else:
        for job in jobs:
            yield fn(job)


def _load_instances(
    config: ExperimentConfig, ids: Optional[Iterable[str]]
) -> List[Tuple[Dict[str, Any], Graph]]:
    store = Store(config.instances or config.output)
    if not store.exists(MANIFEST_KEY):
        raise ConfigError(f"No instance manifest in {store}; run 'nvqrao gen' first")
    manifest = store.read_json(MANIFEST_KEY)
    entries = [e for e in manifest["instances"] if e.get("status") == "ok"]
    if ids is not None:
        wanted = set(ids)
        missing = sorted(wanted - {e["id"] for e in entries})
        if missing:
            raise ConfigError(f"Unknown or failed instance ids: {missing}")
        entries = [e for e in entries if e["id"] in wanted]
    return [(e, Graph.from_json(store.read_text(e["file"]))) for e in entries]


def cmd_gen(config: ExperimentConfig) -> Dict[str, Any]:
    """
    Generate the random regular instance suite and its manifest.

    Instance ``n{N}-{index}`` is seeded from (seed, N, index) alone, so a
    suite can grow without changing existing files. Failed instances (odd
    N*k, exhausted restarts) are recorded in the manifest and skipped.
    """
    store = Store(config.instances or config.output)
    entries = []
    for n in config.sizes:
        for index in range(config.instances_per_size):
            name = instance_id(n, index)
            seed = derive_seed(config.seed, n, index)
            entry: Dict[str, Any] = {
                "id": name,
                "n": n,
                "k": config.degree,
                "index": index,
                "seed": seed,
            }
            try:
                g = generate_random_regular(n, config.degree, seed)
            except (ValueError, GenerationError) as e:
                logger.warning("Skipping instance %s: %s", name, e)
                entry.update(status="error", error=str(e))
            else:
                entry.update(status="ok", file=f"instances/{name}.json")
                store.write(entry["file"], g.to_json() + "\n", "application/json")
            entries.append(entry)

    manifest = {
        "config_hash": config_hash(config),
        "prng": config.prng,
        "seed": config.seed,
        "degree": config.degree,
        "instances": entries,
    }
    store.write_json(MANIFEST_KEY, manifest)
    ok = sum(1 for e in entries if e["status"] == "ok")
    logger.info("Generated %d instances (%d failed) in %s", ok, len(entries) - ok, store)
    return {"generated": ok, "failed": len(entries) - ok, "store": str(store)}


def cmd_encode(config: ExperimentConfig) -> Dict[str, Any]:
    """Write each instance's QRAC encoding JSON and relaxed Hamiltonian text."""
    store = Store(config.output)
    digest = config_hash(config)
    count = 0
    for entry, g in _load_instances(config, config.instance_ids):
        encoding = assign_qubits(g, config.m, config.encoding_seed)
        hamiltonian = relaxed_hamiltonian(g, encoding)
        header = (
            f"# {entry['id']} m={config.m} n_qubits={encoding.n_qubits} config_hash={digest}\n"
        )
        store.write(f"encodings/{entry['id']}.json", encoding.to_json() + "\n")
        store.write(f"hamiltonians/{entry['id']}.txt", header + format_hamiltonian(hamiltonian))
        count += 1
    logger.info("Encoded %d instances into %s", count, store)
    return {"encoded": count, "store": str(store)}


def _classical_extrema(
    store: Store, entry: Dict[str, Any], g: Graph, max_nodes: int
) -> ClassicalExtrema:
    """Brute-force extrema, cached under ``oracles/``."""
    key = f"oracles/{entry['id']}.json"
    if store.exists(key):
        return ClassicalExtrema.from_dict(store.read_json(key))
    extrema = brute_force_extrema(g, max_nodes)
    store.write_json(key, {"instance": entry["id"], "n_nodes": g.n_nodes, **extrema.to_dict()})
    return extrema


def cmd_oracle(config: ExperimentConfig) -> Dict[str, Any]:
    """Dump brute-force MaxCut extrema for every instance."""
    store = Store(config.output)
    done = failed = 0
    for entry, g in _load_instances(config, config.instance_ids):
        try:
            _classical_extrema(store, entry, g, config.max_nodes)
        except ValueError as e:
            logger.warning("No oracle for %s: %s", entry["id"], e)
            failed += 1
        else:
            done += 1
    return {"oracles": done, "failed": failed, "store": str(store)}


def _read_json_file(path: str) -> Dict[str, Any]:
    source = Path(path)
    if not source.is_file():
        raise ConfigError(f"Parameter file not found: {source}")
    try:
        return json.loads(source.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"Parameter file {source} is not valid JSON: {e}")


def _given_schedules(config: ExperimentConfig) -> Optional[Dict[int, ParameterSchedule]]:
    """
    Schedules for the fixed-table and explicit sources, keyed by depth; None
    when parameters are optimized per instance.

    An explicit file holds either a single schedule (evaluated at its own
    depth) or a table of the fixed-parameter shape.
    """
    if config.params_source == "optimize":
        return None
    path = config.angle_table if config.params_source == "fixed-table" else config.explicit_params
    assert path is not None
    data = _read_json_file(path)
    if "schedules" not in data and config.params_source == "fixed-table":
        raise ConfigError(f"Angle table {path} has no 'schedules'")
    try:
        if "schedules" not in data:
            schedule = ParameterSchedule.from_dict(data)
            return {schedule.p: schedule}
        table = FixedParameterTable.from_dict(data)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"Malformed parameter file {path}: {e}")

    mixer = PauliAxis.parse(config.mixer).value
    if config.params_source == "fixed-table" and not table.matches(config.mode, mixer, config.m):
        raise ConfigError(
            f"Angle table is for mode={table.mode} mixer={table.mixer} m={table.m}, "
            f"not mode={config.mode} mixer={mixer} m={config.m}"
        )
    depths = range(config.p_min, config.p_max + 1)
    missing = [p for p in depths if p and p not in table.schedules]
    if missing:
        raise ConfigError(f"Parameter table has no schedule for p={missing}")
    return {p: table.schedule_for(p) for p in depths}


@dataclass(frozen=True)
class _RunJob:
    """All depths still missing for one (instance, evolution) pair."""

    instance: str
    seed: int
    graph: Graph
    classical: ClassicalExtrema
    evolution: str
    depths: Tuple[int, ...]
    schedules: Optional[Dict[int, ParameterSchedule]]
    config: ExperimentConfig
    digest: str
    settings: str


@dataclass
class _Cell:
    record: MetricsRecord
    entropy: List[float]
    state: Optional[bytes] = None
    sidecar: Optional[str] = None


@dataclass
class _JobOutcome:
    instance: str
    evolution: str
    cells: List[_Cell] = field(default_factory=list)
    error: Optional[str] = None


def _run_job(job: _RunJob) -> _JobOutcome:
    """Evaluate one job in a worker; simulator failures are returned, not raised."""
    outcome = _JobOutcome(job.instance, job.evolution)
    try:
        outcome.cells = _evaluate(job)
    except ValueError as e:
        outcome.error = str(e)
    return outcome


def _evaluate(job: _RunJob) -> List[_Cell]:
    config = job.config
    spec = build_template(config, job.evolution).build(job.graph)
    e_min, e_max, _ = extremal_eigenvalues(spec.hamiltonian)

    if job.schedules is None:
        # Always climb from p_min so a resumed run warm-starts exactly like a fresh one.
        results = optimize_depths(
            spec,
            max(job.depths),
            config.restarts,
            derive_seed(config.seed, job.seed),
            config.budget,
            p_min=config.p_min,
        )
        schedules = {p: results[p].best_params for p in job.depths}
    else:
        schedules = job.schedules

    qrao = config.mode == AnsatzMode.QRAO.value
    qubits_qrao = assign_qubits(job.graph, config.m, config.encoding_seed).n_qubits
    cells = []
    for p in job.depths:
        params = schedules[p]
        psi = run_ansatz(spec, params)
        cell_seed = derive_seed(job.seed, p)
        scores = score_state(
            spec, psi, job.graph, job.classical, (e_min, e_max), config.sampled_shots, cell_seed
        )
        record = MetricsRecord(
            instance=job.instance,
            n_nodes=job.graph.n_nodes,
            mode=config.mode,
            m=config.m if qrao else None,
            mixer=spec.mixer.value,
            init=spec.init.value,
            evolution=job.evolution,
            p=p,
            params_source=config.params_source,
            e_qrao=scores.e_qrao,
            relaxed_min=e_min,
            relaxed_max=e_max,
            alpha_r=scores.alpha_r,
            e_qaoa=scores.e_qaoa,
            classical_min=job.classical.e_min,
            classical_max=job.classical.e_max,
            alpha_c=scores.alpha_c,
            cut_value=scores.cut_value,
            ties=scores.ties,
            rounding=scores.rounding,
            qubits_qrao=qubits_qrao,
            qubits_standard=job.graph.n_nodes,
            seed=job.seed,
            settings_hash=job.settings,
            config_hash=job.digest,
        )
        entropy: List[float] = []
        if spec.n_qubits >= 2:
            entropy = entropy_trajectory(
                spec, params, config.permutations, cell_seed, config.entropy_base
            )
        cell = _Cell(record, entropy)
        if config.dump_states:
            cell.state = psi.to_bytes()
            cell.sidecar = psi.sidecar(
                {"instance": job.instance, "evolution": job.evolution, **params.to_dict()}
            )
        cells.append(cell)
    return cells


def _cell_text(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _text_row(row: Dict[str, Any]) -> Dict[str, str]:
    """Render a row the way it reads back, so resumed files stay byte-identical."""
    return {k: _cell_text(v) for k, v in row.items()}


def _row_key(row: Dict[str, str]) -> RowKey:
    # Rows from stores written before settings were hashed never match a new key.
    return (row["instance"], int(row["p"]), row["evolution"], row.get("settings_hash", ""))


def _write_tables(
    store: Store, metrics: Dict[RowKey, Dict[str, str]], entropy: Dict[RowKey, List[Dict[str, str]]]
) -> None:
    order = sorted(metrics, key=lambda k: (k[0], k[2], k[1], k[3]))
    store.write_frame(
        METRICS_KEY, pd.DataFrame([metrics[k] for k in order], columns=list(CSV_COLUMNS))
    )
    entropy_rows = [row for k in order for row in entropy.get(k, [])]
    store.write_frame(ENTROPY_KEY, pd.DataFrame(entropy_rows, columns=ENTROPY_COLUMNS))


def _read_tables(
    store: Store,
) -> Tuple[Dict[RowKey, Dict[str, str]], Dict[RowKey, List[Dict[str, str]]]]:
    metrics: Dict[RowKey, Dict[str, str]] = {}
    entropy: Dict[RowKey, List[Dict[str, str]]] = {}
    if store.exists(METRICS_KEY):
        for row in store.read_frame(METRICS_KEY, as_text=True).to_dict("records"):
            metrics[_row_key(row)] = row
    if store.exists(ENTROPY_KEY):
        for row in store.read_frame(ENTROPY_KEY, as_text=True).to_dict("records"):
            entropy.setdefault(_row_key(row), []).append(row)
    return metrics, entropy


def cmd_run(config: ExperimentConfig) -> Dict[str, Any]:
    """
    Evaluate every (instance, evolution, p) cell and append it to
    ``metrics.csv`` and ``entropy.csv``.

    Cells already present in the output store under the same settings hash
    are skipped, so an interrupted run resumes where it stopped. Changing a
    setting that affects the values (mixer, init, m, params source, budget,
    ...) evaluates fresh rows next to the old ones. Both tables are
    rewritten, sorted, after every finished job.
    """
    store = Store(config.output)
    digest = config_hash(config)
    schedules = _given_schedules(config)
    given = None if schedules is None else {str(p): s.to_dict() for p, s in schedules.items()}
    settings = settings_hash(config, {"schedules": given})
    if schedules is not None and config.params_source == "explicit" and len(schedules) == 1:
        depths: Tuple[int, ...] = tuple(schedules)
    else:
        depths = tuple(range(config.p_min, config.p_max + 1))

    metrics, entropy = _read_tables(store)
    skipped = failed = 0
    jobs: List[_RunJob] = []
    for entry, g in _load_instances(config, config.instance_ids):
        try:
            classical = _classical_extrema(store, entry, g, config.max_nodes)
        except ValueError as e:
            logger.warning("Skipping instance %s: %s", entry["id"], e)
            failed += 1
            continue
        for text in config.evolutions:
            evolution = str(EvolutionMethod.parse(text))
            pending = tuple(
                p for p in depths if (entry["id"], p, evolution, settings) not in metrics
            )
            skipped += len(depths) - len(pending)
            if pending:
                jobs.append(
                    _RunJob(
                        entry["id"],
                        entry["seed"],
                        g,
                        classical,
                        evolution,
                        pending,
                        schedules,
                        config,
                        digest,
                        settings,
                    )
                )
    if skipped:
        logger.info("Resuming: %d cells already complete", skipped)

    _write_tables(store, metrics, entropy)
    completed = 0
    for outcome in _map_jobs(_run_job, jobs, config.workers):
        if outcome.error is not None:
            logger.warning(
                "Run failed for %s (%s): %s", outcome.instance, outcome.evolution, outcome.error
            )
            failed += 1
            continue
        for cell in outcome.cells:
            key = cell.record.key()
            metrics[key] = _text_row(cell.record.to_row())
            entropy[key] = [
                _text_row(
                    {
                        "instance": key[0],
                        "p": key[1],
                        "evolution": key[2],
                        "settings_hash": key[3],
                        "layer": layer,
                        "entropy": value,
                    }
                )
                for layer, value in enumerate(cell.entropy)
            ]
            if cell.state is not None:
                evolution_dir = key[2].replace(":", "-")
                name = f"states/{key[0]}/{key[3]}/{evolution_dir}/p{key[1]}.bin"
                store.write(name, cell.state, "application/octet-stream")
                store.write(name + ".json", cell.sidecar, "application/json")
        completed += len(outcome.cells)
        _write_tables(store, metrics, entropy)
        logger.info(
            "Finished %s (%s): %d cells", outcome.instance, outcome.evolution, len(outcome.cells)
        )

    return {
        "completed": completed,
        "skipped": skipped,
        "failed": failed,
        "rows": len(metrics),
        "settings_hash": settings,
    }


def cmd_fixed_params(config: ExperimentConfig) -> Dict[str, Any]:
    """Average per-instance optima into a fixed-parameter table plus a concentration report."""
    store = Store(config.output)
    instances = _load_instances(config, config.train_ids)
    if not instances:
        raise ConfigError("No training instances; run 'nvqrao gen' first")

    template = build_template(config, config.evolutions[0])
    table = build_fixed_parameters(
        [g for _, g in instances],
        config.p_max,
        template,
        seed=config.seed,
        restarts=config.restarts,
        budget=config.budget,
        workers=config.workers,
    )
    table.provenance.update(
        {
            "config_hash": config_hash(config),
            "prng": config.prng,
            "instances": [entry["id"] for entry, _ in instances],
            "instance_seeds": [entry["seed"] for entry, _ in instances],
        }
    )
    store.write(FIXED_PARAMS_KEY, table.to_json() + "\n", "application/json")
    store.write_frame(CONCENTRATION_KEY, concentration_report(table))
    logger.info("Fixed parameters for p=1..%d from %d instances", config.p_max, len(instances))
    return {"instances": len(instances), "p_max": config.p_max, "store": str(store)}


# Report aggregation

REQUIRED_METRICS = (
    "instance",
    "n_nodes",
    "mode",
    "m",
    "mixer",
    "init",
    "evolution",
    "p",
    "params_source",
    "e_qrao",
    "alpha_r",
    "alpha_c",
    "qubits_qrao",
    "qubits_standard",
    "settings_hash",
)

ENTROPY_KEYS = ["instance", "p", "evolution", "settings_hash"]
ENTROPY_LABELS = ["mode", "n_nodes", "alpha_r", "alpha_c"]
PEAK_COLUMNS = [
    "instance",
    "mode",
    "evolution",
    "p",
    "n_nodes",
    "max_entropy",
    "alpha_r",
    "alpha_c",
]


def aggregate(frame: pd.DataFrame, by: Sequence[str], values: Sequence[str]) -> pd.DataFrame:
    """Mean and standard error of ``values`` per group, plus the group size."""
    columns = list(by) + [f"{v}_{stat}" for v in values for stat in ("mean", "sem")] + ["n"]
    if frame.empty:
        return pd.DataFrame(columns=columns)
    grouped = frame.groupby(list(by), sort=True, dropna=False)
    result = grouped[list(values)].agg(["mean", "sem"])
    result.columns = [f"{value}_{stat}" for value, stat in result.columns]
    result["n"] = grouped.size().to_numpy()
    result = result.reset_index()
    sem_columns = [c for c in columns if c.endswith("_sem")]
    result[sem_columns] = result[sem_columns].fillna(0.0)
    return result[columns]


def _single_m(frame: pd.DataFrame, figure: str) -> pd.DataFrame:
    values = frame.loc[frame["mode"] == AnsatzMode.QRAO.value, "m"].dropna().unique()
    if len(values) > 1:
        raise ValueError(f"{figure}: mixed m values {sorted(values)} in one aggregation")
    return frame


def _performance_ratios(frame: pd.DataFrame, m: int) -> pd.DataFrame:
    keys = ["instance", "mode", "mixer", "init", "m", "evolution", "p"]
    subset = frame[(frame["mode"] == AnsatzMode.QRAO.value) & (frame["m"] == m)]
    fixed = subset[subset["params_source"] != "optimize"]
    optimized = subset[subset["params_source"] == "optimize"]
    merged = fixed.merge(optimized, on=keys, suffixes=("_fixed", "_opt"))
    for ratio, score in (("ratio_r", "alpha_r"), ("ratio_c", "alpha_c")):
        pairs = list(zip(merged[f"{score}_fixed"], merged[f"{score}_opt"]))
        undefined = sum(1 for _, b in pairs if b == 0)
        if undefined:
            logger.warning("m=%d: %d %s ratio(s) undefined, left out", m, undefined, score)
        merged[ratio] = [np.nan if b == 0 else performance_ratio(a, b) for a, b in pairs]
    return aggregate(merged, ["p"], ["ratio_r", "ratio_c"])


def _entropy_tables(metrics: pd.DataFrame, entropy: pd.DataFrame) -> Dict[str, pd.DataFrame]:
    """
    Entropy figures: the mean peak entropy per depth, the mean trajectory
    layer by layer, and every cell's peak entropy next to its alpha_r and
    alpha_c.
    """
    if entropy.empty or metrics.empty:
        cells = pd.DataFrame(columns=ENTROPY_COLUMNS + ENTROPY_LABELS)
        peaks = pd.DataFrame(columns=PEAK_COLUMNS)
    else:
        labels = metrics[ENTROPY_KEYS + ENTROPY_LABELS].drop_duplicates(ENTROPY_KEYS)
        cells = entropy.merge(labels, on=ENTROPY_KEYS)
        maxima = cells.groupby(ENTROPY_KEYS, sort=True)["entropy"].max()
        peaks = maxima.rename("max_entropy").reset_index().merge(labels, on=ENTROPY_KEYS)
    peaks = peaks[PEAK_COLUMNS].sort_values(["mode", "evolution", "p", "instance"])
    return {
        "fig7_entropy": aggregate(
            peaks.rename(columns={"max_entropy": "entropy"}),
            ["mode", "evolution", "p"],
            ["entropy"],
        ),
        "fig7_entropy_layers": aggregate(cells, ["mode", "evolution", "p", "layer"], ["entropy"]),
        "fig7_entropy_vs_alpha": peaks.reset_index(drop=True),
    }


def build_report(metrics: pd.DataFrame, entropy: pd.DataFrame) -> Dict[str, pd.DataFrame]:
    """
    Per-figure aggregation tables keyed by output name.

    Raises:
        ValueError: If a required column is missing or m values are mixed
    """
    missing = [c for c in REQUIRED_METRICS if c not in metrics.columns]
    missing += [c for c in ENTROPY_COLUMNS if c not in entropy.columns]
    if missing:
        raise ValueError(f"Metric tables are missing columns: {missing}")

    # Hashes that happen to be all digits would otherwise load as numbers.
    metrics = metrics.astype({"settings_hash": str})
    entropy = entropy.astype({"settings_hash": str})
    qrao = metrics[metrics["mode"] == AnsatzMode.QRAO.value]
    tables = {
        "fig2_mixers": aggregate(
            _single_m(qrao, "mixers"), ["mixer", "init", "p"], ["alpha_r", "alpha_c"]
        ),
        "fig4a_performance_ratio": _performance_ratios(metrics, 3),
        "fig4b_depth": aggregate(
            _single_m(metrics, "depth"), ["mode", "evolution", "p"], ["alpha_r", "alpha_c"]
        ),
        "fig4c_size": aggregate(
            _single_m(metrics, "size"),
            ["mode", "evolution", "p", "n_nodes"],
            ["alpha_r", "alpha_c"],
        ),
        "fig5_trotter": aggregate(
            _single_m(qrao, "trotter"), ["evolution", "p"], ["e_qrao", "alpha_r", "alpha_c"]
        ),
        "fig6a_standard_vs_qrao": aggregate(
            _single_m(metrics, "standard vs qrao"), ["mode", "p"], ["alpha_c"]
        ),
        "fig6c_qubits": aggregate(
            _single_m(metrics, "qubits"), ["n_nodes"], ["qubits_qrao", "qubits_standard"]
        ),
        "figA8_m2_ratio": _performance_ratios(metrics, 2),
    }
    tables.update(_entropy_tables(_single_m(metrics, "entropy"), entropy))
    return dict(sorted(tables.items()))


def _metric_tables(source: Store) -> List[str]:
    """Every ``metrics.csv`` in a store, including those of nested run stores."""
    return [
        name
        for name in source.names()
        if name == METRICS_KEY or name.endswith(f"/{METRICS_KEY}")
    ]


def cmd_report(config: ExperimentConfig) -> Dict[str, Any]:
    """
    Aggregate the metric tables of one or more run stores into report/*.csv.

    Each input is searched for ``metrics.csv`` files, so a directory holding
    several run stores can be passed as a single input. The ``entropy.csv``
    next to each metrics table is optional.

    Raises:
        FileNotFoundError: If an input holds no metrics table
    """
    inputs = config.report_inputs or [config.output]
    metrics_frames = []
    entropy_frames = []
    hashes = set()
    sources = []
    for uri in inputs:
        source = Store(uri)
        found = _metric_tables(source)
        if not found:
            raise FileNotFoundError(f"No {METRICS_KEY} in {source}")
        for name in found:
            frame = source.read_frame(name)
            metrics_frames.append(frame)
            sources.append(f"{source}/{name}")
            entropy_name = name[: -len(METRICS_KEY)] + ENTROPY_KEY
            if source.exists(entropy_name):
                entropy_frames.append(source.read_frame(entropy_name))
            if "config_hash" in frame.columns:
                hashes.update(str(h) for h in frame["config_hash"].dropna().unique())
    logger.debug("Reading %d metrics tables: %s", len(sources), sources)
    metrics = pd.concat(metrics_frames, ignore_index=True)
    if entropy_frames:
        entropy = pd.concat(entropy_frames, ignore_index=True)
    else:
        entropy = pd.DataFrame(columns=ENTROPY_COLUMNS)
    tables = build_report(metrics, entropy)

    store = Store(config.output)
    files = {}
    for name, table in tables.items():
        files[name] = store.write_frame(f"report/{name}.csv", table)
    store.write_json(
        REPORT_MANIFEST_KEY,
        {
            "config_hash": config_hash(config),
            "inputs": list(inputs),
            "metrics_tables": sources,
            "input_config_hashes": sorted(hashes),
            "rows": int(len(metrics)),
            "files": sorted(files.values()),
        },
    )
    logger.info("Wrote %d report tables from %d rows", len(tables), len(metrics))
    return {"tables": sorted(tables), "rows": int(len(metrics)), "store": str(store)}


COMMANDS: Dict[str, Callable[[ExperimentConfig], Dict[str, Any]]] = {
    "gen": cmd_gen,
    "encode": cmd_encode,
    "oracle": cmd_oracle,
    "run": cmd_run,
    "fixed-params": cmd_fixed_params,
    "report": cmd_report,
}
