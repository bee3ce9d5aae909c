"""Experiment orchestration: warm start, test-then-train, paired arms, suites.

A single run (one arm) follows the usual stream-learning loop:

1. take the first ``pretrain_size`` samples, fix the encoder limits on them
   and warm-start the learner (encoded when the arm uses GRFs);
2. for every later sample: encode, predict, record, feed the error bit to
   ADWIN, reset learner and detector on drift, then train.

Only step 2 is timed and evaluated.
"""

from __future__ import annotations

import dataclasses
import itertools
import json
import logging
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import SyntheticSpec, gen_concept, gen_sea, load_stream, CONCEPT_FAMILIES
from .drift import Adwin
from .encoding import LIMIT_STRATEGIES, ONLINE_UPDATE, GrfConfig, GrfEncoder
from .evaluation import EvalLedger, RunReport, Stopwatch, mcnemar_rejection_percentage
from .learners import canonical_name, make_learner

log = logging.getLogger(__name__)

DATASETS = CONCEPT_FAMILIES + ("sea", "file")


class RunError(RuntimeError):
    """A run failed; the message carries the sample index."""


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one (paired) experiment.

    Dataset fields that do not apply to the chosen ``dataset`` are ignored.
    """

    name: str = ""
    # dataset
    dataset: str = "circle"
    concept: int = 1
    base_size: int = 1000
    replications: int = 50
    redraw: bool = False
    dataset_params: dict = field(default_factory=dict)
    sea_function: int = 1
    n_samples: int = 50_000
    noise: float = 0.0
    path: str | None = None
    label_column: int | str = -1
    feature_columns: list | None = None
    nominal_columns: list = field(default_factory=list)
    delimiter: str = ","
    header: bool = True
    limit: int | None = None
    # learner
    learner: str = "ht"
    learner_params: dict = field(default_factory=dict)
    # encoding
    use_grf: bool = True
    n_grfs: int = 3
    gamma: float = 2.0
    limit_strategy: str = "warm-start-fixed"
    # protocol
    pretrain_size: int = 12_500
    mcnemar_window: int = 500
    repetitions: int = 25
    seed: int = 1
    adwin_delta: float = 0.002
    adwin_f: int = 32
    drift_detection: bool = True
    trajectory_every: int = 0

    def __post_init__(self):
        self.dataset = self.dataset.lower()
        if self.dataset not in DATASETS:
            raise ValueError(f"unknown dataset {self.dataset!r}; expected one of {DATASETS}")
        if self.dataset == "file" and not self.path:
            raise ValueError("dataset 'file' needs a path")
        self.learner = canonical_name(self.learner)
        if self.limit_strategy not in LIMIT_STRATEGIES:
            raise ValueError(f"limit_strategy must be one of {LIMIT_STRATEGIES}")
        GrfConfig(self.n_grfs, self.gamma)
        if self.pretrain_size < 1:
            raise ValueError("pretrain_size must be >= 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.mcnemar_window < 1:
            raise ValueError("mcnemar_window must be >= 1")
        if not self.name:
            self.name = f"{self.dataset_name}/{self.learner}"

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "ExperimentConfig":
        data = self.to_dict()
        if "learner" in changes or "dataset" in changes or "concept" in changes:
            data["name"] = ""
        data.update(changes)
        return ExperimentConfig.from_dict(data)

    @property
    def dataset_name(self) -> str:
        if self.dataset in CONCEPT_FAMILIES:
            return f"{self.dataset}_concept{self.concept}"
        if self.dataset == "sea":
            return f"sea_f{self.sea_function}"
        return Path(self.path).stem

    @property
    def grf_config(self) -> GrfConfig:
        return GrfConfig(self.n_grfs, self.gamma)

    def make_source(self, seed: int | None = None):
        seed = self.seed if seed is None else seed
        if self.dataset in CONCEPT_FAMILIES:
            spec = SyntheticSpec(self.dataset, self.concept, self.base_size, self.replications,
                                 seed, dict(self.dataset_params), self.redraw)
            return gen_concept(spec)
        if self.dataset == "sea":
            return gen_sea(self.sea_function, self.n_samples, seed, self.noise,
                           self.dataset_params.get("thresholds"))
        return load_stream(self.path, self.label_column, self.feature_columns,
                           self.nominal_columns, self.delimiter, self.header, self.limit)


class _MinMax:
    """Rescale into [0, 1] with fixed limits, clipping values outside them."""

    def __init__(self, X):
        lo = X.min(axis=0)
        span = X.max(axis=0) - lo
        self.lo = lo.tolist()
        self.inv = [1.0 / s if s > 0 else 0.0 for s in span.tolist()]

    def __call__(self, x):
        return [min(max((v - lo) * inv, 0.0), 1.0) for v, lo, inv in zip(x, self.lo, self.inv)]


def run_arm(X, y, config: ExperimentConfig, grf: bool, seed: int | None = None):
    """One test-then-train run over materialised arrays.

    Returns the report and the per-sample correctness of the evaluated part.
    """
    n = y.shape[0]
    p = config.pretrain_size
    if n <= p:
        raise RunError(f"stream has {n} samples, needs more than pretrain_size={p}")
    learner = make_learner(config.learner, **config.learner_params)
    online = False
    if grf:
        encoder = GrfEncoder(config.grf_config, config.limit_strategy)
        online = config.limit_strategy == ONLINE_UPDATE
        if not online:
            encoder.fit(X[:p])
        transform = encoder.encode_list
    elif config.learner == "mnb":
        # multinomial NB cannot take negative inputs
        transform = _MinMax(X[:p])
    else:
        transform = None

    rows = X.tolist()
    labels = y.tolist()
    for i in range(p):
        x = rows[i]
        if online:
            encoder.update_limits(x)
        learner.train_one(transform(x) if transform else x, labels[i])

    detector = Adwin(config.adwin_delta, config.adwin_f)
    ledger = EvalLedger()
    correct = np.zeros(n - p, dtype=bool)
    trajectory = []
    drifts = 0
    every = config.trajectory_every
    clock = Stopwatch()
    i = p
    try:
        with clock.running():
            for i in range(p, n):
                x = rows[i]
                label = int(labels[i])
                if online:
                    encoder.update_limits(x)
                if transform is not None:
                    x = transform(x)
                pred = learner.predict_one(x)
                ok = pred == label
                ledger.record(pred, label)
                correct[i - p] = ok
                if config.drift_detection and detector.add_element(0.0 if ok else 1.0):
                    learner.reset()
                    detector.reset()
                    drifts += 1
                learner.train_one(x, label)
                if every and (i - p + 1) % every == 0:
                    trajectory.append((i - p + 1, ledger.kappa()))
    except Exception as exc:
        raise RunError(f"{config.name} ({'grf' if grf else 'baseline'}) failed at sample {i}: {exc}") from exc

    report = RunReport(
        learner=config.learner,
        grf=grf,
        kappa=ledger.kappa(),
        accuracy=ledger.accuracy,
        n_evaluated=ledger.n,
        n_drifts=drifts,
        n_learner_resets=drifts,
        n_detector_resets=drifts,
        processing_time_s=clock.elapsed,
        seed=config.seed if seed is None else seed,
        kappa_trajectory=trajectory,
    )
    return report, correct


def run_single(config: ExperimentConfig, seed: int | None = None) -> RunReport:
    """One arm (GRF on or off per ``config.use_grf``) on a freshly generated stream."""
    seed = config.seed if seed is None else seed
    X, y = config.make_source(seed).materialize()
    report, _ = run_arm(X, y, config, config.use_grf, seed)
    return report


@dataclass
class RepetitionRecord:
    repetition: int
    seed: int
    baseline: RunReport
    grf: RunReport
    mcnemar_pct: float


def _mean_std(values):
    values = list(values)
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, std


@dataclass
class PairedResult:
    config: ExperimentConfig
    records: list

    @property
    def kappa_baseline(self):
        return _mean_std(r.baseline.kappa for r in self.records)

    @property
    def kappa_grf(self):
        return _mean_std(r.grf.kappa for r in self.records)

    @property
    def mcnemar_pct(self) -> float:
        return statistics.fmean(r.mcnemar_pct for r in self.records)

    @property
    def time_baseline(self):
        return _mean_std(r.baseline.processing_time_s for r in self.records)

    @property
    def time_grf(self):
        return _mean_std(r.grf.processing_time_s for r in self.records)

    @property
    def significant(self) -> bool:
        return self.mcnemar_pct > 50.0

    def summary_row(self) -> dict:
        kb, kbs = self.kappa_baseline
        kg, kgs = self.kappa_grf
        tb, tbs = self.time_baseline
        tg, tgs = self.time_grf
        return {
            "experiment": self.config.name,
            "dataset": self.config.dataset_name,
            "learner": self.config.learner,
            "repetitions": len(self.records),
            "kappa_base_mean": kb,
            "kappa_base_std": kbs,
            "kappa_grf_mean": kg,
            "kappa_grf_std": kgs,
            "mcnemar_pct": self.mcnemar_pct,
            "significant": self.significant,
            "time_base_mean": tb,
            "time_base_std": tbs,
            "time_grf_mean": tg,
            "time_grf_std": tgs,
        }

    def run_records(self, with_timing: bool = True):
        for rec in self.records:
            for arm, report in (("baseline", rec.baseline), ("grf", rec.grf)):
                row = {"experiment": self.config.name, "repetition": rec.repetition, "arm": arm}
                row.update(report.record(with_timing))
                row.pop("kappa_trajectory")
                row["mcnemar_pct"] = rec.mcnemar_pct
                yield row


def _run_repetition(config: ExperimentConfig, rep: int, grf_arms=(False, True)) -> RepetitionRecord:
    seed = config.seed + rep
    # both arms consume the same materialised sequence
    X, y = config.make_source(seed).materialize()
    first, first_ok = run_arm(X, y, config, grf_arms[0], seed)
    second, second_ok = run_arm(X, y, config, grf_arms[1], seed)
    pct = mcnemar_rejection_percentage(first_ok, second_ok, config.mcnemar_window)
    return RepetitionRecord(rep, seed, first, second, pct)


def run_paired(config: ExperimentConfig, n_jobs: int = 1, grf_arms=(False, True)) -> PairedResult:
    """Baseline and GRF arms over ``config.repetitions`` seeds.

    Repetition ``r`` uses seed ``config.seed + r``. ``grf_arms`` selects the
    encoding of the two arms, e.g. ``(False, False)`` pairs the baseline with
    itself.
    """
    reps = range(config.repetitions)
    if n_jobs > 1 and config.repetitions > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            records = list(pool.map(_run_repetition, itertools.repeat(config), reps,
                                    itertools.repeat(grf_arms)))
    else:
        records = [_run_repetition(config, r, grf_arms) for r in reps]
    return PairedResult(config, records)


# ---------------------------------------------------------------- suites

def expand_suite(suite: dict) -> list[ExperimentConfig]:
    """Turn a suite document into concrete experiment configs.

    Layout::

        {"defaults": {...config keys...},
         "experiments": [
            {...config keys...,
             "grid": {"learner": [...], "concept": [1, 2]},
             "per_learner": {"knn": {"learner_params": {...}}}}]}

    ``grid`` entries expand as a cartesian product; ``per_learner`` overrides
    are applied to the expanded configs whose learner matches.
    """
    unknown = set(suite) - {"defaults", "experiments", "description"}
    if unknown:
        raise ValueError(f"unknown suite keys: {sorted(unknown)}")
    defaults = dict(suite.get("defaults", {}))
    defaults_per_learner = defaults.pop("per_learner", {})
    configs = []
    for entry in suite.get("experiments", []):
        entry = dict(entry)
        grid = entry.pop("grid", {})
        per_learner = {canonical_name(k): v for k, v in defaults_per_learner.items()}
        per_learner.update({canonical_name(k): v for k, v in entry.pop("per_learner", {}).items()})
        keys = sorted(grid)
        for values in itertools.product(*(grid[k] for k in keys)):
            data = {**defaults, **entry, **dict(zip(keys, values))}
            kind = canonical_name(data.get("learner", "ht"))
            for k, v in per_learner.get(kind, {}).items():
                if isinstance(v, dict) and isinstance(data.get(k), dict):
                    data[k] = {**data[k], **v}
                else:
                    data[k] = v
            prefix = data.get("name", "") if keys else ""
            if keys:
                data["name"] = ""  # let every expanded config name itself
            config = ExperimentConfig.from_dict(data)
            if prefix:
                config.name = f"{prefix}:{config.name}"
            configs.append(config)
    return configs


def load_suite(path) -> list[ExperimentConfig]:
    with open(path) as fh:
        return expand_suite(json.load(fh))


@dataclass
class SuiteResult:
    results: list
    failures: list  # (experiment name, error message)

    @property
    def ok(self) -> bool:
        return not self.failures

    def rows(self):
        return [r.summary_row() for r in self.results]

    def learner_rows(self):
        """Per-learner means over all experiments (one row per learner)."""
        groups: dict = {}
        for r in self.results:
            groups.setdefault(r.config.learner, []).append(r.summary_row())
        out = []
        for learner, rows in groups.items():
            pct = statistics.fmean(x["mcnemar_pct"] for x in rows)
            out.append({
                "learner": learner,
                "experiments": len(rows),
                "kappa_base": statistics.fmean(x["kappa_base_mean"] for x in rows),
                "kappa_grf": statistics.fmean(x["kappa_grf_mean"] for x in rows),
                "mcnemar_pct": pct,
                "significant": pct > 50.0,
                "time_base": statistics.fmean(x["time_base_mean"] for x in rows),
                "time_grf": statistics.fmean(x["time_grf_mean"] for x in rows),
            })
        return out


def _safe_paired(config):
    try:
        return run_paired(config), None
    except Exception as exc:  # reported, not fatal for the suite
        return None, f"{type(exc).__name__}: {exc}"


def run_suite(configs, n_jobs: int = 1) -> SuiteResult:
    """Run every config as a paired experiment; failures are collected, not raised."""
    if n_jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            outcomes = list(pool.map(_safe_paired, configs))
    else:
        outcomes = [_safe_paired(c) for c in configs]
    results, failures = [], []
    for config, (result, error) in zip(configs, outcomes):
        if error is None:
            results.append(result)
        else:
            log.error("experiment %s failed: %s", config.name, error)
            failures.append((config.name, error))
    return SuiteResult(results, failures)


def format_value(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def write_table(rows, path_or_stream, delimiter="\t", columns=None):
    if not rows and columns is None:
        columns = []
    columns = columns or list(rows[0])
    lines = [delimiter.join(columns)]
    lines += [delimiter.join(format_value(r[c]) for c in columns) for r in rows]
    text = "\n".join(lines) + "\n"
    if isinstance(path_or_stream, (str, os.PathLike)):
        Path(path_or_stream).write_text(text)
    else:
        path_or_stream.write(text)
    return text


SUMMARY_COLUMNS = [
    "experiment", "dataset", "learner", "repetitions", "kappa_base_mean", "kappa_base_std",
    "kappa_grf_mean", "kappa_grf_std", "mcnemar_pct", "significant", "time_base_mean",
    "time_base_std", "time_grf_mean", "time_grf_std",
]
LEARNER_COLUMNS = [
    "learner", "experiments", "kappa_base", "kappa_grf", "mcnemar_pct", "significant",
    "time_base", "time_grf",
]


def _untimed(columns):
    return [c for c in columns if not c.startswith("time_")]


def write_suite_outputs(result: SuiteResult, out_dir, with_timing: bool = True):
    """Write summary.tsv, learners.tsv, runs.jsonl and failures.tsv into ``out_dir``.

    Without timing every wall-clock column is left out, so the files depend
    only on the suite definition.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = SUMMARY_COLUMNS if with_timing else _untimed(SUMMARY_COLUMNS)
    learners = LEARNER_COLUMNS if with_timing else _untimed(LEARNER_COLUMNS)
    write_table(result.rows(), out / "summary.tsv", columns=summary)
    write_table(result.learner_rows(), out / "learners.tsv", columns=learners)
    with open(out / "runs.jsonl", "w") as fh:
        for r in result.results:
            for row in r.run_records(with_timing):
                fh.write(json.dumps(row, sort_keys=True) + "\n")
    write_table([{"experiment": n, "error": e} for n, e in result.failures],
                out / "failures.tsv", columns=["experiment", "error"])
    return out
