"""Binary classification experiment on a trained circuit.

Data points are uniform on [-1, 1]^2 and labeled by a rule (default: a
centered circle).  The circuit's outcome probability is thresholded to
predict the class; quality is the balanced success rate

    P = (TPR + TNR) / 2,    TPR = TP/(TP+FN),  TNR = TN/(TN+FP).

:func:`run_nall_sweep` trains one circuit per (shot count, seed) cell,
holding the dataset and the starting parameters fixed across shot counts
for a given seed, so the columns of the resulting table differ only in
measurement noise during training.  Test-time classification always uses
exact probabilities.
"""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import circuit, shots, smo
from .circuit import CircuitSpec, DataPoint
from .smo import TraceEntry

# substream namespaces; training data and test data are keyed by the
# per-run seed alone so the datasets survive a master-seed change
_DATA_TAG = 201
_TEST_TAG = 202
_INIT_TAG = 101
_ORACLE_TAG = 301

DEFAULT_SHOT_COUNTS: tuple[int | None, ...] = (None, 200, 50, 10, 5, 2, 1)


@dataclass(frozen=True)
class CircleRule:
    """Label 1 inside a circle, 0 outside (boundary counts as inside)."""

    center: tuple[float, float] = (0.0, 0.0)
    radius: float = 0.6

    def __call__(self, features) -> int:
        dx = features[0] - self.center[0]
        dy = features[1] - self.center[1]
        return 1 if dx * dx + dy * dy <= self.radius * self.radius else 0


@dataclass(frozen=True)
class Dataset:
    points: tuple[DataPoint, ...]
    seed: tuple[int, ...]

    def features(self) -> np.ndarray:
        return np.array([p.features for p in self.points], dtype=float)

    def labels(self) -> np.ndarray:
        return np.array([p.label for p in self.points], dtype=int)

    def __len__(self):
        return len(self.points)


def generate_dataset(rule: Callable, count: int, seed) -> Dataset:
    """Uniform points on [-1, 1]^2 labeled by ``rule``, keyed by ``seed``."""
    if count < 1:
        raise ValueError("count must be positive")
    key = (seed,) if isinstance(seed, int) else tuple(seed)
    rng = shots.substream(*key)
    feats = rng.uniform(-1.0, 1.0, size=(count, 2))
    points = tuple(DataPoint((a, b), int(rule((a, b)))) for a, b in feats)
    return Dataset(points, key)


def classify_point(spec: CircuitSpec, params, x, threshold: float = 0.4) -> int:
    """Predicted class: 1 iff the exact outcome probability >= threshold."""
    return int(circuit.evaluate(spec, params, x) >= threshold)


def classify_batch(spec: CircuitSpec, params, x_matrix, threshold: float = 0.4) -> np.ndarray:
    return (circuit.evaluate_batch(spec, params, x_matrix) >= threshold).astype(int)


@dataclass(frozen=True)
class Metrics:
    """Confusion counts and rates; ``p`` is the balanced success rate."""

    tp: int
    fp: int
    tn: int
    fn: int
    tpr: float
    tnr: float
    p: float


def compute_metrics(predictions, labels) -> Metrics:
    """Confusion counts, class rates and P = (TPR + TNR)/2.

    A rate with an empty denominator (no positive or no negative labels)
    is reported as nan and P falls back to the defined rate alone, with
    a warning.
    """
    pred = np.asarray(predictions, dtype=int)
    lab = np.asarray(labels, dtype=int)
    if pred.shape != lab.shape or pred.ndim != 1:
        raise ValueError("predictions and labels must be equal-length 1-D sequences")
    if pred.size == 0:
        raise ValueError("cannot score an empty prediction set")
    for name, arr in (("predictions", pred), ("labels", lab)):
        if not np.isin(arr, (0, 1)).all():
            raise ValueError(f"{name} must be binary (0/1)")

    tp = int(((pred == 1) & (lab == 1)).sum())
    fp = int(((pred == 1) & (lab == 0)).sum())
    tn = int(((pred == 0) & (lab == 0)).sum())
    fn = int(((pred == 0) & (lab == 1)).sum())
    tpr = tp / (tp + fn) if tp + fn else float("nan")
    tnr = tn / (tn + fp) if tn + fp else float("nan")
    if np.isnan(tpr) or np.isnan(tnr):
        defined = tnr if np.isnan(tpr) else tpr
        which = "positive" if np.isnan(tpr) else "negative"
        warnings.warn(
            f"no {which} labels present: that rate is undefined, "
            f"P falls back to the defined rate {defined:.6f}",
            stacklevel=2,
        )
        p = defined
    else:
        p = 0.5 * tpr + 0.5 * tnr
    return Metrics(tp, fp, tn, fn, tpr, tnr, float(p))


def calibrate_threshold(spec: CircuitSpec, params, dataset: Dataset, grid: int = 101) -> float:
    """Threshold among ``grid`` values in [0, 1] maximizing P on the data.

    Ties resolve toward the smallest threshold.  Undefined rates count
    as the defined rate alone, mirroring :func:`compute_metrics`.
    """
    probs = circuit.evaluate_batch(spec, params, dataset.features())
    labels = dataset.labels()
    pos = labels == 1
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    best_t, best_p = 0.0, -1.0
    for t in np.linspace(0.0, 1.0, grid):
        pred = probs >= t
        rates = []
        if n_pos:
            rates.append((pred & pos).sum() / n_pos)
        if n_neg:
            rates.append((~pred & ~pos).sum() / n_neg)
        p = float(np.mean(rates))
        if p > best_p:
            best_t, best_p = float(t), p
    return best_t


@dataclass
class SweepConfig:
    """Inputs of the shot-count sweep; defaults mirror the stock experiment."""

    spec: CircuitSpec | None = None
    rule: Callable = field(default_factory=CircleRule)
    train_size: int = 300
    test_size: int = 1000
    shot_counts: tuple[int | None, ...] = DEFAULT_SHOT_COUNTS
    seeds: tuple[int, ...] = tuple(range(10))
    rounds: int = 10
    threshold: float = 0.4
    calibrate: bool = False
    master_seed: int = 0
    scale_interval: tuple[float, float] = (-2.0 * np.pi, 2.0 * np.pi)
    grid_points: int = 2048
    tol: float = 1e-10

    def __post_init__(self):
        if not self.shot_counts:
            raise ValueError("shot_counts must not be empty")
        if not self.seeds:
            raise ValueError("seeds must not be empty")
        for n in self.shot_counts:
            if n is not None and (not isinstance(n, int) or n < 1):
                raise ValueError(f"shot counts must be positive integers or None, got {n!r}")


@dataclass
class SweepCell:
    """One trained run: a (shot count, seed) cell of the sweep table."""

    n_all: int | None
    seed: int
    metrics: Metrics
    final_cost: float
    shots_used: int
    threshold: float
    params: np.ndarray
    trace: tuple[TraceEntry, ...]
    wall_time: float


def run_cell(config: SweepConfig, spec: CircuitSpec, n_all: int | None, seed: int) -> SweepCell:
    train_ds = generate_dataset(config.rule, config.train_size, (_DATA_TAG, seed))
    test_ds = generate_dataset(config.rule, config.test_size, (_TEST_TAG, seed))
    init = shots.substream(config.master_seed, _INIT_TAG, seed).uniform(
        -np.pi, np.pi, spec.param_count
    )
    if n_all is None:
        oracle = shots.exact_oracle()
    else:
        oracle = shots.binomial_oracle(n_all, (config.master_seed, _ORACLE_TAG, n_all, seed))
    tcfg = smo.TrainingConfig(
        rounds=config.rounds,
        oracle=oracle,
        scale_interval=config.scale_interval,
        grid_points=config.grid_points,
        tol=config.tol,
        seed=config.master_seed,
    )
    started = time.perf_counter()
    state = smo.train(spec, train_ds, tcfg, initial_params=init)
    wall = time.perf_counter() - started

    thr = (
        calibrate_threshold(spec, state.params, train_ds)
        if config.calibrate
        else config.threshold
    )
    preds = classify_batch(spec, state.params, test_ds.features(), thr)
    metrics = compute_metrics(preds, test_ds.labels())
    final_cost = (
        state.trace[-1].exact_cost if state.trace else smo.exact_cost(spec, state.params, train_ds)
    )
    return SweepCell(
        n_all, seed, metrics, final_cost, state.shots_used, thr,
        state.params, state.trace, wall,
    )


def run_nall_sweep(config: SweepConfig, threads: int = 1) -> list[SweepCell]:
    """Train every (shot count, seed) cell and score it on fresh test data.

    Cells are pure functions of (config, master seed), so the table is
    reproducible and independent of scheduling; ``threads`` only fans the
    independent cells out.
    """
    spec = config.spec if config.spec is not None else circuit.default_reuploading_circuit()
    tasks = [(n_all, seed) for n_all in config.shot_counts for seed in config.seeds]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            cells = list(pool.map(lambda t: run_cell(config, spec, *t), tasks))
    else:
        cells = [run_cell(config, spec, n_all, seed) for n_all, seed in tasks]
    return cells
