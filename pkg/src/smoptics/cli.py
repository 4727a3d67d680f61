"""Command-line interface: train, sweep, budget, plot.

Usage::

    smoptics train  --config run.json [--out DIR] [--seed INT] [--threads INT]
    smoptics sweep  --config run.json [--out DIR] [--seed INT] [--threads INT]
                    [--plot | --no-plot]
    smoptics budget --config run.json [--seed INT]
    smoptics plot RESULTS --kind {curve,regions,trace} [--out DIR]

Exit codes: 0 success, 1 invalid configuration (bad flags, unreadable or
malformed config, missing referenced files), 2 runtime failure.
Diagnostics go to stderr.  Invalid configs are rejected before any
output file is created.

Config file schema (JSON; all keys optional, defaults shown)::

    {
      "master_seed": 0,
      "threads": 1,
      "circuit": null,                  # null = stock two-mode circuit,
                                        # or an inline circuit object,
                                        # or a path to a circuit JSON file
      "dataset": {
        "rule": {"kind": "circle", "center": [0.0, 0.0], "radius": 0.6},
        "train_size": 300,
        "test_size": 1000,
        "seeds": [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]
      },
      "train": {
        "rounds": 10,
        "shot_counts": ["exact", 200, 50, 10, 5, 2, 1],
        "scale_interval": [-6.283185307179586, 6.283185307179586],
        "grid_points": 2048,
        "tol": 1e-10
      },
      "classify": {"threshold": 0.4, "calibrate": false}
    }

Unknown keys are rejected.  The circuit object (also the on-disk format
for a circuit file) is the output of ``circuit.spec_to_dict``: modes,
photons, param_count, outcome, input amplitudes as [re, im] pairs over
the occupation basis, and an element list of ``phase_shifter`` entries
(mode plus affine expr: offset/scale/feature/constant) and
``beamsplitter`` entries (mode pair plus 2x2 matrix as [re, im] pairs).

Output files (every one embeds the master seed, the sha256 of the
canonical config, and the tool version in '#' comment lines or a "meta"
object):

* ``train``: trace.csv (columns round, param_index, theta, est_min,
  exact_cost, cum_shots) and params.json, for the first seed and first
  shot count of the config.
* ``sweep``: results.csv (columns n_all, seed, final_cost, tp, fp, tn,
  fn, tpr, tnr, p, shots; 'exact' marks the exact oracle), summary.json
  (per-shot-count mean/std of P), regions_<label>.csv (test-point
  predictions for the first seed, one file per shot count), and
  timings.csv (wall-clock seconds per cell; this sidecar is the one
  output excluded from the byte-for-byte reproducibility guarantee).
  With --plot also curve.svg and one regions_<label>.svg per regions
  file.
* ``budget``: prints a table to stdout, one row per shot count: shots
  per parameter update, total shots for the run, and the run-time ratio
  of the 200-shot single-batch reference to that run.
* ``plot``: curve.svg from a results.csv, <stem>.svg from a regions CSV
  (prediction scatter with the true boundary), or from a trace.csv (cost
  against parameter updates).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, circuit, classifier
from .classifier import CircleRule, SweepConfig


class ConfigError(Exception):
    """Invalid configuration; maps to exit code 1."""


# -- configuration -------------------------------------------------------------


_RULE_KEYS = {"kind", "center", "radius"}
_DATASET_KEYS = {"rule", "train_size", "test_size", "seeds"}
_TRAIN_KEYS = {"rounds", "shot_counts", "scale_interval", "grid_points", "tol"}
_CLASSIFY_KEYS = {"threshold", "calibrate"}
_TOP_KEYS = {"master_seed", "threads", "circuit", "dataset", "train", "classify"}


@dataclass
class RunConfig:
    """Validated run description; round-trips through JSON unchanged."""

    master_seed: int = 0
    threads: int = 1
    circuit: str | dict | None = None
    rule_kind: str = "circle"
    rule_center: tuple[float, float] = (0.0, 0.0)
    rule_radius: float = 0.6
    train_size: int = 300
    test_size: int = 1000
    seeds: tuple[int, ...] = tuple(range(10))
    rounds: int = 10
    shot_counts: tuple[int | None, ...] = classifier.DEFAULT_SHOT_COUNTS
    scale_interval: tuple[float, float] = (-2.0 * math.pi, 2.0 * math.pi)
    grid_points: int = 2048
    tol: float = 1e-10
    threshold: float = 0.4
    calibrate: bool = False

    def to_dict(self) -> dict:
        return {
            "master_seed": self.master_seed,
            "threads": self.threads,
            "circuit": self.circuit,
            "dataset": {
                "rule": {
                    "kind": self.rule_kind,
                    "center": list(self.rule_center),
                    "radius": self.rule_radius,
                },
                "train_size": self.train_size,
                "test_size": self.test_size,
                "seeds": list(self.seeds),
            },
            "train": {
                "rounds": self.rounds,
                "shot_counts": ["exact" if n is None else n for n in self.shot_counts],
                "scale_interval": list(self.scale_interval),
                "grid_points": self.grid_points,
                "tol": self.tol,
            },
            "classify": {"threshold": self.threshold, "calibrate": self.calibrate},
        }

    def canonical_json(self) -> str:
        # threads is an execution detail that never changes the results, so it
        # is excluded from the identity hash: a threaded rerun of the same
        # experiment must produce byte-identical result files.
        data = self.to_dict()
        del data["threads"]
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def build_spec(self) -> circuit.CircuitSpec:
        if self.circuit is None:
            return circuit.default_reuploading_circuit()
        data = self.circuit
        if isinstance(data, str):
            with open(data) as fh:
                data = json.load(fh)
        try:
            return circuit.spec_from_dict(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid circuit description: {exc}") from exc

    def sweep_config(self) -> SweepConfig:
        return SweepConfig(
            spec=self.build_spec(),
            rule=CircleRule(self.rule_center, self.rule_radius),
            train_size=self.train_size,
            test_size=self.test_size,
            shot_counts=self.shot_counts,
            seeds=self.seeds,
            rounds=self.rounds,
            threshold=self.threshold,
            calibrate=self.calibrate,
            master_seed=self.master_seed,
            scale_interval=self.scale_interval,
            grid_points=self.grid_points,
            tol=self.tol,
        )


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def _check_keys(section: dict, allowed: set, where: str):
    unknown = set(section) - allowed
    _require(not unknown, f"unknown {where} keys: {sorted(unknown)}")


def _as_int(value, where: str, minimum: int | None = None) -> int:
    _require(isinstance(value, int) and not isinstance(value, bool), f"{where} must be an integer")
    if minimum is not None:
        _require(value >= minimum, f"{where} must be >= {minimum}")
    return value


def _as_number(value, where: str) -> float:
    _require(
        isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value),
        f"{where} must be a finite number",
    )
    return float(value)


def config_from_dict(data: dict) -> RunConfig:
    _require(isinstance(data, dict), "config root must be an object")
    _check_keys(data, _TOP_KEYS, "config")
    cfg = RunConfig()

    if "master_seed" in data:
        cfg.master_seed = _as_int(data["master_seed"], "master_seed")
    if "threads" in data:
        cfg.threads = _as_int(data["threads"], "threads", 1)
    if "circuit" in data and data["circuit"] is not None:
        spec = data["circuit"]
        _require(isinstance(spec, (str, dict)), "circuit must be null, a path, or an object")
        if isinstance(spec, str):
            _require(Path(spec).is_file(), f"circuit file not found: {spec}")
        cfg.circuit = spec

    ds = data.get("dataset", {})
    _require(isinstance(ds, dict), "dataset must be an object")
    _check_keys(ds, _DATASET_KEYS, "dataset")
    rule = ds.get("rule", {})
    _require(isinstance(rule, dict), "dataset.rule must be an object")
    _check_keys(rule, _RULE_KEYS, "dataset.rule")
    if "kind" in rule:
        _require(rule["kind"] == "circle", f"unknown rule kind {rule['kind']!r}")
        cfg.rule_kind = rule["kind"]
    if "center" in rule:
        center = rule["center"]
        _require(isinstance(center, list) and len(center) == 2, "rule center must be [x, y]")
        cfg.rule_center = (_as_number(center[0], "center[0]"), _as_number(center[1], "center[1]"))
    if "radius" in rule:
        cfg.rule_radius = _as_number(rule["radius"], "radius")
        _require(cfg.rule_radius > 0, "radius must be positive")
    if "train_size" in ds:
        # 0 is allowed so `budget` can price an empty run; sweep/train reject
        # it later when the dataset is actually generated.
        cfg.train_size = _as_int(ds["train_size"], "train_size", 0)
    if "test_size" in ds:
        cfg.test_size = _as_int(ds["test_size"], "test_size", 1)
    if "seeds" in ds:
        seeds = ds["seeds"]
        _require(isinstance(seeds, list) and seeds, "seeds must be a non-empty list")
        cfg.seeds = tuple(_as_int(s, "seed entry") for s in seeds)
        _require(len(set(cfg.seeds)) == len(cfg.seeds), "seeds must be distinct")

    tr = data.get("train", {})
    _require(isinstance(tr, dict), "train must be an object")
    _check_keys(tr, _TRAIN_KEYS, "train")
    if "rounds" in tr:
        cfg.rounds = _as_int(tr["rounds"], "rounds", 0)
    if "shot_counts" in tr:
        raw = tr["shot_counts"]
        _require(isinstance(raw, list) and raw, "shot_counts must be a non-empty list")
        counts: list[int | None] = []
        for entry in raw:
            if entry == "exact":
                counts.append(None)
            else:
                counts.append(_as_int(entry, "shot count", 1))
        _require(len(set(counts)) == len(counts), "shot_counts must be distinct")
        cfg.shot_counts = tuple(counts)
    if "scale_interval" in tr:
        iv = tr["scale_interval"]
        _require(isinstance(iv, list) and len(iv) == 2, "scale_interval must be [lo, hi]")
        lo, hi = _as_number(iv[0], "scale_interval[0]"), _as_number(iv[1], "scale_interval[1]")
        _require(lo < hi, "scale_interval must satisfy lo < hi")
        cfg.scale_interval = (lo, hi)
    if "grid_points" in tr:
        cfg.grid_points = _as_int(tr["grid_points"], "grid_points", 3)
    if "tol" in tr:
        cfg.tol = _as_number(tr["tol"], "tol")
        _require(cfg.tol > 0, "tol must be positive")

    cl = data.get("classify", {})
    _require(isinstance(cl, dict), "classify must be an object")
    _check_keys(cl, _CLASSIFY_KEYS, "classify")
    if "threshold" in cl:
        cfg.threshold = _as_number(cl["threshold"], "threshold")
        _require(0.0 <= cfg.threshold <= 1.0, "threshold must be in [0, 1]")
    if "calibrate" in cl:
        _require(isinstance(cl["calibrate"], bool), "calibrate must be a boolean")
        cfg.calibrate = cl["calibrate"]
    return cfg


def load_config(path: str, seed_override: int | None = None, threads_override: int | None = None) -> RunConfig:
    p = Path(path)
    _require(p.is_file(), f"config file not found: {path}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    cfg = config_from_dict(data)
    if seed_override is not None:
        cfg.master_seed = seed_override
    if threads_override is not None:
        _require(threads_override >= 1, "threads must be >= 1")
        cfg.threads = threads_override
    cfg.build_spec()  # fail fast on a bad circuit reference
    return cfg


# -- deterministic text output --------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return "exact"
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _meta_lines(cfg: RunConfig) -> list[str]:
    return [
        f"# tool=smoptics {__version__}",
        f"# master_seed={cfg.master_seed}",
        f"# config_sha256={cfg.config_hash()}",
    ]


def _write_table(path: Path, meta: list[str], header: list[str], rows: list[list]) -> None:
    lines = list(meta)
    lines.append(",".join(header))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def read_table(path) -> tuple[dict, list[str], list[dict]]:
    """Parse a '#'-commented CSV back into metadata, header, row dicts."""
    meta: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[dict] = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                meta[k.strip()] = v.strip()
            continue
        cells = line.split(",")
        if header is None:
            header = cells
        else:
            rows.append(dict(zip(header, cells)))
    if header is None:
        raise ValueError(f"{path} contains no table")
    return meta, header, rows


def _json_meta(cfg: RunConfig) -> dict:
    return {
        "tool": "smoptics",
        "version": __version__,
        "master_seed": cfg.master_seed,
        "config_sha256": cfg.config_hash(),
    }


# -- subcommands -----------------------------------------------------------------


def cmd_train(config_path: str, out_dir: str = "out", seed: int | None = None,
              threads: int | None = None) -> Path:
    """Train one run (first seed, first shot count); write trace and params."""
    cfg = load_config(config_path, seed, threads)
    sweep_cfg = cfg.sweep_config()
    cell = classifier.run_cell(
        sweep_cfg, sweep_cfg.spec, cfg.shot_counts[0], cfg.seeds[0]
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_table(
        out / "trace.csv",
        _meta_lines(cfg),
        ["round", "param_index", "theta", "est_min", "exact_cost", "cum_shots"],
        [list(entry) for entry in cell.trace],
    )
    payload = {
        "meta": _json_meta(cfg),
        "n_all": "exact" if cell.n_all is None else cell.n_all,
        "seed": cell.seed,
        "params": [float(v) for v in cell.params],
        "final_cost": cell.final_cost,
        "shots_used": cell.shots_used,
        "threshold": cell.threshold,
        "test_p": cell.metrics.p,
    }
    (out / "params.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return out


def _summary_rows(cells: list) -> list[dict]:
    order: list = []
    for cell in cells:
        if cell.n_all not in order:
            order.append(cell.n_all)
    rows = []
    for n_all in order:
        ps = [c.metrics.p for c in cells if c.n_all == n_all]
        costs = [c.final_cost for c in cells if c.n_all == n_all]
        mean_p = float(np.mean(ps))
        std_p = float(np.std(ps, ddof=1)) if len(ps) > 1 else 0.0
        rows.append(
            {
                "n_all": "exact" if n_all is None else n_all,
                "runs": len(ps),
                "mean_p": mean_p,
                "std_p": std_p,
                "mean_final_cost": float(np.mean(costs)),
            }
        )
    return rows


def cmd_sweep(config_path: str, out_dir: str = "out", seed: int | None = None,
              threads: int | None = None, plot: bool = True) -> Path:
    """Full shot-count sweep; write results, summary, regions, timings."""
    cfg = load_config(config_path, seed, threads)
    sweep_cfg = cfg.sweep_config()
    cells = classifier.run_nall_sweep(sweep_cfg, threads=cfg.threads)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = _meta_lines(cfg)

    header = ["n_all", "seed", "final_cost", "tp", "fp", "tn", "fn", "tpr", "tnr", "p", "shots"]
    rows = [
        [c.n_all, c.seed, c.final_cost, c.metrics.tp, c.metrics.fp, c.metrics.tn,
         c.metrics.fn, c.metrics.tpr, c.metrics.tnr, c.metrics.p, c.shots_used]
        for c in cells
    ]
    _write_table(out / "results.csv", meta, header, rows)

    _write_table(
        out / "timings.csv",
        meta + ["# wall-clock seconds; excluded from reproducibility guarantees"],
        ["n_all", "seed", "wall_time"],
        [[c.n_all, c.seed, c.wall_time] for c in cells],
    )

    summary = {"meta": _json_meta(cfg), "rows": _summary_rows(cells)}
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")

    region_files = _write_regions(cfg, sweep_cfg, cells, out)

    if plot:
        _plot_curve(summary["rows"], out / "curve.svg", cfg)
        for path in region_files:
            _plot_regions(path, out / f"{path.stem}.svg", cfg)
    return out


def _write_regions(cfg: RunConfig, sweep_cfg: SweepConfig, cells: list, out: Path) -> list[Path]:
    """Test-set predictions of the first seed's runs, one file per shot count."""
    first_seed = cfg.seeds[0]
    spec = sweep_cfg.spec
    test_ds = classifier.generate_dataset(
        sweep_cfg.rule, cfg.test_size, (classifier._TEST_TAG, first_seed)
    )
    feats = test_ds.features()
    labels = test_ds.labels()
    paths = []
    for cell in cells:
        if cell.seed != first_seed:
            continue
        label = "exact" if cell.n_all is None else str(cell.n_all)
        probs = circuit.evaluate_batch(spec, cell.params, feats)
        preds = (probs >= cell.threshold).astype(int)
        extra = [
            f"# n_all={label}",
            f"# seed={first_seed}",
            f"# threshold={_fmt(cell.threshold)}",
            f"# p={_fmt(cell.metrics.p)}",
            f"# rule=circle center=({_fmt(cfg.rule_center[0])},{_fmt(cfg.rule_center[1])}) radius={_fmt(cfg.rule_radius)}",
        ]
        path = out / f"regions_{label}.csv"
        _write_table(
            path,
            _meta_lines(cfg) + extra,
            ["x1", "x2", "label", "pred", "prob"],
            [[feats[i, 0], feats[i, 1], int(labels[i]), int(preds[i]), probs[i]]
             for i in range(len(labels))],
        )
        paths.append(path)
    return paths


def cmd_budget(config_path: str, seed: int | None = None) -> str:
    """Shot-budget table for the config; returns and prints the text."""
    cfg = load_config(config_path, seed)
    spec = cfg.sweep_config().spec
    k = 2 * spec.photons + 1
    per_update_factor = cfg.train_size * k * 2
    updates = cfg.rounds * spec.param_count
    reference = cfg.rounds * spec.param_count * cfg.train_size * k * 200

    lines = [
        f"shot budget: rounds={cfg.rounds} params={spec.param_count} "
        f"points={cfg.train_size} probes={k} batches=2",
        f"reference: single-batch 200-shot run = {reference} shots",
        f"{'n_all':>8} {'per_update':>12} {'total':>14} {'ref/total':>10}",
    ]
    for n_all in cfg.shot_counts:
        if n_all is None:
            lines.append(f"{'exact':>8} {0:>12} {0:>14} {'-':>10}  (exact mode: no sampling)")
            continue
        per_update = per_update_factor * n_all
        total = updates * per_update
        ratio = f"{reference / total:>10.3g}" if total else f"{'-':>10}"
        lines.append(f"{n_all:>8} {per_update:>12} {total:>14} {ratio}")
    text = "\n".join(lines)
    print(text)
    return text


def cmd_plot(results_path: str, kind: str, out_dir: str | None = None) -> Path:
    """Render a results, regions, or trace CSV to SVG, by ``kind``."""
    src = Path(results_path)
    if not src.is_file():
        raise ConfigError(f"results file not found: {results_path}")
    out = Path(out_dir) if out_dir else src.parent
    out.mkdir(parents=True, exist_ok=True)
    if kind == "curve":
        try:
            meta, header, rows = read_table(src)
            groups: dict[str, list[float]] = {}
            for row in rows:
                groups.setdefault(row["n_all"], []).append(float(row["p"]))
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"malformed results file: {exc}") from exc
        _require(bool(groups), "results file has no rows")
        summary_rows = [
            {
                "n_all": name if name == "exact" else int(name),
                "mean_p": float(np.mean(vals)),
                "std_p": float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0,
            }
            for name, vals in groups.items()
        ]
        target = out / "curve.svg"
        _plot_curve(summary_rows, target, meta=meta)
        return target
    if kind == "regions":
        target = out / f"{src.stem}.svg"
        _plot_regions(src, target)
        return target
    if kind == "trace":
        target = out / f"{src.stem}.svg"
        _plot_trace(src, target)
        return target
    raise ConfigError(f"unknown plot kind {kind!r} (expected 'curve', 'regions', or 'trace')")


def _svg_metadata(cfg: RunConfig | None, meta: dict | None = None) -> dict:
    if cfg is not None:
        desc = f"tool=smoptics {__version__} master_seed={cfg.master_seed} config_sha256={cfg.config_hash()}"
    else:
        parts = [f"{k}={v}" for k, v in (meta or {}).items()]
        parts.append(f"tool=smoptics {__version__}")
        desc = " ".join(parts)
    return {"Description": desc, "Date": None}


def _plot_curve(summary_rows: list[dict], target: Path, cfg: RunConfig | None = None,
                meta: dict | None = None) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    finite = sorted((r for r in summary_rows if r["n_all"] != "exact"), key=lambda r: r["n_all"])
    ordered = finite + [r for r in summary_rows if r["n_all"] == "exact"]
    xs = np.arange(len(ordered))
    means = [r["mean_p"] for r in ordered]
    stds = [r["std_p"] for r in ordered]

    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.errorbar(xs, means, yerr=stds, fmt="o-", capsize=4)
    ax.set_xticks(xs)
    ax.set_xticklabels([str(r["n_all"]) for r in ordered])
    ax.set_xlabel("shots per probability estimate")
    ax.set_ylabel("balanced success rate P")
    ax.set_ylim(0.0, 1.05)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(target, format="svg", metadata=_svg_metadata(cfg, meta))
    plt.close(fig)


def _plot_regions(regions_csv: Path, target: Path, cfg: RunConfig | None = None) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    try:
        meta, header, rows = read_table(regions_csv)
        x1 = np.array([float(r["x1"]) for r in rows])
        x2 = np.array([float(r["x2"]) for r in rows])
        preds = np.array([int(r["pred"]) for r in rows])
        labels = np.array([int(r["label"]) for r in rows])
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"malformed regions file: {exc}") from exc

    tp = labels == 1
    rates = []
    if tp.any():
        rates.append(((preds == 1) & tp).sum() / tp.sum())
    if (~tp).any():
        rates.append(((preds == 0) & ~tp).sum() / (~tp).sum())
    p = float(np.mean(rates))

    fig, ax = plt.subplots(figsize=(4.2, 4.2))
    for value, color in ((0, "tab:blue"), (1, "tab:orange")):
        sel = preds == value
        ax.scatter(x1[sel], x2[sel], s=6, color=color, label=f"predicted {value}")
    rule = meta.get("rule", "")
    if rule.startswith("circle"):
        try:
            center = rule.split("center=(")[1].split(")")[0].split(",")
            radius = float(rule.split("radius=")[1])
            angles = np.linspace(0, 2 * np.pi, 256)
            ax.plot(float(center[0]) + radius * np.cos(angles),
                    float(center[1]) + radius * np.sin(angles), "k--", lw=1.2)
        except (IndexError, ValueError):
            pass
    ax.set_xlim(-1.05, 1.05)
    ax.set_ylim(-1.05, 1.05)
    ax.set_aspect("equal")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    title = meta.get("n_all", regions_csv.stem)
    ax.set_title(f"{title}: P = {p:.3f}")
    ax.legend(loc="upper right", fontsize=7)
    fig.tight_layout()
    fig.savefig(target, format="svg", metadata=_svg_metadata(cfg, meta))
    plt.close(fig)


def _plot_trace(trace_csv: Path, target: Path, cfg: RunConfig | None = None) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    try:
        meta, header, rows = read_table(trace_csv)
        exact = np.array([float(r["exact_cost"]) for r in rows])
        est = np.array([float(r["est_min"]) for r in rows])
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"malformed trace file: {exc}") from exc

    updates = np.arange(1, len(rows) + 1)
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(updates, exact, "-", lw=1.5, label="exact cost")
    ax.plot(updates, est, ".", ms=4, alpha=0.7, label="estimated minimum")
    ax.set_xlabel("parameter update")
    ax.set_ylabel("training cost")
    ax.grid(alpha=0.3)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(target, format="svg", metadata=_svg_metadata(cfg, meta))
    plt.close(fig)


# -- argument parsing -------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # bad flags are a configuration problem: exit 1, not argparse's 2
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="smoptics", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_plot=False):
        p.add_argument("--config", required=True, help="path to a JSON run config")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override master seed")
        p.add_argument("--threads", type=int, default=None, help="override worker threads")
        if with_plot:
            p.add_argument("--plot", action=argparse.BooleanOptionalAction, default=True,
                           help="write SVG plots")

    common(sub.add_parser("train", help="train one run, write trace and params"))
    common(sub.add_parser("sweep", help="run the shot-count sweep"), with_plot=True)
    budget = sub.add_parser("budget", help="print the shot budget table")
    budget.add_argument("--config", required=True)
    budget.add_argument("--seed", type=int, default=None)
    plot = sub.add_parser("plot", help="render plots from result files")
    plot.add_argument("results", help="a results.csv, regions CSV, or trace CSV")
    plot.add_argument("--kind", required=True, choices=["curve", "regions", "trace"])
    plot.add_argument("--out", default=None, help="output directory (default: alongside input)")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "train":
            cmd_train(args.config, args.out, args.seed, args.threads)
        elif args.command == "sweep":
            cmd_sweep(args.config, args.out, args.seed, args.threads, plot=args.plot)
        elif args.command == "budget":
            cmd_budget(args.config, args.seed)
        elif args.command == "plot":
            cmd_plot(args.results, args.kind, args.out)
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
