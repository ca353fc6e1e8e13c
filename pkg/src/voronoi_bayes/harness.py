"""Simulation runs over the case presets, scored as (-1, 0, +1) tallies.

Tally orientation: ``-1`` counts class-1 test points labelled 2, ``+1``
counts class-2 test points labelled 1, ``0`` counts correct labels.

Random streams for one seed ``s``::

    (s, 0), (s, 1)   training samples of class 1 and 2
    (s, 2), (s, 3)   test samples of class 1 and 2
    (s, 4), (s, 5)   reference uniforms of class 1 and 2

All NN variants of one seed share the same reference counts.
"""

from __future__ import annotations

import csv
import io
import math
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import baselines as bl
from . import density as vd
from .distributions import CasePreset, get_case
from .spaces import SupportWindow

RESULT_FIELDS = (
    "case", "method", "n_train", "n_uniforms", "seed",
    "minus1", "zero", "plus1", "misclass_prob", "misclass_sd", "agg",
)
PLOT_FIELDS = ("method", "x", "fhat_class1", "fhat_class2", "true_pdf_class1", "true_pdf_class2")
THREADS_ENV = "VORONOI_CLASS_THREADS"


@dataclass(frozen=True)
class ExperimentConfig:
    case: str | CasePreset
    n_train: int = 200
    n_test: int = 100
    n_uniforms: int = 1000
    methods: tuple[str, ...] | None = None
    r: float | None = None
    seeds: tuple[int, ...] = (0,)
    window1: SupportWindow | None = None
    window2: SupportWindow | None = None

    def __post_init__(self):
        preset = self.preset
        if self.n_train < 2:
            raise ValueError("n_train must be at least 2")
        if self.n_test < 1 or self.n_uniforms < 1:
            raise ValueError("n_test and n_uniforms must be positive")
        if not self.seeds:
            raise ValueError("need at least one seed")
        if self.r is not None and not 0 < self.r <= 1:
            raise ValueError(f"r must lie in (0, 1], got {self.r}")
        if self.methods is not None:
            if not self.methods:
                raise ValueError("need at least one method")
            for m in self.methods:
                bl.check_method(m)
        for w in (self.window1, self.window2):
            if w is not None and w.dim != preset.dim:
                raise ValueError(f"window dimension {w.dim} does not match case dimension {preset.dim}")

    @property
    def preset(self) -> CasePreset:
        return self.case if isinstance(self.case, CasePreset) else get_case(self.case)

    @property
    def case_name(self) -> str:
        return self.preset.name

    @property
    def method_list(self) -> tuple[str, ...]:
        return tuple(self.methods) if self.methods is not None else self.preset.methods

    @property
    def windows(self) -> tuple[SupportWindow, SupportWindow]:
        p = self.preset
        return self.window1 or p.window1, self.window2 or p.window2


@dataclass(frozen=True)
class ConfusionSummary:
    minus1: int
    zero: int
    plus1: int

    @property
    def total(self) -> int:
        return self.minus1 + self.zero + self.plus1

    @property
    def misclassification_probability(self) -> float:
        return (self.minus1 + self.plus1) / self.total

    @classmethod
    def from_labels(cls, truth, predicted) -> ConfusionSummary:
        truth, predicted = np.asarray(truth), np.asarray(predicted)
        minus1 = int(np.sum((truth == 1) & (predicted == 2)))
        plus1 = int(np.sum((truth == 2) & (predicted == 1)))
        return cls(minus1, len(truth) - minus1 - plus1, plus1)


@dataclass(frozen=True)
class Aggregate:
    method: str
    seeds: int
    minus1: float
    zero: float
    plus1: float
    misclass_mean: float
    misclass_sd: float | None


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    summaries: dict[tuple[int, str], ConfusionSummary] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)

    @property
    def methods(self) -> list[str]:
        return sorted({m for _, m in self.summaries})

    def per_method(self, method: str) -> list[ConfusionSummary]:
        return [self.summaries[key] for key in sorted(self.summaries) if key[1] == method]

    def misclassification(self, method: str) -> np.ndarray:
        return np.array([s.misclassification_probability for s in self.per_method(method)])

    def aggregate(self, method: str) -> Aggregate:
        rows = self.per_method(method)
        if not rows:
            raise KeyError(f"no results for method {method!r}")
        probs = [s.misclassification_probability for s in rows]
        return Aggregate(
            method,
            len(rows),
            statistics.fmean(s.minus1 for s in rows),
            statistics.fmean(s.zero for s in rows),
            statistics.fmean(s.plus1 for s in rows),
            statistics.fmean(probs),
            statistics.stdev(probs) if len(probs) >= 2 else None,
        )

    def aggregates(self) -> dict[str, Aggregate]:
        return {m: self.aggregate(m) for m in self.methods}


def _fit_method(method, train1, train2, config, nn_state):
    k = bl.nn_k(method)
    if k is not None:
        t1, t2, raw1, raw2, nb1, nb2 = nn_state
        w1, w2 = config.windows
        m1 = vd.model_from_counts(t1, raw1, w1, k=k, r=config.r, neighbours=nb1)
        m2 = vd.model_from_counts(t2, raw2, w2, k=k, r=config.r, neighbours=nb2)
        return bl.DensityBayes("voronoi_nn", m1, m2, bl._priors(t1.n, t2.n, None))
    if method == "LDA":
        return bl.fit_lda(train1, train2)
    if method == "QDA":
        return bl.fit_qda(train1, train2)
    kernel = {"G-Ker": "gaussian", "E-Ker": "epanechnikov"}[method]
    return bl.fit_kde_bayes(train1, train2, kernel)


def run_seed(config: ExperimentConfig, seed: int) -> tuple[dict[str, ConfusionSummary], dict[str, str]]:
    """Score every configured method on one seed's data."""
    p = config.preset
    train1 = p.class1.sample(config.n_train, (seed, 0))
    train2 = p.class2.sample(config.n_train, (seed, 1))
    test = np.vstack([p.class1.sample(config.n_test, (seed, 2)), p.class2.sample(config.n_test, (seed, 3))])
    truth = np.repeat([1, 2], config.n_test)

    nn_state = None
    ks = [bl.nn_k(m) for m in config.method_list if bl.nn_k(m) is not None]
    if ks:
        w1, w2 = config.windows
        t1, t2 = vd.TrainingSet(train1, 1), vd.TrainingSet(train2, 2)
        raw1 = vd.count_raw_weights(t1, vd.ReferenceSample.draw(w1, config.n_uniforms, (seed, 4)))
        raw2 = vd.count_raw_weights(t2, vd.ReferenceSample.draw(w2, config.n_uniforms, (seed, 5)))
        kmax = min(max(ks), config.n_train)
        nb1, nb2 = (
            vd.neighbour_table(t.points, kmax, ~vd.boundary_cells(raw, config.r or vd.default_r(t.n)))
            for t, raw in ((t1, raw1), (t2, raw2))
        )
        nn_state = (t1, t2, raw1, raw2, nb1, nb2)

    out, errors = {}, {}
    for method in config.method_list:
        try:
            model = _fit_method(method, train1, train2, config, nn_state)
        except (ValueError, np.linalg.LinAlgError) as exc:
            errors[method] = str(exc)
            continue
        out[method] = ConfusionSummary.from_labels(truth, model.classify(test))
    return out, errors


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        return max(1, int(raw))
    return min(4, os.cpu_count() or 1)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run every seed; a method that cannot be fitted is recorded in ``errors``."""
    result = ExperimentResult(config)
    seeds = sorted(set(config.seeds))
    workers = min(thread_count(), len(seeds))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            outcomes = list(pool.map(lambda s: run_seed(config, s), seeds))
    else:
        outcomes = [run_seed(config, s) for s in seeds]
    for seed, (summaries, errors) in zip(seeds, outcomes):
        for method, summary in summaries.items():
            result.summaries[(seed, method)] = summary
        for method, msg in errors.items():
            result.errors.setdefault(method, msg)
    return result


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def results_rows(result: ExperimentResult) -> list[dict]:
    """Detail rows sorted by (seed, method), then one aggregate row per method."""
    cfg = result.config
    base = {"case": cfg.case_name, "n_train": cfg.n_train, "n_uniforms": cfg.n_uniforms}
    rows = []
    for (seed, method), s in sorted(result.summaries.items()):
        rows.append({
            **base, "method": method, "seed": seed, "minus1": s.minus1, "zero": s.zero, "plus1": s.plus1,
            "misclass_prob": s.misclassification_probability, "misclass_sd": None, "agg": "false",
        })
    for method, a in result.aggregates().items():
        rows.append({
            **base, "method": method, "seed": None, "minus1": a.minus1, "zero": a.zero, "plus1": a.plus1,
            "misclass_prob": a.misclass_mean, "misclass_sd": a.misclass_sd, "agg": "true",
        })
    return rows


def results_csv(result: ExperimentResult) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=RESULT_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in results_rows(result):
        writer.writerow({k: _fmt(row[k]) for k in RESULT_FIELDS})
    return buf.getvalue()


def export_results(result: ExperimentResult, path) -> None:
    if not result.summaries:
        raise ValueError("no results to export")
    with open(path, "w", newline="") as fh:
        fh.write(results_csv(result))


def read_results(path) -> list[dict]:
    """Parse an exported results file back into typed rows."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            agg = row["agg"] == "true"
            num = float if agg else int
            rows.append({
                "case": row["case"], "method": row["method"], "n_train": int(row["n_train"]),
                "n_uniforms": int(row["n_uniforms"]), "seed": None if agg else int(row["seed"]),
                "minus1": num(row["minus1"]), "zero": num(row["zero"]), "plus1": num(row["plus1"]),
                "misclass_prob": float(row["misclass_prob"]),
                "misclass_sd": float(row["misclass_sd"]) if row["misclass_sd"] else None, "agg": agg,
            })
    return rows


def plot_grid(config: ExperimentConfig, points: int = 1000) -> np.ndarray:
    """Evenly spaced grid spanning both reference windows."""
    lows, highs = zip(*(w.bounds_1d() for w in config.windows))
    return np.linspace(min(lows), max(highs), max(points, 500))


def density_plot_rows(config: ExperimentConfig, seed: int, grid_points: int = 1000, n_uniforms: int = 2500) -> list[dict]:
    """Long-format density curves, one block of rows per NN method in the config."""
    p = config.preset
    if p.dim != 1:
        raise ValueError("plot export is 1D-only")
    grid = plot_grid(config, grid_points)
    w1, w2 = config.windows
    t1 = vd.TrainingSet(p.class1.sample(config.n_train, (seed, 0)), 1)
    t2 = vd.TrainingSet(p.class2.sample(config.n_train, (seed, 1)), 2)
    raw1 = vd.count_raw_weights(t1, vd.ReferenceSample.draw(w1, n_uniforms, (seed, 4)))
    raw2 = vd.count_raw_weights(t2, vd.ReferenceSample.draw(w2, n_uniforms, (seed, 5)))
    true1, true2 = p.class1.pdf(grid), p.class2.pdf(grid)
    rows = []
    nn_methods = [m for m in config.method_list if bl.nn_k(m) is not None] or ["NN1"]
    for method in nn_methods:
        k = bl.nn_k(method)
        f1 = vd.model_from_counts(t1, raw1, w1, k=k, r=config.r)(grid)
        f2 = vd.model_from_counts(t2, raw2, w2, k=k, r=config.r)(grid)
        for i, x in enumerate(grid):
            rows.append({
                "method": method, "x": float(x), "fhat_class1": float(f1[i]), "fhat_class2": float(f2[i]),
                "true_pdf_class1": None if true1 is None else float(true1[i]),
                "true_pdf_class2": None if true2 is None else float(true2[i]),
            })
    return rows


def density_plot_csv(config: ExperimentConfig, seed: int, grid_points: int = 1000, n_uniforms: int = 2500) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=PLOT_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in density_plot_rows(config, seed, grid_points, n_uniforms):
        writer.writerow({k: _fmt(row[k]) for k in PLOT_FIELDS})
    return buf.getvalue()


def export_density_plot_data(config: ExperimentConfig, seed: int, path, grid_points: int = 1000, n_uniforms: int = 2500) -> None:
    text = density_plot_csv(config, seed, grid_points, n_uniforms)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def parse_seeds(text: str) -> tuple[int, ...]:
    """``"1..20"``, ``"1,4,9"`` or a mix such as ``"1..3,10"``."""
    seeds: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            a, b = part.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError(f"empty seed range {part!r}")
            seeds.extend(range(lo, hi + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise ValueError(f"no seeds in {text!r}")
    return tuple(seeds)


CONFIG_KEYS = ("case", "n_train", "n_test", "n_uniforms", "methods", "r", "seeds", "window1", "window2")


def parse_window(text: str) -> SupportWindow:
    """``interval:a,b``, ``annulus:ri,ro``, ``disc:R``, ``circle:R`` or ``rectangle:x0,y0,x1,y1``."""
    kind, _, args = text.partition(":")
    vals = [float(v) for v in args.split(",") if v.strip()]
    kind = kind.strip()
    try:
        if kind == "interval":
            return SupportWindow.interval(*vals)
        if kind == "annulus":
            return SupportWindow.annulus(*vals)
        if kind == "disc":
            return SupportWindow.disc(*vals)
        if kind == "circle":
            return SupportWindow.circle(*vals)
        if kind == "rectangle":
            return SupportWindow.rectangle(vals[:2], vals[2:])
    except TypeError:
        raise ValueError(f"wrong number of values in window {text!r}") from None
    raise ValueError(f"unknown window kind in {text!r}")


def parse_config_text(text: str) -> dict:
    """Read ``key = value`` lines; ``#`` starts a comment, blank lines are skipped."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        if key not in CONFIG_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}; valid keys: {', '.join(CONFIG_KEYS)}")
        values[key] = value
    return values


def config_from_mapping(values: dict, **overrides) -> ExperimentConfig:
    """Build a config from string values (as parsed from a file) plus typed overrides."""
    kwargs = {}
    conv = {"n_train": int, "n_test": int, "n_uniforms": int, "r": float, "seeds": parse_seeds,
            "window1": parse_window, "window2": parse_window,
            "methods": lambda s: tuple(m.strip() for m in s.split(",") if m.strip())}
    for key, value in values.items():
        kwargs[key] = conv.get(key, str)(value)
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    if "case" not in kwargs:
        raise ValueError("config needs a case")
    return ExperimentConfig(**kwargs)


def load_config(path, **overrides) -> ExperimentConfig:
    with open(path) as fh:
        return config_from_mapping(parse_config_text(fh.read()), **overrides)


def with_seeds(config: ExperimentConfig, seeds) -> ExperimentConfig:
    return replace(config, seeds=tuple(seeds))


def pooled_se(a, b) -> float:
    """Standard error of the difference of two seed-level means."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return math.sqrt(a.var(ddof=1) / len(a) + b.var(ddof=1) / len(b))
