"""Benchmark harness: config parsing, the evaluation grid, ranking, reports.

A run is a cross product of datasets x embedding methods x classifiers. Per
dataset: load, group-disjoint split, segment into windows, fit normalization
on train only. Per embedding method: fit on train windows with a seed derived
from (master seed, dataset, method), transform all splits, and time the train
fit+transform and the test transform with a monotonic clock. Per classifier:
fit on train embeddings with a seed derived from (master seed, dataset,
method, classifier), select hyperparameters on the validation split (or
5-fold cross-validation on train when the validation split is empty), and
report test accuracy. A numeric failure inside one cell records that cell as
errored and leaves every other cell untouched.

Ranking: per dataset, methods are ranked by descending mean accuracy (rank 1
is best). Two tie policies exist: "first", where the earlier-listed method
wins exact ties (the default used in reports), and "competition", where tied
methods share the minimal rank and the next distinct value skips by the tie
count. Ranks are averaged over datasets. Both policies depend only on the
ordering of each row, so any strictly monotone per-row transform leaves the
output unchanged.

Report files (CSV: comma delimiter, "." decimal, LF endings, 6 significant
digits): cells.csv, summary.csv, ranks.csv are byte-deterministic for a fixed
config and seed; wall-clock numbers live only in timings.csv. manifest.json
records the parsed config and the effective per-method parameters.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import classify
from .data_io import TimeSeriesDataset, load_dataset, split_by_group
from .embed_graph import graph_embed
from .embed_neural import ae_embed, ae_train
from .embed_spectral import CwtConfig, default_scales, fft_embed, wavelet_embed
from .embed_subspace import lle_fit, lle_transform, pca_fit, pca_transform
from .embed_tda import DEFAULT_GRID_SIZE, tda_embed
from .errors import ConfigError, DataError, ParseError, TsembedError
from .preprocess import Window, apply_normalizer_all, fit_normalizer, segment_dataset
from .rng import Xoshiro256StarStar, derive_seed

EMBEDDING_METHODS = ("fft", "wavelet", "pca", "lle", "graph", "tda", "ae")
DEFAULT_RATIOS = (0.7, 0.15, 0.15)
DEFAULT_EMBED_DIM = 16


def fmt(x: float) -> str:
    """Render a real with 6 significant digits."""
    return "%.6g" % x


# ---------------------------------------------------------------- config

@dataclass(frozen=True)
class DatasetCfg:
    name: str
    tau: int
    omega: int
    normalization: str
    format: str
    path: str | None = None
    train_path: str | None = None
    val_path: str | None = None
    test_path: str | None = None
    channels: int | None = None
    ratios: tuple[float, float, float] = DEFAULT_RATIOS


@dataclass(frozen=True)
class EmbeddingCfg:
    method: str
    name: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ClassifierCfg:
    kind: str
    name: str
    params: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BenchConfig:
    seed: int
    output_dir: str
    datasets: tuple[DatasetCfg, ...]
    embeddings: tuple[EmbeddingCfg, ...]
    classifiers: tuple[ClassifierCfg, ...]


def _require_keys(obj: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ConfigError(f"{where}: missing key(s) {sorted(missing)}")


def _parse_dataset(obj: dict, index: int) -> DatasetCfg:
    where = f"datasets[{index}]"
    _require_keys(
        obj,
        allowed={"name", "tau", "omega", "normalization", "format", "path",
                 "train_path", "val_path", "test_path", "channels", "ratios"},
        required={"name", "tau", "omega", "normalization", "format"},
        where=where)
    has_single = "path" in obj
    has_split = all(k in obj for k in ("train_path", "val_path", "test_path"))
    has_any_split = any(k in obj for k in ("train_path", "val_path", "test_path"))
    if has_single == has_any_split:
        raise ConfigError(f"{where}: give either 'path' or all three split paths")
    if has_any_split and not has_split:
        raise ConfigError(f"{where}: split datasets need train_path, val_path, test_path")
    if has_any_split and "ratios" in obj:
        raise ConfigError(f"{where}: ratios only apply to a single 'path'")
    if obj["normalization"] not in ("zscore", "minmax"):
        raise ConfigError(f"{where}: unknown normalization {obj['normalization']!r}")
    if obj["format"] not in ("long_csv", "wide_csv"):
        raise ConfigError(f"{where}: unknown format {obj['format']!r}")
    ratios = tuple(obj.get("ratios", DEFAULT_RATIOS))
    if len(ratios) != 3:
        raise ConfigError(f"{where}: ratios must have three entries")
    return DatasetCfg(
        name=obj["name"], tau=int(obj["tau"]), omega=int(obj["omega"]),
        normalization=obj["normalization"], format=obj["format"],
        path=obj.get("path"), train_path=obj.get("train_path"),
        val_path=obj.get("val_path"), test_path=obj.get("test_path"),
        channels=obj.get("channels"), ratios=ratios)


def _parse_embedding(obj: dict, index: int) -> EmbeddingCfg:
    where = f"embeddings[{index}]"
    _require_keys(obj, allowed={"method", "name", "params"},
                  required={"method"}, where=where)
    method = obj["method"]
    if method not in EMBEDDING_METHODS:
        raise ConfigError(f"{where}: unknown embedding method {method!r}")
    return EmbeddingCfg(method=method, name=obj.get("name", method),
                        params=dict(obj.get("params", {})))


def _parse_classifier(obj: dict, index: int) -> ClassifierCfg:
    where = f"classifiers[{index}]"
    _require_keys(obj, allowed={"kind", "name", "params", "grid"},
                  required={"kind"}, where=where)
    kind = obj["kind"]
    if kind not in classify.CLASSIFIER_KINDS:
        raise ConfigError(f"{where}: unknown classifier kind {kind!r}")
    grid = dict(obj.get("grid", {}))
    for key, values in grid.items():
        if not isinstance(values, list) or not values:
            raise ConfigError(f"{where}: grid entry {key!r} must be a nonempty list")
    return ClassifierCfg(kind=kind, name=obj.get("name", kind),
                         params=dict(obj.get("params", {})), grid=grid)


def parse_config(obj: dict) -> BenchConfig:
    _require_keys(obj, allowed={"seed", "output_dir", "datasets", "embeddings",
                                "classifiers"},
                  required={"output_dir", "datasets", "embeddings", "classifiers"},
                  where="config")
    datasets = tuple(_parse_dataset(d, i) for i, d in enumerate(obj["datasets"]))
    embeddings = tuple(_parse_embedding(e, i) for i, e in enumerate(obj["embeddings"]))
    classifiers = tuple(_parse_classifier(c, i) for i, c in enumerate(obj["classifiers"]))
    for label, names in (("dataset", [d.name for d in datasets]),
                         ("embedding", [e.name for e in embeddings]),
                         ("classifier", [c.name for c in classifiers])):
        if len(names) != len(set(names)):
            raise ConfigError(f"duplicate {label} names in config")
    if not datasets or not embeddings or not classifiers:
        raise ConfigError("config needs at least one dataset, embedding, and classifier")
    return BenchConfig(int(obj.get("seed", 0)), obj["output_dir"],
                       datasets, embeddings, classifiers)


def load_config(path: str) -> BenchConfig:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON ({e})") from None
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: config root must be a JSON object")
    return parse_config(obj)


# ---------------------------------------------------------------- embedders

class _Embedder:
    """fit(train_windows, seed) -> effective param dict; transform(windows)."""

    def __init__(self, cfg: EmbeddingCfg):
        self.cfg = cfg

    def fit(self, windows: list[Window], seed: int) -> dict:
        raise NotImplementedError

    def transform(self, windows: list[Window]) -> np.ndarray:
        raise NotImplementedError


def _check_params(params: dict, allowed: set[str], method: str) -> None:
    unknown = set(params) - allowed
    if unknown:
        raise ConfigError(f"embedding {method!r}: unknown param(s) {sorted(unknown)}")


def _flatten(windows: list[Window]) -> np.ndarray:
    return np.stack([w.values.T.reshape(-1) for w in windows])


class _StatelessEmbedder(_Embedder):
    def __init__(self, cfg: EmbeddingCfg, fn):
        super().__init__(cfg)
        self._fn = fn

    def fit(self, windows: list[Window], seed: int) -> dict:
        return {}

    def transform(self, windows: list[Window]) -> np.ndarray:
        return np.stack([self._fn(w) for w in windows])


class _FftEmbedder(_StatelessEmbedder):
    def __init__(self, cfg: EmbeddingCfg):
        _check_params(cfg.params, set(), "fft")
        super().__init__(cfg, fft_embed)


class _GraphEmbedder(_StatelessEmbedder):
    def __init__(self, cfg: EmbeddingCfg):
        _check_params(cfg.params, set(), "graph")
        super().__init__(cfg, graph_embed)


class _TdaEmbedder(_StatelessEmbedder):
    def __init__(self, cfg: EmbeddingCfg):
        _check_params(cfg.params, {"grid_size"}, "tda")
        grid_size = int(cfg.params.get("grid_size", DEFAULT_GRID_SIZE))
        super().__init__(cfg, lambda w: tda_embed(w, grid_size))
        self._grid_size = grid_size

    def fit(self, windows: list[Window], seed: int) -> dict:
        return {"grid_size": self._grid_size}


class _WaveletEmbedder(_Embedder):
    def __init__(self, cfg: EmbeddingCfg):
        super().__init__(cfg)
        _check_params(cfg.params, {"scales", "omega0"}, "wavelet")
        self._cwt_cfg: CwtConfig | None = None

    def fit(self, windows: list[Window], seed: int) -> dict:
        tau = windows[0].values.shape[0]
        params = self.cfg.params
        scales = tuple(float(a) for a in params.get("scales", default_scales(tau)))
        omega0 = float(params.get("omega0", 6.0))
        self._cwt_cfg = CwtConfig(scales, omega0)
        return {"scales": list(scales), "omega0": omega0}

    def transform(self, windows: list[Window]) -> np.ndarray:
        return np.stack([wavelet_embed(w, self._cwt_cfg) for w in windows])


class _PcaEmbedder(_Embedder):
    def __init__(self, cfg: EmbeddingCfg):
        super().__init__(cfg)
        _check_params(cfg.params, {"d"}, "pca")
        self._model = None

    def fit(self, windows: list[Window], seed: int) -> dict:
        X = _flatten(windows)
        want = int(self.cfg.params.get("d", DEFAULT_EMBED_DIM))
        d = min(want, X.shape[0] - 1, X.shape[1])
        if d < 1:
            raise ConfigError(f"pca: cannot fit any component on {X.shape[0]} windows")
        self._model = pca_fit(X, d)
        return {"d": d}

    def transform(self, windows: list[Window]) -> np.ndarray:
        return pca_transform(self._model, _flatten(windows))


class _LleEmbedder(_Embedder):
    def __init__(self, cfg: EmbeddingCfg):
        super().__init__(cfg)
        _check_params(cfg.params, {"d", "K", "reg"}, "lle")
        self._model = None

    def fit(self, windows: list[Window], seed: int) -> dict:
        X = _flatten(windows)
        want_k = int(self.cfg.params.get("K", 20))
        want_d = int(self.cfg.params.get("d", DEFAULT_EMBED_DIM))
        reg = float(self.cfg.params.get("reg", 1e-3))
        K = min(want_k, X.shape[0] - 2)
        d = min(want_d, K)
        if K < 1 or d < 1:
            raise ConfigError(f"lle: {X.shape[0]} windows leave no valid K")
        self._model = lle_fit(X, K, d, reg)
        return {"d": d, "K": K, "reg": reg}

    def transform(self, windows: list[Window]) -> np.ndarray:
        return lle_transform(self._model, _flatten(windows))


class _AeEmbedder(_Embedder):
    def __init__(self, cfg: EmbeddingCfg):
        super().__init__(cfg)
        _check_params(cfg.params, {"d", "epochs", "batch"}, "ae")
        self._model = None

    def fit(self, windows: list[Window], seed: int) -> dict:
        n_features = windows[0].values.size
        want = int(self.cfg.params.get("d", DEFAULT_EMBED_DIM))
        d = min(want, n_features - 1)
        epochs = int(self.cfg.params.get("epochs", 100))
        batch = int(self.cfg.params.get("batch", 64))
        self._model = ae_train(windows, d, epochs, batch, seed)
        return {"d": d, "epochs": epochs, "batch": batch}

    def transform(self, windows: list[Window]) -> np.ndarray:
        return ae_embed(self._model, windows)


_EMBEDDER_CLASSES = {
    "fft": _FftEmbedder,
    "wavelet": _WaveletEmbedder,
    "pca": _PcaEmbedder,
    "lle": _LleEmbedder,
    "graph": _GraphEmbedder,
    "tda": _TdaEmbedder,
    "ae": _AeEmbedder,
}


def make_embedder(cfg: EmbeddingCfg) -> _Embedder:
    return _EMBEDDER_CLASSES[cfg.method](cfg)


# ---------------------------------------------------------------- ranking

def _rank_row(row: np.ndarray, ties: str) -> np.ndarray:
    if ties == "first":
        order = np.argsort(-row, kind="stable")
        ranks = np.empty(row.shape[0])
        ranks[order] = np.arange(1, row.shape[0] + 1)
        return ranks
    if ties == "competition":
        return np.array([1 + np.sum(row > v) for v in row], dtype=float)
    raise ConfigError(f"unknown tie policy {ties!r}")


def average_rank(accuracies: np.ndarray, ties: str = "first") -> np.ndarray:
    """Mean per-method rank over dataset rows; rank 1 is the highest accuracy.

    ties="first" breaks exact ties in favor of the earlier column;
    ties="competition" gives tied values the same minimal rank and skips the
    following rank by the tie count ([0.9, 0.9, 0.5] -> [1, 1, 3]).
    """
    A = np.asarray(accuracies, dtype=float)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise DataError(f"expected a nonempty 2-D accuracy matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DataError("accuracy matrix contains NaN or Inf")
    ranks = np.stack([_rank_row(row, ties) for row in A])
    return ranks.mean(axis=0)


def read_accuracy_csv(path: str) -> tuple[list[str], list[str], np.ndarray]:
    """Read a dataset-by-method accuracy table: header ``dataset,<m1>,...``."""
    import csv as _csv
    with open(path, newline="") as fh:
        reader = _csv.reader(fh)
        header = next(reader, None)
        if not header or len(header) < 2 or header[0] != "dataset":
            raise ParseError(f"{path}: expected header 'dataset,<method>,...'")
        methods = header[1:]
        names, rows = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"{path} line {line_no}: wrong field count")
            names.append(row[0])
            try:
                rows.append([float(v) for v in row[1:]])
            except ValueError:
                raise ParseError(f"{path} line {line_no}: non-numeric accuracy") from None
    if not rows:
        raise DataError(f"{path}: no accuracy rows")
    return names, methods, np.array(rows)


# ---------------------------------------------------------------- grid

@dataclass
class CellResult:
    dataset: str
    embedding: str
    classifier: str
    accuracy: float | None
    status: str                  # "ok" or "error:<Type>"
    selected_params: dict
    fit_seconds: float


@dataclass
class EvaluationReport:
    config: BenchConfig
    cells: list[CellResult]
    summary: list[tuple[str, str, float, float]]      # dataset, emb, mean, std
    avg_ranks: list[tuple[str, float]]                # embedding, avg rank
    timings: list[tuple[str, str, str, float, float, float]]
    effective: dict


def time_cell(fit_fn, infer_fn) -> tuple[float, float]:
    """Monotonic wall-clock seconds for a fit closure and an infer closure."""
    t0 = time.perf_counter()
    fit_fn()
    t1 = time.perf_counter()
    infer_fn()
    t2 = time.perf_counter()
    return t1 - t0, t2 - t1


def _load_splits(ds: DatasetCfg, master_seed: int):
    try:
        if ds.path is not None:
            full = load_dataset(ds.path, ds.format, ds.channels)
            seed = derive_seed(master_seed, ds.name, "split")
            return split_by_group(full, ds.ratios, seed)
        parts = []
        alphabet: list[str] = []
        seen: dict[str, int] = {}
        loaded = [load_dataset(p, ds.format, ds.channels)
                  for p in (ds.train_path, ds.val_path, ds.test_path)]
        for part in loaded:
            for token in part.label_alphabet:
                if token not in seen:
                    seen[token] = len(alphabet)
                    alphabet.append(token)
        for part in loaded:
            remap = np.array([seen[t] for t in part.label_alphabet], dtype=np.int64)
            for rec in part.series:
                rec.labels = remap[rec.labels]
            parts.append(TimeSeriesDataset(part.series, part.n_channels, list(alphabet)))
        if len({p.n_channels for p in parts}) != 1:
            raise ConfigError("split files disagree on channel count")
        return tuple(parts)
    except TsembedError as e:
        raise type(e)(f"dataset {ds.name!r}: {e}") from None
    except OSError as e:
        raise ConfigError(f"dataset {ds.name!r}: {e}") from None


def _expand_grid(grid: dict) -> list[dict]:
    if not grid:
        return [{}]
    keys = sorted(grid)
    combos = [{}]
    for key in keys:
        combos = [dict(c, **{key: v}) for c in combos for v in grid[key]]
    return combos


def _cv_accuracy(kind: str, params: dict, X: np.ndarray, y: np.ndarray,
                 seed: int) -> float:
    """5-fold (or n-fold when small) cross-validation accuracy on train."""
    n = X.shape[0]
    k = min(5, n)
    indices = list(range(n))
    Xoshiro256StarStar(derive_seed(seed, "cv")).shuffle(indices)
    folds = [indices[i::k] for i in range(k)]
    accs = []
    for held in folds:
        held_mask = np.zeros(n, dtype=bool)
        held_mask[held] = True
        if held_mask.all() or not held_mask.any():
            continue
        model = classify.fit(kind, classify.LabeledMatrix(X[~held_mask], y[~held_mask]),
                             params)
        accs.append(classify.accuracy(classify.predict(model, X[held_mask]),
                                      y[held_mask]))
    if not accs:
        raise ConfigError("cross-validation impossible on this train split")
    return float(np.mean(accs))


_SEEDED_KINDS = {"forest", "mlp"}


def _run_cell(clf: ClassifierCfg, Xtr, ytr, Xval, yval, Xte, yte,
              cell_seed: int) -> CellResult:
    combos = _expand_grid(clf.grid)
    best_acc = None
    best_combo = None
    errors = []
    t0 = time.perf_counter()
    for combo in combos:
        params = {**clf.params, **combo}
        if clf.kind in _SEEDED_KINDS and "seed" not in params:
            params["seed"] = cell_seed
        try:
            if Xval is not None and Xval.shape[0] > 0:
                model = classify.fit(clf.kind, classify.LabeledMatrix(Xtr, ytr), params)
                acc = classify.accuracy(classify.predict(model, Xval), yval)
            else:
                acc = _cv_accuracy(clf.kind, params, Xtr, ytr, cell_seed)
        except TsembedError as e:
            errors.append(e)
            continue
        if best_acc is None or acc > best_acc:
            best_acc = acc
            best_combo = params
    if best_combo is None:
        err = errors[-1] if errors else ConfigError("no grid combination fit")
        return CellResult("", "", clf.name, None,
                          f"error:{type(err).__name__}", {}, 0.0)
    try:
        model = classify.fit(clf.kind, classify.LabeledMatrix(Xtr, ytr), best_combo)
        fit_seconds = time.perf_counter() - t0
        test_acc = classify.accuracy(classify.predict(model, Xte), yte)
    except TsembedError as e:
        return CellResult("", "", clf.name, None,
                          f"error:{type(e).__name__}", {}, 0.0)
    return CellResult("", "", clf.name, float(test_acc), "ok", best_combo, fit_seconds)


def run_grid(cfg: BenchConfig) -> EvaluationReport:
    cells: list[CellResult] = []
    timings = []
    effective: dict = {}

    for ds in cfg.datasets:
        train_ds, val_ds, test_ds = _load_splits(ds, cfg.seed)
        train_w = segment_dataset(train_ds, ds.tau, ds.omega)
        val_w = segment_dataset(val_ds, ds.tau, ds.omega)
        test_w = segment_dataset(test_ds, ds.tau, ds.omega)
        if not train_w:
            raise ConfigError(f"dataset {ds.name!r}: no training windows after segmentation")
        if not test_w:
            raise ConfigError(f"dataset {ds.name!r}: no test windows after segmentation")
        norm = fit_normalizer(train_w, ds.normalization)
        train_w = apply_normalizer_all(norm, train_w)
        val_w = apply_normalizer_all(norm, val_w)
        test_w = apply_normalizer_all(norm, test_w)
        ytr = np.array([w.label for w in train_w], dtype=np.int64)
        yval = np.array([w.label for w in val_w], dtype=np.int64)
        yte = np.array([w.label for w in test_w], dtype=np.int64)
        effective[ds.name] = {}

        for emb in cfg.embeddings:
            embedder = make_embedder(emb)
            emb_seed = derive_seed(cfg.seed, ds.name, emb.name)
            holder: dict = {}

            def fit_part():
                holder["params"] = embedder.fit(train_w, emb_seed)
                holder["Xtr"] = embedder.transform(train_w)

            def infer_part():
                holder["Xte"] = embedder.transform(test_w)

            try:
                train_s, infer_s = time_cell(fit_part, infer_part)
                Xval = embedder.transform(val_w) if val_w else None
            except TsembedError as e:
                status = f"error:{type(e).__name__}"
                for clf in cfg.classifiers:
                    cells.append(CellResult(ds.name, emb.name, clf.name, None,
                                            status, {}, 0.0))
                continue
            effective[ds.name][emb.name] = holder["params"]

            for clf in cfg.classifiers:
                cell_seed = derive_seed(cfg.seed, ds.name, emb.name, clf.name)
                cell = _run_cell(clf, holder["Xtr"], ytr, Xval, yval,
                                 holder["Xte"], yte, cell_seed)
                cell.dataset = ds.name
                cell.embedding = emb.name
                cell.classifier = clf.name
                cells.append(cell)
                timings.append((ds.name, emb.name, clf.name,
                                cell.fit_seconds, train_s, infer_s))

    summary = []
    means: dict[tuple[str, str], float] = {}
    for ds in cfg.datasets:
        for emb in cfg.embeddings:
            accs = [c.accuracy for c in cells
                    if c.dataset == ds.name and c.embedding == emb.name
                    and c.accuracy is not None]
            if accs:
                mean = float(np.mean(accs))
                std = float(np.std(accs))
                summary.append((ds.name, emb.name, mean, std))
                means[(ds.name, emb.name)] = mean

    # methods with a mean on every dataset enter the ranking
    rankable = [emb.name for emb in cfg.embeddings
                if all((ds.name, emb.name) in means for ds in cfg.datasets)]
    avg_ranks: list[tuple[str, float]] = []
    if rankable:
        matrix = np.array([[means[(ds.name, name)] for name in rankable]
                           for ds in cfg.datasets])
        ranks = average_rank(matrix, ties="first")
        avg_ranks = list(zip(rankable, ranks.tolist()))

    return EvaluationReport(cfg, cells, summary, avg_ranks, timings, effective)


# ---------------------------------------------------------------- reports

def emit_reports(report: EvaluationReport, output_dir: str) -> list[str]:
    """Write cells/summary/ranks/timings CSVs and manifest.json; return paths."""
    import os
    os.makedirs(output_dir, exist_ok=True)
    paths = []

    def write(name: str, lines: list[str]) -> None:
        path = os.path.join(output_dir, name)
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
        paths.append(path)

    lines = ["dataset,embedding,classifier,accuracy,status"]
    for c in report.cells:
        acc = fmt(c.accuracy) if c.accuracy is not None else ""
        lines.append(f"{c.dataset},{c.embedding},{c.classifier},{acc},{c.status}")
    write("cells.csv", lines)

    lines = ["dataset,embedding,mean_accuracy,std_accuracy"]
    for ds_name, emb_name, mean, std in report.summary:
        lines.append(f"{ds_name},{emb_name},{fmt(mean)},{fmt(std)}")
    write("summary.csv", lines)

    lines = ["embedding,avg_rank"]
    for name, rank in report.avg_ranks:
        lines.append(f"{name},{fmt(rank)}")
    write("ranks.csv", lines)

    lines = ["dataset,embedding,classifier,classifier_fit_seconds,"
             "embed_train_seconds,embed_infer_seconds"]
    for ds_name, emb_name, clf_name, clf_s, train_s, infer_s in report.timings:
        lines.append(f"{ds_name},{emb_name},{clf_name},{fmt(clf_s)},"
                     f"{fmt(train_s)},{fmt(infer_s)}")
    write("timings.csv", lines)

    manifest = {
        "seed": report.config.seed,
        "datasets": [d.name for d in report.config.datasets],
        "embeddings": [{"name": e.name, "method": e.method}
                       for e in report.config.embeddings],
        "classifiers": [{"name": c.name, "kind": c.kind}
                        for c in report.config.classifiers],
        "effective_params": report.effective,
        "selected_params": {
            f"{c.dataset}/{c.embedding}/{c.classifier}": c.selected_params
            for c in report.cells if c.status == "ok"},
    }
    path = os.path.join(output_dir, "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths.append(path)
    return paths


def dump_embeddings(cfg: BenchConfig, dataset_name: str, embedding_name: str,
                    output_dir: str | None = None) -> str:
    """Write embeddings_<method>_<dataset>.csv (id,label,v0..) for all splits."""
    import os
    ds = next((d for d in cfg.datasets if d.name == dataset_name), None)
    if ds is None:
        raise ConfigError(f"no dataset named {dataset_name!r} in config")
    emb = next((e for e in cfg.embeddings if e.name == embedding_name), None)
    if emb is None:
        raise ConfigError(f"no embedding named {embedding_name!r} in config")

    train_ds, val_ds, test_ds = _load_splits(ds, cfg.seed)
    train_w = segment_dataset(train_ds, ds.tau, ds.omega)
    other_w = (segment_dataset(val_ds, ds.tau, ds.omega)
               + segment_dataset(test_ds, ds.tau, ds.omega))
    if not train_w:
        raise ConfigError(f"dataset {ds.name!r}: no training windows after segmentation")
    norm = fit_normalizer(train_w, ds.normalization)
    train_w = apply_normalizer_all(norm, train_w)
    other_w = apply_normalizer_all(norm, other_w)

    embedder = make_embedder(emb)
    embedder.fit(train_w, derive_seed(cfg.seed, ds.name, emb.name))
    windows = train_w + other_w
    X = embedder.transform(windows)

    out_dir = output_dir or cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"embeddings_{emb.name}_{ds.name}.csv")
    with open(path, "w", newline="") as fh:
        header = ["id", "label"] + [f"v{i}" for i in range(X.shape[1])]
        fh.write(",".join(header) + "\n")
        for w, row in zip(windows, X):
            cells_txt = ",".join(fmt(v) for v in row)
            fh.write(f"{w.source_id}:{w.start},{w.label},{cells_txt}\n")
    return path
