"""Linear probes, Simple Bound baselines and the evaluation protocol.

Probe models follow the scikit-learn estimator API (``fit``/``predict``,
``get_params``) so they compose with the wider ecosystem.  Evaluation
averages a lower-is-better metric (MAE for regression, error rate for
classification) over snippet-level 70/30 splits and reports the matching
Simple Bound baselines computed on identical splits.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin
from sklearn.linear_model import RidgeCV, SGDClassifier
from sklearn.utils.validation import check_X_y, check_array

from .corpus import snippet_seed
from .embed import EmbeddingBundle, FeatureRow, assemble_features
from .taskgen import (
    REGRESSION_TASKS, PER_SUBTOKEN, PAIR_CONCAT, ProbingExample,
)

MAE = "MAE"
ERROR_RATE = "error_rate"


@dataclass(frozen=True)
class ProbeConfig:
    alphas_classification: tuple[float, ...] = (1e-4, 1e-3, 1e-2, 1e-1)
    tolerance: float = 1e-4
    alphas_regression: tuple[float, ...] = (0.1, 1.0, 10.0)
    splits: int = 3
    train_fraction: float = 0.7
    seed: int = 0
    max_epochs: int = 300

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")
        if self.splits < 1:
            raise ValueError("splits must be >= 1")


# --- probe models -------------------------------------------------------

class GridRidge(BaseEstimator, RegressorMixin):
    """Ridge regression with closed-form leave-one-out GCV alpha selection.

    Thin estimator around :class:`RidgeCV` with the conventional default
    alpha grid; exposes ``coef_``, ``intercept_`` and ``alpha_``.
    """

    def __init__(self, alphas: tuple[float, ...] = (0.1, 1.0, 10.0)):
        self.alphas = alphas

    def fit(self, X, y):
        X, y = check_X_y(X, y, ensure_min_samples=2)
        if not np.isfinite(X).all() or not np.isfinite(y).all():
            raise ValueError("non-finite inputs")
        self._model = RidgeCV(alphas=self.alphas, fit_intercept=True).fit(X, y)
        self.coef_ = self._model.coef_
        self.intercept_ = self._model.intercept_
        self.alpha_ = float(self._model.alpha_)
        return self

    def predict(self, X):
        return self._model.predict(check_array(X))

    def normal_equation_residual(self, X, y) -> float:
        """Relative residual of (X'X + aI) w = X'(y - b*1) for the fit."""
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        w = self.coef_.astype(np.float64)
        lhs = X.T @ (X @ w) + self.alpha_ * w
        rhs = X.T @ (y - self.intercept_)
        denom = np.linalg.norm(rhs)
        return float(np.linalg.norm(lhs - rhs) / (denom if denom > 0 else 1.0))


class GridSGDLogistic(BaseEstimator, ClassifierMixin):
    """Logistic regression trained with SGD, one-vs-rest for multiclass.

    The L2 strength is chosen by grid search on an inner 80/20 validation
    split of the training data; the model is then refit on the full
    training set with the selected alpha.  SGD stops when the training
    loss stalls for 5 epochs (tolerance ``tol``) or at ``max_epochs``.
    """

    def __init__(self, alphas: tuple[float, ...] = (1e-4, 1e-3, 1e-2, 1e-1),
                 tol: float = 1e-4, max_epochs: int = 300,
                 random_state: int = 0):
        self.alphas = alphas
        self.tol = tol
        self.max_epochs = max_epochs
        self.random_state = random_state

    def _sgd(self, alpha: float) -> SGDClassifier:
        # iterate averaging plus loss-based stopping: solutions stay close
        # to the regularized optimum instead of wandering with the noise
        return SGDClassifier(
            loss="log_loss", penalty="l2", alpha=alpha,
            max_iter=self.max_epochs, tol=self.tol, n_iter_no_change=5,
            average=True, learning_rate="optimal",
            random_state=self.random_state)

    def _fit_one(self, alpha: float, X, y) -> SGDClassifier:
        return self._sgd(alpha).fit(X, y)

    def fit(self, X, y):
        X = check_array(X)
        y = np.asarray(y)
        classes = np.unique(y)
        if classes.size < 2:
            raise ValueError("training data has a single class")
        rng = np.random.default_rng(self.random_state)
        perm = rng.permutation(len(y))
        cut = max(1, int(round(0.8 * len(y))))
        tr, va = perm[:cut], perm[cut:]
        best_alpha = self.alphas[0]
        if len(va) > 0 and np.unique(y[tr]).size >= 2:
            best_err = np.inf
            for alpha in self.alphas:
                clf = self._fit_one(alpha, X[tr], y[tr])
                err = float(np.mean(clf.predict(X[va]) != y[va]))
                if err < best_err - 1e-12:
                    best_err, best_alpha = err, alpha
        self.alpha_ = float(best_alpha)
        self._model = self._fit_one(best_alpha, X, y)
        self.classes_ = self._model.classes_
        return self

    def predict(self, X):
        return self._model.predict(check_array(X))


# --- Simple Bound baselines --------------------------------------------

def median_constant(labels) -> float:
    return float(np.median(np.asarray(labels, dtype=np.float64)))


def mode_constant(labels):
    """Most common label; ties broken lexicographically on str(label)."""
    counts = Counter(labels)
    return min(counts, key=lambda c: (-counts[c], str(c)))


def simple_bound(train: list[tuple[str | None, int | str]],
                 test: list[tuple[str | None, int | str]],
                 mode: str, regression: bool) -> float:
    """Constant (global) or per-key constant baseline metric on test data.

    ``train``/``test`` are (key, label) pairs.  per_key predictors fall
    back to the global predictor for unseen keys.
    """
    if mode not in ("global", "per_key"):
        raise ValueError(f"unknown Simple Bound mode {mode!r}")
    train_labels = [lab for _, lab in train]
    if regression:
        glob = median_constant(train_labels)
    else:
        glob = mode_constant(train_labels)
    per_key: dict[str, int | str | float] = {}
    if mode == "per_key":
        groups: dict[str, list] = defaultdict(list)
        for key, lab in train:
            groups[key].append(lab)
        for key, labs in groups.items():
            per_key[key] = median_constant(labs) if regression else mode_constant(labs)

    def predict(key):
        return per_key.get(key, glob) if mode == "per_key" else glob

    if regression:
        errs = [abs(float(lab) - predict(key)) for key, lab in test]
        return float(np.mean(errs)) if errs else float("nan")
    errs = [int(predict(key) != lab) for key, lab in test]
    return float(np.mean(errs)) if errs else float("nan")


# --- evaluation protocol ------------------------------------------------

@dataclass
class ProbeResult:
    task: str
    bundle_id: str
    layer: int
    metric_name: str
    metric_value: float
    per_split_values: list[float]
    chosen_alpha: list[float]
    simple_bound_value: float  # the task's canonical bound (per-key if keyed)
    simple_bound_global: float
    simple_bound_per_key: float | None
    n_rows: int = 0
    n_dropped_examples: int = 0
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "task": self.task, "bundle_id": self.bundle_id,
            "layer": self.layer, "metric_name": self.metric_name,
            "metric_value": self.metric_value,
            "per_split_values": self.per_split_values,
            "chosen_alpha": self.chosen_alpha,
            "simple_bound_value": self.simple_bound_value,
            "simple_bound_global": self.simple_bound_global,
            "simple_bound_per_key": self.simple_bound_per_key,
            "n_rows": self.n_rows,
            "n_dropped_examples": self.n_dropped_examples,
            "warnings": self.warnings,
        }


def task_is_keyed(task: str, feature_mode: str) -> bool:
    """Token-level tasks get the stronger per-subtoken(-pair) bound."""
    return feature_mode in (PER_SUBTOKEN, PAIR_CONCAT)


def split_snippets(snippet_ids: list[str], train_fraction: float,
                   seed: int) -> tuple[set[str], set[str]]:
    """Deterministic snippet-level train/test partition."""
    ids = sorted(set(snippet_ids))
    rng = np.random.default_rng(seed)
    rng.shuffle(ids)
    cut = int(round(train_fraction * len(ids)))
    cut = min(max(cut, 1), len(ids) - 1) if len(ids) > 1 else 1
    return set(ids[:cut]), set(ids[cut:])


def collect_rows(examples: list[ProbingExample], bundle: EmbeddingBundle,
                 layer: int,
                 variant_texts: dict[tuple[str, str], str] | None = None,
                 ) -> tuple[list[FeatureRow], int]:
    """Assemble feature rows for all examples; returns (rows, dropped)."""
    rows: list[FeatureRow] = []
    dropped = 0
    for ex in examples:
        text = None
        if variant_texts is not None:
            text = variant_texts.get((ex.snippet_id, ex.variant_id))
        got = assemble_features(ex, bundle, layer, variant_text=text)
        if got:
            rows.extend(got)
        else:
            dropped += 1
    return rows, dropped


def _fit_and_score(rows: list[FeatureRow], task: str, regression: bool,
                   config: ProbeConfig, split_index: int,
                   keyed: bool) -> tuple[float, float, float | None, float]:
    """One split: returns (metric, sb_global, sb_per_key, chosen_alpha)."""
    seed = snippet_seed(config.seed, task, f"split{split_index}") % (2 ** 32)
    train_ids, test_ids = split_snippets(
        [r.snippet_id for r in rows], config.train_fraction, seed)
    train = [r for r in rows if r.snippet_id in train_ids]
    test = [r for r in rows if r.snippet_id in test_ids]
    if not train or not test:
        raise ValueError(f"empty train or test split for task {task}")
    Xtr = np.stack([r.vector for r in train]).astype(np.float64)
    Xte = np.stack([r.vector for r in test]).astype(np.float64)
    if regression:
        ytr = np.array([float(r.label) for r in train])
        yte = np.array([float(r.label) for r in test])
        model = GridRidge(alphas=config.alphas_regression).fit(Xtr, ytr)
        metric = float(np.mean(np.abs(model.predict(Xte) - yte)))
    else:
        ytr = np.array([str(r.label) for r in train], dtype=object)
        yte = np.array([str(r.label) for r in test], dtype=object)
        model = GridSGDLogistic(
            alphas=config.alphas_classification, tol=config.tolerance,
            max_epochs=config.max_epochs, random_state=seed).fit(Xtr, ytr)
        metric = float(np.mean(model.predict(Xte) != yte))
    tr_pairs = [(r.key, r.label) for r in train]
    te_pairs = [(r.key, r.label) for r in test]
    sb_global = simple_bound(tr_pairs, te_pairs, "global", regression)
    sb_per_key = (simple_bound(tr_pairs, te_pairs, "per_key", regression)
                  if keyed else None)
    return metric, sb_global, sb_per_key, model.alpha_


def run_probe(examples: list[ProbingExample], bundle: EmbeddingBundle,
              layer: int, config: ProbeConfig,
              variant_texts: dict[tuple[str, str], str] | None = None,
              bundle_id: str | None = None) -> ProbeResult:
    """Full protocol for one (task, bundle, layer): snippet-level 70/30
    splits, task-appropriate probe, matching Simple Bounds."""
    if not examples:
        raise ValueError("no examples")
    task = examples[0].task
    regression = task in REGRESSION_TASKS
    keyed = (variant_texts is not None
             and task_is_keyed(task, examples[0].feature_mode))
    rows, dropped = collect_rows(examples, bundle, layer, variant_texts)
    if not rows:
        raise ValueError(f"all examples dropped for task {task} layer {layer}")
    metrics, sb_globals, sb_per_keys, alphas = [], [], [], []
    for s in range(config.splits):
        m, g, p, a = _fit_and_score(rows, task, regression, config, s, keyed)
        metrics.append(m)
        sb_globals.append(g)
        if p is not None:
            sb_per_keys.append(p)
        alphas.append(a)
    sb_global = float(np.mean(sb_globals))
    sb_per_key = float(np.mean(sb_per_keys)) if sb_per_keys else None
    warnings = []
    if dropped > len(examples) * 0.5:
        warnings.append(
            f"alignment drop rate {dropped}/{len(examples)} exceeds 50%")
    return ProbeResult(
        task=task,
        bundle_id=bundle_id if bundle_id is not None else bundle.model_name,
        layer=layer,
        metric_name=MAE if regression else ERROR_RATE,
        metric_value=float(np.mean(metrics)),
        per_split_values=[float(m) for m in metrics],
        chosen_alpha=[float(a) for a in alphas],
        simple_bound_value=sb_per_key if sb_per_key is not None else sb_global,
        simple_bound_global=sb_global,
        simple_bound_per_key=sb_per_key,
        n_rows=len(rows),
        n_dropped_examples=dropped,
        warnings=warnings,
    )
