"""Class decoding from connectivity features.

Pipeline: rank-based screening of individual features across classes,
then a multinomial elastic-net fit by cyclic coordinate descent on a
per-class quadratic majorization of the log-likelihood, with the penalty
mixing an L1 term (sparsity) and a squared L2 term (grouping):

    P_alpha(beta) = (1 - alpha) / 2 * ||beta||_2^2 + alpha * ||beta||_1

Features are standardized internally; reported coefficients are on the
original feature scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2, rankdata

from .errors import DataError, SchemaError, ShapeError, StratificationError

CONVERGENCE_TOL = 1e-7
MAX_COORD_UPDATES = 100_000
WEIGHT_FLOOR = 1e-5
PROB_FLOOR = 1e-15


@dataclass(frozen=True)
class FeatureTable:
    """Observations x features matrix with class labels and feature ids."""

    values: np.ndarray
    labels: np.ndarray
    feature_ids: tuple[str, ...]

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        labels = np.asarray(self.labels)
        if vals.ndim != 2:
            raise ShapeError(f"values must be 2-D, got {vals.shape}")
        if len(labels) != vals.shape[0]:
            raise ShapeError(
                f"{len(labels)} labels for {vals.shape[0]} observations"
            )
        if not np.isfinite(vals).all():
            raise DataError("feature table contains non-finite entries")
        ids = tuple(str(f) for f in self.feature_ids)
        if len(ids) != vals.shape[1]:
            raise ShapeError(f"{len(ids)} feature ids for {vals.shape[1]} columns")
        if len(set(ids)) != len(ids):
            raise ShapeError("feature ids must be unique")
        if len(np.unique(labels)) < 2:
            raise DataError("need at least 2 classes")
        vals.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_ids", ids)

    @property
    def classes(self) -> np.ndarray:
        return np.unique(self.labels)

    @property
    def n_observations(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]


def kruskal_wallis(groups) -> tuple[float, float]:
    """Rank-based k-group location test with tie correction.

    Returns (H, p) where p comes from the chi-squared approximation with
    k - 1 degrees of freedom. Identical values across all groups give the
    well-defined degenerate output (0.0, 1.0).
    """
    groups = [np.asarray(g, dtype=np.float64) for g in groups]
    if len(groups) < 2:
        raise ValueError("need at least 2 groups")
    if any(len(g) == 0 for g in groups):
        raise ValueError("groups must be non-empty")
    pooled = np.concatenate(groups)
    n = len(pooled)
    ranks = rankdata(pooled)
    h = 0.0
    pos = 0
    for g in groups:
        r = ranks[pos : pos + len(g)]
        h += len(g) * (r.mean() - (n + 1) / 2.0) ** 2
        pos += len(g)
    h *= 12.0 / (n * (n + 1))
    _, counts = np.unique(pooled, return_counts=True)
    tie = 1.0 - (counts**3 - counts).sum() / (n**3 - n)
    if tie == 0.0:
        return 0.0, 1.0
    h /= tie
    return float(h), float(chi2.sf(h, len(groups) - 1))


def select_features(table: FeatureTable, alpha_level: float) -> np.ndarray:
    """Indices of features whose across-class Kruskal-Wallis p is below alpha.

    No multiplicity correction is applied.
    """
    if not 0.0 < alpha_level <= 1.0:
        raise ValueError(f"alpha_level must be in (0, 1], got {alpha_level}")
    classes = table.classes
    masks = [table.labels == c for c in classes]
    keep = []
    for j in range(table.n_features):
        col = table.values[:, j]
        _, p = kruskal_wallis([col[m] for m in masks])
        if p < alpha_level:
            keep.append(j)
    return np.asarray(keep, dtype=np.int64)


@dataclass(frozen=True)
class ElasticNetModel:
    """Per-class coefficients on the original feature scale."""

    classes: np.ndarray
    intercepts: np.ndarray
    coefficients: np.ndarray
    alpha: float
    lam: float
    feature_ids: tuple[str, ...]
    converged: bool = True

    def decision_scores(self, values: np.ndarray) -> np.ndarray:
        return self.intercepts + values @ self.coefficients.T

    def predict_proba(self, values: np.ndarray) -> np.ndarray:
        return _softmax(self.decision_scores(values))

    def predict(self, values: np.ndarray) -> np.ndarray:
        # argmax takes the first maximum, i.e. the lowest class index on ties
        return self.classes[np.argmax(self.decision_scores(values), axis=1)]


def _softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


COVARIANCE_UPDATE_MAX_FEATURES = 2000


def elasticnet_quadratic(
    x: np.ndarray,
    z: np.ndarray,
    w: np.ndarray,
    alpha: float,
    lam: float,
    beta0: float = 0.0,
    beta: np.ndarray | None = None,
    tol: float = CONVERGENCE_TOL,
    max_sweeps: int = 1000,
):
    """Coordinate descent on a penalized weighted least-squares problem.

        (1 / 2N) sum_i w_i (z_i - beta0 - x_i beta)^2 + lam P_alpha(beta)

    The intercept is unpenalized. Returns (beta0, beta, objectives,
    n_updates) where objectives holds the objective value after every
    sweep; it is non-increasing.

    Up to a few thousand features the solver caches the weighted Gram
    matrix so an unchanged coordinate costs O(1) per visit; wider problems
    fall back to residual updates.
    """
    n, p = x.shape
    beta = np.zeros(p) if beta is None else beta.copy()
    if p <= COVARIANCE_UPDATE_MAX_FEATURES:
        return _enet_quadratic_covariance(
            x, z, w, alpha, lam, beta0, beta, tol, max_sweeps
        )
    return _enet_quadratic_residual(x, z, w, alpha, lam, beta0, beta, tol, max_sweeps)


def _enet_quadratic_covariance(x, z, w, alpha, lam, beta0, beta, tol, max_sweeps):
    n, p = x.shape
    s0 = float(w.sum())
    sz = float(w @ z)
    szz = float(w @ (z * z))
    c = (x.T @ (w * z)) / n
    m = (x.T @ w) / n
    gram = (x.T * w) @ x / n
    g_diag = np.diagonal(gram).copy()
    q = gram @ beta
    lam_alpha = lam * alpha
    denom = g_diag + lam * (1 - alpha)
    c_l, m_l, gd_l, dn_l = c.tolist(), m.tolist(), g_diag.tolist(), denom.tolist()
    gram_rows = gram.tolist()  # symmetric, so row j doubles as column j
    objectives = []
    n_updates = 0

    def objective() -> float:
        fit = 0.5 * (
            szz / n
            - 2.0 * beta0 * sz / n
            - 2.0 * float(beta @ c)
            + beta0 * beta0 * s0 / n
            + 2.0 * beta0 * float(beta @ m)
            + float(beta @ q)
        )
        pen = lam * (
            (1 - alpha) / 2.0 * float(beta @ beta) + alpha * float(np.abs(beta).sum())
        )
        return fit + pen

    beta_l = beta.tolist()
    q_l = q.tolist()
    for _ in range(max_sweeps):
        delta = 0.0
        new0 = (sz - n * sum(b * mm for b, mm in zip(beta_l, m_l))) / s0
        delta = max(delta, abs(new0 - beta0))
        beta0 = new0
        n_updates += 1
        for j in range(p):
            gj = gd_l[j]
            if gj == 0.0:
                continue
            old = beta_l[j]
            rho = c_l[j] - beta0 * m_l[j] - q_l[j] + old * gj
            if rho > lam_alpha:
                new = (rho - lam_alpha) / dn_l[j]
            elif rho < -lam_alpha:
                new = (rho + lam_alpha) / dn_l[j]
            else:
                new = 0.0
            if new != old:
                step = new - old
                col = gram_rows[j]
                for i in range(p):
                    q_l[i] += col[i] * step
                beta_l[j] = new
                diff = abs(step)
                if diff > delta:
                    delta = diff
            n_updates += 1
        beta = np.asarray(beta_l)
        q = np.asarray(q_l)
        objectives.append(objective())
        if delta < tol:
            break
    return beta0, np.asarray(beta_l), objectives, n_updates


def _enet_quadratic_residual(x, z, w, alpha, lam, beta0, beta, tol, max_sweeps):
    n, p = x.shape
    resid = z - beta0 - x @ beta
    w_sum = w.sum()
    wx2 = (w[:, None] * x * x).sum(axis=0) / n
    objectives = []
    n_updates = 0

    def objective() -> float:
        fit = 0.5 * np.sum(w * resid**2) / n
        pen = lam * ((1 - alpha) / 2.0 * np.sum(beta**2) + alpha * np.sum(np.abs(beta)))
        return float(fit + pen)

    for _ in range(max_sweeps):
        delta = 0.0
        new0 = beta0 + np.sum(w * resid) / w_sum
        resid += beta0 - new0
        delta = max(delta, abs(new0 - beta0))
        beta0 = new0
        n_updates += 1
        for j in range(p):
            if wx2[j] == 0.0:
                continue
            old = beta[j]
            rho = np.sum(w * x[:, j] * resid) / n + old * wx2[j]
            shrunk = np.sign(rho) * max(abs(rho) - lam * alpha, 0.0)
            new = shrunk / (wx2[j] + lam * (1 - alpha))
            if new != old:
                resid += x[:, j] * (old - new)
                beta[j] = new
                delta = max(delta, abs(new - old))
            n_updates += 1
        objectives.append(objective())
        if delta < tol:
            break
    return beta0, beta, objectives, n_updates


def default_lambda_path(
    table: FeatureTable, alpha: float, n_lambda: int = 100, ratio: float = 1e-3
) -> np.ndarray:
    """Log-spaced path from the all-zero-coefficient lambda down by ``ratio``."""
    xs, _, _ = _standardize(table.values)
    classes = table.classes
    y = (table.labels[:, None] == classes[None, :]).astype(np.float64)
    pbar = y.mean(axis=0)
    n = table.n_observations
    grad = np.abs(xs.T @ (y - pbar)) / n
    lam_max = grad.max() / max(alpha, 1e-3)
    if lam_max <= 0:
        lam_max = 1.0
    return np.geomspace(lam_max, ratio * lam_max, n_lambda)


def _standardize(values: np.ndarray):
    mu = values.mean(axis=0)
    sd = values.std(axis=0)
    sd_safe = np.where(sd == 0, 1.0, sd)
    return (values - mu) / sd_safe, mu, sd_safe


def fit_elasticnet_multinomial(
    table: FeatureTable,
    alpha: float,
    lambda_path=None,
    tol: float = CONVERGENCE_TOL,
    max_updates: int = MAX_COORD_UPDATES,
    max_outer: int = 30,
) -> list[ElasticNetModel]:
    """Multinomial elastic-net fits along a descending lambda path.

    Each lambda is solved by cycling over classes: the log-likelihood is
    majorized by a weighted least-squares problem in the current class
    block (weights p(1-p), working response from the gradient step) which
    coordinate descent solves to tolerance. Warm starts carry coefficients
    down the path.

    ``converged`` on a model means the outer cycles stabilized (max
    coefficient change below 100x the inner tolerance) within the cycle
    and update budgets; running out of either budget flags the model
    instead of raising. Near-separable data at the small-lambda end drifts
    logarithmically and is reported as non-converged even though the
    class predictions are long since stable.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if lambda_path is None:
        lambda_path = default_lambda_path(table, alpha)
    lambda_path = np.asarray(lambda_path, dtype=np.float64)
    if (lambda_path <= 0).any() or (np.diff(lambda_path) >= 0).any():
        raise ValueError("lambda path must be positive and strictly decreasing")

    xs, mu, sd = _standardize(table.values)
    classes = table.classes
    k = len(classes)
    y = (table.labels[:, None] == classes[None, :]).astype(np.float64)
    n, p = xs.shape

    b0 = np.log(np.clip(y.mean(axis=0), PROB_FLOOR, None))
    b0 = b0 - b0.mean()
    coef = np.zeros((k, p))

    models = []
    for lam in lambda_path:
        updates = 0
        converged = False
        for _ in range(max_outer):
            scores = b0 + xs @ coef.T
            probs = _softmax(scores)
            max_change = 0.0
            for kk in range(k):
                pk = np.clip(probs[:, kk], WEIGHT_FLOOR, 1 - WEIGHT_FLOOR)
                w = pk * (1 - pk)
                z = scores[:, kk] + (y[:, kk] - pk) / w
                old0, old = b0[kk], coef[kk].copy()
                nb0, nb, _, used = elasticnet_quadratic(
                    xs, z, w, alpha, lam, beta0=old0, beta=old, tol=tol
                )
                updates += used
                b0[kk], coef[kk] = nb0, nb
                scores[:, kk] = nb0 + xs @ nb
                change = max(
                    abs(nb0 - old0), float(np.max(np.abs(nb - old))) if p else 0.0
                )
                max_change = max(max_change, change)
            # the quadratic majorization is refreshed each cycle, so a
            # looser outer tolerance than the inner sweeps suffices
            if max_change < tol * 100:
                converged = True
                break
            if updates >= max_updates:
                break
        coef_orig = coef / sd
        b0_orig = b0 - coef_orig @ mu
        models.append(
            ElasticNetModel(
                classes=classes,
                intercepts=b0_orig.copy(),
                coefficients=coef_orig.copy(),
                alpha=alpha,
                lam=float(lam),
                feature_ids=table.feature_ids,
                converged=converged,
            )
        )
    return models


def stratified_folds(labels: np.ndarray, folds: int, seed: int) -> np.ndarray:
    """Fold assignment per observation; every fold contains every class."""
    if folds < 2:
        raise ValueError(f"folds must be >= 2, got {folds}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    assignment = np.empty(len(labels), dtype=np.int64)
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        if len(idx) < folds:
            raise StratificationError(
                f"class {c!r} has {len(idx)} observations; cannot fill {folds} folds"
            )
        perm = rng.permutation(idx)
        assignment[perm] = np.arange(len(perm)) % folds
    return assignment


def multinomial_deviance(model: ElasticNetModel, values, labels) -> float:
    """-2 x mean log-probability of the true class."""
    probs = model.predict_proba(np.asarray(values, dtype=np.float64))
    class_pos = {c: i for i, c in enumerate(model.classes)}
    idx = np.array([class_pos[l] for l in labels])
    true_p = np.clip(probs[np.arange(len(idx)), idx], PROB_FLOOR, None)
    return float(-2.0 * np.mean(np.log(true_p)))


def cross_validate(
    table: FeatureTable,
    alpha: float,
    folds: int = 10,
    seed: int = 0,
    lambda_path=None,
) -> tuple[float, np.ndarray]:
    """Pick lambda by stratified k-fold mean multinomial deviance.

    Returns (lambda_star, cv_curve); the curve holds one mean deviance per
    path entry, and ties resolve to the largest (most regularized) lambda.
    """
    if lambda_path is None:
        lambda_path = default_lambda_path(table, alpha)
    lambda_path = np.asarray(lambda_path, dtype=np.float64)
    assignment = stratified_folds(table.labels, folds, seed)
    deviances = np.zeros((folds, len(lambda_path)))
    for f in range(folds):
        train = assignment != f
        val = ~train
        sub = FeatureTable(
            values=table.values[train],
            labels=table.labels[train],
            feature_ids=table.feature_ids,
        )
        models = fit_elasticnet_multinomial(sub, alpha, lambda_path)
        for li, model in enumerate(models):
            deviances[f, li] = multinomial_deviance(
                model, table.values[val], table.labels[val]
            )
    cv_curve = deviances.mean(axis=0)
    lam_star = float(lambda_path[int(np.argmin(cv_curve))])
    return lam_star, cv_curve


@dataclass(frozen=True)
class ConfusionResult:
    """Row = actual class, column = predicted class."""

    classes: np.ndarray
    matrix: np.ndarray
    overall_accuracy: float
    per_class_accuracy: np.ndarray


def predict_confusion(model: ElasticNetModel, test: FeatureTable) -> ConfusionResult:
    """Confusion matrix and accuracies of a fitted model on a test table."""
    if tuple(test.feature_ids) != tuple(model.feature_ids):
        raise SchemaError("test feature ids do not match the model")
    class_pos = {c: i for i, c in enumerate(model.classes)}
    unknown = [l for l in np.unique(test.labels) if l not in class_pos]
    if unknown:
        raise SchemaError(f"test labels not seen in training: {unknown}")
    predictions = model.predict(test.values)
    k = len(model.classes)
    matrix = np.zeros((k, k), dtype=np.int64)
    for actual, pred in zip(test.labels, predictions):
        matrix[class_pos[actual], class_pos[pred]] += 1
    total = matrix.sum()
    row_sums = matrix.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        per_class = np.where(
            row_sums > 0, np.diagonal(matrix) / row_sums, np.nan
        )
    return ConfusionResult(
        classes=model.classes,
        matrix=matrix,
        overall_accuracy=float(np.trace(matrix) / total),
        per_class_accuracy=per_class,
    )
