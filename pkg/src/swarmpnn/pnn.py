"""Probabilistic neural network core: Cauchy product kernels, per-class
density estimation, Bayes-argmax classification and the density-adaptive
per-pattern scale adjustment.

All functions are pure; models and datasets are immutable values that can be
shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_OVER_PI = 2.0 / np.pi

# Bandwidths this small are treated as the zero-width limit; candidate
# vectors produced by the optimizers may sit exactly on the lower bound 0.
BANDWIDTH_FLOOR = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


class Dataset:
    """Labeled numeric feature matrix.

    Parameters
    ----------
    features : array-like, shape (P, N)
        Finite real feature values.
    labels : array-like of int, shape (P,)
        Class indices in ``0..n_classes-1``.
    n_classes : int, optional
        Number of classes; defaults to ``max(labels) + 1``.
    feature_names, class_names : sequence of str, optional
    """

    def __init__(self, features, labels, n_classes=None, feature_names=None,
                 class_names=None):
        features = np.asarray(features, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.int64)
        if features.ndim != 2 or features.shape[1] == 0:
            raise ValueError("features must be a 2-D matrix with >= 1 column")
        if labels.shape != (features.shape[0],):
            raise ValueError("labels length must match feature rows")
        if features.shape[0] == 0:
            raise ValueError("dataset is empty")
        if not np.all(np.isfinite(features)):
            raise ValueError("features contain non-finite values")
        if labels.min() < 0:
            raise ValueError("negative class label")
        if n_classes is None:
            n_classes = int(labels.max()) + 1
        elif labels.max() >= n_classes:
            raise ValueError("label out of range for n_classes")
        counts = np.bincount(labels, minlength=n_classes)
        if np.any(counts == 0):
            raise ValueError("every class needs at least one sample")
        self.features = _readonly(features)
        self.labels = _readonly(labels)
        self.n_classes = int(n_classes)
        self.class_counts = _readonly(counts)
        self.feature_names = tuple(feature_names) if feature_names else None
        self.class_names = tuple(class_names) if class_names else None

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def class_rows(self, j: int) -> np.ndarray:
        return self.features[self.labels == j]

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices)
        return Dataset(self.features[indices], self.labels[indices],
                       n_classes=self.n_classes,
                       feature_names=self.feature_names,
                       class_names=self.class_names)

    def __repr__(self):
        return (f"Dataset(P={self.n_samples}, N={self.n_features}, "
                f"G={self.n_classes})")


class Smoothing:
    """Kernel bandwidths at one of four granularities.

    ``scalar``            one value shared by everything
    ``per_class``         one value per class
    ``per_feature``       one value per feature, shared by all classes
    ``per_class_feature`` a full classes x features matrix

    The bandwidth matrix of the density formula is always diagonal, so its
    determinant is the product of the entries and its inverse acts as
    elementwise division.
    """

    KINDS = ("scalar", "per_class", "per_feature", "per_class_feature")

    def __init__(self, kind: str, values):
        if kind not in self.KINDS:
            raise ValueError(f"unknown smoothing kind {kind!r}")
        values = np.asarray(values, dtype=np.float64)
        expected_ndim = {"scalar": 0, "per_class": 1, "per_feature": 1,
                         "per_class_feature": 2}[kind]
        if values.ndim != expected_ndim:
            raise ValueError(f"{kind} smoothing expects {expected_ndim}-D values")
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise ValueError("bandwidths must be finite and strictly positive")
        self.kind = kind
        self.values = _readonly(np.atleast_1d(values))

    @classmethod
    def scalar(cls, h: float) -> "Smoothing":
        return cls("scalar", np.float64(h))

    @classmethod
    def per_class(cls, values) -> "Smoothing":
        return cls("per_class", values)

    @classmethod
    def per_feature(cls, values) -> "Smoothing":
        return cls("per_feature", values)

    @classmethod
    def per_class_feature(cls, matrix) -> "Smoothing":
        return cls("per_class_feature", matrix)

    @classmethod
    def from_vector(cls, kind: str, vector, n_classes: int,
                    n_features: int) -> "Smoothing":
        """Rebuild a spec from the flat optimizer vector for ``kind``."""
        vector = np.asarray(vector, dtype=np.float64)
        if kind == "scalar":
            return cls.scalar(vector.reshape(()) if vector.ndim == 0 else vector[0])
        if kind == "per_class":
            return cls.per_class(vector.reshape(n_classes))
        if kind == "per_feature":
            return cls.per_feature(vector.reshape(n_features))
        if kind == "per_class_feature":
            return cls.per_class_feature(vector.reshape(n_classes, n_features))
        raise ValueError(f"unknown smoothing kind {kind!r}")

    @staticmethod
    def vector_length(kind: str, n_classes: int, n_features: int) -> int:
        return {"scalar": 1, "per_class": n_classes, "per_feature": n_features,
                "per_class_feature": n_classes * n_features}[kind]

    def validate_for(self, dataset: Dataset, upper: float = 10000.0) -> None:
        g, n = dataset.n_classes, dataset.n_features
        shape = {"scalar": (1,), "per_class": (g,), "per_feature": (n,),
                 "per_class_feature": (g, n)}[self.kind]
        if self.values.shape != shape:
            raise ValueError(
                f"{self.kind} smoothing shape {self.values.shape} does not "
                f"match dataset with G={g}, N={n}")
        if np.any(self.values > upper):
            raise ValueError(f"bandwidth exceeds upper bound {upper}")

    def class_bandwidths(self, j: int, n_features: int) -> np.ndarray:
        """Diagonal bandwidth vector for class ``j``, length ``n_features``."""
        if self.kind == "scalar":
            return np.full(n_features, self.values[0])
        if self.kind == "per_class":
            return np.full(n_features, self.values[j])
        if self.kind == "per_feature":
            return np.asarray(self.values)
        return np.asarray(self.values[j])

    def bandwidth_matrix(self, n_classes: int, n_features: int) -> np.ndarray:
        """All per-class bandwidth vectors stacked into a (G, N) matrix."""
        return np.vstack([self.class_bandwidths(j, n_features)
                          for j in range(n_classes)])

    @property
    def shared_across_classes(self) -> bool:
        return self.kind in ("scalar", "per_feature")

    def to_jsonable(self):
        return {"kind": self.kind, "values": self.values.tolist()}


@dataclass(frozen=True)
class ModificationConfig:
    """Intensity of the per-pattern scale adjustment; 0 disables it."""

    intensity: float = 0.0
    density_floor: float = 1e-300

    def __post_init__(self):
        if self.intensity < 0:
            raise ValueError("intensity must be nonnegative")
        if self.density_floor <= 0:
            raise ValueError("density_floor must be positive")


@dataclass(frozen=True)
class PnnModel:
    """A fitted classifier: the stored pattern set plus its bandwidths.

    ``pattern_scales`` holds the per-pattern multiplier s_p (all ones unless
    :func:`apply_modification` has been applied).
    """

    patterns: Dataset
    smoothing: Smoothing
    pattern_scales: np.ndarray = field(default=None)

    def __post_init__(self):
        self.smoothing.validate_for(self.patterns)
        scales = self.pattern_scales
        if scales is None:
            scales = np.ones(self.patterns.n_samples)
        scales = np.asarray(scales, dtype=np.float64)
        if scales.shape != (self.patterns.n_samples,):
            raise ValueError("pattern_scales length must match pattern count")
        if np.any(scales <= 0):
            raise ValueError("pattern_scales must be strictly positive")
        object.__setattr__(self, "pattern_scales", _readonly(scales))


def cauchy_kernel(u):
    """One-dimensional Cauchy kernel 2 / (pi * (u^2 + 1)^2).

    Accepts scalars or arrays; even, strictly positive, maximal at 0 where it
    equals 2/pi, and integrates to one.
    """
    u = np.asarray(u, dtype=np.float64)
    out = TWO_OVER_PI / np.square(np.square(u) + 1.0)
    return float(out) if out.ndim == 0 else out


def product_kernel(x) -> float:
    """Product of one-dimensional Cauchy kernels over the coordinates."""
    x = np.asarray(x, dtype=np.float64)
    return float(np.prod(cauchy_kernel(x)))


def kde(x, patterns, h: float) -> float:
    """Kernel density estimate at ``x`` with a single scalar bandwidth.

    ``patterns`` is the (P, N) matrix of stored points. Raises ``ValueError``
    for an empty pattern set or a nonpositive bandwidth.
    """
    patterns = np.asarray(patterns, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if patterns.ndim != 2 or patterns.shape[0] == 0:
        raise ValueError("pattern set must be a nonempty (P, N) matrix")
    if x.shape != (patterns.shape[1],):
        raise ValueError("query dimension does not match the pattern set")
    if h <= 0:
        raise ValueError("bandwidth must be positive")
    p, n = patterns.shape
    u = (x[None, :] - patterns) / h
    kernels = np.prod(cauchy_kernel(u), axis=1)
    return float(kernels.sum() / (p * h ** n))


def class_density(model: PnnModel, x, j: int) -> float:
    """Density estimate of class ``j`` at ``x`` (the summation layer).

    Each stored pattern of the class contributes a product kernel scaled by
    its diagonal bandwidths and its pattern scale s_p.
    """
    ds = model.patterns
    if not 0 <= j < ds.n_classes:
        raise ValueError(f"class index {j} out of range")
    mask = ds.labels == j
    rows = ds.features[mask]
    if rows.shape[0] == 0:
        raise ValueError(f"class {j} has no patterns")
    scales = model.pattern_scales[mask]
    h = model.smoothing.class_bandwidths(j, ds.n_features)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (ds.n_features,):
        raise ValueError("query dimension does not match the pattern set")
    u = (x[None, :] - rows) / (h[None, :] * scales[:, None])
    kernels = np.prod(cauchy_kernel(u), axis=1)
    terms = kernels / scales ** ds.n_features
    return float(terms.sum() / (rows.shape[0] * np.prod(h)))


def class_densities(model: PnnModel, x) -> np.ndarray:
    return np.array([class_density(model, x, j)
                     for j in range(model.patterns.n_classes)])


def classify(model: PnnModel, x) -> int:
    """Class with the highest density at ``x``; ties go to the lowest index."""
    return int(np.argmax(class_densities(model, x)))


def classify_batch(model: PnnModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    return np.array([classify(model, row) for row in X], dtype=np.int64)


def apply_modification(model: PnnModel, cfg: ModificationConfig) -> PnnModel:
    """Return a copy of ``model`` with density-adaptive pattern scales.

    Each pattern's own-class density (at unit scales) is compared with the
    geometric mean over all patterns; dense regions get scales below one,
    sparse regions above. Densities are clamped to ``cfg.density_floor``
    before the logarithm and the geometric mean is computed as the mean of
    logarithms. With intensity 0 all scales are exactly one.
    """
    if not np.all(model.pattern_scales == 1.0):
        raise ValueError("modification must start from unit pattern scales")
    ds = model.patterns
    if cfg.intensity == 0.0:
        return PnnModel(ds, model.smoothing, np.ones(ds.n_samples))
    densities = np.array([
        class_density(model, ds.features[p], int(ds.labels[p]))
        for p in range(ds.n_samples)
    ])
    logs = np.log(np.maximum(densities, cfg.density_floor))
    scales = np.exp(-cfg.intensity * (logs - logs.mean()))
    return PnnModel(ds, model.smoothing, scales)


class DensityEvaluator:
    """Fast repeated evaluation of one query set against one pattern set.

    Training repeatedly scores candidate bandwidths against fixed data, so the
    per-feature squared differences between queries and patterns are computed
    once here and reused for every candidate. Pattern scales are fixed at one
    (training always evaluates unmodified models).

    With ``exclude_self=True`` the query rows must be the pattern rows in
    order, and each query's own pattern is left out of its class sum
    (leave-one-out).
    """

    def __init__(self, pattern_set: Dataset, queries, exclude_self=False):
        queries = np.asarray(queries, dtype=np.float64)
        if queries.ndim != 2 or queries.shape[1] != pattern_set.n_features:
            raise ValueError("queries must be (Q, N) with N matching patterns")
        if exclude_self and not (
                queries.shape == pattern_set.features.shape
                and np.array_equal(queries, pattern_set.features)):
            raise ValueError("exclude_self requires queries == pattern rows")
        self.pattern_set = pattern_set
        self.exclude_self = exclude_self
        self.n_queries = queries.shape[0]

        order = np.argsort(pattern_set.labels, kind="stable")
        sorted_rows = pattern_set.features[order]
        counts = pattern_set.class_counts
        self._starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        self._counts = counts.astype(np.float64)

        n = pattern_set.n_features
        q, p = queries.shape[0], pattern_set.n_samples
        self._diff2 = np.empty((n, q, p))
        for f in range(n):
            d = queries[:, f, None] - sorted_rows[None, :, f]
            np.square(d, out=self._diff2[f])
        self._buf = np.empty((q, p))
        self._acc = np.empty((q, p))
        if exclude_self:
            self._self_cols = np.empty(q, dtype=np.intp)
            self._self_cols[order] = np.arange(p)
            self._qidx = np.arange(q)

    def _kernel_sums(self, bandwidths: np.ndarray, cols=slice(None)) -> np.ndarray:
        """Sum over pattern columns of 1/((u^2+1)^2) per query, per class.

        The constant (2/pi)^N and the 1/(P_j det h) prefactors are applied by
        the callers that need true densities.
        """
        d2 = self._diff2[:, :, cols]
        acc = self._acc[:, :d2.shape[2]]
        buf = self._buf[:, :d2.shape[2]]
        inv_h2 = 1.0 / np.square(np.maximum(bandwidths, BANDWIDTH_FLOOR))
        for f in range(d2.shape[0]):
            np.multiply(d2[f], inv_h2[f], out=buf)
            buf += 1.0
            np.square(buf, out=buf)
            if f == 0:
                acc[:] = buf
            else:
                acc *= buf
        np.reciprocal(acc, out=acc)
        return acc

    def _scores(self, smoothing: Smoothing) -> np.ndarray:
        """(Q, G) scores equal to densities up to class-independent factors."""
        ds = self.pattern_set
        g, n = ds.n_classes, ds.n_features
        labels_q = ds.labels if self.exclude_self else None
        counts = np.broadcast_to(self._counts, (self.n_queries, g)).copy()

        if smoothing.shared_across_classes:
            h = smoothing.class_bandwidths(0, n)
            kernels = self._kernel_sums(h)
            sums = np.add.reduceat(kernels, self._starts, axis=1)
            if self.exclude_self:
                sums[self._qidx, labels_q] -= kernels[self._qidx, self._self_cols]
                counts[self._qidx, labels_q] -= 1.0
            with np.errstate(invalid="ignore", divide="ignore"):
                scores = sums / counts
            return np.where(counts > 0, scores, 0.0)

        # Per-class bandwidths: determinants differ between classes, so work
        # with log densities to keep extreme bandwidths comparable.
        log_scores = np.empty((self.n_queries, g))
        ends = np.append(self._starts[1:], ds.n_samples)
        for j in range(g):
            h = smoothing.class_bandwidths(j, n)
            cols = slice(int(self._starts[j]), int(ends[j]))
            kernels = self._kernel_sums(h, cols)
            sums = kernels.sum(axis=1)
            if self.exclude_self:
                own = labels_q == j
                rel = self._self_cols[own] - self._starts[j]
                sums[own] -= kernels[own, rel]
                counts[own, j] -= 1.0
            log_det = np.log(np.maximum(h, BANDWIDTH_FLOOR)).sum()
            with np.errstate(divide="ignore", invalid="ignore"):
                log_scores[:, j] = (np.log(sums) - np.log(counts[:, j])
                                    - log_det)
            log_scores[counts[:, j] <= 0, j] = -np.inf
        return log_scores

    def class_densities(self, smoothing: Smoothing) -> np.ndarray:
        """True (Q, G) density values for every query and class."""
        ds = self.pattern_set
        g, n = ds.n_classes, ds.n_features
        scores = self._scores(smoothing)
        norm = TWO_OVER_PI ** n
        if smoothing.shared_across_classes:
            det = np.prod(smoothing.class_bandwidths(0, n))
            return scores * (norm / det)
        return np.exp(scores) * norm

    def predict(self, smoothing: Smoothing) -> np.ndarray:
        """Argmax class per query; ties resolve to the lowest index."""
        return np.argmax(self._scores(smoothing), axis=1)

    def error_rate(self, smoothing: Smoothing, labels) -> float:
        """Fraction of queries whose argmax class differs from ``labels``."""
        labels = np.asarray(labels)
        return float(np.mean(self.predict(smoothing) != labels))
