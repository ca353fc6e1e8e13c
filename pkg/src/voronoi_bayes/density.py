"""Voronoi-area density estimation by nearest-neighbour counting.

The area of each training point's Voronoi cell is estimated by throwing a
uniform reference sample over a window and counting how many reference
points fall nearest to it. The density at a query point is the reciprocal
of (class size x estimated area) of the cell the query falls in.

Two variants are provided:

``plain_1nn``
    ``f(x) = N / (g_j n)`` where ``g_j`` is the raw count of the cell
    containing ``x``. This is measured against the normalised window
    (total mass ``1`` over the window, not over its length), so
    ``sum_j w_j f(X_j) = 1`` holds exactly.
``corrected_knn``
    Cells whose relative frequency is below ``r`` pool the counts of their
    ``k`` nearest training points (themselves included); cells at or above
    ``r`` are treated as lying outside the support and have their count
    multiplied by ``k``. Such boundary cells are not pooled into their
    neighbours' sums, so a large empty region does not drag down the
    density of the cells next to it. The pooled counts are rescaled to
    areas summing to the window measure and ``f(x) = 1 / (n g**_j)``.

An empty cell (zero count) yields ``inf``; see :func:`density_at`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .spaces import METRICS, SupportWindow, as_points, sample_uniform, window_measure

VARIANTS = ("plain_1nn", "corrected_knn")

# Queries are scored in blocks to bound the size of the distance matrix.
_BLOCK = 4096


@dataclass(frozen=True, eq=False)
class TrainingSet:
    points: np.ndarray
    label: int = 1

    def __post_init__(self):
        pts = as_points(self.points)
        if len(pts) < 2:
            raise ValueError(f"training set needs at least 2 points, got {len(pts)}")
        if len(np.unique(pts, axis=0)) < len(pts):
            warnings.warn(
                "duplicate training points; later copies receive zero weight",
                stacklevel=3,
            )
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True, eq=False)
class ReferenceSample:
    window: SupportWindow
    points: np.ndarray
    seed: object = None

    @classmethod
    def draw(cls, window: SupportWindow, count: int, seed) -> ReferenceSample:
        return cls(window, sample_uniform(window, count, seed), seed)

    @property
    def count(self) -> int:
        return len(self.points)


@dataclass(frozen=True, eq=False)
class RawWeights:
    g: np.ndarray

    @property
    def total(self) -> int:
        return int(self.g.sum())

    @property
    def w(self) -> np.ndarray:
        return self.g / self.total


@dataclass(frozen=True, eq=False)
class CorrectedWeights:
    g_star: np.ndarray
    g_double_star: np.ndarray
    r: float
    k: int
    window_measure: float


def _check_metric(metric: str) -> None:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")


def nearest_index(sites: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Index of the nearest site for every query, ties going to the lowest index.

    A kd-tree does the search; any query whose two closest sites are at the
    same distance is re-resolved by a full scan so the tie rule is exact.
    """
    sites = np.asarray(sites, dtype=float)
    queries = np.asarray(queries, dtype=float)
    if sites.shape[1] != queries.shape[1]:
        raise ValueError(f"dimension mismatch: sites {sites.shape[1]}, queries {queries.shape[1]}")
    if len(sites) == 1:
        return np.zeros(len(queries), dtype=np.intp)
    dist, idx = cKDTree(sites).query(queries, k=2)
    out = idx[:, 0].astype(np.intp)
    tied = np.flatnonzero(dist[:, 0] == dist[:, 1])
    for i in tied:
        d2 = np.sum((sites - queries[i]) ** 2, axis=1)
        out[i] = int(np.argmin(d2))
    return out


def neighbour_table(points: np.ndarray, k: int, candidates: np.ndarray | None = None) -> np.ndarray:
    """``(n, k)`` table: each point itself, then its ``k - 1`` nearest other points.

    ``candidates`` optionally masks which points may appear as neighbours of
    others; masked points only fill rows that run out of candidates. Ties are
    broken by lowest index.
    """
    n = len(points)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    table = np.empty((n, k), dtype=np.intp)
    for start in range(0, n, _BLOCK):
        block = points[start : start + _BLOCK]
        d2 = np.sum((block[:, None, :] - points[None, :, :]) ** 2, axis=2)
        if candidates is not None:
            d2[:, ~candidates] = np.inf
        rows = np.arange(len(block))
        d2[rows, start + rows] = -1.0
        table[start : start + len(block)] = np.argsort(d2, axis=1, kind="stable")[:, :k]
    return table


def count_raw_weights(
    training: TrainingSet, reference: ReferenceSample, metric: str = "euclidean"
) -> RawWeights:
    """Count the reference points falling nearest to each training point."""
    _check_metric(metric)
    ref = np.asarray(reference.points, dtype=float)
    if ref.size == 0:
        raise ValueError("empty reference sample")
    if ref.ndim != 2 or ref.shape[1] != training.dim:
        raise ValueError(f"dimension mismatch: training {training.dim}, reference {ref.shape}")
    owner = nearest_index(training.points, ref)
    return RawWeights(np.bincount(owner, minlength=training.n))


def default_r(n: int) -> float:
    """Boundary threshold used when none is configured: ``max(0.02, 5/n)``, capped at 1."""
    return min(1.0, max(0.02, 5.0 / n))


def boundary_cells(raw: RawWeights, r: float) -> np.ndarray:
    """Cells whose relative frequency reaches ``r``."""
    return raw.g / raw.total >= r


def correct_weights(
    raw: RawWeights,
    training: TrainingSet,
    r: float,
    k: int,
    window_measure: float,
    metric: str = "euclidean",
    neighbours: np.ndarray | None = None,
    pool_boundary: bool = False,
) -> CorrectedWeights:
    """Pool counts over nearest cells and rescale them to cell areas.

    Boundary cells (relative frequency at least ``r``) keep ``k`` times their
    own count. Every other cell sums the counts of itself and its ``k - 1``
    nearest training points; boundary cells are left out of those pools
    unless ``pool_boundary`` is set. ``neighbours`` may pass a precomputed
    :func:`neighbour_table` built with the matching candidate mask.
    """
    _check_metric(metric)
    if not 0 < r <= 1:
        raise ValueError(f"r must lie in (0, 1], got {r}")
    if not 1 <= k <= training.n:
        raise ValueError(f"k must lie in [1, {training.n}], got {k}")
    g = raw.g.astype(float)
    boundary = boundary_cells(raw, r)
    if neighbours is None:
        candidates = None if pool_boundary else ~boundary
        neighbours = neighbour_table(training.points, k, candidates)
    pooled = g[neighbours[:, :k]].sum(axis=1)
    g_star = np.where(boundary, k * g, pooled)
    total = g_star.sum()
    if total <= 0:
        raise ValueError("corrected weights sum to zero")
    return CorrectedWeights(g_star, window_measure * g_star / total, float(r), int(k), float(window_measure))


@dataclass(frozen=True, eq=False)
class VoronoiDensityModel:
    training: TrainingSet
    raw: RawWeights
    weights: CorrectedWeights | None
    variant: str
    metric: str = "euclidean"
    window: SupportWindow | None = None

    @property
    def cell_areas(self) -> np.ndarray:
        """Estimated cell sizes (window-normalised for the plain variant)."""
        if self.variant == "plain_1nn":
            return self.raw.w
        return self.weights.g_double_star

    def cell_density(self) -> np.ndarray:
        """Density value of every cell, ``inf`` where the cell is empty."""
        with np.errstate(divide="ignore"):
            return 1.0 / (self.training.n * self.cell_areas)

    def __call__(self, x) -> np.ndarray:
        q = as_points(x, self.training.dim)
        return self.cell_density()[nearest_index(self.training.points, q)]


def fit(
    training: TrainingSet,
    window: SupportWindow,
    n_uniforms: int = 1000,
    metric: str = "euclidean",
    variant: str = "corrected_knn",
    r: float | None = None,
    k: int = 1,
    seed=0,
    pool_boundary: bool = False,
) -> VoronoiDensityModel:
    """Draw the reference sample and count it; the corrected variant also pools."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    if training.dim != window.dim:
        raise ValueError(f"dimension mismatch: training {training.dim}, window {window.dim}")
    outside = ~window.contains(training.points)
    if outside.any():
        warnings.warn(f"{int(outside.sum())} training points lie outside the window", stacklevel=2)
    reference = ReferenceSample.draw(window, n_uniforms, seed)
    raw = count_raw_weights(training, reference, metric)
    return model_from_counts(training, raw, window, variant, r, k, metric, pool_boundary=pool_boundary)


def model_from_counts(
    training: TrainingSet,
    raw: RawWeights,
    window: SupportWindow,
    variant: str = "corrected_knn",
    r: float | None = None,
    k: int = 1,
    metric: str = "euclidean",
    neighbours: np.ndarray | None = None,
    pool_boundary: bool = False,
) -> VoronoiDensityModel:
    """Build a model from already-counted weights; lets several ``k`` share one count."""
    if variant == "plain_1nn":
        return VoronoiDensityModel(training, raw, None, variant, metric, window)
    if r is None:
        r = default_r(training.n)
    weights = correct_weights(raw, training, r, k, window_measure(window), metric, neighbours, pool_boundary)
    return VoronoiDensityModel(training, raw, weights, variant, metric, window)


def density_at(model: VoronoiDensityModel, x) -> float:
    """Density estimate at a single point.

    Returns ``inf`` when the nearest cell caught no reference points; callers
    decide what an empty cell means for them.
    """
    q = as_points(x, model.training.dim)
    if len(q) != 1:
        raise ValueError("density_at takes a single point; use the model itself for batches")
    return float(model(q)[0])


def density_curve(model: VoronoiDensityModel, grid) -> list[tuple[np.ndarray, float]]:
    q = as_points(grid, model.training.dim)
    if len(q) == 0:
        raise ValueError("empty grid")
    return list(zip(q, model(q).tolist()))


def write_density_csv(curve: list[tuple[np.ndarray, float]], path) -> None:
    """Write ``x[,y],density`` rows."""
    dim = len(curve[0][0])
    header = "x,density" if dim == 1 else "x,y,density"
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for point, value in curve:
            fh.write(",".join(repr(float(c)) for c in point) + f",{float(value)!r}\n")
