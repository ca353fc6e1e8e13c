"""Support windows, metrics and uniform reference samples.

Points are stored as float arrays of shape ``(count, dim)`` with ``dim`` in
``{1, 2}``. Circle supports live in the plane; nearest-neighbour searches on
them use the ambient Euclidean distance, which orders points exactly like
arc length does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

KINDS = ("interval", "rectangle", "annulus", "circle")
METRICS = ("euclidean", "arc")


def as_points(x, dim: int | None = None) -> np.ndarray:
    """Coerce scalars, 1D sequences or ``(count, dim)`` arrays to 2D points.

    A flat sequence is read as ``count`` one-dimensional points unless
    ``dim == 2``, in which case it is a single planar point.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1) if dim == 2 else arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[1] not in (1, 2):
        raise ValueError(f"points must have dimension 1 or 2, got shape {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("points must be finite")
    return arr


@dataclass(frozen=True)
class SupportWindow:
    """Region covered by a reference sample.

    Use the ``interval``, ``rectangle``, ``annulus`` and ``circle``
    constructors rather than building instances by hand. Annuli and circles
    are centred at the origin.
    """

    kind: str
    low: tuple[float, ...] = ()
    high: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown window kind {self.kind!r}; expected one of {KINDS}")
        lo, hi = self.low, self.high
        if self.kind in ("interval", "rectangle"):
            want = 1 if self.kind == "interval" else 2
            if len(lo) != want or len(hi) != want:
                raise ValueError(f"{self.kind} needs {want}-dimensional bounds")
            if not all(a < b for a, b in zip(lo, hi)):
                raise ValueError(f"{self.kind} bounds must satisfy low < high, got {lo}, {hi}")
        elif self.kind == "annulus":
            if not 0 <= lo[0] < hi[0]:
                raise ValueError(f"annulus radii must satisfy 0 <= inner < outer, got {lo[0]}, {hi[0]}")
        elif not hi[0] > 0:
            raise ValueError("circle radius must be positive")
        if not all(map(math.isfinite, lo + hi)):
            raise ValueError("window bounds must be finite")

    @classmethod
    def interval(cls, l1: float, l2: float) -> SupportWindow:
        return cls("interval", (float(l1),), (float(l2),))

    @classmethod
    def rectangle(cls, low: Sequence[float], high: Sequence[float]) -> SupportWindow:
        return cls("rectangle", tuple(map(float, low)), tuple(map(float, high)))

    @classmethod
    def annulus(cls, r_inner: float, r_outer: float) -> SupportWindow:
        return cls("annulus", (float(r_inner),), (float(r_outer),))

    @classmethod
    def disc(cls, radius: float) -> SupportWindow:
        return cls.annulus(0.0, radius)

    @classmethod
    def circle(cls, radius: float = 1.0) -> SupportWindow:
        return cls("circle", (0.0,), (float(radius),))

    @property
    def dim(self) -> int:
        return 1 if self.kind == "interval" else 2

    def measure(self) -> float:
        return window_measure(self)

    def contains(self, points, tol: float = 1e-9) -> np.ndarray:
        """Boolean mask of the points lying in the (closed) window."""
        pts = as_points(points, self.dim)
        if self.kind in ("interval", "rectangle"):
            lo, hi = np.asarray(self.low), np.asarray(self.high)
            return np.all((pts >= lo - tol) & (pts <= hi + tol), axis=1)
        radius = np.linalg.norm(pts, axis=1)
        if self.kind == "annulus":
            return (radius >= self.low[0] - tol) & (radius <= self.high[0] + tol)
        return np.abs(radius - self.high[0]) <= tol

    def bounds_1d(self) -> tuple[float, float]:
        if self.kind != "interval":
            raise ValueError("bounds_1d is only defined for intervals")
        return self.low[0], self.high[0]


def derive_symmetric_window(samples) -> SupportWindow:
    """Interval ``(-K, K)`` with ``K`` the largest absolute extreme of the sample."""
    arr = np.asarray(samples, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError("empty training set")
    k = max(abs(arr.max()), abs(arr.min()))
    return SupportWindow.interval(-k, k)


def window_measure(w: SupportWindow) -> float:
    """Length, area or arc length of the window."""
    if w.kind == "interval":
        return w.high[0] - w.low[0]
    if w.kind == "rectangle":
        return (w.high[0] - w.low[0]) * (w.high[1] - w.low[1])
    if w.kind == "annulus":
        return math.pi * (w.high[0] ** 2 - w.low[0] ** 2)
    return 2 * math.pi * w.high[0]


def sample_uniform(w: SupportWindow, count: int, seed) -> np.ndarray:
    """Draw ``count`` points uniformly over the window.

    ``seed`` is anything accepted by :func:`numpy.random.default_rng`; the
    same seed always yields the same points.
    """
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    rng = np.random.default_rng(seed)
    if w.kind in ("interval", "rectangle"):
        return rng.uniform(w.low, w.high, size=(count, w.dim))
    if w.kind == "annulus":
        # inverse CDF in the radius: P(R <= t) is proportional to t^2 - r_inner^2
        r2 = rng.uniform(w.low[0] ** 2, w.high[0] ** 2, size=count)
        theta = rng.uniform(0.0, 2 * math.pi, size=count)
        radius = np.sqrt(r2)
        return np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])
    z = rng.standard_normal((count, 2))
    return w.high[0] * z / np.linalg.norm(z, axis=1, keepdims=True)


def distance(metric: str, a, b) -> float:
    """Distance between two points under ``"euclidean"`` or ``"arc"``.

    The arc metric treats both points as lying on the origin-centred circle
    through ``a``.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    pa, pb = np.atleast_1d(np.asarray(a, dtype=float)), np.atleast_1d(np.asarray(b, dtype=float))
    if pa.shape != pb.shape:
        raise ValueError(f"dimension mismatch: {pa.shape} vs {pb.shape}")
    if metric == "euclidean":
        return float(np.linalg.norm(pa - pb))
    if pa.size != 2:
        raise ValueError("arc distance needs planar points")
    radius = float(np.linalg.norm(pa))
    cross = pa[0] * pb[1] - pa[1] * pb[0]
    dot = pa @ pb
    return radius * abs(math.atan2(cross, dot))
