"""Seeded samplers and true densities for the simulation cases.

Normal distributions are parameterised by standard deviation. Every
``sample`` call takes an explicit seed so experiments can be replayed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import special

from .spaces import SupportWindow, as_points


class Distribution:
    """Base class. Subclasses set ``kind`` and ``dim``."""

    kind: str = ""
    dim: int = 1

    def sample(self, count: int, seed) -> np.ndarray:
        if count < 1:
            raise ValueError(f"count must be positive, got {count}")
        return self._draw(np.random.default_rng(seed), count)

    def _draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        raise NotImplementedError

    def pdf(self, x) -> np.ndarray | None:
        """Density at each point, or ``None`` when no closed form is offered."""
        return None

    def cdf(self, x) -> np.ndarray:
        raise NotImplementedError(f"{self.kind} has no CDF")

    def ppf(self, q: float) -> float:
        raise NotImplementedError(f"{self.kind} has no quantile function")


def _flat(x) -> np.ndarray:
    return np.asarray(x, dtype=float).reshape(-1)


@dataclass(frozen=True)
class Normal(Distribution):
    mean: float
    sd: float
    kind = "normal"

    def __post_init__(self):
        if not self.sd > 0:
            raise ValueError("sd must be positive")

    def _draw(self, rng, count):
        return rng.normal(self.mean, self.sd, size=(count, 1))

    def pdf(self, x):
        z = (_flat(x) - self.mean) / self.sd
        return np.exp(-0.5 * z**2) / (self.sd * math.sqrt(2 * math.pi))

    def cdf(self, x):
        return special.ndtr((_flat(x) - self.mean) / self.sd)

    def ppf(self, q):
        return float(self.mean + self.sd * special.ndtri(q))


@dataclass(frozen=True)
class UniformUnion(Distribution):
    """Uniform over a union of disjoint intervals."""

    intervals: tuple[tuple[float, float], ...]
    kind = "uniform_union"

    def __post_init__(self):
        ivs = sorted(tuple(map(float, iv)) for iv in self.intervals)
        if not ivs:
            raise ValueError("need at least one interval")
        for a, b in ivs:
            if not a < b:
                raise ValueError(f"empty interval ({a}, {b})")
        for (_, b), (c, _) in zip(ivs, ivs[1:]):
            if c < b:
                raise ValueError("intervals must be pairwise disjoint")
        object.__setattr__(self, "intervals", tuple(ivs))

    @property
    def _lengths(self):
        return np.array([b - a for a, b in self.intervals])

    def _draw(self, rng, count):
        lengths = self._lengths
        pick = rng.choice(len(lengths), size=count, p=lengths / lengths.sum())
        lo = np.array([a for a, _ in self.intervals])[pick]
        return (lo + rng.uniform(0.0, 1.0, size=count) * lengths[pick]).reshape(-1, 1)

    def pdf(self, x):
        x = _flat(x)
        inside = np.zeros(x.shape, dtype=bool)
        for a, b in self.intervals:
            inside |= (x >= a) & (x <= b)
        return inside / self._lengths.sum()

    def cdf(self, x):
        x = _flat(x)
        acc = np.zeros_like(x)
        for a, b in self.intervals:
            acc += np.clip(x, a, b) - a
        return acc / self._lengths.sum()

    def ppf(self, q):
        target = q * self._lengths.sum()
        for a, b in self.intervals:
            if target <= b - a:
                return a + target
            target -= b - a
        return self.intervals[-1][1]


@dataclass(frozen=True)
class NormalMixture(Distribution):
    """Mixture of univariate normals given as ``(weight, mean, sd)`` triples."""

    components: tuple[tuple[float, float, float], ...]
    kind = "normal_mixture"

    def __post_init__(self):
        comps = tuple(tuple(map(float, c)) for c in self.components)
        weights = np.array([c[0] for c in comps])
        if np.any(weights <= 0) or abs(weights.sum() - 1) > 1e-12:
            raise ValueError("mixture weights must be positive and sum to 1")
        if any(c[2] <= 0 for c in comps):
            raise ValueError("component sd must be positive")
        object.__setattr__(self, "components", comps)

    def _draw(self, rng, count):
        w = np.array([c[0] for c in self.components])
        pick = rng.choice(len(w), size=count, p=w / w.sum())
        mu = np.array([c[1] for c in self.components])[pick]
        sd = np.array([c[2] for c in self.components])[pick]
        return (mu + sd * rng.standard_normal(count)).reshape(-1, 1)

    def pdf(self, x):
        return sum(w * Normal(m, s).pdf(x) for w, m, s in self.components)

    def cdf(self, x):
        return sum(w * Normal(m, s).cdf(x) for w, m, s in self.components)


@dataclass(frozen=True)
class Pareto(Distribution):
    """Pareto with scale ``x_m`` and shape ``alpha``; density ``alpha x_m^alpha / x^(alpha+1)``."""

    x_m: float
    alpha: float
    kind = "pareto"

    def __post_init__(self):
        if not (self.x_m > 0 and self.alpha > 0):
            raise ValueError("pareto needs x_m > 0 and alpha > 0")

    def _draw(self, rng, count):
        u = rng.uniform(0.0, 1.0, size=count)
        return (self.x_m * (1.0 - u) ** (-1.0 / self.alpha)).reshape(-1, 1)

    def pdf(self, x):
        x = _flat(x)
        out = np.zeros_like(x)
        ok = x >= self.x_m
        out[ok] = self.alpha * self.x_m**self.alpha / x[ok] ** (self.alpha + 1)
        return out

    def cdf(self, x):
        x = _flat(x)
        return np.where(x >= self.x_m, 1.0 - (self.x_m / np.maximum(x, self.x_m)) ** self.alpha, 0.0)

    def ppf(self, q):
        return float(self.x_m * (1.0 - q) ** (-1.0 / self.alpha))


def _check_spd(cov: np.ndarray) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (2, 2) or not np.allclose(cov, cov.T):
        raise ValueError("covariance must be a symmetric 2x2 matrix")
    if np.any(np.linalg.eigvalsh(cov) <= 0):
        raise ValueError("covariance must be positive definite")
    return cov


@dataclass(frozen=True, eq=False)
class BivariateNormal(Distribution):
    mean: tuple[float, float]
    covariance: np.ndarray
    kind = "bivariate_normal"
    dim = 2

    def __post_init__(self):
        object.__setattr__(self, "mean", tuple(map(float, self.mean)))
        object.__setattr__(self, "covariance", _check_spd(self.covariance))

    def _draw(self, rng, count):
        chol = np.linalg.cholesky(self.covariance)
        return np.asarray(self.mean) + rng.standard_normal((count, 2)) @ chol.T

    def pdf(self, x):
        pts = as_points(x, 2) - np.asarray(self.mean)
        prec = np.linalg.inv(self.covariance)
        quad = np.einsum("ij,jk,ik->i", pts, prec, pts)
        return np.exp(-0.5 * quad) / (2 * math.pi * math.sqrt(np.linalg.det(self.covariance)))


@dataclass(frozen=True)
class AnnulusUnion(Distribution):
    """Uniform over the union of origin-centred annular bands ``(r_inner, r_outer)``."""

    bands: tuple[tuple[float, float], ...]
    kind = "annulus_union_uniform"
    dim = 2

    def __post_init__(self):
        bands = sorted(tuple(map(float, b)) for b in self.bands)
        for a, b in bands:
            if not 0 <= a < b:
                raise ValueError(f"bad band ({a}, {b})")
        for (_, b), (c, _) in zip(bands, bands[1:]):
            if c < b:
                raise ValueError("bands must be pairwise disjoint")
        object.__setattr__(self, "bands", tuple(bands))

    def _draw(self, rng, count):
        areas = np.array([b * b - a * a for a, b in self.bands])
        pick = rng.choice(len(areas), size=count, p=areas / areas.sum())
        inner = np.array([a for a, _ in self.bands])[pick]
        outer = np.array([b for _, b in self.bands])[pick]
        radius = np.sqrt(rng.uniform(inner**2, outer**2))
        theta = rng.uniform(0.0, 2 * math.pi, size=count)
        return np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])


@dataclass(frozen=True, eq=False)
class ProjectedNormalCircle(Distribution):
    """Direction of a centred bivariate normal, i.e. a point on the unit circle."""

    covariance: np.ndarray = field(default_factory=lambda: np.eye(2))
    kind = "projected_normal_circle"
    dim = 2

    def __post_init__(self):
        object.__setattr__(self, "covariance", _check_spd(self.covariance))

    def _draw(self, rng, count):
        z = BivariateNormal((0.0, 0.0), self.covariance)._draw(rng, count)
        return z / np.linalg.norm(z, axis=1, keepdims=True)


def sample(d: Distribution, count: int, seed) -> np.ndarray:
    return d.sample(count, seed)


def true_pdf(d: Distribution, x) -> np.ndarray | float | None:
    """Exact density at ``x``; ``None`` for the annulus and circle kinds."""
    values = d.pdf(x)
    if values is None:
        return None
    if np.ndim(x) == 0 or (d.dim == 2 and np.ndim(x) == 1):
        return float(values[0])
    return values


@dataclass(frozen=True)
class CasePreset:
    """Two competing distributions with the reference windows used for each."""

    name: str
    description: str
    class1: Distribution
    class2: Distribution
    window1: SupportWindow
    window2: SupportWindow
    methods: tuple[str, ...]

    @property
    def dim(self) -> int:
        return self.class1.dim


_NN = ("NN1", "NN10", "NN25")
_ALL_1D = _NN + ("LDA", "QDA", "G-Ker", "E-Ker")

CASES: dict[str, CasePreset] = {
    p.name: p
    for p in (
        CasePreset(
            "case1", "U[(0,1)u(6,7)] vs N(3.5, 4)",
            UniformUnion(((0, 1), (6, 7))), Normal(3.5, 4),
            SupportWindow.interval(-2, 9), SupportWindow.interval(-8.5, 15.5), _ALL_1D,
        ),
        CasePreset(
            "case2", "0.5 N(0,1) + 0.5 N(5,1) vs N(2.5, 4)",
            NormalMixture(((0.5, 0, 1), (0.5, 5, 1))), Normal(2.5, 4),
            SupportWindow.interval(-3, 8), SupportWindow.interval(-9.5, 14.5), _ALL_1D,
        ),
        CasePreset(
            "case3", "U[(0,1)u(5,6)] vs U[(2,3)u(6,7)]",
            UniformUnion(((0, 1), (5, 6))), UniformUnion(((2, 3), (6, 7))),
            SupportWindow.interval(-2, 8), SupportWindow.interval(0, 9), _ALL_1D,
        ),
        CasePreset(
            "case4", "Pareto(1, 3) vs Pareto(1.29, 7)",
            Pareto(1, 3), Pareto(1.29, 7),
            SupportWindow.interval(-1, 9), SupportWindow.interval(-1, 9), _ALL_1D,
        ),
        CasePreset(
            "case5", "N(0, 1) vs N(3, 6)",
            Normal(0, 1), Normal(3, 6),
            SupportWindow.interval(-3, 3), SupportWindow.interval(-15, 21), _NN + ("LDA", "QDA"),
        ),
        CasePreset(
            "case6", "uniform on radii (5,6)u(9,10) vs N(0, 36 I)",
            AnnulusUnion(((5, 6), (9, 10))), BivariateNormal((0, 0), 36 * np.eye(2)),
            SupportWindow.annulus(4, 11), SupportWindow.disc(18), _NN + ("LDA", "QDA"),
        ),
        CasePreset(
            "case7", "projected N(0, I) vs projected N(0, diag(1, 4)) on the unit circle",
            ProjectedNormalCircle(np.eye(2)), ProjectedNormalCircle(np.diag([1.0, 4.0])),
            SupportWindow.circle(1), SupportWindow.circle(1), _NN + ("LDA", "QDA"),
        ),
    )
}


def get_case(name: str) -> CasePreset:
    try:
        return CASES[name]
    except KeyError:
        raise KeyError(f"unknown case {name!r}; valid cases: {', '.join(CASES)}") from None
