"""Two-class Bayes classifiers: Voronoi densities and the comparison methods.

Every classifier exposes ``log_scores(x)`` returning the prior-weighted log
densities of both classes; :meth:`TwoClassBayes.classify` picks class 1
when its score is at least that of class 2.
"""

from __future__ import annotations

import math
import re

import numpy as np

from . import density as vd
from .spaces import SupportWindow, as_points

METHODS = ("NN1", "NN10", "NN25", "LDA", "QDA", "G-Ker", "E-Ker")
_NN_RE = re.compile(r"^NN(\d+)$")


def nn_k(method: str) -> int | None:
    """``k`` for an ``NN<k>`` method name, ``None`` for anything else."""
    m = _NN_RE.match(method)
    return int(m.group(1)) if m else None


def check_method(method: str) -> str:
    if method in METHODS or (nn_k(method) or 0) >= 1:
        return method
    raise ValueError(f"unknown method {method!r}; valid methods: {', '.join(METHODS)} (or NN<k>)")


def _priors(n1: int, n2: int, priors) -> tuple[float, float]:
    if priors is None:
        priors = (n1 / (n1 + n2), n2 / (n1 + n2))
    p1, p2 = map(float, priors)
    if p1 <= 0 or p2 <= 0 or abs(p1 + p2 - 1) > 1e-12:
        raise ValueError(f"priors must be positive and sum to 1, got {priors}")
    return p1, p2


def _log(values) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.asarray(values, dtype=float))


def bayes_decision(f1, f2, priors=(0.5, 0.5)) -> np.ndarray:
    """Label 1 where ``p1 f1 >= p2 f2``, else 2; NaN densities count as 0."""
    f1 = np.nan_to_num(np.asarray(f1, dtype=float), nan=0.0, posinf=np.inf)
    f2 = np.nan_to_num(np.asarray(f2, dtype=float), nan=0.0, posinf=np.inf)
    s1 = _log(f1) + math.log(priors[0])
    s2 = _log(f2) + math.log(priors[1])
    return np.where(s1 >= s2, 1, 2)


class TwoClassBayes:
    kind = ""
    priors: tuple[float, float] = (0.5, 0.5)

    def log_scores(self, x) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def classify(self, x) -> np.ndarray:
        s1, s2 = self.log_scores(x)
        s1 = np.nan_to_num(s1, nan=-np.inf)
        s2 = np.nan_to_num(s2, nan=-np.inf)
        return np.where(s1 >= s2, 1, 2)


def classify(model: TwoClassBayes, x) -> int | np.ndarray:
    """Label(s) in ``{1, 2}``; a scalar for a single 1D value."""
    labels = model.classify(x)
    return int(labels[0]) if np.ndim(x) == 0 else labels


class GaussianDiscriminant(TwoClassBayes):
    """LDA (pooled covariance) or QDA (per-class covariance)."""

    def __init__(self, class1, class2, pooled: bool, priors=None):
        a = as_points(getattr(class1, "points", class1))
        b = as_points(getattr(class2, "points", class2), a.shape[1])
        d = a.shape[1]
        if len(a) < d + 1 or len(b) < d + 1:
            raise ValueError(f"each class needs at least {d + 1} points")
        self.kind = "lda" if pooled else "qda"
        self.priors = _priors(len(a), len(b), priors)
        self.means = (a.mean(axis=0), b.mean(axis=0))
        if pooled:
            pooled_cov = ((len(a) - 1) * np.cov(a.T).reshape(d, d) + (len(b) - 1) * np.cov(b.T).reshape(d, d)) / (
                len(a) + len(b) - 2
            )
            covs = (pooled_cov, pooled_cov)
        else:
            covs = (np.cov(a.T).reshape(d, d), np.cov(b.T).reshape(d, d))
        self.covariances = covs
        self._prec = []
        self._logdet = []
        for cov in covs:
            cond = np.linalg.cond(cov)
            if not np.isfinite(cond) or cond > 1e12:
                raise np.linalg.LinAlgError(f"singular covariance (condition number {cond:.3g})")
            self._prec.append(np.linalg.inv(cov))
            self._logdet.append(np.linalg.slogdet(cov)[1])

    def log_scores(self, x):
        q = as_points(x, len(self.means[0]))
        out = []
        for mu, prec, logdet, prior in zip(self.means, self._prec, self._logdet, self.priors):
            z = q - mu
            quad = np.einsum("ij,jk,ik->i", z, prec, z)
            out.append(math.log(prior) - 0.5 * (quad + logdet))
        return out[0], out[1]


def fit_lda(class1, class2, priors=None) -> GaussianDiscriminant:
    return GaussianDiscriminant(class1, class2, pooled=True, priors=priors)


def fit_qda(class1, class2, priors=None) -> GaussianDiscriminant:
    return GaussianDiscriminant(class1, class2, pooled=False, priors=priors)


def gaussian_kernel(u):
    return np.exp(-0.5 * u**2) / math.sqrt(2 * math.pi)


def epanechnikov_kernel(u):
    return np.where(np.abs(u) <= 1, 0.75 * (1 - u**2), 0.0)


KERNELS = {"gaussian": gaussian_kernel, "epanechnikov": epanechnikov_kernel}


def silverman_bandwidth(x) -> float:
    """``0.9 min(sd, IQR / 1.34) n^(-1/5)``; falls back to sd when the IQR is zero."""
    x = np.asarray(x, dtype=float).ravel()
    sd = x.std(ddof=1)
    q75, q25 = np.percentile(x, [75, 25])
    spread = min(sd, (q75 - q25) / 1.34) or sd
    if spread <= 0:
        raise ValueError("zero spread: all training points are equal")
    return 0.9 * spread * len(x) ** (-0.2)


class KernelDensity:
    """Fixed-bandwidth 1D kernel density estimate."""

    def __init__(self, points, kernel: str = "gaussian", bandwidth: float | None = None):
        if kernel not in KERNELS:
            raise ValueError(f"unknown kernel {kernel!r}; expected one of {tuple(KERNELS)}")
        pts = as_points(getattr(points, "points", points))
        if pts.shape[1] != 1:
            raise ValueError("kernel density baselines are 1D only")
        if len(pts) < 2:
            raise ValueError("need at least 2 points")
        self.data = pts[:, 0]
        self.kernel = kernel
        self.bandwidth = silverman_bandwidth(self.data) if bandwidth is None else float(bandwidth)

    def __call__(self, x) -> np.ndarray:
        q = as_points(x, 1)[:, 0]
        out = np.empty(len(q))
        fn = KERNELS[self.kernel]
        h = self.bandwidth
        for start in range(0, len(q), 2048):
            u = (q[start : start + 2048, None] - self.data[None, :]) / h
            out[start : start + 2048] = fn(u).sum(axis=1)
        return out / (len(self.data) * h)


def fit_kde(points, kernel: str = "gaussian") -> KernelDensity:
    return KernelDensity(points, kernel)


class DensityBayes(TwoClassBayes):
    """Bayes rule on two estimated densities (kernel or Voronoi)."""

    def __init__(self, kind: str, f1, f2, priors):
        self.kind = kind
        self.densities = (f1, f2)
        self.priors = priors

    def density_pair(self, x) -> tuple[np.ndarray, np.ndarray]:
        return self.densities[0](x), self.densities[1](x)

    def log_scores(self, x):
        f1, f2 = self.density_pair(x)
        return _log(f1) + math.log(self.priors[0]), _log(f2) + math.log(self.priors[1])


def fit_kde_bayes(class1, class2, kernel: str = "gaussian", priors=None) -> DensityBayes:
    k1, k2 = KernelDensity(class1, kernel), KernelDensity(class2, kernel)
    kind = "kde_gaussian" if kernel == "gaussian" else "kde_epanechnikov"
    return DensityBayes(kind, k1, k2, _priors(len(k1.data), len(k2.data), priors))


def fit_voronoi_bayes(
    class1,
    class2,
    window1: SupportWindow,
    window2: SupportWindow,
    k: int = 1,
    n_uniforms: int = 1000,
    r: float | None = None,
    seed=0,
    priors=None,
) -> DensityBayes:
    """Corrected Voronoi densities for both classes; reference streams ``(seed, 1)`` and ``(seed, 2)``."""
    t1 = class1 if isinstance(class1, vd.TrainingSet) else vd.TrainingSet(class1, 1)
    t2 = class2 if isinstance(class2, vd.TrainingSet) else vd.TrainingSet(class2, 2)
    m1 = vd.fit(t1, window1, n_uniforms, k=k, r=r, seed=(seed, 1))
    m2 = vd.fit(t2, window2, n_uniforms, k=k, r=r, seed=(seed, 2))
    return DensityBayes("voronoi_nn", m1, m2, _priors(t1.n, t2.n, priors))
