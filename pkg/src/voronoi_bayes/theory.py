"""Order-statistic moments of uniform spacings and their Monte Carlo checks.

``T = (n/m) (U_(r+m) - U_(r))`` for uniform order statistics and
``S = (n/m) (X_(r+m) - X_(r))`` for a general continuous law. Indices are
1-based, as in order-statistic notation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .distributions import Distribution

AGREEMENT_SE = 4.0
_CHUNK = 2000

CSV_FIELDS = ("n", "m", "r", "replications", "emp_mean", "th_mean", "emp_var", "th_var", "mean_z", "var_pass")


def expected_uniform_order_stat(n: int, i: int, exact: bool = False):
    """``E[U_(i)] = i / (n + 1)``."""
    if not 1 <= i <= n:
        raise ValueError(f"index {i} out of range for n={n}")
    value = Fraction(i, n + 1)
    return value if exact else float(value)


def expected_uniform_product(n: int, i: int, j: int, exact: bool = False):
    """``E[U_(i) U_(j)] = i (j + 1) / ((n + 1)(n + 2))`` for ``i <= j``."""
    if not 1 <= i <= j <= n:
        raise ValueError(f"need 1 <= i <= j <= n, got i={i}, j={j}, n={n}")
    value = Fraction(i * (j + 1), (n + 1) * (n + 2))
    return value if exact else float(value)


def spacing_moments_uniform(n: int, m: int, exact: bool = False):
    """Mean and variance of ``T_{r,m}``; neither depends on ``r``."""
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    mean = Fraction(n, n + 1)
    var = Fraction(n * n * (n - m + 1), m * (n + 1) ** 2 * (n + 2))
    return (mean, var) if exact else (float(mean), float(var))


def spacing_moments_from_products(n: int, r: int, m: int) -> tuple[Fraction, Fraction]:
    """Mean and variance of ``T_{r,m}`` assembled from first and mixed moments.

    Independent route to :func:`spacing_moments_uniform`, in exact arithmetic.
    """
    hi, lo = r + m, r
    e_hi = expected_uniform_order_stat(n, hi, exact=True)
    e_lo = expected_uniform_order_stat(n, lo, exact=True)
    second = (
        expected_uniform_product(n, hi, hi, exact=True)
        + expected_uniform_product(n, lo, lo, exact=True)
        - 2 * expected_uniform_product(n, lo, hi, exact=True)
    )
    scale = Fraction(n, m)
    mean = scale * (e_hi - e_lo)
    return mean, scale**2 * second - mean**2


@dataclass
class MomentReport:
    n: int
    m: int
    r: int
    replications: int
    emp_mean: float
    th_mean: float
    emp_var: float
    th_var: float
    se_mean: float
    se_var: float
    mean_pass: bool
    var_pass: bool

    @property
    def mean_z(self) -> float:
        return (self.emp_mean - self.th_mean) / self.se_mean if self.se_mean > 0 else math.inf

    @property
    def var_z(self) -> float:
        return (self.emp_var - self.th_var) / self.se_var if self.se_var > 0 else math.inf

    def as_row(self) -> dict:
        row = {k: v for k, v in asdict(self).items() if k in CSV_FIELDS}
        row["mean_z"] = self.mean_z
        row["var_pass"] = "true" if self.var_pass else "false"
        return {k: row[k] for k in CSV_FIELDS}


def write_reports(reports, path_or_file) -> None:
    """CSV rows ``n, m, r, replications, emp_mean, th_mean, emp_var, th_var, mean_z, var_pass``."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        for rep in reports:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in rep.as_row().items()})
    finally:
        if own:
            fh.close()


def _moments(values: np.ndarray) -> tuple[float, float, float, float]:
    """Sample mean and variance with their standard errors."""
    reps = len(values)
    mean = float(values.mean())
    centred = values - mean
    var = float(centred.var(ddof=1))
    m4 = float(np.mean(centred**4))
    se_var = math.sqrt(max(m4 - var * var, 0.0) / reps)
    return mean, var, float(values.std(ddof=1)) / math.sqrt(reps), se_var


def _simulate_spacings(draw, n: int, r: int, m: int, replications: int, seed) -> np.ndarray:
    """Scaled spacings from ``replications`` sorted samples of size ``n``.

    ``draw(rng, shape)`` produces raw samples; replications are generated in
    fixed-size chunks so the stream depends only on ``seed``.
    """
    rng = np.random.default_rng(seed)
    out = np.empty(replications)
    for start in range(0, replications, _CHUNK):
        reps = min(_CHUNK, replications - start)
        x = draw(rng, (reps, n))
        part = np.partition(x, (r - 1, r + m - 1), axis=1)
        out[start : start + reps] = (n / m) * (part[:, r + m - 1] - part[:, r - 1])
    return out


def verify_uniform_spacing(n: int, r: int, m: int, replications: int = 100_000, seed=0) -> MomentReport:
    """Simulate ``T_{r,m}`` and compare with the closed-form moments at 4 standard errors."""
    if not (1 <= r and r + m <= n and m >= 1):
        raise ValueError(f"need 1 <= r and r + m <= n, got r={r}, m={m}, n={n}")
    if replications < 2:
        raise ValueError("need at least 2 replications")
    t = _simulate_spacings(lambda rng, shape: rng.uniform(size=shape), n, r, m, replications, seed)
    mean, var, se_mean, se_var = _moments(t)
    th_mean, th_var = spacing_moments_uniform(n, m)
    return MomentReport(
        n, m, r, replications, mean, th_mean, var, th_var, se_mean, se_var,
        abs(mean - th_mean) <= AGREEMENT_SE * se_mean,
        abs(var - th_var) <= AGREEMENT_SE * se_var,
    )


def quantile_index(q: float, n: int, m: int) -> int:
    """``round(q n)`` clamped to ``[1, n - m]``."""
    return int(min(max(round(q * n), 1), n - m))


def verify_density_spacing(
    dist: Distribution,
    q: float,
    n: int,
    m: int,
    replications: int = 10_000,
    seed=0,
    rel_tol: float = 0.05,
) -> MomentReport:
    """Simulate ``S_{r,m}`` at the ``q``-quantile and compare with ``1/f`` and ``1/(m f^2)``.

    Agreement means within ``max(4 s.e., rel_tol * theory)``.
    """
    if dist.dim != 1:
        raise ValueError("density spacing checks are 1D only")
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    x0 = dist.ppf(q)
    f0 = float(dist.pdf([x0])[0])
    if not f0 > 0:
        raise ValueError(f"density is zero at the {q}-quantile x0={x0}")
    r = quantile_index(q, n, m)

    def draw(rng, shape):
        return dist._draw(rng, shape[0] * shape[1]).reshape(shape)

    s = _simulate_spacings(draw, n, r, m, replications, seed)
    mean, var, se_mean, se_var = _moments(s)
    th_mean, th_var = 1.0 / f0, 1.0 / (m * f0 * f0)
    return MomentReport(
        n, m, r, replications, mean, th_mean, var, th_var, se_mean, se_var,
        abs(mean - th_mean) <= max(AGREEMENT_SE * se_mean, rel_tol * th_mean),
        abs(var - th_var) <= max(AGREEMENT_SE * se_var, rel_tol * th_var),
    )
