import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voronoi_bayes.spaces import (
    SupportWindow,
    as_points,
    derive_symmetric_window,
    distance,
    sample_uniform,
    window_measure,
)


class TestSymmetricWindow:
    @pytest.mark.parametrize(
        "samples, k",
        [([-2, 1, 3], 3), ([0.5], 0.5), ([-7, -1], 7)],
    )
    def test_examples(self, samples, k):
        assert derive_symmetric_window(samples) == SupportWindow.interval(-k, k)

    def test_empty(self):
        with pytest.raises(ValueError, match="empty training set"):
            derive_symmetric_window([])


class TestMeasure:
    def test_interval(self):
        assert window_measure(SupportWindow.interval(-2, 9)) == 11

    def test_annulus(self):
        assert window_measure(SupportWindow.annulus(4, 11)) == pytest.approx(329.867, abs=1e-3)

    def test_circle(self):
        assert window_measure(SupportWindow.circle(1)) == pytest.approx(2 * math.pi)

    def test_rectangle(self):
        assert SupportWindow.rectangle((0, 0), (2, 3)).measure() == 6

    @pytest.mark.parametrize(
        "make",
        [
            lambda: SupportWindow.interval(1, 1),
            lambda: SupportWindow.rectangle((0, 0), (1, 0)),
            lambda: SupportWindow.annulus(3, 2),
            lambda: SupportWindow.circle(0),
        ],
    )
    def test_degenerate_windows_rejected(self, make):
        with pytest.raises(ValueError):
            make()


WINDOWS = [
    SupportWindow.interval(-2, 9),
    SupportWindow.rectangle((-1, 0), (1, 5)),
    SupportWindow.annulus(4, 11),
    SupportWindow.disc(18),
    SupportWindow.circle(1),
]


class TestSampleUniform:
    def test_deterministic(self):
        w = SupportWindow.interval(0, 1)
        a = sample_uniform(w, 5, 7)
        np.testing.assert_array_equal(a, sample_uniform(w, 5, 7))
        assert a.shape == (5, 1)
        assert np.all((a >= 0) & (a <= 1))

    def test_circle_points_have_unit_norm(self):
        pts = sample_uniform(SupportWindow.circle(1), 1000, 3)
        np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)

    def test_annulus_area_fraction(self):
        pts = sample_uniform(SupportWindow.annulus(4, 11), 100_000, 5)
        frac = np.mean(np.linalg.norm(pts, axis=1) < 8)
        assert frac == pytest.approx((64 - 16) / (121 - 16), abs=0.01)

    @pytest.mark.parametrize("w", WINDOWS, ids=lambda w: w.kind)
    def test_all_points_inside(self, w):
        assert w.contains(sample_uniform(w, 100_000, 11)).all()

    def test_interval_mean(self):
        l1, l2 = -2.0, 9.0
        x = sample_uniform(SupportWindow.interval(l1, l2), 100_000, 13)[:, 0]
        se = (l2 - l1) / math.sqrt(12) / math.sqrt(len(x))
        assert abs(x.mean() - (l1 + l2) / 2) < 4 * se

    def test_zero_count(self):
        with pytest.raises(ValueError):
            sample_uniform(WINDOWS[0], 0, 1)


class TestDistance:
    def test_line(self):
        assert distance("euclidean", [0], [3]) == 3

    def test_plane(self):
        assert distance("euclidean", (0, 0), (3, 4)) == 5

    def test_quarter_arc(self):
        assert distance("arc", (1, 0), (0, 1)) == pytest.approx(math.pi / 2)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            distance("euclidean", (0, 0), (1,))

    @pytest.mark.parametrize("metric", ["euclidean", "arc"])
    def test_metric_axioms(self, metric, rng):
        if metric == "arc":
            theta = rng.uniform(0, 2 * math.pi, size=(1000, 3))
            pts = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        else:
            pts = rng.normal(size=(1000, 3, 2))
        for a, b, c in pts:
            dab, dbc, dac = distance(metric, a, b), distance(metric, b, c), distance(metric, a, c)
            assert dab >= 0
            assert dab == pytest.approx(distance(metric, b, a), abs=1e-12)
            assert dac <= dab + dbc + 1e-12
            assert distance(metric, a, a) == pytest.approx(0, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=30))
def test_symmetric_window_covers_sample(xs):
    w = derive_symmetric_window(xs) if max(map(abs, xs)) > 0 else None
    if w is not None:
        assert w.contains(xs).all()


def test_as_points_shapes():
    assert as_points(3.0).shape == (1, 1)
    assert as_points([1, 2, 3]).shape == (3, 1)
    assert as_points((1, 2), dim=2).shape == (1, 2)
    with pytest.raises(ValueError):
        as_points([[1, 2, 3]])
