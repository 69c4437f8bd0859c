"""Windows, patterns, and geometric primitives."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppscores.geometry import (PointPattern, RGrid, Window, area, erode,
                               pairwise_distances, translation_overlap,
                               uniform_rgrid)

W10 = Window(0.0, 10.0, 0.0, 10.0)


def test_area_examples():
    assert area(W10) == 100.0
    assert area(Window(-5.0, 5.0, -5.0, 5.0)) == 100.0
    assert area(Window(0.0, 1.0, 0.0, 2.0)) == 2.0


def test_window_validation():
    with pytest.raises(ValueError):
        Window(0.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        Window(1.0, 0.0, 0.0, 1.0)


def test_translation_overlap_examples():
    assert translation_overlap(W10, 0.0, 0.0) == 100.0
    assert translation_overlap(W10, 5.0, 0.0) == 50.0
    assert translation_overlap(W10, 3.0, 4.0) == 42.0


def test_translation_overlap_rasterized_oracle():
    # brute-force overlap of W and W + (dx, dy) on a fine raster
    dx, dy = 3.0, 4.0
    n = 800
    xs = np.linspace(0.0, 10.0, n, endpoint=False) + 10.0 / (2 * n)
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    inside_shift = ((gx >= dx) & (gx <= 10.0 + dx)
                    & (gy >= dy) & (gy <= 10.0 + dy))
    approx = inside_shift.mean() * 100.0
    assert abs(approx - translation_overlap(W10, dx, dy)) < 0.1


@settings(deadline=None, max_examples=50)
@given(st.floats(-15, 15), st.floats(-15, 15))
def test_translation_overlap_symmetry_and_bounds(dx, dy):
    a = translation_overlap(W10, dx, dy)
    b = translation_overlap(W10, -dx, -dy)
    assert a == b
    assert 0.0 <= a <= area(W10)
    # full overlap only for shifts below float resolution of the side length
    if max(abs(dx), abs(dy)) > 1e-12:
        assert a < area(W10)


def test_erode_examples():
    assert erode(W10, 1.0) == Window(1.0, 9.0, 1.0, 9.0)
    assert erode(W10, 0.0) == W10
    assert erode(W10, 5.0) is None


@settings(deadline=None, max_examples=50)
@given(st.floats(0, 3), st.floats(0, 3))
def test_erode_composition(a, b):
    inner = erode(W10, a)
    one = erode(inner, b) if inner is not None else None
    two = erode(W10, a + b)
    if one is not None and two is not None:
        for u, v in zip((one.xmin, one.xmax, one.ymin, one.ymax),
                        (two.xmin, two.xmax, two.ymin, two.ymax)):
            assert abs(u - v) < 1e-12


def test_pairwise_distances_examples():
    p = PointPattern(np.array([[0.0, 0.0], [3.0, 4.0]]), W10)
    assert pairwise_distances(p).tolist() == [5.0]
    single = PointPattern(np.array([[1.0, 1.0]]), W10)
    assert pairwise_distances(single).size == 0
    collinear = PointPattern(np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]), W10)
    assert sorted(pairwise_distances(collinear).tolist()) == [1.0, 1.0, 2.0]


def test_pattern_inside_window_enforced():
    with pytest.raises(ValueError):
        PointPattern(np.array([[11.0, 5.0]]), W10)
    # boundary points are inside
    PointPattern(np.array([[0.0, 0.0], [10.0, 10.0]]), W10)


def test_pattern_validate_flags_duplicates():
    p = PointPattern(np.array([[1.0, 1.0], [1.0, 1.0], [2.0, 2.0]]), W10)
    report = p.validate()
    assert report["n_duplicates"] >= 1


def test_rgrid_invariants():
    with pytest.raises(ValueError):
        RGrid(np.array([1.0, 1.0, 2.0]))
    with pytest.raises(ValueError):
        RGrid(np.array([0.5, 1.0]), weights=np.array([-1.0, 1.0]))
    g = uniform_rgrid(2.5, 64)
    assert len(g) == 64
    assert g.values[0] > 0.0
    assert np.isclose(g.r_max, 2.5)
    # trapezoid weights integrate a constant to the grid span
    assert np.isclose(np.sum(g.quad_weights()), g.values[-1] - g.values[0])


def test_pattern_translate():
    p = PointPattern(np.array([[1.0, 2.0]]), W10)
    q = p.translate(3.0, -1.0)
    assert np.allclose(q.points, [[4.0, 1.0]])
    assert q.window == Window(3.0, 13.0, -1.0, 9.0)
