import numpy as np
import pytest

from streetlayers.core import EngineConfig
from streetlayers.depthcost import StereoCostVolume, box_filter, build_cost_volume, naive_cost_volume


def cfg(d, patch):
    return EngineConfig(disparities=d, patch_size=patch)


def test_identical_images_zero_shift_is_zero(rng):
    img = rng.random((6, 9))
    vol = build_cost_volume(img, img, cfg(4, 3))
    assert np.all(vol[0] == 0)


def test_constant_images_match_everywhere_inside():
    img = np.full((5, 8), 0.3)
    vol = build_cost_volume(img, img, cfg(3, 3))
    # beyond the left border every shift is an exact match
    assert np.allclose(vol[:, :, 3:], 0)
    assert np.all(vol[0] == 0)


def test_single_pixel_no_aggregation():
    vol = naive_cost_volume(np.array([[0.7]]), np.array([[0.2]]), (1, 1))
    assert vol.shape == (1, 1, 1)
    assert vol[0, 0, 0] == pytest.approx(0.5)
    assert build_cost_volume(np.array([[0.7]]), np.array([[0.2]]), (1, 1))[0, 0, 0] == pytest.approx(0.5)


def test_matches_naive_7x7(rng):
    left, right = rng.random((7, 7)), rng.random((7, 7))
    c = cfg(3, 3)
    assert np.max(np.abs(build_cost_volume(left, right, c) - naive_cost_volume(left, right, c))) <= 1e-5


@pytest.mark.parametrize("patch", [1, 3, 5, 11])
def test_matches_naive_random(rng, patch):
    for _ in range(5):
        h, w = int(rng.integers(1, 17)), int(rng.integers(2, 17))
        d = int(rng.integers(2, min(8, w) + 1))
        left, right = rng.random((h, w)), rng.random((h, w))
        c = cfg(d, patch)
        assert np.max(np.abs(build_cost_volume(left, right, c) - naive_cost_volume(left, right, c))) <= 1e-5


def test_out_of_range_costs_one():
    left = np.zeros((1, 4))
    right = np.zeros((1, 4))
    vol = build_cost_volume(left, right, cfg(3, 1))
    assert vol[2, 0].tolist() == [1.0, 1.0, 0.0, 0.0]


def test_border_windows_shrink():
    a = np.zeros((1, 1, 5))
    a[0, 0, 0] = 3.0
    out = box_filter(a, 3)
    # left border window holds 2 pixels, the next one 3
    assert out[0, 0, 0] == pytest.approx(1.5)
    assert out[0, 0, 1] == pytest.approx(1.0)
    assert out[0, 0, 2] == 0


def test_nonnegative_finite(rng):
    vol = build_cost_volume(rng.random((12, 15)), rng.random((12, 15)), cfg(6, 5))
    assert np.isfinite(vol).all() and (vol >= 0).all()


@pytest.mark.parametrize("d0", [1, 2, 4])
def test_translation_recovers_shift(rng, d0):
    h, w, patch = 14, 30, 3
    left = rng.random((h, w))
    right = rng.random((h, w))
    right[:, :w - d0] = left[:, d0:]       # right(x) = left(x + d0)
    vol = build_cost_volume(left, right, cfg(6, patch))
    m = patch + d0
    inner = vol[:, m:h - m, m:w - m]
    assert np.all(np.argmin(inner, axis=0) == d0)


def test_errors():
    with pytest.raises(ValueError, match=r"\(4, 5\).*\(4, 6\)"):
        build_cost_volume(np.zeros((4, 5)), np.zeros((4, 6)), cfg(2, 1))
    with pytest.raises(ValueError, match="exceeds"):
        build_cost_volume(np.zeros((4, 3)), np.zeros((4, 3)), cfg(4, 1))


def test_transformer(rng):
    pair = rng.random((2, 6, 8))
    t = StereoCostVolume(disparities=3, patch_size=3)
    assert t.get_params() == {"disparities": 3, "patch_size": 3}
    vol = t.fit_transform(pair)
    assert np.allclose(vol, build_cost_volume(pair[0], pair[1], cfg(3, 3)))
