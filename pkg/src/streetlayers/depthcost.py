"""Box-filtered absolute-difference matching cost.

Volumes are laid out ``(D, H, W)``: slice ``d`` holds the cost of matching
left pixel ``(x, y)`` against right pixel ``(x - d, y)``.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .core import EngineConfig
from .validation import check_stereo_pair, split_stereo_pair

# pixel cost when the shifted right pixel falls off the image
OUT_OF_RANGE_COST = 1.0


def _matching_params(cfg):
    """``(disparities, patch_size)`` from an EngineConfig or a plain pair.

    The plain pair form admits a single disparity level, which EngineConfig
    rejects.
    """
    if isinstance(cfg, EngineConfig):
        return cfg.disparities, cfg.patch_size
    disparities, patch_size = (int(v) for v in cfg)
    if disparities < 1:
        raise ValueError(f"disparity count must be >= 1, got {disparities}")
    if patch_size < 1 or patch_size % 2 == 0:
        raise ValueError(f"patch_size must be an odd integer >= 1, got {patch_size}")
    return disparities, patch_size


def _check_inputs(left, right, disparities):
    left, right = check_stereo_pair(left, right)
    width = left.shape[1]
    if disparities > width:
        raise ValueError(f"disparity count {disparities} exceeds image width {width}")
    return left, right


def pixel_costs(left, right, disparities):
    """Unfiltered ``|I_L(x, y) - I_R(x - d, y)|`` for every level."""
    height, width = left.shape
    out = np.full((disparities, height, width), OUT_OF_RANGE_COST)
    for d in range(disparities):
        out[d, :, d:] = np.abs(left[:, d:] - right[:, :width - d])
    return out


def _sliding_sum(a, radius, axis):
    """Clamped window sum along ``axis`` by a running add/subtract pass."""
    a = np.moveaxis(a, axis, 0)
    n = a.shape[0]
    out = np.empty_like(a)
    acc = a[:min(radius + 1, n)].sum(axis=0)
    out[0] = acc
    for i in range(1, n):
        if i + radius < n:
            acc = acc + a[i + radius]
        if i - radius - 1 >= 0:
            acc = acc - a[i - radius - 1]
        out[i] = acc
    return np.moveaxis(out, 0, axis)


def _window_counts(n, radius):
    idx = np.arange(n)
    return (np.minimum(idx + radius, n - 1) - np.maximum(idx - radius, 0) + 1).astype(np.float64)


def box_filter(vol, patch_size):
    """Mean over a ``patch_size`` square, shrinking the window at borders."""
    r = patch_size // 2
    height, width = vol.shape[-2:]
    s = _sliding_sum(vol, r, axis=-1)
    s = _sliding_sum(s, r, axis=-2)
    n = _window_counts(height, r)[:, None] * _window_counts(width, r)[None, :]
    return s / n


def build_cost_volume(left, right, cfg):
    disparities, patch_size = _matching_params(cfg)
    left, right = _check_inputs(left, right, disparities)
    vol = box_filter(pixel_costs(left, right, disparities), patch_size)
    # running sums can dip a hair below zero
    np.maximum(vol, 0.0, out=vol)
    return vol


def naive_cost_volume(left, right, cfg):
    """Direct per-pixel patch average; reference for ``build_cost_volume``."""
    disparities, patch_size = _matching_params(cfg)
    left, right = _check_inputs(left, right, disparities)
    height, width = left.shape
    r = patch_size // 2
    vol = np.zeros((disparities, height, width))
    for d in range(disparities):
        for y in range(height):
            for x in range(width):
                total, n = 0.0, 0
                for yy in range(max(0, y - r), min(height, y + r + 1)):
                    for xx in range(max(0, x - r), min(width, x + r + 1)):
                        if xx - d >= 0:
                            total += abs(left[yy, xx] - right[yy, xx - d])
                        else:
                            total += OUT_OF_RANGE_COST
                        n += 1
                vol[d, y, x] = total / n
    return vol


class StereoCostVolume(TransformerMixin, BaseEstimator):
    """Transformer from a rectified stereo pair to a matching-cost volume.

    ``transform`` takes ``(left, right)`` or a ``(2, H, W)`` array and returns
    a ``(disparities, H, W)`` volume.
    """

    def __init__(self, disparities=64, patch_size=11):
        self.disparities = disparities
        self.patch_size = patch_size

    def fit(self, X=None, y=None):
        self.config_ = EngineConfig(disparities=self.disparities, patch_size=self.patch_size)
        return self

    def transform(self, X):
        check_is_fitted(self)
        left, right = split_stereo_pair(X)
        return build_cost_volume(left, right, self.config_)
