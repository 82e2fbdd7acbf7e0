"""Input checks shared by the estimators and the functional API."""
import numpy as np
from sklearn.utils.validation import check_array

from .core import N_LABELS


def check_gray_image(img, name="image"):
    """Return ``img`` as a float64 (H, W) array with values in [0, 1]."""
    img = check_array(img, dtype=np.float64, ensure_2d=True, ensure_all_finite=True,
                      input_name=name)
    if img.min(initial=0.0) < 0.0 or img.max(initial=0.0) > 1.0:
        raise ValueError(f"{name}: intensities must lie in [0, 1]")
    return img


def check_stereo_pair(left, right):
    left = check_gray_image(left, "left")
    right = check_gray_image(right, "right")
    if left.shape != right.shape:
        raise ValueError(f"stereo pair shape mismatch: left {left.shape} vs right {right.shape}")
    return left, right


def split_stereo_pair(X):
    """Accept ``(left, right)`` or an array stacked on axis 0."""
    if isinstance(X, (tuple, list)) and len(X) == 2:
        return check_stereo_pair(X[0], X[1])
    X = np.asarray(X)
    if X.ndim != 3 or X.shape[0] != 2:
        raise ValueError(f"expected a stereo pair (left, right) or a (2, H, W) array, got shape {X.shape}")
    return check_stereo_pair(X[0], X[1])


def check_volume(vol, name="volume", channels=None, nonneg=True):
    """Validate a (C, H, W) float tensor."""
    vol = check_array(vol, dtype=np.float64, allow_nd=True, ensure_2d=False,
                      ensure_all_finite=True, input_name=name)
    if vol.ndim != 3:
        raise ValueError(f"{name}: expected a (C, H, W) array, got shape {vol.shape}")
    if channels is not None and vol.shape[0] != channels:
        raise ValueError(f"{name}: expected {channels} channels, got {vol.shape[0]}")
    if nonneg and vol.size and vol.min() < 0:
        raise ValueError(f"{name}: entries must be non-negative")
    return vol


def check_score_map(scores, atol=1e-3):
    """Validate per-pixel label probabilities of shape (5, H, W).

    Errors name the first offending pixel as ``(x, y)``, 1-based.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 3 or scores.shape[0] != N_LABELS:
        raise ValueError(f"score map: expected shape ({N_LABELS}, H, W), got {scores.shape}")
    bad = ~np.isfinite(scores) | (scores < 0) | (scores > 1)
    if bad.any():
        l, y, x = np.argwhere(bad)[0]
        raise ValueError(f"score map: invalid score {scores[l, y, x]!r} for label {l} "
                         f"at pixel (x={x + 1}, y={y + 1})")
    sums = scores.sum(axis=0)
    off = np.abs(sums - 1.0) > atol
    if off.any():
        y, x = np.argwhere(off)[0]
        raise ValueError(f"score map: scores at pixel (x={x + 1}, y={y + 1}) sum to "
                         f"{sums[y, x]:.6f}, not 1")
    return scores
