"""Appearance cost from per-pixel class probabilities.

Score maps and appearance costs share the ``(5, H, W)`` layout, channel
order given by ``Label`` codes.
"""
import numpy as np

from .core import GroundPlaneModel, Label, N_LABELS
from .validation import check_gray_image, check_score_map

DEFAULT_SCORE_FLOOR = 1e-6


def appearance_from_scores(scores, beta=1.0, eps=DEFAULT_SCORE_FLOOR):
    """``-beta * log(max(f, eps))`` per pixel and label."""
    if not (np.isfinite(beta) and beta > 0):
        raise ValueError(f"beta must be finite and > 0, got {beta}")
    if not (np.isfinite(eps) and eps > 0):
        raise ValueError(f"eps must be finite and > 0, got {eps}")
    scores = check_score_map(scores)
    cost = -beta * np.log(np.maximum(scores, eps))
    # log(1) may come back as -0.0
    return np.maximum(cost, 0.0)


# Row priors, columns in Label order: ground, vehicle, pedestrian, building, sky.
# Bands are keyed on (y - horizon_row) / H.
ROW_BANDS = (
    (-np.inf, -0.15, (0.02, 0.05, 0.03, 0.35, 0.55)),   # far above the horizon
    (-0.15, 0.0, (0.05, 0.20, 0.10, 0.45, 0.20)),       # just above
    (0.0, 0.10, (0.35, 0.30, 0.15, 0.15, 0.05)),        # just below
    (0.10, np.inf, (0.70, 0.15, 0.10, 0.04, 0.01)),     # road region
)
# Sky likelihood grows with the pixel's brightness rank q in [0, 1].
SKY_BRIGHTNESS_GAIN = 1.0


def row_priors(height, model: GroundPlaneModel):
    """(H, 5) prior table, one row per image row."""
    y = np.arange(1, height + 1, dtype=np.float64)
    t = (y - model.horizon_row) / height
    out = np.empty((height, N_LABELS))
    for lo, hi, prior in ROW_BANDS:
        out[(t >= lo) & (t < hi)] = prior
    return out


def brightness_rank(img):
    """Fraction of pixels strictly darker than each pixel."""
    flat = np.sort(img, axis=None)
    return np.searchsorted(flat, img, side="left") / img.size


def heuristic_scores(img, model: GroundPlaneModel):
    """Demo-grade class probabilities from row position and brightness.

    Each pixel starts from the row prior of its band; the sky entry is then
    scaled by ``0.5 + q`` where ``q`` is the pixel's brightness rank, and the
    five entries are renormalized. Deterministic; no learned parameters.
    """
    img = check_gray_image(img)
    height, width = img.shape
    prior = row_priors(height, model).T[:, :, None]
    scores = np.broadcast_to(prior, (N_LABELS, height, width)).copy()
    q = brightness_rank(img)
    scores[Label.SKY] *= 0.5 + SKY_BRIGHTNESS_GAIN * q
    scores /= scores.sum(axis=0, keepdims=True)
    return scores
