"""Synthetic layered scenes with known ground truth."""
from dataclasses import dataclass

import numpy as np

from .core import ColumnAssignment, EngineConfig, GroundPlaneModel, Label, N_LABELS, SceneLabeling, render_maps

TRUE_SCORE = 0.8
# depth cost saturates this many levels away from the true disparity
DEPTH_COST_SPAN = 4


@dataclass(frozen=True)
class SynthScene:
    labeling: SceneLabeling
    labels: np.ndarray
    disparity: np.ndarray
    scores: np.ndarray
    volume: np.ndarray
    config: EngineConfig
    seed: int

    @property
    def model(self) -> GroundPlaneModel:
        return self.labeling.model


def default_config(height, disparities, beta=1.0, patch_size=11) -> EngineConfig:
    """Horizon a third of the way down; ground reaches D - 1 at the bottom row."""
    horizon = float(max(1, round(height / 3)))
    slope = (disparities - 1) / max(height - horizon, 1.0)
    return EngineConfig(disparities=disparities, patch_size=patch_size, beta=beta,
                        horizon_row=horizon, ground_slope=slope)


def _walk(rng, n, lo, hi, start=None):
    """Integer random walk with steps in {-1, 0, 1}, clipped to [lo, hi]."""
    lo, hi = int(lo), int(max(lo, hi))
    v = int(rng.integers(lo, hi + 1)) if start is None else start
    out = np.empty(n, dtype=int)
    for i in range(n):
        out[i] = v
        v = int(np.clip(v + rng.integers(-1, 2), lo, hi))
    return out


def _columns(rng, width, height, model):
    profile = model.profile(height)
    horizon = int(np.clip(np.ceil(model.horizon_row), 1, height))
    # rows whose ground disparity leaves room for a building disparity
    roomy = np.flatnonzero(profile >= 3) + 1
    first_roomy = int(roomy[0]) if roomy.size else height

    span = max(height - first_roomy, 0)
    base_h1 = _walk(rng, width, first_roomy, first_roomy + span // 2)
    sky_h3 = _walk(rng, width, max(1, horizon // 3), max(1, horizon - 1))

    bld_disp = np.empty(width, dtype=int)
    i = 0
    while i < width:
        run = int(rng.integers(6, 16))
        bld_disp[i:i + run] = int(rng.integers(1, max(2, int(profile[first_roomy - 1]))))
        i += run

    h1, h2 = base_h1.copy(), base_h1.copy()
    l2 = np.full(width, int(Label.VEHICLE))
    n_obj = max(1, width // 16)
    for _ in range(n_obj):
        w = int(rng.integers(3, max(4, width // 6)))
        x0 = int(rng.integers(0, max(1, width - w)))
        bottom = int(rng.integers(first_roomy, height + 1))
        tall = int(rng.integers(3, max(4, height // 3)))
        lab = int(rng.choice([Label.VEHICLE, Label.PEDESTRIAN]))
        sl = slice(x0, x0 + w)
        h1[sl] = bottom
        h2[sl] = max(1, bottom - tall)
        l2[sl] = lab

    cols = []
    for x in range(width):
        a1, a2 = int(h1[x]), int(h2[x])
        a3 = min(int(sky_h3[x]), a2)
        d2 = model.ground_disparity(a1)
        d3 = min(int(bld_disp[x]), d2 - 1)
        if a3 == a2 or d3 < 1:
            a3, d3 = a2, 0
        lab = Label(int(l2[x])) if a2 < a1 else Label.VEHICLE
        cols.append(ColumnAssignment(a1, a2, a3, lab, d3))
    return cols


def scores_from_labels(labels, sigma, rng):
    """Softened one-hot probabilities with additive Gaussian noise."""
    height, width = labels.shape
    off = (1.0 - TRUE_SCORE) / (N_LABELS - 1)
    scores = np.full((N_LABELS, height, width), off)
    np.put_along_axis(scores, labels[None].astype(np.intp), TRUE_SCORE, axis=0)
    if sigma > 0:
        scores = np.clip(scores + sigma * rng.standard_normal(scores.shape), 1e-3, None)
        scores /= scores.sum(axis=0, keepdims=True)
    return scores


def volume_from_disparity(disp, disparities, sigma, rng):
    """Cost rising linearly with distance from the true level, plus noise."""
    levels = np.arange(disparities)[:, None, None]
    vol = np.minimum(np.abs(levels - disp[None]), DEPTH_COST_SPAN) / DEPTH_COST_SPAN
    if sigma > 0:
        vol = np.maximum(vol + sigma * rng.standard_normal(vol.shape), 0.0)
    return vol.astype(np.float64)


def generate(width=64, height=48, disparities=16, sigma_app=0.0, sigma_depth=0.0, seed=0,
             config: EngineConfig | None = None) -> SynthScene:
    """Sample a feasible scene and matching score map and cost volume.

    Column boundaries follow small random walks so neighbouring columns look
    alike; objects are rectangles standing on the ground. Output depends
    only on the arguments.
    """
    if min(width, height) < 1 or disparities < 2:
        raise ValueError("need width, height >= 1 and disparities >= 2")
    if sigma_app < 0 or sigma_depth < 0:
        raise ValueError("noise levels must be >= 0")
    cfg = default_config(height, disparities) if config is None else config
    model = cfg.ground_model
    rng = np.random.default_rng(seed)
    sl = SceneLabeling(_columns(rng, width, height, model), model, height)
    sl.validate()
    labels, disp = render_maps(sl)
    scores = scores_from_labels(labels, sigma_app, rng)
    volume = volume_from_disparity(disp, disparities, sigma_depth, rng)
    return SynthScene(sl, labels, disp, scores, volume, cfg, seed)
