"""scikit-learn style front end for the full labeling pipeline."""
import time
import warnings

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .appcost import appearance_from_scores, heuristic_scores
from .core import EngineConfig, render_maps
from .depthcost import build_cost_volume
from .infer import infer_scene
from .metrics import evaluate
from .validation import check_volume, split_stereo_pair


class DemoQualityWarning(UserWarning):
    """Raised when the built-in heuristic stands in for real class scores."""


def label_scene(cfg: EngineConfig, left=None, right=None, scores=None, cost_volume=None,
                n_jobs=None, timings=None):
    """Cost volume + appearance cost + per-column inference.

    Either a stereo pair or a precomputed ``cost_volume`` must be given.
    Without ``scores`` the heuristic scorer is used on the left image.
    Stage times in seconds are added to ``timings`` when it is a dict.
    """
    timings = {} if timings is None else timings
    model = cfg.ground_model
    t0 = time.perf_counter()
    if cost_volume is None:
        if left is None or right is None:
            raise ValueError("need a stereo pair or a cost volume")
        cost_volume = build_cost_volume(left, right, cfg)
    else:
        cost_volume = check_volume(cost_volume, "cost volume", channels=cfg.disparities)
    t1 = time.perf_counter()
    if scores is None:
        if left is None:
            raise ValueError("heuristic scores need the left image")
        warnings.warn("no class scores given; using the heuristic scorer (demo quality)",
                      DemoQualityWarning, stacklevel=2)
        scores = heuristic_scores(left, model)
    appearance = appearance_from_scores(scores, cfg.beta, cfg.score_floor)
    if appearance.shape[1:] != cost_volume.shape[1:]:
        raise ValueError(f"score map {scores.shape[1:]} and cost volume "
                         f"{cost_volume.shape[1:]} cover different image sizes")
    t2 = time.perf_counter()
    timings["cost_volume"] = timings.get("cost_volume", 0.0) + (t1 - t0)
    timings["appearance"] = timings.get("appearance", 0.0) + (t2 - t1)
    return infer_scene(appearance, cost_volume, model, cfg, n_jobs=n_jobs, timings=timings)


class LayeredSceneLabeler(BaseEstimator):
    """Joint semantic label and disparity inference under the four-layer model.

    Nothing is learned: ``fit`` only validates the hyper-parameters and
    freezes the configuration, so the estimator composes with sklearn
    tooling (``get_params``, ``clone``, grid search over ``beta``).

    ``X`` is a rectified stereo pair, either ``(left, right)`` or an array of
    shape ``(2, H, W)`` with intensities in [0, 1]. ``scores`` are per-pixel
    class probabilities ``(5, H, W)``; when omitted a heuristic scorer is
    used and a ``DemoQualityWarning`` is emitted.
    """

    def __init__(self, disparities=64, patch_size=11, beta=1.0, horizon_row=0.0,
                 ground_slope=1.0, score_floor=1e-6, n_jobs=None):
        self.disparities = disparities
        self.patch_size = patch_size
        self.beta = beta
        self.horizon_row = horizon_row
        self.ground_slope = ground_slope
        self.score_floor = score_floor
        self.n_jobs = n_jobs

    @classmethod
    def from_config(cls, cfg: EngineConfig, **kw):
        return cls(disparities=cfg.disparities, patch_size=cfg.patch_size, beta=cfg.beta,
                   horizon_row=cfg.horizon_row, ground_slope=cfg.ground_slope,
                   score_floor=cfg.score_floor, **kw)

    def fit(self, X=None, y=None):
        self.config_ = EngineConfig(
            disparities=self.disparities, patch_size=self.patch_size, beta=self.beta,
            horizon_row=self.horizon_row, ground_slope=self.ground_slope,
            score_floor=self.score_floor)
        self.ground_model_ = self.config_.ground_model
        return self

    def predict_scene(self, X=None, scores=None, cost_volume=None):
        check_is_fitted(self)
        left = right = None
        if X is not None:
            left, right = split_stereo_pair(X)
        return label_scene(self.config_, left, right, scores=scores,
                           cost_volume=cost_volume, n_jobs=self.n_jobs)

    def predict(self, X=None, scores=None, cost_volume=None):
        """Label map of shape (H, W) holding ``Label`` codes."""
        labels, _ = render_maps(self.predict_scene(X, scores, cost_volume))
        return labels

    def predict_disparity(self, X=None, scores=None, cost_volume=None):
        _, disp = render_maps(self.predict_scene(X, scores, cost_volume))
        return disp

    def score(self, X, y, scores=None, cost_volume=None, ignore=None):
        """Mean IoU over the classes present in the ground-truth map ``y``."""
        pred = self.predict(X, scores, cost_volume)
        return evaluate(pred, np.asarray(y), ignore).avg_all
