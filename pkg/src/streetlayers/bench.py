"""Stage timings of the full pipeline across image heights."""
import time

import numpy as np

from .estimator import label_scene
from .synth import default_config, generate

STAGES = ("cost_volume", "appearance", "q_table", "inference")
STAGE_TITLES = {
    "cost_volume": "Depth data term (cost volume)",
    "appearance": "Appearance data term",
    "q_table": "Intermediate table Q",
    "inference": "Inference",
}


def stereo_from_disparity(disp, rng):
    """Random texture pair where right pixel ``x`` copies left pixel ``x + d``.

    ``d`` is read at the right pixel's position, which is close enough for
    timing runs. Pixels whose source falls off the image keep fresh texture.
    """
    height, width = disp.shape
    left = rng.random((height, width))
    right = rng.random((height, width))
    ys, xs = np.mgrid[0:height, 0:width]
    src = xs + disp
    ok = src < width
    right[ys[ok], xs[ok]] = left[ys[ok], src[ok]]
    return left, right


def bench_inputs(width, height, disparities, seed=0):
    cfg = default_config(height, disparities)
    scene = generate(width, height, disparities, sigma_app=0.1, sigma_depth=0.0, seed=seed,
                     config=cfg)
    left, right = stereo_from_disparity(scene.disparity, np.random.default_rng(seed))
    return cfg, left, right, scene.scores


def fit_exponent(heights, times):
    """Slope of log(time) against log(height)."""
    return float(np.polyfit(np.log(heights), np.log(times), 1)[0])


def run_bench(heights=(45, 90, 180, 360), disparities=64, width=488, repeats=3, n_jobs=None,
              seed=0):
    """Best-of-``repeats`` stage timings per height.

    Returns ``(rows, exponent)`` where each row maps stage name to seconds
    (plus ``height`` and ``total``) and ``exponent`` is the fitted growth
    of the inference stage in H.
    """
    rows = []
    for h in heights:
        cfg, left, right, scores = bench_inputs(width, h, disparities, seed)
        best = None
        for _ in range(max(1, repeats)):
            t = {}
            t0 = time.perf_counter()
            label_scene(cfg, left, right, scores=scores, n_jobs=n_jobs, timings=t)
            t["total"] = time.perf_counter() - t0
            if best is None or t["total"] < best["total"]:
                best = t
        best["height"] = h
        rows.append(best)
    exponent = fit_exponent([r["height"] for r in rows], [r["inference"] for r in rows])
    return rows, exponent


def format_bench(rows, exponent, width, disparities):
    head = f"{'Component (ms)':<32}" + "".join(f"{'H=' + str(r['height']):>10}" for r in rows)
    lines = [f"W={width} D={disparities}", head]
    for stage in STAGES:
        lines.append(f"{STAGE_TITLES[stage]:<32}" + "".join(f"{1e3 * r[stage]:>10.1f}" for r in rows))
    lines.append(f"{'Overall':<32}" + "".join(f"{1e3 * r['total']:>10.1f}" for r in rows))
    lines.append(f"inference_exponent={exponent:.3f}")
    return "\n".join(lines)
