import numpy as np
import pytest

from streetlayers.core import layer_violations
from streetlayers.estimator import label_scene
from streetlayers.metrics import evaluate
from streetlayers.synth import generate


def recover(scene):
    sl = label_scene(scene.config, scores=scene.scores, cost_volume=scene.volume)
    from streetlayers.core import render_maps
    labels, disp = render_maps(sl)
    assert not layer_violations(labels, disp, sl)
    return labels


def test_deterministic():
    a = generate(32, 24, 8, 0.2, 0.1, seed=5)
    b = generate(32, 24, 8, 0.2, 0.1, seed=5)
    assert a.labeling.columns == b.labeling.columns
    for f in ("labels", "disparity", "scores", "volume"):
        assert np.array_equal(getattr(a, f), getattr(b, f))
    c = generate(32, 24, 8, 0.2, 0.1, seed=6)
    assert not np.array_equal(a.scores, c.scores)


@pytest.mark.parametrize("seed", range(10))
def test_ground_truth_is_layered(seed):
    s = generate(40, 30, 12, seed=seed)
    s.labeling.validate()
    assert not layer_violations(s.labels, s.disparity, s.labeling)
    assert s.scores.shape == (5, 30, 40) and s.volume.shape == (12, 30, 40)
    assert np.allclose(s.scores.sum(axis=0), 1)
    # cost minimum sits at the true disparity
    assert np.array_equal(np.argmin(s.volume, axis=0), s.disparity)


@pytest.mark.parametrize("seed", range(5))
def test_zero_noise_recovery(seed):
    s = generate(64, 48, 16, seed=seed)
    labels = recover(s)
    assert np.array_equal(labels, s.labels)


def test_scenes_have_variety():
    present = set()
    for seed in range(10):
        present |= set(np.unique(generate(64, 48, 16, seed=seed).labels).tolist())
    assert present == {0, 1, 2, 3, 4}


@pytest.mark.slow
def test_monotone_degradation():
    sigmas = (0.0, 0.2, 0.5, 0.9)
    means = []
    for sig in sigmas:
        vals = [evaluate(recover(s), s.labels).avg_all
                for s in (generate(48, 36, 12, sig, 0.05, seed=k) for k in range(20))]
        means.append(np.mean(vals))
    assert all(b <= a for a, b in zip(means, means[1:])), means


def test_bad_params():
    with pytest.raises(ValueError):
        generate(0, 10, 8)
    with pytest.raises(ValueError):
        generate(10, 10, 8, sigma_app=-1)
