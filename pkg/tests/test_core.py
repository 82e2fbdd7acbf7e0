import numpy as np
import pytest
from hypothesis import given, strategies as st

from streetlayers.core import (
    ColumnAssignment, ConfigError, EngineConfig, GroundPlaneModel, InfeasibleAssignmentError,
    Label, SceneLabeling, check_assignment, count_feasible, feasible_assignments,
    ground_disparity, layer_violations, parse_config, render_maps,
)


def test_label_codes():
    assert [int(l) for l in Label] == [0, 1, 2, 3, 4]
    assert [l.name for l in Label] == ["GROUND", "VEHICLE", "PEDESTRIAN", "BUILDING", "SKY"]


@pytest.mark.parametrize("y, expected", [(10, 0), (5, 0), (30, 10)])
def test_ground_disparity_examples(y, expected):
    model = GroundPlaneModel(horizon_row=10, slope=0.5, max_disparity=64)
    assert ground_disparity(model, y) == expected


def test_ground_disparity_rounds_half_up_and_clamps():
    model = GroundPlaneModel(0, 0.5, 4)
    assert [model.ground_disparity(y) for y in range(1, 9)] == [1, 1, 2, 2, 3, 3, 3, 3]


@given(st.floats(-50, 50), st.floats(0.01, 4), st.integers(1, 80), st.integers(1, 60))
def test_ground_disparity_monotone_and_bounded(y0, a, d, height):
    model = GroundPlaneModel(y0, a, d)
    prof = model.profile(height)
    assert prof.min() >= 0 and prof.max() <= d - 1
    assert np.all(np.diff(prof) >= 0)
    assert all(prof[y - 1] == 0 for y in range(1, height + 1) if y <= y0)


def test_model_rejects_bad_slope():
    with pytest.raises(ValueError):
        GroundPlaneModel(1, 0.0, 8)


def test_render_all_ground():
    model = GroundPlaneModel(2, 1.0, 8)
    sl = SceneLabeling([ColumnAssignment(1, 1, 1)], model, 6)
    labels, disp = render_maps(sl)
    assert (labels == Label.GROUND).all()
    assert disp[:, 0].tolist() == [model.ground_disparity(y) for y in range(1, 7)]


def test_render_single_pixel():
    model = GroundPlaneModel(0, 1.0, 4)
    labels, disp = render_maps(SceneLabeling([ColumnAssignment(1, 1, 1)], model, 1))
    assert labels.tolist() == [[Label.GROUND]]


def test_render_spans():
    model = GroundPlaneModel(0, 1.0, 16)
    a = ColumnAssignment(h1=8, h2=5, h3=3, l2=Label.VEHICLE, disp3=2)
    labels, disp = render_maps(SceneLabeling([a], model, 10))
    col = [Label(v) for v in labels[:, 0]]
    assert col == [Label.SKY] * 2 + [Label.BUILDING] * 2 + [Label.VEHICLE] * 3 + [Label.GROUND] * 3
    assert disp[:, 0].tolist() == [0, 0, 2, 2, 8, 8, 8, 8, 9, 10]


@pytest.mark.parametrize("a, msg", [
    (ColumnAssignment(3, 4, 1), "layer order"),
    (ColumnAssignment(5, 3, 1, Label.BUILDING, 1), "object label"),
    (ColumnAssignment(5, 3, 3, Label.VEHICLE, 2), "disp3=0"),
    (ColumnAssignment(5, 3, 1, Label.VEHICLE, 0), "depth order"),
    (ColumnAssignment(5, 3, 1, Label.VEHICLE, 5), "depth order"),
    (ColumnAssignment(11, 3, 1), "layer order"),
])
def test_check_assignment_names_constraint(a, msg):
    model = GroundPlaneModel(0, 1.0, 16)    # d2(5) = 5
    with pytest.raises(InfeasibleAssignmentError, match=msg):
        check_assignment(a, model, 10)


def test_feasible_listing_h3_d3():
    # ground disparities 0, 1, 2 on rows 1..3: a building fits only under h1 = 3, at disp 1
    model = GroundPlaneModel(1, 1.0, 3)
    got = {(a.h1, a.h2, a.h3, a.disp3) for a in feasible_assignments(3, model)}
    expected = {
        (1, 1, 1, 0),
        (2, 1, 1, 0), (2, 2, 2, 0),
        (3, 1, 1, 0), (3, 2, 2, 0), (3, 2, 1, 1), (3, 3, 3, 0), (3, 3, 1, 1), (3, 3, 2, 1),
    }
    assert got == expected
    assert len(list(feasible_assignments(3, model))) == 18 == count_feasible(3, model)


def test_feasible_order_is_tie_break_order():
    model = GroundPlaneModel(1, 1.0, 5)
    seq = list(feasible_assignments(6, model))
    assert seq == sorted(seq)


@given(st.integers(1, 12), st.integers(2, 8), st.sampled_from([1.0, 2.0, 4.5]),
       st.sampled_from([0.25, 0.5, 1.0, 2.0]))
def test_count_feasible_closed_form(height, d, y0, a):
    model = GroundPlaneModel(y0, a, d)
    assert count_feasible(height, model) == sum(1 for _ in feasible_assignments(height, model))


@st.composite
def labelings(draw):
    height = draw(st.integers(1, 20))
    d = draw(st.integers(2, 12))
    model = GroundPlaneModel(draw(st.floats(0, 10)), draw(st.floats(0.1, 2)), d)
    width = draw(st.integers(1, 5))
    cols = []
    for _ in range(width):
        h1 = draw(st.integers(1, height))
        h2 = draw(st.integers(1, h1))
        h3 = draw(st.integers(1, h2))
        d2 = model.ground_disparity(h1)
        if h3 < h2 and d2 >= 2:
            d3 = draw(st.integers(1, d2 - 1))
        else:
            h3, d3 = h2, 0
        cols.append(ColumnAssignment(h1, h2, h3, draw(st.sampled_from([Label.VEHICLE, Label.PEDESTRIAN])), d3))
    return SceneLabeling(cols, model, height)


@given(labelings())
def test_render_round_trip_is_layered(sl):
    sl.validate()
    labels, disp = render_maps(sl)
    assert layer_violations(labels, disp, sl) == []


def test_layer_violations_flags_bad_map():
    labels = np.array([[Label.GROUND], [Label.SKY], [Label.GROUND]], dtype=np.uint8)
    assert (0, "label order") in layer_violations(labels)


def test_parse_config():
    cfg = parse_config("disparities = 32\npatch_size=5 # odd\nbeta = 2.5\n"
                       "horizon_row = 12.5\nground_slope = 0.4\n")
    assert cfg == EngineConfig(32, 5, 2.5, 12.5, 0.4)
    assert cfg.ground_model == GroundPlaneModel(12.5, 0.4, 32)


@pytest.mark.parametrize("text, key", [
    ("patch_size=5\nbeta=1\nhorizon_row=1\nground_slope=1\n", "disparities"),
    ("disparities=8\npatch_size=five\nbeta=1\nhorizon_row=1\nground_slope=1\n", "patch_size"),
    ("disparities=8\npatch_size=5\nbeta=1\nhorizon_row=1\n", "ground_slope"),
])
def test_config_errors_name_key(text, key):
    with pytest.raises(ConfigError, match=key):
        parse_config(text)


@pytest.mark.parametrize("kw", [dict(disparities=1), dict(patch_size=4), dict(beta=0.0),
                                dict(beta=float("nan")), dict(ground_slope=-1.0)])
def test_config_invariants(kw):
    with pytest.raises(ValueError):
        EngineConfig(**kw)
