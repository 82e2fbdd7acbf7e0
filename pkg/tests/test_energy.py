import numpy as np
import pytest

from streetlayers.core import ColumnAssignment, GroundPlaneModel, InfeasibleAssignmentError, Label, feasible_assignments
from streetlayers.energy import ColumnCosts, column_energy, prefix_tables
from streetlayers.oracle import naive_column_energy

from conftest import int_column, random_model


def test_zero_costs_zero_energy():
    model = GroundPlaneModel(2, 1.0, 5)
    cc = ColumnCosts(np.zeros((6, 5)), np.zeros((6, 5)))
    assert all(column_energy(cc, a, model) == 0 for a in feasible_assignments(6, model))


def test_all_ground_two_rows(rng):
    model = GroundPlaneModel(1, 1.0, 4)
    cc = int_column(rng, 2, 4)
    want = sum(cc.appearance[y - 1, Label.GROUND] + cc.depth[y - 1, model.ground_disparity(y)]
               for y in (1, 2))
    assert column_energy(cc, ColumnAssignment(1, 1, 1), model) == want


def test_matches_per_pixel_loop(rng):
    for _ in range(30):
        h, d = int(rng.integers(1, 13)), int(rng.integers(2, 8))
        model = random_model(rng, h, d)
        cc = int_column(rng, h, d)
        for a in feasible_assignments(h, model):
            assert column_energy(cc, a, model) == naive_column_energy(cc, a, model)


def test_real_valued_within_tolerance(rng):
    h, d = 12, 6
    model = GroundPlaneModel(3, 0.5, d)
    cc = ColumnCosts(rng.random((h, 5)) * 7, rng.random((h, d)) * 3)
    for a in feasible_assignments(h, model):
        assert column_energy(cc, a, model) == pytest.approx(naive_column_energy(cc, a, model), abs=1e-9)


def test_empty_span_is_zero(rng):
    t = prefix_tables(int_column(rng, 5, 3), GroundPlaneModel(1, 0.5, 3))
    for y in range(1, 6):
        assert t.sky_span(y, y) == 0
        assert t.building_span(y, y, 2) == 0
        assert t.object_span(y, y, Label.PEDESTRIAN, 1) == 0
        assert t.ground_span(y, y) == 0


def test_full_span_all_ones():
    h, d = 7, 4
    t = prefix_tables(ColumnCosts(np.ones((h, 5)), np.ones((h, d))), GroundPlaneModel(1, 0.5, d))
    assert t.sky_span(1, h + 1) == 2 * h
    assert all(t.building_span(1, h + 1, k) == 2 * h for k in range(d))
    assert all(t.object_span(1, h + 1, l, k) == 2 * h
               for l in (Label.VEHICLE, Label.PEDESTRIAN) for k in range(d))
    assert t.ground_suffix(1) == 2 * h


def test_random_span_queries(rng):
    h, d = 15, 5
    cc = ColumnCosts(rng.random((h, 5)), rng.random((h, d)))
    model = GroundPlaneModel(4, 0.5, d)
    t = prefix_tables(cc, model)
    gd = model.profile(h)
    for _ in range(50):
        a, b = sorted(rng.integers(1, h + 2, 2))
        k = int(rng.integers(0, d))
        rows = range(a - 1, b - 1)
        assert t.sky_span(a, b) == pytest.approx(sum(cc.appearance[r, 4] + cc.depth[r, 0] for r in rows), abs=1e-9)
        assert t.building_span(a, b, k) == pytest.approx(sum(cc.appearance[r, 3] + cc.depth[r, k] for r in rows), abs=1e-9)
        assert t.object_span(a, b, Label.PEDESTRIAN, k) == pytest.approx(
            sum(cc.appearance[r, 2] + cc.depth[r, k] for r in rows), abs=1e-9)
        assert t.ground_span(a, b) == pytest.approx(sum(cc.appearance[r, 0] + cc.depth[r, gd[r]] for r in rows), abs=1e-9)


def test_monotone_under_cost_increase(rng):
    h, d = 10, 6
    model = GroundPlaneModel(2, 0.75, d)
    cc = int_column(rng, h, d)
    a = ColumnAssignment(8, 5, 2, Label.PEDESTRIAN, 2)
    base = column_energy(cc, a, model)
    for r in range(h):
        app = cc.appearance.copy()
        app[r] += 3
        dep = cc.depth.copy()
        dep[r] += 3
        assert column_energy(ColumnCosts(app, dep), a, model) >= base


def test_infeasible_rejected(rng):
    model = GroundPlaneModel(1, 1.0, 4)
    with pytest.raises(InfeasibleAssignmentError):
        column_energy(int_column(rng, 4, 4), ColumnAssignment(2, 3, 1), model)


def test_column_costs_shape_checks():
    with pytest.raises(ValueError):
        ColumnCosts(np.zeros((3, 4)), np.zeros((3, 2)))
    with pytest.raises(ValueError):
        ColumnCosts(np.zeros((3, 5)), np.zeros((2, 2)))
