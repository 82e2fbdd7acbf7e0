"""Exhaustive reference solver. Test scale only."""
import numpy as np

from .core import ColumnAssignment, GroundPlaneModel, Label, check_assignment, feasible_assignments
from .energy import ColumnCosts

MAX_ORACLE_HEIGHT = 64


class OracleGuardError(ValueError):
    pass


def naive_column_energy(cc: ColumnCosts, a: ColumnAssignment, model: GroundPlaneModel) -> float:
    """Per-pixel loop over the column, no prefix sums."""
    check_assignment(a, model, cc.height)
    app, dep = cc.appearance, cc.depth
    d2 = model.ground_disparity(a.h1)
    total = 0.0
    for y in range(1, cc.height + 1):
        r = y - 1
        if y < a.h3:
            total += app[r, Label.SKY] + dep[r, 0]
        elif y < a.h2:
            total += app[r, Label.BUILDING] + dep[r, a.disp3]
        elif y < a.h1:
            total += app[r, a.l2] + dep[r, d2]
        else:
            total += app[r, Label.GROUND] + dep[r, model.ground_disparity(y)]
    return total


def _row_sums(cc, model):
    """Per-row costs as Python floats, keyed by what the row is assigned."""
    app = cc.appearance.tolist()
    dep = cc.depth.tolist()
    height = cc.height
    sky = [app[r][Label.SKY] + dep[r][0] for r in range(height)]
    bld = [[app[r][Label.BUILDING] + dep[r][d] for d in range(cc.disparities)] for r in range(height)]
    obj = {l: [[app[r][l] + dep[r][d] for d in range(cc.disparities)] for r in range(height)]
           for l in (Label.VEHICLE, Label.PEDESTRIAN)}
    gnd = [app[r][Label.GROUND] + dep[r][model.ground_disparity(r + 1)] for r in range(height)]
    return sky, bld, obj, gnd


def brute_force_column(cc: ColumnCosts, model: GroundPlaneModel, cfg=None,
                       max_height=MAX_ORACLE_HEIGHT, return_energy=False):
    """Enumerate every feasible assignment and keep the first minimum.

    Enumeration runs in ascending tie-break order, so a strict ``<`` keeps
    the lexicographically smallest optimum. Energies are summed row by row
    from the top, one band at a time.
    """
    if cc.height > max_height:
        raise OracleGuardError(f"oracle limited to H <= {max_height}, got H={cc.height}")
    if model.profile(cc.height).max() >= cc.disparities:
        raise ValueError(f"ground model needs more than {cc.disparities} disparity levels")
    sky, bld, obj, gnd = _row_sums(cc, model)
    height = cc.height
    best, best_e = None, float("inf")
    for a in feasible_assignments(height, model):
        d2 = model.ground_disparity(a.h1)
        e = 0.0
        for r in range(0, a.h3 - 1):
            e += sky[r]
        for r in range(a.h3 - 1, a.h2 - 1):
            e += bld[r][a.disp3]
        row_obj = obj[a.l2]
        for r in range(a.h2 - 1, a.h1 - 1):
            e += row_obj[r][d2]
        for r in range(a.h1 - 1, height):
            e += gnd[r]
        if e < best_e:
            best, best_e = a, e
    if return_energy:
        return best, best_e
    return best


def brute_force_scene(appearance, volume, model: GroundPlaneModel, **kw):
    """Oracle applied column by column; returns ``(assignments, energies)``."""
    out, energies = [], []
    for i in range(appearance.shape[2]):
        a, e = brute_force_column(ColumnCosts.from_scene(appearance, volume, i), model,
                                  return_energy=True, **kw)
        out.append(a)
        energies.append(e)
    return out, energies


def random_instance(rng, max_w=4, max_h=16, max_d=8, max_cost=9):
    """Integer-cost scene for oracle comparisons.

    Returns ``(appearance, volume, model)`` with shapes (5, H, W) and
    (D, H, W). The horizon sits at row 1, H/3 or H/2 and the ground slope is
    0.25, 0.5 or 1.
    """
    width = int(rng.integers(1, max_w + 1))
    height = int(rng.integers(1, max_h + 1))
    disparities = int(rng.integers(2, max_d + 1))
    horizon = float(rng.choice([1.0, height / 3, height / 2]))
    slope = float(rng.choice([0.25, 0.5, 1.0]))
    model = GroundPlaneModel(horizon, slope, disparities)
    appearance = rng.integers(0, max_cost + 1, (len(Label), height, width)).astype(np.float64)
    volume = rng.integers(0, max_cost + 1, (disparities, height, width)).astype(np.float64)
    return appearance, volume, model
