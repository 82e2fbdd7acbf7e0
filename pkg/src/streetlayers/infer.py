"""Exact per-column minimization of the layered data term.

The search is split in two. The intermediate table ``Q(h1, h2)`` holds the
cheapest sky+building completion of rows ``[1, h2)`` whose building
disparity is admissible for an object standing at row ``h1``, i.e.
``1 <= d < d2(h1)``. Walking ``h1`` down the image, ``d2(h1)`` never
decreases, so each disparity is folded into a running min exactly once;
the per-disparity minimum over ``h3`` is itself a running min along the
column. ``Q`` then costs O(H*D + H^2) per column.

The final search scores ground suffix + object span + ``Q`` for every
``h2 <= h1`` and both object labels, O(H^2 * L) per column, and takes the
row-major argmin so ties resolve to the smallest ``h1``, then ``h2``.

Columns never interact. They are processed in blocks, vectorized within a
block.
"""
import os
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .core import ColumnAssignment, EngineConfig, GroundPlaneModel, Label, N_LABELS, SceneLabeling
from .energy import ColumnCosts


# cap on H*H*columns elements held per block of columns
BLOCK_ELEMENTS = 1_000_000
# floor on block width, so the inner loops stay long at large H
MIN_BLOCK_COLUMNS = 16


def _prefix(a):
    """Cumulative sum over the last (row) axis with a leading zero."""
    out = np.zeros(a.shape[:-1] + (a.shape[-1] + 1,))
    np.cumsum(a, axis=-1, out=out[..., 1:])
    return out


class _BuildingTable:
    """Running min over sky+building completions, per column and ``h2``.

    Arrays are (columns, H); entry ``k`` refers to ``h2 = k + 1``. ``h3`` and
    ``disp`` are the backpointers of the current minimum; ties keep the
    smaller ``h3``, then the smaller disparity.
    """

    def __init__(self, app, vol):
        # app (c, 5, H), vol (c, D, H)
        self.app_building = app[:, Label.BUILDING]
        self.vol = vol
        c, height = self.app_building.shape
        self.sky = _prefix(app[:, Label.SKY] + vol[:, 0])
        # empty building band: sky alone covers rows [1, h2)
        self.value = self.sky[:, :height].copy()
        self.h3 = np.broadcast_to(np.arange(1, height + 1), (c, height)).copy()
        self.disp = np.zeros((c, height), dtype=np.intp)
        self.folded = 0
        self._rows = np.arange(height)

    def slice_min(self, d):
        """Best non-empty building at disparity ``d`` for every ``h2``.

        Returns ``(cost, h3)``; ``h2 = 1`` has no option and gets ``inf``.
        """
        bp = _prefix(self.app_building + self.vol[:, d])
        height = self.value.shape[1]
        # cost(h3, h2) = sky[h3-1] + bp[h2-1] - bp[h3-1]
        a = self.sky[:, :height] - bp[:, :height]
        run = np.minimum.accumulate(a, axis=1)
        prev = np.concatenate([np.full((a.shape[0], 1), np.inf), run[:, :-1]], axis=1)
        first = np.maximum.accumulate(np.where(a < prev, self._rows, 0), axis=1)
        cost = np.full_like(self.value, np.inf)
        cost[:, 1:] = bp[:, 1:height] + run[:, :-1]
        h3 = np.zeros_like(self.h3)
        h3[:, 1:] = first[:, :-1] + 1
        return cost, h3

    def fold(self, d):
        cost, h3 = self.slice_min(d)
        take = (cost < self.value) | ((cost == self.value) & (h3 < self.h3))
        self.value[take] = cost[take]
        self.h3[take] = h3[take]
        self.disp[take] = d

    def admit_below(self, d2):
        """Fold every disparity ``d`` with ``folded < d < d2``; report if any."""
        changed = False
        while self.folded + 1 < d2:
            self.folded += 1
            self.fold(self.folded)
            changed = True
        return changed


def _intermediate_table(app, vol, profile):
    """Q for a block of columns, one snapshot per run of equal rows.

    Returns ``(value, h3, disp, group)`` where the first three are
    (c, n_snapshots, H) and ``Q(h1, h2) = value[:, group[h1-1], h2-1]`` for
    ``h2 <= h1``. A new snapshot is taken only when a fold changes the
    admissible disparity set, so ``group`` is constant wherever ``d2(h1)``
    is.
    """
    height = profile.shape[0]
    table = _BuildingTable(app, vol)
    vals, h3s, disps = [], [], []
    group = np.empty(height, dtype=np.intp)
    for k1 in range(height):
        if table.admit_below(int(profile[k1])) or not vals:
            vals.append(table.value.copy())
            h3s.append(table.h3.copy())
            disps.append(table.disp.copy())
        group[k1] = len(vals) - 1
    return np.stack(vals, axis=1), np.stack(h3s, axis=1), np.stack(disps, axis=1), group


def _level_runs(profile):
    """``(level, start, stop)`` for each run of equal ground disparity."""
    cuts = np.flatnonzero(np.diff(profile)) + 1
    starts = np.concatenate([[0], cuts])
    stops = np.concatenate([cuts, [profile.shape[0]]])
    return [(int(profile[a]), int(a), int(b)) for a, b in zip(starts, stops)]


def _solve_block(app, vol, profile, timers):
    c, _, height = app.shape
    t0 = time.perf_counter()
    q_val, q_h3, q_disp, group = _intermediate_table(app, vol, profile)
    # columns go last from here on so every vectorized loop runs over the
    # block width, whatever H is
    q_val = np.ascontiguousarray(q_val.transpose(1, 2, 0))                # (G, H, c)
    k = np.arange(height)
    ground = _prefix(app[:, Label.GROUND] + vol[:, profile, k])
    ground_suffix = (ground[:, height:] - ground[:, :height]).T           # (H, c) over h1
    runs = _level_runs(profile)
    levels = [lv for lv, _, _ in runs]
    run_of_row = np.repeat(np.arange(len(runs)), [hi - lo for _, lo, hi in runs])
    # integral tables of the object band, (runs, H+1, c)
    veh = np.ascontiguousarray(
        _prefix(app[:, Label.VEHICLE, None, :] + vol[:, levels, :]).transpose(1, 2, 0))
    ped = np.ascontiguousarray(
        _prefix(app[:, Label.PEDESTRIAN, None, :] + vol[:, levels, :]).transpose(1, 2, 0))
    above = np.where(np.tri(height, dtype=bool), 0.0, np.inf)[:, :, None]
    t1 = time.perf_counter()

    # total[h1-1, h2-1] = min_l object span [h2, h1) + Q(h1, h2) + ground [h1, H]
    total = veh[run_of_row, :height]
    np.subtract(veh[run_of_row, k][:, None], total, out=total)
    obj_p = ped[run_of_row, :height]
    np.subtract(ped[run_of_row, k][:, None], obj_p, out=obj_p)
    np.minimum(total, obj_p, out=total)
    del obj_p
    total += q_val[group]
    total += ground_suffix[:, None]
    total += above

    # first index of the row-major argmin = smallest h1, then smallest h2
    flat = total.reshape(height * height, c)
    idx = np.argmin(flat, axis=0)
    cols = np.arange(c)
    k1, k2 = np.divmod(idx, height)
    j = run_of_row[k1]
    obj_v = veh[j, k1, cols] - veh[j, k2, cols]
    obj_p = ped[j, k1, cols] - ped[j, k2, cols]
    g = group[k1]
    res = {
        "h1": k1 + 1,
        "h2": k2 + 1,
        "h3": q_h3[cols, g, k2],
        "l2": np.where(obj_p < obj_v, int(Label.PEDESTRIAN), int(Label.VEHICLE)),
        "disp3": q_disp[cols, g, k2],
        "energy": flat[idx, cols],
    }
    t2 = time.perf_counter()
    timers["q_table"] = timers.get("q_table", 0.0) + (t1 - t0)
    timers["inference"] = timers.get("inference", 0.0) + (t2 - t1)
    return res


def _check_tensors(appearance, volume, model):
    appearance = np.asarray(appearance, dtype=np.float64)
    volume = np.asarray(volume, dtype=np.float64)
    if appearance.ndim != 3 or appearance.shape[0] != N_LABELS:
        raise ValueError(f"appearance costs must be ({N_LABELS}, H, W), got {appearance.shape}")
    if volume.ndim != 3 or volume.shape[1:] != appearance.shape[1:]:
        raise ValueError(f"cost volume shape {volume.shape} does not match appearance "
                         f"costs {appearance.shape}")
    height = appearance.shape[1]
    if height < 1 or appearance.shape[2] < 1:
        raise ValueError("empty image")
    if model.profile(height).max() >= volume.shape[0]:
        raise ValueError(f"ground model needs more than {volume.shape[0]} disparity levels")
    return appearance, volume


def solve_columns(appearance, volume, model: GroundPlaneModel, timings=None):
    """Optimal assignment of every column, as parallel arrays.

    ``appearance`` is (5, H, W) and ``volume`` is (D, H, W). Returns a dict
    with int arrays ``h1, h2, h3, l2, disp3`` and float ``energy``, each of
    length W. If ``timings`` is a dict, seconds spent building the
    intermediate table and searching it are added under ``"q_table"`` and
    ``"inference"``.
    """
    appearance, volume = _check_tensors(appearance, volume, model)
    _, height, width = appearance.shape
    # column-major blocks: (W, 5, H) and (W, D, H)
    app = np.ascontiguousarray(appearance.transpose(2, 0, 1))
    vol = np.ascontiguousarray(volume.transpose(2, 0, 1))
    profile = model.profile(height)
    block = max(MIN_BLOCK_COLUMNS, BLOCK_ELEMENTS // (height * height))
    timers = {} if timings is None else timings
    parts = [_solve_block(app[s:s + block], vol[s:s + block], profile, timers)
             for s in range(0, width, block)]
    return {key: np.concatenate([p[key] for p in parts]) for key in parts[0]}


def _assignments(arrays):
    return [ColumnAssignment(int(h1), int(h2), int(h3), Label(int(l2)), int(d3))
            for h1, h2, h3, l2, d3 in zip(arrays["h1"], arrays["h2"], arrays["h3"],
                                          arrays["l2"], arrays["disp3"])]


def _column_tensors(cc: ColumnCosts):
    return cc.appearance.T[:, :, None], cc.depth.T[:, :, None]


def infer_column(cc: ColumnCosts, model: GroundPlaneModel, cfg: EngineConfig | None = None,
                 return_energy=False):
    """Minimum-energy feasible assignment of one column."""
    app, vol = _column_tensors(cc)
    res = solve_columns(app, vol, model)
    a = _assignments(res)[0]
    if return_energy:
        return a, float(res["energy"][0])
    return a


def q_table(cc: ColumnCosts, model: GroundPlaneModel):
    """Materialize ``Q[h1 - 1, h2 - 1]`` for ``h2 <= h1``; ``inf`` elsewhere.

    Q(h1, h2) is the cheapest sky+building completion of rows ``[1, h2)``
    whose building disparity is admissible for footprint ``h1``.
    """
    app, vol = _check_tensors(cc.appearance.T[:, :, None], cc.depth.T[:, :, None], model)
    val, _, _, group = _intermediate_table(app.transpose(2, 0, 1), vol.transpose(2, 0, 1),
                                           model.profile(cc.height))
    q = val[0, group, :]
    q[~np.tri(cc.height, dtype=bool)] = np.inf
    return q


def _default_jobs():
    return os.cpu_count() or 1


def infer_scene(appearance, volume, model: GroundPlaneModel, cfg: EngineConfig | None = None,
                n_jobs=None, timings=None) -> SceneLabeling:
    """Label every column of a scene.

    Columns are split into ``n_jobs`` contiguous chunks solved on a thread
    pool; each chunk writes a disjoint slice of the result, so output does
    not depend on ``n_jobs``.
    """
    appearance, volume = _check_tensors(appearance, volume, model)
    if cfg is not None and volume.shape[0] != cfg.disparities:
        raise ValueError(f"cost volume has {volume.shape[0]} levels, config expects "
                         f"{cfg.disparities}")
    width = appearance.shape[2]
    n_jobs = _default_jobs() if n_jobs is None else int(n_jobs)
    n_chunks = max(1, min(n_jobs, width))
    bounds = np.linspace(0, width, n_chunks + 1).astype(int)
    chunks = [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:])]

    def run(sl):
        t = {}
        return solve_columns(appearance[:, :, sl], volume[:, :, sl], model, timings=t), t

    if n_chunks == 1:
        results = [run(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=n_chunks) as pool:
            results = list(pool.map(run, chunks))

    merged = {k: np.concatenate([r[k] for r, _ in results])
              for k in ("h1", "h2", "h3", "l2", "disp3", "energy")}
    if timings is not None:
        for _, t in results:
            for k, v in t.items():
                timings[k] = timings.get(k, 0.0) + v
    return SceneLabeling(_assignments(merged), model, appearance.shape[1],
                         energies=merged["energy"])
