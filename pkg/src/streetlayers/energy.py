"""Per-column data term and its prefix-sum tables."""
from dataclasses import dataclass

import numpy as np

from .core import ColumnAssignment, GroundPlaneModel, Label, N_LABELS, check_assignment


@dataclass(frozen=True)
class ColumnCosts:
    """Cost slices of a single image column.

    ``appearance`` is (H, 5) indexed by Label code, ``depth`` is (H, D).
    """

    appearance: np.ndarray
    depth: np.ndarray

    def __post_init__(self):
        app = np.asarray(self.appearance, dtype=np.float64)
        dep = np.asarray(self.depth, dtype=np.float64)
        if app.ndim != 2 or app.shape[1] != N_LABELS:
            raise ValueError(f"appearance costs must be (H, {N_LABELS}), got {app.shape}")
        if dep.ndim != 2 or dep.shape[0] != app.shape[0]:
            raise ValueError(f"depth costs must be (H, D) with H={app.shape[0]}, got {dep.shape}")
        if not (np.isfinite(app).all() and np.isfinite(dep).all()):
            raise ValueError("column costs must be finite")
        object.__setattr__(self, "appearance", app)
        object.__setattr__(self, "depth", dep)

    @property
    def height(self) -> int:
        return self.appearance.shape[0]

    @property
    def disparities(self) -> int:
        return self.depth.shape[1]

    @classmethod
    def from_scene(cls, appearance, volume, i):
        """Slice column ``i`` out of (5, H, W) and (D, H, W) tensors."""
        return cls(appearance[:, :, i].T, volume[:, :, i].T)


def _prefix(a):
    out = np.zeros((a.shape[0] + 1,) + a.shape[1:])
    np.cumsum(a, axis=0, out=out[1:])
    return out


class PrefixTables:
    """Cumulative sums over rows so any band cost is two lookups.

    All spans are 1-based half-open ``[top, bottom)``.
    """

    def __init__(self, cc: ColumnCosts, model: GroundPlaneModel):
        app, dep = cc.appearance, cc.depth
        height = cc.height
        self.height = height
        self.ground_profile = model.profile(height)
        if self.ground_profile.max(initial=0) >= cc.disparities:
            raise ValueError("ground model reaches beyond the depth cost range")
        self.sky = _prefix(app[:, Label.SKY] + dep[:, 0])
        self.building = _prefix(app[:, Label.BUILDING, None] + dep)
        self.object = _prefix(app[:, [Label.VEHICLE, Label.PEDESTRIAN], None] + dep[:, None, :])
        rows = np.arange(height)
        self.ground = _prefix(app[:, Label.GROUND] + dep[rows, self.ground_profile])

    def sky_span(self, top, bottom):
        return self.sky[bottom - 1] - self.sky[top - 1]

    def building_span(self, top, bottom, d):
        return self.building[bottom - 1, d] - self.building[top - 1, d]

    def object_span(self, top, bottom, label, d):
        k = 0 if Label(label) == Label.VEHICLE else 1
        return self.object[bottom - 1, k, d] - self.object[top - 1, k, d]

    def ground_span(self, top, bottom):
        return self.ground[bottom - 1] - self.ground[top - 1]

    def ground_suffix(self, h1):
        return self.ground_span(h1, self.height + 1)


def prefix_tables(cc: ColumnCosts, model: GroundPlaneModel) -> PrefixTables:
    return PrefixTables(cc, model)


def column_energy(cc: ColumnCosts, a: ColumnAssignment, model: GroundPlaneModel,
                  tables: PrefixTables | None = None) -> float:
    """Data term of ``a`` on this column, summed from the prefix tables."""
    check_assignment(a, model, cc.height)
    t = prefix_tables(cc, model) if tables is None else tables
    d2 = model.ground_disparity(a.h1)
    return float(t.sky_span(1, a.h3)
                 + t.building_span(a.h3, a.h2, a.disp3)
                 + t.object_span(a.h2, a.h1, a.l2, d2)
                 + t.ground_suffix(a.h1))
