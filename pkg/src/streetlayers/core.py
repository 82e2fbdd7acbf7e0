"""Label space, ground-plane model, column assignments and configuration.

Rows are 1-based and run top to bottom, so row 1 is the top of the image.
Each column is split into four bands, top to bottom: sky, building,
dynamic object and ground. The ground band is never empty.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np


class Label(enum.IntEnum):
    GROUND = 0
    VEHICLE = 1
    PEDESTRIAN = 2
    BUILDING = 3
    SKY = 4


N_LABELS = len(Label)
OBJECT_LABELS = (Label.VEHICLE, Label.PEDESTRIAN)


class InfeasibleAssignmentError(ValueError):
    """A column assignment breaks the layer, depth or label ordering."""


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class GroundPlaneModel:
    """Linear row -> disparity map for the road surface.

    ``horizon_row`` is real valued and in the same 1-based row coordinates
    as the image; ``slope`` is disparity levels gained per row below it.
    """

    horizon_row: float
    slope: float
    max_disparity: int

    def __post_init__(self):
        if not math.isfinite(self.horizon_row):
            raise ValueError(f"horizon_row must be finite, got {self.horizon_row}")
        if not (math.isfinite(self.slope) and self.slope > 0):
            raise ValueError(f"slope must be finite and > 0, got {self.slope}")
        if int(self.max_disparity) != self.max_disparity or self.max_disparity < 1:
            raise ValueError(f"max_disparity must be a positive integer, got {self.max_disparity}")

    def ground_disparity(self, y: int) -> int:
        d = round_half_up(self.slope * (y - self.horizon_row))
        return min(max(d, 0), self.max_disparity - 1)

    def profile(self, height: int) -> np.ndarray:
        """Ground disparity for rows 1..height, as an int array."""
        return np.array([self.ground_disparity(y) for y in range(1, height + 1)], dtype=np.intp)


def ground_disparity(model: GroundPlaneModel, y: int) -> int:
    return model.ground_disparity(y)


@dataclass(frozen=True, order=True)
class ColumnAssignment:
    """Band boundaries and free labels of one column.

    Spans: sky ``[1, h3)``, building ``[h3, h2)``, object ``[h2, h1)``,
    ground ``[h1, H]``. ``disp3`` is the building disparity, 0 when the
    building band is empty. Field order doubles as the tie-break order.
    """

    h1: int
    h2: int
    h3: int
    l2: Label = Label.VEHICLE
    disp3: int = 0

    def __post_init__(self):
        object.__setattr__(self, "l2", Label(self.l2))

    @property
    def building_empty(self) -> bool:
        return self.h3 == self.h2

    @property
    def object_empty(self) -> bool:
        return self.h2 == self.h1


def check_assignment(a: ColumnAssignment, model: GroundPlaneModel, height: int) -> None:
    """Raise InfeasibleAssignmentError naming the first violated constraint."""
    if not 1 <= a.h3 <= a.h2 <= a.h1 <= height:
        raise InfeasibleAssignmentError(
            f"layer order violated: need 1 <= h3 <= h2 <= h1 <= H, got "
            f"h3={a.h3}, h2={a.h2}, h1={a.h1}, H={height}")
    if a.l2 not in OBJECT_LABELS:
        raise InfeasibleAssignmentError(f"object label must be VEHICLE or PEDESTRIAN, got {a.l2.name}")
    if a.building_empty:
        if a.disp3 != 0:
            raise InfeasibleAssignmentError(
                f"empty building band must carry disp3=0, got {a.disp3}")
    else:
        d2 = model.ground_disparity(a.h1)
        if not 1 <= a.disp3 < d2:
            raise InfeasibleAssignmentError(
                f"depth order violated: need 1 <= disp3 < d2(h1)={d2}, got disp3={a.disp3}")


def is_feasible(a: ColumnAssignment, model: GroundPlaneModel, height: int) -> bool:
    try:
        check_assignment(a, model, height)
    except InfeasibleAssignmentError:
        return False
    return True


def feasible_assignments(height: int, model: GroundPlaneModel) -> Iterator[ColumnAssignment]:
    """Every feasible assignment, in ascending tie-break order."""
    for h1 in range(1, height + 1):
        d2 = model.ground_disparity(h1)
        for h2 in range(1, h1 + 1):
            for h3 in range(1, h2 + 1):
                for l2 in OBJECT_LABELS:
                    if h3 == h2:
                        yield ColumnAssignment(h1, h2, h3, l2, 0)
                    else:
                        for d3 in range(1, d2):
                            yield ColumnAssignment(h1, h2, h3, l2, d3)


@dataclass(frozen=True)
class SceneLabeling:
    columns: tuple
    model: GroundPlaneModel
    height: int
    energies: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))

    @property
    def width(self) -> int:
        return len(self.columns)

    @property
    def total_energy(self) -> float:
        if self.energies is None:
            raise ValueError("labeling carries no energies")
        return float(np.sum(self.energies))

    def validate(self) -> None:
        for i, a in enumerate(self.columns):
            try:
                check_assignment(a, self.model, self.height)
            except InfeasibleAssignmentError as e:
                raise InfeasibleAssignmentError(f"column {i}: {e}") from None

    def to_arrays(self) -> dict:
        """Column fields as int arrays, keyed by field name."""
        return {
            name: np.array([int(getattr(a, name)) for a in self.columns], dtype=np.intp)
            for name in ("h1", "h2", "h3", "l2", "disp3")
        }


def render_column(a: ColumnAssignment, model: GroundPlaneModel, height: int):
    labels = np.empty(height, dtype=np.uint8)
    disp = np.empty(height, dtype=np.int32)
    sky, bld, obj = slice(0, a.h3 - 1), slice(a.h3 - 1, a.h2 - 1), slice(a.h2 - 1, a.h1 - 1)
    labels[sky], disp[sky] = Label.SKY, 0
    labels[bld], disp[bld] = Label.BUILDING, a.disp3
    labels[obj], disp[obj] = a.l2, model.ground_disparity(a.h1)
    labels[a.h1 - 1:] = Label.GROUND
    disp[a.h1 - 1:] = model.profile(height)[a.h1 - 1:]
    return labels, disp


def render_maps(sl: SceneLabeling, model: GroundPlaneModel | None = None, height: int | None = None):
    """Rasterize a labeling into ``(labels, disparity)`` arrays of shape (H, W)."""
    model = sl.model if model is None else model
    height = sl.height if height is None else height
    labels = np.empty((height, sl.width), dtype=np.uint8)
    disp = np.empty((height, sl.width), dtype=np.int32)
    for i, a in enumerate(sl.columns):
        labels[:, i], disp[:, i] = render_column(a, model, height)
    return labels, disp


def layer_violations(labels: np.ndarray, disp: np.ndarray | None = None,
                     sl: SceneLabeling | None = None) -> list:
    """List every column whose rendering breaks the layered structure.

    Checks that labels read top to bottom are a subsequence of
    (sky, building, vehicle|pedestrian, ground), and, when ``sl`` is given,
    that each non-empty building band satisfies ``1 <= disp3 < d2(h1)``.
    ``disp`` is checked to be non-decreasing down each column.
    """
    rank = {Label.SKY: 0, Label.BUILDING: 1, Label.VEHICLE: 2, Label.PEDESTRIAN: 2, Label.GROUND: 3}
    problems = []
    height, width = labels.shape
    for i in range(width):
        col = [Label(int(v)) for v in labels[:, i]]
        ranks = [rank[c] for c in col]
        if any(b < a for a, b in zip(ranks, ranks[1:])):
            problems.append((i, "label order"))
        objs = {c for c in col if c in OBJECT_LABELS}
        if len(objs) > 1:
            problems.append((i, "mixed object labels"))
        if col[-1] != Label.GROUND:
            problems.append((i, "ground band empty"))
        if disp is not None and np.any(np.diff(disp[:, i]) < 0):
            problems.append((i, "disparity order"))
    if sl is not None:
        for i, a in enumerate(sl.columns):
            if not is_feasible(a, sl.model, sl.height):
                problems.append((i, "infeasible assignment"))
    return problems


@dataclass(frozen=True)
class EngineConfig:
    disparities: int = 64
    patch_size: int = 11
    beta: float = 1.0
    horizon_row: float = 0.0
    ground_slope: float = 1.0
    score_floor: float = 1e-6
    tie_break: str = "lexicographic"

    def __post_init__(self):
        if int(self.disparities) != self.disparities or self.disparities < 2:
            raise ValueError(f"disparities must be an integer >= 2, got {self.disparities}")
        if int(self.patch_size) != self.patch_size or self.patch_size < 1 or self.patch_size % 2 == 0:
            raise ValueError(f"patch_size must be an odd integer >= 1, got {self.patch_size}")
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be finite and > 0, got {self.beta}")
        if not (math.isfinite(self.score_floor) and self.score_floor > 0):
            raise ValueError(f"score_floor must be finite and > 0, got {self.score_floor}")
        if self.tie_break != "lexicographic":
            raise ValueError("only the lexicographic tie-break policy is supported")
        GroundPlaneModel(self.horizon_row, self.ground_slope, self.disparities)

    @property
    def ground_model(self) -> GroundPlaneModel:
        return GroundPlaneModel(self.horizon_row, self.ground_slope, self.disparities)


CONFIG_KEYS = {
    "disparities": int,
    "patch_size": int,
    "beta": float,
    "horizon_row": float,
    "ground_slope": float,
}


class ConfigError(ValueError):
    pass


def parse_config(text: str) -> EngineConfig:
    """Parse ``key = value`` lines. ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = CONFIG_KEYS[key](value)
        except ValueError:
            raise ConfigError(f"key {key!r}: cannot parse {value!r} as {CONFIG_KEYS[key].__name__}") from None
    for key in CONFIG_KEYS:
        if key not in values:
            raise ConfigError(f"missing required key {key!r}")
    try:
        return EngineConfig(**values)
    except ValueError as e:
        raise ConfigError(str(e)) from None


def load_config(path) -> EngineConfig:
    with open(path, encoding="utf-8") as f:
        return parse_config(f.read())


def format_config(cfg: EngineConfig) -> str:
    return "".join(f"{key} = {getattr(cfg, key)!r}\n" for key in CONFIG_KEYS)


def count_feasible(height: int, model: GroundPlaneModel, n_object_labels: int = 2) -> int:
    """Closed-form size of the feasible set."""
    total = 0
    for h1 in range(1, height + 1):
        n_d = max(model.ground_disparity(h1) - 1, 0)
        # sum over h2 of (1 + (h2 - 1) * n_d)
        total += h1 + n_d * h1 * (h1 - 1) // 2
    return n_object_labels * total


__all__ = [
    "Label", "N_LABELS", "OBJECT_LABELS", "GroundPlaneModel", "ColumnAssignment",
    "SceneLabeling", "EngineConfig", "InfeasibleAssignmentError", "ConfigError",
    "ground_disparity", "check_assignment", "is_feasible", "feasible_assignments",
    "render_maps", "render_column", "layer_violations", "parse_config",
    "load_config", "format_config", "count_feasible",
]
