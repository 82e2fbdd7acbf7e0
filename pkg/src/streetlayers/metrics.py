"""Intersection-over-union scoring of label maps."""
from dataclasses import dataclass

import numpy as np

from .core import Label

# row order of the report table
REPORT_ORDER = (Label.GROUND, Label.VEHICLE, Label.PEDESTRIAN, Label.SKY, Label.BUILDING)
DYNAMIC = (Label.VEHICLE, Label.PEDESTRIAN)


def _check_maps(pred, gt, ignore):
    pred, gt = np.asarray(pred), np.asarray(gt)
    if pred.shape != gt.shape:
        raise ValueError(f"label map shape mismatch: pred {pred.shape} vs gt {gt.shape}")
    if ignore is None:
        ignore = np.zeros(gt.shape, dtype=bool)
    else:
        ignore = np.asarray(ignore, dtype=bool)
        if ignore.shape != gt.shape:
            raise ValueError(f"ignore mask shape {ignore.shape} does not match {gt.shape}")
    return pred, gt, ignore


def iou(pred, gt, label, ignore=None) -> float:
    """|pred ∩ gt| / |pred ∪ gt| for one class over non-ignored pixels.

    Returns 1.0 when the class is absent from both maps.
    """
    pred, gt, ignore = _check_maps(pred, gt, ignore)
    keep = ~ignore
    p = (pred == label) & keep
    g = (gt == label) & keep
    union = np.count_nonzero(p | g)
    if union == 0:
        return 1.0
    return np.count_nonzero(p & g) / union


@dataclass(frozen=True)
class IoUReport:
    per_class: dict
    present: frozenset
    avg_all: float
    avg_dynamic: float

    def format_table(self) -> str:
        lines = [f"{'Class':<14}{'IoU (%)':>9}"]
        for lab in REPORT_ORDER:
            mark = "" if lab in self.present else "  (absent)"
            lines.append(f"{lab.name.capitalize():<14}{100 * self.per_class[lab]:>9.1f}{mark}")
        lines.append(f"{'Avg (all)':<14}{100 * self.avg_all:>9.1f}")
        lines.append(f"{'Avg (dynamic)':<14}{100 * self.avg_dynamic:>9.1f}")
        return "\n".join(lines)

    def format_kv(self) -> str:
        lines = [f"iou_{lab.name.lower()}={self.per_class[lab]:.6f}" for lab in REPORT_ORDER]
        lines.append(f"avg_all={self.avg_all:.6f}")
        lines.append(f"avg_dynamic={self.avg_dynamic:.6f}")
        return "\n".join(lines)


def _mean(values):
    return float(np.mean(values)) if values else float("nan")


def evaluate(pred, gt, ignore=None) -> IoUReport:
    """Per-class IoU and the two averages.

    Classes absent from the (non-ignored) ground truth are reported but
    left out of both averages.
    """
    pred, gt, ignore = _check_maps(pred, gt, ignore)
    per_class = {lab: iou(pred, gt, lab, ignore) for lab in Label}
    present = frozenset(lab for lab in Label if np.any((gt == lab) & ~ignore))
    return IoUReport(
        per_class=per_class,
        present=present,
        avg_all=_mean([per_class[l] for l in Label if l in present]),
        avg_dynamic=_mean([per_class[l] for l in DYNAMIC if l in present]),
    )
