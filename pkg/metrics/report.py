from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from sklearn.metrics import accuracy_score, confusion_matrix

from degrade.simulate import DegradationKind
from errors import InvalidArgumentError
from utils import atomic_write

SCHEMA = "drm-metrics/1"
COLUMNS = ("image", "kind", "step", "psnr", "ssim")
SUMMARY_IMAGE = "mean"


@dataclass
class MetricRow:
    """Quality of one image across steps; ``steps`` labels each entry ("init", "1", ...)."""

    image: str
    kind: str
    psnr: List[float]
    ssim: List[float]
    steps: List[str] = field(default_factory=list)
    config_hash: str = ""

    def __post_init__(self):
        if len(self.psnr) != len(self.ssim):
            raise InvalidArgumentError(f"{self.image}: {len(self.psnr)} psnr values vs {len(self.ssim)} ssim values")
        if not self.steps:
            self.steps = [str(k) for k in range(1, len(self.psnr) + 1)]
        if len(self.steps) != len(self.psnr):
            raise InvalidArgumentError(f"{self.image}: {len(self.steps)} step labels for {len(self.psnr)} values")

    @property
    def final_psnr(self) -> float:
        return self.psnr[-1]

    @property
    def final_ssim(self) -> float:
        return self.ssim[-1]


def summarize(rows: Sequence[MetricRow]) -> Dict[str, tuple]:
    """Per-kind (mean final PSNR, mean final SSIM, count), kinds in first-seen order."""
    grouped = defaultdict(list)
    for row in rows:
        grouped[row.kind].append(row)
    return {
        kind: (
            float(np.mean([r.final_psnr for r in members])),
            float(np.mean([r.final_ssim for r in members])),
            len(members),
        )
        for kind, members in grouped.items()
    }


def render_metric_csv(rows: Sequence[MetricRow], config_hash: Optional[str] = None) -> str:
    buffer = io.StringIO()
    header = f"# schema={SCHEMA}"
    if config_hash:
        header += f" config_hash={config_hash}"
    buffer.write(header + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        for step, p, s in zip(row.steps, row.psnr, row.ssim):
            writer.writerow((row.image, row.kind, step, f"{p:.6f}", f"{s:.6f}"))
    for kind, (p, s, _) in summarize(rows).items():
        writer.writerow((SUMMARY_IMAGE, kind, "final", f"{p:.6f}", f"{s:.6f}"))
    return buffer.getvalue()


def write_metric_csv(rows: Sequence[MetricRow], path, config_hash: Optional[str] = None):
    text = render_metric_csv(rows, config_hash)
    return atomic_write(path, lambda fh: fh.write(text), mode="w")


def read_metric_csv(path) -> List[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(lines))


def classifier_accuracy(true_kinds, predicted_kinds):
    """Overall accuracy and per-kind recall of a kind classifier."""
    labels = [k.value for k in DegradationKind]
    true = [DegradationKind(k).value for k in true_kinds]
    predicted = [DegradationKind(k).value for k in predicted_kinds]
    matrix = confusion_matrix(true, predicted, labels=labels)
    support = matrix.sum(axis=1)
    recall = {
        label: float(matrix[i, i] / support[i]) if support[i] else float("nan")
        for i, label in enumerate(labels)
    }
    return float(accuracy_score(true, predicted)), recall, matrix
