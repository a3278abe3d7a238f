"""Quality-report output: delimited text and matplotlib figure files."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Mapping

from .metrics import QualityReport

METRIC_COLUMNS = ("crossings", "egoCrossings", "wiggleSum", "whitespace")


def quality_csv(reports: Mapping[str, QualityReport]) -> str:
    """Serialize one report row per label (e.g. per optimization focus)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(("label",) + METRIC_COLUMNS)
    for label in reports:
        values = reports[label].as_dict()
        writer.writerow([label] + [values[column] for column in METRIC_COLUMNS])
    return out.getvalue()


def write_quality_csv(reports: Mapping[str, QualityReport], path: str | Path) -> Path:
    path = Path(path)
    path.write_text(quality_csv(reports), encoding="utf-8")
    return path


def quality_table(reports: Mapping[str, QualityReport]) -> str:
    """Fixed-width table for terminal output."""
    labels = list(reports)
    width = max(12, *(len(label) for label in labels)) if labels else 12
    header = "metric".ljust(14) + "".join(label.rjust(width + 2) for label in labels)
    lines = [header, "-" * len(header)]
    for column in METRIC_COLUMNS:
        cells = []
        for label in labels:
            value = reports[label].as_dict()[column]
            cells.append(f"{value:g}".rjust(width + 2))
        lines.append(column.ljust(14) + "".join(cells))
    return "\n".join(lines)


def write_quality_figure(reports: Mapping[str, QualityReport], path: str | Path) -> Path:
    """Render grouped bars of the quality metrics to an image file."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels = list(reports)
    figure, axes = plt.subplots(figsize=(7.0, 4.0))
    positions = range(len(METRIC_COLUMNS))
    bar_width = 0.8 / max(1, len(labels))
    for k, label in enumerate(labels):
        values = [reports[label].as_dict()[column] for column in METRIC_COLUMNS]
        offsets = [p + k * bar_width for p in positions]
        axes.bar(offsets, values, width=bar_width, label=label)
    axes.set_xticks([p + bar_width * (len(labels) - 1) / 2 for p in positions])
    axes.set_xticklabels(METRIC_COLUMNS)
    axes.set_ylabel("value (slot units)")
    axes.set_title("layout quality")
    if labels:
        axes.legend(frameon=False)
    figure.tight_layout()
    path = Path(path)
    figure.savefig(path, dpi=150)
    plt.close(figure)
    return path
