"""
Metric report files.

Per-epoch records are JSON lines with the fields epoch, split, mae, rmse,
train_loss and variant. The summary is one JSON document holding the final
test report, the best validation report and the best epoch. Ablation and
sweep tables are tab-separated with a header row.
"""
import json
from pathlib import Path
from typing import Dict, Iterable, List, Optional

import pandas as pd

from dscf.schema.schemas import MetricReport

EPOCH_FIELDS = {"epoch", "split", "mae", "rmse", "train_loss", "variant"}


def append_report(path, report: MetricReport) -> None:
    with open(Path(path), "a", encoding="utf-8") as handle:
        handle.write(report.json(include=EPOCH_FIELDS) + "\n")


def read_reports(path) -> List[MetricReport]:
    with open(Path(path), encoding="utf-8") as handle:
        return [MetricReport.parse_raw(line) for line in handle if line.strip()]


def write_summary(path, test: MetricReport, validation: Optional[MetricReport] = None,
                  extra: Optional[Dict[str, str]] = None) -> None:
    summary = {
        "test": json.loads(test.json()),
        "validation": json.loads(validation.json()) if validation else None,
        "best_epoch": validation.epoch if validation else test.epoch,
    }
    summary.update(extra or {})
    Path(path).write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")


def write_table(path, rows: Iterable[dict]) -> pd.DataFrame:
    frame = pd.DataFrame(list(rows))
    frame.to_csv(Path(path), sep="\t", index=False, float_format="%.6f")
    return frame
