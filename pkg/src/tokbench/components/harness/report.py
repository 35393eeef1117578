"""
Evaluation reports rendered as aligned text or RFC-4180 CSV.
"""

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Sequence

from tokbench.utils import ValidationError, format_seconds, safe_write_text

DISPLAY_NAMES = {"subword": "SP", "lattice": "Lattice", "mnb": "MNB", "lr": "LR"}
COLUMNS = ("Tokenizer", "Classifier", "Error-Train", "Error-Test", "Vectorize-s")
# Fields that vary between otherwise identical runs
VOLATILE_FIELDS = ("timestamp", "vectorize_elapsed_seconds")


def display_name(name: str) -> str:
    return DISPLAY_NAMES.get(name, name)


def utc_timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass(frozen=True)
class EvalReport:
    tokenizer: str
    classifier: str
    error_train: float
    error_test: float
    vectorize_elapsed_seconds: float
    train_count: int
    test_count: int
    variant: str = "untuned"
    params: Dict[str, Any] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)
    timestamp: str = field(default_factory=utc_timestamp)

    def __post_init__(self) -> None:
        for name in ("error_train", "error_test"):
            value = getattr(self, name)
            if not 0.0 <= value <= 100.0:
                raise ValidationError(f"{name} must lie in [0, 100], got {value}")

    @property
    def classifier_label(self) -> str:
        label = display_name(self.classifier)
        return label if self.variant == "untuned" else f"{label}-{self.variant}"

    def row(self) -> List[str]:
        return [
            display_name(self.tokenizer),
            self.classifier_label,
            f"{self.error_train:.2f}",
            f"{self.error_test:.2f}",
            format_seconds(self.vectorize_elapsed_seconds),
        ]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def stable_dict(self) -> Dict[str, Any]:
        """to_dict() without the run-to-run volatile fields."""
        return {k: v for k, v in self.to_dict().items() if k not in VOLATILE_FIELDS}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EvalReport":
        return cls(**data)


def render_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Left-aligned columns separated by two spaces."""
    widths = [max(len(str(r[i])) for r in [header, *rows]) for i in range(len(header))]
    lines = [
        "  ".join(str(cell).ljust(w) for cell, w in zip(r, widths)).rstrip()
        for r in [header, *rows]
    ]
    return "\n".join(lines) + "\n"


def render_csv(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buffer = io.StringIO(newline="")
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def emit_report(reports: Sequence[EvalReport], fmt: str = "text") -> bytes:
    """
    Render reports as a Tokenizer/Classifier/Error table.

    Args:
        reports: One or more reports
        fmt: "text" (aligned columns) or "csv"

    Raises:
        ValidationError: If ``reports`` is empty or ``fmt`` is unknown
    """
    if not reports:
        raise ValidationError("No reports to emit")
    rows = [report.row() for report in reports]
    if fmt == "text":
        return render_table(COLUMNS, rows).encode("utf-8")
    if fmt == "csv":
        return render_csv(COLUMNS, rows).encode("utf-8")
    raise ValidationError(f"Unknown report format: {fmt} (choose text or csv)")


def write_report_files(reports: Sequence[EvalReport], directory: str | Path) -> List[Path]:
    """Write report.json and report.txt into ``directory``."""
    directory = Path(directory)
    payload = json.dumps([r.to_dict() for r in reports], indent=2, ensure_ascii=False)
    return [
        safe_write_text(directory / "report.json", payload + "\n"),
        safe_write_text(directory / "report.txt", emit_report(reports).decode("utf-8")),
    ]


def read_report_file(path: str | Path) -> List[EvalReport]:
    with open(path, "r", encoding="utf-8") as f:
        return [EvalReport.from_dict(item) for item in json.load(f)]
