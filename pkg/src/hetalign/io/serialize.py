from ..common.exception import DataError
from ..pipeline import RunMetrics

from pathlib import Path
import json


def text_record_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".txt")


def _format_value(value) -> str:
    match value:
        case None:
            return "none"
        case float():
            return f"{value:.6g}"
        case list():
            return " ".join(_format_value(v) for v in value)
        case dict():
            return json.dumps(value, sort_keys=True)
        case _:
            return str(value)


def format_metrics(metrics: RunMetrics) -> str:
    """One `key: value` line per RunMetrics field."""
    return "".join(f"{key}: {_format_value(value)}\n" for key, value in metrics.to_dict().items())


def write_metrics(path: str | Path, metrics: RunMetrics) -> tuple[Path, Path]:
    """Write `path` as JSON and `path.txt` as a one-key-per-line text record.

    Returns:
        The JSON path and the text record path.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(metrics.to_dict(), f, indent=2)
    record = text_record_path(path)
    record.write_text(format_metrics(metrics))
    return path, record


def read_metrics(path: str | Path) -> RunMetrics:
    try:
        with open(path, "r") as f:
            return RunMetrics.from_dict(json.load(f))
    except (OSError, json.JSONDecodeError) as e:
        raise DataError(f"Cannot read metrics: {e}", path=str(path)) from e
