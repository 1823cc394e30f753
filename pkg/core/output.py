"""CSV and JSON writers for sweep tables."""

import csv
import json
import math
from typing import IO, Any, Dict, Iterable, List, NamedTuple, Optional

from core import __version__

COLUMNS = ("curve", "x", "method", "y", "clamped")


class Row(NamedTuple):
    curve: str
    x: float
    method: str
    y: float
    clamped: Optional[bool] = None


def format_float(value: float) -> str:
    if math.isnan(value):
        return "nan"
    return "{:.12g}".format(value)


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def write_csv(rows: Iterable[Row], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])


def _json_value(value: Any) -> Any:
    if isinstance(value, float):
        # round-trip through the CSV precision so both formats carry the same numbers
        return None if math.isnan(value) else float(format_float(value))
    return value


def rows_to_records(rows: Iterable[Row]) -> List[Dict[str, Any]]:
    return [{k: _json_value(v) for k, v in row._asdict().items()} for row in rows]


def write_json(rows: Iterable[Row], parameters: Dict[str, Any], stream: IO[str]) -> None:
    document = {
        "metadata": {"parameters": parameters, "version": __version__},
        "rows": rows_to_records(rows),
    }
    json.dump(document, stream, indent=2, sort_keys=True, allow_nan=False)
    stream.write("\n")


def write_table(rows: List[Row], parameters: Dict[str, Any], stream: IO[str], output_format: str) -> None:
    if output_format == "json":
        write_json(rows, parameters, stream)
    else:
        write_csv(rows, stream)
