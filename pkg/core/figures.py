"""Figure table: one SweepRequest per reproduced figure, read from config/figures.json."""

import json
from pathlib import Path
from typing import Any, Dict, Optional

from core.errors import DomainError
from core.settings import PROJECT_ROOT
from core.sweep import GridSpec, SweepRequest

FIGURES_FILE = PROJECT_ROOT / "config" / "figures.json"
FIGURE_NUMBERS = tuple(range(1, 10))


def load_config(path: Path) -> Dict[str, Any]:
    """Read a JSON configuration file, reporting a missing or malformed file clearly."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise DomainError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise DomainError(f"config file is malformed: {path} ({e})")


def request_from_entry(entry: Dict[str, Any]) -> SweepRequest:
    try:
        grid = entry["grid"]
        return SweepRequest(
            quantity=entry["quantity"],
            grid=GridSpec(float(grid["lo"]), float(grid["hi"]), int(grid["points"]), grid.get("scale", "linear")),
            fixed=dict(entry.get("fixed", {})),
            shape=entry.get("shape", "clarke-jakes"),
            methods=tuple(entry.get("methods", ["numeric"])),
            curves=tuple(dict(c) for c in entry.get("curves", [{}])) or ({},),
        )
    except KeyError as e:
        raise DomainError(f"figure entry is missing field {e}")


def figure_request(number: int, path: Optional[Path] = None) -> SweepRequest:
    if number not in FIGURE_NUMBERS:
        raise DomainError(f"figure number must be 1..9, got {number}")
    table = load_config(path or FIGURES_FILE)
    entry = table.get(str(number))
    if entry is None:
        raise DomainError(f"figure {number} is not defined in {path or FIGURES_FILE}")
    return request_from_entry(entry)


def figure_title(number: int, path: Optional[Path] = None) -> str:
    return load_config(path or FIGURES_FILE).get(str(number), {}).get("title", f"Figure {number}")
