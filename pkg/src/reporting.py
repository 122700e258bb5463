"""Run reports and artifact persistence (UTF-8 JSON, RFC-4180 CSV)."""

import csv
import json
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Union

from pydantic import BaseModel, Field

from src.config import config
from src.enums import ErrorInfo
from src.errors import InvalidArgumentError

EXACT = "exact"


def quantity(value: Any, error: Optional[float] = None) -> Dict[str, Any]:
    """A reported value with its error bound, or the token "exact"."""
    return {"value": value, "error": EXACT if not error else error}


class RunReport(BaseModel):
    """Per-invocation report; the only output that carries timings."""
    schema_tag: str = Field(default_factory=lambda: config.schema_tag, serialization_alias="schema")
    command: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    results: Dict[str, Any] = Field(default_factory=dict)
    timings: Dict[str, float] = Field(default_factory=dict)
    error: Optional[ErrorInfo] = None

    @contextmanager
    def timed(self, step: str) -> Iterator[None]:
        """Record the wall-clock duration of a step."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[step] = round(time.perf_counter() - start, 6)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json", by_alias=True), indent=2, ensure_ascii=False)


def write_json(path: Union[str, Path], payload: Mapping[str, Any]) -> Path:
    """Write an artifact with the schema tag first; output is byte-stable for equal payloads."""
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    document = {"schema": config.schema_tag, **payload}
    path.write_text(json.dumps(document, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def read_json(path: Union[str, Path]) -> Dict[str, Any]:
    """Read an artifact and check its schema tag."""
    path = Path(path)
    if not path.exists():
        raise InvalidArgumentError(f"file not found: {path}")
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InvalidArgumentError(f"{path} is not valid JSON: {e}") from e
    tag = document.get("schema")
    if tag != config.schema_tag:
        raise InvalidArgumentError(f"{path} has schema {tag!r}, expected {config.schema_tag!r}")
    return document


def write_csv(path: Union[str, Path], header: Sequence[str], rows: Sequence[Sequence[Any]]) -> Path:
    """RFC-4180 CSV with CRLF line endings."""
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\r\n")
        writer.writerow(list(header))
        writer.writerows([list(row) for row in rows])
    return path


def read_csv(path: Union[str, Path]) -> List[Dict[str, str]]:
    with Path(path).open("r", encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))
