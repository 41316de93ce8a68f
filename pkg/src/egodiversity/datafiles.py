"""File formats: edge lists, popularity/covariate CSVs, metric tables.

Edge lists are UTF-8 text, one ``<follower>\\t<followee>`` pair per line,
with ``#`` comments and blank lines ignored.  CSV files written by this
package start with a ``# schema: <name>/<version>`` comment line that the
readers validate; column names are checked as well.
"""

from __future__ import annotations

import csv
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np

from .graph import FollowGraph
from .reputation import PopularityRecord

METRICS_SCHEMA = "egodiversity.metrics/1"
REPUTATION_SCHEMA = "egodiversity.reputation/1"

POPULARITY_COLUMNS = ("user", "upvotes", "thanks", "favorites")


class EdgeListFormatError(ValueError):
    """Malformed edge-list line; carries the 1-based line number."""

    def __init__(self, path: str, lineno: int, reason: str):
        super().__init__(f"{path}:{lineno}: {reason}")
        self.path = path
        self.lineno = lineno
        self.reason = reason


class SchemaError(ValueError):
    """CSV header does not match the expected schema."""


def read_edge_array(path: str) -> np.ndarray:
    """Parse an edge-list file into an (E, 2) int64 array."""
    src: list[int] = []
    dst: list[int] = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise EdgeListFormatError(
                    path, lineno, f"expected two tab-separated fields, got {len(parts)}"
                )
            try:
                u = int(parts[0])
                v = int(parts[1])
            except ValueError:
                raise EdgeListFormatError(path, lineno, f"non-integer node id in {line!r}") from None
            if u < 0 or v < 0:
                raise EdgeListFormatError(path, lineno, "node ids must be non-negative")
            src.append(u)
            dst.append(v)
    if not src:
        return np.empty((0, 2), dtype=np.int64)
    return np.column_stack([np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64)])


def read_edge_list(path: str) -> FollowGraph:
    return FollowGraph.from_edge_list(read_edge_array(path))


def write_edge_list(edges: Iterable[tuple[int, int]], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for u, v in edges:
            f.write(f"{u}\t{v}\n")


def read_ego_list(path: str) -> list[int]:
    """One ego id per line; comments and blanks ignored."""
    out: list[int] = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                out.append(int(line))
            except ValueError:
                raise EdgeListFormatError(path, lineno, f"non-integer ego id {line!r}") from None
    return out


def write_ego_list(egos: Iterable[int], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for e in egos:
            f.write(f"{e}\n")


def _open_csv(path: str) -> tuple[TextIO, Optional[str]]:
    """Open a CSV, consuming an optional leading schema comment."""
    f = open(path, "r", encoding="utf-8", newline="")
    pos = f.tell()
    first = f.readline()
    schema = None
    if first.startswith("# schema:"):
        schema = first[len("# schema:"):].strip()
    else:
        f.seek(pos)
    return f, schema


def read_popularity(path: str) -> list[PopularityRecord]:
    """Read the ``user,upvotes,thanks,favorites`` CSV."""
    f, _ = _open_csv(path)
    with f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file")
        missing = [c for c in POPULARITY_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        idx = [header.index(c) for c in POPULARITY_COLUMNS]
        records: list[PopularityRecord] = []
        for rowno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                user, up, th, fa = (int(row[i]) for i in idx)
            except (ValueError, IndexError):
                raise SchemaError(f"{path}: row {rowno}: malformed integer field") from None
            if min(up, th, fa) < 0:
                raise SchemaError(f"{path}: row {rowno}: negative count")
            records.append(PopularityRecord(user=user, upvotes=up, thanks=th, favorites=fa))
    return records


def write_popularity(records: Sequence[PopularityRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("user,upvotes,thanks,favorites\n")
        for r in records:
            f.write(f"{r.user},{r.upvotes},{r.thanks},{r.favorites}\n")


def read_table(path: str, expected_schema: Optional[str] = None) -> tuple[list[str], list[list[str]]]:
    """Generic CSV read returning (header, rows); validates the schema
    comment when ``expected_schema`` is given and the file carries one."""
    f, schema = _open_csv(path)
    with f:
        if expected_schema is not None and schema is not None and schema != expected_schema:
            raise SchemaError(f"{path}: schema {schema!r}, expected {expected_schema!r}")
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file")
        rows = [row for row in reader if row]
    return header, rows


def table_column(header: list[str], rows: list[list[str]], name: str) -> list[str]:
    if name not in header:
        raise SchemaError(f"missing column {name!r} (have: {', '.join(header)})")
    i = header.index(name)
    return [row[i] for row in rows]


def write_csv(
    path_or_file: str | TextIO,
    header: Sequence[str],
    rows: Iterable[Sequence[object]],
    schema: Optional[str] = None,
) -> None:
    """Write rows with deterministic formatting (repr for floats)."""

    def _fmt(x: object) -> str:
        if x is None:
            return ""
        if isinstance(x, float):
            return repr(x)
        return str(x)

    own = isinstance(path_or_file, str)
    f = open(path_or_file, "w", encoding="utf-8", newline="\n") if own else path_or_file
    try:
        if schema:
            f.write(f"# schema: {schema}\n")
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(x) for x in row) + "\n")
    finally:
        if own:
            f.close()
