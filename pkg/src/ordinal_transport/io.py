"""CSV ingestion for respondent-level ("long") and aggregated ("counts") files."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

from .core import MAX_K, ObservedSample
from .errors import DataError, EmptyFile, OutOfRangeCategory, ParseError
from .figures import atomic_write

DEFAULT_MISSING_CODES = ("*", "NA", "", "98", "99")


@dataclass(frozen=True)
class DatasetSpec:
    path: str
    format: str = "auto"
    K: int | None = None
    missing_codes: tuple = field(default=DEFAULT_MISSING_CODES)

    def __post_init__(self):
        if self.format not in ("auto", "long", "counts"):
            raise DataError(f"unknown input format {self.format!r}")
        if self.K is not None and not 2 <= self.K <= MAX_K:
            raise DataError(f"K must lie in [2, {MAX_K}], got {self.K}")
        object.__setattr__(self, "missing_codes", tuple(str(c).strip() for c in self.missing_codes))


def _read_rows(path):
    try:
        with open(path, newline="", encoding="utf-8-sig") as fh:
            rows = list(csv.reader(fh))
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not valid UTF-8") from exc
    except csv.Error as exc:
        raise ParseError(f"{path}: malformed CSV: {exc}") from exc
    rows = [[c.strip() for c in r] for r in rows]
    # drop fully blank lines but keep numbering against the file
    numbered = [(k + 1, r) for k, r in enumerate(rows) if any(r)]
    if not numbered:
        raise EmptyFile(f"{path}: file is empty")
    return numbered


def _parse_int(text, row, column):
    try:
        v = int(text)
    except ValueError:
        raise ParseError(f"expected an integer, got {text!r}", row=row, column=column) from None
    return v


def _ingest_long(path, rows, K, missing_codes):
    line, header = rows[0]
    header = [h.lower() for h in header]
    col = header.index("value")
    values, missing = [], 0
    for line, r in rows[1:]:
        if col >= len(r):
            raise ParseError("row is missing the 'value' field", row=line, column="value")
        text = r[col]
        if text in missing_codes:
            missing += 1
            continue
        v = _parse_int(text, line, "value")
        if v < 1 or (K is not None and v > K):
            raise OutOfRangeCategory(f"category {v} outside 1..{K if K else 'K'}", row=line, column="value")
        values.append(v)
    if not values and not missing:
        raise EmptyFile(f"{path}: no respondents after the header")
    if K is None:
        K = max(values, default=2)
        if K < 2:
            K = 2
    if K > MAX_K:
        raise OutOfRangeCategory(f"category {K} exceeds the maximum K={MAX_K}")
    counts = [0] * K
    for v in values:
        counts[v - 1] += 1
    return ObservedSample(tuple(counts), missing)


def _ingest_counts(path, rows, K, missing_codes):
    line, header = rows[0]
    header = [h.lower() for h in header]
    ci, ni = header.index("category"), header.index("count")
    seen: dict[int, int] = {}
    missing = None
    for line, r in rows[1:]:
        if max(ci, ni) >= len(r):
            raise ParseError("row needs both 'category' and 'count'", row=line)
        cat, cnt = r[ci], _parse_int(r[ni], line, "count")
        if cnt < 0:
            raise ParseError(f"negative count {cnt}", row=line, column="count")
        if cat.lower() == "missing" or cat in missing_codes:
            missing = (missing or 0) + cnt
            continue
        k = _parse_int(cat, line, "category")
        if k < 1 or (K is not None and k > K) or k > MAX_K:
            raise OutOfRangeCategory(f"category {k} outside 1..{K if K else MAX_K}", row=line,
                                     column="category")
        if k in seen:
            raise ParseError(f"duplicate category {k}", row=line, column="category")
        seen[k] = cnt
    if not seen and missing is None:
        raise EmptyFile(f"{path}: no count rows after the header")
    if K is None:
        K = max(max(seen, default=2), 2)
    counts = tuple(seen.get(k, 0) for k in range(1, K + 1))
    if sum(counts) + (missing or 0) == 0:
        raise EmptyFile(f"{path}: counts sum to zero")
    return ObservedSample(counts, missing or 0)


def detect_format(header) -> str:
    cols = {h.strip().lower() for h in header}
    if {"category", "count"} <= cols:
        return "counts"
    if "value" in cols:
        return "long"
    raise ParseError("header must contain 'value' (long) or 'category,count' (counts)", row=1)


def ingest(spec: DatasetSpec) -> ObservedSample:
    """Tally a CSV file into an :class:`ObservedSample`."""
    rows = _read_rows(spec.path)
    fmt = spec.format
    detected = detect_format(rows[0][1])
    if fmt == "auto":
        fmt = detected
    elif fmt != detected:
        raise ParseError(f"header does not match the {fmt!r} format", row=1)
    reader = _ingest_long if fmt == "long" else _ingest_counts
    return reader(spec.path, rows, spec.K, set(spec.missing_codes))


def counts_csv(sample: ObservedSample) -> str:
    lines = ["category,count"]
    lines += [f"{k},{c}" for k, c in enumerate(sample.counts, start=1)]
    lines.append(f"missing,{sample.missing}")
    return "\n".join(lines) + "\n"


def write_counts(sample: ObservedSample, path) -> str:
    atomic_write(path, counts_csv(sample))
    return os.fspath(path)


def sample_from_report(report: dict, side: str) -> ObservedSample:
    """Rebuild the ``'source'`` or ``'target'`` sample echoed in a report."""
    s = report["samples"][side]
    return ObservedSample(tuple(s["counts"]), s["missing"])
