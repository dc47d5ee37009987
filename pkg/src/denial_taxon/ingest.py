"""Flow records and target profiles: parsing, validation and serialization."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, TextIO

log = logging.getLogger(__name__)

FLOW_FIELDS = ("ts_ms", "src", "dst", "pkts", "bytes", "malicious")


class IngestError(ValueError):
    """A record or profile could not be parsed or failed validation."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class Infra(Enum):
    FIXED = "fixed"
    CLOUD_SCALABLE = "cloud_scalable"
    SERVERLESS = "serverless"

    @property
    def cloud_scalable(self) -> bool:
        # serverless platforms are a kind of scalable cloud infrastructure
        return self is not Infra.FIXED

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class FlowRecord:
    ts_ms: int
    src: str
    dst: str
    pkts: int
    bytes: int
    malicious: bool

    def __post_init__(self):
        for name in ("ts_ms", "pkts", "bytes"):
            if getattr(self, name) < 0:
                raise IngestError("negative value", field=name)
        for name in ("src", "dst"):
            if not getattr(self, name):
                raise IngestError("empty identifier", field=name)

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"))


@dataclass(frozen=True)
class TargetProfile:
    target_id: str
    infra: Infra
    baseline_pkts_per_window: int | None = None

    def to_dict(self) -> dict:
        out = {"infra": self.infra.value}
        if self.baseline_pkts_per_window is not None:
            out["baseline_pkts_per_window"] = self.baseline_pkts_per_window
        return out


def _as_int(value, field: str, line: int) -> int:
    if isinstance(value, bool):
        raise IngestError(f"expected integer, got {value!r}", line, field)
    if isinstance(value, int):
        result = value
    elif isinstance(value, str):
        try:
            result = int(value.strip())
        except ValueError:
            raise IngestError(f"expected integer, got {value!r}", line, field) from None
    else:
        raise IngestError(f"expected integer, got {value!r}", line, field)
    if result < 0:
        raise IngestError("negative", line, field)
    return result


def _as_bool(value, field: str, line: int) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.strip().lower() in ("true", "false"):
        return value.strip().lower() == "true"
    raise IngestError(f"expected true/false, got {value!r}", line, field)


def _as_id(value, field: str, line: int) -> str:
    if not isinstance(value, str) or not value:
        raise IngestError(f"expected nonempty string, got {value!r}", line, field)
    return value


def _record(data: dict, line: int) -> FlowRecord:
    missing = [f for f in FLOW_FIELDS if f not in data]
    if missing:
        raise IngestError("missing", line, missing[0])
    return FlowRecord(
        ts_ms=_as_int(data["ts_ms"], "ts_ms", line),
        src=_as_id(data["src"], "src", line),
        dst=_as_id(data["dst"], "dst", line),
        pkts=_as_int(data["pkts"], "pkts", line),
        bytes=_as_int(data["bytes"], "bytes", line),
        malicious=_as_bool(data["malicious"], "malicious", line),
    )


def _jsonl_rows(lines: Iterable[str]) -> Iterator[tuple[int, dict]]:
    for lineno, text in enumerate(lines, start=1):
        if not text.strip():
            continue
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise IngestError(f"malformed JSON ({exc.msg})", lineno) from None
        if not isinstance(data, dict):
            raise IngestError("expected a JSON object", lineno)
        yield lineno, data


def _csv_rows(lines: Iterable[str]) -> Iterator[tuple[int, dict]]:
    reader = csv.DictReader(lines)
    if reader.fieldnames is None:
        return
    missing = [f for f in FLOW_FIELDS if f not in reader.fieldnames]
    if missing:
        raise IngestError("missing from CSV header", 1, missing[0])
    for row in reader:
        yield reader.line_num, row


@dataclass
class ParseStats:
    accepted: int = 0
    skipped: int = 0


def iter_flows(
    lines: Iterable[str],
    fmt: str = "jsonl",
    strict: bool = True,
    stats: ParseStats | None = None,
) -> Iterator[FlowRecord]:
    """Yield records in input order.

    In lenient mode records that fail validation are logged and counted in
    ``stats`` instead of aborting the parse.
    """
    if fmt == "jsonl":
        rows = _jsonl_rows(lines)
    elif fmt == "csv":
        rows = _csv_rows(lines)
    else:
        raise ValueError(f"unsupported flow format {fmt!r}")
    stats = stats if stats is not None else ParseStats()
    for lineno, data in rows:
        try:
            record = _record(data, lineno)
        except IngestError as exc:
            if strict:
                raise
            log.warning("skipping record: %s", exc)
            stats.skipped += 1
            continue
        stats.accepted += 1
        yield record


def parse_flows(lines: Iterable[str], fmt: str = "jsonl", strict: bool = True,
                stats: ParseStats | None = None) -> list[FlowRecord]:
    return list(iter_flows(lines, fmt, strict, stats))


def format_for_path(path: str | Path) -> str:
    return "csv" if str(path).lower().endswith(".csv") else "jsonl"


def read_flows(path: str | Path, strict: bool = True, stats: ParseStats | None = None) -> list[FlowRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_flows(fh, format_for_path(path), strict, stats)


def write_flows_jsonl(records: Iterable[FlowRecord], out: TextIO) -> None:
    for r in records:
        out.write(r.to_json() + "\n")


def write_flows_csv(records: Iterable[FlowRecord], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(FLOW_FIELDS)
    for r in records:
        writer.writerow([r.ts_ms, r.src, r.dst, r.pkts, r.bytes, "true" if r.malicious else "false"])


def _reject_duplicates(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise IngestError(f"duplicate target_id {key!r}")
        seen[key] = value
    return seen


def parse_target_profiles(text: str) -> dict[str, TargetProfile]:
    try:
        data = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise IngestError(f"malformed target profile JSON ({exc.msg})", exc.lineno) from None
    if not isinstance(data, dict):
        raise IngestError("target profile file must be a JSON object")
    profiles = {}
    for target_id, entry in data.items():
        if not target_id:
            raise IngestError("empty target_id")
        if not isinstance(entry, dict) or "infra" not in entry:
            raise IngestError(f"target {target_id!r} needs an 'infra' value", field="infra")
        try:
            infra = Infra(entry["infra"])
        except ValueError:
            raise IngestError(f"unknown infra {entry['infra']!r} for target {target_id!r}", field="infra") from None
        baseline = entry.get("baseline_pkts_per_window")
        if baseline is not None:
            if isinstance(baseline, bool) or not isinstance(baseline, int) or baseline < 0:
                raise IngestError(
                    f"baseline for {target_id!r} must be a non-negative integer",
                    field="baseline_pkts_per_window",
                )
        profiles[target_id] = TargetProfile(target_id, infra, baseline)
    return profiles


def load_target_profiles(path: str | Path) -> dict[str, TargetProfile]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read target profiles: {exc}") from None
    return parse_target_profiles(text)


def dump_target_profiles(profiles: dict[str, TargetProfile]) -> str:
    return json.dumps({k: p.to_dict() for k, p in sorted(profiles.items())}, indent=2) + "\n"
