"""Snapshot file ingestion: JSON and CSV parsing, validation and normalization.

Canonical JSON schema (UTF-8, stakes as decimal strings so 128-bit magnitudes
survive):

    {"chain": "...", "captured_at": "2024-10-25T00:00:00Z",
     "validators": [{"id": "...", "stake": "123"}, ...]}

CSV inputs carry a literal ``id,stake`` header and one record per line.
Parsed snapshots are normalized to descending stake, ties broken by ascending
id.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .errors import EmptySetError, ParseError, ZeroStakeError
from .model import StakeSnapshot, ValidatorRecord

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


def _parse_timestamp(raw: str, origin: str) -> datetime:
    text = raw.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(text)
    except ValueError as exc:
        raise ParseError(f"{origin}: bad captured_at timestamp {raw!r}") from exc
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _parse_stake(raw, vid: str, origin: str) -> int:
    if isinstance(raw, bool):
        raise ParseError(f"{origin}: stake of {vid!r} must be an integer")
    if isinstance(raw, int):
        stake = raw
    elif isinstance(raw, str):
        text = raw.strip()
        sign = text[1:] if text.startswith("-") else text
        if not sign.isdigit():
            raise ParseError(f"{origin}: stake of {vid!r} is not a decimal integer: {raw!r}")
        stake = int(text)
    else:
        raise ParseError(f"{origin}: stake of {vid!r} must be an integer, got {type(raw).__name__}")
    if stake <= 0:
        raise ZeroStakeError(f"{origin}: validator {vid!r} has non-positive stake {stake}")
    return stake


def _normalize(records: list[ValidatorRecord], chain: str, captured_at: datetime,
               origin: str) -> StakeSnapshot:
    if not records:
        raise EmptySetError(f"{origin}: snapshot has no validators")
    seen: set[str] = set()
    for rec in records:
        if rec.id in seen:
            raise ParseError(f"{origin}: duplicate validator id {rec.id!r}")
        seen.add(rec.id)
    records.sort(key=lambda rec: (-rec.stake, rec.id))
    return StakeSnapshot(chain=chain, captured_at=captured_at, validators=tuple(records))


def _parse_json_text(text: str, origin: str) -> StakeSnapshot:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{origin}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{origin}: top level must be an object")
    for key in ("chain", "captured_at", "validators"):
        if key not in doc:
            raise ParseError(f"{origin}: missing key {key!r}")
    chain = doc["chain"]
    if not isinstance(chain, str) or not chain:
        raise ParseError(f"{origin}: chain must be a non-empty string")
    captured_at = _parse_timestamp(str(doc["captured_at"]), origin)
    raw_validators = doc["validators"]
    if not isinstance(raw_validators, list):
        raise ParseError(f"{origin}: validators must be a list")
    records: list[ValidatorRecord] = []
    for pos, entry in enumerate(raw_validators):
        if not isinstance(entry, dict) or "id" not in entry or "stake" not in entry:
            raise ParseError(f"{origin}: validator #{pos} must be an object with id and stake")
        vid = entry["id"]
        if not isinstance(vid, str) or not vid:
            raise ParseError(f"{origin}: validator #{pos} has a bad id")
        records.append(ValidatorRecord(id=vid, stake=_parse_stake(entry["stake"], vid, origin)))
    return _normalize(records, chain, captured_at, origin)


def _parse_csv_text(text: str, origin: str, chain: str) -> StakeSnapshot:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptySetError(f"{origin}: empty CSV") from None
    if [col.strip() for col in header] != ["id", "stake"]:
        raise ParseError(f"{origin}: CSV header must be 'id,stake'")
    records: list[ValidatorRecord] = []
    for row in reader:
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise ParseError(f"{origin}: CSV row {row!r} must have exactly id and stake")
        vid = row[0].strip()
        if not vid:
            raise ParseError(f"{origin}: CSV row with empty id")
        records.append(ValidatorRecord(id=vid, stake=_parse_stake(row[1], vid, origin)))
    return _normalize(records, chain, _EPOCH, origin)


def parse_snapshot(source, fmt: str | None = None) -> StakeSnapshot:
    """Parse a snapshot from a path, text, bytes or file-like object.

    The format is inferred from the file extension unless ``fmt`` ("json" or
    "csv") overrides it.
    """
    origin = "<stream>"
    chain_hint = "snapshot"
    if isinstance(source, (str, os.PathLike)):
        path = Path(source)
        origin = str(path)
        chain_hint = path.stem or chain_hint
        if fmt is None:
            suffix = path.suffix.lower()
            if suffix == ".json":
                fmt = "json"
            elif suffix == ".csv":
                fmt = "csv"
            else:
                raise ParseError(f"{origin}: cannot infer format from extension {suffix!r}")
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"{origin}: cannot read file: {exc}") from exc
    elif isinstance(source, bytes):
        text = source.decode("utf-8")
    elif hasattr(source, "read"):
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
        origin = getattr(source, "name", origin)
    else:
        raise ParseError(f"unsupported snapshot source {type(source).__name__}")
    if fmt == "json":
        return _parse_json_text(text, origin)
    if fmt == "csv":
        return _parse_csv_text(text, origin, chain_hint)
    raise ParseError(f"{origin}: format must be 'json' or 'csv', got {fmt!r}")


def _iso_z(ts: datetime) -> str:
    text = ts.astimezone(timezone.utc).isoformat()
    return text.replace("+00:00", "Z")


def snapshot_to_json(snapshot: StakeSnapshot) -> str:
    """Serialize to the canonical JSON schema (stakes as decimal strings)."""
    doc = {
        "chain": snapshot.chain,
        "captured_at": _iso_z(snapshot.captured_at),
        "validators": [
            {"id": rec.id, "stake": str(rec.stake)} for rec in snapshot.validators
        ],
    }
    return json.dumps(doc, indent=2)


def write_snapshot(snapshot: StakeSnapshot, path) -> None:
    Path(path).write_text(snapshot_to_json(snapshot) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class SnapshotSummary:
    m: int
    total_stake: int
    min_stake: int
    median_stake: int
    max_stake: int


def summarize_snapshot(snapshot: StakeSnapshot) -> SnapshotSummary:
    """Headline stake statistics; the median is the lower-middle element for even m."""
    stakes = sorted(rec.stake for rec in snapshot.validators)
    m = len(stakes)
    return SnapshotSummary(
        m=m,
        total_stake=sum(stakes),
        min_stake=stakes[0],
        median_stake=stakes[(m - 1) // 2],
        max_stake=stakes[-1],
    )
