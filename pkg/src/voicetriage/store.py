"""Append-only JSON-lines document store, partitioned by subject."""

from __future__ import annotations

import hashlib
import json
import os
import threading
from datetime import datetime
from pathlib import Path


class StorageUnavailable(RuntimeError):
    """The backing directory cannot be read or written."""


def record_id_for(record: dict) -> str:
    """Content hash over the identifying fields; the idempotency key."""
    canonical = json.dumps(
        {
            "subject_id": record["subject_id"],
            "device_id": record["device_id"],
            "recorded_at": record["recorded_at"],
            "vector": list(record["vector"]),
        },
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(canonical.encode()).hexdigest()


class FeatureStore:
    """Durable feature-record log.

    One JSONL file per subject plus an index file naming the partitions.
    Appends are flushed and fsynced before acknowledgment; replays of a
    record already stored return its original id without writing.
    """

    INDEX_NAME = "index.jsonl"

    def __init__(self, data_dir):
        self.data_dir = Path(data_dir)
        self._lock = threading.Lock()
        self._records: dict[str, list[dict]] = {}
        self._ids: set[str] = set()
        self._files: dict[str, str] = {}
        self._load()

    def _load(self) -> None:
        try:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            index = self.data_dir / self.INDEX_NAME
            if not index.exists():
                return
            for line in index.read_text().splitlines():
                if not line.strip():
                    continue
                entry = json.loads(line)
                self._files[entry["subject_id"]] = entry["file"]
            for sid, name in self._files.items():
                path = self.data_dir / name
                rows = []
                if path.exists():
                    for line in path.read_text().splitlines():
                        if not line.strip():
                            continue
                        rec = json.loads(line)
                        rows.append(rec)
                        self._ids.add(rec["record_id"])
                self._records[sid] = rows
        except OSError as exc:
            raise StorageUnavailable(str(exc)) from exc

    def _partition_name(self, subject_id: str) -> str:
        return hashlib.sha1(subject_id.encode()).hexdigest()[:16] + ".jsonl"

    def _append_line(self, path: Path, payload: dict) -> None:
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(payload, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def append(self, record: dict) -> tuple[str, bool]:
        """Store a record; returns (record_id, created)."""
        rid = record_id_for(record)
        with self._lock:
            if rid in self._ids:
                return rid, False
            sid = record["subject_id"]
            try:
                if sid not in self._files:
                    name = self._partition_name(sid)
                    self._append_line(
                        self.data_dir / self.INDEX_NAME, {"subject_id": sid, "file": name}
                    )
                    self._files[sid] = name
                    self._records.setdefault(sid, [])
                stored = dict(record)
                stored["record_id"] = rid
                self._append_line(self.data_dir / self._files[sid], stored)
            except OSError as exc:
                raise StorageUnavailable(str(exc)) from exc
            self._records[sid].append(stored)
            self._ids.add(rid)
            return rid, True

    def records_for(
        self, subject_id: str, start: datetime | None = None, end: datetime | None = None
    ) -> list[dict]:
        """Stored records for a subject in recorded_at order (empty if unknown)."""
        with self._lock:
            rows = list(self._records.get(subject_id, ()))
        rows.sort(key=lambda r: datetime.fromisoformat(r["recorded_at"]))
        if start is not None:
            rows = [r for r in rows if datetime.fromisoformat(r["recorded_at"]) >= start]
        if end is not None:
            rows = [r for r in rows if datetime.fromisoformat(r["recorded_at"]) <= end]
        return rows

    def subject_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._records)

    def __len__(self) -> int:
        with self._lock:
            return sum(len(rows) for rows in self._records.values())
