"""Content-addressed molecule store on the local file system.

Layout under the data directory::

    molecules/<serverId>.json   one record per molecule, written atomically
    index.json                  metadata cache, rebuilt from the records

A record is only ever made visible by ``os.replace`` of a fully written and
fsynced temporary file, so a crash leaves either the old state or the new
one. Stray ``.tmp-*`` files from interrupted writes are ignored and swept on
startup.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .metadata import Metadata

log = logging.getLogger(__name__)

TMP_PREFIX = ".tmp-"


def content_id(canonical_text: str) -> str:
    return hashlib.sha256(canonical_text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class StoredMolecule:
    server_id: str
    source_format: str
    document: str
    metadata: Metadata
    created_at: str

    def to_json(self) -> dict:
        return {
            "id": self.server_id,
            "sourceFormat": self.source_format,
            "createdAt": self.created_at,
            "metadata": self.metadata.to_json(),
            "document": self.document,
        }

    @classmethod
    def from_json(cls, raw: dict) -> "StoredMolecule":
        return cls(
            server_id=raw["id"],
            source_format=raw["sourceFormat"],
            document=raw["document"],
            metadata=Metadata.from_json(raw["metadata"]),
            created_at=raw["createdAt"],
        )


@dataclass(frozen=True)
class IndexEntry:
    server_id: str
    source_format: str
    metadata: Metadata
    created_at: str

    def summary(self) -> dict:
        return {"id": self.server_id, "sourceFormat": self.source_format,
                "createdAt": self.created_at, **self.metadata.to_json()}


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(prefix=TMP_PREFIX, dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


class FileStore:
    """Single-writer store; readers see an immutable index snapshot."""

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self.records = self.root / "molecules"
        self.records.mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.Lock()
        self._index: dict[str, IndexEntry] = {}
        self.rebuild_index()

    def _record_path(self, server_id: str) -> Path:
        return self.records / f"{server_id}.json"

    def rebuild_index(self) -> dict[str, IndexEntry]:
        """Rescan the record files; skips anything that is not a complete record."""
        index = {}
        for path in sorted(self.records.iterdir()):
            if path.name.startswith(TMP_PREFIX):
                log.info("removing interrupted write %s", path.name)
                path.unlink(missing_ok=True)
                continue
            if path.suffix != ".json":
                continue
            try:
                rec = StoredMolecule.from_json(json.loads(path.read_text("utf-8")))
            except (OSError, ValueError, KeyError) as exc:
                log.warning("skipping unreadable record %s: %s", path.name, exc)
                continue
            if rec.server_id != path.stem or content_id(rec.document) != rec.server_id:
                log.warning("skipping record %s: id does not match content", path.name)
                continue
            index[rec.server_id] = IndexEntry(rec.server_id, rec.source_format, rec.metadata, rec.created_at)
        with self._write_lock:
            self._index = index
            self._persist_index()
        return index

    def _persist_index(self) -> None:
        entries = [e.summary() for e in self._index.values()]
        _atomic_write(self.root / "index.json", json.dumps(entries, indent=1))

    def __contains__(self, server_id: str) -> bool:
        return server_id in self._index

    def __len__(self) -> int:
        return len(self._index)

    def put(self, source_format: str, canonical_text: str, metadata: Metadata) -> tuple[str, bool]:
        """Store a canonical document; returns ``(serverId, created)``."""
        server_id = content_id(canonical_text)
        with self._write_lock:
            if server_id in self._index:
                return server_id, False
            rec = StoredMolecule(server_id, source_format, canonical_text, metadata,
                                 datetime.now(timezone.utc).isoformat())
            _atomic_write(self._record_path(server_id), json.dumps(rec.to_json()))
            index = dict(self._index)
            index[server_id] = IndexEntry(server_id, source_format, metadata, rec.created_at)
            self._index = index
            self._persist_index()
        return server_id, True

    def get(self, server_id: str) -> StoredMolecule | None:
        if server_id not in self._index:
            return None
        try:
            return StoredMolecule.from_json(json.loads(self._record_path(server_id).read_text("utf-8")))
        except FileNotFoundError:
            return None

    def delete(self, server_id: str) -> bool:
        with self._write_lock:
            if server_id not in self._index:
                return False
            self._record_path(server_id).unlink(missing_ok=True)
            index = dict(self._index)
            del index[server_id]
            self._index = index
            self._persist_index()
        return True

    def query(self, formula: str | None = None, element: str | None = None,
              limit: int = 25, offset: int = 0) -> tuple[list[IndexEntry], int]:
        """Matches newest first (ties by id), paged; also returns the total match count."""
        snapshot = self._index
        hits = [
            e for e in snapshot.values()
            if (formula is None or e.metadata.formula == formula)
            and (element is None or element in e.metadata.element_set)
        ]
        hits.sort(key=lambda e: e.server_id)
        hits.sort(key=lambda e: e.created_at, reverse=True)
        return hits[offset:offset + limit], len(hits)
