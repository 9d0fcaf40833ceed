"""File-tree dataspace: workspace config, catalog manifest, publish and verify.

A workspace is a directory holding ``reprokg.yaml`` (optional settings),
``catalog.json`` (the manifest) and ``datasets/<id>/`` (published copies).
Writes take an advisory lock on ``.reprokg.lock``.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import yaml
from filelock import FileLock

from . import errors
from .prov import format_timestamp, parse_timestamp
from .rdf.terms import is_valid_iri
from .vocab import ANNOT, HTD, PREFIXES, PROVX, SCM

CONFIG_FILE = "reprokg.yaml"
MANIFEST_FILE = "catalog.json"
LOCK_FILE = ".reprokg.lock"
MANIFEST_VERSION = 1
MEDIA_KINDS = {".ttl": "turtle", ".csv": "csv", ".json": "report"}
DEFAULT_BASE = "http://example.org/lab"


@dataclass
class WorkspaceConfig:
    base_iri: str = DEFAULT_BASE
    prefixes: dict[str, str] = field(default_factory=dict)
    tolerance: Optional[float] = None
    deadband: Optional[float] = None
    rule_profile: Optional[list[str]] = None
    publisher: Optional[str] = None

    @classmethod
    def from_dict(cls, doc: dict) -> "WorkspaceConfig":
        if not isinstance(doc, dict):
            raise errors.InputError(f"{CONFIG_FILE}: expected a mapping")
        base = str(doc.get("baseIri", DEFAULT_BASE))
        if not is_valid_iri(base):
            raise errors.InvalidIri(f"{CONFIG_FILE}: baseIri {base!r} is not absolute")
        tol = doc.get("tolerances") or {}
        profile = doc.get("ruleProfile")
        return cls(
            base_iri=base,
            prefixes={str(k): str(v) for k, v in (doc.get("prefixes") or {}).items()},
            tolerance=None if tol.get("tolerance") is None else float(tol["tolerance"]),
            deadband=None if tol.get("deadband") is None else float(tol["deadband"]),
            rule_profile=None if profile is None else [str(r) for r in profile],
            publisher=None if doc.get("publisher") is None else str(doc["publisher"]),
        )


class Workspace:
    def __init__(self, root: Union[str, Path] = "."):
        self.root = Path(root)
        self.config = self._load_config()

    def _load_config(self) -> WorkspaceConfig:
        path = self.root / CONFIG_FILE
        if not path.exists():
            return WorkspaceConfig()
        try:
            doc = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        except yaml.YAMLError as exc:
            raise errors.InputError(f"{path}: {exc}") from exc
        return WorkspaceConfig.from_dict(doc)

    @property
    def manifest_path(self) -> Path:
        return self.root / MANIFEST_FILE

    def lock(self, timeout: float = 30.0) -> FileLock:
        self.root.mkdir(parents=True, exist_ok=True)
        return FileLock(str(self.root / LOCK_FILE), timeout=timeout)

    def prefixes(self) -> dict[str, str]:
        return {**PREFIXES, **self.config.prefixes}


# manifest


@dataclass(frozen=True)
class FileEntry:
    relative_path: str
    media_kind: str
    sha256: str

    def as_dict(self) -> dict:
        return {"mediaKind": self.media_kind, "relativePath": self.relative_path, "sha256": self.sha256}


@dataclass
class DatasetDescriptor:
    id: str
    title: str
    publisher: str
    files: list[FileEntry]
    conforms_to: list[str]
    created_at: str

    def as_dict(self) -> dict:
        return {
            "conformsTo": list(self.conforms_to),
            "createdAt": self.created_at,
            "files": [f.as_dict() for f in self.files],
            "id": self.id,
            "publisher": self.publisher,
            "title": self.title,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "DatasetDescriptor":
        try:
            return cls(
                id=str(doc["id"]),
                title=str(doc.get("title", "")),
                publisher=str(doc.get("publisher", "")),
                files=[FileEntry(f["relativePath"], f["mediaKind"], f["sha256"]) for f in doc.get("files", [])],
                conforms_to=[str(x) for x in doc.get("conformsTo", [])],
                created_at=str(doc["createdAt"]),
            )
        except (KeyError, TypeError) as exc:
            raise errors.InputError(f"malformed catalog entry: {doc!r}") from exc


@dataclass
class Manifest:
    datasets: list[DatasetDescriptor] = field(default_factory=list)

    def get(self, dataset_id: str) -> Optional[DatasetDescriptor]:
        return next((d for d in self.datasets if d.id == dataset_id), None)

    def as_dict(self) -> dict:
        return {"datasets": [d.as_dict() for d in sorted(self.datasets, key=lambda d: d.id)], "version": MANIFEST_VERSION}

    def dumps(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Manifest":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise errors.SyntaxError(f"catalog manifest: {exc.msg}", exc.lineno, exc.colno) from exc
        if not isinstance(doc, dict) or doc.get("version") != MANIFEST_VERSION:
            raise errors.InputError(f"catalog manifest: unsupported version {doc.get('version') if isinstance(doc, dict) else None!r}")
        ds = [DatasetDescriptor.from_dict(d) for d in doc.get("datasets", [])]
        ids = [d.id for d in ds]
        if len(set(ids)) != len(ids):
            raise errors.InputError("catalog manifest: duplicate dataset ids")
        return cls(ds)


def load_manifest(ws: Workspace) -> Manifest:
    if not ws.manifest_path.exists():
        return Manifest()
    return Manifest.loads(ws.manifest_path.read_text(encoding="utf-8"))


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_path(path: Union[str, Path]) -> str:
    return sha256_bytes(Path(path).read_bytes())


def media_kind(path: Union[str, Path]) -> str:
    kind = MEDIA_KINDS.get(Path(path).suffix.lower())
    if kind is None:
        raise errors.InputError(f"{path}: cannot publish files of type {Path(path).suffix or '(none)'!r}")
    return kind


_VOCAB_NAMESPACES = (str(ANNOT), str(HTD), str(PROVX), str(SCM), PREFIXES["prov"])


def conforms_to(turtle_texts: Iterable[str]) -> list[str]:
    """Vocabulary namespaces used by some triple in the given Turtle documents."""
    from .turtle import parse_turtle

    found = set()
    for text in turtle_texts:
        for t in parse_turtle(text):
            for term in (t.predicate, t.object):
                value = getattr(term, "value", None)
                if isinstance(value, str):
                    found.update(ns for ns in _VOCAB_NAMESPACES if value.startswith(ns))
    return sorted(found)


def _dataset_dir(dataset_id: str) -> str:
    if not dataset_id or "/" in dataset_id or "\\" in dataset_id or dataset_id in (".", ".."):
        raise errors.InputError(f"invalid dataset id {dataset_id!r}")
    return f"datasets/{dataset_id}"


def verify_entry(ws: Workspace, entry: DatasetDescriptor) -> None:
    for f in entry.files:
        path = ws.root / f.relative_path
        if not path.exists():
            raise errors.ChecksumMismatch(f.relative_path, f.sha256, "missing")
        actual = sha256_path(path)
        if actual != f.sha256:
            raise errors.ChecksumMismatch(f.relative_path, f.sha256, actual)


def verify(ws: Workspace) -> list[str]:
    """Check every published file against the manifest; returns the paths checked."""
    manifest = load_manifest(ws)
    checked = []
    for entry in manifest.datasets:
        verify_entry(ws, entry)
        checked.extend(f.relative_path for f in entry.files)
    return checked


def publish(
    ws: Workspace,
    dataset_id: str,
    files: Sequence[Union[str, Path]],
    title: Optional[str] = None,
    publisher: Optional[str] = None,
    created_at: Optional[str] = None,
) -> DatasetDescriptor:
    """Copy files into the workspace and record them in the manifest.

    Re-publishing unchanged files leaves the manifest byte-identical (the
    original createdAt is kept). A published copy that no longer matches its
    recorded checksum raises ChecksumMismatch before anything is written.
    """
    if not files:
        raise errors.InputError("nothing to publish")
    sources = [Path(f) for f in files]
    for src in sources:
        if not src.is_file():
            raise errors.InputError(f"{src}: no such file")
        media_kind(src)
    names = [s.name for s in sources]
    if len(set(names)) != len(names):
        raise errors.InputError("published files must have distinct names")
    subdir = _dataset_dir(dataset_id)

    with ws.lock():
        manifest = load_manifest(ws)
        old = manifest.get(dataset_id)
        if old is not None:
            verify_entry(ws, old)
        entries = []
        ttl_texts = []
        payloads = []
        for src in sources:
            data = src.read_bytes()
            rel = f"{subdir}/{src.name}"
            entries.append(FileEntry(rel, media_kind(src), sha256_bytes(data)))
            payloads.append((rel, data))
            if src.suffix.lower() == ".ttl":
                ttl_texts.append(data.decode("utf-8"))
        entries.sort(key=lambda e: e.relative_path)
        if created_at is not None:
            stamp = format_timestamp(parse_timestamp(created_at))
        elif old is not None:
            stamp = old.created_at
        else:
            stamp = format_timestamp(datetime.now(timezone.utc).replace(microsecond=0))
        desc = DatasetDescriptor(
            id=dataset_id,
            title=title if title is not None else (old.title if old else dataset_id),
            publisher=publisher or (old.publisher if old else None) or ws.config.publisher or "unknown",
            files=entries,
            conforms_to=conforms_to(ttl_texts),
            created_at=stamp,
        )
        if old is not None and old.as_dict() == desc.as_dict():
            return old
        if old is not None:
            for f in old.files:
                if f.relative_path not in {e.relative_path for e in entries}:
                    (ws.root / f.relative_path).unlink(missing_ok=True)
        for rel, data in payloads:
            dest = ws.root / rel
            dest.parent.mkdir(parents=True, exist_ok=True)
            if not dest.exists() or dest.read_bytes() != data:
                tmp = dest.with_name(dest.name + ".tmp")
                tmp.write_bytes(data)
                os.replace(tmp, dest)
        manifest.datasets = [d for d in manifest.datasets if d.id != dataset_id] + [desc]
        _atomic_write(ws.manifest_path, manifest.dumps())
        return desc


__all__ = [
    "CONFIG_FILE", "DatasetDescriptor", "FileEntry", "LOCK_FILE", "MANIFEST_FILE", "Manifest", "Workspace",
    "WorkspaceConfig", "conforms_to", "load_manifest", "media_kind", "publish", "sha256_path", "verify",
    "verify_entry",
]
