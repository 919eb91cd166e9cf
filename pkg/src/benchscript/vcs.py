"""Content-addressed version store for scripts.

Objects are keyed by the SHA-256 of their canonical serialization:

blob    b"blob <decimal byte length>\\n" + content
commit  line-oriented UTF-8, one trailing newline per line:
        commit / script <id> / blob <hash> / [parent <hash>] /
        author <name> <email> / timestamp <RFC3339 UTC> / message <one line>

Histories are single linear chains per script id; every mutation appends.
Restoring an old version appends a new head commit carrying the old blob, so
the audit trail is never rewritten. Timestamps are caller-supplied, which
keeps hashes reproducible; the gateway injects wall-clock time.

A store can live purely in memory or be backed by a directory
(`objects/<first2>/<rest62>`, `heads/<script-id>`) with write-through
persistence.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from pathlib import Path

SCRIPT_ID_RE = re.compile(r"^[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}$")
TIMESTAMP_RE = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z$")
HASH_RE = re.compile(r"^[0-9a-f]{64}$")


class VcsError(Exception):
    pass


class InvalidScriptIdError(VcsError):
    pass


class InvalidTimestampError(VcsError):
    pass


class EmptyAuthorError(VcsError):
    pass


class EmptyMessageError(VcsError):
    pass


class UnknownCommitError(VcsError):
    pass


class ForeignCommitError(VcsError):
    pass


class CorruptObjectError(VcsError):
    pass


def validate_script_id(script_id: str) -> str:
    if not SCRIPT_ID_RE.match(script_id):
        raise InvalidScriptIdError(f"malformed script id: {script_id!r}")
    return script_id


def blob_serialization(content: bytes) -> bytes:
    return b"blob %d\n" % len(content) + content


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _escape_message(message: str) -> str:
    return message.replace("\\", "\\\\").replace("\n", "\\n")


def _unescape_message(escaped: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(escaped):
        if escaped[i] == "\\" and i + 1 < len(escaped):
            out.append("\n" if escaped[i + 1] == "n" else escaped[i + 1])
            i += 2
        else:
            out.append(escaped[i])
            i += 1
    return "".join(out)


@dataclass(frozen=True)
class Blob:
    content: bytes
    hash: str

    @classmethod
    def of(cls, content: bytes) -> "Blob":
        return cls(content, sha256_hex(blob_serialization(content)))


@dataclass(frozen=True)
class Commit:
    parent: str | None
    blob: str
    script_id: str
    author: str
    email: str
    timestamp: str
    message: str
    hash: str

    def to_json(self) -> dict:
        return {
            "hash": self.hash,
            "parent": self.parent,
            "blob": self.blob,
            "script_id": self.script_id,
            "author": self.author,
            "email": self.email,
            "timestamp": self.timestamp,
            "message": self.message,
        }


@dataclass(frozen=True)
class HistoryEntry:
    hash: str
    timestamp: str
    author: str
    message: str

    def to_json(self) -> dict:
        return {
            "hash": self.hash,
            "timestamp": self.timestamp,
            "author": self.author,
            "message": self.message,
        }


@dataclass(frozen=True)
class FsckFinding:
    kind: str  # hash_mismatch | dangling_reference | malformed_object
    detail: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "detail": self.detail}


def commit_serialization(parent: str | None, blob: str, script_id: str, author: str,
                         email: str, timestamp: str, message: str) -> bytes:
    lines = [
        "commit",
        f"script {script_id}",
        f"blob {blob}",
    ]
    if parent is not None:
        lines.append(f"parent {parent}")
    lines.append(f"author {author} {email}")
    lines.append(f"timestamp {timestamp}")
    lines.append(f"message {_escape_message(message)}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_commit(data: bytes) -> Commit:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise CorruptObjectError("commit object is not UTF-8") from None
    lines = text.split("\n")
    if not text.endswith("\n") or lines[0] != "commit":
        raise CorruptObjectError("not a commit object")
    fields: dict[str, str] = {}
    for line in lines[1:-1]:
        key, _, value = line.partition(" ")
        fields[key] = value
    try:
        author_email = fields["author"]
        name, _, email = author_email.rpartition(" ")
        return Commit(
            parent=fields.get("parent"),
            blob=fields["blob"],
            script_id=fields["script"],
            author=name,
            email=email,
            timestamp=fields["timestamp"],
            message=_unescape_message(fields["message"]),
            hash=sha256_hex(data),
        )
    except KeyError as exc:
        raise CorruptObjectError(f"commit object missing field {exc}") from None


class Store:
    """Hash-keyed object map plus per-script head pointers.

    With a root directory, every mutation is written through immediately so
    independent processes (CLI invocations) observe the same state. Mutations
    to a single store must be serialized by the caller; the gateway holds one
    lock per store.
    """

    def __init__(self, root: Path | None = None):
        self.root = root
        self.objects: dict[str, bytes] = {}
        self.heads: dict[str, str] = {}
        if root is not None:
            self._load()

    @classmethod
    def open(cls, root: str | Path) -> "Store":
        return cls(Path(root))

    def _load(self) -> None:
        assert self.root is not None
        objects_dir = self.root / "objects"
        if objects_dir.is_dir():
            for shard in objects_dir.iterdir():
                if not shard.is_dir():
                    continue
                for obj in shard.iterdir():
                    self.objects[shard.name + obj.name] = obj.read_bytes()
        heads_dir = self.root / "heads"
        if heads_dir.is_dir():
            for head in heads_dir.iterdir():
                self.heads[head.name] = head.read_text(encoding="ascii").strip()

    def _persist_object(self, key: str, data: bytes) -> None:
        if self.root is None:
            return
        path = self.root / "objects" / key[:2] / key[2:]
        path.parent.mkdir(parents=True, exist_ok=True)
        if not path.exists():
            path.write_bytes(data)

    def _persist_head(self, script_id: str, commit_hash: str) -> None:
        if self.root is None:
            return
        path = self.root / "heads" / script_id
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(commit_hash, encoding="ascii")

    def put_object(self, data: bytes) -> str:
        key = sha256_hex(data)
        if key not in self.objects:
            self.objects[key] = data
            self._persist_object(key, data)
        return key

    def get_object(self, key: str) -> bytes:
        try:
            return self.objects[key]
        except KeyError:
            raise UnknownCommitError(f"unknown object {key}") from None

    def set_head(self, script_id: str, commit_hash: str) -> None:
        self.heads[script_id] = commit_hash
        self._persist_head(script_id, commit_hash)


def _validated(script_id: str, author: str, email: str, message: str,
               timestamp: str) -> None:
    validate_script_id(script_id)
    if not author:
        raise EmptyAuthorError("author must be non-empty")
    if not email:
        raise EmptyAuthorError("email must be non-empty")
    if not message:
        raise EmptyMessageError("message must be non-empty")
    if not TIMESTAMP_RE.match(timestamp):
        raise InvalidTimestampError(f"timestamp must be RFC 3339 UTC, got {timestamp!r}")


def commit_script(store: Store, script_id: str, content: bytes, author: str,
                  email: str, message: str, timestamp: str) -> Commit:
    """Store the content blob and append a commit advancing the script's head."""
    _validated(script_id, author, email, message, timestamp)
    blob_hash = store.put_object(blob_serialization(content))
    parent = store.heads.get(script_id)
    data = commit_serialization(parent, blob_hash, script_id, author, email,
                                timestamp, message)
    commit_hash = store.put_object(data)
    store.set_head(script_id, commit_hash)
    return parse_commit(data)


def _chain(store: Store, script_id: str) -> list[Commit]:
    head = store.heads.get(script_id)
    commits: list[Commit] = []
    seen: set[str] = set()
    cursor = head
    while cursor is not None:
        if cursor in seen:
            raise CorruptObjectError(f"commit chain for {script_id} has a cycle")
        seen.add(cursor)
        commits.append(parse_commit(store.get_object(cursor)))
        cursor = commits[-1].parent
    return commits


def history(store: Store, script_id: str) -> list[HistoryEntry]:
    """Newest-first walk from the head; unknown scripts have empty history."""
    if script_id not in store.heads:
        return []
    return [HistoryEntry(c.hash, c.timestamp, c.author, c.message)
            for c in _chain(store, script_id)]


def get_version(store: Store, commit_hash: str) -> bytes:
    """The exact bytes committed under the given commit."""
    commit = parse_commit(store.get_object(commit_hash))
    data = store.get_object(commit.blob)
    newline = data.index(b"\n")
    return data[newline + 1:]


def restore(store: Store, script_id: str, commit_hash: str, author: str,
            email: str, timestamp: str) -> Commit:
    """Append a head commit whose content equals the target commit's blob."""
    validate_script_id(script_id)
    if commit_hash not in store.objects:
        raise UnknownCommitError(f"unknown object {commit_hash}")
    if not any(c.hash == commit_hash for c in _chain(store, script_id)):
        raise ForeignCommitError(
            f"commit {commit_hash[:8]} is not in the history of {script_id}")
    content = get_version(store, commit_hash)
    return commit_script(store, script_id, content, author, email,
                         f"Restore {commit_hash[:8]}", timestamp)


def fsck(store: Store) -> list[FsckFinding]:
    """Verify hashes and references; a clean store yields no findings."""
    findings: list[FsckFinding] = []
    valid: set[str] = set()
    for key, data in sorted(store.objects.items()):
        if sha256_hex(data) != key:
            findings.append(FsckFinding("hash_mismatch",
                                        f"object {key} does not hash to its key"))
        else:
            valid.add(key)
    for key in sorted(valid):
        data = store.objects[key]
        if not data.startswith(b"commit\n"):
            continue
        try:
            commit = parse_commit(data)
        except CorruptObjectError as exc:
            findings.append(FsckFinding("malformed_object", f"commit {key}: {exc}"))
            continue
        if commit.blob not in store.objects:
            findings.append(FsckFinding(
                "dangling_reference", f"commit {key} references missing blob {commit.blob}"))
        if commit.parent is not None and commit.parent not in store.objects:
            findings.append(FsckFinding(
                "dangling_reference",
                f"commit {key} references missing parent {commit.parent}"))
    for script_id, head in sorted(store.heads.items()):
        if head not in store.objects:
            findings.append(FsckFinding(
                "dangling_reference", f"head of {script_id} references missing {head}"))
    return findings
