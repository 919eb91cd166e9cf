"""Capability- and integrity-based execution policies.

A profile is a named identity whose id is derived deterministically from the
name, a set of capabilities gating builtin behavior, and an integrity level.
Files live in an in-memory virtual filesystem whose objects carry per-profile
ACLs and integrity labels; writes enforce no-write-up, reads are capability-
and ACL-gated only.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from pathlib import Path
from typing import Iterable


class SandboxError(Exception):
    """Base error for sandbox configuration problems."""


class EmptyNameError(SandboxError):
    pass


class PathNotFoundError(SandboxError):
    pass


class PolicyError(SandboxError):
    """Raised when a policy document fails validation."""


class Capability(str, Enum):
    CONSOLE_WRITE = "console_write"
    FILE_READ = "file_read"
    FILE_WRITE = "file_write"
    NETWORK = "network"
    HASHING = "hashing"


ALL_CAPABILITIES = frozenset(Capability)


class IntegrityLevel(IntEnum):
    LOW = 0
    MEDIUM = 1
    HIGH = 2
    SYSTEM = 3

    @classmethod
    def parse(cls, name: str) -> "IntegrityLevel":
        try:
            return cls[name.upper()]
        except KeyError:
            raise PolicyError(f"unknown integrity level: {name!r}") from None

    @property
    def label(self) -> str:
        return self.name.lower()


class AccessMode(str, Enum):
    READ = "read"
    WRITE = "write"
    READ_WRITE = "read_write"

    def covers(self, request: "AccessMode") -> bool:
        if self is AccessMode.READ_WRITE:
            return True
        return self is request

    def widen(self, other: "AccessMode") -> "AccessMode":
        if self is other:
            return self
        return AccessMode.READ_WRITE


class DenialReason(str, Enum):
    CAPABILITY = "CapabilityDenied"
    ACL = "AclDenied"
    INTEGRITY = "IntegrityDenied"


@dataclass(frozen=True)
class AccessDecision:
    allowed: bool
    reason: DenialReason | None = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.allowed


ALLOW = AccessDecision(True)


def deny(reason: DenialReason, message: str) -> AccessDecision:
    return AccessDecision(False, reason, message)


PROFILE_ID_RE = re.compile(r"^SB-[0-9a-f]{16}$")


def profile_id(name: str) -> str:
    """Deterministic identity: SB- plus the first 16 hex chars of SHA-256(name)."""
    return "SB-" + hashlib.sha256(name.encode("utf-8")).hexdigest()[:16]


def validate_profile_id(candidate: str) -> str:
    if not PROFILE_ID_RE.match(candidate):
        raise PolicyError(f"malformed profile id: {candidate!r}")
    return candidate


@dataclass(frozen=True)
class SandboxProfile:
    name: str
    id: str
    capabilities: frozenset[Capability]
    integrity: IntegrityLevel

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "id": self.id,
            "capabilities": sorted(c.value for c in self.capabilities),
            "integrity": self.integrity.label,
        }


def create_or_get_profile(
    name: str,
    capabilities: Iterable[Capability] = (),
    integrity: IntegrityLevel = IntegrityLevel.MEDIUM,
) -> SandboxProfile:
    """Build a profile; the id depends on the name only, never on capabilities."""
    if not name:
        raise EmptyNameError("profile name must be non-empty")
    return SandboxProfile(name, profile_id(name), frozenset(capabilities), integrity)


def check_capability(profile: SandboxProfile, cap: Capability) -> bool:
    return cap in profile.capabilities


@dataclass
class FsObject:
    content: bytes
    integrity: IntegrityLevel = IntegrityLevel.MEDIUM
    acl: dict[str, AccessMode] = field(default_factory=dict)

    def clone(self) -> "FsObject":
        return FsObject(self.content, self.integrity, dict(self.acl))


def normalize_path(path: str) -> str:
    """Collapse a path to the canonical absolute form `/a/b`."""
    parts: list[str] = []
    for piece in path.split("/"):
        if piece in ("", "."):
            continue
        if piece == "..":
            if parts:
                parts.pop()
            continue
        parts.append(piece)
    return "/" + "/".join(parts)


class VirtualFs:
    """In-memory filesystem confined to a single run.

    Any entry can serve as the "directory" governing writes below it; the
    nearest existing ancestor's ACL and integrity apply to paths that do not
    exist yet.
    """

    def __init__(self, objects: dict[str, FsObject] | None = None):
        self.objects: dict[str, FsObject] = objects or {}

    def clone(self) -> "VirtualFs":
        return VirtualFs({p: o.clone() for p, o in self.objects.items()})

    def get(self, path: str) -> FsObject | None:
        return self.objects.get(normalize_path(path))

    def put(self, path: str, obj: FsObject) -> None:
        self.objects[normalize_path(path)] = obj

    def nearest_ancestor(self, path: str) -> tuple[str, FsObject] | None:
        cur = normalize_path(path)
        while cur != "/":
            cur = cur.rsplit("/", 1)[0] or "/"
            obj = self.objects.get(cur)
            if obj is not None:
                return cur, obj
        return None


def grant_access(fs: VirtualFs, path: str, profile_id: str, mode: AccessMode) -> VirtualFs:
    """Add or widen an ACL entry. Grants never narrow existing permissions."""
    obj = fs.get(path)
    if obj is None:
        raise PathNotFoundError(f"no filesystem object at {normalize_path(path)}")
    existing = obj.acl.get(profile_id)
    obj.acl[profile_id] = mode if existing is None else existing.widen(mode)
    return fs


def check_fs_access(
    fs: VirtualFs,
    profile: SandboxProfile,
    path: str,
    mode: AccessMode,
) -> AccessDecision:
    """Gate order: capability, then ACL, then (writes only) integrity.

    A request failing several gates reports the first; the ordering is part of
    the contract and observable in tests. For paths that do not exist, the
    nearest existing ancestor entry governs both the ACL and integrity gates.
    """
    if mode is AccessMode.READ_WRITE:
        raise ValueError("access checks take read or write, not read_write")
    needed = Capability.FILE_READ if mode is AccessMode.READ else Capability.FILE_WRITE
    if not check_capability(profile, needed):
        return deny(DenialReason.CAPABILITY, f"profile {profile.name!r} lacks {needed.value}")

    norm = normalize_path(path)
    obj = fs.get(norm)
    governing = obj
    if governing is None:
        found = fs.nearest_ancestor(norm)
        if found is None:
            return deny(DenialReason.ACL, f"no entry governs {norm}")
        governing = found[1]

    granted = governing.acl.get(profile.id)
    if granted is None or not granted.covers(mode):
        return deny(DenialReason.ACL, f"acl does not grant {mode.value} on {norm}")

    if mode is AccessMode.WRITE and governing.integrity > profile.integrity:
        return deny(
            DenialReason.INTEGRITY,
            f"no write-up: object is {governing.integrity.label}, "
            f"profile is {profile.integrity.label}",
        )
    return ALLOW


@dataclass(frozen=True)
class ResourceLimits:
    max_steps: int
    max_heap_cells: int
    max_output_bytes: int
    max_wall_ms: int

    def __post_init__(self) -> None:
        for name in ("max_steps", "max_heap_cells", "max_output_bytes", "max_wall_ms"):
            if getattr(self, name) <= 0:
                raise PolicyError(f"{name} must be strictly positive")

    def to_json(self) -> dict:
        return {
            "max_steps": self.max_steps,
            "max_heap_cells": self.max_heap_cells,
            "max_output_bytes": self.max_output_bytes,
            "max_wall_ms": self.max_wall_ms,
        }

DEFAULT_LIMITS = ResourceLimits(
    max_steps=1_000_000,
    max_heap_cells=100_000,
    max_output_bytes=1_000_000,
    max_wall_ms=2_000,
)


@dataclass(frozen=True)
class ExecutionPolicy:
    profile: SandboxProfile
    limits: ResourceLimits

    def to_json(self) -> dict:
        return {"profile": self.profile.to_json(), "limits": self.limits.to_json()}


def default_policy() -> ExecutionPolicy:
    profile = create_or_get_profile("default", ALL_CAPABILITIES, IntegrityLevel.MEDIUM)
    return ExecutionPolicy(profile, DEFAULT_LIMITS)


# -- policy documents ----------------------------------------------------


def _parse_capabilities(names: list) -> frozenset[Capability]:
    caps = set()
    for name in names:
        try:
            caps.add(Capability(name))
        except ValueError:
            raise PolicyError(f"unknown capability: {name!r}") from None
    return frozenset(caps)


def _parse_acl(entries: list) -> dict[str, AccessMode]:
    acl: dict[str, AccessMode] = {}
    for entry in entries:
        try:
            acl[validate_profile_id(entry["id"])] = AccessMode(entry["mode"])
        except (KeyError, TypeError):
            raise PolicyError(f"malformed acl entry: {entry!r}") from None
        except ValueError:
            raise PolicyError(f"unknown access mode: {entry.get('mode')!r}") from None
    return acl


def policy_from_json(doc: dict) -> tuple[ExecutionPolicy, VirtualFs]:
    """Parse the policy document: profile + limits + fs seed + grants."""
    if not isinstance(doc, dict):
        raise PolicyError("policy document must be a JSON object")
    try:
        prof = doc["profile"]
        profile = create_or_get_profile(
            prof["name"],
            _parse_capabilities(prof.get("capabilities", [])),
            IntegrityLevel.parse(prof.get("integrity", "medium")),
        )
        lim = doc.get("limits", {})
        limits = ResourceLimits(
            max_steps=int(lim.get("max_steps", DEFAULT_LIMITS.max_steps)),
            max_heap_cells=int(lim.get("max_heap_cells", DEFAULT_LIMITS.max_heap_cells)),
            max_output_bytes=int(lim.get("max_output_bytes", DEFAULT_LIMITS.max_output_bytes)),
            max_wall_ms=int(lim.get("max_wall_ms", DEFAULT_LIMITS.max_wall_ms)),
        )
    except PolicyError:
        raise
    except (EmptyNameError, KeyError, TypeError, ValueError) as exc:
        raise PolicyError(f"malformed policy: {exc}") from None

    fs = VirtualFs()
    for entry in doc.get("fs", []):
        try:
            fs.put(
                entry["path"],
                FsObject(
                    content=entry.get("content", "").encode("utf-8"),
                    integrity=IntegrityLevel.parse(entry.get("integrity", "medium")),
                    acl=_parse_acl(entry.get("acl", [])),
                ),
            )
        except (KeyError, TypeError):
            raise PolicyError(f"malformed fs entry: {entry!r}") from None
    for grant in doc.get("grants", []):
        try:
            grant_access(fs, grant["path"], validate_profile_id(grant["id"]),
                         AccessMode(grant["mode"]))
        except PathNotFoundError as exc:
            raise PolicyError(str(exc)) from None
        except (KeyError, TypeError, ValueError):
            raise PolicyError(f"malformed grant entry: {grant!r}") from None
    return ExecutionPolicy(profile, limits), fs


def load_policy_file(path: str | Path) -> tuple[ExecutionPolicy, VirtualFs]:
    with open(path, encoding="utf-8") as fh:
        return policy_from_json(json.load(fh))
