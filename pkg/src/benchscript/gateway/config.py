"""Workbench configuration: listen address, store path, policy, rulesets."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

DEFAULT_LISTEN = "127.0.0.1:7878"
DEFAULT_MAX_BODY = 1_048_576

ENV_CONFIG = "BENCH_CONFIG"


class ConfigError(Exception):
    pass


@dataclass
class WorkbenchConfig:
    listen: str = DEFAULT_LISTEN
    store: str | None = None
    default_policy: str | None = None
    rulesets: list[str] = field(default_factory=list)
    max_body_bytes: int = DEFAULT_MAX_BODY

    def __post_init__(self) -> None:
        if self.max_body_bytes <= 0:
            raise ConfigError("max_body_bytes must be strictly positive")

    @property
    def host_port(self) -> tuple[str, int]:
        host, _, port = self.listen.rpartition(":")
        try:
            return host or "127.0.0.1", int(port)
        except ValueError:
            raise ConfigError(f"malformed listen address: {self.listen!r}") from None


def load_config(path: str | Path | None = None) -> WorkbenchConfig:
    """Read the config file named by `path`, $BENCH_CONFIG, or use defaults."""
    chosen = path or os.environ.get(ENV_CONFIG)
    if chosen is None:
        return WorkbenchConfig()
    try:
        with open(chosen, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {chosen}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {chosen} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    try:
        return WorkbenchConfig(
            listen=doc.get("listen", DEFAULT_LISTEN),
            store=doc.get("store"),
            default_policy=doc.get("default_policy"),
            rulesets=list(doc.get("rulesets", [])),
            max_body_bytes=int(doc.get("max_body_bytes", DEFAULT_MAX_BODY)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config: {exc}") from None
