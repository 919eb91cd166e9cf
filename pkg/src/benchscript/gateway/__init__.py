"""HTTP + CLI gateway wiring the workbench modules together."""

from .config import WorkbenchConfig, load_config
from .handlers import Workbench, encode_envelope, envelope_error, envelope_ok
from .service import WorkbenchServer, serve

__all__ = [
    "WorkbenchConfig",
    "load_config",
    "Workbench",
    "encode_envelope",
    "envelope_error",
    "envelope_ok",
    "WorkbenchServer",
    "serve",
]
