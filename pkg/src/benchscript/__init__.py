"""benchscript: a self-contained workbench for small extension scripts.

Write scripts in BenchScript, decorate them with declarative augmentation
rules, lint them with tree-based analyzers and automated fixes, execute them
under capability/integrity sandbox policies, and version them in a
content-addressed store. Everything is callable as a library, over HTTP, or
from the `bench` CLI.
"""

__version__ = "0.1.0"
