"""Error types shared across the package.

Every failure mode carries a stable machine-readable ``code`` (kebab-case)
that the CLI prints to stderr and the HTTP service returns in the ``error``
field, so callers can match on codes rather than message text.
"""

from __future__ import annotations


class EngineError(Exception):
    """Numerical or precondition failure inside the engine."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code

    def __str__(self) -> str:
        return f"{self.code}: {super().__str__()}"


class ConfigError(Exception):
    """Malformed input spec (JSON schema, CSV layout, CLI flags)."""

    code = "config-parse"
