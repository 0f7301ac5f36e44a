"""Exception hierarchy shared by every module.

Each class carries a short ``kind`` tag used by the command line front end
to produce single-line, machine-parsable error reports.
"""

from __future__ import annotations


class SWFlowError(Exception):
    kind = "error"


class ConfigurationError(SWFlowError, ValueError):
    """Invalid parameter, optionally tied to a config key and line."""

    kind = "config"

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.message = message
        self.key = key
        self.line = line
        prefix = []
        if key is not None:
            prefix.append(f"key={key}")
        if line is not None:
            prefix.append(f"line={line}")
        super().__init__(" ".join(prefix + [message]) if prefix else message)


class UnsupportedOperationError(SWFlowError):
    kind = "unsupported"


class ShapeError(SWFlowError, ValueError):
    kind = "shape"


class DomainError(SWFlowError, ValueError):
    kind = "domain"


class PreconditionError(SWFlowError):
    kind = "precondition"


class FormatError(SWFlowError):
    kind = "format"


class BlowUpError(SWFlowError, FloatingPointError):
    """Non-finite values appeared during time stepping.

    ``t`` is the time the offending step was attempting to reach and
    ``history`` (when set by ``evolve``) holds every snapshot recorded
    before the failure.
    """

    kind = "blowup"

    def __init__(self, t: float, history=None):
        self.t = t
        self.history = history
        super().__init__(f"non-finite field values at t={t!r}")
