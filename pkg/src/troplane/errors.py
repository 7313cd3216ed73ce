"""Error type shared by every troplane module."""

from __future__ import annotations

# Codes the CLI maps to exit status 4 (an internal limit was hit, not bad input).
LIMIT_CODES = frozenset({"POLYGON_TOO_LARGE", "ORDER_TOO_LOW"})


class TroplaneError(ValueError):
    """A failed precondition or computation, tagged with a stable machine code.

    ``details`` carries structured context (witnesses, defect vectors, positions)
    that the CLI serializes to JSON on stderr.
    """

    def __init__(self, code: str, message: str = "", **details):
        self.code = code
        self.message = message or code
        self.details = details
        super().__init__(f"{code}: {self.message}")

    def to_json(self) -> dict:
        out = {"error": self.code, "message": self.message}
        if self.details:
            out["details"] = {k: _jsonable(v) for k, v in self.details.items()}
        return out


def _jsonable(value):
    from fractions import Fraction

    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (int, str, float, bool)) or value is None:
        return value
    return str(value)
