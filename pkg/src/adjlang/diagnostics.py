"""Source locations and diagnostics shared by the frontend and the checkers."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class SourceSpan:
    """A half-open byte range in a source file, with a precomputed line/col."""

    file: str
    start: int
    end: int
    line: int = field(default=1, compare=False)
    col: int = field(default=1, compare=False)

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"span start {self.start} > end {self.end}")


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: SourceSpan | None = None

    def __post_init__(self):
        if not self.message:
            raise ValueError("diagnostic message must be nonempty")

    def render(self) -> str:
        if self.span is None:
            return f"{self.severity}: {self.message}"
        s = self.span
        return f"{s.file}:{s.line}:{s.col}: {self.severity}: {self.message}"

    def to_json(self) -> dict:
        return {
            "severity": self.severity,
            "message": self.message,
            "file": self.span.file if self.span else None,
            "line": self.span.line if self.span else None,
            "col": self.span.col if self.span else None,
        }


def error(message: str, span: SourceSpan | None = None) -> Diagnostic:
    return Diagnostic("error", message, span)


def warning(message: str, span: SourceSpan | None = None) -> Diagnostic:
    return Diagnostic("warning", message, span)


class SourceError(Exception):
    """Raised by the frontend when parsing cannot proceed."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.render() for d in self.diagnostics))
