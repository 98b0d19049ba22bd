"""Compiler diagnostics: stable codes, deterministic ordering."""

from dataclasses import dataclass
from .lexer import Loc

ERROR = "error"
WARNING = "warning"


@dataclass
class Diagnostic:
    severity: str
    code: str
    loc: Loc
    message: str

    def __str__(self):
        return f"{self.loc}: {self.severity}[{self.code}]: {self.message}"


def sort_key(d):
    return (d.loc.file, d.loc.line, d.loc.col, d.code)


def has_errors(diags):
    return any(d.severity == ERROR for d in diags)


def sorted_diags(diags):
    return sorted(diags, key=sort_key)
