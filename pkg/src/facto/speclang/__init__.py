"""Declaration language, loader, checks and reports behind the ``facto`` command."""

from .commands import run
from .loader import Environment, load
from .report import Report, emit_report
from .syntax import SpecDocument, parse, pretty

__all__ = ["Environment", "Report", "SpecDocument", "emit_report", "load", "parse", "pretty", "run"]
