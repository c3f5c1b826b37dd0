"""Console and JSON renderers for command results."""

from .console import ConsoleFormatter
from .json_formatter import JsonFormatter

__all__ = ["ConsoleFormatter", "JsonFormatter"]
