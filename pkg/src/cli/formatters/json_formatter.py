"""JSON output formatter."""

import json
from typing import Any, Dict

import numpy as np


def _default(value: Any):
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)


class JsonFormatter:
    """Format output as JSON; numpy scalars become plain numbers."""

    @staticmethod
    def format(data: Dict[str, Any], pretty: bool = True) -> str:
        """Format data as JSON string."""
        if pretty:
            return json.dumps(data, indent=2, default=_default)
        return json.dumps(data, default=_default)
