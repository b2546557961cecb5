"""Machine-readable verdicts and canonical JSON serialization.

Every checker returns an InequalityReport: the tested quantity per family
member plus a summary with the fitted constant / worst slack and a pass
flag.  ``dump_json`` is the single serialization path, with sorted keys and
no timestamps, so identical runs produce byte-identical report bodies.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

SCHEMA_VERSION = 1


@dataclass
class InequalityReport:
    inequality: str
    mode: str
    parameters: dict
    per_member: list
    summary: dict

    def to_dict(self):
        return {
            "schema": SCHEMA_VERSION,
            "inequality": self.inequality,
            "mode": self.mode,
            "parameters": self.parameters,
            "per_member": self.per_member,
            "summary": self.summary,
        }

    @property
    def passed(self):
        return bool(self.summary.get("pass", False))


def _sanitize(obj):
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [_sanitize(v) for v in obj.tolist()]
    return obj


def dump_json(payload, path=None):
    """Canonical JSON: sorted keys, fixed separators, repr floats."""
    if hasattr(payload, "to_dict"):
        payload = payload.to_dict()
    text = json.dumps(_sanitize(payload), sort_keys=True, separators=(",", ":"))
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
            fh.write("\n")
    return text
