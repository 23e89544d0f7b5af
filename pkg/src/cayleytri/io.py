"""Canonical JSON documents and run manifests."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from . import __version__
from .errors import InputError
from .grid import Face, Triangulation, col_label, make_cell
from .perms import PermutationSystem


def dumps(doc: Any) -> str:
    """Byte-stable JSON: sorted keys, no whitespace."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def digest(doc: Any) -> str:
    return hashlib.sha256(dumps(doc).encode()).hexdigest()


def system_doc(s: PermutationSystem) -> dict:
    return {"n": s.n, "d": s.d, "perms": s.to_dict()}


def system_from_doc(doc: dict) -> PermutationSystem:
    try:
        return PermutationSystem.from_dict(int(doc["n"]), int(doc["d"]), doc["perms"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad system document: {exc}") from None


def triangulation_doc(t: Triangulation) -> dict:
    return {"rows": list(t.rows), "cols": [col_label(c) for c in t.cols],
            "cells": t.to_tokens()}


def triangulation_from_doc(doc: dict) -> Triangulation:
    from .grid import col_index

    try:
        rows = [int(r) for r in doc["rows"]]
        cols = [col_index(c) if isinstance(c, str) else int(c) for c in doc["cols"]]
        cells = [make_cell(c) for c in doc["cells"]]
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad triangulation document: {exc}") from None
    return Triangulation(tuple(rows), tuple(cols), tuple(cells))


def face_doc(f: Face) -> dict:
    return {"rows": sorted(f.rows), "cols": [col_label(c) for c in sorted(f.cols)]}


@dataclass
class RunManifest:
    """What was run and what came out; ``artifact_digest`` pins the output."""

    command: str
    params: Dict[str, Any] = field(default_factory=dict)
    shape: Optional[tuple] = None
    digests: Dict[str, str] = field(default_factory=dict)
    verdicts: Dict[str, Any] = field(default_factory=dict)
    counts: Dict[str, int] = field(default_factory=dict)
    nodes: int = 0
    wall_time: float = 0.0
    version: str = __version__
    artifact_digest: str = ""

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "params": self.params,
            "shape": list(self.shape) if self.shape else None,
            "digests": self.digests,
            "verdicts": self.verdicts,
            "counts": self.counts,
            "nodes": self.nodes,
            "wall_time": round(self.wall_time, 3),
            "version": self.version,
            "artifact_digest": self.artifact_digest,
        }
