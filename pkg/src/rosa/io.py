"""JSON files for patches, polygons, rules and reports."""

from __future__ import annotations

import json
import math
from pathlib import Path

from .errors import ValidationError
from .lattice import Patch, PolygonBoundary
from .substitution import SubstitutionRule


def _clean(obj):
    # JSON has no infinities; write them as strings so files stay standard
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):
        return obj.item()
    return obj


def dumps(data) -> str:
    return json.dumps(_clean(data), indent=1, sort_keys=True) + "\n"


def write_json(path, data) -> None:
    Path(path).write_text(dumps(data), encoding="utf-8")


def read_json(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: expected a JSON object")
    return data


def load_patch(path) -> Patch:
    return Patch.from_json(read_json(path))


def save_patch(path, p: Patch) -> None:
    write_json(path, p.to_json())


def load_polygon(path) -> PolygonBoundary:
    return PolygonBoundary.from_json(read_json(path))


def load_rule(path) -> SubstitutionRule:
    return SubstitutionRule.from_json(read_json(path))


def save_rule(path, rule: SubstitutionRule) -> None:
    write_json(path, rule.to_json())
