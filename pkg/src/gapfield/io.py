"""File formats: instance JSON, coefficient-system JSON, set files, canonical JSON."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .bilinear.system import CoeffSystem
from .counting import KINDS, ModInstance
from .errors import UsageError
from .gap import ElementSet, format_gap, parse_gap


def dumps(obj) -> str:
    """Canonical single-line JSON: sorted keys, no spaces, no NaN."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False, default=str)


def digest(obj) -> str:
    return hashlib.sha256(dumps(obj).encode()).hexdigest()


def _load_json(src) -> dict:
    if isinstance(src, dict):
        return src
    try:
        text = Path(src).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {src}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{src}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise UsageError(f"{src}: expected a JSON object")
    return data


def _need(data: dict, key: str, what: str):
    if key not in data:
        raise UsageError(f"{what}: missing field {key!r}")
    return data[key]


def instance_from_dict(data: dict) -> ModInstance:
    p = int(_need(data, "p", "instance"))
    kind = data.get("kind", "product")
    if kind not in KINDS:
        raise UsageError(f"instance: kind must be one of {', '.join(KINDS)}")
    A = parse_gap(str(_need(data, "A", "instance")))
    B = parse_gap(str(_need(data, "B", "instance")))
    if A.p != p or B.p != p:
        raise UsageError("instance: both GAPs must be over F_p for the stated p")
    return ModInstance(A, B, int(_need(data, "lambda", "instance")), kind)


def instance_to_dict(inst: ModInstance) -> dict:
    return {"p": inst.p, "lambda": inst.lam, "kind": inst.kind, "A": format_gap(inst.A), "B": format_gap(inst.B)}


def load_instance(src) -> ModInstance:
    return instance_from_dict(_load_json(src))


def system_from_dict(data: dict) -> CoeffSystem:
    anchor = _need(data, "anchor", "system")
    try:
        K = tuple((tuple(k["h"]), tuple(k["j"])) for k in _need(data, "K", "system"))
        return CoeffSystem(int(data["d"]), int(data["e"]), int(data.get("H", 0)), tuple(anchor["h0"]), tuple(anchor["j0"]), K)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"system: malformed field ({exc})") from None


def load_system(src) -> CoeffSystem:
    return system_from_dict(_load_json(src))


def parse_set_text(text: str) -> ElementSet:
    """``p=<prime>`` header, then one decimal element per line; blank and ``#`` lines are skipped."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("p="):
        raise UsageError("set file must start with a p=<prime> header")
    try:
        p = int(lines[0][2:])
        xs = [int(ln) for ln in lines[1:]]
    except ValueError:
        raise UsageError("set file entries must be decimal integers") from None
    return ElementSet.from_iterable(xs, p)


def load_set(src) -> ElementSet:
    try:
        return parse_set_text(Path(src).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {src}: {exc}") from None


def format_set(s: ElementSet) -> str:
    return "\n".join([f"p={s.p}", *map(str, s.elements)]) + "\n"


def load_config(src) -> dict:
    return _load_json(src) if src else {}
