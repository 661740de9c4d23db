"""On-disk model format: load, save, and the bundled case-study model.

Models are stored as JSON documents (conventionally ``*.jsat.json``) with
top-level arrays ``resources``, ``functions``, ``edges``, ``agents``,
``roles``, and ``default_producers``, plus an integer ``format_version``.
Edge objects use ``from``/``to``/``required_currency_s`` where the currency
is a nonnegative number of seconds or the string ``"inf"``; an optional
``provenance`` string records why the edge is in the model. Unknown keys are
rejected everywhere.

Serialization is canonical: object keys sorted, arrays sorted by id, two-space
indent, trailing newline. ``load(save(m))`` is structurally equal to ``m`` and
``save`` is a fixed point over its own output.
"""

from __future__ import annotations

import json
import math
from importlib import resources as importlib_resources
from pathlib import Path
from typing import Any, BinaryIO

from .model import (
    Agent,
    CurrencyEdge,
    FunctionNode,
    INFINITE,
    JsatModel,
    ResourceNode,
    RoleAssignment,
    Violation,
    validate,
)

FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    """A syntactic or schema-level problem in a model document.

    Carries the document path (dotted, with array indices) of the offending
    field when known, e.g. ``edges[3].required_currency_s``.
    """

    def __init__(self, message: str, where: str = ""):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


class ModelValidationError(ValueError):
    """A structurally well-formed document whose graph violates model invariants."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        lines = "; ".join(str(v) for v in violations[:8])
        more = f" (+{len(violations) - 8} more)" if len(violations) > 8 else ""
        super().__init__(f"model failed validation: {lines}{more}")


def _expect(obj: Any, typ: type, where: str) -> Any:
    if not isinstance(obj, typ) or (typ is not bool and isinstance(obj, bool)):
        raise ModelFormatError(f"expected {typ.__name__}, got {type(obj).__name__}", where)
    return obj


def _take(obj: dict, key: str, typ: type, where: str, default: Any = ...) -> Any:
    if key not in obj:
        if default is ...:
            raise ModelFormatError(f"missing field: {key}", where)
        return default
    return _expect(obj[key], typ, f"{where}.{key}" if where else key)


def _reject_unknown(obj: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ModelFormatError(f"unknown field(s): {', '.join(unknown)}", where)


def _currency_from_json(value: Any, where: str) -> float:
    if value == "inf":
        return INFINITE
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ModelFormatError('expected number or "inf"', where)
    return float(value)


def _currency_to_json(value: float) -> Any:
    if math.isinf(value):
        return "inf"
    return int(value) if float(value).is_integer() else value


def model_from_document(doc: Any) -> JsatModel:
    """Build and validate a model from a parsed JSON document."""
    _expect(doc, dict, "")
    _reject_unknown(
        doc,
        {"format_version", "resources", "functions", "edges", "agents", "roles", "default_producers"},
        "",
    )
    version = _take(doc, "format_version", int, "")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format_version {version} (expected {FORMAT_VERSION})", "format_version")

    resources = []
    for i, item in enumerate(_take(doc, "resources", list, "")):
        where = f"resources[{i}]"
        _expect(item, dict, where)
        _reject_unknown(item, {"id", "name", "layer", "shared"}, where)
        resources.append(
            ResourceNode(
                id=_take(item, "id", str, where),
                name=_take(item, "name", str, where),
                layer=_take(item, "layer", str, where),
                shared=_take(item, "shared", bool, where),
            )
        )

    functions = []
    for i, item in enumerate(_take(doc, "functions", list, "")):
        where = f"functions[{i}]"
        _expect(item, dict, where)
        _reject_unknown(item, {"id", "name", "layer", "behavior"}, where)
        functions.append(
            FunctionNode(
                id=_take(item, "id", str, where),
                name=_take(item, "name", str, where),
                layer=_take(item, "layer", str, where),
                behavior=_take(item, "behavior", str, where, "not-modeled"),
            )
        )

    edges = []
    for i, item in enumerate(_take(doc, "edges", list, "")):
        where = f"edges[{i}]"
        _expect(item, dict, where)
        _reject_unknown(item, {"from", "to", "required_currency_s", "provenance"}, where)
        edges.append(
            CurrencyEdge(
                src=_take(item, "from", str, where),
                dst=_take(item, "to", str, where),
                required_currency_s=_currency_from_json(
                    item.get("required_currency_s", "inf"), f"{where}.required_currency_s"
                ),
                provenance=_take(item, "provenance", str, where, ""),
            )
        )

    agents = []
    for i, item in enumerate(_take(doc, "agents", list, "")):
        where = f"agents[{i}]"
        _expect(item, dict, where)
        _reject_unknown(item, {"id", "name", "kind"}, where)
        agents.append(
            Agent(
                id=_take(item, "id", str, where),
                name=_take(item, "name", str, where),
                kind=_take(item, "kind", str, where),
            )
        )

    roles = []
    for i, item in enumerate(_take(doc, "roles", list, "")):
        where = f"roles[{i}]"
        _expect(item, dict, where)
        _reject_unknown(item, {"function", "agent", "competency", "authority", "responsibility"}, where)
        roles.append(
            RoleAssignment(
                function=_take(item, "function", str, where),
                agent=_take(item, "agent", str, where),
                competency=_take(item, "competency", bool, where, False),
                authority=_take(item, "authority", bool, where, False),
                responsibility=_take(item, "responsibility", bool, where, False),
            )
        )

    producers = {}
    for i, item in enumerate(_take(doc, "default_producers", list, "")):
        where = f"default_producers[{i}]"
        _expect(item, dict, where)
        _reject_unknown(item, {"resource", "function"}, where)
        resource = _take(item, "resource", str, where)
        if resource in producers:
            raise ModelFormatError(f"duplicate default producer for {resource!r}", where)
        producers[resource] = _take(item, "function", str, where)

    model = JsatModel.build(
        resources=resources,
        functions=functions,
        edges=edges,
        agents=agents,
        roles=roles,
        default_producer=producers,
    )
    violations = validate(model)
    if violations:
        raise ModelValidationError(violations)
    return model


def load_model(source: str | Path | BinaryIO) -> JsatModel:
    """Load and validate a model from a path or binary stream.

    Raises :class:`ModelFormatError` for syntax/schema problems (with document
    context) and :class:`ModelValidationError` when the graph itself is
    invalid.
    """
    if hasattr(source, "read"):
        raw = source.read()
    else:
        raw = Path(source).read_bytes()
    try:
        doc = json.loads(raw.decode("utf-8") if isinstance(raw, bytes) else raw)
    except UnicodeDecodeError as exc:
        raise ModelFormatError(f"not UTF-8 text: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return model_from_document(doc)


def document_from_model(model: JsatModel) -> dict:
    """Render a model back to its canonical document form."""
    doc: dict[str, Any] = {"format_version": FORMAT_VERSION}
    doc["resources"] = [
        {"id": r.id, "name": r.name, "layer": r.layer, "shared": r.shared}
        for r in sorted(model.resources, key=lambda r: r.id)
    ]
    doc["functions"] = [
        {"id": f.id, "name": f.name, "layer": f.layer, "behavior": f.behavior}
        for f in sorted(model.functions, key=lambda f: f.id)
    ]
    doc["edges"] = [
        {
            "from": e.src,
            "to": e.dst,
            "required_currency_s": _currency_to_json(e.required_currency_s),
            "provenance": e.provenance,
        }
        for e in sorted(model.edges, key=lambda e: (e.src, e.dst))
    ]
    doc["agents"] = [
        {"id": a.id, "name": a.name, "kind": a.kind} for a in sorted(model.agents, key=lambda a: a.id)
    ]
    doc["roles"] = [
        {
            "function": r.function,
            "agent": r.agent,
            "competency": r.competency,
            "authority": r.authority,
            "responsibility": r.responsibility,
        }
        for r in sorted(model.roles, key=lambda r: (r.function, r.agent))
    ]
    doc["default_producers"] = [
        {"resource": res, "function": fn} for res, fn in sorted(model.default_producer.items())
    ]
    return doc


def save_model(model: JsatModel) -> bytes:
    """Serialize a model to canonical bytes (stable across runs and platforms)."""
    doc = document_from_model(model)
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")


def bundled_asset_path(name: str) -> Path:
    """Filesystem path of a bundled data asset."""
    return Path(str(importlib_resources.files("jsat") / "data" / name))


def bundled_collab_nav_model() -> JsatModel:
    """The reconstructed collaborative-navigation case-study model.

    The node sets follow the published function/resource inventory; the edge
    list is a documented reconstruction (each edge carries a provenance note
    in the data file).
    """
    return load_model(bundled_asset_path("collab_nav.jsat.json"))
