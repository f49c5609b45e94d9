"""JSON formats for poset sheaves and table-backed presheaves.

Sheaf::

    {"ring": "Z",
     "stalks": {"<point>": {"ranks": {"0": 1}, "differentials": {...}}},
     "maps": [{"from": "<x>", "to": "<y>", "components": {"0": <matrix>}}]}

``maps`` lists comparison maps ``F_x -> F_y`` for ``y < x``; at least the
covering pairs are needed.  Matrices use the ``{"rows", "cols", "entries"}``
triplet layout.  Table presheaf::

    {"ring": "Z",
     "values": [{"open": ["a", "c"], "complex": {"ranks": ..., "differentials": ...}}],
     "restrictions": [{"from": [...], "to": [...], "components": {...}}]}
"""

from __future__ import annotations

from typing import Dict

from ..algebra import CochainMap, CoefficientRing, ExactMatrix, FreeCochainComplex
from ..spaces import FinitePoset, open_from_labels, point_label, resolve_point
from .poset_sheaf import PosetSheaf
from .presheaves import TableBacked


def _complex(ring: CoefficientRing, data: dict) -> FreeCochainComplex:
    if not isinstance(data, dict) or "ranks" not in data:
        raise ValueError("complex JSON needs 'ranks'")
    ranks = {int(k): int(v) for k, v in data["ranks"].items()}
    diffs = {int(k): ExactMatrix.from_json(ring, m) for k, m in data.get("differentials", {}).items()}
    return FreeCochainComplex(ring, ranks, diffs)


def _components(ring, data: dict) -> Dict[int, ExactMatrix]:
    return {int(k): ExactMatrix.from_json(ring, m) for k, m in data.items()}


def _complex_json(C: FreeCochainComplex) -> dict:
    out = C.to_json()
    out.pop("ring")
    return out


def sheaf_from_json(X: FinitePoset, data: dict, name: str = "sheaf") -> PosetSheaf:
    if not isinstance(data, dict) or "stalks" not in data:
        raise ValueError("sheaf JSON needs 'stalks'")
    ring = CoefficientRing.parse(data.get("ring", "Z"))
    stalks = {resolve_point(X, p): _complex(ring, c) for p, c in data["stalks"].items()}
    maps = {}
    for entry in data.get("maps", []):
        x, y = resolve_point(X, entry["from"]), resolve_point(X, entry["to"])
        maps[(x, y)] = CochainMap(stalks[x], stalks[y], _components(ring, entry.get("components", {})))
    return PosetSheaf(X, ring, stalks, maps, name=data.get("name", name))


def sheaf_to_json(F: PosetSheaf) -> dict:
    X = F.space
    maps = []
    for y, x in X.covering_pairs():
        f = F.comparison(x, y)
        maps.append({"from": point_label(x), "to": point_label(y),
                     "components": {str(k): m.to_json() for k, m in sorted(f.components.items())}})
    return {
        "ring": F.ring.selector(),
        "name": F.name,
        "stalks": {point_label(x): _complex_json(F.stalk(x)) for x in X.elements},
        "maps": maps,
    }


def table_from_json(X: FinitePoset, data: dict) -> TableBacked:
    if not isinstance(data, dict) or "values" not in data:
        raise ValueError("table presheaf JSON needs 'values'")
    ring = CoefficientRing.parse(data.get("ring", "Z"))
    values = {}
    for entry in data["values"]:
        values[open_from_labels(X, entry["open"])] = _complex(ring, entry["complex"])
    zero = FreeCochainComplex.zero(ring)
    restrictions = {}
    for entry in data.get("restrictions", []):
        U, V = open_from_labels(X, entry["from"]), open_from_labels(X, entry["to"])
        restrictions[(U, V)] = CochainMap(values.get(U, zero), values.get(V, zero),
                                          _components(ring, entry.get("components", {})))
    return TableBacked(X, ring, values, restrictions)
