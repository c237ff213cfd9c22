"""Spin-graph data model, canonical constructors and gauge transforms.

Sites are 0-based. Energies are in units of the coupling J with hbar = 1,
so times are in units of 1/J. A bond's phase is directed: reading the bond
from j to i gives the negated phase.
"""

from __future__ import annotations

import enum
import json
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigParseError, GraphValidationError, InvalidInputError, InvalidSizeError

__all__ = [
    "Model",
    "Bond",
    "SpinGraph",
    "make_chain",
    "make_ring",
    "make_graph",
    "disjoint_union",
    "gauge_transform",
    "parse_graph",
    "load_graph",
    "graph_to_dict",
    "connected_components",
    "fundamental_cycles",
    "cycle_phase",
]


class Model(str, enum.Enum):
    XY = "xy"
    HEISENBERG = "heisenberg"


@dataclass(frozen=True)
class Bond:
    i: int
    j: int
    coupling: float
    phase: float = 0.0

    def reversed(self) -> Bond:
        return Bond(self.j, self.i, self.coupling, -self.phase)

    @property
    def key(self) -> tuple[int, int]:
        return (min(self.i, self.j), max(self.i, self.j))


@dataclass(frozen=True)
class SpinGraph:
    """Weighted interaction graph with local fields and bond phases.

    Validation happens on construction; instances are immutable.
    """

    model: Model
    n_sites: int
    fields: tuple[float, ...]
    bonds: tuple[Bond, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        object.__setattr__(self, "fields", tuple(float(b) for b in self.fields))
        object.__setattr__(self, "bonds", tuple(self.bonds))
        if self.n_sites < 1:
            raise InvalidSizeError(f"a spin graph needs at least one site, got {self.n_sites}")
        if len(self.fields) != self.n_sites:
            raise GraphValidationError(
                f"fields list has length {len(self.fields)}, expected n_sites={self.n_sites}"
            )
        seen = set()
        for b in self.bonds:
            for s in (b.i, b.j):
                if not 0 <= s < self.n_sites:
                    raise GraphValidationError(
                        f"bond ({b.i}, {b.j}) references site {s} outside [0, {self.n_sites})"
                    )
            if b.i == b.j:
                raise GraphValidationError(f"self-loop bond ({b.i}, {b.j}) is not allowed")
            if b.key in seen:
                raise GraphValidationError(f"duplicate bond between sites {b.key[0]} and {b.key[1]}")
            seen.add(b.key)
            if not (math.isfinite(b.coupling) and math.isfinite(b.phase)):
                raise GraphValidationError(f"bond ({b.i}, {b.j}) has a non-finite coupling or phase")

    def bond(self, i: int, j: int) -> Bond | None:
        """Return the bond between ``i`` and ``j`` oriented as i -> j, or None."""
        for b in self.bonds:
            if b.i == i and b.j == j:
                return b
            if b.i == j and b.j == i:
                return b.reversed()
        return None

    def phase(self, i: int, j: int) -> float:
        b = self.bond(i, j)
        if b is None:
            raise KeyError((i, j))
        return b.phase

    def neighbors(self, i: int) -> list[int]:
        out = []
        for b in self.bonds:
            if b.i == i:
                out.append(b.j)
            elif b.j == i:
                out.append(b.i)
        return sorted(out)

    def with_phases(self, phases: Mapping[tuple[int, int], float]) -> SpinGraph:
        bonds = tuple(Bond(b.i, b.j, b.coupling, phases.get((b.i, b.j), b.phase)) for b in self.bonds)
        return SpinGraph(self.model, self.n_sites, self.fields, bonds)


def make_graph(n_sites, bonds, fields=None, model=Model.XY) -> SpinGraph:
    """Build a graph from ``(i, j, J[, phase])`` tuples or Bond objects."""
    if fields is None:
        fields = [0.0] * n_sites
    parsed = []
    for b in bonds:
        parsed.append(b if isinstance(b, Bond) else Bond(*b))
    return SpinGraph(Model(model), n_sites, tuple(fields), tuple(parsed))


def make_chain(n: int, coupling: float = 1.0, fields: Sequence[float] | None = None,
               model=Model.XY) -> SpinGraph:
    """Open chain 0 - 1 - ... - n-1 with uniform coupling and zero phases.

    ``coupling`` may also be a sequence of n-1 per-bond couplings.
    """
    if n < 1:
        raise InvalidSizeError(f"a chain needs n >= 1, got {n}")
    if np.ndim(coupling) == 0:
        couplings = [float(coupling)] * (n - 1)
    else:
        couplings = [float(c) for c in coupling]
        if len(couplings) != n - 1:
            raise InvalidInputError(f"expected {n - 1} couplings, got {len(couplings)}")
    if fields is None:
        fields = [0.0] * n
    bonds = [Bond(k, k + 1, couplings[k]) for k in range(n - 1)]
    return SpinGraph(Model(model), n, tuple(fields), tuple(bonds))


def make_ring(n: int, coupling: float = 1.0, flux: float = 0.0,
              fields: Sequence[float] | None = None, model=Model.XY) -> SpinGraph:
    """Cycle of ``n`` sites threaded by ``flux`` flux quanta.

    The flux is spread uniformly: every directed bond k -> k+1 (mod n)
    carries phase 2*pi*flux/n.
    """
    if n < 3:
        raise InvalidSizeError(f"a ring needs n >= 3, got {n}")
    if fields is None:
        fields = [0.0] * n
    theta = 2.0 * math.pi * flux / n
    bonds = [Bond(k, (k + 1) % n, float(coupling), theta) for k in range(n)]
    return SpinGraph(Model(model), n, tuple(fields), tuple(bonds))


def disjoint_union(*graphs: SpinGraph) -> SpinGraph:
    """Place graphs side by side, relabelling sites consecutively."""
    if not graphs:
        raise InvalidInputError("disjoint_union needs at least one graph")
    models = {g.model for g in graphs}
    if len(models) != 1:
        raise InvalidInputError("cannot join graphs of different models")
    offset = 0
    fields: list[float] = []
    bonds: list[Bond] = []
    for g in graphs:
        fields.extend(g.fields)
        bonds.extend(Bond(b.i + offset, b.j + offset, b.coupling, b.phase) for b in g.bonds)
        offset += g.n_sites
    return SpinGraph(graphs[0].model, offset, tuple(fields), tuple(bonds))


def gauge_transform(g: SpinGraph, chi: Sequence[float]) -> SpinGraph:
    """Apply the site gauge ``chi``: phase(i -> j) becomes phase + chi_j - chi_i.

    Loop phases, couplings and fields are unchanged, so all transition
    probabilities are too.
    """
    chi = [float(c) for c in chi]
    if len(chi) != g.n_sites:
        raise InvalidInputError(f"gauge has {len(chi)} phases, graph has {g.n_sites} sites")
    bonds = tuple(Bond(b.i, b.j, b.coupling, b.phase + chi[b.j] - chi[b.i]) for b in g.bonds)
    return SpinGraph(g.model, g.n_sites, g.fields, bonds)


def connected_components(g: SpinGraph) -> list[list[int]]:
    """Components as sorted site lists, ordered by their smallest site."""
    parent = list(range(g.n_sites))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for b in g.bonds:
        ri, rj = find(b.i), find(b.j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for s in range(g.n_sites):
        groups.setdefault(find(s), []).append(s)
    return sorted(groups.values(), key=lambda c: c[0])


def fundamental_cycles(g: SpinGraph) -> list[list[int]]:
    """One closed site walk per non-tree bond of a BFS spanning forest."""
    adj = {s: g.neighbors(s) for s in range(g.n_sites)}
    parent: dict[int, int | None] = {}
    depth: dict[int, int] = {}
    tree = set()
    for root in range(g.n_sites):
        if root in parent:
            continue
        parent[root] = None
        depth[root] = 0
        queue = [root]
        while queue:
            u = queue.pop(0)
            for v in adj[u]:
                if v not in parent:
                    parent[v] = u
                    depth[v] = depth[u] + 1
                    tree.add((min(u, v), max(u, v)))
                    queue.append(v)
    cycles = []
    for b in g.bonds:
        if b.key in tree:
            continue
        # path i -> lca -> j, then close with bond j -> i
        a, c = b.i, b.j
        left, right = [a], [c]
        while a != c:
            if depth[a] >= depth[c]:
                a = parent[a]
                left.append(a)
            else:
                c = parent[c]
                right.append(c)
        walk = left + right[-2::-1]
        cycles.append(walk + [walk[0]])
    return cycles


def cycle_phase(g: SpinGraph, walk: Sequence[int]) -> float:
    """Total phase accumulated along a closed walk of bonded sites."""
    return float(sum(g.phase(walk[k], walk[k + 1]) for k in range(len(walk) - 1)))


# ---------------------------------------------------------------------------
# Config documents

def _require(obj, key, kind, path):
    if key not in obj:
        raise ConfigParseError("missing required key", field=f"{path}.{key}" if path else key)
    value = obj[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigParseError(f"expected a number, got {value!r}", field=f"{path}.{key}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigParseError(f"expected an integer, got {value!r}", field=f"{path}.{key}")
        return value
    return value


def _optional_float(obj, key, path, default=0.0):
    if key not in obj:
        return default
    return _require(obj, key, float, path)


def graph_from_dict(doc: Mapping) -> SpinGraph:
    """Validate a decoded graph document and build the graph."""
    if not isinstance(doc, Mapping):
        raise ConfigParseError("graph document must be an object")
    model_name = doc.get("model", "xy")
    try:
        model = Model(str(model_name).lower())
    except ValueError:
        raise ConfigParseError(f"unknown model {model_name!r}", field="model") from None

    shorthands = [k for k in ("chain", "ring") if k in doc]
    if len(shorthands) > 1 or (shorthands and ("sites" in doc or "bonds" in doc)):
        raise ConfigParseError("use exactly one of 'chain', 'ring', or explicit sites/bonds")
    if "chain" in doc:
        entry = doc["chain"]
        n = _require(entry, "n", int, "chain")
        fields = entry.get("fields")
        return make_chain(n, _optional_float(entry, "J", "chain", 1.0), fields, model)
    if "ring" in doc:
        entry = doc["ring"]
        n = _require(entry, "n", int, "ring")
        return make_ring(n, _optional_float(entry, "J", "ring", 1.0),
                         _optional_float(entry, "flux", "ring"), entry.get("fields"), model)

    sites = _require(doc, "sites", list, "")
    fields_by_id: dict[int, float] = {}
    for k, site in enumerate(sites):
        path = f"sites[{k}]"
        sid = _require(site, "id", int, path)
        if sid in fields_by_id:
            raise GraphValidationError(f"duplicate site id {sid} at {path}")
        fields_by_id[sid] = _optional_float(site, "field", path)
    n = len(sites)
    if sorted(fields_by_id) != list(range(n)):
        raise GraphValidationError(f"site ids must be exactly 0..{n - 1}, got {sorted(fields_by_id)}")
    bonds = []
    for k, entry in enumerate(doc.get("bonds", [])):
        path = f"bonds[{k}]"
        bonds.append(Bond(_require(entry, "i", int, path), _require(entry, "j", int, path),
                          _require(entry, "J", float, path), _optional_float(entry, "phase", path)))
    return SpinGraph(model, n, tuple(fields_by_id[s] for s in range(n)), tuple(bonds))


def parse_graph(text: str) -> SpinGraph:
    """Parse a JSON graph document.

    Raises
    ------
    ConfigParseError
        Malformed JSON (with line number) or a missing/mistyped field.
    GraphValidationError
        Well-formed document describing an invalid graph.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(exc.msg, line=exc.lineno) from None
    return graph_from_dict(doc)


def load_graph(path) -> SpinGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def graph_to_dict(g: SpinGraph) -> dict:
    """Explicit (non-shorthand) document form; round-trips through parse_graph."""
    return {
        "model": g.model.value,
        "sites": [{"id": s, "field": b} for s, b in enumerate(g.fields)],
        "bonds": [{"i": b.i, "j": b.j, "J": b.coupling, "phase": b.phase} for b in g.bonds],
    }
