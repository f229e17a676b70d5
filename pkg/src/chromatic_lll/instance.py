"""Hypergraph-colouring instances with per-edge pinning sets.

An instance is a hypergraph on vertices ``0..n-1`` together with a colour
count ``q`` and, for every edge, a set of colours already witnessed inside
that edge (its *pinning set*).  An edge is satisfied by an assignment once
the colours used on it, together with its pinning set, contain at least two
distinct colours; a full colouring is proper when every edge is satisfied.

Orderings are part of the data: vertices are ordered by index, edges by
appearance, and every "first edge" / "first vertex" tie-break in the
algorithms downstream resolves against these fixed orders.  Instances are
immutable; pinning a vertex produces a new instance.

Text file format (UTF-8, one directive per line, ``#`` starts a comment):

    colours <q>
    vertices <n>
    edge <v1> <v2> ... <vk>
    pin <edge-ordinal> <c1> <c2> ...

``colours`` and ``vertices`` must appear once each, before any ``edge``
line.  ``pin`` refers to the 0-based appearance index of an edge.  The
serializer emits directives in exactly this order, space-separated, with
no trailing whitespace, so serialize/parse round-trips bit-exactly.

Colourings are plain lookups: a full colouring is any sequence or mapping
assigning a colour to every vertex that occurs in an edge; a partial
colouring is a dict from vertex to colour.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import ParseError

Edge = tuple[int, ...]
Colouring = Sequence[int] | Mapping[int, int]


@dataclass(frozen=True)
class Instance:
    """An immutable hypergraph-colouring instance.

    ``edges`` keeps each edge's vertices in listed order; ``pinnings`` is
    parallel to ``edges``.  Edges whose pinning set already witnesses two
    colours constrain nothing and are dropped at construction, preserving
    the order of the survivors.  Derived quantities: ``delta`` is the
    maximum vertex degree, ``k_min``/``k_max`` the extreme edge sizes
    (0 on edgeless instances).
    """

    n: int
    q: int
    edges: tuple[Edge, ...] = ()
    pinnings: tuple[frozenset[int], ...] = ()
    delta: int = field(init=False, compare=False, default=0)
    k_min: int = field(init=False, compare=False, default=0)
    k_max: int = field(init=False, compare=False, default=0)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        if self.q < 1:
            raise ValueError("colour count must be at least 1")
        edges = tuple(tuple(e) for e in self.edges)
        pins = tuple(frozenset(p) for p in self.pinnings)
        if not pins:
            pins = tuple(frozenset() for _ in edges)
        if len(pins) != len(edges):
            raise ValueError("pinnings must be parallel to edges")
        for e in edges:
            for v in e:
                if not 0 <= v < self.n:
                    raise ValueError(f"vertex index {v} out of range [0, {self.n})")
            if len(set(e)) != len(e):
                raise ValueError(f"duplicate vertex in edge {e}")
        for p in pins:
            for c in p:
                if not 0 <= c < self.q:
                    raise ValueError(f"pinned colour {c} out of range [0, {self.q})")
        # Eagerly drop edges already satisfied by their pinning set.
        keep = [i for i in range(len(edges)) if len(pins[i]) < 2]
        edges = tuple(edges[i] for i in keep)
        pins = tuple(pins[i] for i in keep)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "pinnings", pins)
        degree = [0] * self.n
        for e in edges:
            for v in e:
                degree[v] += 1
        object.__setattr__(self, "delta", max(degree, default=0))
        sizes = [len(e) for e in edges]
        object.__setattr__(self, "k_min", min(sizes, default=0))
        object.__setattr__(self, "k_max", max(sizes, default=0))

    def incident_edges(self, v: int) -> tuple[int, ...]:
        """Indices of edges containing v, in edge order."""
        return tuple(i for i, e in enumerate(self.edges) if v in e)

    def constrained_vertices(self) -> tuple[int, ...]:
        """Vertices that occur in at least one edge, ascending."""
        seen = set()
        for e in self.edges:
            seen.update(e)
        return tuple(sorted(seen))


def parse_instance(text: str | bytes) -> Instance:
    """Parse the text format described in the module docstring."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    q: int | None = None
    n: int | None = None
    edges: list[Edge] = []
    pins: dict[int, set[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        directive, args = parts[0], parts[1:]
        try:
            values = [int(a) for a in args]
        except ValueError:
            raise ParseError(lineno, f"non-integer argument in {line!r}")
        if directive == "colours":
            if q is not None:
                raise ParseError(lineno, "duplicate 'colours' directive")
            if len(values) != 1 or values[0] < 1:
                raise ParseError(lineno, "'colours' takes one positive integer")
            q = values[0]
        elif directive == "vertices":
            if n is not None:
                raise ParseError(lineno, "duplicate 'vertices' directive")
            if len(values) != 1 or values[0] < 0:
                raise ParseError(lineno, "'vertices' takes one non-negative integer")
            n = values[0]
        elif directive == "edge":
            if q is None or n is None:
                raise ParseError(lineno, "'edge' before 'colours'/'vertices'")
            for v in values:
                if not 0 <= v < n:
                    raise ParseError(lineno, f"vertex index {v} out of range")
            if len(set(values)) != len(values):
                raise ParseError(lineno, "duplicate vertex in edge")
            edges.append(tuple(values))
        elif directive == "pin":
            if q is None:
                raise ParseError(lineno, "'pin' before 'colours'")
            if not values:
                raise ParseError(lineno, "'pin' needs an edge ordinal")
            ordinal, colours = values[0], values[1:]
            if not 0 <= ordinal < len(edges):
                raise ParseError(lineno, f"edge ordinal {ordinal} out of range")
            for c in colours:
                if not 0 <= c < q:
                    raise ParseError(lineno, f"pinned colour {c} out of range")
            pins.setdefault(ordinal, set()).update(colours)
        else:
            raise ParseError(lineno, f"unknown directive {directive!r}")
    if q is None:
        raise ParseError(1, "missing 'colours' directive")
    if n is None:
        raise ParseError(1, "missing 'vertices' directive")
    pinnings = tuple(frozenset(pins.get(i, ())) for i in range(len(edges)))
    return Instance(n=n, q=q, edges=tuple(edges), pinnings=pinnings)


def serialize_instance(inst: Instance) -> str:
    """Canonical text form; parse(serialize(inst)) == inst."""
    lines = [f"colours {inst.q}", f"vertices {inst.n}"]
    for e in inst.edges:
        lines.append(" ".join(["edge", *map(str, e)]).rstrip())
    for i, p in enumerate(inst.pinnings):
        if p:
            lines.append(" ".join(["pin", str(i), *map(str, sorted(p))]))
    return "\n".join(lines) + "\n"


def _colour_of(sigma: Colouring, v: int) -> int:
    return sigma[v]


def is_proper(inst: Instance, sigma: Colouring) -> bool:
    """True iff every edge sees at least two colours, pinnings included.

    ``sigma`` must assign a colour to every vertex occurring in an edge.
    """
    for e, p in zip(inst.edges, inst.pinnings):
        witnessed = {_colour_of(sigma, v) for v in e} | p
        if len(witnessed) <= 1:
            return False
    return True


def edge_satisfied(inst: Instance, e: int, x: Mapping[int, int]) -> bool:
    """True iff edge ``e`` already witnesses two colours under the partial
    colouring ``x`` together with its pinning set."""
    if not 0 <= e < len(inst.edges):
        raise IndexError(f"edge index {e} out of range")
    witnessed = set(inst.pinnings[e])
    for v in inst.edges[e]:
        if v in x:
            witnessed.add(x[v])
            if len(witnessed) > 1:
                return True
    return len(witnessed) > 1


def pin_vertex(inst: Instance, v: int, c: int) -> Instance:
    """Pin vertex ``v`` to colour ``c``: remove it from every edge and add
    ``c`` to those edges' pinning sets.  Edges satisfied by the enlarged
    pinning set disappear; survivor order is preserved."""
    if not 0 <= v < inst.n:
        raise ValueError(f"vertex {v} not in instance")
    if not 0 <= c < inst.q:
        raise ValueError(f"colour {c} out of range [0, {inst.q})")
    new_edges = []
    new_pins = []
    for e, p in zip(inst.edges, inst.pinnings):
        if v in e:
            new_edges.append(tuple(u for u in e if u != v))
            new_pins.append(p | {c})
        else:
            new_edges.append(e)
            new_pins.append(p)
    # The constructor drops edges whose pinning set now has two colours.
    return Instance(n=inst.n, q=inst.q, edges=tuple(new_edges), pinnings=tuple(new_pins))
