"""Cluster-graph algebra: chains, concatenation/sum terms, brickwork
builders, and lattice reductions.

Graphs are kept as expression trees because the input-output calculus is
defined compositionally; the flat vertex/edge view is realized eagerly at
construction so counts, exports and isomorphism checks are cheap.

Vertex identities: the left operand of a concatenation keeps its indices,
the right operand is re-indexed, and merged interface vertices take the
left indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import networkx as nx

ISOMORPHISM_VERTEX_CAP = 200


def _norm_edge(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class GraphTerm:
    """Algebraic cluster-graph term with ordered begin/end interfaces.

    kind is one of "chain_h", "chain_v", "concat", "sum". Chains carry
    `length`; composite nodes carry `parts`. The realized graph lives in
    n_vertices/edges/begin/end with vertices 0..n_vertices-1.
    """

    kind: str
    n_vertices: int
    edges: frozenset[tuple[int, int]]
    begin: tuple[int, ...]
    end: tuple[int, ...]
    length: int | None = None
    parts: tuple["GraphTerm", ...] = ()
    universal: bool | None = None

    @property
    def measured_count(self) -> int:
        """Number of measured vertices, |V| - |end|."""
        return self.n_vertices - len(self.end)

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n_vertices))
        g.add_edges_from(self.edges)
        return g

    def to_json(self) -> str:
        return json.dumps(
            {
                "vertices": list(range(self.n_vertices)),
                "edges": sorted(self.edges),
                "begin": list(self.begin),
                "end": list(self.end),
            }
        )

    def to_dot(self) -> str:
        lines = ["graph cluster {"]
        for v in range(self.n_vertices):
            marks = []
            if v in self.begin:
                marks.append(f"in{self.begin.index(v)}")
            if v in self.end:
                marks.append(f"out{self.end.index(v)}")
            label = f"{v}" + (f" [{','.join(marks)}]" if marks else "")
            lines.append(f'  {v} [label="{label}"];')
        for a, b in sorted(self.edges):
            lines.append(f"  {a} -- {b};")
        lines.append("}")
        return "\n".join(lines)


def _validate_interfaces(term: GraphTerm) -> GraphTerm:
    # every end vertex must be connected (by a path) to some begin vertex
    g = term.to_networkx()
    begin = set(term.begin)
    for v in term.end:
        component = nx.node_connected_component(g, v)
        if not component & begin:
            raise ValueError(f"end vertex {v} is not connected to any begin vertex")
    return term


def chain_h(l: int) -> GraphTerm:
    """Horizontal chain of l vertices; interfaces are the two endpoints,
    one as the single begin and one as the single end."""
    if l < 2:
        raise ValueError("chain needs at least 2 vertices")
    edges = frozenset((i, i + 1) for i in range(l - 1))
    return GraphTerm("chain_h", l, edges, (0,), (l - 1,), length=l)


def chain_v(l: int) -> GraphTerm:
    """Vertical chain of l vertices; begin = end = the two chain endpoints."""
    if l < 2:
        raise ValueError("chain needs at least 2 vertices")
    edges = frozenset((i, i + 1) for i in range(l - 1))
    return GraphTerm("chain_v", l, edges, (0, l - 1), (0, l - 1), length=l)


def concat(a: GraphTerm, b: GraphTerm) -> GraphTerm:
    """Glue b after a, identifying the i-th end vertex of a with the i-th
    begin vertex of b. begin = begin(a), end = re-indexed end(b)."""
    if len(a.end) != len(b.begin):
        raise ValueError(
            f"interface size mismatch: |end(a)|={len(a.end)} vs |begin(b)|={len(b.begin)}"
        )
    mapping: dict[int, int] = {}
    for i, v in enumerate(b.begin):
        mapping[v] = a.end[i]
    nxt = a.n_vertices
    for v in range(b.n_vertices):
        if v not in mapping:
            mapping[v] = nxt
            nxt += 1
    edges = set(a.edges)
    edges.update(_norm_edge(mapping[x], mapping[y]) for x, y in b.edges)
    term = GraphTerm(
        "concat",
        nxt,
        frozenset(edges),
        a.begin,
        tuple(mapping[v] for v in b.end),
        parts=(a, b),
    )
    return _validate_interfaces(term)


def gsum(a: GraphTerm, b: GraphTerm) -> GraphTerm:
    """Disjoint union; interface sequences are concatenated."""
    shift = a.n_vertices
    edges = set(a.edges)
    edges.update((x + shift, y + shift) for x, y in b.edges)
    return GraphTerm(
        "sum",
        a.n_vertices + b.n_vertices,
        frozenset(edges),
        a.begin + tuple(v + shift for v in b.begin),
        a.end + tuple(v + shift for v in b.end),
        parts=(a, b),
    )


def brick_side_graph() -> GraphTerm:
    """Two 5-chains joined at their far ends through a 3-vertex vertical
    chain; the building block a brick is made of (11 vertices)."""
    return concat(gsum(chain_h(5), chain_h(5)), chain_v(3))


def brick_graph() -> GraphTerm:
    """Brick graph: three side blocks in a row (29 vertices, interface 2).
    With the matching 27-angle schedule it implements one beam-splitter
    brick on its two rails."""
    side = brick_side_graph()
    return concat(concat(side, side), side)


def unit_depth_graph(m: int) -> GraphTerm:
    """One brickwork layer on m modes: a rank of m/2 bricks followed by an
    offset rank (13-chain rails on the outer modes, m/2 - 1 bricks between).
    """
    if m < 2 or m % 2:
        raise ValueError("mode count must be even and >= 2")
    brick = brick_graph()
    first = brick
    for _ in range(m // 2 - 1):
        first = gsum(first, brick)
    second = chain_h(13)
    for _ in range(m // 2 - 1):
        second = gsum(second, brick)
    second = gsum(second, chain_h(13))
    return concat(first, second)


def universal_depth(m: int) -> int:
    """Layer count from which the brickwork graph is a universal resource."""
    return m // 2 + 1


def brickwork_graph(m: int, k: int) -> GraphTerm:
    """k stacked unit-depth layers on m modes.

    The returned term's `universal` flag records whether k is deep enough
    (k >= m/2 + 1) to carry an arbitrary m-mode passive circuit.
    """
    if m < 2 or m % 2:
        raise ValueError("mode count must be even and >= 2")
    if k < 1:
        raise ValueError("depth must be >= 1")
    layer = unit_depth_graph(m)
    term = layer
    for _ in range(k - 1):
        term = concat(term, layer)
    return GraphTerm(
        term.kind,
        term.n_vertices,
        term.edges,
        term.begin,
        term.end,
        length=term.length,
        parts=term.parts,
        universal=k >= universal_depth(m),
    )


# ---------------------------------------------------------------------------
# plain lattices and reductions
# ---------------------------------------------------------------------------


@dataclass
class Graph:
    """Flat undirected graph over arbitrary integer vertex ids."""

    vertices: set[int]
    edges: set[tuple[int, int]] = field(default_factory=set)

    def add_edge(self, a: int, b: int) -> None:
        self.edges.add(_norm_edge(a, b))

    def neighbors(self, v: int) -> list[int]:
        out = []
        for a, b in self.edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return out

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g


@dataclass
class LatticePlan:
    """Reduction recipe on a regular lattice.

    Deletions model q-basis measurements (vertex plus incident edges
    removed); shortenings model p-basis measurements on degree-2 chain
    vertices (vertex removed, neighbors joined). Deletions are applied
    first.
    """

    kind: str  # "grid" | "hexagonal"
    width: int
    height: int
    deletions: list[int] = field(default_factory=list)
    shortenings: list[int] = field(default_factory=list)


def grid_vertex(row: int, col: int, width: int) -> int:
    """Stable id of the (row, col) lattice site, both 1-indexed."""
    return (row - 1) * width + (col - 1)


def grid_lattice(width: int, height: int) -> Graph:
    g = Graph(set(range(width * height)))
    for r in range(1, height + 1):
        for c in range(1, width + 1):
            v = grid_vertex(r, c, width)
            if c < width:
                g.add_edge(v, grid_vertex(r, c + 1, width))
            if r < height:
                g.add_edge(v, grid_vertex(r + 1, c, width))
    return g


def hexagonal_lattice(width: int, height: int) -> Graph:
    """Brick-wall drawing of the hexagonal lattice: full horizontal rows,
    vertical bonds between rows r and r+1 only at columns with parity
    matching r (both 1-indexed)."""
    g = Graph(set(range(width * height)))
    for r in range(1, height + 1):
        for c in range(1, width + 1):
            v = grid_vertex(r, c, width)
            if c < width:
                g.add_edge(v, grid_vertex(r, c + 1, width))
            if r < height and c % 2 == r % 2:
                g.add_edge(v, grid_vertex(r + 1, c, width))
    return g


def vertex_delete(g: Graph, v: int) -> None:
    if v not in g.vertices:
        raise ValueError(f"vertex {v} is not in the graph")
    g.vertices.remove(v)
    g.edges = {e for e in g.edges if v not in e}


def wire_shorten(g: Graph, v: int) -> None:
    """Remove a degree-2 vertex and join its neighbors."""
    if v not in g.vertices:
        raise ValueError(f"vertex {v} is not in the graph")
    nbrs = g.neighbors(v)
    if len(nbrs) != 2:
        raise ValueError(f"wire shortening needs degree 2, vertex {v} has degree {len(nbrs)}")
    a, b = nbrs
    if _norm_edge(a, b) in g.edges:
        raise ValueError(f"neighbors of {v} are already adjacent")
    g.vertices.remove(v)
    g.edges = {e for e in g.edges if v not in e}
    g.add_edge(a, b)


def reduce_lattice(plan: LatticePlan) -> Graph:
    """Build the lattice and apply the plan's deletions, then shortenings."""
    if plan.kind == "grid":
        g = grid_lattice(plan.width, plan.height)
    elif plan.kind == "hexagonal":
        g = hexagonal_lattice(plan.width, plan.height)
    else:
        raise ValueError(f"unknown lattice kind {plan.kind!r}")
    for v in plan.deletions:
        vertex_delete(g, v)
    for v in plan.shortenings:
        wire_shorten(g, v)
    return g


def _segment_columns(k: int, offset: int) -> list[int]:
    return [24 * t + offset + d for t in range(k) for d in (0, 4, 8)]


def grid_plan_for_brickwork(m: int, k: int) -> LatticePlan:
    """Deletion pattern carving the m-mode, k-layer brickwork graph out of
    a (2m-1) x (24k+1) grid.

    Rails live on odd rows. Between an odd rail pair (bricks of the first
    rank) the connector column offsets are 5, 9, 13 within each 24-column
    layer; between an even rail pair (offset rank) they are 17, 21, 25.
    Everything else on the even rows is deleted.
    """
    if m < 2 or m % 2:
        raise ValueError("mode count must be even and >= 2")
    width, height = 24 * k + 1, 2 * m - 1
    deletions = []
    for row in range(2, height + 1, 2):
        rail_pair_index = row // 2  # pair (rail_pair_index, rail_pair_index + 1)
        keep = set(_segment_columns(k, 5 if rail_pair_index % 2 == 1 else 17))
        for col in range(1, width + 1):
            if col not in keep:
                deletions.append(grid_vertex(row, col, width))
    return LatticePlan("grid", width, height, deletions)


def hexagonal_plan_for_brickwork(k: int) -> LatticePlan:
    """Reduction of a 3 x (24k+2) hexagonal slab to the 2-mode brickwork
    graph: keep connector vertex pairs on the middle row, shorten one
    vertex of each pair, and shorten one surplus vertex per rail so the
    attachment spacing matches."""
    width, height = 24 * k + 2, 3
    attach = _segment_columns(k, 5)  # odd columns: row1-row2 bonds exist there
    keep = set(attach) | {c + 1 for c in attach}
    deletions = [grid_vertex(2, c, width) for c in range(1, width + 1) if c not in keep]
    shortenings = [grid_vertex(2, c, width) for c in attach]
    shortenings.append(grid_vertex(1, width - 1, width))  # rail-1 tail, odd column
    shortenings.append(grid_vertex(3, 2, width))          # rail-2 head, even column
    return LatticePlan("hexagonal", width, height, deletions, shortenings)


def graphs_isomorphic(a, b) -> bool:
    """Unlabeled graph isomorphism (vertex counts capped for desk use)."""
    ga = a.to_networkx() if not isinstance(a, nx.Graph) else a
    gb = b.to_networkx() if not isinstance(b, nx.Graph) else b
    if ga.number_of_nodes() > ISOMORPHISM_VERTEX_CAP or gb.number_of_nodes() > ISOMORPHISM_VERTEX_CAP:
        raise ValueError(f"isomorphism check capped at {ISOMORPHISM_VERTEX_CAP} vertices")
    return nx.is_isomorphic(ga, gb)
