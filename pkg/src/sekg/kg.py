"""Concept graph assembly and export.

Nodes are canonical lemma keys; each node keeps the surface spellings
that mapped to it. Edges are typed triples. The subset_of relation
must stay acyclic: an edge whose addition would close a cycle is
rejected and reported, and earlier edges always win over later ones.
Repeats of an edge are collapsed, pooling their provenance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .bio import LABELS
from .errors import ParseError, UnknownNode
from .hyponym import RELATION_KINDS, Triple, lemma_of

GRAPH_VERSION = 1


@dataclass
class Node:
    id: str
    surfaces: set[str] = field(default_factory=set)
    label: str | None = None


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    kind: str
    phrase: str | None = None
    provenance: tuple[str, ...] = ()

    def key(self):
        return (self.src, self.dst, self.kind, self.phrase or "")


def _merged(provenance: tuple[str, ...], extra: str) -> tuple[str, ...]:
    if not extra or extra in provenance:
        return provenance
    return tuple(sorted(set(provenance) | {extra}))


@dataclass
class KnowledgeGraph:
    nodes: dict[str, Node] = field(default_factory=dict)
    edges: list[Edge] = field(default_factory=list)
    rejected: list[tuple[Triple, str]] = field(default_factory=list)
    # edge indexes: key -> position, node id -> incident positions
    _by_key: dict[tuple, int] = field(default_factory=dict, repr=False)
    _adj: dict[str, list[int]] = field(default_factory=dict, repr=False)

    def _node(self, node_id: str, surface: str) -> Node:
        node = self.nodes.get(node_id)
        if node is None:
            node = Node(node_id)
            self.nodes[node_id] = node
        node.surfaces.add(surface)
        return node

    def _adopt(self, edge: Edge):
        """Append an already-validated edge and index it."""
        at = len(self.edges)
        self.edges.append(edge)
        self._by_key[edge.key()] = at
        self._adj.setdefault(edge.src, []).append(at)
        if edge.dst != edge.src:
            self._adj.setdefault(edge.dst, []).append(at)

    def _reaches(self, start: str, goal: str) -> bool:
        """True when goal is reachable from start over subset_of edges."""
        stack = [start]
        seen = set()
        while stack:
            cur = stack.pop()
            if cur == goal:
                return True
            if cur in seen:
                continue
            seen.add(cur)
            for at in self._adj.get(cur, ()):
                e = self.edges[at]
                if e.kind == "subset_of" and e.src == cur:
                    stack.append(e.dst)
        return False

    def add(self, triple: Triple) -> bool:
        """Insert one triple.

        Returns False when nothing new was added: the triple was
        rejected, or it repeated an existing edge and only its
        provenance was folded in.
        """
        src = lemma_of(triple.head)
        dst = lemma_of(triple.tail)
        if not src or not dst:
            self.rejected.append((triple, "empty endpoint"))
            return False
        at = self._by_key.get((src, dst, triple.relation, triple.phrase or ""))
        if at is not None:
            self._node(src, triple.head_surface or triple.head)
            self._node(dst, triple.tail_surface or triple.tail)
            old = self.edges[at]
            merged = _merged(old.provenance, triple.provenance)
            if merged is not old.provenance:
                self.edges[at] = replace(old, provenance=merged)
            return False
        if triple.relation == "subset_of":
            if src == dst:
                self.rejected.append((triple, "self loop"))
                return False
            if self._reaches(dst, src):
                self.rejected.append((triple, "would close a subset_of cycle"))
                return False
        self._node(src, triple.head_surface or triple.head)
        self._node(dst, triple.tail_surface or triple.tail)
        provenance = (triple.provenance,) if triple.provenance else ()
        self._adopt(Edge(src, dst, triple.relation, triple.phrase, provenance))
        return True

    def neighbors(
        self, node_id: str, direction: str = "both", kind: str | None = None
    ) -> list[tuple[Edge, Node]]:
        """Incident edges paired with the node at the far end.

        direction is "out" (node as src), "in" (node as dst), or
        "both"; kind restricts to one relation. Results are sorted by
        the edge's dst id.
        """
        if node_id not in self.nodes:
            raise UnknownNode(node_id)
        if direction not in ("out", "in", "both"):
            raise ValueError(f"bad direction {direction!r}")
        picked = []
        for at in self._adj.get(node_id, ()):
            e = self.edges[at]
            if kind is not None and e.kind != kind:
                continue
            if e.src == node_id and direction in ("out", "both"):
                far = e.dst
            elif e.dst == node_id and direction in ("in", "both"):
                far = e.src
            else:
                continue
            picked.append((e, self.nodes[far]))
        picked.sort(
            key=lambda pair: (
                pair[0].dst,
                pair[0].src,
                pair[0].kind,
                pair[0].phrase or "",
            )
        )
        return picked

    def subgraph(self, node_id: str, radius: int = 1) -> "KnowledgeGraph":
        """Induced ball around a node: BFS over edges in either
        direction up to `radius` hops, then every edge between kept
        nodes."""
        if node_id not in self.nodes:
            raise UnknownNode(node_id)
        if radius < 0:
            raise ValueError("radius must be >= 0")
        kept = {node_id}
        frontier = [node_id]
        for _ in range(radius):
            nxt = []
            for cur in frontier:
                for at in self._adj.get(cur, ()):
                    e = self.edges[at]
                    other = e.dst if e.src == cur else e.src
                    if other not in kept:
                        kept.add(other)
                        nxt.append(other)
            if not nxt:
                break
            frontier = nxt
        out = KnowledgeGraph()
        for nid in kept:
            node = self.nodes[nid]
            out.nodes[nid] = Node(nid, set(node.surfaces), node.label)
        for e in self.edges:
            if e.src in kept and e.dst in kept:
                out._adopt(e)
        return out


def build_graph(triples: list[Triple]) -> KnowledgeGraph:
    graph = KnowledgeGraph()
    for triple in triples:
        graph.add(triple)
    return graph


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(graph: KnowledgeGraph) -> str:
    """Graphviz rendering; nodes and edges are emitted sorted, so the
    same graph always yields the same bytes."""
    lines = ["digraph concepts {", "  rankdir=LR;"]
    for node_id in sorted(graph.nodes):
        lines.append(f"  {_dot_quote(node_id)};")
    for e in sorted(graph.edges, key=Edge.key):
        label = e.phrase if e.kind == "verb_phrase" else e.kind
        lines.append(
            f"  {_dot_quote(e.src)} -> {_dot_quote(e.dst)}"
            f" [label={_dot_quote(label)}];"
        )
    lines.append("}")
    return "".join(line + "\n" for line in lines)


def export_json(graph: KnowledgeGraph) -> str:
    nodes = []
    for nid in sorted(graph.nodes):
        node = graph.nodes[nid]
        entry: dict = {"id": nid, "surfaces": sorted(node.surfaces)}
        if node.label is not None:
            entry["label"] = node.label
        nodes.append(entry)
    edges = []
    for e in sorted(graph.edges, key=lambda e: e.key() + (e.provenance,)):
        entry = {
            "src": e.src,
            "dst": e.dst,
            "kind": e.kind,
            "provenance": list(e.provenance),
        }
        if e.phrase is not None:
            entry["phrase"] = e.phrase
        edges.append(entry)
    payload = {"version": GRAPH_VERSION, "nodes": nodes, "edges": edges}
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _expect(condition: bool, message: str):
    if not condition:
        raise ParseError(message)


def import_json(text: str) -> KnowledgeGraph:
    """Parse an exported graph back, revalidating every invariant."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from None
    _expect(isinstance(payload, dict), "top level must be an object")
    _expect(
        payload.get("version") == GRAPH_VERSION,
        f"version must be {GRAPH_VERSION}",
    )
    nodes = payload.get("nodes")
    edges = payload.get("edges")
    _expect(isinstance(nodes, list), "nodes must be a list")
    _expect(isinstance(edges, list), "edges must be a list")
    graph = KnowledgeGraph()
    for item in nodes:
        _expect(isinstance(item, dict), "node entries must be objects")
        nid = item.get("id")
        surfaces = item.get("surfaces")
        label = item.get("label")
        _expect(
            isinstance(nid, str) and bool(nid), "node id must be a string"
        )
        _expect(
            isinstance(surfaces, list)
            and bool(surfaces)
            and all(isinstance(s, str) and s for s in surfaces),
            f"surfaces of {nid!r} must be non-empty strings",
        )
        _expect(
            label is None or label in LABELS,
            f"unknown label {label!r} on node {nid!r}",
        )
        _expect(nid not in graph.nodes, f"duplicate node id {nid!r}")
        graph.nodes[nid] = Node(nid, set(surfaces), label)
    for item in edges:
        _expect(isinstance(item, dict), "edge entries must be objects")
        src, dst = item.get("src"), item.get("dst")
        kind = item.get("kind")
        phrase = item.get("phrase")
        provenance = item.get("provenance", [])
        _expect(src in graph.nodes, f"edge src {src!r} is not a node")
        _expect(dst in graph.nodes, f"edge dst {dst!r} is not a node")
        _expect(kind in RELATION_KINDS, f"unknown relation {kind!r}")
        _expect(
            phrase is None or isinstance(phrase, str),
            "phrase must be a string or null",
        )
        _expect(
            (kind == "verb_phrase") == bool(phrase),
            "phrase is set exactly on verb_phrase edges",
        )
        _expect(
            isinstance(provenance, list)
            and all(isinstance(p, str) and p for p in provenance),
            "provenance must be a list of non-empty strings",
        )
        _expect(
            not (kind == "subset_of" and src == dst),
            f"subset_of self loop at {src!r}",
        )
        edge = Edge(src, dst, kind, phrase, tuple(provenance))
        _expect(
            edge.key() not in graph._by_key, f"duplicate edge {edge.key()}"
        )
        graph._adopt(edge)
    adjacency: dict[str, list[str]] = {}
    for e in graph.edges:
        if e.kind == "subset_of":
            adjacency.setdefault(e.src, []).append(e.dst)
    _expect(not _has_cycle(adjacency), "subset_of edges contain a cycle")
    return graph


def _has_cycle(adjacency: dict[str, list[str]]) -> bool:
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[str, int] = {}
    for start in adjacency:
        if color.get(start, WHITE) != WHITE:
            continue
        stack: list[tuple[str, int]] = [(start, 0)]
        color[start] = GRAY
        while stack:
            node, idx = stack[-1]
            targets = adjacency.get(node, ())
            if idx < len(targets):
                stack[-1] = (node, idx + 1)
                child = targets[idx]
                state = color.get(child, WHITE)
                if state == GRAY:
                    return True
                if state == WHITE:
                    color[child] = GRAY
                    stack.append((child, 0))
            else:
                color[node] = BLACK
                stack.pop()
    return False
