"""Directed acyclic multigraph with sources, terminals and demands.

Networks are immutable after construction and fully validated up front.
All iteration orders (node lists, in/out edge lists, the message order used
for transfer matrices) are deterministic: lexicographic by id.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

SUM_SLOT = "<sum>"


class NetworkError(ValueError):
    """Base class for invalid network descriptions."""


class CycleDetected(NetworkError):
    pass


class DanglingEndpoint(NetworkError):
    pass


class SourceHasInEdge(NetworkError):
    pass


class DuplicateMessageId(NetworkError):
    pass


class UnknownNode(NetworkError):
    pass


class UnsupportedReverse(NetworkError):
    pass


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class Demand:
    """What one terminal wants: the sum of all messages, or specific ones.

    ``messages`` is required for ``recover``.  For ``sum`` it is normally
    None; network reversal fills it with slot labels so that reversing twice
    restores the original message ids.
    """

    kind: str
    messages: Optional[tuple[str, ...]] = None

    def __post_init__(self) -> None:
        if self.kind not in ("sum", "recover"):
            raise NetworkError(f"unknown demand kind {self.kind!r}")
        if self.kind == "recover" and not self.messages:
            raise NetworkError("recover demand needs at least one message")
        if self.messages is not None:
            object.__setattr__(self, "messages", tuple(self.messages))

    def slots(self) -> tuple[str, ...]:
        """Recovery slot labels, one per recovered symbol block."""
        if self.kind == "recover":
            return self.messages  # type: ignore[return-value]
        return self.messages if self.messages else (SUM_SLOT,)


SUM = Demand("sum")


def recover(*messages: str) -> Demand:
    return Demand("recover", tuple(messages))


@dataclass(frozen=True)
class Network:
    name: str
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    sources: dict[str, tuple[str, ...]]
    terminals: dict[str, Demand]
    _in: dict[str, tuple[Edge, ...]] = field(default=None, repr=False, compare=False)
    _out: dict[str, tuple[Edge, ...]] = field(default=None, repr=False, compare=False)
    _topo: tuple[str, ...] = field(default=None, repr=False, compare=False)
    _by_id: dict[str, Edge] = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        nodes = tuple(sorted(set(self.nodes)))
        if len(nodes) != len(self.nodes):
            raise NetworkError("duplicate node id")
        edges = tuple(sorted(self.edges, key=lambda e: e.id))
        sources = {v: tuple(ms) for v, ms in self.sources.items()}
        terminals = dict(self.terminals)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "sources", sources)
        object.__setattr__(self, "terminals", terminals)

        by_id: dict[str, Edge] = {}
        ins: dict[str, list[Edge]] = {v: [] for v in nodes}
        outs: dict[str, list[Edge]] = {v: [] for v in nodes}
        nodeset = set(nodes)
        for e in edges:
            if e.id in by_id:
                raise NetworkError(f"duplicate edge id {e.id!r}")
            if e.tail not in nodeset or e.head not in nodeset:
                raise DanglingEndpoint(f"edge {e.id!r}: {e.tail!r} -> {e.head!r}")
            by_id[e.id] = e
            outs[e.tail].append(e)
            ins[e.head].append(e)

        seen: set[str] = set()
        for v, ms in sources.items():
            if v not in nodeset:
                raise UnknownNode(f"source node {v!r} not declared")
            if ins[v]:
                raise SourceHasInEdge(v)
            if not ms:
                raise NetworkError(f"source {v!r} generates no messages")
            for m in ms:
                if m in seen:
                    raise DuplicateMessageId(m)
                seen.add(m)
        for v, d in terminals.items():
            if v not in nodeset:
                raise UnknownNode(f"terminal node {v!r} not declared")
            if v in sources:
                raise NetworkError(f"node {v!r} is both source and terminal")
            if d.kind == "recover":
                for m in d.messages:
                    if m not in seen:
                        raise NetworkError(f"demand references unknown message {m!r}")

        object.__setattr__(self, "_in", {v: tuple(ins[v]) for v in nodes})
        object.__setattr__(self, "_out", {v: tuple(outs[v]) for v in nodes})
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_topo", self._toposort())

    def _toposort(self) -> tuple[str, ...]:
        """Nodes by longest distance from the in-degree-0 layer, ties by id."""
        indeg = {v: len(self._in[v]) for v in self.nodes}
        level = {v: 0 for v in self.nodes}
        queue = deque(v for v in self.nodes if indeg[v] == 0)
        done = 0
        while queue:
            v = queue.popleft()
            done += 1
            for e in self._out[v]:
                level[e.head] = max(level[e.head], level[v] + 1)
                indeg[e.head] -= 1
                if indeg[e.head] == 0:
                    queue.append(e.head)
        if done != len(self.nodes):
            raise CycleDetected(self.name or "<network>")
        return tuple(sorted(self.nodes, key=lambda v: (level[v], v)))

    # -- accessors ---------------------------------------------------------

    def in_edges(self, v: str) -> tuple[Edge, ...]:
        return self._in[v]

    def out_edges(self, v: str) -> tuple[Edge, ...]:
        return self._out[v]

    def edge(self, edge_id: str) -> Edge:
        return self._by_id[edge_id]

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._by_id

    def topo_order(self) -> tuple[str, ...]:
        return self._topo

    def source_nodes(self) -> tuple[str, ...]:
        return tuple(sorted(self.sources))

    def terminal_nodes(self) -> tuple[str, ...]:
        return tuple(sorted(self.terminals))

    def messages(self) -> tuple[str, ...]:
        """Global message order: by source node id, then declaration order."""
        out = []
        for v in self.source_nodes():
            out.extend(self.sources[v])
        return tuple(out)

    def message_source(self, msg: str) -> str:
        for v, ms in self.sources.items():
            if msg in ms:
                return v
        raise NetworkError(f"unknown message {msg!r}")

    def is_sum_network(self) -> bool:
        return all(d.kind == "sum" for d in self.terminals.values())


def topo_order(net: Network) -> tuple[str, ...]:
    return net.topo_order()


def build_network(spec: dict) -> Network:
    """Build and validate a Network from its JSON-shaped description."""
    edges = tuple(Edge(e["id"], e["tail"], e["head"]) for e in spec.get("edges", ()))
    terminals = {}
    for v, d in spec.get("terminals", {}).items():
        if d["kind"] == "sum":
            terminals[v] = Demand("sum", tuple(d["slots"]) if d.get("slots") else None)
        else:
            terminals[v] = Demand("recover", tuple(d["messages"]))
    return Network(
        name=spec.get("name", ""),
        nodes=tuple(spec.get("nodes", ())),
        edges=edges,
        sources={v: tuple(ms) for v, ms in spec.get("sources", {}).items()},
        terminals=terminals,
    )


def network_to_dict(net: Network) -> dict:
    terminals = {}
    for v in net.terminal_nodes():
        d = net.terminals[v]
        if d.kind == "sum":
            entry = {"kind": "sum"}
            if d.messages:
                entry["slots"] = list(d.messages)
        else:
            entry = {"kind": "recover", "messages": list(d.messages)}
        terminals[v] = entry
    return {
        "name": net.name,
        "nodes": list(net.nodes),
        "edges": [{"id": e.id, "tail": e.tail, "head": e.head} for e in net.edges],
        "sources": {v: list(net.sources[v]) for v in net.source_nodes()},
        "terminals": terminals,
    }


def network_to_json(net: Network) -> str:
    return json.dumps(network_to_dict(net), indent=2, sort_keys=True) + "\n"


def network_from_json(text: str) -> Network:
    return build_network(json.loads(text))


# -- flows and reachability -------------------------------------------------


def min_cut(net: Network, s: str, t: str) -> int:
    """Max-flow value from s to t with unit capacity per edge (Edmonds-Karp)."""
    if s not in set(net.nodes) or t not in set(net.nodes):
        raise UnknownNode(f"{s!r} or {t!r}")
    if s == t:
        raise NetworkError("source and sink must differ")
    cap: dict[tuple[str, str, str], int] = {}
    adj: dict[str, list[tuple[str, str]]] = {v: [] for v in net.nodes}
    for e in net.edges:
        cap[(e.id, e.tail, e.head)] = 1
        cap[(e.id, e.head, e.tail)] = 0
        adj[e.tail].append((e.id, e.head))
        adj[e.head].append((e.id, e.tail))
    for v in adj:
        adj[v].sort()
    flow = 0
    while True:
        prev: dict[str, tuple[str, str]] = {s: ("", s)}
        q = deque([s])
        while q and t not in prev:
            u = q.popleft()
            for eid, w in adj[u]:
                if w not in prev and cap[(eid, u, w)] > 0:
                    prev[w] = (eid, u)
                    q.append(w)
        if t not in prev:
            return flow
        v = t
        while v != s:
            eid, u = prev[v]
            cap[(eid, u, v)] -= 1
            cap[(eid, v, u)] += 1
            v = u
        flow += 1


def min_source_terminal_cut(net: Network) -> int:
    """Minimum of min-cuts over every (source node, terminal node) pair."""
    best = None
    for s in net.source_nodes():
        for t in net.terminal_nodes():
            c = min_cut(net, s, t)
            best = c if best is None else min(best, c)
    if best is None:
        raise NetworkError("network needs at least one source and one terminal")
    return best


def reachable(net: Network, start: str) -> set[str]:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for e in net.out_edges(v):
            if e.head not in seen:
                seen.add(e.head)
                stack.append(e.head)
    return seen


def connectivity(net: Network) -> tuple[tuple[str, ...], tuple[str, ...], list[list[bool]]]:
    """Boolean source-node x terminal-node reachability matrix."""
    srcs = net.source_nodes()
    terms = net.terminal_nodes()
    matrix = []
    for s in srcs:
        hit = reachable(net, s)
        matrix.append([t in hit for t in terms])
    return srcs, terms, matrix


# -- reversal ----------------------------------------------------------------


def reverse_id(x: str) -> str:
    """Involutive renaming used for reversed edges and messages."""
    return x[:-1] if x.endswith("~") else x + "~"


def reverse_network(net: Network) -> Network:
    """Edges reversed, source and terminal roles interchanged.

    Two shapes are supported.  All-sum networks reverse to all-sum networks:
    each old terminal becomes a source generating one fresh message per
    recovery slot, and each old source becomes a sum terminal whose slots are
    tagged with its original messages (so reversing twice restores them).
    Recover networks where every message is demanded exactly once (multiple
    unicast and friends) reverse with the pairing preserved: the old terminal
    generates the reversed message, the old generator demands it.
    """
    kinds = {d.kind for d in net.terminals.values()}
    if len(kinds) > 1:
        raise UnsupportedReverse("mixed sum/recover demands")
    kind = kinds.pop() if kinds else "sum"

    edges = tuple(Edge(reverse_id(e.id), e.head, e.tail) for e in net.edges)
    sources: dict[str, tuple[str, ...]] = {}
    terminals: dict[str, Demand] = {}

    if kind == "sum":
        for t in net.terminal_nodes():
            d = net.terminals[t]
            labels = d.messages if d.messages else (f"{t}.sum",)
            sources[t] = tuple(labels)
        for s in net.source_nodes():
            terminals[s] = Demand("sum", net.sources[s])
    else:
        demanded: dict[str, str] = {}
        for t, d in net.terminals.items():
            for m in d.messages:
                if m in demanded:
                    raise UnsupportedReverse(f"message {m!r} demanded more than once")
                demanded[m] = t
        for m in net.messages():
            if m not in demanded:
                raise UnsupportedReverse(f"message {m!r} is never demanded")
        for t in net.terminal_nodes():
            sources[t] = tuple(reverse_id(m) for m in net.terminals[t].messages)
        for s in net.source_nodes():
            terminals[s] = Demand("recover", tuple(reverse_id(m) for m in net.sources[s]))

    return Network(
        name=reverse_id(net.name) if net.name else "",
        nodes=net.nodes,
        edges=edges,
        sources=sources,
        terminals=terminals,
    )
