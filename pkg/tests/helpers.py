"""Shared fixtures and independent oracles used across the test suite."""

from __future__ import annotations

import random

import numpy as np

from sumnet import FieldSpec, LinearCode, MatrixGF
from sumnet.netmodel import Demand, Edge, Network, recover


# -- micro multiple-unicast corpus -------------------------------------------


def mun_path() -> Network:
    """One pair, one edge: solvable everywhere."""
    return Network(
        "path1",
        ("w_1", "z_1"),
        (Edge("w_1>z_1", "w_1", "z_1"),),
        {"w_1": ("a",)},
        {"z_1": recover("a")},
    )


def mun_disconnected() -> Network:
    """One pair, no path: unsolvable everywhere."""
    return Network("disc1", ("w_1", "z_1"), (), {"w_1": ("a",)}, {"z_1": recover("a")})


def mun_disjoint2() -> Network:
    """Two pairs on disjoint edges: solvable everywhere."""
    return Network(
        "disjoint2",
        ("w_1", "w_2", "z_1", "z_2"),
        (Edge("w_1>z_1", "w_1", "z_1"), Edge("w_2>z_2", "w_2", "z_2")),
        {"w_1": ("a",), "w_2": ("b",)},
        {"z_1": recover("a"), "z_2": recover("b")},
    )


def mun_crossed() -> Network:
    """Two crossed pairs sharing one middle line: needs coding, then solvable."""
    edges = (
        Edge("w_1>mid", "w_1", "mid"),
        Edge("w_2>mid", "w_2", "mid"),
        Edge("mid>out", "mid", "out"),
        Edge("out>z_1", "out", "z_1"),
        Edge("out>z_2", "out", "z_2"),
        Edge("w_1>z_1", "w_1", "z_1"),
        Edge("w_2>z_2", "w_2", "z_2"),
    )
    return Network(
        "crossed2",
        ("w_1", "w_2", "mid", "out", "z_1", "z_2"),
        edges,
        {"w_1": ("a",), "w_2": ("b",)},
        {"z_1": recover("b"), "z_2": recover("a")},
    )


def sum_bipartite22() -> Network:
    """Complete bipartite 2x2 sum network: solvable everywhere."""
    edges = tuple(
        Edge(f"w_{i}>z_{j}", f"w_{i}", f"z_{j}") for i in (1, 2) for j in (1, 2)
    )
    return Network(
        "bi22",
        ("w_1", "w_2", "z_1", "z_2"),
        edges,
        {"w_1": ("a",), "w_2": ("b",)},
        {"z_1": Demand("sum"), "z_2": Demand("sum")},
    )


def sum_disconnected22() -> Network:
    """z_1 never sees w_2: unsolvable sum network."""
    edges = (
        Edge("w_1>z_1", "w_1", "z_1"),
        Edge("w_1>z_2", "w_1", "z_2"),
        Edge("w_2>z_2", "w_2", "z_2"),
    )
    return Network(
        "dis22",
        ("w_1", "w_2", "z_1", "z_2"),
        edges,
        {"w_1": ("a",), "w_2": ("b",)},
        {"z_1": Demand("sum"), "z_2": Demand("sum")},
    )


# -- random generators ---------------------------------------------------------


def random_sum_network(rng: random.Random, max_nodes: int = 10) -> Network:
    """Layered random DAG with sum demands and single-message sources."""
    n_nodes = rng.randint(4, max_nodes)
    names = [f"n{i}" for i in range(n_nodes)]
    n_src = rng.randint(1, 2)
    n_term = rng.randint(1, 2)
    srcs = names[:n_src]
    terms = names[-n_term:]
    edges = []
    for i, a in enumerate(names):
        if a in terms:
            continue
        for b in names[i + 1:]:
            if b in srcs:
                continue
            if rng.random() < 0.5:
                edges.append(Edge(f"{a}>{b}", a, b))
    return Network(
        f"rand{rng.randrange(10**6)}",
        tuple(names),
        tuple(edges),
        {s: (f"m_{s}",) for s in srcs},
        {t: Demand("sum") for t in terms},
    )


def random_code(rng: random.Random, net: Network, p: int, k: int, n: int) -> LinearCode:
    """Uniformly random coefficients on every slot the network offers."""
    f = FieldSpec(p)

    def rmat(r: int, c: int) -> MatrixGF:
        return MatrixGF(f, [[rng.randrange(p) for _ in range(c)] for _ in range(r)])

    src, loc, dec = {}, {}, {}
    for e in net.edges:
        if e.tail in net.sources:
            for m in net.sources[e.tail]:
                src[(m, e.id)] = rmat(n, k)
        else:
            for ein in net.in_edges(e.tail):
                loc[(ein.id, e.id)] = rmat(n, n)
    for t, d in net.terminals.items():
        for s in range(len(d.slots())):
            for e in net.in_edges(t):
                dec[(t, e.id, s)] = rmat(k, n)
    return LinearCode(f, k, n, src, loc, dec)


# -- independent oracles ---------------------------------------------------------


def dumb_mat_mul(a: list[list[int]], b: list[list[int]], p: int) -> list[list[int]]:
    """Entry-wise product, written without numpy on purpose."""
    rows, inner, cols = len(a), len(b), len(b[0])
    assert len(a[0]) == inner
    return [
        [sum(a[i][l] * b[l][j] for l in range(inner)) % p for j in range(cols)]
        for i in range(rows)
    ]


def all_edge_paths(net: Network, start: str, goal: str) -> list[list[str]]:
    """Every directed edge-id path from start node to goal node."""
    out: list[list[str]] = []

    def dfs(v: str, acc: list[str]) -> None:
        if v == goal and acc:
            out.append(list(acc))
        for e in net.out_edges(v):
            acc.append(e.id)
            dfs(e.head, acc)
            acc.pop()

    dfs(start, [])
    return out


def transfer_by_path_enumeration(net: Network, code: LinearCode) -> np.ndarray:
    """Transfer matrix as an explicit sum of path gains (exponential; tests only)."""
    p, k = code.field.p, code.k
    msgs = net.messages()
    rows = []
    for t in sorted(net.terminals):
        for slot in range(len(net.terminals[t].slots())):
            blocks = []
            for m in msgs:
                s = net.message_source(m)
                total = np.zeros((k, k), dtype=np.int64)
                for path in all_edge_paths(net, s, t):
                    g = code.source(m, path[0]).array()
                    for a, b in zip(path, path[1:]):
                        g = (code.local(a, b).array() @ g) % p
                    g = (code.decode(t, path[-1], slot).array() @ g) % p
                    total = (total + g) % p
                blocks.append(total)
            rows.append(np.concatenate(blocks, axis=1))
    return np.concatenate(rows, axis=0)
