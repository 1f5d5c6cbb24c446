"""Built-in generator networks and their known closed-form codes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .codes import LinearCode, identity_code
from .gflin import FieldSpec, MatrixGF
from .netmodel import Demand, Edge, Network, NetworkError, recover

FAMILIES = ("s_m", "s_m_star", "component", "bottleneck_mun")

# Relay out-edges of the component gadget that every solution is forced to
# fill with an invertible multiple of x1.
COMPONENT_DESIGNATED_EDGES = ("rel_1>mix", "rel_2>t_2")


@dataclass(frozen=True)
class FamilySpec:
    family: str
    m: int = 0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise NetworkError(f"unknown family {self.family!r}")
        if self.family in ("s_m", "s_m_star") and self.m < 3:
            raise NetworkError(f"{self.family} needs m >= 3")
        if self.family == "bottleneck_mun" and self.m < 2:
            raise NetworkError("bottleneck_mun needs m >= 2")


def _e(tail: str, head: str) -> Edge:
    return Edge(f"{tail}>{head}", tail, head)


def s_m(m: int) -> Network:
    """Sum network solvable exactly when the characteristic divides m - 2.

    Sources s_1..s_m; s_1..s_{m-1} reach every terminal but their own index
    directly, while the shared relays u_i, v_i merge s_i with s_m and fan out
    to t_i and t_m.
    """
    if m < 3:
        raise NetworkError("s_m needs m >= 3")
    nodes = (
        [f"s_{i}" for i in range(1, m + 1)]
        + [f"u_{i}" for i in range(1, m)]
        + [f"v_{i}" for i in range(1, m)]
        + [f"t_{i}" for i in range(1, m + 1)]
    )
    edges = []
    for i in range(1, m):
        for j in range(1, m):
            if i != j:
                edges.append(_e(f"s_{i}", f"t_{j}"))
        edges.append(_e(f"s_{i}", f"u_{i}"))
        edges.append(_e(f"s_{m}", f"u_{i}"))
        edges.append(_e(f"u_{i}", f"v_{i}"))
        edges.append(_e(f"v_{i}", f"t_{i}"))
        edges.append(_e(f"v_{i}", f"t_{m}"))
    return Network(
        name=f"s_{m}",
        nodes=tuple(nodes),
        edges=tuple(edges),
        sources={f"s_{i}": (f"x{i}",) for i in range(1, m + 1)},
        terminals={f"t_{i}": Demand("sum") for i in range(1, m + 1)},
    )


def s_m_star(m: int) -> Network:
    """Sum network solvable exactly when the characteristic does not divide m - 2."""
    if m < 3:
        raise NetworkError("s_m_star needs m >= 3")
    nodes = (
        [f"s_{i}" for i in range(1, m)]
        + [f"u_{i}" for i in range(1, m)]
        + [f"v_{i}" for i in range(1, m)]
        + [f"t_{i}" for i in range(1, m + 1)]
    )
    edges = []
    for i in range(1, m):
        edges.append(_e(f"s_{i}", f"t_{i}"))
        for j in range(1, m):
            if i != j:
                edges.append(_e(f"s_{i}", f"u_{j}"))
        edges.append(_e(f"u_{i}", f"v_{i}"))
        edges.append(_e(f"v_{i}", f"t_{i}"))
        edges.append(_e(f"v_{i}", f"t_{m}"))
    return Network(
        name=f"s_{m}_star",
        nodes=tuple(nodes),
        edges=tuple(edges),
        sources={f"s_{i}": (f"x{i}",) for i in range(1, m)},
        terminals={f"t_{i}": Demand("sum") for i in range(1, m + 1)},
    )


def component() -> Network:
    """Three-source forcing gadget with two terminals.

    t_1 demands x1 and only sees it through the mix line, t_2 demands x3 and
    must cancel the mixed-in x1 using rel_2's edge; together the demands force
    both relay out-edges to carry an invertible multiple of x1 and nothing
    else, in every solution.
    """
    nodes = ("s_1", "s_2", "s_3", "rel_1", "rel_2", "mix", "fan", "t_1", "t_2")
    edges = (
        _e("s_1", "rel_1"),
        _e("s_2", "rel_1"),
        _e("s_1", "rel_2"),
        _e("s_2", "rel_2"),
        _e("rel_1", "mix"),
        _e("s_3", "mix"),
        _e("mix", "fan"),
        _e("fan", "t_1"),
        _e("fan", "t_2"),
        _e("rel_2", "t_2"),
        _e("s_3", "t_1"),
    )
    return Network(
        name="component",
        nodes=nodes,
        edges=edges,
        sources={"s_1": ("x1",), "s_2": ("x2",), "s_3": ("x3",)},
        terminals={"t_1": recover("x1"), "t_2": recover("x3")},
    )


def bottleneck_mun(m: int) -> Network:
    """m unicast pairs all squeezed through one shared unit edge."""
    if m < 2:
        raise NetworkError("bottleneck_mun needs m >= 2")
    nodes = (
        [f"w_{i}" for i in range(1, m + 1)]
        + ["hub_in", "hub_out"]
        + [f"z_{i}" for i in range(1, m + 1)]
    )
    edges = [_e("hub_in", "hub_out")]
    for i in range(1, m + 1):
        edges.append(_e(f"w_{i}", "hub_in"))
        edges.append(_e("hub_out", f"z_{i}"))
    return Network(
        name=f"bottleneck_{m}",
        nodes=tuple(nodes),
        edges=tuple(edges),
        sources={f"w_{i}": (f"x{i}",) for i in range(1, m + 1)},
        terminals={f"z_{i}": recover(f"x{i}") for i in range(1, m + 1)},
    )


def generate(spec: FamilySpec) -> Network:
    if spec.family == "s_m":
        return s_m(spec.m)
    if spec.family == "s_m_star":
        return s_m_star(spec.m)
    if spec.family == "component":
        return component()
    return bottleneck_mun(spec.m)


def _bottleneck_fractional_code(m: int, field: FieldSpec) -> LinearCode:
    """(1, 2) time-sharing code for the sum network built on bottleneck_mun(m).

    First symbol slot: the bottleneck carries the sum of the first m messages
    to every left terminal while the mix lines carry only x_{m+1}.  Second
    slot: each right terminal combines its direct edge with its mix line.
    """
    from .transforms import c2  # deferred to avoid an import cycle

    net, trace = c2(bottleneck_mun(m))
    top = MatrixGF(field, [[1], [0]])
    bottom = MatrixGF(field, [[0], [1]])
    both = MatrixGF(field, [[1], [1]])
    eye2 = MatrixGF.identity(field, 2)
    src: dict[tuple[str, str], MatrixGF] = {}
    loc: dict[tuple[str, str], MatrixGF] = {}
    dec: dict[tuple[str, str, int], MatrixGF] = {}
    for e in net.edges:
        role = trace.role(e.id) or ""
        if e.tail in net.sources:
            msg = net.sources[e.tail][0]
            if role.startswith("source feed"):
                src[(msg, e.id)] = top
            elif role.startswith("extra source feed"):
                src[(msg, e.id)] = both
            else:  # cross feed / direct right
                src[(msg, e.id)] = bottom
        else:
            for ein in net.in_edges(e.tail):
                loc[(ein.id, e.id)] = eye2
    for t in net.terminal_nodes():
        gamma = bottom.transpose() if (trace.role(t) or "").startswith("right") else top.transpose()
        for e in net.in_edges(t):
            dec[(t, e.id, 0)] = gamma
    return LinearCode(field, 1, 2, src, loc, dec)


def known_code(spec: FamilySpec, field: FieldSpec) -> Optional[LinearCode]:
    """The explicit closed-form solution for a family, when one exists.

    s_m: the all-identity scalar code, valid when p divides m - 2.
    s_m_star: identity everywhere except the last terminal, which decodes
    with (m - 2)^{-1}; valid when p does not divide m - 2.
    bottleneck_mun: the (1, 2) code above, bound to c2(bottleneck_mun(m)).
    """
    p = field.p
    if spec.family == "s_m":
        if (spec.m - 2) % p != 0:
            return None
        return identity_code(s_m(spec.m), field, k=1)
    if spec.family == "s_m_star":
        if (spec.m - 2) % p == 0:
            return None
        net = s_m_star(spec.m)
        code = identity_code(net, field, k=1)
        inv = MatrixGF(field, [[field.inv(spec.m - 2)]])
        dec = dict(code.decode_coeff)
        t_last = f"t_{spec.m}"
        for e in net.in_edges(t_last):
            dec[(t_last, e.id, 0)] = inv
        return LinearCode(field, 1, 1, dict(code.source_coeff), dict(code.local_coeff), dec)
    if spec.family == "bottleneck_mun":
        return _bottleneck_fractional_code(spec.m, field)
    return None
