"""Fractional linear codes, transfer matrices and nonlinear table codes.

A (k, n) linear code assigns an n x k mixing matrix to every (message,
out-edge) pair at a source, an n x n matrix to every adjacent (in-edge,
out-edge) pair at an interior node, and a k x n matrix per (terminal,
in-edge, recovery slot).  Missing keys mean the zero matrix, so sparse codes
stay cheap to write down.

The transfer matrix between the stacked source messages and the stacked
terminal recoveries is computed by propagating symbolic edge maps in
topological order; on small graphs the tests cross-check it against the
path-gain-sum definition by explicit path enumeration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Optional

import numpy as np

from .gflin import FieldSpec, MatrixGF
from .netmodel import Network, reverse_id, reverse_network


class CodeError(ValueError):
    """Code is malformed or not bound to the given network."""


class BudgetExceededError(RuntimeError):
    """An exhaustive check would exceed its configured budget."""


@dataclass(frozen=True)
class LinearCode:
    field: FieldSpec
    k: int
    n: int
    source_coeff: dict[tuple[str, str], MatrixGF]
    local_coeff: dict[tuple[str, str], MatrixGF]
    decode_coeff: dict[tuple[str, str, int], MatrixGF]

    def source(self, msg: str, edge_id: str) -> MatrixGF:
        m = self.source_coeff.get((msg, edge_id))
        return m if m is not None else MatrixGF.zeros(self.field, self.n, self.k)

    def local(self, edge_in: str, edge_out: str) -> MatrixGF:
        m = self.local_coeff.get((edge_in, edge_out))
        return m if m is not None else MatrixGF.zeros(self.field, self.n, self.n)

    def decode(self, terminal: str, edge_id: str, slot: int) -> MatrixGF:
        m = self.decode_coeff.get((terminal, edge_id, slot))
        return m if m is not None else MatrixGF.zeros(self.field, self.k, self.n)


def validate_code(net: Network, code: LinearCode) -> None:
    """Check every key references the network and every shape is exact."""
    if code.k < 1 or code.n < 1:
        raise CodeError("k and n must be positive")
    for (msg, eid), m in code.source_coeff.items():
        if not net.has_edge(eid):
            raise CodeError(f"unknown edge {eid!r}")
        e = net.edge(eid)
        if e.tail not in net.sources or msg not in net.sources[e.tail]:
            raise CodeError(f"message {msg!r} is not generated at tail of {eid!r}")
        if (m.rows, m.cols) != (code.n, code.k):
            raise CodeError(f"source coefficient for {(msg, eid)} must be n x k")
    for (ein, eout), m in code.local_coeff.items():
        if not (net.has_edge(ein) and net.has_edge(eout)):
            raise CodeError(f"unknown edge pair {(ein, eout)}")
        if net.edge(ein).head != net.edge(eout).tail:
            raise CodeError(f"edges {(ein, eout)} are not adjacent")
        if net.edge(eout).tail in net.sources:
            raise CodeError("interior coefficient at a source node")
        if (m.rows, m.cols) != (code.n, code.n):
            raise CodeError(f"local coefficient for {(ein, eout)} must be n x n")
    for (t, eid, slot), m in code.decode_coeff.items():
        if t not in net.terminals:
            raise CodeError(f"{t!r} is not a terminal")
        if not net.has_edge(eid) or net.edge(eid).head != t:
            raise CodeError(f"edge {eid!r} does not enter terminal {t!r}")
        if not 0 <= slot < len(net.terminals[t].slots()):
            raise CodeError(f"slot {slot} out of range at {t!r}")
        if (m.rows, m.cols) != (code.k, code.n):
            raise CodeError(f"decode coefficient for {(t, eid, slot)} must be k x n")


def identity_code(net: Network, field: FieldSpec, k: int = 1) -> LinearCode:
    """(k, k) code with every coefficient the identity matrix."""
    eye = MatrixGF.identity(field, k)
    src, loc, dec = {}, {}, {}
    for e in net.edges:
        if e.tail in net.sources:
            for msg in net.sources[e.tail]:
                src[(msg, e.id)] = eye
        else:
            for ein in net.in_edges(e.tail):
                loc[(ein.id, e.id)] = eye
    for t, d in net.terminals.items():
        for slot in range(len(d.slots())):
            for e in net.in_edges(t):
                dec[(t, e.id, slot)] = eye
    return LinearCode(field, k, k, src, loc, dec)


# -- evaluation and transfer --------------------------------------------------


def _message_offsets(net: Network, k: int) -> dict[str, int]:
    return {m: i * k for i, m in enumerate(net.messages())}


def edge_symbol_maps(net: Network, code: LinearCode) -> dict[str, np.ndarray]:
    """For each edge, the n x (#messages * k) map from stacked messages to Y_e."""
    p = code.field.p
    k, n = code.k, code.n
    msgs = net.messages()
    width = len(msgs) * k
    off = _message_offsets(net, k)
    maps: dict[str, np.ndarray] = {}
    for v in net.topo_order():
        for e in net.out_edges(v):
            m = np.zeros((n, width), dtype=np.int64)
            if v in net.sources:
                for msg in net.sources[v]:
                    a = code.source(msg, e.id).array()
                    if a.any():
                        m[:, off[msg]:off[msg] + k] = (m[:, off[msg]:off[msg] + k] + a) % p
            else:
                for ein in net.in_edges(v):
                    b = code.local(ein.id, e.id).array()
                    if b.any():
                        m = (m + b @ maps[ein.id]) % p
            maps[e.id] = m
    return maps


def eval_linear(
    net: Network, code: LinearCode, x: Mapping[str, Iterable[int]]
) -> dict[str, list[tuple[int, ...]]]:
    """Propagate a concrete input; returns recovered slot vectors per terminal."""
    p = code.field.p
    msgs = net.messages()
    missing = [m for m in msgs if m not in x]
    if missing:
        raise CodeError(f"input misses messages {missing}")
    vec = np.concatenate([np.asarray(list(x[m]), dtype=np.int64) % p for m in msgs])
    if vec.shape != (len(msgs) * code.k,):
        raise CodeError("every message needs a k-vector")
    maps = edge_symbol_maps(net, code)
    out: dict[str, list[tuple[int, ...]]] = {}
    for t in net.terminal_nodes():
        slots = []
        for slot in range(len(net.terminals[t].slots())):
            r = np.zeros(code.k, dtype=np.int64)
            for e in net.in_edges(t):
                g = code.decode(t, e.id, slot).array()
                r = (r + g @ (maps[e.id] @ vec)) % p
            slots.append(tuple(int(v) for v in r))
        out[t] = slots
    return out


@dataclass(frozen=True)
class TransferMatrix:
    """Stacked terminal recoveries as a linear map of stacked source messages."""

    field: FieldSpec
    k: int
    row_labels: tuple[tuple[str, str], ...]  # (terminal, slot label)
    col_labels: tuple[str, ...]  # message ids
    matrix: MatrixGF

    def block(self, i: int, j: int) -> MatrixGF:
        k = self.k
        a = self.matrix.array()[i * k:(i + 1) * k, j * k:(j + 1) * k]
        return MatrixGF.from_array(self.field, a)

    def transpose_labels(self) -> "TransferMatrix":
        """Transpose with rows and columns swapped (labels lose their meaning)."""
        return TransferMatrix(
            self.field,
            self.k,
            tuple((c, c) for c in self.col_labels),
            tuple(r for r, _ in self.row_labels),
            self.matrix.transpose(),
        )


def transfer_rows(net: Network) -> tuple[tuple[str, str], ...]:
    rows = []
    for t in net.terminal_nodes():
        for label in net.terminals[t].slots():
            rows.append((t, label))
    return tuple(rows)


def transfer_matrix(net: Network, code: LinearCode) -> TransferMatrix:
    p = code.field.p
    k = code.k
    msgs = net.messages()
    maps = edge_symbol_maps(net, code)
    rows = transfer_rows(net)
    out = np.zeros((len(rows) * k, len(msgs) * k), dtype=np.int64)
    i = 0
    for t in net.terminal_nodes():
        for slot in range(len(net.terminals[t].slots())):
            r = np.zeros((k, len(msgs) * k), dtype=np.int64)
            for e in net.in_edges(t):
                g = code.decode(t, e.id, slot).array()
                if g.any():
                    r = (r + g @ maps[e.id]) % p
            out[i * k:(i + 1) * k] = r
            i += 1
    return TransferMatrix(code.field, k, rows, msgs, MatrixGF.from_array(code.field, out))


def target_transfer_array(net: Network, field: FieldSpec, k: int) -> np.ndarray:
    """The transfer matrix a solution must equal, as a raw array."""
    msgs = net.messages()
    col = {m: i for i, m in enumerate(msgs)}
    rows = transfer_rows(net)
    out = np.zeros((len(rows) * k, len(msgs) * k), dtype=np.int64)
    eye = np.eye(k, dtype=np.int64)
    for i, (t, label) in enumerate(rows):
        if net.terminals[t].kind == "sum":
            for j in range(len(msgs)):
                out[i * k:(i + 1) * k, j * k:(j + 1) * k] = eye
        else:
            j = col[label]
            out[i * k:(i + 1) * k, j * k:(j + 1) * k] = eye
    return out


def is_solution(net: Network, code: LinearCode) -> bool:
    """True iff the transfer matrix hits the demand-appropriate target exactly."""
    t = transfer_matrix(net, code)
    return bool(
        np.array_equal(t.matrix.array(), target_transfer_array(net, code.field, code.k))
    )


def path_gain(
    net: Network,
    code: LinearCode,
    path: Iterable[str],
    msg: Optional[str] = None,
    terminal: Optional[str] = None,
    slot: int = 0,
) -> MatrixGF:
    """Ordered product of the local coefficients along a path, last leftmost.

    ``msg`` prepends the virtual message edge (the source coefficient becomes
    the first factor); ``terminal`` appends the recovery edge (the decode
    coefficient becomes the last).  A bare single-edge path has no factors
    and yields the n x n identity.
    """
    edges = list(path)
    if not edges:
        raise CodeError("empty path")
    for a, b in zip(edges, edges[1:]):
        if net.edge(a).head != net.edge(b).tail:
            raise CodeError(f"edges {a!r} and {b!r} are not adjacent")
    factors: list[MatrixGF] = []
    if msg is not None:
        if net.edge(edges[0]).tail != net.message_source(msg):
            raise CodeError(f"path does not start at the source of {msg!r}")
        factors.append(code.source(msg, edges[0]))
    for a, b in zip(edges, edges[1:]):
        factors.append(code.local(a, b))
    if terminal is not None:
        if net.edge(edges[-1]).head != terminal:
            raise CodeError(f"path does not end at {terminal!r}")
        factors.append(code.decode(terminal, edges[-1], slot))
    gain = MatrixGF.identity(code.field, code.n)
    for f in factors:
        gain = f @ gain
    return gain


def canonical_reverse_code(net: Network, code: LinearCode) -> LinearCode:
    """Code for the reversed network: every coefficient transposed and re-keyed.

    Source coefficients become decode coefficients of the swapped roles and
    vice versa; every path gain in the reverse network is the transpose of the
    original, hence so is the whole transfer matrix.
    """
    rev = reverse_network(net)
    loc = {
        (reverse_id(eout), reverse_id(ein)): m.transpose()
        for (ein, eout), m in code.local_coeff.items()
    }
    dec: dict[tuple[str, str, int], MatrixGF] = {}
    for (msg, eid), m in code.source_coeff.items():
        s = net.message_source(msg)
        slot = net.sources[s].index(msg)
        dec[(s, reverse_id(eid), slot)] = m.transpose()
    src: dict[tuple[str, str], MatrixGF] = {}
    for (t, eid, slot), m in code.decode_coeff.items():
        src[(rev.sources[t][slot], reverse_id(eid))] = m.transpose()
    return LinearCode(code.field, code.k, code.n, src, loc, dec)


# -- nonlinear table codes ----------------------------------------------------


@dataclass(frozen=True)
class NonlinearCode:
    """Table-based code over the cyclic group Z_q (scalar symbols).

    Edge tables are indexed by the tuple of parent symbols (messages declared
    at the tail for a source edge, else the symbols on the tail's in-edges,
    sorted by edge id), flattened in lexicographic input order.  Each terminal
    recovers a single symbol.
    """

    q: int
    edge_fn: dict[str, tuple[int, ...]]
    decode_fn: dict[str, tuple[int, ...]]


def edge_arity(net: Network, edge_id: str) -> int:
    tail = net.edge(edge_id).tail
    if tail in net.sources:
        return len(net.sources[tail])
    return len(net.in_edges(tail))


def validate_nonlinear(net: Network, code: NonlinearCode) -> None:
    if code.q < 2:
        raise CodeError("q must be at least 2")
    for e in net.edges:
        table = code.edge_fn.get(e.id)
        if table is None:
            raise CodeError(f"missing table for edge {e.id!r}")
        if len(table) != code.q ** edge_arity(net, e.id):
            raise CodeError(f"table for edge {e.id!r} is not total")
        if any(not 0 <= v < code.q for v in table):
            raise CodeError(f"table for edge {e.id!r} has out-of-range symbols")
    for t, d in net.terminals.items():
        if len(d.slots()) != 1:
            raise CodeError("nonlinear codes support single-slot demands only")
        table = code.decode_fn.get(t)
        if table is None:
            raise CodeError(f"missing decode table for terminal {t!r}")
        if len(table) != code.q ** len(net.in_edges(t)):
            raise CodeError(f"decode table for {t!r} is not total")
        if any(not 0 <= v < code.q for v in table):
            raise CodeError(f"decode table for {t!r} has out-of-range symbols")


def _table_index(inputs: Iterable[int], q: int) -> int:
    idx = 0
    for v in inputs:
        idx = idx * q + v
    return idx


def eval_nonlinear(net: Network, code: NonlinearCode, x: Mapping[str, int]) -> dict[str, int]:
    q = code.q
    sym: dict[str, int] = {}
    for v in net.topo_order():
        for e in net.out_edges(v):
            if v in net.sources:
                inputs = [x[m] % q for m in net.sources[v]]
            else:
                inputs = [sym[ein.id] for ein in net.in_edges(v)]
            sym[e.id] = code.edge_fn[e.id][_table_index(inputs, q)]
    out = {}
    for t in net.terminal_nodes():
        inputs = [sym[e.id] for e in net.in_edges(t)]
        out[t] = code.decode_fn[t][_table_index(inputs, q)]
    return out


def verify_nonlinear(net: Network, code: NonlinearCode, budget: int = 1_000_000) -> bool:
    """Exhaustively check every source tuple; may raise BudgetExceededError."""
    validate_nonlinear(net, code)
    msgs = net.messages()
    if code.q ** len(msgs) > budget:
        raise BudgetExceededError(f"{code.q}**{len(msgs)} inputs exceed budget {budget}")
    for values in product(range(code.q), repeat=len(msgs)):
        x = dict(zip(msgs, values))
        got = eval_nonlinear(net, code, x)
        for t, d in net.terminals.items():
            want = sum(values) % code.q if d.kind == "sum" else x[d.messages[0]]
            if got[t] != want:
                return False
    return True


def additive_code(net: Network, q: int) -> NonlinearCode:
    """Every edge and decoder outputs the sum of its inputs mod q."""
    edge_fn = {}
    for e in net.edges:
        r = edge_arity(net, e.id)
        edge_fn[e.id] = tuple(
            sum(inp) % q for inp in product(range(q), repeat=r)
        )
    decode_fn = {}
    for t in net.terminals:
        r = len(net.in_edges(t))
        decode_fn[t] = tuple(sum(inp) % q for inp in product(range(q), repeat=r))
    return NonlinearCode(q, edge_fn, decode_fn)


# -- JSON ----------------------------------------------------------------------


def code_to_dict(code: LinearCode) -> dict:
    return {
        "field": code.field.p,
        "k": code.k,
        "n": code.n,
        "source_coeff": [
            {"msg": msg, "edge": eid, "mat": code.source_coeff[(msg, eid)].tolists()}
            for msg, eid in sorted(code.source_coeff)
        ],
        "local_coeff": [
            {"in": a, "out": b, "mat": code.local_coeff[(a, b)].tolists()}
            for a, b in sorted(code.local_coeff)
        ],
        "decode_coeff": [
            {
                "terminal": t,
                "edge": eid,
                "slot": slot,
                "mat": code.decode_coeff[(t, eid, slot)].tolists(),
            }
            for t, eid, slot in sorted(code.decode_coeff)
        ],
    }


def code_from_dict(d: dict) -> LinearCode:
    f = FieldSpec(d["field"])
    return LinearCode(
        field=f,
        k=d["k"],
        n=d["n"],
        source_coeff={
            (e["msg"], e["edge"]): MatrixGF(f, e["mat"]) for e in d.get("source_coeff", ())
        },
        local_coeff={
            (e["in"], e["out"]): MatrixGF(f, e["mat"]) for e in d.get("local_coeff", ())
        },
        decode_coeff={
            (e["terminal"], e["edge"], e["slot"]): MatrixGF(f, e["mat"])
            for e in d.get("decode_coeff", ())
        },
    )


def code_to_json(code: LinearCode) -> str:
    return json.dumps(code_to_dict(code), indent=2, sort_keys=True) + "\n"


def code_from_json(text: str) -> LinearCode:
    return code_from_dict(json.loads(text))


def nonlinear_to_dict(code: NonlinearCode) -> dict:
    return {
        "q": code.q,
        "edge_fn": [
            {"edge": e, "table": list(code.edge_fn[e])} for e in sorted(code.edge_fn)
        ],
        "decode_fn": [
            {"terminal": t, "table": list(code.decode_fn[t])}
            for t in sorted(code.decode_fn)
        ],
    }


def nonlinear_from_dict(d: dict) -> NonlinearCode:
    return NonlinearCode(
        q=d["q"],
        edge_fn={e["edge"]: tuple(e["table"]) for e in d.get("edge_fn", ())},
        decode_fn={e["terminal"]: tuple(e["table"]) for e in d.get("decode_fn", ())},
    )


def nonlinear_to_json(code: NonlinearCode) -> str:
    return json.dumps(nonlinear_to_dict(code), indent=2, sort_keys=True) + "\n"


def nonlinear_from_json(text: str) -> NonlinearCode:
    return nonlinear_from_dict(json.loads(text))
