"""Exhaustive solvability search with a two-stage split.

Stage 1 enumerates the interior coefficients (source mixing and local
coefficients); stage 2 solves for the decoding coefficients of each terminal
as an exact linear system, which is complete because every recovery is linear
in the decoding coefficients once the interior is fixed.

Two reductions shrink stage 1 without losing solvability, so an exhausted
search still justifies an "unsolvable" verdict:

* an out-edge of a source generating a single message carries ``alpha @ X``;
  any downstream consumer can absorb an invertible change of basis, and for
  n >= k the canonical ``eye(n, k)`` reaches every achievable composite, so
  the coefficient is pinned instead of enumerated;
* with ``collapse_chains`` on, the coefficients behind a relay of in-degree
  one are pinned to the identity for the same reason.

The remaining unknowns are grouped into buckets, one per terminal, in greedy
order of smallest outstanding dependency set.  A bucket whose terminal checks
read only its own unknowns has a context-independent survivor list, which is
enumerated once and memoized; the outer search walks the product of survivor
lists and applies the remaining cross-bucket checks.  Unknowns no terminal
can observe are pinned to zero.  Within a bucket, values run 0..p-1 per
entry in row-major order and buckets nest in emission order, so the first
witness is deterministic and parallel partitions merge to the same result.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Optional, Sequence

import numpy as np

from .codes import (
    LinearCode,
    NonlinearCode,
    code_from_dict,
    code_to_dict,
    edge_arity,
    is_solution,
    nonlinear_to_dict,
    target_transfer_array,
    transfer_rows,
    verify_nonlinear,
)
from .families import FamilySpec, generate
from .gflin import FieldSpec, MatrixGF, solve_right_arrays
from .netmodel import Network

SOLVABLE = "solvable"
UNSOLVABLE = "unsolvable"
BUDGET_EXCEEDED = "budget_exceeded"


@dataclass(frozen=True)
class SearchOptions:
    budget: int = 50_000_000
    normalize_sources: bool = False
    collapse_chains: bool = True
    parallel: bool = False

    def __post_init__(self) -> None:
        if self.budget < 1:
            raise ValueError("budget must be at least 1")


@dataclass
class SearchReport:
    verdict: str
    mode: str
    enumerated: int
    elapsed: float
    witness: Optional[object] = None
    options: SearchOptions = field(default_factory=SearchOptions)

    def to_dict(self) -> dict:
        w = None
        if isinstance(self.witness, LinearCode):
            w = {"kind": "linear", **code_to_dict(self.witness)}
        elif isinstance(self.witness, NonlinearCode):
            w = {"kind": "nonlinear", **nonlinear_to_dict(self.witness)}
        return {
            "verdict": self.verdict,
            "mode": self.mode,
            "enumerated": self.enumerated,
            "elapsed_s": round(self.elapsed, 6),
            "witness": w,
        }


class _Budget(Exception):
    pass


def _mode(k: int, n: int) -> str:
    if k == n == 1:
        return "scalar"
    if k == n:
        return f"vector({k})"
    return f"fractional({k},{n})"


def _index_matrix(idx: int, rows: int, cols: int, p: int) -> tuple[tuple[int, ...], ...]:
    flat = [0] * (rows * cols)
    for pos in range(rows * cols - 1, -1, -1):
        flat[pos] = idx % p
        idx //= p
    return tuple(tuple(flat[r * cols:(r + 1) * cols]) for r in range(rows))


def _row_basis(rows, p: int) -> list[tuple[int, list[int]]]:
    """Echelonized spanning set as (pivot column, normalized row) pairs."""
    basis: list[tuple[int, list[int]]] = []
    for row in rows:
        r = list(row)
        for pc, br in basis:
            c = r[pc]
            if c:
                r = [(x - c * y) % p for x, y in zip(r, br)]
        piv = next((i for i, x in enumerate(r) if x), None)
        if piv is not None:
            inv = pow(r[piv], p - 2, p)
            basis.append((piv, [(x * inv) % p for x in r]))
    return basis


def _in_row_space(basis, row, p: int) -> bool:
    r = list(row)
    for pc, br in basis:
        c = r[pc]
        if c:
            r = [(x - c * y) % p for x, y in zip(r, br)]
    return not any(r)


def _backward_cone(net: Network, terminal: str) -> set[str]:
    seen: set[str] = set()
    stack = [e.id for e in net.in_edges(terminal)]
    while stack:
        eid = stack.pop()
        if eid in seen:
            continue
        seen.add(eid)
        for ein in net.in_edges(net.edge(eid).tail):
            stack.append(ein.id)
    return seen


@dataclass
class _Bucket:
    units: list[tuple]
    local_checks: list[tuple[int, str]]  # (position of last needed unit, terminal)
    cross_checks: list[str]  # checked once the bucket is fully assigned


class _BucketPlan:
    """Greedy grouping of unknowns into per-terminal buckets."""

    def __init__(self, terminals: Sequence[str], deps: dict[str, set], canonical: list[tuple]):
        pos = {u: i for i, u in enumerate(canonical)}
        self.prechecks = sorted(t for t in terminals if not deps[t])
        todo = sorted(t for t in terminals if deps[t])
        placed: set = set()
        self.buckets: list[_Bucket] = []
        while todo:
            lead = min(todo, key=lambda t: (len(deps[t] - placed), t))
            fresh = sorted(deps[lead] - placed, key=lambda u: pos[u])
            fresh_set = set(fresh)
            fired = [t for t in todo if deps[t] <= placed | fresh_set]
            local, cross = [], []
            at = {u: i for i, u in enumerate(fresh)}
            for t in sorted(fired):
                if deps[t] <= fresh_set:
                    local.append((max(at[u] for u in deps[t]), t))
                else:
                    cross.append(t)
            local.sort()
            self.buckets.append(_Bucket(fresh, local, cross))
            placed |= fresh_set
            todo = [t for t in todo if t not in fired]
        self.unobserved = [u for u in canonical if u not in placed]


class _BucketSearch:
    """Shared DFS over buckets with memoized survivor lists.

    ``space(u)`` gives a unit's value-space size, ``value(u, idx)`` its idx-th
    value, ``check(t, assign)`` the feasibility test.  ``pinned`` fixes the
    very first unit's value index (used to partition parallel runs).
    """

    def __init__(
        self,
        plan: _BucketPlan,
        space: Callable[[tuple], int],
        value: Callable[[tuple, int], object],
        check: Callable[[str, dict], bool],
        budget: int,
        pinned: Optional[int] = None,
    ):
        self.plan = plan
        self.space = space
        self.value = value
        self.check = check
        self.budget = budget
        self.pinned = pinned
        self.count = 0
        self.memo: dict[int, list[tuple]] = {}
        self.assign: dict = {}

    def _tick(self) -> None:
        self.count += 1
        if self.count > self.budget:
            raise _Budget()

    def _survivors(self, bi: int) -> list[tuple]:
        if bi in self.memo:
            return self.memo[bi]
        b = self.plan.buckets[bi]
        out: list[tuple] = []
        values: list = [None] * len(b.units)
        checks_at: dict[int, list[str]] = {}
        for p, t in b.local_checks:
            checks_at.setdefault(p, []).append(t)

        def enum(depth: int) -> None:
            if depth == len(b.units):
                out.append(tuple(values))
                return
            u = b.units[depth]
            idxs: Sequence[int] = range(self.space(u))
            if bi == 0 and depth == 0 and self.pinned is not None:
                idxs = [self.pinned]
            for idx in idxs:
                self._tick()
                v = self.value(u, idx)
                values[depth] = v
                self.assign[u] = v
                if all(self.check(t, self.assign) for t in checks_at.get(depth, ())):
                    enum(depth + 1)
            del self.assign[u]

        enum(0)
        self.memo[bi] = out
        return out

    def run(self) -> Optional[dict]:
        for t in self.plan.prechecks:
            if not self.check(t, self.assign):
                return None

        def walk(bi: int) -> Optional[dict]:
            if bi == len(self.plan.buckets):
                return dict(self.assign)
            b = self.plan.buckets[bi]
            for sv in self._survivors(bi):
                self._tick()
                for u, v in zip(b.units, sv):
                    self.assign[u] = v
                if all(self.check(t, self.assign) for t in b.cross_checks):
                    found = walk(bi + 1)
                    if found is not None:
                        return found
            for u in b.units:
                self.assign.pop(u, None)
            return None

        return walk(0)


class _StagedProblem:
    """Precomputation for one (network, field, k, n, options) linear search.

    Symbolic edge maps are n x (#messages * k) integer row lists; the hot
    feasibility check works on them with plain integer arithmetic, numpy is
    only used when assembling the witness.
    """

    def __init__(self, net: Network, fieldspec: FieldSpec, k: int, n: int, opts: SearchOptions):
        self.net = net
        self.field = fieldspec
        self.p = fieldspec.p
        self.k, self.n = k, n
        self.opts = opts
        self.msgs = net.messages()
        self.width = len(self.msgs) * k
        self.off = {m: i * k for i, m in enumerate(self.msgs)}
        self.pinned_eye = tuple(
            tuple(1 if i == j else 0 for j in range(k)) for i in range(n)
        )

        canonical: list[tuple] = []
        self.shape: dict[tuple, tuple[int, int]] = {}
        topo_pos = {v: i for i, v in enumerate(net.topo_order())}
        for v in net.topo_order():
            for e in net.out_edges(v):
                for u in self._edge_units(e.id):
                    canonical.append(u)
                    self.shape[u] = (n, k) if u[0] == "alpha" else (n, n)

        unit_set = set(canonical)
        self.cone: dict[str, list[str]] = {}
        deps: dict[str, set] = {}
        for t in net.terminal_nodes():
            edges = _backward_cone(net, t)
            self.cone[t] = sorted(edges, key=lambda eid: (topo_pos[net.edge(eid).tail], eid))
            need = set()
            for eid in edges:
                need.update(u for u in self._edge_units(eid) if u in unit_set)
            deps[t] = need

        self.plan = _BucketPlan(net.terminal_nodes(), deps, canonical)

        # Edges whose symbolic map never changes during the search.
        self.const_maps: dict[str, list[list[int]]] = {}
        for v in net.topo_order():
            for e in net.out_edges(v):
                if self._edge_units(e.id):
                    continue
                if v in net.sources or all(
                    ein.id in self.const_maps for ein in net.in_edges(v)
                ):
                    m = self._eval_edge(e.id, {}, self.const_maps)
                    if m is not None:
                        self.const_maps[e.id] = m

        target = target_transfer_array(net, fieldspec, k)
        self.targets: dict[str, list[list[int]]] = {}
        i = 0
        for t, _label in transfer_rows(net):
            self.targets.setdefault(t, []).extend(target[i * k:(i + 1) * k].tolist())
            i += 1

    def _edge_units(self, eid: str) -> list[tuple]:
        e = self.net.edge(eid)
        v = e.tail
        if v in self.net.sources:
            if self.opts.normalize_sources:
                return []
            if len(self.net.sources[v]) == 1 and self.n >= self.k:
                return []
            return [("alpha", msg, eid) for msg in self.net.sources[v]]
        if self.opts.collapse_chains and len(self.net.in_edges(v)) == 1:
            return []
        return [("beta", ein.id, eid) for ein in self.net.in_edges(v)]

    def _eval_edge(self, eid: str, assign: dict, maps: dict) -> Optional[list[list[int]]]:
        p, k, n = self.p, self.k, self.n
        e = self.net.edge(eid)
        v = e.tail
        m = [[0] * self.width for _ in range(n)]
        if v in self.net.sources:
            pinned = self.opts.normalize_sources or (
                len(self.net.sources[v]) == 1 and n >= k
            )
            for msg in self.net.sources[v]:
                a = self.pinned_eye if pinned else assign[("alpha", msg, eid)]
                o = self.off[msg]
                for i in range(n):
                    row, arow = m[i], a[i]
                    for j in range(k):
                        row[o + j] = (row[o + j] + arow[j]) % p
            return m
        collapsed = self.opts.collapse_chains and len(self.net.in_edges(v)) == 1
        for ein in self.net.in_edges(v):
            src = maps.get(ein.id)
            if src is None:
                return None
            if collapsed:
                for i in range(n):
                    row, srow = m[i], src[i]
                    for w in range(self.width):
                        row[w] = (row[w] + srow[w]) % p
            else:
                b = assign[("beta", ein.id, eid)]
                for i in range(n):
                    row, brow = m[i], b[i]
                    for l in range(n):
                        c = brow[l]
                        if c:
                            srow = src[l]
                            for w in range(self.width):
                                row[w] = (row[w] + c * srow[w]) % p
        return m

    def edge_maps(self, terminal: str, assign: dict) -> dict[str, list[list[int]]]:
        maps: dict[str, list[list[int]]] = {}
        for eid in self.cone[terminal]:
            if eid in self.const_maps:
                maps[eid] = self.const_maps[eid]
            else:
                maps[eid] = self._eval_edge(eid, assign, maps)
        return maps

    def feasible(self, t: str, assign: dict) -> bool:
        """Decoders exist iff every target row lies in the edge-map row space."""
        maps = self.edge_maps(t, assign)
        rows = []
        for e in self.net.in_edges(t):
            rows.extend(maps[e.id])
        basis = _row_basis(rows, self.p)
        return all(_in_row_space(basis, trow, self.p) for trow in self.targets[t])

    def solve_terminal(self, t: str, assign: dict) -> Optional[np.ndarray]:
        """Stacked decode coefficients for t, or None if infeasible."""
        maps = self.edge_maps(t, assign)
        ins = self.net.in_edges(t)
        target = np.array(self.targets[t], dtype=np.int64).reshape(-1, self.width)
        if not ins:
            return np.zeros((0, target.shape[0]), dtype=np.int64) if not target.any() else None
        m = np.array([row for e in ins for row in maps[e.id]], dtype=np.int64)
        return solve_right_arrays(m.T, target.T, self.p)

    def full_assignment(self, found: dict) -> dict:
        assign = dict(found)
        for u in self.plan.unobserved:
            r, c = self.shape[u]
            assign[u] = tuple((0,) * c for _ in range(r))
        return assign

    def witness(self, assign: dict) -> LinearCode:
        f, k, n = self.field, self.k, self.n
        src: dict[tuple[str, str], MatrixGF] = {}
        loc: dict[tuple[str, str], MatrixGF] = {}
        dec: dict[tuple[str, str, int], MatrixGF] = {}
        eye_n = MatrixGF.identity(f, n)
        for e in self.net.edges:
            v = e.tail
            units = self._edge_units(e.id)
            if v in self.net.sources:
                for msg in self.net.sources[v]:
                    a = assign[("alpha", msg, e.id)] if units else self.pinned_eye
                    src[(msg, e.id)] = MatrixGF(f, a)
            else:
                for ein in self.net.in_edges(v):
                    if units:
                        loc[(ein.id, e.id)] = MatrixGF(f, assign[("beta", ein.id, e.id)])
                    else:
                        loc[(ein.id, e.id)] = eye_n
        for t in self.net.terminal_nodes():
            x = self.solve_terminal(t, assign)
            if x is None:
                raise AssertionError("witness assembly hit an infeasible terminal")
            slots = len(self.net.terminals[t].slots())
            for j, e in enumerate(self.net.in_edges(t)):
                for s in range(slots):
                    gamma = x[j * n:(j + 1) * n, s * k:(s + 1) * k].T
                    dec[(t, e.id, s)] = MatrixGF.from_array(f, gamma)
        return LinearCode(f, k, n, src, loc, dec)

    def searcher(self, budget: int, pinned: Optional[int] = None) -> _BucketSearch:
        return _BucketSearch(
            self.plan,
            space=lambda u: self.p ** (self.shape[u][0] * self.shape[u][1]),
            value=lambda u, idx: _index_matrix(idx, *self.shape[u], self.p),
            check=self.feasible,
            budget=budget,
            pinned=pinned,
        )


def search_linear(
    net: Network,
    fieldspec: FieldSpec,
    k: int,
    n: int,
    opts: Optional[SearchOptions] = None,
) -> SearchReport:
    """Decide (k, n) fractional linear solvability over GF(p) by staged search."""
    opts = opts or SearchOptions()
    if k < 1 or n < 1:
        raise ValueError("k and n must be positive")
    start = time.monotonic()
    prob = _StagedProblem(net, fieldspec, k, n, opts)
    mode = _mode(k, n)

    if opts.parallel and prob.plan.buckets:
        return _search_parallel(net, fieldspec, k, n, opts, prob, start)

    search = prob.searcher(opts.budget)
    try:
        found = search.run()
    except _Budget:
        return SearchReport(BUDGET_EXCEEDED, mode, search.count - 1, time.monotonic() - start, None, opts)
    if found is None:
        return SearchReport(UNSOLVABLE, mode, search.count, time.monotonic() - start, None, opts)
    code = prob.witness(prob.full_assignment(found))
    if not is_solution(net, code):
        raise AssertionError("search produced a witness that fails verification")
    return SearchReport(SOLVABLE, mode, search.count, time.monotonic() - start, code, opts)


def _worker(args: tuple) -> tuple[int, str, Optional[dict], int]:
    net, p, k, n, opts, first_idx = args
    prob = _StagedProblem(net, FieldSpec(p), k, n, opts)
    search = prob.searcher(opts.budget, pinned=first_idx)
    try:
        found = search.run()
    except _Budget:
        return first_idx, BUDGET_EXCEEDED, None, search.count - 1
    if found is None:
        return first_idx, UNSOLVABLE, None, search.count
    code = prob.witness(prob.full_assignment(found))
    return first_idx, SOLVABLE, code_to_dict(code), search.count


def _search_parallel(
    net: Network,
    fieldspec: FieldSpec,
    k: int,
    n: int,
    opts: SearchOptions,
    prob: _StagedProblem,
    start: float,
) -> SearchReport:
    """Partition stage 1 on the first unknown; the merge keeps the lowest index."""
    u0 = prob.plan.buckets[0].units[0]
    rows, cols = prob.shape[u0]
    space = fieldspec.p ** (rows * cols)
    tasks = [(net, fieldspec.p, k, n, opts, i) for i in range(space)]
    workers = min(space, os.cpu_count() or 1)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_worker, tasks))
    results.sort(key=lambda r: r[0])
    enumerated = sum(r[3] for r in results)
    mode = _mode(k, n)
    for _i, verdict, witness, _c in results:
        if verdict == SOLVABLE:
            code = code_from_dict(witness)
            if not is_solution(net, code):
                raise AssertionError("parallel witness fails verification")
            return SearchReport(SOLVABLE, mode, enumerated, time.monotonic() - start, code, opts)
    if any(r[1] == BUDGET_EXCEEDED for r in results):
        return SearchReport(BUDGET_EXCEEDED, mode, enumerated, time.monotonic() - start, None, opts)
    return SearchReport(UNSOLVABLE, mode, enumerated, time.monotonic() - start, None, opts)


# -- raw reference search ------------------------------------------------------


def naive_search_linear(
    net: Network, fieldspec: FieldSpec, k: int, n: int, budget: int = 100_000_000
) -> SearchReport:
    """Reference search enumerating every coefficient, decoders included.

    No folding, no collapsing, no stage-2 solving: terminals are checked by
    direct comparison of their transfer rows once all their coefficients are
    assigned.  Exponentially slower than the staged search; exists so the two
    can be cross-checked on micro networks.
    """
    start = time.monotonic()
    p = fieldspec.p
    msgs = net.messages()
    width = len(msgs) * k
    off = {m: i * k for i, m in enumerate(msgs)}
    topo_pos = {v: i for i, v in enumerate(net.topo_order())}

    canonical: list[tuple] = []
    shape: dict[tuple, tuple[int, int]] = {}
    for v in net.topo_order():
        for e in net.out_edges(v):
            if v in net.sources:
                for msg in net.sources[v]:
                    u = ("alpha", msg, e.id)
                    canonical.append(u)
                    shape[u] = (n, k)
            else:
                for ein in net.in_edges(v):
                    u = ("beta", ein.id, e.id)
                    canonical.append(u)
                    shape[u] = (n, n)
    for t in net.terminal_nodes():
        for slot in range(len(net.terminals[t].slots())):
            for e in net.in_edges(t):
                u = ("gamma", t, e.id, slot)
                canonical.append(u)
                shape[u] = (k, n)

    cones: dict[str, list[str]] = {}
    deps: dict[str, set] = {}
    for t in net.terminal_nodes():
        edges = _backward_cone(net, t)
        cones[t] = sorted(edges, key=lambda eid: (topo_pos[net.edge(eid).tail], eid))
        need = set()
        for eid in edges:
            e = net.edge(eid)
            if e.tail in net.sources:
                need.update(("alpha", msg, eid) for msg in net.sources[e.tail])
            else:
                need.update(("beta", ein.id, eid) for ein in net.in_edges(e.tail))
        for slot in range(len(net.terminals[t].slots())):
            need.update(("gamma", t, e.id, slot) for e in net.in_edges(t))
        deps[t] = need

    target = target_transfer_array(net, fieldspec, k)
    target_rows_of: dict[str, list[list[list[int]]]] = {}
    for i, (t, _label) in enumerate(transfer_rows(net)):
        target_rows_of.setdefault(t, []).append(target[i * k:(i + 1) * k].tolist())

    def check(t: str, assign: dict) -> bool:
        maps: dict[str, list[list[int]]] = {}
        for eid in cones[t]:
            e = net.edge(eid)
            m = [[0] * width for _ in range(n)]
            if e.tail in net.sources:
                for msg in net.sources[e.tail]:
                    a = assign[("alpha", msg, eid)]
                    o = off[msg]
                    for i in range(n):
                        row, arow = m[i], a[i]
                        for j in range(k):
                            row[o + j] = (row[o + j] + arow[j]) % p
            else:
                for ein in net.in_edges(e.tail):
                    b = assign[("beta", ein.id, eid)]
                    src = maps[ein.id]
                    for i in range(n):
                        row, brow = m[i], b[i]
                        for l in range(n):
                            c = brow[l]
                            if c:
                                srow = src[l]
                                for w in range(width):
                                    row[w] = (row[w] + c * srow[w]) % p
            maps[eid] = m
        for slot, want in enumerate(target_rows_of[t]):
            r = [[0] * width for _ in range(k)]
            for e in net.in_edges(t):
                g = assign[("gamma", t, e.id, slot)]
                src = maps[e.id]
                for i in range(k):
                    row, grow = r[i], g[i]
                    for l in range(n):
                        c = grow[l]
                        if c:
                            srow = src[l]
                            for w in range(width):
                                row[w] = (row[w] + c * srow[w]) % p
            if r != want:
                return False
        return True

    plan = _BucketPlan(net.terminal_nodes(), deps, canonical)
    search = _BucketSearch(
        plan,
        space=lambda u: p ** (shape[u][0] * shape[u][1]),
        value=lambda u, idx: _index_matrix(idx, *shape[u], p),
        check=check,
        budget=budget,
    )
    try:
        found = search.run()
    except _Budget:
        return SearchReport(BUDGET_EXCEEDED, _mode(k, n), search.count - 1, time.monotonic() - start)
    if found is None:
        return SearchReport(UNSOLVABLE, _mode(k, n), search.count, time.monotonic() - start)
    for u in plan.unobserved:
        r, c = shape[u]
        found[u] = tuple((0,) * c for _ in range(r))
    f = fieldspec
    code = LinearCode(
        f,
        k,
        n,
        {(u[1], u[2]): MatrixGF(f, found[u]) for u in canonical if u[0] == "alpha"},
        {(u[1], u[2]): MatrixGF(f, found[u]) for u in canonical if u[0] == "beta"},
        {(u[1], u[2], u[3]): MatrixGF(f, found[u]) for u in canonical if u[0] == "gamma"},
    )
    if not is_solution(net, code):
        raise AssertionError("naive witness fails verification")
    return SearchReport(SOLVABLE, _mode(k, n), search.count, time.monotonic() - start, code)


# -- nonlinear search -----------------------------------------------------------


def search_nonlinear(net: Network, q: int, opts: Optional[SearchOptions] = None) -> SearchReport:
    """Exhaustive search over all Z_q table codes, terminals pruned early."""
    opts = opts or SearchOptions()
    if q < 2:
        raise ValueError("q must be at least 2")
    start = time.monotonic()
    msgs = net.messages()
    topo_pos = {v: i for i, v in enumerate(net.topo_order())}

    canonical: list[tuple] = []
    table_len: dict[tuple, int] = {}
    for v in net.topo_order():
        for e in net.out_edges(v):
            u = ("edge", e.id)
            canonical.append(u)
            table_len[u] = q ** edge_arity(net, e.id)
    for t in net.terminal_nodes():
        if len(net.terminals[t].slots()) != 1:
            raise ValueError("nonlinear search supports single-slot demands only")
        u = ("dec", t)
        canonical.append(u)
        table_len[u] = q ** len(net.in_edges(t))

    cones: dict[str, list[str]] = {}
    deps: dict[str, set] = {}
    for t in net.terminal_nodes():
        edges = _backward_cone(net, t)
        cones[t] = sorted(edges, key=lambda eid: (topo_pos[net.edge(eid).tail], eid))
        deps[t] = {("edge", eid) for eid in edges} | {("dec", t)}

    def table_of(idx: int, length: int) -> tuple[int, ...]:
        digits = []
        for _ in range(length):
            digits.append(idx % q)
            idx //= q
        return tuple(reversed(digits))

    def check(t: str, assign: dict) -> bool:
        dec = assign[("dec", t)]
        demand = net.terminals[t]
        for values in product(range(q), repeat=len(msgs)):
            x = dict(zip(msgs, values))
            sym: dict[str, int] = {}
            for eid in cones[t]:
                e = net.edge(eid)
                if e.tail in net.sources:
                    inputs = [x[m] for m in net.sources[e.tail]]
                else:
                    inputs = [sym[ein.id] for ein in net.in_edges(e.tail)]
                idx = 0
                for val in inputs:
                    idx = idx * q + val
                sym[eid] = assign[("edge", eid)][idx]
            idx = 0
            for e in net.in_edges(t):
                idx = idx * q + sym[e.id]
            want = sum(values) % q if demand.kind == "sum" else x[demand.messages[0]]
            if dec[idx] != want:
                return False
        return True

    plan = _BucketPlan(net.terminal_nodes(), deps, canonical)
    search = _BucketSearch(
        plan,
        space=lambda u: q ** table_len[u],
        value=lambda u, idx: table_of(idx, table_len[u]),
        check=check,
        budget=opts.budget,
    )
    mode = f"nonlinear(q={q})"
    try:
        found = search.run()
    except _Budget:
        return SearchReport(BUDGET_EXCEEDED, mode, search.count - 1, time.monotonic() - start, None, opts)
    if found is None:
        return SearchReport(UNSOLVABLE, mode, search.count, time.monotonic() - start, None, opts)
    for u in plan.unobserved:
        found[u] = tuple([0] * table_len[u])
    code = NonlinearCode(
        q,
        {u[1]: found[u] for u in canonical if u[0] == "edge"},
        {u[1]: found[u] for u in canonical if u[0] == "dec"},
    )
    if not verify_nonlinear(net, code):
        raise AssertionError("nonlinear witness fails verification")
    return SearchReport(SOLVABLE, mode, search.count, time.monotonic() - start, code, opts)


def classify_characteristics(
    spec: FamilySpec,
    k: int,
    primes: Sequence[int],
    opts: Optional[SearchOptions] = None,
) -> dict[int, str]:
    """Per-prime scalar/vector solvability pattern of a built-in family."""
    net = generate(spec)
    out = {}
    for p in primes:
        out[p] = search_linear(net, FieldSpec(p), k, k, opts).verdict
    return out
