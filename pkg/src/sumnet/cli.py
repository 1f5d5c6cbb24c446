"""Command-line entry point: generation, transforms, search and export.

Every subcommand reads and writes JSON (``-`` for standard streams), so runs
are reproducible from the shell.  Exit codes: 0 success, 1 domain error,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import families, solver, transforms
from .codes import (
    CodeError,
    LinearCode,
    code_from_json,
    code_to_json,
    canonical_reverse_code,
    is_solution,
    nonlinear_from_json,
    transfer_matrix,
    validate_code,
    verify_nonlinear,
)
from .gflin import FieldSpec, MatrixGF
from .netmodel import (
    Network,
    NetworkError,
    connectivity,
    min_cut,
    network_from_json,
    network_to_json,
)
from .solver import SearchOptions


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _load_net(path: str) -> Network:
    return network_from_json(_read(path))


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def export_dot(net: Network, trace: Optional[transforms.TransformTrace] = None) -> str:
    """Graphviz text with sources and terminals visually distinguished."""
    lines = [f'digraph "{net.name or "network"}" {{', "  rankdir=LR;"]
    for v in net.nodes:
        attrs = ['shape=ellipse']
        label = v
        if v in net.sources:
            attrs = ["shape=box", "style=filled", "fillcolor=lightblue"]
            label += "\\n" + ",".join(net.sources[v])
        elif v in net.terminals:
            d = net.terminals[v]
            attrs = ["shape=doubleoctagon", "style=filled", "fillcolor=lightyellow"]
            label += "\\n" + ("sum" if d.kind == "sum" else ",".join(d.messages))
        if trace is not None and trace.role(v):
            label += "\\n[" + trace.role(v) + "]"
        attrs.append(f'label="{label}"')
        lines.append(f'  "{v}" [{", ".join(attrs)}];')
    for e in net.edges:
        label = e.id
        if trace is not None and trace.role(e.id):
            label += "\\n[" + trace.role(e.id) + "]"
        lines.append(f'  "{e.tail}" -> "{e.head}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sumnet", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("family", help="emit a built-in network")
    p.add_argument("--name", required=True, choices=families.FAMILIES)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("-o", "--out")

    p = sub.add_parser("known-code", help="emit a family's closed-form code, or null")
    p.add_argument("--family", required=True, choices=families.FAMILIES)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--field", type=int, required=True)
    p.add_argument("-o", "--out")

    p = sub.add_parser("transform", help="apply a construction to a network")
    p.add_argument("--op", required=True, choices=["c1", "c2", "c3", "reverse", "to-type-ia"])
    p.add_argument("--net", required=True)
    p.add_argument("-o", "--out")
    p.add_argument("--trace-out", help="write construction roles as a JSON sidecar")

    p = sub.add_parser("search", help="decide (k,n) linear solvability")
    p.add_argument("--net", required=True)
    p.add_argument("--field", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--budget", type=int, default=50_000_000)
    p.add_argument("--normalize-sources", action="store_true")
    p.add_argument("--no-collapse", action="store_true")
    p.add_argument("--parallel", action="store_true")
    p.add_argument("-o", "--out")

    p = sub.add_parser("search-nonlinear", help="decide Z_q table-code solvability")
    p.add_argument("--net", required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--budget", type=int, default=50_000_000)
    p.add_argument("-o", "--out")

    p = sub.add_parser("classify", help="solvability pattern of a family per prime")
    p.add_argument("--family", required=True, choices=["s_m", "s_m_star"])
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--primes", default="2,3,5")
    p.add_argument("--budget", type=int, default=50_000_000)
    p.add_argument("-o", "--out")

    p = sub.add_parser("verify", help="check a linear code against a network")
    p.add_argument("--net", required=True)
    p.add_argument("--code", required=True)

    p = sub.add_parser("verify-nonlinear", help="check a table code exhaustively")
    p.add_argument("--net", required=True)
    p.add_argument("--code", required=True)
    p.add_argument("--budget", type=int, default=1_000_000)

    p = sub.add_parser("reverse-code", help="canonical code for the reversed network")
    p.add_argument("--net", required=True)
    p.add_argument("--code", required=True)
    p.add_argument("-o", "--out")

    p = sub.add_parser("transfer", help="emit the transfer matrix of a code")
    p.add_argument("--net", required=True)
    p.add_argument("--code", required=True)
    p.add_argument("-o", "--out")

    p = sub.add_parser("scale-sources", help="compose source coefficients with scales")
    p.add_argument("--code", required=True)
    p.add_argument("--scales", required=True, help="JSON file mapping message -> k x k matrix or scalar")
    p.add_argument("-o", "--out")

    p = sub.add_parser("mincut", help="unit-capacity max-flow between two nodes")
    p.add_argument("--net", required=True)
    p.add_argument("--s", required=True)
    p.add_argument("--t", required=True)

    p = sub.add_parser("connectivity", help="source x terminal reachability matrix")
    p.add_argument("--net", required=True)

    p = sub.add_parser("export-dot", help="emit Graphviz text")
    p.add_argument("--net", required=True)
    p.add_argument("--trace", help="role sidecar JSON to label nodes and edges")
    p.add_argument("-o", "--out")

    return ap


def _cmd_family(args) -> int:
    spec = families.FamilySpec(args.name, args.m)
    _write(args.out, network_to_json(families.generate(spec)))
    return 0


def _cmd_known_code(args) -> int:
    code = families.known_code(families.FamilySpec(args.family, args.m), FieldSpec(args.field))
    _write(args.out, "null\n" if code is None else code_to_json(code))
    return 0


def _cmd_transform(args) -> int:
    net = _load_net(args.net)
    trace = None
    if args.op == "reverse":
        out = transforms.reverse(net)
    else:
        fn = {"c1": transforms.c1, "c2": transforms.c2, "c3": transforms.c3,
              "to-type-ia": transforms.to_type_ia}[args.op]
        out, trace = fn(net)
    _write(args.out, network_to_json(out))
    if args.trace_out and trace is not None:
        _write(args.trace_out, _dump_json(trace.roles))
    return 0


def _cmd_search(args) -> int:
    net = _load_net(args.net)
    opts = SearchOptions(
        budget=args.budget,
        normalize_sources=args.normalize_sources,
        collapse_chains=not args.no_collapse,
        parallel=args.parallel,
    )
    report = solver.search_linear(net, FieldSpec(args.field), args.k, args.n, opts)
    _write(args.out, _dump_json(report.to_dict()))
    return 0


def _cmd_search_nonlinear(args) -> int:
    net = _load_net(args.net)
    report = solver.search_nonlinear(net, args.q, SearchOptions(budget=args.budget))
    _write(args.out, _dump_json(report.to_dict()))
    return 0


def _cmd_classify(args) -> int:
    primes = [int(x) for x in args.primes.split(",") if x]
    verdicts = solver.classify_characteristics(
        families.FamilySpec(args.family, args.m),
        args.k,
        primes,
        SearchOptions(budget=args.budget),
    )
    out = {
        "family": args.family,
        "m": args.m,
        "k": args.k,
        "verdicts": {str(p): v for p, v in verdicts.items()},
    }
    _write(args.out, _dump_json(out))
    return 0


def _format_transfer(net: Network, code: LinearCode) -> dict:
    t = transfer_matrix(net, code)
    return {
        "k": t.k,
        "rows": [[term, label] for term, label in t.row_labels],
        "cols": list(t.col_labels),
        "matrix": t.matrix.tolists(),
    }


def _cmd_verify(args) -> int:
    net = _load_net(args.net)
    code = code_from_json(_read(args.code))
    validate_code(net, code)
    ok = is_solution(net, code)
    print("SOLUTION" if ok else "NOT A SOLUTION")
    print(_dump_json(_format_transfer(net, code)), end="")
    return 0


def _cmd_verify_nonlinear(args) -> int:
    net = _load_net(args.net)
    code = nonlinear_from_json(_read(args.code))
    ok = verify_nonlinear(net, code, budget=args.budget)
    print("SOLUTION" if ok else "NOT A SOLUTION")
    return 0


def _cmd_reverse_code(args) -> int:
    net = _load_net(args.net)
    code = code_from_json(_read(args.code))
    validate_code(net, code)
    _write(args.out, code_to_json(canonical_reverse_code(net, code)))
    return 0


def _cmd_transfer(args) -> int:
    net = _load_net(args.net)
    code = code_from_json(_read(args.code))
    validate_code(net, code)
    _write(args.out, _dump_json(_format_transfer(net, code)))
    return 0


def _cmd_scale_sources(args) -> int:
    code = code_from_json(_read(args.code))
    raw = json.loads(_read(args.scales))
    scales = {}
    for msg, val in raw.items():
        if isinstance(val, int):
            eye = MatrixGF.identity(code.field, code.k)
            scales[msg] = MatrixGF(code.field, [[val * x for x in row] for row in eye.tolists()])
        else:
            scales[msg] = MatrixGF(code.field, val)
    _write(args.out, code_to_json(transforms.scale_sources(code, scales)))
    return 0


def _cmd_mincut(args) -> int:
    net = _load_net(args.net)
    value = min_cut(net, args.s, args.t)
    print(_dump_json({"s": args.s, "t": args.t, "min_cut": value}), end="")
    return 0


def _cmd_connectivity(args) -> int:
    net = _load_net(args.net)
    srcs, terms, matrix = connectivity(net)
    print(_dump_json({"sources": list(srcs), "terminals": list(terms), "matrix": matrix}), end="")
    return 0


def _cmd_export_dot(args) -> int:
    net = _load_net(args.net)
    trace = None
    if args.trace:
        trace = transforms.TransformTrace(json.loads(_read(args.trace)))
    _write(args.out, export_dot(net, trace))
    return 0


_HANDLERS = {
    "family": _cmd_family,
    "known-code": _cmd_known_code,
    "transform": _cmd_transform,
    "search": _cmd_search,
    "search-nonlinear": _cmd_search_nonlinear,
    "classify": _cmd_classify,
    "verify": _cmd_verify,
    "verify-nonlinear": _cmd_verify_nonlinear,
    "reverse-code": _cmd_reverse_code,
    "transfer": _cmd_transfer,
    "scale-sources": _cmd_scale_sources,
    "mincut": _cmd_mincut,
    "connectivity": _cmd_connectivity,
    "export-dot": _cmd_export_dot,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.cmd](args)
    except (NetworkError, CodeError, ValueError, RuntimeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
