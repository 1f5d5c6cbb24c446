import pytest

from sumnet import FieldSpec, MatrixGF, eval_linear, identity_code, s_m
from sumnet.families import bottleneck_mun
from sumnet.netmodel import Demand, Edge, Network, NetworkError, recover
from sumnet.transforms import c1, c2, c3, reverse, scale_sources, to_type_ia

from helpers import (
    mun_crossed,
    mun_disjoint2,
    mun_path,
    sum_bipartite22,
    sum_disconnected22,
)

F2, F5 = FieldSpec(2), FieldSpec(5)


def added_counts(base, out):
    return len(out.nodes) - len(base.nodes), len(out.edges) - len(base.edges)


# -- c1 -------------------------------------------------------------------------


@pytest.mark.parametrize("m,net", [(1, mun_path()), (2, mun_disjoint2()), (2, mun_crossed())])
def test_c1_closed_form_counts(m, net):
    out, _ = c1(net)
    nodes_added, edges_added = added_counts(net, out)
    assert nodes_added == 5 * m + 1
    assert edges_added == 7 * m + m * (m - 1)


def test_c1_roles_and_demands():
    out, trace = c1(mun_path())
    assert set(out.source_nodes()) == {"s_1", "s_2"}
    assert set(out.terminal_nodes()) == {"t_L1", "t_R1"}
    assert all(d.kind == "sum" for d in out.terminals.values())
    # embedded nodes lose their roles but keep their edges
    assert "w_1" not in out.sources and "z_1" not in out.terminals
    assert out.has_edge("w_1>z_1")
    assert trace.role("u_1") == "mix relay i=1"
    assert trace.role("s_1>w_1") is not None


def test_c1_rejects_non_unicast():
    with pytest.raises(NetworkError):
        c1(sum_bipartite22())


def test_c1_id_collision_uniquified():
    clash = Network(
        "clash",
        ("w_1", "z_1", "s_1"),
        (Edge("w_1>z_1", "w_1", "z_1"), Edge("s_1>w_1", "s_1", "w_1")),
        {"s_1": ("a",)},
        {"z_1": recover("a")},
    )
    out, trace = c1(clash)
    assert "s_1#2" in out.source_nodes()
    assert trace.role("s_1#2") == "hub source i=1"


def test_reverse_of_c1_matches_swapped_structure():
    out, _ = c1(mun_disjoint2())
    rev = reverse(out)
    assert set(rev.source_nodes()) == {"t_L1", "t_L2", "t_R1", "t_R2"}
    assert set(rev.terminal_nodes()) == {"s_1", "s_2", "s_3"}
    assert all(d.kind == "sum" for d in rev.terminals.values())


def test_reverse_involution():
    net, _ = c1(mun_path())
    back = reverse(reverse(net))
    assert back.nodes == net.nodes and back.edges == net.edges
    assert back.sources == net.sources


# -- to_type_ia / c2 -------------------------------------------------------------


def test_to_type_ia_degenerate_adds_relay_layers():
    net = mun_disjoint2()
    out, _ = to_type_ia(net)
    assert set(out.source_nodes()) == {"S.a", "S.b"}
    assert set(out.terminal_nodes()) == {"T.z_1.a", "T.z_2.b"}
    assert out.terminals["T.z_1.a"] == recover("a")
    assert len(out.edges) == len(net.edges) + 4


def test_to_type_ia_multi_message_source_splits():
    net = Network(
        "multi",
        ("g", "t"),
        (Edge("g>t", "g", "t"),),
        {"g": ("a", "b")},
        {"t": recover("a", "b")},
    )
    out, _ = to_type_ia(net)
    assert set(out.source_nodes()) == {"S.a", "S.b"}
    assert out.has_edge("S.a>g") and out.has_edge("S.b>g")
    assert set(out.terminal_nodes()) == {"T.t.a", "T.t.b"}


def test_to_type_ia_terminal_demanding_three_messages():
    net = Network(
        "wide",
        ("g1", "g2", "g3", "t"),
        (Edge("g1>t", "g1", "t"), Edge("g2>t", "g2", "t"), Edge("g3>t", "g3", "t")),
        {"g1": ("a",), "g2": ("b",), "g3": ("c",)},
        {"t": recover("a", "b", "c")},
    )
    out, _ = to_type_ia(net)
    assert set(out.terminal_nodes()) == {"T.t.a", "T.t.b", "T.t.c"}


def test_c2_terminal_count_is_m_plus_sum_ni():
    net = mun_crossed()  # m = 2, n_1 = n_2 = 1
    out, _ = c2(net)
    assert len(out.terminals) == 2 + 2
    net3 = bottleneck_mun(3)
    out3, _ = c2(net3)
    assert len(out3.terminals) == 3 + 3
    assert all(d.kind == "sum" for d in out3.terminals.values())
    assert len(out3.source_nodes()) == 4


def test_c2_message_demanded_by_two_terminals():
    net = Network(
        "fan",
        ("g", "z_1", "z_2"),
        (Edge("g>z_1", "g", "z_1"), Edge("g>z_2", "g", "z_2")),
        {"g": ("a",)},
        {"z_1": recover("a"), "z_2": recover("a")},
    )
    out, _ = c2(net)  # m = 1, n_1 = 2
    assert len(out.terminals) == 1 + 2
    assert {t for t in out.terminal_nodes() if "." in t} == {"t_1.1", "t_1.2"}
    from sumnet.solver import search_linear

    assert search_linear(out, F2, 1, 1).verdict == "solvable"


def test_c2_differs_from_c1_by_relay_layer():
    net = mun_path()
    via_c1, _ = c1(net)
    via_c2, _ = c2(net)
    # same terminal count for a unicast input, but c2 inserts the split layers
    assert len(via_c2.terminals) == len(via_c1.terminals)
    assert len(via_c2.nodes) == len(via_c1.nodes) + 2


# -- c3 --------------------------------------------------------------------------


def test_c3_pair_count():
    out, _ = c3(sum_bipartite22())
    assert len(out.terminals) == 2 * 2
    assert len(out.source_nodes()) == 4
    for t, d in out.terminals.items():
        assert d.kind == "recover" and len(d.messages) == 1


def test_c3_requires_sum_demands():
    with pytest.raises(NetworkError):
        c3(mun_path())


def test_c3_three_by_three_pairs():
    net = s_m(3)  # 3 sources, 3 terminals
    out, trace = c3(net)
    assert len(out.terminals) == 9
    assert trace.role("r_2_1") == "recovery relay (terminal 2, source 1)"


@pytest.mark.parametrize("make,p", [
    (sum_bipartite22, 2),
    (sum_bipartite22, 3),
    (sum_disconnected22, 2),
    (sum_disconnected22, 3),
])
def test_c3_solvability_equivalence(make, p):
    from sumnet.solver import search_linear

    net = make()
    mun, _ = c3(net)
    f = FieldSpec(p)
    assert search_linear(net, f, 1, 1).verdict == search_linear(mun, f, 1, 1).verdict


def test_c3_trace_covers_every_added_id():
    base = sum_disconnected22()
    out, trace = c3(base)
    base_ids = set(base.nodes) | {e.id for e in base.edges}
    for ident in list(out.nodes) + [e.id for e in out.edges]:
        if ident not in base_ids:
            assert trace.role(ident), ident


# -- scale_sources ---------------------------------------------------------------


def two_source_relay():
    return Network(
        "pair",
        ("a", "b", "t"),
        (Edge("a>t", "a", "t"), Edge("b>t", "b", "t")),
        {"a": ("x1",), "b": ("x2",)},
        {"t": Demand("sum")},
    )


def test_scale_sources_identity_noop():
    net = two_source_relay()
    code = identity_code(net, F5)
    eye = MatrixGF.identity(F5, 1)
    assert scale_sources(code, {"x1": eye, "x2": eye}) == code


def test_scale_sources_delivers_weighted_sum_gf5():
    net = two_source_relay()
    code = identity_code(net, F5)
    scaled = scale_sources(code, {"x1": MatrixGF(F5, [[2]]), "x2": MatrixGF(F5, [[3]])})
    for x1 in range(5):
        for x2 in range(5):
            out = eval_linear(net, scaled, {"x1": [x1], "x2": [x2]})
            assert out["t"] == [((2 * x1 + 3 * x2) % 5,)]


def test_scale_then_inverse_restores():
    net = two_source_relay()
    code = identity_code(net, F5)
    a = {"x1": MatrixGF(F5, [[2]]), "x2": MatrixGF(F5, [[3]])}
    inv = {"x1": MatrixGF(F5, [[3]]), "x2": MatrixGF(F5, [[2]])}  # 2*3=6=1 mod 5
    assert scale_sources(scale_sources(code, a), inv) == code


def test_scale_sources_rejects_singular():
    net = two_source_relay()
    code = identity_code(net, F5)
    from sumnet.codes import CodeError

    with pytest.raises(CodeError):
        scale_sources(code, {"x1": MatrixGF(F5, [[0]])})
