import pytest

from tracelens.graph import (
    InvalidTrace,
    NodeKind,
    UnknownNode,
    build_graph,
    check_graph,
    is_acyclic,
    reaches,
    root_causes,
    topological_order,
)
from tracelens.trace_model import ProofTrace, RuleApplication

from conftest import (
    FIXTURE_NAMES,
    fixture_graph,
    load_trace,
    make_statement,
    transitive_closure,
)


def restatement_trace() -> ProofTrace:
    statements = {
        "t1": make_statement("t1", "told", "rains"),
        "i1": make_statement("i1", "inferred", "rains"),
    }
    rules = {
        "r1": RuleApplication("r1", "restatement", "Told statements hold.", ("t1",), "i1")
    }
    return ProofTrace(statements, rules, "i1")


def conjunction_trace() -> ProofTrace:
    statements = {
        "i1": make_statement("i1", "inferred", "a"),
        "i2": make_statement("i2", "inferred", "b"),
        "i3": make_statement("i3", "inferred", "a-and-b"),
    }
    rules = {
        "r": RuleApplication(
            "r", "conjunction-introduction", "From A and B conclude A and B.", ("i1", "i2"), "i3"
        )
    }
    return ProofTrace(statements, rules, "i3")


def test_build_restatement_graph():
    g = build_graph(restatement_trace())
    assert set(g.nodes) == {"t1", "r1", "i1"}
    assert g.edges == frozenset({("t1", "r1"), ("r1", "i1")})
    assert g.nodes["r1"].kind is NodeKind.RULE
    assert g.conclusion == "i1"


def test_build_conjunction_pattern():
    g = build_graph(conjunction_trace())
    assert set(g.nodes) == {"i1", "i2", "r", "i3"}
    assert g.edges == frozenset({("i1", "r"), ("i2", "r"), ("r", "i3")})


def test_build_rejects_invalid_trace():
    statements = {"i1": make_statement("i1", "inferred", "q")}
    rules = {"r1": RuleApplication("r1", "step", "d", ("ghost",), "i1")}
    with pytest.raises(InvalidTrace):
        build_graph(ProofTrace(statements, rules, "i1"))


def test_maritime_fixture_shape():
    trace = load_trace("illegal-fishing")
    g = build_graph(trace)
    assert len(trace.statements) == 6 and len(trace.rules) == 3
    assert len(g.nodes) == 9
    # independent scan oracle for parentless nodes
    targets = {dst for _, dst in g.edges}
    parentless = {nid for nid in g.nodes if nid not in targets}
    assert root_causes(g) == parentless
    expected = {
        sid for sid, s in trace.statements.items() if s.kind in ("told", "background")
    }
    assert parentless == expected


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_node_count_and_acyclicity(name):
    trace = load_trace(name)
    g = build_graph(trace)
    assert len(g.nodes) == len(trace.statements) + len(trace.rules)
    assert is_acyclic(g)
    assert check_graph(g, strict=True) == []


def test_root_causes_restatement_graph():
    g = build_graph(restatement_trace())
    assert root_causes(g) == {"t1"}


def test_root_causes_after_filtering_are_told_only():
    from tracelens.abstraction import FK, FL, apply_combo

    g = apply_combo(fixture_graph("heatwave"), (FL, FK))
    roots = root_causes(g)
    assert roots == {"t1"}
    assert all(g.nodes[r].kind is NodeKind.TOLD for r in roots)


def test_reaches_reflexive_and_directional():
    g = build_graph(restatement_trace())
    assert reaches(g, "t1", "t1")
    assert reaches(g, "t1", "i1")
    assert not reaches(g, "i1", "t1")


def test_reaches_unknown_node():
    g = build_graph(restatement_trace())
    with pytest.raises(UnknownNode):
        reaches(g, "t1", "ghost")


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_reaches_matches_closure_oracle(name):
    g = fixture_graph(name)
    closure = transitive_closure(g)
    for u in g.nodes:
        for v in g.nodes:
            assert reaches(g, u, v) == closure[(u, v)], (u, v)


def test_reaches_matches_closure_on_random_graphs():
    from conftest import random_trace

    for seed in range(40):
        g = build_graph(random_trace(seed))
        closure = transitive_closure(g)
        for u in g.nodes:
            for v in g.nodes:
                assert reaches(g, u, v) == closure[(u, v)]


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_topological_order_respects_edges(name):
    g = fixture_graph(name)
    order = topological_order(g)
    position = {nid: i for i, nid in enumerate(order)}
    for src, dst in g.edges:
        assert position[src] < position[dst]
    assert order[-1] == g.conclusion
