"""Explanation graphs: typed DAGs built from proof traces.

Statement nodes carry the knowledge kind they were declared with; every
rule application becomes its own node sitting between its premises and its
conclusion. Parentless nodes are the root causes of the explanation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .trace_model import (
    Predicate,
    ProofTrace,
    RESTATEMENT_RULE,
    validate_trace,
)


class GraphError(Exception):
    pass


class InvalidTrace(GraphError):
    """Trace failed validation and cannot be turned into a graph."""


class UnknownNode(GraphError, KeyError):
    pass


class NodeKind(enum.Enum):
    TOLD = "told"
    BACKGROUND = "background"
    INFERRED = "inferred"
    RULE = "rule"

    @property
    def is_rule(self) -> bool:
        return self is NodeKind.RULE


_STATEMENT_KINDS = {
    "told": NodeKind.TOLD,
    "background": NodeKind.BACKGROUND,
    "inferred": NodeKind.INFERRED,
}


@dataclass(frozen=True)
class Node:
    kind: NodeKind
    text: str
    predicate: Predicate | None = None
    rule_name: str | None = None
    rule_text: str | None = None


@dataclass(frozen=True)
class ExplanationGraph:
    """Immutable DAG of knowledge and rule nodes with a distinguished conclusion."""

    nodes: dict[str, Node]
    edges: frozenset[tuple[str, str]]
    conclusion: str

    def parents(self, node_id: str) -> list[str]:
        self._check(node_id)
        return sorted(src for src, dst in self.edges if dst == node_id)

    def children(self, node_id: str) -> list[str]:
        self._check(node_id)
        return sorted(dst for src, dst in self.edges if src == node_id)

    def node_ids(self, kind: NodeKind | None = None) -> list[str]:
        if kind is None:
            return sorted(self.nodes)
        return sorted(nid for nid, n in self.nodes.items() if n.kind is kind)

    def _check(self, node_id: str) -> None:
        if node_id not in self.nodes:
            raise UnknownNode(node_id)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExplanationGraph):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self.edges == other.edges
            and self.conclusion == other.conclusion
        )

    def __hash__(self) -> int:
        return hash((frozenset(self.nodes), self.edges, self.conclusion))


def build_graph(trace: ProofTrace) -> ExplanationGraph:
    """One node per statement, one per rule application; premise edges run
    into the rule node and one edge runs from the rule to its conclusion."""
    report = validate_trace(trace)
    if not report.ok:
        raise InvalidTrace("; ".join(v.message for v in report.violations))

    nodes: dict[str, Node] = {}
    for sid, stmt in trace.statements.items():
        nodes[sid] = Node(
            kind=_STATEMENT_KINDS[stmt.kind],
            text=stmt.text,
            predicate=stmt.predicate,
        )
    edges: set[tuple[str, str]] = set()
    for rid, rule in trace.rules.items():
        if rid in nodes:
            raise InvalidTrace(f"rule id {rid!r} collides with a statement id")
        nodes[rid] = Node(
            kind=NodeKind.RULE,
            text=rule.rule_text,
            rule_name=rule.rule_name,
            rule_text=rule.rule_text,
        )
        for pid in rule.premise_ids:
            edges.add((pid, rid))
        edges.add((rid, rule.conclusion_id))

    return ExplanationGraph(nodes=nodes, edges=frozenset(edges), conclusion=trace.conclusion_id)


def root_causes(g: ExplanationGraph) -> set[str]:
    """Node ids with no incoming edge."""
    targets = {dst for _, dst in g.edges}
    return {nid for nid in g.nodes if nid not in targets}


def reaches(g: ExplanationGraph, from_id: str, to_id: str) -> bool:
    """True when a directed path (possibly empty) runs from_id -> to_id."""
    g._check(from_id)
    g._check(to_id)
    if from_id == to_id:
        return True
    succ: dict[str, list[str]] = {}
    for src, dst in g.edges:
        succ.setdefault(src, []).append(dst)
    seen = {from_id}
    frontier = [from_id]
    while frontier:
        nid = frontier.pop()
        for nxt in succ.get(nid, ()):
            if nxt == to_id:
                return True
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return False


def topological_order(g: ExplanationGraph, *, conclusion_last: bool = True) -> list[str]:
    """Kahn's algorithm with node-id tie-breaking. With conclusion_last the
    conclusion is deferred while any other node is ready, so it closes the
    order whenever nothing descends from it."""
    indeg = {nid: 0 for nid in g.nodes}
    succ: dict[str, list[str]] = {nid: [] for nid in g.nodes}
    for src, dst in g.edges:
        indeg[dst] += 1
        succ[src].append(dst)
    ready = sorted(nid for nid, d in indeg.items() if d == 0)
    order: list[str] = []
    while ready:
        pick = None
        if conclusion_last and len(ready) > 1:
            for nid in ready:
                if nid != g.conclusion:
                    pick = nid
                    break
        if pick is None:
            pick = ready[0]
        ready.remove(pick)
        order.append(pick)
        for nxt in sorted(succ[pick]):
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                ready.append(nxt)
        ready.sort()
    if len(order) != len(g.nodes):
        raise GraphError("graph contains a cycle")
    return order


def is_acyclic(g: ExplanationGraph) -> bool:
    try:
        topological_order(g)
    except GraphError:
        return False
    return True


def check_graph(g: ExplanationGraph, *, strict: bool = False) -> list[str]:
    """Structural problems as human-readable strings, empty when sound.

    The base checks hold for any explanation graph, abstracted or not.
    Strict mode adds the constraints a freshly built graph must satisfy
    (rule degree, inferred nodes backed by a rule).
    """
    problems: list[str] = []
    if g.conclusion not in g.nodes:
        problems.append(f"conclusion {g.conclusion!r} missing")
    elif g.nodes[g.conclusion].kind is not NodeKind.INFERRED:
        problems.append("conclusion is not an inferred node")
    for src, dst in g.edges:
        if src not in g.nodes or dst not in g.nodes:
            problems.append(f"edge ({src!r}, {dst!r}) references a missing node")
    if problems:
        return problems
    if not is_acyclic(g):
        problems.append("graph is cyclic")
    targets = {dst for _, dst in g.edges}
    for nid in g.node_ids(NodeKind.TOLD) + g.node_ids(NodeKind.BACKGROUND):
        if nid in targets:
            problems.append(f"{nid!r}: told/background node has a parent")
    if strict:
        for nid in g.node_ids(NodeKind.RULE):
            n_in = sum(1 for _, dst in g.edges if dst == nid)
            n_out = sum(1 for src, _ in g.edges if src == nid)
            if n_in < 1:
                problems.append(f"rule {nid!r} has no premises")
            if n_out != 1:
                problems.append(f"rule {nid!r} has {n_out} conclusions, expected 1")
        restatement_targets = {
            g.children(nid)[0]
            for nid in g.node_ids(NodeKind.RULE)
            if g.nodes[nid].rule_name == RESTATEMENT_RULE and g.children(nid)
        }
        for nid in g.node_ids(NodeKind.INFERRED):
            if nid in restatement_targets:
                continue
            rule_parents = [p for p in g.parents(nid) if g.nodes[p].kind is NodeKind.RULE]
            if not rule_parents:
                problems.append(f"inferred node {nid!r} has no rule parent")
        if g.conclusion in g.nodes:
            roots = root_causes(g)
            evidence = {
                r for r in roots if g.nodes[r].kind in (NodeKind.TOLD, NodeKind.BACKGROUND)
            }
            if not any(reaches(g, r, g.conclusion) for r in evidence):
                problems.append("conclusion unreachable from any told/background root")
    return problems
