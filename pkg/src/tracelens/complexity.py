"""Node-simplicity scoring: an explanation with fewer causes is simpler."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .graph import ExplanationGraph, NodeKind


@dataclass(frozen=True)
class ComplexityScore:
    cause_count: int
    rule_count: int
    by_kind: dict[NodeKind, int]


class Ordering(enum.Enum):
    MORE_ABSTRACT = "more_abstract"
    EQUAL = "equal"
    LESS_ABSTRACT = "less_abstract"


def node_simplicity(g: ExplanationGraph) -> ComplexityScore:
    """Count nodes by kind. Causes are the knowledge nodes; rule nodes are
    inferential connectives and are tallied separately."""
    by_kind = {kind: 0 for kind in NodeKind}
    for node in g.nodes.values():
        by_kind[node.kind] += 1
    cause_count = (
        by_kind[NodeKind.TOLD] + by_kind[NodeKind.BACKGROUND] + by_kind[NodeKind.INFERRED]
    )
    return ComplexityScore(
        cause_count=cause_count, rule_count=by_kind[NodeKind.RULE], by_kind=by_kind
    )


def compare_layers(a: ExplanationGraph, b: ExplanationGraph) -> Ordering:
    """Order a against b by cause count, ties broken by rule count; a graph
    with fewer causes is the more abstract explanation."""
    sa, sb = node_simplicity(a), node_simplicity(b)
    if sa.cause_count != sb.cause_count:
        return (
            Ordering.MORE_ABSTRACT
            if sa.cause_count < sb.cause_count
            else Ordering.LESS_ABSTRACT
        )
    if sa.rule_count != sb.rule_count:
        return (
            Ordering.MORE_ABSTRACT
            if sa.rule_count < sb.rule_count
            else Ordering.LESS_ABSTRACT
        )
    return Ordering.EQUAL
