"""The three graph-simplification rules and ordered chains of them.

Flatten Logic drops low-level logical bookkeeping (conjunction shuffling,
restating told knowledge). Flatten Rules drops every remaining rule node,
wiring premises straight to conclusions. Filter Knowledge drops nodes a
policy marks as less relevant, default background knowledge. Each rule
yields a new graph entailing the same conclusion; a chain of rule combos
applied to one source graph yields the layers of a layered explanation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .graph import ExplanationGraph, Node, NodeKind, reaches, root_causes
from .trace_model import RESTATEMENT_RULE, canonicalize

DEFAULT_LOGIC_RULES = frozenset({"conjunction-introduction", "conjunction-elimination"})


class AbstractionRule(enum.Enum):
    FL = "FL"
    FR = "FR"
    FK = "FK"


RuleCombo = tuple[AbstractionRule, ...]

FL, FR, FK = AbstractionRule.FL, AbstractionRule.FR, AbstractionRule.FK

#: The rule combinations that name explanation layers. The empty combo is
#: the unabstracted graph; every nonempty combo starts with FL.
VALID_COMBOS: tuple[RuleCombo, ...] = (
    (),
    (FL,),
    (FL, FR),
    (FL, FR, FK),
    (FL, FK),
)

DEFAULT_CHAIN: tuple[RuleCombo, ...] = ((), (FL,), (FL, FR), (FL, FR, FK))
NOFR_CHAIN: tuple[RuleCombo, ...] = ((), (FL,), (FL, FK))


class InvalidCombo(Exception):
    pass


def combo_label(combo: RuleCombo) -> str:
    """Human name of a combo: "FL-FR" or "no abstraction" for the empty one."""
    if not combo:
        return "no abstraction"
    return "-".join(rule.value for rule in combo)


def parse_combo(token: str) -> RuleCombo:
    """Parse "FL-FR" style names; "none", "" and "no abstraction" mean empty."""
    token = token.strip()
    if token.lower() in ("", "none", "no abstraction"):
        return ()
    try:
        combo = tuple(AbstractionRule[part.strip().upper()] for part in token.split("-"))
    except KeyError as exc:
        raise InvalidCombo(f"unknown abstraction rule in {token!r}") from exc
    require_valid_combo(combo)
    return combo


def require_valid_combo(combo: RuleCombo) -> None:
    if tuple(combo) not in VALID_COMBOS:
        valid = ", ".join(combo_label(c) for c in VALID_COMBOS)
        raise InvalidCombo(f"{combo_label(tuple(combo))!r} is not one of: {valid}")


@dataclass(frozen=True)
class RemovedRule:
    """A rule node taken out of the graph; feeds renderer footnotes."""

    rule_name: str
    rule_text: str
    conclusion: str


@dataclass(frozen=True)
class Layer:
    combo: RuleCombo
    graph: ExplanationGraph


@dataclass(frozen=True)
class LayeredExplanation:
    conclusion: str
    layers: tuple[Layer, ...]
    scenario: str = ""
    domain: str = "other"


@dataclass
class PreservationReport:
    """Outcome of checking that an abstraction kept the conclusion derivable
    and introduced or lost no connectivity among retained knowledge nodes."""

    conclusion_reachable: bool
    new_paths: list[tuple[str, str]] = field(default_factory=list)
    lost_paths: list[tuple[str, str]] = field(default_factory=list)
    orphaned_inferred: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        # Orphaned inferred nodes are reported but do not fail the check.
        return self.conclusion_reachable and not self.new_paths and not self.lost_paths


def _without_node(
    nodes: dict[str, Node], edges: set[tuple[str, str]], node_id: str
) -> None:
    del nodes[node_id]
    for edge in [e for e in edges if node_id in e]:
        edges.discard(edge)


def _splice_out_rule(
    nodes: dict[str, Node], edges: set[tuple[str, str]], rule_id: str
) -> None:
    """Remove a rule node, connecting each premise to its conclusion."""
    premises = [src for src, dst in edges if dst == rule_id]
    conclusions = [dst for src, dst in edges if src == rule_id]
    _without_node(nodes, edges, rule_id)
    for p in premises:
        for c in conclusions:
            edges.add((p, c))


def flatten_logic(
    g: ExplanationGraph, logic_rules: frozenset[str] = DEFAULT_LOGIC_RULES
) -> ExplanationGraph:
    """Remove conjunction-style logic rule nodes (premises connect straight
    to the conclusion) and collapse restatements of told or background
    knowledge, the source node absorbing the restated node's outgoing edges.

    A restatement collapses only when the canonical predicate forms match,
    the restated node's sole parent is the restatement rule, and the
    restated node is not the conclusion of the whole explanation.
    """
    nodes = dict(g.nodes)
    edges = set(g.edges)

    changed = True
    while changed:
        changed = False
        for rid in sorted(nodes):
            node = nodes[rid]
            if node.kind is not NodeKind.RULE or node.rule_name not in logic_rules:
                continue
            _splice_out_rule(nodes, edges, rid)
            changed = True
        # iterate a snapshot: collapsing one restatement removes two nodes
        for rid in sorted(nodes):
            node = nodes.get(rid)
            if node is None or node.kind is not NodeKind.RULE:
                continue
            if node.rule_name != RESTATEMENT_RULE:
                continue
            premises = [src for src, dst in edges if dst == rid]
            targets = [dst for src, dst in edges if src == rid]
            if len(premises) != 1 or len(targets) != 1:
                continue
            source, restated = premises[0], targets[0]
            if nodes[source].kind not in (NodeKind.TOLD, NodeKind.BACKGROUND):
                continue
            if restated == g.conclusion:
                continue
            if [p for p, q in edges if q == restated] != [rid]:
                continue
            src_pred = nodes[source].predicate
            dst_pred = nodes[restated].predicate
            if src_pred is None or dst_pred is None:
                continue
            if canonicalize(src_pred) != canonicalize(dst_pred):
                continue
            absorbed = [dst for src, dst in edges if src == restated]
            _without_node(nodes, edges, rid)
            _without_node(nodes, edges, restated)
            for child in absorbed:
                edges.add((source, child))
            changed = True

    return ExplanationGraph(nodes=nodes, edges=frozenset(edges), conclusion=g.conclusion)


def flatten_rules(g: ExplanationGraph) -> tuple[ExplanationGraph, list[RemovedRule]]:
    """Remove every rule node, wiring premises to conclusions directly.
    The removed rules come back as footnote candidates."""
    nodes = dict(g.nodes)
    edges = set(g.edges)
    removed: list[RemovedRule] = []
    for rid in sorted(nodes):
        node = nodes[rid]
        if node.kind is not NodeKind.RULE:
            continue
        conclusions = [dst for src, dst in edges if src == rid]
        removed.append(
            RemovedRule(
                rule_name=node.rule_name or "",
                rule_text=node.rule_text or "",
                conclusion=conclusions[0] if conclusions else "",
            )
        )
        _splice_out_rule(nodes, edges, rid)
    return (
        ExplanationGraph(nodes=nodes, edges=frozenset(edges), conclusion=g.conclusion),
        removed,
    )


@dataclass(frozen=True)
class FilterPolicy:
    """Which nodes Filter Knowledge may remove.

    Told knowledge is evidence the user supplied and is never removable;
    rule nodes belong to Flatten Rules. Beyond whole kinds, specific node
    ids can be marked for removal.
    """

    kinds: frozenset[NodeKind] = frozenset({NodeKind.BACKGROUND})
    node_ids: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if NodeKind.TOLD in self.kinds:
            raise ValueError("told knowledge is not removable")
        if NodeKind.RULE in self.kinds:
            raise ValueError("rule nodes are removed by flatten_rules, not filtering")

    def matches(self, node_id: str, node: Node) -> bool:
        return node.kind in self.kinds or node_id in self.node_ids


DEFAULT_FILTER_POLICY = FilterPolicy()


def filter_knowledge(
    g: ExplanationGraph, policy: FilterPolicy = DEFAULT_FILTER_POLICY
) -> tuple[ExplanationGraph, list[str]]:
    """Remove policy-matching nodes, connecting each removed node's parents
    to its children. The conclusion is kept even when the policy matches it;
    that override is recorded in the returned audit list."""
    nodes = dict(g.nodes)
    edges = set(g.edges)
    audit: list[str] = []
    for nid in sorted(g.nodes):
        if not policy.matches(nid, g.nodes[nid]):
            continue
        if nid == g.conclusion:
            audit.append(f"policy matched conclusion {nid!r}; kept")
            continue
        parents = [src for src, dst in edges if dst == nid]
        children = [dst for src, dst in edges if src == nid]
        _without_node(nodes, edges, nid)
        for p in parents:
            for c in children:
                edges.add((p, c))
    return (
        ExplanationGraph(nodes=nodes, edges=frozenset(edges), conclusion=g.conclusion),
        audit,
    )


def apply_combo(g: ExplanationGraph, combo: RuleCombo) -> ExplanationGraph:
    """Apply a valid combo left to right; the empty combo is the identity."""
    require_valid_combo(combo)
    result = g
    for rule in combo:
        if rule is AbstractionRule.FL:
            result = flatten_logic(result)
        elif rule is AbstractionRule.FR:
            result, _ = flatten_rules(result)
        else:
            result, _ = filter_knowledge(result)
    return result


def generate_layers(
    g: ExplanationGraph,
    chain: list[RuleCombo] | tuple[RuleCombo, ...] = DEFAULT_CHAIN,
    *,
    scenario: str = "",
    domain: str = "other",
) -> LayeredExplanation:
    """One layer per combo, each computed from the original graph so branch
    chains (FL then either FL-FR or FL-FK) stay well defined."""
    if not chain or tuple(chain[0]) != ():
        raise InvalidCombo("a layer chain must start with the empty combo")
    for combo in chain:
        require_valid_combo(tuple(combo))
    layers = tuple(Layer(combo=tuple(combo), graph=apply_combo(g, tuple(combo))) for combo in chain)
    return LayeredExplanation(
        conclusion=g.conclusion, layers=layers, scenario=scenario, domain=domain
    )


def preserves_conclusion(
    g: ExplanationGraph, g_prime: ExplanationGraph
) -> PreservationReport:
    """Check an abstraction g -> g_prime kept what matters:

    (a) the conclusion is still derivable, i.e. reachable from some told or
        background root cause;
    (b) between any two retained non-rule nodes, a path exists in g_prime
        exactly when one existed in g.

    Inferred nodes left parentless by the abstraction are reported for
    inspection without failing the check.
    """
    if g_prime.conclusion not in g_prime.nodes:
        return PreservationReport(conclusion_reachable=False)

    roots = root_causes(g_prime)
    evidence_roots = {
        r for r in roots if g_prime.nodes[r].kind in (NodeKind.TOLD, NodeKind.BACKGROUND)
    }
    conclusion_reachable = any(
        reaches(g_prime, r, g_prime.conclusion) for r in evidence_roots
    )

    retained = [
        nid
        for nid in sorted(g_prime.nodes)
        if nid in g.nodes and g_prime.nodes[nid].kind is not NodeKind.RULE
    ]
    report = PreservationReport(conclusion_reachable=conclusion_reachable)
    for u in retained:
        for v in retained:
            if u == v:
                continue
            before = reaches(g, u, v)
            after = reaches(g_prime, u, v)
            if after and not before:
                report.new_paths.append((u, v))
            elif before and not after:
                report.lost_paths.append((u, v))

    report.orphaned_inferred = [
        nid
        for nid in sorted(roots)
        if g_prime.nodes[nid].kind is NodeKind.INFERRED
    ]
    return report
