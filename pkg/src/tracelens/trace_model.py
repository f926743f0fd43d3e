"""Proof-trace input format: parsing, validation, serialization.

A trace document records the statements a reasoner worked with, the rule
applications connecting them, and the conclusion that was established.
Statements are entities, rule applications are activities, premise edges
are usage links and conclusion edges are generation links, so existing
provenance tooling maps onto the same structure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, NamedTuple

KNOWLEDGE_KINDS = ("told", "background", "inferred")
DOMAINS = ("maritime", "weather", "other")

RESTATEMENT_RULE = "restatement"


class TraceError(Exception):
    """Base class for trace document errors."""


class TraceSyntaxError(TraceError):
    """Document is not valid JSON or does not match the trace schema."""


class DanglingReference(TraceError):
    """A rule references a statement id that was never declared."""

    def __init__(self, statement_id: str, rule_id: str | None = None):
        self.statement_id = statement_id
        self.rule_id = rule_id
        where = f" (referenced by rule {rule_id!r})" if rule_id else ""
        super().__init__(f"undeclared statement id {statement_id!r}{where}")


class CycleError(TraceError):
    """The derivation relation premise -> rule -> conclusion contains a cycle."""


class MissingConclusion(TraceError):
    """No usable conclusion: absent, undeclared, or not an inferred statement."""


class Predicate(NamedTuple):
    name: str
    args: tuple[str, ...]


class CanonicalForm(NamedTuple):
    name: str
    args: tuple[str, ...]


def canonicalize(predicate: Predicate) -> CanonicalForm:
    """Normal form for predicate comparison: case-folded name, case-folded
    and whitespace-trimmed argument tokens. Two predicates are considered
    the same assertion exactly when their canonical forms are equal."""
    return CanonicalForm(
        predicate.name.strip().casefold(),
        tuple(a.strip().casefold() for a in predicate.args),
    )


@dataclass(frozen=True)
class Statement:
    id: str
    text: str
    predicate: Predicate
    kind: str  # told | background | inferred


@dataclass(frozen=True)
class RuleApplication:
    id: str
    rule_name: str
    rule_text: str
    premise_ids: tuple[str, ...]
    conclusion_id: str


@dataclass(frozen=True)
class ProofTrace:
    statements: dict[str, Statement]
    rules: dict[str, RuleApplication]
    conclusion_id: str
    scenario: str = ""
    domain: str = "other"

    def statement(self, statement_id: str) -> Statement:
        return self.statements[statement_id]

    def with_scenario(self, scenario: str) -> "ProofTrace":
        return replace(self, scenario=scenario)


@dataclass(frozen=True)
class Violation:
    invariant: str
    offender: str
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, invariant: str, offender: str, message: str) -> None:
        self.violations.append(Violation(invariant, offender, message))


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise TraceSyntaxError(msg)


def _string(obj: dict, key: str, where: str) -> str:
    value = obj.get(key)
    _require(isinstance(value, str), f"{where}: {key!r} must be a string")
    return value


def parse_trace(document_bytes: bytes | str) -> ProofTrace:
    """Parse a UTF-8 trace document into a fully resolved ProofTrace.

    Raises TraceSyntaxError for malformed documents, DanglingReference for
    undeclared ids, CycleError for cyclic derivations, and MissingConclusion
    when the conclusion is absent or not inferred.
    """
    if isinstance(document_bytes, bytes):
        try:
            text = document_bytes.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TraceSyntaxError(f"not UTF-8: {exc}") from exc
    else:
        text = document_bytes
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TraceSyntaxError(f"invalid JSON: {exc}") from exc
    _require(isinstance(doc, dict), "top level must be an object")

    scenario = _string(doc, "scenario", "top level")
    domain = _string(doc, "domain", "top level")
    _require(domain in DOMAINS, f"domain must be one of {DOMAINS}, got {domain!r}")
    _require(isinstance(doc.get("statements"), list), "statements must be a list")
    _require(isinstance(doc.get("rules"), list), "rules must be a list")

    statements: dict[str, Statement] = {}
    for raw in doc["statements"]:
        _require(isinstance(raw, dict), "each statement must be an object")
        sid = _string(raw, "id", "statement")
        _require(sid not in statements, f"duplicate statement id {sid!r}")
        kind = _string(raw, "kind", f"statement {sid!r}")
        _require(
            kind in KNOWLEDGE_KINDS,
            f"statement {sid!r}: kind must be one of {KNOWLEDGE_KINDS}, got {kind!r}",
        )
        pred_raw = raw.get("predicate")
        _require(isinstance(pred_raw, dict), f"statement {sid!r}: predicate must be an object")
        name = _string(pred_raw, "name", f"statement {sid!r} predicate")
        _require(name.strip() != "", f"statement {sid!r}: predicate name is empty")
        args_raw = pred_raw.get("args")
        _require(isinstance(args_raw, list), f"statement {sid!r}: predicate args must be a list")
        _require(
            all(isinstance(a, str) for a in args_raw),
            f"statement {sid!r}: predicate args must be strings",
        )
        statements[sid] = Statement(
            id=sid,
            text=_string(raw, "text", f"statement {sid!r}"),
            predicate=Predicate(name, tuple(args_raw)),
            kind=kind,
        )

    rules: dict[str, RuleApplication] = {}
    for raw in doc["rules"]:
        _require(isinstance(raw, dict), "each rule must be an object")
        rid = _string(raw, "id", "rule")
        _require(rid not in rules, f"duplicate rule id {rid!r}")
        premises_raw = raw.get("premises")
        _require(
            isinstance(premises_raw, list) and premises_raw,
            f"rule {rid!r}: premises must be a nonempty list",
        )
        for pid in premises_raw:
            _require(isinstance(pid, str), f"rule {rid!r}: premise ids must be strings")
            if pid not in statements:
                raise DanglingReference(pid, rid)
        cid = _string(raw, "conclusion", f"rule {rid!r}")
        if cid not in statements:
            raise DanglingReference(cid, rid)
        _require(
            statements[cid].kind == "inferred",
            f"rule {rid!r}: concludes {cid!r} which is not inferred",
        )
        rules[rid] = RuleApplication(
            id=rid,
            rule_name=_string(raw, "name", f"rule {rid!r}"),
            rule_text=_string(raw, "definition", f"rule {rid!r}"),
            premise_ids=tuple(premises_raw),
            conclusion_id=cid,
        )

    conclusion_id = doc.get("conclusion")
    if not isinstance(conclusion_id, str) or conclusion_id not in statements:
        raise MissingConclusion(f"conclusion {conclusion_id!r} is not a declared statement")
    if statements[conclusion_id].kind != "inferred":
        raise MissingConclusion(f"conclusion {conclusion_id!r} is not inferred")

    cycle = _find_derivation_cycle(statements, rules.values())
    if cycle:
        raise CycleError(f"derivation cycle through {' -> '.join(cycle)}")

    return ProofTrace(
        statements=statements,
        rules=rules,
        conclusion_id=conclusion_id,
        scenario=scenario,
        domain=domain,
    )


def serialize_trace(trace: ProofTrace) -> bytes:
    """Inverse of parse_trace, stable byte output for identical traces."""
    doc = {
        "scenario": trace.scenario,
        "domain": trace.domain,
        "conclusion": trace.conclusion_id,
        "statements": [
            {
                "id": s.id,
                "text": s.text,
                "predicate": {"name": s.predicate.name, "args": list(s.predicate.args)},
                "kind": s.kind,
            }
            for s in sorted(trace.statements.values(), key=lambda s: s.id)
        ],
        "rules": [
            {
                "id": r.id,
                "name": r.rule_name,
                "definition": r.rule_text,
                "premises": list(r.premise_ids),
                "conclusion": r.conclusion_id,
            }
            for r in sorted(trace.rules.values(), key=lambda r: r.id)
        ],
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _find_derivation_cycle(
    statements: dict[str, Statement], rules: Iterable[RuleApplication]
) -> list[str] | None:
    # Statement-level derivation edges: premise -> conclusion for each rule.
    succ: dict[str, list[str]] = {sid: [] for sid in statements}
    for rule in rules:
        for pid in rule.premise_ids:
            succ[pid].append(rule.conclusion_id)

    WHITE, GREY, BLACK = 0, 1, 2
    color = {sid: WHITE for sid in statements}
    stack_path: list[str] = []

    def visit(node: str) -> list[str] | None:
        color[node] = GREY
        stack_path.append(node)
        for nxt in succ[node]:
            if color[nxt] == GREY:
                return stack_path[stack_path.index(nxt):] + [nxt]
            if color[nxt] == WHITE:
                found = visit(nxt)
                if found:
                    return found
        color[node] = BLACK
        stack_path.pop()
        return None

    for sid in sorted(statements):
        if color[sid] == WHITE:
            found = visit(sid)
            if found:
                return found
    return None


def validate_trace(trace: ProofTrace) -> ValidationReport:
    """Check every trace invariant; violations are data, not exceptions."""
    report = ValidationReport()

    for sid, stmt in trace.statements.items():
        if stmt.kind not in KNOWLEDGE_KINDS:
            report.add("knowledge-kind", sid, f"unknown kind {stmt.kind!r}")
        if not stmt.predicate.name.strip():
            report.add("predicate-name", sid, "predicate name is empty")

    for rid, rule in trace.rules.items():
        if not rule.premise_ids:
            report.add("rule-premises", rid, "rule has no premises")
        for pid in rule.premise_ids:
            if pid not in trace.statements:
                report.add("dangling-reference", rid, f"premise {pid!r} undeclared")
        if rule.conclusion_id not in trace.statements:
            report.add("dangling-reference", rid, f"conclusion {rule.conclusion_id!r} undeclared")
        elif trace.statements[rule.conclusion_id].kind != "inferred":
            report.add(
                "rule-concludes-inferred",
                rid,
                f"rule concludes non-inferred statement {rule.conclusion_id!r}",
            )

    if trace.conclusion_id not in trace.statements:
        report.add("conclusion-declared", trace.conclusion_id, "conclusion undeclared")
    elif trace.statements[trace.conclusion_id].kind != "inferred":
        report.add("conclusion-inferred", trace.conclusion_id, "conclusion is not inferred")

    resolvable = {
        rid: rule
        for rid, rule in trace.rules.items()
        if rule.conclusion_id in trace.statements
        and all(p in trace.statements for p in rule.premise_ids)
    }
    cycle = _find_derivation_cycle(trace.statements, resolvable.values())
    if cycle:
        report.add("acyclic", cycle[0], f"cycle: {' -> '.join(cycle)}")

    return report
