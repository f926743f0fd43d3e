"""Deterministic text rendering of explanation layers, plus JSON export.

Each knowledge node becomes one sentence, emitted in topological order so
premises always precede what they support and the conclusion closes the
narrative. Rule nodes still present in a layer are not sentences; they are
attached as numbered footnotes to the sentence they conclude, carrying the
rule definition verbatim from the trace.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass, field

from .abstraction import LayeredExplanation, RuleCombo
from .complexity import ComplexityScore, node_simplicity
from .graph import ExplanationGraph, NodeKind, topological_order


class TemplateArity(Exception):
    """A sentence template's slots do not cover its predicate's arguments."""


_FORMATTER = string.Formatter()


@dataclass(frozen=True)
class TemplateSet:
    """Sentence templates keyed by predicate name.

    Templates use positional slots ({0}, {1}, ...) for predicate arguments
    and may use {args} for all arguments joined by the premise joiner. The
    fallback template applies to predicates without an entry and may use
    {text} for the node's stored sentence.
    """

    templates: dict[str, str] = field(default_factory=dict)
    fallback: str = "{text}"
    premise_joiner: str = "and"
    therefore_phrase: str = "Therefore"

    @classmethod
    def from_json(cls, document: bytes | str) -> "TemplateSet":
        doc = json.loads(document)
        return cls(
            templates=dict(doc.get("templates", {})),
            fallback=doc.get("fallback", "{text}"),
            premise_joiner=doc.get("premise_joiner", "and"),
            therefore_phrase=doc.get("therefore_phrase", "Therefore"),
        )


DEFAULT_TEMPLATES = TemplateSet()


@dataclass(frozen=True)
class Sentence:
    node: str
    kind: NodeKind
    text: str
    markers: tuple[int, ...] = ()


@dataclass(frozen=True)
class Footnote:
    marker: int
    rule_name: str
    rule_text: str


@dataclass(frozen=True)
class RenderedExplanation:
    combo: RuleCombo
    body: tuple[Sentence, ...]
    footnotes: tuple[Footnote, ...]
    complexity: ComplexityScore


def _template_fields(template: str) -> tuple[set[int], set[str]]:
    numeric: set[int] = set()
    named: set[str] = set()
    for _, name, _, _ in _FORMATTER.parse(template):
        if name is None:
            continue
        head = name.split(".")[0].split("[")[0]
        if head.isdigit():
            numeric.add(int(head))
        else:
            named.add(head)
    return numeric, named


def _sentence_for(node_id: str, g: ExplanationGraph, templates: TemplateSet) -> str:
    node = g.nodes[node_id]
    predicate = node.predicate
    template = None
    if predicate is not None:
        template = templates.templates.get(predicate.name)
    if template is None:
        template = templates.fallback
        args: tuple[str, ...] = predicate.args if predicate else ()
    else:
        args = predicate.args
        numeric, named = _template_fields(template)
        arity = len(args)
        if any(i >= arity for i in numeric):
            raise TemplateArity(
                f"template for {predicate.name!r} references slot "
                f"{max(numeric)} but arity is {arity}"
            )
        if "args" not in named and numeric != set(range(arity)):
            raise TemplateArity(
                f"template for {predicate.name!r} covers {len(numeric)} slots "
                f"but arity is {arity}"
            )
    joined = f" {templates.premise_joiner} ".join(args)
    try:
        return template.format(*args, args=joined, text=node.text)
    except (KeyError, IndexError) as exc:
        raise TemplateArity(f"template {template!r} has unresolved slot {exc}") from exc


def render_layer(
    g: ExplanationGraph,
    templates: TemplateSet = DEFAULT_TEMPLATES,
    combo: RuleCombo = (),
) -> RenderedExplanation:
    """Render one layer graph: a sentence per knowledge node plus footnotes
    for every rule node still present. Footnote markers count up from 1 in
    order of first reference; identical rule definitions share a marker."""
    order = topological_order(g, conclusion_last=True)
    markers: dict[tuple[str, str], int] = {}
    footnotes: list[Footnote] = []
    body: list[Sentence] = []
    for nid in order:
        node = g.nodes[nid]
        if node.kind is NodeKind.RULE:
            continue
        sentence_markers: list[int] = []
        for parent in g.parents(nid):
            pnode = g.nodes[parent]
            if pnode.kind is not NodeKind.RULE:
                continue
            key = (pnode.rule_name or "", pnode.rule_text or "")
            if key not in markers:
                markers[key] = len(markers) + 1
                footnotes.append(Footnote(markers[key], key[0], key[1]))
            sentence_markers.append(markers[key])
        body.append(
            Sentence(
                node=nid,
                kind=node.kind,
                text=_sentence_for(nid, g, templates),
                markers=tuple(sorted(set(sentence_markers))),
            )
        )
    return RenderedExplanation(
        combo=tuple(combo),
        body=tuple(body),
        footnotes=tuple(footnotes),
        complexity=node_simplicity(g),
    )


def layer_text(rendered: RenderedExplanation, templates: TemplateSet = DEFAULT_TEMPLATES) -> str:
    """Markdown-flavoured plain text for one rendered layer."""
    lines: list[str] = []
    for i, sentence in enumerate(rendered.body):
        marks = "".join(f" [{m}]" for m in sentence.markers)
        text = sentence.text
        if i == len(rendered.body) - 1 and len(rendered.body) > 1:
            text = f"{templates.therefore_phrase}: {text}"
        lines.append(f"{text}{marks}")
    if rendered.footnotes:
        lines.append("")
        for fn in rendered.footnotes:
            lines.append(f"[{fn.marker}] {fn.rule_name}: {fn.rule_text}")
    return "\n".join(lines)


def _combo_json(combo: RuleCombo) -> list[str]:
    return [rule.value for rule in combo]


def layer_json(rendered: RenderedExplanation) -> dict:
    return {
        "combo": _combo_json(rendered.combo),
        "cause_count": rendered.complexity.cause_count,
        "rule_count": rendered.complexity.rule_count,
        "sentences": [
            {"node": s.node, "kind": s.kind.value, "text": s.text} for s in rendered.body
        ],
        "footnotes": [
            {"marker": f.marker, "rule": f.rule_name, "definition": f.rule_text}
            for f in rendered.footnotes
        ],
    }


def render_explanation(
    le: LayeredExplanation, templates: TemplateSet = DEFAULT_TEMPLATES
) -> list[RenderedExplanation]:
    return [render_layer(layer.graph, templates, layer.combo) for layer in le.layers]


def export_layers(
    le: LayeredExplanation, templates: TemplateSet = DEFAULT_TEMPLATES
) -> bytes:
    """UTF-8 JSON document for a layered explanation; byte-stable for
    identical inputs."""
    base = le.layers[0].graph
    conclusion_text = base.nodes[le.conclusion].text
    doc = {
        "scenario": le.scenario,
        "domain": le.domain,
        "conclusion_text": conclusion_text,
        "layers": [layer_json(r) for r in render_explanation(le, templates)],
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def explanation_text(
    le: LayeredExplanation, templates: TemplateSet = DEFAULT_TEMPLATES
) -> str:
    """Full multi-layer markdown rendering used by the command line."""
    base = le.layers[0].graph
    lines = [f"# {le.scenario or 'explanation'} ({le.domain})"]
    lines.append(f"Prediction: {base.nodes[le.conclusion].text}")
    for rendered in render_explanation(le, templates):
        label = "-".join(r.value for r in rendered.combo) or "no abstraction"
        lines.append("")
        lines.append(
            f"## Layer {label} "
            f"({rendered.complexity.cause_count} causes, "
            f"{rendered.complexity.rule_count} rules)"
        )
        lines.append(layer_text(rendered, templates))
    return "\n".join(lines) + "\n"
