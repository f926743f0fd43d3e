import random
from pathlib import Path

import pytest

from tracelens.graph import ExplanationGraph, build_graph
from tracelens.render import TemplateSet
from tracelens.trace_model import (
    Predicate,
    ProofTrace,
    RuleApplication,
    Statement,
    parse_trace,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

FIXTURE_NAMES = sorted(p.stem for p in FIXTURES.glob("*.json"))

HEATWAVE_BACKGROUND = "35 degrees Celsius is greater than 24 and 25 degrees Celsius"


def load_trace(name: str) -> ProofTrace:
    return parse_trace((FIXTURES / f"{name}.json").read_bytes())


def fixture_graph(name: str) -> ExplanationGraph:
    return build_graph(load_trace(name))


@pytest.fixture(params=FIXTURE_NAMES)
def each_fixture_graph(request) -> ExplanationGraph:
    return fixture_graph(request.param)


def transitive_closure(g: ExplanationGraph) -> dict[tuple[str, str], bool]:
    """Floyd-Warshall closure, independent of the graph module's search."""
    ids = sorted(g.nodes)
    index = {nid: i for i, nid in enumerate(ids)}
    n = len(ids)
    m = [[False] * n for _ in range(n)]
    for i in range(n):
        m[i][i] = True
    for a, b in g.edges:
        m[index[a]][index[b]] = True
    for k in range(n):
        for i in range(n):
            if m[i][k]:
                row_k = m[k]
                row_i = m[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return {(u, v): m[index[u]][index[v]] for u in ids for v in ids}


def make_statement(sid: str, kind: str, name: str, *args: str, text: str = "") -> Statement:
    return Statement(
        id=sid,
        text=text or f"{name}({', '.join(args)})",
        predicate=Predicate(name, tuple(args)),
        kind=kind,
    )


_RULE_NAMES = (
    "modus-ponens",
    "conjunction-introduction",
    "evidence-combination",
    "conjunction-elimination",
)


def random_trace(seed: int, max_nodes: int = 15) -> ProofTrace:
    """A random but always valid trace whose conclusion has told ancestry.
    Total node count (statements + rules) stays within max_nodes."""
    rng = random.Random(seed)
    statements: dict[str, Statement] = {}
    rules: dict[str, RuleApplication] = {}

    def budget() -> int:
        return max_nodes - len(statements) - len(rules)

    told_ids = []
    for i in range(rng.randint(1, 3)):
        sid = f"t{i}"
        statements[sid] = make_statement(sid, "told", f"fact{i}", f"x{i}")
        told_ids.append(sid)

    pool = list(told_ids)
    # restate a subset of told statements (restatement rule + inferred copy)
    for i, tid in enumerate(told_ids):
        if budget() < 4 or rng.random() < 0.4:
            continue
        rid, iid = f"rr{i}", f"ri{i}"
        src = statements[tid]
        statements[iid] = Statement(
            id=iid, text=src.text, predicate=src.predicate, kind="inferred"
        )
        rules[rid] = RuleApplication(
            id=rid,
            rule_name="restatement",
            rule_text="A statement told to the system holds as stated.",
            premise_ids=(tid,),
            conclusion_id=iid,
        )
        pool.remove(tid)
        pool.append(iid)

    for i in range(rng.randint(0, 2)):
        if budget() < 3:
            break
        sid = f"b{i}"
        statements[sid] = make_statement(sid, "background", f"ctx{i}", f"z{i}")
        pool.append(sid)

    conclusion = None
    step = 0
    while budget() >= 2 and (conclusion is None or rng.random() < 0.6):
        premises = rng.sample(pool, k=min(len(pool), rng.randint(1, 3)))
        if conclusion is not None and conclusion not in premises:
            premises.append(conclusion)
        elif conclusion is None:
            # anchor the chain on told-derived evidence
            anchor = rng.choice([p for p in pool if not p.startswith("b")])
            if anchor not in premises:
                premises.append(anchor)
        iid, rid = f"i{step}", f"r{step}"
        statements[iid] = make_statement(iid, "inferred", f"derived{step}", f"y{step}")
        rules[rid] = RuleApplication(
            id=rid,
            rule_name=_RULE_NAMES[step % len(_RULE_NAMES)],
            rule_text=f"Combining the premises supports conclusion {step}.",
            premise_ids=tuple(premises),
            conclusion_id=iid,
        )
        pool.append(iid)
        conclusion = iid
        step += 1

    assert conclusion is not None
    return ProofTrace(
        statements=statements,
        rules=rules,
        conclusion_id=conclusion,
        scenario=f"random-{seed}",
        domain="other",
    )


def eighteen_scenarios() -> list[tuple[ProofTrace, TemplateSet]]:
    """11 maritime and 7 weather scenarios, cloned from the fixture traces
    with distinct scenario names."""
    traces = [load_trace(name) for name in FIXTURE_NAMES]
    maritime = [t for t in traces if t.domain == "maritime"]
    weather = [t for t in traces if t.domain == "weather"]
    out = []
    for i in range(11):
        base = maritime[i % len(maritime)]
        out.append(base.with_scenario(f"{base.scenario}-v{i // len(maritime) + 1}"))
    for i in range(7):
        base = weather[i % len(weather)]
        out.append(base.with_scenario(f"{base.scenario}-v{i // len(weather) + 1}"))
    templates = TemplateSet()
    return [(t, templates) for t in out]
