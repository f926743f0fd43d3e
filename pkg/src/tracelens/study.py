"""Pairwise-comparison study harness and nonparametric rating analysis.

Pages put two explanation layers of one scenario side by side, the more
abstract one first. Participants answer five 7-point Likert items per
explanation, one more-information item and two free-text prompts. The
analysis runs a tie-corrected Friedman test per pair type and question,
with Kendall's W as the concordance measure, and writes one CSV row per
(pair, question) cell.
"""

from __future__ import annotations

import csv
import enum
import io
import random
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2

from .abstraction import (
    FK,
    FL,
    FR,
    RuleCombo,
    apply_combo,
    combo_label,
)
from .complexity import Ordering, compare_layers
from .graph import ExplanationGraph, build_graph
from .render import RenderedExplanation, TemplateSet, layer_json, render_layer
from .trace_model import ProofTrace


class StudyError(Exception):
    pass


class InsufficientScenarios(StudyError):
    pass


class InfeasibleAssignment(StudyError):
    pass


class DegenerateInput(StudyError):
    pass


class UnknownPage(StudyError):
    pass


class EmptyCell(StudyError):
    pass


class SetLabel(enum.Enum):
    SET1_FR = "Set1_FR"
    SET2_NOFR = "Set2_NoFR"
    SET3_FR_VS_NOFR = "Set3_FRvsNoFR"


@dataclass(frozen=True)
class PairType:
    """An ordered layer comparison: left shown first as the more abstract
    explanation, right second as the more complex one."""

    left: RuleCombo
    right: RuleCombo
    set_label: SetLabel

    @property
    def label(self) -> str:
        return f"{combo_label(self.left)} vs {combo_label(self.right)}"


_PAIR_TABLE: tuple[tuple[RuleCombo, RuleCombo, SetLabel], ...] = (
    ((FL,), (), SetLabel.SET1_FR),
    ((FL, FR), (), SetLabel.SET1_FR),
    ((FL, FR), (FL,), SetLabel.SET1_FR),
    ((FL, FR, FK), (FL,), SetLabel.SET1_FR),
    ((FL, FR, FK), (FL, FR), SetLabel.SET1_FR),
    ((FL, FK), (), SetLabel.SET2_NOFR),
    ((FL, FK), (FL,), SetLabel.SET2_NOFR),
    ((FL, FR, FK), (FL, FK), SetLabel.SET3_FR_VS_NOFR),
    ((FL, FR), (FL, FK), SetLabel.SET3_FR_VS_NOFR),
)


def enumerate_pair_types() -> list[PairType]:
    """The nine distinct layer comparisons, in fixed presentation order:
    five with flatten-rules applied, two without, two contrasting the two."""
    return [PairType(left, right, label) for left, right, label in _PAIR_TABLE]


def pair_respects_abstraction(pair: PairType, g: ExplanationGraph) -> bool:
    """True when, on this graph, the pair's left layer is at least as
    abstract as its right layer by node simplicity."""
    left = apply_combo(g, pair.left)
    right = apply_combo(g, pair.right)
    return compare_layers(left, right) is not Ordering.LESS_ABSTRACT


LIKERT_QUESTIONS: tuple[str, ...] = (
    "From the explanation, I understand why the prediction has been made.",
    "The explanation of why the prediction was made provides sufficient detail.",
    "The explanation of why the prediction was made is satisfying.",
    "The explanation of why the prediction was made is complete.",
    "The explanation of why the prediction was made is trustworthy.",
)

MORE_INFO_QUESTION = (
    "Explanation 2 contains information, not present in Explanation 1, "
    "that is helpful for understanding why the prediction was made."
)

FREE_TEXT_PROMPTS: tuple[str, ...] = (
    "Do you have any additional feedback regarding the ratings?",
    "Please justify your answer to the previous question.",
)


class MoreInfo(enum.Enum):
    YES = "yes"
    NO = "no"
    IDK = "idk"


@dataclass(frozen=True)
class Question:
    kind: str  # likert | more_info | free_text
    text: str
    options: tuple[str, ...] = ()


def page_questions() -> tuple[Question, ...]:
    qs = [Question("likert", text) for text in LIKERT_QUESTIONS]
    qs.append(Question("more_info", MORE_INFO_QUESTION, ("yes", "no", "idk")))
    qs.extend(Question("free_text", text) for text in FREE_TEXT_PROMPTS)
    return tuple(qs)


@dataclass(frozen=True)
class StudyPage:
    id: str
    scenario: str
    domain: str
    conclusion_text: str
    pair: PairType
    rendered_left: RenderedExplanation
    rendered_right: RenderedExplanation
    questions: tuple[Question, ...] = field(default_factory=page_questions)

    @property
    def pair_label(self) -> str:
        return self.pair.label


@dataclass(frozen=True)
class PageRef:
    """Just enough of a study page to assign and analyze: loaded back from
    a serialized pages document."""

    id: str
    scenario: str
    pair_label: str


def pages_from_document(doc: dict) -> list[PageRef]:
    return [
        PageRef(
            id=p["id"],
            scenario=p.get("scenario", ""),
            pair_label=p.get("pair", {}).get("label", ""),
        )
        for p in doc.get("pages", [])
    ]


def build_pages(
    scenarios: list[tuple[ProofTrace, TemplateSet]],
    pairs: list[PairType] | None = None,
) -> list[StudyPage]:
    """Two pages per pair type, drawn from two different scenarios. Scenario
    use walks the input order, so 18 scenarios and 9 pair types give 18
    pages with every scenario used exactly once."""
    if pairs is None:
        pairs = enumerate_pair_types()
    if len(scenarios) < 2:
        raise InsufficientScenarios("need at least 2 scenarios to vary pages per pair type")

    pages: list[StudyPage] = []
    count = len(scenarios)
    for pair_index, pair in enumerate(pairs):
        for side in range(2):
            trace, templates = scenarios[(2 * pair_index + side) % count]
            g = build_graph(trace)
            left = render_layer(apply_combo(g, pair.left), templates, pair.left)
            right = render_layer(apply_combo(g, pair.right), templates, pair.right)
            pages.append(
                StudyPage(
                    id=f"page-{len(pages) + 1:02d}",
                    scenario=trace.scenario,
                    domain=trace.domain,
                    conclusion_text=trace.statements[trace.conclusion_id].text,
                    pair=pair,
                    rendered_left=left,
                    rendered_right=right,
                )
            )
    return pages


@dataclass(frozen=True)
class Assignment:
    seed: int
    pages_per_participant: int
    participants: tuple[tuple[str, tuple[str, ...]], ...]


PAGES_PER_PARTICIPANT = 6
_ASSIGN_ATTEMPTS = 1000


def assign_pages(
    pages: list[StudyPage] | list[PageRef], participant_count: int, seed: int
) -> Assignment:
    """Give each participant a fixed sequence of 6 pages with pairwise
    distinct scenarios and pairwise distinct pair types, reproducibly from
    the seed."""
    if participant_count < 1:
        raise InfeasibleAssignment("participant_count must be at least 1")
    if len({p.scenario for p in pages}) < PAGES_PER_PARTICIPANT or len(
        {p.pair_label for p in pages}
    ) < PAGES_PER_PARTICIPANT:
        raise InfeasibleAssignment(
            f"pages do not offer {PAGES_PER_PARTICIPANT} distinct scenarios "
            f"and pair types"
        )
    rng = random.Random(seed)
    width = max(2, len(str(participant_count)))
    participants: list[tuple[str, tuple[str, ...]]] = []
    for i in range(1, participant_count + 1):
        chosen = _draw_pages(pages, rng)
        if chosen is None:
            raise InfeasibleAssignment("could not satisfy distinctness constraints")
        participants.append((f"P{i:0{width}d}", tuple(p.id for p in chosen)))
    return Assignment(
        seed=seed,
        pages_per_participant=PAGES_PER_PARTICIPANT,
        participants=tuple(participants),
    )


def _draw_pages(pages, rng: random.Random):
    for _ in range(_ASSIGN_ATTEMPTS):
        pool = list(pages)
        rng.shuffle(pool)
        chosen = []
        scenarios: set[str] = set()
        pairs: set[str] = set()
        for page in pool:
            if page.scenario in scenarios or page.pair_label in pairs:
                continue
            chosen.append(page)
            scenarios.add(page.scenario)
            pairs.add(page.pair_label)
            if len(chosen) == PAGES_PER_PARTICIPANT:
                return chosen
    return None


@dataclass(frozen=True)
class RatingRecord:
    """One participant's answers for one page. Each Likert item is a pair:
    the rating of Explanation 1 and the rating of Explanation 2."""

    participant: str
    page: str
    likert: tuple[tuple[int, int], ...]
    more_info: MoreInfo
    feedback: str = ""
    justification: str = ""

    def validate(self) -> list[str]:
        problems = []
        if len(self.likert) != len(LIKERT_QUESTIONS):
            problems.append(f"expected {len(LIKERT_QUESTIONS)} likert pairs")
        for i, pair in enumerate(self.likert, start=1):
            if len(pair) != 2 or not all(
                isinstance(v, int) and 1 <= v <= 7 for v in pair
            ):
                problems.append(f"q{i} must be two integers in 1..7")
        if not self.participant:
            problems.append("participant id is empty")
        if not self.page:
            problems.append("page id is empty")
        return problems


def friedman_test(ratings) -> tuple[float, float]:
    """Friedman rank test across k related conditions.

    Ranks are assigned within each subject with mid-ranks for ties, and the
    chi-squared statistic uses the tie-corrected denominator

        chi2 = 12 * sum_j (R_j - N(k+1)/2)^2 / (N k (k+1) - T / (k-1))

    where T sums t^3 - t over tie groups in every subject's row. The p
    value is the upper tail of the chi-squared distribution with k - 1
    degrees of freedom. A fully tied matrix yields (0.0, 1.0).
    """
    y = np.asarray(ratings, dtype=float)
    if y.ndim != 2 or y.shape[0] < 2 or y.shape[1] < 2:
        raise DegenerateInput("need at least 2 subjects and 2 conditions")
    if not np.all(np.isfinite(y)):
        raise DegenerateInput("ratings must be finite")
    n, k = y.shape
    ranks = np.vstack([_midranks(row) for row in y])
    column_sums = ranks.sum(axis=0)
    tie_term = 0.0
    for row in y:
        _, counts = np.unique(row, return_counts=True)
        tie_term += float(np.sum(counts.astype(float) ** 3 - counts))
    denominator = n * k * (k + 1) - tie_term / (k - 1)
    if denominator <= 0:
        return 0.0, 1.0
    statistic = float(12.0 * np.sum((column_sums - n * (k + 1) / 2.0) ** 2) / denominator)
    p_value = float(chi2.sf(statistic, k - 1))
    return statistic, p_value


def _midranks(row: np.ndarray) -> np.ndarray:
    order = np.argsort(row, kind="stable")
    ranks = np.empty(len(row), dtype=float)
    i = 0
    while i < len(row):
        j = i
        while j + 1 < len(row) and row[order[j + 1]] == row[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def kendalls_w(ratings) -> float:
    """Coefficient of concordance among subjects over conditions, computed
    from the tie-corrected Friedman statistic as W = chi2 / (N (k - 1)).
    Ranges from 0 (no agreement) to 1 (perfect agreement)."""
    y = np.asarray(ratings, dtype=float)
    statistic, _ = friedman_test(y)
    n, k = y.shape
    return float(statistic / (n * (k - 1)))


@dataclass(frozen=True)
class AnalysisRow:
    pair: str
    question_number: int
    question_text: str
    avg_exp1: float
    sd_exp1: float
    avg_exp2: float
    sd_exp2: float
    p: float
    chi_squared: float
    kendalls_w: float
    significant: bool


def analyze(
    pages: list[StudyPage] | list[PageRef],
    ratings: list[RatingRecord],
    alpha: float = 0.1,
) -> list[AnalysisRow]:
    """One row per (pair type, question), in pair-table order then question
    number. Ratings for the two pages of a pair type are pooled."""
    page_pair = {p.id: p.pair_label for p in pages}
    pair_order: list[str] = []
    for p in pages:
        if p.pair_label not in pair_order:
            pair_order.append(p.pair_label)

    cells: dict[str, list[RatingRecord]] = {label: [] for label in pair_order}
    for record in sorted(ratings, key=lambda r: (r.participant, r.page)):
        if record.page not in page_pair:
            raise UnknownPage(record.page)
        cells[page_pair[record.page]].append(record)

    rows: list[AnalysisRow] = []
    for label in pair_order:
        records = cells[label]
        if len(records) < 2:
            raise EmptyCell(f"pair {label!r} has {len(records)} raters, need at least 2")
        for q in range(len(LIKERT_QUESTIONS)):
            matrix = np.array([record.likert[q] for record in records], dtype=float)
            statistic, p_value = friedman_test(matrix)
            w = kendalls_w(matrix)
            rows.append(
                AnalysisRow(
                    pair=label,
                    question_number=q + 1,
                    question_text=LIKERT_QUESTIONS[q],
                    avg_exp1=float(np.mean(matrix[:, 0])),
                    sd_exp1=float(np.std(matrix[:, 0], ddof=1)),
                    avg_exp2=float(np.mean(matrix[:, 1])),
                    sd_exp2=float(np.std(matrix[:, 1], ddof=1)),
                    p=p_value,
                    chi_squared=statistic,
                    kendalls_w=w,
                    significant=p_value < alpha,
                )
            )
    return rows


def page_json(page: StudyPage) -> dict:
    return {
        "id": page.id,
        "scenario": page.scenario,
        "domain": page.domain,
        "conclusion_text": page.conclusion_text,
        "pair": {
            "label": page.pair.label,
            "left": [r.value for r in page.pair.left],
            "right": [r.value for r in page.pair.right],
            "set": page.pair.set_label.value,
        },
        "questions": [
            {"kind": q.kind, "text": q.text, **({"options": list(q.options)} if q.options else {})}
            for q in page.questions
        ],
        "left": layer_json(page.rendered_left),
        "right": layer_json(page.rendered_right),
    }


def pages_document(pages: list[StudyPage]) -> dict:
    return {"pages": [page_json(p) for p in pages]}


RATINGS_HEADER = "participant,page,q1,q2,q3,q4,q5,more_info,feedback,justification"
ANALYSIS_HEADER = (
    "pair,question_number,question_text,avg_exp1,sd_exp1,avg_exp2,sd_exp2,"
    "p,chi_squared,kendalls_w,significant_at_alpha"
)


def format_rating_row(record: RatingRecord) -> str:
    """One CSV line (no newline); Likert cells hold "exp1|exp2" pairs."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="")
    writer.writerow(
        [record.participant, record.page]
        + [f"{a}|{b}" for a, b in record.likert]
        + [record.more_info.value, record.feedback, record.justification]
    )
    return buf.getvalue()


def ratings_to_csv(records: list[RatingRecord]) -> str:
    lines = [RATINGS_HEADER]
    lines.extend(format_rating_row(r) for r in records)
    return "\n".join(lines) + "\n"


def parse_ratings_csv(text: str) -> list[RatingRecord]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        return []
    if ",".join(header) != RATINGS_HEADER:
        raise StudyError(f"unexpected ratings header: {','.join(header)!r}")
    records = []
    for row in reader:
        if not row:
            continue
        if len(row) != 10:
            raise StudyError(f"ratings row has {len(row)} fields, expected 10")
        likert = []
        for cell in row[2:7]:
            parts = cell.split("|")
            if len(parts) != 2:
                raise StudyError(f"likert cell {cell!r} is not an exp1|exp2 pair")
            likert.append((int(parts[0]), int(parts[1])))
        records.append(
            RatingRecord(
                participant=row[0],
                page=row[1],
                likert=tuple(likert),
                more_info=MoreInfo(row[7]),
                feedback=row[8],
                justification=row[9],
            )
        )
    return records


def _number(x: float) -> str:
    return f"{x:.6g}"


def analysis_to_csv(rows: list[AnalysisRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ANALYSIS_HEADER.split(","))
    for row in rows:
        writer.writerow(
            [
                row.pair,
                row.question_number,
                row.question_text,
                _number(row.avg_exp1),
                _number(row.sd_exp1),
                _number(row.avg_exp2),
                _number(row.sd_exp2),
                _number(row.p),
                _number(row.chi_squared),
                _number(row.kendalls_w),
                "yes" if row.significant else "no",
            ]
        )
    return buf.getvalue()
