import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import rankdata

from conftest import eighteen_scenarios, fixture_graph

from tracelens.study import (
    DegenerateInput,
    EmptyCell,
    InfeasibleAssignment,
    InsufficientScenarios,
    MoreInfo,
    RatingRecord,
    SetLabel,
    UnknownPage,
    analysis_to_csv,
    analyze,
    assign_pages,
    build_pages,
    enumerate_pair_types,
    friedman_test,
    kendalls_w,
    page_questions,
    pair_respects_abstraction,
    parse_ratings_csv,
    ratings_to_csv,
    ANALYSIS_HEADER,
    RATINGS_HEADER,
)


# --- Independent oracles --------------------------------------------------


def oracle_friedman_stat(matrix) -> float:
    """Classic corrected form: uncorrected statistic divided by the tie
    correction factor, using scipy's rankdata. Algebraically equivalent to
    the implementation's formula but coded from the other direction."""
    y = np.asarray(matrix, dtype=float)
    n, k = y.shape
    ranks = np.vstack([rankdata(row) for row in y])
    col = ranks.sum(axis=0)
    uncorrected = 12.0 / (n * k * (k + 1)) * float(np.sum(col**2)) - 3 * n * (k + 1)
    ties = 0.0
    for row in y:
        _, counts = np.unique(row, return_counts=True)
        ties += float(np.sum(counts.astype(float) ** 3 - counts))
    correction = 1.0 - ties / (n * k * (k * k - 1))
    if correction <= 0:
        return 0.0
    return uncorrected / correction


def oracle_kendalls_w(matrix) -> float:
    """Rank-variance definition with tie adjustment."""
    y = np.asarray(matrix, dtype=float)
    n, k = y.shape
    ranks = np.vstack([rankdata(row) for row in y])
    col = ranks.sum(axis=0)
    ties = 0.0
    for row in y:
        _, counts = np.unique(row, return_counts=True)
        ties += float(np.sum(counts.astype(float) ** 3 - counts))
    denom = n * n * k * (k * k - 1) - n * ties
    if denom == 0:
        return 0.0
    return (12.0 * float(np.sum(col**2)) - 3 * n * n * k * (k + 1) ** 2) / denom


# --- Pair types -----------------------------------------------------------


def test_nine_pair_types_partitioned():
    pairs = enumerate_pair_types()
    assert len(pairs) == 9
    by_set = {label: [p for p in pairs if p.set_label is label] for label in SetLabel}
    assert len(by_set[SetLabel.SET1_FR]) == 5
    assert len(by_set[SetLabel.SET2_NOFR]) == 2
    assert len(by_set[SetLabel.SET3_FR_VS_NOFR]) == 2
    assert {p.label for p in by_set[SetLabel.SET3_FR_VS_NOFR]} == {
        "FL-FR-FK vs FL-FK",
        "FL-FR vs FL-FK",
    }
    assert len({p.label for p in pairs}) == 9


def test_left_never_less_abstract_on_reference_fixture():
    g = fixture_graph("blizzard")  # no background knowledge
    for pair in enumerate_pair_types():
        assert pair_respects_abstraction(pair, g), pair.label


# --- Pages ----------------------------------------------------------------


def test_eighteen_scenarios_give_eighteen_pages():
    pages = build_pages(eighteen_scenarios())
    assert len(pages) == 18
    assert len({p.scenario for p in pages}) == 18  # each scenario used once
    domains = [p.domain for p in pages]
    assert set(domains) <= {"maritime", "weather"}


def test_two_scenarios_one_pair():
    scenarios = eighteen_scenarios()[:2]
    pages = build_pages(scenarios, enumerate_pair_types()[:1])
    assert len(pages) == 2
    assert pages[0].scenario != pages[1].scenario


def test_single_scenario_insufficient():
    with pytest.raises(InsufficientScenarios):
        build_pages(eighteen_scenarios()[:1])


def test_page_question_structure():
    questions = page_questions()
    assert len(questions) == 8
    assert [q.kind for q in questions] == ["likert"] * 5 + ["more_info"] + ["free_text"] * 2
    assert questions[5].options == ("yes", "no", "idk")


def test_pages_deterministic():
    a = build_pages(eighteen_scenarios())
    b = build_pages(eighteen_scenarios())
    assert [(p.id, p.scenario, p.pair.label) for p in a] == [
        (p.id, p.scenario, p.pair.label) for p in b
    ]


# --- Assignment -----------------------------------------------------------


def standard_pages():
    return build_pages(eighteen_scenarios())


def test_assignment_constraints_hold():
    pages = standard_pages()
    by_id = {p.id: p for p in pages}
    assignment = assign_pages(pages, 10, seed=7)
    for pid, page_ids in assignment.participants:
        assert len(page_ids) == 6
        scenarios = [by_id[x].scenario for x in page_ids]
        pair_labels = [by_id[x].pair_label for x in page_ids]
        assert len(set(scenarios)) == 6
        assert len(set(pair_labels)) == 6


def test_assignment_deterministic():
    pages = standard_pages()
    assert assign_pages(pages, 10, seed=7) == assign_pages(pages, 10, seed=7)
    assert assign_pages(pages, 10, seed=7) != assign_pages(pages, 10, seed=8)


def test_assignment_infeasible():
    pages = standard_pages()[:4]
    with pytest.raises(InfeasibleAssignment):
        assign_pages(pages, 3, seed=1)


# --- Friedman test --------------------------------------------------------


def test_friedman_anchor_three_by_two():
    stat, p = friedman_test([[1, 2], [1, 2], [1, 2]])
    assert stat == pytest.approx(3.0, abs=1e-12)
    assert p == pytest.approx(0.0833, abs=0.0005)


def test_friedman_full_ties():
    stat, p = friedman_test([[4, 4], [4, 4], [4, 4]])
    assert stat == 0.0
    assert p == 1.0


def test_friedman_closed_form_exhaustive():
    for n in range(2, 11):
        for pattern in itertools.product((0, 1), repeat=n):
            matrix = [[1, 2] if w else [2, 1] for w in pattern]
            stat, _ = friedman_test(matrix)
            wins_two = sum(pattern)
            wins_one = n - wins_two
            assert stat == pytest.approx((wins_one - wins_two) ** 2 / n, abs=1e-12)
            assert stat == pytest.approx(oracle_friedman_stat(matrix), abs=1e-12)


def test_friedman_matches_oracle_with_ties():
    rng = random.Random(11)
    for _ in range(100):
        n, k = rng.randint(2, 8), rng.randint(2, 5)
        matrix = [[rng.randint(1, 7) for _ in range(k)] for _ in range(n)]
        stat, _ = friedman_test(matrix)
        assert stat == pytest.approx(oracle_friedman_stat(matrix), abs=1e-9)


def test_friedman_degenerate_inputs():
    with pytest.raises(DegenerateInput):
        friedman_test([[1, 2]])
    with pytest.raises(DegenerateInput):
        friedman_test([[1], [2]])
    with pytest.raises(DegenerateInput):
        friedman_test([[1, float("nan")], [2, 3]])


@settings(max_examples=50, deadline=None)
@given(
    data=st.lists(
        st.lists(st.integers(1, 7), min_size=3, max_size=3),
        min_size=3,
        max_size=8,
    ),
    seed=st.integers(0, 2**16),
)
def test_friedman_subject_permutation_invariance(data, seed):
    rng = random.Random(seed)
    shuffled = list(data)
    rng.shuffle(shuffled)
    assert friedman_test(data) == friedman_test(shuffled)


@settings(max_examples=50, deadline=None)
@given(
    data=st.lists(
        st.lists(st.integers(1, 7), min_size=2, max_size=4),
        min_size=2,
        max_size=6,
    ).filter(lambda rows: len({len(r) for r in rows}) == 1),
    subject=st.integers(0, 5),
)
def test_friedman_monotone_transform_invariance(data, subject):
    subject %= len(data)
    transformed = [list(row) for row in data]
    transformed[subject] = [3 * v + 1 for v in transformed[subject]]
    base = friedman_test(data)
    after = friedman_test(transformed)
    assert base[0] == pytest.approx(after[0], abs=1e-12)


# --- Kendall's W ----------------------------------------------------------


def test_kendalls_w_perfect_agreement():
    assert kendalls_w([[1, 2], [1, 2], [1, 2]]) == pytest.approx(1.0, abs=1e-12)


def test_kendalls_w_full_ties():
    assert kendalls_w([[4, 4], [4, 4], [4, 4]]) == 0.0


def test_kendalls_w_dual_formula_oracle():
    rng = random.Random(29)
    for _ in range(100):
        matrix = [[rng.randint(1, 7), rng.randint(1, 7)] for _ in range(5)]
        w = kendalls_w(matrix)
        assert 0.0 <= w <= 1.0
        assert w == pytest.approx(oracle_kendalls_w(matrix), abs=1e-12)


# --- Analysis -------------------------------------------------------------


def ratings_plus_one(pages, participants=12, seed=5):
    rng = random.Random(seed)
    records = []
    for pid, page_ids in assign_pages(pages, participants, seed=seed).participants:
        for page_id in page_ids:
            base = [rng.randint(1, 6) for _ in range(5)]
            records.append(
                RatingRecord(
                    participant=pid,
                    page=page_id,
                    likert=tuple((b, b + 1) for b in base),
                    more_info=MoreInfo.YES,
                    feedback="",
                    justification="the second explanation had more detail",
                )
            )
    return records


def test_analyze_shape_and_synthetic_significance():
    pages = standard_pages()
    records = ratings_plus_one(pages)
    rows = analyze(pages, records, alpha=0.1)
    assert len(rows) == 45  # 9 pair types x 5 questions
    pair_order = [p.label for p in enumerate_pair_types()]
    assert [r.pair for r in rows] == [p for p in pair_order for _ in range(5)]
    assert [r.question_number for r in rows] == [q for _ in pair_order for q in range(1, 6)]
    for row in rows:
        assert row.significant
        assert row.avg_exp1 - row.avg_exp2 == pytest.approx(-1.0, abs=1e-12)
        assert 0 <= row.p <= 1 and row.chi_squared >= 0 and 0 <= row.kendalls_w <= 1


def test_analyze_identical_ratings_not_significant():
    pages = build_pages(eighteen_scenarios()[:2], enumerate_pair_types()[:1])
    records = [
        RatingRecord("P1", pages[0].id, tuple((4, 4) for _ in range(5)), MoreInfo.NO),
        RatingRecord("P2", pages[1].id, tuple((4, 4) for _ in range(5)), MoreInfo.NO),
    ]
    rows = analyze(pages, records)
    assert len(rows) == 5
    for row in rows:
        assert row.p == 1.0
        assert not row.significant


def test_analyze_unknown_page():
    pages = standard_pages()
    records = [
        RatingRecord("P1", "page-99", tuple((4, 5) for _ in range(5)), MoreInfo.YES)
    ]
    with pytest.raises(UnknownPage):
        analyze(pages, records)


def test_analyze_empty_cell():
    pages = standard_pages()
    records = ratings_plus_one(pages)
    # starve one pair type below two raters
    starving = pages[-1].pair_label
    starved_ids = {p.id for p in pages if p.pair_label == starving}
    kept = [r for r in records if r.page not in starved_ids]
    with pytest.raises(EmptyCell):
        analyze(pages, kept)


def test_analyze_order_insensitive():
    pages = standard_pages()
    records = ratings_plus_one(pages)
    shuffled = list(records)
    random.Random(99).shuffle(shuffled)
    assert analyze(pages, records) == analyze(pages, shuffled)


# --- CSV formats ----------------------------------------------------------


def test_ratings_csv_round_trip_with_awkward_text():
    records = [
        RatingRecord(
            participant="P01",
            page="page-03",
            likert=((5, 6), (4, 5), (7, 7), (1, 2), (3, 3)),
            more_info=MoreInfo.IDK,
            feedback='liked the "footnotes", mostly',
            justification="more detail,\nbut repetitive",
        )
    ]
    text = ratings_to_csv(records)
    assert text.splitlines()[0] == RATINGS_HEADER
    assert parse_ratings_csv(text) == records


def test_analysis_csv_header_and_anchor_row():
    pages = build_pages(eighteen_scenarios()[:2], enumerate_pair_types()[:1])
    # three raters in perfect disagreement: chi2 = 3.0, p = 0.083
    records = [
        RatingRecord(f"P{i}", pages[i % 2].id, tuple((4, 5) for _ in range(5)), MoreInfo.YES)
        for i in range(3)
    ]
    rows = analyze(pages, records)
    text = analysis_to_csv(rows)
    lines = text.splitlines()
    assert lines[0] == ANALYSIS_HEADER
    first = lines[1]
    assert first.startswith('FL vs no abstraction,1,')
    assert ",3," in first  # chi-squared column
    assert ",0.0832645," in first
    assert first.endswith(",yes")
