import math
import random
import statistics

import pytest

from conftest import NEGATIVE_WORDS, drive_random_session, fresh_session
from lessonmap import (
    DesignGraph,
    MetricsReport,
    NodeKind,
    cohens_d_from_stats,
    cohens_d_paired,
    cohens_d_pooled,
    compare_groups,
    corpus_compare,
    load_lexicon,
    session_report,
)
from lessonmap.analytics import (
    METRIC_NAMES,
    EmptyLexiconError,
    InsufficientDataError,
    Lexicon,
    acceptance_rates,
    avg_consecutive_distance,
    avg_message_length,
    comparison_to_csv,
    negative_keywords,
    node_to_edge_ratio,
    report_to_json,
    reports_to_csv,
    total_turns,
)
from lessonmap.store import LogEvent
from oracle_metrics import brute_force_metrics, read_events

_SEQ = iter(range(10**9))


def ev(kind, payload, actor="user"):
    return LogEvent(
        seq=next(_SEQ), session_id="s", ts=0.0, actor=actor, kind=kind, payload=payload
    )


def added(x, y, node_id="n", provenance="user"):
    return ev(
        "node_added",
        {"id": node_id, "tag": "Activity", "title": "t", "description": "",
         "x": x, "y": y, "provenance": provenance},
    )


def said(text, author="user"):
    kind = "chat_user" if author == "user" else "chat_assistant"
    return ev(kind, {"index": 0, "text": text}, actor=author if author == "user" else "global_agent")


# -- lexicon ----------------------------------------------------------------------


def test_default_lexicon_loads():
    lexicon = load_lexicon()
    assert {"stuck", "confused"} <= lexicon.keyword_set
    assert all(word == word.lower() for word in lexicon.keywords)


def test_empty_lexicon_rejected():
    with pytest.raises(EmptyLexiconError):
        Lexicon(keywords=())


def test_lexicon_from_file(tmp_path):
    path = tmp_path / "lex.txt"
    path.write_text("# comment\nstuck\nConfused\n\n", "utf-8")
    lexicon = load_lexicon(path)
    assert lexicon.keyword_set == frozenset({"stuck", "confused"})


# -- single metrics ---------------------------------------------------------------


def test_node_to_edge_ratio_value():
    graph = DesignGraph()
    nodes = [graph.add_node(NodeKind.ACTIVITY, f"N{i}") for i in range(4)]
    graph.create_edge(nodes[0].id, nodes[1].id)
    graph.create_edge(nodes[2].id, nodes[3].id)
    assert node_to_edge_ratio(graph) == 2.0


def test_node_to_edge_ratio_absent_without_edges():
    graph = DesignGraph()
    for i in range(3):
        graph.add_node(NodeKind.ACTIVITY, f"N{i}")
    assert node_to_edge_ratio(graph) is None


def test_consecutive_distance_345_triangle():
    events = [added(0, 0, "a"), added(3, 4, "b")]
    assert avg_consecutive_distance(events) == 5.0


def test_consecutive_distance_mean_of_legs():
    # (0,0)->(3,4) is 5, (3,4)->(3,0) is 4; mean 4.5.
    events = [added(0, 0, "a"), added(3, 4, "b"), added(3, 0, "c")]
    assert avg_consecutive_distance(events) == 4.5


def test_consecutive_distance_needs_two_nodes():
    assert avg_consecutive_distance([]) is None
    assert avg_consecutive_distance([added(1, 1)]) is None


def test_consecutive_distance_ignores_later_drags():
    events = [
        added(0, 0, "a"),
        added(3, 4, "b"),
        ev("node_modified", {"id": "a", "x": 500.0, "y": 500.0}),
    ]
    assert avg_consecutive_distance(events) == 5.0


def test_total_turns_counts_user_only():
    events = [said("u", "user") for _ in range(5)] + [said("a", "assistant") for _ in range(7)]
    assert total_turns(events) == 5


def test_avg_message_length():
    assert avg_message_length([said("ab"), said("abcd")]) == 3.0
    assert avg_message_length([said("long reply", "assistant")]) is None
    # Unicode characters count once each.
    assert avg_message_length([said("héé")]) == 3.0


def test_negative_keywords_examples():
    lexicon = load_lexicon()
    assert negative_keywords([said("I'm stuck and confused")], lexicon) == 2
    assert negative_keywords([said("unstuck")], lexicon) == 0
    assert negative_keywords([said("can't can't")], lexicon) == 2
    assert negative_keywords([said("STUCK?!")], lexicon) == 1
    assert negative_keywords([said("stuck", "assistant")], lexicon) == 0


def test_acceptance_rate_two_of_three():
    events = [
        ev("suggestion_offered", {"suggestion_id": f"s{i}", "origin": "global_agent",
                                   "item_count": 1, "payload": {}}, "global_agent")
        for i in range(3)
    ]
    events += [
        ev("suggestion_accepted", {"suggestion_id": f"s{i}", "selection": None})
        for i in range(2)
    ]
    events.append(ev("suggestion_rejected", {"suggestion_id": "s2"}))
    rates = acceptance_rates(events)
    assert rates["acceptance_rate"] == pytest.approx(2 / 3)


def test_acceptance_rate_absent_without_offers():
    rates = acceptance_rates([said("hello")])
    assert rates["acceptance_rate"] is None
    assert rates["modification_rate"] is None


def test_modification_rate_half():
    events = [added(0, 0, f"a{i}", "global_agent") for i in range(4)]
    events += [ev("post_acceptance_edit", {"id": "a0"}), ev("post_acceptance_edit", {"id": "a1"})]
    assert acceptance_rates(events)["modification_rate"] == 0.5


def test_modification_rate_ignores_user_nodes():
    events = [added(0, 0, "mine", "user"), added(0, 0, "theirs", "global_agent")]
    events.append(ev("post_acceptance_edit", {"id": "theirs"}))
    assert acceptance_rates(events)["modification_rate"] == 1.0


def test_repeat_edits_of_one_node_count_once():
    events = [added(0, 0, "a", "refine_agent")]
    events += [ev("post_acceptance_edit", {"id": "a"}) for _ in range(5)]
    assert acceptance_rates(events)["modification_rate"] == 1.0


# -- full report vs brute-force oracle ---------------------------------------------


def test_session_report_matches_brute_force(tmp_path):
    lexicon = load_lexicon()
    for seed in range(12):
        store, session = fresh_session(tmp_path / f"run{seed}")
        drive_random_session(session, random.Random(seed), n_ops=70)
        report = session_report(store.load_events(session.id), lexicon)
        raw = read_events(store.root / "events" / f"{session.id}.jsonl")
        expected = brute_force_metrics(raw, lexicon.keywords)
        for name in METRIC_NAMES:
            got = getattr(report, name)
            want = expected[name]
            if want is None:
                assert got is None, name
            else:
                assert got == pytest.approx(want, rel=1e-12), name


def test_session_report_empty_log():
    report = session_report([])
    assert report.node_to_edge_ratio is None
    assert report.avg_consecutive_node_distance_px is None
    assert report.total_turns == 0
    assert report.avg_user_message_length_chars is None
    assert report.negative_keyword_count == 0
    assert report.suggestion_acceptance_rate is None
    assert report.suggestion_modification_rate is None


# -- effect sizes -------------------------------------------------------------------


def test_cohens_d_hand_oracle():
    # pooled var = (4.39^2 + 7.15^2) / 2 = 35.1973, sqrt = 5.932731...
    # d = (11.82 - 18.64) / 5.932731 = -1.149554854...
    d = cohens_d_from_stats(11.82, 4.39, 30, 18.64, 7.15, 30)
    assert d == pytest.approx(-1.149554854386589, abs=1e-12)
    assert cohens_d_from_stats(18.64, 7.15, 30, 11.82, 4.39, 30) == pytest.approx(-d)


def exact_vector(mean, sd, n, rng):
    """Values with the requested sample mean and SD, exactly (up to fp error)."""
    base = [rng.gauss(0, 1) for _ in range(n)]
    mu = statistics.fmean(base)
    sigma = statistics.stdev(base)
    return [mean + sd * (b - mu) / sigma for b in base]


def test_pooled_d_from_values_matches_stats_formula():
    rng = random.Random(42)
    a = exact_vector(11.82, 4.39, 30, rng)
    b = exact_vector(18.64, 7.15, 30, rng)
    assert statistics.fmean(a) == pytest.approx(11.82)
    assert statistics.stdev(a) == pytest.approx(4.39)
    assert cohens_d_pooled(a, b) == pytest.approx(-1.149554854386589, abs=1e-9)


def test_d_is_antisymmetric():
    rng = random.Random(3)
    for _ in range(20):
        a = [rng.uniform(0, 50) for _ in range(rng.randint(2, 12))]
        b = [rng.uniform(0, 50) for _ in range(rng.randint(2, 12))]
        d_ab = cohens_d_pooled(a, b)
        d_ba = cohens_d_pooled(b, a)
        if d_ab is not None and d_ba is not None:
            assert d_ab == pytest.approx(-d_ba, abs=1e-12)


def test_d_is_translation_and_scale_invariant():
    rng = random.Random(4)
    a = [rng.uniform(0, 10) for _ in range(15)]
    b = [rng.uniform(5, 15) for _ in range(15)]
    d = cohens_d_pooled(a, b)
    shifted = cohens_d_pooled([x + 100 for x in a], [x + 100 for x in b])
    scaled = cohens_d_pooled([x * 7 for x in a], [x * 7 for x in b])
    assert shifted == pytest.approx(d, abs=1e-12)
    assert scaled == pytest.approx(d, abs=1e-9)


def test_identical_groups_have_zero_d():
    values = [1.0, 2.0, 3.0, 4.0]
    assert cohens_d_pooled(values, list(values)) == 0.0


def test_degenerate_inputs_are_absent():
    assert cohens_d_pooled([1.0], [1.0, 2.0]) is None
    assert cohens_d_pooled([2.0, 2.0], [5.0, 5.0]) is None
    assert cohens_d_from_stats(1.0, 0.0, 30, 2.0, 0.0, 30) is None
    assert cohens_d_from_stats(1.0, 1.0, 1, 2.0, 1.0, 30) is None


def test_paired_d_hand_oracle():
    # diffs [2, 3, 4]: mean 3, sd 1, d = 3.
    assert cohens_d_paired([3.0, 5.0, 7.0], [1.0, 2.0, 3.0]) == 3.0
    assert cohens_d_paired([1.0, 2.0], [1.0, 2.0, 3.0]) is None
    assert cohens_d_paired([2.0, 3.0], [1.0, 2.0]) is None  # constant diffs


def test_compare_groups_shape():
    stats = compare_groups([1.0, 2.0, 3.0], [4.0, 5.0, 6.0])
    assert set(stats) == {
        "mean_a", "sd_a", "n_a", "mean_b", "sd_b", "n_b",
        "cohens_d_pooled", "cohens_d_paired",
    }
    assert stats["mean_a"] == 2.0
    assert stats["cohens_d_pooled"] == pytest.approx(-3.0)
    with pytest.raises(InsufficientDataError):
        compare_groups([], [1.0])


# -- corpus comparison ----------------------------------------------------------------


def report_with(**overrides):
    values = {name: None for name in METRIC_NAMES}
    values["total_turns"] = 0
    values["negative_keyword_count"] = 0
    values.update(overrides)
    return MetricsReport(**values)


def test_corpus_compare_requires_two_conditions():
    reports = [report_with(total_turns=3)]
    with pytest.raises(InsufficientDataError):
        corpus_compare({"solo": reports})
    with pytest.raises(InsufficientDataError):
        corpus_compare({"a": reports, "b": reports, "c": reports})
    with pytest.raises(InsufficientDataError):
        corpus_compare({"a": reports, "b": []})


def test_corpus_compare_rows():
    group_a = [report_with(total_turns=t) for t in (10, 12, 14)]
    group_b = [report_with(total_turns=t) for t in (18, 20, 22)]
    rows = corpus_compare({"A": group_a, "B": group_b})
    assert [row["metric"] for row in rows] == METRIC_NAMES
    by_metric = {row["metric"]: row for row in rows}
    turns = by_metric["total_turns"]
    assert turns["mean_a"] == 12.0 and turns["mean_b"] == 20.0
    assert turns["cohens_d_pooled"] == pytest.approx(-4.0)
    assert turns["cohens_d_paired_if_applicable"] == pytest.approx(
        cohens_d_paired([10, 12, 14], [18, 20, 22])
    )
    # Metrics absent on both sides produce an empty-statistics row.
    ratio = by_metric["node_to_edge_ratio"]
    assert ratio["mean_a"] is None and ratio["cohens_d_pooled"] is None


def test_corpus_compare_drops_absent_sessions_per_metric():
    group_a = [
        report_with(avg_user_message_length_chars=10.0),
        report_with(),  # metric absent here; dropped from this row only
        report_with(avg_user_message_length_chars=20.0),
    ]
    group_b = [report_with(avg_user_message_length_chars=x) for x in (5.0, 7.0)]
    rows = {r["metric"]: r for r in corpus_compare({"A": group_a, "B": group_b})}
    assert rows["avg_user_message_length_chars"]["mean_a"] == 15.0
    assert rows["avg_user_message_length_chars"]["mean_b"] == 6.0


# -- output formats ---------------------------------------------------------------------


def test_report_json_round_trip():
    import json

    report = report_with(total_turns=4, negative_keyword_count=1,
                         node_to_edge_ratio=1.5)
    data = json.loads(report_to_json(report))
    assert list(data) == METRIC_NAMES
    assert data["total_turns"] == 4
    assert data["suggestion_acceptance_rate"] is None


def test_reports_csv_header_and_blanks():
    text = reports_to_csv([("s1", report_with(total_turns=2))])
    lines = text.strip().splitlines()
    assert lines[0] == "session," + ",".join(METRIC_NAMES)
    cells = lines[1].split(",")
    assert cells[0] == "s1"
    assert cells[1] == ""  # absent ratio renders as empty cell


def test_comparison_csv_columns():
    rows = corpus_compare(
        {
            "A": [report_with(total_turns=t) for t in (1, 2, 3)],
            "B": [report_with(total_turns=t) for t in (4, 5, 6)],
        }
    )
    text = comparison_to_csv(rows)
    header = text.strip().splitlines()[0]
    assert header == (
        "metric,mean_A,sd_A,mean_B,sd_B,cohens_d_pooled,cohens_d_paired_if_applicable"
    )
    assert len(text.strip().splitlines()) == 1 + len(METRIC_NAMES)
