"""Behavioral metrics over session event logs, plus condition comparison.

Seven per-session metrics are computed from the event stream alone, so a
replayed log yields exactly what the live session would have. Denominator-
less metrics are None (absent), never zero. Comparison output gives means,
sample SDs, and Cohen's d (pooled always; paired too when group sizes
match), leaving inferential statistics to external tools.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
import statistics
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, Union

from .store import LogEvent, replay

_TOKEN_RE = re.compile(r"[\w']+", re.UNICODE)

_AGENT_ACTORS = frozenset({"global_agent", "refine_agent", "split_agent"})


class AnalyticsError(Exception):
    pass


class EmptyLexiconError(AnalyticsError):
    pass


class InsufficientDataError(AnalyticsError):
    pass


@dataclass(frozen=True)
class Lexicon:
    """Deduplicated lowercase keywords matched as whole tokens."""

    keywords: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.keywords:
            raise EmptyLexiconError("lexicon must contain at least one keyword")

    @property
    def keyword_set(self) -> frozenset[str]:
        return frozenset(self.keywords)


def load_lexicon(path: Optional[Union[str, Path]] = None) -> Lexicon:
    """Read a lexicon file: one keyword per line, '#' starts a comment."""
    if path is None:
        text = resources.files("lessonmap.data").joinpath("negative_lexicon.txt").read_text(
            "utf-8"
        )
    else:
        text = Path(path).read_text("utf-8")
    seen: dict[str, None] = {}
    for line in text.splitlines():
        word = line.split("#", 1)[0].strip().lower()
        if word:
            seen.setdefault(word)
    return Lexicon(tuple(seen))


@dataclass
class MetricsReport:
    node_to_edge_ratio: Optional[float]
    avg_consecutive_node_distance_px: Optional[float]
    total_turns: int
    avg_user_message_length_chars: Optional[float]
    negative_keyword_count: int
    suggestion_acceptance_rate: Optional[float]
    suggestion_modification_rate: Optional[float]

    def to_json(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


METRIC_NAMES = [f.name for f in fields(MetricsReport)]


# -- individual metrics ---------------------------------------------------------


def node_to_edge_ratio(graph) -> Optional[float]:
    """Node count over edge count; absent when there are no edges."""
    if not graph.edges:
        return None
    return len(graph.nodes) / len(graph.edges)


def avg_consecutive_distance(events: Iterable[LogEvent]) -> Optional[float]:
    """Mean Euclidean distance between consecutively created node positions."""
    positions = [
        (float(e.payload["x"]), float(e.payload["y"]))
        for e in events
        if e.kind == "node_added"
    ]
    if len(positions) < 2:
        return None
    distances = [
        math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(positions, positions[1:])
    ]
    return statistics.fmean(distances)


def total_turns(events: Iterable[LogEvent]) -> int:
    """Number of user chat messages."""
    return sum(1 for e in events if e.kind == "chat_user")


def avg_message_length(events: Iterable[LogEvent]) -> Optional[float]:
    """Mean Unicode character count over user chat messages; absent if none."""
    lengths = [len(e.payload.get("text", "")) for e in events if e.kind == "chat_user"]
    if not lengths:
        return None
    return statistics.fmean(lengths)


def negative_keywords(events: Iterable[LogEvent], lexicon: Lexicon) -> int:
    """Whole-token, case-insensitive lexicon hits summed over user messages."""
    if not lexicon.keywords:
        raise EmptyLexiconError("lexicon must contain at least one keyword")
    wanted = lexicon.keyword_set
    count = 0
    for event in events:
        if event.kind != "chat_user":
            continue
        for token in _TOKEN_RE.findall(event.payload.get("text", "").lower()):
            if token in wanted:
                count += 1
    return count


def acceptance_rates(events: Iterable[LogEvent]) -> dict[str, Optional[float]]:
    """Suggestion acceptance and post-acceptance modification rates.

    Acceptance: resolved-as-accepted (fully or partially) over offered.
    Modification: agent-authored nodes the user later edited over all
    agent-authored nodes added. Either is absent when its denominator is 0.
    """
    offered = 0
    accepted = 0
    agent_nodes: set[str] = set()
    edited: set[str] = set()
    for event in events:
        if event.kind == "suggestion_offered":
            offered += 1
        elif event.kind == "suggestion_accepted":
            accepted += 1
        elif event.kind == "node_added":
            if event.payload.get("provenance") in _AGENT_ACTORS:
                agent_nodes.add(event.payload["id"])
        elif event.kind == "post_acceptance_edit":
            edited.add(event.payload["id"])
    return {
        "acceptance_rate": accepted / offered if offered else None,
        "modification_rate": (
            len(edited & agent_nodes) / len(agent_nodes) if agent_nodes else None
        ),
    }


def session_report(
    events: Sequence[LogEvent], lexicon: Optional[Lexicon] = None
) -> MetricsReport:
    """All seven metrics for one session's full event log."""
    if lexicon is None:
        lexicon = load_lexicon()
    events = list(events)
    graph = replay(events)
    rates = acceptance_rates(events)
    return MetricsReport(
        node_to_edge_ratio=node_to_edge_ratio(graph),
        avg_consecutive_node_distance_px=avg_consecutive_distance(events),
        total_turns=total_turns(events),
        avg_user_message_length_chars=avg_message_length(events),
        negative_keyword_count=negative_keywords(events, lexicon),
        suggestion_acceptance_rate=rates["acceptance_rate"],
        suggestion_modification_rate=rates["modification_rate"],
    )


# -- effect sizes -----------------------------------------------------------------


def cohens_d_from_stats(
    mean_a: float, sd_a: float, n_a: int, mean_b: float, sd_b: float, n_b: int
) -> Optional[float]:
    """Cohen's d with pooled SD from summary statistics (sign: A minus B)."""
    if n_a < 2 or n_b < 2:
        return None
    pooled_var = ((n_a - 1) * sd_a**2 + (n_b - 1) * sd_b**2) / (n_a + n_b - 2)
    if pooled_var <= 0:
        return None
    return (mean_a - mean_b) / math.sqrt(pooled_var)


def cohens_d_pooled(values_a: Sequence[float], values_b: Sequence[float]) -> Optional[float]:
    """Cohen's d for independent groups using sample SDs (sign: A minus B)."""
    if len(values_a) < 2 or len(values_b) < 2:
        return None
    return cohens_d_from_stats(
        statistics.fmean(values_a),
        statistics.stdev(values_a),
        len(values_a),
        statistics.fmean(values_b),
        statistics.stdev(values_b),
        len(values_b),
    )


def cohens_d_paired(values_a: Sequence[float], values_b: Sequence[float]) -> Optional[float]:
    """Paired-samples d: mean of within-pair differences over their SD."""
    if len(values_a) != len(values_b) or len(values_a) < 2:
        return None
    diffs = [a - b for a, b in zip(values_a, values_b)]
    sd = statistics.stdev(diffs)
    if sd == 0:
        return None
    return statistics.fmean(diffs) / sd


def compare_groups(
    values_a: Sequence[float], values_b: Sequence[float]
) -> dict[str, Optional[float]]:
    """Descriptive stats plus both Cohen's d variants for two value groups."""
    if not values_a or not values_b:
        raise InsufficientDataError("both groups need at least one value")
    return {
        "mean_a": statistics.fmean(values_a),
        "sd_a": statistics.stdev(values_a) if len(values_a) > 1 else None,
        "n_a": len(values_a),
        "mean_b": statistics.fmean(values_b),
        "sd_b": statistics.stdev(values_b) if len(values_b) > 1 else None,
        "n_b": len(values_b),
        "cohens_d_pooled": cohens_d_pooled(values_a, values_b),
        "cohens_d_paired": cohens_d_paired(values_a, values_b),
    }


def corpus_compare(
    reports_by_condition: dict[str, Sequence[MetricsReport]]
) -> list[dict[str, Any]]:
    """Per-metric comparison rows between exactly two condition labels.

    Sessions where a metric is absent are dropped from that metric's row;
    a row with an empty side reports no statistics for it.
    """
    if len(reports_by_condition) != 2:
        raise InsufficientDataError("comparison requires exactly two conditions")
    (label_a, reports_a), (label_b, reports_b) = reports_by_condition.items()
    if not reports_a or not reports_b:
        raise InsufficientDataError("each condition needs at least one report")
    rows: list[dict[str, Any]] = []
    for metric in METRIC_NAMES:
        values_a = [getattr(r, metric) for r in reports_a if getattr(r, metric) is not None]
        values_b = [getattr(r, metric) for r in reports_b if getattr(r, metric) is not None]
        row: dict[str, Any] = {"metric": metric, "condition_a": label_a, "condition_b": label_b}
        if values_a and values_b:
            stats = compare_groups(values_a, values_b)
            row.update(
                {
                    "mean_a": stats["mean_a"],
                    "sd_a": stats["sd_a"],
                    "mean_b": stats["mean_b"],
                    "sd_b": stats["sd_b"],
                    "cohens_d_pooled": stats["cohens_d_pooled"],
                    "cohens_d_paired_if_applicable": stats["cohens_d_paired"],
                }
            )
        else:
            row.update(
                {
                    "mean_a": None,
                    "sd_a": None,
                    "mean_b": None,
                    "sd_b": None,
                    "cohens_d_pooled": None,
                    "cohens_d_paired_if_applicable": None,
                }
            )
        rows.append(row)
    return rows


# -- output formats -----------------------------------------------------------------


def report_to_json(report: MetricsReport) -> str:
    return json.dumps(report.to_json(), ensure_ascii=False, indent=1)


def reports_to_csv(rows: Sequence[tuple[str, MetricsReport]]) -> str:
    """CSV with one row per labeled session report."""
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["session"] + METRIC_NAMES)
    for label, report in rows:
        writer.writerow(
            [label] + ["" if (v := getattr(report, m)) is None else v for m in METRIC_NAMES]
        )
    return buffer.getvalue()


def comparison_to_csv(rows: Sequence[dict[str, Any]]) -> str:
    """CSV for corpus_compare output."""
    columns = [
        "metric",
        "mean_A",
        "sd_A",
        "mean_B",
        "sd_B",
        "cohens_d_pooled",
        "cohens_d_paired_if_applicable",
    ]
    keys = ["metric", "mean_a", "sd_a", "mean_b", "sd_b", "cohens_d_pooled",
            "cohens_d_paired_if_applicable"]
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if row.get(k) is None else row.get(k) for k in keys])
    return buffer.getvalue()
