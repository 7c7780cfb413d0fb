"""Retrieval evaluation: Precision@K, Recall@K, MAP@K, MRR@K, R-Precision@X, Macro-F1@X.

A retrieval run maps each query ad id to its ranked list of index doc ids.
Relevance is vendor identity: an index doc is relevant to a query when both
carry the same vendor label. Per-query scores are averaged over queries and
reported together with the population standard deviation across vendor-class
means (the "x +/- y" convention); Macro-F1@X instead averages the per-class
means with equal weight.

Conventions pinned here:
  * AP@K divides by min(R, K) so MAP stays in [0, 1].
  * MRR@K is the reciprocal rank of the first relevant doc within the top K,
    0 when none appears.
  * R-Precision and per-query F1 at cutoff X=R coincide (precision equals
    recall at rank R), but R-Precision is reported as the query mean while
    Macro-F1@X is the unweighted class mean.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

RetrievalRun = Mapping[str, Sequence[str]]

METRIC_NAMES = ("precision", "recall", "map", "mrr", "r_precision", "macro_f1")


@dataclass(frozen=True)
class RelevanceJudgments:
    """Per-query relevant index ids and their counts R; R=0 queries are skipped."""

    relevant_of: dict[str, frozenset[str]]
    r_of: dict[str, int]
    skipped: tuple[str, ...] = ()


@dataclass(frozen=True)
class ClassAggregate:
    mean: float
    std_classes: float
    per_class: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class MetricReport:
    """metric -> cutoff -> aggregate; cutoffs are ints except the 'X' of @X metrics."""

    values: dict[str, dict[str, ClassAggregate]]
    skipped_queries: int

    def get(self, metric: str, cutoff) -> ClassAggregate:
        return self.values[metric][str(cutoff)]

    def to_json_dict(self) -> dict:
        out: dict = {}
        for metric, by_cutoff in self.values.items():
            out[metric] = {
                cutoff: {
                    "mean": agg.mean,
                    "std_classes": agg.std_classes,
                    "per_class": dict(sorted(agg.per_class.items())),
                }
                for cutoff, agg in by_cutoff.items()
            }
        out["skipped_queries"] = self.skipped_queries
        return out

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json_dict(), f, indent=2, sort_keys=True)
            f.write("\n")

    def write_csv(self, path) -> None:
        """Metric x cutoff grid with mean +/- std cells."""
        cutoffs: list[str] = []
        for by_cutoff in self.values.values():
            for c in by_cutoff:
                if c not in cutoffs:
                    cutoffs.append(c)
        with open(path, "w", encoding="utf-8", newline="") as f:
            w = csv.writer(f)
            w.writerow(["metric"] + [f"@{c}" for c in cutoffs])
            for metric in self.values:
                row = [metric]
                for c in cutoffs:
                    agg = self.values[metric].get(c)
                    row.append("" if agg is None else f"{agg.mean:.4f} ± {agg.std_classes:.4f}")
                w.writerow(row)


def judge(
    query_ids: Iterable[str],
    query_label_of: Mapping[str, object],
    index_label_of: Mapping[str, object],
) -> RelevanceJudgments:
    """Relevant index set per query: index ads sharing the query's vendor.

    The query itself never counts as its own relevant doc (search results
    exclude self-hits, so R must too). Queries whose vendor has no other
    indexed ad (R = 0) are excluded and reported in ``skipped``.
    """
    by_vendor: dict[object, set[str]] = {}
    for doc_id, vendor in index_label_of.items():
        by_vendor.setdefault(vendor, set()).add(doc_id)
    relevant_of: dict[str, frozenset[str]] = {}
    r_of: dict[str, int] = {}
    skipped: list[str] = []
    for qid in query_ids:
        if qid not in query_label_of or query_label_of[qid] is None:
            raise ValueError(f"query {qid!r} has no vendor label")
        relevant = by_vendor.get(query_label_of[qid], set()) - {qid}
        if relevant:
            relevant_of[qid] = frozenset(relevant)
            r_of[qid] = len(relevant)
        else:
            skipped.append(qid)
    return RelevanceJudgments(relevant_of, r_of, tuple(skipped))


def _query_scores(ranking: Sequence[str], relevant: frozenset[str], r: int, cutoffs):
    """All per-query metric values for one ranked list."""
    rel_flags = [doc in relevant for doc in ranking]
    hits_prefix = [0]
    for flag in rel_flags:
        hits_prefix.append(hits_prefix[-1] + (1 if flag else 0))

    def hits_at(k: int) -> int:
        return hits_prefix[min(k, len(ranking))]

    out: dict[str, dict[str, float]] = {m: {} for m in METRIC_NAMES}
    for k in cutoffs:
        out["precision"][str(k)] = hits_at(k) / k
        out["recall"][str(k)] = hits_at(k) / r
        ap_sum = 0.0
        for rank in range(1, min(k, len(ranking)) + 1):
            if rel_flags[rank - 1]:
                ap_sum += hits_prefix[rank] / rank
        out["map"][str(k)] = ap_sum / min(r, k)
        rr = 0.0
        for rank in range(1, min(k, len(ranking)) + 1):
            if rel_flags[rank - 1]:
                rr = 1.0 / rank
                break
        out["mrr"][str(k)] = rr
    rprec = hits_at(r) / r
    out["r_precision"]["X"] = rprec
    out["macro_f1"]["X"] = rprec  # precision == recall == F1 at cutoff X = R
    return out


def evaluate(
    run: RetrievalRun, judgments: RelevanceJudgments, cutoffs: Sequence[int]
) -> MetricReport:
    """Evaluate a run against judgments at the given cutoffs.

    Queries present in the judgments but absent from the run count as empty
    rankings; skipped (R = 0) queries never enter any average.
    """
    cutoffs = list(cutoffs)
    if not cutoffs or any(k < 1 for k in cutoffs):
        raise ValueError("cutoffs must be >= 1")
    per_query: dict[str, dict[str, dict[str, float]]] = {}
    for qid, relevant in judgments.relevant_of.items():
        ranking = list(run.get(qid, ()))
        per_query[qid] = _query_scores(ranking, relevant, judgments.r_of[qid], cutoffs)
    if not per_query:
        raise ValueError("no evaluable queries (all skipped or judgments empty)")

    values: dict[str, dict[str, ClassAggregate]] = {m: {} for m in METRIC_NAMES}
    class_of = {qid: _class_key(judgments.relevant_of[qid]) for qid in per_query}
    for metric in METRIC_NAMES:
        for cutoff in per_query[next(iter(per_query))][metric]:
            scores = {qid: per_query[qid][metric][cutoff] for qid in per_query}
            mean, std, per_class = aggregate_by_class(scores, class_of)
            if metric == "macro_f1":
                mean = sum(per_class.values()) / len(per_class)
            values[metric][cutoff] = ClassAggregate(mean, std, per_class)
    return MetricReport(values=values, skipped_queries=len(judgments.skipped))


def _class_key(relevant: frozenset[str]) -> str:
    # The relevant set determines the vendor class; its sorted ids form a
    # stable key even when callers do not pass vendor labels around.
    return min(relevant)


def evaluate_labeled(
    run: RetrievalRun,
    judgments: RelevanceJudgments,
    cutoffs: Sequence[int],
    class_of: Mapping[str, object],
) -> MetricReport:
    """Like ``evaluate`` but grouping classes by an explicit query -> vendor map."""
    cutoffs = list(cutoffs)
    if not cutoffs or any(k < 1 for k in cutoffs):
        raise ValueError("cutoffs must be >= 1")
    per_query = {}
    for qid, relevant in judgments.relevant_of.items():
        ranking = list(run.get(qid, ()))
        per_query[qid] = _query_scores(ranking, relevant, judgments.r_of[qid], cutoffs)
    if not per_query:
        raise ValueError("no evaluable queries (all skipped or judgments empty)")
    classes = {qid: str(class_of[qid]) for qid in per_query}
    values: dict[str, dict[str, ClassAggregate]] = {m: {} for m in METRIC_NAMES}
    for metric in METRIC_NAMES:
        for cutoff in per_query[next(iter(per_query))][metric]:
            scores = {qid: per_query[qid][metric][cutoff] for qid in per_query}
            mean, std, per_class = aggregate_by_class(scores, classes)
            if metric == "macro_f1":
                mean = sum(per_class.values()) / len(per_class)
            values[metric][cutoff] = ClassAggregate(mean, std, per_class)
    return MetricReport(values=values, skipped_queries=len(judgments.skipped))


def aggregate_by_class(
    per_query: Mapping[str, float], class_of: Mapping[str, object]
) -> tuple[float, float, dict[str, float]]:
    """Mean over queries, population std across vendor-class means, class means."""
    if not per_query:
        raise ValueError("nothing to aggregate")
    mean = sum(per_query.values()) / len(per_query)
    sums: dict[str, list[float]] = {}
    for qid, value in per_query.items():
        sums.setdefault(str(class_of[qid]), []).append(value)
    per_class = {cls: sum(vals) / len(vals) for cls, vals in sorted(sums.items())}
    cmean = sum(per_class.values()) / len(per_class)
    std = math.sqrt(sum((v - cmean) ** 2 for v in per_class.values()) / len(per_class))
    return mean, std, per_class
