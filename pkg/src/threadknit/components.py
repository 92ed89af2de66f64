"""Connected-component counting and per-subject aggregation.

The headline statistic is the ratio beta = (number of weakly connected
components) / (number of strongly connected components).  Beta is computed
from counts that were first averaged over iterations and rounded to whole
components; the division happens after rounding.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from fractions import Fraction
from math import fsum
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataError, DegeneracyError
from .graph import ConversationGraph


def strong_components(graph: ConversationGraph) -> list[frozenset[str]]:
    """Strongly connected components via Tarjan's algorithm (iterative).

    Every node belongs to exactly one component; a single node with no
    cycle through it forms its own component.  Components come out in
    reverse topological order of the condensation, deterministically for a
    given graph.
    """
    order = sorted(graph.nodes)
    adjacency = graph.successors()
    counter = 0
    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    stack: list[str] = []
    on_stack: set[str] = set()
    components: list[frozenset[str]] = []

    for root in order:
        if root in index:
            continue
        work: list[tuple[str, Iterable[str]]] = [(root, iter(adjacency[root]))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, children = work[-1]
            descended = False
            for child in children:
                if child not in index:
                    index[child] = lowlink[child] = counter
                    counter += 1
                    stack.append(child)
                    on_stack.add(child)
                    work.append((child, iter(adjacency[child])))
                    descended = True
                    break
                if child in on_stack:
                    lowlink[node] = min(lowlink[node], index[child])
            if descended:
                continue
            work.pop()
            if lowlink[node] == index[node]:
                members = set()
                while True:
                    top = stack.pop()
                    on_stack.discard(top)
                    members.add(top)
                    if top == node:
                        break
                components.append(frozenset(members))
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
    return components


class _UnionFind:
    """Disjoint sets with path compression and union by size."""

    def __init__(self, items: Iterable[str]):
        self.parent = {item: item for item in items}
        self.size = {item: 1 for item in self.parent}

    def find(self, item: str) -> str:
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


def weak_components(graph: ConversationGraph) -> list[frozenset[str]]:
    """Weakly connected components (edge direction ignored), via union-find.

    Returned in order of each component's smallest node.
    """
    uf = _UnionFind(graph.nodes)
    for edge in graph.edges:
        uf.union(edge.source, edge.target)
    groups: dict[str, set[str]] = {}
    for node in graph.nodes:
        groups.setdefault(uf.find(node), set()).add(node)
    return [frozenset(members) for members in sorted(groups.values(), key=min)]


@dataclass(frozen=True)
class ComponentSummary:
    """Component counts for one iteration's graph."""

    strong_count: int
    weak_count: int

    def __post_init__(self) -> None:
        if self.weak_count < 0 or self.strong_count < self.weak_count:
            raise ValueError(
                f"impossible counts: strong={self.strong_count} weak={self.weak_count}"
            )
        if (self.strong_count == 0) != (self.weak_count == 0):
            raise ValueError("counts must be zero together (empty graph) or both positive")


def component_summary(graph: ConversationGraph) -> ComponentSummary:
    """Count both kinds of component for one graph."""
    return ComponentSummary(
        strong_count=len(strong_components(graph)),
        weak_count=len(weak_components(graph)),
    )


def round_half_away(value: float | Fraction | int) -> int:
    """Round to the nearest integer, halves away from zero.

    Exact: the tie rule is applied to the true rational value, not to a
    float approximation of it.
    """
    q = Fraction(value)
    if q < 0:
        return -round_half_away(-q)
    return (2 * q.numerator + q.denominator) // (2 * q.denominator)


def beta_ratio(strong_count: int, weak_count: int) -> float:
    """Beta is weak divided by strong: weak_count / strong_count.

    Note the orientation: the numerator is the *weak* count.  Undefined
    when there are no strong components.
    """
    if strong_count < 0 or weak_count < 0:
        raise ValueError("component counts must be nonnegative")
    if strong_count == 0:
        raise DegeneracyError("beta undefined: no strong components")
    return weak_count / strong_count


def average_count(counts: Sequence[int]) -> int:
    """Mean of per-iteration counts, rounded half away from zero, exactly."""
    if not counts:
        raise DegeneracyError("no iteration counts to average")
    return round_half_away(Fraction(sum(counts), len(counts)))


@dataclass(frozen=True)
class SubjectSummary:
    """One subject's averaged counts, beta ratio, and mean sentiment."""

    subject: str
    strong_count: int
    weak_count: int
    beta: float
    alpha: float


def summarize_subject(
    subject: str,
    summaries: Sequence[ComponentSummary],
    alphas: Sequence[float],
) -> SubjectSummary:
    """Aggregate per-iteration component counts and sentiment means.

    Counts are averaged and rounded to whole components before the beta
    division; the sentiment mean is aggregated unrounded.
    """
    if not summaries or not alphas:
        raise DegeneracyError(f"subject {subject!r}: nothing to summarize")
    if len(summaries) != len(alphas):
        raise ValueError(
            f"subject {subject!r}: {len(summaries)} component summaries "
            f"vs {len(alphas)} sentiment values"
        )
    strong = average_count([s.strong_count for s in summaries])
    weak = average_count([s.weak_count for s in summaries])
    return SubjectSummary(
        subject=subject,
        strong_count=strong,
        weak_count=weak,
        beta=beta_ratio(strong, weak),
        alpha=fsum(alphas) / len(alphas),
    )


TABLE_COLUMNS = ("subject", "strong_count", "weak_count", "ratio_beta", "sentiment_alpha")


def write_subject_table_csv(rows: Sequence[SubjectSummary], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(TABLE_COLUMNS)
        for row in rows:
            writer.writerow(
                [row.subject, row.strong_count, row.weak_count, repr(row.beta), repr(row.alpha)]
            )
    return path


def write_subject_table_json(rows: Sequence[SubjectSummary], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = [
        {
            "subject": row.subject,
            "strong_count": row.strong_count,
            "weak_count": row.weak_count,
            "ratio_beta": row.beta,
            "sentiment_alpha": row.alpha,
        }
        for row in rows
    ]
    path.write_text(
        json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return path


def read_subject_table_csv(path: str | Path) -> list[SubjectSummary]:
    """Read a subject table back; inverse of write_subject_table_csv."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8", newline="") as handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames is None or tuple(reader.fieldnames) != TABLE_COLUMNS:
                raise DataError(
                    f"{path}: expected columns {', '.join(TABLE_COLUMNS)}, "
                    f"got {reader.fieldnames}"
                )
            rows = []
            for lineno, record in enumerate(reader, start=2):
                try:
                    rows.append(
                        SubjectSummary(
                            subject=record["subject"],
                            strong_count=int(record["strong_count"]),
                            weak_count=int(record["weak_count"]),
                            beta=float(record["ratio_beta"]),
                            alpha=float(record["sentiment_alpha"]),
                        )
                    )
                except (TypeError, ValueError) as err:
                    raise DataError(f"{path}:{lineno}: {err}") from err
    except OSError as err:
        raise DataError(f"cannot read table {path}: {err}") from err
    if not rows:
        raise DataError(f"{path}: table has no rows")
    return rows
