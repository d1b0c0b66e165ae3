"""Ontology-aware item similarity via soft cardinality.

Set cardinality is softened so that similar-but-distinct themes count as less
than two elements: ||a|| = sum over t of 1/(sum over s of S(t,s)^p). The
intersection cardinality comes from the inclusion-exclusion trick
||a| ∩ b|| = ||a|| + ||b|| - ||a ∪ b||, and items are compared with the cosine
index over these cardinalities. The exponent p tunes softness: near 0 every
pair of themes looks identical, large p recovers crisp set semantics.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .corpus import SimilarityMatrix, ThemeAnnotationSet, ValidationError
from .ontology import (
    MEASURES,
    InformationContentTable,
    Ontology,
    pairwise_similarity_table,
)

# Off-diagonal similarities are kept strictly below 1 so distinct entities can
# never fully alias each other and singleton cardinality stays exactly 1.
OFF_DIAGONAL_CAP = 1.0 - 1e-9


@dataclass(frozen=True)
class SoftSimConfig:
    measure: str
    softness_exponent: float
    level_filter: str = "both"

    def __post_init__(self):
        if self.measure.lower() not in MEASURES:
            raise ValidationError(f"unknown entity-similarity measure {self.measure!r}")
        p = self.softness_exponent
        if not (math.isfinite(p) and p > 0):
            raise ValidationError(f"softness exponent must be finite and > 0, got {p!r}")
        if self.level_filter not in ("central", "peripheral", "both"):
            raise ValidationError(f"unknown level filter {self.level_filter!r}")


def _condition(table: np.ndarray) -> np.ndarray:
    """Force the diagonal to 1 and cap off-diagonal entries below 1."""
    out = np.clip(table, 0.0, OFF_DIAGONAL_CAP)
    np.fill_diagonal(out, 1.0)
    return out


def soft_cardinality_raw(elements, sim, p: float) -> float:
    """Soft cardinality over an explicit similarity callable.

    Reference entry point for any symmetric similarity in [0, 1]; the
    ontology-backed paths below agree with it cell for cell.
    """
    elements = list(elements)
    n = len(elements)
    if n == 0:
        return 0.0
    table = np.empty((n, n))
    for x in range(n):
        for y in range(n):
            table[x, y] = sim(elements[x], elements[y])
    powered = _condition(table) ** p
    return float((1.0 / powered.sum(axis=1)).sum())


class SoftEntityTable:
    """Powered, conditioned entity-pair similarities shared across item pairs."""

    def __init__(
        self,
        onto: Ontology,
        ic: InformationContentTable | None,
        measure: str,
        entities,
        p: float,
    ):
        self.entities = sorted(entities)
        self.index = {e: i for i, e in enumerate(self.entities)}
        table = pairwise_similarity_table(onto, ic, measure, self.entities)
        self.powered = _condition(table) ** p

    def rows_for(self, entity_set) -> np.ndarray:
        try:
            return np.array(sorted(self.index[e] for e in entity_set), dtype=np.intp)
        except KeyError as exc:
            raise ValidationError(f"unknown theme {exc.args[0]!r}") from None

    def cardinality(self, rows: np.ndarray) -> float:
        if rows.size == 0:
            return 0.0
        sub = self.powered[rows][:, rows]
        return float((1.0 / sub.sum(axis=1)).sum())


def _table_for(a, b, onto, ic, cfg: SoftSimConfig) -> SoftEntityTable:
    return SoftEntityTable(
        onto, ic, cfg.measure, set(a) | set(b), cfg.softness_exponent
    )


def soft_cardinality(a, onto: Ontology, ic, cfg: SoftSimConfig) -> float:
    """||a|| in [1, |a|] for non-empty a; empty set reads 0."""
    if not a:
        return 0.0
    table = _table_for(a, set(), onto, ic, cfg)
    return table.cardinality(table.rows_for(a))


def soft_intersection(a, b, onto: Ontology, ic, cfg: SoftSimConfig) -> float:
    table = _table_for(a, b, onto, ic, cfg)
    return _intersection(table, set(a), set(b))


def _intersection(table: SoftEntityTable, a: set, b: set) -> float:
    card_a = table.cardinality(table.rows_for(a))
    card_b = table.cardinality(table.rows_for(b))
    card_union = table.cardinality(table.rows_for(a | b))
    return max(0.0, card_a + card_b - card_union)


def soft_cosine(a, b, onto: Ontology, ic, cfg: SoftSimConfig) -> float:
    if not a or not b:
        return 0.0
    table = _table_for(a, b, onto, ic, cfg)
    return _cosine(table, set(a), set(b))


def _cosine(table: SoftEntityTable, a: set, b: set) -> float:
    if not a or not b:
        return 0.0
    card_a = table.cardinality(table.rows_for(a))
    card_b = table.cardinality(table.rows_for(b))
    card_union = table.cardinality(table.rows_for(a | b))
    inter = max(0.0, card_a + card_b - card_union)
    return min(1.0, max(0.0, inter / math.sqrt(card_a * card_b)))


def build_ontology_similarity(
    ann: ThemeAnnotationSet,
    onto: Ontology,
    ic: InformationContentTable | None,
    cfg: SoftSimConfig,
) -> SimilarityMatrix:
    """All-pairs soft cosine over item theme sets at the configured level."""
    sets = {item: ann.themes_for(item, cfg.level_filter) for item in ann.per_item}
    if all(not s for s in sets.values()):
        raise ValidationError(f"no items carry {cfg.level_filter!r} themes")
    empty = sorted(item for item, s in sets.items() if not s)
    if empty:
        warnings.warn(
            f"{len(empty)} items have no {cfg.level_filter!r} themes and "
            "score 0 against everything",
            stacklevel=2,
        )

    entities = set().union(*sets.values())
    table = SoftEntityTable(onto, ic, cfg.measure, entities, cfg.softness_exponent)

    items = sorted(sets)
    rows = {item: table.rows_for(sets[item]) for item in items}
    cards = {item: table.cardinality(rows[item]) for item in items}

    matrix = SimilarityMatrix(items)
    for x in range(len(items)):
        a = items[x]
        if not sets[a]:
            continue
        for y in range(x + 1, len(items)):
            b = items[y]
            if not sets[b]:
                continue
            union_rows = np.union1d(rows[a], rows[b])
            card_union = table.cardinality(union_rows)
            inter = max(0.0, cards[a] + cards[b] - card_union)
            s = min(1.0, max(0.0, inter / math.sqrt(cards[a] * cards[b])))
            if s > 0.0:
                matrix.set(a, b, s)
    return matrix
