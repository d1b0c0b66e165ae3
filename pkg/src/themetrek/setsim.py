"""Item similarity over crisp theme-tag sets: Jaccard, Dice, and an
IDF-weighted cosine that upweights rare themes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .corpus import SimilarityMatrix, ThemeAnnotationSet, ValidationError

COEFFICIENTS = ("jaccard", "dice", "cosine_idf")


@dataclass
class ItemFeatureSets:
    """Binary theme features per item with corpus-level theme frequencies."""

    per_item: dict[str, set[str]]
    N: int = field(init=False)
    n_w: dict[str, int] = field(init=False)

    def __post_init__(self):
        if not self.per_item:
            raise ValidationError("feature sets need at least one item")
        self.N = len(self.per_item)
        self.n_w = {}
        for themes in self.per_item.values():
            for t in themes:
                self.n_w[t] = self.n_w.get(t, 0) + 1


def build_feature_sets(ann: ThemeAnnotationSet, level_filter: str = "both") -> ItemFeatureSets:
    return ItemFeatureSets({item: ann.themes_for(item, level_filter) for item in ann.per_item})


def jaccard(i: set, j: set) -> float:
    union = len(i | j)
    if union == 0:
        return 0.0
    return len(i & j) / union


def dice(i: set, j: set, verbatim: bool = False) -> float:
    total = len(i) + len(j)
    if total == 0:
        return 0.0
    if verbatim:
        # As printed: caps at 1/4 for identical sets.
        return len(i & j) / (2 * total)
    return 2 * len(i & j) / total


def cosine_idf(i: set, j: set, fs: ItemFeatureSets, verbatim: bool = False) -> float:
    """Cosine over binary theme vectors weighted by N/n_w.

    The default squares the weights in the denominator sums (a proper weighted
    cosine, identity 1). ``verbatim`` keeps the unsquared denominator as
    printed, whose raw value can exceed 1.
    """
    for t in i | j:
        if t not in fs.n_w:
            raise ValidationError(f"unknown theme {t!r} in feature sets")
    if not i or not j:
        return 0.0

    def weight(t):
        return fs.N / fs.n_w[t]

    num = sum(weight(t) ** 2 for t in i & j)
    if verbatim:
        den = math.sqrt(sum(weight(t) for t in i)) * math.sqrt(sum(weight(t) for t in j))
    else:
        den = math.sqrt(sum(weight(t) ** 2 for t in i)) * math.sqrt(
            sum(weight(t) ** 2 for t in j)
        )
    if den == 0.0:
        return 0.0
    value = num / den
    return value if verbatim else min(1.0, max(0.0, value))


def build_set_similarity(
    ann: ThemeAnnotationSet,
    level_filter: str = "both",
    coeff: str = "jaccard",
    verbatim: bool = False,
) -> SimilarityMatrix:
    """All-pairs coefficient over filtered theme sets; empty-set items score 0."""
    coeff = coeff.lower()
    if coeff not in COEFFICIENTS:
        raise ValidationError(f"unknown set coefficient {coeff!r}")
    fs = build_feature_sets(ann, level_filter)
    if all(not s for s in fs.per_item.values()):
        raise ValidationError(f"no items carry {level_filter!r} themes")

    items = sorted(fs.per_item)
    matrix = SimilarityMatrix(items)
    for x in range(len(items)):
        a = fs.per_item[items[x]]
        if not a:
            continue
        for y in range(x + 1, len(items)):
            b = fs.per_item[items[y]]
            if not b:
                continue
            if coeff == "jaccard":
                s = jaccard(a, b)
            elif coeff == "dice":
                s = dice(a, b, verbatim)
            else:
                s = cosine_idf(a, b, fs, verbatim)
            s = min(1.0, max(0.0, s))
            if s > 0.0:
                matrix.set(items[x], items[y], s)
    return matrix
