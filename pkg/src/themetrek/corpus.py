"""Data model and file formats: ratings, catalog, theme annotations, transcripts,
and item-item similarity matrices.

All loaders return immutable-by-convention structures that are safe to share
across threads. Interchange formats are UTF-8 with LF line endings; the tabular
formats carry a header row, the similarity exchange format does not (one
``item<TAB>item<TAB>score`` triple per line).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

LEVELS = ("central", "peripheral")

RATING_MIN = 1.0
RATING_MAX = 10.0


class ValidationError(ValueError):
    """Input data violates a documented invariant (bad value, duplicate, unknown id)."""


@dataclass
class RatingsDataset:
    """Sparse (user, item, rating) triples with user-major and item-major indexes."""

    triples: list[tuple[str, str, float]]
    by_user: dict[str, list[int]] = field(default_factory=dict)
    by_item: dict[str, list[int]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.by_user and not self.by_item:
            self._reindex()
        self._validate()

    def _reindex(self):
        self.by_user = {}
        self.by_item = {}
        for pos, (user, item, _) in enumerate(self.triples):
            self.by_user.setdefault(user, []).append(pos)
            self.by_item.setdefault(item, []).append(pos)

    def _validate(self):
        seen = set()
        for user, item, rating in self.triples:
            if not (RATING_MIN <= rating <= RATING_MAX):
                raise ValidationError(
                    f"rating {rating!r} for ({user!r}, {item!r}) outside "
                    f"[{RATING_MIN:g}, {RATING_MAX:g}]"
                )
            if (user, item) in seen:
                raise ValidationError(f"duplicate rating for ({user!r}, {item!r})")
            seen.add((user, item))

    def __len__(self) -> int:
        return len(self.triples)

    @property
    def users(self) -> list[str]:
        return list(self.by_user)

    @property
    def items(self) -> list[str]:
        return list(self.by_item)

    def mean_rating(self) -> float:
        if not self.triples:
            raise ValidationError("empty ratings dataset has no mean")
        return sum(r for _, _, r in self.triples) / len(self.triples)

    def user_ratings(self, user: str) -> list[tuple[str, float]]:
        """(item, rating) pairs for one user; empty list for unknown users."""
        return [
            (self.triples[p][1], self.triples[p][2])
            for p in self.by_user.get(user, ())
        ]

    def item_ratings(self, item: str) -> list[tuple[str, float]]:
        """(user, rating) pairs for one item; empty list for unknown items."""
        return [
            (self.triples[p][0], self.triples[p][2])
            for p in self.by_item.get(item, ())
        ]

    def subset(self, positions: list[int]) -> "RatingsDataset":
        return RatingsDataset([self.triples[p] for p in positions])


@dataclass(frozen=True)
class CatalogEntry:
    item_id: str
    title: str
    series: str
    season: int
    episode: int


@dataclass
class ItemCatalog:
    entries: list[CatalogEntry]

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            if e.item_id in seen:
                raise ValidationError(f"duplicate item_id {e.item_id!r} in catalog")
            if not e.title:
                raise ValidationError(f"empty title for item {e.item_id!r}")
            seen.add(e.item_id)
        self._by_id = {e.item_id: e for e in self.entries}

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, item_id: str) -> bool:
        return item_id in self._by_id

    def get(self, item_id: str) -> CatalogEntry:
        return self._by_id[item_id]

    @property
    def item_ids(self) -> list[str]:
        return [e.item_id for e in self.entries]


@dataclass
class ThemeAnnotationSet:
    """item_id -> set of (theme_name, level) pairs, level in {central, peripheral}."""

    per_item: dict[str, set[tuple[str, str]]]

    def __post_init__(self):
        for item, pairs in self.per_item.items():
            for theme, level in pairs:
                if level not in LEVELS:
                    raise ValidationError(
                        f"unknown level {level!r} for ({item!r}, {theme!r})"
                    )

    def __len__(self) -> int:
        return len(self.per_item)

    def themes_for(self, item_id: str, level: str = "both") -> set[str]:
        """The item's theme names at one level, or the union for level='both'."""
        pairs = self.per_item.get(item_id, set())
        if level == "both":
            return {t for t, _ in pairs}
        if level not in LEVELS:
            raise ValidationError(f"unknown level filter {level!r}")
        return {t for t, lv in pairs if lv == level}

    def filtered(self, level: str) -> dict[str, set[str]]:
        """item_id -> theme-name set at the requested level (items may map to empty sets)."""
        return {item: self.themes_for(item, level) for item in self.per_item}

    def all_theme_names(self) -> set[str]:
        names: set[str] = set()
        for pairs in self.per_item.values():
            names.update(t for t, _ in pairs)
        return names

    def validate_themes(self, known_themes) -> None:
        """Raise listing every theme name that does not resolve."""
        offenders = sorted(t for t in self.all_theme_names() if t not in known_themes)
        if offenders:
            raise ValidationError(
                "unknown themes in annotations: " + ", ".join(repr(t) for t in offenders)
            )

    def central_counts_by_series(self, catalog: ItemCatalog) -> dict[str, list[int]]:
        """Per-series list of central-theme counts, one entry per annotated item."""
        out: dict[str, list[int]] = {}
        for item in self.per_item:
            series = catalog.get(item).series
            out.setdefault(series, []).append(len(self.themes_for(item, "central")))
        return out


@dataclass
class TranscriptCorpus:
    per_item: dict[str, str]

    def __post_init__(self):
        for item, text in self.per_item.items():
            if not item:
                raise ValidationError("empty item_id in transcript corpus")
            if not text:
                raise ValidationError(f"empty transcript for item {item!r}")

    def __len__(self) -> int:
        return len(self.per_item)


class SimilarityMatrix:
    """Symmetric sparse item-item score table over [0, 1].

    Scores are stored once per unordered pair under the lexically smaller-first
    key. ``get(i, i)`` is 1.0 for every known item; unstored pairs read 0.
    """

    def __init__(self, item_ids, scores: dict[tuple[str, str], float] | None = None):
        self.item_ids = list(dict.fromkeys(item_ids))
        self._known = set(self.item_ids)
        self.scores: dict[tuple[str, str], float] = {}
        if scores:
            for (a, b), s in scores.items():
                self.set(a, b, s)

    @staticmethod
    def _key(a: str, b: str) -> tuple[str, str]:
        return (a, b) if a <= b else (b, a)

    def set(self, a: str, b: str, score: float) -> None:
        if not (0.0 <= score <= 1.0):
            raise ValidationError(f"similarity {score!r} for ({a!r}, {b!r}) outside [0, 1]")
        for x in (a, b):
            if x not in self._known:
                self._known.add(x)
                self.item_ids.append(x)
        if a == b:
            if score != 1.0:
                raise ValidationError(f"self-similarity for {a!r} must be 1, got {score!r}")
            return
        self.scores[self._key(a, b)] = score

    def get(self, a: str, b: str) -> float:
        if a == b:
            return 1.0 if a in self._known else 0.0
        return self.scores.get(self._key(a, b), 0.0)

    def neighbors(self, item: str):
        """Yield (other_item, score) for every stored pair involving ``item``."""
        for (a, b), s in self.scores.items():
            if a == item:
                yield b, s
            elif b == item:
                yield a, s

    def __len__(self) -> int:
        return len(self.item_ids)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimilarityMatrix):
            return NotImplemented
        return set(self.item_ids) == set(other.item_ids) and self.scores == other.scores


def _read_lines(path) -> list[str]:
    text = Path(path).read_text(encoding="utf-8")
    return text.split("\n")


def load_ratings(path) -> RatingsDataset:
    """Read a ratings CSV with header ``user_id,item_id,rating``."""
    lines = _read_lines(path)
    if not lines or lines[0].strip() != "user_id,item_id,rating":
        raise ValidationError(f"{path}: expected header 'user_id,item_id,rating'")
    triples: list[tuple[str, str, float]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ValidationError(f"{path}:{lineno}: malformed row {line!r}")
        user, item, raw = (p.strip() for p in parts)
        try:
            rating = float(raw)
        except ValueError:
            raise ValidationError(f"{path}:{lineno}: unparseable rating {raw!r}") from None
        if not math.isfinite(rating):
            raise ValidationError(f"{path}:{lineno}: non-finite rating {raw!r}")
        triples.append((user, item, rating))
    return RatingsDataset(triples)


def write_ratings(dataset: RatingsDataset, path) -> None:
    lines = ["user_id,item_id,rating"]
    lines += [f"{u},{i},{r!r}" for u, i, r in dataset.triples]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_catalog(path) -> ItemCatalog:
    """Read an item catalog CSV with header ``item_id,title,series,season,episode``."""
    lines = _read_lines(path)
    if not lines or lines[0].strip() != "item_id,title,series,season,episode":
        raise ValidationError(f"{path}: expected header 'item_id,title,series,season,episode'")
    entries = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise ValidationError(f"{path}:{lineno}: malformed row {line!r}")
        item_id, title, series, season, episode = (p.strip() for p in parts)
        try:
            entries.append(CatalogEntry(item_id, title, series, int(season), int(episode)))
        except ValueError:
            raise ValidationError(f"{path}:{lineno}: bad season/episode in {line!r}") from None
    return ItemCatalog(entries)


def write_catalog(catalog: ItemCatalog, path) -> None:
    lines = ["item_id,title,series,season,episode"]
    lines += [f"{e.item_id},{e.title},{e.series},{e.season},{e.episode}" for e in catalog.entries]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_annotations(path, catalog: ItemCatalog) -> ThemeAnnotationSet:
    """Read a theme-annotation TSV with header ``item_id<TAB>level<TAB>theme_name``."""
    lines = _read_lines(path)
    if not lines or lines[0].strip() != "item_id\tlevel\ttheme_name":
        raise ValidationError(f"{path}: expected header 'item_id<TAB>level<TAB>theme_name'")
    per_item: dict[str, set[tuple[str, str]]] = {}
    unknown_items = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValidationError(f"{path}:{lineno}: malformed row {line!r}")
        item_id, level, theme = (p.strip() for p in parts)
        if level not in LEVELS:
            raise ValidationError(f"{path}:{lineno}: unknown level token {level!r}")
        if item_id not in catalog:
            unknown_items.add(item_id)
            continue
        pairs = per_item.setdefault(item_id, set())
        if (theme, level) in pairs:
            raise ValidationError(f"{path}:{lineno}: duplicate annotation ({item_id!r}, {theme!r}, {level!r})")
        pairs.add((theme, level))
    if unknown_items:
        raise ValidationError(
            "annotations reference unknown items: " + ", ".join(sorted(unknown_items))
        )
    return ThemeAnnotationSet(per_item)


def write_annotations(ann: ThemeAnnotationSet, path) -> None:
    lines = ["item_id\tlevel\ttheme_name"]
    for item in sorted(ann.per_item):
        for theme, level in sorted(ann.per_item[item], key=lambda p: (p[1], p[0])):
            lines.append(f"{item}\t{level}\t{theme}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_transcripts(directory) -> TranscriptCorpus:
    """Read every ``<item_id>.txt`` under a directory into a corpus."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"transcript directory not found: {directory}")
    per_item: dict[str, str] = {}
    for path in sorted(directory.glob("*.txt")):
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise OSError(f"unreadable transcript {path}: {exc}") from exc
        if not text.strip():
            raise ValidationError(f"empty transcript file {path}")
        per_item[path.stem] = text
    if not per_item:
        raise ValidationError(f"no .txt transcripts found under {directory}")
    return TranscriptCorpus(per_item)


def write_transcripts(corpus: TranscriptCorpus, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for item, text in corpus.per_item.items():
        (directory / f"{item}.txt").write_text(text, encoding="utf-8")


def export_similarity(matrix: SimilarityMatrix, path) -> None:
    """Write ``item_i<TAB>item_j<TAB>score`` lines, i < j lexically, positive scores only."""
    lines = []
    for (a, b) in sorted(matrix.scores):
        s = matrix.scores[(a, b)]
        if s > 0.0:
            lines.append(f"{a}\t{b}\t{s!r}")
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def import_similarity(path) -> SimilarityMatrix:
    """Read the exchange format back; item ids are the union of mentioned ids."""
    matrix = SimilarityMatrix([])
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        if lineno == 1 and line.startswith("item_i\t"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValidationError(f"{path}:{lineno}: malformed row {line!r}")
        a, b, raw = parts
        try:
            score = float(raw)
        except ValueError:
            raise ValidationError(f"{path}:{lineno}: unparseable score {raw!r}") from None
        if not (0.0 <= score <= 1.0):
            raise ValidationError(f"{path}:{lineno}: score {score!r} outside [0, 1]")
        matrix.set(a, b, score)
    return matrix
