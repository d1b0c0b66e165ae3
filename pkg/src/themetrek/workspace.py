"""Workspace configuration, lazy corpus loading, and cached similarity builds.

A workspace is a directory with a ``themetrek.cfg`` key=value file naming the
five input artifacts (ontology, catalog, annotations, ratings, transcripts)
plus an optional stop-word list and a cache directory. Similarity matrices
are expensive to build, so each one is written to the cache in the exchange
format next to a sidecar hash of its inputs; a cache entry is reused only
while that hash still matches.
"""

from __future__ import annotations

import hashlib
import os
import threading
from dataclasses import dataclass
from pathlib import Path

from .corpus import (
    ItemCatalog,
    RatingsDataset,
    SimilarityMatrix,
    ThemeAnnotationSet,
    TranscriptCorpus,
    ValidationError,
    export_similarity,
    import_similarity,
    load_annotations,
    load_catalog,
    load_ratings,
    load_transcripts,
)
from .ontology import (
    IC_MEASURES,
    MEASURES as ONTOLOGY_MEASURES,
    InformationContentTable,
    Ontology,
    compute_ic,
    load_ontology,
)
from .recsys import (
    BiasedMFPredictor,
    GlobalAverageBaseline,
    ItemAverageBaseline,
    ItemKnnPredictor,
    RandomBaseline,
    SlopeOnePredictor,
    UserAverageBaseline,
    UserItemBaseline,
    UserKnnPredictor,
    cf_item_similarity,
)
from .setsim import build_feature_sets, cosine_idf, dice, jaccard
from .softsim import SoftSimConfig, build_ontology_similarity
from .textsim import build_text_similarity, load_stopwords

CONFIG_NAME = "themetrek.cfg"
ENV_WORKSPACE = "THEMETREK_WORKSPACE"
CACHE_FORMAT_VERSION = "1"

TEXT_MEASURES = ("tfidf", "lsi")
SET_MEASURES = ("jaccard", "dice", "cosidf")
MEASURE_ALIASES = {"cosine": "cosidf"}
CF_SHRINKAGE = 10.0
DEFAULT_SOFTNESS = 2.0
LEVELS = ("central", "peripheral", "both")

ALL_MEASURE_TOKENS = (
    "tfidf", "lsi:<p>", *SET_MEASURES, *ONTOLOGY_MEASURES, "cf",
)


class UnknownItemError(KeyError):
    """Raised when a query names an item absent from the catalog."""


@dataclass(frozen=True)
class MeasureSpec:
    """One fully resolved similarity backend choice."""

    family: str  # text | set | ontology | cf
    name: str
    p: float | None = None
    level: str = "both"

    @property
    def slug(self) -> str:
        parts = [self.name]
        if self.name == "lsi":
            parts.append(str(int(self.p)))
        elif self.family == "ontology":
            parts.append(f"p{self.p:g}")
        if self.family in ("set", "ontology"):
            parts.append(self.level)
        return "-".join(parts)

    @property
    def token(self) -> str:
        return f"lsi:{int(self.p)}" if self.name == "lsi" else self.name


def parse_measure(token: str, p: float | None = None, level: str | None = None) -> MeasureSpec:
    """Resolve a measure token plus optional p/level flags into a MeasureSpec.

    ``lsi`` embeds its rank as ``lsi:40`` (or ``lsi-40``); the ontology
    measures take a softness exponent via ``p``. A ``p`` for a measure that
    has no such parameter is rejected rather than ignored.
    """
    raw = token.strip().lower()
    name, embedded = raw, None
    for sep in (":", "-"):
        if sep in raw:
            head, tail = raw.split(sep, 1)
            if head == "lsi":
                name, embedded = head, tail
                break
    name = MEASURE_ALIASES.get(name, name)
    if level is not None and level not in LEVELS:
        raise ValidationError(f"unknown level {level!r}; expected one of {LEVELS}")

    if name == "lsi":
        if embedded is not None:
            if p is not None and str(p) != embedded and f"{p:g}" != embedded:
                raise ValidationError(
                    f"conflicting LSI ranks: token says {embedded!r}, p says {p!r}"
                )
            p = embedded
        if p is None:
            raise ValidationError("lsi needs a rank, e.g. lsi:40")
        try:
            rank = int(p)
        except (TypeError, ValueError):
            raise ValidationError(f"LSI rank must be an integer, got {p!r}") from None
        if rank < 1:
            raise ValidationError(f"LSI rank must be >= 1, got {rank}")
        return MeasureSpec("text", "lsi", float(rank), "both")

    if name == "tfidf":
        if p is not None:
            raise ValidationError("tfidf takes no p parameter")
        return MeasureSpec("text", "tfidf", None, "both")

    if name == "cf":
        if p is not None:
            raise ValidationError("cf takes no p parameter")
        return MeasureSpec("cf", "cf", None, "both")

    if name in SET_MEASURES:
        if p is not None:
            raise ValidationError(f"{name} takes no p parameter")
        return MeasureSpec("set", name, None, level or "both")

    if name in ONTOLOGY_MEASURES:
        softness = DEFAULT_SOFTNESS if p is None else float(p)
        if not softness > 0:
            raise ValidationError(f"softness exponent must be > 0, got {softness!r}")
        return MeasureSpec("ontology", name, softness, level or "both")

    raise ValidationError(
        f"unknown measure {token!r}; expected one of {', '.join(ALL_MEASURE_TOKENS)}"
    )


@dataclass
class RecommendationEntry:
    item_id: str
    title: str
    series: str
    score: float
    shared_themes: list[str]


@dataclass
class RecommendationResult:
    query_item: str
    measure: MeasureSpec
    level: str
    entries: list[RecommendationEntry]


def load_config(path) -> dict[str, Path]:
    """Parse a key=value config file; relative paths resolve against its directory."""
    cfg_path = Path(path)
    if cfg_path.is_dir():
        cfg_path = cfg_path / CONFIG_NAME
    if not cfg_path.is_file():
        raise FileNotFoundError(f"workspace config not found: {cfg_path}")
    known = {"ontology", "catalog", "annotations", "ratings", "transcripts",
             "stopwords", "cache"}
    required = known - {"stopwords", "cache"}
    values: dict[str, Path] = {}
    for lineno, line in enumerate(cfg_path.read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValidationError(f"{cfg_path}:{lineno}: expected key = value")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key not in known:
            raise ValidationError(f"{cfg_path}:{lineno}: unknown configuration key {key!r}")
        if not value:
            raise ValidationError(f"{cfg_path}:{lineno}: empty value for {key!r}")
        values[key] = (cfg_path.parent / value).resolve()
    missing = sorted(required - set(values))
    if missing:
        raise ValidationError(f"{cfg_path}: missing configuration keys: {', '.join(missing)}")
    values.setdefault("cache", (cfg_path.parent / "cache").resolve())
    return values


class Workspace:
    """Immutable corpus views plus a similarity-matrix cache.

    Loading is lazy per artifact; ``load_all`` forces everything and returns
    the counts used by the ingest report. All similarity access goes through
    ``similarity``, which consults the in-memory memo, then the disk cache,
    then builds from scratch.
    """

    def __init__(self, paths: dict[str, Path]):
        self.paths = dict(paths)
        self._lock = threading.Lock()
        self._memo: dict[str, SimilarityMatrix] = {}
        self._predictors: dict[str, object] = {}
        self._ontology: Ontology | None = None
        self._catalog: ItemCatalog | None = None
        self._annotations: ThemeAnnotationSet | None = None
        self._ratings: RatingsDataset | None = None
        self._transcripts: TranscriptCorpus | None = None
        self._stopwords: frozenset[str] | None = None
        self._ic: InformationContentTable | None = None

    @classmethod
    def open(cls, path=None) -> "Workspace":
        """Open from an explicit path, $THEMETREK_WORKSPACE, or the cwd."""
        if path is None:
            path = os.environ.get(ENV_WORKSPACE) or "."
        return cls(load_config(path))

    def _check_exists(self, key: str) -> Path:
        path = self.paths[key]
        if not path.exists():
            raise FileNotFoundError(f"{key} path does not exist: {path}")
        return path

    @property
    def ontology(self) -> Ontology:
        if self._ontology is None:
            self._ontology = load_ontology(self._check_exists("ontology"))
        return self._ontology

    @property
    def catalog(self) -> ItemCatalog:
        if self._catalog is None:
            self._catalog = load_catalog(self._check_exists("catalog"))
        return self._catalog

    @property
    def annotations(self) -> ThemeAnnotationSet:
        if self._annotations is None:
            ann = load_annotations(self._check_exists("annotations"), self.catalog)
            ann.validate_themes(self.ontology.entities)
            self._annotations = ann
        return self._annotations

    @property
    def ratings(self) -> RatingsDataset:
        if self._ratings is None:
            self._ratings = load_ratings(self._check_exists("ratings"))
        return self._ratings

    @property
    def transcripts(self) -> TranscriptCorpus:
        if self._transcripts is None:
            self._transcripts = load_transcripts(self._check_exists("transcripts"))
        return self._transcripts

    @property
    def stopwords(self) -> frozenset[str]:
        if self._stopwords is None:
            path = self.paths.get("stopwords")
            if path is not None:
                self._check_exists("stopwords")
            self._stopwords = load_stopwords(path)
        return self._stopwords

    @property
    def ic_table(self) -> InformationContentTable:
        if self._ic is None:
            self._ic = compute_ic(self.ontology, self.annotations)
        return self._ic

    def load_all(self) -> dict[str, int]:
        """Force every loader; the returned counts back the ingest report."""
        return {
            "themes": self.ontology.theme_count,
            "items": len(self.catalog),
            "annotated_items": len(self.annotations),
            "ratings": len(self.ratings),
            "users": len(self.ratings.by_user),
            "rated_items": len(self.ratings.by_item),
            "transcripts": len(self.transcripts.per_item),
        }

    # -- similarity cache ---------------------------------------------------

    def _input_digest(self, spec: MeasureSpec) -> str:
        h = hashlib.sha256()
        h.update(f"v{CACHE_FORMAT_VERSION}|{spec.slug}|".encode())

        def feed(path: Path) -> None:
            h.update(path.name.encode())
            h.update(path.read_bytes())

        if spec.family == "text":
            directory = self._check_exists("transcripts")
            for file in sorted(directory.iterdir()):
                if file.is_file():
                    feed(file)
            stop = self.paths.get("stopwords")
            if stop is not None:
                feed(stop)
        elif spec.family in ("set", "ontology"):
            feed(self._check_exists("annotations"))
            feed(self._check_exists("ontology"))
        elif spec.family == "cf":
            feed(self._check_exists("ratings"))
        return h.hexdigest()

    def _build(self, spec: MeasureSpec) -> SimilarityMatrix:
        if spec.family == "text":
            p = None if spec.p is None else int(spec.p)
            return build_text_similarity(
                self.transcripts, backend=spec.name, p=p, stopwords=self.stopwords
            )
        if spec.family == "set":
            return self._build_set_matrix(spec)
        if spec.family == "ontology":
            ic = self.ic_table if spec.name in IC_MEASURES else None
            cfg = SoftSimConfig(
                measure=spec.name, softness_exponent=spec.p, level_filter=spec.level
            )
            return build_ontology_similarity(self.annotations, self.ontology, ic, cfg)
        if spec.family == "cf":
            return cf_item_similarity(self.ratings, CF_SHRINKAGE)
        raise ValidationError(f"unknown measure family {spec.family!r}")

    def _build_set_matrix(self, spec: MeasureSpec) -> SimilarityMatrix:
        ann = self.annotations
        fs = build_feature_sets(ann, level_filter=spec.level)
        items = sorted(fs.per_item)
        matrix = SimilarityMatrix(items)
        for x in range(len(items)):
            a = fs.per_item[items[x]]
            for y in range(x + 1, len(items)):
                b = fs.per_item[items[y]]
                if spec.name == "jaccard":
                    s = jaccard(a, b)
                elif spec.name == "dice":
                    s = dice(a, b)
                else:
                    s = cosine_idf(a, b, fs)
                if s > 0.0:
                    matrix.set(items[x], items[y], s)
        return matrix

    def similarity(self, spec: MeasureSpec) -> SimilarityMatrix:
        with self._lock:
            cached = self._memo.get(spec.slug)
        if cached is not None:
            return cached
        matrix = self._load_or_build(spec)
        with self._lock:
            self._memo[spec.slug] = matrix
        return matrix

    def _load_or_build(self, spec: MeasureSpec) -> SimilarityMatrix:
        cache_dir = self.paths["cache"]
        matrix_path = cache_dir / f"{spec.slug}.tsv"
        hash_path = cache_dir / f"{spec.slug}.hash"
        digest = self._input_digest(spec)
        if matrix_path.is_file() and hash_path.is_file():
            if hash_path.read_text(encoding="utf-8").strip() == digest:
                return self._with_universe(import_similarity(matrix_path), spec)
        matrix = self._build(spec)
        cache_dir.mkdir(parents=True, exist_ok=True)
        export_similarity(matrix, matrix_path)
        hash_path.write_text(digest + "\n", encoding="utf-8")
        return matrix

    def _with_universe(self, matrix: SimilarityMatrix, spec: MeasureSpec) -> SimilarityMatrix:
        # The exchange format only names items with positive pairs; re-attach
        # the rest of the universe so self-similarity stays defined for them.
        if spec.family == "cf":
            universe = sorted(self.ratings.by_item)
        else:
            universe = sorted(self.annotations.per_item)
        return SimilarityMatrix(universe, matrix.scores)

    def export_matrix(self, spec: MeasureSpec, out_path) -> int:
        """Write the matrix in the exchange format; returns the pair count."""
        matrix = self.similarity(spec)
        export_similarity(matrix, out_path)
        return len(matrix.scores)

    # -- recommendations ----------------------------------------------------

    def recommend(
        self, item_id: str, spec: MeasureSpec, k: int = 10, level: str | None = None
    ) -> RecommendationResult:
        """Top-k neighbors of one catalog item, query excluded.

        ``level`` controls which theme level the shared-theme lists are read
        from; it defaults to the measure's own level filter.
        """
        if item_id not in self.catalog:
            raise UnknownItemError(item_id)
        if k < 0:
            raise ValidationError(f"k must be >= 0, got {k}")
        shared_level = level or spec.level
        if shared_level not in LEVELS:
            raise ValidationError(f"unknown level {shared_level!r}")
        matrix = self.similarity(spec)
        scored = [
            (score, other)
            for other, score in matrix.neighbors(item_id)
            if score > 0.0 and other in self.catalog
        ]
        scored.sort(key=lambda t: (-t[0], t[1]))
        query_themes = self.annotations.themes_for(item_id, shared_level)
        entries = []
        for score, other in scored[:k]:
            meta = self.catalog.get(other)
            shared = sorted(
                query_themes & self.annotations.themes_for(other, shared_level)
            )
            entries.append(
                RecommendationEntry(
                    item_id=other, title=meta.title, series=meta.series,
                    score=score, shared_themes=shared,
                )
            )
        return RecommendationResult(
            query_item=item_id, measure=spec, level=shared_level, entries=entries
        )

    # -- rating predictors --------------------------------------------------

    def make_predictor(self, spec: str):
        """Build an unfitted predictor from a ``name[:key=value]*`` spec."""
        name, options = parse_method_spec(spec)
        simple = {
            "slopeone": SlopeOnePredictor,
            "useritem": UserItemBaseline,
            "itemavg": ItemAverageBaseline,
            "useravg": UserAverageBaseline,
            "globalavg": GlobalAverageBaseline,
            "random": RandomBaseline,
        }
        if name in simple:
            _reject_unknown(name, options, set())
            return simple[name](name=spec)
        if name == "userknn":
            _reject_unknown(name, options, {"k"})
            return UserKnnPredictor(name=spec, k=_int_option(options, "k", 80))
        if name == "biasedmf":
            _reject_unknown(name, options, {"factors", "epochs", "lr", "reg"})
            return BiasedMFPredictor(
                name=spec,
                factors=_int_option(options, "factors", 10),
                epochs=_int_option(options, "epochs", 50),
                learning_rate=_float_option(options, "lr", 0.005),
                reg=_float_option(options, "reg", 0.02),
            )
        if name == "iknn":
            _reject_unknown(name, options, {"k", "sim", "p", "level"})
            k = _int_option(options, "k", 40)
            sim_token = options.get("sim", "cf")
            p = _float_option(options, "p", None)
            level = options.get("level")
            measure = parse_measure(sim_token, p=p, level=level)
            if measure.family == "cf":
                return ItemKnnPredictor(name=spec, k=k)
            return ItemKnnPredictor(name=spec, k=k, sims=self.similarity(measure))
        raise ValidationError(
            f"unknown method {name!r}; expected one of iknn, userknn, slopeone, "
            "biasedmf, useritem, itemavg, useravg, globalavg, random"
        )

    def predictor_for(self, spec: str):
        """A predictor fitted on the full ratings table, memoized per spec."""
        with self._lock:
            cached = self._predictors.get(spec)
        if cached is not None:
            return cached
        predictor = self.make_predictor(spec)
        predictor.fit(self.ratings, seed=0)
        with self._lock:
            self._predictors[spec] = predictor
        return predictor


def format_score(value: float) -> float:
    """Scores travel with exactly six decimal places of information."""
    return float(f"{value:.6f}")


def recommendation_to_dict(result: RecommendationResult, onto: Ontology) -> dict:
    """JSON-ready view of a recommendation, shared themes tagged by domain."""
    return {
        "query_item": result.query_item,
        "measure": result.measure.token,
        "level": result.level,
        "results": [
            {
                "rank": pos + 1,
                "item_id": e.item_id,
                "title": e.title,
                "series": e.series,
                "score": format_score(e.score),
                "shared_themes": [
                    {"name": t, "domain": onto.domain_of(t)} for t in e.shared_themes
                ],
            }
            for pos, e in enumerate(result.entries)
        ],
    }


def parse_method_spec(spec: str) -> tuple[str, dict[str, str]]:
    parts = [p.strip() for p in spec.strip().split(":")]
    if not parts or not parts[0]:
        raise ValidationError(f"empty method spec {spec!r}")
    name = parts[0].lower()
    options: dict[str, str] = {}
    for part in parts[1:]:
        if "=" not in part:
            raise ValidationError(f"method option {part!r} is not key=value in {spec!r}")
        key, _, value = part.partition("=")
        key, value = key.strip().lower(), value.strip()
        if not value:
            raise ValidationError(f"empty value for option {key!r} in {spec!r}")
        if key in options:
            raise ValidationError(f"duplicate option {key!r} in {spec!r}")
        options[key] = value
    return name, options


def _reject_unknown(name: str, options: dict[str, str], allowed: set[str]) -> None:
    unknown = sorted(set(options) - allowed)
    if unknown:
        raise ValidationError(
            f"method {name!r} does not accept option(s): {', '.join(unknown)}"
        )


def _int_option(options: dict[str, str], key: str, default):
    if key not in options:
        return default
    try:
        return int(options[key])
    except ValueError:
        raise ValidationError(f"option {key!r} must be an integer, got {options[key]!r}") from None


def _float_option(options: dict[str, str], key: str, default):
    if key not in options:
        return default
    try:
        return float(options[key])
    except ValueError:
        raise ValidationError(f"option {key!r} must be a number, got {options[key]!r}") from None
