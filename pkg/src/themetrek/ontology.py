"""Rooted-tree theme ontology: structural queries, corpus-based information
content, and pairwise entity-similarity functions.

Six similarity measures are provided. PATH, WUP, and LCH read the tree
structure only; LIN, RES, and JCN additionally need an information-content
table computed from annotation statistics. All measures are symmetric and
clamped into [0, 1].
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import ThemeAnnotationSet, ValidationError

MEASURES = ("path", "wup", "lch", "lin", "res", "jcn")
IC_MEASURES = frozenset({"lin", "res", "jcn"})

# Scale constants keeping LCH / RES / JCN near the unit interval.
LCH_SCALE = 3.0
RES_SCALE = 10.0
JCN_SCALE = 2.0


@dataclass
class Ontology:
    """Tree of named theme entities: a root, a parent function, and derived depths.

    ``d`` is the maximum depth over all entities; ``m`` the maximum path length
    between any entity pair (the tree diameter).
    """

    root: str
    parent: dict[str, str]
    entities: set[str] = field(init=False)
    children: dict[str, list[str]] = field(init=False)
    depth: dict[str, int] = field(init=False)
    d: int = field(init=False)
    m: int = field(init=False)

    def __post_init__(self):
        self.entities = {self.root, *self.parent}
        self.children = {e: [] for e in self.entities}
        for child, par in self.parent.items():
            if par not in self.entities:
                raise ValidationError(f"orphan parent reference {par!r} (child {child!r})")
            self.children[par].append(child)
        for kids in self.children.values():
            kids.sort()
        self._compute_depths()
        self.d = max(self.depth.values())
        self.m = self._diameter()

    def _compute_depths(self):
        self.depth = {self.root: 0}
        queue = deque([self.root])
        while queue:
            node = queue.popleft()
            for child in self.children[node]:
                self.depth[child] = self.depth[node] + 1
                queue.append(child)
        if len(self.depth) != len(self.entities):
            stray = next(e for e in self.entities if e not in self.depth)
            member = self._find_cycle_member(stray)
            raise ValidationError(f"cycle detected in ontology involving {member!r}")

    def _find_cycle_member(self, start: str) -> str:
        seen = set()
        node = start
        while node not in seen:
            seen.add(node)
            node = self.parent[node]
        return node

    def _diameter(self) -> int:
        # Two-pass BFS: farthest node from the root, then farthest from that.
        far, _ = self._farthest_from(self.root)
        _, dist = self._farthest_from(far)
        return dist

    def _farthest_from(self, start: str) -> tuple[str, int]:
        dist = {start: 0}
        queue = deque([start])
        far, far_d = start, 0
        while queue:
            node = queue.popleft()
            neighbors = list(self.children[node])
            if node != self.root:
                neighbors.append(self.parent[node])
            for nxt in neighbors:
                if nxt not in dist:
                    dist[nxt] = dist[node] + 1
                    if dist[nxt] > far_d:
                        far, far_d = nxt, dist[nxt]
                    queue.append(nxt)
        return far, far_d

    @property
    def theme_count(self) -> int:
        """Number of named themes, the root excluded."""
        return len(self.entities) - 1

    def _require(self, entity: str) -> None:
        if entity not in self.entities:
            raise ValidationError(f"unknown theme {entity!r}")

    def ancestors(self, entity: str) -> list[str]:
        """Chain from ``entity`` up to the root, inclusive on both ends."""
        self._require(entity)
        chain = [entity]
        while chain[-1] != self.root:
            chain.append(self.parent[chain[-1]])
        return chain

    def domain_of(self, entity: str) -> str | None:
        """The depth-1 ancestor grouping this entity, or None for the root."""
        chain = self.ancestors(entity)
        if len(chain) < 2:
            return None
        return chain[-2]

    def subtree(self, entity: str, max_depth: int | None = None) -> dict:
        """Nested {name, depth, children} mapping, optionally depth-limited."""
        self._require(entity)

        def build(node: str, remaining: int | None) -> dict:
            out = {"name": node, "depth": self.depth[node], "children": []}
            if remaining is None or remaining > 0:
                nxt = None if remaining is None else remaining - 1
                out["children"] = [build(c, nxt) for c in self.children[node]]
            return out

        return build(entity, max_depth)


def lcs(onto: Ontology, t: str, s: str) -> str:
    """Deepest common ancestor of two entities."""
    onto._require(t)
    onto._require(s)
    a, b = t, s
    while onto.depth[a] > onto.depth[b]:
        a = onto.parent[a]
    while onto.depth[b] > onto.depth[a]:
        b = onto.parent[b]
    while a != b:
        a = onto.parent[a]
        b = onto.parent[b]
    return a


def path_length(onto: Ontology, t: str, s: str) -> int:
    """Number of tree steps between two entities."""
    common = lcs(onto, t, s)
    return onto.depth[t] + onto.depth[s] - 2 * onto.depth[common]


def load_ontology(path) -> Ontology:
    """Read a ``theme<TAB>parent`` TSV; exactly one row (the root) has an empty parent."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if not lines or lines[0].strip() != "theme\tparent":
        raise ValidationError(f"{path}: expected header 'theme<TAB>parent'")
    parent: dict[str, str] = {}
    roots: list[str] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValidationError(f"{path}:{lineno}: malformed row {line!r}")
        theme, par = parts[0].strip(), parts[1].strip()
        if not theme:
            raise ValidationError(f"{path}:{lineno}: empty theme name")
        if theme in seen:
            raise ValidationError(f"{path}:{lineno}: duplicate theme {theme!r}")
        seen.add(theme)
        if par:
            parent[theme] = par
        else:
            roots.append(theme)
    if len(roots) != 1:
        raise ValidationError(f"{path}: expected exactly one root row, found {len(roots)}")
    root = roots[0]
    for child, par in parent.items():
        if par not in seen:
            raise ValidationError(f"{path}: orphan parent reference {par!r} (child {child!r})")
    return Ontology(root=root, parent=parent)


def write_ontology(onto: Ontology, path) -> None:
    lines = ["theme\tparent", f"{onto.root}\t"]
    for theme in sorted(onto.parent):
        lines.append(f"{theme}\t{onto.parent[theme]}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass
class InformationContentTable:
    """Ancestor-propagated occurrence counts and per-entity information content."""

    count: dict[str, float]
    total: float
    ic: dict[str, float]

    def export_json(self, path) -> None:
        rows = [
            {"theme": t, "count": self.count[t], "ic": self.ic[t]}
            for t in sorted(self.count)
        ]
        Path(path).write_text(json.dumps(rows, indent=2) + "\n", encoding="utf-8")


def compute_ic(
    onto: Ontology, ann: ThemeAnnotationSet, smoothing: float = 1.0
) -> InformationContentTable:
    """Propagate annotation occurrence counts up the tree and derive IC scores.

    Every (item, theme, level) annotation entry contributes one occurrence to
    its theme; each entity's own count is raised by ``smoothing``. An entity's
    propagated count adds its children's; the root count is the corpus total M
    and the root IC is exactly 0.
    """
    if smoothing < 0:
        raise ValidationError(f"smoothing must be >= 0, got {smoothing!r}")
    ann.validate_themes(onto.entities)
    own = {e: smoothing for e in onto.entities}
    for pairs in ann.per_item.values():
        for theme, _level in pairs:
            own[theme] += 1.0

    count = dict(own)
    # Children accumulate before parents: process by decreasing depth.
    for entity in sorted(onto.entities, key=lambda e: -onto.depth[e]):
        if entity != onto.root:
            count[onto.parent[entity]] += count[entity]
    total = count[onto.root]

    ic: dict[str, float] = {}
    for entity, c in count.items():
        if c <= 0.0 or total <= 0.0:
            ic[entity] = math.inf
        else:
            ic[entity] = max(0.0, -math.log(c / total))
    ic[onto.root] = 0.0
    return InformationContentTable(count=count, total=total, ic=ic)


def _require_ic(ic: InformationContentTable | None, measure: str) -> InformationContentTable:
    if ic is None:
        raise ValidationError(f"measure {measure!r} requires an information-content table")
    return ic


def entity_similarity(
    onto: Ontology,
    ic: InformationContentTable | None,
    measure: str,
    t: str,
    s: str,
) -> float:
    """One of the six pairwise entity-similarity scores, clamped into [0, 1]."""
    measure = measure.lower()
    if measure not in MEASURES:
        raise ValidationError(f"unknown entity-similarity measure {measure!r}")
    onto._require(t)
    onto._require(s)

    if measure == "path":
        raw = 1.0 / (path_length(onto, t, s) + 1.0)
    elif measure == "wup":
        common = lcs(onto, t, s)
        den = onto.depth[t] + onto.depth[s]
        if den == 0:
            raw = 1.0 if t == s else 0.0
        else:
            raw = 2.0 * onto.depth[common] / den
    elif measure == "lch":
        if onto.d == 0:
            raw = 1.0 if t == s else 0.0
        else:
            # Node-count convention (path+1) keeps the identity case off log(0).
            ratio = (path_length(onto, t, s) + 1.0) / (2.0 * onto.d)
            raw = -math.log(ratio) / LCH_SCALE
    else:
        table = _require_ic(ic, measure)
        ic_t, ic_s = table.ic[t], table.ic[s]
        ic_lcs = table.ic[lcs(onto, t, s)]
        if measure == "res":
            raw = 1.0 if math.isinf(ic_lcs) else ic_lcs / RES_SCALE
        elif measure == "lin":
            den = ic_t + ic_s
            if den == 0.0:
                raw = 1.0 if t == s else 0.0
            elif math.isinf(ic_lcs):
                raw = 1.0 if t == s else 0.0
            elif math.isinf(den):
                raw = 0.0
            else:
                raw = 2.0 * ic_lcs / den
        else:  # jcn
            dist = ic_t + ic_s - 2.0 * ic_lcs
            if math.isnan(dist):
                raw = 1.0 if t == s else 0.0
            elif dist == 0.0:
                raw = 1.0
            elif math.isinf(dist):
                raw = 0.0
            else:
                raw = 1.0 / (JCN_SCALE * dist)
    return min(1.0, max(0.0, raw))


def pairwise_similarity_table(
    onto: Ontology,
    ic: InformationContentTable | None,
    measure: str,
    entities: list[str],
) -> np.ndarray:
    """Dense symmetric table of entity_similarity over an entity subset.

    Vectorized over ancestor-prefix arrays; agrees with scalar
    ``entity_similarity`` on every cell (cross-checked in tests).
    """
    measure = measure.lower()
    if measure not in MEASURES:
        raise ValidationError(f"unknown entity-similarity measure {measure!r}")
    for e in entities:
        onto._require(e)
    if measure in IC_MEASURES:
        _require_ic(ic, measure)
    n = len(entities)
    if n == 0:
        return np.zeros((0, 0))

    all_names = sorted(onto.entities)
    index = {name: i for i, name in enumerate(all_names)}
    max_d = onto.d

    # anc[i, d] = global index of the depth-d ancestor of entities[i];
    # unique negative padding beyond each entity's depth so padded cells
    # never collide across rows.
    anc = np.empty((n, max_d + 1), dtype=np.int64)
    dep = np.empty(n, dtype=np.int64)
    for i, name in enumerate(entities):
        chain = onto.ancestors(name)  # entity .. root
        dep[i] = onto.depth[name]
        anc[i, :] = -(i + 1)
        for node in chain:
            anc[i, onto.depth[node]] = index[node]

    # Tree prefix property: ancestor rows agree exactly on depths 0..lcs_depth.
    # The min() guard stops a row's own padding from matching itself on the
    # diagonal, where agreement runs past the entity's true depth.
    eq = anc[:, None, :] == anc[None, :, :]
    lcs_depth = np.minimum(eq.sum(axis=2) - 1, np.minimum(dep[:, None], dep[None, :]))
    path = dep[:, None] + dep[None, :] - 2 * lcs_depth
    diag = np.eye(n, dtype=bool)

    with np.errstate(divide="ignore", invalid="ignore"):
        if measure == "path":
            raw = 1.0 / (path + 1.0)
        elif measure == "wup":
            den = (dep[:, None] + dep[None, :]).astype(float)
            raw = np.where(den > 0, 2.0 * lcs_depth / np.where(den > 0, den, 1.0), 0.0)
            raw[diag & (den == 0)] = 1.0
        elif measure == "lch":
            if max_d == 0:
                raw = diag.astype(float)
            else:
                raw = -np.log((path + 1.0) / (2.0 * max_d)) / LCH_SCALE
        else:
            ic_all = np.array([ic.ic[name] for name in all_names])
            rows = np.arange(n)[:, None] * np.ones((1, n), dtype=np.int64)
            lcs_global = anc[rows, lcs_depth]
            ic_lcs = ic_all[lcs_global]
            ic_pair = ic_all[[index[e] for e in entities]]
            ic_sum = ic_pair[:, None] + ic_pair[None, :]
            if measure == "res":
                raw = ic_lcs / RES_SCALE
                raw[np.isinf(ic_lcs)] = 1.0
            elif measure == "lin":
                raw = np.where(ic_sum > 0, 2.0 * ic_lcs / np.where(ic_sum > 0, ic_sum, 1.0), 0.0)
                raw[(ic_sum == 0) & diag] = 1.0
                bad = ~np.isfinite(raw)
                raw[bad] = 0.0
                raw[bad & diag] = 1.0
            else:  # jcn
                dist = ic_sum - 2.0 * ic_lcs
                raw = np.where(dist != 0, 1.0 / (JCN_SCALE * np.where(dist != 0, dist, 1.0)), 1.0)
                bad = ~np.isfinite(dist)
                raw[bad] = 0.0
                raw[bad & diag] = 1.0

    return np.clip(raw, 0.0, 1.0)
