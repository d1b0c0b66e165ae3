"""Synthetic episode corpus generator.

Emits a complete, self-consistent workspace: a theme ontology, an episode
catalog across four series, central/peripheral theme annotations, a sparse
user ratings table, and pseudo-transcripts whose word choice correlates with
each episode's themes. The `paper` profile matches the published corpus
shape: 2130 themes with tree depth 7 and a maximum pairwise path of 13,
452 episodes whose per-series mean central-theme counts land on the
published values, and 3975 ratings from 842 users over 396 episodes.

Two real episodes are embedded with hand-written annotations: False Profits
(voy3x05) and Devil's Due (tng4x13) share exactly six central themes, and
the generator verifies that the IDF-weighted cosine over central themes
ranks Devil's Due first for a False Profits query before writing anything.

Usage: python -m themetrek.synthdata --out DIR [--profile paper|small] [--seed N]
"""

from __future__ import annotations

import argparse
import random
import sys
from dataclasses import dataclass
from pathlib import Path

from .corpus import (
    CatalogEntry,
    ItemCatalog,
    RatingsDataset,
    ThemeAnnotationSet,
    TranscriptCorpus,
    write_annotations,
    write_catalog,
    write_ratings,
    write_transcripts,
)
from .ontology import Ontology, write_ontology
from .setsim import build_feature_sets, cosine_idf

DOMAINS = (
    "the human condition",
    "society",
    "the pursuit of knowledge",
    "alternate reality",
)

FALSE_PROFITS = "voy3x05"
DEVILS_DUE = "tng4x13"

# Central themes of False Profits; the first six are also central on
# Devil's Due, which is what makes it the top cosine match.
VOY_CENTRAL = (
    "avarice",
    "exploitation of sentient beings",
    "fraud",
    "religion as a control mechanism",
    "the fulfillment of prophesy",
    "the lust for gold",
    "primitive point of view",
    "science as magic to the primitive",
    "the ethics of interfering in less advanced societies",
)
SHARED_CENTRAL = VOY_CENTRAL[:6]
VOY_PERIPHERAL = (
    "casuistry in interpretation of scripture",
    "wormhole",
    "matter replicator",
)

# Domain placement for the hand-written themes.
PROTECTED_DOMAIN = {
    "avarice": "the human condition",
    "the lust for gold": "the human condition",
    "the fulfillment of prophesy": "the human condition",
    "fraud": "society",
    "exploitation of sentient beings": "society",
    "religion as a control mechanism": "society",
    "primitive point of view": "society",
    "the ethics of interfering in less advanced societies": "society",
    "casuistry in interpretation of scripture": "society",
    "science as magic to the primitive": "the pursuit of knowledge",
    "wormhole": "the pursuit of knowledge",
    "matter replicator": "the pursuit of knowledge",
}
PROTECTED = tuple(PROTECTED_DOMAIN)

_NOUNS = (
    "identity", "loyalty", "betrayal", "sacrifice", "revenge", "redemption",
    "obsession", "isolation", "memory", "mortality", "duty", "honor",
    "ambition", "grief", "courage", "prejudice", "freedom", "obedience",
    "deception", "diplomacy", "exile", "faith", "corruption", "innocence",
    "survival", "conscience", "madness", "heroism", "vanity", "mercy",
    "justice", "progress", "tradition", "curiosity", "power", "conquest",
    "rebellion", "utopia", "evolution", "immortality", "telepathy",
    "prophecy", "ritual", "commerce", "espionage", "tyranny", "anarchy",
    "empathy", "instinct", "logic", "emotion", "artistry", "censorship",
    "propaganda", "slavery", "inequality", "plague", "famine", "contact",
    "assimilation", "xenophobia", "cybernetics", "terraforming",
    "nanotechnology", "subspace", "antimatter", "singularity", "telekinesis",
    "precognition", "symbiosis", "sentience", "vengeance", "paranoia",
    "solitude", "kinship", "mutiny", "quarantine", "first love", "old age",
    "parenthood", "brotherhood", "stowaways", "smuggling", "arbitration",
    "cartography", "archaeology", "linguistics", "navigation", "espers",
)
_TEMPLATES = (
    "{n}",
    "the nature of {n}",
    "fear of {n}",
    "the cost of {n}",
    "the ethics of {n}",
    "loss of {n}",
    "the burden of {n}",
    "{n} among the stars",
    "{n} and {m}",
)

_STAPLES = (
    "captain bridge shuttle warp phaser sensor deck officer starfleet "
    "quadrant nebula transporter engineering console viewscreen helm ensign "
    "commander doctor admiral alien planet colony outpost starbase orbit "
    "impulse torpedo shields hull breach anomaly frequency signal probe "
    "mission stardate federation council treaty ambassador species vessel "
    "cargo sickbay quarters turbolift corridor airlock tractor beam scan "
    "reading coordinates course heading velocity distress klaxon diagnostic "
    "plasma conduit relay dampener emitter array lateral manifold injector "
    "chamber replicator holodeck tricorder communicator insignia uniform "
    "protocol directive regulation briefing debrief yellow alert red"
).split()

_SYLLABLES = (
    "ta ve ko ri lan dor mek sul ar en ith or ul ny pra vex zor qua fel gos "
    "hur jin kel lom mir nor pex quil ros tul vor wex yel zan bel cor dun "
    "eth fir gal het osk imb"
).split()


@dataclass(frozen=True)
class Profile:
    name: str
    theme_total: int
    domain_share: dict[str, int]
    depth_cap: int
    second_depth: int
    series_episodes: dict[str, int]
    central_sums: dict[str, int]
    n_users: int
    n_rated_items: int
    n_ratings: int
    doc_words: int


PAPER_PROFILE = Profile(
    name="paper",
    theme_total=2130,
    domain_share={
        "the human condition": 700,
        "society": 600,
        "the pursuit of knowledge": 500,
        "alternate reality": 326,
    },
    depth_cap=7,
    second_depth=6,
    series_episodes={"TOS": 80, "TAS": 22, "TNG": 178, "VOY": 172},
    central_sums={"TOS": 994, "TAS": 149, "TNG": 2072, "VOY": 1582},
    n_users=842,
    n_rated_items=396,
    n_ratings=3975,
    doc_words=300,
)

SMALL_PROFILE = Profile(
    name="small",
    theme_total=140,
    domain_share={
        "the human condition": 44,
        "society": 40,
        "the pursuit of knowledge": 32,
        "alternate reality": 20,
    },
    depth_cap=5,
    second_depth=4,
    series_episodes={"TOS": 8, "TAS": 4, "TNG": 16, "VOY": 12},
    central_sums={"TOS": 64, "TAS": 22, "TNG": 150, "VOY": 96},
    n_users=60,
    n_rated_items=30,
    n_ratings=420,
    doc_words=90,
)

PROFILES = {p.name: p for p in (PAPER_PROFILE, SMALL_PROFILE)}

# How strongly each series leans toward each domain when sampling themes.
_SERIES_DOMAIN_WEIGHTS = {
    "TOS": (0.45, 0.25, 0.20, 0.10),
    "TAS": (0.20, 0.15, 0.40, 0.25),
    "TNG": (0.25, 0.45, 0.20, 0.10),
    "VOY": (0.25, 0.20, 0.30, 0.25),
}


@dataclass
class SyntheticDataset:
    ontology: Ontology
    catalog: ItemCatalog
    annotations: ThemeAnnotationSet
    ratings: RatingsDataset
    transcripts: TranscriptCorpus
    profile: Profile


def _theme_names(rng: random.Random, count: int, taken: set[str]) -> list[str]:
    names: list[str] = []
    while len(names) < count:
        template = rng.choice(_TEMPLATES)
        first = rng.choice(_NOUNS)
        second = rng.choice(_NOUNS)
        while second == first:
            second = rng.choice(_NOUNS)
        name = template.format(n=first, m=second)
        if name in taken:
            continue
        taken.add(name)
        names.append(name)
    return names


def build_ontology(rng: random.Random, profile: Profile) -> Ontology:
    """Grow one subtree per domain.

    Only the first domain may reach the full depth cap and the second domain
    is forced to reach exactly one level less, which pins the tree's maximum
    pairwise path at depth_cap + (depth_cap - 1) across those two subtrees.
    """
    root = "theme"
    parent: dict[str, str] = {}
    depth: dict[str, int] = {root: 0}
    taken: set[str] = {root, *DOMAINS, *PROTECTED}

    def attach(name: str, under: str) -> None:
        parent[name] = under
        depth[name] = depth[under] + 1

    for domain in DOMAINS:
        attach(domain, root)

    remaining = {d: profile.domain_share[d] for d in DOMAINS}
    for theme, domain in PROTECTED_DOMAIN.items():
        attach(theme, domain)
        remaining[domain] -= 1

    deepest, second = DOMAINS[0], DOMAINS[1]
    for domain in DOMAINS:
        cap = profile.depth_cap if domain == deepest else profile.second_depth
        if domain == deepest:
            forced = profile.depth_cap
        elif domain == second:
            forced = profile.second_depth
        else:
            forced = 0
        budget = remaining[domain]
        nodes = [domain] + [t for t, d in PROTECTED_DOMAIN.items() if d == domain]
        if forced:
            chain_names = _theme_names(rng, forced - 1, taken)
            under = domain
            for name in chain_names:
                attach(name, under)
                nodes.append(name)
                under = name
            budget -= len(chain_names)
        fill = _theme_names(rng, budget, taken)
        for name in fill:
            # favor shallow parents so the trees stay bushy
            candidates = [n for n in nodes if depth[n] < cap]
            weights = [cap - depth[n] for n in candidates]
            under = rng.choices(candidates, weights=weights, k=1)[0]
            attach(name, under)
            nodes.append(name)

    return Ontology(root=root, parent=parent)


def _series_layout(profile: Profile) -> list[tuple[str, int, int]]:
    """(series, season, episode) rows; always contains voy3x05 and tng4x13."""
    per_season = {
        "TOS": [27, 27, 26],
        "TAS": [16, 6],
        "TNG": [26, 22, 26, 26, 26, 26, 26],
        "VOY": [16, 26, 26, 26, 26, 26, 26],
    }
    rows: list[tuple[str, int, int]] = []
    for series, total in profile.series_episodes.items():
        if profile.name == "paper":
            seasons = per_season[series]
        else:
            # one long season, but keep the two special ids at their real slots
            seasons = None
        if seasons:
            assert sum(seasons) == total
            for season, n in enumerate(seasons, start=1):
                for ep in range(1, n + 1):
                    rows.append((series, season, ep))
        else:
            budget = total
            if series == "TNG":
                rows.append(("TNG", 4, 13))
                budget -= 1
            if series == "VOY":
                rows.append(("VOY", 3, 5))
                budget -= 1
            for ep in range(1, budget + 1):
                rows.append((series, 1, ep))
    return rows


def _item_id(series: str, season: int, episode: int) -> str:
    return f"{series.lower()}{season}x{episode:02d}"


def build_catalog(rng: random.Random, profile: Profile) -> ItemCatalog:
    adjectives = (
        "Silent", "Forgotten", "Final", "Hidden", "Broken", "Distant",
        "Burning", "Hollow", "Shattered", "Endless", "Frozen", "Veiled",
        "Wandering", "Fallen", "Sleeping", "Crimson", "Luminous", "Severed",
    )
    nouns = (
        "Anomaly", "Covenant", "Horizon", "Paradox", "Threshold", "Signal",
        "Empire", "Voyage", "Reckoning", "Mirror", "Tempest", "Sanctuary",
        "Requiem", "Frontier", "Vigil", "Accord", "Relic", "Beacon",
        "Descent", "Passage", "Gambit", "Echo", "Citadel", "Omen",
    )
    titles_taken = {"False Profits", "Devil's Due"}
    entries = []
    for series, season, episode in _series_layout(profile):
        item_id = _item_id(series, season, episode)
        if item_id == FALSE_PROFITS:
            title = "False Profits"
        elif item_id == DEVILS_DUE:
            title = "Devil's Due"
        else:
            while True:
                title = f"The {rng.choice(adjectives)} {rng.choice(nouns)}"
                if title not in titles_taken:
                    break
                title = f"{title} {rng.randint(2, 9)}"
                if title not in titles_taken:
                    break
            titles_taken.add(title)
        entries.append(CatalogEntry(item_id, title, series, season, episode))
    return ItemCatalog(entries=entries)


def _exact_sum_counts(
    rng: random.Random, n: int, total: int, lo: int = 2, hi: int = 30
) -> list[int]:
    """n integers in [lo, hi] summing exactly to total."""
    if not lo * n <= total <= hi * n:
        raise ValueError(f"cannot split {total} into {n} parts within [{lo},{hi}]")
    mean = total / n
    counts = [min(hi, max(lo, round(rng.gauss(mean, 3.2)))) for _ in range(n)]
    diff = total - sum(counts)
    while diff != 0:
        pos = rng.randrange(n)
        if diff > 0 and counts[pos] < hi:
            counts[pos] += 1
            diff -= 1
        elif diff < 0 and counts[pos] > lo:
            counts[pos] -= 1
            diff += 1
    return counts


def _domain_pools(onto: Ontology) -> dict[str, list[str]]:
    pools: dict[str, list[str]] = {d: [] for d in DOMAINS}
    for entity in sorted(onto.entities):
        if entity == onto.root or entity in DOMAINS or entity in PROTECTED:
            continue
        domain = onto.domain_of(entity)
        pools[domain].append(entity)
    return pools


def build_annotations(
    rng: random.Random, profile: Profile, onto: Ontology, catalog: ItemCatalog
) -> ThemeAnnotationSet:
    pools = _domain_pools(onto)
    ranked = {d: list(pool) for d, pool in pools.items()}
    for pool in ranked.values():
        rng.shuffle(pool)
    weights = {
        d: [1.0 / (pos + 3) ** 0.85 for pos in range(len(pool))]
        for d, pool in ranked.items()
    }

    by_series: dict[str, list[str]] = {}
    for entry in catalog.entries:
        by_series.setdefault(entry.series, []).append(entry.item_id)

    targets: dict[str, int] = {}
    for series, items in by_series.items():
        pinned = {FALSE_PROFITS: 9, DEVILS_DUE: 11}
        fixed = [i for i in items if i in pinned]
        free = [i for i in items if i not in pinned]
        budget = profile.central_sums[series] - sum(pinned[i] for i in fixed)
        counts = _exact_sum_counts(rng, len(free), budget)
        for item, count in zip(free, counts):
            targets[item] = count
        for item in fixed:
            targets[item] = pinned[item]

    usage: dict[str, int] = {}

    def sample_generic(series: str, count: int, exclude: set[str]) -> list[str]:
        picked: list[str] = []
        domain_w = _SERIES_DOMAIN_WEIGHTS[series]
        guard = 0
        while len(picked) < count:
            guard += 1
            if guard > 60 * count + 200:
                raise RuntimeError("theme sampling stalled")
            domain = rng.choices(DOMAINS, weights=domain_w, k=1)[0]
            pool = ranked[domain]
            theme = rng.choices(pool, weights=weights[domain], k=1)[0]
            if theme in exclude or theme in picked:
                continue
            picked.append(theme)
            usage[theme] = usage.get(theme, 0) + 1
        return picked

    # Seed rare hand-written themes into a few host episodes, never more
    # than two per host so no other episode gets close to the query's set.
    hosts: dict[str, list[str]] = {}
    host_candidates = [
        e.item_id
        for e in catalog.entries
        if e.item_id not in (FALSE_PROFITS, DEVILS_DUE) and targets[e.item_id] >= 6
    ]
    plant_load: dict[str, int] = {}
    for theme in VOY_CENTRAL:
        spots = max(2, min(len(host_candidates), rng.randint(3, 6)))
        chosen = []
        attempts = 0
        while len(chosen) < spots and attempts < 400:
            attempts += 1
            host = rng.choice(host_candidates)
            if host in chosen or plant_load.get(host, 0) >= 2:
                continue
            chosen.append(host)
            plant_load[host] = plant_load.get(host, 0) + 1
        for host in chosen:
            hosts.setdefault(host, []).append(theme)

    per_item: dict[str, set[tuple[str, str]]] = {}
    for entry in catalog.entries:
        item = entry.item_id
        if item in (FALSE_PROFITS, DEVILS_DUE):
            continue
        planted = hosts.get(item, [])
        generic = sample_generic(
            entry.series, targets[item] - len(planted), exclude=set(planted)
        )
        centrals = planted + generic
        per_item[item] = {(t, "central") for t in centrals}

    per_item[FALSE_PROFITS] = {(t, "central") for t in VOY_CENTRAL}

    popular = sorted(usage.items(), key=lambda kv: (-kv[1], kv[0]))
    tng_fill = [t for t, _ in popular[:20]]
    rng.shuffle(tng_fill)
    per_item[DEVILS_DUE] = {(t, "central") for t in SHARED_CENTRAL} | {
        (t, "central") for t in tng_fill[:5]
    }

    # Peripheral layer: small generic sets, plus hand-written peripherals
    # for False Profits and a few hosts so their IDF weights stay finite.
    peripheral_mean = {"TOS": 7.0, "TAS": 4.5, "TNG": 9.0, "VOY": 8.0}
    for entry in catalog.entries:
        item = entry.item_id
        own_central = {t for t, _ in per_item[item]}
        if item == FALSE_PROFITS:
            per_item[item] |= {(t, "peripheral") for t in VOY_PERIPHERAL}
            continue
        n_peri = max(2, round(rng.gauss(peripheral_mean[entry.series], 2.0)))
        peris = sample_generic(entry.series, n_peri, exclude=own_central)
        per_item[item] |= {(t, "peripheral") for t in peris}
    for theme in VOY_PERIPHERAL:
        for host in rng.sample(host_candidates, k=min(4, len(host_candidates))):
            if (theme, "central") not in per_item[host]:
                per_item[host].add((theme, "peripheral"))

    return ThemeAnnotationSet(per_item=per_item)


def check_explorer_anchor(ann: ThemeAnnotationSet, margin: float = 1.02) -> None:
    """The hand-written episode pair must survive generation: Devil's Due
    shares exactly six central themes with False Profits and tops the
    IDF-weighted cosine ranking with some margin."""
    shared = ann.themes_for(FALSE_PROFITS, "central") & ann.themes_for(
        DEVILS_DUE, "central"
    )
    if shared != set(SHARED_CENTRAL):
        raise RuntimeError(f"shared central set drifted: {sorted(shared)}")
    fs = build_feature_sets(ann, level_filter="central")
    query = fs.per_item[FALSE_PROFITS]
    scores = {
        other: cosine_idf(query, fs.per_item[other], fs)
        for other in fs.per_item
        if other != FALSE_PROFITS
    }
    best = max(scores, key=lambda k: (scores[k], k))
    runner_up = max(
        (s for o, s in scores.items() if o != DEVILS_DUE), default=0.0
    )
    if best != DEVILS_DUE or scores[DEVILS_DUE] < margin * runner_up:
        raise RuntimeError(
            f"ranking anchor failed: best={best} "
            f"score={scores.get(DEVILS_DUE, 0):.4f} runner_up={runner_up:.4f}"
        )


def build_ratings(
    rng: random.Random, profile: Profile, catalog: ItemCatalog, onto: Ontology,
    ann: ThemeAnnotationSet,
) -> RatingsDataset:
    users = [f"user{n:04d}" for n in range(1, profile.n_users + 1)]
    episode_ids = [e.item_id for e in catalog.entries]
    must_have = [FALSE_PROFITS, DEVILS_DUE]
    others = [i for i in episode_ids if i not in must_have]
    rng.shuffle(others)
    items = sorted(must_have + others[: profile.n_rated_items - len(must_have)])

    domain_index = {d: n for n, d in enumerate(DOMAINS)}

    def domain_mix(item: str) -> list[float]:
        mix = [0.0] * len(DOMAINS)
        for theme in ann.themes_for(item, "central"):
            mix[domain_index[onto.domain_of(theme)]] += 1.0
        total = sum(mix) or 1.0
        return [v / total for v in mix]

    quality = {i: rng.gauss(0.0, 1.1) for i in items}
    mixes = {i: domain_mix(i) for i in items}
    harshness = {u: rng.gauss(0.0, 0.9) for u in users}
    tastes = {u: [rng.gauss(0.0, 1.0) for _ in DOMAINS] for u in users}

    item_pop = {i: 1.0 / (pos + 2) ** 0.7 for pos, i in enumerate(items)}
    user_act = {u: 1.0 / (pos + 2) ** 0.9 for pos, u in enumerate(users)}

    def rate(u: str, i: str) -> float:
        affinity = sum(t * m for t, m in zip(tastes[u], mixes[i]))
        raw = 6.2 + quality[i] - harshness[u] + 1.1 * affinity + rng.gauss(0.0, 1.2)
        return float(min(10, max(1, round(raw))))

    pairs: set[tuple[str, str]] = set()
    user_list, item_list = list(users), list(items)
    act_weights = [user_act[u] for u in user_list]
    pop_weights = [item_pop[i] for i in item_list]

    for i in item_list:
        need = 3
        guard = 0
        while need and guard < 500:
            guard += 1
            u = rng.choices(user_list, weights=act_weights, k=1)[0]
            if (u, i) in pairs:
                continue
            pairs.add((u, i))
            need -= 1
    covered = {u for u, _ in pairs}
    for u in user_list:
        if u in covered:
            continue
        while True:
            i = rng.choices(item_list, weights=pop_weights, k=1)[0]
            if (u, i) not in pairs:
                pairs.add((u, i))
                break
    if len(pairs) > profile.n_ratings:
        raise RuntimeError("coverage pass already exceeds the rating budget")
    while len(pairs) < profile.n_ratings:
        u = rng.choices(user_list, weights=act_weights, k=1)[0]
        i = rng.choices(item_list, weights=pop_weights, k=1)[0]
        pairs.add((u, i))

    triples = [(u, i, rate(u, i)) for u, i in sorted(pairs)]
    return RatingsDataset(triples)


def build_transcripts(
    rng: random.Random, profile: Profile, catalog: ItemCatalog,
    ann: ThemeAnnotationSet,
) -> TranscriptCorpus:
    lexicon: list[str] = []
    seen = set(_STAPLES)
    for a in _SYLLABLES:
        for b in _SYLLABLES:
            word = a + b
            if len(word) >= 4 and word not in seen:
                lexicon.append(word)
                seen.add(word)
    rng.shuffle(lexicon)
    common = lexicon[:400]

    def signature(theme: str) -> list[str]:
        local = random.Random(f"sig:{theme}")
        return [local.choice(lexicon) for _ in range(4)]

    background = _STAPLES + common
    bg_weights = [1.0 / (pos + 5) ** 0.6 for pos in range(len(background))]

    per_item: dict[str, str] = {}
    for entry in catalog.entries:
        themes = sorted(ann.themes_for(entry.item_id, "both"))
        theme_words: list[str] = []
        for theme in themes:
            theme_words.extend(signature(theme))
        n_words = max(40, round(rng.gauss(profile.doc_words, profile.doc_words * 0.2)))
        words: list[str] = []
        for _ in range(n_words):
            if theme_words and rng.random() < 0.4:
                words.append(rng.choice(theme_words))
            else:
                words.append(rng.choices(background, weights=bg_weights, k=1)[0])
        sentences = []
        pos = 0
        while pos < len(words):
            span = rng.randint(8, 14)
            chunk = " ".join(words[pos : pos + span])
            pos += span
            sentences.append(chunk[0].upper() + chunk[1:] + ".")
        per_item[entry.item_id] = "\n".join(sentences) + "\n"
    return TranscriptCorpus(per_item=per_item)


def verify_shape(data: SyntheticDataset) -> dict[str, object]:
    """Structural self-checks; returns the measured shape facts."""
    profile = data.profile
    onto, ann, catalog = data.ontology, data.annotations, data.catalog
    facts: dict[str, object] = {
        "themes": onto.theme_count,
        "max_depth": onto.d,
        "max_path": onto.m,
        "episodes": len(catalog),
        "ratings": len(data.ratings),
        "users": len(data.ratings.by_user),
        "rated_items": len(data.ratings.by_item),
    }
    assert onto.theme_count == profile.theme_total, facts
    assert onto.d == profile.depth_cap, facts
    assert onto.m == profile.depth_cap + profile.second_depth, facts
    assert len(catalog) == sum(profile.series_episodes.values()), facts

    counts = ann.central_counts_by_series(catalog)
    for series, total in profile.central_sums.items():
        assert sum(counts[series]) == total, (series, sum(counts[series]), total)
        assert len(counts[series]) == profile.series_episodes[series]

    assert len(data.ratings) == profile.n_ratings, facts
    assert len(data.ratings.by_user) == profile.n_users, facts
    assert len(data.ratings.by_item) == profile.n_rated_items, facts
    ann.validate_themes(onto.entities)
    check_explorer_anchor(ann)
    return facts


def generate(profile: Profile, seed: int = 7) -> SyntheticDataset:
    rng = random.Random(f"themetrek:{profile.name}:{seed}")
    onto = build_ontology(rng, profile)
    catalog = build_catalog(rng, profile)
    ann = None
    for attempt in range(20):
        candidate = build_annotations(
            random.Random(f"themetrek:ann:{profile.name}:{seed}:{attempt}"),
            profile, onto, catalog,
        )
        try:
            check_explorer_anchor(candidate)
        except RuntimeError:
            continue
        ann = candidate
        break
    if ann is None:
        raise RuntimeError("could not place the anchor episodes after 20 attempts")
    ratings = build_ratings(rng, profile, catalog, onto, ann)
    transcripts = build_transcripts(rng, profile, catalog, ann)
    data = SyntheticDataset(
        ontology=onto, catalog=catalog, annotations=ann,
        ratings=ratings, transcripts=transcripts, profile=profile,
    )
    verify_shape(data)
    return data


CONFIG_TEMPLATE = """\
# workspace configuration: paths are resolved against this file's directory
ontology = ontology.tsv
catalog = catalog.csv
annotations = annotations.tsv
ratings = ratings.csv
transcripts = transcripts
cache = cache
"""


def write_dataset(data: SyntheticDataset, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_ontology(data.ontology, out / "ontology.tsv")
    write_catalog(data.catalog, out / "catalog.csv")
    write_annotations(data.annotations, out / "annotations.tsv")
    write_ratings(data.ratings, out / "ratings.csv")
    write_transcripts(data.transcripts, out / "transcripts")
    (out / "themetrek.cfg").write_text(CONFIG_TEMPLATE, encoding="utf-8")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m themetrek.synthdata",
        description="Generate a synthetic episode corpus workspace.",
    )
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--profile", choices=sorted(PROFILES), default="paper")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument(
        "--force", action="store_true", help="write into a non-empty directory"
    )
    args = parser.parse_args(argv)

    out = Path(args.out)
    if out.exists() and any(out.iterdir()) and not args.force:
        print(f"refusing to write into non-empty {out} (use --force)", file=sys.stderr)
        return 2

    data = generate(PROFILES[args.profile], seed=args.seed)
    write_dataset(data, out)
    facts = verify_shape(data)
    print(f"wrote {args.profile} workspace to {out}")
    for key in ("themes", "max_depth", "max_path", "episodes", "ratings", "users", "rated_items"):
        print(f"  {key}: {facts[key]}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
