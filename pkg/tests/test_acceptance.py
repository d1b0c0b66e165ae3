"""Acceptance gate: one test per acceptance criterion.

The corpus-bound criteria (dataset shape, warm/cold reproduction, parameter
sweeps) need the published datasets. When the environment variable
THEMETREK_PAPER_DATA names a workspace directory holding them, those tests
run in full; without it they skip, and the always-runnable property suite
below stands in for them. The dataset-shape check additionally runs against
the generated paper-shaped corpus so the loading path is exercised either way.

Every oracle here is written independently of the implementation under test.
"""

import itertools
import math
import os
import random
import statistics

import pytest

from themetrek.corpus import (
    RatingsDataset,
    SimilarityMatrix,
    ThemeAnnotationSet,
    TranscriptCorpus,
)
from themetrek.evaluate import rmse, run_experiment, wilcoxon_rank_sum
from themetrek.ontology import Ontology, compute_ic
from themetrek.recsys import IknnModel, cf_item_similarity, fit_bias, predict_iknn
from themetrek.setsim import dice, jaccard
from themetrek.softsim import soft_cardinality_raw
from themetrek.synthdata import PAPER_PROFILE, generate, write_dataset
from themetrek.textsim import build_text_similarity
from themetrek.workspace import Workspace, parse_measure

PAPER_DATA_ENV = "THEMETREK_PAPER_DATA"
NEEDS_PAPER_DATA = pytest.mark.skipif(
    not os.environ.get(PAPER_DATA_ENV),
    reason=f"published datasets not available; set {PAPER_DATA_ENV} to a "
    "workspace directory to run this criterion (the always-on property "
    "suite stands in for it otherwise)",
)

CENTRAL_MEANS = {"TOS": 12.42, "TAS": 6.77, "TNG": 11.64, "VOY": 9.20}


@pytest.fixture(scope="module")
def paper_twin_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("paper_twin")
    write_dataset(generate(PAPER_PROFILE, seed=7), out)
    return out


def paper_workspace() -> Workspace:
    return Workspace.open(os.environ[PAPER_DATA_ENV])


def assert_dataset_shape(ws: Workspace) -> None:
    onto = ws.ontology
    assert onto.theme_count == 2130
    assert onto.d == 7
    assert onto.m == 13
    assert len(ws.catalog) == 452
    assert len(ws.annotations) == 452
    counts = ws.annotations.central_counts_by_series(ws.catalog)
    for series, target in CENTRAL_MEANS.items():
        mean = statistics.fmean(counts[series])
        assert abs(mean - target) <= 0.01, (series, mean, target)
    assert len(ws.ratings) == 3975
    assert len(ws.ratings.by_user) == 842
    assert len(ws.ratings.by_item) == 396


class TestDatasetShape:
    def test_dataset_shape_generated_corpus(self, paper_twin_dir):
        assert_dataset_shape(Workspace.open(paper_twin_dir))

    @NEEDS_PAPER_DATA
    def test_dataset_shape_paper_export(self):
        assert_dataset_shape(paper_workspace())


# Method specs and Table 5 targets for the reproduction criteria.
WARM_TARGETS = [
    ("iknn:sim=lsi-40:k=40", 1.920, 0.06),
    ("iknn:sim=res:p=2:level=both:k=50", 1.927, 0.06),
    ("iknn:sim=lch:p=4:level=both:k=80", 1.927, 0.06),
    ("iknn:sim=dice:k=70", 1.929, 0.06),
    ("iknn:k=40", 1.940, 0.06),
    ("globalavg", 2.320, 0.05),
]


@NEEDS_PAPER_DATA
class TestPaperReproduction:
    @pytest.fixture(scope="class")
    def warm_report(self):
        ws = paper_workspace()
        methods = [ws.make_predictor(spec) for spec, _, _ in WARM_TARGETS]
        return run_experiment(ws.ratings, methods, scenario="warm", repeats=30)

    def test_warm_reproduction_means(self, warm_report):
        for spec, target, tolerance in WARM_TARGETS:
            mean = warm_report.method(spec).mean
            assert abs(mean - target) <= tolerance, (spec, mean, target)

    def test_warm_reproduction_ordering(self, warm_report):
        mean = {spec: warm_report.method(spec).mean for spec, _, _ in WARM_TARGETS}
        lsi = mean["iknn:sim=lsi-40:k=40"]
        res = mean["iknn:sim=res:p=2:level=both:k=50"]
        lch = mean["iknn:sim=lch:p=4:level=both:k=80"]
        dice_m = mean["iknn:sim=dice:k=70"]
        cf = mean["iknn:k=40"]
        assert lsi <= res and lsi <= lch
        assert res <= dice_m and lch <= dice_m
        assert dice_m <= cf

    def test_cold_start_variance_and_ordering(self):
        ws = paper_workspace()
        specs = [spec for spec, _, _ in WARM_TARGETS]
        methods_warm = [ws.make_predictor(s) for s in specs]
        warm = run_experiment(ws.ratings, methods_warm, scenario="warm", repeats=30)
        methods_cold = [ws.make_predictor(s) for s in specs]
        cold = run_experiment(ws.ratings, methods_cold, scenario="cold", repeats=30)
        for spec in specs:
            assert cold.method(spec).sd >= 5 * warm.method(spec).sd, spec
        global_cold = cold.method("globalavg").mean
        for spec in specs:
            if spec != "globalavg":
                assert cold.method(spec).mean < global_cold, spec

    def test_parameter_sweep_shape(self):
        ws = paper_workspace()
        backends = ["iknn:sim=lsi-40", "iknn:sim=dice", "iknn"]
        for base in backends:
            specs = [f"{base}:k={k}" for k in range(10, 51, 10)]
            methods = [ws.make_predictor(s) for s in specs]
            report = run_experiment(ws.ratings, methods, scenario="warm", repeats=10)
            means = [report.method(s).mean for s in specs]
            sds = [report.method(s).sd for s in specs]
            noise = max(sds)
            for prev, nxt in zip(means, means[1:]):
                assert nxt <= prev + noise, (base, means)
        lch_means = []
        for p in (1, 2, 4, 8):
            spec = f"iknn:sim=lch:p={p}:level=both:k=80"
            report = run_experiment(
                ws.ratings, [ws.make_predictor(spec)], scenario="warm", repeats=10
            )
            lch_means.append(report.method(spec).mean)
        assert max(lch_means) - min(lch_means) < 0.01, lch_means


class TestPropertySuite:
    def test_property_a_crisp_recovery(self):
        def delta(a, b):
            return 1.0 if a == b else 0.0

        rng = random.Random(11)
        for _ in range(200):
            n = rng.randint(1, 12)
            elements = [f"e{i}" for i in range(n)]
            p = rng.choice([0.25, 0.5, 1.0, 2.0, 4.0, 20.0])
            assert soft_cardinality_raw(elements, delta, p) == float(n)

    def test_property_b_softness_limits(self):
        rng = random.Random(12)
        for trial in range(40):
            n = rng.randint(2, 8)
            elements = [f"e{i}" for i in range(n)]
            table = {}
            for a, b in itertools.combinations(elements, 2):
                table[(a, b)] = rng.uniform(0.1, 0.6)

            def sim(a, b):
                if a == b:
                    return 1.0
                return table[(a, b) if (a, b) in table else (b, a)]

            low = soft_cardinality_raw(elements, sim, 1e-9)
            assert abs(low - 1.0) <= 1e-3, (trial, low)
            high = soft_cardinality_raw(elements, sim, 20.0)
            assert abs(high - n) <= 1e-3, (trial, high, n)

    def test_property_c_iknn_matches_bruteforce(self):
        def oracle(triples, sim_of, k, user, item):
            mu = sum(r for _, _, r in triples) / len(triples)
            b_i, b_u = {}, {}
            for i in {t[1] for t in triples}:
                rs = [r for _, j, r in triples if j == i]
                b_i[i] = sum(r - mu for r in rs) / (25.0 + len(rs))
            for u in {t[0] for t in triples}:
                rs = [(j, r) for uu, j, r in triples if uu == u]
                b_u[u] = sum(r - mu - b_i[j] for j, r in rs) / (10.0 + len(rs))

            def baseline(u, i):
                return mu + b_u.get(u, 0.0) + b_i.get(i, 0.0)

            hood = []
            for uu, j, r in triples:
                if uu != user or j == item:
                    continue
                s = sim_of(item, j)
                if s > 0.0:
                    hood.append((s, j, r))
            hood.sort(key=lambda t: (-t[0], t[1]))
            hood = hood[:k]
            if not hood:
                value = baseline(user, item)
            else:
                num = sum(s * (r - baseline(user, j)) for s, j, r in hood)
                den = sum(s for s, _, _ in hood)
                value = baseline(user, item) + num / den
            return min(10.0, max(1.0, value))

        rng = random.Random(13)
        checked = 0
        for n_users in range(1, 6):
            for n_items in range(1, 6):
                for _ in range(2):
                    users = [f"u{n}" for n in range(n_users)]
                    items = [f"i{n}" for n in range(n_items)]
                    triples = [
                        (u, i, float(rng.randint(1, 10)))
                        for u in users for i in items if rng.random() < 0.6
                    ]
                    if not triples:
                        continue
                    sims = {}
                    for a, b in itertools.combinations(sorted(items), 2):
                        sims[(a, b)] = round(rng.random(), 3) if rng.random() < 0.8 else 0.0

                    def sim_of(a, b):
                        if a == b:
                            return 1.0
                        key = (a, b) if a < b else (b, a)
                        return sims.get(key, 0.0)

                    matrix = SimilarityMatrix(sorted(items))
                    for (a, b), s in sims.items():
                        if s > 0.0:
                            matrix.set(a, b, s)
                    data = RatingsDataset(triples)
                    for k in (1, 2, 5):
                        model = IknnModel(
                            bias=fit_bias(data), sims=matrix, k=k, train=data
                        )
                        for u in users + ["ghost"]:
                            for i in items + ["phantom"]:
                                want = oracle(triples, sim_of, k, u, i)
                                assert predict_iknn(model, u, i) == want
                                checked += 1
        assert checked > 2000

    def test_property_d_bias_residual_identity(self):
        rng = random.Random(14)
        for _ in range(30):
            users = [f"u{n}" for n in range(rng.randint(2, 8))]
            items = [f"i{n}" for n in range(rng.randint(2, 8))]
            triples = [
                (u, i, float(rng.randint(1, 10)))
                for u in users for i in items if rng.random() < 0.7
            ]
            if not triples:
                continue
            data = RatingsDataset(triples)
            bias = fit_bias(data, lambda1=0.0, lambda2=0.0)
            by_item, by_user = {}, {}
            for u, i, r in triples:
                by_item.setdefault(i, []).append(r - bias.mu - bias.b_item[i])
                by_user.setdefault(u, []).append(
                    r - bias.mu - bias.b_item[i] - bias.b_user[u]
                )
            for i, residuals in by_item.items():
                assert abs(sum(residuals)) <= 1e-9, i
            for u, residuals in by_user.items():
                assert abs(sum(residuals)) <= 1e-9, u

    def test_property_e_fullrank_lsi_equals_tfidf(self):
        rng = random.Random(15)
        cons, vow = "bdfgklmnprstvz", "aeiou"
        vocab: set[str] = set()
        while len(vocab) < 30:
            vocab.add(
                "".join(rng.choice(cons) + rng.choice(vow) for _ in range(2))
                + rng.choice(cons)
            )
        words = sorted(vocab)
        docs = {
            f"d{n}": " ".join(rng.choices(words, k=60)) + "\n" for n in range(6)
        }
        corpus = TranscriptCorpus(per_item=docs)
        tfidf = build_text_similarity(corpus, backend="tfidf")
        lsi = build_text_similarity(corpus, backend="lsi", p=len(docs))
        ids = sorted(docs)
        for a, b in itertools.combinations(ids, 2):
            assert abs(tfidf.get(a, b) - lsi.get(a, b)) <= 1e-6, (a, b)

    def test_property_f_wilcoxon_exact_enumeration(self):
        def oracle_p(a, b):
            pooled = a + b
            n1 = len(a)

            def u_stat(xs, ys):
                u = 0.0
                for x in xs:
                    for y in ys:
                        if x > y:
                            u += 1.0
                        elif x == y:
                            u += 0.5
                return u

            observed = abs(u_stat(a, b) - len(a) * len(b) / 2.0)
            hits = total = 0
            for picks in itertools.combinations(range(len(pooled)), n1):
                chosen = set(picks)
                xs = [pooled[i] for i in range(len(pooled)) if i in chosen]
                ys = [pooled[i] for i in range(len(pooled)) if i not in chosen]
                if abs(u_stat(xs, ys) - len(xs) * len(ys) / 2.0) >= observed - 1e-12:
                    hits += 1
                total += 1
            return hits / total

        rng = random.Random(16)
        for n1 in range(2, 7):
            for n2 in range(2, 9 - n1):
                for _ in range(6):
                    a = [float(rng.randint(1, 4)) for _ in range(n1)]
                    b = [float(rng.randint(1, 4)) for _ in range(n2)]
                    _, p = wilcoxon_rank_sum(a, b)
                    assert p == pytest.approx(oracle_p(a, b), abs=1e-12), (a, b)

    def test_property_g_backends_symmetric_bounded_deterministic(
        self, small_workspace_dir
    ):
        tokens = [
            ("tfidf", None, None), ("lsi:10", None, None),
            ("jaccard", None, "both"), ("dice", None, "central"),
            ("cosidf", None, "central"), ("path", 2.0, "central"),
            ("wup", 2.0, "central"), ("lch", 4.0, "central"),
            ("lin", 2.0, "central"), ("res", 2.0, "central"),
            ("jcn", 2.0, "central"), ("cf", None, None),
        ]
        rng = random.Random(17)
        for token, p, level in tokens:
            spec = parse_measure(token, p=p, level=level)
            first = Workspace.open(small_workspace_dir)._build(spec)
            second = Workspace.open(small_workspace_dir)._build(spec)
            assert first.scores == second.scores, token
            assert first.scores, token
            for score in first.scores.values():
                assert 0.0 <= score <= 1.0
            ids = first.item_ids
            for _ in range(50):
                a, b = rng.choice(ids), rng.choice(ids)
                assert first.get(a, b) == first.get(b, a)

    def test_property_h_jaccard_le_dice(self):
        rng = random.Random(18)
        universe = [f"t{n}" for n in range(40)]
        for _ in range(10_000):
            a = {t for t in universe if rng.random() < 0.3}
            b = {t for t in universe if rng.random() < 0.3}
            assert jaccard(a, b) <= dice(a, b) + 1e-15

    def test_property_i_ic_monotone(self):
        rng = random.Random(19)
        for _ in range(25):
            n = rng.randint(3, 60)
            names = [f"n{k}" for k in range(n)]
            parent = {names[k]: names[rng.randrange(k)] for k in range(1, n)}
            onto = Ontology(root=names[0], parent=parent)
            per_item = {}
            for item in range(rng.randint(1, 12)):
                chosen = rng.sample(names, k=rng.randint(1, min(6, n)))
                per_item[f"ep{item}"] = {
                    (t, rng.choice(["central", "peripheral"])) for t in chosen
                }
            table = compute_ic(onto, ThemeAnnotationSet(per_item=per_item))
            for entity in onto.entities:
                if entity == onto.root:
                    continue
                assert table.ic[entity] >= table.ic[parent[entity]] - 1e-12


class TestEvaluationMachineryOnGeneratedCorpus:
    """Not a numbered criterion: demonstrates the full warm/cold protocol
    runs end to end on the paper-shaped generated corpus."""

    def test_warm_and_cold_protocol_run(self, paper_twin_dir):
        ws = Workspace.open(paper_twin_dir)
        methods = [ws.make_predictor(s) for s in ("iknn:k=40", "globalavg")]
        warm = run_experiment(ws.ratings, methods, scenario="warm", repeats=3)
        assert all(warm.method(m.name).complete for m in methods)
        methods = [ws.make_predictor(s) for s in ("iknn:k=40", "globalavg")]
        cold = run_experiment(ws.ratings, methods, scenario="cold", repeats=3)
        assert all(cold.method(m.name).complete for m in methods)
        for name in ("iknn:k=40", "globalavg"):
            for value in warm.method(name).rmse_values + cold.method(name).rmse_values:
                assert 0.0 <= value <= 9.0

    def test_rmse_definition_spot_check(self):
        assert rmse([(1.0, 3.0), (2.0, 2.0)]) == pytest.approx(math.sqrt(2.0))
