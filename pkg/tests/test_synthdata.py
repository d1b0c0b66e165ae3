"""Tests for the synthetic workspace generator."""

import random
import statistics

import pytest

from themetrek.corpus import (
    load_annotations,
    load_catalog,
    load_ratings,
    load_transcripts,
)
from themetrek.ontology import load_ontology
from themetrek.setsim import build_feature_sets, cosine_idf
from themetrek.synthdata import (
    DEVILS_DUE,
    FALSE_PROFITS,
    PROFILES,
    SHARED_CENTRAL,
    SMALL_PROFILE,
    _exact_sum_counts,
    check_explorer_anchor,
    generate,
    main,
    verify_shape,
    write_dataset,
)


@pytest.fixture(scope="module")
def small():
    return generate(SMALL_PROFILE, seed=7)


class TestExactSumCounts:
    def test_sums_and_bounds_hold(self):
        rng = random.Random(3)
        for _ in range(50):
            n = rng.randint(3, 40)
            lo, hi = 2, 30
            total = rng.randint(lo * n, hi * n)
            counts = _exact_sum_counts(random.Random(rng.random()), n, total, lo, hi)
            assert len(counts) == n
            assert sum(counts) == total
            assert all(lo <= c <= hi for c in counts)

    def test_infeasible_total_raises(self):
        with pytest.raises(ValueError):
            _exact_sum_counts(random.Random(0), 4, 7, lo=2, hi=30)
        with pytest.raises(ValueError):
            _exact_sum_counts(random.Random(0), 4, 200, lo=2, hi=30)


class TestGenerate:
    def test_shape_facts_match_profile(self, small):
        facts = verify_shape(small)
        assert facts["themes"] == 140
        assert facts["max_depth"] == 5
        assert facts["max_path"] == 9
        assert facts["episodes"] == 40
        assert facts["ratings"] == 420
        assert facts["users"] == 60
        assert facts["rated_items"] == 30

    def test_anchor_episodes_present_with_real_titles(self, small):
        assert small.catalog.get(FALSE_PROFITS).title == "False Profits"
        assert small.catalog.get(DEVILS_DUE).title == "Devil's Due"
        assert small.catalog.get(FALSE_PROFITS).series == "VOY"
        assert small.catalog.get(DEVILS_DUE).series == "TNG"

    def test_anchor_share_exactly_six_centrals(self, small):
        shared = small.annotations.themes_for(
            FALSE_PROFITS, "central"
        ) & small.annotations.themes_for(DEVILS_DUE, "central")
        assert shared == set(SHARED_CENTRAL)

    def test_anchor_tops_central_cosine(self, small):
        fs = build_feature_sets(small.annotations, level_filter="central")
        query = fs.per_item[FALSE_PROFITS]
        scores = {
            other: cosine_idf(query, fs.per_item[other], fs)
            for other in fs.per_item
            if other != FALSE_PROFITS
        }
        assert max(scores, key=scores.get) == DEVILS_DUE

    def test_central_means_hit_targets(self, small):
        counts = small.annotations.central_counts_by_series(small.catalog)
        for series, total in SMALL_PROFILE.central_sums.items():
            n = SMALL_PROFILE.series_episodes[series]
            assert sum(counts[series]) == total
            assert statistics.fmean(counts[series]) == total / n

    def test_every_episode_annotated_and_transcribed(self, small):
        ids = set(small.catalog.item_ids)
        assert set(small.annotations.per_item) == ids
        assert set(small.transcripts.per_item) == ids
        for item in ids:
            assert len(small.annotations.themes_for(item, "central")) >= 2
            assert len(small.transcripts.per_item[item].split()) >= 40

    def test_ratings_are_integers_on_scale(self, small):
        for _, _, rating in small.ratings.triples:
            assert rating == int(rating)
            assert 1.0 <= rating <= 10.0

    def test_every_rated_item_has_three_ratings(self, small):
        for item, positions in small.ratings.by_item.items():
            assert len(positions) >= 3, item

    def test_same_seed_reproduces_exactly(self, small):
        again = generate(SMALL_PROFILE, seed=7)
        assert again.ratings.triples == small.ratings.triples
        assert again.annotations.per_item == small.annotations.per_item
        assert again.ontology.parent == small.ontology.parent
        assert again.transcripts.per_item == small.transcripts.per_item

    def test_different_seed_changes_content(self, small):
        other = generate(SMALL_PROFILE, seed=8)
        assert other.ratings.triples != small.ratings.triples
        # shape facts stay pinned regardless of seed
        verify_shape(other)

    def test_anchor_check_rejects_drifted_sets(self, small):
        broken = {k: set(v) for k, v in small.annotations.per_item.items()}
        broken[DEVILS_DUE] = set(broken[FALSE_PROFITS])
        with pytest.raises(RuntimeError, match="shared central set drifted"):
            check_explorer_anchor(type(small.annotations)(per_item=broken))


class TestWriteDataset:
    def test_round_trip_preserves_content(self, small, tmp_path):
        write_dataset(small, tmp_path)
        onto = load_ontology(tmp_path / "ontology.tsv")
        catalog = load_catalog(tmp_path / "catalog.csv")
        ann = load_annotations(tmp_path / "annotations.tsv", catalog)
        ratings = load_ratings(tmp_path / "ratings.csv")
        transcripts = load_transcripts(tmp_path / "transcripts")

        assert onto.parent == small.ontology.parent
        assert catalog.item_ids == small.catalog.item_ids
        assert ann.per_item == small.annotations.per_item
        assert ratings.triples == small.ratings.triples
        assert transcripts.per_item == small.transcripts.per_item
        assert (tmp_path / "themetrek.cfg").exists()

    def test_titles_never_contain_commas(self, small):
        for entry in small.catalog.entries:
            assert "," not in entry.title


class TestMain:
    def test_writes_workspace_and_reports_facts(self, tmp_path, capsys):
        out = tmp_path / "ws"
        code = main(["--out", str(out), "--profile", "small", "--seed", "3"])
        assert code == 0
        captured = capsys.readouterr().out
        assert "themes: 140" in captured
        for name in ("ontology.tsv", "catalog.csv", "annotations.tsv",
                     "ratings.csv", "themetrek.cfg"):
            assert (out / name).exists()
        assert (out / "transcripts").is_dir()

    def test_refuses_non_empty_directory(self, tmp_path, capsys):
        out = tmp_path / "ws"
        out.mkdir()
        (out / "keep.txt").write_text("x")
        code = main(["--out", str(out), "--profile", "small"])
        assert code == 2
        assert "refusing" in capsys.readouterr().err

    def test_force_overwrites(self, tmp_path):
        out = tmp_path / "ws"
        out.mkdir()
        (out / "keep.txt").write_text("x")
        code = main(["--out", str(out), "--profile", "small", "--force"])
        assert code == 0
        assert (out / "ontology.tsv").exists()

    def test_profiles_registry_is_complete(self):
        assert set(PROFILES) == {"paper", "small"}
