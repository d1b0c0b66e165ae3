"""Experimental protocol: splits, RMSE, repeated trials, significance tests.

Two splitting regimes are supported. The warm split partitions individual
ratings uniformly at random, so test items usually retain other ratings in
train. The cold split removes whole items: every rating of a held-out item
moves to test, which is what makes the scenario cold for item-side methods.

run_experiment drives seeded repetitions with a paired design: within one
repeat every method sees the identical train/test partition, so per-repeat
RMSE lists are directly comparable and feed the Wilcoxon tests.
"""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass, field
from itertools import combinations

from .corpus import RatingsDataset, ValidationError

SCENARIOS = ("warm", "cold")
SIGNIFICANCE_THRESHOLD = 0.01
EXACT_RANKSUM_LIMIT = 16
EXACT_SIGNED_LIMIT = 16


@dataclass
class Split:
    train: RatingsDataset
    test: RatingsDataset
    scenario: str
    seed: int

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValidationError(f"unknown scenario {self.scenario!r}")


def warm_split(data: RatingsDataset, test_fraction: float, seed: int) -> Split:
    """Uniformly random rating-level partition; test gets round(fraction*N)."""
    if not 0.0 < test_fraction < 1.0:
        raise ValidationError(f"test fraction must be in (0,1), got {test_fraction}")
    n = len(data)
    if n < 2:
        raise ValidationError("need at least 2 ratings to split")
    n_test = max(1, round(test_fraction * n))
    if n_test >= n:
        raise ValidationError("test fraction leaves no training data")
    positions = list(range(n))
    random.Random(seed).shuffle(positions)
    test_pos = sorted(positions[:n_test])
    train_pos = sorted(positions[n_test:])
    return Split(
        train=data.subset(train_pos),
        test=data.subset(test_pos),
        scenario="warm",
        seed=seed,
    )


def cold_split(data: RatingsDataset, target_fraction: float, seed: int) -> Split:
    """Item-level partition: whole items move to test until their ratings
    first cover at least target_fraction of the total."""
    if not 0.0 < target_fraction < 1.0:
        raise ValidationError(f"target fraction must be in (0,1), got {target_fraction}")
    items = sorted(data.by_item)
    if len(items) < 2:
        raise ValidationError("need at least 2 distinct items for an item-level split")
    rng = random.Random(seed)
    rng.shuffle(items)
    target = target_fraction * len(data)
    test_items: set[str] = set()
    covered = 0
    for item in items:
        test_items.add(item)
        covered += len(data.by_item[item])
        if covered >= target:
            break
    if len(test_items) == len(items):
        raise ValidationError("target fraction consumes every item, leaving no training data")
    test_pos = sorted(p for item in test_items for p in data.by_item[item])
    chosen = set(test_pos)
    train_pos = [p for p in range(len(data)) if p not in chosen]
    return Split(
        train=data.subset(train_pos),
        test=data.subset(test_pos),
        scenario="cold",
        seed=seed,
    )


def rmse(predictions: list[tuple[float, float]]) -> float:
    """Root mean squared difference over (predicted, actual) pairs."""
    if not predictions:
        raise ValidationError("cannot compute rmse of an empty prediction list")
    return math.sqrt(
        sum((p - a) ** 2 for p, a in predictions) / len(predictions)
    )


def _midranks(values: list[float]) -> list[float]:
    """Ranks 1..n with tied values sharing the average of their positions."""
    order = sorted(range(len(values)), key=lambda n: values[n])
    ranks = [0.0] * len(values)
    pos = 0
    while pos < len(order):
        end = pos
        while end + 1 < len(order) and values[order[end + 1]] == values[order[pos]]:
            end += 1
        avg = (pos + end) / 2.0 + 1.0
        for q in range(pos, end + 1):
            ranks[order[q]] = avg
        pos = end + 1
    return ranks


def _normal_sf_twosided(z: float) -> float:
    return math.erfc(abs(z) / math.sqrt(2.0))


def wilcoxon_rank_sum(a: list[float], b: list[float]) -> tuple[float, float]:
    """Two-sided rank-sum test; returns (U statistic for a, p-value).

    Small samples get the exact permutation distribution over the midranks;
    larger ones use the normal approximation with tie correction and a
    continuity correction.
    """
    n1, n2 = len(a), len(b)
    if n1 < 2 or n2 < 2:
        raise ValidationError("both samples need at least 2 values")
    combined = list(a) + list(b)
    if all(v == combined[0] for v in combined):
        return (n1 * n2 / 2.0, 1.0)
    ranks = _midranks(combined)
    r1 = sum(ranks[:n1])
    u_obs = r1 - n1 * (n1 + 1) / 2.0
    mean_u = n1 * n2 / 2.0

    n = n1 + n2
    if n <= EXACT_RANKSUM_LIMIT:
        offset = n1 * (n1 + 1) / 2.0
        observed = abs(u_obs - mean_u)
        hits = 0
        total = 0
        for subset in combinations(range(n), n1):
            u = sum(ranks[q] for q in subset) - offset
            # tolerate float dust so boundary permutations always count
            if abs(u - mean_u) >= observed - 1e-12:
                hits += 1
            total += 1
        return (u_obs, hits / total)

    tie_counts: dict[float, int] = {}
    for v in combined:
        tie_counts[v] = tie_counts.get(v, 0) + 1
    tie_term = sum(t**3 - t for t in tie_counts.values())
    var_u = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var_u <= 0.0:
        return (u_obs, 1.0)
    shift = u_obs - mean_u
    correction = 0.5 if shift > 0 else (-0.5 if shift < 0 else 0.0)
    z = (shift - correction) / math.sqrt(var_u)
    return (u_obs, min(1.0, _normal_sf_twosided(z)))


def wilcoxon_signed_rank(a: list[float], b: list[float]) -> tuple[float, float]:
    """Two-sided paired test on elementwise differences; returns (W+, p).

    Zero differences drop out; all-zero input gives p = 1.
    """
    if len(a) != len(b):
        raise ValidationError("paired test needs samples of equal length")
    if len(a) < 2:
        raise ValidationError("both samples need at least 2 values")
    diffs = [x - y for x, y in zip(a, b) if x != y]
    if not diffs:
        return (0.0, 1.0)
    ranks = _midranks([abs(d) for d in diffs])
    w_plus = sum(r for d, r in zip(diffs, ranks) if d > 0)
    mean_w = sum(ranks) / 2.0
    n = len(diffs)
    if n <= EXACT_SIGNED_LIMIT:
        observed = abs(w_plus - mean_w)
        hits = 0
        for mask in range(1 << n):
            w = sum(ranks[q] for q in range(n) if mask & (1 << q))
            if abs(w - mean_w) >= observed - 1e-12:
                hits += 1
        return (w_plus, hits / (1 << n))
    var_w = sum(r * r for r in ranks) / 4.0
    if var_w <= 0.0:
        return (w_plus, 1.0)
    shift = w_plus - mean_w
    correction = 0.5 if shift > 0 else (-0.5 if shift < 0 else 0.0)
    z = (shift - correction) / math.sqrt(var_w)
    return (w_plus, min(1.0, _normal_sf_twosided(z)))


@dataclass
class MethodResult:
    name: str
    rmse_values: list[float] = field(default_factory=list)
    failures: list[tuple[int, str]] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not self.failures

    @property
    def mean(self) -> float:
        return statistics.fmean(self.rmse_values)

    @property
    def sd(self) -> float:
        return statistics.stdev(self.rmse_values) if len(self.rmse_values) > 1 else 0.0


@dataclass
class ExperimentReport:
    scenario: str
    repeats: int
    master_seed: int
    test_fraction: float
    methods: list[MethodResult]
    p_values: dict[tuple[str, str], float]
    p_values_paired: dict[tuple[str, str], float] | None
    achieved_test_fractions: list[float]

    def method(self, name: str) -> MethodResult:
        for m in self.methods:
            if m.name == name:
                return m
        raise KeyError(name)

    def config(self) -> dict:
        return {
            "scenario": self.scenario,
            "repeats": self.repeats,
            "master_seed": self.master_seed,
            "test_fraction": self.test_fraction,
            "methods": [m.name for m in self.methods],
            "achieved_test_fractions": self.achieved_test_fractions,
        }

    def p_value(self, name_a: str, name_b: str) -> float | None:
        key = (name_a, name_b) if name_a < name_b else (name_b, name_a)
        return self.p_values.get(key)

    def _ranked(self) -> list[MethodResult]:
        scored = [m for m in self.methods if m.rmse_values]
        unscored = [m for m in self.methods if not m.rmse_values]
        return sorted(scored, key=lambda m: (m.mean, m.name)) + unscored

    def detail_tsv(self) -> str:
        lines = ["method\tscenario\trepeat\trmse"]
        for m in self.methods:
            for r, value in enumerate(m.rmse_values):
                lines.append(f"{m.name}\t{self.scenario}\t{r}\t{value!r}")
        return "\n".join(lines) + "\n"

    def summary_tsv(self) -> str:
        ranked = self._ranked()
        header = ["method", "mean_rmse", "sd", "repeats_completed"]
        header += [f"p_vs_{m.name}" for m in ranked]
        lines = ["\t".join(header)]
        for m in ranked:
            row = [m.name]
            if m.rmse_values:
                row += [f"{m.mean:.6f}", f"{m.sd:.6f}"]
            else:
                row += ["nan", "nan"]
            row.append(str(len(m.rmse_values)))
            for other in ranked:
                if other.name == m.name:
                    row.append("-")
                    continue
                p = self.p_value(m.name, other.name)
                row.append("nan" if p is None else f"{p:.6g}")
            lines.append("\t".join(row))
        return "\n".join(lines) + "\n"

    def render_table(self) -> str:
        """Console summary sorted by mean RMSE ascending; '*' marks pairs
        separated at p < 0.01 from the next-ranked method."""
        ranked = self._ranked()
        width = max([len("method")] + [len(m.name) for m in ranked]) + 2
        lines = [
            f"{'method'.ljust(width)}{'mean_rmse':>10}  {'sd':>8}  {'vs_next':>8}",
        ]
        for pos, m in enumerate(ranked):
            if not m.rmse_values:
                lines.append(f"{m.name.ljust(width)}{'failed':>10}")
                continue
            marker = ""
            if pos + 1 < len(ranked) and ranked[pos + 1].rmse_values:
                p = self.p_value(m.name, ranked[pos + 1].name)
                if p is not None:
                    marker = f"{p:.4f}" + ("*" if p < SIGNIFICANCE_THRESHOLD else "")
            suffix = "" if m.complete else "  (incomplete)"
            lines.append(
                f"{m.name.ljust(width)}{m.mean:>10.4f}  {m.sd:>8.4f}  {marker:>8}{suffix}"
            )
        return "\n".join(lines) + "\n"


def run_experiment(
    data: RatingsDataset,
    methods: list,
    scenario: str = "warm",
    repeats: int = 30,
    master_seed: int = 0,
    test_fraction: float = 0.3,
    paired_test: bool = False,
) -> ExperimentReport:
    """Seeded repeated holdout. Repeat r splits with seed master_seed+r and
    every method fits on the same partition, so results are paired."""
    if scenario not in SCENARIOS:
        raise ValidationError(f"unknown scenario {scenario!r}")
    if repeats < 2:
        raise ValidationError(f"need at least 2 repeats, got {repeats}")
    if not methods:
        raise ValidationError("need at least one method")
    names = [m.name for m in methods]
    if len(set(names)) != len(names):
        raise ValidationError(f"duplicate method names: {sorted(names)}")

    results = {m.name: MethodResult(name=m.name) for m in methods}
    achieved: list[float] = []
    for r in range(repeats):
        seed = master_seed + r
        if scenario == "warm":
            split = warm_split(data, test_fraction, seed)
        else:
            split = cold_split(data, test_fraction, seed)
        achieved.append(len(split.test) / len(data))
        for m in methods:
            try:
                m.fit(split.train, seed=seed)
                pairs = [
                    (m.predict(u, i), rating) for u, i, rating in split.test.triples
                ]
                results[m.name].rmse_values.append(rmse(pairs))
            except Exception as exc:  # noqa: BLE001 - failures belong in the report
                results[m.name].failures.append((r, str(exc)))

    p_values: dict[tuple[str, str], float] = {}
    p_paired: dict[tuple[str, str], float] = {} if paired_test else None
    complete = [results[n] for n in names if results[n].complete]
    for ma, mb in combinations(complete, 2):
        key = (ma.name, mb.name) if ma.name < mb.name else (mb.name, ma.name)
        p_values[key] = wilcoxon_rank_sum(ma.rmse_values, mb.rmse_values)[1]
        if paired_test:
            p_paired[key] = wilcoxon_signed_rank(ma.rmse_values, mb.rmse_values)[1]

    return ExperimentReport(
        scenario=scenario,
        repeats=repeats,
        master_seed=master_seed,
        test_fraction=test_fraction,
        methods=[results[n] for n in names],
        p_values=p_values,
        p_values_paired=p_paired,
        achieved_test_fractions=achieved,
    )
