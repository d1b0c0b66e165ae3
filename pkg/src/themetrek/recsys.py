"""Rating predictors.

The central predictor blends a regularized bias baseline with a
similarity-weighted average of the user's ratings on the k items nearest the
target, where the similarity matrix can come from collaborative correlations
or from any of the content/tag/ontology backends. Reference methods (UserKNN,
Slope One, biased matrix factorization, trivial baselines) share the same
fit/predict protocol so the evaluation harness can treat them uniformly.

All predictions are clamped to the rating scale [1, 10].
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .corpus import (
    RATING_MAX,
    RATING_MIN,
    RatingsDataset,
    SimilarityMatrix,
    ValidationError,
)

DEFAULT_LAMBDA1 = 25.0
DEFAULT_LAMBDA2 = 10.0
DEFAULT_SHRINKAGE = 10.0


def _clamp(value: float) -> float:
    return min(RATING_MAX, max(RATING_MIN, value))


class Predictor(Protocol):
    name: str

    def fit(self, train: RatingsDataset, seed: int = 0) -> None: ...

    def predict(self, user: str, item: str) -> float: ...


@dataclass
class BiasModel:
    """Global mean with regularized item and user deviations."""

    mu: float
    b_item: dict[str, float]
    b_user: dict[str, float]
    lambda1: float
    lambda2: float

    def baseline(self, user: str, item: str) -> float:
        """mu + b_u + b_i with unknown ids contributing 0."""
        return self.mu + self.b_user.get(user, 0.0) + self.b_item.get(item, 0.0)


def fit_bias(
    train: RatingsDataset,
    lambda1: float = DEFAULT_LAMBDA1,
    lambda2: float = DEFAULT_LAMBDA2,
) -> BiasModel:
    """Item deviations first, then user deviations against them."""
    if len(train) == 0:
        raise ValidationError("cannot fit bias model on an empty training set")
    if lambda1 < 0 or lambda2 < 0:
        raise ValidationError("regularization weights must be >= 0")
    mu = train.mean_rating()
    b_item: dict[str, float] = {}
    for item in train.by_item:
        ratings = train.item_ratings(item)
        b_item[item] = sum(r - mu for _, r in ratings) / (lambda1 + len(ratings))
    b_user: dict[str, float] = {}
    for user in train.by_user:
        ratings = train.user_ratings(user)
        b_user[user] = sum(r - mu - b_item[i] for i, r in ratings) / (
            lambda2 + len(ratings)
        )
    return BiasModel(mu=mu, b_item=b_item, b_user=b_user, lambda1=lambda1, lambda2=lambda2)


def _pearson_pairs(groups, shrinkage: float) -> dict[tuple[str, str], float]:
    """Shrunk, non-negative Pearson over co-observations within each group."""
    stats: dict[tuple[str, str], list[float]] = {}
    for ratings in groups:
        entries = sorted(ratings)
        for x in range(len(entries)):
            kx, rx = entries[x]
            for y in range(x + 1, len(entries)):
                ky, ry = entries[y]
                st = stats.setdefault((kx, ky), [0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
                st[0] += 1.0
                st[1] += rx
                st[2] += ry
                st[3] += rx * ry
                st[4] += rx * rx
                st[5] += ry * ry
    scores: dict[tuple[str, str], float] = {}
    for pair, (n, sx, sy, sxy, sxx, syy) in stats.items():
        if n < 2:
            continue
        cov = n * sxy - sx * sy
        var = (n * sxx - sx * sx) * (n * syy - sy * sy)
        if var <= 0.0 or cov <= 0.0:
            continue
        rho = min(1.0, cov / math.sqrt(var))
        s = rho * (n / (n + shrinkage))
        if s > 0.0:
            scores[pair] = s
    return scores


def cf_item_similarity(
    train: RatingsDataset, shrinkage: float = DEFAULT_SHRINKAGE
) -> SimilarityMatrix:
    """Item-item correlations over users who rated both items."""
    if len(train) == 0:
        raise ValidationError("cannot compute item correlations on an empty training set")
    groups = (train.user_ratings(u) for u in train.by_user)
    matrix = SimilarityMatrix(sorted(train.by_item))
    for (a, b), s in _pearson_pairs(groups, shrinkage).items():
        matrix.set(a, b, s)
    return matrix


def cf_user_similarity(
    train: RatingsDataset, shrinkage: float = DEFAULT_SHRINKAGE
) -> SimilarityMatrix:
    """User-user correlations over items both users rated."""
    if len(train) == 0:
        raise ValidationError("cannot compute user correlations on an empty training set")
    groups = (train.item_ratings(i) for i in train.by_item)
    matrix = SimilarityMatrix(sorted(train.by_user))
    for (a, b), s in _pearson_pairs(groups, shrinkage).items():
        matrix.set(a, b, s)
    return matrix


@dataclass
class IknnModel:
    bias: BiasModel
    sims: SimilarityMatrix
    k: int
    train: RatingsDataset

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError(f"neighborhood size must be >= 1, got {self.k}")


def predict_iknn(model: IknnModel, user: str, item: str) -> float:
    """Bias baseline plus the weighted residual of the k nearest rated items.

    Neighbors need strictly positive similarity; with none available the
    baseline stands alone. Ties in similarity break by item id. The target
    item never acts as its own neighbor, so scaling every pairwise score by a
    positive constant cannot change the output.
    """
    base = model.bias.baseline(user, item)
    scored = []
    for j, r in model.train.user_ratings(user):
        if j == item:
            continue
        s = model.sims.get(item, j)
        if s > 0.0:
            scored.append((s, j, r))
    scored.sort(key=lambda t: (-t[0], t[1]))
    top = scored[: model.k]
    if not top:
        return _clamp(base)
    num = sum(s * (r - model.bias.baseline(user, j)) for s, j, r in top)
    den = sum(s for s, _, _ in top)
    return _clamp(base + num / den)


class ItemKnnPredictor:
    """Item-neighborhood predictor over a fixed or train-derived similarity matrix."""

    def __init__(
        self,
        name: str = "iknn",
        k: int = 40,
        sims: SimilarityMatrix | None = None,
        sim_builder=None,
        lambda1: float = DEFAULT_LAMBDA1,
        lambda2: float = DEFAULT_LAMBDA2,
        shrinkage: float = DEFAULT_SHRINKAGE,
    ):
        if sims is not None and sim_builder is not None:
            raise ValidationError("pass either a similarity matrix or a builder, not both")
        self.name = name
        self.k = k
        self._static_sims = sims
        self._sim_builder = sim_builder
        self.lambda1 = lambda1
        self.lambda2 = lambda2
        self.shrinkage = shrinkage
        self.model: IknnModel | None = None

    def fit(self, train: RatingsDataset, seed: int = 0) -> None:
        bias = fit_bias(train, self.lambda1, self.lambda2)
        if self._static_sims is not None:
            sims = self._static_sims
        elif self._sim_builder is not None:
            sims = self._sim_builder(train)
        else:
            sims = cf_item_similarity(train, self.shrinkage)
        self.model = IknnModel(bias=bias, sims=sims, k=self.k, train=train)

    def predict(self, user: str, item: str) -> float:
        return predict_iknn(self.model, user, item)


class UserKnnPredictor:
    """Mirror of the item predictor with user roles: neighbors are similar users."""

    def __init__(
        self,
        name: str = "userknn",
        k: int = 80,
        lambda1: float = DEFAULT_LAMBDA1,
        lambda2: float = DEFAULT_LAMBDA2,
        shrinkage: float = DEFAULT_SHRINKAGE,
    ):
        if k < 1:
            raise ValidationError(f"neighborhood size must be >= 1, got {k}")
        self.name = name
        self.k = k
        self.lambda1 = lambda1
        self.lambda2 = lambda2
        self.shrinkage = shrinkage

    def fit(self, train: RatingsDataset, seed: int = 0) -> None:
        self.bias = fit_bias(train, self.lambda1, self.lambda2)
        self.sims = cf_user_similarity(train, self.shrinkage)
        self.train = train

    def predict(self, user: str, item: str) -> float:
        base = self.bias.baseline(user, item)
        scored = []
        for v, r in self.train.item_ratings(item):
            if v == user:
                continue
            s = self.sims.get(user, v)
            if s > 0.0:
                scored.append((s, v, r))
        scored.sort(key=lambda t: (-t[0], t[1]))
        top = scored[: self.k]
        if not top:
            return _clamp(base)
        num = sum(s * (r - self.bias.baseline(v, item)) for s, v, r in top)
        den = sum(s for s, _, _ in top)
        return _clamp(base + num / den)


class SlopeOnePredictor:
    """Weighted Slope One: co-rating-count-weighted average deviations."""

    def __init__(self, name: str = "slopeone"):
        self.name = name

    def fit(self, train: RatingsDataset, seed: int = 0) -> None:
        self.bias = fit_bias(train)
        self.train = train
        # (a, b) with a < b -> [sum of (r_a - r_b), co-rating count]
        self.diffs: dict[tuple[str, str], list[float]] = {}
        for user in train.by_user:
            entries = sorted(train.user_ratings(user))
            for x in range(len(entries)):
                ix, rx = entries[x]
                for y in range(x + 1, len(entries)):
                    iy, ry = entries[y]
                    st = self.diffs.setdefault((ix, iy), [0.0, 0.0])
                    st[0] += rx - ry
                    st[1] += 1.0

    def predict(self, user: str, item: str) -> float:
        num = 0.0
        den = 0.0
        for j, r in self.train.user_ratings(user):
            if j == item:
                continue
            key = (item, j) if item < j else (j, item)
            st = self.diffs.get(key)
            if st is None:
                continue
            total, count = st
            dev = total / count if key[0] == item else -total / count
            num += (dev + r) * count
            den += count
        if den == 0.0:
            return _clamp(self.bias.baseline(user, item))
        return _clamp(num / den)


class BiasedMFPredictor:
    """Matrix factorization with learned biases, trained by SGD.

    The rating order is shuffled once at fit time and reused every epoch, so
    the loss trajectory is reproducible for a given seed; ``loss_history``
    records the full objective after each epoch.
    """

    def __init__(
        self,
        name: str = "biasedmf",
        factors: int = 10,
        learning_rate: float = 0.005,
        reg: float = 0.02,
        epochs: int = 50,
    ):
        if factors < 1:
            raise ValidationError(f"factor count must be >= 1, got {factors}")
        self.name = name
        self.factors = factors
        self.learning_rate = learning_rate
        self.reg = reg
        self.epochs = epochs

    def fit(self, train: RatingsDataset, seed: int = 0) -> None:
        if len(train) == 0:
            raise ValidationError("cannot fit on an empty training set")
        rng = random.Random(seed)
        self.mu = train.mean_rating()
        self.users = sorted(train.by_user)
        self.items = sorted(train.by_item)
        uidx = {u: n for n, u in enumerate(self.users)}
        iidx = {i: n for n, i in enumerate(self.items)}
        f = self.factors
        self.P = np.array(
            [[rng.uniform(-0.01, 0.01) for _ in range(f)] for _ in self.users]
        )
        self.Q = np.array(
            [[rng.uniform(-0.01, 0.01) for _ in range(f)] for _ in self.items]
        )
        self.bu = np.zeros(len(self.users))
        self.bi = np.zeros(len(self.items))
        self._uidx = uidx
        self._iidx = iidx

        triples = [(uidx[u], iidx[i], r) for u, i, r in train.triples]
        order = list(range(len(triples)))
        rng.shuffle(order)

        uarr = np.array([t[0] for t in triples])
        iarr = np.array([t[1] for t in triples])
        rarr = np.array([t[2] for t in triples])
        lr, reg = self.learning_rate, self.reg
        self.loss_history: list[float] = []
        for _ in range(self.epochs):
            for pos in order:
                ui, ii, r = triples[pos]
                err = r - (self.mu + self.bu[ui] + self.bi[ii] + self.P[ui] @ self.Q[ii])
                self.bu[ui] += lr * (err - reg * self.bu[ui])
                self.bi[ii] += lr * (err - reg * self.bi[ii])
                pu = self.P[ui].copy()
                self.P[ui] += lr * (err * self.Q[ii] - reg * pu)
                self.Q[ii] += lr * (err * pu - reg * self.Q[ii])
            preds = (
                self.mu
                + self.bu[uarr]
                + self.bi[iarr]
                + np.einsum("ij,ij->i", self.P[uarr], self.Q[iarr])
            )
            loss = float(
                np.sum((rarr - preds) ** 2)
                + reg
                * (
                    np.sum(self.bu**2)
                    + np.sum(self.bi**2)
                    + np.sum(self.P**2)
                    + np.sum(self.Q**2)
                )
            )
            self.loss_history.append(loss)

    def predict(self, user: str, item: str) -> float:
        value = self.mu
        ui = self._uidx.get(user)
        ii = self._iidx.get(item)
        if ui is not None:
            value += self.bu[ui]
        if ii is not None:
            value += self.bi[ii]
        if ui is not None and ii is not None:
            value += float(self.P[ui] @ self.Q[ii])
        return _clamp(value)


class UserItemBaseline:
    def __init__(self, name: str = "useritem", lambda1: float = DEFAULT_LAMBDA1, lambda2: float = DEFAULT_LAMBDA2):
        self.name = name
        self.lambda1 = lambda1
        self.lambda2 = lambda2

    def fit(self, train: RatingsDataset, seed: int = 0) -> None:
        self.bias = fit_bias(train, self.lambda1, self.lambda2)

    def predict(self, user: str, item: str) -> float:
        return _clamp(self.bias.baseline(user, item))


class ItemAverageBaseline:
    def __init__(self, name: str = "itemavg"):
        self.name = name

    def fit(self, train: RatingsDataset, seed: int = 0) -> None:
        self.mu = train.mean_rating()
        self.means = {
            i: sum(r for _, r in train.item_ratings(i)) / len(train.item_ratings(i))
            for i in train.by_item
        }

    def predict(self, user: str, item: str) -> float:
        return _clamp(self.means.get(item, self.mu))


class UserAverageBaseline:
    def __init__(self, name: str = "useravg"):
        self.name = name

    def fit(self, train: RatingsDataset, seed: int = 0) -> None:
        self.mu = train.mean_rating()
        self.means = {
            u: sum(r for _, r in train.user_ratings(u)) / len(train.user_ratings(u))
            for u in train.by_user
        }

    def predict(self, user: str, item: str) -> float:
        return _clamp(self.means.get(user, self.mu))


class GlobalAverageBaseline:
    def __init__(self, name: str = "globalavg"):
        self.name = name

    def fit(self, train: RatingsDataset, seed: int = 0) -> None:
        self.mu = train.mean_rating()

    def predict(self, user: str, item: str) -> float:
        return _clamp(self.mu)


class RandomBaseline:
    """Uniform predictions that are deterministic per (seed, user, item).

    Hashing the triple instead of sharing one stream keeps predictions
    independent of call order, so concurrent evaluation stays reproducible.
    """

    def __init__(self, name: str = "random"):
        self.name = name
        self.seed = 0

    def fit(self, train: RatingsDataset, seed: int = 0) -> None:
        self.seed = seed

    def predict(self, user: str, item: str) -> float:
        return random.Random(f"{self.seed}:{user}:{item}").uniform(RATING_MIN, RATING_MAX)
