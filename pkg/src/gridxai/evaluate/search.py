"""Random-search hyperparameter optimization over grouped CV."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from ..data.assemble import StudyDataset
from ..errors import InvalidInputError
from ..model import Hyperparameters, fit
from .scoring import r2
from .splits import GroupGapSplit, split

# (kind, low, high) ranges; "log" samples log-uniformly, "choice" picks a value
DEFAULT_SPACE = {
    "n_trees": ("int", 100, 1500),
    "max_depth": ("int", 3, 10),
    "learning_rate": ("log", 0.01, 0.3),
    "subsample_rows": ("float", 0.5, 1.0),
    "l2_leaf_penalty": ("float", 0.0, 10.0),
    "min_child_cover": ("int", 1, 50),
}


def sample_hyperparameters(space: dict, rng: np.random.Generator,
                           base: Optional[Hyperparameters] = None) -> Hyperparameters:
    if not space:
        raise InvalidInputError("empty search space")
    base = base or Hyperparameters()
    draws = {}
    for name in sorted(space):
        spec = space[name]
        kind = spec[0]
        if kind == "int":
            draws[name] = int(rng.integers(spec[1], spec[2] + 1))
        elif kind == "float":
            draws[name] = float(rng.uniform(spec[1], spec[2]))
        elif kind == "log":
            draws[name] = float(np.exp(rng.uniform(np.log(spec[1]), np.log(spec[2]))))
        elif kind == "choice":
            draws[name] = spec[1][int(rng.integers(len(spec[1])))]
        else:
            raise InvalidInputError(f"unknown range kind {kind!r} for {name!r}")
    hp = replace(base, **draws)
    hp.validate()
    return hp


def cross_val_score(dataset: StudyDataset, hp: Hyperparameters,
                    cv: GroupGapSplit) -> list[float]:
    """Per-fold held-out R^2 for one configuration."""
    X = dataset.features()
    y = dataset.volume
    scores = []
    for train_idx, test_idx in split(dataset.hours, cv):
        m = fit(X.iloc[train_idx], y[train_idx], hp)
        scores.append(r2(y[test_idx], m.predict(X.iloc[test_idx])))
    return scores


@dataclass
class SearchResult:
    best_hp: Hyperparameters
    best_trial: int
    trials: list[dict] = field(default_factory=list)

    @property
    def best_score(self) -> float:
        return self.trials[self.best_trial]["mean_score"]

    def to_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for t in self.trials:
                fh.write(json.dumps(t))
                fh.write("\n")


def random_search(dataset: StudyDataset, space: dict, n_trials: int,
                  cv: GroupGapSplit, seed: int = 0,
                  include_default: Optional[Hyperparameters] = None) -> SearchResult:
    """Sample n_trials configurations, score each by mean CV R^2, keep the best.

    Ties go to the earliest trial. When `include_default` is given it is
    evaluated as trial 0 so a search can never return something worse
    than the caller's baseline.
    """
    if not space:
        raise InvalidInputError("empty search space")
    if n_trials < 1:
        raise InvalidInputError("n_trials must be >= 1")
    rng = np.random.default_rng(seed)

    candidates: list[Hyperparameters] = []
    if include_default is not None:
        candidates.append(include_default)
    while len(candidates) < n_trials:
        candidates.append(sample_hyperparameters(space, rng))

    trials = []
    best_trial = -1
    best_score = -np.inf
    for i, hp in enumerate(candidates):
        fold_scores = cross_val_score(dataset, hp, cv)
        mean_score = float(np.mean(fold_scores))
        trials.append({
            "trial": i,
            "params": hp.to_dict(),
            "fold_scores": [float(s) for s in fold_scores],
            "mean_score": mean_score,
        })
        if mean_score > best_score:
            best_score = mean_score
            best_trial = i
    return SearchResult(best_hp=candidates[best_trial], best_trial=best_trial, trials=trials)
