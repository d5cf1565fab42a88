"""Exact Bayesian posterior over the finite parameter set."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .model import BanditInstance, outcome_support

BELIEF_TOL = 1e-10
OUTCOME_MATCH_TOL = 1e-9


class AllZeroLikelihood(ValueError):
    """The observed outcome has probability zero under every parameter."""


@dataclass(frozen=True)
class BeliefState:
    """Probability vector over the finite parameter set. Immutable value."""

    probs: NDArray

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size < 1:
            raise ValueError("belief must be a non-empty 1-D probability vector")
        if np.any(p < -BELIEF_TOL):
            raise ValueError("belief entries must be non-negative")
        total = p.sum()
        if abs(total - 1.0) > BELIEF_TOL:
            raise ValueError(f"belief must sum to 1, got {total!r}")
        p = np.clip(p, 0.0, None) / total
        object.__setattr__(self, "probs", p)
        p.setflags(write=False)

    @classmethod
    def uniform(cls, m: int) -> "BeliefState":
        return cls(np.full(m, 1.0 / m))

    @classmethod
    def point_mass(cls, m: int, idx: int) -> "BeliefState":
        p = np.zeros(m)
        p[idx] = 1.0
        return cls(p)


def outcome_likelihoods(
    instance: BanditInstance, action_idx: int, outcome: float
) -> NDArray:
    """P(outcome | action, theta_i) for every parameter i."""
    values, probs = outcome_support(instance, action_idx)
    matches = np.abs(values - outcome) <= OUTCOME_MATCH_TOL
    if not matches.any():
        return np.zeros(instance.n_params)
    return probs[:, matches].sum(axis=1)


def posterior_update(
    belief: BeliefState, instance: BanditInstance, action_idx: int, outcome: float
) -> BeliefState:
    """Exact Bayes update after observing ``outcome`` from ``action_idx``.

    Parameters with zero likelihood drop to probability zero. Raises
    :class:`AllZeroLikelihood` if nothing in the support explains the outcome.
    """
    like = outcome_likelihoods(instance, action_idx, outcome)
    post = belief.probs * like
    total = post.sum()
    if total <= 0.0:
        # direct product underflows only for huge m; redo in log space
        if np.any((belief.probs > 0) & (like > 0)):
            logp = np.where(belief.probs > 0, np.log(belief.probs, where=belief.probs > 0), -np.inf)
            logl = np.where(like > 0, np.log(like, where=like > 0), -np.inf)
            logpost = logp + logl
            logpost -= logpost.max()
            post = np.exp(logpost)
            total = post.sum()
        else:
            raise AllZeroLikelihood(
                f"outcome {outcome!r} impossible for action {action_idx} under every parameter"
            )
    return BeliefState(post / total)


def optimal_action_distribution(
    belief: BeliefState, instance: BanditInstance
) -> NDArray:
    """Pushforward of the belief through the best-action map alpha."""
    return np.bincount(
        instance.astar, weights=belief.probs, minlength=instance.n_actions
    )


def sample_parameter(belief: BeliefState, rng: np.random.Generator) -> int:
    """Inverse-CDF draw over the fixed parameter ordering (reproducible)."""
    cdf = np.cumsum(belief.probs)
    u = rng.random()
    return int(min(np.searchsorted(cdf, u, side="right"), belief.probs.size - 1))


@dataclass(frozen=True)
class History:
    """Ordered record of (sampled parameter, action, observed outcome) steps."""

    steps: tuple[tuple[int, int, float], ...]

    def to_jsonl(self) -> str:
        return "\n".join(
            json.dumps({"param": p, "action": a, "outcome": y})
            for p, a, y in self.steps
        )

    @classmethod
    def from_jsonl(cls, text: str) -> "History":
        steps = []
        for line in text.splitlines():
            if not line.strip():
                continue
            doc = json.loads(line)
            steps.append((int(doc["param"]), int(doc["action"]), float(doc["outcome"])))
        return cls(steps=tuple(steps))
