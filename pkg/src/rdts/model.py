"""Finite Bayesian bandit instances: action/parameter sets and outcome models.

An instance couples a finite action set and a finite parameter set (both
living in the closed unit ball of R^d) with one of three outcome models:

* ``linear_binary`` -- mean reward ``a.theta / 2``, outcomes ``{-1/2, +1/2}``;
* ``glm`` -- logistic-link mean ``phi(a.theta)`` plus symmetric two-point
  noise ``+/- eta``;
* ``logistic`` -- Bernoulli outcome in ``{0, 1}`` with success probability
  ``phi(a.theta)``.

All mean rewards and outcome pmfs are exact closed forms, so downstream
information quantities can be computed by finite summation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

NORM_TOL = 1e-12
PMF_TOL = 1e-12

LINEAR_BINARY = "linear_binary"
GLM = "glm"
LOGISTIC = "logistic"

_KINDS = (LINEAR_BINARY, GLM, LOGISTIC)


class InvalidInstanceError(ValueError):
    """An instance violates a model invariant (e.g. probability outside [0,1])."""


@dataclass(frozen=True)
class OutcomeModel:
    """Outcome model descriptor.

    ``beta`` is the logistic steepness (used by ``glm`` and ``logistic``);
    ``eta`` is the half-width of the two-point reward noise (``glm`` only).
    """

    kind: str
    beta: float | None = None
    eta: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise InvalidInstanceError(f"unknown model kind {self.kind!r}")
        if self.kind in (GLM, LOGISTIC):
            if self.beta is None or self.beta <= 0:
                raise InvalidInstanceError("glm/logistic models need beta > 0")
        if self.kind == GLM:
            if self.eta is None or self.eta < 0:
                raise InvalidInstanceError("glm models need noise half-width eta >= 0")

    def link(self, x: NDArray | float) -> NDArray | float:
        """Strictly increasing link: sigmoid with steepness beta."""
        assert self.beta is not None
        return 1.0 / (1.0 + np.exp(-self.beta * np.asarray(x, dtype=float)))

    def link_inv(self, y: NDArray | float) -> NDArray | float:
        assert self.beta is not None
        y = np.asarray(y, dtype=float)
        return np.log(y / (1.0 - y)) / self.beta

    def link_deriv(self, x: NDArray | float) -> NDArray | float:
        assert self.beta is not None
        p = self.link(x)
        return self.beta * p * (1.0 - p)

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.beta is not None:
            out["beta"] = self.beta
        if self.eta is not None:
            out["eta"] = self.eta
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "OutcomeModel":
        return cls(kind=d["kind"], beta=d.get("beta"), eta=d.get("eta"))


def _check_ball(vectors: NDArray, name: str) -> None:
    if vectors.ndim != 2 or vectors.shape[0] == 0 or vectors.shape[1] < 1:
        raise InvalidInstanceError(f"{name} must be a non-empty (count, d) array")
    norms = np.linalg.norm(vectors, axis=1)
    if np.any(norms > 1.0 + NORM_TOL):
        raise InvalidInstanceError(f"{name} contains vectors with norm > 1")


@dataclass(frozen=True)
class BanditInstance:
    """Immutable bandit instance with cached mean-reward table and argmaxes.

    ``mu[i, j]`` is the exact mean reward of action ``j`` under parameter
    ``i``; ``astar[i]`` is the lowest-index maximizer of row ``i``.
    """

    actions: NDArray
    params: NDArray
    model: OutcomeModel
    mu: NDArray = field(init=False, repr=False)
    astar: NDArray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        actions = np.asarray(self.actions, dtype=float)
        params = np.asarray(self.params, dtype=float)
        _check_ball(actions, "actions")
        _check_ball(params, "params")
        if actions.shape[1] != params.shape[1]:
            raise InvalidInstanceError("actions and params must share dimension d")
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "params", params)
        inner = params @ actions.T
        if self.model.kind == LINEAR_BINARY:
            mu = 0.5 * inner
            # success probability 1/2 + a.theta/2 must be a probability
            if np.any(np.abs(inner) > 1.0 + PMF_TOL):
                raise InvalidInstanceError("linear_binary requires |a.theta| <= 1")
        else:
            mu = np.asarray(self.model.link(inner))
            if self.model.kind == GLM:
                eta = float(self.model.eta or 0.0)
                spread = float(mu.max() - mu.min()) + 2.0 * eta
                if spread > 1.0 + PMF_TOL:
                    raise InvalidInstanceError(
                        "glm reward range exceeds 1 (link spread + 2*eta)"
                    )
        astar = np.argmax(mu, axis=1)  # np.argmax breaks ties at the lowest index
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "astar", astar.astype(np.intp))
        for arr in (self.actions, self.params, self.mu, self.astar):
            arr.setflags(write=False)

    @property
    def d(self) -> int:
        return int(self.actions.shape[1])

    @property
    def n_actions(self) -> int:
        return int(self.actions.shape[0])

    @property
    def n_params(self) -> int:
        return int(self.params.shape[0])

    def to_json(self) -> str:
        doc = {
            "d": self.d,
            "actions": self.actions.tolist(),
            "params": self.params.tolist(),
            "model": self.model.to_dict(),
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "BanditInstance":
        doc = json.loads(text)
        return cls(
            actions=np.asarray(doc["actions"], dtype=float),
            params=np.asarray(doc["params"], dtype=float),
            model=OutcomeModel.from_dict(doc["model"]),
        )


def mean_reward(instance: BanditInstance, action_idx: int, param_idx: int) -> float:
    """Exact mean reward of one (action, parameter) pair, from the formula."""
    a = instance.actions[action_idx]
    theta = instance.params[param_idx]
    x = float(a @ theta)
    if instance.model.kind == LINEAR_BINARY:
        return 0.5 * x
    return float(instance.model.link(x))


def best_action(instance: BanditInstance, param_idx: int) -> int:
    """Index of the optimal action under the given parameter (lowest-index ties)."""
    return int(instance.astar[param_idx])


def outcome_support(
    instance: BanditInstance, action_idx: int
) -> tuple[NDArray, NDArray]:
    """Finite outcome support of one action, with per-parameter probabilities.

    Returns ``(values, probs)`` where ``values`` has shape ``(q,)`` and
    ``probs`` has shape ``(m, q)``: ``probs[i, y]`` is the probability that
    playing the action yields ``values[y]`` when parameter ``i`` is true.
    """
    m = instance.n_params
    kind = instance.model.kind
    if kind == LINEAR_BINARY:
        values = np.array([-0.5, 0.5])
        p_hi = instance.mu[:, action_idx] + 0.5
        probs = np.column_stack([1.0 - p_hi, p_hi])
    elif kind == LOGISTIC:
        values = np.array([0.0, 1.0])
        p_hi = instance.mu[:, action_idx]
        probs = np.column_stack([1.0 - p_hi, p_hi])
    else:
        eta = float(instance.model.eta or 0.0)
        means = instance.mu[:, action_idx]
        raw = np.concatenate([means - eta, means + eta])
        values = _dedupe_sorted(np.sort(raw))
        probs = np.zeros((m, values.size))
        lo = _locate(values, means - eta)
        hi = _locate(values, means + eta)
        np.add.at(probs, (np.arange(m), lo), 0.5)
        np.add.at(probs, (np.arange(m), hi), 0.5)
    if np.any(probs < -PMF_TOL) or np.any(probs > 1.0 + PMF_TOL):
        raise InvalidInstanceError("outcome probability outside [0, 1]")
    if np.any(np.abs(probs.sum(axis=1) - 1.0) > PMF_TOL):
        raise InvalidInstanceError("outcome pmf does not sum to 1")
    return values, np.clip(probs, 0.0, 1.0)


def _dedupe_sorted(values: NDArray, tol: float = 1e-12) -> NDArray:
    keep = [values[0]]
    for v in values[1:]:
        if v - keep[-1] > tol:
            keep.append(v)
    return np.asarray(keep)


def _locate(grid: NDArray, values: NDArray, tol: float = 1e-12) -> NDArray:
    idx = np.searchsorted(grid, values)
    idx = np.clip(idx, 0, grid.size - 1)
    # searchsorted may land one slot right of the merged representative
    left = np.clip(idx - 1, 0, grid.size - 1)
    use_left = np.abs(grid[left] - values) <= np.abs(grid[idx] - values)
    out = np.where(use_left, left, idx)
    if np.any(np.abs(grid[out] - values) > 10 * tol):
        raise InvalidInstanceError("outcome value does not match merged support")
    return out


def outcome_distribution(
    instance: BanditInstance, action_idx: int, param_idx: int
) -> dict[float, float]:
    """Exact outcome pmf of one (action, parameter) pair as {value: prob}."""
    values, probs = outcome_support(instance, action_idx)
    row = probs[param_idx]
    return {float(v): float(p) for v, p in zip(values, row) if p > 0.0}


def sample_in_ball(rng: np.random.Generator, count: int, d: int) -> NDArray:
    """Draw ``count`` points i.i.d. uniformly from the closed unit ball in R^d."""
    direction = rng.standard_normal((count, d))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = rng.random(count) ** (1.0 / d)
    return direction * radius[:, None]


def sample_instance(
    rng: np.random.Generator,
    d: int,
    n_actions: int,
    m_params: int,
    model: OutcomeModel,
) -> BanditInstance:
    """Random instance with actions and parameters uniform in the unit ball."""
    if d < 1 or n_actions < 1 or m_params < 1:
        raise InvalidInstanceError("d, n_actions, m_params must all be >= 1")
    actions = sample_in_ball(rng, n_actions, d)
    params = sample_in_ball(rng, m_params, d)
    return BanditInstance(actions=actions, params=params, model=model)
