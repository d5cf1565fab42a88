"""Distortion-bounded partitions of the parameter set and two-point representatives.

The distortion of theta with respect to theta' is the regret of playing
theta's best action when theta' is true. Partition builders group parameters
whose best actions are close (greedy epsilon-net covering of the realized
best-action set), certify the intra-cell distortion pairwise, and the
representation builder compresses each cell onto a two-point mixture whose
expected reward and information gain are no better than the cell average.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .bounds import EpsilonTooLarge, c_phi
from .inference import BeliefState
from .information import entropy, info_gain_about_statistic
from .model import GLM, LINEAR_BINARY, LOGISTIC, BanditInstance

__all__ = [
    "Partition",
    "Representation",
    "distortion",
    "distortion_matrix",
    "build_partition_linear",
    "build_partition_glm",
    "build_partition_logistic",
    "two_point_pair",
    "build_representation",
    "statistic_mutual_information",
    "rate_distortion_bruteforce",
    "InvalidEpsilon",
    "EpsilonTooLarge",
    "MarginViolated",
    "TooLarge",
    "Infeasible",
]

CERT_TOL = 1e-12
PAIR_TOL = 1e-12


class InvalidEpsilon(ValueError):
    pass


class MarginViolated(ValueError):
    pass


class TooLarge(ValueError):
    pass


class Infeasible(ArithmeticError):
    """Two-point mixture search found no feasible pair: indicates a bug or NaNs."""


@dataclass(frozen=True)
class Partition:
    """Assignment of each parameter to a cell with certified distortion <= epsilon."""

    cell_of: NDArray
    epsilon: float
    K: int

    def __post_init__(self) -> None:
        cells = np.asarray(self.cell_of, dtype=np.intp)
        object.__setattr__(self, "cell_of", cells)
        cells.setflags(write=False)
        counts = np.bincount(cells, minlength=self.K)
        if counts.size != self.K or np.any(counts == 0):
            raise ValueError("cells must be exactly 0..K-1 and all non-empty")

    def members(self, k: int) -> NDArray:
        return np.flatnonzero(self.cell_of == k)

    def to_json(self) -> str:
        return json.dumps(
            {"cell_of": self.cell_of.tolist(), "epsilon": self.epsilon, "K": self.K}
        )

    @classmethod
    def from_json(cls, text: str) -> "Partition":
        doc = json.loads(text)
        return cls(
            cell_of=np.asarray(doc["cell_of"], dtype=np.intp),
            epsilon=float(doc["epsilon"]),
            K=int(doc["K"]),
        )


@dataclass(frozen=True)
class Representation:
    """Per-cell two-point mixture (idx1, idx2, r) with the cell-mass pmf."""

    partition: Partition
    cells: tuple[tuple[int, int, float], ...]
    cell_mass: NDArray

    def to_json(self) -> str:
        return json.dumps(
            {
                "partition": json.loads(self.partition.to_json()),
                "cells": [list(c) for c in self.cells],
                "cell_mass": self.cell_mass.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Representation":
        doc = json.loads(text)
        part = Partition(
            cell_of=np.asarray(doc["partition"]["cell_of"], dtype=np.intp),
            epsilon=float(doc["partition"]["epsilon"]),
            K=int(doc["partition"]["K"]),
        )
        cells = tuple((int(a), int(b), float(r)) for a, b, r in doc["cells"])
        return cls(
            partition=part, cells=cells, cell_mass=np.asarray(doc["cell_mass"])
        )


def distortion(instance: BanditInstance, i: int, j: int) -> float:
    """Regret of playing theta_i's best action when theta_j is true."""
    return float(
        instance.mu[j, instance.astar[j]] - instance.mu[j, instance.astar[i]]
    )


def distortion_matrix(instance: BanditInstance) -> NDArray:
    """D[i, j] = distortion of theta_i with respect to theta_j."""
    mu = instance.mu
    best = mu[np.arange(mu.shape[0]), instance.astar]
    return (best[:, None] - mu[:, instance.astar]).T


def max_intra_cell_distortion(instance: BanditInstance, cell_of: NDArray, K: int) -> float:
    dmat = distortion_matrix(instance)
    worst = 0.0
    for k in range(K):
        idx = np.flatnonzero(cell_of == k)
        if idx.size > 1:
            worst = max(worst, float(dmat[np.ix_(idx, idx)].max()))
    return worst


def _greedy_cover(points: NDArray, radius: float) -> list[list[int]]:
    """Greedy center-based covering: lowest-index uncovered point becomes a center."""
    remaining = list(range(points.shape[0]))
    groups: list[list[int]] = []
    while remaining:
        center = remaining[0]
        dist = np.linalg.norm(points[remaining] - points[center], axis=1)
        absorbed = [remaining[t] for t in np.flatnonzero(dist <= radius)]
        groups.append(absorbed)
        taken = set(absorbed)
        remaining = [t for t in remaining if t not in taken]
    return groups


def _cells_from_action_groups(
    instance: BanditInstance, realized: NDArray, groups: list[list[int]]
) -> NDArray:
    group_of_action = {int(realized[t]): g for g, grp in enumerate(groups) for t in grp}
    return np.array([group_of_action[int(a)] for a in instance.astar], dtype=np.intp)


def _refine_certified(
    instance: BanditInstance, cell_of: NDArray, epsilon: float
) -> NDArray:
    """Split any cell whose pairwise distortion exceeds epsilon (safety net).

    The covering arguments certify the tolerance analytically, so this should
    never fire; it guarantees the constructed partition always carries a valid
    certificate regardless of floating-point edge cases.
    """
    dmat = distortion_matrix(instance)
    out = np.empty_like(cell_of)
    next_cell = 0
    for k in range(int(cell_of.max()) + 1):
        members = list(np.flatnonzero(cell_of == k))
        if not members:
            continue
        if len(members) == 1 or dmat[np.ix_(members, members)].max() <= epsilon + CERT_TOL:
            for i in members:
                out[i] = next_cell
            next_cell += 1
            continue
        while members:
            seed = members[0]
            sub = [seed]
            for cand in members[1:]:
                ok = all(
                    dmat[cand, s] <= epsilon + CERT_TOL
                    and dmat[s, cand] <= epsilon + CERT_TOL
                    for s in sub
                )
                if ok:
                    sub.append(cand)
            for i in sub:
                out[i] = next_cell
            next_cell += 1
            members = [t for t in members if t not in set(sub)]
    return out


def _finish_partition(
    instance: BanditInstance, cell_of: NDArray, epsilon: float
) -> Partition:
    cell_of = _refine_certified(instance, cell_of, epsilon)
    return Partition(cell_of=cell_of, epsilon=epsilon, K=int(cell_of.max()) + 1)


def build_partition_linear(instance: BanditInstance, epsilon: float) -> Partition:
    """Greedy covering of the realized best-action set at center radius epsilon.

    Cell diameter <= 2 * epsilon in action space implies intra-cell distortion
    <= epsilon for the linear model (Cauchy-Schwarz with ||theta|| <= 1).
    """
    if epsilon <= 0.0:
        raise InvalidEpsilon("epsilon must be positive")
    if instance.model.kind != LINEAR_BINARY:
        raise InvalidEpsilon("linear partition builder requires a linear_binary model")
    realized = np.unique(instance.astar)
    groups = _greedy_cover(instance.actions[realized], epsilon)
    cell_of = _cells_from_action_groups(instance, realized, groups)
    return _finish_partition(instance, cell_of, epsilon)


def realized_link_slope(instance: BanditInstance) -> float:
    """C(phi): supremum of the link derivative over the realized inner products."""
    inner = instance.params @ instance.actions.T
    return c_phi(instance.model, float(inner.min()), float(inner.max()))


def build_partition_glm(instance: BanditInstance, epsilon: float) -> Partition:
    """Greedy covering at center radius epsilon / (2 C(phi)).

    Cell diameter <= epsilon / C(phi) in action space bounds the intra-cell
    distortion by epsilon through the link's Lipschitz constant.
    """
    if epsilon <= 0.0:
        raise InvalidEpsilon("epsilon must be positive")
    if instance.model.kind not in (GLM, LOGISTIC):
        raise InvalidEpsilon("glm partition builder requires a glm or logistic model")
    slope = realized_link_slope(instance)
    realized = np.unique(instance.astar)
    groups = _greedy_cover(instance.actions[realized], epsilon / (2.0 * slope))
    cell_of = _cells_from_action_groups(instance, realized, groups)
    return _finish_partition(instance, cell_of, epsilon)


def logistic_ladder(model, epsilon: float, delta: float) -> list[float]:
    """Level sequence s_0 < s_1 = delta < ... < s_L = 1 with equal link increments.

    L is the smallest integer with phi(delta) + (L-1) * epsilon >= phi(1), so
    consecutive levels (past s_0) advance the link value by exactly epsilon.
    """
    phi_delta = float(model.link(delta))
    phi_one = float(model.link(1.0))
    if epsilon >= phi_delta - 0.5:
        raise EpsilonTooLarge(
            f"epsilon {epsilon!r} must be < phi(delta) - 1/2 = {phi_delta - 0.5!r}"
        )
    gap = phi_one - phi_delta
    levels_needed = int(np.ceil(gap / epsilon - 1e-12)) if gap > 0 else 0
    L = max(1, levels_needed + 1)
    s = [float(model.link_inv(phi_delta - epsilon)), delta]
    for ell in range(2, L):
        s.append(float(model.link_inv(phi_delta + (ell - 1) * epsilon)))
    if L >= 2:
        s.append(1.0)
    else:
        s[-1] = 1.0  # delta == 1: degenerate single band
    return s


def build_partition_logistic(
    instance: BanditInstance, epsilon: float, delta: float
) -> Partition:
    """Layered partition for the logistic model with classification margin delta.

    Parameters are banded by alpha(theta).theta into link-level layers (and a
    mirrored negative side); each band's best actions are greedily covered at
    half the preceding level gap, which certifies distortion <= epsilon.
    """
    if epsilon <= 0.0:
        raise InvalidEpsilon("epsilon must be positive")
    if instance.model.kind != LOGISTIC:
        raise InvalidEpsilon("logistic partition builder requires a logistic model")
    if delta <= 0.0:
        raise MarginViolated("delta must be positive")
    margins = instance.mu[np.arange(instance.n_params), instance.astar]
    inner = np.asarray(instance.model.link_inv(margins))
    if np.min(np.abs(inner)) < delta - 1e-12:
        raise MarginViolated(
            f"min |alpha(theta).theta| = {float(np.min(np.abs(inner)))!r} < delta"
        )
    s = logistic_ladder(instance.model, epsilon, delta)
    L = len(s) - 1

    # band b spans (s[b], s[b+1]] with covering diameter s[b] - s[b-1]; the
    # margin puts every parameter at |alpha(theta).theta| >= delta = s[1],
    # so band 1 is closed at its left endpoint
    if L >= 2:
        bands = [(s[b], s[b + 1], s[b] - s[b - 1], b == 1) for b in range(1, L)]
    else:
        bands = [(s[0], s[1], s[1] - s[0], True)]

    cell_of = np.full(instance.n_params, -1, dtype=np.intp)
    next_cell = 0
    for sign in (1.0, -1.0):
        for lo, hi, gap, closed_left in bands:
            v = sign * inner
            if closed_left:
                in_band = (v >= lo - 1e-12) & (v <= hi + 1e-12)
            else:
                in_band = (v > lo + 1e-12) & (v <= hi + 1e-12)
            members = np.flatnonzero(in_band & (sign * inner > 0) & (cell_of < 0))
            if members.size == 0:
                continue
            realized = np.unique(instance.astar[members])
            groups = _greedy_cover(instance.actions[realized], gap / 2.0)
            group_of_action = {
                int(realized[t]): g for g, grp in enumerate(groups) for t in grp
            }
            for i in members:
                cell_of[i] = next_cell + group_of_action[int(instance.astar[i])]
            next_cell += len(groups)
    if np.any(cell_of < 0):
        raise MarginViolated("some parameter fell outside every layer band")
    # greedy groups that absorbed no member leave gaps in the numbering
    _, cell_of = np.unique(cell_of, return_inverse=True)
    return _finish_partition(instance, cell_of, epsilon)


def two_point_pair(
    a: NDArray, b: NDArray, p: NDArray
) -> tuple[int, int, float]:
    """Find (j, k, r) with r*a_j + (1-r)*a_k and r*b_j + (1-r)*b_k both below
    the p-weighted means.

    Existence is guaranteed for any valid inputs; the scan is lexicographic
    over ordered pairs and picks the smallest feasible r, so the result is
    deterministic.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p = np.asarray(p, dtype=float)
    if a.shape != b.shape or a.shape != p.shape or a.ndim != 1 or a.size < 1:
        raise ValueError("a, b, p must be 1-D arrays of equal positive length")
    if np.any(p < -PAIR_TOL) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("p must be a valid pmf")
    mean_a = float(p @ a)
    mean_b = float(p @ b)
    n = a.size
    for j in range(n):
        for k in range(n):
            lo, hi = 0.0, 1.0
            feasible = True
            for (xj, xk, target) in ((a[j], a[k], mean_a), (b[j], b[k], mean_b)):
                coeff = xj - xk
                rhs = target - xk
                if coeff > 0.0:
                    hi = min(hi, (rhs + PAIR_TOL) / coeff)
                elif coeff < 0.0:
                    lo = max(lo, (rhs - PAIR_TOL) / coeff)
                elif rhs < -PAIR_TOL:
                    feasible = False
                    break
            if not feasible or lo > hi:
                continue
            r = float(min(max(lo, 0.0), 1.0))
            mix_a = r * a[j] + (1.0 - r) * a[k]
            mix_b = r * b[j] + (1.0 - r) * b[k]
            if mix_a <= mean_a + PAIR_TOL and mix_b <= mean_b + PAIR_TOL:
                return j, k, r
    raise Infeasible("no feasible two-point mixture found (NaNs or broken invariants)")


def build_representation(
    instance: BanditInstance, belief: BeliefState, partition: Partition
) -> Representation:
    """Per-cell two-point representatives realizing the compressed statistic.

    Each positive-mass cell is compressed onto a pair of its own parameters
    whose mixture underperforms the cell's conditional expected reward and
    conditional information gain simultaneously. Zero-mass cells get a
    trivial in-cell singleton.
    """
    p = belief.probs
    if p.size != partition.cell_of.size:
        raise ValueError("belief and partition cover different parameter counts")
    mean_rewards = p @ instance.mu
    mass = np.bincount(partition.cell_of, weights=p, minlength=partition.K)
    info_cache: dict[int, float] = {}

    def gain(action_idx: int) -> float:
        if action_idx not in info_cache:
            info_cache[action_idx] = info_gain_about_statistic(
                instance, belief, partition, action_idx
            )
        return info_cache[action_idx]

    cells: list[tuple[int, int, float]] = []
    for k in range(partition.K):
        members = partition.members(k)
        if mass[k] <= 0.0:
            cells.append((int(members[0]), int(members[0]), 1.0))
            continue
        weights = p[members] / mass[k]
        scores_reward = np.array(
            [mean_rewards[instance.astar[i]] for i in members]
        )
        scores_info = np.array([gain(int(instance.astar[i])) for i in members])
        j, kk, r = two_point_pair(scores_reward, scores_info, weights)
        cells.append((int(members[j]), int(members[kk]), r))
    return Representation(partition=partition, cells=tuple(cells), cell_mass=mass)


def statistic_mutual_information(belief: BeliefState, partition: Partition) -> float:
    """I(theta*; psi): entropy of the belief pushforward onto cells (psi is
    a deterministic function of theta*)."""
    mass = np.bincount(partition.cell_of, weights=belief.probs, minlength=partition.K)
    return entropy(mass)


def _set_partitions(m: int):
    """All set partitions of range(m) as cell-index vectors (restricted growth)."""
    code = np.zeros(m, dtype=np.intp)

    def rec(i: int, max_used: int):
        if i == m:
            yield code.copy()
            return
        for c in range(max_used + 2):
            code[i] = c
            yield from rec(i + 1, max(max_used, c))

    yield from rec(1, 0)


def rate_distortion_bruteforce(
    instance: BanditInstance, belief: BeliefState, epsilon: float
) -> tuple[int, float, Partition]:
    """Exhaustive minimum of I(theta*; psi) over all distortion-valid partitions.

    Test oracle only: enumerates every set partition of the parameter set
    (Bell-number growth), so m is capped at 8.
    """
    m = instance.n_params
    if m > 8:
        raise TooLarge("brute-force partition search is capped at m <= 8")
    dmat = distortion_matrix(instance)
    best: tuple[float, int, NDArray] | None = None
    for code in _set_partitions(m):
        K = int(code.max()) + 1
        ok = True
        for k in range(K):
            idx = np.flatnonzero(code == k)
            if idx.size > 1 and dmat[np.ix_(idx, idx)].max() > epsilon + CERT_TOL:
                ok = False
                break
        if not ok:
            continue
        mass = np.bincount(code, weights=belief.probs, minlength=K)
        info = entropy(mass)
        if best is None or info < best[0] - 1e-15 or (
            abs(info - best[0]) <= 1e-15 and K < best[1]
        ):
            best = (info, K, code)
    assert best is not None  # the singleton partition is always valid
    info, K, code = best
    return K, info, Partition(cell_of=code, epsilon=epsilon, K=K)
