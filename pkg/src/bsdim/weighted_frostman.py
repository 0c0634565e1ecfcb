"""Weighted covers and Frostman measures on the cylinder tree.

The weighted cover quantity is the linear program

    minimise   sum_i c_i exp(-s u(B_i))
    subject to sum_{B_i containing leaf} c_i >= h(leaf)   for every marked leaf,

over cylinders ``B_i`` of depth in ``[N, D]``. Its dual packs leaf masses
under the cylinder capacities ``exp(-s u(B))``; the normalised dual optimum
is the Frostman measure. Root-to-leaf path systems on a tree are totally
unimodular, so for ``h = 1_Z`` the optimum is the integral min cut and the
dual is a tree max flow.

For a general leaf demand ``h`` the dual feasible region is a polymatroid
(capacities on a laminar family), so greedy in decreasing ``h`` is optimal.
The matching primal is the layer decomposition
``sum_j (h_j - h_{j+1}) * mincut({h >= h_j})``.
"""

from __future__ import annotations

import functools
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .caratheodory import (
    CylinderTree,
    SumResult,
    Variant,
    _check_window,
    _depth_window,
    _tree_dp,
    _witness,
    cover_sum,
    node_weights,
)
from .errors import EmptySet, ThresholdUnmet, ValidationError
from .shift_space import Potential, Word, format_word, parse_word

FEAS_TOL = 1e-9


class WeightedCover:
    """Weights ``c_B`` on cylinders; with ``h = 1_Z`` they are 1 on an optimal cut, read lazily from it."""

    def __init__(self, assignments: list[tuple[Word, float]] | SumResult, objective: float, s: float):
        self._source = assignments
        self.objective = objective
        self.s = s

    @functools.cached_property
    def assignments(self) -> list[tuple[Word, float]]:
        if isinstance(self._source, SumResult):
            return [(w, 1.0) for w, _ in self._source.witness]
        return list(self._source)

    def __repr__(self) -> str:
        return f"WeightedCover(objective={self.objective!r}, s={self.s!r})"

    def to_json(self) -> dict:
        return {
            "objective": self.objective,
            "s": self.s,
            "assignments": [{"word": format_word(w), "weight": c} for w, c in self.assignments],
        }


@dataclass(frozen=True)
class FrostmanMeasure:
    leaves: list[Word]
    leaf_masses: np.ndarray
    total_mass: float
    s: float
    tight_cylinders: list[Word]
    objective: float

    def normalized(self) -> np.ndarray:
        if self.total_mass <= 0:
            raise EmptySet("measure has zero mass")
        return self.leaf_masses / self.total_mass

    def to_json(self) -> dict:
        return {
            "total_mass": self.total_mass,
            "s": self.s,
            "leaves": [
                {"word": format_word(w), "mass": float(m)} for w, m in zip(self.leaves, self.leaf_masses)
            ],
            "tight_cylinders": [format_word(w) for w in self.tight_cylinders],
        }


def _check_s(s: float) -> float:
    s = float(s)
    if not math.isfinite(s) or s < 0:
        raise ValidationError(f"s must be finite and >= 0, got {s!r}")
    return s


def _leaf_demand(tree: CylinderTree, demand: Mapping | None) -> np.ndarray:
    """Demand per depth-D leaf; 1 on marked leaves when ``demand`` is None."""
    D = tree.max_depth
    marked = tree.marked[D]
    if demand is None:
        return marked.astype(float)
    h = np.zeros(tree.level_size(D))
    for key, value in demand.items():
        w = parse_word(key) if isinstance(key, str) else tuple(int(a) for a in key)
        if len(w) != D:
            raise ValidationError(f"demands are given on depth-{D} leaves, got {format_word(w)!r}")
        idx = tree.index_of(w)
        if idx is None:
            raise ValidationError(f"demand word {format_word(w)!r} is not a leaf of the tree")
        v = float(value)
        if not math.isfinite(v) or v < 0:
            raise ValidationError(f"demands must be finite and >= 0, got {value!r}")
        if v > 0 and not marked[idx]:
            raise ValidationError(f"demand on {format_word(w)!r}, which lies outside Z")
        h[idx] = v
    return h


def _marks_from_leaves(tree: CylinderTree, leaf_mask: np.ndarray) -> list[np.ndarray]:
    D = tree.max_depth
    marks = [None] * (D + 1)
    marks[D] = leaf_mask.copy()
    for d in range(D - 1, -1, -1):
        marks[d] = np.bincount(tree.parents[d + 1], weights=marks[d + 1], minlength=tree.level_size(d)) > 0
    return marks


def weighted_cover_value(
    tree: CylinderTree,
    u: Potential,
    s: float,
    min_depth: int,
    variant: Variant = "sup",
    demand: Mapping | None = None,
) -> WeightedCover:
    """Optimal weighted cover. ``demand`` maps depth-D leaf words to ``h >= 0``; default ``h = 1_Z``."""
    _check_window(tree, min_depth)
    s = _check_s(s)
    if tree.is_empty:
        return WeightedCover([], 0.0, s)
    if demand is None:
        cut = cover_sum(tree, u, s, min_depth, variant)
        return WeightedCover(cut, cut.value, s)

    h = _leaf_demand(tree, demand)
    weights = node_weights(tree, u, s, variant)
    levels = sorted({float(x) for x in h if x > 0}, reverse=True)
    coeff: dict[tuple[int, int], float] = {}
    for j, hj in enumerate(levels):
        step = hj - (levels[j + 1] if j + 1 < len(levels) else 0.0)
        sub = tree.with_marks(_marks_from_leaves(tree, h >= hj))
        _, take = _tree_dp(sub, weights, _depth_window(sub, min_depth), "min")
        for d, idx in _witness(sub, take):
            for i in idx.tolist():
                coeff[(d, i)] = coeff.get((d, i), 0.0) + step
    nodes = sorted(coeff)
    assignments = [(tree.word(d, i), coeff[(d, i)]) for d, i in nodes]
    objective = math.fsum(coeff[(d, i)] * float(weights[d][i]) for d, i in nodes)
    return WeightedCover(assignments, objective, s)


def _max_flow(
    tree: CylinderTree, weights: Sequence[np.ndarray], min_depth: int
) -> list[np.ndarray]:
    """Per-node maximal flow into the subtree under the window capacities."""
    D = tree.max_depth
    flow: list = [None] * (D + 1)
    for d in range(D, -1, -1):
        m = tree.marked[d]
        if d == D:
            f = np.where(m, weights[d], 0.0)
        else:
            inflow = np.bincount(tree.parents[d + 1], weights=flow[d + 1], minlength=tree.level_size(d))
            f = np.minimum(weights[d], inflow) if d >= min_depth else inflow
            f = np.where(m, f, 0.0)
        flow[d] = f
    return flow


def frostman_measure(
    tree: CylinderTree,
    u: Potential,
    s: float,
    min_depth: int,
    variant: Variant = "sup",
    demand: Mapping | None = None,
) -> FrostmanMeasure:
    """Maximal leaf masses with every window cylinder's mass at most ``exp(-s u(B))``.

    With ``demand=None`` the mass is routed as a max flow and split among
    children in proportion to their flow; otherwise leaves are filled greedily
    by decreasing demand and ``objective`` is ``sum h * mass``.
    """
    _check_window(tree, min_depth)
    s = _check_s(s)
    if tree.is_empty:
        raise EmptySet("target set is empty")
    D = tree.max_depth
    weights = node_weights(tree, u, s, variant)

    if demand is None:
        flow = _max_flow(tree, weights, min_depth)
        assigned = flow[0].copy()
        for d in range(1, D + 1):
            par = tree.parents[d]
            inflow = np.bincount(par, weights=flow[d], minlength=tree.level_size(d - 1))
            with np.errstate(invalid="ignore", divide="ignore"):
                ratio = np.where(inflow > 0, assigned / inflow, 0.0)
            assigned = flow[d] * np.minimum(ratio, 1.0)[par]
        masses = np.where(tree.marked[D], assigned, 0.0)
        h = tree.marked[D].astype(float)
    else:
        h = _leaf_demand(tree, demand)
        masses = _greedy_masses(tree, weights, min_depth, h)

    leaf_idx = np.nonzero(tree.marked[D])[0]
    leaves = [tree.word(D, int(i)) for i in leaf_idx]
    leaf_masses = masses[leaf_idx]
    total = math.fsum(leaf_masses)
    objective = math.fsum(h[leaf_idx] * leaf_masses)
    tight = _tight_cylinders(tree, weights, min_depth, masses)
    return FrostmanMeasure(leaves, leaf_masses, total, s, tight, objective)


def _greedy_masses(tree, weights, min_depth, h) -> np.ndarray:
    D = tree.max_depth
    residual = [np.array(w, dtype=float) for w in weights]
    masses = np.zeros(tree.level_size(D))
    order = sorted(np.nonzero(h > 0)[0], key=lambda i: (-h[i], i))
    for leaf in order:
        path = []
        i = int(leaf)
        for d in range(D, 0, -1):
            if d >= min_depth:
                path.append((d, i))
            i = int(tree.parents[d][i])
        y = min(residual[d][i] for d, i in path)
        if y <= 0:
            continue
        for d, i in path:
            residual[d][i] -= y
        masses[leaf] = y
    return masses


def subtree_masses(tree: CylinderTree, leaf_masses_full: np.ndarray) -> list[np.ndarray]:
    """Mass of every node's subtree, from masses on all depth-D leaves."""
    D = tree.max_depth
    out: list = [None] * (D + 1)
    out[D] = np.asarray(leaf_masses_full, dtype=float)
    for d in range(D - 1, -1, -1):
        out[d] = np.bincount(tree.parents[d + 1], weights=out[d + 1], minlength=tree.level_size(d))
    return out


def _tight_cylinders(tree, weights, min_depth, masses) -> list[Word]:
    sub = subtree_masses(tree, masses)
    tight = []
    for d in range(min_depth, tree.max_depth + 1):
        w = weights[d]
        hit = tree.marked[d] & (sub[d] >= w * (1 - 1e-12)) & (w > 0)
        tight.extend(tree.word(d, int(i)) for i in np.nonzero(hit)[0])
    return tight


def full_leaf_masses(tree: CylinderTree, measure: FrostmanMeasure) -> np.ndarray:
    D = tree.max_depth
    out = np.zeros(tree.level_size(D))
    out[np.nonzero(tree.marked[D])[0]] = measure.leaf_masses
    return out


def frostman_violation(
    tree: CylinderTree, u: Potential, measure: FrostmanMeasure, min_depth: int, variant: Variant = "sup"
) -> float:
    """Largest relative excess of a window cylinder's mass over its capacity (<= 0 means feasible)."""
    weights = node_weights(tree, u, measure.s, variant)
    sub = subtree_masses(tree, full_leaf_masses(tree, measure))
    worst = -math.inf
    for d in range(min_depth, tree.max_depth + 1):
        m = tree.marked[d]
        if not m.any():
            continue
        excess = (sub[d][m] - weights[d][m]) / np.maximum(weights[d][m], 1e-300)
        worst = max(worst, float(excess.max()))
    return worst


def cover_violation(
    tree: CylinderTree, cover: WeightedCover, min_depth: int, demand: Mapping | None = None
) -> float:
    """Largest shortfall ``h(leaf) - sum of ancestor weights`` (<= 0 means feasible)."""
    D = tree.max_depth
    h = _leaf_demand(tree, demand)
    c = {w: wt for w, wt in cover.assignments}
    leaves = tree.words(D)
    worst = -math.inf
    for i in np.nonzero(tree.marked[D])[0]:
        leaf = tuple(int(a) for a in leaves[i])
        got = math.fsum(c.get(leaf[:n], 0.0) for n in range(min_depth, D + 1))
        worst = max(worst, float(h[i]) - got)
    return worst


def duality_gap(
    tree: CylinderTree, u: Potential, s: float, min_depth: int, variant: Variant = "sup"
) -> float:
    """``|W - max Frostman mass|``; strong duality makes it round-off small."""
    if tree.is_empty:
        return 0.0
    w = weighted_cover_value(tree, u, s, min_depth, variant)
    mu = frostman_measure(tree, u, s, min_depth, variant)
    return abs(w.objective - mu.total_mass)


def sandwich_threshold(u_min: float, delta: float) -> int:
    """Smallest ``N > 2`` with ``n^2 exp(-u_min n delta) <= 1`` for every ``n >= N``."""
    if not (u_min > 0 and delta > 0):
        raise ValidationError("u_min and delta must be > 0")
    c = u_min * delta
    # n^2 e^{-cn} is decreasing for n > 2/c; scan up to there, then find the first n past the last bad one
    peak = max(3, math.ceil(2.0 / c) + 1)
    last_bad = 2
    for n in range(3, peak + 1):
        if 2 * math.log(n) - c * n > 0:
            last_bad = n
    n = max(last_bad + 1, 3)
    while 2 * math.log(n) - c * n > 0:
        n += 1
    return n


@dataclass(frozen=True)
class SandwichReport:
    s: float
    delta: float
    min_depth: int
    threshold: int
    threshold_met: bool
    weighted: float
    cover: float
    cover_shifted: float
    upper_holds: bool
    lower_holds: bool | None
    equality: bool

    @property
    def passed(self) -> bool:
        return self.upper_holds and self.lower_holds is not False and self.equality

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "delta": self.delta,
            "min_depth": self.min_depth,
            "threshold": self.threshold,
            "threshold_met": self.threshold_met,
            "W(s)": self.weighted,
            "M(s)": self.cover,
            "M(s+delta)": self.cover_shifted,
            "W<=M": self.upper_holds,
            "M(s+delta)<=W": self.lower_holds,
            "W==M": self.equality,
        }


def sandwich_check(
    tree: CylinderTree,
    u: Potential,
    s: float,
    delta: float,
    min_depth: int,
    variant: Variant = "sup",
    strict: bool = False,
) -> SandwichReport:
    """``M(s + delta) <= W(s) <= M(s)``, plus the tree-level equality ``W(s) == M(s)``.

    The lower bound is only asserted when ``min_depth`` reaches the threshold of
    :func:`sandwich_threshold`; below it the comparison is reported as ``None``,
    or raises :class:`ThresholdUnmet` when ``strict``.
    """
    s = _check_s(s)
    if not delta > 0:
        raise ValidationError(f"delta must be > 0, got {delta!r}")
    threshold = sandwich_threshold(u.min_value, delta)
    met = min_depth >= threshold
    if strict and not met:
        raise ThresholdUnmet(f"N={min_depth} is below the threshold {threshold}")
    w = weighted_cover_value(tree, u, s, min_depth, variant).objective
    m = cover_sum(tree, u, s, min_depth, variant).value
    m_shift = cover_sum(tree, u, s + delta, min_depth, variant).value
    slack = FEAS_TOL * (1.0 + abs(m))
    upper = w <= m + slack
    lower = (m_shift <= w + slack) if met else None
    equal = abs(w - m) <= slack
    return SandwichReport(s, delta, min_depth, threshold, met, w, m, m_shift, upper, lower, equal)
