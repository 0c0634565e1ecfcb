"""Transfer matrices, topological pressure, the Bowen root and equilibrium measures.

For a depth-k potential the transfer matrix lives on admissible m-words,
``m = max(k - 1, 1)``. The entry ``v -> w`` (``w`` = ``v`` shifted by one symbol)
is ``exp(-s * u(first k symbols of v + w[-1]))``, so products along a path
reproduce ``exp(-s * S_n u)``. The pressure ``P(-s u)`` is the log of its Perron
eigenvalue.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import (
    EmptySet,
    NoConvergence,
    NotIrreducible,
    ValidationError,
    ZeroMassCylinder,
)
from .shift_space import (
    Potential,
    Sft,
    Word,
    admissible_words,
    birkhoff_range,
    format_word,
)

POWER_TOL = 1e-12
POWER_MAX_ITER = 100_000


class TransferMatrix(NamedTuple):
    block_depth: int
    states: list[Word]
    entries: np.ndarray
    costs: np.ndarray  # u on each transition; NaN where the transition is forbidden


def block_depth(u: Potential) -> int:
    return max(u.depth - 1, 1)


def _block_structure(sft: Sft, m: int):
    states = admissible_words(sft, m)
    index = {w: i for i, w in enumerate(states)}
    edges = []
    for i, v in enumerate(states):
        for b in range(sft.alphabet_size):
            if sft.adjacency[v[-1]][b]:
                edges.append((i, index[v[1:] + (b,)], v + (b,)))
    return states, edges


def transition_costs(sft: Sft, u: Potential, m: int | None = None) -> tuple[list[Word], np.ndarray]:
    """States and the potential value carried by each allowed transition (NaN elsewhere)."""
    m = block_depth(u) if m is None else m
    if m < u.depth - 1:
        raise ValidationError(f"block depth {m} is too small for a depth-{u.depth} potential")
    states, edges = _block_structure(sft, m)
    costs = np.full((len(states), len(states)), np.nan)
    for i, j, word in edges:
        costs[i, j] = u.table[word[: u.depth]]
    return states, costs


def transfer_matrix(sft: Sft, u: Potential, s: float) -> TransferMatrix:
    states, costs = transition_costs(sft, u)
    entries = np.where(np.isnan(costs), 0.0, np.exp(-s * np.nan_to_num(costs)))
    return TransferMatrix(block_depth(u), states, entries, costs)


class PerronResult(NamedTuple):
    eigenvalue: float
    right: np.ndarray
    iterations: int


def perron(matrix: np.ndarray, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER) -> PerronResult:
    """Perron eigenvalue and right eigenvector of an irreducible nonnegative matrix.

    Power iteration from the all-ones vector on ``M + sigma I`` (``sigma`` = the
    largest entry), which is primitive even when ``M`` is periodic. Stops when the
    relative residual of the Rayleigh quotient drops to ``tol``.
    """
    M = np.asarray(matrix, dtype=float)
    n = M.shape[0]
    sigma = float(M.max()) if M.size else 0.0
    if sigma <= 0:
        raise NotIrreducible("matrix is zero")
    shifted = M + sigma * np.eye(n)
    x = np.ones(n) / math.sqrt(n)
    for it in range(1, max_iter + 1):
        y = shifted @ x
        x = y / np.linalg.norm(y)
        Mx = M @ x
        lam = float(x @ Mx)
        res = np.linalg.norm(Mx - lam * x)
        if res <= tol * abs(lam):
            return PerronResult(lam, x, it)
    raise NoConvergence(f"power iteration did not converge in {max_iter} steps")


def _require_irreducible(sft: Sft) -> None:
    if not sft.irreducible:
        raise NotIrreducible("the shift is not irreducible; its pressure is not a single Perron root")


def pressure(sft: Sft, u: Potential, s: float) -> float:
    """``P(-s u)`` as the log spectral radius of the transfer matrix."""
    _require_irreducible(sft)
    return math.log(perron(transfer_matrix(sft, u, s).entries).eigenvalue)


def restrict_system(sft: Sft, u: Potential, sub_adjacency) -> tuple[Sft, Potential, tuple[int, ...]]:
    """The sub-SFT given by ``sub_adjacency`` as a system of its own.

    Symbols with no infinite forward path are dropped and the rest relabeled
    ``0..L'-1``; returns the new shift, the restricted potential and the
    original label of each new symbol.
    """
    from .caratheodory import SetSpec, surviving_symbols

    SetSpec.from_sub_adjacency(sub_adjacency).validate(sft)
    keep = tuple(int(a) for a in np.flatnonzero(surviving_symbols(sub_adjacency)))
    if not keep:
        raise EmptySet("the sub-adjacency supports no infinite sequence")
    B = [[int(sub_adjacency[a][b]) for b in keep] for a in keep]
    sub = Sft(len(keep), tuple(tuple(r) for r in B))
    table = {}
    for w in admissible_words(sub, u.depth):
        table[w] = u.table[tuple(keep[a] for a in w)]
    return sub, Potential.from_table(sub, u.depth, table), keep


def topological_entropy(sft: Sft) -> float:
    _require_irreducible(sft)
    return math.log(perron(sft.matrix.astype(float)).eigenvalue)


class RootResult(NamedTuple):
    s_star: float
    pressure_at_root: float
    iterations: int


def bowen_root_report(sft: Sft, u: Potential, tol: float = 1e-10) -> RootResult:
    """Root of ``s -> P(-s u)`` by bisection on ``[0, P(0)/u_min]``.

    The slope is at most ``-u_min``, so the stopping rule ``|P| <= tol * u_min``
    puts the root within ``tol`` of the exact one.
    """
    if not tol > 0:
        raise ValidationError(f"tolerance must be > 0, got {tol!r}")
    _require_irreducible(sft)
    u_min = u.min_value
    lo, hi = 0.0, pressure(sft, u, 0.0) / u_min
    p_lo = pressure(sft, u, lo)
    if abs(p_lo) <= tol * u_min:
        return RootResult(0.0, p_lo, 0)
    for it in range(1, 400):
        mid = 0.5 * (lo + hi)
        p = pressure(sft, u, mid)
        if abs(p) <= tol * u_min or hi - lo <= 1e-15 * max(1.0, hi):
            return RootResult(mid, p, it)
        if p > 0:
            lo = mid
        else:
            hi = mid
    raise NoConvergence("Bowen root bisection did not converge")


def bowen_root(sft: Sft, u: Potential, tol: float = 1e-10) -> float:
    return bowen_root_report(sft, u, tol).s_star


def stationary_distribution(transition: np.ndarray) -> np.ndarray:
    """Unique ``pi`` with ``pi P = pi`` and ``sum pi = 1``, from ``pi (I - P + 11^T) = 1^T``."""
    P = np.asarray(transition, dtype=float)
    n = P.shape[0]
    A = np.eye(n) - P + np.ones((n, n))
    pi = np.linalg.solve(A.T, np.ones(n))
    pi = np.where(np.abs(pi) < 1e-300, 0.0, pi)
    return pi


@dataclass(frozen=True, eq=False)
class MarkovMeasure:
    """Stationary Markov measure on the block shift of m-words.

    ``transition[i, j] > 0`` only for allowed overlaps ``states[i] -> states[j]``.
    """

    states: tuple[Word, ...]
    transition: np.ndarray
    stationary: np.ndarray

    @classmethod
    def from_transition(cls, states: Sequence[Word], transition: np.ndarray) -> MarkovMeasure:
        P = np.array(transition, dtype=float)
        rows = P.sum(axis=1)
        if np.any(P < 0) or np.any(np.abs(rows - 1.0) > 1e-12):
            raise ValidationError("transition matrix must be nonnegative with unit row sums")
        pi = stationary_distribution(P)
        return cls(tuple(tuple(s) for s in states), P, pi)

    @property
    def block_depth(self) -> int:
        return len(self.states[0])

    @cached_property
    def index(self) -> dict[Word, int]:
        return {w: i for i, w in enumerate(self.states)}

    def stationarity_residual(self) -> float:
        return float(np.abs(self.stationary @ self.transition - self.stationary).max())

    def log_cylinder_mass(self, word: Sequence[int]) -> float:
        """``log mu([word])``; ``-inf`` for null cylinders."""
        w = tuple(int(a) for a in word)
        m = self.block_depth
        if len(w) < m:
            mass = math.fsum(
                float(self.stationary[i]) for i, st in enumerate(self.states) if st[: len(w)] == w
            )
            return math.log(mass) if mass > 0 else -math.inf
        i = self.index.get(w[:m])
        if i is None or self.stationary[i] <= 0:
            return -math.inf
        total = math.log(self.stationary[i])
        for t in range(1, len(w) - m + 1):
            j = self.index.get(w[t:t + m])
            if j is None or self.transition[i, j] <= 0:
                return -math.inf
            total += math.log(self.transition[i, j])
            i = j
        return total

    def cylinder_mass(self, word: Sequence[int]) -> float:
        return math.exp(self.log_cylinder_mass(word))

    def to_json(self) -> dict:
        return {
            "states": [format_word(s) for s in self.states],
            "transition": self.transition.tolist(),
            "stationary": self.stationary.tolist(),
        }


def equilibrium_markov(sft: Sft, u: Potential, s: float) -> MarkovMeasure:
    """Equilibrium state of ``-s u``: ``P(v, w) = M(v, w) r(w) / (lambda r(v))``, ``pi ~ l * r``."""
    _require_irreducible(sft)
    T = transfer_matrix(sft, u, s)
    right = perron(T.entries)
    left = perron(T.entries.T)
    lam = right.eigenvalue
    r = np.abs(right.right)
    l = np.abs(left.right)
    P = T.entries * r[None, :] / (lam * r[:, None])
    P = P / P.sum(axis=1, keepdims=True)
    pi = l * r
    pi = pi / pi.sum()
    return MarkovMeasure(tuple(T.states), P, pi)


def entropy(mu: MarkovMeasure) -> float:
    """Entropy rate ``-sum pi_v P_vw log P_vw``."""
    P = mu.transition
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(P > 0, P * np.log(np.where(P > 0, P, 1.0)), 0.0)
    return float(-np.sum(mu.stationary[:, None] * terms))


def integral_u(mu: MarkovMeasure, u: Potential) -> float:
    """``int u dmu = sum over k-words of mu([w]) u(w)``."""
    return math.fsum(mu.cylinder_mass(w) * v for w, v in u.table.items())


def ratio(mu: MarkovMeasure, u: Potential) -> float:
    return entropy(mu) / integral_u(mu, u)


def local_dimension_estimate(mu: MarkovMeasure, u: Potential, x: Sequence[int], sft: Sft | None = None) -> float:
    """``-log mu([x]) / S*_n u(x)`` at the length of ``x``.

    ``S*_n`` is the min of the Birkhoff sum over the cylinder; pass ``sft`` for
    potentials of depth >= 2 (it fixes which extensions are admissible).
    """
    w = tuple(int(a) for a in x)
    if len(w) < 1:
        raise ValidationError("local dimension needs a word of length >= 1")
    logm = mu.log_cylinder_mass(w)
    if logm == -math.inf:
        raise ZeroMassCylinder(f"mu([{format_word(w)}]) = 0")
    if u.depth == 1:
        birk = 0.0
        for a in w:
            birk += u.table[(a,)]
    else:
        if sft is None:
            raise ValidationError("an Sft is needed for potentials of depth >= 2")
        birk = birkhoff_range(sft, u, w).min_sum
    return -logm / birk


def sample_paths(mu: MarkovMeasure, n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` words of length ``n >= m`` drawn from ``mu``; returns state indices per step."""
    m = mu.block_depth
    steps = n - m + 1
    cum = np.cumsum(mu.transition, axis=1)
    cum[:, -1] = 1.0
    pi_cum = np.cumsum(mu.stationary)
    pi_cum[-1] = 1.0
    out = np.empty((count, steps), dtype=np.int64)
    out[:, 0] = np.searchsorted(pi_cum, rng.random(count), side="right")
    for t in range(1, steps):
        r = rng.random(count)
        rows = cum[out[:, t - 1]]
        out[:, t] = (rows <= r[:, None]).sum(axis=1)
    return out


def _path_ratios(mu: MarkovMeasure, u: Potential, sft: Sft, paths: np.ndarray, depths: Sequence[int]) -> np.ndarray:
    """Local ratios at each depth for sampled state paths (depth-1 and block potentials)."""
    m = mu.block_depth
    logP = np.log(np.where(mu.transition > 0, mu.transition, 1.0))
    logpi = np.log(np.where(mu.stationary > 0, mu.stationary, 1.0))
    state_syms = np.array(mu.states, dtype=np.int64)
    # cum_log[:, t] is the log-mass of the sampled word of length m + t
    step_logs = logP[paths[:, :-1], paths[:, 1:]]
    start = logpi[paths[:, :1]]
    cum_log = np.concatenate([start, start + np.cumsum(step_logs, axis=1)], axis=1)
    syms = np.concatenate([state_syms[paths[:, 0]], state_syms[paths[:, 1:], -1]], axis=1)
    out = np.empty((len(paths), len(depths)))
    _L, k = sft.alphabet_size, u.depth
    table = np.asarray(u.array)
    for col, n in enumerate(depths):
        logmass = cum_log[:, n - m]
        if k == 1:
            birk = np.sum(table[syms[:, :n]], axis=1)
        else:
            birk = np.array([birkhoff_range(sft, u, tuple(int(a) for a in row[:n])).min_sum for row in syms])
        out[:, col] = -logmass / birk
    return out


def sample_local_ratios(
    mu: MarkovMeasure,
    u: Potential,
    sft: Sft,
    depths: Sequence[int],
    draws: int,
    seed: int,
    workers: int = 1,
) -> np.ndarray:
    """Local ratios at each depth for ``draws`` sampled points; shape ``(draws, len(depths))``.

    Draws are split across ``workers`` chunks, each with its own child seed of
    ``seed``; results are concatenated in chunk order, so the output depends
    only on ``(seed, workers)``.
    """
    depths = sorted(int(d) for d in depths)
    if not depths or depths[0] < mu.block_depth:
        raise ValidationError(f"depths must be >= the block depth {mu.block_depth}")
    workers = max(1, int(workers))
    sizes = [draws // workers + (1 if i < draws % workers else 0) for i in range(workers)]
    children = np.random.SeedSequence(seed).spawn(workers)

    def run(i: int) -> np.ndarray:
        rng = np.random.default_rng(children[i])
        paths = sample_paths(mu, depths[-1], sizes[i], rng)
        return _path_ratios(mu, u, sft, paths, depths)

    if workers == 1:
        chunks = [run(0)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run, range(workers)))
    return np.concatenate(chunks, axis=0)


@dataclass(frozen=True)
class PressureCurve:
    samples: list[tuple[float, float]]
    root: float | None
    root_row: int | None


def pressure_curve(sft: Sft, u: Potential, grid: Sequence[float], tol: float = 1e-10) -> PressureCurve:
    """Pressure on a grid; ``root`` is set when the grid brackets the Bowen root."""
    samples = [(float(s), pressure(sft, u, float(s))) for s in grid]
    root = root_row = None
    for i in range(len(samples) - 1):
        (_s0, p0), (_s1, p1) = samples[i], samples[i + 1]
        if p0 >= 0 > p1 or p0 > 0 >= p1:
            root = bowen_root(sft, u, tol)
            root_row = i + 1 if p1 == 0 else i
            break
    if root is None and samples and samples[-1][1] == 0.0:
        root, root_row = samples[-1][0], len(samples) - 1
    return PressureCurve(samples, root, root_row)
