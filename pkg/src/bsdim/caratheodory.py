"""Covering, packing and capacity sums on the cylinder tree.

All four set functions are evaluated exactly at finite scale. Balls are
cylinders of depth ``n`` in ``[N, D]`` and a ball's weight is
``exp(-alpha * u(B))`` where ``u(B)`` is the max (``"sup"``) or min
(``"center"``) of the Birkhoff sum over the cylinder.

Cylinders in the tree are nested or disjoint, so
  * a cover of the marked leaves is a cut, solved by
    ``cost(v) = min(w(v), sum of children costs)``;
  * a packing is an antichain, solved by the same recursion with ``max``;
  * at one fixed depth the minimal cover and maximal packing are the whole level.
"""

from __future__ import annotations

import functools
import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import (
    BadDepthWindow,
    BracketFailure,
    DepthOverflow,
    EmptySet,
    InadmissibleGenerator,
    ValidationError,
)
from .shift_space import (
    Potential,
    Sft,
    Word,
    _tail_extrema,
    admissible_words,
    birkhoff_range,
    default_node_cap,
    format_word,
    parse_word,
)

Variant = Literal["sup", "center"]
SumKind = Literal["cover", "pack", "capacity", "weighted"]

DEFAULT_TOL = 1e-10
MAX_BISECTIONS = 200
EXACT_DP_NODES = 200_000


@dataclass(frozen=True)
class SetSpec:
    """Target set Z: a union of generator cylinders, or a sub-SFT. ``SetSpec()`` is the whole space."""

    generators: tuple[Word, ...] | None = None
    sub_adjacency: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        if self.generators is not None and self.sub_adjacency is not None:
            raise ValidationError("a set spec has generators or a sub-adjacency, not both")

    @classmethod
    def from_generators(cls, words: Sequence) -> SetSpec:
        gens = tuple(parse_word(w) if isinstance(w, str) else tuple(int(a) for a in w) for w in words)
        return cls(generators=gens)

    @classmethod
    def from_sub_adjacency(cls, matrix: Sequence[Sequence[int]]) -> SetSpec:
        return cls(sub_adjacency=tuple(tuple(int(x) for x in row) for row in matrix))

    @classmethod
    def from_json(cls, data: dict) -> SetSpec:
        if "generators" in data and "sub_adjacency" in data:
            raise ValidationError("set spec has both 'generators' and 'sub_adjacency'")
        if "generators" in data:
            return cls.from_generators(data["generators"])
        if "sub_adjacency" in data:
            return cls.from_sub_adjacency(data["sub_adjacency"])
        raise ValidationError("set spec needs 'generators' or 'sub_adjacency'")

    def to_json(self) -> dict:
        if self.generators is not None:
            return {"generators": [format_word(g) for g in self.generators]}
        if self.sub_adjacency is not None:
            return {"sub_adjacency": [list(r) for r in self.sub_adjacency]}
        return {}

    def validate(self, sft: Sft, max_depth: int | None = None) -> None:
        if self.generators is not None:
            for g in self.generators:
                if not sft.is_admissible(g):
                    raise InadmissibleGenerator(f"generator {format_word(g)!r} is not admissible")
                if max_depth is not None and len(g) > max_depth:
                    raise ValidationError(
                        f"generator {format_word(g)!r} is longer than the tree depth {max_depth}"
                    )
        if self.sub_adjacency is not None:
            L = sft.alphabet_size
            B = self.sub_adjacency
            if len(B) != L or any(len(r) != L for r in B):
                raise ValidationError(f"sub-adjacency must be {L}x{L}")
            for i in range(L):
                for j in range(L):
                    if B[i][j] not in (0, 1):
                        raise ValidationError("sub-adjacency entries must be 0 or 1")
                    if B[i][j] > sft.adjacency[i][j]:
                        raise ValidationError(
                            f"sub-adjacency allows {i}->{j}, which the ambient shift forbids"
                        )


def surviving_symbols(sub_adjacency: Sequence[Sequence[int]]) -> np.ndarray:
    """Symbols that start at least one infinite path of the sub-adjacency graph."""
    B = np.array(sub_adjacency, dtype=bool)
    alive = np.ones(B.shape[0], dtype=bool)
    while True:
        nxt = alive & (B[:, alive].any(axis=1))
        if (nxt == alive).all():
            return alive
        alive = nxt


@dataclass(frozen=True, eq=False)
class CylinderTree:
    """Admissible words of length ``0..max_depth`` stored level by level.

    Level ``d`` holds its nodes in lexicographic order; ``parents[d][i]`` is the
    index in level ``d-1`` of node ``i``'s parent and ``symbols[d][i]`` its last
    symbol. ``marked[d][i]`` says whether the node's cylinder meets Z.
    """

    sft: Sft
    max_depth: int
    parents: tuple[np.ndarray, ...]
    symbols: tuple[np.ndarray, ...]
    marked: tuple[np.ndarray, ...]
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def node_count(self) -> int:
        return sum(len(p) for p in self.parents)

    @property
    def marked_count(self) -> int:
        return int(sum(m.sum() for m in self.marked))

    @property
    def is_empty(self) -> bool:
        return not bool(self.marked[0][0])

    def level_size(self, d: int) -> int:
        return len(self.parents[d])

    def words(self, d: int) -> np.ndarray:
        """Level ``d`` as an ``(n_d, d)`` integer array of symbols."""
        key = ("words", d)
        if key not in self._cache:
            if d == 0:
                arr = np.zeros((1, 0), dtype=np.int16)
            else:
                prev = self.words(d - 1)
                arr = np.concatenate(
                    [prev[self.parents[d]], self.symbols[d][:, None].astype(np.int16)], axis=1
                )
            arr.setflags(write=False)
            self._cache[key] = arr
        return self._cache[key]

    def word(self, d: int, i: int) -> Word:
        out = []
        while d > 0:
            out.append(int(self.symbols[d][i]))
            i = int(self.parents[d][i])
            d -= 1
        return tuple(reversed(out))

    def index_of(self, word: Sequence[int]) -> int | None:
        """Index of ``word`` in its level, or None if it is not in the tree."""
        idx = 0
        for d, a in enumerate(word, start=1):
            if d > self.max_depth:
                return None
            lo, hi = self.child_range(d - 1, idx)
            syms = self.symbols[d][lo:hi]
            pos = np.searchsorted(syms, a)
            if pos >= len(syms) or syms[pos] != a:
                return None
            idx = lo + int(pos)
        return idx

    def child_range(self, d: int, i: int) -> tuple[int, int]:
        """Half-open index range of the children of node ``i`` at level ``d``."""
        key = ("child_start", d)
        if key not in self._cache:
            starts = np.searchsorted(self.parents[d + 1], np.arange(self.level_size(d) + 1))
            self._cache[key] = starts
        starts = self._cache[key]
        return int(starts[i]), int(starts[i + 1])

    def with_marks(self, marked: Sequence[np.ndarray]) -> CylinderTree:
        """Same tree, different target set (marks must be consistent)."""
        return CylinderTree(self.sft, self.max_depth, self.parents, self.symbols, tuple(marked))


def build_tree(sft: Sft, z: SetSpec | None, max_depth: int, cap: int | None = None) -> CylinderTree:
    """Cylinder tree of depth ``max_depth`` with Z marked.

    ``z=None`` marks everything (Z is the whole shift).
    """
    if not isinstance(max_depth, (int, np.integer)) or max_depth < 1:
        raise BadDepthWindow(f"tree depth must be >= 1, got {max_depth!r}")
    D = int(max_depth)
    z = SetSpec() if z is None else z
    z.validate(sft, D)
    cap = default_node_cap() if cap is None else cap
    total = sum(sft.word_count(d) for d in range(D + 1))
    if total > cap:
        raise DepthOverflow(f"tree of depth {D} has {total} nodes, over the cap {cap}")

    L = sft.alphabet_size
    A = sft.matrix.astype(bool)
    parents = [np.array([-1], dtype=np.int64)]
    symbols = [np.array([-1], dtype=np.int64)]
    for d in range(1, D + 1):
        if d == 1:
            par = np.zeros(L, dtype=np.int64)
            sym = np.arange(L, dtype=np.int64)
        else:
            prev = symbols[d - 1]
            ok = A[prev]  # (n_prev, L) successor mask
            par, sym = np.nonzero(ok)
            par = par.astype(np.int64)
            sym = sym.astype(np.int64)
        parents.append(par)
        symbols.append(sym)

    tree = CylinderTree(sft, D, tuple(parents), tuple(symbols), ())
    return tree.with_marks(_marks(tree, z))


def _marks(tree: CylinderTree, z: SetSpec) -> list[np.ndarray]:
    D = tree.max_depth
    sizes = [tree.level_size(d) for d in range(D + 1)]
    if z.generators is None and z.sub_adjacency is None:
        return [np.ones(n, dtype=bool) for n in sizes]

    if z.sub_adjacency is not None:
        alive = surviving_symbols(z.sub_adjacency)
        B = np.array(z.sub_adjacency, dtype=bool) & alive[None, :] & alive[:, None]
        marks = [np.array([bool(alive.any())])]
        for d in range(1, D + 1):
            sym = tree.symbols[d]
            if d == 1:
                marks.append(alive[sym].copy())
            else:
                psym = tree.symbols[d - 1][tree.parents[d]]
                marks.append(marks[d - 1][tree.parents[d]] & B[psym, sym])
        return marks

    inside = [np.zeros(n, dtype=bool) for n in sizes]
    on_path = [np.zeros(n, dtype=bool) for n in sizes]
    for g in z.generators:
        idx = 0
        on_path[0][0] = True
        if len(g) == 0:
            inside[0][0] = True
        for d in range(1, len(g) + 1):
            idx = tree.index_of(g[:d])
            on_path[d][idx] = True
        if len(g) > 0:
            inside[len(g)][idx] = True
    for d in range(1, D + 1):
        inside[d] |= inside[d - 1][tree.parents[d]]
    return [inside[d] | on_path[d] for d in range(D + 1)]


def node_u_values(tree: CylinderTree, u: Potential, variant: Variant = "sup") -> tuple[np.ndarray, ...]:
    """Per-level ball weights ``u(B)``: max (``sup``) or min (``center``) Birkhoff sum.

    Level 0 (the root, not a Bowen ball) gets 0.
    """
    if variant not in ("sup", "center"):
        raise ValidationError(f"variant must be 'sup' or 'center', got {variant!r}")
    key = ("u", u.depth, tuple(u.table.items()), variant)
    if key in tree._cache:
        return tree._cache[key]
    if u.alphabet_size != tree.sft.alphabet_size:
        raise ValidationError("potential and tree use different alphabets")
    L, k, D = tree.sft.alphabet_size, u.depth, tree.max_depth
    modulus = L**k
    table = np.asarray(u.array)

    tail_lo = np.zeros(L ** max(k - 1, 0))
    tail_hi = np.zeros(L ** max(k - 1, 0))
    if k > 1:
        for w in admissible_words(tree.sft, k - 1):
            c = 0
            for a in w:
                c = c * L + a
            tail_lo[c], tail_hi[c] = _tail_extrema(tree.sft, u, w)
    tail = tail_hi if variant == "sup" else tail_lo

    values = [np.zeros(1)]
    fixed = np.zeros(1)
    codes = np.zeros(1, dtype=np.int64)
    for d in range(1, D + 1):
        par, sym = tree.parents[d], tree.symbols[d]
        codes = (codes[par] * L + sym) % modulus
        fixed = fixed[par] + (table[codes] if d >= k else 0.0)
        if d >= k - 1:
            vals = fixed + tail[codes % (L ** (k - 1))] if k > 1 else fixed.copy()
        else:
            vals = np.empty(len(par))
            for i in range(len(par)):
                r = birkhoff_range(tree.sft, u, tree.word(d, i))
                vals[i] = r.max_sum if variant == "sup" else r.min_sum
        values.append(vals)
    out = tuple(values)
    tree._cache[key] = out
    return out


def node_weights(
    tree: CylinderTree, u: Potential, alpha: float, variant: Variant = "sup"
) -> list[np.ndarray]:
    """Per-level ``exp(-alpha * u(B))``."""
    return [np.exp(-alpha * v) for v in node_u_values(tree, u, variant)]


class SumResult:
    """Optimal value plus its witness family; words are only built when the witness is read."""

    def __init__(self, value: float, batches: Sequence[tuple[int, np.ndarray, np.ndarray]], variant: str, alpha: float,
                 tree: CylinderTree | None = None):
        self.value = value
        self.variant = variant
        self.alpha = alpha
        self._batches = batches
        self._tree = tree

    @functools.cached_property
    def witness(self) -> list[tuple[Word, float]]:
        out: list[tuple[Word, float]] = []
        for d, idx, w in self._batches:
            out.extend(zip(_words_at(self._tree, d, idx), w.tolist()))
        return out

    @property
    def size(self) -> int:
        return sum(len(idx) for _, idx, _ in self._batches)

    def __repr__(self) -> str:
        return f"SumResult(value={self.value!r}, size={self.size}, variant={self.variant!r}, alpha={self.alpha!r})"

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "alpha": self.alpha,
            "witness": [{"word": format_word(w), "weight": c} for w, c in self.witness],
            "variant": self.variant,
        }


def _check_window(tree: CylinderTree, min_depth: int) -> None:
    if not isinstance(min_depth, (int, np.integer)) or not 1 <= min_depth <= tree.max_depth:
        raise BadDepthWindow(f"min depth must lie in [1, {tree.max_depth}], got {min_depth!r}")


def _check_alpha(alpha: float) -> float:
    a = float(alpha)
    if not math.isfinite(a) or a < 0:
        raise ValidationError(f"exponent must be finite and >= 0, got {alpha!r}")
    return a


def _depth_window(tree: CylinderTree, min_depth: int) -> list[np.ndarray]:
    return [np.full(tree.level_size(d), d >= min_depth) for d in range(tree.max_depth + 1)]


def _exact_levels(weights: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Weights as Python integers on one common binary scale (exact, since floats are dyadic)."""
    mant, expo = zip(*(np.frexp(w) for w in weights))
    positive = [m > 0 for m in mant]
    e_min = min((int(e[p].min()) for e, p in zip(expo, positive) if p.any()), default=0)
    out = []
    for m, e, p in zip(mant, expo, positive):
        top = (m * 2.0**53).astype(np.int64).astype(object)
        shift = np.where(p, e - e_min, 0).astype(object)
        out.append(np.where(p, top << shift, 0))
    return out


def _tree_dp(
    tree: CylinderTree,
    weights: Sequence[np.ndarray],
    eligible: Sequence[np.ndarray],
    mode: str,
    exact: bool | None = None,
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Bottom-up optimal cut (``mode='min'``) or antichain (``mode='max'``).

    Trees up to ``EXACT_DP_NODES`` nodes compare subtree sums in exact integer
    arithmetic, so the chosen family is optimal for the exact weight sums and
    its ``fsum`` is the correctly rounded optimum; ``exact=False`` forces floats.
    Ties go to the shallower node.
    """
    D = tree.max_depth
    if exact is None:
        exact = tree.node_count <= EXACT_DP_NODES
    vals = _exact_levels(weights) if exact else list(weights)
    cost: list = [None] * (D + 1)
    take: list = [None] * (D + 1)
    for d in range(D, -1, -1):
        n = tree.level_size(d)
        m = tree.marked[d]
        ok = m & eligible[d]
        w = vals[d]
        if d == D:
            t = ok.copy()
            child = np.zeros(n, dtype=object) if exact else np.zeros(n)
        elif exact:
            child = np.zeros(n, dtype=object)
            np.add.at(child, tree.parents[d + 1], cost[d + 1])
            better = (w <= child) if mode == "min" else (w >= child)
            t = ok & better.astype(bool)
        else:
            child = np.bincount(tree.parents[d + 1], weights=cost[d + 1], minlength=n)
            t = ok & ((w <= child) if mode == "min" else (w >= child))
        c = np.where(t, w, child)
        c[~m] = 0
        cost[d], take[d] = c, t
    return cost, take


def _witness(tree: CylinderTree, take: Sequence[np.ndarray]) -> list[tuple[int, np.ndarray]]:
    """Topmost taken nodes per depth, as ``(depth, indices)`` in lexicographic order."""
    out: list[tuple[int, np.ndarray]] = []
    covered = np.zeros(1, dtype=bool)
    for d in range(tree.max_depth + 1):
        if d > 0:
            covered = covered[tree.parents[d]]
        chosen = take[d] & ~covered
        idx = np.nonzero(chosen)[0]
        if len(idx):
            out.append((d, idx))
        covered = covered | chosen
    return out


def _words_at(tree: CylinderTree, d: int, idx: np.ndarray) -> list[Word]:
    """Words of the level-``d`` nodes ``idx``, walking parents for the whole batch at once."""
    cols = np.empty((len(idx), d), dtype=np.int64)
    i = np.asarray(idx, dtype=np.int64)
    for level in range(d, 0, -1):
        cols[:, level - 1] = tree.symbols[level][i]
        i = tree.parents[level][i]
    return [tuple(row) for row in cols.tolist()]


def _result(tree, nodes, weights, variant, alpha) -> SumResult:
    batches = [(d, idx, np.asarray(weights[d][idx], dtype=float)) for d, idx in nodes]
    value = math.fsum(itertools.chain.from_iterable(w.tolist() for _, _, w in batches))
    return SumResult(value, batches, variant, alpha, tree)


def cover_sum(
    tree: CylinderTree, u: Potential, alpha: float, min_depth: int, variant: Variant = "sup"
) -> SumResult:
    """Minimal ``sum exp(-alpha u(B))`` over covers of Z by cylinders of depth in ``[N, D]``."""
    _check_window(tree, min_depth)
    alpha = _check_alpha(alpha)
    if tree.is_empty:
        return SumResult(0.0, [], variant, alpha)
    weights = node_weights(tree, u, alpha, variant)
    _, take = _tree_dp(tree, weights, _depth_window(tree, min_depth), "min")
    return _result(tree, _witness(tree, take), weights, variant, alpha)


def pack_sum(
    tree: CylinderTree, u: Potential, alpha: float, min_depth: int, variant: Variant = "sup"
) -> SumResult:
    """Maximal ``sum exp(-alpha u(B))`` over disjoint Z-cylinders of depth in ``[N, D]``."""
    _check_window(tree, min_depth)
    alpha = _check_alpha(alpha)
    if tree.is_empty:
        return SumResult(0.0, [], variant, alpha)
    weights = node_weights(tree, u, alpha, variant)
    _, take = _tree_dp(tree, weights, _depth_window(tree, min_depth), "max")
    return _result(tree, _witness(tree, take), weights, variant, alpha)


def capacity_sum(
    tree: CylinderTree, u: Potential, alpha: float, depth: int, variant: Variant = "sup"
) -> SumResult:
    """Sum over every marked cylinder of depth ``n``: both capacities at once."""
    _check_window(tree, depth)
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise ValidationError(f"exponent must be finite, got {alpha!r}")
    weights = node_weights(tree, u, alpha, variant)
    nodes = [(depth, np.nonzero(tree.marked[depth])[0])]
    return _result(tree, nodes, weights, variant, alpha)


def metric_packing_sum(
    tree: CylinderTree, u: Potential, alpha: float, delta: float
) -> SumResult:
    """Packing sum ``sum |B|^alpha`` in the functional metric ``[u]``.

    A cylinder ``[w]`` (``|w| >= 1``) has ``[u]``-diameter ``exp(-S*_n u)``; only
    those with diameter ``<= delta`` may be used.
    """
    alpha = _check_alpha(alpha)
    if not delta > 0:
        raise ValidationError(f"delta must be > 0, got {delta!r}")
    if tree.is_empty:
        return SumResult(0.0, [], "center", alpha)
    centers = node_u_values(tree, u, "center")
    weights = [np.exp(-alpha * v) for v in centers]
    eligible = [np.exp(-v) <= delta for v in centers]
    eligible[0] = np.zeros(1, dtype=bool)
    _, take = _tree_dp(tree, weights, eligible, "max")
    return _result(tree, _witness(tree, take), weights, "center", alpha)


def delta_for_depth(n: int, u_const: float = 1.0) -> float:
    """``delta`` whose ``[u]`` window is exactly depth ``>= n`` when ``u`` is the constant ``u_const``."""
    return math.exp(-n * u_const)


def _sum_value(kind: str, tree, u, alpha, min_depth, variant, depth=None) -> float:
    """Fast scalar evaluation (no witness) used inside root finding."""
    weights = node_weights(tree, u, alpha, variant)
    if kind == "capacity":
        n = min_depth if depth is None else depth
        return float(np.sum(weights[n][tree.marked[n]]))
    if kind in ("cover", "weighted"):
        if kind == "weighted":
            from .weighted_frostman import _max_flow

            return float(_max_flow(tree, weights, min_depth)[0][0])
        cost, _ = _tree_dp(tree, weights, _depth_window(tree, min_depth), "min", exact=False)
        return float(cost[0][0])
    if kind == "pack":
        cost, _ = _tree_dp(tree, weights, _depth_window(tree, min_depth), "max", exact=False)
        return float(cost[0][0])
    raise ValidationError(f"unknown sum kind {kind!r}")


def bisect_decreasing(f, lo: float, hi: float, tol: float, max_iter: int = MAX_BISECTIONS) -> float:
    """Root of a continuous strictly decreasing ``f`` on ``[lo, hi]`` with ``f(lo) >= 0 >= f(hi)``."""
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def critical_exponent(
    kind: SumKind,
    tree: CylinderTree,
    u: Potential,
    min_depth: int,
    tol: float = DEFAULT_TOL,
    variant: Variant = "sup",
    *,
    depth: int | None = None,
) -> float:
    """The exponent at which the chosen sum crosses 1.

    ``kind="capacity"`` works at the single depth ``depth`` (default ``min_depth``).
    ``kind="weighted"`` uses the max-flow value of the weighted cover.
    """
    if tree.is_empty:
        raise EmptySet("target set is empty")
    if not tol > 0:
        raise ValidationError(f"tolerance must be > 0, got {tol!r}")
    _check_window(tree, min_depth)
    n_low = min_depth
    if kind == "capacity":
        n_low = min_depth if depth is None else depth
        _check_window(tree, n_low)

    def f(a: float) -> float:
        return _sum_value(kind, tree, u, a, min_depth, variant, depth) - 1.0

    f0 = f(0.0)
    if f0 < 0:
        raise BracketFailure(f"{kind} sum is {f0 + 1.0} < 1 already at exponent 0")
    if f0 == 0:
        return 0.0
    hi = math.log(tree.node_count) / (n_low * u.min_value) + 1.0
    if f(hi) >= 0:
        raise BracketFailure(f"{kind} sum still >= 1 at the bracket end {hi}")
    return bisect_decreasing(f, 0.0, hi, tol)


def level_sum_exponent(
    tree: CylinderTree, u: Potential, min_depth: int, tol: float = DEFAULT_TOL, variant: Variant = "sup"
) -> float:
    """Exponent where ``sum_{n=N..D} capacity_n`` crosses 1.

    Every antichain splits into its levels, so the packing sum is at most this
    level sum; its exponent bounds the packing exponent from above at finite depth.
    """
    if tree.is_empty:
        raise EmptySet("target set is empty")
    _check_window(tree, min_depth)

    def f(a: float) -> float:
        w = node_weights(tree, u, a, variant)
        return float(
            sum(np.sum(w[n][tree.marked[n]]) for n in range(min_depth, tree.max_depth + 1))
        ) - 1.0

    hi = math.log(tree.node_count) / (min_depth * u.min_value) + 1.0
    if f(0.0) < 0:
        raise BracketFailure("level sum < 1 at exponent 0")
    return bisect_decreasing(f, 0.0, hi, tol)


def is_cut(tree: CylinderTree, words: Sequence[Word], min_depth: int) -> bool:
    """Every marked leaf has an ancestor-or-self among ``words`` with depth in ``[N, D]``."""
    chosen = {w for w in words if min_depth <= len(w) <= tree.max_depth}
    D = tree.max_depth
    leaves = tree.words(D)[tree.marked[D]]
    for leaf in leaves:
        t = tuple(int(a) for a in leaf)
        if not any(t[:n] in chosen for n in range(min_depth, D + 1)):
            return False
    return True


def is_antichain(words: Sequence[Word]) -> bool:
    ws = sorted(set(words))
    # in lexicographic order a prefix sorts immediately before one of its extensions
    return all(ws[i + 1][: len(ws[i])] != ws[i] for i in range(len(ws) - 1)) and len(ws) == len(words)
