"""Subshifts of finite type, cylinders and Birkhoff sums of locally constant potentials.

The ambient metric is fixed as ``d(x, y) = 2 ** -(first index where x and y differ)``.
Under that metric every Bowen ball is a cylinder, so epsilon only ever enters
through :func:`bowen_ball_depth`; everything downstream works with integer depths.

Symbols are ``0 .. L-1`` and a word is a plain ``tuple`` of ints.
"""

from __future__ import annotations

import math
import os
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import NamedTuple

import numpy as np

from .errors import (
    DeadSymbol,
    DepthOverflow,
    DimensionMismatch,
    InadmissibleWord,
    InsufficientPrefix,
    ValidationError,
)

Word = tuple[int, ...]

DEFAULT_NODE_CAP = 10**7
NODE_CAP_ENV = "BSDIM_NODE_CAP"


def default_node_cap() -> int:
    """Node cap for enumeration, overridable through ``BSDIM_NODE_CAP``."""
    raw = os.environ.get(NODE_CAP_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_NODE_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ValidationError(f"{NODE_CAP_ENV} must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ValidationError(f"{NODE_CAP_ENV} must be positive, got {cap}")
    return cap


def parse_word(text: str) -> Word:
    """``"0110"`` -> ``(0, 1, 1, 0)``. One digit per symbol."""
    if not isinstance(text, str) or not text.isdigit() and text != "":
        raise ValidationError(f"words are digit strings, got {text!r}")
    return tuple(int(c) for c in text)


def format_word(word: Sequence[int]) -> str:
    return "".join(str(int(a)) for a in word)


def _strongly_connected(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    reach = (adj > 0) | np.eye(n, dtype=bool)
    # repeated squaring of the reachability relation
    for _ in range(max(1, math.ceil(math.log2(max(n, 2)))) + 1):
        reach = reach | ((reach.astype(np.int64) @ reach.astype(np.int64)) > 0)
    return bool(reach.all())


@dataclass(frozen=True)
class Sft:
    """One-sided subshift of finite type on ``alphabet_size`` symbols.

    ``adjacency[i][j] == 1`` iff symbol ``j`` may follow symbol ``i``.
    Build through :func:`validate_sft`.
    """

    alphabet_size: int
    adjacency: tuple[tuple[int, ...], ...]

    @cached_property
    def matrix(self) -> np.ndarray:
        a = np.array(self.adjacency, dtype=np.int64)
        a.setflags(write=False)
        return a

    @cached_property
    def irreducible(self) -> bool:
        return _strongly_connected(self.matrix)

    def allows(self, a: int, b: int) -> bool:
        return self.adjacency[a][b] == 1

    def is_admissible(self, word: Sequence[int]) -> bool:
        L = self.alphabet_size
        if any(not (0 <= int(a) < L) for a in word):
            return False
        return all(self.adjacency[word[i]][word[i + 1]] for i in range(len(word) - 1))

    def check_word(self, word: Sequence[int]) -> Word:
        w = tuple(int(a) for a in word)
        if not self.is_admissible(w):
            raise InadmissibleWord(f"word {format_word(w)!r} is not admissible")
        return w

    def word_count(self, n: int) -> int:
        """Number of admissible words of length ``n`` (exact integer arithmetic)."""
        if n == 0:
            return 1
        counts = [1] * self.alphabet_size
        for _ in range(n - 1):
            counts = [
                sum(self.adjacency[a][b] * counts[b] for b in range(self.alphabet_size))
                for a in range(self.alphabet_size)
            ]
        return sum(counts)


def validate_sft(alphabet_size: int, adjacency: Sequence[Sequence[int]]) -> Sft:
    """Check an adjacency matrix and return the :class:`Sft`.

    Irreducibility is reported through :attr:`Sft.irreducible`; spectral
    routines downstream refuse reducible systems.
    """
    if not isinstance(alphabet_size, (int, np.integer)) or alphabet_size < 2:
        raise ValidationError(f"alphabet size must be an integer >= 2, got {alphabet_size!r}")
    L = int(alphabet_size)
    rows = [list(r) for r in adjacency]
    if len(rows) != L or any(len(r) != L for r in rows):
        raise DimensionMismatch(f"adjacency must be {L}x{L}")
    for r in rows:
        for x in r:
            if x not in (0, 1):
                raise ValidationError(f"adjacency entries must be 0 or 1, got {x!r}")
    for i in range(L):
        if not any(rows[i]):
            raise DeadSymbol(f"row {i} is empty: symbol {i} has no successor")
        if not any(rows[j][i] for j in range(L)):
            raise DeadSymbol(f"column {i} is empty: symbol {i} has no predecessor")
    return Sft(L, tuple(tuple(int(x) for x in r) for r in rows))


def full_shift(alphabet_size: int) -> Sft:
    L = alphabet_size
    return validate_sft(L, [[1] * L for _ in range(L)])


def admissible_words(sft: Sft, n: int, cap: int | None = None) -> list[Word]:
    """All admissible words of length ``n`` in lexicographic order."""
    if n < 0:
        raise ValidationError(f"word length must be >= 0, got {n}")
    cap = default_node_cap() if cap is None else cap
    count = sft.word_count(n)
    if count > cap:
        raise DepthOverflow(f"{count} words of length {n} exceed the cap {cap}")
    words: list[Word] = [()]
    for _ in range(n):
        words = [
            w + (b,)
            for w in words
            for b in range(sft.alphabet_size)
            if not w or sft.adjacency[w[-1]][b]
        ]
    return words


@dataclass(frozen=True, eq=False)
class Potential:
    """Strictly positive locally constant potential of dependence depth ``k``.

    ``u(x) = table[x_0 .. x_{k-1}]``. Build through :meth:`from_table` or
    :meth:`constant`.
    """

    alphabet_size: int
    depth: int
    table: Mapping[Word, float]

    @classmethod
    def from_table(cls, sft: Sft, depth: int, table: Mapping) -> Potential:
        if not isinstance(depth, (int, np.integer)) or depth < 1:
            raise ValidationError(f"potential depth must be >= 1, got {depth!r}")
        k = int(depth)
        clean: dict[Word, float] = {}
        for key, value in table.items():
            w = parse_word(key) if isinstance(key, str) else tuple(int(a) for a in key)
            if len(w) != k:
                raise ValidationError(f"potential key {format_word(w)!r} does not have length {k}")
            if not sft.is_admissible(w):
                raise InadmissibleWord(f"potential key {format_word(w)!r} is not admissible")
            v = float(value)
            if not math.isfinite(v) or v <= 0.0:
                raise ValidationError(f"potential values must be finite and > 0, got {value!r}")
            clean[w] = v
        missing = [w for w in admissible_words(sft, k) if w not in clean]
        if missing:
            raise ValidationError(
                f"potential table misses {len(missing)} admissible words, e.g. {format_word(missing[0])!r}"
            )
        return cls(sft.alphabet_size, k, MappingProxyType(dict(sorted(clean.items()))))

    @classmethod
    def constant(cls, sft: Sft, value: float = 1.0) -> Potential:
        return cls.from_table(sft, 1, {(a,): value for a in range(sft.alphabet_size)})

    @classmethod
    def from_symbol_values(cls, sft: Sft, values: Sequence[float]) -> Potential:
        return cls.from_table(sft, 1, {(a,): v for a, v in enumerate(values)})

    def __call__(self, word: Sequence[int]) -> float:
        return self.table[tuple(word)]

    @cached_property
    def min_value(self) -> float:
        return min(self.table.values())

    @cached_property
    def max_value(self) -> float:
        return max(self.table.values())

    @cached_property
    def array(self) -> np.ndarray:
        """Values indexed by the base-L code of the k-word; NaN on inadmissible words."""
        L, k = self.alphabet_size, self.depth
        arr = np.full(L**k, np.nan)
        for w, v in self.table.items():
            arr[word_code(w, L)] = v
        arr.setflags(write=False)
        return arr

    def scaled(self, c: float) -> Potential:
        if not c > 0:
            raise ValidationError(f"scale factor must be > 0, got {c!r}")
        return Potential(
            self.alphabet_size, self.depth, MappingProxyType({w: c * v for w, v in self.table.items()})
        )

    def to_json(self) -> dict:
        return {"depth": self.depth, "table": {format_word(w): v for w, v in self.table.items()}}


def word_code(word: Iterable[int], L: int) -> int:
    code = 0
    for a in word:
        code = code * L + int(a)
    return code


class BirkhoffRange(NamedTuple):
    n: int
    min_sum: float
    max_sum: float


def _tail_extrema(sft: Sft, u: Potential, word: Word) -> tuple[float, float]:
    """Min/max over admissible (k-1)-symbol extensions of the windows that overhang ``word``.

    Windows start at ``max(0, n-k+1) .. n-1``; DP state is the trailing k-1 symbols.
    """
    n, k = len(word), u.depth
    if k == 1:
        return 0.0, 0.0
    states: dict[Word, tuple[float, float]] = {word[-(k - 1):]: (0.0, 0.0)}
    current_len = n
    for _ in range(k - 1):
        nxt: dict[Word, tuple[float, float]] = {}
        for state, (lo, hi) in states.items():
            last = state[-1]
            for b in range(sft.alphabet_size):
                if not sft.adjacency[last][b]:
                    continue
                full = state + (b,)
                start = current_len + 1 - k  # start index of the window ending at the new symbol
                if start >= 0:
                    val = u.table[full[-k:]]
                    new = (lo + val, hi + val)
                else:
                    new = (lo, hi)
                key = full[-(k - 1):]
                if key in nxt:
                    a0, b0 = nxt[key]
                    nxt[key] = (min(a0, new[0]), max(b0, new[1]))
                else:
                    nxt[key] = new
        states = nxt
        current_len += 1
    lows = [v[0] for v in states.values()]
    highs = [v[1] for v in states.values()]
    return min(lows), max(highs)


def fixed_sum(u: Potential, word: Word) -> float:
    """Sum of the windows lying entirely inside ``word``.

    Accumulated left to right so that it agrees bit for bit with the running
    sums kept by the cylinder tree.
    """
    k = u.depth
    total = 0.0
    for i in range(len(word) - k + 1):
        total += u.table[word[i:i + k]]
    return total


def birkhoff_range(sft: Sft, u: Potential, word: Sequence[int]) -> BirkhoffRange:
    """Min and max of ``S_n u`` over the cylinder ``[word]``.

    The min is ``S*_n u``; the max is the sup-variant ball weight ``u(B)``.
    """
    w = sft.check_word(word)
    n = len(w)
    if n < 1:
        raise ValidationError("Birkhoff sums need a word of length >= 1")
    base = fixed_sum(u, w)
    lo, hi = _tail_extrema(sft, u, w)
    return BirkhoffRange(n, base + lo, base + hi)


def bowen_ball_depth(n: int, epsilon: float) -> int:
    """Depth ``t`` with ``B_n(x, epsilon) == C_t(x)`` under the fixed 2-adic metric.

    ``d_n(x, y) = 2 ** -(t - n + 1)`` when x, y share exactly ``t >= n`` symbols,
    so the open ball needs the smallest ``m >= 1`` with ``2 ** -m < epsilon``
    and ``t = n + m - 1``.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if not (0.0 < epsilon <= 1.0):
        raise ValidationError(f"epsilon must lie in (0, 1], got {epsilon}")
    m = 1
    while 2.0 ** -m >= epsilon:
        m += 1
    return n + m - 1


def functional_metric(sft: Sft, u: Potential, w1: Sequence[int], w2: Sequence[int]) -> float:
    """``[u](x, y) = exp(-S*_n u(x))`` with ``n`` the first disagreement index.

    Returns ``0.0`` when both prefixes agree over their full (equal) length.
    """
    a, b = sft.check_word(w1), sft.check_word(w2)
    common = min(len(a), len(b))
    n = next((i for i in range(common) if a[i] != b[i]), None)
    if n is None:
        if len(a) != len(b):
            raise InsufficientPrefix("prefixes agree on their common length; disagreement not located")
        return 0.0
    if n == 0:
        return 1.0
    return math.exp(-birkhoff_range(sft, u, a[:n]).min_sum)
