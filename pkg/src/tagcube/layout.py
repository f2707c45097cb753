"""Ordering tags on a line so similar ones sit close together.

The cost of an order is the sum, over unordered tag pairs, of their
similarity times the index distance between their positions. Finding the
minimum is the classic linear-arrangement problem and is intractable in
general, so the engine ships greedy chaining plus two seeded local
searches, and an exhaustive search for small instances to serve as an
oracle in tests:

* nn_order: start somewhere, repeatedly append the unplaced tag most
  similar to the last placed one. O(n^2) similarity lookups.
* pwmc_order: propose random position swaps, keep the ones that lower
  the cost.
* mc_order: propose random cut-and-exchange of the two resulting blocks
  (a rotation), keep improvements.

The wire form of a finished layout is an ordered list where a GLUED
token between two tags tells the client they must stay visually
adjacent. PERMUTABLE is reserved in the grammar but never emitted.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import PermutationMismatch, TooLarge
from .similarity import SimilarityMatrix

GLUED = "GLUED"
PERMUTABLE = "PERMUTABLE"  # reserved wire token, accepted but never produced

BRUTE_FORCE_CAP = 9
# Improvement smaller than this is treated as a tie so float drift can
# never let a "strictly improving" move raise the recomputed total.
_MIN_GAIN = 1e-9


@dataclass(frozen=True)
class LayoutOrder:
    """A permutation: order[p] is the tag index shown at position p."""

    order: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))

    @classmethod
    def identity(cls, n: int) -> "LayoutOrder":
        return cls(tuple(range(n)))

    def positions(self) -> np.ndarray:
        """positions()[i] is where tag i sits in the list."""
        pos = np.empty(len(self.order), dtype=np.int64)
        for p, tag_index in enumerate(self.order):
            pos[tag_index] = p
        return pos


def _check_order(order: LayoutOrder, n: int) -> None:
    if len(order.order) != n or sorted(order.order) != list(range(n)):
        raise PermutationMismatch(f"order {order.order} is not a permutation of 0..{n - 1}")


def _cost_from_positions(values: np.ndarray, pos: np.ndarray) -> float:
    d = np.abs(pos[:, None] - pos[None, :])
    return float((values * d).sum() / 2.0)


def mla_cost(order: LayoutOrder, m: SimilarityMatrix) -> float:
    """Sum over unordered pairs of similarity times index distance."""
    _check_order(order, m.n)
    if m.n < 2:
        return 0.0
    return _cost_from_positions(m.values, order.positions())


def _default_start(m: SimilarityMatrix) -> int:
    """Heaviest tag, lexicographic coords on ties."""
    return min(range(m.n), key=lambda i: (-m.tags[i].weight, m.tags[i].coords))


def nn_order(
    m: SimilarityMatrix,
    *,
    start: int | None = None,
    seed: int | None = None,
) -> LayoutOrder:
    """Greedy chain: repeatedly append the unplaced tag most similar to
    the latest one. Ties go to the lexicographically smallest coords.
    The start tag defaults to the heaviest; a seed picks it at random."""
    n = m.n
    if n == 0:
        return LayoutOrder(())
    if start is None:
        start = random.Random(seed).randrange(n) if seed is not None else _default_start(m)
    if not (0 <= start < n):
        raise ValueError(f"start index {start} out of range")

    placed = [start]
    remaining = [i for i in range(n) if i != start]
    while remaining:
        current = placed[-1]
        best = None
        best_sim = None
        for j in remaining:
            s = m.similarity(current, j)
            if (
                best is None
                or s > best_sim
                or (s == best_sim and m.tags[j].coords < m.tags[best].coords)
            ):
                best, best_sim = j, s
        placed.append(best)
        remaining.remove(best)
    return LayoutOrder(tuple(placed))


def pwmc_order(
    start: LayoutOrder,
    m: SimilarityMatrix,
    exchanges: int,
    seed: int,
) -> LayoutOrder:
    """Pairwise-exchange local search: `exchanges` uniform random
    position-pair proposals, each applied only if it lowers the cost.
    The result never costs more than the start."""
    _check_order(start, m.n)
    n = m.n
    if n < 2 or exchanges <= 0:
        return start
    rng = random.Random(seed)
    values = m.values
    order = list(start.order)
    pos = np.empty(n, dtype=np.int64)
    for p, t in enumerate(order):
        pos[t] = p

    for _ in range(exchanges):
        i = rng.randrange(n)
        j = rng.randrange(n - 1)
        if j >= i:
            j += 1
        a, b = order[i], order[j]
        # Only pairs touching a or b change, and the (a, b) pair itself
        # keeps its distance under a swap: zero both out of the shift.
        shift = np.abs(pos - pos[b]) - np.abs(pos - pos[a])
        shift[a] = 0
        shift[b] = 0
        delta = float((values[a] - values[b]) @ shift)
        if delta < -_MIN_GAIN:
            order[i], order[j] = b, a
            pos[a], pos[b] = pos[b], pos[a]
    return LayoutOrder(tuple(order))


def mc_order(
    start: LayoutOrder,
    m: SimilarityMatrix,
    iterations: int,
    seed: int,
) -> LayoutOrder:
    """Block-exchange local search: cut the list at a random place, test
    swapping the two blocks (a rotation), keep strict improvements."""
    _check_order(start, m.n)
    n = m.n
    if n < 2 or iterations <= 0:
        return start
    rng = random.Random(seed)
    values = m.values
    order = list(start.order)
    cost = _cost_from_positions(values, LayoutOrder(tuple(order)).positions())

    for _ in range(iterations):
        c = rng.randrange(1, n)
        candidate = order[c:] + order[:c]
        cand_pos = np.empty(n, dtype=np.int64)
        for p, t in enumerate(candidate):
            cand_pos[t] = p
        cand_cost = _cost_from_positions(values, cand_pos)
        if cand_cost < cost - _MIN_GAIN:
            order = candidate
            cost = cand_cost
    return LayoutOrder(tuple(order))


@lru_cache(maxsize=4)
def _half_permutations(n: int) -> np.ndarray:
    """All permutations of range(n) with first element < last element, in
    lexicographic order. Cost is invariant under reversal, so this half
    covers every achievable cost."""
    if n == 1:
        return np.array([[0]], dtype=np.int8)
    perms = [p for p in itertools.permutations(range(n)) if p[0] < p[-1]]
    return np.array(perms, dtype=np.int8)


def brute_force_order(m: SimilarityMatrix) -> LayoutOrder:
    """Exhaustive minimum-cost order for small n; the oracle the
    heuristics are measured against."""
    n = m.n
    if n > BRUTE_FORCE_CAP:
        raise TooLarge(n, BRUTE_FORCE_CAP)
    if n <= 2:
        return LayoutOrder.identity(n)
    perms = _half_permutations(n)
    costs = np.zeros(len(perms), dtype=float)
    values = m.values
    for i in range(n - 1):
        for j in range(i + 1, n):
            costs += values[perms[:, i], perms[:, j]] * (j - i)
    best = int(np.argmin(costs))  # first occurrence = lexicographically smallest
    return LayoutOrder(tuple(int(x) for x in perms[best]))


def emit_hints(
    order: LayoutOrder,
    m: SimilarityMatrix,
    glue_threshold: float,
) -> list:
    """The ordered tag list with a GLUED token between adjacent tags whose
    similarity reaches the threshold; this is the wire representation the
    client renders without further cost computation."""
    _check_order(order, m.n)
    if not -1.0 <= glue_threshold <= 1.0:
        raise ValueError(f"glue threshold must be in [-1, 1], got {glue_threshold}")
    out: list = []
    for p, tag_index in enumerate(order.order):
        if p > 0:
            prev = order.order[p - 1]
            if float(m.values[prev, tag_index]) >= glue_threshold:
                out.append(GLUED)
        out.append(m.tags[tag_index])
    return out
