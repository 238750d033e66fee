"""Finite word spaces of the three subshifts (full, nonzero-product,
invertible) with pruned matrix-product trees, and the infinite
nonzero-word reachability check."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import BudgetExceeded, EmptyWord
from .ifs import AffineIFS, node_budget
from .mat2 import Mat2

Word = Tuple[int, ...]


class SubshiftKind(enum.Enum):
    FULL = "full"
    SIGMA = "sigma"
    INVERTIBLE = "invertible"


#: Relative norm threshold below which a product is treated as the zero matrix.
ZERO_PRODUCT_TOL = 1e-12

#: Cap on distinct projective line states in the nonzero-word automaton.
MAX_LINE_STATES = 4096


def shift(word: Word) -> Word:
    """Drop the first letter (the left shift on finite words)."""
    if len(word) == 0:
        raise EmptyWord("cannot shift the empty word")
    return word[1:]


@dataclass(frozen=True)
class LevelSet:
    kind: SubshiftKind
    depth: int
    entries: Tuple[Tuple[Word, Mat2], ...]

    @property
    def words(self) -> List[Word]:
        return [w for w, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


def word_product(ifs: AffineIFS, word: Word) -> Mat2:
    prod = Mat2.identity()
    for letter in word:
        prod = prod @ ifs.matrices[letter]
    return prod


def _zero_threshold(ifs: AffineIFS, depth: int) -> float:
    scale = max(ifs.max_norm(), 1e-300)
    return ZERO_PRODUCT_TOL * scale**depth


def enumerate_level(
    ifs: AffineIFS,
    kind: SubshiftKind,
    n: int,
    budget: Optional[int] = None,
) -> LevelSet:
    """All words of the subshift at depth n, with cached matrix products.

    Depth-first over a shared prefix tree: each product is one 2x2 multiply
    from its parent.  Sigma branches are cut permanently once a prefix
    product is (numerically) the zero matrix.
    """
    if n < 1:
        raise ValueError("enumerate_level requires depth n >= 1")
    budget = node_budget(budget)
    letters = (
        ifs.invertible_index if kind is SubshiftKind.INVERTIBLE else range(len(ifs))
    )
    letters = list(letters)
    if math.pow(max(len(letters), 1), n) > budget:
        raise BudgetExceeded(
            f"enumerating {len(letters)}^{n} words exceeds budget {budget}",
            budget=budget,
        )
    prune_zero = kind is SubshiftKind.SIGMA
    entries: List[Tuple[Word, Mat2]] = []
    nodes = 0

    stack: List[Tuple[Word, Mat2]] = [((), Mat2.identity())]
    while stack:
        word, prod = stack.pop()
        depth = len(word)
        if depth == n:
            entries.append((word, prod))
            continue
        # push in reverse so the DFS emits words in lexicographic order
        for letter in reversed(letters):
            child = prod @ ifs.matrices[letter]
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(
                    f"word tree exceeded node budget {budget}", nodes=nodes, budget=budget
                )
            if prune_zero and child.max_abs_entry() <= _zero_threshold(ifs, depth + 1):
                continue
            stack.append((word + (letter,), child))
    return LevelSet(kind, n, tuple(entries))


@dataclass(frozen=True)
class NonzeroWordResult:
    status: str  # "yes" | "no" | "inconclusive"
    witness: Optional[Word] = None  # a prefix that can be pumped, when "yes"
    depth: Optional[int] = None  # first depth where every product dies, when "no"


def has_infinite_nonzero_word(
    ifs: AffineIFS,
    max_depth: int = 64,
    line_tol: float = 1e-9,
    max_states: int = MAX_LINE_STATES,
) -> NonzeroWordResult:
    """Decide whether some infinite word keeps all prefix products nonzero.

    States are {full rank} plus the image line of a rank-one product; a cycle
    among reachable states certifies Yes, an empty frontier at depth n
    certifies No(n), and hitting the state or depth cap is Inconclusive.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    tol = ifs.rank_tol
    mats = ifs.matrices
    ranks = [m.rank(tol) for m in mats]

    FULL = ("full",)

    def line_state(vec: np.ndarray):
        angle = math.atan2(vec[1], vec[0]) % math.pi
        return ("line", round(angle / line_tol))

    def line_vector(state) -> np.ndarray:
        angle = state[1] * line_tol
        return np.array([math.cos(angle), math.sin(angle)])

    def transitions(state):
        out = []
        for i, m in enumerate(mats):
            if ranks[i] == 0:
                continue
            if state == FULL:
                if ranks[i] == 2:
                    out.append((i, FULL))
                else:
                    col = m.to_array()[:, 0]
                    if np.hypot(*col) < m.norm() * 0.5:
                        col = m.to_array()[:, 1]
                    out.append((i, line_state(col)))
            else:
                y = m.apply(line_vector(state))
                if np.hypot(*y) > tol * max(m.norm(), 1e-300):
                    out.append((i, line_state(y)))
        return out

    # breadth-first discovery of the reachable state graph
    first_word: Dict[tuple, Word] = {FULL: ()}
    frontier = [FULL]
    edges: Dict[tuple, List[Tuple[int, tuple]]] = {}
    closed = False
    for depth in range(1, max_depth + 1):
        next_frontier = []
        for state in frontier:
            if state not in edges:
                edges[state] = transitions(state)
            for letter, target in edges[state]:
                if target not in first_word:
                    first_word[target] = first_word[state] + (letter,)
                    next_frontier.append(target)
        if len(first_word) > max_states:
            return NonzeroWordResult("inconclusive")
        if not next_frontier:
            closed = True
            break
        frontier = next_frontier

    # a live state without computed edges may still lead anywhere
    for state in list(first_word):
        if state not in edges:
            edges[state] = transitions(state)

    # dead states cannot be pumped; iteratively strip states with no out-edge
    alive = set(first_word)
    changed = True
    while changed:
        changed = False
        for state in list(alive):
            if not any(t in alive for _, t in edges[state]):
                alive.discard(state)
                changed = True
    if alive:
        # finite graph in which every alive state has an alive successor:
        # following successors must eventually cycle, so Yes
        witness_state = FULL if FULL in alive else min(alive, key=lambda s: len(first_word[s]))
        word = first_word[witness_state]
        state = witness_state
        seen = {state}
        while True:
            letter, target = next(
                (l, t) for l, t in edges[state] if t in alive
            )
            word = word + (letter,)
            if target in seen:
                break
            seen.add(target)
            state = target
        return NonzeroWordResult("yes", witness=word)
    if closed:
        # every path from the root dies; the longest path bounds the depth
        # at which all products are zero
        longest = _longest_path(FULL, edges)
        return NonzeroWordResult("no", depth=longest + 1)
    return NonzeroWordResult("inconclusive")


def semigroup_has_rank_zero_product(
    ifs: AffineIFS,
    max_depth: int = 64,
    line_tol: float = 1e-9,
    max_states: int = MAX_LINE_STATES,
) -> Optional[bool]:
    """Whether some finite product of the letter matrices is the zero matrix.

    Runs the same {full rank, image line} state machine as
    ``has_infinite_nonzero_word`` but watches for dying transitions.
    Returns True/False when decided, None when the state cap or depth
    bound is hit first.
    """
    tol = ifs.rank_tol
    mats = ifs.matrices
    ranks = [m.rank(tol) for m in mats]
    if any(r == 0 for r in ranks):
        return True

    # every nonnegative letter without a zero row sends positive vectors to
    # positive vectors, so no product of such letters can vanish
    arrays = [m.to_array() for m in mats]
    if all(np.all(a >= 0.0) and np.all(a.max(axis=1) > 0.0) for a in arrays):
        return False

    FULL = ("full",)

    def line_state(vec: np.ndarray):
        angle = math.atan2(vec[1], vec[0]) % math.pi
        return ("line", round(angle / line_tol))

    def line_vector(state) -> np.ndarray:
        angle = state[1] * line_tol
        return np.array([math.cos(angle), math.sin(angle)])

    seen = {FULL}
    frontier = [FULL]
    for _ in range(max_depth):
        next_frontier = []
        for state in frontier:
            for i, m in enumerate(mats):
                if state == FULL:
                    if ranks[i] == 2:
                        target = FULL
                    else:
                        col = m.to_array()[:, 0]
                        if np.hypot(*col) < m.norm() * 0.5:
                            col = m.to_array()[:, 1]
                        target = line_state(col)
                else:
                    y = m.apply(line_vector(state))
                    if np.hypot(*y) <= tol * max(m.norm(), 1e-300):
                        return True  # this product annihilates the line
                    target = line_state(y)
                if target not in seen:
                    seen.add(target)
                    next_frontier.append(target)
        if len(seen) > max_states:
            return None
        if not next_frontier:
            return False  # state closure reached without any dying transition
        frontier = next_frontier
    return None


def _longest_path(root, edges) -> int:
    memo: Dict[tuple, int] = {}

    def rec(state) -> int:
        if state in memo:
            return memo[state]
        memo[state] = 0  # acyclic here: cycles were ruled out before calling
        best = 0
        for _, target in edges.get(state, []):
            best = max(best, 1 + rec(target))
        memo[state] = best
        return best

    return rec(root)
