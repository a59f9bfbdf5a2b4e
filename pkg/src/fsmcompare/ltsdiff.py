"""Structural comparison of two machines.

Produces a diff machine whose states and transitions are annotated
unchanged, added or removed. Three phases: similarity scoring with an
attenuation-damped fixed point, landmark-seeded state matching, and diff
construction from the matching.

The local score of a state pair is the mean of the Jaccard overlaps of
their outgoing and incoming label sets (Jaccard of two empty sets is 1).
Global scores iterate

    S'(p, q) = (1 - k) * S0(p, q) + k/2 * (succ_avg(p, q) + pred_avg(p, q))

where succ_avg averages, over each outgoing event both states share, the
best current score among pairs of successors on that event (and is S0(p, q)
when they share none); pred_avg mirrors this on predecessors; k is the
attenuation. The map is a contraction for k < 1, so the iteration converges
and is cut off at a max-norm change of convergence_epsilon.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

from .automata import Nfa


@dataclass(frozen=True)
class DiffParams:
    """Tuning knobs for structural comparison; all have sensible defaults."""

    attenuation: float = 0.5
    convergence_epsilon: float = 1e-9
    max_iterations: int = 1000
    landmark_fraction: float = 0.25
    landmark_ratio: float = 1.5

    def __post_init__(self) -> None:
        if not 0.0 < self.attenuation < 1.0:
            raise ValueError("attenuation must be in (0, 1)")
        if self.convergence_epsilon < 0.0:
            raise ValueError("convergence_epsilon must be non-negative")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not 0.0 < self.landmark_fraction <= 1.0:
            raise ValueError("landmark_fraction must be in (0, 1]")
        if self.landmark_ratio < 1.0:
            raise ValueError("landmark_ratio must be at least 1")


@dataclass(frozen=True)
class ScoreTable:
    """Dense similarity scores for all state pairs of two machines."""

    left: tuple[str, ...]
    right: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]

    def score(self, p: str, q: str) -> float:
        return self.values[self.left.index(p)][self.right.index(q)]

    def transposed(self) -> "ScoreTable":
        cols = tuple(
            tuple(self.values[i][j] for i in range(len(self.left))) for j in range(len(self.right))
        )
        return ScoreTable(self.right, self.left, cols)


Matching = frozenset[tuple[str, str]]


class Change(str, enum.Enum):
    UNCHANGED = "unchanged"
    ADDED = "added"
    REMOVED = "removed"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


@dataclass(frozen=True)
class DiffState:
    """A diff-machine state with provenance.

    Unchanged states carry both source names, removed ones only the left
    (first machine) name, added ones only the right name. ``initial`` and
    ``accepting`` record how membership in the respective sets changed
    (None when the state is in neither machine's set).
    """

    left: str | None
    right: str | None
    change: Change
    initial: Change | None
    accepting: Change | None

    @property
    def key(self) -> tuple[str | None, str | None]:
        return (self.left, self.right)


@dataclass(frozen=True)
class DiffTransition:
    source: tuple[str | None, str | None]
    event: str
    target: tuple[str | None, str | None]
    change: Change


@dataclass(frozen=True)
class DiffMachine:
    """Annotated structural difference between two machines.

    Restricting to unchanged+removed elements reproduces the first input,
    restricting to unchanged+added the second.
    """

    states: tuple[DiffState, ...]
    transitions: tuple[DiffTransition, ...]


class DiffStats(NamedTuple):
    added_transitions: int
    removed_transitions: int
    added_states: int
    removed_states: int


def _label_maps(machine: Nfa) -> tuple[dict[str, frozenset[str]], dict[str, frozenset[str]]]:
    out: dict[str, set[str]] = {s: set() for s in machine.states}
    inc: dict[str, set[str]] = {s: set() for s in machine.states}
    for src, event, dst in machine.transitions:
        out[src].add(event)
        inc[dst].add(event)
    return (
        {s: frozenset(v) for s, v in out.items()},
        {s: frozenset(v) for s, v in inc.items()},
    )


def _jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def local_scores(a: Nfa, b: Nfa) -> ScoreTable:
    """Similarity from directly connected transition labels only."""
    left = tuple(sorted(a.states))
    right = tuple(sorted(b.states))
    out_a, in_a = _label_maps(a)
    out_b, in_b = _label_maps(b)
    values = tuple(
        tuple(
            0.5 * (_jaccard(out_a[p], out_b[q]) + _jaccard(in_a[p], in_b[q])) for q in right
        )
        for p in left
    )
    return ScoreTable(left, right, values)


def _edge_maps(machine: Nfa, states: tuple[str, ...]):
    idx = {s: i for i, s in enumerate(states)}
    succ: dict[tuple[int, str], list[int]] = {}
    pred: dict[tuple[int, str], list[int]] = {}
    for src, event, dst in sorted(machine.transitions):
        succ.setdefault((idx[src], event), []).append(idx[dst])
        pred.setdefault((idx[dst], event), []).append(idx[src])
    return succ, pred


def global_scores(a: Nfa, b: Nfa, params: DiffParams) -> ScoreTable:
    """Fixed point of the damped neighborhood recurrence seeded by local scores."""
    base = local_scores(a, b)
    left, right = base.left, base.right
    out_a, in_a = _label_maps(a)
    out_b, in_b = _label_maps(b)
    succ_a, pred_a = _edge_maps(a, left)
    succ_b, pred_b = _edge_maps(b, right)

    # Per pair: for every shared event, the successor (resp. predecessor)
    # index pairs whose best score feeds the average.
    succ_groups: list[list[list[tuple[int, int]] | None]] = []
    pred_groups: list[list[list[tuple[int, int]] | None]] = []
    for i, p in enumerate(left):
        succ_row: list[list[tuple[int, int]] | None] = []
        pred_row: list[list[tuple[int, int]] | None] = []
        for j, q in enumerate(right):
            shared_out = sorted(out_a[p] & out_b[q])
            shared_in = sorted(in_a[p] & in_b[q])
            succ_row.append(
                [
                    [(pi, qi) for pi in succ_a[(i, e)] for qi in succ_b[(j, e)]]
                    for e in shared_out
                ]
                or None
            )
            pred_row.append(
                [
                    [(pi, qi) for pi in pred_a[(i, e)] for qi in pred_b[(j, e)]]
                    for e in shared_in
                ]
                or None
            )
        succ_groups.append(succ_row)
        pred_groups.append(pred_row)

    k = params.attenuation
    s0 = [list(row) for row in base.values]
    current = [row[:] for row in s0]
    for _ in range(params.max_iterations):
        delta = 0.0
        nxt = []
        for i in range(len(left)):
            row = []
            for j in range(len(right)):
                groups = succ_groups[i][j]
                if groups is None:
                    succ_avg = s0[i][j]
                else:
                    succ_avg = sum(max(current[pi][qi] for pi, qi in g) for g in groups) / len(groups)
                groups = pred_groups[i][j]
                if groups is None:
                    pred_avg = s0[i][j]
                else:
                    pred_avg = sum(max(current[pi][qi] for pi, qi in g) for g in groups) / len(groups)
                value = (1.0 - k) * s0[i][j] + k * 0.5 * (succ_avg + pred_avg)
                delta = max(delta, abs(value - current[i][j]))
                row.append(value)
            nxt.append(row)
        current = nxt
        if delta <= params.convergence_epsilon:
            break
    return ScoreTable(left, right, tuple(tuple(row) for row in current))


def _ranked_pairs(scores: ScoreTable) -> list[tuple[int, int]]:
    pairs = [(i, j) for i in range(len(scores.left)) for j in range(len(scores.right))]
    pairs.sort(key=lambda ij: (-scores.values[ij[0]][ij[1]], scores.left[ij[0]], scores.right[ij[1]]))
    return pairs


def select_landmarks(scores: ScoreTable, a: Nfa, b: Nfa, params: DiffParams) -> Matching:
    """High-confidence seed pairs: top scorers that dominate their row and column.

    Falls back to the pair of (lexicographically smallest) initial states
    when no pair qualifies.
    """
    values = scores.values
    ranked = _ranked_pairs(scores)
    n_top = math.ceil(params.landmark_fraction * min(len(scores.left), len(scores.right)))
    selected: list[tuple[int, int]] = []
    used_left: set[int] = set()
    used_right: set[int] = set()
    for i, j in ranked[:n_top]:
        score = values[i][j]
        if score <= 0.0:
            continue
        row_ok = all(
            score >= params.landmark_ratio * values[i][j2]
            for j2 in range(len(scores.right))
            if j2 != j
        )
        col_ok = all(
            score >= params.landmark_ratio * values[i2][j]
            for i2 in range(len(scores.left))
            if i2 != i
        )
        if not (row_ok and col_ok):
            continue
        if i in used_left or j in used_right:
            continue
        selected.append((i, j))
        used_left.add(i)
        used_right.add(j)
    if selected:
        return frozenset((scores.left[i], scores.right[j]) for i, j in selected)
    if a.initial and b.initial:
        return frozenset({(min(a.initial), min(b.initial))})
    return frozenset()


def _check_injective(matching: Matching) -> None:
    lefts = [p for p, _ in matching]
    rights = [q for _, q in matching]
    if len(set(lefts)) != len(lefts) or len(set(rights)) != len(rights):
        raise ValueError("matching must be injective in both coordinates")


def compute_matching(a: Nfa, b: Nfa, scores: ScoreTable, landmarks: Matching) -> Matching:
    """Grow the landmark matching outward along shared events.

    Neighbor pairs of already-matched pairs are preferred; when none remain
    addable, the best unmatched pair with a positive score anywhere in the
    table is taken, and growth resumes from there.
    """
    _check_injective(landmarks)
    left, right = scores.left, scores.right
    lidx = {s: i for i, s in enumerate(left)}
    ridx = {s: j for j, s in enumerate(right)}
    out_a, in_a = _label_maps(a)
    out_b, in_b = _label_maps(b)
    succ_a, pred_a = _edge_maps(a, left)
    succ_b, pred_b = _edge_maps(b, right)
    values = scores.values

    matched: list[tuple[int, int]] = sorted((lidx[p], ridx[q]) for p, q in landmarks)
    used_left = {i for i, _ in matched}
    used_right = {j for _, j in matched}
    pool: set[tuple[int, int]] = set()

    def expand(i: int, j: int) -> None:
        p, q = left[i], right[j]
        for event in out_a[p] & out_b[q]:
            for pi in succ_a[(i, event)]:
                for qi in succ_b[(j, event)]:
                    pool.add((pi, qi))
        for event in in_a[p] & in_b[q]:
            for pi in pred_a[(i, event)]:
                for qi in pred_b[(j, event)]:
                    pool.add((pi, qi))

    for i, j in matched:
        expand(i, j)

    def best(candidates) -> tuple[int, int] | None:
        choice = None
        choice_key = None
        for i, j in candidates:
            if i in used_left or j in used_right:
                continue
            key = (-values[i][j], left[i], right[j])
            if choice_key is None or key < choice_key:
                choice = (i, j)
                choice_key = key
        return choice

    all_pairs = [(i, j) for i in range(len(left)) for j in range(len(right))]
    while True:
        pick = best(pool)
        if pick is None:
            pick = best(all_pairs)
            if pick is None or values[pick[0]][pick[1]] <= 0.0:
                break
        i, j = pick
        matched.append((i, j))
        used_left.add(i)
        used_right.add(j)
        pool.discard((i, j))
        expand(i, j)

    return frozenset((left[i], right[j]) for i, j in matched)


def _membership_change(in_a: bool, in_b: bool) -> Change | None:
    if in_a and in_b:
        return Change.UNCHANGED
    if in_a:
        return Change.REMOVED
    if in_b:
        return Change.ADDED
    return None


def _state_sort_key(state: DiffState):
    return (state.left is None, state.left or "", state.right is None, state.right or "")


def _transition_sort_key(t: DiffTransition):
    def k(pair):
        l, r = pair
        return (l is None, l or "", r is None, r or "")

    return (k(t.source), t.event, k(t.target), t.change.value)


def build_diff(a: Nfa, b: Nfa, matching: Matching) -> DiffMachine:
    """Assemble the annotated diff machine for a given state matching."""
    _check_injective(matching)
    for p, q in matching:
        if p not in a.states or q not in b.states:
            raise ValueError(f"matching pair ({p!r}, {q!r}) references unknown states")
    to_b = dict(matching)
    to_a = {q: p for p, q in matching}

    def a_key(p: str) -> tuple[str | None, str | None]:
        return (p, to_b.get(p))

    def b_key(q: str) -> tuple[str | None, str | None]:
        return (to_a.get(q), q)

    states: list[DiffState] = []
    for p, q in matching:
        states.append(
            DiffState(
                p,
                q,
                Change.UNCHANGED,
                _membership_change(p in a.initial, q in b.initial),
                _membership_change(p in a.accepting, q in b.accepting),
            )
        )
    for p in a.states - to_b.keys():
        states.append(
            DiffState(
                p,
                None,
                Change.REMOVED,
                Change.REMOVED if p in a.initial else None,
                Change.REMOVED if p in a.accepting else None,
            )
        )
    for q in b.states - to_a.keys():
        states.append(
            DiffState(
                None,
                q,
                Change.ADDED,
                Change.ADDED if q in b.initial else None,
                Change.ADDED if q in b.accepting else None,
            )
        )

    transitions: list[DiffTransition] = []
    for p, event, pt in a.transitions:
        shared = (
            p in to_b
            and pt in to_b
            and (to_b[p], event, to_b[pt]) in b.transitions
        )
        change = Change.UNCHANGED if shared else Change.REMOVED
        transitions.append(DiffTransition(a_key(p), event, a_key(pt), change))
    for q, event, qt in b.transitions:
        shared = (
            q in to_a
            and qt in to_a
            and (to_a[q], event, to_a[qt]) in a.transitions
        )
        if not shared:
            transitions.append(DiffTransition(b_key(q), event, b_key(qt), Change.ADDED))

    return DiffMachine(
        tuple(sorted(states, key=_state_sort_key)),
        tuple(sorted(transitions, key=_transition_sort_key)),
    )


def diff(a: Nfa, b: Nfa, params: DiffParams | None = None) -> DiffMachine:
    """Full structural comparison pipeline: score, match, build."""
    params = params or DiffParams()
    scores = global_scores(a, b, params)
    landmarks = select_landmarks(scores, a, b, params)
    matching = compute_matching(a, b, scores, landmarks)
    return build_diff(a, b, matching)


def diff_stats(machine: DiffMachine) -> DiffStats:
    """Counts of annotated elements (unchanged ones are not counted)."""
    return DiffStats(
        added_transitions=sum(t.change is Change.ADDED for t in machine.transitions),
        removed_transitions=sum(t.change is Change.REMOVED for t in machine.transitions),
        added_states=sum(s.change is Change.ADDED for s in machine.states),
        removed_states=sum(s.change is Change.REMOVED for s in machine.states),
    )
