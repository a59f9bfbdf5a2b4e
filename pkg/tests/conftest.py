"""Shared fixtures: the running example, fig-2 pair, and brute-force oracles.

The oracles deliberately re-implement trace enumeration on the raw
transition relation so they stay independent of the library's
determinize/minimize/product code paths.
"""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from fsmcompare import ModelSet, Nfa, Workspace

DATA_DIR = Path(__file__).parent / "data"


class OracleBudgetExceeded(Exception):
    """The brute-force walk grew past its node budget; caller should resample."""


def _adjacency(machine: Nfa):
    succ: dict[tuple[str, str], set[str]] = {}
    for src, event, dst in machine.transitions:
        succ.setdefault((src, event), set()).add(dst)
    return succ


def oracle_language(machine: Nfa, max_len: int, alphabet=None, budget: int = 500_000):
    """All accepted traces up to max_len by explicit prefix-tree search."""
    events = sorted(alphabet if alphabet is not None else machine.alphabet)
    succ = _adjacency(machine)
    accepting = set(machine.accepting)
    result: set[tuple[str, ...]] = set()
    nodes = 0
    stack = [((), set(machine.initial))]
    while stack:
        prefix, current = stack.pop()
        nodes += 1
        if nodes > budget:
            raise OracleBudgetExceeded
        if current & accepting:
            result.add(prefix)
        if len(prefix) == max_len:
            continue
        for event in events:
            nxt: set[str] = set()
            for state in current:
                nxt |= succ.get((state, event), set())
            if nxt:
                stack.append((prefix + (event,), nxt))
    return frozenset(result)


def oracle_compare(a: Nfa, b: Nfa, bound: int, budget: int = 500_000):
    """(a_accepts_something_b_rejects, vice versa) up to the given length.

    Walks the joint prefix tree once, comparing the acceptance bit of both
    machines at every prefix; no determinization or product machinery.
    """
    events = sorted(set(a.alphabet) | set(b.alphabet))
    succ_a = _adjacency(a)
    succ_b = _adjacency(b)
    acc_a = set(a.accepting)
    acc_b = set(b.accepting)
    a_only = b_only = False
    nodes = 0
    stack = [(0, set(a.initial), set(b.initial))]
    while stack:
        depth, sa, sb = stack.pop()
        nodes += 1
        if nodes > budget:
            raise OracleBudgetExceeded
        in_a = bool(sa & acc_a)
        in_b = bool(sb & acc_b)
        a_only = a_only or (in_a and not in_b)
        b_only = b_only or (in_b and not in_a)
        if a_only and b_only:
            break
        if depth == bound:
            continue
        for event in events:
            na: set[str] = set()
            for state in sa:
                na |= succ_a.get((state, event), set())
            nb: set[str] = set()
            for state in sb:
                nb |= succ_b.get((state, event), set())
            if na or nb:
                stack.append((depth + 1, na, nb))
    return a_only, b_only


def oracle_accepts_with_insertions(machine: Nfa, fillers, trace) -> bool:
    """Does the machine accept the trace with arbitrary filler events inserted?

    Direct reachability over (state, position) pairs; used as the projection
    oracle for event hiding.
    """
    fillers = set(fillers)
    succ = _adjacency(machine)
    seen = {(s, 0) for s in machine.initial}
    stack = list(seen)
    while stack:
        state, pos = stack.pop()
        if pos == len(trace) and state in machine.accepting:
            return True
        moves = []
        for event in fillers & set(machine.alphabet):
            for nxt in succ.get((state, event), ()):
                moves.append((nxt, pos))
        if pos < len(trace):
            for nxt in succ.get((state, trace[pos]), ()):
                moves.append((nxt, pos + 1))
        for move in moves:
            if move not in seen:
                seen.add(move)
                stack.append(move)
    return False


def random_nfa(
    rng: random.Random,
    max_states: int = 8,
    max_events: int = 4,
    density: float = 1.3,
) -> Nfa:
    """A sparse random machine; sparsity keeps the oracles tractable."""
    n = rng.randint(1, max_states)
    k = rng.randint(1, max_events)
    states = [f"s{i}" for i in range(n)]
    events = ["a", "b", "c", "d"][:k]
    count = min(rng.randint(0, max(1, int(density * n))), n * k * n)
    transitions = set()
    for _ in range(count):
        transitions.add((rng.choice(states), rng.choice(events), rng.choice(states)))
    initial = {s for s in states if rng.random() < 0.4} or {rng.choice(states)}
    accepting = {s for s in states if rng.random() < 0.4}
    return Nfa.build(
        transitions=transitions,
        initial=initial,
        accepting=accepting,
        states=states,
        alphabet=events,
    )


def _cycle(*steps):
    return Nfa.build(transitions=list(steps), initial=["s1"], accepting=["s1"])


def running_example_machines() -> dict[str, dict[str, Nfa]]:
    e1 = _cycle(("s1", "a", "s2"), ("s2", "b", "s3"), ("s3", "c", "s4"), ("s4", "d", "s1"))
    e2_a = _cycle(("s1", "b", "s2"), ("s2", "d", "s4"), ("s4", "c", "s1"))
    e2_b = _cycle(("s1", "b", "s2"), ("s2", "c", "s4"), ("s4", "d", "s1"))
    e2_c = _cycle(
        ("s1", "b", "s2"),
        ("s2", "e", "s3"),
        ("s2", "c", "s4"),
        ("s3", "c", "s4"),
        ("s4", "d", "s1"),
    )
    e3_a = _cycle(("s1", "b", "s2"), ("s2", "f", "s1"))
    e3_b = _cycle(("s1", "b", "s2"), ("s2", "f", "s1"), ("s2", "a", "s2"))
    e4_a = _cycle(("s1", "e", "s2"), ("s2", "f", "s1"))
    e4_b = Nfa.build(
        transitions=[
            ("s1", "e", "s2"),
            ("s1", "e", "s4"),
            ("s2", "f", "s3"),
            ("s3", "e", "s4"),
            ("s4", "f", "s3"),
        ],
        initial=["s1"],
        accepting=["s1", "s3"],
    )
    return {
        "S1": {"E1": e1, "E2": e2_a, "E3": e3_a, "E4": e4_a},
        "S2": {"E1": e1, "E2": e2_a, "E3": e3_a, "E4": e4_b},
        "S3": {"E1": e1, "E2": e2_b, "E3": e3_b, "E4": e4_a},
        "S4": {"E1": e1, "E2": e2_c, "E3": e3_b, "E4": Nfa.empty()},
    }


def fig2_machines() -> tuple[Nfa, Nfa]:
    source = _cycle(("s1", "a", "s2"), ("s2", "b", "s3"), ("s3", "c", "s4"), ("s4", "d", "s1"))
    target = _cycle(("s1", "a", "s2"), ("s2", "b", "s3"), ("s3", "e", "s1"))
    return source, target


@pytest.fixture(scope="session")
def running_example() -> Workspace:
    machines = running_example_machines()
    return Workspace(
        ("E1", "E2", "E3", "E4"),
        tuple(ModelSet(name, models) for name, models in machines.items()),
    )


@pytest.fixture(scope="session")
def running_example_dir() -> Path:
    return DATA_DIR / "running_example"


@pytest.fixture(scope="session")
def fig2_pair() -> tuple[Nfa, Nfa]:
    return fig2_machines()


@pytest.fixture(scope="session")
def fig2_dir() -> Path:
    return DATA_DIR / "fig2"
