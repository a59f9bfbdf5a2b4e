"""File formats and workspace loading.

The ``.nfa`` text format is line based UTF-8. ``#`` starts a comment that
runs to the end of the line; blank lines are ignored. The first significant
line must be ``nfa v1``. After that, in any order:

    alphabet <event> ...            declare events beyond those on transitions
    state <name> [initial] [accepting]
    trans <src> <event> <dst>

Canonical output separates tokens with single spaces, sorts states and
transitions, and only emits an ``alphabet`` line when the alphabet holds
events no transition uses.

A workspace directory holds one subdirectory per model set, each containing
``<entity>.nfa`` files; the entity set is the union of the file names and
missing files are completed with the empty machine.

Execution logs hold one trace per line, events separated by whitespace; an
empty line is the empty trace.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .automata import Nfa, Trace, hide_events
from .model_sets import ModelSet, Workspace

_HEADER = ("nfa", "v1")


class NfaParseError(ValueError):
    """A syntax or consistency error in a .nfa file."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = f"{path or '<input>'}" + (f":{line}" if line is not None else "")
        super().__init__(f"{where}: {message}")


class WorkspaceLoadError(ValueError):
    """One or more files of a workspace failed to load."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(errors))


@dataclass(frozen=True)
class HidingConfig:
    """Event-name glob patterns to hide at load time; only ``*`` is special."""

    patterns: tuple[str, ...] = ()

    def matcher(self) -> re.Pattern | None:
        if not self.patterns:
            return None
        alternatives = [
            "".join(".*" if ch == "*" else re.escape(ch) for ch in pattern)
            for pattern in self.patterns
        ]
        return re.compile("|".join(f"(?:{alt})" for alt in alternatives))

    def hidden_events(self, alphabet) -> frozenset[str]:
        rx = self.matcher()
        if rx is None:
            return frozenset()
        return frozenset(e for e in alphabet if rx.fullmatch(e))

    def apply(self, machine: Nfa) -> Nfa:
        hidden = self.hidden_events(machine.alphabet)
        return hide_events(machine, hidden) if hidden else machine


def _significant_lines(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line.split()


def parse_nfa(text: str, path: str | None = None) -> Nfa:
    """Parse the .nfa text format; errors carry the offending line number."""
    lines = list(_significant_lines(text))
    if not lines:
        raise NfaParseError("missing 'nfa v1' header", path=path)
    number, tokens = lines[0]
    if tuple(tokens) != _HEADER:
        raise NfaParseError(f"expected 'nfa v1' header, got {' '.join(tokens)!r}", number, path)

    states: dict[str, tuple[bool, bool]] = {}
    alphabet: set[str] = set()
    transitions: list[tuple[str, str, str, int]] = []
    for number, tokens in lines[1:]:
        kind, args = tokens[0], tokens[1:]
        if kind == "state":
            if not args:
                raise NfaParseError("state line needs a name", number, path)
            name, flags = args[0], args[1:]
            if name in states:
                raise NfaParseError(f"duplicate declaration of state {name!r}", number, path)
            initial = accepting = False
            for flag in flags:
                if flag == "initial" and not initial:
                    initial = True
                elif flag == "accepting" and not accepting:
                    accepting = True
                else:
                    raise NfaParseError(f"unexpected state flag {flag!r}", number, path)
            states[name] = (initial, accepting)
        elif kind == "trans":
            if len(args) != 3:
                raise NfaParseError("trans line needs source, event and target", number, path)
            src, event, dst = args
            alphabet.add(event)
            transitions.append((src, event, dst, number))
        elif kind == "alphabet":
            alphabet.update(args)
        else:
            raise NfaParseError(f"unknown directive {kind!r}", number, path)

    for src, _, dst, number in transitions:
        for name in (src, dst):
            if name not in states:
                raise NfaParseError(f"undeclared state {name!r} in transition", number, path)

    try:
        return Nfa(
            frozenset(states),
            frozenset(alphabet),
            frozenset((s, e, t) for s, e, t, _ in transitions),
            frozenset(name for name, (initial, _) in states.items() if initial),
            frozenset(name for name, (_, accepting) in states.items() if accepting),
        )
    except ValueError as exc:
        raise NfaParseError(str(exc), path=path) from exc


def write_nfa(machine: Nfa) -> str:
    """Canonical serialization; parsing it back reproduces the machine."""
    lines = ["nfa v1"]
    used = {e for _, e, _ in machine.transitions}
    extra = sorted(machine.alphabet - used)
    if extra:
        lines.append("alphabet " + " ".join(extra))
    for state in sorted(machine.states):
        flags = ""
        if state in machine.initial:
            flags += " initial"
        if state in machine.accepting:
            flags += " accepting"
        lines.append(f"state {state}{flags}")
    for src, event, dst in sorted(machine.transitions):
        lines.append(f"trans {src} {event} {dst}")
    return "\n".join(lines) + "\n"


def parse_log(text: str) -> list[Trace]:
    """One trace per line; an empty line is the empty trace."""
    return [tuple(line.split()) for line in text.splitlines()]


def build_pta(traces: list[Trace]) -> Nfa:
    """Prefix-tree acceptor accepting exactly the given trace set.

    State numbering follows a breadth-first walk of the tree with events in
    lexicographic order, so the result does not depend on input order.
    """
    if not traces:
        return Nfa.empty()
    children: dict[tuple[Trace, str], Trace] = {}
    nodes: set[Trace] = {()}
    accepting_prefixes: set[Trace] = set()
    for trace in traces:
        prefix: Trace = ()
        for event in trace:
            nxt = prefix + (event,)
            children[(prefix, event)] = nxt
            nodes.add(nxt)
            prefix = nxt
        accepting_prefixes.add(prefix)

    names: dict[Trace, str] = {(): "s0"}
    order: list[Trace] = [()]
    qi = 0
    while qi < len(order):
        node = order[qi]
        qi += 1
        for event in sorted(e for (p, e) in children if p == node):
            child = children[(node, event)]
            if child not in names:
                names[child] = f"s{len(order)}"
                order.append(child)
    transitions = frozenset(
        (names[parent], event, names[child]) for (parent, event), child in children.items()
    )
    return Nfa(
        frozenset(names.values()),
        frozenset(e for (_, e) in children),
        transitions,
        frozenset({"s0"}),
        frozenset(names[p] for p in accepting_prefixes),
    )


def load_workspace(root: Path | str, hiding: HidingConfig | None = None) -> Workspace:
    """Load ``<root>/<model-set>/<entity>.nfa`` into a complete workspace.

    Missing entity files become empty machines; hiding is applied to every
    machine before any comparison. Parse errors are aggregated per file.
    """
    hiding = hiding or HidingConfig()
    root = Path(root)
    if not root.is_dir():
        raise WorkspaceLoadError([f"input directory {root} does not exist"])
    set_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not set_dirs:
        raise WorkspaceLoadError([f"no model sets found under {root}"])

    entities = sorted({p.stem for d in set_dirs for p in d.glob("*.nfa")})
    errors: list[str] = []
    model_sets: list[ModelSet] = []
    for directory in set_dirs:
        models: dict[str, Nfa] = {}
        for entity in entities:
            path = directory / f"{entity}.nfa"
            if not path.is_file():
                models[entity] = Nfa.empty()
                continue
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as exc:
                errors.append(f"{path}: {exc}")
                continue
            try:
                models[entity] = hiding.apply(parse_nfa(text, path=str(path)))
            except NfaParseError as exc:
                errors.append(str(exc))
        model_sets.append(ModelSet(directory.name, models))
    if errors:
        raise WorkspaceLoadError(errors)
    return Workspace(tuple(entities), tuple(model_sets))
