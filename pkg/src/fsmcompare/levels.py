"""The six-level comparison pipeline.

Levels 1-3 compare whole model sets: behavior variants, the variant lattice
completed under union/intersection, and the pairwise difference matrix.
Levels 4-6 do the same per entity, ending in annotated structural diffs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .automata import (
    CanonicalDfa,
    Nfa,
    has_behavior,
    intersection,
    minimize,
    union,
    with_alphabet,
)
from .ltsdiff import DiffMachine, DiffParams, diff, diff_stats
from .model_sets import (
    ModelSet,
    Workspace,
    behavior_count,
    diff_entity_counts,
    model_set_intersection,
    model_set_union,
)

DEFAULT_NODE_CAP = 10_000


class LatticeCapExceeded(RuntimeError):
    """Lattice completion produced more nodes than the configured cap."""


def variant_letters(index: int) -> str:
    """0 -> A, 25 -> Z, 26 -> AA, spreadsheet style."""
    index += 1
    label = ""
    while index:
        index, rem = divmod(index - 1, 26)
        label = chr(ord("A") + rem) + label
    return label


@dataclass(frozen=True)
class VariantClass:
    """One behavioral equivalence class with its observed members."""

    variant: str
    members: tuple[str, ...]
    representative: object  # ModelSet at model-set scope, Nfa at entity scope


@dataclass(frozen=True)
class VariantPartition:
    """Equivalence classes under language equality, in first-occurrence order.

    ``entity`` is None for the model-set scope. ``absent`` lists members whose
    model has no behavior (entity scope only); they receive no letter.
    """

    entity: str | None
    classes: tuple[VariantClass, ...]
    absent: tuple[str, ...] = ()

    def label_of(self, member: str) -> str:
        for cls in self.classes:
            if member in cls.members:
                return cls.variant
        if member in self.absent:
            return "absent"
        raise KeyError(member)


@dataclass(frozen=True)
class LatticeNode:
    variant: str
    kind: str  # "observed" | "computed"
    members: tuple[str, ...]
    size: int  # behavior count (model-set scope) or transition count (entity scope)


@dataclass(frozen=True)
class LatticeEdge:
    """Cover edge lower -> upper of the inclusion order.

    Model-set lattices label edges with entity counts (changed,
    newly_present); entity lattices with structural counts
    (added_transitions, removed_transitions). Unused fields stay None.
    """

    lower: str
    upper: str
    changed: int | None = None
    newly_present: int | None = None
    added_transitions: int | None = None
    removed_transitions: int | None = None


@dataclass
class Lattice:
    """Variant nodes closed under union/intersection, with cover edges."""

    entity: str | None
    nodes: tuple[LatticeNode, ...]
    edges: tuple[LatticeEdge, ...]
    payloads: dict[str, object]  # variant label -> ModelSet or Nfa

    def node(self, variant: str) -> LatticeNode:
        for n in self.nodes:
            if n.variant == variant:
                return n
        raise KeyError(variant)


@dataclass(frozen=True)
class DiffMatrix:
    """Upper-triangular counts of entities with differing behavior."""

    names: tuple[str, ...]
    cells: tuple[tuple[int, ...], ...]  # cells[i][j - i - 1] for j > i
    heat: tuple[tuple[int, ...], ...]

    def value(self, i: int, j: int) -> int:
        if i == j:
            raise ValueError("diagonal cells hold no count")
        if i > j:
            i, j = j, i
        return self.cells[i][j - i - 1]


def heat_class(value: int, max_value: int) -> int:
    """Quantize value/max into the buckets 0..4."""
    if max_value <= 0:
        return 0
    return min(4, (5 * value) // max_value)


def _entity_alphabets(workspace: Workspace) -> dict[str, frozenset[str]]:
    ctx: dict[str, frozenset[str]] = {}
    for entity in workspace.entities:
        sigma: frozenset[str] = frozenset()
        for ms in workspace.model_sets:
            sigma |= ms.models[entity].alphabet
        ctx[entity] = sigma
    return ctx


def _entity_keys(workspace: Workspace) -> dict[str, dict[str, CanonicalDfa]]:
    """Canonical per-entity language keys, aligned on the entity's alphabet."""
    ctx = _entity_alphabets(workspace)
    keys: dict[str, dict[str, CanonicalDfa]] = {}
    for ms in workspace.model_sets:
        keys[ms.name] = {
            e: minimize(with_alphabet(ms.models[e], ctx[e])) for e in workspace.entities
        }
    return keys


def level1(workspace: Workspace) -> VariantPartition:
    """Model set behavior variants, lettered by first occurrence."""
    keys = _entity_keys(workspace)
    classes: list[tuple[tuple, list[str]]] = []
    for ms in workspace.model_sets:
        key = tuple(keys[ms.name][e] for e in workspace.entities)
        for existing, members in classes:
            if existing == key:
                members.append(ms.name)
                break
        else:
            classes.append((key, [ms.name]))
    return VariantPartition(
        entity=None,
        classes=tuple(
            VariantClass(
                variant_letters(i),
                tuple(members),
                workspace.model_set(members[0]),
            )
            for i, (_, members) in enumerate(classes)
        ),
    )


def _close_under_ops(observed, intersect, unite, canonical_key, normalize, node_cap):
    """Close observed payloads under pairwise intersection and union.

    ``observed`` is a list of (label, payload, key). Pairs of node indices
    are processed first-in-first-out, intersection before union, so computed
    labels continue the letter sequence deterministically. Computed payloads
    are normalized (canonical, minimal) before they take part in further
    combinations, keeping the closure cheap.

    Returns (label, kind, payload, key) tuples in creation order.
    """
    nodes = [(label, "observed", payload, key) for label, payload, key in observed]
    seen = {key for _, _, _, key in nodes}
    pairs = [(i, j) for i in range(len(nodes)) for j in range(i + 1, len(nodes))]
    qi = 0
    while qi < len(pairs):
        i, j = pairs[qi]
        qi += 1
        for combine in (intersect, unite):
            combined = combine(nodes[i][2], nodes[j][2])
            key = canonical_key(combined)
            if key in seen:
                continue
            if len(nodes) >= node_cap:
                raise LatticeCapExceeded(
                    f"lattice completion exceeded the node cap of {node_cap}"
                )
            label = variant_letters(len(nodes))
            index = len(nodes)
            nodes.append((label, "computed", normalize(label, key), key))
            seen.add(key)
            pairs.extend((k, index) for k in range(index))
    return nodes


def _cover_edges(included) -> list[tuple[int, int]]:
    """Transitive reduction of a strict inclusion matrix."""
    n = len(included)
    edges = []
    for i in range(n):
        for j in range(n):
            if i == j or not included[i][j]:
                continue
            if any(included[i][k] and included[k][j] for k in range(n) if k not in (i, j)):
                continue
            edges.append((i, j))
    return edges


def _canonical_included(a: CanonicalDfa, b: CanonicalDfa) -> bool:
    """Language inclusion between canonical DFAs over the same alphabet."""
    if a.alphabet != b.alphabet:
        raise ValueError("canonical inclusion needs aligned alphabets")
    # Product walk: a counterexample is a reachable pair accepting in a only.
    seen = {(0, 0)}
    stack = [(0, 0)]
    while stack:
        p, q = stack.pop()
        if p in a.accepting and q not in b.accepting:
            return False
        for k in range(len(a.alphabet)):
            pair = (a.transitions[p][k], b.transitions[q][k])
            if pair not in seen:
                seen.add(pair)
                stack.append(pair)
    return True


def level2(partition: VariantPartition, *, node_cap: int = DEFAULT_NODE_CAP) -> Lattice:
    """Complete the model-set variant order into a lattice.

    Nodes are labeled with the number of entities that have behavior; cover
    edges with (changed, newly_present) entity counts.
    """
    if partition.entity is not None:
        raise ValueError("level2 expects the model-set scope partition of level1")
    reps: list[ModelSet] = [cls.representative for cls in partition.classes]
    entities = reps[0].entities() if reps else ()
    ctx: dict[str, frozenset[str]] = {e: frozenset() for e in entities}
    for rep in reps:
        for e in entities:
            ctx[e] |= rep.models[e].alphabet

    def canonical_key(ms: ModelSet) -> tuple:
        return tuple(minimize(with_alphabet(ms.models[e], ctx[e])) for e in entities)

    def normalize(label: str, key: tuple) -> ModelSet:
        return ModelSet(label, {e: key[i].to_nfa() for i, e in enumerate(entities)})

    observed = [
        (cls.variant, cls.representative, canonical_key(cls.representative))
        for cls in partition.classes
    ]
    raw = _close_under_ops(
        observed, model_set_intersection, model_set_union, canonical_key, normalize, node_cap
    )

    nodes = []
    payloads: dict[str, ModelSet] = {}
    members = {cls.variant: cls.members for cls in partition.classes}
    for label, kind, payload, _ in raw:
        payloads[label] = payload
        nodes.append(LatticeNode(label, kind, members.get(label, ()), behavior_count(payload)))

    keys = [key for _, _, _, key in raw]
    n = len(keys)
    included = [
        [
            i != j
            and all(_canonical_included(keys[i][k], keys[j][k]) for k in range(len(entities)))
            for j in range(n)
        ]
        for i in range(n)
    ]
    edges = []
    for i, j in _cover_edges(included):
        changed, newly = diff_entity_counts(payloads[nodes[i].variant], payloads[nodes[j].variant])
        edges.append(
            LatticeEdge(nodes[i].variant, nodes[j].variant, changed=changed, newly_present=newly)
        )
    return Lattice(None, tuple(nodes), tuple(edges), payloads)


def level3(workspace: Workspace) -> DiffMatrix:
    """Counts of entities with different behavior, for every model-set pair."""
    keys = _entity_keys(workspace)
    names = tuple(ms.name for ms in workspace.model_sets)
    cells = []
    for i, si in enumerate(names):
        row = []
        for sj in names[i + 1 :]:
            row.append(sum(1 for e in workspace.entities if keys[si][e] != keys[sj][e]))
        cells.append(tuple(row))
    max_value = max((v for row in cells for v in row), default=0)
    heat = tuple(tuple(heat_class(v, max_value) for v in row) for row in cells)
    return DiffMatrix(names, tuple(cells), heat)


def level4(workspace: Workspace) -> dict[str, VariantPartition]:
    """Per-entity model variants; models without behavior are marked absent."""
    ctx = _entity_alphabets(workspace)
    result: dict[str, VariantPartition] = {}
    for entity in workspace.entities:
        classes: list[tuple[CanonicalDfa, list[str]]] = []
        absent: list[str] = []
        for ms in workspace.model_sets:
            machine = ms.models[entity]
            if not has_behavior(machine):
                absent.append(ms.name)
                continue
            key = minimize(with_alphabet(machine, ctx[entity]))
            for existing, group in classes:
                if existing == key:
                    group.append(ms.name)
                    break
            else:
                classes.append((key, [ms.name]))
        result[entity] = VariantPartition(
            entity=entity,
            classes=tuple(
                VariantClass(
                    variant_letters(i),
                    tuple(group),
                    workspace.model_set(group[0]).models[entity],
                )
                for i, (_, group) in enumerate(classes)
            ),
            absent=tuple(absent),
        )
    return result


def level5(
    workspace: Workspace,
    entity: str,
    params: DiffParams | None = None,
    *,
    node_cap: int = DEFAULT_NODE_CAP,
) -> Lattice:
    """Entity model variant lattice with structural edge labels.

    Nodes are labeled with the transition count of their representative;
    edges with the added/removed transition counts of the structural diff
    between the lower and upper representatives.
    """
    params = params or DiffParams()
    if entity not in workspace.entities:
        raise KeyError(entity)
    partition = level4(workspace)[entity]
    ctx = _entity_alphabets(workspace)[entity]

    def canonical_key(machine: Nfa) -> tuple:
        return (minimize(with_alphabet(machine, ctx)),)

    def normalize(label: str, key: tuple) -> Nfa:
        return key[0].to_nfa()

    observed = [
        (cls.variant, cls.representative, canonical_key(cls.representative))
        for cls in partition.classes
    ]
    raw = _close_under_ops(observed, intersection, union, canonical_key, normalize, node_cap)

    nodes = []
    payloads: dict[str, Nfa] = {}
    members = {cls.variant: cls.members for cls in partition.classes}
    for label, kind, payload, _ in raw:
        payloads[label] = payload
        nodes.append(LatticeNode(label, kind, members.get(label, ()), len(payload.transitions)))

    keys = [key[0] for _, _, _, key in raw]
    n = len(keys)
    included = [
        [i != j and _canonical_included(keys[i], keys[j]) for j in range(n)] for i in range(n)
    ]
    edges = []
    for i, j in _cover_edges(included):
        stats = diff_stats(diff(payloads[nodes[i].variant], payloads[nodes[j].variant], params))
        edges.append(
            LatticeEdge(
                nodes[i].variant,
                nodes[j].variant,
                added_transitions=stats.added_transitions,
                removed_transitions=stats.removed_transitions,
            )
        )
    return Lattice(entity, tuple(nodes), tuple(edges), payloads)


def level6(
    workspace: Workspace,
    entity: str,
    from_variant: str,
    to_variant: str,
    params: DiffParams | None = None,
    *,
    node_cap: int = DEFAULT_NODE_CAP,
) -> DiffMachine:
    """Structural diff between two level-5 variants of one entity."""
    params = params or DiffParams()
    lattice = level5(workspace, entity, params, node_cap=node_cap)
    try:
        source = lattice.payloads[from_variant]
        target = lattice.payloads[to_variant]
    except KeyError as exc:
        raise KeyError(f"variant {exc.args[0]!r} does not exist at entity {entity!r}") from exc
    return diff(source, target, params)
