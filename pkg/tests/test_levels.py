"""Six-level pipeline tests: golden values from the running example plus
cross-level consistency on random workspaces."""

import random

import pytest

from fsmcompare import (
    Change,
    DiffParams,
    LatticeCapExceeded,
    ModelSet,
    Workspace,
    diff_stats,
    language_equivalent,
    language_included,
    level1,
    level2,
    level3,
    level4,
    level5,
    level6,
    variant_letters,
)

from conftest import random_nfa


def random_workspace(rng, n_sets=4, n_entities=4, max_states=5):
    entities = tuple(f"e{i}" for i in range(rng.randint(1, n_entities)))
    sets = []
    for i in range(rng.randint(1, n_sets)):
        models = {e: random_nfa(rng, max_states=max_states, max_events=2) for e in entities}
        sets.append(ModelSet(f"m{i}", models))
    return Workspace(entities, tuple(sets))


class TestVariantLetters:
    def test_sequence(self):
        assert [variant_letters(i) for i in (0, 1, 25, 26, 27, 51, 52)] == [
            "A",
            "B",
            "Z",
            "AA",
            "AB",
            "AZ",
            "BA",
        ]


class TestLevel1:
    def test_running_example_letters(self, running_example):
        partition = level1(running_example)
        labels = {m: c.variant for c in partition.classes for m in c.members}
        assert labels == {"S1": "A", "S2": "A", "S3": "B", "S4": "C"}

    def test_single_model_set(self, running_example):
        ws = Workspace(running_example.entities, running_example.model_sets[:1])
        partition = level1(ws)
        assert [c.variant for c in partition.classes] == ["A"]

    def test_disjoint_behaviors_get_distinct_letters(self):
        from fsmcompare import Nfa

        a = Nfa.build(transitions=[("s", "x", "s")], initial=["s"], accepting=["s"])
        b = Nfa.build(transitions=[("s", "y", "s")], initial=["s"], accepting=["s"])
        ws = Workspace(("e",), (ModelSet("m0", {"e": a}), ModelSet("m1", {"e": b})))
        partition = level1(ws)
        assert [c.variant for c in partition.classes] == ["A", "B"]

    def test_representative_is_first_member(self, running_example):
        partition = level1(running_example)
        assert partition.classes[0].representative.name == "S1"


class TestLevel2:
    def test_running_example_node_count(self, running_example):
        lattice = level2(level1(running_example))
        kinds = [n.kind for n in lattice.nodes]
        assert len(lattice.nodes) == 9
        assert kinds.count("observed") == 3
        assert kinds.count("computed") == 6

    def test_running_example_behavior_counts(self, running_example):
        lattice = level2(level1(running_example))
        sizes = {n.variant: n.size for n in lattice.nodes}
        assert sizes == {
            "A": 4, "B": 4, "C": 3, "D": 4, "E": 4, "F": 3, "G": 4, "H": 3, "I": 4,
        }

    def test_running_example_cover_relation(self, running_example):
        lattice = level2(level1(running_example))
        edges = {(e.lower, e.upper): (e.changed, e.newly_present) for e in lattice.edges}
        assert edges == {
            ("A", "E"): (2, 0),
            ("B", "E"): (1, 0),
            ("B", "I"): (1, 0),
            ("C", "I"): (0, 1),
            ("D", "A"): (1, 0),
            ("D", "B"): (2, 0),
            ("E", "G"): (1, 0),
            ("F", "D"): (0, 1),
            ("F", "H"): (2, 0),
            ("H", "B"): (0, 1),
            ("H", "C"): (1, 0),
            ("I", "G"): (1, 0),
        }

    def test_single_variant_gives_one_node_no_edges(self, running_example):
        ws = Workspace(running_example.entities, running_example.model_sets[:1])
        lattice = level2(level1(ws))
        assert len(lattice.nodes) == 1
        assert lattice.edges == ()

    def test_node_cap(self, running_example):
        with pytest.raises(LatticeCapExceeded):
            level2(level1(running_example), node_cap=4)


class TestLevel3:
    def test_running_example_matrix(self, running_example):
        matrix = level3(running_example)
        assert matrix.names == ("S1", "S2", "S3", "S4")
        assert matrix.cells == ((0, 2, 3), (2, 3), (2,), ())

    def test_identical_sets_are_all_zero(self, running_example):
        ws = Workspace(running_example.entities, running_example.model_sets[:2])
        assert level3(ws).cells == ((0,), ())

    def test_heat_classes(self, running_example):
        matrix = level3(running_example)
        assert matrix.heat == ((0, 3, 4), (3, 4), (3,), ())

    def test_value_accessor_symmetry(self, running_example):
        matrix = level3(running_example)
        assert matrix.value(0, 3) == matrix.value(3, 0) == 3


class TestLevel4:
    def test_running_example_table(self, running_example):
        partitions = level4(running_example)
        table = {
            e: [partitions[e].label_of(s) for s in ("S1", "S2", "S3", "S4")]
            for e in running_example.entities
        }
        assert table == {
            "E1": ["A", "A", "A", "A"],
            "E2": ["A", "A", "B", "C"],
            "E3": ["A", "A", "B", "B"],
            "E4": ["A", "A", "A", "absent"],
        }

    def test_entity_empty_everywhere(self):
        from fsmcompare import Nfa

        ws = Workspace(
            ("e",),
            (ModelSet("m0", {"e": Nfa.empty()}), ModelSet("m1", {"e": Nfa.empty()})),
        )
        partition = level4(ws)["e"]
        assert partition.classes == ()
        assert partition.absent == ("m0", "m1")


class TestLevel5:
    def test_running_example_e2_shape(self, running_example):
        lattice = level5(running_example, "E2")
        assert [(n.variant, n.kind) for n in lattice.nodes] == [
            ("A", "observed"),
            ("B", "observed"),
            ("C", "observed"),
            ("D", "computed"),
            ("E", "computed"),
            ("F", "computed"),
        ]
        edges = {(e.lower, e.upper) for e in lattice.edges}
        assert edges == {
            ("D", "A"), ("D", "B"), ("A", "E"), ("B", "E"), ("B", "C"), ("E", "F"), ("C", "F"),
        }

    def test_running_example_e2_b_covered_by_c(self, running_example):
        lattice = level5(running_example, "E2")
        edge = next(e for e in lattice.edges if (e.lower, e.upper) == ("B", "C"))
        assert (edge.added_transitions, edge.removed_transitions) == (2, 0)

    def test_observed_transition_counts_use_original_machines(self, running_example):
        lattice = level5(running_example, "E2")
        sizes = {n.variant: n.size for n in lattice.nodes if n.kind == "observed"}
        assert sizes == {"A": 3, "B": 3, "C": 5}

    def test_empty_language_intersection_node_kept_with_zero_count(self, running_example):
        lattice = level5(running_example, "E2")
        assert lattice.node("D").size == 0

    def test_single_variant_entity(self, running_example):
        lattice = level5(running_example, "E1")
        assert len(lattice.nodes) == 1
        assert lattice.edges == ()

    def test_two_comparable_variants_form_chain(self, running_example):
        # E3 has exactly two variants and A's loop-free cycle is included
        # in B's, so the lattice is already complete as a chain.
        lattice = level5(running_example, "E3")
        assert [(n.variant, n.kind) for n in lattice.nodes] == [
            ("A", "observed"),
            ("B", "observed"),
        ]
        assert [(e.lower, e.upper) for e in lattice.edges] == [("A", "B")]

    def test_single_observed_variant_with_absent_members(self, running_example):
        lattice = level5(running_example, "E4")
        assert len(lattice.nodes) == 1  # only one variant with behavior

    def test_nodes_closed_under_union_and_intersection(self, running_example):
        from fsmcompare import intersection, union

        lattice = level5(running_example, "E2")
        payloads = list(lattice.payloads.values())
        for a in payloads:
            for b in payloads:
                for combined in (union(a, b), intersection(a, b)):
                    assert any(language_equivalent(combined, node) for node in payloads)

    def test_unknown_entity(self, running_example):
        with pytest.raises(KeyError):
            level5(running_example, "E9")

    def test_cover_edges_sound_against_inclusion(self, running_example):
        lattice = level5(running_example, "E2")
        payloads = lattice.payloads
        labels = [n.variant for n in lattice.nodes]
        for edge in lattice.edges:
            assert language_included(payloads[edge.lower], payloads[edge.upper])
            assert not language_equivalent(payloads[edge.lower], payloads[edge.upper])
            for mid in labels:
                if mid in (edge.lower, edge.upper):
                    continue
                between = (
                    language_included(payloads[edge.lower], payloads[mid])
                    and not language_equivalent(payloads[edge.lower], payloads[mid])
                    and language_included(payloads[mid], payloads[edge.upper])
                    and not language_equivalent(payloads[mid], payloads[edge.upper])
                )
                assert not between


class TestLevel6:
    def test_running_example_b_to_c(self, running_example):
        machine = level6(running_example, "E2", "B", "C")
        assert diff_stats(machine) == (2, 0, 1, 0)

    def test_self_diff(self, running_example):
        machine = level6(running_example, "E2", "B", "B")
        assert diff_stats(machine) == (0, 0, 0, 0)

    def test_computed_variants_are_addressable(self, running_example):
        machine = level6(running_example, "E2", "D", "A")
        counts = diff_stats(machine)
        assert counts.removed_transitions == 0
        assert counts.added_transitions > 0

    def test_unknown_variant(self, running_example):
        with pytest.raises(KeyError):
            level6(running_example, "E2", "B", "Z")


class TestRandomWorkspaceConsistency:
    def test_cross_level_invariants(self):
        rng = random.Random(43)
        for _ in range(30):
            ws = random_workspace(rng)
            partitions = level4(ws)
            matrix = level3(ws)
            names = [ms.name for ms in ws.model_sets]
            # Level 3 cells equal the number of entities with differing
            # level-4 labels, counting absent as its own label.
            for i in range(len(names)):
                for j in range(i + 1, len(names)):
                    mismatch = sum(
                        1
                        for e in ws.entities
                        if partitions[e].label_of(names[i]) != partitions[e].label_of(names[j])
                    )
                    assert matrix.value(i, j) == mismatch
            # Level 1 classes match equality of level-4 label vectors.
            p1 = level1(ws)
            vectors = {
                name: tuple(partitions[e].label_of(name) for e in ws.entities) for name in names
            }
            for a in names:
                for b in names:
                    same_class = p1.label_of(a) == p1.label_of(b)
                    assert same_class == (vectors[a] == vectors[b])

    def test_lattice_closure_and_cover_soundness(self):
        rng = random.Random(47)
        params = DiffParams()
        for _ in range(12):
            ws = random_workspace(rng, n_sets=3, n_entities=2, max_states=4)
            lattice = level2(level1(ws))
            payloads = lattice.payloads
            from fsmcompare import model_set_equivalent, model_set_included

            for edge in lattice.edges:
                assert model_set_included(payloads[edge.lower], payloads[edge.upper])
                assert not model_set_equivalent(payloads[edge.lower], payloads[edge.upper])
            for entity in ws.entities:
                entity_lattice = level5(ws, entity, params)
                for edge in entity_lattice.edges:
                    assert language_included(
                        entity_lattice.payloads[edge.lower], entity_lattice.payloads[edge.upper]
                    )

    def test_letter_determinism(self):
        rng = random.Random(53)
        ws = random_workspace(rng)
        first = level1(ws)
        second = level1(ws)
        assert first == second
        assert level3(ws) == level3(ws)
