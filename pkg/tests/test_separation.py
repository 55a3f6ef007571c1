from itertools import combinations

import pytest

from conftest import LOW_SET, PAR_A
from seplat.errors import AdjacentVertices, InvalidPath, NotCollateral
from seplat.graph import Path, build_graph, format_path
from seplat.lattice import BOX, Window
from seplat.lattice import build_graph as build_lattice_graph
from seplat.random_graphs import random_mixed_graph
from seplat.separation import (
    INCLUSIVE,
    STRICT,
    SeparationQuery,
    is_graph_shielder_off_set,
    is_separated,
    is_separated_oracle,
    iter_subsets,
    minimal_separator,
    path_is_connecting,
    verify_separation_theorem,
)

A, B = "d(1,4)", "d(4,1)"


def test_query_invariants():
    with pytest.raises(ValueError):
        SeparationQuery("a", "a")
    with pytest.raises(ValueError):
        SeparationQuery("a", "b", frozenset({"a"}))


def test_path_is_connecting_collider(collider_graph):
    p = Path(("a", "c", "b"), ("dir-forward", "dir-backward"))
    # conditioning on the common effect connects its causes
    assert path_is_connecting(collider_graph, p, {"c"}, INCLUSIVE)
    assert not path_is_connecting(collider_graph, p, set())
    # the strict reading keeps the collider closed unless an ancestor of C
    assert not path_is_connecting(collider_graph, p, {"c"}, STRICT)


def test_path_is_connecting_chain_blocks():
    chain = build_graph({"a", "b", "c"}, [("a", "c"), ("c", "b")])
    p = Path(("a", "c", "b"), ("dir-forward", "dir-forward"))
    assert not path_is_connecting(chain, p, {"c"})
    assert path_is_connecting(chain, p, set())


def test_path_is_connecting_validates():
    g = build_graph({"a", "b", "c"}, [("a", "c"), ("b", "c")])
    with pytest.raises(InvalidPath):
        path_is_connecting(g, Path(("a", "b"), ("dir-forward",)), set())
    with pytest.raises(InvalidPath):
        p = Path(("a", "c", "b"), ("dir-forward", "dir-backward"))
        path_is_connecting(g, p, {"a"})


def test_descendant_of_collider_opens():
    g = build_graph({"a", "b", "c", "d"}, [("a", "c"), ("b", "c"), ("c", "d")])
    p = Path(("a", "c", "b"), ("dir-forward", "dir-backward"))
    assert path_is_connecting(g, p, {"d"}, INCLUSIVE)
    assert path_is_connecting(g, p, {"d"}, STRICT)


def test_common_cause_oracle(common_cause_graph):
    q_blocked = SeparationQuery("a", "b", frozenset({"e"}))
    q_open = SeparationQuery("a", "b")
    assert is_separated_oracle(common_cause_graph, q_blocked).separated
    verdict = is_separated_oracle(common_cause_graph, q_open)
    assert not verdict.separated
    assert verdict.witness.vertices == ("a", "e", "b")


def test_parents_separate_on_fixture(diamond6):
    q = SeparationQuery(A, B, PAR_A)
    assert is_separated_oracle(diamond6, q).separated
    assert is_separated(diamond6, q).separated


def test_adjacent_spouses_always_connected():
    g = build_lattice_graph(BOX, Window(0, 3, 0, 3))
    for cond in (frozenset(), frozenset({"b(2,0)"}), frozenset({"b(2,0)", "b(2,2)"})):
        q = SeparationQuery("b(3,0)", "b(3,1)", cond)
        assert not is_separated(g, q).separated


def test_chain_of_two_connected():
    g = build_graph({"a", "m", "b"}, [("a", "m"), ("m", "b")])
    verdict = is_separated(g, SeparationQuery("a", "b"))
    assert not verdict.separated
    assert verdict.witness.vertices == ("a", "m", "b")


def test_fast_equals_oracle_on_seeded_graph():
    g = random_mixed_graph(8, 0.3, seed=7)
    labels = g.vertices
    for a, b in combinations(labels, 2):
        rest = [v for v in labels if v not in (a, b)]
        for k in range(4):
            for cond in combinations(rest, k):
                for conv in (INCLUSIVE, STRICT):
                    q = SeparationQuery(a, b, frozenset(cond), conv)
                    assert (is_separated(g, q).separated
                            == is_separated_oracle(g, q).separated)


def test_separation_symmetry(diamond6):
    for cond in (frozenset(), PAR_A, LOW_SET):
        fwd = is_separated(diamond6, SeparationQuery(A, B, cond)).separated
        rev = is_separated(diamond6, SeparationQuery(B, A, cond)).separated
        assert fwd == rev


def test_witness_is_connecting(diamond6):
    q = SeparationQuery(A, B, LOW_SET)
    verdict = is_separated(diamond6, q)
    assert not verdict.separated
    assert path_is_connecting(diamond6, verdict.witness, LOW_SET)
    assert format_path(verdict.witness) == (
        "d(1,4)<-d(1,3)<-d(1,2)<-d(1,1)->d(2,1)->d(3,1)->d(4,1)")


def test_minimal_separator_common_cause(common_cause_graph):
    assert minimal_separator(common_cause_graph, "a", "b") == {"e"}


def test_minimal_separator_rejects_adjacent():
    g = build_graph({"a", "b", "c"}, [], [("a", "b")])
    with pytest.raises(AdjacentVertices):
        minimal_separator(g, "a", "b")


def test_minimal_separator_fixture(diamond6):
    # Greedy shrink in label order lands on a 2-cell separator here; the
    # single-removal sweep certifies inclusion-minimality.
    sep = minimal_separator(diamond6, A, B)
    assert sep == {"d(3,0)", "d(3,1)"}
    assert is_separated(diamond6, SeparationQuery(A, B, sep)).separated
    for v in sep:
        assert not is_separated(diamond6, SeparationQuery(A, B, sep - {v})).separated


def test_parents_separate_but_not_minimal_here(diamond6):
    # Par(A) separates, yet at this window size d(0,4) is a blind alley
    # (its other neighbors leave the window), so Par(A) is not
    # inclusion-minimal: only the other two removals reconnect.
    assert is_separated(diamond6, SeparationQuery(A, B, PAR_A)).separated
    for v in ("d(0,3)", "d(1,3)"):
        assert not is_separated(diamond6, SeparationQuery(A, B, PAR_A - {v})).separated
    assert is_separated(diamond6, SeparationQuery(A, B, PAR_A - {"d(0,4)"})).separated


def test_graph_shielder_off_flags(diamond6):
    assert is_graph_shielder_off_set(diamond6, A, B, PAR_A)
    # the low set leaves the directed path d(1,1)->d(1,2)->d(1,3)->d(1,4) open
    assert not is_graph_shielder_off_set(diamond6, A, B, LOW_SET)
    # parents of B are not ancestors of A
    assert not is_graph_shielder_off_set(diamond6, A, B,
                                         {"d(3,0)", "d(3,1)", "d(4,0)"})
    with pytest.raises(NotCollateral):
        is_graph_shielder_off_set(diamond6, "d(0,0)", "d(1,1)", frozenset())


def test_verify_theorem_single_candidates(diamond6):
    rep = verify_separation_theorem(diamond6, A, B, [PAR_A])
    assert rep.rows[0].shielder_off and rep.rows[0].separated
    rep = verify_separation_theorem(diamond6, A, B, [frozenset()])
    assert not rep.rows[0].shielder_off and not rep.rows[0].separated


def test_verify_theorem_full_sweep(diamond6):
    # The S1/S2 structural test is necessary but not sufficient for
    # separation: dips at conditioned-ancestor colliders connect 52 of the
    # 352 qualifying sets.  Geometric shielder-off regions avoid all of
    # them (see the lattice sweeps).
    pool = sorted(f"d({i},{j})" for i in range(2) for j in range(5)
                  if (i, j) != (1, 4))
    rep = verify_separation_theorem(diamond6, A, B, iter_subsets(pool))
    assert rep.total == 512
    assert rep.shielder_off_count == 352
    assert len(rep.counterexamples) == 52
    for row in rep.counterexamples:
        assert row.witness is not None
        assert path_is_connecting(diamond6, row.witness, frozenset(row.candidate))
