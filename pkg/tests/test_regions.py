import numpy as np
import pytest

from rsmimo.bounds import GainTable, LayeredGainTable, layered_bound_value
from rsmimo.regions import (
    assemble_network_polytope,
    build_mac_polytope,
    build_modified_mac_polytope,
    dump_constraints,
    enumerate_rs_sets,
    enumerate_rs_sub_sets,
    enumerate_snd_sets,
    layers_of_mask,
    mask_of_layers,
    pair_mask,
)


def layers(*names):
    """Layer set from compact names like '1a' (1-based cells)."""
    return frozenset((int(n[:-1]) - 1, n[-1]) for n in names)


def decode_mask(*names):
    return mask_of_layers(layers(*names))


def test_snd_set_counts():
    assert len(enumerate_snd_sets(0, 2)) == 2
    assert len(enumerate_snd_sets(1, 3)) == 4
    assert len(enumerate_snd_sets(3, 7)) == 64
    for s in enumerate_snd_sets(1, 3):
        assert 1 in s


def test_snd_sets_two_cells():
    assert set(enumerate_snd_sets(0, 2)) == {frozenset({0}), frozenset({0, 1})}


def test_mac_polytope_constraint_counts():
    p1 = build_mac_polytope(0, {0}, 3)
    assert len(p1.subset_masks) == 1
    p3 = build_mac_polytope(0, {0, 1, 2}, 3)
    assert len(p3.subset_masks) == 7
    with pytest.raises(ValueError):
        build_mac_polytope(0, {1}, 3)


def test_mac_polytope_rows_and_rhs():
    table = GainTable(np.array([[4.0, 2.0], [1.0, 6.0]]), np.ones(2), 1.0, np.ones(2))
    poly = build_mac_polytope(0, {0, 1}, 2)
    rhs = poly.rhs(table)
    assert len(rhs) == 3
    rows = poly.coeff_rows
    assert rows.shape == (3, 2)
    # the full-set row bounds the sum of both rates by the joint bound
    full_i = poly.subset_masks.index(0b11)
    assert rows[full_i].tolist() == [1.0, 1.0]
    assert rhs[full_i] == pytest.approx(np.log2(7.0))


def test_rs_sets_three_cells_match_reference_list():
    got = set(enumerate_rs_sets(0, 3))
    expected = {
        decode_mask("1a", "1b"),
        decode_mask("1a", "1b", "2b"),
        decode_mask("1a", "1b", "3b"),
        decode_mask("1a", "1b", "2a", "2b"),
        decode_mask("1a", "1b", "3a", "3b"),
        decode_mask("1a", "1b", "2b", "3b"),
        decode_mask("1a", "1b", "2a", "2b", "3b"),
        decode_mask("1a", "1b", "2b", "3a", "3b"),
        decode_mask("1a", "1b", "2a", "2b", "3a", "3b"),
    }
    assert got == expected
    assert len(enumerate_rs_sets(0, 3)) == 9


def test_rs_sets_two_cells():
    got = set(enumerate_rs_sets(0, 2))
    expected = {
        decode_mask("1a", "1b"),
        decode_mask("1a", "1b", "2b"),
        decode_mask("1a", "1b", "2a", "2b"),
    }
    assert got == expected


def test_rs_set_counts():
    assert len(enumerate_rs_sets(0, 4)) == 27
    assert len(enumerate_rs_sets(2, 7)) == 729


def test_rs_sub_sets():
    # two cells: the single-interferer and all-interferer sets coincide
    assert enumerate_rs_sub_sets(0, 2) == [decode_mask("1a", "1b", "2b")]
    got3 = enumerate_rs_sub_sets(1, 3)
    assert got3 == [
        decode_mask("2a", "2b", "1b"),
        decode_mask("2a", "2b", "3b"),
        decode_mask("2a", "2b", "1b", "3b"),
    ]
    assert len(enumerate_rs_sub_sets(0, 7)) == 7
    full_family = set(enumerate_rs_sets(0, 7))
    assert set(enumerate_rs_sub_sets(0, 7)) <= full_family
    with pytest.raises(ValueError):
        enumerate_rs_sub_sets(0, 1)


def _constraint_sets(poly):
    return {
        (layers_of_mask(c.decoded, poly.num_cells), layers_of_mask(c.conditioned, poly.num_cells))
        for c in poly.constraints
    }


def test_two_cell_kept_constraints_own_only():
    poly = build_modified_mac_polytope(0, decode_mask("1a", "1b"), 2)
    assert _constraint_sets(poly) == {
        (layers("1a"), layers("1b")),
        (layers("1a", "1b"), layers()),
    }


def test_two_cell_kept_constraints_inner_interferer():
    poly = build_modified_mac_polytope(0, decode_mask("1a", "1b", "2b"), 2)
    assert _constraint_sets(poly) == {
        (layers("1a"), layers("1b", "2b")),
        (layers("1a", "1b"), layers("2b")),
        (layers("1a", "2b"), layers("1b")),
        (layers("1a", "1b", "2b"), layers()),
    }


def test_two_cell_kept_constraints_full():
    poly = build_modified_mac_polytope(0, decode_mask("1a", "1b", "2a", "2b"), 2)
    assert _constraint_sets(poly) == {
        (layers("1a"), layers("1b", "2a", "2b")),
        (layers("1a", "1b"), layers("2a", "2b")),
        (layers("1a", "2a"), layers("1b", "2b")),
        (layers("1a", "1b", "2a"), layers("2b")),
        (layers("1a", "2a", "2b"), layers("1b")),
        (layers("1a", "1b", "2a", "2b"), layers()),
    }


def test_two_cell_kept_constraints_receiver_two():
    poly = build_modified_mac_polytope(1, decode_mask("2a", "2b", "1b"), 2)
    assert _constraint_sets(poly) == {
        (layers("2a"), layers("2b", "1b")),
        (layers("2a", "2b"), layers("1b")),
        (layers("2a", "1b"), layers("2b")),
        (layers("2a", "2b", "1b"), layers()),
    }


def test_modified_polytope_requires_own_layers():
    with pytest.raises(ValueError):
        build_modified_mac_polytope(0, decode_mask("1a", "2b"), 2)


def test_all_interferer_constraint_count():
    mask = pair_mask(0)
    for j in range(1, 7):
        mask |= decode_mask(f"{j + 1}b")
    poly = build_modified_mac_polytope(0, mask, 7)
    assert len(poly.constraints) == 2**7


def test_rhs_matches_layered_bound_value():
    table = GainTable(
        10 ** np.random.default_rng(0).uniform(-1, 1, (2, 2)),
        np.array([1.2, 1.7]),
        1.0,
        np.ones(2),
    )
    lt = LayeredGainTable(table, 0.35)
    poly = build_modified_mac_polytope(0, decode_mask("1a", "1b", "2a", "2b"), 2)
    rhs = poly.rhs(lt)
    for i, c in enumerate(poly.constraints):
        assert rhs[i] == pytest.approx(
            layered_bound_value(lt, 0, c.decoded, c.conditioned), abs=1e-12
        )


def test_downward_closure_structure():
    # every coefficient is 0/1, so feasibility is preserved when any rate
    # shrinks: check the coefficient rows directly
    for n, mask in ((2, decode_mask("1a", "1b", "2b")), (3, decode_mask("1a", "1b", "2a", "2b"))):
        poly = build_modified_mac_polytope(0, mask, n)
        rows = poly.coeff_rows
        assert ((rows == 0.0) | (rows == 1.0)).all()


def test_network_assembly_counts_and_order():
    parts = [
        build_modified_mac_polytope(0, decode_mask("1a", "1b"), 2),
        build_modified_mac_polytope(1, decode_mask("2a", "2b", "1b"), 2),
    ]
    net = assemble_network_polytope(parts)
    assert len(net.constraints) == 2 + 4
    assert [c.receiver for c in net.constraints] == [0, 0, 1, 1, 1, 1]
    assert net.combo == (parts[0].decode_mask, parts[1].decode_mask)
    with pytest.raises(ValueError):
        assemble_network_polytope([parts[0], parts[0]])


def test_tin_combo_total_constraint_count():
    n = 4
    parts = [build_modified_mac_polytope(l, pair_mask(l), n) for l in range(n)]
    net = assemble_network_polytope(parts)
    assert len(net.constraints) == 2 * n


def test_dump_format():
    poly = build_modified_mac_polytope(0, decode_mask("1a", "1b"), 2)
    text = dump_constraints(poly)
    assert text.splitlines() == [
        "recv=1 D={1a} C={1b} coeffs=[1,0,0,0]",
        "recv=1 D={1a,1b} C={} coeffs=[1,1,0,0]",
    ]
    table = GainTable(np.array([[4.0, 2.0], [2.0, 4.0]]), np.ones(2), 1.0, np.ones(2))
    with_rhs = dump_constraints(poly, LayeredGainTable(table, 1.0))
    lines = with_rhs.splitlines()
    assert lines[0].startswith("recv=1 D={1a} C={1b} coeffs=[1,0,0,0] rhs=")
    # dumping twice gives identical text
    assert dump_constraints(poly) == text
