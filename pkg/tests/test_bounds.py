import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rsmimo.bounds import (
    GainTable,
    LayeredGainTable,
    PrecoderSpec,
    bound_value,
    gain_table_closed_zf,
    gain_table_mc,
    layer_bit,
    layered_bound_value,
    power_norm_mc,
    rzf_precoder,
    zf_power_norm_closed,
    zf_precoder,
)
from rsmimo.channel import CorrelationSpec, standard_complex_normal


def test_zf_orthonormal_columns_fixed_point():
    rng = np.random.default_rng(0)
    q, _ = np.linalg.qr(standard_complex_normal(rng, (16, 4)))
    w = zf_precoder(q)
    assert np.allclose(w, q, atol=1e-12)


def test_zf_inverts_the_estimates():
    rng = np.random.default_rng(1)
    ghat = standard_complex_normal(rng, (16, 4))
    w = zf_precoder(ghat)
    assert np.allclose(w.conj().T @ ghat, np.eye(4), atol=1e-10)


def test_zf_square_case_is_plain_inverse():
    rng = np.random.default_rng(2)
    ghat = standard_complex_normal(rng, (4, 4))
    w = zf_precoder(ghat)
    assert np.allclose(w, np.linalg.inv(ghat.conj().T), atol=1e-9)


def test_rzf_limits():
    rng = np.random.default_rng(3)
    ghat = standard_complex_normal(rng, (16, 4))
    near_zf = rzf_precoder(ghat, 1e-12)
    zf = zf_precoder(ghat)
    assert np.abs(near_zf - zf).max() / np.abs(zf).max() < 1e-6
    large = rzf_precoder(ghat, 1e9)
    assert np.allclose(large, ghat / 1e9, rtol=1e-6)
    assert np.allclose(rzf_precoder(np.zeros((8, 3)), 2.0), 0.0)


def test_zf_power_norm_closed_reference():
    # M=20, K=2, unit gains, single cell: estimate variance 1/2 per antenna
    lam = zf_power_norm_closed(np.ones((1, 2, 1)), 1.0, 20, 2)
    assert lam[0] == pytest.approx(1.0 / 9.0)


def test_zf_power_norm_halves_with_antenna_surplus():
    beta = 10 ** np.random.default_rng(4).uniform(-1, 0, (2, 3, 2))
    a = zf_power_norm_closed(beta, 2.0, 13, 3)
    b = zf_power_norm_closed(beta, 2.0, 23, 3)
    assert np.allclose(a, 2 * b)


def test_zf_power_norm_requires_antenna_surplus():
    with pytest.raises(ValueError):
        zf_power_norm_closed(np.ones((1, 4, 1)), 1.0, 4, 4)


def test_power_norm_mc_exact_cases():
    w = np.array([[1.0, 0.0], [0.0, 2.0], [0.0, 0.0]])
    assert power_norm_mc(w) == pytest.approx((1.0 + 4.0) / 2.0)
    assert power_norm_mc(3.0 * w) == pytest.approx(9.0 * power_norm_mc(w))


def test_power_norm_mc_matches_closed_form():
    rng = np.random.default_rng(5)
    m, k = 64, 15
    beta = 10 ** rng.uniform(-1, 0.5, (2, k, 2))
    table = gain_table_mc(
        beta, None, CorrelationSpec("uncorrelated"), PrecoderSpec("zf"),
        1.0, 1.0, m, 0, 500, np.random.default_rng(6),
    )
    lam = zf_power_norm_closed(beta, 1.0, m, k)
    assert np.abs(table.power_norm / lam - 1.0).max() < 0.02


def test_closed_form_single_cell_reference():
    table = gain_table_closed_zf(np.ones((1, 2, 1)), 1.0, 1.0, 20, 2, 0)
    assert table.signal_power[0, 0] == pytest.approx(9.0)
    assert table.noise_equiv[0] == pytest.approx(2.0)
    assert bound_value(table, 0, {0}, {0}) == pytest.approx(np.log2(5.5), abs=1e-9)
    assert bound_value(table, 0, {0}, {0}) == pytest.approx(2.4594, abs=1e-4)


def test_closed_form_symmetric_under_relabeling():
    beta = np.ones((2, 3, 2))
    table = gain_table_closed_zf(beta, 1.0, 1.0, 16, 3, 1)
    assert table.signal_power[0, 0] == pytest.approx(table.signal_power[1, 1])
    assert table.signal_power[0, 1] == pytest.approx(table.signal_power[1, 0])


def test_closed_form_huge_antenna_counts_scalar_only():
    beta = 10 ** np.random.default_rng(7).uniform(-1, 0, (7, 15, 7))
    table = gain_table_closed_zf(beta, 1e4, 1e4, 10**9, 15, 0)
    assert np.isfinite(table.signal_power).all()
    assert np.isfinite(table.noise_equiv).all()


def test_mc_matches_closed_form():
    rng = np.random.default_rng(8)
    beta = 10 ** rng.uniform(-1, 0.5, (2, 4, 2))
    closed = gain_table_closed_zf(beta, 2.0, 5.0, 32, 4, 0)
    mc = gain_table_mc(
        beta, None, CorrelationSpec("uncorrelated"), PrecoderSpec("zf"),
        2.0, 5.0, 32, 0, 2000, np.random.default_rng(9),
    )
    assert np.abs(mc.signal_power / closed.signal_power - 1.0).max() < 0.03
    assert np.abs(mc.noise_equiv / closed.noise_equiv - 1.0).max() < 0.03


def test_mc_zero_downlink_power():
    beta = np.ones((2, 3, 2))
    mc = gain_table_mc(
        beta, None, CorrelationSpec("uncorrelated"), PrecoderSpec("zf"),
        1.0, 0.0, 8, 0, 50, np.random.default_rng(10),
    )
    assert np.allclose(mc.signal_power, 0.0)
    assert np.allclose(mc.noise_equiv, 1.0)


def test_mc_deterministic_under_seed():
    beta = 10 ** np.random.default_rng(11).uniform(-1, 0, (2, 3, 2))
    angles = np.random.default_rng(12).uniform(-np.pi, np.pi, (2, 3, 2))
    kwargs = dict(
        beta=beta, angles=angles,
        correlation=CorrelationSpec("exponential", 0.5),
        precoder=PrecoderSpec("rzf"),
        pilot_snr=1.0, rho_dl=2.0, num_antennas=8, pilot_index=1, num_samples=64,
    )
    a = gain_table_mc(rng=np.random.default_rng(13), **kwargs)
    b = gain_table_mc(rng=np.random.default_rng(13), **kwargs)
    assert np.array_equal(a.signal_power, b.signal_power)
    assert np.array_equal(a.noise_equiv, b.noise_equiv)


def test_mc_noise_equiv_at_least_one():
    rng = np.random.default_rng(14)
    beta = 10 ** rng.uniform(-1, 1, (3, 2, 3))
    angles = rng.uniform(-np.pi, np.pi, (3, 2, 3))
    mc = gain_table_mc(
        beta, angles, CorrelationSpec("exponential", 0.7), PrecoderSpec("zf"),
        2.0, 3.0, 12, 0, 100, np.random.default_rng(15),
    )
    assert (mc.noise_equiv >= 1.0).all()
    assert (mc.signal_power >= 0.0).all()


def _toy_table():
    return GainTable(
        signal_power=np.array([[4.0, 2.0], [1.0, 6.0]]),
        noise_equiv=np.array([1.0, 1.5]),
        rho_dl=1.0,
        power_norm=np.ones(2),
    )


def test_bound_value_empty_subset_is_zero():
    assert bound_value(_toy_table(), 0, {0, 1}, set()) == 0.0


def test_bound_value_reference():
    t = _toy_table()
    # receiver 0 decodes only itself: cell 1's power joins the noise
    assert bound_value(t, 0, {0}, {0}) == pytest.approx(np.log2(1 + 4.0 / 3.0))
    # full decode: noise is the base only
    assert bound_value(t, 0, {0, 1}, {0, 1}) == pytest.approx(np.log2(7.0))


def test_bound_value_monotone_in_subset_and_decode_set():
    t = _toy_table()
    small = bound_value(t, 0, {0, 1}, {0})
    big = bound_value(t, 0, {0, 1}, {0, 1})
    assert small <= big
    # enlarging the decode set moves power out of the denominator
    assert bound_value(t, 0, {0}, {0}) <= bound_value(t, 0, {0, 1}, {0})


def test_bound_value_validates_sets():
    t = _toy_table()
    with pytest.raises(ValueError):
        bound_value(t, 0, {1}, {1})
    with pytest.raises(ValueError):
        bound_value(t, 0, {0}, {0, 1})


def test_layer_bit_layout():
    assert layer_bit(0, "a") == 0
    assert layer_bit(0, "b") == 1
    assert layer_bit(3, "a") == 6
    with pytest.raises(ValueError):
        layer_bit(0, "c")


def test_layer_powers_reconstruct_exactly():
    t = _toy_table()
    for split in (0.0, 0.1, 1 / 3, 0.5, 0.9, 1.0):
        lt = LayeredGainTable(t, split)
        powers = lt.layer_powers()
        assert np.array_equal(powers[:, 0::2] + powers[:, 1::2], t.signal_power)


def test_layered_full_split_zeroes_inner():
    lt = LayeredGainTable(_toy_table(), 1.0)
    inner_only = 1 << layer_bit(0, "b")
    assert layered_bound_value(lt, 0, inner_only, 0) == 0.0


def test_layered_zero_split_collapses_to_unsplit():
    t = _toy_table()
    lt = LayeredGainTable(t, 0.0)
    # decode both layers of both cells == unsplit full decode
    all_layers = 0b1111
    assert layered_bound_value(lt, 0, all_layers, 0) == pytest.approx(
        bound_value(t, 0, {0, 1}, {0, 1})
    )
    # inner layers alone carry everything at split 0
    inners = (1 << layer_bit(0, "b")) | (1 << layer_bit(1, "b"))
    assert layered_bound_value(lt, 0, inners, 0b0101) == pytest.approx(
        bound_value(t, 0, {0, 1}, {0, 1})
    )


def test_layered_two_cell_reference():
    # powers 4 and 2, unit noise, half split: decode own outer layer while
    # conditioning on everything else leaves SINR 2/1
    t = GainTable(np.array([[4.0, 2.0], [2.0, 4.0]]), np.ones(2), 1.0, np.ones(2))
    lt = LayeredGainTable(t, 0.5)
    decoded = 1 << layer_bit(0, "a")
    conditioned = (1 << layer_bit(0, "b")) | (1 << layer_bit(1, "a")) | (1 << layer_bit(1, "b"))
    assert layered_bound_value(lt, 0, decoded, conditioned) == pytest.approx(
        np.log2(3.0), abs=1e-12
    )
    assert layered_bound_value(lt, 0, decoded, conditioned) == pytest.approx(1.585, abs=5e-4)


def test_layered_rejects_overlap():
    lt = LayeredGainTable(_toy_table(), 0.5)
    with pytest.raises(ValueError):
        layered_bound_value(lt, 0, 0b11, 0b10)


@settings(max_examples=30, deadline=None)
@given(
    split=st.floats(min_value=0.0, max_value=1.0),
    seed=st.integers(min_value=0, max_value=1000),
)
def test_layered_bounds_nonnegative_finite(split, seed):
    rng = np.random.default_rng(seed)
    p = 10 ** rng.uniform(-2, 3, (2, 2))
    t = GainTable(p, 1.0 + rng.uniform(0, 5, 2), 1.0, np.ones(2))
    lt = LayeredGainTable(t, split)
    for decoded in range(1, 16):
        rest = (~decoded) & 0b1111
        val = layered_bound_value(lt, 0, decoded, rest)
        assert np.isfinite(val) and val >= 0.0


def test_closed_form_trends_with_antennas():
    beta = 10 ** np.random.default_rng(16).uniform(-1, 0, (3, 5, 3))
    tables = {
        m: gain_table_closed_zf(beta, 100.0, 100.0, m, 5, 0) for m in (10**3, 10**6, 10**9)
    }
    # single-user bound grows without bound; its numerator scales with M
    singles = [bound_value(tables[m], 0, {0, 1, 2}, {0, 1, 2}) for m in (10**3, 10**6, 10**9)]
    assert singles[0] < singles[1] < singles[2]
    # the own-signal to cross-signal power ratio is antenna-independent
    r1 = tables[10**3].signal_power[0, 0] / tables[10**3].signal_power[0, 1]
    r2 = tables[10**9].signal_power[0, 0] / tables[10**9].signal_power[0, 1]
    assert r1 == pytest.approx(r2, rel=1e-9)
