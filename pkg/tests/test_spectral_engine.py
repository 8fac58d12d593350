import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import gf_core
import spectral_engine
from conftest import cached_field
from spectral_engine import BOOMERANG, DIFFERENTIAL, PowerMapSpec, Spectrum
from spectra_errors import (
    FieldMismatch,
    InvalidParameter,
    PairBudgetExceeded,
    WrongSpectrumKind,
    ZeroArgument,
    ZeroDerivativeDirection,
    ZeroExponent,
)
from spectra_settings import SpectraSettings

# small maps used by the property tests: (p, n, d)
PROPERTY_MAPS = [(2, 4, 3), (2, 4, 7), (2, 6, 21), (3, 2, 2), (3, 4, 16), (5, 2, 4), (7, 2, 12), (3, 3, 5)]


def family(p, m, s):
    return PowerMapSpec.from_family(cached_field(p, 2 * m), s, m)


def explicit(p, n, d):
    return PowerMapSpec(field=cached_field(p, n), d=d)


def naive_boomerang_counts(pm):
    """Direct enumeration of all pairs (x, y)"""
    fs = pm.field
    x, y = np.meshgrid(gf_core.elements(fs), gf_core.elements(fs), indexing="ij")
    one = np.ones_like(x)
    b1 = gf_core.sub_many(fs, pm.apply(x), pm.apply(y))
    b2 = gf_core.sub_many(fs, pm.apply(gf_core.add_many(fs, x, one)), pm.apply(gf_core.add_many(fs, y, one)))
    hit = (b1 == b2) & (b1 != 0)
    return np.bincount(b1[hit], minlength=fs.order)


# --- PowerMapSpec ----------------------------------------------------------

def test_family_exponent():
    pm = family(5, 2, 1)
    assert pm.d == 24
    assert (pm.s, pm.m) == (1, 2)


def test_family_needs_n_equal_2m():
    with pytest.raises(FieldMismatch):
        PowerMapSpec.from_family(cached_field(5, 2), 1, 2)


def test_zero_exponent_rejected():
    with pytest.raises(ZeroExponent):
        explicit(3, 2, 0)


def test_family_parameters_positive():
    with pytest.raises(InvalidParameter):
        PowerMapSpec.from_family(cached_field(5, 4), 0, 2)


# --- delta -----------------------------------------------------------------

def test_delta_of_identity_map():
    pm = explicit(3, 2, 1)
    for a in range(1, 9):
        for b in range(9):
            assert spectral_engine.delta(pm, a, b) == (9 if b == a else 0)


def test_delta_known_values():
    pm = family(5, 2, 1)
    assert spectral_engine.delta(pm, 1, 0) == 23
    assert spectral_engine.delta(pm, 1, 1) == 1


def test_delta_zero_direction():
    with pytest.raises(ZeroDerivativeDirection):
        spectral_engine.delta(family(5, 2, 1), 0, 1)


@given(st.data())
def test_scaling_law(data):
    """delta(a, b) = delta(1, b * a^{-d}) and likewise for beta"""
    p, n, d = data.draw(st.sampled_from(PROPERTY_MAPS))
    pm = explicit(p, n, d)
    fs = pm.field
    a = data.draw(st.integers(1, fs.order - 1), label="a")
    b = data.draw(st.integers(1, fs.order - 1), label="b")
    scaled = gf_core.mul(fs, b, gf_core.inverse(fs, gf_core.pow_map(fs, d, a)))
    assert spectral_engine.delta(pm, a, b) == spectral_engine.delta(pm, 1, scaled)
    assert spectral_engine.beta(pm, a, b) == spectral_engine.beta(pm, 1, scaled)


@given(st.data())
def test_zero_derivative_scales_to_itself(data):
    p, n, d = data.draw(st.sampled_from(PROPERTY_MAPS))
    pm = explicit(p, n, d)
    a = data.draw(st.integers(1, pm.field.order - 1), label="a")
    assert spectral_engine.delta(pm, a, 0) == spectral_engine.delta(pm, 1, 0)


# --- differential spectrum -------------------------------------------------

def test_differential_spectrum_f625():
    s = spectral_engine.differential_spectrum(family(5, 2, 1))
    assert s.kind == DIFFERENTIAL
    assert s.entries == {0: 286, 1: 74, 2: 264, 23: 1}


def test_differential_spectrum_f14641():
    s = spectral_engine.differential_spectrum(family(11, 2, 2))
    assert s.entries == {0: 10978, 1: 2, 2: 120, 4: 3540, 239: 1}


def test_differential_spectrum_cube_map_f16():
    assert spectral_engine.differential_spectrum(family(2, 2, 1)).entries == {0: 8, 2: 8}


@pytest.mark.parametrize("p,n,d", PROPERTY_MAPS)
def test_identities_hold(p, n, d):
    pm = explicit(p, n, d)
    s = spectral_engine.differential_spectrum(pm)
    assert spectral_engine.verify_identities(s, pm.field)
    assert spectral_engine.verify_identities(spectral_engine.boomerang_spectrum(pm), pm.field)


@pytest.mark.parametrize("p,n,d", PROPERTY_MAPS)
def test_frobenius_invariance(p, n, d):
    fs = cached_field(p, n)
    frob = (p * d) % fs.group_order
    a, b = explicit(p, n, d), explicit(p, n, frob)
    assert spectral_engine.differential_spectrum(a) == spectral_engine.differential_spectrum(b)
    assert spectral_engine.boomerang_spectrum(a) == spectral_engine.boomerang_spectrum(b)


@pytest.mark.parametrize("p,m,s", [(2, 3, 1), (3, 2, 1), (5, 2, 2), (7, 2, 5), (2, 4, 1)])
def test_worker_partitions_agree(p, m, s):
    pm = family(p, m, s)
    small_blocks = SpectraSettings(block_cells=997)
    ds = [spectral_engine.differential_counts(pm, w, small_blocks) for w in (1, 2, 8)]
    bs = [spectral_engine.boomerang_counts(pm, w, small_blocks) for w in (1, 2, 8)]
    assert all(np.array_equal(ds[0], other) for other in ds[1:])
    assert all(np.array_equal(bs[0], other) for other in bs[1:])


# --- beta / boomerang --------------------------------------------------------

def test_beta_of_identity_map():
    pm = explicit(3, 2, 1)
    for b in range(1, 9):
        assert spectral_engine.beta(pm, 1, b) == 9


def test_beta_known_values():
    assert spectral_engine.beta(family(2, 2, 1), 1, 1) == 2
    assert spectral_engine.beta(family(7, 2, 2), 1, 1) == 0


def test_beta_zero_arguments():
    pm = family(2, 2, 1)
    with pytest.raises(ZeroArgument):
        spectral_engine.beta(pm, 0, 1)
    with pytest.raises(ZeroArgument):
        spectral_engine.beta(pm, 1, 0)


@pytest.mark.parametrize("p,n,d", PROPERTY_MAPS)
def test_point_enumeration_matches_pair_enumeration(p, n, d):
    pm = explicit(p, n, d)
    counts = spectral_engine.boomerang_counts(pm)
    assert np.array_equal(counts[1:], naive_boomerang_counts(pm)[1:])


@pytest.mark.parametrize("p,n,d", [(2, 4, 3), (3, 2, 2), (5, 2, 8), (3, 4, 16)])
def test_beta_matches_boomerang_counts(p, n, d):
    pm = explicit(p, n, d)
    counts = spectral_engine.boomerang_counts(pm)
    for b in range(1, pm.field.order):
        assert spectral_engine.beta(pm, 1, b) == counts[b]


@pytest.mark.parametrize("n,d", [(4, 3), (4, 7), (6, 9), (6, 21), (6, 5), (8, 15)])
def test_characteristic_two_counts_are_even(n, d):
    counts = spectral_engine.boomerang_counts(explicit(2, n, d))
    assert np.all(counts[1:] % 2 == 0)


def test_boomerang_of_identity_map():
    s = spectral_engine.boomerang_spectrum(explicit(3, 2, 1))
    assert s.kind == BOOMERANG
    assert s.entries == {9: 8}


def test_boomerang_f7_4():
    s = spectral_engine.boomerang_spectrum(family(7, 2, 2))
    assert s.entries == {0: 1800, 4: 552, 94: 48}
    assert spectral_engine.boomerang_uniformity(s) == 94


def test_pair_budget():
    with pytest.raises(PairBudgetExceeded):
        spectral_engine.boomerang_spectrum(family(3, 2, 1), settings=SpectraSettings(max_pairs=1000))


# --- spectrum helpers ------------------------------------------------------

def test_differential_uniformity():
    assert spectral_engine.differential_uniformity(Spectrum(DIFFERENTIAL, {0: 8, 2: 8})) == 2
    assert spectral_engine.differential_uniformity(Spectrum(DIFFERENTIAL, {0: 286, 1: 74, 2: 264, 23: 1})) == 23
    assert spectral_engine.differential_uniformity(
        Spectrum(DIFFERENTIAL, {0: 10978, 1: 2, 2: 120, 4: 3540, 239: 1})) == 239


def test_uniformity_wrong_kind():
    with pytest.raises(WrongSpectrumKind):
        spectral_engine.differential_uniformity(Spectrum(BOOMERANG, {0: 8, 2: 7}))


def test_unknown_kind():
    with pytest.raises(WrongSpectrumKind):
        Spectrum("linear", {0: 1})


def test_locally_apn():
    assert spectral_engine.is_locally_apn(family(5, 2, 1))
    assert not spectral_engine.is_locally_apn(explicit(5, 4, 1))
    assert not spectral_engine.is_locally_apn(family(11, 2, 2))


def test_verify_identities():
    f625 = cached_field(5, 4)
    assert spectral_engine.verify_identities(Spectrum(DIFFERENTIAL, {0: 286, 1: 74, 2: 264, 23: 1}), f625)
    assert not spectral_engine.verify_identities(Spectrum(DIFFERENTIAL, {0: 625}), f625)
    assert spectral_engine.verify_identities(Spectrum(BOOMERANG, {0: 3440, 2: 3120}), cached_field(3, 8))


def test_zero_frequencies_dropped():
    assert Spectrum(DIFFERENTIAL, {0: 3, 5: 0, 1: 2}).entries == {0: 3, 1: 2}


def test_json_keys_numeric_order():
    s = Spectrum(DIFFERENTIAL, {239: 1, 4: 3540, 0: 10978, 2: 120, 1: 2})
    payload = json.loads(s.to_json())
    assert list(payload["entries"]) == ["0", "1", "2", "4", "239"]
    assert payload["kind"] == "differential"
    assert "branch" not in payload


def test_json_large_counts_as_strings():
    s = Spectrum(BOOMERANG, {0: 2 ** 60, 2: 5})
    entries = s.to_json_dict()["entries"]
    assert entries["0"] == str(2 ** 60)
    assert entries["2"] == 5


def test_frame_columns():
    frame = Spectrum(DIFFERENTIAL, {0: 8, 2: 8}).to_frame()
    assert list(frame.columns) == ["value", "frequency"]
    assert frame["frequency"].sum() == 16


@given(st.dictionaries(st.integers(0, 10 ** 6), st.integers(0, 2 ** 62), max_size=12))
def test_json_entries_follow_spectrum(entries):
    s = Spectrum(BOOMERANG, entries)
    payload = json.loads(s.to_json())
    expected = {i: f for i, f in entries.items() if f}
    assert [int(k) for k in payload["entries"]] == sorted(expected)
    assert {int(k): int(v) for k, v in payload["entries"].items()} == expected
    assert all(isinstance(v, str) == (int(v) > 2 ** 53) for v in payload["entries"].values())
