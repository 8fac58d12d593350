"""Closed forms against full enumeration"""

import pytest

import closed_form
import spectral_engine
from conftest import cached_field, family_grid, grid_id
from spectral_engine import PowerMapSpec

REFERENCE = [
    # (p, m, s, kind, entries)
    (5, 2, 1, "ds", {0: 286, 1: 74, 2: 264, 23: 1}),
    (11, 2, 2, "ds", {0: 10978, 1: 2, 2: 120, 4: 3540, 239: 1}),
    (3, 4, 3, "bs", {0: 3440, 2: 3120}),
    (7, 2, 2, "bs", {0: 1800, 4: 552, 94: 48}),
]


def _both(p, m, s, kind):
    cf = closed_form.case_flags(p, m, s)
    pm = PowerMapSpec.from_family(cached_field(p, 2 * m), s, m)
    if kind == "ds":
        return closed_form.closed_form_ds(cf), spectral_engine.differential_spectrum(pm)
    return closed_form.closed_form_bs(cf), spectral_engine.boomerang_spectrum(pm)


@pytest.mark.parametrize("p,m,s,kind,entries", REFERENCE)
def test_reference_values(p, m, s, kind, entries):
    closed, brute = _both(p, m, s, kind)
    assert closed.entries == entries
    assert brute.entries == entries


def _mismatch(case, kind):
    """(p, m, s) with the first b whose enumerated count disagrees with its b-class prediction"""
    p, m, s = case
    cf = closed_form.case_flags(p, m, s)
    fs = cached_field(p, 2 * m)
    pm = PowerMapSpec.from_family(fs, s, m)
    if kind == "ds":
        counts, predict, start = spectral_engine.differential_counts(pm), closed_form.predict_delta, 0
    else:
        counts, predict, start = spectral_engine.boomerang_counts(pm), closed_form.predict_beta, 1
    for b in range(start, fs.order):
        expected = predict(cf, fs, b)
        if expected != counts[b]:
            return {"p": p, "m": m, "s": s, "b": b, "class": closed_form.classify_b(cf, fs, b).value,
                    "predicted": expected, "enumerated": int(counts[b]), "case": closed_form.describe(cf)}
    return {"p": p, "m": m, "s": s, "case": closed_form.describe(cf)}


@pytest.mark.parametrize("case", list(family_grid(5_000)), ids=grid_id)
def test_representatives(case):
    for kind in ("ds", "bs"):
        closed, brute = _both(*case, kind)
        assert closed == brute, _mismatch(case, kind)


@pytest.mark.slow
@pytest.mark.parametrize("case", list(family_grid(10 ** 6, all_s=True)), ids=grid_id)
def test_differential_grid(case):
    closed, brute = _both(*case, "ds")
    assert closed == brute, _mismatch(case, "ds")


@pytest.mark.slow
@pytest.mark.parametrize("case", list(family_grid(10 ** 4, all_s=True)), ids=grid_id)
def test_boomerang_grid(case):
    closed, brute = _both(*case, "bs")
    assert closed == brute, _mismatch(case, "bs")


def test_mismatch_report_when_counts_agree():
    report = _mismatch((5, 2, 1), "ds")
    assert (report["p"], report["m"], report["s"]) == (5, 2, 1)
    assert "b" not in report


def test_mismatch_report_on_disagreement(monkeypatch):
    monkeypatch.setattr(closed_form, "predict_delta", lambda cf, fs, b: -1)
    report = _mismatch((5, 2, 1), "ds")
    assert report["b"] == 0
    assert report["class"] == closed_form.BClass.ZERO.value
    assert report["enumerated"] == 23
