import logging

import pytest
import sympy

import curve_count
import gf_core
from conftest import cached_field
from spectra_errors import (
    HypothesisViolated,
    InvalidParameter,
    LogOfZero,
    PairBudgetExceeded,
    UncoveredCase,
)
from spectra_settings import SpectraSettings

# (p, m, k): fields F_{p^{2km}} small enough for a full residue sweep
SWEEP_FIELDS = [(2, 2, 1), (2, 1, 2), (3, 1, 1), (3, 2, 1), (5, 1, 1), (7, 1, 1), (2, 3, 1), (3, 1, 2)]


def curve(p, n, m, alpha_ind, beta_ind, n1, n2):
    fs = cached_field(p, n)
    return curve_count.make_curve(fs, m, gf_core.antilog(fs, alpha_ind), gf_core.antilog(fs, beta_ind), n1, n2)


def _divisors(v):
    return [d for d in range(1, v + 1) if v % d == 0]


def _sweep():
    for p, m, k in SWEEP_FIELDS:
        q1 = p ** m + 1
        for n1 in _divisors(q1):
            for n2 in _divisors(q1):
                yield p, m, k, n1, n2


# --- construction ----------------------------------------------------------

def test_residues():
    ci = curve(2, 4, 2, 7, 3, 5, 5)
    assert (ci.r1, ci.r2, ci.t, ci.k) == (2, 3, 5, 1)
    assert ci.hypothesis_holds


def test_degree_must_be_multiple_of_2m():
    with pytest.raises(InvalidParameter):
        curve_count.make_curve(cached_field(2, 4), 3, 1, 1, 3, 3)


def test_exponents_positive():
    with pytest.raises(InvalidParameter):
        curve_count.make_curve(cached_field(2, 4), 2, 1, 1, 0, 5)


def test_zero_coefficient_rejected():
    with pytest.raises(LogOfZero):
        curve_count.make_curve(cached_field(2, 4), 2, 0, 1, 5, 5)


def test_representatives_share_residue():
    fs = cached_field(5, 2)
    reps = curve_count.representatives(fs, 2, 6, count=4)
    assert len(set(reps)) == 4
    assert all(curve_count.classify_coefficient(fs, a, 6) == 2 for a in reps)


# --- point counts ----------------------------------------------------------

def test_case_i_f16():
    ci = curve(2, 4, 2, 0, 0, 5, 5)
    assert curve_count.count_points_closed_form(ci) == curve_count.CurveCount("i", 60)
    assert curve_count.count_points_bruteforce(ci) == 60


def test_case_ii_and_iii_f16():
    ci = curve(2, 4, 2, 0, 1, 5, 5)
    assert curve_count.count_points_closed_form(ci).case == "ii"
    assert curve_count.count_points_bruteforce(ci) == 5

    mirrored = curve(2, 4, 2, 1, 0, 5, 5)
    assert curve_count.count_points_closed_form(mirrored) == curve_count.CurveCount("iii", 5)


def test_case_iv_f16():
    ci = curve(2, 4, 2, 1, 2, 5, 5)
    assert curve_count.count_points_closed_form(ci) == curve_count.CurveCount("iv", 25)
    assert curve_count.count_points_bruteforce(ci) == 25


def test_case_v_f16():
    ci = curve(2, 4, 2, 1, 1, 5, 5)
    assert curve_count.count_points_closed_form(ci) == curve_count.CurveCount("v", 0)
    assert curve_count.count_points_bruteforce(ci) == 0


def test_even_k_flips_sign():
    ci = curve(2, 4, 1, 0, 0, 3, 3)
    assert ci.k == 2
    assert curve_count.count_points_closed_form(ci).N == 6
    assert curve_count.count_points_bruteforce(ci) == 6


def test_line_has_pn_points():
    ci = curve(3, 2, 1, 0, 0, 1, 1)
    assert curve_count.count_points_closed_form(ci).N == 9
    assert curve_count.count_points_bruteforce(ci) == 9


def test_hypothesis_violated():
    ci = curve(2, 4, 2, 0, 0, 3, 5)
    assert not ci.hypothesis_holds
    with pytest.raises(HypothesisViolated):
        curve_count.count_points_closed_form(ci)


@pytest.mark.parametrize("alpha_ind,beta_ind,n1,n2", [(0, 2, 2, 6), (2, 0, 6, 2)])
def test_uncovered_residues(alpha_ind, beta_ind, n1, n2):
    ci = curve(5, 2, 1, alpha_ind, beta_ind, n1, n2)
    with pytest.raises(UncoveredCase):
        curve_count.count_points_closed_form(ci)


def test_report_on_uncovered_case(caplog):
    ci = curve(5, 2, 1, 0, 2, 2, 6)
    with caplog.at_level(logging.WARNING, logger="curve_count"):
        report = curve_count.curve_report(ci)
    assert report["case"] is None
    assert report["N"] is None
    assert report["match"] is None
    assert isinstance(report["bruteforce"], int)
    assert "No closed form" in caplog.text


def test_report_without_bruteforce():
    report = curve_count.curve_report(curve(2, 4, 2, 1, 2, 5, 5), bruteforce=False)
    assert report["N"] == 25
    assert report["bruteforce"] is None
    assert report["match"] is None


def test_pair_budget():
    ci = curve(2, 4, 2, 0, 0, 5, 5)
    with pytest.raises(PairBudgetExceeded):
        curve_count.count_points_bruteforce(ci, SpectraSettings(max_pairs=100))


def _check_residue_grid(fs, m, n1, n2, alpha_reps, beta_reps):
    covered = 0
    for r1 in range(n1):
        for r2 in range(n2):
            alphas = dict.fromkeys(curve_count.representatives(fs, r1, n1, count=alpha_reps))
            betas = dict.fromkeys(curve_count.representatives(fs, r2, n2, count=beta_reps))
            for alpha in alphas:
                for beta in betas:
                    ci = curve_count.make_curve(fs, m, alpha, beta, n1, n2)
                    assert (ci.r1, ci.r2) == (r1, r2)
                    report = curve_count.curve_report(ci)
                    if report["case"] is None:
                        with pytest.raises(UncoveredCase):
                            curve_count.count_points_closed_form(ci)
                        continue
                    covered += 1
                    assert report["match"], report
    return covered


@pytest.mark.parametrize("p,m,k,n1,n2", list(_sweep()))
def test_closed_form_matches_bruteforce(p, m, k, n1, n2):
    fs = cached_field(p, 2 * k * m)
    assert _check_residue_grid(fs, m, n1, n2, alpha_reps=3, beta_reps=3) > 0


def _full_grid():
    """Every (p, m, n1, n2) with p^{2m} <= 10^4 and n1, n2 dividing p^m + 1"""
    for p in sympy.primerange(2, 101):
        for m in range(1, 7):
            q1 = p ** m + 1
            if (q1 - 1) ** 2 > 10 ** 4:
                break
            for n1 in _divisors(q1):
                for n2 in _divisors(q1):
                    yield p, m, n1, n2


@pytest.mark.slow
@pytest.mark.parametrize("p,m,n1,n2", list(_full_grid()))
def test_curve_grid(p, m, n1, n2):
    # three representatives per class on each side for p <= 13, one above
    reps = 3 if p <= 13 else 1
    assert _check_residue_grid(cached_field(p, 2 * m), m, n1, n2, reps, reps) > 0
