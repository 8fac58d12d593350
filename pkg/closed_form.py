"""
CLOSED FORM - Differential and boomerang spectra of x^{s(p^m-1)} over F_{p^{2m}}

With q = p^m and t = gcd(s, q+1) the spectra depend only on (p, q, t) and on
which of 2t, 3t, 6t divide q+1. Each case (Branch) has a declarative table of
(value, frequency) expressions in q and t, evaluated in exact rational
arithmetic. Rows whose values coincide are merged, so the degenerate t = 1
tables fold into fewer entries.

The per-b predictors classify b by its relation to the image subgroup
H = {alpha^{s i}} of the unit circle (alpha = psi^{q-1}) and look the count
up in the same branch.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import gcd
from typing import Dict, List, Optional, Tuple

import numpy as np
import sympy

import gf_core
from gf_core import FieldSpec
from spectral_engine import BOOMERANG, DIFFERENTIAL, Spectrum, identity_report
from spectra_errors import (
    FieldMismatch,
    IdentityViolation,
    InvalidParameter,
    NegativeFrequency,
    NonIntegerFrequency,
    NonPrimeCharacteristic,
    NotApplicable,
    ZeroArgument,
)

logger = logging.getLogger(__name__)

Q, T = sympy.symbols("q t", positive=True, integer=True)


class Branch(str, Enum):
    P2_3T_NOT_DIV = "P2_3tNotDiv"
    P2_3T_DIV = "P2_3tDiv"
    P3_2T_NOT_DIV = "P3_2tNotDiv"
    P3_2T_DIV = "P3_2tDiv"
    PG3_2T_NOT_DIV = "PG3_2tNotDiv"
    PG3_2T_DIV_6T_NOT = "PG3_2tDiv6tNot"
    PG3_6T_DIV = "PG3_6tDiv"


BRANCH_LABELS = {
    Branch.P2_3T_NOT_DIV: "p=2, 3t ∤ 2^m+1",
    Branch.P2_3T_DIV: "p=2, 3t | 2^m+1",
    Branch.P3_2T_NOT_DIV: "p=3, 2t ∤ 3^m+1",
    Branch.P3_2T_DIV: "p=3, 2t | 3^m+1",
    Branch.PG3_2T_NOT_DIV: "p>3, 2t ∤ p^m+1",
    Branch.PG3_2T_DIV_6T_NOT: "p>3, 2t | p^m+1, 6t ∤ p^m+1",
    Branch.PG3_6T_DIV: "p>3, 6t | p^m+1",
}


def branch_label(branch: Branch) -> str:
    return f"{branch.value} ({BRANCH_LABELS[branch]})"


# ============================================================================
# CASE FLAGS
# ============================================================================

@dataclass(frozen=True)
class CaseFlags:
    """Derived parameters of (p, m, s); t is always recomputed"""
    p: int
    m: int
    s: int
    t: int
    div2t: bool
    div3t: bool
    div6t: bool
    applicable: bool
    branch: Branch

    @property
    def q(self) -> int:
        return self.p ** self.m

    @property
    def n(self) -> int:
        return 2 * self.m

    @property
    def d(self) -> int:
        return self.s * (self.q - 1)

    @property
    def image_order(self) -> int:
        """|H| = (q+1)/t"""
        return (self.q + 1) // self.t

    def require_applicable(self):
        if not self.applicable:
            raise NotApplicable(
                f"❌ (p^m+1)/t = {self.q + 1}/{self.t} = {self.image_order} ≤ 3 "
                f"for p={self.p}, m={self.m}, s={self.s}; closed form needs (p^m+1)/t > 3"
            )


def case_flags(p: int, m: int, s: int) -> CaseFlags:
    """Case selection for d = s(p^m - 1), n = 2m"""
    if p < 2 or not sympy.isprime(p):
        raise NonPrimeCharacteristic(f"❌ Characteristic {p} is not prime")
    if m < 1 or s < 1:
        raise InvalidParameter(f"❌ m and s must be >= 1, got m={m}, s={s}")

    q1 = p ** m + 1
    t = gcd(s, q1)
    div2t = q1 % (2 * t) == 0
    div3t = q1 % (3 * t) == 0
    div6t = q1 % (6 * t) == 0

    if p == 2:
        branch = Branch.P2_3T_DIV if div3t else Branch.P2_3T_NOT_DIV
    elif p == 3:
        branch = Branch.P3_2T_DIV if div2t else Branch.P3_2T_NOT_DIV
    elif not div2t:
        branch = Branch.PG3_2T_NOT_DIV
    elif div6t:
        branch = Branch.PG3_6T_DIV
    else:
        branch = Branch.PG3_2T_DIV_6T_NOT

    return CaseFlags(p=p, m=m, s=s, t=t, div2t=div2t, div3t=div3t, div6t=div6t,
                     applicable=q1 > 3 * t, branch=branch)


# ============================================================================
# SPECTRUM TABLES  (value, frequency) in q = p^m and t; q^2 = p^n
# ============================================================================

DS_TABLES: Dict[Branch, Tuple[Tuple[str, str], ...]] = {
    Branch.P2_3T_NOT_DIV: (
        ("0", "(2*t**2*q**2 - (q - t + 2)*q - 4*t**2 + t - 1) / (2*t**2)"),
        ("2*t**2", "(q**2 + (2 - 3*t)*q + 2*t**2 - 3*t + 1) / (2*t**2)"),
        ("2*t*(t - 1)", "(q - t + 1) / t"),
        ("2", "1"),
        ("t*(q - 1) - 1", "1"),
    ),
    Branch.P2_3T_DIV: (
        ("0", "(2*t**2*q**2 - (q - t + 2)*q - 2*t**2 + t - 1) / (2*t**2)"),
        ("2*t**2", "(q**2 + (2 - 3*t)*q - 3*t + 1) / (2*t**2)"),
        ("2*t*(t - 1)", "(q - t + 1) / t"),
        ("2*t**2 + 2", "1"),
        ("t*(q - 1) - 1", "1"),
    ),
    Branch.P3_2T_NOT_DIV: (
        ("0", "(t**2*q**2 - (q + 2 - t)*q - 3*t**2 + t - 1) / t**2"),
        ("t**2", "(q**2 + (2 - 3*t)*q + 2*t**2 - 3*t + 1) / t**2"),
        ("t**2 - t", "2*(q - t + 1) / t"),
        ("1", "2"),
        ("t*(q - 1) - 1", "1"),
    ),
    Branch.P3_2T_DIV: (
        ("0", "(2*t**2*q**2 - (q + 2)*q - 2*t**2 - 1) / (2*t**2)"),
        ("2*t**2", "(q**2 + (2 - 6*t)*q + 8*t**2 - 6*t + 1) / (2*t**2)"),
        ("2*t**2 - t", "2*(q - 2*t + 1) / t"),
        ("t**2", "(q - 2*t + 1) / t"),
        ("t**2 - t + 1", "2"),
        ("t*(q - 1) - 1", "1"),
    ),
    Branch.PG3_2T_NOT_DIV: (
        ("0", "(t**2*q**2 - (q + 2 - t)*q - 3*t**2 + t - 1) / t**2"),
        ("t**2", "(q**2 + (2 - 3*t)*q + 2*t**2 - 3*t + 1) / t**2"),
        ("t**2 - t", "2*(q - t + 1) / t"),
        ("1", "2"),
        ("t*(q - 1) - 1", "1"),
    ),
    Branch.PG3_2T_DIV_6T_NOT: (
        ("0", "(2*t**2*q**2 - (q + 2)*q - 6*t**2 - 1) / (2*t**2)"),
        ("2*t**2", "(q**2 + (2 - 6*t)*q + 8*t**2 - 6*t + 1) / (2*t**2)"),
        ("2*t**2 - t", "2*(q - 2*t + 1) / t"),
        ("t**2", "(q - 2*t + 1) / t"),
        ("t**2 - t", "2"),
        ("1", "2"),
        ("t*(q - 1) - 1", "1"),
    ),
    Branch.PG3_6T_DIV: (
        ("0", "(2*t**2*q**2 - (q + 2)*q - 2*t**2 - 1) / (2*t**2)"),
        ("2*t**2", "(q**2 + (2 - 6*t)*q + 4*t**2 - 6*t + 1) / (2*t**2)"),
        ("2*t**2 - t", "2*(q - 2*t + 1) / t"),
        ("t**2", "(q - 2*t + 1) / t"),
        ("2*t**2 + 1", "2"),
        ("t**2 - t", "2"),
        ("t*(q - 1) - 1", "1"),
    ),
}

BS_TABLES: Dict[Branch, Tuple[Tuple[str, str], ...]] = {
    Branch.P2_3T_NOT_DIV: (
        ("0", "((2*t**2 - 1)*q**2 - (2 - t)*q - 4*t**2 + t - 1) / (2*t**2)"),
        ("2", "1"),
        ("4*t**4 - 4*t**3 + 2*t**2", "(q**2 + (2 - 3*t)*q + 2*t**2 - 3*t + 1) / (2*t**2)"),
        ("2*t*(t - 1)*(q + 2*t**2 - 4*t)", "(q - t + 1) / t"),
    ),
    # the two cube-root classes alpha^{(q+1)/3}, alpha^{2(q+1)/3} are counted
    # only in their own row, not in the 1 + alpha^{si} row
    Branch.P2_3T_DIV: (
        ("0", "((2*t**2 - 1)*q**2 - (2 - t)*q - 2*t**2 + t - 1) / (2*t**2)"),
        ("4*t**4 - 4*t**3 + 2*t**2 + 2", "1"),
        ("4*t**4 - 4*t**3 + 2*t**2", "(q**2 + (2 - 3*t)*q - 3*t + 1) / (2*t**2)"),
        ("2*t*(t - 1)*(q + 2*t**2 - 4*t)", "(q - 3*t + 1) / t"),
        ("2*t*(t - 1)*(q + 2*t**2 - 4*t) + 4*t**2", "2"),
    ),
    Branch.P3_2T_NOT_DIV: (
        ("0", "((t**2 - 1)*q**2 - (2 - t)*q - t**2 + t - 1) / t**2"),
        ("t**4 - 2*t**3 + t**2", "(q**2 + (2 - 3*t)*q + 2*t**2 - 3*t + 1) / t**2"),
        ("t*(t - 1)*(q + t**2 - 3*t)", "2*(q - t + 1) / t"),
    ),
    Branch.P3_2T_DIV: (
        ("0", "(2*t**2*q**2 - (q + 2)*q - 2*t**2 - 1) / (2*t**2)"),
        ("t**4 - 2*t**3 + t**2", "(q - 2*t + 1) / t"),
        ("4*t**4 - 4*t**3 + 2*t**2", "(q**2 + (2 - 6*t)*q + 8*t**2 - 6*t + 1) / (2*t**2)"),
        ("t*(t - 1)*(q + 4*t**2 - 4*t)", "2*(q - 2*t + 1) / t"),
        ("t*(t - 1)*(q + t**2 - 3*t + 2)", "2"),
    ),
    Branch.PG3_2T_NOT_DIV: (
        ("0", "((t**2 - 1)*q**2 - (2 - t)*q - t**2 + t - 1) / t**2"),
        ("t**4 - 2*t**3 + t**2", "(q**2 + (2 - 3*t)*q + 2*t**2 - 3*t + 1) / t**2"),
        ("t*(t - 1)*(q + t**2 - 3*t)", "2*(q - t + 1) / t"),
    ),
    Branch.PG3_2T_DIV_6T_NOT: (
        ("0", "(2*t**2*q**2 - (q + 2)*q - 2*t**2 - 1) / (2*t**2)"),
        ("t**4 - 2*t**3 + t**2", "(q - 2*t + 1) / t"),
        ("4*t**4 - 4*t**3 + 2*t**2", "(q**2 + (2 - 6*t)*q + 8*t**2 - 6*t + 1) / (2*t**2)"),
        ("t*(t - 1)*(q + 4*t**2 - 4*t)", "2*(q - 2*t + 1) / t"),
        ("t*(t - 1)*(q + t**2 - 3*t)", "2"),
    ),
    Branch.PG3_6T_DIV: (
        ("0", "(2*t**2*q**2 - (q + 2)*q - 2*t**2 - 1) / (2*t**2)"),
        ("t**4 - 2*t**3 + t**2", "(q - 2*t + 1) / t"),
        ("4*t**4 - 4*t**3 + 2*t**2", "(q**2 + (2 - 6*t)*q + 8*t**2 - 6*t + 1) / (2*t**2)"),
        ("t*(t - 1)*(q + 4*t**2 - 4*t)", "2*(q - 4*t + 1) / t"),
        ("t*(t - 1)*(q + 4*t**2 - 4*t) + 2*t**2", "4"),
        ("t*(t - 1)*(q + t**2 - 3*t)", "2"),
    ),
}


@dataclass(frozen=True)
class SpectrumRow:
    """One evaluated table row"""
    value: int
    frequency: int
    value_expr: str
    frequency_expr: str


@lru_cache(maxsize=None)
def _parse(expr: str) -> sympy.Expr:
    return sympy.sympify(expr, locals={"q": Q, "t": T})


def _evaluate(expr: str, q: int, t: int, what: str) -> int:
    value = sympy.Rational(_parse(expr).subs({Q: q, T: t}))
    if value.q != 1:
        raise NonIntegerFrequency(f"❌ {what} '{expr}' = {value} is not an integer at q={q}, t={t}")
    return int(value)


def evaluate_rows(cf: CaseFlags, kind: str) -> List[SpectrumRow]:
    """Every row of the branch table evaluated at (q, t), before merging"""
    cf.require_applicable()
    tables = DS_TABLES if kind == DIFFERENTIAL else BS_TABLES
    rows = []
    for value_expr, freq_expr in tables[cf.branch]:
        value = _evaluate(value_expr, cf.q, cf.t, "Value")
        frequency = _evaluate(freq_expr, cf.q, cf.t, "Frequency")
        if frequency < 0 or value < 0:
            raise NegativeFrequency(
                f"❌ Row ({value_expr}, {freq_expr}) evaluates to ({value}, {frequency}) at q={cf.q}, t={cf.t}"
            )
        rows.append(SpectrumRow(value, frequency, value_expr, freq_expr))
    return rows


def _closed_form(cf: CaseFlags, kind: str) -> Spectrum:
    merged: Dict[int, int] = {}
    for row in evaluate_rows(cf, kind):
        merged[row.value] = merged.get(row.value, 0) + row.frequency

    spectrum = Spectrum(kind=kind, entries=merged, branch=branch_label(cf.branch))
    problems = identity_report(spectrum, cf.q ** 2)
    if problems:
        raise IdentityViolation(f"❌ {branch_label(cf.branch)} at q={cf.q}, t={cf.t}: " + "; ".join(problems))
    logger.debug("📊 %s %s = %s", kind, branch_label(cf.branch), spectrum.entries)
    return spectrum


def closed_form_ds(cf: CaseFlags) -> Spectrum:
    """Differential spectrum of x^{s(p^m-1)} from the branch table"""
    return _closed_form(cf, DIFFERENTIAL)


def closed_form_bs(cf: CaseFlags) -> Spectrum:
    """Boomerang spectrum of x^{s(p^m-1)} from the branch table"""
    return _closed_form(cf, BOOMERANG)


# ============================================================================
# PER-b CLASSES AND PREDICTORS
# ============================================================================

class BClass(str, Enum):
    ZERO = "0"
    PM_ONE = "±1"
    PM_TWO = "±2"
    UNIT_SHIFT = "±(1 - c), c in H"
    TWICE = "2c, c in H"
    PAIR_DIFF = "c1 - c2, c1 != c2 in H"
    CUBE_ROOT = "±alpha^{(q+1)/3}, ±alpha^{2(q+1)/3}"
    OTHER = "other"


# (delta, beta) per class; classes missing from a branch count 0
_CLASS_VALUES: Dict[Branch, Dict[BClass, Tuple[str, str]]] = {
    Branch.P2_3T_NOT_DIV: {
        BClass.ZERO: ("t*(q - 1) - 1", "0"),
        BClass.PM_ONE: ("2", "2"),
        BClass.UNIT_SHIFT: ("2*t*(t - 1)", "2*t*(t - 1)*(q + 2*t**2 - 4*t)"),
        BClass.PAIR_DIFF: ("2*t**2", "4*t**4 - 4*t**3 + 2*t**2"),
    },
    Branch.P2_3T_DIV: {
        BClass.ZERO: ("t*(q - 1) - 1", "0"),
        BClass.PM_ONE: ("2*t**2 + 2", "4*t**4 - 4*t**3 + 2*t**2 + 2"),
        BClass.CUBE_ROOT: ("2*t*(t - 1)", "2*t*(t - 1)*(q + 2*t**2 - 4*t) + 4*t**2"),
        BClass.UNIT_SHIFT: ("2*t*(t - 1)", "2*t*(t - 1)*(q + 2*t**2 - 4*t)"),
        BClass.PAIR_DIFF: ("2*t**2", "4*t**4 - 4*t**3 + 2*t**2"),
    },
    Branch.P3_2T_NOT_DIV: {
        BClass.ZERO: ("t*(q - 1) - 1", "0"),
        BClass.PM_ONE: ("1", "0"),
        BClass.UNIT_SHIFT: ("t**2 - t", "t*(t - 1)*(q + t**2 - 3*t)"),
        BClass.PAIR_DIFF: ("t**2", "t**4 - 2*t**3 + t**2"),
    },
    Branch.P3_2T_DIV: {
        BClass.ZERO: ("t*(q - 1) - 1", "0"),
        BClass.PM_ONE: ("t**2 - t + 1", "t*(t - 1)*(q + t**2 - 3*t + 2)"),
        BClass.UNIT_SHIFT: ("2*t**2 - t", "t*(t - 1)*(q + 4*t**2 - 4*t)"),
        BClass.TWICE: ("t**2", "t**4 - 2*t**3 + t**2"),
        BClass.PAIR_DIFF: ("2*t**2", "4*t**4 - 4*t**3 + 2*t**2"),
    },
    Branch.PG3_2T_NOT_DIV: {
        BClass.ZERO: ("t*(q - 1) - 1", "0"),
        BClass.PM_ONE: ("1", "0"),
        BClass.PM_TWO: ("0", "0"),
        BClass.UNIT_SHIFT: ("t**2 - t", "t*(t - 1)*(q + t**2 - 3*t)"),
        BClass.PAIR_DIFF: ("t**2", "t**4 - 2*t**3 + t**2"),
    },
    Branch.PG3_2T_DIV_6T_NOT: {
        BClass.ZERO: ("t*(q - 1) - 1", "0"),
        BClass.PM_ONE: ("1", "0"),
        BClass.PM_TWO: ("t**2 - t", "t*(t - 1)*(q + t**2 - 3*t)"),
        BClass.UNIT_SHIFT: ("2*t**2 - t", "t*(t - 1)*(q + 4*t**2 - 4*t)"),
        BClass.TWICE: ("t**2", "t**4 - 2*t**3 + t**2"),
        BClass.PAIR_DIFF: ("2*t**2", "4*t**4 - 4*t**3 + 2*t**2"),
    },
    Branch.PG3_6T_DIV: {
        BClass.ZERO: ("t*(q - 1) - 1", "0"),
        BClass.PM_ONE: ("2*t**2 + 1", "4*t**4 - 4*t**3 + 2*t**2"),
        BClass.PM_TWO: ("t**2 - t", "t*(t - 1)*(q + t**2 - 3*t)"),
        BClass.CUBE_ROOT: ("2*t**2 - t", "t*(t - 1)*(q + 4*t**2 - 4*t) + 2*t**2"),
        BClass.UNIT_SHIFT: ("2*t**2 - t", "t*(t - 1)*(q + 4*t**2 - 4*t)"),
        BClass.TWICE: ("t**2", "t**4 - 2*t**3 + t**2"),
        BClass.PAIR_DIFF: ("2*t**2", "4*t**4 - 4*t**3 + 2*t**2"),
    },
}


def _check_field(cf: CaseFlags, fs: FieldSpec):
    if fs.p != cf.p or fs.n != cf.n:
        raise FieldMismatch(f"❌ Field F_{fs.p}^{fs.n} does not match p={cf.p}, n=2m={cf.n}")


def _in_image(cf: CaseFlags, fs: FieldSpec, x: np.ndarray) -> np.ndarray:
    """x in H  <=>  x != 0 and ind(x) = 0 mod (q-1)t"""
    x = np.asarray(x, dtype=np.int64)
    return (x != 0) & (fs.log_table[x] % ((cf.q - 1) * cf.t) == 0)


def image_subgroup(cf: CaseFlags, fs: FieldSpec) -> np.ndarray:
    """Encodings of H = {alpha^{s i}}, i.e. psi^{(q-1) t j}, j = 0..(q+1)/t - 1"""
    step = (cf.q - 1) * cf.t
    return fs.antilog_table[(np.arange(cf.image_order, dtype=np.int64) * step) % fs.group_order]


def difference_pairs(cf: CaseFlags, fs: FieldSpec, b: int) -> Tuple[np.ndarray, np.ndarray]:
    """All (c1, c2) in H^2, c1 != c2, with c1 - c2 = b"""
    h = image_subgroup(cf, fs)
    c1 = gf_core.add_many(fs, h, np.full_like(h, b))
    keep = _in_image(cf, fs, c1) & (c1 != h)
    return c1[keep], h[keep]


def _cube_classes(cf: CaseFlags, fs: FieldSpec) -> set:
    alpha_exp = cf.q - 1
    w1 = gf_core.antilog(fs, alpha_exp * ((cf.q + 1) // 3))
    w2 = gf_core.antilog(fs, alpha_exp * (2 * (cf.q + 1) // 3))
    if cf.p == 2:
        return {w1, w2}
    return {w1, w2, gf_core.neg(fs, w1), gf_core.neg(fs, w2)}


def classify_b(cf: CaseFlags, fs: FieldSpec, b: int) -> BClass:
    """Disjoint class of b with respect to the image subgroup H"""
    _check_field(cf, fs)
    b = fs.check(b)
    minus_one = fs.minus_one

    if b == 0:
        return BClass.ZERO
    if b in (1, minus_one):
        return BClass.PM_ONE
    if cf.p > 3 and b in (2 % cf.p, (cf.p - 2) % cf.p):
        return BClass.PM_TWO

    c1, c2 = difference_pairs(cf, fs, b)
    if c1.size == 0:
        return BClass.OTHER

    cube_case = cf.div3t if cf.p == 2 else (cf.p > 3 and cf.div6t)
    if cube_case and b in _cube_classes(cf, fs):
        return BClass.CUBE_ROOT
    if cf.p != 2 and np.any(c1 == gf_core.neg_many(fs, c2)):
        return BClass.TWICE
    units = (1, minus_one)
    if np.any(np.isin(c1, units) | np.isin(c2, units)):
        return BClass.UNIT_SHIFT
    return BClass.PAIR_DIFF


def _predict(cf: CaseFlags, fs: FieldSpec, b: int, column: int) -> int:
    cf.require_applicable()
    klass = classify_b(cf, fs, b)
    exprs = _CLASS_VALUES[cf.branch].get(klass)
    if exprs is None:
        return 0
    return _evaluate(exprs[column], cf.q, cf.t, f"{klass.name} value")


def predict_delta(cf: CaseFlags, fs: FieldSpec, b: int) -> int:
    """delta(1, b) from the class of b"""
    return _predict(cf, fs, b, 0)


def predict_beta(cf: CaseFlags, fs: FieldSpec, b: int) -> int:
    """beta(1, b) from the class of b (b != 0)"""
    if fs.check(b) == 0:
        raise ZeroArgument("❌ beta is defined for b != 0 only")
    return _predict(cf, fs, b, 1)


def class_histogram(cf: CaseFlags, fs: FieldSpec) -> Dict[BClass, int]:
    """Number of field elements in each class (full scan)"""
    counts: Dict[BClass, int] = {}
    for b in range(fs.order):
        klass = classify_b(cf, fs, b)
        counts[klass] = counts.get(klass, 0) + 1
    return counts


def describe(cf: CaseFlags, kind: Optional[str] = None) -> Dict:
    """Summary used by the CLI"""
    out = {
        "p": cf.p, "m": cf.m, "s": cf.s, "t": cf.t, "d": cf.d,
        "div2t": cf.div2t, "div3t": cf.div3t, "div6t": cf.div6t,
        "applicable": cf.applicable, "branch": branch_label(cf.branch),
    }
    if kind is not None:
        out["kind"] = kind
    return out
