"""
SPECTRAL ENGINE - Exhaustive differential and boomerang spectra of x^d

    delta(a, b) = #{x : f(x+a) - f(x) = b}
    beta(a, b)  = #{(x, y) : f(x) - f(y) = b, f(x+a) - f(y+a) = b}

Both spectra are histograms of the a = 1 row. Enumeration ranges are split
into partitions that run through joblib; every partition fills a private
integer histogram and the merge is exact addition, so the result does not
depend on the worker count.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

import gf_core
from gf_core import FieldSpec
from progress_report import EnumerationProgress
from spectra_errors import (
    FieldMismatch,
    IdentityViolation,
    InvalidParameter,
    PairBudgetExceeded,
    WrongSpectrumKind,
    ZeroArgument,
    ZeroDerivativeDirection,
    ZeroExponent,
)
from spectra_settings import SpectraSettings, get_settings

logger = logging.getLogger(__name__)

DIFFERENTIAL = "differential"
BOOMERANG = "boomerang"

# largest integer a JSON double carries exactly
_JSON_EXACT_LIMIT = 2 ** 53


# ============================================================================
# DATA CLASSES
# ============================================================================

@dataclass(frozen=True, eq=False)
class PowerMapSpec:
    """f(x) = x^d over a field; s and m are set when d = s(p^m - 1), n = 2m"""
    field: FieldSpec
    d: int
    s: Optional[int] = None
    m: Optional[int] = None

    def __post_init__(self):
        if self.d < 1:
            raise ZeroExponent(f"❌ Exponent must be >= 1, got {self.d}")
        if (self.s is None) != (self.m is None):
            raise InvalidParameter("❌ s and m must be given together")
        if self.m is not None:
            if self.field.n != 2 * self.m:
                raise FieldMismatch(f"❌ Family d = s(p^m-1) needs n = 2m; got n={self.field.n}, m={self.m}")
            if self.d != self.s * (self.field.p ** self.m - 1):
                raise InvalidParameter(f"❌ d={self.d} is not s(p^m-1) for s={self.s}, m={self.m}")

    @classmethod
    def from_family(cls, fs: FieldSpec, s: int, m: int) -> "PowerMapSpec":
        """d = s(p^m - 1) over F_{p^{2m}}"""
        if s < 1 or m < 1:
            raise InvalidParameter(f"❌ s and m must be >= 1, got s={s}, m={m}")
        return cls(field=fs, d=s * (fs.p ** m - 1), s=s, m=m)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return gf_core.pow_many(self.field, self.d, x)

    def describe(self) -> str:
        fs = self.field
        origin = f", s={self.s}, m={self.m}" if self.m is not None else ""
        return f"x^{self.d} over F_{fs.p}^{fs.n}{origin}"


@dataclass(frozen=True)
class Spectrum:
    """Histogram value i -> frequency; `branch` annotates closed-form results"""
    kind: str
    entries: Dict[int, int]
    branch: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in (DIFFERENTIAL, BOOMERANG):
            raise WrongSpectrumKind(f"❌ Unknown spectrum kind '{self.kind}'")
        clean = {int(i): int(f) for i, f in sorted(self.entries.items()) if int(f) != 0}
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_counts(cls, kind: str, counts: np.ndarray, branch: Optional[str] = None) -> "Spectrum":
        """Histogram of a per-b count array (b = 0 dropped for boomerang)"""
        values = counts[1:] if kind == BOOMERANG else counts
        uniq, freq = np.unique(values, return_counts=True)
        return cls(kind=kind, entries=dict(zip(uniq.tolist(), freq.tolist())), branch=branch)

    def total(self) -> int:
        return sum(self.entries.values())

    def weighted_total(self) -> int:
        return sum(i * f for i, f in self.entries.items())

    def to_json_dict(self) -> Dict:
        def exact(v: int):
            return str(v) if abs(v) > _JSON_EXACT_LIMIT else v

        out = {"kind": self.kind, "entries": {str(i): exact(f) for i, f in self.entries.items()}}
        if self.branch is not None:
            out["branch"] = self.branch
        return out

    def to_json(self) -> str:
        # entries already in ascending numeric order; sort_keys would order them as strings
        return json.dumps(self.to_json_dict(), ensure_ascii=False)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"value": list(self.entries.keys()), "frequency": list(self.entries.values())},
            columns=["value", "frequency"],
        )


# ============================================================================
# HELPERS
# ============================================================================

def _resolve(workers: Optional[int], settings: Optional[SpectraSettings]):
    settings = settings or get_settings()
    workers = settings.threads if workers is None else int(workers)
    if workers < 1:
        raise InvalidParameter(f"❌ workers must be >= 1, got {workers}")
    return workers, settings


def _shift(fs: FieldSpec, x: np.ndarray, a: int) -> np.ndarray:
    return gf_core.add_many(fs, x, np.full_like(x, a))


def _check_nonzero(fs: FieldSpec, a: int, error, name: str) -> int:
    a = fs.check(a)
    if a == 0:
        raise error(f"❌ {name} must be nonzero")
    return a


# ============================================================================
# DIFFERENTIAL
# ============================================================================

def delta(pm: PowerMapSpec, a: int, b: int) -> int:
    """#{x : f(x+a) - f(x) = b} by full enumeration"""
    fs = pm.field
    a = _check_nonzero(fs, a, ZeroDerivativeDirection, "Derivative direction a")
    b = fs.check(b)
    x = gf_core.elements(fs)
    diff = gf_core.sub_many(fs, pm.apply(_shift(fs, x, a)), pm.apply(x))
    return int(np.count_nonzero(diff == b))


def _differential_partition(pm: PowerMapSpec, x: np.ndarray) -> np.ndarray:
    fs = pm.field
    diff = gf_core.sub_many(fs, pm.apply(_shift(fs, x, 1)), pm.apply(x))
    return np.bincount(diff, minlength=fs.order).astype(np.int64)


def differential_counts(pm: PowerMapSpec, workers: Optional[int] = None,
                        settings: Optional[SpectraSettings] = None) -> np.ndarray:
    """delta(1, b) for every b, indexed by the encoding of b"""
    workers, settings = _resolve(workers, settings)
    x = gf_core.elements(pm.field)
    parts = np.array_split(x, workers)
    if workers == 1:
        return _differential_partition(pm, parts[0])
    results = Parallel(n_jobs=workers, backend=settings.backend)(
        delayed(_differential_partition)(pm, part) for part in parts
    )
    return np.sum(results, axis=0, dtype=np.int64)


def differential_spectrum(pm: PowerMapSpec, workers: Optional[int] = None,
                          settings: Optional[SpectraSettings] = None) -> Spectrum:
    """Histogram of delta(1, b) over all b"""
    logger.info("🔍 Differential spectrum of %s", pm.describe())
    spectrum = Spectrum.from_counts(DIFFERENTIAL, differential_counts(pm, workers, settings))
    logger.info("📊 DS = %s", spectrum.entries)
    return spectrum


# ============================================================================
# BOOMERANG
# ============================================================================

def _point_table(pm: PowerMapSpec, a: int):
    """Distinct points (f(x), f(x+a)) as (u, v, multiplicity), sorted by key u*N + v"""
    fs = pm.field
    x = gf_core.elements(fs)
    u = pm.apply(x)
    v = pm.apply(_shift(fs, x, a))
    keys, mult = np.unique(u * fs.order + v, return_counts=True)
    return keys // fs.order, keys % fs.order, mult.astype(np.int64), keys


def beta(pm: PowerMapSpec, a: int, b: int) -> int:
    """#{(x, y) : f(x) - f(y) = b and f(x+a) - f(y+a) = b}"""
    fs = pm.field
    a = _check_nonzero(fs, a, ZeroArgument, "a")
    b = _check_nonzero(fs, b, ZeroArgument, "b")

    # for each point (u, v) of x, count y with (f(y), f(y+a)) = (u - b, v - b)
    u, v, mult, keys = _point_table(pm, a)
    bb = np.full_like(u, b)
    target = gf_core.sub_many(fs, u, bb) * fs.order + gf_core.sub_many(fs, v, bb)
    pos = np.searchsorted(keys, target)
    pos = np.minimum(pos, len(keys) - 1)
    hit = keys[pos] == target
    return int(np.sum(mult[hit] * mult[pos[hit]]))


def _boomerang_block(fs: FieldSpec, u: np.ndarray, v: np.ndarray, mult: np.ndarray,
                     lo: int, hi: int) -> np.ndarray:
    """Per-b' counts contributed by outer points lo..hi-1 against all points"""
    b1 = gf_core.sub_many(fs, u[lo:hi, None], u[None, :])
    b2 = gf_core.sub_many(fs, v[lo:hi, None], v[None, :])
    hit = (b1 == b2) & (b1 != 0)
    rows, cols = np.nonzero(hit)
    if rows.size == 0:
        return np.zeros(fs.order, dtype=np.int64)
    weights = mult[lo + rows] * mult[cols]
    if np.all(weights == 1):
        return np.bincount(b1[rows, cols], minlength=fs.order).astype(np.int64)
    # block totals stay far below 2^53, so float weights are exact
    return np.rint(np.bincount(b1[rows, cols], weights=weights, minlength=fs.order)).astype(np.int64)


def check_pair_budget(fs: FieldSpec, settings: Optional[SpectraSettings] = None):
    settings = settings or get_settings()
    pairs = fs.order ** 2
    if pairs > settings.max_pairs:
        raise PairBudgetExceeded(
            f"❌ {fs.p}^{2 * fs.n} = {pairs} pairs exceeds pair budget {settings.max_pairs}"
        )


def boomerang_counts(pm: PowerMapSpec, workers: Optional[int] = None,
                     settings: Optional[SpectraSettings] = None) -> np.ndarray:
    """
    beta(1, b) for every b (index 0 unused)

    Pairs (x, y) are enumerated through their points (f(x), f(x+1)): every
    ordered pair of distinct points with equal nonzero differences
    contributes the product of the point multiplicities to that difference.
    """
    workers, settings = _resolve(workers, settings)
    fs = pm.field
    check_pair_budget(fs, settings)

    u, v, mult, _ = _point_table(pm, 1)
    k = len(u)
    rows_per_block = max(1, settings.block_cells // max(k, 1))
    bounds = [(lo, min(k, lo + rows_per_block)) for lo in range(0, k, rows_per_block)]
    logger.debug("   %d distinct points, %d blocks", k, len(bounds))

    progress = EnumerationProgress(len(bounds), title=f"Boomerang pairs for {pm.describe()}", log=logger)
    counts = np.zeros(fs.order, dtype=np.int64)
    if workers == 1:
        for lo, hi in bounds:
            counts += _boomerang_block(fs, u, v, mult, lo, hi)
            progress.advance()
    else:
        jobs = Parallel(n_jobs=workers, backend=settings.backend, return_as="generator")(
            delayed(_boomerang_block)(fs, u, v, mult, lo, hi) for lo, hi in bounds
        )
        for part in jobs:
            counts += part
            progress.advance()
    progress.complete()

    if fs.p == 2 and np.any(counts[1:] % 2):
        raise IdentityViolation("❌ Odd beta(1, b) in characteristic 2")
    return counts


def boomerang_spectrum(pm: PowerMapSpec, workers: Optional[int] = None,
                       settings: Optional[SpectraSettings] = None) -> Spectrum:
    """Histogram of beta(1, b) over b != 0"""
    logger.info("🔍 Boomerang spectrum of %s", pm.describe())
    spectrum = Spectrum.from_counts(BOOMERANG, boomerang_counts(pm, workers, settings))
    logger.info("📊 BS = %s", spectrum.entries)
    return spectrum


# ============================================================================
# DERIVED QUANTITIES
# ============================================================================

def differential_uniformity(s: Spectrum) -> int:
    """Largest value with nonzero frequency"""
    if s.kind != DIFFERENTIAL:
        raise WrongSpectrumKind("❌ differential_uniformity needs a differential spectrum")
    return max(s.entries)


def boomerang_uniformity(s: Spectrum) -> int:
    if s.kind != BOOMERANG:
        raise WrongSpectrumKind("❌ boomerang_uniformity needs a boomerang spectrum")
    return max(s.entries)


def is_locally_apn(pm: PowerMapSpec, workers: Optional[int] = None,
                   settings: Optional[SpectraSettings] = None) -> bool:
    """max of delta(1, b) over b outside F_p (encodings >= p) equals 2"""
    counts = differential_counts(pm, workers, settings)
    outside = counts[pm.field.p:]
    return outside.size > 0 and int(outside.max()) == 2


def verify_identities(s: Spectrum, fs: FieldSpec) -> bool:
    """
    differential: sum(w_i) = p^n and sum(i * w_i) = p^n
    boomerang:    sum(v_i) = p^n - 1
    """
    return not identity_report(s, fs.order)


def identity_report(s: Spectrum, order: int) -> List[str]:
    """Identities a spectrum over a field of `order` elements breaks (empty when fine)"""
    problems = []
    if s.kind == DIFFERENTIAL:
        if s.total() != order:
            problems.append(f"sum of frequencies {s.total()} != p^n = {order}")
        if s.weighted_total() != order:
            problems.append(f"sum of i*frequency {s.weighted_total()} != p^n = {order}")
    elif s.total() != order - 1:
        problems.append(f"sum of frequencies {s.total()} != p^n - 1 = {order - 1}")
    return problems
