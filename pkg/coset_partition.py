"""
COSET PARTITION - Cells C_{j1,j2} of F_{p^n} minus {0, -1}

x lies in C_{j1,j2} when ind(x+1) = j1 and ind(x) = j2 modulo p^m + 1 (n = 2m).
The cells depend on the primitive element psi, so every table carries it.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

import gf_core
from closed_form import case_flags
from gf_core import FieldSpec
from spectra_errors import InvalidParameter, OutsideSharpSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CosetIndex:
    j1: int
    j2: int
    modulus: int


def _check_half_degree(fs: FieldSpec, m: int) -> int:
    if m < 1 or fs.n != 2 * m:
        raise InvalidParameter(f"❌ Coset partition needs n = 2m; got n={fs.n}, m={m}")
    return fs.p ** m + 1


def _sharp_set(fs: FieldSpec) -> np.ndarray:
    x = gf_core.elements(fs)
    return x[(x != 0) & (x != fs.minus_one)]


def coset_of(fs: FieldSpec, m: int, x: int) -> CosetIndex:
    modulus = _check_half_degree(fs, m)
    x = fs.check(x)
    if x == 0 or x == fs.minus_one:
        raise OutsideSharpSet(f"❌ {x} is 0 or -1 and lies in no cell")
    x1 = gf_core.add(fs, x, 1)
    return CosetIndex(gf_core.ind(fs, x1) % modulus, gf_core.ind(fs, x) % modulus, modulus)


def _cells(fs: FieldSpec, modulus: int, x: np.ndarray) -> np.ndarray:
    """Flat cell index j1 * modulus + j2 for each x"""
    x1 = gf_core.add_many(fs, x, np.ones_like(x))
    return (fs.log_table[x1] % modulus) * modulus + fs.log_table[x] % modulus


def partition_sizes(fs: FieldSpec, m: int) -> np.ndarray:
    """(p^m+1) x (p^m+1) array of |C_{j1,j2}|, rows j1, columns j2"""
    modulus = _check_half_degree(fs, m)
    sizes = np.bincount(_cells(fs, modulus, _sharp_set(fs)), minlength=modulus * modulus)
    return sizes.reshape(modulus, modulus).astype(np.int64)


def coset_prediction(q: int, t: int, j1: int, j2: int) -> int:
    """
    Number of x in C_{j1,j2} with (x+1)^d = x^d, characteristic 2, h = (q+1)/t:

        (0, 0)                                  q - 2
        j1 != j2, j1 = j2 mod h, both nonzero   1
        anything else                           0
    """
    h = (q + 1) // t
    if j1 == 0 and j2 == 0:
        return q - 2
    if j1 != j2 and (j1 - j2) % h == 0 and j1 != 0 and j2 != 0:
        return 1
    return 0


def delta_zero_coset_table(fs: FieldSpec, m: int, s: int, with_prediction: Optional[bool] = None) -> pd.DataFrame:
    """
    Per-cell counts of x with (x+1)^d - x^d = 0, d = s(p^m - 1)

    Columns j1, j2, size, delta0_count in row-major cell order; a `predicted`
    column is added for characteristic 2 with (p^m+1)/t > 3.
    """
    modulus = _check_half_degree(fs, m)
    cf = case_flags(fs.p, m, s)
    d = cf.d

    x = _sharp_set(fs)
    x1 = gf_core.add_many(fs, x, np.ones_like(x))
    zero = gf_core.pow_many(fs, d, x1) == gf_core.pow_many(fs, d, x)
    cells = _cells(fs, modulus, x)

    sizes = np.bincount(cells, minlength=modulus * modulus)
    hits = np.bincount(cells[zero], minlength=modulus * modulus)
    j = np.arange(modulus * modulus)
    frame = pd.DataFrame({
        "j1": j // modulus,
        "j2": j % modulus,
        "size": sizes.astype(np.int64),
        "delta0_count": hits.astype(np.int64),
    })

    if with_prediction is None:
        with_prediction = fs.p == 2 and cf.applicable
    if with_prediction:
        frame["predicted"] = [coset_prediction(cf.q, cf.t, a, b) for a, b in zip(frame["j1"], frame["j2"])]

    frame.attrs["psi"] = fs.psi
    frame.attrs["t"] = cf.t
    logger.info("📊 C_{j1,j2} table for p=%d, m=%d, s=%d: %d solutions of Δ(x)=0", fs.p, m, s, int(hits.sum()))
    return frame


def unit_circle_sum_unique(fs: FieldSpec, m: int) -> bool:
    """
    alpha^i + alpha^j, 0 <= i <= j <= p^m, alpha = psi^{p^m-1}: nonzero sums
    determine {i, j}. Zero sums (i = j for p = 2, alpha^j = -alpha^i for odd p)
    are left out.
    """
    if m < 1 or fs.n % (2 * m) != 0:
        raise InvalidParameter(f"❌ 2m must divide n; got n={fs.n}, m={m}")
    q = fs.p ** m
    powers = fs.antilog_table[(np.arange(q + 1, dtype=np.int64) * (q - 1)) % fs.group_order]

    i, j = np.triu_indices(q + 1)
    sums = gf_core.add_many(fs, powers[i], powers[j])
    sums = sums[sums != 0]
    return np.unique(sums).size == sums.size
