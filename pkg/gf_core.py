"""
GF CORE - Finite field F_{p^n} with discrete-log tables

Elements are integers in [0, p^n - 1]; the base-p digits of an encoding are
the polynomial coordinates (constant term = least significant digit), so 0 is
the zero element, 1 the identity and 0..p-1 the prime subfield.

Scalar helpers (ind, pow_map, add, sub, mul, neg) work on Python ints.
The *_many helpers work on numpy int64 arrays and are what the enumeration
engine uses. Odd-characteristic subtraction goes through a Zech table
zech[k] = ind(1 - psi^k); characteristic 2 uses XOR.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p, gf_mul, gf_pow_mod, gf_rem, gf_strip

from spectra_errors import (
    FieldTooLarge,
    InvalidParameter,
    LogOfZero,
    NonPrimeCharacteristic,
    NotPrimitive,
    ReducedPolynomial,
    ZeroExponent,
)
from spectra_settings import SpectraSettings, get_settings

logger = logging.getLogger(__name__)

# rows per digit-matrix chunk while building the antilog table
_CHUNK_ROWS = 1 << 18


# ============================================================================
# POLYNOMIALS OVER F_p  (coefficient lists, constant term first)
# ============================================================================
# galoistools keeps the leading coefficient first; lists are reversed at the boundary

def _to_gf(a: Sequence[int]) -> List[int]:
    return gf_strip([int(c) for c in reversed(a)])


def _from_gf(g: Sequence[int]) -> List[int]:
    return [int(c) for c in reversed(g)]


def _poly_mulmod(a: Sequence[int], b: Sequence[int], mod: Sequence[int], p: int) -> List[int]:
    return _from_gf(gf_rem(gf_mul(_to_gf(a), _to_gf(b), p, ZZ), _to_gf(mod), p, ZZ))


def _poly_powmod(base: Sequence[int], e: int, mod: Sequence[int], p: int) -> List[int]:
    return _from_gf(gf_pow_mod(_to_gf(base), e, _to_gf(mod), p, ZZ))


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """True for a monic polynomial of degree >= 1 with no proper factor over F_p"""
    if len(poly) < 2 or poly[-1] != 1:
        return False
    return bool(gf_irreducible_p(_to_gf(poly), p, ZZ))


def find_irreducible(p: int, n: int) -> Tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree n (low coefficients as a base-p integer)"""
    for e in range(p ** n):
        low = [(e // p ** i) % p for i in range(n)]
        candidate = low + [1]
        if is_irreducible(candidate, p):
            return tuple(candidate)
    raise ReducedPolynomial(f"❌ No irreducible polynomial of degree {n} over F_{p}")  # unreachable


# ============================================================================
# FIELD SPEC
# ============================================================================

def _digits(e: int, p: int, n: int) -> List[int]:
    return [(e // p ** i) % p for i in range(n)]


def _from_digits(coeffs: Sequence[int], p: int) -> int:
    return sum(int(c) * p ** i for i, c in enumerate(coeffs))


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """
    A constructed F_{p^n}. Immutable after build_field; share freely between threads.
    """
    p: int
    n: int
    poly: Tuple[int, ...]
    psi: int
    log_table: np.ndarray = field(repr=False)
    antilog_table: np.ndarray = field(repr=False)
    zech_table: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return self.p ** self.n

    @property
    def group_order(self) -> int:
        return self.p ** self.n - 1

    @property
    def minus_one(self) -> int:
        return self.p - 1

    def to_json(self) -> str:
        """{"p", "n", "poly", "psi"}; tables are rebuilt on load"""
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_dict(self) -> Dict:
        return {"p": self.p, "n": self.n, "poly": list(self.poly), "psi": self.psi}

    def unit_circle_generator(self, m: int) -> int:
        """alpha = psi^{p^m - 1}, generator of the order-(p^m+1) subgroup (requires n = 2m)"""
        if self.n != 2 * m:
            raise InvalidParameter(f"❌ Unit circle needs n = 2m, got n={self.n}, m={m}")
        return int(self.antilog_table[(self.p ** m - 1) % self.group_order])

    def check(self, x: int) -> int:
        x = int(x)
        if not 0 <= x < self.order:
            raise InvalidParameter(f"❌ Encoding {x} outside F_{self.p}^{self.n}")
        return x

    def __repr__(self):
        return f"FieldSpec(p={self.p}, n={self.n}, poly={list(self.poly)}, psi={self.psi})"


def _mul_matrix(g: Sequence[int], poly: Sequence[int], p: int, n: int) -> np.ndarray:
    """Matrix M with digits(y*g) = digits(y) @ M mod p"""
    rows = []
    for j in range(n):
        xj = [0] * j + [1]
        prod = _poly_mulmod(xj, g, poly, p)
        rows.append(prod + [0] * (n - len(prod)))
    return np.array(rows, dtype=np.int64)


def _build_antilog(p: int, n: int, poly: Sequence[int], psi: int) -> np.ndarray:
    """antilog[k] = psi^k for k in [0, p^n - 2], by doubling"""
    go = p ** n - 1
    antilog = np.empty(go, dtype=np.int64)
    antilog[0] = 1
    weights = p ** np.arange(n, dtype=np.int64)
    psi_poly = _digits(psi, p, n)
    done = 1
    while done < go:
        step = min(done, go - done)
        shift = _mul_matrix(_poly_powmod(psi_poly, done, poly, p), poly, p, n)
        for lo in range(0, step, _CHUNK_ROWS):
            hi = min(step, lo + _CHUNK_ROWS)
            digits = (antilog[lo:hi, None] // weights) % p
            antilog[done + lo:done + hi] = ((digits @ shift) % p) @ weights
        done += step
    return antilog


def _negate_many(x: np.ndarray, p: int, n: int) -> np.ndarray:
    out = np.zeros_like(x)
    for i in range(n):
        w = p ** i
        out += ((p - (x // w) % p) % p) * w
    return out


def _build_zech(p: int, n: int, antilog: np.ndarray, log: np.ndarray) -> np.ndarray:
    """zech[k] = ind(1 - psi^k), -1 where psi^k = 1"""
    one_minus = _negate_many(antilog, p, n)
    # add 1 on the constant digit
    c0 = one_minus % p
    one_minus = one_minus - c0 + (c0 + 1) % p
    return log[one_minus]


def _is_primitive(e: int, p: int, n: int, poly: Sequence[int], prime_factors: Sequence[int]) -> bool:
    go = p ** n - 1
    if e == 0:
        return False
    base = _digits(e, p, n)
    for r in prime_factors:
        if _poly_powmod(base, go // r, poly, p) == [1]:
            return False
    return go == 1 or _poly_powmod(base, go, poly, p) == [1]


def build_field(
    p: int,
    n: int,
    poly_override: Optional[Sequence[int]] = None,
    psi_override: Optional[int] = None,
    settings: Optional[SpectraSettings] = None,
) -> FieldSpec:
    """
    Construct F_{p^n} with log/antilog (and, for odd p, Zech) tables

    Args:
        p: prime characteristic
        n: extension degree >= 1
        poly_override: monic irreducible, constant term first, length n+1
        psi_override: encoding of a primitive element
        settings: budgets; process defaults when None

    Returns:
        FieldSpec (deterministic when no overrides are given)
    """
    settings = settings or get_settings()
    p, n = int(p), int(n)

    if p < 2 or not sympy.isprime(p):
        raise NonPrimeCharacteristic(f"❌ Characteristic {p} is not prime")
    if n < 1:
        raise InvalidParameter(f"❌ Extension degree must be >= 1, got {n}")
    if p ** n > settings.max_field_elements:
        raise FieldTooLarge(
            f"❌ Field size {p}^{n} = {p ** n} exceeds element budget {settings.max_field_elements}"
        )

    if poly_override is not None:
        poly = tuple(int(c) for c in poly_override)
        if len(poly) != n + 1 or any(not 0 <= c < p for c in poly) or not is_irreducible(poly, p):
            raise ReducedPolynomial(f"❌ {list(poly)} is not a monic irreducible of degree {n} over F_{p}")
    else:
        logger.debug("🔍 Searching irreducible polynomial of degree %d over F_%d", n, p)
        poly = find_irreducible(p, n)

    go = p ** n - 1
    prime_factors = sorted(sympy.factorint(go)) if go > 1 else []

    if psi_override is not None:
        psi = int(psi_override)
        if not 0 < psi < p ** n or not _is_primitive(psi, p, n, poly, prime_factors):
            raise NotPrimitive(f"❌ Element {psi} does not have order {go}")
    else:
        psi = next(e for e in range(1, p ** n) if _is_primitive(e, p, n, poly, prime_factors))

    antilog = _build_antilog(p, n, poly, psi)
    log = np.full(p ** n, -1, dtype=np.int64)
    log[antilog] = np.arange(go, dtype=np.int64)
    zech = _build_zech(p, n, antilog, log) if p != 2 else None

    logger.info("✅ Built F_%d^%d (poly=%s, psi=%d)", p, n, list(poly), psi)
    return FieldSpec(p=p, n=n, poly=poly, psi=psi, log_table=log, antilog_table=antilog, zech_table=zech)


def field_from_json(payload: str, settings: Optional[SpectraSettings] = None) -> FieldSpec:
    """Rebuild a FieldSpec from its JSON form (overrides are re-validated)"""
    data = json.loads(payload)
    return build_field(data["p"], data["n"], poly_override=data["poly"], psi_override=data["psi"], settings=settings)


# ============================================================================
# SCALAR ARITHMETIC
# ============================================================================

def ind(fs: FieldSpec, x: int) -> int:
    """Discrete log of x to base psi, in [0, p^n - 2]"""
    x = fs.check(x)
    if x == 0:
        raise LogOfZero("❌ ind(0) is undefined")
    return int(fs.log_table[x])


def antilog(fs: FieldSpec, e: int) -> int:
    """psi^e for any integer e"""
    return int(fs.antilog_table[int(e) % fs.group_order])


def pow_map(fs: FieldSpec, d: int, x: int) -> int:
    """x^d with 0^d = 0; d is reduced mod p^n - 1 internally"""
    x = fs.check(x)
    if d < 1:
        raise ZeroExponent(f"❌ Exponent must be >= 1, got {d}")
    if x == 0:
        return 0
    return antilog(fs, (d % fs.group_order) * int(fs.log_table[x]))


def add(fs: FieldSpec, x: int, y: int) -> int:
    x, y = fs.check(x), fs.check(y)
    p = fs.p
    return _from_digits([(a + b) % p for a, b in zip(_digits(x, p, fs.n), _digits(y, p, fs.n))], p)


def sub(fs: FieldSpec, x: int, y: int) -> int:
    x, y = fs.check(x), fs.check(y)
    p = fs.p
    return _from_digits([(a - b) % p for a, b in zip(_digits(x, p, fs.n), _digits(y, p, fs.n))], p)


def neg(fs: FieldSpec, x: int) -> int:
    return sub(fs, 0, x)


def mul(fs: FieldSpec, x: int, y: int) -> int:
    x, y = fs.check(x), fs.check(y)
    if x == 0 or y == 0:
        return 0
    return antilog(fs, int(fs.log_table[x]) + int(fs.log_table[y]))


def inverse(fs: FieldSpec, x: int) -> int:
    return antilog(fs, -ind(fs, x))


# ============================================================================
# VECTORIZED ARITHMETIC
# ============================================================================

def pow_many(fs: FieldSpec, d: int, x: np.ndarray) -> np.ndarray:
    """Elementwise x^d (0 -> 0)"""
    if d < 1:
        raise ZeroExponent(f"❌ Exponent must be >= 1, got {d}")
    x = np.asarray(x, dtype=np.int64)
    go = fs.group_order
    out = fs.antilog_table[((d % go) * fs.log_table[x]) % go]
    return np.where(x == 0, 0, out)


def mul_many(fs: FieldSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    out = fs.antilog_table[(fs.log_table[x] + fs.log_table[y]) % fs.group_order]
    return np.where((x == 0) | (y == 0), 0, out)


def neg_many(fs: FieldSpec, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    if fs.p == 2:
        return x.copy()
    go = fs.group_order
    out = fs.antilog_table[(fs.log_table[x] + go // 2) % go]
    return np.where(x == 0, 0, out)


def sub_many(fs: FieldSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Elementwise x - y"""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if fs.p == 2:
        return np.bitwise_xor(x, y)
    x, y = np.broadcast_arrays(x, y)
    go = fs.group_order
    lx = fs.log_table[x]
    ly = fs.log_table[y]
    # x - y = x * (1 - y/x)
    z = fs.zech_table[(ly - lx) % go]
    out = fs.antilog_table[(lx + z) % go]
    out = np.where(z < 0, 0, out)
    out = np.where(y == 0, x, out)
    return np.where(x == 0, neg_many(fs, y), out)


def add_many(fs: FieldSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if fs.p == 2:
        return np.bitwise_xor(np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64))
    return sub_many(fs, x, neg_many(fs, y))


def elements(fs: FieldSpec) -> np.ndarray:
    return np.arange(fs.order, dtype=np.int64)
