"""Finite fields GF(p) and GF(2^m), plus the small dense linear algebra used
for decodability checks.

Elements are plain ints in canonical form: residues ``0..p-1`` for prime
fields, bit-vectors ``0..2^m-1`` (bit i = coefficient of x^i) for binary
extension fields.  Matrices are sequences of rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import FieldError

# Fixed reduction polynomials (bit m set).  Each is verified irreducible when
# a field is built, so a typo here cannot go unnoticed.
IRREDUCIBLE_POLYS = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2)[x] polynomials."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_mod(a: int, mod: int) -> int:
    dm = mod.bit_length() - 1
    while a and a.bit_length() - 1 >= dm:
        a ^= mod << (a.bit_length() - 1 - dm)
    return a


def is_irreducible_gf2(poly: int) -> bool:
    """Trial division by every polynomial of degree 1..deg/2."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for low in range(1 << d):
            if poly_mod(poly, (1 << d) | low) == 0:
                return False
    return True


@dataclass(frozen=True)
class Field:
    """Arithmetic context for one finite field."""

    kind: str  # "prime" | "gf2m"
    p: int = 0
    m: int = 0
    poly: int = 0
    _exp: tuple = field(default=(), repr=False, compare=False)
    _log: tuple = field(default=(), repr=False, compare=False)

    @property
    def order(self) -> int:
        return self.p if self.kind == "prime" else 1 << self.m

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == "prime" else 2

    @property
    def spec(self) -> str:
        return f"prime:{self.p}" if self.kind == "prime" else f"gf2m:{self.m}"

    def __str__(self) -> str:
        return f"GF({self.p})" if self.kind == "prime" else f"GF(2^{self.m})"

    zero = 0
    one = 1

    def elements(self) -> Iterator[int]:
        return iter(range(self.order))

    def check(self, a: int) -> int:
        if not isinstance(a, int) or not 0 <= a < self.order:
            raise FieldError(f"{a!r} is not a canonical element of {self}")
        return a

    def add(self, a: int, b: int) -> int:
        if self.kind == "prime":
            return (a + b) % self.p
        return a ^ b

    def neg(self, a: int) -> int:
        if self.kind == "prime":
            return (-a) % self.p
        return a

    def sub(self, a: int, b: int) -> int:
        if self.kind == "prime":
            return (a - b) % self.p
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if self.kind == "prime":
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        n = self.order - 1
        return self._exp[(self._log[a] + self._log[b]) % n]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self}")
        if self.kind == "prime":
            return pow(a, self.p - 2, self.p)
        n = self.order - 1
        return self._exp[(-self._log[a]) % n]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def from_int(self, k: int) -> int:
        """Image of the integer k under Z -> F (k * 1)."""
        if self.kind == "prime":
            return k % self.p
        return k & 1

    def dot(self, u: Sequence[int], v: Sequence[int]) -> int:
        acc = 0
        for a, b in zip(u, v):
            if a and b:
                acc = self.add(acc, self.mul(a, b))
        return acc

    def axpy(self, a: int, x: Sequence[int], y: Sequence[int]) -> list[int]:
        """a*x + y, coordinatewise."""
        if a == 0:
            return list(y)
        return [self.add(self.mul(a, xi), yi) for xi, yi in zip(x, y)]

    def scale(self, a: int, x: Sequence[int]) -> list[int]:
        return [self.mul(a, xi) for xi in x]


def _build_binary(m: int) -> Field:
    if m < 1 or m > 16:
        raise FieldError(f"GF(2^m) supported for 1 <= m <= 16, got m={m}")
    poly = IRREDUCIBLE_POLYS[m]
    if not is_irreducible_gf2(poly):
        raise FieldError(f"reduction polynomial {poly:#b} is reducible")
    q = 1 << m
    n = q - 1
    # find a generator of the multiplicative group
    for g in range(1, q):
        exp = [0] * n
        x = 1
        ok = True
        for k in range(n):
            if k and x == 1:
                ok = False
                break
            exp[k] = x
            x = poly_mod(clmul(x, g), poly)
        if ok and x == 1:
            break
    else:  # pragma: no cover - impossible for an irreducible poly
        raise FieldError("no multiplicative generator found")
    log = [0] * q
    for k, v in enumerate(exp):
        log[v] = k
    return Field("gf2m", m=m, poly=poly, _exp=tuple(exp), _log=tuple(log))


@lru_cache(maxsize=None)
def prime_field(p: int) -> Field:
    if not is_prime(p):
        raise FieldError(f"modulus {p} is not prime")
    return Field("prime", p=p)


@lru_cache(maxsize=None)
def binary_field(m: int) -> Field:
    return _build_binary(m)


def field_make(spec: str | Field) -> Field:
    """Build a field from ``prime:<p>`` or ``gf2m:<m>``."""
    if isinstance(spec, Field):
        return spec
    kind, _, arg = spec.partition(":")
    try:
        value = int(arg)
    except ValueError:
        raise FieldError(f"bad field spec {spec!r}") from None
    if kind == "prime":
        return prime_field(value)
    if kind == "gf2m":
        return binary_field(value)
    raise FieldError(f"bad field spec {spec!r}; expected prime:<p> or gf2m:<m>")


# ---------------------------------------------------------------------------
# linear algebra


def _check_rect(rows: Sequence[Sequence[int]], cols: int | None = None) -> int:
    if not rows:
        return cols or 0
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise FieldError("ragged matrix")
    if cols is not None and width != cols:
        raise FieldError(f"dimension mismatch: rows have {width} columns, expected {cols}")
    return width


def row_reduce(F: Field, rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form and pivot columns.

    Pivot rule: first column left to right, first row (in current order) with a
    nonzero entry in that column.
    """
    width = _check_rect(rows)
    mat = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(width):
        pr = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = F.inv(mat[r][c])
        mat[r] = F.scale(inv, mat[r])
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                mat[i] = F.axpy(F.neg(mat[i][c]), mat[r], mat[i])
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat, pivots


def rank(F: Field, rows: Sequence[Sequence[int]]) -> int:
    return len(row_reduce(F, rows)[1])


def det(F: Field, rows: Sequence[Sequence[int]]) -> int:
    n = len(rows)
    _check_rect(rows, n)
    mat = [list(r) for r in rows]
    d = 1
    for c in range(n):
        pr = next((i for i in range(c, n) if mat[i][c]), None)
        if pr is None:
            return 0
        if pr != c:
            mat[c], mat[pr] = mat[pr], mat[c]
            d = F.neg(d)
        d = F.mul(d, mat[c][c])
        inv = F.inv(mat[c][c])
        for i in range(c + 1, n):
            if mat[i][c]:
                mat[i] = F.axpy(F.neg(F.mul(mat[i][c], inv)), mat[c], mat[i])
    return d


def in_span(
    F: Field, target: Sequence[int], rows: Sequence[Sequence[int]]
) -> list[int] | None:
    """Coefficients c with sum_k c[k] * rows[k] == target, or None.

    Solved on the transposed system; free coefficients are set to zero, so the
    answer is deterministic.
    """
    n = len(target)
    _check_rect(rows, n)
    k = len(rows)
    if k == 0:
        return [] if not any(target) else None
    # augmented system: columns = rows, rhs = target
    aug = [[rows[j][i] for j in range(k)] + [target[i]] for i in range(n)]
    red, pivots = row_reduce(F, aug)
    if k in pivots:
        return None
    coeffs = [0] * k
    for r, c in enumerate(pivots):
        coeffs[c] = red[r][k]
    return coeffs


def combine(F: Field, coeffs: Sequence[int], rows: Sequence[Sequence[int]], width: int) -> list[int]:
    out = [0] * width
    for c, row in zip(coeffs, rows):
        out = F.axpy(c, row, out)
    return out


def unit(n: int, i: int) -> list[int]:
    v = [0] * n
    v[i] = 1
    return v
