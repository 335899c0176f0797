"""Integral lattices with a fixed ordered basis.

Basis conventions (all coordinates in this package use them):

* ``kummer_lattice(n)``: ``e1, f1, e2, f2, e3, f3, delta`` -- three
  hyperbolic planes followed by ``<-(2n+2)>``.
* ``mukai_lattice()``: ``e1, f1, e2, f2, e3, f3, e4, f4`` -- four hyperbolic
  planes.
* ``lnd_lattice(n, d)``: the two standard basis vectors of ``Z^2``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from . import intmat

__all__ = [
    "LatticeError",
    "DomainError",
    "DegenerateLatticeError",
    "IntLattice",
    "LatticeVector",
    "Sublattice",
    "DiscriminantGroup",
    "Signature",
    "pair",
    "hyperbolic_lattice",
    "kummer_lattice",
    "mukai_lattice",
    "lnd_lattice",
    "kummer_index",
    "divisibility",
    "is_primitive",
    "saturate",
    "orthogonal_complement",
    "discriminant_group",
    "signature",
]


class LatticeError(ValueError):
    """Base class for errors raised by this package."""


class DomainError(LatticeError):
    """An argument is outside the domain of the operation."""


class DegenerateLatticeError(LatticeError):
    pass


HYPERBOLIC = ((0, 1), (1, 0))


@dataclass(frozen=True)
class IntLattice:
    """A free Z-module with a symmetric integral Gram matrix."""

    gram: tuple[tuple[int, ...], ...]
    label: str = ""

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if n == 0 or any(len(row) != n for row in g):
            raise LatticeError("gram must be a nonempty square matrix")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(i)):
            raise LatticeError("gram must be symmetric")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @functools.cached_property
    def det(self) -> int:
        return intmat.det(self.gram)

    @property
    def is_degenerate(self) -> bool:
        return self.det == 0

    def vector(self, coords: Iterable[int]) -> "LatticeVector":
        return LatticeVector(tuple(coords), self)

    def basis(self, i: int) -> "LatticeVector":
        return LatticeVector(tuple(int(j == i) for j in range(self.rank)), self)

    def zero(self) -> "LatticeVector":
        return LatticeVector((0,) * self.rank, self)

    def to_json(self) -> dict:
        return {"label": self.label, "rank": self.rank,
                "gram": [list(r) for r in self.gram]}

    def __repr__(self):
        return f"IntLattice({self.label or self.gram!r})"


@dataclass(frozen=True)
class LatticeVector:
    """Integer coordinates relative to ``home``'s basis."""

    coords: tuple[int, ...]
    home: IntLattice = field(repr=False)

    def __post_init__(self):
        c = tuple(int(x) for x in self.coords)
        object.__setattr__(self, "coords", c)
        if len(c) != self.home.rank:
            raise LatticeError(
                f"expected {self.home.rank} coordinates, got {len(c)}")

    def _check(self, other: "LatticeVector"):
        if other.home is not self.home and other.home != self.home:
            raise LatticeError("lattice mismatch")

    def __add__(self, other):
        self._check(other)
        return LatticeVector(tuple(a + b for a, b in zip(self.coords, other.coords)), self.home)

    def __sub__(self, other):
        self._check(other)
        return LatticeVector(tuple(a - b for a, b in zip(self.coords, other.coords)), self.home)

    def __neg__(self):
        return LatticeVector(tuple(-a for a in self.coords), self.home)

    def __mul__(self, k: int):
        return LatticeVector(tuple(k * a for a in self.coords), self.home)

    __rmul__ = __mul__

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def is_zero(self) -> bool:
        return not any(self.coords)

    def norm(self) -> int:
        return pair(self, self)

    def to_json(self) -> list[int]:
        return list(self.coords)


def pair(x: LatticeVector, y: LatticeVector) -> int:
    """The bilinear form ``x^t G y``."""
    x._check(y)
    sp = intmat.sparse_rows(x.home.gram)
    yc = y.coords
    total = 0
    for i, xi in enumerate(x.coords):
        if xi:
            total += xi * sum(g * yc[j] for j, g in sp[i])
    return total


def _block_diagonal(blocks: Sequence[Sequence[Sequence[int]]]) -> tuple[tuple[int, ...], ...]:
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(b)
    return tuple(map(tuple, out))


def hyperbolic_lattice(k: int = 1) -> IntLattice:
    """``U^k`` with basis ``e1, f1, ..., ek, fk``."""
    if k < 1:
        raise DomainError("k must be >= 1")
    label = "U" if k == 1 else f"U^{k}"
    return IntLattice(_block_diagonal([HYPERBOLIC] * k), label)


@functools.lru_cache(maxsize=None)
def kummer_lattice(n: int) -> IntLattice:
    """``U^3 + <-(2n+2)>``, the lattice of a generalized Kummer 2n-fold."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return IntLattice(_block_diagonal([HYPERBOLIC] * 3 + [((-(2 * n + 2),),)]),
                      f"Lambda_{n}")


@functools.lru_cache(maxsize=None)
def mukai_lattice() -> IntLattice:
    """``U^4``, the Mukai lattice of an abelian surface."""
    return IntLattice(_block_diagonal([HYPERBOLIC] * 4), "Mukai")


def lnd_lattice(n: int, d: int) -> IntLattice:
    """The degenerate rank-2 lattice ``((2n+2)/d^2) * [[1, 0], [0, 0]]``."""
    if d < 1 or (2 * n + 2) % (d * d):
        raise DomainError(f"d^2 must divide 2n+2 (n={n}, d={d})")
    return IntLattice((((2 * n + 2) // (d * d), 0), (0, 0)), f"L_{{{n},{d}}}")


def kummer_index(lat: IntLattice) -> int | None:
    """Return n if ``lat`` has exactly the Gram matrix of ``kummer_lattice(n)``."""
    g = lat.gram
    if lat.rank != 7:
        return None
    last = g[6][6]
    if last >= -2 or last % 2:
        return None
    n = -last // 2 - 1
    return n if g == kummer_lattice(n).gram else None


def hyperbolic_planes(lat: IntLattice) -> int:
    """Number of leading standard hyperbolic blocks orthogonal to the rest."""
    g = lat.gram
    k = 0
    while 2 * k + 1 < lat.rank:
        i = 2 * k
        ok = g[i][i] == 0 and g[i + 1][i + 1] == 0 and g[i][i + 1] == 1
        ok = ok and all(g[i][j] == 0 and g[i + 1][j] == 0
                        for j in range(lat.rank) if j not in (i, i + 1))
        if not ok:
            break
        k += 1
    return k


def divisibility(x: LatticeVector) -> int:
    """gcd of the pairings of ``x`` with the basis; 0 for ``x = 0``."""
    xc = x.coords
    out = 0
    for row in intmat.sparse_rows(x.home.gram):
        out = gcd(out, sum(g * xc[j] for j, g in row))
        if out == 1:
            break
    return out


def is_primitive(x: LatticeVector) -> bool:
    c = intmat.content(x.coords)
    if c == 0:
        raise DomainError("zero vector")
    return c == 1


@dataclass(frozen=True)
class Sublattice:
    """The integer span of ``generators`` inside ``home``."""

    home: IntLattice
    generators: tuple[LatticeVector, ...]

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        for v in gens:
            if v.home != self.home:
                raise LatticeError("lattice mismatch")

    @classmethod
    def span(cls, home: IntLattice, rows: Iterable[Sequence[int]]) -> "Sublattice":
        return cls(home, tuple(LatticeVector(tuple(r), home) for r in rows))

    @property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        return tuple(v.coords for v in self.generators)

    @property
    def rank(self) -> int:
        return intmat.rank(self.rows) if self.generators else 0

    def hnf(self) -> tuple[tuple[int, ...], ...]:
        return intmat.hnf(self.rows)

    def gram(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(pair(a, b) for b in self.generators) for a in self.generators)

    def as_lattice(self, label: str = "") -> IntLattice:
        return IntLattice(self.gram(), label)

    def same_span(self, other: "Sublattice") -> bool:
        return self.home == other.home and self.hnf() == other.hnf()

    def contains(self, x: LatticeVector) -> bool:
        base = self.hnf()
        return intmat.hnf(base + (x.coords,)) == base

    def index_in(self, other: "Sublattice") -> int:
        """``[other : self]`` for ``self <= other`` of equal rank."""
        a = intmat.hnf(self.rows)
        b = intmat.hnf(other.rows)
        if len(a) != len(b):
            raise LatticeError("rank mismatch")
        # coordinates of self's basis in other's basis
        sol = _solve_rows(b, a)
        return abs(intmat.det(sol))

    def __repr__(self):
        return f"Sublattice({self.home.label}, {list(self.rows)})"


def _solve_rows(basis, rows):
    """Express each row of ``rows`` in terms of ``basis`` (rational)."""
    b = [list(map(Fraction, r)) for r in basis]
    k = len(b)
    # normal equations: x (B B^t) = r B^t
    bbt = intmat.matmul(b, intmat.transpose(b))
    inv = intmat.inverse(bbt)
    out = []
    for r in rows:
        rb = [sum(Fraction(x) * y for x, y in zip(r, bi)) for bi in b]
        out.append(tuple(intmat.normalize(sum(rb[j] * inv[j][i] for j in range(k)))
                         for i in range(k)))
    return tuple(out)


def saturate(s: Sublattice) -> Sublattice:
    """``span_Q(s) & home``, returned with an HNF basis."""
    n = s.home.rank
    rows = [r for r in s.rows if any(r)]
    if not rows:
        return Sublattice(s.home, ())
    kernel = intmat.integer_kernel(rows, n)
    if not kernel:
        basis = intmat.identity(n)
    else:
        basis = intmat.integer_kernel(kernel, n)
    return Sublattice.span(s.home, basis)


def orthogonal_complement(s: Sublattice) -> Sublattice:
    """All x with ``(x, g) = 0`` for every generator g; always saturated."""
    n = s.home.rank
    rows = [intmat.matvec(s.home.gram, r) for r in s.rows if any(r)]
    if not rows:
        return Sublattice.span(s.home, intmat.identity(n))
    return Sublattice.span(s.home, intmat.integer_kernel(rows, n))


@dataclass(frozen=True)
class DiscriminantGroup:
    """``L^dual / L`` as a product of cyclic groups.

    ``generator_lifts[i]`` is a vector of ``L (x) Q`` (in ``L``'s coordinates)
    whose class generates the factor of order ``cyclic_orders[i]``.
    """

    cyclic_orders: tuple[int, ...]
    generator_lifts: tuple[tuple[Fraction, ...], ...]

    @property
    def order(self) -> int:
        out = 1
        for c in self.cyclic_orders:
            out *= c
        return out

    @property
    def is_trivial(self) -> bool:
        return not self.cyclic_orders


@functools.lru_cache(maxsize=None)
def discriminant_group(lat: IntLattice) -> DiscriminantGroup:
    if lat.is_degenerate:
        raise DegenerateLatticeError("degenerate")
    diag, _, v = intmat.smith_form(lat.gram)
    orders, lifts = [], []
    for i, di in enumerate(diag):
        if di > 1:
            orders.append(di)
            lifts.append(tuple(intmat.normalize(Fraction(v[r][i], di))
                               for r in range(lat.rank)))
    return DiscriminantGroup(tuple(orders), tuple(lifts))


class Signature(tuple):
    """``(positive, negative)``; ``null`` holds the kernel dimension.

    Compares equal to a plain pair so ``signature(L) == (3, 4)`` works; for a
    degenerate lattice ``degenerate`` is set and ``positive + negative`` is
    less than the rank.
    """

    def __new__(cls, positive: int, negative: int, null: int = 0):
        obj = super().__new__(cls, (positive, negative))
        obj.null = null
        return obj

    @property
    def positive(self) -> int:
        return self[0]

    @property
    def negative(self) -> int:
        return self[1]

    @property
    def degenerate(self) -> bool:
        return self.null > 0


def congruence_diagonal(gram: Sequence[Sequence[int]]) -> list[Fraction]:
    """Diagonal entries of ``P^t G P`` for a rational invertible ``P``.

    Symmetric Gaussian elimination; no floating point.
    """
    n = len(gram)
    a = [[Fraction(x) for x in row] for row in gram]

    def add(dst, src, f):  # b_dst += f * b_src, applied to rows and columns
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
        for row in a:
            row[dst] += f * row[src]

    diag: list[Fraction] = []
    for k in range(n):
        if a[k][k] == 0:
            j = next((j for j in range(k + 1, n) if a[j][j] != 0), None)
            if j is not None:
                add(k, j, 1)
                if a[k][k] == 0:
                    add(k, j, 1)
            else:
                j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                if j is not None:
                    add(k, j, 1)
        p = a[k][k]
        diag.append(p)
        if p == 0:
            continue
        for i in range(k + 1, n):
            if a[i][k]:
                add(i, k, -a[i][k] / p)
    return diag


def signature(lat: IntLattice) -> Signature:
    diag = congruence_diagonal(lat.gram)
    pos = sum(1 for x in diag if x > 0)
    neg = sum(1 for x in diag if x < 0)
    return Signature(pos, neg, lat.rank - pos - neg)
