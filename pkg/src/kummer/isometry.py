"""Isometries: reflections, Eichler transvections, orientation and Mon^2.

An :class:`Isometry` stores the matrix whose j-th column is the image of
the j-th basis vector, so ``g(x) = M x`` on coordinate columns.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Sequence

from . import intmat
from .lattice import (
    DomainError,
    IntLattice,
    LatticeError,
    LatticeVector,
    congruence_diagonal,
    discriminant_group,
    hyperbolic_planes,
    kummer_index,
    pair,
    signature,
)

__all__ = [
    "Isometry",
    "OrientationSign",
    "PositiveTriple",
    "NotInWError",
    "Transvection",
    "Reflection",
    "identity",
    "reflection",
    "rho",
    "transvection",
    "discriminant_action",
    "chi",
    "orientation_sign",
    "canonical_triple",
    "w_contains",
    "mon2_contains",
    "find_root",
]


class NotInWError(LatticeError):
    pass


def gpair(gram, x: Sequence, y: Sequence):
    """``x^t G y`` on raw coordinate sequences; cheap when ``y`` is sparse."""
    sp = intmat.sparse_rows(gram)
    total = 0
    for j, yj in enumerate(y):
        if yj:
            total += yj * sum(g * x[i] for i, g in sp[j])
    return total


@dataclass(frozen=True)
class Isometry:
    """A rational matrix preserving ``home``'s form."""

    matrix: tuple[tuple, ...]
    home: IntLattice

    def __post_init__(self):
        m = tuple(tuple(intmat.normalize(Fraction(x) if isinstance(x, Fraction) else x)
                        for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        n = self.home.rank
        if len(m) != n or any(len(row) != n for row in m):
            raise LatticeError("isometry matrix has the wrong shape")
        g = self.home.gram
        if intmat.matmul(intmat.transpose(m), intmat.matmul(g, m)) != g:
            raise LatticeError("matrix does not preserve the form")

    @functools.cached_property
    def integral(self) -> bool:
        return all(isinstance(x, int) for row in self.matrix for x in row)

    @functools.cached_property
    def det(self):
        return intmat.det(self.matrix)

    def apply(self, coords: Sequence) -> tuple:
        return intmat.matvec(self.matrix, coords)

    def __call__(self, x: LatticeVector) -> LatticeVector:
        if x.home != self.home:
            raise LatticeError("lattice mismatch")
        image = self.apply(x.coords)
        if not all(isinstance(c, int) for c in image):
            raise LatticeError("image is not integral")
        return LatticeVector(image, self.home)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        """Composition ``self o other``."""
        if other.home != self.home:
            raise LatticeError("lattice mismatch")
        return Isometry(intmat.matmul(self.matrix, other.matrix), self.home)

    def inverse(self) -> "Isometry":
        # M^-1 = G^-1 M^t G for an isometry
        g = self.home.gram
        if self.home.is_degenerate:
            return Isometry(intmat.inverse(self.matrix), self.home)
        inv = intmat.matmul(intmat.inverse(g), intmat.matmul(intmat.transpose(self.matrix), g))
        return Isometry(inv, self.home)

    def __neg__(self) -> "Isometry":
        return Isometry(tuple(tuple(-x for x in row) for row in self.matrix), self.home)

    def to_json(self) -> list:
        def enc(x):
            f = Fraction(x)
            return [f.numerator, f.denominator]
        return [[enc(x) for x in row] for row in self.matrix]


def identity(lat: IntLattice) -> Isometry:
    return Isometry(intmat.identity(lat.rank), lat)


def reflection(u: LatticeVector) -> Isometry:
    """``R_u(x) = x - 2 (u,x)/(u,u) u``."""
    uu = pair(u, u)
    if uu == 0:
        raise DomainError("isotropic reflection vector")
    lat = u.home
    gu = intmat.matvec(lat.gram, u.coords)
    m = tuple(
        tuple(int(i == j) - Fraction(2 * u.coords[i] * gu[j], uu) for j in range(lat.rank))
        for i in range(lat.rank)
    )
    return Isometry(m, lat)


def rho(u: LatticeVector) -> Isometry:
    """The orientation-preserving reflection: ``R_u`` or ``-R_u``."""
    r = reflection(u)
    return r if pair(u, u) < 0 else -r


def transvection(e: LatticeVector, a: LatticeVector) -> Isometry:
    """Eichler transvection ``x + (x,e)a - (x,a)e - (a,a)/2 (x,e) e``.

    Requires ``e`` isotropic and ``a`` orthogonal to ``e``.
    """
    if pair(e, e) != 0:
        raise DomainError("transvection needs an isotropic e")
    if pair(e, a) != 0:
        raise DomainError("transvection needs (e, a) = 0")
    lat = e.home
    aa = pair(a, a)
    ge = intmat.matvec(lat.gram, e.coords)
    ga = intmat.matvec(lat.gram, a.coords)
    rows = []
    for i in range(lat.rank):
        row = []
        for j in range(lat.rank):
            x = (int(i == j) + ge[j] * a.coords[i] - ga[j] * e.coords[i]
                 - Fraction(aa * ge[j], 2) * e.coords[i])
            row.append(x)
        rows.append(tuple(row))
    g = Isometry(tuple(rows), lat)
    if not g.integral:
        raise DomainError("transvection is not integral on this lattice")
    return g


# -- lightweight move descriptors --------------------------------------------

@dataclass(frozen=True)
class Transvection:
    """Descriptor of ``transvection(e, a)`` on raw coordinates."""

    e: tuple[int, ...]
    a: tuple[int, ...]

    def apply(self, gram, x: Sequence[int]) -> tuple[int, ...]:
        xe = gpair(gram, x, self.e)
        if xe == 0:
            xa = gpair(gram, x, self.a)
            if xa == 0:
                return tuple(x)
            return tuple(xi - xa * ei for xi, ei in zip(x, self.e))
        xa = gpair(gram, x, self.a)
        aa = gpair(gram, self.a, self.a)
        c = xa + (aa * xe) // 2
        return tuple(xi + xe * ai - c * ei for xi, ai, ei in zip(x, self.a, self.e))

    def inverse(self) -> "Transvection":
        return Transvection(self.e, tuple(-x for x in self.a))

    def isometry(self, lat: IntLattice) -> Isometry:
        return _transvection_iso(self, lat)


@dataclass(frozen=True)
class Reflection:
    """Descriptor of ``reflection(u)``; only used where it is integral."""

    u: tuple[int, ...]

    def apply(self, gram, x: Sequence[int]) -> tuple[int, ...]:
        uu = gpair(gram, self.u, self.u)
        num = 2 * gpair(gram, x, self.u)
        if num % uu:
            raise LatticeError("reflection image is not integral")
        c = num // uu
        return tuple(xi - c * ui for xi, ui in zip(x, self.u))

    def inverse(self) -> "Reflection":
        return self

    def isometry(self, lat: IntLattice) -> Isometry:
        return _reflection_iso(self, lat)


@functools.lru_cache(maxsize=4096)
def _transvection_iso(move: Transvection, lat: IntLattice) -> Isometry:
    return transvection(LatticeVector(move.e, lat), LatticeVector(move.a, lat))


@functools.lru_cache(maxsize=256)
def _reflection_iso(move: Reflection, lat: IntLattice) -> Isometry:
    return reflection(LatticeVector(move.u, lat))


# -- discriminant action, orientation, group membership ----------------------

def discriminant_action(g: Isometry) -> int | None:
    """+1 / -1 if ``g`` fixes / negates the discriminant group, else None."""
    if not g.integral:
        raise LatticeError("discriminant action needs an integral isometry")
    dg = discriminant_group(g.home)
    plus = minus = True
    for y in dg.generator_lifts:
        gy = g.apply(y)
        plus = plus and all(Fraction(a - b).denominator == 1 for a, b in zip(gy, y))
        minus = minus and all(Fraction(a + b).denominator == 1 for a, b in zip(gy, y))
    if plus:
        return 1
    if minus:
        return -1
    return None


class OrientationSign(IntEnum):
    PRESERVING = 1
    REVERSING = -1


@dataclass(frozen=True)
class PositiveTriple:
    """Three vectors spanning a positive-definite 3-space."""

    w1: LatticeVector
    w2: LatticeVector
    w3: LatticeVector

    def __post_init__(self):
        g = self.gram()
        minors = (g[0][0], g[0][0] * g[1][1] - g[0][1] ** 2, intmat.det(g))
        if any(m <= 0 for m in minors):
            raise DomainError("triple does not span a positive-definite space")

    @property
    def vectors(self) -> tuple[LatticeVector, LatticeVector, LatticeVector]:
        return (self.w1, self.w2, self.w3)

    @property
    def home(self) -> IntLattice:
        return self.w1.home

    def gram(self):
        ws = self.vectors
        return tuple(tuple(pair(a, b) for b in ws) for a in ws)


@functools.lru_cache(maxsize=None)
def canonical_triple(lat: IntLattice) -> PositiveTriple:
    """``(e1+f1, e2+f2, e3+f3)`` when the lattice starts with ``U^3``.

    Otherwise a triple is searched among small integer vectors.
    """
    n = lat.rank
    if hyperbolic_planes(lat) >= 3:
        ws = []
        for i in range(3):
            c = [0] * n
            c[2 * i] = c[2 * i + 1] = 1
            ws.append(LatticeVector(tuple(c), lat))
        return PositiveTriple(*ws)
    candidates = []
    for i in range(n):
        candidates.append(tuple(int(k == i) for k in range(n)))
    for i in range(n):
        for j in range(i + 1, n):
            for s in (1, -1):
                candidates.append(tuple(int(k == i) + s * int(k == j) for k in range(n)))
    chosen: list[tuple[int, ...]] = []
    for c in candidates:
        trial = chosen + [c]
        g = [[gpair(lat.gram, a, b) for b in trial] for a in trial]
        if all(x > 0 for x in congruence_diagonal(g)):
            chosen = trial
            if len(chosen) == 3:
                return PositiveTriple(*(LatticeVector(v, lat) for v in chosen))
    raise DomainError("no positive-definite 3-space found among small vectors")


@functools.lru_cache(maxsize=None)
def _positive_index(lat: IntLattice) -> int:
    return signature(lat)[0]


def orientation_sign(g: Isometry, w: PositiveTriple | None = None) -> OrientationSign:
    """Action of ``g`` on the orientation of the positive cone.

    ``g`` maps the positive 3-space ``W`` to ``g(W)``; the orientation is the
    sign of the determinant of orthogonal projection back onto ``W``, i.e. the
    sign of ``det(W^t G g W)`` (``W^t G W`` is positive definite).
    """
    if _positive_index(g.home) != 3:
        raise DomainError("orientation needs a lattice of signature (3, *)")
    if w is None:
        w = canonical_triple(g.home)
    gram = g.home.gram
    images = [g.apply(v.coords) for v in w.vectors]
    m = [[gpair(gram, a.coords, b) for b in images] for a in w.vectors]
    d = intmat.det(m)
    if d == 0:
        raise AssertionError("projection of g(W) onto W is singular")
    return OrientationSign.PRESERVING if d > 0 else OrientationSign.REVERSING


def w_contains(g: Isometry, w: PositiveTriple | None = None) -> bool:
    """Membership in W: integral, orientation preserving, +-1 on the discriminant."""
    if not g.integral:
        return False
    if orientation_sign(g, w) != OrientationSign.PRESERVING:
        return False
    return discriminant_action(g) is not None


def chi(g: Isometry) -> int:
    if not w_contains(g):
        raise NotInWError("not in W")
    return discriminant_action(g)


def mon2_contains(g: Isometry) -> bool:
    """Membership in ``Mon^2`` for the generalized Kummer lattice."""
    if kummer_index(g.home) is None:
        raise DomainError("mon2_contains is only defined on kummer_lattice(n)")
    if not w_contains(g):
        return False
    return chi(g) * g.det == 1


@functools.lru_cache(maxsize=8192)
def certified(move, lat: IntLattice) -> bool:
    """``mon2_contains`` of a move descriptor, memoized per distinct move."""
    return mon2_contains(move.isometry(lat))


def find_root(alpha: LatticeVector, sign: int) -> LatticeVector:
    """A vector u with ``(u, alpha) = 0`` and ``(u, u) = 2 * sign``.

    The ``U^3`` part of ``alpha`` is Eichler-reduced to ``k(e1 + m f1)`` and
    ``e3 + sign * f3`` is pulled back along the reduction.
    """
    from .eichler import reduce_cached

    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    lat = alpha.home
    n = kummer_index(lat)
    if n is None:
        raise DomainError("find_root expects a vector of kummer_lattice(n)")
    if alpha.is_zero() or intmat.content(alpha.coords) != 1 or pair(alpha, alpha):
        raise DomainError("alpha must be primitive and isotropic")
    u_part = alpha.coords[:6]
    k = intmat.content(u_part)
    xi = tuple(c // k for c in u_part)
    moves, _ = reduce_cached(xi, 3, lat.rank)
    u = (0, 0, 0, 0, 1, sign, 0)
    for mv in reversed(moves):
        u = mv.inverse().apply(lat.gram, u)
    return LatticeVector(u, lat)
