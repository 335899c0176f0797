"""The monodromy invariant of primitive isotropic classes.

For a primitive isotropic ``alpha`` in ``kummer_lattice(n)`` and a primitive
embedding ``iota`` into the Mukai lattice with ``iota(Lambda)^perp = <v>``,
the invariant is the isometry class of the pointed rank-2 lattice
``(sat<iota(alpha), v>, v)``.  It is encoded by ``(n, d, b_residue)`` where
``d = Div(alpha)`` and ``b_residue`` is the representative of ``{+-b mod d}``
in ``[0, d/2]``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from math import gcd, isqrt

from . import intmat
from .lattice import (
    DomainError,
    IntLattice,
    LatticeError,
    LatticeVector,
    Sublattice,
    divisibility,
    kummer_index,
    kummer_lattice,
    mukai_lattice,
    orthogonal_complement,
    pair,
    saturate,
)

__all__ = [
    "PrimEmbedding",
    "Decomposition",
    "InvariantClass",
    "normalize_residue",
    "canonical_embedding",
    "decompose",
    "find_b",
    "h_lattice",
    "base_change_matrix",
    "base_change_check",
    "theta",
    "admissible_divisibilities",
    "sigma_classes",
]


def normalize_residue(b: int, d: int) -> int:
    """Representative of ``{b, -b} mod d`` in ``[0, d/2]``."""
    r = b % d
    return min(r, d - r) if d > 1 else 0


@dataclass(frozen=True)
class InvariantClass:
    n: int
    d: int
    b_residue: int

    def __post_init__(self):
        if self.d < 1:
            raise DomainError("d must be positive")
        if (self.n + 1) % (self.d * self.d):
            raise DomainError(f"d^2 does not divide n+1 (n={self.n}, d={self.d})")
        if self.b_residue != normalize_residue(self.b_residue, self.d):
            raise DomainError("b_residue is not normalized")
        if self.d > 1 and gcd(self.d, self.b_residue) != 1:
            raise DomainError("b_residue must be coprime to d")

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.d, "b": self.b_residue}

    def __str__(self):
        return f"({self.n},{self.d},{self.b_residue})"


@dataclass(frozen=True)
class PrimEmbedding:
    """Primitive isometric embedding ``source -> target``.

    ``matrix`` has one row per target coordinate and one column per source
    basis vector; ``v`` generates the orthogonal complement of the image.
    """

    source: IntLattice
    target: IntLattice
    matrix: tuple[tuple[int, ...], ...]
    v: LatticeVector

    def __post_init__(self):
        m = tuple(tuple(int(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        if len(m) != self.target.rank or any(len(r) != self.source.rank for r in m):
            raise LatticeError("embedding matrix has the wrong shape")
        mt = intmat.transpose(m)
        if intmat.matmul(mt, intmat.matmul(self.target.gram, m)) != self.source.gram:
            raise LatticeError("embedding is not isometric")
        if self.v.home != self.target:
            raise LatticeError("v must live in the target lattice")

    def __call__(self, x: LatticeVector) -> LatticeVector:
        if x.home != self.source:
            raise LatticeError("lattice mismatch")
        xc = x.coords
        return LatticeVector(
            tuple(sum(m * xc[j] for j, m in row) for row in intmat.sparse_rows(self.matrix)),
            self.target)

    def image(self) -> Sublattice:
        return Sublattice.span(self.target, intmat.transpose(self.matrix))

    def is_primitive(self) -> bool:
        img = self.image()
        return saturate(img).same_span(img)

    def complement_ok(self) -> bool:
        comp = orthogonal_complement(self.image())
        return comp.same_span(Sublattice(self.target, (self.v,)))

    def preimage(self, y: LatticeVector) -> LatticeVector:
        """The x with ``self(x) = y``; raises if ``y`` is not in the image."""
        m = self.matrix
        rows = intmat.transpose(m)
        # least squares on the (injective) map, then check exactness
        mtm = intmat.matmul(rows, m)
        rhs = intmat.matvec(rows, y.coords)
        x = intmat.matvec(intmat.inverse(mtm), rhs)
        if not all(isinstance(c, int) for c in x) or intmat.matvec(m, x) != y.coords:
            raise LatticeError("vector is not in the image of the embedding")
        return LatticeVector(x, self.source)

    def compose(self, g) -> "PrimEmbedding":
        """``g o self`` for an integral isometry ``g`` of the target."""
        if not g.integral:
            raise LatticeError("need an integral isometry")
        return PrimEmbedding(self.source, self.target,
                             intmat.matmul(g.matrix, self.matrix), g(self.v))

    def to_json(self) -> dict:
        return {"source": self.source.to_json(), "target": self.target.to_json(),
                "matrix": [list(r) for r in self.matrix], "v": list(self.v.coords)}


@functools.lru_cache(maxsize=None)
def canonical_embedding(n: int) -> PrimEmbedding:
    """``e_i, f_i -> e_i, f_i`` (i <= 3), ``delta -> e4 - (n+1) f4``; ``v = e4 + (n+1) f4``."""
    src = kummer_lattice(n)
    tgt = mukai_lattice()
    cols = [tuple(int(i == j) for i in range(8)) for j in range(6)]
    cols.append((0, 0, 0, 0, 0, 0, 1, -(n + 1)))
    v = LatticeVector((0, 0, 0, 0, 0, 0, 1, n + 1), tgt)
    return PrimEmbedding(src, tgt, intmat.transpose(cols), v)


@dataclass(frozen=True)
class Decomposition:
    """``alpha = d * xi + b * delta`` with ``xi`` primitive in ``U^3``."""

    d: int
    xi: LatticeVector
    b: int

    def reconstruct(self) -> LatticeVector:
        lat = self.xi.home
        delta = lat.basis(6)
        return self.xi * self.d + delta * self.b


def _check_alpha(alpha: LatticeVector) -> int:
    n = kummer_index(alpha.home)
    if n is None:
        raise DomainError("expected a vector of kummer_lattice(n)")
    if alpha.is_zero() or intmat.content(alpha.coords) != 1:
        raise DomainError("alpha is not primitive")
    q = pair(alpha, alpha)
    if q:
        raise DomainError(f"not isotropic, (alpha,alpha) = {q}")
    return n


def decompose(alpha: LatticeVector) -> Decomposition:
    n = _check_alpha(alpha)
    d = divisibility(alpha)
    u_part = alpha.coords[:6]
    k = intmat.content(u_part)
    if k != d:
        raise AssertionError(f"Div(alpha)={d} differs from U^3 content {k}")
    b = alpha.coords[6]
    if gcd(d, b) != 1:
        raise AssertionError("gcd(d, b) != 1 for a primitive class")
    if (n + 1) % (d * d):
        raise AssertionError(f"d^2 does not divide n+1 for alpha={alpha.coords}")
    xi = LatticeVector(tuple(c // d for c in u_part) + (0,), alpha.home)
    return Decomposition(d, xi, b)


def _emb_for(alpha: LatticeVector, emb: PrimEmbedding | None) -> PrimEmbedding:
    n = kummer_index(alpha.home)
    if emb is None:
        return canonical_embedding(n)
    if emb.source != alpha.home:
        raise LatticeError("embedding source does not match alpha")
    return emb


def find_b(alpha: LatticeVector, emb: PrimEmbedding | None = None) -> int:
    """An integer b, coprime to d, with ``(iota(alpha) - b v) / d`` integral.

    Returns the delta-coefficient from :func:`decompose` when it qualifies
    (always the case for the canonical embedding), otherwise the least
    qualifying residue.
    """
    dec = decompose(alpha)
    emb = _emb_for(alpha, emb)
    d = dec.d
    ia = emb(alpha).coords
    v = emb.v.coords

    def ok(b):
        return all((x - b * y) % d == 0 for x, y in zip(ia, v))

    if ok(dec.b):
        return dec.b
    for b in range(d):
        if gcd(b, d) == 1 and ok(b):
            return b
    raise AssertionError("no integer b makes (iota(alpha) - b v)/d integral")


def _minor_content(r1, r2) -> int:
    """gcd of the 2x2 minors; 1 iff the rank-2 span of ``r1, r2`` is saturated."""
    g = 0
    for i in range(len(r1)):
        for j in range(i + 1, len(r1)):
            g = gcd(g, r1[i] * r2[j] - r1[j] * r2[i])
            if g == 1:
                return 1
    return g


def _h_basis(alpha: LatticeVector, emb: PrimEmbedding, generic: bool = False):
    d = divisibility(alpha)
    b = find_b(alpha, emb)
    ia = emb(alpha)
    v = emb.v
    u = LatticeVector(tuple((b * y - x) // d for x, y in zip(ia.coords, v.coords)), emb.target)
    if _minor_content(v.coords, u.coords) != 1:
        raise AssertionError("<v, u> is not saturated")
    h = Sublattice(emb.target, (v, u))
    if generic and not h.same_span(saturate(Sublattice(emb.target, (ia, v)))):
        raise AssertionError("<v, u> is not the saturation of <iota(alpha), v>")
    return d, b, h


def h_lattice(alpha: LatticeVector, emb: PrimEmbedding | None = None,
              generic: bool = False) -> Sublattice:
    """``sat<iota(alpha), v>`` returned in the basis ``(v, u)``, ``u = (b v - iota(alpha))/d``.

    ``<v, u>`` contains ``iota(alpha)`` and ``v``; it equals the saturation
    exactly when its 2x2 minors are coprime.  ``generic=True`` additionally
    compares against a kernel-based saturation.
    """
    return _h_basis(alpha, _emb_for(alpha, emb), generic)[2]


def base_change_matrix(d: int, b: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """``A = [[i, j], [b, -d]]`` with ``i d + j b = 1``; ``det A = -1``."""
    g, i, j = intmat.xgcd(d, b)
    if g != 1:
        raise DomainError(f"gcd(d, b) = {g} != 1")
    return ((i, j), (b, -d))


def base_change_check(d: int, b: int, G) -> bool:
    """Check that ``A`` carries ``G`` to ``((2n+2)/d^2) * [[1,0],[0,0]]``.

    ``G`` is the Gram matrix of ``H`` in the basis ``(v, u)``, so
    ``G = s * (d, b)^t (d, b)`` with ``s = (v,v)/d^2``.  Since ``A (d, b)^t =
    (1, 0)^t`` the congruence that realizes the base change is ``A G A^t``
    (new basis vectors are the rows of ``A``), and the check is exact.
    """
    a = base_change_matrix(d, b)
    if a[0][0] * a[1][1] - a[0][1] * a[1][0] != -1:
        return False
    G = tuple(tuple(r) for r in G)
    vv = G[0][0]
    if vv % (d * d):
        return False
    s = vv // (d * d)
    return intmat.matmul(a, intmat.matmul(G, intmat.transpose(a))) == ((s, 0), (0, 0))


def expected_h_gram(n: int, d: int, b: int):
    s = (2 * n + 2) // (d * d)
    return ((s * d * d, s * b * d), (s * b * d, s * b * b))


def theta(alpha: LatticeVector, n: int | None = None,
          emb: PrimEmbedding | None = None) -> InvariantClass:
    """The invariant of ``alpha``, validated through the rank-2 lattice H."""
    m = _check_alpha(alpha)
    if n is not None and n != m:
        raise DomainError(f"alpha lives in kummer_lattice({m}), not n={n}")
    d, b, h = _h_basis(alpha, _emb_for(alpha, emb))
    gram = h.gram()
    if gram != expected_h_gram(m, d, b):
        raise AssertionError(f"unexpected H Gram {gram}")
    if not base_change_check(d, b, gram):
        raise AssertionError("base change to L_{n,d} failed")
    return InvariantClass(m, d, normalize_residue(b, d))


def admissible_divisibilities(n: int) -> list[int]:
    """All d >= 1 with d^2 | n+1."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return [d for d in range(1, isqrt(n + 1) + 1) if (n + 1) % (d * d) == 0]


def sigma_classes(n: int, d: int) -> list[InvariantClass]:
    """Every normalized class ``(n, d, r)``: r coprime to d, taken up to sign."""
    if d < 1 or (n + 1) % (d * d):
        raise DomainError(f"d^2 does not divide n+1 (n={n}, d={d})")
    if d == 1:
        return [InvariantClass(n, 1, 0)]
    return [InvariantClass(n, d, r) for r in range(1, d // 2 + 1) if gcd(r, d) == 1]
