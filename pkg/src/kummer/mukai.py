"""Mukai vectors on an abelian surface and polarization-type arithmetic.

The even cohomology ``H^0 + H^2 + H^4`` is modeled as a rank-8 lattice with
basis ``(h0, e1, f1, e2, f2, e3, f3, h4)`` where the middle six span the
``U^3`` model of ``H^2`` and ``(h0, h4) = -1``.  With this choice the lattice
pairing is literally ``(c, c') - (r s' + s r')``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

from . import intmat
from .lattice import (
    DomainError,
    IntLattice,
    LatticeError,
    LatticeVector,
    Sublattice,
    hyperbolic_lattice,
    mukai_lattice,
    orthogonal_complement,
    pair,
)

__all__ = [
    "MukaiVector",
    "PolType",
    "cohomology_lattice",
    "to_mukai_lattice",
    "mukai_pair",
    "is_positive",
    "moduli_dimension",
    "perp_lattice",
    "bm_witness",
    "WitnessReport",
    "poltype_from_primitive_square",
    "dual_poltype",
    "complementary_poltype",
    "kummer_fibration_poltype",
    "bm_system_poltype",
]


@functools.lru_cache(maxsize=None)
def cohomology_lattice() -> IntLattice:
    g = [[0] * 8 for _ in range(8)]
    g[0][7] = g[7][0] = -1
    u3 = hyperbolic_lattice(3).gram
    for i in range(6):
        for j in range(6):
            g[i + 1][j + 1] = u3[i][j]
    return IntLattice(g, "H*(S)")


# h0 -> e4, h4 -> -f4, middle -> e1..f3
_TO_MUKAI = tuple(
    tuple(1 if (i == j - 1 and 1 <= j <= 6) else 0 for j in range(8)) for i in range(6)
) + ((1, 0, 0, 0, 0, 0, 0, 0), (0, 0, 0, 0, 0, 0, 0, -1))


def to_mukai_lattice(x: LatticeVector) -> LatticeVector:
    """Isometry ``H*(S) -> U^4`` sending ``h0 -> e4``, ``h4 -> -f4``."""
    if x.home != cohomology_lattice():
        raise LatticeError("lattice mismatch")
    return LatticeVector(intmat.matvec(_TO_MUKAI, x.coords), mukai_lattice())


def from_mukai_lattice(y: LatticeVector) -> LatticeVector:
    c = y.coords
    return LatticeVector((c[6],) + c[:6] + (-c[7],), cohomology_lattice())


@dataclass(frozen=True)
class MukaiVector:
    r: int
    c: tuple[int, ...]
    s: int

    def __post_init__(self):
        c = tuple(int(x) for x in self.c)
        if len(c) != 6:
            raise LatticeError("c must have 6 coordinates (e1, f1, e2, f2, e3, f3)")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "s", int(self.s))

    @classmethod
    def from_vector(cls, x: LatticeVector) -> "MukaiVector":
        if x.home != cohomology_lattice():
            raise LatticeError("lattice mismatch")
        return cls(x.coords[0], x.coords[1:7], x.coords[7])

    def vector(self) -> LatticeVector:
        return LatticeVector((self.r,) + self.c + (self.s,), cohomology_lattice())

    def is_primitive(self) -> bool:
        return intmat.content((self.r,) + self.c + (self.s,)) == 1

    def to_json(self) -> dict:
        return {"r": self.r, "c": list(self.c), "s": self.s}


def _u3_pair(c: Sequence[int], c2: Sequence[int]) -> int:
    return sum(c[2 * i] * c2[2 * i + 1] + c[2 * i + 1] * c2[2 * i] for i in range(3))


def mukai_pair(v: MukaiVector, w: MukaiVector) -> int:
    return _u3_pair(v.c, w.c) - (v.r * w.s + v.s * w.r)


def is_positive(v: MukaiVector, effective: bool | None = None) -> bool:
    """Positivity of a Mukai vector.

    For ``r = 0`` and ``c != 0`` effectivity of ``c`` is not decidable from
    the lattice, so the caller may pass ``effective``.  The default treats
    ``c`` as effective when ``(c, c) > 0`` and ``(c, e1 + f1) > 0``.
    """
    if v.r > 0:
        return True
    if v.r < 0:
        return False
    if any(v.c):
        if effective is None:
            effective = _u3_pair(v.c, v.c) > 0 and _u3_pair(v.c, (1, 1, 0, 0, 0, 0)) > 0
        return bool(effective) and v.s != 0
    return v.s < 0


def moduli_dimension(v: MukaiVector) -> int:
    q = mukai_pair(v, v)
    if q < 6:
        raise DomainError(f"(v,v) = {q} is below the threshold 6")
    return q - 2


def perp_lattice(v: MukaiVector) -> Sublattice:
    if not v.is_primitive():
        raise DomainError("v is not primitive")
    q = mukai_pair(v, v)
    if q < 6:
        raise DomainError(f"(v,v) = {q} is below the threshold 6")
    return orthogonal_complement(Sublattice(cohomology_lattice(), (v.vector(),)))


class PolType(tuple):
    """Polarization type ``(d1, ..., dm)`` with ``d_i | d_{i+1}``."""

    def __new__(cls, entries: Iterable[int]):
        t = tuple(int(x) for x in entries)
        if not t:
            raise DomainError("empty polarization type")
        if any(x < 1 for x in t):
            raise DomainError(f"entries must be positive: {t}")
        if any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise DomainError(f"divisibility chain violated: {t}")
        return super().__new__(cls, t)

    def __repr__(self):
        return f"PolType{tuple(self)}"

    def product(self) -> int:
        p = 1
        for x in self:
            p *= x
        return p

    def to_json(self) -> list[int]:
        return list(self)


def poltype_from_primitive_square(two_d: int) -> PolType:
    """Type of a primitive class of square ``two_d`` on an abelian surface."""
    if two_d <= 0 or two_d % 2:
        raise DomainError(f"need a positive even square, got {two_d}")
    return PolType((1, two_d // 2))


def dual_poltype(t: Sequence[int]) -> PolType:
    t = PolType(t)
    m = len(t)
    return PolType(t[0] * t[-1] // t[m - 1 - k] for k in range(m))


def complementary_poltype(t: Sequence[int], dim_a: int) -> PolType:
    t = PolType(t)
    if dim_a < len(t):
        raise DomainError("dim A >= dim B violated")
    return PolType((1,) * (dim_a - len(t)) + tuple(t))


def _check_n(n: int):
    if n < 2:
        raise DomainError(f"n must be >= 2 for polarization types, got {n}")


def kummer_fibration_poltype(n: int, d: int) -> PolType:
    _check_n(n)
    if d < 1 or (n + 1) % (d * d):
        raise DomainError(f"d^2 does not divide n+1 (n={n}, d={d})")
    return PolType((1,) * (n - 2) + (d, (n + 1) // d))


def bm_system_poltype(d1: int, d2: int, n: int) -> PolType:
    _check_n(n)
    if d1 < 1 or d2 % d1:
        raise DomainError(f"d1={d1} does not divide d2={d2}")
    if d1 * d2 != n + 1:
        raise DomainError(f"d1*d2 = {d1 * d2} != n+1 = {n + 1}")
    return complementary_poltype((d1, d2), n)


@dataclass
class WitnessReport:
    n: int
    d: int
    b: int
    s: int
    v_square: int
    divisibility: int
    direct_integral: bool
    invariant: object
    poltype: PolType
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "n": self.n, "d": self.d, "b": self.b, "s": self.s,
            "v_square": self.v_square, "divisibility": self.divisibility,
            "direct_integral": self.direct_integral,
            "invariant": self.invariant.to_json(),
            "poltype": list(self.poltype),
            "checks": dict(self.checks),
        }


def _embedding_for(v: MukaiVector, n: int):
    """A primitive embedding of ``kummer_lattice(n)`` onto ``v^perp`` (inside U^4)."""
    from .invariant import canonical_embedding
    from .oracle import orbit_transporter

    can = canonical_embedding(n)
    target_v = to_mukai_lattice(v.vector())
    g = orbit_transporter(can.v, target_v)
    emb = can.compose(g)
    assert emb.v == target_v
    return emb


def bm_witness(n: int, d: int, b: int) -> tuple[MukaiVector, MukaiVector, WitnessReport]:
    """The Mukai vector ``v = (0, d beta, s)`` and ``alpha = (0, 0, 1)`` for class (n, d, b)."""
    from .invariant import InvariantClass, normalize_residue, theta

    if n < 2:
        raise DomainError(f"need (v,v) = 2n+2 >= 6, i.e. n >= 2 (got n={n})")
    if d < 1 or (n + 1) % (d * d):
        raise DomainError(f"d^2 does not divide n+1 (n={n}, d={d})")
    if gcd(d, b) != 1:
        raise DomainError(f"gcd(d, b) = {gcd(d, b)} != 1")
    m = (n + 1) // (d * d)
    beta = (1, m, 0, 0, 0, 0)
    s = next(t for t in range(1, d + 1) if (t * b) % d == 1 % d)
    v = MukaiVector(0, tuple(d * x for x in beta), s)
    alpha = MukaiVector(0, (0,) * 6, 1)
    vv = mukai_pair(v, v)

    perp = perp_lattice(v)
    av = alpha.vector()
    div = intmat.content([pair(av, LatticeVector(row, av.home)) for row in perp.rows])

    direct = all(x % d == 0 for x in
                 (a - b * w for a, w in zip(av.coords, v.vector().coords)))

    emb = _embedding_for(v, n)
    alpha_n = emb.preimage(to_mukai_lattice(av))
    inv = theta(alpha_n, n, emb)
    expected = InvariantClass(n, d, normalize_residue(b, d))
    pol = kummer_fibration_poltype(n, d)

    checks = {
        "v_square": vv == 2 * n + 2,
        "alpha_in_perp": perp.contains(av),
        "perp_rank": perp.rank == 7,
        "divisibility": div == d,
        "direct_integral": direct,
        "invariant": inv == expected,
        "poltype": pol == bm_system_poltype(d, (n + 1) // d, n),
    }
    report = WitnessReport(n, d, b, s, vv, div, direct, inv, pol, checks)
    return v, alpha, report
