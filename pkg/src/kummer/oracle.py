"""Brute-force verification of the invariant at desk scale.

Primitive isotropic classes of ``kummer_lattice(n)`` with bounded
coordinates are enumerated exactly, reduced to canonical representatives by
certified Mon^2 moves, and checked against the invariant.
"""

from __future__ import annotations

import functools
import os
import time
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import gcd
from typing import Iterator, Sequence

from . import intmat
from .eichler import reduce_cached, reduce_hyperbolic
from .invariant import (
    InvariantClass,
    admissible_divisibilities,
    base_change_check,
    canonical_embedding,
    expected_h_gram,
    find_b,
    h_lattice,
    sigma_classes,
    theta,
)
from .isometry import (
    Isometry,
    Reflection,
    Transvection,
    certified,
    find_root,
    identity,
)
from .lattice import (
    DomainError,
    IntLattice,
    LatticeError,
    LatticeVector,
    divisibility,
    kummer_index,
    kummer_lattice,
    mukai_lattice,
    pair,
)

__all__ = [
    "EnumerationConfig",
    "MoveWord",
    "ReductionError",
    "Report",
    "default_bound",
    "enumerate_isotropic",
    "iter_isotropic",
    "divisibility_census",
    "eichler_reduce",
    "canonical_vector",
    "verify_faithful",
    "verify_surjective",
    "verify_lemmas",
    "orbit_transporter",
]


class ReductionError(RuntimeError):
    """The reduction did not reach its canonical target (a bug, never expected)."""


@dataclass(frozen=True)
class EnumerationConfig:
    n: int
    bound: int
    d_filter: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if self.bound < 1:
            raise DomainError("bound must be >= 1")
        if self.d_filter is not None and self.d_filter < 1:
            raise DomainError("d_filter must be positive")


def default_bound(n: int) -> int:
    """Smallest bound (at least 5) containing a witness for the largest admissible d."""
    dmax = admissible_divisibilities(n)[-1]
    return max(5, dmax, (n + 1) // dmax)


# -- enumeration --------------------------------------------------------------

def _products(values: Sequence[int]) -> dict[int, list[tuple[int, int]]]:
    table: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for a in values:
        for b in values:
            table[a * b].append((a, b))
    return table


def _canonical_sign(x: tuple[int, ...]) -> bool:
    for c in x:
        if c:
            return c > 0
    return False


def _scan_c(n: int, bound: int, d: int | None, c: int) -> Iterator[tuple[int, ...]]:
    """All kept vectors with delta-coefficient ``c``, lazily."""
    step = d or 1
    # small values first so that lazy consumers see short vectors early
    vals = sorted((x for x in range(-bound, bound + 1) if x % step == 0), key=lambda x: (abs(x), -x))
    table = _products(vals)
    target = (n + 1) * c * c
    two_n2 = 2 * n + 2
    pairs = [(a, b, a * b, (a > 0) - (a < 0) or (b > 0) - (b < 0)) for a in vals for b in vals]
    for a1, b1, p1, s1 in pairs:
        if s1 < 0:
            continue
        for a2, b2, p2, s2 in pairs:
            if s1 == 0 and s2 < 0:
                continue
            for a3, b3 in table.get(target - p1 - p2, ()):
                x = (a1, b1, a2, b2, a3, b3, c)
                if not _canonical_sign(x):
                    continue
                if intmat.content(x) != 1:
                    continue
                if d is not None:
                    g = gcd(intmat.content(x[:6]), two_n2 * c)
                    if g != d:
                        continue
                yield x


def _c_values(n: int, bound: int) -> list[int]:
    # a_i b_i <= bound^2 in each of three planes
    return [c for c in range(-bound, bound + 1) if (n + 1) * c * c <= 3 * bound * bound]


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("KUMMER_THREADS", "1")))
    except ValueError:
        return 1


def enumerate_isotropic(cfg: EnumerationConfig) -> list[LatticeVector]:
    """Primitive isotropic vectors with ``|coords| <= bound``, one per ``+-`` pair, sorted.

    With ``d_filter`` only classes of that divisibility are returned.  Since
    the divisibility divides every coordinate of the ``U^3`` part, the scan is
    restricted to multiples of ``d_filter`` there.  The scan is partitioned by
    the delta-coefficient and may run on ``KUMMER_THREADS`` workers; the
    merged result is sorted, so the output never depends on the worker count.
    """
    lat = kummer_lattice(cfg.n)
    cs = _c_values(cfg.n, cfg.bound)
    def job(c):
        return list(_scan_c(cfg.n, cfg.bound, cfg.d_filter, c))

    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, cs))
    else:
        parts = [job(c) for c in cs]
    found = sorted(x for part in parts for x in part)
    return [LatticeVector(x, lat) for x in found]


def iter_isotropic(cfg: EnumerationConfig) -> Iterator[LatticeVector]:
    """Lazy, unsorted variant of :func:`enumerate_isotropic` (smallest ``|c|`` first)."""
    lat = kummer_lattice(cfg.n)
    for c in sorted(_c_values(cfg.n, cfg.bound), key=lambda c: (abs(c), -c)):
        for x in _scan_c(cfg.n, cfg.bound, cfg.d_filter, c):
            yield LatticeVector(x, lat)


# -- exact census -------------------------------------------------------------

def _mobius(k: int) -> int:
    res, p = 1, 2
    while p * p <= k:
        if k % p == 0:
            k //= p
            if k % p == 0:
                return 0
            res = -res
        p += 1
    return -res if k > 1 else res


@functools.lru_cache(maxsize=None)
def _box_counts(b: int):
    """``(P, P*P)`` for the box ``[-b, b]^2``, as dicts keyed by the product."""
    p = Counter(x * y for x in range(-b, b + 1) for y in range(-b, b + 1))
    p2: Counter = Counter()
    for s, cs in p.items():
        for t, ct in p.items():
            p2[s + t] += cs * ct
    return dict(p), dict(p2)


def _count_u3(b: int, target: int) -> int:
    """Number of ``x`` in ``[-b, b]^6`` with ``a1 b1 + a2 b2 + a3 b3 = target``."""
    p, p2 = _box_counts(b)
    return sum(cnt * p2.get(target - t, 0) for t, cnt in p.items())


def divisibility_census(n: int, bound: int) -> dict[int, int]:
    """Exact count of primitive isotropic classes (up to sign) by divisibility.

    Counts vectors of ``U^3`` with content exactly ``g`` by Mobius inversion
    over box counts, then attaches the delta-coefficient ``c``: the vector is
    primitive iff ``gcd(g, c) = 1`` and its divisibility is ``gcd(g, (2n+2) c)``.
    No vector is listed, so this reaches bounds where listing is infeasible.
    """
    if bound < 1:
        raise DomainError("bound must be >= 1")
    census: Counter = Counter()
    for c in _c_values(n, bound):
        target = (n + 1) * c * c
        exact: dict[int, int] = {}
        for g in range(bound, 0, -1):
            if target % (g * g):
                continue
            total = 0
            for k in range(1, bound // g + 1):
                gk = g * k
                mu = _mobius(k)
                if mu and target % (gk * gk) == 0:
                    total += mu * _count_u3(bound // gk, target // (gk * gk))
            if target == 0:
                # the zero U^3 part is counted once in each box; it has no content
                total -= sum(_mobius(k) for k in range(1, bound // g + 1))
            exact[g] = total
        for g, cnt in exact.items():
            if cnt and gcd(g, c) == 1:
                census[gcd(g, (2 * n + 2) * c)] += cnt
    return {d: cnt // 2 for d, cnt in sorted(census.items())}


# -- reduction ----------------------------------------------------------------

@dataclass(frozen=True)
class MoveWord:
    """An ordered word of move descriptors acting on ``lattice`` (first move first)."""

    lattice: IntLattice
    moves: tuple = ()

    def apply(self, x: Sequence[int]) -> tuple[int, ...]:
        g = self.lattice.gram
        x = tuple(x)
        for mv in self.moves:
            x = mv.apply(g, x)
        return x

    def isometries(self) -> list[Isometry]:
        return [mv.isometry(self.lattice) for mv in self.moves]

    def composite(self) -> Isometry:
        g = identity(self.lattice)
        for iso in self.isometries():
            g = iso @ g
        return g

    def inverse(self) -> "MoveWord":
        return MoveWord(self.lattice, tuple(mv.inverse() for mv in reversed(self.moves)))

    def certify(self) -> bool:
        """Every move individually lies in Mon^2."""
        return all(certified(mv, self.lattice) for mv in self.moves)

    def __len__(self):
        return len(self.moves)


def canonical_vector(n: int, d: int, b_residue: int) -> LatticeVector:
    """``d (e1 + m f1) + b delta`` with ``m = (n+1) b^2 / d^2``."""
    m = (n + 1) * b_residue * b_residue // (d * d)
    return kummer_lattice(n).vector((d, d * m, 0, 0, 0, 0, b_residue))


def eichler_reduce(alpha: LatticeVector, n: int | None = None
                   ) -> tuple[LatticeVector, MoveWord]:
    """Carry a primitive isotropic class to its canonical representative.

    The ``U^3`` part is reduced to ``d (e1 + m f1)`` by transvections inside
    the hyperbolic planes; ``E(f1, k delta)`` then shifts the
    delta-coefficient by ``d k`` and the reflection in ``delta`` fixes its
    sign.  Each of these lies in Mon^2.
    """
    lat = alpha.home
    m_n = kummer_index(lat)
    if m_n is None or (n is not None and n != m_n):
        raise DomainError("alpha must lie in kummer_lattice(n)")
    n = m_n
    x = alpha.coords
    if not any(x) or intmat.content(x) != 1 or pair(alpha, alpha):
        raise DomainError("alpha must be primitive and isotropic")
    d = intmat.content(x[:6])
    xi = tuple(c // d for c in x[:6])
    moves, _ = reduce_cached(xi, 3, lat.rank)
    moves = list(moves)
    b = x[6]
    r = b % d if d > 1 else 0
    if d > 1 and r > d - r:
        r -= d
    k = (r - b) // d
    if k:
        moves.append(Transvection((0, 1, 0, 0, 0, 0, 0), (0, 0, 0, 0, 0, 0, k)))
    if r < 0:
        moves.append(Reflection((0, 0, 0, 0, 0, 0, 1)))
    word = MoveWord(lat, tuple(moves))
    target = canonical_vector(n, d, abs(r))
    image = word.apply(x)
    if image != target.coords:
        raise ReductionError(
            f"reduction of {x} ended at {image}, expected {target.coords}; "
            f"word: {list(word.moves)}")
    return target, word


# -- reports ------------------------------------------------------------------

@dataclass
class Report:
    suite: str
    n: int
    bound: int | None
    classes_checked: int = 0
    failures: list = field(default_factory=list)
    elapsed_ms: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def vacuous(self) -> bool:
        return self.classes_checked == 0

    @property
    def ok(self) -> bool:
        return not self.failures and not self.vacuous

    def merge(self, other: "Report") -> "Report":
        details = dict(self.details)
        for k, v in other.details.items():
            if isinstance(v, list) and isinstance(details.get(k), list):
                details[k] = details[k] + v
            else:
                details[k] = v
        return Report(
            suite=self.suite, n=self.n, bound=self.bound,
            classes_checked=self.classes_checked + other.classes_checked,
            failures=self.failures + other.failures,
            elapsed_ms=self.elapsed_ms + other.elapsed_ms, details=details)

    def to_json(self) -> dict:
        out = {
            "suite": self.suite, "n": self.n, "bound": self.bound,
            "classes_checked": self.classes_checked,
            "failures": list(self.failures),
            "elapsed_ms": round(self.elapsed_ms, 3),
        }
        if self.vacuous:
            out["flag"] = "no classes"
        out.update(self.details)
        return out


def _finish(rep: Report, t0: float) -> Report:
    rep.elapsed_ms = (time.perf_counter() - t0) * 1000
    return rep


def verify_faithful(cfg: EnumerationConfig) -> Report:
    """Classes with equal invariant reduce to one target; different invariants to different ones."""
    t0 = time.perf_counter()
    rep = Report("faithful", cfg.n, cfg.bound)
    targets: dict[InvariantClass, set] = defaultdict(set)
    sizes: Counter = Counter()
    canon_theta: dict[tuple, InvariantClass] = {}
    for alpha in enumerate_isotropic(cfg):
        rep.classes_checked += 1
        try:
            inv = theta(alpha, cfg.n)
            canon, word = eichler_reduce(alpha, cfg.n)
            if not word.certify():
                rep.failures.append({"alpha": list(alpha), "error": "uncertified move"})
                continue
            if canon.coords not in canon_theta:
                canon_theta[canon.coords] = theta(canon, cfg.n)
            if canon_theta[canon.coords] != inv:
                rep.failures.append({"alpha": list(alpha), "error": "theta changed"})
        except (LatticeError, ReductionError, AssertionError) as exc:
            rep.failures.append({"alpha": list(alpha), "error": str(exc)})
            continue
        targets[inv].add(canon.coords)
        sizes[inv] += 1
    seen: dict[tuple, InvariantClass] = {}
    for inv, ts in targets.items():
        if len(ts) != 1:
            rep.failures.append({"invariant": inv.to_json(),
                                 "error": f"{len(ts)} canonical targets"})
        for t in ts:
            if t in seen and seen[t] != inv:
                rep.failures.append({"invariant": inv.to_json(),
                                     "error": f"target {list(t)} shared with {seen[t]}"})
            seen[t] = inv
    rep.details["groups"] = [
        {"invariant": inv.to_json(), "size": sizes[inv],
         "canonical": [list(t) for t in sorted(targets[inv])]}
        for inv in sorted(sizes, key=lambda i: (i.d, i.b_residue))
    ]
    return _finish(rep, t0)


def verify_surjective(n: int, d: int) -> Report:
    """Every class of ``sigma_classes(n, d)`` is hit by its explicit witness."""
    t0 = time.perf_counter()
    classes = sigma_classes(n, d)
    rep = Report("surjective", n, None)
    hits = []
    for cls in classes:
        rep.classes_checked += 1
        alpha = canonical_vector(n, d, cls.b_residue)
        try:
            got = theta(alpha, n)
        except (LatticeError, AssertionError) as exc:
            rep.failures.append({"class": cls.to_json(), "error": str(exc)})
            continue
        if got != cls:
            rep.failures.append({"class": cls.to_json(), "got": got.to_json()})
        hits.append({"class": cls.to_json(), "witness": list(alpha)})
    rep.details["d"] = d
    rep.details["hits"] = hits
    return _finish(rep, t0)


def verify_lemmas(cfg: EnumerationConfig) -> Report:
    """Per-class checks: d^2 | n+1, the H Gram and base change, integrality of b, roots of both signs."""
    t0 = time.perf_counter()
    rep = Report("lemmas", cfg.n, cfg.bound)
    emb = canonical_embedding(cfg.n)
    by_d: Counter = Counter()
    for alpha in enumerate_isotropic(cfg):
        rep.classes_checked += 1
        try:
            _check_lemmas(alpha, cfg.n, emb)
        except (LatticeError, AssertionError) as exc:
            rep.failures.append({"alpha": list(alpha), "error": str(exc)})
        by_d[divisibility(alpha)] += 1
    rep.details["by_d"] = {str(d): c for d, c in sorted(by_d.items())}
    return _finish(rep, t0)


def _check_lemmas(alpha: LatticeVector, n: int, emb) -> None:
    d = divisibility(alpha)
    if (n + 1) % (d * d):
        raise AssertionError(f"d^2 does not divide n+1 (d={d})")
    b = find_b(alpha, emb)
    ia = emb(alpha).coords
    if any((x - b * y) % d for x, y in zip(ia, emb.v.coords)):
        raise AssertionError("(iota(alpha) - b v)/d is not integral")
    gram = h_lattice(alpha, emb).gram()
    if gram != expected_h_gram(n, d, b):
        raise AssertionError(f"H Gram {gram}")
    if not base_change_check(d, b, gram):
        raise AssertionError("base change failed")
    for sign in (1, -1):
        u = find_root(alpha, sign)
        if pair(u, alpha) != 0 or pair(u, u) != 2 * sign:
            raise AssertionError(f"bad root for sign {sign}: {u.coords}")


# -- orbits of the Mukai lattice ----------------------------------------------

def _mukai_word(x: LatticeVector) -> MoveWord:
    moves, _ = reduce_hyperbolic(x.coords, 4, 8)
    return MoveWord(x.home, tuple(moves))


def orbit_transporter(v1: LatticeVector, v2: LatticeVector) -> Isometry:
    """An integral isometry ``g`` of the Mukai lattice with ``g(v1) = v2``.

    Both vectors are reduced to ``e1 + m f1`` (``2m`` their common square) by
    Eichler transvections; ``g`` is the first word followed by the inverse
    of the second.
    """
    lat = mukai_lattice()
    if v1.home != lat or v2.home != lat:
        raise LatticeError("orbit_transporter works in the Mukai lattice")
    for v in (v1, v2):
        if v.is_zero() or intmat.content(v.coords) != 1:
            raise DomainError("vectors must be primitive")
    if pair(v1, v1) != pair(v2, v2):
        raise DomainError("vectors have different squares")
    if v1 == v2:
        return identity(lat)
    w1 = _mukai_word(v1)
    w2 = _mukai_word(v2)
    g = MoveWord(lat, w1.moves + w2.inverse().moves).composite()
    if g(v1) != v2:
        raise ReductionError("transporter does not map v1 to v2")
    return g
