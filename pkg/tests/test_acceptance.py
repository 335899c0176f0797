"""Acceptance criteria.  Each criterion records one PASS/FAIL line, shown in the
terminal summary under "acceptance criteria"."""

import math
import random
import time

import pytest

from conftest import ACCEPTANCE_LINES
from kummer.invariant import InvariantClass, admissible_divisibilities, normalize_residue
from kummer.isometry import (
    PositiveTriple,
    Reflection,
    canonical_triple,
    find_root,
    identity,
    mon2_contains,
    orientation_sign,
    reflection,
    rho,
    w_contains,
)
from kummer.lattice import DomainError, divisibility, kummer_lattice, mukai_lattice, pair
from kummer.mukai import bm_system_poltype, bm_witness, kummer_fibration_poltype
from kummer.oracle import (
    EnumerationConfig,
    divisibility_census,
    enumerate_isotropic,
    iter_isotropic,
    verify_faithful,
    verify_lemmas,
    verify_surjective,
)
from randgen import random_isometry, random_move


def record(name: str, ok: bool, detail: str, limit: float | None = None, elapsed: float | None = None):
    if limit is not None and elapsed is not None:
        detail = f"{detail}; {elapsed:.2f}s (limit {limit:g}s)"
        ok = ok and elapsed < limit
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_c1_divisibility_census():
    t0 = time.perf_counter()
    bad = []
    for n in (2, 3, 7, 8, 15, 24):
        expected = [d for d in range(1, n + 2) if (n + 1) % (d * d) == 0]
        adm = admissible_divisibilities(n)
        if adm != expected:
            bad.append(f"n={n} admissible {adm}")
        bound = n + 2
        census = divisibility_census(n, bound)
        if sorted(census) != expected:
            bad.append(f"n={n} census keys {sorted(census)}")
        for d in expected:
            alpha = next(iter_isotropic(EnumerationConfig(n, bound, d)), None)
            if alpha is None or divisibility(alpha) != d:
                bad.append(f"n={n} d={d} not realized")
    record("C1 divisibility census", not bad, "; ".join(bad) or "all admissible d realized, no others",
           60, time.perf_counter() - t0)


def test_c2_poltype_formula():
    t0 = time.perf_counter()
    bad = []
    cases = 0
    for n in range(2, 25):
        for d in admissible_divisibilities(n):
            cases += 1
            p = kummer_fibration_poltype(n, d)
            if p != bm_system_poltype(d, (n + 1) // d, n) or math.prod(p) != n + 1 or len(p) != n:
                bad.append(f"(n={n}, d={d})")
    record("C2 polarization type formula", not bad, f"{cases} cases, mismatches {bad}",
           1, time.perf_counter() - t0)


def test_c3_welldefined_suite():
    t0 = time.perf_counter()
    reps = [verify_lemmas(EnumerationConfig(n, 5)) for n in (3, 8)]
    checked = sum(r.classes_checked for r in reps)
    failures = sum(len(r.failures) for r in reps)
    ok = all(r.ok for r in reps)
    record("C3 invariant lemma suite", ok, f"{checked} classes, {failures} failures",
           120, time.perf_counter() - t0)


def test_c4_roots_both_signs():
    t0 = time.perf_counter()
    checked = failures = 0
    for n in (3, 8):
        for alpha in enumerate_isotropic(EnumerationConfig(n, 5)):
            for sign in (1, -1):
                checked += 1
                try:
                    u = find_root(alpha, sign)
                    good = pair(u, alpha) == 0 and pair(u, u) == 2 * sign
                except Exception:  # any error counts as a failure
                    good = False
                failures += not good
    record("C4 roots of both signs", failures == 0, f"{checked} root searches, {failures} failures",
           elapsed=time.perf_counter() - t0)


def _norm2_seeds(n):
    lat = kummer_lattice(n)
    out = []
    for c in range(0, 3):
        out.append(lat.vector((1, 1 + (n + 1) * c * c, 0, 0, 0, 0, c)))
        if c:
            out.append(lat.vector((1, (n + 1) * c * c - 1, 0, 0, 0, 0, c)))
    for i in range(3):
        for s in (1, -1):
            out.append(lat.vector(tuple(1 if j == 2 * i else s if j == 2 * i + 1 else 0
                                        for j in range(7))))
    return out


def test_c5_membership_table():
    rng = random.Random(20240511)
    bad = []
    total = pairs = 0
    for n in (3, 8):
        lat = kummer_lattice(n)
        seeds = _norm2_seeds(n)
        by_norm: dict = {2: [], -2: []}
        for _ in range(120):
            g = random_isometry(rng, lat, 3, rng.randint(0, 8))
            u = g(rng.choice(seeds))
            q = pair(u, u)
            assert q in (2, -2)
            by_norm[q].append(u)
            total += 1
            r = rho(u)
            if not (r.integral and w_contains(r)):
                bad.append(f"rho not in W for {u.coords}")
            if mon2_contains(r):
                bad.append(f"rho in Mon2 for {u.coords}")
        for q, us in by_norm.items():
            for u in us[:40]:
                w = rng.choice(us)
                pairs += 1
                if not mon2_contains(rho(u) @ rho(w)):
                    bad.append(f"product not in Mon2: {u.coords}, {w.coords}")
    ok = not bad and total >= 200
    record("C5 monodromy membership table", ok,
           f"{total} vectors, {pairs} same-norm pairs, {len(bad)} mismatches")


def test_c6_faithful_and_surjective():
    t0 = time.perf_counter()
    bad = []
    checked = 0
    for n, d in ((3, 1), (3, 2), (7, 2), (8, 3), (24, 5)):
        f = verify_faithful(EnumerationConfig(n, n + 2, d))
        s = verify_surjective(n, d)
        checked += f.classes_checked
        if not f.ok:
            bad.append(f"faithful (n={n}, d={d}): {f.failures[:3]}")
        if not s.ok:
            bad.append(f"surjective (n={n}, d={d}): {s.failures[:3]}")
    record("C6 faithful and surjective", not bad,
           f"{checked} classes reduced with certified moves; {'; '.join(bad) or 'no failures'}",
           300, time.perf_counter() - t0)


def test_c7_witnesses():
    bad = []
    cases = 0
    for n in range(2, 25):
        for d in admissible_divisibilities(n):
            for b in sorted({normalize_residue(b, d) for b in range(d) if math.gcd(b, d) == 1}):
                cases += 1
                _, _, rep = bm_witness(n, d, b)
                expected = InvariantClass(n, d, b)
                if not (rep.ok and rep.v_square == 2 * n + 2 and rep.divisibility == d
                        and rep.invariant == expected
                        and tuple(rep.poltype) == (1,) * (n - 2) + (d, (n + 1) // d)):
                    bad.append(f"(n={n}, d={d}, b={b}): {rep.checks}")
    record("C7 Mukai vector witnesses", not bad, f"{cases} classes, {len(bad)} failures")


def _extra_triples(lat, rng):
    base = canonical_triple(lat)
    v = lat.vector
    pad = (0,) * (lat.rank - 6)
    fixed = [
        PositiveTriple(v((1, 2) + (0,) * 4 + pad), v((0, 0, 1, 1, 0, 0) + pad), v((0, 0, 0, 0, 2, 1) + pad)),
        PositiveTriple(v((1, 1, 1, 0, 0, 0) + pad), v((0, 0, 1, 1, 0, 0) + pad), v((0, 0, 0, 1, 3, 1) + pad)),
    ]
    g = random_isometry(rng, lat, 3, 6)
    moved = PositiveTriple(*(g(w) for w in base.vectors))
    return [base] + fixed + [moved]


def test_c8_orientation_consistency():
    rng = random.Random(7)
    lattices = [kummer_lattice(3), kummer_lattice(8)]
    triples = {lat: _extra_triples(lat, rng) for lat in lattices}
    disagreements = 0
    words = 0
    for i in range(1000):
        lat = lattices[i % len(lattices)]
        g = None
        expected = 1
        for _ in range(rng.randint(1, 10)):
            mv = random_move(rng, lat, 3)
            m = mv.isometry(lat)
            if isinstance(mv, Reflection):
                u = lat.vector(mv.u)
                rule = 1 if pair(u, u) < 0 else -1
                if orientation_sign(reflection(u)) != rule:
                    disagreements += 1
                expected *= rule
            g = m if g is None else m @ g
        words += 1
        signs = {int(orientation_sign(g, w)) for w in triples[lat]}
        if signs != {expected}:
            disagreements += 1
    record("C8 orientation consistency", disagreements == 0,
           f"{words} words, {len(next(iter(triples.values())))} triples each, {disagreements} disagreements")


def test_c8_orientation_needs_signature_three():
    with pytest.raises(DomainError):
        orientation_sign(identity(mukai_lattice()))
