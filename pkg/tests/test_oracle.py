import random

import pytest
from hypothesis import given, strategies as st

from kummer.invariant import theta
from kummer.isometry import Transvection, identity, mon2_contains, transvection
from kummer.lattice import DomainError, divisibility, kummer_lattice, mukai_lattice, pair
from kummer.oracle import (
    EnumerationConfig,
    MoveWord,
    default_bound,
    divisibility_census,
    eichler_reduce,
    enumerate_isotropic,
    iter_isotropic,
    orbit_transporter,
    verify_faithful,
    verify_lemmas,
    verify_surjective,
)
from randgen import random_isometry

K3 = kummer_lattice(3)

# brute-force counts over all 7 coordinates, computed independently
BRUTE_CENSUS = {
    (2, 2): {1: 1882},
    (3, 2): {1: 2090, 2: 174},
    (3, 3): {1: 9770, 2: 174},
    (7, 3): {1: 7154, 2: 60},
    (8, 3): {1: 7746, 3: 174},
    (15, 2): {1: 1034},
}


@pytest.mark.parametrize("key", sorted(BRUTE_CENSUS))
def test_enumeration_matches_brute_force(key):
    n, bound = key
    found = enumerate_isotropic(EnumerationConfig(n, bound))
    counts: dict = {}
    for a in found:
        counts[divisibility(a)] = counts.get(divisibility(a), 0) + 1
    assert dict(sorted(counts.items())) == BRUTE_CENSUS[key]
    assert divisibility_census(n, bound) == BRUTE_CENSUS[key]


@pytest.mark.parametrize("n,bound", [(3, 4), (8, 4), (24, 3), (15, 4)])
def test_census_matches_enumerator(n, bound):
    found = enumerate_isotropic(EnumerationConfig(n, bound))
    counts: dict = {}
    for a in found:
        counts[divisibility(a)] = counts.get(divisibility(a), 0) + 1
    assert divisibility_census(n, bound) == dict(sorted(counts.items()))


def test_enumeration_contract():
    found = enumerate_isotropic(EnumerationConfig(3, 2))
    coords = [a.coords for a in found]
    assert coords == sorted(coords)
    for a in found:
        assert pair(a, a) == 0
        assert next(c for c in a.coords if c) > 0
    assert len(set(coords)) == len(coords)


def test_d_filter_examples():
    assert enumerate_isotropic(EnumerationConfig(3, 1, 2)) == []
    found = [a.coords for a in enumerate_isotropic(EnumerationConfig(3, 2, 2))]
    assert (2, 2, 0, 0, 0, 0, 1) in found
    assert all(divisibility(K3.vector(x)) == 2 for x in found)


def test_thread_count_does_not_change_output(monkeypatch):
    cfg = EnumerationConfig(8, 3)
    base = enumerate_isotropic(cfg)
    monkeypatch.setenv("KUMMER_THREADS", "4")
    assert enumerate_isotropic(cfg) == base
    assert enumerate_isotropic(cfg) == base


def test_iter_isotropic_is_the_same_set():
    cfg = EnumerationConfig(7, 2)
    assert sorted(a.coords for a in iter_isotropic(cfg)) == [a.coords for a in enumerate_isotropic(cfg)]


def test_config_validation():
    with pytest.raises(DomainError):
        EnumerationConfig(3, 0)
    with pytest.raises(DomainError):
        EnumerationConfig(0, 3)


def test_default_bound():
    assert default_bound(3) == 5
    assert default_bound(24) == 5
    assert default_bound(48) == 7
    assert default_bound(99) == 10


def test_eichler_reduce_identity_on_canonical():
    canon, word = eichler_reduce(K3.vector((2, 2, 0, 0, 0, 0, 1)), 3)
    assert canon.coords == (2, 2, 0, 0, 0, 0, 1)
    assert len(word) == 0
    canon, word = eichler_reduce(K3.basis(0))
    assert canon == K3.basis(0) and len(word) == 0


def test_eichler_reduce_after_known_move():
    alpha = K3.vector((2, 2, 0, 0, 0, 0, 1))
    g = transvection(K3.basis(2), K3.vector((1, 0, 0, 0, 0, -1, 0)))
    assert mon2_contains(g)
    beta = g(alpha)
    assert beta != alpha
    c1, w1 = eichler_reduce(alpha)
    c2, w2 = eichler_reduce(beta)
    assert c1 == c2
    assert w2.certify()
    comp = w2.composite()
    assert mon2_contains(comp)
    assert comp(beta) == c2


def test_eichler_reduce_sign_and_shift():
    lat = kummer_lattice(24)
    # b = -2 at d = 5: shifted and reflected to b' = 2
    alpha = lat.vector((5, 20, 0, 0, 0, 0, -2))
    canon, word = eichler_reduce(alpha)
    assert canon.coords == (5, 20, 0, 0, 0, 0, 2)
    assert word.certify()
    alpha = lat.vector((5, 45, 0, 0, 0, 0, 3))
    assert pair(alpha, alpha) == 0
    canon, word = eichler_reduce(alpha)
    assert canon.coords == (5, 20, 0, 0, 0, 0, 2)
    assert word.certify() and word.composite()(alpha) == canon


def test_eichler_reduce_errors():
    with pytest.raises(DomainError):
        eichler_reduce(K3.vector((1, 1, 0, 0, 0, 0, 0)))
    with pytest.raises(DomainError):
        eichler_reduce(K3.basis(0), 4)


@given(st.integers(0, 2**31))
def test_reduction_words_are_monodromy(seed):
    rng = random.Random(seed)
    n = rng.choice([3, 8, 24])
    lat = kummer_lattice(n)
    alpha = rng.choice(enumerate_isotropic(EnumerationConfig(n, 2)) if n != 24
                       else [lat.vector((5, 5, 0, 0, 0, 0, 1)), lat.basis(0)])
    g = random_isometry(rng, lat, 3, rng.randint(0, 6), allow_reflections=False)
    beta = g(alpha)
    canon, word = eichler_reduce(beta)
    assert word.certify()
    comp = word.composite()
    assert comp.integral and mon2_contains(comp)
    assert comp(beta) == canon
    assert canon == eichler_reduce(alpha)[0]
    assert theta(canon) == theta(alpha)


def test_moveword_inverse():
    w = MoveWord(K3, (Transvection((0, 1, 0, 0, 0, 0, 0), (0, 0, 0, 0, 0, 0, 2)),
                      Transvection((1, 0, 0, 0, 0, 0, 0), (0, 0, 1, 0, 0, 0, 0))))
    x = (1, 2, 3, 4, 5, 6, 7)
    assert w.inverse().apply(w.apply(x)) == x
    assert (w.inverse().composite() @ w.composite()).matrix == identity(K3).matrix


def test_verify_faithful_small():
    rep = verify_faithful(EnumerationConfig(3, 3))
    assert rep.ok
    groups = {(g["invariant"]["d"], g["invariant"]["b"]): g for g in rep.details["groups"]}
    assert groups[(2, 1)]["canonical"] == [[2, 2, 0, 0, 0, 0, 1]]
    assert groups[(1, 0)]["canonical"] == [[1, 0, 0, 0, 0, 0, 0]]


def test_verify_surjective():
    rep = verify_surjective(3, 2)
    assert rep.ok and rep.details["hits"][0]["witness"] == [2, 2, 0, 0, 0, 0, 1]
    rep = verify_surjective(24, 5)
    assert rep.ok and rep.classes_checked == 2
    assert verify_surjective(10, 1).ok
    with pytest.raises(DomainError):
        verify_surjective(3, 3)


def test_verify_lemmas():
    rep = verify_lemmas(EnumerationConfig(3, 3))
    assert rep.ok and set(rep.details["by_d"]) == {"1", "2"}
    rep = verify_lemmas(EnumerationConfig(8, 3, 3))
    assert rep.ok and rep.details["by_d"] == {"3": 174}


def test_vacuous_report():
    rep = verify_lemmas(EnumerationConfig(3, 1, 2))
    assert rep.vacuous and not rep.ok
    assert rep.to_json()["flag"] == "no classes"
    assert set(rep.to_json()) >= {"suite", "n", "bound", "classes_checked", "failures", "elapsed_ms"}


def test_orbit_transporter_examples():
    lat = mukai_lattice()
    for n in (1, 3, 8):
        v1 = lat.vector((0, 0, 0, 0, 0, 0, 1, n + 1))
        v2 = lat.vector((1, n + 1, 0, 0, 0, 0, 0, 0))
        g = orbit_transporter(v1, v2)
        assert g.integral and g(v1) == v2
    assert orbit_transporter(v1, v1).matrix == identity(lat).matrix
    with pytest.raises(DomainError):
        orbit_transporter(v1, lat.vector((1, 1, 0, 0, 0, 0, 0, 0)))


@given(st.integers(0, 2**31))
def test_orbit_transporter_composed_with_g_fixes_v(seed):
    rng = random.Random(seed)
    lat = mukai_lattice()
    n = rng.randint(1, 30)
    v = lat.vector((0, 0, 0, 0, 0, 0, 1, n + 1))
    g = random_isometry(rng, lat, 4, rng.randint(1, 8))
    t = orbit_transporter(g(v), v)
    assert (t @ g)(v) == v
