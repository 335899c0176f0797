"""Random lattice data for property tests."""

import random

from kummer.isometry import Isometry, Reflection, Transvection, identity
from kummer.lattice import IntLattice, LatticeVector


def unit(rank, i, c=1):
    return tuple(c if j == i else 0 for j in range(rank))


def random_move(rng: random.Random, lat: IntLattice, planes: int, allow_reflections=True):
    """A random transvection between hyperbolic-plane basis vectors (or with the tail),
    or a reflection in a norm +-2 vector of a plane."""
    rank = lat.rank
    kind = rng.random()
    if allow_reflections and kind < 0.25:
        i = rng.randrange(planes)
        s = rng.choice((1, -1))
        u = tuple((1 if j == 2 * i else s if j == 2 * i + 1 else 0) for j in range(rank))
        return Reflection(u)
    p = rng.randrange(planes)
    e = unit(rank, 2 * p + rng.randrange(2))
    others = [j for j in range(rank) if j // 2 != p or j >= 2 * planes]
    a = unit(rank, rng.choice(others), rng.choice((-2, -1, 1, 2)))
    return Transvection(e, a)


def random_isometry(rng: random.Random, lat: IntLattice, planes: int, length: int,
                    allow_reflections=True) -> Isometry:
    g = identity(lat)
    for _ in range(length):
        g = random_move(rng, lat, planes, allow_reflections).isometry(lat) @ g
    return g


def random_vector(rng: random.Random, lat: IntLattice, bound: int = 4) -> LatticeVector:
    return LatticeVector(tuple(rng.randint(-bound, bound) for _ in range(lat.rank)), lat)
