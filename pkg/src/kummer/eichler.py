"""Constructive Eichler reduction inside leading hyperbolic planes.

A primitive vector of ``U^k`` (k >= 3) is carried to ``e1 + m f1`` by a word
of Eichler transvections ``E(e, c*w)`` whose ``e`` and ``w`` are basis vectors
of the hyperbolic planes.  Such transvections fix the orthogonal complement
of ``U^k`` pointwise, so the same word acts on a larger lattice
``U^k + M`` without touching the ``M`` coordinates.

Coordinates of plane ``i`` are ``a_i`` (coefficient of ``e_i``, index 2i)
and ``b_i`` (coefficient of ``f_i``, index 2i+1); ``(x, e_i) = b_i`` and
``(x, f_i) = a_i``.
"""

from __future__ import annotations

import functools
from typing import Sequence

from .isometry import Transvection

__all__ = ["reduce_hyperbolic", "reduce_cached", "apply_word"]


@functools.lru_cache(maxsize=None)
def _unit(rank: int, i: int, c: int = 1) -> tuple[int, ...]:
    return tuple(c if j == i else 0 for j in range(rank))


def reduce_hyperbolic(y: Sequence[int], k: int, rank: int
                      ) -> tuple[list[Transvection], list[int]]:
    """Reduce the primitive ``U^k`` vector ``y`` (length 2k) to ``e1 + m f1``.

    Returns ``(moves, reduced)``: the transvections in application order
    (expressed in a lattice of rank ``rank`` whose first 2k coordinates are
    the planes) and the reduced ``U^k`` coordinates.
    """
    if k < 3:
        raise ValueError("need at least three hyperbolic planes")
    y = list(y)
    if len(y) != 2 * k:
        raise ValueError("length mismatch")
    if not any(y):
        raise ValueError("zero vector")
    moves: list[Transvection] = []

    # E(f_p, c e_q): a_q += c a_p, b_p -= c b_q
    def ef(p, q, c):
        if c:
            y[2 * q] += c * y[2 * p]
            y[2 * p + 1] -= c * y[2 * q + 1]
            moves.append(Transvection(_unit(rank, 2 * p + 1), _unit(rank, 2 * q, c)))

    # E(e_j, c e_m): a_m += c b_j, a_j -= c b_m
    def ee(j, m, c):
        if c:
            y[2 * m] += c * y[2 * j + 1]
            y[2 * j] -= c * y[2 * m + 1]
            moves.append(Transvection(_unit(rank, 2 * j), _unit(rank, 2 * m, c)))

    # E(f_p, c f_q): b_q += c a_p, b_p -= c a_q
    def ff(p, q, c):
        if c:
            y[2 * q + 1] += c * y[2 * p]
            y[2 * p + 1] -= c * y[2 * q]
            moves.append(Transvection(_unit(rank, 2 * p + 1), _unit(rank, 2 * q + 1, c)))

    while True:
        if not any(y[2 * i] for i in range(k)):
            j = next(i for i in range(k) if y[2 * i + 1])
            ee(j, (j + 1) % k, 1)
        # Euclid on the a-coordinates
        while True:
            nz = [i for i in range(k) if y[2 * i]]
            if len(nz) == 1:
                break
            p = min(nz, key=lambda i: abs(y[2 * i]))
            for q in nz:
                if q != p:
                    ef(p, q, -(y[2 * q] // y[2 * p]))
        p = nz[0]
        g = abs(y[2 * p])
        if g == 1:
            break
        j = next((i for i in range(k) if i != p and y[2 * i + 1] % g), None)
        if j is not None:
            m = next(i for i in range(k) if i not in (p, j))
            ee(j, m, 1)
            continue
        if y[2 * p + 1] % g == 0:
            raise ValueError("vector is not primitive")
        q = (p + 1) % k
        ef(p, q, 1)
        ef(q, p, -1)

    # move the unit a-coordinate to plane 0 with a positive sign
    if p == 0 and y[0] == -1:
        ef(0, 1, -1)
        ef(1, 0, 1)
        p = 1
    if p != 0:
        ef(p, 0, y[2 * p])
        ef(0, p, -y[2 * p])
    for j in range(1, k):
        ef(0, j, -y[2 * j])
        ff(0, j, -y[2 * j + 1])
    assert y[0] == 1 and not any(y[2:]), y
    return moves, y


@functools.lru_cache(maxsize=2048)
def reduce_cached(y: tuple[int, ...], k: int, rank: int):
    """Memoized :func:`reduce_hyperbolic` returning tuples."""
    moves, red = reduce_hyperbolic(y, k, rank)
    return tuple(moves), tuple(red)


def apply_word(gram, moves, x: Sequence[int]) -> tuple[int, ...]:
    x = tuple(x)
    for mv in moves:
        x = mv.apply(gram, x)
    return x
