"""Permutations of {0, ..., n-1} stored as tuples, ``p[i]`` being the image of ``i``.

A permutation acts on a list of values by moving the entry at position i to
position p[i], i.e. ``(p . z)[p[i]] = z[i]``.  This is a left action:
``act(p, act(q, z)) == act(compose(p, q), z)``.
"""

from __future__ import annotations

import random
from collections import deque
from typing import Sequence


def identity(n: int) -> tuple:
    return tuple(range(n))


def compose(p: Sequence[int], q: Sequence[int]) -> tuple:
    """p after q."""
    return tuple(p[i] for i in q)


def inverse(p: Sequence[int]) -> tuple:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def act(p: Sequence[int], values: Sequence) -> list:
    out = [None] * len(values)
    for i, v in enumerate(values):
        out[p[i]] = v
    return out


def from_cycles(n: int, *cycles: Sequence[int]) -> tuple:
    out = list(range(n))
    for c in cycles:
        for a, b in zip(c, c[1:] + c[:1]):
            out[a] = b
    return tuple(out)


def parity(p: Sequence[int]) -> int:
    """0 for even, 1 for odd."""
    seen = [False] * len(p)
    swaps = 0
    for i in range(len(p)):
        k, length = i, 0
        while not seen[k]:
            seen[k] = True
            k = p[k]
            length += 1
        if length:
            swaps += length - 1
    return swaps % 2


def is_even(p: Sequence[int]) -> bool:
    return parity(p) == 0


def generate(generators: Sequence[Sequence[int]]) -> list[tuple]:
    """All elements of the group generated, in breadth-first order from the identity."""
    n = len(generators[0])
    start = identity(n)
    seen = {start}
    order = [start]
    queue = deque([start])
    while queue:
        a = queue.popleft()
        for g in generators:
            b = compose(a, tuple(g))
            if b not in seen:
                seen.add(b)
                order.append(b)
                queue.append(b)
    return order


def random_even(rng: random.Random, n: int) -> tuple:
    p = list(range(n))
    rng.shuffle(p)
    if parity(p):
        p[0], p[1] = p[1], p[0]
    return tuple(p)


def random_odd(rng: random.Random, n: int) -> tuple:
    p = list(random_even(rng, n))
    p[0], p[1] = p[1], p[0]
    return tuple(p)
