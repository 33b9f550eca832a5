"""Shared fixtures and independent brute-force oracles for the test suite.

The closures here are deliberately written differently from the library
(set-based, sorted rescan until stable, no derivations) so they can serve as
ground truth.
"""
from __future__ import annotations

import itertools

from maltsev_lab import FiniteAlgebra, Operation
from maltsev_lab.algebra import flat_index


def make_algebra(name, size, *ops):
    return FiniteAlgebra(name, size, tuple(Operation(s, a, tuple(t)) for s, a, t in ops))


MIN2 = make_algebra("min2", 2, ("meet", 2, (0, 0, 0, 1)))
PROJ2 = make_algebra("proj2", 2, ("p1", 2, (0, 0, 1, 1)))
NOT2 = make_algebra("not2", 2, ("neg", 1, (1, 0)))
CLIP3 = make_algebra("clip3", 3, ("g", 1, (0, 1, 1)))
ONE1 = make_algebra("one1", 1, ("f", 1, (0,)))

Z2_MINORITY = make_algebra(
    "z2minority",
    2,
    ("m", 3, tuple((x + y + z) % 2 for x, y, z in itertools.product(range(2), repeat=3))),
)
Z3_MALTSEV = make_algebra(
    "z3maltsev",
    3,
    ("m", 3, tuple((x - y + z) % 3 for x, y, z in itertools.product(range(3), repeat=3))),
)

# all 16 algebras with universe {0,1} and one binary operation
ALL_BINARY2 = [
    make_algebra(f"b{i}", 2, ("f", 2, tuple((i >> (3 - j)) & 1 for j in range(4))))
    for i in range(16)
]


def naive_subpower(alg, generators):
    """Independent closure: iterate over sorted snapshots until stable."""
    current = {tuple(g) for g in generators}
    while True:
        added = set()
        snapshot = sorted(current)
        for op in alg.ops:
            for combo in itertools.product(snapshot, repeat=op.arity):
                new = tuple(
                    op.table[flat_index((p[c] for p in combo), alg.size)]
                    for c in range(len(snapshot[0]))
                )
                if new not in current:
                    added.add(new)
        if not added:
            return current
        current |= added


def naive_unary_maps(alg):
    """Independent fixed point of unary term operations."""
    n = alg.size
    current = {tuple(range(n))}
    while True:
        added = set()
        snapshot = sorted(current)
        for op in alg.ops:
            for combo in itertools.product(snapshot, repeat=op.arity):
                new = tuple(
                    op.table[flat_index((u[x] for u in combo), n)] for x in range(n)
                )
                if new not in current:
                    added.add(new)
        if not added:
            return current
        current |= added


def walk_net_lengths(g, max_steps):
    """All (vertex, net) pairs reachable by closed walks of <= max_steps steps."""
    moves = {}
    for u, v in g.edges:
        moves.setdefault(u, []).append((v, 1))
        moves.setdefault(v, []).append((u, -1))
    achievable = set()
    for start in g.vertices:
        states = {(start, 0)}
        for _ in range(max_steps):
            nxt = set(states)
            for at, net in states:
                for to, d in moves.get(at, ()):
                    nxt.add((to, net + d))
            if nxt == states:
                break
            states = nxt
        for at, net in states:
            if at == start:
                achievable.add(net)
    return achievable
