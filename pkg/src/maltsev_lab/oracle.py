"""Brute-force ground truth: exhaustive clone slices and direct identity search.

The k-ary slice of the clone is enumerated as operation tables, starting from
the k projections and composing basic operations with already-found tables
until a fixed point.  This is deliberately a separate, scalar code path from
the subpower engine so the two can check each other.

Table search is exponentially smaller than term search and suffices for
validating the decision procedures: a found table proves "yes" regardless of
whether the slice is complete, while "no" is only reported from a complete
slice.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .algebra import FiniteAlgebra, Operation, flat_index

DEFAULT_TABLE_BUDGET = 100_000

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64: a well-known 64-bit generator with a tiny fixed state.

    Reference stream from seed 0 starts
    0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F; these are
    asserted in the test suite so generated corpora are reproducible across
    implementations.
    """

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Next value reduced modulo bound; the documented table-fill rule."""
        return self.next_u64() % bound


@dataclass(frozen=True)
class CloneSlice:
    """All k-ary term operations found within budget, as sorted tables."""

    arity: int
    tables: tuple[tuple[int, ...], ...]
    complete: bool


def _projections(size: int, k: int) -> list[tuple[int, ...]]:
    total = size ** k
    out = []
    for i in range(k):
        block = size ** (k - 1 - i)
        out.append(tuple((idx // block) % size for idx in range(total)))
    return out


def _iter_clone_tables(
    alg: FiniteAlgebra, k: int, budget: int
) -> Iterator[tuple[Optional[tuple[int, ...]], bool]]:
    """Yield (table, None-marker) pairs... internal driver for the searches.

    Yields each table once in discovery order, then a final (None, complete)
    sentinel carrying the completeness flag.
    """
    n = alg.size
    total = n ** k
    tables: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    over_budget = False
    for p in _projections(n, k):
        if p not in seen:
            seen.add(p)
            tables.append(p)
            yield p, False
    lo, hi = 0, len(tables)
    while lo < hi and not over_budget:
        frontier_start = lo
        count = hi
        for op in alg.ops:
            m = op.arity
            if m == 0:
                if frontier_start == 0:
                    cand = (op.table[0],) * total
                    if cand not in seen:
                        if len(tables) >= budget:
                            over_budget = True
                            break
                        seen.add(cand)
                        tables.append(cand)
                        yield cand, False
                continue
            for combo in itertools.product(range(count), repeat=m):
                if max(combo) < frontier_start:
                    continue
                args = [tables[i] for i in combo]
                new = tuple(
                    op.table[flat_index((a[idx] for a in args), n)]
                    for idx in range(total)
                )
                if new in seen:
                    continue
                if len(tables) >= budget:
                    over_budget = True
                    break
                seen.add(new)
                tables.append(new)
                yield new, False
            if over_budget:
                break
        lo, hi = count, len(tables)
    yield None, not over_budget


def enumerate_clone_slice(
    alg: FiniteAlgebra, k: int, budget: int = DEFAULT_TABLE_BUDGET
) -> CloneSlice:
    """The k-ary term operations of the algebra, up to a table-count budget.

    An exceeded budget is reported through complete=False, never an error;
    an incomplete slice still contains genuine term operations.
    """
    if k < 1:
        raise ValueError("slice arity must be at least 1")
    if budget < k:
        raise ValueError("budget must allow at least the projections")
    collected = []
    complete = True
    for table, flag in _iter_clone_tables(alg, k, budget):
        if table is None:
            complete = flag
        else:
            collected.append(table)
    return CloneSlice(arity=k, tables=tuple(sorted(collected)), complete=complete)


def _search_clone(alg, k, budget, satisfies):
    for table, flag in _iter_clone_tables(alg, k, budget):
        if table is None:
            return None, flag
        if satisfies(table):
            # stopped early: a hit is definitive, completeness is not claimed
            return table, False
    return None, False


def qwnu_table_check(table: Sequence[int], size: int, k: int) -> bool:
    """Does a k-ary table satisfy all displaced equalities for all x, y."""
    for x in range(size):
        for y in range(size):
            base = None
            for i in range(k):
                args = [x] * k
                args[i] = y
                v = table[flat_index(args, size)]
                if base is None:
                    base = v
                elif v != base:
                    return False
    return True


def quasi_siggers_table_check(table: Sequence[int], size: int) -> bool:
    """Does a 4-ary table satisfy s(r,a,r,e) = s(a,r,e,a) for all r, a, e."""
    for r in range(size):
        for a in range(size):
            for e in range(size):
                left = table[flat_index((r, a, r, e), size)]
                right = table[flat_index((a, r, e, a), size)]
                if left != right:
                    return False
    return True


def oracle_find_qwnu(
    alg: FiniteAlgebra, k: int, budget: int = DEFAULT_TABLE_BUDGET
) -> tuple[Optional[tuple[int, ...]], bool]:
    """Search the k-ary slice for a quasi weak near-unanimity table.

    Returns (table, complete).  A table is definitive evidence for "yes";
    (None, True) is a definitive "no"; (None, False) is inconclusive.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    return _search_clone(
        alg, k, budget, lambda t: qwnu_table_check(t, alg.size, k)
    )


def oracle_find_quasi_siggers(
    alg: FiniteAlgebra, budget: int = DEFAULT_TABLE_BUDGET
) -> tuple[Optional[tuple[int, ...]], bool]:
    """Search the 4-ary slice for a table satisfying the quasi Siggers identity."""
    return _search_clone(
        alg, 4, budget, lambda t: quasi_siggers_table_check(t, alg.size)
    )


def random_algebra(
    seed: int,
    size: int,
    signature: Sequence[int],
    idempotent: bool = False,
) -> FiniteAlgebra:
    """A reproducible random algebra.

    Tables are filled from one splitmix64 stream seeded with ``seed``, in
    index order, operation by operation in signature order, each entry being
    next_u64() mod size.  With ``idempotent`` the diagonal entries are then
    forced to the diagonal argument; that requires every arity to be at
    least 1.
    """
    if size < 1:
        raise ValueError("size must be at least 1")
    if not signature:
        raise ValueError("signature must list at least one arity")
    if idempotent and any(m < 1 for m in signature):
        raise ValueError("idempotent algebras need arities of at least 1")
    rng = SplitMix64(seed)
    ops = []
    for i, m in enumerate(signature):
        if m < 0:
            raise ValueError("arities must be nonnegative")
        table = [rng.below(size) for _ in range(size ** m)]
        if idempotent:
            for a in range(size):
                table[flat_index((a,) * m, size)] = a
        ops.append(Operation(f"f{i}", m, tuple(table)))
    tag = "x".join(str(m) for m in signature)
    name = f"rand-s{seed}-n{size}-a{tag}" + ("-idem" if idempotent else "")
    return FiniteAlgebra(name, size, tuple(ops))


def dump_corpus(
    directory,
    seeds: Sequence[int],
    size: int,
    signature: Sequence[int],
    idempotent: bool = False,
) -> list:
    """Write one algebra file per seed; the filename encodes seed and signature.

    Returns the written paths.  Files use the standard text format, so they
    feed straight back into the command line tools.
    """
    from pathlib import Path

    from .io import format_algebra

    out = []
    base = Path(directory)
    base.mkdir(parents=True, exist_ok=True)
    for seed in seeds:
        alg = random_algebra(seed, size, signature, idempotent=idempotent)
        path = base / f"{alg.name}.alg"
        path.write_text(format_algebra(alg), encoding="utf-8")
        out.append(path)
    return out
