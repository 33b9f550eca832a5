"""Finite algebras, terms, and the unary image machinery.

An algebra is a universe {0..n-1} together with named finitary operation
tables.  Tables are flat and row major with the leftmost argument most
significant: the entry for arguments (a0, ..., a_{m-1}) sits at index
a0*n^(m-1) + a1*n^(m-2) + ... + a_{m-1}.  Arity 0 is allowed and denotes a
constant (a table with a single entry).

Terms are formal composition trees of operation symbols and variables
x0, x1, ...  Evaluating a term in an algebra yields a term operation; the
set of all unary term operations forms a monoid under composition, and its
inclusion-minimal images drive the idempotent image construction exposed by
``minimal_unary_idempotent`` and ``restrict_to_image``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .errors import BudgetExceededError, ConsistencyError, TermError

DEFAULT_MONOID_BUDGET = 1_000_000


def flat_index(args, size: int) -> int:
    """Row-major index of an argument tuple, leftmost argument most significant."""
    idx = 0
    for a in args:
        idx = idx * size + a
    return idx


@dataclass(frozen=True)
class Operation:
    """A named basic operation given by its flat table."""

    symbol: str
    arity: int
    table: tuple[int, ...]


@dataclass(frozen=True)
class FiniteAlgebra:
    """A finite algebra: universe {0..size-1} plus an ordered list of operations."""

    name: str
    size: int
    ops: tuple[Operation, ...]
    _op_map: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("algebra size must be at least 1")
        if not self.ops:
            raise ValueError("algebra must have at least one basic operation")
        op_map = {}
        for op in self.ops:
            if op.arity < 0:
                raise ValueError(f"operation {op.symbol}: negative arity")
            if op.symbol in op_map:
                raise ValueError(f"duplicate operation symbol {op.symbol!r}")
            expected = self.size ** op.arity
            if len(op.table) != expected:
                raise ValueError(
                    f"operation {op.symbol}: table has {len(op.table)} entries, "
                    f"expected {expected}"
                )
            for v in op.table:
                if not 0 <= v < self.size:
                    raise ValueError(
                        f"operation {op.symbol}: table entry {v} outside universe"
                    )
            op_map[op.symbol] = op
        object.__setattr__(self, "_op_map", op_map)

    def operation(self, symbol: str) -> Operation:
        op = self._op_map.get(symbol)
        if op is None:
            raise TermError(f"unknown operation symbol {symbol!r}")
        return op

    @property
    def total_table_size(self) -> int:
        """Sum of all table sizes; the natural encoding size of the algebra."""
        return sum(len(op.table) for op in self.ops)

    def apply(self, symbol: str, args) -> int:
        op = self.operation(symbol)
        return op.table[flat_index(args, self.size)]


@dataclass(frozen=True)
class Variable:
    index: int


@dataclass(frozen=True)
class Apply:
    symbol: str
    children: tuple["Term", ...]


Term = Union[Variable, Apply]


def term_arity(t: Term) -> int:
    """Smallest k such that t is a k-ary term: 1 + largest variable index used."""
    high = -1
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Variable):
            high = max(high, node.index)
        else:
            stack.extend(node.children)
    return high + 1


def evaluate_term(alg: FiniteAlgebra, t: Term, args) -> int:
    """Evaluate a term at an argument tuple.

    Requires len(args) >= term_arity(t) and every argument in the universe.
    Shared subterm objects are evaluated once.
    """
    args = tuple(args)
    for a in args:
        if not 0 <= a < alg.size:
            raise TermError(f"argument {a} outside universe of size {alg.size}")
    memo: dict[int, int] = {}

    def walk(node: Term) -> int:
        key = id(node)
        got = memo.get(key)
        if got is not None:
            return got
        if isinstance(node, Variable):
            if node.index >= len(args):
                raise TermError(
                    f"term references x{node.index} but only {len(args)} arguments given"
                )
            val = args[node.index]
        else:
            op = alg.operation(node.symbol)
            if len(node.children) != op.arity:
                raise TermError(
                    f"operation {node.symbol} expects {op.arity} children, "
                    f"got {len(node.children)}"
                )
            val = op.table[flat_index((walk(c) for c in node.children), alg.size)]
        memo[key] = val
        return val

    return walk(t)


def term_table(alg: FiniteAlgebra, t: Term, arity: int) -> tuple[int, ...]:
    """Materialize the k-ary term operation induced by t as a flat table.

    Uses the same row-major convention as basic operations.  Computed
    bottom-up over the (possibly shared) term structure, so the cost is
    linear in distinct subterms times n^arity.
    """
    if arity < 0:
        raise TermError("arity must be nonnegative")
    if term_arity(t) > arity:
        raise TermError(f"term has arity {term_arity(t)}, table arity {arity} too small")
    n = alg.size
    size = n ** arity
    memo: dict[int, tuple[int, ...]] = {}

    def tab(node: Term) -> tuple[int, ...]:
        key = id(node)
        got = memo.get(key)
        if got is not None:
            return got
        if isinstance(node, Variable):
            # projection onto coordinate node.index
            block = n ** (arity - 1 - node.index)
            out = tuple((idx // block) % n for idx in range(size))
        else:
            op = alg.operation(node.symbol)
            if len(node.children) != op.arity:
                raise TermError(
                    f"operation {node.symbol} expects {op.arity} children, "
                    f"got {len(node.children)}"
                )
            child_tabs = [tab(c) for c in node.children]
            out = tuple(
                op.table[flat_index((ct[idx] for ct in child_tabs), n)]
                for idx in range(size)
            )
        memo[key] = out
        return out

    return tab(t)


def idempotence_violation(alg: FiniteAlgebra) -> Optional[tuple[str, int, int]]:
    """First (symbol, element, value) with f(a,...,a) = value != a, or None."""
    for op in alg.ops:
        for a in range(alg.size):
            v = op.table[flat_index((a,) * op.arity, alg.size)]
            if v != a:
                return op.symbol, a, v
    return None


def is_idempotent(alg: FiniteAlgebra) -> bool:
    """True iff every basic operation f satisfies f(a,...,a) = a for all a."""
    return idempotence_violation(alg) is None


@dataclass(frozen=True)
class UnaryMap:
    """A unary map on the universe, given pointwise: images[a] = value at a."""

    images: tuple[int, ...]

    def __call__(self, a: int) -> int:
        return self.images[a]

    def compose(self, other: "UnaryMap") -> "UnaryMap":
        """self after other: (self . other)(a) = self(other(a))."""
        return UnaryMap(tuple(self.images[v] for v in other.images))

    def image(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.images)))

    def is_idempotent(self) -> bool:
        return all(self.images[v] == v for v in self.images)


def unary_term_monoid(
    alg: FiniteAlgebra, budget: int = DEFAULT_MONOID_BUDGET
) -> tuple[UnaryMap, ...]:
    """All unary term operations of the algebra, in canonical generation order.

    Least fixed point containing the identity map and closed under
    u = f(u1(x), ..., um(x)) for every basic f and already-found maps.
    Generation is round based: operations in declaration order, argument
    combinations in lexicographic order over the maps found so far.  Raises
    BudgetExceededError when more than ``budget`` maps would be created.
    """
    n = alg.size
    ident = tuple(range(n))
    maps: list[tuple[int, ...]] = [ident]
    seen = {ident}
    lo, hi = 0, 1
    while lo < hi:
        k = hi
        for op in alg.ops:
            m = op.arity
            if m == 0:
                combos: Iterable[tuple[int, ...]] = [()] if lo == 0 else []
            else:
                combos = (
                    c
                    for c in itertools.product(range(k), repeat=m)
                    if any(i >= lo for i in c)
                )
            for combo in combos:
                parents = [maps[i] for i in combo]
                new = tuple(
                    op.table[flat_index((p[x] for p in parents), n)] for x in range(n)
                )
                if new in seen:
                    continue
                if len(maps) >= budget:
                    raise BudgetExceededError(
                        f"unary term monoid exceeds budget of {budget} maps"
                    )
                seen.add(new)
                maps.append(new)
        lo, hi = k, len(maps)
    return tuple(UnaryMap(m) for m in maps)


def _perm_order_and_power(mapping: dict, p_from_order) -> dict:
    """Power of a permutation given as a dict, exponent chosen from its order.

    ``p_from_order`` maps the permutation's order d to the wanted exponent p;
    the power is taken cycle by cycle, so huge orders cost nothing.
    """
    cycles = []
    seen = set()
    for start in mapping:
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        nxt = mapping[start]
        while nxt != start:
            cyc.append(nxt)
            seen.add(nxt)
            nxt = mapping[nxt]
        cycles.append(cyc)
    order = math.lcm(*(len(c) for c in cycles)) if cycles else 1
    p = p_from_order(order)
    power = {}
    for cyc in cycles:
        length = len(cyc)
        for i, v in enumerate(cyc):
            power[v] = cyc[(i + p) % length]
    return power


def minimal_unary_idempotent(
    alg: FiniteAlgebra, budget: int = DEFAULT_MONOID_BUDGET
) -> tuple[UnaryMap, tuple[int, ...]]:
    """An idempotent unary term operation with inclusion-minimal image.

    Returns (alpha, B) where B = image(alpha) is sorted and alpha restricted
    to B is the identity, hence alpha . alpha = alpha.  Ties: among
    inclusion-minimal images pick the lexicographically least image set, then
    the first map with that image in generation order; that map is raised to
    the power making it idempotent.
    """
    monoid = unary_term_monoid(alg, budget=budget)
    images = [frozenset(u.images) for u in monoid]
    minimal_idx = [
        i
        for i, img in enumerate(images)
        if not any(other < img for other in images)
    ]
    best_image = min(tuple(sorted(images[i])) for i in minimal_idx)
    base = next(
        monoid[i] for i in minimal_idx if tuple(sorted(images[i])) == best_image
    )
    b_sorted = best_image
    # base restricted to its image is a permutation (else a power of base
    # would have a strictly smaller image); raise base to that permutation's
    # order d so the restriction becomes the identity: base^d = sigma^(d-1) . base.
    sigma = {b: base.images[b] for b in b_sorted}
    if set(sigma.values()) != set(b_sorted):
        raise ConsistencyError(
            "unary map is not a permutation of its inclusion-minimal image"
        )
    sigma_pow = _perm_order_and_power(sigma, lambda d: (d - 1) % d)
    alpha = UnaryMap(tuple(sigma_pow[base.images[a]] for a in range(alg.size)))
    return alpha, b_sorted


def restrict_to_image(
    alg: FiniteAlgebra,
    alpha: UnaryMap,
    image_set,
    t: Term,
    arity: int,
) -> tuple[int, ...]:
    """Correct a term operation into an idempotent operation on alpha's image.

    With B = image_set and beta(b) = alpha(t(b, ..., b)), finds the least
    p >= 1 with beta^(p+1) the identity on B and returns the table of
    beta^p . alpha . t on arguments from B.  The table is row major over
    sorted(B) and its values are universe elements lying in B.  The result
    satisfies u(b, ..., b) = b for every b in B.
    """
    b_sorted = tuple(sorted(image_set))
    b_set = set(b_sorted)
    beta = {
        b: alpha.images[evaluate_term(alg, t, (b,) * arity)] for b in b_sorted
    }
    if set(beta.values()) != b_set:
        raise ConsistencyError(
            "diagonal map is not a permutation of the minimal image"
        )
    # least p >= 1 with beta^(p+1) = id on B: p = d - 1 for order d >= 2, else 1
    beta_p = _perm_order_and_power(beta, lambda d: d - 1 if d >= 2 else 1)
    out = []
    for args in itertools.product(b_sorted, repeat=arity):
        v = beta_p[alpha.images[evaluate_term(alg, t, args)]]
        out.append(v)
    return tuple(out)


def induced_image_algebra(
    alg: FiniteAlgebra, budget: int = DEFAULT_MONOID_BUDGET
) -> tuple[FiniteAlgebra, UnaryMap, tuple[int, ...]]:
    """The idempotent algebra induced on the minimal unary image.

    Each basic operation is corrected via restrict_to_image and relabeled
    onto the dense universe 0..|B|-1.  Returns (algebra, alpha, B) with B in
    the original element labels.
    """
    alpha, b_sorted = minimal_unary_idempotent(alg, budget=budget)
    relabel = {b: i for i, b in enumerate(b_sorted)}
    ops = []
    for op in alg.ops:
        t = Apply(op.symbol, tuple(Variable(i) for i in range(op.arity)))
        table = restrict_to_image(alg, alpha, b_sorted, t, op.arity)
        ops.append(Operation(op.symbol, op.arity, tuple(relabel[v] for v in table)))
    induced = FiniteAlgebra(f"{alg.name}-image", len(b_sorted), tuple(ops))
    return induced, alpha, b_sorted
