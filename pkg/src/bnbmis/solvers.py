"""Search procedures for maximum independent set and their oracles.

The search tree handles vertices in index order 0..n-1. A node at level i
holds a subset S of {0..i-1}; its potential is |S| + n - i. Nodes are only
created for feasible (independent) S, and the root counts as one node.
"""
import heapq
import time
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, ResourceCapError
from .graph import induced_prefix

DEFAULT_NODE_CAP = 10**9
DEFAULT_FRONTIER_CAP = 10**8
BRUTE_FORCE_MAX_N = 25
COUNT_MAX_N = 50


class SearchNode(NamedTuple):
    level: int
    chosen: int
    size: int
    potential: int


@dataclass
class SolveResult:
    alpha: int
    witness: int
    nodes_expanded: int
    leaves_seen: int = 0
    elapsed: float = 0.0

    def witness_vertices(self):
        return [v for v in range(self.witness.bit_length()) if self.witness >> v & 1]

    def same_outcome(self, other):
        """Equality ignoring wall-clock time."""
        return (self.alpha, self.witness, self.nodes_expanded, self.leaves_seen) == (
            other.alpha, other.witness, other.nodes_expanded, other.leaves_seen)


def potential(size, level, n):
    if not 0 <= size <= level <= n:
        raise DomainError(f"need 0 <= size <= level <= n, got ({size}, {level}, {n})")
    return size + n - level


def root_node(g):
    return SearchNode(0, 0, 0, g.n)


def children(g, node):
    """Feasible children of ``node``: include-branch first, then exclude."""
    if node.level >= g.n:
        return []
    v = node.level
    out = []
    if not g.rows[v] & node.chosen:
        out.append(SearchNode(v + 1, node.chosen | 1 << v, node.size + 1, node.potential))
    out.append(SearchNode(v + 1, node.chosen, node.size, node.potential - 1))
    return out


def brute_force_alpha(g):
    """Independence number by enumerating every vertex subset (n <= 25)."""
    n = g.n
    if n > BRUTE_FORCE_MAX_N:
        raise DomainError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    start = time.perf_counter()
    total = 1 << n
    dtype = np.uint32
    independent = np.zeros(total, dtype=bool)
    sizes = np.zeros(total, dtype=np.uint8)
    independent[0] = True
    for v in range(n):
        base = 1 << v
        masks = np.arange(base, 2 * base, dtype=dtype)
        lower = dtype(g.rows[v] & (base - 1))
        independent[base:2 * base] = independent[:base] & ((masks & lower) == 0)
        sizes[base:2 * base] = sizes[:base] + 1
    scored = np.where(independent, sizes.astype(np.int16), -1)
    best = int(np.argmax(scored))
    return SolveResult(
        alpha=int(sizes[best]),
        witness=best,
        nodes_expanded=total,
        leaves_seen=int(independent.sum()),
        elapsed=time.perf_counter() - start,
    )


def _closed_neighbourhood_pick(rows, mask):
    """Vertex of maximum degree inside ``mask`` (lowest index on ties)."""
    best_v, best_d = -1, -1
    rest = mask
    while rest:
        low = rest & -rest
        v = low.bit_length() - 1
        d = (rows[v] & mask).bit_count()
        if d > best_d:
            best_v, best_d = v, d
        rest ^= low
    return best_v, best_d


def count_independent_sets(g):
    """Exact number of independent sets (empty set included).

    #IS(G) = #IS(G - v) + #IS(G - N[v]) on a maximum-degree v, and
    #IS of an edgeless graph on j vertices is 2**j.
    """
    if g.n > COUNT_MAX_N:
        raise DomainError(f"counting limited to n <= {COUNT_MAX_N}, got {g.n}")
    rows = g.rows
    memo = {}

    def count(mask):
        if mask in memo:
            return memo[mask]
        v, d = _closed_neighbourhood_pick(rows, mask)
        if d <= 0:
            result = 1 << mask.bit_count()
        else:
            without = mask & ~(1 << v)
            result = count(without) + count(without & ~rows[v])
        memo[mask] = result
        return result

    return count((1 << g.n) - 1)


def _component(rows, mask):
    start = mask & -mask
    comp = frontier = start
    while frontier:
        reach = 0
        rest = frontier
        while rest:
            low = rest & -rest
            reach |= rows[low.bit_length() - 1]
            rest ^= low
        frontier = reach & mask & ~comp
        comp |= frontier
    return comp


def _poly_add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return out


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


class IndependencePolynomials:
    """Independence polynomials of induced subgraphs of one graph.

    ``poly(mask)[s]`` is the number of independent sets of size s inside the
    vertex set ``mask``. Connected components are handled separately and
    results are memoised by mask, so all prefixes of a graph share work.
    """

    def __init__(self, g):
        self.g = g
        self._memo = {0: [1]}

    def poly(self, mask):
        memo = self._memo
        hit = memo.get(mask)
        if hit is not None:
            return hit
        rows = self.g.rows
        comp = _component(rows, mask)
        if comp != mask:
            result = _poly_mul(self.poly(comp), self.poly(mask & ~comp))
        else:
            v, d = _closed_neighbourhood_pick(rows, mask)
            if d == 0:
                result = [1, 1]
            else:
                without = mask & ~(1 << v)
                result = _poly_add(self.poly(without), [0] + self.poly(without & ~rows[v]))
        memo[mask] = result
        return result

    def prefix(self, i):
        return self.poly((1 << i) - 1)


@dataclass
class TreeCounts:
    """Search-tree sizes obtained by counting rather than traversal."""

    alpha: int
    exhaustive_nodes: int
    census_nodes: int
    level_counts: list


def tree_counts(g):
    """Exhaustive and census node counts via prefix independence polynomials.

    Level i of the exhaustive tree holds exactly the independent subsets of
    the first i vertices, so its size is the sum of the level-i polynomial.
    A level-i node of size s has potential s + n - i, so the census keeps the
    coefficients with s >= alpha - (n - i).
    """
    n = g.n
    polys = IndependencePolynomials(g)
    levels = [polys.prefix(i) for i in range(n + 1)]
    alpha = len(levels[n]) - 1
    exhaustive = sum(sum(c) for c in levels)
    census = 0
    for i, coeffs in enumerate(levels):
        lo = max(0, alpha - (n - i))
        census += sum(coeffs[lo:])
    return TreeCounts(alpha, exhaustive, census, [sum(c) for c in levels])


def exhaustive_search(g, cap=DEFAULT_NODE_CAP):
    """Depth-first search pruned only on infeasibility.

    Every feasible node is visited; ``nodes_expanded`` counts them all,
    root and leaves included, and ``leaves_seen`` counts the level-n nodes.
    """
    start = time.perf_counter()
    n = g.n
    rows = g.rows
    nodes = 1
    leaves = 0
    best_size, best_set = -1, 0
    stack = [(0, 0, 0)]
    while stack:
        level, chosen, size = stack.pop()
        if level == n:
            leaves += 1
            if size > best_size:
                best_size, best_set = size, chosen
            continue
        nodes += 1
        stack.append((level + 1, chosen, size))
        if not rows[level] & chosen:
            nodes += 1
            stack.append((level + 1, chosen | 1 << level, size + 1))
        if nodes > cap:
            raise ResourceCapError(f"exhaustive search exceeded {cap} nodes", nodes)
    return SolveResult(best_size, best_set, nodes, leaves, time.perf_counter() - start)


def bnb_best_first(g, frontier_cap=DEFAULT_FRONTIER_CAP):
    """Best-first branch-and-bound with potential |S| + n - level.

    Frontier order: potential desc, level desc, include-child before
    exclude-child, then creation order. The first leaf popped is optimal.
    """
    start = time.perf_counter()
    n = g.n
    rows = g.rows
    counter = 0
    # key: (-potential, -level, branch flag, sequence)
    heap = [(-n, 0, 0, 0, 0, 0)]
    popped = 0
    while heap:
        neg_u, neg_level, _, _, chosen, size = heapq.heappop(heap)
        popped += 1
        level = -neg_level
        if level == n:
            return SolveResult(size, chosen, popped, 1, time.perf_counter() - start)
        if not rows[level] & chosen:
            counter += 1
            heapq.heappush(heap, (neg_u, -(level + 1), 0, counter, chosen | 1 << level, size + 1))
        counter += 1
        heapq.heappush(heap, (neg_u + 1, -(level + 1), 1, counter, chosen, size))
        if len(heap) > frontier_cap:
            raise ResourceCapError(f"best-first frontier exceeded {frontier_cap} nodes", popped)
    raise AssertionError("search tree has no leaf")  # unreachable: all-exclude leaf exists


def bnb_census(g, alpha, cap=DEFAULT_NODE_CAP):
    """Number of feasible nodes whose potential is at least ``alpha``.

    Depth-first; since potentials never increase downward, a node with
    potential below alpha cuts its whole subtree.
    """
    n = g.n
    rows = g.rows
    if n < alpha:
        return 0
    count = 0
    stack = [(0, 0, 0)]
    while stack:
        level, chosen, size = stack.pop()
        count += 1
        if count > cap:
            raise ResourceCapError(f"census exceeded {cap} nodes", count)
        if level == n:
            continue
        # exclude child loses one unit of potential
        if size + n - level - 1 >= alpha:
            stack.append((level + 1, chosen, size))
        if not rows[level] & chosen:
            stack.append((level + 1, chosen | 1 << level, size + 1))
    return count


def prefix_count_sum(g):
    """Sum of count_independent_sets over all prefixes G_0..G_n."""
    return sum(count_independent_sets(induced_prefix(g, i)) for i in range(g.n + 1))
