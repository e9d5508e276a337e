"""Bitrow graphs, seeded G(n,p) / G(n,m) generation and DIMACS I/O."""
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .errors import DomainError, ParseError

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix64(z):
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


class RngStream:
    """SplitMix64. Same seed gives the same 64-bit sequence everywhere."""

    __slots__ = ("state",)

    def __init__(self, seed):
        self.state = int(seed) & MASK64

    def next_u64(self):
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return _mix64(self.state)

    def block(self, count):
        """The next ``count`` outputs as a uint64 array (advances the stream).

        splitmix64 output j depends only on state + j * gamma, so a whole
        block can be produced with wrapping numpy arithmetic.
        """
        steps = np.arange(1, count + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.state) + steps * np.uint64(GOLDEN_GAMMA)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
            z = z ^ (z >> np.uint64(31))
        self.state = (self.state + count * GOLDEN_GAMMA) & MASK64
        return z

    def below(self, bound):
        """Uniform integer in [0, bound) by rejection (no modulo bias)."""
        if bound <= 0:
            raise DomainError("bound must be positive")
        limit = ((1 << 64) // bound) * bound
        while True:
            x = self.next_u64()
            if x < limit:
                return x % bound


def acceptance_threshold(p):
    """floor(p * 2**64) computed exactly; None means 'always accept' (p == 1)."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    if p == 1.0:
        return None
    return int(Fraction(p) * (1 << 64))


@dataclass(frozen=True, eq=True)
class Graph:
    """Undirected simple graph on vertices 0..n-1 stored as adjacency bitrows."""

    n: int
    rows: tuple
    m: int = field(init=False, compare=False)

    def __post_init__(self):
        rows = tuple(int(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if len(rows) != self.n:
            raise DomainError(f"expected {self.n} rows, got {len(rows)}")
        full = (1 << self.n) - 1
        total = 0
        for v, r in enumerate(rows):
            if r >> v & 1:
                raise DomainError(f"self-loop at vertex {v}")
            if r & ~full:
                raise DomainError(f"row {v} has bits outside 0..{self.n - 1}")
            rest = r
            while rest:
                low = rest & -rest
                u = low.bit_length() - 1
                if not rows[u] >> v & 1:
                    raise DomainError(f"asymmetric adjacency between {v} and {u}")
                rest ^= low
            total += r.bit_count()
        object.__setattr__(self, "m", total // 2)

    @classmethod
    def from_edges(cls, n, edges):
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise DomainError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise DomainError(f"edge ({u}, {v}) out of range for n={n}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def empty(cls, n):
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n):
        full = (1 << n) - 1
        return cls(n, tuple(full ^ (1 << v) for v in range(n)))

    @classmethod
    def cycle(cls, n):
        return cls.from_edges(n, [(v, (v + 1) % n) for v in range(n)])

    @classmethod
    def path(cls, n):
        return cls.from_edges(n, [(v, v + 1) for v in range(n - 1)])

    def has_edge(self, u, v):
        return bool(self.rows[u] >> v & 1)

    def degree(self, v):
        return self.rows[v].bit_count()

    def edges(self):
        """Edges (u, v) with u < v in lexicographic order."""
        out = []
        for u, r in enumerate(self.rows):
            rest = r >> (u + 1)
            v = u + 1
            while rest:
                if rest & 1:
                    out.append((u, v))
                rest >>= 1
                v += 1
        return out

    def average_degree(self):
        return 2.0 * self.m / self.n if self.n else 0.0

    def is_independent(self, mask):
        rest = mask
        while rest:
            low = rest & -rest
            if self.rows[low.bit_length() - 1] & mask:
                return False
            rest ^= low
        return True


def _pair_index_arrays(n):
    us, vs = np.triu_indices(n, k=1)
    return us, vs


def _graph_from_pairs(n, us, vs):
    rows = [0] * n
    for u, v in zip(us.tolist(), vs.tolist()):
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return Graph(n, tuple(rows))


def gen_gnp(n, p, seed):
    """G(n, p): pairs (u, v), u < v, in lexicographic order, one splitmix64
    draw each; the edge is kept iff the draw is below floor(p * 2**64)."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    threshold = acceptance_threshold(p)
    us, vs = _pair_index_arrays(n)
    draws = RngStream(seed).block(len(us))
    if threshold is None:
        keep = np.ones(len(us), dtype=bool)
    elif threshold == 0:
        keep = np.zeros(len(us), dtype=bool)
    else:
        keep = draws < np.uint64(threshold)
    return _graph_from_pairs(n, us[keep], vs[keep])


def pair_from_index(n, idx):
    """Inverse of the lexicographic numbering of pairs u < v."""
    u = 0
    row = n - 1
    while idx >= row:
        idx -= row
        u += 1
        row -= 1
    return u, u + 1 + idx


def gen_gnm(n, m, seed):
    """Uniform graph with exactly m edges.

    Distinct pair slots are drawn by rejection from the stream. When m exceeds
    half the slots, the complement (the non-edges) is drawn instead.
    """
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    slots = comb(n, 2)
    if not 0 <= m <= slots:
        raise DomainError(f"m must lie in [0, {slots}], got {m}")
    rng = RngStream(seed)
    complement = m > slots // 2
    want = slots - m if complement else m
    chosen = set()
    while len(chosen) < want:
        chosen.add(rng.below(slots))
    if complement:
        chosen = set(range(slots)) - chosen
    edges = [pair_from_index(n, i) for i in sorted(chosen)]
    return Graph.from_edges(n, edges)


def turan_bound(g):
    """n / (d + 1) with d the average degree; a lower bound on alpha(g)."""
    if g.n < 1:
        raise DomainError("turan_bound needs n >= 1")
    return g.n / (g.average_degree() + 1.0)


def induced_prefix(g, i):
    """Subgraph induced by vertices 0..i-1."""
    if not 0 <= i <= g.n:
        raise DomainError(f"prefix length must lie in [0, {g.n}], got {i}")
    keep = (1 << i) - 1
    return Graph(i, tuple(r & keep for r in g.rows[:i]))


def write_dimacs(g):
    lines = [f"p edge {g.n} {g.m}"]
    lines.extend(f"e {u + 1} {v + 1}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def read_dimacs(text):
    """Parse ``p edge n m`` / ``e u v`` text (1-based endpoints, ``c`` comments)."""
    n = declared_m = None
    seen = set()
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise ParseError("duplicate problem line", lineno)
            if len(parts) != 4 or parts[1] != "edge":
                raise ParseError(f"expected 'p edge <n> <m>', got {line!r}", lineno)
            try:
                n, declared_m = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"non-integer header {line!r}", lineno) from None
            if n < 0 or declared_m < 0:
                raise ParseError("negative header value", lineno)
        elif parts[0] == "e":
            if n is None:
                raise ParseError("edge before problem line", lineno)
            if len(parts) != 3:
                raise ParseError(f"expected 'e <u> <v>', got {line!r}", lineno)
            try:
                u, v = int(parts[1]) - 1, int(parts[2]) - 1
            except ValueError:
                raise ParseError(f"non-integer endpoint in {line!r}", lineno) from None
            if not (0 <= u < n and 0 <= v < n):
                raise ParseError(f"endpoint out of range 1..{n}", lineno)
            if u == v:
                raise ParseError(f"self-loop at vertex {u + 1}", lineno)
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ParseError(f"duplicate edge {u + 1} {v + 1}", lineno)
            seen.add(key)
            edges.append(key)
        else:
            raise ParseError(f"unknown line type {parts[0]!r}", lineno)
    if n is None:
        raise ParseError("missing problem line")
    if len(edges) != declared_m:
        raise ParseError(f"header declares {declared_m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)
