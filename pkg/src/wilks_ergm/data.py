"""Input structures for both models: paired-comparison counts and simple graphs.

Files use 1-based vertex labels; everything in memory is 0-based.

Bradley-Terry CSV rows are ``i,j,wins_ij,wins_ji`` with at most one row per
unordered pair.  Graph CSV rows are ``i,j`` listing undirected edges.  Blank
lines and lines starting with ``#`` are ignored in both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (
    DuplicateEdge,
    DuplicatePair,
    MalformedRow,
    SelfLoop,
    VertexOutOfRange,
)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.int64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ComparisonMatrix:
    """Directed win counts ``wins[i, j]`` = number of times i beat j."""

    wins: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.wins)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"wins must be a square matrix, got shape {w.shape}")
        if w.shape[0] < 2:
            raise ValueError("need at least two vertices")
        if not np.all(np.equal(np.mod(w, 1), 0)):
            raise ValueError("win counts must be integers")
        if np.any(w < 0):
            raise ValueError("win counts must be nonnegative")
        if np.any(np.diag(w) != 0):
            raise ValueError("diagonal win counts must be zero")
        object.__setattr__(self, "wins", _frozen(w))

    @classmethod
    def from_upper(cls, upper, K: int) -> ComparisonMatrix:
        """Every pair played ``K`` times; ``upper[i, j]`` (i<j) counts wins of i over j."""
        upper = np.triu(np.asarray(upper, dtype=np.int64), 1)
        if np.any(upper < 0) or np.any(upper > K):
            raise ValueError(f"upper-triangle wins must lie in [0, {K}]")
        n = upper.shape[0]
        lower = np.triu(np.full((n, n), K, dtype=np.int64), 1) - upper
        return cls(upper + lower.T)

    @property
    def n(self) -> int:
        return self.wins.shape[0]

    @property
    def k(self) -> np.ndarray:
        """Symmetric per-pair trial counts."""
        return self.wins + self.wins.T

    @property
    def max_k(self) -> int:
        return int(self.k.max())

    def out_degrees(self) -> np.ndarray:
        return self.wins.sum(axis=1)

    def permute(self, perm) -> ComparisonMatrix:
        """Relabel so that new vertex ``a`` is old vertex ``perm[a]``."""
        perm = np.asarray(perm)
        return ComparisonMatrix(self.wins[np.ix_(perm, perm)])

    def to_csv(self) -> str:
        k = self.k
        lines = []
        for i, j in zip(*np.triu_indices(self.n, 1)):
            if k[i, j] > 0:
                lines.append(f"{i + 1},{j + 1},{self.wins[i, j]},{self.wins[j, i]}")
        return "\n".join(lines) + ("\n" if lines else "")

    def __eq__(self, other):
        if not isinstance(other, ComparisonMatrix):
            return NotImplemented
        return np.array_equal(self.wins, other.wins)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SimpleGraph:
    """Undirected 0/1 adjacency with empty diagonal."""

    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {a.shape}")
        if a.shape[0] < 2:
            raise ValueError("need at least two vertices")
        if not np.all((a == 0) | (a == 1)):
            raise ValueError("adjacency entries must be 0 or 1")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(a) != 0):
            raise SelfLoop("adjacency diagonal must be zero")
        object.__setattr__(self, "adjacency", _frozen(a))

    @classmethod
    def from_edges(cls, n: int, edges) -> SimpleGraph:
        a = np.zeros((n, n), dtype=np.int64)
        for i, j in edges:
            a[i, j] = a[j, i] = 1
        return cls(a)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def n_edges(self) -> int:
        return int(self.adjacency.sum()) // 2

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def permute(self, perm) -> SimpleGraph:
        perm = np.asarray(perm)
        return SimpleGraph(self.adjacency[np.ix_(perm, perm)])

    def to_csv(self) -> str:
        iu, ju = np.nonzero(np.triu(self.adjacency, 1))
        lines = [f"{i + 1},{j + 1}" for i, j in zip(iu, ju)]
        return "\n".join(lines) + ("\n" if lines else "")

    def __eq__(self, other):
        if not isinstance(other, SimpleGraph):
            return NotImplemented
        return np.array_equal(self.adjacency, other.adjacency)

    __hash__ = None


def out_degrees(m: ComparisonMatrix) -> np.ndarray:
    return m.out_degrees()


def degrees(g: SimpleGraph) -> np.ndarray:
    return g.degrees()


def _rows(text: str, width: int):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != width:
            raise MalformedRow(f"line {lineno}: expected {width} fields, got {len(fields)}")
        try:
            values = [int(f) for f in fields]
        except ValueError:
            raise MalformedRow(f"line {lineno}: non-integer field in {line!r}") from None
        yield lineno, values


def _check_labels(lineno, labels, n):
    for v in labels:
        if v < 1 or (n is not None and v > n):
            raise VertexOutOfRange(f"line {lineno}: vertex {v} outside 1..{n if n else 'inf'}")


def parse_bt_csv(text: str, n: int | None = None) -> ComparisonMatrix:
    """Parse ``i,j,wins_ij,wins_ji`` rows.  ``n`` defaults to the largest label."""
    rows = []
    seen = set()
    for lineno, (i, j, a, b) in _rows(text, 4):
        _check_labels(lineno, (i, j), n)
        if i == j:
            raise MalformedRow(f"line {lineno}: a vertex cannot be compared with itself")
        if a < 0 or b < 0:
            raise MalformedRow(f"line {lineno}: negative win count")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise DuplicatePair(f"line {lineno}: pair {key} listed twice")
        seen.add(key)
        rows.append((i - 1, j - 1, a, b))
    size = n if n is not None else max((max(i, j) + 1 for i, j, _, _ in rows), default=0)
    if size < 2:
        raise MalformedRow("need at least two vertices")
    w = np.zeros((size, size), dtype=np.int64)
    for i, j, a, b in rows:
        w[i, j] = a
        w[j, i] = b
    return ComparisonMatrix(w)


def parse_graph_csv(text: str, n: int | None = None) -> SimpleGraph:
    """Parse undirected ``i,j`` edge rows.  ``n`` defaults to the largest label."""
    edges = []
    seen = set()
    for lineno, (i, j) in _rows(text, 2):
        _check_labels(lineno, (i, j), n)
        if i == j:
            raise SelfLoop(f"line {lineno}: self-loop at vertex {i}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise DuplicateEdge(f"line {lineno}: edge {key} listed twice")
        seen.add(key)
        edges.append((i - 1, j - 1))
    size = n if n is not None else max((max(e) + 1 for e in edges), default=0)
    if size < 2:
        raise MalformedRow("need at least two vertices")
    return SimpleGraph.from_edges(size, edges)


@dataclass(frozen=True)
class Existence:
    """Verdict of the existence check.

    When the MLE does not exist ``witness`` is ``(A, B)``: a split of the
    vertices (0-based) such that nobody in ``B`` ever beat anybody in ``A``.
    """

    exists: bool
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    reason: str = ""

    def __bool__(self):
        return self.exists

    def describe(self, one_based: bool = True) -> str:
        if self.exists:
            return "Exists"
        if self.witness is None:
            return f"NotExists ({self.reason})" if self.reason else "NotExists"
        off = 1 if one_based else 0
        a, b = ([v + off for v in s] for s in self.witness)
        return f"NotExists (A={a} never loses to B={b})"


def ford_existence_check(m: ComparisonMatrix) -> Existence:
    """Ford's condition: the digraph with an arc i->j whenever i beat j is strongly connected."""
    arcs = m.wins > 0
    ncomp, labels = connected_components(arcs, directed=True, connection="strong")
    if ncomp == 1:
        return Existence(True)
    # A source component of the condensation has no arc entering it from outside.
    entering = arcs & (labels[:, None] != labels[None, :])
    has_incoming = np.zeros(ncomp, dtype=bool)
    has_incoming[labels[np.nonzero(entering)[1]]] = True
    source = int(np.flatnonzero(~has_incoming)[0])
    a = tuple(int(v) for v in np.flatnonzero(labels == source))
    b = tuple(int(v) for v in np.flatnonzero(labels != source))
    return Existence(False, (a, b), "win digraph is not strongly connected")


def beta_existence_check(g_or_degrees) -> Existence:
    """Exact existence test for the beta-model MLE.

    The MLE exists iff the degree vector is interior to the convex hull of
    graphical degree sequences, which is cut out by
    ``sum_S d - sum_T d <= |S| (n - 1 - |T|)`` over disjoint vertex sets S, T.
    For fixed sizes the tightest pair is S = the |S| largest degrees and
    T = the |T| smallest, so prefix sums of the sorted degrees decide it in
    O(n^2).  Degrees 0 and n-1 are the singleton cases.
    """
    d = g_or_degrees.degrees() if isinstance(g_or_degrees, SimpleGraph) else np.asarray(g_or_degrees)
    n = d.shape[0]
    order = np.argsort(-d, kind="stable")
    top = np.concatenate([[0], np.cumsum(d[order])])
    bottom = np.concatenate([[0], np.cumsum(d[order[::-1]])])
    for s in range(n + 1):
        t = np.arange(n + 1 - s)
        slack = s * (n - 1 - t) - (top[s] - bottom[t])
        if s == 0:
            slack[0] = 1
        hit = np.flatnonzero(slack <= 0)
        if hit.size:
            t = int(hit[0])
            big = sorted(int(v) + 1 for v in order[:s])
            small = sorted(int(v) + 1 for v in order[n - t:])
            if (s, t) == (1, 0):
                reason = f"vertex {big[0]} has degree n-1"
            elif (s, t) == (0, 1):
                reason = f"vertex {small[0]} has degree 0"
            else:
                reason = f"degrees of S={big} against T={small} sit on the boundary"
            return Existence(False, None, reason)
    return Existence(True)
