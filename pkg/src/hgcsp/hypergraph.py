"""Hypergraphs, graphs and paths.

Vertex identifiers are opaque strings, internally mapped to dense integer
indices so vertex sets can live in bitmasks.  All constructors canonicalize:
vertices are sorted, duplicate edges are removed, and edges are ordered by
their sorted index tuples.  Everything is immutable after construction.
"""

from dataclasses import dataclass

from . import kernels
from .errors import DomainError


def _canon_edges(index, edges):
    seen = set()
    keyed = []
    for e in edges:
        idxs = tuple(sorted(index[v] for v in set(e)))
        if not idxs:
            raise DomainError("empty edge")
        if idxs in seen:
            continue
        seen.add(idxs)
        keyed.append(idxs)
    keyed.sort()
    return keyed


class Hypergraph:
    """Vertex set plus a family of non-empty vertex subsets (edges).

    ``vertices`` may be passed explicitly to keep vertices that no edge
    covers (induced subhypergraphs need them); by default it is the union
    of the edges.
    """

    __slots__ = ("vertices", "edges", "_index", "edge_masks", "_adj")

    def __init__(self, edges, vertices=None):
        edges = [tuple(e) for e in edges]
        covered = set()
        for e in edges:
            covered.update(e)
        if vertices is None:
            vertices = covered
        else:
            vertices = set(vertices)
            if not covered <= vertices:
                raise DomainError("edge mentions vertex outside the vertex set")
        self.vertices = tuple(sorted(vertices))
        self._index = {v: i for i, v in enumerate(self.vertices)}
        keyed = _canon_edges(self._index, edges)
        self.edges = tuple(frozenset(self.vertices[i] for i in idxs) for idxs in keyed)
        self.edge_masks = tuple(sum(1 << i for i in idxs) for idxs in keyed)
        self._adj = None

    @property
    def n(self):
        return len(self.vertices)

    def index(self, v):
        try:
            return self._index[v]
        except KeyError:
            raise DomainError(f"unknown vertex {v!r}") from None

    def mask_of(self, vs):
        m = 0
        for v in vs:
            m |= 1 << self.index(v)
        return m

    def names_of(self, mask):
        return frozenset(v for i, v in enumerate(self.vertices) if mask >> i & 1)

    def full_mask(self):
        return (1 << self.n) - 1

    @property
    def adjacency(self):
        """Neighbour bitmask per vertex in the primal graph (self excluded)."""
        if self._adj is None:
            adj = [0] * self.n
            for m in self.edge_masks:
                rest = m
                while rest:
                    low = rest & -rest
                    rest ^= low
                    adj[low.bit_length() - 1] |= m & ~low
            self._adj = adj
        return self._adj

    def edges_meeting(self, mask):
        """Indices of edges intersecting the given vertex mask."""
        return [i for i, em in enumerate(self.edge_masks) if em & mask]

    def covered_mask(self):
        m = 0
        for em in self.edge_masks:
            m |= em
        return m

    def __eq__(self, other):
        return (isinstance(other, Hypergraph)
                and self.vertices == other.vertices and self.edges == other.edges)

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        return f"Hypergraph({self.n} vertices, {len(self.edges)} edges)"

    def to_text(self):
        lines = []
        for m in self.edge_masks:
            lines.append(" ".join(self.vertices[i] for i in _bits(m)))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text):
        edges = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            edges.append(line.split())
        return cls(edges)


def _bits(mask):
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class Graph:
    """Simple undirected graph on string-named vertices, no self-loops."""

    __slots__ = ("vertices", "edges", "_index", "adjacency")

    def __init__(self, vertices, edges):
        self.vertices = tuple(sorted(set(vertices)))
        self._index = {v: i for i, v in enumerate(self.vertices)}
        canon = set()
        adj = [0] * len(self.vertices)
        for e in edges:
            u, v = tuple(e)
            if u == v:
                raise DomainError("self-loop")
            iu, iv = self._index[u], self._index[v]
            canon.add(frozenset((u, v)))
            adj[iu] |= 1 << iv
            adj[iv] |= 1 << iu
        self.edges = frozenset(canon)
        self.adjacency = adj

    @property
    def n(self):
        return len(self.vertices)

    def index(self, v):
        try:
            return self._index[v]
        except KeyError:
            raise DomainError(f"unknown vertex {v!r}") from None

    def mask_of(self, vs):
        m = 0
        for v in vs:
            m |= 1 << self.index(v)
        return m

    def names_of(self, mask):
        return frozenset(v for i, v in enumerate(self.vertices) if mask >> i & 1)

    def adjacent(self, u, v):
        return bool(self.adjacency[self.index(u)] >> self.index(v) & 1)

    def is_clique(self, vs):
        return kernels.is_clique(self.n, self.adjacency, self.mask_of(vs))

    def edge_list(self):
        return sorted(tuple(sorted(e)) for e in self.edges)

    def as_hypergraph(self):
        """The graph viewed as a hypergraph with its 2-element edges."""
        return Hypergraph(self.edge_list(), vertices=self.vertices)

    def __eq__(self, other):
        return (isinstance(other, Graph)
                and self.vertices == other.vertices and self.edges == other.edges)

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        return f"Graph({self.n} vertices, {len(self.edges)} edges)"


@dataclass(frozen=True)
class Path:
    """Ordered vertex sequence with distinguished first/second endpoints."""

    vertices: tuple

    def __post_init__(self):
        if not self.vertices:
            raise DomainError("a path has at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise DomainError("repeated vertex on path")

    @property
    def first(self):
        return self.vertices[0]

    @property
    def second(self):
        return self.vertices[-1]

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def vertex_set(self):
        return frozenset(self.vertices)


def is_path(H, seq):
    """True iff consecutive members of seq are adjacent in H's primal graph."""
    adj = H.adjacency
    try:
        idxs = [H.index(v) for v in seq]
    except DomainError:
        return False
    if len(set(idxs)) != len(idxs) or not idxs:
        return False
    return all(adj[idxs[i]] >> idxs[i + 1] & 1 for i in range(len(idxs) - 1))


def primal_graph(H):
    """Graph on V(H) with u,v adjacent iff some edge contains both."""
    adj = H.adjacency
    edges = []
    for i in range(H.n):
        m = adj[i] >> (i + 1) << (i + 1)
        for j in _bits(m):
            edges.append((H.vertices[i], H.vertices[j]))
    return Graph(H.vertices, edges)


def induced_subhypergraph(H, subset):
    """Subhypergraph induced by subset: edges are the non-empty e ∩ subset."""
    subset = set(subset)
    if not subset <= set(H.vertices):
        raise DomainError("subset contains vertices outside V(H)")
    edges = []
    for e in H.edges:
        cut = e & subset
        if cut:
            edges.append(cut)
    return Hypergraph(edges, vertices=subset)


def remove_vertices(H, S):
    """H with the vertices of S deleted (induced on the complement)."""
    return induced_subhypergraph(H, set(H.vertices) - set(S))


def touch(H, X, Y):
    """True iff X and Y intersect or some edge intersects both."""
    xm, ym = H.mask_of(X), H.mask_of(Y)
    if xm & ym:
        return True
    return any(em & xm and em & ym for em in H.edge_masks)


def is_minimal_path(H, path):
    """No shortcut: v_i and v_j are non-adjacent whenever |i - j| > 1."""
    seq = path.vertices if isinstance(path, Path) else tuple(path)
    if not is_path(H, seq):
        raise DomainError("not a path of H")
    adj = H.adjacency
    idxs = [H.index(v) for v in seq]
    for a in range(len(idxs)):
        for b in range(a + 2, len(idxs)):
            if adj[idxs[a]] >> idxs[b] & 1:
                return False
    return True


def enumerate_minimal_paths(H, X, Y):
    """All minimal X-Y paths, deterministically ordered.

    Zero-length paths at vertices of X ∩ Y are included.
    """
    xm, ym = H.mask_of(X), H.mask_of(Y)
    raw = kernels.enumerate_minimal_paths(H.n, H.adjacency, xm, ym)
    return [Path(tuple(H.vertices[i] for i in idxs)) for idxs in raw]
