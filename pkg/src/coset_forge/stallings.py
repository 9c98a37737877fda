"""Stallings subgroup graphs of finitely generated subgroups of F(X).

A :class:`SubgroupGraph` is stored with signed adjacency: ``adj[v][x] = w``
means an edge v --x--> w when ``x > 0`` and an edge w --(-x)--> v when
``x < 0``.  Vertex 0 is the basepoint.  Graphs are folded, trimmed to their
core, and numbered by a breadth-first search from the basepoint in letter
order, so two graphs recognise the same subgroup iff they compare equal.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import NielsenViolation, NotGeodesic, NotInSubgroup
from .words import Alphabet, Word, ball_size, letter_order, reduced_words, shortlex_key, surviving_letters


def _fold(n: int, edges: Iterable[tuple[int, int, int]], keep: Sequence[int], rank: int):
    """Fold a labelled graph and trim it to the core around ``keep``.

    ``keep[0]`` becomes the basepoint.  Returns the canonically numbered
    adjacency and the new numbers of the ``keep`` vertices.
    """
    parent = list(range(n))
    adj: list[dict[int, int]] = [{} for _ in range(n)]
    pending: list[tuple[int, int]] = []

    def find(v: int) -> int:
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    def link(u: int, x: int, v: int) -> None:
        t = adj[u].get(x)
        if t is None:
            adj[u][x] = v
        elif find(t) != find(v):
            pending.append((t, v))

    def drain() -> None:
        while pending:
            a, b = pending.pop()
            a, b = find(a), find(b)
            if a == b:
                continue
            if b < a:
                a, b = b, a
            parent[b] = a
            moved, adj[b] = adj[b], {}
            for x, t in moved.items():
                link(a, x, t)

    for u, x, v in edges:
        u, v = find(u), find(v)
        link(u, x, v)
        link(v, -x, u)
        drain()

    roots = {find(v) for v in range(n)}
    clean = {r: {x: find(t) for x, t in adj[r].items()} for r in roots}
    protected = {find(v) for v in keep}

    queue = deque(v for v in clean if v not in protected and len(clean[v]) <= 1)
    while queue:
        v = queue.popleft()
        if v not in clean:
            continue
        for x, t in clean.pop(v).items():
            if t in clean and t != v:
                clean[t].pop(-x, None)
                if t not in protected and len(clean[t]) <= 1:
                    queue.append(t)

    base = find(keep[0])
    order = letter_order(rank)
    number = {base: 0}
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for x in order:
            t = clean[v].get(x)
            if t is not None and t not in number:
                number[t] = len(number)
                queue.append(t)
    out: list[dict[int, int]] = [{} for _ in number]
    for v, i in number.items():
        out[i] = {x: number[t] for x, t in sorted(clean[v].items(), key=lambda kv: order.index(kv[0]))}
    return out, [number[find(v)] for v in keep]


def _petals(generators: Sequence[Word]):
    edges: list[tuple[int, int, int]] = []
    n = 1
    for w in generators:
        if not w:
            continue
        prev = 0
        for i, x in enumerate(w):
            if i == len(w) - 1:
                nxt = 0
            else:
                nxt = n
                n += 1
            edges.append((prev, x, nxt))
            prev = nxt
    return n, edges


class SubgroupGraph:
    """Folded core graph with basepoint 0 over an alphabet of ``rank`` letters."""

    def __init__(self, rank: int, adj: Sequence[dict[int, int]]):
        self.rank = rank
        self.adj: tuple[dict[int, int], ...] = tuple(adj)

    @classmethod
    def from_edges(cls, rank: int, n: int, edges: Iterable[tuple[int, int, int]], base: int = 0) -> "SubgroupGraph":
        adj, _ = _fold(n, edges, [base], rank)
        return cls(rank, adj)

    @property
    def n_vertices(self) -> int:
        return len(self.adj)

    @cached_property
    def edges(self) -> tuple[tuple[int, int, int], ...]:
        """Positively labelled edges (source, letter, target) in canonical order."""
        return tuple((u, x, v) for u, nbrs in enumerate(self.adj) for x, v in nbrs.items() if x > 0)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def subgroup_rank(self) -> int:
        return self.n_edges - self.n_vertices + 1

    @property
    def is_trivial(self) -> bool:
        return self.n_edges == 0

    def widen(self, rank: int) -> "SubgroupGraph":
        """The same subgroup viewed in a free group of larger rank."""
        return self if rank <= self.rank else SubgroupGraph(rank, self.adj)

    def read(self, word: Sequence[int], start: int = 0) -> tuple[int, int]:
        """Follow ``word`` from ``start``; return (vertex reached, letters read)."""
        v = start
        for i, x in enumerate(word):
            t = self.adj[v].get(x)
            if t is None:
                return v, i
            v = t
        return v, len(word)

    def accepts(self, word: Sequence[int]) -> bool:
        v, n = self.read(word)
        return n == len(word) and v == 0

    __contains__ = accepts

    @cached_property
    def distances(self) -> tuple[int, ...]:
        dist = {0: 0}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for t in self.adj[v].values():
                if t not in dist:
                    dist[t] = dist[v] + 1
                    queue.append(t)
        return tuple(dist[v] for v in range(self.n_vertices))

    def is_folded(self) -> bool:
        seen_out: set[tuple[int, int]] = set()
        seen_in: set[tuple[int, int]] = set()
        for u, x, v in self.edges:
            if (u, x) in seen_out or (v, x) in seen_in:
                return False
            seen_out.add((u, x))
            seen_in.add((v, x))
        return True

    def is_core(self) -> bool:
        return all(len(nbrs) >= 2 for v, nbrs in enumerate(self.adj) if v != 0)

    def __eq__(self, other) -> bool:
        return isinstance(other, SubgroupGraph) and self.rank == other.rank and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.rank, self.edges))

    def __repr__(self) -> str:
        return f"SubgroupGraph(rank={self.rank}, vertices={self.n_vertices}, edges={self.n_edges})"

    def to_json(self, alphabet: Alphabet | None = None) -> dict:
        alphabet = alphabet or Alphabet(self.rank)
        return {
            "vertices": list(range(self.n_vertices)),
            "basepoint": 0,
            "edges": [{"src": u, "label": alphabet.name(x), "dst": v} for u, x, v in self.edges],
        }

    def to_dot(self, alphabet: Alphabet | None = None, name: str = "G") -> str:
        alphabet = alphabet or Alphabet(self.rank)
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for v in range(self.n_vertices):
            shape = "doublecircle" if v == 0 else "circle"
            lines.append(f'  {v} [shape={shape}];')
        for u, x, v in self.edges:
            lines.append(f'  {u} -> {v} [label="{alphabet.name(x)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _infer_rank(words: Iterable[Sequence[int]], rank: int | None) -> int:
    used = max((abs(x) for w in words for x in w), default=1)
    if rank is None:
        return max(used, 1)
    if used > rank:
        raise ValueError(f"word uses generator {used} outside rank {rank}")
    return rank


def fold(generators: Sequence[Word], rank: int | None = None) -> SubgroupGraph:
    """Core Stallings graph of the subgroup generated by ``generators``."""
    generators = [Word(g) for g in generators]
    rank = _infer_rank(generators, rank)
    n, edges = _petals(generators)
    return SubgroupGraph.from_edges(rank, n, edges)


def accepts(graph: SubgroupGraph, word: Sequence[int]) -> bool:
    return graph.accepts(word)


@dataclass(frozen=True)
class SpanningTree:
    """``parent[v] = (u, x)``: the tree reaches v from u by reading letter x."""

    parent: tuple
    words: tuple[Word, ...]

    @property
    def edges(self) -> frozenset[tuple[int, int, int]]:
        out = set()
        for v, p in enumerate(self.parent):
            if p is not None:
                u, x = p
                out.add((u, x, v) if x > 0 else (v, -x, u))
        return frozenset(out)

    def is_geodesic(self, graph: SubgroupGraph) -> bool:
        return tuple(len(w) for w in self.words) == graph.distances


def _tree_from_parents(parent: dict[int, tuple[int, int] | None], n: int) -> SpanningTree:
    words: dict[int, Word] = {}

    def word(v: int) -> Word:
        if v not in words:
            p = parent[v]
            words[v] = Word() if p is None else Word._trusted(word(p[0]) + (p[1],))
        return words[v]

    return SpanningTree(tuple(parent[v] for v in range(n)), tuple(word(v) for v in range(n)))


def geodesic_spanning_tree(graph: SubgroupGraph) -> SpanningTree:
    """Breadth-first tree from the basepoint, letters tried in order a, A, b, B, ..."""
    order = letter_order(graph.rank)
    parent: dict[int, tuple[int, int] | None] = {0: None}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for x in order:
            t = graph.adj[v].get(x)
            if t is not None and t not in parent:
                parent[t] = (v, x)
                queue.append(t)
    return _tree_from_parents(parent, graph.n_vertices)


def tree_from_edges(graph: SubgroupGraph, tree_edges: Iterable[tuple[int, int, int]]) -> SpanningTree:
    """Spanning tree made of the given positive edges; ``ValueError`` if they do not span."""
    allowed = set(tree_edges)
    order = letter_order(graph.rank)
    parent: dict[int, tuple[int, int] | None] = {0: None}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for x in order:
            t = graph.adj[v].get(x)
            if t is None or t in parent:
                continue
            if (v, x, t) in allowed or (t, -x, v) in allowed:
                parent[t] = (v, x)
                queue.append(t)
    if len(parent) != graph.n_vertices or len(allowed) != graph.n_vertices - 1:
        raise ValueError("edges do not form a spanning tree")
    return _tree_from_parents(parent, graph.n_vertices)


@dataclass(frozen=True)
class NielsenGenerator:
    """h = s1 . mu . s2^-1 with the central letter ``mu`` surviving."""

    h: Word
    s1: Word
    mu: int
    s2: Word
    edge: tuple[int, int, int] | None = None

    @property
    def center(self) -> int:
        return len(self.s1)

    def inverse(self) -> "NielsenGenerator":
        edge = None if self.edge is None else (self.edge[2], -self.edge[1], self.edge[0])
        return NielsenGenerator(self.h.inverse(), self.s2, -self.mu, self.s1, edge)

    def __str__(self) -> str:
        s2inv = self.s2.inverse()
        return f"{self.s1 or ''}∘{Word([self.mu])}∘{s2inv or ''}".strip("∘")


def nielsen_constants(words: Sequence[Word], ambient_rank: int) -> tuple[int, int, int]:
    M = max((len(w) for w in words), default=0) // 2 + 1
    p = ball_size(ambient_rank, 2 * M)
    return M, p, 2 * p * M


@dataclass(frozen=True, eq=False)
class NielsenBasis:
    """Nielsen generators Y = (h_1..h_r) with their central-letter splits.

    Signed indices follow the convention h_{r+i} = h_i^-1, i in 1..r.
    """

    generators: tuple[NielsenGenerator, ...]
    ambient_rank: int
    graph: SubgroupGraph | None = None
    tree: SpanningTree | None = None
    M: int = field(init=False)
    p: int = field(init=False)
    k: int = field(init=False)

    def __post_init__(self):
        M, p, k = nielsen_constants(self.words, self.ambient_rank)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "k", k)

    @classmethod
    def from_words(cls, words: Sequence[Word], rank: int | None = None) -> "NielsenBasis":
        """Split each word around its middle letter; no graph is attached."""
        words = [Word(w) for w in words]
        gens = []
        for h in words:
            if not h:
                raise ValueError("generators must be nontrivial")
            c = len(h) // 2
            gens.append(NielsenGenerator(h, h[:c], h[c], h[c + 1:].inverse()))
        return cls(tuple(gens), _infer_rank(words, rank))

    @property
    def words(self) -> tuple[Word, ...]:
        return tuple(g.h for g in self.generators)

    @property
    def r(self) -> int:
        return len(self.generators)

    def signed(self, index: int) -> NielsenGenerator:
        """Generator by signed index 1..2r."""
        if not 1 <= index <= 2 * self.r:
            raise IndexError(index)
        if index <= self.r:
            return self.generators[index - 1]
        return self.generators[index - self.r - 1].inverse()

    def inverse_index(self, index: int) -> int:
        return index + self.r if index <= self.r else index - self.r

    def index_of_letter(self, y: int) -> int:
        return y if y > 0 else self.r - y

    def letter_of_index(self, index: int) -> int:
        return index if index <= self.r else -(index - self.r)

    def expand(self, yword: Sequence[int]) -> Word:
        """Reduced X-word of a word over Y (letters +-1..+-r)."""
        out = Word()
        for y in yword:
            out = out * (self.generators[y - 1].h if y > 0 else self.generators[-y - 1].h.inverse())
        return out


def nielsen_violations(basis: NielsenBasis) -> list[str]:
    """Failures of the splitting and central-letter survival properties."""
    problems: list[str] = []
    r = basis.r
    signed = [basis.signed(i) for i in range(1, 2 * r + 1)]
    for i, g in enumerate(signed[:r], start=1):
        if list(g.h) != list(g.s1) + [g.mu] + list(g.s2.inverse()):
            problems.append(f"h{i}: word is not s1.mu.s2^-1 without cancellation")
        if abs(len(g.s1) - len(g.s2)) > 1:
            problems.append(f"h{i}: |l(s1) - l(s2)| = {abs(len(g.s1) - len(g.s2))} > 1")
        if basis.tree is not None:
            internal = set(basis.tree.words)
            if g.s1 not in internal or g.s2 not in internal:
                problems.append(f"h{i}: s1 or s2 is not an internal Schreier representative")
    for i, gi in enumerate(signed, start=1):
        for j, gj in enumerate(signed, start=1):
            if j == basis.inverse_index(i):
                continue
            alive = set(surviving_letters([gi.h, gj.h]))
            if (0, gi.center) not in alive or (1, gj.center) not in alive:
                problems.append(f"pair h{i} h{j}: a central letter cancels")
    for i, gi in enumerate(signed, start=1):
        for j, gj in enumerate(signed, start=1):
            if j == basis.inverse_index(i):
                continue
            for k, gk in enumerate(signed, start=1):
                if k == basis.inverse_index(j):
                    continue
                if (1, gj.center) not in set(surviving_letters([gi.h, gj.h, gk.h])):
                    problems.append(f"triple h{i} h{j} h{k}: central letter of h{j} cancels")
    return problems


def nielsen_basis(graph: SubgroupGraph, tree: SpanningTree | None = None) -> NielsenBasis:
    """One generator per edge outside the tree: h = path(1->u) . x . path(1->v)^-1."""
    if tree is None:
        tree = geodesic_spanning_tree(graph)
    if not tree.is_geodesic(graph):
        raise NotGeodesic("spanning tree is not geodesic")
    in_tree = tree.edges
    gens = []
    for u, x, v in graph.edges:
        if (u, x, v) in in_tree:
            continue
        s1, s2 = tree.words[u], tree.words[v]
        gens.append(NielsenGenerator(s1 * Word([x]) * s2.inverse(), s1, x, s2, (u, x, v)))
    basis = NielsenBasis(tuple(gens), graph.rank, graph, tree)
    problems = nielsen_violations(basis)
    if problems:
        raise NielsenViolation("; ".join(problems[:5]))
    return basis


def graph_generators(graph: SubgroupGraph, tree: SpanningTree | None = None) -> list[Word]:
    """Free basis read off the edges outside ``tree``; no Nielsen checks."""
    tree = tree or geodesic_spanning_tree(graph)
    in_tree = tree.edges
    return [tree.words[u] * Word([x]) * tree.words[v].inverse() for u, x, v in graph.edges if (u, x, v) not in in_tree]


def express(basis: NielsenBasis, c: Sequence[int]) -> Word:
    """Y-word of ``c`` read off its path in the subgroup graph."""
    graph, tree = basis.graph, basis.tree
    if graph is None or tree is None:
        raise ValueError("basis has no subgroup graph attached")
    index = {g.edge: i for i, g in enumerate(basis.generators, start=1)}
    out = []
    v = 0
    for x in c:
        t = graph.adj[v].get(x)
        if t is None:
            raise NotInSubgroup(f"{Word(c)} is not in the subgroup")
        edge = (v, x, t) if x > 0 else (t, -x, v)
        if edge in index:
            out.append(index[edge] if x > 0 else -index[edge])
        v = t
    if v != 0:
        raise NotInSubgroup(f"{Word(c)} is not in the subgroup")
    return Word(out)


def intersect_graphs(g1: SubgroupGraph, g2: SubgroupGraph) -> SubgroupGraph:
    """Core of the basepoint component of the pullback; recognises C1 and C2's intersection."""
    rank = max(g1.rank, g2.rank)
    number = {(0, 0): 0}
    queue = deque([(0, 0)])
    edges = []
    while queue:
        pair = queue.popleft()
        u1, u2 = pair
        for x, t1 in g1.adj[u1].items():
            t2 = g2.adj[u2].get(x)
            if t2 is None:
                continue
            if (t1, t2) not in number:
                number[(t1, t2)] = len(number)
                queue.append((t1, t2))
            if x > 0:
                edges.append((number[pair], x, number[(t1, t2)]))
    return SubgroupGraph.from_edges(rank, len(number), edges)


def pullback_rank(g1: SubgroupGraph, g2: SubgroupGraph) -> int:
    """Rank of the intersection of the two subgroups, without folding.

    The basepoint component of the pullback is folded already, so its
    fundamental group has rank edges - vertices + 1.
    """
    return _pullback_rank(g1.adj, 0, g2.adj, 0)


def _pullback_rank(adj1, b1: int, adj2, b2: int) -> int:
    seen = {(b1, b2)}
    queue = deque([(b1, b2)])
    edges = 0
    while queue:
        u1, u2 = queue.popleft()
        for x, t1 in adj1[u1].items():
            t2 = adj2[u2].get(x)
            if t2 is None:
                continue
            if x > 0:
                edges += 1
            if (t1, t2) not in seen:
                seen.add((t1, t2))
                queue.append((t1, t2))
    return edges - len(seen) + 1


def conjugate_rank(graph: SubgroupGraph, f: Sequence[int]) -> int:
    """Rank of C & f^-1 C f, computed on the graph with a hair for f.

    The unread suffix of f hangs off the vertex where reading stops; it
    needs no folding since its first letter is missing there.
    """
    v, n = graph.read(f)
    adj = [dict(d) for d in graph.adj]
    for x in Word(f)[n:]:
        adj.append({-x: v})
        adj[v][x] = len(adj) - 1
        v = len(adj) - 1
    return _pullback_rank(graph.adj, 0, adj, v)


def _attach_path(graph: SubgroupGraph, word: Sequence[int]):
    rank = max(graph.rank, Word(word).rank)
    edges = list(graph.edges)
    n = graph.n_vertices
    prev = 0
    for x in word:
        edges.append((prev, x, n))
        prev = n
        n += 1
    return rank, n, edges, prev


def conjugate_graph(graph: SubgroupGraph, f: Sequence[int]) -> SubgroupGraph:
    """Graph of f^-1 C f: attach a path labelled f and move the basepoint to its end."""
    rank, n, edges, end = _attach_path(graph, f)
    adj, _ = _fold(n, edges, [end], rank)
    return SubgroupGraph(rank, adj)


def coset_graph(graph: SubgroupGraph, u: Sequence[int]) -> tuple[SubgroupGraph, int]:
    """Graph whose reduced paths from 0 to the returned vertex spell the right coset C u."""
    rank, n, edges, end = _attach_path(graph, u)
    adj, (_, tau) = _fold(n, edges, [0, end], rank)
    return SubgroupGraph(rank, adj), tau


def coset_distance(graph: SubgroupGraph, u: Sequence[int]) -> int:
    """Length of a shortest word in the right coset C u."""
    v, n = graph.read(u)
    return graph.distances[v] + len(u) - n


def schreier_transversal(graph: SubgroupGraph, tree: SpanningTree, max_len: int) -> list[Word]:
    """Geodesic Schreier transversal of C, truncated at ``max_len``, in shortlex order.

    Internal representatives are the tree words; external ones continue a tree
    word through a letter missing at its endpoint into the hanging trees of
    the Schreier graph.
    """
    if not tree.is_geodesic(graph):
        raise NotGeodesic("spanning tree is not geodesic")
    out = [w for w in tree.words if len(w) <= max_len]
    for v, t in enumerate(tree.words):
        for x in letter_order(graph.rank):
            if x in graph.adj[v] or len(t) + 1 > max_len:
                continue
            for tail in reduced_words(graph.rank, max_len - len(t) - 1):
                if tail and tail[0] == -x:
                    continue
                out.append(Word._trusted(t + (x,) + tail))
    return sorted(out, key=shortlex_key)


def subgroup_elements(graph: SubgroupGraph, max_len: int) -> Iterator[Word]:
    """Reduced words of length <= max_len accepted by the graph (depth-first, unordered)."""
    dist = graph.distances
    stack: list[tuple[int, tuple[int, ...]]] = [(0, ())]
    while stack:
        v, w = stack.pop()
        if v == 0:
            yield Word._trusted(w)
        if len(w) == max_len:
            continue
        for x, t in graph.adj[v].items():
            if (w and w[-1] == -x) or len(w) + 1 + dist[t] > max_len:
                continue
            stack.append((t, w + (x,)))
