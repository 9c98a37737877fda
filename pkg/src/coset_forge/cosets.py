"""Double cosets CfC: stabilizers, equations, normal forms and essential cosets.

Conventions: c^g = g^-1 c g, so C^f = f^-1 C f and the stabilizer of f is
C_f = C & f^-1 C f.  The equation E(g, f) asks for x, y in C with x g = f y;
then g = x^-1 f y.
"""
from __future__ import annotations

import logging
import random
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import product as cartesian
from typing import Iterator, Sequence

from .automata import (
    Automaton,
    benois_reduce,
    concatenate,
    k_reduced_concat,
    same_language,
    shortest_word,
    subgroup_automaton,
    word_acceptor,
)
from .errors import (
    CentralLetterUnrespectable,
    MinimalityViolated,
    NielsenViolation,
    NotInCoset,
    RepresentativeInSubgroup,
)
from .pieces import AdmissibleWord, admissible_factorization, piece_alphabet
from .stallings import (
    NielsenBasis,
    SpanningTree,
    SubgroupGraph,
    conjugate_graph,
    conjugate_rank,
    coset_graph,
    express,
    fold,
    geodesic_spanning_tree,
    graph_generators,
    intersect_graphs,
    nielsen_basis,
    subgroup_elements,
    tree_from_edges,
)
from .words import Word, ball_size, cn, letter_order, reduced_words, shortlex_key, surviving_letters

log = logging.getLogger(__name__)


def _lift(graph: SubgroupGraph, *words: Sequence[int]) -> SubgroupGraph:
    return graph.widen(max((Word(w).rank for w in words), default=0))


def _reject_member(graph: SubgroupGraph, word: Word, name: str) -> None:
    if graph.accepts(word):
        raise RepresentativeInSubgroup(f"{name} = {word} lies in C")


def stabilizer(graph: SubgroupGraph, f: Sequence[int]) -> SubgroupGraph:
    """Graph of C_f = C & f^-1 C f."""
    graph = _lift(graph, f)
    return intersect_graphs(graph, conjugate_graph(graph, Word(f)))


def is_f_malnormal(graph: SubgroupGraph, f: Sequence[int]) -> bool:
    f = Word(f)
    graph = _lift(graph, f)
    _reject_member(graph, f, "f")
    return conjugate_rank(graph, f) == 0


@dataclass(frozen=True, eq=False)
class SolutionSet:
    """Solutions (x, y) in C x C of x g = f y.

    With ``side == "left"`` the solutions are (e x0, f^-1 e x0 g) for e in the
    parameter subgroup; with ``side == "right"`` they are (f e y0 g^-1, e y0).
    """

    kind: str
    g: Word
    f: Word
    base: tuple[Word, Word] | None
    parameter: SubgroupGraph | None
    side: str = "left"

    def __len__(self) -> int:
        raise TypeError("use kind / pairs(); a parametrized set is infinite")

    def pair(self, e: Word) -> tuple[Word, Word]:
        x0, y0 = self.base
        if self.side == "left":
            x = e * x0
            return x, self.f.inverse() * x * self.g
        y = e * y0
        return self.f * y * self.g.inverse(), y

    def pairs(self, max_param_len: int = 4) -> list[tuple[Word, Word]]:
        """Solutions whose parameter has length <= max_param_len, parameter in shortlex order."""
        if self.kind == "empty":
            return []
        if self.kind == "singleton":
            return [self.base]
        params = sorted(subgroup_elements(self.parameter, max_param_len), key=shortlex_key)
        return [self.pair(e) for e in params]

    def contains(self, x: Sequence[int], y: Sequence[int]) -> bool:
        x, y = Word(x), Word(y)
        if self.kind == "empty" or x * self.g != self.f * y:
            return False
        e = (x * self.base[0].inverse()) if self.side == "left" else (y * self.base[1].inverse())
        return self.parameter.accepts(e) if self.parameter is not None else not e


def _base_solution(graph: SubgroupGraph, g: Word, f: Word) -> Word | None:
    """Shortest x in C & f C g^-1, found in the product of two graphs."""
    target_graph, tau = coset_graph(conjugate_graph(graph, f.inverse()), f * g.inverse())
    start, goal = (0, 0), (0, tau)
    prev: dict[tuple[int, int], tuple[tuple[int, int], int] | None] = {start: None}
    queue = deque([start])
    order = letter_order(graph.rank)
    while queue:
        state = queue.popleft()
        if state == goal:
            word = []
            while prev[state] is not None:
                state, x = prev[state]
                word.append(x)
            return Word(reversed(word))
        u, v = state
        for x in order:
            t1, t2 = graph.adj[u].get(x), target_graph.adj[v].get(x)
            if t1 is None or t2 is None or (t1, t2) in prev:
                continue
            prev[(t1, t2)] = (state, x)
            queue.append((t1, t2))
    return None


def solve_equation(graph: SubgroupGraph, g: Sequence[int], f: Sequence[int]) -> SolutionSet:
    """All (x, y) in C x C with x g = f y.

    Empty iff g is not in CfC.  Otherwise the solutions are (e x0, f^-1 e x0 g)
    with e ranging over C_{f^-1} = C & f C f^-1.
    """
    g, f = Word(g), Word(f)
    graph = _lift(graph, f, g)
    _reject_member(graph, g, "g")
    _reject_member(graph, f, "f")
    x0 = _base_solution(graph, g, f)
    if x0 is None:
        return SolutionSet("empty", g, f, None, None)
    y0 = f.inverse() * x0 * g
    param = stabilizer(graph, f.inverse())
    kind = "singleton" if param.is_trivial else "parametrized"
    return SolutionSet(kind, g, f, (x0, y0), param, "left")


def solve_uniform(graph: SubgroupGraph, f: Sequence[int]) -> SolutionSet:
    """Solutions of x f = f y: the pairs (f c f^-1, c) for c in C_f."""
    f = Word(f)
    graph = _lift(graph, f)
    _reject_member(graph, f, "f")
    param = stabilizer(graph, f)
    kind = "singleton" if param.is_trivial else "parametrized"
    return SolutionSet(kind, f, f, (Word(), Word()), param, "right")


def in_double_coset(graph: SubgroupGraph, f: Sequence[int], g: Sequence[int]) -> bool:
    """g in CfC, decided by the equation solver."""
    f, g = Word(f), Word(g)
    graph = _lift(graph, f, g)
    if graph.accepts(f):
        return graph.accepts(g)
    if graph.accepts(g):
        return False
    return _base_solution(graph, g, f) is not None


def membership(graph: SubgroupGraph, f: Sequence[int], g: Sequence[int], cross_check: bool = True) -> bool:
    """g in CfC via the double coset automaton."""
    f, g = Word(f), Word(g)
    graph = _lift(graph, f, g)
    if graph.accepts(f):
        return graph.accepts(g)
    answer = double_coset_automaton(graph, f).accepts(g)
    if cross_check:
        assert answer == in_double_coset(graph, f, g), f"automaton and solver disagree on {g}"
    return answer


@lru_cache(maxsize=256)
def _benois_double_coset(graph: SubgroupGraph, f: Word) -> Automaton:
    a_c = subgroup_automaton(graph)
    return benois_reduce(concatenate(a_c, word_acceptor(f, graph.rank), a_c))


def minimal_representative(graph: SubgroupGraph, f: Sequence[int]) -> Word:
    """Shortlex-least shortest word of CfC."""
    f = Word(f)
    graph = _lift(graph, f)
    _reject_member(graph, f, "f")
    return shortest_word(_benois_double_coset(graph, f))


@dataclass(frozen=True, eq=False)
class DoubleCoset:
    C: SubgroupGraph
    f: Word
    C_f: SubgroupGraph
    essential: bool
    minimal_rep: Word

    def __contains__(self, g) -> bool:
        return in_double_coset(self.C, self.f, g)


def double_coset(graph: SubgroupGraph, f: Sequence[int]) -> DoubleCoset:
    f = Word(f)
    graph = _lift(graph, f)
    _reject_member(graph, f, "f")
    c_f = stabilizer(graph, f)
    return DoubleCoset(graph, f, c_f, not c_f.is_trivial, minimal_representative(graph, f))


# ---------------------------------------------------------------- transversal


@dataclass(frozen=True, eq=False)
class RelativeTransversal:
    """Schreier transversal of D in C over the alphabet Y of Nielsen generators.

    ``graph`` is the subgroup graph of D over Y (letter i is h_i), ``tree``
    its spanning tree, ``z`` the Y-words of D's generators and
    ``decompositions[i] = (t1, y, t2)`` with z[i] = t1 . y . t2^-1.
    """

    basis: NielsenBasis
    graph: SubgroupGraph
    tree: SpanningTree
    z: tuple[Word, ...]
    decompositions: tuple[tuple[Word, int, Word], ...]
    respects_centers: bool = True

    @property
    def internal(self) -> tuple[Word, ...]:
        return self.tree.words

    def expand(self, yword: Sequence[int]) -> Word:
        return self.basis.expand(yword)

    def representative(self, yword: Sequence[int]) -> Word:
        """Transversal element (as a Y-word) of the coset D . y."""
        yword = Word(yword)
        v, n = self.graph.read(yword)
        return self.tree.words[v] * yword[n:]

    def contains(self, yword: Sequence[int]) -> bool:
        return self.representative(yword) == Word(yword)

    def z_factorizations(self) -> list[AdmissibleWord]:
        sigma = piece_alphabet(self.basis)
        return [admissible_factorization(sigma, self.expand(d)) for d in self.z]

    def automaton(self) -> Automaton:
        """Acceptor over Y of the (prefix-closed) transversal."""
        r = self.basis.r
        letters = letter_order(r)
        n = self.graph.n_vertices
        free = {y: n + i for i, y in enumerate(letters)}
        arrows = []
        for v, p in enumerate(self.tree.parent):
            if p is not None:
                arrows.append((p[0], p[1], v))
        for v in range(n):
            arrows += [(v, y, free[y]) for y in letters if y not in self.graph.adj[v]]
        arrows += [(free[x], y, free[y]) for x in letters for y in letters if y != -x]
        return Automaton(r, n + len(letters), arrows, [0], range(n + len(letters)))

    def x_automaton(self) -> Automaton:
        """Canonical DFA of the transversal's X-expansions."""
        ya = self.automaton()
        n = ya.n
        arrows = []
        for s, y, t in ya.arrows:
            h = self.expand([y])
            prev = s
            for i, x in enumerate(h):
                nxt = t if i == len(h) - 1 else n
                if nxt == n:
                    n += 1
                arrows.append((prev, x, nxt))
                prev = nxt
        return benois_reduce(Automaton(self.basis.ambient_rank, n, arrows, ya.initial, ya.final))


def _edge_path(graph: SubgroupGraph, yword: Sequence[int]) -> list[tuple[int, int, int]]:
    out, v = [], 0
    for y in yword:
        t = graph.adj[v][y]
        out.append((v, y, t) if y > 0 else (t, -y, v))
        v = t
    return out


def _center_first(n: int) -> list[int]:
    c = n // 2
    order = [c]
    for d in range(1, n):
        order += [i for i in (c - d, c + d) if 0 <= i < n]
    return order


def _decompose(graph: SubgroupGraph, tree: SpanningTree, yword: Word) -> tuple[Word, int, Word]:
    in_tree = tree.edges
    path = _edge_path(graph, yword)
    outside = [i for i, e in enumerate(path) if e not in in_tree]
    j = outside[0] if len(outside) == 1 else len(yword) // 2
    return yword[:j], yword[j], yword[j + 1:].inverse()


def _respecting_tree(graph: SubgroupGraph, z: Sequence[Word], budget: int = 50000) -> SpanningTree | None:
    paths = [_edge_path(graph, d) for d in z]
    options = [_center_first(len(d)) for d in z]
    tried = 0
    for choice in cartesian(*options):
        tried += 1
        if tried > budget:
            return None
        mus = [paths[i][j] for i, j in enumerate(choice)]
        if len(set(mus)) != len(mus):
            continue
        mu_set = set(mus)
        if any([e for e in paths[i] if e in mu_set] != [mus[i]] for i in range(len(z))):
            continue
        try:
            tree = tree_from_edges(graph, set(graph.edges) - mu_set)
        except ValueError:
            continue
        if tree.is_geodesic(graph):
            return tree
    return None


def relative_transversal(C: SubgroupGraph | NielsenBasis, D: SubgroupGraph | None = None,
                         z: Sequence[Sequence[int]] | None = None, strict: bool = True) -> RelativeTransversal:
    """Relative Schreier transversal of D <= C over the Nielsen generators of C.

    D is given either as an X-graph or by the Y-words ``z`` of a free basis.
    The tree is chosen so that each z_i reads exactly one edge outside it,
    at a position as central as possible, and is geodesic.  If no such tree
    exists, ``strict`` raises :class:`CentralLetterUnrespectable`; otherwise
    the breadth-first tree is used and a warning is logged.
    """
    basis = C if isinstance(C, NielsenBasis) else nielsen_basis(C)
    if z is None:
        if D is None:
            raise ValueError("give D or z")
        z = [express(basis, w) for w in graph_generators(D)]
    z = tuple(Word(d) for d in z)
    graph = fold(z, basis.r) if basis.r else SubgroupGraph(0, [{}])
    if graph.subgroup_rank != len(z):
        raise ValueError("the words z do not form a free basis of D")
    tree = _respecting_tree(graph, z)
    respects = tree is not None
    if tree is None:
        message = "no geodesic subtree respects the central letters of D's generators"
        if strict:
            raise CentralLetterUnrespectable(message)
        log.warning("%s; falling back to the breadth-first tree", message)
        tree = geodesic_spanning_tree(graph)
    decomps = tuple(_decompose(graph, tree, d) for d in z)
    return RelativeTransversal(basis, graph, tree, z, decomps, respects)


@lru_cache(maxsize=256)
def _transversal_for(graph: SubgroupGraph, f: Word) -> RelativeTransversal:
    return relative_transversal(nielsen_basis(graph), stabilizer(graph, f), strict=False)


def normal_form(graph: SubgroupGraph, f: Sequence[int], g: Sequence[int],
                transversal: RelativeTransversal | None = None) -> tuple[Word, Word]:
    """The unique (c, t) with g = c f t, c in C and t in the transversal T.

    When C_f = 1 the transversal is all of C.
    """
    f, g = Word(f), Word(g)
    graph = _lift(graph, f, g)
    _reject_member(graph, f, "f")
    if graph.accepts(g):
        raise NotInCoset(f"{g} lies in C, not in CfC")
    sol = solve_equation(graph, g, f)
    if sol.kind == "empty":
        raise NotInCoset(f"{g} is not in C{f}C")
    y0 = sol.base[1]
    if stabilizer(graph, f).is_trivial:
        t = y0
    else:
        rt = transversal or _transversal_for(graph, f)
        t = rt.expand(rt.representative(express(rt.basis, y0)))
    c = g * t.inverse() * f.inverse()
    assert graph.accepts(c) and c * f * t == g
    return c, t


# ---------------------------------------------------------------- automata


@lru_cache(maxsize=256)
def _double_coset_automaton(graph: SubgroupGraph, f: Word, verify: bool) -> Automaton:
    f = minimal_representative(graph, f)
    reference = _benois_double_coset(graph, f)
    try:
        basis = nielsen_basis(graph)
    except NielsenViolation as exc:
        log.warning("no Nielsen basis (%s); using the Benois construction", exc)
        return reference
    a_c = subgroup_automaton(graph)
    left = k_reduced_concat(a_c, word_acceptor(f, graph.rank), basis.k)
    if stabilizer(graph, f).is_trivial:
        right = a_c
    else:
        right = _transversal_for(graph, f).x_automaton()
    result = k_reduced_concat(left, right, basis.k)
    if verify and not same_language(result, reference):
        log.warning("CfT composition disagrees with the Benois construction for f = %s", f)
        return reference
    return result


def double_coset_automaton(graph: SubgroupGraph, f: Sequence[int], verify: bool = True) -> Automaton:
    """Canonical DFA accepting exactly the reduced words of CfC.

    Malnormal case: C . f . C as k-reduced products.  Essential case:
    C . f . T with T a relative transversal of C_f in C, which already
    covers all of CfC.  With ``verify`` the result is compared with the
    Benois construction, which wins on disagreement.
    """
    f = Word(f)
    graph = _lift(graph, f)
    _reject_member(graph, f, "f")
    return _double_coset_automaton(graph, f, verify)


# ---------------------------------------------------------------- essential cosets


def generator_pieces(words: Sequence[Word]) -> set[Word]:
    """All subwords (including the empty word) of the words and their inverses."""
    out = {Word()}
    for h in words:
        for w in (h, h.inverse()):
            for i in range(len(w)):
                for j in range(i + 1, len(w) + 1):
                    out.add(w[i:j])
    return out


def essential_cosets(graph: SubgroupGraph) -> list[DoubleCoset]:
    """All essential double cosets CfC, one per coset, sorted by minimal representative.

    Candidates are the reduced products of two pieces of Nielsen generators.
    """
    words = graph_generators(graph)
    pieces = generator_pieces(words)
    candidates = sorted({u * v for u in pieces for v in pieces}, key=shortlex_key)
    found: list[DoubleCoset] = []
    for f in candidates:
        if graph.accepts(f):
            continue
        if conjugate_rank(graph, f) == 0:
            continue
        if any(in_double_coset(graph, dc.f, f) for dc in found):
            continue
        rep = minimal_representative(graph, f)
        found.append(DoubleCoset(graph, rep, stabilizer(graph, rep), True, rep))
    return sorted(found, key=lambda dc: shortlex_key(dc.minimal_rep))


# ---------------------------------------------------------------- cancellation bounds


def random_reduced_word(rng: random.Random, rank: int, length: int) -> Word:
    letters = letter_order(rank)
    out: list[int] = []
    while len(out) < length:
        x = rng.choice(letters)
        if not out or out[-1] != -x:
            out.append(x)
    return Word._trusted(out)


def _y_words(rng: random.Random, r: int, max_len: int, samples: int) -> Iterator[Word]:
    for _ in range(samples):
        yield random_reduced_word(rng, r, rng.randint(0, max_len))


def verify_k_reduced(graph: SubgroupGraph, f: Sequence[int], samples: int = 1000, seed: int = 0,
                     pairs: str = "auto", max_y_len: int | None = None, cap: int = 32) -> dict:
    """Sample cn(c, f, d) over C x C (malnormal) or C x T (essential).

    f is first replaced by its minimal representative.  Y-lengths go up to
    ``max_y_len`` (default min(2p + 2, cap)).  When the sample space is no
    larger than ``samples**2`` pairs it is enumerated exhaustively.
    """
    graph = _lift(graph, f)
    f = minimal_representative(graph, f)
    basis = nielsen_basis(graph)
    M, p, k = basis.M, basis.p, basis.k
    essential = not stabilizer(graph, f).is_trivial
    mode = pairs if pairs != "auto" else ("CxT" if essential else "CxC")
    if mode not in ("CxC", "CxT"):
        raise ValueError(f"unknown pairs mode {pairs!r}")
    max_len = max_y_len if max_y_len is not None else min(2 * p + 2, cap)
    r = basis.r
    rng = random.Random(seed)
    if mode == "CxT" and essential:
        rt = _transversal_for(graph, f)

        def right(y: Word) -> Word:
            return rt.expand(rt.representative(y))
    else:
        def right(y: Word) -> Word:
            return basis.expand(y)

    if r and ball_size(r, max_len) ** 2 <= samples:
        ys = list(reduced_words(r, max_len))
        combos = [(basis.expand(a), right(b)) for a in ys for b in ys]
    else:
        lefts = _y_words(rng, r, max_len, samples)
        rights = _y_words(rng, r, max_len, samples)
        combos = [(basis.expand(a), right(b)) for a, b in zip(lefts, rights)]
    combos = list(dict.fromkeys(combos))
    max_cn, witness = -1, (Word(), Word())
    max_partial = 0
    for c, d in combos:
        value = cn(c, f, d)
        if len(c * f * d) < len(f):
            raise MinimalityViolated(f"{c} . {f} . {d} is shorter than f")
        if value > max_cn:
            max_cn, witness = value, (c, d)
        if any(i == 1 for i, _ in surviving_letters([c, f, d])):
            max_partial = max(max_partial, value)
    return {
        "f": str(f),
        "pairs": mode,
        "seed": seed,
        "M": M,
        "p": p,
        "k": k,
        "samples": len(combos),
        "max_y_len": max_len,
        "max_cn": max_cn,
        "witness_c": str(witness[0]),
        "witness_d": str(witness[1]),
        "violation": max_cn > k,
        "max_cn_partial": max_partial,
        "bound_2M": 2 * M,
        "violation_2M": max_partial > 2 * M,
    }
