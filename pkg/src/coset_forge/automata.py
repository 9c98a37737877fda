"""Finite automata over X and its inverses.

Letters are signed ints as in :mod:`coset_forge.words`; label 0 is epsilon.
DFAs are partial: a missing transition goes to an implicit dead state.
"""
from __future__ import annotations

from collections import defaultdict, deque
from functools import cached_property
from typing import Iterable, Sequence

from .errors import KBoundViolated
from .stallings import SubgroupGraph
from .words import Word, cn, letter_order

EPS = 0


class Automaton:
    """An epsilon-NFA with states 0..n-1."""

    def __init__(self, rank: int, n: int, arrows: Iterable[tuple[int, int, int]],
                 initial: Iterable[int], final: Iterable[int]):
        self.rank = rank
        self.n = n
        self.arrows = frozenset(arrows)
        self.initial = frozenset(initial)
        self.final = frozenset(final)

    @cached_property
    def out(self) -> list[dict[int, list[int]]]:
        out: list[dict[int, list[int]]] = [defaultdict(list) for _ in range(self.n)]
        for s, x, t in sorted(self.arrows):
            out[s][x].append(t)
        return out

    @cached_property
    def deterministic(self) -> bool:
        return (len(self.initial) == 1
                and all(EPS not in o and all(len(ts) == 1 for ts in o.values()) for o in self.out))

    def closure(self, states: Iterable[int]) -> frozenset[int]:
        seen = set(states)
        stack = list(seen)
        while stack:
            s = stack.pop()
            for t in self.out[s].get(EPS, ()):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    def step(self, states: Iterable[int], x: int) -> frozenset[int]:
        return self.closure(t for s in states for t in self.out[s].get(x, ()))

    def accepts(self, word: Sequence[int]) -> bool:
        current = self.closure(self.initial)
        for x in word:
            current = self.step(current, x)
            if not current:
                return False
        return bool(current & self.final)

    def enumerate(self, max_len: int) -> list[Word]:
        return enumerate_words(self, max_len)

    def encoding(self) -> tuple:
        return (self.rank, self.n, tuple(sorted(self.initial)), tuple(sorted(self.final)), tuple(sorted(self.arrows)))

    def __repr__(self) -> str:
        kind = "DFA" if self.deterministic else "NFA"
        return f"Automaton({kind}, rank={self.rank}, states={self.n}, arrows={len(self.arrows)})"

    def to_text(self) -> str:
        def label(x: int) -> str:
            return "eps" if x == EPS else str(Word([x]))
        lines = [f"states {self.n} initial {','.join(map(str, sorted(self.initial)))} "
                 f"final {','.join(map(str, sorted(self.final)))}"]
        lines += [f"{s} {label(x)} {t}" for s, x, t in sorted(self.arrows)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, rank: int | None = None) -> "Automaton":
        from .words import parse_word
        lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        head = lines[0]
        if head[0] != "states" or head[2] != "initial" or head[4] != "final":
            raise ValueError("bad automaton header")
        n = int(head[1])
        initial = [int(s) for s in head[3].split(",") if s]
        final = [int(s) for s in head[5].split(",") if s] if len(head) > 5 else []
        arrows = []
        for s, lab, t in lines[1:]:
            x = EPS if lab == "eps" else parse_word(lab)[0]
            arrows.append((int(s), x, int(t)))
        if rank is None:
            rank = max((abs(x) for _, x, _ in arrows), default=1)
        return cls(rank, n, arrows, initial, final)

    def to_dot(self, name: str = "A") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for s in range(self.n):
            shape = "doublecircle" if s in self.final else "circle"
            lines.append(f"  {s} [shape={shape}];")
        for s in sorted(self.initial):
            lines.append(f"  start{s} [shape=point];")
            lines.append(f"  start{s} -> {s};")
        for s, x, t in sorted(self.arrows):
            lab = "ε" if x == EPS else str(Word([x]))
            lines.append(f'  {s} -> {t} [label="{lab}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _dfa(rank: int, trans: Sequence[dict[int, int]], final: Iterable[int]) -> Automaton:
    arrows = [(s, x, t) for s, row in enumerate(trans) for x, t in row.items()]
    return Automaton(rank, len(trans), arrows, [0], final)


def _determinize(a: Automaton) -> tuple[list[dict[int, int]], set[int]]:
    letters = letter_order(a.rank)
    start = a.closure(a.initial)
    index = {start: 0}
    subsets = [start]
    trans: list[dict[int, int]] = [{}]
    i = 0
    while i < len(subsets):
        current = subsets[i]
        for x in letters:
            nxt = a.step(current, x)
            if not nxt:
                continue
            if nxt not in index:
                index[nxt] = len(subsets)
                subsets.append(nxt)
                trans.append({})
            trans[i][x] = index[nxt]
        i += 1
    final = {i for i, s in enumerate(subsets) if s & a.final}
    return trans, final


def _hopcroft(n: int, trans: list[list[int]], final: set[int], letters: list[int]) -> list[int]:
    """Block number of each state of a total DFA under language equivalence."""
    inv = {x: [[] for _ in range(n)] for x in letters}
    for s in range(n):
        for li, x in enumerate(letters):
            inv[x][trans[s][li]].append(s)
    accepting = set(final)
    rejecting = set(range(n)) - accepting
    blocks: dict[int, set[int]] = {}
    block = [0] * n
    for blk in (accepting, rejecting):
        if blk:
            bid = len(blocks)
            blocks[bid] = set(blk)
            for s in blk:
                block[s] = bid
    work: deque[tuple[int, int]] = deque()
    pending: set[tuple[int, int]] = set()
    if len(blocks) == 2:
        small = 0 if len(blocks[0]) <= len(blocks[1]) else 1
        for x in letters:
            work.append((small, x))
            pending.add((small, x))
    while work:
        bid, x = work.popleft()
        pending.discard((bid, x))
        splitter = set()
        for t in blocks[bid]:
            splitter.update(inv[x][t])
        touched: dict[int, set[int]] = defaultdict(set)
        for s in splitter:
            touched[block[s]].add(s)
        for yid, part in touched.items():
            whole = blocks[yid]
            if len(part) == len(whole):
                continue
            new_id = len(blocks)
            blocks[yid] = whole - part
            blocks[new_id] = part
            for s in part:
                block[s] = new_id
            for z in letters:
                if (yid, z) in pending:
                    item = (new_id, z)
                else:
                    item = (new_id, z) if len(part) <= len(blocks[yid]) else (yid, z)
                if item not in pending:
                    work.append(item)
                    pending.add(item)
    return block


def canonical_dfa(a: Automaton) -> Automaton:
    """Minimal partial DFA with states numbered in breadth-first letter order.

    Automata with equal languages get identical encodings.
    """
    letters = letter_order(a.rank)
    trans, final = _determinize(a)
    # keep only states that can reach a final state
    rev: list[set[int]] = [set() for _ in trans]
    for s, row in enumerate(trans):
        for t in row.values():
            rev[t].add(s)
    alive = set(final)
    stack = list(final)
    while stack:
        t = stack.pop()
        for s in rev[t]:
            if s not in alive:
                alive.add(s)
                stack.append(s)
    if 0 not in alive:
        return Automaton(a.rank, 1, [], [0], [])
    keep = sorted(alive)
    renum = {s: i for i, s in enumerate(keep)}
    dead = len(keep)
    total = [[renum.get(trans[s].get(x), dead) if trans[s].get(x) in alive else dead for x in letters] for s in keep]
    total.append([dead] * len(letters))
    block = _hopcroft(dead + 1, total, {renum[s] for s in final}, letters)
    dead_block = block[dead]
    rep: dict[int, int] = {}
    for s in range(dead + 1):
        rep.setdefault(block[s], s)
    order = {block[0]: 0}
    queue = deque([block[0]])
    new_trans: list[dict[int, int]] = [{}]
    while queue:
        b = queue.popleft()
        s = rep[b]
        for li, x in enumerate(letters):
            tb = block[total[s][li]]
            if tb == dead_block:
                continue
            if tb not in order:
                order[tb] = len(order)
                new_trans.append({})
                queue.append(tb)
            new_trans[order[b]][x] = order[tb]
    new_final = {order[block[renum[s]]] for s in final if block[renum[s]] in order}
    return _dfa(a.rank, new_trans, new_final)


def same_language(a: Automaton, b: Automaton) -> bool:
    return canonical_dfa(a).encoding() == canonical_dfa(b).encoding()


def enumerate_words(a: Automaton, max_len: int) -> list[Word]:
    """Accepted words of length <= max_len in shortlex order."""
    d = canonical_dfa(a)
    letters = letter_order(d.rank)
    trans = [{x: ts[0] for x, ts in d.out[s].items()} for s in range(d.n)]
    rev: list[list[int]] = [[] for _ in range(d.n)]
    for s, row in enumerate(trans):
        for t in row.values():
            rev[t].append(s)
    dist = {s: 0 for s in d.final}
    queue = deque(d.final)
    while queue:
        t = queue.popleft()
        for s in rev[t]:
            if s not in dist:
                dist[s] = dist[t] + 1
                queue.append(s)
    out: list[Word] = []
    if 0 not in dist or dist[0] > max_len:
        return out
    level: list[tuple[tuple[int, ...], int]] = [((), 0)]
    for n in range(max_len + 1):
        out.extend(Word._trusted(w) for w, s in level if s in d.final)
        if n == max_len:
            break
        level = [(w + (x,), t) for w, s in level for x in letters
                 if (t := trans[s].get(x)) is not None and n + 1 + dist.get(t, max_len + 1) <= max_len]
    return out


def shortest_word(a: Automaton) -> Word | None:
    """Shortlex-least accepted word, or None for the empty language."""
    d = canonical_dfa(a)
    if not d.final:
        return None
    letters = letter_order(d.rank)
    prev: dict[int, tuple[int, int] | None] = {0: None}
    queue = deque([0])
    while queue:
        s = queue.popleft()
        if s in d.final:
            word = []
            while prev[s] is not None:
                s, x = prev[s]
                word.append(x)
            return Word._trusted(reversed(word))
        for x in letters:
            for t in d.out[s].get(x, ()):
                if t not in prev:
                    prev[t] = (s, x)
                    queue.append(t)
    return None


def from_graph(graph: SubgroupGraph) -> Automaton:
    """The subgroup graph as a DFA reading edges both ways; basepoint initial and final."""
    arrows = [(u, x, v) for u, x, v in graph.edges] + [(v, -x, u) for u, x, v in graph.edges]
    return Automaton(graph.rank, graph.n_vertices, arrows, [0], [0])


def reduced_acceptor(rank: int) -> Automaton:
    """2m+1 states: start, plus one per possible last letter."""
    letters = letter_order(rank)
    state = {x: i + 1 for i, x in enumerate(letters)}
    arrows = [(0, x, state[x]) for x in letters]
    arrows += [(state[last], x, state[x]) for last in letters for x in letters if x != -last]
    return Automaton(rank, len(letters) + 1, arrows, [0], range(len(letters) + 1))


def word_acceptor(word: Sequence[int], rank: int) -> Automaton:
    arrows = [(i, x, i + 1) for i, x in enumerate(word)]
    return Automaton(rank, len(word) + 1, arrows, [0], [len(word)])


def finite_acceptor(words: Iterable[Sequence[int]], rank: int) -> Automaton:
    return union(*[word_acceptor(w, rank) for w in words]) if words else Automaton(rank, 1, [], [0], [])


def _disjoint(parts: Sequence[Automaton]):
    offsets, n = [], 0
    for p in parts:
        offsets.append(n)
        n += p.n
    arrows = [(s + off, x, t + off) for p, off in zip(parts, offsets) for s, x, t in p.arrows]
    return offsets, n, arrows


def union(*parts: Automaton) -> Automaton:
    if not parts:
        raise ValueError("union of nothing")
    offsets, n, arrows = _disjoint(parts)
    initial = [s + off for p, off in zip(parts, offsets) for s in p.initial]
    final = [s + off for p, off in zip(parts, offsets) for s in p.final]
    return Automaton(parts[0].rank, n, arrows, initial, final)


def concatenate(*parts: Automaton) -> Automaton:
    """Plain (unreduced) concatenation of languages."""
    offsets, n, arrows = _disjoint(parts)
    for (p, off), (q, qoff) in zip(zip(parts, offsets), zip(parts[1:], offsets[1:])):
        arrows += [(f + off, EPS, s + qoff) for f in p.final for s in q.initial]
    return Automaton(parts[0].rank, n, arrows, [s + offsets[0] for s in parts[0].initial],
                     [f + offsets[-1] for f in parts[-1].final])


def intersect(a: Automaton, b: Automaton) -> Automaton:
    """Product automaton; epsilon moves are taken independently."""
    number: dict[tuple[int, int], int] = {}
    queue: deque[tuple[int, int]] = deque()
    for pair in ((s, t) for s in a.initial for t in b.initial):
        number[pair] = len(number)
        queue.append(pair)
    arrows = []

    def visit(src, dst, x):
        if dst not in number:
            number[dst] = len(number)
            queue.append(dst)
        arrows.append((number[src], x, number[dst]))

    while queue:
        p, q = queue.popleft()
        for x, targets in a.out[p].items():
            if x == EPS:
                for t in targets:
                    visit((p, q), (t, q), EPS)
                continue
            for t in targets:
                for u in b.out[q].get(x, ()):
                    visit((p, q), (t, u), x)
        for u in b.out[q].get(EPS, ()):
            visit((p, q), (p, u), EPS)
    final = [i for (p, q), i in number.items() if p in a.final and q in b.final]
    return Automaton(a.rank, len(number), arrows, [number[(s, t)] for s in a.initial for t in b.initial], final)


def subgroup_automaton(graph: SubgroupGraph) -> Automaton:
    """Canonical DFA accepting exactly the reduced words of the subgroup."""
    return canonical_dfa(intersect(from_graph(graph), reduced_acceptor(graph.rank)))


def benois_reduce(a: Automaton) -> Automaton:
    """Automaton for the reduced forms of the words of L(a).

    Saturates with epsilon arrows p -> q whenever p --x--> r, r ~eps~> r' and
    r' --x^-1--> q, until nothing changes; then keeps only reduced words.
    """
    arrows = set(a.arrows)
    while True:
        current = Automaton(a.rank, a.n, arrows, a.initial, a.final)
        closures = [current.closure([s]) for s in range(a.n)]
        added = set()
        for p, x, r in current.arrows:
            if x == EPS:
                continue
            for r2 in closures[r]:
                for q in current.out[r2].get(-x, ()):
                    if q not in closures[p]:
                        added.add((p, EPS, q))
        if not added:
            break
        arrows |= added
    return canonical_dfa(intersect(current, reduced_acceptor(a.rank)))


def k_reduced_concat(a1: Automaton, a2: Automaton, k: int, check_len: int | None = None) -> Automaton:
    """Automaton for the reduced forms of the products a1 a2 with a_i in L(A_i).

    Both languages must consist of reduced words.  Besides the epsilon arrow
    F0(A1) -> s0(A2), adds an epsilon arrow p -> q for every nonempty reduced
    u with l(u) <= k such that u^-1 is readable from p into F0(A1) and u is
    readable from s0(A2) to q.  ``check_len`` enumerates both languages up to
    that length and raises :class:`KBoundViolated` on any cancellation > k.
    """
    d1, d2 = canonical_dfa(a1), canonical_dfa(a2)
    if check_len is not None:
        left, right = d1.enumerate(check_len), d2.enumerate(check_len)
        for u in left:
            for v in right:
                if cn(u, v) > k:
                    raise KBoundViolated(f"cn({u}, {v}) = {cn(u, v)} > k = {k}")
    letters = letter_order(a1.rank)
    rev1: list[dict[int, list[int]]] = [defaultdict(list) for _ in range(d1.n)]
    for s, x, t in d1.arrows:
        rev1[t][x].append(s)
    trans2 = [{x: ts[0] for x, ts in d2.out[s].items()} for s in range(d2.n)]
    frontier = [(f, 0, 0) for f in d1.final]
    seen = set(frontier)
    pairs: set[tuple[int, int]] = set()
    depth = 0
    while frontier and depth < k:
        depth += 1
        nxt = []
        for p, q, last in frontier:
            for x in letters:
                if x == -last:
                    continue
                q2 = trans2[q].get(x)
                if q2 is None:
                    continue
                for p2 in rev1[p].get(-x, ()):
                    state = (p2, q2, x)
                    pairs.add((p2, q2))
                    if state not in seen:
                        seen.add(state)
                        nxt.append(state)
        frontier = nxt
    n1 = d1.n
    arrows = list(d1.arrows) + [(s + n1, x, t + n1) for s, x, t in d2.arrows]
    arrows += [(f, EPS, n1) for f in d1.final]
    arrows += [(p, EPS, q + n1) for p, q in pairs]
    joined = Automaton(a1.rank, n1 + d2.n, arrows, [0], [f + n1 for f in d2.final])
    return canonical_dfa(intersect(joined, reduced_acceptor(a1.rank)))


def cone_automaton(w1: Sequence[int], w2: Sequence[int], rank: int) -> Automaton:
    """Reduced words w1 . f . w2 that start with w1 and end with w2 without cancellation.

    A spine reads w1, a core of last-letter states reads any reduced middle,
    and a second spine reads w2.
    """
    w1, w2 = Word(w1), Word(w2)
    letters = letter_order(rank)
    core = {x: i for i, x in enumerate(letters)}
    n = len(letters)
    arrows = [(core[x], y, core[y]) for x in letters for y in letters if y != -x]
    # spine for w1; state s_0 is the initial state
    if w1:
        spine = list(range(n, n + len(w1)))
        n += len(w1)
        for i, x in enumerate(w1):
            target = spine[i + 1] if i + 1 < len(w1) else core[x]
            arrows.append((spine[i], x, target))
        initial = spine[0]
        entries = [(core[x], x) for x in letters]
    else:
        initial = n
        n += 1
        arrows += [(initial, y, core[y]) for y in letters]
        entries = [(core[x], x) for x in letters] + [(initial, 0)]
    if w2:
        tail = list(range(n, n + len(w2)))
        n += len(w2)
        for state, last in entries:
            if w2[0] != -last:
                arrows.append((state, w2[0], tail[0]))
        for i in range(1, len(w2)):
            arrows.append((tail[i - 1], w2[i], tail[i]))
        final = [tail[-1]]
    else:
        final = [state for state, _ in entries]
    return canonical_dfa(Automaton(rank, n, arrows, [initial], final))


def double_coset_automaton(graph: SubgroupGraph, f: Sequence[int]) -> Automaton:
    """Canonical DFA accepting exactly the reduced words of C f C."""
    from .cosets import double_coset_automaton as build
    return build(graph, Word(f))
