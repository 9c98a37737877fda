"""Brute-force reference implementations for tests and reports.

Nothing here touches graphs or automata: everything is breadth-first search
over products of generators, using only free reduction from word-core.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .words import Word, reduce, reduced_words


@dataclass(frozen=True)
class BallSpec:
    """Word-length bound ``max_len`` and generator-product depth ``depth``.

    ``slack`` bounds how far intermediate products may exceed ``max_len``;
    None means the longest generator after length reduction.
    """

    max_len: int
    depth: int
    slack: int | None = None

    def __post_init__(self):
        if self.max_len < 0 or self.depth < 0:
            raise ValueError("bounds must be nonnegative")

    @classmethod
    def saturated(cls, generators: Sequence[Sequence[int]], max_len: int) -> "BallSpec":
        longest = max((len(g) for g in generators), default=1)
        return cls(max_len, max_len * longest)


def length_reduce(generators: Iterable[Sequence[int]]) -> list[Word]:
    """Replace generators by shorter products u v^{+-1} until none shrinks.

    Drops trivial and repeated generators; the subgroup is unchanged.
    """
    gens = [Word(g) for g in generators]
    changed = True
    while changed:
        changed = False
        gens = [g for g in gens if g]
        unique: list[Word] = []
        for g in gens:
            if g not in unique and g.inverse() not in unique:
                unique.append(g)
        gens = unique
        for i in range(len(gens)):
            for j in range(len(gens)):
                if i == j:
                    continue
                for v in (gens[j], gens[j].inverse()):
                    for cand in (gens[i] * v, v * gens[i]):
                        if len(cand) < len(gens[i]):
                            gens[i] = cand
                            changed = True
                            break
                    if changed:
                        break
                if changed:
                    break
            if changed:
                break
    return sorted(gens, key=lambda w: (len(w), tuple(w)))


def brute_subgroup_ball(generators: Sequence[Sequence[int]], spec: BallSpec) -> set[Word]:
    """Reduced products of at most ``spec.depth`` generators with length <= max_len.

    Products are explored breadth-first as group elements; intermediate
    products longer than max_len + slack are not expanded.
    """
    gens = length_reduce(generators)
    letters = gens + [g.inverse() for g in gens]
    slack = spec.slack if spec.slack is not None else max((len(g) for g in gens), default=0)
    cap = spec.max_len + slack
    seen = {Word()}
    frontier = [Word()]
    for _ in range(spec.depth):
        nxt = []
        for w in frontier:
            for g in letters:
                p = reduce(w + g)
                if len(p) <= cap and p not in seen:
                    seen.add(p)
                    nxt.append(p)
        if not nxt:
            break
        frontier = nxt
    return {w for w in seen if len(w) <= spec.max_len}


def brute_coset_ball(generators: Sequence[Sequence[int]], f: Sequence[int], spec: BallSpec) -> set[Word]:
    """Reduced c1 f c2 of length <= max_len.

    Breadth-first search of the orbit of f under left and right
    multiplication by generators, never expanding words longer than
    max(max_len, l(f)) + slack.
    """
    gens = length_reduce(generators)
    letters = gens + [g.inverse() for g in gens]
    slack = spec.slack if spec.slack is not None else max((len(g) for g in gens), default=0)
    f = reduce(f)
    cap = max(spec.max_len, len(f)) + slack
    seen = {f}
    frontier = [f]
    for _ in range(spec.depth):
        nxt = []
        for w in frontier:
            for h in letters:
                for p in (reduce(h + w), reduce(w + h)):
                    if len(p) <= cap and p not in seen:
                        seen.add(p)
                        nxt.append(p)
        if not nxt:
            break
        frontier = nxt
    return {w for w in seen if len(w) <= spec.max_len}


def brute_solutions(generators: Sequence[Sequence[int]], g: Sequence[int], f: Sequence[int],
                    spec: BallSpec) -> set[tuple[Word, Word]]:
    """Pairs (x, y) from the subgroup ball with x g = f y."""
    g, f = Word(g), Word(f)
    ball = brute_subgroup_ball(generators, spec)
    f_inv = f.inverse()
    out = set()
    for x in ball:
        y = reduce(f_inv + x + g)
        if y in ball:
            out.add((x, y))
    return out


def brute_essential_classes(generators: Sequence[Sequence[int]], rank: int, max_f: int,
                            radius: int) -> list[frozenset[Word]]:
    """Essential f with l(f) <= max_f, grouped by double coset.

    f is detected as essential when some nontrivial c with l(c) <= radius
    has f c f^-1 in the subgroup.  Each detected f is then closed under the
    brute coset ball, which holds only essential words since the stabilizer
    of c1 f c2 is conjugate to that of f.  Overlapping classes are merged.
    """
    ball = brute_subgroup_ball(generators, BallSpec(radius + 2 * max_f, (radius + 2 * max_f) * 8))
    small = [c for c in ball if c and len(c) <= radius]
    classes: list[frozenset[Word]] = []
    covered: set[Word] = set()
    for f in reduced_words(rank, max_f):
        if f in ball or f in covered:
            continue
        f_inv = f.inverse()
        if not any(reduce(f + c + f_inv) in ball for c in small):
            continue
        members = brute_coset_ball(generators, f, BallSpec(max_f, max_f * 8)) | {f}
        merged = [cl for cl in classes if cl & members]
        for cl in merged:
            classes.remove(cl)
            members |= cl
        classes.append(frozenset(members))
        covered |= members
    return classes
