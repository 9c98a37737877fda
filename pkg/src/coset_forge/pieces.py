"""Piece alphabet of a Nielsen basis and C-admissible factorizations.

For signed indices i, j, k in 1..2r (h_{r+i} = h_i^-1):

* ``a[i, j]`` is the initial part of h_i surviving in h_i h_j,
* ``b[i, j]`` is the terminal part of h_j surviving in h_i h_j,
* ``m[i, j, k]`` is the part of h_j surviving in h_i h_j h_k, split as
  alpha . mu(h_j) . beta.

Every nontrivial c in C factors uniquely as ``h_i``, ``a . b`` or
``a . m . ... . m . b`` with no cancellation between the pieces.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import IdentityWord
from .stallings import NielsenBasis, coset_distance, express, fold, nielsen_violations
from .words import Word, cancellation, reduced_words


@dataclass(frozen=True)
class MiddlePiece:
    word: Word
    alpha: Word
    mu: int
    beta: Word


def symbol_name(kind: str, indices: tuple[int, ...]) -> str:
    if all(i < 10 for i in indices):
        return kind + "".join(map(str, indices))
    return f"{kind}_{{{','.join(map(str, indices))}}}"


@dataclass(frozen=True, eq=False)
class PieceAlphabet:
    basis: NielsenBasis
    a: dict
    b: dict
    m: dict

    def word(self, symbol: tuple[str, tuple[int, ...]]) -> Word:
        kind, idx = symbol
        if kind == "h":
            return self.basis.signed(idx[0]).h
        if kind == "m":
            return self.m[idx].word
        return getattr(self, kind)[idx]

    def distinct_words(self) -> set[Word]:
        return set(self.a.values()) | set(self.b.values()) | {p.word for p in self.m.values()}

    def table(self) -> list[tuple[str, str, str]]:
        """Rows of (symbol, word, alpha|mu|beta split or '')."""
        rows = []
        for i in range(1, 2 * self.basis.r + 1):
            rows.append((symbol_name("h", (i,)), str(self.basis.signed(i).h), ""))
        for kind in ("a", "b"):
            for idx, w in sorted(getattr(self, kind).items()):
                rows.append((symbol_name(kind, idx), str(w), ""))
        for idx, piece in sorted(self.m.items()):
            split = f"{piece.alpha or ''}|{Word([piece.mu])}|{piece.beta or ''}"
            rows.append((symbol_name("m", idx), str(piece.word), split))
        return rows


def piece_alphabet(basis: NielsenBasis) -> PieceAlphabet:
    n = 2 * basis.r
    gens = {i: basis.signed(i) for i in range(1, n + 1)}
    cut = {}
    a, b, m = {}, {}, {}
    for i in gens:
        for j in gens:
            if j == basis.inverse_index(i):
                continue
            c = cancellation(gens[i].h, gens[j].h)
            cut[i, j] = c
            a[i, j] = gens[i].h[: len(gens[i].h) - c]
            b[i, j] = gens[j].h[c:]
    for (i, j), left in cut.items():
        for k in gens:
            if k == basis.inverse_index(j):
                continue
            right = cut[j, k]
            hj = gens[j]
            word = hj.h[left: len(hj.h) - right]
            m[i, j, k] = MiddlePiece(word, hj.h[left: hj.center], hj.mu, hj.h[hj.center + 1: len(hj.h) - right])
    return PieceAlphabet(basis, a, b, m)


@dataclass(frozen=True)
class AdmissibleWord:
    pieces: tuple[tuple[str, tuple[int, ...]], ...]
    underlying: Word

    def __str__(self) -> str:
        return " ∘ ".join(symbol_name(kind, idx) for kind, idx in self.pieces)


def admissible_pieces(basis: NielsenBasis, indices: list[int]) -> tuple:
    """Piece symbols for a Y-reduced sequence of signed indices."""
    if len(indices) == 1:
        return (("h", (indices[0],)),)
    out = [("a", (indices[0], indices[1]))]
    for t in range(len(indices) - 2):
        out.append(("m", tuple(indices[t: t + 3])))
    out.append(("b", (indices[-2], indices[-1])))
    return tuple(out)


def admissible_factorization(sigma: PieceAlphabet, c: Word) -> AdmissibleWord:
    if not c:
        raise IdentityWord("the identity has no admissible factorization")
    basis = sigma.basis
    yword = express(basis, c)
    symbols = admissible_pieces(basis, [basis.index_of_letter(y) for y in yword])
    joined = Word._trusted(x for s in symbols for x in sigma.word(s))
    assert list(joined) == list(c), "pieces do not concatenate to c"
    return AdmissibleWord(symbols, Word(c))


def validate_nielsen(basis: NielsenBasis, samples: int = 200, seed: int = 0) -> list[str]:
    """All property violations of ``basis``; an empty list means it is Nielsen.

    Besides the splitting and survival properties, samples words f that are
    shortest in their coset fC and checks cn(f, h) <= M for every generator.
    """
    report = nielsen_violations(basis)
    if basis.r == 0:
        return report
    graph = basis.graph if basis.graph is not None else fold(basis.words, basis.ambient_rank)
    signed = [basis.signed(i) for i in range(1, 2 * basis.r + 1)]
    rng = random.Random(seed)
    pool = list(reduced_words(basis.ambient_rank, min(2 * basis.M + 2, 6)))
    for f in rng.sample(pool, min(samples, len(pool))):
        if coset_distance(graph, f.inverse()) != len(f):
            continue
        for i, g in enumerate(signed, start=1):
            if cancellation(f, g.h) > basis.M:
                report.append(f"cn({f}, h{i}) = {cancellation(f, g.h)} exceeds M = {basis.M}")
    return report
