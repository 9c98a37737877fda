import random

import pytest

from coset_forge.automata import (
    EPS,
    Automaton,
    benois_reduce,
    canonical_dfa,
    concatenate,
    cone_automaton,
    enumerate_words,
    finite_acceptor,
    from_graph,
    intersect,
    k_reduced_concat,
    reduced_acceptor,
    same_language,
    shortest_word,
    subgroup_automaton,
    union,
    word_acceptor,
)
from coset_forge.errors import KBoundViolated
from coset_forge.stallings import fold
from coset_forge.words import Word, ball_size, cn, reduced_words, shortlex_key

from conftest import W


def test_reduced_acceptor_counts():
    a = reduced_acceptor(2)
    assert a.n == 5
    assert len(enumerate_words(a, 4)) == ball_size(2, 4)
    assert not a.accepts([1, -1])


def test_canonical_is_language_invariant():
    words = [W("ab"), W("aB"), W("b")]
    one = finite_acceptor(words, 2)
    two = union(word_acceptor(W("b"), 2), finite_acceptor([W("aB"), W("ab")], 2))
    assert canonical_dfa(one).encoding() == canonical_dfa(two).encoding()
    assert canonical_dfa(one).n == 3


def test_canonical_empty_language():
    empty = canonical_dfa(Automaton(2, 3, [(0, 1, 1)], [0], [2]))
    assert empty.n == 1 and not empty.final
    assert shortest_word(empty) is None


def test_enumerate_shortlex():
    words = enumerate_words(reduced_acceptor(1), 2)
    assert words == [Word(), W("a"), W("A"), W("aa"), W("AA")]
    ball = enumerate_words(reduced_acceptor(2), 3)
    assert ball == sorted(ball, key=shortlex_key)


def test_epsilon_arrows():
    a = Automaton(1, 3, [(0, EPS, 1), (1, 1, 2)], [0], [2])
    assert a.accepts([1]) and not a.accepts([])
    assert canonical_dfa(a).deterministic


def test_subgroup_automaton_matches_graph():
    g = fold([W("aaa"), W("bab")], 2)
    a = subgroup_automaton(g)
    for w in reduced_words(2, 6):
        assert a.accepts(w) == g.accepts(w)


def test_subgroup_automaton_is_from_graph_on_reduced_words():
    g = fold([W("ab"), W("ba")], 2)
    assert same_language(intersect(from_graph(g), reduced_acceptor(2)), subgroup_automaton(g))


def test_benois_reduces_concatenation():
    a = benois_reduce(concatenate(word_acceptor(W("ab"), 2), word_acceptor(W("Ba"), 2)))
    assert enumerate_words(a, 6) == [W("aa")]


def test_benois_on_subgroup_product():
    g = fold([W("aa")], 2)
    a_c = subgroup_automaton(g)
    prod = benois_reduce(concatenate(a_c, word_acceptor(W("b"), 2), a_c))
    words = enumerate_words(prod, 4)
    assert W("aabaa") not in words and W("b") in words
    assert W("AAbaa") not in words
    assert set(words) == {W("b"), W("aab"), W("AAb"), W("baa"), W("bAA")}


def test_k_reduced_concat_examples():
    a_c = subgroup_automaton(fold([W("a")], 2))
    cab = k_reduced_concat(a_c, word_acceptor(W("b"), 2), 2)
    assert set(enumerate_words(cab, 3)) == {W("b"), W("ab"), W("Ab"), W("aab"), W("AAb")}
    # a plain concatenation with cancellation
    both = k_reduced_concat(word_acceptor(W("ab"), 2), word_acceptor(W("Ba"), 2), 1)
    assert enumerate_words(both, 4) == [W("aa")]


def test_k_reduced_concat_bound_check():
    with pytest.raises(KBoundViolated):
        k_reduced_concat(word_acceptor(W("abb"), 2), word_acceptor(W("BBa"), 2), 1, check_len=3)


def test_k_reduced_concat_agrees_with_benois():
    rng = random.Random(21)
    letters = [1, -1, 2, -2]
    for _ in range(40):
        left = {Word(rng.choice(letters) for _ in range(rng.randint(0, 4))) for _ in range(3)}
        right = {Word(rng.choice(letters) for _ in range(rng.randint(0, 4))) for _ in range(3)}
        k = max(cn(u, v) for u in left for v in right)
        a1, a2 = finite_acceptor(left, 2), finite_acceptor(right, 2)
        fast = k_reduced_concat(a1, a2, k)
        slow = benois_reduce(concatenate(a1, a2))
        assert same_language(fast, slow)
        assert set(enumerate_words(fast, 8)) == {u * v for u in left for v in right}


def test_cone_example():
    cone = cone_automaton(W("a"), W("b"), 2)
    got = enumerate_words(cone, 4)
    want = [w for w in reduced_words(2, 4) if len(w) >= 2 and w[0] == 1 and w[-1] == 2]
    assert set(got) == set(want)
    assert W("ab") in got and W("aBb") not in got


def test_cone_requires_no_seam_cancellation():
    cone = cone_automaton(W("ab"), W("Ba"), 2)
    assert not cone.accepts(W("aa"))
    assert cone.accepts(W("abAABa"))
    assert shortest_word(cone) == W("abaBa")


def test_text_roundtrip():
    a = cone_automaton(W("a"), W("b"), 2)
    back = Automaton.from_text(a.to_text(), rank=2)
    assert back.encoding() == a.encoding()
    assert "digraph" in a.to_dot() and "doublecircle" in a.to_dot()


def test_shortest_word_is_shortlex_least():
    a = finite_acceptor([W("bb"), W("aB"), W("ab")], 2)
    assert shortest_word(a) == W("ab")
