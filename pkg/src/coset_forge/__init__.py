"""Double cosets of finitely generated subgroups of free groups."""
from .automata import (
    Automaton,
    benois_reduce,
    canonical_dfa,
    concatenate,
    cone_automaton,
    enumerate_words,
    from_graph,
    intersect,
    k_reduced_concat,
    reduced_acceptor,
    same_language,
    shortest_word,
    subgroup_automaton,
    word_acceptor,
)
from .cosets import (
    DoubleCoset,
    RelativeTransversal,
    SolutionSet,
    double_coset,
    double_coset_automaton,
    essential_cosets,
    in_double_coset,
    is_f_malnormal,
    membership,
    minimal_representative,
    normal_form,
    relative_transversal,
    solve_equation,
    solve_uniform,
    stabilizer,
    verify_k_reduced,
)
from .errors import *  # noqa: F401,F403
from .pieces import AdmissibleWord, PieceAlphabet, admissible_factorization, piece_alphabet, validate_nielsen
from .stallings import (
    NielsenBasis,
    SpanningTree,
    SubgroupGraph,
    accepts,
    conjugate_graph,
    coset_graph,
    express,
    fold,
    geodesic_spanning_tree,
    intersect_graphs,
    nielsen_basis,
    schreier_transversal,
)
from .words import Alphabet, Word, cn, conjugate, multiply, parse_word, parse_words, reduce

__version__ = "0.1.0"
