"""Free-group words over X = {x_1, ..., x_m}.

A letter is a nonzero int: ``+i`` is the generator x_i and ``-i`` its inverse.
A :class:`Word` is an immutable, freely reduced tuple of letters; the empty
word is the identity.

Text syntax: lowercase letters are generators and uppercase letters their
inverses (``A`` is a^-1), ``^n`` expands a power of the preceding letter, and
``1`` or the empty string is the identity.  Alphabets of rank > 26 use
indexed names ``x3`` / ``X3``.
"""
from __future__ import annotations

import re
import string
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


def letter_rank(letter: int) -> int:
    """Position of ``letter`` in the fixed order a < A < b < B < ..."""
    return 2 * (abs(letter) - 1) + (letter < 0)


def letter_order(rank: int) -> list[int]:
    return [s * i for i in range(1, rank + 1) for s in (1, -1)]


def shortlex_key(word: Sequence[int]) -> tuple:
    return (len(word), tuple(letter_rank(x) for x in word))


def _free_reduce(letters: Iterable[int]) -> list[int]:
    out: list[int] = []
    for x in letters:
        if not isinstance(x, int) or x == 0:
            raise ValueError(f"invalid letter {x!r}")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return out


class Word(tuple):
    """A freely reduced word.  Construction always reduces its input."""

    __slots__ = ()

    def __new__(cls, letters: Iterable[int] = ()):
        return tuple.__new__(cls, _free_reduce(letters))

    @classmethod
    def _trusted(cls, letters: Iterable[int]) -> "Word":
        # caller guarantees the letters are already reduced
        return tuple.__new__(cls, letters)

    @classmethod
    def parse(cls, text: str, alphabet: "Alphabet | None" = None) -> "Word":
        return parse_word(text, alphabet)

    def __getitem__(self, item):
        got = tuple.__getitem__(self, item)
        if isinstance(item, slice):
            return Word._trusted(got)
        return got

    def __mul__(self, other: "Word") -> "Word":  # type: ignore[override]
        return multiply(self, other)

    def __rmul__(self, other):  # type: ignore[override]
        return NotImplemented

    def __invert__(self) -> "Word":
        return self.inverse()

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** -n
        result = Word()
        for _ in range(n):
            result = result * self
        return result

    def inverse(self) -> "Word":
        return Word._trusted(-x for x in reversed(self))

    @property
    def rank(self) -> int:
        """Largest generator index used (0 for the identity)."""
        return max((abs(x) for x in self), default=0)

    def __str__(self) -> str:
        return format_word(self)

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r})"


IDENTITY = Word()


def reduce(raw: Iterable[int]) -> Word:
    return Word(raw)


def cancellation(u: Sequence[int], v: Sequence[int]) -> int:
    """Number of letters of ``u`` cancelled against ``v`` in the product uv."""
    n = 0
    limit = min(len(u), len(v))
    while n < limit and u[len(u) - 1 - n] == -v[n]:
        n += 1
    return n


def multiply(u: Word, v: Word) -> Word:
    c = cancellation(u, v)
    return Word._trusted(tuple.__getitem__(u, slice(0, len(u) - c)) + tuple.__getitem__(v, slice(c, None)))


def product(factors: Iterable[Word]) -> Word:
    out = IDENTITY
    for f in factors:
        out = multiply(out, f)
    return out


def cn(*factors: Sequence[int]) -> int:
    """Total number of letters cancelled when reducing a_1 a_2 ... a_n.

    Equals half of (sum of factor lengths - length of the reduced product).
    For two factors this is the Gromov product (a_1, a_2^-1).
    """
    if not factors:
        raise ValueError("cn needs at least one factor")
    total = sum(len(f) for f in factors)
    reduced_len = len(Word(x for f in factors for x in f))
    diff = total - reduced_len
    assert diff % 2 == 0, "length parity broken"
    return diff // 2


def conjugate(c: Word, g: Word) -> Word:
    """Return c^g = g^-1 c g."""
    return g.inverse() * c * g


def is_reduced(letters: Sequence[int]) -> bool:
    return all(letters[i] != -letters[i + 1] for i in range(len(letters) - 1))


def surviving_letters(factors: Sequence[Sequence[int]]) -> list[tuple[int, int]]:
    """Reduce the concatenation of ``factors`` and report which letters survive.

    Returns ``(factor index, position)`` for every letter of the reduced word,
    in order.
    """
    stack: list[tuple[int, int, int]] = []
    for i, f in enumerate(factors):
        for j, x in enumerate(f):
            if stack and stack[-1][2] == -x:
                stack.pop()
            else:
                stack.append((i, j, x))
    return [(i, j) for i, j, _ in stack]


def ball_size(rank: int, radius: int) -> int:
    """Number of elements of F(x_1..x_rank) of length at most ``radius``."""
    if radius < 0:
        return 0
    if rank == 1:
        return 2 * radius + 1
    m2 = 2 * rank
    return 1 + m2 * ((m2 - 1) ** radius - 1) // (m2 - 2)


def reduced_words(rank: int, max_len: int, min_len: int = 0) -> Iterator[Word]:
    """All reduced words of length in [min_len, max_len], in shortlex order."""
    order = letter_order(rank)
    level: list[tuple[int, ...]] = [()]
    for n in range(max_len + 1):
        if n >= min_len:
            for w in level:
                yield Word._trusted(w)
        if n == max_len:
            break
        level = [w + (x,) for w in level for x in order if not w or w[-1] != -x]


@dataclass(frozen=True)
class Alphabet:
    """Generator names for a free group of the given rank."""

    rank: int
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if not self.names:
            if self.rank <= 26:
                names = tuple(string.ascii_lowercase[: self.rank])
            else:
                names = tuple(f"x{i}" for i in range(1, self.rank + 1))
            object.__setattr__(self, "names", names)
        if len(self.names) != self.rank or len(set(self.names)) != self.rank:
            raise ValueError("need one distinct name per generator")
        if set(self.names) & {self.inverse_name(i) for i in range(1, self.rank + 1)}:
            raise ValueError("a generator name collides with an inverse name")

    @property
    def indexed(self) -> bool:
        return self.rank > 26

    def name(self, letter: int) -> str:
        return self.names[letter - 1] if letter > 0 else self.inverse_name(-letter)

    def inverse_name(self, index: int) -> str:
        return self.names[index - 1].upper() if not self.indexed else f"X{index}"

    def letters(self) -> list[int]:
        return letter_order(self.rank)


_INDEXED_TOKEN = re.compile(r"([xX])(\d+)(?:\^(-?\d+))?")
_PLAIN_TOKEN = re.compile(r"([a-zA-Z])(?:\^(-?\d+))?")


def parse_word(text: str, alphabet: Alphabet | None = None) -> Word:
    """Parse the text word format; raises ``ValueError`` on bad syntax."""
    text = text.strip().replace(" ", "")
    if text in ("", "1"):
        return IDENTITY
    indexed = alphabet.indexed if alphabet is not None else bool(re.fullmatch(r"([xX]\d+(\^-?\d+)?)+", text))
    letters: list[int] = []
    pos = 0
    while pos < len(text):
        if indexed:
            m = _INDEXED_TOKEN.match(text, pos)
            if not m:
                raise ValueError(f"cannot parse word {text!r} at position {pos}")
            index = int(m.group(2))
            letter = index if m.group(1) == "x" else -index
            power = m.group(3)
        else:
            m = _PLAIN_TOKEN.match(text, pos)
            if not m:
                raise ValueError(f"cannot parse word {text!r} at position {pos}")
            ch = m.group(1)
            letter = ord(ch.lower()) - ord("a") + 1
            if ch.isupper():
                letter = -letter
            power = m.group(2)
        if letter == 0 or (alphabet is not None and abs(letter) > alphabet.rank):
            raise ValueError(f"letter {m.group(0)!r} outside the alphabet")
        n = 1 if power is None else int(power)
        letters.extend([letter if n > 0 else -letter] * abs(n))
        pos = m.end()
    return Word(letters)


def format_word(word: Sequence[int], alphabet: Alphabet | None = None) -> str:
    if not word:
        return "1"
    if alphabet is None:
        alphabet = Alphabet(max(26, max(abs(x) for x in word)))
    return "".join(alphabet.name(x) for x in word)


def parse_words(text: str, alphabet: Alphabet | None = None) -> list[Word]:
    """Parse a comma-separated list of words."""
    return [parse_word(part, alphabet) for part in text.split(",") if part.strip() != ""]
