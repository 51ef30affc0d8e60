"""Words in the free semigroup on ``n`` generators.

A word is a plain tuple of generator indices in ``1..n``; the empty tuple is
the identity ``e``.  The alphabet size lives in :class:`Alphabet` rather than
in each word, so words stay cheap to hash and slice.

Words of length at most ``L`` are ordered graded-lexicographically: first by
length, then lexicographically.  Within a length ``d`` block the local index of
``g_{i1}...g_{id}`` is the base-``n`` number with digits ``i1-1, ..., id-1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

Word = tuple  # tuple[int, ...], letters in 1..n

EMPTY: Word = ()


class WordError(ValueError):
    pass


def concat(u: Word, v: Word) -> Word:
    return tuple(u) + tuple(v)


def factorizations(alpha: Word) -> list[tuple[Word, Word]]:
    """All splittings ``alpha = beta gamma``, by increasing ``len(beta)``."""
    alpha = tuple(alpha)
    return [(alpha[:j], alpha[j:]) for j in range(len(alpha) + 1)]


def compositions(alpha: Word) -> Iterator[tuple[Word, ...]]:
    """Yield every way of cutting ``alpha`` into nonempty consecutive pieces.

    There are ``2**(len(alpha) - 1)`` of them.  Bit ``j`` of the cut mask means
    "cut after letter ``j + 1``", so the uncut word comes first and the
    all-singletons composition last.
    """
    alpha = tuple(alpha)
    m = len(alpha)
    if m == 0:
        raise WordError("the empty word has no composition into nonempty words")
    for mask in range(1 << (m - 1)):
        pieces = []
        start = 0
        for j in range(m - 1):
            if mask >> j & 1:
                pieces.append(alpha[start:j + 1])
                start = j + 1
        pieces.append(alpha[start:])
        yield tuple(pieces)


def count_words(n: int, L: int) -> int:
    """Number of words of length at most ``L``."""
    if n == 1:
        return L + 1
    return (n ** (L + 1) - 1) // (n - 1)


def level_offset(n: int, d: int) -> int:
    """Graded-lex index of the first word of length ``d``."""
    return count_words(n, d - 1) if d > 0 else 0


def enumerate_words(n: int, L: int) -> list[Word]:
    if n < 1 or L < 0:
        raise WordError(f"need n >= 1 and L >= 0, got n={n}, L={L}")
    out: list[Word] = []
    for d in range(L + 1):
        out.extend(itertools.product(range(1, n + 1), repeat=d))
    return out


def index_of(alpha: Word, n: int) -> int:
    """Graded-lex position of ``alpha`` among all words over ``n`` letters."""
    local = 0
    for letter in alpha:
        local = local * n + (letter - 1)
    return level_offset(n, len(alpha)) + local


def multidegree(alpha: Word, n: int) -> tuple[int, ...]:
    counts = [0] * n
    for letter in alpha:
        counts[letter - 1] += 1
    return tuple(counts)


def format_word(alpha: Word, n: int) -> str:
    if not alpha:
        return "e"
    if n <= 9:
        return "".join(str(i) for i in alpha)
    return ".".join(str(i) for i in alpha)


def parse_word(text: str, n: int) -> Word:
    text = text.strip()
    if text == "e":
        return EMPTY
    if not text:
        raise WordError("empty word text; use 'e' for the identity")
    try:
        if "." in text or n > 9:
            letters = tuple(int(t) for t in text.split("."))
        else:
            letters = tuple(int(c) for c in text)
    except ValueError:
        raise WordError(f"malformed word {text!r}") from None
    for i in letters:
        if not 1 <= i <= n:
            raise WordError(f"letter {i} in {text!r} outside 1..{n}")
    return letters


@dataclass(frozen=True)
class Alphabet:
    """The ambient alphabet ``{g_1, ..., g_n}``; validates and renders words."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise WordError(f"alphabet size must be >= 1, got {self.n}")

    def validate(self, alpha: Sequence[int]) -> Word:
        alpha = tuple(int(i) for i in alpha)
        for i in alpha:
            if not 1 <= i <= self.n:
                raise WordError(f"letter {i} outside 1..{self.n}")
        return alpha

    def generator(self, i: int) -> Word:
        return self.validate((i,))

    def words(self, L: int) -> list[Word]:
        return enumerate_words(self.n, L)

    def index(self, alpha: Word) -> int:
        return index_of(alpha, self.n)

    def multidegree(self, alpha: Word) -> tuple[int, ...]:
        return multidegree(alpha, self.n)

    def format(self, alpha: Word) -> str:
        return format_word(alpha, self.n)

    def parse(self, text: str) -> Word:
        return parse_word(text, self.n)
