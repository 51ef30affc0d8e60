"""Positive regular free polynomials ``f = sum a_alpha X_alpha``.

Only finite support is handled.  A :class:`Symbol` may be built in an invalid
state (that is what :func:`validate` is for); everything downstream expects a
symbol that validates.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .words import EMPTY, Alphabet, Word, WordError, format_word, multidegree, parse_word


class SymbolError(ValueError):
    pass


_SUBSCRIPTS = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


def _generator_name(i: int) -> str:
    return "g" + str(i).translate(_SUBSCRIPTS)


@dataclass(frozen=True)
class Symbol:
    n: int
    coeffs: Mapping[Word, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for w, c in dict(self.coeffs).items():
            c = float(c)
            if c != 0.0:
                clean[tuple(int(i) for i in w)] = c
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def linear(cls, n: int, c: Sequence[float] | None = None) -> "Symbol":
        """``sum_i c_i X_i``; all ones by default (the disk algebra symbol)."""
        c = [1.0] * n if c is None else list(c)
        return cls(n, {(i + 1,): c[i] for i in range(n)})

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.n)

    @property
    def degree(self) -> int:
        return max((len(w) for w in self.coeffs), default=0)

    def coeff(self, word: Word) -> float:
        return self.coeffs.get(tuple(word), 0.0)

    def support(self) -> list[Word]:
        """Support words in graded-lex order."""
        return sorted(self.coeffs, key=lambda w: (len(w), w))

    def __str__(self):
        return " + ".join(f"{c:g}*{format_word(w, self.n)}" for w, c in
                          ((w, self.coeffs[w]) for w in self.support())) or "0"


@dataclass(frozen=True)
class CollapsedPolynomial:
    """Commutative image ``sum_m c_m prod_i |z_i|^(2 m_i)`` of a symbol."""

    n: int
    terms: Mapping[tuple[int, ...], float]

    def value(self, z) -> float:
        moduli_sq = [abs(complex(x)) ** 2 for x in z]
        total = 0.0
        for m, c in self.terms.items():
            term = c
            for r2, k in zip(moduli_sq, m):
                if k:
                    term *= r2 ** k
            total += term
        return total

    def permuted(self, sigma: Sequence[int]) -> "CollapsedPolynomial":
        """Collapse of the letter-relabeled symbol: key ``m`` becomes ``(m_sigma(1), ..., m_sigma(n))``."""
        sigma = check_permutation(sigma, self.n)
        return CollapsedPolynomial(
            self.n, {tuple(m[s - 1] for s in sigma): c for m, c in self.terms.items()})

    @property
    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)


def validate(sym: Symbol) -> str | None:
    """Return ``None`` if ``sym`` is positive regular, else a diagnostic string."""
    if sym.n < 1:
        return f"number of indeterminates must be >= 1, got {sym.n}"
    if EMPTY in sym.coeffs:
        return "constant term must vanish"
    for w in sym.support():
        for i in w:
            if not 1 <= i <= sym.n:
                return f"word {w} uses letter {i} outside 1..{sym.n}"
    for i in range(1, sym.n + 1):
        if sym.coeff((i,)) <= 0.0:
            return f"generator coefficient must be positive: {_generator_name(i)}"
    for w in sym.support():
        c = sym.coeffs[w]
        if not math.isfinite(c):
            return f"coefficient must be finite: {format_word(w, sym.n)}"
        if c < 0.0:
            return f"coefficient must be nonnegative: {format_word(w, sym.n)}"
    return None


def require_valid(sym: Symbol) -> Symbol:
    problem = validate(sym)
    if problem is not None:
        raise SymbolError(problem)
    return sym


def growth_constant(sym: Symbol) -> float:
    by_degree: dict[int, float] = {}
    for w, c in sym.coeffs.items():
        by_degree[len(w)] = by_degree.get(len(w), 0.0) + c * c
    return max((s ** (1.0 / d) for d, s in by_degree.items() if d > 0), default=0.0)


def rescale(sym: Symbol, c: Sequence[float]) -> Symbol:
    """Symbol whose shifts are ``c_i W_i``: ``a'_alpha = a_alpha / prod c_i^(2 r_i(alpha))``."""
    c = [float(x) for x in c]
    if len(c) != sym.n:
        raise SymbolError(f"need {sym.n} scale factors, got {len(c)}")
    if any(not x > 0.0 for x in c):
        raise SymbolError(f"scale factors must be positive, got {c}")
    out = {}
    for w, a in sym.coeffs.items():
        denom = 1.0
        for ci, r in zip(c, multidegree(w, sym.n)):
            denom *= ci ** (2 * r)
        out[w] = a / denom
    return Symbol(sym.n, out)


def normalize(sym: Symbol) -> tuple[Symbol, tuple[float, ...]]:
    """Rescale so that every generator coefficient is 1; also return the scales."""
    require_valid(sym)
    c = tuple(math.sqrt(sym.coeff((i,))) for i in range(1, sym.n + 1))
    return rescale(sym, c), c


def is_normalized(sym: Symbol, tol: float = 1e-12) -> bool:
    return all(abs(sym.coeff((i,)) - 1.0) <= tol for i in range(1, sym.n + 1))


def _inverse(sigma: Sequence[int]) -> list[int] | None:
    n = len(sigma)
    if sorted(sigma) != list(range(1, n + 1)):
        return None
    inv = [0] * n
    for i, s in enumerate(sigma, start=1):
        inv[s - 1] = i
    return inv


def check_permutation(sigma: Sequence[int], n: int) -> tuple[int, ...]:
    sigma = tuple(int(s) for s in sigma)
    if len(sigma) != n or _inverse(sigma) is None:
        raise SymbolError(f"{sigma} is not a permutation of 1..{n}")
    return sigma


def permute(sym: Symbol, sigma: Sequence[int]) -> Symbol:
    """Relabel letters: the result's coefficient on ``g_{i1}..g_{ik}`` is ``a_{g_sigma(i1)..g_sigma(ik)}``.

    ``sigma`` is given by its images, ``sigma[i-1] = sigma(i)``.
    """
    sigma = check_permutation(sigma, sym.n)
    inv = _inverse(sigma)
    return Symbol(sym.n, {tuple(inv[u - 1] for u in w): a for w, a in sym.coeffs.items()})


def collapse(sym: Symbol) -> CollapsedPolynomial:
    terms: dict[tuple[int, ...], float] = {}
    for w, a in sym.coeffs.items():
        m = multidegree(w, sym.n)
        terms[m] = terms.get(m, 0.0) + a
    return CollapsedPolynomial(sym.n, terms)


# -- text format -------------------------------------------------------------

_HEADER = re.compile(r"^n\s*=\s*(\d+)$")


def read_terms(text: str, parse_coeff: Callable[[str], object], *, allow_empty_word: bool):
    """Parse the shared ``n=<int>`` / ``<word> <coefficient>`` line format.

    Returns ``(n, {word: coefficient})``.  Errors carry 1-based line numbers.
    """
    n = None
    terms: dict[Word, object] = {}
    seen_at: dict[Word, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            m = _HEADER.match(line)
            if not m:
                raise SymbolError(f"line {lineno}: expected header 'n=<integer>', got {line!r}")
            n = int(m.group(1))
            if n < 1:
                raise SymbolError(f"line {lineno}: n must be >= 1")
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SymbolError(f"line {lineno}: expected '<word> <coefficient>', got {line!r}")
        try:
            word = parse_word(parts[0], n)
        except WordError as exc:
            raise SymbolError(f"line {lineno}: {exc}") from None
        if word == EMPTY and not allow_empty_word:
            raise SymbolError(f"line {lineno}: constant term must vanish")
        if word in seen_at:
            raise SymbolError(f"line {lineno}: duplicate word {parts[0]!r} (first on line {seen_at[word]})")
        try:
            coeff = parse_coeff(parts[1])
        except ValueError as exc:
            raise SymbolError(f"line {lineno}: {exc}") from None
        seen_at[word] = lineno
        terms[word] = coeff
    if n is None:
        raise SymbolError("missing header 'n=<integer>'")
    return n, terms


def _nonnegative_real(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"malformed coefficient {text!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"non-finite coefficient {text!r}")
    if value < 0:
        raise ValueError(f"negative coefficient {text!r}")
    return value


def parse_symbol(text: str) -> Symbol:
    n, terms = read_terms(text, _nonnegative_real, allow_empty_word=False)
    sym = Symbol(n, terms)
    problem = validate(sym)
    if problem is not None:
        raise SymbolError(problem)
    return sym


def serialize_symbol(sym: Symbol) -> str:
    lines = [f"n={sym.n}"]
    lines += [f"{format_word(w, sym.n)} {sym.coeffs[w]!r}" for w in sym.support()]
    return "\n".join(lines) + "\n"


def load_symbol(path) -> Symbol:
    with open(path, encoding="utf-8") as fh:
        return parse_symbol(fh.read())


def symbol_from_terms(n: int, terms: Iterable[tuple[str, float]]) -> Symbol:
    """Convenience: ``symbol_from_terms(2, [("1", 1), ("12", 0.5)])``."""
    return Symbol(n, {parse_word(w, n): c for w, c in terms})
