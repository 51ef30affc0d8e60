"""Weights ``b_alpha`` of the inverse series of ``1 - f``.

``compute_weights`` uses the prefix recursion
``b_alpha = sum_{beta gamma = alpha, |beta| >= 1} a_beta b_gamma``, which only
touches support words that are prefixes of ``alpha``.  ``weight_by_compositions``
sums ``a_{gamma_1} ... a_{gamma_j}`` over every composition of ``alpha`` and is
kept as an independent brute-force check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .symbol import Symbol, SymbolError, growth_constant, require_valid
from .words import EMPTY, Word, WordError, compositions, enumerate_words, level_offset

MAX_COMPOSITION_LENGTH = 12


@dataclass(frozen=True)
class WeightTable:
    symbol: Symbol
    L: int
    values: dict = field(repr=False)

    def __getitem__(self, alpha: Word) -> float:
        alpha = tuple(alpha)
        if len(alpha) > self.L:
            raise KeyError(f"word of length {len(alpha)} beyond table length {self.L}")
        return self.values[alpha]

    def level(self, d: int) -> np.ndarray:
        """Weights of the length-``d`` words, in lex order."""
        n = self.symbol.n
        words = enumerate_words(n, d)[level_offset(n, d):]
        return np.array([self.values[w] for w in words])

    def as_array(self) -> np.ndarray:
        """All weights in graded-lex order."""
        return np.concatenate([self.level(d) for d in range(self.L + 1)])


def compute_weights(sym: Symbol, L: int) -> WeightTable:
    require_valid(sym)
    if L < 0:
        raise ValueError(f"L must be >= 0, got {L}")
    a = sym.coeffs
    deg = sym.degree
    values = {EMPTY: 1.0}
    for alpha in enumerate_words(sym.n, L):
        if not alpha:
            continue
        total = 0.0
        for j in range(1, min(deg, len(alpha)) + 1):
            a_beta = a.get(alpha[:j])
            if a_beta is not None:
                total += a_beta * values[alpha[j:]]
        values[alpha] = total
    return WeightTable(sym, L, values)


def weight_by_compositions(sym: Symbol, alpha: Word) -> float:
    alpha = tuple(alpha)
    if not alpha:
        raise WordError("weight_by_compositions needs a nonempty word (b_e = 1 by convention)")
    if len(alpha) > MAX_COMPOSITION_LENGTH:
        raise ValueError(f"composition oracle limited to length {MAX_COMPOSITION_LENGTH}")
    a = sym.coeffs
    total = 0.0
    for pieces in compositions(alpha):
        prod = 1.0
        for piece in pieces:
            c = a.get(piece)
            if c is None:
                prod = 0.0
                break
            prod *= c
        total += prod
    return total


def _series_product(x: dict, y: dict, L: int) -> dict:
    out: dict = {}
    for u, cu in x.items():
        for v, cv in y.items():
            if len(u) + len(v) <= L:
                w = u + v
                out[w] = out.get(w, 0.0) + cu * cv
    return out


def verify_series_inverse(sym: Symbol, L: int, r: float) -> float:
    """Largest coefficient of ``(1 - F_r) B_r - 1`` or ``B_r (1 - F_r) - 1`` up to length ``L``.

    ``F_r = sum a_alpha r^|alpha| X_alpha`` and ``B_r = sum b_alpha r^|alpha| X_alpha``
    are multiplied as formal noncommutative series, so truncation is exact.
    The radius must satisfy ``r * M < 1/2`` with ``M`` the growth constant.
    """
    M = growth_constant(sym)
    if not r > 0 or r * M >= 0.5:
        raise SymbolError(f"radius r={r} violates 0 < r*M < 1/2 (M={M})")
    table = compute_weights(sym, L)
    one_minus_f = {EMPTY: 1.0}
    for w, c in sym.coeffs.items():
        if len(w) <= L:
            one_minus_f[w] = -c * r ** len(w)
    b = {w: v * r ** len(w) for w, v in table.values.items()}
    residual = 0.0
    for prod in (_series_product(one_minus_f, b, L), _series_product(b, one_minus_f, L)):
        for w, c in prod.items():
            target = 1.0 if w == EMPTY else 0.0
            residual = max(residual, abs(c - target))
    return residual
