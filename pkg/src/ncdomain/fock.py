"""Weighted shifts on the full Fock space, truncated at word length ``L``.

Basis vectors ``delta_alpha`` are indexed in graded-lex order (vacuum first).
``W_i`` sends ``delta_alpha`` to ``sqrt(b_alpha / b_{g_i alpha}) delta_{g_i alpha}``
and annihilates the top-length vectors, so every identity that only involves
words of length ``<= L`` holds exactly on the truncated space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .domains import (DomainError, MatrixTuple, WordProducts, format_complex, level_products,
                      parse_complex, defect_matrix)
from .symbol import Symbol, SymbolError, read_terms, require_valid
from .weights import WeightTable, compute_weights
from .words import Word, count_words, enumerate_words, format_word, index_of, level_offset

DENSE_LIMIT = 4096
SQRT_CLAMP = -1e-12


@dataclass(frozen=True)
class TruncatedFock:
    n: int
    L: int

    @property
    def dim(self) -> int:
        return count_words(self.n, self.L)

    def words(self) -> list[Word]:
        return enumerate_words(self.n, self.L)

    def index(self, alpha: Word) -> int:
        if len(alpha) > self.L:
            raise IndexError(f"word of length {len(alpha)} outside truncation L={self.L}")
        return index_of(alpha, self.n)

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim)
        v[0] = 1.0
        return v


@dataclass(frozen=True)
class PolyElement:
    """Finite sum ``sum_alpha c_alpha X_alpha`` with complex coefficients."""

    n: int
    coeffs: Mapping[Word, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {tuple(w): complex(c) for w, c in dict(self.coeffs).items() if complex(c) != 0}
        for w in clean:
            for i in w:
                if not 1 <= i <= self.n:
                    raise SymbolError(f"letter {i} outside 1..{self.n}")
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def monomial(cls, n: int, alpha: Word, c: complex = 1.0) -> "PolyElement":
        return cls(n, {tuple(alpha): c})

    @property
    def degree(self) -> int:
        return max((len(w) for w in self.coeffs), default=0)

    def support(self) -> list[Word]:
        return sorted(self.coeffs, key=lambda w: (len(w), w))

    def is_homogeneous(self) -> bool:
        return len({len(w) for w in self.coeffs}) <= 1

    def __add__(self, other: "PolyElement") -> "PolyElement":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) + c
        return PolyElement(self.n, out)

    def __mul__(self, other: "PolyElement") -> "PolyElement":
        out: dict = {}
        for u, cu in self.coeffs.items():
            for v, cv in other.coeffs.items():
                out[u + v] = out.get(u + v, 0) + cu * cv
        return PolyElement(self.n, out)


@dataclass(frozen=True)
class ShiftOperators:
    fock: TruncatedFock
    weights: WeightTable = field(repr=False)
    mats: tuple = field(repr=False)

    def __getitem__(self, i: int) -> sp.csc_matrix:
        """1-based: ``shifts[1]`` is ``W_1``."""
        return self.mats[i - 1]

    def word_operator(self, alpha: Word) -> sp.csc_matrix:
        out = sp.identity(self.fock.dim, dtype=complex, format="csc")
        for i in reversed(tuple(alpha)):
            out = self.mats[i - 1] @ out
        return out.tocsc()

    def assemble(self, p: PolyElement) -> sp.csc_matrix:
        """The operator ``sum c_alpha W_alpha`` on the truncated space."""
        if p.n != self.fock.n:
            raise SymbolError(f"element has n={p.n}, shifts have n={self.fock.n}")
        out = sp.csc_matrix((self.fock.dim, self.fock.dim), dtype=complex)
        for w, c in p.coeffs.items():
            out = out + c * self.word_operator(w)
        return out


def build_shifts(sym: Symbol, L: int, weights: WeightTable | None = None) -> ShiftOperators:
    require_valid(sym)
    if L < 1:
        raise ValueError(f"truncation length must be >= 1, got {L}")
    if weights is None or weights.L < L:
        weights = compute_weights(sym, L)
    n = sym.n
    fock = TruncatedFock(n, L)
    levels = [weights.level(d) for d in range(L + 1)]
    mats = []
    for i in range(1, n + 1):
        rows, cols, vals = [], [], []
        for d in range(L):
            width = n ** d
            local = np.arange(width)
            upper = levels[d + 1][(i - 1) * width + local]
            rows.append(level_offset(n, d + 1) + (i - 1) * width + local)
            cols.append(level_offset(n, d) + local)
            vals.append(np.sqrt(levels[d] / upper))
        mats.append(sp.csc_matrix(
            (np.concatenate(vals).astype(complex), (np.concatenate(rows), np.concatenate(cols))),
            shape=(fock.dim, fock.dim)))
    return ShiftOperators(fock, weights, tuple(mats))


# -- norms ------------------------------------------------------------------------

def monomial_norm(weights: WeightTable, alpha: Word) -> float:
    alpha = tuple(alpha)
    if len(alpha) > weights.L:
        raise ValueError(f"word of length {len(alpha)} exceeds weight table length {weights.L}")
    return 1.0 / np.sqrt(weights[alpha])


def homogeneous_norm(weights: WeightTable, x: Mapping[Word, complex]) -> float:
    """Closed-form norm ``sqrt(sum |x_alpha|^2 / b_alpha)`` of a homogeneous element."""
    lengths = {len(tuple(w)) for w in x}
    if len(lengths) > 1:
        raise ValueError(f"mixed-degree support (lengths {sorted(lengths)})")
    if lengths and max(lengths) > weights.L:
        raise ValueError(f"degree {max(lengths)} exceeds weight table length {weights.L}")
    return float(np.sqrt(sum(abs(complex(c)) ** 2 / weights[w] for w, c in x.items())))


def numerical_norm(mat) -> float:
    """Largest singular value."""
    if sp.issparse(mat):
        if not np.isfinite(mat.data).all():
            raise ValueError("matrix has non-finite entries")
        if max(mat.shape) <= DENSE_LIMIT:
            mat = mat.toarray()
        else:
            if mat.nnz == 0:
                return 0.0
            return float(spla.svds(mat.astype(complex), k=1, return_singular_vectors=False,
                                   tol=1e-14)[0])
    mat = np.asarray(mat)
    if not np.isfinite(mat).all():
        raise ValueError("matrix has non-finite entries")
    if mat.size == 0:
        return 0.0
    return float(np.linalg.norm(mat, 2))


def defect_operator(sym: Symbol, L: int, shifts: ShiftOperators | None = None) -> np.ndarray:
    """``I - sum_{|alpha|>=1} a_alpha W_alpha W_alpha^*`` on the truncated space (dense)."""
    require_valid(sym)
    if L < sym.degree:
        raise ValueError(f"truncation L={L} smaller than symbol degree {sym.degree}")
    if shifts is None or shifts.fock.L != L:
        shifts = build_shifts(sym, L)
    D = sp.identity(shifts.fock.dim, dtype=complex, format="csc")
    for w, a in sym.coeffs.items():
        Ww = shifts.word_operator(w)
        D = D - a * (Ww @ Ww.conj().T)
    return D.toarray()


def vacuum_projection(dim: int) -> np.ndarray:
    P = np.zeros((dim, dim))
    P[0, 0] = 1.0
    return P


# -- polynomial calculus ---------------------------------------------------------------

def evaluate(p: PolyElement, T: MatrixTuple) -> np.ndarray:
    """``sum_alpha c_alpha T_alpha`` with ``T_e = I``."""
    if p.n != T.n:
        raise DomainError(f"element has n={p.n} but tuple has {T.n} matrices")
    prod = WordProducts(T)
    out = np.zeros((T.k, T.k), dtype=complex)
    for w, c in p.coeffs.items():
        out += c * prod(w)
    return out


def radial_truncation(p: PolyElement, r: float) -> PolyElement:
    if not 0.0 < r < 1.0:
        raise ValueError(f"radius must lie in (0, 1), got {r}")
    return PolyElement(p.n, {w: c * r ** len(w) for w, c in p.coeffs.items()})


def homogeneous_part(p: PolyElement, j: int) -> PolyElement:
    return PolyElement(p.n, {w: c for w, c in p.coeffs.items() if len(w) == j})


# -- Poisson kernel ----------------------------------------------------------------------

def psd_sqrt(D: np.ndarray, clamp: float = SQRT_CLAMP) -> np.ndarray:
    """Positive square root of a Hermitian matrix; eigenvalues in ``[clamp, 0)`` are zeroed."""
    evals, evecs = np.linalg.eigh(D)
    if evals[0] < clamp:
        raise DomainError(f"tuple not in domain (defect eigenvalue {evals[0]:.3e})")
    roots = np.sqrt(np.clip(evals, 0.0, None))
    return (evecs * roots) @ evecs.conj().T


@dataclass
class PoissonKernel:
    K: np.ndarray
    delta: np.ndarray
    rho1: float
    rho2: float
    L: int


def poisson_kernel(sym: Symbol, T: MatrixTuple, L: int,
                   shifts: ShiftOperators | None = None) -> PoissonKernel:
    """Truncated Poisson kernel ``K h = sum_alpha sqrt(b_alpha) delta_alpha (x) Delta T_alpha^* h``.

    ``rho1 = ||K^*K - I||`` and ``rho2 = max_i ||K^*(W_i (x) I)K - T_i||``; both
    vanish in the limit for tuples strictly inside the domain.
    """
    require_valid(sym)
    if T.n != sym.n:
        raise DomainError(f"symbol has n={sym.n} but tuple has {T.n} matrices")
    if shifts is None or shifts.fock.L != L:
        shifts = build_shifts(sym, L)
    k = T.k
    delta = psd_sqrt(defect_matrix(sym, T))
    b = shifts.weights.as_array()[:shifts.fock.dim]
    products = np.concatenate(level_products(T, L))
    blocks = np.sqrt(b)[:, None, None] * np.einsum("ab,wcb->wac", delta, products.conj())
    K = blocks.reshape(-1, k)
    eye = np.eye(k)
    rho1 = numerical_norm(K.conj().T @ K - eye)
    rho2 = 0.0
    for i in range(1, T.n + 1):
        lifted = sp.kron(shifts[i], sp.identity(k), format="csr") @ K
        rho2 = max(rho2, numerical_norm(K.conj().T @ lifted - T[i]))
    return PoissonKernel(K, delta, rho1, rho2, L)


# -- file formats -------------------------------------------------------------------------

def parse_poly(text: str) -> PolyElement:
    n, terms = read_terms(text, parse_complex, allow_empty_word=True)
    return PolyElement(n, terms)


def serialize_poly(p: PolyElement) -> str:
    lines = [f"n={p.n}"]
    lines += [f"{format_word(w, p.n)} {format_complex(p.coeffs[w])}" for w in p.support()]
    return "\n".join(lines) + "\n"


def load_poly(path) -> PolyElement:
    with open(path, encoding="utf-8") as fh:
        return parse_poly(fh.read())


def write_shifts(shifts: ShiftOperators, fh) -> None:
    """Header ``dim n L``; per generator a line ``W <i> <nnz>`` then ``row col re im`` (0-based)."""
    fock = shifts.fock
    fh.write(f"{fock.dim} {fock.n} {fock.L}\n")
    for i, m in enumerate(shifts.mats, start=1):
        coo = m.tocoo()
        order = np.lexsort((coo.row, coo.col))
        fh.write(f"W {i} {coo.nnz}\n")
        for t in order:
            v = complex(coo.data[t])
            fh.write(f"{coo.row[t]} {coo.col[t]} {v.real!r} {v.imag!r}\n")


def read_shifts(fh) -> tuple[TruncatedFock, list[sp.csc_matrix]]:
    header = fh.readline().split()
    dim, n, L = (int(x) for x in header)
    fock = TruncatedFock(n, L)
    if fock.dim != dim:
        raise ValueError(f"dimension {dim} inconsistent with n={n}, L={L}")
    mats = []
    for _ in range(n):
        tag, i, nnz = fh.readline().split()
        rows, cols, vals = [], [], []
        for _ in range(int(nnz)):
            r, c, re_, im_ = fh.readline().split()
            rows.append(int(r))
            cols.append(int(c))
            vals.append(complex(float(re_), float(im_)))
        mats.append(sp.csc_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=complex))
    return fock, mats

