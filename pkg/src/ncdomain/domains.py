"""Membership in the matrix domains ``D_f(C^k)`` and the scalar domain ``D_f^1``.

A tuple ``T`` lies in ``D_f(C^k)`` when ``I - sum_alpha a_alpha T_alpha T_alpha^*``
is positive semidefinite.  The verdict reports the least eigenvalue of that
matrix as a signed margin and classifies it against a boundary band ``tol``.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .symbol import CollapsedPolynomial, Symbol
from .words import Word

DEFAULT_TOL = 1e-9


class DomainError(ValueError):
    pass


# -- matrix tuples -------------------------------------------------------------

@dataclass(frozen=True)
class MatrixTuple:
    """``n`` square complex matrices of a common size ``k``."""

    mats: tuple

    def __post_init__(self):
        mats = tuple(np.array(m, dtype=complex, ndmin=2) for m in self.mats)
        if not mats:
            raise DomainError("a matrix tuple needs at least one matrix")
        k = mats[0].shape[0]
        for i, m in enumerate(mats, start=1):
            if m.ndim != 2 or m.shape != (k, k):
                raise DomainError(f"matrix {i} has shape {m.shape}, expected ({k}, {k})")
        if k < 1:
            raise DomainError("matrices must be at least 1x1")
        object.__setattr__(self, "mats", mats)

    @classmethod
    def scalars(cls, z: Iterable[complex]) -> "MatrixTuple":
        return cls(tuple(np.array([[complex(x)]]) for x in z))

    @classmethod
    def zeros(cls, n: int, k: int) -> "MatrixTuple":
        return cls(tuple(np.zeros((k, k), dtype=complex) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.mats)

    @property
    def k(self) -> int:
        return self.mats[0].shape[0]

    def __getitem__(self, i: int) -> np.ndarray:
        """1-based access, ``T[1]`` is the first matrix."""
        return self.mats[i - 1]

    def scaled(self, t: complex) -> "MatrixTuple":
        return MatrixTuple(tuple(t * m for m in self.mats))

    def all_finite(self) -> bool:
        return all(np.isfinite(m).all() for m in self.mats)


class WordProducts:
    """Cached products ``T_alpha = T_{i1} ... T_{id}`` with ``T_e = I``."""

    def __init__(self, T: MatrixTuple):
        self.T = T
        self._cache: dict = {(): np.eye(T.k, dtype=complex)}

    def __call__(self, alpha: Word) -> np.ndarray:
        alpha = tuple(alpha)
        out = self._cache.get(alpha)
        if out is None:
            if alpha[0] > self.T.n or alpha[0] < 1:
                raise DomainError(f"letter {alpha[0]} outside 1..{self.T.n}")
            out = self.T[alpha[0]] @ self(alpha[1:])
            self._cache[alpha] = out
        return out


def level_products(T: MatrixTuple, L: int) -> list[np.ndarray]:
    """``T_alpha`` for every word up to length ``L``, one ``(n**d, k, k)`` array per length.

    Rows follow lex order: ``T_{g_i beta} = T_i T_beta`` with ``i`` the most
    significant digit.
    """
    stack = np.stack(T.mats)
    levels = [np.eye(T.k, dtype=complex)[None]]
    for _ in range(L):
        prev = levels[-1]
        levels.append(np.einsum("iab,wbc->iwac", stack, prev).reshape(-1, T.k, T.k))
    return levels


def defect_matrix(sym: Symbol, T: MatrixTuple) -> np.ndarray:
    """``I - sum_alpha a_alpha T_alpha T_alpha^*``, symmetrized."""
    if T.n != sym.n:
        raise DomainError(f"symbol has n={sym.n} but tuple has {T.n} matrices")
    prod = WordProducts(T)
    D = np.eye(T.k, dtype=complex)
    for w in sym.support():
        Tw = prod(w)
        D -= sym.coeffs[w] * (Tw @ Tw.conj().T)
    return (D + D.conj().T) / 2


# -- verdicts -------------------------------------------------------------------

class Status(str, enum.Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"

    @property
    def rank(self) -> int:
        return _RANK[self]

    def __str__(self):
        return self.value


_RANK = {Status.INTERIOR: 0, Status.BOUNDARY: 1, Status.OUTSIDE: 2}


@dataclass(frozen=True)
class MembershipVerdict:
    status: Status
    margin: float

    @classmethod
    def classify(cls, margin: float, tol: float) -> "MembershipVerdict":
        if margin > tol:
            status = Status.INTERIOR
        elif margin < -tol:
            status = Status.OUTSIDE
        else:
            status = Status.BOUNDARY
        return cls(status, float(margin))


def _check_tol(tol: float) -> None:
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol}")


def domain_membership(sym: Symbol, T: MatrixTuple, tol: float = DEFAULT_TOL) -> MembershipVerdict:
    _check_tol(tol)
    if not T.all_finite():
        raise DomainError("tuple has non-finite entries")
    D = defect_matrix(sym, T)
    return MembershipVerdict.classify(float(np.linalg.eigvalsh(D)[0]), tol)


def scalar_membership(cp: CollapsedPolynomial, z: Sequence[complex],
                      tol: float = DEFAULT_TOL) -> MembershipVerdict:
    _check_tol(tol)
    if len(z) != cp.n:
        raise DomainError(f"point has {len(z)} coordinates, expected {cp.n}")
    return MembershipVerdict.classify(1.0 - cp.value(z), tol)


# -- symmetry checks ------------------------------------------------------------

@dataclass
class InvarianceReport:
    total: int = 0
    failures: list = field(default_factory=list)
    max_margin_drift: float = 0.0
    margin_tol: float = 1e-12

    @property
    def passed(self) -> bool:
        return not self.failures and self.max_margin_drift <= self.margin_tol

    def record(self, idx: int, before: MembershipVerdict, after: MembershipVerdict) -> None:
        self.total += 1
        drift = abs(before.margin - after.margin)
        self.max_margin_drift = max(self.max_margin_drift, drift)
        if before.status != after.status or drift > self.margin_tol:
            self.failures.append((idx, before, after))


def reinhardt_check(sym: Symbol, samples, tol: float = DEFAULT_TOL) -> InvarianceReport:
    """Coordinatewise rotations ``z -> (w_1 z_1, ..., w_n z_n)`` must not change the verdict.

    ``samples`` is an iterable of ``(z, omega)`` with ``|omega_i| = 1``.
    Verdicts are taken on the 1x1 matrix route.
    """
    report = InvarianceReport()
    for idx, (z, omega) in enumerate(samples):
        z = np.asarray(z, dtype=complex)
        before = domain_membership(sym, MatrixTuple.scalars(z), tol)
        after = domain_membership(sym, MatrixTuple.scalars(np.asarray(omega) * z), tol)
        report.record(idx, before, after)
    return report


def circular_check(sym: Symbol, k: int, samples, tol: float = DEFAULT_TOL) -> InvarianceReport:
    """A single global phase ``T -> omega T`` must not change the verdict."""
    report = InvarianceReport()
    for idx, (T, omega) in enumerate(samples):
        if T.k != k:
            raise DomainError(f"sample {idx} has k={T.k}, expected {k}")
        before = domain_membership(sym, T, tol)
        after = domain_membership(sym, T.scaled(omega), tol)
        report.record(idx, before, after)
    return report


# -- plotting data ----------------------------------------------------------------

def boundary_slice(cp: CollapsedPolynomial, axes: tuple[int, int], resolution: int,
                   precision: float = 1e-10) -> list[tuple[float, float]]:
    """Outer boundary of ``D_f^1`` in the ``(|z_i|, |z_j|)`` quarter plane.

    For each ``x`` on a uniform grid of ``[0, 1]`` returns the largest ``y >= 0``
    with value ``<= 1``; the collapsed polynomial increases in each modulus, so
    bisection suffices.  Grid points with no feasible ``y`` are dropped.
    """
    i, j = axes
    if cp.n < 2 or not (1 <= i <= cp.n and 1 <= j <= cp.n) or i == j:
        raise DomainError(f"axes {axes} invalid for n={cp.n}")
    if resolution < 2:
        raise DomainError("resolution must be >= 2")

    # Only terms supported on axes i, j survive; split off the y-free part so the
    # comparison is made against the remaining budget and does not round away y.
    x_terms, xy_terms = [], []
    for m, c in cp.terms.items():
        if any(k for idx, k in enumerate(m) if idx not in (i - 1, j - 1)):
            continue
        (xy_terms if m[j - 1] else x_terms).append((c, m[i - 1], m[j - 1]))

    def y_part(x, y):
        return sum(c * x ** (2 * a) * y ** (2 * b) for c, a, b in xy_terms)

    points = []
    for x in np.linspace(0.0, 1.0, resolution):
        x = float(x)
        budget = 1.0 - sum(c * x ** (2 * a) for c, a, _ in x_terms)
        if budget < 0.0:
            continue
        if not xy_terms:
            raise DomainError("domain unbounded along this slice")
        lo, hi = 0.0, 1.0
        while y_part(x, hi) <= budget:
            lo, hi = hi, 2 * hi
            if hi > 1e12:
                raise DomainError("domain unbounded along this slice")
        while hi - lo > precision:
            mid = (lo + hi) / 2
            if y_part(x, mid) <= budget:
                lo = mid
            else:
                hi = mid
        points.append((x, lo))
    return points


# -- the explicit C^8 description of D^2(A_2) ---------------------------------------

def pack_c8(lam: Sequence[complex]) -> MatrixTuple:
    l1, l2, l3, l4, l5, l6, l7, l8 = (complex(x) for x in lam)
    return MatrixTuple((np.array([[l1, l2], [l5, l6]]), np.array([[l3, l4], [l7, l8]])))


def c8_coordinate_margin(lam: Sequence[complex]) -> float:
    """Margin of the explicit coordinate inequality pair, expanded term by term (min of the slacks)."""
    lam = np.asarray(lam, dtype=complex)
    if lam.shape != (8,):
        raise DomainError("need exactly 8 coordinates")
    mod2 = np.abs(lam) ** 2
    first = mod2[:4].sum()
    second = mod2.sum()
    for a in range(8):
        for b in range(a + 1, 8):
            second -= mod2[a] * mod2[b]
    for a in range(4):
        for b in range(a + 1, 4):
            second += abs(lam[a] * np.conj(lam[b]) + np.conj(lam[a + 4]) * lam[b + 4]) ** 2
    return float(min(1.0 - first, 1.0 - second))


def c8_determinant_margin(lam: Sequence[complex]) -> float:
    """Margin of ``(1,1)`` entry and determinant of ``I - T1 T1^* - T2 T2^*`` written out in coordinates.

    With ``u = (l1..l4)`` and ``v = (l5..l8)`` the determinant is
    ``1 - |u|^2 - |v|^2 + |u|^2 |v|^2 - |<u, v>|^2``.
    """
    lam = np.asarray(lam, dtype=complex)
    u, v = lam[:4], lam[4:]
    uu = float(np.vdot(u, u).real)
    vv = float(np.vdot(v, v).real)
    cross = abs(np.vdot(v, u)) ** 2
    return float(min(1.0 - uu, 1.0 - uu - vv + uu * vv - cross))


@dataclass(frozen=True)
class C8Verdict:
    coordinate: MembershipVerdict
    eigen: MembershipVerdict

    @property
    def agree(self) -> bool:
        return self.coordinate.status == self.eigen.status


def ball_domain_c8(lam: Sequence[complex], tol: float = DEFAULT_TOL) -> C8Verdict:
    """Classify ``lam`` by the coordinate inequalities and by the eigenvalue route."""
    coordinate = MembershipVerdict.classify(c8_coordinate_margin(lam), tol)
    eigen = domain_membership(Symbol.linear(2), pack_c8(lam), tol)
    return C8Verdict(coordinate, eigen)


@dataclass
class C8Audit:
    samples: int
    coordinate_agreement: float
    determinant_agreement: float
    eigen_interior_fraction: float


def audit_c8(points: Iterable[Sequence[complex]], tol: float = DEFAULT_TOL) -> C8Audit:
    """Agreement rates of the coordinate-inequality and expanded-determinant descriptions with the eigenvalue route."""
    lin = Symbol.linear(2)
    total = coord = det = interior = 0
    for lam in points:
        eigen = domain_membership(lin, pack_c8(lam), tol).status
        total += 1
        interior += eigen == Status.INTERIOR
        coord += MembershipVerdict.classify(c8_coordinate_margin(lam), tol).status == eigen
        det += MembershipVerdict.classify(c8_determinant_margin(lam), tol).status == eigen
    if total == 0:
        raise DomainError("no samples")
    return C8Audit(total, coord / total, det / total, interior / total)


def sample_ball(rng: np.random.Generator, dim: int, radius: float, count: int) -> np.ndarray:
    """Uniform samples from the complex ball of ``C^dim``."""
    g = rng.normal(size=(count, dim)) + 1j * rng.normal(size=(count, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.uniform(size=(count, 1)) ** (1.0 / (2 * dim))
    return g * r


# -- text formats -----------------------------------------------------------------

def parse_complex(text: str) -> complex:
    """Parse ``re``, ``re+imI`` or ``imI``."""
    s = text.strip()
    if "j" in s or "J" in s:
        raise ValueError(f"malformed complex number {text!r} (imaginary unit is 'I')")
    if s.endswith("I"):
        s = s[:-1] + "j"
    try:
        return complex(s)
    except ValueError:
        raise ValueError(f"malformed complex number {text!r}") from None


def format_complex(z: complex) -> str:
    z = complex(z)
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}I"


_TUPLE_HEADER = re.compile(r"^n\s*=\s*(\d+)\s+k\s*=\s*(\d+)$")


def parse_tuple(text: str) -> MatrixTuple:
    rows = []
    header = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            m = _TUPLE_HEADER.match(line)
            if not m:
                raise DomainError(f"line {lineno}: expected header 'n=<int> k=<int>'")
            header = int(m.group(1)), int(m.group(2))
            continue
        try:
            rows.append([parse_complex(t) for t in line.split()])
        except ValueError as exc:
            raise DomainError(f"line {lineno}: {exc}") from None
        if len(rows[-1]) != header[1]:
            raise DomainError(f"line {lineno}: expected {header[1]} entries, got {len(rows[-1])}")
    if header is None:
        raise DomainError("missing header 'n=<int> k=<int>'")
    n, k = header
    if len(rows) != n * k:
        raise DomainError(f"expected {n * k} matrix rows, got {len(rows)}")
    return MatrixTuple(tuple(np.array(rows[i * k:(i + 1) * k]) for i in range(n)))


def serialize_tuple(T: MatrixTuple) -> str:
    lines = [f"n={T.n} k={T.k}"]
    for m in T.mats:
        lines.extend(" ".join(format_complex(x) for x in row) for row in m)
    return "\n".join(lines) + "\n"


def load_tuple(path) -> MatrixTuple:
    with open(path, encoding="utf-8") as fh:
        return parse_tuple(fh.read())
