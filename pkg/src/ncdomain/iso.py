"""Obstructions to isomorphism between domain algebras.

Two layers:

* ``sunada_equivalence`` compares the scalar domains: a coordinate permutation
  plus positive rescaling must carry one collapsed polynomial onto the other.
* ``obstruction_search`` assumes a zero-fixing isometric isomorphism, which
  must send ``W_i^f`` to ``sum_j m_ij W_j^g`` with ``M`` unitary (after both
  symbols are normalized).  Applying it to a word ``W_beta^f`` and using the
  closed-form norm of homogeneous elements gives, with ``p_ij = |m_ij|^2``,

      sum_{|alpha| = d} prod_t p_{beta_t alpha_t} / b^g_alpha  =  1 / b^f_beta.

  These are necessary conditions only.  ``P`` ranges over doubly stochastic
  matrices.
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import minimize

from .domains import DEFAULT_TOL, DomainError, MatrixTuple, Status, domain_membership
from .fock import PolyElement, evaluate
from .symbol import Symbol, collapse, is_normalized, normalize, require_valid
from .weights import WeightTable, compute_weights
from .words import enumerate_words, format_word, level_offset

FEASIBILITY_TOL = 1e-9
LSQ_TOL = 1e-9

ZERO_FIXING_BANNER = (
    "ASSUMPTION: the isomorphism is taken to fix the zero character (its induced map "
    "on scalar points sends 0 to 0). All constraints below are necessary conditions "
    "under that hypothesis; CandidateFound does not assert that an isomorphism exists."
)


class IsoError(ValueError):
    pass


# -- level-1 invariant ---------------------------------------------------------------

@dataclass(frozen=True)
class SunadaMatch:
    """``z -> (sqrt(s_1) z_sigma(1), ..., sqrt(s_n) z_sigma(n))`` maps ``D_f^1`` onto ``D_g^1``."""

    sigma: tuple
    s: tuple
    residual: float

    def apply(self, z: Sequence[complex]) -> list[complex]:
        return [math.sqrt(self.s[i]) * z[self.sigma[i] - 1] for i in range(len(self.sigma))]

    def inverse(self) -> "SunadaMatch":
        n = len(self.sigma)
        inv = [0] * n
        for i, si in enumerate(self.sigma, start=1):
            inv[si - 1] = i
        return SunadaMatch(tuple(inv), tuple(1.0 / self.s[inv[j] - 1] for j in range(n)),
                           self.residual)


def sunada_equivalence(f: Symbol, g: Symbol, all: bool = False):
    """Find a permutation-and-scaling equivalence of the scalar domains.

    Returns the first :class:`SunadaMatch` in lexicographic permutation order,
    ``None`` if there is none, or the full list when ``all=True``.
    """
    require_valid(f)
    require_valid(g)
    if f.n != g.n:
        return [] if all else None
    n = f.n
    cf, cg = collapse(f).terms, collapse(g).terms
    matches = []
    for sigma in itertools.permutations(range(1, n + 1)):
        # image multidegree mu_i = m_sigma(i); need c_f(m) = c_g(mu) prod_i s_i^mu_i
        rows, rhs = [], []
        ok = len(cf) == len(cg)
        if ok:
            for m, c in cf.items():
                mu = tuple(m[s - 1] for s in sigma)
                if mu not in cg:
                    ok = False
                    break
                rows.append(mu)
                rhs.append(math.log(c) - math.log(cg[mu]))
        if not ok:
            continue
        A = np.array(rows, dtype=float)
        b = np.array(rhs)
        x, *_ = np.linalg.lstsq(A, b, rcond=None)
        residual = float(np.max(np.abs(A @ x - b))) if len(b) else 0.0
        if residual <= LSQ_TOL:
            match = SunadaMatch(tuple(sigma), tuple(float(v) for v in np.exp(x)), residual)
            if not all:
                return match
            matches.append(match)
    return matches if all else None


# -- constraint systems ------------------------------------------------------------------

@dataclass(frozen=True)
class LinearCandidate:
    """Squared moduli ``p_ij = |m_ij|^2`` of a unitary; doubly stochastic."""

    P: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise IsoError(f"P must be square, got shape {P.shape}")
        if (P < -1e-9).any() or (P > 1 + 1e-9).any():
            raise IsoError("entries of P must lie in [0, 1]")
        if self.stochastic_residual_of(P) > 1e-9:
            raise IsoError("P is not doubly stochastic")
        object.__setattr__(self, "P", P)

    @staticmethod
    def stochastic_residual_of(P: np.ndarray) -> float:
        return float(max(np.abs(P.sum(axis=0) - 1).max(), np.abs(P.sum(axis=1) - 1).max()))

    @classmethod
    def from_permutation(cls, sigma: Sequence[int]) -> "LinearCandidate":
        n = len(sigma)
        P = np.zeros((n, n))
        for i, s in enumerate(sigma):
            P[i, s - 1] = 1.0
        return cls(P)

    @classmethod
    def two_by_two(cls, p: float) -> "LinearCandidate":
        return cls(np.array([[p, 1 - p], [1 - p, p]]))


@dataclass(frozen=True)
class ConstraintSystem:
    """Degree-``d`` norm constraints ``lhs_beta(P) = 1 / b^f_beta`` for all ``|beta| = d``."""

    n: int
    d: int
    words: tuple
    rhs: np.ndarray = field(repr=False)
    g_inverse_weights: np.ndarray = field(repr=False)

    def lhs(self, P: np.ndarray) -> np.ndarray:
        K = functools.reduce(np.kron, [np.asarray(P, dtype=float)] * self.d, np.ones((1, 1)))
        return K @ self.g_inverse_weights

    def residuals(self, P: np.ndarray) -> np.ndarray:
        return self.lhs(P) - self.rhs

    def norm_violations(self, P: np.ndarray) -> np.ndarray:
        """``| ||Phi(W^f_beta)|| - ||W^f_beta|| |`` per word."""
        return np.abs(np.sqrt(np.clip(self.lhs(P), 0, None)) - np.sqrt(self.rhs))

    @staticmethod
    def stochastic_residuals(P: np.ndarray) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        return np.concatenate([P.sum(axis=1) - 1, P.sum(axis=0) - 1])

    def polynomials(self) -> list[Polynomial]:
        """For ``n = 2``: residual of each constraint as a polynomial in ``p = p_11``.

        With ``P = [[p, 1-p], [1-p, p]]`` the product over letters is
        ``p^a (1-p)^(d-a)`` where ``a`` counts positions where ``alpha`` and
        ``beta`` agree, so each lhs is a Bernstein polynomial.
        """
        if self.n != 2:
            raise IsoError("univariate reduction needs n = 2")
        alphas = enumerate_words(2, self.d)[level_offset(2, self.d):]
        x = Polynomial([0.0, 1.0])
        basis = [x ** a * (1 - x) ** (self.d - a) for a in range(self.d + 1)]
        out = []
        for beta, target in zip(self.words, self.rhs):
            bern = np.zeros(self.d + 1)
            for alpha, w in zip(alphas, self.g_inverse_weights):
                bern[sum(u == v for u, v in zip(alpha, beta))] += w
            poly = sum((c * basis[a] for a, c in enumerate(bern)), Polynomial([0.0]))
            out.append(poly - target)
        return out


def _require_normalized(sym: Symbol, name: str) -> None:
    require_valid(sym)
    if not is_normalized(sym):
        raise IsoError(f"{name} is not normalized (generator coefficients must be 1); "
                       "call normalize() first")


def degree_d_constraints(f: Symbol, g: Symbol, d: int, wf: WeightTable | None = None,
                         wg: WeightTable | None = None) -> ConstraintSystem:
    _require_normalized(f, "f")
    _require_normalized(g, "g")
    if f.n != g.n:
        raise IsoError(f"symbols have different numbers of variables ({f.n} vs {g.n})")
    if d < 1:
        raise IsoError("degree must be >= 1")
    wf = wf if wf is not None and wf.L >= d else compute_weights(f, d)
    wg = wg if wg is not None and wg.L >= d else compute_weights(g, d)
    return ConstraintSystem(
        n=f.n, d=d,
        words=tuple(enumerate_words(f.n, d)[level_offset(f.n, d):]),
        rhs=1.0 / wf.level(d),
        g_inverse_weights=1.0 / wg.level(d),
    )


# -- verdicts -------------------------------------------------------------------------------

class Outcome(str, enum.Enum):
    OBSTRUCTED = "Obstructed"
    CANDIDATE_FOUND = "CandidateFound"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


EXIT_CODES = {Outcome.CANDIDATE_FOUND: 0, Outcome.OBSTRUCTED: 2, Outcome.INCONCLUSIVE: 3}


@dataclass
class ZeroSetCheck:
    """Where one constraint vanishes on ``[0, 1]`` and how badly the others fail there."""

    degree: int
    word: str
    residual: Polynomial
    zeros: list
    violations: dict  # zero -> {word: norm-level violation}

    def worst(self, p: float) -> tuple[str, float]:
        word, v = max(self.violations[p].items(), key=lambda kv: kv[1])
        return word, v


@dataclass
class ObstructionCertificate:
    """``lower_bound`` is a verified positive lower bound on the largest
    squared-norm constraint violation over all admissible ``P``."""

    degree: int
    lower_bound: float
    method: str
    resolution: int | None = None
    zero_set: ZeroSetCheck | None = None
    word: str | None = None


@dataclass
class DegreeSummary:
    degree: int
    constraints: int
    min_max_residual: float
    lower_bound: float | None = None


@dataclass
class ObstructionVerdict:
    outcome: Outcome
    certificate: ObstructionCertificate | None = None
    candidate: LinearCandidate | None = None
    residual: float | None = None
    summaries: list = field(default_factory=list)
    assumption: str = ZERO_FIXING_BANNER

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.outcome]


def _max_abs_residual(systems, P) -> float:
    return max(float(np.max(np.abs(s.residuals(P)))) for s in systems)


def _real_roots_in_unit_interval(poly: Polynomial) -> list[float]:
    coef = poly.coef
    if np.max(np.abs(coef)) < 1e-15:
        return []
    roots = []
    for r in poly.roots():
        if abs(r.imag) < 1e-7 and -1e-9 <= r.real <= 1 + 1e-9:
            roots.append(float(min(max(r.real, 0.0), 1.0)))
    return sorted(set(round(r, 12) for r in roots))


def _lipschitz(poly: Polynomial) -> float:
    return float(sum(abs(c) * k for k, c in enumerate(poly.coef)))


def _search_two(systems, resolution: int, tol: float) -> ObstructionVerdict:
    polys = [(s.d, format_word(w, 2), poly)
             for s in systems for w, poly in zip(s.words, s.polynomials())]
    grid = np.linspace(0.0, 1.0, resolution)
    roots = set()
    for _, _, poly in polys:
        roots.update(_real_roots_in_unit_interval(poly))
    # identity first, then the swap, so ties resolve to the plainest candidate
    points = np.array([1.0, 0.0] + sorted(roots - {0.0, 1.0}) + list(grid))
    values = np.array([np.abs(poly(points)) for _, _, poly in polys])
    worst = values.max(axis=0)
    feasible = np.flatnonzero(worst <= tol)
    best = int(feasible[0]) if len(feasible) else int(np.argmin(worst))

    summaries = []
    for s in systems:
        idx = [k for k, (d, _, _) in enumerate(polys) if d <= s.d]
        summaries.append(DegreeSummary(s.d, len(s.words) + 2 * s.n,
                                       float(values[idx].max(axis=0).min())))

    if worst[best] <= tol:
        cand = LinearCandidate.two_by_two(float(points[best]))
        return ObstructionVerdict(Outcome.CANDIDATE_FOUND, candidate=cand,
                                  residual=float(worst[best]), summaries=summaries)

    half_step = 0.5 / (resolution - 1)
    grid_vals = np.array([np.abs(poly(grid)) for _, _, poly in polys])
    slack = np.array([_lipschitz(poly) * half_step for _, _, poly in polys])
    certified = None
    for summary in summaries:
        idx = [k for k, (d, _, _) in enumerate(polys) if d <= summary.degree]
        bound = float((grid_vals[idx] - slack[idx, None]).max(axis=0).min())
        summary.lower_bound = bound
        if bound > 0 and certified is None:
            certified = (summary.degree, bound)
    if certified is None:
        return ObstructionVerdict(Outcome.INCONCLUSIVE, residual=float(worst[best]),
                                  summaries=summaries)

    degree, bound = certified
    return ObstructionVerdict(
        Outcome.OBSTRUCTED,
        certificate=ObstructionCertificate(degree, bound, "grid", resolution,
                                           _zero_set_check(systems, polys, degree)),
        residual=float(worst[best]), summaries=summaries)


def _zero_set_check(systems, polys, degree: int) -> ZeroSetCheck | None:
    """Pick the constraint with the smallest nonempty finite zero set and test its zeros."""
    best = None
    for d, word, poly in polys:
        if d > degree or np.max(np.abs(poly.coef)) < 1e-15:
            continue
        zeros = _real_roots_in_unit_interval(poly)
        if zeros and (best is None or len(zeros) < len(best[3])):
            best = (d, word, poly, zeros)
    if best is None:
        return None
    d, word, poly, zeros = best
    violations = {}
    for p in zeros:
        P = LinearCandidate.two_by_two(p).P
        violations[p] = {format_word(w, 2): float(v)
                         for s in systems if s.d <= degree
                         for w, v in zip(s.words, s.norm_violations(P))}
    return ZeroSetCheck(d, word, poly, zeros, violations)


def _range_obstruction(systems) -> ObstructionCertificate | None:
    """Row-stochastic ``P`` makes each lhs a convex combination of the ``1/b^g_alpha``.

    A target outside ``[min, max]`` of those values is infeasible for every ``P``.
    """
    for s in systems:
        lo, hi = s.g_inverse_weights.min(), s.g_inverse_weights.max()
        gaps = np.maximum(lo - s.rhs, s.rhs - hi)
        k = int(np.argmax(gaps))
        if gaps[k] > 0:
            return ObstructionCertificate(s.d, float(gaps[k]), "range",
                                          word=format_word(s.words[k], s.n))
    return None


def _sinkhorn(A: np.ndarray, iters: int = 200) -> np.ndarray:
    for _ in range(iters):
        A = A / A.sum(axis=1, keepdims=True)
        A = A / A.sum(axis=0, keepdims=True)
    return A


def _search_general(systems, n: int, tol: float, seed: int, restarts: int) -> ObstructionVerdict:
    summaries = [DegreeSummary(s.d, len(s.words) + 2 * n, math.nan) for s in systems]
    best_res = math.inf
    for sigma in itertools.permutations(range(1, n + 1)):
        P = LinearCandidate.from_permutation(sigma).P
        res = _max_abs_residual(systems, P)
        if res < best_res:
            best_res = res
        if res <= tol:
            return ObstructionVerdict(Outcome.CANDIDATE_FOUND, candidate=LinearCandidate(P),
                                      residual=res, summaries=summaries)

    cert = _range_obstruction(systems)
    if cert is not None:
        return ObstructionVerdict(Outcome.OBSTRUCTED, certificate=cert, residual=best_res,
                                  summaries=summaries)

    rng = np.random.default_rng(seed)

    def objective(x):
        P = x.reshape(n, n)
        return sum(float(np.sum(s.residuals(P) ** 2)) for s in systems)

    cons = [{"type": "eq", "fun": lambda x: ConstraintSystem.stochastic_residuals(x.reshape(n, n))}]
    for _ in range(restarts):
        x0 = _sinkhorn(rng.uniform(0.1, 1.0, size=(n, n))).ravel()
        sol = minimize(objective, x0, method="SLSQP", bounds=[(0.0, 1.0)] * (n * n),
                       constraints=cons, options={"ftol": 1e-22, "maxiter": 500})
        P = np.clip(sol.x.reshape(n, n), 0.0, 1.0)
        res = _max_abs_residual(systems, P)
        if res < best_res and LinearCandidate.stochastic_residual_of(P) <= tol:
            best_res = res
        if res <= tol and LinearCandidate.stochastic_residual_of(P) <= tol:
            return ObstructionVerdict(Outcome.CANDIDATE_FOUND, candidate=LinearCandidate(P),
                                      residual=res, summaries=summaries)
    return ObstructionVerdict(Outcome.INCONCLUSIVE, residual=best_res, summaries=summaries)


def obstruction_search(f: Symbol, g: Symbol, d_max: int, resolution: int = 10001,
                       tol: float = FEASIBILITY_TOL, seed: int = 0,
                       restarts: int = 8) -> ObstructionVerdict:
    """Decide feasibility of the degree ``<= d_max`` norm constraints over doubly stochastic ``P``.

    For ``n = 2`` the search is exact up to a Lipschitz-certified grid.  For
    larger ``n`` permutation matrices are tried exactly, then a range bound,
    then seeded local searches; failure to decide gives ``Inconclusive``.
    """
    if d_max < 2:
        raise IsoError("d_max must be >= 2")
    if resolution < 10:
        raise IsoError("resolution must be >= 10")
    _require_normalized(f, "f")
    _require_normalized(g, "g")
    if f.n != g.n:
        raise IsoError(f"symbols have different numbers of variables ({f.n} vs {g.n})")
    wf, wg = compute_weights(f, d_max), compute_weights(g, d_max)
    systems = [degree_d_constraints(f, g, d, wf, wg) for d in range(1, d_max + 1)]
    if f.n == 1:
        P = np.ones((1, 1))
        res = _max_abs_residual(systems, P)
        if res <= tol:
            return ObstructionVerdict(Outcome.CANDIDATE_FOUND, candidate=LinearCandidate(P),
                                      residual=res)
        worst = max(systems, key=lambda s: np.max(np.abs(s.residuals(P))))
        return ObstructionVerdict(Outcome.OBSTRUCTED, residual=res,
                                  certificate=ObstructionCertificate(worst.d, res, "exact"))
    if f.n == 2:
        return _search_two(systems, resolution, tol)
    return _search_general(systems, f.n, tol, seed, restarts)


# -- disk algebras, pushforward ---------------------------------------------------------------

def disk_detector(sym: Symbol) -> bool:
    require_valid(sym)
    return all(len(w) == 1 for w in sym.coeffs)


def disk_witness(sym: Symbol) -> tuple[float, ...] | None:
    """Scales ``c`` with ``rescale(sym, c) = sum X_i``, or ``None`` if ``sym`` is not linear."""
    if not disk_detector(sym):
        return None
    return normalize(sym)[1]


FLAGSHIP_COLLAPSE = {(1, 0): 1.0, (0, 1): 1.0, (1, 1): 1.0}


def zero_fixing_known(f: Symbol, g: Symbol) -> bool:
    """True for the one case where zero-fixing is known from the domain classification:
    both normalized collapses equal ``|z1|^2 + |z2|^2 + |z1 z2|^2``."""
    if f.n != 2 or g.n != 2:
        return False
    cf = collapse(normalize(f)[0]).terms
    cg = collapse(normalize(g)[0]).terms
    return all(set(c) == set(FLAGSHIP_COLLAPSE) and
               all(abs(c[m] - v) <= 1e-12 for m, v in FLAGSHIP_COLLAPSE.items())
               for c in (cf, cg))


def pushforward(maps: Sequence[PolyElement], T: MatrixTuple, g: Symbol,
                tol: float = DEFAULT_TOL) -> MatrixTuple:
    """``(map_1(T), ..., map_n(T))`` for ``T`` in ``D_g(C^k)``."""
    require_valid(g)
    if len(maps) == 0:
        raise IsoError("need at least one component map")
    for p in maps:
        if p.n != g.n:
            raise IsoError(f"component map has n={p.n}, expected {g.n}")
    if domain_membership(g, T, tol).status == Status.OUTSIDE:
        raise DomainError("tuple is outside the source domain")
    return MatrixTuple(tuple(evaluate(p, T) for p in maps))


def linear_maps(M: np.ndarray) -> list[PolyElement]:
    """Component maps ``X_i -> sum_j m_ij X_j``."""
    M = np.asarray(M)
    n = M.shape[0]
    return [PolyElement(n, {(j + 1,): M[i, j] for j in range(n)}) for i in range(n)]

