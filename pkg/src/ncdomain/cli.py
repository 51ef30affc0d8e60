"""``ncdomain`` command-line front end.

Exit codes: 0 success, 2 Obstructed, 3 Inconclusive, 1 selftest failure,
64 usage error, 65 domain error, 66 file error.
"""

from __future__ import annotations

import argparse
import contextlib
import math
import sys


from . import acceptance
from .domains import (DEFAULT_TOL, DomainError, boundary_slice, domain_membership,
                      load_tuple)
from .fock import (build_shifts, homogeneous_norm, homogeneous_part, load_poly, numerical_norm,
                   poisson_kernel, write_shifts)
from .iso import (EXIT_CODES, IsoError, Outcome, disk_witness, obstruction_search,
                  sunada_equivalence, zero_fixing_known)
from .symbol import SymbolError, collapse, load_symbol, normalize
from .weights import MAX_COMPOSITION_LENGTH, compute_weights, weight_by_compositions
from .words import WordError, enumerate_words, format_word

EXIT_USAGE, EXIT_DOMAIN, EXIT_FILE = 64, 65, 66


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _num(x: float) -> str:
    """Shortest round-trip decimal; integral values without a trailing ``.0``."""
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text}")
    return v


def _int_at_least(lo: int):
    def parse(text: str) -> int:
        v = int(text)
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {v}")
        return v
    return parse


def _axes(text: str) -> tuple[int, int]:
    try:
        i, j = (int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'i,j', got {text!r}") from None
    return i, j


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


# -- subcommands ------------------------------------------------------------------------------

def cmd_weights(args) -> int:
    sym = load_symbol(args.symbol)
    table = compute_weights(sym, args.max_len)
    words = enumerate_words(sym.n, args.max_len)
    with _output(args.out) as out:
        print(f"# weights L={args.max_len} tol={args.tol:g}", file=out)
        worst = 0.0
        for w in words:
            b = table[w]
            row = f"{format_word(w, sym.n)} {_num(b)}"
            if args.oracle:
                if not w:
                    oracle = 1.0
                elif len(w) <= MAX_COMPOSITION_LENGTH:
                    oracle = weight_by_compositions(sym, w)
                else:
                    raise UsageError(f"--oracle supports --max-len <= {MAX_COMPOSITION_LENGTH}")
                worst = max(worst, abs(b - oracle) / oracle if oracle else abs(b))
                row += f" {_num(oracle)}"
            print(row, file=out)
        if args.oracle:
            verdict = "ok" if worst <= args.tol else "MISMATCH"
            print(f"# oracle max relative residual {worst:.3e} tol={args.tol:g} {verdict}", file=out)
            if worst > args.tol:
                return EXIT_DOMAIN
    return 0


def cmd_shifts(args) -> int:
    sym = load_symbol(args.symbol)
    shifts = build_shifts(sym, args.max_len)
    with _output(args.out) as out:
        write_shifts(shifts, out)
    if args.out is not None:
        nnz = sum(m.nnz for m in shifts.mats)
        print(f"wrote {sym.n} shifts, dim {shifts.fock.dim}, {nnz} nonzeros to {args.out}")
    return 0


def cmd_norm(args) -> int:
    sym = load_symbol(args.symbol)
    p = load_poly(args.poly)
    if p.n != sym.n:
        raise DomainError(f"polynomial has n={p.n} but symbol has n={sym.n}")
    L = args.max_len if args.max_len is not None else max(p.degree, 1)
    if L < p.degree:
        raise UsageError(f"--max-len {L} is below the polynomial degree {p.degree}")
    shifts = build_shifts(sym, L)
    with _output(args.out) as out:
        print(f"# norms L={L} tol={args.tol:g}", file=out)
        print("# degree closed_form numerical abs_diff", file=out)
        worst = 0.0
        degrees = sorted({len(w) for w in p.coeffs})
        for j in degrees:
            part = homogeneous_part(p, j)
            closed = homogeneous_norm(shifts.weights, part.coeffs)
            numeric = numerical_norm(shifts.assemble(part))
            worst = max(worst, abs(closed - numeric))
            print(f"{j} {_num(closed)} {_num(numeric)} {abs(closed - numeric):.3e}", file=out)
        total = numerical_norm(shifts.assemble(p))
        print(f"total {_num(total)}", file=out)
        print(f"# max closed/numerical gap {worst:.3e} tol={args.tol:g} "
              f"{'ok' if worst <= args.tol else 'MISMATCH'}", file=out)
    return 0


def cmd_member(args) -> int:
    sym = load_symbol(args.symbol)
    T = load_tuple(args.tuple)
    v = domain_membership(sym, T, args.tol)
    with _output(args.out) as out:
        print(f"{v.status.value} margin={_num(v.margin)} tol={args.tol:g}", file=out)
    return 0


def cmd_slice(args) -> int:
    sym = load_symbol(args.symbol)
    i, j = args.axes
    for a in (i, j):
        if not 1 <= a <= sym.n:
            raise UsageError(f"axis {a} out of range 1..{sym.n}")
    if i == j:
        raise UsageError("--axes needs two distinct indices")
    points = boundary_slice(collapse(sym), (i, j), args.res)
    with _output(args.out) as out:
        print(f"# slice axes={i},{j} res={args.res} tol={args.tol:g}", file=out)
        print("x,y", file=out)
        for x, y in points:
            print(f"{x!r},{y!r}", file=out)
    return 0


def cmd_poisson(args) -> int:
    sym = load_symbol(args.symbol)
    T = load_tuple(args.tuple)
    pk = poisson_kernel(sym, T, args.max_len)
    ok = pk.rho1 <= args.tol and pk.rho2 <= args.tol
    with _output(args.out) as out:
        print(f"# poisson L={args.max_len} tol={args.tol:g}", file=out)
        print(f"rho1 {pk.rho1:.6e}", file=out)
        print(f"rho2 {pk.rho2:.6e}", file=out)
        print(f"# {'within' if ok else 'above'} tolerance", file=out)
    return 0


def _fmt_scales(c) -> str:
    return "(" + ", ".join(_num(x) for x in c) + ")"


def cmd_iso(args) -> int:
    f_raw, g_raw = load_symbol(args.f), load_symbol(args.g)
    f, cf = normalize(f_raw)
    g, cg = normalize(g_raw)
    with _output(args.out) as out:
        print(f"# iso dmax={args.dmax} res={args.res} tol={args.tol:g} seed={args.seed}", file=out)
        print(f"normalization f: c = {_fmt_scales(cf)}", file=out)
        print(f"normalization g: c = {_fmt_scales(cg)}", file=out)
        matches = sunada_equivalence(f, g, all=True)
        if not matches:
            print("sunada: no permutation-scaling equivalence of the scalar domains", file=out)
        shown = matches if args.all else matches[:1]
        for m in shown:
            print(f"sunada: sigma = {m.sigma}, s = {_fmt_scales(m.s)}, residual {m.residual:.1e}",
                  file=out)
        if matches and not args.all and len(matches) > 1:
            print(f"sunada: {len(matches) - 1} further match(es), use --all", file=out)

        verdict = obstruction_search(f, g, args.dmax, resolution=args.res, tol=args.tol,
                                     seed=args.seed)
        print("# degree constraints min_max_residual lower_bound", file=out)
        for s in verdict.summaries:
            lb = "-" if s.lower_bound is None else f"{s.lower_bound:.6e}"
            print(f"degree {s.degree} {s.constraints} {s.min_max_residual:.6e} {lb}", file=out)
        print(f"verdict: {verdict.outcome}", file=out)
        if verdict.outcome == Outcome.CANDIDATE_FOUND:
            P = verdict.candidate.P
            print(f"candidate P (residual {verdict.residual:.1e}):", file=out)
            for row in P:
                print("  " + " ".join(f"{x:.12f}" for x in row), file=out)
        cert = verdict.certificate
        if cert is not None:
            where = f" word {cert.word}" if cert.word else ""
            res = f" resolution {cert.resolution}" if cert.resolution else ""
            print(f"certificate: degree {cert.degree}, method {cert.method}{res}{where}, "
                  f"violation lower bound {cert.lower_bound:.6e}", file=out)
            zs = cert.zero_set
            if zs is not None:
                coef = ", ".join(f"{c:.12g}" for c in zs.residual.coef)
                print(f"  residual of {zs.word} at degree {zs.degree} (power basis in p): [{coef}]",
                      file=out)
                print(f"  zeros in [0,1]: {', '.join(_num(z) for z in zs.zeros)}", file=out)
                for z in zs.zeros:
                    word, v = zs.worst(z)
                    print(f"  at p = {_num(z)}: norm constraint {word} violated by {v:.6f}",
                          file=out)
        print(f"assumption: {verdict.assumption}", file=out)
        if zero_fixing_known(f, g):
            print("assumption status: holds for this pair (both scalar domains are the "
                  "|z1|^2 + |z2|^2 + |z1 z2|^2 < 1 domain, whose automorphisms fix 0)", file=out)
    return EXIT_CODES[verdict.outcome]


def cmd_disk(args) -> int:
    sym = load_symbol(args.symbol)
    witness = disk_witness(sym)
    with _output(args.out) as out:
        if witness is None:
            print("false", file=out)
        else:
            print("true", file=out)
            print(f"witness: c = {_fmt_scales(witness)}", file=out)
    return 0


def cmd_selftest(args) -> int:
    with _output(args.out) as out:
        results = acceptance.run_all(out)
        failed = [r.number for r in results if not r.passed]
        print(f"{len(results) - len(failed)}/{len(results)} criteria passed", file=out)
    return 1 if failed else 0


# -- parser ------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL,
                        help=f"numerical tolerance (default {DEFAULT_TOL:g})")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--out", default=None, help="write output to this path instead of stdout")

    parser = _Parser(prog="ncdomain", description="Noncommutative domains, weighted shifts "
                     "and isomorphism obstructions.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("weights", parents=[common], help="print the weight table b_alpha")
    p.add_argument("symbol")
    p.add_argument("--max-len", type=_int_at_least(0), required=True)
    p.add_argument("--oracle", action="store_true", help="add the composition-sum column")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("shifts", parents=[common], help="export truncated weighted shifts")
    p.add_argument("symbol")
    p.add_argument("--max-len", type=_int_at_least(1), required=True)
    p.set_defaults(func=cmd_shifts)

    p = sub.add_parser("norm", parents=[common], help="closed-form and numerical norms")
    p.add_argument("symbol")
    p.add_argument("--poly", required=True)
    p.add_argument("--max-len", type=_int_at_least(1), default=None)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("member", parents=[common], help="classify a matrix tuple")
    p.add_argument("symbol")
    p.add_argument("--tuple", required=True)
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("slice", parents=[common], help="boundary of the scalar domain as CSV")
    p.add_argument("symbol")
    p.add_argument("--axes", type=_axes, default=(1, 2))
    p.add_argument("--res", type=_int_at_least(2), default=101)
    p.set_defaults(func=cmd_slice)

    p = sub.add_parser("poisson", parents=[common], help="Poisson kernel residuals")
    p.add_argument("symbol")
    p.add_argument("--tuple", required=True)
    p.add_argument("--max-len", type=_int_at_least(1), default=10)
    p.set_defaults(func=cmd_poisson)

    p = sub.add_parser("iso", parents=[common], help="isomorphism obstruction pipeline")
    p.add_argument("f")
    p.add_argument("g")
    p.add_argument("--dmax", type=_int_at_least(2), default=2)
    p.add_argument("--res", type=_int_at_least(10), default=10001)
    p.add_argument("--all", action="store_true", help="list every Sunada match")
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("disk", parents=[common], help="is the symbol linear (a disk algebra)?")
    p.add_argument("symbol")
    p.set_defaults(func=cmd_disk)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ncdomain: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"ncdomain: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_FILE
    except (SymbolError, DomainError, IsoError, WordError, ValueError) as exc:
        print(f"ncdomain: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def run(argv=None) -> int:
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
