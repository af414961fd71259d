"""Command-line verification suites.

Exit status: 0 when every check passes, 1 when some check fails, 2 when the
input violates a domain invariant, 64 on a usage error.
"""
import argparse
import sys
import time

import numpy as np

from . import hypergeo, oscillator, racah_algebra, su11_coupling
from .exceptions import ParameterError, RacahkitError
from .report import Report, write_csv

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_DOMAIN = 2
EXIT_USAGE = 64

CLOSURE_TOL = 1e-9
KMP_TOL = 1e-8
OVERLAP_TOL = 1e-7
HAMILTONIAN_TOL = 1e-10
ORTHOGONALITY_TOL = 1e-10
DUALITY_TOL = 1e-11
BISPECTRAL_TOL = 1e-10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _tol(args, default):
    return default if args.tol is None else args.tol


# --- verify-rep ---------------------------------------------------------------

def cmd_verify_rep(args):
    if args.dim < 1:
        raise ParameterError("dim >= 1", f"dimension must be positive, got {args.dim}")
    c = racah_algebra.CanonicalConstants(args.d, args.e1, args.e2)
    spec = racah_algebra.RepresentationSpec(args.dim - 1, args.rho, args.q, c)
    tol = _tol(args, CLOSURE_TOL)
    rep = Report("verify-rep", {"dim": args.dim, "N": spec.N, "rho": args.rho, "q": args.q,
                                "d": args.d, "e1": args.e1, "e2": args.e2})
    m = racah_algebra.build_representation(spec)
    rel = racah_algebra.verify_canonical_relations(m, c)
    rep.add("relation_k3_commutator", rel.k1k2, tol)
    rep.add("relation_k2k3", rel.k2k3, tol)
    rep.add("relation_k3k1", rel.k3k1, tol)
    rep.add("casimir_constant", racah_algebra.casimir_defect(m, c, args.q), tol)
    P = racah_algebra.quartic(c, args.q)
    rep.add("truncation_U0", P.relative_value(spec.rho ** 2), tol)
    rep.add("truncation_UN+1", P.relative_value((spec.rho - spec.N - 1) ** 2), tol)
    interior = [racah_algebra.recurrence_defect(spec, n) for n in range(1, spec.N)]
    rep.add("offdiagonal_recurrence", max(interior, default=0.0), tol)
    rep.add("spectrum_ladder", racah_algebra.ladder_defect(spec), tol)
    rep.adopted_conventions["diagonal_entry"] = "V_n = -(lambda_n^2 + d lambda_n + e2)/(2 lambda_n)"
    rows = [(n, int(k), float(m.K1[n, k]), float(m.K2[n, k]), float(m.K3[n, k]))
            for n in range(spec.dim) for k in range(spec.dim)]
    return rep, (["row", "col", "K1", "K2", "K3"], rows)


# --- overlap ------------------------------------------------------------------

def _truncation_kind(args):
    target = -args.N - 1
    for kind, value in (("gamma", args.gamma), ("alpha", args.alpha), ("beta_delta", args.beta + args.delta)):
        if abs(value - target) <= hypergeo.TRUNCATION_TOL:
            return kind
    raise ParameterError("truncation", f"none of alpha, beta+delta, gamma equals -N-1 = {target}")


def cmd_overlap(args):
    if args.N < 0:
        raise ParameterError("N nonnegative integer", f"N must be >= 0, got {args.N}")
    kind = _truncation_kind(args)
    p = hypergeo.RacahParameters(args.alpha, args.beta, args.gamma, args.delta, args.N, kind)
    rep = Report("overlap", {"alpha": args.alpha, "beta": args.beta, "gamma": args.gamma,
                             "delta": args.delta, "N": args.N})
    rep.adopted_conventions["truncation"] = kind
    closure = _tol(args, CLOSURE_TOL)
    rep.add("recurrence_relation", hypergeo.recurrence_residual(p), _tol(args, BISPECTRAL_TOL))
    rep.add("difference_relation", hypergeo.difference_residual(p), _tol(args, BISPECTRAL_TOL))

    try:
        rep.add("orthogonality", hypergeo.orthogonality_residual(p), _tol(args, ORTHOGONALITY_TOL))
        rep.adopted_conventions["orthogonality"] = "Gram matrix normalized by sqrt(h_n h_m)"
    except ParameterError as exc:
        rep.adopted_conventions["orthogonality"] = f"skipped: {exc.invariant}"
    try:
        rep.add("duality", hypergeo.duality_check(p), _tol(args, DUALITY_TOL))
    except ParameterError as exc:
        rep.adopted_conventions["duality"] = f"skipped: {exc.invariant}"

    if p.N >= 2:
        closed = racah_algebra.closed_form_constants(p)
        grid = racah_algebra.grid_realization(p)
        dual = racah_algebra.grid_realization(p.dual())
        rep.add("grid_relations", grid.residuals.max(), closure)
        rep.add("grid_constants", racah_algebra.constants_match(grid.constants, closed), closure)
        rep.add("dual_grid_constants_swapped",
                racah_algebra.constants_match(dual.constants, closed.swapped()), closure)
    else:
        rep.adopted_conventions["grid_fit"] = "skipped: N < 2 leaves the seven constants underdetermined"

    header = ["n", "x", "P_n(mu_x)", "R_n(lambda(x))", "abs_diff"]
    R = hypergeo.racah_matrix(p)
    P = np.full_like(R, np.nan)
    pair = p if kind == "gamma" else (p.dual() if kind == "alpha" else None)
    if pair is None:
        rep.adopted_conventions["overlap"] = "skipped: needs gamma or alpha truncation"
    else:
        try:
            spec = racah_algebra.spec_from_racah_params(pair.alpha, pair.beta, pair.delta, pair.N)
            cmp = racah_algebra.compare_overlaps_with_racah(spec, p=pair)
            rep.add("overlap_vs_polynomial", cmp.residual, _tol(args, OVERLAP_TOL))
            rep.add("overlap_spectrum", cmp.spectrum_residual, closure)
            rep.adopted_conventions["overlap"] = (
                "row-scaled max |P_n(mu_x)/c_n - R_n(lambda(x))|"
                + ("" if pair is p else " on the dual parameter set"))
            if cmp.skipped:
                rep.parameters["clustered_columns"] = cmp.skipped
            if pair is p:
                P = cmp.normalized
            else:
                P = cmp.normalized.T
        except ParameterError as exc:
            rep.adopted_conventions["overlap"] = f"skipped: representation invalid ({exc.invariant})"
    rows = []
    for n in range(p.N + 1):
        for x in range(p.N + 1):
            pv = float(P[n, x])
            rows.append((n, x, "" if np.isnan(pv) else pv, float(R[n, x]),
                         "" if np.isnan(pv) else abs(pv - float(R[n, x]))))
    return rep, (header, rows)


# --- couple -------------------------------------------------------------------

def cmd_couple(args):
    block = su11_coupling.WeightBlock((args.nu1, args.nu2, args.nu3), args.quanta)
    N = block.quanta
    if args.block is not None and not 0 <= args.block <= N:
        raise ParameterError("0 <= j <= N", f"block index j={args.block} outside 0..{N}")
    closure = _tol(args, CLOSURE_TOL)
    rep = Report("couple", {"nu1": args.nu1, "nu2": args.nu2, "nu3": args.nu3, "quanta": N})
    if args.block is not None:
        rep.parameters["block"] = args.block
    rep.adopted_conventions["triple_symmetrizer"] = su11_coupling.ADOPTED_TRIPLE_CONVENTION
    rep.adopted_conventions["block_label"] = "j selects nu4 = nu1 + nu2 + nu3 + N - j, dimension N - j + 1"
    rep.adopted_conventions["coupled_basis"] = "increasing nu12, kappa2 off-diagonal positive"

    rep.add("casimir_sum_identity", su11_coupling.casimir_sum_residual(block), closure)
    values = np.linalg.eigvalsh(su11_coupling.full_casimir(block))
    scale = max(1.0, np.abs(values).max())
    rows = []
    for j, nu4, lam4, mult in su11_coupling.expected_casimir_spectrum(block):
        hit = values[np.abs(values - lam4) <= 1e-8 * scale]
        err = float(np.abs(hit - lam4).max() / scale) if hit.size else float("inf")
        rep.add(f"c4_eigenvalue_j{j}", err, _tol(args, 1e-8))
        rep.add(f"c4_multiplicity_j{j}", abs(hit.size - mult), 0.0)
        rows.append((j, nu4, lam4, mult, int(hit.size)))

    blocks = range(N + 1) if args.block is None else [args.block]
    for j in blocks:
        cb = su11_coupling.couple(block, j)
        rep.add(f"racah_relations_j{j}", su11_coupling.verify_racah_relations(cb).max(), closure)
        try:
            cmp = su11_coupling.compare_coupled_overlaps(cb)
        except ParameterError as exc:
            rep.adopted_conventions[f"overlap_j{j}"] = f"skipped: {exc.invariant}"
            continue
        rep.add(f"coupled_representation_j{j}", cmp.representation_residual, closure)
        rep.add(f"racah_coefficients_j{j}", cmp.comparison.residual, _tol(args, OVERLAP_TOL))

    ops = su11_coupling.si_model_operators(block)
    kmp = su11_coupling.verify_kmp_relations(ops)
    kmp_tol = _tol(args, KMP_TOL)
    rep.add("kmp_commutator_L1", kmp.commutator_1, kmp_tol)
    rep.add("kmp_commutator_L2", kmp.commutator_2, kmp_tol)
    rep.add("kmp_commutator_L3", kmp.commutator_3, kmp_tol)
    rep.add("kmp_r_squared", kmp.r_squared, kmp_tol)
    rep.add("hamiltonian_constructions", kmp.hamiltonian_match, _tol(args, HAMILTONIAN_TOL))
    rep.add("hamiltonian_commutes", kmp.hamiltonian_commutes, _tol(args, HAMILTONIAN_TOL))
    rep.add("s_operator_interior", su11_coupling.s_operator_residual(block.nu, N), closure)
    return rep, (["j", "nu4", "eigenvalue", "multiplicity", "computed_multiplicity"], rows)


# --- oscillator ---------------------------------------------------------------

def cmd_oscillator(args):
    spec = oscillator.OscillatorSpec(args.k1, args.k2, args.level)
    tol = _tol(args, CLOSURE_TOL / 10)
    rep = Report("oscillator", {"k1": args.k1, "k2": args.k2, "level": spec.N})
    rep.adopted_conventions["hamiltonian"] = "H = 2(J0(1) + J0(2)), scalar on the level"
    res = oscillator.verify_oscillator_algebra(spec)
    rep.add("d_cplus", res.d_cplus, tol)
    rep.add("d_cminus", res.d_cminus, tol)
    rep.add("cubic_relation", res.cubic, tol)
    rep.add("h_commutes", res.h_commutes, tol)
    hahn = oscillator.hahn_operators(spec).residuals
    rep.add("hahn_k3_identity", hahn.k3_identity, tol)
    rep.add("hahn_k2k3", hahn.k2k3, tol)
    rep.add("hahn_k3k1", hahn.k3k1, tol)
    if spec.k1 == spec.k2:
        rep.add("alpha2_identically_zero", abs(spec.alpha2), 0.0)
        rep.adopted_conventions["alpha2"] = "identically zero"
    _, D, Cp, Cm = oscillator.oscillator_block(spec)
    rows = [(n, float(D[n, n]), float(Cp[n + 1, n]) if n < spec.N else 0.0) for n in range(spec.N + 1)]
    return rep, (["n1", "D", "Cplus_sub"], rows)


COMMANDS = {
    "verify-rep": cmd_verify_rep,
    "overlap": cmd_overlap,
    "couple": cmd_couple,
    "oscillator": cmd_oscillator,
}


def build_parser():
    parser = _Parser(prog="racahkit", description="Verification suites for Racah algebra representations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, csv=True):
        p.add_argument("--json", nargs="?", const="-", metavar="PATH",
                       help="write the JSON report to PATH (stdout when PATH is omitted)")
        if csv:
            p.add_argument("--csv", metavar="PATH", help="write the CSV table to PATH")
        p.add_argument("--tol", type=float, help="override every check tolerance")

    p = sub.add_parser("verify-rep", help="build and verify a finite-dimensional representation")
    p.add_argument("--dim", type=int, required=True, help="matrix dimension N+1")
    for name in ("rho", "d", "e1", "e2", "q"):
        p.add_argument(f"--{name}", type=float, required=True)
    common(p)

    p = sub.add_parser("overlap", help="Racah polynomials, realizations and overlaps")
    for name in ("alpha", "beta", "gamma", "delta"):
        p.add_argument(f"--{name}", type=float, required=True)
    p.add_argument("--N", type=int, required=True)
    common(p)

    p = sub.add_parser("couple", help="triple su(1,1) coupling and the 2-sphere model")
    for name in ("nu1", "nu2", "nu3"):
        p.add_argument(f"--{name}", type=float, required=True)
    p.add_argument("--quanta", type=int, required=True)
    p.add_argument("--block", type=int)
    common(p)

    p = sub.add_parser("oscillator", help="2D singular oscillator and its Hahn presentation")
    p.add_argument("--k1", type=float, required=True)
    p.add_argument("--k2", type=float, required=True)
    p.add_argument("--level", type=int, required=True)
    common(p)
    return parser


def _write(path, text, stdout):
    if path == "-":
        stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def main(argv=None, stdout=None, stderr=None):
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    start = time.perf_counter()
    try:
        report, (header, rows) = COMMANDS[args.command](args)
    except (RacahkitError, ValueError) as exc:
        name = getattr(exc, "invariant", None)
        print(f"invalid input ({name}): {exc}" if name else f"invalid input: {exc}", file=stderr)
        return EXIT_DOMAIN
    report.wall_time_ms = int(round((time.perf_counter() - start) * 1000))
    if args.json:
        _write(args.json, report.to_json(), stdout)
    if args.json != "-":
        print(report.table(), file=stdout)
    if getattr(args, "csv", None):
        _write(args.csv, write_csv(header, rows), stdout)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
