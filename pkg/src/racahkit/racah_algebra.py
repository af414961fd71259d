"""The Racah algebra: presentations, finite-dimensional representations,
overlaps with Racah polynomials, and realizations by the polynomials' operators.

Canonical relations, with ``K3 = [K1, K2]``::

    [K2, K3] = K2^2 + {K1, K2} + d K2 + e1
    [K3, K1] = K1^2 + {K1, K2} + d K1 + e2

The generic presentation has seven constants ``(a1, a2, c1, c2, d, e1, e2)``
and reduces to the canonical one by affine maps ``K_i -> u_i K_i + v_i``
whenever ``a1 * a2 != 0``.
"""
import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import hypergeo
from .exceptions import ParameterError
from .hypergeo import RacahParameters
from .linalg import (
    TridiagonalOperator,
    anticommutator,
    as_operator,
    clusters,
    commutator,
    inf_norm,
    residual,
    sym_tridiag_eigen,
)

ZERO_TOL = 1e-12
TRUNCATION_TOL = 1e-9
ROOT_TOL = 1e-8
OVERLAP_TOL = 1e-12


@dataclass(frozen=True)
class GenericConstants:
    a1: float
    a2: float
    c1: float
    c2: float
    d: float
    e1: float
    e2: float

    def as_array(self):
        return np.array([self.a1, self.a2, self.c1, self.c2, self.d, self.e1, self.e2])

    @property
    def canonicalizable(self):
        return self.a1 * self.a2 != 0


@dataclass(frozen=True)
class CanonicalConstants:
    d: float
    e1: float
    e2: float

    def swapped(self):
        """Constants of the pair ``(K2, K1)``."""
        return CanonicalConstants(self.d, self.e2, self.e1)

    def as_generic(self):
        return GenericConstants(1.0, 1.0, 0.0, 0.0, self.d, self.e1, self.e2)


@dataclass(frozen=True)
class AffineMap:
    """``K1' = u1 K1 + v1``, ``K2' = u2 K2 + v2``, ``K3' = u3 K3`` with ``u3 = u1 u2``."""

    u1: float
    v1: float
    u2: float
    v2: float

    @property
    def u3(self):
        return self.u1 * self.u2

    def apply(self, K1, K2):
        K1 = as_operator(K1, "K1")
        K2 = as_operator(K2, "K2")
        eye = np.eye(K1.shape[0])
        K1p = self.u1 * K1 + self.v1 * eye
        K2p = self.u2 * K2 + self.v2 * eye
        return RepresentationMatrices(K1p, K2p, commutator(K1p, K2p))


def canonicalize(g):
    """Reduce generic constants to canonical form.

    Returns ``(CanonicalConstants, AffineMap)``; the map sends operators
    satisfying the generic relations to ones satisfying the canonical ones.
    """
    if not g.canonicalizable:
        raise ParameterError("a1*a2 != 0",
                             "a1*a2 = 0: the algebra degenerates (Hahn type) and has no canonical form")
    a1, a2, c1, c2, d, e1, e2 = g.as_array()
    affine = AffineMap(u1=1 / a2, v1=c2 / (2 * a2 ** 2), u2=1 / a1, v2=c1 / (2 * a1 ** 2))
    d_new = d / (a1 * a2) - c1 / a1 ** 2 - c2 / a2 ** 2
    e1_new = (4 * a1 ** 2 * e1 - 2 * a1 * c1 * d + a2 * c1 ** 2) / (4 * a1 ** 4 * a2)
    e2_new = (4 * a2 ** 2 * e2 - 2 * a2 * c2 * d + a1 * c2 ** 2) / (4 * a2 ** 4 * a1)
    return CanonicalConstants(d_new, e1_new, e2_new), affine


class RepresentationMatrices(NamedTuple):
    K1: np.ndarray
    K2: np.ndarray
    K3: np.ndarray


class RelationResiduals(NamedTuple):
    """Scale-free residuals of the three defining relations."""

    k1k2: float
    k2k3: float
    k3k1: float

    def max(self):
        return max(self)


def _operators(m):
    K1 = as_operator(m.K1, "K1")
    K2 = as_operator(m.K2, "K2")
    K3 = as_operator(m.K3, "K3")
    if not K1.shape == K2.shape == K3.shape:
        raise ParameterError("consistent dims", "K1, K2, K3 must have the same shape")
    return K1, K2, K3


def casimir(m, c):
    """The cubic Casimir element ``Q`` of the canonical algebra."""
    K1, K2, K3 = _operators(m)
    K1sq = K1 @ K1
    K2sq = K2 @ K2
    return (anticommutator(K1sq, K2) + anticommutator(K1, K2sq) + K1sq + K2sq + K3 @ K3
            + (c.d + 1) * anticommutator(K1, K2)
            + (2 * c.e1 + c.d) * K1 + (2 * c.e2 + c.d) * K2)


def casimir_defect(m, c, q):
    """``||Q - q I|| / ||Q||``."""
    Q = casimir(m, c)
    scale = max(inf_norm(Q), np.finfo(float).tiny)
    return inf_norm(Q - q * np.eye(Q.shape[0])) / scale


def verify_canonical_relations(m, c):
    K1, K2, K3 = _operators(m)
    eye = np.eye(K1.shape[0])
    return RelationResiduals(
        residual(commutator(K1, K2), K3),
        residual(commutator(K2, K3), K2 @ K2 + anticommutator(K1, K2) + c.d * K2 + c.e1 * eye),
        residual(commutator(K3, K1), K1 @ K1 + anticommutator(K1, K2) + c.d * K1 + c.e2 * eye),
    )


def verify_generic_relations(K1, K2, g):
    K1 = as_operator(K1, "K1")
    K2 = as_operator(K2, "K2")
    K3 = commutator(K1, K2)
    eye = np.eye(K1.shape[0])
    ac = anticommutator(K1, K2)
    return RelationResiduals(
        0.0,
        residual(commutator(K2, K3), g.a2 * K2 @ K2 + g.a1 * ac + g.c1 * K1 + g.d * K2 + g.e1 * eye),
        residual(commutator(K3, K1), g.a1 * K1 @ K1 + g.a2 * ac + g.c2 * K2 + g.d * K1 + g.e2 * eye),
    )


# --- quartic ---------------------------------------------------------------

@dataclass(frozen=True)
class QuarticData:
    """Monic quartic whose roots ``xi_k^2`` control the off-diagonal of ``K2``."""

    coefficients: np.ndarray
    roots: np.ndarray
    magnitudes: np.ndarray | None = None

    def __call__(self, z):
        return np.polyval(self.coefficients, z)

    def term_scale(self, z):
        """Sum of absolute monomials at ``z``, the natural scale for ``P(z)``.

        Each coefficient counts with the absolute sum of the terms it was
        assembled from, so cancellation inside a coefficient (for instance
        ``d^2 + 4q``) does not shrink the scale below its rounding error.
        """
        weights = np.abs(self.coefficients) if self.magnitudes is None else self.magnitudes
        powers = np.abs(z) ** np.arange(4, -1, -1)
        return float(np.sum(weights * powers))

    def relative_value(self, z):
        return abs(self(z)) / max(self.term_scale(z), np.finfo(float).tiny)

    @property
    def xi_sq(self):
        """Roots in ``z``; real ones returned as floats when all are real."""
        if np.all(np.abs(self.roots.imag) <= 1e-12 * max(1.0, np.abs(self.roots).max())):
            return np.sort(self.roots.real)
        return self.roots

    def reconstruction_residual(self):
        rebuilt = np.real_if_close(np.poly(self.roots))
        scale = max(1.0, np.abs(self.coefficients).max())
        return float(np.abs(rebuilt - self.coefficients).max() / scale)


def quartic(c, q):
    d, e1, e2 = c.d, c.e1, c.e2
    coefficients = np.array([
        1.0,
        -(4 * d + 2),
        4 * d * d + 4 * d + 1 + 8 * e2 - 16 * e1,
        -4 * (d * d + 2 * e2 + 4 * d * e2 + 4 * q),
        16 * e2 * e2,
    ])
    d, e1, e2, q = abs(d), abs(e1), abs(e2), abs(q)
    magnitudes = np.array([
        1.0,
        4 * d + 2,
        4 * d * d + 4 * d + 1 + 8 * e2 + 16 * e1,
        4 * (d * d + 2 * e2 + 4 * d * e2 + 4 * q),
        16 * e2 * e2,
    ])
    companion = np.zeros((4, 4))
    companion[0, :] = -coefficients[1:]
    companion[1:, :3] = np.eye(3)
    roots = np.linalg.eigvals(companion)
    return QuarticData(coefficients, np.sort_complex(roots), magnitudes)


# --- representations --------------------------------------------------------

@dataclass(frozen=True)
class RepresentationSpec:
    """Data of an ``(N+1)``-dimensional representation with ``K1`` diagonal.

    Construction validates every invariant needed by
    :func:`build_representation`; the violated one is named in the raised
    :class:`ParameterError`.
    """

    N: int
    rho: float
    q: float
    constants: CanonicalConstants

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 0:
            raise ParameterError("N nonnegative integer")
        object.__setattr__(self, "N", int(self.N))
        for name in ("rho", "q"):
            if not np.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} finite")
        self.validate()

    @property
    def dim(self):
        return self.N + 1

    def validate(self):
        for n in range(self.N + 1):
            lam, _ = spectrum(self, n)
            if abs(lam) < ZERO_TOL:
                raise ParameterError("V_n denominator", f"lambda_{n} = 0 (V_n denominator vanishes)")
        for n in range(1, self.N + 1):
            if abs(self.rho - n) < ZERO_TOL:
                raise ParameterError("U_n denominator", f"g_{n} = 0 (U_n^2 denominator vanishes)")
        for n in range(self.N + 1):
            if abs(self.rho - n - 0.5) < ZERO_TOL:
                raise ParameterError("U_n denominator", f"g_{n + 1/2} = 0 (U_n^2 denominator vanishes)")
        P = quartic(self.constants, self.q)
        for label, z in (("U_0", self.rho ** 2), ("U_{N+1}", (self.rho - self.N - 1) ** 2)):
            if P.relative_value(z) > TRUNCATION_TOL:
                raise ParameterError("truncation",
                                     f"{label}^2 does not vanish: P(g^2) relative value "
                                     f"{P.relative_value(z):.3e}")
        for n in range(1, self.N + 1):
            u2 = offdiag_sq(self, n)
            if not u2 > 0:
                raise ParameterError("unitarity", f"U_{n}^2 = {u2:.6g} is not positive")


def spectrum(spec, n):
    """``(lambda_n, g_n)`` for the diagonal generator."""
    rho = spec.rho
    return (rho - n) * (n - rho + 1) / 2, rho - n


def offdiag_sq(spec, n):
    """``U_n^2 = P(g_n^2) / (64 g_n^2 g_{n-1/2} g_{n+1/2})``.

    Defined for ``0 <= n <= N+1``; the end points vanish on a valid spec.
    """
    if not 0 <= n <= spec.N + 1:
        raise ParameterError("U_n index", f"n={n} outside 0..N+1")
    g = spec.rho - n
    den = 64 * g * g * (g + 0.5) * (g - 0.5)
    if abs(den) < ZERO_TOL:
        raise ParameterError("U_n denominator", f"U_{n}^2 denominator vanishes")
    return float(quartic(spec.constants, spec.q)(g * g) / den)


def diagonal_entry(spec, n):
    """``V_n = -(lambda_n^2 + d lambda_n + e2) / (2 lambda_n)``."""
    lam, _ = spectrum(spec, n)
    c = spec.constants
    return -(lam * lam + c.d * lam + c.e2) / (2 * lam)


def recurrence_defect(spec, n):
    """``2(g_{n+3/2} U_{n+1}^2 - g_{n-1/2} U_n^2) - (V_n^2 + (2 lambda_n + d) V_n + e1)``,
    scaled by its largest term."""
    lam, _ = spectrum(spec, n)
    V = diagonal_entry(spec, n)
    c = spec.constants
    t1 = 2 * (spec.rho - n - 1.5) * offdiag_sq(spec, n + 1)
    t2 = 2 * (spec.rho - n + 0.5) * offdiag_sq(spec, n)
    rhs = (V * V, (2 * lam + c.d) * V, c.e1)
    scale = max(1.0, abs(t1), abs(t2), *map(abs, rhs))
    return abs(t1 - t2 - sum(rhs)) / scale


def ladder_defect(spec):
    """Largest ``|(l_{n+1} - l_n)^2 + (l_{n+1} + l_n)|`` over consecutive eigenvalues."""
    lams = [spectrum(spec, n)[0] for n in range(spec.N + 1)]
    worst = 0.0
    for a, b in zip(lams, lams[1:]):
        worst = max(worst, abs((b - a) ** 2 + (b + a)) / max(1.0, abs(a), abs(b)))
    return worst


def build_representation(spec):
    """Matrices of ``K1`` (diagonal), ``K2`` (tridiagonal), ``K3 = [K1, K2]``."""
    spec.validate()
    lams = np.array([spectrum(spec, n)[0] for n in range(spec.N + 1)])
    V = np.array([diagonal_entry(spec, n) for n in range(spec.N + 1)])
    U = np.sqrt([offdiag_sq(spec, n) for n in range(1, spec.N + 1)])
    K1 = np.diag(lams)
    K2 = TridiagonalOperator(V, U).densify()
    return RepresentationMatrices(K1, K2, commutator(K1, K2))


def spec_from_racah_params(alpha, beta, delta, N):
    """Representation whose overlaps are the Racah polynomials with
    ``gamma = -N-1`` and the given ``alpha, beta, delta``.

    Inverts the root parametrization: the quartic is ``prod (z - xi_k^2)`` and
    ``e2 = xi_1 xi_2 xi_3 xi_4 / 4``.
    """
    gamma = -N - 1.0
    xi = np.array([-(alpha + beta) / 2, (beta - alpha) / 2 + delta, (beta - alpha) / 2,
                   gamma - (alpha + beta) / 2])
    sq = xi ** 2
    s1 = sq.sum()
    s2 = sum(sq[i] * sq[j] for i, j in itertools.combinations(range(4), 2))
    s3 = sum(sq[i] * sq[j] * sq[k] for i, j, k in itertools.combinations(range(4), 3))
    d = (s1 - 2) / 4
    e2 = float(np.prod(xi)) / 4
    e1 = (4 * d * d + 4 * d + 1 + 8 * e2 - s2) / 16
    q = (s3 / 4 - d * d - 2 * e2 - 4 * d * e2) / 4
    return RepresentationSpec(N, float(xi[0]), q, CanonicalConstants(d, e1, e2))


def random_unitary_spec(rng, N, max_tries=1000):
    """Sample a valid spec from ``alpha, beta in (-0.9, 4)`` and ``beta + delta < -N - 1``.

    In that region every ``A_n C_{n+1}``, hence every ``U_n^2``, is positive.
    """
    for _ in range(max_tries):
        alpha, beta = rng.uniform(-0.9, 4.0, size=2)
        delta = -N - beta - rng.uniform(1.1, 4.0)
        try:
            return spec_from_racah_params(alpha, beta, delta, N)
        except ParameterError:
            continue
    raise RuntimeError(f"no unitary spec found for N={N} in {max_tries} draws")


# --- overlaps ---------------------------------------------------------------

class Overlaps(NamedTuple):
    W: np.ndarray
    mu: np.ndarray
    P: np.ndarray
    clusters: list


BAND_RTOL = 1e-10


def _band(K2):
    return TridiagonalOperator.from_dense(K2, atol=BAND_RTOL * max(1.0, inf_norm(K2)))


def overlaps(m):
    """Expansion of the ``K2`` eigenbasis in the ``K1`` eigenbasis.

    ``W[:, s]`` is the eigenvector of ``K2`` for ``mu[s]`` (ascending), and
    ``P[n, s] = W[n, s] / W[0, s]`` so that ``P[0] == 1``.
    """
    K2 = as_operator(m.K2, "K2")
    eig = sym_tridiag_eigen(_band(K2))
    W = eig.vectors
    w0 = W[0]
    if np.any(np.abs(w0) < OVERLAP_TOL):
        bad = np.flatnonzero(np.abs(w0) < OVERLAP_TOL).tolist()
        raise ParameterError("w0(s) nonzero", f"W[0][s] vanishes for s in {bad}")
    groups = [g for g in clusters(eig.values, inf_norm(K2)) if len(g) > 1]
    return Overlaps(W, eig.values, W / w0, groups)


def overlap_recurrence_residual(m, ov):
    """Defect of ``mu P_n = U_{n+1} P_{n+1} + V_n P_n + U_n P_{n-1}``, column-scaled."""
    K2 = as_operator(m.K2, "K2")
    lhs = ov.P * ov.mu
    rhs = K2 @ ov.P
    scale = np.maximum(1.0, np.maximum(np.abs(lhs).max(axis=0), np.abs(rhs).max(axis=0)))
    return float((np.abs(lhs - rhs).max(axis=0) / scale).max())


def roots_to_racah_params(xi, N):
    """Solve ``xi1 = -(a+b)/2``, ``xi2 = (b-a)/2 + d``, ``xi3 = (b-a)/2``,
    ``xi4 = g - (a+b)/2`` for ``(alpha, beta, gamma, delta)``.

    ``gamma`` must come out as ``-N-1`` (to ``ROOT_TOL``); it is snapped to the
    exact value.
    """
    xi1, xi2, xi3, xi4 = (float(v) for v in xi)
    alpha = -xi1 - xi3
    beta = xi3 - xi1
    delta = xi2 - xi3
    gamma = xi4 - xi1
    if abs(gamma + N + 1) > ROOT_TOL * max(1.0, abs(xi1), abs(xi4)):
        raise ParameterError("truncation", f"roots give gamma={gamma}, expected {-N - 1}")
    return RacahParameters(alpha, beta, -N - 1.0, delta, N, "gamma")


def _deflated_roots(P, z1, z4):
    quotient, _ = np.polydiv(P.coefficients, np.poly([z1, z4]))
    roots = np.roots(quotient)
    if np.any(np.abs(roots.imag) > 1e-9 * max(1.0, np.abs(roots).max())):
        raise ParameterError("real roots", "remaining roots xi_2^2, xi_3^2 are not real")
    return np.sort(roots.real)


def candidate_root_assignments(spec):
    """Signed root assignments with ``xi1 = rho`` and ``xi4 = rho - N - 1``.

    The quartic's own roots fix ``xi2^2`` and ``xi3^2`` (after deflating the two
    known ones); signs and order are enumerated deterministically and filtered
    by ``xi1 xi2 xi3 xi4 = 4 e2``.
    """
    P = quartic(spec.constants, spec.q)
    z1 = spec.rho ** 2
    z4 = (spec.rho - spec.N - 1) ** 2
    zs = _deflated_roots(P, z1, z4)
    r = np.sqrt(np.maximum(zs, 0.0))
    xi1, xi4 = spec.rho, spec.rho - spec.N - 1
    e2 = spec.constants.e2
    out = []
    for (i, j), s2, s3 in itertools.product(((0, 1), (1, 0)), (1, -1), (1, -1)):
        xi = (xi1, s2 * r[i], s3 * r[j], xi4)
        scale = max(1.0, abs(np.prod(xi)), abs(4 * e2))
        if abs(np.prod(xi) - 4 * e2) <= 1e-8 * scale:
            out.append(xi)
    return out


def _recurrence_match(spec, p):
    """Spread of ``V_n - (A_n + C_n)/2`` plus the ``U_{n+1}^2 - A_n C_{n+1}/4`` defect."""
    coeffs = [hypergeo.recurrence_coeffs(n, p) for n in range(spec.N + 1)]
    shift = np.array([diagonal_entry(spec, n) - 0.5 * (A + C) for n, (A, C) in enumerate(coeffs)])
    scale = max(1.0, np.abs([diagonal_entry(spec, n) for n in range(spec.N + 1)]).max())
    worst = float(np.ptp(shift)) / scale
    for n in range(spec.N):
        u2 = offdiag_sq(spec, n + 1)
        target = 0.25 * coeffs[n][0] * coeffs[n + 1][1]
        worst = max(worst, abs(u2 - target) / max(1.0, abs(u2)))
    return worst


def identify_racah_params(spec, tol=1e-8):
    """Racah parameters whose recurrence reproduces the representation.

    The first root assignment (see :func:`candidate_root_assignments`) whose
    polynomial recurrence matches ``V_n`` and ``U_n^2`` within ``tol`` wins.
    """
    best = None
    for xi in candidate_root_assignments(spec):
        try:
            p = roots_to_racah_params(xi, spec.N)
        except ParameterError:
            continue
        defect = _recurrence_match(spec, p)
        if defect <= tol:
            return p
        if best is None or defect < best[0]:
            best = (defect, p)
    detail = f"best recurrence defect {best[0]:.3e}" if best else "no admissible root assignment"
    raise ParameterError("root identification", detail)


class OverlapComparison(NamedTuple):
    residual: float
    spectrum_residual: float
    recurrence_residual: float
    params: RacahParameters
    skipped: list
    max_abs: float
    normalized: np.ndarray
    polynomials: np.ndarray


def polynomial_normalization(spec, p):
    """``c_n`` with ``P_n = c_n R_n``: ``c_0 = 1``, ``c_{n+1} = -A_n c_n / (2 U_{n+1})``."""
    c = np.ones(spec.N + 1)
    for n in range(spec.N):
        A, _ = hypergeo.recurrence_coeffs(n, p)
        c[n + 1] = -A * c[n] / (2 * np.sqrt(offdiag_sq(spec, n + 1)))
    return c


def compare_overlaps_with_racah(spec, m=None, p=None):
    """Compare normalised overlaps with ``R_n(lambda(x))``.

    The ``K2`` eigenvalue paired with grid point ``x`` is
    ``mu(x) = (nu - x)(x - nu + 1)/2`` with ``nu = -(gamma + delta)/2``, read
    off the computed spectrum by nearest match.  Columns inside numerically
    degenerate eigenvalue clusters are skipped and listed.

    ``residual`` is ``max |P_n(mu_s) - R_n(lambda(s))|`` with row ``n`` divided
    by ``max(1, max_s |R_n|)``; ``max_abs`` is the unscaled maximum.
    """
    m = build_representation(spec) if m is None else m
    p = identify_racah_params(spec) if p is None else p
    ov = overlaps(m)
    nu = -(p.gamma + p.delta) / 2
    xs = np.arange(spec.N + 1)
    mu_pred = (nu - xs) * (xs - nu + 1) / 2
    scale = max(1.0, np.abs(ov.mu).max())
    cols = [int(np.argmin(np.abs(ov.mu - mu))) for mu in mu_pred]
    spectrum_res = float(np.abs(ov.mu[cols] - mu_pred).max() / scale)
    if len(set(cols)) != len(cols):
        spectrum_res = max(spectrum_res, 1.0)
    clustered = {s for g in ov.clusters for s in g}
    keep = [x for x in xs if cols[x] not in clustered]
    skipped = [int(x) for x in xs if cols[x] in clustered]
    c = polynomial_normalization(spec, p)
    P_norm = ov.P[:, cols] / c[:, None]
    R = hypergeo.racah_matrix(p)
    diff = np.abs(P_norm[:, keep] - R[:, keep])
    row_scale = np.maximum(1.0, np.abs(R).max(axis=1, keepdims=True))
    res = float((diff / row_scale).max()) if keep else 0.0
    max_abs = float(diff.max()) if keep else 0.0
    return OverlapComparison(res, spectrum_res, overlap_recurrence_residual(m, ov), p, skipped,
                             max_abs, P_norm, R)


def leonard_pair_defect(m):
    """Largest entry of ``K1`` beyond the first off-diagonal in the ``K2`` eigenbasis,
    relative to ``||K1||``."""
    K1 = as_operator(m.K1, "K1")
    ov = sym_tridiag_eigen(_band(as_operator(m.K2, "K2")))
    T = ov.vectors.T @ K1 @ ov.vectors
    band = np.triu(np.tril(T, 1), -1)
    return float(np.abs(T - band).max() / max(inf_norm(K1), np.finfo(float).tiny))


# --- structure constants from operators --------------------------------------

class StructureFit(NamedTuple):
    constants: GenericConstants
    residual: float
    rank: int
    rank_deficient: bool


def extract_structure_constants(K1, K2):
    """Least-squares fit of the seven generic constants to a pair of operators.

    Every matrix entry of the two non-trivial relations is one linear equation
    in ``(a1, a2, c1, c2, d, e1, e2)``; columns are equilibrated before the
    solve.  ``residual`` is the larger scale-free residual of the two relations
    under the fitted constants.
    """
    K1 = as_operator(K1, "K1")
    K2 = as_operator(K2, "K2")
    if K1.shape != K2.shape:
        raise ParameterError("consistent dims", "K1 and K2 must have the same shape")
    K3 = commutator(K1, K2)
    eye = np.eye(K1.shape[0])
    zero = np.zeros_like(K1)
    ac = anticommutator(K1, K2)
    first = [ac, K2 @ K2, K1, zero, K2, eye, zero]
    second = [K1 @ K1, ac, zero, K2, K1, zero, eye]
    M = np.column_stack([np.concatenate([f.ravel(), s.ravel()]) for f, s in zip(first, second)])
    rhs = np.concatenate([commutator(K2, K3).ravel(), commutator(K3, K1).ravel()])
    norms = np.linalg.norm(M, axis=0)
    norms[norms == 0] = 1.0
    sol, _, rank, sv = np.linalg.lstsq(M / norms, rhs, rcond=None)
    sol = sol / norms
    g = GenericConstants(*map(float, sol))
    return StructureFit(g, verify_generic_relations(K1, K2, g).max(), int(rank), int(rank) < 7)


def closed_form_constants(p):
    """``(d, e1, e2)`` of the grid realization, in terms of ``(alpha..delta)``."""
    a, b, g, dl = p.alpha, p.beta, p.gamma, p.delta
    e1 = 0.25 * ((a - b) / 2) * ((a + b) / 2) * ((a + b) / 2 - g) * ((a - b) / 2 - dl)
    e2 = 0.25 * ((g - dl) / 2) * ((g + dl) / 2) * ((g + dl) / 2 - a) * ((g - dl) / 2 - b)
    d = 0.25 * (((g - dl) / 2) ** 2 + ((g + dl) / 2) ** 2 + ((g + dl) / 2 - a) ** 2
                + ((g - dl) / 2 - b) ** 2 - 2)
    return CanonicalConstants(d, e1, e2)


class Realization(NamedTuple):
    K1: np.ndarray
    K2: np.ndarray
    fit: StructureFit
    constants: CanonicalConstants
    affine: AffineMap
    canonical: RepresentationMatrices
    residuals: RelationResiduals


def _realize(K1, K2):
    fit = extract_structure_constants(K1, K2)
    constants, affine = canonicalize(fit.constants)
    canonical = affine.apply(K1, K2)
    return Realization(K1, K2, fit, constants, affine, canonical,
                       verify_canonical_relations(canonical, constants))


def grid_realization(p):
    """``K1 = diag(lambda(x))`` and ``K2`` = difference operator on ``x = 0..N``,
    brought to canonical form."""
    K1 = np.diag([hypergeo.lattice(x, p) for x in range(p.N + 1)])
    return _realize(K1, hypergeo.difference_operator(p))


def dual_grid_realization(p):
    """``K1`` = recurrence operator and ``K2 = diag(n(n+alpha+beta+1))`` on ``n = 0..N``."""
    K2 = np.diag([hypergeo.dual_lattice(n, p) for n in range(p.N + 1)])
    return _realize(hypergeo.recurrence_operator(p), K2)


def constants_match(a, b):
    """Largest relative difference between two sets of canonical constants."""
    return max(abs(x - y) / max(1.0, abs(y)) for x, y in ((a.d, b.d), (a.e1, b.e1), (a.e2, b.e2)))
