"""Triple tensor products of su(1,1) positive discrete series representations.

On a block of fixed total weight the intermediate Casimirs ``C(ij)`` and the
total Casimir ``C4`` are finite symmetric matrices.  Restricting two
intermediate Casimirs to an eigenspace of ``C4`` gives a representation of the
Racah algebra; the same Casimirs, shifted, are the constants of motion of the
generic superintegrable model on the 2-sphere.
"""
import itertools
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import racah_algebra
from .exceptions import ParameterError
from .linalg import anticommutator, commutator, inf_norm, residual, sym_eigen
from .racah_algebra import CanonicalConstants, RepresentationMatrices

EIGENSPACE_RTOL = 1e-8
PAIRS = ((1, 2), (2, 3), (3, 1))


@dataclass(frozen=True)
class DiscreteSeriesRep:
    """Lowest-weight representation with ``J0 |0> = nu |0>``."""

    nu: float

    def __post_init__(self):
        if not (np.isfinite(self.nu) and self.nu > 0):
            raise ParameterError("nu > 0", f"lowest weight must be positive, got {self.nu}")

    @property
    def casimir_value(self):
        return self.nu * (self.nu - 1)

    @property
    def k(self):
        return 2 * self.nu - 1

    @property
    def a(self):
        return self.k ** 2 - 0.25


def ladder_elements(rep, n):
    """``(J0, J+ amplitude, J- amplitude)`` on the basis vector ``|n>``."""
    if int(n) != n or n < 0:
        raise ParameterError("n >= 0", f"basis index must be a nonnegative integer, got {n}")
    nu = rep.nu
    return n + nu, float(np.sqrt((n + 1) * (n + 2 * nu))), float(np.sqrt(n * (n + 2 * nu - 1)))


@dataclass(frozen=True)
class WeightBlock:
    """States ``|n1, n2, n3>`` with ``n1 + n2 + n3 = N``, in lexicographic order."""

    nu: tuple
    quanta: int
    basis: tuple = field(init=False, repr=False, compare=False)
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        nu = tuple(float(v) for v in self.nu)
        if len(nu) != 3:
            raise ParameterError("three factors", f"need three lowest weights, got {len(nu)}")
        for v in nu:
            DiscreteSeriesRep(v)
        if int(self.quanta) != self.quanta or self.quanta < 0:
            raise ParameterError("N nonnegative integer", f"quanta must be >= 0, got {self.quanta}")
        N = int(self.quanta)
        basis = tuple(t for t in itertools.product(range(N + 1), repeat=3) if sum(t) == N)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "quanta", N)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "index", {t: i for i, t in enumerate(basis)})

    @property
    def dim(self):
        return len(self.basis)

    @property
    def reps(self):
        return tuple(DiscreteSeriesRep(v) for v in self.nu)

    @property
    def lambdas(self):
        return tuple(r.casimir_value for r in self.reps)

    def j0(self, i):
        """Diagonal ``J0`` of factor ``i`` (1-based)."""
        return np.diag([t[i - 1] + self.nu[i - 1] for t in self.basis])

    def hop(self, i, j):
        """``J+(i) J-(j)`` for ``i != j``: moves one quantum from factor ``j`` to ``i``."""
        if i == j:
            raise ValueError("hop needs two different factors")
        out = np.zeros((self.dim, self.dim))
        reps = self.reps
        for col, t in enumerate(self.basis):
            if t[j - 1] == 0:
                continue
            s = list(t)
            amp = ladder_elements(reps[j - 1], s[j - 1])[2]
            s[j - 1] -= 1
            amp *= ladder_elements(reps[i - 1], s[i - 1])[1]
            s[i - 1] += 1
            out[self.index[tuple(s)], col] = amp
        return out

    def number_term(self, i):
        """``J+(i) J-(i)``, diagonal with entries ``n (n + 2 nu - 1)``."""
        nu = self.nu[i - 1]
        return np.diag([t[i - 1] * (t[i - 1] + 2 * nu - 1) for t in self.basis])


def intermediate_casimir(block, pair):
    """``C(ij) = 2 J0(i) J0(j) - (J+(i) J-(j) + J-(i) J+(j)) + lambda_i + lambda_j``."""
    i, j = pair
    if (i, j) not in PAIRS and (j, i) not in PAIRS:
        raise ParameterError("pair", f"pair must be one of {PAIRS}, got {pair}")
    lam = block.lambdas
    return (2 * block.j0(i) @ block.j0(j) - (block.hop(i, j) + block.hop(j, i))
            + (lam[i - 1] + lam[j - 1]) * np.eye(block.dim))


def full_casimir(block):
    """``C4 = J0^2 - J+ J- - J0`` of the summed generators."""
    J0 = sum(block.j0(i) for i in (1, 2, 3))
    cross = sum(block.number_term(i) if i == j else block.hop(i, j)
                for i in (1, 2, 3) for j in (1, 2, 3))
    return J0 @ J0 - cross - J0


def casimir_sum_residual(block):
    """``C4`` against ``C(12) + C(23) + C(31) - lambda_1 - lambda_2 - lambda_3``."""
    combo = sum(intermediate_casimir(block, p) for p in PAIRS) - sum(block.lambdas) * np.eye(block.dim)
    return residual(full_casimir(block), combo)


def coupled_weight(block, j):
    """``nu4`` of block ``j``: ``nu1 + nu2 + nu3 + N - j``.

    Label ``j`` counts down from the top weight so that block ``j`` has
    dimension ``N - j + 1`` (the multiplicity of ``nu4`` is one more than its
    excess over ``nu1 + nu2 + nu3``).
    """
    return sum(block.nu) + block.quanta - j


def expected_casimir_spectrum(block):
    """``[(j, nu4, nu4 (nu4 - 1), multiplicity)]`` for ``j = 0..N``."""
    N = block.quanta
    out = []
    for j in range(N + 1):
        nu4 = coupled_weight(block, j)
        out.append((j, nu4, nu4 * (nu4 - 1), N - j + 1))
    return out


def casimir_spectrum_residual(block):
    """Sorted computed eigenvalues of ``C4`` against the predicted multiset, relative."""
    values = np.linalg.eigvalsh(full_casimir(block))
    expected = np.sort(np.concatenate([[v] * m for _, _, v, m in expected_casimir_spectrum(block)]))
    return float(np.abs(values - expected).max() / max(1.0, np.abs(expected).max()))


def racah_constants(lam):
    """``(d, e1, e2)`` of the coupled Racah algebra from ``(lambda_1, .., lambda_4)``."""
    l1, l2, l3, l4 = lam
    return CanonicalConstants(0.5 * (l1 + l2 + l3 + l4), 0.25 * (l1 - l4) * (l2 - l3),
                              0.25 * (l1 - l2) * (l4 - l3))


@dataclass(frozen=True)
class CoupledBlock:
    """Eigenspace of ``C4`` at ``nu4 = nu1 + nu2 + nu3 + N - j``, of dimension ``N - j + 1``.

    The basis diagonalizes ``kappa1`` in order of increasing intermediate weight
    ``nu12 = nu1 + nu2 + n`` (so ``kappa1`` decreases along the diagonal once
    ``nu12 > 1/2``); signs are chosen so that ``kappa2`` has positive
    off-diagonal entries.
    """

    parent: WeightBlock
    j: int
    kappa1: np.ndarray
    kappa2: np.ndarray
    lam: tuple
    basis: np.ndarray

    @property
    def dim(self):
        return self.kappa1.shape[0]

    @property
    def nu4(self):
        return coupled_weight(self.parent, self.j)

    @property
    def kappa3(self):
        return commutator(self.kappa1, self.kappa2)

    @property
    def constants(self):
        return racah_constants(self.lam)

    def matrices(self):
        return RepresentationMatrices(self.kappa1, self.kappa2, self.kappa3)


def couple(block, j):
    N = block.quanta
    if int(j) != j or not 0 <= j <= N:
        raise ParameterError("0 <= j <= N", f"block index j={j} outside 0..{N}")
    j = int(j)
    C4 = full_casimir(block)
    eig = sym_eigen(C4)
    nu4 = coupled_weight(block, j)
    lam4 = nu4 * (nu4 - 1)
    scale = max(1.0, inf_norm(C4))
    sel = np.flatnonzero(np.abs(eig.values - lam4) <= EIGENSPACE_RTOL * scale)
    if sel.size != N - j + 1:
        raise ParameterError("eigenspace dimension",
                             f"C4 eigenvalue {lam4:.12g} has multiplicity {sel.size}, expected {N - j + 1}")
    P = eig.vectors[:, sel]
    k1 = -P.T @ intermediate_casimir(block, (1, 2)) @ P / 2
    # order by increasing nu12, i.e. decreasing kappa1 = -nu12 (nu12 - 1)/2 for nu12 > 1/2
    w, V = np.linalg.eigh(0.5 * (k1 + k1.T))
    nu12 = 0.5 + np.sqrt(np.maximum(0.25 - 2 * w, 0.0))
    order = np.argsort(nu12, kind="stable")
    Q = P @ V[:, order]
    k2 = -Q.T @ intermediate_casimir(block, (2, 3)) @ Q / 2
    signs = np.ones(Q.shape[1])
    for n in range(1, Q.shape[1]):
        if signs[n - 1] * k2[n - 1, n] < 0:
            signs[n] = -1.0
    Q = Q * signs
    k1 = -Q.T @ intermediate_casimir(block, (1, 2)) @ Q / 2
    k2 = -Q.T @ intermediate_casimir(block, (2, 3)) @ Q / 2
    k1 = 0.5 * (k1 + k1.T)
    k2 = 0.5 * (k2 + k2.T)
    return CoupledBlock(block, j, k1, k2, tuple(block.lambdas) + (lam4,), Q)


def verify_racah_relations(cb):
    """Residuals of the canonical relations with the ``lambda``-built constants."""
    return racah_algebra.verify_canonical_relations(cb.matrices(), cb.constants)


def coupled_spec(cb):
    """The :class:`RepresentationSpec` matching a coupled block.

    ``rho = 1 - nu1 - nu2`` places the diagonal of ``kappa1`` on the spectrum
    ``lambda_n``; ``q`` is read off the (scalar) Casimir on the block.
    """
    c = cb.constants
    Q = racah_algebra.casimir(cb.matrices(), c)
    q = float(np.trace(Q) / cb.dim)
    return racah_algebra.RepresentationSpec(cb.dim - 1, 1 - cb.parent.nu[0] - cb.parent.nu[1], q, c)


class CoupledOverlapReport(NamedTuple):
    representation_residual: float
    comparison: racah_algebra.OverlapComparison


def compare_coupled_overlaps(cb):
    """Recoupling overlaps of a block against Racah polynomials.

    Raises :class:`ParameterError` when the block's data does not form a valid
    spec (for instance when some ``lambda_n`` vanishes).
    """
    spec = coupled_spec(cb)
    built = racah_algebra.build_representation(spec)
    rep_res = max(residual(built.K1, cb.kappa1), residual(built.K2, cb.kappa2))
    return CoupledOverlapReport(rep_res, racah_algebra.compare_overlaps_with_racah(spec, cb.matrices()))


# --- the superintegrable model on the 2-sphere --------------------------------

TRIPLE_CONVENTIONS = {
    "six_term_sum": 1.0,
    "six_term_mean": 1.0 / 6.0,
}
ADOPTED_TRIPLE_CONVENTION = "six_term_sum"


class SIModel(NamedTuple):
    L1: np.ndarray
    L2: np.ndarray
    L3: np.ndarray
    H: np.ndarray
    R: np.ndarray
    H_sum: np.ndarray
    a: tuple


def si_model_operators(block):
    """``L_i = 4 C(jk) + 1 - a_j - a_k``, ``H = 4 C4 + 3/4`` and ``R = [L1, L2]``.

    ``H_sum = L1 + L2 + L3 + a1 + a2 + a3`` is the second construction of the
    Hamiltonian, kept for comparison.
    """
    a = tuple(r.a for r in block.reps)
    eye = np.eye(block.dim)
    L1 = 4 * intermediate_casimir(block, (2, 3)) + (1 - a[1] - a[2]) * eye
    L2 = 4 * intermediate_casimir(block, (3, 1)) + (1 - a[2] - a[0]) * eye
    L3 = 4 * intermediate_casimir(block, (1, 2)) + (1 - a[0] - a[1]) * eye
    H = 4 * full_casimir(block) + 0.75 * eye
    return SIModel(L1, L2, L3, H, commutator(L1, L2), L1 + L2 + L3 + sum(a) * eye, a)


def triple_anticommutator(A, B, C, convention=ADOPTED_TRIPLE_CONVENTION):
    """Symmetrized triple product over all six orderings, times the convention's weight."""
    ops = (A, B, C)
    total = sum(ops[p[0]] @ ops[p[1]] @ ops[p[2]] for p in itertools.permutations(range(3)))
    return TRIPLE_CONVENTIONS[convention] * total


class KMPResiduals(NamedTuple):
    commutator_1: float
    commutator_2: float
    commutator_3: float
    r_squared: float
    hamiltonian_match: float
    hamiltonian_commutes: float

    def max(self):
        return max(self)


def r_squared_rhs(L, a, convention=ADOPTED_TRIPLE_CONVENTION):
    L1, L2, L3 = L
    eye = np.eye(L1.shape[0])
    out = -8.0 / 3.0 * triple_anticommutator(L1, L2, L3, convention)
    for Li, ai in zip(L, a):
        out = out - ((12 - 16 * ai) * Li @ Li + (16 - 176 * ai) / 3 * Li + 32 / 3 * ai * eye)
    out = out + 52 / 3 * (anticommutator(L1, L2) + anticommutator(L2, L3) + anticommutator(L1, L3))
    out = out + (48 * (a[0] * a[1] + a[1] * a[2] + a[2] * a[0]) - 64 * a[0] * a[1] * a[2]) * eye
    return out


def verify_kmp_relations(ops, a=None, convention=ADOPTED_TRIPLE_CONVENTION):
    a = ops.a if a is None else tuple(a)
    L = (ops.L1, ops.L2, ops.L3)
    eye = np.eye(ops.L1.shape[0])
    comm = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        rhs = (4 * anticommutator(L[i], L[j]) - 4 * anticommutator(L[i], L[k])
               - (8 - 16 * a[j]) * L[j] + (8 - 16 * a[k]) * L[k] + 8 * (a[j] - a[k]) * eye)
        comm.append(residual(commutator(L[i], ops.R), rhs))
    r2 = residual(ops.R @ ops.R, r_squared_rhs(L, a, convention))
    h_comm = max(residual(commutator(ops.H, Li), np.zeros_like(Li)) for Li in L)
    return KMPResiduals(*comm, r2, residual(ops.H, ops.H_sum), h_comm)


def adopt_triple_convention(blocks):
    """Convention name with the smallest worst-case ``R^2`` residual over ``blocks``."""
    worst = {}
    for name in TRIPLE_CONVENTIONS:
        worst[name] = max(verify_kmp_relations(si_model_operators(b), convention=name).r_squared
                          for b in blocks)
    return min(worst, key=worst.get), worst


# --- S operator on a window of weights ----------------------------------------

def _window_operators(nu, weights):
    blocks = [WeightBlock(nu, w) for w in weights]
    offsets = np.cumsum([0] + [b.dim for b in blocks])
    dim = int(offsets[-1])
    C4 = np.zeros((dim, dim))
    J0 = np.zeros((dim, dim))
    Jp = np.zeros((dim, dim))
    reps = blocks[0].reps
    for bi, b in enumerate(blocks):
        sl = slice(offsets[bi], offsets[bi + 1])
        C4[sl, sl] = full_casimir(b)
        J0[sl, sl] = sum(b.j0(i) for i in (1, 2, 3))
        if bi + 1 < len(blocks):
            up = blocks[bi + 1]
            for col, t in enumerate(b.basis):
                for i in range(3):
                    s = list(t)
                    amp = ladder_elements(reps[i], s[i])[1]
                    s[i] += 1
                    Jp[offsets[bi + 1] + up.index[tuple(s)], offsets[bi] + col] += amp
    return blocks, offsets, C4, J0, Jp


def s_operator_residual(nu, N):
    """Interior-row commutator of ``S = 2 J0 + J+ + J-`` with ``4 C4 + 3/4``.

    Built on weights ``N-1 .. N+1``; ``C4`` is exact on each weight, the ladder
    operators are truncated at the window edges, so only rows of weight ``N``
    are exact and only those are measured.
    """
    weights = [w for w in (N - 1, N, N + 1) if w >= 0]
    blocks, offsets, C4, J0, Jp = _window_operators(nu, weights)
    S = 2 * J0 + Jp + Jp.T
    H = 4 * C4 + 0.75 * np.eye(C4.shape[0])
    comm = S @ H - H @ S
    bi = weights.index(N)
    rows = slice(offsets[bi], offsets[bi + 1])
    scale = max(1.0, inf_norm((S @ H)[rows]), inf_norm((H @ S)[rows]))
    return inf_norm(comm[rows]) / scale
