"""Terminating hypergeometric sums and the Racah polynomials.

The Racah polynomial of degree ``n`` in ``lambda(x) = x (x + gamma + delta + 1)``
is the balanced 4F3

    R_n(lambda(x)) = 4F3(-n, n+alpha+beta+1, -x, x+gamma+delta+1;
                         alpha+1, beta+delta+1, gamma+1; 1)

and is bispectral: a three-term recurrence in ``n`` (coefficients ``A_n``,
``C_n``) and a second-order difference equation in ``x`` (``B(x)``, ``D(x)``).
On a finite grid one of ``alpha+1``, ``beta+delta+1`` or ``gamma+1`` equals
``-N``.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .exceptions import ParameterError
from .linalg import TridiagonalOperator, sym_tridiag_eigen

ZERO_TOL = 1e-12
TRUNCATION_TOL = 1e-12
TRUNCATION_KINDS = ("alpha", "beta_delta", "gamma")


def pochhammer(a, j):
    """Rising factorial ``(a)_j``."""
    out = 1.0
    for i in range(j):
        out *= a + i
    return out


def _termination_index(numerator):
    idx = None
    for a in numerator:
        r = round(a)
        if r <= 0 and abs(a - r) <= ZERO_TOL:
            idx = -r if idx is None else min(idx, -r)
    return idx


def phfq_terminating(numerator, denominator, z):
    """Sum a terminating generalized hypergeometric series.

    At least one numerator parameter must be a non-positive integer ``-m``;
    the sum then stops at ``j = m``.  Terms are accumulated through the ratio
    ``t_{j+1}/t_j`` in exact rational arithmetic on the (binary64) inputs and
    rounded once at the end: the balanced 4F3 sums behind the Racah
    polynomials cancel badly in floating point.

    Raises
    ------
    ParameterError
        if no numerator parameter terminates the series, or a denominator
        Pochhammer symbol vanishes at or before the last term.
    """
    numerator = [Fraction(a) for a in numerator]
    denominator = [Fraction(b) for b in denominator]
    z = Fraction(z)
    stop = _termination_index(numerator)
    if stop is None:
        raise ParameterError("series does not terminate",
                             "no numerator parameter is a non-positive integer")
    for b in denominator:
        for j in range(stop):
            if abs(b + j) < ZERO_TOL:
                raise ParameterError("denominator Pochhammer vanishes",
                                     f"denominator parameter {float(b)} hits zero at j={j + 1}")
    total = Fraction(0)
    term = Fraction(1)
    for j in range(stop + 1):
        total += term
        if j == stop:
            break
        num = Fraction(1)
        for a in numerator:
            num *= a + j
        den = Fraction(j + 1)
        for b in denominator:
            den *= b + j
        term *= num * z / den
    return float(total)


@dataclass(frozen=True)
class RacahParameters:
    """Parameters ``(alpha, beta, gamma, delta)`` on the grid ``0..N``.

    ``truncation_kind`` names which of ``alpha+1``, ``beta+delta+1`` or
    ``gamma+1`` equals ``-N``; it is explicit so a set satisfying two
    conditions is not ambiguous.
    """

    alpha: float
    beta: float
    gamma: float
    delta: float
    N: int
    truncation_kind: str = "gamma"

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ParameterError(f"{name} finite")
            object.__setattr__(self, name, value)
        if int(self.N) != self.N or self.N < 0:
            raise ParameterError("N nonnegative integer")
        object.__setattr__(self, "N", int(self.N))
        if self.truncation_kind not in TRUNCATION_KINDS:
            raise ParameterError("truncation kind",
                                 f"truncation_kind must be one of {TRUNCATION_KINDS}")
        if abs(self.truncation_value() + self.N) > TRUNCATION_TOL:
            raise ParameterError("truncation condition",
                                 f"{self.truncation_kind} truncation requires value -N={-self.N}, "
                                 f"got {self.truncation_value()}")
        self._check_denominators()

    @classmethod
    def truncated(cls, kind, N, alpha=None, beta=None, gamma=None, delta=None):
        """Build a parameter set with the free parameter fixed by truncation.

        For ``kind="alpha"`` alpha is set to ``-N-1``; for ``"gamma"`` gamma;
        for ``"beta_delta"`` beta is set to ``-N-1-delta``.
        """
        if kind == "alpha":
            alpha = -N - 1.0
        elif kind == "gamma":
            gamma = -N - 1.0
        elif kind == "beta_delta":
            beta = -N - 1.0 - delta
        else:
            raise ParameterError("truncation kind", f"unknown truncation kind {kind!r}")
        return cls(alpha, beta, gamma, delta, N, kind)

    def truncation_value(self):
        if self.truncation_kind == "alpha":
            return self.alpha + 1
        if self.truncation_kind == "gamma":
            return self.gamma + 1
        return self.beta + self.delta + 1

    def exact(self):
        """``(alpha, beta, gamma, delta)`` as Fractions satisfying the truncation exactly.

        For ``beta_delta`` truncation the larger of ``|beta|``, ``|delta|`` is
        recomputed from the other. The rule is symmetric under :meth:`dual`, so
        a set and its dual evaluate exactly the same rational sums. The other
        kinds already hold an exactly representable ``-N-1``.
        """
        a, b, g, d = (Fraction(v) for v in (self.alpha, self.beta, self.gamma, self.delta))
        if self.truncation_kind == "alpha":
            a = Fraction(-self.N - 1)
        elif self.truncation_kind == "gamma":
            g = Fraction(-self.N - 1)
        elif abs(b) >= abs(d):
            b = -self.N - 1 - d
        else:
            d = -self.N - 1 - b
        return a, b, g, d

    def lower_parameters(self):
        """Exact ``(alpha+1, beta+delta+1, gamma+1)``."""
        a, b, g, d = self.exact()
        return a + 1, b + d + 1, g + 1

    def _check_denominators(self):
        a, b, g, d = self.alpha, self.beta, self.gamma, self.delta
        for n in range(self.N + 1):
            s = 2 * n + a + b
            if abs((s + 1) * (s + 2)) < ZERO_TOL:
                raise ParameterError("A_n denominator", f"A_n denominator vanishes at n={n}")
            if n > 0 and abs(s * (s + 1)) < ZERO_TOL:
                raise ParameterError("C_n denominator", f"C_n denominator vanishes at n={n}")
        for x in range(self.N + 1):
            s = 2 * x + g + d
            if abs((s + 1) * (s + 2)) < ZERO_TOL:
                raise ParameterError("B(x) denominator", f"B(x) denominator vanishes at x={x}")
            if x > 0 and abs(s * (s + 1)) < ZERO_TOL:
                raise ParameterError("D(x) denominator", f"D(x) denominator vanishes at x={x}")
        # (a+1)_j, (b+d+1)_j, (g+1)_j for j <= N; the truncating one is -N and
        # only vanishes past the grid.
        for base in (a + 1, b + d + 1, g + 1):
            for j in range(self.N):
                if abs(base + j) < ZERO_TOL:
                    raise ParameterError("4F3 denominator",
                                         f"lower parameter {base} hits zero at j={j + 1}")

    def dual(self):
        """Parameters with ``alpha<->gamma`` and ``beta<->delta`` exchanged."""
        kind = {"alpha": "gamma", "gamma": "alpha", "beta_delta": "beta_delta"}[self.truncation_kind]
        return RacahParameters(self.gamma, self.delta, self.alpha, self.beta, self.N, kind)


class GridPoint(NamedTuple):
    x: int
    lam: float


def lattice(x, p):
    """``lambda(x) = x (x + gamma + delta + 1)``."""
    _, _, g, d = p.exact()
    return float(x * (x + g + d + 1))


def dual_lattice(n, p):
    """``n (n + alpha + beta + 1)``, the difference-operator eigenvalue."""
    a, b, _, _ = p.exact()
    return float(n * (n + a + b + 1))


def grid(p):
    return [GridPoint(x, lattice(x, p)) for x in range(p.N + 1)]


def racah_eval(n, x, p):
    """``R_n(lambda(x); alpha, beta, gamma, delta)``."""
    a, b, g, d = p.exact()
    return phfq_terminating(
        [-n, n + a + b + 1, -x, x + g + d + 1],
        list(p.lower_parameters()),
        1,
    )


def racah_matrix(p):
    """Matrix ``R[n, x] = R_n(lambda(x))`` over the full grid.

    Same exact summation as :func:`racah_eval`, with the ``n``- and
    ``x``-dependent Pochhammer factors shared across the grid.
    """
    size = p.N + 1
    a, b, g, d = p.exact()
    lower = p.lower_parameters()
    # poch_x[x][j] = (-x)_j (x+g+d+1)_j / j!, zero past j = x
    poch_x = []
    for x in range(size):
        row = [Fraction(1)]
        for j in range(x):
            row.append(row[-1] * (-x + j) * (x + g + d + 1 + j) / (j + 1))
        poch_x.append(row)
    out = np.empty((size, size))
    for n in range(size):
        coef = [Fraction(1)]
        for j in range(n):
            den = lower[0] + j
            den *= lower[1] + j
            den *= lower[2] + j
            coef.append(coef[-1] * (-n + j) * (n + a + b + 1 + j) / den)
        for x in range(size):
            px = poch_x[x]
            out[n, x] = float(sum(c * e for c, e in zip(coef, px)))
    return out


def recurrence_coeffs(n, p):
    """``(A_n, C_n)`` of ``lambda R_n = A_n R_{n+1} - (A_n+C_n) R_n + C_n R_{n-1}``.

    Evaluated exactly on :meth:`RacahParameters.exact` and rounded once.
    """
    a, b, g, d = p.exact()
    den_a = (2 * n + a + b + 1) * (2 * n + a + b + 2)
    if abs(den_a) < ZERO_TOL:
        raise ParameterError("A_n denominator", f"A_n denominator vanishes at n={n}")
    A = (n + a + 1) * (n + a + b + 1) * (n + b + d + 1) * (n + g + 1) / den_a
    if n == 0:
        return float(A), 0.0
    den_c = (2 * n + a + b) * (2 * n + a + b + 1)
    if abs(den_c) < ZERO_TOL:
        raise ParameterError("C_n denominator", f"C_n denominator vanishes at n={n}")
    C = n * (n + a + b - g) * (n + a - d) * (n + b) / den_c
    return float(A), float(C)


def difference_coeffs(x, p):
    """``(B(x), D(x))`` of the difference operator acting on ``x``."""
    a, b, g, d = p.exact()
    den_b = (2 * x + g + d + 1) * (2 * x + g + d + 2)
    if abs(den_b) < ZERO_TOL:
        raise ParameterError("B(x) denominator", f"B(x) denominator vanishes at x={x}")
    B = (x + a + 1) * (x + b + d + 1) * (x + g + 1) * (x + g + d + 1) / den_b
    if x == 0:
        return float(B), 0.0
    den_d = (2 * x + g + d) * (2 * x + g + d + 1)
    if abs(den_d) < ZERO_TOL:
        raise ParameterError("D(x) denominator", f"D(x) denominator vanishes at x={x}")
    D = x * (x - a + g + d) * (x - b + g) * (x + d) / den_d
    return float(B), float(D)


def recurrence_operator(p):
    """Matrix of the recurrence operator on functions of ``n``.

    Row ``n`` holds ``(C_n, -(A_n+C_n), A_n)`` at columns ``n-1, n, n+1``, so
    ``recurrence_operator(p) @ R[:, x] == lambda(x) R[:, x]``.
    """
    size = p.N + 1
    M = np.zeros((size, size))
    for n in range(size):
        A, C = recurrence_coeffs(n, p)
        M[n, n] = -(A + C)
        if n + 1 < size:
            M[n, n + 1] = A
        if n > 0:
            M[n, n - 1] = C
    return M


def difference_operator(p):
    """Matrix of the difference operator on functions of ``x``.

    Row ``x`` holds ``(D(x), -(B(x)+D(x)), B(x))`` at columns ``x-1, x, x+1``.
    """
    size = p.N + 1
    L = np.zeros((size, size))
    for x in range(size):
        B, D = difference_coeffs(x, p)
        L[x, x] = -(B + D)
        if x + 1 < size:
            L[x, x + 1] = B
        if x > 0:
            L[x, x - 1] = D
    return L


def recurrence_residual(p, R=None):
    """Largest scaled defect of the three-term recurrence over all ``(n, x)``.

    Each defect is divided by ``max(1, |term|...)`` of the terms involved.
    Rows at ``n = N`` rely on ``A_N = 0`` (truncation) where applicable.
    """
    R = racah_matrix(p) if R is None else R
    worst = 0.0
    for n in range(p.N + 1):
        A, C = recurrence_coeffs(n, p)
        for x in range(p.N + 1):
            nxt = R[n + 1, x] if n < p.N else 0.0
            if n == p.N and abs(A) > ZERO_TOL:
                nxt = racah_eval(n + 1, x, p)
            prv = R[n - 1, x] if n > 0 else 0.0
            terms = (lattice(x, p) * R[n, x], A * nxt, (A + C) * R[n, x], C * prv)
            defect = terms[0] - terms[1] + terms[2] - terms[3]
            worst = max(worst, abs(defect) / max(1.0, *map(abs, terms)))
    return worst


def difference_residual(p, R=None):
    """Largest scaled defect of the difference equation over all ``(n, x)``."""
    R = racah_matrix(p) if R is None else R
    worst = 0.0
    for x in range(p.N + 1):
        B, D = difference_coeffs(x, p)
        for n in range(p.N + 1):
            up = R[n, x + 1] if x < p.N else 0.0
            if x == p.N and abs(B) > ZERO_TOL:
                up = racah_eval(n, x + 1, p)
            down = R[n, x - 1] if x > 0 else 0.0
            terms = (B * up, D * down, (B + D) * R[n, x], dual_lattice(n, p) * R[n, x])
            defect = terms[0] + terms[1] - terms[2] - terms[3]
            worst = max(worst, abs(defect) / max(1.0, *map(abs, terms)))
    return worst


def weights_and_norms(p):
    """Orthogonality weights ``w_x`` and squared norms ``h_n``.

    Normalisation: ``sum(w) == 1`` and ``h_0 == 1``.  The weights come from the
    symmetrised Jacobi matrix of the recurrence (first eigenvector components
    squared); the norms are then summed directly.

    Raises
    ------
    ParameterError
        if some ``A_n C_{n+1}`` is not positive, i.e. the measure is not
        positive for these parameters.
    """
    size = p.N + 1
    diag = np.empty(size)
    off = np.empty(size - 1)
    for n in range(size):
        A, C = recurrence_coeffs(n, p)
        diag[n] = -(A + C)
        if n + 1 < size:
            _, C_next = recurrence_coeffs(n + 1, p)
            prod = A * C_next
            if not prod > 0:
                raise ParameterError("positive weights",
                                     f"A_{n} C_{n + 1} = {prod} is not positive")
            off[n] = np.sqrt(prod)
    eig = sym_tridiag_eigen(TridiagonalOperator(diag, off))
    lam = np.array([lattice(x, p) for x in range(size)])
    scale = max(1.0, np.abs(lam).max())
    w = np.empty(size)
    used = set()
    for x in range(size):
        s = int(np.argmin(np.abs(eig.values - lam[x])))
        if s in used or abs(eig.values[s] - lam[x]) > 1e-8 * scale:
            raise ParameterError("spectral grid",
                                 f"Jacobi spectrum does not reproduce lambda({x})")
        used.add(s)
        w[x] = eig.vectors[0, s] ** 2
    w /= w.sum()
    R = racah_matrix(p)
    h = (R ** 2) @ w
    return w, h / h[0]


def orthogonality_residual(p):
    """Largest normalised off-diagonal Gram entry ``|<R_n, R_m>| / sqrt(h_n h_m)``."""
    w, _ = weights_and_norms(p)
    R = racah_matrix(p)
    gram = (R * w) @ R.T
    norms = np.sqrt(np.diag(gram))
    gram = gram / np.outer(norms, norms)
    return float(np.abs(gram - np.eye(p.N + 1)).max())


def duality_check(p):
    """``max |R_n(lambda(x); a,b,g,d) - R_x(lambda*(n); g,d,a,b)|`` over the grid."""
    q = p.dual()
    R = racah_matrix(p)
    Rd = racah_matrix(q)
    return float(np.abs(R - Rd.T).max())
