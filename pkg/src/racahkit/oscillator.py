"""Symmetry algebra of the 2D singular oscillator on a degenerate level.

Each Cartesian factor carries a discrete series representation with
``nu_i = (k_i + 1)/2``, and the one-dimensional Hamiltonians are ``2 J0(i)``.
On the level ``n1 + n2 = N`` (basis indexed by ``n1``) the exchange operators
``C+ = 4 J+(1) J-(2)`` and ``C- = 4 J-(1) J+(2)`` together with
``D = 2 (J0(1) - J0(2))`` close into a cubic algebra, which becomes a
Hahn-type presentation of the Racah algebra after the shifts below.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import ParameterError
from .linalg import anticommutator, commutator, residual
from .racah_algebra import GenericConstants
from .su11_coupling import DiscreteSeriesRep, ladder_elements


@dataclass(frozen=True)
class OscillatorSpec:
    k1: float
    k2: float
    N: int

    def __post_init__(self):
        for name in ("k1", "k2"):
            k = getattr(self, name)
            if not (np.isfinite(k) and k > -1):
                raise ParameterError("k > -1", f"{name} must exceed -1, got {k}")
        if int(self.N) != self.N or self.N < 0:
            raise ParameterError("N nonnegative integer", f"level must be >= 0, got {self.N}")
        object.__setattr__(self, "N", int(self.N))

    @property
    def nu(self):
        return (self.k1 + 1) / 2, (self.k2 + 1) / 2

    @property
    def a(self):
        return self.k1 ** 2 - 0.25, self.k2 ** 2 - 0.25

    @property
    def energy(self):
        """Eigenvalue of ``H = 2 (J0(1) + J0(2))`` on the level: ``2N + k1 + k2 + 2``."""
        return 2 * (self.N + sum(self.nu))

    @property
    def alpha1(self):
        return -self.energy ** 2 - 2 * (self.k1 ** 2 + self.k2 ** 2 - 2)

    @property
    def alpha2(self):
        return (2 * self.k1 ** 2 - 2 * self.k2 ** 2) * self.energy

    @property
    def deltas(self):
        h = self.energy
        return (-(self.k1 ** 2 + self.k2 ** 2 - 2) / 4,
                (self.k1 - self.k2) * (self.k1 + self.k2) * h / 32,
                -h * h / 64)


class OscillatorBlock(NamedTuple):
    H: np.ndarray
    D: np.ndarray
    Cplus: np.ndarray
    Cminus: np.ndarray


def oscillator_block(spec):
    N = spec.N
    r1, r2 = (DiscreteSeriesRep(v) for v in spec.nu)
    n1 = np.arange(N + 1)
    j01 = n1 + r1.nu
    j02 = (N - n1) + r2.nu
    Cp = np.zeros((N + 1, N + 1))
    for i in range(N):
        # |i, N-i> -> |i+1, N-i-1>
        Cp[i + 1, i] = 4 * ladder_elements(r1, i)[1] * ladder_elements(r2, N - i)[2]
    return OscillatorBlock(np.diag(2 * (j01 + j02)), np.diag(2 * (j01 - j02)), Cp, Cp.T.copy())


class OscillatorResiduals(NamedTuple):
    d_cplus: float
    d_cminus: float
    cubic: float
    h_commutes: float


def verify_oscillator_algebra(spec):
    H, D, Cp, Cm = oscillator_block(spec)
    eye = np.eye(spec.N + 1)
    cubic = D @ D @ D + spec.alpha1 * D + spec.alpha2 * eye
    h_comm = max(residual(commutator(H, X), np.zeros_like(X)) for X in (D, Cp, Cm))
    return OscillatorResiduals(
        residual(commutator(D, Cp), 4 * Cp),
        residual(commutator(D, Cm), -4 * Cm),
        residual(commutator(Cm, Cp), cubic),
        h_comm,
    )


class HahnResiduals(NamedTuple):
    k3_identity: float
    k2k3: float
    k3k1: float

    def max(self):
        return max(self)


class HahnOperators(NamedTuple):
    K1: np.ndarray
    K2: np.ndarray
    K3: np.ndarray
    residuals: HahnResiduals


def hahn_operators(spec):
    """``K1 = D/8``, ``K2 = (C+ + C- + (D^2 - H^2)/2)/8``, ``K3 = [K1, K2]``.

    Relations checked, with ``H`` replaced by its value on the level::

        K3 = (C+ - C-)/16
        [K2, K3] = {K1, K2} + delta1 K1 + delta2
        [K3, K1] = K1^2 - K2/4 + delta3
    """
    _, D, Cp, Cm = oscillator_block(spec)
    eye = np.eye(spec.N + 1)
    h = spec.energy
    K1 = D / 8
    K2 = (Cp + Cm + 0.5 * (D @ D - h * h * eye)) / 8
    K3 = commutator(K1, K2)
    d1, d2, d3 = spec.deltas
    res = HahnResiduals(
        residual(K3, (Cp - Cm) / 16),
        residual(commutator(K2, K3), anticommutator(K1, K2) + d1 * K1 + d2 * eye),
        residual(commutator(K3, K1), K1 @ K1 - 0.25 * K2 + d3 * eye),
    )
    return HahnOperators(K1, K2, K3, res)


def hahn_generic_constants(spec):
    """The Hahn presentation as generic constants ``(a1, a2, c1, c2, d, e1, e2)``.

    ``a2 = 0`` here: no ``K2^2`` term in ``[K2, K3]`` and no ``{K1, K2}`` in
    ``[K3, K1]``.
    """
    d1, d2, d3 = spec.deltas
    return GenericConstants(1.0, 0.0, d1, -0.25, 0.0, d2, d3)
