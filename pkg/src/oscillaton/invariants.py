"""Numerical checks of the operator-algebra invariants, used by ``verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import (
    InteriorProjector,
    ModeSpace,
    bogoliubov_transform,
    build_annihilation,
    build_photon_ops,
    commutator,
    hermite_functions,
    mixing_params,
)

COMMUTATOR_TOL = 1e-12
ORTHONORMALITY_TOL = 1e-10


def mixed_commutator_deviation(space: ModeSpace, gammas) -> float:
    """Max |[c'_n, c'+_n] - 1| over interior indices, levels below the cutoff and all ``gammas``."""
    proj = InteriorProjector(space, margin=1)
    worst = 0.0
    for n in range(space.level_cutoff):
        c = build_annihilation(space, n)
        cd = c.adjoint()
        for g in gammas:
            c2, cd2 = bogoliubov_transform(c, cd, mixing_params(float(g)))
            worst = max(worst, proj.deviation_from_identity(commutator(c2, cd2)))
    return worst


def single_sector_photon_matrix(space: ModeSpace) -> np.ndarray:
    """a' restricted to one-oscillaton states, rows and columns ordered by level."""
    a, _ = build_photon_ops(space)
    by_level = [space.single(n) for n in range(space.n_levels)]
    return a.restrict(by_level)


def standard_annihilation(n_levels: int) -> np.ndarray:
    out = np.zeros((n_levels, n_levels), dtype=complex)
    for n in range(1, n_levels):
        out[n - 1, n] = math.sqrt(n)
    return out


def single_sector_deviation(space: ModeSpace) -> float:
    diff = single_sector_photon_matrix(space) - standard_annihilation(space.n_levels)
    return float(np.max(np.abs(diff)))


def eigenfunction_gram(n_max: int, n_nodes: int) -> np.ndarray:
    """Overlap matrix of phi_0..phi_n_max by Gauss-Hermite quadrature."""
    x, w = np.polynomial.hermite.hermgauss(n_nodes)
    # hermgauss weight exp(-x^2) is exactly the product of the two envelopes
    h = hermite_functions(n_max, x, envelope=False)
    return (h * w) @ h.T


def orthonormality_deviation(n_max: int = 10, n_nodes: int | None = None) -> float:
    if n_nodes is None:
        n_nodes = max(4 * n_max, 40)
    gram = eigenfunction_gram(n_max, n_nodes)
    return float(np.max(np.abs(gram - np.eye(n_max + 1))))


@dataclass(frozen=True)
class VerifyReport:
    commutator_deviation: float
    single_sector_deviation: float
    orthonormality_deviation: float
    adjoint_involution: bool
    n_gammas: int

    @property
    def ok(self) -> bool:
        return (
            self.commutator_deviation < COMMUTATOR_TOL
            and self.single_sector_deviation == 0.0
            and self.orthonormality_deviation < ORTHONORMALITY_TOL
            and self.adjoint_involution
        )


def run_invariant_suite(space: ModeSpace, n_gammas: int = 20, gamma_max: float = 0.5) -> VerifyReport:
    gammas = np.linspace(-gamma_max, gamma_max, n_gammas)
    involution = True
    for n in range(space.n_levels):
        c = build_annihilation(space, n)
        involution &= c.adjoint().adjoint().equals(c)
    a, ad = build_photon_ops(space)
    involution &= ad.adjoint().equals(a)
    n_max = max(10, space.level_cutoff)
    return VerifyReport(
        commutator_deviation=mixed_commutator_deviation(space, gammas),
        single_sector_deviation=single_sector_deviation(space),
        orthonormality_deviation=orthonormality_deviation(n_max, max(4 * n_max, 40)),
        adjoint_involution=bool(involution),
        n_gammas=n_gammas,
    )
