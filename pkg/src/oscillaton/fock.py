"""Truncated oscillaton Fock space and its operator algebra.

A single field mode is a harmonic oscillator whose levels ``n = 0..L`` can each
hold any number ``m_n`` of bosonic oscillatons.  The basis is every occupation
vector ``(m_0, ..., m_L)`` with ``sum(m) <= M``.  Operators are stored sparse
(CSR, canonical form) so that adjoints and equality checks are exact.

Truncation breaks canonical commutators on the boundary of the space, so all
identities are asserted only on the indices kept by :class:`InteriorProjector`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, MixingAngleError, OscillatonError, TruncationError

DEFAULT_LEVEL_CUTOFF = 6
DEFAULT_OSC_CUTOFF = 4
MAX_EIGENFUNCTION_ORDER = 200
DENSE_LIMIT = 5000


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    # lexicographically ascending: the first slot grows slowest
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


@dataclass(frozen=True)
class ModeSpace:
    """Occupation-number basis for one field mode.

    Basis order is by total oscillaton number, then lexicographic in the
    occupation vector.  Two spaces with equal cutoffs have identical bases.
    """

    level_cutoff: int = DEFAULT_LEVEL_CUTOFF
    osc_cutoff: int = DEFAULT_OSC_CUTOFF
    basis: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.level_cutoff) != self.level_cutoff or self.level_cutoff < 1:
            raise TruncationError("level_cutoff must be an integer >= 1")
        if int(self.osc_cutoff) != self.osc_cutoff or self.osc_cutoff < 1:
            raise TruncationError("osc_cutoff must be an integer >= 1")
        n_levels = self.level_cutoff + 1
        basis = tuple(
            occ
            for total in range(self.osc_cutoff + 1)
            for occ in sorted(_compositions(total, n_levels))
        )
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "_index", {occ: i for i, occ in enumerate(basis)})

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def n_levels(self) -> int:
        return self.level_cutoff + 1

    def index(self, occupation: Sequence[int]) -> int:
        occ = tuple(int(m) for m in occupation)
        if len(occ) < self.n_levels:
            occ = occ + (0,) * (self.n_levels - len(occ))
        try:
            return self._index[occ]
        except KeyError:
            raise TruncationError(f"occupation {occ} is outside the truncated space") from None

    def occupation(self, index: int) -> tuple[int, ...]:
        return self.basis[index]

    @property
    def vacuum(self) -> int:
        return 0

    def single(self, level: int) -> int:
        """Index of the state holding one oscillaton at ``level``."""
        occ = [0] * self.n_levels
        occ[level] = 1
        return self.index(occ)

    def sector(self, total: int) -> list[int]:
        return [i for i, occ in enumerate(self.basis) if sum(occ) == total]

    def ket(self, index: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[index] = 1.0
        return v


class OperatorMatrix:
    """Immutable sparse complex operator on a :class:`ModeSpace`."""

    __slots__ = ("_m",)

    def __init__(self, matrix):
        m = sp.csr_array(matrix, dtype=complex)
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatch("operator dimension mismatch: matrix is not square")
        m.sum_duplicates()
        m.eliminate_zeros()
        m.sort_indices()
        if not np.all(np.isfinite(m.data)):
            raise OscillatonError("operator amplitudes must be finite")
        m.data.flags.writeable = False
        self._m = m

    @classmethod
    def from_entries(cls, dim: int, entries: dict) -> "OperatorMatrix":
        if not entries:
            return cls.zeros(dim)
        rows, cols = zip(*entries)
        vals = list(entries.values())
        return cls(sp.coo_array((vals, (rows, cols)), shape=(dim, dim)))

    @classmethod
    def zeros(cls, dim: int) -> "OperatorMatrix":
        return cls(sp.csr_array((dim, dim), dtype=complex))

    @classmethod
    def identity(cls, dim: int) -> "OperatorMatrix":
        return cls(sp.identity(dim, dtype=complex, format="csr"))

    @property
    def dim(self) -> int:
        return self._m.shape[0]

    @property
    def nnz(self) -> int:
        return self._m.nnz

    @property
    def sparse(self) -> sp.csr_array:
        return self._m.copy()

    @property
    def entries(self) -> dict[tuple[int, int], complex]:
        coo = self._m.tocoo()
        return {(int(r), int(c)): complex(v) for r, c, v in zip(coo.row, coo.col, coo.data)}

    def to_dense(self) -> np.ndarray:
        if self.dim > DENSE_LIMIT:
            raise OscillatonError(f"dense conversion refused for dim {self.dim} > {DENSE_LIMIT}")
        return self._m.toarray()

    def element(self, row: int, col: int) -> complex:
        return complex(self._m[row, col])

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self._m.conj().T)

    def apply(self, vector: np.ndarray) -> np.ndarray:
        vector = np.asarray(vector)
        if vector.shape[0] != self.dim:
            raise DimensionMismatch("operator dimension mismatch")
        return self._m @ vector

    def restrict(self, indices: Sequence[int]) -> np.ndarray:
        idx = np.asarray(indices, dtype=int)
        return self._m[idx][:, idx].toarray()

    def equals(self, other: "OperatorMatrix") -> bool:
        """Exact entrywise equality."""
        a, b = self._m, other._m
        return (
            a.shape == b.shape
            and np.array_equal(a.indptr, b.indptr)
            and np.array_equal(a.indices, b.indices)
            and np.array_equal(a.data, b.data)
        )

    def _check(self, other: "OperatorMatrix"):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionMismatch(f"operator dimension mismatch: {self.dim} vs {other.dim}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return OperatorMatrix(self._m + other._m)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return OperatorMatrix(self._m - other._m)

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return OperatorMatrix(self._m @ other._m)

    def __mul__(self, scalar):
        if isinstance(scalar, OperatorMatrix):
            return NotImplemented
        return OperatorMatrix(self._m * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return OperatorMatrix(-self._m)

    def __repr__(self):
        return f"OperatorMatrix(dim={self.dim}, nnz={self.nnz})"


@dataclass(frozen=True)
class InteriorProjector:
    """Indices far enough from the truncation edge for identities to hold.

    Keeps occupation vectors with ``sum(m) <= osc_cutoff - margin`` and no
    oscillatons above level ``level_cutoff - margin``.
    """

    space: ModeSpace
    margin: int = 1
    kept_indices: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        if self.margin < 1:
            raise TruncationError("margin must be >= 1")
        top = self.space.level_cutoff - self.margin
        kept = tuple(
            i
            for i, occ in enumerate(self.space.basis)
            if sum(occ) <= self.space.osc_cutoff - self.margin and not any(occ[top + 1 :])
        )
        object.__setattr__(self, "kept_indices", kept)

    def restrict(self, op: OperatorMatrix) -> np.ndarray:
        return op.restrict(self.kept_indices)

    def deviation_from_identity(self, op: OperatorMatrix) -> float:
        block = self.restrict(op)
        return float(np.max(np.abs(block - np.eye(len(self.kept_indices))), initial=0.0))

    def max_abs(self, op: OperatorMatrix) -> float:
        return float(np.max(np.abs(self.restrict(op)), initial=0.0))


def hermite_functions(
    n_max: int, x, max_order: int = MAX_EIGENFUNCTION_ORDER, envelope: bool = True
) -> np.ndarray:
    """Oscillator eigenfunctions ``phi_0..phi_n_max`` at ``x``.

    Returns an array of shape ``(n_max + 1,) + shape(x)``.  Uses the upward
    recurrence on normalized Hermite functions, so no factorials appear::

        phi_{n+1} = sqrt(2/(n+1)) x phi_n - sqrt(n/(n+1)) phi_{n-1}

    With ``envelope=False`` the common factor ``exp(-x^2/2)`` is left out,
    which is what Gauss-Hermite quadrature wants.
    """
    if n_max < 0:
        raise OscillatonError("eigenfunction order must be >= 0")
    if n_max > max_order:
        raise OscillatonError(f"eigenfunction order overflow: {n_max} > {max_order}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise OscillatonError("quadrature coordinate must be finite")
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = np.pi**-0.25 * (np.exp(-0.5 * x * x) if envelope else np.ones_like(x))
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, n_max):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def oscillator_eigenfunction(n: int, x, max_order: int = MAX_EIGENFUNCTION_ORDER):
    """phi_n(x) with hbar = m = omega = 1."""
    if n < 0:
        raise OscillatonError("eigenfunction order must be >= 0")
    values = hermite_functions(n, x, max_order=max_order)[n]
    return float(values) if values.ndim == 0 else values


def _check_level(space: ModeSpace, level: int):
    if not 0 <= level <= space.level_cutoff:
        raise TruncationError(f"level out of bounds: {level} not in [0, {space.level_cutoff}]")


def build_annihilation(space: ModeSpace, level: int) -> OperatorMatrix:
    """c_n: removes one oscillaton from ``level`` with amplitude sqrt(m_n)."""
    _check_level(space, level)
    entries = {}
    for col, occ in enumerate(space.basis):
        k = occ[level]
        if k == 0:
            continue
        lowered = occ[:level] + (k - 1,) + occ[level + 1 :]
        entries[(space.index(lowered), col)] = math.sqrt(k)
    return OperatorMatrix.from_entries(space.dim, entries)


def build_creation(space: ModeSpace, level: int) -> OperatorMatrix:
    return build_annihilation(space, level).adjoint()


def build_photon_ops(space: ModeSpace) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Photon operators built from oscillaton hops between adjacent levels.

    ``a' = sum_{n=1}^{L} sqrt(n) c+_{n-1} c_n`` and ``a'+ = adjoint(a')``.
    """
    a = OperatorMatrix.zeros(space.dim)
    for n in range(1, space.level_cutoff + 1):
        hop = build_creation(space, n - 1) @ build_annihilation(space, n)
        a = a + math.sqrt(n) * hop
    return a, a.adjoint()


@dataclass(frozen=True)
class MixingParams:
    gamma: float
    beta: float = field(init=False)

    def __post_init__(self):
        g = float(self.gamma)
        if not math.isfinite(g) or abs(g) >= math.pi / 4:
            raise MixingAngleError(
                f"mixing angle outside hyperbolic domain: |gamma| = {abs(g)} >= pi/4"
            )
        c2 = math.cos(2.0 * g)
        if c2 <= 0.0:
            raise MixingAngleError("mixing angle outside hyperbolic domain: cos(2 gamma) <= 0")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "beta", c2**-0.5)


def mixing_params(gamma: float) -> MixingParams:
    return MixingParams(gamma)


def bogoliubov_transform(
    c: OperatorMatrix, c_dagger: OperatorMatrix, p: MixingParams
) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Mix annihilation and creation operators at angle ``p.gamma``.

    ``c' = beta (cos g c + sin g c+)`` and ``c'+ = beta (sin g c + cos g c+)``.
    The second line is returned as written and checked against adjoint(c').
    """
    if c.dim != c_dagger.dim:
        raise DimensionMismatch(f"operator dimension mismatch: {c.dim} vs {c_dagger.dim}")
    cg, sg = math.cos(p.gamma), math.sin(p.gamma)
    c_new = p.beta * (cg * c + sg * c_dagger)
    c_dag_new = p.beta * (sg * c + cg * c_dagger)
    real_input = not np.any(c.sparse.data.imag) and not np.any(c_dagger.sparse.data.imag)
    if real_input:
        diff = (c_dag_new - c_new.adjoint()).sparse
        if diff.nnz and np.max(np.abs(diff.data)) > 1e-12 * p.beta:
            raise OscillatonError("transformed creation operator is not the adjoint of c'")
    return c_new, c_dag_new


def field_operator(space: ModeSpace, x: float) -> OperatorMatrix:
    """psi(x) = sum_n phi_n(x) c_n over the retained levels."""
    phis = hermite_functions(space.level_cutoff, float(x))
    op = OperatorMatrix.zeros(space.dim)
    for n in range(space.level_cutoff + 1):
        op = op + float(phis[n]) * build_annihilation(space, n)
    return op


def commutator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    return a @ b - b @ a
