"""Truncated number-basis oracle for photocount and quadrature moments.

Everything here is finite-dimensional and exact (or float-exact): ladder
operators on a truncated basis, the completely symmetric ladder sum
evaluated both by brute-force enumeration of operator orderings and by its
closed polynomial form in the number operator, and photocount / quadrature
moments of diagonal states.  It exists to arbitrate the statistical
estimators in :mod:`photocount.moments`.

Truncation bookkeeping: applying a ladder operator contaminates one more
top basis level, tracked by ``guard``.  Tests and comparisons must only
ever look at the trusted (unguarded) block.

Exact mode stores Fraction entries in a rescaled number basis
(|m> -> sqrt(m!) |m>) in which ladder matrix elements are integers: the
down operator carries m on the superdiagonal and the up operator carries 1
on the subdiagonal.  Level-conserving products -- in particular every term
of the symmetric sum -- are diagonal, and diagonal matrix elements are
invariant under that rescaling, so exact results compare directly against
physical-basis (float) ones.  Float mode keeps the physical sqrt(m)
elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .moments import PhotonStats

_LADDER_KINDS = ("annihilation", "creation", "number")
_ENUMERATION_CAP = 6
_HERM_TOL = 1e-12
_TRACE_TOL = 1e-10
_EIG_TOL = 1e-10
_TAIL_TOL = 1e-12


class InvalidDimensionError(ValueError):
    """Truncation dimension too small for the requested operation."""


class EnumerationTooLargeError(ValueError):
    """Ordering enumeration refused beyond the supported order."""


class NormalizationError(ValueError):
    """Density matrix trace is not unity."""


class TruncationError(ValueError):
    """State has non-negligible weight near the truncation edge."""

    def __init__(self, message: str, tail_mass: float):
        super().__init__(message)
        self.tail_mass = tail_mass


@dataclass(frozen=True)
class FockOperator:
    """Dense operator on a number basis truncated to ``dim`` levels.

    ``guard`` counts untrusted top levels; ``exact`` marks Fraction
    entries (rescaled basis, see module docstring) versus float entries
    (physical basis).
    """

    dim: int
    entries: np.ndarray
    guard: int = 0
    exact: bool = False

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidDimensionError(f"dim must be >= 1, got {self.dim}")
        if self.entries.shape != (self.dim, self.dim):
            raise ValueError(
                f"entries shape {self.entries.shape} != ({self.dim}, {self.dim})"
            )
        if self.guard < 0:
            raise ValueError("guard must be nonnegative")

    @property
    def trusted_dim(self) -> int:
        return max(self.dim - self.guard, 0)

    def trusted(self) -> np.ndarray:
        """Copy of the block unaffected by truncation."""
        td = self.trusted_dim
        return self.entries[:td, :td].copy()

    def diagonal(self) -> np.ndarray:
        return np.diag(self.entries).copy()

    def is_diagonal(self) -> bool:
        off = self.entries[~np.eye(self.dim, dtype=bool)]
        if self.exact:
            return all(v == 0 for v in off)
        return not np.any(off)

    def to_float(self) -> "FockOperator":
        """Float view; only safe for diagonal or level-conserving results."""
        if not self.exact:
            return self
        return FockOperator(
            self.dim, self.entries.astype(float), self.guard, exact=False
        )

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        self._check_compatible(other)
        if self.exact:
            ent = _sparse_matmul_object(self.entries, other.entries)
        else:
            ent = self.entries @ other.entries
        return FockOperator(self.dim, ent, self.guard + other.guard, self.exact)

    def __add__(self, other: "FockOperator") -> "FockOperator":
        self._check_compatible(other)
        return FockOperator(
            self.dim,
            self.entries + other.entries,
            max(self.guard, other.guard),
            self.exact,
        )

    def __rmul__(self, scalar) -> "FockOperator":
        return FockOperator(self.dim, scalar * self.entries, self.guard, self.exact)

    def _check_compatible(self, other: "FockOperator") -> None:
        if self.dim != other.dim:
            raise InvalidDimensionError(
                f"dimension mismatch: {self.dim} vs {other.dim}"
            )
        if self.exact != other.exact:
            raise ValueError("cannot mix exact and float operators")

    def dump_csv(self, path) -> None:
        np.savetxt(path, self.to_float().entries, delimiter=",")


def _sparse_matmul_object(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact object-dtype matmul skipping zero entries.

    Ladder words stay extremely sparse (at most one nonzero per column),
    so this is O(dim) per product instead of O(dim^3).
    """
    dim = a.shape[0]
    out = np.full((dim, dim), Fraction(0), dtype=object)
    rows_b: dict[int, list[tuple[int, Fraction]]] = {}
    for k, j in zip(*np.nonzero(b)):
        rows_b.setdefault(int(k), []).append((int(j), b[k, j]))
    for i, k in zip(*np.nonzero(a)):
        v = a[i, k]
        for j, bv in rows_b.get(int(k), ()):
            out[i, j] += v * bv
    return out


def make_ladder(dim: int, which: str, exact: bool = False) -> FockOperator:
    """Ladder or number operator on a ``dim``-level basis.

    Float mode: annihilation has sqrt(m) at [m-1, m], creation is its
    transpose, number is diag(0..dim-1).  Exact mode uses the rescaled
    basis (m at [m-1, m] for annihilation, 1 at [m, m-1] for creation).
    Ladder operators get guard 1, the number operator guard 0.
    """
    if dim < 2:
        raise InvalidDimensionError(f"need dim >= 2, got {dim}")
    if which not in _LADDER_KINDS:
        raise ValueError(f"which must be one of {_LADDER_KINDS}, got {which!r}")
    if exact:
        ent = np.full((dim, dim), Fraction(0), dtype=object)
        if which == "annihilation":
            for m in range(1, dim):
                ent[m - 1, m] = Fraction(m)
        elif which == "creation":
            for m in range(1, dim):
                ent[m, m - 1] = Fraction(1)
        else:
            for m in range(dim):
                ent[m, m] = Fraction(m)
    else:
        ent = np.zeros((dim, dim))
        if which == "annihilation":
            for m in range(1, dim):
                ent[m - 1, m] = math.sqrt(m)
        elif which == "creation":
            for m in range(1, dim):
                ent[m, m - 1] = math.sqrt(m)
        else:
            ent = np.diag(np.arange(dim, dtype=float))
    guard = 0 if which == "number" else 1
    return FockOperator(dim, ent, guard, exact)


def symmetric_sum_enumerated(k: int, dim: int, exact: bool = True) -> FockOperator:
    """Sum of all distinct orderings of k down and k up ladder operators.

    There are (2k)!/(k!)^2 distinct orderings; each is evaluated as an
    actual operator product, so the result carries guard 2k.  Level
    conservation makes every term diagonal.  Capped at k = 6 (924
    orderings) -- beyond that use :func:`symmetric_sum_closed`.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > _ENUMERATION_CAP:
        raise EnumerationTooLargeError(
            f"enumeration capped at k = {_ENUMERATION_CAP}, got {k}"
        )
    if dim <= 2 * k + 2:
        raise InvalidDimensionError(f"need dim > {2 * k + 2} for k = {k}, got {dim}")
    down = make_ladder(dim, "annihilation", exact)
    up = make_ladder(dim, "creation", exact)
    total = None
    for up_positions in combinations(range(2 * k), k):
        ups = set(up_positions)
        prod = None
        for slot in range(2 * k):
            op = up if slot in ups else down
            prod = op if prod is None else prod @ op
        total = prod if total is None else total + prod
    return total


def symmetric_sum_closed(k: int, dim: int, exact: bool = True) -> FockOperator:
    """Closed form of the completely symmetric ladder sum.

    A polynomial in the number operator:

        sum_{i=0..k} (1/2)^(k-i) * (2k)! / ((i!)^2 (k-i)!) * prod_{j<i} (n - j)

    Diagonal, hence guard 0: polynomials in the number operator never leak
    across the truncation edge.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if dim <= 2 * k:
        raise InvalidDimensionError(f"need dim > {2 * k} for k = {k}, got {dim}")
    fact2k = math.factorial(2 * k)
    diag = []
    for m in range(dim):
        total = Fraction(0)
        for i in range(k + 1):
            coeff = Fraction(fact2k, math.factorial(i) ** 2 * math.factorial(k - i))
            coeff /= Fraction(2) ** (k - i)
            falling = Fraction(1)
            for j in range(i):
                falling *= m - j
            total += coeff * falling
        diag.append(total)
    if exact:
        ent = np.full((dim, dim), Fraction(0), dtype=object)
        for m in range(dim):
            ent[m, m] = diag[m]
    else:
        ent = np.diag(np.array([float(v) for v in diag]))
    return FockOperator(dim, ent, guard=0, exact=exact)


def trusted_equal(a: FockOperator, b: FockOperator, tol: float = 0.0) -> bool:
    """Compare two operators on the overlap of their trusted blocks."""
    td = min(a.trusted_dim, b.trusted_dim)
    if td == 0:
        raise ValueError("no trusted overlap to compare")
    ea, eb = a.entries[:td, :td], b.entries[:td, :td]
    if a.exact and b.exact:
        return bool(np.all(ea == eb))
    fa = ea.astype(float) if a.exact else ea
    fb = eb.astype(float) if b.exact else eb
    return bool(np.allclose(fa, fb, rtol=tol, atol=tol))


@dataclass(frozen=True)
class DensityMatrix:
    """Normalized quantum state in the truncated number basis."""

    dim: int
    entries: np.ndarray

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidDimensionError(f"dim must be >= 1, got {self.dim}")
        if self.entries.shape != (self.dim, self.dim):
            raise ValueError("entries must be square of size dim")
        herm_gap = np.abs(self.entries - self.entries.conj().T).max()
        if herm_gap > _HERM_TOL:
            raise ValueError(f"not Hermitian: max asymmetry {herm_gap:.3e}")
        tr = complex(np.trace(self.entries)).real
        if abs(tr - 1.0) > _TRACE_TOL:
            raise NormalizationError(f"trace {tr!r} differs from 1")
        if np.linalg.eigvalsh(self.entries).min() < -_EIG_TOL:
            raise ValueError("not positive semidefinite")

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.entries))

    def is_diagonal(self, tol: float = 1e-12) -> bool:
        off = self.entries - np.diag(np.diag(self.entries))
        return bool(np.abs(off).max() <= tol)


def diagonal_state(probabilities) -> DensityMatrix:
    p = np.asarray(probabilities, dtype=float)
    return DensityMatrix(p.size, np.diag(p))


def vacuum_state(dim: int) -> DensityMatrix:
    p = np.zeros(dim)
    p[0] = 1.0
    return diagonal_state(p)


def thermal_state(nbar: float, dim: int) -> DensityMatrix:
    """Bose-Einstein diagonal state; pick dim large enough for the tail."""
    if nbar < 0:
        raise ValueError("nbar must be nonnegative")
    m = np.arange(dim)
    p = (nbar / (1.0 + nbar)) ** m / (1.0 + nbar) if nbar > 0 else None
    if p is None:
        return vacuum_state(dim)
    return diagonal_state(p)


def coherent_phase_averaged(nbar: float, dim: int) -> DensityMatrix:
    """Poisson diagonal state: a coherent state with its phase scrambled."""
    if nbar < 0:
        raise ValueError("nbar must be nonnegative")
    if nbar == 0:
        return vacuum_state(dim)
    m = np.arange(dim)
    logp = -nbar + m * math.log(nbar) - np.array(
        [math.lgamma(i + 1.0) for i in range(dim)]
    )
    return diagonal_state(np.exp(logp))


def squeezed_vacuum_phase_averaged(r: float, dim: int) -> DensityMatrix:
    """Even-level diagonal state of a phase-scrambled squeezed vacuum."""
    if r < 0:
        raise ValueError("squeeze parameter must be nonnegative")
    if r == 0:
        return vacuum_state(dim)
    p = np.zeros(dim)
    t = math.tanh(r) ** 2 / 4.0
    for half in range(dim // 2 + dim % 2):
        if 2 * half < dim:
            p[2 * half] = math.comb(2 * half, half) * t**half / math.cosh(r)
    return diagonal_state(p)


def exact_quadrature_moment(
    state: DensityMatrix, k: int, phase_averaged: bool = False
) -> float:
    """Phase-averaged 2k-th centered quadrature moment of a state.

    Evaluates (1/2)^k Tr[rho * S_k] with S_k the closed symmetric ladder
    sum.  Non-diagonal states must opt in via ``phase_averaged`` since
    only their Fock-diagonal part contributes.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if state.dim <= 2 * k + 2:
        raise InvalidDimensionError(
            f"state dim {state.dim} too small for k = {k} (need > {2 * k + 2})"
        )
    if not state.is_diagonal() and not phase_averaged:
        raise ValueError(
            "state has Fock coherences; pass phase_averaged=True to accept "
            "the phase-averaged interpretation"
        )
    s = symmetric_sum_closed(k, state.dim, exact=False)
    return 0.5**k * float(state.populations @ s.diagonal())


def exact_photon_stats(state: DensityMatrix) -> PhotonStats:
    """Exact mean, variance and third central moment of the photocount.

    Refuses states whose weight on the top four levels exceeds 1e-12: the
    truncated moments would silently be wrong.
    """
    p = state.populations
    tail = float(p[max(state.dim - 4, 0) :].sum())
    if tail >= _TAIL_TOL:
        raise TruncationError(
            f"tail mass {tail:.3e} near truncation edge (limit {_TAIL_TOL:.0e}); "
            "increase dim",
            tail_mass=tail,
        )
    m = np.arange(state.dim)
    n1 = float(p @ m)
    n2 = float(p @ m**2)
    n3 = float(p @ m**3)
    var = n2 - n1**2
    skew3 = n3 - 3.0 * n2 * n1 + 2.0 * n1**3
    fano = var / n1 if n1 > 0 else math.nan
    flags = () if n1 > 0 else ("fano_undefined",)
    return PhotonStats(n1, var, skew3, fano, errors=None, flags=flags)


def photon_stats_via_quadratures(state: DensityMatrix) -> PhotonStats:
    """Closed-loop reconstruction: oracle quadrature moments through the
    cumulant inversion of :mod:`photocount.moments`.

    Independent of :func:`exact_photon_stats`; agreement of the two is the
    consistency check between the symmetric-sum identity and the cumulant
    inversion formulas.
    """
    from .moments import MomentSet, cumulants_from_moments, photon_stats_from_cumulants

    m2 = exact_quadrature_moment(state, 1, phase_averaged=True)
    m4 = exact_quadrature_moment(state, 2, phase_averaged=True)
    m6 = exact_quadrature_moment(state, 3, phase_averaged=True)
    # odd moments of a phase-averaged distribution vanish identically
    mset = MomentSet(0.0, m2, 0.0, m4, 0.0, m6, count=1)
    return photon_stats_from_cumulants(cumulants_from_moments(mset))
