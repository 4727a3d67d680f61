"""Fixed-photon-number Fock states and passive linear-optical elements.

The state space of ``n`` photons in ``M`` modes is spanned by occupation
tuples ``(k_1, ..., k_M)`` with ``sum(k) == n``, kept in descending
lexicographic order; for two photons in two modes the basis reads
``(2, 0), (1, 1), (0, 2)``.  A phase shifter multiplies the amplitude of
a basis state carrying ``k`` photons in its mode by ``exp(i*k*phi)``.
Any other passive element is given by its ``M x M`` mode matrix ``U``
and lifted to the sector through matrix permanents:

    <S| lift(U) |T> = per(U_{S,T}) / sqrt(prod_i s_i! * prod_j t_j!)

where ``U_{S,T}`` repeats row ``i`` of ``U`` ``s_i`` times and column
``j`` ``t_j`` times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations

import numpy as np

# Basis sizes above this are refused; C(n+M-1, n) grows fast and a dense
# lifted matrix at 1e6 entries per side would not fit in memory anyway.
BASIS_CAP = 1_000_000

Occupation = tuple[int, ...]


def _occupations(modes: int, photons: int):
    """Yield occupation tuples in descending lexicographic order."""
    if modes == 1:
        yield (photons,)
        return
    for k in range(photons, -1, -1):
        for rest in _occupations(modes - 1, photons - k):
            yield (k,) + rest


class FockSector:
    """Occupation basis bookkeeping for a fixed photon number.

    Attributes
    ----------
    modes : int
        Number of optical modes ``M``.
    photons : int
        Total photon number ``n``.
    basis : tuple[Occupation, ...]
        All occupations summing to ``n``, descending lexicographic.
    occupations : np.ndarray
        ``(size, modes)`` integer array mirroring ``basis`` (read-only).
    """

    def __init__(self, modes: int, photons: int, max_size: int = BASIS_CAP):
        if modes < 1:
            raise ValueError("need at least one mode")
        if photons < 0:
            raise ValueError("photon number must be non-negative")
        size = math.comb(photons + modes - 1, photons)
        if size > max_size:
            raise ValueError(
                f"sector basis for {photons} photons in {modes} modes has "
                f"{size} occupations, above the cap of {max_size}"
            )
        self.modes = modes
        self.photons = photons
        self.basis: tuple[Occupation, ...] = tuple(_occupations(modes, photons))
        self.size = len(self.basis)
        self.occupations = np.array(self.basis, dtype=np.int64).reshape(self.size, modes)
        self.occupations.flags.writeable = False
        self._index = {occ: i for i, occ in enumerate(self.basis)}

    def index_of(self, occupation) -> int:
        """Position of an occupation tuple in the basis."""
        occ = tuple(int(k) for k in occupation)
        try:
            return self._index[occ]
        except KeyError:
            raise ValueError(
                f"occupation {occ} is not in the {self.photons}-photon, "
                f"{self.modes}-mode sector"
            ) from None

    def __contains__(self, occupation) -> bool:
        try:
            self.index_of(occupation)
            return True
        except (ValueError, TypeError):
            return False

    def __eq__(self, other):
        return (
            isinstance(other, FockSector)
            and other.modes == self.modes
            and other.photons == self.photons
        )

    def __hash__(self):
        return hash((self.modes, self.photons))

    def __repr__(self):
        return f"FockSector(modes={self.modes}, photons={self.photons}, size={self.size})"


@lru_cache(maxsize=None)
def sector_basis(modes: int, photons: int, max_size: int = BASIS_CAP) -> FockSector:
    """Enumerate the fixed-photon-number basis for ``photons`` in ``modes``."""
    return FockSector(modes, photons, max_size)


@dataclass
class StateVector:
    """Complex amplitudes over a sector basis."""

    sector: FockSector
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.sector.size,):
            raise ValueError(
                f"expected {self.sector.size} amplitudes, got shape {amps.shape}"
            )
        self.amplitudes = amps

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))


def basis_state(sector: FockSector, occupation) -> StateVector:
    amps = np.zeros(sector.size, dtype=complex)
    amps[sector.index_of(occupation)] = 1.0
    return StateVector(sector, amps)


def apply_phase_shifter(state: StateVector, mode: int, phase: float) -> StateVector:
    """Phase ``exp(i*k*phase)`` on each basis state with ``k`` photons in ``mode``."""
    if not 0 <= mode < state.sector.modes:
        raise ValueError(f"mode {mode} out of range for {state.sector.modes} modes")
    counts = state.sector.occupations[:, mode]
    return StateVector(state.sector, state.amplitudes * np.exp(1j * phase * counts))


def permanent(matrix) -> complex:
    """Permanent of a square complex matrix.

    Permutation sum up to 4x4, Ryser inclusion-exclusion above.  All
    matrices met here are small (k <= photon number), so exponential cost
    is fine.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {a.shape}")
    k = a.shape[0]
    if k == 0:
        return complex(1.0)
    if k <= 4:
        rows = range(k)
        return complex(sum(math.prod(a[i, p[i]] for i in rows) for p in permutations(rows)))
    return _ryser(a)


def _ryser(a: np.ndarray) -> complex:
    k = a.shape[0]
    total = 0.0 + 0.0j
    for mask in range(1, 1 << k):
        cols = [j for j in range(k) if (mask >> j) & 1]
        total += (-1) ** len(cols) * a[:, cols].sum(axis=1).prod()
    return complex((-1) ** k * total)


def _occ_norm(occ: Occupation) -> float:
    return math.sqrt(math.prod(math.factorial(k) for k in occ))


def lift_mode_unitary(u, sector: FockSector, atol: float = 1e-12) -> np.ndarray:
    """Lift an ``M x M`` mode unitary to the sector basis.

    Parameters
    ----------
    u : array_like
        Unitary mode matrix; checked against ``atol``.
    sector : FockSector
        Target sector.
    atol : float
        Max tolerated elementwise deviation of ``u^H u`` from identity.

    Returns
    -------
    np.ndarray
        ``(size, size)`` complex matrix acting on amplitude vectors.
    """
    u = np.asarray(u, dtype=complex)
    m = sector.modes
    if u.shape != (m, m):
        raise ValueError(f"mode matrix must be {m}x{m}, got {u.shape}")
    deviation = np.max(np.abs(u.conj().T @ u - np.eye(m)))
    if deviation > atol:
        raise ValueError(f"mode matrix is not unitary (max deviation {deviation:.3e})")

    reps = [np.repeat(np.arange(m), occ) for occ in sector.basis]
    norms = np.array([_occ_norm(occ) for occ in sector.basis])
    lifted = np.empty((sector.size, sector.size), dtype=complex)
    for b, col_rep in enumerate(reps):
        cols = u[:, col_rep]
        for a, row_rep in enumerate(reps):
            lifted[a, b] = permanent(cols[row_rep, :]) / (norms[a] * norms[b])
    return lifted


def outcome_probability(state: StateVector, outcome) -> float:
    """Probability of measuring the photon pattern ``outcome``."""
    idx = state.sector.index_of(outcome)
    return float(abs(state.amplitudes[idx]) ** 2)
