"""Fock-basis bookkeeping and multi-photon amplitudes through linear networks.

A linear-optical network on ``m`` modes is described by an ``m x m`` unitary
``U`` acting on creation operators as ``a_j^dag -> sum_i U[i, j] a_i^dag``.
The amplitude between Fock states is a permanent of a submatrix of ``U``
with rows and columns repeated according to the occupations.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import PhotonNumberError, ResourceLimitError, UnitarityError

UNITARY_ATOL = 1e-10
MAX_BASIS_SIZE = 100_000
MAX_PERMANENT_SIZE = 20


@dataclass(frozen=True, order=True)
class FockState:
    """Photon occupation numbers over a set of modes."""

    occupations: tuple[int, ...]

    def __post_init__(self):
        occ = tuple(int(n) for n in self.occupations)
        if any(n < 0 for n in occ):
            raise ValueError(f"negative occupation in {occ}")
        object.__setattr__(self, "occupations", occ)

    @classmethod
    def of(cls, *occupations: int) -> "FockState":
        return cls(tuple(occupations))

    @property
    def total_photons(self) -> int:
        return sum(self.occupations)

    @property
    def mode_count(self) -> int:
        return len(self.occupations)

    def __len__(self) -> int:
        return len(self.occupations)

    def __str__(self) -> str:
        sep = "," if any(n > 9 for n in self.occupations) else ""
        return "|" + sep.join(str(n) for n in self.occupations) + "⟩"


@dataclass(frozen=True, eq=False)
class ModeUnitary:
    """Single-photon transfer matrix of a lossless network.

    Construction fails with :class:`UnitarityError` unless ``U^dag U = I``
    to within ``UNITARY_ATOL``.
    """

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise UnitarityError(f"mode matrix must be square, got shape {mat.shape}")
        err = unitarity_error(mat)
        if err > UNITARY_ATOL:
            raise UnitarityError(f"matrix is not unitary (max |U^dag U - I| = {err:.3e})")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "ModeUnitary":
        return ModeUnitary(self.matrix.conj().T)

    def __matmul__(self, other: "ModeUnitary") -> "ModeUnitary":
        return ModeUnitary(self.matrix @ other.matrix)

    def __eq__(self, other):
        if not isinstance(other, ModeUnitary):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and bool(np.all(self.matrix == other.matrix))

    def __hash__(self):
        return hash(self.matrix.tobytes())


def unitarity_error(mat: np.ndarray) -> float:
    """Largest entry of ``|U^dag U - I|``."""
    mat = np.asarray(mat)
    return float(np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0]))))


@dataclass(frozen=True)
class AmplitudeVector:
    """Amplitudes over an ordered Fock basis of fixed (m, n)."""

    basis: tuple[FockState, ...]
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (len(self.basis),):
            raise ValueError("amplitudes must align with the basis")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.probabilities())))

    def amplitude(self, state: FockState) -> complex:
        return complex(self.amplitudes[self.index(state)])

    def probability(self, state: FockState) -> float:
        return abs(self.amplitude(state)) ** 2

    def index(self, state: FockState) -> int:
        try:
            return self._index_map()[state]
        except KeyError:
            raise KeyError(f"{state} is not in this basis") from None

    def _index_map(self) -> dict[FockState, int]:
        cache = self.__dict__.get("_idx")
        if cache is None:
            cache = {s: i for i, s in enumerate(self.basis)}
            object.__setattr__(self, "_idx", cache)
        return cache

    def as_dict(self) -> dict[FockState, complex]:
        return {s: complex(a) for s, a in zip(self.basis, self.amplitudes)}


def _compositions(n: int, m: int) -> Iterator[tuple[int, ...]]:
    # descending lexicographic order on the occupation tuple
    if m == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, m - 1):
            yield (first,) + rest


def basis_size(m: int, n: int) -> int:
    return math.comb(m + n - 1, n)


def enumerate_fock_basis(m: int, n: int) -> list[FockState]:
    """All ``n``-photon states over ``m`` modes, lexicographically descending.

    >>> [str(s) for s in enumerate_fock_basis(2, 2)]
    ['|20⟩', '|11⟩', '|02⟩']
    """
    if m < 1 or n < 0:
        raise ValueError(f"need m >= 1 and n >= 0, got m={m}, n={n}")
    return [FockState(c) for c in _compositions(n, m)]


def permanent(mat: np.ndarray) -> complex:
    """Permanent by Ryser's formula with Gray-code subset iteration.

    Runs in ``O(2^k k)`` for a ``k x k`` matrix; ``k`` is capped at
    ``MAX_PERMANENT_SIZE``.
    """
    a = np.asarray(mat, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {a.shape}")
    k = a.shape[0]
    if k > MAX_PERMANENT_SIZE:
        raise ResourceLimitError(f"permanent of a {k}x{k} matrix exceeds the size cap {MAX_PERMANENT_SIZE}")
    if k == 0:
        return 1.0 + 0j
    if k == 1:
        return complex(a[0, 0])
    if k == 2:
        return complex(a[0, 0] * a[1, 1] + a[0, 1] * a[1, 0])

    cols = [a[:, j].copy() for j in range(k)]
    row_sums = np.zeros(k, dtype=complex)
    in_subset = [False] * k
    size = 0
    total = 0j
    for g in range(1, 1 << k):
        j = (g & -g).bit_length() - 1  # bit flipped between Gray codes g-1 and g
        if in_subset[j]:
            row_sums -= cols[j]
            size -= 1
        else:
            row_sums += cols[j]
            size += 1
        in_subset[j] = not in_subset[j]
        term = np.prod(row_sums)
        total += -term if (k - size) & 1 else term
    return complex(total)


def naive_permanent(mat: np.ndarray) -> complex:
    """Sum over all ``k!`` permutations. Reference for small matrices only."""
    a = np.asarray(mat, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {a.shape}")
    k = a.shape[0]
    rows = np.arange(k)
    return complex(sum(np.prod(a[rows, list(p)]) for p in itertools.permutations(range(k))))


def _as_matrix(u) -> np.ndarray:
    return u.matrix if isinstance(u, ModeUnitary) else np.asarray(u, dtype=complex)


def _mode_list(state: FockState) -> np.ndarray:
    return np.repeat(np.arange(state.mode_count), state.occupations)


def _factorial_norm(state: FockState) -> float:
    return math.prod(math.factorial(n) for n in state.occupations)


def transition_amplitude(u: ModeUnitary, inp: FockState, out: FockState) -> complex:
    """``<out| U |inp>`` for the Fock-space action of the mode unitary ``u``."""
    mat = _as_matrix(u)
    m = mat.shape[0]
    if inp.mode_count != m or out.mode_count != m:
        raise ValueError(f"state mode counts ({inp.mode_count}, {out.mode_count}) do not match U ({m})")
    if inp.total_photons != out.total_photons:
        raise PhotonNumberError(
            f"linear optics conserves photon number: {inp} has {inp.total_photons}, "
            f"{out} has {out.total_photons}"
        )
    sub = mat[np.ix_(_mode_list(out), _mode_list(inp))]
    if not np.any(sub):
        return 0j
    return permanent(sub) / math.sqrt(_factorial_norm(inp) * _factorial_norm(out))


def evolve(u: ModeUnitary, inp: FockState, max_basis: int = MAX_BASIS_SIZE) -> AmplitudeVector:
    """Output amplitudes over the full ``(m, n)`` basis for a Fock input."""
    mat = _as_matrix(u)
    m, n = mat.shape[0], inp.total_photons
    size = basis_size(m, n)
    if size > max_basis:
        raise ResourceLimitError(f"basis for m={m}, n={n} has {size} states (limit {max_basis})")
    basis = enumerate_fock_basis(m, n)
    amps = [transition_amplitude(mat, inp, out) for out in basis]
    return AmplitudeVector(tuple(basis), np.array(amps))


def evolve_superposition(
    u: ModeUnitary, components: Sequence[tuple[complex, FockState]], max_basis: int = MAX_BASIS_SIZE
) -> AmplitudeVector:
    """Evolve a linear combination of same-``n`` Fock states."""
    if not components:
        raise ValueError("empty superposition")
    if len({state.total_photons for _, state in components}) != 1:
        raise PhotonNumberError("superposition components must share a photon number")
    result = None
    for coeff, state in components:
        vec = evolve(u, state, max_basis=max_basis)
        result = coeff * vec.amplitudes if result is None else result + coeff * vec.amplitudes
        basis = vec.basis
    return AmplitudeVector(basis, result)
