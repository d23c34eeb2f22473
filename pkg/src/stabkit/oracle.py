"""Small-instance brute-force ground truth.

Dense statevector/density-matrix construction, partial traces, entropies,
and exhaustive enumerations.  Everything here is deliberately simple and
slow; size caps keep the whole oracle suite in the seconds range.

Basis convention: qubit 0 is the most significant bit of the computational
index, matching the left-to-right reading of the Pauli text format.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import gf2
from .clifford import CliffordElement
from .errors import CapacityError, ValidityError
from .gf2 import BitMatrix
from .pauli import PauliOperator, multiply, omega_matrix
from .stabilizer import StabilizerGroup, validate

DENSE_CAP = 12
ENUM_CAP = 16

_I4 = 1j ** np.arange(4)


@dataclass(frozen=True)
class DenseState:
    """A pure state as a complex amplitude vector."""

    amplitudes: np.ndarray
    n: int

    def __post_init__(self):
        norm = float(np.linalg.norm(self.amplitudes))
        if abs(norm - 1.0) > 1e-12:
            raise ValidityError(f"state is not normalized (norm {norm})")


def _masks(P: PauliOperator) -> tuple[int, int]:
    n = P.n
    xm = zm = 0
    for q, (xb, zb) in enumerate(zip(P.x.bits(), P.z.bits())):
        if xb:
            xm |= 1 << (n - 1 - q)
        if zb:
            zm |= 1 << (n - 1 - q)
    return xm, zm


def apply_pauli_to_vector(P: PauliOperator, psi: np.ndarray) -> np.ndarray:
    """Dense action of ``i^p X^x Z^z`` on an amplitude vector."""
    n = P.n
    if psi.shape != (2**n,):
        raise ValidityError("vector length does not match qubit count")
    xm, zm = _masks(P)
    idx = np.arange(2**n)
    src = idx ^ xm
    signs = 1.0 - 2.0 * (np.bitwise_count(src & zm) & 1)
    return _I4[P.phase_exponent] * signs * psi[src]


def dense_pauli_matrix(P: PauliOperator) -> np.ndarray:
    """The full 2^n x 2^n complex matrix of the operator."""
    if P.n > DENSE_CAP:
        raise CapacityError(f"n={P.n} exceeds the dense cap {DENSE_CAP}")
    dim = 2**P.n
    out = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[j] = 1.0
        out[:, j] = apply_pauli_to_vector(P, e)
    return out


def state_from_stabilizer(S: StabilizerGroup, cap: int = DENSE_CAP):
    """The stabilized state: a :class:`DenseState` when pure (dim = n),
    otherwise the rank-2^k density matrix as an ndarray.

    Applies the projector (I + g)/2 of every generator to a generic vector
    (pure case) or the identity (mixed case) and normalizes.
    """
    if S.n > cap:
        raise CapacityError(f"n={S.n} exceeds the dense cap {cap}")
    if not validate(S):
        raise ValidityError("cannot build the state of an invalid group")
    dim = 2**S.n
    gens = S.generators
    if S.dim == S.n:
        rng = np.random.default_rng(0xC0FFEE)
        psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        for g in gens:
            psi = (psi + apply_pauli_to_vector(g, psi)) / 2.0
        norm = np.linalg.norm(psi)
        if norm < 1e-9:
            raise ValidityError("projector annihilated the probe vector")
        return DenseState(psi / norm, S.n)
    rho = np.eye(dim, dtype=complex)
    for g in gens:
        rho = (rho + np.stack([apply_pauli_to_vector(g, col) for col in rho.T], axis=1)) / 2.0
    tr = float(np.trace(rho).real)
    if tr < 1e-9:
        raise ValidityError("projector has zero trace")
    return rho / tr


def reduced_density(state, party: Iterable[int], n: int | None = None) -> np.ndarray:
    """Partial trace onto ``party`` for a DenseState, vector, or density matrix."""
    if isinstance(state, DenseState):
        n = state.n
        psi = state.amplitudes
    elif state.ndim == 1:
        if n is None:
            n = int(round(np.log2(state.shape[0])))
        psi = state
    else:
        if n is None:
            n = int(round(np.log2(state.shape[0])))
        psi = None
    party = sorted(set(int(q) for q in party))
    for q in party:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for n={n}")
    rest = [q for q in range(n) if q not in party]
    a, r = len(party), len(rest)
    if psi is not None:
        T = psi.reshape((2,) * n).transpose(party + rest).reshape(2**a, 2**r)
        return T @ T.conj().T
    rho = state.reshape((2,) * (2 * n))
    perm = party + rest + [n + q for q in party] + [n + q for q in rest]
    R = rho.transpose(perm).reshape(2**a, 2**r, 2**a, 2**r)
    return np.einsum("irjr->ij", R)


def entropy_of_reduction(state, party: Iterable[int], n: int | None = None) -> float:
    """Von Neumann entropy (base-2) of the reduction onto ``party``."""
    rho = reduced_density(state, party, n)
    evals = np.linalg.eigvalsh(rho)
    evals = np.clip(evals.real, 0.0, None)
    nz = evals[evals > 1e-12]
    return float(-(nz * np.log2(nz)).sum())


def log_rank_of_reduction(state, party: Iterable[int], n: int | None = None) -> int:
    """log2 of the matrix rank of the reduced state (exact power of two for
    stabilizer inputs)."""
    rho = reduced_density(state, party, n)
    evals = np.linalg.eigvalsh(rho)
    r = int((evals > 1e-9).sum())
    lg = int(round(np.log2(r)))
    if 2**lg != r:
        raise ValidityError(f"reduction rank {r} is not a power of two")
    return lg


def is_stabilized_by(state, S: StabilizerGroup, tol: float = 1e-12) -> bool:
    """Check g|psi> = |psi> (pure) or [(I+g)/2] rho = rho (mixed) per generator."""
    if isinstance(state, DenseState):
        psi = state.amplitudes
        return all(
            np.allclose(apply_pauli_to_vector(g, psi), psi, atol=max(tol, 1e-10))
            for g in S.generators
        )
    rho = state
    for g in S.generators:
        grho = np.stack([apply_pauli_to_vector(g, col) for col in rho.T], axis=1)
        if not np.allclose(grho, rho, atol=max(tol, 1e-10)):
            return False
    return True


# ---------------------------------------------------------------------------
# Exhaustive enumerations
# ---------------------------------------------------------------------------


def enumerate_group(S: StabilizerGroup, cap: int = ENUM_CAP) -> list[PauliOperator]:
    """All 2^dim signed elements of the generated group."""
    if S.dim > cap:
        raise CapacityError(f"dim={S.dim} exceeds the enumeration cap {cap}")
    elems = [PauliOperator.identity(S.n)]
    for g in S.generators:
        elems.extend(multiply(e, g) for e in list(elems))
    return elems


def group_element_vectors(elems: Sequence[PauliOperator]) -> BitMatrix:
    return BitMatrix.from_rows([e.symplectic() for e in elems])


def enumerate_stabilizer_states(n: int) -> list[StabilizerGroup]:
    """Every pure stabilizer group on n qubits (n <= 3).

    Counts follow 2^n * prod_{j<=n} (2^j + 1): 6, 60, 1080 for n = 1, 2, 3.
    """
    if n > 3:
        raise CapacityError("state census capped at n=3")
    nbits = 2 * n
    vectors = list(range(1, 1 << nbits))
    # Precompute pairwise commutation of all (unsigned) nonzero Paulis.
    def omega_int(a: int, b: int) -> int:
        ja = ((a & 0x5555555555555555) << 1) | ((a >> 1) & 0x5555555555555555)
        return bin(ja & b).count("1") & 1

    subspaces: set[frozenset[int]] = set()

    def extend(basis: list[int], span: set[int]):
        if len(basis) == n:
            subspaces.add(frozenset(span))
            return
        for v in vectors:
            if v in span:
                continue
            if any(omega_int(v, b) for b in basis):
                continue
            new_span = set(span)
            for s in list(span):
                new_span.add(s ^ v)
            extend(basis + [v], new_span)

    extend([], {0})
    groups: list[StabilizerGroup] = []
    for span in sorted(subspaces, key=lambda s: tuple(sorted(s))):
        members = sorted(span - {0})
        basis: list[int] = []
        acc = BitMatrix.zeros(0, nbits)
        for v in members:
            cand = BitMatrix.from_ints(basis + [v], nbits)
            if gf2.rank(cand) > len(basis):
                basis.append(v)
            if len(basis) == n:
                break
        rows = BitMatrix.from_ints(basis, nbits)
        for signbits in range(2**n):
            signs = np.array([(signbits >> i) & 1 for i in range(n)], dtype=np.uint8)
            base = np.array(
                [PauliOperator.from_symplectic(rows.row(i), 0).phase_exponent for i in range(n)],
                dtype=np.uint8,
            )
            groups.append(StabilizerGroup(n, rows, (base + 2 * signs) & 3, check=False))
    return groups


def enumerate_symplectic_matrices(n: int) -> list[BitMatrix]:
    """All 2n x 2n binary matrices preserving the symplectic form (n <= 2).

    Returned in image-rows form (row j = image of generator j).
    """
    if n > 2:
        raise CapacityError("symplectic census capped at n=2")
    nbits = 2 * n
    idx = np.arange(nbits)
    expected = ((idx[:, None] ^ 1) == idx[None, :]).astype(np.uint8)
    out = []
    for code in range(1 << (nbits * nbits)):
        rows = [(code >> (nbits * i)) & ((1 << nbits) - 1) for i in range(nbits)]
        if 0 in rows:
            continue
        M = BitMatrix.from_ints(rows, nbits)
        if np.array_equal(omega_matrix(M.words, M.words), expected):
            out.append(M)
    return out


def brute_force_clifford_distance(c1: CliffordElement, c2: CliffordElement) -> int:
    """Exact metric at n=1: minimize disagreements over all generating pairs
    of the one-qubit Pauli group (phases ignored)."""
    if c1.n != 1 or c2.n != 1:
        raise CapacityError("brute-force distance implemented for n=1 only")

    def act(c: CliffordElement, v: int) -> int:
        img = 0
        for j in range(2):
            if (v >> j) & 1:
                img ^= c.images.row_ints()[j]
        return img

    best = 2
    nonzero = [1, 2, 3]
    for v in nonzero:
        for w in nonzero:
            if v == w:
                continue
            count = int(act(c1, v) != act(c2, v)) + int(act(c1, w) != act(c2, w))
            best = min(best, count)
    return best


def contains_minus_identity(elems: Sequence[PauliOperator]) -> bool:
    return any(e.is_identity() and e.phase_exponent == 2 for e in elems)
