"""Entanglement counting from stabilizer group structure.

All quantities are integer counts derived from subgroup dimensions:

* bipartite EPR pairs of a pure state:  n_A - dim S_B^  (equivalently
  half of dim S - dim(S_A^ + S_B^)); equals the von Neumann entropy of
  either reduction,
* GHZ copies extractable from an m-partite pure state (m >= 3):
  dim S - dim S_loc,
* a lower bound on the EPR pairs of a mixed bipartite state, computed on
  a purification with the ancillas as a third party.

Signs never enter any of these; only the symplectic rows matter.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from . import gf2
from .errors import ArityError
from .pauli import party_columns
from .stabilizer import (
    Partition,
    StabilizerGroup,
    local_subgroup_dim,
    purify,
    subgroup_trivial_on,
    subgroup_trivial_on_dim,
)


@dataclass
class EntanglementReport:
    """Flat result record; serializes to the documented JSON keys."""

    epr_pairs: int | None = None
    ghz_count: int | None = None
    mixed_lower_bound: int | None = None
    mixed_lower_bound_raw: float | None = None
    local_log_ranks: dict[str, int] = field(default_factory=dict)
    oracle_value: float | None = None
    oracle_agrees: bool | None = None

    def to_json_dict(self) -> dict:
        out = {
            "epr": self.epr_pairs,
            "ghz": self.ghz_count,
            "mixed_lower_bound_raw": self.mixed_lower_bound_raw,
            "mixed_lower_bound": self.mixed_lower_bound,
            "log_ranks": dict(self.local_log_ranks),
        }
        if self.oracle_value is not None:
            out["oracle_value"] = self.oracle_value
            out["oracle_agrees"] = self.oracle_agrees
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def _require_parties(partition: Partition, *, exactly: int | None = None, at_least: int | None = None):
    if exactly is not None and partition.m != exactly:
        raise ArityError(f"partition has {partition.m} parties, need {exactly}")
    if at_least is not None and partition.m < at_least:
        raise ArityError(f"partition has {partition.m} parties, need at least {at_least}")


def pure_bipartite_entanglement(S: StabilizerGroup, partition: Partition) -> int:
    """EPR pairs extractable from a pure state across a bipartition.

    Computes n_A - dim S_B^ and cross-checks it against the equivalent
    half-form (dim S - dim(S_A^ + S_B^)) / 2 and the A/B-swapped form.
    """
    _require_parties(partition, exactly=2)
    if partition.n != S.n:
        raise ArityError("partition and group qubit counts differ")
    if S.dim != S.n:
        raise ArityError(f"state is not pure (dim {S.dim} on {S.n} qubits)")
    (lab_a, qs_a), (lab_b, qs_b) = partition.parties.items()
    # Work in generator-coefficient space: the subgroup trivial on a party
    # is the left kernel of the generator matrix restricted to its columns,
    # and coefficients map injectively onto group elements.
    rank_a, ker_a = gf2.left_kernel_and_rank(S.sym.take_columns(party_columns(qs_a)))
    rank_b, ker_b = gf2.left_kernel_and_rank(S.sym.take_columns(party_columns(qs_b)))
    dim_ahat = S.dim - rank_a
    dim_bhat = S.dim - rank_b
    e = len(qs_a) - dim_bhat
    e_swapped = len(qs_b) - dim_ahat
    dim_sum = gf2.subspace_sum_dim([ker_a, ker_b])
    half = S.dim - dim_sum
    assert half % 2 == 0 and half // 2 == e == e_swapped, (e, e_swapped, half)
    return e


def ghz_count(S: StabilizerGroup, partition: Partition) -> int:
    """GHZ copies extractable from a pure m-partite state (m >= 3)."""
    _require_parties(partition, at_least=3)
    if partition.n != S.n:
        raise ArityError("partition and group qubit counts differ")
    if S.dim != S.n:
        raise ArityError(f"state is not pure (dim {S.dim} on {S.n} qubits)")
    return S.dim - local_subgroup_dim(S, partition)


def local_log_rank(S: StabilizerGroup, party: Iterable[int]) -> int:
    """log2 rank of the reduced state on ``party``:
    |party| - dim(subgroup trivial on the complement)."""
    qubits = sorted(set(int(q) for q in party))
    for q in qubits:
        if not 0 <= q < S.n:
            raise IndexError(f"qubit {q} out of range for n={S.n}")
    complement = [q for q in range(S.n) if q not in set(qubits)]
    return len(qubits) - subgroup_trivial_on_dim(S, complement)


@dataclass(frozen=True)
class MixedBound:
    """Raw lower bound, its clamped integer form, and the exact count when
    both local ranks are full."""

    raw: float
    value: int
    exact: int | None
    log_ranks: dict[str, int]
    dim_loc: int
    dim_chat: int
    purified_dim: int


def mixed_epr_bound_detail(S: StabilizerGroup, partition: Partition) -> MixedBound:
    """Lower bound on the EPR pairs of a mixed bipartite stabilizer state.

    Purifies S onto k ancillas (an internal third party), then evaluates
    dim S'_loc / 2 - k + [logrank rho_A - n_A + logrank rho_B - n_B] / 2.
    With full local ranks this equals the exact extractable count
    (dim S'_C^ + dim S'_loc - dim S') / 2.
    """
    _require_parties(partition, exactly=2)
    if partition.n != S.n:
        raise ArityError("partition and group qubit counts differ")
    k = S.k
    Sp, _ = purify(S)
    ancillas = list(range(S.n, S.n + k))
    (lab_a, qs_a), (lab_b, qs_b) = partition.parties.items()
    bases = [
        subgroup_trivial_on(Sp, qs_a),
        subgroup_trivial_on(Sp, qs_b),
        subgroup_trivial_on(Sp, ancillas),
    ]
    dim_loc = gf2.subspace_sum_dim(bases)
    # Basis rows from subgroup_trivial_on are independent, so nrows is the dim.
    dim_chat = bases[2].nrows
    r_a = local_log_rank(S, qs_a)
    r_b = local_log_rank(S, qs_b)
    raw_frac = (
        Fraction(dim_loc, 2)
        - k
        + Fraction(r_a - len(qs_a) + r_b - len(qs_b), 2)
    )
    full_rank = r_a == len(qs_a) and r_b == len(qs_b)
    exact = None
    if full_rank:
        exact_frac = Fraction(dim_chat + dim_loc - Sp.dim, 2)
        assert exact_frac.denominator == 1 and exact_frac == raw_frac
        exact = int(exact_frac)
    value = max(0, math.ceil(raw_frac))
    return MixedBound(
        raw=float(raw_frac),
        value=value,
        exact=exact,
        log_ranks={lab_a: r_a, lab_b: r_b},
        dim_loc=dim_loc,
        dim_chat=dim_chat,
        purified_dim=Sp.dim,
    )


def mixed_epr_lower_bound(S: StabilizerGroup, partition: Partition) -> int:
    """Clamped integer form of :func:`mixed_epr_bound_detail`."""
    return mixed_epr_bound_detail(S, partition).value


# ---------------------------------------------------------------------------
# Report builders used by the CLI
# ---------------------------------------------------------------------------


def report_pure(S: StabilizerGroup, partition: Partition) -> EntanglementReport:
    e = pure_bipartite_entanglement(S, partition)
    ranks = {lab: local_log_rank(S, qs) for lab, qs in partition.parties.items()}
    return EntanglementReport(epr_pairs=e, local_log_ranks=ranks)


def report_ghz(S: StabilizerGroup, partition: Partition) -> EntanglementReport:
    g = ghz_count(S, partition)
    ranks = {lab: local_log_rank(S, qs) for lab, qs in partition.parties.items()}
    return EntanglementReport(ghz_count=g, local_log_ranks=ranks)


def report_mixed(S: StabilizerGroup, partition: Partition) -> EntanglementReport:
    detail = mixed_epr_bound_detail(S, partition)
    return EntanglementReport(
        mixed_lower_bound=detail.value,
        mixed_lower_bound_raw=detail.raw,
        local_log_ranks=detail.log_ranks,
    )
