import math

import numpy as np
import pytest

from stabkit import gf2, oracle
from stabkit.errors import ConfigError, ParseError, ValidityError
from stabkit.pauli import is_identity_on, multiply, parse_pauli
from stabkit.stabilizer import (
    Partition,
    StabilizerGroup,
    canonical_form,
    diagnose,
    dumps,
    loads,
    local_subgroup_dim,
    purify,
    sample_uniform,
    subgroup_trivial_on,
    subgroup_trivial_on_dim,
    validate,
)

BELL = ["XX", "ZZ"]
GHZ3 = ["XXX", "ZZI", "IZZ"]


def make(strings, n=None, check=True):
    return StabilizerGroup.from_generators([parse_pauli(s) for s in strings], n=n, check=check)


# -- validation --------------------------------------------------------------


def test_validate_bell():
    assert validate(make(BELL))


def test_validate_anticommuting():
    S = make(["X", "Z"], check=False)
    assert not validate(S)
    assert diagnose(S) == "anticommuting"
    with pytest.raises(ValidityError):
        make(["X", "Z"])


def test_validate_dependent_triple_yields_minus_identity():
    S = make(["XX", "YY", "ZZ"], check=False)
    assert diagnose(S) == "dependent"
    # All 8 signed products: the dependency manifests as -I in the closure.
    gens = S.generators
    products = []
    for mask in range(8):
        acc = parse_pauli("II")
        for i in range(3):
            if (mask >> i) & 1:
                acc = multiply(acc, gens[i])
        products.append(acc)
    assert any(p.is_identity() and p.phase_exponent == 2 for p in products)


def test_validate_bad_phase():
    bad = StabilizerGroup(
        1,
        make(["X"]).sym,
        np.array([1], dtype=np.uint8),  # iX does not square to +I
        check=False,
    )
    assert diagnose(bad) == "bad-phase"


def test_empty_group_is_valid():
    S = StabilizerGroup.from_generators([], n=3)
    assert validate(S) and S.dim == 0 and S.k == 3


# -- subgroup structure -------------------------------------------------------


def test_subgroup_trivial_on_ghz():
    S = make(GHZ3)
    basis = subgroup_trivial_on(S, [0])
    assert basis.nrows == 1
    elem = parse_pauli("IZZ").symplectic()
    assert basis.row(0) == elem


def test_subgroup_trivial_on_bell_empty():
    assert subgroup_trivial_on(make(BELL), [1]).nrows == 0


def test_subgroup_trivial_on_product_state():
    assert subgroup_trivial_on_dim(make(["ZI", "IZ"]), [1]) == 1


def test_subgroup_trivial_on_empty_party_is_whole_group():
    S = make(GHZ3)
    assert subgroup_trivial_on(S, []).nrows == S.dim


def test_subgroup_matches_enumeration():
    rng = np.random.default_rng(10)
    for _ in range(40):
        n = int(rng.integers(2, 7))
        k = int(rng.integers(0, n))
        S = sample_uniform(n, k, rng)
        nq = int(rng.integers(1, n + 1))
        party = sorted(rng.choice(n, size=nq, replace=False).tolist())
        basis = subgroup_trivial_on(S, party)
        count = sum(1 for e in oracle.enumerate_group(S) if is_identity_on(e, party))
        assert 2**basis.nrows == count
        for i in range(basis.nrows):
            from stabkit.pauli import PauliOperator

            elem = PauliOperator.from_symplectic(basis.row(i), 0)
            assert is_identity_on(elem, party)


def test_subgroup_matches_enumeration_at_dim_ten():
    # One deep case: 2^10-element closure against the linear-algebra answer.
    rng = np.random.default_rng(17)
    S = sample_uniform(10, 0, rng)
    party = [0, 3, 7]
    basis = subgroup_trivial_on(S, party)
    count = sum(1 for e in oracle.enumerate_group(S) if is_identity_on(e, party))
    assert 2**basis.nrows == count


def test_local_subgroup_dim_examples():
    assert local_subgroup_dim(make(GHZ3), Partition(3, "ABC")) == 2
    assert local_subgroup_dim(make(["ZI", "IZ"]), Partition(2, "AB")) == 2
    assert local_subgroup_dim(make(BELL), Partition(2, "AB")) == 0


def test_dim_of_trivially_acting_subgroup_bounded():
    rng = np.random.default_rng(11)
    for _ in range(30):
        n = int(rng.integers(1, 8))
        S = sample_uniform(n, int(rng.integers(0, n + 1)), rng)
        party = [0]
        assert subgroup_trivial_on_dim(S, party) <= S.dim


# -- canonical form -----------------------------------------------------------


def test_canonical_form_same_group():
    a = canonical_form(make(["-YY", "ZZ"]))
    b = canonical_form(make(BELL))
    assert a.key() == b.key()
    # Generated 4-element sets coincide.
    ea = {str(e) for e in oracle.enumerate_group(a)}
    eb = {str(e) for e in oracle.enumerate_group(make(BELL))}
    assert ea == eb


def test_canonical_form_idempotent_and_fixed_point():
    rng = np.random.default_rng(12)
    for _ in range(25):
        S = sample_uniform(int(rng.integers(1, 7)), 0, rng)
        c = canonical_form(S)
        assert canonical_form(c).key() == c.key()
        assert {str(e) for e in oracle.enumerate_group(c)} == {
            str(e) for e in oracle.enumerate_group(S)
        }


def test_group_equality_ignores_presentation():
    assert make(["-YY", "ZZ"]) == make(BELL)
    assert make(["ZZ", "XX"]) == make(BELL)
    assert make(["-XX", "ZZ"]) != make(BELL)


# -- sampling -----------------------------------------------------------------


def test_sample_dimensions_and_validity():
    rng = np.random.default_rng(13)
    for _ in range(40):
        n = int(rng.integers(1, 10))
        k = int(rng.integers(0, n + 1))
        S = sample_uniform(n, k, rng)
        assert S.n == n and S.dim == n - k
        assert validate(S)


def test_sample_bad_k():
    with pytest.raises(ConfigError):
        sample_uniform(3, 4, np.random.default_rng(0))


def test_sample_deterministic_per_seed():
    a = sample_uniform(6, 2, np.random.default_rng(99)).key()
    b = sample_uniform(6, 2, np.random.default_rng(99)).key()
    assert a == b


def test_sum_local_dim_lower_bound_tripartite():
    # dim S_A^ + dim S_B^ + dim S_C^ >= n on every sampled pure state.
    rng = np.random.default_rng(14)
    for _ in range(60):
        sizes = rng.integers(1, 4, size=3)
        n = int(sizes.sum())
        labels = ["A"] * sizes[0] + ["B"] * sizes[1] + ["C"] * sizes[2]
        part = Partition(n, labels)
        S = sample_uniform(n, 0, rng)
        total = sum(subgroup_trivial_on_dim(S, qs) for qs in part.parties.values())
        assert total >= n


# -- purification -------------------------------------------------------------


def test_purify_pure_input_unchanged():
    S = make(BELL)
    out, k = purify(S)
    assert out is S and k == 0


def test_purify_maximally_mixed_qubit_is_epr():
    S = StabilizerGroup.from_generators([], n=1)
    P, k = purify(S)
    assert k == 1 and P.n == 2 and P.dim == 2 and validate(P)
    # One EPR pair across system|ancilla.
    from stabkit.entanglement import pure_bipartite_entanglement

    assert pure_bipartite_entanglement(P, Partition(2, "AB")) == 1


def test_purify_reduction_matches_oracle():
    rng = np.random.default_rng(15)
    cases = [make(["ZI"])]
    for _ in range(15):
        n = int(rng.integers(1, 5))
        k = int(rng.integers(0, n + 1))
        cases.append(sample_uniform(n, k, rng))
    for S in cases:
        P, k = purify(S)
        assert P.dim == S.n + k and validate(P)
        state = oracle.state_from_stabilizer(P)
        red = oracle.reduced_density(state, range(S.n), P.n)
        target = oracle.state_from_stabilizer(S)
        if isinstance(target, oracle.DenseState):
            target = np.outer(target.amplitudes, target.amplitudes.conj())
        assert np.allclose(red, target, atol=1e-9)


def test_purify_log_rank_on_original_system():
    rng = np.random.default_rng(16)
    for _ in range(20):
        n = int(rng.integers(1, 7))
        k = int(rng.integers(0, n + 1))
        S = sample_uniform(n, k, rng)
        P, kk = purify(S)
        assert kk == k
        r = n - subgroup_trivial_on_dim(P, range(n, n + k))
        assert r == k


def test_purify_invalid_input():
    with pytest.raises(ValidityError):
        purify(make(["X", "Z"], check=False))


# -- partitions ---------------------------------------------------------------


def test_partition_parse_ranges():
    p = Partition.parse("0-4:A,5-9:B")
    assert p.n == 10 and p.m == 2
    assert p.party("A") == tuple(range(5))
    assert p.party("B") == tuple(range(5, 10))


def test_partition_parse_singletons_and_order():
    p = Partition.parse("2:C,0:A,1:B")
    assert p.n == 3 and p.m == 3
    assert p.labels == ("A", "B", "C")


def test_partition_overlap_rejected():
    with pytest.raises(ParseError):
        Partition.parse("0-2:A,2-3:B")


def test_partition_gap_rejected():
    with pytest.raises(ParseError):
        Partition.parse("0:A,2:B")


def test_partition_wrong_total_rejected():
    with pytest.raises(ParseError):
        Partition.parse("0-1:A", n=3)


def test_partition_from_sizes():
    p = Partition.from_sizes([("A", 2), ("B", 3)])
    assert p.n == 5 and p.party_sizes() == {"A": 2, "B": 3}
    with pytest.raises(ConfigError):
        Partition.from_sizes([("A", 0)])


# -- text format --------------------------------------------------------------


def test_text_round_trip():
    S = make(GHZ3)
    assert loads(dumps(S)).key() == S.key()


def test_text_round_trip_signs():
    S = make(["-XX", "ZZ"])
    text = dumps(S)
    assert "-XX" in text
    assert loads(text).key() == S.key()


def test_loads_empty_group_needs_header():
    S = loads("n=3\n")
    assert S.dim == 0 and S.n == 3
    with pytest.raises(ParseError):
        loads("")


def test_loads_rejects_mixed_lengths():
    with pytest.raises(ParseError):
        loads("+XX\n+ZZZ\n")


def test_loads_reports_line_numbers():
    with pytest.raises(ParseError) as exc:
        loads("n=2\n+XX\n+Q?\n")
    assert exc.value.line == 3


def test_loads_comments_and_blank_lines():
    S = loads("# bell pair\nn=2\n\n+XX\n+ZZ  # body\n")
    assert S.key() == make(BELL).key()