import json
import math
from fractions import Fraction

import numpy as np
import pytest

from stabkit.errors import ConfigError
from stabkit.experiments import (
    BASE2_NOTE,
    ExperimentConfig,
    bound_value,
    purity_mean_fraction,
    run,
    run_concentration,
    run_ghz_multipartite,
    run_ghz_tripartite,
    run_lipschitz,
    run_mixed,
    run_pure_bipartite,
    run_purity,
    trial_rng,
    wilson_upper,
)

# ---------------------------------------------------------------------------
# Analytic bound values, cross-checked by an independent re-evaluation here.
# ---------------------------------------------------------------------------


def test_concentration_bound_at_zero_is_two():
    assert bound_value("clifford-concentration", delta=0.0, n=64).value == 2.0


def test_concentration_bound_dual_evaluation():
    for delta, n in [(1, 64), (4, 64), (16, 64), (2, 10)]:
        mine = bound_value("clifford-concentration", delta=delta, n=n).value
        independent = 2.0 * math.pow(2.0, -(delta * delta) / (64.0 * n))
        assert abs(mine - independent) < 1e-15


def test_pure_epsilon_bound_dual_evaluation():
    # n=128, eps=0.25, alpha=0: exponent is -(128 * 0.0625 / 512) * 1.
    bv = bound_value("pure-tail-epsilon", n=128, epsilon=0.25, alpha=0.0)
    assert bv.applicable
    assert abs(bv.value - 2.0 ** (-(128 * 0.25**2 / 512.0))) < 1e-15
    # With alpha > 0 the exponent shrinks by 2n/(2n + alpha log2 n).
    bv2 = bound_value("pure-tail-epsilon", n=128, epsilon=0.25, alpha=2.0)
    scale = (2 * 128) / (2 * 128 + 2.0 * math.log2(128))
    assert abs(bv2.value - 2.0 ** (-(128 * 0.0625 / 512.0) * scale)) < 1e-15


def test_pure_epsilon_bound_validity_condition():
    bv = bound_value("pure-tail-epsilon", n=4, epsilon=0.25, alpha=0.0)
    assert not bv.applicable and "n >= 2/epsilon" in bv.failed_conditions


def test_ghz3_mean_bound_values():
    bv = bound_value("ghz3-mean-upper", n_a=8, n_b=8, n_c=8)
    assert bv.applicable
    assert abs(bv.value - 3 * 8 / 2**8) < 1e-15
    assert abs(bv.value - 0.09375) < 1e-15
    uneven = bound_value("ghz3-mean-upper", n_a=4, n_b=3, n_c=2)
    expect = 2 / 2**5 + 3 / 2**3 + 4 / 2**1
    assert abs(uneven.value - expect) < 1e-12
    assert not bound_value("ghz3-mean-upper", n_a=1, n_b=1, n_c=5).applicable


def test_ghz_multipartite_bound_dual_evaluation():
    m, n, eps = 4, 6, 0.5
    bv = bound_value("ghzm-tail", m=m, n=n, epsilon=eps)
    k = m // 2
    independent = 2.0 ** (-k * n * (eps**2 / 512.0) * (1 - 1 / k) ** 2 * (1 - 1 / m))
    assert abs(bv.value - independent) < 1e-15
    sub = bound_value("ghzm-tail-sub", m=6, n=n, epsilon=eps, m_prime=4)
    assert abs(sub.value - 2.0 ** (-n * eps**2 / (64.0 * 6))) < 1e-15


def test_mixed_sandwich_values():
    lower = bound_value("mixed-mean-lower", n=16, alpha=0.0, beta=1.0, k=16)
    upper = bound_value("mixed-mean-upper", n=16, alpha=0.0, beta=1.0)
    assert abs(lower.value - (8 - 2.0**-16 - 1)) < 1e-12
    assert upper.value == 8.0


def test_mixed_tail_dual_evaluation():
    n, alpha, beta, eps = 32, 0.0, 1.0, 0.5
    bv = bound_value("mixed-tail", n=n, alpha=alpha, beta=beta, epsilon=eps)
    independent = 2.0 * 2.0 ** (-(n * eps**2 * (1 - beta / 2) ** 2 / 3200.0))
    assert abs(bv.value - independent) < 1e-15


def test_purity_formula():
    assert purity_mean_fraction(1, 1) == Fraction(4, 5)
    assert purity_mean_fraction(8, 8) == Fraction(2**8 + 2**8, 2**16 + 1)


def test_unknown_theorem():
    with pytest.raises(ConfigError):
        bound_value("no-such-bound", x=1)


def test_wilson_upper_monotone():
    assert wilson_upper(0, 100) < wilson_upper(5, 100) < wilson_upper(50, 100)
    assert wilson_upper(100, 100) == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# Runners
# ---------------------------------------------------------------------------


def test_exhaustive_purity_exact():
    rep = run_purity(ExperimentConfig(kind="purity", n_a=1, n_b=1, exhaustive=True, seed=0))
    assert rep.extra["exact_mean"] == "4/5"
    assert rep.trials == 60
    assert rep.all_passed()


def test_exhaustive_pure_mean():
    rep = run_pure_bipartite(
        ExperimentConfig(kind="pure-bipartite", n_a=1, n_b=1, exhaustive=True, seed=0)
    )
    # 24 of the 60 two-qubit stabilizer states are entangled.
    assert abs(rep.empirical_mean - 0.4) < 1e-15
    assert rep.all_passed()


def test_pure_bipartite_small_run():
    cfg = ExperimentConfig(
        kind="pure-bipartite", n_a=4, n_b=4, trials=400, seed=5, delta_grid=(1, 2), epsilon=0.5
    )
    rep = run_pure_bipartite(cfg)
    assert rep.all_passed()
    assert sum(rep.histogram.values()) == 400
    assert {r["form"] for r in rep.tail_table} == {"below-mean", "below-n(1-eps)"}
    assert BASE2_NOTE in rep.notes


def test_histogram_stats_consistency():
    rep = run_pure_bipartite(
        ExperimentConfig(kind="pure-bipartite", n_a=3, n_b=3, trials=300, seed=9)
    )
    values = []
    for key, count in rep.histogram.items():
        values.extend([float(key)] * count)
    assert abs(np.mean(values) - rep.empirical_mean) < 1e-12
    assert abs(np.var(values, ddof=1) - rep.empirical_variance) < 1e-12
    assert abs(math.sqrt(rep.empirical_variance / rep.trials) - rep.std_error) < 1e-15


def test_determinism_bit_identical():
    cfg = lambda: ExperimentConfig(kind="pure-bipartite", n_a=4, n_b=4, trials=120, seed=3)
    a = run_pure_bipartite(cfg()).numerical_content()
    b = run_pure_bipartite(cfg()).numerical_content()
    assert a == b


def test_thread_count_does_not_change_content():
    base = ExperimentConfig(kind="pure-bipartite", n_a=4, n_b=4, trials=120, seed=3)
    threaded = ExperimentConfig(
        kind="pure-bipartite", n_a=4, n_b=4, trials=120, seed=3, threads=4
    )
    a = json.loads(run_pure_bipartite(base).numerical_content())
    b = json.loads(run_pure_bipartite(threaded).numerical_content())
    a["config"].pop("threads")
    b["config"].pop("threads")
    assert a == b


def test_trial_rng_streams_are_stable_and_disjoint():
    a = trial_rng(7, 0).integers(0, 2**63, size=4).tolist()
    b = trial_rng(7, 0).integers(0, 2**63, size=4).tolist()
    c = trial_rng(7, 1).integers(0, 2**63, size=4).tolist()
    assert a == b and a != c


def test_concentration_matches_pure_mean_same_seed():
    pure = run_pure_bipartite(
        ExperimentConfig(kind="pure-bipartite", n_a=5, n_b=5, trials=150, seed=11)
    )
    conc = run_concentration(
        ExperimentConfig(kind="concentration", n_a=5, n_b=5, trials=150, seed=11)
    )
    assert conc.empirical_mean == pure.empirical_mean
    assert conc.all_passed()


def test_concentration_custom_probe():
    from stabkit import clifford as cl

    fixed = {}

    def probe(c):
        # distance to a fixed element is 1-Lipschitz by the triangle inequality
        ref = fixed.setdefault(c.n, cl.identity(c.n))
        return float(cl.distance(c, ref))

    rep = run_concentration(
        ExperimentConfig(kind="concentration", n_a=2, n_b=2, trials=150, seed=2),
        probe=probe,
    )
    assert rep.extra["probe"] == "custom"
    assert rep.all_passed()


def test_ghz_tripartite_small_sizes_pass():
    rep = run_ghz_tripartite(
        ExperimentConfig(kind="ghz-tripartite", n_a=2, n_b=2, n_c=2, trials=300, seed=8)
    )
    assert rep.pass_flags["sum_local_dim_bound"]
    assert rep.pass_flags["support_in_range"]
    assert rep.all_passed()
    assert "inclusion_exclusion_violations" in rep.extra


def test_ghz_tripartite_triangle_violation():
    with pytest.raises(ConfigError):
        run_ghz_tripartite(
            ExperimentConfig(kind="ghz-tripartite", n_a=1, n_b=1, n_c=5, trials=10, seed=1)
        )


def test_ghz_multipartite_tails():
    rep = run_ghz_multipartite(
        ExperimentConfig(
            kind="ghz-multipartite", m=5, party_size=2, trials=120, seed=4, epsilon=0.5
        )
    )
    assert rep.all_passed()
    forms = {r["form"] for r in rep.tail_table}
    assert "full-split" in forms and "merged-into-4" in forms


def test_ghz_multipartite_requires_m4():
    with pytest.raises(ConfigError):
        run_ghz_multipartite(
            ExperimentConfig(kind="ghz-multipartite", m=3, party_size=2, trials=5, seed=0, epsilon=0.5)
        )


def test_mixed_k0_equals_pure():
    pure = run_pure_bipartite(
        ExperimentConfig(kind="pure-bipartite", n_a=4, n_b=4, trials=120, seed=6)
    )
    mixed = run_mixed(
        ExperimentConfig(kind="mixed-bipartite", n_a=4, n_b=4, k=0, trials=120, seed=6)
    )
    assert mixed.empirical_mean == pure.empirical_mean


def test_mixed_sandwich_small():
    rep = run_mixed(
        ExperimentConfig(
            kind="mixed-bipartite", n_b=8, alpha=0.0, beta=1.0, trials=300, seed=13,
            delta_grid=(0.25, 0.5),
        )
    )
    assert rep.all_passed()
    assert rep.extra["realized"] == {"n_a": 8, "n_b": 8, "k": 8, "alpha": 0.0, "beta": 1.0}
    assert len(rep.tail_table) == 2
    for row in rep.tail_table:
        assert row["form"].startswith("outside-")
        assert row["passed"]


def test_purity_sampled_at_8x8_matches_formula():
    rep = run_purity(
        ExperimentConfig(kind="purity", n_a=8, n_b=8, trials=20000, seed=19)
    )
    exact = float(purity_mean_fraction(8, 8))
    assert abs(rep.empirical_mean - exact) <= 3 * rep.std_error
    assert rep.all_passed()


def test_ghz_multipartite_at_four_parties_of_six():
    rep = run_ghz_multipartite(
        ExperimentConfig(
            kind="ghz-multipartite", m=4, party_size=6, trials=2000, seed=23, epsilon=0.5
        )
    )
    assert rep.all_passed()
    full = [r for r in rep.tail_table if r["form"] == "full-split"][0]
    assert full["empirical"] <= full["bound"]
    k = 4 // 2
    expect = 2.0 ** (-k * 6 * (0.5**2 / 512.0) * (1 - 1 / k) ** 2 * (1 - 1 / 4))
    assert abs(full["bound"] - expect) < 1e-15


def test_mixed_fully_mixed_always_zero():
    rep = run_mixed(
        ExperimentConfig(kind="mixed-bipartite", n_a=3, n_b=3, k=6, trials=60, seed=2)
    )
    assert rep.empirical_mean == 0.0
    assert set(rep.histogram) == {"0"}


def test_mixed_beta_out_of_range():
    with pytest.raises(ConfigError):
        run_mixed(
            ExperimentConfig(kind="mixed-bipartite", n_b=4, beta=3.0, trials=10, seed=0)
        )


def test_lipschitz_no_violations():
    rep = run_lipschitz(
        ExperimentConfig(kind="lipschitz", m=3, party_size=2, trials=120, seed=21)
    )
    assert rep.all_passed()
    assert rep.extra["entanglement_violations"] == 0
    assert rep.extra["ghz_violations"] == 0
    assert rep.extra["max_ratio_entanglement"] <= 1.0
    assert rep.extra["max_ratio_ghz_over_m"] <= 1.0


def test_dispatch_and_kind_mismatch():
    cfg = ExperimentConfig(kind="purity", n_a=1, n_b=1, exhaustive=True, seed=0)
    assert run(cfg).kind == "purity"
    with pytest.raises(ConfigError):
        run_pure_bipartite(cfg)


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="unknown")
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="purity", trials=0)
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="purity", seed=-1)
    with pytest.raises(ConfigError):
        run_purity(ExperimentConfig(kind="purity", n_a=2, seed=0))


def test_report_serialization_round_trip():
    rep = run_purity(ExperimentConfig(kind="purity", n_a=2, n_b=2, trials=50, seed=1))
    data = json.loads(rep.to_json())
    assert data["schema_version"] == "1"
    assert data["kind"] == "purity"
    assert sum(data["histogram"].values()) == 50
    csv = rep.histogram_csv()
    assert csv.splitlines()[0] == "value,count"
    assert rep.tails_csv().splitlines()[0].startswith("form,")