"""Monte Carlo sweeps over random stabilizer ensembles vs analytic bounds.

Every experiment samples an ensemble with a counter-based per-trial RNG
(Philox keyed by the seed, counter = trial index), evaluates an
entanglement statistic per trial, and compares the aggregate against the
analytic expectation bounds and tail bounds the package implements.

All exponentials and logarithms in analytic bounds are base 2; every
report carries a note saying so.  Mean comparisons use a three-standard-
error tolerance; tail comparisons demand the empirical frequency not
exceed the bound outright (with a Wilson upper confidence limit reported
alongside).

Identical (config, seed) pairs produce bit-identical reports for any
thread count: trials are independent and aggregation folds in trial-index
order.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import clifford as _clifford
from . import oracle as _oracle
from .entanglement import ghz_count, mixed_epr_bound_detail, pure_bipartite_entanglement
from .errors import ConfigError
from .gf2 import subspace_sum_dim, subspace_intersection_dim
from .stabilizer import Partition, sample_uniform, subgroup_trivial_on

SCHEMA_VERSION = "1"
BASE2_NOTE = "all exp/log in analytic bounds are base 2"

KINDS = (
    "pure-bipartite",
    "purity",
    "ghz-tripartite",
    "ghz-multipartite",
    "mixed-bipartite",
    "concentration",
    "lipschitz",
)


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent deterministic stream per (seed, trial index)."""
    return np.random.Generator(np.random.Philox(key=int(seed), counter=int(index) << 192))


# ---------------------------------------------------------------------------
# Analytic bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundValue:
    value: float
    applicable: bool
    failed_conditions: tuple[str, ...] = ()


def _exp2(x: float) -> float:
    return float(2.0**x)


def purity_mean_fraction(n_a: int, n_b: int) -> Fraction:
    return Fraction(2**n_a + 2**n_b, 2 ** (n_a + n_b) + 1)


def bound_value(theorem: str, **p) -> BoundValue:
    """Evaluate a named analytic bound; out-of-validity parameters flag the
    result as not applicable but the value is still computed."""
    failed: list[str] = []

    if theorem == "clifford-concentration":
        delta, n = p["delta"], p["n"]
        if delta < 0:
            failed.append("delta >= 0")
        return BoundValue(2.0 * _exp2(-(delta**2) / (64.0 * n)), not failed, tuple(failed))

    if theorem == "pure-mean-lower":
        hi, lo = max(p["n_a"], p["n_b"]), min(p["n_a"], p["n_b"])
        return BoundValue(lo - _exp2(lo - hi), True)

    if theorem == "purity-mean":
        return BoundValue(float(purity_mean_fraction(p["n_a"], p["n_b"])), True)

    if theorem == "pure-tail-meandev":
        delta, n_total = p["delta"], p["n_total"]
        if delta < 0:
            failed.append("delta >= 0")
        return BoundValue(_exp2(-(delta**2) / (64.0 * n_total)), not failed, tuple(failed))

    if theorem == "pure-tail-epsilon":
        n, eps, alpha = p["n"], p["epsilon"], p["alpha"]
        if eps <= 0:
            failed.append("epsilon > 0")
        if n < 2:
            failed.append("n >= 2")
        elif n < 2.0 / eps:
            failed.append("n >= 2/epsilon")
        if alpha < 0:
            failed.append("alpha >= 0")
        logn = math.log2(n) if n >= 2 else 1.0
        value = _exp2(-(n * eps**2 / 512.0) * (2.0 * n / (2.0 * n + alpha * logn)))
        return BoundValue(value, not failed, tuple(failed))

    if theorem == "ghz3-mean-upper":
        n_a, n_b, n_c = p["n_a"], p["n_b"], p["n_c"]
        for cond, desc in [
            (n_a + n_b >= n_c, "n_a + n_b >= n_c"),
            (n_a + n_c >= n_b, "n_a + n_c >= n_b"),
            (n_b + n_c >= n_a, "n_b + n_c >= n_a"),
        ]:
            if not cond:
                failed.append(desc)
        value = (
            n_c * _exp2(-(n_a + n_b - n_c))
            + n_b * _exp2(-(n_a + n_c - n_b))
            + n_a * _exp2(-(n_b + n_c - n_a))
        )
        return BoundValue(value, not failed, tuple(failed))

    if theorem == "ghzm-tail":
        m, n, eps = p["m"], p["n"], p["epsilon"]
        if m < 4:
            failed.append("m >= 4")
        k = m // 2 if m >= 2 else 1
        value = _exp2(-k * n * (eps**2 / 512.0) * (1.0 - 1.0 / k) ** 2 * (1.0 - 1.0 / m))
        return BoundValue(value, not failed, tuple(failed))

    if theorem == "ghzm-tail-sub":
        m, n, eps = p["m"], p["n"], p["epsilon"]
        m_prime = p.get("m_prime", m)
        if not 4 <= m_prime < m:
            failed.append("4 <= m' < m")
        return BoundValue(_exp2(-n * eps**2 / (64.0 * m)), not failed, tuple(failed))

    if theorem == "mixed-mean-upper":
        n, alpha, beta = p["n"], p["alpha"], p["beta"]
        if not 0 < beta <= 2:
            failed.append("0 < beta <= 2")
        logn = math.log2(n) if n >= 2 else 0.0
        return BoundValue((1.0 - beta / 2.0) * n + (alpha / 2.0) * logn, not failed, tuple(failed))

    if theorem == "mixed-mean-lower":
        n, alpha, beta, k = p["n"], p["alpha"], p["beta"], p["k"]
        if not 0 < beta <= 2:
            failed.append("0 < beta <= 2")
        value = (1.0 - beta / 2.0) * n - float(n) ** alpha * _exp2(-k) - float(n) ** (-alpha)
        return BoundValue(value, not failed, tuple(failed))

    if theorem == "mixed-tail":
        n, alpha, beta, eps = p["n"], p["alpha"], p["beta"], p["epsilon"]
        if not 0 < beta <= 2:
            failed.append("0 < beta <= 2")
        logn = math.log2(n) if n >= 2 else 1.0
        if beta < 2 and eps > 0 and beta > 0:
            margin = eps * (1.0 - beta / 2.0)
            if n < 4.0 / margin:
                failed.append("n >= 4/(epsilon(1-beta/2))")
            if n < (1.0 / (2.0 * beta)) * math.log2(4.0 / margin):
                failed.append("n >= log2(4/(epsilon(1-beta/2)))/(2 beta)")
            if n / logn < (alpha - 1.0) / (2.0 * beta):
                failed.append("n/log n >= (alpha-1)/(2 beta)")
            if n / logn < alpha / margin:
                failed.append("n/log n >= alpha/(epsilon(1-beta/2))")
        else:
            failed.append("bound degenerate at beta = 2 or epsilon <= 0")
        value = 2.0 * _exp2(
            -(n * eps**2 * (1.0 - beta / 2.0) ** 2 / 3200.0) * (2.0 * n / (2.0 * n + alpha * logn))
        )
        return BoundValue(value, not failed, tuple(failed))

    raise ConfigError(f"unknown theorem id {theorem!r}")


def wilson_upper(successes: int, trials: int, z: float = 3.0) -> float:
    """Upper Wilson score limit for a binomial proportion (z=3 by default)."""
    if trials == 0:
        return 1.0
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = phat + z2 / (2.0 * trials)
    rad = z * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials))
    return min(1.0, (center + rad) / denom)


# ---------------------------------------------------------------------------
# Config / report containers
# ---------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    kind: str
    trials: int = 1000
    seed: int = 0
    n_a: int | None = None
    n_b: int | None = None
    n_c: int | None = None
    party_size: int | None = None
    m: int | None = None
    k: int | None = None
    alpha: float = 0.0
    beta: float | None = None
    epsilon: float | None = None
    delta_grid: tuple[float, ...] = ()
    exhaustive: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; choose from {KINDS}")
        if self.trials < 1 and not self.exhaustive:
            raise ConfigError("trials must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        self.delta_grid = tuple(float(d) for d in self.delta_grid)

    def require(self, *names: str):
        missing = [x for x in names if getattr(self, x) is None]
        if missing:
            raise ConfigError(f"{self.kind} experiment needs {', '.join(missing)}")
        for x in names:
            v = getattr(self, x)
            if isinstance(v, int) and x in {"n_a", "n_b", "n_c", "party_size", "m"} and v <= 0:
                raise ConfigError(f"{x} must be positive")

    def echo(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if v is not None}
        out["delta_grid"] = list(self.delta_grid)
        return out


@dataclass
class ExperimentReport:
    kind: str
    config: dict
    seed: int
    trials: int
    empirical_mean: float
    empirical_variance: float
    std_error: float
    histogram: dict[str, int]
    tail_table: list[dict]
    analytic_mean_bounds: dict
    pass_flags: dict[str, bool]
    extra: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=lambda: [BASE2_NOTE])
    runtime_seconds: float = 0.0
    schema_version: str = SCHEMA_VERSION

    def all_passed(self) -> bool:
        return all(self.pass_flags.values())

    def to_json_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "kind": self.kind,
            "config": self.config,
            "seed": self.seed,
            "trials": self.trials,
            "empirical_mean": self.empirical_mean,
            "empirical_variance": self.empirical_variance,
            "std_error": self.std_error,
            "histogram": self.histogram,
            "tail_table": self.tail_table,
            "analytic_mean_bounds": self.analytic_mean_bounds,
            "pass_flags": self.pass_flags,
            "extra": self.extra,
            "notes": self.notes,
            "runtime_seconds": self.runtime_seconds,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json_dict(), indent=indent, sort_keys=True)

    def numerical_content(self) -> str:
        """Canonical JSON of everything except wall-clock metadata."""
        d = self.to_json_dict()
        d.pop("runtime_seconds")
        return json.dumps(d, sort_keys=True)

    def tails_csv(self) -> str:
        header = "form,param,empirical,wilson_upper,bound,applicable,passed"
        rows = [header]
        for r in self.tail_table:
            rows.append(
                f"{r['form']},{r['param']},{r['empirical']!r},{r['wilson_upper']!r},"
                f"{r['bound']!r},{r['applicable']},{r['passed']}"
            )
        return "\n".join(rows) + "\n"

    def histogram_csv(self) -> str:
        rows = ["value,count"]
        for key in sorted(self.histogram, key=lambda s: float(s)):
            rows.append(f"{key},{self.histogram[key]}")
        return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# Shared machinery
# ---------------------------------------------------------------------------


def _map_trials(cfg: ExperimentConfig, fn: Callable[[int], object]) -> list:
    """Evaluate fn(0..trials-1); results always in trial order."""
    n = cfg.trials
    if cfg.threads == 1 or n < 4:
        return [fn(i) for i in range(n)]
    results: list = [None] * n
    chunk = max(1, n // (cfg.threads * 8))
    spans = [(s, min(s + chunk, n)) for s in range(0, n, chunk)]

    def run_span(span):
        s, e = span
        for i in range(s, e):
            results[i] = fn(i)

    with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
        list(ex.map(run_span, spans))
    return results


def _stats(values: Sequence[float]) -> tuple[float, float, float]:
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean()) if arr.size else 0.0
    var = float(arr.var(ddof=1)) if arr.size > 1 else 0.0
    se = math.sqrt(var / arr.size) if arr.size else 0.0
    return mean, var, se


def _histogram(values: Sequence) -> dict[str, int]:
    out: dict[str, int] = {}
    for v in values:
        key = format(v, ".12g") if isinstance(v, float) else str(v)
        out[key] = out.get(key, 0) + 1
    return out


def _tail_row(form: str, param: float, count: int, trials: int, bv: BoundValue) -> dict:
    emp = count / trials if trials else 0.0
    return {
        "form": form,
        "param": param,
        "empirical": emp,
        "count": count,
        "wilson_upper": wilson_upper(count, trials),
        "bound": bv.value,
        "applicable": bv.applicable,
        "failed_conditions": list(bv.failed_conditions),
        "passed": (emp <= bv.value) if bv.applicable else True,
    }


def _census_entanglement(n: int, n_a: int) -> list[int]:
    """E over the exhaustive census of pure stabilizer states (n <= 3)."""
    part = Partition(n, ["A"] * n_a + ["B"] * (n - n_a))
    return [
        pure_bipartite_entanglement(S, part) for S in _oracle.enumerate_stabilizer_states(n)
    ]


def _realized_alpha(n_a: int, n_b: int) -> float | None:
    if n_b < 2:
        return None
    return (n_a - n_b) / math.log2(n_b)


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


def run_pure_bipartite(cfg: ExperimentConfig) -> ExperimentReport:
    """Entanglement of uniform pure states vs the mean and tail bounds."""
    if cfg.kind != "pure-bipartite":
        raise ConfigError(f"config kind is {cfg.kind!r}")
    cfg.require("n_a", "n_b")
    t0 = time.perf_counter()
    n_a, n_b = cfg.n_a, cfg.n_b
    n = n_a + n_b
    part = Partition(n, ["A"] * n_a + ["B"] * n_b)
    if cfg.exhaustive:
        values = _census_entanglement(n, n_a)
        trials = len(values)
    else:
        trials = cfg.trials

        def one(i: int) -> int:
            S = sample_uniform(n, 0, trial_rng(cfg.seed, i))
            return pure_bipartite_entanglement(S, part)

        values = _map_trials(cfg, one)
    mean, var, se = _stats(values)
    lower = bound_value("pure-mean-lower", n_a=n_a, n_b=n_b)
    cap = min(n_a, n_b)
    tail_table = []
    for delta in cfg.delta_grid:
        count = sum(1 for v in values if v < mean - delta)
        tail_table.append(
            _tail_row(
                "below-mean", delta, count, trials,
                bound_value("pure-tail-meandev", delta=delta, n_total=n),
            )
        )
    if cfg.epsilon is not None:
        nn = min(n_a, n_b)
        alpha = _realized_alpha(max(n_a, n_b), nn)
        bv = bound_value(
            "pure-tail-epsilon", n=nn, epsilon=cfg.epsilon,
            alpha=alpha if alpha is not None else 0.0,
        )
        if alpha is None:
            bv = BoundValue(bv.value, False, bv.failed_conditions + ("n >= 2 for alpha",))
        count = sum(1 for v in values if v < nn * (1.0 - cfg.epsilon))
        tail_table.append(_tail_row("below-n(1-eps)", cfg.epsilon, count, trials, bv))
    flags = {
        "mean_above_lower_bound": mean >= lower.value - 3.0 * se,
        "support_in_range": all(0 <= v <= cap for v in values),
        "tails_dominated": all(r["passed"] for r in tail_table),
    }
    return ExperimentReport(
        kind=cfg.kind,
        config=cfg.echo(),
        seed=cfg.seed,
        trials=trials,
        empirical_mean=mean,
        empirical_variance=var,
        std_error=se,
        histogram=_histogram(values),
        tail_table=tail_table,
        analytic_mean_bounds={
            "lower": lower.value,
            "upper": float(cap),
            "lower_applicable": lower.applicable,
        },
        pass_flags=flags,
        extra={"exhaustive": cfg.exhaustive},
        runtime_seconds=time.perf_counter() - t0,
    )


def run_purity(cfg: ExperimentConfig) -> ExperimentReport:
    """Mean reduced purity 2^-E vs its exact closed form."""
    if cfg.kind != "purity":
        raise ConfigError(f"config kind is {cfg.kind!r}")
    cfg.require("n_a", "n_b")
    t0 = time.perf_counter()
    n_a, n_b = cfg.n_a, cfg.n_b
    n = n_a + n_b
    part = Partition(n, ["A"] * n_a + ["B"] * n_b)
    if cfg.exhaustive:
        evalues = _census_entanglement(n, n_a)
        trials = len(evalues)
    else:
        trials = cfg.trials

        def one(i: int) -> int:
            S = sample_uniform(n, 0, trial_rng(cfg.seed, i))
            return pure_bipartite_entanglement(S, part)

        evalues = _map_trials(cfg, one)
    # Stabilizer reductions have flat spectra, so the purity is exactly 2^-E.
    purities = [2.0 ** (-e) for e in evalues]
    mean, var, se = _stats(purities)
    exact = purity_mean_fraction(n_a, n_b)
    extra = {"entanglement_histogram": _histogram(evalues), "exhaustive": cfg.exhaustive}
    if cfg.exhaustive:
        mean_frac = sum(Fraction(1, 2**e) for e in evalues) / len(evalues)
        extra["exact_mean"] = str(mean_frac)
        extra["analytic_mean"] = str(exact)
        agree = mean_frac == exact
    else:
        agree = abs(mean - float(exact)) <= 3.0 * se if se else mean == float(exact)
    flags = {
        "mean_matches_formula": bool(agree),
        "purity_in_range": all(0.0 < p <= 1.0 for p in purities),
    }
    return ExperimentReport(
        kind=cfg.kind,
        config=cfg.echo(),
        seed=cfg.seed,
        trials=trials,
        empirical_mean=mean,
        empirical_variance=var,
        std_error=se,
        histogram=_histogram(purities),
        tail_table=[],
        analytic_mean_bounds={"lower": float(exact), "upper": float(exact)},
        pass_flags=flags,
        extra=extra,
        runtime_seconds=time.perf_counter() - t0,
    )


def run_ghz_tripartite(cfg: ExperimentConfig) -> ExperimentReport:
    """GHZ count of uniform tripartite states vs the mean upper bound."""
    if cfg.kind != "ghz-tripartite":
        raise ConfigError(f"config kind is {cfg.kind!r}")
    cfg.require("n_a", "n_b", "n_c")
    n_a, n_b, n_c = cfg.n_a, cfg.n_b, cfg.n_c
    upper = bound_value("ghz3-mean-upper", n_a=n_a, n_b=n_b, n_c=n_c)
    if not upper.applicable:
        raise ConfigError(
            "party sizes violate the triangle conditions: " + ", ".join(upper.failed_conditions)
        )
    t0 = time.perf_counter()
    n = n_a + n_b + n_c
    part = Partition(n, ["A"] * n_a + ["B"] * n_b + ["C"] * n_c)

    def one(i: int) -> tuple[int, bool, bool]:
        S = sample_uniform(n, 0, trial_rng(cfg.seed, i))
        delta = ghz_count(S, part)
        bases = {lab: subgroup_trivial_on(S, qs) for lab, qs in part.parties.items()}
        dims = {lab: b.nrows for lab, b in bases.items()}
        sum_dims_ok = sum(dims.values()) >= n
        pairwise = (
            subspace_intersection_dim(bases["A"], bases["B"])
            + subspace_intersection_dim(bases["A"], bases["C"])
            + subspace_intersection_dim(bases["B"], bases["C"])
        )
        incl_excl_ok = subspace_sum_dim(list(bases.values())) == sum(dims.values()) - pairwise
        return delta, sum_dims_ok, incl_excl_ok

    rows = _map_trials(cfg, one)
    values = [r[0] for r in rows]
    sum_dim_violations = sum(1 for r in rows if not r[1])
    incl_excl_violations = sum(1 for r in rows if not r[2])
    mean, var, se = _stats(values)
    flags = {
        "mean_below_bound": mean <= upper.value + 3.0 * se,
        "sum_local_dim_bound": sum_dim_violations == 0,
        "support_in_range": all(0 <= v <= min(n_a, n_b, n_c) for v in values),
    }
    return ExperimentReport(
        kind=cfg.kind,
        config=cfg.echo(),
        seed=cfg.seed,
        trials=cfg.trials,
        empirical_mean=mean,
        empirical_variance=var,
        std_error=se,
        histogram=_histogram(values),
        tail_table=[],
        analytic_mean_bounds={"upper": upper.value},
        pass_flags=flags,
        extra={
            "inclusion_exclusion_violations": incl_excl_violations,
            "sum_local_dim_violations": sum_dim_violations,
        },
        runtime_seconds=time.perf_counter() - t0,
    )


def _merge_parties(m: int, m_prime: int) -> list[int]:
    """Deterministic contiguous merge of m parties into m_prime groups."""
    base, rem = divmod(m, m_prime)
    sizes = [base + (1 if g < rem else 0) for g in range(m_prime)]
    groups = []
    for g, size in enumerate(sizes):
        groups.extend([g] * size)
    return groups


def run_ghz_multipartite(cfg: ExperimentConfig) -> ExperimentReport:
    """Tail of the GHZ count for m >= 4 equal parties, all group counts m'."""
    if cfg.kind != "ghz-multipartite":
        raise ConfigError(f"config kind is {cfg.kind!r}")
    cfg.require("m", "party_size")
    if cfg.m < 4:
        raise ConfigError("multipartite experiment needs m >= 4")
    if cfg.epsilon is None:
        raise ConfigError("multipartite experiment needs epsilon")
    t0 = time.perf_counter()
    m, nper = cfg.m, cfg.party_size
    n = m * nper
    eps = cfg.epsilon
    m_primes = list(range(m, 3, -1))
    partitions = {}
    for mp in m_primes:
        merge = _merge_parties(m, mp)
        labels = []
        for party in range(m):
            labels.extend([f"G{merge[party]}"] * nper)
        partitions[mp] = Partition(n, labels)

    def one(i: int) -> dict[int, int]:
        S = sample_uniform(n, 0, trial_rng(cfg.seed, i))
        return {mp: ghz_count(S, partitions[mp]) for mp in m_primes}

    rows = _map_trials(cfg, one)
    values = [r[m] for r in rows]
    mean, var, se = _stats(values)
    tail_table = []
    for mp in m_primes:
        count = sum(1 for r in rows if r[mp] > eps * nper)
        if mp == m:
            bv = bound_value("ghzm-tail", m=m, n=nper, epsilon=eps)
            form = "full-split"
        else:
            bv = bound_value("ghzm-tail-sub", m=m, n=nper, epsilon=eps, m_prime=mp)
            form = f"merged-into-{mp}"
        row = _tail_row(form, eps, count, cfg.trials, bv)
        row["m_prime"] = mp
        tail_table.append(row)
    flags = {
        "tails_dominated": all(r["passed"] for r in tail_table),
        "support_in_range": all(0 <= r[mp] <= nper for r in rows for mp in m_primes),
    }
    return ExperimentReport(
        kind=cfg.kind,
        config=cfg.echo(),
        seed=cfg.seed,
        trials=cfg.trials,
        empirical_mean=mean,
        empirical_variance=var,
        std_error=se,
        histogram=_histogram(values),
        tail_table=tail_table,
        analytic_mean_bounds={},
        pass_flags=flags,
        extra={"m_primes": m_primes},
        runtime_seconds=time.perf_counter() - t0,
    )


def run_mixed(cfg: ExperimentConfig) -> ExperimentReport:
    """EPR content of uniform mixed states vs the expectation sandwich."""
    if cfg.kind != "mixed-bipartite":
        raise ConfigError(f"config kind is {cfg.kind!r}")
    cfg.require("n_b")
    n = cfg.n_b
    alpha = cfg.alpha
    if cfg.n_a is not None:
        n_a = cfg.n_a
        alpha_real = _realized_alpha(n_a, n)
        alpha = alpha_real if alpha_real is not None else alpha
    else:
        n_a = n + int(round(alpha * math.log2(n))) if n >= 2 else n
    if cfg.k is not None:
        k = cfg.k
        beta = k / n
    elif cfg.beta is not None:
        beta = cfg.beta
        k = int(round(beta * n))
    else:
        raise ConfigError("mixed experiment needs k or beta")
    if k and not 0 < beta <= 2:
        raise ConfigError(f"beta = k/n = {beta} outside (0, 2]")
    if not 0 <= k <= n_a + n:
        raise ConfigError(f"k={k} out of range for {n_a + n} qubits")
    t0 = time.perf_counter()
    total = n_a + n
    part = Partition(total, ["A"] * n_a + ["B"] * n)
    d = total - k

    def one(i: int):
        S = sample_uniform(total, total - d, trial_rng(cfg.seed, i))
        detail = mixed_epr_bound_detail(S, part)
        return detail.raw, detail.value, detail.exact is not None

    rows = _map_trials(cfg, one)
    values = [r[0] for r in rows]
    clamped = [r[1] for r in rows]
    fullrank = sum(1 for r in rows if r[2])
    mean, var, se = _stats(values)
    if k:
        lower = bound_value("mixed-mean-lower", n=n, alpha=alpha, beta=beta, k=k)
        upper = bound_value("mixed-mean-upper", n=n, alpha=alpha, beta=beta)
    else:
        # k = 0 is the pure limit; the sandwich degenerates to the pure bound.
        pml = bound_value("pure-mean-lower", n_a=n_a, n_b=n)
        lower = BoundValue(pml.value, True)
        upper = BoundValue(float(min(n_a, n)), True)
    center = n - k / 2.0
    eps_grid = cfg.delta_grid or ((cfg.epsilon,) if cfg.epsilon is not None else ())
    tail_table = []
    for eps in eps_grid:
        count = sum(
            1 for v in values if v < (1.0 - eps) * center or v > (1.0 + eps) * center
        )
        bv = bound_value("mixed-tail", n=n, alpha=alpha, beta=beta if k else 0.0, epsilon=eps)
        tail_table.append(_tail_row("outside-(1±eps)(n-k/2)", eps, count, cfg.trials, bv))
    flags = {
        "mean_above_lower": mean >= lower.value - 3.0 * se,
        "mean_below_upper": mean <= upper.value + 3.0 * se,
        "tails_dominated": all(r["passed"] for r in tail_table),
    }
    return ExperimentReport(
        kind=cfg.kind,
        config=cfg.echo(),
        seed=cfg.seed,
        trials=cfg.trials,
        empirical_mean=mean,
        empirical_variance=var,
        std_error=se,
        histogram=_histogram(values),
        tail_table=tail_table,
        analytic_mean_bounds={
            "lower": lower.value,
            "upper": upper.value,
            "lower_applicable": lower.applicable,
            "upper_applicable": upper.applicable,
        },
        pass_flags=flags,
        extra={
            "realized": {"n_a": n_a, "n_b": n, "k": k, "alpha": alpha, "beta": beta},
            "full_rank_trials": fullrank,
            "clamped_mean": _stats(clamped)[0],
            "center_n_minus_k_half": center,
        },
        runtime_seconds=time.perf_counter() - t0,
    )


def run_concentration(
    cfg: ExperimentConfig,
    probe: Callable[[_clifford.CliffordElement], float] | None = None,
) -> ExperimentReport:
    """Two-sided deviation tails of a Lipschitz statistic of a uniform
    Clifford element.

    The default statistic is the bipartite entanglement of the state the
    element prepares from |0...0>; it depends on the element only through
    that state, so trials draw the stabilizer state directly (identical
    distribution, and bit-identical means vs run_pure_bipartite at equal
    seeds).  A custom ``probe`` receives full Clifford elements.
    """
    if cfg.kind != "concentration":
        raise ConfigError(f"config kind is {cfg.kind!r}")
    cfg.require("n_a", "n_b")
    t0 = time.perf_counter()
    n_a, n_b = cfg.n_a, cfg.n_b
    n = n_a + n_b
    part = Partition(n, ["A"] * n_a + ["B"] * n_b)

    if probe is None:

        def one(i: int) -> float:
            S = sample_uniform(n, 0, trial_rng(cfg.seed, i))
            return float(pure_bipartite_entanglement(S, part))

    else:

        def one(i: int) -> float:
            c = _clifford.sample_uniform(n, trial_rng(cfg.seed, i))
            return float(probe(c))

    values = _map_trials(cfg, one)
    mean, var, se = _stats(values)
    grid = cfg.delta_grid or (1.0, 2.0, 4.0, 8.0, 16.0)
    tail_table = []
    for delta in grid:
        count = sum(1 for v in values if abs(v - mean) > delta)
        tail_table.append(
            _tail_row(
                "two-sided-about-mean", delta, count, cfg.trials,
                bound_value("clifford-concentration", delta=delta, n=n),
            )
        )
    flags = {"tails_dominated": all(r["passed"] for r in tail_table)}
    return ExperimentReport(
        kind=cfg.kind,
        config=cfg.echo(),
        seed=cfg.seed,
        trials=cfg.trials,
        empirical_mean=mean,
        empirical_variance=var,
        std_error=se,
        histogram=_histogram(values),
        tail_table=tail_table,
        analytic_mean_bounds={},
        pass_flags=flags,
        extra={"probe": "bipartite-entanglement" if probe is None else "custom"},
        runtime_seconds=time.perf_counter() - t0,
    )


def run_lipschitz(cfg: ExperimentConfig) -> ExperimentReport:
    """Check the Lipschitz inequalities on random Clifford pairs."""
    if cfg.kind != "lipschitz":
        raise ConfigError(f"config kind is {cfg.kind!r}")
    cfg.require("m", "party_size")
    if cfg.m < 3:
        raise ConfigError("lipschitz experiment needs m >= 3 parties")
    t0 = time.perf_counter()
    m, nper = cfg.m, cfg.party_size
    n = m * nper
    labels = []
    for party in range(m):
        labels.extend([chr(ord("A") + party)] * nper)
    part_m = Partition(n, labels)
    half = n // 2 if n >= 2 else 1
    part_2 = Partition(n, ["A"] * half + ["B"] * (n - half))

    def one(i: int):
        rng = trial_rng(cfg.seed, i)
        c1 = _clifford.sample_uniform(n, rng)
        c2 = _clifford.sample_uniform(n, rng)
        dist = _clifford.distance(c1, c2)
        s1 = _clifford.stabilizer_of_zero_state(c1)
        s2 = _clifford.stabilizer_of_zero_state(c2)
        de = abs(
            pure_bipartite_entanglement(s1, part_2) - pure_bipartite_entanglement(s2, part_2)
        )
        dg = abs(ghz_count(s1, part_m) - ghz_count(s2, part_m))
        return dist, de, dg

    rows = _map_trials(cfg, one)
    e_violations = sum(1 for dist, de, _ in rows if de > dist)
    g_violations = sum(1 for dist, _, dg in rows if dg > m * dist)
    ratios_e = [de / dist for dist, de, _ in rows if dist > 0]
    ratios_g = [dg / dist for dist, _, dg in rows if dist > 0]
    values = [de for _, de, _ in rows]
    mean, var, se = _stats(values)
    flags = {
        "entanglement_1_lipschitz": e_violations == 0,
        "ghz_m_lipschitz": g_violations == 0,
    }
    return ExperimentReport(
        kind=cfg.kind,
        config=cfg.echo(),
        seed=cfg.seed,
        trials=cfg.trials,
        empirical_mean=mean,
        empirical_variance=var,
        std_error=se,
        histogram=_histogram(values),
        tail_table=[],
        analytic_mean_bounds={},
        pass_flags=flags,
        extra={
            "entanglement_violations": e_violations,
            "ghz_violations": g_violations,
            "max_ratio_entanglement": max(ratios_e) if ratios_e else 0.0,
            "max_ratio_ghz_over_m": (max(ratios_g) / m) if ratios_g else 0.0,
            "mean_distance": _stats([r[0] for r in rows])[0],
        },
        runtime_seconds=time.perf_counter() - t0,
    )


_RUNNERS = {
    "pure-bipartite": run_pure_bipartite,
    "purity": run_purity,
    "ghz-tripartite": run_ghz_tripartite,
    "ghz-multipartite": run_ghz_multipartite,
    "mixed-bipartite": run_mixed,
    "concentration": run_concentration,
    "lipschitz": run_lipschitz,
}


def run(cfg: ExperimentConfig) -> ExperimentReport:
    """Dispatch a config to its runner."""
    return _RUNNERS[cfg.kind](cfg)
