"""Command-line front end.

Subcommands: entangle, ghz, mixed (entanglement of a stabilizer-group
file), sample (draw groups or Clifford elements), distance (metric between
two Clifford files), experiment (Monte Carlo sweeps), verify (oracle
cross-check suite).

Exit codes: 0 success / all checks passed, 1 bound or verification
failure, 2 usage or configuration error (including file parse errors),
3 invalid input data (a file parsed but violates group invariants).
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys

import numpy as np

from . import clifford as _clifford
from . import entanglement as _ent
from . import experiments as _exp
from . import oracle as _oracle
from . import stabilizer as _stab
from .errors import CapacityError, ConfigError, ParseError, StabkitError, ValidityError

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_INVALID_DATA = 3


def _load_group(path: str) -> _stab.StabilizerGroup:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return _stab.loads(text)


def _load_clifford(path: str) -> _clifford.CliffordElement:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return _clifford.loads(text)


def _partition_for(args, S: _stab.StabilizerGroup) -> _stab.Partition:
    if not args.parties:
        raise ConfigError("--parties is required (e.g. 0-4:A,5-9:B)")
    return _stab.Partition.parse(args.parties, n=S.n)


def _emit(args, payload: dict) -> None:
    if getattr(args, "format", "text") == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        for key, value in payload.items():
            print(f"{key}: {value}")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_entangle(args) -> int:
    S = _load_group(args.file)
    part = _partition_for(args, S)
    report = _ent.report_pure(S, part)
    if args.oracle:
        try:
            state = _oracle.state_from_stabilizer(S)
            lab_a = next(iter(part.parties))
            ent = _oracle.entropy_of_reduction(state, part.party(lab_a), S.n)
            report.oracle_value = ent
            report.oracle_agrees = abs(ent - report.epr_pairs) < 1e-9
        except CapacityError as exc:
            print(f"warning: oracle skipped ({exc})", file=sys.stderr)
    _emit(args, report.to_json_dict())
    if report.oracle_agrees is False:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _cmd_ghz(args) -> int:
    S = _load_group(args.file)
    part = _partition_for(args, S)
    report = _ent.report_ghz(S, part)
    if args.oracle:
        try:
            elems = _oracle.enumerate_group(S)
            from .pauli import is_identity_on

            span: set[int] = {0}
            for lab, qs in part.parties.items():
                sub = [e.symplectic().to_int() for e in elems if is_identity_on(e, qs)]
                span = {a ^ b for a in span for b in sub}
            import math

            delta_bf = S.dim - int(math.log2(len(span)))
            report.oracle_value = float(delta_bf)
            report.oracle_agrees = delta_bf == report.ghz_count
        except CapacityError as exc:
            print(f"warning: oracle skipped ({exc})", file=sys.stderr)
    _emit(args, report.to_json_dict())
    if report.oracle_agrees is False:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _cmd_mixed(args) -> int:
    S = _load_group(args.file)
    part = _partition_for(args, S)
    report = _ent.report_mixed(S, part)
    _emit(args, report.to_json_dict())
    return EXIT_OK


def _cmd_sample(args) -> int:
    seed = args.seed if args.seed is not None else secrets.randbits(48)
    rng = np.random.default_rng(seed)
    if args.clifford:
        c = _clifford.sample_uniform(args.n, rng)
        text = _clifford.dumps(c)
    else:
        k = args.k or 0
        S = _stab.sample_uniform(args.n, k, rng)
        text = _stab.dumps(S)
    header = f"# seed={seed}\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(header + text)
        print(f"wrote {args.out} (seed={seed})")
    else:
        sys.stdout.write(header + text)
    return EXIT_OK


def _cmd_distance(args) -> int:
    c1 = _load_clifford(args.file)
    c2 = _load_clifford(args.file2)
    print(_clifford.distance(c1, c2))
    return EXIT_OK


def _cmd_experiment(args) -> int:
    seed = args.seed if args.seed is not None else secrets.randbits(48)
    if args.seed is None:
        print(f"seed: {seed}", file=sys.stderr)
    delta_grid: tuple[float, ...] = ()
    if args.delta_grid:
        try:
            delta_grid = tuple(float(x) for x in args.delta_grid.split(","))
        except ValueError as exc:
            raise ConfigError(f"bad --delta-grid {args.delta_grid!r}") from exc
    cfg = _exp.ExperimentConfig(
        kind=args.kind,
        trials=args.trials,
        seed=seed,
        n_a=args.na,
        n_b=args.nb,
        n_c=args.nc,
        party_size=args.parties,
        m=args.m,
        k=args.k,
        alpha=args.alpha,
        beta=args.beta,
        epsilon=args.epsilon,
        delta_grid=delta_grid,
        exhaustive=args.exhaustive,
        threads=args.threads,
    )
    report = _exp.run(cfg)
    report.extra["invocation"] = list(args._argv)
    fmt = args.format or "json"
    if args.out:
        if fmt == "csv":
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(report.tails_csv())
            hist_path = args.out + ".hist.csv"
            with open(hist_path, "w", encoding="utf-8") as fh:
                fh.write(report.histogram_csv())
            print(f"wrote {args.out} and {hist_path}")
        else:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(report.to_json())
            print(f"wrote {args.out}")
    else:
        if fmt == "csv":
            sys.stdout.write(report.tails_csv())
            sys.stdout.write(report.histogram_csv())
        elif fmt == "text":
            print(f"kind: {report.kind}")
            print(f"trials: {report.trials}  seed: {report.seed}")
            print(f"mean: {report.empirical_mean:.6g}  std_error: {report.std_error:.3g}")
            print(f"mean bounds: {report.analytic_mean_bounds}")
            for row in report.tail_table:
                print(
                    f"tail {row['form']} @ {row['param']}: empirical {row['empirical']:.6g}"
                    f" vs bound {row['bound']:.6g} -> {'ok' if row['passed'] else 'FAIL'}"
                )
            for name, ok in report.pass_flags.items():
                print(f"check {name}: {'pass' if ok else 'FAIL'}")
        else:
            print(report.to_json())
    return EXIT_OK if report.all_passed() else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# verify: the small-instance oracle cross-check suite
# ---------------------------------------------------------------------------


def _check_pauli_phase_oracle() -> tuple[bool, str]:
    from .pauli import multiply

    rng = np.random.default_rng(101)
    for _ in range(60):
        n = int(rng.integers(1, 4))
        p = _stab.sample_uniform(n, 0, rng).generator(0)
        q = _stab.sample_uniform(n, 0, rng).generator(0)
        lhs = _oracle.dense_pauli_matrix(p) @ _oracle.dense_pauli_matrix(q)
        rhs = _oracle.dense_pauli_matrix(multiply(p, q))
        if not np.allclose(lhs, rhs):
            return False, f"{p} * {q}"
    return True, "60 random products at n <= 3"


def _check_commutation_oracle() -> tuple[bool, str]:
    from .pauli import symplectic_product

    rng = np.random.default_rng(102)
    for _ in range(60):
        n = int(rng.integers(1, 4))
        p = _stab.sample_uniform(n, 0, rng).generator(0)
        q = _stab.sample_uniform(n, 0, rng).generator(0)
        mp, mq = _oracle.dense_pauli_matrix(p), _oracle.dense_pauli_matrix(q)
        commutes = np.allclose(mp @ mq, mq @ mp)
        if commutes != (symplectic_product(p, q) == 0):
            return False, f"{p}, {q}"
    return True, "60 random pairs at n <= 3"


def _check_subgroup_enumeration() -> tuple[bool, str]:
    from .pauli import is_identity_on

    rng = np.random.default_rng(103)
    for _ in range(40):
        n = int(rng.integers(2, 6))
        k = int(rng.integers(0, n))
        S = _stab.sample_uniform(n, k, rng)
        nq = int(rng.integers(1, n))
        party = sorted(rng.choice(n, size=nq, replace=False).tolist())
        basis = _stab.subgroup_trivial_on(S, party)
        elems = _oracle.enumerate_group(S)
        brute = sum(1 for e in elems if is_identity_on(e, party))
        if 2**basis.nrows != brute:
            return False, f"n={n} party={party}"
    return True, "40 random groups vs full enumeration"


def _check_pure_entanglement_oracle() -> tuple[bool, str]:
    rng = np.random.default_rng(104)
    for _ in range(40):
        n = int(rng.integers(2, 7))
        S = _stab.sample_uniform(n, 0, rng)
        n_a = int(rng.integers(1, n))
        part = _stab.Partition(n, ["A"] * n_a + ["B"] * (n - n_a))
        e = _ent.pure_bipartite_entanglement(S, part)
        ent = _oracle.entropy_of_reduction(_oracle.state_from_stabilizer(S), range(n_a), n)
        if abs(ent - e) > 1e-9:
            return False, f"n={n}, n_a={n_a}: {e} vs {ent}"
    return True, "40 random pure states vs dense entropy"


def _check_ghz_enumeration() -> tuple[bool, str]:
    from .pauli import is_identity_on
    import math

    rng = np.random.default_rng(105)
    for _ in range(30):
        n = int(rng.integers(3, 7))
        S = _stab.sample_uniform(n, 0, rng)
        labels = [["A", "B", "C"][q % 3] for q in range(n)]
        part = _stab.Partition(n, labels)
        delta = _ent.ghz_count(S, part)
        elems = _oracle.enumerate_group(S)
        span = {0}
        for lab, qs in part.parties.items():
            sub = [e.symplectic().to_int() for e in elems if is_identity_on(e, qs)]
            span = {a ^ b for a in span for b in sub}
        if delta != S.dim - int(math.log2(len(span))):
            return False, f"n={n}"
    return True, "30 random tripartite states vs enumeration"


def _check_purify_oracle() -> tuple[bool, str]:
    rng = np.random.default_rng(106)
    for _ in range(25):
        n = int(rng.integers(1, 5))
        k = int(rng.integers(0, n + 1))
        S = _stab.sample_uniform(n, k, rng)
        Sp, kk = _stab.purify(S)
        if kk != k or Sp.dim != n + k or not _stab.validate(Sp):
            return False, f"structure n={n} k={k}"
        rho = _oracle.state_from_stabilizer(S)
        pure = _oracle.state_from_stabilizer(Sp)
        red = _oracle.reduced_density(pure, range(n), Sp.n)
        target = np.outer(rho.amplitudes, rho.amplitudes.conj()) if isinstance(
            rho, _oracle.DenseState
        ) else rho
        if not np.allclose(red, target, atol=1e-9):
            return False, f"reduction n={n} k={k}"
    return True, "25 purifications vs dense partial trace"


def _check_metric_bruteforce() -> tuple[bool, str]:
    mats = _oracle.enumerate_symplectic_matrices(1)
    elems = [
        _clifford.CliffordElement(1, m, np.zeros(2, dtype=np.uint8), check=True) for m in mats
    ]
    for c1 in elems:
        for c2 in elems:
            if _clifford.distance(c1, c2) != _oracle.brute_force_clifford_distance(c1, c2):
                return False, "n=1 pair mismatch"
    rng = np.random.default_rng(107)
    for _ in range(200):
        n = int(rng.integers(1, 9))
        a, b, c = (_clifford.sample_uniform(n, rng) for _ in range(3))
        dab, dbc, dac = (
            _clifford.distance(a, b),
            _clifford.distance(b, c),
            _clifford.distance(a, c),
        )
        if dab != _clifford.distance(b, a) or dac > dab + dbc:
            return False, "metric axiom violation"
    return True, "all 36 n=1 pairs + 200 random triples"


def _check_sampler_census() -> tuple[bool, str]:
    from scipy.stats import chi2

    rng = np.random.default_rng(108)
    counts: dict = {}
    draws = 12000
    for _ in range(draws):
        key = _stab.sample_uniform(1, 0, rng).key()
        counts[key] = counts.get(key, 0) + 1
    if len(counts) != 6:
        return False, f"single-qubit support {len(counts)} != 6"
    exp = draws / 6
    stat = sum((c - exp) ** 2 / exp for c in counts.values())
    if stat >= chi2.ppf(1 - 1e-3, 5):
        return False, f"state chi2 {stat:.1f}"
    ccounts: dict = {}
    for _ in range(draws):
        key = _clifford.sample_uniform(1, rng).images.words.tobytes()
        ccounts[key] = ccounts.get(key, 0) + 1
    if len(ccounts) != 6:
        return False, f"Sp(2,2) support {len(ccounts)} != 6"
    stat = sum((c - exp) ** 2 / exp for c in ccounts.values())
    if stat >= chi2.ppf(1 - 1e-3, 5):
        return False, f"clifford chi2 {stat:.1f}"
    census = {g.key() for g in _oracle.enumerate_stabilizer_states(2)}
    if len(census) != 60:
        return False, f"two-qubit census {len(census)} != 60"
    seen = {_stab.sample_uniform(2, 0, rng).key() for _ in range(5000)}
    if not seen <= census:
        return False, "sampled a state outside the census"
    return True, f"chi-square ok over {draws} draws; censuses 6/6/60"


def _check_purity_census() -> tuple[bool, str]:
    from fractions import Fraction

    rep = _exp.run_purity(
        _exp.ExperimentConfig(kind="purity", n_a=1, n_b=1, exhaustive=True, seed=0)
    )
    ok = rep.extra.get("exact_mean") == str(Fraction(4, 5))
    return ok, f"exhaustive mean purity {rep.extra.get('exact_mean')}"


def _check_clifford_group_ops() -> tuple[bool, str]:
    rng = np.random.default_rng(109)
    for _ in range(30):
        n = int(rng.integers(1, 6))
        a, b = _clifford.sample_uniform(n, rng), _clifford.sample_uniform(n, rng)
        if _clifford.compose(a, _clifford.inverse(a)) != _clifford.identity(n):
            return False, "inverse failure"
        P = _stab.sample_uniform(n, 0, rng).generator(0)
        if _clifford.apply(_clifford.compose(a, b), P) != _clifford.apply(
            a, _clifford.apply(b, P)
        ):
            return False, "compose/apply mismatch"
    return True, "30 random compose/inverse/apply consistency checks"


VERIFY_CHECKS = [
    ("pauli-phase-oracle", _check_pauli_phase_oracle),
    ("commutation-oracle", _check_commutation_oracle),
    ("subgroup-enumeration", _check_subgroup_enumeration),
    ("pure-entanglement-oracle", _check_pure_entanglement_oracle),
    ("ghz-enumeration", _check_ghz_enumeration),
    ("purify-oracle", _check_purify_oracle),
    ("metric-bruteforce", _check_metric_bruteforce),
    ("sampler-census", _check_sampler_census),
    ("purity-census", _check_purity_census),
    ("clifford-group-ops", _check_clifford_group_ops),
]


def _cmd_verify(args) -> int:
    failures = 0
    for name, check in VERIFY_CHECKS:
        try:
            ok, detail = check()
        except Exception as exc:  # a crash is a failure, not an abort
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        if not ok:
            failures += 1
    print(f"{len(VERIFY_CHECKS) - failures}/{len(VERIFY_CHECKS)} checks passed")
    return EXIT_OK if failures == 0 else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stabkit",
        description="Entanglement structure of stabilizer states and random-ensemble sweeps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--format", choices=["json", "text"], default="text")

    p = sub.add_parser("entangle", help="EPR count of a pure stabilizer-group file")
    p.add_argument("file")
    p.add_argument("--parties", required=True, help="partition string, e.g. 0-4:A,5-9:B")
    p.add_argument("--oracle", action="store_true", help="cross-check with the dense oracle")
    add_common(p)
    p.set_defaults(func=_cmd_entangle)

    p = sub.add_parser("ghz", help="GHZ count of a pure stabilizer-group file (>= 3 parties)")
    p.add_argument("file")
    p.add_argument("--parties", required=True)
    p.add_argument("--oracle", action="store_true")
    add_common(p)
    p.set_defaults(func=_cmd_ghz)

    p = sub.add_parser("mixed", help="mixed-state EPR lower bound of a stabilizer-group file")
    p.add_argument("file")
    p.add_argument("--parties", required=True)
    add_common(p)
    p.set_defaults(func=_cmd_mixed)

    p = sub.add_parser("sample", help="draw a uniform stabilizer group or Clifford element")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=0, help="log-rank (0 = pure state)")
    p.add_argument("--seed", type=int)
    p.add_argument("--clifford", action="store_true", help="sample a Clifford element instead")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("distance", help="metric between two Clifford text files")
    p.add_argument("file")
    p.add_argument("file2")
    p.set_defaults(func=_cmd_distance)

    p = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    p.add_argument("kind", choices=list(_exp.KINDS))
    p.add_argument("--na", type=int)
    p.add_argument("--nb", type=int)
    p.add_argument("--nc", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int, help="party count for multipartite kinds")
    p.add_argument("--parties", type=int, help="qubits per party for multipartite kinds")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta-grid", dest="delta_grid", help="comma-separated deltas")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float)
    p.add_argument("--exhaustive", action="store_true", help="enumerate instead of sampling")
    p.add_argument("--out")
    p.add_argument("--format", choices=["json", "csv", "text"], default=None)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("verify", help="run the small-instance oracle cross-check suite")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._argv = list(argv) if argv is not None else sys.argv[1:]
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_DATA
    except StabkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
