"""Command-line entry point: one subcommand per experiment, CSV on stdout or a file."""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import expsums, identities, moments, sieves, spacing, suites, summatory, voronoi
from ._backend import resolve_threads
from .csvio import format_row, write_atomic
from .errors import BudgetExceeded, CheckpointError, PreconditionError, PrimeDeltaError

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_BUDGET = 4
EXIT_CHECKPOINT = 5

MAX_SEED = 2**64 - 1


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Outcome:
    header: tuple[str, ...]
    rows: list
    violations: int = 0
    note: str = ""

    def text(self) -> str:
        return ",".join(self.header) + "\n" + "".join(format_row(r) for r in self.rows)


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    threads: int = 1
    seed: int = suites.DEFAULT_SEED
    out_path: str | None = None
    checkpoint_path: str | None = None
    quarter_convention: bool = True

    def validate(self) -> None:
        if self.subcommand not in DISPATCH:
            raise UsageError(f"unknown subcommand {self.subcommand!r}")
        if self.threads < 1:
            raise UsageError("threads must be >= 1")
        if not 0 <= self.seed <= MAX_SEED:
            raise UsageError("seed must be a 64-bit unsigned integer")
        if self.checkpoint_path is not None and self.subcommand != "sweep":
            raise UsageError("--checkpoint only applies to sweep")
        VALIDATORS.get(self.subcommand, lambda c: None)(self)


# -- argument helpers ------------------------------------------------------------------


def _number(text: str):
    try:
        return int(text)
    except ValueError:
        value = float(text)
        if not math.isfinite(value):
            raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
        return value


def _integer(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        value = float(text)
        if value != int(value):
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        return int(value)


def _int_list(text: str) -> list[int]:
    return [_integer(t) for t in text.split(",") if t.strip()]


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _need(cond: bool, message: str) -> None:
    if not cond:
        raise PreconditionError(message)


def _bounded(value: int, limit: int, name: str) -> None:
    if value > limit:
        raise BudgetExceeded(f"{name} = {value} exceeds {limit}")


# -- subcommands ----------------------------------------------------------------------


def run_delta(cfg: RunConfig) -> Outcome:
    p = cfg.params
    if p.get("lo") is not None:
        seg = sieves.sieve_segment(p["lo"], p["hi"])
        rows = [
            (n, int(seg.d_values[i]), int(seg.mu_values[i]), float(seg.lambda_values()[i]), int(seg.is_prime[i]))
            for i, n in enumerate(range(seg.lo, seg.hi))
        ]
        return Outcome(("n", "d", "mu", "lambda", "is_prime"), rows)
    if p.get("primes") is not None:
        lo, hi = p["primes"]
        return Outcome(("p",), [(int(q),) for q in sieves.primes_in(lo, hi, cfg.threads)])
    rows = []
    for x in p["x"]:
        big_d = summatory.divisor_summatory(int(math.floor(x)))
        rows.append((x, int(big_d), summatory.delta(x, cfg.quarter_convention)))
    return Outcome(("x", "D", "delta"), rows)


def _validate_delta(cfg: RunConfig) -> None:
    p = cfg.params
    modes = [p.get("x") is not None, p.get("lo") is not None, p.get("primes") is not None]
    if sum(modes) != 1:
        raise UsageError("delta needs exactly one of --x, --lo/--hi, --primes")
    if p.get("lo") is not None:
        if p.get("hi") is None:
            raise UsageError("--lo needs --hi")
        _need(1 <= p["lo"] < p["hi"], "need 1 <= lo < hi")
        _bounded(p["hi"] - p["lo"], sieves.DEFAULT_CAPACITY, "hi - lo")
    if p.get("primes") is not None:
        lo, hi = p["primes"]
        _need(1 <= lo <= hi, "need 1 <= lo <= hi")
    if p.get("x") is not None:
        _need(all(x >= 1 for x in p["x"]), "x must be >= 1")


def run_sweep(cfg: RunConfig) -> Outcome:
    p = cfg.params
    grid = p["grid"] if p.get("grid") is not None else moments.default_grid(p["x_max"])
    report = moments.prime_moment_sweep(grid, p["segment_size"], cfg.checkpoint_path,
                                        cfg.quarter_convention, cfg.threads)
    return Outcome(moments.SWEEP_HEADER, [r.fields() for r in report.rows])


def _validate_sweep(cfg: RunConfig) -> None:
    p = cfg.params
    if (p.get("grid") is None) == (p.get("x_max") is None):
        raise UsageError("sweep needs exactly one of --x-max, --grid")
    grid = p["grid"] if p.get("grid") is not None else moments.default_grid(p["x_max"])
    if p.get("x_max") is not None:
        _need(p["x_max"] >= 1, "x_max must be >= 1")
    moments._validate_grid(grid)
    _need(p["segment_size"] >= 1, "segment size must be >= 1")


def run_mean_square(cfg: RunConfig) -> Outcome:
    p = cfg.params
    const = moments.mean_square_constant() / (6.0 * math.pi**2)
    rows = []
    for T in p["T"]:
        value = moments.continuous_mean_square(T, cfg.quarter_convention, threads=cfg.threads)
        main = const * T**1.5
        row = [T, value, main, value / main]
        if p["cross_check"]:
            quad = moments.continuous_mean_square_quadrature(T, cfg.quarter_convention, threads=cfg.threads)
            row += [quad, abs(quad - value) / abs(value) if value else 0.0]
        rows.append(tuple(row))
    header = ("T", "integral", "main", "ratio") + (("quadrature", "rel_diff") if p["cross_check"] else ())
    return Outcome(header, rows)


def _validate_mean_square(cfg: RunConfig) -> None:
    for T in cfg.params["T"]:
        _need(T >= 1, "T must be >= 1")
        _bounded(T, moments.MAX_CONTINUOUS_T, "T")


def run_discrete_mean_square(cfg: RunConfig) -> Outcome:
    p = cfg.params
    if p["samples"]:
        rows = []
        for block in summatory.delta_stream(p["x"], quarter=cfg.quarter_convention, threads=cfg.threads):
            rows.extend(zip(range(block.lo, block.hi), block.big_d.tolist(), block.delta.tolist()))
        return Outcome(("n", "D", "delta"), rows)
    value = moments.discrete_mean_square(p["x"], cfg.quarter_convention, threads=cfg.threads)
    return Outcome(("x", "D2"), [(p["x"], value)])


def _validate_discrete(cfg: RunConfig) -> None:
    x = cfg.params["x"]
    _need(x >= 1, "x must be >= 1")
    _bounded(x, 10**6 if cfg.params["samples"] else moments.MAX_DISCRETE_X, "x")


def run_furuya(cfg: RunConfig) -> Outcome:
    rows = []
    for x in cfg.params["x"]:
        r = moments.furuya_check(x, threads=cfg.threads)
        rows.append((x, r.discrete, r.continuous, r.residual, r.normalized))
    return Outcome(("x", "D2", "C2", "residual", "normalized"), rows)


def _validate_furuya(cfg: RunConfig) -> None:
    for x in cfg.params["x"]:
        _need(x >= 1, "x must be >= 1")
        _bounded(x, moments.MAX_FURUYA_X, "x")


def run_shifted(cfg: RunConfig) -> Outcome:
    T, H = cfg.params["T"], cfg.params["hmax"]
    total = moments.shifted_delta_sum(T, H, cfg.threads)
    return Outcome(("T", "Hmax", "sum", "normalized"), [(T, H, total, total / (H * T * math.log(T) ** 5))])


def _validate_shifted(cfg: RunConfig) -> None:
    moments._check_shift(cfg.params["T"], cfg.params["hmax"])


def run_voronoi(cfg: RunConfig) -> Outcome:
    p = cfg.params
    if p.get("T") is not None:
        s = voronoi.voronoi_residual_stats(p["T"], p["N"], p["samples"], cfg.quarter_convention)
        return Outcome(
            ("T", "N", "samples", "sup_ratio_max", "mean_first_power", "mean_square"),
            [(s.T, s.n_trunc, s.samples, s.sup_ratio_max, s.mean_first_power, s.mean_square)],
        )
    rows = []
    for x in p["x"]:
        ev = voronoi.delta2(x, p["N"], cfg.quarter_convention)
        rows.append((x, p["N"], voronoi.delta1(x, p["N"]), ev.delta2, ev.sup_ratio))
    return Outcome(("x", "N", "delta1", "delta2", "ratio"), rows)


def _validate_voronoi(cfg: RunConfig) -> None:
    p = cfg.params
    if (p.get("T") is None) == (p.get("x") is None):
        raise UsageError("voronoi needs exactly one of --x, --T")
    _need(p["N"] >= 1, "N must be >= 1")
    if p.get("T") is not None:
        _need(p["T"] >= 2 and p["samples"] >= 1, "need T >= 2 and samples >= 1")
        _need(p["N"] <= p["T"], "need N <= T")
    else:
        _need(all(x >= 1 for x in p["x"]), "x must be >= 1")
        _need(all(p["N"] <= x for x in p["x"]), "need N <= x")


def run_hb(cfg: RunConfig) -> Outcome:
    p = cfg.params
    z = p["z"] if p.get("z") is not None else identities.minimal_admissible_z(p["n_max"], p["k"])
    if p.get("n") is not None:
        rhs = identities.heath_brown_rhs(p["n"], p["k"], z)
        lam = sieves.sieve_segment(p["n"], p["n"] + 1).von_mangoldt(p["n"])
        return Outcome(("n", "k", "z", "lambda", "rhs"), [(p["n"], p["k"], z, lam, rhs)],
                       int(abs(rhs - lam) > p["tol"]))
    dev = identities.verify_heath_brown(p["n_max"], p["k"], z)
    return Outcome(("n_max", "k", "z", "max_deviation"), [(p["n_max"], p["k"], z, dev)], int(dev > p["tol"]))


def _validate_hb(cfg: RunConfig) -> None:
    p = cfg.params
    _need(p["k"] >= 1, "k must be >= 1")
    n_max = p["n"] if p.get("n") is not None else p["n_max"]
    if n_max is None:
        raise UsageError("hb-verify needs --n-max or --n")
    _need(n_max >= 1, "n must be >= 1")
    _bounded(n_max, identities.MAX_VERIFY_N, "n_max")
    if p.get("z") is not None:
        identities._check_range(n_max, p["k"], p["z"])
    elif p.get("n") is not None:
        p["n_max"] = p["n"]


def run_spacing(cfg: RunConfig) -> Outcome:
    p = cfg.params
    if p.get("t") is not None:
        h, m1, m2 = p["t"]
        return Outcome(("h", "m1", "m2", "alpha", "beta", "t"),
                       [(h, m1, m2, p["alpha"], p["beta"], float(spacing.t_value(h, m1, m2, p["alpha"], p["beta"])))])
    inst = spacing.SpacingInstance(p["M1"], p["M2"], p["H"], p["alpha"], p["beta"], p["tol"])
    count = spacing.count_spacing_B(inst)
    bound = spacing.proposition_bound(inst)
    return Outcome(("M1", "M2", "H", "alpha", "beta", "tol", "B", "bound", "ratio"),
                   [(inst.M1, inst.M2, inst.H, inst.alpha, inst.beta, inst.tol, count, bound, count / bound)])


def _validate_spacing(cfg: RunConfig) -> None:
    p = cfg.params
    if p.get("t") is None:
        for k in ("M1", "M2", "H", "tol"):
            if p.get(k) is None:
                raise UsageError(f"spacing needs --{k.lower()}")
        spacing.SpacingInstance(p["M1"], p["M2"], p["H"], p["alpha"], p["beta"], p["tol"])
        _bounded(p["M1"] * p["M2"] * p["H"], spacing.MAX_TRIPLES, "M1*M2*H")


def run_quadruplets(cfg: RunConfig) -> Outcome:
    p = cfg.params
    n = spacing.count_quadruplets_N(p["M"], p["delta"], p["alpha"])
    bound = spacing.robert_sargos_bound(p["M"], p["delta"])
    return Outcome(("M", "delta", "alpha", "N", "bound", "ratio"), [(p["M"], p["delta"], p["alpha"], n, bound, n / bound)])


def _validate_quadruplets(cfg: RunConfig) -> None:
    p = cfg.params
    _need(p["M"] >= 1 and p["delta"] >= 0, "need M >= 1 and delta >= 0")
    _bounded(p["M"], spacing.MAX_QUAD_M, "M")


def run_close_pairs(cfg: RunConfig) -> Outcome:
    p = cfg.params
    v = spacing.count_close_pairs(p["N"], p["X"])
    bound = spacing.close_pairs_bound(p["N"], p["X"])
    return Outcome(("N", "X", "v", "bound", "holds"), [(p["N"], p["X"], v, bound, int(v <= bound))], int(v > bound))


def _validate_close_pairs(cfg: RunConfig) -> None:
    p = cfg.params
    _need(p["N"] >= 1 and p["X"] > 0, "need N >= 1 and X > 0")
    _bounded(p["N"], spacing.MAX_CLOSE_N, "N")


def run_pair_proximity(cfg: RunConfig) -> Outcome:
    p = cfg.params
    if p.get("a") is not None:
        r = spacing.pair_proximity_check(p["a"], p["b"], p["delta"])
        rows = [suites.SuiteRow("pair_proximity", 0, float(r.lhs), r.rhs)]
    else:
        rows = suites.pair_proximity_suite(p["instances"], cfg.seed)
    bad = sum(not r.holds for r in rows)
    return Outcome(("suite", "instance", "lhs", "rhs", "holds"), [r.fields() for r in rows], bad,
                   f"seed {cfg.seed}" if bad else "")


def _validate_pair_proximity(cfg: RunConfig) -> None:
    p = cfg.params
    if (p.get("a") is None) != (p.get("b") is None):
        raise UsageError("--a and --b go together")
    if p.get("a") is not None:
        if p.get("delta") is None:
            raise UsageError("--a/--b need --delta")
        _need(len(p["a"]) > 0 and len(p["b"]) > 0 and p["delta"] >= 0, "need nonempty lists and delta >= 0")
    else:
        _need(p["instances"] >= 1, "instances must be >= 1")


def run_t_sum(cfg: RunConfig) -> Outcome:
    p = cfg.params
    r = spacing.T_sum(p["N1"], p["N2"], p["alpha"], p["beta"])
    return Outcome(("N1", "N2", "alpha", "beta", "value", "sigma1", "sigma2", "bound", "bound_ratio"),
                   [(p["N1"], p["N2"], p["alpha"], p["beta"], r.value, r.sigma1, r.sigma2, r.bound, r.bound_ratio)])


def _validate_t_sum(cfg: RunConfig) -> None:
    p = cfg.params
    _need(p["N1"] >= 1 and p["N2"] >= 1, "need N1, N2 >= 1")
    _bounded(p["N1"] * p["N2"], spacing.MAX_TSUM, "N1*N2")


def run_expsum_suite(cfg: RunConfig) -> Outcome:
    rows = suites.expsum_suite(cfg.params["instances"], cfg.seed)
    bad = sum(not r.holds for r in rows)
    return Outcome(("suite", "instance", "lhs", "rhs", "holds"), [r.fields() for r in rows], bad,
                   f"seed {cfg.seed}" if bad else "")


def _validate_expsum(cfg: RunConfig) -> None:
    _need(cfg.params["instances"] >= 1, "instances must be >= 1")


def run_type_sum(cfg: RunConfig) -> Outcome:
    p = cfg.params
    rng = np.random.default_rng(cfg.seed)
    xi = np.exp(2j * np.pi * rng.random(p["H"])) if p["random_xi"] else None
    eta = np.exp(2j * np.pi * rng.random(p["L"])) if p["eta_mode"] == "arbitrary" else None
    inst = expsums.TypeSumInstance(p["M1"], p["M2"], p["H"], p["L"], xi, eta, p["eta_mode"])
    r = expsums.type_sum_eval(inst)
    return Outcome(("M1", "M2", "H", "L", "type", "value", "abs", "bound", "ratio"),
                   [(p["M1"], p["M2"], p["H"], p["L"], r.kind, r.value, abs(r.value), r.bound, r.ratio)])


def _validate_type_sum(cfg: RunConfig) -> None:
    p = cfg.params
    _need(min(p["M1"], p["M2"], p["H"], p["L"]) >= 1, "M1, M2, H, L must be >= 1")
    _bounded(p["M1"] * p["M2"] * p["H"] * p["L"], expsums.MAX_TYPE_SUM, "M1*M2*H*L")
    probe = expsums.TypeSumInstance(p["M1"], p["M2"], p["H"], p["L"], None,
                                    np.ones(p["L"]) if p["eta_mode"] == "arbitrary" else None, p["eta_mode"])
    if not expsums.in_regime(probe):
        raise PreconditionError(f"H = {p['H']}, L = {p['L']} outside the Type {probe.kind} regime")


def run_constants(cfg: RunConfig) -> Outcome:
    r = moments.constant_C(cfg.params["n_terms"])
    return Outcome(
        ("n_terms", "partial", "tail_estimate", "value", "tail_bound", "oracle", "difference",
         "C_over_6pi2", "C_over_4pi2"),
        [(r.n_terms, r.partial, r.tail_estimate, r.value, r.tail_bound, r.oracle, r.difference,
          r.oracle / (6 * math.pi**2), r.oracle / (4 * math.pi**2))],
    )


def _validate_constants(cfg: RunConfig) -> None:
    _need(cfg.params["n_terms"] >= 1000, "n_terms must be >= 1000")
    _bounded(cfg.params["n_terms"], moments.MAX_SWEEP_X, "n_terms")


@dataclass(frozen=True)
class Subcommand:
    handler: Callable[[RunConfig], Outcome]
    operations: tuple[str, ...]
    help: str


DISPATCH: dict[str, Subcommand] = {
    "delta": Subcommand(run_delta, ("summatory.divisor_summatory", "summatory.delta", "sieves.sieve_segment",
                                    "sieves.primes_in"), "D(x) and Delta(x); sieve windows and primes"),
    "sweep": Subcommand(run_sweep, ("moments.prime_moment_sweep",), "sum of Delta^2 over primes vs main term"),
    "mean-square": Subcommand(run_mean_square, ("moments.continuous_mean_square",), "integral of Delta^2"),
    "discrete-mean-square": Subcommand(run_discrete_mean_square, ("moments.discrete_mean_square",
                                                                  "summatory.delta_stream"), "sum of Delta(n)^2"),
    "furuya": Subcommand(run_furuya, ("moments.furuya_check",), "discrete minus continuous mean square"),
    "shifted-moment": Subcommand(run_shifted, ("moments.shifted_delta_moment",), "max-shift moment of Delta"),
    "voronoi": Subcommand(run_voronoi, ("voronoi.delta1", "voronoi.delta2", "voronoi.voronoi_residual_stats"),
                          "truncated Voronoi series and its residual"),
    "hb-verify": Subcommand(run_hb, ("identities.heath_brown_rhs", "identities.verify_heath_brown"),
                            "Heath-Brown identity against Lambda"),
    "spacing": Subcommand(run_spacing, ("spacing.t_value", "spacing.count_spacing_B", "spacing.proposition_bound"),
                          "spacing count B against its bound"),
    "quadruplets": Subcommand(run_quadruplets, ("spacing.count_quadruplets_N",), "quadruplet count N(M, delta)"),
    "close-pairs": Subcommand(run_close_pairs, ("spacing.count_close_pairs",), "close pair count v(N, X)"),
    "pair-proximity": Subcommand(run_pair_proximity, ("spacing.pair_proximity_check",), "pair proximity inequality"),
    "t-sum": Subcommand(run_t_sum, ("spacing.T_sum",), "T(N1, N2, alpha, beta) against its bound"),
    "expsum-suite": Subcommand(run_expsum_suite, ("expsums.exp_sum", "expsums.exp_integral",
                                                  "expsums.sum_to_integral_residual", "expsums.first_derivative_check",
                                                  "expsums.second_derivative_ratio",
                                                  "expsums.double_large_sieve_check"), "exponential sum checks"),
    "type-sum": Subcommand(run_type_sum, ("expsums.type_sum_eval",), "Type I / II sums against their bounds"),
    "constants": Subcommand(run_constants, ("moments.constant_C",), "the mean square constant C"),
}

VALIDATORS: dict[str, Callable[[RunConfig], None]] = {
    "delta": _validate_delta,
    "sweep": _validate_sweep,
    "mean-square": _validate_mean_square,
    "discrete-mean-square": _validate_discrete,
    "furuya": _validate_furuya,
    "shifted-moment": _validate_shifted,
    "voronoi": _validate_voronoi,
    "hb-verify": _validate_hb,
    "spacing": _validate_spacing,
    "quadruplets": _validate_quadruplets,
    "close-pairs": _validate_close_pairs,
    "pair-proximity": _validate_pair_proximity,
    "t-sum": _validate_t_sum,
    "expsum-suite": _validate_expsum,
    "type-sum": _validate_type_sum,
    "constants": _validate_constants,
}


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="worker threads (env PRIMEDELTA_THREADS wins)")
    common.add_argument("--seed", type=int, default=suites.DEFAULT_SEED)
    common.add_argument("--out", default=None, help="output CSV path (default stdout)")
    q = common.add_mutually_exclusive_group()
    q.add_argument("--quarter", dest="quarter", action="store_true", default=True,
                   help="subtract 1/4 in Delta (default)")
    q.add_argument("--no-quarter", dest="quarter", action="store_false")

    parser = argparse.ArgumentParser(prog="primedelta", description="Divisor problem error term experiments.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name):
        return sub.add_parser(name, parents=[common], help=DISPATCH[name].help)

    p = add("delta")
    p.add_argument("--x", type=_number, nargs="+")
    p.add_argument("--lo", type=_integer)
    p.add_argument("--hi", type=_integer)
    p.add_argument("--primes", type=_integer, nargs=2, metavar=("LO", "HI"))

    p = add("sweep")
    p.add_argument("--x-max", type=_integer)
    p.add_argument("--grid", type=_int_list, help="comma separated ascending x values")
    p.add_argument("--segment-size", type=_integer, default=sieves.DEFAULT_CAPACITY)
    p.add_argument("--checkpoint", default=None)

    p = add("mean-square")
    p.add_argument("--T", type=_integer, nargs="+", required=True)
    p.add_argument("--cross-check", action="store_true", help="also integrate by quadrature")

    p = add("discrete-mean-square")
    p.add_argument("--x", type=_integer, required=True)
    p.add_argument("--samples", action="store_true", help="emit every (n, D(n), Delta(n)) instead")

    p = add("furuya")
    p.add_argument("--x", type=_integer, nargs="+", required=True)

    p = add("shifted-moment")
    p.add_argument("--T", type=_integer, required=True)
    p.add_argument("--hmax", type=_integer, required=True)

    p = add("voronoi")
    p.add_argument("--x", type=_number, nargs="+")
    p.add_argument("--T", type=_integer)
    p.add_argument("--N", type=_integer, required=True)
    p.add_argument("--samples", type=_integer, default=10001)

    p = add("hb-verify")
    p.add_argument("--n-max", type=_integer)
    p.add_argument("--n", type=_integer, help="evaluate a single n")
    p.add_argument("--k", type=_integer, required=True)
    p.add_argument("--z", type=float, default=None, help="default: smallest admissible z")
    p.add_argument("--tol", type=float, default=1e-8)

    p = add("spacing")
    p.add_argument("--m1", dest="M1", type=_integer)
    p.add_argument("--m2", dest="M2", type=_integer)
    p.add_argument("--h", dest="H", type=_integer)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--tol", type=float)
    p.add_argument("--t", type=_integer, nargs=3, metavar=("H", "M1", "M2"), help="a single t(h, m1, m2)")

    p = add("quadruplets")
    p.add_argument("--m", dest="M", type=_integer, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.5)

    p = add("close-pairs")
    p.add_argument("--n", dest="N", type=_integer, required=True)
    p.add_argument("--x", dest="X", type=float, required=True)

    p = add("pair-proximity")
    p.add_argument("--a", type=_float_list)
    p.add_argument("--b", type=_float_list)
    p.add_argument("--delta", type=float)
    p.add_argument("--instances", type=_integer, default=1000)

    p = add("t-sum")
    p.add_argument("--n1", dest="N1", type=_integer, required=True)
    p.add_argument("--n2", dest="N2", type=_integer, required=True)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=0.5)

    p = add("expsum-suite")
    p.add_argument("--instances", type=_integer, default=1000)

    p = add("type-sum")
    p.add_argument("--m1", dest="M1", type=_integer, required=True)
    p.add_argument("--m2", dest="M2", type=_integer, required=True)
    p.add_argument("--h", dest="H", type=_integer, required=True)
    p.add_argument("--l", dest="L", type=_integer, required=True)
    p.add_argument("--eta-mode", choices=("ones", "log", "arbitrary"), default="ones")
    p.add_argument("--random-xi", action="store_true", help="unimodular xi from the seed")

    p = add("constants")
    p.add_argument("--n-terms", type=_integer, default=10**6)
    return parser


_GLOBAL_KEYS = {"subcommand", "threads", "seed", "out", "quarter", "checkpoint"}


def config_from_args(argv: list[str] | None = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    values = vars(args)
    params = {k: v for k, v in values.items() if k not in _GLOBAL_KEYS}
    return RunConfig(
        subcommand=args.subcommand,
        params=params,
        threads=resolve_threads(args.threads),
        seed=args.seed,
        out_path=args.out,
        checkpoint_path=values.get("checkpoint"),
        quarter_convention=args.quarter,
    )


def run(config: RunConfig) -> int:
    config.validate()
    outcome = DISPATCH[config.subcommand].handler(config)
    write_atomic(config.out_path, outcome.text())
    if outcome.violations:
        print(f"primedelta: {outcome.violations} check(s) violated {outcome.note}".rstrip(), file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    try:
        config = config_from_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    except ValueError as exc:
        print(f"primedelta: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run(config)
    except UsageError as exc:
        print(f"primedelta: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"primedelta: refused: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except BudgetExceeded as exc:
        print(f"primedelta: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except CheckpointError as exc:
        print(f"primedelta: checkpoint: {exc}", file=sys.stderr)
        return EXIT_CHECKPOINT
    except PrimeDeltaError as exc:
        print(f"primedelta: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
