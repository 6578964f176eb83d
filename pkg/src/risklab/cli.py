"""Command-line entry point: ``risklab <command> [options]``.

Exit status is 0 on success, 1 for configuration errors and 2 for numerical
failures (singular covariance, eigensolver non-convergence).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from risklab.errors import ConvergenceError, ParseError, RisklabError, SingularError
from risklab.game import GameSpec, Mix, best_annealed_score, expected_score_annealed, expected_score_quenched
from risklab.harness import (
    ChernoffRecord,
    ConcentrationRecord,
    SweepRecord,
    chernoff_check,
    persist,
    self_averaging_scan,
    sweep,
)
from risklab.market import EnsembleSpec, ReturnMatrix, sample_return_matrix
from risklab.risk import analyze
from risklab.spectrum import MpLaw, empirical_spectrum, mp_bin_density, write_histogram_csv
from risklab.theory import free_energy_theory, lambda_beta, phi, rate_free_energy, rate_risk, theory_point

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2
SEED_ENV = "RISKLAB_SEED"

log = logging.getLogger("risklab")


class ConfigError(RisklabError, ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"invalid {field_name}: {message}")
        self.field = field_name


# -- parsing helpers -------------------------------------------------------------


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (stop included within half a step) or a comma list."""
    text = text.strip()
    if ":" not in text:
        try:
            return [float(v) for v in text.split(",") if v.strip()]
        except ValueError as exc:
            raise ConfigError("alpha grid", str(exc)) from None
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError("alpha grid", f"expected start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError("alpha grid", str(exc)) from None
    if not step > 0 or stop < start:
        raise ConfigError("alpha grid", f"need step > 0 and stop >= start, got {text!r}")
    out = []
    k = 0
    while start + k * step <= stop + step / 2:
        out.append(round(start + k * step, 12))
        k += 1
    return out


def parse_int_list(text: str, name: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(name, f"expected comma-separated integers, got {text!r}") from None


def load_return_matrix_csv(path: str | Path) -> ReturnMatrix:
    """Read raw returns (N rows of p scenarios); scaling by 1/sqrt(N) happens here."""
    rows: list[list[float]] = []
    with Path(path).open(newline="") as fh:
        for r, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            vals = []
            for c, cell in enumerate(row, start=1):
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise ParseError(f"not a number: {cell!r}", row=r, column=c) from None
            if rows and len(vals) != len(rows[0]):
                raise ParseError(f"expected {len(rows[0])} columns, found {len(vals)}", row=r)
            rows.append(vals)
    if len(rows) < 2:
        raise ParseError("need at least two assets (rows)")
    return ReturnMatrix.from_raw(np.array(rows))


def write_return_matrix_csv(x: ReturnMatrix, path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in x.raw:
            w.writerow([repr(float(v)) for v in row])


# -- configuration ------------------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    alpha: float | None = None
    alphas: list[float] = field(default_factory=list)
    n_assets: int | None = None
    n_list: list[int] = field(default_factory=list)
    n_samples: int | None = None
    beta: float | None = None
    seed: int = 0
    out: str | None = None
    threads: int = 1
    bins: int = 40
    thresholds: list[float] | None = None
    case: str = "all"
    trials: int = 100_000

    def validate(self) -> "RunConfig":
        if self.seed < 0:
            raise ConfigError("seed", "must be nonnegative")
        if self.threads < 1:
            raise ConfigError("threads", "must be >= 1")
        if self.alpha is not None and not self.alpha > 0:
            raise ConfigError("alpha", f"must be > 0, got {self.alpha}")
        if any(not a > 0 for a in self.alphas):
            raise ConfigError("alpha grid", "every alpha must be > 0")
        if self.n_assets is not None and self.n_assets < 2:
            raise ConfigError("n", f"must be >= 2, got {self.n_assets}")
        if any(n < 2 for n in self.n_list):
            raise ConfigError("n-list", "every N must be >= 2")
        if self.n_samples is not None and self.n_samples < 1:
            raise ConfigError("samples", f"must be >= 1, got {self.n_samples}")
        if self.beta is not None and not self.beta > 0:
            raise ConfigError("beta", f"must be > 0, got {self.beta}")
        if self.bins < 1:
            raise ConfigError("bins", "must be >= 1")
        if self.trials < 2:
            raise ConfigError("trials", "must be >= 2")
        if self.case not in ("a", "b", "c", "d", "all"):
            raise ConfigError("case", f"must be one of a, b, c, d, all; got {self.case!r}")
        if self.command in ("scan", "chernoff", "spectrum") and self.alpha is None:
            raise ConfigError("alpha", "required")
        if self.command in ("scan", "chernoff") and not self.alpha > 1:
            raise ConfigError("alpha", f"must be > 1 for {self.command}, got {self.alpha}")
        if self.command == "sweep" and not self.alphas:
            raise ConfigError("alpha grid", "required")
        return self


def _default_out(cfg: RunConfig, label: str) -> str:
    return f"{cfg.command}_{label}_{cfg.n_assets}_{cfg.seed}.csv"


# -- subcommands ------------------------------------------------------------------


def _fmt(v: float) -> str:
    return "inf" if math.isinf(v) else f"{v:.6g}"


def cmd_theory(cfg: RunConfig, args) -> int:
    tp = theory_point(cfg.alpha)
    print(f"alpha={_fmt(tp.alpha)} eps_q={_fmt(tp.eps_quenched)} qw_q={_fmt(tp.qw_quenched)} "
          f"eps_or={_fmt(tp.eps_annealed)} qw_or={_fmt(tp.qw_annealed)}")
    if cfg.alpha > 1:
        beta = 1.0 if cfg.beta is None else cfg.beta
        print(f"beta={_fmt(beta)} Lambda={lambda_beta(cfg.alpha, beta):.10g} "
              f"f_theory={free_energy_theory(cfg.alpha, beta):.10g} "
              f"risk_localization={(cfg.alpha - 1) / 2 + 1 / (2 * beta):.10g}")
        if args.n_replica is not None:
            print(f"phi(n={args.n_replica:g})={phi(args.n_replica, cfg.alpha, beta):.10g}")
        if args.f_tilde is not None:
            for side in ("plus", "minus"):
                rv = rate_free_energy(cfg.alpha, beta, args.f_tilde, side)
                print(f"R_{side}(f={args.f_tilde:g})={_fmt(rv.value)} [{rv.branch}]")
        if args.eps_tilde is not None:
            for side in ("plus", "minus"):
                rv = rate_risk(cfg.alpha, beta, args.eps_tilde, side)
                print(f"R_{side}(eps={args.eps_tilde:g})={_fmt(rv.value)} [{rv.branch}]")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, args) -> int:
    records = sweep(cfg.alphas, cfg.n_assets, cfg.n_samples, cfg.seed, threads=cfg.threads)
    label = "grid" + args.alpha_grid.replace(":", "-").replace(",", "_")
    out = cfg.out or _default_out(cfg, label)
    persist(records, out, SweepRecord, config=asdict(cfg), seed=cfg.seed)
    print(f"{'alpha':>7} {'eps':>10} {'+-':>8} {'theory':>8} {'OR':>6} {'q_w':>9} {'+-':>8} {'theory':>8}")
    for r in records:
        print(f"{r.alpha_realized:7.3f} {r.eps_mean:10.5f} {r.eps_stderr:8.5f} {r.eps_theory:8.4f} "
              f"{r.eps_or:6.2f} {r.qw_mean:9.5f} {r.qw_stderr:8.5f} {r.qw_theory:8.4f}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_scan(cfg: RunConfig, args) -> int:
    beta = 1.0 if cfg.beta is None else cfg.beta
    records = self_averaging_scan(cfg.alpha, cfg.n_list, cfg.n_samples, cfg.seed, beta=beta, threads=cfg.threads)
    out = cfg.out or f"scan_{cfg.alpha:g}_{'-'.join(map(str, cfg.n_list))}_{cfg.seed}.csv"
    persist(records, out, ConcentrationRecord, config=asdict(cfg), seed=cfg.seed)
    for r in records:
        print(f"N={r.n_assets:5d} {r.statistic:12s} mean={r.mean:.6f} var={r.variance:.3e} theory={r.theory:.6f}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_chernoff(cfg: RunConfig, args) -> int:
    beta = 1.0 if cfg.beta is None else cfg.beta
    records = chernoff_check(cfg.alpha, beta, cfg.n_assets, cfg.n_samples, cfg.thresholds, cfg.seed,
                             threads=cfg.threads)
    out = cfg.out or _default_out(cfg, f"{cfg.alpha:g}")
    persist(records, out, ChernoffRecord, config=asdict(cfg), seed=cfg.seed)
    for r in records:
        print(f"f~={r.threshold:.5f} {r.side:5s} emp={r.empirical:.4f}+-{r.stderr:.4f} "
              f"bound={r.bound:.4g} {'PASS' if r.passed else 'FAIL'}")
    print(f"wrote {out}")
    return EXIT_OK if all(r.passed for r in records) else EXIT_NUMERIC


def cmd_spectrum(cfg: RunConfig, args) -> int:
    spec = EnsembleSpec(cfg.n_assets, cfg.alpha, cfg.seed, args.sample_index + 1)
    x = sample_return_matrix(spec, args.sample_index)
    hist = empirical_spectrum(x, cfg.bins)
    mp = mp_bin_density(MpLaw(x.realized_alpha), hist.edges)
    out = cfg.out or _default_out(cfg, f"{cfg.alpha:g}")
    write_histogram_csv(hist, out, mp=mp)
    print(f"max |empirical - MP| over {cfg.bins} bins: {np.max(np.abs(hist.density - mp)):.4f}")
    print(f"wrote {out}")
    return EXIT_OK


GAME_CASES = {
    # label: (constraint, sets, known value)
    "b": ("none", 1, 300.0),
    "c": ("equal_counts", 1, 500 / 3),
    "d": ("same_hand_across_sets", 5, 5000 / 9),
}


def cmd_game(cfg: RunConfig, args) -> int:
    uniform = Mix.uniform()
    rows = []
    if cfg.case in ("a", "all"):
        biased = Mix(Fraction(2, 3), Fraction(1, 6), Fraction(1, 6))
        rows.append(("a uniform vs uniform", 0.0,
                     expected_score_annealed(uniform, GameSpec(uniform, args.rounds, "annealed")), None))
        rows.append(("a paper vs (2/3,1/6,1/6)", 150.0,
                     expected_score_annealed(Mix.pure(1), GameSpec(biased, args.rounds, "annealed")), None))
    for label, (constraint, sets, known) in GAME_CASES.items():
        if cfg.case not in (label, "all"):
            continue
        spec = GameSpec(uniform, args.rounds, "quenched", constraint, sets=sets)
        mean, se = expected_score_quenched(spec, cfg.trials, cfg.seed)
        rows.append((f"{label} {constraint} x{sets}", known, mean, se))
        rows.append((f"{label} best annealed", None, best_annealed_score(spec), None))

    print(f"{'case':32s} {'analytic':>10s} {'value':>12s} {'stderr':>9s}")
    for name, known, value, se in rows:
        k = "-" if known is None else f"{known:.4f}"
        s = "-" if se is None else f"{se:.4f}"
        print(f"{name:32s} {k:>10s} {value:12.4f} {s:>9s}")
    return EXIT_OK


def cmd_risk(cfg: RunConfig, args) -> int:
    if args.csv:
        x = load_return_matrix_csv(args.csv)
    else:
        if cfg.alpha is None or cfg.n_assets is None:
            raise ConfigError("alpha", "risk needs --csv or both --alpha and --n")
        spec = EnsembleSpec(cfg.n_assets, cfg.alpha, cfg.seed, args.sample_index + 1)
        x = sample_return_matrix(spec, args.sample_index)
    stats = analyze(x, cfg.beta)
    print(f"N={x.n_assets} p={x.n_scenarios} alpha={x.realized_alpha:.6g} "
          f"epsilon={stats.epsilon:.10g} q_w={stats.q_w:.10g}")
    if cfg.beta is not None:
        print(f"beta={cfg.beta:g} f={stats.f_value:.10g}")
    if x.realized_alpha > 1:
        tp = theory_point(x.realized_alpha)
        print(f"theory: eps={tp.eps_quenched:.6g} q_w={tp.qw_quenched:.6g} (OR: eps={tp.eps_annealed:.6g} q_w=1)")
    return EXIT_OK


COMMANDS = {
    "theory": cmd_theory,
    "sweep": cmd_sweep,
    "scan": cmd_scan,
    "chernoff": cmd_chernoff,
    "spectrum": cmd_spectrum,
    "game": cmd_game,
    "risk": cmd_risk,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="risklab", description=__doc__.splitlines()[0], formatter_class=fmt)
    parser.add_argument("--config", help="JSON file whose keys supply defaults for the subcommand flags")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, *, seed=True, threads=False, out=False):
        if seed:
            p.add_argument("--seed", type=int, default=None,
                           help=f"master seed (falls back to ${SEED_ENV}, then 0)")
        if threads:
            p.add_argument("--threads", type=int, default=1, help="worker threads for sample evaluation")
        if out:
            p.add_argument("--out", default=None,
                           help="output CSV (default <command>_<alpha|grid>_<N>_<seed>.csv)")

    subs = {}
    p = subs["theory"] = sub.add_parser("theory", help="closed-form predictions", formatter_class=fmt)
    p.add_argument("--alpha", type=float, required=True, help="scenario ratio p/N")
    p.add_argument("--beta", type=float, default=None, help="inverse temperature (default 1)")
    p.add_argument("--n-replica", type=float, default=None, help="evaluate phi at this replica number")
    p.add_argument("--f-tilde", type=float, default=None, help="free-energy threshold for rate functions")
    p.add_argument("--eps-tilde", type=float, default=None, help="risk threshold for rate functions")

    p = subs["sweep"] = sub.add_parser("sweep", help="quenched risk/concentration vs alpha", formatter_class=fmt)
    p.add_argument("--alpha-grid", default="1.2:8.0:0.4", help="start:stop:step or comma list")
    p.add_argument("--n", type=int, default=500, help="number of assets N")
    p.add_argument("--samples", type=int, default=50, help="return matrices per alpha")
    common(p, threads=True, out=True)

    p = subs["scan"] = sub.add_parser("scan", help="self-averaging variance scan over N", formatter_class=fmt)
    p.add_argument("--alpha", type=float, default=2.0, help="scenario ratio p/N")
    p.add_argument("--n-list", default="100,200,400", help="comma-separated N values")
    p.add_argument("--samples", type=int, default=200, help="return matrices per N")
    p.add_argument("--beta", type=float, default=1.0, help="inverse temperature for the free energy")
    common(p, threads=True, out=True)

    p = subs["chernoff"] = sub.add_parser("chernoff", help="empirical tails vs Chernoff bounds", formatter_class=fmt)
    p.add_argument("--alpha", type=float, default=2.0, help="scenario ratio p/N")
    p.add_argument("--beta", type=float, default=1.0, help="inverse temperature")
    p.add_argument("--n", type=int, default=200, help="number of assets N")
    p.add_argument("--samples", type=int, default=500, help="return matrices")
    p.add_argument("--thresholds", default=None,
                   help="comma-separated free-energy thresholds (default: typical value +-0.02..0.15)")
    common(p, threads=True, out=True)

    p = subs["spectrum"] = sub.add_parser("spectrum", help="eigenvalue histogram with MP overlay", formatter_class=fmt)
    p.add_argument("--alpha", type=float, default=2.0, help="scenario ratio p/N")
    p.add_argument("--n", type=int, default=400, help="number of assets N")
    p.add_argument("--bins", type=int, default=40, help="histogram bins over [0, 1.1 lambda_+]")
    p.add_argument("--sample-index", type=int, default=0, help="which ensemble member to use")
    common(p, out=True)

    p = subs["game"] = sub.add_parser("game", help="rock-paper-scissors foreknowledge game", formatter_class=fmt)
    p.add_argument("--case", default="all", help="a, b, c, d or all")
    p.add_argument("--trials", type=int, default=100_000, help="Monte Carlo trials")
    p.add_argument("--rounds", type=int, default=300, help="rounds per set")
    common(p)

    p = subs["risk"] = sub.add_parser("risk", help="minimal risk of one return matrix", formatter_class=fmt)
    p.add_argument("--csv", default=None, help="raw returns, one asset per row")
    p.add_argument("--alpha", type=float, default=None, help="scenario ratio when sampling")
    p.add_argument("--n", type=int, default=None, help="number of assets when sampling")
    p.add_argument("--beta", type=float, default=None, help="also report the free energy at this beta")
    p.add_argument("--sample-index", type=int, default=0, help="which ensemble member to use")
    common(p)
    return parser, subs


def _config_from_args(args) -> RunConfig:
    seed = getattr(args, "seed", None)
    if seed is None:
        env = os.environ.get(SEED_ENV)
        if env is not None:
            try:
                seed = int(env)
            except ValueError:
                raise ConfigError("seed", f"${SEED_ENV}={env!r} is not an integer") from None
        else:
            seed = 0
    cfg = RunConfig(command=args.command, seed=seed)
    for name in ("alpha", "beta", "out", "threads", "bins", "case", "trials"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    if hasattr(args, "n"):
        cfg.n_assets = args.n
    if hasattr(args, "samples"):
        cfg.n_samples = args.samples
    if getattr(args, "alpha_grid", None):
        cfg.alphas = parse_grid(args.alpha_grid)
    if getattr(args, "n_list", None):
        cfg.n_list = parse_int_list(args.n_list, "n-list")
    if getattr(args, "thresholds", None):
        cfg.thresholds = parse_grid(args.thresholds)
    return cfg.validate()


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    try:
        if args.config:
            try:
                overrides = json.loads(Path(args.config).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError("config", str(exc)) from None
            if not isinstance(overrides, dict):
                raise ConfigError("config", "top level must be a JSON object")
            sp = subs[args.command]
            known = {a.dest for a in sp._actions}
            unknown = set(overrides) - known
            if unknown:
                raise ConfigError("config", f"unknown keys {sorted(unknown)}")
            sp.set_defaults(**overrides)
            try:
                args = parser.parse_args(argv)
            except SystemExit as exc:
                return int(exc.code or 0)
        cfg = _config_from_args(args)
        return COMMANDS[cfg.command](cfg, args)
    except (SingularError, ConvergenceError) as exc:
        print(f"risklab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (RisklabError, ValueError) as exc:
        print(f"risklab: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"risklab: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
