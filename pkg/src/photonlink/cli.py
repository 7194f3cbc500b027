"""Command-line front end.

Every subcommand writes CSV (UTF-8, LF) to ``--out`` or stdout, preceded by one
``#`` provenance line echoing the tool version and all parameters. Exit status
is 0 on success, 1 on a computation error and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import re
import sys

import numpy as np
from scipy.stats import norm

from . import __version__
from ._sweep import SweepError
from .absorber import MAX_CHAIN, optimize_chain
from .hbt_channel import DEFAULT_COHERENT_PROBS, DEFAULT_THERMAL_PROBS, HbtChannelParams, hbt_rate_curve
from .mixture import em_fit
from .poisson_channel import rate_curve
from .radiometry import LinkBudget, slot_statistics
from .reconstruction import (
    DualPathConfig,
    MomentTable,
    dual_path_outputs,
    dual_path_recover_with_errors,
    invert_moments,
    single_path_samples,
)
from .simulator import SimConfig, block_rng, run_simulation

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib


class UsageError(Exception):
    pass


class Range(list):
    """Expanded range values that remember the text they came from."""

    def __init__(self, values, text: str):
        super().__init__(values)
        self.text = text


def parse_range(text: str) -> Range:
    """``start:stop:step`` (inclusive of ``stop``) or a single number."""
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed range {text!r}") from None
    if len(nums) == 1:
        return Range(nums, text)
    if len(nums) != 3:
        raise argparse.ArgumentTypeError(f"range must be start:stop:step, got {text!r}")
    start, stop, step = nums
    if not step > 0 or stop < start:
        raise argparse.ArgumentTypeError(f"range needs step > 0 and stop >= start, got {text!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return Range([round(start + i * step, 10) for i in range(n)], text)


def parse_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed list {text!r}") from None


def parse_triple(text: str) -> tuple:
    vals = parse_list(text)
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated values, got {text!r}")
    return tuple(vals)


def parse_int_range(text: str) -> list[int]:
    vals = parse_range(text)
    if any(v != int(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}")
    return Range([int(v) for v in vals], text)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _provenance(command: str, args: argparse.Namespace) -> str:
    skip = {"command", "func", "out"}
    items = []
    for key in sorted(vars(args)):
        if key in skip:
            continue
        val = getattr(args, key)
        if isinstance(val, Range):
            val = val.text
        elif isinstance(val, (list, tuple)):
            val = ",".join(_fmt(v) for v in val)
        items.append(f"{key}={val}")
    return f"# photonlink {__version__} {command} " + " ".join(items)


def _write_csv(args, header, rows, extra_comments=()):
    buf = io.StringIO()
    buf.write(_provenance(args.command, args) + "\n")
    for line in extra_comments:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) if not isinstance(v, str) else v for v in r])
    text = buf.getvalue()
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _check_output(path) -> bool:
    """Fail early on an unwritable path; returns True if the file was created."""
    if path in (None, "-"):
        return False
    existed = os.path.exists(path)
    try:
        with open(path, "a", encoding="utf-8"):
            pass
    except OSError as exc:
        raise UsageError(f"cannot write output file {path!r}: {exc.strerror}") from None
    return not existed


def cmd_rate_sweep(args):
    if not args.freq_ghz > 0 or not args.slot_ms > 0:
        raise UsageError("--freq-ghz and --slot-ms must be > 0")
    if not 0.0 <= args.capture_p <= 1.0:
        raise UsageError("--capture-p must lie in [0, 1]")
    if not args.temp_k or any(t < 0 for t in args.temp_k):
        raise UsageError("--temp-k needs nonnegative temperatures")
    powers = args.power_dbm
    freq = args.freq_ghz * 1e9
    slot = args.slot_ms * 1e-3
    rows = []
    for temp in args.temp_k:
        budgets = [LinkBudget(p, freq, slot, temp, args.capture_p) for p in powers]
        try:
            if args.channel == "poisson":
                pts = rate_curve(budgets, args.mode)
                rows += [(p.power_dbm, temp, p.threshold, p.prior_one, p.rate_bits) for p in pts]
            else:
                tmpl = HbtChannelParams(args.coherent_probs, args.thermal_probs)
                pts = hbt_rate_curve(budgets, tmpl)
                rows += [(p.power_dbm, temp, p.prior_one, p.rate_bits) for p in pts]
        except SweepError as exc:
            raise SweepError(exc.index, exc.power_dbm, RuntimeError(f"temp_k={temp:g}: {exc.cause}")) from exc
    if args.channel == "poisson":
        header = ["power_dbm", "temp_k", "threshold_opt", "prior_opt", "rate_bits"]
    else:
        header = ["power_dbm", "temp_k", "prior_opt", "rate_bits"]
    _write_csv(args, header, rows)


def cmd_absorber_design(args):
    rows = []
    for n in args.n:
        if not 1 <= n <= MAX_CHAIN:
            raise UsageError(f"--n must lie in 1..{MAX_CHAIN}, got {n}")
        opt = optimize_chain(n)
        rows.append((n, opt.best_gamma, opt.best_phase, opt.best_absorption))
    _write_csv(args, ["N", "gamma_opt", "phase_opt", "absorption_opt"], rows)


def _reconstruct_single(args, rng):
    k = args.order
    n = args.samples
    beta = complex(args.amplitude)
    noise_sd = math.sqrt(args.noise_var / 2.0)

    def noise(size):
        return rng.normal(0.0, noise_sd, size) + 1j * rng.normal(0.0, noise_sd, size)

    measured = single_path_samples(np.full(n, beta), noise(n), args.gain)
    vacuum = single_path_samples(np.zeros(n), noise(n), args.gain)
    recovered = invert_moments(MomentTable.from_samples(measured, k),
                               MomentTable.from_samples(vacuum, k), args.gain)
    truth = MomentTable.coherent(beta, k)
    nb = args.batches
    batches = [
        invert_moments(MomentTable.from_samples(m, k), MomentTable.from_samples(v, k), args.gain).values
        for m, v in zip(np.array_split(measured, nb), np.array_split(vacuum, nb))
    ]
    se = np.abs(np.array(batches).std(axis=0, ddof=1)) / math.sqrt(nb)
    rows = []
    for n_ in range(k + 1):
        for m_ in range(k + 1 - n_):
            r, t = recovered[n_, m_], truth[n_, m_]
            rows.append(("signal", n_, m_, r.real, r.imag, t.real, t.imag, se[n_, m_]))
    return rows


def _reconstruct_dual(args, rng):
    k = args.order
    n = args.samples
    s = rng.normal(args.signal_mean, math.sqrt(args.signal_var), n)
    v = rng.normal(0.0, math.sqrt(args.ref_var), n)
    x1 = rng.normal(0.0, math.sqrt(args.noise_var), n)
    x2 = rng.normal(0.0, math.sqrt(args.noise_var), n)
    c1, c2 = dual_path_outputs(s, v, x1, x2, args.gain)
    ref = tuple(norm.moment(j, 0.0, math.sqrt(args.ref_var)) if j else 1.0 for j in range(k + 1))
    res = dual_path_recover_with_errors(c1, c2, DualPathConfig(args.gain, ref, k), args.batches)
    rows = []
    for name, est, err, mean, var in (
        ("signal", res.signal_moments, res.signal_stderr, args.signal_mean, args.signal_var),
        ("noise1", res.noise1_moments, res.noise1_stderr, 0.0, args.noise_var),
        ("noise2", res.noise2_moments, res.noise2_stderr, 0.0, args.noise_var),
    ):
        for j in range(k + 1):
            true = norm.moment(j, mean, math.sqrt(var)) if j else 1.0
            rows.append((name, j, "", est[j], 0.0, true, 0.0, err[j]))
    return rows


def cmd_reconstruct(args):
    if args.order < 1:
        raise UsageError("--order must be >= 1")
    if args.samples < 2 * args.batches:
        raise UsageError("--samples must be at least twice --batches")
    rng = block_rng(args.seed, 0)
    rows = _reconstruct_single(args, rng) if args.scheme == "single" else _reconstruct_dual(args, rng)
    header = ["quantity", "n", "m", "recovered_real", "recovered_imag", "true_real", "true_imag", "std_error"]
    _write_csv(args, header, rows)


def cmd_em_fit(args):
    try:
        with open(args.input, encoding="utf-8") as fh:
            tokens = fh.read().split()
    except OSError as exc:
        raise UsageError(f"cannot read {args.input!r}: {exc.strerror}") from None
    try:
        samples = np.array([int(t) for t in tokens], dtype=np.int64)
    except ValueError:
        raise UsageError(f"{args.input!r} must contain whitespace-separated integer counts") from None
    if samples.size == 0:
        raise UsageError(f"{args.input!r} holds no samples")
    res = em_fit(samples, args.k, max_iter=args.max_iter, tol=args.tol)
    mix = res.mixture.sorted()
    rows = [(i, w, m) for i, (w, m) in enumerate(zip(mix.weights, mix.means))]
    notes = [
        f"log_likelihood={_fmt(res.log_likelihoods[-1])} n_iter={res.n_iter} "
        f"converged={res.converged} degenerate={res.degenerate}"
    ]
    _write_csv(args, ["component", "weight", "mean"], rows, notes)


SIM_KEYS = {
    "channel", "power_dbm", "freq_ghz", "slot_ms", "temp_k", "capture_p", "prior",
    "n_symbols", "detector", "threshold", "coherent_probs", "thermal_probs", "seed",
}


def load_sim_config(path: str, seed: int | None) -> SimConfig:
    """Build a :class:`SimConfig` from a flat TOML key file (dBm, GHz, ms, K)."""
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path!r}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"{path!r}: {exc}") from None
    unknown = set(cfg) - SIM_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    try:
        budget = LinkBudget(
            float(cfg["power_dbm"]),
            float(cfg.get("freq_ghz", 5.0)) * 1e9,
            float(cfg.get("slot_ms", 1.0)) * 1e-3,
            float(cfg.get("temp_k", 300.0)),
            float(cfg.get("capture_p", 1.0)),
        )
        kind = cfg.get("channel", "poisson")
        hbt = None
        if kind == "hbt":
            hbt = HbtChannelParams(tuple(cfg.get("coherent_probs", DEFAULT_COHERENT_PROBS)),
                                   tuple(cfg.get("thermal_probs", DEFAULT_THERMAL_PROBS)))
        return SimConfig(
            stats=slot_statistics(budget),
            channel_kind=kind,
            hbt_params=hbt,
            prior_one=float(cfg.get("prior", 0.5)),
            n_symbols=int(cfg.get("n_symbols", 100_000)),
            seed=int(seed if seed is not None else cfg.get("seed", 0)),
            detector=cfg.get("detector", "map"),
            threshold=int(cfg.get("threshold", 0)),
        )
    except KeyError as exc:
        raise UsageError(f"config is missing required key {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid config: {exc}") from None


def cmd_simulate(args):
    config = load_sim_config(args.config, args.seed)
    rep = run_simulation(config)
    rows = [
        ("n_symbols", rep.n_symbols),
        ("n_errors", rep.n_errors),
        ("empirical_error_rate", rep.empirical_error_rate),
        ("error_ci_low", rep.error_ci[0]),
        ("error_ci_high", rep.error_ci[1]),
        ("analytic_error_rate", rep.analytic_error_rate),
        ("analytic_error_sigma", rep.error_sigma),
        ("empirical_mi_bits", rep.empirical_mi_estimate),
    ]
    for x in (0, 1):
        for y in (0, 1):
            rows.append((f"joint_x{x}_y{y}", int(rep.joint_counts[x, y])))
    _write_csv(args, ["metric", "value"], rows)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="photonlink", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"photonlink {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    rs = sub.add_parser("rate-sweep", help="achievable rate vs received power")
    rs.add_argument("--channel", choices=("poisson", "hbt"), default="poisson")
    rs.add_argument("--mode", choices=("hard", "soft"), default="hard",
                    help="decision mode for the Poisson channel")
    rs.add_argument("--temp-k", type=parse_list, required=True, help="comma-separated antenna temperatures")
    rs.add_argument("--power-dbm", type=parse_range, required=True, help="start:stop:step in dBm")
    rs.add_argument("--freq-ghz", type=float, default=5.0)
    rs.add_argument("--slot-ms", type=float, default=1.0)
    rs.add_argument("--capture-p", type=float, default=0.9)
    rs.add_argument("--coherent-probs", type=parse_triple, default=DEFAULT_COHERENT_PROBS)
    rs.add_argument("--thermal-probs", type=parse_triple, default=DEFAULT_THERMAL_PROBS)
    rs.add_argument("--out")
    rs.set_defaults(func=cmd_rate_sweep)

    ad = sub.add_parser("absorber-design", help="optimal homogeneous absorber chains")
    ad.add_argument("--n", type=parse_int_range, required=True, help="N or start:stop:step")
    ad.add_argument("--out")
    ad.set_defaults(func=cmd_absorber_design)

    rc = sub.add_parser("reconstruct", help="moment reconstruction on synthetic data")
    rc.add_argument("--scheme", choices=("single", "dual"), required=True)
    rc.add_argument("--order", type=int, default=4)
    rc.add_argument("--samples", type=int, default=1_000_000)
    rc.add_argument("--seed", type=int, default=0)
    rc.add_argument("--gain", type=float, default=None, help="default 4 (single) or 2 (dual)")
    rc.add_argument("--amplitude", type=complex, default=0.5, help="coherent amplitude (single)")
    rc.add_argument("--noise-var", type=float, default=1.0)
    rc.add_argument("--signal-mean", type=float, default=1.0, help="dual scheme")
    rc.add_argument("--signal-var", type=float, default=0.25, help="dual scheme")
    rc.add_argument("--ref-var", type=float, default=4.0, help="dual scheme")
    rc.add_argument("--batches", type=int, default=100)
    rc.add_argument("--out")
    rc.set_defaults(func=cmd_reconstruct)

    em = sub.add_parser("em-fit", help="fit a Poisson mixture to counts")
    em.add_argument("--k", type=int, required=True)
    em.add_argument("--input", required=True, help="file of whitespace-separated counts")
    em.add_argument("--tol", type=float, default=1e-8)
    em.add_argument("--max-iter", type=int, default=1000)
    em.add_argument("--out")
    em.set_defaults(func=cmd_em_fit)

    sm = sub.add_parser("simulate", help="Monte Carlo link simulation")
    sm.add_argument("--config", required=True, help="flat TOML key file")
    sm.add_argument("--seed", type=int, default=None)
    sm.add_argument("--out")
    sm.set_defaults(func=cmd_simulate)
    return p


_NEGATIVE_VALUE = re.compile(r"^-(\d|\.\d)")


def _attach_negative_values(argv):
    """Turn ``--flag -170:-140:1`` into ``--flag=-170:-140:1`` for argparse."""
    out = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NEGATIVE_VALUE.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def parse_and_dispatch(argv=None) -> int:
    """Run one CLI invocation and return its exit status."""
    parser = build_parser()
    argv = _attach_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "reconstruct" and args.gain is None:
        args.gain = 4.0 if args.scheme == "single" else 2.0
    created = False
    try:
        created = _check_output(args.out)
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"photonlink {args.command}: error: {exc}", file=sys.stderr)
        code = 2
    except SweepError as exc:
        print(f"photonlink {args.command}: computation failed at {exc}", file=sys.stderr)
        code = 1
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"photonlink {args.command}: computation failed: {exc}", file=sys.stderr)
        code = 1
    else:
        return 0
    if created:
        os.remove(args.out)
    return code


def main():
    sys.exit(parse_and_dispatch())
