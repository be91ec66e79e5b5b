"""Command-line front end: CSV sweeps and JSON Monte Carlo reports.

    qspoof link      link budget vs range (tau, xi, xi_prime, N0, N1)
    qspoof detect    single-pulse success probabilities vs range
    qspoof bayes     mean posterior certainty vs pulse count
    qspoof dwell     pulses and dwell time for a target certainty vs range
    qspoof simulate  Monte Carlo campaign, JSON report

Exit codes: 0 success, 2 usage or config error, 3 parameters outside the model.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import math
import sys

import numpy as np

from . import bayes, detection
from .detection import Hypothesis
from .montecarlo import CampaignConfig, run_campaign
from .scenario import (DEFAULT_SCENARIO, OutOfModelError, RadarScenario,
                       hypothesis_noise_numbers, load_scenario)

EXIT_USAGE = 2
EXIT_OUT_OF_MODEL = 3

# Reference engagement for the known pulse-count discrepancy check.
_REFERENCE_RANGE_M = 1000.0
_REFERENCE_BITS = 32
_QUOTED_PULSES_095 = 6e5


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def parse_bits(text: str) -> int | None:
    if text.lower() in ("inf", "infinity"):
        return None
    try:
        bits = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bits must be a positive integer or 'inf', got {text!r}")
    if bits < 1:
        raise argparse.ArgumentTypeError(f"bits must be >= 1, got {bits}")
    return bits


def bits_label(bits: int | None) -> str:
    return "inf" if bits is None else str(bits)


def range_grid(args) -> np.ndarray:
    start, stop, points = args.range_start, args.range_stop, args.points
    if not (0 < start < stop):
        raise UsageError(f"need 0 < range-start < range-stop, got {start}, {stop}")
    if points < 2:
        raise UsageError(f"need at least 2 points, got {points}")
    grid = np.geomspace(start, stop, points) if args.log_spaced else np.linspace(start, stop, points)
    grid[0], grid[-1] = start, stop
    return grid


def base_scenario(args) -> RadarScenario:
    sc = load_scenario(args.config) if args.config else DEFAULT_SCENARIO
    if getattr(args, "prf", None) is not None:
        sc = sc.replace(prf_hz=args.prf)
    return sc


def with_bits(sc: RadarScenario, bits) -> RadarScenario:
    return sc.replace(bits_receiver=bits, bits_spoofer=bits)


def single_bits(args, sc: RadarScenario) -> RadarScenario:
    if args.bits is None:
        return sc
    if len(args.bits) != 1:
        raise UsageError("this command takes a single --bits value")
    return with_bits(sc, args.bits[0])


@contextlib.contextmanager
def open_output(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def write_csv(path: str, header: list[str], rows) -> None:
    with open_output(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])


def warn(msg: str) -> None:
    print(f"WARNING: {msg}", file=sys.stderr)


def note(msg: str) -> None:
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------


def cmd_link(args) -> None:
    sc = single_bits(args, base_scenario(args))
    rows = []
    for r in range_grid(args):
        pair = hypothesis_noise_numbers(sc.replace(range_m=float(r)))
        rows.append([r, pair.tau, pair.xi, pair.xi_prime, pair.n0, pair.n1])
    write_csv(args.output, ["range_m", "tau", "xi", "xi_prime", "N0", "N1"], rows)


def cmd_detect(args) -> None:
    sc = base_scenario(args)
    bits_list = args.bits if args.bits is not None else [32, None]
    rows = []
    for bits in bits_list:
        for r in range_grid(args):
            pair = hypothesis_noise_numbers(with_bits(sc, bits).replace(range_m=float(r)))
            mu = detection.optimal_heterodyne_threshold(pair.n0, pair.n1)
            rows.append([r, bits_label(bits), detection.p_opt_excess(pair.n0, pair.n1),
                         detection.p_het_excess(pair.n0, pair.n1, mu), mu])
    write_csv(args.output,
              ["range_m", "bits", "p_opt_minus_half", "p_het_minus_half", "mu_opt"], rows)


def _deltas_for(sc: RadarScenario) -> bayes.LikelihoodDeltas:
    pair = hypothesis_noise_numbers(sc)
    mu = detection.optimal_heterodyne_threshold(pair.n0, pair.n1)
    return bayes.likelihood_deltas(pair.n0, pair.n1, mu)


def cmd_bayes(args) -> None:
    sc = single_bits(args, base_scenario(args)).replace(range_m=args.range)
    if args.deltas is not None:
        d = bayes.LikelihoodDeltas(*args.deltas)
    else:
        d = _deltas_for(sc)
    if args.m_max < 1 or args.points < 2:
        raise UsageError("need --m-max >= 1 and --points >= 2")
    grid = np.unique(np.linspace(0, args.m_max, args.points).round().astype(np.int64))
    formula = [bayes.mean_prior_difference(int(m), d) for m in grid]

    header = ["M", "mean_diff_formula"]
    columns = [grid, formula]
    if args.mc:
        cps = tuple(int(m) for m in grid if m >= 1)
        cfg = CampaignConfig(truth="random", pulses=int(grid[-1]), trials=args.mc,
                             seed=args.seed, deltas=d, update=args.update, checkpoints=cps)
        est = run_campaign(cfg, workers=args.workers).checkpoint_means()
        lookup = dict(zip(cps, est))
        mc_mean = [lookup[m].value if m in lookup else 0.0 for m in grid]
        mc_err = [lookup[m].stderr if m in lookup else 0.0 for m in grid]
        header += ["mean_diff_montecarlo", "mean_diff_montecarlo_stderr"]
        columns += [mc_mean, mc_err]
        if args.update == "exact":
            note("note: exact-Bayes certainty is not described by the closed-form column")
    write_csv(args.output, header, zip(*columns))

    try:
        m_cross = bayes.required_pulses(args.target, d)
    except ValueError as exc:
        warn(f"no crossing of {args.target}: {exc}")
        return
    note(f"closed form: mean difference reaches {args.target} at M = {m_cross}")
    reference = (args.deltas is None and sc.replace(prf_hz=DEFAULT_SCENARIO.prf_hz)
                 == DEFAULT_SCENARIO.replace(range_m=_REFERENCE_RANGE_M,
                                             bits_receiver=_REFERENCE_BITS,
                                             bits_spoofer=_REFERENCE_BITS))
    if reference and args.target == 0.95:
        warn(f"the frequently quoted ~{_QUOTED_PULSES_095:.0e} pulses for mean difference > 0.95 "
             f"at 1 km / 32 bits is ~{_QUOTED_PULSES_095 / m_cross:.0f}x the closed-form "
             f"value M = {m_cross}; the closed form is reported")


def cmd_dwell(args) -> None:
    sc = single_bits(args, base_scenario(args))
    if not sc.prf_hz > 0:
        raise UsageError("PRF must be positive")
    rows = []
    for r in range_grid(args):
        d = _deltas_for(sc.replace(range_m=float(r)))
        try:
            m = bayes.required_pulses(args.target, d)
        except ValueError:
            rows.append([r, "inf", "inf"])
            continue
        rows.append([r, m, bayes.dwell_time(m, sc.prf_hz)])
    write_csv(args.output, ["range_m", "M_required", "dwell_s"], rows)


def cmd_simulate(args) -> None:
    sc = single_bits(args, base_scenario(args)).replace(range_m=args.range)
    truth = args.truth if args.truth == "random" else Hypothesis[args.truth]
    cfg = CampaignConfig(truth=truth, pulses=args.pulses, trials=args.trials, seed=args.seed,
                         scenario=sc, threshold_mu=args.threshold, update=args.update,
                         record_trajectory=args.trajectory)
    result = run_campaign(cfg, workers=args.workers)
    report = result.to_dict(include_trials=not args.summary)
    with open_output(args.output) as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qspoof", description=__doc__.splitlines()[0],
                                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, bits_many=False):
        sp.add_argument("--config", help="JSON scenario file (missing fields use defaults)")
        sp.add_argument("--output", default="-", help="output file, '-' for stdout")
        sp.add_argument("--bits", type=parse_bits, nargs="+" if bits_many else 1, default=None,
                        help="ADC resolution for receiver and spoofer; 'inf' for none")
        sp.add_argument("--prf", type=float, default=None, help="pulse repetition frequency, Hz")

    def sweep(sp):
        sp.add_argument("--range-start", type=float, default=300.0, help="m")
        sp.add_argument("--range-stop", type=float, default=100e3, help="m")
        sp.add_argument("--points", type=int, default=100)
        sp.add_argument("--log-spaced", action=argparse.BooleanOptionalAction, default=True)

    s = sub.add_parser("link", help="link budget vs range")
    common(s)
    sweep(s)
    s.set_defaults(func=cmd_link)

    s = sub.add_parser("detect", help="single-pulse success probability vs range")
    common(s, bits_many=True)
    sweep(s)
    s.set_defaults(func=cmd_detect)

    s = sub.add_parser("bayes", help="mean posterior certainty vs number of pulses")
    common(s)
    s.add_argument("--range", type=float, default=1000.0, help="m")
    s.add_argument("--m-max", type=int, default=200_000)
    s.add_argument("--points", type=int, default=201)
    s.add_argument("--target", type=float, default=0.95,
                   help="certainty whose closed-form crossing is reported")
    s.add_argument("--deltas", type=float, nargs=2, metavar=("DELTA0", "DELTA1"),
                   help="synthetic likelihood deltas instead of the scenario's")
    s.add_argument("--mc", type=int, default=0, help="Monte Carlo trials (0 disables)")
    s.add_argument("--update", choices=bayes.RULES, default="exponential",
                   help="posterior update rule used by the Monte Carlo column")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_bayes)

    s = sub.add_parser("dwell", help="pulses and dwell time to reach a certainty vs range")
    common(s)
    sweep(s)
    s.add_argument("--target", type=float, default=0.9)
    s.set_defaults(func=cmd_dwell)

    s = sub.add_parser("simulate", help="Monte Carlo campaign, JSON report")
    common(s)
    s.add_argument("--truth", choices=["H0", "H1", "random"], required=True)
    s.add_argument("--range", type=float, default=1000.0, help="m")
    s.add_argument("--pulses", type=int, default=1000)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--threshold", type=float, default=None,
                   help="heterodyne disk radius (default: optimal)")
    s.add_argument("--update", choices=bayes.RULES, default="exact")
    s.add_argument("--trajectory", action="store_true",
                   help="include the first trial's certainty after every pulse")
    s.add_argument("--summary", action="store_true", help="omit per-trial arrays")
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except OutOfModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OUT_OF_MODEL
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
