"""Command line front end.

Subcommands: measures, bounds, asymptotics, reproduce {1|2}, oracle.
Every command emits deterministic CSV (comma separated, 12 significant
digits, LF line endings) to --out or stdout. Curve-producing commands also
render a PNG figure next to the CSV unless --no-figure is given.

Exit codes: 0 success, 1 configuration error, 2 computation error,
3 vacuous-only output.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import asymptotics, plotting
from .config import RunConfig, load_config, section6_channel, section6_source
from .errors import ConfigError, MarkovJsccError, RateOutOfRangeError
from .finite_bounds import (
    BOUND_KINDS,
    BoundCurve,
    BoundQuery,
    _QueryContext,
    bound_curve,
    converse_bound_a2,
    direct_bound_a2,
)
from .markov import check_assumption1, check_assumption2
from .measures import ChainSpectra
from .tilted import TiltedFamily

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_COMPUTE = 2
EXIT_VACUOUS = 3

FIG1_N = 10000
FIG1_K_RANGE = (6000, 8000, 100)
FIG2_NS = (10**4, 10**5, 10**6)
FIG_RATIO = 0.75


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int,)):
        return str(value)
    if isinstance(value, str):
        return value
    return f"{value:.12g}"


def _write_csv(header, rows, out_path):
    text = ",".join(header) + "\n"
    for row in rows:
        text += ",".join(_fmt(v) for v in row) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text, encoding="utf-8", newline="\n")


def _figure_path(args):
    if getattr(args, "no_figure", False):
        return None
    if getattr(args, "figure", None):
        return args.figure
    if args.out:
        return str(Path(args.out).with_suffix(".png"))
    return None


def _read_config(args) -> RunConfig:
    if not args.config:
        raise ConfigError("this command needs --config PATH (or '-' for stdin)")
    if args.config == "-":
        text = sys.stdin.read()
    else:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"configuration file {path} does not exist")
        text = path.read_text(encoding="utf-8")
    return load_config(text)


def _shared_family(ctx: _QueryContext, rate_ratio, variant, theta_prime=None):
    fam = TiltedFamily(ctx.source, ctx.channel, rate_ratio, variant, theta_prime)
    fam.source_spectra = ctx.source_spectra
    fam.channel_spectra = ctx.channel_spectra
    return fam


def cmd_measures(args) -> int:
    config = _read_config(args)
    src = ChainSpectra(config.source)
    ch = ChainSpectra(config.channel)
    import math

    rate = math.log(config.channel.x_size)
    h_s, h_c = src.entropy_rate(), ch.entropy_rate()
    v_s, v_c = src.dispersion(), ch.dispersion()
    capacity = rate - h_c
    optimal = capacity / h_s
    a1 = check_assumption1(config.channel).holds or config.channel.singleton
    a2 = check_assumption2(config.channel)
    rows = [
        ("entropy_rate_source", h_s),
        ("entropy_rate_channel", h_c),
        ("dispersion_source", v_s),
        ("dispersion_channel", v_c),
        ("capacity", capacity),
        ("optimal_rate", optimal),
        ("dispersion", (optimal * v_s + v_c) / h_s**2),
        ("h0_source", src.h_zero_down()),
        ("h0_channel_down", ch.h_zero_down() if a1 else None),
        ("h0_channel_up", ch.h_zero_up() if a2 else None),
        ("assumption1", a1),
        ("assumption2", a2),
    ]
    _write_csv(("key", "value"), rows, args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    config = _read_config(args)
    if config.n is None:
        raise ConfigError("bounds needs n")
    k_min = config.k_min if config.k_min is not None else config.k
    k_max = config.k_max if config.k_max is not None else config.k
    if k_min is None or k_max is None:
        raise ConfigError("bounds needs k or k_min/k_max")
    if k_min > k_max:
        raise ConfigError(f"k_min {k_min} exceeds k_max {k_max}")
    for kind in config.kinds:
        if kind not in BOUND_KINDS:
            raise ConfigError(f"unknown bound kind {kind!r}")
    curve = bound_curve(
        config.source,
        config.channel,
        config.n,
        k_min,
        k_max,
        config.k_step,
        config.kinds,
        grid_density=args.grid_density,
    )
    _write_csv(
        BoundCurve.HEADER,
        [
            (r.n, r.k, r.kind, r.log_prob_bound, r.vacuous, r.error)
            for r in curve.rows
        ],
        args.out,
    )
    figure = _figure_path(args)
    if figure:
        plotting.save_bound_rows(figure, curve.rows, config.n)
    if curve.rows and all(r.vacuous for r in curve.rows):
        return EXIT_VACUOUS
    return EXIT_OK


def cmd_asymptotics(args) -> int:
    config = _read_config(args)
    if config.rate_ratio is not None:
        ratio = config.rate_ratio
    elif config.k is not None and config.n is not None:
        ratio = config.k / config.n
    else:
        raise ConfigError("asymptotics needs rate_ratio or both k and n")
    summary = asymptotics.summarize(config.source, config.channel, ratio)
    rate = summary.rate_log_alphabet
    ctx = _QueryContext(config.source, config.channel)
    a1 = check_assumption1(config.channel).holds or config.channel.singleton
    a2 = check_assumption2(config.channel)

    def exponents(variant):
        fam = _shared_family(ctx, ratio, variant)
        direct = asymptotics.exponent_direct(fam, rate)
        try:
            converse = asymptotics.exponent_converse(fam, rate)
        except RateOutOfRangeError:
            converse = None
        return direct, converse

    e1 = exponents("down") if a1 else (None, None)
    e2 = exponents("up") if a2 else (None, None)
    try:
        md = asymptotics.md_approx(summary, round(ratio * 10**6), 10**6) / 10**6
    except (MarkovJsccError, ValueError):
        md = None
    rows = [
        ("rate_log_alphabet", rate),
        ("capacity", summary.capacity),
        ("optimal_rate", summary.optimal_rate),
        ("dispersion", summary.dispersion),
        ("critical_rate", summary.critical_rate),
        ("exponent_direct_a1", e1[0]),
        ("exponent_converse_a1", e1[1]),
        ("exponent_direct_a2", e2[0]),
        ("exponent_converse_a2", e2[1]),
        ("md_exponent_normalized", md),
    ]
    _write_csv(("key", "value"), rows, args.out)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    source = section6_source()
    channel = section6_channel()
    ctx = _QueryContext(source, channel)
    summary = asymptotics.summarize(source, channel)
    density = args.grid_density
    figure = _figure_path(args)

    if args.figure_id == 1:
        k_lo, k_hi, k_step = FIG1_K_RANGE
        header = ("k", "direct_a2", "converse_a2", "n_exponent", "md_approx")
        rows = []
        any_bound = False
        for k in range(k_lo, k_hi + 1, k_step):
            query = BoundQuery(source=source, channel=channel, k=k, n=FIG1_N)
            direct = direct_bound_a2(query, density, _ctx=ctx)
            try:
                converse = converse_bound_a2(query, density, _ctx=ctx)
                converse_value = converse.log_prob_bound
            except RateOutOfRangeError:
                converse_value = None
            fam = _shared_family(ctx, k / FIG1_N, "up")
            n_exp = FIG1_N * asymptotics.exponent_direct(fam, summary.rate_log_alphabet)
            md = asymptotics.md_approx(summary, k, FIG1_N)
            direct_value = None if direct.vacuous else direct.log_prob_bound
            any_bound = any_bound or direct_value is not None or converse_value is not None
            rows.append((k, direct_value, converse_value, n_exp, md))
        _write_csv(header, rows, args.out)
        if figure:
            plotting.save_k_sweep(
                figure,
                [r[0] for r in rows],
                [r[1] for r in rows],
                [r[2] for r in rows],
                [r[3] for r in rows],
                [r[4] for r in rows],
                FIG1_N,
            )
        return EXIT_OK if any_bound else EXIT_VACUOUS

    header = ("n", "direct_a2_norm", "converse_a2_norm", "exponent", "md_norm")
    fam = _shared_family(ctx, FIG_RATIO, "up")
    exponent = asymptotics.exponent_direct(fam, summary.rate_log_alphabet)
    md_norm = (summary.optimal_rate - FIG_RATIO) ** 2 / (2.0 * summary.dispersion)
    rows = []
    any_bound = False
    for n in FIG2_NS:
        k = int(FIG_RATIO * n)
        query = BoundQuery(source=source, channel=channel, k=k, n=n)
        direct = direct_bound_a2(query, density, _ctx=ctx)
        try:
            converse = converse_bound_a2(query, density, _ctx=ctx)
            converse_norm = (
                None if converse.vacuous else -converse.log_prob_bound / n
            )
        except RateOutOfRangeError:
            converse_norm = None
        direct_norm = None if direct.vacuous else -direct.log_prob_bound / n
        any_bound = any_bound or direct_norm is not None or converse_norm is not None
        rows.append((n, direct_norm, converse_norm, exponent, md_norm))
    _write_csv(header, rows, args.out)
    if figure:
        plotting.save_n_sweep(
            figure,
            [r[0] for r in rows],
            [r[1] for r in rows],
            [r[2] for r in rows],
            [r[3] for r in rows],
            [r[4] for r in rows],
            FIG_RATIO,
        )
    return EXIT_OK if any_bound else EXIT_VACUOUS


def cmd_oracle(args) -> int:
    from .oracle import sandwich_check

    if args.config:
        config = _read_config(args)
        chain = config.channel
        theta_grid = config.theta_grid
        theta_prime_grid = config.theta_prime_grid
        n_max = config.n_max
    else:
        chain = section6_channel()
        theta_grid = (0.3, -0.3, 0.7, -0.7)
        theta_prime_grid = (0.3, -0.3, 0.7, -0.7)
        n_max = 6
    rows = sandwich_check(chain, theta_grid, theta_prime_grid, n_max)
    _write_csv(
        ("prop", "theta", "theta_prime", "n", "lower_margin", "upper_margin"),
        [
            (r.prop, r.theta, r.theta_prime, r.n, r.lower_margin, r.upper_margin)
            for r in rows
        ],
        args.out,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="markov-jscc",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument(
                "--config", help="path to a JSON configuration ('-' for stdin)"
            )
        p.add_argument("--out", help="output CSV path (default stdout)")
        p.add_argument(
            "--grid-density",
            type=int,
            default=60,
            metavar="N",
            help="optimizer grid density (default 60)",
        )

    p = sub.add_parser(
        "measures",
        help="entropy rates, dispersion, capacity, optimal rate, order-zero "
        "entropies and assumption checks as key,value CSV",
    )
    common(p)
    p.set_defaults(handler=cmd_measures)

    p = sub.add_parser(
        "bounds",
        help="finite-length bound curve; columns n,k,kind,log_prob_bound,"
        "vacuous,error (log_prob_bound bounds log P_j, so negative values "
        "are informative)",
    )
    common(p)
    p.add_argument("--figure", help="render a PNG to this path")
    p.add_argument(
        "--no-figure", action="store_true", help="skip the PNG next to --out"
    )
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser(
        "asymptotics",
        help="exponents, critical rate and moderate-deviation scalars as "
        "key,value CSV",
    )
    common(p)
    p.set_defaults(handler=cmd_asymptotics)

    p = sub.add_parser(
        "reproduce",
        help="reference sweeps for W(0.1,0.2): figure 1 emits k,direct_a2,"
        "converse_a2,n_exponent,md_approx at n=10000 (bound columns are "
        "log P_j values); figure 2 emits n,direct_a2_norm,converse_a2_norm,"
        "exponent,md_norm with -(1/n)-normalized bounds",
    )
    p.add_argument("figure_id", type=int, choices=(1, 2))
    common(p, needs_config=False)
    p.add_argument("--figure", help="render a PNG to this path")
    p.add_argument(
        "--no-figure", action="store_true", help="skip the PNG next to --out"
    )
    p.set_defaults(handler=cmd_reproduce)

    p = sub.add_parser(
        "oracle",
        help="correction-term sandwich margins against exact n-fold "
        "enumeration; columns prop,theta,theta_prime,n,lower_margin,"
        "upper_margin (all margins must be >= -1e-9)",
    )
    common(p)
    p.set_defaults(handler=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MarkovJsccError as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
