"""Command line entry point: ``tecsim <subcommand> ...``.

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""
import argparse
import json
import logging
import os
import sys
import time

from .codebook import design_ed_codebook, lte_dft_codebook, min_distance
from .errors import ConfigError
from .harness import emit_results, load_spec, parse_spec_text, run_experiment
from .trellis import code_for_rate

log = logging.getLogger("tecsim")

EXIT_CONFIG = 2
EXIT_IO = 3


def _overrides(args):
    out = {"trials": args.trials, "seed": args.seed, "threads": args.threads}
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _run(args):
    overrides = _overrides(args)
    overrides["experiment"] = args.command
    if args.spec:
        spec = load_spec(args.spec, overrides)
    else:
        spec = parse_spec_text("", overrides)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "config.txt"), "w") as f:
        f.write(spec.to_text())
    t0 = time.time()
    rows = run_experiment(spec)
    path = os.path.join(args.out, f"results.{args.format}")
    emit_results(rows, path, args.format)
    log.info("%d rows in %.1f s -> %s", len(rows), time.time() - t0, path)
    for r in rows:
        print(f"{r.sweep:g}\t{r.metric}\t{r.value:.4f}\t+-{r.halfwidth:.4f}")
    return 0


def _design(args):
    if args.kind == "lte":
        cb = lte_dft_codebook(args.L, args.words)
    else:
        cb = design_ed_codebook(args.L, args.words, args.rank, rng_seed=args.seed,
                                n_starts=args.starts)
    text = json.dumps(cb.to_dict())
    if args.out:
        with open(args.out, "w") as f:
            f.write(text + "\n")
    else:
        print(text)
    log.info("min squared distance %.6f", min_distance(cb.words) ** 2)
    return 0


def _dump_trellis(args):
    text = code_for_rate(args.b_in).to_json()
    if args.out:
        with open(args.out, "w") as f:
            f.write(text + "\n")
    else:
        print(text)
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    p = argparse.ArgumentParser(prog="tecsim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    for name, help_ in (("beamforming", "average beamforming gain versus M_t"),
                        ("rate", "MIMO achievable rate versus SNR"),
                        ("tespa", "successive phase adjustment (temporal or spatial)")):
        s = sub.add_parser(name, help=help_, parents=[common])
        s.add_argument("--spec", help="key = value experiment file")
        s.add_argument("--out", default="results", help="output directory")
        s.add_argument("--format", choices=("csv", "json"), default="csv")
        s.add_argument("--trials", type=int)
        s.add_argument("--seed", type=int)
        s.add_argument("--threads", type=int, help="worker threads (speed only)")
        s.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override any spec key; repeatable")
        s.set_defaults(func=_run)

    s = sub.add_parser("design-codebook", parents=[common],
                       help="write an ED or LTE codebook as JSON")
    s.add_argument("--kind", choices=("ed", "lte"), default="ed")
    s.add_argument("--L", type=int, default=4)
    s.add_argument("--words", type=int, default=16)
    s.add_argument("--rank", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--starts", type=int, default=32)
    s.add_argument("--out")
    s.set_defaults(func=_design)

    s = sub.add_parser("dump-trellis", parents=[common],
                       help="state table of a supported code as JSON")
    s.add_argument("--b-in", type=int, default=2, choices=(1, 2, 3))
    s.add_argument("--out")
    s.set_defaults(func=_dump_trellis)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
