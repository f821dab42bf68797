"""Command-line front end: bound evaluation, simulation, Monte-Carlo checks,
certification, and reproducibility manifests.

Every run that writes outputs also writes `<output>.manifest.json` recording
the command, full configuration, seed, package version, timestamps, and a
sha256 hash of each output file.  Rerunning with the same configuration
reproduces the outputs byte for byte (the manifest's timestamps differ).

Exit codes: 0 success, 1 validation error, 2 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .bounds import (
    norm23_bounds,
    postselected_lower_bound,
    smin_boson,
    smin_boson_full_space,
    smin_design,
    smin_iqp,
    vv_lower_bound,
    vv_upper_bound,
)
from .boson import BosonEnsemble, BosonInstance, boson_distribution, bs_flatness_tail_bound
from .certtest import ADVERSARIES, CertificationTester, TesterConfig, empirical_sample_complexity
from .distvec import ProbVec, l1_distance, lp_quasinorm, min_entropy, renyi_entropy, truncated_core
from .errors import InvalidParameterError, ResourceLimitError
from .moments import anti_concentration_check, estimate_second_moments, min_entropy_tail_check
from .qsim import CircuitEnsemble, IqpWeights, iqp_output_distribution


def _load_dist(spec: str) -> ProbVec:
    if spec.startswith("uniform:"):
        return ProbVec.uniform(int(spec.split(":", 1)[1]))
    if spec.startswith("pointmass:"):
        return ProbVec.point_mass(int(spec.split(":", 1)[1]))
    path = Path(spec)
    if not path.exists():
        raise InvalidParameterError(f"no such distribution file: {spec}")
    if path.suffix == ".pvec":
        return ProbVec.from_bytes(path.read_bytes())
    return ProbVec.from_json(path.read_text())


def _write_output(path: str, payload, manifest_ctx: dict):
    p = Path(path)
    if isinstance(payload, bytes):
        p.write_bytes(payload)
    else:
        p.write_text(payload)
    digest = hashlib.sha256(p.read_bytes()).hexdigest()
    manifest = {
        "command": manifest_ctx["command"],
        "config": manifest_ctx["config"],
        "seed": manifest_ctx.get("seed", 0),
        "artifact_version": __version__,
        "started": manifest_ctx["started"],
        "finished": datetime.now(timezone.utc).isoformat(),
        "outputs": [{"path": str(p), "sha256": digest}],
    }
    Path(str(p) + ".manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _emit(args, text: str):
    ctx = {
        "command": args.subcommand,
        "config": {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")},
        "seed": getattr(args, "seed", 0),
        "started": args._started,
    }
    if getattr(args, "out", None):
        _write_output(args.out, text, ctx)
    else:
        print(text)


def _make_ensemble(args):
    if args.ensemble == "boson":
        return BosonEnsemble(n=args.n, m=args.m, seed=args.seed)
    kind = {"iqp": "iqp", "haar": "haar_state", "rcs": "local_random"}[args.ensemble]
    return CircuitEnsemble(kind=kind, n=args.n, seed=args.seed, depth=args.depth)


# -- subcommand handlers ----------------------------------------------------


def cmd_norms(args):
    v = _load_dist(args.dist)
    core = truncated_core(v, args.eps)
    out = {
        "dim": v.dim,
        "normalized": v.normalized,
        "l1": lp_quasinorm(v, 1.0),
        "l2_3": lp_quasinorm(v, 2.0 / 3.0),
        "support": lp_quasinorm(v, 0.0),
        "core_l2_3": lp_quasinorm(core, 2.0 / 3.0),
        "core_support": lp_quasinorm(core, 0.0),
    }
    if v.normalized:
        out["min_entropy_bits"] = min_entropy(v)
        out["renyi2_bits"] = renyi_entropy(v, 2.0)
    _emit(args, json.dumps(out))
    return 0


def cmd_bounds(args):
    kind = args.kind
    if kind in ("vv_lower", "vv_upper", "postselected", "sandwich"):
        p = _load_dist(args.dist)
        if kind == "vv_lower":
            rep = vv_lower_bound(p, args.eps, args.c2)
        elif kind == "vv_upper":
            rep = vv_upper_bound(p, args.eps, args.c1)
        elif kind == "postselected":
            subset = [int(x) for x in args.subset.split(",")]
            rep = postselected_lower_bound(p, subset, args.eps, args.c2)
        else:
            lo, hi = norm23_bounds(p, args.eps)
            _emit(args, json.dumps({"kind": "sandwich", "lower": lo, "upper": hi, "eps": args.eps}))
            return 0
    elif kind == "smin_iqp":
        rep = smin_iqp(args.n, args.delta, args.eps, args.c2)
    elif kind == "smin_design":
        rep = smin_design(args.n, args.delta, args.eps, args.eps_tilde, args.c2)
    elif kind == "smin_boson":
        rep = smin_boson(args.n, args.m, args.delta, args.eps, args.zeta, args.C, args.c2)
    elif kind == "smin_boson_b":
        rep = smin_boson_full_space(args.n, args.eps, args.c2)
    else:
        raise InvalidParameterError(f"unknown bound kind {kind!r}")
    _emit(args, rep.to_json())
    return 0


def cmd_simulate(args):
    from .rng import stream_rng

    rng = stream_rng(args.seed, 0)
    if args.ensemble == "iqp":
        dist = iqp_output_distribution(IqpWeights.random(args.n, rng))
    elif args.ensemble == "haar":
        from .qsim import haar_state_distribution

        dist = haar_state_distribution(args.n, rng)
    elif args.ensemble == "rcs":
        from .qsim import local_random_circuit_distribution

        dist = local_random_circuit_distribution(args.n, args.depth, rng)
    else:  # boson
        inst = BosonInstance.haar(args.n, args.m, rng)
        dist, outcomes = boson_distribution(inst)
        if args.csv:
            lines = ["occupation,probability"]
            lines += [f"{occ},{float(prob)!r}" for occ, prob in zip(outcomes, dist.entries)]
            _emit(args, "\n".join(lines) + "\n")
            return 0
    if args.out and args.out.endswith(".pvec"):
        ctx = {
            "command": args.subcommand,
            "config": {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")},
            "seed": args.seed,
            "started": args._started,
        }
        _write_output(args.out, dist.to_bytes(), ctx)
    else:
        _emit(args, dist.to_json())
    return 0


def cmd_moments(args):
    est = estimate_second_moments(
        _make_ensemble(args), args.instances, seed=args.seed, name=args.ensemble, workers=args.threads
    )
    _emit(args, est.to_json())
    return 0


def cmd_tail_check(args):
    rep = min_entropy_tail_check(
        _make_ensemble(args), args.delta, args.instances, seed=args.seed, workers=args.threads
    )
    _emit(args, rep.to_json())
    return 0


def cmd_anticoncentration(args):
    rep = anti_concentration_check(
        _make_ensemble(args), args.alpha, args.instances, seed=args.seed, workers=args.threads
    )
    _emit(args, rep.to_json())
    return 0


def cmd_certify(args):
    target = _load_dist(args.target)
    samples = json.loads(Path(args.samples).read_text())
    cfg = TesterConfig(
        eps=args.eps, samples=len(samples), calibration_runs=args.calibration_runs, seed=args.seed
    )
    verdict = CertificationTester(target, cfg).test(samples)
    _emit(
        args,
        json.dumps(
            {
                "accept": verdict.accept,
                "statistic": verdict.statistic,
                "threshold": verdict.threshold,
                "samples_used": verdict.samples_used,
            }
        ),
    )
    return 0


def cmd_complexity(args):
    p = _load_dist(args.dist)
    adversary = ADVERSARIES[args.adversary](p, args.distance)
    cfg = TesterConfig(eps=args.eps, samples=8, calibration_runs=args.calibration_runs, seed=args.seed)
    s = empirical_sample_complexity(p, adversary, cfg, trials=args.trials)
    out = {
        "dim": p.dim,
        "eps": args.eps,
        "adversary": args.adversary,
        "adversary_l1": l1_distance(p, adversary),
        "samples": s,
    }
    _emit(args, json.dumps(out))
    return 0


def cmd_bs_tail(args):
    bound = bs_flatness_tail_bound(args.n, args.m, args.c, args.C)
    _emit(args, json.dumps({"n": args.n, "m": args.m, "c": args.c, "C": args.C, "bound": bound}))
    return 0


# -- parser -----------------------------------------------------------------


def _apply_config_file(argv: list[str]) -> list[str]:
    """Prepend key=value pairs from --config FILE as --key value flags (flags win)."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    path = Path(argv[i + 1])
    rest = argv[:i] + argv[i + 2 :]
    injected: list[str] = []
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        injected += [f"--{key.strip().replace('_', '-')}", value.strip().strip('"')]
    # subcommand (and any positionals) stay in front; injected defaults before
    # explicit flags so that explicit flags override them
    head = rest[:1]
    return head + injected + rest[1:]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="certbound")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(sp, seed=True):
        sp.add_argument("--out", help="write result to this file (and a manifest beside it)")
        if seed:
            sp.add_argument("--seed", type=int, default=0)
        sp.add_argument(
            "--threads",
            type=int,
            default=int(os.environ.get("CERTBOUND_THREADS", os.cpu_count() or 1)),
        )

    def ensemble_args(sp):
        sp.add_argument("--ensemble", choices=["iqp", "haar", "rcs", "boson"], required=True)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--m", type=int, default=0, help="modes (boson only)")
        sp.add_argument("--depth", type=int, default=0, help="gate count (rcs only)")
        sp.add_argument("--instances", type=int, default=1000)

    sp = sub.add_parser("norms", help="quasi-norms and entropies of a distribution file")
    sp.add_argument("--dist", required=True)
    sp.add_argument("--eps", type=float, default=0.0)
    common(sp)
    sp.set_defaults(func=cmd_norms)

    sp = sub.add_parser("bounds", help="evaluate a certification sample-complexity bound")
    sp.add_argument(
        "--kind",
        default="vv_lower",
        choices=["vv_lower", "vv_upper", "sandwich", "postselected", "smin_iqp", "smin_design", "smin_boson", "smin_boson_b"],
    )
    sp.add_argument("--dist")
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--c1", type=float, default=1.0)
    sp.add_argument("--c2", type=float, default=1.0)
    sp.add_argument("--subset", default="")
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--m", type=int, default=0)
    sp.add_argument("--delta", type=float, default=0.5)
    sp.add_argument("--eps-tilde", dest="eps_tilde", type=float, default=0.0)
    sp.add_argument("--zeta", type=float, default=0.25)
    sp.add_argument("--C", type=float, default=0.0)
    common(sp)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("simulate", help="write one instance's output distribution")
    sp.add_argument("ensemble", choices=["iqp", "haar", "rcs", "boson"])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, default=0)
    sp.add_argument("--depth", type=int, default=0)
    sp.add_argument("--csv", action="store_true", help="boson only: occupation,probability CSV")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("moments", help="Monte-Carlo second-moment estimate")
    ensemble_args(sp)
    common(sp)
    sp.set_defaults(func=cmd_moments)

    sp = sub.add_parser("tail-check", help="min-entropy tail bound verification")
    ensemble_args(sp)
    sp.add_argument("--delta", type=float, required=True)
    common(sp)
    sp.set_defaults(func=cmd_tail_check)

    sp = sub.add_parser("anticoncentration", help="anti-concentration vs Paley-Zygmund floor")
    ensemble_args(sp)
    sp.add_argument("--alpha", type=float, required=True)
    common(sp)
    sp.set_defaults(func=cmd_anticoncentration)

    sp = sub.add_parser("certify", help="run the identity test on a samples file")
    sp.add_argument("--target", required=True)
    sp.add_argument("--samples", required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--calibration-runs", dest="calibration_runs", type=int, default=300)
    common(sp)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("complexity", help="empirical sample-complexity search")
    sp.add_argument("--dist", required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--adversary", choices=sorted(ADVERSARIES), default="pairwise_shift")
    sp.add_argument("--distance", type=float, required=True)
    sp.add_argument("--trials", type=int, default=300)
    sp.add_argument("--calibration-runs", dest="calibration_runs", type=int, default=300)
    common(sp)
    sp.set_defaults(func=cmd_complexity)

    sp = sub.add_parser("bs-tail", help="explicit flatness tail bound for boson sampling")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--c", type=float, default=1.0)
    sp.add_argument("--C", type=float, default=0.0)
    common(sp, seed=False)
    sp.set_defaults(func=cmd_bs_tail)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config_file(argv)
        parser = build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # unknown flag -> usage text, exit 1
            return 0 if exc.code == 0 else 1
        args._started = datetime.now(timezone.utc).isoformat()
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 2
    except (InvalidParameterError, OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
