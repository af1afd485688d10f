"""``bpwmc`` command line: one subcommand per operation family, JSON (or
TSV) on stdout, reproducible seeds and optional run manifests."""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BpwError, CertificationError
from .graph import WeightedGraph, load_graph_file

EXIT_OK, EXIT_DOMAIN, EXIT_CERT, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def resolve_graph_path(path: str) -> Path:
    """The path as given, else the same file name in the fixture directory
    (``BPW_FIXTURES`` or the bundled one)."""
    from .catalog import fixture_dir

    p = Path(path)
    if p.exists():
        return p
    for cand in (fixture_dir() / p.name, fixture_dir() / (p.name + ".txt")):
        if cand.exists():
            return cand
    raise BpwError(f"graph file not found: {path}")


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, (set, frozenset, tuple)):
        return list(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _clean(obj):
    """Replace non-finite floats so the output stays strict JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else "-inf" if obj < 0 else "nan"
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def emit(obj, fmt: str, out) -> None:
    if fmt == "tsv" and isinstance(obj, dict):
        for k, v in obj.items():
            val = v if isinstance(v, (str, int, float, bool)) or v is None else json.dumps(_clean(v), default=_jsonable)
            out.write(f"{k}\t{val}\n")
    else:
        out.write(json.dumps(_clean(obj), default=_jsonable, sort_keys=False) + "\n")


# ------------------------------------------------------------------ commands


class Ctx:
    def __init__(self, args):
        self.args = args
        self.inputs: dict[str, str] = {}

    def graph(self) -> WeightedGraph:
        path = resolve_graph_path(self.args.graph)
        self.inputs[str(path)] = hashlib.sha256(path.read_bytes()).hexdigest()
        return load_graph_file(path)

    def rng(self, *labels):
        from .rng import rng_for

        return rng_for(self.args.seed, self.args.command, *labels)


def _set(g, text: str | None) -> int:
    if not text:
        return 0
    return g.mask_of([t for t in text.replace(",", " ").split()])


def cmd_info(ctx):
    from .graph import bipartition, is_connected
    from .independence import profile

    wg = ctx.graph()
    g = wg.graph
    prof = profile(wg, ctx.args.lam)
    return {
        "n": g.n, "m": g.m, "labels": list(g.labels), "weights": list(wg.weights),
        "connected": is_connected(g), "bipartite": bipartition(g) is not None,
        "alpha": prof.alpha, "counts": prof.counts, "weighted_counts": prof.weighted_counts,
        "partition": prof.partition(), "lambda": ctx.args.lam,
    }


def cmd_pw(ctx):
    from .pathdecomp import pathwidth_exact

    g = ctx.graph().graph
    p, dec = pathwidth_exact(g)
    out = {"pathwidth": p}
    if ctx.args.bags:
        out.update(dec.to_json(g))
    return out


def cmd_bpw(ctx):
    from .pathdecomp import bipartite_pathwidth_exact

    g = ctx.graph().graph
    b, witness = bipartite_pathwidth_exact(g)
    return {"bipartite_pathwidth": b, "witness": g.names(witness)}


def cmd_recognize(ctx):
    from .recognizers import class_report

    g = ctx.graph().graph
    return class_report(g).to_json(g)


def cmd_decompose(ctx):
    from .graph import is_connected
    from .pathdecomp import lex_least_good, monotone_window_decomposition, pathwidth_exact, validate

    g = ctx.graph().graph
    method = ctx.args.method
    if method == "exact":
        dec = pathwidth_exact(g)[1]
    elif method == "lex":
        if not is_connected(g):
            raise BpwError("lex-least decomposition needs a connected graph")
        dec = lex_least_good(g, ctx.args.p)
    else:
        dec = monotone_window_decomposition(g)
    rep = validate(g, dec)
    out = dec.to_json(g)
    out.update(method=method, valid=rep.valid, violations=rep.violations)
    if not rep.valid:
        raise CertificationError(json.dumps(out, default=_jsonable))
    return out


def cmd_path(ctx):
    from .canonical import build_path, decode, table_rows

    g = ctx.graph().graph
    x, y = _set(g, ctx.args.x), _set(g, ctx.args.y)
    path = build_path(g, x, y, trace=True)
    steps = []
    for s in path.steps:
        ok = decode(g, s.z, s.z_next, s.w, s.r) == (x, y)
        steps.append({
            "move": ("+" if s.insert else "-") + g.labels[s.vertex],
            "Z": g.names(s.z), "W": g.names(s.w), "R+": g.names(s.r_plus), "R-": g.names(s.r_minus),
            "bag": g.names(s.bag), "decodes": ok,
        })
    return {
        "X": g.names(x), "Y": g.names(y), "length": len(path),
        "components": [g.names(c) for c in path.components],
        "decompositions": [[g.names(b) for b in d] for d in path.decompositions],
        "steps": steps, "events": table_rows(g, path),
    }


def cmd_congestion(ctx):
    from .canonical import congestion

    wg = ctx.graph()
    rep = congestion(wg, ctx.args.lam, p=ctx.args.p)
    out = rep.to_json(wg.graph)
    out["rho_exact"] = rep.rho
    if not rep.passed or rep.relaxation_ok is False:
        raise CertificationError(json.dumps(_clean(out), default=_jsonable))
    return out


def cmd_spectrum(ctx):
    from .glauber import spectrum

    rep = spectrum(ctx.graph(), ctx.args.lam)
    out = rep.to_json()
    out["lambda"] = ctx.args.lam
    if ctx.args.all:
        out["eigenvalues"] = rep.eigenvalues
    return out


def cmd_mixing_bound(ctx):
    from .glauber import exact_mixing_time, mixing_bound
    from .independence import alpha
    from .pathdecomp import bipartite_pathwidth

    g = ctx.graph().graph
    p = ctx.args.p if ctx.args.p is not None else max(2, bipartite_pathwidth(g))
    lam = float(ctx.args.lam)
    bound = mixing_bound(g.n, p, lam, alpha(g), ctx.args.epsilon)
    out = {"n": g.n, "p": p, "lambda": ctx.args.lam, "epsilon": ctx.args.epsilon, "bound": bound}
    if ctx.args.exact:
        out["exact"] = exact_mixing_time(g, ctx.args.lam, ctx.args.epsilon)
    return out


def cmd_sample(ctx):
    from .glauber import run, sizes

    wg = ctx.graph()
    steps = ctx.args.steps
    traj = run(wg, float(ctx.args.lam), steps, ctx.rng("chain"))
    hist = np.bincount(sizes(traj), minlength=1) if steps else np.zeros(1, dtype=int)
    final = int(traj[-1]) if steps else 0
    return {
        "seed": ctx.args.seed, "steps": steps, "lambda": ctx.args.lam,
        "final": wg.graph.names(final), "size_histogram": hist.tolist(),
    }


def cmd_sample_size(ctx):
    from .fugacity import bisect, make_estimator, p_m_exact, sample_fixed_size
    from .glauber import exact_mixing_time
    from .independence import profile

    g = ctx.graph().graph
    a = ctx.args
    est = make_estimator(g, a.estimator, ctx.rng("estimate"))
    res = bisect(g, a.m, est, ctx.rng("pick"), q=a.q, lambda_start=a.lambda_start)
    head = {"seed": a.seed, "m": a.m, "estimator": a.estimator, **res.to_json()}
    lines = [head]
    if res.lam is not None and a.count:
        prof = profile(g)
        burn = exact_mixing_time(g, float(res.lam), 1 / max(2, g.n))
        sample = sample_fixed_size(g, a.m, res.lam, a.count, ctx.rng("sample"), burn_in=burn)
        head["p_m_exact"] = float(p_m_exact(prof, res.lam, a.m))
        head["sampling_steps"] = sample.steps
        head["burn_in"] = burn
        lines += [{"sample": g.names(s)} for s in sample.samples]
    elif res.regime == "small_lambda":
        from .fugacity import small_fugacity_sets

        head["enumerated"] = [g.names(s) for s in small_fugacity_sets(g, a.m) if s.bit_count() == a.m][: a.count]
    return lines


def cmd_blowup(ctx):
    from .blowup import blow_up, verify_equivalence

    wg = ctx.graph()
    bm = blow_up(wg)
    out = bm.to_json()
    out["equivalence"] = verify_equivalence(wg.graph, wg.weights)["pass"] if bm.target.n <= 20 else None
    out["edge_list"] = bm.target.to_text()
    return out


def cmd_conductance(ctx):
    from .glauber import conductance_exact

    wg = ctx.graph()
    c = conductance_exact(wg, ctx.args.lam)
    return {"lambda": ctx.args.lam, "phi": c.phi_exact, "phi_float": float(c.phi_exact),
            "witness": [wg.graph.names(s) for s in c.witness]}


def cmd_verify(ctx):
    from .verify import SUITES, run_suite

    names = list(SUITES) if ctx.args.suite == "all" else [ctx.args.suite]
    results = [run_suite(n, ctx.args.max_n) for n in names]
    out = {"pass": all(r.passed for r in results), "suites": [r.to_json() for r in results]}
    if not out["pass"]:
        raise CertificationError(json.dumps(_clean(out), default=_jsonable))
    return out


COMMANDS = {
    "info": cmd_info, "pw": cmd_pw, "bpw": cmd_bpw, "recognize": cmd_recognize, "decompose": cmd_decompose,
    "path": cmd_path, "congestion": cmd_congestion, "spectrum": cmd_spectrum, "mixing-bound": cmd_mixing_bound,
    "sample": cmd_sample, "sample-size": cmd_sample_size, "blowup": cmd_blowup, "conductance": cmd_conductance,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    from .verify import SUITES

    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "tsv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--manifest", metavar="PATH", help="write a run manifest here")

    parser = _Parser(prog="bpwmc", description="Hardcore-model Glauber dynamics and bipartite pathwidth tools.")
    parser.add_argument("--version", action="version", version=f"bpwmc {__version__}")
    parser.add_argument("--replay", metavar="MANIFEST", help="rerun the command recorded in a manifest")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_, graph=True):
        sp = sub.add_parser(name, help=help_, parents=[common])
        if graph:
            sp.add_argument("graph", help="edge-list file (falls back to the fixture directory)")
        return sp

    sp = add("info", "sizes, independence counts and partition function")
    sp.add_argument("--lambda", dest="lam", type=_fraction, default=Fraction(1))
    sp = add("pw", "exact pathwidth")
    sp.add_argument("--bags", action="store_true", help="include an optimal decomposition")
    add("bpw", "exact bipartite pathwidth")
    add("recognize", "class membership report and bipartite pathwidth bound")
    sp = add("decompose", "path decomposition")
    sp.add_argument("--method", choices=("exact", "lex", "monotone"), default="exact")
    sp.add_argument("--p", type=int, default=None, help="width cap for --method lex")
    sp = add("path", "canonical path between two independent sets")
    sp.add_argument("--x", required=True, help="comma-separated vertices of X")
    sp.add_argument("--y", required=True, help="comma-separated vertices of Y")
    sp = add("congestion", "exact canonical-path congestion against its bound")
    sp.add_argument("--lambda", dest="lam", type=_fraction, default=Fraction(1))
    sp.add_argument("--p", type=int, default=None)
    sp = add("spectrum", "exact spectrum of the transition matrix")
    sp.add_argument("--lambda", dest="lam", type=_fraction, default=Fraction(1))
    sp.add_argument("--all", action="store_true", help="list every eigenvalue")
    sp = add("mixing-bound", "mixing-time bound (optionally with the exact value)")
    sp.add_argument("--lambda", dest="lam", type=_fraction, required=True)
    sp.add_argument("--epsilon", type=float, default=0.25)
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--exact", action="store_true")
    sp = add("sample", "run the chain")
    sp.add_argument("--lambda", dest="lam", type=_fraction, default=Fraction(1))
    sp.add_argument("--steps", type=int, default=10_000)
    sp = add("sample-size", "fixed-size sampling via bisection on the fugacity")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--count", type=int, default=10)
    sp.add_argument("--estimator", choices=("chain", "oracle"), default="oracle")
    sp.add_argument("--q", type=float, default=3.0)
    sp.add_argument("--lambda-start", type=_fraction, default=None, help="doubling start (default 2e^9/n)")
    add("blowup", "vertex-weight blow-up of a weighted graph")
    sp = add("conductance", "exact conductance by exhaustive cuts")
    sp.add_argument("--lambda", dest="lam", type=_fraction, default=Fraction(1))
    sp = add("verify", "run self-check suites", graph=False)
    sp.add_argument("--suite", choices=["all", *SUITES], default="all")
    sp.add_argument("--max-n", type=int, default=None)
    return parser


def _strip_manifest(argv) -> list[str]:
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
        elif a == "--manifest":
            skip = True
        elif not a.startswith("--manifest="):
            out.append(a)
    return out


def _manifest(argv, args, ctx, seconds: float) -> dict:
    return {
        "command": args.command, "arguments": list(argv), "seed": args.seed,
        "fixture_hashes": ctx.inputs, "version": __version__, "wall_time": round(seconds, 6),
    }


def main(argv=None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        if args.replay:
            manifest = json.loads(Path(args.replay).read_text())
            return main(manifest["arguments"], out)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
    except UsageError:
        return EXIT_USAGE
    ctx = Ctx(args)
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        result = COMMANDS[args.command](ctx)
        for obj in result if isinstance(result, list) else [result]:
            emit(obj, args.format, out)
    except CertificationError as exc:
        sys.stderr.write(f"certification failure: {exc}\n")
        code = EXIT_CERT
    except (BpwError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        code = EXIT_DOMAIN
    if args.manifest:
        manifest = _manifest(_strip_manifest(argv), args, ctx, time.perf_counter() - t0)
        Path(args.manifest).write_text(json.dumps(manifest, indent=2) + "\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
