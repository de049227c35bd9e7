"""Command-line entry point.

Subcommands::

    modspace decide  --family modulation --kind product --n 1 \\
                     --in inf,1,0,0 --in inf,1,0,0 --out inf,1,0,0
    modspace oracle  --kind convolution --in 2,0 --in 2,0 --out 2,0
    modspace norm    --gen comb --coeffs 0:1,2:0.5 --index 2,2,0,0 --method continuous
    modspace witness --witness box --N 4
    modspace partition-check --K 16 --n 1
    modspace report  --suite partition --out-dir results/

Space tuples are ``p,q,s,t`` for ``M^{s,t}_{p,q}`` (``s`` on the frequency
side, ``t`` on the spatial side); discrete oracle tuples are ``q,s``.
Entries accept exact rationals ``a/b`` and ``inf``.  Reports are JSON on
stdout with a top-level ``"schema": 1``.

Exit codes: ``decide`` 0 holds, 1 fails, 2 outside the characterised range;
``oracle`` 0 bounded, 1 blow-up, 3 inconclusive; 64 for usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import __version__
from .indices import (Exponent, IndexPair, OutOfRange, RelationQuery, SpaceIndex,
                      as_rational, decide_relation)
from .lattice import Sequence
from .sampling import (ANALYSIS_WINDOW, COMB_ATOM, DEFAULT_GRIDS,
                       GridFunction, band_limited_corpus, comb, gabor_comb, make_window,
                       modulation_norm_continuous, modulation_norm_discrete,
                       sigma_partition, weighted_Lp_norm, wiener_norm)
from .witnesses import (FamilyKind, OracleVerdict, box, canonical_families,
                        default_n_list, empirical_decide, holder_power_witness)

SCHEMA = 1
EXIT_USAGE = 64
ORACLE_EXIT = {OracleVerdict.BOUNDED: 0, OracleVerdict.BLOW_UP: 1,
               OracleVerdict.INCONCLUSIVE: 3}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rational(text: str):
    try:
        return as_rational(text.strip())
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise UsageError(f"not an exact rational: {text!r}") from exc


def _exponent(text: str) -> Exponent:
    try:
        return Exponent.of(text.strip())
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise UsageError(f"bad exponent {text!r}: {exc}") from exc


def parse_space(text: str) -> SpaceIndex:
    """``p,q,s,t`` (``s``, ``t`` default to 0) into a :class:`SpaceIndex`."""
    parts = text.split(",")
    if len(parts) not in (2, 4):
        raise UsageError(f"space tuple must be p,q or p,q,s,t: {text!r}")
    p, q = _exponent(parts[0]), _exponent(parts[1])
    s, t = (_rational(parts[2]), _rational(parts[3])) if len(parts) == 4 else (0, 0)
    return SpaceIndex(IndexPair(p, t), IndexPair(q, s))


def parse_pair(text: str) -> IndexPair:
    """``q,s`` (``s`` defaults to 0) into an :class:`IndexPair`."""
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise UsageError(f"sequence index must be q or q,s: {text!r}")
    s = _rational(parts[1]) if len(parts) == 2 else 0
    return IndexPair(_exponent(parts[0]), s)


def _space_dict(x: SpaceIndex) -> dict:
    return {"p": str(x.spatial.q), "q": str(x.frequency.q),
            "s": str(x.frequency.s), "t": str(x.spatial.s)}


def _pair_dict(x: IndexPair) -> dict:
    return {"q": str(x.q), "s": str(x.s)}


def _emit(payload: dict, out=None) -> None:
    payload = {"schema": SCHEMA, "version": __version__, **payload}
    stream = sys.stdout if out is None else out
    stream.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _out_dir(args) -> Path | None:
    if getattr(args, "out_dir", None) is None:
        return None
    path = Path(args.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


# -- decide -------------------------------------------------------------------


def cmd_decide(args) -> int:
    if not args.inputs or args.output is None:
        raise UsageError("decide needs --in (repeatable) and --out")
    ins = [parse_space(x) for x in args.inputs]
    out = parse_space(args.output)
    try:
        query = RelationQuery(args.family, args.kind, args.n, tuple(ins), out)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    echo = {"family": query.family.value, "kind": query.kind.value, "n": query.dim,
            "inputs": [_space_dict(x) for x in ins], "output": _space_dict(out)}
    try:
        verdict = decide_relation(query)
    except OutOfRange as exc:
        _emit({"command": "decide", "query": echo, "error": str(exc),
               "error_type": type(exc).__name__})
        return 2
    _emit({"command": "decide", "query": echo, "verdict": verdict.to_dict()})
    return 0 if verdict.holds else 1


# -- oracle -------------------------------------------------------------------


def _n_list(dim: int, nmax: int | None) -> tuple[int, ...]:
    if nmax is None:
        return default_n_list(dim)
    if nmax < 32:
        raise UsageError("--nmax must be at least 32 (three sizes N >= 8)")
    out, N = [], 8
    while N <= nmax:
        out.append(N)
        N *= 2
    return tuple(out)


def cmd_oracle(args) -> int:
    if args.kind not in ("product", "convolution"):
        raise UsageError("oracle works on discrete products and convolutions")
    if len(args.inputs or ()) < 2 or args.output is None:
        raise UsageError("oracle needs at least two --in and one --out")
    ins = tuple(parse_pair(x) for x in args.inputs)
    out = parse_pair(args.output)
    fams = canonical_families(args.kind, out, ins, args.n)
    if args.families:
        wanted = {w.strip() for w in args.families.split(",") if w.strip()}
        known = {k.value for k in FamilyKind}
        bad = wanted - known - {f.label for f in fams}
        if bad:
            raise UsageError(f"unknown families {sorted(bad)}")
        fams = [f for f in fams if f.kind.value in wanted or f.label in wanted]
        if not fams:
            raise UsageError("no canonical family matches --families")
    N_list = _n_list(args.n, args.nmax)
    res = empirical_decide(args.kind, out, ins, args.n, N_list=N_list, families=fams,
                           confirm=not args.no_confirm)
    echo = {"kind": args.kind, "n": args.n, "inputs": [_pair_dict(x) for x in ins],
            "output": _pair_dict(out), "N_list": list(N_list), "seed": args.seed,
            "confirm": not args.no_confirm}
    _emit({"command": "oracle", "query": echo, **res.to_dict()})
    d = _out_dir(args)
    if d is not None:
        with open(d / "oracle_points.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["family", "window", "N", "ratio"])
            for tag, reps in (("base", res.reports), ("confirm", res.confirmations)):
                for rep in reps:
                    for N, r in rep.points:
                        w.writerow([rep.family, tag, N, repr(r)])
    return ORACLE_EXIT[res.verdict]


# -- norm -----------------------------------------------------------------------


def _parse_coeffs(text: str, dim: int) -> Sequence:
    entries = {}
    for item in text.split(","):
        if not item.strip():
            continue
        try:
            k_s, v_s = item.split(":")
            k = tuple(int(c) for c in k_s.split(";"))
            entries[k] = float(v_s)
        except ValueError as exc:
            raise UsageError(f"coefficients are 'k:v' items (k1;k2 in 2-D): {item!r}") from exc
    try:
        return Sequence.from_dict(entries, dim=dim)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _grid_args(args) -> tuple[float, int]:
    L0, M0 = DEFAULT_GRIDS[args.n]
    return (L0 if args.L is None else args.L, M0 if args.M is None else args.M)


def cmd_norm(args) -> int:
    L, M = _grid_args(args)
    if args.input:
        try:
            f = GridFunction.from_csv(Path(args.input).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read grid function: {exc}") from exc
        source = {"input": args.input}
    else:
        atom = make_window(COMB_ATOM, args.n, L, M)
        if args.gen == "corpus":
            f = band_limited_corpus(args.index_in_corpus + 1, seed=args.seed,
                                    dim=args.n, L=L, M=M)[args.index_in_corpus]
        else:
            a = _parse_coeffs(args.coeffs or "0:1" if args.n == 1 else args.coeffs or "0;0:1",
                              args.n)
            f = comb(a, atom) if args.gen == "comb" else gabor_comb(a, atom)
        source = {"gen": args.gen, "coeffs": args.coeffs, "seed": args.seed}
    idx = parse_space(args.index)
    p, q, s, t = idx.spatial.q, idx.frequency.q, idx.frequency.s, idx.spatial.s
    if args.method == "lp":
        value = weighted_Lp_norm(f, p, t)
    elif args.method == "discrete":
        K = args.K if args.K is not None else int(f.effective_band()) + 2
        value = modulation_norm_discrete(f, p, q, t, s, sigma_partition(K, f.dim, f.L, f.M))
    else:
        window = make_window(ANALYSIS_WINDOW, f.dim, f.L, f.M)
        fn = modulation_norm_continuous if args.method == "continuous" else wiener_norm
        value = fn(f, window, p, q, t, s)
    _emit({"command": "norm", "method": args.method, "index": _space_dict(idx),
           "grid": {"n": f.dim, "L": f.L, "M": f.M}, "source": source, "value": value})
    d = _out_dir(args)
    if d is not None:
        (d / "function.csv").write_text(f.to_csv())
    return 0


# -- witness ----------------------------------------------------------------------


def cmd_witness(args) -> int:
    kind = args.witness
    if kind == "unit":
        seq = Sequence.delta((0,) * args.n)
    elif kind == "delta":
        seq = Sequence.delta((args.N,) + (0,) * (args.n - 1))
    elif kind == "box":
        seq = box(args.N, args.n)
    else:
        if args.output is None or len(args.inputs or ()) < 1:
            raise UsageError("holder witnesses need --out and --in (q,s tuples)")
        ins = [parse_pair(x) for x in args.inputs]
        try:
            seqs = holder_power_witness(args.N, parse_pair(args.output), ins, args.n)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if not 0 <= args.slot < len(seqs):
            raise UsageError("--slot out of range")
        seq = seqs[args.slot]
    text = seq.to_csv()
    d = _out_dir(args)
    if d is not None:
        (d / f"witness_{kind}_N{args.N}.csv").write_text(text)
    sys.stdout.write(text)
    return 0


# -- partition-check -----------------------------------------------------------------


def cmd_partition_check(args) -> int:
    L, M = _grid_args(args)
    try:
        P = sigma_partition(args.K, args.n, L, M)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    defect, leak = P.defect(), P.support_leak()
    _emit({"command": "partition-check", "K": args.K, "grid": {"n": args.n, "L": L, "M": M},
           "covered_radius": P.covered_radius, "defect": defect, "support_leak": leak,
           "pass": bool(defect <= 1e-9 and leak == 0.0)})
    return 0 if defect <= 1e-9 and leak == 0.0 else 1


# -- report ------------------------------------------------------------------------


def cmd_report(args) -> int:
    from .suites import SUITES

    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = {}
    d = _out_dir(args)
    for name in names:
        res = SUITES[name]()
        rows = res.pop("rows", [])
        results[name] = res
        if d is not None and rows:
            keys = sorted({k for r in rows for k in r})
            with open(d / f"{name}.csv", "w", newline="") as fh:
                w = csv.DictWriter(fh, fieldnames=keys, lineterminator="\n")
                w.writeheader()
                for r in rows:
                    w.writerow({k: r.get(k) for k in keys})
    # timings are machine dependent; keep them out of the deterministic output
    for res in results.values():
        for v in res.values():
            if isinstance(v, dict):
                v.pop("seconds", None)
        res.pop("seconds", None)
    _emit({"command": "report", "suites": results,
           "environment": {"threads": os.environ.get("MODSPACE_THREADS", "1"),
                           "grids": {str(k): list(v) for k, v in DEFAULT_GRIDS.items()}}})
    return 0


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modspace", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def query_flags(p, tuples):
        p.add_argument("--n", type=int, default=1, choices=(1, 2, 3, 4))
        p.add_argument("--in", dest="inputs", action="append", metavar=tuples)
        p.add_argument("--out", dest="output", metavar=tuples)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out-dir")

    p = sub.add_parser("decide", help="decide a product, convolution or embedding")
    p.add_argument("--family", required=True, choices=("modulation", "wiener"))
    p.add_argument("--kind", required=True, choices=("product", "convolution", "embedding"))
    query_flags(p, "p,q,s,t")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("oracle", help="empirical blow-up oracle on sequence spaces")
    p.add_argument("--kind", required=True, choices=("product", "convolution"))
    query_flags(p, "q,s")
    p.add_argument("--families", help="comma list of family kinds or labels")
    p.add_argument("--nmax", type=int)
    p.add_argument("--no-confirm", action="store_true",
                   help="skip the far-window re-probe of unbounded families")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("norm", help="weighted norms of a grid function")
    p.add_argument("--input", help="grid-function CSV")
    p.add_argument("--gen", choices=("comb", "gabor", "corpus"), default="comb")
    p.add_argument("--coeffs", help="k:v items, e.g. 0:1,2:0.5 (k1;k2 in 2-D)")
    p.add_argument("--index-in-corpus", type=int, default=0)
    p.add_argument("--index", required=True, metavar="p,q,s,t")
    p.add_argument("--method", choices=("discrete", "continuous", "wiener", "lp"),
                   default="discrete")
    p.add_argument("--n", type=int, default=1, choices=(1, 2))
    p.add_argument("--L", type=float)
    p.add_argument("--M", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("witness", help="emit a witness sequence as lattice CSV")
    p.add_argument("--witness", required=True, choices=("unit", "delta", "box", "holder"))
    p.add_argument("--N", type=int, default=8)
    p.add_argument("--slot", type=int, default=0)
    query_flags(p, "q,s")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("partition-check", help="partition-of-unity defect")
    p.add_argument("--K", type=int, default=16)
    p.add_argument("--n", type=int, default=1, choices=(1, 2))
    p.add_argument("--L", type=float)
    p.add_argument("--M", type=int)
    p.set_defaults(func=cmd_partition_check)

    p = sub.add_parser("report", help="run a named measurement suite")
    from .suites import SUITES
    p.add_argument("--suite", required=True, choices=(*SUITES, "all"))
    p.add_argument("--out-dir")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "N", 1) < 0:
            raise UsageError("--N must be >= 0")
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"modspace: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
