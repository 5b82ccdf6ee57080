"""Command line entry point: ``extremal <command> ...``.

Exit codes follow the certificate contract: 0 PASS, 1 FAIL or error,
2 INDETERMINATE (argparse also uses 2 for usage errors).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import minimal, relations, verify
from .arith import IntTriple, Matrix2, decimal
from .certified import DEFAULT_MAX_PREC, CertifiedReal, PrecisionError
from .sequence import (ExtremalSequence, InsufficientTermsError, Seed, SeedError, certified_xi,
                       example_two_seed, fibonacci_seed, fibonacci_word_cf, fibonacci_word_xi,
                       validate_seed, xi_from_sequence)


@dataclass
class RunConfig:
    max_prec: int = DEFAULT_MAX_PREC
    digits: int = 50
    xmax: int = 10**6
    hmax: int = 10**4
    workers: int = 1
    out: Optional[str] = None
    csv: Optional[str] = None

    def check(self):
        if self.max_prec < 128:
            raise ValueError("max_prec must be at least 128 bits")
        for name in ("digits", "xmax", "hmax", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


def load_config(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    known = {f.name: f.type for f in fields(RunConfig)}
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value if key in ("out", "csv") else int(value)
    return out


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.replace(" ", "").split(",") if v]


def _read_sequence(path: str) -> ExtremalSequence:
    text = Path(path).read_text()
    try:
        return ExtremalSequence.from_json(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def _write(path: Optional[str], text: str):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _check_cap(radius: Fraction, cfg: RunConfig):
    bits = radius.denominator.bit_length() - radius.numerator.bit_length()
    if bits + 64 > cfg.max_prec:
        raise PrecisionError(f"radius 2^-{bits} needs more than the {cfg.max_prec}-bit cap")


def _xi_for(seq: ExtremalSequence, radius: Fraction, cfg: RunConfig) -> tuple[CertifiedReal, ExtremalSequence]:
    """``xi`` to ``radius``, extending the sequence from its seed when needed."""
    _check_cap(radius, cfg)
    try:
        return xi_from_sequence(seq, radius), seq
    except InsufficientTermsError:
        return certified_xi(seq.seed, radius, start_terms=len(seq), max_terms=len(seq) + 64)


# -- commands -----------------------------------------------------------------


def cmd_generate(args, cfg: RunConfig) -> int:
    if args.family == "fib":
        seed = fibonacci_seed(args.a, args.b)
    elif args.family == "ex2":
        seed = example_two_seed(args.a)
    else:
        seed = Seed(Matrix2(*_ints(args.matrix)), IntTriple(*_ints(args.y1)), IntTriple(*_ints(args.y2)))
    report = validate_seed(seed, raise_on_failure=False)
    if not report.ok:
        print("seed rejected: " + report.summary(), file=sys.stderr)
        return 1
    seq = ExtremalSequence.generate(seed, args.terms)
    if cfg.out:
        Path(cfg.out).write_text(seq.to_json())
        for i, y in enumerate(seq.triples, 1):
            digits = len(decimal(y.norm))
            shown = tuple(y) if digits <= 30 else f"<{digits} digits>"
            print(f"{i:3d}  norm digits {digits:8d}  {shown}")
    else:
        sys.stdout.write(seq.to_json())
    return 0


def cmd_xi(args, cfg: RunConfig) -> int:
    seq = _read_sequence(args.seq)
    radius = Fraction(1, 10**cfg.digits)
    _check_cap(radius, cfg)
    try:
        xi = xi_from_sequence(seq, radius)
    except InsufficientTermsError as exc:
        print(f"cannot reach 10^-{cfg.digits} from {len(seq)} terms: {exc}; extend sequence",
              file=sys.stderr)
        return 1
    print(xi.decimal_string(cfg.digits))
    return 0


def cmd_cf(args, cfg: RunConfig) -> int:
    xi = fibonacci_word_xi(args.a, args.b, Fraction(1, 10**cfg.digits))
    cf = fibonacci_word_cf(args.a, args.b, args.terms)
    print("quotients: [" + ", ".join(map(str, cf.quotients)) + "]")
    print(xi.decimal_string(cfg.digits))
    return 0


def cmd_verify(args, cfg: RunConfig) -> int:
    seq = _read_sequence(args.seq)
    start, stop = (_ints(args.range.replace(":", ",")) + [None])[:2]
    cert = verify.extremality_certificate(seq, None, start, stop)
    i0, rows = verify.relation_check(seq if len(seq) >= 5 else seq.extend(5 - len(seq)))
    doc = cert.to_dict()
    doc["relations"] = {"i0": i0, "rows": [[r.index, decimal(r.first), decimal(r.second)] for r in rows]}
    try:
        doc["matrix"] = [decimal(v) for v in verify.matrix_recovery(seq)]
    except verify.MatrixRecoveryError as exc:
        doc["matrix"] = None
        doc["matrix_error"] = str(exc)
    _write(cfg.out, json.dumps(doc, indent=1) + "\n")
    if cfg.csv:
        Path(cfg.csv).write_text(cert.to_csv())
    print(cert.summary(), file=sys.stderr)
    return cert.exit_code


def cmd_minpoints(args, cfg: RunConfig) -> int:
    seq = _read_sequence(args.seq)
    xi, seq = _xi_for(seq, Fraction(1, 16 * cfg.xmax * cfg.xmax << 64), cfg)
    records = minimal.minimal_points(xi, cfg.xmax, workers=cfg.workers)
    doc = {
        "xmax": cfg.xmax,
        "tie_break": minimal.TIE_BREAK,
        "records": [{"point": [decimal(v) for v in r.point], "norm": decimal(r.norm), "L": r.L.to_json()}
                    for r in records],
    }
    status = 0
    if args.crosscheck:
        seq = seq if seq.term(len(seq)).norm > cfg.xmax else seq.extend(4)
        check = minimal.crosscheck_minimal_points(records, seq)
        doc["crosscheck"] = {
            "N0": check["N0"],
            "unmatched": [[n, [decimal(v) for v in p]] for n, p in check["unmatched"]],
            "generated_missing": [[decimal(v) for v in y] for y in check["generated_missing"]],
        }
        status = 0 if check["N0"] is not None else 1
    _write(cfg.out, json.dumps(doc, indent=1) + "\n")
    if cfg.csv:
        Path(cfg.csv).write_text(minimal.records_to_csv(records))
    return status


def cmd_minpoly(args, cfg: RunConfig) -> int:
    seq = _read_sequence(args.seq)
    xi, seq = _xi_for(seq, Fraction(1, 1 << 160), cfg)
    records = minimal.minimal_polys(xi, cfg.hmax, workers=cfg.workers)
    doc = {
        "hmax": cfg.hmax,
        "records": [{"poly": [decimal(v) for v in r.poly], "height": decimal(r.height),
                     "value": r.value.to_json()} for r in records],
    }
    status = 0
    if args.certificate:
        try:
            cert = verify.poly_certificate(records, xi, seq)
            doc["certificate"] = cert.to_dict()
            status = cert.exit_code
        except InsufficientTermsError as exc:
            doc["certificate"] = {"status": verify.INDETERMINATE, "error": str(exc)}
            status = 2
        doc["sandwich"] = [[list(map(str, r.first)), list(map(str, r.second)), r.status]
                           for r in verify.dual_sandwich_check(records, xi)]
    _write(cfg.out, json.dumps(doc, indent=1) + "\n")
    if cfg.csv:
        Path(cfg.csv).write_text(minimal.records_to_csv(records))
    return status


def cmd_cubicgap(args, cfg: RunConfig) -> int:
    seq = _read_sequence(args.seq)
    values = minimal.cubic_gap_sequence(seq, None, args.count)
    doc = [{"i": i, "value": v.to_json()} for i, v in enumerate(values, 1)]
    _write(cfg.out, json.dumps(doc, indent=1) + "\n")
    return 0


def cmd_cubic(args, cfg: RunConfig) -> int:
    seq = _read_sequence(args.seq)
    xi, _ = _xi_for(seq, Fraction(1, 1 << 200), cfg)
    doc = []
    for H in _ints(args.heights):
        P, value = minimal.best_monic_cubic(xi, H)
        row = {"H": H, "monic": [decimal(v) for v in P], "value": value.to_json()}
        if args.algebraic:
            Q, root, dist = minimal.best_cubic_algebraic_integer(xi, H)
            row["algebraic"] = {"poly": [decimal(v) for v in Q], "root": root.to_json(),
                                "distance": dist.to_json()}
        doc.append(row)
    _write(cfg.out, json.dumps(doc, indent=1) + "\n")
    return 0


def cmd_relations(args, cfg: RunConfig) -> int:
    if args.sweep:
        results = relations.sweep(args.sweep, args.k, all_weights=args.all_weights)
        doc = [{"multidegree": list(r.md.d), "weight": r.md.p, "dimension": r.dimension,
                "mirror_dimension": r.mirror_dimension,
                "kernel": [c.to_dict()["coefficients"] for c in r.kernel]}
               for r in results if r.kernel]
        _write(cfg.out, json.dumps(doc, indent=1) + "\n")
        return 0 if all(r.dimension == r.mirror_dimension for r in results) else 1
    md = relations.MultiDegree(tuple(_ints(args.d)), args.p)
    kernel = relations.null_space(md)
    doc = {"multidegree": list(md.d), "weight": md.p,
           "dimension": relations.space_dimension(md),
           "profiles": len(relations.admissible_profiles(md)),
           "kernel": [c.to_dict() for c in kernel]}
    for name, (_, known_md) in relations.KNOWN.items():
        if known_md == md:
            doc["contains_" + name + "_known_relation"] = relations.in_span(
                relations.expand_known_relation(name), kernel)
    if args.validate:
        seq = _read_sequence(args.validate)
        doc["validation"] = [{"status": v.status, "first_index": v.first_index}
                             for v in relations.validate_candidates(kernel, seq)]
    _write(cfg.out, json.dumps(doc, indent=1) + "\n")
    if args.pretty:
        for c in kernel:
            print(c.pretty(), file=sys.stderr)
    return 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file overriding defaults")
    common.add_argument("--workers", type=int)
    common.add_argument("--max-prec", type=int, dest="max_prec")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--csv", help="CSV output path")

    parser = argparse.ArgumentParser(prog="extremal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="build a sequence file")
    g.add_argument("family", choices=["fib", "ex2", "explicit"])
    g.add_argument("--a", type=int, default=1)
    g.add_argument("--b", type=int, default=2)
    g.add_argument("--matrix", help="a,b,c,d for [[a,b],[c,d]]")
    g.add_argument("--y1")
    g.add_argument("--y2")
    g.add_argument("--terms", type=int, default=20)
    g.set_defaults(func=cmd_generate)

    x = sub.add_parser("xi", parents=[common], help="certified decimal expansion of xi")
    x.add_argument("--seq", required=True)
    x.add_argument("--digits", type=int)
    x.set_defaults(func=cmd_xi)

    c = sub.add_parser("cf", parents=[common], help="xi from the Fibonacci word continued fraction")
    c.add_argument("--a", type=int, default=1)
    c.add_argument("--b", type=int, default=2)
    c.add_argument("--terms", type=int, default=12)
    c.add_argument("--digits", type=int)
    c.set_defaults(func=cmd_cf)

    v = sub.add_parser("verify", parents=[common], help="extremality certificate")
    v.add_argument("--seq", required=True)
    v.add_argument("--range", default="1:", help="start:stop (1-based, inclusive)")
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("minpoints", parents=[common], help="brute force minimal points")
    m.add_argument("--seq", required=True)
    m.add_argument("--xmax", type=int)
    m.add_argument("--crosscheck", action="store_true")
    m.set_defaults(func=cmd_minpoints)

    p = sub.add_parser("minpoly", parents=[common], help="brute force minimal polynomials")
    p.add_argument("--seq", required=True)
    p.add_argument("--hmax", type=int)
    p.add_argument("--certificate", action="store_true")
    p.set_defaults(func=cmd_minpoly)

    cg = sub.add_parser("cubicgap", parents=[common], help="{y_i0 xi^3} for i = 1..count")
    cg.add_argument("--seq", required=True)
    cg.add_argument("--count", type=int, default=15)
    cg.set_defaults(func=cmd_cubicgap)

    cu = sub.add_parser("cubic", parents=[common], help="best monic cubics")
    cu.add_argument("--seq", required=True)
    cu.add_argument("--heights", default="50,100")
    cu.add_argument("--algebraic", action="store_true", help="also nearest cubic algebraic integer")
    cu.set_defaults(func=cmd_cubic)

    r = sub.add_parser("relations", parents=[common], help="null space of E(d, p)")
    r.add_argument("--d", default="1,1,0,2,1")
    r.add_argument("--p", type=int, default=5)
    r.add_argument("--validate", metavar="SEQ", help="evaluate the kernel on a sequence file")
    r.add_argument("--pretty", action="store_true")
    r.add_argument("--sweep", type=int, metavar="B", help="sweep all d with |d| <= B")
    r.add_argument("--k", type=int, default=4)
    r.add_argument("--all-weights", action="store_true")
    r.set_defaults(func=cmd_relations)
    return parser


def resolve_config(args) -> RunConfig:
    values = load_config(args.config) if args.config else {}
    for name in ("workers", "max_prec", "out", "csv", "digits", "xmax", "hmax"):
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    cfg = RunConfig(**values)
    cfg.check()
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except (SeedError, ValueError, OSError, PrecisionError, InsufficientTermsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
