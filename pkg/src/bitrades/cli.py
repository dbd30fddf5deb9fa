"""Command-line front end.

Exit codes: 0 success / property holds, 1 property fails, 2 usage or
validation error, 3 search refused by a budget or size guard.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable

from . import construct as C
from . import search as S
from . import verify as V
from .core import CellSet, Params, ValidationError, cartesian_product

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_REFUSED = 0, 1, 2, 3


@dataclass
class ExperimentConfig:
    command: list[str]
    inputs: list[str] = field(default_factory=list)
    k: int | None = None
    n: int | None = None
    t: int | None = None
    s: int | None = None
    m: int | None = None
    out: str | None = None
    workers: int = 1
    node_budget: int = S.DEFAULT_NODE_BUDGET
    store_cap: int = S.DEFAULT_STORE_CAP
    seed: int = 0
    self_check: bool = False
    format: str = "json"

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, doc: dict) -> ExperimentConfig:
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ValidationError(f"bad config: {exc}") from None


class _Output:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.lines: list[str] = []

    def emit(self, text: str) -> None:
        self.lines.append(text)

    def flush(self) -> None:
        text = "\n".join(self.lines) + ("\n" if self.lines else "")
        if self.cfg.out:
            Path(self.cfg.out).write_text(text)
        else:
            sys.stdout.write(text)


def _load(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None


def _load_cells(path: str) -> CellSet:
    return CellSet.from_json(_load(path))


def _load_many(path: str) -> list[CellSet]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None
    try:
        return [CellSet.from_json(json.loads(ln)) for ln in text.splitlines() if ln.strip()]
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not newline-delimited JSON: {exc}") from None


def _need(cfg: ExperimentConfig, *names: str) -> list[Any]:
    vals = [getattr(cfg, name) for name in names]
    missing = [f"--{name}" for name, v in zip(names, vals) if v is None]
    if missing:
        raise ValidationError(f"{' '.join(cfg.command)} needs {', '.join(missing)}")
    return vals


def _one_input(cfg: ExperimentConfig, count: int = 1) -> list[str]:
    if len(cfg.inputs) != count:
        raise ValidationError(f"{' '.join(cfg.command)} expects {count} input file(s)")
    return cfg.inputs


def _emit_cert(out: _Output, cfg: ExperimentConfig, cert: V.Certificate) -> int:
    if cfg.format == "table":
        out.emit(f"verdict  {'PASS' if cert.verdict else 'FAIL'}")
        for key, val in cert.to_json()["witness"].items():
            out.emit(f"{key:<8} {json.dumps(val)}")
    else:
        out.emit(cert.dumps())
    return EXIT_OK if cert.verdict else EXIT_FAIL


def _emit_report(out: _Output, cfg: ExperimentConfig, rep: S.SearchReport, objects: bool = True) -> None:
    if cfg.format == "table":
        out.emit(f"objective  {rep.objective}   Q_{rep.params.k}^{rep.params.n}")
        out.emit(f"count      {rep.count}")
        out.emit(f"nodes      {rep.nodes}")
        for key, val in rep.extra.items():
            out.emit(f"{key:<10} {val}")
        out.emit("size  count")
        for size, c in sorted(rep.histogram.items()):
            out.emit(f"{size:>4}  {c}")
    else:
        out.emit(rep.dumps(with_objects=objects))


# ---------------------------------------------------------------------------
# verify


def _verify(cfg: ExperimentConfig, out: _Output) -> int:
    what = cfg.command[1]
    if what == "embedded":
        bpath, mpath = _one_input(cfg, 2)
        (t,) = _need(cfg, "t")
        return _emit_cert(out, cfg, V.is_embedded(_load_cells(bpath), _load_cells(mpath), t))
    (path,) = _one_input(cfg)
    s = _load_cells(path)
    if what == "bitrade":
        return _emit_cert(out, cfg, V.is_latin_bitrade(s))
    if what == "mds":
        return _emit_cert(out, cfg, V.is_t_fold_mds(s, 1 if cfg.t is None else cfg.t))
    if what == "bipartite":
        return _emit_cert(out, cfg, V.bipartition(s))
    if what == "minimal":
        rep = V.minimal_bitrade_check(s)
        if cfg.format == "table":
            for name, flag in zip("abcd", rep.flags):
                out.emit(f"({name}) {'yes' if flag else 'no'}")
            out.emit(f"consistent {'yes' if rep.consistent else 'NO'}")
        else:
            out.emit(json.dumps(rep.to_json(), separators=(",", ":")))
        return EXIT_OK if all(rep.flags) else EXIT_FAIL
    raise ValidationError(f"unknown verify target {what!r}")


# ---------------------------------------------------------------------------
# construct


def _construct(cfg: ExperimentConfig, out: _Output) -> int:
    what = cfg.command[1]
    result: CellSet | C.PairFunction
    if what == "moebius":
        (path,) = _one_input(cfg)
        result = C.moebius_bitrade(_load_cells(path))
    elif what == "bs":
        n, s = _need(cfg, "n", "s")
        result = C.b_s(n, s)
    elif what == "linear":
        (n,) = _need(cfg, "n")
        result = C.linear_mds_q3(n)
    elif what == "pairfn":
        if len(cfg.command) < 3:
            raise ValidationError("construct pairfn needs one of g, gprime, h")
        (n,) = _need(cfg, "n")
        kind = cfg.command[2]
        if kind == "g":
            result = C.pair_g(n)
        elif kind == "gprime":
            result = C.pair_g_prime(n)
        elif kind == "h":
            (s,) = _need(cfg, "s")
            result = C.pair_h(n, s)
        else:
            raise ValidationError(f"unknown pair function {kind!r}")
    elif what == "lift":
        (path,) = _one_input(cfg)
        result = C.lift_pair_function(C.PairFunction.from_json(_load(path)))
    elif what in ("product", "symdiff"):
        a, b = (_load_cells(p) for p in _one_input(cfg, 2))
        result = cartesian_product(a, b) if what == "product" else a ^ b
    else:
        raise ValidationError(f"unknown construction {what!r}")
    out.emit(result.dumps())
    if cfg.self_check and isinstance(result, CellSet) and what in ("moebius", "bs"):
        assert V.is_latin_bitrade(result)
    return EXIT_OK


# ---------------------------------------------------------------------------
# search


def _search(cfg: ExperimentConfig, out: _Output) -> int:
    what = cfg.command[1]
    if what == "bitrades":
        k, n = _need(cfg, "k", "n")
        rep = S.brute_force_bitrades(
            Params(k, n), node_budget=cfg.node_budget, store_cap=cfg.store_cap, self_check=cfg.self_check
        )
        _emit_report(out, cfg, rep)
        return EXIT_OK
    if what == "mds":
        k, n = _need(cfg, "k", "n")
        rep = S.enumerate_mds_report(
            Params(k, n),
            1 if cfg.t is None else cfg.t,
            workers=cfg.workers,
            node_budget=cfg.node_budget,
            store_cap=cfg.store_cap,
            self_check=cfg.self_check,
        )
        _emit_report(out, cfg, rep)
        return EXIT_OK
    if what == "spectrum":
        t = 1 if cfg.t is None else cfg.t
        if cfg.inputs:
            (path,) = _one_input(cfg)
            codes = _load_many(path)
        else:
            k, n = _need(cfg, "k", "n")
            codes = S.enumerate_mds_report(
                Params(k, n), t, workers=cfg.workers, node_budget=cfg.node_budget, store_cap=cfg.store_cap
            ).objects or []
        rep = S.pairwise_symdiff_spectrum(codes, t)
        _emit_report(out, cfg, rep)
        return EXIT_OK
    if what == "split":
        (path,) = _one_input(cfg)
        (t,) = _need(cfg, "t")
        return _emit_cert(out, cfg, S.split_check(_load_cells(path), t, node_budget=cfg.node_budget))
    if what == "embed":
        (path,) = _one_input(cfg)
        rep = S.embedding_search(_load_cells(path), 1 if cfg.t is None else cfg.t, node_budget=cfg.node_budget)
        _emit_report(out, cfg, rep)
        return EXIT_OK if rep.count else EXIT_FAIL
    if what == "complete":
        (path,) = _one_input(cfg)
        (m,) = _need(cfg, "m")
        p = S.PartialQuasigroup.from_graph(_load_cells(path))
        q = S.complete_partial_quasigroup(p, m, node_budget=cfg.node_budget)
        if q is None:
            out.emit(json.dumps({"completed": False, "order": m}))
            return EXIT_FAIL
        out.emit(q.graph().dumps())
        return EXIT_OK
    raise ValidationError(f"unknown search {what!r}")


# ---------------------------------------------------------------------------
# packaged experiments


def _row(out: _Output, ok: bool, label: str, detail: str) -> bool:
    out.emit(f"{'PASS' if ok else 'FAIL'}  {label:<44} {detail}")
    return ok


def _repro_counts(cfg: ExperimentConfig, out: _Output) -> bool:
    ok = True
    for n in (1, 2, 3):
        got = list(S.enumerate_bitrades_q3(n))
        distinct = len({b.mask for b in got})
        ok &= _row(out, distinct == 2 ** 2**n, f"Q_3^{n} Moebius bitrades", f"{distinct} (expected {2 ** 2**n})")
        if n <= 2:
            brute = S.brute_force_bitrades(Params(3, n)).objects or []
            same = {b.mask for b in brute} == {b.mask for b in got}
            ok &= _row(out, same, f"Q_3^{n} brute force agrees", f"{len(brute)} bitrades")
    return ok


def _repro_spectrum(cfg: ExperimentConfig, out: _Output) -> bool:
    ok = True
    q42 = S.brute_force_bitrades(Params(4, 2))
    sizes = sorted(q42.histogram)
    small = [s for s in sizes if 0 < s < 8]
    ok &= _row(out, min(s for s in sizes if s) >= 4 and set(small) <= {4, 6}, "Q_4^2 full subset scan", f"sizes {sizes}")
    cat = list(S.enumerate_bitrades_q3(3))
    mid = sorted({len(b) for b in cat if 8 <= len(b) < 16})
    ok &= _row(out, set(mid) <= {8, 12, 14}, "Q_3^3 catalogue sizes in [8,16)", f"{mid}")
    realised = sorted(len(C.b_s(3, s)) for s in range(3))
    ok &= _row(out, realised == [8, 12, 14], "b_s(3, s) realises 8, 12, 14", f"{realised}")
    return ok


def _repro_latin4(cfg: ExperimentConfig, out: _Output) -> bool:
    rep = S.enumerate_mds_report(Params(4, 3), 1, workers=cfg.workers)
    ok = _row(out, rep.count == 576, "order-4 Latin squares", f"{rep.count}")
    spectrum = S.pairwise_symdiff_spectrum(rep.objects or [], 1)
    for size, c in sorted(spectrum.histogram.items()):
        out.emit(f"      size {size:>3}: {c} pairs")
    hits = spectrum.extra["interval_sizes"]
    ok &= _row(out, not hits, f"no symdiff size in (8,16) over {spectrum.count} pairs", f"found {hits}")
    return ok


def _repro_nonsplit(cfg: ExperimentConfig, out: _Output) -> bool:
    ok = True
    for n in (2, 3):
        cert = S.split_check(C.lift_pair_function(C.pair_g(n)), 2, node_budget=cfg.node_budget)
        ok &= _row(out, cert.verdict, f"lift(g), n={n} splittable", f"nodes {cert['nodes']}")
        for s in range(1, n + 1):
            cert = S.split_check(C.lift_pair_function(C.pair_h(n, s)), 2, node_budget=cfg.node_budget)
            ok &= _row(out, not cert.verdict, f"lift(h_{s}), n={n} non-splittable", f"nodes {cert['nodes']}")
    return ok


def _repro_closure(cfg: ExperimentConfig, out: _Output) -> bool:
    rng = random.Random(cfg.seed)
    cat = list(S.enumerate_bitrades_q3(3))
    bad_sym = sum(not V.is_latin_bitrade(rng.choice(cat) ^ rng.choice(cat)) for _ in range(1000))
    bad_prod = 0
    for _ in range(1000):
        a, b = rng.choice(cat), rng.choice(list(S.enumerate_bitrades_q3(rng.choice((1, 2)))))
        p = cartesian_product(a, b)
        if not V.is_latin_bitrade(p) or (V.bipartition(a) and V.bipartition(b) and not V.bipartition(p)):
            bad_prod += 1
    ok = _row(out, bad_sym == 0, "1000 random symdiffs in Q_3^3", f"{bad_sym} failures")
    ok &= _row(out, bad_prod == 0, "1000 random products", f"{bad_prod} failures")
    return ok


REPRO: dict[str, Callable[[ExperimentConfig, _Output], bool]] = {
    "counts": _repro_counts,
    "spectrum": _repro_spectrum,
    "latin4": _repro_latin4,
    "nonsplit": _repro_nonsplit,
    "closure": _repro_closure,
}


def _repro(cfg: ExperimentConfig, out: _Output) -> int:
    name = cfg.command[1]
    if name not in REPRO:
        raise ValidationError(f"unknown experiment {name!r}")
    ok = REPRO[name](cfg, out)
    out.emit("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def run(cfg: ExperimentConfig) -> int:
    out = _Output(cfg)
    handlers = {"verify": _verify, "construct": _construct, "search": _search, "repro": _repro}
    try:
        if len(cfg.command) < 2 or cfg.command[0] not in handlers:
            raise ValidationError(f"unknown command {' '.join(cfg.command)!r}")
        if cfg.format not in ("json", "table"):
            raise ValidationError(f"unknown format {cfg.format!r}")
        code = handlers[cfg.command[0]](cfg, out)
    except ValidationError as exc:
        out.flush()
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except S.SearchRefused as exc:
        out.flush()
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    out.flush()
    return code


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int)
    common.add_argument("--n", type=int)
    common.add_argument("--t", type=int)
    common.add_argument("--s", type=int)
    common.add_argument("--m", type=int, help="target order for completion")
    common.add_argument("--in", dest="inputs", action="append", default=[], metavar="FILE")
    common.add_argument("--out")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--node-budget", type=int, default=S.DEFAULT_NODE_BUDGET)
    common.add_argument("--store-cap", type=int, default=S.DEFAULT_STORE_CAP)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--self-check", action="store_true")
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--save-config", metavar="FILE", help="write the parsed config and exit")

    parser = argparse.ArgumentParser(prog="bitrades", description=__doc__)
    parser.add_argument("--config", metavar="FILE", help="replay a saved experiment config")
    sub = parser.add_subparsers(dest="group")

    p = sub.add_parser("verify", parents=[common])
    p.add_argument("what", choices=("bitrade", "mds", "bipartite", "minimal", "embedded"))
    p.add_argument("files", nargs="*")

    p = sub.add_parser("construct", parents=[common])
    p.add_argument("what", choices=("moebius", "bs", "linear", "pairfn", "lift", "product", "symdiff"))
    p.add_argument("rest", nargs="*", help="pair function kind (g, gprime, h) or input files")

    p = sub.add_parser("search", parents=[common])
    p.add_argument("what", choices=("bitrades", "mds", "spectrum", "split", "embed", "complete"))
    p.add_argument("files", nargs="*")

    p = sub.add_parser("repro", parents=[common])
    p.add_argument("what", choices=tuple(REPRO))
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        # positionals may follow flags, so stray file names are collected here
        args, extra = parser.parse_known_args(argv)
        flags = [x for x in extra if x.startswith("-")]
        if flags:
            parser.error(f"unrecognized arguments: {' '.join(flags)}")
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.config:
        try:
            cfg = ExperimentConfig.from_json(_load(args.config))
        except ValidationError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        return run(cfg)
    if not args.group:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    command = [args.group, args.what]
    inputs = list(args.inputs)
    rest = getattr(args, "rest", None)
    if rest is not None:
        if args.what == "pairfn" and rest:
            command.append(rest[0])
            rest = rest[1:]
        inputs += rest
    inputs += getattr(args, "files", [])
    inputs += extra
    cfg = ExperimentConfig(
        command=command,
        inputs=inputs,
        k=args.k,
        n=args.n,
        t=args.t,
        s=args.s,
        m=args.m,
        out=args.out,
        workers=args.workers,
        node_budget=args.node_budget,
        store_cap=args.store_cap,
        seed=args.seed,
        self_check=args.self_check,
        format=args.format,
    )
    if args.save_config:
        Path(args.save_config).write_text(json.dumps(cfg.to_json(), indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
