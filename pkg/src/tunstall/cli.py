"""Command-line interface: ``tunstall {build,encode,decode,stats,bench}``."""
from __future__ import annotations

import argparse
import gc
import json
import sys
import time
from pathlib import Path

from .builder import BuilderState, build_binary, check_leaf_target
from .codebook import Codebook, deserialize, freeze, serialize
from .codec import EncodedContainer, decode, encode
from .errors import TunstallError
from .model import load_model
from .oracle import naive_build, naive_build_general


def _binary_p0(model) -> float:
    if model.alphabet_size != 2 or model.state_count != 1:
        raise TunstallError("--binary-fast-path needs a binary i.i.d. model")
    return model.emissions[0][0].prob


def _build(model, scheme, n, binary: bool):
    if binary:
        return build_binary(_binary_p0(model), n), None
    check_leaf_target(model, n)
    state = BuilderState(model, scheme)
    return state.run(n), state.stats


def _tree_report(book: Codebook) -> list[dict]:
    rows = []
    for j in range(book.state_count):
        st = book.stats(j)
        rows.append(
            {
                "tree": j,
                "leaves": st.leaf_count,
                "width": st.width,
                "expected_length": st.expected_length,
                "ratio": st.ratio,
                "ideal_ratio": st.ideal_ratio,
            }
        )
    return rows


def _print_report(rows: list[dict]) -> None:
    for r in rows:
        print(
            f"tree {r['tree']}: leaves={r['leaves']} width={r['width']} "
            f"E[l]={r['expected_length']:.6g} ratio={r['ratio']:.6g} "
            f"ideal_ratio={r['ideal_ratio']:.6g}"
        )


def cmd_build(args) -> int:
    model, scheme = load_model(args.model)
    forest, _ = _build(model, scheme, args.n, args.binary_fast_path)
    result: dict = {}
    if args.naive:
        if args.binary_fast_path:
            reference = naive_build(_binary_p0(model), args.n)
        else:
            reference = naive_build_general(model, scheme, args.n)
        result["oracle"] = "MATCH" if reference == forest else "MISMATCH"
        if not args.json:
            print(f"oracle: {result['oracle']}")
        if reference != forest:
            print("oracle mismatch; codebook not written", file=sys.stderr)
            return 1
    book = freeze(forest, model, scheme)
    Path(args.output).write_bytes(serialize(book))
    result["trees"] = _tree_report(book)
    if args.json:
        print(json.dumps(result, indent=2))
    else:
        _print_report(result["trees"])
    return 0


def _load_book(args):
    model, scheme = load_model(args.model)
    return deserialize(Path(args.codebook).read_bytes(), model, scheme)


def cmd_encode(args) -> int:
    book = _load_book(args)
    data = Path(args.input).read_bytes()
    container = encode(book, data, args.state)
    Path(args.output).write_bytes(container.to_bytes())
    return 0


def cmd_decode(args) -> int:
    book = _load_book(args)
    container = EncodedContainer.from_bytes(Path(args.input).read_bytes())
    Path(args.output).write_bytes(bytes(decode(book, container)))
    return 0


def cmd_stats(args) -> int:
    rows = _tree_report(_load_book(args))
    if args.json:
        print(json.dumps({"trees": rows}, indent=2))
    else:
        _print_report(rows)
    return 0


def bench_one(model, scheme, n: int, binary: bool = False, repeat: int = 1) -> dict:
    """Best-of-``repeat`` build time for one leaf target, with size counters."""
    best = float("inf")
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(repeat):
            t0 = time.perf_counter()
            forest, stats = _build(model, scheme, n, binary)
            best = min(best, time.perf_counter() - t0)
    finally:
        if gc_was_enabled:
            gc.enable()
    D, s = model.alphabet_size, model.state_count
    leaves = forest.leaf_count()
    splits = len(forest.internal_nodes())
    return {
        "n": n,
        "seconds": best,
        "leaves": leaves,
        "nodes": len(forest),
        "splits": splits,
        "split_identity": splits == (leaves - D * s) // (D - 1) + s,
        "pq_removals": None if stats is None else stats.pq_removals,
    }


def cmd_bench(args) -> int:
    model, scheme = load_model(args.model)
    rows = [bench_one(model, scheme, n, args.binary_fast_path, args.repeat) for n in args.n]
    if args.json:
        print(json.dumps({"runs": rows}, indent=2))
    else:
        for r in rows:
            print(
                f"n={r['n']} time={r['seconds'] * 1e3:.3f}ms leaves={r['leaves']} "
                f"nodes={r['nodes']} splits={r['splits']} identity={'ok' if r['split_identity'] else 'FAIL'}"
            )
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tunstall", description="Tunstall variable-to-fixed-length coding")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a codebook (.tvfc) from a model file")
    p.add_argument("model")
    p.add_argument("n", type=int, help="target total leaf count")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--naive", action="store_true", help="cross-check against the brute-force builder")
    p.add_argument("--binary-fast-path", action="store_true", help="use the two-queue binary builder")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_build)

    for name, func, helptext in (
        ("encode", cmd_encode, "encode a file of one-byte symbols"),
        ("decode", cmd_decode, "decode a .tvfe container"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("model")
        p.add_argument("codebook")
        p.add_argument("input")
        p.add_argument("output")
        if name == "encode":
            p.add_argument("--state", type=int, default=0, help="initial source state")
        p.set_defaults(func=func)

    p = sub.add_parser("stats", help="print per-tree statistics of a codebook")
    p.add_argument("model")
    p.add_argument("codebook")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="time forest construction for several leaf targets")
    p.add_argument("model")
    p.add_argument("n", type=int, nargs="+")
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--binary-fast-path", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except TunstallError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
