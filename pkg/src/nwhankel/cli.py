"""Command-line front end.

Exit codes: 0 success, 2 bad input, 3 synthesis failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import hankel, synthesis
from .errors import InputError, NestedHankelError, SynthesisError
from .linalg_kernel import DEFAULT_RANK_TOL
from .nested_words import check_alphabet, enumerate_well_matched, format_word, parse_word
from .wvpa import Wvpa, random_wvpa

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SYNTH = 3


def fmt(x: float) -> str:
    return f"{float(x) + 0.0:.12g}"


def _alphabet(text: str | None, default=("a",)):
    if text is None:
        return tuple(default)
    return check_alphabet([s.strip() for s in text.split(",") if s.strip()])


def _load_automaton(path: str) -> Wvpa:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read automaton file: {exc}") from exc
    return Wvpa.from_json(text)


def _oracle(args):
    if args.automaton:
        a = _load_automaton(args.automaton)
        return hankel.automaton_oracle(a, name=Path(args.automaton).name), _alphabet(
            args.alphabet, a.alphabet
        )
    return hankel.builtin_oracle(args.function), _alphabet(args.alphabet)


def cmd_eval(args, out):
    a = _load_automaton(args.automaton)
    w = parse_word(args.word)
    print(fmt(a.behavior(w)), file=out)
    return EXIT_OK


def cmd_rank(args, out):
    f, alphabet = _oracle(args)
    st = hankel.stabilized_block(f, alphabet, args.start_len, args.max_len, args.tol)
    rows, cols = st.block.shape
    print(
        f"rank={st.rank} n={hankel.grid_size(st.rank)} "
        f"stabilized={'true' if st.stabilized else 'false'} block={rows}x{cols}",
        file=out,
    )
    if args.dump:
        Path(args.dump).write_text(st.block.to_csv())
    return EXIT_OK


def cmd_synth(args, out):
    f, alphabet = _oracle(args)
    report = synthesis.synthesize(
        f,
        alphabet,
        start_len=args.start_len,
        max_len=args.max_len,
        rel_tol=args.rel_tol,
        rank_tol=args.tol,
        verify_len=args.verify_len,
    )
    if args.out:
        Path(args.out).write_text(report.automaton.to_json() + "\n")
    print(report.text(), file=out)
    report.check(args.verify_tol)
    return EXIT_OK


def cmd_roundtrip(args, out):
    alphabet = _alphabet(args.alphabet)
    if args.n < 1 or args.seeds < 1:
        raise InputError("--n and --seeds must be at least 1")
    print("seed  rank  bound  synth_n  max_abs_error  status", file=out)
    passed = 0
    for seed in range(args.seeds):
        a = random_wvpa(args.n, alphabet, args.gamma, seed)
        f = hankel.automaton_oracle(a)
        st = hankel.stabilized_block(f, alphabet, args.start_len, args.max_len, args.tol)
        bound_ok = st.rank <= args.n ** 2
        synth_n, err, status = "-", "-", "ok"
        try:
            report = synthesis.synthesize(
                f, alphabet, args.start_len, args.max_len, args.rel_tol, args.tol, args.verify_len
            )
            synth_n, err = str(report.n), fmt(report.max_abs_error)
            report.check(args.verify_tol)
        except SynthesisError as exc:
            status = type(exc).__name__
        if not bound_ok and status == "ok":
            status = "RankBound"
        passed += status == "ok"
        print(
            f"{seed:4d}  {st.rank:4d}  {'ok' if bound_ok else 'FAIL':5s}  {synth_n:>7s}  "
            f"{err:>13s}  {status}",
            file=out,
        )
    print(f"passed {passed}/{args.seeds}", file=out)
    return EXIT_OK if passed == args.seeds else EXIT_SYNTH


def cmd_dyck_demo(args, out):
    if not 0 <= args.max_len <= 10:
        raise InputError("--max-len must be between 0 and 10")
    alphabet = _alphabet(args.alphabet)
    f = hankel.dyck_one()
    lengths = list(range(args.max_len % 2, args.max_len + 1, 2))
    print("L  word_rank  nested_rank", file=out)
    for length, word_rank in hankel.word_hankel_rank_growth(f, alphabet, lengths, args.tol):
        words = enumerate_well_matched(alphabet, length)
        nested = hankel.block_rank(hankel.build_block(f, words, words), args.tol)
        print(f"{length:<2d} {word_rank:9d}  {nested:11d}", file=out)
    return EXIT_OK


def cmd_enum(args, out):
    if not 0 <= args.max_len <= 12:
        raise InputError("--max-len must be between 0 and 12")
    alphabet = _alphabet(args.alphabet)
    words = enumerate_well_matched(alphabet, args.max_len)
    counts = [0] * (args.max_len + 1)
    for w in words:
        counts[len(w)] += 1
        print(format_word(w), file=out)
    print("counts: " + ",".join(str(c) for c in counts), file=out)
    return EXIT_OK


def _add_source(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--function", help="paren_count, dyck_one, constant0 or constant(<c>)")
    src.add_argument("--automaton", help="automaton JSON file whose behavior is the oracle")


def _add_truncation(p):
    p.add_argument("--alphabet", help="comma-separated base letters (default: a)")
    p.add_argument("--start-len", type=int, default=2)
    p.add_argument("--max-len", type=int, default=8)
    p.add_argument("--tol", type=float, default=DEFAULT_RANK_TOL, help="relative rank tolerance")


def _add_synth_flags(p):
    p.add_argument("--rel-tol", type=float, default=1e-8, help="least-squares residual tolerance")
    p.add_argument("--verify-len", type=int, default=8)
    p.add_argument("--verify-tol", type=float, default=1e-6)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nwhankel", description="Weighted visibly pushdown automata and nested Hankel matrices."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate an automaton on one tagged word")
    p.add_argument("--automaton", required=True)
    p.add_argument("--word", required=True, help='e.g. "<a a>" or "eps"')
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("rank", help="stabilized nested Hankel rank")
    _add_source(p)
    _add_truncation(p)
    p.add_argument("--dump", help="write the final block as CSV")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("synth", help="synthesize an automaton from a Hankel matrix")
    _add_source(p)
    _add_truncation(p)
    _add_synth_flags(p)
    p.add_argument("--out", help="where to write the automaton JSON")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("roundtrip", help="rank bound and re-synthesis on random automata")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seeds", type=int, required=True)
    p.add_argument("--gamma", type=int, default=1)
    _add_truncation(p)
    p.set_defaults(tol=1e-7)
    _add_synth_flags(p)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("dyck-demo", help="word vs nested Hankel rank of the Dyck language")
    p.add_argument("--max-len", type=int, default=6)
    p.add_argument("--alphabet")
    p.add_argument("--tol", type=float, default=DEFAULT_RANK_TOL)
    p.set_defaults(func=cmd_dyck_demo)

    p = sub.add_parser("enum", help="list well-matched words in shortlex order")
    p.add_argument("--alphabet", default="a")
    p.add_argument("--max-len", type=int, required=True)
    p.set_defaults(func=cmd_enum)
    return parser


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except SynthesisError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SYNTH
    except (InputError, NestedHankelError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
