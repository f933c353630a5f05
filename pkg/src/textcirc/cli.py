"""Command-line front end: ``textcirc {compile,translate,equiv,sample,roundtrip}``.

Exit status is 0 on success, 1 when a check fails (circuits differ, a round
trip breaks) and 2 for usage, format or validation errors.
"""

from __future__ import annotations

import argparse
import difflib
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .circuit import canonicalize, compile_text, equal_up_to_dictionary, map_labels
from .errors import FormatError, ParamsInvalid, TextCircError, ValidationFailure
from .formats import (
    circuit_document,
    parse_hybrid_text,
    parse_lexicon,
    serialize_circuit,
    serialize_hybrid_text,
)
from .generate import Policy, SampleParams, circuit_to_text, roundtrip, sample_circuit
from .grammar import Language
from .lexicon import default_lexicon
from .render import render_ascii, render_dot, render_figure
from .xlang import translate_text

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None


def _located(path: str, exc: FormatError) -> FormatError:
    err = FormatError(f"{path}:{exc.line or 1}:{exc.col or 1}: {exc.message}")
    err.line, err.col = exc.line, exc.col
    return err


def _load_text(path: str, lang: str | None):
    try:
        return parse_hybrid_text(_read(path), lang)
    except FormatError as exc:
        raise _located(path, exc) from None


def _load_lexicon(path: str | None):
    if path is None:
        return default_lexicon()
    try:
        return parse_lexicon(_read(path))
    except FormatError as exc:
        raise _located(path, exc) from None


def _emit(args, payload: dict, human: str) -> None:
    if args.format == "structured":
        sys.stdout.write(json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n")
    else:
        sys.stdout.write(human)


def _render(circuit, how: str) -> str:
    if how == "dot":
        return render_dot(circuit)
    if how == "ascii":
        return render_ascii(circuit)
    return ""


def cmd_compile(args) -> int:
    text = _load_text(args.text, args.lang)
    circuit = compile_text(text)
    if args.out:
        Path(args.out).write_text(serialize_circuit(circuit), encoding="utf-8")
    if args.figure:
        render_figure(circuit, args.figure, title=Path(args.text).name)
    canon = canonicalize(circuit).decode("utf-8")
    _emit(args, {"canonical": json.loads(canon), "rendering": _render(circuit, args.render)},
          _render(circuit, args.render) or canon + "\n")
    return EXIT_OK


def cmd_translate(args) -> int:
    source = {"e2u": "en", "u2e": "ur"}.get(args.dir)
    text = _load_text(args.text, source)
    lexicon = _load_lexicon(args.lexicon)
    out = translate_text(text, lexicon, args.dir or text.language)
    rendered = serialize_hybrid_text(out)
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8")
    _emit(args, {"language": out.language.value, "text": rendered}, rendered)
    return EXIT_OK


def _pretty(canon: bytes) -> list[str]:
    return json.dumps(json.loads(canon), ensure_ascii=False, indent=1, sort_keys=True).splitlines()


def cmd_equiv(args) -> int:
    lexicon = _load_lexicon(args.lexicon)
    en = compile_text(_load_text(args.english, "en"))
    ur = compile_text(_load_text(args.urdu, "ur"))
    equal = equal_up_to_dictionary(en, ur, lexicon)
    mapped = canonicalize(map_labels(en, lexicon, Language.ENGLISH))
    target = canonicalize(ur)
    diff = [] if equal else list(difflib.unified_diff(
        _pretty(mapped), _pretty(target), f"{args.english} (dictionary-mapped)", args.urdu, lineterm=""))
    human = "equal up to dictionary\n" if equal else "circuits differ\n" + "\n".join(diff) + "\n"
    _emit(args, {"equal": equal, "diff": diff}, human)
    return EXIT_OK if equal else EXIT_FAIL


def _params(args) -> SampleParams:
    return SampleParams(args.wires, args.elements, args.depth)


def _policy(args) -> Policy:
    return Policy(args.pronoun_threshold, args.fuse)


def cmd_sample(args) -> int:
    lexicon = _load_lexicon(args.lexicon)
    circuit = sample_circuit(args.seed, _params(args), lexicon)
    lang = Language.parse(args.lang)
    if lang is not Language.ENGLISH:
        circuit = map_labels(circuit, lexicon, Language.ENGLISH)
    text = circuit_to_text(circuit, lang, _policy(args), lexicon)
    if args.figure:
        render_figure(circuit, args.figure, title=f"seed {args.seed}")
    rendered_text = serialize_hybrid_text(text)
    rendered_circuit = serialize_circuit(circuit)
    _emit(args, {"text": rendered_text, "circuit": circuit_document(circuit)},
          rendered_text + "\n" + rendered_circuit)
    return EXIT_OK


def _trial(job: tuple) -> tuple[int, bool, str | None]:
    seed, params, policy, lang = job
    circuit = sample_circuit(seed, params)
    report = roundtrip(circuit, lang, policy)
    detail = None
    if not report.ok:
        detail = report.error or "canonical forms differ"
    return seed, report.ok, detail


def cmd_roundtrip(args) -> int:
    params, policy = _params(args), _policy(args)
    params.check()
    jobs = [(args.seed + i, params, policy, args.lang) for i in range(args.count)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_trial, jobs, chunksize=32))
    else:
        results = [_trial(j) for j in jobs]
    results.sort(key=lambda r: r[0])
    failures = [r for r in results if not r[1]]
    summary = {"ok": len(results) - len(failures), "fail": len(failures),
               "first_counterexample": None}
    human = f"ok {summary['ok']} fail {summary['fail']}\n"
    if failures:
        seed, _, detail = failures[0]
        summary["first_counterexample"] = {"seed": seed, "detail": detail}
        human += f"first counterexample: seed {seed}: {detail}\n"
    _emit(args, summary, human)
    return EXIT_FAIL if failures else EXIT_OK


def _add_policy(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pronoun-threshold", type=int, default=-1,
                   help="pronominalise repeated mentions at most this many sentences apart (-1: never)")
    p.add_argument("--fuse", action="store_true", help="fuse adjacent sentences into relative clauses")


def _add_sampling(p: argparse.ArgumentParser, wires: int, elements: int, depth: int) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--wires", type=int, default=wires, help="maximum number of noun wires")
    p.add_argument("--elements", type=int, default=elements, help="maximum number of top-level elements")
    p.add_argument("--depth", type=int, default=depth, help="maximum box nesting depth")
    p.add_argument("--lang", choices=["en", "ur"], default="en")
    _add_policy(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="textcirc", description=__doc__.splitlines()[0])
    parser.add_argument("--format", choices=["text", "structured"], default="text",
                        help="'structured' prints JSON for machines")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile a hybrid text to its circuit")
    p.add_argument("text")
    p.add_argument("--lang", choices=["en", "ur"])
    p.add_argument("--out", help="write the circuit (JSON) here")
    p.add_argument("--render", choices=["dot", "ascii", "none"], default="none")
    p.add_argument("--figure", help="save a matplotlib drawing of the circuit (png, pdf, svg)")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("translate", help="translate a hybrid text between English and Urdu")
    p.add_argument("text")
    p.add_argument("--lexicon")
    p.add_argument("--dir", choices=["e2u", "u2e"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("equiv", help="check an English and an Urdu text give the same circuit")
    p.add_argument("english")
    p.add_argument("urdu")
    p.add_argument("--lexicon")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("sample", help="sample a circuit and write a text for it")
    _add_sampling(p, 3, 4, 1)
    p.add_argument("--lexicon")
    p.add_argument("--figure", help="save a matplotlib drawing of the sampled circuit")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("roundtrip", help="sample, realise and recompile many circuits")
    _add_sampling(p, 5, 10, 2)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_roundtrip)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, FormatError, ValidationFailure, ParamsInvalid, ValueError) as exc:
        print(f"textcirc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TextCircError as exc:
        print(f"textcirc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
