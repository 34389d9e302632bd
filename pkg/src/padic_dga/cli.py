"""Command-line front end.

Exit codes are a stable contract: 0 success, 2 config/parse error,
3 axiom failure, 4 undefined bracket, 5 synthesis failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

from .dga import DegreeWindow, DgaPresentation, build_test_dga_C, check_dga_axioms
from .errors import (
    AxiomError,
    BracketUndefinedError,
    NormalizeError,
    ParseError,
    PrecisionError,
)
from .homology import homology_group, verify_homology_of_C, FREE
from .massey import gamma_class, p_unit_class, triple_massey, verify_massey_relations_C
from .padics import is_odd_prime, nu_max_for_window
from .rigidity import is_normalized, perturb_dga, pullback_normalize, synthesize_qiso
from .serialize import parse_dga, serialize_dga

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_AXIOM = 3
EXIT_BRACKET = 4
EXIT_SYNTH = 5


@dataclass
class RunConfig:
    prime: int
    precision: int
    window: DegreeWindow
    seed: int = 0
    budget: int = 10
    output: Optional[str] = None
    machine: bool = False
    max_index: Optional[int] = None


def _parse_window(text: str) -> DegreeWindow:
    try:
        lo, hi = text.split(":")
        return DegreeWindow(int(lo), int(hi))
    except (ValueError, TypeError) as exc:
        raise ValueError(f"window must be 'min:max', got {text!r}") from exc


def build_config(args) -> RunConfig:
    if not is_odd_prime(args.prime):
        raise ValueError("prime must be an odd prime")
    window = _parse_window(args.window)
    needed = nu_max_for_window(args.prime, window.min_degree, window.max_degree) + 2
    if args.precision < needed:
        raise ValueError(f"precision must be >= {needed} for this window")
    return RunConfig(args.prime, args.precision, window,
                     seed=args.seed, budget=args.budget, output=args.output,
                     machine=args.machine, max_index=args.max_index)


def _load(cfg: RunConfig, input_spec: str) -> DgaPresentation:
    if input_spec == "builtin:C":
        return build_test_dga_C(cfg.prime, cfg.precision, cfg.window)
    with open(input_spec, "r", encoding="utf-8") as fh:
        return parse_dga(fh.read(), cfg.prime, cfg.precision)


def _emit(cfg: RunConfig, text: str):
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def cmd_verify_paper(cfg: RunConfig) -> int:
    C = build_test_dga_C(cfg.prime, cfg.precision, cfg.window)
    axioms = check_dga_axioms(C)
    homology = verify_homology_of_C(cfg.prime, cfg.precision, cfg.window, C)
    max_index = cfg.max_index
    if max_index is None:
        max_index = max(1, cfg.window.inner_max // (2 * cfg.prime - 2) - 1)
    massey = verify_massey_relations_C(cfg.prime, cfg.precision, cfg.window,
                                       max_index, C)
    ok = axioms.ok and homology.passed and massey.passed
    if cfg.machine:
        _emit(cfg, json.dumps({
            "axioms_ok": axioms.ok,
            "homology": homology.machine(),
            "massey": massey.machine(),
            "passed": ok,
        }, indent=1, sort_keys=True))
    else:
        parts = [
            f"dga axioms: {'pass' if axioms.ok else axioms.render()}",
            "homology table:", homology.render(),
            f"massey relations (|i|,|j| <= {max_index}):", massey.render(),
            f"verdict: {'PASS' if ok else 'FAIL'}",
        ]
        _emit(cfg, "\n".join(parts))
    return EXIT_OK if ok else 1


def cmd_homology(cfg: RunConfig, input_spec: str) -> int:
    A = _load(cfg, input_spec)
    rows = []
    for n in A.window.inner():
        G = homology_group(A, n)
        rows.append((n, G.describe()))
    if cfg.machine:
        _emit(cfg, json.dumps(
            {"table": [{"degree": n, "group": g} for n, g in rows]},
            indent=1, sort_keys=True))
    else:
        _emit(cfg, "\n".join(f"{n:>4} | {g}" for n, g in rows))
    return EXIT_OK


def cmd_massey(cfg: RunConfig, input_spec: str, i: int, j: int) -> int:
    if i == 0 or j == 0 or i + j == 0:
        raise ValueError("i, j and i+j must be nonzero")
    A = _load(cfg, input_spec)
    groups: dict = {}
    gi = gamma_class(A, cfg.prime, i, groups)
    gj = gamma_class(A, cfg.prime, j, groups)
    beta = p_unit_class(A, groups)
    res = triple_massey(A, gi, beta, gj, groups=groups)
    expected = gamma_class(A, cfg.prime, i + j, groups)
    ok = res.representative == expected and res.indeterminacy_trivial
    if cfg.machine:
        _emit(cfg, json.dumps({
            "i": i, "j": j,
            "representative": list(res.representative.coordinates),
            "expected": list(expected.coordinates),
            "indeterminacy_generators": len(res.indeterminacy_generators),
            "witness_u": list(res.witnesses[0].coords),
            "witness_v": list(res.witnesses[1].coords),
            "matches_gamma": ok,
        }, indent=1, sort_keys=True))
    else:
        lines = [
            f"<gamma_{i}, p, gamma_{j}> representative: "
            f"{res.representative.coordinates} in degree {res.degree}",
            f"expected gamma_{i + j}: {expected.coordinates}",
            f"indeterminacy: {'0' if res.indeterminacy_trivial else 'nontrivial'}",
            f"witnesses: u = {res.witnesses[0].coords} "
            f"(degree {res.witnesses[0].degree}), v = {res.witnesses[1].coords} "
            f"(degree {res.witnesses[1].degree})",
            f"verdict: {'OK' if ok else 'FAIL'}",
        ]
        _emit(cfg, "\n".join(lines))
    return EXIT_OK if ok else 1


def cmd_synthesize(cfg: RunConfig, input_spec: str) -> int:
    A = _load(cfg, input_spec)
    log_prefix = []
    if not is_normalized(A):
        A, cert = pullback_normalize(A, cell_budget=cfg.budget or 64)
        log_prefix.append("input not normalized; pullback_normalize applied "
                          "(positive part truncated)")
        if not cert.passed:
            _emit(cfg, cert.render())
            return EXIT_SYNTH
    rep = synthesize_qiso(A)
    if cfg.machine:
        _emit(cfg, json.dumps(rep.machine(), indent=1, sort_keys=True))
    else:
        _emit(cfg, "\n".join(log_prefix + [rep.render()]))
    return EXIT_OK if rep.success else EXIT_SYNTH


def cmd_perturb(cfg: RunConfig) -> int:
    res = perturb_dga(cfg.prime, cfg.precision,
                      cfg.window, cfg.seed, cfg.budget)
    text = serialize_dga(res.presentation, provenance=[
        f"perturb seed={cfg.seed} budget={cfg.budget}", *res.log])
    _emit(cfg, text.rstrip("\n"))
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="padic-dga",
        description="Homology, Massey products, and quasi-isomorphism "
                    "synthesis for truncated p-adic dgas")
    parser.add_argument("--prime", type=int, default=3)
    parser.add_argument("--precision", type=int, default=4)
    parser.add_argument("--window", type=str, default="-18:16",
                        help="degree window 'min:max' (use --window=-18:16)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--budget", type=int, default=10)
    parser.add_argument("--input", type=str, default="builtin:C")
    parser.add_argument("--output", type=str, default=None)
    parser.add_argument("--machine", action="store_true")
    parser.add_argument("--max-index", type=int, default=None)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify-paper")
    sub.add_parser("homology")
    mp = sub.add_parser("massey")
    mp.add_argument("i", type=int)
    mp.add_argument("j", type=int)
    sub.add_parser("synthesize")
    sub.add_parser("perturb")

    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "verify-paper":
            return cmd_verify_paper(cfg)
        if args.command == "homology":
            return cmd_homology(cfg, args.input)
        if args.command == "massey":
            return cmd_massey(cfg, args.input, args.i, args.j)
        if args.command == "synthesize":
            return cmd_synthesize(cfg, args.input)
        if args.command == "perturb":
            return cmd_perturb(cfg)
    except (ParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AxiomError as exc:
        print(f"axiom failure: {exc}", file=sys.stderr)
        return EXIT_AXIOM
    except BracketUndefinedError as exc:
        print(f"undefined bracket: {exc}", file=sys.stderr)
        return EXIT_BRACKET
    except (NormalizeError,) as exc:
        print(f"synthesis failure: {exc}", file=sys.stderr)
        return EXIT_SYNTH
    except (PrecisionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
