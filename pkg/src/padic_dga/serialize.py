"""DGA interchange format: canonical JSON, plus a free-presentation
shorthand.

Lines starting with '#' before the JSON body are ignored; cmd_perturb uses
them for its provenance block.  Serialization is canonical (sorted keys,
fixed array ordering) so equal presentations produce identical bytes.
"""

from __future__ import annotations

import json
from typing import Dict, List, Tuple

import numpy as np

from .dga import (
    DegreeWindow,
    DgaPresentation,
    GeneratorSpec,
    build_free_cdga,
    check_dga_axioms,
)
from .errors import AxiomError, ParseError
from .linalg import RingMatrix


def serialize_dga(A: DgaPresentation, provenance: List[str] = ()) -> str:
    doc = {
        "prime": A.prime,
        "precision": A.precision,
        "window": {"min": A.window.min_degree, "max": A.window.max_degree},
        "basis": [
            {"degree": n, "labels": list(A.labels(n))}
            for n in sorted(A.basis)
        ],
        "differential": [
            {"degree": n, "matrix": A.diff[n].data.tolist()}
            for n in sorted(A.diff)
            if A.diff[n].rows and A.diff[n].cols and np.any(A.diff[n].data)
        ],
        "product": [
            {"deg_a": k[0], "idx_a": k[1], "deg_b": k[2], "idx_b": k[3],
             "result": [{"idx": i, "coeff": c} for i, c in entries]}
            for k, entries in sorted(A.product.items())
            if entries
        ],
        "unit": {"degree": 0, "idx": A.unit_index},
        "clipped": sorted(list(k) for k in A.clipped),
    }
    body = json.dumps(doc, indent=1, sort_keys=True)
    header = "".join(f"# {line}\n" for line in provenance)
    return header + body + "\n"


def parse_dga(text: str, expected_p: int = None, expected_N: int = None,
              validate: bool = True) -> DgaPresentation:
    """Parse and validate; a presentation failing the axiom sweep is
    rejected with the offending degree."""
    body = "\n".join(
        line for line in text.splitlines() if not line.lstrip().startswith("#"))
    try:
        doc = json.loads(body)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed dga text: {exc}") from exc
    try:
        p = int(doc["prime"])
        N = int(doc["precision"])
        window = DegreeWindow(int(doc["window"]["min"]), int(doc["window"]["max"]))
        basis = {int(b["degree"]): tuple(b["labels"]) for b in doc["basis"]}
        unit_index = int(doc["unit"]["idx"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"missing field: {exc}") from exc
    if expected_p is not None and p != expected_p:
        raise ParseError(f"expected prime {expected_p}, file has {p}")
    if expected_N is not None and N != expected_N:
        raise ParseError(f"expected precision {expected_N}, file has {N}")

    dims = {n: len(ls) for n, ls in basis.items()}
    diff: Dict[int, RingMatrix] = {}
    for entry in doc.get("differential", ()):
        n = int(entry["degree"])
        M = np.array(entry["matrix"], dtype=np.int64)
        if M.shape != (dims.get(n - 1, 0), dims.get(n, 0)):
            raise ParseError(
                f"differential at degree {n} has shape {M.shape}, "
                f"expected ({dims.get(n - 1, 0)}, {dims.get(n, 0)})")
        diff[n] = RingMatrix(M, p, N)

    product: Dict[Tuple[int, int, int, int], Tuple[Tuple[int, int], ...]] = {}
    for entry in doc.get("product", ()):
        key = (int(entry["deg_a"]), int(entry["idx_a"]),
               int(entry["deg_b"]), int(entry["idx_b"]))
        product[key] = tuple(
            (int(t["idx"]), int(t["coeff"])) for t in entry["result"])

    clipped = {tuple(k) for k in doc.get("clipped", ())}
    try:
        A = DgaPresentation(p, N, window, basis, diff, product,
                            unit_index=unit_index, clipped=clipped)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc

    if validate:
        report = check_dga_axioms(A)
        if not report.ok:
            kind, msg = report.violations[0]
            raise AxiomError(f"{kind}: {msg}")
    return A


def parse_free_presentation(text: str, p: int, N: int,
                            window: DegreeWindow) -> DgaPresentation:
    """Free-presentation shorthand: generators + differential expressions
    like "3*e" or "e + 2*x^2"."""
    body = "\n".join(
        line for line in text.splitlines() if not line.lstrip().startswith("#"))
    try:
        doc = json.loads(body)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed shorthand: {exc}") from exc
    diffs = {d["name"]: d["expression"] for d in doc.get("differentials", ())}
    gens = []
    try:
        for g in doc["generators"]:
            gens.append(GeneratorSpec(
                g["name"], int(g["degree"]), bool(g.get("invertible", False)),
                differential=diffs.get(g["name"])))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad generator entry: {exc}") from exc
    return build_free_cdga(gens, p, N, window)
