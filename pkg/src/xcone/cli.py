"""``xcone`` command-line front end."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .certify import (
    CertificateError,
    NoCertificateError,
    decompose_constructive,
    decompose_dictionary,
    find_certificate,
    verify_decomposition,
    x_to_json,
)
from .classify import GENUINELY_ENTANGLED, NOT_A_STATE, lattice_profile, partition_class
from .criteria import PRIMAL_CONES, Cone, in_cone, necessary_check_general, state_in_cone
from .extremals import sample_with_recipes
from .suites import SUITES, run_suite
from .xcore import DEFAULT_TOL, InvalidInputError, XMatrix, as_hermitian8, off_x_norm, x_part

EXIT_OK, EXIT_NEGATIVE, EXIT_INVALID = 0, 1, 2

DEFAULT_TRIALS = {"duality": 100_000, "ppt": 10_000, "lattice": 10_000, "roundtrip": 1_000}


class Document:
    """One parsed input: an X-matrix, plus the full matrix when given in that form."""

    def __init__(self, label: str, x: XMatrix, full=None, x_shaped: bool = True):
        self.label = label
        self.x = x
        self.full = full
        self.x_shaped = x_shaped


def _complex(v, where: str) -> complex:
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise InvalidInputError(f"{where}: complex entries must be [re, im] pairs")
    re, im = (float(t) for t in v)
    return complex(re, im)


def parse_document(doc, index: int, tol: float) -> Document:
    if not isinstance(doc, dict):
        raise InvalidInputError(f"document {index + 1}: expected a JSON object")
    label = str(doc.get("label", f"#{index + 1}"))
    forms = [k for k in ("x", "matrix") if k in doc]
    if len(forms) != 1:
        raise InvalidInputError(f"{label}: give exactly one of 'x' or 'matrix'")
    try:
        if forms[0] == "x":
            body = doc["x"]
            if not isinstance(body, dict):
                raise InvalidInputError(f"{label}: 'x' must be an object with a, b, z")
            z = [_complex(v, label) for v in body["z"]]
            return Document(label, XMatrix(tuple(body["a"]), tuple(body["b"]), tuple(z)))
        rows = doc["matrix"]
        if not (isinstance(rows, list) and len(rows) == 8 and all(isinstance(r, list) and len(r) == 8 for r in rows)):
            raise InvalidInputError(f"{label}: 'matrix' must be 8 rows of 8 [re, im] pairs")
        h = as_hermitian8([[_complex(v, label) for v in r] for r in rows], tol)
        shaped = off_x_norm(h) <= tol * (1.0 + float(abs(h).max()))
        return Document(label, x_part(h), h, shaped)
    except KeyError as e:
        raise InvalidInputError(f"{label}: missing field {e.args[0]!r}") from None
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"{label}: {e}") from None


def _json_values(text: str, source: str) -> list:
    text = text.strip()
    if not text:
        return []
    try:
        value = json.loads(text)
        return value if isinstance(value, list) else [value]
    except json.JSONDecodeError:
        pass
    out = []
    for n, line in enumerate(text.splitlines(), 1):
        if line.strip():
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as e:
                raise InvalidInputError(f"{source}:{n}: malformed JSON ({e.msg})") from None
    return out


def read_documents(paths: list[str], tol: float) -> list[Document]:
    values = []
    for path in paths or ["-"]:
        if path == "-":
            values += _json_values(sys.stdin.read(), "<stdin>")
        else:
            try:
                with open(path, encoding="utf-8") as fh:
                    values += _json_values(fh.read(), path)
            except OSError as e:
                raise InvalidInputError(f"cannot read {path}: {e.strerror}") from None
    if not values:
        raise InvalidInputError("no input documents")
    return [parse_document(v, i, tol) for i, v in enumerate(values)]


def resolve_tol(flag: float | None) -> float:
    if flag is not None:
        tol = flag
    elif os.environ.get("XCONE_TOL"):
        try:
            tol = float(os.environ["XCONE_TOL"])
        except ValueError:
            raise InvalidInputError(f"XCONE_TOL is not a number: {os.environ['XCONE_TOL']!r}") from None
    else:
        tol = DEFAULT_TOL
    if not (math.isfinite(tol) and tol >= 0):
        raise InvalidInputError(f"tolerance must be a nonnegative finite number, got {tol}")
    return tol


def _verdict(doc: Document, cone: Cone, tol: float):
    if doc.x_shaped:
        return in_cone(doc.x, cone, tol)
    return necessary_check_general(doc.full, cone, tol)


def classify_report(doc: Document, tol: float, certify: bool = False) -> dict:
    profile = lattice_profile(doc.x, tol)
    label = partition_class(profile)
    report = {
        "label": doc.label,
        "x_shaped": doc.x_shaped,
        "class": label.to_dict(),
        "conclusive": doc.x_shaped or label.name in (NOT_A_STATE, GENUINELY_ENTANGLED),
        "profile": profile.to_dict(),
        "cones": [_verdict(doc, c, tol).to_dict() for c in PRIMAL_CONES],
    }
    if certify and profile.psd:
        report["certificates"] = {
            c.value: find_certificate(doc.x, c, tol).to_dict()
            for c in PRIMAL_CONES if not profile[c]
        }
    return report


def witness_report(doc: Document, cone: Cone, tol: float) -> tuple[dict, int]:
    base = {"label": doc.label, "cone": cone.value}
    if in_cone(doc.x, cone, tol).member:
        return {**base, "status": "is a member", "certificate": None}, EXIT_NEGATIVE
    cert = find_certificate(doc.x, cone, tol)
    return {**base, "status": "verified", "certificate": cert.to_dict()}, EXIT_OK


def decompose_report(doc: Document, cone: Cone, method: str, tol: float) -> tuple[dict, int]:
    base = {"label": doc.label, "cone": cone.value, "method": method}
    if cone.is_dual:
        return {**base, "status": "inapplicable: decomposition covers primal cones"}, EXIT_NEGATIVE
    if not doc.x_shaped:
        return {**base, "status": "inapplicable: input is not X-shaped"}, EXIT_NEGATIVE
    if not state_in_cone(doc.x, cone, tol).member:
        return {**base, "status": "not a member"}, EXIT_NEGATIVE
    if method == "constructive":
        try:
            d = decompose_constructive(doc.x, cone, tol)
        except InvalidInputError as e:
            return {**base, "status": f"inapplicable: {e}"}, EXIT_NEGATIVE
    else:
        d = decompose_dictionary(doc.x, cone, tol=tol)
    ok = verify_decomposition(d, doc.x, tol)
    status = "verified" if ok else "unverified: residual above tolerance"
    return {**base, "status": status, "decomposition": d.to_dict()}, EXIT_OK if ok else EXIT_NEGATIVE


def dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, allow_nan=False)


def _table(reports: list[dict]) -> str:
    head = ["label", "class"] + [c.value for c in PRIMAL_CONES]
    rows = [head]
    for r in reports:
        m = r["profile"]["membership"]
        name = r["class"]["name"] + ("" if r["conclusive"] else " (inconclusive)")
        rows.append([r["label"], name] + ["y" if m[c.value] else "." for c in PRIMAL_CONES])
    widths = [max(len(row[k]) for row in rows) for k in range(len(head))]
    return "\n".join("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in rows)


def _emit(lines: list[str], json_out: str | None, table: str | None = None) -> None:
    if json_out:
        with open(json_out, "w", encoding="utf-8") as fh:
            fh.write("".join(line + "\n" for line in lines))
    if table is not None and sys.stdout.isatty():
        print(table)
    elif not json_out:
        sys.stdout.write("".join(line + "\n" for line in lines))


def cmd_classify(args, tol: float) -> int:
    docs = read_documents(args.inputs, tol)
    reports = [classify_report(d, tol, args.certify) for d in docs]
    _emit([dumps(r) for r in reports], args.json_out, _table(reports))
    return EXIT_OK


def cmd_witness(args, tol: float) -> int:
    cone = Cone.parse(args.cone)
    out = [witness_report(d, cone, tol) for d in read_documents(args.inputs, tol)]
    _emit([dumps(r) for r, _ in out], args.json_out)
    return max(code for _, code in out)


def cmd_decompose(args, tol: float) -> int:
    cone = Cone.parse(args.cone)
    out = [decompose_report(d, cone, args.method, tol) for d in read_documents(args.inputs, tol)]
    _emit([dumps(r) for r, _ in out], args.json_out)
    return max(code for _, code in out)


def cmd_sample(args, tol: float) -> int:
    cone = Cone.parse(args.cone)
    lines = []
    for n, (x, terms) in enumerate(sample_with_recipes(cone, args.count, args.seed)):
        recipe = [{"weight": t.weight, "family": str(t.family), "ratios": list(t.params.ratios),
                   "phases": list(t.params.phases)} for t in terms]
        lines.append(dumps({"label": f"{cone.value}#{n + 1}", "cone": cone.value,
                            "x": x_to_json(x), "recipe": recipe}))
    _emit(lines, args.json_out)
    return EXIT_OK


def cmd_verify(args, tol: float) -> int:
    trials = args.trials if args.trials is not None else DEFAULT_TRIALS[args.suite]
    result = run_suite(args.suite, trials, args.seed, tol)
    _emit([dumps(result.to_dict())], args.json_out)
    return EXIT_OK if result.passed else EXIT_NEGATIVE


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="xcone", description="Cone membership, witnesses and class labels for three-qubit X-shaped states.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="tolerance (default: $XCONE_TOL or 1e-9)")
    common.add_argument("--json-out", metavar="PATH", help="write NDJSON here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common], help="lattice profile and class label")
    c.add_argument("inputs", nargs="*", help="JSON/NDJSON files ('-' or none for stdin)")
    c.add_argument("--certify", action="store_true", help="attach a witness for every failed cone")
    c.set_defaults(func=cmd_classify)

    w = sub.add_parser("witness", parents=[common], help="separating certificate for a non-member")
    w.add_argument("inputs", nargs="*")
    w.add_argument("--cone", required=True)
    w.set_defaults(func=cmd_witness)

    d = sub.add_parser("decompose", parents=[common], help="split a member into extreme rays")
    d.add_argument("inputs", nargs="*")
    d.add_argument("--cone", required=True)
    d.add_argument("--method", choices=("constructive", "dictionary"), default="constructive")
    d.set_defaults(func=cmd_decompose)

    s = sub.add_parser("sample", parents=[common], help="random cone members with their recipes")
    s.add_argument("--cone", required=True)
    s.add_argument("--count", type=_positive_int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_sample)

    v = sub.add_parser("verify", parents=[common], help="run a randomized self-check")
    v.add_argument("--suite", choices=SUITES, required=True)
    v.add_argument("--trials", type=_positive_int, default=None)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INVALID if e.code else EXIT_OK
    try:
        return args.func(args, resolve_tol(args.tol))
    except InvalidInputError as e:
        print(f"xcone: error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (NoCertificateError, CertificateError) as e:
        print(f"xcone: {e}", file=sys.stderr)
        return EXIT_NEGATIVE


if __name__ == "__main__":
    sys.exit(main())
