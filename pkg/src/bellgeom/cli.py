"""Command line front end.

Exit codes: 0 success, 1 input error, 2 non-physical state, 3 failed check.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from bellgeom import geometry, measures, verify
from bellgeom.qmat import NotPSDError, hermitian_eig
from bellgeom.states import FilterError, LocalFilter, is_standard_form

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NONPHYSICAL = 2
EXIT_CHECK = 3

BASIS = "product-00-01-10-11"
FILE_TOL = 1e-8
CSV_COLUMNS = (
    "r_x", "r_y", "r_z", "classification",
    "concurrence", "negativity", "euclid_distance", "hs_distance",
)


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which is reserved for non-physical input
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def write_matrix_file(path, m) -> None:
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {m.shape}")
    doc = {
        "basis": BASIS,
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def read_matrix_file(path) -> np.ndarray:
    """Read a MatrixFile and check it is Hermitian with unit trace (to 1e-8)."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be an object")
    if doc.get("basis") != BASIS:
        raise InputError(f"{path}: basis must be {BASIS!r}, got {doc.get('basis')!r}")
    rows = doc.get("matrix")
    if not isinstance(rows, list) or len(rows) != 4:
        raise InputError(f"{path}: 'matrix' must hold 4 rows")
    m = np.empty((4, 4), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != 4:
            raise InputError(f"{path}: row {i} must hold 4 entries")
        for j, entry in enumerate(row):
            ok = (
                isinstance(entry, list)
                and len(entry) == 2
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry)
            )
            if not ok or not all(math.isfinite(v) for v in entry):
                raise InputError(f"{path}: entry [{i}][{j}] = {json.dumps(entry)} is not a finite [re, im] pair")
            m[i, j] = complex(entry[0], entry[1])
    defect = float(np.max(np.abs(m - m.conj().T)))
    if defect > FILE_TOL:
        raise InputError(f"{path}: matrix is not Hermitian (max |m - m^H| = {defect:.3g})")
    tr = complex(np.trace(m))
    if abs(tr - 1.0) > FILE_TOL:
        raise InputError(f"{path}: trace is {tr.real:.12g}, expected 1")
    return 0.5 * (m + m.conj().T)


def parse_triple(text: str) -> tuple[float, float, float]:
    tokens = text.split(",")
    if len(tokens) != 3:
        raise InputError(f"--r expects three comma-separated numbers, got {len(tokens)} in {text!r}")
    out = []
    for tok in tokens:
        try:
            v = float(tok)
        except ValueError:
            raise InputError(f"--r: cannot parse {tok.strip()!r} as a number") from None
        if not math.isfinite(v):
            raise InputError(f"--r: {tok.strip()!r} is not finite")
        out.append(v)
    return tuple(out)


def parse_complex_2x2(text: str, flag: str) -> np.ndarray:
    tokens = text.split(",")
    if len(tokens) != 4:
        raise InputError(f"{flag} expects four comma-separated entries (row-major), got {len(tokens)}")
    vals = []
    for tok in tokens:
        try:
            v = complex(tok.strip().replace(" ", ""))
        except ValueError:
            raise InputError(f"{flag}: cannot parse {tok.strip()!r} as a complex number") from None
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise InputError(f"{flag}: {tok.strip()!r} is not finite")
        vals.append(v)
    return np.array(vals, dtype=complex).reshape(2, 2)


def _fmt(v: float | None) -> str:
    return "" if v is None else format(v + 0.0, ".12g")


def _is_physical(m) -> bool:
    return hermitian_eig(m).eigenvalues[-1] >= -geometry.BOUNDARY_TOL


def cmd_measure(args) -> int:
    if args.r is not None:
        report = measures.measure(parse_triple(args.r))
        out = {"path": "standard", **report.as_dict()}
        code = EXIT_OK if report.classification.is_physical else EXIT_NONPHYSICAL
        print(json.dumps(out, indent=2))
        return code

    m = read_matrix_file(args.matrix)
    standard, s = is_standard_form(m, tol=FILE_TOL)
    if standard:
        report = measures.measure(s)
        out = {"path": "standard", **report.as_dict()}
        code = EXIT_OK if report.classification.is_physical else EXIT_NONPHYSICAL
    elif not _is_physical(m):
        out = {"path": "general", "classification": "nonphysical", "concurrence": None, "negativity": None}
        code = EXIT_NONPHYSICAL
    else:
        neg = measures.negativity_general(m)
        out = {
            "path": "general",
            "classification": "entangled" if neg > 0.0 else "separable",
            "concurrence": measures.concurrence_general(m),
            "negativity": neg,
        }
        code = EXIT_OK
    print(json.dumps(out, indent=2))
    return code


def cmd_sample(args) -> int:
    if args.n < 1:
        raise InputError("--n must be at least 1")
    pts = geometry.sample_states(args.n, args.seed, args.region)
    try:
        fh = open(args.out, "w", newline="")
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc.strerror}") from exc
    with fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for s in pts:
            rep = measures.measure(s)
            writer.writerow([
                _fmt(s.x), _fmt(s.y), _fmt(s.z), str(rep.classification),
                _fmt(rep.concurrence), _fmt(rep.negativity),
                _fmt(rep.euclidean_distance), _fmt(rep.hs_distance),
            ])
    return EXIT_OK


def _sign_flipped_distance(s) -> float:
    # negative control for the verify suite: v.r + 1 instead of v.r - 1
    c = geometry.classify(s)
    if c.corner is None:
        return 0.0
    return (sum(v * r for v, r in zip(c.corner, s)) + 1.0) / geometry.SQRT3


def cmd_verify(args) -> int:
    if args.n < 1:
        raise InputError("--n must be at least 1")
    distance = _sign_flipped_distance if args.inject_fault else geometry.distance_to_separable
    checks = verify.run_checks(args.n, args.seed, distance=distance)
    for c in checks:
        print(c.line())
    failed = [c.name for c in checks if not c.passed]
    if failed:
        print("FAILED: " + ", ".join(failed))
        return EXIT_CHECK
    print(f"all {len(checks)} checks passed (n={args.n}, seed={args.seed})")
    return EXIT_OK


def cmd_filter(args) -> int:
    m = read_matrix_file(args.matrix)
    a = parse_complex_2x2(args.a, "--a")
    b = parse_complex_2x2(args.b, "--b")
    try:
        f = LocalFilter(a, b)
    except FilterError:
        raise InputError("filter not invertible") from None
    if not _is_physical(m):
        print("state is not positive semidefinite", file=sys.stderr)
        return EXIT_NONPHYSICAL
    try:
        law = measures.filter_concurrence_law(m, f)
    except FilterError as exc:
        raise InputError(str(exc)) from None
    print(f"C              = {measures.concurrence_general(m):.15g}")
    print(f"C'_predicted   = {law.predicted:.15g}" + ("  (exceeds 1)" if law.exceeds_one else ""))
    print(f"C'_actual      = {law.actual:.15g}")
    print(f"|delta|        = {law.deviation:.3e}")
    return EXIT_OK if law.deviation <= measures.FILTER_LAW_TOL else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bellgeom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="entanglement measures of one state")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--r", metavar="X,Y,Z", help="standard-form point, e.g. --r=1,-1,1")
    src.add_argument("--matrix", metavar="PATH", help="JSON matrix file")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("sample", help="write measures of seeded samples as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--region", choices=[r.value for r in geometry.Region], default="cube")
    p.add_argument("--out", required=True, metavar="PATH")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", help="check the measure/distance identities on samples")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("filter", help="compare the filtering law for concurrence with direct evaluation")
    p.add_argument("--matrix", required=True, metavar="PATH")
    p.add_argument("--a", required=True, metavar="A00,A01,A10,A11")
    p.add_argument("--b", required=True, metavar="B00,B01,B10,B11")
    p.set_defaults(func=cmd_filter)
    return parser


def _glue_values(argv: list[str]) -> list[str]:
    # "--r -1,0,0" would otherwise be read as an unknown option
    out = []
    it = iter(argv)
    for tok in it:
        if tok in ("--r", "--a", "--b"):
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            elif nxt.startswith("-") and nxt[1:2] in set("0123456789."):
                out.append(f"{tok}={nxt}")
            else:
                out.extend([tok, nxt])
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_values(argv))
    try:
        return args.func(args)
    except InputError as exc:
        print(f"bellgeom {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotPSDError as exc:
        print(f"bellgeom {args.command}: {exc}", file=sys.stderr)
        return EXIT_NONPHYSICAL


if __name__ == "__main__":
    sys.exit(main())
