"""Command-line interface.

Subcommands:

    synth     factor a unitary (JSON matrix file) into a circuit
    verify    re-simulate a circuit file against a matrix file
    random    emit a Haar-random n-qutrit unitary as a matrix file
    counts    closed-form and measured two-qutrit gate counts
    selftest  algebraic identities, commutation tables, factorization checks

Matrix files are JSON objects {"qutrits": n, "dim": 3^n, "matrix": [[re,
im], ...]} with row-major entries.  Exit codes: 0 success, 2 unreadable
input, 3 non-unitary matrix without --sanitize, 4 verification failure.
Diagnostics go to stderr; machine-readable output goes to stdout or -o.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import (
    LEVELS,
    GeneratorId,
    cinc_matrix,
    commutation_selftest,
    embed_local,
    gcx_matrix,
    generator,
    maximal_abelian_check,
    rotation,
)
from .cartan import factorize, reassemble
from .circuit import (
    Cinc,
    Circuit,
    CircuitParseError,
    Gcx,
    count_gates,
    eval_circuit,
    parse,
    serialize,
)
from .linalg import (
    UNITARY_ATOL,
    csd,
    csd_sigma,
    haar_unitary,
    nearest_unitary,
    unitarity_defect,
    unitary_distance,
)
from .passes import pass_fuse_cinc
from .synth import (
    CITED_CINC_TOTALS,
    GateSet,
    SynthesisOptions,
    cinc_savings,
    expected_count,
    measured_operator_counts,
    operator_count,
    synthesize,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NONUNITARY = 3
EXIT_VERIFY = 4

# A deliberately corrupted generator entry: the 12-level y generator
# transcribed onto levels 0,2 instead.  Elements built from it leak
# outside their claimed block supports, which the commutation self-test
# must catch -- used to demonstrate that the self-test has teeth.
_FAULT = {
    GeneratorId.SY12: np.array(
        [[0, 0, -1j], [0, 0, 0], [1j, 0, 0]], dtype=complex
    )
}


def _err(msg: str) -> None:
    print(f"trisect: {msg}", file=sys.stderr)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(path).write_text(text if text.endswith("\n") else text + "\n")


def _matrix_to_json(m: np.ndarray, n: int) -> str:
    entries = [[float(z.real), float(z.imag)] for z in m.ravel()]
    return json.dumps({"qutrits": n, "dim": m.shape[0], "matrix": entries})


def _matrix_from_json(text: str) -> tuple[np.ndarray, int]:
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError("matrix file must be a JSON object")
    for key in ("qutrits", "dim", "matrix"):
        if key not in data:
            raise ValueError(f"matrix file is missing the {key!r} field")
    n = int(data["qutrits"])
    dim = int(data["dim"])
    if n < 1 or dim != 3**n:
        raise ValueError(f"dim {dim} does not match 3^qutrits for qutrits={n}")
    try:
        arr = np.asarray(data["matrix"], dtype=float)
    except (TypeError, ValueError):
        raise ValueError("matrix entries must be [re, im] number pairs") from None
    if arr.shape != (dim * dim, 2):
        raise ValueError(
            f"expected {dim * dim} [re, im] entries, got shape {arr.shape}"
        )
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(dim, dim), n


def _load_matrix_arg(path: str) -> tuple[np.ndarray, int] | int:
    """Matrix + width, or an exit code after printing the problem."""
    try:
        return _matrix_from_json(_read_text(path))
    except FileNotFoundError:
        _err(f"no such file: {path}")
        return EXIT_PARSE
    except (json.JSONDecodeError, ValueError) as exc:
        _err(f"cannot read matrix file {path}: {exc}")
        return EXIT_PARSE


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_synth(args: argparse.Namespace) -> int:
    loaded = _load_matrix_arg(args.matrix)
    if isinstance(loaded, int):
        return loaded
    m, _ = loaded
    defect = unitarity_defect(m)
    if defect > UNITARY_ATOL:
        if not args.sanitize:
            _err(
                f"matrix is not unitary (defect {defect:.3e}); "
                "re-run with --sanitize to project onto the nearest unitary"
            )
            return EXIT_NONUNITARY
        m = nearest_unitary(m)
        _err(f"sanitized input (unitarity defect was {defect:.3e})")

    options = SynthesisOptions(
        gate_set=GateSet(args.gate_set),
        tolerance=args.tolerance,
        passes=not args.no_passes,
    )
    circuit, report = synthesize(m, options)
    _write_text(args.output, serialize(circuit))
    for line in report.lines():
        print(line, file=sys.stderr)
    if args.report:
        Path(args.report).write_text(json.dumps(report.as_dict(), indent=2) + "\n")
    if report.distance > args.tolerance:
        _err(
            f"verification failed: distance {report.distance:.3e} "
            f"exceeds tolerance {args.tolerance:.1e}"
        )
        return EXIT_VERIFY
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        circuit = parse(_read_text(args.circuit))
    except FileNotFoundError:
        _err(f"no such file: {args.circuit}")
        return EXIT_PARSE
    except CircuitParseError as exc:
        _err(f"cannot parse circuit {args.circuit}: {exc}")
        return EXIT_PARSE
    loaded = _load_matrix_arg(args.matrix)
    if isinstance(loaded, int):
        return loaded
    m, n = loaded
    if n != circuit.n:
        _err(f"circuit is on {circuit.n} qutrits but the matrix is on {n}")
        return EXIT_PARSE
    dist = unitary_distance(eval_circuit(circuit), m)
    ok = dist <= args.tolerance
    counts = count_gates(circuit)
    print(
        f"distance {dist:.3e} (tolerance {args.tolerance:.1e}): "
        f"{'ok' if ok else 'FAIL'}  [{counts.two_qutrit} two-qutrit / "
        f"{counts.total} total gates]"
    )
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_random(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    m = haar_unitary(3**args.qutrits, rng)
    _write_text(args.output, _matrix_to_json(m, args.qutrits))
    return EXIT_OK


def cmd_counts(args: argparse.Namespace) -> int:
    status = EXIT_OK
    print(f"{'n':>2}  {'gcx-only':>10}  {'gcx+cinc':>10}  {'fused pairs':>11}  {'cited':>8}")
    flagged = False
    for n in range(2, args.n_max + 1):
        gcx = expected_count(n, GateSet.GCX_ONLY)
        cinc = expected_count(n, GateSet.GCX_CINC)
        cited = CITED_CINC_TOTALS.get(n)
        mark = ""
        if cited is not None and cited != cinc:
            mark, flagged = " (!)", True
        cited_txt = f"{cited}{mark}" if cited is not None else "-"
        print(f"{n:>2}  {gcx:>10}  {cinc:>10}  {cinc_savings(n):>11}  {cited_txt:>8}")
    if flagged:
        print("(!) previously reported total differs from the closed-form count")

    if args.operators:
        print()
        print(f"{'n':>2}  " + "  ".join(f"{k:>6}" for k in ("x01", "x12", "z12", "d", "dbar")))
        for n in range(2, args.n_max + 1):
            row = [operator_count(k, n, GateSet(args.gate_set)) for k in ("x01", "x12", "z12", "d", "dbar")]
            print(f"{n:>2}  " + "  ".join(f"{v:>6}" for v in row))
            if args.measured and n <= 4:
                meas = measured_operator_counts(n, GateSet(args.gate_set), seed=args.seed)
                print(f"    " + "  ".join(f"{meas[k]:>6}" for k in ("x01", "x12", "z12", "d", "dbar")) + "  (measured)")
                if any(meas[k] != v for k, v in zip(("x01", "x12", "z12", "d", "dbar"), row)):
                    status = EXIT_VERIFY

    if args.measured:
        print()
        rng = np.random.default_rng(args.seed)
        for n in range(2, min(3, args.n_max) + 1):
            m = haar_unitary(3**n, rng)
            for gs in (GateSet.GCX_ONLY, GateSet.GCX_CINC):
                _, rep = synthesize(m, SynthesisOptions(gate_set=gs))
                want = expected_count(n, gs)
                ok = rep.two_qutrit_count == want and rep.distance <= 1e-8
                if not ok:
                    status = EXIT_VERIFY
                print(
                    f"measured n={n} {gs.value:<9}: {rep.two_qutrit_count:>4} two-qutrit "
                    f"(formula {want}), distance {rep.distance:.2e} "
                    f"[{'ok' if ok else 'FAIL'}]"
                )
    return status


def _identity_checks() -> list[tuple[str, float, float]]:
    """(name, worst residual, tolerance) for the closed-form identities."""
    checks: list[tuple[str, float, float]] = []
    thetas = (-5.1, -2.0, -0.7, 0.3, 1.9, 4.4)

    worst = 0.0
    for ij in LEVELS:
        for th in thetas:
            lhs = rotation("x", ij, th)
            rhs = (
                rotation("y", ij, np.pi / 2)
                @ rotation("z", ij, th)
                @ rotation("y", ij, -np.pi / 2)
            )
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    checks.append(("x rotation = y-conjugated z rotation", worst, 1e-12))

    worst = 0.0
    for ij in LEVELS:
        x_t = embed_local(generator(GeneratorId[f"X{ij}"]), 2, 1)
        for m in range(3):
            for mp in range(3):
                if m == mp:
                    continue
                m2 = 3 - m - mp
                lhs = gcx_matrix(2, 0, m, 1, ij) @ gcx_matrix(2, 0, mp, 1, ij)
                rhs = gcx_matrix(2, 0, m2, 1, ij) @ x_t
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    checks.append(("GCX pair collapses to third value + X", worst, 1e-12))

    worst = 0.0
    for m in range(3):
        lhs = cinc_matrix(2, 0, m, 1)
        rhs = gcx_matrix(2, 0, m, 1, "02") @ gcx_matrix(2, 0, m, 1, "01")
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    checks.append(("CINC = X02-GCX after X01-GCX", worst, 1e-12))

    worst = 0.0
    for m in range(3):
        raw = Circuit(2, (Gcx(0, m, 1, "01"), Gcx(0, m, 1, "02")))
        fused = pass_fuse_cinc(raw)
        if len(fused.gates) != 1 or not isinstance(fused.gates[0], Cinc):
            worst = float("inf")
            break
        worst = max(worst, float(np.max(np.abs(eval_circuit(fused) - eval_circuit(raw)))))
    checks.append(("fusion pass rewrites the GCX pair", worst, 1e-12))

    ph = np.exp(1j * np.pi / 3)
    x01 = ph * rotation("x", "01", np.pi) @ rotation("z", "02", -2 * np.pi / 3) @ rotation("z", "01", np.pi / 3)
    checks.append(
        ("X01 from three rotations + phase",
         float(np.max(np.abs(x01 - generator(GeneratorId.X01)))), 1e-12)
    )
    x12 = ph * rotation("x", "12", np.pi) @ rotation("z", "01", 2 * np.pi / 3) @ rotation("z", "12", np.pi / 3)
    checks.append(
        ("X12 from three rotations + phase",
         float(np.max(np.abs(x12 - generator(GeneratorId.X12)))), 1e-12)
    )
    x02 = generator(GeneratorId.X01) @ generator(GeneratorId.X12) @ generator(GeneratorId.X01)
    checks.append(
        ("X02 = X01.X12.X01",
         float(np.max(np.abs(x02 - generator(GeneratorId.X02)))), 1e-12)
    )
    return checks


def _factorization_checks(seed: int) -> list[tuple[str, float, float]]:
    rng = np.random.default_rng(seed)
    checks: list[tuple[str, float, float]] = []
    for n in (2, 3):
        d = 3**n
        u = haar_unitary(d, rng)
        res = csd(u, d // 3, 2 * d // 3)
        left = np.zeros((d, d), dtype=complex)
        left[: d // 3, : d // 3] = res.l1
        left[d // 3 :, d // 3 :] = res.l2
        right = np.zeros((d, d), dtype=complex)
        right[: d // 3, : d // 3] = res.r1
        right[d // 3 :, d // 3 :] = res.r2
        recon = left @ csd_sigma(res.theta, d // 3, 2 * d // 3) @ right.conj().T
        checks.append(
            (f"cosine-sine split reconstructs (d={d})",
             float(np.max(np.abs(recon - u))), 1e-10)
        )

        node = factorize(u)
        checks.append(
            (f"factorization reconstructs (d={d})",
             float(np.max(np.abs(reassemble(node) - u))), 1e-9 * d)
        )
        checks.append(
            (f"factorization stage residuals (d={d})",
             max(node.residuals.values()), 1e-10)
        )
    return checks


def cmd_selftest(args: argparse.Namespace) -> int:
    override = _FAULT if args.inject_fault else None
    if args.inject_fault:
        print("running with an injected generator fault (expect failures)", file=sys.stderr)
    ok = True

    print("closed-form identities:")
    for name, resid, tol in _identity_checks() + _factorization_checks(args.seed):
        good = resid <= tol
        ok &= good
        print(f"  [{'ok' if good else 'FAIL'}] {name:<44s} residual {resid:.3e}")

    for n in args.qutrits:
        print(f"commutation tables (n={n}, {args.trials} trials/relation):")
        report = commutation_selftest(n, seed=args.seed, trials=args.trials, override=override)
        ok &= report.passed
        for line in report.lines():
            print(f"  {line}")

    print("maximal abelian diagonal span (n=2):")
    abelian = maximal_abelian_check(2, seed=args.seed, trials=args.trials)
    ok &= abelian.passed
    for line in abelian.lines():
        print(f"  {line}")

    print(f"selftest: {'all checks passed' if ok else 'FAILURES detected'}")
    return EXIT_OK if ok else EXIT_VERIFY


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="trisect",
        description="Compile n-qutrit unitaries into rotation + GCX/CINC circuits.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synth", help="factor a matrix file into a circuit")
    sp.add_argument("matrix", help="JSON matrix file, or - for stdin")
    sp.add_argument("-o", "--output", help="circuit file (default: stdout)")
    sp.add_argument(
        "--gate-set",
        choices=[g.value for g in GateSet],
        default=GateSet.GCX_CINC.value,
        help="two-qutrit vocabulary (default: %(default)s)",
    )
    sp.add_argument("--tolerance", type=float, default=1e-8, help="verification bound")
    sp.add_argument(
        "--sanitize",
        action="store_true",
        help="project a slightly non-unitary input onto the nearest unitary",
    )
    sp.add_argument(
        "--no-passes",
        action="store_true",
        help="skip the simplification passes (also disables CINC fusion)",
    )
    sp.add_argument("--report", help="write a JSON synthesis report to this path")
    sp.set_defaults(func=cmd_synth)

    vp = sub.add_parser("verify", help="simulate a circuit against a matrix")
    vp.add_argument("circuit", help="circuit file, or - for stdin")
    vp.add_argument("matrix", help="JSON matrix file")
    vp.add_argument("--tolerance", type=float, default=1e-8)
    vp.set_defaults(func=cmd_verify)

    rp = sub.add_parser("random", help="emit a Haar-random unitary matrix file")
    rp.add_argument("qutrits", type=int, choices=range(1, 6), help="register width")
    rp.add_argument("-o", "--output", help="matrix file (default: stdout)")
    rp.add_argument("--seed", type=int, default=0)
    rp.set_defaults(func=cmd_random)

    cp = sub.add_parser("counts", help="two-qutrit gate-count tables")
    cp.add_argument("--n-max", type=int, default=4, help="largest width to tabulate")
    cp.add_argument(
        "--measured",
        action="store_true",
        help="also synthesize Haar instances (n<=3) and count for real",
    )
    cp.add_argument("--operators", action="store_true", help="per-factor count table")
    cp.add_argument(
        "--gate-set",
        choices=[g.value for g in GateSet],
        default=GateSet.GCX_CINC.value,
    )
    cp.add_argument("--seed", type=int, default=0)
    cp.set_defaults(func=cmd_counts)

    tp = sub.add_parser("selftest", help="run the built-in verification suite")
    tp.add_argument("--qutrits", type=int, nargs="+", default=[2, 3], help="widths for the commutation tables")
    tp.add_argument("--trials", type=int, default=50)
    tp.add_argument("--seed", type=int, default=0)
    tp.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    tp.set_defaults(func=cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
