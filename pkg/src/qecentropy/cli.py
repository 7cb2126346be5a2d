"""Command-line front end.

Exit status: 0 when every check passes, 1 on a failed check, 2 on a usage,
parse or validation error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import checks, codes, cycle, discrim, matcore, quantum
from .errors import ParseError, QecEntropyError, ValidationError

CODES = {"repetition3": codes.repetition3, "leung4": codes.leung4}
CHANNELS = {
    "bitflip": quantum.bitflip_enlarged,
    "ad": quantum.amplitude_damping,
    "depol": quantum.depolarizing,
    "dephase": quantum.dephasing,
}


class UsageError(Exception):
    pass


def _load_json(path: str, what: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {what} file {path!r}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def resolve_code(source: str) -> codes.QecCode:
    if source in CODES:
        return CODES[source]()
    return codes.code_from_json(_load_json(source, "code"), where=source)


def channel_family(source: str, n_qubits: int):
    """``name:param`` -> (family callable, parameter); None family for JSON files."""
    name, sep, param = source.partition(":")
    if name in CHANNELS and sep:
        try:
            value = float(param)
        except ValueError:
            raise UsageError(f"bad channel parameter in {source!r}") from None
        make = CHANNELS[name]
        if name == "bitflip":
            if n_qubits != 3:
                raise UsageError("bitflip:p is the three-qubit enlarged channel")
            return make, value
        if n_qubits == 1:
            return make, value
        return (lambda g: quantum.tensor_power(make(g), n_qubits)), value
    if name in CHANNELS:
        raise UsageError(f"channel {name!r} needs a parameter, e.g. {name}:0.1")
    return None, None


def resolve_channel(source: str, n_qubits: int) -> quantum.KrausChannel:
    family, value = channel_family(source, n_qubits)
    if family is not None:
        return family(value)
    return quantum.channel_from_json(_load_json(source, "channel"), where=source)


def parse_grid(text: str) -> np.ndarray:
    try:
        a, b, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"--grid expects a:b:step, got {text!r}") from None
    if step <= 0 or b < a:
        raise UsageError("--grid needs step > 0 and a <= b")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return np.round(a + step * np.arange(n), 12)


def parse_tolerances(items) -> dict:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tolerance expects NAME=VALUE, got {item!r}")
        if name not in checks.TOLERANCES:
            raise UsageError(f"unknown tolerance {name!r}")
        try:
            out[name] = float(value)
        except ValueError:
            raise UsageError(f"bad tolerance value {value!r}") from None
    return out


def _base(text: str):
    return 2 if text == "2" else "e"


def _fmt(x) -> str:
    if isinstance(x, bool) or x is None:
        return str(x)
    if isinstance(x, (int, float, np.floating)):
        return f"{float(x):.6g}"
    return str(x)


def render_table(rows: list[dict], columns: list[str]) -> str:
    cells = [[_fmt(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) if cells else len(c) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def render_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in (r.get(c) for c in columns)])
    return buf.getvalue()


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n"


def emit(text: str, out: str | None) -> None:
    """Write to ``out`` atomically (temp file + rename), or to stdout."""
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_reproduce(args) -> int:
    results = checks.run_all(parse_tolerances(args.tolerance), seed=args.seed)
    rows = [r.to_json() for r in results]
    columns = ["name", "expected", "computed", "tolerance", "passed", "unit"]
    if args.format == "json":
        text = dump_json({"seed": args.seed, "checks": rows, "all_passed": all(r.passed for r in results)})
    elif args.format == "csv":
        text = render_csv(rows, columns)
    else:
        text = render_table(rows, columns)
    emit(text, args.out)
    return 0 if all(r.passed for r in results) else 1


def _cycle_input(code: codes.QecCode, which: str, seed: int) -> quantum.DensityMatrix:
    if which == "zero":
        return code.codewords[0].density()
    if which == "one":
        return code.codewords[-1].density()
    if which == "mixed":
        return quantum.DensityMatrix(code.projector / code.k)
    return code.random_state(np.random.default_rng(seed))


def cmd_cycle(args) -> int:
    code = resolve_code(args.code)
    noise = resolve_channel(args.noise, code.n_qubits)
    recovery = code.recovery
    if recovery is None:
        if code.correctable is None:
            raise UsageError(f"code {code.name!r} has neither recovery operators nor a correctable set")
        recovery = codes.canonical_recovery(code, [noise.operators[i] for i in code.correctable])
    rho = _cycle_input(code, args.input, args.seed)
    report = cycle.run_cycle(code, noise, recovery, rho, restricted=args.restricted, base=_base(args.base))
    doc = report.to_json()
    doc["code"] = code.name
    if args.format == "json":
        text = dump_json(doc)
    else:
        rows = [
            {"quantity": k, "value": doc[k], "unit": doc["units"][k]}
            for k in ("s_in", "s_noisy", "delta_s", "erasure_cost", "s_exchange", "delta_s_tot", "fidelity", "leakage")
        ]
        rows += [{"quantity": f"p_{k}", "value": p, "unit": "probability"} for k, p in enumerate(doc["syndrome_probs"])]
        rows += [{"quantity": f"verdict {k}", "value": v, "unit": ""} for k, v in doc["verdicts"].items()]
        render = render_csv if args.format == "csv" else render_table
        text = render(rows, ["quantity", "value", "unit"])
    emit(text, args.out)
    return 0 if report.all_passed else 1


def cmd_discriminate(args) -> int:
    rows = []
    if args.ambiguity is not None:
        res = discrim.ambiguity_delta_min(args.ambiguity)
        rows.append({"quantity": "overlap", "value": res.overlap, "unit": "dimensionless"})
        rows.append({"quantity": "delta_min", "value": res.delta_min, "unit": "probability"})
        rows.append({"quantity": "delta_min/overlap^2", "value": res.asymptotic_ratio, "unit": "dimensionless"})
        rows.append({"quantity": "eta_tilde", "value": discrim.ETA_TILDE, "unit": "dimensionless"})
    else:
        psi1, psi2 = checks.helstrom_example()
        ens = discrim.DiscriminationEnsemble((psi1, psi2), (0.5, 0.5))
        rows.append({"quantity": "helstrom_pure", "value": discrim.helstrom_pure(psi1, psi2, 0.5, 0.5), "unit": "probability"})
        rows.append({"quantity": "povm_error_symmetric_detectors", "value": discrim.povm_error(checks.symmetric_detectors(), ens), "unit": "probability"})
        rows.append({"quantity": "helstrom_mixed", "value": discrim.helstrom_mixed(ens), "unit": "probability"})
        rows.append({"quantity": "priors_product_deviation", "value": discrim.priors_consistency_check(), "unit": "probability"})
    if args.format == "json":
        text = dump_json({r["quantity"]: {"value": r["value"], "unit": r["unit"]} for r in rows})
    else:
        render = render_csv if args.format == "csv" else render_table
        text = render(rows, ["quantity", "value", "unit"])
    emit(text, args.out)
    return 0


def cmd_kl(args) -> int:
    code = resolve_code(args.code)
    source = args.channel or args.noise
    if source is None:
        raise UsageError("kl needs --channel (or --noise)")
    family, value = channel_family(source, code.n_qubits)
    channel = family(value) if family is not None else resolve_channel(source, code.n_qubits)
    indices = list(code.correctable) if code.correctable is not None else list(range(len(channel)))
    exact = codes.kl_check_exact(code, [channel.operators[i] for i in indices], args.kl_tol)
    doc = {
        "code": code.name,
        "channel": source,
        "indices": indices,
        "exact": {
            "alpha": matcore.matrix_to_json(exact.alpha),
            "residual": exact.residual,
            "exact": exact.exact,
            "tolerance": args.kl_tol,
        },
    }
    rows = [
        {"quantity": "exact_residual", "value": exact.residual, "unit": "probability"},
        {"quantity": "exact", "value": exact.exact, "unit": ""},
    ]
    if family is not None and value > 0:
        approx = codes.kl_decompose_approx(code, family, value, order=args.order, indices=indices)
        doc["approx"] = {
            "gamma": value,
            "order": args.order,
            "alpha": matcore.matrix_to_json(approx.alpha),
            "alpha_00": float(approx.alpha[0, 0].real),
            "b_hat": {f"{j},{k}": matcore.matrix_to_json(b) for (j, k), b in sorted(approx.b_hat.items())},
            "residual": approx.residual,
            "units": {"alpha": "probability", "b_hat": "probability", "residual": "probability"},
        }
        rows.append({"quantity": "alpha_00", "value": float(approx.alpha[0, 0].real), "unit": "probability"})
        for n, (j, k) in enumerate(sorted(approx.b_hat)):
            if j == k:
                diag = np.real(np.diag(approx.b_hat[(j, k)]))
                rows.append({"quantity": f"b_hat_{j}{k} diag", "value": " ".join(f"{x:.6g}" for x in diag), "unit": "probability"})
        rows.append({"quantity": "approx_residual", "value": approx.residual, "unit": "probability"})
    spreads = {}
    for i in indices:
        lo, hi = codes.detection_range(code, channel.operators[i])
        spreads[str(i)] = {"lambda_min": lo, "lambda_max": hi, "spread": hi - lo, "unit": "probability"}
    doc["detection_range"] = spreads
    if args.format == "json":
        text = dump_json(doc)
    else:
        render = render_csv if args.format == "csv" else render_table
        text = render(rows, ["quantity", "value", "unit"])
    emit(text, args.out)
    return 0


def cmd_sweep(args) -> int:
    grid = parse_grid(args.grid)
    base = _base(args.base)
    a = args.coherence if args.coherence is not None else cycle.coherence_for_entropy(0.56, base)
    result = cycle.ad_entropy_sweep(a, grid)
    if args.format == "csv":
        text = result.to_csv()
    elif args.format == "json":
        doc = result.to_json()
        doc["coherence"] = a
        text = dump_json(doc)
    else:
        rows = [
            {"parameter": g, "entropy_bits": b, "entropy_nats": n, "fidelity": f}
            for g, b, n, f in zip(result.parameter, result.entropy_bits, result.entropy_nats, result.fidelity)
        ]
        text = render_table(rows, ["parameter", "entropy_bits", "entropy_nats", "fidelity"])
        text += f"coherence a = {a:.6g}; S(rho) = {result.s_initial_bits:.6g} bits; threshold = {_fmt(result.threshold)}\n"
    emit(text, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--base", choices=["2", "e"], default="2", help="log base for entropies (default 2)")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--format", choices=["json", "csv", "table"], default="table")
    common.add_argument("--out", help="write the report to PATH instead of stdout")

    parser = argparse.ArgumentParser(prog="qecentropy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reproduce", parents=[common], help="run every reference check")
    p.add_argument("--tolerance", action="append", metavar="NAME=VALUE")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("cycle", parents=[common], help="one QEC cycle with its entropy ledger")
    p.add_argument("--code", default="repetition3", help="built-in name or code JSON path")
    p.add_argument("--noise", default="bitflip:0.1", help="NAME:PARAM or channel JSON path")
    p.add_argument("--restricted", action="store_true", help="keep only the correctable Kraus operators")
    p.add_argument("--input", choices=["zero", "one", "mixed", "random"], default="zero")
    p.set_defaults(func=cmd_cycle)

    p = sub.add_parser("discriminate", parents=[common], help="state-discrimination bounds")
    p.add_argument("--helstrom-example", action="store_true", help="the two-state worked example (default)")
    p.add_argument("--ambiguity", type=float, metavar="C1", help="minimal ambiguity factor for overlap C1")
    p.set_defaults(func=cmd_discriminate)

    p = sub.add_parser("kl", parents=[common], help="exact and approximate Knill-Laflamme analysis")
    p.add_argument("--code", default="leung4")
    p.add_argument("--channel")
    p.add_argument("--noise")
    p.add_argument("--order", type=int, default=1)
    p.add_argument("--kl-tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_kl)

    p = sub.add_parser("sweep", parents=[common], help="amplitude-damping entropy sweep")
    p.add_argument("--grid", default="0:1:0.001", help="a:b:step")
    p.add_argument("--coherence", type=float, help="off-diagonal a of the input state")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except (UsageError, ParseError, ValidationError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QecEntropyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
