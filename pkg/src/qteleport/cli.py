"""``qteleport`` command-line front end.

Exit codes: 0 success, 1 a coverage check failed (``run`` only), 2 usage or
input error, 3 I/O error. Reals are written with 17 significant digits and
complex numbers as ``[re, im]`` pairs, so output is byte-for-byte
reproducible and every number parses back to the same double.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .errors import QTeleportError
from .experiments import (
    DEFAULT_TOL,
    SweepRow,
    TrialSummary,
    coverage_report,
    random_trials,
    sweep_theta,
)
from .protocol import (
    PremeasurementSpec,
    ProtocolReport,
    QubitState,
    lueders_spec,
    run_protocol,
)

COMMANDS = ("run", "sweep-theta", "random-trials", "show-state")
TOL_ENV = "QTELEPORT_TOL"
STATE_NORM_TOL = 1e-6
CHI_NORM_TOL = 1e-9

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(QTeleportError):
    exit_code = EXIT_USAGE


class NormError(UsageError):
    pass


class ParseError(UsageError):
    pass


class MissingVector(ParseError):
    pass


class IoError(QTeleportError):
    exit_code = EXIT_IO


@dataclass(frozen=True)
class CliConfig:
    command: str
    a_re: float = 1.0
    a_im: float = 0.0
    b_re: float = 0.0
    b_im: float = 0.0
    theta: Optional[float] = None
    points: Optional[int] = None
    trials: Optional[int] = None
    seed: int = 0
    randomize_chi: bool = False
    chi_file: Optional[str] = None
    out: Optional[str] = None
    format: str = "json"
    renormalization: float = 1.0

    @property
    def state(self) -> QubitState:
        return QubitState(complex(self.a_re, self.a_im), complex(self.b_re, self.b_im))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qteleport", description="Collapse-free teleportation simulator.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--a-re", type=float, default=1.0)
    p.add_argument("--a-im", type=float, default=0.0)
    p.add_argument("--b-re", type=float, default=0.0)
    p.add_argument("--b-im", type=float, default=0.0)
    p.add_argument("--theta", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--randomize-chi", action="store_true")
    p.add_argument("--chi-file")
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"))
    return p


def parse_args(argv: Sequence[str]) -> CliConfig:
    """Validate ``argv`` into a :class:`CliConfig`.

    The input amplitudes are rescaled to exact unit norm; the factor applied
    is kept in ``renormalization``.
    """
    ns = _build_parser().parse_args(list(argv))
    amps = (ns.a_re, ns.a_im, ns.b_re, ns.b_im)
    if not all(math.isfinite(x) for x in amps):
        raise UsageError("amplitudes must be finite")
    norm = math.sqrt(sum(x * x for x in amps))
    if abs(norm - 1.0) > STATE_NORM_TOL:
        raise NormError(f"input state has norm {norm:.17g}, expected 1 within {STATE_NORM_TOL:g}")
    if ns.theta is not None and not math.isfinite(ns.theta):
        raise UsageError("--theta must be finite")

    if ns.command == "sweep-theta":
        if ns.points is None:
            raise UsageError("sweep-theta requires --points")
        if ns.points < 2:
            raise UsageError(f"--points must be >= 2, got {ns.points}")
    if ns.command == "random-trials":
        if ns.trials is None:
            raise UsageError("random-trials requires --trials")
        if ns.trials < 1:
            raise UsageError(f"--trials must be >= 1, got {ns.trials}")

    fmt = ns.format or ("csv" if ns.command == "sweep-theta" else "json")
    return CliConfig(
        command=ns.command,
        a_re=ns.a_re / norm, a_im=ns.a_im / norm,
        b_re=ns.b_re / norm, b_im=ns.b_im / norm,
        theta=ns.theta, points=ns.points, trials=ns.trials, seed=ns.seed,
        randomize_chi=ns.randomize_chi, chi_file=ns.chi_file, out=ns.out,
        format=fmt, renormalization=1.0 / norm,
    )


def load_chi_file(path) -> PremeasurementSpec:
    """Read ``{"chi": [[[re, im] x 4] x 4]}`` into a premeasurement spec.

    Vectors are in the |++>, |+->, |-+>, |--> ordering of qubits 1 and 2.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read chi file {path}: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"chi file {path} is not valid JSON: {exc.msg}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("chi"), list):
        raise ParseError(f"chi file {path} must be an object with a 'chi' list")
    raw = doc["chi"]
    if len(raw) < 4:
        raise MissingVector(f"chi file {path} has {len(raw)} vectors, need 4")
    if len(raw) > 4:
        raise ParseError(f"chi file {path} has {len(raw)} vectors, need 4")

    vectors = []
    for i, vec in enumerate(raw, start=1):
        try:
            arr = np.array(vec, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"chi_{i} is not a list of [re, im] pairs") from exc
        if arr.shape != (4, 2) or not np.all(np.isfinite(arr)):
            raise ParseError(f"chi_{i} must be 4 finite [re, im] pairs")
        v = arr[:, 0] + 1j * arr[:, 1]
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > CHI_NORM_TOL:
            raise NormError(f"chi_{i} has norm {norm:.17g}, expected 1")
        vectors.append(v / norm)
    label = doc.get("label")
    return PremeasurementSpec(tuple(vectors), label=str(label) if label else f"file:{path.name}")


# ---------------------------------------------------------------- formatting

def format_real(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot emit non-finite value {x!r}")
    return format(x, ".17g")


def _pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _json_text(obj: Any, indent: int = 0) -> str:
    pad = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_real(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(str(k), ensure_ascii=False)}: {_json_text(v, indent + 1)}'
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_json_text(v) for v in obj) + "]"
        items = [f"{pad}  {_json_text(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    raise TypeError(f"cannot emit {type(obj).__name__}")


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_json_text(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()


@dataclass(frozen=True)
class Table:
    header: tuple[str, ...]
    rows: tuple[tuple, ...]

    @classmethod
    def from_records(cls, records) -> "Table":
        records = list(records)
        header = tuple(f.name for f in fields(records[0]))
        return cls(header, tuple(tuple(getattr(r, h) for h in header) for r in records))

    def as_json(self) -> list[dict]:
        return [dict(zip(self.header, row)) for row in self.rows]


def emit(document, fmt: str, out: Optional[str] = None) -> int:
    """Serialize a JSON-able mapping or a :class:`Table` and write it.

    Returns 0; raises :class:`IoError` if the destination cannot be written.
    """
    if fmt == "csv":
        if not isinstance(document, Table):
            raise UsageError("this output has no CSV form")
        text = _csv_text(document.header, document.rows)
    elif fmt == "json":
        payload = {"rows": document.as_json()} if isinstance(document, Table) else document
        text = _json_text(payload) + "\n"
    else:
        raise UsageError(f"unknown format {fmt!r}")
    data = text.encode("utf-8")
    try:
        if out is None:
            sys.stdout.flush()
            sys.stdout.buffer.write(data)
            sys.stdout.buffer.flush()
        else:
            Path(out).write_bytes(data)
    except OSError as exc:
        raise IoError(f"cannot write {out or 'stdout'}: {exc.strerror or exc}") from exc
    return EXIT_OK


# ----------------------------------------------------------------- commands

def _tolerance() -> tuple[float, str]:
    raw = os.environ.get(TOL_ENV)
    if raw is None or raw == "":
        return DEFAULT_TOL, "default"
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not math.isfinite(tol) or tol <= 0:
        raise UsageError(f"{TOL_ENV} must be a positive finite number")
    return tol, TOL_ENV


def _metadata(cfg: CliConfig, tol: float, tol_source: str) -> dict:
    return {
        "program": "qteleport",
        "version": __version__,
        "command": cfg.command,
        "tolerance": tol,
        "tolerance_source": tol_source,
    }


def _input_doc(cfg: CliConfig) -> dict:
    phi = cfg.state
    return {"a": _pair(phi.a), "b": _pair(phi.b), "renormalization": cfg.renormalization}


def _spec(cfg: CliConfig) -> PremeasurementSpec:
    return load_chi_file(cfg.chi_file) if cfg.chi_file else lueders_spec()


def _matrix_doc(m) -> list:
    return [[_pair(z) for z in row] for row in np.asarray(m)]


def report_document(report: ProtocolReport, checks, meta: dict,
                    input_doc: Optional[dict] = None) -> dict:
    phi = report.input
    return {
        "metadata": meta,
        "input": input_doc or {"a": _pair(phi.a), "b": _pair(phi.b)},
        "spec_label": report.spec_label,
        "theta": report.theta,
        "fidelity_after_U": report.fidelity_after_U,
        "fidelity_final": report.fidelity_final,
        "coincidence_expectation": report.coincidence_expectation,
        "unitarity_defect_U": report.unitarity_defect_U,
        "checks": [asdict(c) for c in checks],
        "reduced": {name: _matrix_doc(rho.matrix) for name, rho in report.reduced.items()},
        "total_state_after_U": [_pair(z) for z in report.total_state_after_U],
        "total_state_final": (None if report.total_state_final is None
                              else [_pair(z) for z in report.total_state_final]),
    }


def basis_labels() -> list[str]:
    """Labels ``eta_i|s1 s2 s3>`` for the 32 basis states, in index order."""
    return [f"η_{i}|{s1} {s2} {s3}⟩"
            for i, s1, s2, s3 in itertools.product(range(1, 5), "+-", "+-", "+-")]


def _cmd_run(cfg, meta, tol) -> int:
    report = run_protocol(cfg.state, _spec(cfg), cfg.theta)
    checks = coverage_report(report, tol)
    if cfg.format == "csv":
        doc = Table.from_records(checks)
    else:
        doc = report_document(report, checks, meta, _input_doc(cfg))
    emit(doc, cfg.format, cfg.out)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK_FAILED


def _cmd_sweep(cfg, meta, tol) -> int:
    rows: list[SweepRow] = sweep_theta(cfg.state, _spec(cfg), cfg.points)
    table = Table.from_records(rows)
    if cfg.format == "csv":
        return emit(table, "csv", cfg.out)
    return emit({"metadata": meta, "input": _input_doc(cfg), "rows": table.as_json()},
                "json", cfg.out)


def _cmd_trials(cfg, meta, tol) -> int:
    summary: TrialSummary = random_trials(cfg.trials, cfg.seed, cfg.randomize_chi)
    if cfg.format == "csv":
        return emit(Table.from_records([summary]), "csv", cfg.out)
    return emit({"metadata": meta, "randomize_chi": cfg.randomize_chi,
                 "summary": asdict(summary)}, "json", cfg.out)


def _cmd_show(cfg, meta, tol) -> int:
    report = run_protocol(cfg.state, _spec(cfg), cfg.theta)
    labels = basis_labels()
    after, final = report.total_state_after_U, report.total_state_final
    if cfg.format == "csv":
        rows = tuple((lab, after[k].real, after[k].imag, final[k].real, final[k].imag)
                     for k, lab in enumerate(labels))
        return emit(Table(("basis", "after_U_re", "after_U_im", "final_re", "final_im"), rows),
                    "csv", cfg.out)
    states = [{"basis": lab, "after_U": _pair(after[k]), "final": _pair(final[k])}
              for k, lab in enumerate(labels)]
    return emit({"metadata": meta, "input": _input_doc(cfg), "spec_label": report.spec_label,
                 "theta": report.theta, "states": states}, "json", cfg.out)


_DISPATCH = {
    "run": _cmd_run,
    "sweep-theta": _cmd_sweep,
    "random-trials": _cmd_trials,
    "show-state": _cmd_show,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
        if cfg.renormalization != 1.0:
            print(f"qteleport: input state renormalized by factor {cfg.renormalization:.17g}",
                  file=sys.stderr)
        tol, source = _tolerance()
        return _DISPATCH[cfg.command](cfg, _metadata(cfg, tol, source), tol)
    except (UsageError, IoError) as exc:
        print(f"qteleport: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except QTeleportError as exc:
        print(f"qteleport: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
