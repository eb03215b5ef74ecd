"""Command-line front end.

Usage::

    complex-jacobi moments     --jacobi SPEC.json [--degree K] [--exact]
    complex-jacobi reconstruct --moments S.json [--degree n] [--sign principal|1,-1,..]
    complex-jacobi solve       --moments S.json [--degree K] [--tau X|auto]
    complex-jacobi verify      --measure MU.json --moments S.json [--degree K] [--tol X]
    complex-jacobi intertwine  --jacobi SPEC.json [--degree d] [--measure MU.json]
    complex-jacobi spectrum    --jacobi SPEC.json [--degree n]

Results go to ``--out`` or stdout.  Errors are written to stderr as a JSON
object and mapped to exit codes: 1 bad input, 2 breakdown, 3 verify
tolerance failure, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .core import AtomicMeasure, MomentSequence, QQi
from .dilation import measure_moments, solve_moment_problem
from .errors import (
    Breakdown,
    ComplexJacobiError,
    NumericalFailure,
    ParseError,
    WindowOverflow,
)
from .jacobi import JacobiSpec, compute_moments, finite_section, validate
from .linalg import complex_eig
from .reconstruct import SignRule, moments_to_jacobi
from .similarity import BasisMap, SimilarityReport, check_intertwining, gram_matrix

VERBS = ("moments", "reconstruct", "solve", "verify", "intertwine", "spectrum")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BREAKDOWN = 2
EXIT_TOLERANCE = 3
EXIT_NUMERICAL = 4


# ---------------------------------------------------------------- JSON I/O


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def _encode(obj, out: io.StringIO, indent: int):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            out.write(f"{pad}  {json.dumps(str(k))}: ")
            _encode(v, out, indent + 1)
            out.write(",\n" if i + 1 < len(items) else "\n")
        out.write(pad + "}")
    elif isinstance(obj, (list, tuple)):
        # short lists of scalars (complex pairs) stay on one line
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            out.write("[")
            for i, v in enumerate(obj):
                if i:
                    out.write(", ")
                _encode(v, out, indent)
            out.write("]")
            return
        out.write("[\n")
        for i, v in enumerate(obj):
            out.write(pad + "  ")
            _encode(v, out, indent + 1)
            out.write(",\n" if i + 1 < len(obj) else "\n")
        out.write(pad + "]")
    elif isinstance(obj, bool) or obj is None:
        out.write(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.write(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.write(_format_float(float(obj)))
    elif isinstance(obj, str):
        out.write(json.dumps(obj))
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Canonical JSON: fixed field order, 17 significant digits, trailing newline."""
    buf = io.StringIO()
    _encode(obj, buf, 0)
    buf.write("\n")
    return buf.getvalue()


def _fraction_out(q: Fraction):
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def encode_scalar(x):
    if isinstance(x, QQi):
        return [_fraction_out(x.re), _fraction_out(x.im)]
    c = complex(x)
    return [c.real, c.imag]


def spec_to_json(spec: JacobiSpec) -> dict:
    return {"a": [encode_scalar(v) for v in spec.a], "b": [encode_scalar(v) for v in spec.b]}


def moments_to_json(s: MomentSequence) -> dict:
    return {"s": [encode_scalar(v) for v in s.values]}


def measure_to_json(mu: AtomicMeasure) -> dict:
    z = mu.atoms.astype(np.complex128)
    w = mu.weights.astype(np.float64)
    return {
        "atoms": [{"z": [float(zj.real), float(zj.imag)], "w": float(wj)} for zj, wj in zip(z, w)],
        "support_radius": float(np.max(np.abs(z))),
        "tau": float(mu.tau) if mu.tau is not None else None,
        "rho": float(mu.rho) if mu.rho is not None else None,
    }


def _load(path) -> object:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", path=str(path)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", path=str(path), line=exc.lineno, column=exc.colno) from None


def _real_part(x, exact: bool, where: str):
    if isinstance(x, bool):
        raise ParseError(f"{where}: expected a number", field=where)
    if exact:
        try:
            if isinstance(x, float):
                return Fraction(repr(x))
            if isinstance(x, (int, str)):
                return Fraction(x)
        except (ValueError, ZeroDivisionError):
            pass
        raise ParseError(f"{where}: expected an integer, float or 'p/q' string", field=where)
    if isinstance(x, (int, float)):
        return float(x)
    raise ParseError(f"{where}: expected a number", field=where)


def parse_scalar(v, exact: bool, where: str):
    """``[re, im]`` (or a bare real) as ``complex`` or :class:`QQi`."""
    if isinstance(v, list):
        if len(v) != 2:
            raise ParseError(f"{where}: complex values are [re, im] pairs", field=where)
        re, im = (_real_part(p, exact, where) for p in v)
    else:
        re, im = _real_part(v, exact, where), 0
    return QQi(re, im) if exact else complex(re, im)


def _field(data, key, path):
    if not isinstance(data, dict) or key not in data:
        raise ParseError(f"{path}: missing field {key!r}", path=str(path), field=key)
    value = data[key]
    if not isinstance(value, list):
        raise ParseError(f"{path}: field {key!r} must be a list", path=str(path), field=key)
    return value


def parse_jacobi_file(path, exact: bool = False) -> JacobiSpec:
    data = _load(path)
    a = [parse_scalar(v, exact, f"a[{k}]") for k, v in enumerate(_field(data, "a", path))]
    b = [parse_scalar(v, exact, f"b[{k}]") for k, v in enumerate(_field(data, "b", path))]
    if not b:
        raise ParseError(f"{path}: 'b' is empty", path=str(path), field="b")
    spec = JacobiSpec(a, b, exact=exact)
    validate(spec)
    return spec


def parse_moments_file(path, exact: bool = False) -> MomentSequence:
    data = _load(path)
    raw = _field(data, "s", path)
    if not raw:
        raise ParseError(f"{path}: 's' is empty", path=str(path), field="s")
    return MomentSequence([parse_scalar(v, exact, f"s[{n}]") for n, v in enumerate(raw)])


def parse_measure_file(path) -> AtomicMeasure:
    data = _load(path)
    raw = _field(data, "atoms", path)
    z, w = [], []
    for j, atom in enumerate(raw):
        if not isinstance(atom, dict) or "z" not in atom or "w" not in atom:
            raise ParseError(f"{path}: atoms[{j}] needs 'z' and 'w'", path=str(path), field=f"atoms[{j}]")
        z.append(parse_scalar(atom["z"], False, f"atoms[{j}].z"))
        w.append(_real_part(atom["w"], False, f"atoms[{j}].w"))
    tau = data.get("tau")
    rho = data.get("rho")
    return AtomicMeasure(np.array(z, dtype=np.complex128), np.array(w), tau=tau, rho=rho)


# ---------------------------------------------------------------- requests


@dataclass
class CommandRequest:
    verb: str
    jacobi: str | None = None
    moments: str | None = None
    measure: str | None = None
    out: str | None = None
    degree: int | None = None
    tau: float | None = None
    sign: SignRule = SignRule.principal()
    tol: float = 1e-8
    exact: bool = False


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def _tau(text: str):
    if text == "auto":
        return None
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}") from None


def _sign(text: str) -> SignRule:
    if text == "principal":
        return SignRule.principal()
    try:
        return SignRule.explicit([int(t) for t in text.split(",") if t.strip()])
    except ValueError:
        raise argparse.ArgumentTypeError("--sign takes 'principal' or a comma list of +1/-1") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="complex-jacobi", description="Complex Jacobi matrices, moments and atomic measures.")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("--jacobi", metavar="PATH", help="Jacobi window JSON {a, b}")
    p.add_argument("--moments", metavar="PATH", help="moment JSON {s}")
    p.add_argument("--measure", metavar="PATH", help="atomic measure JSON")
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    p.add_argument("--degree", type=int, metavar="K")
    p.add_argument("--tau", type=_tau, default=None, metavar="X|auto")
    p.add_argument("--sign", type=_sign, default=SignRule.principal(), metavar="principal|LIST")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--exact", action="store_true", help="Gaussian-rational arithmetic")
    return p


REQUIRED = {
    "moments": ("jacobi",),
    "reconstruct": ("moments",),
    "solve": ("moments",),
    "verify": ("measure", "moments"),
    "intertwine": ("jacobi",),
    "spectrum": ("jacobi",),
}


def parse_request(argv) -> CommandRequest:
    ns = build_parser().parse_args(argv)
    req = CommandRequest(**vars(ns))
    for name in REQUIRED[req.verb]:
        if getattr(req, name) is None:
            raise ParseError(f"{req.verb} needs --{name}", field=name)
    if req.degree is not None and req.degree < 0:
        raise ParseError("--degree must be nonnegative", field="degree")
    return req


# ---------------------------------------------------------------- verbs


def _load_inputs(req: CommandRequest) -> dict:
    # every input is parsed before any computation starts
    loaded = {}
    if req.jacobi is not None:
        loaded["jacobi"] = parse_jacobi_file(req.jacobi, exact=req.exact)
    if req.moments is not None:
        loaded["moments"] = parse_moments_file(req.moments, exact=req.exact)
    if req.measure is not None:
        loaded["measure"] = parse_measure_file(req.measure)
    return loaded


def _verify_report(mu: AtomicMeasure, s: MomentSequence, K: int, tol: float) -> dict:
    if K > s.K:
        raise WindowOverflow(K + 1, s.K + 1)
    got = measure_moments(mu, K).values
    target = s.as_complex()[: K + 1].astype(np.clongdouble)
    dev = [float(abs(x - y)) for x, y in zip(got, target)]
    mass = float(mu.mass)
    return {
        "degree": K,
        "tol": tol,
        "mass": mass,
        "max_deviation": max(dev),
        "deviations": dev,
        "passed": bool(max(dev) <= tol and abs(mass - 1) <= 1e-10),
    }


def execute(req: CommandRequest) -> tuple[str, int]:
    """Run a parsed request; returns (output text, exit code)."""
    inp = _load_inputs(req)
    if req.verb == "moments":
        spec = inp["jacobi"]
        K = spec.N - 1 if req.degree is None else req.degree
        return dumps(moments_to_json(compute_moments(spec, K))), EXIT_OK
    if req.verb == "reconstruct":
        s = inp["moments"]
        n = (s.K + 1) // 2 if req.degree is None else req.degree
        return dumps(spec_to_json(moments_to_jacobi(s, n, req.sign))), EXIT_OK
    if req.verb == "solve":
        s = inp["moments"]
        K = s.K if req.degree is None else req.degree
        if K == 0:
            mu = AtomicMeasure([0j], [1.0], tau=None, rho=None)
        else:
            mu = solve_moment_problem(s, K, tau=req.tau, tol=req.tol)
        return dumps(measure_to_json(mu)), EXIT_OK
    if req.verb == "verify":
        s = inp["moments"]
        K = s.K if req.degree is None else req.degree
        report = _verify_report(inp["measure"], s, K, req.tol)
        return dumps(report), EXIT_OK if report["passed"] else EXIT_TOLERANCE
    if req.verb == "intertwine":
        spec = inp["jacobi"]
        d = min(spec.N - 2, (spec.N - 1) // 2) if req.degree is None else req.degree
        if d < 0:
            raise WindowOverflow(2, spec.N)
        tmap = BasisMap(spec, d)
        residual = check_intertwining(tmap, d)
        mu = inp.get("measure")
        if mu is None:
            fspec = spec.to_float()
            if 2 * d > fspec.N - 1:
                raise WindowOverflow(2 * d + 1, fspec.N)
            mu = (
                solve_moment_problem(compute_moments(fspec, 2 * d))
                if d > 0
                else AtomicMeasure([0j], [1.0])
            )
        _, smin = gram_matrix(BasisMap(spec.to_float(), d), mu, d)
        return dumps(SimilarityReport(float(residual), smin, d).to_dict()), EXIT_OK
    if req.verb == "spectrum":
        spec = inp["jacobi"].to_float()
        n = spec.N if req.degree is None else req.degree
        values = complex_eig(finite_section(spec, n)).values
        lines = ["re,im"] + [f"{_format_float(v.real)},{_format_float(v.imag)}" for v in values]
        return "\n".join(lines) + "\n", EXIT_OK
    raise ParseError(f"unknown verb {req.verb!r}")


def _exit_code(exc: ComplexJacobiError) -> int:
    if isinstance(exc, Breakdown):
        return EXIT_BREAKDOWN
    if isinstance(exc, NumericalFailure):
        return EXIT_NUMERICAL
    return EXIT_INPUT


def _report_error(exc: ComplexJacobiError, stream) -> None:
    stream.write(json.dumps(exc.to_dict(), sort_keys=True, default=str) + "\n")


def run(req: CommandRequest, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        text, code = execute(req)
    except ComplexJacobiError as exc:
        _report_error(exc, stderr)
        return _exit_code(exc)
    except (ValueError, ZeroDivisionError) as exc:
        _report_error(ComplexJacobiError(str(exc)), stderr)
        return EXIT_INPUT
    if req.out:
        Path(req.out).write_text(text)
    else:
        stdout.write(text)
    return code


def main(argv=None) -> int:
    try:
        req = parse_request(sys.argv[1:] if argv is None else argv)
    except ComplexJacobiError as exc:
        _report_error(exc, sys.stderr)
        return EXIT_INPUT
    return run(req)


if __name__ == "__main__":
    sys.exit(main())
