"""Command-line interface: ``python -m pfrmt <command> ...``.

Commands
--------
partition  Z_{k1/k2}/Z_{0/0} for explicit flavour masses (det, pf, quad or mc).
kpoint     k-point correlation function R_k at the given points.
micro      microscopic-limit partition function (JSON), or a CSV scan over a grid.
wilson     Wilson-smeared N_f-flavour Pfaffian with consistency checks.
verify     cross-method identity suite for one (n, nu, k1, k2) pattern.
converge   Laguerre-to-Bessel convergence table (CSV).

Flavour masses are comma-separated complex literals such as ``0.5+1.2i``,
``-0.3i`` or ``2``; ``j`` is accepted in place of ``i``.  Grids are written
``start:stop:count``.  Exit status is 0 on success, 1 for invalid input and
2 for numerical failures; errors are reported as a JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
import time

import numpy as np

from . import __version__
from .ensemble import EnsembleParams
from .errors import NumericalError, PfrmtError, ValidationError
from .flavors import DetSplit, FlavorSet, valid_splits
from .microscopic import convergence_study, kernel_I, micro_partition_det, micro_partition_pf, micro_valid_splits
from .oracles import McConfig, default_threads, mc_partition, quad_kpoint, quad_partition
from .partition import kpoint_det, kpoint_pf, partition_det, partition_pf
from .wilson import WilsonParams, continuum_value, permutation_residual, wilson_matrix, zNf_wilson

SCHEMA = "pfaffian-rmt/1"
VERIFY_TOL = 1e-8

_COMPLEX = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*"
                      r"(?:([+-])\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*[ij])?\s*$")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


# ------------------------------------------------------------ argument grammar

def parse_complex(text: str) -> complex:
    """Parse ``re+imi`` style literals: ``1.5``, ``2i``, ``-i``, ``0.5-1e-3i``."""
    t = text.strip().replace("j", "i")
    pure = re.fullmatch(r"([+-]?)((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?i", t)
    if pure:
        mag = float(pure.group(2)) if pure.group(2) else 1.0
        return complex(0.0, -mag if pure.group(1) == "-" else mag)
    m = _COMPLEX.match(t)
    if not t or not m or m.group(1) is None:
        raise ValidationError(f"cannot parse complex literal {text!r}")
    re_part = float(m.group(1))
    im_part = 0.0
    if m.group(2):
        im_part = float(m.group(3)) if m.group(3) else 1.0
        if m.group(2) == "-":
            im_part = -im_part
    return complex(re_part, im_part)


def parse_complex_list(text: str | None) -> list[complex]:
    if not text:
        return []
    return [parse_complex(p) for p in text.split(",")]


def parse_float_list(text: str | None) -> list[float]:
    if not text:
        return []
    try:
        return [float(p) for p in text.split(",")]
    except ValueError:
        raise ValidationError(f"cannot parse real list {text!r}")


def parse_int_pair(text: str, what: str) -> tuple[int, int]:
    try:
        a, b = (int(p) for p in text.split(","))
    except ValueError:
        raise ValidationError(f"{what} must be two integers 'a,b', got {text!r}")
    if a < 0 or b < 0:
        raise ValidationError(f"{what} entries must be non-negative")
    return a, b


def parse_grid(text: str) -> np.ndarray:
    try:
        start, stop, count = text.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise ValidationError(f"grid must read 'start:stop:count', got {text!r}")
    if count < 1:
        raise ValidationError("grid count must be positive")
    return np.linspace(start, stop, count)


def _c(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


# ------------------------------------------------------------ shared pieces

def _ensemble(args) -> EnsembleParams:
    if args.n is None:
        raise ValidationError("--n is required")
    pot = tuple(parse_float_list(args.potential)) or (1.0,)
    return EnsembleParams(args.n, args.nu, alpha=args.alpha, potential=pot)


def _add_ensemble(p):
    p.add_argument("--n", type=int, default=None, help="number of eigenvalues")
    p.add_argument("--nu", type=int, default=0, help="topological charge")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--potential", default="1", help="coefficients c1,c2,... of V(y) = c1 y + c2 y^2 + ...")


def _add_common(p):
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--tol-quad", type=float, default=1e-12, help="quadrature tolerance")
    p.add_argument("--threads", type=int, default=None, help="worker cap (default: PFRMT_THREADS or 1)")


def _threads(args) -> int:
    if args.threads is not None:
        if args.threads < 1:
            raise ValidationError("--threads must be positive")
        return args.threads
    return default_threads()


def _provenance(args, method: str, parameters: dict, **extra) -> dict:
    out = {
        "command": args.command,
        "parameters": parameters,
        "method": method,
        "tolerances": {"quad": args.tol_quad},
        "version": __version__,
    }
    out.update(extra)
    return out


def _json_doc(args, method, parameters, result, **extra) -> str:
    doc = {"schema": SCHEMA, "provenance": _provenance(args, method, parameters, **extra), "result": result}
    return json.dumps(doc, indent=2, sort_keys=False)


# ------------------------------------------------------------ commands

def _partition_request(args) -> dict:
    if args.request:
        with open(args.request) as fh:
            req = json.load(fh)
        if "provenance" in req:
            req = req["provenance"]["parameters"]
        return req
    if args.method == "mc":
        McConfig(args.samples, args.seed, args.chunk)
    ens = _ensemble(args).to_dict()
    flavors = FlavorSet(parse_complex_list(args.bosonic), parse_complex_list(args.fermionic)).to_dict()
    req = {"ensemble": ens, "flavors": flavors, "method": args.method}
    if args.split:
        req["split"] = list(parse_int_pair(args.split, "--split"))
    if args.method == "mc":
        req["mc"] = {"samples": args.samples, "seed": args.seed, "chunk": args.chunk}
    return req


def cmd_partition(args) -> str:
    req = _partition_request(args)
    params = EnsembleParams.from_dict(req["ensemble"])
    flavors = FlavorSet.from_dict(req["flavors"])
    method = req.get("method", "pf")
    if method == "det":
        split = DetSplit(*req["split"]) if req.get("split") else None
        res = partition_det(None, params, flavors, split)
    elif method == "pf":
        res = partition_pf(None, params, flavors)
    elif method == "quad":
        res = quad_partition(params, flavors, tol=max(args.tol_quad, 1e-14))
    elif method == "mc":
        mc = req.get("mc", {})
        cfg = McConfig(mc.get("samples", args.samples), mc.get("seed", args.seed), mc.get("chunk", args.chunk))
        res = mc_partition(params, flavors, cfg, threads=_threads(args))
    else:
        raise ValidationError(f"unknown method {method!r}")
    return _json_doc(args, method, req, res.to_dict())


def cmd_kpoint(args) -> str:
    params = _ensemble(args)
    x = parse_float_list(args.x)
    if not x:
        raise ValidationError("--x needs at least one point")
    fn = {"det": kpoint_det, "pf": kpoint_pf}.get(args.method)
    if args.method == "quad":
        val = quad_kpoint(params, x, tol=max(args.tol_quad, 1e-14))
    elif fn is None:
        raise ValidationError(f"unknown method {args.method!r}")
    else:
        val = fn(None, params, x)
    parameters = {"ensemble": params.to_dict(), "x": x}
    return _json_doc(args, args.method, parameters, {"value": val, "k": len(x)})


def _pattern_masses(k1: int, k2: int, x: float) -> FlavorSet:
    """Flavours at ``kappa = i m`` with masses ``x, x + 0.5, ...`` (fermions first)."""
    masses = [x + 0.5 * j for j in range(k1 + k2)]
    return FlavorSet([1j * m for m in masses[k2:]], [1j * m for m in masses[:k2]])


def cmd_micro(args) -> str:
    if args.grid:
        if args.flavors is None:
            raise ValidationError("--grid needs a --flavors k1,k2 pattern")
        k1, k2 = parse_int_pair(args.flavors, "--flavors")
        if k1 + k2 == 0:
            raise ValidationError("the flavour pattern must contain at least one flavour")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "z_pf", "z_det", "residual", "kernel1", "kernel3"])
        for x in parse_grid(args.grid):
            if x <= 0:
                raise ValidationError("grid points must be positive")
            fl = _pattern_masses(k1, k2, float(x))
            zp = micro_partition_pf(args.nu, fl).value
            zd = micro_partition_det(args.nu, fl).value
            res = abs(zd - zp) / max(abs(zp), 1e-300)
            w.writerow([f"{x:.12g}", f"{zp.real:.15g}", f"{zd.real:.15g}", f"{res:.3e}",
                        f"{kernel_I(1, args.nu, x, x + 0.5):.15g}", f"{kernel_I(3, args.nu, x, x + 0.5):.15g}"])
        return buf.getvalue()
    flavors = FlavorSet(parse_complex_list(args.bosonic), parse_complex_list(args.fermionic))
    if flavors.k1 + flavors.k2 == 0:
        raise ValidationError("give --bosonic/--fermionic masses or a --grid scan")
    if args.method == "det":
        split = DetSplit(*parse_int_pair(args.split, "--split")) if args.split else None
        res = micro_partition_det(args.nu, flavors, split)
    else:
        res = micro_partition_pf(args.nu, flavors)
    parameters = {"nu": args.nu, "flavors": flavors.to_dict()}
    return _json_doc(args, args.method, parameters, res.to_dict())


def cmd_wilson(args) -> str:
    masses = parse_float_list(args.masses)
    p = WilsonParams(args.nu, args.a_hat, tuple(masses))
    tol = max(args.tol_quad, 1e-14)
    mat = wilson_matrix(p, tol=tol)
    value = zNf_wilson(p, tol=tol, matrix=mat)
    checks = {
        "permutation_residual": permutation_residual(p, seed=args.seed, tol=tol),
        "continuum_ratio": value / continuum_value(p),
    }
    parameters = {"nu": p.nu, "a_hat": p.a_hat, "masses": list(p.masses)}
    result = {"value": value, "entries": mat.tolist(), "checks": checks}
    return _json_doc(args, "pfaffian", parameters, result)


def _verify_flavors(k1: int, k2: int, seed: int) -> FlavorSet:
    rng = np.random.default_rng(seed)
    fer = [complex(rng.uniform(0.2, 1.5), rng.uniform(-0.8, 0.8)) for _ in range(k2)]
    bos = [complex(rng.uniform(-1.0, 1.0), rng.choice([-1, 1]) * rng.uniform(0.4, 1.2)) for _ in range(k1)]
    return FlavorSet(bos, fer)


def cmd_verify(args) -> tuple[str, bool]:
    params = _ensemble(args)
    k1, k2 = parse_int_pair(args.flavors, "--flavors")
    if k1 + k2 == 0:
        raise ValidationError("the flavour pattern must contain at least one flavour")
    fl = _verify_flavors(k1, k2, args.seed)
    t0 = time.perf_counter()
    ref = partition_pf(None, params, fl).value
    scale = max(abs(ref), 1e-300)
    det_res = 0.0
    splits = valid_splits(params.n, k1, k2)
    for sp in splits:
        det_res = max(det_res, abs(partition_det(None, params, fl, sp).value - ref) / scale)
    checks = {"det_vs_pfaffian": {"max_residual": det_res, "tolerance": VERIFY_TOL,
                                  "splits": len(splits), "pass": det_res < VERIFY_TOL}}
    if params.n <= 3:
        q = quad_partition(params, fl, tol=max(args.tol_quad, 1e-14)).value
        qres = abs(q - ref) / scale
        checks["pfaffian_vs_quadrature"] = {"max_residual": qres, "tolerance": 1e-7, "pass": qres < 1e-7}
    micro_res = 0.0
    mfl = _verify_flavors(k1, k2, args.seed + 1)
    mref = micro_partition_pf(params.nu, mfl).value
    for sp in micro_valid_splits(k1, k2):
        micro_res = max(micro_res, abs(micro_partition_det(params.nu, mfl, sp).value - mref) / abs(mref))
    checks["micro_det_vs_pfaffian"] = {"max_residual": micro_res, "tolerance": VERIFY_TOL,
                                       "pass": micro_res < VERIFY_TOL}
    ok = all(c["pass"] for c in checks.values())
    parameters = {"ensemble": params.to_dict(), "pattern": [k1, k2], "flavors": fl.to_dict()}
    result = {"pass": ok, "value": _c(ref), "checks": checks, "seconds": time.perf_counter() - t0}
    return _json_doc(args, "verify", parameters, result, seed=args.seed), ok


def cmd_converge(args) -> str:
    ns = [int(v) for v in parse_float_list(args.n_list)]
    if not ns:
        raise ValidationError("--n-list needs at least one size")
    rows = convergence_study(ns, args.nu, parse_grid(args.grid))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "x", "deviation_p", "deviation_phat"])
    for r in rows:
        w.writerow([r.n, f"{r.x:.12g}", f"{r.deviation_p:.6e}", f"{r.deviation_phat:.6e}"])
    return buf.getvalue()


# ------------------------------------------------------------ entry point

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pfrmt", description="Pfaffian and determinant formulas for chiral random matrices")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("partition", help="finite-n partition function")
    _add_ensemble(p)
    _add_common(p)
    p.add_argument("--bosonic", default="", help="bosonic masses, e.g. '0.5+1i,-0.2-0.7i'")
    p.add_argument("--fermionic", default="", help="fermionic masses")
    p.add_argument("--method", choices=["det", "pf", "quad", "mc"], default="pf")
    p.add_argument("--split", default=None, help="determinant split 'l11,l21'")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chunk", type=int, default=10_000)
    p.add_argument("--request", default=None, help="JSON request (or a previous output) to run instead of flags")

    p = sub.add_parser("kpoint", help="k-point correlation function")
    _add_ensemble(p)
    _add_common(p)
    p.add_argument("--x", required=True, help="points x1,x2,...")
    p.add_argument("--method", choices=["det", "pf", "quad"], default="pf")

    p = sub.add_parser("micro", help="microscopic limit")
    p.add_argument("--nu", type=int, default=0)
    _add_common(p)
    p.add_argument("--flavors", default=None, help="pattern 'k1,k2' for --grid scans")
    p.add_argument("--grid", default=None, help="'start:stop:count' scan of the lightest mass")
    p.add_argument("--bosonic", default="")
    p.add_argument("--fermionic", default="")
    p.add_argument("--method", choices=["det", "pf"], default="pf")
    p.add_argument("--split", default=None)

    p = sub.add_parser("wilson", help="Wilson-smeared N_f-flavour function")
    p.add_argument("--nu", type=int, default=0)
    p.add_argument("--a-hat", type=float, required=True)
    p.add_argument("--masses", required=True, help="real masses m1,m2,...")
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)

    p = sub.add_parser("verify", help="cross-method identity suite")
    _add_ensemble(p)
    _add_common(p)
    p.add_argument("--flavors", required=True, help="pattern 'k1,k2'")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("converge", help="Laguerre-to-Bessel convergence table")
    p.add_argument("--nu", type=int, default=0)
    p.add_argument("--n-list", default="25,50,100,200")
    p.add_argument("--grid", default="0.25:3:12")
    _add_common(p)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _error(kind: str, exc: Exception) -> None:
    sys.stderr.write(json.dumps({"schema": SCHEMA, "error": {"type": kind, "class": type(exc).__name__,
                                                             "message": str(exc)}}) + "\n")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise ValidationError("a command is required: partition, kpoint, micro, wilson, verify or converge")
        if not (args.tol_quad > 0 and math.isfinite(args.tol_quad)):
            raise ValidationError("--tol-quad must be positive")
        _threads(args)
        if args.command == "verify":
            text, ok = cmd_verify(args)
            _emit(text, args.out)
            return 0 if ok else 2
        handler = {"partition": cmd_partition, "kpoint": cmd_kpoint, "micro": cmd_micro,
                   "wilson": cmd_wilson, "converge": cmd_converge}[args.command]
        text = handler(args)
    except ValidationError as exc:
        _error("validation", exc)
        return 1
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        _error("numerical", exc)
        return 2
    except PfrmtError as exc:
        _error("numerical", exc)
        return 2
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        _error("validation", exc)
        return 1
    _emit(text, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
