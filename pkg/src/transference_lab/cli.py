"""Command-line front end.

Exit codes: 0 success, 1 falsification or failed check, 2 usage error,
3 inconclusive (search budget or precision guard).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import random
import sys
from datetime import datetime, timezone
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path

from . import __version__
from .core import RationalMatrix, sqrt_approximant
from .delta import delta_bounds_report
from .exponents import (beta_lower_from_mbeta, dyson_map, estimate_exponents,
                        littlewood_corollary_check, tr_beta_lower, trivial_bounds_check,
                        uniform_maps)
from .search import (ApproxRecord, InconclusiveError, PrecisionGuardError, SearchBudget,
                     best_approximations)
from .secdual import (AxisBox, Parallelepiped, box_section_volume, check_wedge_lemma,
                      parallelepiped_section_monte_carlo, parallelepiped_section_volume,
                      random_parallelepiped)
from .transfer import (FunctionSpec, HypothesisError, TransferError, chi_from_psi,
                       phi_from_psi, revalidate, verify_mahler, verify_multitrans)

EXIT_OK, EXIT_FALSIFIED, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3
THREADS_ENV = "TRANSFERENCE_LAB_THREADS"


class UsageError(ValueError):
    pass


def _fs(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


# -- input parsing ---------------------------------------------------------------

def _parse_entry(value, precision):
    """Return (Fraction, error bound or None) for one matrix entry."""
    if isinstance(value, dict):
        if "value" not in value:
            raise UsageError(f"entry object needs a 'value' field: {value}")
        return _parse_entry(value["value"], value.get("precision", precision))
    if isinstance(value, bool) or isinstance(value, float):
        raise UsageError(f"entry {value!r}: give rationals as strings 'p/q' or decimal strings")
    if isinstance(value, int):
        return Fraction(value), None
    if not isinstance(value, str):
        raise UsageError(f"cannot read matrix entry {value!r}")
    text = value.strip()
    if "/" in text or not any(c in text for c in ".eE"):
        try:
            return Fraction(text), None
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad rational {value!r}: {exc}") from None
    if precision is None:
        raise UsageError(f"decimal entry {value!r} needs a declared precision (digits)")
    try:
        dec = Decimal(text)
    except InvalidOperation:
        raise UsageError(f"bad decimal {value!r}") from None
    digits = int(precision)
    if digits < 1:
        raise UsageError("precision must be a positive number of digits")
    return Fraction(dec), Fraction(1, 10 ** digits)


def parse_matrix_obj(obj: dict) -> RationalMatrix:
    if not isinstance(obj, dict) or "theta" not in obj:
        raise UsageError("matrix file must be a JSON object with a 'theta' field")
    rows = obj["theta"]
    if not isinstance(rows, list) or not rows:
        raise UsageError("'theta' must be a non-empty list of rows")
    top = obj.get("precision")
    entries, errors = [], []
    for row in rows:
        if not isinstance(row, list):
            raise UsageError("each row of 'theta' must be a list")
        prec = top
        if row and isinstance(row[-1], dict) and "value" not in row[-1]:
            prec = row[-1].get("precision", top)
            row = row[:-1]
        parsed = [_parse_entry(v, prec) for v in row]
        entries.append([v for v, _ in parsed])
        errors.extend(e for _, e in parsed if e is not None)
    n, m = len(entries), len(entries[0])
    if any(len(r) != m for r in entries):
        raise UsageError("rows of 'theta' have different lengths")
    if "m" in obj and int(obj["m"]) != m or "n" in obj and int(obj["n"]) != n:
        raise UsageError(f"declared (m, n) = ({obj.get('m')}, {obj.get('n')}) "
                         f"but theta is {n} x {m}")
    try:
        return RationalMatrix.from_rows(entries, error=max(errors) if errors else None,
                                        label=obj.get("label"))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def parse_matrix_file(path) -> RationalMatrix:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from None
    return parse_matrix_obj(obj)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma separated integers, got {text!r}") from None


def _frac_list(text: str) -> list[Fraction]:
    try:
        return [Fraction(v.strip()) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"expected comma separated rationals, got {text!r}") from None


def _parse_pair(text: str):
    if ":" not in text:
        raise UsageError("--pair must look like x1,...,xm:y1,...,yn")
    xs, ys = text.split(":", 1)
    return _int_list(xs), _int_list(ys)


def _parse_real(text: str, digits: int):
    """'sqrt:N' gives a truncated square root, anything else an exact rational."""
    if text.startswith("sqrt:"):
        return sqrt_approximant(int(text[5:]), digits)
    try:
        return Fraction(text), None
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot read real number {text!r}") from None


# -- output and manifests ----------------------------------------------------------

def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _manifest(args, inputs) -> dict:
    skip = {"func", "threads", "out", "certificate_out"}
    arguments = {k: v for k, v in sorted(vars(args).items())
                 if k not in skip and not k.startswith("_")}
    return {
        "command": args.command,
        "arguments": arguments,
        "seed": getattr(args, "seed", 0),
        "version": __version__,
        "inputs": {str(p): _sha256(p) for p in inputs},
    }


def _write_outputs(path, manifest, payload=None, lines=None, started=None):
    """Write a JSON (payload) or JSONL (lines) file with an embedded manifest,
    plus a PATH.manifest.json sidecar with timestamps."""
    path = Path(path)
    if lines is not None:
        text = "".join(json.dumps(obj, sort_keys=True) + "\n"
                       for obj in [{"manifest": manifest}] + list(lines))
    else:
        text = json.dumps({"manifest": manifest, "result": payload}, indent=2, sort_keys=True) + "\n"
    path.write_text(text, encoding="utf-8")
    side = dict(manifest)
    side["output"] = {str(path): hashlib.sha256(text.encode("utf-8")).hexdigest()}
    side["start"] = started
    side["end"] = datetime.now(timezone.utc).isoformat()
    Path(str(path) + ".manifest.json").write_text(
        json.dumps(side, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _emit(args, payload, inputs=(), lines=None):
    out = getattr(args, "out", None)
    if out:
        _write_outputs(out, _manifest(args, inputs), payload=payload, lines=lines,
                       started=args._started)
    elif lines is not None:
        for obj in lines:
            print(json.dumps(obj, sort_keys=True))
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return max(1, int(args.threads))
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer") from None
    return 1


def _read_jsonl(path) -> list[dict]:
    out = []
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    for line in text.splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        if "manifest" in obj:
            continue
        out.append(obj)
    return out


def _load_result(path) -> dict:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    return obj["result"] if isinstance(obj, dict) and "result" in obj and "manifest" in obj else obj


# -- subcommands --------------------------------------------------------------------

def cmd_delta(args) -> int:
    if args.dmax < 2:
        raise UsageError("--dmax must be at least 2")
    table = delta_bounds_report(args.dmax, mc_samples=args.mc_samples, seed=args.seed)
    _emit(args, [row.as_json() for row in table.rows])
    return EXIT_OK if table.all_ok else EXIT_FALSIFIED


def cmd_section(args) -> int:
    direction = _frac_list(args.direction)
    if args.basis:
        basis = [_frac_list(row) for row in args.basis.split(";")]
    else:
        basis = None
    sides = _frac_list(args.half_sides) if args.half_sides else [Fraction(1)] * len(direction)
    if len(sides) != len(direction) or basis is not None and len(basis) != len(direction):
        raise UsageError("half-sides, direction and basis must share the dimension")
    try:
        box = AxisBox(tuple(sides))
        body = Parallelepiped(box, tuple(map(tuple, basis))) if basis else None
        if args.mode == "montecarlo":
            if body is None:
                est, se = box_section_volume(box, direction, mode="montecarlo",
                                             samples=args.samples, seed=args.seed)
            else:
                est, se = parallelepiped_section_monte_carlo(body, direction, args.samples,
                                                             args.seed)
            payload = {"mode": "montecarlo", "volume_float": est, "stderr_float": se,
                       "samples": args.samples, "seed": args.seed}
        else:
            vol = (box_section_volume(box, direction) if body is None
                   else parallelepiped_section_volume(body, direction))
            payload = {"mode": "exact", "coef": _fs(vol.coef), "radicand": _fs(vol.radicand),
                       "volume": str(vol), "volume_float": float(vol)}
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(args, payload)
    return EXIT_OK


def cmd_scan(args) -> int:
    if args.sup_bound < 1:
        raise UsageError("--sup-bound must be at least 1")
    theta = parse_matrix_file(args.theta)
    budget = SearchBudget(args.sup_bound, time_limit=args.time_limit)
    records = best_approximations(theta, budget, norm=args.norm, workers=_threads(args))
    _emit(args, None, inputs=[args.theta], lines=[r.as_json() for r in records])
    return EXIT_OK


def _cert_exit(cert) -> int:
    return EXIT_OK if cert.passed else EXIT_FALSIFIED


def cmd_transfer(args) -> int:
    if args.revalidate:
        return _revalidate(args.revalidate)
    if not args.theta or not args.pair:
        raise UsageError("transfer needs --theta and --pair (or --revalidate FILE)")
    theta = parse_matrix_file(args.theta)
    x, y = _parse_pair(args.pair)
    if len(x) != theta.m or len(y) != theta.n:
        raise UsageError(f"pair shape ({len(x)}, {len(y)}) does not match (m, n) = "
                         f"({theta.m}, {theta.n})")
    X = Fraction(args.X) if args.X else None
    U = Fraction(args.U) if args.U else None
    try:
        if args.mahler:
            cert = verify_mahler(theta, x, y, X, U)
        else:
            xpow = X ** theta.m if X is not None else None
            upow = U ** theta.n if U is not None else None
            cert = verify_multitrans(theta, x, y, Xpow=xpow, Upow=upow)
    except HypothesisError as exc:
        raise UsageError(str(exc)) from None
    payload = cert.as_json()
    if args.certificate_out:
        _write_outputs(args.certificate_out, _manifest(args, [args.theta]), payload=payload,
                       started=args._started)
    if args.out:
        _emit(args, payload, inputs=[args.theta])
    elif not args.certificate_out:
        print(json.dumps(payload, indent=2, sort_keys=True))
    return _cert_exit(cert)


def _revalidate(path) -> int:
    obj = _load_result(path)
    try:
        ok, checks = revalidate(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: not a certificate ({exc})") from None
    print(json.dumps({"file": str(path), "revalidated": ok, "checks": checks},
                     indent=2, sort_keys=True))
    return EXIT_OK if ok else EXIT_FALSIFIED


def _function_spec(text: str) -> FunctionSpec:
    if text.startswith("power:"):
        try:
            return FunctionSpec.power(float(Fraction(text[6:])))
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"bad exponent in {text!r}") from None
    if text in ("log1", "log-littlewood-1"):
        return FunctionSpec("log-littlewood-1")
    if text in ("log2", "log-littlewood-2"):
        return FunctionSpec("log-littlewood-2")
    if text.startswith("table:"):
        path = text[6:]
        try:
            pairs = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise UsageError(f"no such file: {path}") from None
        if isinstance(pairs, dict):
            pairs = pairs.get("table", [])
        try:
            return FunctionSpec.tabulated([(float(a), float(b)) for a, b in pairs])
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad table {path}: {exc}") from None
    raise UsageError(f"unknown spec {text!r}; use power:G, log1, log2 or table:FILE")


def cmd_psi_transfer(args) -> int:
    spec = _function_spec(args.spec)
    points = [float(Fraction(v)) for v in args.eval.split(",") if v.strip()] if args.eval else []
    if args.chi and args.n != 1:
        raise UsageError("--chi needs n = 1")
    try:
        fn = chi_from_psi(spec, args.m) if args.chi else phi_from_psi(spec, args.m, args.n)
        values = [{"s": s, "value": fn(s), "f_inverse": fn.inverse_f(s)} for s in points]
    except TransferError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload = {"function": "chi" if args.chi else "phi", "report": fn.report.as_json(),
               "values": values}
    _emit(args, payload)
    return EXIT_OK


def _gamma(text: str):
    if text.lower() in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad exponent {text!r}") from None


def _num_json(v):
    if isinstance(v, Fraction):
        return {"value": _fs(v), "value_float": float(v)}
    if isinstance(v, float) and math.isinf(v):
        return {"value": "inf", "value_float": None}
    return {"value": v, "value_float": float(v)}


def cmd_exponents(args) -> int:
    if args.mode == "map":
        if args.gamma is None:
            raise UsageError("exponents map needs --gamma")
        g = _gamma(args.gamma)
        try:
            if args.which == "dyson":
                value, vac = dyson_map(g, args.m, args.n), False
            elif args.which == "german":
                value, vac = uniform_maps(g, args.m, args.n, "german", with_flag=True)
            elif args.which == "tr-beta":
                if args.n != 1:
                    raise UsageError("tr-beta needs n = 1")
                value, vac = tr_beta_lower(g, args.m, with_flag=True)
            else:
                if args.m != 1:
                    raise UsageError("beta-from-mbeta needs m = 1")
                value, vac = beta_lower_from_mbeta(g, args.n, with_flag=True)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        payload = dict(_num_json(value), which=args.which, m=args.m, n=args.n,
                       gamma=args.gamma, vacuous=vac)
        _emit(args, payload)
        return EXIT_OK
    if not args.records:
        raise UsageError("exponents needs --records FILE.jsonl (or the 'map' mode)")
    records = [ApproxRecord.from_json(obj) for obj in _read_jsonl(args.records)]
    try:
        report = estimate_exponents(records, args.m, args.n, args.tail)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    checks = trivial_bounds_check(report, args.m, args.n)
    payload = dict(report.as_json(), trivial_bounds=[{"check": k, "passed": ok} for k, ok in checks])
    _emit(args, payload, inputs=[args.records])
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_FALSIFIED


def cmd_littlewood(args) -> int:
    if args.qmax < 1:
        raise UsageError("--qmax must be at least 1")
    alpha, ea = _parse_real(args.alpha, args.digits)
    beta, eb = _parse_real(args.beta, args.digits)
    errs = [e for e in (ea, eb) if e is not None]
    report = littlewood_corollary_check(alpha, beta, args.qmax, error=max(errs) if errs else None)
    _emit(args, report.as_json())
    return EXIT_OK if report.passed else EXIT_FALSIFIED


def cmd_verify_lemmas(args) -> int:
    dims = _int_list(args.dims)
    if any(d < 2 for d in dims) or args.count < 0:
        raise UsageError("dimensions must be at least 2 and --count non-negative")
    results = []
    for d in dims:
        rng = random.Random(f"{args.seed}:bodies:{d}")
        bodies = [("cube", Parallelepiped.from_box(AxisBox.cube(d)))]
        bodies += [(f"random-{i}", random_parallelepiped(rng, d)) for i in range(args.count)]
        for name, body in bodies:
            rep = check_wedge_lemma(body, trials=args.trials, seed=args.seed)
            results.append(dict(rep.as_json(), body=name, all_pass=rep.all_pass))
    ok = all(r["all_pass"] for r in results)
    _emit(args, {"bodies": len(results), "all_pass": ok, "reports": results})
    return EXIT_OK if ok else EXIT_FALSIFIED


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="transference-lab",
                                description="Multiplicative Diophantine transference laboratory.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--revalidate", metavar="FILE", help="re-check a stored certificate")
    sub = p.add_subparsers(dest="command")

    def common(sp, seed=False):
        sp.add_argument("--out", help="write output (with manifest) to this file")
        sp.add_argument("--threads", type=int, default=None,
                        help=f"worker processes (fallback ${THREADS_ENV}); never changes results")
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("delta", help="table of Delta_d with bound checks")
    sp.add_argument("--dmax", type=int, default=30)
    sp.add_argument("--mc-samples", type=int, default=0)
    common(sp, seed=True)
    sp.set_defaults(func=cmd_delta)

    sp = sub.add_parser("section", help="central section volume of a box or parallelepiped")
    sp.add_argument("--direction", required=True, help="normal vector e, e.g. 1,1,1")
    sp.add_argument("--half-sides", help="box half-sides (default all 1)")
    sp.add_argument("--basis", help="rows of A separated by ';' for M = A Box")
    sp.add_argument("--mode", choices=["exact", "montecarlo"], default="exact")
    sp.add_argument("--samples", type=int, default=1_000_000)
    common(sp, seed=True)
    sp.set_defaults(func=cmd_section)

    sp = sub.add_parser("scan", help="best approximation records over sup-norm shells")
    sp.add_argument("--theta", required=True)
    sp.add_argument("--sup-bound", type=int, required=True)
    sp.add_argument("--norm", choices=["mult", "sup"], default="mult")
    sp.add_argument("--time-limit", type=float, default=None)
    common(sp)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("transfer", help="constructive transference certificate")
    sp.add_argument("--theta")
    sp.add_argument("--pair", help="x1,...,xm:y1,...,yn")
    sp.add_argument("--mahler", action="store_true", help="sup-norm theorem instead")
    sp.add_argument("--X", help="explicit X (default: tight)")
    sp.add_argument("--U", help="explicit U (default: tight)")
    sp.add_argument("--certificate-out")
    sp.add_argument("--revalidate", metavar="FILE")
    common(sp)
    sp.set_defaults(func=cmd_transfer)

    sp = sub.add_parser("psi-transfer", help="phi (or chi) from an approximation function psi")
    sp.add_argument("--spec", required=True, help="power:G | log1 | log2 | table:FILE")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--eval", help="comma separated points s")
    sp.add_argument("--chi", action="store_true", help="ordinary transfer chi (n = 1)")
    common(sp)
    sp.set_defaults(func=cmd_psi_transfer)

    sp = sub.add_parser("exponents", help="exponent estimates, or 'map' for the calculus")
    sp.add_argument("mode", nargs="?", choices=["map"])
    sp.add_argument("--records")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--tail", type=float, default=0.5)
    sp.add_argument("--gamma")
    sp.add_argument("--which", choices=["dyson", "german", "tr-beta", "beta-from-mbeta"],
                    default="dyson")
    common(sp)
    sp.set_defaults(func=cmd_exponents)

    sp = sub.add_parser("littlewood", help="Littlewood products and the mu^(1/4) transfer")
    sp.add_argument("--alpha", default="sqrt:2", help="p/q or sqrt:N")
    sp.add_argument("--beta", default="sqrt:3", help="p/q or sqrt:N")
    sp.add_argument("--qmax", type=int, default=10 ** 6)
    sp.add_argument("--digits", type=int, default=40)
    common(sp)
    sp.set_defaults(func=cmd_littlewood)

    sp = sub.add_parser("verify-lemmas", help="section-dual lemma suite")
    sp.add_argument("--dims", default="2,3")
    sp.add_argument("--count", type=int, default=100, help="random bodies per dimension")
    sp.add_argument("--trials", type=int, default=200)
    common(sp, seed=True)
    sp.set_defaults(func=cmd_verify_lemmas)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    args._started = datetime.now(timezone.utc).isoformat()
    try:
        if args.command is None:
            if args.revalidate:
                return _revalidate(args.revalidate)
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InconclusiveError, PrecisionGuardError) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
