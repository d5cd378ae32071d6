"""Command-line front end.

Every subcommand reads a tensor JSON file and writes a report object::

    {"command": ..., "inputs": {...}, "parameters": {...},
     "results": {...}, "timing_ms": ...}

Only ``timing_ms`` varies between identical invocations. Exit codes: 0 on
success, 2 for usage or input errors, 3 when a solver fails, 4 when the
input lies outside the class an operation handles, 5 otherwise.
"""
import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import charpoly, nnapprox, rankone, spectral
from .tensor import SymTensor, TensorFormatError, asarray, hs_norm, is_exact, loads, symmetrize

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_OUT_OF_CLASS = 4
EXIT_OTHER = 5

# fixed seed offsets for subsystems driven by the single --seed
_SEED_OFFSETS = {"approx": 0, "deflate": 0}


class OutOfClass(Exception):
    pass


class UsageError(Exception):
    pass


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        # -0.0 and 0.0 are the same result
        return x + 0.0
    return x


def _read_input(path):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    try:
        T = loads(raw.decode("utf-8"))
    except UnicodeDecodeError:
        raise UsageError(f"{path}: not UTF-8 text")
    except TensorFormatError as exc:
        raise UsageError(f"{path}: {exc}")
    return T, {"path": path, "sha256": hashlib.sha256(raw).hexdigest()}


def _pair_json(p):
    return {"lambda": p.lam, "vectors": [list(u) for u in p.vectors], "residual": p.residual}


def _kkt_json(rep):
    return {"max_equality_violation": rep.max_equality_violation,
            "max_inequality_violation": rep.max_inequality_violation,
            "witness": list(rep.witness) if rep.witness else None}


def cmd_approx(T, args):
    A = asarray(T).astype(float)
    seed = args.seed + _SEED_OFFSETS["approx"]
    if args.rank > 1 and not args.nonneg:
        raise UsageError("--rank above 1 is only supported with --nonneg")
    if args.nonneg and np.any(A < 0):
        raise OutOfClass("--nonneg needs a tensor with nonnegative entries")
    if args.rank == 1 and not args.nonneg:
        res = rankone.best_rank_one(A, restarts=args.restarts, seed=seed, tol=args.tol)
        pair = res.pair()
        return {
            "rank": 1,
            "factors": [[list(pair.vectors)]],
            "scale": res.scale,
            "residual": res.residual,
            "kkt": {"max_stationarity_violation": rankone.kkt_check_rank_one(A, pair)},
            "tied_classes": res.n_tied,
            "classes": [_pair_json(c) for c in res.classes],
        }
    if args.rank == 1:
        res = rankone.nonneg_best_rank_one(A, restarts=args.restarts, seed=seed, tol=args.tol)
        F = nnapprox.NNFactors.from_terms([tuple(res.scale ** (1 / A.ndim) * u for u in res.vectors)])
        residual = hs_norm(A - F.tensor())
        extra = {"tied_classes": res.n_tied,
                 "classes": [_pair_json(c) for c in res.classes]}
    else:
        fit = nnapprox.anls(A, args.rank, restarts=args.restarts, seed=seed, tol=args.tol)
        F, residual = fit
        if not fit.converged and not nnapprox.kkt_verify(A, F).passes(1e-6 * hs_norm(A)):
            raise rankone.ConvergenceError("anls did not reach a KKT point", fit)
        extra = {}
    w = nnapprox.residual_positive_witness(A, F)
    out = {
        "rank": args.rank,
        "factors": [[list(u) for u in term] for term in F.terms()],
        "terms": F.r,
        "residual": residual,
        "kkt": _kkt_json(nnapprox.kkt_verify(A, F)),
        "positive_residual_witness": None if w is None else {"index": list(w[0]), "value": w[1]},
    }
    out.update(extra)
    return out


def _certifiable(T, args):
    A = asarray(T)
    if A.shape != (2, 2, 2):
        raise OutOfClass(
            f"certification covers symmetric 2x2x2 tensors only (binary cubics); got shape "
            f"{'x'.join(map(str, A.shape))}")
    if args.symmetric:
        return symmetrize(A)
    try:
        return SymTensor(A)
    except ValueError:
        raise OutOfClass("certification needs a symmetric tensor (pass --symmetric to "
                         "symmetrize the input first)")


def cmd_certify(T, args):
    S = _certifiable(T, args)
    cert = charpoly.certify_unique(S, args.backend)
    out = cert.report()
    out["error_bound"] = cert.error_bound
    out["nonnegative"] = cert.nonnegative
    return out


def cmd_charpoly(T, args):
    S = _certifiable(T, args)
    backend = args.backend
    if backend == "rational" and not is_exact(S):
        S = SymTensor(np.vectorize(Fraction, otypes=[object])(asarray(S)))
    psi = charpoly.salmon_char_poly(S, backend)
    return {"psi": [charpoly._fmt(c) for c in psi.coeffs], "degree": psi.degree,
            "backend": backend}


def cmd_pairs(T, args):
    A = asarray(T).astype(float)
    kw = {"tol": args.tol}
    if args.grid is not None:
        kw["grid_density"] = args.grid
    if args.mode == "singular":
        inv = spectral.enumerate_singular_pairs(A, **kw)
        classes = [_pair_json(c) for c in inv.classes]
    else:
        if A.ndim < 2 or len(set(A.shape)) != 1 or not spectral.is_symmetric(A):
            raise OutOfClass("eigenpairs are defined for symmetric tensors only")
        inv = spectral.enumerate_eigenpairs(A, **kw)
        classes = [{"lambda": c.lam, "vector": list(c.vector), "residual": c.residual}
                   for c in inv.classes]
    return {"mode": args.mode, "count": len(inv), "classes": classes, "flat": inv.flat,
            "seeds": inv.seeds, "dropped": inv.dropped, "grid_density": inv.grid_density,
            "tolerance": inv.tolerance}


def cmd_deflate(T, args):
    A = asarray(T).astype(float)
    seed = args.seed + _SEED_OFFSETS["deflate"]
    if A.ndim < 2 or np.any(A <= 0):
        raise OutOfClass("the deflation experiment needs a strictly positive tensor")
    return nnapprox.compare_deflation(A, restarts=args.restarts, seed=seed).report()


def build_parser():
    p = argparse.ArgumentParser(prog="tenscert", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("input", help="tensor JSON file")
        sp.add_argument("--out", help="write the report here instead of stdout")

    a = sub.add_parser("approx", help="best rank-one or nonnegative rank-r approximation")
    common(a)
    a.add_argument("--rank", type=_positive_int, default=1)
    a.add_argument("--nonneg", action="store_true")
    a.add_argument("--restarts", type=_positive_int, default=32)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--tol", type=_positive_float, default=1e-12)

    c = sub.add_parser("certify", help="discriminant test for a unique best rank-one approximation")
    common(c)
    c.add_argument("--symmetric", action="store_true", help="symmetrize the input first")
    c.add_argument("--backend", choices=("rational", "float"), default="rational")

    q = sub.add_parser("pairs", help="enumerate singular pairs or eigenpairs")
    common(q)
    q.add_argument("--mode", choices=("singular", "eigen"), default="singular")
    q.add_argument("--grid", type=_positive_int, default=None)
    q.add_argument("--tol", type=_positive_float, default=1e-10)

    f = sub.add_parser("deflate", help="sequential deflation against the joint rank-2 fit")
    common(f)
    f.add_argument("--restarts", type=_positive_int, default=64)
    f.add_argument("--seed", type=int, default=0)

    h = sub.add_parser("charpoly", help="characteristic polynomial of a symmetric 2x2x2 tensor")
    common(h)
    h.add_argument("--symmetric", action="store_true", help="symmetrize the input first")
    h.add_argument("--backend", choices=("rational", "float"), default="rational")
    return p


_COMMANDS = {"approx": cmd_approx, "certify": cmd_certify, "pairs": cmd_pairs,
             "deflate": cmd_deflate, "charpoly": cmd_charpoly}


def _parameters(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "input", "out")}


def _fail(code, msg):
    print(f"tenscert: error: {msg}", file=sys.stderr)
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    start = time.perf_counter()
    try:
        T, digest = _read_input(args.input)
        results = _COMMANDS[args.command](T, args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, exc)
    except (OutOfClass, charpoly.CertificationError, spectral.DegenerateSpectrum,
            nnapprox.PreconditionError) as exc:
        return _fail(EXIT_OUT_OF_CLASS, exc)
    except (rankone.ConvergenceError, rankone.DegenerateContraction) as exc:
        return _fail(EXIT_SOLVER, exc)
    except Exception as exc:  # anything else is reported, not raised
        return _fail(EXIT_OTHER, f"{type(exc).__name__}: {exc}")
    report = {
        "command": args.command,
        "inputs": {"tensor": digest},
        "parameters": _parameters(args),
        "results": results,
        "timing_ms": round((time.perf_counter() - start) * 1000, 3),
    }
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            return _fail(EXIT_OTHER, f"cannot write {args.out}: {exc.strerror}")
    else:
        print(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
