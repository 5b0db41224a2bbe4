"""Command-line entry point: ``pirac <subcommand> [flags]``.

Exit codes: 0 success, 1 parameter error, 2 feasibility-guard error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import bounds, covercode, designs, pirsim
from ._accel import backend_name
from .gf2core import BitMatrix

log = logging.getLogger("pirac")

EXIT_OK, EXIT_PARAM, EXIT_GUARD = 0, 1, 2


class ParamError(ValueError):
    pass


def _write(out, text: str) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x) -> str:
    return bounds.round_half_up(x, 3)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_tables(args) -> int:
    if args.n is None or args.n < 2 or args.eps < 1:
        raise ParamError("tables needs --n >= 2 and --eps >= 1")
    header = ["K", "Omega", "Delta", "DeltaPrime"]
    plain = bounds.tajeddine_table(args.n, args.eps, with_gcd=False)
    improved = bounds.gcd_improved_rows(args.n, args.eps)
    rows1 = [[t.K, _fmt(t.omega), _fmt(t.delta), _fmt(t.delta_prime)] for t in plain]
    rows2 = [[t.K, _fmt(t.omega), _fmt(t.delta), _fmt(t.delta_prime)] for t in improved]
    text1 = _csv(header, rows1)
    if args.n == 3 and args.eps == 1:
        text1 += f"# note: {bounds.SMALL_CASE_NOTE}\n"
    if args.format == "json":
        payload = {"table1": [dict(zip(header, r)) for r in rows1],
                   "table2": [dict(zip(header, r)) for r in rows2]}
        _write(args.out, json.dumps(payload, indent=2) + "\n")
        return EXIT_OK
    if args.out in (None, "-"):
        sys.stdout.write(text1 + "\n" + _csv(header, rows2))
        return EXIT_OK
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "table1.csv").write_text(text1)
    (out / "table2.csv").write_text(_csv(header, rows2))
    return EXIT_OK


def cmd_curve(args) -> int:
    try:
        samples = bounds.curve_samples(args.beta_min, args.beta_max, args.steps)
    except ValueError as exc:
        raise ParamError(str(exc)) from exc
    if args.format == "json":
        _write(args.out, json.dumps([{"beta": b, "alpha": a} for b, a in samples]) + "\n")
    else:
        _write(args.out, _csv(["beta", "alpha"], [[repr(b), repr(a)] for b, a in samples]))
    return EXIT_OK


def _matrix_from_spec(spec: str) -> BitMatrix:
    kind, _, arg = spec.partition(":")
    if kind in ("hamming", "ext-hamming") and arg:
        m = int(arg)
        return covercode.hamming_parity(m) if kind == "hamming" else covercode.extended_hamming_parity(m)
    path = Path(spec)
    if not path.exists():
        raise ParamError(f"code spec {spec!r} is neither hamming:m, ext-hamming:m nor a file")
    text = path.read_text()
    first = next((ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")), "")
    if " " in first.strip():
        return covercode.code_from_text(text).H
    return BitMatrix.from_text(text)


def cmd_coset_weights(args) -> int:
    H = _matrix_from_spec(args.code)
    bound = H.nrows
    rows = []
    for tau in range(1, args.tau_max + 1):
        rows.append([tau, covercode.max_tau_coset_weight(H, tau), bound])
    header = ["tau", "R_tau", "n_minus_k"]
    if args.format == "json":
        _write(args.out, json.dumps([dict(zip(header, r)) for r in rows]) + "\n")
    else:
        _write(args.out, _csv(header, rows))
    return EXIT_OK


def _backend(spec: str, scheme: str, N: int, M: int):
    info = pirsim.scheme_info(scheme)
    r = info.strings_per_server(N, M)
    kind, _, arg = spec.partition(":")
    if spec == "identity":
        return None
    if spec == "sum-augmented":
        return covercode.build_code(covercode.sum_augmented_identity(r))
    if spec == "restricted-example3":
        if scheme != "bep" or N != 3 or M != 3:
            raise ParamError("restricted-example3 needs --scheme bep --n 3 --m 3")
        return designs.design_code(designs.eleven_combination_design())
    if kind in ("hamming", "ext-hamming") and arg:
        code = covercode.build_code(_matrix_from_spec(spec))
    elif Path(spec).exists():
        code = covercode.load_code(spec)
    else:
        raise ParamError(f"unknown backend {spec!r}")
    if code.r != r:
        raise ParamError(f"backend has r={code.r} but {scheme} stores {r} strings per server")
    return code


def _database(args, M: int, L: int) -> pirsim.Database:
    if args.db_file:
        return pirsim.Database.from_bytes(Path(args.db_file).read_bytes(), M, L)
    return pirsim.Database.random(M, L, args.db_seed if args.db_seed is not None else args.seed)


def cmd_simulate(args) -> int:
    scheme = args.scheme
    if scheme not in pirsim.SCHEMES:
        raise ParamError(f"--scheme must be one of {', '.join(pirsim.SCHEMES)}")
    N = {"two-server": 2, "mds32": 3}.get(scheme, args.n)
    if N is None or N < 2:
        raise ParamError(f"{scheme} needs --n >= 2")
    if args.m is None or args.m < 1:
        raise ParamError("--m >= 1 is required")
    parts = {"two-server": 1, "mds32": 2}.get(scheme, N - 1)
    L = args.l if args.l is not None else 2 * parts
    if L % parts:
        raise ParamError(f"--l must be divisible by {parts} for {scheme}")
    code = _backend(args.backend, scheme, N, args.m)
    db = _database(args, args.m, L)
    summary = pirsim.run_trials(scheme, N, db, code, trials=args.trials, seed=args.seed)
    result = summary.to_dict()
    result["backend"] = args.backend
    result["backend_radius"] = None if code is None else code.radius
    if args.format == "json":
        _write(args.out, json.dumps(result, indent=2) + "\n")
    else:
        keys = list(result)
        _write(args.out, _csv(keys, [["" if result[k] is None else result[k] for k in keys]]))
    return EXIT_OK


def cmd_search(args) -> int:
    try:
        res = covercode.search_codes(args.length, args.r, args.radius, args.budget, args.seed)
    except covercode.TableLimitError:
        raise
    except ValueError as exc:
        raise ParamError(str(exc)) from exc
    if res.code is not None:
        text = res.code.to_text()
        log.info("found radius-%d code after %d attempts", res.code.radius, res.attempts)
    else:
        text = (f"# no code found: length={args.length} r={args.r} "
                f"radius<={args.radius} attempts={res.attempts}\n")
        log.info("search failed after %d attempts", res.attempts)
    if args.format == "json":
        text = json.dumps({
            "found": res.code is not None,
            "attempts": res.attempts,
            "code": None if res.code is None else res.code.to_text(),
        }, indent=2) + "\n"
    _write(args.out, text)
    return EXIT_OK


def cmd_tuple(args) -> int:
    if args.n is None:
        raise ParamError("--n is required")
    if args.k is not None:
        t = bounds.tajeddine_tuple(args.n, args.k, args.eps, with_gcd=not args.no_gcd)
    elif args.p is not None and args.q is not None:
        t = bounds.memory_sharing_tuple(args.n, args.p, args.q, args.eps)
    else:
        raise ParamError("give --k, or --p and --q")
    row = {"N": args.n, "Omega": str(t.omega), "Delta": repr(t.delta), "eps": args.eps}
    if args.format == "json":
        _write(args.out, json.dumps(row) + "\n")
    else:
        _write(args.out, _csv(list(row), [list(row.values())]))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output file (directory for tables); stdout if omitted")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="pirac", description="Access complexity of PIR schemes via covering codes.")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tables", parents=[common], help="rate/access tables for MDS-coded PIR")
    t.add_argument("--n", type=int, default=10)
    t.add_argument("--eps", type=float, default=1.0)
    t.set_defaults(func=cmd_tables)

    c = sub.add_parser("curve", parents=[common], help="samples of alpha = f(beta)")
    c.add_argument("--beta-min", type=float, default=1.0)
    c.add_argument("--beta-max", type=float, default=10.0)
    c.add_argument("--steps", type=int, default=91)
    c.set_defaults(func=cmd_curve)

    w = sub.add_parser("coset-weights", parents=[common], help="maximum tau-coset weights of a code")
    w.add_argument("--code", required=True, help="hamming:m, ext-hamming:m, or a matrix/code file")
    w.add_argument("--tau-max", type=int, default=3)
    w.set_defaults(func=cmd_coset_weights)

    s = sub.add_parser("simulate", parents=[common], help="run a PIR scheme and measure access")
    s.add_argument("--scheme", required=True, choices=pirsim.SCHEMES)
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--m", type=int, default=None)
    s.add_argument("--l", type=int, default=None)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--backend", default="identity",
                   help="identity, sum-augmented, hamming:m, ext-hamming:m, restricted-example3, or a code file")
    s.add_argument("--db-seed", type=int, default=None)
    s.add_argument("--db-file", default=None, help="raw binary database of M*L bits")
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("search", parents=[common], help="random search for a covering code")
    r.add_argument("--length", type=int, required=True)
    r.add_argument("--r", type=int, required=True)
    r.add_argument("--radius", type=int, required=True)
    r.add_argument("--budget", type=int, default=10**4)
    r.set_defaults(func=cmd_search)

    u = sub.add_parser("tuple", parents=[common], help="one achievable (Omega, Delta, eps) tuple")
    u.add_argument("--n", type=int, default=None)
    u.add_argument("--k", type=int, default=None)
    u.add_argument("--p", type=int, default=None)
    u.add_argument("--q", type=int, default=None)
    u.add_argument("--eps", type=float, default=1.0)
    u.add_argument("--no-gcd", action="store_true")
    u.set_defaults(func=cmd_tuple)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    log.debug("kernel backend: %s", backend_name())
    try:
        return args.func(args)
    except (covercode.FeasibilityError, covercode.TableLimitError) as exc:
        print(f"pirac: feasibility guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ParamError, ValueError) as exc:
        print(f"pirac: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
