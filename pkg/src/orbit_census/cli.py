"""Command-line front end: censuses, statistics, validation, benchmarks.

Every subcommand writes exactly one plot-ready artifact, named
``<subcommand>_n<N>_p<P>.<fmt>`` unless ``--out`` overrides it, and prints a
one-line summary.  CSV artifacts start with the schema line
``# orbit-census v1`` followed by the full parameter set as ``# key=value``
comments (worker count included), so identical flags yield byte-identical
files.  JSON artifacts mirror the same fields; the ``validate`` and
``baker-check`` reports are bare JSON arrays of
``{check, params, residual, tolerance, pass}`` objects.

Exit codes: 0 success, 1 usage, 2 capacity, 3 validation failure,
4 numerical rounding failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import asymptotics, baker, census, graph, kernels, spectral, words
from .errors import CapacityError, OrbitCensusError, ParameterError
from .words import EdgeCountVector

__all__ = ["main", "load_census"]

_SCHEMA = "orbit-census v1"

_CENSUS_COLUMNS = ["n", "p", "engine", "vector", "size_words", "size_necklaces"]
_MOMENT_COLUMNS = ["n", "p", "k", "level", "exact", "exact_log2", "asymptotic_log2", "ratio"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


# ---------------------------------------------------------------- formatting


def _fmt_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Fraction):
        return repr(float(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _write_text(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def _write_table(path: Path, fmt: str, columns: list[str], rows: list[dict], params: dict) -> None:
    if fmt == "csv":
        lines = [f"# {_SCHEMA}"]
        for key in sorted(params):
            lines.append(f"# {key}={_fmt_cell(params[key])}")
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_fmt_cell(row[c]) for c in columns))
        _write_text(path, "\n".join(lines) + "\n")
    else:
        payload = {
            "schema": _SCHEMA,
            "params": _jsonable(params),
            "columns": columns,
            "rows": [_jsonable(row) for row in rows],
        }
        _write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _write_checks(path: Path, checks: list[dict]) -> None:
    _write_text(path, json.dumps(_jsonable(checks), sort_keys=True, indent=2) + "\n")


def _artifact_path(args, stem: str) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    return Path(f"{stem}.{getattr(args, 'format', 'csv')}")


def _resolve_workers(args) -> int:
    w = getattr(args, "workers", None)
    if w is None:
        env = os.environ.get("ORBIT_CENSUS_WORKERS")
        if env is not None:
            try:
                w = int(env)
            except ValueError:
                raise ParameterError(f"ORBIT_CENSUS_WORKERS must be an integer, got {env!r}")
        else:
            w = os.cpu_count() or 1
    if w < 1:
        raise ParameterError(f"worker count must be >= 1, got {w}")
    kernels.set_workers(w)
    return w


def _parse_int_list(text: str, what: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ParameterError(f"{what} must be a comma-separated integer list, got {text!r}")
    if not vals:
        raise ParameterError(f"{what} list is empty")
    return vals


def _parse_fraction_list(text: str, what: str) -> list[Fraction]:
    try:
        vals = [Fraction(x.strip()) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ParameterError(f"{what} must be a comma-separated numeric list, got {text!r}")
    if not vals:
        raise ParameterError(f"{what} list is empty")
    return vals


def _build_table(args) -> census.CensusTable:
    if args.engine == "brute":
        return census.brute_census(
            args.n, args.p, prime_only=args.prime_only, backend=args.backend
        )
    return census.best_census(
        args.n, args.p, prime_only=args.prime_only, backend=args.backend
    )


def _census_rows(table: census.CensusTable) -> list[dict]:
    return [
        {
            "n": table.n,
            "p": table.p,
            "engine": table.engine,
            "vector": str(r.vector),
            "size_words": r.size_words,
            "size_necklaces": r.size_necklaces,
        }
        for r in table.records
    ]


def load_census(path: str | Path) -> census.CensusTable:
    """Re-load a census artifact (CSV or JSON) into a CensusTable."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    params: dict[str, str] = {}
    rows: list[dict] = []
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        payload = json.loads(text)
        params = {k: str(v) for k, v in payload.get("params", {}).items()}
        rows = payload["rows"]
    else:
        header: list[str] | None = None
        for line in text.splitlines():
            if not line.strip():
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, val = body.partition("=")
                    params[key.strip()] = val
                continue
            cells = line.split(",")
            if header is None:
                header = cells
                continue
            rows.append(dict(zip(header, cells)))
    if not rows:
        raise ParameterError(f"no census rows found in {path}")
    records = []
    n = p = None
    engine = "brute"
    for row in rows:
        n = int(row["n"])
        p = int(row["p"])
        engine = str(row["engine"])
        vec = EdgeCountVector.from_string(p, str(row["vector"]))
        neck_raw = row.get("size_necklaces")
        neck = None if neck_raw in (None, "") else int(neck_raw)
        records.append(
            census.CensusRecord(
                vector=vec, size_words=int(row["size_words"]), size_necklaces=neck
            )
        )
    records.sort(key=lambda r: r.vector.counts)
    prime_only = params.get("prime_only", "false").strip().lower() in ("true", "1")
    return census.CensusTable(
        n=n, p=p, engine=engine, prime_only=prime_only, records=tuple(records)
    )


# --------------------------------------------------------------- subcommands


def _common_params(args, workers: int, **extra) -> dict:
    params = {"command": args.command, "workers": workers}
    for key in ("n", "p", "engine", "format", "prime_only", "backend"):
        if hasattr(args, key):
            params[key] = getattr(args, key)
    params.update(extra)
    return {k: v for k, v in params.items() if v is not None}


def _cmd_census(args) -> int:
    workers = _resolve_workers(args)
    table = _build_table(args)
    rows = _census_rows(table)
    path = _artifact_path(args, f"census_n{args.n}_p{args.p}")
    _write_table(path, args.format, _CENSUS_COLUMNS, rows, _common_params(args, workers))
    cmax = max(r.size_words for r in table.records)
    z2 = census.moments(table, 2, level="word")
    print(f"clusters={table.n_clusters} |C_max|={cmax} Z_2={z2}")
    print(f"wrote {path}")
    return 0


def _moment_rows(table: census.CensusTable, ks: list[int], level: str) -> list[dict]:
    rows = []
    for k in ks:
        exact = census.moments(table, k, level=level)
        e_log2 = asymptotics.exact_log2(exact)
        a_log2 = asymptotics.asymptotic_Zk(table.n, table.p, k).log2_value
        if level == "necklace":
            a_log2 -= k * math.log2(table.n)
        rows.append(
            {
                "n": table.n,
                "p": table.p,
                "k": k,
                "level": level,
                "exact": exact,
                "exact_log2": e_log2,
                "asymptotic_log2": a_log2,
                "ratio": 2.0 ** (e_log2 - a_log2),
            }
        )
    return rows


def _cmd_moments(args) -> int:
    workers = _resolve_workers(args)
    ks = _parse_int_list(args.k, "--k")
    table = _build_table(args)
    rows = _moment_rows(table, ks, args.level)
    path = _artifact_path(args, f"moments_n{args.n}_p{args.p}")
    _write_table(
        path,
        args.format,
        _MOMENT_COLUMNS,
        rows,
        _common_params(args, workers, k=args.k, level=args.level),
    )
    summary = " ".join(f"Z_{r['k']}={r['exact']}" for r in rows[:3])
    print(f"level={args.level} {summary}")
    print(f"wrote {path}")
    return 0


def _cmd_distribution(args) -> int:
    workers = _resolve_workers(args)
    table = _build_table(args)
    points = census.empirical_distribution(table, bins=args.bins)
    rows = [
        {
            "t": float(t),
            "empirical": float(emp),
            "theoretical": asymptotics.P_theory(float(t), args.p),
        }
        for t, emp in points
    ]
    path = _artifact_path(args, f"distribution_n{args.n}_p{args.p}")
    _write_table(
        path,
        args.format,
        ["t", "empirical", "theoretical"],
        rows,
        _common_params(args, workers, bins=args.bins),
    )
    sup = max(abs(r["empirical"] - r["theoretical"]) for r in rows)
    print(f"bins={args.bins} sup_gap={sup:.6f}")
    print(f"wrote {path}")
    return 0


def _cmd_anisotropy(args) -> int:
    workers = _resolve_workers(args)
    if (args.k is None) == (args.thresholds is None):
        raise _UsageError("anisotropy needs exactly one of --k or --thresholds")
    table = _build_table(args)
    rows = []
    if args.k is not None:
        ks = _parse_int_list(args.k, "--k")
        for k in ks:
            vals = census.mean_edge_visits(table, k)
            for a, v in enumerate(vals):
                rows.append({"edge": a, "k_or_t": float(k), "value": float(v)})
        extra = {"k": args.k}
    else:
        thresholds = _parse_fraction_list(args.thresholds, "--thresholds")
        for t in thresholds:
            vals = census.thresholded_edge_visits(table, t)
            for a, v in enumerate(vals):
                rows.append({"edge": a, "k_or_t": float(t), "value": float(v)})
        extra = {"thresholds": args.thresholds}
    path = _artifact_path(args, f"anisotropy_n{args.n}_p{args.p}")
    _write_table(
        path,
        args.format,
        ["edge", "k_or_t", "value"],
        rows,
        _common_params(args, workers, **extra),
    )
    print(f"rows={len(rows)} mean_target={args.n / 2**args.p}")
    print(f"wrote {path}")
    return 0


def _cmd_max_cluster(args) -> int:
    workers = _resolve_workers(args)
    table = _build_table(args)
    rec = census.max_cluster(table)
    rows = [
        {
            "n": table.n,
            "p": table.p,
            "engine": table.engine,
            "vector": str(rec.vector),
            "size_words": rec.size_words,
            "size_necklaces": rec.size_necklaces,
        }
    ]
    path = _artifact_path(args, f"max-cluster_n{args.n}_p{args.p}")
    _write_table(path, args.format, _CENSUS_COLUMNS, rows, _common_params(args, workers))
    a_log2 = asymptotics.asymptotic_max_cluster(args.n, args.p, "word").log2_value
    ratio = 2.0 ** (asymptotics.exact_log2(rec.size_words) - a_log2)
    print(f"vector={rec.vector} size_words={rec.size_words} ratio_to_asymptotic={ratio:.6f}")
    print(f"wrote {path}")
    return 0


def _cmd_count_clusters(args) -> int:
    workers = _resolve_workers(args)
    count = graph.count_admissible(args.n, args.p, backend=args.backend)
    rows = [{"n": args.n, "p": args.p, "clusters": count}]
    path = _artifact_path(args, f"count-clusters_n{args.n}_p{args.p}")
    _write_table(
        path, args.format, ["n", "p", "clusters"], rows, _common_params(args, workers)
    )
    print(f"clusters={count}")
    print(f"wrote {path}")
    return 0


def _check_payload(checks) -> list[dict]:
    return [
        {
            "check": c.check,
            "params": c.params,
            "residual": c.residual,
            "tolerance": c.tolerance,
            "pass": c.passed,
        }
        for c in checks
    ]


def _cmd_validate(args) -> int:
    _resolve_workers(args)
    checks = spectral.validation_suite(args.p)
    payload = _check_payload(checks)
    path = Path(args.out) if args.out else Path(f"validate_p{args.p}.json")
    _write_checks(path, payload)
    failed = [c for c in checks if not c.passed]
    print(f"checks={len(checks)} passed={len(checks) - len(failed)} failed={len(failed)}")
    print(f"wrote {path}")
    if failed:
        for c in failed:
            print(
                f"FAIL {c.check} {c.params}: residual {c.residual:.3e} > {c.tolerance:.1e}",
                file=sys.stderr,
            )
        return 3
    return 0


def _cmd_fourier(args) -> int:
    workers = _resolve_workers(args)
    ks = _parse_int_list(args.k, "--k")
    grid = args.grid if args.grid is not None else args.n + 1
    rows = []
    for k in ks:
        exact = spectral.fourier_moment(args.n, args.p, k, L=grid, backend=args.backend)
        e_log2 = asymptotics.exact_log2(exact)
        a_log2 = asymptotics.asymptotic_Zk(args.n, args.p, k).log2_value
        rows.append(
            {
                "n": args.n,
                "p": args.p,
                "k": k,
                "level": "word",
                "exact": exact,
                "exact_log2": e_log2,
                "asymptotic_log2": a_log2,
                "ratio": 2.0 ** (e_log2 - a_log2),
            }
        )
    path = _artifact_path(args, f"fourier_n{args.n}_p{args.p}")
    _write_table(
        path,
        args.format,
        _MOMENT_COLUMNS,
        rows,
        _common_params(args, workers, k=args.k, grid=grid),
    )
    print(" ".join(f"Z_{r['k']}={r['exact']}" for r in rows))
    print(f"wrote {path}")
    return 0


def _cmd_baker_check(args) -> int:
    _resolve_workers(args)
    if args.n > 14:
        raise CapacityError(
            f"exhaustive orbit-pair verification supports n <= 14, got n={args.n}"
        )
    if not 2 <= args.p <= args.n:
        raise ParameterError(f"need 2 <= p <= n, got n={args.n} p={args.p}")
    pool = list(words.enumerate_necklaces(args.n))
    close_pairs = 0
    failures = 0
    for i, a in enumerate(pool):
        for b in pool[i:]:
            if words.p_close(a.word, b.word, args.p):
                close_pairs += 1
                report = baker.p_neighborhood_check(a, b, args.p)
                if not report.matched:
                    failures += 1
    payload = [
        {
            "check": "symbolic-to-metric-neighborhood",
            "params": {"n": args.n, "p": args.p, "close_pairs": close_pairs},
            "residual": float(failures),
            "tolerance": 0.0,
            "pass": failures == 0,
        }
    ]
    path = Path(args.out) if args.out else Path(f"baker-check_n{args.n}_p{args.p}.json")
    _write_checks(path, payload)
    print(f"close_pairs={close_pairs} failures={failures}")
    print(f"wrote {path}")
    return 3 if failures else 0


def _bench_targets(args) -> list[tuple[str, Callable[[str], np.ndarray]]]:
    n = args.n
    p = args.p
    n_words = min(n, 20)
    width = max(1, n_words.bit_length())
    basis_u, basis_v = graph.flow_basis(p).as_arrays()

    def run_keys(lane: str) -> np.ndarray:
        return kernels.word_window_keys(n_words, p, 0, 1 << n_words, width, backend=lane)

    def run_canon(lane: str) -> np.ndarray:
        canon, period = kernels.canonical_period(n_words, 0, 1 << n_words, backend=lane)
        return canon.astype(np.int64) * 1000 + period.astype(np.int64)

    def run_slab(lane: str) -> np.ndarray:
        blocks = [
            kernels.admissible_slab(n, p, f0, basis_u, basis_v, backend=lane)
            for f0 in range(n + 1)
        ]
        blocks = [b for b in blocks if b.size]
        return np.concatenate(blocks, axis=0)

    def run_trace(lane: str) -> np.ndarray:
        dim = 1 << (p - 1)
        w0 = np.zeros((dim, dim), np.complex128)
        w1 = np.zeros((dim, dim), np.complex128)
        for i in range(dim):
            w0[i, i >> 1] = 1.0
            w1[i, (dim >> 1) + (i >> 1)] = 1.0
        L = max(3, min(n + 1, 13))
        out = kernels.trace_grid(w0, w1, n, L, phase_rows=True, backend=lane)
        return np.stack([out.real, out.imag])

    return [
        ("word_window_keys", run_keys),
        ("canonical_period", run_canon),
        ("admissible_slab", run_slab),
        ("trace_grid", run_trace),
    ]


def _cmd_bench(args) -> int:
    workers = _resolve_workers(args)
    lanes = ["numba", "numpy"] if kernels.HAS_NUMBA else ["numpy"]
    if not kernels.HAS_NUMBA:
        print("numba unavailable: timing the numpy lane only")
    rows = []
    for name, fn in _bench_targets(args):
        results = {}
        timings = {}
        for lane in lanes:
            fn(lane)  # warm-up (JIT compile / cache touch)
            best = math.inf
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                out = fn(lane)
                best = min(best, time.perf_counter() - t0)
            results[lane] = np.asarray(out, dtype=np.float64)
            timings[lane] = best
        diff = 0.0
        if len(lanes) == 2:
            a, b = results["numba"], results["numpy"]
            diff = float(np.max(np.abs(a - b))) if a.shape == b.shape else math.inf
        for lane in lanes:
            rows.append(
                {
                    "kernel": name,
                    "backend": lane,
                    "seconds": timings[lane],
                    "max_abs_diff_vs_numpy": diff if lane == "numba" else 0.0,
                }
            )
    path = Path(args.out) if args.out else Path(f"bench_n{args.n}_p{args.p}.json")
    payload = {
        "schema": _SCHEMA,
        "params": _jsonable(_common_params(args, workers, repeat=args.repeat)),
        "rows": rows,
    }
    _write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    width = max(len(r["kernel"]) for r in rows)
    for r in rows:
        print(
            f"{r['kernel']:<{width}}  {r['backend']:<5}  {r['seconds']*1e3:10.3f} ms"
            f"  diff={r['max_abs_diff_vs_numpy']:.3e}"
        )
    print(f"wrote {path}")
    return 0


# -------------------------------------------------------------------- parser


def _add_common(sp, n_required: bool = True, engine: bool = True) -> None:
    sp.add_argument("--n", type=int, required=n_required, help="word length")
    sp.add_argument("--p", type=int, required=True, help="pattern length")
    if engine:
        sp.add_argument(
            "--engine", choices=("brute", "best"), default="best", help="census engine"
        )
        sp.add_argument(
            "--prime-only",
            dest="prime_only",
            action="store_true",
            help="necklace statistics over full-period orbits only",
        )
    sp.add_argument("--out", help="output path (default <subcommand>_n<N>_p<P>.<fmt>)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--workers", type=int, default=None, help="parallel worker count")
    sp.add_argument(
        "--backend",
        choices=("numba", "numpy"),
        default=None,
        help="kernel lane override (default: ORBIT_CENSUS_BACKEND or auto)",
    )


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="orbit-census",
        description=(
            "Exact censuses of p-close periodic-orbit clusters on binary "
            "de Bruijn graphs, with asymptotic validation."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("census", help="full cluster census at (n, p)")
    _add_common(sp)
    sp.set_defaults(handler=_cmd_census)

    sp = sub.add_parser("moments", help="exact moments Z_k with asymptotic ratios")
    _add_common(sp)
    sp.add_argument("--k", default="2,3,4,5", help="comma-separated moment orders")
    sp.add_argument("--level", choices=("word", "necklace"), default="word")
    sp.set_defaults(handler=_cmd_moments)

    sp = sub.add_parser("distribution", help="cluster-size distribution P̂(t) vs theory")
    _add_common(sp)
    sp.add_argument("--bins", type=int, default=100)
    sp.set_defaults(handler=_cmd_distribution)

    sp = sub.add_parser("anisotropy", help="size-weighted mean edge visits")
    _add_common(sp)
    sp.add_argument("--k", default=None, help="comma-separated moment weights")
    sp.add_argument("--thresholds", default=None, help="comma-separated size thresholds")
    sp.set_defaults(handler=_cmd_anisotropy)

    sp = sub.add_parser("max-cluster", help="the largest cluster and its vector")
    _add_common(sp)
    sp.set_defaults(handler=_cmd_max_cluster)

    sp = sub.add_parser("count-clusters", help="number of admissible vectors")
    _add_common(sp, engine=False)
    sp.set_defaults(handler=_cmd_count_clusters)

    sp = sub.add_parser("validate", help="matrix identity suite as a JSON report")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--out", help="output path (default validate_p<P>.json)")
    sp.add_argument("--workers", type=int, default=None)
    sp.set_defaults(handler=_cmd_validate, command="validate")

    sp = sub.add_parser("fourier", help="moments via exact discrete phase-grid sums")
    _add_common(sp, engine=False)
    sp.add_argument("--k", default="2", help="comma-separated moment orders")
    sp.add_argument("--grid", type=int, default=None, help="grid points per axis (default n+1)")
    sp.set_defaults(handler=_cmd_fourier)

    sp = sub.add_parser("baker-check", help="exhaustive symbolic-to-metric orbit check")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--out", help="output path (default baker-check_n<N>_p<P>.json)")
    sp.add_argument("--workers", type=int, default=None)
    sp.set_defaults(handler=_cmd_baker_check, command="baker-check")

    sp = sub.add_parser("bench", help="time the numba and numpy kernel lanes")
    _add_common(sp, engine=False)
    sp.add_argument("--repeat", type=int, default=3)
    sp.set_defaults(handler=_cmd_bench)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    try:
        return args.handler(args)
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except OrbitCensusError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
