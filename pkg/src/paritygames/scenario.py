"""Scenario files, report emission, and the command line interface.

A scenario is a JSON file (``schema_version`` 1) naming either a packaged
strategy, a raw single-system preparation/program/measurement, or a
randomized sweep.  Running one produces a line-delimited report (one JSON
object per line) with every game term, every surviving dual term, the
algebraic order and the particle witness per point, plus an optional CSV
projection.  Reports are byte-deterministic for a fixed scenario and
seed; wall time goes to a sibling ``.timing.json`` so reruns stay
identical.

Exit codes: 0 success, 1 verification mismatch, 2 parse failure,
3 dimension cap exceeded, 4 invariant violation during simulation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from . import games, quantum, strategies
from .numkit import DitString
from .quantum import DimensionCapError

SCHEMA_VERSION = 1
THREADS_ENV_VAR = "PARITY_THREADS"

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_PARSE = 2
EXIT_DIMENSION = 3
EXIT_INVARIANT = 4


class ScenarioError(ValueError):
    """A scenario file failed to parse or validate against the schema."""


# ---------------------------------------------------------------------------
# parsing

def _require(mapping, key, where):
    try:
        return mapping[key]
    except (KeyError, TypeError):
        raise ScenarioError(f"{where}: missing required field {key!r}")


def parse_complex_matrix(data, where="matrix") -> np.ndarray:
    """Rectangular matrix with entries encoded as [re, im] pairs."""
    try:
        rows = [[complex(float(entry[0]), float(entry[1])) for entry in row]
                for row in data]
    except (TypeError, ValueError, IndexError):
        raise ScenarioError(f"{where}: entries must be [re, im] pairs")
    mat = np.array(rows, dtype=complex)
    if mat.ndim != 2:
        raise ScenarioError(f"{where}: not a matrix")
    return mat


def load_scenario(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    version = _require(doc, "schema_version", "scenario")
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported schema_version {version}")
    _require(doc, "name", "scenario")
    modes = [key for key in ("strategy", "raw", "sweep") if key in doc]
    if len(modes) != 1:
        raise ScenarioError(
            "scenario must contain exactly one of strategy/raw/sweep")
    return doc


# ---------------------------------------------------------------------------
# point construction and execution

def _raw_point(raw) -> dict:
    m = int(_require(raw, "m", "raw"))
    d = int(_require(raw, "d", "raw"))
    internal_dim = int(raw.get("internal_dim", 1))
    hilbert = quantum.PathedHilbert(1, m, (internal_dim,))
    prep_data = _require(raw, "prep", "raw")
    if isinstance(prep_data, dict) and "vector" in prep_data:
        vec = parse_complex_matrix([prep_data["vector"]], "raw.prep")[0]
        prep = quantum.pure_state(hilbert, vec)
    else:
        prep = quantum.DensityState(
            hilbert, parse_complex_matrix(prep_data, "raw.prep"))
    boxes_data = _require(_require(raw, "program", "raw"), "boxes",
                          "raw.program")
    boxes = []
    for i, per_input in enumerate(boxes_data):
        if len(per_input) != d:
            raise ScenarioError(f"raw.program box {i}: one Kraus list per "
                                f"input value (expected {d})")
        boxes.append(tuple(
            tuple(parse_complex_matrix(op, f"raw.program box {i}")
                  for op in ops)
            for ops in per_input))
    program = quantum.BoxProgram(m, d, internal_dim, tuple(boxes))
    effects = tuple(parse_complex_matrix(e, "raw.povm")
                    for e in _require(raw, "povm", "raw"))
    povm = quantum.Povm(effects)
    return {"label": "raw", "m": m, "d": d,
            "dist": lambda: quantum.run_experiment(prep, program, povm, d, m)}


def _strategy_points(spec) -> list:
    kind = _require(spec, "kind", "strategy")
    if kind == "binary_phase":
        strat = strategies.binary_phase_strategy()
        return [{"label": "binary_phase", "m": 2, "d": 2, "k": 1,
                 "dist": strat.distribution}]
    if kind == "dary_phase":
        d = int(_require(spec, "d", "strategy"))
        nu = DitString(d, _require(spec, "nu", "strategy"))
        strat = strategies.dary_phase_strategy(d, nu)
        return [{"label": "dary_phase", "m": 2, "d": d, "k": 1,
                 "dist": strat.distribution}]
    if kind == "classical_counting":
        k = int(_require(spec, "k", "strategy"))
        m = int(_require(spec, "m", "strategy"))
        d = int(_require(spec, "d", "strategy"))
        strat = strategies.classical_counting_strategy(k, m, d)
        return [{"label": "classical_counting", "m": m, "d": d, "k": k,
                 "dist": strat.distribution}]
    if kind == "uniform":
        m = int(_require(spec, "m", "strategy"))
        d = int(_require(spec, "d", "strategy"))
        return [{"label": "uniform", "m": m, "d": d,
                 "dist": lambda: games.uniform_distribution(m, d)}]
    if kind == "random_single_system":
        m = int(_require(spec, "m", "strategy"))
        d = int(_require(spec, "d", "strategy"))
        internal_dim = int(spec.get("internal_dim", 2))
        seeds = [int(s) for s in _require(spec, "seeds", "strategy")]
        points = []
        for seed in seeds:
            points.append({"label": "random_single_system", "m": m, "d": d,
                           "k": 1, "seed": seed,
                           "dist": _random_single_system_runner(
                               m, d, internal_dim, seed)})
        return points
    raise ScenarioError(f"unknown strategy kind {kind!r}")


def _random_single_system_runner(m, d, internal_dim, seed):
    def run():
        rng = np.random.default_rng(seed)
        hilbert = quantum.PathedHilbert(1, m, (internal_dim,))
        prep = quantum.random_density_state(hilbert, rng)
        program = quantum.random_box_program(m, d, internal_dim, rng)
        family = [quantum.modulo_average_state(prep, program,
                                               DitString.ones(m, d), s)
                  for s in range(d)]
        povm = strategies.pretty_good_measurement(family, [1.0 / d] * d)
        return quantum.run_experiment(prep, program, povm, d, m)
    return run


def _sweep_points(sweep, seed_override) -> list:
    kind = _require(sweep, "kind", "sweep")
    if kind != "additivity_pairs":
        raise ScenarioError(f"unknown sweep kind {kind!r}")
    d_values = [int(v) for v in _require(sweep, "d_values", "sweep")]
    pairs_per_d = int(_require(sweep, "pairs_per_d", "sweep"))
    base_seed = int(sweep.get("base_seed", 0))
    if seed_override is not None:
        base_seed = int(seed_override)
    boxes = int(sweep.get("boxes_per_side", 2))
    points = []
    index = 0
    for d in d_values:
        for pair in range(pairs_per_d):
            points.append({"label": "additivity_pair", "d": d,
                           "m": 2 * boxes, "pair_index": pair,
                           "seed": base_seed + index,
                           "boxes_per_side": boxes})
            index += 1
    return points


def _execute_additivity_point(point) -> dict:
    rng = np.random.default_rng(point["seed"])
    d = point["d"]
    boxes = point["boxes_per_side"]
    pair = strategies.random_additivity_pair(d, rng, boxes_per_side=boxes,
                                             per_input=False)
    q_a = games.win_probability(pair.dist_a,
                                games.GameSpec(boxes, d, pair.nu_a))
    q_b = games.win_probability(pair.dist_b,
                                games.GameSpec(boxes, d, pair.nu_b))
    composed = strategies.compose_modulo_strategies(pair.dist_a, pair.dist_b)
    bound = strategies.additivity_lower_bound(q_a, q_b, d)
    nu = pair.composed_weights()
    value = games.interference_term(
        composed, games.GameSpec(composed.m, d, nu, k=2))
    extras = {"nu": list(nu.digits), "q_a": q_a, "q_b": q_b, "bound": bound,
              "composed_interference": value,
              "bound_satisfied": bool(value >= bound - 1e-9)}
    return _analyze(composed, point, extras)


def _analyze(dist, point, extras=None, game_block=None,
             report_cfg=None) -> dict:
    cfg = report_cfg or {}
    report = games.interference_report(
        dist,
        max_game_terms=int(cfg.get("max_game_terms", 1024)),
        dual_floor=float(cfg.get("dual_floor", 1e-12)))
    witness = strategies.particle_number_witness(dist)
    row = {"schema_version": SCHEMA_VERSION, "label": point["label"],
           "m": dist.m, "d": dist.d}
    for key in ("seed", "pair_index", "k"):
        if key in point:
            row[key] = point[key]
    if game_block is not None:
        nu = DitString(dist.d, game_block["nu"])
        spec = games.GameSpec(dist.m, dist.d, nu,
                              k=int(game_block.get("k", 1)))
        row["game"] = {
            "nu": list(nu.digits),
            "win_probability": games.win_probability(dist, spec),
            "interference": games.interference_term(dist, spec)}
    row["game_terms"] = [
        {"nu": list(digits), "interference": float(value)}
        for digits, value in report.game_terms.items()]
    row["dual_terms"] = [
        {"nu": list(digits), "b": b, "re": value.real, "im": value.imag,
         "abs": abs(value)}
        for (digits, b), value in report.dual_terms.items()]
    row["algebraic_order"] = report.algebraic_order
    row["witness"] = {"detected_order": witness.detected_order,
                      "particle_lower_bound": witness.particle_lower_bound}
    if extras:
        row.update(extras)
    return row


def execute_scenario(doc, seed_override=None, threads: int = 1) -> list:
    """Run every point of a parsed scenario; rows come back in order."""
    report_cfg = doc.get("report", {})
    game_block = doc.get("game")

    def run_point(point):
        if point["label"] == "additivity_pair":
            return _execute_additivity_point(point)
        return _analyze(point["dist"](), point, game_block=game_block,
                        report_cfg=report_cfg)

    if "sweep" in doc:
        points = _sweep_points(doc["sweep"], seed_override)
    elif "raw" in doc:
        points = [_raw_point(doc["raw"])]
    else:
        points = _strategy_points(doc["strategy"])
        if seed_override is not None:
            for offset, point in enumerate(points):
                if "seed" in point:
                    point["seed"] = int(seed_override) + offset
                    if point["label"] == "random_single_system":
                        point["dist"] = _random_single_system_runner(
                            point["m"], point["d"],
                            int(doc["strategy"].get("internal_dim", 2)),
                            point["seed"])

    threads = max(1, int(threads))
    if threads == 1 or len(points) == 1:
        return [run_point(p) for p in points]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run_point, points))


def _to_jsonable(value):
    if isinstance(value, dict):
        return {k: _to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_jsonable(v) for v in value]
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    return value


def write_report(rows, out_dir, name, csv: bool = False) -> dict:
    """Write the JSONL report (and optional CSV projection); return paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / f"{name}.report.jsonl"
    with open(report_path, "w", encoding="ascii") as fh:
        for row in rows:
            fh.write(json.dumps(_to_jsonable(row), ensure_ascii=True))
            fh.write("\n")
    paths = {"report": report_path}
    if csv:
        csv_path = out / f"{name}.report.csv"
        with open(csv_path, "w", encoding="ascii") as fh:
            fh.write("m,d,nu,b,abs_dual,interference\n")
            for row in rows:
                game_by_nu = {tuple(t["nu"]): t["interference"]
                              for t in row["game_terms"]}
                for term in row["dual_terms"]:
                    digits = tuple(term["nu"])
                    game = game_by_nu.get(digits)
                    fh.write("{},{},{},{},{!r},{}\n".format(
                        row["m"], row["d"], "-".join(map(str, digits)),
                        term["b"], float(term["abs"]),
                        "" if game is None else repr(float(game))))
        paths["csv"] = csv_path
    return paths


# ---------------------------------------------------------------------------
# verification

def _values_match(a, b, tol: float) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return abs(float(a) - float(b)) <= tol
    if isinstance(a, dict) and isinstance(b, dict):
        return (a.keys() == b.keys()
                and all(_values_match(a[k], b[k], tol) for k in a))
    if isinstance(a, list) and isinstance(b, list):
        return (len(a) == len(b)
                and all(_values_match(x, y, tol) for x, y in zip(a, b)))
    return a == b


def verify_report(rows, golden_path, tol: float = 1e-9) -> list:
    """Fieldwise comparison against a golden JSONL; returns mismatch notes."""
    try:
        lines = Path(golden_path).read_text(encoding="ascii").splitlines()
        golden = [json.loads(line) for line in lines if line.strip()]
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot load golden report: {exc}")
    problems = []
    if len(rows) != len(golden):
        problems.append(f"row count {len(rows)} != golden {len(golden)}")
        return problems
    for i, (row, want) in enumerate(zip(rows, golden)):
        fresh = json.loads(json.dumps(_to_jsonable(row)))
        if fresh.keys() != want.keys():
            problems.append(f"row {i}: field sets differ")
            continue
        for key in fresh:
            if not _values_match(fresh[key], want[key], tol):
                problems.append(f"row {i}: field {key!r} differs")
    return problems


# ---------------------------------------------------------------------------
# bundled scenarios

def bundled_scenario_dir():
    return resources.files("paritygames") / "scenarios"


def list_bundled_scenarios() -> list:
    root = bundled_scenario_dir()
    return sorted(p.name for p in root.iterdir()
                  if p.name.endswith(".scenario"))


def bundled_scenario_path(name: str):
    if not name.endswith(".scenario"):
        name = name + ".scenario"
    return bundled_scenario_dir() / name


# ---------------------------------------------------------------------------
# command line

def _resolve_threads(flag_value) -> int:
    env = os.environ.get(THREADS_ENV_VAR)
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise ScenarioError(
                f"{THREADS_ENV_VAR} must be an integer, got {env!r}")
    return max(1, int(flag_value)) if flag_value else 1


def _cmd_run(args) -> int:
    doc = load_scenario(args.scenario)
    threads = _resolve_threads(args.threads)
    started = time.perf_counter()
    rows = execute_scenario(doc, seed_override=args.seed, threads=threads)
    elapsed = time.perf_counter() - started
    csv = bool(doc.get("report", {}).get("csv", False))
    paths = write_report(rows, args.out, doc["name"], csv=csv)
    timing_path = Path(args.out) / f"{doc['name']}.timing.json"
    timing_path.write_text(json.dumps(
        {"schema_version": SCHEMA_VERSION, "scenario": doc["name"],
         "points": len(rows), "threads": threads,
         "wall_time_seconds": elapsed}) + "\n", encoding="ascii")
    print(f"wrote {paths['report']} ({len(rows)} rows, "
          f"{elapsed:.2f}s, threads={threads})")
    return EXIT_OK


def _cmd_verify(args) -> int:
    doc = load_scenario(args.scenario)
    threads = _resolve_threads(args.threads)
    rows = execute_scenario(doc, threads=threads)
    problems = verify_report(rows, args.golden, tol=args.tol)
    if problems:
        for note in problems[:20]:
            print(f"MISMATCH {note}")
        print(f"verify FAILED: {len(problems)} mismatching fields")
        return EXIT_MISMATCH
    print(f"verify OK: {len(rows)} rows within {args.tol}")
    return EXIT_OK


def _cmd_list(_args) -> int:
    for name in list_bundled_scenarios():
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paritygames",
        description="Run and verify parity/modulo game scenarios.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a scenario and write reports")
    run.add_argument("scenario", help="path to a .scenario JSON file")
    run.add_argument("--out", default=".", help="output directory")
    run.add_argument("--seed", type=int, default=None,
                     help="override the scenario's base seed")
    run.add_argument("--threads", type=int, default=1,
                     help=f"worker threads (env {THREADS_ENV_VAR} overrides)")
    run.set_defaults(func=_cmd_run)

    verify = sub.add_parser("verify",
                            help="re-run a scenario and compare to a golden")
    verify.add_argument("scenario")
    verify.add_argument("golden")
    verify.add_argument("--tol", type=float, default=1e-9)
    verify.add_argument("--threads", type=int, default=1)
    verify.set_defaults(func=_cmd_verify)

    ls = sub.add_parser("list-scenarios", help="list bundled scenarios")
    ls.set_defaults(func=_cmd_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DimensionCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
