"""Command-line entry point: checks, Moebius tools, band-limited witnesses and studies.

Stdout carries exactly one JSON document per invocation; logging goes to stderr.
Exit codes: 0 success, 2 invalid input or usage, 3 resource limit.
"""

import argparse
import asyncio
import json
import logging
import math
import sys
import time
from typing import Any, Awaitable, Callable, Dict, Optional, Sequence

from .errors import InvalidInput, ResourceLimit, ThetaPRError
from .experiments import (
    DEFAULT_TRIALS,
    ExperimentReport,
    run_determinant_study,
    run_genericity_study,
    run_minimality_study,
    run_moebius_invariance_study,
    run_oracle_equivalence_study,
    run_threshold_study,
    write_summary_csv,
)
from .expwitness import (
    GridSpec,
    build_lattice_witnesses,
    residual_report,
    write_csv,
)
from .moebius import INFINITY, PointAtInfinity, apply, arc_to_arc
from .phases import Arc, PhaseSet, cross_ratio
from .prcore import (
    ORACLES,
    c2_failure_witness,
    c2_oracle,
    c2_pr_oracle,
    decide_theta_pr,
    arc_count_lower_bound,
    has_complement_property,
    heinosaari_lower_bound,
    is_full_spark,
    verify_witness,
)
from .storage import (
    Config,
    Database,
    load_json_argument,
    moebius_to_json,
    parse_complex,
    parse_moebius,
    parse_phase_set,
    parse_system,
)
from .storage.formats import to_pair

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INVALID = 2
EXIT_RESOURCE = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thetapr", description="Decide and explore phase retrieval for restricted phase sets."
    )
    parser.add_argument("--tol", type=float, help="relative rank tolerance")
    parser.add_argument("--budget", type=int, help="maximum number of assignments to scan")
    parser.add_argument("--threads", type=int, help="worker threads for the engine and studies")
    parser.add_argument("--seed", type=int, help="seed for randomized studies")
    parser.add_argument("--log-level", help="logging level (DEBUG, INFO, WARNING, ...)")
    parser.add_argument("--ledger", action="store_true", help="record runs in the SQLite ledger")
    parser.add_argument("--timing", action="store_true", help="include elapsed times in reports")
    parser.add_argument("--config-dir", default="./config", help="directory holding presets.json")
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", help="decide Theta-PR for a finite system")
    check.add_argument("--system", required=True, help="system JSON, file path or preset")
    check.add_argument("--phases", required=True, help="phase-set JSON, file path or preset")

    c2 = commands.add_parser("oracle-c2", help="closed-form decision for G(a, b, c) in C^2")
    c2.add_argument("--a", required=True)
    c2.add_argument("--b", required=True)
    c2.add_argument("--c", required=True)
    c2.add_argument("--phases", help="phase set with 2 to 4 elements; omit for the whole circle")

    complement = commands.add_parser("complement", help="complement property of a system")
    complement.add_argument("--system", required=True)

    spark = commands.add_parser("spark", help="full-spark check")
    spark.add_argument("--system", required=True)

    moebius = commands.add_parser("moebius", help="Moebius transform utilities")
    moebius_commands = moebius.add_subparsers(dest="action", required=True)
    m_apply = moebius_commands.add_parser("apply", help="evaluate a map at a point")
    m_apply.add_argument("--map", required=True, help='{"matrix": [[re, im] x 4]}')
    m_apply.add_argument("--z", required=True, help='point as "[re, im]", "re,im", "1+2i" or "inf"')
    m_arc = moebius_commands.add_parser("arc-map", help="circle automorphism between two arcs")
    m_arc.add_argument("--from", dest="source", nargs=2, type=float, required=True,
                       metavar=("START", "LENGTH"))
    m_arc.add_argument("--to", dest="target", nargs=2, type=float, required=True,
                       metavar=("START", "LENGTH"))
    m_arc.add_argument("--degrees", action="store_true", help="angles are in degrees")
    m_cr = moebius_commands.add_parser("cross-ratio", help="cross ratio of four points")
    m_cr.add_argument("--points", nargs=4, required=True)
    m_cr.add_argument("--map", help="also report the cross ratio of the mapped points")

    expwitness = commands.add_parser("expwitness", help="band-limited lattice witnesses")
    expwitness.add_argument("--n", type=int, required=True)
    expwitness.add_argument("--alpha", type=float, required=True)
    expwitness.add_argument("--grid-points", type=int)
    expwitness.add_argument("--grid-half-width", type=float)
    expwitness.add_argument("--count", type=int, default=8, help="lattice points per class")
    expwitness.add_argument("--csv", help="write the sampled witnesses to this CSV file")

    experiment = commands.add_parser("experiment", help="seeded randomized studies")
    studies = experiment.add_subparsers(dest="study", required=True)
    threshold = studies.add_parser("threshold")
    threshold.add_argument("--d", type=int, required=True)
    threshold.add_argument("--regime", choices=["2d-2", "2d-1"], required=True)
    genericity = studies.add_parser("genericity")
    genericity.add_argument("--d", type=int, required=True)
    genericity.add_argument("--m", type=int, required=True)
    minimality = studies.add_parser("minimality")
    minimality.add_argument("--d", type=int, required=True)
    invariance = studies.add_parser("invariance")
    invariance.add_argument("--d", type=int, required=True)
    invariance.add_argument("--m", type=int, required=True)
    invariance.add_argument("--identity", action="store_true", help="use the identity map")
    equivalence = studies.add_parser("equivalence")
    equivalence.add_argument("--oracle", choices=sorted(ORACLES), required=True)
    equivalence.add_argument("--d", type=int, required=True)
    equivalence.add_argument("--m", type=int, required=True)
    determinant = studies.add_parser("determinant")
    determinant.add_argument("--d", type=int, required=True)
    for study in (threshold, genericity, minimality, invariance, equivalence, determinant):
        study.add_argument("--phases", required=True)
        study.add_argument("--trials", type=int)
        study.add_argument("--verbose", action="store_true", help="include per-trial outcomes")
        study.add_argument("--csv", help="write a CSV summary to this file")

    bound = commands.add_parser("bound", help="lower bounds on the number of vectors")
    bound.add_argument("--d", type=int, required=True)

    history = commands.add_parser("history", help="recent runs from the ledger")
    history.add_argument("--kind", choices=["decision", "experiment"], default="decision")
    history.add_argument("--limit", type=int, default=20)
    history.add_argument("--group-by", help="aggregate by this column instead of listing runs")
    return parser


def _pair_or_infinity(z: Any) -> Any:
    return "infinity" if isinstance(z, PointAtInfinity) else to_pair(z)


class ThetaPRCli:
    """Dispatches one parsed command and writes its JSON result."""

    def __init__(self, args: argparse.Namespace, config: Optional[Config] = None):
        self.args = args
        self.config = config or Config(args.config_dir)
        self.database: Optional[Database] = None
        if args.ledger or self.config.is_ledger_enabled():
            self.database = Database(self.config.get_database_path())
        self.options = self.config.engine_options(
            rank_tol=args.tol, assignment_budget=args.budget, threads=args.threads
        )
        self.seed = args.seed if args.seed is not None else self.config.settings.seed

    def _phases(self, text: str) -> PhaseSet:
        return parse_phase_set(load_json_argument(text, self.config.phase_preset))

    def _system(self, text: str) -> Any:
        return parse_system(load_json_argument(text))

    async def run(self) -> str:
        """Execute the command; returns the JSON text for stdout."""
        if self.database is not None:
            await self.database.initialize()
        handlers: Dict[str, Callable[[], Awaitable[Any]]] = {
            "check": self._handle_check,
            "oracle-c2": self._handle_oracle_c2,
            "complement": self._handle_complement,
            "spark": self._handle_spark,
            "moebius": self._handle_moebius,
            "expwitness": self._handle_expwitness,
            "experiment": self._handle_experiment,
            "bound": self._handle_bound,
            "history": self._handle_history,
        }
        result = await handlers[self.args.command]()
        if isinstance(result, str):
            return result
        return json.dumps(result, indent=2)

    async def _handle_check(self) -> Dict[str, Any]:
        G = self._system(self.args.system)
        T = self._phases(self.args.phases)
        report = decide_theta_pr(G, T, self.options)
        result = report.to_dict(include_timing=self.args.timing)
        result["metadata"]["threads"] = self.options.threads
        if report.witness is not None:
            result["witness_verified"] = verify_witness(G, T, report.witness, self.options.tolerance)
        if self.database is not None:
            await self.database.log_decision(
                command="check",
                d=G.d,
                m=G.m,
                phase_count=len(T),
                does_pr=report.does_pr,
                assignments_checked=report.assignments_checked,
                elapsed_ms=report.elapsed * 1000.0,
                metadata={"total_assignments": report.total_assignments},
            )
        return result

    async def _handle_oracle_c2(self) -> Dict[str, Any]:
        a, b, c = (parse_complex(v) for v in (self.args.a, self.args.b, self.args.c))
        result: Dict[str, Any] = {"a": to_pair(a), "b": to_pair(b), "c": to_pair(c)}
        if self.args.phases is None:
            result.update({"phase_set": "circle", "does_pr": c2_pr_oracle(a, b, c)})
            return result
        T = self._phases(self.args.phases)
        does_pr = c2_oracle(a, b, c, T)
        result.update({"phase_count": len(T), "does_pr": does_pr})
        if not does_pr and len(T) == 4:
            try:
                result["witness"] = c2_failure_witness(a, b, c, T).to_dict()
            except InvalidInput:
                # coincident parameters fail without a cross-ratio witness
                result["witness"] = None
        return result

    async def _handle_complement(self) -> Dict[str, Any]:
        G = self._system(self.args.system)
        holds = has_complement_property(G, self.options.tolerance)
        return {"d": G.d, "m": G.m, "complement_property": holds, "fails_2pr": not holds}

    async def _handle_spark(self) -> Dict[str, Any]:
        G = self._system(self.args.system)
        return {"d": G.d, "m": G.m, "full_spark": is_full_spark(G, self.options.tolerance)}

    async def _handle_moebius(self) -> Dict[str, Any]:
        action = self.args.action
        if action == "apply":
            M = parse_moebius(load_json_argument(self.args.map))
            text = self.args.z.strip().lower()
            z = INFINITY if text in ("inf", "infinity") else parse_complex(self.args.z)
            return {"map": moebius_to_json(M), "z": _pair_or_infinity(z),
                    "value": _pair_or_infinity(apply(M, z))}
        if action == "arc-map":
            convert = math.radians if self.args.degrees else float
            A = Arc(*(convert(v) for v in self.args.source))
            B = Arc(*(convert(v) for v in self.args.target))
            M = arc_to_arc(A, B)
            images = [M(z) for z in A.endpoints()]
            errors = [
                abs(w - target) if not isinstance(w, PointAtInfinity) else math.inf
                for w, target in zip(images, B.endpoints())
            ]
            return {"map": moebius_to_json(M), "endpoint_error": max(errors)}
        points = [parse_complex(p) for p in self.args.points]
        result: Dict[str, Any] = {"cross_ratio": to_pair(cross_ratio(*points))}
        if self.args.map:
            M = parse_moebius(load_json_argument(self.args.map))
            mapped = [apply(M, z) for z in points]
            if any(isinstance(w, PointAtInfinity) for w in mapped):
                raise InvalidInput("the map sends one of the points to infinity")
            result["mapped_cross_ratio"] = to_pair(cross_ratio(*mapped))
        return result

    async def _handle_expwitness(self) -> Dict[str, Any]:
        n, alpha = self.args.n, self.args.alpha
        if n < 2 or not alpha > 0:
            raise InvalidInput(f"need n >= 2 and alpha > 0, got n={n}, alpha={alpha}")
        default = GridSpec.for_lattice(
            n, alpha, points=self.args.grid_points or self.config.settings.grid_points
        )
        grid = GridSpec(
            points=default.points, half_width=self.args.grid_half_width or default.half_width
        )
        bundle = build_lattice_witnesses(n, alpha, grid)
        report = residual_report(bundle, self.args.count)
        if self.args.csv:
            with open(self.args.csv, "w", newline="", encoding="utf-8") as f:
                write_csv(bundle.xs, f)
            report["csv"] = self.args.csv
        return report

    async def _handle_experiment(self) -> str:
        args = self.args
        study = args.study
        T = self._phases(args.phases)
        trials = args.trials or self.config.default_trials(study, DEFAULT_TRIALS[study])
        options, seed = self.options, self.seed
        if study == "threshold":
            report = run_threshold_study(args.d, args.regime, T, trials, seed, options, args.verbose)
        elif study == "genericity":
            report = run_genericity_study(args.d, args.m, T, trials, seed, options, args.verbose)
        elif study == "minimality":
            _, report = run_minimality_study(args.d, T, trials, seed, options, args.verbose)
        elif study == "invariance":
            report = run_moebius_invariance_study(
                args.d, args.m, T, trials, seed, options, args.identity, args.verbose
            )
        elif study == "equivalence":
            report = run_oracle_equivalence_study(
                args.oracle, args.d, args.m, T, trials, seed, options, args.verbose
            )
        else:
            report = run_determinant_study(args.d, T, trials, seed, args.verbose)
        if args.csv:
            with open(args.csv, "w", newline="", encoding="utf-8") as f:
                write_summary_csv([report], f)
        await self._log_experiment(report)
        return report.to_json(include_timing=self.args.timing)

    async def _log_experiment(self, report: ExperimentReport) -> None:
        if self.database is None:
            return
        c = report.config
        await self.database.log_experiment(
            study=c.study,
            d=c.d,
            m=c.m,
            phase_count=len(c.phases),
            trials=c.trials,
            seed=c.seed,
            pass_count=report.pass_count,
            fail_count=report.fail_count,
            mismatches=report.mismatches,
            expectation_met=report.expectation_met,
            elapsed_ms=(report.elapsed or 0.0) * 1000.0,
            metadata=report.summary or None,
        )

    async def _handle_bound(self) -> Dict[str, Any]:
        d = self.args.d
        return {
            "d": d,
            "heinosaari_lower_bound": heinosaari_lower_bound(d),
            "arc_count_lower_bound": arc_count_lower_bound(d),
        }

    async def _handle_history(self) -> Any:
        database = self.database or Database(self.config.get_database_path())
        await database.initialize()
        if self.args.group_by:
            return await database.get_aggregated_stats(self.args.kind, self.args.group_by)
        return await database.get_runs(self.args.kind, self.args.limit)


def _error_payload(kind: str, error: Exception) -> str:
    return json.dumps({"error": kind, "message": str(error)}, indent=2)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_INVALID

    started = time.perf_counter()
    try:
        config = Config(args.config_dir)
        logging.basicConfig(
            level=(args.log_level or config.settings.log_level).upper(),
            stream=sys.stderr,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
        output = asyncio.run(ThetaPRCli(args, config).run())
    except ResourceLimit as e:
        logger.error(f"{args.command}: {e} (checked {e.checked} of {e.total})")
        print(_error_payload("ResourceLimit", e))
        return EXIT_RESOURCE
    except ValueError as e:
        logger.error(f"{args.command}: {e}")
        print(_error_payload(type(e).__name__ if isinstance(e, ThetaPRError) else "InvalidInput", e))
        return EXIT_INVALID
    except ThetaPRError as e:
        logger.error(f"{args.command}: {e}")
        print(_error_payload(type(e).__name__, e))
        return EXIT_ERROR
    except OSError as e:
        logger.error(f"{args.command}: {e}")
        print(_error_payload("OSError", e))
        return EXIT_ERROR

    print(output)
    logger.debug(f"{args.command} finished in {time.perf_counter() - started:.3f}s")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
