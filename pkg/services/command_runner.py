"""
Command Runner Service
Dispatches a RunConfig to the matching constructor or verifier and turns the
outcome into a report plus an exit code. Shared by the CLI, the batch mode
and the HTTP routes.
"""

import json
import logging
import random
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence

from pydantic import BaseModel, ValidationError

from config import settings
from models.reports import (
    BatchEntry,
    BatchOutcome,
    BatchSummary,
    JacobiReport,
    RunConfig,
    RunResult,
    ValueReport,
    Verdict,
    Witness,
)
from services.differential_operators import (
    alt_bracket,
    check_only_wronskian,
    delta_identity_check,
    parse_diffop_list,
    random_diffops,
    random_polynomial,
)
from services.finite_algebras import (
    ALGEBRAS,
    a2_wronskian_rep_check,
    check_structure_jacobi,
    find_threshold_counterexample,
    load_threshold_counterexample,
    random_skew_bracket,
    sl2_wronskian_rep_check,
)
from services.homotopy_checks import (
    certify_homotopy_jacobi,
    check_homotopy_jacobi,
    check_nkr_jacobi,
    check_zero_operator,
)
from services.jet_brackets import JetBracketSpec, box_bracket, check_cross_vanishing, jet_dimension, nambu_bracket
from services.koszul_complex import (
    ExteriorTensor,
    SpanBasis,
    closure_defect,
    koszul_differential,
    koszul_homology_rank,
    square_vanishes,
)
from services.operator_expressions import parse_operator
from services.skew_operators import SkewOp, TestSpace, rn_bracket
from services.wronskian_service import (
    FormalMonomial,
    conformal_weight,
    conformal_weight_check,
    formal_wronskian,
    generalized_wronskian,
    witt_bracket,
    witt_structure_constant,
    wronskian,
    wronskian_monomials,
)
from utils.errors import BudgetExceededError, ConfigError, NotClosedError
from utils.polynomial import Polynomial
from utils.text_parser import (
    parse_int_list,
    parse_laurent_list,
    parse_poly,
    parse_poly_list,
    parse_rational_list,
)

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3

# the single-variable weight grammar accepts both z and x
ONE_VARIABLE = {"z": 0, "x": 0}
Z_NAMES = ("z",)

# (outer, inner) arities exercised by delta-identities when none are given
DELTA_CASES = [(2, 2), (4, 2), (3, 2), (2, 3), (3, 3)]


def _require(value, flag: str):
    if value is None:
        raise ConfigError(f"--{flag} is required for this subcommand")
    return value


def _positive(value: Optional[int], flag: str, minimum: int = 1) -> int:
    value = _require(value, flag)
    if value < minimum:
        raise ConfigError(f"--{flag} must be at least {minimum}, got {value}")
    return value


class CommandRunner:
    """Runs subcommands and renders their reports"""

    def __init__(self):
        self.handlers: Dict[str, Callable[[RunConfig], BaseModel]] = {
            "wronskian": self.wronskian,
            "vander": self.vander,
            "witt": self.witt,
            "assoc-bracket": self.assoc_bracket,
            "only-wronskian": self.only_wronskian,
            "delta-identities": self.delta_identities,
            "jacobi": self.jacobi,
            "nkr": self.nkr,
            "jet-jacobi": self.jet_jacobi,
            "box": self.box,
            "nambu": self.nambu,
            "rn": self.rn,
            "koszul": self.koszul,
            "koszul-rank": self.koszul_rank,
            "finite": self.finite,
            "conformal": self.conformal,
            "dim-jets": self.dim_jets,
        }

    @property
    def subcommands(self) -> List[str]:
        return sorted(list(self.handlers) + ["batch"])

    # ------------------------------------------------------------------
    # entry points

    def run(self, config: RunConfig) -> RunResult:
        handler = self.handlers.get(config.command)
        if handler is None:
            message = (
                "batch runs from a manifest file, not a RunConfig"
                if config.command == "batch"
                else f"Unknown subcommand {config.command!r}"
            )
            logger.error(f"[RUN] {message}")
            return RunResult(exit_code=EXIT_CONFIG, error=message)

        logger.info(f"[RUN] {config.command}")
        try:
            report = handler(config)
        except BudgetExceededError as e:
            logger.warning(f"[RUN] {config.command}: {e}")
            return RunResult(exit_code=EXIT_BUDGET, error=str(e))
        except (ValueError, ValidationError) as e:
            logger.error(f"[RUN] {config.command}: {e}")
            return RunResult(exit_code=EXIT_CONFIG, error=str(e))

        passed = getattr(report, "passed", True)
        return RunResult(
            exit_code=EXIT_PASS if passed else EXIT_FAIL,
            report=report.model_dump(mode="json"),
        )

    def batch(
        self,
        entries: Sequence[BatchEntry],
        to_config: Callable[[List[str]], RunConfig],
    ) -> BatchSummary:
        """
        Run every manifest entry; an entry is ok when its verdict matches the
        expectation. Configuration errors and budget refusals never match.
        """
        warnings = []
        if not entries:
            warnings.append("manifest lists no checks")
            logger.warning("[BATCH] manifest lists no checks")

        results = []
        matched_failures = 0
        for entry in entries:
            try:
                result = self.run(to_config(entry.argv))
            except (ValueError, ValidationError) as e:
                result = RunResult(exit_code=EXIT_CONFIG, error=str(e))
            expected_code = EXIT_PASS if entry.expect == Verdict.PASS else EXIT_FAIL
            ok = result.exit_code == expected_code
            if ok and entry.expect == Verdict.FAIL:
                matched_failures += 1
            if not ok:
                logger.warning(f"[BATCH] {entry.name}: exit {result.exit_code}, expected {entry.expect.value}")
            results.append(
                BatchOutcome(
                    name=entry.name,
                    exit_code=result.exit_code,
                    expected=entry.expect,
                    ok=ok,
                    error=result.error,
                )
            )

        ok_count = sum(1 for r in results if r.ok)
        return BatchSummary(
            total=len(results),
            ok=ok_count,
            failed=len(results) - ok_count,
            expected_failures_matched=matched_failures,
            results=results,
            warnings=warnings,
        )

    @staticmethod
    def load_manifest(path: str) -> List[BatchEntry]:
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Unreadable manifest {path}: {e}") from e
        if not isinstance(data, dict) or not isinstance(data.get("checks", []), list):
            raise ConfigError(f"Manifest {path} must be an object with a 'checks' list")
        return [BatchEntry(**check) for check in data.get("checks", [])]

    # ------------------------------------------------------------------
    # rendering

    @staticmethod
    def render(payload: dict, fmt: str = "json") -> str:
        if fmt == "json":
            return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)
        lines = []
        for key in sorted(payload):
            value = payload[key]
            if isinstance(value, (dict, list)):
                value = json.dumps(value, sort_keys=True, ensure_ascii=False)
            lines.append(f"{key}: {value}")
        return "\n".join(lines)

    # ------------------------------------------------------------------
    # helpers

    @staticmethod
    def _seed(config: RunConfig) -> int:
        return settings.DEFAULT_SEED if config.seed is None else config.seed

    @staticmethod
    def _budget(config: RunConfig) -> Optional[int]:
        return None if config.sample is not None else settings.budget_or_default(config.budget)

    @staticmethod
    def _space(op: SkewOp, config: RunConfig, bound: int) -> TestSpace:
        degree = bound if config.deg is None else config.deg
        if degree < 0:
            raise ConfigError(f"--deg must be non-negative, got {degree}")
        return TestSpace(op.n, degree)

    @staticmethod
    def _operator(text: Optional[str], flag: str = "op") -> SkewOp:
        return parse_operator(_require(text, flag))

    # ------------------------------------------------------------------
    # wronskians

    def wronskian(self, config: RunConfig) -> ValueReport:
        args = parse_poly_list(_require(config.args, "args"), 1)
        if config.indices is not None:
            indices = parse_int_list(config.indices)
            value = generalized_wronskian(indices, args)
        else:
            indices = list(range(len(args)))
            value = wronskian(args)
        return ValueReport(
            command="wronskian",
            result=str(value),
            parameters={"args": [str(a) for a in args], "indices": indices},
        )

    def vander(self, config: RunConfig) -> ValueReport:
        exponents = parse_rational_list(_require(config.exponents, "exponents"))
        closed = wronskian_monomials(exponents)
        expanded = formal_wronskian([FormalMonomial(1, nu) for nu in exponents])
        notes = []
        agree = closed == expanded
        if all(nu.denominator == 1 and nu >= 0 for nu in exponents):
            polynomial = wronskian([Polynomial.monomial([int(nu)]) for nu in exponents])
            agree = agree and polynomial == closed.to_polynomial()
            notes.append("cross-checked against the polynomial Wronskian")
        return ValueReport(
            command="vander",
            result=closed.as_dict(),
            passed=agree,
            parameters={"exponents": [str(nu) for nu in exponents]},
            notes=notes,
        )

    def witt(self, config: RunConfig) -> ValueReport:
        indices = parse_int_list(_require(config.indices, "indices"))
        omega = witt_structure_constant(indices)
        coefficient, index = witt_bracket(indices)
        return ValueReport(
            command="witt",
            result={"omega": str(omega), "coefficient": str(coefficient), "index": str(index)},
            passed=coefficient == omega,
            parameters={"indices": indices},
        )

    def conformal(self, config: RunConfig) -> ValueReport:
        N = _positive(config.N, "N", 2)
        y = parse_poly(config.y or "x + x^2", 1)
        if config.phis is not None:
            phis = parse_poly_list(config.phis, 1)
        else:
            phis = [Polynomial.monomial([j]) for j in range(N)]
        truncation = config.truncation if config.truncation is not None else 8
        weight = conformal_weight(N) + config.weight_shift
        result = conformal_weight_check(N, y, phis, truncation, weight=weight)
        witness = None
        if not result.passed:
            witness = Witness(arguments=[str(p) for p in phis], value=str(result.residual), extra={"y": str(y)})
        return ValueReport(
            command="conformal",
            result={"lhs": str(result.lhs), "rhs": str(result.rhs), "weight": result.weight},
            passed=result.passed,
            certificate_degree=result.certified_degree,
            parameters={
                "N": N,
                "y": str(y),
                "truncation": truncation,
                "expected_weight": result.expected_weight,
                "weight_shift": config.weight_shift,
            },
            notes=[] if config.weight_shift == 0 else ["perturbed weight: negative control"],
            witness=witness,
        )

    # ------------------------------------------------------------------
    # associative differential operators

    def assoc_bracket(self, config: RunConfig) -> ValueReport:
        n = config.n or 1
        ops = parse_diffop_list(_require(config.ops, "ops"), n)
        bracket = alt_bracket(ops)
        return ValueReport(
            command="assoc-bracket",
            result=bracket.as_dict(),
            parameters={"n": n, "ops": [op.to_string() for op in ops], "bracket": bracket.to_string()},
        )

    def only_wronskian(self, config: RunConfig) -> ValueReport:
        N = _positive(config.N, "N", 2)
        p = _positive(config.p, "p")
        seed = self._seed(config)
        if config.args is not None:
            weights = parse_laurent_list(config.args, 1, aliases=ONE_VARIABLE)
        else:
            rng = random.Random(seed)
            weights = [random_polynomial(rng, 1, 3) for _ in range(N)]
        result = check_only_wronskian(N, p, weights)
        notes = [f"normalization {result.normalization}"]
        if not result.tail.is_zero:
            notes.append(f"lower-order tail {result.tail.to_string()}")
        witness = None
        if not result.passed:
            witness = Witness(
                arguments=[w.to_string(Z_NAMES) for w in weights],
                value=result.residual.to_string(),
                extra={},
            )
        return ValueReport(
            command="only-wronskian",
            result={
                "bracket": result.bracket.as_dict(),
                "wronskian": result.wronskian.to_string(Z_NAMES),
                "balance": result.balance,
                "normalization": str(result.normalization),
                "exact": result.exact,
            },
            passed=result.passed,
            parameters={
                "N": N,
                "p": p,
                "weights": [w.to_string(Z_NAMES) for w in weights],
                "seed": seed,
            },
            notes=notes,
            witness=witness,
        )

    def delta_identities(self, config: RunConfig) -> ValueReport:
        if config.k_out is not None or config.k_in is not None:
            cases = [(_positive(config.k_out, "k_out", 2), _positive(config.k_in, "k_in", 2))]
        else:
            cases = DELTA_CASES
        seed = self._seed(config)
        rows = []
        witness = None
        for outer, inner in cases:
            count = outer + inner - 1
            if config.ops is not None:
                sample = parse_diffop_list(config.ops, config.n or 1)
                if len(sample) != count:
                    raise ConfigError(f"Δ_{outer}[Δ_{inner}] needs {count} operators, got {len(sample)}")
            else:
                sample = random_diffops(count, 2, 2, seed, n=config.n or 1)
            result = delta_identity_check(outer, inner, sample)
            rows.append(
                {
                    "outer": outer,
                    "inner": inner,
                    "identity": result.identity,
                    "holds": result.passed,
                    "residual": result.residual.to_string(),
                }
            )
            if not result.passed and witness is None:
                witness = Witness(
                    arguments=[op.to_string() for op in sample],
                    value=result.residual.to_string(),
                    extra={"outer": str(outer), "inner": str(inner)},
                )
        return ValueReport(
            command="delta-identities",
            result=rows,
            passed=witness is None,
            parameters={"seed": seed, "cases": [list(c) for c in cases]},
            witness=witness,
        )

    # ------------------------------------------------------------------
    # homotopy identities

    def jacobi(self, config: RunConfig) -> JacobiReport:
        op = self._operator(config.op)
        space = self._space(op, config, 2 * op.slot_order_bound)
        return check_homotopy_jacobi(
            op, space, budget=self._budget(config), sample=config.sample, seed=self._seed(config)
        )

    def nkr(self, config: RunConfig) -> JacobiReport:
        op = self._operator(config.op)
        if config.N is not None and config.N != op.arity:
            raise ConfigError(f"--N {config.N} does not match the arity {op.arity} of {op.label}")
        if config.sample is not None:
            raise ConfigError("nkr has no sampling mode")
        k = _require(config.k, "k")
        r = config.r or 0
        space = self._space(op, config, 2 * op.slot_order_bound)
        return check_nkr_jacobi(op, k, r, space, budget=settings.budget_or_default(config.budget))

    def rn(self, config: RunConfig) -> JacobiReport:
        left = self._operator(config.op)
        right = self._operator(config.op2) if config.op2 is not None else left
        bracket = rn_bracket(left, right)
        space = self._space(bracket, config, bracket.slot_order_bound)
        report = check_zero_operator(
            bracket,
            space,
            "rn-vanishing",
            budget=self._budget(config),
            sample=config.sample,
            seed=self._seed(config),
            parameters={"left": left.label, "right": right.label},
        )
        if left is right and left.arity % 2:
            report.notes.append("[[Δ, Δ]] vanishes identically for odd arity")
        return report

    def jet_jacobi(self, config: RunConfig) -> JacobiReport:
        n = _positive(config.n, "n")
        k_in = config.k_in if config.k_in is not None else _require(config.k, "k")
        k_out = config.k_out if config.k_out is not None else _require(config.k, "k")
        margin = 0
        if config.deg is not None:
            margin = config.deg - (k_in + k_out)
            if margin < 0:
                raise ConfigError(f"--deg {config.deg} is below the soundness degree {k_in + k_out}")
        return check_cross_vanishing(
            n,
            k_in,
            k_out,
            degree_margin=margin,
            budget=self._budget(config),
            sample=config.sample,
            seed=self._seed(config),
        )

    def box(self, config: RunConfig) -> ValueReport:
        n = _positive(config.n, "n")
        spec = JetBracketSpec(n, _positive(config.k, "k", 0))
        args = parse_poly_list(_require(config.args, "args"), n)
        value = box_bracket(spec, args)
        return ValueReport(
            command="box",
            result=str(value),
            parameters={**spec.describe(), "args": [str(a) for a in args]},
        )

    def nambu(self, config: RunConfig) -> ValueReport:
        n = _positive(config.n, "n")
        args = parse_poly_list(_require(config.args, "args"), n)
        return ValueReport(
            command="nambu",
            result=str(nambu_bracket(args)),
            parameters={"n": n, "args": [str(a) for a in args]},
        )

    def dim_jets(self, config: RunConfig) -> ValueReport:
        n = _positive(config.n, "n")
        k = _positive(config.k, "k", 0)
        return ValueReport(command="dim-jets", result=jet_dimension(n, k), parameters={"n": n, "k": k})

    # ------------------------------------------------------------------
    # Koszul complex

    def _koszul_setup(self, config: RunConfig):
        op = self._operator(config.op)
        base = SpanBasis(parse_poly_list(_require(config.base, "base"), op.n))
        degree = _positive(config.r, "r", 0)
        bound = 2 * op.slot_order_bound
        certificate = certify_homotopy_jacobi(
            op, TestSpace(op.n, bound), budget=settings.budget_or_default(config.budget)
        )
        if not certificate.passed:
            raise ConfigError(f"{op.label} fails the homotopy Jacobi identity; ∂ is undefined")
        defect = closure_defect(op, base)
        if defect is not None:
            raise NotClosedError(f"{op.label} leaves span(base): {defect[1]} on indices {list(defect[0])}")
        return op, base, degree, certificate

    def koszul(self, config: RunConfig) -> ValueReport:
        op, base, degree, certificate = self._koszul_setup(config)
        images = []
        for indices in combinations(range(len(base)), degree):
            image = koszul_differential(
                op, ExteriorTensor.basis_tensor(base, indices), certificate, auto_extend=False
            )
            images.append({"source": [base.labels()[i] for i in indices], "image": image.as_dict()})
        failing = square_vanishes(op, base, degree, certificate)
        witness = None
        if failing is not None:
            witness = Witness(arguments=[base.labels()[i] for i in failing], value="∂∘∂ ≠ 0", extra={})
        return ValueReport(
            command="koszul",
            result=images,
            passed=failing is None,
            certificate_degree=certificate.degree,
            parameters={"op": op.label, "base": base.labels(), "r": degree},
            witness=witness,
        )

    def koszul_rank(self, config: RunConfig) -> ValueReport:
        op, base, degree, certificate = self._koszul_setup(config)
        ranks = koszul_homology_rank(op, base, degree, certificate)
        notes = [] if ranks.standard_range else [f"degree {degree} lies outside Λ^(≥2)"]
        return ValueReport(
            command="koszul-rank",
            result=ranks._asdict(),
            passed=ranks.is_complex and ranks.ranks_agree,
            certificate_degree=certificate.degree,
            parameters={"op": op.label, "base": base.labels(), "r": degree},
            notes=notes,
        )

    # ------------------------------------------------------------------
    # finite algebras

    def finite(self, config: RunConfig) -> BaseModel:
        algebra = config.algebra or "a2"
        check = config.check or "jacobi"
        seed = self._seed(config)

        if check == "rep":
            if algebra == "sl2":
                passed, rows = sl2_wronskian_rep_check()
            elif algebra == "a2":
                passed, rows = a2_wronskian_rep_check(_positive(config.N, "N", 2))
            else:
                raise ConfigError(f"No Wronskian representation check for {algebra!r}")
            return ValueReport(
                command="finite", result=rows, passed=passed, parameters={"algebra": algebra, "N": config.N}
            )

        if check == "search":
            N = _positive(config.N, "N", 2)
            search = find_threshold_counterexample(N, seed)
            return ValueReport(
                command="finite",
                result=search.tensor.to_json() if search.tensor is not None else None,
                passed=search.tensor is not None,
                parameters={"N": N, "seed": seed, "found_seed": search.seed, "attempts": search.attempts},
            )

        if algebra in ALGEBRAS:
            tensor = ALGEBRAS[algebra](_positive(config.N, "N", 2))
        elif algebra == "random":
            tensor = random_skew_bracket(_positive(config.r, "r"), _positive(config.N, "N", 2), seed)
        elif algebra == "threshold":
            tensor = load_threshold_counterexample()
        else:
            raise ConfigError(f"Unknown algebra {algebra!r}; expected one of cross, a2, random, threshold, sl2")

        if check == "table":
            return ValueReport(command="finite", result=tensor.to_json(), parameters={"algebra": tensor.name})
        if check == "jacobi":
            return check_structure_jacobi(tensor, budget=settings.budget_or_default(config.budget))
        raise ConfigError(f"Unknown check {check!r}; expected jacobi, table, rep or search")


_command_runner = None


def get_command_runner() -> CommandRunner:
    global _command_runner
    if _command_runner is None:
        _command_runner = CommandRunner()
    return _command_runner
