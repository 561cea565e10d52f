"""Cross-route and residual checks, grouped into suites."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from .distribution import (
    COMPOSITION_CAP,
    nn_moment,
    nn_moment_closed,
    pgf_closed,
    pgf_recurrence,
    pk_closed,
    pk_composition,
    pk_table_recurrence,
)
from .genfunc import (
    EULER_GRID,
    diagonal_probability_identity,
    euler_transform_residual,
    initial_conditions_check,
    pde_residual_check,
    pgf_via_hypergeom,
    q_series_from_pgf,
    q_truncated,
    qtilde_identity_check,
)
from .moments import (
    Route,
    area_vertex_identity_check,
    ev_vertex_product,
    ev_small_n_closed,
    evn_closed_12,
    expected_area,
    missed_volume_closed,
    missed_volume_moments,
    moment_table,
    q_1k_closed,
    q_n1_closed,
    q_recurrence_check,
    second_area_moment,
    volume_variance,
)

SUITES = ("distribution", "moments", "genfunc")


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    cases: int
    residual: Optional[float] = None


def _all_equal(pairs: Iterable[Tuple]) -> Tuple[bool, int]:
    count = 0
    for values in pairs:
        count += 1
        if any(v != values[0] for v in values[1:]):
            return False, count
    return True, count


def distribution_checks(max_n: int) -> List[CheckResult]:
    out = []
    table = pk_table_recurrence(max(max_n, 1))
    pgfs = pgf_recurrence(max_n)
    comp_n = min(max_n, COMPOSITION_CAP)
    ok, cases = _all_equal(
        (
            (table[(n, k)], pgfs.probability(n, k), pk_closed(n, k))
            + ((pk_composition(n, k),) if n <= comp_n else ())
            for n in range(max_n + 1)
            for k in range(n + 1)
        )
    )
    out.append(CheckResult("distribution", "pk_routes_agree", ok, cases))
    ok, cases = _all_equal((pgfs[n], pgf_closed(n)) for n in range(max_n + 1))
    out.append(CheckResult("distribution", "pgf_recurrence_eq_closed", ok, cases))
    ok = all(pgfs[n].evaluate(Fraction(1)) == 1 for n in range(max_n + 1))
    out.append(CheckResult("distribution", "pgf_normalized", ok, max_n + 1))
    ok, cases = _all_equal(
        (pk_closed(n, 1), Fraction(2, n + 1)) for n in range(1, max_n + 1)
    )
    out.append(CheckResult("distribution", "p1_closed_form", ok, cases))
    ok, cases = _all_equal(
        (nn_moment(n, m), nn_moment_closed(n, m)) for n in range(1, max_n + 1) for m in (1, 2)
    )
    out.append(CheckResult("distribution", "vertex_moments_closed_form", ok, cases))
    return out


def moments_checks(max_n: int, max_k: int) -> List[CheckResult]:
    out = []
    tables = {r: moment_table(max_n, max_k, r) for r in Route}
    rec, clo, fp = tables[Route.RECURRENCE], tables[Route.CLOSED], tables[Route.FROM_P]
    ok, cases = _all_equal((rec[c], clo[c], fp[c]) for c in rec.cells())
    out.append(CheckResult("moments", "moment_routes_agree", ok, cases))
    ok, cases = _all_equal(
        (rec[(n, k)], ev_small_n_closed(n, k))
        for n in range(1, min(max_n, 2) + 1)
        for k in range(max_k + 1)
    )
    out.append(CheckResult("moments", "small_n_closed_forms", ok, cases))
    ok, cases = _all_equal(
        (rec[(n, k)], evn_closed_12(n, k))
        for n in range(max_n + 1)
        for k in range(1, min(max_k, 2) + 1)
    )
    out.append(CheckResult("moments", "harmonic_closed_forms", ok, cases))
    ok, cases = _all_equal(
        (rec[(n, k)], ev_vertex_product(n, k)) for n in range(1, max_n + 1) for k in range(max_k + 1)
    )
    out.append(CheckResult("moments", "vertex_product_formula", ok, cases))
    ok, cases = _all_equal(
        [(rec.q[(n, 1)], q_n1_closed(n)) for n in range(max_n + 1) if max_k >= 1]
        + [(rec.q[(1, k)], q_1k_closed(k)) for k in range(max_k + 1) if max_n >= 1]
    )
    out.append(CheckResult("moments", "q_boundary_closed_forms", ok, cases))
    if max_n >= 1 and max_k >= 2:
        ok = q_recurrence_check(max_n - 1, max_k, table=rec) if max_n >= 2 else True
        out.append(CheckResult("moments", "q_recurrence_residual", ok, max(max_n - 1, 0) * (max_k - 1)))
    else:
        out.append(CheckResult("moments", "q_recurrence_residual", True, 0))
    ok = all(area_vertex_identity_check(n) for n in range(1, max_n + 1))
    out.append(CheckResult("moments", "area_vertex_identity", ok, max_n))
    ok = True
    cases = 0
    if max_k >= 2:
        for n in range(1, max_n + 1):
            cases += 1
            ok &= volume_variance(n) == (rec[(n, 2)] - rec[(n, 1)] ** 2) / 4
            ok &= expected_area(n) == rec[(n, 1)] / 2
            ok &= second_area_moment(n) == rec[(n, 2)] / 4
    out.append(CheckResult("moments", "area_variance_forms", bool(ok), cases))
    ok, cases = _all_equal(
        (missed_volume_moments(n, k, lambda a, b: rec[(a, b)]), missed_volume_closed(n, k))
        for n in range(1, max_n + 1)
        for k in range(1, min(max_k, 2) + 1)
    )
    out.append(CheckResult("moments", "missed_volume_forms", ok, cases))
    return out


def genfunc_checks(max_n: int, degree: int) -> List[CheckResult]:
    out = []
    ok, cases = _all_equal((pgf_via_hypergeom(n), pgf_closed(n)) for n in range(max_n + 1))
    out.append(CheckResult("genfunc", "pgf_hypergeometric_route", ok, cases))
    Q = q_truncated(degree)
    ok = Q == q_series_from_pgf(degree)
    out.append(CheckResult("genfunc", "q_series_two_routes", ok, 1))
    out.append(CheckResult("genfunc", "qtilde_identity", qtilde_identity_check(degree, Q), 1))
    out.append(CheckResult("genfunc", "pde_residual", pde_residual_check(degree, Q), 1))
    out.append(CheckResult("genfunc", "initial_conditions", initial_conditions_check(degree, Q), 1))
    residual = max(euler_transform_residual(s, z) for s, z in EULER_GRID)
    out.append(
        CheckResult("genfunc", "euler_transform", residual < 1e-9, len(EULER_GRID), residual)
    )
    out.append(
        CheckResult("genfunc", "diagonal_identity", diagonal_probability_identity(max_n), max_n + 1)
    )
    return out


def run_suite(suite: str, max_n: int, max_k: int, degree: int) -> List[CheckResult]:
    runners: Dict[str, Callable[[], List[CheckResult]]] = {
        "distribution": lambda: distribution_checks(max_n),
        "moments": lambda: moments_checks(max_n, max_k),
        "genfunc": lambda: genfunc_checks(max_n, degree),
    }
    names = SUITES if suite == "all" else (suite,)
    results: List[CheckResult] = []
    for name in names:
        results.extend(runners[name]())
    return results


def all_passed(results: Iterable[CheckResult]) -> bool:
    return all(r.passed for r in results)
