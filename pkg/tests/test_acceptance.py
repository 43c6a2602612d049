"""Acceptance criteria, one test each; the conftest prints a PASS/FAIL line per criterion."""
import json
import time

import numpy as np
import pytest

from bgpc.checkers import check_subspace, check_jointsparse_dft
from bgpc.conditions import (
    necessary_N,
    sufficient_jointsparse,
    sufficient_jointsparse_2d,
    sufficient_piecewise,
    sufficient_subspace,
    universal_sparsity_report,
)
from bgpc.experiments import census, default_counterexamples, sweep, verify_pair
from bgpc.indexsets import (
    IndexPairSet,
    IndexSet,
    friendly_fast_path,
    is_friendly_exhaustive,
    is_periodic,
    min_shift_union,
    shift_masks,
)
from bgpc.instances import (
    bernoulli_gaussian,
    dumps,
    random_jointsparse,
    random_jointsparse_2d,
    random_piecewise,
    random_subspace,
)
from bgpc.matcore import dft, fdinv_conjugate, fdinv_conjugate_closed_form
from bgpc.rng import make_rng
from bgpc.transgroup import gamma_closed_form_member, gamma_member

from helpers import BASES, BASIS_SIZES, gamma_member_sample, gamma_nonmember_sample, support_oracle
from test_indexsets import every_subset

SWEEP_SEED = 7
CENSUS_SEED = 0
CENSUS_TRIALS = 10
CENSUS_CASES = [(5, 2, 0.60, 0.10), (7, 3, 0.0, 0.0), (7, 4, 1.0, 0.0)]
ORACLE_INSTANCES = 500


@pytest.fixture(scope="module")
def subspace_sweep_run():
    t = time.perf_counter()
    grid = sweep("subspace", 10, 100, SWEEP_SEED)
    return grid, time.perf_counter() - t


@pytest.fixture(scope="module")
def census_runs():
    t = time.perf_counter()
    runs = {(s, N): census(10, s, N, CENSUS_TRIALS, CENSUS_SEED) for s, N, _, _ in CENSUS_CASES}
    return runs, time.perf_counter() - t


def test_1_subspace_phase_transition(subspace_sweep_run, acceptance):
    grid, elapsed = subspace_sweep_run
    per_cell = {
        cell: (c if grid.below_bound(*cell) else grid.trials - c) for cell, c in grid.counts.items()
    }
    worst = max(per_cell.values())
    total = sum(per_cell.values())
    ok = worst <= 1 and elapsed < 120
    acceptance("1 subspace sweep n=10, 100 trials/cell", ok,
               f"deviating trials: total {total}, worst cell {worst}; {elapsed:.1f}s")
    assert ok


def test_2_good_support_census(census_runs, acceptance):
    runs, elapsed = census_runs
    parts, ok = [], elapsed < 600
    for s, N, target, tol in CENSUS_CASES:
        frac = runs[(s, N)].good_fraction
        parts.append(f"(s={s},N={N}) {frac:.3f} vs {target}")
        ok &= abs(frac - target) <= tol
    acceptance("2 census n=10", ok, "; ".join(parts) + f"; {elapsed:.1f}s")
    assert ok


def test_3_counterexamples(acceptance):
    rows = [(ce.name, verify_pair(ce.instance, ce.lam1, ce.X1, ce.group)) for ce in default_counterexamples()]
    ok = len(rows) == 4 and all(v["passed"] for _, v in rows)
    detail = "; ".join(f"{name}: residual {v['residual_max']:.1e}, orbit {v['orbit_equivalent']}, "
                       f"checker {v['checker_identifiable']}" for name, v in rows)
    acceptance("3 counterexample fidelity", ok, detail)
    assert ok


def test_4a_gamma_membership_oracles(acceptance):
    mismatches, checked = [], 0
    for kind, n in BASIS_SIZES:
        rng = make_rng(40, n, len(kind))
        A = BASES[kind](n)
        for label, sampler in ((True, gamma_member_sample), (False, gamma_nonmember_sample)):
            for _ in range(200):
                g = sampler(kind, n, rng)
                numeric, closed = gamma_member(A, g), gamma_closed_form_member(kind, g)
                checked += 1
                if not numeric == closed == label:
                    mismatches.append((kind, n, label))
    ok = not mismatches
    acceptance("4a gamma membership: numeric vs closed form", ok,
               f"{checked} gains over {len(BASIS_SIZES)} bases, {len(mismatches)} disagreements")
    assert ok, mismatches[:5]


def test_4b_friendliness_fast_paths(acceptance):
    bad, decided = [], 0
    for n in range(1, 9):
        for J in every_subset(n):
            fast = friendly_fast_path(J)
            if fast is not None:
                decided += 1
                if fast != is_friendly_exhaustive(J):
                    bad.append(J)
    ok = not bad
    acceptance("4b friendliness fast paths vs definition, n<=8", ok,
               f"{decided} shortcut verdicts, {len(bad)} contradictions")
    assert ok, bad[:5]


def test_4c_coverage_iff_aperiodic(acceptance):
    bad, count = [], 0
    for n in range(2, 11):
        for J in every_subset(n, include_full=False):
            count += 1
            if (min_shift_union(J) >= n - 1) != (not is_periodic(J)):
                bad.append(J)
    ok = not bad
    acceptance("4c shift coverage <=> aperiodic, n<=10", ok, f"{count} supports, {len(bad)} violations")
    assert ok, bad[:5]


def _subspace_case(i, necessary):
    rng = make_rng(41, i)
    n = int(rng.integers(3, 11))
    if necessary:
        m = int(rng.integers(n // 2 + 1, n)) if n > 3 else 2
        cap = necessary_N(n, m) - 1
        N = int(rng.integers(1, cap + 1)) if cap >= 1 else None
    else:
        m = int(rng.integers(1, n))
        N = int(rng.integers(1, n + 1))
    return n, m, N


def _sparse_case(i, stream, necessary, n_lo=3, n_hi=11):
    rng = make_rng(42, stream, i)
    n = int(rng.integers(n_lo, n_hi))
    if necessary:
        s = int(rng.integers(n // 2 + 1, n)) if n > 3 else 2
        cap = necessary_N(n, s) - 1
        return n, s, (int(rng.integers(1, cap + 1)) if cap >= 1 else None)
    s = int(rng.integers(1, n))
    return n, s, int(rng.integers(1, n + 1))


def _summarize(name, sat, agree):
    return f"{name}: {sat} satisfied, {agree} agree"


def test_4d_sufficient_implies_identifiable(acceptance):
    stats, failures = [], []

    sat = agree = 0
    for i in range(ORACLE_INSTANCES):
        n, m, N = _subspace_case(i, False)
        inst = random_subspace(n, m, N, 43, i)
        if sufficient_subspace(inst.lam0, inst.X0, inst.A).satisfied:
            sat += 1
            agree += check_subspace(inst.A, inst.Y).identifiable
    stats.append(_summarize("subspace", sat, agree))
    failures += [("subspace", sat - agree)] if sat != agree else []

    sat = agree = 0
    for i in range(ORACLE_INSTANCES):
        n, s, N = _sparse_case(i, 1, False)
        inst = random_jointsparse(n, s, N, "uniform", 44, i)
        if sufficient_jointsparse(inst.lam0, inst.X0, s=s).satisfied:
            sat += 1
            agree += check_jointsparse_dft(inst.Y, inst.support, s).identifiable
    stats.append(_summarize("jointsparse", sat, agree))
    failures += [("jointsparse", sat - agree)] if sat != agree else []

    sat = agree = 0
    for i in range(ORACLE_INSTANCES):
        n, s, N = _sparse_case(i, 2, False, 4, 10)
        s = max(2, min(s, n - 2))
        inst = random_piecewise(n, s, N, "uniform", 45, i)
        if sufficient_piecewise(inst.lam0, inst.X0, s=s).satisfied:
            sat += 1
            agree += support_oracle(inst.A, inst.Y, inst.support, {inst.support.mask})
    stats.append(_summarize("piecewise", sat, agree))
    failures += [("piecewise", sat - agree)] if sat != agree else []

    sat = agree = 0
    for i in range(ORACLE_INSTANCES):
        rng = make_rng(46, i)
        side = int(rng.integers(2, 4))
        n = side * side
        s = int(rng.integers(1, n))
        N = int(rng.integers(s, n + 1))
        inst = random_jointsparse_2d(side, s, N, "uniform", 47, i)
        if sufficient_jointsparse_2d(inst.lam0, inst.X0, s=s).satisfied:
            sat += 1
            pairs = IndexPairSet.from_index_set(inst.support)
            allowed = {pairs.shift(a, b).to_index_set().mask for a in range(side) for b in range(side)}
            agree += support_oracle(inst.A, inst.Y, inst.support, allowed)
    stats.append(_summarize("jointsparse2d", sat, agree))
    failures += [("jointsparse2d", sat - agree)] if sat != agree else []

    ok = not failures
    acceptance(f"4d sufficient => identifiable, {ORACLE_INSTANCES} instances/model", ok, "; ".join(stats))
    assert ok, failures


def test_4d_necessary_violation_implies_not_identifiable(acceptance):
    stats, failures = [], []
    tested = wrong = 0
    i = 0
    while tested < ORACLE_INSTANCES:
        n, m, N = _subspace_case(i, True)
        i += 1
        if N is None:
            continue
        inst = random_subspace(n, m, N, 48, i)
        tested += 1
        wrong += check_subspace(inst.A, inst.Y).identifiable
    stats.append(f"subspace: {tested} below bound, {wrong} identifiable")
    failures += [("subspace", wrong)] if wrong else []

    tested = wrong = 0
    i = 0
    while tested < ORACLE_INSTANCES:
        n, s, N = _sparse_case(i, 3, True)
        i += 1
        if N is None:
            continue
        inst = random_jointsparse(n, s, N, "uniform", 49, i)
        tested += 1
        wrong += check_jointsparse_dft(inst.Y, inst.support, s).identifiable
    stats.append(f"jointsparse: {tested} below bound, {wrong} identifiable")
    failures += [("jointsparse", wrong)] if wrong else []

    tested = wrong = 0
    i = 0
    while tested < ORACLE_INSTANCES:
        n, s, N = _sparse_case(i, 4, True, 4, 10)
        i += 1
        if N is None:
            continue
        inst = random_piecewise(n, s, N, "uniform", 50, i)
        tested += 1
        wrong += support_oracle(inst.A, inst.Y, inst.support, {inst.support.mask})
    stats.append(f"piecewise: {tested} below bound, {wrong} identifiable")
    failures += [("piecewise", wrong)] if wrong else []

    ok = not failures
    acceptance("4d necessary bound violated => not identifiable", ok, "; ".join(stats))
    assert ok, failures


def test_5_difference_conjugate_closed_form(acceptance):
    worst, zero_col = 0.0, 0.0
    for n in range(4, 9):
        rng = make_rng(51, n)
        F = dft(n)
        for _ in range(100):
            g = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            P = fdinv_conjugate(g)
            c = F.conj().T @ g / np.sqrt(n)
            worst = max(worst, float(np.abs(P - fdinv_conjugate_closed_form(c)).max()))
            zero_col = max(zero_col, float(np.abs(P[1:, 0]).max()))
    ok = worst < 1e-9 and zero_col < 1e-9
    acceptance("5 difference-basis conjugate closed form, n=4..8", ok,
               f"max entry error {worst:.1e}, max |P(a,1)| below row 1 {zero_col:.1e}")
    assert ok


def test_6_determinism(subspace_sweep_run, census_runs, acceptance):
    grid, _ = subspace_sweep_run
    runs, _ = census_runs
    same_csv = sweep("subspace", 10, 100, SWEEP_SEED).to_csv().encode() == grid.to_csv().encode()
    same_json = all(
        dumps(census(10, s, N, CENSUS_TRIALS, CENSUS_SEED).to_dict()).encode() == dumps(runs[(s, N)].to_dict()).encode()
        for s, N, _, _ in CENSUS_CASES
    )
    ok = same_csv and same_json
    acceptance("6 determinism of sweep CSV and census JSON", ok, f"csv identical {same_csv}, json identical {same_json}")
    assert ok


def test_sparse_model_falsifier(acceptance):
    X0 = bernoulli_gaussian(6, 200, 0.1, 52)
    lam0 = np.ones(6)
    rep = universal_sparsity_report(lam0, X0, np.eye(6), trials=10_000, seed=53)
    ok = rep.verdict == "consistent"
    acceptance("sparse model: no falsification in 10^4 trials (theta=0.1, n=6, N=200)", ok,
               rep.clause("sparsest_row_basis").detail)
    assert ok
