import json
from dataclasses import replace

import numpy as np
import pytest

from antinorm import SuiteConfig, run_suite
from antinorm.suite import CASES, SUITES, random_psd, resolve_cases


def test_every_case_runs_and_passes_briefly():
    result = run_suite(SuiteConfig(trials=5, seed=3))
    failing = [r.to_json() for r in result.reports if not r.passed]
    assert result.passed, failing[:3]
    assert {row["case_id"] for row in result.summary} == set(CASES)


def test_reports_have_the_fixed_json_keys():
    result = run_suite(SuiteConfig(trials=2, cases=("rotfeld",)))
    for line in result.jsonl().splitlines():
        obj = json.loads(line)
        assert {"case_id", "lhs", "rhs", "margin", "tolerance", "pass", "inputs_fingerprint", "seed"} <= set(obj)


def test_runs_are_reproducible_and_seed_sensitive():
    cfg = SuiteConfig(trials=4, cases=("theorems", "witness_agm"), seed=11)
    first, second = run_suite(cfg).jsonl(), run_suite(cfg).jsonl()
    assert first == second
    assert run_suite(SuiteConfig(trials=4, cases=("theorems",), seed=12)).jsonl() != first


def test_parallel_jobs_give_identical_output():
    cfg = SuiteConfig(trials=6, cases=("orders",), seed=5)
    assert run_suite(cfg).jsonl() == run_suite(replace(cfg, jobs=4)).jsonl()


def test_dims_change_the_inputs():
    small = run_suite(SuiteConfig(trials=2, cases=("rotfeld",), dims=(2,))).jsonl()
    large = run_suite(SuiteConfig(trials=2, cases=("rotfeld",), dims=(3,))).jsonl()
    assert small != large


def test_summary_csv():
    result = run_suite(SuiteConfig(trials=2, cases=("axioms",)))
    lines = result.summary_csv().splitlines()
    assert lines[0] == "case_id,reports,failures,out_of_scope,min_margin,runtime_s"
    assert [line.split(",")[0] for line in lines[1:]] == list(SUITES["axioms"])


def test_out_of_scope_analytic_scale():
    result = run_suite(SuiteConfig(trials=3, cases=("equivalence",), scale_b="exp_inv_sqrt"))
    assert result.passed
    assert all(r.out_of_scope for r in result.reports)


def test_config_validation():
    for bad in (dict(trials=0), dict(tolerance=0.0), dict(dims=(1,)), dict(jobs=0)):
        with pytest.raises(ValueError):
            SuiteConfig(**bad)
    with pytest.raises(KeyError):
        resolve_cases(["nope"])


def test_resolve_cases_expands_and_dedupes():
    assert resolve_cases(["rotfeld", "theorems"])[0] == "rotfeld"
    assert len(resolve_cases(["theorems", "rotfeld"])) == len(SUITES["theorems"])


def test_random_psd_shapes(rng):
    a = random_psd(rng, 4, nonsingular=True)
    assert np.min(np.linalg.eigvalsh(a)) >= 0.1 - 1e-12
    low = random_psd(rng, 4, rank=2)
    assert np.sum(np.linalg.eigvalsh(low) > 1e-10) == 2
