import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lepi.apps import build_model, generate_mpclp, generate_mpkpg
from lepi.bnc import (Infeasible, InfeasibleModel, Model, SolveConfig, Substructure, relaxation_solve, solve,
                      write_csv_rows)
from lepi.core import EPIGRAPH, FIXED_RHS, ModelError
from lepi.oracle import exhaustive_solve


def _three_item_model(inst):
    model = Model(n_x=3, c_x=np.zeros(3), n_w=1, c_w=np.ones(1))
    model.gub = [(0, 1)]
    model.subs = [Substructure(inst, (0, 1, 2), EPIGRAPH, w=0)]
    return model


def test_pure_gub_model_solved_at_root():
    model = Model(n_x=4, c_x=np.array([-3.0, -1.0, -2.0, 1.0]))
    model.gub = [(0, 1), (2, 3)]
    rep = solve(model)
    assert rep.objective == pytest.approx(-5)
    assert rep.nodes == 1
    assert rep.root_gap_pct == pytest.approx(0)


def test_relaxation_with_hull_rows():
    # w >= eta'x for the three facets, x in the GUB polytope
    A = [[-1, -4, -21, -1], [-1, -10, -15, -1], [-7, -16, -9, -1], [1, 1, 0, 0]]
    res = relaxation_solve([0, 0, 0, 1], A, [0, 0, 0, 1], lb=[0, 0, 0, -np.inf], ub=[1, 1, 1, np.inf])
    assert res.fun == pytest.approx(-25)
    with pytest.raises(Infeasible):
        relaxation_solve([1], [[1]], [-1])


def test_three_item_root_is_hull_tight(three_item):
    rep = solve(_three_item_model(three_item), SolveConfig(cut_family="lepi"))
    assert rep.objective == pytest.approx(-25)
    assert rep.root_value == pytest.approx(-25)
    assert rep.root_gap_pct == pytest.approx(0, abs=1e-9)
    assert rep.nodes == 1


def test_fixed_rhs_lazy_cuts_only(three_item):
    # maximise x1 + x2 + x3 subject to -(a'x)^2 <= -10, i.e. a'x >= sqrt(10)
    model = Model(n_x=3, c_x=np.array([-1.0, -1.0, -1.0]), sense="min")
    model.gub = [(0, 1)]
    model.subs = [Substructure(three_item, (0, 1, 2), FIXED_RHS, rhs=-10.0)]
    for fam in ("none", "epi", "lepi"):
        rep = solve(model, SolveConfig(cut_family=fam, audit=True))
        assert rep.objective == pytest.approx(exhaustive_solve(model)[0])
        assert rep.audit_violations == 0


def test_infeasible_model(three_item):
    model = Model(n_x=3, c_x=np.zeros(3))
    model.gub = [(0, 1)]
    model.subs = [Substructure(three_item, (0, 1, 2), FIXED_RHS, rhs=-100.0)]
    with pytest.raises(InfeasibleModel):
        solve(model)


def test_bad_models(three_item):
    with pytest.raises(ModelError):
        Substructure(three_item, (0, 1, 2), FIXED_RHS)
    model = _three_item_model(three_item)
    model.gub = [(0,), (1,)]
    with pytest.raises(ModelError):
        solve(model)


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["epi", "lepi"]))
def test_matches_exhaustive(seed, fam):
    for inst in (generate_mpkpg(12, 2, 0.5, seed), generate_mpclp(20, 4, 3, seed)):
        model = build_model(inst)
        want, _ = exhaustive_solve(model)
        rep = solve(model, SolveConfig(cut_family=fam, audit=True))
        assert rep.status == "optimal"
        assert abs(rep.objective - want) <= 1e-6 * max(1.0, abs(want))
        assert rep.audit_violations == 0


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10_000))
def test_lepi_root_at_least_as_tight(seed):
    for inst in (generate_mpkpg(16, 3, 0.5, seed), generate_mpclp(25, 5, 3, seed)):
        model = build_model(inst)
        r_epi = solve(model, SolveConfig(cut_family="epi"))
        r_lepi = solve(model, SolveConfig(cut_family="lepi"))
        s = model.sign
        assert s * r_lepi.root_value >= s * r_epi.root_value - 1e-6 * max(1.0, abs(r_epi.root_value))


def test_report_serialisation():
    rep = solve(build_model(generate_mpkpg(10, 2, 0.5, 1)))
    d = json.loads(rep.to_json(with_time=False))
    assert "time_s" not in d and d["status"] == "optimal"
    text = write_csv_rows([{"app": "mpkpg", "params": "n=10", "cuts": "lepi", **rep.table_row()}])
    assert text.splitlines()[0] == "app,params,cuts,solved,time_s,nodes,egap_pct,rgap_pct"


def test_node_limit_reports_limit():
    model = build_model(generate_mpkpg(30, 5, 0.5, 3))
    rep = solve(model, SolveConfig(cut_family="none", node_limit=3))
    assert rep.status in ("limit", "optimal")
    assert rep.nodes <= 3
