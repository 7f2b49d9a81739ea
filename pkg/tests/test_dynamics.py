"""Event-driven simulation: closed forms, oracle cross-checks, determinism."""

import math

import numpy as np
import pytest

from boolvol import dynamics as dyn
from boolvol import functions as bf
from boolvol import oracle


def inst(text):
    return bf.make_instance(bf.parse_spec(text))


def params(p=0.5, T=1.0, seed=7, replicas=1):
    return dyn.DynamicsParams(p=p, T=T, seed=seed, replicas=replicas)


def binom_se(q, n):
    return math.sqrt(max(q * (1 - q), 1e-12) / n)


# -- parameters ---------------------------------------------------------------

@pytest.mark.parametrize(
    "kwargs",
    [
        dict(p=-0.1),
        dict(p=1.5),
        dict(T=-1.0),
        dict(replicas=0),
        dict(seed=-1),
    ],
)
def test_params_validation(kwargs):
    with pytest.raises(ValueError):
        params(**kwargs)


# -- single trajectories ------------------------------------------------------

def test_horizon_zero_has_no_switches():
    traj = dyn.simulate_trajectory(inst("maj:3"), params(T=0.0), 0)
    assert traj.C == 0 and traj.S == 0 and traj.switch_times == []


def test_trajectory_deterministic_and_replica_dependent():
    f = inst("parity:8")
    pr = params(seed=123)
    a = dyn.simulate_trajectory(f, pr, 4)
    b = dyn.simulate_trajectory(f, pr, 4)
    assert a == b
    others = [dyn.simulate_trajectory(f, pr, r) for r in range(10)]
    assert any(o.switch_times != a.switch_times for o in others)


@pytest.mark.parametrize("text", ["maj:3", "type2:5"])
def test_trajectory_alternation(text):
    f = inst(text)
    pr = params(p=0.3, T=2.0, seed=42)
    for r in range(300):
        traj = dyn.simulate_trajectory(f, pr, r)
        assert traj.C == len(traj.switch_times)
        assert all(0.0 < t <= pr.T for t in traj.switch_times)
        assert all(a < b for a, b in zip(traj.switch_times, traj.switch_times[1:]))
        # switches alternate, so the 1->0 count is pinned by C and the start
        assert traj.S == (traj.C + traj.initial_output) // 2


# -- C distribution vs exact oracle -------------------------------------------

@pytest.mark.parametrize(
    "text,p",
    [
        ("maj:3", 0.5),
        ("maj:3", 0.3),
        ("dap:4", 0.5),
        ("type2:4", 0.5),
        ("andor:2", 0.5),
        ("itermaj3:2", 0.5),
        ("bigtame:2", 0.5),
    ],
)
def test_mean_switch_count_matches_total_influence(text, p):
    f = inst(text)
    emp = dyn.estimate_C_distribution(f, params(p=p, seed=9, replicas=4000))
    exact = oracle.exact_total_influence(f, p)
    se = math.sqrt(emp.var_C / emp.replicas)
    assert abs(emp.mean_C - exact) <= 4 * se + 1e-12


def test_dictator_closed_forms():
    emp = dyn.estimate_C_distribution(inst("dictator:1"), params(seed=5, replicas=20000))
    se_mean = math.sqrt(emp.var_C / emp.replicas)
    assert abs(emp.mean_C - 0.5) <= 4 * se_mean
    # value-changing updates thin to Poisson(1/2)
    target = math.exp(-0.5)
    assert abs(emp.p_zero - target) <= 4 * binom_se(target, emp.replicas)


def test_parity2_p_zero():
    emp = dyn.estimate_C_distribution(inst("parity:2"), params(seed=6, replicas=20000))
    target = math.exp(-1.0)
    assert abs(emp.p_zero - target) <= 4 * binom_se(target, emp.replicas)


def test_parity8_mean():
    emp = dyn.estimate_C_distribution(inst("parity:8"), params(seed=8, replicas=5000))
    se = math.sqrt(emp.var_C / emp.replicas)
    assert abs(emp.mean_C - 4.0) <= 4 * se


def test_constant_function_never_switches():
    f = oracle.import_truth_table([1] * 8)
    emp = dyn.estimate_C_distribution(f, params(seed=3, replicas=500))
    assert emp.p_zero == 1.0 and emp.mean_C == 0.0
    assert np.all(emp.C == 0)


def test_time_homogeneity():
    emp = dyn.estimate_C_distribution(inst("maj:3"), params(T=3.0, seed=10, replicas=4000))
    se = math.sqrt(emp.var_C / emp.replicas)
    assert abs(emp.mean_C - 3 * 0.75) <= 4 * se


def test_estimate_determinism_and_thread_independence():
    f = inst("maj:5")
    pr = params(seed=11, replicas=600)
    e1 = dyn.estimate_C_distribution(f, pr)
    e2 = dyn.estimate_C_distribution(f, pr)
    e4 = dyn.estimate_C_distribution(f, pr, threads=4)
    for other in (e2, e4):
        assert np.array_equal(e1.C, other.C)
        assert np.array_equal(e1.S, other.S)
        assert np.array_equal(e1.initial, other.initial)
        assert e1.to_json_dict() == other.to_json_dict()


def test_empirical_summary_shape():
    f = inst("maj:5")
    emp = dyn.estimate_C_distribution(f, params(seed=12, replicas=800))
    doc = emp.to_json_dict()
    assert set(doc) == {"spec", "p", "T", "replicas", "seed", "histogram",
                        "mean_C", "var_C", "p_zero", "tail"}
    assert doc["spec"] == "maj:5"
    assert sum(cnt for _, cnt in doc["histogram"]) == 800
    gts = [q for _, q in doc["tail"]]
    assert all(a >= b for a, b in zip(gts, gts[1:]))
    assert emp.prob_greater(0) == 1.0 - emp.p_zero
    k_mass = emp.prob_between(1, 3)
    assert abs(k_mass - (emp.prob_greater(0) - emp.prob_greater(3))) < 1e-12


# -- endpoint pair statistics --------------------------------------------------

def test_joint_zero_horizon():
    est = dyn.estimate_joint(inst("maj:3"), 0.5, 0.0, 200, 4)
    assert est.disagree == 0.0


def test_joint_dictator_kernel():
    t = 0.7
    est = dyn.estimate_joint(inst("dictator:1"), 0.5, t, 20000, 13)
    target = (1 - math.exp(-t)) / 2
    assert abs(est.disagree - target) <= 4 * binom_se(target, 20000)


def test_joint_parity_kernel():
    t = 0.5
    est = dyn.estimate_joint(inst("parity:3"), 0.5, t, 20000, 14)
    target = (1 - math.exp(-3 * t)) / 2
    assert abs(est.disagree - target) <= 4 * binom_se(target, 20000)


def test_noise_pair_trivial_epsilons():
    f = inst("maj:3")
    assert dyn.sample_noise_pair(f, 0.5, 0.0, 500, 15).disagree == 0.0
    est = dyn.sample_noise_pair(f, 0.5, 1.0, 20000, 16)
    assert abs(est.mean_product - 0.25) <= 4 * binom_se(0.25, 20000)


@pytest.mark.parametrize("text", ["maj:9", "itermaj3:2", "andor:3"])
@pytest.mark.parametrize("t", [0.1, 0.5, 1.0])
def test_time_vs_noise_same_joint(text, t):
    # running the clock to t must match direct eps = 1-e^{-t} rerandomization
    f = inst(text)
    R = 8000
    sim = dyn.estimate_joint(f, 0.5, t, R, 17)
    direct = dyn.sample_noise_pair(f, 0.5, 1 - math.exp(-t), R, 18)
    pool = (sim.disagree + direct.disagree) / 2
    se = math.sqrt(max(pool * (1 - pool), 1e-12) * 2 / R)
    assert abs(sim.disagree - direct.disagree) <= 4 * se


# -- survival ------------------------------------------------------------------

def test_survival_at_zero_estimates_prob_one():
    got = dyn.survival_estimate(inst("maj:3"), 0.5, 0.0, 3000, 19)
    assert abs(got - 0.5) <= 4 * binom_se(0.5, 3000)


@pytest.mark.parametrize("x", [0.5, 1.0])
def test_survival_single_gate(x):
    # gate starts OR (prob 1/2) and no update redraws it to AND
    got = dyn.survival_estimate(inst("andor:0"), 0.5, x, 20000, 20)
    target = 0.5 * math.exp(-x / 2)
    assert abs(got - target) <= 4 * binom_se(target, 20000)


def test_survival_curve_monotone():
    xs = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
    vals = dyn.survival_curve(inst("itermaj3:2"), 0.5, xs, 2000, 21)
    assert all(a >= b for a, b in zip(vals, vals[1:]))
