import csv
import io
import json

import pytest

from qkdmitm.adversary import EveStrategy, StrategyKind
from qkdmitm.campaign import (
    StatsReport,
    aggregate,
    detection_curve,
    estimate_misidentification,
    reports_to_csv,
    run_campaign,
    run_trials,
    trial_seed,
)
from qkdmitm.channels import MessageOrdering, PolicyConfig, SessionConfig
from qkdmitm.estimators import (
    UndefinedQBER,
    intercept_detection_probability,
    multicopy_misidentification,
    qber,
)
from qkdmitm.protocol import Mode

INTERCEPT_I = SessionConfig.from_fixture(
    "paper-table-1", with_eve_guesses=False, adversary=EveStrategy(StrategyKind.INTERCEPT_ALL_I)
)
RANDOM16 = SessionConfig(length=16, adversary=EveStrategy(StrategyKind.INTERCEPT_RANDOM))


def test_qber_estimator():
    assert qber((0, 1, 1, 0), (0, 1, 0, 1)) == 0.5
    assert qber((1,), (1,)) == 0.0
    with pytest.raises(UndefinedQBER):
        qber((), ())


def test_closed_forms():
    assert intercept_detection_probability(1) == pytest.approx(0.25)
    assert intercept_detection_probability(8) == pytest.approx(1 - 0.75**8)
    assert multicopy_misidentification(1) == 1.0
    assert multicopy_misidentification(3) == 0.25


def test_trial_seeds_distinct_and_stable():
    seeds = [trial_seed(7, i) for i in range(1000)]
    assert len(set(seeds)) == 1000
    assert seeds == [trial_seed(7, i) for i in range(1000)]
    assert trial_seed(8, 0) != seeds[0]


def test_campaign_deterministic():
    a = run_campaign(RANDOM16, 300, seed=11)
    b = run_campaign(RANDOM16, 300, seed=11)
    assert a == b
    assert a.to_json() == b.to_json()
    assert run_campaign(RANDOM16, 300, seed=12) != a


def test_parallel_matches_serial():
    serial = run_trials(RANDOM16, 200, seed=3)
    assert run_trials(RANDOM16, 200, seed=3, jobs=2) == serial


def test_stderr_shrinks_with_sqrt_trials():
    small = run_campaign(INTERCEPT_I, 1000, seed=21)
    large = run_campaign(INTERCEPT_I, 4000, seed=21)
    ratio = small.attack_success_stderr / large.attack_success_stderr
    assert abs(ratio - 2.0) <= 0.5, ratio


def test_detection_grows_with_sample_fraction():
    rates = []
    for frac in (0.1, 0.3, 0.5):
        cfg = SessionConfig(
            length=32,
            adversary=EveStrategy(StrategyKind.INTERCEPT_RANDOM),
            policy=PolicyConfig(sample_fraction=frac),
        )
        rates.append(run_campaign(cfg, 600, seed=5).detection_rate)
    assert rates[0] < rates[1] < rates[2], rates


def test_detection_curve_orders_sizes():
    cfg = SessionConfig(length=32, mode=Mode.PHYSICAL,
                        adversary=EveStrategy(StrategyKind.INTERCEPT_RANDOM))
    curve = detection_curve(cfg, [1, 4], trials=400, seed=9)
    assert curve[1] < curve[4]
    assert abs(curve[4] - intercept_detection_probability(4)) < 0.08


def test_honest_sift_rate_near_half():
    rep = run_campaign(SessionConfig(length=32), 500, seed=1)
    assert abs(rep.sift_rate - 0.5) < 0.03
    assert rep.keys_match_rate == 1.0 and rep.detection_rate == 0.0
    assert rep.attack_success_rate == 0.0


def test_policy_abort_rate():
    cfg = SessionConfig(
        ordering=MessageOrdering.early_basis(),
        adversary=EveStrategy(StrategyKind.ATTACK2),
        policy=PolicyConfig.named("ordered-basis"),
    )
    rep = run_campaign(cfg, 100, seed=0)
    assert rep.abort_rate == 1.0 and rep.attack_success_rate == 0.0


def test_misidentification_k1():
    # with one copy per basis, agreement in the computational basis is automatic
    assert estimate_misidentification(1, 2000, seed=0) == 1.0


def test_misidentification_k2():
    assert abs(estimate_misidentification(2, 20000, seed=1) - 0.5) < 0.02


def test_csv_and_json_export():
    reps = [run_campaign(RANDOM16, 50, seed=s, scenario=f"s{s}") for s in (1, 2)]
    rows = list(csv.DictReader(io.StringIO(reports_to_csv(reps))))
    assert [r["scenario"] for r in rows] == ["s1", "s2"]
    assert float(rows[0]["mean_qber"]) == pytest.approx(reps[0].mean_qber)
    d = json.loads(reps[0].to_json())
    assert StatsReport(**d) == reps[0]
    assert "trials=50" in reps[0].summary()


def test_invalid_trials():
    with pytest.raises(ValueError):
        run_trials(RANDOM16, 0, seed=0)
    with pytest.raises(ValueError):
        aggregate([])
