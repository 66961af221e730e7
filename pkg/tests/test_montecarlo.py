import math

import numpy as np
import pytest

from dynrel import distributions as dist
from dynrel.analytic import analyze_drbd, pand_integral
from dynrel.dsl import parse_model
from dynrel.errors import DomainError
from dynrel.montecarlo import (
    block_uniforms, estimate_both, estimate_reliability, estimate_unreliability,
    sample_scenario, scenarios,
)

N = 1_000_000

EXP1 = parse_model("dft E { basic A exponential(rate=1.0); top A; }")
PAND = parse_model("""dft P { basic X exponential(rate=1.0); basic Y exponential(rate=1.0);
                      gate T pand X Y; top T; }""")


def spare_model(dormancy):
    return parse_model(f"""dft W {{ basic Y exponential(rate=1.0);
        spare S active exponential(rate=1.0) dormancy({dormancy}); gate T wsp Y S; top T; }}""")


def test_fixed_draws_give_inverse_cdf():
    m = parse_model("""dft M { basic A exponential(rate=1.0); basic B exponential(rate=2.0);
                       basic C weibull(shape=2, scale=3); gate T and A B C; top T; }""")
    draws = [0.25, 0.5, 0.75]
    a = sample_scenario(m, draws)
    for eid, u in zip("ABC", draws):
        assert a.time(eid) == pytest.approx(float(dist.sample(m.events[eid], u)), rel=1e-15)
        assert math.isfinite(a.time(eid))


def test_spare_scenario_by_hand():
    m = spare_model(0.5)
    # Y = -ln(1-0.5), dormant life with rate 0.5 from u=0.1 is short, so the spare fails dormant
    a = sample_scenario(m, [0.5, 0.1, 0.9])
    y = math.log(2)
    x_a, x_d = a.spare("S")
    assert x_a == math.inf and x_d == pytest.approx(-math.log(0.9) / 0.5)
    assert x_d <= y
    # long dormant life: the spare is activated at Y and lives its active life from there
    x_a, x_d = sample_scenario(m, [0.5, 0.9, 0.5]).spare("S")
    assert x_d == math.inf and x_a == pytest.approx(y + math.log(2))


def test_cold_spare_never_fails_dormant():
    a = scenarios(spare_model(0), block_uniforms(1, 0, 10_000, 3))
    x_a, x_d = a.spare("S")
    assert np.all(np.isinf(x_d)) and np.all(np.isfinite(x_a))


def test_hot_spare_fails_dormant_half_the_time():
    a = scenarios(spare_model(1), block_uniforms(3, 0, N, 3))
    _, x_d = a.spare("S")
    p = np.mean(np.isfinite(x_d))
    assert abs(p - 0.5) <= 3 * math.sqrt(0.25 / N)


def test_uniforms_open_interval_and_deterministic():
    u = block_uniforms(5, 2, 1000, 4)
    assert u.shape == (1000, 4) and np.all((u > 0) & (u < 1))
    np.testing.assert_array_equal(u, block_uniforms(5, 2, 1000, 4))
    assert not np.array_equal(u, block_uniforms(5, 3, 1000, 4))


def test_single_exponential():
    est = estimate_unreliability(EXP1, 1.0, N, seed=11)
    assert abs(est.value - (1 - math.exp(-1))) <= 3 * est.std_err
    assert est.method == "mc-unreliability" and est.n == N and est.seed == 11
    lo, hi = est.ci95
    assert lo < est.value < hi
    rel = estimate_reliability(EXP1, 1.0, N, seed=11)
    assert abs(rel.value - math.exp(-1)) <= 3 * rel.std_err


def test_pand():
    est = estimate_unreliability(PAND, 1.0, N, seed=12)
    exact = pand_integral(dist.Exponential(1.0), dist.Exponential(1.0), 1.0).value
    assert abs(est.value - exact) <= 3 * est.std_err


def test_time_zero():
    assert estimate_unreliability(PAND, 0.0, 1000, seed=1).value == 0.0
    assert estimate_reliability(EXP1, 0.0, 1000, seed=1).value == 1.0


def test_shared_scenarios_are_complementary():
    u, r = estimate_both(PAND, 1.3, 100_000, seed=9)
    assert u.value + r.value == 1.0
    assert u.std_err == r.std_err


def test_dbw_matches_structural(dbw_drbd):
    est = estimate_reliability(dbw_drbd, 1000.0, N, seed=42)
    exact = analyze_drbd(dbw_drbd, 1000.0).value
    assert abs(est.value - exact) <= 3 * est.std_err


def test_worker_count_does_not_change_result():
    m = spare_model(0.3)
    runs = [estimate_unreliability(m, 1.0, 300_000, seed=77, workers=w) for w in (1, 3, 8)]
    assert runs[0] == runs[1] == runs[2]


def test_partial_last_block():
    # n is not a multiple of the block size
    a = estimate_unreliability(EXP1, 1.0, 70_000, seed=4)
    b = estimate_unreliability(EXP1, 1.0, 70_000, seed=4, workers=2)
    assert a == b


@pytest.mark.parametrize("kw", [dict(n=0), dict(seed=-1), dict(seed=1 << 64), dict(t=-1.0),
                                dict(t=math.inf)])
def test_bad_arguments(kw):
    args = dict(t=1.0, n=10, seed=0) | kw
    with pytest.raises(DomainError):
        estimate_unreliability(EXP1, args["t"], args["n"], args["seed"])
