import math

import numpy as np
import pytest

from fblmimo.constants import MC_TARGET
from fblmimo.exceptions.contract_error import ContractError
from fblmimo.exceptions.domain_error import DomainError
from fblmimo.mc import McEstimate, compare, estimate, evaluate, jensen_check, merge
from fblmimo.randmat import AntennaConfig

CFG = AntennaConfig(M=4, N=3)


def fixed_estimate(mean: float, count: int, variance: float) -> McEstimate:
    return McEstimate(
        target=MC_TARGET.CAPACITY, M=4, N=3, rho=1.0, seed=0,
        trials=count, count=count, mean=mean, m2=variance * (count - 1),
    )


def test_empty_estimate():
    empty = McEstimate.empty(MC_TARGET.CAPACITY, CFG, 10.0, 1)
    assert empty.trials == 0
    assert empty.rejection_rate == 0.0
    assert math.isnan(empty.variance)
    assert math.isnan(empty.std_error)
    assert not empty.valid


@pytest.mark.parametrize("split", [1000, 1234])
def test_merged_halves_equal_one_run(split):
    whole = estimate(MC_TARGET.CAPACITY, CFG, 10.0, 3000, 5)
    head = estimate(MC_TARGET.CAPACITY, CFG, 10.0, split, 5)
    tail = estimate(MC_TARGET.CAPACITY, CFG, 10.0, 3000 - split, 5, start=split)
    merged = merge(head, tail)
    assert merged.trials == whole.trials == 3000
    assert merged.count == whole.count
    assert merged.mean == pytest.approx(whole.mean, rel=1e-12)
    assert merged.m2 == pytest.approx(whole.m2, rel=1e-12)


def test_merge_is_symmetric_and_has_an_identity():
    a = estimate(MC_TARGET.DISPERSION, CFG, 10.0, 500, 5)
    b = estimate(MC_TARGET.DISPERSION, CFG, 10.0, 700, 5, start=500)
    ab, ba = merge(a, b), merge(b, a)
    assert ab.mean == pytest.approx(ba.mean, rel=1e-13)
    assert ab.m2 == pytest.approx(ba.m2, rel=1e-13)
    empty = McEstimate.empty(MC_TARGET.DISPERSION, CFG, 10.0, 5)
    assert merge(empty, a) == a
    assert merge(a, empty) == a


def test_merge_refuses_other_runs():
    a = estimate(MC_TARGET.CAPACITY, CFG, 10.0, 100, 5)
    with pytest.raises(ContractError):
        merge(a, estimate(MC_TARGET.CAPACITY, CFG, 10.0, 100, 6))
    with pytest.raises(ContractError):
        merge(a, estimate(MC_TARGET.DISPERSION, CFG, 10.0, 100, 5))


def test_workers_do_not_change_the_estimate():
    one = estimate(MC_TARGET.DISPERSION, CFG, 10.0, 2500, 9, workers=1)
    four = estimate(MC_TARGET.DISPERSION, CFG, 10.0, 2500, 9, workers=4)
    assert one == four
    assert one.as_row() == four.as_row()


def test_replay_is_deterministic():
    assert estimate(MC_TARGET.CAPACITY, CFG, 3.0, 1500, 1) == estimate(MC_TARGET.CAPACITY, CFG, 3.0, 1500, 1)
    assert estimate(MC_TARGET.CAPACITY, CFG, 3.0, 1500, 1) != estimate(MC_TARGET.CAPACITY, CFG, 3.0, 1500, 2)


def test_std_error_shrinks_like_one_over_sqrt_trials():
    small = estimate(MC_TARGET.CAPACITY, CFG, 10.0, 500, 3)
    large = estimate(MC_TARGET.CAPACITY, CFG, 10.0, 50000, 3)
    assert 7.0 < small.std_error / large.std_error < 13.0


def test_single_antenna_capacity():
    # e * E1(1) / ln 2
    est = estimate(MC_TARGET.CAPACITY, AntennaConfig(M=1, N=1), 1.0, 20000, 42)
    assert compare(0.86036, est).agrees
    assert est.valid


def test_evaluate():
    cfg = AntennaConfig(M=2, N=2)
    np.testing.assert_allclose(evaluate(MC_TARGET.CAPACITY, np.array([[3.0, 1.0]]), cfg, 2.0), [3.0])
    np.testing.assert_allclose(evaluate(MC_TARGET.INV_EIGEN_CROSS_SUM, np.array([[2.0, 1.0]]), cfg, 2.0), [1.0])
    np.testing.assert_allclose(evaluate(MC_TARGET.SHIFTED_INV_SUM, np.array([[2.0, 2.0]]), cfg, 2.0), [0.5])
    np.testing.assert_allclose(evaluate(MC_TARGET.INV_EIGEN_SQ_SUM, np.array([[2.0, 1.0]]), cfg, 2.0), [1.25])


def test_heavy_tailed_flag():
    square = estimate(MC_TARGET.INV_EIGEN_SUM, AntennaConfig(M=3, N=3), 10.0, 200, 1)
    assert square.heavy_tailed
    assert square.as_row()["heavy_tailed"] is True
    assert not estimate(MC_TARGET.CAPACITY, AntennaConfig(M=3, N=3), 10.0, 200, 1).heavy_tailed
    assert not estimate(MC_TARGET.INV_EIGEN_SUM, AntennaConfig(M=6, N=3), 10.0, 200, 1).heavy_tailed


@pytest.mark.parametrize("kwargs", [
    dict(target="bogus", rho=1.0, trials=10),
    dict(target=MC_TARGET.CAPACITY, rho=0.0, trials=10),
    dict(target=MC_TARGET.CAPACITY, rho=1.0, trials=1),
    dict(target=MC_TARGET.CAPACITY, rho=1.0, trials=10, workers=0),
    dict(target=MC_TARGET.CAPACITY, rho=1.0, trials=10, start=-1),
])
def test_estimate_domain(kwargs):
    kwargs = dict(kwargs)
    with pytest.raises(DomainError):
        estimate(kwargs.pop("target"), CFG, kwargs.pop("rho"), kwargs.pop("trials"), 1, **kwargs)


def test_estimate_accepts_target_names():
    assert estimate("capacity", CFG, 1.0, 10, 1).target is MC_TARGET.CAPACITY


def test_compare():
    est = fixed_estimate(1.0, 100, 0.01)
    assert est.std_error == pytest.approx(0.01)
    close = compare(1.02, est)
    assert close.agrees
    assert close.closed_below
    far = compare(1.05, est)
    assert far.tolerance == pytest.approx(0.03)
    assert not far.agrees
    assert not far.closed_below


@pytest.mark.parametrize("rho", [1.0, 3.1623, 10.0, 31.623])
@pytest.mark.parametrize("M, N", [(4, 4), (8, 16), (16, 8), (32, 64), (64, 32)])
def test_jensen_holds(M, N, rho):
    check = jensen_check(AntennaConfig(M=M, N=N), rho, 500, 1)
    assert check.holds
    assert check.mean_sqrt <= check.sqrt_mean
