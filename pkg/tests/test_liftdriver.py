import numpy as np
import pytest

from liftlab.liftdriver import DriverError, EndToEndModel, lifting_driver


def test_driver_m3():
    reports, e2e = lifting_driver("A1", p=5, max_precision=3, seed=0)
    assert [r["level"] for r in reports] == [3]
    assert all(pl["membership"] for r in reports for pl in r["places"])


def test_driver_m5_all_levels_verified():
    reports, e2e = lifting_driver("A1", p=5, max_precision=5, seed=1)
    assert [r["level"] for r in reports] == [3, 4, 5]
    for r in reports:
        variants = [pl["variant"] for pl in r["places"]]
        assert variants == ["unr2", "ram2", "ordinary"]
        assert all(pl["membership"] for pl in r["places"])


def test_driver_uses_extra_cocycles():
    reports, _ = lifting_driver("A1", p=5, max_precision=5, seed=3)
    assert any(pl["s_part"] for r in reports for pl in r["places"])


def test_driver_other_seed_and_p():
    reports, _ = lifting_driver("A1", p=7, max_precision=4, seed=2)
    assert [r["level"] for r in reports] == [3, 4]


def test_sabotaged_condition_dimension_detected():
    e2e = EndToEndModel("A1", 5, seed=0)
    # corrupting a local condition's dimension breaks the setup solver
    # (the Poitou-Tate correction matrix stops being bijective)
    e2e.local_bases[0] = e2e.local_bases[0][:-1]
    with pytest.raises(DriverError):
        e2e._setup_correction_solver()
