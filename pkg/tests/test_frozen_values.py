import mpmath as mp

import frozen_values as fv


def setup_module():
    mp.mp.dps = 30


def test_private_time_value():
    assert abs(mp.mpf(16) ** mp.mpf("0.6") - fv.PRIVATE_32_OVER_2_BETA06) < 1e-15


def test_shared_time_value():
    assert abs(4 + mp.mpf(4) ** mp.mpf("0.45") - fv.SHARED_64_N16_BETA045) < 1e-15


def test_miss_rate_value():
    v = mp.mpf("0.01") + mp.mpf("0.99") * mp.mpf("0.1") * mp.mpf("0.8") / mp.sqrt(16)
    assert abs(v - fv.M1_DEPTH1_EXAMPLE) < 1e-15


def test_two_level_delay_value():
    v = mp.mpf("0.9") * 1 + mp.mpf("0.1") * mp.mpf("0.8") * 6 + mp.mpf("0.1") * mp.mpf("0.2") * 200
    assert abs(v - fv.D12_EXAMPLE) < 1e-15


def test_area_value():
    assert abs(mp.mpf("0.25") * mp.mpf(2) ** mp.mpf("1.4") - fv.AREA_2SIGMA) < 1e-15
