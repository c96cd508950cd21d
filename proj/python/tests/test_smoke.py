import math

import pytest

import anderson_spectra as asp


def test_seed_golden():
    assert asp.seed_for_trial(0x12345678, 7) == 15498728679524188340


def test_potential_is_reproducible():
    a = asp.sample_potential(1000, 42)
    assert a == asp.sample_potential(1000, 42)
    assert set(a) == {-1, 1}


def test_free_chain_spectrum():
    n = 50
    ev = asp.eigenvalues([1] * n, 0.0, -3.0, 3.0)
    expected = sorted(2 * math.cos(k * math.pi / (n + 1)) for k in range(1, n + 1))
    assert max(abs(x - y) for x, y in zip(ev, expected)) < 1e-10
    assert asp.sturm_count([1] * 100, 0.0, 0.0) == 50


def test_lyapunov_positive_with_disorder():
    value, stderr = asp.lyapunov_exponent(0.5, 1.0, 2000, 20, seed=3)
    assert value > 5 * stderr


def test_validate_coupling():
    r = asp.validate_coupling(1 / 3, [-1, 3], 10.0, 0.5)
    assert r["degree"] == 1
    assert r["large_conjugate"] is False
    with pytest.raises(asp.InvalidArgument):
        asp.validate_coupling(0.5, [-1, 3], 10.0, 0.5)


def test_run_experiment():
    config = {"lambda": 0.5, "E0": 0.5, "N": 100, "deltas": [0.01, 0.02], "trials": 500, "seed": 1}
    summary, csv = asp.run_experiment("wegner", config)
    assert summary["config"]["band_margin"] == 0.1
    assert len(summary["results"]["cells"]) == 2
    assert csv.splitlines()[0].startswith("delta,")
    _, csv4 = asp.run_experiment("wegner", config, threads=4)
    assert csv4 == csv
    with pytest.raises(asp.InvalidArgument):
        asp.run_experiment("wegner", {"lambda": 0.5})
