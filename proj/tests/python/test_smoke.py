import pytest

import catcluster


def test_classify_null_root():
    r = catcluster.classify("Dn_s1", 4, "3_0 3_4")
    assert not r["real"]
    assert r["m_delta"] == 1


def test_g_inverse_delta():
    assert catcluster.g_inverse("Dn_s1", 4, [1, 1, 1, 2, 1]) == "3_0 3_4"


def test_transition_a2():
    assert catcluster.transition("A2", "121", "212", [0, 0, 1]) == [1, 0, 0]


def test_bad_family_raises():
    with pytest.raises(ValueError):
        catcluster.classify("An_s1", 2, "1_0")


def test_cli_and_verify():
    code, out, err = catcluster.run_cli(["verify", "--filter", "sec6"])
    assert code == 0, err
    assert out.count("sec6/") == 8
    rows = catcluster.verify("ginv-delta")
    assert rows and all(r["pass"] for r in rows)
