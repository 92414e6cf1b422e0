import json

import numpy as np
import pytest

from hybridcov.distributions import RngStream
from hybridcov.exceptions import EmptyInputError, ParseError
from hybridcov.fisher import TestOutcome, run_test
from hybridcov.io import parse_outcome, read_matrix, write_matrix, write_outcome


def _write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_read_simple(tmp_path):
    x = read_matrix(_write(tmp_path, "1,2\n3,4\n"))
    np.testing.assert_array_equal(x, [[1, 2], [3, 4]])


def test_header(tmp_path):
    x = read_matrix(_write(tmp_path, "a,b\n1,2\n"), has_header=True)
    assert x.shape == (1, 2)


def test_scientific_and_delimiter(tmp_path):
    x = read_matrix(_write(tmp_path, "1e-3;-2.5E2\n"), delimiter=";")
    np.testing.assert_array_equal(x, [[1e-3, -250.0]])


def test_ragged(tmp_path):
    with pytest.raises(ParseError) as info:
        read_matrix(_write(tmp_path, "1,2\n3\n"))
    assert info.value.line == 2


def test_non_numeric(tmp_path):
    with pytest.raises(ParseError) as info:
        read_matrix(_write(tmp_path, "1,2\n3,x\n"))
    assert (info.value.line, info.value.column) == (2, 2)


def test_non_finite(tmp_path):
    with pytest.raises(ParseError):
        read_matrix(_write(tmp_path, "1,nan\n"))


def test_empty(tmp_path):
    with pytest.raises(EmptyInputError):
        read_matrix(_write(tmp_path, ""))


def test_matrix_roundtrip(tmp_path, rng):
    x = rng.standard_normal((7, 4)) * 10.0 ** rng.integers(-200, 200, size=(7, 4))
    path = tmp_path / "x.csv"
    write_matrix(path, x)
    assert np.array_equal(read_matrix(path), x)


@pytest.fixture(scope="module")
def outcome():
    gen = np.random.default_rng(3)
    return run_test(gen.standard_normal((30, 40)), gen.standard_normal((30, 40)))


def test_json_roundtrip(outcome):
    d = parse_outcome(write_outcome(outcome, "json", seed=5))
    assert d["t1"] == outcome.frob.t1
    assert d["p1"] == outcome.frob.p1
    assert d["t2"] == outcome.eigen.statistic
    assert d["p2"] == outcome.eigen.p2
    assert d["t_fc"] == outcome.t_fc
    assert d["q"] == outcome.q
    assert d["reject"] is outcome.reject
    assert d["seed"] == 5
    assert {"alpha", "m", "diagnostics", "versions"} <= d.keys()


def test_text_decision_line(outcome):
    text = write_outcome(outcome, "text")
    assert outcome.reject is False
    assert "FAIL TO REJECT H0" in text


def test_diagnostics_rendered(outcome):
    flagged = TestOutcome(
        outcome.frob, outcome.eigen, outcome.t_fc, outcome.alpha, outcome.q,
        outcome.reject, outcome.m, ["warning: spike covariance repaired to PSD"],
    )
    d = json.loads(write_outcome(flagged))
    assert d["diagnostics"] == ["warning: spike covariance repaired to PSD"]
    assert "repaired to PSD" in write_outcome(flagged, "text")


def test_multi_key():
    gen = np.random.default_rng(4)
    scale = np.sqrt(np.r_[30.0, 20.0, np.ones(38)])
    out = run_test(
        gen.standard_normal((40, 40)) * scale, gen.standard_normal((40, 40)) * scale,
        m=2, draws=2000, rng=RngStream(1),
    )
    d = parse_outcome(write_outcome(out))
    assert "t2m" in d and "t2" not in d and d["mc_draws"] == 2000
