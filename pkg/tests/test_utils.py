import numpy as np
import pytest

from exceptions import DomainError
from utils import distance_grid, parse_length, parse_temperature


@pytest.mark.parametrize("text, expected", [
    ("0.5um", 0.5e-6),
    ("107nm", 107e-9),
    ("107 nm", 107e-9),
    ("3e-6", 3e-6),
    ("2µm", 2e-6),
    ("1.5mm", 1.5e-3),
    ("0", 0.0),
    (".25m", 0.25),
])
def test_parse_length(text, expected):
    assert parse_length(text) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("text", ["abc", "5 parsecs", "-1um", "um"])
def test_parse_length_rejects(text):
    with pytest.raises(DomainError):
        parse_length(text)


@pytest.mark.parametrize("text, expected", [("300", 300.0), ("300K", 300.0), ("0", 0.0), (77.5, 77.5)])
def test_parse_temperature(text, expected):
    assert parse_temperature(text) == expected


@pytest.mark.parametrize("text", ["-4", "300C", "warm"])
def test_parse_temperature_rejects(text):
    with pytest.raises(DomainError):
        parse_temperature(text)


class TestDistanceGrid:
    def test_log_grid(self):
        grid = distance_grid(0.1e-6, 10e-6, 3)
        np.testing.assert_allclose(grid, [0.1e-6, 1e-6, 10e-6], rtol=1e-14)

    def test_linear_grid(self):
        grid = distance_grid(1e-6, 3e-6, 3, scale="linear")
        np.testing.assert_allclose(grid, [1e-6, 2e-6, 3e-6], rtol=1e-14)

    def test_single_point(self):
        assert distance_grid(2e-6, 5e-6, 1).tolist() == [2e-6]

    @pytest.mark.parametrize("args", [(0.0, 1e-6, 5), (2e-6, 1e-6, 5), (1e-6, 2e-6, 0)])
    def test_invalid(self, args):
        with pytest.raises(DomainError):
            distance_grid(*args)

    def test_unknown_scale(self):
        with pytest.raises(DomainError):
            distance_grid(1e-6, 2e-6, 4, scale="cubic")
