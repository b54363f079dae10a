import math

import numpy as np
import pytest

from models.fock import Parity
from simulation.analytic import (
    analytic_average_certainty,
    analytic_even_parity_prob,
    analytic_odd_parity_prob,
    analytic_pair_certainty,
)


def test_even_at_zero_separation():
    assert analytic_even_parity_prob(0.8, 0.8) == 1.0


def test_unit_separation():
    assert analytic_even_parity_prob(1.5, 0.5) == pytest.approx((1 + math.exp(-2)) / 2, abs=1e-15)
    assert analytic_even_parity_prob(1.5, 0.5) == pytest.approx(0.56767, abs=1e-5)
    assert analytic_odd_parity_prob(1.5, 0.5) == pytest.approx(0.43233, abs=1e-5)


def test_even_asymptote():
    assert analytic_even_parity_prob(5.0, 0.0) - 0.5 < 1e-21


def test_odd_at_zero_separation():
    assert analytic_odd_parity_prob(-1.3, -1.3) == 0.0


def test_even_plus_odd_is_exactly_one():
    gammas = np.linspace(-3, 3, 31)
    betas = np.linspace(-3, 3, 37)
    G, B = np.meshgrid(gammas, betas)
    assert np.all(analytic_even_parity_prob(G, B) + analytic_odd_parity_prob(G, B) == 1.0)


def test_average_certainty_at_beta_equal_gamma():
    even = analytic_average_certainty(1.0, 1.0, "even")
    odd = analytic_average_certainty(1.0, 1.0, Parity.ODD)
    assert even.value == pytest.approx(0.75 + math.exp(-8) / 4, abs=1e-15)
    assert even.value == pytest.approx(0.7500839, abs=1e-7)
    assert odd.value == pytest.approx(0.2499161, abs=1e-7)
    assert even.in_validity_region


def test_origin_is_flagged_outside_region():
    c = analytic_average_certainty(0.0, 0.0, "even")
    assert c.value == 1.0
    assert not c.in_validity_region
    assert c.to_dict()["parity"] == "even"


@pytest.mark.parametrize("parity", ["even", "odd"])
def test_average_certainty_symmetries(parity, rng):
    for gamma, beta in rng.uniform(-3, 3, size=(50, 2)):
        v = analytic_average_certainty(gamma, beta, parity).value
        assert analytic_average_certainty(gamma, -beta, parity).value == pytest.approx(v, abs=1e-15)
        assert analytic_average_certainty(-gamma, beta, parity).value == pytest.approx(v, abs=1e-15)


def test_average_certainties_are_complementary(rng):
    for gamma, beta in rng.uniform(-3, 3, size=(50, 2)):
        total = (analytic_average_certainty(gamma, beta, "even").value
                 + analytic_average_certainty(gamma, beta, "odd").value)
        assert total == pytest.approx(1.0, abs=1e-15)


def test_pair_certainty_reduces_to_paired_form():
    assert analytic_pair_certainty(1.3, 0.4, -0.4, "odd") == pytest.approx(
        analytic_average_certainty(1.3, 0.4, "odd").value, abs=1e-15
    )
