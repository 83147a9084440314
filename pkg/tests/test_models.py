import math

import numpy as np
import pytest
from scipy import stats

from inarlab.models import (
    AtomsMixing,
    BetaMixing,
    Degenerate,
    GeneralMixing,
    InarModel,
    RandomizedModel,
)
from inarlab.rng import RngStream


def test_inar_model_rejects_bad_parameters():
    with pytest.raises(ValueError):
        InarModel(0.0, 0.5)
    with pytest.raises(ValueError):
        InarModel(1.0, 0.0)
    with pytest.raises(ValueError):
        InarModel(1.0, 1.0)


def test_beta_mixing_psi1_and_ranges():
    assert BetaMixing(0.0, 0.5).psi1 == pytest.approx(1.5, abs=1e-12)
    assert BetaMixing(0.0, 2.0).psi1 == pytest.approx(3.0, abs=1e-12)
    with pytest.raises(ValueError):
        BetaMixing(-1.0, 0.5)
    with pytest.raises(ValueError):
        BetaMixing(0.0, -1.0)


def test_general_mixing_normalization_enforced():
    # density 2 * (1-x)^0.5 integrates to 4/3, not 1
    with pytest.raises(ValueError):
        GeneralMixing(psi=lambda x: 2.0 * np.ones_like(np.asarray(x)),
                      beta=0.5, psi1=2.0, psi_sup=2.0)


def test_general_mixing_limit_spot_check():
    # psi tends to 2 at 1, not the declared 1.0
    bad = lambda x: 1.0 + np.asarray(x)
    with pytest.raises(ValueError):
        GeneralMixing(psi=bad, beta=0.0, psi1=1.0, psi_sup=2.0)


def test_constant_psi_general_reduces_to_beta():
    beta = 0.5
    law = GeneralMixing(
        psi=lambda x: (beta + 1.0) * np.ones_like(np.asarray(x, dtype=float)),
        beta=beta, psi1=beta + 1.0, psi_sup=beta + 1.0,
    )
    draws = law.sample(RngStream(5).generator(), size=10**6)
    stat = stats.kstest(draws, lambda x: stats.beta.cdf(x, 1.0, beta + 1.0)).statistic
    assert stat < 0.002


def test_general_rejection_cap_signals_bad_envelope():
    beta = 0.5
    law = GeneralMixing(
        psi=lambda x: (beta + 1.0) * np.ones_like(np.asarray(x, dtype=float)),
        beta=beta, psi1=beta + 1.0, psi_sup=(beta + 1.0) * 5e7,
    )
    with pytest.raises(RuntimeError):
        law.sample(RngStream(5).generator(), size=4)


def test_atoms_mixing_validation_and_expectation():
    law = AtomsMixing([0.2, 0.8], [0.5, 0.5])
    assert law.expect(lambda x: x) == pytest.approx(0.5)
    assert law.survival(0.5) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        AtomsMixing([0.2, 1.2], [0.5, 0.5])
    with pytest.raises(ValueError):
        AtomsMixing([0.2, 0.8], [0.6, 0.5])


def test_degenerate_consumes_no_randomness():
    gen = RngStream(3).generator()
    before = gen.bit_generator.state["state"]["state"]
    Degenerate(0.3).sample(gen)
    after = gen.bit_generator.state["state"]["state"]
    assert before == after


def test_randomized_model_requires_mixing():
    with pytest.raises(TypeError):
        RandomizedModel(1.0, 0.5)
    m = RandomizedModel(1.0, Degenerate(0.5))
    assert m.conditional(0.5).stationary_mean == pytest.approx(2.0)
