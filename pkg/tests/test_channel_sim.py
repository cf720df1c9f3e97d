"""Tests for per-slot transmission, block simulation and the cascade channel."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import stats

from polarfade.exceptions import InvalidArgumentError
from polarfade.models import InversionPolicy, PowerBudget
from polarfade.services.channel_sim import (
    cascade_channel,
    cascade_observations,
    count_errors,
    demodulate,
    inverted_observations,
    propagate,
    simulate_awgn_block,
    simulate_block,
    simulate_blocks,
    transmit_symbol,
)
from polarfade.services.construction import construct
from polarfade.services.fading import GaussianFading, PointMassFading, UniformAbsFading
from polarfade.services.power_control import erasure_prob, make_policy


def _policy(delta: float) -> InversionPolicy:
    return InversionPolicy(delta=delta, delta_bar=delta, delta_peak=0.0)


class TestTransmitSymbol:
    def test_inverts_positive_gain(self):
        decision = transmit_symbol(0, 2.0, 4.0, _policy(1.0))
        assert decision.power_T == 1.0
        assert decision.symbol == 1.0

    def test_sign_follows_gain_and_bit(self):
        decision = transmit_symbol(1, -2.0, 4.0, _policy(1.0))
        assert decision.power_T == 1.0
        assert decision.symbol == 1.0

    def test_skips_weak_gain(self):
        decision = transmit_symbol(0, 0.1, 1.0, _policy(0.5))
        assert decision.power_T == 0.0
        assert decision.symbol == 0.0

    def test_zero_gain_is_skipped_without_truncation(self):
        assert transmit_symbol(1, 0.0, 1.0, _policy(0.0)).power_T == 0.0

    def test_symbol_energy_matches_power(self):
        decision = transmit_symbol(1, 0.7, 2.0, _policy(0.5))
        assert decision.symbol**2 == pytest.approx(decision.power_T)

    def test_inversion_identity(self, rng):
        P = 2.5
        for h in rng.normal(0.0, 1.0, 200):
            for bit in (0, 1):
                decision = transmit_symbol(bit, h, P, _policy(0.1))
                if decision.power_T > 0:
                    assert h * decision.symbol == pytest.approx(
                        (1 - 2 * bit) * math.sqrt(P), rel=1e-12
                    )

    def test_rejects_bad_bit(self):
        with pytest.raises(InvalidArgumentError):
            transmit_symbol(2, 1.0, 1.0, _policy(0.0))


class TestPropagate:
    def test_silent_slot_is_pure_noise(self):
        expected = math.sqrt(2.0) * np.random.default_rng(3).standard_normal()
        decision = transmit_symbol(0, 0.01, 1.0, _policy(0.5))
        assert propagate(decision, 0.01, 2.0, np.random.default_rng(3)) == expected

    def test_vanishing_noise_recovers_inverted_symbol(self, rng):
        decision = transmit_symbol(1, 1.5, 1.0, _policy(0.0))
        y = propagate(decision, 1.5, 1e-30, rng)
        assert y == pytest.approx(-1.0, rel=1e-12)

    def test_seeded_output_is_reproducible(self):
        decision = transmit_symbol(0, 1.5, 1.0, _policy(0.0))
        first = propagate(decision, 1.5, 1.0, np.random.default_rng(42))
        second = propagate(decision, 1.5, 1.0, np.random.default_rng(42))
        assert first == second

    def test_rejects_nonpositive_noise(self, rng):
        with pytest.raises(InvalidArgumentError):
            propagate(transmit_symbol(0, 1.0, 1.0, _policy(0.0)), 1.0, 0.0, rng)


class TestDemodulate:
    def test_llr_favours_bit_zero(self):
        observation, llr = demodulate(1.0, 1.0, 1.0, 1.0, _policy(0.0))
        assert not observation.erased
        assert llr == pytest.approx(2.0)

    def test_zero_sample(self):
        _, llr = demodulate(0.0, 1.0, 1.0, 1.0, _policy(0.0))
        assert llr == 0.0

    def test_weak_gain_is_erased(self):
        observation, llr = demodulate(3.0, 0.2, 1.0, 1.0, _policy(0.5))
        assert observation.erased
        assert math.isnan(llr)

    def test_skip_and_erase_agree(self, rng):
        policy = _policy(0.6)
        for h in rng.normal(0.0, 1.0, 500):
            skipped = transmit_symbol(0, h, 1.0, policy).power_T == 0.0
            erased = demodulate(0.0, h, 1.0, 1.0, policy)[0].erased
            assert skipped == erased


class TestCascadeChannel:
    def test_never_erased_at_zero(self, rng):
        assert not any(cascade_channel(0, 0.0, 1.0, 1.0, rng).erased for _ in range(200))

    def test_always_erased_at_one(self, rng):
        assert all(cascade_channel(1, 1.0, 1.0, 1.0, rng).erased for _ in range(200))

    def test_erasure_fraction(self):
        rng = np.random.default_rng(99)
        y = cascade_observations(np.zeros(1_000_000, dtype=np.uint8), 0.3, 1.0, 1.0, rng)
        fraction = np.isnan(y).mean()
        assert abs(fraction - 0.3) <= 3.0 * math.sqrt(0.3 * 0.7 / 1_000_000)

    def test_rejects_bad_eps(self, rng):
        with pytest.raises(InvalidArgumentError):
            cascade_channel(0, 1.5, 1.0, 1.0, rng)


class TestInvertedObservations:
    def test_average_power_within_budget(self, quad):
        fading = GaussianFading(1.0)
        budget = PowerBudget(P=1.0, Q=2.0)
        policy = make_policy(budget, fading, quad)
        rng = np.random.default_rng(7)
        _, power_T = inverted_observations(
            np.zeros(1 << 20, dtype=np.uint8), 1.0, 1.0, fading, policy.delta, rng
        )
        stderr = power_T.std(ddof=1) / math.sqrt(power_T.size)
        assert power_T.mean() <= 2.0 + 3.0 * stderr

    def test_peak_power_respected(self, quad):
        fading = GaussianFading(1.0)
        budget = PowerBudget(P=1.0, Q=5.0, Qpeak=3.0)
        policy = make_policy(budget, fading, quad)
        _, power_T = inverted_observations(
            np.zeros(100_000, dtype=np.uint8), 1.0, 1.0, fading, policy.delta,
            np.random.default_rng(8),
        )
        assert power_T.max() <= 3.0 * (1.0 + 1e-12)

    def test_matches_cascade_channel_in_law(self, quad):
        fading = GaussianFading(1.0)
        budget = PowerBudget(P=1.0, Q=2.0)
        policy = make_policy(budget, fading, quad)
        eps = erasure_prob(policy.delta, fading)
        codeword = np.random.default_rng(20).integers(0, 2, 200_000, dtype=np.uint8)

        inverted, _ = inverted_observations(
            codeword, 1.0, 1.0, fading, policy.delta, np.random.default_rng(21)
        )
        cascade = cascade_observations(codeword, eps, 1.0, 1.0, np.random.default_rng(22))

        for bit in (0, 1):
            sent = codeword == bit
            tolerance = 3.0 * math.sqrt(eps * (1.0 - eps) / np.count_nonzero(sent))
            for observed in (inverted[sent], cascade[sent]):
                assert abs(np.isnan(observed).mean() - eps) <= tolerance

            a, b = inverted[sent], cascade[sent]
            result = stats.ks_2samp(a[~np.isnan(a)], b[~np.isnan(b)])
            assert result.pvalue > 0.01


class TestSimulateBlock:
    def test_noiseless_erasure_free_decodes_message(self, rng, quad):
        code = construct(64, 32, 2.0)
        fading = UniformAbsFading(1.0, 2.0)
        budget = PowerBudget(P=2.0, Q=10.0, sigma2=1e-12)
        policy = make_policy(budget, fading, quad)
        assert policy.delta == 0.0
        message = rng.integers(0, 2, code.K, dtype=np.uint8)
        decoded, diagnostics = simulate_block(code, message, budget, fading, policy, rng)
        assert np.array_equal(decoded, message)
        assert diagnostics.erasures == 0

    def test_unit_point_mass_matches_plain_awgn(self, quad):
        code = construct(64, 32, 1.0)
        fading = PointMassFading(1.0)
        budget = PowerBudget(P=1.0, Q=1.0)
        policy = make_policy(budget, fading, quad)
        for seed in range(20):
            message = np.random.default_rng(1000 + seed).integers(0, 2, code.K, dtype=np.uint8)
            faded, _ = simulate_block(
                code, message, budget, fading, policy, np.random.default_rng(seed)
            )
            plain = simulate_awgn_block(code, message, 1.0, 1.0, np.random.default_rng(seed))
            assert np.array_equal(faded, plain)

    def test_diagnostics(self, quad):
        code = construct(256, 128, 1.0)
        fading = GaussianFading(1.0)
        budget = PowerBudget(P=1.0, Q=2.0, Qpeak=4.0)
        policy = make_policy(budget, fading, quad)
        message = np.zeros(code.K, dtype=np.uint8)
        _, diagnostics = simulate_block(
            code, message, budget, fading, policy, np.random.default_rng(5)
        )
        assert 0 < diagnostics.erasures < code.N
        assert diagnostics.energy > 0.0
        assert diagnostics.peak_power <= 4.0 * (1.0 + 1e-12)

    def test_reproducible(self, quad):
        code = construct(64, 32, 1.0)
        fading = GaussianFading(1.0)
        budget = PowerBudget(P=1.0, Q=2.0)
        policy = make_policy(budget, fading, quad)
        message = np.random.default_rng(1).integers(0, 2, code.K, dtype=np.uint8)
        runs = [
            simulate_block(code, message, budget, fading, policy, np.random.default_rng(9))
            for _ in range(2)
        ]
        assert np.array_equal(runs[0][0], runs[1][0])
        assert runs[0][1] == runs[1][1]

    def test_batch_rows_match_single_blocks(self, quad):
        code = construct(64, 32, 1.0)
        fading = GaussianFading(1.0)
        budget = PowerBudget(P=1.0, Q=2.0)
        policy = make_policy(budget, fading, quad)
        messages = np.random.default_rng(2).integers(0, 2, (6, code.K), dtype=np.uint8)

        decoded, diagnostics = simulate_blocks(
            code, messages, budget, fading, policy,
            [np.random.default_rng(s) for s in range(6)],
        )
        for row in range(6):
            single, single_diag = simulate_block(
                code, messages[row], budget, fading, policy, np.random.default_rng(row)
            )
            assert np.array_equal(decoded[row], single)
            assert diagnostics[row] == single_diag

    def test_batch_needs_one_generator_per_row(self, quad):
        code = construct(8, 4, 1.0)
        policy = _policy(0.0)
        with pytest.raises(InvalidArgumentError):
            simulate_blocks(
                code, np.zeros((2, 4)), PowerBudget(P=1.0, Q=2.0),
                PointMassFading(1.0), policy, [np.random.default_rng(0)],
            )


def test_count_errors():
    decoded = np.array([[0, 1, 1], [0, 0, 0]])
    messages = np.array([[0, 0, 0], [0, 0, 0]])
    assert count_errors(decoded, messages) == (2, 1)
