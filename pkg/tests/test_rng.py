"""Seed derivation and generator construction."""

import numpy as np
import pytest

from rankspectral.rng import derive_seed, make_generator, splitmix64


class TestSplitmix64:
    def test_reference_vector(self):
        # First output of the standard splitmix64 stream seeded with 0.
        assert splitmix64(0) == 0xE220A8397B1DCDAF

    def test_regression_vectors(self):
        # Frozen outputs; a change here would reinterpret every recorded seed.
        assert splitmix64(1) == 0x910A2DEC89025CC1
        assert splitmix64(0x123456789ABCDEF) == 0x157A3807A48FAA9D

    def test_stays_in_64_bits(self):
        for x in (0, 1, 2**64 - 1, 2**63, 12345678901234567890):
            out = splitmix64(x)
            assert 0 <= out < 2**64


class TestDeriveSeed:
    def test_deterministic(self):
        assert derive_seed(0, 0) == 12035550249420947055
        assert derive_seed(0, 1) == 12935080325729570654
        assert derive_seed(20260825, 7) == 2798487806120680499

    def test_streams_distinct(self):
        seeds = {derive_seed(999, i) for i in range(10_000)}
        assert len(seeds) == 10_000

    def test_masters_distinct(self):
        assert derive_seed(1, 0) != derive_seed(2, 0)

    def test_rejects_negative_index(self):
        with pytest.raises(ValueError):
            derive_seed(1, -1)


class TestMakeGenerator:
    def test_reproducible(self):
        a = make_generator(42).random(5)
        b = make_generator(42).random(5)
        assert np.array_equal(a, b)

    def test_seed_sensitivity(self):
        assert not np.array_equal(make_generator(42).random(5), make_generator(43).random(5))

    def test_large_seed_accepted(self):
        make_generator(2**64 + 5).random(1)
