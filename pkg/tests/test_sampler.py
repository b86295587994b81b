import math

import numpy as np
import pytest

from mqc.correction import sqc
from mqc.errors import ContractError
from mqc.ising import IsingModel, energies
from mqc.problems import ChimeraSpec, chimera_instance
from mqc.sampler import (SamplerConfig, brute_force_ground, draw_samples,
                         is_local_minimum, quantize)

from conftest import all_states, naive_energy, random_model, random_spins


def mean_hamming(a, b):
    return float(np.mean(a != b))


class TestConfig:
    def test_invalid(self):
        with pytest.raises(ContractError):
            SamplerConfig(0)
        with pytest.raises(ContractError):
            SamplerConfig(10, beta_schedule=(2.0, 1.0))
        with pytest.raises(ContractError):
            SamplerConfig(10, beta_schedule=(0.0, 1.0))
        with pytest.raises(ContractError):
            SamplerConfig(10, correlation_mode="clustered", cluster_persistence=1)
        with pytest.raises(ContractError):
            SamplerConfig(10, cluster_persistence=4)

    def test_to_dict(self):
        d = SamplerConfig(10, correlation_mode="clustered", cluster_persistence=3).to_dict()
        assert d["correlation_mode"] == "clustered"
        assert d["cluster_persistence"] == 3


class TestDrawSamples:
    def test_single_spin_ground(self):
        model = IsingModel([1.0])
        hits = 0
        for seed in range(100):
            cfg = SamplerConfig(1, sweeps_per_read=1000, beta_schedule=(0.1, 10.0), seed=seed)
            hits += draw_samples(model, cfg)[0, 0] == -1
        assert hits >= 99

    @pytest.mark.parametrize("mode,p", [("independent", 1), ("clustered", 4)])
    def test_deterministic(self, mode, p):
        model = chimera_instance(ChimeraSpec(2, 2, 4), "uniform", 2)
        cfg = SamplerConfig(30, sweeps_per_read=5, correlation_mode=mode, cluster_persistence=p, seed=9)
        a, b = draw_samples(model, cfg), draw_samples(model, cfg)
        assert a.shape == (30, 32) and a.dtype == np.int8
        assert np.array_equal(a, b)

    def test_read_prefix_stability(self):
        """Read r depends only on its own stream, not on num_reads."""
        model = chimera_instance(ChimeraSpec(1, 2, 4), "normal", 4)
        small = draw_samples(model, SamplerConfig(5, sweeps_per_read=4, seed=1))
        large = draw_samples(model, SamplerConfig(50, sweeps_per_read=4, seed=1))
        assert np.array_equal(small, large[:5])

    def test_clustered_reads_are_correlated(self):
        model = chimera_instance(ChimeraSpec(2, 2, 4), "normal", 1)
        within, across = [], []
        for seed in range(50):
            cfg = SamplerConfig(32, sweeps_per_read=2, correlation_mode="clustered",
                                cluster_persistence=8, seed=seed)
            Z = draw_samples(model, cfg)
            blocks = Z.reshape(4, 8, -1)
            for b in range(4):
                for i in range(8):
                    for j in range(i + 1, 8):
                        within.append(mean_hamming(blocks[b, i], blocks[b, j]))
                        across.append(mean_hamming(blocks[b, i], blocks[(b + 1) % 4, j]))
        assert np.mean(within) < np.mean(across)

    def test_energy_floor(self):
        for seed in range(10):
            model = chimera_instance(ChimeraSpec(1, 2, 4), "normal", seed)
            _, ground = brute_force_ground(model)
            Z = draw_samples(model, SamplerConfig(50, seed=seed))
            assert energies(model, Z).min() >= ground - 1e-9

    def test_more_sweeps_better(self):
        model = chimera_instance(ChimeraSpec(1, 1, 4), "normal", 12)
        best = {}
        for sweeps in (10, 1000):
            best[sweeps] = np.mean([
                energies(model, draw_samples(model, SamplerConfig(4, sweeps_per_read=sweeps, seed=s))).min()
                for s in range(50)])
        assert best[1000] <= best[10]

    def test_boltzmann_two_spin_ferromagnet(self):
        model = IsingModel([0.0, 0.0], {(0, 1): -1.0})
        reads = 100_000
        Z = draw_samples(model, SamplerConfig(reads, sweeps_per_read=10, beta_schedule=(1.0, 1.0), seed=4))
        weights = {(a, b): math.exp(a * b) for a in (-1, 1) for b in (-1, 1)}
        total = sum(weights.values())
        for state, w in weights.items():
            p = w / total
            freq = np.mean((Z[:, 0] == state[0]) & (Z[:, 1] == state[1]))
            se = math.sqrt(p * (1 - p) / reads)
            assert abs(freq - p) <= 3 * se, (state, freq, p)

    def test_quantize(self):
        model = IsingModel([0.3, 0.001], {(0, 1): 0.0009, })
        q = quantize(model, 8)
        assert q.h.tolist() == [round(0.3 * 256) / 256, 0.0]
        assert q.couplers == {}


class TestBruteForce:
    def test_single_spin(self):
        z, e = brute_force_ground(IsingModel([1.0]))
        assert z.tolist() == [-1] and e == -1.0

    def test_ferromagnet_tie(self):
        z, e = brute_force_ground(IsingModel([0.0, 0.0], {(0, 1): -1.0}))
        assert z.tolist() == [-1, -1] and e == -1.0

    def test_chain(self, chain):
        z, e = brute_force_ground(chain)
        assert e == -3.0
        assert z.tolist() == [-1, -1, 1, 1]

    def test_against_enumeration(self, rng):
        for _ in range(40):
            n = int(rng.integers(1, 10))
            model = random_model(rng, n, density=0.4, kind=rng.choice(["binary", "normal"]))
            states = all_states(n)
            values = [naive_energy(model, s) for s in states]
            k = int(np.argmin(values))
            z, e = brute_force_ground(model)
            assert abs(e - values[k]) <= 1e-9
            if model.h.tolist() == [round(x) for x in model.h.tolist()]:
                assert z.tolist() == states[k].tolist()

    def test_cap(self, monkeypatch):
        model = IsingModel([0.0] * 6)
        with pytest.raises(ContractError, match="5"):
            brute_force_ground(model, cap=5)
        monkeypatch.setenv("MQC_BRUTE_FORCE_CAP", "4")
        with pytest.raises(ContractError):
            brute_force_ground(model)


class TestLocalMinimum:
    def test_sqc_output(self, rng):
        for _ in range(50):
            model = random_model(rng, 12)
            assert is_local_minimum(model, sqc(model, random_spins(rng, 12)))

    def test_ground_state(self, rng):
        for _ in range(20):
            model = random_model(rng, 10)
            assert is_local_minimum(model, brute_force_ground(model)[0])

    def test_not_minimal(self):
        assert not is_local_minimum(IsingModel([1.0]), [1])
