import math

import numpy as np
import pytest

from eehc_lab import (
    ClusterConfig, EEHCError, ElectionFailure, RadioParams, ValidationError, analytic_comparison,
    data_transfer_phase, election_energies, election_phase, frame_energies, init_network,
    run_lifetime, run_round,
)
from eehc_lab.simulator import HEADSET_ACTIVE, RNG_ALGORITHM

P = RadioParams()
L = 2000.0


def small(seed=0, n=120, e_start=10.0, side=100.0, bs=(50.0, 200.0), trace=False):
    return init_network(seed, n, side, bs, e_start, trace=trace)


def test_init_network_determinism():
    a, b = small(7), small(7)
    assert np.array_equal(a.positions, b.positions)
    assert not np.array_equal(a.positions, small(8).positions)
    assert all(node.role == "member" and node.residual_energy == 10.0 for node in a.nodes)


def test_single_node():
    s = init_network(3, 1, 50.0, (0, 0), 1.0)
    x, y = s.node(0).position
    assert 0 <= x <= 50 and 0 <= y <= 50


def test_uniform_positions_mean():
    n, side = 10_000, 100.0
    s = init_network(11, n, side, (0, 0), 1.0)
    sigma = side / math.sqrt(12 * n)
    assert np.all(np.abs(s.positions.mean(axis=0) - side / 2) < 3 * sigma)


@pytest.mark.parametrize("kw", [{"n": 0}, {"side": 0.0}, {"e_start": 0.0}])
def test_init_validation(kw):
    args = {"n": 10, "side": 10.0, "e_start": 1.0}
    args.update(kw)
    with pytest.raises(ValidationError):
        init_network(0, args["n"], args["side"], (0, 0), args["e_start"])


def test_k_one_everyone_joins():
    s = election_phase(small(), 1, 1, P, L)
    (cl,) = s.clusters
    assert cl.members.size == 119
    assert set(cl.members.tolist()) | {cl.head} == set(range(120))


def test_equidistant_node_joins_lower_id():
    for seed in range(50):
        s = init_network(seed, 3, 10.0, (0, 0), 1.0)
        s.positions[:] = [[0.0, 0.0], [2.0, 0.0], [1.0, 0.0]]
        election_phase(s, 2, 1, P, L)
        heads = sorted(cl.head for cl in s.clusters)
        if heads == [0, 1]:
            assert s.cluster_id[2] == s.cluster_id[0]
            return
    pytest.fail("no seed picked heads 0 and 1")


def test_election_failure():
    with pytest.raises(ElectionFailure):
        election_phase(small(n=10), 4, 3, P, L)


def test_data_transfer_needs_election():
    with pytest.raises(EEHCError):
        data_transfer_phase(small(), 10, L, P)


def test_zero_frames_leaves_energy_alone():
    s = election_phase(small(), 4, 2, P, L)
    before = s.residual.copy()
    data_transfer_phase(s, 0, L, P)
    assert np.array_equal(s.residual, before)
    assert s.stats.iterations == 1


def test_headset_contents():
    s = election_phase(small(), 4, 3, P, L)
    for cl in s.clusters:
        assert len(cl.headset) == 3 and cl.headset[0] == cl.head
        assert set(cl.headset[1:]) <= set(cl.members.tolist())
        assert s.role[cl.head] == HEADSET_ACTIVE
    # exactly one active node per cluster
    assert (s.role == HEADSET_ACTIVE).sum() == len(s.clusters)


def test_ch_election_debit_matches_model():
    ratios = []
    for seed in range(100):
        s = election_phase(small(seed, n=200), 5, 2, P, L)
        sim = s.stats.ch_elec / s.stats.ch_elec_count
        d = math.sqrt(s.stats.broadcast_d2 / s.stats.ch_elec_count)
        cfg = ClusterConfig(n=200, k=5, m=2, d_intra=d)
        ratios.append(sim / election_energies(cfg, P)[0])
    assert abs(np.mean(ratios) - 1) < 0.10


def test_single_head_bears_all_frames():
    frames = 200
    sims, models = [], []
    for seed in range(20):
        s = election_phase(small(seed, n=200, e_start=100.0), 5, 1, P, L)
        before = s.residual.copy()
        data_transfer_phase(s, frames, L, P)
        heads = [cl.head for cl in s.clusters]
        sims.append(np.mean(before[heads] - s.residual[heads]))
        d4 = np.mean([np.sum((s.positions[h] - s.base_station) ** 2) ** 2 for h in heads])
        cfg = ClusterConfig(n=200, k=5, m=1, n_frames=frames, d_bs=d4 ** 0.25)
        models.append(frames * frame_energies(cfg, P)[0])
    assert np.mean(sims) == pytest.approx(np.mean(models), rel=0.10)


def test_round_robin_duty():
    frames = 100
    s = election_phase(small(n=300, e_start=100.0), 5, 3, P, L)
    data_transfer_phase(s, frames, L, P)
    for cl in s.clusters:
        duty = s.active_frames[cl.headset]
        assert duty.sum() == frames
        assert duty.max() - duty.min() <= 1
        senders = np.setdiff1d(cl.members, cl.headset)
        assert np.all(s.member_frames[senders] == frames)
        assert np.all(s.member_frames[cl.headset] == 0)


def test_one_iteration_when_n_equals_km():
    s, _ = run_round(small(n=24, e_start=100.0), 4, 6, 5, L, P)
    assert s.stats.iterations == 1
    assert np.all(s.times_elected == 1)


@pytest.mark.parametrize("seed", range(5))
def test_iterations_per_round_match_model(seed):
    s, _ = run_round(small(seed, n=1000, e_start=1e4), 14, 6, 1, L, P)
    assert s.stats.iterations == 12


def test_round_energy_equals_ledger_delta():
    s = small(e_start=100.0)
    before = s.ledger.value
    s, energy = run_round(s, 4, 2, 20, L, P)
    assert energy == s.ledger.value - before
    assert energy == pytest.approx(s.initial_energy - s.residual_total(), rel=1e-9)


def test_every_node_serves_once_per_round():
    s = small(n=150, e_start=1000.0)
    for r in range(1, 4):
        run_round(s, 5, 3, 10, L, P)
        assert np.all(s.times_elected == r)


def test_conservation_and_monotone_death():
    s = small(n=100, e_start=0.02)
    dead_before = np.zeros(100, dtype=bool)
    for _ in range(30):
        try:
            run_round(s, 4, 2, 50, L, P)
        except ElectionFailure:
            break
        dead = ~s.alive
        assert np.all(dead[dead_before])
        assert np.all(s.residual >= 0)
        assert np.all(s.residual[dead] == 0)
        assert s.conservation_error() < 1e-9
        dead_before = dead
    assert (~s.alive).any()


def test_huge_battery_never_dies():
    m = run_lifetime(small(n=60, e_start=1e6), 3, 2, 10, L, P, max_rounds=4)
    assert m.rounds_completed == 4
    assert m.first_node_death_round is None
    assert m.stop_reason == "max_rounds"
    assert m.summary()["rng_algorithm"] == RNG_ALGORITHM


def test_start_energy_battery_dies_early():
    from eehc_lab import start_energy
    cfg = ClusterConfig(n=200, k=5, m=2, n_frames=100)
    e0 = start_energy(cfg, P)
    m = run_lifetime(small(n=200, e_start=e0), 5, 2, 100, L, P, max_rounds=5)
    assert m.first_node_death_round in (1, 2)
    assert m.stop_reason in ("first_death", "election_failure")


def test_partial_round_is_recorded():
    m = run_lifetime(small(n=200, e_start=0.0054467), 5, 2, 100, L, P, max_rounds=5)
    assert m.stop_reason == "election_failure"
    last = m.rounds[-1]
    assert not last.completed and last.iterations >= 1 and last.energy_j > 0
    assert m.rounds_completed == len(m.rounds) - 1
    assert len(m.energy_per_round) == m.rounds_completed


def test_exhaustion_mode_runs_until_election_fails():
    m = run_lifetime(small(n=40, e_start=0.01), 2, 2, 20, L, P, max_rounds=500, until="exhaustion")
    assert m.stop_reason == "election_failure"
    assert m.conservation_error < 1e-9
    with pytest.raises(ValidationError):
        run_lifetime(small(), 2, 2, 20, L, P, max_rounds=1, until="forever")


def test_iteration_time_grows_with_frames():
    times = [run_lifetime(small(n=60, e_start=1e3), 3, 2, f, L, P, max_rounds=1).iteration_time_s
             for f in (0, 10, 100)]
    assert times[0] < times[1] < times[2]


def test_lifetime_metrics_are_deterministic():
    a = run_lifetime(small(5, e_start=5.0), 4, 2, 30, L, P, max_rounds=2)
    b = run_lifetime(small(5, e_start=5.0), 4, 2, 30, L, P, max_rounds=2)
    assert a == b


def test_trace_records_every_debit():
    s = small(n=40, e_start=10.0, trace=True)
    run_round(s, 2, 2, 5, L, P)
    assert math.fsum(row[-1] for row in s.trace) == pytest.approx(s.ledger.value, rel=1e-12)


def test_degenerate_single_point_matches_electronics():
    n, k, m, frames = 10, 2, 1, 7
    s = init_network(0, n, 1.0, (0.5, 0.5), 10.0)
    s.positions[:] = 0.5
    metrics = run_lifetime(s, k, m, frames, L, P, max_rounds=1)
    cfg = ClusterConfig(n=n, k=k, m=m, l=L, n_frames=frames)
    report = analytic_comparison(metrics, cfg, P)
    for key in ("ch_election", "nonch_election", "ch_frame", "nonch_frame", "round_accounting"):
        assert report[key]["rel_error"] < 1e-12, key
    assert report["distances_m"]["base_station"] == 0.0


def test_comparison_rejects_mismatch():
    metrics = run_lifetime(small(n=60, e_start=1e3), 3, 2, 5, L, P, max_rounds=1)
    with pytest.raises(ValidationError):
        analytic_comparison(metrics, ClusterConfig(n=60, k=4, m=2, l=L, n_frames=5), P)
    with pytest.raises(ValidationError):
        analytic_comparison(metrics, ClusterConfig(n=60, k=3, m=2, l=L, n_frames=6), P)
