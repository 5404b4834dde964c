"""Round-based head-set clustering simulator with per-node battery accounting.

Node state lives in parallel numpy arrays on :class:`SimState`; use
``state.node(i)`` or ``state.nodes`` for a per-node view.

Data frames are charged in bulk between battery events: within a cluster,
costs are periodic in the head-set rotation, so the simulator jumps straight
to the next frame at which some participant cannot pay, plays that frame out
message by message, and resumes. The result is the same as a frame-by-frame
loop up to floating-point summation order.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import ClusterConfig, election_energies, frame_energies, iterations_per_round, start_energy
from .errors import EEHCError, ElectionFailure, ValidationError
from .radio import LONG, SHORT, RadioParams, rx_energy, tx_energy

log = logging.getLogger(__name__)

RNG_ALGORITHM = "numpy.random.Generator(PCG64)"

MEMBER, HEADSET_SLEEPING, HEADSET_ACTIVE = 0, 1, 2
ROLE_NAMES = ("member", "headset_sleeping", "headset_active")

TRACE_HEADER = ("round", "iteration", "phase", "node", "event", "frames", "joules")


@dataclass(frozen=True)
class Node:
    id: int
    position: tuple[float, float]
    residual_energy: float
    role: str
    cluster_id: int | None
    times_elected: int
    alive: bool


class _CompensatedSum:
    """Neumaier running sum."""

    def __init__(self):
        self.total = 0.0
        self.comp = 0.0

    def add(self, x: float):
        t = self.total + x
        if abs(self.total) >= abs(x):
            self.comp += (self.total - t) + x
        else:
            self.comp += (x - t) + self.total
        self.total = t

    @property
    def value(self) -> float:
        return self.total + self.comp


@dataclass
class Cluster:
    head: int
    members: np.ndarray  # live nodes that joined, head excluded
    headset: list[int]  # rotation order, head first
    broadcast_distance: float


@dataclass
class _Stats:
    ch_elec: float = 0.0
    ch_elec_count: int = 0
    nonch_elec: float = 0.0
    nonch_elec_count: int = 0
    ch_frame: float = 0.0
    ch_frame_count: int = 0
    nonch_frame: float = 0.0
    nonch_frame_count: int = 0
    broadcast_d2: float = 0.0
    join_d2: float = 0.0
    member_frame_dalpha: float = 0.0
    bs_d4: float = 0.0
    iteration_time: float = 0.0
    iterations: int = 0
    dropped_messages: int = 0


@dataclass
class SimState:
    positions: np.ndarray
    residual: np.ndarray
    base_station: tuple[float, float]
    rng_seed: int
    rng: np.random.Generator
    initial_energy: float
    alive: np.ndarray = None
    role: np.ndarray = None
    cluster_id: np.ndarray = None
    times_elected: np.ndarray = None
    served: np.ndarray = None
    death_round: np.ndarray = None
    round: int = 0
    iteration: int = 0
    clusters: list[Cluster] = field(default_factory=list)
    trace: list | None = None
    stats: _Stats = field(default_factory=_Stats)
    ledger: _CompensatedSum = field(default_factory=_CompensatedSum)
    # per-iteration bookkeeping
    active_frames: np.ndarray = None
    member_frames: np.ndarray = None
    _debit: np.ndarray = None
    _elected: bool = False
    _election_slots: int = 0

    def __post_init__(self):
        n = len(self.residual)
        self.alive = np.ones(n, dtype=bool)
        self.role = np.zeros(n, dtype=np.int8)
        self.cluster_id = np.full(n, -1, dtype=np.int64)
        self.times_elected = np.zeros(n, dtype=np.int64)
        self.served = np.zeros(n, dtype=bool)
        self.death_round = np.full(n, -1, dtype=np.int64)
        self.active_frames = np.zeros(n, dtype=np.int64)
        self.member_frames = np.zeros(n, dtype=np.int64)
        self._debit = np.zeros(n)

    @property
    def n(self) -> int:
        return len(self.residual)

    @property
    def event_energy_ledger(self) -> float:
        return self.ledger.value

    def residual_total(self) -> float:
        return math.fsum(self.residual)

    def conservation_error(self) -> float:
        """Relative mismatch between the ledger and the energy actually drawn from batteries."""
        drawn = self.initial_energy - self.residual_total()
        scale = max(abs(self.ledger.value), abs(drawn), 1e-300)
        return abs(drawn - self.ledger.value) / scale

    def node(self, i: int) -> Node:
        cid = int(self.cluster_id[i])
        return Node(id=i, position=(float(self.positions[i, 0]), float(self.positions[i, 1])),
                    residual_energy=float(self.residual[i]), role=ROLE_NAMES[self.role[i]],
                    cluster_id=None if cid < 0 else cid, times_elected=int(self.times_elected[i]),
                    alive=bool(self.alive[i]))

    @property
    def nodes(self) -> list[Node]:
        return [self.node(i) for i in range(self.n)]


def init_network(seed: int, n: int, field_side: float, bs_position: tuple[float, float],
                 e_start: float, trace: bool = False) -> SimState:
    """Place ``n`` nodes uniformly in a ``field_side`` square, all with ``e_start`` joules."""
    if n < 1:
        raise ValidationError("n", "n >= 1", n)
    if not field_side > 0:
        raise ValidationError("field_side", "field_side > 0", field_side)
    if not e_start > 0:
        raise ValidationError("e_start", "e_start > 0", e_start)
    rng = np.random.Generator(np.random.PCG64(seed))
    positions = rng.uniform(0.0, field_side, size=(n, 2))
    residual = np.full(n, float(e_start))
    return SimState(positions=positions, residual=residual,
                    base_station=(float(bs_position[0]), float(bs_position[1])), rng_seed=int(seed),
                    rng=rng, initial_energy=math.fsum(residual), trace=[] if trace else None)


def _charge(state: SimState, ids, amounts, phase: str, event: str, frames: int = 1,
            partial: bool = False) -> np.ndarray:
    """Debit ``amounts`` from live nodes ``ids`` (unique). Returns the paid-in-full mask.

    A node that cannot pay is drained to zero and dies, unless ``partial`` is
    set, in which case it is only drained (used where the shortfall is
    floating-point noise from bulk charging).
    """
    ids = np.asarray(ids, dtype=np.intp)
    amounts = np.broadcast_to(np.asarray(amounts, dtype=float), ids.shape)
    live = state.alive[ids]
    res = state.residual[ids]
    ok = live & (res >= amounts)
    short = live & ~ok
    paid = np.where(ok, amounts, np.where(short, res, 0.0))
    state.residual[ids] = res - paid
    state.ledger.add(math.fsum(paid))
    state._debit[ids] += paid
    if partial:
        ok = live
    elif short.any():
        dead = ids[short]
        state.alive[dead] = False
        state.death_round[dead] = state.round
    if state.trace is not None:
        for i, a in zip(ids[paid > 0].tolist(), paid[paid > 0].tolist()):
            state.trace.append((state.round, state.iteration, phase, i, event, frames, a))
        if not partial:
            for i in ids[short].tolist():
                state.trace.append((state.round, state.iteration, phase, i, "death", 0, 0.0))
    return ok


def _distances(state: SimState, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = state.positions[a][:, None, :] - state.positions[b][None, :, :]
    return np.sqrt((diff ** 2).sum(axis=2))


def _bs_distance(state: SimState, ids) -> np.ndarray:
    diff = state.positions[np.asarray(ids, dtype=np.intp)] - np.asarray(state.base_station)
    return np.sqrt((diff ** 2).sum(axis=1))


def broadcast_distance(join_distances: np.ndarray) -> float:
    """Range a head must cover so every node that picked it hears the broadcast."""
    return float(join_distances.max()) if join_distances.size else 0.0


def election_phase(state: SimState, k: int, m: int, p: RadioParams, l: float) -> SimState:
    """Elect heads, form clusters by nearest head, and choose each head-set.

    Heads are drawn uniformly from live nodes that have not yet served this
    round. Each head-set is the head plus the ``m - 1`` unserved cluster
    members with the most residual energy (ties to the lower id), topped up
    from neighbouring clusters when a cluster is too small.
    """
    live = np.flatnonzero(state.alive)
    if live.size < k * m:
        raise ElectionFailure(f"{live.size} live nodes cannot form {k} clusters of head-set size {m}")
    state.iteration += 1
    state.role[:] = MEMBER
    state.cluster_id[:] = -1
    state._debit[:] = 0.0
    state.active_frames[:] = 0
    state.member_frames[:] = 0

    eligible = live[~state.served[live]]
    if eligible.size == 0:
        log.warning("round %d: no unserved live nodes left, resetting rotation", state.round)
        state.served[:] = False
        eligible = live
    heads = np.sort(state.rng.choice(eligible, size=min(k, eligible.size), replace=False))
    others = live[~np.isin(live, heads)]

    dist = _distances(state, others, heads) if others.size else np.zeros((0, heads.size))
    choice = dist.argmin(axis=1) if others.size else np.zeros(0, dtype=np.intp)
    join_d = dist[np.arange(others.size), choice]
    bcast = np.array([broadcast_distance(join_d[choice == j]) for j in range(heads.size)])

    rx = rx_energy(p, l)
    for j, h in enumerate(heads):
        _charge(state, [h], tx_energy(p, l, bcast[j], SHORT), "election", "broadcast")
    for h in heads:
        if state.alive[h]:
            _charge(state, others, rx, "election", "hear_head")

    # nodes whose head died before broadcasting fall back to the nearest live head
    live_heads = state.alive[heads]
    if not live_heads.all() and live_heads.any() and others.size:
        masked = np.where(live_heads[None, :], dist, np.inf)
        choice = masked.argmin(axis=1)
        join_d = dist[np.arange(others.size), choice]
    elif not live_heads.any():
        state.clusters = []
        state._elected = True
        state._election_slots = heads.size + others.size
        return state

    joined = _charge(state, others, tx_energy(p, l, join_d, SHORT), "election", "join")

    clusters = []
    for j, h in enumerate(heads):
        members = others[joined & (choice == j)]
        if not state.alive[h]:
            continue
        _charge(state, [h], rx * members.size, "election", "hear_members")
        if not state.alive[h]:
            continue
        candidates = members[state.alive[members] & ~state.served[members]]
        order = np.lexsort((candidates, -state.residual[candidates]))
        headset = [int(h)] + [int(c) for c in candidates[order][: m - 1]]
        clusters.append(Cluster(head=int(h), members=members, headset=headset,
                                broadcast_distance=float(bcast[j])))
    _recruit(state, clusters, m)

    st = state.stats
    for cid, cl in enumerate(clusters):
        state.cluster_id[cl.head] = cid
        state.cluster_id[cl.members] = cid
        state.role[cl.headset] = HEADSET_SLEEPING
        state.role[cl.head] = HEADSET_ACTIVE
        state.served[cl.headset] = True
        state.times_elected[cl.headset] += 1
        st.ch_elec += float(state._debit[cl.head])
        st.ch_elec_count += 1
        st.broadcast_d2 += cl.broadcast_distance ** 2
    non_heads = others[joined]
    st.nonch_elec += math.fsum(state._debit[non_heads])
    st.nonch_elec_count += non_heads.size
    st.join_d2 += math.fsum(join_d[joined] ** 2)
    state.clusters = clusters
    state._elected = True
    state._election_slots = heads.size + others.size
    return state


def _recruit(state: SimState, clusters: list[Cluster], m: int) -> None:
    """Top up short head-sets with the nearest unserved nodes from other clusters.

    Clusters formed by nearest head are uneven, so a small cluster may lack
    ``m - 1`` unserved members. Recruits move to the cluster they serve.
    Without this, leftover nodes would need extra iterations each round.
    """
    short = [cl for cl in clusters if len(cl.headset) < m]
    if not short:
        return
    taken = set().union(*(cl.headset for cl in clusters))
    pool = np.array([i for cl in clusters for i in cl.members.tolist()
                     if i not in taken and state.alive[i] and not state.served[i]], dtype=np.intp)
    pool.sort()
    home = {i: cl for cl in clusters for i in cl.members.tolist()}
    for cl in short:
        if pool.size == 0:
            break
        need = m - len(cl.headset)
        d = _distances(state, pool, np.array([cl.head]))[:, 0]
        picked = pool[np.lexsort((pool, d))[:need]]
        for i in picked.tolist():
            src = home[i]
            src.members = src.members[src.members != i]
            cl.members = np.append(cl.members, i)
            home[i] = cl
        cl.headset.extend(picked.tolist())
        pool = pool[~np.isin(pool, picked)]


def _affordable(res: np.ndarray, cum: np.ndarray) -> np.ndarray:
    """Consecutive frames each row can pay for, given cumulative cycle costs ``cum`` (rows x r)."""
    r = cum.shape[1]
    cycle = cum[:, -1]
    q = np.floor(res / cycle)
    rem = res - q * cycle
    neg = rem < 0
    q[neg] -= 1
    rem[neg] += cycle[neg]
    return q * r + (cum <= rem[:, None]).sum(axis=1)


def _cluster_frames(state: SimState, cl: Cluster, n_frames: int, l: float, p: RadioParams):
    st = state.stats
    alpha = p.path_loss_exponent
    rx = rx_energy(p, l)
    senders = cl.members[~np.isin(cl.members, cl.headset)]
    rotation = list(cl.headset)
    frame = 0
    pos = 0
    while frame < n_frames:
        senders = senders[state.alive[senders]]
        rotation = [h for h in rotation if state.alive[h]]
        if not rotation:
            st.dropped_messages += senders.size * (n_frames - frame)
            return
        r = len(rotation)
        pos %= r
        order = np.array(rotation[pos:] + rotation[:pos], dtype=np.intp)
        s_dist = _distances(state, senders, order)
        s_cost = tx_energy(p, l, s_dist, SHORT) if senders.size else np.zeros((0, r))
        bs_dist = _bs_distance(state, order)
        h_cost = rx * senders.size + tx_energy(p, l, bs_dist, LONG)
        remaining = n_frames - frame

        s_cum = np.cumsum(s_cost, axis=1)
        s_fail = _affordable(state.residual[senders], s_cum) if senders.size else np.array([np.inf])
        h_fail = np.arange(r) + np.floor(state.residual[order] / h_cost) * r
        t_bulk = int(min(remaining, s_fail.min(), h_fail.min()))

        if t_bulk > 0:
            full, part = divmod(t_bulk, r)
            active = np.array([len(range(j, t_bulk, r)) for j in range(r)])
            if senders.size:
                s_debit = full * s_cum[:, -1] + (s_cum[:, part - 1] if part else 0.0)
                _charge(state, senders, s_debit, "data", "send", t_bulk, partial=True)
                state.member_frames[senders] += t_bulk
                st.nonch_frame += math.fsum(s_debit)
                st.nonch_frame_count += senders.size * t_bulk
                st.member_frame_dalpha += math.fsum((s_dist ** alpha).sum(axis=0) * active)
            busy = active > 0
            _charge(state, order[busy], (active * h_cost)[busy], "data", "relay", t_bulk, partial=True)
            state.active_frames[order] += active
            st.ch_frame += math.fsum(active * h_cost)
            st.ch_frame_count += t_bulk
            st.bs_d4 += math.fsum(active * bs_dist ** 4)
            frame += t_bulk
            pos += t_bulk
        if frame >= n_frames:
            return

        # one frame played message by message; somebody is expected to run dry here
        head = np.array([rotation[pos % r]], dtype=np.intp)
        d_head = _distances(state, senders, head)[:, 0]
        costs = tx_energy(p, l, d_head, SHORT)
        sent = _charge(state, senders, costs, "data", "send")
        st.dropped_messages += int((~sent).sum()) * (n_frames - frame)
        n_sent = int(sent.sum())
        state.member_frames[senders[sent]] += 1
        st.nonch_frame += math.fsum(costs[sent])
        st.nonch_frame_count += n_sent
        st.member_frame_dalpha += math.fsum(d_head[sent] ** alpha)
        d_up = _bs_distance(state, head)
        heard = _charge(state, head, rx * n_sent, "data", "receive")[0]
        relayed = heard and _charge(state, head, tx_energy(p, l, d_up, LONG), "data", "uplink")[0]
        state.active_frames[head] += 1
        if relayed:
            st.ch_frame += rx * n_sent + float(tx_energy(p, l, d_up, LONG)[0])
            st.ch_frame_count += 1
            st.bs_d4 += float(d_up[0]) ** 4
        else:
            st.dropped_messages += n_sent
        frame += 1
        pos += 1


def data_transfer_phase(state: SimState, n_frames: int, l: float, p: RadioParams) -> SimState:
    """Run ``n_frames`` data frames in every cluster formed by the last election.

    Each frame, non-head-set members send to the active head-set member, which
    hears them all and uplinks one aggregate to the base station. The active
    role rotates round-robin through the head-set; sleeping members pay nothing.
    """
    if not state._elected:
        raise EEHCError("data_transfer_phase needs an election first")
    if n_frames < 0 or not float(n_frames).is_integer():
        raise ValidationError("n_frames", "non-negative integer", n_frames)
    n_frames = int(n_frames)
    slots = max((cl.members.size - len(cl.headset) + 2 for cl in state.clusters), default=0)
    for cl in state.clusters:
        _cluster_frames(state, cl, n_frames, l, p)
    state.stats.iteration_time += (state._election_slots + n_frames * slots) * l / p.bit_rate
    state.stats.iterations += 1
    state._elected = False
    return state


def run_round(state: SimState, k: int, m: int, n_frames: int, l: float,
              p: RadioParams) -> tuple[SimState, float]:
    """Iterate election + data transfer until every live node has served in a head-set.

    Without deaths this takes ``ceil(n / (k m))`` iterations; the last one may
    have fewer heads. Raises :class:`ElectionFailure` up front if fewer than
    ``k m`` nodes live. Returns the state and the energy debited.
    """
    live = int(state.alive.sum())
    if live < k * m:
        raise ElectionFailure(f"{live} live nodes cannot form {k} clusters of head-set size {m}")
    before = state.ledger.value
    state.round += 1
    state.served[:] = False
    for _ in range(state.n + 1):
        if not (state.alive & ~state.served).any():
            break
        election_phase(state, k, m, p, l)
        data_transfer_phase(state, n_frames, l, p)
    return state, state.ledger.value - before


@dataclass
class RoundRecord:
    round: int
    iterations: int
    energy_j: float
    alive_nodes: int
    dead_nodes: int
    ledger_j: float
    completed: bool = True

    HEADER = ("round", "iterations", "energy_j", "alive_nodes", "dead_nodes", "ledger_j",
              "completed")

    def as_row(self) -> tuple:
        return tuple(getattr(self, name) for name in self.HEADER)


@dataclass
class SimMetrics:
    """Lifetime summary. ``first_node_death_round`` is None when nobody died."""

    rounds_completed: int
    iterations_completed: int
    first_node_death_round: int | None
    energy_per_round: list[float]
    mean_ch_energy: float
    mean_nonch_energy: float
    iteration_time_s: float
    mean_ch_frame_energy: float
    mean_nonch_frame_energy: float
    broadcast_distance_m: float
    join_distance_m: float
    member_frame_distance_m: float
    bs_distance_m: float
    dropped_messages: int
    conservation_error: float
    scenario: dict
    seed: int
    rounds: list[RoundRecord] = field(default_factory=list)
    stop_reason: str = ""

    @property
    def mean_round_energy(self) -> float:
        return float(np.mean(self.energy_per_round)) if self.energy_per_round else math.nan

    def summary(self) -> dict:
        out = {name: getattr(self, name) for name in (
            "rounds_completed", "iterations_completed", "first_node_death_round",
            "mean_ch_energy", "mean_nonch_energy", "iteration_time_s", "mean_ch_frame_energy",
            "mean_nonch_frame_energy", "broadcast_distance_m", "join_distance_m",
            "member_frame_distance_m", "bs_distance_m", "dropped_messages", "conservation_error",
            "scenario", "seed", "stop_reason")}
        out["mean_round_energy"] = self.mean_round_energy
        out["rng_algorithm"] = RNG_ALGORITHM
        return out


def _ratio(num: float, den: float) -> float:
    return num / den if den else math.nan


def _metrics(state: SimState, scenario: dict, records: list[RoundRecord], alpha: float,
             stop_reason: str) -> SimMetrics:
    st = state.stats
    deaths = state.death_round[state.death_round >= 0]
    return SimMetrics(
        rounds_completed=sum(r.completed for r in records),
        iterations_completed=st.iterations,
        first_node_death_round=int(deaths.min()) if deaths.size else None,
        energy_per_round=[r.energy_j for r in records if r.completed],
        mean_ch_energy=_ratio(st.ch_elec, st.ch_elec_count),
        mean_nonch_energy=_ratio(st.nonch_elec, st.nonch_elec_count),
        iteration_time_s=_ratio(st.iteration_time, st.iterations),
        mean_ch_frame_energy=_ratio(st.ch_frame, st.ch_frame_count),
        mean_nonch_frame_energy=_ratio(st.nonch_frame, st.nonch_frame_count),
        broadcast_distance_m=math.sqrt(_ratio(st.broadcast_d2, st.ch_elec_count)),
        join_distance_m=math.sqrt(_ratio(st.join_d2, st.nonch_elec_count)),
        member_frame_distance_m=_ratio(st.member_frame_dalpha, st.nonch_frame_count) ** (1 / alpha),
        bs_distance_m=_ratio(st.bs_d4, st.ch_frame_count) ** 0.25,
        dropped_messages=st.dropped_messages,
        conservation_error=state.conservation_error(),
        scenario=scenario,
        seed=state.rng_seed,
        rounds=records,
        stop_reason=stop_reason,
    )


def run_lifetime(state: SimState, k: int, m: int, n_frames: int, l: float, p: RadioParams,
                 max_rounds: int, until: str = "first_death") -> SimMetrics:
    """Run whole rounds and summarise.

    ``until="first_death"`` stops after the round in which the first node
    dies; ``until="exhaustion"`` keeps going until fewer than ``k m`` nodes
    live. Either way at most ``max_rounds`` rounds run. A round cut short by
    an election failure is still recorded, with ``completed=False``.

    Iteration time follows a slot model: every election message and every
    frame slot (the busiest cluster's members plus one uplink) lasts
    ``l / bit_rate`` seconds.
    """
    if until not in ("first_death", "exhaustion"):
        raise ValidationError("until", "'first_death' or 'exhaustion'", until)
    scenario = {"n": state.n, "k": k, "m": m, "l": float(l), "n_frames": float(n_frames)}
    records: list[RoundRecord] = []
    reason = "max_rounds"
    for _ in range(max_rounds):
        iterations_before = state.stats.iterations
        round_before = state.round
        ledger_before = state.ledger.value
        completed = True
        try:
            run_round(state, k, m, n_frames, l, p)
        except ElectionFailure as exc:
            log.info("stopping: %s", exc)
            reason = "election_failure"
            completed = False
            if state.round == round_before:
                break  # nothing ran
        alive = int(state.alive.sum())
        records.append(RoundRecord(round=state.round,
                                   iterations=state.stats.iterations - iterations_before,
                                   energy_j=state.ledger.value - ledger_before, alive_nodes=alive,
                                   dead_nodes=state.n - alive, ledger_j=state.ledger.value,
                                   completed=completed))
        if not completed:
            break
        if until == "first_death" and alive < state.n:
            reason = "first_death"
            break
    return _metrics(state, scenario, records, p.path_loss_exponent, reason)


def analytic_comparison(metrics: SimMetrics, cfg: ClusterConfig, p: RadioParams) -> dict:
    """Relative errors of simulated energies against the closed-form model.

    Measured effective distances replace the configured ones: the RMS
    broadcast range for the head's election cost, the RMS join distance for
    members, the frame-weighted (mean d**alpha)**(1/alpha) member-to-active
    distance, and (mean d**4)**(1/4) to the base station.

    ``round_start_energy`` compares against ``n * start_energy``; ``round_accounting``
    against a direct message count (k heads and n - k members per iteration,
    n/k - m senders per cluster per frame) times the simulated number of
    iterations per round. A distance that was never measured (no frames ran,
    say) falls back to the configured one.
    """
    for key in ("n", "k", "m"):
        if metrics.scenario[key] != getattr(cfg, key):
            raise ValidationError(key, f"{key} matches the simulated scenario ({metrics.scenario[key]})",
                                  getattr(cfg, key))
    for key in ("l", "n_frames"):
        if float(metrics.scenario[key]) != getattr(cfg, key):
            raise ValidationError(key, f"{key} matches the simulated scenario ({metrics.scenario[key]})",
                                  getattr(cfg, key))

    def entry(sim, ana):
        return {"simulated": sim, "analytic": ana, "rel_error": abs(sim - ana) / abs(ana) if ana else math.nan}

    def measured_or(value, fallback):
        return value if math.isfinite(value) else fallback

    broadcast = measured_or(metrics.broadcast_distance_m, cfg.d_intra)
    join = measured_or(metrics.join_distance_m, cfg.d_intra)
    member_frame = measured_or(metrics.member_frame_distance_m, cfg.d_intra)
    bs = measured_or(metrics.bs_distance_m, cfg.d_bs)

    ch_elec = election_energies(cfg.replace(d_intra=broadcast), p)[0]
    nonch_elec = election_energies(cfg.replace(d_intra=join), p)[1]
    ch_frame = frame_energies(cfg.replace(d_bs=bs), p)[0]
    nonch_frame = frame_energies(cfg.replace(d_intra=member_frame), p)[1]
    measured = cfg.replace(d_intra=join, d_bs=bs)
    start_energy_round = cfg.n * start_energy(measured, p)
    per_iteration = (cfg.k * ch_elec + (cfg.n - cfg.k) * nonch_elec
                     + cfg.k * cfg.n_frames * (ch_frame + (cfg.n / cfg.k - cfg.m) * nonch_frame))
    done = [r.iterations for r in metrics.rounds if r.completed]
    iterations = float(np.mean(done)) if done else float(iterations_per_round(cfg))
    accounting_round = iterations * per_iteration
    sim_round = metrics.mean_round_energy
    return {
        "ch_election": entry(metrics.mean_ch_energy, ch_elec),
        "nonch_election": entry(metrics.mean_nonch_energy, nonch_elec),
        "ch_frame": entry(metrics.mean_ch_frame_energy, ch_frame),
        "nonch_frame": entry(metrics.mean_nonch_frame_energy, nonch_frame),
        "round_start_energy": entry(sim_round, start_energy_round),
        "round_accounting": entry(sim_round, accounting_round),
        "distances_m": {
            "broadcast": metrics.broadcast_distance_m, "join": metrics.join_distance_m,
            "member_frame": metrics.member_frame_distance_m, "base_station": metrics.bs_distance_m,
        },
    }
