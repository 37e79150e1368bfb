"""FaiRTT congestion control: BBRv2 with an RTT-fairness-adjusted BDP.

During bandwidth probing, when the latest ACK's RTT exceeds a fairness
threshold, the BDP is scaled by ``minRTT * gamma / lastRTT`` (never above
``gamma``), shrinking the inflight allowance of flows that are inflating
the shared queue.  The threshold is the estimated flow count times the
mean of recent balance-weighted window-minimum RTT estimates, so the
penalty engages only while the queue sits above the level the competing
flows can jointly sustain.

Window-minimum RTTs and their weighted estimates are exchanged through a
per-run :class:`FairnessEstimator` that every flow of a run publishes
into at its measurement-window boundaries.  A flow that never observes a
second distinct RTT floor (in particular any flow running alone) keeps a
flow-count estimate of 1 and never applies the adjustment, so the engine
reduces to plain BBRv2 exactly.
"""

from collections import deque
from dataclasses import dataclass, field

from .cc_bbrv2 import BbrEngine, BbrParams, compute_bdp, is_probe_bw
from .units import ms_to_ticks, s_to_ticks


@dataclass(frozen=True)
class FairttParams:
    balance_factor: float = 0.8       # weight of the historical mean
    discount_factor: float = 0.99     # stabilising factor on the adjustment
    window: int = s_to_ticks(1)       # measurement-window length
    bucket_tolerance: int = ms_to_ticks(0.1)   # RTT uniqueness bucketing
    receiver_window_packets: int = 1000        # advertised receive window


@dataclass
class FairttState:
    """Per-flow fairness bookkeeping, updated once per measurement window."""

    beta: float = 0.8
    gamma: float = 0.99
    alpha: float = None               # fairness threshold, ticks
    wfcount: int = 1
    wmin_rtt: float = None            # latest weighted window-min estimate
    min_rtt_history: list = field(default_factory=list)
    window_samples: set = field(default_factory=set)
    w_t: int = 1
    rx_window: int = 1
    tx_window: int = 1
    wmin_window: list = field(default_factory=list)
    history_sum: int = 0


def estimate_flow_count(window_samples, tolerance: int = ms_to_ticks(0.1)) -> int:
    """Distinct RTT floors in the window, bucketed to the tolerance.

    An empty window counts as one flow: with no evidence of competition
    the fairness adjustment must stay disabled.
    """
    if not window_samples:
        return 1
    return len({s // tolerance for s in window_samples})


def update_wmin_rtt(state: FairttState, min_rtt: int, t_index: int) -> float:
    """Balance-weighted window-minimum RTT estimate.

    Weights the running mean of all previous window minima by the balance
    factor and the current minimum by its complement; with no history the
    current minimum is returned as-is.  Appends the current minimum to
    the history.
    """
    if t_index != len(state.min_rtt_history):
        raise ValueError(
            f"window index {t_index} does not follow history "
            f"of length {len(state.min_rtt_history)}")
    if t_index == 0:
        wmin = float(min_rtt)
    else:
        mean_prev = state.history_sum / t_index
        wmin = state.beta * mean_prev + (1.0 - state.beta) * min_rtt
    state.min_rtt_history.append(min_rtt)
    state.history_sum += min_rtt
    state.wmin_rtt = wmin
    return wmin


def compute_w_t(rx_window: int, tx_window: int) -> int:
    if rx_window < 1 or tx_window < 1:
        raise ValueError("window sizes must be at least 1")
    return min(rx_window, tx_window)


def fairness_threshold(state: FairttState) -> float:
    """Threshold above which an ACK RTT triggers the BDP adjustment:
    estimated flow count times the mean of the most recent weighted
    window-minimum estimates (at most w_t of them)."""
    if state.w_t < 1:
        raise ValueError("w_t must be at least 1")
    recent = state.wmin_window[-state.w_t:]
    if not recent:
        return state.wmin_rtt
    return state.wfcount * (sum(recent) / len(recent))


def adjustment_gate_open(state: FairttState, phase, last_rtt: int) -> bool:
    """Whether the fairness adjustment applies: probing for bandwidth,
    ACK RTT above the threshold, and evidence of a competing flow."""
    return (is_probe_bw(phase)
            and state.alpha is not None
            and state.wfcount >= 2
            and last_rtt > state.alpha)


def adjustment_coefficient(min_rtt: int, last_rtt: int, gamma: float) -> float:
    """``min_rtt * gamma / last_rtt``, evaluated ratio-first so the result
    never exceeds ``gamma`` under floating-point rounding."""
    return gamma * (min_rtt / last_rtt)


def adjusted_bdp(btlbw: float, rtprop: int, last_rtt: int, min_rtt: int,
                 state: FairttState, phase) -> int:
    """BDP with the RTT-fairness adjustment applied when warranted;
    otherwise the base product, unchanged.  Rounds down to whole bytes."""
    if last_rtt <= 0:
        raise ValueError(f"malformed RTT sample: {last_rtt}")
    base = compute_bdp(btlbw, rtprop)
    if not adjustment_gate_open(state, phase, last_rtt):
        return base
    return int(base * adjustment_coefficient(min_rtt, last_rtt, state.gamma))


def fairtt_inflight(bdp: int, cwnd_gain: float) -> int:
    """Inflight allowance from the (possibly adjusted) BDP, pre-clamping."""
    return int(bdp * cwnd_gain)


class FairnessEstimator:
    """Per-run exchange point for the flows' window-minimum RTT estimates.

    Each flow publishes its window minimum and weighted estimate once per
    measurement window; the interleaved stream of estimates feeds every
    flow's fairness threshold, and the set of latest window minima feeds
    the flow-count estimate.
    """

    def __init__(self, tolerance: int, stream_limit: int = 512):
        self.tolerance = tolerance
        self.stream = deque(maxlen=stream_limit)
        self.latest_min = {}

    def publish(self, flow_id, min_rtt: int, wmin_rtt: float) -> None:
        self.stream.append(wmin_rtt)
        self.latest_min[flow_id] = min_rtt

    def window_samples(self) -> set:
        return set(self.latest_min.values())

    def recent(self, n: int) -> list:
        if n >= len(self.stream):
            return list(self.stream)
        return list(self.stream)[-n:]


class FairttEngine(BbrEngine):
    """BBRv2 engine with the fairness-adjusted BDP substituted in."""

    def __init__(self, params: BbrParams = BbrParams(),
                 fairtt: FairttParams = FairttParams(),
                 estimator: FairnessEstimator = None,
                 flow_id=None, start_time: int = 0):
        super().__init__(params, start_time)
        self.fairtt_params = fairtt
        self.estimator = estimator if estimator is not None else (
            FairnessEstimator(fairtt.bucket_tolerance))
        self.flow_id = flow_id
        self.state = FairttState(
            beta=fairtt.balance_factor, gamma=fairtt.discount_factor)
        self._window_min = None
        # Audit trail for the coefficient-bound check across a run.
        self.adjustments_applied = 0
        self.coefficient_min = None
        self.coefficient_max = None

    def _bdp(self, now: int, sample) -> int:
        if sample is None or sample.rtt < 0:
            return compute_bdp(self.btlbw, self.rtprop)
        rtt = sample.rtt
        if self._window_min is None or rtt < self._window_min:
            self._window_min = rtt
        state = self.state
        if not adjustment_gate_open(state, self.phase, rtt):
            return compute_bdp(self.btlbw, self.rtprop)
        coefficient = adjustment_coefficient(self._window_min, rtt, state.gamma)
        self.adjustments_applied += 1
        if self.coefficient_min is None or coefficient < self.coefficient_min:
            self.coefficient_min = coefficient
        if self.coefficient_max is None or coefficient > self.coefficient_max:
            self.coefficient_max = coefficient
        return int(compute_bdp(self.btlbw, self.rtprop) * coefficient)

    def on_window_roll(self, now: int) -> None:
        if self._window_min is None:
            return
        state = self.state
        min_rtt = self._window_min
        self._window_min = None
        wmin = update_wmin_rtt(state, min_rtt, len(state.min_rtt_history))
        est = self.estimator
        est.publish(self.flow_id, min_rtt, wmin)
        state.rx_window = self.fairtt_params.receiver_window_packets
        state.tx_window = max(1, self.inflight_cap // self.params.packet_size)
        state.w_t = compute_w_t(state.rx_window, state.tx_window)
        state.window_samples = est.window_samples()
        state.wfcount = estimate_flow_count(state.window_samples, est.tolerance)
        state.wmin_window = est.recent(state.w_t)
        state.alpha = fairness_threshold(state)
