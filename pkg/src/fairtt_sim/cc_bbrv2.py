"""BBRv2 congestion control engine.

Model-based control: the path is characterised by the bottleneck
bandwidth (windowed maximum of delivery-rate samples) and the round-trip
propagation time (monotone minimum with a periodic re-probe).  Their
product, the BDP, scaled by the phase's congestion-window gain, caps the
bytes allowed in flight; the pacing rate is the bandwidth estimate scaled
by the phase's pacing gain.

Phases: Startup (exponential growth until the bandwidth plateaus or loss
crosses the threshold), Drain (empty the startup queue), a four-stage
ProbeBW cycle (Refill, Up, Down, Cruise), and ProbeRTT (shrink the window
to re-measure the propagation delay when no new minimum has been seen for
the probe interval).
"""

from dataclasses import dataclass, field
from enum import IntEnum

from .filters import WindowedMaxFilter, WindowedMinFilter
from .units import TICKS_PER_S, bdp_bytes, ms_to_ticks, s_to_ticks


class Phase(IntEnum):
    STARTUP = 1
    DRAIN = 2
    PROBE_BW_REFILL = 3
    PROBE_BW_UP = 4
    PROBE_BW_DOWN = 5
    PROBE_BW_CRUISE = 6
    PROBE_RTT = 7


def is_probe_bw(phase: Phase) -> bool:
    return Phase.PROBE_BW_REFILL <= phase <= Phase.PROBE_BW_CRUISE


@dataclass(frozen=True)
class BbrParams:
    """Tunables; defaults follow the algorithm's published constants."""

    packet_size: int = 1000
    startup_pacing_gain: float = 2.89
    drain_pacing_gain: float = 0.34
    refill_pacing_gain: float = 1.0
    up_pacing_gain: float = 1.25
    down_pacing_gain: float = 0.75
    cruise_pacing_gain: float = 1.0
    probe_rtt_pacing_gain: float = 1.0
    cwnd_gain: float = 2.0
    probe_rtt_cwnd_gain: float = 0.5
    # Startup exits when bandwidth growth stays under this ratio for this
    # many consecutive rounds, or when round loss crosses loss_threshold.
    startup_growth_thresh: float = 1.25
    startup_growth_rounds: int = 3
    loss_threshold: float = 0.02
    # ProbeBW Up stops once inflight reaches this multiple of the BDP.
    probe_up_inflight_factor: float = 1.25
    # Full probe cycle target (Refill+Up+Down+Cruise) in units of rtprop.
    probe_cycle_rtprops: int = 8
    # Bandwidth filter window: this many probe cycles.
    bw_window_cycles: int = 2
    probe_rtt_interval: int = s_to_ticks(5)
    probe_rtt_duration: int = ms_to_ticks(200)
    rtprop_window: int = s_to_ticks(5)
    # Cruise time granted after leaving ProbeRTT before the next Refill.
    post_probe_rtt_rtprops: int = 2
    min_cwnd_packets: int = 4
    initial_cwnd_packets: int = 10
    inflight_lo_bdp_factor: float = 0.75


# (pacing_gain, cwnd_gain) admissible per phase; the in-run invariant
# checker asserts the live model against this table at every event.
def gain_table(params: BbrParams) -> dict:
    return {
        Phase.STARTUP: (params.startup_pacing_gain, params.cwnd_gain),
        Phase.DRAIN: (params.drain_pacing_gain, params.cwnd_gain),
        Phase.PROBE_BW_REFILL: (params.refill_pacing_gain, params.cwnd_gain),
        Phase.PROBE_BW_UP: (params.up_pacing_gain, params.cwnd_gain),
        Phase.PROBE_BW_DOWN: (params.down_pacing_gain, params.cwnd_gain),
        Phase.PROBE_BW_CRUISE: (params.cruise_pacing_gain, params.cwnd_gain),
        Phase.PROBE_RTT: (params.probe_rtt_pacing_gain, params.probe_rtt_cwnd_gain),
    }


@dataclass(frozen=True)
class CcDecision:
    pacing_rate: float
    inflight_cap: int
    phase: Phase


class AckSample:
    """Per-ACK input to the engine, assembled by the sender."""

    __slots__ = (
        "rtt",
        "delivery_rate",
        "app_limited",
        "acked_bytes",
        "delivered_at_send",
        "delivered_total",
    )

    def __init__(self, rtt, delivery_rate, app_limited, acked_bytes,
                 delivered_at_send, delivered_total):
        self.rtt = rtt                          # ticks; -1 when unusable
        self.delivery_rate = delivery_rate      # bits/s; -1.0 when unusable
        self.app_limited = app_limited
        self.acked_bytes = acked_bytes
        self.delivered_at_send = delivered_at_send
        self.delivered_total = delivered_total


def compute_bdp(btlbw: float, rtprop) -> int:
    """Bandwidth-delay product in whole bytes (floor); 0 when unknown."""
    if rtprop is None:
        return 0
    return bdp_bytes(btlbw, rtprop)


class BbrEngine:
    """Per-flow model state plus the phase machine.

    The owning sender reports sends, ACK samples and detected losses; the
    engine exposes the pacing clock and the inflight cap.  No state is
    shared between flows.
    """

    def __init__(self, params: BbrParams = BbrParams(), start_time: int = 0):
        p = params
        self.params = p
        self.phase = Phase.STARTUP
        self.pacing_gain = p.startup_pacing_gain
        self.cwnd_gain = p.cwnd_gain

        self.btlbw = 0.0                  # bits/s
        self.rtprop = None                # ticks
        self.rtprop_stamp = start_time    # last time rtprop was refreshed
        self.bdp = 0
        self.inflight_cap = p.initial_cwnd_packets * p.packet_size
        self.inflight_hi = None
        self.inflight_lo = None
        self.inflight_lo_until = 0
        self.last_rtt = None
        self.delivery_rate = 0.0
        self.app_limited = False
        self.probe_rtt_expired = False
        self.bytes_in_flight = 0

        self.max_bw_filter = WindowedMaxFilter(p.rtprop_window)
        self.rtprop_filter = WindowedMinFilter(p.rtprop_window)

        # Pacing clock: next instant a packet may leave. 0 rate = unpaced
        # (before the first bandwidth sample only the cap limits sending).
        self.pacing_rate = 0.0
        self.next_send_at = start_time

        # Round accounting (a round ends when a packet sent after the
        # previous round's deliveries completes).
        self.round_count = 0
        self.round_start_delivered = 0
        self.round_delivered_pkts = 0
        self.round_lost_pkts = 0
        self.startup_growth_history = []
        self._btlbw_last_round = 0.0

        # Phase bookkeeping.
        self.cycle_start = start_time
        self.refill_started = start_time
        self.next_refill_at = 0
        self.probe_rtt_entered_at = None
        self.probe_rtt_done_at = None
        self.probe_rtt_timer_wanted = False
        self.probe_rtt_visits = []        # (entered, exited) pairs

        # Diagnostics.
        self.acks_ignored = 0

    # -- estimator updates ------------------------------------------------

    def update_btlbw(self, drate: float, app_limited: bool, now: int) -> float:
        """Fold a delivery-rate sample into the bandwidth estimate.

        The sample always enters the windowed max; the estimate moves to
        the window maximum when the sample is at least the previous
        estimate or was not taken app-limited, and is retained otherwise.
        """
        self.max_bw_filter.update(drate, now)
        if drate >= self.btlbw or not app_limited:
            self.btlbw = float(self.max_bw_filter.current(now))
        return self.btlbw

    def update_rtprop(self, last_rtt: int, now: int) -> int:
        """Fold an RTT sample into the propagation estimate.

        New minima are always accepted; after a ProbeRTT expiry the next
        sample is accepted unconditionally, which lets the estimate rise
        when the true path delay grew.
        """
        self.rtprop_filter.update(last_rtt, now)
        if self.rtprop is None or last_rtt <= self.rtprop:
            self._set_rtprop(last_rtt, now)
        elif self.probe_rtt_expired:
            self._set_rtprop(last_rtt, now)
        self.probe_rtt_expired = False
        return self.rtprop

    def _set_rtprop(self, value: int, now: int) -> None:
        self.rtprop = value
        self.rtprop_stamp = now
        p = self.params
        window = p.bw_window_cycles * p.probe_cycle_rtprops * value
        self.max_bw_filter.window = max(window, value)

    # -- cap / pacing -----------------------------------------------------

    def compute_inflight_cap(self, bdp: int, cwnd_gain: float, now: int = 0) -> int:
        """Allowed in-flight bytes: bdp * gain clamped into the active
        [inflight_lo, inflight_hi] band, with a floor of min_cwnd packets."""
        cap = int(bdp * cwnd_gain)
        if self.inflight_lo is not None and now < self.inflight_lo_until:
            cap = max(cap, self.inflight_lo)
        if self.inflight_hi is not None:
            cap = min(cap, self.inflight_hi)
        return max(cap, self.params.min_cwnd_packets * self.params.packet_size)

    def can_send(self, now: int, size: int) -> bool:
        if self.bytes_in_flight + size > self.inflight_cap:
            return False
        return now >= self.next_send_at

    def cap_allows(self, size: int) -> bool:
        return self.bytes_in_flight + size <= self.inflight_cap

    def on_sent(self, now: int, size: int) -> None:
        self.bytes_in_flight += size
        if self.pacing_rate > 0.0:
            gap = int(size * 8 * TICKS_PER_S / self.pacing_rate)
            base = self.next_send_at if self.next_send_at > now else now
            self.next_send_at = base + gap

    # -- loss -------------------------------------------------------------

    def on_loss(self, now: int, size: int) -> None:
        self.bytes_in_flight -= size
        self.round_lost_pkts += 1
        p = self.params
        if self.phase == Phase.PROBE_BW_CRUISE:
            lo = max(self.bytes_in_flight, int(p.inflight_lo_bdp_factor * self.bdp))
            self.inflight_lo = lo
            self.inflight_lo_until = now + (self.rtprop or 0)
        if self._round_loss_exceeded():
            if self.phase == Phase.STARTUP:
                self._enter_drain(now)
            elif self.phase == Phase.PROBE_BW_UP:
                self.inflight_hi = max(
                    self.bytes_in_flight, p.min_cwnd_packets * p.packet_size)
                self._enter_down(now)

    def _round_loss_exceeded(self) -> bool:
        lost = self.round_lost_pkts
        if lost < 2:
            return False
        total = lost + self.round_delivered_pkts
        return lost > self.params.loss_threshold * total

    # -- ACK processing ---------------------------------------------------

    def on_ack(self, now: int, sample: AckSample) -> CcDecision:
        if sample.rtt >= 0:
            self.last_rtt = sample.rtt
            self.update_rtprop(sample.rtt, now)
        if sample.delivery_rate >= 0.0:
            self.delivery_rate = sample.delivery_rate
            self.update_btlbw(sample.delivery_rate, sample.app_limited, now)
        self.bytes_in_flight -= sample.acked_bytes
        self.round_delivered_pkts += 1

        if sample.delivered_at_send >= self.round_start_delivered:
            self._on_round_end(now, sample.delivered_total)

        self.step_phase(now)
        self._recompute(now, sample)
        return CcDecision(self.pacing_rate, self.inflight_cap, self.phase)

    def _on_round_end(self, now: int, delivered_total: int) -> None:
        self.round_count += 1
        self.round_start_delivered = delivered_total
        if self.phase == Phase.STARTUP:
            prev = self._btlbw_last_round
            if prev > 0.0:
                history = self.startup_growth_history
                history.append(self.btlbw / prev)
                if len(history) > self.params.startup_growth_rounds:
                    history.pop(0)
                if (len(history) == self.params.startup_growth_rounds
                        and all(r < self.params.startup_growth_thresh
                                for r in history)):
                    self._enter_drain(now)
            self._btlbw_last_round = self.btlbw
            if self._round_loss_exceeded() and self.phase == Phase.STARTUP:
                self._enter_drain(now)
        self.round_delivered_pkts = 0
        self.round_lost_pkts = 0

    # -- phase machine ----------------------------------------------------

    def step_phase(self, now: int) -> Phase:
        p = self.params
        phase = self.phase
        if (phase != Phase.PROBE_RTT and self.rtprop is not None
                and now - self.rtprop_stamp >= p.probe_rtt_interval):
            self._enter_probe_rtt(now)
            return self.phase

        if phase == Phase.DRAIN:
            if self.bytes_in_flight <= self.bdp:
                self._enter_refill(now, cycle_start=now)
        elif phase == Phase.PROBE_BW_REFILL:
            if self.rtprop is not None and now - self.refill_started >= self.rtprop:
                self._set_phase(Phase.PROBE_BW_UP)
        elif phase == Phase.PROBE_BW_UP:
            if self.bytes_in_flight >= int(p.probe_up_inflight_factor * self.bdp):
                self._enter_down(now)
        elif phase == Phase.PROBE_BW_DOWN:
            if self.bytes_in_flight < self.bdp:
                self._enter_cruise(now)
        elif phase == Phase.PROBE_BW_CRUISE:
            if now >= self.next_refill_at:
                self._enter_refill(now, cycle_start=now)
        return self.phase

    def on_probe_rtt_timer(self, now: int) -> None:
        if self.phase != Phase.PROBE_RTT:
            return
        self.probe_rtt_visits.append((self.probe_rtt_entered_at, now))
        self.probe_rtt_expired = True
        self.rtprop_stamp = now
        self.probe_rtt_entered_at = None
        self.probe_rtt_done_at = None
        rtprop = self.rtprop or 0
        self._set_phase(Phase.PROBE_BW_CRUISE)
        self.next_refill_at = now + self.params.post_probe_rtt_rtprops * rtprop
        self._recompute(now, None)

    def _enter_probe_rtt(self, now: int) -> None:
        self._set_phase(Phase.PROBE_RTT)
        self.probe_rtt_entered_at = now
        self.probe_rtt_done_at = now + self.params.probe_rtt_duration
        self.probe_rtt_timer_wanted = True

    def _enter_drain(self, now: int) -> None:
        self._set_phase(Phase.DRAIN)

    def _enter_refill(self, now: int, cycle_start: int) -> None:
        self.cycle_start = cycle_start
        self.refill_started = now
        self._set_phase(Phase.PROBE_BW_REFILL)

    def _enter_down(self, now: int) -> None:
        self._set_phase(Phase.PROBE_BW_DOWN)

    def _enter_cruise(self, now: int) -> None:
        self._set_phase(Phase.PROBE_BW_CRUISE)
        p = self.params
        rtprop = self.rtprop or 0
        target = self.cycle_start + p.probe_cycle_rtprops * rtprop
        floor = now + rtprop
        self.next_refill_at = target if target > floor else floor

    def _set_phase(self, phase: Phase) -> None:
        self.phase = phase
        p = self.params
        if phase == Phase.STARTUP:
            self.pacing_gain = p.startup_pacing_gain
        elif phase == Phase.DRAIN:
            self.pacing_gain = p.drain_pacing_gain
        elif phase == Phase.PROBE_BW_REFILL:
            self.pacing_gain = p.refill_pacing_gain
        elif phase == Phase.PROBE_BW_UP:
            self.pacing_gain = p.up_pacing_gain
        elif phase == Phase.PROBE_BW_DOWN:
            self.pacing_gain = p.down_pacing_gain
        elif phase == Phase.PROBE_BW_CRUISE:
            self.pacing_gain = p.cruise_pacing_gain
        else:
            self.pacing_gain = p.probe_rtt_pacing_gain
        self.cwnd_gain = (p.probe_rtt_cwnd_gain if phase == Phase.PROBE_RTT
                          else p.cwnd_gain)

    # -- recompute --------------------------------------------------------

    def _bdp(self, now: int, sample) -> int:
        return compute_bdp(self.btlbw, self.rtprop)

    def _recompute(self, now: int, sample) -> None:
        if self.inflight_lo is not None and now >= self.inflight_lo_until:
            self.inflight_lo = None
        self.bdp = self._bdp(now, sample)
        if self.rtprop is None or self.btlbw <= 0.0:
            return
        self.inflight_cap = self.compute_inflight_cap(self.bdp, self.cwnd_gain, now)
        self.pacing_rate = self.pacing_gain * self.btlbw

    # -- hooks for subclasses ----------------------------------------------

    def on_window_roll(self, now: int) -> None:
        """Periodic measurement-window boundary; no-op for plain BBRv2."""
