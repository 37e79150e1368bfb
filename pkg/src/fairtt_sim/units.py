"""Scalar units used throughout the simulator.

Time is an integer count of nanosecond ticks, byte volumes are plain
integers, and configured link bandwidths are integer bits per second, so
all clock and volume arithmetic stays exact.  Estimated rates (delivery
rate, bottleneck bandwidth) are floats in bits per second.
"""

TICKS_PER_US = 1_000
TICKS_PER_MS = 1_000_000
TICKS_PER_S = 1_000_000_000


def ms_to_ticks(ms: float) -> int:
    return int(round(ms * TICKS_PER_MS))


def us_to_ticks(us: float) -> int:
    return int(round(us * TICKS_PER_US))


def s_to_ticks(s: float) -> int:
    return int(round(s * TICKS_PER_S))


def ticks_to_s(ticks: int) -> float:
    return ticks / TICKS_PER_S


def ticks_to_ms(ticks: int) -> float:
    return ticks / TICKS_PER_MS


def mbps_to_bps(mbps: float) -> int:
    return int(round(mbps * 1_000_000))


def bps_to_mbps(bps: float) -> float:
    return bps / 1_000_000


def serialization_ticks(size_bytes: int, bandwidth_bps: int) -> int:
    """Time to clock ``size_bytes`` onto a link, in ticks, rounded up."""
    bits_ns = size_bytes * 8 * TICKS_PER_S
    return -(-bits_ns // bandwidth_bps)


def bdp_bytes(bandwidth_bps: float, rtt_ticks: int) -> int:
    """Bandwidth-delay product in whole bytes, rounded down."""
    if bandwidth_bps <= 0 or rtt_ticks <= 0:
        return 0
    return int(bandwidth_bps * rtt_ticks / (8 * TICKS_PER_S))
