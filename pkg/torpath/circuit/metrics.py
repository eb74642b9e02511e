"""Closed-form circuit metrics."""
from ..errors import InvalidParameter
from ..network.regions import LatencyMatrix, RegionId


def bottleneck_bandwidth(bw_guard: float, bw_middle: float, bw_exit: float) -> float:
    """Effective throughput of a circuit: its slowest member, in KB/s."""
    for name, value in (('guard', bw_guard), ('middle', bw_middle), ('exit', bw_exit)):
        if not value > 0:
            raise InvalidParameter(f"{name} bandwidth", f"{value} is not positive")
    return min(bw_guard, bw_middle, bw_exit)


def circuit_latency(matrix: LatencyMatrix, region_g: RegionId,
                    region_m: RegionId, region_e: RegionId) -> float:
    """Sum of the two inter-hop delays, in ms."""
    return matrix(region_g, region_m) + matrix(region_m, region_e)


def circuit_efficiency(bandwidth_kbps: float, latency_ms: float) -> float:
    """Unitless efficiency score B / (L + 1)."""
    if not bandwidth_kbps > 0:
        raise InvalidParameter("bandwidth", f"{bandwidth_kbps} is not positive")
    if latency_ms < 0:
        raise InvalidParameter("latency", f"{latency_ms} is negative")
    return bandwidth_kbps / (latency_ms + 1.0)
