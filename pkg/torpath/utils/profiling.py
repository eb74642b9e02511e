from typing import Iterator
import contextlib
import cProfile
import linecache
import logging
import tracemalloc

LOGGER = logging.getLogger(__name__)


@contextlib.contextmanager
def profiling(malloc: bool = False, prof: bool = False,
              filename: str = "profile.stat") -> Iterator[None]:
    """Optionally trace allocations and/or profile the enclosed block."""
    if malloc:
        tracemalloc.start()
    profiler = None
    if prof:
        profiler = cProfile.Profile()
        profiler.enable()
    try:
        yield
    finally:
        if malloc:
            display_top(tracemalloc.take_snapshot(), limit=10)
            tracemalloc.stop()
        if profiler is not None:
            profiler.disable()
            profiler.dump_stats(filename)


def display_top(snapshot: tracemalloc.Snapshot, key_type: str = 'lineno', limit: int = 10):
    """Log the ``limit`` allocation sites holding the most memory."""
    snapshot = snapshot.filter_traces((
        tracemalloc.Filter(False, "<frozen importlib._bootstrap>"),
        tracemalloc.Filter(False, "<unknown>"),
    ))
    stats = snapshot.statistics(key_type, cumulative=True)
    LOGGER.warning("top %d allocation sites", limit)
    for rank, stat in enumerate(stats[:limit], 1):
        frame = stat.traceback[0]
        source = linecache.getline(frame.filename, frame.lineno).strip()
        LOGGER.warning("#%d: %s:%d: %.1f KiB %s", rank, frame.filename, frame.lineno,
                       stat.size / 1024, source)
    rest = stats[limit:]
    if rest:
        LOGGER.warning("%d other sites: %.1f KiB", len(rest),
                       sum(stat.size for stat in rest) / 1024)
    LOGGER.warning("total allocated: %.1f KiB", sum(stat.size for stat in stats) / 1024)
