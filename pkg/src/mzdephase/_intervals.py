"""Internal helper to merge flagged grid steps into maximal intervals."""
from __future__ import annotations


def merge_rising_steps(grid, rising) -> list[tuple[float, float]]:
    """Collect maximal runs of flagged consecutive-point steps into
    (t_lo, t_hi) intervals, in time order.

    ``rising[k]`` refers to the step from grid[k] to grid[k+1].
    """
    intervals = []
    start = None
    for k, flag in enumerate(rising):
        if flag and start is None:
            start = grid[k]
        elif not flag and start is not None:
            intervals.append((float(start), float(grid[k])))
            start = None
    if start is not None:
        intervals.append((float(start), float(grid[-1])))
    return intervals
