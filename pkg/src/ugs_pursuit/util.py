"""Shared numeric conventions.

All times are 64-bit floats compared with a fixed absolute tolerance:
``a <= b`` means ``a <= b + TIME_EPS`` and ``a == b`` means
``|a - b| <= TIME_EPS``.
"""

TIME_EPS = 1e-9


def teq(a: float, b: float) -> bool:
    return abs(a - b) <= TIME_EPS


def tle(a: float, b: float) -> bool:
    return a <= b + TIME_EPS


def tlt(a: float, b: float) -> bool:
    return a < b - TIME_EPS


def group_times(pairs):
    """Group (time, key) pairs whose times agree within TIME_EPS.

    Returns a list of (representative_time, [keys...]) in increasing time
    order. The representative is the first time seen in the group.
    """
    out = []
    for t, key in sorted(pairs):
        if out and teq(out[-1][0], t):
            out[-1][1].append(key)
        else:
            out.append((t, [key]))
    return out
