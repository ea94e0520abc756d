"""Brute-force reference computations, deliberately independent of the engine."""


def pairwise_percentiles(pairs):
    """O(n^2): count strictly-lower and tied papers for every member."""
    n = len(pairs)
    out = {}
    for pid, c in pairs:
        lower = 0
        tied = 0
        for _, other in pairs:
            if other < c:
                lower += 1
            elif other == c:
                tied += 1
        out[pid] = 100.0 * (lower + 0.5 * tied) / n
    return out


def plain_mean(values):
    total = 0
    for v in values:
        total += v
    return total / len(values)
