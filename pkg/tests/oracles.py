"""Independent reference implementations used only by the tests.

They favour the most literal reading of each definition over speed, and share
no code with the package.
"""

from __future__ import annotations

import itertools
import math

import mpmath


def doe_mp(adds, fa, size, days, digits: int = 40):
    with mpmath.workdps(digits):
        return (
            mpmath.mpf("5.28223")
            + mpmath.mpf("0.23173") * mpmath.log(1 + mpmath.mpf(adds))
            + mpmath.mpf("0.36151") * fa
            - mpmath.mpf("0.28761") * mpmath.log(mpmath.mpf(size))
            - mpmath.mpf("0.19421") * mpmath.log(1 + mpmath.mpf(days))
        )


def kendall_tau_b(x, y) -> float:
    """Tau-b by enumerating every pair of observations."""
    n = len(x)
    concordant = discordant = tied_x = tied_y = 0
    for i, j in itertools.combinations(range(n), 2):
        dx, dy = x[i] - x[j], y[i] - y[j]
        if dx == 0 and dy == 0:
            tied_x += 1
            tied_y += 1
        elif dx == 0:
            tied_x += 1
        elif dy == 0:
            tied_y += 1
        elif (dx > 0) == (dy > 0):
            concordant += 1
        else:
            discordant += 1
    n0 = n * (n - 1) // 2
    return (concordant - discordant) / math.sqrt((n0 - tied_x) * (n0 - tied_y))


def _midranks(values):
    ranks = []
    for v in values:
        below = sum(1 for w in values if w < v)
        equal = sum(1 for w in values if w == v)
        ranks.append(below + (equal + 1) / 2)
    return ranks


def wilcoxon_enumerated(diffs):
    """(W+, two-sided p) by listing all 2**n sign patterns of the non-zero ranks."""
    nz = [d for d in diffs if d != 0]
    ranks = _midranks([abs(d) for d in nz])
    observed = sum(r for r, d in zip(ranks, nz) if d > 0)
    le = ge = 0
    for signs in itertools.product((0, 1), repeat=len(nz)):
        w = sum(r for r, s in zip(ranks, signs) if s)
        le += w <= observed + 1e-9
        ge += w >= observed - 1e-9
    total = 2 ** len(nz)
    return observed, min(1.0, 2 * min(le, ge) / total)


def truck_factor_rescan(experts: dict[str, set[str]], coverage: float = 0.5):
    """Greedy Truck Factor, recounting every developer's files from scratch each round."""
    removed: list[str] = []
    order = []
    trace = []
    total = len(experts)

    def abandoned() -> float:
        return sum(1 for devs in experts.values() if not (devs - set(removed))) / total

    while abandoned() <= coverage:
        counts = {}
        for devs in experts.values():
            for dev in devs - set(removed):
                counts[dev] = counts.get(dev, 0) + 1
        if not counts:
            break
        best = max(counts.values())
        pick = sorted(d for d, c in counts.items() if c == best)[0]
        removed.append(pick)
        order.append((pick, best))
        trace.append(abandoned())
    return order, trace
