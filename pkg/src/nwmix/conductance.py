"""Conductance of vertex sets, connected-set enumeration, and scale profiles.

For a set S, e(S) is the total degree of S, e(S, S^c) the number of edges
leaving it, and Phi(S) = e(S, S^c) / e(S).  The scale profile takes, per
dyadic scale x = 2^-i, the minimum Phi(S) over connected S whose volume lies
in [x*m, 2*x*m]; summing Phi^-2 over scales gives the Fountoulakis-Reed
style mixing-time bound.  Scales whose volume window contains no connected
set get Phi = +inf and contribute 0 to the sum.

Exact minimization enumerates every connected set exactly once with a
canonical-extension recursion; past the enumeration budget, a simulated
annealing search over connected sets gives certified=False upper bounds.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graphs import UndirectedGraph
from .rng import derive_seed, make_rng

DEFAULT_ENUM_BUDGET = 10_000_000


class EnumerationBudgetError(RuntimeError):
    """Exact enumeration would exceed the work budget; use local search."""


@dataclass(frozen=True)
class CutStats:
    """Exact cut/volume statistics of a nonempty vertex set."""

    S: tuple
    cut: int
    internal: int
    volume: int

    @property
    def phi(self) -> Fraction:
        return Fraction(self.cut, self.volume)

    def __post_init__(self):
        if self.volume != 2 * self.internal + self.cut:
            raise AssertionError("volume identity e(S) = 2 e(S,S) + e(S,S^c) violated")


def cut_stats(g: UndirectedGraph, S) -> CutStats:
    """Count internal and leaving edges of S by scanning adjacency rows."""
    S = sorted(int(v) for v in S)
    if not S:
        raise ValueError("conductance of the empty set is undefined")
    if S[0] < 0 or S[-1] >= g.n:
        raise ValueError("set contains a vertex outside the graph")
    if len(set(S)) != len(S):
        raise ValueError("set contains duplicate vertices")
    mask = np.zeros(g.n, dtype=bool)
    mask[S] = True
    volume = int(g.degrees[S].sum())
    same = 0
    for v in S:
        same += int(mask[g.neighbors(v)].sum())
    internal = same // 2
    cut = volume - same
    if volume == 0:
        raise ValueError("set has zero volume; conductance undefined")
    return CutStats(S=tuple(S), cut=cut, internal=internal, volume=volume)


# -- connected set enumeration ---------------------------------------------------
#
# Canonical-extension recursion: each connected set is generated exactly once,
# rooted at its smallest vertex in the active order.  At every recursion node
# the current set, its volume, and its cut count are maintained incrementally,
# so window filtering costs nothing extra.


class _Budget:
    __slots__ = ("left",)

    def __init__(self, budget: int):
        self.left = int(budget)

    def charge(self):
        self.left -= 1
        if self.left < 0:
            raise EnumerationBudgetError(
                "connected-set enumeration exceeded its work budget; "
                "re-run in local-search mode"
            )


def _scan_connected_sets(g, visit, max_size, roots, rank, budget, max_volume=None):
    """Call visit(set_list, volume, cut) once per connected set.

    Sets are grown only with vertices ranked above their root, which makes
    each set appear exactly once.  Recursion stops at max_size vertices and,
    since volume grows monotonically, at volumes beyond max_volume.
    """
    indptr, indices = g.indptr, g.indices
    deg = g.degrees
    n = g.n
    in_set = np.zeros(n, dtype=bool)
    seen = np.zeros(n, dtype=bool)  # in extension now or earlier on this path

    def extend(S, ext, volume, cut):
        budget.charge()
        visit(S, volume, cut)
        if len(S) >= max_size:
            return
        local = []
        while ext:
            w = ext.pop()
            nb = indices[indptr[w]:indptr[w + 1]]
            links = int(in_set[nb].sum())
            vol2 = volume + int(deg[w])
            if max_volume is not None and vol2 > max_volume:
                # still must branch: siblings may fit; just skip this branch
                local.append(w)
                continue
            cut2 = cut + int(deg[w]) - 2 * links
            in_set[w] = True
            fresh = [int(u) for u in nb if not seen[u] and rank[u] > rank[root]]
            for u in fresh:
                seen[u] = True
            S.append(w)
            extend(S, ext | set(fresh), vol2, cut2)
            S.pop()
            in_set[w] = False
            for u in fresh:
                seen[u] = False
            local.append(w)
        ext.update(local)

    for root in roots:
        in_set[root] = True
        seen[root] = True
        nb0 = [int(u) for u in g.neighbors(root) if rank[u] > rank[root]]
        for u in nb0:
            seen[u] = True
        extend([root], set(nb0), int(deg[root]), int(deg[root]))
        for u in nb0:
            seen[u] = False
        in_set[root] = False
        seen[root] = False


def connected_sets(g: UndirectedGraph, j: int, containing: int | None = None,
                   budget: int = DEFAULT_ENUM_BUDGET):
    """Yield every connected vertex set of size j exactly once, as a sorted
    tuple, optionally restricted to sets containing a given vertex.

    Raises EnumerationBudgetError (never a silent truncation) past the work
    budget.
    """
    if not 1 <= j <= g.n:
        raise ValueError(f"size j must be in [1, n], got {j}")
    out: list[tuple] = []
    bud = _Budget(budget)
    if containing is None:
        rank = np.arange(g.n)
        roots = range(g.n)
    else:
        v = int(containing)
        if not 0 <= v < g.n:
            raise ValueError("containing vertex out of range")
        rank = np.arange(1, g.n + 1)
        rank[v] = 0  # v becomes the forced root
        roots = [v]

    def visit(S, volume, cut):
        if len(S) == j:
            out.append(tuple(sorted(S)))

    _scan_connected_sets(g, visit, j, roots, rank, bud)
    yield from out


def count_connected_sets(g: UndirectedGraph, j: int, containing: int | None = None,
                         budget: int = DEFAULT_ENUM_BUDGET) -> int:
    """|B_j| or |B_{j,v}| without materializing the sets."""
    if not 1 <= j <= g.n:
        raise ValueError(f"size j must be in [1, n], got {j}")
    bud = _Budget(budget)
    if containing is None:
        rank = np.arange(g.n)
        roots = range(g.n)
    else:
        v = int(containing)
        rank = np.arange(1, g.n + 1)
        rank[v] = 0
        roots = [v]
    count = 0

    def visit(S, volume, cut):
        nonlocal count
        if len(S) == j:
            count += 1

    _scan_connected_sets(g, visit, j, roots, rank, bud)
    return count


# -- scale profile ---------------------------------------------------------------


@dataclass
class ScaleEntry:
    """Minimum conductance over connected sets in one volume window."""

    i: int | None
    x: Fraction
    vol_lo: Fraction
    vol_hi: Fraction
    phi: Fraction | float  # Fraction, or math.inf for an empty window
    witness: tuple | None
    certified: bool

    @property
    def empty(self) -> bool:
        return self.witness is None


@dataclass
class ScaleProfile:
    n: int
    m: int
    mode: str
    entries: list[ScaleEntry] = field(default_factory=list)

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["i", "x", "phi", "volume_lo", "volume_hi", "certified",
                        "witness_size"])
            for e in self.entries:
                phi = "inf" if e.empty else repr(float(e.phi))
                size = "" if e.witness is None else len(e.witness)
                w.writerow([e.i, repr(float(e.x)), phi, repr(float(e.vol_lo)),
                            repr(float(e.vol_hi)), str(e.certified).lower(), size])


def num_scales(m: int) -> int:
    return max(1, math.ceil(math.log2(m)))


def _window_minimum_exact(g, windows, size_cap=None, budget=DEFAULT_ENUM_BUDGET):
    """Exact minimum Phi per volume window via one enumeration pass.

    windows: list of (vol_lo, vol_hi) Fractions.  Returns per-window
    (phi, witness) with lexicographically-smallest witness on ties.
    """
    best: list[tuple[Fraction, tuple] | None] = [None] * len(windows)
    max_vol = max(hi for _, hi in windows)
    min_deg = int(g.degrees.min())
    max_size = g.n if min_deg == 0 else min(g.n, int(max_vol // max(1, min_deg)))
    if size_cap is not None:
        max_size = min(max_size, size_cap)
    bud = _Budget(budget)
    rank = np.arange(g.n)

    def visit(S, volume, cut):
        for w, (lo, hi) in enumerate(windows):
            if lo <= volume <= hi:
                phi = Fraction(cut, volume)
                cur = best[w]
                if cur is None or phi < cur[0]:
                    best[w] = (phi, tuple(sorted(S)))
                elif phi == cur[0]:
                    cand = tuple(sorted(S))
                    if cand < cur[1]:
                        best[w] = (phi, cand)

    _scan_connected_sets(g, visit, max_size, range(g.n), rank, bud,
                         max_volume=max_vol)
    return best


def _grown_seed(g, start, rng, vol_lo):
    """Grow a connected set from a start vertex until the window floor."""
    S = {int(start)}
    volume = int(g.degrees[list(S)].sum())
    while volume < vol_lo and len(S) < g.n:
        boundary = set()
        for v in S:
            boundary.update(int(u) for u in g.neighbors(v) if u not in S)
        if not boundary:
            break
        w = sorted(boundary)[int(rng.integers(len(boundary)))]
        S.add(w)
        volume += int(g.degrees[w])
    return S


def _is_connected_subset(g, S) -> bool:
    S = set(S)
    if not S:
        return False
    start = next(iter(S))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for u in g.neighbors(v):
            u = int(u)
            if u in S and u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == len(S)


def _anneal_once(g, start, vol_lo, vol_hi, size_cap, rng, iterations):
    """One annealing run; returns (phi, witness) for the best valid set seen."""
    deg = g.degrees
    S = _grown_seed(g, start, rng, vol_lo)
    stats = cut_stats(g, S)
    volume, cut = stats.volume, stats.cut
    best = None

    def consider(S_, cut_, vol_):
        nonlocal best
        if vol_lo <= vol_ <= vol_hi and (size_cap is None or len(S_) <= size_cap):
            phi = Fraction(cut_, vol_)
            if best is None or phi < best[0]:
                best = (phi, tuple(sorted(S_)))

    consider(S, cut, volume)

    def window_penalty(vol, size):
        pen = 0.0
        if vol < vol_lo:
            pen += float((vol_lo - vol) / vol_lo)
        elif vol > vol_hi:
            pen += float((vol - vol_hi) / vol_hi)
        if size_cap is not None and size > size_cap:
            pen += (size - size_cap) / size_cap
        return 2.0 * pen

    def objective(cut_, vol_, size_):
        return cut_ / vol_ + window_penalty(vol_, size_)

    cur_obj = objective(cut, volume, len(S))
    temp = 0.25
    cooling = 0.99 if iterations < 500 else math.exp(math.log(0.004) / iterations)
    for _ in range(iterations):
        # bias move choice toward re-entering the volume window
        grow_p = 0.5 if vol_lo <= volume <= vol_hi else (
            0.8 if volume < vol_lo else 0.2)
        grow = rng.random() < grow_p or len(S) <= 1
        if grow:
            boundary = sorted(
                {int(u) for v in S for u in g.neighbors(v) if int(u) not in S}
            )
            if not boundary:
                grow = False
            else:
                w = boundary[int(rng.integers(len(boundary)))]
                links = sum(1 for u in g.neighbors(w) if int(u) in S)
                vol2 = volume + int(deg[w])
                cut2 = cut + int(deg[w]) - 2 * links
                S2 = S | {w}
        if not grow:
            cands = sorted(S)
            w = cands[int(rng.integers(len(cands)))]
            S2 = S - {w}
            if not S2 or not _is_connected_subset(g, S2):
                temp *= cooling
                continue
            links = sum(1 for u in g.neighbors(w) if int(u) in S2)
            vol2 = volume - int(deg[w])
            cut2 = cut - int(deg[w]) + 2 * links
        obj2 = objective(cut2, vol2, len(S2))
        if obj2 <= cur_obj or rng.random() < math.exp((cur_obj - obj2) / max(temp, 1e-9)):
            S, volume, cut, cur_obj = S2, vol2, cut2, obj2
            consider(S, cut, volume)
        temp *= cooling
    return best


def _window_minimum_local(g, windows, size_cap, seed, iterations, restarts):
    """Per-window best annealing result over restarts.

    Restart r seeds its growth at vertex r mod n, so with restarts >= n
    every single-vertex set is tried, which matters for the smallest-volume
    windows.
    """
    results = []
    for w, (lo, hi) in enumerate(windows):
        best = None
        for r in range(restarts):
            rng = make_rng(derive_seed(seed, w, r))
            got = _anneal_once(g, r % g.n, lo, hi, size_cap, rng, iterations)
            if got is not None and (best is None or got[0] < best[0]):
                best = got
        results.append(best)
    return results


def phi_at_scale(
    g: UndirectedGraph,
    x,
    mode: str = "exact",
    seed: int = 0,
    iterations: int = 400,
    restarts: int = 32,
    budget: int = DEFAULT_ENUM_BUDGET,
    scale_index: int | None = None,
) -> ScaleEntry:
    """Minimum conductance over connected sets with volume in [x*m, 2*x*m].

    Exact mode enumerates and certifies the true minimum; local-search mode
    reports the best set found by annealing, an upper bound on the truth,
    flagged certified=False.  An empty window yields phi = +inf.
    """
    if not g.is_connected():
        raise ValueError("scale profile requires a connected graph")
    x = Fraction(x)
    if not 0 < x <= Fraction(1, 2):
        raise ValueError("scale x must lie in (0, 1/2]")
    lo, hi = x * g.m, 2 * x * g.m
    if mode == "exact":
        got = _window_minimum_exact(g, [(lo, hi)], budget=budget)[0]
        certified = True
    elif mode == "local-search":
        got = _window_minimum_local(g, [(lo, hi)], None, seed, iterations, restarts)[0]
        certified = False
    else:
        raise ValueError(f"unknown mode {mode!r}")
    phi, witness = (math.inf, None) if got is None else got
    return ScaleEntry(i=scale_index, x=x, vol_lo=lo, vol_hi=hi, phi=phi,
                      witness=witness, certified=certified)


@dataclass
class FRBound:
    """Sum of Phi^-2 over dyadic scales, with its per-scale profile.

    In local-search mode every per-scale phi is an upper bound on the truth,
    so the reported sum is a lower estimate of the true sum.
    """

    total: Fraction
    profile: ScaleProfile
    certified: bool

    def to_json(self) -> str:
        payload = {
            "n": self.profile.n,
            "m": self.profile.m,
            "sum": float(self.total),
            "sum_exact": str(self.total),
            "certified": self.certified,
            "scales": [
                {
                    "i": e.i,
                    "x": float(e.x),
                    "phi": (None if e.empty else float(e.phi)),
                    "witness_size": (None if e.witness is None else len(e.witness)),
                    "certified": e.certified,
                }
                for e in self.profile.entries
            ],
        }
        return json.dumps(payload)


def fr_bound(
    g: UndirectedGraph,
    mode: str = "exact",
    seed: int = 0,
    iterations: int = 400,
    restarts: int = 32,
    budget: int = DEFAULT_ENUM_BUDGET,
    size_cap: int | None = None,
    windows: list[tuple[Fraction, Fraction]] | None = None,
) -> FRBound:
    """Sum Phi^-2(2^-i) over i = 1..ceil(log2 m); empty scales contribute 0.

    ``windows`` overrides the per-scale volume windows (same length as the
    scale count) for profile variants; the default is [2^-i m, 2^(1-i) m].
    """
    if not g.is_connected():
        raise ValueError("scale profile requires a connected graph")
    L = num_scales(g.m)
    xs = [Fraction(1, 2**i) for i in range(1, L + 1)]
    if windows is None:
        windows = [(x * g.m, 2 * x * g.m) for x in xs]
    if len(windows) != L:
        raise ValueError("need one window per scale")
    if mode == "exact":
        got = _window_minimum_exact(g, windows, size_cap=size_cap, budget=budget)
        certified = True
    elif mode == "local-search":
        got = _window_minimum_local(g, windows, size_cap, seed, iterations, restarts)
        certified = False
    else:
        raise ValueError(f"unknown mode {mode!r}")
    profile = ScaleProfile(n=g.n, m=g.m, mode=mode)
    total = Fraction(0)
    for i, (x, (lo, hi), res) in enumerate(zip(xs, windows, got), start=1):
        if res is None:
            phi, witness = math.inf, None
        else:
            phi, witness = res
            if phi > 0:
                total += Fraction(1) / (phi * phi)
            # phi == 0 can only happen for S = V, excluded by the windows
        profile.entries.append(
            ScaleEntry(i=i, x=x, vol_lo=lo, vol_hi=hi, phi=phi,
                       witness=witness, certified=certified)
        )
    return FRBound(total=total, profile=profile, certified=certified)
