"""Maximum symmetric rate per decoding scheme.

Every region here is downward closed, so the max-min rate equals the
largest equal rate the region supports. For TIN that is a single bound; for
SD and SND it decomposes into independent per-receiver scans (the region at
each receiver is a union of MAC polytopes and the equal-rate point only has
to land in one of them). The layered scheme genuinely needs LPs over the 2L
split rates: one per network polytope, maximized over the polytope family
and line-searched over the power split.

A product-enumeration LP oracle for SD/SND is kept alongside the fast
decomposition as a cross-check; it is exponential in the cell count and
gated to small networks.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import product

import numpy as np

from .bounds import GainTable, LayeredGainTable, layer_bit
from .regions import (
    MacPolytope,
    ModifiedMacPolytope,
    build_mac_polytope,
    enumerate_rs_sets,
    enumerate_rs_sub_sets,
    enumerate_snd_sets,
)
from .simplex import max_min_rate_value, solve_max_min_rate

PRUNE_TOL = 1e-9


@dataclass(frozen=True)
class SymRateReport:
    """Outcome of one scheme on one gain table.

    rate_vector holds the 2L split rates (outer, inner per cell); unsplit
    schemes report all rate on the inner layer. winning_split is the power
    split found best for the layered scheme, None elsewhere.
    """

    scheme: str
    sym_rate: float
    rate_vector: np.ndarray
    winning_combo: tuple | None = None
    winning_split: float | None = None


def _equal_rate_vector(n_cells: int, t: float) -> np.ndarray:
    v = np.zeros(2 * n_cells)
    v[1::2] = t
    return v


def _subset_power_sums(powers: np.ndarray) -> np.ndarray:
    """Sums of powers over every cell bitmask; powers is (L,)."""
    n = powers.shape[0]
    sums = np.zeros(1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + powers[low.bit_length() - 1]
    return sums


def mac_equal_rate(table: GainTable, receiver: int, decode_mask: int) -> float:
    """Largest equal rate supported by one receiver's MAC polytope."""
    p = table.signal_power[receiver]
    sums = _subset_power_sums(p)
    den = table.noise_equiv[receiver] + p.sum() - sums[decode_mask]
    best = np.inf
    sub = decode_mask
    while sub:
        rate = np.log2(1.0 + sums[sub] / den) / bin(sub).count("1")
        best = min(best, rate)
        sub = (sub - 1) & decode_mask
    return float(best)


def max_sym_tin(table: GainTable) -> SymRateReport:
    """Every receiver decodes only its own cell; interference is noise."""
    n = table.num_cells
    p = table.signal_power
    own = np.diag(p)
    interference = p.sum(axis=1) - own
    rates = np.log2(1.0 + own / (table.noise_equiv + interference))
    t = float(rates.min())
    return SymRateReport("TIN", t, _equal_rate_vector(n, t))


def max_sym_sd(table: GainTable) -> SymRateReport:
    """Joint unique decoding of all pilot-sharing signals at every receiver."""
    n = table.num_cells
    full = (1 << n) - 1
    t = min(mac_equal_rate(table, l, full) for l in range(n))
    return SymRateReport("SD", float(t), _equal_rate_vector(n, t))


def max_sym_snd(table: GainTable) -> SymRateReport:
    """Own signal decoded uniquely, interferers non-uniquely: per receiver the
    best MAC polytope over all own-containing decode sets, then the network
    minimum."""
    n = table.num_cells
    t = np.inf
    winning = []
    for l in range(n):
        best_val = -np.inf
        best_set = None
        for cells in enumerate_snd_sets(l, n):
            mask = 0
            for j in cells:
                mask |= 1 << j
            val = mac_equal_rate(table, l, mask)
            if val > best_val:
                best_val = val
                best_set = cells
        winning.append(best_set)
        t = min(t, best_val)
    return SymRateReport("SND", float(t), _equal_rate_vector(n, t), winning_combo=tuple(winning))


def _stacked_unsplit_lp(table: GainTable, polytopes: list[MacPolytope]) -> tuple[float, np.ndarray]:
    rows = np.vstack([p.coeff_rows for p in polytopes])
    rhs = np.concatenate([p.rhs(table) for p in polytopes])
    groups = [[j] for j in range(table.num_cells)]
    return solve_max_min_rate(rows, rhs, groups)


def snd_product_oracle(table: GainTable, max_cells: int = 4) -> tuple[float, tuple]:
    """Brute-force cross-check: max-min LP over every product of per-receiver
    decode-set choices. Exponential; only for small networks."""
    n = table.num_cells
    if n > max_cells:
        raise ValueError(f"product oracle gated to {max_cells} cells, got {n}")
    per_receiver = [
        [build_mac_polytope(l, cells, n) for cells in enumerate_snd_sets(l, n)] for l in range(n)
    ]
    best = -np.inf
    best_combo = None
    for combo in product(*per_receiver):
        val, _ = _stacked_unsplit_lp(table, list(combo))
        if val > best:
            best = val
            best_combo = tuple(p.decode_cells for p in combo)
    return float(best), best_combo


def sd_lp_oracle(table: GainTable) -> float:
    """LP form of the SD maximum symmetric rate (cross-check)."""
    n = table.num_cells
    full = frozenset(range(n))
    val, _ = _stacked_unsplit_lp(table, [build_mac_polytope(l, full, n) for l in range(n)])
    return val


def split_family(n_cells: int, reduced: bool = True) -> list[list[ModifiedMacPolytope]]:
    """Per-receiver layered polytope options: the reduced family (own pair
    plus one or all interferer inner layers) or the full one."""
    enum = enumerate_rs_sub_sets if reduced else enumerate_rs_sets
    return [
        [ModifiedMacPolytope(l, mask, n_cells) for mask in enum(l, n_cells)]
        for l in range(n_cells)
    ]


@dataclass(frozen=True)
class _FamilyBounds:
    """Per-option upper bounds plus the network-valid per-cell cap rows they
    are built on (reused by the pairwise refinement)."""

    caps: list[np.ndarray]
    extra_rows: np.ndarray
    extra_rhs: np.ndarray


def _family_caps(
    family: list[list[ModifiedMacPolytope]],
    rhs_cache: list[list[np.ndarray]],
    n_cells: int,
) -> _FamilyBounds:
    """Admissible per-receiver upper bounds on the network symmetric rate for
    every decode-set option.

    The cap is the LP over that receiver's constraints plus the coupling
    rows, tightened by rows that hold in every combo: each cell's outer
    rate and own rate sum are bounded by the corresponding own constraints
    at its receiver, whichever option it picks (so the maximum over its
    options is valid network-wide). At a zero power split the outer caps
    vanish and the bound matches the equal-rate optimum exactly.
    """
    outer_cap = np.array(
        [
            max(rhs_cache[m][p][poly.own_outer_index] for p, poly in enumerate(opts))
            for m, opts in enumerate(family)
        ]
    )
    pair_cap = np.array(
        [
            max(rhs_cache[m][p][poly.own_pair_index] for p, poly in enumerate(opts))
            for m, opts in enumerate(family)
        ]
    )
    extra_rows = np.zeros((2 * n_cells, 2 * n_cells))
    extra_rhs = np.empty(2 * n_cells)
    for m in range(n_cells):
        extra_rows[2 * m, layer_bit(m, "a")] = 1.0
        extra_rhs[2 * m] = outer_cap[m]
        extra_rows[2 * m + 1, layer_bit(m, "a")] = 1.0
        extra_rows[2 * m + 1, layer_bit(m, "b")] = 1.0
        extra_rhs[2 * m + 1] = pair_cap[m]

    groups = [[layer_bit(j, "a"), layer_bit(j, "b")] for j in range(n_cells)]
    caps = []
    for l, options in enumerate(family):
        per_option = []
        for p, poly in enumerate(options):
            rows = np.vstack([poly.coeff_rows, extra_rows])
            rhs = np.concatenate([rhs_cache[l][p], extra_rhs])
            per_option.append(max_min_rate_value(rows, rhs, groups)[0])
        caps.append(np.array(per_option))
    return _FamilyBounds(caps, extra_rows, extra_rhs)


def _network_arrays(
    family: list[list[ModifiedMacPolytope]],
    rhs_cache: list[list[np.ndarray]],
    combo_idx: tuple[int, ...],
    n_cells: int,
):
    parts = [family[l][combo_idx[l]] for l in range(n_cells)]
    rows = np.vstack([p.coeff_rows for p in parts])
    rhs = np.concatenate([rhs_cache[l][combo_idx[l]] for l in range(n_cells)])
    groups = [[layer_bit(j, "a"), layer_bit(j, "b")] for j in range(n_cells)]
    return rows, rhs, groups


def _solve_network(
    family: list[list[ModifiedMacPolytope]],
    rhs_cache: list[list[np.ndarray]],
    combo_idx: tuple[int, ...],
    n_cells: int,
) -> tuple[float, np.ndarray]:
    return solve_max_min_rate(*_network_arrays(family, rhs_cache, combo_idx, n_cells))


def _network_value(
    family: list[list[ModifiedMacPolytope]],
    rhs_cache: list[list[np.ndarray]],
    combo_idx: tuple[int, ...],
    n_cells: int,
) -> float:
    value, _ = max_min_rate_value(*_network_arrays(family, rhs_cache, combo_idx, n_cells))
    return value


def _network_value_with_support(
    family: list[list[ModifiedMacPolytope]],
    rhs_cache: list[list[np.ndarray]],
    combo_idx: tuple[int, ...],
    n_cells: int,
) -> tuple[float, tuple[tuple[int, int], ...]]:
    """LP value plus the receivers whose constraint rows carry dual weight.

    The dual prices certify an upper bound that survives any change of the
    zero-weight receivers' options, so the support identifies a whole
    product block of combinations that cannot beat this value.
    """
    value, prices = max_min_rate_value(*_network_arrays(family, rhs_cache, combo_idx, n_cells))
    support = []
    offset = 0
    for l in range(n_cells):
        n_rows = len(family[l][combo_idx[l]].constraints)
        if np.any(prices[offset : offset + n_rows] != 0.0):
            support.append((l, combo_idx[l]))
        offset += n_rows
    return value, tuple(support)


def _search_family(
    family: list[list[ModifiedMacPolytope]],
    rhs_cache: list[list[np.ndarray]],
    caps: list[np.ndarray] | None,
    n_cells: int,
    initial_incumbent: float | None,
) -> tuple[float, tuple[int, ...] | None]:
    """Best-bound-first search over option combinations at one power split.

    With caps (pruned mode) combinations are popped in decreasing
    upper-bound order and the search stops once no bound can beat the
    incumbent beyond LP tolerance; without caps every combination is
    solved. Returns (value, option indices); the indices are None when
    nothing beat the initial incumbent.
    """
    best_val = -np.inf if initial_incumbent is None else float(initial_incumbent)
    best_idx: tuple[int, ...] | None = None

    if caps is None:
        for combo_idx in product(*[range(len(opts)) for opts in family]):
            val = _network_value(family, rhs_cache, combo_idx, n_cells)
            if val > best_val:
                best_val, best_idx = val, combo_idx
        return best_val, best_idx

    order = [np.argsort(-caps[l], kind="stable") for l in range(n_cells)]

    def upper_bound(pos: tuple[int, ...]) -> float:
        return min(caps[l][order[l][pos[l]]] for l in range(n_cells))

    start = (0,) * n_cells
    heap = [(-upper_bound(start), start)]
    seen = {start}
    # Dual-support certificates: (pattern, value) proves every combination
    # matching the pattern is worth at most value.
    blocks: list[tuple[tuple[tuple[int, int], ...], float]] = []
    while heap:
        neg_ub, pos = heapq.heappop(heap)
        # Tolerance matches LP optimality: bounds within it cannot improve
        # the incumbent by more than solver noise.
        if -neg_ub <= best_val + PRUNE_TOL:
            break
        combo_idx = tuple(int(order[l][pos[l]]) for l in range(n_cells))
        for l in range(n_cells):
            if pos[l] + 1 < len(family[l]):
                child = pos[:l] + (pos[l] + 1,) + pos[l + 1 :]
                if child not in seen:
                    seen.add(child)
                    heapq.heappush(heap, (-upper_bound(child), child))
        covered = any(
            block_val <= best_val + PRUNE_TOL
            and all(combo_idx[l] == opt for l, opt in pattern)
            for pattern, block_val in blocks
        )
        if covered:
            continue
        val, support = _network_value_with_support(family, rhs_cache, combo_idx, n_cells)
        blocks.append((support, val))
        if val > best_val:
            best_val, best_idx = val, combo_idx
    return best_val, best_idx


def max_sym_over_family(
    split: float,
    family: list[list[ModifiedMacPolytope]],
    table: GainTable,
    prune: bool = True,
    initial_incumbent: float | None = None,
) -> tuple[float, tuple[int, ...] | None, np.ndarray | None]:
    """Best symmetric rate over the union of network polytopes at one power
    split: max over per-receiver option combinations of the stacked LP.

    Returns (value, winning decode masks, winning split-rate vector).
    Pruning never changes the value: combinations are visited best-bound
    first and skipped only when an admissible upper bound shows they cannot
    beat the incumbent (beyond LP tolerance). With ``initial_incumbent``
    the search only resolves values above it; if nothing exceeds it the
    returned value is a lower bound and the masks/vector are None.
    """
    n_cells = table.num_cells
    ltable = LayeredGainTable(table, split)
    rhs_cache = [[poly.rhs(ltable) for poly in options] for options in family]
    caps = _family_caps(family, rhs_cache, n_cells).caps if prune else None
    best_val, best_idx = _search_family(family, rhs_cache, caps, n_cells, initial_incumbent)
    if best_idx is None:
        return best_val, None, None
    # The search ranks combinations by value alone; recover the achieving
    # rate vector with one primal solve.
    best_val, best_x = _solve_network(family, rhs_cache, best_idx, n_cells)
    winning_masks = tuple(family[l][best_idx[l]].decode_mask for l in range(n_cells))
    return best_val, winning_masks, best_x


def split_grid(step: float = 0.02) -> np.ndarray:
    """Uniform grid on [0, 1] including both endpoints."""
    if not 0 < step <= 1:
        raise ValueError("step must be in (0, 1]")
    n = int(round(1.0 / step))
    return np.linspace(0.0, 1.0, n + 1)


def max_sym_rs(
    table: GainTable,
    grid: np.ndarray | None = None,
    snd_report: SymRateReport | None = None,
    reduced: bool = True,
    prune: bool = True,
) -> SymRateReport:
    """Achievable symmetric rate of the layered scheme: the better of the SND
    rate (always inside the layered region) and the best line-search point
    over the polytope family.

    winning_split records the best grid point of the family search even when
    the SND rate wins the max; that is the value averaged for the
    precomputed-split mode.
    """
    n_cells = table.num_cells
    if grid is None:
        grid = split_grid()
    if snd_report is None:
        snd_report = max_sym_snd(table)
    family = split_family(n_cells, reduced=reduced)
    grid = [float(s) for s in np.asarray(grid, dtype=float)]

    best_f = -np.inf
    best_split = None
    best_masks = None
    best_x = None
    if not prune:
        for split in grid:
            val, masks, x = max_sym_over_family(split, family, table, prune=False)
            if val > best_f:
                best_f, best_split, best_masks, best_x = val, split, masks, x
    else:
        # Three-stage line search. The incumbent starts just under the
        # non-split rate (anything below it loses to the SND fallback in
        # the final max), a warm pass solves one best-bound combination per
        # surviving grid point, and only points whose bound still exceeds
        # the incumbent get the full best-bound-first search.
        floor = snd_report.sym_rate - 1e-6
        best_combo = None
        points = []
        for split in grid:
            ltable = LayeredGainTable(table, split)
            rhs_cache = [[poly.rhs(ltable) for poly in options] for options in family]
            caps = _family_caps(family, rhs_cache, n_cells).caps
            point_bound = min(c.max() for c in caps)
            if point_bound > max(best_f, floor) + PRUNE_TOL:
                combo = tuple(int(np.argmax(caps[l])) for l in range(n_cells))
                warm = _network_value(family, rhs_cache, combo, n_cells)
                if warm > best_f:
                    best_f, best_split, best_combo = warm, split, (rhs_cache, combo)
            points.append((point_bound, split, rhs_cache, caps))
        points.sort(key=lambda item: (-item[0], item[1]))
        for point_bound, split, rhs_cache, caps in points:
            incumbent = max(best_f, floor)
            if point_bound <= incumbent + PRUNE_TOL:
                break
            val, idx = _search_family(family, rhs_cache, caps, n_cells, incumbent)
            if idx is not None and val > best_f:
                best_f, best_split, best_combo = val, split, (rhs_cache, idx)
        if best_combo is not None:
            rhs_cache, idx = best_combo
            best_f, best_x = _solve_network(family, rhs_cache, idx, n_cells)
            best_masks = tuple(family[l][idx[l]].decode_mask for l in range(n_cells))
        if best_split is None:
            # Splitting never beat the non-split rate; record the grid point
            # with the largest bound as the representative split.
            best_split = points[0][1]

    if best_masks is not None and best_f >= snd_report.sym_rate:
        return SymRateReport("RS", best_f, best_x, winning_combo=best_masks, winning_split=best_split)
    return SymRateReport(
        "RS",
        snd_report.sym_rate,
        snd_report.rate_vector,
        winning_combo=snd_report.winning_combo,
        winning_split=best_split,
    )


def max_sym_rs_fixed_split(
    table: GainTable,
    split: float,
    snd_report: SymRateReport | None = None,
    reduced: bool = True,
    prune: bool = True,
) -> SymRateReport:
    """Layered-scheme rate with a precomputed power split (single grid point)."""
    return max_sym_rs(
        table,
        grid=np.array([split]),
        snd_report=snd_report,
        reduced=reduced,
        prune=prune,
    )


def average_split(splits) -> float:
    """Mean of recorded power splits, clamped to [0, 1]."""
    arr = np.asarray(list(splits), dtype=float)
    if arr.size == 0:
        raise ValueError("no training splits supplied")
    return float(np.clip(arr.mean(), 0.0, 1.0))
