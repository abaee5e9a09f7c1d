"""Decode-set families and rate-region polytopes.

Unsplit regions (single codeword per cell) are plain MAC polytopes over the
L per-cell rates. Layered regions live over the 2L split rates; their
constraint lists are pruned by the code construction: a constraint subset
must involve at least one of the receiver's own layers, and whenever both
layers of some cell are decoded jointly, subsets holding that cell's inner
layer without its outer layer are redundant and dropped.

Layer sets are bitmasks (outer layer of cell j at bit 2j, inner at 2j+1);
cell sets are bitmasks over cells. Constraints are stored symbolically and
bound to numbers only when a gain table (and power split) is supplied, so
one enumeration serves a whole line search.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np

from .bounds import GainTable, LayeredGainTable, bound_value, layer_bit, layered_bound_value


def pair_mask(cell: int) -> int:
    """Both layers of one cell."""
    return (1 << layer_bit(cell, "a")) | (1 << layer_bit(cell, "b"))


def layers_of_mask(mask: int, n_cells: int) -> frozenset[tuple[int, str]]:
    out = []
    for j in range(n_cells):
        if (mask >> layer_bit(j, "a")) & 1:
            out.append((j, "a"))
        if (mask >> layer_bit(j, "b")) & 1:
            out.append((j, "b"))
    return frozenset(out)


def mask_of_layers(layers) -> int:
    mask = 0
    for cell, layer in layers:
        mask |= 1 << layer_bit(cell, layer)
    return mask


def _format_layer_mask(mask: int, n_cells: int) -> str:
    names = [f"{cell + 1}{layer}" for cell, layer in sorted(layers_of_mask(mask, n_cells))]
    return "{" + ",".join(names) + "}"


def _nonempty_submasks(mask: int) -> list[int]:
    subs = []
    sub = mask
    while sub:
        subs.append(sub)
        sub = (sub - 1) & mask
    subs.reverse()
    return subs


def enumerate_snd_sets(receiver: int, n_cells: int) -> list[frozenset[int]]:
    """All decode sets containing the receiver's own cell (2^(L-1) of them)."""
    if not 0 <= receiver < n_cells:
        raise ValueError(f"receiver {receiver} out of range for {n_cells} cells")
    others = [j for j in range(n_cells) if j != receiver]
    sets = []
    for bits in range(1 << len(others)):
        cells = {receiver}
        for pos, j in enumerate(others):
            if (bits >> pos) & 1:
                cells.add(j)
        sets.append(frozenset(cells))
    return sets


@dataclass(frozen=True)
class MacPolytope:
    """Joint-decoding region of one receiver over the L unsplit rates.

    One constraint per nonempty subset of the decode set; rates of cells
    outside the decode set are unconstrained (treated as noise).
    """

    receiver: int
    decode_cells: frozenset[int]
    num_cells: int

    @cached_property
    def subset_masks(self) -> tuple[int, ...]:
        mask = 0
        for j in self.decode_cells:
            mask |= 1 << j
        return tuple(_nonempty_submasks(mask))

    @cached_property
    def coeff_rows(self) -> np.ndarray:
        rows = np.zeros((len(self.subset_masks), self.num_cells))
        for i, sub in enumerate(self.subset_masks):
            for j in range(self.num_cells):
                if (sub >> j) & 1:
                    rows[i, j] = 1.0
        return rows

    def rhs(self, table: GainTable) -> np.ndarray:
        return np.array(
            [bound_value(table, self.receiver, self.decode_cells, sub) for sub in self.subset_masks]
        )


def build_mac_polytope(receiver: int, decode_cells, n_cells: int) -> MacPolytope:
    cells = frozenset(int(c) for c in decode_cells)
    if receiver not in cells:
        raise ValueError("decode set must contain the receiver's own cell")
    return MacPolytope(receiver, cells, n_cells)


def enumerate_rs_sets(receiver: int, n_cells: int) -> list[int]:
    """Layered decode sets at one receiver: own pair crossed with, per other
    cell, nothing, the inner layer, or both layers (3^(L-1) sets)."""
    own = pair_mask(receiver)
    others = [j for j in range(n_cells) if j != receiver]
    options = [(0, 1 << layer_bit(j, "b"), pair_mask(j)) for j in others]
    out = []
    for combo in product(*options):
        mask = own
        for part in combo:
            mask |= part
        out.append(mask)
    return out


def enumerate_rs_sub_sets(receiver: int, n_cells: int) -> list[int]:
    """Reduced layered family: own pair plus a single interferer inner layer
    (each in turn), plus own pair with every interferer inner layer.
    Duplicates (two cells) are removed."""
    if n_cells < 2:
        raise ValueError("the reduced family needs at least two cells")
    own = pair_mask(receiver)
    others = [j for j in range(n_cells) if j != receiver]
    singles = [own | (1 << layer_bit(j, "b")) for j in others]
    all_b = own
    for j in others:
        all_b |= 1 << layer_bit(j, "b")
    return list(dict.fromkeys(singles + [all_b]))


@dataclass(frozen=True)
class LayeredConstraint:
    receiver: int
    decoded: int  # layer mask, the rates it bounds
    conditioned: int  # layer mask removed from the denominator

    def coeffs(self, n_cells: int) -> np.ndarray:
        return np.array([(self.decoded >> b) & 1 for b in range(2 * n_cells)], dtype=float)


@dataclass(frozen=True)
class ModifiedMacPolytope:
    """Layered joint-decoding region of one receiver with redundant
    constraints removed."""

    receiver: int
    decode_mask: int
    num_cells: int

    @cached_property
    def constraints(self) -> tuple[LayeredConstraint, ...]:
        own = pair_mask(self.receiver)
        if self.decode_mask & own != own:
            raise ValueError("decode set must contain both own layers")
        paired = [
            j
            for j in range(self.num_cells)
            if self.decode_mask & pair_mask(j) == pair_mask(j)
        ]
        kept = []
        for sub in _nonempty_submasks(self.decode_mask):
            if not sub & own:
                continue
            redundant = any(
                (sub >> layer_bit(j, "b")) & 1 and not (sub >> layer_bit(j, "a")) & 1
                for j in paired
            )
            if redundant:
                continue
            kept.append(LayeredConstraint(self.receiver, sub, self.decode_mask & ~sub))
        return tuple(kept)

    @cached_property
    def _selectors(self) -> tuple[np.ndarray, np.ndarray]:
        n_layers = 2 * self.num_cells
        dec = np.zeros((len(self.constraints), n_layers))
        noise = np.zeros((len(self.constraints), n_layers))
        for i, c in enumerate(self.constraints):
            covered = c.decoded | c.conditioned
            for b in range(n_layers):
                dec[i, b] = (c.decoded >> b) & 1
                noise[i, b] = 1 - ((covered >> b) & 1)
        return dec, noise

    @property
    def coeff_rows(self) -> np.ndarray:
        """(n_constraints, 2L) split-rate coefficients, 1 on decoded layers."""
        return self._selectors[0]

    @cached_property
    def own_outer_index(self) -> int:
        """Index of the constraint bounding the receiver's outer rate alone."""
        target = 1 << layer_bit(self.receiver, "a")
        return next(i for i, c in enumerate(self.constraints) if c.decoded == target)

    @cached_property
    def own_pair_index(self) -> int:
        """Index of the constraint bounding the receiver's own rate sum alone."""
        target = pair_mask(self.receiver)
        return next(i for i, c in enumerate(self.constraints) if c.decoded == target)

    def rhs(self, ltable: LayeredGainTable) -> np.ndarray:
        """Bound vector at a given power split; matches layered_bound_value
        constraint by constraint."""
        dec, noise = self._selectors
        powers = ltable.layer_powers()[self.receiver]
        base = ltable.table.noise_equiv[self.receiver]
        return np.log2(1.0 + (dec @ powers) / (base + noise @ powers))


def build_modified_mac_polytope(receiver: int, decode_mask: int, n_cells: int) -> ModifiedMacPolytope:
    poly = ModifiedMacPolytope(receiver, decode_mask, n_cells)
    _ = poly.constraints  # validate eagerly
    return poly


@dataclass(frozen=True)
class NetworkPolytope:
    """Receiver-major stack of one layered polytope per receiver."""

    parts: tuple[ModifiedMacPolytope, ...]

    @property
    def combo(self) -> tuple[int, ...]:
        return tuple(p.decode_mask for p in self.parts)

    @property
    def num_cells(self) -> int:
        return self.parts[0].num_cells

    @cached_property
    def constraints(self) -> tuple[LayeredConstraint, ...]:
        out = []
        for p in self.parts:
            out.extend(p.constraints)
        return tuple(out)

    @cached_property
    def coeff_rows(self) -> np.ndarray:
        n_layers = 2 * self.num_cells
        rows = np.zeros((len(self.constraints), n_layers))
        for i, c in enumerate(self.constraints):
            for b in range(n_layers):
                rows[i, b] = (c.decoded >> b) & 1
        return rows

    def rhs(self, ltable: LayeredGainTable) -> np.ndarray:
        return np.concatenate([p.rhs(ltable) for p in self.parts])


def assemble_network_polytope(per_receiver: list[ModifiedMacPolytope]) -> NetworkPolytope:
    receivers = [p.receiver for p in per_receiver]
    if receivers != sorted(set(receivers)) or len(receivers) != per_receiver[0].num_cells:
        raise ValueError("need exactly one polytope per receiver, in receiver order")
    return NetworkPolytope(tuple(per_receiver))


def dump_constraints(
    poly: ModifiedMacPolytope, ltable: LayeredGainTable | None = None
) -> str:
    """Golden-file text form: one constraint per line,
    ``recv=<l> D={...} C={...} coeffs=[...]`` (cells printed 1-based),
    with the numeric bound appended when a gain table is supplied."""
    n = poly.num_cells
    lines = []
    rhs = poly.rhs(ltable) if ltable is not None else None
    for i, c in enumerate(poly.constraints):
        coeffs = ",".join(str(int(v)) for v in c.coeffs(n))
        line = (
            f"recv={poly.receiver + 1} "
            f"D={_format_layer_mask(c.decoded, n)} "
            f"C={_format_layer_mask(c.conditioned, n)} "
            f"coeffs=[{coeffs}]"
        )
        if rhs is not None:
            line += f" rhs={rhs[i]:.12g}"
        lines.append(line)
    return "\n".join(lines)
