"""Cell layout, user placement and large-scale fading.

Distances are in meters, powers in linear scale unless a name says dB.
The canonical seven-cell layout is a hexagonal cluster with toroidal
wrap-around; other cell counts fall back to a ring layout (documented in
:func:`build_hex_layout`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class HexLayout:
    """Base-station positions plus the translation vectors of the torus."""

    num_cells: int
    cell_radius: float
    bs_positions: np.ndarray  # (L, 2)
    wrap_offsets: np.ndarray  # (W, 2), always contains the zero vector


@dataclass(frozen=True)
class UserDrop:
    positions: np.ndarray  # (L, K, 2)
    user_height: float = 1.5
    bs_height: float = 25.0


@dataclass(frozen=True)
class ShadowingSpec:
    sigma_shadow_db: float = 0.0
    enabled: bool = False


@dataclass(frozen=True)
class FadingTensor:
    """Linear-scale large-scale gains, indexed [bs j, user k, cell l]."""

    beta: np.ndarray  # (L, K, L), strictly positive


def build_hex_layout(num_cells: int, cell_radius: float) -> HexLayout:
    """Build the cell layout.

    The first base station sits at the origin; the remaining ones sit on a
    ring of radius sqrt(3)*cell_radius, equally spaced starting at 30 deg.
    For seven cells this is exactly the hexagonal cluster, and the seven
    standard torus translation vectors (length sqrt(21)*cell_radius) are
    attached so distances wrap around. Other cell counts keep the ring but
    use only the zero offset (no wrap).
    """
    if num_cells < 1:
        raise ValueError(f"num_cells must be >= 1, got {num_cells}")
    if cell_radius <= 0:
        raise ValueError(f"cell_radius must be positive, got {cell_radius}")

    spacing = SQRT3 * cell_radius
    positions = [np.zeros(2)]
    if num_cells > 1:
        n_ring = num_cells - 1
        for i in range(n_ring):
            ang = math.radians(30.0) + 2.0 * math.pi * i / max(n_ring, 1)
            positions.append(spacing * np.array([math.cos(ang), math.sin(ang)]))
    bs_positions = np.array(positions)

    offsets = [np.zeros(2)]
    if num_cells == 7:
        # Cluster lattice generators: u1 = 2a + b, u2 = -a + 3b with a, b the
        # neighbor steps at 30 and 90 degrees. |u1| = |u2| = sqrt(21) R.
        a = spacing * np.array([math.cos(math.radians(30.0)), math.sin(math.radians(30.0))])
        b = spacing * np.array([0.0, 1.0])
        u1 = 2 * a + b
        u2 = -a + 3 * b
        for v in (u1, u2, u1 - u2):
            offsets.append(v)
            offsets.append(-v)
    wrap_offsets = np.array(offsets)

    return HexLayout(num_cells, float(cell_radius), bs_positions, wrap_offsets)


def hexagon_contains(cell_radius: float, xy: np.ndarray) -> np.ndarray:
    """Membership test for the hexagon centered at the origin.

    Vertices lie at angles 0, 60, ..., 300 degrees at distance cell_radius,
    so flat sides face the six neighbor directions.
    """
    x = np.asarray(xy)[..., 0]
    y = np.asarray(xy)[..., 1]
    m = SQRT3 * cell_radius
    return (np.abs(y) <= m / 2) & (np.abs(SQRT3 * x + y) <= m) & (np.abs(SQRT3 * x - y) <= m)


def wrap_displacement(layout: HexLayout, bs_index: int, points: np.ndarray) -> np.ndarray:
    """Horizontal displacement point - nearest torus copy of the BS.

    points may be (..., 2); returns the same leading shape plus (2,).
    """
    if not 0 <= bs_index < layout.num_cells:
        raise IndexError(f"bs_index {bs_index} out of range")
    pts = np.asarray(points, dtype=float)
    copies = layout.bs_positions[bs_index] + layout.wrap_offsets  # (W, 2)
    diff = pts[..., None, :] - copies  # (..., W, 2)
    d2 = np.sum(diff * diff, axis=-1)
    best = np.argmin(d2, axis=-1)
    return np.take_along_axis(diff, best[..., None, None], axis=-2)[..., 0, :]


def wrap_distance_3d(
    layout: HexLayout,
    bs_index: int,
    point: np.ndarray,
    user_height: float,
    bs_height: float,
) -> np.ndarray:
    """Minimal 3D distance between a point and the torus copies of a BS."""
    disp = wrap_displacement(layout, bs_index, point)
    horiz2 = np.sum(disp * disp, axis=-1)
    dz = bs_height - user_height
    return np.sqrt(horiz2 + dz * dz)


def place_users(
    layout: HexLayout,
    users_per_cell: int,
    min_bs_distance: float,
    rng: np.random.Generator,
    user_height: float = 1.5,
    bs_height: float = 25.0,
) -> UserDrop:
    """Drop users uniformly in each cell's hexagon, at least min_bs_distance
    from their own BS (rejection sampling; deterministic under a fixed rng).
    """
    if min_bs_distance >= layout.cell_radius:
        raise ValueError("min_bs_distance must be smaller than the cell radius")
    radius = layout.cell_radius
    half_h = SQRT3 * radius / 2
    positions = np.empty((layout.num_cells, users_per_cell, 2))
    for cell in range(layout.num_cells):
        center = layout.bs_positions[cell]
        count = 0
        while count < users_per_cell:
            local = rng.uniform([-radius, -half_h], [radius, half_h])
            if not hexagon_contains(radius, local):
                continue
            if np.hypot(local[0], local[1]) < min_bs_distance:
                continue
            positions[cell, count] = center + local
            count += 1
    return UserDrop(positions, user_height=user_height, bs_height=bs_height)


def path_loss_db(d3d: np.ndarray, fc_ghz: float, user_height: float) -> np.ndarray:
    """Distance-based 3D path loss in dB (negative values; fc in GHz)."""
    d = np.asarray(d3d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("3D distance must be positive")
    if fc_ghz <= 0:
        raise ValueError("carrier frequency must be positive")
    return (
        -13.54
        - 39.08 * np.log10(d)
        - 20.0 * np.log10(fc_ghz)
        + 0.6 * (user_height - 1.5)
    )


def link_distances_3d(layout: HexLayout, drop: UserDrop) -> np.ndarray:
    """Wrap-around 3D distances, indexed (bs j, user k, cell l)."""
    L = layout.num_cells
    out = np.empty((L,) + drop.positions.shape[:-1])  # (j, cell, user)
    for j in range(L):
        out[j] = wrap_distance_3d(layout, j, drop.positions, drop.user_height, drop.bs_height)
    return np.swapaxes(out, 1, 2)


def boresight_angles(layout: HexLayout, drop: UserDrop) -> np.ndarray:
    """Angle of each user seen from each BS, radians, indexed (j, k, l).

    All arrays share a common boresight along the global x axis; the angle
    uses the wrap copy of the BS that minimizes the horizontal distance.
    """
    L = layout.num_cells
    out = np.empty((L,) + drop.positions.shape[:-1])
    for j in range(L):
        disp = wrap_displacement(layout, j, drop.positions)
        out[j] = np.arctan2(disp[..., 1], disp[..., 0])
    return np.swapaxes(out, 1, 2)


def large_scale_fading(
    layout: HexLayout,
    drop: UserDrop,
    fc_ghz: float,
    shadow: ShadowingSpec,
    rng: np.random.Generator | None = None,
    noise_fold_db: float = 0.0,
) -> FadingTensor:
    """Large-scale gain tensor from path loss plus optional log-normal shadowing.

    Shadowing draws are i.i.d. per (j, k, l) link in dB. ``noise_fold_db``
    is subtracted in dB before conversion; leave it at 0 when the downlink
    and pilot SNRs are already noise-normalized (the harness convention),
    or pass the noise floor in dBW to fold it here instead. Folding in both
    places would count the noise floor twice.
    """
    d3d = link_distances_3d(layout, drop)
    gain_db = path_loss_db(d3d, fc_ghz, drop.user_height)
    if shadow.enabled and shadow.sigma_shadow_db > 0:
        if rng is None:
            raise ValueError("shadowing enabled but no rng supplied")
        gain_db = gain_db + rng.normal(0.0, shadow.sigma_shadow_db, size=gain_db.shape)
    return FadingTensor(10.0 ** ((gain_db - noise_fold_db) / 10.0))
