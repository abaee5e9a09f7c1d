"""Config-driven Monte Carlo sweeps over antenna counts and channel settings.

One realization drops users, builds the gain tensor, forms a gain table per
evaluated pilot group and runs every requested scheme on it. Realizations
are seeded individually from (seed, index) so runs are reproducible and the
same user drops pair up across sweep values (common random numbers for the
trend studies). Results aggregate to CSV rows, one per (scheme, sweep
point, antenna count).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, fields

import numpy as np

from .bounds import PrecoderSpec, gain_table_closed_zf, gain_table_mc
from .channel import CorrelationSpec
from .geometry import ShadowingSpec, boresight_angles, build_hex_layout, large_scale_fading, place_users
from .symrate import (
    average_split,
    max_sym_rs,
    max_sym_rs_fixed_split,
    max_sym_sd,
    max_sym_snd,
    max_sym_tin,
    split_grid,
)

SCHEMES = ("TIN", "SD", "SND", "RS")
CSV_COLUMNS = (
    "scheme",
    "M",
    "kappa",
    "K",
    "sigma_shadow",
    "mean_sym_se",
    "stderr",
    "n_realizations",
    "mode",
    "avg_mu",
)

# Training realizations for the precomputed-split tables draw from a seed
# range disjoint from evaluation realizations.
_TRAIN_INDEX_OFFSET = 10_000_000


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    num_cells: int = 7
    users_per_cell: int = 15
    cell_radius_m: float = 400.0
    min_bs_distance_m: float = 35.0
    bs_power_watts: float = 40.0
    power_is_per_user: bool = False
    noise_dbm: float = -101.0
    fc_ghz: float = 3.5
    bs_height_m: float = 25.0
    user_height_m: float = 1.5
    correlation: str = "exponential"
    kappa: float = 0.4
    sigma_shadow_db: float = 0.0
    uplink_power_watts: float = 0.2
    pilot_snr: float | None = None
    precoder: str = "zf"
    rzf_delta: float | None = None
    m_values: list[int] = field(default_factory=lambda: [32, 64, 128, 256, 512, 1024])
    kappa_values: list[float] | None = None
    k_values: list[int] | None = None
    sigma_values: list[float] | None = None
    realizations: int = 30
    mu_step: float = 0.02
    schemes: list[str] = field(default_factory=lambda: list(SCHEMES))
    seed: int = 1
    mode: str = "avg-mu"  # "avg-mu" | "optimize-mu"
    mc_channel_samples: int = 500
    ic_mode: str = "representative"  # "representative" | "all"
    avg_mu_training_realizations: int = 10

    def validate(self) -> None:
        positive = (
            "num_cells",
            "users_per_cell",
            "cell_radius_m",
            "bs_power_watts",
            "fc_ghz",
            "bs_height_m",
            "user_height_m",
            "uplink_power_watts",
            "mu_step",
            "mc_channel_samples",
        )
        for name in positive:
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name}: must be positive, got {getattr(self, name)}")
        if self.min_bs_distance_m < 0 or self.min_bs_distance_m >= self.cell_radius_m:
            raise ConfigError("min_bs_distance_m: must be in [0, cell_radius_m)")
        if self.correlation not in ("exponential", "uncorrelated"):
            raise ConfigError(f"correlation: unknown kind {self.correlation!r}")
        if not 0.0 <= self.kappa <= 1.0:
            raise ConfigError(f"kappa: must be in [0, 1], got {self.kappa}")
        if self.sigma_shadow_db < 0:
            raise ConfigError("sigma_shadow_db: must be nonnegative")
        if self.precoder not in ("zf", "rzf"):
            raise ConfigError(f"precoder: unknown kind {self.precoder!r}")
        if self.mode not in ("avg-mu", "optimize-mu"):
            raise ConfigError(f"mode: unknown mode {self.mode!r}")
        if self.ic_mode not in ("representative", "all"):
            raise ConfigError(f"ic_mode: unknown mode {self.ic_mode!r}")
        if not self.schemes:
            raise ConfigError("schemes: must not be empty")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ConfigError(f"schemes: unknown scheme {s!r}")
        if self.realizations < 0:
            raise ConfigError("realizations: must be nonnegative")
        if not self.m_values:
            raise ConfigError("m_values: must not be empty")
        for m in self.m_values:
            for k in self.k_values or [self.users_per_cell]:
                if m <= k:
                    raise ConfigError(f"m_values: zero-forcing needs M > K, got M={m}, K={k}")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, path: str) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class ResultRow:
    scheme: str
    m_antennas: int
    kappa: float
    users_per_cell: int
    sigma_shadow_db: float
    mean_sym_se: float
    stderr: float
    n_realizations: int
    mode: str
    avg_mu: float | None


def noise_power_watts(noise_dbm: float) -> float:
    return 10.0 ** ((noise_dbm - 30.0) / 10.0)


def rho_from_power(
    bs_power_watts: float, users_per_cell: int, noise_dbm: float, per_user: bool = False
) -> float:
    """Per-user downlink transmit SNR: the per-user share of the BS power
    (or the full power when it is already per-user) over the noise floor."""
    if bs_power_watts <= 0 or users_per_cell <= 0:
        raise ValueError("power and user count must be positive")
    per_user_watts = bs_power_watts if per_user else bs_power_watts / users_per_cell
    return per_user_watts / noise_power_watts(noise_dbm)


def default_pilot_snr(cfg: ExperimentConfig, users_per_cell: int) -> float:
    """Pilot SNR: explicit config value, else uplink power times pilot length
    over the noise floor."""
    if cfg.pilot_snr is not None:
        return cfg.pilot_snr
    return users_per_cell * cfg.uplink_power_watts / noise_power_watts(cfg.noise_dbm)


def figure_preset(name: str) -> ExperimentConfig:
    """Desk-scale sweep configurations for the standard result figures."""
    m_practical = [32, 64, 128, 256, 512, 1024]
    presets = {
        "fig2a": ExperimentConfig(correlation="exponential", kappa=0.4, m_values=m_practical),
        "fig2b": ExperimentConfig(
            correlation="exponential", kappa=0.4, precoder="rzf", m_values=m_practical,
            schemes=["SND", "RS"],
        ),
        "fig3a": ExperimentConfig(
            correlation="exponential", m_values=[256],
            kappa_values=[0.0, 0.2, 0.4, 0.6, 0.8], schemes=["TIN", "SND", "RS"],
        ),
        "fig3b": ExperimentConfig(
            correlation="exponential", kappa=0.4, m_values=[256],
            k_values=[2, 5, 8, 11, 15], schemes=["TIN", "SND", "RS"],
        ),
        "fig4": ExperimentConfig(
            correlation="exponential", kappa=0.4, m_values=[256],
            sigma_values=[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], schemes=["TIN", "SND", "RS"],
        ),
        "fig5a": ExperimentConfig(correlation="uncorrelated", m_values=m_practical),
        "fig5b": ExperimentConfig(
            correlation="uncorrelated", m_values=[10**e for e in range(3, 10)],
        ),
    }
    if name not in presets:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(presets)}")
    return presets[name]


@dataclass(frozen=True)
class _SweepPoint:
    kappa: float
    users_per_cell: int
    sigma_shadow_db: float


def _sweep_points(cfg: ExperimentConfig) -> list[_SweepPoint]:
    kappas = cfg.kappa_values if cfg.kappa_values is not None else [cfg.kappa]
    user_counts = cfg.k_values if cfg.k_values is not None else [cfg.users_per_cell]
    sigmas = cfg.sigma_values if cfg.sigma_values is not None else [cfg.sigma_shadow_db]
    return [
        _SweepPoint(float(kap), int(users), float(sig))
        for kap in kappas
        for users in user_counts
        for sig in sigmas
    ]


def _closed_form_applicable(cfg: ExperimentConfig, point: _SweepPoint) -> bool:
    # A kappa sweep that touches 0 stays on the Monte Carlo path so every
    # point of the trend uses the same estimator.
    return cfg.correlation == "uncorrelated" and cfg.precoder == "zf"


def _realization_beta(cfg: ExperimentConfig, point: _SweepPoint, real_index: int):
    """Geometry and large-scale gains for one realization; seeds pair up
    across sweep points that share the user count."""
    geo_rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, real_index, 0)))
    shadow_rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, real_index, 1)))
    layout = build_hex_layout(cfg.num_cells, cfg.cell_radius_m)
    drop = place_users(
        layout,
        point.users_per_cell,
        cfg.min_bs_distance_m,
        geo_rng,
        user_height=cfg.user_height_m,
        bs_height=cfg.bs_height_m,
    )
    shadow = ShadowingSpec(point.sigma_shadow_db, enabled=point.sigma_shadow_db > 0)
    beta = large_scale_fading(layout, drop, cfg.fc_ghz, shadow, shadow_rng).beta
    angles = boresight_angles(layout, drop)
    return beta, angles


def _tables_for_realization(
    cfg: ExperimentConfig,
    point: _SweepPoint,
    m_antennas: int,
    m_index: int,
    real_index: int,
    beta: np.ndarray,
    angles: np.ndarray,
) -> list:
    rho_dl = rho_from_power(
        cfg.bs_power_watts, point.users_per_cell, cfg.noise_dbm, cfg.power_is_per_user
    )
    rho_p = default_pilot_snr(cfg, point.users_per_cell)
    if cfg.ic_mode == "all":
        ics = list(range(point.users_per_cell))
    else:
        ics = [real_index % point.users_per_cell]
    tables = []
    for ic in ics:
        if _closed_form_applicable(cfg, point):
            tables.append(
                gain_table_closed_zf(beta, rho_p, rho_dl, m_antennas, point.users_per_cell, ic)
            )
        else:
            mc_rng = np.random.default_rng(
                np.random.SeedSequence((cfg.seed, real_index, 2, m_index, ic))
            )
            tables.append(
                gain_table_mc(
                    beta,
                    angles,
                    CorrelationSpec("exponential" if point.kappa > 0 else "uncorrelated", point.kappa),
                    PrecoderSpec(cfg.precoder, cfg.rzf_delta),
                    rho_p,
                    rho_dl,
                    m_antennas,
                    ic,
                    cfg.mc_channel_samples,
                    mc_rng,
                )
            )
    return tables


def _scheme_values(cfg: ExperimentConfig, tables: list, avg_split: float | None) -> dict[str, float]:
    """Per-scheme symmetric SE averaged over the evaluated pilot groups."""
    values = {s: 0.0 for s in cfg.schemes}
    grid = split_grid(cfg.mu_step)
    need_snd = "SND" in cfg.schemes or "RS" in cfg.schemes
    for table in tables:
        snd = max_sym_snd(table) if need_snd else None
        for scheme in cfg.schemes:
            if scheme == "TIN":
                rep = max_sym_tin(table)
            elif scheme == "SD":
                rep = max_sym_sd(table)
            elif scheme == "SND":
                rep = snd
            elif cfg.mode == "avg-mu" and avg_split is not None:
                rep = max_sym_rs_fixed_split(table, avg_split, snd_report=snd)
            else:
                rep = max_sym_rs(table, grid=grid, snd_report=snd)
            values[scheme] += rep.sym_rate / len(tables)
    return values


def _train_avg_split(
    cfg: ExperimentConfig, point: _SweepPoint, m_antennas: int, m_index: int
) -> float:
    splits = []
    for r in range(cfg.avg_mu_training_realizations):
        idx = _TRAIN_INDEX_OFFSET + r
        beta, angles = _realization_beta(cfg, point, idx)
        tables = _tables_for_realization(cfg, point, m_antennas, m_index, idx, beta, angles)
        rep = max_sym_rs(tables[0], grid=split_grid(cfg.mu_step))
        splits.append(rep.winning_split)
    return average_split(splits)


def run_sweep(cfg: ExperimentConfig, progress=None) -> list[ResultRow]:
    """Run every sweep point and antenna count; returns aggregated rows.

    ``progress`` is an optional callable fed one line per completed
    (point, M) block.
    """
    cfg.validate()
    rows: list[ResultRow] = []
    for point in _sweep_points(cfg):
        for m_index, m_antennas in enumerate(cfg.m_values):
            avg_split = None
            if "RS" in cfg.schemes and cfg.mode == "avg-mu" and cfg.realizations > 0:
                avg_split = _train_avg_split(cfg, point, m_antennas, m_index)
            per_scheme: dict[str, list[float]] = {s: [] for s in cfg.schemes}
            for r in range(cfg.realizations):
                beta, angles = _realization_beta(cfg, point, r)
                tables = _tables_for_realization(cfg, point, m_antennas, m_index, r, beta, angles)
                values = _scheme_values(cfg, tables, avg_split)
                for s, v in values.items():
                    per_scheme[s].append(v)
            for scheme in cfg.schemes:
                vals = np.array(per_scheme[scheme])
                if vals.size == 0:
                    continue
                stderr = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
                rows.append(
                    ResultRow(
                        scheme=scheme,
                        m_antennas=m_antennas,
                        kappa=point.kappa,
                        users_per_cell=point.users_per_cell,
                        sigma_shadow_db=point.sigma_shadow_db,
                        mean_sym_se=float(vals.mean()),
                        stderr=stderr,
                        n_realizations=int(vals.size),
                        mode=cfg.mode,
                        avg_mu=avg_split if scheme == "RS" and cfg.mode == "avg-mu" else None,
                    )
                )
            if progress is not None:
                progress(
                    f"point kappa={point.kappa} K={point.users_per_cell} "
                    f"sigma={point.sigma_shadow_db} M={m_antennas}: done"
                )
    return rows


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(rows: list[ResultRow]) -> str:
    """Serialize rows; the header is always present."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row.scheme,
                _format_value(row.m_antennas),
                _format_value(row.kappa),
                _format_value(row.users_per_cell),
                _format_value(row.sigma_shadow_db),
                _format_value(row.mean_sym_se),
                _format_value(row.stderr),
                _format_value(row.n_realizations),
                row.mode,
                _format_value(row.avg_mu),
            ]
        )
    return buf.getvalue()


def write_csv(rows: list[ResultRow], path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(emit_csv(rows))


def parse_csv(text: str) -> list[ResultRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header: {header}")
    rows = []
    for rec in reader:
        rows.append(
            ResultRow(
                scheme=rec[0],
                m_antennas=int(rec[1]),
                kappa=float(rec[2]),
                users_per_cell=int(rec[3]),
                sigma_shadow_db=float(rec[4]),
                mean_sym_se=float(rec[5]),
                stderr=float(rec[6]),
                n_realizations=int(rec[7]),
                mode=rec[8],
                avg_mu=float(rec[9]) if rec[9] else None,
            )
        )
    return rows
