"""Monte-Carlo sweep execution: scene generation, per-trial seed derivation,
grid iteration over (SNR, M, K), metric aggregation and CSV persistence.

Seeds derive from (master_seed, axis indices, trial index) through a
splitmix64 chain, so extending an axis never perturbs existing grid points
and results are independent of worker count and scheduling.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .channel import DEFAULT_F_SAMP, Scenario
from .errors import ConfigError, DegenerateGeometryError, SceneGenerationError
from .geometry import SPEED_OF_LIGHT, NodeLayout, forward_sensing
from .metrics import compute_report
from .pipeline import EstimatorParams, TrialOutcome, run_trial

_MASK64 = (1 << 64) - 1

CSV_HEADER = "snr_db,M,K,P,mse,p_d,srp,mean_runtime_ms,mapping_failures"


def splitmix64(x: int) -> int:
    """One splitmix64 step; stable across platforms and Python versions."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(master_seed: int, *indices: int) -> int:
    """Mix a master seed with any number of non-negative indices."""
    state = splitmix64(master_seed & _MASK64)
    for index in indices:
        state = splitmix64(state ^ splitmix64((index + 0x1F) & _MASK64))
    return state


@dataclass(frozen=True)
class ScenePolicy:
    """Separation constraints for randomly placed targets.

    A pair of targets is acceptable when the delays differ by at least
    `min_delay_sep_samples` and the bearings either differ by the angular
    floor or coincide within `cobearing_tol_deg` (the same-direction branch,
    entered with probability `cobearing_prob` per placed target).
    `min_sin_sep`, when set, replaces the plain degree floor with a
    sine-space separation.
    """

    min_delay_sep_samples: float = 3.0
    min_bearing_deg: float = 1.0
    min_sin_sep: float | None = None
    cobearing_prob: float = 0.0
    cobearing_tol_deg: float = 0.1
    sector_deg: float = 75.0
    min_range_m: float = 10.0
    max_draws: int = 10_000

    def angular_ok(self, aoa_a: float, aoa_b: float) -> bool:
        if self.min_sin_sep is not None:
            # cyclic distance: steering repeats with period 2 in sine space,
            # so near-endfire bearings on opposite sides are nearly identical
            du = abs(math.sin(math.radians(aoa_a)) - math.sin(math.radians(aoa_b)))
            return min(du, 2.0 - du) >= self.min_sin_sep
        return abs(aoa_a - aoa_b) >= self.min_bearing_deg


@dataclass(frozen=True)
class ResultRow:
    """One grid point's aggregated metrics."""

    snr_db: float
    m: int
    k: int
    trials: int
    mse: float | None
    p_d: float
    srp: float
    mean_runtime_ms: float
    mapping_failures: int

    def to_csv(self) -> str:
        mse_field = "" if self.mse is None or not math.isfinite(self.mse) else repr(self.mse)
        snr_field = "" if self.snr_db is None else repr(self.snr_db)
        return (
            f"{snr_field},{self.m},{self.k},{self.trials},{mse_field},"
            f"{self.p_d!r},{self.srp!r},{self.mean_runtime_ms:.3f},{self.mapping_failures}"
        )


@dataclass(frozen=True)
class SweepConfig:
    """A full sweep: base scenario, grid axes, trial count and estimator
    parameters, plus the scene separation policy."""

    scenario: Scenario
    snr_axis: tuple[float | None, ...] = (0.0,)
    m_axis: tuple[int, ...] = (64,)
    k_axis: tuple[int, ...] = (2,)
    trials: int = 200
    master_seed: int = 1
    estimator: EstimatorParams = field(default_factory=EstimatorParams)
    scene: ScenePolicy = field(default_factory=ScenePolicy)
    epsilon_srp_m: float = 1.0
    output_csv: str | None = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials: must be at least 1")
        for name, axis in (("snr_db", self.snr_axis), ("m", self.m_axis), ("k", self.k_axis)):
            if len(axis) == 0:
                raise ConfigError(f"axes.{name}: axis must be non-empty")
        if any(m < 1 for m in self.m_axis):
            raise ConfigError("axes.m: element counts must be at least 1")
        if any(k < 0 for k in self.k_axis):
            raise ConfigError("axes.k: target counts must be non-negative")


def _admissible(point, layout: NodeLayout, policy: ScenePolicy, f_samp: float, zc_length: int):
    """Sensing pair of an admissible target, or None if the point fails the
    sector, window, or proximity constraints."""
    try:
        pair = forward_sensing(point, layout)
    except DegenerateGeometryError:
        return None
    if abs(pair.aoa_deg) > policy.sector_deg:
        return None
    lag = pair.tau_s * f_samp
    relay_samples = layout.relay_path_m / SPEED_OF_LIGHT * f_samp
    if lag <= relay_samples + 4.0 or lag > zc_length - 2.0:
        return None
    if (
        math.dist(point, layout.p_ris) < policy.min_range_m
        or math.dist(point, layout.p_ap) < policy.min_range_m
        or math.dist(point, layout.p_pr) < policy.min_range_m
    ):
        return None
    return pair


def random_scene(
    rng: np.random.Generator,
    k: int,
    layout: NodeLayout,
    policy: ScenePolicy | None = None,
    f_samp: float = DEFAULT_F_SAMP,
    zc_length: int = 1989,
) -> list[tuple[float, float]]:
    """Place k targets uniformly over the cell, rejecting draws until each is
    admissible and pairwise compatible under the policy.

    Raises SceneGenerationError once the total draw budget is exhausted.
    """
    if policy is None:
        policy = ScenePolicy()
    if k == 0:
        return []
    draws = 0
    while True:
        accepted: list[tuple[float, float]] = []
        pairs = []
        stuck = 0
        while len(accepted) < k:
            if draws >= policy.max_draws:
                raise SceneGenerationError(
                    f"could not place {k} targets within {policy.max_draws} draws"
                )
            draws += 1
            cobearing = bool(pairs) and rng.random() < policy.cobearing_prob
            if cobearing:
                anchor = pairs[rng.integers(len(pairs))]
                jitter = rng.uniform(-policy.cobearing_tol_deg, policy.cobearing_tol_deg)
                bearing = math.radians(
                    layout.ris_boresight_deg + anchor.aoa_deg + jitter
                )
                reach = rng.uniform(policy.min_range_m, max(layout.cell_width, layout.cell_height))
                point = (
                    layout.p_ris[0] + reach * math.cos(bearing),
                    layout.p_ris[1] + reach * math.sin(bearing),
                )
                if not (0 <= point[0] <= layout.cell_width and 0 <= point[1] <= layout.cell_height):
                    stuck += 1
                    continue
            else:
                point = (rng.uniform(0, layout.cell_width), rng.uniform(0, layout.cell_height))
            pair = _admissible(point, layout, policy, f_samp, zc_length)
            if pair is None:
                stuck += 1
                continue
            ok = True
            for other in pairs:
                delay_ok = abs(pair.tau_s - other.tau_s) * f_samp >= policy.min_delay_sep_samples
                bearing_ok = policy.angular_ok(pair.aoa_deg, other.aoa_deg)
                # shared bearings only count as valid when the policy actually
                # generates the same-direction branch
                cobearing_ok = (
                    policy.cobearing_prob > 0.0
                    and abs(pair.aoa_deg - other.aoa_deg) <= policy.cobearing_tol_deg
                )
                if not (delay_ok and (bearing_ok or cobearing_ok)):
                    ok = False
                    break
            if not ok:
                stuck += 1
                if stuck > 200:
                    break  # restart the whole scene
                continue
            accepted.append(point)
            pairs.append(pair)
            stuck = 0
        if len(accepted) == k:
            return accepted


def _trial_scenario(config: SweepConfig, snr_db, m: int, k: int, scene_rng) -> Scenario:
    base = config.scenario
    targets = random_scene(
        scene_rng, k, base.layout, config.scene, base.f_samp, base.zc_length
    )
    return replace(
        base,
        snr_db=snr_db,
        num_ris_elements=m,
        targets=tuple(targets),
        blockage_targets=(),
    )


def _run_one(args) -> tuple[TrialOutcome, float]:
    config, snr_db, m, k, scene_seed, trial_seed = args
    scene_rng = np.random.default_rng(scene_seed)
    scenario = _trial_scenario(config, snr_db, m, k, scene_rng)
    start = time.perf_counter()
    outcome = run_trial(scenario, config.estimator, seed=trial_seed)
    return outcome, (time.perf_counter() - start) * 1e3


def run_sweep(config: SweepConfig, threads: int = 1, progress=None) -> list[ResultRow]:
    """Run every grid point of the sweep and aggregate metrics per point.

    Deterministic for a fixed config regardless of `threads`; trials are
    independent tasks with seeds derived from their grid and trial indices.
    """
    jobs = []
    points = []
    for i_s, snr_db in enumerate(config.snr_axis):
        for i_m, m in enumerate(config.m_axis):
            for i_k, k in enumerate(config.k_axis):
                points.append((snr_db, m, k))
                for t in range(config.trials):
                    jobs.append(
                        (
                            config,
                            snr_db,
                            m,
                            k,
                            derive_seed(config.master_seed, i_s, i_m, i_k, t, 0),
                            derive_seed(config.master_seed, i_s, i_m, i_k, t, 1),
                        )
                    )
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_one, jobs, chunksize=8))
    else:
        results = [_run_one(job) for job in jobs]

    rows = []
    for idx, (snr_db, m, k) in enumerate(points):
        chunk = results[idx * config.trials : (idx + 1) * config.trials]
        outcomes = [outcome for outcome, _ in chunk]
        runtimes = [ms for _, ms in chunk]
        report = compute_report(outcomes, config.epsilon_srp_m)
        rows.append(
            ResultRow(
                snr_db=snr_db,
                m=m,
                k=k,
                trials=config.trials,
                mse=report.mse,
                p_d=report.p_d,
                srp=report.srp,
                mean_runtime_ms=sum(runtimes) / len(runtimes),
                mapping_failures=sum(o.mapping_failures for o in outcomes),
            )
        )
        if progress is not None:
            progress(rows[-1])
    return rows


def write_csv(rows, path: str, config: SweepConfig | None = None) -> None:
    """Write result rows as CSV (LF endings, empty field for undefined MSE)
    plus a JSON sidecar carrying the fully resolved config."""
    lines = [CSV_HEADER] + [row.to_csv() for row in rows]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    if config is not None:
        sidecar = path[: -len(".csv")] + ".config.json" if path.endswith(".csv") else path + ".config.json"
        with open(sidecar, "w", encoding="utf-8") as fh:
            json.dump(config_to_dict(config), fh, indent=2, sort_keys=True)
            fh.write("\n")


def default_layout() -> NodeLayout:
    """Shipped cell geometry: surface on the bottom edge facing the cell,
    transmitter and receiver 30 m away near the sector edges."""
    ris = (500.0, 0.0)
    ap = (ris[0] + 30.0 * math.cos(math.radians(178.0)), ris[1] + 30.0 * math.sin(math.radians(178.0)))
    pr = (ris[0] + 30.0 * math.cos(math.radians(2.0)), ris[1] + 30.0 * math.sin(math.radians(2.0)))
    return NodeLayout(
        p_ap=ap,
        p_ris=ris,
        p_pr=pr,
        cell_width=1000.0,
        cell_height=1000.0,
        ris_boresight_deg=90.0,
    )


def default_scenario(**overrides) -> Scenario:
    """Default scenario: blocked direct paths, unit-gain channels, paper-set
    preamble (length 1989, root 7) and receive array size 16."""
    params = dict(
        layout=default_layout(),
        targets=(),
        num_ris_elements=64,
        num_pr_antennas=16,
        snr_db=0.0,
        blockage_ap=0,
    )
    params.update(overrides)
    return Scenario(**params)


def default_config(**overrides) -> SweepConfig:
    params = dict(scenario=default_scenario())
    params.update(overrides)
    return SweepConfig(**params)


# ---------------------------------------------------------------------------
# config (de)serialization


def config_to_dict(config: SweepConfig) -> dict:
    lay = config.scenario.layout
    return {
        "scenario": {
            "cell": [lay.cell_width, lay.cell_height],
            "ap": list(lay.p_ap),
            "ris": list(lay.p_ris),
            "pr": list(lay.p_pr),
            "ris_boresight_deg": lay.ris_boresight_deg,
            "pr_boresight_deg": lay.pr_boresight_deg,
            "num_ris_elements": config.scenario.num_ris_elements,
            "num_pr_antennas": config.scenario.num_pr_antennas,
            "n_epoch_aoa": config.scenario.n_epoch_aoa,
            "n_epoch_toa": config.scenario.n_epoch_toa,
            "snr_db": config.scenario.snr_db,
            "f_samp": config.scenario.f_samp,
            "zc_length": config.scenario.zc_length,
            "zc_root": config.scenario.zc_root,
            "blockage_ap": config.scenario.blockage_ap,
            "ris_snr_db": config.scenario.ris_snr_db,
            "use_fractional_delay": config.scenario.use_fractional_delay,
            "enable_pathloss": config.scenario.enable_pathloss,
            "carrier_hz": config.scenario.carrier_hz,
            "seed": config.scenario.seed,
        },
        "axes": {
            "snr_db": list(config.snr_axis),
            "m": list(config.m_axis),
            "k": list(config.k_axis),
        },
        "trials": config.trials,
        "master_seed": config.master_seed,
        "estimator": asdict(config.estimator),
        "scene": asdict(config.scene),
        "epsilon_srp_m": config.epsilon_srp_m,
        "output_csv": config.output_csv,
    }


def _require(mapping: dict, key: str, path: str):
    if key not in mapping:
        raise ConfigError(f"{path}.{key}: missing required field")
    return mapping[key]


def config_from_dict(data: dict) -> SweepConfig:
    """Build a validated SweepConfig from a plain dict (parsed JSON)."""
    if not isinstance(data, dict):
        raise ConfigError("config: expected an object")
    sc = data.get("scenario", {})
    if not isinstance(sc, dict):
        raise ConfigError("scenario: expected an object")
    try:
        cell = sc.get("cell", [1000.0, 1000.0])
        layout = NodeLayout(
            p_ap=tuple(_require(sc, "ap", "scenario")),
            p_ris=tuple(_require(sc, "ris", "scenario")),
            p_pr=tuple(_require(sc, "pr", "scenario")),
            cell_width=float(cell[0]),
            cell_height=float(cell[1]),
            ris_boresight_deg=float(sc.get("ris_boresight_deg", 0.0)),
            pr_boresight_deg=sc.get("pr_boresight_deg"),
        )
    except (TypeError, IndexError) as exc:
        raise ConfigError(f"scenario: malformed node coordinates ({exc})") from exc
    scenario_keys = dict(
        num_ris_elements=int(sc.get("num_ris_elements", 64)),
        num_pr_antennas=int(sc.get("num_pr_antennas", 16)),
        n_epoch_aoa=int(sc.get("n_epoch_aoa", 256)),
        n_epoch_toa=int(sc.get("n_epoch_toa", 16)),
        snr_db=sc.get("snr_db", 0.0),
        f_samp=float(sc.get("f_samp") or DEFAULT_F_SAMP),
        zc_length=int(sc.get("zc_length", 1989)),
        zc_root=int(sc.get("zc_root", 7)),
        blockage_ap=int(sc.get("blockage_ap", 0)),
        ris_snr_db=sc.get("ris_snr_db"),
        use_fractional_delay=bool(sc.get("use_fractional_delay", False)),
        enable_pathloss=bool(sc.get("enable_pathloss", False)),
        carrier_hz=float(sc.get("carrier_hz", 3.5e9)),
        seed=int(sc.get("seed", 0)),
    )
    try:
        scenario = Scenario(layout=layout, targets=(), **scenario_keys)
    except Exception as exc:
        raise ConfigError(f"scenario: {exc}") from exc
    axes = data.get("axes", {})
    if not isinstance(axes, dict):
        raise ConfigError("axes: expected an object")
    est_data = data.get("estimator", {})
    scene_data = data.get("scene", {})
    try:
        estimator = EstimatorParams(**est_data)
    except TypeError as exc:
        raise ConfigError(f"estimator: {exc}") from exc
    try:
        scene = ScenePolicy(**scene_data)
    except TypeError as exc:
        raise ConfigError(f"scene: {exc}") from exc
    return SweepConfig(
        scenario=scenario,
        snr_axis=tuple(axes.get("snr_db", [0.0])),
        m_axis=tuple(int(v) for v in axes.get("m", [64])),
        k_axis=tuple(int(v) for v in axes.get("k", [2])),
        trials=int(data.get("trials", 200)),
        master_seed=int(data.get("master_seed", 1)),
        estimator=estimator,
        scene=scene,
        epsilon_srp_m=float(data.get("epsilon_srp_m", 1.0)),
        output_csv=data.get("output_csv"),
    )


def load_config(path: str) -> SweepConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path}: {exc}") from exc
    return config_from_dict(data)
