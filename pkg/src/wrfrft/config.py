"""Scenario configuration: validation, TOML round-trip, and named presets.

A scenario bundles the radar constants, the target list, the noise level,
the search-grid bounds and coarsening factors, and the evaluation plan.
Configs parse from TOML text; serialization is canonical (fixed section
order, sorted keys) so parse -> serialize -> parse is the identity.
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # 3.10: same API from the backport
    import tomli as tomllib
from dataclasses import dataclass, field

from .errors import ValidationError
from .signal_model import RadarParams, TargetTruth

PLANS = ("single-run", "synth", "rmse", "pd", "profile")
METHODS = ("wrfrft", "rfrft", "grft", "rft", "mtd")
AXES = ("eta0", "eta1", "r0", "v", "a")


@dataclass
class ScenarioConfig:
    radar: RadarParams
    targets: list
    snr_db: float | None
    seed: int
    num_cells: int
    bounds: dict
    coarsen: dict
    plan: str = "single-run"
    methods: tuple = ("wrfrft",)
    outdir: str = "out"
    trials: int = 200
    snr_db_list: tuple = ()
    pfa: float = 1e-3
    budget: int = 5_000_000
    grid_offset: dict = field(default_factory=dict)
    rfrft_alpha_count: int = 9

    def __post_init__(self):
        if self.plan not in PLANS:
            raise ValidationError(f"unknown plan {self.plan!r}; choose from {PLANS}")
        for m in self.methods:
            if m not in METHODS:
                raise ValidationError(f"unknown method {m!r}; choose from {METHODS}")
        for ax in AXES:
            if ax not in self.bounds:
                raise ValidationError(f"grid bounds missing axis {ax!r}")
            lo, hi = self.bounds[ax]
            if hi < lo:
                raise ValidationError(f"axis {ax!r}: max < min")
        for ax in self.coarsen:
            if ax not in AXES:
                raise ValidationError(f"coarsen names unknown axis {ax!r}")
        if self.num_cells < 8:
            raise ValidationError("num_cells must be >= 8")
        if not 0 < self.pfa <= 1:
            raise ValidationError("pfa must lie in (0, 1]")
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        for t in self.targets:
            if not (self.radar.t0 <= t.tb < t.te <= self.radar.t1):
                raise ValidationError(
                    f"target dwell [{t.tb}, {t.te}] violates observation "
                    f"[{self.radar.t0}, {self.radar.t1}]")


_RADAR_KEYS = {"fc", "bandwidth", "fs", "prf", "tp", "t0", "t1"}
_TARGET_KEYS = {"r0", "v", "a", "tb", "te", "amplitude"}
_NOISE_KEYS = {"snr_db", "seed"}
_GRID_KEYS = {"num_cells", "bounds", "coarsen", "offset"}
_RUN_KEYS = {"plan", "methods", "outdir", "trials", "snr_db_list", "pfa",
             "budget", "rfrft_alpha_count"}


def _check_keys(section: str, got: dict, allowed: set):
    unknown = set(got) - allowed
    if unknown:
        raise ValidationError(f"[{section}] has unknown keys: {sorted(unknown)}")


def parse_config(text: str) -> ScenarioConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"config does not parse: {exc}") from exc
    _check_keys("", doc, {"radar", "targets", "noise", "grid", "run"})
    for sect in ("radar", "grid"):
        if sect not in doc:
            raise ValidationError(f"config missing [{sect}] section")
    _check_keys("radar", doc["radar"], _RADAR_KEYS)
    radar = RadarParams(**{k: float(v) for k, v in doc["radar"].items()})
    targets = []
    for t in doc.get("targets", []):
        _check_keys("targets", t, _TARGET_KEYS)
        targets.append(TargetTruth(r0=float(t["r0"]), v=float(t["v"]), a=float(t["a"]),
                                   tb=float(t["tb"]), te=float(t["te"]),
                                   sigma0=complex(t.get("amplitude", 1.0))))
    noise = doc.get("noise", {})
    _check_keys("noise", noise, _NOISE_KEYS)
    grid = doc["grid"]
    _check_keys("grid", grid, _GRID_KEYS)
    bounds = {k: (float(v[0]), float(v[1])) for k, v in grid.get("bounds", {}).items()}
    coarsen = {k: float(v) for k, v in grid.get("coarsen", {}).items()}
    offset = {k: float(v) for k, v in grid.get("offset", {}).items()}
    run = doc.get("run", {})
    _check_keys("run", run, _RUN_KEYS)
    return ScenarioConfig(
        radar=radar,
        targets=targets,
        snr_db=float(noise["snr_db"]) if "snr_db" in noise else None,
        seed=int(noise.get("seed", 0)),
        num_cells=int(grid.get("num_cells", 512)),
        bounds=bounds,
        coarsen=coarsen,
        plan=run.get("plan", "single-run"),
        methods=tuple(run.get("methods", ["wrfrft"])),
        outdir=run.get("outdir", "out"),
        trials=int(run.get("trials", 200)),
        snr_db_list=tuple(float(s) for s in run.get("snr_db_list", [])),
        pfa=float(run.get("pfa", 1e-3)),
        budget=int(run.get("budget", 5_000_000)),
        grid_offset=offset,
        rfrft_alpha_count=int(run.get("rfrft_alpha_count", 9)),
    )


def _toml_value(v):
    if isinstance(v, str):
        return f'"{v}"'
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize_config(cfg: ScenarioConfig) -> str:
    out = []
    out.append("[radar]")
    r = cfg.radar
    for k in sorted(_RADAR_KEYS):
        out.append(f"{k} = {_toml_value(getattr(r, k))}")
    for t in cfg.targets:
        out.append("")
        out.append("[[targets]]")
        for k in ("r0", "v", "a", "tb", "te"):
            out.append(f"{k} = {_toml_value(float(getattr(t, k)))}")
        out.append(f"amplitude = {_toml_value(abs(t.sigma0))}")
    out.append("")
    out.append("[noise]")
    if cfg.snr_db is not None:
        out.append(f"snr_db = {_toml_value(float(cfg.snr_db))}")
    out.append(f"seed = {cfg.seed}")
    out.append("")
    out.append("[grid]")
    out.append(f"num_cells = {cfg.num_cells}")
    out.append("")
    out.append("[grid.bounds]")
    for k in AXES:
        if k in cfg.bounds:
            lo, hi = cfg.bounds[k]
            out.append(f"{k} = [{_toml_value(float(lo))}, {_toml_value(float(hi))}]")
    out.append("")
    out.append("[grid.coarsen]")
    for k in AXES:
        if k in cfg.coarsen:
            out.append(f"{k} = {_toml_value(float(cfg.coarsen[k]))}")
    if cfg.grid_offset:
        out.append("")
        out.append("[grid.offset]")
        for k in AXES:
            if k in cfg.grid_offset:
                out.append(f"{k} = {_toml_value(float(cfg.grid_offset[k]))}")
    out.append("")
    out.append("[run]")
    out.append(f"plan = {_toml_value(cfg.plan)}")
    out.append(f"methods = {_toml_value(list(cfg.methods))}")
    out.append(f"outdir = {_toml_value(cfg.outdir)}")
    out.append(f"trials = {cfg.trials}")
    if cfg.snr_db_list:
        out.append(f"snr_db_list = {_toml_value(list(cfg.snr_db_list))}")
    out.append(f"pfa = {_toml_value(float(cfg.pfa))}")
    out.append(f"budget = {cfg.budget}")
    out.append(f"rfrft_alpha_count = {cfg.rfrft_alpha_count}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def _centered_bounds(center: dict, steps: dict, points: int) -> dict:
    half = points // 2
    return {ax: (center[ax] - half * steps[ax], center[ax] + (points - half) * steps[ax])
            for ax in AXES}


def _sband_radar(t1: float = 4.0) -> RadarParams:
    return RadarParams(fc=6e9, bandwidth=10e6, fs=50e6, prf=200.0,
                       tp=10e-6, t0=0.0, t1=t1)


def preset_single(points: int = 7, snr_db: float | None = 4.0, seed: int = 1) -> ScenarioConfig:
    """S-band scene with one accelerating target entering at 0.755 s.

    Coarsening rationale: one velocity step (9 m/s) walks three range cells
    over the dwell, and one window step (0.2 s) costs enough integration
    that re-anchored window/velocity hypothesis pairs stay clearly below the
    matched node; with finer time steps those pairs describe nearly the same
    physical trajectory and tie with the truth under noise.
    """
    radar = _sband_radar()
    tgt = TargetTruth(r0=861.0, v=90.0, a=26.0, tb=0.755, te=3.0)
    coarsen = {"eta0": 40.0, "eta1": 40.0, "r0": 1.0, "v": 1440.0, "a": 64.0}
    from .search import base_steps
    steps = {ax: base_steps(radar)[ax] * coarsen[ax] for ax in AXES}
    center = {"eta0": tgt.tb, "eta1": tgt.te, "r0": tgt.r0, "v": tgt.v, "a": tgt.a}
    return ScenarioConfig(
        radar=radar, targets=[tgt], snr_db=snr_db, seed=seed, num_cells=512,
        bounds=_centered_bounds(center, steps, points), coarsen=coarsen,
        plan="single-run", methods=("wrfrft",), outdir="out")


def preset_multi(snr_db: float | None = 6.0, seed: int = 1) -> ScenarioConfig:
    """Four crossing targets sharing the S-band radar."""
    radar = _sband_radar()
    cell = radar.cell_size
    targets = [
        TargetTruth(r0=287 * cell, v=90.0, a=25.0, tb=0.705, te=3.0),
        TargetTruth(r0=323 * cell, v=70.0, a=25.0, tb=0.705, te=3.0),
        TargetTruth(r0=269 * cell, v=75.0, a=17.0, tb=0.905, te=3.4),
        TargetTruth(r0=305 * cell, v=95.0, a=13.0, tb=1.005, te=3.2),
    ]
    coarsen = {"eta0": 8.0, "eta1": 8.0, "r0": 1.0, "v": 240.0, "a": 64.0}
    bounds = {"eta0": (0.6, 1.1), "eta1": (2.9, 3.5), "r0": (780.0, 1020.0),
              "v": (60.0, 105.0), "a": (10.0, 30.0)}
    return ScenarioConfig(
        radar=radar, targets=targets, snr_db=snr_db, seed=seed, num_cells=512,
        bounds=bounds, coarsen=coarsen, plan="single-run")


def preset_uav(points: int = 5, snr_db: float | None = 6.0, seed: int = 1) -> ScenarioConfig:
    """C-band scene sized like a small-UAV data collection."""
    radar = RadarParams(fc=5.6e9, bandwidth=20e6, fs=60e6, prf=500.0,
                        tp=18e-6, t0=0.0, t1=4.0)
    tgt = TargetTruth(r0=180.0, v=29.0, a=4.0, tb=0.602, te=3.406)
    coarsen = {"eta0": 10.0, "eta1": 10.0, "r0": 1.0, "v": 134.0, "a": 96.0}
    from .search import base_steps
    steps = {ax: base_steps(radar)[ax] * coarsen[ax] for ax in AXES}
    center = {"eta0": tgt.tb, "eta1": tgt.te, "r0": tgt.r0, "v": tgt.v, "a": tgt.a}
    return ScenarioConfig(
        radar=radar, targets=[tgt], snr_db=snr_db, seed=seed, num_cells=192,
        bounds=_centered_bounds(center, steps, points), coarsen=coarsen,
        plan="single-run")


def preset_desk_pd(seed: int = 1) -> ScenarioConfig:
    """Small scene for detection-probability sweeps (distinct method losses).

    The target sits off every method's grid by fixed sub-step offsets, so
    the single-point compensator pays its quantization losses while the
    spectrum-peak methods absorb them.
    """
    radar = _sband_radar(t1=1.28)
    tgt = TargetTruth(r0=300.0, v=30.0, a=15.0, tb=0.32, te=0.805)
    coarsen = {"eta0": 8.0, "eta1": 8.0, "r0": 1.0, "v": 3.0, "a": 3.5}
    offset = {"v": 0.35, "a": 0.35}
    from .search import base_steps
    steps = {ax: base_steps(radar)[ax] * coarsen[ax] for ax in AXES}
    # every method sees the target the same fixed fraction of a step off its
    # grid: shift the windowed search's bounds by the same offsets the
    # baseline grids use
    center = {"eta0": tgt.tb, "eta1": tgt.te, "r0": tgt.r0,
              "v": tgt.v + offset["v"] * steps["v"],
              "a": tgt.a + offset["a"] * steps["a"]}
    return ScenarioConfig(
        radar=radar, targets=[tgt], snr_db=0.0, seed=seed, num_cells=192,
        bounds=_centered_bounds(center, steps, 3), coarsen=coarsen,
        plan="pd", methods=("wrfrft", "rfrft", "grft", "rft", "mtd"),
        snr_db_list=tuple(range(-14, 19, 2)), trials=200, pfa=1e-3,
        grid_offset=offset, rfrft_alpha_count=33)


PRESETS = {
    "table1": preset_single,
    "table2-single": preset_single,
    "table3-multi": preset_multi,
    "table4-uav": preset_uav,
    "desk-pd": preset_desk_pd,
}


def load_preset(name: str, **kwargs) -> ScenarioConfig:
    if name not in PRESETS:
        raise ValidationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return PRESETS[name](**kwargs)
