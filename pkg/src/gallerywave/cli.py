"""Command-line driver: configured experiments with CSV and SVG artifacts.

Subcommands
-----------
verify-identities   Airy / phase-function / eigenbasis identity suite.
dispersion-scan     Sup-norm envelope S(t) with theoretical bounds.
caustic-scan        Envelope across the first return intervals, peaks annotated.
strichartz-scaling  Dyadic-h quotient table for the mixed-norm scaling.

Exit codes: 0 ok, 2 usage error, 3 numerical-accuracy failure,
4 invariant failure.  Outputs carry the full effective configuration in
'# key=value' header lines; identical configuration and seed give
byte-identical CSV bodies.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import airy
from .dispersion import (SpatialWindowSpec, caustic_times, exponent_fit,
                         sup_norm_envelope)
from .green import AccuracyError, SemiclassicalConfig
from .modes import GalleryMode, ModelMetric, mode_eval
from .reports import LinePlot, write_csv
from .strichartz import kernel_split, mixed_norm, split_bounds_check

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ACCURACY = 3
EXIT_INVARIANT = 4


class InvariantFailure(Exception):
    pass


@dataclass
class ExperimentConfig:
    kind: str
    h: float = 2.0 ** -6
    a: float = 0.2
    d: int = 2
    metric: list[float] | None = None
    t_max: float = 0.0          # 0 = experiment-specific default
    t_points: int = 0           # 0 = experiment-specific default
    quad_density: float = 6.0
    h_list: list[float] = field(default_factory=list)
    out: Path = Path("out")
    seed: int = 0

    def semiclassical(self, h: float | None = None, d: int | None = None) -> SemiclassicalConfig:
        dd = self.d if d is None else d
        metric = None
        if self.metric is not None:
            n = dd - 1
            metric = ModelMetric(dd, np.asarray(self.metric, float).reshape(n, n))
        return SemiclassicalConfig(h=self.h if h is None else h, a=self.a, d=dd,
                                   metric=metric, quad_density=self.quad_density,
                                   t_max=max(self.t_max, 8.0))

    def header_items(self) -> list[tuple[str, str]]:
        items = [("experiment", self.kind), ("h", f"{self.h:.12g}"),
                 ("a", f"{self.a:.12g}"), ("d", str(self.d)),
                 ("quad_density", f"{self.quad_density:.12g}"),
                 ("seed", str(self.seed))]
        if self.metric is not None:
            items.append(("metric", ",".join(f"{v:.12g}" for v in self.metric)))
        if self.t_max:
            items.append(("t_max", f"{self.t_max:.12g}"))
        if self.h_list:
            items.append(("h_list", ",".join(f"{v:.12g}" for v in self.h_list)))
        return items


def _read_config_file(path: Path) -> dict[str, str]:
    values = {}
    for raw in path.read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"bad config line (need key=value): {raw!r}")
        key, val = line.split("=", 1)
        values[key.strip()] = val.strip()
    return values


# ----------------------------------------------------------------------
# experiments
# ----------------------------------------------------------------------

def _run_verify_identities(cfg: ExperimentConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    rows: list[tuple[str, float, float, bool]] = []  # name, value, tolerance, ok

    def check(name: str, value: float, tol: float):
        rows.append((name, float(value), tol, bool(abs(value) <= tol)))

    check("phase_at_zero_minus_pi_over_3", airy.phase_L(0.0) - math.pi / 3.0, 1e-10)
    for k in range(1, 21):
        wk = airy.airy_zero(k)
        check(f"phase_at_airy_zero_{k}_minus_2pik", airy.phase_L(wk) - 2.0 * math.pi * k, 1e-8)
        # quadrature oracle for the normalization integral
        xs = np.linspace(0.0, wk + 14.0, 4001)
        quad = np.trapezoid(airy.ai_real(xs - wk) ** 2, xs)
        check(f"phase_slope_vs_norm_integral_{k}",
              airy.phase_L_prime(wk) / (2.0 * math.pi) - quad, 1e-6)
    bump = airy.GaussianBump(center=airy.airy_zero(2), width=0.3)
    res = airy.airy_poisson_pair(bump, n_max=200, k_max=50)
    check("airy_poisson_discrepancy", res.discrepancy, 1e-3)
    res2 = airy.airy_poisson_pair(bump, n_max=400, k_max=50)
    check("airy_poisson_doubling_improves", max(0.0, res2.discrepancy - 2.0 * res.discrepancy), 0.0)
    # eigenbasis spot checks at seeded frequencies
    metric = ModelMetric.isotropic(2)
    for trial in range(3):
        eta = np.array([float(rng.uniform(0.6, 1.9))])
        k = int(rng.integers(1, 12))
        mode = GalleryMode.from_index(k)
        xs = np.linspace(0.0, (mode.omega_k + 10.0) / (float(eta[0]) ** 2) ** (1 / 3) + 1.0, 6000)
        vals = mode_eval(mode, xs, eta, metric)
        check(f"mode_norm_minus_1_trial{trial}", np.trapezoid(vals * vals, xs) - 1.0, 1e-5)

    cfg.out.mkdir(parents=True, exist_ok=True)
    write_csv(cfg.out / "identity_checks.csv",
              {"check": np.array([r[0] for r in rows]),
               "value": np.array([r[1] for r in rows]),
               "tolerance": np.array([r[2] for r in rows]),
               "passed": np.array([int(r[3]) for r in rows])},
              cfg.header_items())
    failures = [r for r in rows if not r[3]]
    for name, value, tol, _ in failures:
        print(f"FAIL {name}: |{value:.3e}| > {tol:.1e}", file=sys.stderr)
    print(f"verify-identities: {len(rows) - len(failures)}/{len(rows)} checks passed; "
          f"wrote {cfg.out / 'identity_checks.csv'}")
    if failures:
        raise InvariantFailure(f"{len(failures)} identity checks failed")
    return EXIT_OK


def _envelope_csv_plot(cfg: ExperimentConfig, env, stem: str) -> None:
    cfg.out.mkdir(parents=True, exist_ok=True)
    labels = np.array(env.regime_labels)
    write_csv(cfg.out / f"{stem}.csv",
              {"t": env.t, "S": env.S, "B_regime": env.bound_regime,
               "B_refined": env.bound_refined, "regime_label": labels,
               "n_interval": env.n_interval},
              cfg.header_items() + env.config.header_items())
    plot = LinePlot(title=stem, xlabel="t", ylabel="sup |G|", logy=True)
    for lo, hi in env.schedule.intervals:
        if lo < env.t[-1]:
            plot.band(max(lo, env.t[0]), min(hi, env.t[-1]))
    plot.line(env.t, env.S, color="#1f77b4", label="measured S")
    plot.line(env.t, env.bound_regime, color="#2ca02c", label="regime bound", dash="5,3")
    plot.line(env.t, env.bound_refined, color="#9467bd", label="refined bound", dash="2,3")
    for tp, sp in env.peaks:
        plot.mark(tp, sp)
    plot.write(cfg.out / f"{stem}.svg")
    print(f"wrote {cfg.out / (stem + '.csv')} and .svg "
          f"({len(env.peaks)} peaks, C_fit={env.fit_upper_constant():.4g})")


def _run_dispersion_scan(cfg: ExperimentConfig) -> int:
    sc = cfg.semiclassical()
    t_hi = cfg.t_max or max(0.9 * sc.a, 0.05)
    n_t = cfg.t_points or 40
    t_grid = np.geomspace(max(2.0 * sc.h, 0.01), t_hi, n_t)
    env = sup_norm_envelope(sc, t_grid)
    _envelope_csv_plot(cfg, env, "dispersion_scan")
    free = t_grid < sc.a
    if np.count_nonzero(free) >= 3:
        slope, _, resid = exponent_fit(env.t[free], env.S[free])
        print(f"free-regime slope: {slope:.3f} (residual {resid:.3f})")
    if not np.all(np.isfinite(env.S)):
        raise InvariantFailure("non-finite envelope values")
    return EXIT_OK


def _run_caustic_scan(cfg: ExperimentConfig) -> int:
    sc = cfg.semiclassical()
    schedule = caustic_times(sc.a, 1e9)
    t1 = float(schedule.t_n[0])
    t_hi = cfg.t_max or 3.45 * t1
    n_t = cfg.t_points or 260
    t_grid = np.linspace(0.35 * t1, t_hi, n_t)
    env = sup_norm_envelope(sc, t_grid)
    _envelope_csv_plot(cfg, env, "caustic_scan")
    covered = [n for n, tn in enumerate(env.schedule.t_n, start=1) if tn <= t_hi]
    misses = []
    for n in covered:
        lo, hi = env.schedule.intervals[n - 1]
        hits = [tp for tp, _ in env.peaks if lo <= tp <= hi]
        if not hits:
            misses.append(n)
    if misses:
        raise InvariantFailure(f"no detected peak inside I_n for n={misses}")
    print(f"caustic-scan: peaks found inside I_n for n={covered}")
    return EXIT_OK


def _run_strichartz_scaling(cfg: ExperimentConfig) -> int:
    hs = cfg.h_list or [2.0 ** -7, 2.0 ** -8, 2.0 ** -9]
    d = 3 if cfg.d == 2 else cfg.d  # the scaling experiment is a d=3 check
    quotients = []
    for h in hs:
        sc = cfg.semiclassical(h=h, d=d)
        t_grid = np.unique(np.concatenate([
            np.geomspace(h / 4.0, 8.0 * h, 10),
            np.geomspace(9.0 * h, 1.0, cfg.t_points or 42)]))
        env = sup_norm_envelope(sc, t_grid)
        norm = mixed_norm(env.t, env.S, q=12.0 / 5.0)
        quotients.append(h ** (13.0 / 6.0) * norm)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_csv(cfg.out / "strichartz_quotients.csv",
              {"h": np.array(hs), "quotient": np.array(quotients)},
              cfg.header_items())
    ratios = [max(q1, q2) / min(q1, q2) for q1, q2 in zip(quotients, quotients[1:])]
    print("strichartz-scaling quotients:",
          ", ".join(f"h={h:g}: {q:.4g}" for h, q in zip(hs, quotients)))
    if any(r >= 2.0 for r in ratios):
        raise InvariantFailure(f"consecutive quotient ratio >= 2: {ratios}")
    print(f"consecutive ratios {['%.3f' % r for r in ratios]} all < 2; "
          f"wrote {cfg.out / 'strichartz_quotients.csv'}")
    return EXIT_OK


_RUNNERS = {
    "verify-identities": _run_verify_identities,
    "dispersion-scan": _run_dispersion_scan,
    "caustic-scan": _run_caustic_scan,
    "strichartz-scaling": _run_strichartz_scaling,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gallerywave",
        description="Gallery-mode wave dispersion laboratory")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="key=value file; flags override")
        p.add_argument("--h", dest="h", type=float)
        p.add_argument("--a", dest="a", type=float)
        p.add_argument("--dim", dest="d", type=int)
        p.add_argument("--metric", type=str,
                       help="comma-separated (d-1)^2 coefficient list")
        p.add_argument("--tmax", dest="t_max", type=float)
        p.add_argument("--t-points", dest="t_points", type=int)
        p.add_argument("--quad-density", dest="quad_density", type=float)
        p.add_argument("--h-list", type=str, help="comma-separated h values")
        p.add_argument("--out", type=Path)
        p.add_argument("--seed", type=int)
    return parser


def _build_experiment(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig(kind=args.command)
    file_vals = _read_config_file(args.config) if args.config else {}
    str_fields = {"h": float, "a": float, "d": int, "t_max": float,
                  "t_points": int, "quad_density": float, "seed": int}
    for key, cast in str_fields.items():
        if key in file_vals:
            setattr(cfg, key, cast(file_vals[key]))
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            setattr(cfg, key, cast(cli_val))
    metric_txt = file_vals.get("metric")
    if getattr(args, "metric", None):
        metric_txt = args.metric
    if metric_txt:
        cfg.metric = [float(v) for v in metric_txt.split(",")]
    hlist_txt = file_vals.get("h_list")
    if getattr(args, "h_list", None):
        hlist_txt = args.h_list
    if hlist_txt:
        cfg.h_list = [float(v) for v in hlist_txt.split(",")]
    if "out" in file_vals:
        cfg.out = Path(file_vals["out"])
    if getattr(args, "out", None) is not None:
        cfg.out = args.out
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses its own exit codes
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = _build_experiment(args)
        return _RUNNERS[cfg.kind](cfg)
    except (ValueError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AccuracyError as exc:
        print(f"accuracy failure: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except InvariantFailure as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
