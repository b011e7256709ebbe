"""Sup-norm decay envelopes, dispersion bounds, and caustic detection.

The measured object is S(t) = sup over a spatial window of |G(t, x, y)|.
The window tracks the moving wave shell: the spatial sup in x combines a
fine grid around the source height (where the caustic returns live, step
h/8 within |x - a| <= 4 h^{2/3}) with a coarser background grid, and the
y-window rides at y ~ t * v with v the gallery group-speed range.  The
theoretical envelope is

    B(t) = h^{-d} min(1, (h/t)^{(d-2)/2} gamma(t, h, a)),

with gamma given per regime, and the refined near-caustic form available
inside the return intervals I_n around t_n = 4 n sqrt(a (1 + a)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .green import FieldSlice, SemiclassicalConfig, field_slab

__all__ = [
    "CausticSchedule",
    "GammaValue",
    "DispersionEnvelope",
    "SpatialWindowSpec",
    "caustic_times",
    "gamma_bound",
    "gamma_refined",
    "dispersion_bound",
    "detect_peaks",
    "exponent_fit",
    "sup_norm_envelope",
    "bundle_trace",
    "refine_peak",
    "refit_return_coefficient",
]


@dataclass(frozen=True)
class CausticSchedule:
    """Return times t_n = 4 n sqrt(a(1+a)) with intervals I_n = t_n (1 -+ a)."""

    a: float
    t_n: np.ndarray
    intervals: np.ndarray  # (n, 2)

    def containing(self, t: float) -> int:
        """1-based n of the interval containing t, or 0 if outside all."""
        for i, (lo, hi) in enumerate(self.intervals):
            if lo <= t <= hi:
                return i + 1
        return 0


def caustic_times(a: float, T: float) -> CausticSchedule:
    """All return times t_n <= T with their surrounding intervals."""
    if not 0.0 < a <= 1.0:
        raise ValueError(f"a must be in (0, 1], got {a}")
    if T <= 0.0:
        raise ValueError("T must be positive")
    t1 = 4.0 * math.sqrt(a * (1.0 + a))
    n_max = int(T / t1)
    ns = np.arange(1, n_max + 1)
    tn = t1 * ns
    intervals = np.stack([tn * (1.0 - a), tn * (1.0 + a)], axis=-1)
    return CausticSchedule(a=a, t_n=tn, intervals=intervals)


@dataclass(frozen=True)
class GammaValue:
    value: float
    regime: str           # "tangent", "small-a", or "gap"
    gamma_tangent: float  # sqrt(h/t) + a^{1/4} (h/t)^{1/4}
    gamma_small_a: float  # (h/t)^{1/3} + h^{1/4}


_REGIME_EXPONENT = 0.55  # strictly inside a >= h^{4/7 - eps}


def gamma_bound(t: float, h: float, a: float, d: int = 2) -> GammaValue:
    """Dispersion loss factor gamma(t, h, a) with its regime label.

    In the unresolved strip h^{1/2} < a < h^{0.55} both candidate formulas
    are reported with the label "gap" and the value is their max (display
    convention; nothing is asserted there).
    """
    if min(t, h, a) <= 0.0:
        raise ValueError("t, h, a must be positive")
    del d
    ht = h / t
    g_tan = math.sqrt(ht) + a ** 0.25 * ht ** 0.25
    g_small = ht ** (1.0 / 3.0) + h ** 0.25
    if a >= h ** _REGIME_EXPONENT:
        return GammaValue(g_tan, "tangent", g_tan, g_small)
    if a <= math.sqrt(h):
        return GammaValue(g_small, "small-a", g_tan, g_small)
    return GammaValue(max(g_tan, g_small), "gap", g_tan, g_small)


def gamma_refined(t: float, h: float, a: float, schedule: CausticSchedule) -> float:
    """Near-caustic refinement of gamma, valid inside the containing I_n."""
    n = schedule.containing(t)
    if n == 0:
        raise ValueError(f"t={t} lies outside every caustic interval")
    tn = float(schedule.t_n[n - 1])
    denom = n ** 0.25 + h ** (-1.0 / 12.0) * a ** (-1.0 / 24.0) * abs(t * t - tn * tn) ** (1.0 / 6.0)
    return math.sqrt(h / t) + h ** (1.0 / 3.0) + a ** 0.125 * h ** 0.25 / denom


def dispersion_bound(t: float, h: float, a: float, d: int,
                     schedule: CausticSchedule | None = None,
                     refined: bool = False) -> float:
    """Constant-free envelope h^{-d} min(1, (h/t)^{(d-2)/2} gamma)."""
    if refined and schedule is not None and schedule.containing(t):
        g = gamma_refined(t, h, a, schedule)
    else:
        g = gamma_bound(t, h, a, d).value
    return h ** (-d) * min(1.0, (h / t) ** (0.5 * (d - 2)) * g)


def exponent_fit(scales, values) -> tuple[float, float, float]:
    """Least-squares slope of log(value) vs log(scale); (slope, intercept, residual)."""
    scales = np.asarray(scales, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(scales) < 3:
        raise ValueError("need at least 3 samples")
    if np.any(scales <= 0.0) or np.any(values <= 0.0):
        raise ValueError("samples must be positive for a log-log fit")
    lx, ly = np.log(scales), np.log(values)
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return float(slope), float(intercept), residual


def detect_peaks(t: np.ndarray, s: np.ndarray, window: int = 21,
                 factor: float = 1.5) -> list[tuple[float, float]]:
    """Strict local maxima of s exceeding factor x local median; (t, s) pairs."""
    t = np.asarray(t, float)
    s = np.asarray(s, float)
    half = window // 2
    peaks = []
    for i in range(1, len(s) - 1):
        if not (s[i] > s[i - 1] and s[i] > s[i + 1]):
            continue
        lo, hi = max(0, i - half), min(len(s), i + half + 1)
        if s[i] > factor * np.median(s[lo:hi]):
            peaks.append((float(t[i]), float(s[i])))
    return peaks


@dataclass(frozen=True)
class SpatialWindowSpec:
    """Scan-window recipe for the sup-norm measurement.

    x: fine grid of step fine_step*h within |x - a| <= fine_half*h^{2/3},
    plus a coarse grid of step a/coarse_div up to x_max.  y: the window
    [t*shell_lo - pad, t*shell_hi + pad] with the shell speeds derived from
    the kept modes and pad covering dispersive spreading.
    """

    fine_half: float = 4.0     # in units of h^{2/3}
    fine_step: float = 0.125   # in units of h
    coarse_div: float = 16.0
    x_max: float | None = None
    shell_pad: float = 0.06    # fraction of t added both sides
    disp_pad: float = 3.0      # times sqrt(h t)
    y_speed_hi: float | None = None  # override of the upper shell speed

    def x_grid(self, cfg: SemiclassicalConfig) -> np.ndarray:
        h, a = cfg.h, cfg.a
        half = self.fine_half * h ** (2.0 / 3.0)
        fine = np.arange(max(0.0, a - half), a + half, self.fine_step * h)
        x_hi = self.x_max if self.x_max is not None else min(1.0, a + 10.0 * half)
        coarse = np.arange(a / self.coarse_div, x_hi, a / self.coarse_div)
        grid = np.unique(np.concatenate([fine, coarse]))
        return grid[grid >= 0.0]

    def shell_speed(self, cfg: SemiclassicalConfig) -> float:
        # top group speed of the modes the scan should keep: turning depth
        # ~ 3.5a covers the caustic returns with margin
        if self.y_speed_hi is not None:
            return self.y_speed_hi
        w = 3.5 * cfg.a
        return (1.0 + (2.0 / 3.0) * w) / math.sqrt(1.0 + w)

    def y_window(self, cfg: SemiclassicalConfig, t: float) -> tuple[float, float]:
        v_hi = self.shell_speed(cfg)
        pad = self.shell_pad * t + self.disp_pad * math.sqrt(cfg.h * max(t, cfg.h)) \
            + 8.0 * cfg.h
        return (max(0.0, t * (1.0 - self.shell_pad) - pad), t * v_hi + pad)


@dataclass
class DispersionEnvelope:
    """Measured sup-norms with theoretical bounds and detected peaks."""

    t: np.ndarray
    S: np.ndarray                 # sup over the scan window
    S_at_a: np.ndarray            # sup restricted to the fine x ~ a core
    bound_regime: np.ndarray
    bound_refined: np.ndarray     # regime value outside I_n
    regime_labels: list[str]
    n_interval: np.ndarray        # containing I_n index, 0 outside
    peaks: list[tuple[float, float]]
    schedule: CausticSchedule
    config: SemiclassicalConfig
    S_tx: np.ndarray | None = None    # (nt, nx) x-resolved sup over y
    x: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def fit_upper_constant(self) -> float:
        """Smallest C with S <= C * bound on the whole grid."""
        return float(np.max(self.S / self.bound_regime))

    def ratio_at(self, t_target: float, refined: bool = False) -> float:
        """S_at_a / bound at the grid time nearest t_target."""
        i = int(np.argmin(np.abs(self.t - t_target)))
        b = self.bound_refined[i] if refined else self.bound_regime[i]
        return float(self.S_at_a[i] / b)


def sup_norm_envelope(cfg: SemiclassicalConfig, t_grid,
                      window: SpatialWindowSpec | None = None,
                      keep_field: bool = False,
                      peak_window: int = 21, peak_factor: float = 1.5,
                      certify_every: int = 0) -> DispersionEnvelope:
    """Measure S(t) over the scan window and attach the theoretical bounds.

    ``certify_every`` > 0 re-runs every n-th time with doubled quadrature and
    mode window and records the worst relative change in meta["certificates"].
    """
    if window is None:
        window = SpatialWindowSpec()
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(t_grid) <= 0.0) or t_grid[0] <= 0.0:
        raise ValueError("t_grid must be positive and strictly increasing")
    x_grid = window.x_grid(cfg)
    h, a, d = cfg.h, cfg.a, cfg.d
    core = np.abs(x_grid - a) <= window.fine_half * h ** (2.0 / 3.0)

    schedule = caustic_times(a, float(t_grid[-1]) * (1.0 + a) + 1.0)
    S = np.empty_like(t_grid)
    S_at_a = np.empty_like(t_grid)
    S_tx = np.empty((len(t_grid), len(x_grid)))
    labels: list[str] = []
    n_int = np.zeros(len(t_grid), dtype=int)
    b_reg = np.empty_like(t_grid)
    b_ref = np.empty_like(t_grid)
    certificates = []
    edge_flags = 0

    v_cap = window.shell_speed(cfg)
    for i, t in enumerate(t_grid):
        y_lo, y_hi = window.y_window(cfg, t)
        # before the field leaves the source core, the sup lives near x = a
        xg = x_grid if t > 16.0 * h else \
            x_grid[np.abs(x_grid - a) <= 1.4 * t + 12.0 * h]
        cr = core if len(xg) == len(x_grid) else \
            (np.abs(xg - a) <= window.fine_half * h ** (2.0 / 3.0))

        def measure(sl):
            mag = np.abs(sl.values.real) if cfg.cosine else np.abs(sl.values)
            per_x = np.zeros(len(x_grid))
            per_x[np.isin(x_grid, sl.x)] = mag.max(axis=1)
            return mag, per_x

        slab = field_slab(cfg, float(t), xg, y_lo, y_hi, v_cap=v_cap)
        mag, per_x = measure(slab)
        # widen once if the sup sits on the y-window edge
        iy = int(np.argmax(mag.max(axis=0)))
        if iy in (0, len(slab.y) - 1) and t > 16 * h:
            edge_flags += 1
            slab = field_slab(cfg, float(t), xg, max(0.0, y_lo - 0.15 * t),
                              y_hi + 0.15 * t, v_cap=v_cap, mode_cap_boost=1.3)
            mag, per_x = measure(slab)
        S_tx[i] = per_x
        S[i] = per_x.max()
        S_at_a[i] = per_x[core].max() if core.any() else S[i]

        if certify_every and i % certify_every == 0:
            boost = 2.0 if t > 16.0 * h else 1.0  # no mode cap below the threshold
            ref = field_slab(cfg, float(t), xg, y_lo, y_hi, v_cap=v_cap,
                             n_eta=2 * slab.meta["n_eta"], mode_cap_boost=boost)
            ref_mag = np.abs(ref.values.real) if cfg.cosine else np.abs(ref.values)
            delta = abs(ref_mag.max() - S[i]) / max(ref_mag.max(), 1e-300)
            certificates.append((float(t), float(delta)))

        g = gamma_bound(float(t), h, a, d)
        labels.append(g.regime)
        b_reg[i] = h ** (-d) * min(1.0, (h / t) ** (0.5 * (d - 2)) * g.value)
        n = schedule.containing(float(t))
        n_int[i] = n
        if n:
            gr = gamma_refined(float(t), h, a, schedule)
            b_ref[i] = h ** (-d) * min(1.0, (h / t) ** (0.5 * (d - 2)) * gr)
        else:
            b_ref[i] = b_reg[i]

    peaks = detect_peaks(t_grid, S, window=peak_window, factor=peak_factor)
    meta = {"certificates": certificates, "edge_rescans": edge_flags,
            "x_points": len(x_grid)}
    return DispersionEnvelope(
        t=t_grid, S=S, S_at_a=S_at_a, bound_regime=b_reg, bound_refined=b_ref,
        regime_labels=labels, n_interval=n_int, peaks=peaks, schedule=schedule,
        config=cfg, S_tx=S_tx if keep_field else None,
        x=x_grid if keep_field else None, meta=meta)


def bundle_trace(cfg: SemiclassicalConfig, t_grid, depth_factor: float = 1.35,
                 pad_factor: float = 2.5) -> np.ndarray:
    """Sup of the near-tangent ray bundle over the source core, per time.

    The field is depth-filtered to rays turning below depth_factor * a and
    scanned over x ~ a and a y-window co-moving with the bundle's group-speed
    range.  This is the instrument that resolves the return schedule: the raw
    window sup mixes in one-bounce folds of deeper rays, which at moderate
    1/h are not separated from the tangent returns (the amplitude contrast
    scales like (a^3 t / h)^{1/12}) and would blur and delay the peaks.  The
    remaining late bias of the trace peaks is the turning-point width of the
    modes, of relative size ~ h^{2/3}/(2a) at the plateau edge.
    """
    h, a = cfg.h, cfg.a
    x_grid = np.arange(max(0.0, a - 4.0 * h ** (2.0 / 3.0)),
                       a + 4.0 * h ** (2.0 / 3.0), h / 8.0)
    w = depth_factor * a
    v_lo = (1.0 + 2.0 * a / 3.0) / math.sqrt(1.0 + a)
    v_hi = (1.0 + 2.0 * w / 3.0) / math.sqrt(1.0 + w)
    out = np.empty(len(t_grid))
    for i, t in enumerate(np.asarray(t_grid, dtype=float)):
        pad = pad_factor * math.sqrt(h * t) + 8.0 * h
        slab = field_slab(cfg, float(t), x_grid, t * v_lo - pad, t * v_hi + pad,
                          v_cap=v_hi + 0.02, depth_filter=w)
        mag = np.abs(slab.values.real) if cfg.cosine else np.abs(slab.values)
        out[i] = mag.max()
    return out


def refine_peak(t: np.ndarray, values: np.ndarray, i: int) -> float:
    """Parabolic sub-grid refinement of a local maximum at index i."""
    if 0 < i < len(t) - 1:
        curv = values[i - 1] - 2.0 * values[i] + values[i + 1]
        if curv < 0.0:
            return float(t[i] + 0.5 * (values[i - 1] - values[i + 1]) / curv * (t[1] - t[0]))
    return float(t[i])


def refit_return_coefficient(peaks: list[tuple[float, int, float]]) -> float:
    """Least-squares coefficient c in t_peak = c * n * sqrt(a(1+a)).

    ``peaks`` holds (a, n, t_peak) triples; the closed form predicts c = 4.
    """
    design = np.array([[n * math.sqrt(a * (1.0 + a))] for a, n, _ in peaks])
    target = np.array([tp for _, _, tp in peaks])
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    return float(coef[0])
