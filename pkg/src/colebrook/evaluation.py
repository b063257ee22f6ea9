"""Evaluation harness: domain sampling (mesh and Sobol), error-map
scanning against the reference solver, the accuracy-vs-complexity table,
static cost profiles, and wall-time micro-benchmarks.

Grid scans may be partitioned across workers; every point's computation
is independent and the reduction is associativity-safe, so results are
identical for any worker count.
"""

import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import core, kernels, schemes


class ConfigError(ValueError):
    """Invalid grid, sampling, or harness configuration."""


_SPACINGS = ("log", "linear")


@dataclass(frozen=True, slots=True)
class GridSpec:
    """A rectangular evaluation mesh with endpoints included per axis.

    The default is the 300x300 log-log mesh over Re in [4000, 1e8] and
    eps/D in [1e-6, 0.05]: 90,000 intersection points.
    """

    re_min: float = 4000.0
    re_max: float = 1.0e8
    rough_min: float = 1e-6
    rough_max: float = 0.05
    n_re: int = 300
    n_rough: int = 300
    re_spacing: str = "log"
    rough_spacing: str = "log"

    def __post_init__(self):
        for name, value in (
            ("re_min", self.re_min), ("re_max", self.re_max),
            ("rough_min", self.rough_min), ("rough_max", self.rough_max),
        ):
            if not (math.isfinite(value) and value > 0.0):
                raise ConfigError(f"{name} must be positive and finite, got {value}")
        if not self.re_min < self.re_max:
            raise ConfigError(f"re bounds not ordered: [{self.re_min}, {self.re_max}]")
        if not self.rough_min < self.rough_max:
            raise ConfigError(
                f"rough bounds not ordered: [{self.rough_min}, {self.rough_max}]"
            )
        if self.n_re < 2 or self.n_rough < 2:
            raise ConfigError("need at least 2 points per axis to include both endpoints")
        if self.re_spacing not in _SPACINGS or self.rough_spacing not in _SPACINGS:
            raise ConfigError(f"spacing must be one of {_SPACINGS}")

    @property
    def size(self) -> int:
        return self.n_re * self.n_rough


DEFAULT_GRID = GridSpec()


def _axis(lo, hi, n, spacing):
    # geomspace/linspace both pin the endpoints exactly
    if spacing == "log":
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def grid_axes(spec: GridSpec):
    """(re_values, rough_values) axis arrays, endpoints included."""
    return (
        _axis(spec.re_min, spec.re_max, spec.n_re, spec.re_spacing),
        _axis(spec.rough_min, spec.rough_max, spec.n_rough, spec.rough_spacing),
    )


def _flat_mesh(spec: GridSpec):
    """Flattened rough-major mesh: roughness varies slowest."""
    re_axis, rough_axis = grid_axes(spec)
    rough_m, re_m = np.meshgrid(rough_axis, re_axis, indexing="ij")
    return re_m.ravel(), rough_m.ravel()


def build_grid(spec: GridSpec = DEFAULT_GRID):
    """The mesh as an ordered FlowPoint list, rough-major.

    Row order matches the CSV export: for each roughness (ascending), all
    Reynolds numbers ascending.
    """
    re_flat, rough_flat = _flat_mesh(spec)
    return [
        core.FlowPoint(r, s, out_of_domain_ok=True)
        for r, s in zip(re_flat.tolist(), rough_flat.tolist())
    ]


# ---------------------------------------------------------------------------
# Sobol sampling
# ---------------------------------------------------------------------------

_SOBOL_BITS = 32


def _sobol_directions():
    # dimension 1: van der Corput in base 2
    v1 = [1 << (_SOBOL_BITS - 1 - j) for j in range(_SOBOL_BITS)]
    # dimension 2: degree-1 primitive polynomial, m_j = 2*m_{j-1} XOR m_{j-1}
    m = 1
    ms = [m]
    for _ in range(1, _SOBOL_BITS):
        m = (m << 1) ^ m
        ms.append(m)
    v2 = [ms[j] << (_SOBOL_BITS - 1 - j) for j in range(_SOBOL_BITS)]
    return v1, v2


_V1, _V2 = _sobol_directions()


def sobol_2d(n: int, bounds=None, mapping: str = "uniform"):
    """First n points of the 2-D Sobol sequence, optionally domain-mapped.

    Gray-code ordering with the standard direction numbers, matching
    common reference implementations point for point. The raw sequence
    lives in [0, 1)^2 and starts at the origin.

    Args:
        n: number of points, >= 1.
        bounds: None for the unit square, or a GridSpec or a
            (re_min, re_max, rough_min, rough_max) tuple to map onto.
        mapping: "uniform" in the raw coordinates (default) or "log"
            for log-uniform.

    Returns:
        (n, 2) array; mapped columns are (re, rel_rough).
    """
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    pts = np.empty((n, 2))
    pts[0] = 0.0
    xi = yi = 0
    for i in range(1, n):
        c = (i & -i).bit_length() - 1
        xi ^= _V1[c]
        yi ^= _V2[c]
        pts[i, 0] = xi
        pts[i, 1] = yi
    pts *= 2.0 ** -_SOBOL_BITS
    if bounds is None:
        return pts
    if isinstance(bounds, GridSpec):
        lo_re, hi_re = bounds.re_min, bounds.re_max
        lo_r, hi_r = bounds.rough_min, bounds.rough_max
    else:
        lo_re, hi_re, lo_r, hi_r = bounds
    u, v = pts[:, 0], pts[:, 1]
    if mapping == "uniform":
        re = lo_re + u * (hi_re - lo_re)
        rough = lo_r + v * (hi_r - lo_r)
    elif mapping == "log":
        re = lo_re * (hi_re / lo_re) ** u
        rough = lo_r * (hi_r / lo_r) ** v
    else:
        raise ConfigError(f"mapping must be 'uniform' or 'log', got {mapping!r}")
    return np.column_stack([re, rough])


# ---------------------------------------------------------------------------
# error maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ErrorMap:
    """Per-point relative errors over a mesh, rough-major flattened."""

    grid: GridSpec | None
    re: np.ndarray
    rel_rough: np.ndarray
    lambda_ref: np.ndarray
    lambda_approx: np.ndarray
    rel_err_pct: np.ndarray
    sine_fallbacks: int = 0


@dataclass(frozen=True, slots=True)
class ErrorStats:
    """Map summary; argmax is a grid member attaining max_pct."""

    max_pct: float
    argmax_re: float
    argmax_rough: float
    mean_pct: float
    p99_pct: float


def stats_of(errmap: ErrorMap) -> ErrorStats:
    """Summarize a map: max with lexicographic (re, rough) tie-break,
    fsum mean, nearest-rank 99th percentile."""
    err = errmap.rel_err_pct
    n = err.size
    if n == 0:
        raise ConfigError("cannot summarize an empty map")
    max_pct = float(err.max())
    ties = np.flatnonzero(err == max_pct)
    if ties.size > 1:
        order = np.lexsort((errmap.rel_rough[ties], errmap.re[ties]))
        i = int(ties[order[0]])
    else:
        i = int(ties[0])
    mean_pct = math.fsum(err.tolist()) / n
    rank = max(1, math.ceil(0.99 * n))  # nearest-rank definition
    p99_pct = float(np.sort(err)[rank - 1])
    return ErrorStats(
        max_pct=max_pct,
        argmax_re=float(errmap.re[i]),
        argmax_rough=float(errmap.rel_rough[i]),
        mean_pct=mean_pct,
        p99_pct=p99_pct,
    )


def _scan_chunk(spec_list, re_c, rough_c, oracle_tol, constants):
    x0 = core.oracle_start_raw(re_c, rough_c)
    x_ref, _, _, converged = core.solve_colebrook_raw(re_c, rough_c, x0, tol=oracle_tol)
    if not converged.all():
        j = int(np.flatnonzero(~converged)[0])
        raise core.ConvergenceError(
            f"oracle did not converge at (re={re_c[j]}, rel_rough={rough_c[j]})",
            last_x=float(x_ref[j]),
        )
    lam_ref = x_ref ** -2.0
    per_scheme = []
    for spec in spec_list:
        x_a, nfb = schemes.evaluate_scheme_raw(spec, re_c, rough_c, constants=constants)
        lam_a = x_a ** -2.0
        per_scheme.append((lam_a, core.relative_error_pct_raw(lam_ref, lam_a), nfb))
    return lam_ref, per_scheme


def scan_many(
    scheme_ids, grid=None, oracle_tol=core.DEFAULT_TOL, workers=1, constants="published"
):
    """Scan several schemes over one mesh, solving the oracle once.

    Returns:
        dict scheme_id -> (ErrorMap, ErrorStats).
    """
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    grid = DEFAULT_GRID if grid is None else grid
    spec_list = [schemes.get_scheme(s) if isinstance(s, str) else s for s in scheme_ids]
    re_flat, rough_flat = _flat_mesh(grid)
    chunks = np.array_split(np.arange(grid.size), min(workers, grid.size))

    def work(idx):
        return _scan_chunk(spec_list, re_flat[idx], rough_flat[idx], oracle_tol, constants)

    if workers == 1:
        results = [work(idx) for idx in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, chunks))

    lam_ref = np.concatenate([r[0] for r in results])
    out = {}
    for k, spec in enumerate(spec_list):
        lam_a = np.concatenate([r[1][k][0] for r in results])
        err = np.concatenate([r[1][k][1] for r in results])
        nfb = sum(r[1][k][2] for r in results)
        errmap = ErrorMap(
            grid=grid,
            re=re_flat,
            rel_rough=rough_flat,
            lambda_ref=lam_ref,
            lambda_approx=lam_a,
            rel_err_pct=err,
            sine_fallbacks=nfb,
        )
        out[spec.id] = (errmap, stats_of(errmap))
    return out


def scan_errors(
    scheme_id, grid=None, oracle_tol=core.DEFAULT_TOL, workers=1, constants="published"
):
    """Scan one scheme against the oracle over a mesh.

    Returns:
        (ErrorMap, ErrorStats); deterministic for any worker count.
    """
    key = scheme_id if isinstance(scheme_id, str) else scheme_id.id
    return scan_many(
        [scheme_id], grid=grid, oracle_tol=oracle_tol, workers=workers,
        constants=constants,
    )[key]


def sine_window_audit(scheme_id, grid=None):
    """Range of the starter's sine argument over a mesh versus the kernel
    accuracy window; reports how many points would fall back."""
    spec = schemes.get_scheme(scheme_id) if isinstance(scheme_id, str) else scheme_id
    if spec.starter not in schemes.SIN_ARG_COEF:
        raise schemes.SchemeError(f"starter {spec.starter} has no sine term")
    grid = DEFAULT_GRID if grid is None else grid
    re_flat, rough_flat = _flat_mesh(grid)
    if np.any(rough_flat < core.MIN_NORMALIZED_ROUGH):
        raise core.DomainError("sine audit needs rel_rough above the smooth floor")
    arg = schemes.SIN_ARG_COEF[spec.starter] * np.log10(re_flat) + np.log10(rough_flat)
    ok = kernels.in_sin_window(arg)
    return {
        "scheme": spec.id,
        "starter": spec.starter,
        "arg_min": float(arg.min()),
        "arg_max": float(arg.max()),
        "window": kernels.SIN_WINDOW,
        "outside_window": int(arg.size - np.count_nonzero(ok)),
        "total": int(arg.size),
    }


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

CSV_HEADER = "re,rel_rough,lambda_ref,lambda_approx,rel_err_pct"


def export_csv(errmap: ErrorMap, path):
    """Write the map as CSV: fixed header, shortest round-trip decimal
    floats, rough-major row order. Byte-identical across runs."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(CSV_HEADER + "\n")
        for row in zip(
            errmap.re.tolist(),
            errmap.rel_rough.tolist(),
            errmap.lambda_ref.tolist(),
            errmap.lambda_approx.tolist(),
            errmap.rel_err_pct.tolist(),
        ):
            f.write(",".join(repr(v) for v in row) + "\n")


def load_csv(path) -> ErrorMap:
    """Read back an exported CSV; restores values exactly."""
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise ConfigError(f"unexpected CSV header {header!r}")
        cols = [[], [], [], [], []]
        for line in f:
            parts = line.rstrip("\n").split(",")
            if len(parts) != 5:
                raise ConfigError(f"malformed CSV row {line!r}")
            for c, p in zip(cols, parts):
                c.append(float(p))
    return ErrorMap(
        grid=None,
        re=np.array(cols[0]),
        rel_rough=np.array(cols[1]),
        lambda_ref=np.array(cols[2]),
        lambda_approx=np.array(cols[3]),
        rel_err_pct=np.array(cols[4]),
    )


def export_heatmap(errmap: ErrorMap, path):
    """Write the map as a plain portable graymap (P2).

    One pixel per grid point: log10(Re) on x, -log10(eps/D) on y (first
    raster row is the smallest roughness). Intensity is linear in
    rel_err_pct, clipped at the map maximum; an all-zero map is all
    black. One sample per line keeps the format's line-length limit.
    """
    if errmap.grid is None:
        raise ConfigError("heatmap export needs a map with grid geometry")
    w, h = errmap.grid.n_re, errmap.grid.n_rough
    err = errmap.rel_err_pct
    top = float(err.max())
    if top > 0.0:
        pix = np.floor(err / top * 255.0 + 0.5).astype(np.int64)
        pix = np.clip(pix, 0, 255)
    else:
        pix = np.zeros(err.size, dtype=np.int64)
    with open(path, "w", encoding="ascii", newline="") as f:
        f.write(f"P2\n{w} {h}\n255\n")
        f.write("\n".join(str(int(p)) for p in pix))
        f.write("\n")


# ---------------------------------------------------------------------------
# accuracy-vs-complexity table
# ---------------------------------------------------------------------------

# reference maxima as published; the "up to 20 %" style figures are
# one-significant-figure roundings
PUBLISHED_MAX_PCT = {
    "eq2": 16.56,
    "eq2a1": 0.98,
    "eq2a2": 0.13,
    "eq3": 20.0,
    "eq3a": 5.35,
    "eq4": 60.0,
    "eq4a": 6.29,
    "eq5": 6.0,
    "eq5a": 0.28,
    "eq6": 2.0,
    "eq6a": 0.17,
}


def table1_rows(grid=None, oracle_tol=core.DEFAULT_TOL, workers=1):
    """Accuracy-vs-complexity rows: measured and published maxima plus
    the static log count, in the fixed row order."""
    scans = scan_many(
        schemes.TABLE1_ROW_IDS, grid=grid, oracle_tol=oracle_tol, workers=workers
    )
    rows = []
    for sid in schemes.TABLE1_ROW_IDS:
        _, stats = scans[sid]
        prof = cost_profile(sid)
        rows.append(
            {
                "scheme": sid,
                "n_log": prof.n_log,
                "measured_max_pct": stats.max_pct,
                "published_max_pct": PUBLISHED_MAX_PCT[sid],
            }
        )
    return rows


def table1_report(grid=None, oracle_tol=core.DEFAULT_TOL, workers=1) -> str:
    """The eight-row accuracy-vs-complexity table as aligned text."""
    rows = table1_rows(grid=grid, oracle_tol=oracle_tol, workers=workers)
    lines = [f"{'scheme':<12}{'logs':>5}{'measured max %':>16}{'published %':>13}"]
    for r in rows:
        lines.append(
            f"{r['scheme']:<12}{r['n_log']:>5}"
            f"{r['measured_max_pct']:>16.4f}{r['published_max_pct']:>13g}"
        )
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# cost profiles and timing
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class TimingResult:
    median_ns: float
    mad_ns: float
    reps: int
    batch_size: int
    checksum: float


@dataclass(frozen=True, slots=True)
class CostProfile:
    """Static operation counts per evaluation; timing filled by benchmark."""

    scheme_id: str
    n_log: int
    n_sin: int
    n_pow: int
    n_div: int
    timing: TimingResult | None = None


# (n_log, n_sin, n_div) of each bare starter; normalization costs two logs
_STARTER_COSTS = {
    "eq2": (0, 0, 2),
    "eq3": (2, 0, 1),
    "eq4": (2, 1, 0),
    "eq5": (2, 1, 0),
    "eq6": (2, 1, 0),
}


def cost_profile(scheme_id) -> CostProfile:
    """Exact static counts fixed by the scheme recipe.

    Every real log10/ln evaluation counts, including normalization;
    rational kernels count zero logs and zero sines. No scheme uses a
    non-integer power.
    """
    spec = schemes.get_scheme(scheme_id) if isinstance(scheme_id, str) else scheme_id
    n_log, n_sin, n_div = _STARTER_COSTS[spec.starter]
    if spec.sin_strategy != "exact":
        n_sin = 0
    if spec.log_strategy == "pade-one-log":
        # one real log; divisions: y1, y2 (two each), z, pade_ln, /ln10
        n_log += 1
        n_div += 7
    elif spec.accel_form == "direct":
        n_log += spec.accel_steps
        n_div += 2 * spec.accel_steps
    else:
        if spec.starter == "eq2" and spec.accel_steps:
            n_log += 1  # b is not otherwise available for a raw starter
        n_log += spec.accel_steps
        n_div += spec.accel_steps
    return CostProfile(spec.id, n_log, n_sin, 0, n_div)


def benchmark(scheme_ids, batch=None, reps=9, constants="published"):
    """Wall-time micro-benchmark, single-threaded, fixed batch order.

    Whole-batch loops around a monotonic clock, reps repetitions; the
    median and median absolute deviation of ns per evaluation are
    reported. A checksum sink defeats dead-code elimination.

    Returns:
        list of CostProfile with timing filled, one per requested scheme.
    """
    if reps < 3:
        raise ConfigError(f"reps must be >= 3, got {reps}")
    if batch is None:
        batch = sobol_2d(4096, bounds=DEFAULT_GRID)
    batch = np.asarray(batch, dtype=float)
    if batch.ndim != 2 or batch.shape[0] == 0 or batch.shape[1] != 2:
        raise ConfigError("batch must be a non-empty (n, 2) array of (re, rel_rough)")
    re_b = np.ascontiguousarray(batch[:, 0])
    rough_b = np.ascontiguousarray(batch[:, 1])
    out = []
    for sid in scheme_ids:
        spec = schemes.get_scheme(sid) if isinstance(sid, str) else sid
        schemes.evaluate_scheme_raw(spec, re_b, rough_b, constants=constants)  # warmup
        sink = 0.0
        samples = []
        for _ in range(reps):
            t0 = time.perf_counter_ns()
            x, _ = schemes.evaluate_scheme_raw(spec, re_b, rough_b, constants=constants)
            sink += float(x[0]) + float(x[-1])
            t1 = time.perf_counter_ns()
            samples.append((t1 - t0) / re_b.size)
        med = statistics.median(samples)
        mad = statistics.median(abs(s - med) for s in samples)
        prof = replace(
            cost_profile(spec),
            timing=TimingResult(med, mad, reps, int(re_b.size), sink),
        )
        out.append(prof)
    return out
