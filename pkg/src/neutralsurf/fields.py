"""Curvature fields on parameter grids and intrinsic Laplacian checks.

The Laplacian is the metric divergence of the gradient,

    lap f = (1/sqrt(g)) d_i ( sqrt(g) g^{ij} d_j f ),   sqrt(g) = sqrt(E G - F^2),

discretized with nested central differences on a uniform grid (interior
margin of two nodes).  The sign convention is div(grad .): positive on
convex bumps of a flat metric, so the subharmonicity statements checked
here read as "laplacian >= 0".

The identity checks compare lap(ln(K + shift)) against 2(2K - KD) on
minimal equality-case surfaces, with shift +1, 0, -1 for ambient curvature
-1, 0, +1 respectively.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass

import numpy as np

from .ambient import DomainRect
from .catalog import Immersion
from .curvature import (
    build_frames,
    ellipse_of_curvature,
    invariants,
    second_fundamental_form,
    shape_operators,
)
from .errors import FieldDomainError, InputMismatchError, PreconditionError

QUANTITIES = ("K", "KD", "H2", "defect", "ln(K+1)", "ln(K)", "ln(K-1)")

# identity id -> (required ambient kind, curvature, log shift)
IDENTITIES = {
    "hyperbolic": ("pseudo_hyperbolic", -1.0, 1.0),
    "flat": ("flat", 0.0, 0.0),
    "spherical": ("pseudo_sphere", 1.0, -1.0),
}
# compatibility aliases accepted by the library and the CLI
IDENTITY_ALIASES = {"eq5_11": "hyperbolic", "eq6_6": "flat", "eq7_7": "spherical"}

MINIMAL_H2_TOL = 1e-9
MINIMAL_H_TOL = 1e-6
EQUALITY_TOL = 1e-6


@dataclass(frozen=True)
class GridField:
    """Scalar samples and metric coefficients on a uniform parameter grid."""

    domain: DomainRect
    nx: int
    ny: int
    values: np.ndarray
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    quantity: str = "value"

    def __post_init__(self):
        for name in ("values", "E", "F", "G"):
            arr = getattr(self, name)
            if arr.shape != (self.nx, self.ny):
                raise InputMismatchError(
                    f"{name} has shape {arr.shape}, expected {(self.nx, self.ny)}"
                )

    @property
    def hs(self) -> float:
        return (self.domain.s1 - self.domain.s0) / (self.nx - 1)

    @property
    def ht(self) -> float:
        return (self.domain.t1 - self.domain.t0) / (self.ny - 1)

    def node_coords(self):
        return self.domain.grid(self.nx, self.ny)


@dataclass(frozen=True)
class SurfaceSample:
    """Pointwise invariants of an immersion over a grid, one array per field."""

    imm: Immersion
    domain: DomainRect
    nx: int
    ny: int
    K: np.ndarray
    KD: np.ndarray
    H2: np.ndarray
    defect: np.ndarray
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    H_norm: np.ndarray
    h_max: np.ndarray
    ellipse_circle: np.ndarray
    ellipse_point: np.ndarray

    def grid_field(self, values: np.ndarray, quantity: str) -> GridField:
        return GridField(self.domain, self.nx, self.ny, values, self.E, self.F, self.G, quantity)

    @property
    def minimal(self) -> bool:
        return (
            float(np.max(np.abs(self.H2))) <= MINIMAL_H2_TOL
            and float(np.max(self.H_norm)) <= MINIMAL_H_TOL
        )

    @property
    def totally_geodesic(self) -> bool:
        return float(np.max(self.h_max)) <= 1e-8

    def kd_equality_signed(self) -> np.ndarray:
        """KD with the sign for which K + KD comes closest to H2 + c."""
        c = self.imm.ambient.curvature
        plus = np.abs(self.K + self.KD - self.H2 - c)
        minus = np.abs(self.K - self.KD - self.H2 - c)
        return np.where(plus <= minus, self.KD, -self.KD)


def sample_surface(
    imm: Immersion,
    grid: tuple[int, int] = (33, 33),
    domain: DomainRect | None = None,
) -> SurfaceSample:
    """Evaluate the pointwise curvature pipeline on every grid node."""
    domain = domain or imm.domain
    nx, ny = grid
    ss, ts = domain.grid(nx, ny)
    shape = (nx, ny)
    out = {
        name: np.empty(shape)
        for name in ("K", "KD", "H2", "defect", "E", "F", "G", "H_norm", "h_max")
    }
    circle = np.empty(shape, dtype=bool)
    point = np.empty(shape, dtype=bool)
    c = imm.ambient.curvature
    for i, s in enumerate(ss):
        for j, t in enumerate(ts):
            frames = build_frames(imm, (s, t))
            h = second_fundamental_form(imm, (s, t), frames)
            a3, a4 = shape_operators(h, frames)
            rep = invariants(a3, a4, frames, c)
            ell = ellipse_of_curvature(h, rep.H)
            out["K"][i, j] = rep.K
            out["KD"][i, j] = rep.KD
            out["H2"][i, j] = rep.H2
            out["defect"][i, j] = rep.defect
            out["E"][i, j] = frames.metric.E
            out["F"][i, j] = frames.metric.F
            out["G"][i, j] = frames.metric.G
            out["H_norm"][i, j] = rep.H.euclid_norm()
            out["h_max"][i, j] = max(v.euclid_norm() for v in h.components())
            circle[i, j] = ell.is_circle
            point[i, j] = ell.is_point
    return SurfaceSample(
        imm=imm,
        domain=domain,
        nx=nx,
        ny=ny,
        ellipse_circle=circle,
        ellipse_point=point,
        **out,
    )


def _log_field(base: np.ndarray, shift: float, sample: SurfaceSample, label: str) -> np.ndarray:
    arg = base + shift
    if np.any(arg <= 0.0):
        i, j = np.unravel_index(int(np.argmin(arg)), arg.shape)
        ss, ts = sample.domain.grid(sample.nx, sample.ny)
        raise FieldDomainError(
            f"{label} undefined at node ({i},{j}), (s,t)=({ss[i]:.6g},{ts[j]:.6g}): "
            f"argument {arg[i, j]:.6g} <= 0"
        )
    return np.log(arg)


def sample_field(
    imm: Immersion,
    quantity: str,
    grid: tuple[int, int] = (33, 33),
    domain: DomainRect | None = None,
    sample: SurfaceSample | None = None,
) -> GridField:
    """Sample one curvature quantity (or its shifted logarithm) on a grid."""
    if quantity not in QUANTITIES:
        raise InputMismatchError(
            f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}"
        )
    if sample is None:
        sample = sample_surface(imm, grid, domain)
    if quantity in ("K", "KD", "H2", "defect"):
        return sample.grid_field(getattr(sample, quantity).copy(), quantity)
    shift = {"ln(K+1)": 1.0, "ln(K)": 0.0, "ln(K-1)": -1.0}[quantity]
    return sample.grid_field(_log_field(sample.K, shift, sample, quantity), quantity)


@dataclass(frozen=True)
class LaplacianReport:
    """Intrinsic Laplacian of a grid field, with optional identity residual.

    laplacian covers interior nodes only (margin nodes dropped from each
    edge); for identity checks, lhs/rhs/residual hold the two sides and
    their difference on the same interior.
    """

    quantity: str
    domain: DomainRect
    nx: int
    ny: int
    margin: int
    laplacian: np.ndarray
    lhs: np.ndarray | None = None
    rhs: np.ndarray | None = None
    residual: np.ndarray | None = None
    threshold: float = 1e-3

    @property
    def max_abs_laplacian(self) -> float:
        return float(np.max(np.abs(self.laplacian)))

    @property
    def min_laplacian(self) -> float:
        return float(np.min(self.laplacian))

    @property
    def max_abs_residual(self) -> float:
        if self.residual is None:
            return 0.0
        return float(np.max(np.abs(self.residual)))

    @property
    def max_abs_rhs(self) -> float:
        if self.rhs is None:
            return 0.0
        return float(np.max(np.abs(self.rhs)))

    @property
    def relative_residual(self) -> float:
        if self.residual is None:
            return 0.0
        return self.max_abs_residual / max(self.max_abs_rhs, 1e-30)

    @property
    def verdict(self) -> str:
        return harmonicity_verdict(self, self.threshold)


def harmonicity_verdict(report: LaplacianReport, tol: float) -> str:
    """Classify the Laplacian field: log-harmonic, subharmonic, or neither."""
    if report.max_abs_laplacian <= tol:
        return "log-harmonic"
    if report.min_laplacian >= -tol:
        return "subharmonic"
    return "neither"


def intrinsic_laplacian(f: GridField, threshold: float = 1e-3) -> LaplacianReport:
    """Metric Laplacian of a grid field by nested central differences."""
    if f.nx < 5 or f.ny < 5:
        raise InputMismatchError(f"grid {f.nx}x{f.ny} too small; need at least 5x5")
    hs, ht = f.hs, f.ht
    det = f.E * f.G - f.F * f.F
    w = np.sqrt(det)
    g11 = f.G / det
    g12 = -f.F / det
    g22 = f.E / det
    # first derivatives on the inner (margin-1) region
    fs = (f.values[2:, 1:-1] - f.values[:-2, 1:-1]) / (2.0 * hs)
    ft = (f.values[1:-1, 2:] - f.values[1:-1, :-2]) / (2.0 * ht)
    mid = (slice(1, -1), slice(1, -1))
    flux_s = w[mid] * (g11[mid] * fs + g12[mid] * ft)
    flux_t = w[mid] * (g12[mid] * fs + g22[mid] * ft)
    # divergence on the margin-2 interior
    div = (flux_s[2:, 1:-1] - flux_s[:-2, 1:-1]) / (2.0 * hs) + (
        flux_t[1:-1, 2:] - flux_t[1:-1, :-2]
    ) / (2.0 * ht)
    lap = div / w[2:-2, 2:-2]
    return LaplacianReport(
        quantity=f.quantity,
        domain=f.domain,
        nx=f.nx,
        ny=f.ny,
        margin=2,
        laplacian=lap,
        threshold=threshold,
    )


def resolve_identity(which: str) -> str:
    name = IDENTITY_ALIASES.get(which, which)
    if name not in IDENTITIES:
        options = sorted(IDENTITIES) + sorted(IDENTITY_ALIASES)
        raise InputMismatchError(
            f"unknown identity {which!r}; choose from {', '.join(options)}"
        )
    return name


def verify_identity(
    imm: Immersion,
    which: str,
    grid: tuple[int, int] = (65, 65),
    domain: DomainRect | None = None,
    threshold: float = 1e-3,
    sample: SurfaceSample | None = None,
) -> LaplacianReport:
    """Check lap(ln(K + shift)) = 2(2K - KD) on a minimal equality surface.

    Preconditions (violations raise PreconditionError): the ambient kind
    and curvature match the identity, the surface is minimal and satisfies
    the equality case on the grid, and the logarithm argument is positive.
    KD enters with the equality-achieving sign.
    """
    name = resolve_identity(which)
    kind, c_required, shift = IDENTITIES[name]
    if imm.ambient.kind != kind or imm.ambient.curvature != c_required:
        raise PreconditionError(
            f"identity {name!r} needs ambient kind {kind} with curvature "
            f"{c_required:g}; surface {imm.name!r} sits in {imm.ambient.describe()}"
        )
    if sample is None:
        sample = sample_surface(imm, grid, domain)
    if not sample.minimal:
        raise PreconditionError(
            f"surface {imm.name!r} is not minimal: max |H2| = "
            f"{float(np.max(np.abs(sample.H2))):.3g}, max |H| = "
            f"{float(np.max(sample.H_norm)):.3g}"
        )
    max_defect = float(np.max(sample.defect))
    if max_defect > EQUALITY_TOL:
        raise PreconditionError(
            f"surface {imm.name!r} does not satisfy the equality case: "
            f"max defect = {max_defect:.3g}"
        )
    label = {1.0: "ln(K+1)", 0.0: "ln(K)", -1.0: "ln(K-1)"}[shift]
    try:
        values = _log_field(sample.K, shift, sample, label)
    except FieldDomainError as exc:
        raise PreconditionError(str(exc)) from exc
    lnf = sample.grid_field(values, label)
    base = intrinsic_laplacian(lnf, threshold)
    kd = sample.kd_equality_signed()
    rhs_full = 2.0 * (2.0 * sample.K - kd)
    rhs = rhs_full[2:-2, 2:-2]
    residual = base.laplacian - rhs
    return LaplacianReport(
        quantity=f"{label} identity ({name})",
        domain=base.domain,
        nx=base.nx,
        ny=base.ny,
        margin=base.margin,
        laplacian=base.laplacian,
        lhs=base.laplacian,
        rhs=rhs,
        residual=residual,
        threshold=threshold,
    )


def convergence_ratios(
    imm: Immersion,
    which: str,
    grids: tuple[int, ...] = (17, 33, 65),
    domain: DomainRect | None = None,
    floor: float = 1e-10,
) -> list[float]:
    """Residual-decay ratios of the identity check under grid refinement.

    Second-order stencils should give ratios near 4 when each grid halves
    the spacing.  Residuals are compared on the region interior to the
    coarsest grid's stencil margin, so refinement does not pull nodes
    closer to the boundary where higher derivatives may be larger.
    Residuals below the floor are roundoff-dominated and report a neutral
    ratio of 4.
    """
    dom = domain or imm.domain
    coarsest = min(grids)
    pad_s = 2.0 * (dom.s1 - dom.s0) / (coarsest - 1)
    pad_t = 2.0 * (dom.t1 - dom.t0) / (coarsest - 1)
    residuals = []
    for n in grids:
        report = verify_identity(imm, which, grid=(n, n), domain=dom)
        ss, ts = dom.grid(n, n)
        inner_s = ss[2:-2]
        inner_t = ts[2:-2]
        mask_s = (inner_s >= dom.s0 + pad_s - 1e-12) & (inner_s <= dom.s1 - pad_s + 1e-12)
        mask_t = (inner_t >= dom.t0 + pad_t - 1e-12) & (inner_t <= dom.t1 - pad_t + 1e-12)
        region = report.residual[np.ix_(mask_s, mask_t)]
        residuals.append(float(np.max(np.abs(region))))
    ratios = []
    for coarse, fine in zip(residuals, residuals[1:]):
        if coarse < floor and fine < floor:
            ratios.append(4.0)
        else:
            ratios.append(coarse / max(fine, 1e-300))
    return ratios


# -- serialization -------------------------------------------------------


def grid_to_csv(f: GridField) -> str:
    """CSV with one row per node: s, t, value, E, F, G (round-trip exact)."""
    ss, ts = f.node_coords()
    buf = io.StringIO()
    buf.write("s,t,value,E,F,G\n")
    for i in range(f.nx):
        for j in range(f.ny):
            row = (ss[i], ts[j], f.values[i, j], f.E[i, j], f.F[i, j], f.G[i, j])
            buf.write(",".join(repr(float(x)) for x in row) + "\n")
    return buf.getvalue()


def grid_from_csv(text: str) -> GridField:
    lines = [ln for ln in text.strip().splitlines() if ln]
    if not lines or lines[0] != "s,t,value,E,F,G":
        raise InputMismatchError("not a grid CSV: missing 's,t,value,E,F,G' header")
    rows = [[float(x) for x in ln.split(",")] for ln in lines[1:]]
    data = np.array(rows)
    s_vals = data[:, 0]
    ny = int(np.argmax(s_vals != s_vals[0])) or len(s_vals)
    nx = len(rows) // ny
    if nx * ny != len(rows):
        raise InputMismatchError("grid CSV is not a full rectangular grid")
    dom = DomainRect(s_vals[0], s_vals[-1], data[0, 1], data[ny - 1, 1])
    def shaped(k):
        return data[:, k].reshape(nx, ny)
    return GridField(dom, nx, ny, shaped(2), shaped(3), shaped(4), shaped(5))


def grid_to_json(f: GridField) -> str:
    payload = {
        "quantity": f.quantity,
        "domain": list(f.domain.as_tuple()),
        "nx": f.nx,
        "ny": f.ny,
        "values": f.values.tolist(),
        "E": f.E.tolist(),
        "F": f.F.tolist(),
        "G": f.G.tolist(),
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def grid_from_json(text: str) -> GridField:
    payload = json.loads(text)
    dom = DomainRect(*payload["domain"])
    return GridField(
        dom,
        payload["nx"],
        payload["ny"],
        np.array(payload["values"]),
        np.array(payload["E"]),
        np.array(payload["F"]),
        np.array(payload["G"]),
        payload.get("quantity", "value"),
    )
