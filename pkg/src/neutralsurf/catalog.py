"""Built-in immersions and the jet-valued evaluation interface.

Every entry evaluates to a JetPoint: the ambient coordinates of the map
together with their first and second partials at the requested parameter
point.  Construction validates space-likeness on a 33x33 sample of the
default domain; non-space-like parameter choices are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ambient import AmbientSpace, DomainRect
from .errors import DegeneracyError, InputMismatchError
from .expr import SurfaceDefinition, eval_numeric, eval_on_jets, parse_expression
from .jets import Jet2, jcosh, jexp, jsinh, seed
from .pseudo_linalg import PVector

_SQRT3 = math.sqrt(3.0)
_VALIDATION_GRID = 33


@dataclass(frozen=True)
class JetPoint:
    """Ambient coordinates of an immersion with partials at one (s,t)."""

    ambient: AmbientSpace
    components: tuple

    def _vector(self, attr: str) -> PVector:
        vals = np.array([getattr(c, attr) for c in self.components])
        return PVector(vals, self.ambient.signature)

    def position(self) -> PVector:
        return self._vector("val")

    def velocity_s(self) -> PVector:
        return self._vector("d_s")

    def velocity_t(self) -> PVector:
        return self._vector("d_t")

    def accel_ss(self) -> PVector:
        return self._vector("d_ss")

    def accel_st(self) -> PVector:
        return self._vector("d_st")

    def accel_tt(self) -> PVector:
        return self._vector("d_tt")


@dataclass(frozen=True)
class MetricCoeffs:
    """First fundamental form coefficients E, F, G at a point."""

    E: float
    F: float
    G: float

    @property
    def det(self) -> float:
        return self.E * self.G - self.F * self.F

    @property
    def positive_definite(self) -> bool:
        return self.E > 0.0 and self.det > 0.0


@dataclass(frozen=True)
class Immersion:
    name: str
    ambient: AmbientSpace
    evaluator: Callable[[float, float], JetPoint]
    domain: DomainRect
    params: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)

    def evaluate(self, s: float, t: float) -> JetPoint:
        return self.evaluator(float(s), float(t))


def induced_metric(imm: Immersion, p: tuple[float, float], check: bool = True) -> MetricCoeffs:
    """E, F, G of the induced metric at p; degeneracy error if not space-like."""
    jp = imm.evaluate(*p)
    vs, vt = jp.velocity_s(), jp.velocity_t()
    m = MetricCoeffs(vs.inner(vs), vs.inner(vt), vt.inner(vt))
    if check and not m.positive_definite:
        raise DegeneracyError(
            f"surface {imm.name!r} is not space-like at (s,t)={p}: "
            f"E={m.E:.6g}, EG-F^2={m.det:.6g}"
        )
    return m


def check_membership(imm: Immersion, points: list[tuple[float, float]]) -> float:
    """Max over points of |<x,x> - 1/c| for a non-flat ambient."""
    if imm.ambient.is_flat:
        raise InputMismatchError("membership check only applies to non-flat ambients")
    target = imm.ambient.membership_target
    worst = 0.0
    for p in points:
        x = imm.evaluate(*p).position()
        worst = max(worst, abs(x.inner(x) - target))
    return worst


def _validate_spacelike(imm: Immersion, n: int = _VALIDATION_GRID) -> bool:
    ss, ts = imm.domain.grid(n, n)
    for s in ss:
        for t in ts:
            m = induced_metric(imm, (s, t), check=False)
            if not m.positive_definite:
                return False
    return True


def _require_spacelike(imm: Immersion) -> Immersion:
    if not _validate_spacelike(imm):
        raise DegeneracyError(
            f"surface {imm.name!r} is not space-like on its domain"
        )
    return imm


# -- built-in surfaces -------------------------------------------------


def _phi_h42_eval(ambient: AmbientSpace) -> Callable[[float, float], JetPoint]:
    def evaluate(s: float, t: float) -> JetPoint:
        js, jt = seed(s, t)
        u = (2.0 / _SQRT3) * js
        sh = jsinh(u)
        ex = jexp(u)
        t2 = jt * jt
        t3 = t2 * jt
        t4 = t2 * t2
        c1 = sh - t2 * (1.0 / 3.0) - (7.0 / 8.0 + t4 * (1.0 / 18.0)) * ex
        c2 = jt + (t3 * (1.0 / 3.0) - jt * 0.25) * ex
        c3 = 0.5 + t2 * 0.5 * ex
        c4 = jt + (t3 * (1.0 / 3.0) + jt * 0.25) * ex
        c5 = sh - t2 * (1.0 / 3.0) - (1.0 / 8.0 + t4 * (1.0 / 18.0)) * ex
        return JetPoint(ambient, (c1, c2, c3, c4, c5))

    return evaluate


def _build_phi_h42(params: dict) -> Immersion:
    _reject_params("phi_h42", params)
    ambient = AmbientSpace.pseudo_hyperbolic(-1.0)
    return Immersion(
        name="phi_h42",
        ambient=ambient,
        evaluator=_phi_h42_eval(ambient),
        domain=DomainRect(-1.0, 1.0, -1.0, 1.0),
        expected={
            "K": -1.0 / 3.0,
            "KD": -2.0 / 3.0,
            "H2": 0.0,
            "minimal": True,
            "equality": True,
        },
    )


def _flat_l_eval(ambient: AmbientSpace) -> Callable[[float, float], JetPoint]:
    r = 1.0 / math.sqrt(2.0)

    def evaluate(s: float, t: float) -> JetPoint:
        js, jt = seed(s, t)
        zero = Jet2.constant(0.0)
        return JetPoint(
            ambient,
            (r * jcosh(js), r * jcosh(jt), zero, r * jsinh(js), r * jsinh(jt)),
        )

    return evaluate


def _build_flat_l(params: dict) -> Immersion:
    _reject_params("flat_L", params)
    ambient = AmbientSpace.pseudo_hyperbolic(-1.0)
    # K = KD = H2 = 0 with c = -1, so K + KD sits strictly above H2 + c:
    # this surface never achieves equality (its defect is identically 1)
    return Immersion(
        name="flat_L",
        ambient=ambient,
        evaluator=_flat_l_eval(ambient),
        domain=DomainRect(-1.0, 1.0, -1.0, 1.0),
        expected={"K": 0.0, "KD": 0.0, "H2": 0.0, "minimal": True, "equality": False},
    )


def _geodesic_eval(ambient: AmbientSpace) -> Callable[[float, float], JetPoint]:
    def evaluate(s: float, t: float) -> JetPoint:
        js, jt = seed(s, t)
        zero = Jet2.constant(0.0)
        cs, ss_ = jcosh(js), jsinh(js)
        ct, st = jcosh(jt), jsinh(jt)
        return JetPoint(ambient, (cs * ct, zero, zero, cs * st, ss_))

    return evaluate


def _build_totally_geodesic(params: dict) -> Immersion:
    _reject_params("totally_geodesic_h42", params)
    ambient = AmbientSpace.pseudo_hyperbolic(-1.0)
    return Immersion(
        name="totally_geodesic_h42",
        ambient=ambient,
        evaluator=_geodesic_eval(ambient),
        domain=DomainRect(-1.0, 1.0, -1.0, 1.0),
        expected={
            "K": -1.0,
            "KD": 0.0,
            "H2": 0.0,
            "minimal": True,
            "equality": True,
            "totally_geodesic": True,
        },
    )


def _poly_coeffs_from_param(f) -> np.ndarray:
    """Polynomial coefficients of f(z), lowest degree first."""
    if isinstance(f, str):
        ast = parse_expression(f, variables=("z",))
        z = np.polynomial.Polynomial([0.0, 1.0])
        value = eval_numeric(ast, {"z": z})
        if not isinstance(value, np.polynomial.Polynomial):
            value = np.polynomial.Polynomial([complex(value)])
        return np.asarray(value.coef, dtype=complex)
    coeffs = np.asarray(list(f), dtype=complex)
    if coeffs.ndim != 1 or coeffs.size == 0:
        raise InputMismatchError("polynomial coefficients must be a non-empty sequence")
    return coeffs


def _holomorphic_eval(
    ambient: AmbientSpace, coeffs: np.ndarray
) -> Callable[[float, float], JetPoint]:
    # complex jets as (re, im) pairs; Horner evaluation of f(s + i t)
    def evaluate(s: float, t: float) -> JetPoint:
        js, jt = seed(s, t)
        acc_re = Jet2.constant(coeffs[-1].real)
        acc_im = Jet2.constant(coeffs[-1].imag)
        for c in coeffs[-2::-1]:
            acc_re, acc_im = (
                acc_re * js - acc_im * jt + c.real,
                acc_re * jt + acc_im * js + c.imag,
            )
        return JetPoint(ambient, (js, jt, acc_re, acc_im))

    return evaluate


def _build_holomorphic_graph(params: dict) -> Immersion:
    params = dict(params)
    f = params.pop("f", None)
    domain = params.pop("domain", None)
    _reject_params("holomorphic_graph", params)
    if f is None:
        raise InputMismatchError("holomorphic_graph requires parameter 'f' (polynomial in z)")
    coeffs = _poly_coeffs_from_param(f)
    ambient = AmbientSpace.flat()
    if domain is None:
        domain = DomainRect(1.2, 2.0, 0.5, 1.5)
    imm = Immersion(
        name="holomorphic_graph",
        ambient=ambient,
        evaluator=_holomorphic_eval(ambient, coeffs),
        domain=domain,
        params={"f": f if isinstance(f, str) else [complex(c) for c in coeffs]},
        expected={"H2": 0.0, "minimal": True, "equality": True},
    )
    return _require_spacelike(imm)


def _umbilical_eval(
    ambient: AmbientSpace, radius: float
) -> Callable[[float, float], JetPoint]:
    def evaluate(s: float, t: float) -> JetPoint:
        js, jt = seed(s, t)
        zero = Jet2.constant(0.0)
        cs, ss_ = jcosh(js), jsinh(js)
        ct, st = jcosh(jt), jsinh(jt)
        return JetPoint(ambient, (zero, radius * cs * ct, radius * ss_, radius * cs * st))

    return evaluate


def _build_umbilical_flat(params: dict) -> Immersion:
    params = dict(params)
    radius = float(params.pop("radius", 1.0))
    _reject_params("umbilical_flat", params)
    if radius <= 0:
        raise InputMismatchError("umbilical_flat radius must be positive")
    ambient = AmbientSpace.flat()
    k = -1.0 / (radius * radius)
    return Immersion(
        name="umbilical_flat",
        ambient=ambient,
        evaluator=_umbilical_eval(ambient, radius),
        domain=DomainRect(-1.0, 1.0, -1.0, 1.0),
        params={"radius": radius},
        expected={"K": k, "KD": 0.0, "H2": k, "equality": True, "umbilical": True},
    )


_MONOMIALS = [(i, j) for total in range(4) for i in range(total + 1) for j in [total - i]]


def _random_poly_eval(
    ambient: AmbientSpace, coeff_p: np.ndarray, coeff_q: np.ndarray
) -> Callable[[float, float], JetPoint]:
    def evaluate(s: float, t: float) -> JetPoint:
        js, jt = seed(s, t)
        # monomial jets s^i t^j, shared between the two perturbations
        p = Jet2.constant(0.0)
        q = Jet2.constant(0.0)
        for (i, j), cp, cq in zip(_MONOMIALS, coeff_p, coeff_q):
            mono = (js ** i) * (jt ** j)
            p = p + cp * mono
            q = q + cq * mono
        return JetPoint(ambient, (p, q, js, jt))

    return evaluate


def _build_random_polynomial(params: dict) -> Immersion:
    params = dict(params)
    seed_value = int(params.pop("seed", 0))
    amplitude = float(params.pop("amplitude", 0.1))
    _reject_params("random_polynomial", params)
    if not 0 < amplitude <= 0.1:
        raise InputMismatchError("random_polynomial amplitude must be in (0, 0.1]")
    ambient = AmbientSpace.flat()
    rng = np.random.default_rng(seed_value)
    domain = DomainRect(-0.5, 0.5, -0.5, 0.5)
    for _ in range(100):
        coeff_p = rng.uniform(-amplitude, amplitude, size=len(_MONOMIALS))
        coeff_q = rng.uniform(-amplitude, amplitude, size=len(_MONOMIALS))
        imm = Immersion(
            name="random_polynomial",
            ambient=ambient,
            evaluator=_random_poly_eval(ambient, coeff_p, coeff_q),
            domain=domain,
            params={"seed": seed_value, "amplitude": amplitude},
        )
        if _validate_spacelike(imm):
            return imm
    raise DegeneracyError(
        f"random_polynomial seed={seed_value}: no space-like sample in 100 tries"
    )


def _reject_params(name: str, params: dict) -> None:
    if params:
        raise InputMismatchError(f"{name} does not accept parameters {sorted(params)}")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    builder: Callable[[dict], Immersion]
    param_schema: str
    note: str


_CATALOG = [
    CatalogEntry(
        "phi_h42",
        _build_phi_h42,
        "none",
        "minimal immersion of the hyperbolic plane of curvature -1/3 into the "
        "pseudo-hyperbolic 4-space of curvature -1; satisfies KD = 2K = -2/3",
    ),
    CatalogEntry(
        "flat_L",
        _build_flat_l,
        "none",
        "flat minimal product-of-hyperbolas surface in the pseudo-hyperbolic "
        "4-space; K = KD = 0",
    ),
    CatalogEntry(
        "totally_geodesic_h42",
        _build_totally_geodesic,
        "none",
        "totally geodesic hyperbolic plane in the pseudo-hyperbolic 4-space; "
        "K = -1, KD = 0",
    ),
    CatalogEntry(
        "holomorphic_graph",
        _build_holomorphic_graph,
        "f: polynomial in z (string like 'z^2/2' or coefficient list, low degree "
        "first); space-like where |f'(z)| > 1",
        "graph z -> (z, f(z)) of a holomorphic polynomial in the neutral 4-space "
        "with its standard complex structure; minimal with K = -KD",
    ),
    CatalogEntry(
        "umbilical_flat",
        _build_umbilical_flat,
        "radius: real > 0 (default 1)",
        "totally umbilical hyperbolic plane in the neutral 4-space (h "
        "proportional to the metric); non-minimal equality case",
    ),
    CatalogEntry(
        "random_polynomial",
        _build_random_polynomial,
        "seed: integer (default 0); amplitude: real in (0, 0.1] (default 0.1)",
        "random degree-<=3 polynomial perturbation of a space-like plane, "
        "resampled until space-like; generic strict-inequality witness",
    ),
]

_BY_NAME = {entry.name: entry for entry in _CATALOG}


def catalog_names() -> list[str]:
    return [entry.name for entry in _CATALOG]


def catalog_entries() -> list[CatalogEntry]:
    return list(_CATALOG)


def catalog_get(name: str, params: dict | None = None) -> Immersion:
    """Construct a built-in immersion by name."""
    entry = _BY_NAME.get(name)
    if entry is None:
        raise InputMismatchError(
            f"unknown surface {name!r}; available: {', '.join(catalog_names())}"
        )
    return entry.builder(dict(params or {}))


def from_definition(defn: SurfaceDefinition) -> Immersion:
    """Wrap a parsed surface definition as an evaluable immersion."""
    ambient = defn.ambient

    def evaluate(s: float, t: float) -> JetPoint:
        js, jt = seed(s, t)
        return JetPoint(ambient, tuple(eval_on_jets(c, js, jt) for c in defn.components))

    return Immersion(
        name=defn.name,
        ambient=ambient,
        evaluator=evaluate,
        domain=defn.domain,
    )
