"""Measures, multiplicative reweightings, integration and the Stieltjes map.

A measure is either atomic (points and positive weights) or a named weight
density with a quadrature recipe.  Reweightings are kept as a symbolic stack
of multipliers

    gauss_damp(alpha):  exp(-2*alpha*t^2)
    power_lift(n):      (1 + t^2)^n        (n may be negative)

applied lazily at evaluation points, so products of transforms stay exact
and the composition laws (alpha-additivity, power-lift inverses) hold
structurally.  A scalar ``scale`` accumulates normalization constants.

measure -> Jacobi conversion uses the discretized Stieltjes procedure on the
support points (Lanczos with the diagonal of the points, started from the
square-root weight vector, with full reorthogonalization), which is the
numerically benign route; the raw-moment Hankel route exists independently
in :mod:`momprob.moments` and the two are required to agree.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Tuple

import mpmath as mp

from .errors import (
    FiniteSupport,
    InfiniteMass,
    NonFinite,
    QuadratureFailure,
    ZeroMass,
)
from .jacobi import JacobiMatrix
from .precision import (
    DOUBLE,
    RATIONAL,
    PrecisionConfig,
    convert,
    format_number,
    pairwise_sum,
    to_fraction,
    to_mpf,
    wp,
)

REAL_LINE = "real_line"


@dataclass(frozen=True)
class Multiplier:
    """One entry of the transform stack."""

    form: str  # "gauss_damp" | "power_lift"
    param: object

    def __post_init__(self):
        if self.form == "gauss_damp":
            if not self.param >= 0:
                raise ValueError("gauss_damp exponent must be nonnegative")
        elif self.form == "power_lift":
            if not isinstance(self.param, int):
                raise ValueError("power_lift exponent must be an integer")
        else:
            raise ValueError(f"unknown multiplier form {self.form!r}")

    def value_at(self, t):
        """Multiplier value at a point, in the ambient mp precision."""
        if self.form == "gauss_damp":
            a = to_mpf(self.param)
            return mp.exp(-2 * a * t * t)
        return (1 + t * t) ** self.param

    def value_at_fraction(self, t: Fraction):
        if self.form == "gauss_damp":
            raise ValueError("gaussian damping is not rational-valued")
        return (1 + t * t) ** self.param

    def to_json(self):
        return {self.form: format_number(self.param)}


def _merge_stack(stack, mult: Multiplier):
    """Append a multiplier, merging with a same-form neighbor exactly."""
    stack = list(stack)
    if stack and stack[-1].form == mult.form:
        last = stack.pop()
        if mult.form == "gauss_damp":
            merged = Multiplier("gauss_damp", last.param + mult.param)
        else:
            merged = Multiplier("power_lift", last.param + mult.param)
        if merged.form == "power_lift" and merged.param == 0:
            return tuple(stack)
        if merged.form == "gauss_damp" and merged.param == 0:
            return tuple(stack)
        stack.append(merged)
        return tuple(stack)
    if mult.form == "power_lift" and mult.param == 0:
        return tuple(stack)
    if mult.form == "gauss_damp" and mult.param == 0:
        return tuple(stack)
    stack.append(mult)
    return tuple(stack)


@dataclass(frozen=True)
class QuadratureSpec:
    """How to integrate a density: Gauss nodes of a reference matrix, or
    adaptive quadrature with an error budget."""

    rule: str  # "gauss_from_jacobi" | "adaptive"
    reference: Optional[JacobiMatrix] = None
    n_nodes: int = 40
    max_subdiv: int = 10
    tol: float = 1e-20

    def __post_init__(self):
        if self.rule == "gauss_from_jacobi":
            if self.reference is None:
                raise ValueError("gauss_from_jacobi needs a reference matrix")
            if self.n_nodes < 1:
                raise ValueError("n_nodes must be positive")
        elif self.rule == "adaptive":
            if self.tol <= 0:
                raise ValueError("tol must be positive")
        else:
            raise ValueError(f"unknown quadrature rule {self.rule!r}")


_WEIGHTS = {}


def register_weight(name: str, fn: Callable, support):
    _WEIGHTS[name] = (fn, support)


def weight_function(name: str):
    if name not in _WEIGHTS:
        raise ValueError(f"unknown weight {name!r} (have: {sorted(_WEIGHTS)})")
    return _WEIGHTS[name]


register_weight("gaussian", lambda t: mp.exp(-t * t) / mp.sqrt(mp.pi), REAL_LINE)
register_weight(
    "std_normal", lambda t: mp.exp(-t * t / 2) / mp.sqrt(2 * mp.pi), REAL_LINE
)
register_weight(
    "lognormal-density",
    lambda t: mp.exp(-mp.log(t) ** 2 / 2) / (t * mp.sqrt(2 * mp.pi)) if t > 0 else mp.mpf(0),
    (0, mp.inf),
)


class Measure(object):
    """Immutable finite measure with a lazy multiplicative transform stack."""

    __slots__ = ("kind", "points", "weights", "weight_name", "support",
                 "quadrature", "transforms", "scale", "precision", "_atoms")

    def __init__(self, kind, points=None, weights=None, weight_name=None,
                 support=None, quadrature=None, transforms=(), scale=1,
                 precision=None):
        self.kind = kind
        self.precision = precision if precision is not None else PrecisionConfig()
        self.transforms = tuple(transforms)
        self.scale = scale
        self._atoms = None
        if kind == "atomic":
            pts = tuple(points)
            wts = tuple(weights)
            if len(pts) != len(wts) or not pts:
                raise ValueError("atomic measure needs matching nonempty points/weights")
            for w in wts:
                if not w > 0:
                    raise ValueError("atomic weights must be strictly positive")
            for a, b in zip(pts, pts[1:]):
                if not a < b:
                    raise ValueError("atomic points must be strictly increasing")
            self.points, self.weights = pts, wts
            self.weight_name, self.support, self.quadrature = None, None, None
        elif kind == "density":
            if weight_name is None or quadrature is None:
                raise ValueError("density measure needs a weight name and quadrature")
            weight_function(weight_name)  # validate the name now
            self.weight_name = weight_name
            self.support = support if support is not None else REAL_LINE
            self.quadrature = quadrature
            self.points, self.weights = None, None
        else:
            raise ValueError(f"unknown measure kind {kind!r}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def atomic(cls, points, weights, precision=None) -> "Measure":
        return cls("atomic", points=points, weights=weights, precision=precision)

    @classmethod
    def density(cls, weight_name, quadrature: QuadratureSpec, support=None,
                precision=None) -> "Measure":
        return cls("density", weight_name=weight_name, support=support,
                   quadrature=quadrature, precision=precision)

    def _replace(self, **kw) -> "Measure":
        base = dict(
            kind=self.kind, points=self.points, weights=self.weights,
            weight_name=self.weight_name, support=self.support,
            quadrature=self.quadrature, transforms=self.transforms,
            scale=self.scale, precision=self.precision,
        )
        base.update(kw)
        out = Measure(**base)
        # base support atoms are transform-independent; share the cache
        out._atoms = self._atoms
        return out

    # -- support atoms -------------------------------------------------------

    def base_atoms(self):
        """Support points and base weights (before transforms and scale).

        For a density measure these are the Gauss nodes/weights of the
        reference matrix; adaptive-rule densities have no atoms.
        """
        if self.kind == "atomic":
            return self.points, self.weights
        if self.quadrature.rule != "gauss_from_jacobi":
            return None
        if self._atoms is None:
            spectrum = _gauss_atoms(self.quadrature, self.precision)
            object.__setattr__(self, "_atoms", spectrum)
        return self._atoms

    def effective_atoms(self):
        """Atoms with the transform stack and scale applied to the weights."""
        base = self.base_atoms()
        if base is None:
            return None
        pts, wts = base
        cfg = self.precision
        if cfg.mode == RATIONAL and self._stack_is_rational():
            out = []
            for t, w in zip(pts, wts):
                f = to_fraction(w) * self._stack_value_fraction(to_fraction(t))
                out.append(f * to_fraction(self.scale))
            return pts, tuple(out)
        with wp(cfg.working_bits() + 16):
            sc = to_mpf(self.scale)
            out = []
            for t, w in zip(pts, wts):
                tt = to_mpf(t)
                v = to_mpf(w) * sc
                for m in self.transforms:
                    v = v * m.value_at(tt)
                out.append(v)
        return pts, tuple(out)

    def _stack_is_rational(self):
        return all(m.form == "power_lift" for m in self.transforms)

    def _stack_value_fraction(self, t: Fraction):
        v = Fraction(1)
        for m in self.transforms:
            v *= m.value_at_fraction(t)
        return v

    # -- integration ---------------------------------------------------------

    def integrate(self, f: Callable):
        """Integral of ``f`` against the measure (stack and scale included)."""
        cfg = self.precision
        atoms = self.base_atoms()
        if atoms is not None:
            pts, wts = self.effective_atoms()
            if cfg.mode == RATIONAL and self._stack_is_rational():
                try:
                    return pairwise_sum([w * f(t) for t, w in zip(pts, wts)])
                except TypeError:
                    pass  # integrand not rational-valued; fall through to floats
            with wp(cfg.working_bits() + 16):
                vals = [to_mpf(w) * f(to_mpf(t)) for t, w in zip(pts, wts)]
                for v in vals:
                    if not mp.isfinite(v):
                        raise NonFinite("integrand not finite at a support point")
                total = pairwise_sum(vals)
            with wp(cfg.working_bits()):
                return +total
        return self._integrate_adaptive(f)

    def _integrate_adaptive(self, f: Callable):
        cfg = self.precision
        wfn, support = weight_function(self.weight_name)
        if self.support is not None and self.support != REAL_LINE:
            support = self.support
        if support == REAL_LINE:
            interval = [-mp.inf, mp.inf]
        else:
            interval = [support[0], support[1]]
        sc = self.scale
        transforms = self.transforms

        def g(t):
            v = wfn(t) * to_mpf(sc)
            for m in transforms:
                v = v * m.value_at(t)
            return v * f(t)

        spec = self.quadrature
        with wp(cfg.working_bits() + 16):
            val, err = mp.quad(g, interval, error=True, maxdegree=spec.max_subdiv)
            if not mp.isfinite(val):
                raise NonFinite("adaptive quadrature produced a non-finite value")
            if err > mp.mpf(spec.tol) * (1 + abs(val)):
                raise QuadratureFailure(
                    f"error estimate {mp.nstr(err, 5)} exceeds budget {spec.tol}"
                )
        with wp(cfg.working_bits()):
            return +val

    def total_mass(self):
        return self.integrate(lambda t: 1)

    def moments(self, m: int):
        """Power moments s_0..s_m of the measure (stack and scale included)."""
        atoms = self.effective_atoms()
        cfg = self.precision
        if atoms is None:
            return [self.integrate(lambda t, k=k: t ** k) for k in range(m + 1)]
        pts, wts = atoms
        if cfg.mode == RATIONAL and self._stack_is_rational() and all(
            isinstance(x, (int, Fraction)) for x in list(pts) + list(wts)
        ):
            out = []
            powers = [Fraction(1)] * len(pts)
            pts_f = [to_fraction(t) for t in pts]
            for k in range(m + 1):
                out.append(pairwise_sum([w * p for w, p in zip(wts, powers)]))
                powers = [p * t for p, t in zip(powers, pts_f)]
            return out
        with wp(cfg.working_bits() + 16):
            pts_f = [to_mpf(t) for t in pts]
            wts_f = [to_mpf(w) for w in wts]
            powers = [mp.mpf(1)] * len(pts_f)
            out = []
            for k in range(m + 1):
                out.append(pairwise_sum([w * p for w, p in zip(wts_f, powers)]))
                powers = [p * t for p, t in zip(powers, pts_f)]
        with wp(cfg.working_bits()):
            return [+x for x in out]

    # -- normalization and transforms ----------------------------------------

    def normalize(self) -> Tuple["Measure", object]:
        """Rescale to unit mass; returns (measure, previous total mass)."""
        mass = self.total_mass()
        if isinstance(mass, Fraction):
            if mass == 0:
                raise ZeroMass("measure has zero total mass")
            new_scale = to_fraction(self.scale) / mass
        else:
            with wp(self.precision.working_bits() + 16):
                mv = to_mpf(mass)
                if not mp.isfinite(mv):
                    raise InfiniteMass("total mass is not finite")
                if mv <= 0:
                    raise ZeroMass("measure has nonpositive total mass")
                new_scale = to_mpf(self.scale) / mv
        return self._replace(scale=new_scale), mass

    def gauss_damp(self, alpha) -> "Measure":
        """Multiply by exp(-2*alpha*t^2) and renormalize.

        Damping by alpha1 then alpha2 merges exactly into alpha1 + alpha2 on
        the stack, so the composition law holds structurally.
        """
        cfg = self.precision
        if cfg.mode == RATIONAL:
            a = to_fraction(alpha)
        else:
            with wp(cfg.working_bits()):
                a = to_mpf(alpha)
        if a < 0:
            raise ValueError("damping exponent must be nonnegative")
        if a == 0:
            return self
        out = self._replace(transforms=_merge_stack(self.transforms, Multiplier("gauss_damp", a)))
        normalized, _ = out.normalize()
        return normalized

    def power_reweight(self, n: int) -> Tuple["Measure", object]:
        """Multiply by (1+t^2)^n, renormalize; returns (measure, mass C).

        Negative ``n`` is always integrable; positive ``n`` needs the lifted
        mass to stay finite, which is checked by the normalization.
        """
        if not isinstance(n, int):
            raise ValueError("power exponent must be an integer")
        if n == 0:
            return self, _one_like(self)
        out = self._replace(transforms=_merge_stack(self.transforms, Multiplier("power_lift", n)))
        return out.normalize()

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        cfg = self.precision
        obj = {"kind": self.kind}
        if self.kind == "atomic":
            obj["points"] = [format_number(x, cfg) for x in self.points]
            obj["weights"] = [format_number(x, cfg) for x in self.weights]
        else:
            obj["weight"] = self.weight_name
            obj["support"] = (
                REAL_LINE if self.support == REAL_LINE
                else [format_number(x, cfg) for x in self.support]
            )
            q = self.quadrature
            if q.rule == "gauss_from_jacobi":
                ref = {"family": q.reference.family} if q.reference.family else q.reference.to_json()
                obj["quadrature"] = {"rule": q.rule, "reference": ref, "n_nodes": q.n_nodes}
            else:
                obj["quadrature"] = {"rule": q.rule, "max_subdiv": q.max_subdiv, "tol": q.tol}
        if self.transforms:
            obj["transforms"] = [m.to_json() for m in self.transforms]
        if self.scale != 1:
            obj["scale"] = format_number(self.scale, cfg)
        obj["precision"] = cfg.to_json()
        return obj

    @classmethod
    def from_json(cls, obj: dict, precision: Optional[PrecisionConfig] = None) -> "Measure":
        from . import families

        cfg = precision
        if cfg is None and "precision" in obj:
            cfg = PrecisionConfig.from_json(obj["precision"])
        if cfg is None:
            cfg = PrecisionConfig()
        kind = obj.get("kind")
        transforms = []
        for item in obj.get("transforms", ()):
            if "gauss_damp" in item:
                transforms.append(Multiplier("gauss_damp", convert(item["gauss_damp"], cfg)))
            elif "power_lift" in item:
                transforms.append(Multiplier("power_lift", int(item["power_lift"])))
            else:
                raise ValueError(f"unknown transform entry {item!r}")
        scale = convert(obj.get("scale", 1), cfg)
        if kind == "atomic":
            pts = [convert(x, cfg) for x in obj["points"]]
            wts = [convert(x, cfg) for x in obj["weights"]]
            return cls("atomic", points=pts, weights=wts, transforms=transforms,
                       scale=scale, precision=cfg)
        if kind == "density":
            qobj = obj.get("quadrature", {"rule": "adaptive"})
            if qobj.get("rule") == "gauss_from_jacobi":
                refobj = qobj.get("reference", {})
                if "family" in refobj and not refobj.get("q"):
                    ref = families.make(refobj["family"], precision=cfg, n=refobj.get("n"))
                else:
                    ref = JacobiMatrix.from_json(refobj, precision=cfg)
                spec = QuadratureSpec("gauss_from_jacobi", reference=ref,
                                      n_nodes=int(qobj.get("n_nodes", 40)))
            else:
                spec = QuadratureSpec("adaptive",
                                      max_subdiv=int(qobj.get("max_subdiv", 10)),
                                      tol=float(qobj.get("tol", 1e-20)))
            support = obj.get("support", REAL_LINE)
            if support != REAL_LINE:
                support = tuple(convert(x, cfg) for x in support)
            return cls("density", weight_name=obj["weight"], support=support,
                       quadrature=spec, transforms=transforms, scale=scale,
                       precision=cfg)
        raise ValueError(f"unknown measure kind {kind!r}")


def _one_like(mu: Measure):
    if mu.precision.mode == RATIONAL:
        return Fraction(1)
    if mu.precision.mode == DOUBLE:
        return 1.0
    return mp.mpf(1)


def _gauss_atoms(spec: QuadratureSpec, cfg: PrecisionConfig):
    from . import tridiag

    N = spec.n_nodes
    q, b = spec.reference.coefficients(N)
    bits = cfg.working_bits()
    nodes, weights = tridiag.gauss_rule(q, b, bits)
    return tuple(nodes), tuple(weights)


# ---------------------------------------------------------------------------
# module-level operation wrappers (the functional surface of the module)


def integrate(mu: Measure, f: Callable):
    return mu.integrate(f)


def normalize(mu: Measure):
    return mu.normalize()


def gauss_damp(mu: Measure, alpha):
    return mu.gauss_damp(alpha)


def power_reweight(mu: Measure, n: int):
    return mu.power_reweight(n)


def moments_of(mu: Measure, m: int):
    return mu.moments(m)


def measure_to_jacobi(mu: Measure, n: int, partial: bool = False) -> JacobiMatrix:
    """Recurrence coefficients of the measure's orthonormal polynomials.

    Discretized Stieltjes procedure: Lanczos with the diagonal matrix of the
    support points, started from the square-root weight vector, with two
    passes of classical Gram-Schmidt reorthogonalization per step (Krylov
    vectors of nearby orthogonal polynomials are highly collinear).  In
    rational mode the monic recurrence runs exactly instead.

    With ``partial=True``, exhausted support truncates the output at the
    deepest resolvable level instead of raising FiniteSupport.
    """
    if n < 1:
        raise ValueError("n must be positive")
    atoms = mu.effective_atoms()
    if atoms is None:
        raise QuadratureFailure(
            "measure->Jacobi needs discrete support (atomic measure or a "
            "gauss_from_jacobi quadrature recipe)"
        )
    pts, wts = atoms
    if len(pts) < n:
        if not partial:
            raise FiniteSupport(
                f"{len(pts)} support points cannot carry {n} recurrence levels"
            )
        n = len(pts)
    cfg = mu.precision
    if cfg.mode == RATIONAL and all(isinstance(x, (int, Fraction)) for x in list(pts) + list(wts)):
        return _stieltjes_rational(pts, wts, n, cfg, partial)
    return _stieltjes_float(pts, wts, n, cfg, partial)


def _stieltjes_rational(pts, wts, n, cfg, partial=False):
    from .precision import sqrt_number

    t = [to_fraction(p) for p in pts]
    w = [to_fraction(x) for x in wts]
    total = sum(w)
    w = [x / total for x in w]
    # monic three-term recurrence, exact
    p_prev = [Fraction(0)] * len(t)
    p_cur = [Fraction(1)] * len(t)
    nrm_prev = Fraction(0)
    nrm_cur = Fraction(1)
    q_out, b2_out = [], []
    for k in range(n):
        tp = [ti * pi for ti, pi in zip(t, p_cur)]
        a = sum(wi * tpi * pi for wi, tpi, pi in zip(w, tp, p_cur)) / nrm_cur
        q_out.append(a)
        if k == n - 1:
            break
        beta = nrm_cur / nrm_prev if k > 0 else Fraction(0)
        nxt = [
            tpi - a * pi - (beta * ppi if k > 0 else Fraction(0))
            for tpi, pi, ppi in zip(tp, p_cur, p_prev)
        ]
        nrm_next = sum(wi * xi * xi for wi, xi in zip(w, nxt))
        if nrm_next == 0:
            if partial:
                break
            raise FiniteSupport(
                f"support exhausted at level {k + 1}: off-diagonal would vanish"
            )
        b2_out.append(nrm_next / nrm_cur)
        p_prev, p_cur = p_cur, nxt
        nrm_prev, nrm_cur = nrm_cur, nrm_next
    b_out = [sqrt_number(x, cfg) for x in b2_out]
    return JacobiMatrix(q=q_out[: len(b_out) + 1], b=b_out, precision=cfg)


def _stieltjes_float(pts, wts, n, cfg, partial=False):
    bits = cfg.working_bits()
    guard = bits + 32
    with wp(guard):
        t = [to_mpf(p) for p in pts]
        w = [to_mpf(x) for x in wts]
        total = mp.fsum(w)
        if not total > 0:
            raise ZeroMass("measure has nonpositive mass on its support")
        floor2 = mp.mpf(2) ** (-2 * bits)
        v = [mp.sqrt(x / total) for x in w]
        basis = [v]
        q_out, b_out = [], []
        for k in range(n):
            u = [ti * vi for ti, vi in zip(t, basis[k])]
            qk = mp.fsum(ui * vi for ui, vi in zip(u, basis[k]))
            q_out.append(qk)
            if k == n - 1:
                break
            # two passes of classical Gram-Schmidt against the whole basis
            for _ in range(2):
                for col in basis:
                    c = mp.fsum(ui * ci for ui, ci in zip(u, col))
                    u = [ui - c * ci for ui, ci in zip(u, col)]
            nrm2 = mp.fsum(ui * ui for ui in u)
            if not nrm2 > floor2:
                if partial:
                    break
                raise FiniteSupport(
                    f"support numerically exhausted at level {k + 1}: "
                    "residual norm below resolvable size"
                )
            bk = mp.sqrt(nrm2)
            b_out.append(bk)
            basis.append([ui / bk for ui in u])
        q_out = q_out[: len(b_out) + 1]
    if cfg.mode == DOUBLE:
        return JacobiMatrix(
            q=[float(x) for x in q_out], b=[float(x) for x in b_out], precision=cfg
        )
    with wp(bits):
        return JacobiMatrix(q=[+x for x in q_out], b=[+x for x in b_out], precision=cfg)
