"""Piecewise trigonometric function algebra on (-pi/2, pi/2).

Eigenfunctions, generalized eigenvectors and their duals are all finite
sums of {1, x, cos(kx+s), sin(kx+s), x cos(kx+s), x sin(kx+s)} on at most
two pieces cut at the restart point pi*a/2.  Keeping them symbolic gives

  * exact evaluation and differentiation,
  * inner products in closed form: a product of two terms reduces via
    product-to-sum identities to integrals of x^p cos(wx+d), p <= 2,
    which have elementary antiderivatives (with a series fallback for
    near-resonant w so cancellation never amplifies),
  * machine-precision verification targets that quadrature then has to
    reproduce, instead of quadrature error polluting both sides.

Sampled functions (GridFn) with composite Gauss-Lobatto weights cover the
operators where no closed form exists (resolvent kernels, SVD probes).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from jumpspec.param import ParamA

HALF_PI = math.pi / 2

_RESONANT = 1e-4  # |w| * max|x| below this: series antiderivative path


class OutOfDomain(ValueError):
    """Evaluation point outside [-pi/2, pi/2]."""


class QuadratureNotConverged(RuntimeError):
    """Adaptive panel refinement failed to reach the requested target."""


class Kind(enum.Enum):
    CONST = "const"
    LINEAR = "linear"
    COS = "cos"
    SIN = "sin"
    XCOS = "xcos"
    XSIN = "xsin"


@dataclass(frozen=True)
class TrigTerm:
    """One term coeff * x^p * trig(freq*x + shift), p in {0, 1}."""

    kind: Kind
    coeff: complex
    freq: float = 0.0
    shift: float = 0.0

    def __post_init__(self):
        if self.kind in (Kind.CONST, Kind.LINEAR) and (self.freq or self.shift):
            raise ValueError("const/linear terms carry no frequency or shift")
        if self.freq < 0:
            raise ValueError("term frequency must be >= 0")


def const(c: complex) -> TrigTerm:
    return TrigTerm(Kind.CONST, c)


def linear(c: complex) -> TrigTerm:
    return TrigTerm(Kind.LINEAR, c)


def cos_term(c: complex, k: float, s: float = 0.0) -> TrigTerm:
    return TrigTerm(Kind.COS, c, k, s)


def sin_term(c: complex, k: float, s: float = 0.0) -> TrigTerm:
    return TrigTerm(Kind.SIN, c, k, s)


def xcos_term(c: complex, k: float, s: float = 0.0) -> TrigTerm:
    return TrigTerm(Kind.XCOS, c, k, s)


def xsin_term(c: complex, k: float, s: float = 0.0) -> TrigTerm:
    return TrigTerm(Kind.XSIN, c, k, s)


def eval_terms(terms: Sequence[TrigTerm], x: np.ndarray) -> np.ndarray:
    """Vectorized evaluation of a term sum."""
    out = np.zeros(np.shape(x), dtype=complex)
    x = np.asarray(x, dtype=float)
    for t in terms:
        if t.kind is Kind.CONST:
            out += t.coeff
        elif t.kind is Kind.LINEAR:
            out += t.coeff * x
        elif t.kind is Kind.COS:
            out += t.coeff * np.cos(t.freq * x + t.shift)
        elif t.kind is Kind.SIN:
            out += t.coeff * np.sin(t.freq * x + t.shift)
        elif t.kind is Kind.XCOS:
            out += t.coeff * x * np.cos(t.freq * x + t.shift)
        else:
            out += t.coeff * x * np.sin(t.freq * x + t.shift)
    return out


def _diff_term(t: TrigTerm) -> list[TrigTerm]:
    c, k, s = t.coeff, t.freq, t.shift
    if t.kind is Kind.CONST:
        return []
    if t.kind is Kind.LINEAR:
        return [const(c)]
    if t.kind is Kind.COS:
        return [sin_term(-c * k, k, s)]
    if t.kind is Kind.SIN:
        return [cos_term(c * k, k, s)]
    if t.kind is Kind.XCOS:
        return [cos_term(c, k, s), xsin_term(-c * k, k, s)]
    return [sin_term(c, k, s), xcos_term(c * k, k, s)]


def _diff_terms(terms: Iterable[TrigTerm]) -> tuple[TrigTerm, ...]:
    out: list[TrigTerm] = []
    for t in terms:
        out.extend(_diff_term(t))
    return canonical_terms(out)


def canonical_terms(terms: Iterable[TrigTerm]) -> tuple[TrigTerm, ...]:
    """Merge identical (kind, freq, shift) terms, drop zeros, sort."""
    acc: dict[tuple, complex] = {}
    for t in terms:
        key = (t.kind.value, t.freq, t.shift)
        acc[key] = acc.get(key, 0j) + complex(t.coeff)
    out = [TrigTerm(Kind(kv), c, f, s) for (kv, f, s), c in acc.items() if c != 0]
    out.sort(key=lambda t: (t.kind.value, t.freq, t.shift))
    return tuple(out)


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float
    terms: tuple[TrigTerm, ...]


@dataclass(frozen=True)
class PiecewiseTrig:
    """Term sums on an ordered partition of [-pi/2, pi/2].

    At most one interior breakpoint (the restart point) is allowed; the
    outer endpoints are always +-pi/2.
    """

    pieces: tuple[Piece, ...]

    def __post_init__(self):
        if not 1 <= len(self.pieces) <= 2:
            raise ValueError("one or two pieces supported")
        if abs(self.pieces[0].lo + HALF_PI) > 1e-12 or abs(self.pieces[-1].hi - HALF_PI) > 1e-12:
            raise ValueError("pieces must span [-pi/2, pi/2]")
        for left, right in zip(self.pieces, self.pieces[1:]):
            if left.hi != right.lo:
                raise ValueError("pieces must be contiguous")
            if not -HALF_PI < left.hi < HALF_PI:
                raise ValueError("interior breakpoint must be strictly inside")

    @classmethod
    def single(cls, terms: Iterable[TrigTerm]) -> "PiecewiseTrig":
        return cls((Piece(-HALF_PI, HALF_PI, canonical_terms(terms)),))

    @classmethod
    def split(cls, xb: float, left_terms: Iterable[TrigTerm],
              right_terms: Iterable[TrigTerm]) -> "PiecewiseTrig":
        return cls((Piece(-HALF_PI, xb, canonical_terms(left_terms)),
                    Piece(xb, HALF_PI, canonical_terms(right_terms))))

    @classmethod
    def zero(cls) -> "PiecewiseTrig":
        return cls.single(())

    @property
    def breakpoint(self) -> float | None:
        return self.pieces[0].hi if len(self.pieces) == 2 else None

    def terms_on(self, lo: float, hi: float) -> tuple[TrigTerm, ...]:
        """Terms valid on (lo, hi); the interval must lie within one piece."""
        mid = 0.5 * (lo + hi)
        for p in self.pieces:
            if p.lo - 1e-12 <= mid <= p.hi + 1e-12:
                return p.terms
        raise OutOfDomain(f"interval ({lo}, {hi}) outside the domain")

    def __call__(self, x, side: str = "mean"):
        """Evaluate at scalar or array x; `side` resolves the breakpoint.

        side: 'mean' (average of one-sided limits), 'left', or 'right'.
        """
        scalar = np.isscalar(x)
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        if xs.size and (xs.min() < -HALF_PI - 1e-12 or xs.max() > HALF_PI + 1e-12):
            raise OutOfDomain("evaluation outside [-pi/2, pi/2]")
        out = np.zeros(xs.shape, dtype=complex)
        xb = self.breakpoint
        if xb is None:
            out = eval_terms(self.pieces[0].terms, xs)
        else:
            left = xs <= xb if side == "left" else xs < xb
            out[left] = eval_terms(self.pieces[0].terms, xs[left])
            right = ~left
            out[right] = eval_terms(self.pieces[1].terms, xs[right])
            if side == "mean":
                at_b = xs == xb
                if np.any(at_b):
                    lo_v = eval_terms(self.pieces[0].terms, xs[at_b])
                    hi_v = eval_terms(self.pieces[1].terms, xs[at_b])
                    out[at_b] = 0.5 * (lo_v + hi_v)
        return complex(out[0]) if scalar else out

    def one_sided(self, x: float, side: int) -> complex:
        """Limit from the left (side=-1) or right (side=+1) at x."""
        piece = self.pieces[0]
        for p in self.pieces:
            if (p.lo < x < p.hi) or (x == p.lo and side > 0) or (x == p.hi and side < 0):
                piece = p
                break
        else:
            raise OutOfDomain(f"{x} not interior to any piece on the requested side")
        return complex(eval_terms(piece.terms, np.array([x]))[0])

    def derivative(self, order: int = 1) -> "PiecewiseTrig":
        if order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        pieces = self.pieces
        for _ in range(order):
            pieces = tuple(Piece(p.lo, p.hi, _diff_terms(p.terms)) for p in pieces)
        return PiecewiseTrig(pieces)

    def conj(self) -> "PiecewiseTrig":
        return self._map_terms(lambda t: TrigTerm(t.kind, complex(t.coeff).conjugate(),
                                                  t.freq, t.shift))

    def scaled(self, c: complex) -> "PiecewiseTrig":
        return self._map_terms(lambda t: TrigTerm(t.kind, c * t.coeff, t.freq, t.shift))

    def _map_terms(self, f) -> "PiecewiseTrig":
        return PiecewiseTrig(tuple(Piece(p.lo, p.hi, tuple(f(t) for t in p.terms))
                                   for p in self.pieces))

    def __add__(self, other: "PiecewiseTrig") -> "PiecewiseTrig":
        xb1, xb2 = self.breakpoint, other.breakpoint
        if xb1 is not None and xb2 is not None and abs(xb1 - xb2) > 1e-12:
            raise ValueError("cannot add functions split at different points")
        xb = xb1 if xb1 is not None else xb2
        if xb is None:
            return PiecewiseTrig.single(self.pieces[0].terms + other.pieces[0].terms)
        lo_self = self.terms_on(-HALF_PI, xb)
        hi_self = self.terms_on(xb, HALF_PI)
        lo_other = other.terms_on(-HALF_PI, xb)
        hi_other = other.terms_on(xb, HALF_PI)
        return PiecewiseTrig.split(xb, lo_self + lo_other, hi_self + hi_other)

    def __sub__(self, other: "PiecewiseTrig") -> "PiecewiseTrig":
        return self + other.scaled(-1.0)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps({
            "pieces": [{
                "lo": p.lo, "hi": p.hi,
                "terms": [{"kind": t.kind.value,
                           "coeff": [t.coeff.real, t.coeff.imag],
                           "freq": t.freq, "shift": t.shift} for t in p.terms],
            } for p in self.pieces]})

    @classmethod
    def from_json(cls, text: str) -> "PiecewiseTrig":
        data = json.loads(text)
        pieces = []
        for p in data["pieces"]:
            terms = tuple(TrigTerm(Kind(t["kind"]), complex(*t["coeff"]),
                                   t["freq"], t["shift"]) for t in p["terms"])
            pieces.append(Piece(p["lo"], p["hi"], terms))
        return cls(tuple(pieces))


# ---------------------------------------------------------------------------
# closed-form inner products
# ---------------------------------------------------------------------------

def _as_power_trig(t: TrigTerm) -> tuple[int, bool, complex, float, float]:
    """(power of x, is_sin, coeff, freq, shift) normal form of a term."""
    if t.kind is Kind.CONST:
        return 0, False, t.coeff, 0.0, 0.0
    if t.kind is Kind.LINEAR:
        return 1, False, t.coeff, 0.0, 0.0
    if t.kind is Kind.COS:
        return 0, False, t.coeff, t.freq, t.shift
    if t.kind is Kind.SIN:
        return 0, True, t.coeff, t.freq, t.shift
    if t.kind is Kind.XCOS:
        return 1, False, t.coeff, t.freq, t.shift
    return 1, True, t.coeff, t.freq, t.shift


def _normalize_wave(is_sin: bool, coeff: complex, w: float, d: float):
    if w < 0:
        if is_sin:
            return is_sin, -coeff, -w, -d
        return is_sin, coeff, -w, -d
    return is_sin, coeff, w, d


def _product_waves(t1: TrigTerm, t2: TrigTerm):
    """Expand conj(t1)*t2 into 1-2 elementary waves (p, is_sin, c, w, d)."""
    p1, s1, c1, k1, d1 = _as_power_trig(t1)
    p2, s2, c2, k2, d2 = _as_power_trig(t2)
    c = complex(c1).conjugate() * c2
    p = p1 + p2
    sum_w, sum_d = k1 + k2, d1 + d2
    dif_w, dif_d = k1 - k2, d1 - d2
    half = 0.5 * c
    waves = []
    if not s1 and not s2:      # cos*cos = (cos(dif) + cos(sum))/2
        waves.append((p, False, half, dif_w, dif_d))
        waves.append((p, False, half, sum_w, sum_d))
    elif s1 and s2:            # sin*sin = (cos(dif) - cos(sum))/2
        waves.append((p, False, half, dif_w, dif_d))
        waves.append((p, False, -half, sum_w, sum_d))
    elif s1 and not s2:        # sin*cos = (sin(sum) + sin(dif))/2
        waves.append((p, True, half, sum_w, sum_d))
        waves.append((p, True, half, dif_w, dif_d))
    else:                      # cos*sin = (sin(sum) - sin(dif))/2
        waves.append((p, True, half, sum_w, sum_d))
        waves.append((p, True, -half, dif_w, dif_d))
    return [_normalize_wave(s, c_, w, d) + (p_,)
            for (p_, s, c_, w, d) in waves]


def _int_poly_wave(p: int, is_sin: bool, w: float, d: float,
                   lo: float, hi: float) -> float:
    """Integral of x^p {cos|sin}(w x + d) over [lo, hi], p in {0, 1, 2}."""
    span = max(abs(lo), abs(hi))
    if w * span < _RESONANT:
        # series in (w x): keeps the resonant limit w -> 0 exact
        def poly_int(x: float) -> float:
            cosd, sind = math.cos(d), math.sin(d)
            total = 0.0
            # cos(wx) = sum (-1)^j (wx)^{2j}/(2j)!, sin(wx) likewise
            for j in range(6):
                ce = (-1) ** j * w ** (2 * j) / math.factorial(2 * j)
                co = (-1) ** j * w ** (2 * j + 1) / math.factorial(2 * j + 1)
                if is_sin:
                    # sin(wx+d) = sind*cos(wx) + cosd*sin(wx)
                    total += sind * ce * x ** (p + 2 * j + 1) / (p + 2 * j + 1)
                    total += cosd * co * x ** (p + 2 * j + 2) / (p + 2 * j + 2)
                else:
                    # cos(wx+d) = cosd*cos(wx) - sind*sin(wx)
                    total += cosd * ce * x ** (p + 2 * j + 1) / (p + 2 * j + 1)
                    total -= sind * co * x ** (p + 2 * j + 2) / (p + 2 * j + 2)
            return total

        return poly_int(hi) - poly_int(lo)

    def anti(x: float) -> float:
        arg = w * x + d
        s, c = math.sin(arg), math.cos(arg)
        if not is_sin:
            if p == 0:
                return s / w
            if p == 1:
                return x * s / w + c / w ** 2
            return x * x * s / w + 2 * x * c / w ** 2 - 2 * s / w ** 3
        if p == 0:
            return -c / w
        if p == 1:
            return -x * c / w + s / w ** 2
        return -x * x * c / w + 2 * x * s / w ** 2 + 2 * c / w ** 3

    return anti(hi) - anti(lo)


def _inner_terms(terms_f: Sequence[TrigTerm], terms_g: Sequence[TrigTerm],
                 lo: float, hi: float) -> complex:
    total = 0j
    for tf in terms_f:
        for tg in terms_g:
            for is_sin, c, w, d, p in _product_waves(tf, tg):
                total += c * _int_poly_wave(p, is_sin, w, d, lo, hi)
    return total


def inner_closed(f: PiecewiseTrig, g: PiecewiseTrig) -> complex:
    """Closed-form L2 inner product (conjugate-linear in f)."""
    cuts = {-HALF_PI, HALF_PI}
    for fn in (f, g):
        if fn.breakpoint is not None:
            cuts.add(fn.breakpoint)
    edges = sorted(cuts)
    total = 0j
    for lo, hi in zip(edges, edges[1:]):
        total += _inner_terms(f.terms_on(lo, hi), g.terms_on(lo, hi), lo, hi)
    return total


def norm_l2(f: PiecewiseTrig) -> float:
    return math.sqrt(max(inner_closed(f, f).real, 0.0))


# ---------------------------------------------------------------------------
# grids and quadrature
# ---------------------------------------------------------------------------

_LOBATTO_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_lobatto(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Lobatto nodes/weights on [-1, 1] (endpoints included)."""
    if n < 2:
        raise ValueError("need at least 2 Lobatto points")
    if n not in _LOBATTO_CACHE:
        leg = np.polynomial.legendre.Legendre.basis(n - 1)
        interior = leg.deriv().roots()
        nodes = np.concatenate(([-1.0], np.sort(interior.real), [1.0]))
        pvals = leg(nodes)
        weights = 2.0 / (n * (n - 1) * pvals ** 2)
        _LOBATTO_CACHE[n] = (nodes, weights)
    return _LOBATTO_CACHE[n]


def _composite_lobatto(lo: float, hi: float, panels: int,
                       per_panel: int) -> tuple[np.ndarray, np.ndarray]:
    base_x, base_w = gauss_lobatto(per_panel)
    edges = np.linspace(lo, hi, panels + 1)
    nodes: list[float] = []
    weights: list[float] = []
    for a_, b_ in zip(edges, edges[1:]):
        half = 0.5 * (b_ - a_)
        xs = 0.5 * (a_ + b_) + half * base_x
        ws = half * base_w
        if nodes and abs(xs[0] - nodes[-1]) < 1e-14:
            weights[-1] += ws[0]
            xs, ws = xs[1:], ws[1:]
        nodes.extend(xs)
        weights.extend(ws)
    return np.array(nodes), np.array(weights)


@dataclass
class GridFn:
    """Function samples on a quadrature grid split at the restart point."""

    nodes: np.ndarray
    values: np.ndarray
    weights: np.ndarray
    a_value: float

    def integrate(self) -> complex:
        return complex(np.sum(self.weights * self.values))

    def inner(self, other: "GridFn") -> complex:
        if self.nodes.shape != other.nodes.shape or not np.allclose(
                self.nodes, other.nodes, rtol=0, atol=1e-13):
            raise ValueError("grid functions live on different node sets")
        return complex(np.sum(self.weights * np.conj(self.values) * other.values))

    def norm(self) -> float:
        return math.sqrt(max(self.inner(self).real, 0.0))

    def csv_rows(self) -> list[tuple[float, float, float]]:
        return [(float(x), float(v.real), float(v.imag))
                for x, v in zip(self.nodes, self.values)]


def grid_nodes(a: ParamA | float, min_nodes_per_piece: int = 64,
               kmax: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Composite Lobatto nodes/weights on the two pieces cut at pi*a/2."""
    a_val = a.value if isinstance(a, ParamA) else float(a)
    xb = HALF_PI * a_val
    all_nodes: list[np.ndarray] = []
    all_weights: list[np.ndarray] = []
    for lo, hi in ((-HALF_PI, xb), (xb, HALF_PI)):
        length = hi - lo
        panels = max(2, int(math.ceil(length * max(kmax, 1.0) / 8.0)))
        per_panel = max(24, int(math.ceil(min_nodes_per_piece / panels)) + 1)
        xs, ws = _composite_lobatto(lo, hi, panels, per_panel)
        if all_nodes and abs(xs[0] - all_nodes[-1][-1]) < 1e-14:
            all_weights[-1][-1] += ws[0]
            xs, ws = xs[1:], ws[1:]
        all_nodes.append(xs)
        all_weights.append(ws)
    return np.concatenate(all_nodes), np.concatenate(all_weights)


def sample(fn: PiecewiseTrig | Callable[[np.ndarray], np.ndarray],
           a: ParamA | float, min_nodes_per_piece: int = 64,
           kmax: float = 0.0) -> GridFn:
    nodes, weights = grid_nodes(a, min_nodes_per_piece, kmax)
    if isinstance(fn, PiecewiseTrig):
        values = fn(nodes)
    else:
        values = np.asarray(fn(nodes), dtype=complex)
    a_val = a.value if isinstance(a, ParamA) else float(a)
    return GridFn(nodes=nodes, values=np.asarray(values, dtype=complex),
                  weights=weights, a_value=a_val)


def _max_freq(f: PiecewiseTrig) -> float:
    return max((t.freq for p in f.pieces for t in p.terms), default=0.0)


def quad_inner(f: PiecewiseTrig | Callable, g: PiecewiseTrig | Callable,
               a: ParamA | float, target: float = 1e-12,
               start_nodes: int = 96, max_rounds: int = 6) -> complex:
    """Quadrature inner product with panel-doubling refinement.

    Independent numerical route used to cross-check inner_closed and the
    printed pairing formulas.
    """
    kmax = max(_max_freq(f) if isinstance(f, PiecewiseTrig) else 0.0,
               _max_freq(g) if isinstance(g, PiecewiseTrig) else 0.0)
    n = start_nodes
    prev = None
    for _ in range(max_rounds):
        gf = sample(f, a, n, kmax)
        gg = sample(g, a, n, kmax)
        cur = gf.inner(gg)
        if prev is not None and abs(cur - prev) <= target * max(1.0, abs(cur)):
            return cur
        prev = cur
        n *= 2
    raise QuadratureNotConverged(
        f"inner product did not stabilize to {target} within {max_rounds} refinements")


def inner(f: PiecewiseTrig | GridFn, g: PiecewiseTrig | GridFn) -> complex:
    """L2 inner product; closed form for symbolic pairs, weights otherwise."""
    if isinstance(f, PiecewiseTrig) and isinstance(g, PiecewiseTrig):
        return inner_closed(f, g)
    if isinstance(f, GridFn) and isinstance(g, GridFn):
        return f.inner(g)
    if isinstance(f, GridFn):
        gv = GridFn(f.nodes, np.asarray(g(f.nodes), dtype=complex), f.weights, f.a_value)
        return f.inner(gv)
    fv = GridFn(g.nodes, np.asarray(f(g.nodes), dtype=complex), g.weights, g.a_value)
    return fv.inner(g)


# ---------------------------------------------------------------------------
# domain membership
# ---------------------------------------------------------------------------

@dataclass
class DomainReport:
    in_domain: bool
    violations: list[str]
    max_violation: float


def _scale(f: PiecewiseTrig) -> float:
    xs = np.linspace(-HALF_PI, HALF_PI, 257)
    return max(1.0, float(np.max(np.abs(f(xs)))))


def validate_domain_H(f: PiecewiseTrig, a: ParamA | float,
                      tol: float = 1e-10) -> DomainReport:
    """Membership in the operator domain: globally C1 across the restart
    point (two-piece H2 smoothness) plus the three-point condition
    f(-pi/2) = f(pi*a/2) = f(pi/2)."""
    a_val = a.value if isinstance(a, ParamA) else float(a)
    xb = HALF_PI * a_val
    scale = _scale(f)
    viol: list[str] = []
    worst = 0.0

    def check(label: str, dev: float):
        nonlocal worst
        worst = max(worst, dev)
        if dev > tol * scale:
            viol.append(f"{label}: deviation {dev:.3e}")

    v_left = f.one_sided(xb, -1)
    v_right = f.one_sided(xb, +1)
    check("value continuity at restart point", abs(v_left - v_right))
    df = f.derivative(1)
    check("derivative continuity at restart point",
          abs(df.one_sided(xb, -1) - df.one_sided(xb, +1)))
    v_b = 0.5 * (v_left + v_right)
    v_m = f.one_sided(-HALF_PI, +1)
    v_p = f.one_sided(HALF_PI, -1)
    check("boundary condition f(-pi/2) = f(pi*a/2)", abs(v_m - v_b))
    check("boundary condition f(pi/2) = f(pi*a/2)", abs(v_p - v_b))
    return DomainReport(not viol, viol, worst)


def validate_domain_Hstar(f: PiecewiseTrig, a: ParamA | float,
                          tol: float = 1e-10) -> DomainReport:
    """Membership in the adjoint domain: Dirichlet ends, value continuity
    at the restart point, and the matched derivative-jump identity
    f'(pi/2) - f'(-pi/2) = f'(pi*a/2+) - f'(pi*a/2-)."""
    a_val = a.value if isinstance(a, ParamA) else float(a)
    xb = HALF_PI * a_val
    scale = _scale(f)
    viol: list[str] = []
    worst = 0.0

    def check(label: str, dev: float):
        nonlocal worst
        worst = max(worst, dev)
        if dev > tol * scale:
            viol.append(f"{label}: deviation {dev:.3e}")

    check("Dirichlet value at -pi/2", abs(f.one_sided(-HALF_PI, +1)))
    check("Dirichlet value at +pi/2", abs(f.one_sided(HALF_PI, -1)))
    check("value continuity at restart point",
          abs(f.one_sided(xb, -1) - f.one_sided(xb, +1)))
    df = f.derivative(1)
    jump_out = df.one_sided(HALF_PI, -1) - df.one_sided(-HALF_PI, +1)
    jump_in = df.one_sided(xb, +1) - df.one_sided(xb, -1)
    check("derivative-jump identity", abs(jump_out - jump_in))
    return DomainReport(not viol, viol, worst)
