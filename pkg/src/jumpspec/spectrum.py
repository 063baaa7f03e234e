"""Point spectrum enumeration with exact multiplicity bookkeeping.

The eigenvalues form three arithmetic families of squared wavenumbers,

    class -1: k = 4m/(1-a),   class +1: k = 4m/(1+a),   class 0: k = 2m,

and every coincidence between families happens at exact rational
wavenumbers, so membership merging is done with Fraction arithmetic, never
float equality.  A merged record with both a -1 and a +1 membership is an
exceptional point: geometric multiplicity two, algebraic multiplicity
three.  The characteristic determinant

    det(k) = -4 sin(k pi (1+a)/4) sin(k pi (1-a)/4) sin(k pi / 2)

is kept as an independent oracle: its zeros, found by dense scan plus
bisection, must square exactly onto the enumerated eigenvalues.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from jumpspec.param import ParamA, zero_class_case, ZeroClassCase


class SpectralCase(enum.Enum):
    GENERIC = "generic"
    EXCEPTIONAL_PAIR = "exceptional_pair"
    ZERO_EV = "zero_eigenvalue"
    EXCEPTIONAL_ODD = "exceptional_odd"


@dataclass(frozen=True)
class EigRecord:
    """One spectral point with its full class membership set."""

    lam: float
    k: float
    memberships: tuple[tuple[int, int], ...]  # sorted (class, m) pairs
    geom_mult: int
    alg_mult: int
    case: SpectralCase

    def class_index(self, cls: int) -> int | None:
        """The family index m of the given class membership, if present."""
        for c, m in self.memberships:
            if c == cls:
                return m
        return None

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "k": self.k,
                "memberships": [[c, m] for c, m in self.memberships],
                "geom_mult": self.geom_mult, "alg_mult": self.alg_mult,
                "case": self.case.value}


def _raw_wavenumbers(a: ParamA, k_max: float):
    """(class, m, k_float, k_exact_or_None) for all family members k <= k_max."""
    out = []
    if a.is_rational:
        p, q = a.fraction.numerator, a.fraction.denominator
        for cls, denom in ((-1, q - p), (+1, q + p)):
            m = 1
            while True:
                k = Fraction(4 * m * q, denom)
                if float(k) > k_max:
                    break
                out.append((cls, m, float(k), k))
                m += 1
        m = 0
        while 2 * m <= k_max:
            out.append((0, m, float(2 * m), Fraction(2 * m)))
            m += 1
    else:
        for cls, fac in ((-1, 1 - a.value), (+1, 1 + a.value)):
            m = 1
            while 4 * m / fac <= k_max:
                out.append((cls, m, 4 * m / fac, None))
                m += 1
        m = 0
        while 2 * m <= k_max:
            out.append((0, m, float(2 * m), None))
            m += 1
    return out


def enumerate_spectrum(a: ParamA, lambda_max: float) -> list[EigRecord]:
    """All distinct eigenvalues <= lambda_max, ascending, with multiplicities."""
    if lambda_max <= 0:
        raise ValueError("lambda_max must be positive")
    k_max = math.sqrt(lambda_max)
    raw = _raw_wavenumbers(a, k_max)

    groups: dict[object, list[tuple[int, int, float]]] = {}
    for cls, m, k_f, k_exact in raw:
        key = k_exact if k_exact is not None else (cls, m)
        groups.setdefault(key, []).append((cls, m, k_f))

    records: list[EigRecord] = []
    for members in groups.values():
        k_f = members[0][2]
        classes = {c for c, _, _ in members}
        memberships = tuple(sorted((c, m) for c, m, _ in members))
        if -1 in classes and +1 in classes:
            # full coincidence; the 0 class is always dragged along
            assert 0 in classes, "exceptional pair must sit in all three families"
            rec = EigRecord(k_f * k_f, k_f, memberships, 2, 3,
                            SpectralCase.EXCEPTIONAL_PAIR)
        elif memberships == ((0, 0),):
            rec = EigRecord(0.0, 0.0, memberships, 1, 1, SpectralCase.ZERO_EV)
        else:
            assert len(members) == 1, f"unexpected partial coincidence {members}"
            cls, m, _ = members[0]
            case = SpectralCase.GENERIC
            if cls == 0 and zero_class_case(a, m) is ZeroClassCase.EXCEPTIONAL_ODD:
                case = SpectralCase.EXCEPTIONAL_ODD
            rec = EigRecord(k_f * k_f, k_f, memberships, 1, 1, case)
        records.append(rec)
    records.sort(key=lambda r: r.lam)
    return records


def records_to_json(records: list[EigRecord]) -> str:
    return json.dumps([r.to_dict() for r in records], indent=2)


# ---------------------------------------------------------------------------
# characteristic determinant oracle
# ---------------------------------------------------------------------------

def char_det(a: ParamA | float, k) -> complex | np.ndarray:
    """-4 sin(k pi (1+a)/4) sin(k pi (1-a)/4) sin(k pi / 2); zeros^2 = spectrum."""
    a_val = a.value if isinstance(a, ParamA) else float(a)
    k = np.asarray(k)
    quarter = np.pi / 4
    det = (-4.0 * np.sin(k * quarter * (1 + a_val))
           * np.sin(k * quarter * (1 - a_val))
           * np.sin(k * np.pi / 2))
    if det.ndim == 0:
        return complex(det)
    return det


def scan_determinant_zeros(a: ParamA, k_max: float, step: float = 1e-3,
                           refine_tol: float = 1e-10) -> list[float]:
    """Real zeros of char_det on [0, k_max] by dense scan + bisection."""
    grid = np.arange(0.0, k_max + step, step)
    vals = np.real(char_det(a, grid))
    zeros: list[float] = []
    exact = np.abs(vals) < 1e-13
    for idx in np.nonzero(exact)[0]:
        zeros.append(float(grid[idx]))
    signs = np.sign(vals)
    flips = np.nonzero((signs[:-1] * signs[1:]) < 0)[0]
    for idx in flips:
        lo, hi = float(grid[idx]), float(grid[idx + 1])
        flo = float(np.real(char_det(a, lo)))
        while hi - lo > refine_tol:
            mid = 0.5 * (lo + hi)
            fmid = float(np.real(char_det(a, mid)))
            if fmid == 0.0:
                lo = hi = mid
                break
            if flo * fmid < 0:
                hi = mid
            else:
                lo, flo = mid, fmid
        zeros.append(0.5 * (lo + hi))
    zeros.sort()
    merged: list[float] = []
    for z in zeros:
        if not merged or z - merged[-1] > 10 * refine_tol:
            merged.append(z)
    return [z for z in merged if z <= k_max + step]


def count_zeros_in_rectangle(a: ParamA, k_lo: float, k_hi: float,
                             im_half: float, n_side: int = 4000) -> int:
    """Argument-principle zero count of char_det inside a complex rectangle.

    Walks the boundary [k_lo, k_hi] x [-im_half, +im_half] and accumulates
    the winding of det; the corners must avoid zeros (real zeros lie on the
    real axis, so any rectangle with nonzero imaginary extent and real
    endpoints between zeros is safe).
    """
    corners = [complex(k_lo, -im_half), complex(k_hi, -im_half),
               complex(k_hi, im_half), complex(k_lo, im_half),
               complex(k_lo, -im_half)]
    total = 0.0
    for z0, z1 in zip(corners, corners[1:]):
        ts = np.linspace(0.0, 1.0, n_side)
        path = z0 + (z1 - z0) * ts
        vals = np.asarray(char_det(a, path), dtype=complex)
        args = np.angle(vals)
        dargs = np.diff(args)
        dargs = (dargs + np.pi) % (2 * np.pi) - np.pi
        total += float(np.sum(dargs))
    return int(round(total / (2 * np.pi)))


# ---------------------------------------------------------------------------
# eigenvalue curves and the drifted spectral gap
# ---------------------------------------------------------------------------

def curves(a_grid, m_max: int) -> list[tuple[float, int, int, float]]:
    """Rows (a, class, m, lambda) for the three eigenvalue families."""
    rows: list[tuple[float, int, int, float]] = []
    for a_val in a_grid:
        a_val = float(a_val)
        if not -1 < a_val < 1:
            raise ValueError("curve grid must stay inside (-1, 1)")
        for m in range(1, m_max + 1):
            rows.append((a_val, -1, m, (4 * m / (1 - a_val)) ** 2))
            rows.append((a_val, +1, m, (4 * m / (1 + a_val)) ** 2))
        for m in range(0, m_max + 1):
            rows.append((a_val, 0, m, float((2 * m) ** 2)))
    return rows


def drift_gap(sigma: float, b: float) -> float:
    """Spectral gap of the drifted process restarting at the center.

    2*sigma^2 + b^2/(2*sigma^2) for |b| <= 2*sqrt(3)*sigma^2, frozen at
    8*sigma^2 beyond that threshold.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    s2 = sigma * sigma
    if abs(b) <= 2.0 * math.sqrt(3.0) * s2:
        return 2.0 * s2 + b * b / (2.0 * s2)
    return 8.0 * s2
