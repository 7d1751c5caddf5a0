"""Explicit nonconstant bounded solutions when the Liouville property fails.

From a hyperplane certificate (H, c) the coset cosine U(x) = cos(2 pi l_x),
x = x_H + l_x c, is (H + cZ)-periodic and annihilated by the operator.  The
evaluator reduces the coset coordinate exactly before taking the cosine, so
finite atomic sums vanish exactly in floating point as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .closure import HyperplaneCertificate, er_dot
from .exactreal import format_coordinate
from .measures import Point


@dataclass(frozen=True)
class Counterexample:
    kind: str  # "cosine_1d" | "cosine_coset"
    certificate: HyperplaneCertificate
    closed_form: str
    dimension: int

    bounded = True
    sup_u = 1.0

    @property
    def _frequency(self) -> float:
        n = np.array([float(c) for c in self.certificate.normal])
        p = float(er_dot(self.certificate.normal, self.certificate.c))
        return 2.0 * math.pi * float(np.linalg.norm(n)) / abs(p)

    @property
    def sup_grad(self) -> float:
        return self._frequency

    @property
    def sup_hess(self) -> float:
        return self._frequency**2

    @property
    def sup_d3(self) -> float:
        return self._frequency**3

    @property
    def sup_d4(self) -> float:
        return self._frequency**4

    def coset_coordinate(self, x: Point) -> tuple[int, float]:
        """(k, t) with <n,x>/<n,c> = k + t, k integer, t in [0,1), t reduced exactly."""
        n, c = self.certificate.normal, self.certificate.c
        s = er_dot(n, x)
        p = er_dot(n, c)
        basis = s.basis
        with mpmath.workdps(basis.dps + 10):
            ratio = s.mpf() / p.mpf()
            k = int(mpmath.floor(ratio))
        rem = s - p.scale(Fraction(k))
        with mpmath.workdps(basis.dps + 10):
            t = float(rem.mpf() / p.mpf())
        return k, t

    def value_exact(self, x: Point) -> float:
        """Value at a point with exact coordinates; coset-shift invariant."""
        _, t = self.coset_coordinate(x)
        return math.cos(2.0 * math.pi * t)

    def value(self, x) -> float:
        """Float-point evaluation for plotting and sampling."""
        n = np.array([float(c) for c in self.certificate.normal])
        c = np.array([float(ci) for ci in self.certificate.c])
        x = np.asarray(x, dtype=float)
        lam = (x @ n if x.ndim else x * n[0]) / (c @ n)
        return np.cos(2.0 * np.pi * lam)

    def sample_table(self, points) -> list[tuple]:
        return [(tuple(map(float, p)), float(self.value(p))) for p in points]


class CounterexampleError(ValueError):
    pass


def build_counterexample(cert: HyperplaneCertificate, dimension: int) -> Counterexample:
    """Coset cosine for the decider's canonical certificate."""
    pairing = er_dot(cert.normal, cert.c)
    if pairing.is_zero():
        raise CounterexampleError("invalid certificate: c lies in H")
    if dimension == 1:
        g = cert.c[0]
        form = f"cos(2*pi*x/({format_coordinate(g)}))"
        return Counterexample("cosine_1d", cert, form, 1)
    nstr = ", ".join(format_coordinate(c) for c in cert.normal)
    pstr = format_coordinate(pairing)
    form = f"cos(2*pi*<({nstr}), x>/({pstr}))"
    return Counterexample("cosine_coset", cert, form, dimension)


def check_periodicity(u, generators, samples, tol: float) -> tuple[bool, float]:
    """Max over samples x and generators s of |u(x+s) - u(x)|; True iff <= tol."""
    worst = 0.0
    for x in samples:
        xv = np.asarray(x, dtype=float)
        ux = float(u(xv))
        for s in generators:
            sv = np.asarray(s, dtype=float)
            dev = abs(float(u(xv + sv)) - ux)
            if dev > worst:
                worst = dev
    return worst <= tol, worst
