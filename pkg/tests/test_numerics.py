import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from liouville.exactreal import ConstantBasis, ExtendedRational
from liouville.measures import parse_measure, support_of
from liouville.numerics import (
    OperatorEvaluator,
    builtin_function,
    density_probe,
    eval_operator,
    fractional_constant,
    propagate,
    sphere_area,
)
from conftest import PI_50, SQRT2_50, er, spec_path


def load(name):
    with open(spec_path(name)) as fh:
        return parse_measure(fh.read())


def points_1d(basis, *values):
    return [(v,) for v in values]


class TestFractionalIdentity:
    """Fourier multiplier oracle: -(-Lap)^{alpha/2} cos = -|1|^alpha cos."""

    def test_alpha_one_within_1e4(self):
        mu = load("fractional.yaml")
        u = builtin_function("cos", 1)
        ev = OperatorEvaluator(measure=mu)
        for x in (0.0, 0.7, 2.1, -1.3):
            res = eval_operator(ev, u, (x,))
            assert abs(res.value - (-math.cos(x))) < 1e-4
            assert abs(res.value - (-math.cos(x))) <= res.bound

    def test_dense_quadrature_oracle_at_one_point(self):
        # independent check of the quadrature machinery via scipy.integrate
        x = 0.7
        c = fractional_constant(1, 1.0)
        R = 3000.0
        inner, _ = integrate.quad(
            lambda r: c * (math.cos(x + r) + math.cos(x - r) - 2 * math.cos(x)) / r**2,
            0,
            1,
            limit=400,
        )
        outer, _ = integrate.quad(
            lambda r: c * (math.cos(x + r) + math.cos(x - r) - 2 * math.cos(x)) / r**2,
            1,
            R,
            limit=4000,
        )
        # analytic remainder of the non-oscillatory -2cos(x) part beyond R
        oracle = inner + outer - 2 * math.cos(x) * c / R
        res = eval_operator(OperatorEvaluator(measure=load("fractional.yaml")), builtin_function("cos", 1), (x,))
        assert res.value == pytest.approx(oracle, abs=2e-4)

    def test_r0_split_invariance(self):
        mu = load("fractional.yaml")
        u = builtin_function("cos", 1)
        results = {
            r0: eval_operator(OperatorEvaluator(measure=mu, r0=r0), u, (0.7,))
            for r0 in (0.5, 1.0, 2.0)
        }
        vals = [r.value for r in results.values()]
        worst_bound = max(r.bound for r in results.values())
        assert max(vals) - min(vals) <= 2 * worst_bound

    def test_alpha_half_covered_by_bound(self):
        mu = parse_measure("dimension: 1\ncontinuous:\n  - {kind: fractional, alpha: 0.5}\n")
        u = builtin_function("cos", 1)
        res = eval_operator(OperatorEvaluator(measure=mu), u, (0.3,))
        assert abs(res.value - (-math.cos(0.3))) <= res.bound


class TestMeanValue:
    def test_annihilates_harmonic(self):
        mu = load("mean_value.yaml")
        u = builtin_function("harmonic_xy", 2)
        ev = OperatorEvaluator(measure=mu)
        for x in ((0.0, 0.0), (0.3, -1.2), (2.0, 1.0)):
            res = eval_operator(ev, u, x)
            assert abs(res.value) < 1e-10

    def test_nonharmonic_not_annihilated(self):
        mu = load("mean_value.yaml")
        u = builtin_function("gaussian", 2)
        res = eval_operator(OperatorEvaluator(measure=mu), u, (0.0, 0.0))
        assert abs(res.value) > 1e-3


class TestAtomicSums:
    def test_periodic_cosine_annihilated_exactly(self):
        mu = load("discrete_laplacian.yaml")
        u = builtin_function("cos2pi", 1)
        ev = OperatorEvaluator(measure=mu)
        basis = mu.basis
        for k in range(10):
            x = (basis.from_rational(Fraction(k, 7)),)
            res = eval_operator(ev, u, x)
            assert res.value == 0.0
            assert res.bound == 0.0

    def test_sequence_tail_bound_is_honest(self):
        mu = load("reciprocal_sequence.yaml")
        u = builtin_function("cos2pi", 1)
        full = eval_operator(OperatorEvaluator(measure=mu), u, (0.3,))
        short = eval_operator(OperatorEvaluator(measure=mu, truncation=50), u, (0.3,))
        assert abs(full.value - short.value) <= short.bound

    def test_unbounded_u_rejected_when_tails_needed(self):
        mu = load("reciprocal_sequence.yaml")
        u = builtin_function("harmonic_xy", 2)
        with pytest.raises(ValueError):
            eval_operator(OperatorEvaluator(measure=load("fractional.yaml")), u, (0.0,))

    def test_self_adjoint_symmetry(self):
        # sum_x u L[psi] == sum_x psi L[u] for an atomic measure, trapezoid in x
        text = (
            "dimension: 1\natoms:\n"
            '  - {point: ["1"], weight: "1"}\n'
            '  - {point: ["3/2"], weight: "1/2"}\n'
        )
        mu = parse_measure(text)
        ev = OperatorEvaluator(measure=mu)
        u = builtin_function("gaussian", 1)

        class Shifted:
            bounded = True
            sup_u = 1.0
            sup_grad = 1.0
            sup_hess = 2.0
            name = "shifted_gaussian"

            def value(self, x):
                x = np.asarray(x, dtype=float)
                return np.exp(-((x[..., 0] - 0.4) ** 2))

        psi = Shifted()
        xs = np.linspace(-12, 12, 961)
        h = xs[1] - xs[0]
        lu = np.array([eval_operator(ev, u, (float(x),)).value for x in xs])
        lpsi = np.array([eval_operator(ev, psi, (float(x),)).value for x in xs])
        uu = np.array([float(u.value(np.array([x]))) for x in xs])
        pp = np.array([float(psi.value(np.array([x]))) for x in xs])
        lhs = float(integrate.trapezoid(uu * lpsi, dx=h))
        rhs = float(integrate.trapezoid(pp * lu, dx=h))
        assert lhs == pytest.approx(rhs, abs=1e-6)


class TestRelativisticAndConvolution:
    def test_finite_values_and_honest_r0_invariance(self):
        for name in ("relativistic.yaml", "convolution.yaml"):
            mu = load(name)
            u = builtin_function("cos", 1)
            out = {
                r0: eval_operator(OperatorEvaluator(measure=mu, r0=r0), u, (0.4,))
                for r0 in (0.5, 1.0, 2.0)
            }
            vals = [r.value for r in out.values()]
            assert all(math.isfinite(v) for v in vals)
            assert max(vals) - min(vals) <= 2 * max(r.bound for r in out.values())

    def test_convolution_matches_direct_convolution(self):
        # J*u - u with a gaussian J: direct quadrature oracle
        mu = load("convolution.yaml")
        u = builtin_function("cos", 1)
        x = 0.3
        oracle, _ = integrate.quad(
            lambda z: math.exp(-(z**2)) / math.sqrt(math.pi) * (math.cos(x + z) - math.cos(x)),
            -np.inf,
            np.inf,
        )
        res = eval_operator(OperatorEvaluator(measure=mu), u, (x,))
        assert res.value == pytest.approx(oracle, abs=1e-6)


class TestAffine:
    def test_planar_counterexample_annihilated(self):
        mu = load("planar_fractional.yaml")
        from liouville.decider import decide

        v = decide(mu)
        ce = v.counterexample
        ev = OperatorEvaluator(measure=mu)
        rng = np.random.default_rng(5)
        for p in rng.uniform(-3, 3, size=(5, 2)):
            res = eval_operator(ev, ce, tuple(p))
            assert abs(res.value) < 1e-8


class TestPropagate:
    def test_integer_lattice_window(self, plain_basis):
        state = propagate(points_1d(plain_basis, er(plain_basis, 1)), R=5.0, n_max=12)
        assert state.deltas[:5] == pytest.approx([4.0, 3.0, 2.0, 1.0, 0.5])
        assert state.deltas[5:] == pytest.approx([0.5] * 7)
        xs = sorted(float(p[0]) for p in state.points)
        assert xs == pytest.approx(list(range(-6, 7)))

    def test_sqrt2_reaches_five_percent_by_17(self, sqrt2_basis):
        pts = points_1d(sqrt2_basis, er(sqrt2_basis, 1, 0), er(sqrt2_basis, 0, 1))
        state = propagate(pts, R=5.0, n_max=40, target_delta=0.05)
        # pre-build oracle run: the grid delta sits exactly at the 0.05
        # boundary for n = 14..16 and drops strictly below by n = 17
        assert 14 <= state.n <= 17
        assert state.deltas[-1] < 0.05
        assert state.deltas[12] > 0.05

    def test_deltas_nonincreasing(self, sqrt2_basis):
        pts = points_1d(sqrt2_basis, er(sqrt2_basis, 1, 0), er(sqrt2_basis, 0, 1))
        state = propagate(pts, R=5.0, n_max=25)
        assert all(b <= a + 1e-15 for a, b in zip(state.deltas, state.deltas[1:]))

    def test_group_containment(self, sqrt2_basis):
        pts = points_1d(sqrt2_basis, er(sqrt2_basis, 1, 0), er(sqrt2_basis, 0, 1))
        state = propagate(pts, R=3.0, n_max=8)
        for p in state.points[:200]:
            q0, q1 = p[0].coords
            assert q0.denominator == 1 and q1.denominator == 1

    def test_cap_flags_partial_result(self, sqrt2_basis):
        pts = points_1d(sqrt2_basis, er(sqrt2_basis, 1, 0), er(sqrt2_basis, 0, 1))
        state = propagate(pts, R=5.0, n_max=40, cap=50)
        assert state.flagged_partial
        assert state.n < 40


class TestDensityProbe:
    def test_unit_lattice(self, plain_basis):
        probe = density_probe(points_1d(plain_basis, er(plain_basis, 1)), R=5.0, n_max=12)
        assert probe.verdict == "lattice-detected"
        assert probe.g_estimate == pytest.approx(1.0, abs=1e-9)

    def test_rational_lattice_matches_gcd(self, plain_basis):
        probe = density_probe(
            points_1d(plain_basis, er(plain_basis, 1), er(plain_basis, Fraction(3, 2))),
            R=5.0,
            n_max=30,
        )
        assert probe.verdict == "lattice-detected"
        assert probe.g_estimate == pytest.approx(0.5, abs=1e-9)

    def test_pi_dense_likely(self, pi_basis):
        probe = density_probe(
            points_1d(pi_basis, er(pi_basis, 1, 0), er(pi_basis, 0, 1)), R=5.0, n_max=40
        )
        assert probe.verdict == "dense-likely"

    def test_adversarial_near_rational(self, plain_basis):
        # 355/113 is indistinguishable from pi in the deltas but snaps exactly:
        # the probe must never be promoted to a certificate
        probe = density_probe(
            points_1d(plain_basis, er(plain_basis, 1), er(plain_basis, Fraction(355, 113))),
            R=5.0,
            n_max=40,
        )
        assert probe.verdict == "lattice-detected"
        assert probe.g_estimate == pytest.approx(1 / 113, abs=1e-9)

    def test_2d_lattice_fit(self, plain_basis):
        pts = [
            (er(plain_basis, 1), er(plain_basis, 0)),
            (er(plain_basis, 0), er(plain_basis, 1)),
            (er(plain_basis, Fraction(1, 2)), er(plain_basis, Fraction(1, 3))),
        ]
        probe = density_probe(pts, R=2.0, n_max=25, grid_div=80)
        assert probe.verdict == "lattice-detected"
        B = np.array(probe.basis_estimate)
        det = abs(np.linalg.det(B))
        assert det == pytest.approx(1 / 6, abs=1e-9)


class TestToleranceContract:
    def test_bound_above_requested_tolerance_raises(self):
        mu = parse_measure("dimension: 1\ncontinuous:\n  - {kind: fractional, alpha: 0.5}\n")
        ev = OperatorEvaluator(measure=mu, tolerance=1e-6)
        with pytest.raises(ValueError, match="tolerance"):
            eval_operator(ev, builtin_function("cos", 1), (0.3,))

    def test_tolerance_satisfied_passes(self):
        mu = parse_measure("dimension: 1\ncontinuous:\n  - {kind: fractional, alpha: 1.0}\n")
        ev = OperatorEvaluator(measure=mu, tolerance=1e-3)
        res = eval_operator(ev, builtin_function("cos", 1), (0.3,))
        assert res.bound < 1e-3


class TestMultiDimensionalQuadrature:
    def test_d2_fractional_multiplier(self):
        mu = parse_measure("dimension: 2\ncontinuous:\n  - {kind: fractional, alpha: 1.0}\n")
        u = builtin_function("cos", 2)
        ev = OperatorEvaluator(measure=mu, outer_radius=2e3, outer_step=0.1)
        res = eval_operator(ev, u, (0.4, -0.7))
        assert abs(res.value - (-math.cos(0.4))) < 5e-4
        assert abs(res.value - (-math.cos(0.4))) <= res.bound

    def test_d3_mean_value_annihilates_harmonic(self):
        mu = parse_measure("dimension: 3\ncontinuous:\n  - {kind: surface_sphere, radius: 1.0}\n")
        u = builtin_function("harmonic_xy", 3)
        res = eval_operator(OperatorEvaluator(measure=mu), u, (0.3, -0.2, 1.0))
        assert abs(res.value) < 1e-10

    def test_d3_fractional_multiplier(self):
        mu = parse_measure("dimension: 3\ncontinuous:\n  - {kind: fractional, alpha: 1.0}\n")
        u = builtin_function("cos", 3)
        ev = OperatorEvaluator(measure=mu, outer_radius=500, outer_step=0.1, sphere_count=32)
        res = eval_operator(ev, u, (0.0, 0.0, 0.0))
        assert abs(res.value - (-1.0)) <= res.bound
        assert abs(res.value - (-1.0)) < 1e-3

    def test_d4_rejected(self):
        mu = parse_measure("dimension: 4\ncontinuous:\n  - {kind: fractional, alpha: 1.0}\n")
        with pytest.raises(ValueError, match="d <= 3"):
            OperatorEvaluator(measure=mu)
