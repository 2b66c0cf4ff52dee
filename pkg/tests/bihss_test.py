from __future__ import print_function

import unittest
from fractions import Fraction

import mock

from superjet.bihss import (ConformalData, IndexVector, PowerLaw, SemisimpleHydroPair,
                            build_pair, build_tau, conformal_central_invariants,
                            conformal_check, cocycle_from_gauge, delta_minus_one, dhat,
                            euler_field, index_ode_check, indices, is_coboundary_indices,
                            is_cocycle, mn_expansion, normalize_cocycle, psi_rescale,
                            rotation_coeffs)
from superjet.coeffs import LambdaTower, base_tower
from superjet.errors import (ConformalityFailed, DegenerateScaling, IrreducibilityViolated,
                             NotACocycle, NotHomogeneous, NotSingleVariable,
                             RootNotRegistered, WrongBidegree, WrongShape, ZeroMetricEntry)
from superjet.forms import OneForm, ReducedOneForm
from superjet.functionals import LocalFunctional
from tests.fixtures import make_rng, random_normal_form, random_poly, random_reduced_form

HALF = Fraction(1, 2)


def base_u(n, i):
    return base_tower(n).u(i)


class PairTester(unittest.TestCase):
    def testKdV(self):
        """
        f = (1) gives int 1/2 th th' and int 1/2 u th th'.
        """
        S = build_pair([1])
        r = S.ring
        self.assertTrue(S.verified)
        self.assertEqual(S.P0, LocalFunctional((r.th(1) * r.th(1, 1)).scale(HALF)))
        self.assertEqual(S.P1, LocalFunctional((r.u(1) * r.th(1) * r.th(1, 1)).scale(HALF)))

    def testTwoComponents(self):
        """
        f = (u1, 1) passes the bracket checks.
        """
        S = build_pair([base_u(2, 1), 1])
        self.assertTrue(S.verified)
        self.assertTrue(S.H0.verified and S.H1.verified)

    def testThreeComponents(self):
        """
        f = (u1, u2, 1) passes the bracket checks.
        """
        S = build_pair([base_u(3, 1), base_u(3, 2), 1])
        self.assertTrue(S.verified)

    def testZeroEntry(self):
        """
        A vanishing f^i is refused.
        """
        with self.assertRaises(ZeroMetricEntry) as cm:
            build_pair([0])
        self.assertEqual(cm.exception.i, 1)

    def testCoefficients(self):
        """
        a_ij = 1/2 d_i f^j and b_ij = 1/2 f^i d_i f^j / f^j.
        """
        S = build_pair([base_u(2, 1), 1], verify=False)
        self.assertEqual(S.a(1, 1), HALF)
        self.assertEqual(S.a(1, 2), 0)
        self.assertEqual(S.b(1, 1), HALF)
        self.assertEqual(S.b(2, 1), 0)
        self.assertFalse(S.verified)


class IndexTester(unittest.TestCase):
    def setUp(self):
        self.S = build_pair([1])
        self.r = self.S.ring

    def testReadOff(self):
        """
        int th'' du has index 1.
        """
        r = self.r
        w = ReducedOneForm([r.th(1, 2)], [r.zero()])
        self.assertEqual(indices(self.S, w), [1])

    def testWrongBidegree(self):
        """
        Only forms of deg_x 2 and deg_theta 1 have indices.
        """
        r = self.r
        with self.assertRaises(WrongBidegree):
            indices(self.S, ReducedOneForm([r.th(1, 1)], [r.zero()]))

    def testSimpleCoboundary(self):
        """
        D0~ int u' du has vanishing indices.
        """
        r = self.r
        alpha = ReducedOneForm([r.u(1, 1)], [r.zero()])
        self.assertTrue(is_coboundary_indices(self.S, self.S.dtilde0(alpha)))

    def testRandomCoboundaries(self):
        """
        D0~ alpha + D1~ beta has zero, single-variable indices and is a cocycle.
        """
        S = build_pair([base_u(2, 1), 1])
        rng = make_rng(31)
        for _ in range(20):
            alpha = random_reduced_form(S.ring, rng, 1, 0, terms=2, udeg=3)
            beta = random_reduced_form(S.ring, rng, 1, 0, terms=2, udeg=3)
            w = cocycle_from_gauge(S, alpha, beta)
            ind = indices(S, w)
            self.assertTrue(ind.is_zero())
            self.assertTrue(ind.check_single_variable())
            self.assertTrue(is_cocycle(S, w))

    def testVectorText(self):
        """
        IndexVector prints its entries.
        """
        t = self.S.tower
        self.assertEqual(IndexVector([t.constant(-3)]).to_text(), ["-3"])


class TauTester(unittest.TestCase):
    def testKdV(self):
        """
        tau for f = 1, c = 1 is -3/2 int (th'' du + u'' dth).
        """
        S = build_pair([1])
        r = S.ring
        tau = build_tau(S, [1])
        self.assertEqual(tau, ReducedOneForm([r.th(1, 2).scale(-Fraction(3, 2))],
                                             [r.u(1, 2).scale(-Fraction(3, 2))]))
        self.assertEqual(tau.to_text(), "-3/2*th[1,2]*du[1] - 3/2*u[1,2]*dth[1]")
        self.assertTrue(is_cocycle(S, tau))
        self.assertEqual(indices(S, tau), [-3])

    def testZero(self):
        """
        c = 0 gives tau = 0.
        """
        S = build_pair([1])
        self.assertTrue(build_tau(S, [0]).is_zero())

    def testTwoComponents(self):
        """
        ind(tau) = -3 c for f = (u1, 1) and c = (u1^2, 1 + u2).
        """
        S = build_pair([base_u(2, 1), 1])
        t = S.tower
        c = [t.u(1) ** 2, t.u(2) + 1]
        tau = build_tau(S, c)
        self.assertTrue(is_cocycle(S, tau))
        ind = indices(S, tau)
        self.assertEqual(ind, [ci * -3 for ci in c])
        self.assertTrue(ind.check_single_variable())

    def testNonConstantMetric(self):
        """
        tau is a cocycle with indices -3 c whenever f depends on u.
        """
        u1 = base_u(1, 1)
        t1, t2 = base_u(2, 1), base_u(2, 2)
        cases = [([u1], [1]), ([u1], [u1]),
                 ([t1, 1], [1, 0]), ([t1, 1], [t1, 0]), ([t1, 1], [t1 ** 2, 0]),
                 ([t1, t2], [t1, 1]), ([t1, t2], [1, t2 ** 2])]
        for f, c in cases:
            S = build_pair(f)
            c = [S.tower.coerce(ci) for ci in c]
            tau = build_tau(S, c)
            self.assertTrue(is_cocycle(S, tau), tau.to_text())
            self.assertEqual(indices(S, tau), [ci * -3 for ci in c])

    def testMixedVariables(self):
        """
        c_1 may not depend on u2.
        """
        S = build_pair([1, 1])
        with self.assertRaises(NotSingleVariable) as cm:
            build_tau(S, [S.tower.u(2), 1])
        self.assertEqual(cm.exception.i, 1)
        with self.assertRaises(NotSingleVariable):
            IndexVector([S.tower.u(2), 1]).check_single_variable()


class NormalFormTester(unittest.TestCase):
    def setUp(self):
        self.S = build_pair([1])
        self.r = self.S.ring
        self.tau = build_tau(self.S, [1])
        self.expected = ReducedOneForm([self.r.th(1, 2).scale(-3)], [self.r.zero()])

    def testTau(self):
        """
        The u'' dth part of tau moves into th'' du.
        """
        normal, gauge = normalize_cocycle(self.S, self.tau)
        self.assertEqual(normal.form, self.expected)
        self.assertEqual(normal.violations(), [])
        self.assertEqual(normal.to_dict()["X"], {"1,1": "-3"})
        self.assertEqual(gauge.gamma, ReducedOneForm([self.r.u(1, 1).scale(-Fraction(3, 2))],
                                                     [self.r.zero()]))
        self.assertEqual(indices(self.S, normal.form), [-3])

    def testIdempotent(self):
        """
        A normal form comes back unchanged with a zero gauge.
        """
        normal, _ = normalize_cocycle(self.S, self.tau)
        again, gauge = normalize_cocycle(self.S, normal.form)
        self.assertEqual(again.form, normal.form)
        self.assertTrue(gauge.gamma.is_zero())
        self.assertTrue(gauge.alpha.is_zero())
        self.assertTrue(gauge.beta.is_zero())

    def testGaugeInvariance(self):
        """
        tau + D0~ alpha + D1~ beta has the normal form of tau.
        """
        S = self.S
        rng = make_rng(32)
        for _ in range(10):
            alpha = random_reduced_form(self.r, rng, 1, 0, terms=1, udeg=2)
            beta = random_reduced_form(self.r, rng, 1, 0, terms=1, udeg=2)
            w = self.tau + cocycle_from_gauge(S, alpha, beta)
            normal, gauge = normalize_cocycle(S, w)
            self.assertEqual(normal.form, self.expected)
            self.assertEqual(w + S.dtilde0(gauge.gamma) + cocycle_from_gauge(S, gauge.alpha,
                                                                              gauge.beta),
                             normal.form)

    def testLinkedGauge(self):
        """
        alpha_i = -u^i beta_i.
        """
        S = self.S
        w = self.tau + S.dtilde1(ReducedOneForm([self.r.u(1, 1)], [self.r.zero()]))
        _, gauge = normalize_cocycle(S, w)
        self.assertEqual(gauge.alpha, gauge.beta.map(lambda a: a.scale(-S.tower.u(1))))
        self.assertFalse(gauge.beta.is_zero())

    def testNotACocycle(self):
        """
        Forms outside the kernel of D0~ D1~ are refused.
        """
        with mock.patch("superjet.bihss.is_cocycle", return_value=False) as check:
            with self.assertRaises(NotACocycle):
                normalize_cocycle(self.S, self.tau)
        check.assert_called_once_with(self.S, self.tau)


class TwoComponentNormalFormTester(unittest.TestCase):
    """
    Normal forms of tau for f = (u1, 1) with c = (u1^2, 1 + u2), and for
    f = (u1, u2) with c = (u1, u2^2).
    """
    def setUp(self):
        t1, t2 = base_u(2, 1), base_u(2, 2)
        self.cases = []
        for f, c in (([t1, 1], [t1 ** 2, t2 + 1]), ([t1, t2], [t1, t2 ** 2])):
            S = build_pair(f)
            self.cases.append((S, build_tau(S, c), [S.tower.coerce(ci) * -3 for ci in c]))

    def testTau(self):
        """
        tau normalizes without violations and keeps its indices.
        """
        for S, tau, expected in self.cases:
            normal, gauge = normalize_cocycle(S, tau)
            self.assertEqual(normal.violations(), [])
            self.assertEqual(indices(S, normal.form), expected)
            self.assertTrue(is_cocycle(S, normal.form))
            self.assertEqual(tau + S.dtilde0(gauge.gamma) + cocycle_from_gauge(S, gauge.alpha,
                                                                                gauge.beta),
                             normal.form)

    def testIdempotent(self):
        """
        Normalizing a normal form changes nothing.
        """
        for S, tau, _ in self.cases:
            normal, _ = normalize_cocycle(S, tau)
            again, gauge = normalize_cocycle(S, normal.form)
            self.assertEqual(again.form, normal.form)
            self.assertEqual(again.to_dict(), normal.to_dict())
            self.assertTrue(gauge.gamma.is_zero())
            self.assertTrue(gauge.alpha.is_zero())
            self.assertTrue(gauge.beta.is_zero())

    def testGaugeInvariance(self):
        """
        Ten random D0~ alpha + D1~ beta shifts per structure leave the normal form alone.
        """
        rng = make_rng(33)
        for S, tau, _ in self.cases:
            normal, _ = normalize_cocycle(S, tau)
            for _ in range(10):
                alpha = random_reduced_form(S.ring, rng, 1, 0, terms=2, udeg=1)
                beta = random_reduced_form(S.ring, rng, 1, 0, terms=2, udeg=1)
                w = tau + cocycle_from_gauge(S, alpha, beta)
                shifted, gauge = normalize_cocycle(S, w)
                self.assertEqual(shifted.form, normal.form, w.to_text())
                self.assertEqual(w + S.dtilde0(gauge.gamma)
                                 + cocycle_from_gauge(S, gauge.alpha, gauge.beta),
                                 shifted.form)


class ConformalTester(unittest.TestCase):
    def testConstant(self):
        """
        f = (1) has d = (0).
        """
        self.assertEqual(conformal_check([1]), [0])

    def testTwoComponents(self):
        """
        f = (u1, 1) has d = (1, 0).
        """
        self.assertEqual(conformal_check([base_u(2, 1), 1]), [1, 0])

    def testIrreducibility(self):
        """
        f = (u2, 1) breaks (d^2 - d^1) d_2 f^1 = 0.
        """
        with self.assertRaises(IrreducibilityViolated) as cm:
            conformal_check([base_u(2, 2), 1])
        self.assertEqual((cm.exception.i, cm.exception.j), (2, 1))

    def testNotHomogeneous(self):
        """
        u1 + 1 has no Euler degree.
        """
        with self.assertRaises(NotHomogeneous):
            conformal_check([base_u(1, 1) + 1])

    def testDegenerate(self):
        """
        lambda1 = lambda0 is refused.
        """
        with self.assertRaises(DegenerateScaling):
            ConformalData([0], 1, 1, 0)

    def testKdVEuler(self):
        """
        E(u^(s)) = (2 + s) u^(s) and E(th^s) = (1 + s) th^s for (0, 2, 1).
        """
        S = build_pair([1])
        r = S.ring
        E = euler_field(S, ConformalData([0], 0, 2, 1))
        for s in range(4):
            self.assertEqual(E.u_weight(1, s), 2 + s)
            self.assertEqual(E.th_weight(1, s), 1 + s)
        self.assertEqual(E.apply(r.u(1, 2)), r.u(1, 2).scale(4))
        self.assertEqual(E(r.u(1)), r.u(1).scale(2))
        self.assertEqual(E(r.th(1) * r.th(1, 1)), (r.th(1) * r.th(1, 1)).scale(3))

    def testTwoComponentEuler(self):
        """
        f = (u1, 1), d = (1, 0): both commutation identities hold.
        """
        S = build_pair([base_u(2, 1), 1])
        E = euler_field(S, ConformalData([1, 0], 1, 3, 1))
        self.assertEqual(E.th_weight(1, 0), 0)
        self.assertEqual(E.th_weight(2, 0), 2)

    def testWrongDegrees(self):
        """
        Claiming d = (1) for KdV breaks [E, D0] = lambda0 D0.
        """
        S = build_pair([1])
        with self.assertRaises(ConformalityFailed) as cm:
            euler_field(S, ConformalData([1], 0, 2, 1))
        self.assertIn("D0", cm.exception.identity)


class CentralInvariantTester(unittest.TestCase):
    def setUp(self):
        self.S = build_pair([1])

    def testExponents(self):
        """
        m = 0 for (0, 2, 1) and m = 1/3 for (0, 3, 1).
        """
        law = conformal_central_invariants(ConformalData([0], 0, 2, 1))
        self.assertEqual(law.exponents, [0])
        law = conformal_central_invariants(ConformalData([0], 0, 3, 1))
        self.assertEqual(law.exponents, [Fraction(1, 3)])

    def testCancellation(self):
        """
        d = (l1 - l0 - 2 mu)/(l1 - l0) gives m = 0.
        """
        law = conformal_central_invariants(ConformalData([Fraction(1, 3)], 0, 3, 1))
        self.assertEqual(law.exponents, [0])

    def testPowerLaws(self):
        """
        C u^m solves the index equation for m in 0, 1/3, 1, 2.
        """
        for data in ((0, 2, 1), (0, 3, 1), (0, 2, 0), (0, 2, -1)):
            cd = ConformalData([0], *data)
            m = conformal_central_invariants(cd).exponents[0]
            self.assertTrue(index_ode_check(self.S, cd, [PowerLaw(5, m)]).is_zero())

    def testPolynomialSolutions(self):
        """
        u^2 for (0, 2, -1) and u for (0, 2, 0) as plain scalars.
        """
        u = self.S.tower.u(1)
        self.assertTrue(index_ode_check(self.S, ConformalData([0], 0, 2, -1), [u ** 2]).is_zero())
        self.assertTrue(index_ode_check(self.S, ConformalData([0], 0, 2, 0), [u]).is_zero())

    def testNonSolution(self):
        """
        c = 1 fails when m != 0; c = 0 always passes.
        """
        cd = ConformalData([0], 0, 3, 1)
        self.assertFalse(index_ode_check(self.S, cd, [1]).is_zero())
        self.assertFalse(index_ode_check(self.S, cd, [PowerLaw(1, 0)]).is_zero())
        self.assertTrue(index_ode_check(self.S, cd, [0]).is_zero())


class DeltaMinusOneTester(unittest.TestCase):
    def setUp(self):
        self.S = build_pair([1])
        self.r = self.S.ring
        self.lt = LambdaTower(self.S.tower)

    def testDhat(self):
        """
        dhat_1(u') = th'' and dhat_1(u) = 0.
        """
        r = self.r
        self.assertEqual(dhat(self.S, 1, r.u(1, 1)), r.th(1, 2))
        self.assertFalse(dhat(self.S, 1, r.u(1)))

    def testDhatSquare(self):
        """
        dhat_i dhat_j + dhat_j dhat_i = 0.
        """
        S = build_pair([1, 1])
        rng = make_rng(33)
        for _ in range(10):
            a = random_poly(S.ring, rng, 3, 1, terms=3)
            for i, j in ((1, 1), (1, 2)):
                total = dhat(S, i, dhat(S, j, a)) + dhat(S, j, dhat(S, i, a))
                self.assertFalse(total)

    def testJet(self):
        """
        Delta_{-1}(u') = (u - lam) th''.
        """
        r = self.r
        weight = self.lt.u(1) - self.lt.lam()
        self.assertEqual(delta_minus_one(self.S, r.u(1, 1)), r.th(1, 2).scale(weight))

    def testDifferential(self):
        """
        Delta_{-1}(du) = (u - lam) dth'.
        """
        r = self.r
        weight = self.lt.u(1) - self.lt.lam()
        out = delta_minus_one(self.S, ReducedOneForm([r.one()], [r.zero()]))
        self.assertEqual(out, OneForm(self.lt, {}, {(1, 1): r.one().scale(weight)}))

    def testSquare(self):
        """
        Delta_{-1} squares to zero on polynomials.
        """
        S = build_pair([base_u(2, 1), 1])
        rng = make_rng(34)
        for _ in range(10):
            a = random_poly(S.ring, rng, 3, 1, terms=3)
            self.assertFalse(delta_minus_one(S, delta_minus_one(S, a)))


class RescalingTester(unittest.TestCase):
    def setUp(self):
        self.S = build_pair([base_u(1, 1)], roots=True)
        self.r = self.S.ring
        self.rt = self.S.root_tower

    def testJet(self):
        """
        Psi(u'') = u u''.
        """
        r = self.r
        self.assertEqual(psi_rescale(self.S, r.u(1, 2)), r.u(1, 2).scale(self.S.tower.u(1)))

    def testTheta(self):
        """
        Psi(th) = s th.
        """
        r = self.r
        self.assertEqual(psi_rescale(self.S, r.th(1)), r.th(1).scale(self.rt.root(1)))

    def testRoundTrip(self):
        """
        The inverse rescaling undoes the forward one.
        """
        rng = make_rng(35)
        for _ in range(10):
            a = random_poly(self.r, rng, 2, 1, terms=3)
            self.assertEqual(psi_rescale(self.S, psi_rescale(self.S, a), "inv"), a)

    def testForm(self):
        """
        du is fixed and dth picks up s.
        """
        r = self.r
        out = psi_rescale(self.S, ReducedOneForm([r.one()], [r.one()]))
        self.assertEqual(out, OneForm(self.rt, {(1, 0): r.one()},
                                      {(1, 0): r.one().scale(self.rt.root(1))}))

    def testUnregistered(self):
        """
        Without roots the rescaling is refused.
        """
        S = build_pair([1])
        with self.assertRaises(RootNotRegistered):
            psi_rescale(S, S.ring.u(1, 1))
        with self.assertRaises(RootNotRegistered):
            rotation_coeffs(S)
        self.assertIsNotNone(S.with_roots().root_tower)


class RotationTester(unittest.TestCase):
    def testDiagonalMetric(self):
        """
        f = (u1, 1) has vanishing rotation coefficients.
        """
        S = build_pair([base_u(2, 1), 1], roots=True)
        gamma = rotation_coeffs(S)
        self.assertTrue(all(not c for row in gamma for c in row))

    def testMixedMetric(self):
        """
        f = (u1 u2, u2): gamma_12 = 0 and gamma_21 = -1/36 at u = (4, 9).
        """
        u1, u2 = base_u(2, 1), base_u(2, 2)
        S = SemisimpleHydroPair([u1 * u2, u2], verify=False, roots=True)
        gamma = rotation_coeffs(S)
        self.assertFalse(gamma[0][1])
        self.assertEqual(gamma[1][0].eval_at({1: 4, 2: 9}), Fraction(-1, 36))


class MNTester(unittest.TestCase):
    def testConstantMetric(self):
        """
        For constant f the closed form matches D0~ on random forms.
        """
        S = build_pair([1, 1])
        rng = make_rng(36)
        for _ in range(10):
            w = random_reduced_form(S.ring, rng, 2, 1, terms=2)
            M, N = mn_expansion(S, w)
            image = S.dtilde0(w)
            self.assertEqual(M, image.g)
            self.assertEqual(N, image.h)

    def testNonConstantMetric(self):
        """
        For f = (u1, 1) and f = (u1, u2) the closed form matches D0~ on
        random normal-form shaped forms.
        """
        t1, t2 = base_u(2, 1), base_u(2, 2)
        rng = make_rng(37)
        for f in ([t1, 1], [t1, t2]):
            S = build_pair(f)
            for _ in range(10):
                w = random_normal_form(S.ring, rng)
                M, N = mn_expansion(S, w)
                image = S.dtilde0(w)
                self.assertEqual(M, image.g, w.to_text())
                self.assertEqual(N, image.h, w.to_text())

    def testTau(self):
        """
        tau on KdV matches.
        """
        S = build_pair([1])
        tau = build_tau(S, [1])
        M, N = mn_expansion(S, tau)
        image = S.dtilde0(tau)
        self.assertEqual((M, N), (image.g, image.h))

    def testZero(self):
        """
        The zero form gives zero components.
        """
        S = build_pair([1])
        M, N = mn_expansion(S, S.zero_form())
        self.assertFalse(any(M) or any(N))

    def testShape(self):
        """
        Forms of super degree 2 are refused.
        """
        S = build_pair([1])
        r = S.ring
        with self.assertRaises(WrongShape):
            mn_expansion(S, ReducedOneForm([r.th(1) * r.th(1, 1)], [r.zero()]))


if __name__ == '__main__':
    unittest.main()
