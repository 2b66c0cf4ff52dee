from __future__ import print_function

import unittest
from fractions import Fraction

from superjet import config
from superjet.coeffs import LambdaTower, base_tower
from superjet.errors import NonHomogeneous, NotPolynomial, PoleAtPoint
from superjet.jetring import (Bidegree, ExtDiffPoly, JetRing, assert_polynomial, dx,
                              eval_oracle, even_var, grade_components, lift, mul, naive_mul,
                              odd_var, oracle_equal, partial, variational_derivative)
from tests.fixtures import make_rng, random_poly

HALF = Fraction(1, 2)


class ProductTester(unittest.TestCase):
    def setUp(self):
        self.r1 = JetRing(base_tower(1))
        self.r2 = JetRing(base_tower(2))

    def testNilpotence(self):
        """
        th1 * th1 vanishes.
        """
        th = self.r1.th(1)
        self.assertFalse(th * th)

    def testAnticommutation(self):
        """
        th1' th1 is -th1 th1'.
        """
        r = self.r1
        product = r.th(1, 1) * r.th(1)
        self.assertEqual(product, -(r.th(1) * r.th(1, 1)))
        self.assertEqual(product.coefficient(odd=[(1, 0), (1, 1)]), -1)
        self.assertEqual(product.coefficient(odd=[(1, 1), (1, 0)]), 1)

    def testOrderedProduct(self):
        """
        (u1' th1)(th1' th2) keeps sign +1 and agrees with the naive multiplier.
        """
        r = self.r2
        a = r.u(1, 1) * r.th(1)
        b = r.th(1, 1) * r.th(2)
        expected = r.monomial(even=[((1, 1), 1)], odd=[(1, 0), (1, 1), (2, 0)])
        self.assertEqual(mul(a, b), expected)
        self.assertEqual(naive_mul(a, b), expected)
        self.assertEqual(expected.coefficient(even={(1, 1): 1}, odd=[(1, 0), (1, 1), (2, 0)]), 1)

    def testNaiveAgreement(self):
        """
        Merge-based and naive products agree on random operands.
        """
        rng = make_rng(3)
        for _ in range(20):
            a = random_poly(self.r2, rng, rng.randint(0, 2), rng.randint(0, 2), terms=3)
            b = random_poly(self.r2, rng, rng.randint(0, 2), rng.randint(0, 2), terms=3)
            self.assertEqual(a * b, naive_mul(a, b))

    def testSupercommutation(self):
        """
        ab = (-1)^(pq) ba for homogeneous a, b.
        """
        rng = make_rng(4)
        for _ in range(20):
            p = rng.randint(0, 2)
            q = rng.randint(0, 2)
            a = random_poly(self.r2, rng, 1, p, terms=2)
            b = random_poly(self.r2, rng, 1, q, terms=2)
            sign = -1 if p * q % 2 else 1
            self.assertEqual(a * b, (b * a).scale(sign))

    def testScalarsCommute(self):
        """
        Scalar multiples from either side agree.
        """
        r = self.r1
        u1 = r.tower.u(1)
        self.assertEqual(r.th(1) * u1, u1 * r.th(1))
        self.assertEqual(r.th(1) * 3, r.th(1).scale(3))


class CalculusTester(unittest.TestCase):
    def setUp(self):
        self.r1 = JetRing(base_tower(1))
        self.r2 = JetRing(base_tower(2))

    def testTotalDerivative(self):
        """
        dx(u1 th1) is u1' th1 + u1 th1'.
        """
        r = self.r1
        expected = r.u(1, 1) * r.th(1) + r.u(1) * r.th(1, 1)
        self.assertEqual(dx(r.u(1) * r.th(1)), expected)

    def testLogDerivative(self):
        """
        dx(u1' L1) is u1'' L1 + u1''.
        """
        r = self.r1
        value = r.u(1, 1) * r.log_symbol(1)
        self.assertIsInstance(value, ExtDiffPoly)
        self.assertEqual(value.dx(), r.u(1, 2) * r.log_symbol(1) + r.u(1, 2))

    def testGradingLaw(self):
        """
        dx raises deg_x by one.
        """
        r = self.r2
        f = r.th(1) * r.th(2, 1)
        self.assertEqual(f.bidegree(), Bidegree(1, 2))
        self.assertEqual(dx(f).bidegree(), Bidegree(2, 2))
        self.assertEqual(dx(f).deg_x(), 2)
        self.assertEqual(dx(f).deg_theta(), 2)

    def testOddPartials(self):
        """
        Left derivatives move the generator to the front first.
        """
        r = self.r1
        f = r.th(1) * r.th(1, 1)
        self.assertEqual(partial(f, odd_var(1, 1)), -r.th(1))
        self.assertEqual(partial(f, odd_var(1, 0)), r.th(1, 1))
        self.assertEqual(f.partial_odd(1, 1, side="right"), r.th(1))

    def testEvenPartial(self):
        """
        d/du1' of u1 u1' is u1.
        """
        r = self.r1
        self.assertEqual(partial(r.u(1) * r.u(1, 1), even_var(1, 1)), r.u(1))
        self.assertEqual(partial(r.u(1) * r.u(1, 1), even_var(1, 0)), r.u(1, 1))

    def testVariationalTheta(self):
        """
        d/dth1 of 1/2 th1 th1' is th1'.
        """
        r = self.r1
        f = (r.th(1) * r.th(1, 1)).scale(HALF)
        self.assertEqual(variational_derivative(f, "th", 1), r.th(1, 1))

    def testVariationalU(self):
        """
        d/du1 of 1/2 u1 th1 th1' is 1/2 th1 th1'.
        """
        r = self.r1
        f = (r.u(1) * r.th(1) * r.th(1, 1)).scale(HALF)
        self.assertEqual(variational_derivative(f, "u", 1), (r.th(1) * r.th(1, 1)).scale(HALF))

    def testTotalDerivativesInKernel(self):
        """
        Every variational derivative of dx(a) vanishes.
        """
        rng = make_rng(5)
        r = self.r2
        for _ in range(20):
            a = dx(random_poly(r, rng, rng.randint(0, 2), rng.randint(0, 2), terms=2, udeg=2))
            for i in (1, 2):
                self.assertFalse(a.variational("u", i))
                self.assertFalse(a.variational("th", i))

    def testLeibniz(self):
        """
        dx(ab) = dx(a) b + a dx(b).
        """
        rng = make_rng(6)
        r = self.r2
        for _ in range(20):
            a = random_poly(r, rng, 1, rng.randint(0, 2))
            b = random_poly(r, rng, 1, rng.randint(0, 2))
            self.assertEqual(dx(a * b), dx(a) * b + a * dx(b))


class GradingTester(unittest.TestCase):
    def setUp(self):
        self.r = JetRing(base_tower(2))

    def testComponents(self):
        """
        u1' th1 + th1 th2 splits by bidegree.
        """
        r = self.r
        first = r.u(1, 1) * r.th(1)
        second = r.th(1) * r.th(2)
        parts = grade_components(first + second)
        self.assertEqual(set(parts), {Bidegree(1, 1), Bidegree(0, 2)})
        self.assertEqual(parts[Bidegree(1, 1)], first)
        self.assertEqual(parts[Bidegree(0, 2)], second)

    def testZero(self):
        """
        Zero has no components.
        """
        self.assertEqual(grade_components(self.r.zero()), {})

    def testMixed(self):
        """
        bidegree() of a mixed value raises NonHomogeneous.
        """
        r = self.r
        value = r.u(1, 1) + r.th(1)
        self.assertFalse(value.is_homogeneous())
        with self.assertRaises(NonHomogeneous):
            value.bidegree()


class PolynomialTester(unittest.TestCase):
    def setUp(self):
        self.r = JetRing(base_tower(1))

    def testCancelledLogs(self):
        """
        u1' L1 - u1' L1 is a polynomial (zero).
        """
        value = self.r.u(1, 1) * self.r.log_symbol(1)
        self.assertFalse(assert_polynomial(value - value))

    def testSurvivingLog(self):
        """
        L1 alone is not a polynomial; the residue is reported.
        """
        with self.assertRaises(NotPolynomial) as cm:
            assert_polynomial(self.r.log_symbol(1))
        self.assertIn("L[1]", cm.exception.residue)

    def testInverseU1(self):
        """
        u1' times its inverse is one.
        """
        value = self.r.u(1, 1) * self.r.inverse_u1(1)
        self.assertEqual(assert_polynomial(value), self.r.one())


class OracleTester(unittest.TestCase):
    def setUp(self):
        self.r1 = JetRing(base_tower(1))
        self.r2 = JetRing(base_tower(2))

    def tearDown(self):
        config.reset()

    def testSimple(self):
        """
        u1 th1 at u1 = 3.
        """
        value = self.r1.u(1) * self.r1.th(1)
        self.assertEqual(eval_oracle(value, {(1, 0): 3}), {((1, 0),): 3})

    def testJetValues(self):
        """
        (u1 + u1') th1 th2 at u1 = 1, u1' = 2.
        """
        r = self.r2
        value = (r.u(1) + r.u(1, 1)) * r.th(1) * r.th(2)
        point = {(1, 0): 1, (1, 1): 2, (2, 0): 5}
        self.assertEqual(eval_oracle(value, point), {((1, 0), (2, 0)): 3})

    def testMissingJet(self):
        """
        A point without a needed jet value raises PoleAtPoint.
        """
        with self.assertRaises(PoleAtPoint):
            eval_oracle(self.r1.u(1, 2), {(1, 0): 1})

    def testEquivalence(self):
        """
        dx(u1 th1) and u1' th1 + u1 th1' agree at random points.
        """
        r = self.r1
        self.assertTrue(oracle_equal(dx(r.u(1) * r.th(1)),
                                     r.u(1, 1) * r.th(1) + r.u(1) * r.th(1, 1)))
        self.assertFalse(oracle_equal(dx(r.u(1) * r.th(1)), r.u(1, 1) * r.th(1)))

    def testConfiguredPoints(self):
        """
        oracle_points and random_seed come from config.
        """
        config.update({"oracle_points": 2, "random_seed": 5})
        r = self.r2
        self.assertTrue(oracle_equal(r.u(1) * r.u(2, 1), r.u(2, 1).scale(r.tower.u(1))))


class RingTester(unittest.TestCase):
    def testGenerators(self):
        """
        u(i, 0) is the coefficient function; gen_u and gen_th are aliases.
        """
        t = base_tower(2)
        r = JetRing(t)
        self.assertEqual(r.u(2), r.scalar(t.u(2)))
        self.assertEqual(r.gen_u(1, 1), r.u(1, 1))
        self.assertEqual(r.gen_th(2, 3), r.th(2, 3))
        self.assertEqual(r.const("3/2"), r.scalar(Fraction(3, 2)))

    def testText(self):
        """
        Canonical text lists even jets, then odd generators.
        """
        r = JetRing(base_tower(1))
        self.assertEqual((r.u(1, 1) * r.th(1)).to_text(), "u[1,1]*th[1,0]")
        self.assertEqual((r.th(1) * r.th(1, 1)).scale(-HALF).to_text(), "-1/2*th[1,0]*th[1,1]")
        self.assertEqual(r.zero().to_text(), "0")

    def testLift(self):
        """
        lift moves a polynomial into the lambda tower.
        """
        t = base_tower(1)
        r = JetRing(t)
        lt = LambdaTower(t)
        lifted = lift(r.u(1, 1), lt)
        self.assertEqual(lifted.tower, lt)
        self.assertEqual(lifted, r.u(1, 1))


if __name__ == '__main__':
    unittest.main()
