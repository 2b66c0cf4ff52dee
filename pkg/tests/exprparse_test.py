"""
Test the exprparse module
"""
from __future__ import print_function

import unittest
from fractions import Fraction

from superjet.coeffs import LambdaTower, base_tower
from superjet.errors import IndexOutOfRange, ParseError, RootNotRegistered
from superjet.exprparse import parse_expr, to_text
from superjet.forms import OneForm, ReducedOneForm
from superjet.functionals import LocalFunctional
from superjet.jetring import JetRing
from tests.fixtures import make_rng, random_poly

HALF = Fraction(1, 2)


class PolynomialParseTester(unittest.TestCase):
    def setUp(self):
        self.r = JetRing(base_tower(1))

    def testPrimeNotation(self):
        """
        th1' is th[1,1] and u1'' is u[1,2].
        """
        r = self.r
        self.assertEqual(parse_expr("th1'", n=1), r.th(1, 1))
        self.assertEqual(parse_expr("u1''", n=1), r.u(1, 2))
        self.assertEqual(parse_expr("u[1,2]", n=1), r.u(1, 2))

    def testCoefficientFunction(self):
        """
        u[1] with no jet order is the coefficient u^1.
        """
        r = self.r
        self.assertEqual(parse_expr("u[1]", n=1), r.u(1))
        self.assertEqual(parse_expr("u1", n=1), r.u(1))

    def testArithmetic(self):
        """
        Rational constants, products and sums.
        """
        r = self.r
        self.assertEqual(parse_expr("1/2*th1*th1'", n=1), (r.th(1) * r.th(1, 1)).scale(HALF))
        self.assertEqual(parse_expr("u1'^2 - 3*u1''", n=1),
                         r.u(1, 1) * r.u(1, 1) - r.u(1, 2).scale(3))
        self.assertEqual(parse_expr("-(th[1,0])", n=1), -r.th(1))

    def testOddOrder(self):
        """
        Odd factors anticommute.
        """
        r = self.r
        self.assertEqual(parse_expr("th1'*th1", n=1), -(r.th(1) * r.th(1, 1)))

    def testDivideByCoefficient(self):
        """
        Division by u[1] gives a rational coefficient.
        """
        r = self.r
        t = r.tower
        self.assertEqual(parse_expr("th[1,1]/u[1]", n=1), r.th(1, 1).scale(t.one() / t.u(1)))

    def testExtendedSymbols(self):
        """
        L[1] and u1'^-1 are the extended symbols.
        """
        r = self.r
        self.assertEqual(parse_expr("L[1]", n=1), r.log_symbol(1))
        self.assertEqual(parse_expr("u1'^-1", n=1), r.inverse_u1(1))

    def testLambda(self):
        """
        lam lives in the lambda tower.
        """
        lt = LambdaTower(base_tower(1))
        self.assertEqual(parse_expr("lam", n=1), JetRing(lt).scalar(lt.lam()))

    def testRoundTrip(self):
        """
        Canonical text parses back to the same polynomial.
        """
        rng = make_rng(31)
        ring = JetRing(base_tower(2))
        for d, p in ((1, 1), (2, 2), (3, 1)):
            f = random_poly(ring, rng, d, p, terms=3, udeg=2)
            self.assertEqual(parse_expr(to_text(f), n=2), f)


class FormParseTester(unittest.TestCase):
    def setUp(self):
        self.t = base_tower(1)
        self.r = JetRing(self.t)

    def testOneForm(self):
        """
        A coefficient-left product with a differential is a OneForm.
        """
        r = self.r
        self.assertEqual(parse_expr("u[1,1]*du[1]", n=1), OneForm(self.t, {(1, 0): r.u(1, 1)}))
        self.assertEqual(parse_expr("th1*dth[1,2]", n=1),
                         OneForm(self.t, {}, {(1, 2): r.th(1)}))

    def testIntegratedForm(self):
        """
        int(...) of a 1-form is its reduced representative.
        """
        r = self.r
        self.assertEqual(parse_expr("int(u[1]*du[1,1])", n=1),
                         ReducedOneForm([-r.u(1, 1)], [r.zero()]))
        w = ReducedOneForm([r.u(1, 1)], [r.th(1, 1).scale(-1)])
        self.assertEqual(parse_expr(to_text(w), n=1), w)

    def testFunctional(self):
        """
        int(...) of a polynomial is a LocalFunctional.
        """
        r = self.r
        value = parse_expr("int(1/2*th1*th1')", n=1)
        self.assertIsInstance(value, LocalFunctional)
        self.assertEqual(value, LocalFunctional((r.th(1) * r.th(1, 1)).scale(HALF)))

    def testScaledIntegral(self):
        """
        Coefficients may multiply an integrated form.
        """
        r = self.r
        self.assertEqual(parse_expr("3*int(th1'*du[1])", n=1),
                         ReducedOneForm([r.th(1, 1).scale(3)], [r.zero()]))


class ParseErrorTester(unittest.TestCase):
    def testPosition(self):
        """
        Errors report the 1-based line and character.
        """
        with self.assertRaises(ParseError) as cm:
            parse_expr("1 +", n=1)
        self.assertEqual((cm.exception.line, cm.exception.char), (1, 4))
        with self.assertRaises(ParseError) as cm:
            parse_expr("th[1,0]\n  + )", n=1)
        self.assertEqual((cm.exception.line, cm.exception.char), (2, 5))
        self.assertEqual(str(cm.exception), "line 2, char 5: expected a value")

    def testUnclosed(self):
        """
        Missing brackets and trailing input are refused.
        """
        for text in ("u[1", "(th1", "int(u1", "th1 th1"):
            self.assertRaises(ParseError, parse_expr, text, 1)

    def testDifferentialPlacement(self):
        """
        A differential must be the last factor.
        """
        self.assertRaises(ParseError, parse_expr, "du[1]*u[1,1]", 1)

    def testIndexRange(self):
        """
        u[3] is outside 1..2.
        """
        with self.assertRaises(IndexOutOfRange) as cm:
            parse_expr("u[3,1]", n=2)
        self.assertEqual((cm.exception.i, cm.exception.n), (3, 2))
        self.assertRaises(IndexOutOfRange, parse_expr, "th3", 2)

    def testRootNeedsTower(self):
        """
        s[i] needs a root tower.
        """
        self.assertRaises(RootNotRegistered, parse_expr, "s[1]", 1)


if __name__ == '__main__':
    unittest.main()
