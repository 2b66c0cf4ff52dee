"""
The graded super ring of differential polynomials.

A DiffPoly is a finite sum of terms

    c(u) * prod (u^{i,s})^e * theta_{a_1} ... theta_{a_k}

stored as a dict mapping a monomial key to its scalar coefficient. The key is
a triple (even, odd, logs):

* even -- sorted tuple of ((i, s), e) with s >= 1
* odd  -- strictly increasing tuple of (i, s); the sign of the canonical
  ordering is absorbed into the coefficient
* logs -- sorted tuple of (i, k), the power k of the formal symbol
  L[i] = log u^{i,1}; always empty outside ExtDiffPoly

Undifferentiated u-dependence always lives in the coefficient.
"""
from __future__ import absolute_import

import bisect
import itertools
import logging
import random
from collections import namedtuple
from fractions import Fraction

from superjet import config
from superjet.coeffs import BaseScalar, LambdaScalar, RootExtScalar
from superjet.errors import (DivisionByZero, MixedExtension, NonHomogeneous,
                             NotPolynomial, PoleAtPoint)

log = logging.getLogger(__name__)

JetVar = namedtuple("JetVar", "parity i s")
"""A generator: parity 'even' is u^{i,s}, parity 'odd' is theta_i^s."""

Bidegree = namedtuple("Bidegree", "d p")
"""(deg_x, deg_theta) of a homogeneous element."""

_ONE_KEY = ((), (), ())


def even_var(i, s=0):
    return JetVar("even", i, s)


def odd_var(i, s=0):
    return JetVar("odd", i, s)


def _merge_even(a, b):
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for var, e in b:
        total = exps.get(var, 0) + e
        if total:
            exps[var] = total
        else:
            del exps[var]
    return tuple(sorted(exps.items()))


def _merge_odd(a, b):
    """
    Concatenate two canonical odd sequences.

    :returns: (sign, merged) or (0, None) when a generator repeats
    """
    if not a:
        return 1, b
    if not b:
        return 1, a
    swaps = 0
    for g in b:
        pos = bisect.bisect_left(a, g)
        if pos < len(a) and a[pos] == g:
            return 0, None
        swaps += len(a) - pos
    merged = tuple(sorted(a + b))
    return (-1 if swaps % 2 else 1), merged


def _sort_odd(seq):
    """
    Sort a sequence of odd generators, tracking the permutation sign.

    :returns: (sign, sorted tuple) or (0, None) if a generator repeats
    """
    seq = list(seq)
    sign = 1
    for i in range(1, len(seq)):
        j = i
        while j > 0 and seq[j - 1] > seq[j]:
            seq[j - 1], seq[j] = seq[j], seq[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and seq[j - 1] == seq[j]:
            return 0, None
    return sign, tuple(seq)


def _bump_even(even, var, delta):
    exps = dict(even)
    total = exps.get(var, 0) + delta
    if total:
        exps[var] = total
    else:
        exps.pop(var, None)
    return tuple(sorted(exps.items()))


def _bump_logs(logs, i, delta):
    powers = dict(logs)
    total = powers.get(i, 0) + delta
    if total:
        powers[i] = total
    else:
        powers.pop(i, None)
    return tuple(sorted(powers.items()))


def _key_degrees(key):
    even, odd, logs = key
    d = sum(s * e for (_, s), e in even) + sum(s for _, s in odd)
    return d, len(odd)


class DiffPoly(object):
    """
    An element of the differential polynomial ring over a scalar tower.
    """
    __slots__ = ("tower", "terms", "_hash")
    extended = False

    def __init__(self, tower, terms=None):
        """
        :param tower: scalar tower of every coefficient
        :param terms: dict key -> scalar; zero coefficients are dropped
        """
        self.tower = tower
        self.terms = dict((k, c) for k, c in (terms or {}).items() if c)
        self._hash = None

    # construction helpers

    @classmethod
    def _kind(cls, a, b):
        return ExtDiffPoly if (a.extended or b.extended) else DiffPoly

    def _new(self, terms, kind=None):
        return (kind or type(self))(self.tower, terms)

    def _align(self, other):
        """Bring self and other into one tower."""
        if isinstance(other, DiffPoly):
            if other.tower == self.tower:
                return self, other
            if other.tower == self.tower.base:
                return self, other.lift(self.tower)
            if self.tower == other.tower.base:
                return self.lift(other.tower), other
            raise MixedExtension()
        return self, self.constant(other)

    def constant(self, c):
        """A constant (jet-free) DiffPoly in this tower."""
        if not isinstance(c, (BaseScalar, LambdaScalar, RootExtScalar)):
            c = self.tower.coerce(c)
        elif c.tower != self.tower:
            c = self.tower.lift(c)
        return type(self)(self.tower, {_ONE_KEY: c})

    def lift(self, tower):
        """Embed into an extension tower."""
        if tower == self.tower:
            return self
        return type(self)(tower, dict((k, tower.lift(c)) for k, c in self.terms.items()))

    # arithmetic

    def __add__(self, other):
        a, b = self._align(other)
        terms = dict(a.terms)
        for k, c in b.terms.items():
            if k in terms:
                terms[k] = terms[k] + c
            else:
                terms[k] = c
        return DiffPoly._kind(a, b)(a.tower, terms)

    __radd__ = __add__

    def __neg__(self):
        return self._new(dict((k, -c) for k, c in self.terms.items()))

    def __sub__(self, other):
        a, b = self._align(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, DiffPoly):
            return self.scale(other)
        a, b = self._align(other)
        terms = {}
        for (ea, oa, la), ca in a.terms.items():
            for (eb, ob, lb), cb in b.terms.items():
                sign, odd = _merge_odd(oa, ob)
                if not sign:
                    continue
                key = (_merge_even(ea, eb), odd, _merge_even(la, lb))
                c = ca * cb if sign > 0 else -(ca * cb)
                if key in terms:
                    terms[key] = terms[key] + c
                else:
                    terms[key] = c
        return DiffPoly._kind(a, b)(a.tower, terms)

    def __rmul__(self, other):
        # scalars commute with everything
        return self.scale(other)

    def scale(self, c):
        """Multiply every coefficient by a scalar of this tower (or its base)."""
        if isinstance(c, (int, Fraction)):
            if c == 0:
                return self._new({})
            c = self.tower.coerce(c)
        elif c.tower != self.tower:
            if c.tower == self.tower.base:
                c = self.tower.lift(c)
            elif self.tower == c.tower.base:
                return self.lift(c.tower).scale(c)
            else:
                raise MixedExtension()
        return self._new(dict((k, v * c) for k, v in self.terms.items()))

    def __truediv__(self, c):
        if isinstance(c, (int, Fraction)):
            if not c:
                raise DivisionByZero()
            return self.scale(Fraction(1) / Fraction(c))
        return self.scale(c.inverse())

    __div__ = __truediv__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.constant(other) if other else self._new({})
        if not isinstance(other, DiffPoly):
            return NotImplemented
        try:
            a, b = self._align(other)
        except MixedExtension:
            return False
        return a.terms == b.terms

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    __nonzero__ = __bool__

    def __repr__(self):
        return "%s(%s)" % (type(self).__name__, self.to_text())

    def __str__(self):
        return self.to_text()

    # structure

    @property
    def n(self):
        return self.tower.n

    def items(self):
        """Terms in canonical order."""
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0][1]), kv[0][1], kv[0][0], kv[0][2]))

    def coefficient(self, even=(), odd=(), logs=()):
        """
        The scalar coefficient of one canonical monomial.

        :param even: iterable of ((i, s), e) or a dict
        :param odd: iterable of (i, s), any order; the reordering sign is applied
        """
        if isinstance(even, dict):
            even = even.items()
        sign, odd = _sort_odd(odd)
        if not sign:
            return self.tower.zero()
        c = self.terms.get((tuple(sorted(even)), odd, tuple(sorted(logs))))
        if c is None:
            return self.tower.zero()
        return c if sign > 0 else -c

    def jet_vars(self):
        """Every generator (including u^{i,0} for coefficient dependence) the value involves."""
        found = set()
        for (even, odd, logs), c in self.terms.items():
            for (i, s), _ in even:
                found.add(even_var(i, s))
            for i, s in odd:
                found.add(odd_var(i, s))
            for i, _ in logs:
                found.add(even_var(i, 1))
            for i in range(1, self.n + 1):
                if c.depends_on(i):
                    found.add(even_var(i, 0))
        return found

    def max_order(self):
        orders = [v.s for v in self.jet_vars()]
        return max(orders) if orders else 0

    def deg_theta(self):
        return self.bidegree().p

    def deg_x(self):
        return self.bidegree().d

    def is_homogeneous(self):
        return len(set(_key_degrees(k) for k in self.terms)) <= 1

    def bidegree(self):
        """
        Bidegree of a homogeneous value; zero reports (0, 0).

        :raises NonHomogeneous: for mixed values
        """
        degrees = set(_key_degrees(k) for k in self.terms)
        if not degrees:
            return Bidegree(0, 0)
        if len(degrees) > 1:
            raise NonHomogeneous("value mixes bidegrees {degrees}", degrees=sorted(degrees))
        d, p = degrees.pop()
        return Bidegree(d, p)

    def theta_degree(self):
        """deg_theta of a value homogeneous in deg_theta only."""
        degrees = set(len(k[1]) for k in self.terms)
        if len(degrees) > 1:
            raise NonHomogeneous("value mixes super degrees {degrees}", degrees=sorted(degrees))
        return degrees.pop() if degrees else 0

    def grade_components(self):
        """
        Split into homogeneous parts.

        :returns: dict Bidegree -> DiffPoly, summing to self
        """
        parts = {}
        for key, c in self.terms.items():
            d, p = _key_degrees(key)
            parts.setdefault(Bidegree(d, p), {})[key] = c
        return dict((deg, self._new(terms)) for deg, terms in parts.items())

    def map_coefficients(self, fn):
        return self._new(dict((k, fn(c)) for k, c in self.terms.items()))

    # calculus

    def dx(self):
        """The total derivative."""
        terms = {}

        def acc(key, c):
            if key in terms:
                terms[key] = terms[key] + c
            else:
                terms[key] = c

        n = self.n
        for key, c in self.terms.items():
            even, odd, logs = key
            for i in range(1, n + 1):
                dc = c.partial(i)
                if dc:
                    acc((_bump_even(even, (i, 1), 1), odd, logs), dc)
            for (i, s), e in even:
                bumped = _bump_even(_bump_even(even, (i, s), -1), (i, s + 1), 1)
                acc((bumped, odd, logs), c * e)
            for m, (i, s) in enumerate(odd):
                sign, new_odd = _sort_odd(odd[:m] + ((i, s + 1),) + odd[m + 1:])
                if sign:
                    acc((even, new_odd, logs), c if sign > 0 else -c)
            for i, k in logs:
                new_even = _bump_even(_bump_even(even, (i, 2), 1), (i, 1), -1)
                acc((new_even, odd, _bump_logs(logs, i, -1)), c * k)
        return self._new(terms)

    def dx_n(self, times):
        out = self
        for _ in range(times):
            out = out.dx()
        return out

    def partial_even(self, i, s):
        """
        d/du^{i,s}; s = 0 differentiates the coefficients.
        """
        if s == 0:
            return self._new(dict((k, c.partial(i)) for k, c in self.terms.items()))
        terms = {}
        var = (i, s)
        for (even, odd, logs), c in self.terms.items():
            exps = dict(even)
            e = exps.get(var, 0)
            if e:
                key = (_bump_even(even, var, -1), odd, logs)
                terms[key] = terms[key] + c * e if key in terms else c * e
            if s == 1:
                k = dict(logs).get(i, 0)
                if k:
                    key = (_bump_even(even, var, -1), odd, _bump_logs(logs, i, -1))
                    terms[key] = terms[key] + c * k if key in terms else c * k
        return self._new(terms)

    def partial_odd(self, i, s, side="left"):
        """
        d/dtheta_i^s: the generator is moved to the front (left) or to the
        end (right) of its monomial before removal.
        """
        terms = {}
        var = (i, s)
        for (even, odd, logs), c in self.terms.items():
            if var not in odd:
                continue
            m = odd.index(var)
            flips = m if side == "left" else len(odd) - 1 - m
            key = (even, odd[:m] + odd[m + 1:], logs)
            terms[key] = c if flips % 2 == 0 else -c
        return self._new(terms)

    def partial(self, v, side="left"):
        """Partial derivative with respect to a JetVar."""
        if v.parity == "even":
            return self.partial_even(v.i, v.s)
        return self.partial_odd(v.i, v.s, side=side)

    def variational(self, kind, i, side="left"):
        """
        sum_s (-d/dx)^s d/dv^{i,s} for v = u (kind 'u') or theta (kind 'th').
        """
        top = self.max_order()
        parts = []
        for s in range(top + 1):
            if kind == "u":
                parts.append(self.partial_even(i, s))
            else:
                parts.append(self.partial_odd(i, s, side=side))
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = p - out.dx()
        return out

    def oracle(self, point):
        """
        Coefficients of each odd monomial at a numeric point.

        :param point: dict (i, s) -> rational covering every even jet
            variable, coefficient dependence via (i, 0)
        :returns: dict odd tuple -> Fraction (zeros dropped)
        """
        if self.extended and any(k[2] or any(e < 0 for _, e in k[0]) for k in self.terms):
            raise NotPolynomial(residue=self.to_text())
        base_point = dict((i, point[(i, 0)]) for i in range(1, self.n + 1) if (i, 0) in point)
        out = {}
        for (even, odd, logs), c in self.terms.items():
            value = c.eval_at(base_point)
            for var, e in even:
                try:
                    value *= Fraction(point[var]) ** e
                except KeyError:
                    raise PoleAtPoint("no value for u[{i},{s}]", i=var[0], s=var[1])
            out[odd] = out.get(odd, Fraction(0)) + value
        return dict((k, v) for k, v in out.items() if v)

    # text

    def to_text(self):
        if not self.terms:
            return "0"
        pieces = []
        for (even, odd, logs), c in self.items():
            factors = []
            for (i, s), e in even:
                factors.append("u[%d,%d]" % (i, s) if e == 1 else "u[%d,%d]^%d" % (i, s, e))
            for i, k in logs:
                factors.append("L[%d]" % i if k == 1 else "L[%d]^%d" % (i, k))
            factors.extend("th[%d,%d]" % g for g in odd)
            ctext = c.to_text()
            if not factors:
                pieces.append(ctext if c.is_simple_text() else "(%s)" % ctext)
            elif ctext == "1":
                pieces.append("*".join(factors))
            elif ctext == "-1":
                pieces.append("-" + "*".join(factors))
            elif c.is_simple_text():
                pieces.append("%s*%s" % (ctext, "*".join(factors)))
            else:
                pieces.append("(%s)*%s" % (ctext, "*".join(factors)))
        text = pieces[0]
        for piece in pieces[1:]:
            if piece.startswith("-"):
                text += " - " + piece[1:]
            else:
                text += " + " + piece
        return text


class ExtDiffPoly(DiffPoly):
    """
    A DiffPoly whose monomials may carry L[i] = log u^{i,1} and negative
    powers of u^{i,1}. Only the tau construction produces these.
    """
    __slots__ = ()
    extended = True


def assert_polynomial(a):
    """
    Return a as a plain DiffPoly.

    :raises NotPolynomial: carrying the offending terms when a log symbol or
        a negative power survives
    """
    bad = dict((k, c) for k, c in a.terms.items()
               if k[2] or any(e < 0 for _, e in k[0]))
    if bad:
        raise NotPolynomial(residue=ExtDiffPoly(a.tower, bad).to_text())
    return DiffPoly(a.tower, a.terms)


class JetRing(object):
    """
    Factory for generators and constants over a scalar tower.
    """

    def __init__(self, tower):
        self.tower = tower
        self.n = tower.n

    def __eq__(self, other):
        return isinstance(other, JetRing) and other.tower == self.tower

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.tower)

    def zero(self):
        return DiffPoly(self.tower)

    def one(self):
        return self.scalar(1)

    def scalar(self, c):
        """A constant-in-jets polynomial with coefficient c."""
        return DiffPoly(self.tower).constant(c)

    def u(self, i, s=0):
        """u^{i,s}; s = 0 is the coefficient function u^i."""
        self.tower.check_index(i)
        if s == 0:
            return self.scalar(self.tower.u(i))
        return DiffPoly(self.tower, {((((i, s), 1),), (), ()): self.tower.one()})

    def th(self, i, s=0):
        """theta_i^s."""
        self.tower.check_index(i)
        return DiffPoly(self.tower, {((), ((i, s),), ()): self.tower.one()})

    gen_u = u
    gen_th = th

    def const(self, q):
        """:param q: int, Fraction or text like '3/2'"""
        return self.scalar(self.tower.constant(q))

    def log_symbol(self, i):
        """L[i] = log u^{i,1} as an ExtDiffPoly."""
        self.tower.check_index(i)
        return ExtDiffPoly(self.tower, {((), (), ((i, 1),)): self.tower.one()})

    def inverse_u1(self, i):
        """(u^{i,1})^{-1} as an ExtDiffPoly."""
        self.tower.check_index(i)
        return ExtDiffPoly(self.tower, {((((i, 1), -1),), (), ()): self.tower.one()})

    def monomial(self, even=(), odd=(), coeff=1):
        """
        Build c * prod u^{i,s}^e * theta... from raw generator lists.

        :param even: iterable of ((i, s), e), s >= 1
        :param odd: iterable of (i, s) in the intended product order
        """
        sign, odd = _sort_odd(odd)
        if not sign:
            return self.zero()
        c = self.tower.coerce(coeff) if isinstance(coeff, (int, Fraction)) else coeff
        if sign < 0:
            c = -c
        return DiffPoly(self.tower, {(tuple(sorted(even)), odd, ()): c})


def mul(a, b):
    return a * b


def dx(a):
    return a.dx()


def partial(a, v, side="left"):
    return a.partial(v, side=side)


def variational_derivative(a, kind, i):
    """
    Euler operator; kind is 'u' or 'th' (left derivatives for theta).
    """
    return a.variational(kind, i)


def grade_components(a):
    return a.grade_components()


def eval_oracle(a, point):
    return a.oracle(point)


def lift(a, tower):
    """Move a DiffPoly into an extension of its tower."""
    return a.lift(tower)


def random_point(a, rng, top=None):
    """
    A point covering every even jet variable of a, coordinates drawn from
    1..oracle_range.
    """
    span = config.get("oracle_range")
    top = a.max_order() if top is None else top
    return dict(((i, s), Fraction(rng.randint(1, span)))
                for i in range(1, a.n + 1) for s in range(top + 1))


def oracle_equal(a, b, points=None, seed=None):
    """
    Compare two polynomials by evaluation at random rational points.

    Independent of canonical storage; agreement at every point is evidence,
    not proof, of equality. Points that hit a pole are redrawn.

    :param points: number of points; config oracle_points by default
    :param seed: config random_seed by default
    """
    a, b = a._align(b)
    points = config.get("oracle_points") if points is None else points
    rng = random.Random(config.get("random_seed") if seed is None else seed)
    top = max(a.max_order(), b.max_order())
    done = 0
    attempts = 0
    while done < points:
        attempts += 1
        if attempts > 10 * points:
            raise PoleAtPoint("no pole-free evaluation point found")
        point = random_point(a, rng, top)
        try:
            if a.oracle(point) != b.oracle(point):
                log.debug("oracle mismatch", extra={"point": sorted(point.items())})
                return False
        except PoleAtPoint:
            continue
        done += 1
    return True


def naive_mul(a, b):
    """
    Multiply by expanding every monomial into an explicit factor list and
    bubble-sorting the odd factors, counting transpositions.

    Independent of the merge-based product; used to cross-check it.
    """
    a, b = a._align(b)
    out = DiffPoly(a.tower)
    for (ea, oa, la), ca in a.terms.items():
        for (eb, ob, lb), cb in b.terms.items():
            factors = list(oa) + list(ob)
            sign = 1
            for i in range(len(factors)):
                for j in range(len(factors) - 1 - i):
                    if factors[j] > factors[j + 1]:
                        factors[j], factors[j + 1] = factors[j + 1], factors[j]
                        sign = -sign
            if any(x == y for x, y in zip(factors, factors[1:])):
                continue
            even = {}
            for var, e in itertools.chain(ea, eb):
                even[var] = even.get(var, 0) + e
            key = (tuple(sorted((v, e) for v, e in even.items() if e)), tuple(factors), ())
            c = ca * cb
            out = out + DiffPoly(a.tower, {key: c if sign > 0 else -c})
    return out
