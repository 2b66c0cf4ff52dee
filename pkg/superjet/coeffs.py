"""
Exact coefficient arithmetic for the jet ring.

Three kinds of scalars are provided, each tied to a *tower* describing the
field it lives in:

* BaseScalar -- a rational function of u^1..u^n over QQ
* LambdaScalar -- a polynomial in the formal parameter lambda with BaseScalar
  coefficients
* RootExtScalar -- an element of the base field extended by square roots
  s_i of registered functions f^i, every s_i exponent reduced to 0 or 1
  using s_i^2 = f^i

Rational functions are held as sympy FracElement values over QQ with the
graded lexicographic order, normalized so the leading coefficient of the
denominator is 1. Two scalars are therefore equal exactly when their stored
numerator and denominator are identical.
"""
from __future__ import absolute_import

import math
from fractions import Fraction

from sympy import QQ
from sympy.polys.fields import FracField
from sympy.polys.orderings import grlex

from superjet.errors import (DivisionByZero, MixedExtension, NonSquareRoot,
                             PoleAtPoint, IndexOutOfRange)

_base_towers = {}


def base_tower(n):
    """
    Return the (shared) base tower for n dependent variables.

    :param n: number of variables u^1..u^n, n >= 1
    """
    try:
        return _base_towers[n]
    except KeyError:
        tower = _base_towers[n] = BaseTower(n)
        return tower


def to_fraction(q):
    """Convert a QQ domain element (or int, Fraction, or text like "3/2") to Fraction."""
    if isinstance(q, Fraction):
        return q
    if isinstance(q, (int, str)):
        return Fraction(q)
    return Fraction(int(q.numerator), int(q.denominator))


def _qq(value):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def _eval_poly(poly, values):
    total = Fraction(0)
    for monom, coeff in poly.iterterms():
        term = to_fraction(coeff)
        for value, exp in zip(values, monom):
            if exp:
                term *= value ** exp
        total += term
    return total


def _point_values(n, point):
    if isinstance(point, dict):
        try:
            return [Fraction(point[i]) for i in range(1, n + 1)]
        except KeyError as exc:
            raise PoleAtPoint("point does not assign u[{i}]", i=exc.args[0])
    values = [Fraction(v) for v in point]
    if len(values) < n:
        raise PoleAtPoint("point assigns {m} of {n} variables", m=len(values), n=n)
    return values[:n]


def _monic(frac):
    lc = frac.denom.LC
    if lc == 1:
        return frac
    inv = QQ(1) / lc
    return frac.raw_new(frac.numer.mul_ground(inv), frac.denom.mul_ground(inv))


def _poly_text(poly, names):
    if not poly:
        return "0"
    pieces = []
    for monom, coeff in poly.terms():
        c = to_fraction(coeff)
        factors = []
        for name, exp in zip(names, monom):
            if exp == 1:
                factors.append(name)
            elif exp:
                factors.append("%s^%d" % (name, exp))
        sign = "-" if c < 0 else "+"
        c = abs(c)
        if not factors:
            body = str(c)
        elif c == 1:
            body = "*".join(factors)
        else:
            body = "%s*%s" % (c, "*".join(factors))
        pieces.append((sign, body))
    first_sign, first = pieces[0]
    text = ("-" + first) if first_sign == "-" else first
    for sign, body in pieces[1:]:
        text += " %s %s" % (sign, body)
    return text


def _frac_text(frac, names):
    num = _poly_text(frac.numer, names)
    if frac.denom == 1:
        return num
    return "(%s)/(%s)" % (num, _poly_text(frac.denom, names))


def _is_simple(text):
    """True if text can be a factor of a product without parentheses."""
    body = text[1:] if text.startswith("-") else text
    return not any(op in body for op in (" + ", " - ", "/("))


class BaseTower(object):
    """
    The field QQ(u^1, ..., u^n).
    """
    kind = "base"

    def __init__(self, n):
        if n < 1:
            raise IndexOutOfRange(i=n, n="n")
        self.n = n
        self.names = ["u[%d]" % i for i in range(1, n + 1)]
        self.field = FracField(",".join("u%d" % i for i in range(1, n + 1)), QQ, grlex)

    @property
    def base(self):
        return self

    def __eq__(self, other):
        return isinstance(other, BaseTower) and other.n == self.n

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(("base", self.n))

    def __repr__(self):
        return "BaseTower(%d)" % self.n

    def check_index(self, i):
        if not 1 <= i <= self.n:
            raise IndexOutOfRange(i=i, n=self.n)

    def is_compatible(self, other):
        """True if values of the two towers can be combined."""
        return other == self or other.base == self

    def wrap(self, frac):
        return BaseScalar(self, frac)

    def zero(self):
        return BaseScalar(self, self.field.zero)

    def one(self):
        return BaseScalar(self, self.field.one)

    def constant(self, q):
        """:param q: int, Fraction or string like '3/2'"""
        return BaseScalar(self, self.field(_qq(q)))

    def u(self, i):
        """The coordinate function u^i."""
        self.check_index(i)
        return BaseScalar(self, self.field.gens[i - 1])

    def coerce(self, value):
        """
        Convert value into a scalar of this tower.

        :param value: int, Fraction, or a scalar of this tower or of its base
        """
        if isinstance(value, (int, Fraction)):
            return self.constant(value)
        if isinstance(value, BaseScalar) and value.tower == self:
            return value
        raise MixedExtension()

    def lift(self, value):
        return self.coerce(value)


class LambdaTower(object):
    """
    The polynomial ring K[lambda] over a base tower K.
    """
    kind = "lambda"

    def __init__(self, base):
        self.base = base
        self.n = base.n

    def __eq__(self, other):
        return isinstance(other, LambdaTower) and other.base == self.base

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(("lambda", self.n))

    def __repr__(self):
        return "LambdaTower(%d)" % self.n

    def check_index(self, i):
        self.base.check_index(i)

    def is_compatible(self, other):
        return other == self or other == self.base

    def zero(self):
        return LambdaScalar(self, ())

    def one(self):
        return LambdaScalar(self, (self.base.field.one,))

    def constant(self, q):
        return self.lift(self.base.constant(q))

    def u(self, i):
        return self.lift(self.base.u(i))

    def lam(self):
        """The formal parameter lambda."""
        field = self.base.field
        return LambdaScalar(self, (field.zero, field.one))

    def coerce(self, value):
        if isinstance(value, LambdaScalar) and value.tower == self:
            return value
        return self.lift(value)

    def lift(self, value):
        if isinstance(value, (int, Fraction)):
            value = self.base.constant(value)
        if isinstance(value, BaseScalar) and value.tower == self.base:
            return LambdaScalar(self, (value.frac,))
        if isinstance(value, LambdaScalar) and value.tower == self:
            return value
        raise MixedExtension()


class RootTower(object):
    """
    The base field extended by s_1..s_n with s_i^2 = f^i.
    """
    kind = "root"

    def __init__(self, base, f):
        """
        :param base: the BaseTower
        :param f: sequence of n nonzero BaseScalar values f^i
        """
        if len(f) != base.n:
            raise IndexOutOfRange("need {n} root functions, got {i}", i=len(f), n=base.n)
        for i, fi in enumerate(f, 1):
            if not fi:
                raise DivisionByZero("cannot register a root of f[{i}] = 0", i=i)
        self.base = base
        self.n = base.n
        self.f = tuple(base.coerce(fi).frac for fi in f)

    def __eq__(self, other):
        return (isinstance(other, RootTower) and other.base == self.base
                and other.f == self.f)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(("root", self.n, self.f))

    def __repr__(self):
        return "RootTower(%d)" % self.n

    def check_index(self, i):
        self.base.check_index(i)

    def is_compatible(self, other):
        return other == self or other == self.base

    def zero(self):
        return RootExtScalar(self, {})

    def one(self):
        return RootExtScalar(self, {0: self.base.field.one})

    def constant(self, q):
        return self.lift(self.base.constant(q))

    def u(self, i):
        return self.lift(self.base.u(i))

    def root(self, i):
        """The symbol s_i."""
        self.check_index(i)
        return RootExtScalar(self, {1 << (i - 1): self.base.field.one})

    def root_power(self, i, k):
        """
        Return (f^i)^(k/2) for any integer k.

        :param i: root index
        :param k: integer exponent numerator
        """
        self.check_index(i)
        fi = self.f[i - 1]
        if k % 2 == 0:
            return RootExtScalar(self, {0: fi ** (k // 2)})
        return RootExtScalar(self, {1 << (i - 1): fi ** ((k - 1) // 2)})

    def coerce(self, value):
        if isinstance(value, RootExtScalar) and value.tower == self:
            return value
        return self.lift(value)

    def lift(self, value):
        if isinstance(value, (int, Fraction)):
            value = self.base.constant(value)
        if isinstance(value, BaseScalar) and value.tower == self.base:
            return RootExtScalar(self, {0: value.frac})
        if isinstance(value, RootExtScalar) and value.tower == self:
            return value
        raise MixedExtension()


class _Scalar(object):
    """
    Shared operator plumbing; subclasses implement _add, _mul, _neg and
    _inverse on operands already coerced into their own tower.
    """

    def _coerce(self, other):
        if isinstance(other, (int, Fraction)):
            return self.tower.coerce(other)
        if isinstance(other, _Scalar):
            if other.tower == self.tower:
                return other
            if isinstance(other, BaseScalar) and other.tower == self.tower.base:
                return self.tower.lift(other)
            return None
        raise TypeError("cannot combine %s with %r" % (type(self).__name__, other))

    def _binary(self, other, op, reflected=False):
        if not isinstance(other, (int, Fraction, _Scalar)):
            return NotImplemented
        coerced = self._coerce(other)
        if coerced is None:
            if isinstance(other, _Scalar) and self.tower == other.tower.base:
                return NotImplemented
            raise MixedExtension()
        if reflected:
            return op(coerced, self)
        return op(self, coerced)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a._add(b))

    def __radd__(self, other):
        return self._binary(other, lambda a, b: a._add(b), reflected=True)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a._add(b._neg()))

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: a._add(b._neg()), reflected=True)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a._mul(b))

    def __rmul__(self, other):
        return self._binary(other, lambda a, b: a._mul(b), reflected=True)

    def __truediv__(self, other):
        return self._binary(other, lambda a, b: a._mul(b.inverse()))

    def __rtruediv__(self, other):
        return self._binary(other, lambda a, b: a._mul(b.inverse()), reflected=True)

    __div__ = __truediv__
    __rdiv__ = __rtruediv__

    def __neg__(self):
        return self._neg()

    def __pos__(self):
        return self

    def __pow__(self, k):
        if not isinstance(k, int):
            raise TypeError("integer exponents only")
        if k < 0:
            return self.inverse() ** (-k)
        result = self.tower.one()
        base = self
        while k:
            if k & 1:
                result = result._mul(base)
            base = base._mul(base)
            k >>= 1
        return result

    def power(self, k):
        """self ** k for any integer k."""
        return self ** k

    def __ne__(self, other):
        return not self == other

    def inverse(self):
        if not self:
            raise DivisionByZero()
        return self._inverse()

    def __repr__(self):
        return "%s(%s)" % (type(self).__name__, self.to_text())

    def __str__(self):
        return self.to_text()

    def is_simple_text(self):
        return _is_simple(self.to_text())


class BaseScalar(_Scalar):
    """
    A rational function of u^1..u^n.
    """
    __slots__ = ("tower", "frac", "_hash")

    def __init__(self, tower, frac):
        self.tower = tower
        self.frac = _monic(frac)
        self._hash = None

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.tower.constant(other)
        if not isinstance(other, BaseScalar):
            if isinstance(other, _Scalar):
                try:
                    return other.tower.lift(self) == other
                except MixedExtension:
                    return False
            return NotImplemented
        return self.tower == other.tower and self.frac == other.frac

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.tower, self.frac))
        return self._hash

    def __bool__(self):
        return bool(self.frac.numer)

    __nonzero__ = __bool__

    def _add(self, other):
        return BaseScalar(self.tower, self.frac + other.frac)

    def _mul(self, other):
        return BaseScalar(self.tower, self.frac * other.frac)

    def _neg(self):
        return BaseScalar(self.tower, -self.frac)

    def _inverse(self):
        return BaseScalar(self.tower, self.tower.field.one / self.frac)

    def partial(self, i):
        """
        Partial derivative with respect to u^i.

        :param i: 1-based variable index
        """
        self.tower.check_index(i)
        if not self.frac.numer:
            return self
        return BaseScalar(self.tower, self.frac.diff(self.tower.field.gens[i - 1]))

    def depends_on(self, i):
        """True if the function involves u^i."""
        idx = i - 1
        return (any(m[idx] for m in self.frac.numer.itermonoms())
                or any(m[idx] for m in self.frac.denom.itermonoms()))

    def is_constant(self):
        return self.frac.numer.is_ground and self.frac.denom.is_ground

    def constant_value(self):
        """The Fraction value of a constant scalar."""
        zeros = [Fraction(0)] * self.tower.n
        return _eval_poly(self.frac.numer, zeros) / _eval_poly(self.frac.denom, zeros)

    def eval_at(self, point):
        """
        Exact evaluation.

        :param point: dict index -> rational or sequence u^1..u^n
        :returns: Fraction
        """
        values = _point_values(self.tower.n, point)
        den = _eval_poly(self.frac.denom, values)
        if den == 0:
            raise PoleAtPoint()
        return _eval_poly(self.frac.numer, values) / den

    def to_text(self):
        return _frac_text(self.frac, self.tower.names)


class LambdaScalar(_Scalar):
    """
    A polynomial in lambda with rational-function coefficients.
    """
    __slots__ = ("tower", "coeffs", "_hash")

    def __init__(self, tower, coeffs):
        coeffs = [_monic(c) for c in coeffs]
        while coeffs and not coeffs[-1].numer:
            coeffs.pop()
        self.tower = tower
        self.coeffs = tuple(coeffs)
        self._hash = None

    def __eq__(self, other):
        if not isinstance(other, LambdaScalar):
            if isinstance(other, (int, Fraction, BaseScalar)):
                try:
                    other = self.tower.lift(other)
                except MixedExtension:
                    return False
            else:
                return NotImplemented
        return self.tower == other.tower and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.tower, self.coeffs))
        return self._hash

    def __bool__(self):
        return bool(self.coeffs)

    __nonzero__ = __bool__

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def coeff(self, k):
        """The BaseScalar coefficient of lambda^k."""
        if 0 <= k < len(self.coeffs):
            return BaseScalar(self.tower.base, self.coeffs[k])
        return self.tower.base.zero()

    def _add(self, other):
        zero = self.tower.base.field.zero
        size = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (zero,) * (size - len(self.coeffs))
        b = other.coeffs + (zero,) * (size - len(other.coeffs))
        return LambdaScalar(self.tower, [x + y for x, y in zip(a, b)])

    def _mul(self, other):
        if not self.coeffs or not other.coeffs:
            return self.tower.zero()
        out = [self.tower.base.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return LambdaScalar(self.tower, out)

    def _neg(self):
        return LambdaScalar(self.tower, [-c for c in self.coeffs])

    def _inverse(self):
        if self.degree > 0:
            raise DivisionByZero("cannot invert a nonconstant polynomial in lambda")
        return LambdaScalar(self.tower, (self.tower.base.field.one / self.coeffs[0],))

    def partial(self, i):
        self.tower.check_index(i)
        gen = self.tower.base.field.gens[i - 1]
        return LambdaScalar(self.tower, [c.diff(gen) for c in self.coeffs])

    def depends_on(self, i):
        return any(self.coeff(k).depends_on(i) for k in range(len(self.coeffs)))

    def is_constant(self):
        return self.degree <= 0 and self.coeff(0).is_constant()

    def eval_at(self, point, lam=None):
        """
        Exact evaluation; lam must be given unless the value is free of lambda.
        """
        if lam is None:
            if self.degree > 0:
                raise MixedExtension("lambda needs a value for evaluation")
            return self.coeff(0).eval_at(point)
        total = Fraction(0)
        for k in range(len(self.coeffs)):
            total += self.coeff(k).eval_at(point) * Fraction(lam) ** k
        return total

    def to_text(self):
        if not self.coeffs:
            return "0"
        pieces = []
        for k, c in enumerate(self.coeffs):
            if not c.numer:
                continue
            text = _frac_text(c, self.tower.base.names)
            if k == 0:
                pieces.append(text)
                continue
            lam = "lam" if k == 1 else "lam^%d" % k
            if text == "1":
                pieces.append(lam)
            elif text == "-1":
                pieces.append("-" + lam)
            else:
                pieces.append("(%s)*%s" % (text, lam))
        return " + ".join(pieces).replace("+ -", "- ")


class RootExtScalar(_Scalar):
    """
    sum over subsets A of roots of c_A(u) * prod_{i in A} s_i.

    Subsets are stored as bit masks, bit i-1 standing for s_i.
    """
    __slots__ = ("tower", "parts", "_hash")

    def __init__(self, tower, parts):
        self.tower = tower
        self.parts = dict((mask, _monic(c)) for mask, c in parts.items() if c.numer)
        self._hash = None

    def __eq__(self, other):
        if not isinstance(other, RootExtScalar):
            if isinstance(other, (int, Fraction, BaseScalar)):
                try:
                    other = self.tower.lift(other)
                except MixedExtension:
                    return False
            else:
                return NotImplemented
        return self.tower == other.tower and self.parts == other.parts

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.tower, tuple(sorted(self.parts.items(), key=lambda kv: kv[0]))))
        return self._hash

    def __bool__(self):
        return bool(self.parts)

    __nonzero__ = __bool__

    def _add(self, other):
        parts = dict(self.parts)
        zero = self.tower.base.field.zero
        for mask, c in other.parts.items():
            parts[mask] = parts.get(mask, zero) + c
        return RootExtScalar(self.tower, parts)

    def _relation(self, mask):
        out = self.tower.base.field.one
        i = 0
        while mask:
            if mask & 1:
                out = out * self.tower.f[i]
            mask >>= 1
            i += 1
        return out

    def _mul(self, other):
        parts = {}
        zero = self.tower.base.field.zero
        for ma, ca in self.parts.items():
            for mb, cb in other.parts.items():
                mask = ma ^ mb
                parts[mask] = parts.get(mask, zero) + ca * cb * self._relation(ma & mb)
        return RootExtScalar(self.tower, parts)

    def _neg(self):
        return RootExtScalar(self.tower, dict((m, -c) for m, c in self.parts.items()))

    def _conjugate(self, i):
        bit = 1 << (i - 1)
        return RootExtScalar(self.tower, dict(
            (m, -c if m & bit else c) for m, c in self.parts.items()))

    def _inverse(self):
        numer = self.tower.one()
        cur = self
        for i in range(1, self.tower.n + 1):
            bit = 1 << (i - 1)
            if any(m & bit for m in cur.parts):
                conj = cur._conjugate(i)
                numer = numer._mul(conj)
                cur = cur._mul(conj)
        # cur is free of every root now
        inv = self.tower.base.field.one / cur.parts[0]
        return numer._mul(RootExtScalar(self.tower, {0: inv}))

    def part(self, mask):
        """The BaseScalar coefficient of the root monomial with this mask."""
        return BaseScalar(self.tower.base, self.parts.get(mask, self.tower.base.field.zero))

    def partial(self, i):
        """
        d/du^i, using d_i s_j = (d_i f^j) / (2 f^j) * s_j.
        """
        self.tower.check_index(i)
        gen = self.tower.base.field.gens[i - 1]
        zero = self.tower.base.field.zero
        parts = {}
        for mask, c in self.parts.items():
            acc = c.diff(gen)
            j = 0
            m = mask
            while m:
                if m & 1:
                    fj = self.tower.f[j]
                    acc += c * fj.diff(gen) / (2 * fj)
                m >>= 1
                j += 1
            parts[mask] = parts.get(mask, zero) + acc
        return RootExtScalar(self.tower, parts)

    def depends_on(self, i):
        return any(self.part(m).depends_on(i) for m in self.parts)

    def is_constant(self):
        return list(self.parts) in ([], [0]) and self.part(0).is_constant()

    def eval_at(self, point):
        """
        Exact evaluation; s_i is the nonnegative square root of f^i(point).
        """
        values = _point_values(self.tower.n, point)
        roots = {}
        total = Fraction(0)
        for mask, c in self.parts.items():
            term = BaseScalar(self.tower.base, c).eval_at(values)
            j = 0
            m = mask
            while m:
                if m & 1:
                    if j not in roots:
                        roots[j] = self._root_value(j, values)
                    term *= roots[j]
                m >>= 1
                j += 1
            total += term
        return total

    def _root_value(self, j, values):
        value = BaseScalar(self.tower.base, self.tower.f[j]).eval_at(values)
        if value < 0:
            raise NonSquareRoot(i=j + 1, value=value)
        num = math.isqrt(value.numerator)
        den = math.isqrt(value.denominator)
        if num * num != value.numerator or den * den != value.denominator:
            raise NonSquareRoot(i=j + 1, value=value)
        return Fraction(num, den)

    def to_text(self):
        if not self.parts:
            return "0"
        pieces = []
        for mask in sorted(self.parts):
            text = _frac_text(self.parts[mask], self.tower.base.names)
            roots = ["s[%d]" % (j + 1) for j in range(self.tower.n) if mask >> j & 1]
            if not roots:
                pieces.append(text)
            elif text == "1":
                pieces.append("*".join(roots))
            elif text == "-1":
                pieces.append("-" + "*".join(roots))
            else:
                pieces.append("(%s)*%s" % (text, "*".join(roots)))
        return " + ".join(pieces).replace("+ -", "- ")


def field_ops(a, b, op):
    """
    Apply a field operation to two scalars.

    :param op: one of 'add', 'sub', 'mul', 'div'
    """
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError("unknown operation %r" % op)


def partial_u(a, i):
    """d/du^i of any scalar."""
    return a.partial(i)


def eval_at(a, point, lam=None):
    """Exact evaluation of any scalar at a rational point."""
    if isinstance(a, LambdaScalar):
        return a.eval_at(point, lam=lam)
    return a.eval_at(point)
