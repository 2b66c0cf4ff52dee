"""
Text syntax for differential polynomials, 1-forms and local functionals.

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := atom ('^' ['-'] digits)?
    atom    := digits | 'u[' i [',' s] ']' | 'th[' i [',' s] ']'
             | 'du[' i [',' s] ']' | 'dth[' i [',' s] ']'
             | 'lam' | 'L[' i ']' | 's[' i ']'
             | 'u' i "'"* | 'th' i "'"*
             | 'int(' expr ')' | '(' expr ')'

``u[i]`` is the coefficient function u^i and ``u1''`` is u[1,2]. A
differential du/dth must be the last factor of its product; 1-forms are
written coefficient-left. ``int(...)`` of a polynomial is a LocalFunctional,
of a 1-form its reduced representative.
"""
from __future__ import absolute_import

import re

from superjet.coeffs import LambdaTower, RootTower, base_tower
from superjet.errors import RootNotRegistered
from superjet.forms import OneForm, ReducedOneForm, reduce_mod_dx
from superjet.functionals import LocalFunctional
from superjet.jetring import _ONE_KEY, DiffPoly, JetRing
from superjet.scanner import Scanner


class _ExprParser(Scanner):
    _prime_re = re.compile(r"(th|u)(\d+)('*)")
    _index_re = re.compile(r"\d+")

    def __init__(self, text, tower):
        Scanner.__init__(self, text)
        self.tower = tower
        self.base = tower.base
        self._rings = {}

    def ring(self, tower=None):
        tower = tower or self.tower
        try:
            return self._rings[tower]
        except KeyError:
            ring = self._rings[tower] = JetRing(tower)
            return ring

    # combination rules

    def add(self, a, b, sign=1):
        if sign < 0:
            b = -b
        if isinstance(a, DiffPoly) and isinstance(b, DiffPoly):
            return a + b
        if isinstance(a, OneForm) and isinstance(b, OneForm):
            return a + b
        if isinstance(a, LocalFunctional) and isinstance(b, LocalFunctional):
            return a + b
        if isinstance(a, ReducedOneForm) and isinstance(b, ReducedOneForm):
            return a + b
        # a zero polynomial is neutral everywhere
        if isinstance(a, DiffPoly) and not a:
            return b
        if isinstance(b, DiffPoly) and not b:
            return a
        self.error("cannot add %s and %s" % (_kind(a), _kind(b)))

    def mul(self, a, b):
        if isinstance(a, DiffPoly) and isinstance(b, DiffPoly):
            return a * b
        if isinstance(a, DiffPoly) and isinstance(b, OneForm):
            u_parts = dict((k, a * v) for k, v in b.u_parts.items())
            th_parts = dict((k, a * v) for k, v in b.th_parts.items())
            tower = b.tower
            for v in list(u_parts.values()) + list(th_parts.values()):
                tower = v.tower
            return OneForm(tower, u_parts, th_parts)
        if isinstance(b, DiffPoly) and is_coefficient(b):
            c = b.terms.get(_ONE_KEY)
            if c is None:
                return self._zero_like(a)
            if isinstance(a, (LocalFunctional, ReducedOneForm)):
                return a.scale(c)
        if isinstance(a, DiffPoly) and is_coefficient(a):
            c = a.terms.get(_ONE_KEY)
            if c is None:
                return self._zero_like(b)
            if isinstance(b, (LocalFunctional, ReducedOneForm)):
                return b.scale(c)
        if isinstance(a, OneForm):
            self.error("a differential must be the last factor of a product")
        self.error("cannot multiply %s by %s" % (_kind(a), _kind(b)))

    def _zero_like(self, x):
        if isinstance(x, LocalFunctional):
            return LocalFunctional(self.ring().zero())
        if isinstance(x, ReducedOneForm):
            return ReducedOneForm.zero(self.ring())
        return OneForm(self.tower)

    def div(self, a, b):
        if not (isinstance(b, DiffPoly) and is_coefficient(b)):
            self.error("can only divide by a coefficient")
        c = b.terms.get(_ONE_KEY)
        if c is None:
            self.error("division by zero")
        return self.mul(a, b._new({_ONE_KEY: c.inverse()}))

    def power(self, a, k):
        if not isinstance(a, DiffPoly):
            self.error("only polynomials can be raised to a power")
        if k < 0:
            if is_coefficient(a) and a:
                return a._new({_ONE_KEY: a.terms[_ONE_KEY] ** k})
            u1 = _single_u1(a)
            if u1 is None:
                self.error("negative powers apply to coefficients and u[i,1] only")
            a, k = self.ring().inverse_u1(u1), -k
        out = a.constant(1)
        for _ in range(k):
            out = out * a
        return out

    # grammar

    def parse_expr(self):
        self.parse_s()
        value = self.parse_term()
        while True:
            self.parse_s()
            if self.parse_literal('+'):
                value = self.add(value, self.parse_term())
            elif self.parse_literal('-'):
                value = self.add(value, self.parse_term(), sign=-1)
            else:
                return value

    def parse_term(self):
        self.parse_s()
        value = self.parse_unary()
        while True:
            self.parse_s()
            if self.parse_literal('*'):
                value = self.mul(value, self.parse_unary())
            elif self.parse_literal('/'):
                value = self.div(value, self.parse_unary())
            else:
                return value

    def parse_unary(self):
        self.parse_s()
        if self.parse_literal('-'):
            return -self.parse_unary()
        if self.parse_literal('+'):
            return self.parse_unary()
        return self.parse_power()

    def parse_power(self):
        value = self.parse_atom()
        self.parse_s()
        if self.parse_literal('^'):
            self.parse_s()
            negative = self.parse_literal('-') is not None
            digits = self.required(self.parse_number(), 'expected integer exponent')
            value = self.power(value, -int(digits) if negative else int(digits))
        return value

    def _parse_indices(self, allow_order=True):
        self.parse_s()
        i = int(self.required(self.parse_re(self._index_re), 'expected index'))
        s = 0
        self.parse_s()
        if allow_order and self.parse_literal(','):
            self.parse_s()
            s = int(self.required(self.parse_re(self._index_re), 'expected jet order'))
            self.parse_s()
        self.required(self.parse_literal(']'), 'expected close bracket')
        self.tower.check_index(i)
        return i, s

    def parse_atom(self):
        self.parse_s()
        digits = self.parse_number()
        if digits is not None:
            return self.ring().scalar(int(digits))
        if self.parse_literal('('):
            value = self.parse_expr()
            self.parse_s()
            self.required(self.parse_literal(')'), 'expected close paren')
            return value
        if self.parse_literal('int('):
            value = self.parse_expr()
            self.parse_s()
            self.required(self.parse_literal(')'), 'expected close paren')
            return self._integrate(value)
        # longest tokens first
        if self.parse_literal('dth['):
            i, s = self._parse_indices()
            return OneForm(self.tower, th_parts={(i, s): self.ring().one()})
        if self.parse_literal('du['):
            i, s = self._parse_indices()
            return OneForm(self.tower, u_parts={(i, s): self.ring().one()})
        if self.parse_literal('th['):
            i, s = self._parse_indices()
            return self.ring().th(i, s)
        if self.parse_literal('u['):
            i, s = self._parse_indices()
            return self.ring().u(i, s)
        if self.parse_literal('L['):
            i, _ = self._parse_indices(allow_order=False)
            return self.ring().log_symbol(i)
        if self.parse_literal('s['):
            i, _ = self._parse_indices(allow_order=False)
            if not isinstance(self.tower, RootTower):
                raise RootNotRegistered()
            return self.ring().scalar(self.tower.root(i))
        if self.parse_literal('lam'):
            lam_tower = self.tower if isinstance(self.tower, LambdaTower) else LambdaTower(self.base)
            return self.ring(lam_tower).scalar(lam_tower.lam())
        m = self.parse_re(self._prime_re)
        if m:
            kind, i, primes = self._prime_re.match(m).groups()
            i = int(i)
            self.tower.check_index(i)
            if kind == "u":
                return self.ring().u(i, len(primes))
            return self.ring().th(i, len(primes))
        self.error('expected a value')

    def _integrate(self, value):
        if isinstance(value, DiffPoly):
            return LocalFunctional(value)
        if isinstance(value, OneForm):
            return reduce_mod_dx(value)
        self.error("cannot integrate %s" % _kind(value))


def _kind(value):
    return type(value).__name__


def is_coefficient(a):
    return all(k == _ONE_KEY for k in a.terms)


def _single_u1(a):
    if len(a.terms) != 1:
        return None
    (even, odd, logs), c = list(a.terms.items())[0]
    if odd or logs or len(even) != 1 or c != c.tower.one():
        return None
    (i, s), e = even[0]
    return i if (s, e) == (1, 1) else None


def parse_expr(text, n=None, tower=None):
    """
    Parse text into a DiffPoly, OneForm, ReducedOneForm or LocalFunctional.

    :param text: expression in the syntax above
    :param n: number of dependent variables, when no tower is given
    :param tower: scalar tower to parse into (a RootTower enables s[i])
    :raises ParseError: with 1-based line and char of the offending input
    :raises IndexOutOfRange: for u[i], th[i] with i outside 1..n
    """
    if tower is None:
        tower = base_tower(n)
    p = _ExprParser(text, tower)
    value = p.parse_expr()
    p.parse_s()
    p.required(p.parse_eof(), 'expected end of input')
    return value


def to_text(value):
    """Canonical text of any parsed value; parse_expr(to_text(x)) == x."""
    if isinstance(value, ReducedOneForm):
        return "int(%s)" % value.to_text()
    return value.to_text()
