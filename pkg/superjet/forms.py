"""
Variational 1-forms, their reduction modulo d/dx, Lie derivatives along
evolutionary derivations and the correspondence between derivations and
reduced 1-forms.

Forms are written coefficient-left: a term g * du[i,s] stores g under the
key (i, s). The differential of a polynomial takes right derivatives in the
odd generators, so d(th[a]*th[b]) = -th[b]*dth[a] + th[a]*dth[b].
"""
from __future__ import absolute_import

import logging

from superjet.coeffs import LambdaTower
from superjet.errors import NonHomogeneous, UnverifiedStructure
from superjet.functionals import EvDerivation, commutator, derivation_of
from superjet.jetring import DiffPoly

log = logging.getLogger(__name__)


def _sign(k):
    return -1 if k % 2 else 1


def _add_part(parts, key, value):
    if not value:
        return
    if key in parts:
        total = parts[key] + value
        if total:
            parts[key] = total
        else:
            del parts[key]
    else:
        parts[key] = value


def _part_text(poly, token):
    text = poly.to_text()
    if len(poly.terms) == 1 and not text.startswith("("):
        if text == "1":
            return token
        if text == "-1":
            return "-" + token
        return "%s*%s" % (text, token)
    return "(%s)*%s" % (text, token)


def _join(pieces):
    if not pieces:
        return "0"
    text = pieces[0]
    for piece in pieces[1:]:
        if piece.startswith("-"):
            text += " - " + piece[1:]
        else:
            text += " + " + piece
    return text


def _super_degree(u_polys, th_polys):
    degrees = set()
    for g in u_polys:
        if g:
            degrees.add(g.theta_degree())
    for h in th_polys:
        if h:
            degrees.add(h.theta_degree() + 1)
    if len(degrees) > 1:
        raise NonHomogeneous("form mixes super degrees {degrees}", degrees=sorted(degrees))
    return degrees.pop() if degrees else 0


class OneForm(object):
    """
    sum g_{i,s} du^{i,s} + h^i_s dth_i^s with finitely many nonzero parts.
    """

    def __init__(self, tower, u_parts=None, th_parts=None):
        self.tower = tower
        self.u_parts = dict((k, v) for k, v in (u_parts or {}).items() if v)
        self.th_parts = dict((k, v) for k, v in (th_parts or {}).items() if v)

    @classmethod
    def from_reduced(cls, form):
        return form.to_oneform()

    @property
    def n(self):
        return self.tower.n

    def __add__(self, other):
        u_parts = dict(self.u_parts)
        th_parts = dict(self.th_parts)
        for k, v in other.u_parts.items():
            _add_part(u_parts, k, v)
        for k, v in other.th_parts.items():
            _add_part(th_parts, k, v)
        return OneForm(self.tower, u_parts, th_parts)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        u_parts = dict((k, v.scale(c)) for k, v in self.u_parts.items())
        th_parts = dict((k, v.scale(c)) for k, v in self.th_parts.items())
        tower = self.tower
        for v in list(u_parts.values()) + list(th_parts.values()):
            tower = v.tower
            break
        return OneForm(tower, u_parts, th_parts)

    def __bool__(self):
        return bool(self.u_parts or self.th_parts)

    __nonzero__ = __bool__

    def super_degree(self):
        """
        deg_theta of the form: that of its du coefficients, one more than
        that of its dth coefficients.
        """
        return _super_degree(self.u_parts.values(), self.th_parts.values())

    def bidegree(self):
        """(deg_x, deg_theta) with du^{i,s} and dth_i^s carrying deg_x = s."""
        degrees = set()
        for (i, s), g in self.u_parts.items():
            bd = g.bidegree()
            degrees.add((bd.d + s, bd.p))
        for (i, s), h in self.th_parts.items():
            bd = h.bidegree()
            degrees.add((bd.d + s, bd.p + 1))
        if len(degrees) > 1:
            raise NonHomogeneous("form mixes bidegrees {degrees}", degrees=sorted(degrees))
        return degrees.pop() if degrees else (0, 0)

    def reduce(self):
        return reduce_mod_dx(self)

    def __eq__(self, other):
        if not isinstance(other, OneForm):
            return NotImplemented
        return not (self - other)

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return "OneForm(%s)" % self.to_text()

    def to_text(self):
        pieces = []
        for (i, s) in sorted(self.u_parts):
            pieces.append(_part_text(self.u_parts[(i, s)], "du[%d,%d]" % (i, s)))
        for (i, s) in sorted(self.th_parts):
            pieces.append(_part_text(self.th_parts[(i, s)], "dth[%d,%d]" % (i, s)))
        return _join(pieces)


class ReducedOneForm(object):
    """
    The unique representative int sum_i g_i du^i + h^i dth_i of a class of
    1-forms modulo d/dx.
    """

    def __init__(self, g, h):
        if len(g) != len(h):
            raise ValueError("g and h must have the same length")
        self.g = list(g)
        self.h = list(h)

    @classmethod
    def zero(cls, ring):
        return cls([ring.zero() for _ in range(ring.n)],
                   [ring.zero() for _ in range(ring.n)])

    @property
    def n(self):
        return len(self.g)

    @property
    def tower(self):
        return self.g[0].tower

    def to_oneform(self):
        return OneForm(self.tower,
                       dict(((i, 0), g) for i, g in enumerate(self.g, 1)),
                       dict(((i, 0), h) for i, h in enumerate(self.h, 1)))

    def __add__(self, other):
        return ReducedOneForm([a + b for a, b in zip(self.g, other.g)],
                              [a + b for a, b in zip(self.h, other.h)])

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return ReducedOneForm([a.scale(c) for a in self.g], [a.scale(c) for a in self.h])

    def map(self, fn):
        """Apply fn to every coefficient polynomial."""
        return ReducedOneForm([fn(a) for a in self.g], [fn(a) for a in self.h])

    def is_zero(self):
        return not any(self.g) and not any(self.h)

    def __bool__(self):
        return not self.is_zero()

    __nonzero__ = __bool__

    def super_degree(self):
        return _super_degree(self.g, self.h)

    def bidegree(self):
        return self.to_oneform().bidegree()

    def __eq__(self, other):
        if not isinstance(other, ReducedOneForm):
            return NotImplemented
        return (len(self.g) == len(other.g)
                and all(a == b for a, b in zip(self.g, other.g))
                and all(a == b for a, b in zip(self.h, other.h)))

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return "ReducedOneForm(%s)" % self.to_text()

    def to_text(self):
        pieces = []
        for i, g in enumerate(self.g, 1):
            if g:
                pieces.append(_part_text(g, "du[%d]" % i))
        for i, h in enumerate(self.h, 1):
            if h:
                pieces.append(_part_text(h, "dth[%d]" % i))
        return _join(pieces)


def reduce_mod_dx(form):
    """
    Integrate by parts until only du^i and dth_i remain:
    a * dv^{(s)} is replaced by (-d/dx)^s a * dv.
    """
    if isinstance(form, ReducedOneForm):
        return form
    zero = DiffPoly(form.tower)
    g = [zero] * form.n
    h = [zero] * form.n
    for (i, s), a in form.u_parts.items():
        g[i - 1] = g[i - 1] + a.dx_n(s).scale(_sign(s))
    for (i, s), a in form.th_parts.items():
        h[i - 1] = h[i - 1] + a.dx_n(s).scale(_sign(s))
    return ReducedOneForm(g, h)


def delta_of(f):
    """
    The unreduced differential of a polynomial, expanded over every jet
    generator it involves (odd generators by right derivatives).
    """
    u_parts = {}
    th_parts = {}
    for v in f.jet_vars():
        if v.parity == "even":
            _add_part(u_parts, (v.i, v.s), f.partial_even(v.i, v.s))
        else:
            _add_part(th_parts, (v.i, v.s), f.partial_odd(v.i, v.s, side="right"))
    return OneForm(f.tower, u_parts, th_parts)


def de_rham(F):
    """
    The reduced differential of a local functional:
    g_i = dF/du^i and h^i = the right variational derivative dF/dth_i.
    """
    density = F.density
    return ReducedOneForm([density.variational("u", i) for i in range(1, F.n + 1)],
                          [density.variational("th", i, side="right") for i in range(1, F.n + 1)])


def _add_times_delta(u_parts, th_parts, left, f):
    """Accumulate left * d(f) into the part dicts."""
    d = delta_of(f)
    for (i, s), a in d.u_parts.items():
        _add_part(u_parts, (i, s), left * a)
    for (i, s), a in d.th_parts.items():
        _add_part(th_parts, (i, s), left * a)


def lie_derivative(X, form):
    """
    L_X w = sum X(g) du^{i,s} + (-1)^{pq} g d(X(u^{i,s}))
          + X(h) dth_i^s + (-1)^{p(q-1)} h d(X(th_i^s))

    for a derivation of super degree p and a form of super degree q. A
    ReducedOneForm argument gives a reduced result.

    :raises NonHomogeneous: when the form mixes super degrees
    """
    reduced = isinstance(form, ReducedOneForm)
    omega = form.to_oneform() if reduced else form
    q = omega.super_degree()
    p = X.superdeg
    u_parts = {}
    th_parts = {}
    sign_u = _sign(p * q)
    sign_th = _sign(p * (q - 1))
    for (i, s), g in omega.u_parts.items():
        _add_part(u_parts, (i, s), X.apply(g))
        img = X.image("even", i, s)
        if img:
            _add_times_delta(u_parts, th_parts, g.scale(sign_u), img)
    for (i, s), h in omega.th_parts.items():
        _add_part(th_parts, (i, s), X.apply(h))
        img = X.image("odd", i, s)
        if img:
            _add_times_delta(u_parts, th_parts, h.scale(sign_th), img)
    out = OneForm(omega.tower, u_parts, th_parts)
    return reduce_mod_dx(out) if reduced else out


def dtilde(P, form):
    """
    The Lie derivative along D_P for a verified Hamiltonian structure.

    :raises UnverifiedStructure: when P has not passed is_hamiltonian
    """
    if not P.verified:
        raise UnverifiedStructure()
    return lie_derivative(P.derivation, form)


def phi(X):
    """int sum X(u^i) dth_i - X(th_i) du^i."""
    return ReducedOneForm([-img for img in X.th_images], list(X.u_images))


def phi_inverse(form):
    """The derivation u^i -> h^i, th_i -> -g_i."""
    form = reduce_mod_dx(form)
    superdeg = form.super_degree() - 1 if form else 0
    return EvDerivation(list(form.h), [-g for g in form.g], superdeg=superdeg)


def intertwine_check(P, X):
    """True iff phi([D_P, X]) equals the Lie derivative of phi(X) along D_P."""
    DP = P.derivation
    return phi(commutator(DP, X)) == lie_derivative(DP, phi(X))


def twisted_sign_check(F):
    """True iff dF = (-1)^(p-1) phi(D_F) for F of super degree p."""
    p = F.theta_degree()
    return de_rham(F) == phi(derivation_of(F)).scale(_sign(p - 1))


class LambdaOneForm(object):
    """
    A reduced form polynomial in lambda, stored as its lambda^k slices over
    the base tower.
    """

    def __init__(self, slices):
        self._slices = dict((k, w) for k, w in slices.items() if w)

    def slices(self):
        """dict k -> ReducedOneForm, the coefficient of lambda^k."""
        return dict(self._slices)

    def degree(self):
        return max(self._slices) if self._slices else -1

    def __bool__(self):
        return bool(self._slices)

    __nonzero__ = __bool__

    def __add__(self, other):
        out = dict(self._slices)
        for k, w in other._slices.items():
            out[k] = out[k] + w if k in out else w
        return LambdaOneForm(out)

    def __eq__(self, other):
        if not isinstance(other, LambdaOneForm):
            return NotImplemented
        return self._slices == other._slices

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    @classmethod
    def from_reduced(cls, form):
        """Split a reduced form with LambdaScalar coefficients into slices."""
        tower = form.tower
        if not isinstance(tower, LambdaTower):
            return cls({0: form})
        top = -1
        for poly in form.g + form.h:
            for c in poly.terms.values():
                top = max(top, c.degree)

        def piece(poly, k):
            return DiffPoly(tower.base, dict((key, c.coeff(k)) for key, c in poly.terms.items()))

        return cls(dict((k, ReducedOneForm([piece(a, k) for a in form.g],
                                           [piece(a, k) for a in form.h]))
                        for k in range(top + 1)))

    def to_reduced(self, tower):
        """Reassemble as a ReducedOneForm over a LambdaTower."""
        lam = tower.lam()
        zero = DiffPoly(tower)
        n = tower.n
        g = [zero] * n
        h = [zero] * n
        for k, w in self._slices.items():
            weight = lam ** k
            for i in range(n):
                g[i] = g[i] + w.g[i].lift(tower).scale(weight)
                h[i] = h[i] + w.h[i].lift(tower).scale(weight)
        return ReducedOneForm(g, h)

    def to_text(self):
        pieces = []
        for k in sorted(self._slices):
            text = self._slices[k].to_text()
            pieces.append("(%s)" % text if k == 0 else "lam^%d*(%s)" % (k, text))
        return " + ".join(pieces) if pieces else "0"


def lambda_differential(S, form):
    """
    (D1~ - lam D0~) applied slice by slice to a LambdaOneForm over the
    bihamiltonian pair S.
    """
    out = {}
    for k, w in form.slices().items():
        one = S.dtilde1(w)
        zero = S.dtilde0(w)
        out[k] = out[k] + one if k in out else one
        out[k + 1] = out[k + 1] - zero if k + 1 in out else -zero
    return LambdaOneForm(out)
