"""
Semisimple bihamiltonian structures of hydrodynamic type in canonical
coordinates, and the constructions built on them: indices of 1-form
cocycles, the tau cocycle, normal forms, conformal data and the Euler
field, the Delta_{-1} differential, the root rescaling and rotation
coefficients.
"""
from __future__ import absolute_import

import copy
import logging
from collections import namedtuple
from fractions import Fraction

from superjet.coeffs import BaseScalar, LambdaTower, RootTower, base_tower, to_fraction
from superjet.errors import (ConformalityFailed, DegenerateScaling, DivisionByZero,
                             IrreducibilityViolated, NotACocycle, NotBihamiltonian,
                             NotHomogeneous, NotSingleVariable, RootNotRegistered,
                             WrongBidegree, WrongShape, ZeroMetricEntry)
from superjet.forms import OneForm, ReducedOneForm, dtilde
from superjet.functionals import HamStructure, LocalFunctional, schouten
from superjet.jetring import DiffPoly, JetRing, assert_polynomial

log = logging.getLogger(__name__)

HALF = Fraction(1, 2)


class SemisimpleHydroPair(object):
    """
    The pair

        P0 = 1/2 int sum f^i th_i th_i^1 + A^{ij} th_i th_j
        P1 = 1/2 int sum u^i f^i th_i th_i^1 + B^{ij} th_i th_j

    built from nonvanishing f^1..f^n.
    """

    def __init__(self, f, verify=True, roots=False):
        """
        :param f: sequence of n BaseScalar (ints and Fractions are coerced)
        :param verify: check the three Schouten brackets; a failure raises
            NotBihamiltonian
        :param roots: register s_i^2 = f^i for psi_rescale and rotation_coeffs
        """
        n = len(f)
        self.n = n
        self.tower = base_tower(n)
        self.ring = JetRing(self.tower)
        self.f = [self.tower.coerce(fi) for fi in f]
        for i, fi in enumerate(self.f, 1):
            if not fi:
                raise ZeroMetricEntry(i=i)
        self._a = {}
        self._b = {}
        self.P0 = LocalFunctional(self._assemble(self.f))
        self.P1 = LocalFunctional(self._assemble([self.tower.u(i) * fi
                                                  for i, fi in enumerate(self.f, 1)]))
        self.verified = False
        if verify:
            self._verify()
        self.H0 = HamStructure(self.P0, verified=self.verified)
        self.H1 = HamStructure(self.P1, verified=self.verified)
        self.root_tower = RootTower(self.tower, self.f) if roots else None

    def _assemble(self, g):
        ring = self.ring
        density = ring.zero()
        for i in range(1, self.n + 1):
            density = density + (ring.th(i) * ring.th(i, 1)).scale(g[i - 1])
        for i in range(1, self.n + 1):
            for j in range(1, self.n + 1):
                if i == j:
                    continue
                coeff = self.antisym(g, i, j)
                if coeff:
                    density = density + coeff * ring.th(i) * ring.th(j)
        return density.scale(HALF)

    def antisym(self, g, i, j):
        """
        1/2 (g^i/f^j d_i f^j u^{j,1} - g^j/f^i d_j f^i u^{i,1}); A^{ij} for
        g = f and B^{ij} for g^i = u^i f^i.
        """
        f = self.f
        ring = self.ring
        first = g[i - 1] / f[j - 1] * f[j - 1].partial(i)
        second = g[j - 1] / f[i - 1] * f[i - 1].partial(j)
        return (ring.u(j, 1).scale(first) - ring.u(i, 1).scale(second)).scale(HALF)

    def _verify(self):
        failed = []
        for name, (a, b) in (("[P0,P0]", (self.P0, self.P0)),
                             ("[P0,P1]", (self.P0, self.P1)),
                             ("[P1,P1]", (self.P1, self.P1))):
            if not schouten(a, b).is_zero():
                failed.append(name)
        if failed:
            raise NotBihamiltonian(failed=", ".join(failed))
        self.verified = True
        log.debug("verified bihamiltonian pair", extra={"n": self.n})

    def with_roots(self):
        """A copy with the root symbols s_i registered."""
        other = copy.copy(self)
        other.root_tower = RootTower(self.tower, self.f)
        return other

    def a(self, i, j):
        """a_{ij} = 1/2 d_i f^j."""
        key = (i, j)
        if key not in self._a:
            self._a[key] = self.f[j - 1].partial(i) * HALF
        return self._a[key]

    def b(self, i, j):
        """b_{ij} = 1/2 f^i d_i f^j / f^j."""
        key = (i, j)
        if key not in self._b:
            self._b[key] = self.f[i - 1] * self.f[j - 1].partial(i) / self.f[j - 1] * HALF
        return self._b[key]

    @property
    def D0(self):
        return self.H0.derivation

    @property
    def D1(self):
        return self.H1.derivation

    def dtilde0(self, form):
        return dtilde(self.H0, form)

    def dtilde1(self, form):
        return dtilde(self.H1, form)

    def zero_form(self):
        return ReducedOneForm.zero(self.ring)


def build_pair(f, verify=True, roots=False):
    return SemisimpleHydroPair(f, verify=verify, roots=roots)


def _check_bidegree(form, expected):
    if not form:
        return
    actual = form.bidegree()
    if tuple(actual) != expected:
        raise WrongBidegree(expected="(d, p) = %s" % (expected,), actual="%s" % (tuple(actual),))


class IndexVector(object):
    """
    ind_1..ind_n; entries are BaseScalar or PowerLaw values.
    """

    def __init__(self, ind):
        self.ind = list(ind)

    def __getitem__(self, k):
        return self.ind[k]

    def __len__(self):
        return len(self.ind)

    def __iter__(self):
        return iter(self.ind)

    def is_zero(self):
        return not any(self.ind)

    def check_single_variable(self):
        """
        :raises NotSingleVariable: if ind_i depends on some u^j, j != i
        """
        for i, value in enumerate(self.ind, 1):
            if isinstance(value, BaseScalar):
                for j in range(1, len(self.ind) + 1):
                    if j != i and value.depends_on(j):
                        raise NotSingleVariable(i=i)
        return True

    def __eq__(self, other):
        if isinstance(other, IndexVector):
            other = other.ind
        return list(self.ind) == list(other)

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def to_text(self):
        return [v.to_text() for v in self.ind]

    def __repr__(self):
        return "IndexVector(%s)" % ", ".join(self.to_text())


def _theta_square(g, j):
    return g.coefficient(odd=[(j, 2)])


def _jet_coeff(h, j, s=2):
    return h.coefficient(even=[((j, s), 1)])


def indices(S, form):
    """
    ind_i = (X^{(i)}_i + Y^{(i)}_i) / f^i where X^{(i)}_i is the coefficient of
    th_i^2 in g_i and Y^{(i)}_i that of u^{i,2} in h^i.

    :raises WrongBidegree: unless the form has deg_x 2 and deg_theta 1
    """
    _check_bidegree(form, (2, 1))
    out = []
    for i in range(1, S.n + 1):
        x = _theta_square(form.g[i - 1], i)
        y = _jet_coeff(form.h[i - 1], i)
        out.append((x + y) / S.f[i - 1])
    return IndexVector(out)


def is_coboundary_indices(S, form):
    """True iff every index of the form vanishes."""
    return indices(S, form).is_zero()


def _check_single_variable(c, n):
    for i, ci in enumerate(c, 1):
        for j in range(1, n + 1):
            if j != i and ci.depends_on(j):
                raise NotSingleVariable(i=i)


def build_tau(S, c):
    """
    tau = int d(D_1 sum c_i u^{i,1} log u^{i,1} - D_0 sum u^i c_i u^{i,1} log u^{i,1}).

    The density lives in the log extension; the variational derivatives are
    taken there and must come back polynomial.

    :raises NotSingleVariable: if some c_i depends on u^j, j != i
    :raises NotPolynomial: if a log symbol survives
    """
    tower = S.tower
    c = [tower.coerce(ci) for ci in c]
    _check_single_variable(c, S.n)
    ring = S.ring
    first = ring.zero()
    second = ring.zero()
    for i, ci in enumerate(c, 1):
        if not ci:
            continue
        seed = ring.u(i, 1) * ring.log_symbol(i)
        first = first + seed.scale(ci)
        second = second + seed.scale(tower.u(i) * ci)
    if not first:
        return S.zero_form()
    density = S.D1.apply(first) - S.D0.apply(second)
    g = [assert_polynomial(density.variational("u", i)) for i in range(1, S.n + 1)]
    h = [assert_polynomial(density.variational("th", i, side="right")) for i in range(1, S.n + 1)]
    return ReducedOneForm(g, h)


def is_cocycle(S, form):
    """
    True iff D0~ D1~ kills the form.

    :raises WrongBidegree: unless the form has deg_x 2 and deg_theta 1
    """
    _check_bidegree(form, (2, 1))
    return S.dtilde0(S.dtilde1(form)).is_zero()


def cocycle_from_gauge(S, alpha, beta):
    """D0~ alpha + D1~ beta."""
    return S.dtilde0(alpha) + S.dtilde1(beta)


Gauge = namedtuple("Gauge", "gamma alpha beta")
"""Forms with normal form = input + D0~ gamma + D0~ alpha + D1~ beta."""


class NormalFormCocycle(object):
    """
    The coefficient families of a cocycle in normal form:

        g_i = sum X_j th_j^2 + X_{kj} u^{j,1} th_k^1 + Z_{jk} u^{k,2} th_j
              + Z_{j;kl} u^{k,1} u^{l,1} th_j
        h^i = sum Y_j u^{j,2} + Y_{jk} u^{j,1} u^{k,1}

    Each family is a dict keyed by (i, ...) with BaseScalar values; the
    symmetric families store both orderings.
    """
    families = ("X", "Xkj", "Z", "Zjkl", "Y", "Yjk")

    def __init__(self, form):
        self.form = form
        self.X = {}
        self.Xkj = {}
        self.Z = {}
        self.Zjkl = {}
        self.Y = {}
        self.Yjk = {}
        for i, g in enumerate(form.g, 1):
            self._read_g(i, g)
        for i, h in enumerate(form.h, 1):
            self._read_h(i, h)

    def _read_g(self, i, g):
        for (even, odd, logs), c in g.terms.items():
            shape = (tuple((s, e) for (_, s), e in even), tuple(s for _, s in odd))
            if logs:
                raise WrongShape(monomial=g.to_text())
            if shape == ((), (2,)):
                self.X[(i, odd[0][0])] = c
            elif shape == (((1, 1),), (1,)):
                self.Xkj[(i, odd[0][0], even[0][0][0])] = c
            elif shape == (((2, 1),), (0,)):
                self.Z[(i, odd[0][0], even[0][0][0])] = c
            elif shape == (((1, 2),), (0,)):
                k = even[0][0][0]
                self.Zjkl[(i, odd[0][0], k, k)] = c
            elif shape == (((1, 1), (1, 1)), (0,)):
                j = odd[0][0]
                k, l = even[0][0][0], even[1][0][0]
                self.Zjkl[(i, j, k, l)] = c * HALF
                self.Zjkl[(i, j, l, k)] = c * HALF
            else:
                raise WrongShape(monomial=DiffPoly(g.tower, {(even, odd, logs): c}).to_text())

    def _read_h(self, i, h):
        for (even, odd, logs), c in h.terms.items():
            shape = tuple((s, e) for (_, s), e in even)
            if odd or logs:
                raise WrongShape(monomial=DiffPoly(h.tower, {(even, odd, logs): c}).to_text())
            if shape == ((2, 1),):
                self.Y[(i, even[0][0][0])] = c
            elif shape == ((1, 2),):
                k = even[0][0][0]
                self.Yjk[(i, k, k)] = c
            elif shape == ((1, 1), (1, 1)):
                j, k = even[0][0][0], even[1][0][0]
                self.Yjk[(i, j, k)] = c * HALF
                self.Yjk[(i, k, j)] = c * HALF
            else:
                raise WrongShape(monomial=DiffPoly(h.tower, {(even, odd, logs): c}).to_text())

    def violations(self):
        """Normal-form conditions that fail: off-diagonal X_j, any Y_j, Y_{ii}."""
        bad = []
        for (i, j), c in sorted(self.X.items()):
            if j != i and c:
                bad.append("X[%d][%d]" % (i, j))
        for (i, j), c in sorted(self.Y.items()):
            if c:
                bad.append("Y[%d][%d]" % (i, j))
        for (i, j, k), c in sorted(self.Yjk.items()):
            if i == j == k and c:
                bad.append("Y[%d][%d%d]" % (i, i, i))
        return bad

    def to_dict(self):
        """Canonical text of every nonzero coefficient, keyed family -> index string."""
        out = {}
        for name in self.families:
            family = getattr(self, name)
            out[name] = dict((",".join(str(k) for k in key), c.to_text())
                             for key, c in sorted(family.items()) if c)
        return out


def normalize_cocycle(S, form):
    """
    Bring a cocycle to normal form by adding D0~ gamma, then D0~ alpha + D1~ beta
    with alpha_i = -u^i beta_i.

    :returns: (NormalFormCocycle, Gauge)
    :raises NotACocycle: if D0~ D1~ does not kill the form
    """
    if not is_cocycle(S, form):
        raise NotACocycle()
    ring = S.ring
    n = S.n
    zero = ring.zero()

    # D0~ (c u^{j,1} du^i) carries -c f^i u^{j,2} in h^i
    gamma_g = []
    for i in range(1, n + 1):
        gi = zero
        for j in range(1, n + 1):
            y = _jet_coeff(form.h[i - 1], j)
            if y:
                gi = gi + ring.u(j, 1).scale(y / S.f[i - 1])
        gamma_g.append(gi)
    gamma = ReducedOneForm(gamma_g, [zero] * n)
    current = form + S.dtilde0(gamma) if gamma else form

    alpha = S.zero_form()
    beta = S.zero_form()
    # off-diagonal th_j^2 in g_i first, then (u^{i,1})^2 in h^i
    for diagonal in (False, True):
        a_step, b_step = _beta_step(S, current, diagonal)
        if b_step:
            current = current + cocycle_from_gauge(S, a_step, b_step)
            alpha = alpha + a_step
            beta = beta + b_step
    normal = NormalFormCocycle(current)
    bad = normal.violations()
    if bad:
        raise WrongShape("normal-form conditions fail: {monomial}", monomial=", ".join(bad))
    log.debug("normalized cocycle", extra={"n": n})
    return normal, Gauge(gamma, alpha, beta)


def _unit_gauge(S, i, j):
    """alpha, beta for beta^{(i)}_j = 1 and every other entry zero."""
    ring = S.ring
    zero = ring.zero()
    b = [zero] * S.n
    a = [zero] * S.n
    b[i - 1] = ring.u(j, 1)
    a[i - 1] = ring.u(j, 1).scale(-S.tower.u(i))
    return ReducedOneForm(a, [zero] * S.n), ReducedOneForm(b, [zero] * S.n)


def _beta_step(S, form, diagonal):
    ring = S.ring
    zero = ring.zero()
    n = S.n
    a = [zero] * n
    b = [zero] * n
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if (i == j) != diagonal:
                continue
            if diagonal:
                target = form.h[i - 1].coefficient(even=[((i, 1), 2)])
            else:
                target = _theta_square(form.g[i - 1], j)
            if not target:
                continue
            unit_alpha, unit_beta = _unit_gauge(S, i, j)
            response = cocycle_from_gauge(S, unit_alpha, unit_beta)
            if diagonal:
                r = response.h[i - 1].coefficient(even=[((i, 1), 2)])
            else:
                r = _theta_square(response.g[i - 1], j)
            if not r:
                raise DivisionByZero("gauge response for beta[{i}][{j}] vanishes", i=i, j=j)
            value = -target / r
            b[i - 1] = b[i - 1] + ring.u(j, 1).scale(value)
            a[i - 1] = a[i - 1] - ring.u(j, 1).scale(value * S.tower.u(i))
    return ReducedOneForm(a, [zero] * n), ReducedOneForm(b, [zero] * n)


# conformal structures

def conformal_check(f):
    """
    Solve sum_j u^j d_j f^i = d^i f^i for constants d^i and check
    (d^i - d^j) d_i f^j = 0.

    :returns: list of n Fractions d^i
    :raises NotHomogeneous: if some ratio is not constant
    :raises IrreducibilityViolated: for the first failing (i, j)
    """
    n = len(f)
    tower = base_tower(n)
    f = [tower.coerce(fi) for fi in f]
    d = []
    for i, fi in enumerate(f, 1):
        if not fi:
            raise ZeroMetricEntry(i=i)
        euler = tower.zero()
        for j in range(1, n + 1):
            euler = euler + tower.u(j) * fi.partial(j)
        ratio = euler / fi
        if not ratio.is_constant():
            raise NotHomogeneous(i=i)
        d.append(ratio.constant_value())
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j and d[i - 1] != d[j - 1] and f[j - 1].partial(i):
                raise IrreducibilityViolated(i=i, j=j)
    return d


class ConformalData(object):
    """d^1..d^n with the constants lambda0, lambda1, mu."""

    def __init__(self, d, lambda0, lambda1, mu):
        self.d = [to_fraction(x) for x in d]
        self.lambda0 = to_fraction(lambda0)
        self.lambda1 = to_fraction(lambda1)
        self.mu = to_fraction(mu)
        if self.lambda1 == self.lambda0:
            raise DegenerateScaling()

    @property
    def scale(self):
        return self.lambda1 - self.lambda0


class EulerField(object):
    """
    E = sum (l1 - l0 + s mu) u^{i,s} d/du^{i,s}
        + (l1 - (l1 - l0) d^i + (s - 1) mu) th_i^s d/dth_i^s.

    E does not commute with d/dx, so it is kept apart from EvDerivation.
    """

    def __init__(self, cd):
        self.cd = cd

    def u_weight(self, i, s):
        cd = self.cd
        return cd.scale + s * cd.mu

    def th_weight(self, i, s):
        cd = self.cd
        return cd.lambda1 - cd.scale * cd.d[i - 1] + (s - 1) * cd.mu

    def _on_coefficient(self, c):
        tower = c.tower
        out = tower.zero()
        for i in range(1, tower.n + 1):
            dc = c.partial(i)
            if dc:
                out = out + tower.u(i) * dc
        return out * self.cd.scale

    def apply(self, f):
        terms = {}
        for key, c in f.terms.items():
            even, odd, _ = key
            weight = Fraction(0)
            for (i, s), e in even:
                weight += e * self.u_weight(i, s)
            for i, s in odd:
                weight += self.th_weight(i, s)
            terms[key] = c * weight + self._on_coefficient(c)
        return f._new(terms)

    __call__ = apply


def _generators(ring, top=2):
    for i in range(1, ring.n + 1):
        for s in range(top + 1):
            yield "u[%d,%d]" % (i, s), ring.u(i, s)
            yield "th[%d,%d]" % (i, s), ring.th(i, s)


def euler_field(S, cd):
    """
    The Euler field, after checking [E, d/dx] = mu d/dx and
    [E, D_a] = lambda_a D_a on generators.

    :raises ConformalityFailed: naming the identity that fails
    """
    E = EulerField(cd)
    for name, v in _generators(S.ring):
        if E.apply(v.dx()) - E.apply(v).dx() != v.dx().scale(cd.mu):
            raise ConformalityFailed(identity="[E, d/dx] = mu d/dx on %s" % name)
    for label, D, lam in (("D0", S.D0, cd.lambda0), ("D1", S.D1, cd.lambda1)):
        for name, v in _generators(S.ring, top=0):
            lhs = E.apply(D.apply(v)) - D.apply(E.apply(v))
            if lhs != D.apply(v).scale(lam):
                raise ConformalityFailed(identity="[E, %s] = lambda %s on %s" % (label, label, name))
    return E


class PowerLaw(object):
    """C * (u^i)^m with exact rational C and m."""

    def __init__(self, C, m, i=1):
        self.C = to_fraction(C)
        self.m = to_fraction(m)
        self.i = i

    def __bool__(self):
        return bool(self.C)

    __nonzero__ = __bool__

    def __eq__(self, other):
        if isinstance(other, PowerLaw):
            if not self.C and not other.C:
                return True
            return (self.C, self.m, self.i) == (other.C, other.m, other.i)
        if other == 0:
            return not self.C
        return NotImplemented

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def scaled(self, k):
        return PowerLaw(self.C * k, self.m, self.i)

    def to_text(self):
        if not self.C:
            return "0"
        return "%s*u[%d]^(%s)" % (self.C, self.i, self.m)

    def __repr__(self):
        return "PowerLaw(%s)" % self.to_text()


CentralInvariantLaw = namedtuple("CentralInvariantLaw", "exponents")
"""c_i = C_i (u^i)^{m_i} with exponents m_1..m_n."""


def conformal_central_invariants(cd):
    """
    m_i = (l1 - l0 - 2 mu - (l1 - l0) d^i) / (l1 - l0).

    :raises DegenerateScaling: if lambda1 = lambda0
    """
    if cd.scale == 0:
        raise DegenerateScaling()
    return CentralInvariantLaw([(cd.scale - 2 * cd.mu - cd.scale * di) / cd.scale for di in cd.d])


def index_ode_check(S, cd, c):
    """
    3 (l1 - l0 - 2 mu - (l1 - l0) d^i) c_i - 3 (l1 - l0) u^i d_i c_i for each i.

    c_i may be a BaseScalar or a PowerLaw; the result has the same kind.
    """
    out = []
    for i, ci in enumerate(c, 1):
        factor = 3 * (cd.scale - 2 * cd.mu - cd.scale * cd.d[i - 1])
        if isinstance(ci, PowerLaw):
            out.append(ci.scaled(factor - 3 * cd.scale * ci.m))
            continue
        ci = S.tower.coerce(ci)
        out.append(ci * factor - S.tower.u(i) * ci.partial(i) * (3 * cd.scale))
    return IndexVector(out)


# the Delta_{-1} differential

def dhat(S, i, target):
    """
    dhat_i = sum_{s >= 1} th_i^{s+1} d/du^{i,s} on polynomials; on 1-forms the
    de Rham-type extension also sends du^{i,s} to dth_i^{s+1}.
    """
    if isinstance(target, ReducedOneForm):
        target = target.to_oneform()
    if isinstance(target, OneForm):
        return _dhat_form(i, target)
    return _dhat_poly(i, target)


def _dhat_poly(i, a):
    out = a._new({})
    top = a.max_order()
    for s in range(1, top + 1):
        part = a.partial_even(i, s)
        if part:
            th = DiffPoly(a.tower, {((), ((i, s + 1),), ()): a.tower.one()})
            out = out + th * part
    return out


def _dhat_form(i, form):
    u_parts = {}
    th_parts = {}

    def add(parts, key, value):
        if value:
            parts[key] = parts[key] + value if key in parts else value

    for (j, s), g in form.u_parts.items():
        add(u_parts, (j, s), _dhat_poly(i, g))
        if j == i:
            add(th_parts, (i, s + 1), g.scale(-1 if g.theta_degree() % 2 else 1))
    for key, h in form.th_parts.items():
        add(th_parts, key, _dhat_poly(i, h))
    return OneForm(form.tower, u_parts, th_parts)


def delta_minus_one(S, target):
    """
    sum_i (-lam + u^i) f^i dhat_i, landing in the lambda tower.
    """
    lt = LambdaTower(S.tower)
    if isinstance(target, ReducedOneForm):
        target = target.to_oneform()
    out = None
    for i in range(1, S.n + 1):
        weight = (lt.u(i) - lt.lam()) * lt.lift(S.f[i - 1])
        term = dhat(S, i, target).scale(weight)
        out = term if out is None else out + term
    return out


# root rescaling and rotation coefficients

def _require_roots(S):
    if S.root_tower is None:
        raise RootNotRegistered()
    return S.root_tower


def _weight_factor(rt, weights, sign):
    factor = rt.one()
    for i, w in weights.items():
        if w:
            factor = factor * rt.root_power(i, sign * w)
    return factor


def _rescale_poly(rt, a, sign, extra=None):
    terms = {}
    for key, c in a.terms.items():
        even, odd, _ = key
        weights = dict(extra or {})
        for (i, s), e in even:
            weights[i] = weights.get(i, 0) + s * e
        for i, s in odd:
            weights[i] = weights.get(i, 0) + s + 1
        terms[key] = rt.coerce(c) * _weight_factor(rt, weights, sign)
    return DiffPoly(rt, terms)


def psi_rescale(S, target, direction="fwd"):
    """
    u^{i,s} -> (f^i)^{s/2} u^{i,s}, th_i^s -> (f^i)^{(s+1)/2} th_i^s and the
    same for du^{i,s}, dth_i^s; direction 'inv' applies the inverse.

    :raises RootNotRegistered: if S has no root tower
    """
    rt = _require_roots(S)
    sign = 1 if direction == "fwd" else -1
    if isinstance(target, ReducedOneForm):
        target = target.to_oneform()
    if isinstance(target, OneForm):
        u_parts = dict(((i, s), _rescale_poly(rt, g, sign, {i: s}))
                       for (i, s), g in target.u_parts.items())
        th_parts = dict(((i, s), _rescale_poly(rt, h, sign, {i: s + 1}))
                        for (i, s), h in target.th_parts.items())
        return OneForm(rt, u_parts, th_parts)
    return _rescale_poly(rt, target, sign)


def rotation_coeffs(S):
    """
    gamma_ij = -1/2 (f^i/f^j)^{1/2} d_i f^j / f^j for i != j, as
    -1/2 s_i s_j d_i f^j / (f^j)^2; the diagonal is zero.

    :raises RootNotRegistered: if S has no root tower
    """
    rt = _require_roots(S)
    n = S.n
    out = [[rt.zero() for _ in range(n)] for _ in range(n)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            fj = S.f[j - 1]
            c = fj.partial(i) / (fj * fj) * (-HALF)
            out[i - 1][j - 1] = rt.root(i) * rt.root(j) * rt.lift(c)
    return out


# closed-form D0~ components

def mn_expansion(S, form):
    """
    The du^i and dth_i coefficients M^i, N^i of D0~ applied to
    int sum X^i du^i + Y^i dth_i of super degree 1, written out in a_{ij},
    b_{ij} and their derivatives.

    :raises WrongShape: for forms of another super degree
    """
    if form and form.super_degree() != 1:
        raise WrongShape(monomial="super degree %d" % form.super_degree())
    n = S.n
    ring = S.ring
    X = form.g
    Y = form.h
    a = S.a
    b = S.b
    f = S.f
    D0 = S.D0
    rng = range(1, n + 1)

    def u1(j):
        return ring.u(j, 1)

    def th(j, s=0):
        return ring.th(j, s)

    M = []
    N = []
    for i in rng:
        m = D0.apply(X[i - 1])
        for j in rng:
            Xj = X[j - 1]
            Yj = Y[j - 1]
            m = m - (Xj * th(j, 1)).scale(f[j - 1].partial(i))
            m = m + (Xj * th(j)).scale(a(i, j)).dx()
            m = m + (Xj * th(i)).scale(b(j, i)).dx()
            m = m - (X[i - 1] * th(j)).scale(b(j, i)).dx()
            for k in rng:
                Xk = X[k - 1]
                Yk = Y[k - 1]
                m = m - (Xk * u1(j) * th(k)).scale(a(j, k).partial(i))
                m = m - (Xk * u1(j) * th(j)).scale(b(k, j).partial(i))
                m = m + (Xk * u1(k) * th(j)).scale(b(j, k).partial(i))
                m = m + (Yk * th(j) * th(j, 1)).scale(a(k, j).partial(i))
                m = m + (Yk * th(k) * th(j, 1)).scale(b(j, k).partial(i))
                m = m - (Yk * th(j) * th(k, 1)).scale(b(j, k).partial(i))
                m = m - (Yj * th(k) * th(i)).scale(b(k, i).partial(j)).dx()
                m = m + (Yj * th(k) * th(j)).scale(b(k, j).partial(i)).dx()
                for l in rng:
                    Yl = Y[l - 1]
                    m = m + (Yl * u1(j) * th(k) * th(j)).scale(b(k, j).partial(l).partial(i))
                    m = m - (Yl * u1(j) * th(k) * th(l)).scale(b(k, l).partial(j).partial(i))
        M.append(m)

        Xi = X[i - 1]
        Yi = Y[i - 1]
        nn = D0.apply(Yi) + Xi.scale(f[i - 1]).dx()
        for j in rng:
            Xj = X[j - 1]
            Yj = Y[j - 1]
            nn = nn - (Xi * u1(j)).scale(a(j, i))
            nn = nn - (Xj * u1(i)).scale(b(j, i))
            nn = nn + (Xj * u1(j)).scale(b(i, j))
            nn = nn - (Yj * th(i)).scale(a(j, i)).dx()
            nn = nn - (Yj * th(j)).scale(b(i, j)).dx()
            nn = nn + (Yi * th(j)).scale(b(j, i)).dx()
            nn = nn - (Yj * th(i, 1)).scale(a(j, i))
            nn = nn - (Yi * th(j, 1)).scale(b(j, i))
            nn = nn + (Yj * th(j, 1)).scale(b(i, j))
            for k in rng:
                Yk = Y[k - 1]
                nn = nn - (Yk * u1(j) * th(j)).scale(b(i, j).partial(k))
                nn = nn + (Yj * u1(i) * th(k)).scale(b(k, i).partial(j))
                nn = nn + (Yk * u1(j) * th(k)).scale(b(i, k).partial(j))
                nn = nn - (Yi * u1(j) * th(k)).scale(b(k, i).partial(j))
        N.append(nn)
    return M, N
