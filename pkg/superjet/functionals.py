"""
Local functionals, the Schouten bracket and evolutionary derivations.
"""
from __future__ import absolute_import

import logging

from superjet.errors import NonHomogeneous, WrongBidegree, MixedExtension
from superjet.jetring import _ONE_KEY

log = logging.getLogger(__name__)


def _sign(k):
    return -1 if k % 2 else 1


class LocalFunctional(object):
    """
    The class of a density modulo total derivatives.

    Two functionals are equal when all 2n variational derivatives of the
    difference vanish and the difference has no constant term.
    """

    def __init__(self, density):
        self.density = density

    @property
    def tower(self):
        return self.density.tower

    @property
    def n(self):
        return self.density.n

    def variational(self, kind, i):
        return self.density.variational(kind, i)

    def theta_degree(self):
        """
        :raises NonHomogeneous: when the density mixes super degrees
        """
        return self.density.theta_degree()

    def is_zero(self):
        d = self.density
        if d.terms.get(_ONE_KEY):
            return False
        for i in range(1, self.n + 1):
            if d.variational("u", i) or d.variational("th", i):
                return False
        return True

    def __add__(self, other):
        return LocalFunctional(self.density + other.density)

    def __sub__(self, other):
        return LocalFunctional(self.density - other.density)

    def __neg__(self):
        return LocalFunctional(-self.density)

    def scale(self, c):
        return LocalFunctional(self.density.scale(c))

    def __eq__(self, other):
        if not isinstance(other, LocalFunctional):
            return NotImplemented
        try:
            return (self - other).is_zero()
        except MixedExtension:
            return False

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return "LocalFunctional(%s)" % self.to_text()

    def to_text(self):
        return "int(%s)" % self.density.to_text()


def functional_of(f):
    """The local functional with density f."""
    return LocalFunctional(f)


class EvDerivation(object):
    """
    A derivation commuting with d/dx, fixed by the images of u^i and theta_i.

    The action on u^{i,s} and theta_i^s is the s-th total derivative of the
    generator image; images are cached as they are requested.
    """

    def __init__(self, u_images, th_images, superdeg=None):
        """
        :param u_images: list of n DiffPoly, X(u^i)
        :param th_images: list of n DiffPoly, X(theta_i)
        :param superdeg: parity p of X; inferred from the images if omitted
        """
        if len(u_images) != len(th_images):
            raise ValueError("need as many theta images as u images")
        self.u_images = list(u_images)
        self.th_images = list(th_images)
        if superdeg is None:
            superdeg = self._infer_superdeg()
        self.superdeg = superdeg
        self._cache = {}

    def _infer_superdeg(self):
        degrees = set()
        for img in self.u_images:
            if img:
                degrees.add(img.theta_degree())
        for img in self.th_images:
            if img:
                degrees.add(img.theta_degree() - 1)
        if len(degrees) > 1:
            raise NonHomogeneous("derivation images mix super degrees {degrees}",
                                 degrees=sorted(degrees))
        return degrees.pop() if degrees else 0

    @classmethod
    def zero(cls, ring, superdeg=0):
        """The zero derivation on a JetRing."""
        zeros = [ring.zero() for _ in range(ring.n)]
        return cls(zeros, list(zeros), superdeg=superdeg)

    @property
    def n(self):
        return len(self.u_images)

    def xdeg(self):
        """deg_x of a homogeneous derivation (images of u^i)."""
        degrees = set()
        for img in self.u_images:
            if img:
                degrees.add(img.bidegree().d)
        for img in self.th_images:
            if img:
                degrees.add(img.bidegree().d)
        if len(degrees) > 1:
            raise NonHomogeneous("derivation images mix x degrees {degrees}", degrees=sorted(degrees))
        return degrees.pop() if degrees else 0

    def image(self, parity, i, s=0):
        """X(u^{i,s}) for parity 'even', X(theta_i^s) for parity 'odd'."""
        key = (parity, i, s)
        try:
            return self._cache[key]
        except KeyError:
            pass
        if s == 0:
            img = (self.u_images if parity == "even" else self.th_images)[i - 1]
        else:
            img = self.image(parity, i, s - 1).dx()
        self._cache[key] = img
        return img

    def apply_to_generator(self, kind, i, s=0):
        """X(u^{i,s}) for kind 'u', X(theta_i^s) for kind 'th'."""
        return self.image("even" if kind == "u" else "odd", i, s)

    def apply(self, f):
        """
        X(f) = sum over generators v of X(v) * (left derivative of f by v).
        """
        out = f._new({})
        for v in sorted(f.jet_vars()):
            img = self.image(v.parity, v.i, v.s)
            if not img:
                continue
            part = f.partial(v)
            if part:
                out = out + img * part
        return out

    def __call__(self, f):
        return self.apply(f)

    def __add__(self, other):
        return EvDerivation([a + b for a, b in zip(self.u_images, other.u_images)],
                            [a + b for a, b in zip(self.th_images, other.th_images)],
                            superdeg=self.superdeg)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return EvDerivation([a.scale(c) for a in self.u_images],
                            [a.scale(c) for a in self.th_images],
                            superdeg=self.superdeg)

    def is_zero(self):
        return not any(self.u_images) and not any(self.th_images)

    def __eq__(self, other):
        if not isinstance(other, EvDerivation):
            return NotImplemented
        return (self - other).is_zero()

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return "EvDerivation(%s)" % self.to_text()

    def to_text(self):
        parts = []
        for i, img in enumerate(self.u_images, 1):
            parts.append("u[%d] -> %s" % (i, img.to_text()))
        for i, img in enumerate(self.th_images, 1):
            parts.append("th[%d] -> %s" % (i, img.to_text()))
        return "; ".join(parts)


def schouten(P, Q):
    """
    [P, Q] = int sum_i dP/dth_i dQ/du^i + (-1)^p dP/du^i dQ/dth_i.

    :raises NonHomogeneous: when P or Q mixes super degrees
    """
    p = P.theta_degree()
    Q.theta_degree()
    total = P.density._new({})
    for i in range(1, P.n + 1):
        dp_th = P.variational("th", i)
        dq_u = Q.variational("u", i)
        if dp_th and dq_u:
            total = total + dp_th * dq_u
        dp_u = P.variational("u", i)
        dq_th = Q.variational("th", i)
        if dp_u and dq_th:
            total = total + (dp_u * dq_th).scale(_sign(p))
    return LocalFunctional(total)


def derivation_of(P):
    """
    D_P: u^i -> dP/dth_i, theta_i -> (-1)^p dP/du^i; super degree p - 1.
    """
    p = P.theta_degree()
    u_images = [P.variational("th", i) for i in range(1, P.n + 1)]
    th_images = [P.variational("u", i).scale(_sign(p)) for i in range(1, P.n + 1)]
    return EvDerivation(u_images, th_images, superdeg=p - 1)


def apply(X, f):
    return X.apply(f)


def commutator(X, Y):
    """
    [X, Y] = X Y - (-1)^(pq) Y X for derivations of super degrees p and q,
    evaluated on the generators.
    """
    sign = _sign(X.superdeg * Y.superdeg)
    u_images = []
    th_images = []
    for i in range(1, X.n + 1):
        u_images.append(X.apply(Y.image("even", i)) - Y.apply(X.image("even", i)).scale(sign))
        th_images.append(X.apply(Y.image("odd", i)) - Y.apply(X.image("odd", i)).scale(sign))
    return EvDerivation(u_images, th_images, superdeg=X.superdeg + Y.superdeg)


def flow_commute_check(X, Y):
    """True if [X, Y] vanishes on every generator."""
    return commutator(X, Y).is_zero()


def _require_degree_two(P):
    p = P.theta_degree()
    if p != 2:
        raise WrongBidegree(expected="deg_theta 2", actual="deg_theta %d" % p)


def is_hamiltonian(P):
    """True iff [P, P] = 0 for P of super degree 2."""
    _require_degree_two(P)
    return schouten(P, P).is_zero()


def is_bihamiltonian(P0, P1):
    """True iff [P0, P0] = [P0, P1] = [P1, P1] = 0."""
    _require_degree_two(P0)
    _require_degree_two(P1)
    for name, (a, b) in (("[P0,P0]", (P0, P0)), ("[P0,P1]", (P0, P1)), ("[P1,P1]", (P1, P1))):
        if not schouten(a, b).is_zero():
            log.debug("bracket %s does not vanish", name)
            return False
    return True


class HamStructure(object):
    """
    A super degree 2 local functional, marked verified once [P, P] = 0 has
    been checked.
    """

    def __init__(self, P, verified=False):
        self.P = P
        self.verified = verified
        self._derivation = None

    @classmethod
    def verify(cls, P):
        """Check [P, P] = 0 and return a verified structure (or an unverified one)."""
        return cls(P, verified=is_hamiltonian(P))

    @property
    def derivation(self):
        if self._derivation is None:
            self._derivation = derivation_of(self.P)
        return self._derivation
