"""
Random operands for the property-style tests.

Everything draws from a random.Random seeded by the caller, so a failing
case can be replayed.
"""
import itertools
import random

from superjet.bihss import build_pair
from superjet.coeffs import base_tower
from superjet.forms import ReducedOneForm
from superjet.functionals import EvDerivation
from superjet.jetring import DiffPoly

SEED = 20240101


def make_rng(seed=SEED):
    return random.Random(seed)


def random_coefficient(tower, rng, udeg=1):
    """A nonzero polynomial in u^1..u^n with small integer coefficients."""
    c = tower.constant(rng.randint(-3, 3))
    for _ in range(udeg):
        term = tower.constant(rng.randint(-2, 2))
        for i in range(1, tower.n + 1):
            if rng.random() < 0.5:
                term = term * tower.u(i)
        c = c + term
    return c if c else tower.one()


def _partitions(weight, gens):
    if weight == 0:
        return [()]
    if not gens:
        return []
    var, rest = gens[0], gens[1:]
    out = []
    for e in range(weight // var[1] + 1):
        head = ((var, e),) if e else ()
        for tail in _partitions(weight - e * var[1], rest):
            out.append(head + tail)
    return out


def monomial_keys(n, d, p):
    """Canonical keys of every monomial with deg_x d and deg_theta p."""
    if d < 0 or p < 0:
        return []
    odd_gens = [(i, s) for i in range(1, n + 1) for s in range(d + 1)]
    even_gens = [(i, s) for i in range(1, n + 1) for s in range(1, d + 1)]
    keys = []
    for odd in itertools.combinations(odd_gens, p):
        rest = d - sum(s for _, s in odd)
        if rest < 0:
            continue
        for even in _partitions(rest, even_gens):
            keys.append((even, odd, ()))
    return keys


def random_poly(ring, rng, d, p, terms=2, udeg=1):
    """A homogeneous DiffPoly of bidegree (d, p), possibly zero."""
    keys = monomial_keys(ring.n, d, p)
    if not keys:
        return ring.zero()
    chosen = {}
    for _ in range(terms):
        chosen[rng.choice(keys)] = random_coefficient(ring.tower, rng, udeg)
    return DiffPoly(ring.tower, chosen)


def random_reduced_form(ring, rng, d, p, terms=1, udeg=1):
    """int sum g_i du^i + h^i dth_i of bidegree (d, p)."""
    g = [random_poly(ring, rng, d, p, terms, udeg) for _ in range(ring.n)]
    h = [random_poly(ring, rng, d, p - 1, terms, udeg) for _ in range(ring.n)]
    return ReducedOneForm(g, h)


def random_derivation(ring, rng, d, superdeg, terms=1, udeg=1):
    """An evolutionary derivation raising deg_x by d, of super degree superdeg."""
    u_images = [random_poly(ring, rng, d, superdeg, terms, udeg) for _ in range(ring.n)]
    th_images = [random_poly(ring, rng, d, superdeg + 1, terms, udeg) for _ in range(ring.n)]
    return EvDerivation(u_images, th_images, superdeg=superdeg)


def sample_pairs():
    """Verified pairs for f = (1), (u1) and (u1, 1)."""
    return [build_pair([1]),
            build_pair([base_tower(1).u(1)]),
            build_pair([base_tower(2).u(1), 1])]


def random_normal_form(ring, rng, udeg=1):
    """
    A form of deg_x 2 and super degree 1 shaped like a normal-form cocycle:

        g_i = X th_i^2 + X u^{j,1} th_k^1 + Z u^{k,2} th_j + Z u^{k,1} u^{l,1} th_j
        h^i = Y u^{j,1} u^{k,1}, no (u^{i,1})^2 term

    Every term past th_i^2 is kept with probability 1/2.
    """
    tower = ring.tower
    idx = range(1, ring.n + 1)

    def maybe(acc, mono):
        if rng.random() < 0.5:
            return acc + mono.scale(random_coefficient(tower, rng, udeg))
        return acc

    g = []
    h = []
    for i in idx:
        gi = ring.th(i, 2).scale(random_coefficient(tower, rng, udeg))
        for j in idx:
            for k in idx:
                gi = maybe(gi, ring.u(j, 1) * ring.th(k, 1))
                gi = maybe(gi, ring.u(k, 2) * ring.th(j))
                for l in idx:
                    if l >= k:
                        gi = maybe(gi, ring.u(k, 1) * ring.u(l, 1) * ring.th(j))
        hi = ring.zero()
        for j in idx:
            for k in idx:
                if k >= j and not j == k == i:
                    hi = maybe(hi, ring.u(j, 1) * ring.u(k, 1))
        g.append(gi)
        h.append(hi)
    return ReducedOneForm(g, h)
