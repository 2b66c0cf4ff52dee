"""
Bidegree bookkeeping for the vanishing results, monomial bidegree atlases
of the graded subspaces used to prove them, and a bounded-degree linear
solver for cohomology probes.

Bidegrees here are (p, d) = (deg_theta, deg_x), the order used by the
vanishing statements.
"""
from __future__ import absolute_import

import itertools
import logging

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from superjet import config
from superjet.coeffs import base_tower, to_fraction
from superjet.errors import SystemTooLarge, UnknownSpace, WrongBidegree
from superjet.forms import ReducedOneForm
from superjet.jetring import DiffPoly

log = logging.getLogger(__name__)


# index sets and windows

def index_set(n):
    """
    I = I_1 u I_2 u I_3 as a frozenset of (p, d):

        I_1: d = 0, 1;        p = d+1 .. d+n+1
        I_2: d = 2 .. n;      p = d .. d+n+1
        I_3: d = n+1 .. n+3;  p = d .. d+n
    """
    pairs = set()
    for d in (0, 1):
        pairs.update((p, d) for p in range(d + 1, d + n + 2))
    for d in range(2, n + 1):
        pairs.update((p, d) for p in range(d, d + n + 2))
    for d in range(n + 1, n + 4):
        pairs.update((p, d) for p in range(d, d + n + 1))
    return frozenset(pairs)


def vbh_guaranteed_zero(n, p, d):
    """True iff d >= 2 and neither (p, d) nor (p+1, d) lies in the index set."""
    if d < 2:
        return False
    found = index_set(n)
    return (p, d) not in found and (p + 1, d) not in found


def window_cases(n, p, d):
    """
    The set of windows containing (p, d):
    case1 is d = 0..n, p = d+1..d+n+1; case2 is d = 2..n+3, p = d..d+n.
    """
    cases = set()
    if 0 <= d <= n and d + 1 <= p <= d + n + 1:
        cases.add("case1")
    if 2 <= d <= n + 3 and d <= p <= d + n:
        cases.add("case2")
    return cases


def omega_lambda_window(n, p, d):
    """'case1', 'case2' or 'outside'; case1 wins when both match."""
    cases = window_cases(n, p, d)
    for name in ("case1", "case2"):
        if name in cases:
            return name
    return "outside"


def nontrivial_family_window(n):
    """(p, d) with d = 3..n+3 and p = d..d+n-1."""
    return frozenset((p, d) for d in range(3, n + 4) for p in range(d, d + n))


# monomial atlases

def _subset_degrees(gens):
    """(p, d) of every product of distinct odd generators; gens lists their deg_x."""
    out = []
    for k in range(len(gens) + 1):
        for combo in itertools.combinations(gens, k):
            out.append((k, sum(combo)))
    return out


def _c_degrees(n, skip=None):
    """Bidegrees of monomials of C = functions[th_j, th_j^1]; skip drops th_skip."""
    gens = []
    for j in range(1, n + 1):
        if j != skip:
            gens.append(0)
        gens.append(1)
    return _subset_degrees(gens)


def _jet_factors(indices, d_max):
    """u^{i,s} (even, deg_x s) and th_i^{s+1} (odd, deg_x s+1) for s >= 1."""
    factors = []
    for i in indices:
        for s in range(1, d_max + 1):
            factors.append(("u", i, s))
        for s in range(2, d_max + 1):
            factors.append(("t", i, s))
    return factors


def _jet_monomials(indices, d_max, p_max):
    """
    Every monomial in the higher jet factors with deg_x <= d_max, as
    (p, d, indices used).
    """
    factors = _jet_factors(indices, d_max)
    found = []

    def walk(start, p, d, used):
        found.append((p, d, frozenset(used)))
        for k in range(start, len(factors)):
            kind, i, s = factors[k]
            if d + s > d_max:
                continue
            dp = 1 if kind == "t" else 0
            if p + dp > p_max:
                continue
            # even factors repeat, odd ones do not
            walk(k if kind == "u" else k + 1, p + dp, d + s, used + [i])

    walk(0, 0, 0, [])
    return found


def _combine(left, right, p_max, d_max, shift=(0, 0)):
    out = set()
    for p1, d1 in left:
        for p2, d2 in right:
            p = p1 + p2 + shift[0]
            d = d1 + d2 + shift[1]
            if p <= p_max and d <= d_max:
                out.add((p, d))
    return out


def _space_c_dtheta(n, p_max, d_max):
    return _combine(_c_degrees(n), [(0, 0)], p_max, d_max, shift=(1, 0))


def _space_c_i(n, p_max, d_max, nontrivial=False):
    jets = [(p, d) for p, d, used in _jet_monomials([1], d_max, p_max)
            if d > 0 or not nontrivial]
    return _combine(_c_degrees(n), jets, p_max, d_max)


def _space_m_hat(n, p_max, d_max):
    mixed = [(p, d) for p, d, used in _jet_monomials(range(1, n + 1), d_max, p_max)
             if len(used) > 1]
    return _combine(_c_degrees(n), mixed, p_max, d_max)


def _space_h_i(n, p_max, d_max):
    jets = [(p, d) for p, d, used in _jet_monomials([1], d_max, p_max)]
    du = [(0, s) for s in range(d_max + 1)]
    return _combine(_combine(_c_degrees(n), jets, p_max, d_max), du, p_max, d_max)


def _family(prefix, dtheta_order):
    """C_0^1 * prefix * dth_j^{dtheta_order}; prefix is a (p, d) shift."""
    def space(n, p_max, d_max):
        return _combine(_c_degrees(n, skip=1), [(0, 0)], p_max, d_max,
                        shift=(prefix[0] + 1, prefix[1] + dtheta_order))
    return space


SPACES = {
    "C_dtheta": _space_c_dtheta,
    "C_lambda_dtheta": _space_c_dtheta,
    "C_i": _space_c_i,
    "C_i_nt": lambda n, p_max, d_max: _space_c_i(n, p_max, d_max, nontrivial=True),
    "M_hat": _space_m_hat,
    "H_i": _space_h_i,
    # th_i th_i^2 dth_j
    "C0_theta_theta2_dtheta": _family((2, 2), 0),
    # th_i^2 dth_i
    "C0_theta2_dtheta": _family((1, 2), 0),
    # th_i th_i^3 dth_i
    "C0_theta_theta3_dtheta": _family((2, 3), 0),
    # th_i th_i^2 dth_i^1
    "C0_theta_theta2_dtheta1": _family((2, 2), 1),
}


class MonomialAtlas(object):
    """Occupied bidegrees of one space below the cutoffs."""

    def __init__(self, space, n, p_max, d_max, occupied):
        self.space = space
        self.n = n
        self.p_max = p_max
        self.d_max = d_max
        self.occupied = frozenset(occupied)

    def __contains__(self, pd):
        return tuple(pd) in self.occupied

    def to_dict(self):
        return {"space": self.space, "n": self.n, "p_max": self.p_max, "d_max": self.d_max,
                "occupied": [list(pd) for pd in sorted(self.occupied)]}


def atlas(space, n, p_max, d_max):
    """
    :raises UnknownSpace: for a space name outside SPACES
    """
    try:
        builder = SPACES[space]
    except KeyError:
        raise UnknownSpace(space=space)
    return MonomialAtlas(space, n, p_max, d_max, builder(n, p_max, d_max))


# bounded ansatz solver

def _u_monomials(n, bound):
    """Exponent tuples of total degree <= bound."""
    out = []
    for total in range(bound + 1):
        for combo in itertools.combinations_with_replacement(range(n), total):
            exps = [0] * n
            for k in combo:
                exps[k] += 1
            out.append(tuple(exps))
    return out


def _jet_keys(n, p, d):
    """
    Canonical keys (even, odd, ()) of every monomial of bidegree (p, d) in
    u^{i,s} (s >= 1) and th_i^s (s >= 0).
    """
    if p < 0 or d < 0:
        return []
    odd_gens = [(i, s) for i in range(1, n + 1) for s in range(d + 1)]
    even_gens = [(i, s) for i in range(1, n + 1) for s in range(1, d + 1)]
    keys = []
    for odd in itertools.combinations(odd_gens, p):
        rest = d - sum(s for _, s in odd)
        if rest < 0:
            continue
        for even in _even_partitions(even_gens, rest):
            keys.append((even, tuple(sorted(odd)), ()))
    return keys


def _even_partitions(gens, weight, start=0):
    if weight == 0:
        return [()]
    out = []
    for k in range(start, len(gens)):
        var = gens[k]
        s = var[1]
        for e in range(1, weight // s + 1):
            for tail in _even_partitions(gens, weight - e * s, k + 1):
                out.append(((var, e),) + tail)
    return out


def ansatz_basis(n, p, d, bound, tower=None):
    """
    Reduced 1-forms u^a m du^i (m of bidegree (p, d)) and u^a m dth_i
    (m of bidegree (p-1, d)) with |a| <= bound.
    """
    tower = tower or base_tower(n)
    zero = DiffPoly(tower)
    field = tower.field
    basis = []
    for exps in _u_monomials(n, bound):
        c = field.one
        for k, e in enumerate(exps):
            c = c * field.gens[k] ** e
        coeff = tower.wrap(c)
        for i in range(1, n + 1):
            for key in _jet_keys(n, p, d):
                g = [zero] * n
                g[i - 1] = DiffPoly(tower, {key: coeff})
                basis.append(ReducedOneForm(g, [zero] * n))
            for key in _jet_keys(n, p - 1, d):
                h = [zero] * n
                h[i - 1] = DiffPoly(tower, {key: coeff})
                basis.append(ReducedOneForm([zero] * n, h))
    return basis


class AnsatzProblem(object):
    """
    A bounded probe at bidegree (p, d) = (deg_theta, deg_x).

    :param mode: 'kernel2' or 'coboundary'
    :param target: the form tested in coboundary mode
    :param through: 'D0D1' compares the target itself with the image of
        D0~ D1~; 'D0' first applies D0~ to the target
    """

    def __init__(self, p, d, udeg_bound=None, mode="kernel2", target=None, through="D0D1"):
        self.p = p
        self.d = d
        self.udeg_bound = config.get("udeg_bound") if udeg_bound is None else udeg_bound
        if mode not in ("kernel2", "coboundary"):
            raise ValueError("unknown probe mode %r" % mode)
        if through not in ("D0D1", "D0"):
            raise ValueError("unknown probe route %r" % through)
        self.mode = mode
        self.target = target
        self.through = through


class ProbeResult(object):
    """
    Outcome of a bounded probe. Negative answers hold within the bound only.
    """

    def __init__(self, problem, unknowns, dimension=None, basis=None, in_image=None):
        self.problem = problem
        self.unknowns = unknowns
        self.dimension = dimension
        self.basis = basis or []
        self.in_image = in_image

    def to_dict(self):
        problem = self.problem
        out = {"mode": problem.mode, "p": problem.p, "d": problem.d,
               "bounds": {"udeg": problem.udeg_bound}, "unknowns": self.unknowns}
        if problem.mode == "kernel2":
            out["dimension"] = self.dimension
            out["basis"] = [w.to_text() for w in self.basis]
        else:
            out["in_image"] = self.in_image
            out["through"] = problem.through
        return out


def _entries(form, tag):
    """(row key, frac) for every coefficient of a reduced form."""
    for name, polys in (("g", form.g), ("h", form.h)):
        for i, poly in enumerate(polys, 1):
            for key, c in poly.terms.items():
                yield (tag, name, i, key), c.frac


def _columns(images):
    """Per-column dicts of row key -> frac."""
    columns = []
    for parts in images:
        col = {}
        for tag, form in parts:
            for key, frac in _entries(form, tag):
                col[key] = col[key] + frac if key in col else frac
        columns.append(col)
    return columns


def _assemble(columns, ring):
    """
    Clear the denominators of each row and equate u-monomial coefficients.

    :returns: list of dense rows over QQ
    """
    keys = sorted(set(k for col in columns for k in col), key=repr)
    rows = []
    for key in keys:
        lcm = ring.one
        for col in columns:
            if key in col:
                lcm = lcm.lcm(col[key].denom)
        cleared = {}
        for k, col in enumerate(columns):
            if key not in col:
                continue
            frac = col[key]
            poly = frac.numer * lcm.exquo(frac.denom)
            for monom, coeff in poly.terms():
                cleared.setdefault(monom, {})[k] = coeff
        for monom in sorted(cleared):
            row = [QQ.zero] * len(columns)
            for k, coeff in cleared[monom].items():
                row[k] = QQ.convert(coeff)
            rows.append(row)
    return rows


def _matrix(rows, ncols):
    return DomainMatrix(rows, (len(rows), ncols), QQ)


def ansatz_solve(S, problem):
    """
    kernel2: a basis of {w at (p, d) : D0~ w = D1~ w = 0} within the bound.
    coboundary: whether the target is D0~ D1~ eta for eta at (p-2, d-2)
    within the bound (after D0~ when problem.through is 'D0').

    :raises SystemTooLarge: when the unknown count exceeds the configured cap
    :raises WrongBidegree: when the target does not sit at (p, d)
    """
    cap = config.get("max_unknowns")
    tower = S.tower
    ring = tower.field.ring
    if problem.mode == "kernel2":
        basis = ansatz_basis(S.n, problem.p, problem.d, problem.udeg_bound, tower)
        if len(basis) > cap:
            raise SystemTooLarge(unknowns=len(basis), cap=cap)
        log.debug("kernel2 probe", extra={"p": problem.p, "d": problem.d, "unknowns": len(basis)})
        columns = _columns([(("D0", S.dtilde0(w)), ("D1", S.dtilde1(w))) for w in basis])
        rows = _assemble(columns, ring)
        if not basis:
            return ProbeResult(problem, 0, dimension=0)
        if rows:
            null = _matrix(rows, len(basis)).nullspace().to_list()
        else:
            null = [[QQ.one if j == k else QQ.zero for j in range(len(basis))]
                    for k in range(len(basis))]
        forms = [_combine_basis(basis, vec, S) for vec in null]
        return ProbeResult(problem, len(basis), dimension=len(forms), basis=forms)

    target = problem.target if problem.target is not None else S.zero_form()
    p, d = problem.p, problem.d
    if problem.through == "D0":
        target = S.dtilde0(target)
        p, d = p + 1, d + 1
    if target:
        actual = target.bidegree()
        if (actual[1], actual[0]) != (p, d):
            raise WrongBidegree(expected="(p, d) = (%d, %d)" % (p, d),
                                actual="(p, d) = (%d, %d)" % (actual[1], actual[0]))
    basis = ansatz_basis(S.n, p - 2, d - 2, problem.udeg_bound, tower)
    if len(basis) > cap:
        raise SystemTooLarge(unknowns=len(basis), cap=cap)
    if not target:
        return ProbeResult(problem, len(basis), in_image=True)
    log.debug("coboundary probe", extra={"p": p, "d": d, "unknowns": len(basis)})
    columns = _columns([(("D", S.dtilde0(S.dtilde1(eta))),) for eta in basis])
    columns.append(dict(_entries(target, "D")))
    rows = _assemble(columns, ring)
    full = _matrix(rows, len(columns))
    if basis:
        lhs = _matrix([row[:-1] for row in rows], len(basis))
        in_image = lhs.rank() == full.rank()
    else:
        in_image = full.rank() == 0
    return ProbeResult(problem, len(basis), in_image=in_image)


def _combine_basis(basis, vec, S):
    total = S.zero_form()
    for w, x in zip(basis, vec):
        if x:
            total = total + w.scale(to_fraction(x))
    return total
