"""Classification of 4-variable hypersurface germs as compound Du Val types,
Milnor numbers by three routes, the weighted-blowup catalogue for cA points,
and the Milnor-sum budget checks.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from .ideals import CapExceeded, jet_quotient_dimension, quotient_dimension
from .poly import (
    Poly,
    PolyError,
    Substitution,
    WeightSystem,
    apply_substitution,
    parse_poly,
    poly_gcd,
    poly_to_string,
    squarefree_gcd_check,
)

DEFAULT_MAX_JET = 24


class GermError(ValueError):
    pass


class MilnorRoutesDisagree(GermError):
    """Two Milnor routes returned different finite values."""


class MilnorInconclusive(GermError):
    """The requested route could not certify a value at the given jet cap."""


class Germ:
    """A hypersurface germ at the origin of C^4, stored as a polynomial
    truncation with zero constant term."""

    def __init__(self, poly: Poly):
        if len(poly.variables) != 4:
            raise GermError("a germ lives in exactly 4 variables")
        if poly.constant_term() != 0:
            raise GermError("germ must vanish at the origin")
        self.poly = poly

    @classmethod
    def from_json(cls, data: dict) -> "Germ":
        return cls(parse_poly(data["poly"], tuple(data["vars"])))

    def to_json(self) -> dict:
        return {"vars": list(self.poly.variables), "poly": poly_to_string(self.poly)}

    def jacobian(self) -> list:
        return [self.poly.derivative(v) for v in self.poly.variables]

    def is_singular(self) -> bool:
        return self.poly.linear_part().is_zero()


@dataclass
class GermClass:
    """Classification verdict plus the certificate that produced it."""

    kind: str  # cA | cD | cE | smooth | non-isolated | undetermined
    index: int | None = None
    substitution: Substitution | None = None
    weights: WeightSystem | None = None
    jet: int = DEFAULT_MAX_JET
    diagnostic: str | None = None

    def __post_init__(self):
        if self.kind == "cA" and (self.index is None or self.index < 1):
            raise GermError("cA index must be >= 1")
        if self.kind == "cD" and (self.index is None or self.index < 4):
            raise GermError("cD index must be >= 4")
        if self.kind == "cE" and self.index not in (6, 7, 8):
            raise GermError("cE index must be 6, 7 or 8")
        if self.kind == "undetermined" and not self.diagnostic:
            raise GermError("undetermined verdicts carry a diagnostic")

    def label(self) -> str:
        if self.kind in ("cA", "cD", "cE"):
            return f"{self.kind}({self.index})"
        return self.kind

    def to_json(self) -> dict:
        cert = None
        if self.substitution is not None:
            cert = {
                "substitution": {
                    v: poly_to_string(img) for v, img in sorted(self.substitution.images.items())
                },
                "unit": poly_to_string(self.substitution.unit) if self.substitution.unit else None,
            }
        return {
            "kind": self.kind,
            "index": self.index,
            "jet": self.jet,
            "weights": [str(w) for w in self.weights.weights] if self.weights else None,
            "certificate": cert,
            "diagnostic": self.diagnostic,
        }


# -- quadratic splitting ----------------------------------------------------


def _hessian_matrix(q: Poly) -> list:
    """Symmetric matrix of the quadratic form q (half Hessian)."""
    vs = q.variables
    n = len(vs)
    m = [[Fraction(0)] * n for _ in range(n)]
    for e, c in q.terms.items():
        idx = [i for i, k in enumerate(e) for _ in range(k)]
        if len(idx) != 2:
            raise PolyError("not a quadratic form")
        i, j = idx
        if i == j:
            m[i][i] = c
        else:
            m[i][j] += c / 2
            m[j][i] += c / 2
    return m


def _matrix_rank(m: list) -> int:
    m = [row[:] for row in m]
    n = len(m)
    rank = 0
    col = 0
    for col in range(n):
        piv = None
        for r in range(rank, n):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = Fraction(1) / m[rank][col]
        for r in range(rank + 1, n):
            f = m[r][col] * inv
            if f:
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def _diagonalising_substitution(g: Poly):
    """Linear substitution L with (g o L) having diagonal quadratic part;
    returns (L, split_vars, diag coeffs by var)."""
    vs = g.variables
    n = len(vs)
    work = g.homogeneous_part(2)
    total = Substitution.identity(vs)
    guard = 0
    while True:
        guard += 1
        if guard > 4 * n:
            raise GermError("quadratic diagonalisation did not terminate")
        m = _hessian_matrix(work)
        off = None
        for i in range(n):
            for j in range(i + 1, n):
                if m[i][j] != 0 and m[i][i] == 0 and m[j][j] == 0:
                    off = (i, j)
                    break
            if off:
                break
        if off is None:
            break
        i, j = off
        # x_i -> x_i + x_j, x_j -> x_i - x_j creates diagonal entries
        images = {v: Poly.var(vs, v) for v in vs}
        images[vs[i]] = Poly.var(vs, vs[i]) + Poly.var(vs, vs[j])
        images[vs[j]] = Poly.var(vs, vs[i]) - Poly.var(vs, vs[j])
        step = Substitution(images, check=False)
        total = total.compose(step)
        work = work.substitute(step.images)
    # clear mixed terms against diagonal pivots
    m = _hessian_matrix(work)
    changed = True
    guard = 0
    while changed:
        changed = False
        guard += 1
        if guard > 4 * n * n:
            raise GermError("quadratic diagonalisation did not terminate")
        m = _hessian_matrix(work)
        for i in range(n):
            if m[i][i] == 0:
                continue
            for j in range(n):
                if j != i and m[i][j] != 0:
                    # x_i -> x_i - (m_ij / m_ii) x_j kills the cross term
                    images = {v: Poly.var(vs, v) for v in vs}
                    images[vs[i]] = Poly.var(vs, vs[i]) - (m[i][j] / m[i][i]) * Poly.var(vs, vs[j])
                    step = Substitution(images, check=False)
                    total = total.compose(step)
                    work = work.substitute(step.images)
                    changed = True
                    break
            if changed:
                break
    m = _hessian_matrix(work)
    coeffs = {}
    split = []
    for i in range(n):
        for j in range(n):
            if i != j and m[i][j] != 0:
                raise GermError("diagonalisation failed")
        if m[i][i] != 0:
            split.append(vs[i])
            coeffs[vs[i]] = m[i][i]
    return total, split, coeffs


@dataclass
class SplitResult:
    rank: int
    residual: Poly
    substitution: Substitution
    split_variables: tuple
    square_coefficients: dict

    def __iter__(self):
        # unpack as (rank, residual, substitution)
        return iter((self.rank, self.residual, self.substitution))


def split_quadratic(g: Germ, max_jet: int = DEFAULT_MAX_JET) -> SplitResult:
    """Splitting-lemma step: rank of the Hessian at 0 and an order->=3
    residual in the corank variables, with the substitution witnessing
    g ~ sum of rank squares + residual up to jet max_jet.

    After diagonalising the quadratic part, the split coordinates are shifted
    by the critical point v*(corank vars) of the split-variable block, found
    by Newton iteration: that kills every split-linear slot at once and the
    residual is the critical value g(v*, corank).
    """
    if not g.is_singular():
        raise GermError("split_quadratic needs a singular germ")
    p = g.poly.truncate(max_jet)
    vs = p.variables
    sub, split, coeffs = _diagonalising_substitution(p)
    base = apply_substitution(p, sub, max_jet)
    if not split:
        return SplitResult(0, base, sub, (), {})

    corank_vars = [v for v in vs if v not in split]
    partials = {v: base.derivative(v) for v in split}
    # constant Hessian block of the split variables (diagonal by construction)
    hinv = {v: Fraction(1) / (2 * coeffs[v]) for v in split}
    star = {v: Poly.zero(vs) for v in split}
    rounds = 0
    while True:
        rounds += 1
        if rounds > max_jet + 2:
            raise GermError(f"splitting Newton iteration did not stabilise within jet {max_jet}")
        point = {u: Poly.var(vs, u) for u in vs}
        point.update(star)
        resid = {v: partials[v].substitute(point, max_jet) for v in split}
        if all(r.is_zero() for r in resid.values()):
            break
        for v in split:
            star[v] = (star[v] - hinv[v] * resid[v]).truncate(max_jet)
    point = {u: Poly.var(vs, u) for u in vs}
    point.update(star)
    residual4 = base.substitute(point, max_jet)
    shift = Substitution(
        {
            **{u: Poly.var(vs, u) for u in corank_vars},
            **{v: Poly.var(vs, v) + star[v] for v in split},
        },
        check=False,
    )
    sub = sub.compose(shift, max_jet)
    if corank_vars:
        residual = residual4.with_variables(tuple(corank_vars))
    else:
        residual = Poly.zero(("_",))
    if not residual.is_zero() and residual.order() < 3:
        raise GermError("residual has unexpected low order")
    return SplitResult(len(split), residual, sub, tuple(split), dict(coeffs))


# -- classification ---------------------------------------------------------


def _binary_from_split(rank: int, residual: Poly, coeffs_extra: list):
    """For rank >= 2: the binary form (extra squares + residual) whose order
    and squarefreeness give the cA index.  coeffs_extra lists the diagonal
    coefficients of the squares beyond the first two."""
    if rank == 2:
        return residual
    if rank == 3:
        zname = "_w"
        vs = (zname,) + residual.variables
        f = Poly.monomial(vs, (2,) + (0,) * (len(vs) - 1), coeffs_extra[0])
        return f + residual.with_variables(vs)
    # rank 4
    vs = ("_w1", "_w2")
    return Poly(vs, {(2, 0): coeffs_extra[0], (0, 2): coeffs_extra[1]})


def _linear_change_3vars(h: Poly, target_imgs: dict) -> Poly:
    return h.substitute(target_imgs)


def _complete_basis(vs: tuple, rows: list) -> list:
    """Extend the given independent linear forms (as coefficient rows) to a
    basis of the 3-variable space, deterministically."""
    n = len(vs)
    basis = [r[:] for r in rows]
    for i in range(n):
        cand = [Fraction(0)] * n
        cand[i] = Fraction(1)
        test = basis + [cand]
        if _matrix_rank(test) == len(test):
            basis.append(cand)
        if len(basis) == n:
            break
    return basis


def _linear_coeff_row(l: Poly) -> list:
    return [l.coefficient(tuple(1 if i == j else 0 for j in range(len(l.variables))))
            for i in range(len(l.variables))]


def _cd_normalise(h: Poly, ell: Poly, max_jet: int):
    """Bring h (ternary, cubic part = ell^2 * ell') to the shape
    y^2 z + y*e(t) + S(z,t) mod jet; returns (e, S) or None on failure."""
    vs = h.variables
    f3 = h.homogeneous_part(3)
    ellp = None
    try:
        ellp = _monic_of(poly_gcd(f3, ell * ell) and None)  # placeholder, replaced below
    except Exception:
        ellp = None
    # f3 = c * ell^2 * ell'; extract ell' by exact division
    from .poly import exact_divide

    quot = exact_divide(f3, ell * ell)
    # linear change: y <- ell, z <- quot, t <- completion
    rows = [_linear_coeff_row(ell), _linear_coeff_row(quot)]
    if _matrix_rank(rows) < 2:
        return None
    basis = _complete_basis(vs, rows)
    # we need the inverse map: new coords (y,z,t) with y = ell(old), etc.
    # h'(y,z,t) := h(old(y,z,t)) where old = basis^{-1} applied to (y,z,t)
    inv = _invert_matrix(basis)
    imgs = {}
    for i, v in enumerate(vs):
        acc = Poly.zero(vs)
        for j, u in enumerate(vs):
            acc = acc + inv[i][j] * Poly.var(vs, u)
        imgs[v] = acc
    hn = h.substitute(imgs, max_jet)
    # now cubic part of hn is y^2 z exactly (up to the checks below)
    y, z, t = vs
    f3n = hn.homogeneous_part(3)
    expected = Poly.var(vs, y) ** 2 * Poly.var(vs, z)
    if not (f3n - expected).is_zero():
        return None
    guard = 0
    while True:
        guard += 1
        if guard > 8 * max_jet:
            return None
        # slot decomposition in powers of y
        h0 = hn.coefficient_in(y, 0)
        h1 = hn.coefficient_in(y, 1)
        h2 = hn.coefficient_in(y, 2)
        rest3 = hn - h0 - h1 * Poly.var(vs, y) - h2 * Poly.var(vs, y) ** 2
        # (a) absorb y^2-coefficient excess into z
        excess = h2 - Poly.var(vs, z)
        if not excess.is_zero():
            hn = hn.substitute_one(z, Poly.var(vs, z) - excess, max_jet)
            continue
        # (b) absorb y^3-divisible block via z shift (divide by y^2)
        if not rest3.is_zero():
            w = rest3.divide_monomial(_exps_of(vs, {y: 2}))
            hn = hn.substitute_one(z, Poly.var(vs, z) - w, max_jet)
            continue
        # (c) kill z-divisible part of the y-linear slot via y shift
        zdiv = Poly(vs, {e: c for e, c in h1.terms.items() if e[vs.index(z)] > 0})
        if not zdiv.is_zero():
            d = zdiv.divide_monomial(_exps_of(vs, {z: 1}))
            hn = hn.substitute_one(y, Poly.var(vs, y) - d * Fraction(1, 2), max_jet)
            continue
        return h1, h0


def _exps_of(vs: tuple, d: dict) -> tuple:
    return tuple(d.get(v, 0) for v in vs)


def _monic_of(p):
    return p


def _invert_matrix(m: list) -> list:
    n = len(m)
    a = [row[:] + [Fraction(1) if i == j else Fraction(0) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if a[r][col] != 0:
                piv = r
                break
        if piv is None:
            raise GermError("matrix not invertible")
        a[col], a[piv] = a[piv], a[col]
        inv = Fraction(1) / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def _perfect_square_linear(g2: Poly) -> Poly | None:
    """If the quadratic form g2 equals c*l^2, return l (monic); else None."""
    sq = squarefree_gcd_check(g2)
    if sq.total_degree() != 1:
        return None
    from .poly import exact_divide

    try:
        c = exact_divide(g2, sq * sq)
    except PolyError:
        return None
    if c.total_degree() != 0:
        return None
    return sq


def classify_cdv(g: Germ, max_jet: int = DEFAULT_MAX_JET) -> GermClass:
    """Compound Du Val classification of a 4-variable hypersurface germ."""
    if not g.is_singular():
        return GermClass("smooth", jet=max_jet)
    split = split_quadratic(g, max_jet)
    rank, residual, sub = split.rank, split.residual, split.substitution
    if rank == 0:
        return GermClass(
            "undetermined", jet=max_jet, substitution=sub,
            diagnostic="corank 4: quadratic part vanishes; outside the cDV patterns",
        )

    if rank >= 2:
        extra = [split.square_coefficients[v] for v in split.split_variables[2:]]
        binary = _binary_from_split(rank, residual, extra)
        if binary.is_zero():
            return GermClass(
                "non-isolated", jet=max_jet, substitution=sub,
                diagnostic=f"non-isolated up to jet {max_jet}: residual vanishes",
            )
        order = binary.order()
        if order > max_jet:
            return GermClass(
                "undetermined", jet=max_jet, substitution=sub,
                diagnostic=f"residual order exceeds jet {max_jet}",
            )
        # isolation first via the cheap jet oracle; the gcd then names the
        # repeated factor on the non-isolated branch
        jac = [binary.derivative(v) for v in binary.variables]
        isolated = False
        if not any(j.is_zero() for j in jac):
            _, isolated = jet_quotient_dimension(jac, max_jet)
        if not isolated:
            common = squarefree_gcd_check(binary)
            label = poly_to_string(common) if common.total_degree() > 0 else "undetected at this jet"
            return GermClass(
                "non-isolated", jet=max_jet, substitution=sub,
                diagnostic=f"non-isolated up to jet {max_jet}: residual has the repeated factor "
                f"{label}",
            )
        n = order - 1
        w = Fraction(1, n + 1)
        weights = WeightSystem([Fraction(1, 2), Fraction(1, 2), min(w, Fraction(1)), min(w, Fraction(1))])
        return GermClass("cA", n, substitution=sub, weights=weights, jet=max_jet)

    # rank 1: ternary residual
    h = residual
    if h.is_zero():
        return GermClass(
            "non-isolated", jet=max_jet, substitution=sub,
            diagnostic=f"non-isolated up to jet {max_jet}: ternary residual vanishes",
        )
    f3 = h.homogeneous_part(3)
    if f3.is_zero():
        return GermClass(
            "undetermined", jet=max_jet, substitution=sub,
            diagnostic="corank 3 with vanishing cubic part: outside the cDV patterns",
        )
    partials = [f3.derivative(v) for v in h.variables]
    gcd_all = f3
    for p in partials:
        gcd_all = poly_gcd(gcd_all, p)
        if gcd_all.total_degree() == 0:
            break
    d = gcd_all.total_degree()
    if d == 0:
        # f3 squarefree: not divisible by the square of a linear form
        weights = WeightSystem([Fraction(1, 2), Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)])
        return GermClass("cD", 4, substitution=sub, weights=weights, jet=max_jet)
    if d == 1:
        normal = _cd_normalise(h, gcd_all, max_jet)
        if normal is None:
            return GermClass(
                "undetermined", jet=max_jet, substitution=sub,
                diagnostic="cD normal form reduction failed at jet "
                f"{max_jet}",
            )
        e, s_part = normal
        tname = h.variables[2]
        r = None
        if not e.is_zero():
            r = e.min_exponent(tname)
            if e.coefficient_in(tname, r).constant_term() == 0:
                # y-linear slot not a pure t-series: outside the normal form
                return GermClass(
                    "undetermined", jet=max_jet, substitution=sub,
                    diagnostic="y-linear slot is not a pure t-power series",
                )
        s = s_part.order() if not s_part.is_zero() else None
        if s is None and r is None:
            return GermClass(
                "non-isolated", jet=max_jet, substitution=sub,
                diagnostic=f"non-isolated up to jet {max_jet}: cD tail vanishes",
            )
        if s is None:
            m = 2 * r
        elif r is None:
            m = s + 1
        else:
            m = min(2 * r, s + 1)
        if m < 4:
            return GermClass(
                "undetermined", jet=max_jet, substitution=sub,
                diagnostic=f"computed cD index {m} below 4",
            )
        wm = Fraction(1, m - 1)
        weights = WeightSystem([Fraction(1, 2), Fraction(m - 2, 2 * (m - 1)), wm, wm])
        return GermClass("cD", m, substitution=sub, weights=weights, jet=max_jet)
    if d == 2:
        ell = _perfect_square_linear(gcd_all)
        if ell is None:
            return GermClass(
                "undetermined", jet=max_jet, substitution=sub,
                diagnostic="degree-2 common factor of the cubic is not a perfect square",
            )
        # normalise ell -> y
        vs = h.variables
        rows = [_linear_coeff_row(ell)]
        basis = _complete_basis(vs, rows)
        inv = _invert_matrix(basis)
        imgs = {}
        for i, v in enumerate(vs):
            acc = Poly.zero(vs)
            for j, u in enumerate(vs):
                acc = acc + inv[i][j] * Poly.var(vs, u)
            imgs[v] = acc
        hn = h.substitute(imgs, max_jet)
        y = vs[0]
        c3 = hn.homogeneous_part(3).coefficient(_exps_of(vs, {y: 3}))
        if c3 == 0 or not (hn.homogeneous_part(3) - c3 * Poly.var(vs, y) ** 3).is_zero():
            return GermClass(
                "undetermined", jet=max_jet, substitution=sub,
                diagnostic="cubic part is not a perfect cube after normalisation",
            )
        bpart = hn.coefficient_in(y, 0)
        apart = hn.coefficient_in(y, 1)
        b4 = bpart.homogeneous_part(4)
        a3 = apart.homogeneous_part(3)
        b5 = bpart.homogeneous_part(5)
        if not b4.is_zero():
            k, wz = 6, Fraction(1, 4)
        elif not a3.is_zero():
            k, wz = 7, Fraction(2, 9)
        elif not b5.is_zero():
            k, wz = 8, Fraction(1, 5)
        else:
            return GermClass(
                "undetermined", jet=max_jet, substitution=sub,
                diagnostic="residual matches none of the cE(6,7,8) weighted patterns "
                f"at jet {max_jet}",
            )
        weights = WeightSystem([Fraction(1, 2), Fraction(1, 3), wz, wz])
        return GermClass("cE", k, substitution=sub, weights=weights, jet=max_jet)
    return GermClass(
        "undetermined", jet=max_jet, substitution=sub,
        diagnostic="cubic part divides its own partials (degenerate)",
    )


# -- Milnor numbers ----------------------------------------------------------


def _weight_candidates(p: Poly):
    """Positive rational weight vectors w with min term-degree 1 and the
    minimising terms spanning a candidate quasihomogeneous initial part."""
    support = sorted(p.terms)
    n = len(p.variables)
    seen = set()

    def solve(eqs):
        # eqs: list of exponent rows with w.e = 1; free coords resolved by
        # pairwise-equality padding over a small deterministic grid.
        rows = [list(map(Fraction, e)) + [Fraction(1)] for e in eqs]
        # gaussian elimination with column pivots
        m = [r[:] for r in rows]
        ncols = n
        pivots = []
        r = 0
        for c in range(ncols):
            piv = None
            for rr in range(r, len(m)):
                if m[rr][c] != 0:
                    piv = rr
                    break
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            inv = Fraction(1) / m[r][c]
            m[r] = [x * inv for x in m[r]]
            for rr in range(len(m)):
                if rr != r and m[rr][c]:
                    f = m[rr][c]
                    m[rr] = [x - f * y for x, y in zip(m[rr], m[r])]
            pivots.append(c)
            r += 1
        for rr in range(r, len(m)):
            if m[rr][ncols] != 0:
                return None  # inconsistent
        free = [c for c in range(ncols) if c not in pivots]
        grid = [Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(2, 3),
                Fraction(1, 5), Fraction(1), Fraction(1, 6), Fraction(1, 8),
                Fraction(3, 4), Fraction(2, 5)]
        if not free:
            w = [Fraction(0)] * ncols
            for rr, c in enumerate(pivots):
                w[c] = m[rr][ncols]
            return [tuple(w)]
        out = []
        for combo in itertools.product(grid, repeat=len(free)):
            w = [Fraction(0)] * ncols
            for c, val in zip(free, combo):
                w[c] = val
            ok = True
            for rr, c in enumerate(pivots):
                w[c] = m[rr][ncols] - sum(m[rr][cc] * w[cc] for cc in free)
            out.append(tuple(w))
            if len(out) >= 80:
                break
        return out

    subsets = [support]
    for size in (4, 3, 2, 1):
        if size <= len(support):
            subsets.extend(itertools.combinations(support, size))
    for eqs in subsets:
        sols = solve(list(eqs))
        if not sols:
            continue
        for w in sols:
            if w in seen:
                continue
            seen.add(w)
            if any(x <= 0 or x > 1 for x in w):
                continue
            degs = [sum(wc * k for wc, k in zip(w, e)) for e in support]
            if min(degs) == 1:
                yield w


def _formula_route(p: Poly, max_jet: int):
    for w in _weight_candidates(p):
        ws = WeightSystem(w)
        from .poly import weighted_order

        _, initial = weighted_order(p, ws)
        jac = [initial.derivative(v) for v in p.variables]
        if any(j.is_zero() for j in jac):
            continue
        try:
            d = quotient_dimension(jac)
        except CapExceeded:
            continue
        if d is None:
            continue
        mu = Fraction(1)
        for x in w:
            mu *= Fraction(1) / x - 1
        if mu.denominator != 1:
            continue
        return int(mu), ws
    raise MilnorInconclusive(
        "no semi-quasihomogeneous structure with isolated initial part found"
    )


def milnor_number(g: Germ, route: str = "jet", max_jet: int = DEFAULT_MAX_JET):
    """Milnor number of the germ; None encodes an infinite value.

    route='formula' requires a verified semi-quasihomogeneous structure and
    returns the product formula value; route='groebner' computes the global
    staircase and cross-checks it against the local jet value; route='jet'
    returns the stabilised jet dimension.
    """
    if not g.is_singular():
        raise GermError("Milnor number is defined for singular germs here")
    jac = g.jacobian()
    if route == "jet":
        dim, stab = jet_quotient_dimension(jac, max_jet)
        if not stab:
            raise MilnorInconclusive(f"jet oracle did not stabilise by jet {max_jet}")
        return dim
    if route == "groebner":
        try:
            global_dim = quotient_dimension(jac)
        except CapExceeded as exc:
            raise MilnorInconclusive(str(exc)) from exc
        dim, stab = jet_quotient_dimension(jac, max_jet)
        if global_dim is None:
            if stab:
                raise MilnorRoutesDisagree(
                    "global staircase infinite but local jet value "
                    f"{dim} is finite (critical locus away from 0)"
                )
            return None  # non-isolated through the origin as far as we can tell
        if not stab:
            raise MilnorInconclusive(
                f"jet oracle did not stabilise by jet {max_jet} for the cross-check"
            )
        if global_dim != dim:
            raise MilnorRoutesDisagree(
                f"global quotient dimension {global_dim} != local value {dim}; "
                "the origin is not the only critical point"
            )
        return dim
    if route == "formula":
        mu, _ = _formula_route(g.poly.truncate(max_jet), max_jet)
        return mu
    raise GermError(f"unknown Milnor route {route!r}")


# -- Kawakita weight catalogue ----------------------------------------------


@dataclass(frozen=True)
class BlowupSpec:
    """One admissible weighted-blowup germ datum over a cA_n point."""

    a: int
    r1: int
    r2: int
    n: int
    kind: str = "general"  # general | exceptional-n1 | exceptional-n2

    def __post_init__(self):
        if self.kind == "general":
            if gcd(self.a, self.r1) != 1:
                raise GermError("a and r1 must be coprime")
            if self.r1 + self.r2 != self.a * (self.n + 1):
                raise GermError("r1 + r2 must equal a(n+1)")

    @property
    def e3(self) -> Fraction:
        return (Fraction(1, self.r1) + Fraction(1, self.r2)) / self.a

    @property
    def weights(self) -> tuple:
        if self.kind == "exceptional-n1":
            return (1, 5, 3, 2)
        return (self.r1, self.r2, self.a, 1)

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "r1": self.r1,
            "r2": self.r2,
            "n": self.n,
            "kind": self.kind,
            "weights": list(self.weights),
            "e3": str(self.e3),
        }


def kawakita_weights(n: int, mu_budget: int) -> list:
    """All general-type blowup data (a, r1, r2) over a cA_n point passing
    the Milnor feasibility cut n(a(n+1)-1) <= mu_budget, plus the
    exceptional catalogue entries for n=1 and n=2 (data only)."""
    if n < 1:
        raise GermError("n must be >= 1")
    if mu_budget < n * n:
        raise GermError("budget below the minimum Milnor number n^2")
    out = []
    a = 1
    while n * (a * (n + 1) - 1) <= mu_budget:
        for r1 in range(1, a * (n + 1) // 2 + 1):
            r2 = a * (n + 1) - r1
            if r1 > r2:
                continue
            if gcd(a, r1) != 1:
                continue
            out.append(BlowupSpec(a, r1, r2, n))
        a += 1
    if n == 1:
        out.append(BlowupSpec(4, 1, 7, 1, kind="exceptional-n1"))
    if n == 2:
        out.append(BlowupSpec(3, 1, 8, 2, kind="exceptional-n2"))
    return out


# -- bound checker -----------------------------------------------------------


@dataclass
class BoundReport:
    total_mu: int
    defect: int
    limit: int
    passed: bool
    max_n: int
    max_m: int
    discrepancy_ceilings: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "total_mu": self.total_mu,
            "defect": self.defect,
            "limit": self.limit,
            "passed": self.passed,
            "max_n": self.max_n,
            "max_m": self.max_m,
            "discrepancy_ceilings": {str(k): v for k, v in sorted(self.discrepancy_ceilings.items())},
        }


def bound_check(classes: Sequence[tuple], defect: int = 0) -> BoundReport:
    """Check a configuration of classified germs against the Milnor-sum
    budget 60 + defect (60 factorial quartic, 75 with the non-factorial
    defect bound 15)."""
    total = 0
    for cls, mu in classes:
        if mu is None:
            raise GermError("infinite Milnor number in bound check input")
        total += mu
    limit = 60 + defect
    max_n = 0
    while (max_n + 1) ** 2 <= limit:
        max_n += 1
    max_m = 0
    m = 4
    while m * (m - 2) <= limit:
        max_m = m
        m += 1
    ceilings = {}
    for n in range(2, 8):
        best = 0
        a = 1
        while n * (a * (n + 1) - 1) <= limit:
            best = a
            a += 1
        ceilings[n] = best
    return BoundReport(
        total_mu=total,
        defect=defect,
        limit=limit,
        passed=total <= limit,
        max_n=max_n,
        max_m=max_m,
        discrepancy_ceilings=ceilings,
    )
