"""Ideal-theoretic dimension counts: Buchberger with hard caps for the
global staircase, and an exact jet-truncation oracle for the local one.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Sequence

from .poly import MonomialOrder, Poly, PolyError, leading_term


class CapExceeded(RuntimeError):
    """A configured resource cap was hit; the result is not a wrong number."""


# -- Buchberger ------------------------------------------------------------


def _divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: tuple, b: tuple) -> tuple:
    return tuple(max(x, y) for x, y in zip(a, b))


def normal_form(p: Poly, basis: list, key) -> Poly:
    """Remainder of p on division by the basis (leading-term reduction)."""
    r = Poly.zero(p.variables)
    work = p
    lts = [leading_term(g, key) for g in basis]
    while not work.is_zero():
        e, c = leading_term(work, key)
        reduced = False
        for g, (eg, cg) in zip(basis, lts):
            if _divides(eg, e):
                q = Poly.monomial(p.variables, tuple(x - y for x, y in zip(e, eg)), c / cg)
                work = work - q * g
                reduced = True
                break
        if not reduced:
            t = Poly.monomial(p.variables, e, c)
            r = r + t
            work = work - t
    return r


def groebner_basis(
    gens: Sequence[Poly],
    order: MonomialOrder | None = None,
    max_pairs: int = 5000,
    max_degree: int = 60,
) -> list:
    """Reduced Groebner basis via Buchberger with pair elimination.

    Raises CapExceeded when more than max_pairs S-pairs are processed or an
    S-pair lcm exceeds max_degree in total degree.
    """
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise PolyError("empty generator list")
    variables = gens[0].variables
    for g in gens:
        if g.variables != variables:
            raise PolyError("generators in different variable sets")
    order = order or MonomialOrder()
    key = order.key_function(variables)

    basis: list[Poly] = []
    for g in gens:
        r = normal_form(g, basis, key) if basis else g
        if not r.is_zero():
            _, c = leading_term(r, key)
            basis.append(r * (Fraction(1) / c))

    pairs = {(i, j) for i in range(len(basis)) for j in range(i)}
    processed = 0
    while pairs:
        # normal selection: smallest lcm degree first, deterministic tiebreak
        best = min(pairs, key=lambda ij: (sum(_lcm(leading_term(basis[ij[0]], key)[0],
                                                   leading_term(basis[ij[1]], key)[0])), ij))
        pairs.discard(best)
        i, j = best
        ei, _ = leading_term(basis[i], key)
        ej, _ = leading_term(basis[j], key)
        l = _lcm(ei, ej)
        if sum(l) > max_degree:
            raise CapExceeded(f"S-pair lcm degree {sum(l)} exceeds cap {max_degree}")
        # Buchberger's first criterion: coprime leading terms
        if all(a == 0 or b == 0 for a, b in zip(ei, ej)):
            continue
        # chain criterion
        skip = False
        for k in range(len(basis)):
            if k in (i, j):
                continue
            ek, _ = leading_term(basis[k], key)
            if _divides(ek, l) and (min(i, k), max(i, k)) not in pairs \
                    and (min(j, k), max(j, k)) not in pairs:
                skip = True
                break
        if skip:
            continue
        processed += 1
        if processed > max_pairs:
            raise CapExceeded(f"processed more than {max_pairs} S-pairs")
        fi, fj = basis[i], basis[j]
        ci = leading_term(fi, key)[1]
        cj = leading_term(fj, key)[1]
        s = Poly.monomial(variables, tuple(a - b for a, b in zip(l, ei)), Fraction(1) / ci) * fi \
            - Poly.monomial(variables, tuple(a - b for a, b in zip(l, ej)), Fraction(1) / cj) * fj
        r = normal_form(s, basis, key)
        if not r.is_zero():
            _, c = leading_term(r, key)
            r = r * (Fraction(1) / c)
            basis.append(r)
            new = len(basis) - 1
            for k in range(new):
                pairs.add((k, new))

    # interreduce
    reduced: list[Poly] = []
    for i, g in enumerate(basis):
        others = basis[:i] + basis[i + 1:]
        lts = [leading_term(h, key)[0] for h in others]
        eg = leading_term(g, key)[0]
        if any(_divides(e, eg) for e in lts):
            continue
        reduced.append(g)
    final = []
    for i, g in enumerate(reduced):
        others = reduced[:i] + reduced[i + 1:]
        r = normal_form(g, others, key) if others else g
        if not r.is_zero():
            _, c = leading_term(r, key)
            final.append(r * (Fraction(1) / c))
    final.sort(key=lambda p: key(leading_term(p, key)[0]))
    return final


def staircase_count(leading_exponents: Sequence[tuple], nvars: int,
                    max_box: int = 2_000_000) -> int | None:
    """Number of monomials outside the ideal of the given leading terms;
    None when infinite."""
    lead = list(leading_exponents)
    if any(sum(e) == 0 for e in lead):
        return 0
    bounds = []
    for i in range(nvars):
        pure = [e[i] for e in lead if all(x == 0 for j, x in enumerate(e) if j != i)]
        if not pure:
            return None
        bounds.append(min(pure))
    total = 1
    for b in bounds:
        total *= max(b, 1)
    if total > max_box:
        raise CapExceeded(f"staircase box of size {total} exceeds cap")
    count = 0
    idx = [0] * nvars

    def rec(i):
        nonlocal count
        if i == nvars:
            e = tuple(idx)
            if not any(_divides(l, e) for l in lead):
                count += 1
            return
        for v in range(bounds[i]):
            idx[i] = v
            rec(i + 1)
        idx[i] = 0

    rec(0)
    return count


def quotient_dimension(
    gens: Sequence[Poly],
    order: MonomialOrder | None = None,
    max_pairs: int = 5000,
    max_degree: int = 60,
) -> int | None:
    """dim_Q Q[vars]/(gens) as a vector space via a Groebner staircase;
    None when infinite-dimensional.  Raises CapExceeded on resource caps."""
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise PolyError("empty generator list")
    order = order or MonomialOrder()
    gb = groebner_basis(gens, order, max_pairs=max_pairs, max_degree=max_degree)
    key = order.key_function(gens[0].variables)
    lead = [leading_term(g, key)[0] for g in gb]
    return staircase_count(lead, len(gens[0].variables))


# -- jet-truncation oracle -------------------------------------------------


def _grlex_key(e: tuple):
    return (sum(e),) + e


class _JetSpace:
    """Row space of truncated monomial multiples of the generators inside
    the jet box {total degree <= k}, built by exact sparse elimination."""

    def __init__(self, gens: Sequence[Poly], k: int):
        import heapq

        self.k = k
        self.variables = gens[0].variables
        self.n = len(self.variables)
        self.pivots: dict[tuple, dict] = {}
        self._heap = []
        self._tick = 0
        for g in gens:
            row = {e: c for e, c in g.truncate(k).terms.items()}
            r = self._reduce(row)
            if r:
                self._insert(r)
        # lowest leading degree first keeps fill-in down
        while self._heap:
            _, _, row = heapq.heappop(self._heap)
            for i in range(self.n):
                shifted = {}
                for e, c in row.items():
                    if sum(e) + 1 <= k:
                        e2 = list(e)
                        e2[i] += 1
                        shifted[tuple(e2)] = c
                if not shifted:
                    continue
                r = self._reduce(shifted)
                if r:
                    self._insert(r)

    def _reduce(self, row: dict) -> dict:
        while row:
            lead = max(row, key=_grlex_key)
            piv = self.pivots.get(lead)
            if piv is None:
                return row
            c = row[lead]
            for e, pc in piv.items():
                s = row.get(e, Fraction(0)) - c * pc
                if s:
                    row[e] = s
                else:
                    row.pop(e, None)
        return row

    def _insert(self, row: dict):
        import heapq

        lead = max(row, key=_grlex_key)
        c = row[lead]
        if c != 1:
            row = {e: x / c for e, x in row.items()}
        self.pivots[lead] = row
        self._tick += 1
        heapq.heappush(self._heap, (sum(lead), self._tick, row))

    def reduces_to_zero(self, row: dict) -> bool:
        return not self._reduce(dict(row))

    def remainder(self, row: dict) -> dict:
        return self._reduce(dict(row))


def _monomials_of_degree(n: int, d: int):
    if n == 1:
        yield (d,)
        return
    for first in range(d + 1):
        for rest in _monomials_of_degree(n - 1, d - first):
            yield (first,) + rest


def jet_quotient_dimension(gens: Sequence[Poly], max_jet: int) -> tuple:
    """(dimension, stabilized) of the local algebra Q[[vars]]/(gens).

    Builds the linear span of truncated monomial multiples of the generators
    at jet order max_jet and looks for the smallest j with m^j contained in
    the ideal (every degree-j monomial reduces into strictly higher degrees,
    which certifies the dimension by Nakayama).  stabilized=False means the
    cap was inconclusive; the returned dimension is the jet-box value.
    """
    if max_jet < 2:
        raise PolyError("max_jet must be at least 2")
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise PolyError("empty generator list")
    variables = gens[0].variables
    for g in gens:
        if g.variables != variables:
            raise PolyError("generators in different variable sets")
    n = len(variables)
    if any(g.constant_term() != 0 for g in gens):
        return 0, True

    # iterative deepening: a certificate found at a small jet level is final,
    # so the expensive large-jet elimination only runs when needed
    levels = []
    k = min(max(4, min(g.order() for g in gens) + 2), max_jet)
    while k < max_jet:
        levels.append(k)
        k = min(max_jet, k + max(2, k // 2))
    levels.append(max_jet)

    last_dim = 0
    for k in levels:
        space = _JetSpace(gens, k)
        zero = (0,) * n
        if zero in space.pivots:
            return 0, True
        certified_j = None
        for j in range(1, k + 1):
            ok = True
            for e in _monomials_of_degree(n, j):
                rem = space.remainder({e: Fraction(1)})
                if rem and min(sum(x) for x in rem) <= j:
                    ok = False
                    break
            if ok:
                certified_j = j
                break
        standard = [
            e
            for d in range(k + 1)
            for e in _monomials_of_degree(n, d)
            if e not in space.pivots
        ]
        if certified_j is not None:
            dim = sum(1 for e in standard if sum(e) < certified_j)
            return dim, True
        last_dim = len(standard)
    return last_dim, False
