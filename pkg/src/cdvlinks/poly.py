"""Exact multivariate polynomial arithmetic over the rationals.

Coefficients are `fractions.Fraction`, exponent vectors are tuples of
non-negative ints keyed in a dict.  Every operation is exact; there are no
floats anywhere in this module.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence


class PolyError(ValueError):
    pass


class ParseError(PolyError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise PolyError(f"coefficient must be int or Fraction, got {type(c).__name__}")


class Poly:
    """A polynomial in a fixed ordered tuple of variables.

    Terms are stored as {exponent tuple: nonzero Fraction}; the zero
    polynomial has an empty term dict.  Instances are treated as immutable.
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple, object] | None = None):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise PolyError("duplicate variable names")
        clean: dict[tuple, Fraction] = {}
        if terms:
            n = len(self.variables)
            for exps, c in terms.items():
                e = tuple(int(x) for x in exps)
                if len(e) != n:
                    raise PolyError("exponent vector length mismatch")
                if any(x < 0 for x in e):
                    raise PolyError("negative exponent")
                c = _as_fraction(c)
                if c != 0:
                    prev = clean.get(e)
                    if prev is None:
                        clean[e] = c
                    else:
                        s = prev + c
                        if s:
                            clean[e] = s
                        else:
                            del clean[e]
        self.terms = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "Poly":
        return cls(variables, {})

    @classmethod
    def const(cls, variables: Sequence[str], c) -> "Poly":
        return cls(variables, {(0,) * len(variables): _as_fraction(c)})

    @classmethod
    def var(cls, variables: Sequence[str], name: str) -> "Poly":
        variables = tuple(variables)
        if name not in variables:
            raise PolyError(f"unknown variable {name!r}")
        e = [0] * len(variables)
        e[variables.index(name)] = 1
        return cls(variables, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, variables: Sequence[str], exps: Sequence[int], c=1) -> "Poly":
        return cls(variables, {tuple(exps): _as_fraction(c)})

    # -- basic structure ----------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Poly)
            and self.variables == other.variables
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    def __repr__(self):
        return f"Poly({poly_to_string(self)!r})"

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.variables), Fraction(0))

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def order(self) -> int:
        """Minimum total degree over terms; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return min(sum(e) for e in self.terms)

    def homogeneous_part(self, d: int) -> "Poly":
        return Poly(self.variables, {e: c for e, c in self.terms.items() if sum(e) == d})

    def truncate(self, max_degree: int) -> "Poly":
        return Poly(self.variables, {e: c for e, c in self.terms.items() if sum(e) <= max_degree})

    def support_variables(self) -> set:
        seen = set()
        for e in self.terms:
            for i, x in enumerate(e):
                if x:
                    seen.add(self.variables[i])
        return seen

    # -- ring operations ----------------------------------------------

    def _check_vars(self, other: "Poly"):
        if self.variables != other.variables:
            raise PolyError("variable sets differ")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.variables, other)
        self._check_vars(other)
        res = dict(self.terms)
        for e, c in other.terms.items():
            s = res.get(e, Fraction(0)) + c
            if s:
                res[e] = s
            else:
                res.pop(e, None)
        out = Poly.__new__(Poly)
        out.variables = self.variables
        out.terms = res
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Poly.__new__(Poly)
        out.variables = self.variables
        out.terms = {e: -c for e, c in self.terms.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.variables, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if c == 0:
                return Poly.zero(self.variables)
            out = Poly.__new__(Poly)
            out.variables = self.variables
            out.terms = {e: k * c for e, k in self.terms.items()}
            return out
        self._check_vars(other)
        return self.mul_truncated(other, None)

    __rmul__ = __mul__

    def mul_truncated(self, other: "Poly", max_degree: int | None) -> "Poly":
        """Product, discarding terms of total degree above max_degree."""
        self._check_vars(other)
        res: dict[tuple, Fraction] = {}
        small, big = (self.terms, other.terms)
        if len(small) > len(big):
            small, big = big, small
        for e1, c1 in small.items():
            d1 = sum(e1)
            for e2, c2 in big.items():
                if max_degree is not None and d1 + sum(e2) > max_degree:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                s = res.get(e, Fraction(0)) + c1 * c2
                if s:
                    res[e] = s
                else:
                    del res[e]
        out = Poly.__new__(Poly)
        out.variables = self.variables
        out.terms = res
        return out

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise PolyError("exponent must be a natural number")
        return self.pow_truncated(k, None)

    def pow_truncated(self, k: int, max_degree: int | None) -> "Poly":
        result = Poly.const(self.variables, 1)
        base = self if max_degree is None else self.truncate(max_degree)
        while k:
            if k & 1:
                result = result.mul_truncated(base, max_degree)
            k >>= 1
            if k:
                base = base.mul_truncated(base, max_degree)
        return result

    def derivative(self, name: str) -> "Poly":
        i = self.variables.index(name)
        res = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                res[tuple(e2)] = c * e[i]
        return Poly(self.variables, res)

    def evaluate(self, values: Mapping[str, object]) -> Fraction:
        vals = [_as_fraction(values[v]) for v in self.variables]
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for x, k in zip(vals, e):
                if k:
                    t *= x ** k
            total += t
        return total

    def substitute(self, images: Mapping[str, "Poly"], max_degree: int | None = None) -> "Poly":
        """Substitute polynomials for variables, optionally truncating by
        total degree.  Variables absent from `images` map to themselves.
        Result variables are those of the image polynomials."""
        if images:
            target = next(iter(images.values())).variables
        else:
            target = self.variables
        full = {}
        for v in self.variables:
            if v in images:
                img = images[v]
                if img.variables != target:
                    raise PolyError("substitution images use differing variable sets")
                full[v] = img
            else:
                full[v] = Poly.var(target, v)
        # memoised powers of each image
        powers: dict[str, list[Poly]] = {v: [Poly.const(target, 1)] for v in self.variables}

        def power(v: str, k: int) -> Poly:
            plist = powers[v]
            while len(plist) <= k:
                plist.append(plist[-1].mul_truncated(full[v], max_degree))
            return plist[k]

        acc = Poly.zero(target)
        for e, c in self.terms.items():
            t = Poly.const(target, c)
            for v, k in zip(self.variables, e):
                if k:
                    t = t.mul_truncated(power(v, k), max_degree)
                    if t.is_zero():
                        break
            acc = acc + t
        return acc

    def substitute_one(self, name: str, image: "Poly", max_degree: int | None = None) -> "Poly":
        """Substitute a single variable, leaving terms free of it untouched.
        Much faster than `substitute` when only one coordinate changes."""
        if image.variables != self.variables:
            raise PolyError("image variable set mismatch")
        i = self.variables.index(name)
        by_power: dict[int, dict] = {}
        for e, c in self.terms.items():
            k = e[i]
            e2 = list(e)
            e2[i] = 0
            by_power.setdefault(k, {})[tuple(e2)] = c
        acc = Poly.__new__(Poly)
        acc.variables = self.variables
        acc.terms = dict(by_power.get(0, {}))
        if len(by_power) == 1 and 0 in by_power:
            return acc
        img = image if max_degree is None else image.truncate(max_degree)
        power = Poly.const(self.variables, 1)
        kmax = max(by_power)
        for k in range(1, kmax + 1):
            power = power.mul_truncated(img, max_degree)
            if k in by_power:
                part = Poly.__new__(Poly)
                part.variables = self.variables
                part.terms = by_power[k]
                acc = acc + part.mul_truncated(power, max_degree)
        return acc

    def with_variables(self, variables: Sequence[str]) -> "Poly":
        """Re-express over a different ordered variable tuple (superset or
        reordering; dropped variables must not occur)."""
        variables = tuple(variables)
        idx = []
        for v in self.variables:
            idx.append(variables.index(v) if v in variables else None)
        res = {}
        for e, c in self.terms.items():
            new = [0] * len(variables)
            for pos, k in zip(idx, e):
                if k:
                    if pos is None:
                        raise PolyError("cannot drop a variable that occurs")
                    new[pos] = k
            res[tuple(new)] = res.get(tuple(new), Fraction(0)) + c
        return Poly(variables, res)

    def coefficient_in(self, name: str, k: int) -> "Poly":
        """Coefficient of name**k, as a polynomial free of `name` (same vars)."""
        i = self.variables.index(name)
        res = {}
        for e, c in self.terms.items():
            if e[i] == k:
                e2 = list(e)
                e2[i] = 0
                res[tuple(e2)] = c
        return Poly(self.variables, res)

    def max_exponent(self, name: str) -> int:
        i = self.variables.index(name)
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def min_exponent(self, name: str) -> int:
        i = self.variables.index(name)
        if not self.terms:
            return -1
        return min(e[i] for e in self.terms)

    def monomial_content(self) -> tuple:
        """Componentwise min of exponent vectors (the largest monomial factor)."""
        if not self.terms:
            return (0,) * len(self.variables)
        its = iter(self.terms)
        acc = list(next(its))
        for e in its:
            for i, x in enumerate(e):
                if x < acc[i]:
                    acc[i] = x
        return tuple(acc)

    def divide_monomial(self, exps: Sequence[int]) -> "Poly":
        exps = tuple(exps)
        res = {}
        for e, c in self.terms.items():
            if any(a < b for a, b in zip(e, exps)):
                raise PolyError("monomial does not divide every term")
            res[tuple(a - b for a, b in zip(e, exps))] = c
        return Poly(self.variables, res)

    def linear_part(self) -> "Poly":
        return self.homogeneous_part(1)


# -- monomial orders ------------------------------------------------------


class MonomialOrder:
    """Graded-lex or lex order, with an optional variable permutation.

    `key(exps)` returns a sort key; larger key = larger monomial.  The order
    is total, multiplicative, with 1 minimal.
    """

    def __init__(self, kind: str = "grlex", permutation: Sequence[str] | None = None):
        if kind not in ("grlex", "lex"):
            raise PolyError(f"unknown order kind {kind!r}")
        self.kind = kind
        self.permutation = tuple(permutation) if permutation is not None else None

    def key_function(self, variables: Sequence[str]):
        variables = tuple(variables)
        if self.permutation is None:
            perm = tuple(range(len(variables)))
        else:
            if set(self.permutation) != set(variables):
                raise PolyError("permutation does not match variable set")
            perm = tuple(variables.index(v) for v in self.permutation)
        if self.kind == "grlex":
            def key(e):
                return (sum(e),) + tuple(e[i] for i in perm)
        else:
            def key(e):
                return tuple(e[i] for i in perm)
        return key


def leading_term(p: Poly, key=None) -> tuple:
    """(exponents, coeff) of the leading term under grlex (or a given key)."""
    if p.is_zero():
        raise PolyError("zero polynomial has no leading term")
    if key is None:
        key = MonomialOrder().key_function(p.variables)
    e = max(p.terms, key=key)
    return e, p.terms[e]


# -- weight systems -------------------------------------------------------


class WeightSystem:
    """One positive rational weight per variable plus a target degree."""

    def __init__(self, weights: Sequence[object], degree=Fraction(1)):
        self.weights = tuple(_as_fraction(w) for w in weights)
        self.degree = _as_fraction(degree)
        if any(w <= 0 or w > 1 for w in self.weights):
            raise PolyError("weights must lie in (0, 1]")
        if self.degree <= 0:
            raise PolyError("degree must be positive")

    def term_degree(self, exps: Sequence[int]) -> Fraction:
        return sum((w * k for w, k in zip(self.weights, exps)), Fraction(0))

    def __repr__(self):
        return f"WeightSystem({[str(w) for w in self.weights]}, degree={self.degree})"


def weighted_order(p: Poly, w: WeightSystem) -> tuple:
    """Minimum weighted degree of p and the sum of terms achieving it."""
    if p.is_zero():
        raise PolyError("weighted order of the zero polynomial")
    if len(w.weights) != len(p.variables):
        raise PolyError("weight count does not match variable count")
    best = None
    for e in p.terms:
        d = w.term_degree(e)
        if best is None or d < best:
            best = d
    initial = Poly(p.variables, {e: c for e, c in p.terms.items() if w.term_degree(e) == best})
    return best, initial


# -- substitutions --------------------------------------------------------


class Substitution:
    """A coordinate change: one image polynomial per variable, plus an
    optional unit with nonzero constant term.  The linear parts of the
    images must form an invertible matrix.
    """

    def __init__(self, images: Mapping[str, Poly], unit: Poly | None = None, check: bool = True):
        if not images:
            raise PolyError("empty substitution")
        some = next(iter(images.values()))
        self.variables = some.variables
        self.images = dict(images)
        for v in self.variables:
            if v not in self.images:
                self.images[v] = Poly.var(self.variables, v)
        for v, img in self.images.items():
            if img.variables != self.variables:
                raise PolyError("inconsistent variable sets in substitution")
        self.unit = unit
        if unit is not None:
            if unit.variables != self.variables:
                raise PolyError("unit variable set mismatch")
            if unit.constant_term() == 0:
                raise PolyError("unit must have nonzero constant term")
        if check and not self._linear_invertible():
            raise PolyError("linear parts of substitution images are not invertible")

    def _matrix(self):
        n = len(self.variables)
        rows = []
        for v in self.variables:
            img = self.images[v]
            row = []
            for u in self.variables:
                e = [0] * n
                e[self.variables.index(u)] = 1
                row.append(img.coefficient(e))
            rows.append(row)
        return rows

    def _linear_invertible(self) -> bool:
        m = [row[:] for row in self._matrix()]
        n = len(m)
        for col in range(n):
            piv = None
            for r in range(col, n):
                if m[r][col] != 0:
                    piv = r
                    break
            if piv is None:
                return False
            m[col], m[piv] = m[piv], m[col]
            inv = Fraction(1) / m[col][col]
            for r in range(col + 1, n):
                f = m[r][col] * inv
                if f:
                    m[r] = [a - f * b for a, b in zip(m[r], m[col])]
        return True

    @classmethod
    def identity(cls, variables: Sequence[str]) -> "Substitution":
        variables = tuple(variables)
        return cls({v: Poly.var(variables, v) for v in variables}, check=False)

    def compose_one(self, name: str, image: Poly, max_degree: int | None = None) -> "Substitution":
        """Compose with a single-variable change applied after this one."""
        images = {
            v: self.images[v].substitute_one(name, image, max_degree)
            for v in self.variables
        }
        unit = self.unit.substitute_one(name, image, max_degree) if self.unit is not None else None
        return Substitution(images, unit, check=False)

    def compose(self, inner: "Substitution", max_degree: int | None = None) -> "Substitution":
        """Substitution equivalent to applying `self` first, then `inner`
        to the result: x -> self(x) -> self(x) with inner plugged in."""
        images = {
            v: self.images[v].substitute(inner.images, max_degree)
            for v in self.variables
        }
        unit = None
        if self.unit is not None or inner.unit is not None:
            u1 = self.unit.substitute(inner.images, max_degree) if self.unit is not None else Poly.const(self.variables, 1)
            u2 = inner.unit if inner.unit is not None else Poly.const(self.variables, 1)
            unit = u1.mul_truncated(u2, max_degree)
        return Substitution(images, unit, check=False)


def apply_substitution(p: Poly, s: Substitution, truncate_at: int | None = None) -> Poly:
    """u * p(phi_1, ..., phi_n), truncated at the given total degree."""
    if truncate_at is not None and truncate_at < 1:
        raise PolyError("truncate_at must be at least 1")
    out = p.substitute(s.images, truncate_at)
    if s.unit is not None:
        out = out.mul_truncated(s.unit, truncate_at)
    return out


# -- parsing and printing --------------------------------------------------

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
_IDENT_CONT = _IDENT_START | set("0123456789_")


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.toks: list[tuple[str, str, int]] = []
        self._scan()
        self.i = 0

    def _scan(self):
        text, n = self.text, len(self.text)
        i = 0
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch in "+-*^()/":
                self.toks.append((ch, ch, i))
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                self.toks.append(("int", text[i:j], i))
                i = j
                continue
            if ch in _IDENT_START:
                j = i
                while j < n and text[j] in _IDENT_CONT:
                    j += 1
                self.toks.append(("ident", text[i:j], i))
                i = j
                continue
            raise ParseError(f"unexpected character {ch!r}", i)
        self.toks.append(("end", "", n))

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        if t[0] != "end":
            self.i += 1
        return t


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.toks = _Tokens(text)
        self.variables = tuple(variables)

    def parse(self) -> Poly:
        p = self.expr()
        kind, _, pos = self.toks.peek()
        if kind != "end":
            raise ParseError("trailing input", pos)
        return p

    def expr(self) -> Poly:
        kind, _, _ = self.toks.peek()
        negate = False
        if kind in ("+", "-"):
            self.toks.next()
            negate = kind == "-"
        acc = self.term()
        if negate:
            acc = -acc
        while True:
            kind, _, _ = self.toks.peek()
            if kind == "+":
                self.toks.next()
                acc = acc + self.term()
            elif kind == "-":
                self.toks.next()
                acc = acc - self.term()
            else:
                return acc

    def term(self) -> Poly:
        acc = self.factor()
        while True:
            kind, _, pos = self.toks.peek()
            if kind == "*":
                self.toks.next()
                acc = acc * self.factor()
            elif kind in ("ident", "int", "("):
                raise ParseError("implicit multiplication is not allowed", pos)
            else:
                return acc

    def factor(self) -> Poly:
        kind, _, _ = self.toks.peek()
        if kind == "-":
            self.toks.next()
            return -self.factor()
        base = self.primary()
        kind, _, _ = self.toks.peek()
        if kind == "^":
            self.toks.next()
            k2, val, pos = self.toks.next()
            if k2 == "-":
                raise ParseError("exponent is not a natural number", pos)
            if k2 != "int":
                raise ParseError("exponent must be a natural literal", pos)
            return base ** int(val)
        return base

    def primary(self) -> Poly:
        kind, val, pos = self.toks.next()
        if kind == "int":
            num = int(val)
            k2, _, _ = self.toks.peek()
            if k2 == "/":
                self.toks.next()
                k3, v3, p3 = self.toks.next()
                if k3 != "int":
                    raise ParseError("expected integer denominator", p3)
                den = int(v3)
                if den == 0:
                    raise ParseError("zero denominator", p3)
                return Poly.const(self.variables, Fraction(num, den))
            return Poly.const(self.variables, num)
        if kind == "ident":
            if val not in self.variables:
                raise ParseError(f"unknown identifier {val!r}", pos)
            return Poly.var(self.variables, val)
        if kind == "(":
            p = self.expr()
            k2, _, p2 = self.toks.next()
            if k2 != ")":
                raise ParseError("expected ')'", p2)
            return p
        raise ParseError(f"unexpected token {val!r}" if val else "unexpected end of input", pos)


def parse_poly(text: str, variables: Sequence[str]) -> Poly:
    """Parse a polynomial expression.  Grammar: identifiers, integer or p/q
    rational literals, + - * ^, parentheses; ^ takes a natural literal and
    implicit multiplication is rejected."""
    return _Parser(text, variables).parse()


def poly_to_string(p: Poly) -> str:
    """Print with terms in descending graded-lex order and explicit '*'."""
    if p.is_zero():
        return "0"
    key = MonomialOrder().key_function(p.variables)
    parts = []
    for e in sorted(p.terms, key=key, reverse=True):
        c = p.terms[e]
        factors = []
        for v, k in zip(p.variables, e):
            if k == 1:
                factors.append(v)
            elif k > 1:
                factors.append(f"{v}^{k}")
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = str(mag) + "*" + "*".join(factors)
        if not parts:
            parts.append(body if c > 0 else "-" + body)
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts)


# -- gcd machinery ---------------------------------------------------------


def exact_divide(f: Poly, d: Poly) -> Poly:
    """Exact quotient f/d; raises PolyError if d does not divide f."""
    if d.is_zero():
        raise PolyError("division by zero polynomial")
    key = MonomialOrder().key_function(f.variables)
    q = Poly.zero(f.variables)
    r = f
    ed, cd = leading_term(d, key) if not d.is_zero() else (None, None)
    while not r.is_zero():
        er, cr = leading_term(r, key)
        diff = tuple(a - b for a, b in zip(er, ed))
        if any(x < 0 for x in diff):
            raise PolyError("not divisible")
        t = Poly.monomial(f.variables, diff, cr / cd)
        q = q + t
        r = r - t * d
    return q


def _poly_gcd_univar(f: Poly, g: Poly, name: str) -> Poly:
    """gcd where f, g involve (at most) the single variable `name`.

    Primitive integer pseudo-remainder sequence: coefficients are kept as
    coprime integers between steps, which bounds the swell.
    """
    from math import gcd as igcd

    i = f.variables.index(name)

    def norm(c):
        c = list(c)
        while c and c[-1] == 0:
            c.pop()
        return c

    def primitive(c):
        c = norm(c)
        if not c:
            return []
        den = 1
        for x in c:
            den = den * x.denominator // igcd(den, x.denominator)
        ints = [int(x * den) for x in c]
        content = 0
        for x in ints:
            content = igcd(content, abs(x))
        return [x // content for x in ints]

    def coeffs(p):
        cs = [Fraction(0)] * (p.max_exponent(name) + 1)
        for e, c in p.terms.items():
            cs[e[i]] += c
        return primitive(cs)

    def pseudo_rem(x, y):
        dy = len(y) - 1
        lead = y[-1]
        x = [Fraction(v) for v in x]
        while x and len(x) - 1 >= dy:
            shift = len(x) - 1 - dy
            c = Fraction(x[-1], lead)
            for j in range(dy + 1):
                x[shift + j] -= c * y[j]
            x = norm(x)
        return primitive(x)

    a, b = coeffs(f), coeffs(g)
    while b:
        a, b = b, pseudo_rem(a, b)
    if not a:
        return Poly.zero(f.variables)
    lead = Fraction(a[-1])
    res = {}
    for k, c in enumerate(a):
        if c:
            e = [0] * len(f.variables)
            e[i] = k
            res[tuple(e)] = Fraction(c) / lead
    return Poly(f.variables, res)


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Monic gcd over Q[vars] via primitive pseudo-remainder sequences."""
    if f.variables != g.variables:
        raise PolyError("variable sets differ")
    if f.is_zero():
        return _monic(g)
    if g.is_zero():
        return _monic(f)
    used = sorted(
        f.support_variables() | g.support_variables(),
        key=lambda v: f.variables.index(v),
    )
    if not used:
        return Poly.const(f.variables, 1)
    if len(used) == 1:
        return _poly_gcd_univar(f, g, used[0])
    main = used[-1]
    return _monic(_gcd_multivar(f, g, main))


def _monic(p: Poly) -> Poly:
    if p.is_zero():
        return p
    _, c = leading_term(p)
    return p * (Fraction(1) / c)


def _as_univar(p: Poly, name: str) -> dict:
    i = p.variables.index(name)
    out: dict[int, Poly] = {}
    for e, c in p.terms.items():
        k = e[i]
        e2 = list(e)
        e2[i] = 0
        q = out.get(k)
        t = Poly(p.variables, {tuple(e2): c})
        out[k] = t if q is None else q + t
    return out


def _from_univar(coeffs: dict, name: str, variables) -> Poly:
    acc = Poly.zero(variables)
    x = Poly.var(variables, name)
    for k, c in coeffs.items():
        acc = acc + c * x ** k
    return acc


def _content(p: Poly, name: str) -> Poly:
    cs = list(_as_univar(p, name).values())
    acc = cs[0]
    for c in cs[1:]:
        acc = poly_gcd(acc, c)
        if acc.total_degree() == 0:
            return Poly.const(p.variables, 1)
    return _monic(acc)


def _rational_normalise(p: Poly) -> Poly:
    """Scale so coefficients are coprime integers with positive leading one."""
    if p.is_zero():
        return p
    from math import gcd as igcd

    num = 0
    den = 1
    for c in p.terms.values():
        num = igcd(num, abs(c.numerator))
        den = den * c.denominator // igcd(den, c.denominator)
    scale = Fraction(den, num)
    _, lead = leading_term(p)
    if lead < 0:
        scale = -scale
    return p * scale


def _gcd_multivar(f: Poly, g: Poly, main: str) -> Poly:
    """Subresultant pseudo-remainder sequence over the coefficient ring
    Q[other vars]; coefficient growth stays polynomially bounded without
    per-step content gcds."""
    cf, cg = _content(f, main), _content(g, main)
    pf, pg = exact_divide(f, cf), exact_divide(g, cg)
    ccontent = poly_gcd(cf, cg)

    def udeg(p):
        return p.max_exponent(main)

    def lead(p):
        return _as_univar(p, main)[udeg(p)]

    a, b = (pf, pg) if udeg(pf) >= udeg(pg) else (pg, pf)
    one = Poly.const(f.variables, 1)
    gfac, hfac = one, one
    while True:
        if b.is_zero():
            result = a
            break
        if udeg(b) == 0:
            # main-variable-free remainder: primitive parts are coprime
            return ccontent
        delta = udeg(a) - udeg(b)
        r = _pseudo_rem(a, b, main, delta)
        if r.is_zero():
            result = b
            break
        divisor = gfac * hfac.pow_truncated(delta, None)
        r = exact_divide(r, divisor)
        a, b = b, _rational_normalise(r)
        gfac = lead(a)
        if delta >= 1:
            hfac = exact_divide(gfac.pow_truncated(delta, None), hfac.pow_truncated(delta - 1, None))
        # delta == 0 keeps hfac
    prim = exact_divide(result, _content(result, main))
    return ccontent * _rational_normalise(prim)


def _pseudo_rem(f: Poly, g: Poly, name: str, delta: int | None = None) -> Poly:
    """prem(f, g) = lc(g)^(delta+1) * f  mod g  in the main variable."""
    df, dg = f.max_exponent(name), g.max_exponent(name)
    if df < dg:
        return f
    if delta is None:
        delta = df - dg
    lead_g = _as_univar(g, name)[dg]
    x = Poly.var(f.variables, name)
    r = f
    steps = 0
    while not r.is_zero() and r.max_exponent(name) >= dg:
        dr = r.max_exponent(name)
        lead_r = _as_univar(r, name)[dr]
        r = lead_g * r - lead_r * x ** (dr - dg) * g
        steps += 1
    # pad so the total factor is lc(g)^(delta+1) as the subresultant PRS expects
    for _ in range(delta + 1 - steps):
        r = lead_g * r
    return r


def squarefree_gcd_check(p: Poly) -> Poly:
    """gcd of p with all its partial derivatives (constant iff squarefree)."""
    acc = p
    for v in sorted(p.support_variables(), key=lambda v: p.variables.index(v)):
        acc = poly_gcd(acc, p.derivative(v))
        if acc.total_degree() == 0:
            break
    return _monic(acc)
