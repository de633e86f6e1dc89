"""Exact sparse polynomial and rational-function arithmetic.

Every symbolic object in this package lives in one fixed ring: polynomials
with rational coefficients in the ten variables

    l1, l2, l3, l4    system parameters
    x1, x2            base coordinates
    y1, y2            double-cover coordinates
    s1, s2            fiber (integration) coordinates

A :class:`Polynomial` maps exponent tuples (one entry per variable) to
nonzero ``Fraction`` coefficients; the zero polynomial has no terms.  A
:class:`RationalFunction` is a reduced fraction of polynomials whose
denominator has integer coefficients of content 1 and a positive leading
coefficient in graded-lex order.  Under that normalization equal values are
structurally equal, which is what the verification layer relies on.

GCDs use a primitive-part Euclidean algorithm recursing on the
highest-indexed variable present.  Everything built here has low degree per
variable, so no modular or interpolation machinery is needed.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd as _int_gcd
from typing import Iterable, Iterator, Mapping, Sequence, Union

VARIABLES: tuple[str, ...] = (
    "l1", "l2", "l3", "l4", "x1", "x2", "y1", "y2", "s1", "s2",
)
NVARS = len(VARIABLES)
VAR_INDEX: dict[str, int] = {name: i for i, name in enumerate(VARIABLES)}
#: indices of the parameters flipped by :func:`negate_lambda`
LAMBDA_INDICES: tuple[int, ...] = (0, 1, 2, 3)

_ZERO_EXP = (0,) * NVARS

Scalar = Union[int, Fraction]


class AlgebraError(ArithmeticError):
    """Base class for exact-arithmetic failures."""


class ExactDivisionError(AlgebraError):
    """Raised when an exact polynomial division leaves a remainder."""


class SubstitutionError(AlgebraError):
    """Raised when a substitution makes a denominator identically zero."""


def _grlex(exp: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    return (sum(exp), exp)


def var_index(v: Union[str, int]) -> int:
    if isinstance(v, int):
        if not 0 <= v < NVARS:
            raise KeyError(f"variable index {v} out of range")
        return v
    return VAR_INDEX[v]


class Polynomial:
    """Sparse multivariate polynomial over the rationals.

    ``terms`` maps exponent tuples of length :data:`NVARS` to nonzero
    Fraction coefficients.  Instances are immutable by convention: no method
    mutates ``terms`` after construction.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, ...], Fraction]):
        self.terms = dict(terms)
        self._hash: int | None = None

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "Polynomial":
        return _P_ZERO

    @staticmethod
    def one() -> "Polynomial":
        return _P_ONE

    @staticmethod
    def constant(c: Scalar) -> "Polynomial":
        c = Fraction(c)
        return Polynomial({} if c == 0 else {_ZERO_EXP: c})

    @staticmethod
    def variable(v: Union[str, int]) -> "Polynomial":
        i = var_index(v)
        exp = [0] * NVARS
        exp[i] = 1
        return Polynomial({tuple(exp): Fraction(1)})

    @staticmethod
    def from_terms(items: Iterable[tuple[tuple[int, ...], Scalar]]) -> "Polynomial":
        terms: dict[tuple[int, ...], Fraction] = {}
        for exp, c in items:
            c = Fraction(c)
            if len(exp) != NVARS:
                raise ValueError("exponent vector has wrong length")
            if any(e < 0 for e in exp):
                raise ValueError("negative exponent")
            acc = terms.get(exp, Fraction(0)) + c
            if acc:
                terms[exp] = acc
            else:
                terms.pop(exp, None)
        return Polynomial(terms)

    # -- predicates and structure -------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(e == _ZERO_EXP for e in self.terms)

    def is_one(self) -> bool:
        return self.terms == {_ZERO_EXP: Fraction(1)}

    def constant_value(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms[_ZERO_EXP]

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, v: Union[str, int]) -> int:
        i = var_index(v)
        return max((e[i] for e in self.terms), default=0)

    def vars_present(self) -> set[int]:
        out: set[int] = set()
        for exp in self.terms:
            for i, e in enumerate(exp):
                if e:
                    out.add(i)
        return out

    def min_exponents(self) -> tuple[int, ...]:
        """Per-variable minimum exponent (the monomial content)."""
        if not self.terms:
            return _ZERO_EXP
        it = iter(self.terms)
        acc = list(next(it))
        for exp in it:
            for i, e in enumerate(exp):
                if e < acc[i]:
                    acc[i] = e
        return tuple(acc)

    def leading(self) -> tuple[tuple[int, ...], Fraction]:
        """Leading (exponent, coefficient) under graded-lex order."""
        exp = max(self.terms, key=_grlex)
        return exp, self.terms[exp]

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Terms in graded-lex order, leading term first."""
        return sorted(self.terms.items(), key=lambda t: _grlex(t[0]), reverse=True)

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for exp, c in other.terms.items():
            acc = out.get(exp)
            if acc is None:
                out[exp] = c
            else:
                acc = acc + c
                if acc:
                    out[exp] = acc
                else:
                    del out[exp]
        return Polynomial(out)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for exp, c in other.terms.items():
            acc = out.get(exp)
            if acc is None:
                out[exp] = -c
            else:
                acc = acc - c
                if acc:
                    out[exp] = acc
                else:
                    del out[exp]
        return Polynomial(out)

    def __rsub__(self, other):
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __neg__(self):
        return Polynomial({e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(other))
        if not isinstance(other, Polynomial):
            return NotImplemented
        if not self.terms or not other.terms:
            return _P_ZERO
        out: dict[tuple[int, ...], Fraction] = {}
        get = out.get
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                acc = get(exp)
                if acc is None:
                    out[exp] = c1 * c2
                else:
                    acc = acc + c1 * c2
                    if acc:
                        out[exp] = acc
                    else:
                        del out[exp]
        return Polynomial(out)

    __rmul__ = __mul__

    def scale(self, c: Fraction) -> "Polynomial":
        if c == 0:
            return _P_ZERO
        return Polynomial({e: k * c for e, k in self.terms.items()})

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power of a polynomial; use RationalFunction")
        result = _P_ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __truediv__(self, other):
        return RationalFunction(self, other)

    def __rtruediv__(self, other):
        return RationalFunction(_coerce_poly(other), self)

    def __eq__(self, other):
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- calculus and mappings ----------------------------------------

    def partial(self, v: Union[str, int]) -> "Polynomial":
        i = var_index(v)
        out: dict[tuple[int, ...], Fraction] = {}
        for exp, c in self.terms.items():
            e = exp[i]
            if e:
                nexp = exp[:i] + (e - 1,) + exp[i + 1:]
                out[nexp] = out.get(nexp, Fraction(0)) + c * e
        return Polynomial({e: c for e, c in out.items() if c})

    def negate_lambda(self) -> "Polynomial":
        out = {}
        for exp, c in self.terms.items():
            if (exp[0] + exp[1] + exp[2] + exp[3]) & 1:
                out[exp] = -c
            else:
                out[exp] = c
        return Polynomial(out)

    def substitute(self, bindings: Mapping[str, "RationalFunction"]) -> "RationalFunction":
        """Substitute rational functions for variables; others stay fixed."""
        binds: dict[int, RationalFunction] = {}
        for name, val in bindings.items():
            binds[var_index(name)] = _coerce_rf(val)
        pow_cache: dict[tuple[int, int], RationalFunction] = {}

        def vpow(i: int, e: int) -> RationalFunction:
            key = (i, e)
            hit = pow_cache.get(key)
            if hit is None:
                hit = binds[i] ** e
                pow_cache[key] = hit
            return hit

        total = RationalFunction.zero()
        for exp, c in self.terms.items():
            residual = [0] * NVARS
            factor: RationalFunction | None = None
            for i, e in enumerate(exp):
                if not e:
                    continue
                if i in binds:
                    p = vpow(i, e)
                    factor = p if factor is None else factor * p
                else:
                    residual[i] = e
            mono = Polynomial({tuple(residual): c})
            term = RationalFunction(mono) if factor is None else factor * mono
            total = total + term
        return total

    def evaluate(self, values: Sequence):
        """Evaluate at a point; values may be Fractions, floats or complex."""
        total = None
        for exp, c in self.terms.items():
            term = c
            for i, e in enumerate(exp):
                if e == 1:
                    term = term * values[i]
                elif e:
                    term = term * values[i] ** e
            total = term if total is None else total + term
        return 0 if total is None else total

    # -- content and division -----------------------------------------

    def content(self) -> Fraction:
        """Positive rational c with self/c of integer coefficients, content 1."""
        num = 0
        den = 1
        for c in self.terms.values():
            num = _int_gcd(num, c.numerator)
            den = den * c.denominator // _int_gcd(den, c.denominator)
        if num == 0:
            return Fraction(1)
        return Fraction(num, den)

    def primitive_positive(self) -> tuple[Fraction, "Polynomial"]:
        """Split as c * p with p of integer content 1 and positive leading coefficient."""
        if self.is_zero():
            return Fraction(1), self
        c = self.content()
        _, lead = self.leading()
        if lead < 0:
            c = -c
        if c == 1:
            return c, self
        inv = 1 / c
        return c, Polynomial({e: k * inv for e, k in self.terms.items()})

    def shift_down(self, delta: tuple[int, ...]) -> "Polynomial":
        if delta == _ZERO_EXP:
            return self
        return Polynomial(
            {tuple(a - b for a, b in zip(e, delta)): c for e, c in self.terms.items()}
        )

    def shift_up(self, delta: tuple[int, ...]) -> "Polynomial":
        if delta == _ZERO_EXP:
            return self
        return Polynomial(
            {tuple(a + b for a, b in zip(e, delta)): c for e, c in self.terms.items()}
        )

    def divide_exact(self, d: "Polynomial") -> "Polynomial":
        """Quotient self/d when d divides exactly; raises otherwise."""
        if d.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if d.is_one():
            return self
        if self.is_zero():
            return self
        dexp, dc = d.leading()
        rem = dict(self.terms)
        out: dict[tuple[int, ...], Fraction] = {}
        dterms = d.terms
        while rem:
            rexp = max(rem, key=_grlex)
            diff = tuple(a - b for a, b in zip(rexp, dexp))
            if any(e < 0 for e in diff):
                raise ExactDivisionError("not an exact division")
            q = rem[rexp] / dc
            out[diff] = q
            for e2, c2 in dterms.items():
                k = tuple(a + b for a, b in zip(diff, e2))
                acc = rem.get(k, Fraction(0)) - q * c2
                if acc:
                    rem[k] = acc
                else:
                    rem.pop(k, None)
        return Polynomial(out)

    # -- serialization and display ------------------------------------

    def to_json(self) -> list:
        return [
            [str(c.numerator), str(c.denominator), list(exp)]
            for exp, c in self.sorted_terms()
        ]

    @staticmethod
    def from_json(data: Iterable) -> "Polynomial":
        items = []
        for entry in data:
            num, den, exp = entry
            items.append((tuple(int(e) for e in exp), Fraction(int(num), int(den))))
        return Polynomial.from_terms(items)

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        pieces = []
        for exp, c in self.sorted_terms():
            mono = "*".join(
                VARIABLES[i] if e == 1 else f"{VARIABLES[i]}^{e}"
                for i, e in enumerate(exp)
                if e
            )
            if not mono:
                body = str(c)
            elif c == 1:
                body = mono
            elif c == -1:
                body = f"-{mono}"
            else:
                body = f"{c}*{mono}"
            if pieces and not body.startswith("-"):
                pieces.append("+" + body)
            else:
                pieces.append(body)
        return "".join(pieces)

    def __repr__(self) -> str:
        return f"Polynomial({self})"

    def latex(self) -> str:
        if self.is_zero():
            return "0"
        pieces = []
        for exp, c in self.sorted_terms():
            mono = "".join(
                _latex_var(i) if e == 1 else f"{_latex_var(i)}^{{{e}}}"
                for i, e in enumerate(exp)
                if e
            )
            if not mono:
                body = _latex_frac(c)
            elif c == 1:
                body = mono
            elif c == -1:
                body = f"-{mono}"
            else:
                body = f"{_latex_frac(c)}{mono}"
            if pieces and not body.startswith("-"):
                pieces.append("+" + body)
            else:
                pieces.append(body)
        return "".join(pieces)


_P_ZERO = Polynomial({})
_P_ONE = Polynomial({_ZERO_EXP: Fraction(1)})


def _latex_var(i: int) -> str:
    name = VARIABLES[i]
    head, sub = name[0], name[1:]
    return (r"\lambda_" + sub) if head == "l" else f"{head}_{sub}"


def _latex_frac(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    sign = "-" if c < 0 else ""
    return sign + r"\tfrac{%d}{%d}" % (abs(c.numerator), c.denominator)


def _coerce_poly(value):
    if isinstance(value, Polynomial):
        return value
    if isinstance(value, (int, Fraction)):
        return Polynomial.constant(value)
    return NotImplemented


# ---------------------------------------------------------------------------
# GCD machinery
# ---------------------------------------------------------------------------


def _coefficients_in(p: Polynomial, v: int) -> dict[int, Polynomial]:
    """Coefficients of powers of variable v, as polynomials without v."""
    buckets: dict[int, dict[tuple[int, ...], Fraction]] = {}
    for exp, c in p.terms.items():
        k = exp[v]
        rest = exp[:v] + (0,) + exp[v + 1:]
        buckets.setdefault(k, {})[rest] = c
    return {k: Polynomial(d) for k, d in buckets.items()}


def _content_in_var(p: Polynomial, v: int) -> Polynomial:
    coeffs = _coefficients_in(p, v)
    acc: Polynomial | None = None
    for poly in coeffs.values():
        acc = poly if acc is None else poly_gcd(acc, poly)
        if acc.is_one():
            return acc
    assert acc is not None
    return acc


def _mono_shift(p: Polynomial, v: int, k: int) -> Polynomial:
    """Multiply by variable v to the power k."""
    if k == 0:
        return p
    return Polynomial(
        {e[:v] + (e[v] + k,) + e[v + 1:]: c for e, c in p.terms.items()}
    )


def _pseudo_rem(a: Polynomial, b: Polynomial, v: int) -> Polynomial:
    """Exact pseudo-remainder: lc(b)^(deg a - deg b + 1) * a mod b, in variable v."""
    db = b.degree_in(v)
    lb = _coefficients_in(b, v)[db]
    r = a
    scale = a.degree_in(v) - db + 1
    while not r.is_zero():
        dr = r.degree_in(v)
        if dr < db:
            break
        lr = _coefficients_in(r, v)[dr]
        r = lb * r - _mono_shift(lr, v, dr - db) * b
        scale -= 1
    if scale > 0 and not r.is_zero():
        r = (lb ** scale) * r
    return r


_MOD = (1 << 61) - 1
#: deterministic evaluation points for the coprimality certificate
_POINTS = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def _int_terms(p: Polynomial) -> dict[tuple[int, ...], int]:
    return {e: c.numerator for e, c in p.terms.items()}


def _specialize_mod(
    terms: dict[tuple[int, ...], int], v: int, vals: Sequence[int], deg: int
) -> list[int]:
    """Image of an integer polynomial as a univariate in v, mod a big prime."""
    coeffs = [0] * (deg + 1)
    cache: dict[tuple[int, int], int] = {}
    for exp, c in terms.items():
        factor = c % _MOD
        for i, e in enumerate(exp):
            if e and i != v:
                key = (i, e)
                pw = cache.get(key)
                if pw is None:
                    pw = pow(vals[i], e, _MOD)
                    cache[key] = pw
                factor = factor * pw % _MOD
        slot = exp[v]
        coeffs[slot] = (coeffs[slot] + factor) % _MOD
    return coeffs


def _gcd_degree_mod(a: list[int], b: list[int]) -> int | None:
    """Degree of gcd of two univariate polynomials mod the prime; None if a or b is 0."""

    def trim(c):
        while c and c[-1] == 0:
            c.pop()
        return c

    a = trim(list(a))
    b = trim(list(b))
    if not a or not b:
        return None
    while b:
        inv = pow(b[-1], _MOD - 2, _MOD)
        db = len(b) - 1
        while len(a) - 1 >= db and a:
            shift = len(a) - 1 - db
            factor = a[-1] * inv % _MOD
            for i in range(len(b)):
                a[shift + i] = (a[shift + i] - factor * b[i]) % _MOD
            trim(a)
        a, b = b, a
    return len(a) - 1


def _coprime_certificate(p: Polynomial, q: Polynomial) -> bool:
    """True only when gcd(p, q) is provably constant.

    For each variable v shared by p and q, specialize all other variables at
    integer points mod a large prime.  If the image of p keeps its v-degree
    (so the leading coefficient of any divisor of p also survives) and the
    univariate images are coprime, every common divisor has v-degree 0.  If
    that is certified for all shared variables the gcd is a constant.
    """
    common = p.vars_present() & q.vars_present()
    if not common:
        return True
    pi = _int_terms(p)
    qi = _int_terms(q)
    npts = len(_POINTS)
    for v in sorted(common):
        dp = p.degree_in(v)
        dq = q.degree_in(v)
        certified = False
        for attempt in range(4):
            vals = [_POINTS[(7 * i + 5 * attempt + 1) % npts] + attempt for i in range(NVARS)]
            pp = _specialize_mod(pi, v, vals, dp)
            if pp[dp] == 0:
                continue
            qq = _specialize_mod(qi, v, vals, dq)
            deg = _gcd_degree_mod(pp, qq)
            if deg == 0:
                certified = True
                break
        if not certified:
            return False
    return True


def _gcd_primitive(p: Polynomial, q: Polynomial) -> Polynomial:
    """GCD of two nonzero primitive-positive polynomials, primitive-positive.

    Uses the subresultant PRS in the highest-indexed variable present, with
    content extraction only at the ends; intermediate steps are exact
    divisions, which keeps coefficient growth polynomial.  A modular
    evaluation certificate short-circuits the ubiquitous coprime case.
    """
    if p == q:
        return p
    if p.is_constant() or q.is_constant():
        return _P_ONE
    if _coprime_certificate(p, q):
        return _P_ONE
    # trial division catches the very common nested-power case cheaply
    if p.total_degree() <= q.total_degree():
        try:
            q.divide_exact(p)
            return p
        except ExactDivisionError:
            pass
    else:
        try:
            p.divide_exact(q)
            return q
        except ExactDivisionError:
            pass
    vp = p.vars_present()
    vq = q.vars_present()
    v = max(vp | vq)
    if v not in vp:
        return poly_gcd(p, _content_in_var(q, v))
    if v not in vq:
        return poly_gcd(_content_in_var(p, v), q)
    cp = _content_in_var(p, v)
    cq = _content_in_var(q, v)
    c = poly_gcd(cp, cq)
    a = p.divide_exact(cp)
    b = q.divide_exact(cq)
    if a.degree_in(v) < b.degree_in(v):
        a, b = b, a
    a = a.primitive_positive()[1]
    b = b.primitive_positive()[1]
    g = _P_ONE
    h = _P_ONE
    while True:
        delta = a.degree_in(v) - b.degree_in(v)
        r = _pseudo_rem(a, b, v)
        if r.is_zero():
            break
        if r.degree_in(v) == 0:
            return c
        a, b = b, r.divide_exact(g * (h ** delta))
        g = _coefficients_in(a, v)[a.degree_in(v)]
        if delta == 1:
            h = g
        elif delta > 1:
            h = (g ** delta).divide_exact(h ** (delta - 1))
    if not b.is_one():
        b = b.divide_exact(_content_in_var(b, v))
    return (c * b).primitive_positive()[1]


def poly_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Normalized GCD: integer coefficients, content 1, positive leading term.

    ``poly_gcd(p, 0)`` returns the normalization of ``p``; the GCD of two
    nonzero constants is 1.
    """
    if p.is_zero():
        return q.primitive_positive()[1]
    if q.is_zero():
        return p.primitive_positive()[1]
    mp = p.min_exponents()
    mq = q.min_exponents()
    m = tuple(min(a, b) for a, b in zip(mp, mq))
    p1 = p.shift_down(mp).primitive_positive()[1]
    q1 = q.shift_down(mq).primitive_positive()[1]
    g = _gcd_memo(p1, q1) if hash(p1) <= hash(q1) else _gcd_memo(q1, p1)
    return g.shift_up(m)


@lru_cache(maxsize=8192)
def _gcd_memo(p: Polynomial, q: Polynomial) -> Polynomial:
    return _gcd_primitive(p, q)


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------


class RationalFunction:
    """Reduced fraction of :class:`Polynomial` values.

    Invariants: gcd(num, den) = 1 and the denominator has integer
    coefficients of content 1 with positive graded-lex leading coefficient.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, *, _raw: bool = False):
        if den is None:
            den = _P_ONE
        num = _coerce_poly(num)
        den = _coerce_poly(den)
        if num is NotImplemented or den is NotImplemented:
            raise TypeError("cannot build a rational function from these operands")
        if not _raw:
            if den.is_zero():
                raise ZeroDivisionError("zero denominator")
            num, den = _reduce_pair(num, den)
        self.num = num
        self.den = den
        self._hash: int | None = None

    # -- constructors --------------------------------------------------

    @staticmethod
    def zero() -> "RationalFunction":
        return _RF_ZERO

    @staticmethod
    def one() -> "RationalFunction":
        return _RF_ONE

    @staticmethod
    def constant(c: Scalar) -> "RationalFunction":
        return RationalFunction(
            Polynomial.constant(c), _P_ONE, _raw=True
        )

    @staticmethod
    def variable(v: Union[str, int]) -> "RationalFunction":
        return RationalFunction(Polynomial.variable(v), _P_ONE, _raw=True)

    # -- predicates ------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_one()

    def constant_value(self) -> Fraction:
        if not self.den.is_one():
            raise ValueError("not a constant")
        return self.num.constant_value()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def validate(self) -> None:
        """Assert the reduced-normalized invariants (used by tests)."""
        if self.den.is_zero():
            raise AssertionError("zero denominator")
        if self.num.is_zero():
            assert self.den.is_one(), "zero must be 0/1"
            return
        g = poly_gcd(self.num, self.den)
        assert g.is_one(), f"not reduced: gcd={g}"
        c, prim = self.den.primitive_positive()
        assert c == 1 and prim == self.den, "denominator not normalized"

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        other = _coerce_rf_or_ni(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.num, self.den
        c, d = other.num, other.den
        if a.is_zero():
            return other
        if c.is_zero():
            return self
        if b == d:
            num = a + c
            if num.is_zero():
                return _RF_ZERO
            h = poly_gcd(num, b)
            if h.is_one():
                return RationalFunction(num, b, _raw=True)
            return RationalFunction(num.divide_exact(h), b.divide_exact(h))
        g = poly_gcd(b, d)
        if g.is_one():
            num = a * d + c * b
            if num.is_zero():
                return _RF_ZERO
            return RationalFunction(num, b * d, _raw=True)
        b2 = b.divide_exact(g)
        d2 = d.divide_exact(g)
        num = a * d2 + c * b2
        if num.is_zero():
            return _RF_ZERO
        h = poly_gcd(num, g)
        if h.is_one():
            return RationalFunction(num, b2 * d2 * g, _raw=True)
        num = num.divide_exact(h)
        den = b2 * d2 * g.divide_exact(h)
        return RationalFunction(num, den, _raw=True)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _raw=True)

    def __sub__(self, other):
        other = _coerce_rf_or_ni(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce_rf_or_ni(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce_rf_or_ni(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.num, self.den
        c, d = other.num, other.den
        if a.is_zero() or c.is_zero():
            return _RF_ZERO
        h1 = poly_gcd(a, d)
        if not h1.is_one():
            a = a.divide_exact(h1)
            d = d.divide_exact(h1)
        h2 = poly_gcd(c, b)
        if not h2.is_one():
            c = c.divide_exact(h2)
            b = b.divide_exact(h2)
        return RationalFunction(a * c, b * d, _raw=True)

    __rmul__ = __mul__

    def reciprocal(self) -> "RationalFunction":
        if self.num.is_zero():
            raise ZeroDivisionError("reciprocal of zero")
        c, prim = self.num.primitive_positive()
        num = self.den.scale(1 / c)
        return RationalFunction(num, prim, _raw=True)

    def __truediv__(self, other):
        other = _coerce_rf_or_ni(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        other = _coerce_rf_or_ni(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.reciprocal()

    def __pow__(self, n: int) -> "RationalFunction":
        if n == 0:
            return _RF_ONE
        base = self if n > 0 else self.reciprocal()
        n = abs(n)
        # num and den are coprime, so power componentwise
        return RationalFunction(base.num ** n, base.den ** n, _raw=True)

    def __eq__(self, other):
        other = _coerce_rf_or_ni(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # -- calculus and mappings --------------------------------------------

    def partial(self, v: Union[str, int]) -> "RationalFunction":
        """Exact partial derivative by the quotient rule.

        The square of the denominator is never formed: with g = gcd(b, b')
        and b = g h, the derivative of a/b is (a'h - a b'/g) / (b h), and the
        result is reduced against b and h separately, which keeps every GCD
        at the size of the inputs.
        """
        i = var_index(v)
        dn = self.num.partial(i)
        if self.den.is_one():
            return RationalFunction(dn, _P_ONE, _raw=True)
        dd = self.den.partial(i)
        if dd.is_zero():
            return RationalFunction(dn, self.den)
        g = poly_gcd(self.den, dd)
        h = self.den if g.is_one() else self.den.divide_exact(g)
        num = dn * h - self.num * (dd if g.is_one() else dd.divide_exact(g))
        if num.is_zero():
            return _RF_ZERO
        num, d1 = _coprime_part(num, self.den)
        num, d2 = _coprime_part(num, h)
        den = d1 * d2
        c, prim = den.primitive_positive()
        if c != 1:
            num = num.scale(1 / c)
        return RationalFunction(num, prim, _raw=True)

    def negate_lambda(self) -> "RationalFunction":
        num = self.num.negate_lambda()
        den = self.den.negate_lambda()
        c, prim = den.primitive_positive()
        if c != 1:
            num = num.scale(1 / c)
        return RationalFunction(num, prim, _raw=True)

    def substitute(self, bindings: Mapping[str, "RationalFunction"]) -> "RationalFunction":
        num = self.num.substitute(bindings)
        den = self.den.substitute(bindings)
        if den.is_zero():
            raise SubstitutionError("substitution sends the denominator to zero")
        return num / den

    def evaluate(self, values: Sequence):
        den = self.den.evaluate(values)
        if den == 0:
            raise ZeroDivisionError("denominator vanishes at the point")
        return self.num.evaluate(values) / den

    # -- serialization and display ------------------------------------

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @staticmethod
    def from_json(data: Mapping) -> "RationalFunction":
        return RationalFunction(
            Polynomial.from_json(data["num"]), Polynomial.from_json(data["den"])
        )

    def __str__(self) -> str:
        if self.den.is_one():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self) -> str:
        return f"RationalFunction({self})"

    def latex(self) -> str:
        if self.den.is_one():
            return self.num.latex()
        return r"\frac{%s}{%s}" % (self.num.latex(), self.den.latex())


def _coprime_part(num: Polynomial, part: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Divide common factors of num and part out of both until coprime."""
    while True:
        g = poly_gcd(num, part)
        if g.is_one():
            return num, part
        num = num.divide_exact(g)
        part = part.divide_exact(g)


def _reduce_pair(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    if num.is_zero():
        return _P_ZERO, _P_ONE
    g = poly_gcd(num, den)
    if not g.is_one():
        num = num.divide_exact(g)
        den = den.divide_exact(g)
    c, prim = den.primitive_positive()
    if c != 1:
        num = num.scale(1 / c)
    return num, prim


def _coerce_rf(value) -> "RationalFunction":
    out = _coerce_rf_or_ni(value)
    if out is NotImplemented:
        raise TypeError(f"cannot interpret {value!r} as a rational function")
    return out


def _coerce_rf_or_ni(value):
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, Polynomial):
        return RationalFunction(value, _P_ONE, _raw=True)
    if isinstance(value, (int, Fraction)):
        return RationalFunction.constant(value)
    return NotImplemented


_RF_ZERO = RationalFunction(_P_ZERO, _P_ONE, _raw=True)
_RF_ONE = RationalFunction(_P_ONE, _P_ONE, _raw=True)


# ---------------------------------------------------------------------------
# Functional surface mirroring the operation contracts
# ---------------------------------------------------------------------------


def poly_arith(p: Polynomial, q: Polynomial, op: str) -> Polynomial:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown polynomial operation {op!r}")


def ratfunc_arith(f: RationalFunction, g: RationalFunction, op: str) -> RationalFunction:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    raise ValueError(f"unknown rational operation {op!r}")


def partial(f: RationalFunction, v: Union[str, int]) -> RationalFunction:
    return _coerce_rf(f).partial(v)


def substitute(f: RationalFunction, bindings: Mapping[str, RationalFunction]) -> RationalFunction:
    return _coerce_rf(f).substitute(bindings)


def negate_lambda(f: RationalFunction) -> RationalFunction:
    return _coerce_rf(f).negate_lambda()


def variable(name: str) -> RationalFunction:
    return RationalFunction.variable(name)
