"""Exact arithmetic substrate: rationals, dense univariate polynomials, sparse
multivariate polynomials, polynomial matrices and fraction-free determinants.

Rationals are ``gmpy2.mpq`` values (always reduced, positive denominator).
Polynomials are immutable; every operation returns a new object.
"""

from __future__ import annotations

import heapq
import json
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import mpmath
from gmpy2 import mpq, mpz

ExactRational = type(mpq(0))

ZERO = mpq(0)
ONE = mpq(1)


class VariableMismatch(ValueError):
    """Raised when two polynomials with different variable tags are combined."""


class InexactDivision(ArithmeticError):
    """Raised by ``exquo`` when the divisor does not divide the dividend."""


def Q(x) -> ExactRational:
    """Coerce ``x`` to an exact rational.

    Accepts ints, ``mpq``, ``Fraction`` and decimal-free strings ``"p/q"``.
    Floats are rejected since they would silently break exactness.
    """
    if isinstance(x, ExactRational):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, type(mpz(0)))):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        s = x.strip()
        if not s or any(ch in s for ch in ".eE"):
            raise ValueError(f"not a decimal-free fraction string: {x!r}")
        return mpq(s)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def format_rational(q) -> str:
    q = Q(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def to_fraction(q) -> Fraction:
    q = Q(q)
    return Fraction(int(q.numerator), int(q.denominator))


def to_mpf(q, prec: int | None = None):
    """Correctly rounded conversion of an exact rational to ``mpmath.mpf``."""
    q = Q(q)
    if prec is None:
        return mpmath.fdiv(int(q.numerator), int(q.denominator))
    return mpmath.fdiv(int(q.numerator), int(q.denominator), prec=prec)


def _is_scalar(x) -> bool:
    return isinstance(x, (int, ExactRational, Fraction, type(mpz(0)))) and not isinstance(x, bool)


# ---------------------------------------------------------------------------
# Dense univariate polynomials


class DensePoly:
    """Univariate polynomial with exact rational coefficients, index = degree."""

    __slots__ = ("var", "coeffs")

    def __init__(self, coeffs: Iterable = (), var: str = "D"):
        cs = [Q(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple = tuple(cs)
        self.var = var

    @classmethod
    def gen(cls, var: str = "D") -> "DensePoly":
        return cls([0, 1], var)

    @classmethod
    def const(cls, c, var: str = "D") -> "DensePoly":
        return cls([c], var)

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial has degree -1."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> ExactRational:
        return self.coeffs[-1] if self.coeffs else ZERO

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def _coerce(self, other) -> "DensePoly":
        if isinstance(other, DensePoly):
            if other.var != self.var:
                raise VariableMismatch(f"{self.var} vs {other.var}")
            return other
        if _is_scalar(other):
            return DensePoly([other], self.var)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return DensePoly(out, self.var)

    __radd__ = __add__

    def __neg__(self):
        return DensePoly([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        if _is_scalar(other):
            c = Q(other)
            return DensePoly([x * c for x in self.coeffs] if c else [], self.var)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b = self.coeffs, o.coeffs
        if not a or not b:
            return DensePoly([], self.var)
        out = [ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return DensePoly(out, self.var)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = DensePoly([1], self.var)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, DensePoly):
            return self.var == other.var and self.coeffs == other.coeffs
        if _is_scalar(other):
            return self.coeffs == DensePoly([other], self.var).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(("DensePoly", self.var, self.coeffs))

    def __call__(self, x):
        """Horner evaluation; exact for rational ``x``, mpmath for mpmath ``x``."""
        if isinstance(x, (mpmath.mpf, mpmath.mpc)):
            acc = mpmath.mpf(0)
            for c in reversed(self.coeffs):
                acc = acc * x + to_mpf(c)
            return acc
        x = Q(x)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "DensePoly":
        return DensePoly([i * c for i, c in enumerate(self.coeffs)][1:], self.var)

    def divmod(self, other: "DensePoly"):
        o = self._coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = o.degree
        lead = o.leading
        quot = [ZERO] * max(len(rem) - dq, 0)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] / lead
            if c:
                quot[i - dq] = c
                for j, oc in enumerate(o.coeffs):
                    rem[i - dq + j] -= c * oc
        return DensePoly(quot, self.var), DensePoly(rem[:dq] if dq > 0 else [], self.var)

    def exquo(self, other) -> "DensePoly":
        if _is_scalar(other):
            return self * (ONE / Q(other))
        q, r = self.divmod(other)
        if not r.is_zero():
            raise InexactDivision(f"{other} does not divide {self}")
        return q

    def divides_exactly(self, other: "DensePoly") -> bool:
        """True when ``self`` divides ``other``."""
        return other.divmod(self)[1].is_zero()

    def taylor_shift(self, c) -> "DensePoly":
        """Exact coefficients of p(x + c)."""
        c = Q(c)
        cs = list(self.coeffs)
        n = len(cs)
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                cs[j] += c * cs[j + 1]
        return DensePoly(cs, self.var)

    def norm1(self) -> ExactRational:
        return sum((abs(c) for c in self.coeffs), ZERO)

    def to_sparse(self) -> "SparsePoly":
        return SparsePoly((self.var,), {(i,): c for i, c in enumerate(self.coeffs) if c})

    def __repr__(self):
        return f"DensePoly({[format_rational(c) for c in self.coeffs]}, var={self.var!r})"

    def __str__(self):
        return self.to_sparse().__str__()


# ---------------------------------------------------------------------------
# Sparse multivariate polynomials


class SparsePoly:
    """Polynomial in named variables, stored as ``{exponent tuple: rational}``.

    Used with variables ``("E", "g")`` for the spectral polynomials and with
    extra symbols ``w1, w2, ...`` when the potential is kept generic.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Sequence[str], terms: Mapping | None = None):
        self.vars = tuple(vars)
        n = len(self.vars)
        clean = {}
        if terms:
            for e, c in terms.items():
                e = tuple(int(x) for x in e)
                if len(e) != n:
                    raise ValueError(f"exponent {e} does not match variables {self.vars}")
                if any(x < 0 for x in e):
                    raise ValueError(f"negative exponent {e}")
                c = Q(c)
                if c:
                    clean[e] = c
        self.terms = clean

    @classmethod
    def const(cls, c, vars: Sequence[str]) -> "SparsePoly":
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def gen(cls, name: str, vars: Sequence[str]) -> "SparsePoly":
        vars = tuple(vars)
        if name not in vars:
            raise VariableMismatch(f"{name} not among {vars}")
        e = tuple(1 if v == name else 0 for v in vars)
        return cls(vars, {e: 1})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> ExactRational:
        return self.terms.get((0,) * len(self.vars), ZERO)

    def _coerce(self, other):
        if isinstance(other, SparsePoly):
            if other.vars != self.vars:
                raise VariableMismatch(f"{self.vars} vs {other.vars}")
            return other
        if _is_scalar(other):
            return SparsePoly.const(other, self.vars)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        out = dict(self.terms)
        for e, c in o.terms.items():
            v = out.get(e, ZERO) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return _raw_sparse(self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return _raw_sparse(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        out = dict(self.terms)
        for e, c in o.terms.items():
            v = out.get(e, ZERO) - c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return _raw_sparse(self.vars, out)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if _is_scalar(other):
            c = Q(other)
            if not c:
                return _raw_sparse(self.vars, {})
            return _raw_sparse(self.vars, {e: v * c for e, v in self.terms.items()})
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, ZERO) + c1 * c2
        return _raw_sparse(self.vars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = SparsePoly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, SparsePoly):
            return self.vars == other.vars and self.terms == other.terms
        if _is_scalar(other):
            return self.terms == SparsePoly.const(other, self.vars).terms
        return NotImplemented

    def __hash__(self):
        return hash(("SparsePoly", self.vars, frozenset(self.terms.items())))

    def exquo(self, other) -> "SparsePoly":
        """Exact division; raises ``InexactDivision`` if a remainder is left."""
        if _is_scalar(other):
            c = Q(other)
            if not c:
                raise ZeroDivisionError("division by zero")
            return self * (ONE / c)
        d = self._coerce(other)
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        lt_d = max(d.terms)
        c_d = d.terms[lt_d]
        if len(d.terms) == 1:
            out = {}
            for e, c in self.terms.items():
                q = tuple(a - b for a, b in zip(e, lt_d))
                if any(x < 0 for x in q):
                    raise InexactDivision("monomial divisor does not divide")
                out[q] = c / c_d
            return _raw_sparse(self.vars, out)
        rem = dict(self.terms)
        heap = [_neg(e) for e in rem]
        heapq.heapify(heap)
        quot = {}
        while heap:
            lt = _neg(heapq.heappop(heap))
            c0 = rem.pop(lt, None)
            if c0 is None:
                continue
            while heap and _neg(heap[0]) == lt:
                heapq.heappop(heap)
            q = tuple(a - b for a, b in zip(lt, lt_d))
            if any(x < 0 for x in q):
                raise InexactDivision("divisor does not divide dividend")
            c = c0 / c_d
            quot[q] = c
            for e, v in d.terms.items():
                if e == lt_d:
                    continue
                key = tuple(a + b for a, b in zip(q, e))
                old = rem.get(key)
                nv = (ZERO if old is None else old) - c * v
                if nv:
                    rem[key] = nv
                    if old is None:
                        heapq.heappush(heap, _neg(key))
                else:
                    rem.pop(key, None)
        return _raw_sparse(self.vars, quot)

    def _index(self, var: str) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise VariableMismatch(f"unknown variable {var!r} (have {self.vars})") from None

    def degree(self, var: str | None = None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        i = self._index(var)
        return max(e[i] for e in self.terms)

    def diff(self, var: str) -> "SparsePoly":
        i = self._index(var)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return _raw_sparse(self.vars, out)

    def specialize(self, var: str, value):
        """Substitute an exact value for ``var``; drops the variable.

        Returns an exact rational when no variables remain.
        """
        i = self._index(var)
        value = Q(value)
        rest = self.vars[:i] + self.vars[i + 1:]
        out: dict = {}
        for e, c in self.terms.items():
            k = e[:i] + e[i + 1:]
            out[k] = out.get(k, ZERO) + c * value ** e[i]
        p = SparsePoly(rest, out)
        if not rest:
            return p.constant_term()
        return p

    def evaluate(self, point: Mapping):
        """Evaluate at numeric values for every variable (exact or mpmath)."""
        vals = [point[v] for v in self.vars]
        numeric = any(isinstance(v, (mpmath.mpf, mpmath.mpc)) for v in vals)
        if not numeric:
            vals = [Q(v) for v in vals]
        acc = mpmath.mpf(0) if numeric else ZERO
        for e, c in self.terms.items():
            t = to_mpf(c) if numeric else c
            for v, k in zip(vals, e):
                if k:
                    t = t * v ** k
            acc += t
        return acc

    def coefficients_in(self, var: str) -> list:
        """View as a univariate polynomial in ``var``: list of coefficients
        (SparsePoly in the remaining variables), index = degree."""
        i = self._index(var)
        rest = self.vars[:i] + self.vars[i + 1:]
        buckets: dict = {}
        for e, c in self.terms.items():
            buckets.setdefault(e[i], {})[e[:i] + e[i + 1:]] = c
        deg = max(buckets) if buckets else -1
        return [SparsePoly(rest, buckets.get(k, {})) for k in range(deg + 1)]

    def to_dense(self) -> DensePoly:
        if len(self.vars) != 1:
            raise VariableMismatch(f"not univariate: {self.vars}")
        deg = self.degree()
        cs = [ZERO] * (deg + 1)
        for e, c in self.terms.items():
            cs[e[0]] = c
        return DensePoly(cs, self.vars[0])

    def promote(self, vars: Sequence[str]) -> "SparsePoly":
        """Embed into a polynomial ring with a superset of variables."""
        vars = tuple(vars)
        idx = []
        for v in self.vars:
            if v not in vars:
                raise VariableMismatch(f"{v} missing from target variables {vars}")
            idx.append(vars.index(v))
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(vars)
            for k, i in zip(e, idx):
                ne[i] = k
            out[tuple(ne)] = c
        return _raw_sparse(vars, out)

    def leading_coefficient(self, var: str) -> "SparsePoly":
        return self.coefficients_in(var)[-1]

    def __repr__(self):
        return f"SparsePoly({self.vars}, {{{', '.join(f'{e}: {format_rational(c)}' for e, c in sorted(self.terms.items()))}}})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            if not mono:
                parts.append(format_rational(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{format_rational(c)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _neg(e):
    return tuple(-x for x in e)


def _raw_sparse(vars, terms) -> SparsePoly:
    # Trusted constructor: terms already clean.
    p = SparsePoly.__new__(SparsePoly)
    p.vars = vars
    p.terms = terms
    return p


BivarPoly = SparsePoly


# ---------------------------------------------------------------------------
# Arithmetic helpers with tag checking


def poly_arith(a, b, op: str):
    """Exact ``add``, ``sub`` or ``mul`` of two polynomials with matching tags."""
    if type(a) is not type(b):
        raise VariableMismatch("mixed polynomial representations")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def specialize(p, var: str, value):
    """Substitute an exact value for one variable of a polynomial."""
    if isinstance(p, DensePoly):
        if var != p.var:
            raise VariableMismatch(f"unknown variable {var!r} (have {p.var!r})")
        return p(value)
    return p.specialize(var, value)


# ---------------------------------------------------------------------------
# Matrices and determinants


class PolyMatrix:
    """Rectangular matrix whose entries are polynomials or exact rationals."""

    __slots__ = ("rows", "dims")

    def __init__(self, rows: Sequence[Sequence]):
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ValueError("matrix dimensions must be positive")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged matrix")
        template = next((x for r in rows for x in r if isinstance(x, (SparsePoly, DensePoly))), None)
        out = []
        for r in rows:
            nr = []
            for x in r:
                if template is None:
                    nr.append(Q(x))
                elif isinstance(x, (SparsePoly, DensePoly)):
                    nr.append(x)
                elif isinstance(template, SparsePoly):
                    nr.append(SparsePoly.const(x, template.vars))
                else:
                    nr.append(DensePoly([x], template.var))
            out.append(tuple(nr))
        self.rows = tuple(out)
        self.dims = (len(out), width)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @property
    def is_square(self) -> bool:
        return self.dims[0] == self.dims[1]


def _exquo(a, b):
    if isinstance(a, (SparsePoly, DensePoly)):
        return a.exquo(b)
    return a / b


def _zero(x):
    return not x


def det_fraction_free(m: PolyMatrix):
    """Determinant by Bareiss fraction-free elimination with row pivoting."""
    if not isinstance(m, PolyMatrix):
        m = PolyMatrix(m)
    if not m.is_square:
        raise ValueError(f"determinant of non-square matrix {m.dims}")
    a = [list(r) for r in m.rows]
    n = len(a)
    sign = 1
    prev = None
    for k in range(n - 1):
        if _zero(a[k][k]):
            for i in range(k + 1, n):
                if not _zero(a[i][k]):
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return a[k][k] * 0
        akk = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                num = rowi[j] * akk
                if not _zero(aik) and not _zero(rowk[j]):
                    num = num - aik * rowk[j]
                rowi[j] = num if prev is None else _exquo(num, prev)
            rowi[k] = aik * 0
        prev = akk
    d = a[n - 1][n - 1]
    return d if sign == 1 else -d


# ---------------------------------------------------------------------------
# JSON serialization: {"var": [...], "terms": [{"deg": [...], "coef": "p/q"}]}


def poly_to_json(p) -> dict:
    if isinstance(p, DensePoly):
        return {
            "var": [p.var],
            "terms": [{"deg": [i], "coef": format_rational(c)} for i, c in enumerate(p.coeffs) if c],
        }
    if isinstance(p, SparsePoly):
        return {
            "var": list(p.vars),
            "terms": [{"deg": list(e), "coef": format_rational(p.terms[e])} for e in sorted(p.terms)],
        }
    raise TypeError(f"not a polynomial: {type(p).__name__}")


def poly_from_json(obj) -> DensePoly | SparsePoly:
    """Inverse of ``poly_to_json``; single-variable input gives a DensePoly."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "var" not in obj or "terms" not in obj:
        raise ValueError("polynomial JSON needs 'var' and 'terms'")
    vars = obj["var"]
    if not isinstance(vars, list) or not vars or not all(isinstance(v, str) for v in vars):
        raise ValueError("'var' must be a non-empty list of names")
    terms = {}
    for t in obj["terms"]:
        deg = tuple(t["deg"])
        if len(deg) != len(vars):
            raise ValueError(f"term degree {deg} does not match variables {vars}")
        if deg in terms:
            raise ValueError(f"duplicate term {deg}")
        terms[deg] = Q(t["coef"])
    sp = SparsePoly(vars, terms)
    if len(vars) == 1:
        return sp.to_dense()
    return sp


def render(p) -> str:
    return json.dumps(poly_to_json(p), separators=(",", ":"))


def parse(s: str):
    return poly_from_json(json.loads(s))


# ---------------------------------------------------------------------------
# Rational matrices: characteristic polynomial and interpolation


def charpoly_hessenberg(a: Sequence[Sequence], var: str = "E") -> DensePoly:
    """det(x*I - A) for a square rational matrix A.

    Exact similarity reduction to upper Hessenberg form followed by the
    standard three-term-like recurrence for Hessenberg determinants; O(n^3)
    rational operations, so it stays usable for the 2^M x 2^M tensor matrices.
    """
    h = [[Q(x) for x in row] for row in a]
    n = len(h)
    if any(len(r) != n for r in h):
        raise ValueError("charpoly of non-square matrix")
    for m in range(1, n - 1):
        piv = next((i for i in range(m, n) if h[i][m - 1]), None)
        if piv is None:
            continue
        if piv != m:
            h[m], h[piv] = h[piv], h[m]
            for row in h:
                row[m], row[piv] = row[piv], row[m]
        p = h[m][m - 1]
        for i in range(m + 1, n):
            t = h[i][m - 1]
            if not t:
                continue
            t = t / p
            hi, hm = h[i], h[m]
            for c in range(m - 1, n):
                if hm[c]:
                    hi[c] -= t * hm[c]
            for row in h:
                if row[i]:
                    row[m] += t * row[i]
    x = DensePoly.gen(var)
    polys = [DensePoly([1], var)]
    for m in range(n):
        pm = (x - h[m][m]) * polys[m]
        prod = ONE
        for i in range(m - 1, -1, -1):
            prod *= h[i + 1][i]
            if not prod:
                break
            if h[i][m]:
                pm = pm - polys[i] * (h[i][m] * prod)
        polys.append(pm)
    return polys[n]


def interpolate(xs: Sequence, ys: Sequence, var: str = "g") -> DensePoly:
    """Newton divided-difference interpolation through exact points."""
    xs = [Q(x) for x in xs]
    coef = [Q(y) for y in ys]
    n = len(xs)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    p = DensePoly([coef[-1]], var)
    for i in range(n - 2, -1, -1):
        p = p * DensePoly([-xs[i], 1], var) + coef[i]
    return p
