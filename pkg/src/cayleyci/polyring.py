"""Sparse multivariate polynomials and the polynomial identities behind the
isomorphism maps.

A monomial is a tuple of exponents. A ``Poly`` maps monomials to integer
coefficients, either over Z (``p is None``) or reduced into Z_p.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb, factorial, prod
from typing import Iterable, Mapping, Sequence

from .gfp import FpVec, check_modulus
from .results import Check, verdict

Monomial = tuple[int, ...]


def degree(n: Monomial) -> int:
    return sum(n)


def support(n: Monomial) -> int:
    """Number of variables that actually occur in ``x^n``."""
    return sum(1 for e in n if e)


class Poly:
    __slots__ = ("terms", "nvars", "p")

    def __init__(self, terms: Mapping[Monomial, int], nvars: int, p: int | None = None):
        clean = {}
        for mono, c in terms.items():
            if len(mono) != nvars:
                raise ValueError(f"monomial {mono} does not have {nvars} variables")
            c = int(c)
            if p is not None:
                c %= p
            if c:
                clean[tuple(mono)] = c
        self.terms: dict[Monomial, int] = clean
        self.nvars = nvars
        self.p = p

    @classmethod
    def zero(cls, nvars: int, p: int | None = None) -> "Poly":
        return cls({}, nvars, p)

    @classmethod
    def const(cls, c: int, nvars: int, p: int | None = None) -> "Poly":
        return cls({(0,) * nvars: c}, nvars, p)

    @classmethod
    def var(cls, i: int, nvars: int, p: int | None = None) -> "Poly":
        return cls({tuple(int(j == i) for j in range(nvars)): 1}, nvars, p)

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff: int = 1, p: int | None = None) -> "Poly":
        return cls({tuple(exps): coeff}, len(exps), p)

    def _check(self, other: "Poly"):
        if self.nvars != other.nvars or self.p != other.p:
            raise ValueError("polynomials live in different rings")

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.const(other, self.nvars, self.p)

    def __add__(self, other) -> "Poly":
        other = self._lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out, self.nvars, self.p)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()}, self.nvars, self.p)

    def __sub__(self, other) -> "Poly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Poly":
        return self._lift(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return Poly({m: c * other for m, c in self.terms.items()}, self.nvars, self.p)
        self._check(other)
        out: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out, self.nvars, self.p)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        result = Poly.const(1, self.nvars, self.p)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.p == other.p and self.terms == other.terms
        if isinstance(other, int):
            return self == Poly.const(other, self.nvars, self.p)
        return NotImplemented

    __hash__ = None

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        ring = "Z" if self.p is None else f"Z_{self.p}"
        return f"Poly({self.format()}, {ring})"

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        zero = (0,) * self.nvars
        return all(m == zero for m in self.terms)

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.nvars, 0)

    def coeff(self, mono: Sequence[int]) -> int:
        return self.terms.get(tuple(mono), 0)

    def sorted_terms(self) -> list[tuple[Monomial, int]]:
        """Terms in lexicographic order of exponent vectors."""
        return sorted(self.terms.items())

    def involves(self, i: int) -> bool:
        return any(m[i] for m in self.terms)

    def reduce(self, p: int) -> "Poly":
        """Image in Z_p[x] of a polynomial over Z."""
        return Poly(self.terms, self.nvars, p)

    def exact_div(self, d: int) -> "Poly":
        """Divide every coefficient by ``d`` over Z, refusing any remainder."""
        if self.p is not None:
            raise ValueError("exact division is only defined over Z here")
        out = {}
        for m, c in self.terms.items():
            q, r = divmod(c, d)
            if r:
                raise ArithmeticError(f"coefficient {c} of {m} is not divisible by {d}")
            out[m] = q
        return Poly(out, self.nvars)

    def evaluate(self, x: Sequence[int]) -> int:
        if len(x) != self.nvars:
            raise ValueError("point has the wrong dimension")
        total = 0
        for m, c in self.terms.items():
            total += c * prod(xi ** e for xi, e in zip(x, m) if e)
        return total % self.p if self.p is not None else total

    def shift(self, alpha: Sequence[int]) -> "Poly":
        """The polynomial x -> f(x + alpha), expanded."""
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.nvars:
            raise ValueError("shift vector has the wrong dimension")
        out: dict[Monomial, int] = {}
        for m, c in self.terms.items():
            # per-variable binomial expansion, then the cartesian product
            factors = [_binomial_shift(e, a) for e, a in zip(m, alpha)]
            for choice in itertools.product(*factors):
                mono = tuple(e for e, _ in choice)
                coef = c
                for _, k in choice:
                    coef *= k
                out[mono] = out.get(mono, 0) + coef
        return Poly(out, self.nvars, self.p)

    def format(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or [f"x{i + 1}" for i in range(self.nvars)]
        parts = []
        for m, c in self.sorted_terms():
            vs = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, m) if e)
            parts.append(f"{c}*{vs}" if vs and c != 1 else (vs or str(c)))
        return " + ".join(parts)

    def to_json(self) -> list[list]:
        return [[list(m), c] for m, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, data, nvars: int, p: int | None) -> "Poly":
        return cls({tuple(m): c for m, c in data}, nvars, p)


@lru_cache(maxsize=None)
def _binomial_shift(e: int, a: int) -> tuple[tuple[int, int], ...]:
    """(x + a)^e as ((exponent, coefficient), ...)."""
    if a == 0 or e == 0:
        return ((e, 1),)
    return tuple((j, comb(e, j) * a ** (e - j)) for j in range(e + 1))


def delta(f: Poly, alpha: FpVec | Sequence[int]) -> Poly:
    """Finite difference f(x + alpha) - f(x)."""
    coords = alpha.coords if isinstance(alpha, FpVec) else tuple(alpha)
    if len(coords) != f.nvars:
        raise ValueError(f"shift has dimension {len(coords)}, polynomial has {f.nvars} variables")
    return f.shift(coords) - f


def linear_combination(coeffs: Iterable[int], polys: Sequence[Poly]) -> Poly:
    polys = list(polys)
    out = Poly.zero(polys[0].nvars, polys[0].p)
    for c, f in zip(coeffs, polys):
        if c:
            out = out + f * c
    return out


def var_sum(nvars: int, skip: int | None = None, p: int | None = None) -> Poly:
    """s = x_1 + ... + x_n, or s_i = s - x_i when ``skip`` is given."""
    return Poly({tuple(int(j == i) for j in range(nvars)): 1 for i in range(nvars) if i != skip},
                nvars, p)


def compositions(total: int, parts: int) -> list[Monomial]:
    """All exponent vectors with ``parts`` entries summing to ``total``, lex order."""
    out = []
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        exps = []
        for b in bars:
            exps.append(b - prev - 1)
            prev = b
        exps.append(total + parts - 1 - prev - 1)
        out.append(tuple(exps))
    return sorted(out)


def monomials_M(p: int) -> list[Monomial]:
    """Degree-p monomials in p+1 variables involving at least two variables."""
    check_modulus(p)
    return [n for n in compositions(p, p + 1) if support(n) >= 2]


def split_M(p: int, i: int) -> tuple[list[Monomial], list[Monomial]]:
    """(M_i^0, M_i^+) for the 1-based variable index ``i``."""
    M = monomials_M(p)
    return [n for n in M if n[i - 1] == 0], [n for n in M if n[i - 1] > 0]


def multinomial_c(n: Sequence[int], p: int) -> int:
    """(p-1)! / (n_1! ... n_{p+1}!) for n in M."""
    n = tuple(n)
    if degree(n) != p or support(n) < 2:
        raise ValueError(f"{n} is not a degree-{p} monomial in at least two variables")
    num = factorial(p - 1)
    den = prod(factorial(e) for e in n)
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError(f"c_n is not integral for {n}")  # cannot happen for n in M
    return q


def build_r(p: int) -> list[Poly]:
    """[r_0, r_1, ..., r_{p+1}] in Z_p[x_1..x_{p+1}]."""
    check_modulus(p)
    nv = p + 1
    M = monomials_M(p)
    c = {n: multinomial_c(n, p) for n in M}
    r0 = Poly({n: (support(n) - 2) * c[n] for n in M}, nv, p)
    rs = [r0]
    for i in range(nv):
        terms = {}
        for n in M:
            k = support(n)
            terms[n] = ((1 - k) if n[i] == 0 else (2 - k)) * c[n]
        rs.append(Poly(terms, nv, p))
    return rs


def multilinear(p: int) -> list[Monomial]:
    """L: multilinear degree-p monomials in 2p-1 variables, lex order."""
    nv = 2 * p - 1
    return sorted((tuple(int(j in k) for j in range(nv))
                   for k in itertools.combinations(range(nv), p)), reverse=True)


def build_l(p: int) -> list[Poly]:
    """[l_1, ..., l_{2p-1}]: l_i sums the monomials of L avoiding x_i."""
    check_modulus(p)
    nv = 2 * p - 1
    L = multilinear(p)
    return [Poly({n: 1 for n in L if n[i] == 0}, nv, p) for i in range(nv)]


def _first_diff(lhs: Poly, rhs: Poly):
    keys = sorted(set(lhs.terms) | set(rhs.terms))
    for m in keys:
        if lhs.coeff(m) != rhs.coeff(m):
            return {"monomial": list(m), "lhs": lhs.coeff(m), "rhs": rhs.coeff(m)}
    return None


def check_lemma1(p: int) -> Check:
    """s^p and s_i^p split into pure powers plus p*c_n*x^n over M (resp. M_i^0)."""
    check_modulus(p)
    nv = p + 1
    M = monomials_M(p)
    pure = [tuple(p * int(j == i) for j in range(nv)) for i in range(nv)]
    s_p = var_sum(nv) ** p
    expected = Poly({**{m: 1 for m in pure}, **{n: p * multinomial_c(n, p) for n in M}}, nv)
    bad = _first_diff(s_p, expected)
    if bad:
        return verdict("lemma1", False, "s^p expansion", part="a", first_mismatch=bad)
    for i in range(nv):
        si_p = var_sum(nv, skip=i) ** p
        exp_i = Poly({**{m: 1 for j, m in enumerate(pure) if j != i},
                      **{n: p * multinomial_c(n, p) for n in M if n[i] == 0}}, nv)
        bad = _first_diff(si_p, exp_i)
        if bad:
            return verdict("lemma1", False, "s_i^p expansion", part="b", i=i + 1, first_mismatch=bad)
    return verdict("lemma1", True, "s^p and s_i^p multinomial expansions over Z",
                   p=p, terms_in_s_p=len(s_p))


def check_lemma2(p: int) -> Check:
    """sum_j r_j == (p s^p - sum_j s_j^p) / p, with the division done over Z."""
    check_modulus(p)
    nv = p + 1
    numerator = var_sum(nv) ** p * p
    for i in range(nv):
        numerator = numerator - var_sum(nv, skip=i) ** p
    for m, c in numerator.sorted_terms():
        if c % p:
            return verdict("lemma2", False, "divisibility by p", monomial=list(m), coefficient=c)
    rhs = numerator.exact_div(p).reduce(p)
    lhs = linear_combination([1] * (nv + 1), build_r(p))
    closed = Poly({n: (support(n) - 1) * multinomial_c(n, p) for n in monomials_M(p)}, nv, p)
    bad = _first_diff(lhs, rhs)
    if bad:
        return verdict("lemma2", False, "sum r_j vs divided power sums", first_mismatch=bad)
    bad = _first_diff(lhs, closed)
    if bad:
        return verdict("lemma2", False, "sum r_j vs sum (k-1) c_n x^n", first_mismatch=bad)
    return verdict("lemma2", True, "sum_j r_j = (p s^p - sum s_j^p)/p = sum_M (k-1) c_n x^n",
                   p=p, terms=len(lhs))


def lemma5_closed_form(n: Sequence[int], m: Sequence[int], p: int) -> Poly:
    """x^{n minus m} times the sum of x^k over proper subsets k of n & m."""
    nv = len(n)
    base = tuple(int(a and not b) for a, b in zip(n, m))
    inter = [i for i in range(nv) if n[i] and m[i]]
    terms = {}
    for r in range(len(inter)):
        for k in itertools.combinations(inter, r):
            mono = list(base)
            for i in k:
                mono[i] = 1
            terms[tuple(mono)] = terms.get(tuple(mono), 0) + 1
    return Poly(terms, nv, p)


def check_lemma5(p: int, n: Sequence[int], m: Sequence[int]) -> Check:
    """Closed form of Delta_m x^n for multilinear n and 0/1 shift m."""
    check_modulus(p)
    n, m = tuple(n), tuple(m)
    nv = 2 * p - 1
    if len(n) != nv or len(m) != nv:
        raise ValueError(f"need vectors of length {nv}")
    if any(e not in (0, 1) for e in n) or sum(n) != p:
        raise ValueError(f"{n} is not a multilinear degree-{p} monomial")
    if any(e not in (0, 1) for e in m):
        raise ValueError(f"{m} is not a 0/1 vector")
    direct = delta(Poly.monomial(n, 1, p), m)
    closed = lemma5_closed_form(n, m, p)
    bad = _first_diff(direct, closed)
    return verdict("lemma5", bad is None, "Delta_m x^n = x^(n\\m) * sum_{k < n&m} x^k",
                   n=list(n), m=list(m), **({"first_mismatch": bad} if bad else {}))


def check_lemma6(p: int) -> Check:
    """The three difference identities for l_1..l_{2p-1} plus the binomial facts."""
    check_modulus(p)
    nv = 2 * p - 1
    ls = build_l(p)
    ones = [1] * nv
    total = linear_combination(ones, ls)
    for i in range(nv):
        d = delta(ls[i], FpVec.basis(i, nv, p))
        if not d.is_zero():
            return verdict("lemma6", False, "Delta_{e_i} l_i = 0", part="a", i=i + 1)
    d = delta(total, ones)
    if not (d.is_constant() and d.constant_term() == (-1) % p):
        return verdict("lemma6", False, "Delta_1 sum l_j = -1", part="b", got=d.to_json())
    for i in range(nv):
        shift = [int(j != i) for j in range(nv)]
        d = delta(ls[i] + total, shift)
        if not d.is_zero():
            return verdict("lemma6", False, "Delta l_i + sum l_j = 0", part="c", i=i + 1)
    # binomial facts the hand proof relies on
    binom_b = {k: comb(2 * p - 1 - k, p - k) % p for k in range(p)}
    binom_c = {k: comb(2 * p - 2 - k, p - 1 - k) % p for k in range(p - 1)}
    ok = (all(binom_b[k] == 0 for k in range(1, p)) and binom_b[0] == 1
          and all(v == 0 for v in binom_c.values()))
    return verdict("lemma6", ok, "difference identities (a)-(c) and binomial congruences",
                   p=p, binom_2p1_p_mod_p=binom_b[0],
                   binom_b={str(k): v for k, v in binom_b.items()},
                   binom_c={str(k): v for k, v in binom_c.items()})


def check_power_congruence(p: int) -> Check:
    """(t + p)^p - t^p has every coefficient divisible by p^2."""
    check_modulus(p)
    t = Poly.var(0, 1)
    diff = (t + p) ** p - t ** p
    bad = [(m[0], c) for m, c in diff.sorted_terms() if c % (p * p)]
    return verdict("power_congruence", not bad, "(t+p)^p = t^p mod p^2", p=p,
                   coefficients={str(m[0]): c for m, c in diff.sorted_terms()},
                   **({"offending": bad} if bad else {}))


def run_all_lemmas(p: int, lemma5_samples: int = 50, seed: int = 0) -> list[Check]:
    """Every polynomial check at one prime, the difference formula on random (n, m) pairs."""
    import random

    rng = random.Random(seed)
    checks = [check_lemma1(p), check_lemma2(p), check_power_congruence(p), check_lemma6(p)]
    nv = 2 * p - 1
    L = multilinear(p)
    failures = []
    for _ in range(lemma5_samples):
        n = rng.choice(L)
        m = tuple(rng.randint(0, 1) for _ in range(nv))
        c = check_lemma5(p, n, m)
        if not c.passed:
            failures.append(c.evidence)
    # the all-ones shift is part (b)
    for n in L[:5]:
        c = check_lemma5(p, n, (1,) * nv)
        if not c.passed:
            failures.append(c.evidence)
    checks.append(verdict("lemma5", not failures, "closed form of Delta_m x^n on random pairs",
                          samples=lemma5_samples, seed=seed, failures=failures[:5]))
    return checks
