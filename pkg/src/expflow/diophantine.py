"""Diophantine classification of flow parameters.

Continued fractions are expanded from an exact enclosure ``[lo, hi]`` of the
input (the dyadic value of an mpf widened by a few ulps), so every returned
partial quotient is shared by all reals in the enclosure.  Convergents are
exact Python integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from expflow.errors import InsufficientTerms, PrecisionExhausted

DEFAULT_PRECISION = 512
EVIDENCE_THRESHOLD = 5.0

_NAMED = {"sqrt2", "sqrt3", "sqrt5", "phi", "golden", "pi", "e", "liouville"}


def _context(bits: int) -> mpmath.ctx_mp.MPContext:
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


def is_mpf(x) -> bool:
    return hasattr(x, "_mpf_")


def mpf_to_fraction(x) -> Fraction:
    man, exp = x.man_exp
    man = int(man)
    if exp >= 0:
        return Fraction(man * 2**exp)
    return Fraction(man, 2**-exp)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, np.integer)) and not isinstance(x, bool)


def parse_real(x, precision_bits: int = DEFAULT_PRECISION):
    """Normalize an input real.

    Returns ``(value, exact)`` where ``value`` is a Fraction when the input is
    an exact rational (int, Fraction, or a numeric string such as ``"22/7"``)
    and an mpf at ``precision_bits`` otherwise.  Named constants: ``sqrt2``,
    ``sqrt3``, ``sqrt5``, ``phi``/``golden``, ``pi``, ``e``, ``liouville``
    and ``liouville:N`` (partial sum with N terms).
    """
    ctx = _context(precision_bits)
    if isinstance(x, str):
        name = x.strip().lower()
        if name.startswith("liouville:"):
            return liouville_constant(int(name.split(":", 1)[1]), precision_bits), False
        if name in _NAMED:
            return _named_constant(name, ctx), False
        try:
            return Fraction(name), True
        except ValueError:
            return ctx.mpf(name), False
    if is_exact(x):
        return Fraction(int(x)) if isinstance(x, (int, np.integer)) else x, True
    if is_mpf(x):
        return ctx.mpf(x), False
    return ctx.mpf(float(x)), False


def _named_constant(name: str, ctx):
    if name == "sqrt2":
        return ctx.sqrt(2)
    if name == "sqrt3":
        return ctx.sqrt(3)
    if name == "sqrt5":
        return ctx.sqrt(5)
    if name in ("phi", "golden"):
        return (1 + ctx.sqrt(5)) / 2
    if name == "pi":
        return +ctx.pi
    if name == "e":
        return ctx.e + 0
    # full Liouville constant: every term above the working ulp
    digits = int(ctx.prec * math.log10(2))
    n = 1
    while math.factorial(n + 1) <= digits + 10:
        n += 1
    return liouville_constant(n, ctx.prec, _check=False)


@dataclass(frozen=True)
class ContinuedFraction:
    value: object
    terms: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    precision_bits: int
    # the expansion ended because the value is a rational within precision
    terminated: bool = False
    # the input itself was an exact rational
    exact: bool = False

    def __len__(self):
        return len(self.terms)


def _convergents(terms: Sequence[int]) -> list[tuple[int, int]]:
    p0, q0, p1, q1 = 1, 0, terms[0], 1
    out = [(p1, q1)]
    for a in terms[1:]:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append((p1, q1))
    return out


def _enclosure(value, exact: bool, precision_bits: int) -> tuple[Fraction, Fraction]:
    if exact:
        return value, value
    center = mpf_to_fraction(value)
    if center == 0:
        slack = Fraction(1, 2**precision_bits)
    else:
        mag = int(value.context.mag(value))
        slack = Fraction(2) ** (mag - precision_bits + 3)
    return center - slack, center + slack


def _expand(lo: Fraction, hi: Fraction, n_terms: int, precision_bits: int):
    """Partial quotients common to every real in [lo, hi].

    Returns ``(terms, terminated)``; ``terminated`` means the enclosure
    shrank around an integer complete quotient, i.e. the value is a rational
    to within working precision.
    """
    rational_width = Fraction(1, 2 ** max(precision_bits // 4, 8))
    terms: list[int] = []
    while len(terms) < n_terms:
        if lo == hi:
            a = math.floor(lo)
            terms.append(a)
            rem = lo - a
            if rem == 0:
                return terms, True
            lo = hi = 1 / rem
            continue
        m_lo, m_hi = math.ceil(lo), math.floor(hi)
        if m_lo <= m_hi:
            if m_lo == m_hi and hi - lo < rational_width:
                if m_lo == 1 and terms:
                    terms[-1] += 1
                else:
                    terms.append(m_lo)
                return terms, True
            return terms, False
        a = math.floor(lo)
        terms.append(a)
        lo, hi = 1 / (hi - a), 1 / (lo - a)
    return terms, False


def cf_expand(x, n_terms: int, precision_bits: int = DEFAULT_PRECISION, strict: bool = True) -> ContinuedFraction:
    """Continued fraction of ``x`` with up to ``n_terms`` partial quotients.

    Stops early when ``x`` is rational (exactly, or within working
    precision).  With ``strict`` a shortfall caused by limited precision
    raises PrecisionExhausted; otherwise the determined prefix is returned.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be positive")
    value, exact = parse_real(x, precision_bits)
    lo, hi = _enclosure(value, exact, precision_bits)
    terms, terminated = _expand(lo, hi, n_terms, precision_bits)
    if not terms or (strict and not terminated and len(terms) < n_terms):
        raise PrecisionExhausted(len(terms), n_terms, precision_bits)
    if not exact and value == 0:
        terminated = True
    return ContinuedFraction(
        value=value,
        terms=tuple(terms),
        convergents=tuple(_convergents(terms)),
        precision_bits=precision_bits,
        terminated=terminated,
        exact=exact,
    )


def _approximation_exponents(cf: ContinuedFraction, q_min: int):
    """(p, q, |x - p/q|, exponent) for non-terminal convergents with q >= q_min."""
    ctx = _context(cf.precision_bits)
    x = ctx.mpf(cf.value.numerator) / cf.value.denominator if cf.exact else ctx.mpf(cf.value)
    convs = cf.convergents[:-1] if cf.terminated else cf.convergents
    out = []
    for p, q in convs:
        if q < max(q_min, 2):
            continue
        err = abs(x - ctx.mpf(p) / q)
        if err == 0:
            continue
        out.append((p, q, err, -ctx.ln(err) / ctx.ln(q)))
    return out


def irrationality_exponent_estimate(cf: ContinuedFraction, q_min: int = 2) -> float | None:
    """Largest approximation exponent ``-ln|x - p/q| / ln q`` over the convergents.

    Only convergents with ``q >= q_min`` count; a large ``q_min`` strips the
    O(1/ln q) bias of small denominators (badly approximable numbers drift
    toward 2 from above).  Exact rationals give None (not applicable).
    """
    if cf.exact:
        return None
    if len(cf.convergents) < 3:
        raise InsufficientTerms(f"need at least 3 convergents, have {len(cf.convergents)}")
    rows = _approximation_exponents(cf, q_min)
    if not rows:
        raise InsufficientTerms(f"no convergent with q >= {q_min}")
    return float(max(r[3] for r in rows))


def liouville_constant(n_terms: int, precision_bits: int = DEFAULT_PRECISION, _check: bool = True):
    """Partial sum of 10**(-k!) for k = 1..n_terms as an mpf."""
    if n_terms < 1:
        raise ValueError("n_terms must be positive")
    digits = precision_bits * math.log10(2)
    if _check and math.factorial(n_terms + 1) > digits:
        available = 1
        while math.factorial(available + 2) <= digits:
            available += 1
        raise PrecisionExhausted(available, n_terms, precision_bits)
    ctx = _context(precision_bits)
    ten = ctx.mpf(10)
    return ctx.fsum(ten ** (-math.factorial(k)) for k in range(1, n_terms + 1))


@dataclass(frozen=True)
class DiophantineReport:
    classification: str  # rational | non-liouville-certified | liouville-evidence | undetermined
    exponent_estimate: float | None = None
    witnesses: tuple[tuple[int, int, float], ...] = ()
    bound_searched: int = 0
    p: int | None = None
    q: int | None = None
    n_max: int | None = None
    threshold: float = EVIDENCE_THRESHOLD

    def to_dict(self) -> dict:
        return {
            "classification": self.classification,
            "exponent_estimate": self.exponent_estimate,
            "witnesses": [list(w) for w in self.witnesses],
            "bound_searched": self.bound_searched,
            "p": self.p,
            "q": self.q,
            "n_max": self.n_max,
            "threshold": self.threshold,
        }


def classify(
    x,
    n_terms: int = 400,
    precision_bits: int = DEFAULT_PRECISION,
    threshold: float = EVIDENCE_THRESHOLD,
    q_min: int = 10**6,
    max_witnesses: int = 8,
) -> DiophantineReport:
    """Bounded-evidence classification of a real.

    Rational when the expansion terminates at a denominator well inside the
    precision horizon; otherwise the tail exponent (convergents with
    ``q >= q_min``) is compared against ``threshold``.  ``n_max`` of a
    certified report is the smallest N with |x - p/q| >= q**-N on every
    computed convergent.  Witnesses are the best-approximating convergents.
    """
    cf = cf_expand(x, n_terms, precision_bits, strict=False)
    p, q = cf.convergents[-1]
    # a terminated expansion is only a credible rational while q is far below
    # the precision horizon
    if cf.exact or (cf.terminated and q <= 2 ** (precision_bits // 2)):
        return DiophantineReport("rational", None, (), len(cf.convergents), p=p, q=q, threshold=threshold)
    rows = _approximation_exponents(cf, 2)
    tail = [r for r in rows if r[1] >= q_min]
    best = sorted(sorted(rows, key=lambda r: r[3], reverse=True)[:max_witnesses], key=lambda r: r[1])
    witnesses = tuple((r[0], r[1], float(r[2])) for r in best)
    if len(cf.convergents) < 3 or not tail:
        return DiophantineReport("undetermined", None, witnesses, len(cf.convergents), threshold=threshold)
    estimate = float(max(r[3] for r in tail))
    if estimate > threshold:
        return DiophantineReport("liouville-evidence", estimate, witnesses, len(cf.convergents), threshold=threshold)
    n_max = math.ceil(max(r[3] for r in rows))
    return DiophantineReport(
        "non-liouville-certified", estimate, witnesses, len(cf.convergents), n_max=n_max, threshold=threshold
    )


@dataclass(frozen=True)
class IntegerRelation:
    k: tuple[int, ...]
    target: int
    residual: float


def canonical_indices(d: int, bound: int) -> np.ndarray:
    """Nonzero k with |k|_inf <= bound, one of each pair {k, -k}.

    The kept representative has a positive first nonzero entry; rows are
    ordered by sup-norm, then lexicographically.
    """
    if bound < 1:
        return np.zeros((0, d), dtype=np.int64)
    axis = np.arange(-bound, bound + 1, dtype=np.int64)
    ks = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    nz = ks != 0
    has = nz.any(axis=1)
    first = np.argmax(nz, axis=1)
    lead = ks[np.arange(len(ks)), first]
    ks = ks[has & (lead > 0)]
    norms = np.abs(ks).max(axis=1)
    order = np.lexsort(tuple(ks[:, j] for j in reversed(range(d))) + (norms,))
    return ks[order]


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if is_mpf(v):
        return mpf_to_fraction(v)
    return Fraction(float(v))


def integer_relation_search(theta: Sequence, bound: int, tol: float) -> IntegerRelation | None:
    """First k (sup-norm, then lexicographic) with |k.theta - n| <= tol.

    A float prefilter picks candidates; every candidate is confirmed in exact
    rational arithmetic on the dyadic/rational values of theta.  None only
    certifies independence up to ``bound``.
    """
    d = len(theta)
    if d < 1 or bound < 1 or tol < 0:
        raise ValueError("need d >= 1, bound >= 1, tol >= 0")
    exact = [_as_fraction(t) for t in theta]
    th = np.array([float(t) for t in theta])
    ks = canonical_indices(d, bound)
    dots = ks @ th
    resid = np.abs(dots - np.rint(dots))
    slack = 8 * np.finfo(float).eps * (np.abs(ks) @ np.abs(th) + 1)
    for i in np.flatnonzero(resid <= tol + slack):
        k = tuple(int(v) for v in ks[i])
        dot = sum(kj * tj for kj, tj in zip(k, exact))
        target = round(dot)
        r = abs(dot - target)
        if r <= tol:
            return IntegerRelation(k, int(target), float(r))
    return None


def star_discrepancy(s, N: int) -> float:
    """Exact star discrepancy of {n s mod 1 : n = 1..N}."""
    if N < 1:
        raise ValueError("N must be positive")
    if is_exact(s):
        s = Fraction(s)
        pts = np.array([float((n * s) % 1) for n in range(1, N + 1)])
    elif is_mpf(s):
        ctx = s.context
        pts = np.array([float(ctx.frac(n * s)) for n in range(1, N + 1)])
    else:
        pts = np.mod(np.arange(1, N + 1) * float(s), 1.0)
    pts.sort()
    i = np.arange(1, N + 1)
    return float(max(np.max(i / N - pts), np.max(pts - (i - 1) / N)))


__all__ = [
    "ContinuedFraction",
    "DiophantineReport",
    "IntegerRelation",
    "canonical_indices",
    "cf_expand",
    "classify",
    "integer_relation_search",
    "irrationality_exponent_estimate",
    "liouville_constant",
    "parse_real",
    "star_discrepancy",
]
