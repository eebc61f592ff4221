"""Formal two-variable distributions with delta terms.

The canonical delta kernel is the unshifted

    delta(lam*v2/v1) = sum_n lam^n v1^(-n) v2^n,

and a :class:`DeltaTerm` ``(lam, j, A)`` denotes ``A(v2) (v2 d/dv2)^j
delta(lam*v2/v1)``; its expansion has coefficient ``n^j lam^n A[d]`` at
``v1^(-n) v2^(n+d)``.  Shifted kernels ``v1^(-1) delta(...)`` convert into this
form at the boundary (:func:`shifted_delta_term`).

The extraction operations work window-exactly: "zero" and "equal" always mean
on every coefficient of the certified window, and verdicts are only as strong
as the window they were computed on.  Callers choose windows large enough to
overdetermine the finitely parameterized structure being fitted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import power
from .series import (
    INF,
    NEG_INF,
    FactoredRational,
    InsufficientWindow,
    TruncatedSeries,
    UnboundedExponent,
    binom,
    binom_expand,
    diagonal_collapse,
    divide_linear,
    subst_log1p,
)


class NotDeltaSum(ValueError):
    """The series is not a delta sum over the given lambdas on its window."""


class SingularSystem(RuntimeError):
    """Generalized Vandermonde system was singular: distinct lambdas violated."""


class AnnihilationFails(ValueError):
    """p(v1/v2) does not annihilate the defect on the common window."""


class DiagonalDivergent(ValueError):
    """A diagonal coefficient needs values outside the certified window."""


class WindowTooSmall(ValueError):
    """The window cannot certify the requested vanishing order."""


@dataclass(frozen=True)
class DeltaTerm:
    """A(v2) (v2 d/dv2)^j delta(lam v2 / v1); ``coeff`` is a one-variable series."""

    lam: object
    j: int
    coeff: TruncatedSeries

    def scaled(self, c) -> "DeltaTerm":
        return DeltaTerm(self.lam, self.j, self.coeff.scaled(c))


@dataclass(frozen=True)
class FormalDistribution:
    """A regular two-variable part plus finitely many delta terms."""

    regular: TruncatedSeries
    deltas: tuple

    def __post_init__(self):
        keys = [(t.lam, t.j) for t in self.deltas]
        if len(set(map(repr, keys))) != len(keys):
            raise ValueError("delta terms must have pairwise distinct (lambda, j) keys")


def delta_expand(term: DeltaTerm, v1: str, v2: str, limits: dict) -> TruncatedSeries:
    """Expansion of a delta term on a finite v1-window.

    The v1 exponents of a delta kernel are unbounded in both directions, so
    the limits must pin v1 to a finite interval; the v2 window is whatever the
    coefficient series supports across that interval.
    """
    lo1, hi1 = limits[v1]
    if lo1 == NEG_INF or hi1 == INF:
        raise InsufficientWindow("delta expansion needs a finite v1 window")
    lo2, hi2 = limits.get(v2, (NEG_INF, INF))
    A = term.coeff
    if A.vars not in ((v2,), ()):
        raise ValueError(f"delta coefficient must be a series in {v2}")
    loA, hiA = A.win(v2) if A.vars else (NEG_INF, INF)
    win2 = (
        max(lo2, loA - lo1 if loA != NEG_INF else NEG_INF),
        min(hi2, hiA - hi1 if hiA != INF else INF),
    )
    coeffs = {}
    for n in range(int(-hi1), int(-lo1) + 1):
        wn = (n**term.j) * power(term.lam, n)
        if not wn:
            continue
        for e, c in A.coeffs.items():
            d = e[0] if e else 0
            x2 = n + d
            if win2[0] <= x2 <= win2[1]:
                val = wn * c
                if val:
                    key = (-n, x2) if v1 < v2 else (x2, -n)
                    s = coeffs.get(key, 0) + val
                    if s:
                        coeffs[key] = s
                    else:
                        coeffs.pop(key, None)
    vars = tuple(sorted((v1, v2)))
    window = {v1: (lo1, hi1), v2: win2}
    zero = not A.coeffs
    support = {
        v1: (INF, NEG_INF) if zero else (NEG_INF, INF),
        v2: (INF, NEG_INF) if zero else (NEG_INF, INF),
    }
    return TruncatedSeries(vars, coeffs, window, support)


def unit_coeff(v2: str, value=Fraction(1)) -> TruncatedSeries:
    return TruncatedSeries.exact((v2,), {(0,): value})


def shifted_delta_term(lam, v2: str, value=Fraction(1)) -> DeltaTerm:
    """v1^(-1) delta(lam v2/v1) in canonical form: (lam^-1 v2^-1) delta."""
    c = TruncatedSeries.exact((v2,), {(-1,): value * power(lam, -1)})
    return DeltaTerm(lam, 0, c)


class DeltaSum:
    """A finite sum of delta terms with the algebra needed to build predicted
    defects: scaling by Laurent series in v2, d/dv2, and v2 d/dv2."""

    def __init__(self, terms=()):
        self.terms = list(terms)

    def __add__(self, other: "DeltaSum") -> "DeltaSum":
        return DeltaSum(self.terms + other.terms)

    def scaled_series(self, s: TruncatedSeries) -> "DeltaSum":
        return DeltaSum([DeltaTerm(t.lam, t.j, t.coeff * s) for t in self.terms])

    def scaled(self, c) -> "DeltaSum":
        return DeltaSum([t.scaled(c) for t in self.terms])

    def d_dv2(self, v2: str) -> "DeltaSum":
        out = []
        for t in self.terms:
            out.append(DeltaTerm(t.lam, t.j, _series_derivative(t.coeff, v2)))
            out.append(DeltaTerm(t.lam, t.j + 1, t.coeff.shifted(**{v2: -1})))
        return DeltaSum(out)

    def merged(self) -> "DeltaSum":
        acc: list = []
        for t in self.terms:
            for i, u in enumerate(acc):
                if u.lam == t.lam and u.j == t.j:
                    acc[i] = DeltaTerm(u.lam, u.j, u.coeff + t.coeff)
                    break
            else:
                acc.append(t)
        return DeltaSum([t for t in acc if not t.coeff.is_zero_series()])

    def expand(self, v1: str, v2: str, limits: dict) -> TruncatedSeries:
        out = None
        for t in self.terms:
            e = delta_expand(t, v1, v2, limits)
            out = e if out is None else out + e
        if out is None:
            vars = tuple(sorted((v1, v2)))
            return TruncatedSeries(
                vars, {}, {v: limits.get(v, (NEG_INF, INF)) for v in vars},
                {v: (INF, NEG_INF) for v in vars},
            )
        return out


def _series_derivative(s: TruncatedSeries, v: str) -> TruncatedSeries:
    i = s.vars.index(v)
    coeffs = {}
    for e, c in s.coeffs.items():
        if e[i] == 0:
            continue
        key = tuple(x - 1 if k == i else x for k, x in enumerate(e))
        coeffs[key] = e[i] * c
    lo, hi = s.win(v)
    window = dict(s.window)
    window[v] = (lo - 1 if lo != NEG_INF else lo, hi - 1 if hi != INF else hi)
    return TruncatedSeries(s.vars, coeffs, window, s.support, s.region)


def laurent_annihilator(p: FactoredRational, v1: str, v2: str) -> TruncatedSeries:
    """p(v1/v2) as an exact two-variable Laurent polynomial (all mults > 0)."""
    if not p.is_laurent():
        raise ValueError("annihilator must be a polynomial in the ratio")
    out = TruncatedSeries.exact((v1, v2), {(p.mexp, -p.mexp): p.const})
    for r, m in p.factors:
        lin = {}
        for i in range(m + 1):
            c = binom(m, i) * power(-r, i)
            if c:
                lin[(m - i, i - m)] = c
        out = out * TruncatedSeries.exact((v1, v2), lin)
    return out


def annihilation_check(lam, k: int, j: int, v1: str, v2: str, limits: dict) -> bool:
    """(v1 - lam v2)^k (v2 d/dv2)^j delta(lam v2/v1) == 0 on the window?"""
    if k < 1:
        raise ValueError("k must be a positive integer")
    term = DeltaTerm(lam, j, unit_coeff(v2))
    e = delta_expand(term, v1, v2, limits)
    mult = laurent_annihilator(FactoredRational(Fraction(1), 0, ((lam, k),)), v1, v2)
    prod = (mult * e).shifted(**{v2: k})  # (v1/v2-lam)^k v2^k = (v1-lam v2)^k
    ok, _ = prod.is_zero_on_window()
    return ok


def substitute_diag(f: TruncatedSeries, t: DeltaTerm, v1: str, v2: str) -> DeltaTerm:
    """f(v1,v2) delta(v2/v1) = f(v2,v2) delta(v2/v1) for the plain kernel."""
    if t.j != 0 or t.lam != 1:
        raise ValueError("substitution rule applies to the j=0, lambda=1 kernel")
    try:
        diag = diagonal_collapse(f, v1, v2, 1)
    except UnboundedExponent as exc:
        raise DiagonalDivergent(str(exc)) from exc
    return DeltaTerm(t.lam, 0, t.coeff * diag)


def _scalar_inv(x):
    if isinstance(x, Fraction):
        return 1 / x
    if isinstance(x, int):
        return Fraction(1, x)
    return x.inverse()


def solve_exact(matrix, rhs):
    """Solve M x = rhs by Gaussian elimination; scalar M, payload rhs."""
    n = len(matrix)
    m = [list(row) for row in matrix]
    b = list(rhs)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            raise SingularSystem("pivot vanished; lambdas not distinct?")
        m[col], m[piv] = m[piv], m[col]
        b[col], b[piv] = b[piv], b[col]
        inv = _scalar_inv(m[col][col])
        m[col] = [inv * x for x in m[col]]
        b[col] = inv * b[col]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
                b[r] = b[r] - f * b[col]
    return b


def delta_fit(D: TruncatedSeries, lambdas, jmax: int, v1: str, v2: str):
    """Recover the unique delta-term list matching D on its whole window.

    Fits each diagonal offset d by solving sum_{i,j} a_ij n^j lam_i^n =
    D[v1^(-n) v2^(n+d)] on a consecutive run of n and validating on every
    remaining certified entry; raises NotDeltaSum when no delta sum matches,
    InsufficientWindow when a needed diagonal has too few certified entries.
    """
    lambdas = list(lambdas)
    if len({repr(l) for l in lambdas}) != len(lambdas) or any(not l for l in lambdas):
        raise ValueError("lambdas must be distinct and nonzero")
    L = len(lambdas) * (jmax + 1)
    lo1, hi1 = D.win(v1)
    lo2, hi2 = D.win(v2)
    if hi1 == INF:
        raise InsufficientWindow("delta fit needs a finite v1 ceiling")
    iv1, iv2 = D.vars.index(v1), D.vars.index(v2)

    params = [(l, j) for l in lambdas for j in range(jmax + 1)]

    def n_interval(d):
        lo = max(-hi1, (lo2 - d) if lo2 != NEG_INF else NEG_INF)
        hi = min((-lo1) if lo1 != NEG_INF else INF, (hi2 - d) if hi2 != INF else INF)
        return lo, hi

    stored_d = sorted({e[iv1] + e[iv2] for e in D.coeffs})
    cells = {}
    for e, c in D.coeffs.items():
        cells[(-e[iv1], e[iv1] + e[iv2])] = c

    def cell(n, d):
        return cells.get((n, d), 0)

    solutions: dict = {}
    for d in stored_d:
        nlo, nhi = n_interval(d)
        if nhi == INF:
            # infinitely many certified entries: no exponential-polynomial
            # other than zero matches a finitely supported diagonal
            raise NotDeltaSum(
                f"diagonal {d} has unbounded certified support with nonzero entries"
            )
        if nhi - nlo + 1 < L:
            raise InsufficientWindow(
                f"diagonal {d}: {int(max(nhi - nlo + 1, 0))} entries < {L} parameters"
            )
        rows = []
        rhs = []
        n0 = int(nlo)
        for n in range(n0, n0 + L):
            rows.append([(n**j) * power(l, n) for l, j in params])
            rhs.append(cell(n, d))
        sol = solve_exact(rows, rhs)
        # validate on every remaining certified entry of this diagonal
        for n in range(n0 + L, int(nhi) + 1):
            pred = 0
            for col, (l, j) in enumerate(params):
                a = sol[col]
                if not isinstance(a, int) or a:
                    w = (n**j) * power(l, n)
                    if w:
                        pred = pred + w * a
            if pred != cell(n, d):
                raise NotDeltaSum(f"diagonal {d} deviates from the fit at n = {n}")
        solutions[d] = sol

    # certified d-range for the recovered coefficient windows
    scan_lo = (lo1 + lo2) if (lo1 != NEG_INF and lo2 != NEG_INF) else (stored_d[0] - 1 if stored_d else 0)
    scan_hi = (hi1 + hi2) if hi2 != INF else (stored_d[-1] + 1 if stored_d else 0)
    cert = [d for d in range(int(scan_lo), int(scan_hi) + 1) if _len_ok(n_interval(d), L)]
    if cert:
        alo = NEG_INF if (lo1 == NEG_INF or lo2 == NEG_INF) and _len_ok(n_interval(cert[0] - 1), L) else cert[0]
        ahi = cert[-1]
    else:
        alo, ahi = 0, -1  # empty coefficient window
    out = []
    for col, (l, j) in enumerate(params):
        coeffs = {}
        for d, sol in solutions.items():
            if sol[col]:
                coeffs[(d,)] = sol[col]
        A = TruncatedSeries((v2,), coeffs, {v2: (alo, ahi)}, {v2: (NEG_INF, INF)})
        if not A.is_zero_series():
            out.append(DeltaTerm(l, j, A))
    return out


def _len_ok(iv, L):
    lo, hi = iv
    if lo == NEG_INF or hi == INF:
        return True
    return hi - lo + 1 >= L


def delta_decompose(
    a_b: TruncatedSeries, K: TruncatedSeries, p: FactoredRational, v1: str, v2: str
):
    """Split a_b - K into delta terms at the roots of the annihilator p.

    Checks p(v1/v2)(a_b - K) == 0 on the common window first; a NotDeltaSum
    from the fit afterwards contradicts the existence statement this
    implements and is re-raised as an internal inconsistency.
    """
    if not p.is_laurent() or any(m < 1 for _, m in p.factors):
        raise ValueError("annihilator must be a polynomial with positive multiplicities")
    D = a_b.untagged() - K.untagged()
    ann = laurent_annihilator(p, v1, v2)
    prod = ann * D
    ok, ce = prod.is_zero_on_window()
    if not ok:
        raise AnnihilationFails(f"p(v1/v2)(a_b - K) != 0 at {ce[0]}")
    if not p.factors:
        if not D.is_zero_on_window()[0]:
            raise AnnihilationFails("trivial annihilator with nonzero defect")
        return []
    jmax = max(m for _, m in p.factors) - 1
    try:
        return delta_fit(D, list(p.roots()), jmax, v1, v2)
    except NotDeltaSum as exc:
        raise NotDeltaSum(
            f"defect annihilated by p is not a delta sum (internal inconsistency): {exc}"
        ) from exc


def vanishing_order(A: TruncatedSeries, lam, v1: str, v2: str, max_order: int = 64) -> int:
    """Largest k with A = (v1 - lam v2)^k B and B(lam v2, v2) != 0, on windows."""
    ok, _ = A.is_zero_on_window()
    if ok:
        raise ValueError("vanishing order of the zero series is undefined")
    k = 0
    cur = A.untagged()
    while k <= max_order:
        try:
            diag = diagonal_collapse(cur, v1, v2, lam)
        except UnboundedExponent as exc:
            raise WindowTooSmall(str(exc)) from exc
        if diag.vars and diag.win(diag.vars[0])[1] == NEG_INF:
            raise WindowTooSmall("diagonal window collapsed before certifying the order")
        if not diag.is_zero_series():
            return k
        try:
            cur = divide_linear(cur, v1, v2, lam)
        except UnboundedExponent as exc:
            raise WindowTooSmall(str(exc)) from exc
        if cur.is_zero_series():
            raise WindowTooSmall("quotient vanished on the remaining window")
        k += 1
    raise WindowTooSmall(f"order exceeds {max_order}")


def three_term_check(
    A: TruncatedSeries,
    B: TruncatedSeries,
    C: TruncatedSeries,
    k: int,
    zorder: int,
    v1: str = "x1",
    v2: str = "x2",
    x0: str = "x0",
    zvar: str = "z",
) -> bool:
    """Compare the two sides of the three-term delta/log identity.

    LHS: (z v2)^-1 delta((v1-v2)/(z v2)) A - (z v2)^-1 delta((v2-v1)/(-z v2)) B;
    RHS: v1^-1 delta(v2(1+z)/v1) C(log(1+z), v2); both expanded as windowed
    three-variable series and compared coefficient-wise.  ``k`` is the
    hypothesis exponent; the caller guarantees the matching-product and
    substitution hypotheses when generating (A, B, C).
    """
    del k
    limitsA = {v: A.win(v) for v in A.vars}
    limitsB = {v: B.win(v) for v in B.vars}
    lhs = None
    for n in range(-zorder - 1, zorder):
        bn = binom_expand(n, v1, v2, (v1, v2), limitsA)
        term = (bn * A.untagged()).shifted(**{v2: -n - 1, zvar: -n - 1}).untagged()
        lhs = term if lhs is None else lhs + term
        bn2 = binom_expand(n, v2, v1, (v2, v1), limitsB)
        term2 = (bn2 * B.untagged()).shifted(**{v2: -n - 1, zvar: -n - 1}).untagged()
        lhs = lhs - term2.scaled(Fraction((-1) ** n))
    # RHS kernel: sum_m v1^(-m-1) v2^m (1+z)^m, truncated to the z-order
    csub = subst_log1p(C.untagged(), x0, zvar, zorder)
    lo1, hi1 = lhs.win(v1)
    if lo1 == NEG_INF:
        lo1 = min([e[lhs.vars.index(v1)] for e in lhs.coeffs], default=-zorder - 2) - 1
    if hi1 == INF:
        hi1 = max([e[lhs.vars.index(v1)] for e in lhs.coeffs], default=zorder) + 1
    kern = {}
    for m in range(int(-hi1) - 1, int(-lo1)):
        for i in range(0, zorder + 1):
            c = binom(m, i)
            if c:
                kern[(-m - 1, m, i)] = c
    out_vars = tuple(sorted((v1, v2, zvar)))
    kern_s = TruncatedSeries(
        out_vars,
        {_perm_key((v1, v2, zvar), e, out_vars): c for e, c in kern.items()},
        {v1: (lo1, hi1), v2: (NEG_INF, INF), zvar: (NEG_INF, zorder)},
        {v1: (NEG_INF, INF), v2: (NEG_INF, INF), zvar: (0, INF)},
    )
    rhs = kern_s * csub
    ok, _ = lhs.eq_on_common(rhs)
    return ok


def _perm_key(src_vars, exps, dst_vars):
    m = dict(zip(src_vars, exps))
    return tuple(m[v] for v in dst_vars)
