"""Nilpotent Lie algebras and their simply connected groups, realized in
exponential coordinates of the first kind.

In these coordinates the group *is* the underlying vector space and the
group law is the Baker-Campbell-Hausdorff (BCH) series, which terminates
because the algebra is nilpotent; exp and log are the identity on
coordinates.  Every operation below is therefore polynomial, and — with
`fractions.Fraction` coefficients — exact.

Contents:

- structure-constant specs with exact validation (antisymmetry, Jacobi,
  nilpotency step), plus a small registry: ``abelian:n`` (n <= 3),
  ``heisenberg`` (dim 3), ``engel`` (dim 4);
- the truncated Dynkin/BCH product, generic over the entry ring (Fractions,
  floats, or Polynomial entries for symbolic work);
- left translation of polynomial functions, the right-invariant vector
  field of an algebra direction, BCH segment averages and their unipotent
  inverses, and the pair substitutions built from them;
- spans of translated coordinate functionals and the semidirect structure
  (function space) x| (group), with nilpotency certification;
- the semidirect exponential and the group-square (double semidirect)
  operations.
"""

from fractions import Fraction
from functools import lru_cache
import itertools
import math

from .poly import Polynomial, PolyVector, poly_compose, poly_integrate_param, poly_partial


# ---------------------------------------------------------------------------
# exact linear algebra helpers (Fractions end to end)
# ---------------------------------------------------------------------------


def rref(rows):
    """Reduced row echelon form over Q.  Returns (rows, pivot_columns);
    input rows are not modified, zero rows are dropped."""
    work = [list(r) for r in rows]
    ncols = len(work[0]) if work else 0
    echelon = []
    pivots = []
    r = 0
    for col in range(ncols):
        pivot = None
        for i in range(r, len(work)):
            if work[i][col] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        inv = Fraction(1) / work[r][col]
        work[r] = [inv * v for v in work[r]]
        for i in range(len(work)):
            if i != r and work[i][col] != 0:
                f = work[i][col]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        pivots.append(col)
        r += 1
        if r == len(work):
            break
    return [row for row in work[:r]], pivots


def exact_rank(rows):
    if not rows:
        return 0
    return len(rref(rows)[0])


def solve_exact(columns, target):
    """Solve sum_j x_j * columns[j] = target exactly over Q.

    Returns the coefficient list, or None when the target is outside the
    span.  ``columns`` is a list of equal-length Fraction vectors.
    """
    n = len(columns)
    if n == 0:
        return [] if all(v == 0 for v in target) else None
    m = len(columns[0])
    aug = [[columns[j][i] for j in range(n)] + [target[i]] for i in range(m)]
    ech, pivots = rref(aug)
    if n in pivots:  # pivot in the augmented column: inconsistent
        return None
    x = [Fraction(0)] * n
    for row, col in zip(ech, pivots):
        x[col] = row[n]
    return x


def monomials_up_to(nvars, degree):
    """All exponent tuples of total degree <= degree, in degree-lex order."""
    out = []
    for d in range(degree + 1):
        for bars in itertools.combinations(range(d + nvars - 1), nvars - 1):
            e = []
            prev = -1
            for b in bars:
                e.append(b - prev - 1)
                prev = b
            e.append(d + nvars - 2 - prev)
            out.append(tuple(e))
    return out


def poly_coeff_rows(polys, monos):
    index = {m: i for i, m in enumerate(monos)}
    rows = []
    for p in polys:
        row = [Fraction(0)] * len(monos)
        for e, c in p.terms.items():
            if e not in index:
                raise ValueError("monomial %r outside the chosen degree cap" % (e,))
            row[index[e]] = c
        rows.append(row)
    return rows


def _poly_from_row(nvars, monos, row):
    return Polynomial(nvars, {m: c for m, c in zip(monos, row) if c != 0})


# ---------------------------------------------------------------------------
# Lie algebra specifications and the registry
# ---------------------------------------------------------------------------


class LieAlgebraSpec:
    """Structure constants c[i][j][k] for [e_i, e_j] = sum_k c[i][j][k] e_k,
    with the nilpotency step.  Validated exactly on construction."""

    __slots__ = ("dim", "structure", "step", "name")

    def __init__(self, dim, structure, step, name=""):
        structure = tuple(
            tuple(tuple(Fraction(c) for c in row) for row in plane)
            for plane in structure
        )
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "structure", structure)
        object.__setattr__(self, "step", int(step))
        object.__setattr__(self, "name", name)
        self._validate()

    def __setattr__(self, name, value):
        raise AttributeError("LieAlgebraSpec is immutable")

    def __eq__(self, other):
        if not isinstance(other, LieAlgebraSpec):
            return NotImplemented
        return (self.dim, self.structure, self.step) == (
            other.dim,
            other.structure,
            other.step,
        )

    def __hash__(self):
        return hash((self.dim, self.structure, self.step))

    def __repr__(self):
        return "LieAlgebraSpec(%r, dim=%d, step=%d)" % (self.name, self.dim, self.step)

    def _validate(self):
        d = self.dim
        if len(self.structure) != d or any(
            len(p) != d or any(len(r) != d for r in p) for p in self.structure
        ):
            raise ValueError("structure constants must form a dim^3 array")
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    if self.structure[i][j][k] != -self.structure[j][i][k]:
                        raise ValueError("structure constants not antisymmetric")
        basis = [
            [Fraction(1) if i == j else Fraction(0) for j in range(d)] for i in range(d)
        ]
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    lhs = self.bracket(self.bracket(basis[i], basis[j]), basis[k])
                    mid = self.bracket(self.bracket(basis[j], basis[k]), basis[i])
                    rhs = self.bracket(self.bracket(basis[k], basis[i]), basis[j])
                    if any(a + b + c != 0 for a, b, c in zip(lhs, mid, rhs)):
                        raise ValueError("Jacobi identity fails at (%d,%d,%d)" % (i, j, k))
        series = self.lower_central_series()
        if len(series) != self.step:
            raise ValueError(
                "declared step %d but the lower central series has %d nonzero layers"
                % (self.step, len(series))
            )

    def bracket(self, X, Y):
        """[X, Y] for vectors over any ring containing the rationals
        (Fractions, floats, complexes, Polynomials)."""
        X = list(X)
        Y = list(Y)
        if len(X) != self.dim or len(Y) != self.dim:
            raise ValueError("bracket arguments must have length %d" % self.dim)
        out = [0 * x for x in X] if X else []
        for i in range(self.dim):
            xi = X[i]
            if isinstance(xi, (int, float, complex, Fraction)) and xi == 0:
                continue
            for j in range(self.dim):
                yj = Y[j]
                if isinstance(yj, (int, float, complex, Fraction)) and yj == 0:
                    continue
                row = self.structure[i][j]
                prod = None
                for k in range(self.dim):
                    c = row[k]
                    if c == 0:
                        continue
                    if prod is None:
                        prod = xi * yj
                    out[k] = out[k] + _scale(c, prod)
        return out

    def lower_central_series(self):
        """[g, g], [g, [g, g]], ... as rref bases; returns the list of
        nonzero layers g = m_1 > m_2 > ... (stops at the first zero)."""
        d = self.dim
        basis = [[Fraction(1) if i == j else Fraction(0) for j in range(d)] for i in range(d)]
        layers = [basis]
        current = basis
        while True:
            nxt = []
            for b in basis:
                for v in current:
                    nxt.append(self.bracket(b, v))
            ech, _ = rref(nxt) if nxt else ([], [])
            if not ech:
                return layers
            layers.append(ech)
            current = ech
            if len(layers) > d + 1:
                raise ValueError(
                    "structure constants do not define a nilpotent algebra "
                    "(lower central series stabilizes at a nonzero subspace)"
                )

    def to_json_dict(self):
        return {
            "name": self.name,
            "dim": self.dim,
            "step": self.step,
            "structure": [
                [["%d/%d" % (c.numerator, c.denominator) for c in row] for row in plane]
                for plane in self.structure
            ],
        }


def _scale(c, v):
    """c * v with c rational; exact for exact rings, float otherwise."""
    if isinstance(v, (Polynomial, Fraction, int)):
        return c * v
    return float(c) * v


def _structure_from_brackets(dim, pairs):
    """Build the dense c[i][j][k] array from {(i, j): {k: coeff}} with i<j."""
    c = [[[Fraction(0) for _ in range(dim)] for _ in range(dim)] for _ in range(dim)]
    for (i, j), comps in pairs.items():
        for k, v in comps.items():
            c[i][j][k] = Fraction(v)
            c[j][i][k] = -Fraction(v)
    return c


@lru_cache(maxsize=None)
def algebra(name):
    """Registry lookup: ``abelian:n`` (n <= 3), ``heisenberg``, ``engel``."""
    if name.startswith("abelian:"):
        n = int(name.split(":", 1)[1])
        if not 1 <= n <= 3:
            raise ValueError("abelian registry covers dimensions 1..3, got %d" % n)
        return LieAlgebraSpec(n, _structure_from_brackets(n, {}), 1, name)
    if name == "heisenberg":
        c = _structure_from_brackets(3, {(0, 1): {2: 1}})
        return LieAlgebraSpec(3, c, 2, name)
    if name == "engel":
        c = _structure_from_brackets(4, {(0, 1): {2: 1}, (0, 2): {3: 1}})
        return LieAlgebraSpec(4, c, 3, name)
    raise ValueError("unknown algebra %r (try abelian:n, heisenberg, engel)" % name)


def registry_names():
    return ["abelian:1", "abelian:2", "abelian:3", "heisenberg", "engel"]


# ---------------------------------------------------------------------------
# BCH product (truncated Dynkin series)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _dynkin_words(step):
    """(coefficient, word) pairs of the Dynkin series up to bracket depth
    ``step``; word letters are 0 for the left factor, 1 for the right."""
    out = []

    def extend(blocks, weight):
        if blocks:
            n = len(blocks)
            coeff = Fraction((-1) ** (n - 1), n * weight)
            for p, q in blocks:
                coeff /= math.factorial(p) * math.factorial(q)
            word = []
            for p, q in blocks:
                word.extend([0] * p)
                word.extend([1] * q)
            out.append((coeff, tuple(word)))
        for p in range(step - weight + 1):
            for q in range(step - weight - p + 1):
                if p + q == 0:
                    continue
                extend(blocks + [(p, q)], weight + p + q)

    extend([], 0)
    return tuple(out)


def bch_product(alg, X, Y):
    """The group product X * Y = log(exp X exp Y) via the Dynkin series,
    truncated at the nilpotency step (exact: deeper brackets vanish).

    Entries may be Fractions (exact), floats, or Polynomials (symbolic).
    """
    X = list(X)
    Y = list(Y)
    if len(X) != alg.dim or len(Y) != alg.dim:
        raise ValueError("group points must have length %d" % alg.dim)
    letters = {0: X, 1: Y}
    total = None
    for coeff, word in _dynkin_words(alg.step):
        vec = letters[word[-1]]
        for letter in reversed(word[:-1]):
            vec = alg.bracket(letters[letter], vec)
        scaled = [_scale(coeff, v) for v in vec]
        total = scaled if total is None else [a + b for a, b in zip(total, scaled)]
    return total


def group_inverse(alg, X):
    """Inverse in exponential coordinates is the negative: X * (-X) = 0."""
    return [-x for x in X]


@lru_cache(maxsize=None)
def bch_symbolic(alg):
    """The group law as an exact PolyVector in 2*dim variables
    (x_0..x_{d-1}, y_0..y_{d-1})."""
    d = alg.dim
    X = [Polynomial.var(2 * d, i) for i in range(d)]
    Y = [Polynomial.var(2 * d, d + i) for i in range(d)]
    return PolyVector(bch_product(alg, X, Y))


# ---------------------------------------------------------------------------
# translation action on polynomial functions
# ---------------------------------------------------------------------------


class GroupElement:
    """A group point in exponential coordinates (thin wrapper; most
    operations accept any coordinate sequence)."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        object.__setattr__(self, "coords", tuple(coords))

    def __setattr__(self, name, value):
        raise AttributeError("GroupElement is immutable")

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __eq__(self, other):
        if isinstance(other, GroupElement):
            return self.coords == other.coords
        return NotImplemented

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return "GroupElement(%r)" % (list(self.coords),)


def _coords(g):
    return list(g.coords) if isinstance(g, GroupElement) else list(g)


def left_translation_map(alg, g):
    """The polynomial map y -> (-g) * y (the argument substitution of left
    translation by g).  Entries of g may be exact or symbolic."""
    gc = _coords(g)
    d = alg.dim
    if gc and isinstance(gc[0], Polynomial):
        n = gc[0].nvars
        Y = [Polynomial.var(n, i) for i in range(d)]
        neg = [-c for c in gc]
    else:
        Y = [Polynomial.var(d, i) for i in range(d)]
        neg = [Polynomial.const(d, -Fraction(c)) for c in gc]
    return PolyVector(bch_product(alg, neg, Y))


def left_translate_poly(alg, g, p):
    """Left regular action on functions: (translate_g p)(y) = p((-g) * y)."""
    if p.nvars != alg.dim:
        raise ValueError("polynomial lives on %d variables, group has %d" % (p.nvars, alg.dim))
    return poly_compose(p, left_translation_map(alg, g))


def right_invariant_field(alg, X):
    """The right-invariant vector field of the direction X: its value at g
    is d/dt|_0 of (exp(tX) * g), as an exact PolyVector on the group."""
    d = alg.dim
    Xc = _coords(X)
    # variables: g_0..g_{d-1}, then the curve parameter t (last)
    t = Polynomial.var(d + 1, d)
    tX = [_as_poly_const(d + 1, c) * t for c in Xc]
    G = [Polynomial.var(d + 1, i) for i in range(d)]
    curve = bch_product(alg, tX, G)
    comps = []
    for comp in curve:
        dt = poly_partial(comp, d)
        at0 = Polynomial(d, {e[:-1]: c for e, c in dt.terms.items() if e[-1] == 0})
        comps.append(at0)
    return PolyVector(comps)


def _as_poly_const(nvars, c):
    return Polynomial.const(nvars, Fraction(c))


# ---------------------------------------------------------------------------
# BCH segment averages and the pair substitutions built from them
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def bch_average_symbolic(alg):
    """The map (Y, X) -> integral over s in [0,1] of Y * (sX), as an exact
    PolyVector in 2*dim variables (y's first, then x's)."""
    d = alg.dim
    n = 2 * d + 1  # y_0..y_{d-1}, x_0..x_{d-1}, s (s last for integration)
    s = Polynomial.var(n, n - 1)
    Y = [Polynomial.var(n, i) for i in range(d)]
    sX = [Polynomial.var(n, d + i) * s for i in range(d)]
    prod = bch_product(alg, Y, sX)
    return PolyVector([poly_integrate_param(comp) for comp in prod])


def bch_average_map(alg, X):
    """Y -> integral over [0,1] of Y * (sX), a unipotent polynomial map of Y."""
    d = alg.dim
    Xc = [Fraction(c) for c in _coords(X)]
    subs = PolyVector(
        [Polynomial.var(d, i) for i in range(d)]
        + [Polynomial.const(d, c) for c in Xc]
    )
    return bch_average_symbolic(alg).compose(subs)


def invert_unipotent(pmap, nfixed=0):
    """Invert a polynomial map that is identity + higher-order part in its
    first block of variables, the remaining ``nfixed`` variables being
    carried along unchanged.  Iterates Z <- id - N(Z) which stabilizes for
    unipotent maps; guarded against non-termination."""
    n = pmap.nvars
    d = len(pmap)
    if d + nfixed != n:
        raise ValueError("map must have one component per non-fixed variable")
    ident = [Polynomial.var(n, i) for i in range(d)]
    tail = [Polynomial.var(n, d + i) for i in range(nfixed)]
    nil_part = [comp - ident[i] for i, comp in enumerate(pmap)]
    Z = list(ident)
    for _ in range(64):
        composed = [poly_compose(c, PolyVector(Z + tail)) for c in nil_part]
        new_Z = [ident[i] - composed[i] for i in range(d)]
        if new_Z == Z:
            return PolyVector(Z)
        Z = new_Z
    raise RuntimeError("unipotent inverse iteration failed to stabilize")


def bch_average_inverse(alg, X):
    """Exact inverse of bch_average_map(alg, X); both compositions are the
    identity (checked cheaply in tests, not at call time)."""
    return invert_unipotent(bch_average_map(alg, X))


def substitution_maps(alg):
    """The two pair substitutions on g x g used to untangle products of
    translated windows, plus the exact inverse of the second:

    - ``twist``:        (Y, Z) -> (-Y, Y * (-Z))
    - ``average``:      (V, W) -> (-avg_W(V), W)
    - ``average_inv``:  (Y, X) -> (avg_X^{-1}(-Y), X)

    where avg_X is bch_average_map.  Returned as PolyVectors in 2*dim
    variables (first block, then second block).
    """
    d = alg.dim
    n = 2 * d
    first = [Polynomial.var(n, i) for i in range(d)]
    second = [Polynomial.var(n, d + i) for i in range(d)]

    twist = PolyVector([-p for p in first] + bch_product(alg, first, [-p for p in second]))

    avg = bch_average_symbolic(alg)  # (y's, x's)
    avg_VW = avg.compose(PolyVector(first + second))
    average = PolyVector([-p for p in avg_VW] + second)

    inv_first = invert_unipotent(avg, nfixed=d)  # inverse in the y-block, x fixed
    inv_at_negY = inv_first.compose(PolyVector([-p for p in first] + second))
    average_inv = PolyVector(list(inv_at_negY) + second)
    return twist, average, average_inv


# ---------------------------------------------------------------------------
# spans of translated coordinate functionals
# ---------------------------------------------------------------------------


class FunctionSpaceBasis:
    """A finite-dimensional space of polynomial functions on the group,
    stored as an exact echelonized basis.  Instances are produced by
    build_translate_span (the minimal translation-invariant space) or by
    closing a user-supplied seed set."""

    def __init__(self, alg, basis, cap_degree):
        self.alg = alg
        self.basis = tuple(basis)
        self.cap_degree = int(cap_degree)
        self._monos = monomials_up_to(alg.dim, cap_degree)
        self._rows = poly_coeff_rows(self.basis, self._monos)
        ech, pivots = rref(self._rows)
        if len(ech) != len(self.basis):
            raise ValueError("basis polynomials are linearly dependent")
        self.contains_constants = self.in_span(Polynomial.const(alg.dim, 1)) is not None

    @property
    def dim(self):
        return len(self.basis)

    def in_span(self, p):
        """Exact coordinates of p in this basis, or None if outside."""
        if p.nvars != self.alg.dim:
            raise ValueError("polynomial has %d variables, expected %d" % (p.nvars, self.alg.dim))
        if p.degree() > self.cap_degree:
            return None
        target = [Fraction(0)] * len(self._monos)
        index = {m: i for i, m in enumerate(self._monos)}
        for e, c in p.terms.items():
            target[index[e]] = c
        return solve_exact(self._rows, target)


def close_under_translates(alg, seeds, cap_degree):
    """Smallest translation-stable span containing ``seeds``: repeatedly
    translate by symbolic one-parameter subgroups along every basis
    direction, split off the parameter-coefficient polynomials, and keep
    what enlarges the span.  Degree growth is bounded (translation cannot
    raise degree past the cap for the spaces used here), so this stops."""
    d = alg.dim
    monos = monomials_up_to(d, cap_degree)
    index = {m: i for i, m in enumerate(monos)}

    def vec_of(p):
        row = [Fraction(0)] * len(monos)
        for e, c in p.terms.items():
            row[index[e]] = c
        return row

    span_rows = []
    basis_polys = []
    queue = []

    def try_add(p):
        if p.is_zero():
            return False
        if p.degree() > cap_degree:
            # a needed translate escaped the cap: the closure is not
            # realizable at this degree, which callers must hear about
            raise ClosureError(
                "translation closure produced degree %d above the cap %d"
                % (p.degree(), cap_degree)
            )
        candidate = span_rows + [vec_of(p)]
        if exact_rank(candidate) > len(span_rows):
            ech, _ = rref(candidate)
            span_rows.clear()
            span_rows.extend(ech)
            basis_polys.append(p)
            queue.append(p)
            return True
        return False

    for p in seeds:
        try_add(p)

    while queue:
        p = queue.pop()
        lifted_vars = [Polynomial.var(d + 1, i) for i in range(d)]
        for direction in range(d):
            a = Polynomial.var(d + 1, d)
            g_sym = [a if i == direction else Polynomial.zero(d + 1) for i in range(d)]
            moved = poly_compose(
                p,
                PolyVector(
                    bch_product(alg, [-c for c in g_sym], lifted_vars)
                ),
            )
            for piece in _split_by_last_var(moved).values():
                try_add(piece)

    # canonical echelon basis (degree-lex pivots): nicer to read and stable
    ech, _ = rref(span_rows)
    basis = [_poly_from_row(d, monos, row) for row in ech]
    return FunctionSpaceBasis(alg, basis, cap_degree)


def _split_by_last_var(p):
    """Group the terms of p by the exponent of its last variable; values
    are polynomials in the remaining variables."""
    buckets = {}
    for e, c in p.terms.items():
        buckets.setdefault(e[-1], {})[e[:-1]] = c
    return {k: Polynomial(p.nvars - 1, t) for k, t in buckets.items()}


def build_translate_span(alg):
    """The span of all left translates of the linear coordinate functionals
    — the minimal admissible function space over this group.  Contains the
    constants and all linear functionals; dimension is recorded by callers,
    not asserted here (no closed form is assumed beyond step 2)."""
    d = alg.dim
    seeds = [Polynomial.var(d, i) for i in range(d)]
    return close_under_translates(alg, seeds, cap_degree=alg.step ** 2)


# ---------------------------------------------------------------------------
# semidirect structure: (function space) x| (group)
# ---------------------------------------------------------------------------


class SemidirectElement:
    """A pair (phi, x): a function-space element and a group point.  The
    product is (phi1, x1)(phi2, x2) = (phi1 + translate_{x1} phi2, x1 * x2)."""

    __slots__ = ("phi", "x")

    def __init__(self, phi, x):
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "x", tuple(x))

    def __setattr__(self, name, value):
        raise AttributeError("SemidirectElement is immutable")

    def __eq__(self, other):
        if not isinstance(other, SemidirectElement):
            return NotImplemented
        return self.phi == other.phi and self.x == other.x

    def __repr__(self):
        return "SemidirectElement(%r, %r)" % (self.phi, list(self.x))


def sd_identity(alg):
    return SemidirectElement(Polynomial.zero(alg.dim), (Fraction(0),) * alg.dim)


def sd_product(alg, m1, m2):
    phi = m1.phi + left_translate_poly(alg, m1.x, m2.phi)
    return SemidirectElement(phi, bch_product(alg, list(m1.x), list(m2.x)))


def sd_inverse(alg, m):
    ginv = group_inverse(alg, list(m.x))
    return SemidirectElement(-left_translate_poly(alg, ginv, m.phi), ginv)


def infinitesimal_translate(alg, X, p):
    """d/dt at t=0 of (translate_{exp(tX)} p): the generator of the
    translation action on functions."""
    d = alg.dim
    t = Polynomial.var(d + 1, d)
    g_sym = [t * _as_poly_const(d + 1, c) for c in _coords(X)]
    moved = poly_compose(
        p, PolyVector(bch_product(alg, [-c for c in g_sym], [Polynomial.var(d + 1, i) for i in range(d)]))
    )
    pieces = _split_by_last_var(moved)
    return pieces.get(1, Polynomial.zero(d))


class ClosureError(ValueError):
    """A function space was not stable under the translation generators."""


def semidirect_nilpotency_check(alg, F):
    """Assemble the Lie algebra of (span F) x| g with exact structure
    constants, certify Jacobi, and compute its lower central series.

    Returns (structure_constants, step, is_nilpotent) where the structure
    constants are indexed over the combined basis: F's basis first, then
    the group directions.
    """
    d = alg.dim
    k = F.dim
    n = k + d
    basis_dirs = [
        [Fraction(1) if i == j else Fraction(0) for j in range(d)] for i in range(d)
    ]
    # generator action on each function-space basis element, in F-coordinates
    action = []  # action[i][a] = coords of generator_i . phi_a
    for i in range(d):
        row = []
        for a, phi in enumerate(F.basis):
            moved = infinitesimal_translate(alg, basis_dirs[i], phi)
            coords = F.in_span(moved)
            if coords is None:
                raise ClosureError(
                    "function space not closed under translation generator %d: "
                    "image of basis element %d (%r) leaves the span" % (i, a, phi)
                )
            row.append(coords)
        action.append(row)

    structure = [[[Fraction(0) for _ in range(n)] for _ in range(n)] for _ in range(n)]
    # [gen_i, phi_a] = action[i][a];  [phi, phi'] = 0;  [gen_i, gen_j] = algebra bracket
    for i in range(d):
        for a in range(k):
            for b in range(k):
                structure[k + i][a][b] = action[i][a][b]
                structure[a][k + i][b] = -action[i][a][b]
    for i in range(d):
        for j in range(d):
            br = alg.bracket(basis_dirs[i], basis_dirs[j])
            for m in range(d):
                structure[k + i][k + j][k + m] = Fraction(br[m])

    semi = _RawAlgebra(n, structure)
    semi.check_jacobi()
    series = semi.lower_central_series()
    step = len(series)
    is_nilpotent = semi.series_terminated
    return structure, step, is_nilpotent


class _RawAlgebra:
    """Bracket/series helper for structure constants that have not been
    certified nilpotent yet (LieAlgebraSpec insists on a verified step)."""

    def __init__(self, dim, structure):
        self.dim = dim
        self.structure = structure
        self.series_terminated = False

    def bracket(self, X, Y):
        out = [Fraction(0)] * self.dim
        for i in range(self.dim):
            if X[i] == 0:
                continue
            for j in range(self.dim):
                if Y[j] == 0:
                    continue
                prod = X[i] * Y[j]
                for m in range(self.dim):
                    c = self.structure[i][j][m]
                    if c != 0:
                        out[m] += c * prod
        return out

    def check_jacobi(self):
        d = self.dim
        basis = [
            [Fraction(1) if i == j else Fraction(0) for j in range(d)] for i in range(d)
        ]
        for i in range(d):
            for j in range(i + 1, d):
                for m in range(j + 1, d):
                    s1 = self.bracket(self.bracket(basis[i], basis[j]), basis[m])
                    s2 = self.bracket(self.bracket(basis[j], basis[m]), basis[i])
                    s3 = self.bracket(self.bracket(basis[m], basis[i]), basis[j])
                    if any(a + b + c != 0 for a, b, c in zip(s1, s2, s3)):
                        raise ValueError(
                            "assembled semidirect algebra violates Jacobi at (%d,%d,%d)"
                            % (i, j, m)
                        )

    def lower_central_series(self):
        d = self.dim
        basis = [
            [Fraction(1) if i == j else Fraction(0) for j in range(d)] for i in range(d)
        ]
        layers = [basis]
        current = basis
        for _ in range(d + 1):
            nxt = [self.bracket(b, v) for b in basis for v in current]
            ech, _ = rref(nxt) if nxt else ([], [])
            if not ech:
                self.series_terminated = True
                return layers
            layers.append(ech)
            current = ech
        self.series_terminated = False
        return layers


def exp_semidirect(alg, F, phi, X):
    """Exponential of the semidirect algebra element (phi, X): the function
    part is the exact average over u in [0,1] of translate_{exp(uX)} phi,
    the group part is X itself (first-kind coordinates)."""
    if F.in_span(phi) is None:
        raise ValueError("function part is outside the admissible span")
    d = alg.dim
    Xc = [Fraction(c) for c in _coords(X)]
    u = Polynomial.var(d + 1, d)
    g_sym = [u * _as_poly_const(d + 1, c) for c in Xc]
    moved = poly_compose(
        phi,
        PolyVector(
            bch_product(alg, [-c for c in g_sym], [Polynomial.var(d + 1, i) for i in range(d)])
        ),
    )
    averaged = poly_integrate_param(moved)
    return SemidirectElement(averaged, Xc)


# ---------------------------------------------------------------------------
# the group square: pairs of semidirect elements with a twisted product
# ---------------------------------------------------------------------------


def square_product(alg, pair1, pair2):
    """(m1, m2)(n1, n2) = (m1 n1, n1^{-1} m2 n1 n2) — the twisted product on
    pairs that carries conjugation-covariant data."""
    m1, m2 = pair1
    n1, n2 = pair2
    n1_inv = sd_inverse(alg, n1)
    left = sd_product(alg, m1, n1)
    right = sd_product(alg, sd_product(alg, sd_product(alg, n1_inv, m2), n1), n2)
    return (left, right)


def square_untwist(alg, pair):
    """(m1, m2) -> (m1 m2, m1): turns the twisted pair product into the
    plain componentwise product (an isomorphism onto the direct square)."""
    m1, m2 = pair
    return (sd_product(alg, m1, m2), m1)


def square_untwist_inverse(alg, pair):
    a, b = pair
    return (b, sd_product(alg, sd_inverse(alg, b), a))


def exp_square(alg, F, elt1, elt2):
    """Exponential of the pair algebra: ((phiX, X), (phiY, Y)) maps to
    (exp(X), exp(-X) exp(X+Y)) with all exponentials semidirect."""
    phiX, X = elt1
    phiY, Y = elt2
    eX = exp_semidirect(alg, F, phiX, X)
    eXneg = sd_inverse(alg, eX)
    eXY = exp_semidirect(alg, F, phiX + phiY, [a + b for a, b in zip(_coords(X), _coords(Y))])
    return (eX, sd_product(alg, eXneg, eXY))
