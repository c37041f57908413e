"""Mixed-norm functionals on phase-space fields and modulation norms.

A mixed norm splits the field's axes into an inner and an outer block,
takes a weighted power sum with exponent r over the inner block, then one
with exponent s over the outer block.  Infinite exponents are exact grid
maxima, never large-p approximations.

Axis weights are per-axis measure factors: h/sqrt(2*pi) on group axes and
(2*pi/L)/sqrt(2*pi) on frequency axes, independent of the representation
parameter.  With that convention the (2,2) modulation norm of a vector
equals ||f|| * ||window|| exactly, for every parameter value — the measure
factors are chosen to make the discrete orthogonality relation close.
"""

import math
from fractions import Fraction

import numpy as np

from .repspace import PhaseSpaceField
from .weyl import SymbolAmbiguityField, ambiguity, symbol_ambiguity, wigner

INFINITY = math.inf


def as_exponent(value):
    """Parse an exponent: a number, a Fraction, or the token 'inf'.
    Returns a Fraction, or math.inf for the infinite exponent."""
    if isinstance(value, str):
        if value.strip().lower() == "inf":
            return INFINITY
        value = Fraction(value)
    if value == INFINITY:
        return INFINITY
    e = Fraction(value)
    if e < 1:
        raise ValueError("exponent %s is below 1" % e)
    return e


def _reciprocal(e):
    return Fraction(0) if e == INFINITY else Fraction(1, 1) / e


class ExponentQuad:
    """The six exponents (r, s; r1, s1; r2, s2) of the product/boundedness
    statements, each in [1, inf]."""

    __slots__ = ("r", "s", "r1", "s1", "r2", "s2")

    def __init__(self, r, s, r1, s1, r2, s2):
        self.r = as_exponent(r)
        self.s = as_exponent(s)
        self.r1 = as_exponent(r1)
        self.s1 = as_exponent(s1)
        self.r2 = as_exponent(r2)
        self.s2 = as_exponent(s2)

    def __repr__(self):
        return "ExponentQuad(r=%s, s=%s, r1=%s, s1=%s, r2=%s, s2=%s)" % (
            self.r,
            self.s,
            self.r1,
            self.s1,
            self.r2,
            self.s2,
        )


def exponent_check(quad, mode):
    """Validate the exponent arithmetic for the named statement with exact
    rationals (1/inf = 0).  Returns (True, "") or (False, reason)."""
    r, s = quad.r, quad.s
    if mode == "wigner_thm":
        if not r <= s:
            return False, "needs r <= s, got r=%s, s=%s" % (r, s)
        for name in ("r1", "r2", "s1", "s2"):
            e = getattr(quad, name)
            if not (r <= e <= s):
                return False, "%s=%s outside [r, s] = [%s, %s]" % (name, e, r, s)
        target = _reciprocal(r) + _reciprocal(s)
        if _reciprocal(quad.r1) + _reciprocal(quad.r2) != target:
            return False, "1/r1 + 1/r2 != 1/r + 1/s"
        if _reciprocal(quad.s1) + _reciprocal(quad.s2) != target:
            return False, "1/s1 + 1/s2 != 1/r + 1/s"
        return True, ""
    if mode == "op_bound":
        if not r <= s:
            return False, "needs r <= s, got r=%s, s=%s" % (r, s)
        for name in ("r2", "s2"):
            e = getattr(quad, name)
            if not (r <= e <= s):
                return False, "%s=%s outside [r, s] = [%s, %s]" % (name, e, r, s)
        target = 1 - _reciprocal(r) - _reciprocal(s)
        if _reciprocal(quad.r1) - _reciprocal(quad.r2) != target:
            return False, "1/r1 - 1/r2 != 1 - 1/r - 1/s"
        if _reciprocal(quad.s1) - _reciprocal(quad.s2) != target:
            return False, "1/s1 - 1/s2 != 1 - 1/r - 1/s"
        return True, ""
    raise ValueError("unknown exponent mode %r" % mode)


class Decomposition:
    """A partition of a field's axes into the inner block and the outer
    block of the mixed norm.  Must be disjoint and exhaustive."""

    __slots__ = ("inner_axes", "outer_axes")

    def __init__(self, inner_axes, outer_axes, total):
        inner = tuple(int(a) for a in inner_axes)
        outer = tuple(int(a) for a in outer_axes)
        if sorted(inner + outer) != list(range(total)):
            raise ValueError(
                "axis blocks %r / %r do not partition %d axes" % (inner, outer, total)
            )
        self.inner_axes = inner
        self.outer_axes = outer


def _default_decomposition(field):
    d = field.spec.dim
    if isinstance(field, SymbolAmbiguityField):
        return Decomposition(range(2 * d), range(2 * d, 4 * d), 4 * d)
    return Decomposition(range(d), range(d, 2 * d), 2 * d)


def _axis_weights(field):
    """Per-axis measure factors, by axis kind."""
    spec = field.spec
    group_w = spec.h / math.sqrt(2.0 * math.pi)
    dual_w = spec.zeta_step / math.sqrt(2.0 * math.pi)
    d = spec.dim
    copies = 2 if isinstance(field, SymbolAmbiguityField) else 1
    return ([group_w] * d + [dual_w] * d) * copies


def mixed_power_norm(values, r, s, dec, axis_weights):
    """Weighted nested power sum over explicit axis blocks.  ``values`` is
    any complex/real array, ``axis_weights`` one scalar per axis."""
    r = as_exponent(r)
    s = as_exponent(s)
    mags = np.abs(np.asarray(values))
    order = dec.inner_axes + dec.outer_axes
    p_in = int(np.prod([mags.shape[a] for a in dec.inner_axes], dtype=np.int64))
    flat = np.transpose(mags, order).reshape(p_in, -1)
    if r == INFINITY:
        inner = flat.max(axis=0)
    else:
        w_in = float(np.prod([axis_weights[a] for a in dec.inner_axes]))
        inner = (np.sum(flat ** float(r), axis=0) * w_in) ** (1.0 / float(r))
    if s == INFINITY:
        return float(inner.max())
    w_out = float(np.prod([axis_weights[a] for a in dec.outer_axes]))
    return float((np.sum(inner ** float(s)) * w_out) ** (1.0 / float(s)))


def mixed_norm(field, r, s, dec=None):
    """Mixed L^{r,s} norm of a phase-space field (or an operator-window
    ambiguity field), inner block first.  Default split: group axes inside,
    frequency axes outside; for operator fields, first point inside,
    second point outside."""
    if dec is None:
        dec = _default_decomposition(field)
    return mixed_power_norm(field.values, r, s, dec, _axis_weights(field))


def mod_norm_vector(ctx, f, window, r, s, dec=None):
    """Modulation norm of a state: the mixed norm of its ambiguity field
    against the given window."""
    if not np.any(window.values):
        raise ValueError("modulation norm needs a nonzero window")
    return mixed_norm(ambiguity(ctx, f, window), r, s, dec)


def mod_norm_symbol(ctx, a, window1, window2, r, s, dec=None):
    """Modulation norm of a symbol: the mixed norm of its operator-window
    ambiguity against the quantized cross-distribution of the two windows,
    first phase-space point inside, second outside."""
    if not np.any(window1.values) or not np.any(window2.values):
        raise ValueError("modulation norm needs nonzero windows")
    b = wigner(ctx, window1, window2)
    return mixed_norm(symbol_ambiguity(ctx, a, b), r, s, dec)
