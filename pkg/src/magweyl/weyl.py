"""Localized magnetic Weyl calculus on the discretized phase space.

Conventions (all enforced by tests, none assumed):

- ``ambiguity(f, w)(Z) = (f | Pi(Z) w)``, a field on side Xi, where Pi(Z)
  is the representation of the exponential of the lifted phase-space point.
- ``wigner = ft_symbol(ambiguity)``: the matching distribution on the dual
  side XiStar.
- ``quantize(a) = sum_Z ift_symbol(a)(Z) Pi(Z) dXi``.  With the lattice
  dual steps of GridSpec the family {Pi(Z)} over the phase-space lattice is
  exactly Frobenius-orthogonal with squared norm N^d, which makes the
  constant symbol quantize to the identity, a pure lattice harmonic
  quantize to the corresponding Pi(Z0), and quantize/dequantize exact
  mutual inverses — for every value of the representation parameter and
  every polynomial potential.
- ``dequantize(T) = ft_symbol(Z -> |eps|^d (T | Pi(Z))_HS)``.
- At |eps| = 1 the rank-one rule Op(wigner(f, w)) = f (x) conj(w) is exact;
  general eps carries a factor |eps|^(-d) in the rank-one/orthogonality
  identities (the quantization pair stays exactly inverse regardless).

Two independent computational routes exist for the ambiguity transform and
are kept apart deliberately: the representation route (translation-averaged
phases out of the semidirect exponential) and the closed-formula route
(segment phase exponent plus the unipotent average map and its inverse).
Tests and the verification suite compare them; neither calls the other.
"""

import math
from fractions import Fraction
from functools import reduce

import numpy as np

from .magnetic import (
    MagneticPotential,
    admissible_space,
    magnetic_phase_exponent,
    pair_with_right_field,
    phase_space_lift,
)
from .nilpotent import (
    bch_average_inverse,
    bch_average_map,
    bch_symbolic,
    exp_semidirect,
    left_translation_map,
)
from .repspace import (
    SIDE_XI,
    SIDE_XISTAR,
    HSOperator,
    NumPoly,
    PhaseSpaceField,
    StateVector,
    apply_rep_exp,
    eval_poly_grid,
    ft_symbol,
    gaussian_state,
    ift_symbol,
    inner_product,
    lattice_shift_indices,
)


class QuantizerContext:
    """Precomputed machinery for one (grid, potential) pair: the admissible
    function space, the default window, and per-translation caches of the
    averaged phases both calculus routes need."""

    def __init__(self, spec, potential=None, window=None):
        d = spec.dim
        if potential is None:
            potential = MagneticPotential.zero(d)
        if potential.dim != d:
            raise ValueError(
                "potential lives in dimension %d, grid in %d" % (potential.dim, d)
            )
        self.spec = spec
        self.potential = potential
        self.space = admissible_space(spec.group, potential)
        self.window = window if window is not None else gaussian_state(spec)
        self.h_exact = Fraction(spec.extent) / spec.n_axis
        self._avg_pairing = {}
        self._segment_exponent = {}

    def lattice_point(self, steps):
        return [Fraction(s) * self.h_exact for s in steps]

    def averaged_pairing(self, steps):
        """Representation route: the potential pairing averaged over the
        translation segment, through the semidirect exponential."""
        steps = tuple(steps)
        if steps not in self._avg_pairing:
            if self.potential.is_zero():
                self._avg_pairing[steps] = None
            else:
                X = self.lattice_point(steps)
                pairing = pair_with_right_field(self.spec.group, self.potential, X)
                m = exp_semidirect(self.spec.group, self.space, pairing, X)
                self._avg_pairing[steps] = m.phi
        return self._avg_pairing[steps]

    def segment_exponent(self, steps):
        """Formula route: the magnetic phase exponent accumulated along the
        product segment (never consults the semidirect exponential)."""
        steps = tuple(steps)
        if steps not in self._segment_exponent:
            if self.potential.is_zero():
                self._segment_exponent[steps] = None
            else:
                X = self.lattice_point(steps)
                self._segment_exponent[steps] = magnetic_phase_exponent(
                    self.spec.group, self.potential, X
                )
        return self._segment_exponent[steps]

    def magnetic_phase(self, steps, sign, route="rep"):
        """exp(sign * i * eps * averaged phase) on the grid, or None when
        the potential vanishes."""
        poly = (
            self.averaged_pairing(steps)
            if route == "rep"
            else self.segment_exponent(steps)
        )
        if poly is None:
            return None
        vals = eval_poly_grid(self.spec, poly)
        return np.exp(sign * 1j * self.spec.epsilon * vals)


def _require_grid(spec, what):
    if spec.backend != "grid":
        raise ValueError("%s needs the grid backend" % what)


def _sign_kernel(spec):
    """Per-axis matrix exp(-i eps xi_k x_j); the epsilon scaling of the
    frequency lattice reduces it to one shared N-point harmonic matrix."""
    E = spec.harmonic_matrix()
    return E if spec.epsilon > 0 else np.conj(E)


def _tensor_apply(mats, arr):
    out = arr
    for axis, m in enumerate(mats):
        out = np.moveaxis(np.tensordot(m, out, axes=([1], [axis])), 0, axis)
    return out


def _half_shift_prefactor(spec, x_point, sign):
    """Product over axes of exp(sign * i * eps * X_i/2 * xi), shaped like
    the frequency block."""
    axes = [
        np.exp(sign * 1j * spec.epsilon * (float(x) / 2.0) * spec.xi_axis)
        for x in x_point
    ]
    return reduce(np.multiply.outer, axes)


def _steps_of(spec, jX):
    return tuple(int(j) - spec.n_axis // 2 for j in jX)


# ---------------------------------------------------------------------------
# ambiguity transform: representation route
# ---------------------------------------------------------------------------


def ambiguity(ctx, f, window=None):
    """Matrix coefficient field Z -> (f | Pi(Z) w) over the phase-space
    lattice (side Xi).  Representation route, vectorized over frequencies;
    tests pin it pointwise to apply_rep_exp."""
    spec = ctx.spec
    _require_grid(spec, "ambiguity")
    w = window if window is not None else ctx.window
    d = spec.dim
    P = _sign_kernel(spec)
    out = np.empty(spec.field_shape, dtype=complex)
    hd = spec.state_weight
    for jX in np.ndindex(spec.state_shape):
        steps = _steps_of(spec, jX)
        shifted = np.roll(w.values, shift=steps, axis=tuple(range(d)))
        vals = f.values * np.conj(shifted) * hd
        mag = ctx.magnetic_phase(steps, -1, route="rep")
        if mag is not None:
            vals = vals * mag
        core = _tensor_apply([P] * d, vals)
        x_point = [s * spec.h for s in steps]
        out[jX] = _half_shift_prefactor(spec, x_point, +1) * core
    return PhaseSpaceField(spec, out, SIDE_XI)


def ambiguity_at(ctx, f, x_point, xi_point, window=None):
    """Single phase-space point, fully through the representation stack
    (semidirect exponential + apply_rep).  Works on both backends; the grid
    backend needs a lattice group point."""
    w = window if window is not None else ctx.window
    lifted = phase_space_lift(
        ctx.spec.group, ctx.potential, list(x_point), list(xi_point), ctx.spec.epsilon
    )
    moved = apply_rep_exp(ctx.spec, ctx.space, lifted, w)
    return inner_product(ctx.spec, f, moved)


def wigner(ctx, f, window=None):
    """Wigner-type distribution: the side-XiStar transform of the ambiguity
    field."""
    return ft_symbol(ctx.spec, ambiguity(ctx, f, window))


# ---------------------------------------------------------------------------
# ambiguity transform: closed-formula route
# ---------------------------------------------------------------------------


def _average_map_arrays(ctx, steps_or_point, pts):
    """Evaluate the unipotent segment-average map at -pts and spot-check its
    exact inverse on a few rows (the formula substitutes through the
    inverse, so its correctness is asserted where it is used)."""
    alg = ctx.spec.group
    X = steps_or_point
    avg = bch_average_map(alg, X)
    Y = np.stack(
        [NumPoly.from_exact(p).eval_batch(-pts).real for p in avg], axis=-1
    )
    inv = bch_average_inverse(alg, X)
    sample = Y[:: max(1, Y.shape[0] // 3)][:4]
    back = np.stack(
        [NumPoly.from_exact(p).eval_batch(sample).real for p in inv], axis=-1
    )
    target = -pts[:: max(1, pts.shape[0] // 3)][:4]
    if np.max(np.abs(back - target)) > 1e-9:
        raise RuntimeError("segment-average map inverse failed its round trip")
    return Y


def ambiguity_formula(ctx, f, window=None):
    """Closed-formula route on the full lattice: integrate the window
    against the segment phase exponent, with the argument substituted
    through the segment-average map.  Never touches the semidirect
    exponential; agreement with `ambiguity` is a checked theorem, not a
    code path."""
    spec = ctx.spec
    _require_grid(spec, "ambiguity_formula")
    w = window if window is not None else ctx.window
    d = spec.dim
    N = spec.n_axis
    mesh = spec.mesh()
    pts = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    out = np.empty(spec.field_shape, dtype=complex)
    hd = spec.state_weight
    eps = spec.epsilon
    for jX in np.ndindex(spec.state_shape):
        steps = _steps_of(spec, jX)
        Y = _average_map_arrays(ctx, ctx.lattice_point(steps), pts)
        kernels = []
        for i in range(d):
            Yi = Y[:, i].reshape(spec.state_shape)
            profile = Yi[(0,) * i + (slice(None),) + (0,) * (d - 1 - i)]
            shape = [1] * d
            shape[i] = N
            if not np.array_equal(Yi, np.broadcast_to(profile.reshape(shape), Yi.shape)):
                raise NotImplementedError(
                    "substitution kernel does not factor along axes"
                )
            kernels.append(np.exp(1j * eps * np.outer(spec.xi_axis, profile)))
        shifted = np.roll(w.values, shift=steps, axis=tuple(range(d)))
        vals = f.values * np.conj(shifted) * hd
        mag = ctx.magnetic_phase(steps, -1, route="formula")
        if mag is not None:
            vals = vals * mag
        out[jX] = _tensor_apply(kernels, vals)
    return PhaseSpaceField(spec, out, SIDE_XI)


def ambiguity_formula_at(ctx, f, x_point, xi_point, window=None):
    """Closed-formula route at one phase-space point; both backends."""
    spec = ctx.spec
    alg = spec.group
    w = window if window is not None else ctx.window
    d = spec.dim
    eps = spec.epsilon
    Xfr = [Fraction(c) for c in x_point]
    xi = np.asarray([float(c) for c in xi_point])
    if spec.backend == "grid":
        mesh = spec.mesh()
        pts = np.stack([m.reshape(-1) for m in mesh], axis=-1)
        weights = spec.state_weight
        fvals = f.values.reshape(-1)
        steps = lattice_shift_indices(spec, Xfr)
        wvals = np.roll(w.values, shift=steps, axis=tuple(range(d))).reshape(-1)
    else:
        pts, weights = spec.gl_rule()
        fvals = f.eval_batch(pts)
        tmap = left_translation_map(alg, Xfr)
        moved = np.stack(
            [NumPoly.from_exact(p).eval_batch(pts).real for p in tmap], axis=-1
        )
        wvals = w.eval_batch(moved)
    Y = _average_map_arrays(ctx, Xfr, pts)
    phase = np.exp(1j * eps * (Y @ xi))
    if not ctx.potential.is_zero():
        mexp = magnetic_phase_exponent(alg, ctx.potential, Xfr)
        phase = phase * np.exp(-1j * eps * NumPoly.from_exact(mexp).eval_batch(pts))
    return complex(np.sum(weights * phase * fvals * np.conj(wvals)))


# ---------------------------------------------------------------------------
# quantization
# ---------------------------------------------------------------------------


def _shift_columns(spec, steps):
    idx = np.indices(spec.state_shape)
    wrapped = tuple((idx[i] - steps[i]) % spec.n_axis for i in range(spec.dim))
    return np.ravel_multi_index(wrapped, spec.state_shape).reshape(-1)


def rep_operator(ctx, m):
    """Dense matrix of the representation of one semidirect group element
    (lattice translation part required)."""
    spec = ctx.spec
    _require_grid(spec, "rep_operator")
    steps = lattice_shift_indices(spec, m.x)
    n = spec.n_axis ** spec.dim
    mat = np.zeros((n, n), dtype=complex)
    phase = np.exp(1j * spec.epsilon * eval_poly_grid(spec, m.phi)).reshape(-1)
    mat[np.arange(n), _shift_columns(spec, steps)] = phase
    return HSOperator(spec, mat)


def weyl_operator(ctx, x_point, xi_point):
    """Pi(Z) at a literal phase-space point, through the full symbolic
    pipeline (slow, honest; the vectorized paths are tested against it)."""
    lifted = phase_space_lift(
        ctx.spec.group, ctx.potential, list(x_point), list(xi_point), ctx.spec.epsilon
    )
    m = exp_semidirect(
        ctx.spec.group, ctx.space, lifted.phi, [Fraction(c) for c in x_point]
    )
    return rep_operator(ctx, m)


def quantize(ctx, symbol):
    """Operator of a symbol field (side XiStar): transform back to side Xi
    and sum the weighted lattice Weyl system."""
    spec = ctx.spec
    _require_grid(spec, "quantize")
    if symbol.side != SIDE_XISTAR:
        raise ValueError("quantize expects a symbol on side %s" % SIDE_XISTAR)
    ahat = ift_symbol(spec, symbol)
    d = spec.dim
    n = spec.n_axis ** d
    Pplus = np.conj(_sign_kernel(spec))
    rows = np.arange(n)
    mat = np.zeros((n, n), dtype=complex)
    for jX in np.ndindex(spec.state_shape):
        steps = _steps_of(spec, jX)
        x_point = [s * spec.h for s in steps]
        v = ahat.values[jX] * _half_shift_prefactor(spec, x_point, -1)
        diag = _tensor_apply([Pplus] * d, v)
        mag = ctx.magnetic_phase(steps, +1, route="rep")
        if mag is not None:
            diag = diag * mag
        mat[rows, _shift_columns(spec, steps)] += diag.reshape(-1) * spec.xi_weight
    return HSOperator(spec, mat)


def dequantize(ctx, op):
    """Symbol of an operator: pair with the lattice Weyl system on side Xi,
    then transform to side XiStar.  Exact inverse of quantize."""
    spec = ctx.spec
    _require_grid(spec, "dequantize")
    d = spec.dim
    n = spec.n_axis ** d
    P = _sign_kernel(spec)
    rows = np.arange(n)
    scale = abs(spec.epsilon) ** d
    vals = np.empty(spec.field_shape, dtype=complex)
    for jX in np.ndindex(spec.state_shape):
        steps = _steps_of(spec, jX)
        band = op.matrix[rows, _shift_columns(spec, steps)].reshape(spec.state_shape)
        mag = ctx.magnetic_phase(steps, -1, route="rep")
        if mag is not None:
            band = band * mag
        v = _tensor_apply([P] * d, band)
        x_point = [s * spec.h for s in steps]
        vals[jX] = v * _half_shift_prefactor(spec, x_point, +1) * scale
    return ft_symbol(spec, PhaseSpaceField(spec, vals, SIDE_XI))


def moyal_product(ctx, a, b):
    """Symbol of the operator product: dequantize(quantize(a) quantize(b))."""
    return dequantize(ctx, quantize(ctx, a).compose(quantize(ctx, b)))


def materialize_quantizer(ctx):
    """Dense matrix of the quantization map in measure-normalized
    coordinates (symbol lattice values carrying the square root of the
    dual-side weight, operator entries plain).  Unitary when |eps| = 1."""
    spec = ctx.spec
    _require_grid(spec, "materialize_quantizer")
    d = spec.dim
    n = spec.n_axis ** d
    m2 = n * n
    xi_mesh = np.stack(
        [g.reshape(-1) for g in np.meshgrid(*([spec.xi_axis] * d), indexing="ij")],
        axis=-1,
    )
    x_mesh = np.stack([g.reshape(-1) for g in spec.mesh()], axis=-1)
    pi_cols = np.zeros((m2, m2), dtype=complex)
    col = 0
    for jX in np.ndindex(spec.state_shape):
        steps = _steps_of(spec, jX)
        x_point = np.array([s * spec.h for s in steps])
        cols = _shift_columns(spec, steps)
        mag = ctx.magnetic_phase(steps, +1, route="rep")
        base = np.exp(
            1j * spec.epsilon * ((x_mesh - x_point / 2.0) @ xi_mesh.T)
        )
        if mag is not None:
            base = base * mag.reshape(-1)[:, None]
        rows_op = np.arange(n) * n + cols
        pi_cols[rows_op, col : col + n] = base * spec.xi_weight
        col += n
    E = np.conj(spec.harmonic_matrix())
    axes = [spec.zeta_step / math.sqrt(2.0 * math.pi)] * d + [
        spec.z_step / math.sqrt(2.0 * math.pi)
    ] * d
    wmat = reduce(np.kron, [c * E for c in axes])
    return (pi_cols @ wmat) / math.sqrt(spec.xistar_weight)


# ---------------------------------------------------------------------------
# operator-window ambiguity (symbols of operators against operator windows)
# ---------------------------------------------------------------------------


class SymbolAmbiguityField:
    """Matrix coefficient of an operator against a translated operator
    window, indexed by a pair of phase-space lattice points: axes are
    (first point: group then frequency, second point: group then
    frequency)."""

    __slots__ = ("spec", "values")

    def __init__(self, spec, values):
        self.spec = spec
        self.values = values


def symbol_ambiguity(ctx, a, b):
    """(Op(a) | Pi(Z1+Z2) Op(b) Pi(Z1)^{-1})_HS over pairs of lattice
    points; the first point slides inside the pairing, the second offsets
    it.  The sum point is taken literally (its frequency part may leave the
    lattice box)."""
    spec = ctx.spec
    _require_grid(spec, "symbol_ambiguity")
    if spec.dim != 1:
        raise NotImplementedError(
            "operator-window ambiguity is implemented for one-dimensional groups"
        )
    N = spec.n_axis
    eps = spec.epsilon
    T = quantize(ctx, a).matrix
    W = quantize(ctx, b).matrix
    P = _sign_kernel(spec)
    Pplus = np.conj(P)
    x = spec.x_axis
    xi = spec.xi_axis
    out = np.empty((N, N, N, N), dtype=complex)
    for t1 in range(N):
        s1 = t1 - N // 2
        for t2 in range(N):
            s2 = t2 - N // 2
            su = s1 + s2
            Wr = np.roll(W, shift=(su, s1), axis=(0, 1))
            C = T * np.conj(Wr)
            if not ctx.potential.is_zero():
                mag_u = ctx.magnetic_phase((su,), -1, route="rep")
                mag_1 = ctx.magnetic_phase((s1,), +1, route="rep")
                C = C * np.outer(mag_u, mag_1)
            H = C @ Pplus.T
            V1 = P.T * H
            val = (P @ V1).T
            Xu = su * spec.h
            X1 = s1 * spec.h
            val = val * np.exp(1j * eps * (Xu / 2.0) * (xi[:, None] + xi[None, :]))
            val = val * np.exp(-1j * eps * (X1 / 2.0) * xi)[:, None]
            out[t1, :, t2, :] = val
    return SymbolAmbiguityField(spec, out)


# ---------------------------------------------------------------------------
# reconstruction, reproducing kernel, operator pairs
# ---------------------------------------------------------------------------


def reconstruct(ctx, ambig, window=None, synthesis_window=None):
    """Resynthesize a state from its ambiguity field:

        f = |eps|^d / (w0 | w) * sum_Z A(Z) Pi(Z) w0 dXi

    (matrix-free).  w is the analysis window that produced the field, w0 an
    arbitrary synthesis window not orthogonal to it."""
    spec = ctx.spec
    _require_grid(spec, "reconstruct")
    w = window if window is not None else ctx.window
    w0 = synthesis_window if synthesis_window is not None else w
    d = spec.dim
    Pplus = np.conj(_sign_kernel(spec))
    acc = np.zeros(spec.state_shape, dtype=complex)
    for jX in np.ndindex(spec.state_shape):
        steps = _steps_of(spec, jX)
        x_point = [s * spec.h for s in steps]
        v = ambig.values[jX] * _half_shift_prefactor(spec, x_point, -1)
        diag = _tensor_apply([Pplus] * d, v)
        mag = ctx.magnetic_phase(steps, +1, route="rep")
        if mag is not None:
            diag = diag * mag
        acc += diag * np.roll(w0.values, shift=steps, axis=tuple(range(d)))
    acc *= spec.xi_weight * abs(spec.epsilon) ** d
    overlap = inner_product(spec, w0, w)
    return StateVector(spec, acc / overlap)


def coherent_family(ctx, window=None):
    """All lattice-translated window states as columns: shape
    (N^d, N^{2d}), column order matching the flattened phase-space
    lattice."""
    spec = ctx.spec
    _require_grid(spec, "coherent_family")
    w = window if window is not None else ctx.window
    d = spec.dim
    n = spec.n_axis ** d
    xi_mesh = np.stack(
        [g.reshape(-1) for g in np.meshgrid(*([spec.xi_axis] * d), indexing="ij")],
        axis=-1,
    )
    x_mesh = np.stack([m.reshape(-1) for m in spec.mesh()], axis=-1)
    V = np.empty((n, n * n), dtype=complex)
    col = 0
    for jX in np.ndindex(spec.state_shape):
        steps = _steps_of(spec, jX)
        x_point = np.array([s * spec.h for s in steps])
        rolled = np.roll(w.values, shift=steps, axis=tuple(range(d))).reshape(-1)
        base = np.exp(1j * spec.epsilon * ((x_mesh - x_point / 2.0) @ xi_mesh.T))
        mag = ctx.magnetic_phase(steps, +1, route="rep")
        if mag is not None:
            base = base * mag.reshape(-1)[:, None]
        V[:, col : col + n] = rolled[:, None] * base
        col += n
    return V


def reproducing_kernel(ctx, window=None):
    """Gram matrix K[Z, Z'] = |eps|^d (Pi(Z') w | Pi(Z) w); with a
    unit-norm window, K dXi is the orthogonal projection onto the range of
    the ambiguity transform and K(Z, Z) = |eps|^d."""
    spec = ctx.spec
    V = coherent_family(ctx, window)
    gram = (V.conj().T @ V) * spec.state_weight
    return (abs(spec.epsilon) ** spec.dim) * gram


def project_field(ctx, kernel, field):
    """Apply the reproducing projection K dXi to a side-Xi field."""
    spec = ctx.spec
    if field.side != SIDE_XI:
        raise ValueError("projection acts on side %s fields" % SIDE_XI)
    vec = kernel @ field.values.reshape(-1) * spec.xi_weight
    return PhaseSpaceField(spec, vec.reshape(spec.field_shape), SIDE_XI)


def square_rep_on_operators(ctx, pair, op):
    """Action of a twisted pair of group elements on operators:

        (m1, m2) . T = Pi(m1) T Pi(m2)^{-1} Pi(m1)^{-1}

    homomorphic for the twisted pair product (the pair carries the
    conjugation data, the twist keeps composition covariant)."""
    p1 = rep_operator(ctx, pair[0])
    p2 = rep_operator(ctx, pair[1])
    return p1.compose(op).compose(p2.adjoint()).compose(p1.adjoint())


# ---------------------------------------------------------------------------
# quadrature-backend overlap (frequency integral reduced exactly)
# ---------------------------------------------------------------------------


def ambiguity_overlap_quadrature(spec, f1, w1, f2, w2):
    """(A_{w1} f1 | A_{w2} f2) over continuous phase space, with the
    frequency integral carried out exactly: the pairing phases are linear
    in the frequency, so integrating them produces a point mass supported
    where the segment-average map arguments coincide, collapsing the double
    group integral to

        |eps|^{-d} * iint f1(x) conj(f2(x)) conj(w1)((-X)*x) w2((-X)*x) dX dx

    which tensor Gauss-Legendre evaluates on the quadrature box.  The
    potential drops out exactly (both phases cancel at coinciding
    arguments), so this is also the gauge-invariant form."""
    if spec.backend != "quadrature":
        raise ValueError("ambiguity_overlap_quadrature needs the quadrature backend")
    d = spec.dim
    nodes, wts = spec.gl_rule()
    M = nodes.shape[0]
    inner = (wts * f1.eval_batch(nodes) * np.conj(f2.eval_batch(nodes)))
    law = [NumPoly.from_exact(p) for p in bch_symbolic(spec.group)]
    block = max(1, 4_000_000 // M)
    total = 0.0 + 0.0j
    for start in range(0, M, block):
        stop = min(M, start + block)
        rows = stop - start
        big = np.empty((rows * M, 2 * d))
        big[:, :d] = -np.repeat(nodes[start:stop], M, axis=0)
        big[:, d:] = np.tile(nodes, (rows, 1))
        moved = np.stack([p.eval_batch(big).real for p in law], axis=-1)
        G = (np.conj(w1.eval_batch(moved)) * w2.eval_batch(moved)).reshape(rows, M)
        total += wts[start:stop] @ (G @ inner)
    return complex(total) / (abs(spec.epsilon) ** d)
