"""Discretized representation carrier.

Grids
-----
The group box is the centered lattice x_j = (j - N/2) h, h = L/N, j = 0..N-1
per axis.  Phase space gets the matching dual lattices:

- position-like axes reuse the group lattice (step h);
- frequency-like axes use step 2*pi/(|eps| L), which makes every pairing
  phase an exact N-point harmonic exp(-2i*pi (j-N/2)(k-N/2)/N) regardless of
  the representation parameter.

The dual phase-space grid uses steps 2*pi/L (dual of position) and |eps| h
(dual of frequency).  Lebesgue measure on the group carries weight h^d; both
phase-space measures carry an extra (2*pi)^{-1/2} per axis, which is exactly
what makes the symbol transform pair below unitary for every eps.

Lattice translation wraps around (cyclic index arithmetic) while every
phase factor is evaluated at the *unwrapped* coordinate.  Wrapping keeps
every lattice translation exactly unitary — the property the whole discrete
calculus rests on; the price is that a polynomial phase disagrees with its
wrapped copy on the wrapped entries, an error controlled by window decay
and measured by the gauge checks rather than assumed away.

Operators
---------
HSOperator matrices act on raw value vectors.  Kernel-derived matrices fold
in the group weight h^d (a rank-one f (x) conj(phi) has matrix
f_j conj(phi_k) h^d), after which the plain Frobenius inner product, plain
matrix product, plain trace and plain singular values *are* the
Hilbert-Schmidt inner product, operator composition, trace and Schatten
data — no extra weights anywhere.

Determinism: every reduction is either a numpy pairwise sum over a
fixed-shape array or a fixed-order matrix contraction; identical inputs
give bit-identical outputs.
"""

import math
import struct
from fractions import Fraction

import numpy as np

from .nilpotent import exp_semidirect, left_translation_map

TWO_PI = 2.0 * math.pi


class GridSpec:
    """Discretization parameters: group, points per axis, box size, backend
    (``grid`` or ``quadrature``), and the representation parameter."""

    __slots__ = ("group", "n_axis", "extent", "backend", "epsilon",
                 "quad_nodes", "quad_box", "_cache")

    def __init__(self, group, n_axis, extent, backend="grid", epsilon=1.0,
                 quad_nodes=12, quad_box=6.0):
        if n_axis % 2 != 0 or n_axis < 8:
            raise ValueError("points per axis must be even and >= 8")
        if extent <= 0:
            raise ValueError("box extent must be positive")
        if epsilon == 0:
            raise ValueError("representation parameter must be nonzero")
        if backend not in ("grid", "quadrature"):
            raise ValueError("backend must be 'grid' or 'quadrature'")
        if backend == "grid":
            flat = all(
                c == 0 for plane in group.structure for row in plane for c in row
            )
            if not flat:
                raise ValueError(
                    "the grid backend needs lattice translations, which only "
                    "commutative group laws provide; use backend='quadrature'"
                )
            if group.dim > 2:
                raise ValueError("grid backend supports dimension <= 2")
        else:
            if group.dim > 4:
                raise ValueError("quadrature backend supports dimension <= 4")
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "n_axis", int(n_axis))
        object.__setattr__(self, "extent", float(extent))
        object.__setattr__(self, "backend", backend)
        object.__setattr__(self, "epsilon", float(epsilon))
        object.__setattr__(self, "quad_nodes", int(quad_nodes))
        object.__setattr__(self, "quad_box", float(quad_box))
        object.__setattr__(self, "_cache", {})

    def __setattr__(self, name, value):
        raise AttributeError("GridSpec is immutable")

    # -- derived geometry ---------------------------------------------------

    @property
    def dim(self):
        return self.group.dim

    @property
    def h(self):
        return self.extent / self.n_axis

    @property
    def x_axis(self):
        return (np.arange(self.n_axis) - self.n_axis // 2) * self.h

    @property
    def xi_step(self):
        return TWO_PI / (abs(self.epsilon) * self.extent)

    @property
    def xi_axis(self):
        return (np.arange(self.n_axis) - self.n_axis // 2) * self.xi_step

    @property
    def zeta_step(self):
        return TWO_PI / self.extent

    @property
    def zeta_axis(self):
        return (np.arange(self.n_axis) - self.n_axis // 2) * self.zeta_step

    @property
    def z_step(self):
        return abs(self.epsilon) * self.h

    @property
    def z_axis(self):
        return (np.arange(self.n_axis) - self.n_axis // 2) * self.z_step

    @property
    def state_shape(self):
        return (self.n_axis,) * self.dim

    @property
    def field_shape(self):
        return (self.n_axis,) * (2 * self.dim)

    @property
    def state_weight(self):
        """Per-point Lebesgue weight on the group box."""
        return self.h ** self.dim

    @property
    def xi_weight(self):
        """Per-point measure weight on phase space (both factors of
        (2*pi)^{-1/2} folded in)."""
        return (self.h * self.xi_step / TWO_PI) ** self.dim

    @property
    def xistar_weight(self):
        return (self.zeta_step * self.z_step / TWO_PI) ** self.dim

    def mesh(self):
        """d arrays of shape state_shape holding the coordinate meshes."""
        axes = [self.x_axis] * self.dim
        return np.meshgrid(*axes, indexing="ij") if self.dim > 1 else [self.x_axis]

    def harmonic_matrix(self):
        """E[k, j] = exp(-2i*pi (k-N/2)(j-N/2)/N): the shared unimodular
        kernel of every axis transform on these centered grids."""
        key = "harmonic"
        if key not in self._cache:
            n = self.n_axis
            c = np.arange(n) - n // 2
            self._cache[key] = np.exp(-2j * math.pi * np.outer(c, c) / n)
        return self._cache[key]

    def gl_rule(self):
        """Tensor Gauss-Legendre nodes (M, d) and weights (M,) on the
        quadrature box [-B, B]^d."""
        key = "gl"
        if key not in self._cache:
            x, w = np.polynomial.legendre.leggauss(self.quad_nodes)
            x = x * self.quad_box
            w = w * self.quad_box
            grids = np.meshgrid(*([x] * self.dim), indexing="ij")
            nodes = np.stack([g.reshape(-1) for g in grids], axis=-1)
            wgrids = np.meshgrid(*([w] * self.dim), indexing="ij")
            weights = np.ones(nodes.shape[0])
            for g in wgrids:
                weights = weights * g.reshape(-1)
            self._cache[key] = (nodes, weights)
        return self._cache[key]


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


class StateVector:
    """A discretized state: complex values over the group lattice (grid
    backend) or an expression-tree state (quadrature backend wraps
    QuadratureState instead)."""

    __slots__ = ("spec", "values")

    def __init__(self, spec, values):
        values = np.asarray(values, dtype=complex)
        if values.shape != spec.state_shape:
            raise ValueError(
                "values have shape %r, grid wants %r" % (values.shape, spec.state_shape)
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("state contains non-finite entries")
        self.spec = spec
        self.values = values

    def norm(self):
        return math.sqrt(abs(inner_product(self.spec, self, self)))

    def scaled(self, c):
        return StateVector(self.spec, self.values * c)


def gaussian_state(spec, center=None, width=1.0, momentum=None, chirp=0.0):
    """An analytically L^2-normalized Gaussian, optionally translated,
    modulated and chirped.  The discrete norm then equals 1 up to the
    lattice truncation error of the box."""
    d = spec.dim
    center = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    momentum = np.zeros(d) if momentum is None else np.asarray(momentum, dtype=float)
    if spec.backend == "quadrature":
        return QuadratureState.gaussian(spec, center, width, momentum, chirp)
    mesh = spec.mesh()
    r2 = np.zeros(spec.state_shape)
    phase = np.zeros(spec.state_shape)
    for i in range(d):
        r2 = r2 + (mesh[i] - center[i]) ** 2
        phase = phase + momentum[i] * mesh[i]
    amp = (2.0 * math.pi * width ** 2) ** (-d / 4.0)
    values = amp * np.exp(-r2 / (4.0 * width ** 2) + 1j * (phase + chirp * r2))
    return StateVector(spec, values)


def inner_product(spec, f, g):
    """(f | g): linear in f, conjugate-linear in g.  Riemann sum with the
    group weight on the grid backend; tensor Gauss-Legendre on the
    quadrature backend.  numpy's pairwise summation over the fixed layout
    keeps the result deterministic."""
    if spec.backend == "quadrature":
        nodes, weights = spec.gl_rule()
        return complex(np.sum(weights * f.eval_batch(nodes) * np.conj(g.eval_batch(nodes))))
    if f.values.shape != g.values.shape:
        raise ValueError("state shapes differ")
    return complex(np.sum(f.values * np.conj(g.values)) * spec.state_weight)


def eval_poly_grid(spec, p):
    """Evaluate an exact polynomial on the group mesh as a float array."""
    if p.nvars != spec.dim:
        raise ValueError("polynomial has %d variables, grid has %d" % (p.nvars, spec.dim))
    mesh = spec.mesh()
    out = np.zeros(spec.state_shape)
    for e, c in sorted(p.terms.items()):
        term = float(c) * np.ones(spec.state_shape)
        for i, k in enumerate(e):
            if k:
                term = term * mesh[i] ** k
        out = out + term
    return out


def lattice_shift_indices(spec, g):
    """Integer lattice steps of a group point, or a ValueError when the
    point is off the translation lattice."""
    steps = []
    for c in g:
        s = float(c) / spec.h
        r = round(s)
        if abs(s - r) > 1e-9:
            raise ValueError("group point %r is off the lattice (h=%g)" % (list(g), spec.h))
        steps.append(int(r))
    return tuple(steps)


def apply_rep(spec, F, m, f):
    """The representation action (phi, g) . f = exp(i eps phi) f((-g) * x).

    Grid backend: g must sit on the translation lattice; the argument index
    wraps cyclically while the phase polynomial is evaluated at the true
    (unwrapped) output coordinates.  Quadrature backend: any g.

    When a function-space basis F is supplied, membership of phi is checked.
    """
    if F is not None and F.in_span(m.phi) is None:
        raise ValueError("representation phase is outside the admissible span")
    if spec.backend == "quadrature":
        return f.translated(m)
    steps = lattice_shift_indices(spec, m.x)
    shifted = np.roll(f.values, shift=steps, axis=tuple(range(spec.dim)))
    phase = np.exp(1j * spec.epsilon * eval_poly_grid(spec, m.phi))
    return StateVector(spec, phase * shifted)


def apply_rep_exp(spec, F, lifted, f):
    """Action of the exponential of a lifted phase-space point: the
    semidirect exponential of (phi, X) applied through apply_rep."""
    phi = lifted.phi
    X = [Fraction(c) for c in lifted.x]
    m = exp_semidirect(spec.group, F, phi, X)
    return apply_rep(spec, F, m, f)


# ---------------------------------------------------------------------------
# phase-space fields and the symbol transform pair
# ---------------------------------------------------------------------------

SIDE_XI = "Xi"
SIDE_XISTAR = "XiStar"


class PhaseSpaceField:
    """A complex field over phase space (side Xi: position axes then
    frequency axes) or over its Fourier dual (side XiStar)."""

    __slots__ = ("spec", "values", "side")

    def __init__(self, spec, values, side):
        if side not in (SIDE_XI, SIDE_XISTAR):
            raise ValueError("side must be %r or %r" % (SIDE_XI, SIDE_XISTAR))
        values = np.asarray(values, dtype=complex)
        if values.shape != spec.field_shape:
            raise ValueError(
                "field has shape %r, grid wants %r" % (values.shape, spec.field_shape)
            )
        self.spec = spec
        self.values = values
        self.side = side

    def point_weight(self):
        return self.spec.xi_weight if self.side == SIDE_XI else self.spec.xistar_weight

    def norm(self):
        return math.sqrt(np.sum(np.abs(self.values) ** 2) * self.point_weight())


def field_inner(u, v):
    if u.side != v.side:
        raise ValueError("fields live on different sides")
    return complex(np.sum(u.values * np.conj(v.values)) * u.point_weight())


def _axis_transform(spec, values, kernel, scalars):
    out = np.asarray(values, dtype=complex)
    ndim = out.ndim
    for axis in range(ndim):
        out = np.moveaxis(np.tensordot(kernel, out, axes=([1], [axis])), 0, axis)
    return out * np.prod(scalars)


def ft_symbol(spec, u):
    """Unitary transform from side Xi to side XiStar (kernel e^{-i<.,.>})."""
    if u.side != SIDE_XI:
        raise ValueError("ft_symbol expects a field on side %s" % SIDE_XI)
    d = spec.dim
    scal = [spec.h / math.sqrt(TWO_PI)] * d + [spec.xi_step / math.sqrt(TWO_PI)] * d
    out = _axis_transform(spec, u.values, spec.harmonic_matrix(), scal)
    return PhaseSpaceField(spec, out, SIDE_XISTAR)


def ift_symbol(spec, u):
    """Inverse of ft_symbol: side XiStar back to side Xi (kernel e^{+i<.,.>})."""
    if u.side != SIDE_XISTAR:
        raise ValueError("ift_symbol expects a field on side %s" % SIDE_XISTAR)
    d = spec.dim
    scal = [spec.zeta_step / math.sqrt(TWO_PI)] * d + [spec.z_step / math.sqrt(TWO_PI)] * d
    out = _axis_transform(spec, u.values, np.conj(spec.harmonic_matrix()), scal)
    return PhaseSpaceField(spec, out, SIDE_XI)


# ---------------------------------------------------------------------------
# Hilbert-Schmidt operators
# ---------------------------------------------------------------------------


class HSOperator:
    """A dense operator matrix over the group lattice; see the module
    docstring for the weight convention that makes plain matrix algebra
    coincide with the Hilbert-Schmidt calculus."""

    __slots__ = ("spec", "matrix")

    def __init__(self, spec, matrix):
        matrix = np.asarray(matrix, dtype=complex)
        n = spec.n_axis ** spec.dim
        if matrix.shape != (n, n):
            raise ValueError("operator matrix must be %d x %d" % (n, n))
        if not np.all(np.isfinite(matrix)):
            raise ValueError("operator contains non-finite entries")
        self.spec = spec
        self.matrix = matrix

    @classmethod
    def identity(cls, spec):
        return cls(spec, np.eye(spec.n_axis ** spec.dim, dtype=complex))

    @classmethod
    def rank_one(cls, f, phi):
        """f (x) conj(phi): the operator g -> (g | phi) f."""
        spec = f.spec
        fv = f.values.reshape(-1)
        pv = phi.values.reshape(-1)
        return cls(spec, np.outer(fv, np.conj(pv)) * spec.state_weight)

    def apply(self, f):
        out = self.matrix @ f.values.reshape(-1)
        return StateVector(self.spec, out.reshape(self.spec.state_shape))

    def compose(self, other):
        return HSOperator(self.spec, self.matrix @ other.matrix)

    def adjoint(self):
        return HSOperator(self.spec, self.matrix.conj().T)

    def hs_inner(self, other):
        """(S | T) in the Hilbert-Schmidt sense = plain Frobenius pairing."""
        return complex(np.sum(self.matrix * np.conj(other.matrix)))

    def hs_norm(self):
        return math.sqrt(abs(self.hs_inner(self)))

    def trace(self):
        return complex(np.trace(self.matrix))

    def singular_values(self):
        return np.linalg.svd(self.matrix, compute_uv=False)

    def operator_norm(self):
        return float(self.singular_values()[0])

    def trace_norm(self):
        return float(np.sum(self.singular_values()))


# ---------------------------------------------------------------------------
# quadrature backend: expression-tree states
# ---------------------------------------------------------------------------


class NumPoly:
    """A numeric (complex-coefficient) polynomial for quadrature-backend
    expressions: sparse exponent map, batch evaluation, ring operations,
    and composition with exact polynomial maps."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                c = complex(c)
                if c != 0:
                    clean[tuple(e)] = clean.get(tuple(e), 0j) + c
        self.terms = clean

    @classmethod
    def from_exact(cls, p):
        return cls(p.nvars, {e: complex(c) for e, c in p.terms.items()})

    @classmethod
    def const(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    def __add__(self, other):
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0j) + c
        return NumPoly(self.nvars, terms)

    def __mul__(self, other):
        if not isinstance(other, NumPoly):
            return NumPoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0j) + c1 * c2
        return NumPoly(self.nvars, terms)

    __rmul__ = __mul__

    def eval_batch(self, pts):
        """pts: (M, nvars) float array -> (M,) complex values."""
        out = np.zeros(pts.shape[0], dtype=complex)
        for e, c in sorted(self.terms.items()):
            term = np.full(pts.shape[0], c)
            for i, k in enumerate(e):
                if k:
                    term = term * pts[:, i] ** k
            out = out + term
        return out

    def compose_exact(self, pmap):
        """Substitute an exact PolyVector (one component per variable)."""
        comps = [NumPoly.from_exact(q) for q in pmap]
        result = NumPoly(comps[0].nvars, {})
        for e, c in self.terms.items():
            term = NumPoly.const(comps[0].nvars, c)
            for i, k in enumerate(e):
                for _ in range(k):
                    term = term * comps[i]
            result = result + term
        return result


class QuadratureState:
    """A closed-form state: a sum of terms P(x) * exp(E(x)) with numeric
    polynomials P, E.  Closed under multiplication by polynomial phases and
    composition with polynomial coordinate changes, which is exactly what
    the representation action needs."""

    __slots__ = ("spec", "expr")

    def __init__(self, spec, expr):
        self.spec = spec
        self.expr = list(expr)

    @classmethod
    def gaussian(cls, spec, center, width, momentum, chirp=0.0):
        d = spec.dim
        amp = (2.0 * math.pi * width ** 2) ** (-d / 4.0)
        expo = NumPoly(d, {})
        for i in range(d):
            xi = NumPoly(d, {tuple(1 if j == i else 0 for j in range(d)): 1.0})
            ci = NumPoly.const(d, center[i])
            diff = xi + (-1.0) * ci
            expo = expo + (-1.0 / (4.0 * width ** 2) + 1j * chirp) * (diff * diff)
            expo = expo + (1j * momentum[i]) * xi
        return cls(spec, [(NumPoly.const(d, amp), expo)])

    def eval_batch(self, pts):
        out = np.zeros(pts.shape[0], dtype=complex)
        for poly, expo in self.expr:
            out = out + poly.eval_batch(pts) * np.exp(expo.eval_batch(pts))
        return out

    def conjugated(self):
        conj_expr = []
        for poly, expo in self.expr:
            conj_expr.append(
                (
                    NumPoly(poly.nvars, {e: np.conj(c) for e, c in poly.terms.items()}),
                    NumPoly(expo.nvars, {e: np.conj(c) for e, c in expo.terms.items()}),
                )
            )
        return QuadratureState(self.spec, conj_expr)

    def scaled(self, c):
        return QuadratureState(self.spec, [(poly * c, expo) for poly, expo in self.expr])

    def translated(self, m):
        """Apply the representation element (phi, g): multiply by the phase
        exp(i eps phi) and substitute x -> (-g) * x."""
        spec = self.spec
        pmap = left_translation_map(spec.group, [Fraction(c) for c in m.x])
        phase = 1j * spec.epsilon * NumPoly.from_exact(m.phi)
        out = []
        for poly, expo in self.expr:
            out.append(
                (
                    poly.compose_exact(pmap),
                    expo.compose_exact(pmap) + phase,
                )
            )
        return QuadratureState(spec, out)

    def norm(self):
        return math.sqrt(abs(inner_product(self.spec, self, self)))


# ---------------------------------------------------------------------------
# serialization: CSV and a raw binary tensor format
# ---------------------------------------------------------------------------

TENSOR_MAGIC = b"MWTN"


def tensor_write(path, array):
    """Binary layout: magic 'MWTN', uint32 rank, rank x uint64 dims,
    then C-order little-endian complex128 payload."""
    array = np.ascontiguousarray(array, dtype="<c16")
    with open(path, "wb") as fh:
        fh.write(TENSOR_MAGIC)
        fh.write(struct.pack("<I", array.ndim))
        fh.write(struct.pack("<%dQ" % array.ndim, *array.shape))
        fh.write(array.tobytes())


def tensor_read(path):
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != TENSOR_MAGIC:
            raise ValueError("not a tensor file (bad magic %r)" % magic)
        (rank,) = struct.unpack("<I", fh.read(4))
        dims = struct.unpack("<%dQ" % rank, fh.read(8 * rank))
        payload = fh.read()
    count = 1
    for d in dims:
        count *= d
    flat = np.frombuffer(payload, dtype="<c16", count=count)
    return flat.reshape(dims).astype(complex)


def csv_write(path, array):
    """index columns (one per axis), then re, im; rows in C order."""
    array = np.asarray(array, dtype=complex)
    with open(path, "w", encoding="utf-8") as fh:
        cols = ["i%d" % k for k in range(array.ndim)] + ["re", "im"]
        fh.write(",".join(cols) + "\n")
        for idx in np.ndindex(*array.shape):
            v = array[idx]
            prefix = ",".join(str(k) for k in idx)
            fh.write(prefix + "," if prefix else "")
            fh.write("%.17g,%.17g\n" % (v.real, v.imag))


def csv_read(path):
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rank = len(header) - 2
        if rank < 0 or header[-2:] != ["re", "im"]:
            raise ValueError("not a field CSV (header %r)" % header)
        if rank == 0:
            line = fh.readline().strip().split(",")
            return np.array(complex(float(line[0]), float(line[1])))
        entries = []
        for line in fh:
            parts = line.strip().split(",")
            if not parts or parts == [""]:
                continue
            idx = tuple(int(p) for p in parts[:rank])
            entries.append((idx, complex(float(parts[rank]), float(parts[rank + 1]))))
    dims = tuple(max(idx[k] for idx, _ in entries) + 1 for k in range(rank))
    out = np.zeros(dims, dtype=complex)
    for idx, v in entries:
        out[idx] = v
    return out
