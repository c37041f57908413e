"""Named self-checks with machine-readable reports.

Every check in the registry builds its own small discretization, draws any
random inputs from a generator seeded by the suite seed together with the
check's fixed registry position, measures one scalar defect or ratio, and
compares it against a fixed threshold.  Inequalities whose sharp constant
is 1 are asserted with a multiplicative slack of 1 + 1e-3, and the measured
constant is always reported.  A check may also run in report-only mode
(general exponent families): its constant is logged but nothing is
asserted.

Reports serialize to JSON lines and to a CSV summary.  Both renderings are
byte-stable for a fixed seed, so reruns can be diffed.
"""

import json
import math
import time
from fractions import Fraction

import numpy as np

from .poly import Polynomial, PolyVector
from .nilpotent import (
    algebra,
    bch_product,
    left_translation_map,
    semidirect_nilpotency_check,
    build_translate_span,
    substitution_maps,
)
from .magnetic import MagneticPotential, admissible_space, gauge_shift
from .repspace import (
    GridSpec,
    HSOperator,
    PhaseSpaceField,
    SIDE_XI,
    SIDE_XISTAR,
    StateVector,
    eval_poly_grid,
    field_inner,
    ft_symbol,
    gaussian_state,
    inner_product,
)
from .weyl import (
    QuantizerContext,
    ambiguity,
    ambiguity_overlap_quadrature,
    materialize_quantizer,
    moyal_product,
    project_field,
    quantize,
    reconstruct,
    reproducing_kernel,
    symbol_ambiguity,
    wigner,
)
from .modspace import (
    INFINITY,
    ExponentQuad,
    exponent_check,
    mod_norm_symbol,
    mod_norm_vector,
)

SLACK = 1.0 + 1e-3


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


class CheckReport:
    """One measured metric against one threshold.

    ``asserted`` distinguishes pass/fail checks from report-only entries;
    a report-only entry carries ``threshold=None`` and always passes.  The
    context dictionary records everything needed to reproduce the run
    (grid parameters, seeds, window choices, sub-metrics).
    """

    __slots__ = ("name", "metric", "threshold", "passed", "asserted", "context")

    def __init__(self, name, metric, threshold, passed, asserted=True, context=None):
        metric = float(metric)
        if not math.isfinite(metric):
            raise ValueError("check %r produced a non-finite metric %r" % (name, metric))
        if asserted:
            if threshold is None:
                raise ValueError("asserted check %r needs a threshold" % name)
            threshold = float(threshold)
            if not math.isfinite(threshold):
                raise ValueError("threshold for %r must be finite" % name)
        elif threshold is not None:
            raise ValueError("report-only check %r must not carry a threshold" % name)
        self.name = str(name)
        self.metric = metric
        self.threshold = threshold
        self.passed = bool(passed)
        self.asserted = bool(asserted)
        self.context = _jsonable(context or {})

    @classmethod
    def from_metric(cls, name, metric, threshold, context=None, extra_ok=True):
        """Pass iff metric <= threshold and every side condition held."""
        passed = bool(float(metric) <= float(threshold)) and bool(extra_ok)
        return cls(name, metric, threshold, passed, asserted=True, context=context)

    @classmethod
    def report_only(cls, name, metric, context=None):
        return cls(name, metric, None, True, asserted=False, context=context)

    def to_json_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "asserted": self.asserted,
            "metric": self.metric,
            "threshold": self.threshold,
            "context": self.context,
        }

    def summary_line(self):
        verdict = "PASS" if self.passed else "FAIL"
        if not self.asserted:
            verdict = "INFO"
        bound = "-" if self.threshold is None else repr(self.threshold)
        return "%-4s %-26s metric=%s threshold=%s" % (
            verdict,
            self.name,
            repr(self.metric),
            bound,
        )

    def __repr__(self):
        return "CheckReport(%r, metric=%r, threshold=%r, passed=%r)" % (
            self.name,
            self.metric,
            self.threshold,
            self.passed,
        )


def _jsonable(value):
    """Coerce a context tree into plain JSON types, exactly and stably."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Fraction):
        return "%d/%d" % (value.numerator, value.denominator)
    if isinstance(value, ExponentQuad):
        return [_exponent_str(e) for e in _quad_tuple(value)]
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        out = float(value)
        if not math.isfinite(out):
            raise ValueError("non-finite value %r in report context" % out)
        return out
    raise TypeError("cannot serialize %r into a report context" % (value,))


def _exponent_str(e):
    if e == INFINITY:
        return "inf"
    return str(e)


def _quad_tuple(quad):
    return (quad.r, quad.s, quad.r1, quad.s1, quad.r2, quad.s2)


def suite_passed(reports):
    return all(r.passed for r in reports)


def reports_to_jsonl(reports):
    lines = [json.dumps(r.to_json_dict(), sort_keys=True) for r in reports]
    return "".join(line + "\n" for line in lines)


def write_reports_jsonl(reports, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(reports_to_jsonl(reports))


def reports_to_csv(reports):
    rows = ["check,passed,asserted,metric,threshold"]
    for r in reports:
        rows.append(
            "%s,%s,%s,%s,%s"
            % (
                r.name,
                "true" if r.passed else "false",
                "true" if r.asserted else "false",
                repr(r.metric),
                "" if r.threshold is None else repr(r.threshold),
            )
        )
    return "".join(row + "\n" for row in rows)


def write_summary_csv(reports, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(reports_to_csv(reports))


# ---------------------------------------------------------------------------
# random inputs
# ---------------------------------------------------------------------------


def random_gaussian_state(spec, rng, center_box=None, width_range=(0.8, 1.5),
                          momentum_box=None, chirp_box=0.4):
    """A Gaussian with random center, width, momentum and chirp, kept well
    inside the box so its mass at the boundary is negligible."""
    d = spec.dim
    if center_box is None:
        center_box = 0.15 * spec.extent
    if momentum_box is None:
        momentum_box = min(2.5, 0.35 * float(np.max(np.abs(spec.xi_axis))))
    center = rng.uniform(-center_box, center_box, d)
    width = rng.uniform(width_range[0], width_range[1])
    momentum = rng.uniform(-momentum_box, momentum_box, d)
    chirp = rng.uniform(-chirp_box, chirp_box)
    return gaussian_state(spec, center=center, width=width, momentum=momentum,
                          chirp=chirp)


def random_wigner_symbol(ctx, rng, terms=2, **ranges):
    """A combination of cross-Wigner transforms of random Gaussians: a
    localized, generically complex symbol."""
    spec = ctx.spec
    vals = np.zeros(spec.field_shape, dtype=complex)
    for _ in range(terms):
        g = random_gaussian_state(spec, rng, **ranges)
        h = random_gaussian_state(spec, rng, **ranges)
        c = rng.standard_normal() + 1j * rng.standard_normal()
        vals = vals + c * wigner(ctx, g, h).values
    return PhaseSpaceField(spec, vals, SIDE_XISTAR)


def random_envelope_symbol(ctx, rng, spread=0.35):
    """Random Fourier coefficients under a Gaussian envelope: the symbol is
    smooth and bounded but spread over the whole box."""
    spec = ctx.spec
    d = spec.dim
    noise = rng.standard_normal(spec.field_shape) + 1j * rng.standard_normal(
        spec.field_shape
    )
    x_sigma = spread * float(np.max(np.abs(spec.x_axis)))
    xi_sigma = spread * float(np.max(np.abs(spec.xi_axis)))
    x_profile = np.exp(-(spec.x_axis ** 2) / (2.0 * x_sigma ** 2))
    xi_profile = np.exp(-(spec.xi_axis ** 2) / (2.0 * xi_sigma ** 2))
    profiles = [x_profile] * d + [xi_profile] * d
    envelope = profiles[0]
    for p in profiles[1:]:
        envelope = np.multiply.outer(envelope, p)
    coeffs = PhaseSpaceField(spec, noise * envelope, SIDE_XI)
    return ft_symbol(spec, coeffs)


def random_symbol(ctx, rng):
    """The stock random-symbol recipe: a Wigner combination plus enveloped
    Fourier noise."""
    a = random_wigner_symbol(ctx, rng)
    b = random_envelope_symbol(ctx, rng)
    return PhaseSpaceField(ctx.spec, a.values + b.values, SIDE_XISTAR)


def _normalized(state):
    n = state.norm()
    if n == 0.0:
        raise ValueError("window must be nonzero")
    return state.scaled(1.0 / n)


# ---------------------------------------------------------------------------
# inequality checks
# ---------------------------------------------------------------------------


def check_wigner_bound(ctx, quad, trials=50, seed=0, window1=None, window2=None,
                       pairs=None, equality_band=None):
    """Cross-transform bound: the mixed norm of the Wigner distribution of a
    state pair is controlled by the product of the states' own mixed norms.

    For the all-2 exponent quad the two sides agree exactly, so passing
    ``equality_band`` switches the metric to the two-sided defect
    max |ratio - 1|.  Explicit state ``pairs`` override the random draw.
    """
    ok, reason = exponent_check(quad, "wigner_thm")
    if not ok:
        raise ValueError("exponent quad rejected: %s" % reason)
    spec = ctx.spec
    w1 = _normalized(window1 if window1 is not None else gaussian_state(spec))
    w2 = _normalized(
        window2 if window2 is not None else gaussian_state(spec, width=1.25)
    )
    rng = np.random.default_rng(seed)
    if pairs is None:
        pairs = [
            (random_gaussian_state(spec, rng), random_gaussian_state(spec, rng))
            for _ in range(trials)
        ]
    worst = 0.0
    lo = math.inf
    degenerate_leak = 0.0
    for f1, f2 in pairs:
        lhs = mod_norm_symbol(ctx, wigner(ctx, f1, f2), w1, w2, quad.r, quad.s)
        rhs = mod_norm_vector(ctx, f1, w1, quad.r1, quad.s1) * mod_norm_vector(
            ctx, f2, w2, quad.r2, quad.s2
        )
        if rhs == 0.0:
            degenerate_leak = max(degenerate_leak, lhs)
            continue
        ratio = lhs / rhs
        worst = max(worst, ratio)
        lo = min(lo, ratio)
    context = {
        "quad": quad,
        "pairs": len(pairs),
        "seed": seed,
        "grid": _grid_context(spec),
        "max_ratio": worst,
        "min_ratio": None if lo is math.inf else lo,
        "degenerate_leak": degenerate_leak,
    }
    extra_ok = degenerate_leak <= 1e-12
    if equality_band is not None:
        defect = degenerate_leak
        if lo is not math.inf:
            defect = max(abs(worst - 1.0), abs(lo - 1.0), degenerate_leak)
        return CheckReport.from_metric(
            "wigner-bound", defect, equality_band, context=context
        )
    return CheckReport.from_metric(
        "wigner-bound", worst, SLACK, context=context, extra_ok=extra_ok
    )


_CANONICAL_OP_QUADS = {
    "operator": ExponentQuad(1, INFINITY, 2, 2, 2, 2),
    "trace": ExponentQuad(1, 1, INFINITY, INFINITY, 1, 1),
}


def check_op_bounds(ctx, quad=None, trials=100, norm="operator", seed=0,
                    window1=None, window2=None, symbols=None):
    """Quantization bounds: the operator norm of a quantized symbol is
    controlled by the symbol's (inner sup, outer sum) mixed norm, and the
    trace norm by the (sum, sum) norm.

    The two canonical exponent quads are asserted with slack 1 + 1e-3.  Any
    other valid quad of the same family is measured in report-only mode:
    the mapping constant between the matching vector modulation norms is
    logged without a verdict.
    """
    if norm not in _CANONICAL_OP_QUADS:
        raise ValueError("norm must be 'operator' or 'trace', got %r" % (norm,))
    canonical = _CANONICAL_OP_QUADS[norm]
    if quad is None:
        quad = canonical
    ok, reason = exponent_check(quad, "op_bound")
    if not ok:
        raise ValueError("exponent quad rejected: %s" % reason)
    asserted = _quad_tuple(quad) == _quad_tuple(canonical)
    spec = ctx.spec
    w1 = _normalized(window1 if window1 is not None else gaussian_state(spec))
    w2 = _normalized(
        window2 if window2 is not None else gaussian_state(spec, width=1.25)
    )
    rng = np.random.default_rng(seed)
    if symbols is None:
        symbols = [random_symbol(ctx, rng) for _ in range(trials)]
    worst = 0.0
    degenerate_leak = 0.0
    for a in symbols:
        # the family labels (r, s) enter the symbol norm with the inner
        # exponent s (over the first lattice variable) and the outer r
        sym = mod_norm_symbol(ctx, a, w1, w2, quad.s, quad.r)
        op = quantize(ctx, a)
        if asserted:
            lhs = op.operator_norm() if norm == "operator" else op.trace_norm()
        else:
            probe = random_gaussian_state(spec, rng)
            image = op.apply(probe)
            lhs = mod_norm_vector(ctx, image, w1, quad.r2, quad.s2)
            sym = sym * mod_norm_vector(ctx, probe, w1, quad.r1, quad.s1)
        if sym == 0.0:
            degenerate_leak = max(degenerate_leak, lhs)
            continue
        worst = max(worst, lhs / sym)
    name = "%s-bound" % norm
    context = {
        "quad": quad,
        "canonical": asserted,
        "symbols": len(symbols),
        "seed": seed,
        "grid": _grid_context(spec),
        "max_ratio": worst,
        "degenerate_leak": degenerate_leak,
    }
    if not asserted:
        return CheckReport.report_only(name, worst, context=context)
    extra_ok = degenerate_leak <= 1e-12
    return CheckReport.from_metric(name, worst, SLACK, context=context,
                                   extra_ok=extra_ok)


def check_gauge_covariance(ctx_base, ctx_gauged, chi, trials=3, seed=0,
                           threshold=1e-3, states_box=0.4,
                           width_range=(0.7, 0.9), momentum_box=0.5):
    """Shifting the potential by an exact gradient conjugates quantization
    by the corresponding unimodular multiplier and leaves the twisted
    product untouched (the product depends on the potential only through
    its exterior derivative).

    Requires the two contexts to share one grid, the group to have
    nilpotency step at most 2, and ``ctx_gauged``'s potential to equal
    ``ctx_base``'s shifted by the gradient of ``chi`` exactly.

    The identity is exact except on matrix entries whose translation wraps
    around the box, so the test symbols must keep their mass away from
    separations of half the box: the defaults assume an extent of at least
    ~16 for unit-width states.
    """
    spec = ctx_base.spec
    other = ctx_gauged.spec
    if spec.group.step > 2:
        raise ValueError(
            "gauge covariance check needs nilpotency step <= 2, got step %d"
            % spec.group.step
        )
    if spec.backend != "grid" or other.backend != "grid":
        raise ValueError("gauge covariance check needs the grid backend")
    same = (
        spec.group == other.group
        and spec.n_axis == other.n_axis
        and spec.extent == other.extent
        and spec.epsilon == other.epsilon
    )
    if not same:
        raise ValueError("the two contexts must share one discretization")
    shifted = gauge_shift(ctx_base.potential, chi)
    if list(shifted.components) != list(ctx_gauged.potential.components):
        raise ValueError(
            "gauged potential does not equal the base potential shifted by "
            "the gradient of the given scalar"
        )
    multiplier = np.exp(
        1j * spec.epsilon * eval_poly_grid(spec, chi)
    ).ravel()
    rng = np.random.default_rng(seed)
    ranges = {
        "center_box": states_box,
        "width_range": width_range,
        "momentum_box": momentum_box,
        "chirp_box": 0.0,
    }
    worst_twirl = 0.0
    worst_product = 0.0
    for _ in range(trials):
        a = random_wigner_symbol(ctx_base, rng, **ranges)
        b = random_wigner_symbol(ctx_base, rng, **ranges)
        op_base = quantize(ctx_base, a).matrix
        op_gauged = quantize(ctx_gauged, a).matrix
        conjugated = multiplier[:, None] * op_base * np.conj(multiplier)[None, :]
        worst_twirl = max(
            worst_twirl,
            float(np.linalg.norm(op_gauged - conjugated) / np.linalg.norm(op_base)),
        )
        prod_base = moyal_product(ctx_base, a, b)
        prod_gauged = moyal_product(ctx_gauged, a, b)
        worst_product = max(
            worst_product,
            float(
                np.linalg.norm(prod_gauged.values - prod_base.values)
                / np.linalg.norm(prod_base.values)
            ),
        )
    metric = max(worst_twirl, worst_product)
    context = {
        "grid": _grid_context(spec),
        "seed": seed,
        "trials": trials,
        "conjugation_defect": worst_twirl,
        "product_defect": worst_product,
    }
    return CheckReport.from_metric("gauge-field", metric, threshold,
                                   context=context)


def _grid_context(spec):
    out = {
        "group": spec.group.name,
        "n_axis": spec.n_axis,
        "extent": spec.extent,
        "epsilon": spec.epsilon,
        "backend": spec.backend,
    }
    if spec.backend == "quadrature":
        out["quad_nodes"] = spec.quad_nodes
        out["quad_box"] = spec.quad_box
    return out


# ---------------------------------------------------------------------------
# registry checks
# ---------------------------------------------------------------------------


def _run_orthogonality(seed_seq, thresholds):
    spec = GridSpec(algebra("abelian:1"), 64, 16.0)
    ctx = QuantizerContext(spec)
    rng = np.random.default_rng(seed_seq)
    worst = 0.0
    for _ in range(20):
        f1 = random_gaussian_state(spec, rng)
        f2 = random_gaussian_state(spec, rng)
        w1 = random_gaussian_state(spec, rng)
        w2 = random_gaussian_state(spec, rng)
        lhs = field_inner(ambiguity(ctx, f1, window=w1), ambiguity(ctx, f2, window=w2))
        rhs = inner_product(spec, f1, f2) * inner_product(spec, w2, w1)
        scale = f1.norm() * f2.norm() * w1.norm() * w2.norm()
        worst = max(worst, abs(lhs - rhs) / scale)
    threshold = thresholds.get("orthogonality", 1e-6)
    context = {
        "grid": _grid_context(spec),
        "seed": list(seed_seq),
        "quadruples": 20,
    }
    return [CheckReport.from_metric("orthogonality", worst, threshold,
                                    context=context)]


def _run_unitarity(seed_seq, thresholds):
    spec = GridSpec(algebra("abelian:1"), 16, 8.0)
    ctx = QuantizerContext(spec)
    q = materialize_quantizer(ctx)
    gram = q.conj().T @ q
    defect = float(np.max(np.abs(gram - np.eye(gram.shape[0]))))
    rank = int(np.linalg.matrix_rank(q))
    threshold = thresholds.get("unitarity", 1e-6)
    context = {
        "grid": _grid_context(spec),
        "matrix_rank": rank,
        "full_rank": rank == q.shape[0],
        "size": list(q.shape),
    }
    return [CheckReport.from_metric("unitarity", defect, threshold,
                                    context=context, extra_ok=rank == q.shape[0])]


def _run_rank_one(seed_seq, thresholds):
    spec = GridSpec(algebra("abelian:1"), 32, 16.0)
    ctx = QuantizerContext(spec)
    rng = np.random.default_rng(seed_seq)
    worst = 0.0
    for _ in range(4):
        f = random_gaussian_state(spec, rng)
        w = random_gaussian_state(spec, rng)
        op = quantize(ctx, wigner(ctx, f, w))
        ref = HSOperator.rank_one(f, w)
        worst = max(
            worst,
            float(np.linalg.norm(op.matrix - ref.matrix) / np.linalg.norm(ref.matrix)),
        )
    threshold = thresholds.get("rank-one", 1e-6)
    context = {"grid": _grid_context(spec), "seed": list(seed_seq), "pairs": 4}
    return [CheckReport.from_metric("rank-one", worst, threshold, context=context)]


def _run_reconstruction(seed_seq, thresholds):
    spec = GridSpec(algebra("abelian:1"), 32, 16.0)
    ctx = QuantizerContext(spec)
    rng = np.random.default_rng(seed_seq)
    f = random_gaussian_state(spec, rng)
    amb = ambiguity(ctx, f)
    same = reconstruct(ctx, amb)
    err_same = float(
        np.linalg.norm(same.values - f.values) / np.linalg.norm(f.values)
    )
    other = gaussian_state(spec, center=[0.7], width=1.3, momentum=[0.4])
    via_other = reconstruct(ctx, amb, synthesis_window=other)
    err_other = float(
        np.linalg.norm(via_other.values - f.values) / np.linalg.norm(f.values)
    )
    metric = max(err_same, err_other)
    threshold = thresholds.get("reconstruction", 1e-6)
    context = {
        "grid": _grid_context(spec),
        "seed": list(seed_seq),
        "same_window_error": err_same,
        "other_window_error": err_other,
    }
    return [CheckReport.from_metric("reconstruction", metric, threshold,
                                    context=context)]


def _run_reproducing_kernel(seed_seq, thresholds):
    spec = GridSpec(algebra("abelian:1"), 16, 8.0)
    window = _normalized(gaussian_state(spec))
    ctx = QuantizerContext(spec, window=window)
    rng = np.random.default_rng(seed_seq)
    kernel = reproducing_kernel(ctx)
    diag_defect = float(np.max(np.abs(np.diag(kernel) - 1.0)))
    amb = ambiguity(ctx, random_gaussian_state(spec, rng))
    once = project_field(ctx, kernel, amb)
    fixed = float(
        np.max(np.abs(once.values - amb.values)) / np.max(np.abs(amb.values))
    )
    twice = project_field(ctx, kernel, once)
    idem = float(
        np.max(np.abs(twice.values - once.values)) / np.max(np.abs(once.values))
    )
    metric = max(diag_defect, fixed, idem)
    threshold = thresholds.get("reproducing-kernel", 1e-6)
    context = {
        "grid": _grid_context(spec),
        "seed": list(seed_seq),
        "diagonal_defect": diag_defect,
        "fixed_point_defect": fixed,
        "idempotent_defect": idem,
    }
    return [CheckReport.from_metric("reproducing-kernel", metric, threshold,
                                    context=context)]


def _run_ambiguity_factorization(seed_seq, thresholds):
    """Full-field check that the symbol-plane transform of a Wigner-pair
    symbol splits into a shifted ambiguity times a conjugated one."""
    spec = GridSpec(algebra("abelian:1"), 16, 8.0)
    ctx = QuantizerContext(spec)
    rng = np.random.default_rng(seed_seq)
    n = spec.n_axis
    shape = spec.state_shape

    def draw():
        vals = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        return StateVector(spec, vals)

    f1, f2, p1, p2 = draw(), draw(), draw(), draw()
    field = symbol_ambiguity(ctx, wigner(ctx, f1, f2), wigner(ctx, p1, p2))

    # first factor on the doubled index ranges (true sums, wrapped shifts)
    x = spec.x_axis
    xi_ext = (np.arange(2 * n - 1) - n) * spec.xi_step
    kernel = np.exp(-1j * spec.epsilon * np.outer(xi_ext, x))
    first = np.empty((2 * n - 1, 2 * n - 1), dtype=complex)
    fvals = f1.values
    for u in range(2 * n - 1):
        x_true = (u - n) * spec.h
        shifted = np.roll(p1.values, u - n)
        pref = np.exp(1j * spec.epsilon * xi_ext * x_true / 2.0)
        first[u] = pref * (kernel @ (fvals * np.conj(shifted) * spec.h))
    second = ambiguity(ctx, f2, window=p2).values

    su = np.add.outer(np.arange(n), np.arange(n))
    sv = np.add.outer(np.arange(n), np.arange(n))
    ref = first[su[:, :, None, None], sv[None, None, :, :]]
    ref = np.transpose(ref, (0, 2, 1, 3)) * np.conj(second)[:, :, None, None]
    metric = float(np.max(np.abs(field.values - ref)) / np.max(np.abs(ref)))
    threshold = thresholds.get("ambiguity-factorization", 1e-6)
    context = {"grid": _grid_context(spec), "seed": list(seed_seq)}
    return [CheckReport.from_metric("ambiguity-factorization", metric, threshold,
                                    context=context)]


def _run_wigner_bound(seed_seq, thresholds):
    spec = GridSpec(algebra("abelian:1"), 16, 8.0)
    ctx = QuantizerContext(spec)
    rng = np.random.default_rng(seed_seq)
    sub_seeds = [int(s) for s in rng.integers(0, 2 ** 31, 2)]
    equal = check_wigner_bound(
        ctx,
        ExponentQuad(2, 2, 2, 2, 2, 2),
        trials=50,
        seed=sub_seeds[0],
        equality_band=thresholds.get("wigner-bound-equality", 1e-4),
    )
    sharp = check_wigner_bound(
        ctx,
        ExponentQuad(1, INFINITY, 2, 2, 2, 2),
        trials=50,
        seed=sub_seeds[1],
    )
    return [equal, sharp]


def _run_operator_bound(seed_seq, thresholds):
    spec = GridSpec(algebra("abelian:1"), 16, 8.0)
    ctx = QuantizerContext(spec)
    rng = np.random.default_rng(seed_seq)
    sub_seed = int(rng.integers(0, 2 ** 31))
    return [check_op_bounds(ctx, trials=100, norm="operator", seed=sub_seed)]


def _run_trace_bound(seed_seq, thresholds):
    spec = GridSpec(algebra("abelian:1"), 16, 8.0)
    ctx = QuantizerContext(spec)
    rng = np.random.default_rng(seed_seq)
    sub_seed = int(rng.integers(0, 2 ** 31))
    return [check_op_bounds(ctx, trials=100, norm="trace", seed=sub_seed)]


def _run_gauge_field(seed_seq, thresholds):
    threshold = thresholds.get("gauge-field", 1e-3)
    rng = np.random.default_rng(seed_seq)
    sub_seeds = [int(s) for s in rng.integers(0, 2 ** 31, 2)]

    # plane, constant transverse field: potential x1 dx2, scalar x1 * x2
    plane = algebra("abelian:2")
    spec2 = GridSpec(plane, 8, 20.0)
    a_pot = MagneticPotential([Polynomial.zero(2), Polynomial.var(2, 0)])
    chi = Polynomial.var(2, 0) * Polynomial.var(2, 1)
    base = QuantizerContext(spec2, potential=a_pot)
    gauged = QuantizerContext(spec2, potential=gauge_shift(a_pot, chi))
    plane_report = check_gauge_covariance(
        base, gauged, chi, trials=3, seed=sub_seeds[0], threshold=threshold
    )

    # line: a pure-gradient potential acts exactly like no potential
    line = algebra("abelian:1")
    spec1 = GridSpec(line, 40, 20.0)
    line_pot = MagneticPotential([Polynomial.var(1, 0) * Fraction(1, 2)])
    chi1 = Polynomial.var(1, 0) * Polynomial.var(1, 0) * Fraction(-1, 4)
    base1 = QuantizerContext(spec1, potential=line_pot)
    gauged1 = QuantizerContext(spec1)
    line_report = check_gauge_covariance(
        base1, gauged1, chi1, trials=3, seed=sub_seeds[1], threshold=threshold
    )
    plane_report.context["configuration"] = "plane, transverse potential"
    line_report.context["configuration"] = "line, gradient potential vs none"
    return [plane_report, line_report]


def _run_symbolic_exactness(seed_seq, thresholds):
    """Exact rational identities: associativity of the group product, the
    translation action composing as a homomorphism, the two pair
    substitutions inverting each other, and Jacobi plus nilpotency of the
    extended algebra built on the translate span."""
    rng = np.random.default_rng(seed_seq)
    names = ["abelian:1", "abelian:2", "heisenberg", "engel"]
    failures = []
    details = {}

    def rand_vec(alg):
        nums = rng.integers(-3, 4, alg.dim)
        dens = rng.integers(1, 4, alg.dim)
        return [Fraction(int(p), int(q)) for p, q in zip(nums, dens)]

    for name in names:
        alg = algebra(name)
        d = alg.dim
        entry = {"dim": d, "step": alg.step}

        for _ in range(3):
            x, y, z = rand_vec(alg), rand_vec(alg), rand_vec(alg)
            left = bch_product(alg, bch_product(alg, x, y), z)
            right = bch_product(alg, x, bch_product(alg, y, z))
            if list(left) != list(right):
                failures.append("%s: group product not associative" % name)
                break

        g, h = rand_vec(alg), rand_vec(alg)
        map_g = left_translation_map(alg, g)
        map_h = left_translation_map(alg, h)
        combined = left_translation_map(alg, bch_product(alg, g, h))
        if map_h.compose(map_g) != combined:
            failures.append("%s: translation action is not a homomorphism" % name)

        _, average, average_inv = substitution_maps(alg)
        identity = PolyVector(
            [Polynomial.var(2 * d, i) for i in range(2 * d)]
        )
        if average_inv.compose(average) != identity:
            failures.append("%s: averaged substitution has no left inverse" % name)
        if average.compose(average_inv) != identity:
            failures.append("%s: averaged substitution has no right inverse" % name)

        span = build_translate_span(alg)
        entry["span_dim"] = span.dim
        try:
            _, step, is_nilpotent = semidirect_nilpotency_check(alg, span)
        except ValueError as err:
            failures.append("%s: extended algebra rejected (%s)" % (name, err))
        else:
            entry["extended_step"] = step
            if not is_nilpotent:
                failures.append("%s: extended algebra is not nilpotent" % name)
        details[name] = entry

    threshold = thresholds.get("symbolic-exactness", 0.0)
    context = {"seed": list(seed_seq), "algebras": details, "failures": failures}
    return [CheckReport.from_metric("symbolic-exactness", float(len(failures)),
                                    threshold, context=context)]


def _run_quadrature_orthogonality(seed_seq, thresholds):
    spec = GridSpec(
        algebra("heisenberg"), 8, 12.0, backend="quadrature", quad_nodes=12,
        quad_box=6.0
    )
    rng = np.random.default_rng(seed_seq)
    worst = 0.0
    for _ in range(2):
        states = []
        for _ in range(4):
            center = rng.uniform(-0.5, 0.5, 3)
            momentum = rng.uniform(-0.3, 0.3, 3)
            width = rng.uniform(0.9, 1.1)
            states.append(
                gaussian_state(spec, center=center, width=width, momentum=momentum)
            )
        f1, w1, f2, w2 = states
        lhs = ambiguity_overlap_quadrature(spec, f1, w1, f2, w2)
        rhs = inner_product(spec, f1, f2) * inner_product(spec, w2, w1)
        scale = f1.norm() * f2.norm() * w1.norm() * w2.norm()
        worst = max(worst, abs(lhs - rhs) / scale)
    span_dim = admissible_space(spec.group, MagneticPotential.zero(3)).dim
    threshold = thresholds.get("quadrature-orthogonality", 0.05)
    context = {
        "grid": _grid_context(spec),
        "seed": list(seed_seq),
        "quadruples": 2,
        "span_dim": span_dim,
    }
    return [CheckReport.from_metric("quadrature-orthogonality", worst, threshold,
                                    context=context, extra_ok=span_dim == 4)]


# ---------------------------------------------------------------------------
# the suite
# ---------------------------------------------------------------------------


REGISTRY = (
    ("orthogonality", _run_orthogonality),
    ("unitarity", _run_unitarity),
    ("rank-one", _run_rank_one),
    ("reconstruction", _run_reconstruction),
    ("reproducing-kernel", _run_reproducing_kernel),
    ("ambiguity-factorization", _run_ambiguity_factorization),
    ("wigner-bound", _run_wigner_bound),
    ("operator-bound", _run_operator_bound),
    ("trace-bound", _run_trace_bound),
    ("gauge-field", _run_gauge_field),
    ("symbolic-exactness", _run_symbolic_exactness),
    ("quadrature-orthogonality", _run_quadrature_orthogonality),
)

CHECK_NAMES = tuple(name for name, _ in REGISTRY)

# threshold keys that do not coincide with a registry name
_EXTRA_THRESHOLD_KEYS = ("wigner-bound-equality",)


def run_suite(seed=0, only=None, thresholds=None):
    """Run the registered checks in their fixed order.

    ``only`` restricts to a subset of check names; ``thresholds`` overrides
    named default thresholds.  Returns (reports, timings) where timings maps
    check names to wall seconds.  Randomness is derived from (seed, registry
    position), so a filtered run reproduces exactly the reports of the full
    run.
    """
    thresholds = dict(thresholds or {})
    known = set(CHECK_NAMES) | set(_EXTRA_THRESHOLD_KEYS)
    bad = sorted(set(thresholds) - known)
    if bad:
        raise ValueError(
            "unknown threshold name(s) %s; known: %s"
            % (", ".join(bad), ", ".join(sorted(known)))
        )
    if only is not None:
        only = list(only)
        unknown = [n for n in only if n not in CHECK_NAMES]
        if unknown:
            raise ValueError(
                "unknown check name(s) %s; known: %s"
                % (", ".join(unknown), ", ".join(CHECK_NAMES))
            )
        wanted = set(only)
    else:
        wanted = set(CHECK_NAMES)
    reports = []
    timings = {}
    for index, (name, runner) in enumerate(REGISTRY):
        if name not in wanted:
            continue
        start = time.perf_counter()
        reports.extend(runner([int(seed), index], thresholds))
        timings[name] = time.perf_counter() - start
    return reports, timings
