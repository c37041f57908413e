"""Tour of the phase-space layer on the line: ambiguity tables,
the orthogonality identity, rank-one quantization, and reconstruction.

Run:  python3 demos/phase_space_tour.py [--n 16] [--extent 8] [--seed 0]
"""

import argparse

import numpy as np

from magweyl.nilpotent import algebra
from magweyl.repspace import GridSpec, field_inner, gaussian_state, inner_product
from magweyl.repspace import HSOperator
from magweyl.weyl import QuantizerContext, ambiguity, quantize, reconstruct, wigner


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=16)
    parser.add_argument("--extent", type=float, default=8.0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    spec = GridSpec(algebra("abelian:1"), args.n, args.extent)
    window = gaussian_state(spec)
    ctx = QuantizerContext(spec, window=window)
    print("line group, %d points, box %.1f, lattice step %.4f"
          % (spec.n_axis, spec.extent, spec.extent / spec.n_axis))

    # A displaced Gaussian: its ambiguity table against the centered window
    # peaks at the displacement, up to the half-step lattice snap.
    f = gaussian_state(spec, center=[1.5], momentum=[0.75])
    table = ambiguity(ctx, f)
    k = np.argmax(np.abs(table.values))
    ix, ik = np.unravel_index(k, table.values.shape)
    print("ambiguity peak at x=%.2f, xi=%.2f (state displaced to x=1.50, xi=0.75)"
          % (spec.x_axis[ix], spec.xi_axis[ik]))

    # Orthogonality: pairing two ambiguity tables equals the product of the
    # state pairings, exactly on the lattice.
    rng = np.random.default_rng(args.seed)
    def rand_state():
        return gaussian_state(
            spec,
            center=[rng.uniform(-1, 1)],
            width=rng.uniform(0.8, 1.3),
            momentum=[rng.uniform(-1, 1)],
        )
    f1, f2, w1, w2 = rand_state(), rand_state(), rand_state(), rand_state()
    lhs = field_inner(ambiguity(ctx, f1, window=w1), ambiguity(ctx, f2, window=w2))
    rhs = inner_product(spec, f1, f2) * inner_product(spec, w2, w1)
    print("orthogonality: |lhs - rhs| = %.3e  (lhs = %s)" % (abs(lhs - rhs), lhs))

    # Quantizing the cross-Wigner table of (f, window) gives the rank-one
    # operator f (window | . ) exactly (representation parameter 1).
    symbol = wigner(ctx, f)
    op = quantize(ctx, symbol)
    target = HSOperator.rank_one(f, window)
    err = np.max(np.abs(op.matrix - target.matrix)) / np.max(np.abs(target.matrix))
    print("rank-one quantization: relative deviation %.3e" % err)

    # Reconstruction: resynthesize f from its ambiguity table.
    back = reconstruct(ctx, table)
    rel = np.linalg.norm(back.values - f.values) / np.linalg.norm(f.values)
    print("reconstruction from the ambiguity table: relative error %.3e" % rel)


if __name__ == "__main__":
    main()
