"""Quillen data of (O(1), t, O(1)) on P^1 over k[t] -> k[t, t^-1].

The sections of O(1) form A^2 and the kernel of the evaluation map is
O(-1), so the resolution has two stages.  The script prints the ranks, the
transported alpha on each stage and the certificates behind them.
"""

from pbk0.corpus import laurent_map, line_bundle, matrix_triple
from pbk0.k0 import K0FormalClass, phi_decompose, rank_vector
from pbk0.polyalg import PolyRing
from pbk0.quillen import relative_quillen_resolution
from pbk0.sheafcoh import ProjBundleMap


def main():
    f = laurent_map()
    ctx = ProjBundleMap(f, 1)
    T = matrix_triple(line_bundle(PolyRing(f.source, 1), 1), [["t"]], ctx)
    print("triple:", T)

    rq = relative_quillen_resolution(T)
    for n, stage in enumerate(rq.stages):
        alpha = [[str(p) for p in row] for row in stage.alpha.matrix]
        print(f"stage {n}: rank {stage.left_presentation.rank}, alpha {alpha}")
    for k in ("Z_r_zero", "squares_commute"):
        print(f"{k}: {rq.certificate[k]}")
    print("left long exact:", rq.certificate["left"]["long_exact"])

    w = phi_decompose(K0FormalClass.of(T))
    print("signed ranks of phi:", rank_vector(w))


if __name__ == "__main__":
    main()
