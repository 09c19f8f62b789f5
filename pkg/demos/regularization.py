"""Pushing a class into the Mumford-regular range with the Koszul complex.

[O(-1)] on P^2 is not regular.  One Koszul rewrite gives
3[O] - 3[O(1)] + [O(2)], whose terms are regular, and the Hilbert vector
is unchanged.
"""

from pbk0.corpus import laurent_map, line_bundle
from pbk0.k0 import K0FormalClass, class_invariants, regularize_class
from pbk0.polyalg import PolyRing
from pbk0.relcat import identity_triple
from pbk0.sheafcoh import ProjBundleMap, Sheaf


def describe(c):
    return " + ".join(f"{m}[O({T.left_presentation.twists[0]})]" for T, m in c.terms)


def main():
    f = laurent_map()
    ctx = ProjBundleMap(f, 2)
    ring = PolyRing(f.source, 2)
    c = K0FormalClass.of(identity_triple(Sheaf(line_bundle(ring, -1)), ctx))
    res = regularize_class(c)
    print("before:", describe(c), class_invariants(c))
    print("after: ", describe(res.cls), class_invariants(res.cls))
    print("rounds:", res.rounds, "koszul certificates:", len(res.certificates))


if __name__ == "__main__":
    main()
