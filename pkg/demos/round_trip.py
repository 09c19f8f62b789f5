"""Round trip between classes on P^r and vectors of classes over the base.

Start from a vector of classes over the base map, assemble a class on P^r
with u, decompose it again with phi and compare invariants.  The basis
vector ([(A, t, A)], 0, ..., 0) has det vector (t, 1, ..., 1).
"""

import sys

from pbk0.corpus import fvector_corpus
from pbk0.k0 import roundtrip_verify


def show(name, rep):
    status = "PASS" if rep.passed else "FAIL"
    print(f"{name}: {status} {rep.checks}")
    if "det_vector" in rep.details:
        print("  det vector:", ", ".join(rep.details["det_vector"]))


def main(r=2):
    for it in fvector_corpus(seed=7, r=r, n=5):
        show(it.name, roundtrip_verify(it.value))


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 2)
