"""Print EPI/LEPI coefficients, tight-set tables and the hull for the 3-item example."""

import itertools

from lepi.core import ConcaveFunction, normalize_instance
from lepi.lifting import epi_coefficients, lepi_coefficients_general
from lepi.oracle import distinct_lepis
from lepi.permutation import frontier_sets


def fmt(coef):
    return " + ".join(f"{-int(c)}x{i + 1}" for i, c in enumerate(coef))


def main():
    inst = normalize_instance([1, 2, 3], [[0, 1], [2]], ConcaveFunction.neg_square(), exact=True)
    print("f(z) = -z^2, a = (1,2,3), blocks {1,2} {3}\n")
    for delta in itertools.permutations(range(3)):
        name = tuple(i + 1 for i in delta)
        print(f"{name}:  EPI  w + {fmt(epi_coefficients(inst, delta).coef)} >= 0")
        print(f"{' ' * len(str(name))}   LEPI w + {fmt(lepi_coefficients_general(inst, delta).coef)} >= 0")
        fs = frontier_sets(inst, delta)
        W = [sorted(i + 1 for i in w) for w in fs.W]
        print(f"{' ' * len(str(name))}   h={[p + 1 for p in fs.h]} W={W}")
    print("\nhull facets:")
    for coef in sorted(distinct_lepis(inst)):
        print(f"  w + {fmt(coef)} >= 0")


if __name__ == "__main__":
    main()
