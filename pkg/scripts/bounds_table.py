"""Print k_n, beta'_{k_n}, the theorem bound and g for a range of n.

    python3 scripts/bounds_table.py --s 1.0 --c 1.0
"""
import argparse
import math

from rkhs_sampling import FourierSobolevModel, beta_prime, k_of_n, minimal_n, oliveira_g, theorem_rhs
from rkhs_sampling.certificates import DegenerateKError


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--decades", type=int, nargs=2, default=(3, 8))
    args = p.parse_args()
    model = FourierSobolevModel(args.s)
    print(f"smallest n with k_n >= 2 at c={args.c}: {minimal_n(args.c)}")
    print(f"{'n':>12} {'k_n':>8} {'beta_prime':>14} {'theorem_rhs':>14} {'g':>8}")
    for e in range(args.decades[0], args.decades[1] + 1):
        n = 10**e
        try:
            k = k_of_n(n, args.c)
        except DegenerateKError:
            print(f"{n:>12} {0:>8} {'-':>14} {'-':>14} {'-':>8}")
            continue
        g = oliveira_g(n, math.sqrt(2 * k), args.c).value
        print(f"{n:>12} {k:>8} {beta_prime(model, k):>14.6e} "
              f"{theorem_rhs(model, k):>14.6e} {g:>8.4f}")


if __name__ == "__main__":
    main()
