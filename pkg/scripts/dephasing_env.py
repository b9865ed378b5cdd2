"""Phase-diffusion floor versus N for several environment squeezing levels."""
import numpy as np

from kerrbounds import dephasing as dp


def main():
    Ns = np.geomspace(1, 1e4, 9)
    envs = (0.0, 1.0, 100.0, 1e4)
    for order in ("linear", "second_order"):
        print(order)
        print(f"{'N':>9} " + " ".join(f"{'N_E=' + format(e, 'g'):>12}" for e in envs))
        for N in Ns:
            vals = [dp.bound_with_environment(N, e, 1.0, "coherent", order) for e in envs]
            print(f"{N:9.3g} " + " ".join(f"{v:12.4e}" for v in vals))
        print()


if __name__ == "__main__":
    main()
