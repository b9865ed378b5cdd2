"""Error floors of the linear and second-order schemes, with and without a
squeezed environment."""
import argparse

from kerrbounds import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eta", type=float, default=0.9)
    ap.add_argument("--beta-delta", type=float, default=1.0)
    ap.add_argument("--gamma-delta", type=float, default=1.0)
    ap.add_argument("--n", type=float, default=10.0)
    ap.add_argument("--n-env", type=float, default=100.0)
    a = ap.parse_args()
    params = {"eta": a.eta, "beta_delta": a.beta_delta, "gamma_delta": a.gamma_delta, "N": a.n, "N_E": a.n_env}
    cells = cli.summary_cells(a.eta, a.beta_delta, a.gamma_delta, a.n, a.n_env)
    print(cli.render_summary(cells, params), end="")


if __name__ == "__main__":
    main()
