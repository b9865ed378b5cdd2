"""Loss bounds for squeezed vacuum at eta = 0.9, N = 1..20.

Prints delta phi per method; --out also writes the rows as CSV.
"""
import argparse

from kerrbounds import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eta", type=float, default=0.9)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    req = cli.CurveRequest(
        family="squeezed_vacuum", noise="loss", methods=cli.DEFAULT_LOSS_METHODS,
        grid=cli.n_grid(1, 20, 20, "linear"), eta=args.eta, max_dim=1024,
    )
    rows = cli.loss_samples(req)
    print(f"{'N':>4} " + " ".join(f"{m:>12}" for m in cli.DEFAULT_LOSS_METHODS))
    for N in req.grid:
        vals = {r["method"]: r["delta_phi_lower"] for r in rows if r["N"] == N}
        print(f"{N:4.0f} " + " ".join(f"{vals[m]:12.4e}" for m in cli.DEFAULT_LOSS_METHODS))
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(cli.to_csv(rows, cli.LOSS_COLUMNS))


if __name__ == "__main__":
    main()
