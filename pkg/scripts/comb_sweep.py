"""Sweep the comb capacity c0(N) for m = sqrt(N) in 2..60.

Writes comb_sweep.csv and prints the approach of c0*sqrt(N) to the
limit tanh(1) = (e^2-1)/(e^2+1).
"""

from disclab import tree


def main():
    rows = tree.comb_sweep(range(2, 61))
    tree.sweep_to_csv(rows, "comb_sweep.csv")
    for row in rows:
        if row.big_n in (4, 16, 100, 400, 1600, 3600):
            print(
                f"N={row.big_n:5d}  c0={row.c0:.8f}  c0*sqrtN={row.c0_sqrt_n:.6f}  "
                f"gap to tanh(1)={row.limit_gap:.2e}"
            )
    print(f"limit tanh(1) = {tree.COMB_LIMIT:.6f}")
    print("wrote comb_sweep.csv")


if __name__ == "__main__":
    main()
