"""How much bit error can two-way post-processing absorb?

Runs the exhaustive B/P sequence search for a one-photon and a two-photon
SARG04 source and prints the best tolerable bit error rate for every
maximum sequence length, next to the one-way starting point.
"""
from sargqkd.distill import format_sequence, search_best_sequence
from sargqkd.geometry import one_way_threshold


def main() -> None:
    for protocol, steps in (("sarg1", 9), ("sarg2", 6)):
        print(f"{protocol}: one-way threshold with mutual information "
              f"{100 * one_way_threshold(protocol):.2f}%")
        result = search_best_sequence(steps, protocol)
        for n, seq, ber in result.per_length:
            print(f"  {n:2d} steps  {format_sequence(seq):>10s}  {100 * ber:6.2f}%")
        print()


if __name__ == "__main__":
    main()
