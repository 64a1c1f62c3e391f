"""Key rate against fibre length with infinitely many decoy states.

Prints the optimized rates of BB84 and SARG04 every 10 km for the GYS
channel, the SARG04 rate without its two-photon part, and the secure
distances and upper bounds.
"""
import numpy as np

from sargqkd.decoy import optimal_mu, secure_distance, upper_bound_distance
from sargqkd.presets import GYS


def main() -> None:
    params = GYS.params
    print(" l/km   BB84 mu   BB84 rate    SARG mu   SARG rate   SARG 1-photon")
    for length in np.arange(0.0, 151.0, 10.0):
        mb, rb = optimal_mu("bb84", params, length)
        ms, rs = optimal_mu("sarg04", params, length)
        r1 = optimal_mu("sarg04", params, length, two_photon=False)[1]
        print(f"{length:5.0f}  {mb:8.4f}  {max(rb, 0):10.3e}  {ms:8.4f}  "
              f"{max(rs, 0):10.3e}  {max(r1, 0):10.3e}")
    for protocol in ("bb84", "sarg04"):
        ub = upper_bound_distance(protocol, params)
        print(f"{protocol}: secure to {secure_distance(protocol, params):.2f} km, "
              f"upper bound {ub.overall_km:.2f} km")


if __name__ == "__main__":
    main()
