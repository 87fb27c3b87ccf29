"""Why the key rate rises with the Poisson intensity under the entropy-bound capacity.

Prints, for each lambda, the two bound terms of the capacity and the bound slack
U - L of the noise alone (the capacity at vanishing signal).
"""
import argparse

from qskr.gmm import entropy_bounds
from qskr.noise_channel import (
    ChannelUse,
    HybridNoiseParams,
    TransmittedSignal,
    hybrid_noise_mixture,
    received_signal_mixture,
)
from qskr.skr import DetectorParams, secret_key_rate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sigma-x2", type=float, default=1.0)
    ap.add_argument("--var-thermal", type=float, default=0.25)
    args = ap.parse_args()
    sig, ch, det = TransmittedSignal(args.sigma_x2), ChannelUse(1.0), DetectorParams()
    print(f"{'lambda':>6} {'U_Y':>8} {'L_Z':>8} {'C':>8} {'U_Z-L_Z':>8} {'K':>8}")
    for lam in (0.5, 1, 2, 3, 4, 5, 6, 8):
        noise = HybridNoiseParams(float(lam), 0.0, args.var_thermal)
        u_y = entropy_bounds(received_signal_mixture(sig, ch, noise))[1]
        l_z, u_z = entropy_bounds(hybrid_noise_mixture(noise))
        k = secret_key_rate(sig, ch, noise, det)
        print(f"{lam:6.1f} {u_y:8.4f} {l_z:8.4f} {u_y - l_z:8.4f} {u_z - l_z:8.4f} {k.skr:8.4f}")


if __name__ == "__main__":
    main()
