"""Region coder and the two ways to score a configuration."""

import numpy as np

from ssdwt import DecisionSet, Evaluator, decode_region, encode_region, evaluate, h0_estimate, forward_ssdwt
from ssdwt.corpus import generate

rng = np.random.default_rng(3)
region = rng.integers(-5, 6, (16, 16))
coded = encode_region(region)
print(f"16x16 region of small residuals: {len(coded.data)} bytes, round trip {np.array_equal(decode_region(coded.data, region.shape), region)}")

# the coder adapts to its context: interleaving two populations costs more
low, high = rng.integers(-1, 2, (16, 16)), 40 + rng.integers(-1, 2, (16, 16))
mixed = np.empty((16, 32), np.int64)
mixed[:, 0::2], mixed[:, 1::2] = low, high
print("interleaved", len(encode_region(mixed).data), "bytes, separated", len(encode_region(np.hstack([low, high])).data), "bytes")

image = generate("photo", seed=2, size=64)
dwt = DecisionSet.uniform(3)
print(f"actual bitrate {evaluate(image, dwt):.3f} bpp")
print(f"H0 estimate    {evaluate(image, dwt, Evaluator.ENTROPY_H0):.3f} bpp"
      f" (direct {h0_estimate(forward_ssdwt(image, dwt), 3):.3f})")
