"""Step-skipping 5/3 lifting on a small image.

Shows the subband layout after a full decomposition, what skipping does to
a level, and that every legal decision set inverts exactly.
"""

import numpy as np

from ssdwt import DecisionSet, CostCounters, fixed_variant_decisions, forward_ssdwt, inverse_ssdwt, nominal_regions
from ssdwt.corpus import generate
from ssdwt.transform import LEGAL_PAIR_STATES, LevelDecisions

image = generate("photo", seed=1, size=32)
print(f"image {image.width}x{image.height}, {image.bit_depth} bits")

for variant in ("DWT", "FIX1", "FIX2", "ALL_SKIP"):
    c = CostCounters()
    out = forward_ssdwt(image, fixed_variant_decisions(variant, 3), c)
    ll = nominal_regions(image.width, image.height, 3)[0]
    print(f"{variant:9s} lifting steps {c.lifting_steps:5d}   LL3 mean {ll.view(out.samples).mean():7.2f}")

# the five legal per-pair states
for pair in LEGAL_PAIR_STATES:
    print("pair state", pair)

rng = np.random.default_rng(0)
for _ in range(5):
    ds = DecisionSet(tuple(LevelDecisions(*(LEGAL_PAIR_STATES[i] for i in rng.integers(0, 5, 3))) for _ in range(3)))
    back = inverse_ssdwt(forward_ssdwt(image, ds), ds)
    print("bits", "".join("1" if b else "0" for b in ds.bits()), "inverts:", back == image)
