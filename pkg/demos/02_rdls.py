"""Denoised lifting: the filter chosen per slot decides what a lifting step sees.

None reproduces the plain transform, Null removes the step, and Median5
feeds the step a median of same-parity neighbours.
"""

from ssdwt import FilterAssignment, FilterId, forward_rdls_ssdwt, inverse_rdls_ssdwt, h0_estimate
from ssdwt.corpus import generate

image = generate("screen", seed=4, size=64)

for fid in FilterId:
    fa = FilterAssignment.uniform(3, fid)
    out = forward_rdls_ssdwt(image, fa)
    ok = inverse_rdls_ssdwt(out, fa) == image
    print(f"{fid.name:8s} H0 {h0_estimate(out, 3):.3f} bpp  reversible: {ok}")

# mixed: median on the first level's high band, null elsewhere on that level
fa = FilterAssignment.uniform(3, FilterId.NONE)
fa = fa.with_slot(1, "H", FilterId.MEDIAN5)
for sub in ("L", "LH", "HH"):
    fa = fa.with_slot(1, sub, FilterId.NULL)
print("mixed derived decision bits", "".join("1" if b else "0" for b in fa.decisions().bits()))
print("mixed reversible:", inverse_rdls_ssdwt(forward_rdls_ssdwt(image, fa), fa) == image)
