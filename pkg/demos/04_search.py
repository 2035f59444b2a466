"""Greedy searches over skip decisions, compared with exhaustive search at t=1."""

from ssdwt import CostCounters, Evaluator, bh, brute_force_best, classify, h_ss_rdls, predicted_cost, rh, select_variant
from ssdwt.corpus import KINDS, generate

for kind in KINDS:
    image = generate(kind, seed=0, size=64)
    line = [f"{kind:9s} {classify(image).name:10s}"]
    for name, run in (("BH(1)", lambda g: bh(g, 3, 1)), ("BH(2)", lambda g: bh(g, 3, 2)),
                      ("RH(1)", lambda g: rh(g, 3, 1)), ("RDLS", lambda g: h_ss_rdls(g, 3, 1))):
        out = run(image)
        line.append(f"{name} {out.bpp:.3f}")
    print("  ".join(line))

image = generate("screen", seed=5, size=32)
best = brute_force_best(image, 1)
print(f"\nexhaustive t=1: {best.bpp:.4f} bpp over {best.combinations} configs;"
      f" BH(2) {bh(image, 1, 2).bpp:.4f}, RH(1) {rh(image, 1, 1).bpp:.4f}")

out = bh(image, 3, 1)
print(f"\nBH(1) audit: {len(out.audit)} trials, {out.accepted} accepted")
for trial in out.audit[:6]:
    print("  ", trial)

c = CostCounters()
choice = select_variant(image, ["FIX1", "FIX2", "DWT"], Evaluator.ENTROPY_H0, c)
print(f"\nH0 selection picked {choice.variant.name}; estimates {({k.name: round(v, 3) for k, v in choice.values.items()})}")

for h in ("bh", "rh"):
    cost = predicted_cost(h, 1)
    print(f"{h.upper()}(1) cost {cost.formula()}, relative time {cost.relative_time(29.0, 411.9, 102.7):.2f}")
