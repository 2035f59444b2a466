"""Acceptance criteria, one printed PASS/FAIL line each.

Run with pytest (lines appear in the terminal summary) or directly:
``python tests/test_acceptance.py``.
"""

import hashlib
import json
import math
import time
from collections import Counter
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from test_transform import oracle_dwt_2d
from ssdwt import (
    CompressConfig,
    DecisionSet,
    FilterAssignment,
    FilterId,
    SampleGrid,
    compress,
    decompress,
    encode_region,
    evaluate,
    fixed_variant_decisions,
    forward_rdls_ssdwt,
    forward_ssdwt,
    h0_estimate,
    load_pgm,
    nominal_regions,
)
from ssdwt._format import Mode
from ssdwt.corpus import KINDS, generate
from ssdwt.search import ImageClass, bh, brute_force_best, classify, predicted_cost, rh, select_variant
from ssdwt.transform import LEGAL_PAIR_STATES, CostCounters, LevelDecisions

GOLDEN = Path(__file__).parent / "golden"


def report(number, title, ok, detail):
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def corpus(size=64, per_kind=3):
    return [(kind, generate(kind, seed, size)) for kind in KINDS for seed in range(per_kind)]


def ss_anchor(g, t, variant):
    return evaluate(g, fixed_variant_decisions(variant, t))


# 1 ---------------------------------------------------------------------------


def criterion_1():
    rng = np.random.default_rng(20240601)
    start = time.perf_counter()
    trips = failures = 0
    cover = set()
    for i in range(200):
        if i == 0:
            h, w = 1, 1
        elif i == 1:
            h, w = 131, 257
        else:
            h, w = int(rng.integers(1, 132)), int(rng.integers(1, 258))
        depth = 8 if i % 2 == 0 else 16
        g = SampleGrid.from_array(rng.integers(0, 1 << depth, (h, w)), depth)
        for k, mode in enumerate(Mode):
            t = (i + k) % 6
            if mode is Mode.SSDWT:
                ds = DecisionSet(tuple(LevelDecisions(*(LEGAL_PAIR_STATES[j] for j in rng.integers(0, 5, 3))) for _ in range(t)))
                config = CompressConfig(mode, t, decisions=ds)
            elif mode is Mode.RDLS_SSDWT:
                fa = FilterAssignment(tuple(tuple(rng.integers(0, 3, 6)) for _ in range(t)))
                config = CompressConfig(mode, t, assignment=fa)
            else:
                config = CompressConfig(mode, t)
            cover.add((mode, t if mode is not Mode.NO_DWT else 0))
            trips += 1
            if decompress(compress(g, config)) != g:
                failures += 1
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 120 and len(cover) == 31
    return ok, f"{trips} round trips over 200 images, {len(cover)} (mode, t) pairs, {failures} mismatches, {elapsed:.1f} s"


# 2 ---------------------------------------------------------------------------


def criterion_2():
    rng = np.random.default_rng(2)
    checks = 0
    ok = True
    for h, w, t in [(1, 1, 3), (5, 9, 2), (16, 16, 3), (33, 17, 4), (64, 48, 5)]:
        a = rng.integers(0, 256, (h, w))
        g = SampleGrid.from_array(a, 8)
        dwt = forward_ssdwt(g, DecisionSet.uniform(t))
        ok &= np.array_equal(dwt.samples, oracle_dwt_2d(a, t))
        ok &= forward_ssdwt(g, fixed_variant_decisions("ALL_SKIP", t)) == g
        ok &= forward_rdls_ssdwt(g, FilterAssignment.uniform(t, FilterId.NONE)) == dwt
        ok &= forward_rdls_ssdwt(g, FilterAssignment.uniform(t, FilterId.NULL)) == forward_ssdwt(g, fixed_variant_decisions("ALL_SKIP", t))
        checks += 4
    return bool(ok), f"{checks} exact equalities (SSDWT-none vs scalar DWT oracle, ALL_SKIP identity, RDLS all-None, RDLS all-Null)"


# 3 ---------------------------------------------------------------------------


def criterion_3():
    g = SampleGrid.from_array(np.random.default_rng(3).integers(0, 256, (64, 64)), 8)
    counts = {}
    for v in ("DWT", "FIX1", "FIX2"):
        c = CostCounters()
        forward_ssdwt(g, fixed_variant_decisions(v, 3), c)
        counts[v] = c.lifting_steps
    expected = Fraction(8, 3) * (1 - Fraction(1, 4**3)) * 4096
    r1 = Fraction(counts["FIX1"], counts["DWT"])
    r2 = Fraction(counts["FIX2"], counts["DWT"])
    ok = counts["DWT"] == expected == 10752 and r1 == Fraction(1, 2) and r2 == Fraction(3, 8)
    return ok, f"DWT {counts['DWT']} steps (expected {expected}), FIX1/DWT = {r1}, FIX2/DWT = {r2}"


# 4 ---------------------------------------------------------------------------


def criterion_4():
    worst = {}
    ok = True
    for size in (32, 64):
        for kind, g in corpus(size, 2):
            p = g.pixels
            for name, fn in (("BH", bh), ("RH", rh)):
                for n in (1, 2):
                    c = CostCounters()
                    fn(g, 3, n, counters=c)
                    bound = predicted_cost(name.lower(), n, 3)
                    sym_bound = bound.symbols if name == "BH" else bound.te
                    rs = c.encoded_symbols / float(sym_bound * p)
                    rl = c.lifting_steps / float(bound.lifting * p)
                    ok &= rs <= 1 and rl <= 1
                    key = f"{name}({n})"
                    ws, wl = worst.get(key, (0, 0))
                    worst[key] = (max(ws, rs), max(wl, rl))
    detail = ", ".join(f"{k} symbols<={v[0]:.3f} lifting<={v[1]:.3f} of bound" for k, v in worst.items())
    return bool(ok), detail


# 5 ---------------------------------------------------------------------------


def criterion_5():
    ok = True
    images = corpus(64, 3)
    side = []
    for kind, g in images:
        anchor = min(ss_anchor(g, 3, "DWT"), ss_anchor(g, 3, "ALL_SKIP"))
        b1, b2, r1 = bh(g, 3, 1).bpp, bh(g, 3, 2).bpp, rh(g, 3, 1).bpp
        ok &= b2 <= b1 <= anchor and r1 <= anchor
        side.append(8 * 4 / g.pixels)
    return bool(ok), f"{len(images)} images: BH(2) <= BH(1) <= step A and RH(1) <= step A, side info {side[0]:.5f} bpp included"


# 6 ---------------------------------------------------------------------------


def criterion_6():
    start = time.perf_counter()
    gaps_bh, gaps_rh = [], []
    ok = True
    images = [generate(kind, 100 + seed, 32) for kind in KINDS for seed in range(5)]
    for g in images:
        best = brute_force_best(g, 1)
        ok &= best.combinations == 125
        b, r = bh(g, 1, 2).bpp, rh(g, 1, 1).bpp
        ok &= b >= best.bpp and r >= best.bpp
        gaps_bh.append(b - best.bpp)
        gaps_rh.append(r - best.bpp)
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60
    return bool(ok), f"20 images, mean gap BH(2) {np.mean(gaps_bh):.4f} bpp, RH(1) {np.mean(gaps_rh):.4f} bpp, {elapsed:.1f} s"


# 7 ---------------------------------------------------------------------------


def _histogram_h0(array, t):
    h, w = array.shape
    bits = 0.0
    for r in nominal_regions(w, h, t):
        values = r.view(array).ravel().tolist()
        n = len(values)
        bits += -sum(c * math.log2(c / n) for c in Counter(values).values())
    return bits / array.size


def criterion_7():
    rng = np.random.default_rng(7)
    err = 0.0
    for _ in range(50):
        h, w, t = int(rng.integers(1, 40)), int(rng.integers(1, 40)), int(rng.integers(0, 4))
        a = rng.integers(-int(rng.integers(1, 300)), 300, (h, w))
        err = max(err, abs(h0_estimate(a, t) - _histogram_h0(a, t)))
    g = generate("photo", 7, 64)
    c = CostCounters()
    choice = select_variant(g, ["FIX1", "FIX2", "DWT"], "h0", c)
    data = compress(g, CompressConfig(select=("FIX1", "FIX2", "DWT"), select_evaluator="h0"))
    ok = err < 1e-9 and c.encoded_symbols == g.pixels and c.entropy_evals >= g.pixels and decompress(data) == g
    return ok, f"max |H0 - oracle| = {err:.2e}; H0 selection chose {choice.variant.name}, encoded {c.encoded_symbols} = p, entropy evals {c.entropy_evals}"


# 8 ---------------------------------------------------------------------------


def criterion_8():
    rng = np.random.default_rng(8)
    low = rng.integers(-1, 2, (16, 16))
    high = 40 + rng.integers(-1, 2, (16, 16))
    interleaved = np.empty((16, 32), np.int64)
    interleaved[:, 0::2], interleaved[:, 1::2] = low, high
    separated = np.hstack([low, high])
    a, b = len(encode_region(interleaved).data), len(encode_region(separated).data)
    return a > b, f"interleaved {a} bytes > separated {b} bytes"


# 9 ---------------------------------------------------------------------------


def criterion_9():
    screens = [generate("screen", seed, 64) for seed in range(10)]
    drs = []
    for g in screens:
        ref = 8 * len(compress(g, CompressConfig(Mode.DWT, 3))) / g.pixels
        fix2 = 8 * len(compress(g, CompressConfig(Mode.FIX2, 3))) / g.pixels
        drs.append(100 * (fix2 - ref) / ref)
    mean_dr = float(np.mean(drs))
    a_images = [g for _, g in corpus(64, 5) if classify(g) is ImageClass.NO_PHOTO_A]
    per_image = all(bh(g, 3, 1).bpp <= ss_anchor(g, 3, "ALL_SKIP") for g in a_images)
    ok = mean_dr < 0 and per_image and len(a_images) > 0
    return ok, f"screen subset mean dr(FIX2) = {mean_dr:.2f}%; NoPhotoA subset {len(a_images)} images, BH(1) <= ALL_SKIP on each: {per_image}"


# 10 --------------------------------------------------------------------------


def criterion_10():
    cases = json.loads((GOLDEN / "cases.json").read_text())
    ok = {c["mode"] for c in cases} == {m.name for m in Mode} and len(cases) >= 3
    for case in cases:
        data = (GOLDEN / f"{case['name']}.ssd").read_bytes()
        ok &= hashlib.sha256(data).hexdigest() == case["sha256"]
        ok &= decompress(data) == load_pgm(GOLDEN / case["source"])
    return bool(ok), f"{len(cases)} golden containers covering {len({c['mode'] for c in cases})} modes decode exactly"


CRITERIA = [
    (1, "lossless round trip", criterion_1),
    (2, "special-case equivalences", criterion_2),
    (3, "lifting-count identity", criterion_3),
    (4, "complexity bounds", criterion_4),
    (5, "greedy monotonicity", criterion_5),
    (6, "oracle optimality gap", criterion_6),
    (7, "H0 fidelity", criterion_7),
    (8, "coder context sensitivity", criterion_8),
    (9, "directional behavior", criterion_9),
    (10, "format pinning", criterion_10),
]


@pytest.mark.parametrize("number, title, check", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, check):
    ok, detail = check()
    assert report(number, title, ok, detail), detail


if __name__ == "__main__":
    results = [report(n, title, *check()) for n, title, check in CRITERIA]
    raise SystemExit(0 if all(results) else 1)
