"""Container round trip and a small benchmark run through the CLI."""

import tempfile
from pathlib import Path

from ssdwt import CompressConfig, SearchConfig, compress_detailed, decompress
from ssdwt._format import Mode
from ssdwt.cli import main
from ssdwt.corpus import generate, write_corpus

image = generate("gradient", seed=1, size=64)
for config in (CompressConfig(Mode.DWT), CompressConfig(Mode.FIX2), CompressConfig(Mode.SSDWT, search=SearchConfig("rh")),
               CompressConfig(Mode.RDLS_SSDWT)):
    res = compress_detailed(image, config)
    print(f"{res.mode.name:10s} {len(res.data):5d} bytes  {res.bpp:.3f} bpp  side info {res.side_info_bytes} B"
          f"  lossless {decompress(res.data) == image}")

with tempfile.TemporaryDirectory() as tmp:
    manifest = write_corpus(Path(tmp), per_kind=2, size=64)
    main(["bench", "--manifest", str(manifest), "--variants", "dwt,fix2,bh:1,rh:1", "--csv", str(Path(tmp) / "bench.csv")])
