import csv
import io
import math
import subprocess
import sys

import numpy as np
import pytest

from ssdwt import SampleGrid, load_pgm, save_pgm
from ssdwt.cli import main
from ssdwt.corpus import write_corpus


@pytest.fixture
def pgm(tmp_path, rng):
    path = tmp_path / "img.pgm"
    y, x = np.mgrid[:24, :20]
    save_pgm(SampleGrid.from_array(np.clip(x * 5 + y * 3 + rng.integers(0, 4, (24, 20)), 0, 255), 8), path)
    return path


@pytest.mark.parametrize(
    "flags",
    [
        ["--mode", "fix2"],
        ["--mode", "nodwt"],
        ["--mode", "dwt", "--levels", "0"],
        ["--mode", "ss", "--heuristic", "rh", "--iters", "1", "--estimator", "h0"],
        ["--mode", "ss", "--heuristic", "bh-tr", "--iters", "2"],
        ["--mode", "rdls-ss", "--filters", "none,null"],
        ["--mode", "select", "--candidates", "fix1,fix2,dwt", "--estimator", "h0"],
    ],
)
def test_compress_decompress(tmp_path, pgm, flags, capsys):
    out = tmp_path / "img.ssd"
    back = tmp_path / "back.pgm"
    assert main(["compress", "--in", str(pgm), "--out", str(out), *flags]) == 0
    assert main(["decompress", "--in", str(out), "--out", str(back), "--verify", str(pgm)]) == 0
    assert back.read_bytes() == pgm.read_bytes()
    assert "identical" in capsys.readouterr().out


def test_stats(tmp_path, pgm, capsys):
    main(["compress", "--in", str(pgm), "--out", str(tmp_path / "a.ssd"), "--mode", "ss", "--stats"])
    text = capsys.readouterr().out
    assert "side info    4 bytes" in text and "decisions" in text and "encoded" in text


def test_unknown_mode_is_usage_error(tmp_path, pgm):
    with pytest.raises(SystemExit) as info:
        main(["compress", "--in", str(pgm), "--out", str(tmp_path / "x"), "--mode", "wavelet"])
    assert info.value.code == 2


def test_corrupt_file_diagnostic(tmp_path, pgm, capsys):
    out = tmp_path / "img.ssd"
    main(["compress", "--in", str(pgm), "--out", str(out)])
    out.write_bytes(out.read_bytes()[:-4])
    assert main(["decompress", "--in", str(out), "--out", str(tmp_path / "b.pgm")]) == 1
    err = capsys.readouterr().err
    assert "CorruptPayload" in err and "offset" in err
    assert not (tmp_path / "b.pgm").exists()


def test_verify_mismatch(tmp_path, pgm, rng):
    out = tmp_path / "img.ssd"
    other = tmp_path / "other.pgm"
    save_pgm(SampleGrid.from_array(rng.integers(0, 256, (24, 20)), 8), other)
    main(["compress", "--in", str(pgm), "--out", str(out)])
    assert main(["decompress", "--in", str(out), "--verify", str(other)]) == 1


def _bench(tmp_path, manifest, variants, extra=()):
    out = tmp_path / "bench.csv"
    code = main(["bench", "--manifest", str(manifest), "--variants", variants, "--csv", str(out), *extra])
    return code, out.read_text()


def test_bench_shape_and_dr(tmp_path):
    manifest = write_corpus(tmp_path / "c", per_kind=1, size=32, kinds=("screen", "photo"))
    code, text = _bench(tmp_path, manifest, "dwt,fix1,fix2", ["--no-timing"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 2
    header = text.splitlines()[0].split(",")
    assert len(header) == 4 + 3 * 5
    for row in rows:
        ref = float(row["r[dwt]"])
        for v in ("dwt", "fix1", "fix2"):
            r = float(row[f"r[{v}]"])
            assert math.isclose(float(row[f"dr[{v}]"]), 100 * (r - ref) / ref, rel_tol=1e-9, abs_tol=1e-12)


def test_bench_deterministic(tmp_path):
    manifest = write_corpus(tmp_path / "c", per_kind=1, size=32)
    first = _bench(tmp_path, manifest, "dwt,rh:1,fix1+fix2+dwt", ["--no-timing"])
    second = _bench(tmp_path, manifest, "dwt,rh:1,fix1+fix2+dwt", ["--no-timing"])
    assert first == second


def test_bench_constant_image(tmp_path):
    (tmp_path / "flat.pgm").write_bytes(b"P5\n16 16\n255\n" + bytes(256))
    (tmp_path / "m.csv").write_text("flat.pgm,nonphoto\n")
    code, text = _bench(tmp_path, tmp_path / "m.csv", "dwt,allskip,bh:1,rh:1", ["--no-timing"])
    row = next(csv.DictReader(io.StringIO(text)))
    assert code == 0
    # with the 4 decision bytes taken out, the skipping variants are no worse than DWT
    ref = float(row["r[dwt]"])
    for v in ("allskip", "bh:1", "rh:1"):
        assert float(row[f"r[{v}]"]) - 8 * 4 / 256 <= ref


def test_bench_missing_file(tmp_path, capsys):
    manifest = write_corpus(tmp_path / "c", per_kind=1, size=16, kinds=("noise",))
    manifest.write_text(manifest.read_text() + "nowhere.pgm,photo\n")
    code, text = _bench(tmp_path, manifest, "dwt")
    assert code == 1
    assert len(text.splitlines()) == 2
    assert "missing: nowhere.pgm" in capsys.readouterr().err


def test_bench_summary_subsets(tmp_path, capsys):
    manifest = write_corpus(tmp_path / "c", per_kind=1, size=16)
    _bench(tmp_path, manifest, "dwt,fix2", ["--no-timing"])
    out = capsys.readouterr().out
    for subset in ("photo", "nonphoto", "nonphoto-a", "nonphoto-b", "all"):
        assert any(line.startswith(subset) for line in out.splitlines())


def test_cost(capsys):
    assert main(["cost", "--heuristic", "bh", "--iters", "1"]) == 0
    assert "7.33 T_E + 5.33 T_D + T_R" in capsys.readouterr().out
    main(["cost", "--heuristic", "rh", "--iters", "1", "--timings", "29.0,411.9,102.7,4.2"])
    text = capsys.readouterr().out
    assert "5.33 T_E + 3.42 T_D + T_R" in text
    assert "predicted relative time 4.41" in text and "with H0 estimation      1.17" in text
    main(["cost", "--heuristic", "bh", "--iters", "0"])
    assert "2.00 T_E + 1.00 T_D" in capsys.readouterr().out


def test_cost_with_image(pgm, capsys):
    assert main(["cost", "--heuristic", "rh", "--image", str(pgm)]) == 0
    assert "measured on" in capsys.readouterr().out


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ssdwt", "corpus", "--out", str(tmp_path / "c"), "--per-kind", "1", "--size", "8"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert load_pgm(tmp_path / "c" / "noise_00.pgm").width == 8
