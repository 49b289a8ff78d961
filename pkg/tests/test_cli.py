import json
import os

from modlap import masks
from modlap.cli import main
from modlap.dynamics import Schedule
from modlap.metrics import csv_header
from modlap.seeds import builtin_seed

from oracle import oracle_step

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def test_run_streams_csv(tmp_path, capsys):
    out = tmp_path / "m.csv"
    assert main(["run", "--steps", "16", "--csv", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == csv_header(2)
    assert len(lines) == 18
    assert "rho=" in capsys.readouterr().err


def test_run_csv_to_stdout(capsys):
    assert main(["run", "--steps", "3", "--csv", "-", "--schedule", "3*"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == csv_header(3)
    assert len(out) == 5


def test_run_writes_frames(tmp_path):
    assert main(["run", "--steps", "4", "--frames", str(tmp_path), "--frame-every", "2"]) == 0
    assert sorted(os.listdir(tmp_path)) == ["frame_00000.pgm", "frame_00002.pgm", "frame_00004.pgm"]


def test_usage_errors(capsys):
    assert main([]) == 1
    assert main(["bogus"]) == 1
    assert main(["run", "--schedule", "2,3"]) == 1
    assert main(["run", "--mask", "no-such-mask.txt"]) == 1
    assert main(["fingerprint", "--horizon", "8"]) == 1
    assert capsys.readouterr().out == ""


def test_io_error_exit_code(tmp_path):
    assert main(["run", "--csv", str(tmp_path / "missing" / "x.csv")]) == 2
    assert main(["sweep", str(tmp_path / "absent.json")]) == 2


def test_show(capsys):
    assert main(["mask", "show", "von-neumann"]) == 0
    assert capsys.readouterr().out == ".X.\nXoX\n.X.\n"
    assert main(["seed", "show", "neumann"]) == 0
    assert capsys.readouterr().out == ".1.\n111\n.1.\n"


def test_periods(capsys):
    assert main(["periods", "--k", "3", "--seed", "point", "--mask", "moore", "--horizon", "30"]) == 0
    out = capsys.readouterr().out
    assert "# law: multiples of 27" in out
    assert "kind=" in out


def test_fingerprint(capsys):
    assert main(["fingerprint", "--schedule", "2*", "--horizon", "64"]) == 0
    assert "phase8=0" in capsys.readouterr().out


def test_classify(capsys):
    assert main(["classify", "--mask", "diag-neumann", "--schedule", "[2,3,2,2]*"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("seed,mask,schedule,verdict")
    assert lines[1].startswith('point,diag-neumann,"[2,3,2,2]*",')


def test_sweep(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "seeds": ["point"], "masks": ["moore"],
        "schedule": {"template": "2k2s", "k": [3, 4], "s": [1]}, "horizon": 20,
    }))
    assert main(["sweep", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert capsys.readouterr().out.startswith("k,s,carpets\n")
    assert (tmp_path / "o" / "classification.csv").exists()
    cfg.write_text("{not json")
    assert main(["sweep", str(cfg)]) == 1


def test_golden_csv(tmp_path):
    out = tmp_path / "run.csv"
    main(["run", "--seed", "neumann", "--mask", "moore", "--schedule", "2,3,[2]*", "--steps", "12", "--csv", str(out)])
    with open(os.path.join(FIXTURES, "run_neumann_moore.csv"), "rb") as fh:
        assert out.read_bytes() == fh.read()


def test_golden_images(tmp_path):
    for name, args in (
        ("point.pgm", ["--seed", "point", "--steps", "0"]),
        ("neumann_k3.ppm", ["--seed", "neumann", "--schedule", "3*", "--steps", "2", "--scale", "2"]),
    ):
        out = tmp_path / name
        assert main(["render", *args, "--out", str(out)]) == 0
        with open(os.path.join(FIXTURES, name), "rb") as fh:
            assert out.read_bytes() == fh.read()


def test_golden_csv_agrees_with_oracle():
    sched = Schedule.parse("2,3,[2]*")
    mask = masks.builtin("moore")
    state = builtin_seed("neumann").figure
    with open(os.path.join(FIXTURES, "run_neumann_moore.csv")) as fh:
        rows = [line.split(",") for line in fh.read().splitlines()[1:]]
    for t, row in enumerate(rows):
        assert int(row[4]) == len(state.cells())
        state = oracle_step(state, mask, sched.modulus_at(t), "laplacian")
