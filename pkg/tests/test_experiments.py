"""Config plumbing, on-disk record format, and CLI behavior."""

import csv
import json
import math

import numpy as np
import pytest

from soc_ising import (
    COMMANDS,
    ExperimentConfig,
    build_config,
    chain_rng,
    parse_config_file,
    run,
    wilson_interval,
)
from soc_ising import experiments
from soc_ising.cli import main as cli_main


def test_per_command_defaults():
    cfg = build_config("fk-sample")
    assert cfg.n == (16,) and cfg.p == 0.6 and cfg.burn_in == 100
    assert build_config("tail-fit").bc == 0
    assert build_config("surgery-demo").a == 1.95
    assert build_config("enumerate").variant == "mu"
    assert build_config("soc-run").out_dir() == "runs/soc-run"
    for command in COMMANDS:
        build_config(command)  # every default set must validate


def test_merge_precedence_defaults_file_flags():
    cfg = build_config("fk-sample", {"p": "0.5", "samples": "40"},
                       {"p": "0.45"})
    assert cfg.p == 0.45  # flag beats file
    assert cfg.samples == 40  # file beats default
    assert cfg.burn_in == 100  # untouched default survives


def test_value_parsing():
    cfg = build_config("soc-run", overrides={"n": "8, 12", "a": "1.98",
                                             "snapshot_every": "5"})
    assert cfg.n == (8, 12) and cfg.a == 1.98 and cfg.snapshot_every == 5
    # optional keys accept the spelling "none"
    assert build_config("soc-run", overrides={"t": "none"}).t is None
    with pytest.raises(ValueError, match="a: value required"):
        build_config("soc-run", overrides={"a": "none"})
    with pytest.raises(ValueError, match="unknown config key: nonsense"):
        build_config("soc-run", overrides={"nonsense": "1"})
    with pytest.raises(ValueError, match="tau"):
        build_config("soc-run", overrides={"tau": "x"})
    with pytest.raises(ValueError, match="unknown command"):
        build_config("bogus")


def test_validation_messages_name_the_key():
    cases = {
        "bc": "7",
        "method": "bogus",
        "thin": "0",
        "burn_in": "-2",
        "q": "0",
        "p": "1.5",
        "seed": "-1",
        "delta": "0",
        "min_hits": "0",
        "v": "-3",
    }
    for key, bad in cases.items():
        with pytest.raises(ValueError) as err:
            build_config("fk-sample", overrides={key: bad})
        assert key in str(err.value)
    with pytest.raises(ValueError, match="n:"):
        build_config("fk-sample", overrides={"n": "0"})


def test_as_flat_round_trip():
    cfg = build_config("fss-freq", overrides={"n": "8,10", "p": "0.62",
                                              "seed": "9"})
    flat = cfg.as_flat()
    assert flat["command"] == "fss-freq"
    assert flat["n"] == "8,10" and flat["t"] == "none"
    rebuilt = build_config(
        flat.pop("command"),
        overrides={k: v for k, v in flat.items()},
    )
    assert rebuilt == cfg


def test_parse_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# comment line\n"
        "n = 4,6\n"
        "p = 0.55   # trailing comment\n"
        "\n"
        "t = none\n"
        "method = single-bond\n",
        encoding="utf-8",
    )
    values = parse_config_file(str(path))
    assert values == {"n": (4, 6), "p": 0.55, "t": None,
                      "method": "single-bond"}

    bad = tmp_path / "bad.cfg"
    bad.write_text("frobnicate = 3\n", encoding="utf-8")
    with pytest.raises(ValueError, match="unknown config key: frobnicate"):
        parse_config_file(str(bad))

    bad.write_text("command = soc-run\n", encoding="utf-8")
    with pytest.raises(ValueError, match="command comes from"):
        parse_config_file(str(bad))

    bad.write_text("just words\n", encoding="utf-8")
    with pytest.raises(ValueError, match="bad.cfg:1"):
        parse_config_file(str(bad))


def test_chain_rng_streams():
    a = chain_rng(7, 0).random(5)
    b = chain_rng(7, 0).random(5)
    c = chain_rng(7, 1).random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_wilson_interval():
    lo, hi = wilson_interval(0, 0)
    assert (lo, hi) == (0.0, 1.0)
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert abs(lo - 0.40383) < 1e-4 and abs(hi - 0.59617) < 1e-4
    assert wilson_interval(0, 20)[0] == 0.0
    assert wilson_interval(20, 20)[1] == 1.0
    # interval shrinks with more data at the same frequency
    assert wilson_interval(500, 1000)[0] > lo


def test_csv_cell_formatting():
    cell = experiments._csv_cell
    assert cell(True) == "1" and cell(False) == "0"
    assert cell(np.bool_(True)) == "1"
    assert cell(7) == "7" and cell(np.int64(-3)) == "-3"
    x = 0.1 + 0.2
    assert cell(x) == repr(x) and float(cell(x)) == x
    assert cell("sw") == "sw"


def test_run_enumerate_files_and_metadata(tmp_path):
    # n = 4 has a 2 x 2 interior, so 16 spin configurations
    out = tmp_path / "enum"
    cfg = build_config("enumerate", overrides={"n": "4", "a": "1.9",
                                               "out": str(out)})
    result = run(cfg)
    assert result["n_rows"] == 16
    assert abs(result["prob_total"] - 1.0) < 1e-12
    assert result["z_abs_difference"] < 1e-12

    meta = json.loads((out / "metadata.json").read_text())
    assert meta["version"] and meta["rng"] == "philox"
    assert meta["schema_version"] == 1
    assert meta["command"] == "enumerate"
    assert meta["config"]["a"] == "1.9"
    with open(out / "rows.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == meta["columns"]
    assert len(rows) == 1 + 16
    # probabilities in the csv round-trip and sum to one
    probs = [float(r[-1]) for r in rows[1:]]
    assert abs(sum(probs) - 1.0) < 1e-12

    summary = json.loads((out / "summary.json").read_text())
    assert summary["n_configs"] == 16 and summary["variant"] == "mu"


def test_rerun_is_byte_identical(tmp_path):
    base = {"n": "5", "samples": "25", "burn_in": "30", "seed": "3"}
    blobs = []
    for tag in ("one", "two"):
        out = tmp_path / tag
        cfg = build_config("fk-sample", overrides=dict(base, out=str(out)))
        run(cfg)
        blobs.append({name: (out / name).read_bytes()
                      for name in ("rows.csv", "summary.json",
                                   "metadata.json")})
    assert blobs[0]["rows.csv"] == blobs[1]["rows.csv"]
    assert blobs[0]["summary.json"] == blobs[1]["summary.json"]
    # metadata differs only in the out path
    metas = [json.loads(b["metadata.json"]) for b in blobs]
    for meta in metas:
        meta["config"].pop("out")
    assert metas[0] == metas[1]


def test_chains_do_not_perturb_each_other(tmp_path):
    # records of the first box side are identical whether or not a second
    # side runs after it
    base = {"tau": "4", "total": "120", "burn_in": "10", "seed": "11"}

    def first_chain_rows(tag, n_spec):
        out = tmp_path / tag
        cfg = build_config("soc-run", overrides=dict(base, n=n_spec,
                                                     out=str(out)))
        run(cfg)
        with open(out / "rows.csv", newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        head = rows[0]
        chain_col = head.index("chain")
        return [r for r in rows[1:] if r[chain_col] == "0"]

    alone = first_chain_rows("alone", "6")
    paired = first_chain_rows("paired", "6,4")
    assert alone == paired


def test_summary_recomputable_from_rows(tmp_path):
    out = tmp_path / "fk"
    cfg = build_config("fk-sample", overrides={"n": "5", "samples": "30",
                                               "burn_in": "20",
                                               "out": str(out)})
    result = run(cfg)
    with open(out / "rows.csv", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        head = next(reader)
        rows = list(reader)
    cell = result["per_n"][0]
    for name in ("open_edges", "m_n", "u_n"):
        col = head.index(name)
        mean = sum(float(r[col]) for r in rows) / len(rows)
        assert abs(mean - cell["means"][name]) < 1e-12
    assert result["n_rows"] == 30


def test_failure_leaves_no_partial_output(tmp_path):
    out = tmp_path / "tail"
    cfg = build_config("tail-fit", overrides={"n": "4", "v": "999",
                                              "samples": "5",
                                              "out": str(out)})
    with pytest.raises(ValueError, match="v: vertex id out of range"):
        run(cfg)
    assert not out.exists()


def test_write_failure_unlinks_written_files(tmp_path, monkeypatch):
    out = tmp_path / "boom"
    cfg = build_config("enumerate", overrides={"n": "2", "out": str(out)})

    def explode(x):
        raise RuntimeError("disk on fire")

    monkeypatch.setattr(experiments, "_csv_cell", explode)
    with pytest.raises(RuntimeError):
        run(cfg)
    assert out.exists()  # the directory is made before writing
    assert list(out.iterdir()) == []


def test_fss_frequency_rejects_subcritical_density():
    cfg = build_config("fss-freq", overrides={"n": "8", "p": "0.3",
                                              "samples": "5"})
    with pytest.raises(ValueError, match="p: finite-size scaling"):
        run(cfg)


def test_coupling_verify_box_guard():
    cfg = build_config("coupling-verify", overrides={"n": "4"})
    with pytest.raises(ValueError, match="n: exact pushforward"):
        run(cfg)


def test_cli_success_and_json_line(tmp_path, capsys):
    out = tmp_path / "cli"
    code = cli_main(["enumerate", "--n", "3", "--out", str(out)])
    assert code == 0
    payload = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert payload["ok"] is True
    assert payload["n_rows"] == 2  # one free interior spin
    assert (out / "rows.csv").exists()


def test_cli_print_config(capsys):
    code = cli_main(["soc-run", "--n", "8,12", "--tau", "16",
                     "--print-config"])
    assert code == 0
    lines = dict(
        line.split(" = ", 1)
        for line in capsys.readouterr().out.strip().splitlines()
    )
    assert lines["command"] == "soc-run"
    assert lines["n"] == "8,12"
    assert lines["tau"] == "16"
    assert lines["t"] == "none"


def test_cli_config_error_exit_2(capsys):
    code = cli_main(["fk-sample", "--bc", "7"])
    assert code == 2
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "config"
    assert err["message"].startswith("bc")


def test_cli_bad_config_file_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("nonsense = 1\n", encoding="utf-8")
    code = cli_main(["soc-run", "--config", str(path)])
    assert code == 2
    err = json.loads(capsys.readouterr().err.strip())
    assert err["message"] == "unknown config key: nonsense"


def test_cli_config_file_with_flag_override(tmp_path, capsys):
    path = tmp_path / "run.cfg"
    path.write_text("samples = 40\np = 0.5\n", encoding="utf-8")
    code = cli_main(["fk-sample", "--config", str(path), "--p", "0.45",
                     "--print-config"])
    assert code == 0
    lines = dict(
        line.split(" = ", 1)
        for line in capsys.readouterr().out.strip().splitlines()
    )
    assert lines["p"] == "0.45" and lines["samples"] == "40"


def test_cli_runtime_error_exit_1(tmp_path, capsys):
    out = tmp_path / "never"
    code = cli_main(["tail-fit", "--n", "4", "--v", "999",
                     "--samples", "5", "--out", str(out)])
    assert code == 1
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "runtime"
    assert not out.exists()


def test_cli_unknown_command_rejected():
    with pytest.raises(SystemExit):
        cli_main(["frobnicate"])


def test_run_soc_compare_summary_shape(tmp_path):
    out = tmp_path / "cmp"
    cfg = build_config("soc-compare", overrides={"n": "4", "total": "400",
                                                 "burn_in": "50",
                                                 "out": str(out)})
    result = run(cfg)
    variants = {c["variant"] for c in result["cells"]}
    assert variants == {"mu-prime", "mu-prime-naive"}
    assert result["n_rows"] == 2 * 400
    for c in result["cells"]:
        assert math.isfinite(c["mean_T"]) and c["mean_T"] > 0
