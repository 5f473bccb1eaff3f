import json

import numpy as np
import pytest

from minkvfe import cli, io
from minkvfe import generators as gen
from minkvfe.curve import Topology
from minkvfe.errors import CaseMismatch, ConstraintViolation
from minkvfe.frames import frame_by_transport


def files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_curve_csv_round_trip(tmp_path):
    c = gen.timelike_helix(32)
    io.save_curve(tmp_path / "a.csv", c)
    back = io.load_curve(tmp_path / "a.csv", Topology.CLOSED, c.shift)
    np.testing.assert_allclose(back.samples, c.samples, rtol=1e-14, atol=1e-15)
    assert back.ds == pytest.approx(c.ds, rel=1e-14)
    # positions are stored verbatim; s is rebuilt from (s0, ds)
    io.save_curve(tmp_path / "b.csv", back)
    a = io.read_csv(tmp_path / "a.csv", io.CURVE_HEADER)
    b = io.read_csv(tmp_path / "b.csv", io.CURVE_HEADER)
    np.testing.assert_array_equal(a[:, 1:], b[:, 1:])
    np.testing.assert_allclose(a[:, 0], b[:, 0], rtol=1e-14)
    assert (tmp_path / "a.csv").read_text().splitlines()[0] == "s,x0,x1,x2"


def test_frame_csv_round_trip(tmp_path):
    pf = frame_by_transport(gen.circle(32))
    io.save_frame(tmp_path / "f.csv", pf)
    back = io.load_frame(tmp_path / "f.csv", pf.case, pf.ds, True)
    io.save_frame(tmp_path / "g.csv", back)
    assert (tmp_path / "f.csv").read_bytes() == (tmp_path / "g.csv").read_bytes()
    header = (tmp_path / "f.csv").read_text().splitlines()[0]
    assert header == "s,T0,T1,T2,E1_0,E1_1,E1_2,E2_0,E2_1,E2_2,k1,k2,theta"


def test_simulate_line_then_verify_passes(tmp_path, capsys):
    out = tmp_path / "line"
    code = cli.main(["simulate", "--generator", "Line", "--n", "64", "--dt", "1e-5",
                     "--steps", "20", "--case", "spacelike_timelike_normal",
                     "--output-dir", str(out)])
    assert code == 0
    assert cli.main(["verify", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["passed"]
    assert report["residual"]["l2_norm"] <= 1e-12
    for chk in report["checks"].values():
        assert chk["value"] <= 1e-12


def test_verify_truncated_run_dir(tmp_path, capsys):
    out = tmp_path / "helix"
    assert cli.main(["simulate", "--generator", "TimelikeHelix", "--n", "32", "--dt", "1e-4",
                     "--steps", "20", "--record-every", "2", "--output-dir", str(out)]) == 0
    (out / "frame_00004.csv").unlink()
    assert cli.main(["verify", str(out)]) == 2
    assert "cli.run_directory" in capsys.readouterr().err


def test_verify_failure_exit_code(tmp_path):
    out = tmp_path / "helix"
    cli.main(["simulate", "--generator", "TimelikeHelix", "--n", "32", "--dt", "1e-4",
              "--steps", "20", "--record-every", "2", "--output-dir", str(out)])
    assert cli.main(["verify", str(out), "--residual-tol", "1e-9"]) == 1


def test_constraint_violation_exit_code(tmp_path, capsys):
    code = cli.main(["generate", "--generator", "TimelikeHelix", "--a", "1", "--b", "1.2",
                     "--output-dir", str(tmp_path)])
    assert code == 2
    assert "a^2 omega^2 - b^2 = -1" in capsys.readouterr().err


def test_case_mismatch(tmp_path):
    cfg = cli.RunConfig(generator="Circle", case="timelike", n=32)
    with pytest.raises(CaseMismatch):
        cli.resolve_case(cli.generate(cfg), cfg)
    assert cli.main(["simulate", "--generator", "Circle", "--case", "timelike",
                     "--output-dir", str(tmp_path / "x")]) == 2


def test_degenerate_exit_code(tmp_path):
    # lightlike samples in a curve file
    s = np.linspace(0, 1, 16)
    rows = np.column_stack([s, s, s, 0 * s])
    io.write_csv(tmp_path / "null.csv", io.CURVE_HEADER, rows)
    code = cli.main(["simulate", "--generator", "FromFile", "--file", str(tmp_path / "null.csv"),
                     "--output-dir", str(tmp_path / "out")])
    assert code == 3


def test_config_file_overrides_flags(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"n": 48, "generator": "Circle"}))
    args = cli.build_parser().parse_args(["generate", "--n", "16", "--config", str(conf)])
    cfg = cli.config_from_args(args)
    assert cfg.n == 48 and cfg.generator is cli.Generator.CIRCLE
    conf.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(ConstraintViolation):
        cli.config_from_args(cli.build_parser().parse_args(["generate", "--config", str(conf)]))


def test_output_root_env(tmp_path, monkeypatch):
    monkeypatch.setenv(io.OUTPUT_ROOT_ENV, str(tmp_path))
    assert cli.main(["generate", "--generator", "Circle", "--n", "16",
                     "--output-dir", "seed"]) == 0
    assert (tmp_path / "seed" / "curve.csv").is_file()
    assert (tmp_path / "seed" / "frame.csv").is_file()


def test_from_file_generator(tmp_path):
    c = gen.spacelike_helix(33)
    io.save_curve(tmp_path / "h.csv", c)
    cfg = cli.RunConfig(generator="FromFile", file=str(tmp_path / "h.csv"))
    back = cli.generate(cfg)
    np.testing.assert_allclose(back.samples, c.samples, atol=1e-14)
    assert back.s0 == pytest.approx(c.s0)


def test_simulate_is_deterministic(tmp_path):
    argv = ["simulate", "--generator", "Circle", "--n", "32", "--dt", "1e-3", "--steps", "6",
            "--record-every", "2", "--theta0", "0.3"]
    assert cli.main(argv + ["--output-dir", str(tmp_path / "a")]) == 0
    assert cli.main(argv + ["--output-dir", str(tmp_path / "b")]) == 0
    fa, fb = files(tmp_path / "a"), files(tmp_path / "b")
    fa.pop("manifest.json")
    man_b = fb.pop("manifest.json")
    assert fa == fb
    assert json.loads(man_b)["case"] == "spacelike_timelike_binormal"


def test_history_round_trip(tmp_path):
    cfg = cli.RunConfig(generator="WobblyTimelikeHelix", n=32, dt=1e-4, steps=10,
                        record_every=5, output_dir=str(tmp_path / "r"))
    h = cli.simulate(cfg)
    back = io.load_history(tmp_path / "r")
    np.testing.assert_allclose(back.k1, h.k1, rtol=1e-14, atol=1e-15)
    np.testing.assert_allclose(back.times, h.times)
    assert back.case is h.case and back.seed_index == h.seed_index
    io.save_history(tmp_path / "s", back, cfg.echo())
    assert files(tmp_path / "r") == files(tmp_path / "s")


def test_dump_residuals(tmp_path):
    out = tmp_path / "w"
    cli.main(["simulate", "--generator", "WobblyCircle", "--n", "64", "--dt", "2e-5",
              "--steps", "40", "--record-every", "4", "--output-dir", str(out)])
    cli.main(["verify", str(out), "--dump-residuals", "--residual-tol", "1"])
    assert (out / "residual_q.csv").read_text().startswith("t,s,value")
    ratios = json.loads((out / "report.json").read_text())["heat_vs_exponential"]
    assert ratios["product"] == pytest.approx(0.5, rel=1e-12)


def test_level_configs_ladder():
    cfg = cli.RunConfig(generator="TimelikeHelix", n=32, dt=1e-3, steps=10, record_every=2)
    mode, levels = cli.level_configs(cfg)
    assert mode == "fixed_time"
    assert [c.n for c in levels] == [32, 64, 128]
    assert [c.steps for c in levels] == [10, 40, 160]
    assert levels[2].dt == pytest.approx(1e-3 / 16)
    cfg = cli.RunConfig(generator="SpacelikeHelix", n=33, dt=1e-4, steps=10)
    mode, levels = cli.level_configs(cfg)
    assert mode == "fixed_steps"
    assert [c.n for c in levels] == [33, 65, 129]
    assert [c.steps for c in levels] == [10, 10, 10]


def test_converge_timelike_helix(tmp_path, capsys):
    out = tmp_path / "conv"
    code = cli.main(["converge", "--generator", "TimelikeHelix", "--n", "32", "--dt", "2.5e-3",
                     "--steps", "40", "--record-every", "4", "--output-dir", str(out)])
    result = json.loads((out / "converge.json").read_text())
    assert abs(result["orders"]["l2"] - 2.0) < 0.3
    assert (out / "orders.csv").read_text().startswith("n,ds,dt,steps,l2")
    assert code in (0, 1)
