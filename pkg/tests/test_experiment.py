import json
import math
import subprocess
import sys

import numpy as np
import pytest

from jain_approx.experiment import (
    HEADER,
    ExperimentSpec,
    emit_report,
    load_spec,
    parse_x_grid,
    read_report,
    run_experiment,
    spec_from_config,
)
from jain_approx.functions import builtin, from_expr
from jain_approx.sequences import SequenceScheme
from jain_approx.spaces import omega_p


def run_cli(*args, env=None):
    return subprocess.run([sys.executable, "-m", "jain_approx.cli", *args], capture_output=True, text=True, env=env)


class TestRunExperiment:
    def test_constant_has_zero_error(self):
        spec = ExperimentSpec(builtin("const1"), SequenceScheme.identity(0.3), [2, 8], [0.0, 1.0, 4.0])
        rows = run_experiment(spec).rows
        assert len(rows) == 6
        assert all(r.weighted_error < 1e-13 for r in rows)

    def test_square_szasz(self):
        rows = run_experiment(ExperimentSpec(builtin("square"), n_list=[10], x_grid=[1.0], p=0)).rows
        assert rows[0].weighted_error == pytest.approx(0.1, abs=1e-12)

    def test_square_power_shift(self):
        spec = ExperimentSpec(builtin("square"), SequenceScheme.power_shift(2), [5], [1.0], p=0)
        row = run_experiment(spec).rows[0]
        assert row.weighted_error == pytest.approx(0.056384, abs=1e-6)
        assert (row.a_n, row.b_n) == (pytest.approx(25.2), 25.0)

    def test_row_invariant_and_order(self):
        spec = ExperimentSpec(builtin("sine"), SequenceScheme.identity(0.2), [3, 9], [0.0, 2.5, 1.0], p=1)
        rows = run_experiment(spec).rows
        assert [(r.n, r.x) for r in rows] == [(3, 0.0), (3, 2.5), (3, 1.0), (9, 0.0), (9, 2.5), (9, 1.0)]
        for r in rows:
            assert abs(r.weighted_error - omega_p(1, r.x) * abs(r.op_value - r.f_value)) <= 1e-15

    def test_bound_columns(self):
        row = run_experiment(ExperimentSpec(builtin("square"), n_list=[100], x_grid=[1.0], p=2)).rows[0]
        assert row.xi == pytest.approx(0.01)
        assert row.drift_term == 0.0
        assert row.bound_total == pytest.approx(0.02)
        assert row.weighted_error <= row.bound_total

    def test_expression_without_derivatives(self):
        row = run_experiment(ExperimentSpec(from_expr("exp(-x)"), n_list=[10], x_grid=[1.0])).rows[0]
        assert math.isnan(row.drift_term) and math.isnan(row.bound_total)
        assert row.status == "ok"

    def test_cell_failure_recorded(self):
        spec = ExperimentSpec(from_expr("log(x + 0.5)"), n_list=[4], x_grid=[0.0, 1.0])
        rows = run_experiment(spec).rows
        assert [r.status for r in rows] == ["ok", "ok"]
        spec = ExperimentSpec(from_expr("1 / (x - 0.25)"), n_list=[4], x_grid=[0.0, 1.0])
        rows = run_experiment(spec).rows
        assert rows[0].status == "ok"
        assert rows[1].status == "DomainError" and math.isnan(rows[1].op_value)

    def test_diagnostics(self):
        diag = run_experiment(ExperimentSpec(builtin("square"), SequenceScheme.power_shift(2), [5], [1.0])).diagnostics
        assert diag.ratio_trend == "decreasing"

    @pytest.mark.parametrize("kw", [dict(n_list=[]), dict(n_list=[5, 3]), dict(x_grid=[-1.0]),
                                    dict(x_grid=[25.0]), dict(kind="L"), dict(format="xml")])
    def test_invalid_spec(self, kw):
        with pytest.raises(ValueError):
            ExperimentSpec(builtin("square"), **kw)

    def test_thread_independent(self):
        base = dict(function=builtin("runge"), scheme=SequenceScheme.identity(0.4), n_list=[3, 6, 12],
                    x_grid=np.linspace(0, 4, 9).tolist())
        one = emit_report(run_experiment(ExperimentSpec(**base, workers=1)).rows)
        many = emit_report(run_experiment(ExperimentSpec(**base, workers=8)).rows)
        assert one == many


class TestReport:
    def rows(self):
        spec = ExperimentSpec(builtin("exp_decay"), SequenceScheme.identity(0.1), [4, 7], [0.0, 0.3], kind="K")
        return run_experiment(spec).rows

    def test_single_row_file(self, tmp_path):
        path = tmp_path / "one.csv"
        emit_report(self.rows()[:1], "csv", path)
        data = path.read_bytes()
        assert b"\r" not in data
        lines = data.decode("utf-8").splitlines()
        assert len(lines) == 2
        assert lines[0] == "n,x,a_n,b_n,beta_n,op_value,f_value,weighted_error,xi,drift_term,bound_total,status"
        assert tuple(lines[0].split(",")) == HEADER

    def test_csv_round_trip(self, tmp_path):
        rows = self.rows()
        path = tmp_path / "r.csv"
        emit_report(rows, "csv", path)
        back = read_report(path)
        for a, b in zip(rows, back):
            for name in HEADER:
                u, v = getattr(a, name), getattr(b, name)
                assert u == v or (isinstance(u, float) and math.isnan(u) and math.isnan(v))

    def test_json_round_trip(self, tmp_path):
        rows = self.rows()
        path = tmp_path / "r.json"
        emit_report(rows, "json", path)
        doc = json.loads(path.read_text())
        assert isinstance(doc, list) and doc[1]["op_value"] == rows[1].op_value
        back = read_report(path)
        assert [r.op_value for r in back] == [r.op_value for r in rows]

    def test_seventeen_digits(self):
        text = emit_report(self.rows()[1:2])
        op = text.splitlines()[1].split(",")[5]
        assert float(op) == self.rows()[1].op_value

    def test_empty(self):
        with pytest.raises(ValueError):
            emit_report([])


class TestConfig:
    def test_overrides(self, tmp_path):
        cfg = tmp_path / "exp.json"
        cfg.write_text(json.dumps({"function": "square", "n": [5, 10], "x": [1.0], "p": 0,
                                   "scheme": "power-shift:2", "beta": "const:0.1"}))
        spec = load_spec(cfg, n="20", expr="x^3")
        assert spec.n_list == [20]
        assert spec.function.text == "x^3"
        assert spec.scheme.kind == "power_shift" and spec.scheme.beta(3) == 0.1

    def test_x_grid_forms(self):
        assert parse_x_grid("0.5, 1,2") == [0.5, 1.0, 2.0]
        assert parse_x_grid("linspace:0:1:5") == [0.0, 0.25, 0.5, 0.75, 1.0]

    def test_needs_one_function(self):
        with pytest.raises(ValueError):
            spec_from_config({"n": [3]})


class TestCli:
    def test_approx(self):
        out = run_cli("approx", "--function", "square", "--n", "10", "--x", "1", "--p", "0")
        assert out.returncode == 0
        lines = out.stdout.splitlines()
        assert lines[0].startswith("n,x,a_n")
        assert float(lines[1].split(",")[7]) == pytest.approx(0.1, abs=1e-12)
        assert "scheme diagnostics" in out.stderr

    def test_kantorovich_json(self):
        out = run_cli("kantorovich", "--function", "linear", "--n", "10", "--x", "1", "--format", "json")
        assert out.returncode == 0
        assert json.loads(out.stdout)[0]["op_value"] == pytest.approx(1.05, abs=1e-8)

    def test_usage_errors(self):
        assert run_cli("approx", "--expr", "2**x").returncode == 2
        assert run_cli("approx", "--function", "nope").returncode == 2
        assert run_cli("approx").returncode == 2
        assert run_cli("moment", "--order", "2", "--beta", "1.5").returncode == 2
        assert run_cli("experiment", "--config", "/nonexistent/exp.json").returncode == 2

    def test_numeric_error_code(self):
        out = run_cli("approx", "--expr", "log(x)", "--x", "1")
        assert out.returncode == 3
        assert "DomainError" in out.stdout

    def test_weights_moment_compare_bounds(self):
        w = run_cli("weights", "--alpha", "1", "--beta", "0.5", "--count", "3")
        assert w.returncode == 0 and w.stdout.splitlines()[2].startswith("2\t0.1353352832")
        m = run_cli("moment", "--order", "2", "--a", "10", "--b", "10", "--beta", "0.1")
        assert m.returncode == 0 and "1.3717421124828" in m.stdout
        c = run_cli("compare", "--function", "square", "--n", "5")
        assert c.returncode == 0 and "0.0563839" in c.stdout and "modified" in c.stdout
        b = run_cli("bounds", "--function", "sine", "--n", "10,20", "--x", "0.5,1")
        assert b.returncode == 0 and "smallest constant" in b.stdout

    def test_experiment_writes_file(self, tmp_path):
        cfg = tmp_path / "exp.json"
        out_path = tmp_path / "out.csv"
        cfg.write_text(json.dumps({"function": "runge", "n": [4, 8], "x": "linspace:0:2:3"}))
        res = run_cli("experiment", "--config", str(cfg), "--output", str(out_path))
        assert res.returncode == 0
        assert len(out_path.read_text().splitlines()) == 7
