import pytest

from jain_approx.errors import IndexOutOfRange
from jain_approx.sequences import (
    BetaRule,
    SequenceScheme,
    parse_beta_rule,
    parse_scheme,
    scheme_values,
    validate_scheme,
)


class TestSchemeValues:
    def test_identity(self):
        assert scheme_values(SequenceScheme.identity(0.2), 7) == (7.0, 7.0, 0.2)
        assert scheme_values(SequenceScheme.identity(), 1)[:2] == (1.0, 1.0)

    def test_power_shift(self):
        a, b, _ = scheme_values(SequenceScheme.power_shift(2), 5)
        assert (a, b) == (pytest.approx(25.2, abs=1e-14), 25.0)

    def test_table(self):
        s = SequenceScheme.from_table([(1, 1), (3, 2)])
        assert scheme_values(s, 2) == (3.0, 2.0, 0.0)
        with pytest.raises(IndexOutOfRange):
            scheme_values(s, 3)

    @pytest.mark.parametrize("scheme", [SequenceScheme.identity(), SequenceScheme.power_shift(2.0),
                                        SequenceScheme.power_shift(1.5)])
    @pytest.mark.parametrize("n", [1, 2, 17, 1000, 10**6 - 1])
    def test_admissible_and_increasing(self, scheme, n):
        a0, b0, _ = scheme_values(scheme, n)
        a1, b1, _ = scheme_values(scheme, n + 1)
        assert a0 >= 1 and b0 >= 1
        assert a1 > a0 and b1 > b0

    @pytest.mark.parametrize("n", [3, 40, 2500])
    def test_power_shift_drift_proxy_halves(self, n):
        s = SequenceScheme.power_shift(2)

        def d(m):
            a, b, _ = scheme_values(s, m)
            return abs(a - b)

        # a_n = n^2 + 1/n is stored as a double, so a_n - b_n keeps only
        # about 16 - log10(n^3) correct digits.
        tol = 1e-15 * n**3
        assert d(n) == pytest.approx(1.0 / n, rel=tol)
        assert d(2 * n) == pytest.approx(d(n) / 2, rel=8 * tol)


class TestBetaRule:
    def test_inverse_n(self):
        rule = BetaRule("inverse_n")
        assert rule(1) == 0.5
        assert rule(4) == 0.25
        assert all(0 < rule(n) < 1 for n in range(2, 200))

    def test_constant_range(self):
        with pytest.raises(ValueError):
            BetaRule("constant", 1.0)

    def test_parse(self):
        assert parse_beta_rule("const:0.3")(9) == 0.3
        assert parse_beta_rule("inv-n")(10) == 0.1
        with pytest.raises(ValueError):
            parse_beta_rule("half")

    def test_parse_table(self, tmp_path):
        path = tmp_path / "beta.csv"
        path.write_text("beta\n0.5\n# comment\n0.25\n")
        rule = parse_beta_rule(f"table:{path}")
        assert (rule(1), rule(2)) == (0.5, 0.25)


class TestParseScheme:
    def test_kinds(self):
        assert parse_scheme("identity").kind == "identity"
        assert parse_scheme("power-shift:3").r == 3.0
        with pytest.raises(ValueError):
            parse_scheme("power-shift:0.5")
        with pytest.raises(ValueError):
            parse_scheme("geometric")

    def test_table_file(self, tmp_path):
        path = tmp_path / "ab.csv"
        path.write_text("a,b\n1,1\n2.5,2\n")
        s = parse_scheme(f"table:{path}", 0.1)
        assert scheme_values(s, 2) == (2.5, 2.0, 0.1)


class TestDiagnostics:
    def test_identity(self):
        d = validate_scheme(SequenceScheme.identity(), 20)
        assert d.ratio_trend == "constant"
        assert max(d.d_values) == 0.0
        assert d.a_increasing and d.b_increasing and d.at_least_one
        assert not d.flags

    def test_power_shift_ratio_decreasing_is_flagged(self):
        d = validate_scheme(SequenceScheme.power_shift(2), 20)
        assert d.ratio_trend == "decreasing"
        assert not d.ratio_nondecreasing
        assert d.d_trend == "decreasing" and d.d_plausible
        assert d.d_values[4] == pytest.approx(1 / 5, rel=1e-12)
        assert any("a_n/b_n" in f for f in d.flags)

    def test_table_a_not_increasing(self):
        d = validate_scheme(SequenceScheme.from_table([(1, 1), (1, 2), (1, 3), (1, 4)]), 4)
        assert d.b_increasing and not d.a_increasing

    def test_inverse_n_clamp_flagged(self):
        d = validate_scheme(SequenceScheme.identity(BetaRule("inverse_n")), 10)
        # beta_1 = beta_2 = 1/2 after the clamp
        assert d.beta_trend == "nonincreasing"
        assert any("clamp" in f for f in d.flags)

    def test_summary_lines(self):
        assert validate_scheme(SequenceScheme.identity(), 5).summary_lines()
