"""Parameter sequences (a_n, b_n, beta_n) and their admissibility diagnostics."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import IndexOutOfRange

BETA_ONE_CLAMP = 0.5


@dataclass(frozen=True)
class BetaRule:
    kind: str = "constant"  # constant | inverse_n | table
    value: float = 0.0
    table: tuple = ()

    def __post_init__(self):
        if self.kind not in ("constant", "inverse_n", "table"):
            raise ValueError(f"unknown beta rule {self.kind!r}")
        if self.kind == "constant" and not 0.0 <= self.value < 1.0:
            raise ValueError("constant beta must lie in [0, 1)")
        if self.kind == "table" and not all(0.0 <= v < 1.0 for v in self.table):
            raise ValueError("tabulated beta values must lie in [0, 1)")

    def __call__(self, n: int) -> float:
        if self.kind == "constant":
            return float(self.value)
        if self.kind == "inverse_n":
            return BETA_ONE_CLAMP if n == 1 else 1.0 / n
        if not 1 <= n <= len(self.table):
            raise IndexOutOfRange(f"beta table has {len(self.table)} entries, asked for n={n}")
        return float(self.table[n - 1])


@dataclass(frozen=True)
class SequenceScheme:
    """Rule producing (a_n, b_n, beta_n) for every n >= 1.

    kind ``identity`` gives a_n = b_n = n, ``power_shift`` gives
    a_n = n^r + 1/n, b_n = n^r, and ``table`` looks up (a, b) pairs with
    n = 1 in the first row.
    """

    kind: str = "identity"
    r: float = 2.0
    table: tuple = ()
    beta: BetaRule = field(default_factory=BetaRule)

    def __post_init__(self):
        if self.kind not in ("identity", "power_shift", "table"):
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.kind == "power_shift" and not self.r > 1:
            raise ValueError("power_shift needs r > 1")

    @classmethod
    def identity(cls, beta=0.0):
        return cls("identity", beta=_as_rule(beta))

    @classmethod
    def power_shift(cls, r, beta=0.0):
        return cls("power_shift", r=float(r), beta=_as_rule(beta))

    @classmethod
    def from_table(cls, pairs, beta=0.0):
        return cls("table", table=tuple((float(a), float(b)) for a, b in pairs), beta=_as_rule(beta))


def _as_rule(beta) -> BetaRule:
    if isinstance(beta, BetaRule):
        return beta
    return BetaRule("constant", float(beta))


def scheme_values(scheme: SequenceScheme, n: int) -> tuple[float, float, float]:
    if n < 1:
        raise ValueError("n must be at least 1")
    if scheme.kind == "identity":
        a = b = float(n)
    elif scheme.kind == "power_shift":
        b = float(n) ** scheme.r
        a = b + 1.0 / n
    else:
        if n > len(scheme.table):
            raise IndexOutOfRange(f"scheme table has {len(scheme.table)} rows, asked for n={n}")
        a, b = scheme.table[n - 1]
    return a, b, scheme.beta(n)


def _trend(values: np.ndarray, atol: float = 0.0) -> str:
    d = np.diff(values)
    if np.all(np.abs(d) <= atol):
        return "constant"
    if np.all(d > atol):
        return "increasing"
    if np.all(d < -atol):
        return "decreasing"
    if np.all(d >= -atol):
        return "nondecreasing"
    if np.all(d <= atol):
        return "nonincreasing"
    return "mixed"


@dataclass
class SchemeDiagnostics:
    n_max: int
    a_increasing: bool
    b_increasing: bool
    at_least_one: bool
    ratio_trend: str
    d_values: list
    d_trend: str
    beta_trend: str
    flags: list = field(default_factory=list)

    @property
    def ratio_nondecreasing(self) -> bool:
        return self.ratio_trend in ("constant", "increasing", "nondecreasing")

    @property
    def d_plausible(self) -> bool:
        """Finite-n stand-in for a_n/b_n = 1 + o(1/b_n): d_n shrinks (or is 0)."""
        if self.d_trend == "constant":
            return self.d_values[-1] == 0.0
        return self.d_trend in ("decreasing", "nonincreasing")

    def summary_lines(self) -> list[str]:
        lines = [
            f"scheme diagnostics up to n={self.n_max}:",
            f"  a_n increasing: {self.a_increasing}; b_n increasing: {self.b_increasing}; "
            f"a_n, b_n >= 1: {self.at_least_one}",
            f"  a_n/b_n trend: {self.ratio_trend}",
            f"  d_n = b_n |a_n/b_n - 1| trend: {self.d_trend} (last {self.d_values[-1]:.6g})",
            f"  beta_n trend: {self.beta_trend}",
        ]
        lines.extend(f"  flag: {f}" for f in self.flags)
        return lines


def validate_scheme(scheme: SequenceScheme, n_max: int) -> SchemeDiagnostics:
    """Report monotonicity and rate diagnostics for n = 1..n_max.

    Nothing is rejected; violations are listed in ``flags``.
    """
    if n_max < 4:
        raise ValueError("n_max must be at least 4")
    rows = np.array([scheme_values(scheme, n) for n in range(1, n_max + 1)])
    a, b, beta = rows[:, 0], rows[:, 1], rows[:, 2]
    ratio = a / b
    # b_n |a_n/b_n - 1| == |a_n - b_n|; the difference form avoids cancellation
    d = np.abs(a - b)

    diag = SchemeDiagnostics(
        n_max=n_max,
        a_increasing=bool(np.all(np.diff(a) > 0)),
        b_increasing=bool(np.all(np.diff(b) > 0)),
        at_least_one=bool(np.all(a >= 1) and np.all(b >= 1)),
        ratio_trend=_trend(ratio),
        d_values=d.tolist(),
        d_trend=_trend(d),
        beta_trend=_trend(beta),
    )
    if not diag.a_increasing:
        diag.flags.append("a_n is not increasing")
    if not diag.b_increasing:
        diag.flags.append("b_n is not increasing")
    if not diag.at_least_one:
        diag.flags.append("a_n or b_n drops below 1")
    if not diag.ratio_nondecreasing:
        diag.flags.append(f"a_n/b_n is {diag.ratio_trend}, not nondecreasing")
    if not diag.d_plausible:
        diag.flags.append(f"d_n is {diag.d_trend}; a_n/b_n = 1 + o(1/b_n) looks implausible")
    if scheme.beta.kind == "inverse_n":
        diag.flags.append(f"beta_1 clamped to {BETA_ONE_CLAMP} (1/n would give 1)")
    return diag


def _read_numeric_rows(path) -> list[list[float]]:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.reader(fh):
            if not rec or not rec[0].strip() or rec[0].lstrip().startswith("#"):
                continue
            try:
                rows.append([float(v) for v in rec])
            except ValueError:
                if rows:
                    raise
                continue  # header line
    return rows


def parse_beta_rule(text: str) -> BetaRule:
    """Parse ``const:<v>``, ``inv-n`` or ``table:<path>``."""
    if text == "inv-n":
        return BetaRule("inverse_n")
    kind, _, arg = text.partition(":")
    if kind == "const" and arg:
        return BetaRule("constant", float(arg))
    if kind == "table" and arg:
        return BetaRule("table", table=tuple(r[0] for r in _read_numeric_rows(Path(arg))))
    raise ValueError(f"bad beta rule {text!r}; expected const:<v>, inv-n or table:<path>")


def parse_scheme(text: str, beta: BetaRule | float = 0.0) -> SequenceScheme:
    """Parse ``identity``, ``power-shift:<r>`` or ``table:<path>`` (CSV rows a,b)."""
    rule = _as_rule(beta)
    if text == "identity":
        return SequenceScheme("identity", beta=rule)
    kind, _, arg = text.partition(":")
    if kind == "power-shift" and arg:
        return SequenceScheme("power_shift", r=float(arg), beta=rule)
    if kind == "table" and arg:
        pairs = [(r[0], r[1]) for r in _read_numeric_rows(Path(arg))]
        return SequenceScheme.from_table(pairs, rule)
    raise ValueError(f"bad scheme {text!r}; expected identity, power-shift:<r> or table:<path>")
