"""Fuzzy inference core: membership shapes, variables, rules, evaluation.

A controller maps one or two crisp inputs to a crisp angular velocity:
inputs are fuzzified through piecewise-linear membership functions, rules
combine clause degrees with ``min``, rules sharing a consequent combine
with ``max``, and the output is the strength-weighted average of the
output singletons.  Everything here is a pure function over immutable
definitions, so controllers can be evaluated concurrently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .errors import ConfigurationError, InvalidInputError, RuleGapError

TRIANGULAR = "triangular"
TRAPEZOIDAL = "trapezoidal"
LEFT_SHOULDER = "left_shoulder"
RIGHT_SHOULDER = "right_shoulder"

_SHAPE_ARITY = {
    TRIANGULAR: 3,
    TRAPEZOIDAL: 4,
    LEFT_SHOULDER: 2,
    RIGHT_SHOULDER: 2,
}


@dataclass(frozen=True)
class MembershipFunction:
    """A piecewise-linear membership shape over a variable's universe.

    Breakpoints must be non-decreasing.  Degrees are always in [0, 1]
    and continuous whenever the breakpoints are strictly increasing.
    """

    shape: str
    points: tuple[float, ...]

    def __post_init__(self):
        arity = _SHAPE_ARITY.get(self.shape)
        if arity is None:
            raise ConfigurationError(f"unknown membership shape {self.shape!r}")
        if len(self.points) != arity:
            raise ConfigurationError(
                f"{self.shape} takes {arity} breakpoints, got {len(self.points)}"
            )
        if not all(math.isfinite(p) for p in self.points):
            raise ConfigurationError("membership breakpoints must be finite")
        if any(b < a for a, b in zip(self.points, self.points[1:])):
            raise ConfigurationError(
                f"non-monotone breakpoints {self.points} for {self.shape}"
            )

    def degree(self, x: float) -> float:
        """Membership degree of ``x``, piecewise-linear, clamped to [0, 1]."""
        return membership_degree(self, x)


def triangular(a: float, b: float, c: float) -> MembershipFunction:
    return MembershipFunction(TRIANGULAR, (a, b, c))


def trapezoidal(a: float, b: float, c: float, d: float) -> MembershipFunction:
    return MembershipFunction(TRAPEZOIDAL, (a, b, c, d))


def left_shoulder(a: float, b: float) -> MembershipFunction:
    """Full membership for x <= a, falling linearly to zero at b."""
    return MembershipFunction(LEFT_SHOULDER, (a, b))


def right_shoulder(a: float, b: float) -> MembershipFunction:
    """Zero membership for x <= a, rising linearly to one at b."""
    return MembershipFunction(RIGHT_SHOULDER, (a, b))


def membership_degree(mf: MembershipFunction, x: float) -> float:
    """Evaluate a membership function at ``x``.

    Values outside the support return 0; degenerate (zero-width) ramps
    behave as steps so equal breakpoints never divide by zero.
    """
    p = mf.points
    if mf.shape == TRIANGULAR:
        a, b, c = p
        if x == b:
            return 1.0
        if x <= a or x >= c:
            return 0.0
        if x < b:
            return (x - a) / (b - a)
        return (c - x) / (c - b)
    if mf.shape == TRAPEZOIDAL:
        a, b, c, d = p
        if b <= x <= c:
            return 1.0
        if x <= a or x >= d:
            return 0.0
        if x < b:
            return (x - a) / (b - a)
        return (d - x) / (d - c)
    if mf.shape == LEFT_SHOULDER:
        a, b = p
        if x <= a:
            return 1.0
        if x >= b:
            return 0.0
        return (b - x) / (b - a)
    # right shoulder
    a, b = p
    if x >= b:
        return 1.0
    if x <= a:
        return 0.0
    return (x - a) / (b - a)


@dataclass(frozen=True)
class FuzzyVariable:
    """A named input with a closed universe and ordered labeled shapes."""

    name: str
    lo: float
    hi: float
    labels: tuple[tuple[str, MembershipFunction], ...]

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ConfigurationError(f"variable {self.name!r}: non-finite universe")
        if self.lo >= self.hi:
            raise ConfigurationError(
                f"variable {self.name!r}: empty universe [{self.lo}, {self.hi}]"
            )
        if not self.labels:
            raise ConfigurationError(f"variable {self.name!r} has no labels")
        names = [n for n, _ in self.labels]
        if len(set(names)) != len(names):
            raise ConfigurationError(f"variable {self.name!r}: duplicate labels")

    def label_map(self) -> dict[str, MembershipFunction]:
        return dict(self.labels)

    def fuzzify(self, x: float) -> dict[str, float]:
        return fuzzify(self, x)


def fuzzify(v: FuzzyVariable, x: float) -> dict[str, float]:
    """Degrees of ``x`` in every label of ``v``.

    ``x`` is clamped into the universe first so out-of-range states seen
    during awkward starts still produce usable degrees.
    """
    if not math.isfinite(x):
        raise InvalidInputError(f"non-finite input {x!r} for variable {v.name!r}")
    if x < v.lo:
        x = v.lo
    elif x > v.hi:
        x = v.hi
    return {name: membership_degree(mf, x) for name, mf in v.labels}


@dataclass(frozen=True)
class OutputVariable:
    """Output labels mapped to crisp angular-velocity singletons (rad/s)."""

    name: str
    singletons: tuple[tuple[str, float], ...]

    def __post_init__(self):
        if not self.singletons:
            raise ConfigurationError(f"output {self.name!r} has no labels")
        names = [n for n, _ in self.singletons]
        if len(set(names)) != len(names):
            raise ConfigurationError(f"output {self.name!r}: duplicate labels")
        if not all(math.isfinite(v) for _, v in self.singletons):
            raise ConfigurationError(f"output {self.name!r}: non-finite singleton")

    def value_map(self) -> dict[str, float]:
        return dict(self.singletons)


@dataclass(frozen=True)
class Rule:
    """Conjunctive rule: ``if v1 is l1 [and v2 is l2] then out is label``."""

    antecedent: tuple[tuple[str, str], ...]
    consequent: tuple[str, str]

    def __post_init__(self):
        if not self.antecedent:
            raise ConfigurationError("rule has an empty antecedent")


def rule_strength(
    rule: Rule, fuzzified: Mapping[str, Mapping[str, float]]
) -> float:
    """Firing strength: minimum over the rule's clause degrees."""
    strength = 1.0
    for var_name, label in rule.antecedent:
        degrees = fuzzified.get(var_name)
        if degrees is None or label not in degrees:
            raise ConfigurationError(
                f"rule clause '{var_name} is {label}' does not resolve"
            )
        d = degrees[label]
        if d < strength:
            strength = d
    return strength


def defuzzify(strengths: Mapping[str, float], out: OutputVariable) -> float:
    """Strength-weighted average of the output singletons.

    Raises :class:`RuleGapError` when every strength is zero, since the
    average would be undefined.
    """
    num = 0.0
    den = 0.0
    for label, value in out.singletons:
        s = strengths.get(label, 0.0)
        if s < 0.0:
            raise ConfigurationError(f"negative strength for {label!r}")
        num += s * value
        den += s
    if den == 0.0:
        raise RuleGapError("no rule fired with positive strength")
    return num / den


@dataclass(frozen=True)
class Controller:
    """A complete fuzzy controller: 1-2 inputs, one output, a rule list."""

    name: str
    inputs: tuple[FuzzyVariable, ...]
    output: OutputVariable
    rules: tuple[Rule, ...]

    def __post_init__(self):
        if not 1 <= len(self.inputs) <= 2:
            raise ConfigurationError(
                f"controller {self.name!r} needs 1 or 2 inputs, has {len(self.inputs)}"
            )
        names = [v.name for v in self.inputs]
        if len(set(names)) != len(names):
            raise ConfigurationError(f"controller {self.name!r}: duplicate input names")
        if not self.rules:
            raise ConfigurationError(f"controller {self.name!r} has no rules")

    def evaluate(self, inputs: Mapping[str, float]) -> float:
        return evaluate(self, inputs)

    def compile(self) -> "CompiledController":
        return CompiledController(self)


def evaluate(c: Controller, inputs: Mapping[str, float]) -> float:
    """Crisp output (rad/s) of controller ``c`` for the given input map.

    Deterministic and continuous in each input; the result always lies
    within [min singleton, max singleton].
    """
    fuzzified: dict[str, dict[str, float]] = {}
    for var in c.inputs:
        if var.name not in inputs:
            raise InvalidInputError(
                f"controller {c.name!r}: missing input {var.name!r}"
            )
        fuzzified[var.name] = fuzzify(var, inputs[var.name])
    strengths: dict[str, float] = {}
    for rule in c.rules:
        s = rule_strength(rule, fuzzified)
        label = rule.consequent[1]
        prev = strengths.get(label, 0.0)
        if s > prev:
            strengths[label] = s
    try:
        return defuzzify(strengths, c.output)
    except RuleGapError:
        point = {v.name: inputs[v.name] for v in c.inputs}
        raise RuleGapError(
            f"controller {c.name!r}: no rule fires at {point}", point=point
        ) from None


@dataclass(frozen=True)
class Surface:
    """Uniform sampling of a controller's input/output relationship."""

    input_names: tuple[str, ...]
    axes: tuple[tuple[float, ...], ...]
    values: tuple  # 1-input: tuple[float]; 2-input: tuple[tuple[float, ...]]


def sample_surface(c: Controller, resolution: int) -> Surface:
    """Sample the decision surface on a uniform grid (``resolution`` >= 2).

    One input yields ``resolution`` points, two inputs a full
    ``resolution**2`` grid (first axis major).
    """
    if resolution < 2:
        raise ConfigurationError("surface resolution must be at least 2")
    axes = []
    for var in c.inputs:
        step = (var.hi - var.lo) / (resolution - 1)
        axes.append(tuple(var.lo + i * step for i in range(resolution)))
    names = tuple(v.name for v in c.inputs)
    if len(c.inputs) == 1:
        values = tuple(evaluate(c, {names[0]: x}) for x in axes[0])
        return Surface(names, (axes[0],), values)
    values2 = tuple(
        tuple(evaluate(c, {names[0]: x, names[1]: y}) for y in axes[1])
        for x in axes[0]
    )
    return Surface(names, (axes[0], axes[1]), values2)


def mirrored(c: Controller) -> Controller:
    """Reflect a controller through zero: universes, shapes, and outputs.

    Evaluating the mirror at negated inputs negates the original output
    exactly (bitwise), which the test suite relies on.
    """
    def flip(mf: MembershipFunction) -> MembershipFunction:
        pts = tuple(-p for p in reversed(mf.points))
        if mf.shape == LEFT_SHOULDER:
            return MembershipFunction(RIGHT_SHOULDER, pts)
        if mf.shape == RIGHT_SHOULDER:
            return MembershipFunction(LEFT_SHOULDER, pts)
        return MembershipFunction(mf.shape, pts)

    inputs = tuple(
        FuzzyVariable(
            v.name,
            -v.hi,
            -v.lo,
            tuple((name, flip(mf)) for name, mf in v.labels),
        )
        for v in c.inputs
    )
    output = OutputVariable(
        c.output.name, tuple((name, -val) for name, val in c.output.singletons)
    )
    return Controller(c.name, inputs, output, c.rules)


class CompiledController:
    """Specialized evaluator for the simulation hot path.

    Compilation unrolls the controller into straight-line generated code
    with every breakpoint and singleton folded in as a constant.  The
    emitted arithmetic replicates :func:`evaluate` operation for
    operation, so results are bit-identical; the test suite asserts it.
    """

    __slots__ = (
        "arity", "input_names", "_vars", "_rules", "_values", "_nout", "_fn",
    )

    _SHAPE_CODES = {TRIANGULAR: 0, LEFT_SHOULDER: 1, RIGHT_SHOULDER: 2, TRAPEZOIDAL: 3}

    def __init__(self, c: Controller):
        self.arity = len(c.inputs)
        self.input_names = tuple(v.name for v in c.inputs)
        self._vars = []
        label_index: list[dict[str, int]] = []
        for v in c.inputs:
            mfs = tuple(
                (self._SHAPE_CODES[mf.shape], mf.points) for _, mf in v.labels
            )
            self._vars.append((v.lo, v.hi, mfs))
            label_index.append({name: i for i, (name, _) in enumerate(v.labels)})
        var_index = {v.name: i for i, v in enumerate(c.inputs)}
        out_index = {name: i for i, (name, _) in enumerate(c.output.singletons)}
        self._values = tuple(val for _, val in c.output.singletons)
        self._nout = len(self._values)
        self._rules = tuple(
            (
                tuple(
                    (var_index[vn], label_index[var_index[vn]][lb])
                    for vn, lb in rule.antecedent
                ),
                out_index[rule.consequent[1]],
            )
            for rule in c.rules
        )
        self._fn = self._generate()

    def _generate(self):
        """Emit a straight-line evaluator with all parameters constant-folded."""
        lines = []
        args = ", ".join(f"x{i}" for i in range(self.arity))
        lines.append(f"def _eval({args}):")
        used: set[tuple[int, int]] = set()
        for clauses, _ in self._rules:
            used.update(clauses)
        for i, (lo, hi, mfs) in enumerate(self._vars):
            lines.append(f" if x{i} < {lo!r}: x{i} = {lo!r}")
            lines.append(f" elif x{i} > {hi!r}: x{i} = {hi!r}")
            for j, (code, p) in enumerate(mfs):
                if (i, j) not in used:
                    continue
                d = f"d{i}_{j}"
                if code == 0:  # triangular
                    a, b, c = p
                    lines.append(f" if x{i} == {b!r}: {d} = 1.0")
                    lines.append(f" elif x{i} <= {a!r} or x{i} >= {c!r}: {d} = 0.0")
                    lines.append(f" elif x{i} < {b!r}: {d} = (x{i} - {a!r}) / ({b!r} - {a!r})")
                    lines.append(f" else: {d} = ({c!r} - x{i}) / ({c!r} - {b!r})")
                elif code == 1:  # left shoulder
                    a, b = p
                    lines.append(f" if x{i} <= {a!r}: {d} = 1.0")
                    lines.append(f" elif x{i} >= {b!r}: {d} = 0.0")
                    lines.append(f" else: {d} = ({b!r} - x{i}) / ({b!r} - {a!r})")
                elif code == 2:  # right shoulder
                    a, b = p
                    lines.append(f" if x{i} >= {b!r}: {d} = 1.0")
                    lines.append(f" elif x{i} <= {a!r}: {d} = 0.0")
                    lines.append(f" else: {d} = (x{i} - {a!r}) / ({b!r} - {a!r})")
                else:  # trapezoidal
                    a, b, c, dd = p
                    lines.append(f" if {b!r} <= x{i} <= {c!r}: {d} = 1.0")
                    lines.append(f" elif x{i} <= {a!r} or x{i} >= {dd!r}: {d} = 0.0")
                    lines.append(f" elif x{i} < {b!r}: {d} = (x{i} - {a!r}) / ({b!r} - {a!r})")
                    lines.append(f" else: {d} = ({dd!r} - x{i}) / ({dd!r} - {c!r})")
        by_out: dict[int, list[int]] = {}
        for r, (clauses, out_i) in enumerate(self._rules):
            if len(clauses) == 1:
                vi, li = clauses[0]
                lines.append(f" s{r} = d{vi}_{li}")
            else:
                terms = [f"d{vi}_{li}" for vi, li in clauses]
                expr = terms[0]
                for term in terms[1:]:
                    expr = f"({term} if {term} < {expr} else {expr})"
                lines.append(f" s{r} = {expr}")
            by_out.setdefault(out_i, []).append(r)
        for out_i in range(self._nout):
            rules = by_out.get(out_i, [])
            if not rules:
                lines.append(f" a{out_i} = 0.0")
                continue
            lines.append(f" a{out_i} = s{rules[0]} if s{rules[0]} > 0.0 else 0.0")
            for r in rules[1:]:
                lines.append(f" if s{r} > a{out_i}: a{out_i} = s{r}")
        num = " + ".join(f"a{k} * {self._values[k]!r}" for k in range(self._nout))
        den = " + ".join(f"a{k}" for k in range(self._nout))
        lines.append(f" den = {den}")
        lines.append(" if den == 0.0:")
        point = "{" + ", ".join(
            f"{name!r}: x{i}" for i, name in enumerate(self.input_names)
        ) + "}"
        lines.append(f"  raise RuleGapError('no rule fires', point={point})")
        lines.append(f" return ({num}) / den")
        namespace = {"RuleGapError": RuleGapError}
        exec("\n".join(lines), namespace)  # noqa: S102 - generated from numbers only
        return namespace["_eval"]

    def _degrees(self, var_i: int, x: float) -> list[float]:
        lo, hi, mfs = self._vars[var_i]
        if x < lo:
            x = lo
        elif x > hi:
            x = hi
        row = []
        append = row.append
        for code, p in mfs:
            if code == 0:  # triangular
                a, b, c = p
                if x == b:
                    append(1.0)
                elif x <= a or x >= c:
                    append(0.0)
                elif x < b:
                    append((x - a) / (b - a))
                else:
                    append((c - x) / (c - b))
            elif code == 1:  # left shoulder
                a, b = p
                if x <= a:
                    append(1.0)
                elif x >= b:
                    append(0.0)
                else:
                    append((b - x) / (b - a))
            elif code == 2:  # right shoulder
                a, b = p
                if x >= b:
                    append(1.0)
                elif x <= a:
                    append(0.0)
                else:
                    append((x - a) / (b - a))
            else:  # trapezoidal
                a, b, c, d = p
                if b <= x <= c:
                    append(1.0)
                elif x <= a or x >= d:
                    append(0.0)
                elif x < b:
                    append((x - a) / (b - a))
                else:
                    append((d - x) / (d - c))
        return row

    def _combine(self, degrees: tuple, xs: tuple) -> float:
        acc = [0.0] * self._nout
        for clauses, out_i in self._rules:
            strength = 1.0
            for var_i, label_i in clauses:
                d = degrees[var_i][label_i]
                if d < strength:
                    strength = d
            if strength > acc[out_i]:
                acc[out_i] = strength
        num = 0.0
        den = 0.0
        for i, value in enumerate(self._values):
            s = acc[i]
            num += s * value
            den += s
        if den == 0.0:
            raise RuleGapError(
                "no rule fires", point=dict(zip(self.input_names, xs))
            )
        return num / den

    def interpret(self, *xs: float) -> float:
        """Table-driven evaluation; the generated code must match it."""
        degrees = tuple(self._degrees(i, x) for i, x in enumerate(xs))
        return self._combine(degrees, xs)

    def eval1(self, x0: float) -> float:
        return self._fn(x0)

    def eval2(self, x0: float, x1: float) -> float:
        return self._fn(x0, x1)

    def __call__(self, x0: float, x1: float = 0.0) -> float:
        if self.arity == 1:
            return self._fn(x0)
        return self._fn(x0, x1)


VALIDATION_GRID = 1024


def validate_controller(
    c: Controller, grid: int = VALIDATION_GRID
) -> list[tuple[str, str]]:
    """Check load-time invariants; returns (code, message) problems.

    Universe coverage (every point belongs somewhere) and rule
    completeness (every grid point fires at least one rule) are checked
    on a dense grid so gaps fail fast instead of surfacing mid-simulation.
    """
    problems: list[tuple[str, str]] = []
    known_labels = {v.name: {n for n, _ in v.labels} for v in c.inputs}
    out_labels = {n for n, _ in c.output.singletons}

    for rule in c.rules:
        for var_name, label in rule.antecedent:
            if var_name not in known_labels:
                problems.append(
                    ("unknown-reference", f"rule references unknown variable '{var_name}'")
                )
            elif label not in known_labels[var_name]:
                problems.append(
                    ("unknown-reference", f"unknown label '{label}' of '{var_name}'")
                )
        out_name, out_label = rule.consequent
        if out_name != c.output.name:
            problems.append(
                ("unknown-reference", f"rule targets unknown output '{out_name}'")
            )
        elif out_label not in out_labels:
            problems.append(
                ("unknown-reference", f"unknown label '{out_label}' of '{out_name}'")
            )
    if problems:
        return problems

    grids = []
    for v in c.inputs:
        step = (v.hi - v.lo) / (grid - 1)
        xs = [v.lo + i * step for i in range(grid)]
        covered_any = [False] * grid
        per_label = {}
        for name, mf in v.labels:
            vec = [membership_degree(mf, x) > 0.0 for x in xs]
            per_label[name] = vec
            covered_any = [a or b for a, b in zip(covered_any, vec)]
        if not all(covered_any):
            i = covered_any.index(False)
            problems.append(
                ("coverage-gap", f"variable '{v.name}' has a coverage gap near {xs[i]:.6g}")
            )
        grids.append((v.name, per_label))
    if problems:
        return problems

    if len(c.inputs) == 1:
        name, per_label = grids[0]
        fired = [False] * grid
        for rule in c.rules:
            vec = [True] * grid
            for _, label in rule.antecedent:
                lv = per_label[label]
                vec = [a and b for a, b in zip(vec, lv)]
            fired = [a or b for a, b in zip(fired, vec)]
        if not all(fired):
            i = fired.index(False)
            v = c.inputs[0]
            x = v.lo + i * (v.hi - v.lo) / (grid - 1)
            problems.append(("rule-gap", f"no rule fires near {name}={x:.6g}"))
    else:
        import numpy as np

        (name0, labels0), (name1, labels1) = grids
        fired = np.zeros((grid, grid), dtype=bool)
        for rule in c.rules:
            vec0 = np.ones(grid, dtype=bool)
            vec1 = np.ones(grid, dtype=bool)
            for var_name, label in rule.antecedent:
                if var_name == name0:
                    vec0 &= np.asarray(labels0[label])
                else:
                    vec1 &= np.asarray(labels1[label])
            fired |= np.outer(vec0, vec1)
        if not fired.all():
            i, j = np.argwhere(~fired)[0]
            v0, v1 = c.inputs
            x = v0.lo + i * (v0.hi - v0.lo) / (grid - 1)
            y = v1.lo + j * (v1.hi - v1.lo) / (grid - 1)
            problems.append(
                ("rule-gap", f"no rule fires near {name0}={x:.6g}, {name1}={y:.6g}")
            )
    return problems


def output_bounds(c: Controller) -> tuple[float, float]:
    """(min, max) over the output singletons; evaluate never leaves them."""
    values = [v for _, v in c.output.singletons]
    return min(values), max(values)


def lipschitz_bound(c: Controller) -> float:
    """Upper bound on |d evaluate/dx| from breakpoint slopes and outputs.

    Conservative: sum of per-label slope bounds times the singleton range,
    divided by the smallest aggregate membership seen on a dense grid.
    Used by the continuity property test.
    """
    lo_v, hi_v = output_bounds(c)
    value_range = hi_v - lo_v
    slope_sum = 0.0
    for v in c.inputs:
        for _, mf in v.labels:
            pts = mf.points
            edges = zip(pts, pts[1:])
            for a, b in edges:
                if b > a:
                    slope_sum += 1.0 / (b - a)
    den_min = _min_activation(c)
    if den_min <= 0.0:
        return math.inf
    # d(num/den) <= (|num'| + |out|max * |den'|) / den_min; both derivative
    # magnitudes are bounded by slope_sum scaled by the output magnitudes.
    out_mag = max(abs(lo_v), abs(hi_v))
    return slope_sum * (out_mag + out_mag + value_range) / den_min


def _min_activation(c: Controller, grid: int = 2048) -> float:
    best = math.inf
    if len(c.inputs) == 1:
        v = c.inputs[0]
        for i in range(grid):
            x = v.lo + i * (v.hi - v.lo) / (grid - 1)
            fz = {v.name: fuzzify(v, x)}
            total = 0.0
            acc: dict[str, float] = {}
            for rule in c.rules:
                s = rule_strength(rule, fz)
                lb = rule.consequent[1]
                if s > acc.get(lb, 0.0):
                    acc[lb] = s
            total = sum(acc.values())
            best = min(best, total)
        return best
    v0, v1 = c.inputs
    n = 96
    for i in range(n):
        x = v0.lo + i * (v0.hi - v0.lo) / (n - 1)
        f0 = fuzzify(v0, x)
        for j in range(n):
            y = v1.lo + j * (v1.hi - v1.lo) / (n - 1)
            fz = {v0.name: f0, v1.name: fuzzify(v1, y)}
            acc: dict[str, float] = {}
            for rule in c.rules:
                s = rule_strength(rule, fz)
                lb = rule.consequent[1]
                if s > acc.get(lb, 0.0):
                    acc[lb] = s
            best = min(best, sum(acc.values()))
    return best
