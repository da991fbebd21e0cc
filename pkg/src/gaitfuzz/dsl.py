"""Textual controller format (.fzc): parse, validate, serialize, patch.

The format is line-oriented and keyword-led so hand edits diff cleanly:

    # comment
    controller hip_swing {
      input delta range -1.2 .. 1.2 unit none {
        start lshoulder(-1, -0.7)
        center tri(-0.7, 0, 0.75)
        end rshoulder(0.75, 1)
      }
      output velocity {
        slow 4
        fast 155
        stay 0
      }
      rule if delta is start then velocity is slow
      rule if delta is center then velocity is fast
      rule if delta is end then velocity is stay
    }

    bind level hip_swing hip_swing metric delta_scaled

Angles and angular velocities are written in degrees (and deg/s) for
hand-tuning comfort and converted to radians at parse time; inputs
declared ``unit none`` (the dimensionless scaled hip metric) pass
through unchanged.  Two-input controllers bind with
``metric <first> and <second>``, matched positionally to the declared
inputs.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace

from . import fuzzy
from .errors import ConfigurationError

DEG = math.pi / 180.0

GAIT_MODES = ("level", "ascent")
JOINT_ROLES = (
    "hip_swing",
    "knee_swing",
    "ankle_swing",
    "ball_swing",
    "hip_stance",
    "knee_stance",
    "ankle_stance",
    "ball_stance",
)
METRIC_NAMES = ("alpha", "delta_scaled", "sole_angle")
UNIT_NAMES = ("deg", "none")

_SHAPE_KEYWORDS = {
    "tri": fuzzy.TRIANGULAR,
    "trap": fuzzy.TRAPEZOIDAL,
    "lshoulder": fuzzy.LEFT_SHOULDER,
    "rshoulder": fuzzy.RIGHT_SHOULDER,
}
_SHAPE_NAMES = {v: k for k, v in _SHAPE_KEYWORDS.items()}

MAX_DIAGNOSTICS = 100


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    line: int
    column: int
    message: str
    code: str

    def format(self, origin: str = "<inline>") -> str:
        return (
            f"{origin}:{self.line}:{self.column}: {self.severity}: "
            f"{self.message} [{self.code}]"
        )


@dataclass(frozen=True)
class Binding:
    """Which controller drives a joint role in a gait mode, fed by which metrics."""

    mode: str
    role: str
    controller: str
    metrics: tuple[str, ...]


@dataclass(frozen=True)
class ControllerSet:
    """Ordered controllers plus the joint-role binding table.

    ``input_units`` remembers each input's declared unit ("deg" or
    "none"), keyed like the controllers tuple, so serialization can
    convert radians back to the units the author wrote.
    """

    controllers: tuple[fuzzy.Controller, ...]
    bindings: tuple[Binding, ...]
    input_units: tuple[tuple[str, ...], ...]

    def controller(self, name: str) -> fuzzy.Controller:
        for c in self.controllers:
            if c.name == name:
                return c
        raise KeyError(name)

    def unit_of(self, controller_name: str, input_name: str) -> str:
        for c, units in zip(self.controllers, self.input_units):
            if c.name == controller_name:
                for var, unit in zip(c.inputs, units):
                    if var.name == input_name:
                        return unit
        raise KeyError((controller_name, input_name))

    def binding_for(self, mode: str, role: str) -> Binding | None:
        for b in self.bindings:
            if b.mode == mode and b.role == role:
                return b
        return None


EMPTY_SET = ControllerSet((), (), ())


# ---------------------------------------------------------------------------
# Lexer


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<number>-?(?:\d+\.\d+|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<dotdot>\.\.)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "ident" | "number" | "{" | "}" | "(" | ")" | "," | ".." | "eof"
    text: str
    line: int
    column: int


def _tokenize(text: str) -> tuple[list[_Token], list[Diagnostic]]:
    tokens: list[_Token] = []
    diags: list[Diagnostic] = []
    line = 1
    line_start = 0
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            col = pos - line_start + 1
            ch = text[pos]
            if len(diags) < MAX_DIAGNOSTICS:
                diags.append(
                    Diagnostic("error", line, col, f"unexpected character {ch!r}", "syntax")
                )
            pos += 1
            continue
        kind = m.lastgroup
        value = m.group()
        col = pos - line_start + 1
        pos = m.end()
        if kind == "nl":
            line += 1
            line_start = pos
        elif kind in ("ws", "comment"):
            pass
        elif kind == "number":
            tokens.append(_Token("number", value, line, col))
        elif kind == "dotdot":
            tokens.append(_Token("..", value, line, col))
        elif kind == "ident":
            tokens.append(_Token("ident", value, line, col))
        else:
            tokens.append(_Token(value, value, line, col))
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens, diags


# ---------------------------------------------------------------------------
# AST (positions retained for semantic diagnostics)


@dataclass
class _LabelAst:
    name: str
    shape: str
    args: list[float]
    pos: _Token


@dataclass
class _InputAst:
    name: str
    lo: float
    hi: float
    unit: str
    labels: list[_LabelAst]
    pos: _Token


@dataclass
class _OutputAst:
    name: str
    singletons: list[tuple[str, float, _Token]]
    pos: _Token


@dataclass
class _RuleAst:
    clauses: list[tuple[str, str, _Token]]
    out_var: str
    out_label: str
    out_pos: _Token
    pos: _Token


@dataclass
class _ControllerAst:
    name: str
    inputs: list[_InputAst]
    outputs: list[_OutputAst]
    rules: list[_RuleAst]
    pos: _Token


@dataclass
class _BindAst:
    mode: str
    role: str
    controller: str
    metrics: list[str]
    pos: _Token
    controller_pos: _Token


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0
        self.diags: list[Diagnostic] = []
        self.controllers: list[_ControllerAst] = []
        self.binds: list[_BindAst] = []

    # -- token plumbing

    @property
    def cur(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def error(self, tok: _Token, message: str, code: str = "syntax") -> None:
        if len(self.diags) < MAX_DIAGNOSTICS:
            self.diags.append(Diagnostic("error", tok.line, tok.column, message, code))

    def expect(self, kind: str, what: str) -> _Token | None:
        tok = self.cur
        if tok.kind != kind:
            self.error(tok, f"expected {what}, found {tok.text!r}" if tok.text else f"expected {what}")
            return None
        return self.advance()

    def expect_keyword(self, word: str) -> _Token | None:
        tok = self.cur
        if tok.kind != "ident" or tok.text != word:
            self.error(tok, f"expected '{word}', found {tok.text!r}" if tok.text else f"expected '{word}'")
            return None
        return self.advance()

    def number(self, what: str) -> tuple[float, _Token] | None:
        tok = self.expect("number", what)
        if tok is None:
            return None
        try:
            return float(tok.text), tok
        except ValueError:  # pragma: no cover - regex should preclude this
            self.error(tok, f"bad number {tok.text!r}")
            return None

    def skip_to_toplevel(self) -> None:
        """Panic recovery: skip until the next top-level statement keyword."""
        depth = 0
        while True:
            tok = self.cur
            if tok.kind == "eof":
                return
            if tok.kind == "{":
                depth += 1
            elif tok.kind == "}":
                if depth == 0:
                    self.advance()
                    return
                depth -= 1
            elif depth == 0 and tok.kind == "ident" and tok.text in ("controller", "bind"):
                return
            self.advance()

    def skip_block(self) -> None:
        """Skip a brace-balanced block after an error inside it."""
        depth = 1
        while depth > 0:
            tok = self.advance()
            if tok.kind == "eof":
                return
            if tok.kind == "{":
                depth += 1
            elif tok.kind == "}":
                depth -= 1

    # -- grammar

    def parse(self) -> None:
        while True:
            tok = self.cur
            if tok.kind == "eof":
                return
            if tok.kind == "ident" and tok.text == "controller":
                self.parse_controller()
            elif tok.kind == "ident" and tok.text == "bind":
                self.parse_bind()
            else:
                self.error(tok, f"expected 'controller' or 'bind', found {tok.text!r}")
                self.advance()
                self.skip_to_toplevel()
            if len(self.diags) >= MAX_DIAGNOSTICS:
                return

    def parse_controller(self) -> None:
        self.advance()  # 'controller'
        name_tok = self.expect("ident", "controller name")
        if name_tok is None:
            self.skip_to_toplevel()
            return
        ast = _ControllerAst(name_tok.text, [], [], [], name_tok)
        if self.expect("{", "'{'") is None:
            self.skip_to_toplevel()
            return
        while True:
            tok = self.cur
            if tok.kind == "}":
                self.advance()
                break
            if tok.kind == "eof":
                self.error(tok, "unterminated controller block")
                break
            if tok.kind == "ident" and tok.text == "input":
                item = self.parse_input()
                if item is not None:
                    ast.inputs.append(item)
            elif tok.kind == "ident" and tok.text == "output":
                item = self.parse_output()
                if item is not None:
                    ast.outputs.append(item)
            elif tok.kind == "ident" and tok.text == "rule":
                item = self.parse_rule()
                if item is not None:
                    ast.rules.append(item)
            else:
                self.error(tok, f"expected 'input', 'output' or 'rule', found {tok.text!r}")
                self.advance()
                self.skip_block()
                return
            if len(self.diags) >= MAX_DIAGNOSTICS:
                return
        self.controllers.append(ast)

    def parse_input(self) -> _InputAst | None:
        self.advance()  # 'input'
        name_tok = self.expect("ident", "input variable name")
        if name_tok is None:
            return None
        if self.expect_keyword("range") is None:
            return None
        lo = self.number("range lower bound")
        if lo is None:
            return None
        if self.expect("..", "'..'") is None:
            return None
        hi = self.number("range upper bound")
        if hi is None:
            return None
        unit = "deg"
        if self.cur.kind == "ident" and self.cur.text == "unit":
            self.advance()
            unit_tok = self.expect("ident", "unit name ('deg' or 'none')")
            if unit_tok is None:
                return None
            if unit_tok.text not in UNIT_NAMES:
                self.error(unit_tok, f"unknown unit {unit_tok.text!r} (expected 'deg' or 'none')")
                return None
            unit = unit_tok.text
        if self.expect("{", "'{'") is None:
            return None
        labels: list[_LabelAst] = []
        while True:
            tok = self.cur
            if tok.kind == "}":
                self.advance()
                break
            if tok.kind != "ident":
                self.error(tok, f"expected label name or '}}', found {tok.text!r}")
                self.skip_block()
                return None
            label_tok = self.advance()
            shape_tok = self.expect("ident", "membership shape")
            if shape_tok is None:
                self.skip_block()
                return None
            if shape_tok.text not in _SHAPE_KEYWORDS:
                self.error(
                    shape_tok,
                    f"unknown shape {shape_tok.text!r} "
                    "(expected tri, trap, lshoulder or rshoulder)",
                )
                self.skip_block()
                return None
            if self.expect("(", "'('") is None:
                self.skip_block()
                return None
            args: list[float] = []
            while True:
                num = self.number("breakpoint")
                if num is None:
                    self.skip_block()
                    return None
                args.append(num[0])
                if self.cur.kind == ",":
                    self.advance()
                    continue
                break
            if self.expect(")", "')'") is None:
                self.skip_block()
                return None
            labels.append(_LabelAst(label_tok.text, shape_tok.text, args, shape_tok))
        return _InputAst(name_tok.text, lo[0], hi[0], unit, labels, name_tok)

    def parse_output(self) -> _OutputAst | None:
        self.advance()  # 'output'
        name_tok = self.expect("ident", "output variable name")
        if name_tok is None:
            return None
        if self.expect("{", "'{'") is None:
            return None
        singletons: list[tuple[str, float, _Token]] = []
        while True:
            tok = self.cur
            if tok.kind == "}":
                self.advance()
                break
            if tok.kind != "ident":
                self.error(tok, f"expected output label or '}}', found {tok.text!r}")
                self.skip_block()
                return None
            label_tok = self.advance()
            num = self.number("singleton value")
            if num is None:
                self.skip_block()
                return None
            singletons.append((label_tok.text, num[0], label_tok))
        return _OutputAst(name_tok.text, singletons, name_tok)

    def parse_rule(self) -> _RuleAst | None:
        rule_tok = self.advance()  # 'rule'
        if self.expect_keyword("if") is None:
            return None
        clauses: list[tuple[str, str, _Token]] = []
        while True:
            var_tok = self.expect("ident", "input variable name")
            if var_tok is None:
                return None
            if self.expect_keyword("is") is None:
                return None
            label_tok = self.expect("ident", "label name")
            if label_tok is None:
                return None
            clauses.append((var_tok.text, label_tok.text, label_tok))
            if self.cur.kind == "ident" and self.cur.text == "and":
                self.advance()
                continue
            break
        if self.expect_keyword("then") is None:
            return None
        out_tok = self.expect("ident", "output variable name")
        if out_tok is None:
            return None
        if self.expect_keyword("is") is None:
            return None
        out_label_tok = self.expect("ident", "output label name")
        if out_label_tok is None:
            return None
        return _RuleAst(clauses, out_tok.text, out_label_tok.text, out_label_tok, rule_tok)

    def parse_bind(self) -> None:
        bind_tok = self.advance()  # 'bind'
        mode_tok = self.expect("ident", "gait mode ('level' or 'ascent')")
        if mode_tok is None:
            self.skip_to_toplevel()
            return
        role_tok = self.expect("ident", "joint role")
        if role_tok is None:
            self.skip_to_toplevel()
            return
        ctrl_tok = self.expect("ident", "controller name")
        if ctrl_tok is None:
            self.skip_to_toplevel()
            return
        if self.expect_keyword("metric") is None:
            self.skip_to_toplevel()
            return
        metrics = []
        while True:
            metric_tok = self.expect("ident", "metric name")
            if metric_tok is None:
                self.skip_to_toplevel()
                return
            if metric_tok.text not in METRIC_NAMES:
                self.error(
                    metric_tok,
                    f"unknown metric {metric_tok.text!r} "
                    f"(expected one of {', '.join(METRIC_NAMES)})",
                    "unknown-reference",
                )
                self.skip_to_toplevel()
                return
            metrics.append(metric_tok.text)
            if self.cur.kind == "ident" and self.cur.text == "and":
                self.advance()
                continue
            break
        if mode_tok.text not in GAIT_MODES:
            self.error(mode_tok, f"unknown gait mode {mode_tok.text!r}", "unknown-reference")
            return
        if role_tok.text not in JOINT_ROLES:
            self.error(role_tok, f"unknown joint role {role_tok.text!r}", "unknown-reference")
            return
        self.binds.append(
            _BindAst(mode_tok.text, role_tok.text, ctrl_tok.text, metrics, bind_tok, ctrl_tok)
        )


# ---------------------------------------------------------------------------
# Semantic validation and object construction


def _build_set(
    p: _Parser, diags: list[Diagnostic]
) -> ControllerSet | None:
    def err(tok: _Token, message: str, code: str) -> None:
        if len(diags) < MAX_DIAGNOSTICS:
            diags.append(Diagnostic("error", tok.line, tok.column, message, code))

    controllers: list[fuzzy.Controller] = []
    all_units: list[tuple[str, ...]] = []
    seen_names: dict[str, _Token] = {}
    for cast in p.controllers:
        if cast.name in seen_names:
            err(cast.pos, f"duplicate controller name '{cast.name}'", "duplicate-name")
            continue
        seen_names[cast.name] = cast.pos
        ok = True
        if len(cast.outputs) != 1:
            err(
                cast.pos,
                f"controller '{cast.name}' must declare exactly one output",
                "syntax",
            )
            ok = False
        if not 1 <= len(cast.inputs) <= 2:
            err(
                cast.pos,
                f"controller '{cast.name}' must declare one or two inputs",
                "syntax",
            )
            ok = False
        if not cast.rules:
            err(cast.pos, f"controller '{cast.name}' has no rules", "rule-gap")
            ok = False

        # every section is checked even when a previous one failed, so a
        # single pass reports all independent mistakes
        variables: list[fuzzy.FuzzyVariable] = []
        units: list[str] = []
        for iast in cast.inputs:
            scale = DEG if iast.unit == "deg" else 1.0
            labels = []
            bad = False
            seen_labels = set()
            for last in iast.labels:
                if last.name in seen_labels:
                    err(last.pos, f"duplicate label '{last.name}'", "duplicate-name")
                    bad = True
                    continue
                seen_labels.add(last.name)
                expected = {
                    "tri": 3, "trap": 4, "lshoulder": 2, "rshoulder": 2
                }[last.shape]
                if len(last.args) != expected:
                    err(
                        last.pos,
                        f"{last.shape} takes {expected} breakpoints, got {len(last.args)}",
                        "syntax",
                    )
                    bad = True
                    continue
                pts = tuple(a * scale for a in last.args)
                try:
                    mf = fuzzy.MembershipFunction(_SHAPE_KEYWORDS[last.shape], pts)
                except ConfigurationError:
                    err(
                        last.pos,
                        f"non-monotone breakpoints {tuple(last.args)}",
                        "non-monotone-breakpoints",
                    )
                    bad = True
                    continue
                labels.append((last.name, mf))
            if bad:
                ok = False
                continue
            try:
                variables.append(
                    fuzzy.FuzzyVariable(iast.name, iast.lo * scale, iast.hi * scale, tuple(labels))
                )
                units.append(iast.unit)
            except ConfigurationError as exc:
                err(iast.pos, str(exc), "syntax")
                ok = False

        output = None
        seen_out: set[str] = set()
        if cast.outputs:
            oast = cast.outputs[0]
            singles = []
            for label, value, tok in oast.singletons:
                if label in seen_out:
                    err(tok, f"duplicate output label '{label}'", "duplicate-name")
                    ok = False
                    continue
                seen_out.add(label)
                singles.append((label, value * DEG))
            if not singles:
                err(oast.pos, f"output '{oast.name}' has no labels", "syntax")
                ok = False
            else:
                output = fuzzy.OutputVariable(oast.name, tuple(singles))

        # reference checks run against declared names, independent of
        # whether those declarations built cleanly
        ast_labels = {iast.name: {l.name for l in iast.labels} for iast in cast.inputs}
        out_name = cast.outputs[0].name if cast.outputs else None
        rules = []
        for rast in cast.rules:
            rule_ok = True
            for var_name, label, tok in rast.clauses:
                if var_name not in ast_labels:
                    err(tok, f"unknown variable '{var_name}'", "unknown-reference")
                    rule_ok = False
                elif label not in ast_labels[var_name]:
                    err(tok, f"unknown label '{label}'", "unknown-reference")
                    rule_ok = False
            if out_name is None or rast.out_var != out_name:
                err(rast.out_pos, f"unknown output '{rast.out_var}'", "unknown-reference")
                rule_ok = False
            elif rast.out_label not in seen_out:
                err(rast.out_pos, f"unknown label '{rast.out_label}'", "unknown-reference")
                rule_ok = False
            if rule_ok:
                rules.append(
                    fuzzy.Rule(
                        tuple((vn, lb) for vn, lb, _ in rast.clauses),
                        (rast.out_var, rast.out_label),
                    )
                )
            else:
                ok = False
        if not ok or output is None or len(variables) != len(cast.inputs):
            continue

        try:
            controller = fuzzy.Controller(cast.name, tuple(variables), output, tuple(rules))
        except ConfigurationError as exc:
            err(cast.pos, str(exc), "syntax")
            continue
        for code, message in fuzzy.validate_controller(controller):
            err(cast.pos, f"controller '{cast.name}': {message}", code)
            ok = False
        if ok:
            controllers.append(controller)
            all_units.append(tuple(units))

    by_name = {c.name: c for c in controllers}
    bindings: list[Binding] = []
    seen_bindings: set[tuple[str, str]] = set()
    modes_present: dict[str, _Token] = {}
    for bast in p.binds:
        key = (bast.mode, bast.role)
        if key in seen_bindings:
            err(
                bast.pos,
                f"joint role '{bast.role}' bound twice for mode '{bast.mode}'",
                "duplicate-name",
            )
            continue
        seen_bindings.add(key)
        ctrl = by_name.get(bast.controller)
        if ctrl is None:
            if bast.controller not in seen_names:
                err(
                    bast.controller_pos,
                    f"unknown controller '{bast.controller}'",
                    "unknown-reference",
                )
            continue
        if len(bast.metrics) != len(ctrl.inputs):
            err(
                bast.pos,
                f"controller '{bast.controller}' has {len(ctrl.inputs)} input(s) "
                f"but the binding names {len(bast.metrics)} metric(s)",
                "metric-arity",
            )
            continue
        modes_present.setdefault(bast.mode, bast.pos)
        bindings.append(Binding(bast.mode, bast.role, bast.controller, tuple(bast.metrics)))

    for mode, tok in modes_present.items():
        if not any(b.mode == mode and b.role == "hip_swing" for b in bindings):
            err(
                tok,
                f"gait mode '{mode}' binds joints but leaves hip_swing unbound",
                "unbound-joint-role",
            )

    if diags:
        return None
    return ControllerSet(tuple(controllers), tuple(bindings), tuple(all_units))


def parse(text: str, origin: str = "<inline>") -> tuple[ControllerSet | None, list[Diagnostic]]:
    """Parse controller text.

    Returns ``(set, [])`` on success or ``(None, diagnostics)`` on any
    error; the two never mix.  ``origin`` only affects diagnostic
    formatting.
    """
    del origin  # kept for signature symmetry with parse_file
    tokens, diags = _tokenize(text)
    parser = _Parser(tokens)
    parser.parse()
    diags.extend(parser.diags)
    if diags:
        return None, diags[:MAX_DIAGNOSTICS]
    built = _build_set(parser, diags)
    if built is None:
        return None, diags[:MAX_DIAGNOSTICS]
    return built, []


def parse_file(path: str) -> tuple[ControllerSet | None, list[Diagnostic]]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read(), origin=path)


def load(path: str) -> ControllerSet:
    """Parse a file, raising ConfigurationError with formatted diagnostics."""
    cs, diags = parse_file(path)
    if cs is None:
        lines = "\n".join(d.format(path) for d in diags)
        raise ConfigurationError(f"invalid controller file:\n{lines}")
    return cs


def loads(text: str) -> ControllerSet:
    cs, diags = parse(text)
    if cs is None:
        lines = "\n".join(d.format() for d in diags)
        raise ConfigurationError(f"invalid controller text:\n{lines}")
    return cs


# ---------------------------------------------------------------------------
# Serialization


def _fmt(x: float) -> str:
    s = f"{x:.6g}"
    return "0" if s == "-0" else s


def serialize(cs: ControllerSet) -> str:
    """Canonical text: 2-space indent, 6 significant digits, LF endings.

    ``parse(serialize(s))`` reproduces ``s`` structurally for any set
    whose values came from text (one canonicalization round makes the
    representation a fixpoint).
    """
    out = ["# gaitfuzz controller set", ""]
    for controller, units in zip(cs.controllers, cs.input_units):
        out.append(f"controller {controller.name} {{")
        for var, unit in zip(controller.inputs, units):
            scale = 1.0 / DEG if unit == "deg" else 1.0
            out.append(
                f"  input {var.name} range {_fmt(var.lo * scale)} .. "
                f"{_fmt(var.hi * scale)} unit {unit} {{"
            )
            for name, mf in var.labels:
                args = ", ".join(_fmt(p * scale) for p in mf.points)
                out.append(f"    {name} {_SHAPE_NAMES[mf.shape]}({args})")
            out.append("  }")
        out.append(f"  output {controller.output.name} {{")
        for name, value in controller.output.singletons:
            out.append(f"    {name} {_fmt(value / DEG)}")
        out.append("  }")
        for rule in controller.rules:
            clauses = " and ".join(f"{vn} is {lb}" for vn, lb in rule.antecedent)
            out.append(
                f"  rule if {clauses} then {rule.consequent[0]} is {rule.consequent[1]}"
            )
        out.append("}")
        out.append("")
    for b in cs.bindings:
        metrics = " and ".join(b.metrics)
        out.append(f"bind {b.mode} {b.role} {b.controller} metric {metrics}")
    if cs.bindings:
        out.append("")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# Patching


_BREAKPOINT_INDEX = {"a": 0, "b": 1, "c": 2, "d": 3}


def apply_patch(
    cs: ControllerSet, patch: list[tuple[str, float]]
) -> ControllerSet:
    """Return a new set with parameter values replaced.

    Paths address breakpoints or singletons in internal units (radians,
    rad/s, or the raw value for unitless inputs):

        <controller>.input.<variable>.<label>.<a|b|c|d>
        <controller>.output.<variable>.<label>

    The whole patch is atomic: if any path is unknown or any fuzzy
    invariant would break, ConfigurationError is raised and the input
    set is untouched (it is never mutated either way).
    """
    controllers = list(cs.controllers)
    touched: set[int] = set()
    for path, value in patch:
        if not isinstance(value, (int, float)) or not math.isfinite(float(value)):
            raise ConfigurationError(f"patch value for '{path}' must be finite")
        value = float(value)
        parts = path.split(".")
        if len(parts) == 4 and parts[1] == "output":
            ctrl_name, _, var_name, label = parts
            idx = _controller_index(controllers, ctrl_name, path)
            c = controllers[idx]
            if c.output.name != var_name:
                raise ConfigurationError(f"unknown path '{path}': no output '{var_name}'")
            singles = list(c.output.singletons)
            for i, (name, _) in enumerate(singles):
                if name == label:
                    singles[i] = (name, value)
                    break
            else:
                raise ConfigurationError(f"unknown path '{path}': no label '{label}'")
            controllers[idx] = replace(c, output=fuzzy.OutputVariable(var_name, tuple(singles)))
            touched.add(idx)
        elif len(parts) == 5 and parts[1] == "input":
            ctrl_name, _, var_name, label, point = parts
            if point not in _BREAKPOINT_INDEX:
                raise ConfigurationError(
                    f"unknown path '{path}': breakpoint must be one of a, b, c, d"
                )
            idx = _controller_index(controllers, ctrl_name, path)
            c = controllers[idx]
            new_inputs = []
            found = False
            for var in c.inputs:
                if var.name != var_name:
                    new_inputs.append(var)
                    continue
                labels = []
                for name, mf in var.labels:
                    if name != label:
                        labels.append((name, mf))
                        continue
                    pi = _BREAKPOINT_INDEX[point]
                    if pi >= len(mf.points):
                        raise ConfigurationError(
                            f"unknown path '{path}': {_SHAPE_NAMES[mf.shape]} has no "
                            f"breakpoint '{point}'"
                        )
                    pts = list(mf.points)
                    pts[pi] = value
                    try:
                        labels.append((name, fuzzy.MembershipFunction(mf.shape, tuple(pts))))
                    except ConfigurationError as exc:
                        raise ConfigurationError(f"patch '{path}' rejected: {exc}") from None
                    found = True
                if not found:
                    raise ConfigurationError(f"unknown path '{path}': no label '{label}'")
                try:
                    new_inputs.append(replace(var, labels=tuple(labels)))
                except ConfigurationError as exc:
                    raise ConfigurationError(f"patch '{path}' rejected: {exc}") from None
            if not found:
                raise ConfigurationError(f"unknown path '{path}': no input '{var_name}'")
            controllers[idx] = replace(c, inputs=tuple(new_inputs))
            touched.add(idx)
        else:
            raise ConfigurationError(f"unknown path '{path}'")

    for idx in touched:
        problems = fuzzy.validate_controller(controllers[idx])
        if problems:
            code, message = problems[0]
            raise ConfigurationError(
                f"patch rejected, controller '{controllers[idx].name}' would break: "
                f"{message} [{code}]"
            )
    return ControllerSet(tuple(controllers), cs.bindings, cs.input_units)


def _controller_index(controllers: list[fuzzy.Controller], name: str, path: str) -> int:
    for i, c in enumerate(controllers):
        if c.name == name:
            return i
    raise ConfigurationError(f"unknown path '{path}': no controller '{name}'")


# ---------------------------------------------------------------------------
# Structured dump (service hello payload, UI sliders)


def to_json_dict(cs: ControllerSet) -> dict:
    """JSON-friendly structural dump, values in internal units."""
    controllers = []
    for c, units in zip(cs.controllers, cs.input_units):
        inputs = []
        for var, unit in zip(c.inputs, units):
            inputs.append(
                {
                    "name": var.name,
                    "lo": var.lo,
                    "hi": var.hi,
                    "unit": unit,
                    "labels": [
                        {
                            "name": name,
                            "shape": _SHAPE_NAMES[mf.shape],
                            "points": list(mf.points),
                        }
                        for name, mf in var.labels
                    ],
                }
            )
        controllers.append(
            {
                "name": c.name,
                "inputs": inputs,
                "output": {
                    "name": c.output.name,
                    "singletons": [
                        {"name": name, "value": value}
                        for name, value in c.output.singletons
                    ],
                },
                "rules": [
                    {
                        "if": [
                            {"var": vn, "label": lb} for vn, lb in rule.antecedent
                        ],
                        "then": {"var": rule.consequent[0], "label": rule.consequent[1]},
                    }
                    for rule in c.rules
                ],
            }
        )
    return {
        "controllers": controllers,
        "bindings": [
            {
                "mode": b.mode,
                "role": b.role,
                "controller": b.controller,
                "metrics": list(b.metrics),
            }
            for b in cs.bindings
        ],
    }
