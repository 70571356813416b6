"""Constraint rule DSL: parser, built-in predicates/terms, and evaluation
over a lanelet network.

Grammar (one quantifier per rule, `#` starts a line comment):

    rules   := rule+
    rule    := "rule" ID ":" "forall" ID "in" "lanelets" "." formula
    formula := disj ("implies" formula)?          # implies is right-assoc
    disj    := conj ("or" conj)*
    conj    := unary ("and" unary)*
    unary   := "not" unary | "(" formula ")" | atom
    atom    := FUNC "(" ID ")" REL NUM | NUM REL FUNC "(" ID ")" | PRED "(" ID ")"
    REL     := "<" | "<=" | ">" | ">=" | "==" | "!="

Predicate and function names must come from the built-in registries;
unknown names are rejected at parse time with their location.
"""

from __future__ import annotations

import hashlib
import json
import math
import operator
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

from .errors import LanekitError, RuleParseError
from .geometry import circumradius
from .laneletize import Lanelet, LaneletNetwork, network_bytes


class RuleEvaluationError(LanekitError):
    """A term or predicate could not be evaluated on a broken lanelet."""


# --- AST ---------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Func:
    name: str
    var: str


@dataclass(frozen=True)
class Pred:
    name: str
    var: str


@dataclass(frozen=True)
class Cmp:
    lhs: object
    op: str
    rhs: object


@dataclass(frozen=True)
class Not:
    operand: object


@dataclass(frozen=True)
class And:
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Or:
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Implies:
    lhs: object
    rhs: object


@dataclass(frozen=True)
class RuleAst:
    rule_id: str
    var: str
    domain: str
    body: object


# --- built-ins ---------------------------------------------------------

DISTINCT_TOL = 1e-6


def _all_z_finite(points) -> bool:
    return all(math.isfinite(p[2]) for p in points)


def finite_elevation(lanelet: Lanelet) -> bool:
    """True iff every z on both bounds and the centerline is finite."""
    return (_all_z_finite(lanelet.left_bound)
            and _all_z_finite(lanelet.right_bound)
            and _all_z_finite(lanelet.centerline))


def self_successor(lanelet: Lanelet) -> bool:
    return lanelet.id in lanelet.successors


def _has_distinct_pair(points) -> bool:
    # planar distance so non-finite z cannot mask geometric distinctness
    p0 = points[0]
    for p in points[1:]:
        if math.hypot(p[0] - p0[0], p[1] - p0[1]) > DISTINCT_TOL:
            return True
    # everything huddles around p0; settle it pairwise
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            dx = points[i][0] - points[j][0]
            dy = points[i][1] - points[j][1]
            if math.hypot(dx, dy) > DISTINCT_TOL:
                return True
    return False


def valid_polyline(lanelet: Lanelet) -> bool:
    """Both bounds have >= 2 points and at least one geometrically distinct pair."""
    for bound in (lanelet.left_bound, lanelet.right_bound):
        if len(bound) < 2 or not _has_distinct_pair(bound):
            return False
    return True


def min_turning_radius(lanelet: Lanelet) -> float:
    """Minimum circumradius over consecutive 2D centerline triples.

    Straight (collinear) stretches contribute +inf, so a fully straight
    lanelet returns +inf.
    """
    if not valid_polyline(lanelet):
        raise RuleEvaluationError("invalid polyline")
    pts = lanelet.centerline
    if len(pts) < 2:
        raise RuleEvaluationError("centerline has fewer than 2 points")
    best = math.inf
    for i in range(len(pts) - 2):
        r = circumradius(pts[i], pts[i + 1], pts[i + 2])
        if r < best:
            best = r
    return best


def min_width(lanelet: Lanelet) -> float:
    """Minimum 2D distance between index-paired boundary points."""
    left, right = lanelet.left_bound, lanelet.right_bound
    if len(left) != len(right):
        raise RuleEvaluationError("boundary point counts differ")
    if not left:
        raise RuleEvaluationError("empty boundary")
    return min(math.hypot(l[0] - r[0], l[1] - r[1]) for l, r in zip(left, right))


PREDICATES = {
    "finite_elevation": finite_elevation,
    "self_successor": self_successor,
    "valid_polyline": valid_polyline,
}

FUNCTIONS = {
    "min_turning_radius": min_turning_radius,
    "min_width": min_width,
}


# --- lexer / parser ----------------------------------------------------

_KEYWORDS = {"rule", "forall", "in", "lanelets", "not", "and", "or", "implies"}

_TOKEN_RE = re.compile(
    r"""(?P<ws>[ \t\r]+)
      | (?P<nl>\n)
      | (?P<comment>\#[^\n]*)
      | (?P<num>-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
      | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<rel><=|>=|==|!=|<|>)
      | (?P<punct>[:().])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    value: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise RuleParseError(f"{line}:{col}: unexpected character {text[pos]!r}",
                                 line=line, col=col)
        kind = m.lastgroup
        value = m.group()
        if kind == "nl":
            line += 1
            col = 1
        elif kind in ("ws", "comment"):
            col += len(value)
        else:
            if kind == "name" and value in _KEYWORDS:
                kind = value
            tokens.append(_Token(kind, value, line, col))
            col += len(value)
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def _peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self) -> _Token:
        tok = self._peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            line = last.line if last else 1
            col = last.col + len(last.value) if last else 1
            raise RuleParseError(f"{line}:{col}: unexpected end of input", line=line, col=col)
        self.pos += 1
        return tok

    def _expect(self, kind: str, what: str | None = None) -> _Token:
        tok = self._next()
        if tok.kind != kind:
            want = what or kind
            raise RuleParseError(f"{tok.line}:{tok.col}: expected {want}, got {tok.value!r}",
                                 line=tok.line, col=tok.col)
        return tok

    def _accept(self, kind: str) -> _Token | None:
        tok = self._peek()
        if tok is not None and tok.kind == kind:
            self.pos += 1
            return tok
        return None

    def _punct(self, char: str):
        tok = self._next()
        if tok.kind != "punct" or tok.value != char:
            raise RuleParseError(f"{tok.line}:{tok.col}: expected {char!r}, got {tok.value!r}",
                                 line=tok.line, col=tok.col)

    def parse_rules(self) -> list[RuleAst]:
        rules = []
        seen = set()
        while self._peek() is not None:
            rule = self._rule()
            if rule.rule_id in seen:
                raise RuleParseError(f"duplicate rule id {rule.rule_id!r}")
            seen.add(rule.rule_id)
            rules.append(rule)
        if not rules:
            raise RuleParseError("no rules found")
        return rules

    def _rule(self) -> RuleAst:
        self._expect("rule", "'rule'")
        rid = self._expect("name", "rule identifier").value
        self._punct(":")
        self._expect("forall", "'forall'")
        var = self._expect("name", "variable name").value
        self._expect("in", "'in'")
        self._expect("lanelets", "'lanelets'")
        self._punct(".")
        body = self._formula(var)
        return RuleAst(rule_id=rid, var=var, domain="lanelets", body=body)

    def _formula(self, var: str):
        left = self._disj(var)
        if self._accept("implies"):
            return Implies(left, self._formula(var))
        return left

    def _disj(self, var: str):
        node = self._conj(var)
        while self._accept("or"):
            node = Or(node, self._conj(var))
        return node

    def _conj(self, var: str):
        node = self._unary(var)
        while self._accept("and"):
            node = And(node, self._unary(var))
        return node

    def _unary(self, var: str):
        if self._accept("not"):
            return Not(self._unary(var))
        tok = self._peek()
        if tok is not None and tok.kind == "punct" and tok.value == "(":
            self._punct("(")
            node = self._formula(var)
            self._punct(")")
            return node
        return self._atom(var)

    def _var_ref(self, var: str) -> str:
        tok = self._expect("name", "variable name")
        if tok.value != var:
            raise RuleParseError(
                f"{tok.line}:{tok.col}: unknown variable {tok.value!r}, "
                f"only {var!r} is bound", line=tok.line, col=tok.col)
        return tok.value

    def _call(self, var: str) -> tuple[_Token, str]:
        name = self._expect("name", "predicate or function name")
        self._punct("(")
        v = self._var_ref(var)
        self._punct(")")
        return name, v

    def _func_call(self, var: str) -> Func:
        name, v = self._call(var)
        if name.value not in FUNCTIONS:
            raise RuleParseError(
                f"{name.line}:{name.col}: unknown function {name.value!r}",
                line=name.line, col=name.col)
        return Func(name.value, v)

    def _atom(self, var: str):
        tok = self._peek()
        if tok is None:
            raise RuleParseError("unexpected end of input")
        if tok.kind == "num":
            self._next()
            op = self._expect("rel", "comparison operator").value
            return Cmp(Num(float(tok.value)), op, self._func_call(var))
        if tok.kind != "name":
            raise RuleParseError(f"{tok.line}:{tok.col}: expected an atom, got {tok.value!r}",
                                 line=tok.line, col=tok.col)
        name, v = self._call(var)
        rel = self._accept("rel")
        if rel is not None:
            if name.value not in FUNCTIONS:
                raise RuleParseError(
                    f"{name.line}:{name.col}: unknown function {name.value!r}",
                    line=name.line, col=name.col)
            num = self._expect("num", "numeric literal")
            return Cmp(Func(name.value, v), rel.value, Num(float(num.value)))
        if name.value not in PREDICATES:
            raise RuleParseError(
                f"{name.line}:{name.col}: unknown predicate {name.value!r}",
                line=name.line, col=name.col)
        return Pred(name.value, v)


def parse_rules(text: str) -> list[RuleAst]:
    return _Parser(_tokenize(text)).parse_rules()


def load_rules(path) -> list[RuleAst]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_rules(fh.read())


def default_rules_text() -> str:
    return resources.files("lanekit").joinpath("data/default.rules").read_text("utf-8")


# --- canonical printing ------------------------------------------------

def _term_text(term) -> str:
    if isinstance(term, Num):
        return repr(term.value)
    return f"{term.name}({term.var})"


def formula_text(node) -> str:
    """Fully parenthesized canonical form; reparsing yields an equal AST."""
    if isinstance(node, Pred):
        return f"{node.name}({node.var})"
    if isinstance(node, Cmp):
        return f"{_term_text(node.lhs)} {node.op} {_term_text(node.rhs)}"
    if isinstance(node, Not):
        return f"not {formula_text(node.operand)}"
    for cls, word in ((And, "and"), (Or, "or"), (Implies, "implies")):
        if isinstance(node, cls):
            return f"({formula_text(node.lhs)} {word} {formula_text(node.rhs)})"
    raise TypeError(f"not a formula node: {node!r}")


def rule_text(rule: RuleAst) -> str:
    return f"rule {rule.rule_id}: forall {rule.var} in {rule.domain}. {formula_text(rule.body)}"


def rules_text(rules: list[RuleAst]) -> str:
    return "\n".join(rule_text(r) for r in rules) + "\n"


# --- evaluation --------------------------------------------------------

_REL_OPS = {
    "<": operator.lt, "<=": operator.le,
    ">": operator.gt, ">=": operator.ge,
    "==": operator.eq, "!=": operator.ne,
}


@dataclass
class Violation:
    rule_id: str
    element_id: int
    measured: list[tuple[str, float]] | None
    message: str


@dataclass
class RuleResult:
    rule_id: str
    violations: list[Violation] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.violations)


@dataclass
class ViolationReport:
    network_hash: str
    rules: list[RuleResult] = field(default_factory=list)

    @property
    def total_violations(self) -> int:
        return sum(r.count for r in self.rules)


def network_hash(net: LaneletNetwork) -> str:
    return hashlib.sha256(network_bytes(net)).hexdigest()


def _collect_funcs(node, out: list[str]):
    if isinstance(node, Cmp):
        for term in (node.lhs, node.rhs):
            if isinstance(term, Func) and term.name not in out:
                out.append(term.name)
    elif isinstance(node, Not):
        _collect_funcs(node.operand, out)
    elif isinstance(node, (And, Or, Implies)):
        _collect_funcs(node.lhs, out)
        _collect_funcs(node.rhs, out)


def _term_value(term, lanelet: Lanelet, cache: dict) -> float:
    if isinstance(term, Num):
        return term.value
    if term.name not in cache:
        cache[term.name] = FUNCTIONS[term.name](lanelet)
    return cache[term.name]


def _eval_formula(node, lanelet: Lanelet, cache: dict) -> bool:
    if isinstance(node, Pred):
        return bool(PREDICATES[node.name](lanelet))
    if isinstance(node, Cmp):
        return bool(_REL_OPS[node.op](_term_value(node.lhs, lanelet, cache),
                                      _term_value(node.rhs, lanelet, cache)))
    if isinstance(node, Not):
        return not _eval_formula(node.operand, lanelet, cache)
    if isinstance(node, And):
        return _eval_formula(node.lhs, lanelet, cache) and _eval_formula(node.rhs, lanelet, cache)
    if isinstance(node, Or):
        return _eval_formula(node.lhs, lanelet, cache) or _eval_formula(node.rhs, lanelet, cache)
    if isinstance(node, Implies):
        return (not _eval_formula(node.lhs, lanelet, cache)) or _eval_formula(node.rhs, lanelet, cache)
    raise TypeError(f"not a formula node: {node!r}")


def _check_lanelet(rule: RuleAst, lanelet: Lanelet) -> Violation | None:
    cache: dict[str, float] = {}
    try:
        if _eval_formula(rule.body, lanelet, cache):
            return None
    except RuleEvaluationError as exc:
        return Violation(rule.rule_id, lanelet.id, None, f"evaluation failed: {exc}")
    func_names: list[str] = []
    _collect_funcs(rule.body, func_names)
    measured = []
    for name in func_names:
        if name not in cache:
            try:
                cache[name] = FUNCTIONS[name](lanelet)
            except RuleEvaluationError:
                continue
        measured.append((name, cache[name]))
    detail = ", ".join(f"{n}={v:.6g}" for n, v in measured)
    message = f"violated ({detail})" if detail else "violated"
    return Violation(rule.rule_id, lanelet.id, measured or None, message)


def _evaluate_ids(rules: list[RuleAst], net: LaneletNetwork, ids: list[int]) -> list[list[Violation]]:
    per_rule: list[list[Violation]] = [[] for _ in rules]
    for k, rule in enumerate(rules):
        for lid in ids:
            v = _check_lanelet(rule, net.lanelets[lid])
            if v is not None:
                per_rule[k].append(v)
    return per_rule


def evaluate(rules: list[RuleAst], net: LaneletNetwork) -> ViolationReport:
    """Evaluate every rule over every lanelet; deterministic report order
    (rule file order, then ascending lanelet id)."""
    ids = sorted(net.lanelets)
    per_rule = _evaluate_ids(rules, net, ids)
    report = ViolationReport(network_hash=network_hash(net))
    for rule, violations in zip(rules, per_rule):
        report.rules.append(RuleResult(rule.rule_id, violations))
    return report


def evaluate_partitioned(rules: list[RuleAst], net: LaneletNetwork, partitions: int) -> ViolationReport:
    """Evaluate id-range partitions independently and merge.

    The merged report is byte-identical to evaluate() for any partition
    count; partitions beyond the lanelet count come out empty.
    """
    if partitions < 1:
        raise ValueError("partitions must be >= 1")
    ids = sorted(net.lanelets)
    n = len(ids)
    chunks = []
    for i in range(partitions):
        lo = (i * n) // partitions
        hi = ((i + 1) * n) // partitions
        chunks.append(ids[lo:hi])
    if partitions == 1:
        results = [_evaluate_ids(rules, net, chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=partitions) as pool:
            results = list(pool.map(lambda chunk: _evaluate_ids(rules, net, chunk), chunks))
    report = ViolationReport(network_hash=network_hash(net))
    for k, rule in enumerate(rules):
        merged: list[Violation] = []
        for part in results:
            merged.extend(part[k])
        report.rules.append(RuleResult(rule.rule_id, merged))
    return report


# --- report serialization ----------------------------------------------

def _json_num(v: float):
    if math.isfinite(v):
        return v
    if math.isnan(v):
        return "nan"
    return "inf" if v > 0 else "-inf"


def report_to_dict(report: ViolationReport) -> dict:
    return {
        "network_hash": report.network_hash,
        "rules": [
            {
                "rule_id": r.rule_id,
                "violations": [
                    {
                        "element_id": v.element_id,
                        "measured": None if v.measured is None
                        else [[name, _json_num(val)] for name, val in v.measured],
                        "message": v.message,
                    }
                    for v in r.violations
                ],
                "count": r.count,
            }
            for r in report.rules
        ],
        "total_violations": report.total_violations,
    }


def report_bytes(report: ViolationReport) -> bytes:
    return (json.dumps(report_to_dict(report), indent=2, allow_nan=False) + "\n").encode("utf-8")


def report_from_dict(data: dict) -> ViolationReport:
    report = ViolationReport(network_hash=data["network_hash"])
    for r in data["rules"]:
        result = RuleResult(r["rule_id"])
        for v in r["violations"]:
            measured = None
            if v["measured"] is not None:
                measured = [(name, float(val)) for name, val in v["measured"]]
            result.violations.append(Violation(r["rule_id"], v["element_id"],
                                               measured, v["message"]))
        report.rules.append(result)
    return report


def render_text(report: ViolationReport) -> str:
    lines = [f"network {report.network_hash[:12]}"]
    for r in report.rules:
        lines.append(f"rule {r.rule_id}: {r.count} violation(s)")
        for v in r.violations:
            lines.append(f"  {r.rule_id} lanelet {v.element_id}: {v.message}")
    lines.append(f"total violations: {report.total_violations}")
    return "\n".join(lines) + "\n"
