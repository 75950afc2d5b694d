"""Concrete syntax for transaction programs: parser, printer, validator.

Grammar (whitespace-insensitive, `%` line comments):

    program   := item* ;
    item      := fact | data_rule | tr_rule | query ;
    fact      := atom "." ;
    data_rule := atom ":-" atom ("," atom)* "." ;
    tr_rule   := atom "<-" goal "." ;
    goal      := step ("*" step)* ;
    step      := "ins(" atom ")" | "del(" atom ")" | comparison | atom ;
    query     := "?-" goal "." ;
    atom      := ident ["(" term ("," term)* ")"] ;
    term      := VAR | ident ["(" term ("," term)* ")"] | INT | term arithop term ;

`*` spells serial conjunction, `ins(a)`/`del(a)` spell elementary updates.
Arithmetic is limited to `+`/`-` on integers; comparisons are
`>=ˌ >, =<, <, =:=`. Inside data rules `,` is classical conjunction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import ParseError
from .terms import Atom, Compound, Const, Term, Var, is_ground, predicate_of, variables_of

COMPARISON_OPS = (">=", "=<", "=:=", ">", "<")
BUILTIN_PREDICATES = {("empty", 1)}  # empty(rel) tests that relation rel has no tuples


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Call:
    atom: Atom

    def __repr__(self):
        return atom_to_str(self.atom)


@dataclass(frozen=True, slots=True)
class Ins:
    atom: Atom

    def __repr__(self):
        return f"ins({atom_to_str(self.atom)})"


@dataclass(frozen=True, slots=True)
class Del:
    atom: Atom

    def __repr__(self):
        return f"del({atom_to_str(self.atom)})"


@dataclass(frozen=True, slots=True)
class Test:
    """A comparison step, e.g. Bal >= Amt, evaluated on ground integers."""

    comparison: Compound

    def __repr__(self):
        return atom_to_str(self.comparison)


Step = Union[Call, Ins, Del, Test]


@dataclass(frozen=True, slots=True)
class SerialGoal:
    steps: tuple

    def __repr__(self):
        return goal_to_str(self)


TRUE_GOAL = SerialGoal(())


@dataclass(frozen=True)
class DataRule:
    head: Atom
    body: tuple
    pos: Optional[tuple] = field(default=None, compare=False)

    def __repr__(self):
        return rule_to_str(self)


@dataclass(frozen=True)
class TRRule:
    head: Atom
    body: SerialGoal
    pos: Optional[tuple] = field(default=None, compare=False)

    def __repr__(self):
        return rule_to_str(self)


@dataclass(frozen=True)
class Program:
    base_facts: tuple = ()
    data_rules: tuple = ()
    tr_rules: tuple = ()
    queries: tuple = ()

    def __repr__(self):
        return f"Program({len(self.base_facts)} facts, {len(self.data_rules)} data rules, " \
               f"{len(self.tr_rules)} tr rules, {len(self.queries)} queries)"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    pos: Optional[tuple] = field(default=None, compare=False)

    def __str__(self):
        loc = f" at {self.pos[0]}:{self.pos[1]}" if self.pos else ""
        return f"{self.code}: {self.message}{loc}"


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_PUNCT = (":-", "<-", "?-", ">=", "=<", "=:=", "(", ")", ",", ".", "*", "+", "-", ">", "<")


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"{self.kind}:{self.text}"


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("INT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "VAR" if (c == "_" or c.isupper()) else "IDENT"
            tokens.append(_Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(_Token(p, p, line, col))
                i += len(p)
                col += len(p)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(_Token("EOF", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, offset=0) -> _Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r} but found {tok.text or 'end of input'!r}",
                             tok.line, tok.col)
        return tok

    def fail(self, message: str):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col)

    # program := item*
    def program(self) -> Program:
        facts, data_rules, tr_rules, queries = [], [], [], []
        seen_facts = set()
        while self.peek().kind != "EOF":
            tok = self.peek()
            if tok.kind == "?-":
                self.next()
                goal = self.goal()
                self.expect(".")
                queries.append(goal)
                continue
            pos = (tok.line, tok.col)
            head = self.atom()
            sep = self.next()
            if sep.kind == ".":
                if head not in seen_facts:  # duplicate clauses collapse, set semantics
                    seen_facts.add(head)
                    facts.append(head)
            elif sep.kind == ":-":
                body = [self.atom()]
                while self.peek().kind == ",":
                    self.next()
                    body.append(self.atom())
                self.expect(".")
                data_rules.append(DataRule(head, tuple(body), pos))
            elif sep.kind == "<-":
                goal = self.goal()
                self.expect(".")
                tr_rules.append(TRRule(head, goal, pos))
            else:
                raise ParseError(f"expected '.', ':-' or '<-' after atom, found {sep.text!r}",
                                 sep.line, sep.col)
        return Program(tuple(facts), tuple(data_rules), tuple(tr_rules), tuple(queries))

    # goal := step ("*" step)*
    def goal(self) -> SerialGoal:
        steps = [self.step()]
        while self.peek().kind == "*":
            self.next()
            steps.append(self.step())
        return SerialGoal(tuple(steps))

    def step(self) -> Step:
        tok = self.peek()
        if tok.kind == "IDENT" and tok.text in ("ins", "del") and self.peek(1).kind == "(":
            op = self.next().text
            self.expect("(")
            atom = self.atom()
            self.expect(")")
            return Ins(atom) if op == "ins" else Del(atom)
        left = self.term()
        nxt = self.peek()
        if nxt.kind in COMPARISON_OPS:
            op = self.next().kind
            right = self.term()
            return Test(Compound(op, (left, right)))
        if isinstance(left, (Const, Compound)) and isinstance(predicate_name(left), str):
            return Call(left)
        self.fail("a goal step must be an atom, update or comparison")

    def atom(self) -> Atom:
        tok = self.expect("IDENT")
        if self.peek().kind == "(":
            self.next()
            args = [self.term()]
            while self.peek().kind == ",":
                self.next()
                args.append(self.term())
            self.expect(")")
            return Compound(tok.text, tuple(args))
        return Const(tok.text)

    # term := primary (("+"|"-") primary)*   (left-associative)
    def term(self) -> Term:
        t = self.primary()
        while self.peek().kind in ("+", "-"):
            op = self.next().kind
            rhs = self.primary()
            t = Compound(op, (t, rhs))
        return t

    def primary(self) -> Term:
        tok = self.peek()
        if tok.kind == "VAR":
            self.next()
            return Var(tok.text)
        if tok.kind == "INT":
            self.next()
            return Const(int(tok.text))
        if tok.kind == "IDENT":
            return self.atom()
        if tok.kind == "(":  # tolerated beyond the grammar, for nested arithmetic
            self.next()
            t = self.term()
            self.expect(")")
            return t
        self.fail(f"expected a term, found {tok.text or 'end of input'!r}")


def predicate_name(atom: Atom) -> Optional[str]:
    if isinstance(atom, Const) and isinstance(atom.value, str):
        return atom.value
    if isinstance(atom, Compound):
        return atom.functor
    return None


def parse_program(text: str) -> Program:
    return _Parser(text).program()


def parse_goal(text: str) -> SerialGoal:
    text = text.strip()
    if text.startswith("?-"):
        text = text[2:]
    if text.endswith("."):
        text = text[:-1]
    if not text.strip():
        return TRUE_GOAL
    p = _Parser(text)
    goal = p.goal()
    if p.peek().kind != "EOF":
        p.fail("trailing input after goal")
    return goal


# ---------------------------------------------------------------------------
# Printer (round-trip stable: parse . print . parse is a fixpoint)
# ---------------------------------------------------------------------------

def term_to_str(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return str(t.value)
    if t.functor in ("+", "-") and len(t.args) == 2:
        lhs, rhs = t.args
        rhs_s = term_to_str(rhs)
        if isinstance(rhs, Compound) and rhs.functor in ("+", "-") and len(rhs.args) == 2:
            rhs_s = f"({rhs_s})"
        return f"{term_to_str(lhs)} {t.functor} {rhs_s}"
    return f"{t.functor}({', '.join(term_to_str(a) for a in t.args)})"


def atom_to_str(a: Atom) -> str:
    if isinstance(a, Compound) and a.functor in COMPARISON_OPS and len(a.args) == 2:
        return f"{term_to_str(a.args[0])} {a.functor} {term_to_str(a.args[1])}"
    return term_to_str(a)


def step_to_str(s: Step) -> str:
    if isinstance(s, Call):
        return atom_to_str(s.atom)
    if isinstance(s, Ins):
        return f"ins({atom_to_str(s.atom)})"
    if isinstance(s, Del):
        return f"del({atom_to_str(s.atom)})"
    return atom_to_str(s.comparison)


def goal_to_str(g: SerialGoal) -> str:
    return " * ".join(step_to_str(s) for s in g.steps)


def rule_to_str(r) -> str:
    if isinstance(r, DataRule):
        return f"{atom_to_str(r.head)} :- {', '.join(atom_to_str(a) for a in r.body)}."
    return f"{atom_to_str(r.head)} <- {goal_to_str(r.body)}."


def print_program(p: Program) -> str:
    lines = [f"{atom_to_str(f)}." for f in p.base_facts]
    lines += [rule_to_str(r) for r in p.data_rules]
    lines += [rule_to_str(r) for r in p.tr_rules]
    lines += [f"?- {goal_to_str(q)}." for q in p.queries]
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Static validation
# ---------------------------------------------------------------------------

ROLE_BASE = "base"
ROLE_DERIVED = "derived"
ROLE_TRANSACTIONAL = "transactional"
ROLE_BUILTIN = "builtin"


def predicate_roles(p: Program, extra_goals: tuple = ()) -> dict[tuple[str, int], str]:
    """Map each predicate to its role.

    Derived predicates head data rules, transactional ones head TR rules,
    everything else seen in facts, bodies, updates or queries counts as base.
    Comparison steps and the empty/1 check are builtin.
    """
    roles: dict[tuple[str, int], str] = {p_: ROLE_BUILTIN for p_ in BUILTIN_PREDICATES}

    def claim(pred, role):
        if pred in BUILTIN_PREDICATES:
            return
        if roles.get(pred, role) == role or pred not in roles:
            roles[pred] = role
        # conflicting claims are reported by validate(); first claim wins here

    for r in p.data_rules:
        claim(predicate_of(r.head), ROLE_DERIVED)
    for r in p.tr_rules:
        claim(predicate_of(r.head), ROLE_TRANSACTIONAL)
    for f in p.base_facts:
        claim(predicate_of(f), ROLE_BASE)

    def scan_goal(g: SerialGoal):
        for s in g.steps:
            if isinstance(s, (Ins, Del)):
                claim(predicate_of(s.atom), ROLE_BASE)
            elif isinstance(s, Call):
                roles.setdefault(predicate_of(s.atom), ROLE_BASE)

    for r in p.tr_rules:
        scan_goal(r.body)
    for q in p.queries:
        scan_goal(q)
    for g in extra_goals:
        scan_goal(g)
    for r in p.data_rules:
        for a in r.body:
            roles.setdefault(predicate_of(a), ROLE_BASE)
    return roles


def validate(p: Program) -> list[Diagnostic]:
    """Static checks; an empty result means the program is loadable."""
    diags: list[Diagnostic] = []
    claimed: dict[tuple[str, int], str] = {}

    def claim(pred, role, pos=None):
        if pred in BUILTIN_PREDICATES:
            diags.append(Diagnostic("RESERVED_PREDICATE",
                                    f"{pred[0]}/{pred[1]} is a built-in and cannot be defined",
                                    pos))
            return
        prev = claimed.setdefault(pred, role)
        if prev != role:
            diags.append(Diagnostic("ROLE_CONFLICT",
                                    f"{pred[0]}/{pred[1]} is used as both {prev} and {role}",
                                    pos))

    for f in p.base_facts:
        if not is_ground(f):
            diags.append(Diagnostic("NONGROUND_FACT", f"fact {atom_to_str(f)} is not ground"))
        claim(predicate_of(f), ROLE_BASE)
    for r in p.data_rules:
        claim(predicate_of(r.head), ROLE_DERIVED, r.pos)
    for r in p.tr_rules:
        claim(predicate_of(r.head), ROLE_TRANSACTIONAL, r.pos)

    for r in p.data_rules:
        head_vars = set(variables_of(r.head))
        body_vars = set()
        for a in r.body:
            body_vars.update(variables_of(a))
        if not head_vars <= body_vars:
            missing = ", ".join(v.name for v in variables_of(r.head) if v not in body_vars)
            diags.append(Diagnostic("NOT_RANGE_RESTRICTED",
                                    f"head variable(s) {missing} do not occur in the body "
                                    f"of {atom_to_str(r.head)}", r.pos))
        for a in r.body:
            pred = predicate_of(a)
            if claimed.get(pred) == ROLE_TRANSACTIONAL:
                diags.append(Diagnostic("DATA_RULE_CALLS_TRANSACTIONAL",
                                        f"data rule for {atom_to_str(r.head)} calls "
                                        f"transactional predicate {pred[0]}/{pred[1]}", r.pos))

    def check_updates(goal: SerialGoal, pos=None):
        for s in goal.steps:
            if isinstance(s, (Ins, Del)):
                pred = predicate_of(s.atom)
                role = claimed.get(pred, ROLE_BASE)
                if pred in BUILTIN_PREDICATES or role == ROLE_DERIVED:
                    diags.append(Diagnostic("UPDATE_ON_DERIVED",
                                            f"elementary update targets non-base predicate "
                                            f"{pred[0]}/{pred[1]}", pos))
                elif role == ROLE_TRANSACTIONAL:
                    diags.append(Diagnostic("UPDATE_ON_TRANSACTIONAL",
                                            f"elementary update targets transactional predicate "
                                            f"{pred[0]}/{pred[1]}", pos))

    for r in p.tr_rules:
        check_updates(r.body, r.pos)
    for q in p.queries:
        check_updates(q)
    return diags
