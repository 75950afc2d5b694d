"""First-order terms, substitutions, unification and variant canonicalization.

Terms are immutable values. Atoms are just terms whose head position names a
predicate: a zero-ary atom is a symbolic ``Const``, an n-ary atom is a
``Compound``. Integers are a distinct constant kind so arithmetic built-ins
can tell them from symbols.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Union


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be non-empty")

    def __repr__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Const:
    value: Union[str, int]

    def __post_init__(self):
        if isinstance(self.value, str) and not self.value:
            raise ValueError("constant symbol must be non-empty")

    def __repr__(self):
        return str(self.value)


@dataclass(frozen=True, slots=True)
class Compound:
    functor: str
    args: tuple

    def __post_init__(self):
        if not self.functor:
            raise ValueError("functor must be non-empty")
        if len(self.args) < 1:
            raise ValueError("compound arity must be >= 1")

    def __repr__(self):
        return f"{self.functor}({', '.join(map(repr, self.args))})"


Term = Union[Var, Const, Compound]
Atom = Term  # an atom is a term used in predicate position


def mk(functor: str, *args: Term) -> Atom:
    """Build an atom: Const for arity 0, Compound otherwise."""
    return Compound(functor, tuple(args)) if args else Const(functor)


def predicate_of(atom: Atom) -> tuple[str, int]:
    """(name, arity) of the predicate an atom names."""
    if isinstance(atom, Const) and isinstance(atom.value, str):
        return (atom.value, 0)
    if isinstance(atom, Compound):
        return (atom.functor, len(atom.args))
    raise TypeError(f"not an atom: {atom!r}")


def variables_of(term: Term) -> list[Var]:
    """Variables in first-occurrence order."""
    out: list[Var] = []
    seen = set()
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            if t not in seen:
                seen.add(t)
                out.append(t)
        elif isinstance(t, Compound):
            stack.extend(reversed(t.args))
    return out


def is_ground(term: Term) -> bool:
    if isinstance(term, Var):
        return False
    if isinstance(term, Compound):
        return all(is_ground(a) for a in term.args)
    return True


def occurs_in(v: Var, term: Term) -> bool:
    if isinstance(term, Var):
        return term == v
    if isinstance(term, Compound):
        return any(occurs_in(v, a) for a in term.args)
    return False


def term_key(term: Term):
    """Total order key, used wherever deterministic enumeration matters."""
    if isinstance(term, Const):
        if isinstance(term.value, int):
            return (0, "", term.value)
        return (1, term.value, 0)
    if isinstance(term, Var):
        return (2, term.name, 0)
    return (3, term.functor, len(term.args), tuple(term_key(a) for a in term.args))


class Substitution:
    """An idempotent finite map from variables to terms.

    Bindings are resolved at construction time so that applying the
    substitution twice equals applying it once; self-bindings are dropped.
    """

    __slots__ = ("_map",)

    def __init__(self, bindings: Optional[Mapping[Var, Term]] = None):
        resolved: dict[Var, Term] = {}
        raw = dict(bindings) if bindings else {}
        for v in raw:
            t = _resolve(raw, raw[v], {v})
            if t != v:
                resolved[v] = t
        object.__setattr__(self, "_map", resolved)

    def apply(self, term: Term) -> Term:
        m = self._map
        if not m:
            return term
        return _apply(m, term)

    def compose(self, other: "Substitution") -> "Substitution":
        """Substitution equivalent to applying self first, then other."""
        m = {v: other.apply(t) for v, t in self._map.items()}
        for v, t in other._map.items():
            if v not in self._map:
                m[v] = t
        return Substitution(m)

    def restrict(self, vars: "list[Var]") -> "Substitution":
        return Substitution({v: self._map[v] for v in vars if v in self._map})

    def get(self, v: Var, default: Optional[Term] = None) -> Optional[Term]:
        return self._map.get(v, default)

    def items(self) -> Iterator[tuple[Var, Term]]:
        return iter(self._map.items())

    def __len__(self):
        return len(self._map)

    def __contains__(self, v: Var):
        return v in self._map

    def __eq__(self, other):
        return isinstance(other, Substitution) and self._map == other._map

    def __hash__(self):
        return hash(frozenset(self._map.items()))

    def __repr__(self):
        inner = ", ".join(f"{v!r}/{t!r}" for v, t in self._map.items())
        return "{" + inner + "}"


EMPTY_SUBST = Substitution()


def _apply(m: dict, term: Term) -> Term:
    if isinstance(term, Var):
        return m.get(term, term)
    if isinstance(term, Compound):
        args = tuple(_apply(m, a) for a in term.args)
        return term if args == term.args else Compound(term.functor, args)
    return term


def _resolve(m: dict, term: Term, seen: set) -> Term:
    # Chase variable chains; a revisited variable marks a cycle, which we
    # leave in place (only reachable with the occurs-check disabled).
    if isinstance(term, Var):
        if term in seen or term not in m:
            return term
        return _resolve(m, m[term], seen | {term})
    if isinstance(term, Compound):
        return Compound(term.functor, tuple(_resolve(m, a, seen) for a in term.args))
    return term


def unify(t1: Term, t2: Term, occurs_check: bool = True) -> Optional[Substitution]:
    """Most general unifier of two terms, or None if they do not unify."""
    env: dict[Var, Term] = {}
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a = _walk(env, a)
        b = _walk(env, b)
        if a == b:
            continue
        if isinstance(a, Var):
            if occurs_check and occurs_in(a, _deep_walk(env, b)):
                return None
            env[a] = b
        elif isinstance(b, Var):
            if occurs_check and occurs_in(b, _deep_walk(env, a)):
                return None
            env[b] = a
        elif isinstance(a, Compound) and isinstance(b, Compound):
            if a.functor != b.functor or len(a.args) != len(b.args):
                return None
            stack.extend(zip(a.args, b.args))
        else:
            return None
    return Substitution(env)


def _walk(env: dict, term: Term) -> Term:
    while isinstance(term, Var) and term in env:
        term = env[term]
    return term


def _deep_walk(env: dict, term: Term) -> Term:
    term = _walk(env, term)
    if isinstance(term, Compound):
        return Compound(term.functor, tuple(_deep_walk(env, a) for a in term.args))
    return term


def canonical_variant(atom: Atom) -> tuple[Atom, dict[Var, Var]]:
    """Rename variables to V0, V1, ... in first-occurrence order.

    Two atoms are variants (equal up to consistent renaming) iff their
    canonical forms are structurally identical.
    """
    mapping: dict[Var, Var] = {}

    def rename(t: Term) -> Term:
        if isinstance(t, Var):
            if t not in mapping:
                mapping[t] = Var(f"V{len(mapping)}")
            return mapping[t]
        if isinstance(t, Compound):
            return Compound(t.functor, tuple(rename(a) for a in t.args))
        return t

    return rename(atom), mapping


def rename_with(term: Term, mapping: Mapping[Var, Var]) -> Term:
    if isinstance(term, Var):
        return mapping.get(term, term)
    if isinstance(term, Compound):
        return Compound(term.functor, tuple(rename_with(term_arg, mapping) for term_arg in term.args))
    return term


def canonicalize_free(terms: tuple) -> tuple:
    """Rename free variables across a term tuple to _F0, _F1, ... so that
    alpha-equivalent answers compare equal."""
    mapping: dict[Var, Var] = {}

    def rename(t: Term) -> Term:
        if isinstance(t, Var):
            if t not in mapping:
                mapping[t] = Var(f"_F{len(mapping)}")
            return mapping[t]
        if isinstance(t, Compound):
            return Compound(t.functor, tuple(rename(a) for a in t.args))
        return t

    return tuple(rename(t) for t in terms)


ARITH_OPS = {"+", "-"}


def fold_arith(term: Term) -> Term:
    """Evaluate ground arithmetic subterms (+,- on integers) to constants.

    Applied when a goal step is about to execute, so e.g. balance updates
    written as Bal - Amt become plain integers.
    """
    if isinstance(term, Compound):
        args = tuple(fold_arith(a) for a in term.args)
        if (
            term.functor in ARITH_OPS
            and len(args) == 2
            and all(isinstance(a, Const) and isinstance(a.value, int) for a in args)
        ):
            x, y = args[0].value, args[1].value
            return Const(x + y if term.functor == "+" else x - y)
        return term if args == term.args else Compound(term.functor, args)
    return term
