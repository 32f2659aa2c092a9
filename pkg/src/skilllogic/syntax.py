"""Formula syntax: hash-consed AST, parser, printer and syntactic measures.

Formula nodes are interned, so two structurally equal formulas are the same
Python object.  Equality and hashing are therefore identity based and cheap,
which matters for the large shared formulas produced by the rewritings.
"""

from __future__ import annotations

import re
import weakref
from typing import Iterable, Iterator, NamedTuple


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int = 0):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} (line {line}, column {col})")
        self.line, self.column = line, col


_interned: "weakref.WeakValueDictionary[tuple, Formula]" = weakref.WeakValueDictionary()


class Formula:
    __slots__ = ("_args", "__weakref__")
    _fields: tuple[str, ...] = ()

    def __new__(cls, *args):
        args = cls._normalize(*args)
        key = (cls,) + args
        obj = _interned.get(key)
        if obj is None:
            obj = object.__new__(cls)
            obj._args = args
            _interned[key] = obj
        return obj

    @classmethod
    def _normalize(cls, *args):
        if len(args) != len(cls._fields):
            raise TypeError(f"{cls.__name__} takes {len(cls._fields)} arguments")
        return args

    def __reduce__(self):
        return (self.__class__, self._args)

    def __repr__(self):
        return f"{type(self).__name__}({', '.join(map(repr, self._args))})"

    def __str__(self):
        return to_text(self)

    def children(self) -> tuple["Formula", ...]:
        return tuple(a for a in self._args if isinstance(a, Formula))

    def __getattr__(self, name):
        # field access by name, e.g. node.sub / node.agent
        if name.startswith("_"):
            raise AttributeError(name)
        try:
            return self._args[type(self)._fields.index(name)]
        except (ValueError, AttributeError):
            raise AttributeError(name) from None

    def __lt__(self, other):
        return to_text(self) < to_text(other)


def _group(agents) -> tuple[str, ...]:
    if isinstance(agents, str):
        agents = (agents,)
    g = tuple(sorted(set(agents)))
    if not g:
        raise ValueError("groups must be nonempty")
    return g


def _formula(x) -> "Formula":
    if not isinstance(x, Formula):
        raise TypeError(f"expected a Formula, got {x!r}")
    return x


class Atom(Formula):
    __slots__ = ()
    _fields = ("name",)


class Top(Formula):
    __slots__ = ()


class Bot(Formula):
    __slots__ = ()


class _Unary(Formula):
    __slots__ = ()
    _fields = ("sub",)

    @classmethod
    def _normalize(cls, sub):
        return (_formula(sub),)


class Not(_Unary):
    __slots__ = ()


class Univ(_Unary):
    __slots__ = ()


class _Binary(Formula):
    __slots__ = ()
    _fields = ("left", "right")

    @classmethod
    def _normalize(cls, left, right):
        return (_formula(left), _formula(right))


class Implies(_Binary):
    __slots__ = ()


class And(_Binary):
    __slots__ = ()


class Or(_Binary):
    __slots__ = ()


class Iff(_Binary):
    __slots__ = ()


class _AgentOp(Formula):
    __slots__ = ()
    _fields = ("agent", "sub")

    @classmethod
    def _normalize(cls, agent, sub):
        return (str(agent), _formula(sub))


class K(_AgentOp):
    __slots__ = ()


class BoxPlus(_AgentOp):
    __slots__ = ()


class BoxMinus(_AgentOp):
    __slots__ = ()


class BoxAny(_AgentOp):
    __slots__ = ()


class _GroupOp(Formula):
    __slots__ = ()
    _fields = ("group", "sub")

    @classmethod
    def _normalize(cls, group, sub):
        return (_group(group), _formula(sub))


class C(_GroupOp):
    __slots__ = ()


class D(_GroupOp):
    __slots__ = ()


class E(_GroupOp):
    __slots__ = ()


class F(_GroupOp):
    __slots__ = ()


class _Update(Formula):
    __slots__ = ()
    _fields = ("agent", "skills", "sub")

    @classmethod
    def _normalize(cls, agent, skills, sub):
        if isinstance(skills, str):
            skills = (skills,)
        return (str(agent), tuple(sorted(set(skills))), _formula(sub))


class Up(_Update):
    __slots__ = ()


class Down(_Update):
    __slots__ = ()


class SetTo(_Update):
    __slots__ = ()


class Learn(Formula):
    """``learn[a;b] phi``: agent a adopts the capability of b, then phi."""

    __slots__ = ()
    _fields = ("learner", "source", "sub")

    @classmethod
    def _normalize(cls, learner, source, sub):
        return (str(learner), str(source), _formula(sub))


TOP = Top()
BOT = Bot()

GROUP_OPS = {"C": C, "D": D, "E": E, "F": F}
UPDATE_OPS = {"up": Up, "down": Down, "set": SetTo}
QUANTIFIERS = {"bp": BoxPlus, "bm": BoxMinus, "ba": BoxAny}
_DIAMONDS = {"dp": BoxPlus, "dm": BoxMinus, "da": BoxAny}
_BINARY = {"->": Implies, "&": And, "|": Or, "<->": Iff}
_BINARY_SYM = {v: k for k, v in _BINARY.items()}
_UPDATE_KW = {v: k for k, v in UPDATE_OPS.items()}
_QUANT_KW = {v: k for k, v in QUANTIFIERS.items()}

KEYWORDS = frozenset({"true", "false", "K", "hatK", "A", "learn"} | set(GROUP_OPS)
                     | set(UPDATE_OPS) | set(QUANTIFIERS) | set(_DIAMONDS))


# ---------------------------------------------------------------- builders

def neg(phi: Formula) -> Formula:
    return Not(phi)


def hat_k(agent: str, phi: Formula) -> Formula:
    return Not(K(agent, Not(phi)))


def diamond(kind: type, agent: str, phi: Formula) -> Formula:
    """Dual of a quantifier class: ``diamond(BoxPlus, a, phi)`` is ``~bp[a]~phi``."""
    return Not(kind(agent, Not(phi)))


def big_and(items: Iterable[Formula]) -> Formula:
    """Balanced conjunction; ``true`` for an empty collection.

    The tree is balanced so that very long conjunctions stay shallow.
    """
    items = list(items)
    if not items:
        return TOP

    def build(lo, hi):
        if hi - lo == 1:
            return items[lo]
        mid = (lo + hi) // 2
        return And(build(lo, mid), build(mid, hi))

    return build(0, len(items))


def big_or(items: Iterable[Formula]) -> Formula:
    items = list(items)
    if not items:
        return BOT

    def build(lo, hi):
        if hi - lo == 1:
            return items[lo]
        mid = (lo + hi) // 2
        return Or(build(lo, mid), build(mid, hi))

    return build(0, len(items))


def k_tower(agent: str, n: int, phi: Formula) -> Formula:
    for _ in range(n):
        phi = K(agent, phi)
    return phi


# ---------------------------------------------------------------- printing

def to_text(phi: Formula) -> str:
    out: list[str] = []
    _emit(phi, out)
    return "".join(out)


def _emit(phi: Formula, out: list[str]) -> None:
    t = type(phi)
    if t is Atom:
        out.append(phi.name)
    elif t is Top:
        out.append("true")
    elif t is Bot:
        out.append("false")
    elif t is Not:
        out.append("~")
        _emit(phi.sub, out)
    elif t in _BINARY_SYM:
        out.append("(")
        _emit(phi.left, out)
        out.append(f" {_BINARY_SYM[t]} ")
        _emit(phi.right, out)
        out.append(")")
    elif t is K:
        out.append(f"K[{phi.agent}] ")
        _emit(phi.sub, out)
    elif isinstance(phi, _GroupOp):
        out.append(f"{t.__name__}[{','.join(phi.group)}] ")
        _emit(phi.sub, out)
    elif isinstance(phi, _Update):
        out.append(f"{_UPDATE_KW[t]}[{phi.agent};{{{','.join(phi.skills)}}}] ")
        _emit(phi.sub, out)
    elif t is Learn:
        out.append(f"learn[{phi.learner};{phi.source}] ")
        _emit(phi.sub, out)
    elif t in _QUANT_KW:
        out.append(f"{_QUANT_KW[t]}[{phi.agent}] ")
        _emit(phi.sub, out)
    elif t is Univ:
        out.append("A ")
        _emit(phi.sub, out)
    elif hasattr(phi, "emit"):
        phi.emit(out, _emit)
    else:
        raise TypeError(f"cannot print {phi!r}")


# ---------------------------------------------------------------- parsing

class _Tok(NamedTuple):
    kind: str
    value: str
    pos: int


_TOKEN_RE = re.compile(r"\s*(?:(<->|->|[()\[\]{},;~&|])|([A-Za-z0-9_]+))")


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        if m.group(1):
            toks.append(_Tok("sym", m.group(1), m.start(1)))
        else:
            toks.append(_Tok("id", m.group(2), m.start(2)))
        pos = m.end()
    toks.append(_Tok("eof", "", n))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def error(self, msg, tok=None):
        tok = tok or self.toks[self.i]
        raise FormulaSyntaxError(msg, self.text, tok.pos)

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, sym: str) -> None:
        tok = self.take()
        if tok.kind != "sym" or tok.value != sym:
            self.error(f"expected {sym!r}, found {tok.value or 'end of input'!r}", tok)

    def name(self, what: str) -> str:
        tok = self.take()
        if tok.kind != "id" or tok.value in KEYWORDS:
            self.error(f"expected {what} name, found {tok.value or 'end of input'!r}", tok)
        return tok.value

    def names(self, what: str, close: str) -> list[str]:
        if self.peek().kind == "sym" and self.peek().value == close:
            return []
        out = [self.name(what)]
        while self.peek().kind == "sym" and self.peek().value == ",":
            self.take()
            out.append(self.name(what))
        return out

    def formula(self) -> Formula:
        tok = self.take()
        if tok.kind == "sym":
            if tok.value == "~":
                return Not(self.formula())
            if tok.value == "(":
                left = self.formula()
                op = self.take()
                if op.kind != "sym" or op.value not in _BINARY:
                    self.error("expected a binary connective", op)
                right = self.formula()
                self.expect(")")
                return _BINARY[op.value](left, right)
            self.error(f"unexpected {tok.value!r}", tok)
        if tok.kind == "eof":
            self.error("unexpected end of input", tok)
        word = tok.value
        if word == "true":
            return TOP
        if word == "false":
            return BOT
        if word == "A":
            return Univ(self.formula())
        if word in ("K", "hatK"):
            self.expect("[")
            agent = self.name("agent")
            self.expect("]")
            sub = self.formula()
            return K(agent, sub) if word == "K" else hat_k(agent, sub)
        if word in GROUP_OPS:
            self.expect("[")
            start = self.peek()
            agents = self.names("agent", "]")
            if not agents:
                self.error("empty group", start)
            self.expect("]")
            return GROUP_OPS[word](agents, self.formula())
        if word in UPDATE_OPS:
            self.expect("[")
            agent = self.name("agent")
            self.expect(";")
            self.expect("{")
            skills = self.names("skill", "}")
            self.expect("}")
            self.expect("]")
            return UPDATE_OPS[word](agent, skills, self.formula())
        if word == "learn":
            self.expect("[")
            learner = self.name("agent")
            self.expect(";")
            source = self.name("agent")
            self.expect("]")
            return Learn(learner, source, self.formula())
        if word in QUANTIFIERS or word in _DIAMONDS:
            self.expect("[")
            agent = self.name("agent")
            self.expect("]")
            sub = self.formula()
            if word in QUANTIFIERS:
                return QUANTIFIERS[word](agent, sub)
            return diamond(_DIAMONDS[word], agent, sub)
        return Atom(word)


def parse(text: str) -> Formula:
    """Parse one formula.

    A single binary connective may be left unparenthesised at the outermost
    level (``K[b] p & K[c] p``); anywhere else parentheses are required.
    """
    p = _Parser(text)
    phi = p.formula()
    nxt = p.peek()
    if nxt.kind == "sym" and nxt.value in _BINARY:
        p.take()
        phi = _BINARY[nxt.value](phi, p.formula())
        if p.peek().kind == "sym" and p.peek().value in _BINARY:
            p.error("parenthesise chained binary connectives")
    if p.peek().kind != "eof":
        p.error(f"trailing input {p.peek().value!r}")
    return phi


# ---------------------------------------------------------------- measures

def iter_subformulas(phi: Formula) -> Iterator[Formula]:
    """Each distinct subformula once, parents before children."""
    seen = {phi}
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        for ch in node.children():
            if ch not in seen:
                seen.add(ch)
                stack.append(ch)


def subformulas(phi: Formula) -> set[Formula]:
    return set(iter_subformulas(phi))


def length(phi: Formula) -> int:
    """Symbol count; the derived connectives are counted in primitive form.

    ``(a & b)`` is ``~(a -> ~b)``, ``(a | b)`` is ``(~a -> b)`` and
    ``(a <-> b)`` is the conjunction of both implications.
    """
    memo: dict[Formula, int] = {}
    # post-order without recursion; formulas may be deep DAGs
    stack = [(phi, False)]
    while stack:
        node, done = stack.pop()
        if node in memo:
            continue
        if not done:
            stack.append((node, True))
            stack.extend((ch, False) for ch in node.children() if ch not in memo)
            continue
        memo[node] = _local_length(node, memo)
    return memo[phi]


def _local_length(node: Formula, memo) -> int:
    t = type(node)
    if t in (Atom, Top, Bot):
        return 1
    if t is Not:
        return memo[node.sub] + 1
    if t is Univ:
        return memo[node.sub] + 1
    if t in (Implies, And, Or, Iff):
        a, b = memo[node.left], memo[node.right]
        return {Implies: a + b + 3, And: a + b + 5, Or: a + b + 4,
                Iff: 2 * a + 2 * b + 11}[t]
    if t is K or t in _QUANT_KW:
        return memo[node.sub] + 2
    if isinstance(node, _GroupOp):
        return memo[node.sub] + 2 * len(node.group) + 2
    if isinstance(node, _Update):
        # ( op { s1 , ... , sk } ) a
        return memo[node.sub] + len(node.skills) + max(len(node.skills) - 1, 0) + 6
    if t is Learn:
        return memo[node.sub] + 5
    if hasattr(node, "local_length"):
        return node.local_length(memo)
    raise TypeError(f"no length for {node!r}")


def closure(phi: Formula) -> set[Formula]:
    out = {TOP, BOT}
    for sub in iter_subformulas(phi):
        out.add(sub)
        out.add(Not(sub))
    return out


def modal_depth(phi: Formula) -> int:
    memo: dict[Formula, int] = {}
    stack = [(phi, False)]
    while stack:
        node, done = stack.pop()
        if node in memo:
            continue
        if not done:
            stack.append((node, True))
            stack.extend((ch, False) for ch in node.children() if ch not in memo)
            continue
        inner = max((memo[ch] for ch in node.children()), default=0)
        boolean = isinstance(node, (Atom, Top, Bot, Not, _Binary))
        memo[node] = inner if boolean else inner + 1
    return memo[phi]


class Vocabulary(NamedTuple):
    agents: frozenset
    groups: frozenset
    skills: frozenset
    props: frozenset


def agents_of(node: Formula) -> tuple[str, ...]:
    """Agents named directly by the top operator of ``node``."""
    if isinstance(node, (_AgentOp, _Update)):
        return (node.agent,)
    if isinstance(node, _GroupOp):
        return node.group
    if isinstance(node, Learn):
        return (node.learner, node.source)
    return tuple(getattr(node, "named_agents", ()))


def vocabulary(phi: Formula) -> Vocabulary:
    agents, groups, skills, props = set(), set(), set(), set()
    for node in iter_subformulas(phi):
        agents.update(agents_of(node))
        if isinstance(node, _GroupOp):
            groups.add(node.group)
        elif isinstance(node, _Update):
            skills.update(node.skills)
        elif isinstance(node, Atom):
            props.add(node.name)
    groups.update((a,) for a in agents)
    return Vocabulary(frozenset(agents), frozenset(groups), frozenset(skills), frozenset(props))


def operators(phi: Formula) -> set[type]:
    return {type(node) for node in iter_subformulas(phi)}


def build_de_re_de_dicto(kind: str, a: str, fresh: str | None, phi: Formula) -> Formula:
    """Knowability schemata: ``de-dicto``, ``implicit-de-re`` or ``explicit-de-re``."""
    if kind == "de-dicto":
        return K(a, diamond(BoxPlus, a, phi))
    if kind == "implicit-de-re":
        return diamond(BoxPlus, a, K(a, phi))
    if kind == "explicit-de-re":
        if not fresh or fresh in vocabulary(phi).agents or fresh == a:
            raise ValueError(f"agent {fresh!r} is not fresh for the formula")
        c = fresh
        return Learn(c, a, diamond(BoxPlus, c, K(a, Learn(a, c, phi))))
    raise ValueError(f"unknown kind {kind!r}")
