"""Satisfiability-preserving rewritings between the logics, and the finite
witness models that show the rewritten formula is satisfied whenever the
original one is.

Fresh symbols all start with ``f_``; inputs that already use that prefix
are rejected.  Operator tokens are mapped to fresh agents injectively:
underscores inside names are escaped as ``_1`` and group members are
separated by ``_0``.
"""

from __future__ import annotations

from itertools import product
from typing import Callable, Iterable

from . import skills as sk
from .checker import Checker
from .kripke import (Atomic, Box, KripkeModel, Seq, Star, Universe, is_equivalence, kripke_check,
                     reflexive_transitive_closure, union_of)
from .model import WeightedModel
from .syntax import (And, Atom, Bot, C, D, E, F, Formula, Iff, Implies, K, Not, Or, Top,
                     Univ, big_and, closure, iter_subformulas, k_tower, length, operators,
                     vocabulary)

RESERVED = "f_"
FRESH_C = "f_c"
FRESH_P = "f_p"

BOOLEAN = frozenset({Atom, Top, Bot, Not, Implies, And, Or, Iff})
LANGUAGES = {
    "L": BOOLEAN | {K},
    "LD": BOOLEAN | {K, D},
    "LDEF": BOOLEAN | {K, D, E, F},
    "LCDEFU": BOOLEAN | {K, C, D, E, F, Univ},
    "LC": BOOLEAN | {K, C},
    "LCU": BOOLEAN | {K, C, Univ},
    "LU": BOOLEAN | {K, Univ},
}


class RewriteError(ValueError):
    pass


def _esc(name: str) -> str:
    return name.replace("_", "_1")


def fresh_for(kind: str, who) -> str:
    """Designated agent for an operator token, e.g. ``fresh_for("K", "a")``."""
    if isinstance(who, str):
        who = (who,)
    return f"{RESERVED}{kind}_" + "_0".join(_esc(a) for a in sorted(who))


def _require(phi: Formula, language: str) -> None:
    extra = operators(phi) - LANGUAGES[language]
    if extra:
        names = ", ".join(sorted(t.__name__ for t in extra))
        raise RewriteError(f"formula is outside {language}: uses {names}")
    voc = vocabulary(phi)
    for name in sorted(voc.agents | voc.props | voc.skills):
        if name.startswith(RESERVED):
            raise RewriteError(f"name {name!r} uses the reserved prefix {RESERVED!r}")


def _rebuild(node: Formula, kids: list) -> Formula:
    args = list(node._args)
    it = iter(kids)
    for i, a in enumerate(args):
        if isinstance(a, Formula):
            args[i] = next(it)
    return type(node)(*args)


def transform(phi: Formula, rule: Callable[[Formula, Formula], Formula | None]) -> Formula:
    """Bottom-up rewrite; ``rule(old, rebuilt)`` may return a replacement."""
    memo: dict[Formula, Formula] = {}
    stack = [(phi, False)]
    while stack:
        node, done = stack.pop()
        if node in memo:
            continue
        if not done:
            stack.append((node, True))
            stack.extend((ch, False) for ch in node.children() if ch not in memo)
            continue
        kids = [memo[ch] for ch in node.children()]
        rebuilt = _rebuild(node, kids) if kids else node
        out = rule(node, rebuilt)
        memo[node] = rebuilt if out is None else out
    return memo[phi]


def _ordered(formulas: Iterable[Formula]) -> list[Formula]:
    # deterministic order: by size, then text
    return sorted(formulas, key=lambda f: (length(f), str(f)))


def _groups_under(phi: Formula, kinds) -> list[tuple[str, ...]]:
    return sorted({n.group for n in iter_subformulas(phi) if isinstance(n, kinds)})


def _sym_pair(box, psi: Formula) -> Formula:
    """(psi -> box ~box ~psi) & (~box ~box psi -> psi)."""
    return And(Implies(psi, box(Not(box(Not(psi))))),
               Implies(Not(box(Not(box(psi)))), psi))


# ---------------------------------------------------------------- L_D to K^D_n

def rewrite_ld_to_kdn(phi: Formula) -> Formula:
    _require(phi, "LD")
    c = FRESH_C

    def rule(old, new):
        if isinstance(new, K):
            return D((new.agent, c), new.sub)
        if isinstance(new, D):
            return D(new.group + (c,), new.sub)
        return None

    rp = lambda f: transform(f, rule)
    agents = sorted(vocabulary(phi).agents) + [c]
    groups = _groups_under(phi, D)
    mu = []
    for psi in _ordered(closure(phi)):
        r = rp(psi)
        for a in agents:
            mu.append(_sym_pair(lambda x, a=a: K(a, x), r))
        for G in groups:
            mu.append(_sym_pair(lambda x, G=G: D(G, x), r))
        for a in agents:
            mu.append(Iff(D((a, c), r), K(a, r)))
        for G in groups:
            mu.append(Iff(D(G + (c,), r), D(G, r)))
    core = big_and(mu)
    n = length(phi)
    return And(rp(phi), big_and(k_tower(c, i, core) for i in range(n + 1)))


# ---------------------------------------------------------------- shared group axioms

def _group_axioms(psis: Iterable[Formula], agents, groups) -> list[Formula]:
    """Clauses relating K, D, E and F over the given groups."""
    mu = []
    for psi in psis:
        for G in groups:
            for a in G:
                mu.append(Implies(F(G, psi), K(a, psi)))
        for G in groups:
            for a in G:
                mu.append(Implies(K(a, psi), D(G, psi)))
        for G, H in product(groups, repeat=2):
            if set(G) <= set(H):
                mu.append(Implies(F(H, psi), F(G, psi)))
        for G, H in product(groups, repeat=2):
            if set(G) <= set(H):
                mu.append(Implies(D(G, psi), D(H, psi)))
        for I, J in product(groups, repeat=2):
            if set(I) & set(J):
                mu.append(Implies(F(I, psi), D(J, psi)))
        for I in groups:
            mu.append(Iff(E(I, psi), big_and(K(b, psi) for b in I)))
        for a in agents:
            mu.append(And(And(Iff(D((a,), psi), K(a, psi)), Iff(E((a,), psi), K(a, psi))),
                          Iff(F((a,), psi), K(a, psi))))
    return mu


# ---------------------------------------------------------------- L_DEF to L_D

def rewrite_ldef_to_ld(phi: Formula) -> Formula:
    _require(phi, "LDEF")
    c = FRESH_C
    voc = vocabulary(phi)
    agents = sorted(voc.agents)
    groups = sorted(voc.groups)
    mu = _group_axioms(_ordered(closure(phi)), agents, groups)
    core = big_and(mu)
    n = length(phi)
    rho1 = And(phi, big_and(k_tower(c, i, core) for i in range(n + 1)))

    # steps two and three are one simultaneous substitution on the
    # original operators, so a freshly introduced D is never rewritten again
    def rule(old, new):
        if isinstance(new, K):
            if new.agent == c:
                return None
            return D((c, fresh_for("K", new.agent)), new.sub)
        for kind, name in ((D, "D"), (E, "E"), (F, "F")):
            if isinstance(new, kind):
                return D((c, fresh_for(name, new.group)), new.sub)
        return None

    return transform(rho1, rule)


# ---------------------------------------------------------------- L_CDEF+U to L_CU

def rewrite_lcdefu_to_lcu(phi: Formula) -> Formula:
    _require(phi, "LCDEFU")
    voc = vocabulary(phi)
    agents = sorted(voc.agents)
    groups = sorted(voc.groups)
    cl = _ordered(closure(phi))
    psis = cl + [C(G, chi) for G in groups for chi in cl]
    rho1 = And(phi, Univ(big_and(_group_axioms(psis, agents, groups))))

    def rule(old, new):
        if isinstance(new, K):
            return K(fresh_for("K", new.agent), new.sub)
        for kind, name in ((D, "D"), (E, "E"), (F, "F")):
            if isinstance(new, kind):
                return K(fresh_for(name, new.group), new.sub)
        if isinstance(new, C):
            return C(tuple(fresh_for("K", a) for a in new.group), new.sub)
        return None

    return transform(rho1, rule)


# ---------------------------------------------------------------- S5 C_2 to L_C

def _two_agents(phi: Formula, agents) -> tuple[str, str]:
    found = sorted(vocabulary(phi).agents)
    if agents is None:
        if len(found) > 2:
            raise RewriteError(f"formula has more than two agents: {found}")
        pad = [f"{RESERVED}ag{i}" for i in range(2)]
        agents = (found + [p for p in pad if p not in found])[:2]
    agents = tuple(agents)
    if len(set(agents)) != 2:
        raise RewriteError("need two distinct agents")
    if not set(found) <= set(agents):
        raise RewriteError(f"formula uses agents outside {list(agents)}")
    return agents


def rewrite_s5c2_to_lc(phi: Formula, agents: tuple[str, str] | None = None) -> Formula:
    _require(phi, "LC")
    a, b = _two_agents(phi, agents)
    cl = _ordered(closure(phi))
    groups = [(a,), (b,), tuple(sorted((a, b)))]
    psis = cl + [C(G, chi) for G in groups for chi in cl]
    mu = []
    for psi in psis:
        for i in (a, b):
            mu.append(Implies(K(i, psi), K(i, K(i, psi))))
            mu.append(Implies(K(i, psi), psi))
    core = big_and(mu)
    return And(And(phi, core), C((a, b), core))


# ---------------------------------------------------------------- L_CU to CPDL

def rewrite_lcu_to_cpdl(phi: Formula) -> Formula:
    _require(phi, "LCU")
    agents = sorted(vocabulary(phi).agents)
    groups = _groups_under(phi, C)
    cl = _ordered(closure(phi))
    psis = cl + [C(G, theta) for G in groups for theta in cl]
    mu = []
    for psi in psis:
        for a in agents:
            mu.append(_sym_pair(lambda x, a=a: K(a, x), psi))
    rho1 = And(phi, Univ(big_and(mu)))

    def rule(old, new):
        if isinstance(new, K):
            return Box(Atomic(new.agent), new.sub)
        if isinstance(new, C):
            u = union_of(new.group)
            return Box(Seq(u, Star(u)), new.sub)
        if isinstance(new, Univ):
            return Box(Universe(), new.sub)
        return None

    return transform(rho1, rule)


# ---------------------------------------------------------------- K^U_2 to L_U

def split_agents(a: str) -> tuple[str, str]:
    return fresh_for("1", a), fresh_for("2", a)


def rewrite_ku2_to_lu(phi: Formula, agents: tuple[str, str] | None = None) -> Formula:
    _require(phi, "LU")
    a, b = _two_agents(phi, agents)
    p = Atom(FRESH_P)
    a1, a2 = split_agents(a)
    b1, b2 = split_agents(b)
    pairs = {a: (a1, a2), b: (b1, b2)}

    def rule(old, new):
        if isinstance(new, K):
            x1, x2 = pairs[new.agent]
            return K(x1, K(x2, Implies(p, new.sub)))
        if isinstance(new, Univ):
            return Univ(Implies(p, new.sub))
        return None

    rho1 = transform(phi, rule)
    xs = [a1, a2, b1, b2]
    guard = Univ(And(Implies(p, big_and(K(x, Not(p)) for x in xs)),
                     Implies(Not(p), big_and(K(x, p) for x in xs))))
    return And(And(rho1, p), guard)


def rewrite_kb1(phi: Formula) -> Formula:
    """Single-agent plain formulas are their own translation."""
    _require(phi, "L")
    if len(vocabulary(phi).agents) > 1:
        raise RewriteError("single-agent formula expected")
    return phi


REWRITES = {
    "kb1": rewrite_kb1,
    "ld-to-kdn": rewrite_ld_to_kdn,
    "ldef-to-ld": rewrite_ldef_to_ld,
    "cdefu-to-cu": rewrite_lcdefu_to_lcu,
    "s5c2-to-lc": rewrite_s5c2_to_lc,
    "cu-to-cpdl": rewrite_lcu_to_cpdl,
    "ku2-to-lu": rewrite_ku2_to_lu,
}


# ================================================================ witnesses

class UnsupportedWitness(RewriteError):
    pass


def relations_of(M: WeightedModel, agents: Iterable[str]) -> dict[str, frozenset]:
    """R(a) = {(x, y) | C(a) <= E(x, y)} for each listed agent."""
    out = {}
    for a in agents:
        succ = M.frame.successors(M.capability(a))
        out[a] = frozenset((x, y) for x in M.worlds for y in succ[x])
    return out


def _kripke_from(M: WeightedModel, agents) -> KripkeModel:
    return KripkeModel(M.worlds, relations_of(M, agents),
                       {w: M.props_at(w) for w in M.worlds})


def _all_pairs_model(worlds, label: Callable[[str, str], frozenset], caps, valuation,
                     skills) -> WeightedModel:
    """Weighted model with every pair, diagonal included, labelled explicitly."""
    edges = {}
    for i, x in enumerate(worlds):
        for y in worlds[i:]:
            edges[x, y] = label(x, y)
    return WeightedModel.build(worlds, edges, caps, valuation, skills=skills)


def _operator_model(M: WeightedModel, phi: Formula, with_c: bool) -> WeightedModel:
    """Agents-as-skills model labelling each pair with the operator tokens
    whose original capability fits the original edge."""
    voc = vocabulary(phi)
    agents, groups = sorted(voc.agents), sorted(voc.groups)
    tokens: list[tuple[str, sk.SkillValue]] = []
    for a in agents:
        tokens.append((fresh_for("K", a), M.capability(a)))
    for G in groups:
        caps = [M.capability(a) for a in G]
        tokens.append((fresh_for("D", G), sk.join_all(caps, M.family, M.frame.lattice)))
        tokens.append((fresh_for("F", G), sk.meet_all(caps)))
    e_tokens = [(fresh_for("E", G), [M.capability(a) for a in G]) for G in groups]

    def label(x, y):
        e = M.edge(x, y)
        out = {name for name, cap in tokens if sk.leq(cap, e)}
        out |= {name for name, caps in e_tokens if any(sk.leq(cap, e) for cap in caps)}
        if with_c:
            out.add(FRESH_C)
        return frozenset(out)

    names = sorted({n for n, _ in tokens} | {n for n, _ in e_tokens} | ({FRESH_C} if with_c else set()))
    caps = {n: frozenset({n}) for n in names}
    return _all_pairs_model(M.worlds, label, caps, dict(M.valuation), names)


def weighted_from_kripke(N: KripkeModel, agents: Iterable[str]) -> WeightedModel:
    """E(x, y) = agents whose relation links x and y (either direction); C(a) = {a}."""
    agents = sorted(agents)

    def label(x, y):
        return frozenset(a for a in agents
                         if (x, y) in N.relation(a) or (y, x) in N.relation(a))

    caps = {a: frozenset({a}) for a in agents}
    return _all_pairs_model(N.worlds, label, caps, dict(N.valuation), agents)


def pair_world(x: str, y: str) -> str:
    return f"<{x},{y}>"


def _ku2_model(N: KripkeModel, a: str, b: str) -> WeightedModel:
    a1, a2 = split_agents(a)
    b1, b2 = split_agents(b)
    W = list(N.worlds)
    pairs = [(x, y) for x in W for y in W]
    worlds = W + [pair_world(x, y) for x, y in pairs]
    Ra, Rb = N.relation(a), N.relation(b)
    edges = {}
    for i, x in enumerate(worlds):
        for y in worlds[i:]:
            edges[x, y] = frozenset()
    for l, r in pairs:
        z = pair_world(l, r)
        if l == r:
            lab = set()
            if (l, r) in Ra:
                lab |= {a1, a2}
            if (l, r) in Rb:
                lab |= {b1, b2}
            edges[l, z] = frozenset(lab)
            continue
        left, right = set(), set()
        if (l, r) in Ra:
            left.add(a1)
            right.add(a2)
        if (l, r) in Rb:
            left.add(b1)
            right.add(b2)
        edges[l, z] = frozenset(left)
        edges[r, z] = frozenset(right)
    names = [a1, a2, b1, b2]
    caps = {n: frozenset({n}) for n in names}
    val = {x: N.props_at(x) | {FRESH_P} for x in W}
    return WeightedModel.build(worlds, edges, caps, val, skills=names)


WITNESS_KINDS = ("kb1", "ld-to-kdn", "ldef-to-ld", "cdefu-to-cu", "s5c2-to-lc",
                 "cu-to-cpdl", "ku2-to-lu")


def witness_forward(source, w: str, phi: Formula, kind: str):
    """Target model and world for ``REWRITES[kind](phi)`` from a source model
    satisfying phi at w.

    The source is a weighted model, except for ``s5c2-to-lc`` and
    ``ku2-to-lu`` whose source logics are relational (a KripkeModel).
    """
    if kind == "kb1":
        return _kripke_from(source, vocabulary(phi).agents), w
    if kind == "ld-to-kdn":
        caps = dict(source.capabilities)
        caps[FRESH_C] = source.frame.bottom
        M0 = source.with_capabilities(caps)
        agents = vocabulary(phi).agents | {FRESH_C}
        return _kripke_from(M0, agents), w
    if kind == "ldef-to-ld":
        return _operator_model(source, phi, with_c=True), w
    if kind == "cdefu-to-cu":
        return _operator_model(source, phi, with_c=False), w
    if kind == "s5c2-to-lc":
        a, b = _two_agents(phi, None)
        rels = dict(source.relations)
        for x in (a, b):
            if not is_equivalence(source.worlds, source.relation(x)):
                # padding agents are absent from phi; identity is the simplest S5 relation
                rels[x] = frozenset((u, u) for u in source.worlds)
        source = KripkeModel(source.worlds, rels, source.valuation)
        return weighted_from_kripke(source, (a, b)), w
    if kind == "cu-to-cpdl":
        return _kripke_from(source, vocabulary(phi).agents), w
    if kind == "ku2-to-lu":
        a, b = _two_agents(phi, None)
        return _ku2_model(source, a, b), w
    raise UnsupportedWitness(f"no construction for {kind!r}")


def witness_backward(target, w: str, phi: Formula, kind: str):
    """Source model from a target model satisfying the rewritten formula.

    Only the finite constructions are available: ``kb1``, ``s5c2-to-lc`` and
    ``cu-to-cpdl``.  The others build infinite sequence models.
    """
    if kind == "kb1":
        agents = sorted(vocabulary(phi).agents)
        skill = {a: f"{RESERVED}s_{_esc(a)}" for a in agents}

        def label(x, y):
            return frozenset(skill[a] for a in agents if (x, y) in target.relation(a))

        caps = {a: frozenset({skill[a]}) for a in agents}
        return _all_pairs_model(target.worlds, label, caps, dict(target.valuation),
                                sorted(skill.values())), w
    if kind == "s5c2-to-lc":
        a, b = _two_agents(phi, None)
        rels = relations_of(target, (a, b))
        closed = {x: reflexive_transitive_closure(target.worlds, r) for x, r in rels.items()}
        return KripkeModel(target.worlds, closed,
                           {u: target.props_at(u) for u in target.worlds}), w
    if kind == "cu-to-cpdl":
        return weighted_from_kripke(target, vocabulary(phi).agents), w
    raise UnsupportedWitness(f"the {kind!r} right-to-left construction is infinite")


TARGET_SEMANTICS = {
    "kb1": "KB1", "ld-to-kdn": "KDn", "cu-to-cpdl": "CPDL",
    "ldef-to-ld": "weighted", "cdefu-to-cu": "weighted", "s5c2-to-lc": "weighted",
    "ku2-to-lu": "weighted",
}


def holds_in_target(model, w: str, formula: Formula, kind: str) -> bool:
    sem = TARGET_SEMANTICS[kind]
    if sem == "weighted":
        return w in Checker(model).truth_set(formula)
    return kripke_check(model, w, formula, sem)
