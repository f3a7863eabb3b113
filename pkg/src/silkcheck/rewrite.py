"""The equational theory: rule validation, fuel-bounded normalization, and
equivalence checking.

Rules have the shape head(args) == rhs where the head is a defined function,
defined predicate, or defined numeric function, and the argument patterns
contain no defined individual-sort symbols.  Normalization is leftmost
innermost: children are normalized before the head is rewritten.  Numeric
addition is built in (0 + b -> b, s(a) + b -> s(a + b) and the symmetric
absorptions), so successor towers and +-numerals meet in one normal form.

Normal forms are cached on the theory, keyed by structural equality, which
keeps repeated unrollings of the same schema linear instead of quadratic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import (
    Atom,
    Fn,
    Formula,
    FreeVar,
    Node,
    NumExpr,
    NumFn,
    Param,
    Sequent,
    SVar,
    Substitution,
    Succ,
    Zero,
    formula_eq,
    numeral,
    numeral_value,
    rebuild,
    split_succs,
)

DEFAULT_FUEL = 100_000


class FuelExhausted(Exception):
    def __init__(self, steps: int):
        super().__init__(f"no normal form within {steps} rewrite steps")
        self.steps = steps


class StuckTerm(Exception):
    """A ground defined application matched no rule during numeric evaluation."""


@dataclass(frozen=True)
class RewriteRule:
    lhs: Node
    rhs: Node
    line: int = 0

    def __str__(self):
        return f"{self.lhs} == {self.rhs}"


def _head_key(node: Node) -> tuple | None:
    if isinstance(node, NumFn):
        return ("n", node.sym)
    if isinstance(node, Fn):
        return ("t", node.sym)
    if isinstance(node, Atom):
        return ("a", node.pred)
    return None


@dataclass
class EquationalTheory:
    rules: tuple = ()
    fuel_default: int = DEFAULT_FUEL
    _index: dict = field(default_factory=dict, repr=False, compare=False)
    _nf_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.rules = tuple(self.rules)
        for rule in self.rules:
            key = _head_key(rule.lhs)
            if key is not None:
                self._index.setdefault(key, []).append(rule)

    def defined_heads(self) -> frozenset:
        return frozenset(self._index)

    def extended(self, more: tuple) -> "EquationalTheory":
        return EquationalTheory(self.rules + tuple(more), self.fuel_default)


EMPTY_THEORY = EquationalTheory()


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class TheoryIssue:
    rule_index: int
    message: str

    def __str__(self):
        return f"rule {self.rule_index + 1}: {self.message}"


@dataclass(frozen=True)
class TheoryReport:
    issues: tuple

    @property
    def ok(self) -> bool:
        return not self.issues


def _rule_vars(node: Node) -> frozenset:
    out = set()
    for sub in _walk_all(node):
        if isinstance(sub, Param):
            out.add(("p", sub.name))
        elif isinstance(sub, FreeVar):
            out.add(("v", sub.name))
    return frozenset(out)


def _walk_all(node: Node):
    stack = [node]
    while stack:
        cur = stack.pop()
        yield cur
        stack.extend(cur.kids())


def validate_theory(theory: EquationalTheory) -> TheoryReport:
    """Report rules violating the head/argument shape constraints.

    Convergence is assumed, not verified; non-termination surfaces as fuel
    exhaustion at normalization time.
    """
    issues = []
    heads = theory.defined_heads()
    seen_lhs: list[Node] = []
    for i, rule in enumerate(theory.rules):
        key = _head_key(rule.lhs)
        if key is None:
            issues.append(TheoryIssue(i, f"left side {rule.lhs} is not a defined-symbol application"))
            continue
        if key == ("n", "+"):
            issues.append(TheoryIssue(i, "numeric + is built in and cannot be redefined"))
            continue
        for arg in rule.lhs.kids():
            for sub in _walk_all(arg):
                sub_key = _head_key(sub)
                if sub_key is None or sub_key == ("n", "+"):
                    continue
                # Numeric superscript expressions are tolerated in patterns;
                # only defined individual symbols and predicates are barred.
                if sub_key[0] in ("t", "a") and sub_key in heads:
                    issues.append(TheoryIssue(i, f"defined symbol {sub} occurs inside the argument {arg}"))
        extra = _rule_vars(rule.rhs) - _rule_vars(rule.lhs)
        if extra:
            names = ", ".join(sorted(n for _, n in extra))
            issues.append(TheoryIssue(i, f"right side uses variables not bound on the left: {names}"))
        for prior in seen_lhs:
            if prior == rule.lhs:
                issues.append(TheoryIssue(i, f"duplicate left side {rule.lhs}"))
                break
        seen_lhs.append(rule.lhs)
    return TheoryReport(tuple(issues))


# ---------------------------------------------------------------------------
# Matching


def match(pattern: Node, subject: Node, binding: dict) -> bool:
    if isinstance(pattern, FreeVar):
        if not isinstance(subject, (NumExpr, Node)):
            return False
        return _bind(binding, ("v", pattern.name), subject)
    if isinstance(pattern, NumExpr):
        return _match_num(pattern, subject, binding)
    if isinstance(pattern, Fn):
        return (
            isinstance(subject, Fn)
            and subject.sym == pattern.sym
            and len(subject.args) == len(pattern.args)
            and all(match(p, s, binding) for p, s in zip(pattern.args, subject.args))
        )
    if isinstance(pattern, SVar):
        return (
            isinstance(subject, SVar)
            and subject.name == pattern.name
            and _match_num(pattern.index, subject.index, binding)
        )
    if isinstance(pattern, Atom):
        return (
            isinstance(subject, Atom)
            and subject.pred == pattern.pred
            and len(subject.args) == len(pattern.args)
            and all(match(p, s, binding) for p, s in zip(pattern.args, subject.args))
        )
    return False


def _match_num(pattern: NumExpr, subject: Node, binding: dict) -> bool:
    # Patterns like k + 1 match any expression with at least one successor,
    # so s(n), n + 1 and numerals all instantiate the same step rule.
    if not isinstance(subject, NumExpr):
        return False
    pb, po = split_succs(pattern)
    sb, so = split_succs(subject)
    if pb is None:
        return sb is None and so == po
    if isinstance(pb, Param):
        if so < po:
            return False
        leftover = so - po
        if sb is None:
            value: NumExpr = numeral(leftover)
        else:
            value = sb
            for _ in range(leftover):
                value = Succ(value)
        return _bind(binding, ("p", pb.name), value)
    if so != po or sb is None or not isinstance(sb, NumFn) or not isinstance(pb, NumFn):
        return False
    return (
        pb.sym == sb.sym
        and len(pb.args) == len(sb.args)
        and all(match(p, s, binding) for p, s in zip(pb.args, sb.args))
    )


def _bind(binding: dict, key: tuple, value: Node) -> bool:
    if key[0] == "p" and not isinstance(value, NumExpr):
        return False
    old = binding.get(key)
    if old is None:
        binding[key] = value
        return True
    return old == value


def _instantiate(rhs: Node, binding: dict) -> Node:
    sub = Substitution(
        {name: v for (kind, name), v in binding.items() if kind == "p"},
        {name: v for (kind, name), v in binding.items() if kind == "v"},
    )
    from .syntax import subst

    return subst(rhs, sub)


# ---------------------------------------------------------------------------
# Normalization


@dataclass(frozen=True)
class NormalizationResult:
    value: Node
    steps_used: int


class _Budget:
    def __init__(self, fuel: int):
        self.fuel = fuel
        self.used = 0

    def spend(self, cost: int = 1):
        self.used += cost
        if self.used > self.fuel:
            raise FuelExhausted(self.fuel)


def _try_head(node: Node, theory: EquationalTheory, budget: _Budget) -> Node | None:
    if isinstance(node, NumFn) and node.sym == "+":
        a, b = node.args
        va, vb = numeral_value(a), numeral_value(b)
        if va is not None and vb is not None:
            # Building the sum costs its size in fuel, so towers cannot grow
            # past what the budget covers (iterated exponentials otherwise
            # explode long before the step count does).
            budget.spend(max(va + vb - 1, 0))
            return numeral(va + vb)
        if isinstance(a, Zero):
            return b
        if isinstance(a, Succ):
            return Succ(NumFn("+", (a.prev, b)))
        if isinstance(b, Zero):
            return a
        if isinstance(b, Succ):
            return Succ(NumFn("+", (a, b.prev)))
        return None
    key = _head_key(node)
    if key is None:
        return None
    for rule in theory._index.get(key, ()):
        binding: dict = {}
        if match(rule.lhs, node, binding):
            return _instantiate(rule.rhs, binding)
    return None


def _normalize(root: Node, theory: EquationalTheory, budget: _Budget) -> Node:
    cache = theory._nf_cache
    chosen: dict[int, Node] = {}
    stack = [root]
    while stack:
        cur = stack[-1]
        if cur in cache:
            stack.pop()
            continue
        target = chosen.get(id(cur))
        if target is not None:
            # The head step was taken on a previous visit; its target has
            # been fully normalized by now.
            nf = cache[target]
            cache[cur] = nf
            stack.pop()
            continue
        kids = cur.kids()
        pending = [k for k in kids if k not in cache]
        if pending:
            stack.extend(pending)
            continue
        new_kids = tuple(cache[k] for k in kids)
        if all(a is b for a, b in zip(kids, new_kids)):
            reb = cur
        else:
            reb = rebuild(cur, new_kids)
        target = _try_head(reb, theory, budget)
        if target is None:
            cache[cur] = reb
            cache[reb] = reb
            stack.pop()
            continue
        budget.spend()
        if target in cache:
            nf = cache[target]
            cache[cur] = nf
            cache[reb] = nf
            stack.pop()
        else:
            chosen[id(cur)] = target
            stack.append(target)
    return cache[root]


def normalize(x, theory: EquationalTheory, fuel: int | None = None) -> NormalizationResult:
    """Rewrite to normal form; sequents are normalized formula by formula."""
    budget = _Budget(theory.fuel_default if fuel is None else fuel)
    if isinstance(x, Sequent):
        value: Node | Sequent = Sequent(
            tuple(_normalize(f, theory, budget) for f in x.ante),
            tuple(_normalize(f, theory, budget) for f in x.succ),
        )
    else:
        value = _normalize(x, theory, budget)
    return NormalizationResult(value, budget.used)


def equivalent(a: Node, b: Node, theory: EquationalTheory, fuel: int | None = None) -> bool:
    """Whether the theory proves a == b, decided by joinability of normal
    forms (complete for convergent theories)."""
    na = normalize(a, theory, fuel).value
    nb = normalize(b, theory, fuel).value
    if isinstance(na, Formula) and isinstance(nb, Formula):
        return formula_eq(na, nb)
    return na == nb


def sequent_equivalent(a: Sequent, b: Sequent, theory: EquationalTheory, fuel: int | None = None) -> bool:
    return normalize(a, theory, fuel).value == normalize(b, theory, fuel).value


def eval_numeric(e: NumExpr, theory: EquationalTheory, fuel: int | None = None) -> NumExpr:
    """Normal form of a ground numeric expression, which must be a numeral."""
    if numeral_value(e) is not None:
        return e
    from .syntax import free_params

    params = free_params(e)
    if params:
        raise ValueError(f"numeric expression {e} is not ground: {sorted(params)}")
    nf = normalize(e, theory, fuel).value
    if numeral_value(nf) is None:
        raise StuckTerm(f"{e} evaluates to {nf}, which is not a numeral")
    return nf
