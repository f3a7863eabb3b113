"""From scripts to proof schemata: construction-order normal form, the
schema extraction, and the induction-statement emitter.

The normal form rearranges a proof so groups are built one at a time in the
order they close; group and pair references use stable ids, so reordering is
a permutation of steps plus a renumbering of group ids.  Extraction then
reads one schema component off each closed group with a non-empty stepcase,
leading group first, turning the recorded cycle and call leaves into self
and forward links.
"""

from __future__ import annotations

from dataclasses import replace

from .kernel import bridge_to
from .schema import ProofSchema, SchemaComponent
from .silk import (
    ClosedStep,
    ComponentCollection,
    EmptyStep,
    NotAProof,
    SiLKScript,
    check_script,
    leading_group,
)
from .syntax import (
    And,
    Formula,
    Imp,
    Not,
    NumFn,
    OmegaAll,
    Or,
    Param,
    Sequent,
    Substitution,
    Succ,
    numeral,
    subst,
)


# ---------------------------------------------------------------------------
# Pre-proof schema normal form


def ancestor_map(script: SiLKScript) -> dict:
    """Step indices identified with each group (call targets excluded)."""
    out: dict[int, list] = {}
    next_gid = 1
    for i, step in enumerate(script.steps):
        if step.rule == "ax1r":
            gid = next_gid
            next_gid += 1
        else:
            gid = step.group
        out.setdefault(gid, []).append(i)
    return {gid: tuple(idxs) for gid, idxs in out.items()}


def to_ppsnf(script: SiLKScript, fuel: int | None = None) -> SiLKScript:
    """Reorder a proof so each group is fully built, in closure order, before
    the next group starts; idempotent on scripts already in that shape."""
    collection, verdict, report = check_script(script, fuel)
    if verdict != "proof":
        raise NotAProof(f"normal form is defined for proofs only, got {verdict}: {report}")
    ancestors = ancestor_map(script)
    closure_of = {g.gid: g.closure_index for g in collection.groups}
    ordered_gids = sorted(ancestors, key=lambda gid: closure_of[gid])
    new_order = [i for gid in ordered_gids for i in ancestors[gid]]

    # Group ids are creation ordinals, so renumber references to match the
    # new creation order.
    original_gid = {}
    next_gid = 1
    for i, step in enumerate(script.steps):
        if step.rule == "ax1r":
            original_gid[i] = next_gid
            next_gid += 1
    remap: dict[int, int] = {}
    next_gid = 1
    for i in new_order:
        if i in original_gid:
            remap[original_gid[i]] = next_gid
            next_gid += 1
    new_steps = []
    for i in new_order:
        step = script.steps[i]
        changes = {}
        if step.group is not None:
            changes["group"] = remap[step.group]
        if step.target is not None:
            changes["target"] = remap[step.target]
        new_steps.append(replace(step, **changes) if changes else step)
    return SiLKScript(script.theory, tuple(new_steps))


# ---------------------------------------------------------------------------
# Schema extraction


def silk_to_schema(script: SiLKScript, fuel: int | None = None) -> ProofSchema:
    """One schema component per closed group with a non-empty stepcase,
    leading component first so every call becomes a forward link.

    A proof whose leading group closed without a stepcase is an ordinary
    rewrite-extended proof; it is returned as a single component with no
    step, whose evaluation at any numeral is that proof.
    """
    normal = to_ppsnf(script, fuel)
    collection, verdict, report = check_script(normal, fuel)
    if verdict != "proof":
        raise NotAProof(f"translation is defined for proofs only, got {verdict}")
    lead = leading_group(collection)
    step_param = Succ(Param("n"))

    if isinstance(lead.pairs[0].step, EmptyStep):
        pair = lead.pairs[0]
        base = bridge_to(pair.base_proof, subst(lead.pattern, Substitution({"n": numeral(0)}, {})))
        comp = SchemaComponent(lead.link_name(), lead.pattern, lead.pattern_vars, None, base, None)
        return ProofSchema((comp,))

    kept = [g for g in collection.groups if isinstance(g.pairs[0].step, ClosedStep)]
    kept.sort(key=lambda g: -g.closure_index)
    components = []
    for g in kept:
        pair = g.pairs[0]
        base_want = subst(g.pattern, Substitution({"n": numeral(0)}, {}))
        step_want = subst(g.pattern, Substitution({"n": step_param}, {}))
        components.append(
            SchemaComponent(
                g.link_name(),
                g.pattern,
                g.pattern_vars,
                step_param,
                bridge_to(pair.base_proof, base_want),
                bridge_to(pair.step_proof, step_want),
            )
        )
    return ProofSchema(tuple(components))


# ---------------------------------------------------------------------------
# Interpretation


def _conj(formulas: tuple) -> Formula | None:
    out = None
    for f in formulas:
        out = f if out is None else And(out, f)
    return out


def _disj(formulas: tuple) -> Formula | None:
    out = None
    for f in formulas:
        out = f if out is None else Or(out, f)
    return out


def interpret_sequent(s: Sequent) -> Formula:
    """The customary reading: conjunction of the antecedent implies the
    disjunction of the succedent, with empty sides elided."""
    left = _conj(s.ante)
    right = _disj(s.succ)
    if left is None and right is None:
        raise NotAProof("the empty sequent has no interpretation")
    if left is None:
        return right
    if right is None:
        return Not(left)
    return Imp(left, right)


def interpret(collection: ComponentCollection) -> Formula:
    """The induction statement a closed collection proves.

    When the leading group closed without a stepcase, this is simply its
    basecase read as a formula.  Otherwise the groups with non-empty
    stepcases contribute their basecases and the step implications for
    their patterns, quantified over the numeric sort, concluding the
    leading pattern at every numeral.
    """
    lead = leading_group(collection)
    if isinstance(lead.pairs[0].step, EmptyStep):
        return interpret_sequent(lead.pairs[0].base.sequent)
    groups = [g for g in collection.groups if isinstance(g.pairs[0].step, ClosedStep)]
    groups.sort(key=lambda g: -g.closure_index)
    x = Param("x")
    x1 = NumFn("+", (x, numeral(1)))
    bases = _conj(tuple(interpret_sequent(g.pairs[0].base.sequent) for g in groups))
    steps = _conj(
        tuple(
            Imp(
                interpret_sequent(subst(g.pattern, Substitution({"n": x}, {}))),
                interpret_sequent(subst(g.pattern, Substitution({"n": x1}, {}))),
            )
            for g in groups
        )
    )
    lead_all = OmegaAll(
        "x", interpret_sequent(subst(lead.pattern, Substitution({"n": x}, {})))
    )
    return Imp(And(bases, OmegaAll("x", steps)), lead_all)
