"""Tree expansion of an equation spec into explicit stochastic objects.

Level 1 solves the linear equation against the noise.  Each further
level absorbs the most singular unabsorbed products of existing objects
into a new object, whose bound is that forcing homogeneity plus the
dissipative order.  Candidate products inside one nonlinear term are
ranked by total factor level, which agrees with ranking by homogeneity
whenever the per-step gain is positive and keeps the gain structurally
constant when it is not (so the closed-form exponent and the expansion
agree on either side of criticality).  Ties keep every attaining term.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .affine import DimExpr, RegBound, ScalingInfo, as_fraction
from .dsl import SpdeSpec, NonlinearTerm, VECTOR, validate_spec
from .rules import noise_regularity, product_analytic

MAX_LEVELS_LIMIT = 32

SUBCRITICAL = "Subcritical"
CRITICAL = "Critical"
SUPERCRITICAL = "Supercritical"
CONDITION_ON_DIM = "ConditionOnDim"


class ExpansionError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class ProductTerm:
    """A formal product of objects, with derivative bookkeeping.

    factors are object labels in descending level order; inner
    derivative orders align with factors; the homogeneity already
    accounts for every derivative.
    """

    term_index: int
    factors: Tuple[str, ...]
    inner_orders: Tuple[Fraction, ...]
    outer_order: Fraction
    projector: Optional[str]
    factor_bounds: Tuple[RegBound, ...]
    homogeneity: RegBound

    def summands(self, vector_rank: bool) -> Tuple[str, ...]:
        """Display strings; a degree-2 pair of distinct vector factors
        is symmetrized into both orders."""
        parts = [_factor_str(f, k) for f, k in zip(self.factors, self.inner_orders)]
        if vector_rank and len(parts) == 2 and parts[0] != parts[1]:
            return ("*".join(parts), "*".join(reversed(parts)))
        return ("*".join(parts),)

    def render(self, vector_rank: bool) -> str:
        body = " + ".join(self.summands(vector_rank))
        return _wrap_outer(body, self.outer_order, vector_rank)


def _factor_str(label: str, order: Fraction) -> str:
    if order == 0:
        return label
    if order == 1:
        return f"D[{label}]"
    return f"D^{order}[{label}]"


def _wrap_outer(body: str, order: Fraction, vector_rank: bool) -> str:
    if order == 0:
        return body
    if order == 1 and vector_rank:
        return f"div({body})"
    if order == 1:
        return f"D({body})"
    return f"D^{order}({body})"


def render_forcing(terms: Sequence[ProductTerm], vector_rank: bool) -> str:
    if len(terms) == 1 and terms[0].factors == ("xi",):
        return "xi"
    summands: List[str] = []
    for t in terms:
        summands.extend(t.summands(vector_rank))
    outer = terms[0].outer_order if terms else Fraction(0)
    same_outer = all(t.outer_order == outer for t in terms)
    if same_outer:
        return _wrap_outer(" + ".join(summands), outer, vector_rank)
    return " + ".join(t.render(vector_rank) for t in terms)


@dataclass(frozen=True)
class ExpansionRow:
    level: int
    label: str
    forcing: Tuple[ProductTerm, ...]
    forcing_bound: RegBound
    object_bound: RegBound
    remainder_bound: Optional[RegBound] = None
    renorm: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Classification:
    kind: str
    condition: Optional[str] = None

    def render(self) -> str:
        if self.kind == CONDITION_ON_DIM:
            return f"ConditionOnDim({self.condition})"
        return self.kind


@dataclass(frozen=True)
class CriticalityReport:
    spec: SpdeSpec
    dim: Optional[int]
    max_levels: int
    rows: Tuple[ExpansionRow, ...]
    candidates: Tuple[ProductTerm, ...]
    gain: Optional[DimExpr]
    gain_error: Optional[str]
    scaling_exponent: Optional[DimExpr]
    scaling_exponent_error: Optional[str]
    classification: Classification
    stopped_early: bool
    symbolic_stop: Optional[str] = None

    @property
    def vector_rank(self) -> bool:
        return self.spec.unknown_rank == VECTOR


# ---------------------------------------------------------------------------
# closed-form exponents and classification


def _scaling_info(spec: SpdeSpec) -> ScalingInfo:
    dim = DimExpr.dim() if spec.dim is None else DimExpr.const(spec.dim)
    return ScalingInfo(spec.scaling_time_order, dim)


def noise_solved_bound(spec: SpdeSpec) -> RegBound:
    """Bound of the first object: noise bound plus the first solve order."""
    raw = noise_regularity(spec.noise_kind, _scaling_info(spec), spec.noise_lift)
    return RegBound(raw.sup + DimExpr.const(spec.z1_effective_order))


def term_exponent(spec: SpdeSpec, term: NonlinearTerm) -> DimExpr:
    """Per-step regularity gain contributed by one nonlinear term.

    (degree - 1) copies of the first object, minus every derivative the
    term carries, plus the dissipative order regained per level.
    """
    r1 = noise_solved_bound(spec).sup
    return (
        r1 * (term.degree - 1)
        - DimExpr.const(term.total_derivative_order)
        + DimExpr.const(spec.diffusion_order)
    )


def term_exponents(spec: SpdeSpec) -> Tuple[DimExpr, ...]:
    return tuple(term_exponent(spec, t) for t in spec.nonlinear_terms)


def scaling_exponent(spec: SpdeSpec) -> DimExpr:
    """The single rescaling exponent; positive means subcritical.

    Raises E_MULTI_TERM when nonlinear terms disagree (classification
    then falls back to the per-term minimum).
    """
    _require_valid(spec)
    exps = term_exponents(spec)
    if not exps:
        raise ExpansionError("E_NO_NONLINEAR", "spec has no nonlinear terms")
    if any(e != exps[0] for e in exps[1:]):
        raise ExpansionError("E_MULTI_TERM", "nonlinear terms have different homogeneities")
    return exps[0]


def _subcritical_condition(exps: Sequence[DimExpr]) -> Optional[str]:
    """Intersection of {e_i(d) > 0} as a condition on d, or None if empty."""
    lower: Optional[Fraction] = None
    upper: Optional[Fraction] = None
    for e in exps:
        if e.cd == 0:
            if e.c0 <= 0:
                return None
            continue
        threshold = -e.c0 / e.cd
        if e.cd < 0:
            upper = threshold if upper is None else min(upper, threshold)
        else:
            lower = threshold if lower is None else max(lower, threshold)
    if lower is not None and upper is not None:
        if lower >= upper:
            return None
        return f"{lower} < d < {upper}"
    if upper is not None:
        return f"d < {upper}"
    if lower is not None:
        return f"d > {lower}"
    return "all d"


def classify(spec: SpdeSpec, dim: Optional[int] = "from_spec") -> Classification:
    """Subcritical / Critical / Supercritical, or a condition on d.

    The binding constraint across several nonlinear terms is the
    smallest exponent.
    """
    _require_valid(spec)
    if dim == "from_spec":
        dim = spec.dim
    exps = term_exponents(spec)
    if dim is not None:
        values = [e.evaluate(dim) for e in exps]
        worst = min(values)
        if worst > 0:
            return Classification(SUBCRITICAL)
        if worst == 0:
            return Classification(CRITICAL)
        return Classification(SUPERCRITICAL)
    if all(e.is_constant for e in exps):
        worst = min(e.c0 for e in exps)
        if worst > 0:
            return Classification(SUBCRITICAL)
        if worst == 0:
            return Classification(CRITICAL)
        return Classification(SUPERCRITICAL)
    condition = _subcritical_condition(exps)
    if condition is None:
        return Classification(CONDITION_ON_DIM, "never subcritical")
    return Classification(CONDITION_ON_DIM, condition)


def _require_valid(spec: SpdeSpec):
    problems = [d for d in validate_spec(spec) if d.severity == "error"]
    if problems:
        raise ExpansionError(problems[0].code, problems[0].message)


# ---------------------------------------------------------------------------
# the expansion proper


def _label(level: int) -> str:
    return f"z{level}"


def _make_product(
    term_index: int,
    term: NonlinearTerm,
    levels: Tuple[int, ...],
    regs: Dict[int, RegBound],
) -> ProductTerm:
    # factors descending by level; inner orders applied positionally
    ordered = tuple(sorted(levels, reverse=True))
    bounds = []
    homog = DimExpr.const(0)
    for lv, k in zip(ordered, term.inner_derivative_orders):
        b = RegBound(regs[lv].sup - DimExpr.const(k))
        bounds.append(b)
        homog = homog + b.sup
    homog = homog - DimExpr.const(term.outer_derivative_order)
    return ProductTerm(
        term_index=term_index,
        factors=tuple(_label(lv) for lv in ordered),
        inner_orders=tuple(term.inner_derivative_orders),
        outer_order=term.outer_derivative_order,
        projector=term.projector,
        factor_bounds=tuple(bounds),
        homogeneity=RegBound(homog),
    )


def _compare(a: DimExpr, b: DimExpr) -> Optional[int]:
    """-1/0/+1 when decidable for every dimension, else None."""
    diff = a - b
    if diff.is_constant:
        if diff.c0 < 0:
            return -1
        if diff.c0 > 0:
            return 1
        return 0
    return None


def analytic_status(candidate: ProductTerm, d: int) -> Optional[RegBound]:
    """Fold the two-factor analytic product across all factors at a
    concrete dimension; None marks an ill-defined product."""
    bounds = [RegBound(DimExpr.const(b.evaluate(d))) for b in candidate.factor_bounds]
    acc = bounds[0]
    for nxt in bounds[1:]:
        result = product_analytic(acc, nxt, d)
        if result is None:
            return None
        acc = result
    return acc


def expand(spec: SpdeSpec, max_levels: int = 4) -> CriticalityReport:
    """Run the expansion and assemble the full report."""
    _require_valid(spec)
    if not 1 <= max_levels <= MAX_LEVELS_LIMIT:
        raise ValueError(f"max_levels must be in [1, {MAX_LEVELS_LIMIT}], got {max_levels}")

    dim = spec.dim
    gamma = spec.diffusion_order
    regs: Dict[int, RegBound] = {}
    rows: List[ExpansionRow] = []
    seen_candidates: Dict[Tuple[int, Tuple[str, ...]], ProductTerm] = {}
    absorbed: Dict[int, set] = {i: set() for i in range(len(spec.nonlinear_terms))}
    symbolic_stop: Optional[str] = None
    stopped_early = False

    noise_bound = noise_regularity(spec.noise_kind, _scaling_info(spec), spec.noise_lift)
    z1_bound = RegBound(noise_bound.sup + DimExpr.const(spec.z1_effective_order))
    regs[1] = z1_bound
    noise_term = ProductTerm(
        term_index=-1,
        factors=("xi",),
        inner_orders=(Fraction(0),),
        outer_order=Fraction(0),
        projector=None,
        factor_bounds=(noise_bound,),
        homogeneity=noise_bound,
    )
    rows.append(ExpansionRow(1, _label(1), (noise_term,), noise_bound, z1_bound))

    def candidate_pool(top_level: int):
        """Per-term minimal-levelsum unabsorbed products over z1..z_top."""
        pool = []
        for ti, term in enumerate(spec.nonlinear_terms):
            combos = [
                c
                for c in itertools.combinations_with_replacement(range(1, top_level + 1), term.degree)
                if c not in absorbed[ti]
            ]
            if not combos:
                continue
            min_ls = min(sum(c) for c in combos)
            best = [c for c in combos if sum(c) == min_ls]
            pool.append((ti, term, best))
        return pool

    def register(products: List[Tuple[int, Tuple[int, ...], ProductTerm]]) -> List[str]:
        """Record candidates; at concrete dim, return newly flagged labels."""
        flagged = []
        for ti, levels, prod in products:
            key = (ti, prod.factors)
            if key in seen_candidates:
                continue
            seen_candidates[key] = prod
            if dim is not None and analytic_status(prod, dim) is None:
                flagged.extend(prod.summands(spec.unknown_rank == VECTOR))
        return flagged

    level = 1
    while level < max_levels:
        pool = candidate_pool(level)
        if not pool:
            break
        # build every minimal product, then take the global homogeneity minimum
        built: List[Tuple[int, Tuple[int, ...], ProductTerm]] = []
        for ti, term, combos in pool:
            for c in combos:
                built.append((ti, c, _make_product(ti, term, c, regs)))
        best: List[Tuple[int, Tuple[int, ...], ProductTerm]] = []
        best_h: Optional[DimExpr] = None
        undecidable = False
        for entry in built:
            h = entry[2].homogeneity.sup
            if best_h is None:
                best, best_h = [entry], h
                continue
            cmp = _compare(h, best_h)
            if cmp is None:
                undecidable = True
                break
            if cmp < 0:
                best, best_h = [entry], h
            elif cmp == 0:
                best.append(entry)
        if undecidable:
            symbolic_stop = "E_SYMBOLIC_STOP"
            break

        new_flags = register(built)
        level += 1
        best.sort(key=lambda entry: tuple(sorted(entry[1], reverse=True)))
        forcing = tuple(p for _, _, p in best)
        reg = RegBound(best_h + DimExpr.const(gamma))
        regs[level] = reg
        for ti, levels, _ in best:
            absorbed[ti].add(levels)
        rows.append(ExpansionRow(level, _label(level), forcing, RegBound(best_h), reg, renorm=tuple(new_flags)))

        sup = reg.sup
        done = sup.evaluate(dim) >= 0 if dim is not None else sup.nonneg_for_all_dims()
        if done:
            stopped_early = True
            break

    # remainder after level k is the next level's would-be regularity;
    # the products examined here count as encountered
    tail_remainder: Optional[RegBound] = None
    if symbolic_stop is None:
        tail_best: Optional[DimExpr] = None
        decidable = True
        for ti, term, combos in candidate_pool(level):
            tail_built = [(ti, c, _make_product(ti, term, c, regs)) for c in combos]
            register(tail_built)
            for _, _, prod in tail_built:
                h = prod.homogeneity.sup
                if tail_best is None:
                    tail_best = h
                    continue
                cmp = _compare(h, tail_best)
                if cmp is None:
                    decidable = False
                    break
                if cmp < 0:
                    tail_best = h
            if not decidable:
                break
        if decidable and tail_best is not None:
            tail_remainder = RegBound(tail_best + DimExpr.const(gamma))
    remainders: List[Optional[RegBound]] = []
    for idx in range(len(rows)):
        if idx + 1 < len(rows):
            remainders.append(rows[idx + 1].object_bound)
        else:
            remainders.append(tail_remainder)
    rows = [
        ExpansionRow(r.level, r.label, r.forcing, r.forcing_bound, r.object_bound, rem, r.renorm)
        for r, rem in zip(rows, remainders)
    ]

    gain, gain_error = _gain_of_rows(rows)
    try:
        exponent = scaling_exponent(spec)
        exponent_error = None
    except ExpansionError as exc:
        exponent, exponent_error = None, exc.code
    if symbolic_stop and gain is None:
        classification = Classification(CONDITION_ON_DIM, _subcritical_condition(term_exponents(spec)) or "never subcritical")
    else:
        classification = classify(spec, dim)

    ordered_candidates = tuple(seen_candidates.values())
    return CriticalityReport(
        spec=spec,
        dim=dim,
        max_levels=max_levels,
        rows=tuple(rows),
        candidates=ordered_candidates,
        gain=gain,
        gain_error=gain_error,
        scaling_exponent=exponent,
        scaling_exponent_error=exponent_error,
        classification=classification,
        stopped_early=stopped_early,
        symbolic_stop=symbolic_stop,
    )


def _gain_of_rows(rows: Sequence[ExpansionRow]):
    if len(rows) < 2:
        return None, "E_TOO_FEW_ROWS"
    diffs = [rows[i + 1].object_bound.sup - rows[i].object_bound.sup for i in range(len(rows) - 1)]
    if any(d != diffs[0] for d in diffs[1:]):
        return None, "E_NONCONSTANT_GAIN"
    return diffs[0], None


def gain_per_step(report: CriticalityReport) -> DimExpr:
    """Common difference of consecutive object bounds."""
    gain, err = _gain_of_rows(report.rows)
    if gain is None:
        raise ExpansionError(err, "object regularities do not advance by a constant step")
    return gain


def renormalization_flags(report: CriticalityReport, d: int) -> List[ProductTerm]:
    """Products met during expansion whose analytic product fails at d."""
    if report.dim is not None and d != report.dim:
        raise ValueError(f"report was expanded at d={report.dim}, not d={d}")
    return [c for c in report.candidates if analytic_status(c, d) is None]
