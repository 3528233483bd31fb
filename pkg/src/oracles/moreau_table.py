"""
Moreau Law Table Module
Exhaustive evaluation of the lower/upper addition laws over a probe set
"""

from itertools import combinations, product
from typing import Callable, Dict, List, Sequence, Tuple

import pandas as pd

from src.core.extended_real import (
    NEG_INF,
    POS_INF,
    XReal,
    inf_fold,
    low_add,
    neg,
    sup_fold,
    upp_add,
)
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

PROBES: Tuple[XReal, ...] = (NEG_INF, XReal(-1.0), XReal(0.0), XReal(1.0), POS_INF)

Law = Tuple[str, str, int, Callable[..., bool]]


def _iff(*flags: bool) -> bool:
    return all(flags) or not any(flags)


def _strict_mixed_case(u: XReal, v: XReal, w: XReal) -> bool:
    return (u.is_pos_inf and w.is_neg_inf) or (u.is_neg_inf and w.is_pos_inf and v.is_finite)


def _pointwise_laws() -> List[Law]:
    return [
        ('lower addition commutative', 'algebra', 2,
         lambda u, v: low_add(u, v) == low_add(v, u)),
        ('upper addition commutative', 'algebra', 2,
         lambda u, v: upp_add(u, v) == upp_add(v, u)),
        ('lower addition associative', 'algebra', 3,
         lambda u, v, w: low_add(low_add(u, v), w) == low_add(u, low_add(v, w))),
        ('upper addition associative', 'algebra', 3,
         lambda u, v, w: upp_add(upp_add(u, v), w) == upp_add(u, upp_add(v, w))),
        ('(+inf) lower (-inf) = -inf', 'algebra', 0,
         lambda: low_add(POS_INF, NEG_INF) == NEG_INF and low_add(NEG_INF, POS_INF) == NEG_INF),
        ('(+inf) upper (-inf) = +inf', 'algebra', 0,
         lambda: upp_add(POS_INF, NEG_INF) == POS_INF and upp_add(NEG_INF, POS_INF) == POS_INF),
        ('lower addition monotone', 'monotonicity', 4,
         lambda u, u2, v, v2: not (u <= u2 and v <= v2) or low_add(u, v) <= low_add(u2, v2)),
        ('upper addition monotone', 'monotonicity', 4,
         lambda u, u2, v, v2: not (u <= u2 and v <= v2) or upp_add(u, v) <= upp_add(u2, v2)),
        ('(-u) lower (-v) <= -(u lower v)', 'negation', 2,
         lambda u, v: low_add(neg(u), neg(v)) <= neg(low_add(u, v))),
        ('(-u) upper (-v) >= -(u upper v)', 'negation', 2,
         lambda u, v: upp_add(neg(u), neg(v)) >= neg(upp_add(u, v))),
        ('(-u) lower u <= 0', 'self_difference', 1,
         lambda u: low_add(neg(u), u) <= XReal(0.0)),
        ('(-u) upper u >= 0', 'self_difference', 1,
         lambda u: upp_add(neg(u), u) >= XReal(0.0)),
        ('t < +inf: inf f lower t = inf (f lower t)', 'inf_shift', 0, None),
        ('t > -inf: sup f upper t = sup (f upper t)', 'sup_shift', 0, None),
        ('u lower v <= u upper v', 'mixed', 2,
         lambda u, v: low_add(u, v) <= upp_add(u, v)),
        ('-(u upper v) = (-u) lower (-v)', 'negation', 2,
         lambda u, v: neg(upp_add(u, v)) == low_add(neg(u), neg(v))),
        ('-(u lower v) = (-u) upper (-v)', 'negation', 2,
         lambda u, v: neg(low_add(u, v)) == upp_add(neg(u), neg(v))),
        ('(u upper v) lower w <= u upper (v lower w)', 'mixed', 3,
         lambda u, v, w: low_add(upp_add(u, v), w) <= upp_add(u, low_add(v, w))),
        ('strict mixed inequality exactly in the two listed cases', 'mixed', 3,
         lambda u, v, w: (low_add(upp_add(u, v), w) < upp_add(u, low_add(v, w)))
         == _strict_mixed_case(u, v, w)),
        ('u lower (-v) <= 0 <=> u <= v <=> 0 <= v upper (-u)', 'comparison', 2,
         lambda u, v: _iff(low_add(u, neg(v)) <= XReal(0.0), u <= v, XReal(0.0) <= upp_add(v, neg(u)))),
        ('u lower (-v) <= w <=> u <= v upper w <=> u lower (-w) <= v', 'comparison', 3,
         lambda u, v, w: _iff(low_add(u, neg(v)) <= w, u <= upp_add(v, w), low_add(u, neg(w)) <= v)),
        ('w <= v upper (-u) <=> u lower w <= v <=> u <= v upper (-w)', 'comparison', 3,
         lambda u, v, w: _iff(w <= upp_add(v, neg(u)), low_add(u, w) <= v, u <= upp_add(v, neg(w)))),
    ]


def _families() -> List[Tuple[XReal, ...]]:
    """Nonempty subsets of the probe set, used as finite index families."""
    return [subset for size in range(1, len(PROBES) + 1) for subset in combinations(PROBES, size)]


def _family_laws() -> List[Tuple[str, str, Callable[[Sequence[XReal], Sequence[XReal]], bool]]]:
    def pairs(op, a, b):
        return [op(f, g) for f in a for g in b]

    return [
        ('sup f lower sup g = sup (f lower g)', 'families',
         lambda a, b: low_add(sup_fold(a), sup_fold(b)) == sup_fold(pairs(low_add, a, b))),
        ('inf f lower inf g <= inf (f lower g)', 'families',
         lambda a, b: low_add(inf_fold(a), inf_fold(b)) <= inf_fold(pairs(low_add, a, b))),
        ('inf f upper inf g = inf (f upper g)', 'families',
         lambda a, b: upp_add(inf_fold(a), inf_fold(b)) == inf_fold(pairs(upp_add, a, b))),
        ('sup f upper sup g >= sup (f upper g)', 'families',
         lambda a, b: upp_add(sup_fold(a), sup_fold(b)) >= sup_fold(pairs(upp_add, a, b))),
    ]


def _constant_laws(family: Sequence[XReal], t: XReal) -> Dict[str, bool]:
    results = {}
    if not t.is_pos_inf:
        results['inf_shift'] = (
            low_add(inf_fold(family), t) == inf_fold(low_add(f, t) for f in family)
        )
    if not t.is_neg_inf:
        results['sup_shift'] = (
            upp_add(sup_fold(family), t) == sup_fold(upp_add(f, t) for f in family)
        )
    return results


def moreau_law_table() -> pd.DataFrame:
    """
    Evaluate every Moreau addition law exhaustively

    Pointwise laws run over PROBES^arity; laws about sup/inf of families run
    over all pairs of nonempty subsets of PROBES.

    Returns:
        DataFrame with one row per law: law, family, cases, violations
    """
    logger.info("Evaluating Moreau law table over the probe set...")
    rows = []
    families = _families()

    for name, family, arity, check in _pointwise_laws():
        if check is None:
            continue
        cases = 0
        violations = 0
        for args in product(PROBES, repeat=arity):
            cases += 1
            if not check(*args):
                violations += 1
        rows.append({'law': name, 'family': family, 'cases': cases, 'violations': violations})

    for name, family, check in _family_laws():
        cases = 0
        violations = 0
        for a in families:
            for b in families:
                cases += 1
                if not check(a, b):
                    violations += 1
        rows.append({'law': name, 'family': family, 'cases': cases, 'violations': violations})

    constant_counts = {
        'inf_shift': [0, 0],
        'sup_shift': [0, 0],
    }
    for members in families:
        for t in PROBES:
            for key, ok in _constant_laws(members, t).items():
                constant_counts[key][0] += 1
                constant_counts[key][1] += int(not ok)
    for name, family, _, _ in _pointwise_laws():
        if family in constant_counts:
            cases, violations = constant_counts[family]
            rows.append({'law': name, 'family': family, 'cases': cases, 'violations': violations})

    table = pd.DataFrame(rows, columns=['law', 'family', 'cases', 'violations'])
    logger.info(
        f"Moreau law table: {len(table)} laws, {int(table['cases'].sum())} cases, "
        f"{int(table['violations'].sum())} violations"
    )
    return table
