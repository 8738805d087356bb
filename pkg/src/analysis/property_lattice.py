"""
Relations between operator moduli.

    cocoercive C            -> Lipschitz L = 1/C
    strongly monotone mu    -> inverse Lipschitz R = 1/mu
    (mu, L)                 -> cocoercive C = mu / L^2
    (C, R)                  -> strongly monotone mu = C / R^2
    convex gradient, L      -> cocoercive C = 1/L           (Baillon-Haddad)
    convex gradient, R      -> strongly monotone mu = 1/R

The last two hold only for gradients of convex functions and need the
`convex_gradient` flag.
"""
from dataclasses import dataclass, field
import logging
from typing import Callable, Dict, Iterable, Mapping, Optional, Tuple

from src.utils.errors import DerivationError

logger = logging.getLogger(__name__)

QUANTITIES = ("cocoercive", "strong_monotone", "lipschitz", "inv_lipschitz")


@dataclass(frozen=True)
class Rule:
    name: str
    needs: Tuple[str, ...]
    gives: str
    formula: Callable[..., float]
    convex_only: bool = False


RULES: Tuple[Rule, ...] = (
    Rule("lipschitz_from_cocoercive", ("cocoercive",), "lipschitz", lambda C: 1.0 / C),
    Rule("inv_lipschitz_from_strong_monotone", ("strong_monotone",), "inv_lipschitz", lambda mu: 1.0 / mu),
    Rule("cocoercive_from_strong_monotone_lipschitz", ("strong_monotone", "lipschitz"), "cocoercive",
         lambda mu, L: mu / L ** 2),
    Rule("strong_monotone_from_cocoercive_inv_lipschitz", ("cocoercive", "inv_lipschitz"), "strong_monotone",
         lambda C, R: C / R ** 2),
    Rule("cocoercive_from_convex_lipschitz", ("lipschitz",), "cocoercive", lambda L: 1.0 / L, convex_only=True),
    Rule("strong_monotone_from_convex_inv_lipschitz", ("inv_lipschitz",), "strong_monotone",
         lambda R: 1.0 / R, convex_only=True),
)
RULES_BY_NAME: Dict[str, Rule] = {rule.name: rule for rule in RULES}


@dataclass
class DerivedModuli:
    """Known and derived moduli, with the rule that produced each derived one."""

    values: Dict[str, float]
    sources: Dict[str, str] = field(default_factory=dict)

    def __getitem__(self, key: str) -> float:
        return self.values[key]

    def get(self, key: str, default: Optional[float] = None) -> Optional[float]:
        return self.values.get(key, default)


def _check_inputs(relations: Mapping[str, float]) -> Dict[str, float]:
    values = {}
    for key, value in relations.items():
        if key not in QUANTITIES:
            raise DerivationError(f"Unknown modulus {key!r}; expected one of {QUANTITIES}")
        if value is None:
            continue
        if not value > 0:
            raise DerivationError(f"Modulus {key} must be positive, got {value}")
        values[key] = float(value)
    return values


def apply_rule(name: str, relations: Mapping[str, float], convex_gradient: bool = False) -> float:
    """
    Apply one named relation.

    Raises:
        DerivationError: for an unknown rule, missing inputs, or a convexity-only
            rule requested without `convex_gradient`
    """
    if name not in RULES_BY_NAME:
        raise DerivationError(f"Unknown relation {name!r}")
    rule = RULES_BY_NAME[name]
    if rule.convex_only and not convex_gradient:
        logger.error(f"Relation {name} requires the operator to be the gradient of a convex function")
        raise DerivationError(f"Relation {name} holds only for gradients of convex functions")
    values = _check_inputs(relations)
    missing = [key for key in rule.needs if key not in values]
    if missing:
        raise DerivationError(f"Relation {name} needs {missing}")
    return rule.formula(*(values[key] for key in rule.needs))


def derive_constants(relations: Mapping[str, float], convex_gradient: bool = False,
                     rules: Optional[Iterable[str]] = None) -> DerivedModuli:
    """
    Derive every modulus reachable from `relations`.

    Args:
        relations: Known moduli keyed by QUANTITIES
        convex_gradient: The operator is the gradient of a convex function
        rules: Apply exactly these rules (in order) instead of closing over all
            applicable ones

    Returns:
        DerivedModuli; given values are never overwritten
    """
    derived = DerivedModuli(_check_inputs(relations))

    if rules is not None:
        for name in rules:
            rule = RULES_BY_NAME.get(name)
            value = apply_rule(name, derived.values, convex_gradient)
            if rule.gives not in derived.values:
                derived.values[rule.gives] = value
                derived.sources[rule.gives] = name
        return derived

    changed = True
    while changed:
        changed = False
        for rule in RULES:
            if rule.convex_only and not convex_gradient:
                continue
            if rule.gives in derived.values or any(key not in derived.values for key in rule.needs):
                continue
            derived.values[rule.gives] = rule.formula(*(derived.values[key] for key in rule.needs))
            derived.sources[rule.gives] = rule.name
            changed = True
    logger.debug(f"Derived moduli: {derived.values}")
    return derived
