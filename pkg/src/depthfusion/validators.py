# Custom Validators - Depth Fusion Application
# Validadores Customizados - Aplicação Depth Fusion

"""
Field validators for run configurations and the run registry models.

Each validator raises ``django.core.exceptions.ValidationError`` with a
``code``; the config loader gathers the messages of every failing field
and reports them together.

Validadores de campos para configurações de execução e modelos do
registro de execuções.

Examples:
    Range check:
        validate_lr = RangeValidator(min_value=0.0, inclusive_min=False)
        validate_lr(1e-4)

    Model field:
        seed = models.BigIntegerField(validators=[validate_seed])
"""

from collections.abc import Iterable, Sequence

from django.core.exceptions import ValidationError
from django.utils.deconstruct import deconstructible
from django.utils.translation import gettext_lazy as _

# Numeric Validators / Validadores Numéricos


@deconstructible
class RangeValidator:
    """
    Validates that a number lies in a (possibly open) interval.
    Valida que um número está em um intervalo (possivelmente aberto).

    Usage:
        RangeValidator(min_value=0.0, max_value=1.0)(0.5)
    """

    def __init__(
        self,
        min_value=None,
        max_value=None,
        inclusive_min=True,
        inclusive_max=True,
    ):
        self.min_value = min_value
        self.max_value = max_value
        self.inclusive_min = inclusive_min
        self.inclusive_max = inclusive_max

    def __eq__(self, other):
        return isinstance(other, RangeValidator) and (
            self.min_value,
            self.max_value,
            self.inclusive_min,
            self.inclusive_max,
        ) == (other.min_value, other.max_value, other.inclusive_min, other.inclusive_max)

    def __call__(self, value):
        if isinstance(value, bool) or not isinstance(value, int | float):
            raise ValidationError(
                _("Expected a number, got %(value)r."),
                code="not_a_number",
                params={"value": value},
            )
        if value != value or value in (float("inf"), float("-inf")):
            raise ValidationError(_("Value must be finite."), code="not_finite")
        if self.min_value is not None:
            below = value < self.min_value if self.inclusive_min else value <= self.min_value
            if below:
                bound = ">=" if self.inclusive_min else ">"
                raise ValidationError(
                    _("Must be %(bound)s %(limit)s, got %(value)s."),
                    code="below_minimum",
                    params={"bound": bound, "limit": self.min_value, "value": value},
                )
        if self.max_value is not None:
            above = value > self.max_value if self.inclusive_max else value >= self.max_value
            if above:
                bound = "<=" if self.inclusive_max else "<"
                raise ValidationError(
                    _("Must be %(bound)s %(limit)s, got %(value)s."),
                    code="above_maximum",
                    params={"bound": bound, "limit": self.max_value, "value": value},
                )


class ChoiceValidator:
    """
    Validates that a value is one of a fixed set of names.
    Valida que um valor pertence a um conjunto fixo de nomes.
    """

    def __init__(self, choices: Sequence[object]):
        self.choices = tuple(choices)

    def __call__(self, value):
        if value not in self.choices:
            raise ValidationError(
                _("Unknown value %(value)r, expected one of %(choices)s."),
                code="invalid_choice",
                params={"value": value, "choices": ", ".join(str(c) for c in self.choices)},
            )


def validate_multiple_of(factor):
    """
    Factory for validators requiring a positive multiple of ``factor``.
    Fábrica de validadores que exigem um múltiplo positivo de ``factor``.

    Usage:
        validate_multiple_of(4)(32)
    """

    def validator(value):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError(_("Expected an integer."), code="not_an_integer")
        if value <= 0 or value % factor:
            raise ValidationError(
                _("Must be a positive multiple of %(factor)s, got %(value)s."),
                code="not_multiple",
                params={"factor": factor, "value": value},
            )

    return validator


def validate_positive_int(value):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(_("Expected an integer."), code="not_an_integer")
    if value < 1:
        raise ValidationError(
            _("Must be at least 1, got %(value)s."), code="not_positive", params={"value": value}
        )


def validate_seed(value):
    """
    Seeds must be non-negative integers (numpy SeedSequence entropy).
    Sementes devem ser inteiros não negativos.
    """
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(_("Seed must be an integer."), code="invalid_seed")
    if value < 0:
        raise ValidationError(
            _("Seed must be non-negative, got %(value)s."),
            code="invalid_seed",
            params={"value": value},
        )


# Sequence Validators / Validadores de Sequência


def validate_noise_levels(values: Iterable[float]):
    """
    A noise axis: non-empty, finite and non-negative.
    Um eixo de ruído: não vazio, finito e não negativo.
    """
    values = list(values)
    if not values:
        raise ValidationError(_("Noise grid axis must not be empty."), code="empty_grid")
    check = RangeValidator(min_value=0.0)
    for value in values:
        check(value)


def validate_seed_list(values: Iterable[int]):
    values = list(values)
    if not values:
        raise ValidationError(_("At least one seed is required."), code="empty_seeds")
    for value in values:
        validate_seed(value)
    if len(set(values)) != len(values):
        raise ValidationError(_("Seeds must be distinct."), code="duplicate_seeds")


def validation_messages(error: ValidationError) -> list[str]:
    """Flatten a ValidationError into plain strings."""
    return [str(message) for message in error.messages]
