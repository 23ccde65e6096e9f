"""
JSON documents for scoring rules

Tabular tables are flattened row-major: index = signal * 2^n + outcome,
signals in base 3 (⊥=0, 0=1, 1=2) and outcomes in base 2, task 0 the
most significant digit in both.
"""

import numpy as np

from ..utils.errors import ValidationError
from .rules import SingleTaskRule, TabularRule, ThresholdRule, TruncatedSeparateRule

TABLE_RADIX = "index = signal*2^n + outcome; signal base 3 (bot=0, 0=1, 1=2), outcome base 2; task 0 most significant"


def _single_doc(rule: SingleTaskRule):
    return {
        'task': rule.task,
        'score_bot': rule.score_bot,
        'score_correct': rule.score_correct,
        'score_wrong': rule.score_wrong,
    }


def rule_to_document(rule) -> dict:
    if isinstance(rule, SingleTaskRule):
        return {'kind': rule.kind, **_single_doc(rule)}
    if isinstance(rule, TruncatedSeparateRule):
        return {
            'kind': rule.kind,
            'shift': rule.shift,
            'cap': rule.cap,
            'scale': rule.scale,
            'per_task': [_single_doc(r) for r in rule.per_task],
        }
    if isinstance(rule, ThresholdRule):
        return {
            'kind': rule.kind,
            'threshold': rule.threshold,
            'cap': rule.cap,
            'recommendation': sorted(rule.recommendation),
        }
    if isinstance(rule, TabularRule):
        return {
            'kind': rule.kind,
            'n': rule.n,
            'cap': rule.cap,
            'radix': TABLE_RADIX,
            'table': [float(x) for x in rule.table.ravel()],
        }
    raise TypeError(f"cannot serialize {type(rule).__name__}")


def _single_from(doc) -> SingleTaskRule:
    try:
        return SingleTaskRule(
            task=int(doc['task']),
            score_bot=float(doc['score_bot']),
            score_correct=float(doc['score_correct']),
            score_wrong=float(doc.get('score_wrong', 0.0)),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"bad single-task rule: {e}") from e


def rule_from_document(doc) -> object:
    if not isinstance(doc, dict):
        raise ValidationError("rule document must be a JSON object")
    kind = doc.get('kind')
    try:
        if kind == SingleTaskRule.kind:
            return _single_from(doc)
        if kind == TruncatedSeparateRule.kind:
            return TruncatedSeparateRule(
                per_task=tuple(_single_from(d) for d in doc['per_task']),
                shift=float(doc['shift']),
                cap=float(doc['cap']),
                scale=float(doc.get('scale', 1.0)),
            )
        if kind == ThresholdRule.kind:
            return ThresholdRule(
                recommendation=frozenset(int(i) for i in doc['recommendation']),
                threshold=doc.get('threshold', 1),
                cap=float(doc.get('cap', 1.0)),
            )
        if kind == TabularRule.kind:
            n = int(doc['n'])
            table = np.asarray(doc['table'], dtype=float).reshape(3 ** n, 2 ** n)
            return TabularRule(n, table, cap=float(doc.get('cap', 1.0)))
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError(f"bad {kind} rule document: {e}") from e
    raise ValidationError(f"unknown rule kind {kind!r}")
