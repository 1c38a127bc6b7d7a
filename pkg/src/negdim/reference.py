"""Published closed forms used as fixed reference data by the verification
suites (transcribed, not computed here)."""

from __future__ import annotations

from gmpy2 import mpq

from .exact import SparsePoly

_EG = ("E", "g")


def _gens(vs):
    return [SparsePoly.gen(v, vs) for v in vs]


def quartic_tilde_reference() -> dict:
    """R~_0 .. R~_3 for V = r^2/2 + g r^4, keyed by two_j."""
    E, g = _gens(_EG)
    return {
        0: -E,
        1: (E ** 2 - 1) * mpq(-1, 2),
        2: E * (E ** 2 - 4) * mpq(-1, 4) + g * 4,
        3: (E ** 2 - 9) * (E ** 2 - 1) * mpq(-1, 8) + g * E * 12,
    }


def quartic_prime_reference() -> dict:
    """R~'_{2j} = R~_{2j}(E, g) - R~_{2j}(E, 0) for 2j = 1..7."""
    E, g = _gens(_EG)
    return {
        1: SparsePoly(_EG, {}),
        2: g * 4,
        3: E * g * 12,
        4: (E ** 2 * 7 - 16) * g * 3,
        5: (E ** 3 * 7 - E * 55 - g * 200) * g * 4,
        6: (E ** 4 * 7 - E ** 2 * 124 + 192 - E * g * 1000) * g * mpq(9, 2),
        7: (E ** 5 * 7 - E ** 3 * 230 + E * 1183 - E ** 2 * g * 3056 + g * 10976) * g * mpq(9, 2),
    }


def generic_det_reference() -> dict:
    """det C^(2j) for generic w_1..w_4, 2j = 0..4, in variables (E, w1..w4)."""
    vs = ("E", "w1", "w2", "w3", "w4")
    E, w1, w2, w3, w4 = _gens(vs)
    return {
        0: -E,
        1: E ** 2 - w1,
        2: -E ** 3 + w2 * 4 + E * w1 * 4,
        3: E ** 4 - E ** 2 * w1 * 10 + w1 ** 2 * 9 - w2 * E * 24 - w3 * 36,
        4: (-E ** 5 + E ** 3 * w1 * 20 - E * w1 ** 2 * 64 + w2 * E ** 2 * 84
            - w1 * w2 * 192 + E * w3 * 288 + w4 * 576),
    }


# Ground-state series at D = -4 as printed, orders 0..7.
GROUND_STATE_M4_PRINTED = [mpq(-2), mpq(2), mpq(3), mpq(8), mpq(105, 4), mpq(96),
                           mpq(3003, 16), mpq(1536)]
