"""JSON schemas of the reports written by the command line front end.

Numbers that are undefined (for example a slope over fewer than two usable
points) are written as ``null``.
"""

_num = {"type": ["number", "null"]}
_int = {"type": "integer"}


def _object(props, extra=False):
    return {"type": "object", "properties": props, "required": sorted(props), "additionalProperties": extra}


CHECK = _object(
    {
        "h_at_1": _num,
        "hp_at_1": _num,
        "hpp_at_1": _num,
        "flap_h_at_1": _num,
        "flap_hp_at_1": _num,
        "k_at_1": _num,
        "kp_at_1": _num,
        "flap_k_at_1": _num,
        "q_of_h": _num,
        "nondeg_value": _num,
        "cond_value": _num,
        "h1_satisfied": {"type": "boolean"},
        "nondeg_satisfied": {"type": "boolean"},
        "cond_satisfied": {"type": "boolean"},
        "failed": {"type": "array", "items": {"enum": ["h1", "nondeg", "cond"]}},
    }
)

_matrix = {"type": "array", "items": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}, "minItems": 2, "maxItems": 2}

REDUCE = _object(
    {
        "A": _matrix,
        "B": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
        "det_A": _num,
        "cond_value": _num,
        "d0": _num,
        "s0": _num,
        "branch": {"enum": ["positive-eps", "negative-eps", None]},
    }
)

SCAN = _object(
    {
        "eta": _num,
        "eps": _num,
        "tau": _num,
        "n_points": _int,
        "slopes": _object({"norm_W_L2": _num, "norm_E_L32": _num, "norm_phi": _num}),
    }
)

TRACE = _object(
    {
        "rate_d": _num,
        "rate_s": _num,
        "d0": _num,
        "s0": _num,
        "branch": {"enum": ["positive-eps", "negative-eps", None]},
        "max_u_loglog_slope": _num,
        "n_records": _int,
        "bisected_steps": _int,
    }
)

ERROR = _object({"error": {"type": "string"}, "message": {"type": "string"}, "context": {"type": "object"}})

SCHEMAS = {"check": CHECK, "reduce": REDUCE, "scan": SCAN, "trace": TRACE, "error": ERROR}
