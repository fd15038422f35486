"""JSON shapes for matrices, words and job contexts."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .elemword import ElemWord, word_from_json, word_to_json
from .formparam import FormParam, form_param_from_spec
from .poly import PolyRing
from .quadgroup import QuadMatrix, matrix
from .ring import RingCtx, make_ring


@dataclass(frozen=True)
class Context:
    """A form ring plus a rank, as named in configs and files."""

    ring: RingCtx
    param: FormParam
    n: int
    ring_spec: str
    lambda_spec: str

    def poly(self) -> PolyRing:
        return PolyRing(self.ring)

    def header(self) -> dict:
        R = self.ring
        return {"ring": self.ring_spec, "lambda": R.label(R.lam),
                "Lambda": self.param.labels, "n": self.n}


def make_context(ring_spec: str, lambda_spec: str = "max", n: int = 2, lam=None) -> Context:
    R = make_ring(ring_spec)
    if lam is not None:
        R = R.with_lambda(R.element(lam))
    return Context(R, form_param_from_spec(R, lambda_spec), int(n), ring_spec, lambda_spec)


def _param_from_header(R: RingCtx, value) -> FormParam:
    if isinstance(value, list):
        from .formparam import form_param_closure
        param = form_param_closure(R, [R.element(x) for x in value])
        if sorted(param.elements) != sorted(R.element(x) for x in value):
            raise ValueError("Lambda list is not a form parameter")
        return param
    return form_param_from_spec(R, value)


def matrix_to_json(M: QuadMatrix, ring_spec: str | None = None) -> dict:
    A = M.algebra
    R = A.base if isinstance(A, PolyRing) else A
    return {"ring": ring_spec or R.description, "lambda": R.label(R.lam),
            "Lambda": M.param.labels, "n": M.n, "rows": M.labels()}


def matrix_from_json(data: dict, polynomial: bool = False) -> QuadMatrix:
    R = make_ring(data["ring"])
    R = R.with_lambda(R.element(data["lambda"]))
    param = _param_from_header(R, data["Lambda"])
    n = int(data["n"])
    if polynomial:
        P = PolyRing(R)
        rows = [[P.from_json(x) for x in row] for row in data["rows"]]
        return matrix(n, P, param, rows)
    return matrix(n, R, param, [[R.element(x) for x in row] for row in data["rows"]])


def word_file(w: ElemWord, ring_spec: str) -> dict:
    A = w.algebra
    R = A.base if isinstance(A, PolyRing) else A
    return {"ring": ring_spec, "lambda": R.label(R.lam), "Lambda": w.param.labels,
            "n": w.n, "polynomial": isinstance(A, PolyRing), "word": word_to_json(w)}


def read_word_file(path, ctx: Context | None = None) -> ElemWord:
    data = json.loads(Path(path).read_text())
    if ctx is None:
        R = make_ring(data["ring"])
        R = R.with_lambda(R.element(data["lambda"]))
        param = _param_from_header(R, data["Lambda"])
        n = int(data["n"])
    else:
        R, param, n = ctx.ring, ctx.param, ctx.n
    A = PolyRing(R) if data.get("polynomial", True) else R
    return word_from_json(data["word"], A, param, n)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
