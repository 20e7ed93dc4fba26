"""Compile expressions into flat stack programs for the integration kernels.

Each instruction is an (opcode, argument) pair. The kernels evaluate programs
over dual numbers (value, d/dx, d/dy) so Jacobians come for free.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..expr import Add, Const, Div, Exp, Expr, Mul, Neg, Pow, Var

CONST, VAR, ADD, SUB, MUL, DIV, NEG, POWI, EXP = range(9)
VAR_INDEX = {"x": 0, "y": 1, "eps": 2}
MAX_STACK = 64


@dataclass(frozen=True)
class Program:
    ops: np.ndarray
    args: np.ndarray
    depth: int


class ProgramBuilder:
    """Shares one constant pool between several programs."""

    def __init__(self):
        self.consts = []
        self._index = {}

    def const(self, value: float) -> int:
        key = float(value)
        if key not in self._index:
            self._index[key] = len(self.consts)
            self.consts.append(key)
        return self._index[key]

    def compile(self, e: Expr) -> Program:
        ops, args = [], []
        depth = [0, 0]

        def push(op, arg=0, delta=0):
            ops.append(op)
            args.append(arg)
            depth[0] += delta
            depth[1] = max(depth[1], depth[0])

        def emit(node):
            if isinstance(node, Const):
                push(CONST, self.const(node.value), 1)
            elif isinstance(node, Var):
                if node.name not in VAR_INDEX:
                    raise ValueError(f"variable {node.name!r} cannot appear in a simulated field")
                push(VAR, VAR_INDEX[node.name], 1)
            elif isinstance(node, Add):
                emit(node.terms[0])
                for t in node.terms[1:]:
                    if isinstance(t, Neg):
                        emit(t.arg)
                        push(SUB, 0, -1)
                    else:
                        emit(t)
                        push(ADD, 0, -1)
            elif isinstance(node, Mul):
                emit(node.factors[0])
                for f in node.factors[1:]:
                    emit(f)
                    push(MUL, 0, -1)
            elif isinstance(node, Div):
                emit(node.num)
                emit(node.den)
                push(DIV, 0, -1)
            elif isinstance(node, Neg):
                emit(node.arg)
                push(NEG)
            elif isinstance(node, Pow):
                emit(node.base)
                push(POWI, node.exponent)
            elif isinstance(node, Exp):
                emit(node.arg)
                push(EXP)
            else:
                raise TypeError(f"unknown node {node!r}")

        emit(e)
        if depth[1] > MAX_STACK:
            raise ValueError(f"expression needs a stack of depth {depth[1]} > {MAX_STACK}")
        return Program(np.array(ops, dtype=np.int32), np.array(args, dtype=np.int32), depth[1])

    def constants(self) -> np.ndarray:
        return np.array(self.consts if self.consts else [0.0], dtype=np.float64)


def evaluate_program(prog: Program, consts, x, y, eps):
    """Reference evaluator returning (value, d/dx, d/dy)."""
    from .._core_py import eval_program
    return eval_program(prog.ops, prog.args, consts, x, y, eps)
