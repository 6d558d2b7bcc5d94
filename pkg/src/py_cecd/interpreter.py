"""
参考解释器

作为语义保持、安全性和条件求值次数的判定依据。每次 run 拥有独立的可变状态，
Program 只读共享，因此不同的 run 可以并行执行。
"""

from __future__ import annotations

import enum
import logging
import operator
import random
from collections import Counter
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Optional

from py_cecd.ir import (
    Assign,
    Binary,
    BinaryOp,
    BlockId,
    Branch,
    Expr,
    Goto,
    Input,
    Lit,
    Print,
    Program,
    Unary,
    UnaryOp,
    Var,
)
from py_cecd.settings import get_setting

logger = logging.getLogger(__name__)


class Outcome(enum.Enum):
    COMPLETED = 'completed'
    FUEL_EXHAUSTED = 'fuel_exhausted'
    RUNTIME_ERROR = 'runtime_error'


class ErrorKind(enum.Enum):
    UNDEFINED_VARIABLE = 'undefined_variable'
    INPUT_EXHAUSTED = 'input_exhausted'


@dataclass
class Trace:
    """
    一次执行的可观察结果。

    outputs 只会在执行过程中追加；outcome 在执行结束时设置且只设置一次。
    """

    outputs: list[int] = field(default_factory=list)
    outcome: Optional[Outcome] = None
    error: Optional[ErrorKind] = None
    message: str = ''

    def finish(self, outcome: Outcome, error: Optional[ErrorKind] = None, message: str = ''):
        if self.outcome is not None:
            raise RuntimeError(f'trace already finished with {self.outcome.value}')
        self.outcome = outcome
        self.error = error
        self.message = message

    @property
    def completed(self) -> bool:
        return self.outcome is Outcome.COMPLETED

    @property
    def fuel_exhausted(self) -> bool:
        return self.outcome is Outcome.FUEL_EXHAUSTED


@dataclass
class ExecStats:
    steps: int = 0
    cond_evals: Counter[Expr] = field(default_factory=Counter)
    blocks_visited: list[BlockId] = field(default_factory=list)

    def evals_of(self, cond: Expr) -> int:
        """条件 cond 作为分支条件被求值的次数。"""
        return self.cond_evals.get(cond, 0)

    @property
    def branches_executed(self) -> int:
        return sum(self.cond_evals.values())


class _Fault(Exception):
    def __init__(self, kind: ErrorKind, message: str):
        super().__init__(message)
        self.kind = kind


def _truth(value: bool) -> int:
    return 1 if value else 0


_BINARY: dict[BinaryOp, Callable[[int, int], int]] = {
    BinaryOp.ADD: operator.add,
    BinaryOp.SUB: operator.sub,
    BinaryOp.MUL: operator.mul,
    BinaryOp.EQ: lambda a, b: _truth(a == b),
    BinaryOp.NE: lambda a, b: _truth(a != b),
    BinaryOp.LT: lambda a, b: _truth(a < b),
    BinaryOp.LE: lambda a, b: _truth(a <= b),
    BinaryOp.GT: lambda a, b: _truth(a > b),
    BinaryOp.GE: lambda a, b: _truth(a >= b),
    # 两侧都已求值，不短路
    BinaryOp.AND: lambda a, b: _truth(a != 0 and b != 0),
    BinaryOp.OR: lambda a, b: _truth(a != 0 or b != 0),
}


def evaluate(e: Expr, state: Mapping[str, int]) -> int:
    """
    在给定变量状态下求值表达式。

    Args:
        e: 表达式
        state: 变量名到整数值的映射

    Returns:
        整数结果，比较与逻辑运算得到 0 或 1
    """
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, Var):
        try:
            return state[e.name]
        except KeyError:
            raise _Fault(ErrorKind.UNDEFINED_VARIABLE, f'read of undefined variable {e.name!r}')
    if isinstance(e, Unary):
        value = evaluate(e.operand, state)
        if e.op is UnaryOp.NEG:
            return -value
        return _truth(value == 0)
    if isinstance(e, Binary):
        left = evaluate(e.left, state)
        right = evaluate(e.right, state)
        return _BINARY[e.op](left, right)
    raise TypeError(f'unsupported expression {e!r}')


def run(
    p: Program,
    inputs: Sequence[int],
    fuel: Optional[int] = None,
    *,
    env: Optional[Mapping[str, int]] = None,
) -> tuple[Trace, ExecStats]:
    """
    从入口开始执行程序。

    每条指令和每个终结指令各消耗一步燃料，步数达到 fuel 时以 FUEL_EXHAUSTED 结束。

    Args:
        p: 程序
        inputs: Input 指令依次读取的输入
        fuel: 步数上限，默认取 Setting.fuel
        env: 可选的初始变量绑定

    Returns:
        (Trace, ExecStats)
    """
    fuel = get_setting().fuel if fuel is None else fuel
    if fuel < 1:
        raise ValueError(f'fuel must be positive, got {fuel}')

    trace = Trace()
    stats = ExecStats()
    state: dict[str, int] = dict(env or {})
    pending = iter(inputs)
    block_id = p.entry

    try:
        while True:
            block = p.block(block_id)
            stats.blocks_visited.append(block_id)
            for instr in block.instrs:
                if stats.steps >= fuel:
                    trace.finish(Outcome.FUEL_EXHAUSTED)
                    return trace, stats
                stats.steps += 1
                if isinstance(instr, Assign):
                    state[instr.target] = evaluate(instr.value, state)
                elif isinstance(instr, Input):
                    value = next(pending, None)
                    if value is None:
                        raise _Fault(ErrorKind.INPUT_EXHAUSTED, f'no input left for {instr.target!r}')
                    state[instr.target] = value
                elif isinstance(instr, Print):
                    trace.outputs.append(evaluate(instr.value, state))

            if stats.steps >= fuel:
                trace.finish(Outcome.FUEL_EXHAUSTED)
                return trace, stats
            stats.steps += 1
            term = block.term
            if isinstance(term, Goto):
                block_id = term.target
            elif isinstance(term, Branch):
                taken = evaluate(term.cond, state) != 0
                stats.cond_evals[term.cond] += 1
                block_id = term.on_true if taken else term.on_false
            else:
                trace.finish(Outcome.COMPLETED)
                return trace, stats
    except _Fault as fault:
        logger.debug(f'执行在 {block_id} 出错：{fault}')
        trace.finish(Outcome.RUNTIME_ERROR, fault.kind, str(fault))
        return trace, stats


def _is_prefix(short: Sequence[int], long: Sequence[int]) -> bool:
    return len(short) <= len(long) and list(long[: len(short)]) == list(short)


def equivalent(
    p1: Program,
    p2: Program,
    inputs: Sequence[int],
    fuel: Optional[int] = None,
    *,
    env: Optional[Mapping[str, int]] = None,
) -> bool:
    """
    比较两个程序在同一输入下的可观察行为。

    一般要求输出和结局完全一致；p1 燃料耗尽时只要求 p1 的输出是 p2 输出的前缀，
    两者都耗尽时要求较短的输出是较长输出的前缀。

    Args:
        p1: 原程序
        p2: 变换后的程序
        inputs: 输入向量
        fuel: 步数上限
        env: 两次执行共用的初始变量绑定

    Returns:
        行为一致时返回 True
    """
    t1, _ = run(p1, inputs, fuel, env=env)
    t2, _ = run(p2, inputs, fuel, env=env)
    if t1.fuel_exhausted and t2.fuel_exhausted:
        if len(t1.outputs) <= len(t2.outputs):
            return _is_prefix(t1.outputs, t2.outputs)
        return _is_prefix(t2.outputs, t1.outputs)
    if t1.fuel_exhausted:
        return _is_prefix(t1.outputs, t2.outputs)
    return t1.outputs == t2.outputs and t1.outcome == t2.outcome and t1.error == t2.error


def input_vectors(p: Program, count: int, seed: Optional[int] = None) -> list[tuple[list[int], dict[str, int]]]:
    """
    生成可复现的随机输入。

    每组包含一个输入向量（长度为 Input 指令数加 Setting.extra_inputs）和一个
    为程序全部变量赋初值的初始绑定，取值范围为 [input_low, input_high]。

    Args:
        p: 程序
        count: 生成的组数
        seed: 随机种子，默认取 Setting.verify_seed

    Returns:
        (inputs, env) 列表
    """
    setting = get_setting()
    rng = random.Random(setting.verify_seed if seed is None else seed)
    length = p.input_count() + setting.extra_inputs
    names = sorted(p.variables())
    low, high = setting.input_low, setting.input_high
    vectors = []
    for _ in range(count):
        inputs = [rng.randint(low, high) for _ in range(length)]
        env = {name: rng.randint(low, high) for name in names}
        vectors.append((inputs, env))
    return vectors
