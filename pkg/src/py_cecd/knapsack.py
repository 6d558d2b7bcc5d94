"""
0-1 背包归约

把背包实例构造成控制流图：入口 bb_s 以 e 分支，两条边都指向二叉树的根 bb_r；
树的内部节点以互不相同的新条件分支，第 i 个叶子 bb_l{i} 含 w_i 条填充指令，
所有叶子汇合到再次以 e 分支的 bb_e，最后到出口 bb_x。剖析数据给叶子 i 频率 v_i。
在 k = W 时，剖析选择的最优值等于背包最优值。
"""

from __future__ import annotations

import itertools
import logging
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveInt

from py_cecd.exceptions import InstanceTooLargeError
from py_cecd.heuristic import ProfileData
from py_cecd.ir import (
    Assign,
    BasicBlock,
    Binary,
    BinaryOp,
    BlockId,
    Branch,
    Exit,
    Expr,
    Goto,
    Input,
    Instruction,
    Lit,
    Program,
    Var,
)
from py_cecd.settings import get_setting

logger = logging.getLogger(__name__)

ENTRY = 'bb_s'
ROOT = 'bb_r'
JOIN = 'bb_e'
EXIT = 'bb_x'
FLAG = 'flag'


class KnapsackInstance(BaseModel):
    """背包实例：物品 (重量, 价值) 列表与容量 W。"""

    model_config = ConfigDict(frozen=True)

    items: tuple[tuple[PositiveInt, PositiveInt], ...] = Field(min_length=1)
    budget: NonNegativeInt

    @classmethod
    def parse(cls, items: str, budget: int) -> KnapsackInstance:
        """
        解析命令行编码 "w:v,w:v,..."。

        Args:
            items: 物品列表文本
            budget: 容量 W

        Returns:
            KnapsackInstance

        Raises:
            ValueError: 格式错误或数值不合法
        """
        pairs = []
        for chunk in items.split(','):
            chunk = chunk.strip()
            if not chunk:
                continue
            weight, sep, value = chunk.partition(':')
            if not sep:
                raise ValueError(f'item {chunk!r} is not of the form weight:value')
            pairs.append((int(weight), int(value)))
        return cls(items=tuple(pairs), budget=budget)

    @property
    def weights(self) -> list[int]:
        return [weight for weight, _ in self.items]

    @property
    def values(self) -> list[int]:
        return [value for _, value in self.items]


def knapsack_condition() -> Expr:
    """归约图中被消除的条件 e：flag > 0。"""
    return Binary(BinaryOp.GT, Var(FLAG), Lit(0))


def leaf_id(index: int) -> BlockId:
    """第 index 个物品（从 1 开始）对应的叶子。"""
    return f'bb_l{index}'


def build_knapsack_cfg(inst: KnapsackInstance) -> tuple[Program, ProfileData, Expr]:
    """
    构造背包归约的控制流图。

    Args:
        inst: 背包实例

    Returns:
        (程序, 剖析数据, 条件 e)
    """
    e = knapsack_condition()
    selectors: list[str] = []
    tree: list[BasicBlock] = []
    counter = itertools.count(1)

    def build(lo: int, hi: int, name: Optional[BlockId] = None) -> BlockId:
        # 物品下标区间 [lo, hi)，只有一个物品时就是叶子本身
        if hi - lo == 1:
            return leaf_id(lo + 1)
        block_id = name or f'bb_n{next(counter)}'
        selector = f's{len(selectors) + 1}'
        selectors.append(selector)
        position = len(tree)
        tree.append(BasicBlock(block_id))
        mid = (lo + hi + 1) // 2
        left = build(lo, mid)
        right = build(mid, hi)
        tree[position] = BasicBlock(block_id, (), Branch(Binary(BinaryOp.GT, Var(selector), Lit(0)), left, right))
        return block_id

    root = build(0, len(inst.items), ROOT)

    entry_instrs: list[Instruction] = [Input(FLAG)]
    entry_instrs.extend(Input(selector) for selector in selectors)
    blocks = [BasicBlock(ENTRY, tuple(entry_instrs), Branch(e, root, root))]
    blocks.extend(tree)
    for index, weight in enumerate(inst.weights, start=1):
        filler = tuple(Assign(f'f{index}_{j}', Lit(j)) for j in range(1, weight + 1))
        blocks.append(BasicBlock(leaf_id(index), filler, Goto(JOIN)))
    blocks.append(BasicBlock(JOIN, (), Branch(e, EXIT, EXIT)))
    blocks.append(BasicBlock(EXIT, (), Exit()))

    profile = ProfileData(freq={leaf_id(index): value for index, value in enumerate(inst.values, start=1)})
    return Program(tuple(blocks), ENTRY), profile, e


def knapsack_brute_force(inst: KnapsackInstance, *, limit: Optional[int] = None) -> tuple[int, frozenset[int]]:
    """
    穷举求解 0-1 背包。

    Args:
        inst: 背包实例
        limit: 物品数上限，默认取 Setting.brute_force_limit

    Returns:
        (最优价值, 选中物品的下标集合，从 1 开始)

    Raises:
        InstanceTooLargeError: 物品数超过上限
    """
    limit = get_setting().brute_force_limit if limit is None else limit
    count = len(inst.items)
    if count > limit:
        raise InstanceTooLargeError(f'{count} items exceed the brute-force limit of {limit}')

    best_value = 0
    best: tuple[int, ...] = ()
    for size in range(count + 1):
        for chosen in itertools.combinations(range(count), size):
            weight = sum(inst.items[i][0] for i in chosen)
            if weight > inst.budget:
                continue
            value = sum(inst.items[i][1] for i in chosen)
            if value > best_value:
                best_value, best = value, chosen
    return best_value, frozenset(i + 1 for i in best)
