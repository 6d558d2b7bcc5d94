"""
数据流分析

针对一个条件表达式 e 计算局部属性，并求解任意路径（may）方程：

    Live_i  = Valid_i · Σ_{j∈pred(i)} (Expr_j + Live_j)
    Antic_i = Valid_i · (Expr_i + Σ_{j∈succ(i)} Antic_j)
    D_i     = Live_i · Antic_i

    Rt_i = D_i · Σ_{j∈pred(i)} (¬Expr_j · Rt_j + TrueEdge_ji)
    Rf_i = D_i · Σ_{j∈pred(i)} (¬Expr_j · Rf_j + FalseEdge_ji)
    Ru_i = D_i · Σ_{j∈pred(i)} ¬Expr_j · (¬D_j + Ru_j)

所有方程都从全 false 开始迭代到最小不动点。入口块永远不属于任何区域。
"""

from __future__ import annotations

import enum
import logging
from collections import deque
from collections.abc import Callable, Collection, Iterable, Mapping
from dataclasses import dataclass, field, replace
from typing import Optional

import networkx as nx
from pydantic import BaseModel, TypeAdapter

from py_cecd.exceptions import InvalidRegionError
from py_cecd.ir import BlockId, Branch, Expr, Program, expr_eq, operands_of
from py_cecd.printer import print_expr
from py_cecd.settings import get_setting
from py_cecd.transform import Region, check_valid

logger = logging.getLogger(__name__)

Values = dict[BlockId, bool]
Transfer = Callable[[BlockId, Mapping[BlockId, bool]], bool]


class Direction(enum.Enum):
    FORWARD = 'forward'
    BACKWARD = 'backward'


class Strategy(enum.Enum):
    ROUND_ROBIN = 'round_robin'
    WORKLIST = 'worklist'


@dataclass(frozen=True)
class LocalProps:
    """针对条件 e 的局部属性。边以 (i, j) 表示 i→j。"""

    valid: Mapping[BlockId, bool]
    expr: Mapping[BlockId, bool]
    true_edges: frozenset[tuple[BlockId, BlockId]] = frozenset()
    false_edges: frozenset[tuple[BlockId, BlockId]] = frozenset()

    def true_edge(self, i: BlockId, j: BlockId) -> bool:
        return (i, j) in self.true_edges

    def false_edge(self, i: BlockId, j: BlockId) -> bool:
        return (i, j) in self.false_edges


class AnalysisRow(BaseModel):
    """analyze 命令输出的 JSON 表中的一行。"""

    block: str
    valid: bool
    expr: bool
    live: bool
    antic: bool
    d: bool
    rt: bool
    rf: bool
    ru: bool


_ROWS = TypeAdapter(list[AnalysisRow])


def _all_false(p: Program) -> Values:
    return dict.fromkeys(p.ids, False)


@dataclass(frozen=True)
class AnalysisResult:
    e: Expr
    locals: LocalProps
    order: tuple[BlockId, ...]
    live: Mapping[BlockId, bool]
    antic: Mapping[BlockId, bool]
    d: Mapping[BlockId, bool]
    rt: Mapping[BlockId, bool] = field(default_factory=dict)
    rf: Mapping[BlockId, bool] = field(default_factory=dict)
    ru: Mapping[BlockId, bool] = field(default_factory=dict)

    @staticmethod
    def _true_set(values: Mapping[BlockId, bool]) -> frozenset[BlockId]:
        return frozenset(block_id for block_id, value in values.items() if value)

    @property
    def region(self) -> frozenset[BlockId]:
        """D 中的基本块。"""
        return self._true_set(self.d)

    @property
    def rt_set(self) -> frozenset[BlockId]:
        return self._true_set(self.rt)

    @property
    def rf_set(self) -> frozenset[BlockId]:
        return self._true_set(self.rf)

    @property
    def ru_set(self) -> frozenset[BlockId]:
        return self._true_set(self.ru)

    def rows(self) -> list[AnalysisRow]:
        """按基本块顺序生成 JSON 表的行。"""
        return [
            AnalysisRow(
                block=block_id,
                valid=self.locals.valid[block_id],
                expr=self.locals.expr[block_id],
                live=self.live.get(block_id, False),
                antic=self.antic.get(block_id, False),
                d=self.d.get(block_id, False),
                rt=self.rt.get(block_id, False),
                rf=self.rf.get(block_id, False),
                ru=self.ru.get(block_id, False),
            )
            for block_id in self.order
        ]

    def to_json(self, indent: Optional[int] = 2) -> str:
        return _ROWS.dump_json(self.rows(), indent=indent).decode()


def compute_locals(p: Program, e: Expr) -> LocalProps:
    """
    计算局部属性。

    Valid_i：块 i 中没有 Assign / Input 写入 e 的操作数；
    TrueEdge_ij / FalseEdge_ij：块 i 以 e 为条件分支，且 j 位于 true / false 槽；
    Expr_i：块 i 存在 TrueEdge 或 FalseEdge 出边。

    Args:
        p: 程序
        e: 条件表达式

    Returns:
        LocalProps
    """
    operands = operands_of(e)
    valid = {}
    expr = {}
    true_edges = set()
    false_edges = set()
    for block in p.blocks:
        valid[block.id] = not block.assigns_any(operands)
        term = block.term
        if isinstance(term, Branch) and expr_eq(term.cond, e):
            true_edges.add((block.id, term.on_true))
            false_edges.add((block.id, term.on_false))
        expr[block.id] = isinstance(term, Branch) and expr_eq(term.cond, e)
    return LocalProps(valid, expr, frozenset(true_edges), frozenset(false_edges))


def solve_any_path(
    p: Program,
    transfer: Transfer,
    direction: Direction = Direction.FORWARD,
    *,
    strategy: Strategy = Strategy.ROUND_ROBIN,
    init: Optional[Mapping[BlockId, bool]] = None,
) -> Values:
    """
    在二值格上求解任意路径方程的最小不动点。

    transfer(i, values) 根据当前取值计算块 i 的新值，必须单调（邻居由 false 变 true
    不会使结果由 true 变 false）。前向方程读取前驱的值，后向方程读取后继的值。

    Args:
        p: 程序
        transfer: 每个块的传递函数
        direction: 求值方向，决定轮询顺序与工作表中受影响的邻居
        strategy: 轮询（round_robin）或工作表（worklist）
        init: 初始取值，默认全 false

    Returns:
        每个块的不动点取值，与迭代顺序无关
    """
    values: Values = _all_false(p)
    if init is not None:
        values.update({block_id: bool(value) for block_id, value in init.items() if block_id in values})

    order = p.ids if direction is Direction.FORWARD else list(reversed(p.ids))
    if strategy is Strategy.ROUND_ROBIN:
        rounds = 0
        changed = True
        while changed:
            changed = False
            rounds += 1
            for block_id in order:
                if not values[block_id] and transfer(block_id, values):
                    values[block_id] = True
                    changed = True
        logger.debug(f'轮询 {rounds} 轮后收敛')
        return values

    def dependents(block_id: BlockId) -> Iterable[BlockId]:
        if direction is Direction.FORWARD:
            return p.succ(block_id)
        return p.pred(block_id)

    worklist = deque(order)
    queued = set(order)
    while worklist:
        block_id = worklist.popleft()
        queued.discard(block_id)
        if values[block_id] or not transfer(block_id, values):
            continue
        values[block_id] = True
        for other in dependents(block_id):
            if other not in queued:
                worklist.append(other)
                queued.add(other)
    return values


def _region_valid(p: Program, props: LocalProps, within: Optional[Collection[BlockId]]) -> Values:
    allowed = None if within is None else frozenset(within)
    return {
        block_id: props.valid[block_id] and (allowed is None or block_id in allowed)
        for block_id in p.ids
    }


def compute_region(
    p: Program,
    e: Expr,
    *,
    strategy: Strategy = Strategy.ROUND_ROBIN,
    within: Optional[Collection[BlockId]] = None,
    props: Optional[LocalProps] = None,
) -> AnalysisResult:
    """
    计算 Live、Antic 和 D（由有用节点组成的最大有效区域）。

    Args:
        p: 程序
        e: 条件表达式
        strategy: 不动点迭代策略
        within: 只在这些块中寻找区域，用于计算某个子集的有用闭包
        props: 已经算好的局部属性，反复求闭包时复用

    Returns:
        填好 Live / Antic / D 的 AnalysisResult
    """
    if props is None:
        props = compute_locals(p, e)
    valid = _region_valid(p, props, within)

    def live_transfer(i: BlockId, live: Mapping[BlockId, bool]) -> bool:
        # 入口不属于任何区域，Live 恒为假
        return i != p.entry and valid[i] and any(props.expr[j] or live[j] for j in p.pred(i))

    def antic_transfer(i: BlockId, antic: Mapping[BlockId, bool]) -> bool:
        return valid[i] and (props.expr[i] or any(antic[j] for j in p.succ(i)))

    live = solve_any_path(p, live_transfer, Direction.FORWARD, strategy=strategy)
    antic = solve_any_path(p, antic_transfer, Direction.BACKWARD, strategy=strategy)
    d = {block_id: live[block_id] and antic[block_id] for block_id in p.ids}
    result = AnalysisResult(e, props, tuple(p.ids), live, antic, d)
    logger.debug(f'{print_expr(e)} 的区域：{sorted(result.region)}')
    return result


def compute_reachable_copies(
    p: Program,
    e: Expr,
    region: Optional[Collection[BlockId]] = None,
    *,
    guarded: Optional[bool] = None,
    strategy: Strategy = Strategy.ROUND_ROBIN,
    props: Optional[LocalProps] = None,
) -> AnalysisResult:
    """
    预测变换后哪些副本可达：Rt / Rf / Ru。

    guarded 为 True 时 Rt / Rf 的传播项只沿不计算 e 的前驱进行（与 Ru 一致）；
    为 False 时使用不带保护项的形式 Rt_i = D_i · Σ (Rt_j + TrueEdge_ji)，仅用于对比。

    Args:
        p: 程序
        e: 条件表达式
        region: 区域 D，默认取 compute_region 的结果
        guarded: 是否使用带保护项的方程，默认取 Setting.guarded_reachability
        strategy: 不动点迭代策略
        props: 已经算好的局部属性

    Returns:
        填好全部字段的 AnalysisResult，其中 d 为给定的区域

    Raises:
        InvalidRegionError: 区域给 e 的操作数赋值
        UnknownBlockError: 区域成员不在程序中
    """
    guarded = get_setting().guarded_reachability if guarded is None else guarded
    if region is None:
        base = compute_region(p, e, strategy=strategy, props=props)
        members = base.region
    else:
        members = frozenset(region)
        if not check_valid(p, Region(members, e)):
            raise InvalidRegionError(f'region assigns an operand of {print_expr(e)}')
        base = compute_region(p, e, strategy=strategy, within=members, props=props)

    props = base.locals
    d = {block_id: block_id in members for block_id in p.ids}

    def copy_transfer(edges: frozenset[tuple[BlockId, BlockId]]) -> Transfer:
        def transfer(i: BlockId, r: Mapping[BlockId, bool]) -> bool:
            if not d[i]:
                return False
            for j in p.pred(i):
                if (j, i) in edges:
                    return True
                if r[j] and (not guarded or not props.expr[j]):
                    return True
            return False

        return transfer

    def unknown_transfer(i: BlockId, ru: Mapping[BlockId, bool]) -> bool:
        return d[i] and any(not props.expr[j] and (not d[j] or ru[j]) for j in p.pred(i))

    rt = solve_any_path(p, copy_transfer(props.true_edges), Direction.FORWARD, strategy=strategy)
    rf = solve_any_path(p, copy_transfer(props.false_edges), Direction.FORWARD, strategy=strategy)
    ru = solve_any_path(p, unknown_transfer, Direction.FORWARD, strategy=strategy)
    return replace(base, d=d, rt=rt, rf=rf, ru=ru)


def useful_oracle(p: Program, e: Expr, maxlen: Optional[int] = None) -> frozenset[BlockId]:
    """
    用显式路径搜索计算有用节点集合，作为 compute_region 的测试基准。

    块 i 被保留当且仅当：(a) 存在某个计算 e 的块，从它的后继出发只经过有效块
    可以到达 i；(b) 从 i 出发只经过有效块可以到达一个计算 e 的有效块。
    与 compute_region 一样，(a) 中的路径不经过入口块。

    Args:
        p: 程序
        e: 条件表达式
        maxlen: 路径长度上限，不小于基本块数，默认等于基本块数

    Returns:
        有用节点集合
    """
    maxlen = len(p) if maxlen is None else maxlen
    if maxlen < len(p):
        raise ValueError(f'maxlen must be at least the number of blocks ({len(p)}), got {maxlen}')

    props = compute_locals(p, e)
    valid = {block_id for block_id, ok in _region_valid(p, props, None).items() if ok}
    sub = nx.DiGraph(p.graph()).subgraph(valid)
    forward = sub.subgraph(valid - {p.entry})

    sources = {j for i in p.ids if props.expr[i] for j in p.succ(i) if j in forward}
    live: set[BlockId] = set()
    for source in sources:
        live.update(nx.single_source_shortest_path_length(forward, source, cutoff=maxlen))

    reverse = sub.reverse(copy=True)
    antic: set[BlockId] = set()
    for target in (i for i in valid if props.expr[i]):
        antic.update(nx.single_source_shortest_path_length(reverse, target, cutoff=maxlen))

    return frozenset(live & antic)
