"""
区域选择与区域评估

select_region 取由有用节点组成的最大有效区域；evaluate_region 用 Rt / Rf / Ru
预测指令增长，在 growth <= n * k 时接受变换；best_region_by_profile 在剖析数据下
穷举区域，最大化被消除条件的执行频率之和。
"""

from __future__ import annotations

import logging
from typing import Optional

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, TypeAdapter

from py_cecd.analysis import AnalysisResult, compute_locals, compute_reachable_copies, compute_region
from py_cecd.exceptions import InstanceTooLargeError
from py_cecd.ir import BlockId, Expr, Program
from py_cecd.printer import print_expr
from py_cecd.settings import get_setting
from py_cecd.transform import Region

logger = logging.getLogger(__name__)

_FREQ_ADAPTER = TypeAdapter(dict[str, NonNegativeInt])


class EvalParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: NonNegativeInt = 0

    @classmethod
    def default(cls) -> EvalParams:
        return cls(k=get_setting().k)


class CostReport(BaseModel):
    """区域评估结果。growth 可以为负，接受条件始终是 growth <= n * k。"""

    model_config = ConfigDict(frozen=True)

    sizes: dict[str, NonNegativeInt] = Field(default_factory=dict)
    n: NonNegativeInt = 0
    k: NonNegativeInt = 0
    growth: int = 0
    accepted: bool = True

    @property
    def limit(self) -> int:
        return self.n * self.k


class ProfileData(BaseModel):
    """剖析数据：基本块到执行频率的映射，未出现的块频率为 0。"""

    model_config = ConfigDict(frozen=True)

    freq: dict[str, NonNegativeInt] = Field(default_factory=dict)

    def get(self, block_id: BlockId) -> int:
        return self.freq.get(block_id, 0)

    @classmethod
    def from_json(cls, text: str) -> ProfileData:
        """从 JSON 对象 {"块 id": 频率, ...} 读取。"""
        return cls(freq=_FREQ_ADAPTER.validate_json(text))


def select_region(p: Program, e: Expr) -> Region:
    """
    区域选择：取 compute_region 得到的 D。

    Args:
        p: 程序
        e: 条件表达式

    Returns:
        Region(D, e)，没有有用节点时为空区域
    """
    return Region(compute_region(p, e).region, e)


def _cost(p: Program, r: Region, result: AnalysisResult, params: EvalParams) -> CostReport:
    sizes = {member: p.block(member).size for member in r.ordered(p)}
    predicted = sum(sizes[i] for i in result.rt_set) + sum(sizes[i] for i in result.rf_set)
    predicted += sum(sizes[i] for i in result.ru_set)
    growth = predicted - sum(sizes.values())
    n = sum(p.block(member).branches_on(r.cond) for member in r.members)
    return CostReport(sizes=sizes, n=n, k=params.k, growth=growth, accepted=growth <= n * params.k)


def evaluate_region(p: Program, r: Region, params: Optional[EvalParams] = None) -> CostReport:
    """
    区域评估。

    growth = Σ_{Rt} S + Σ_{Rf} S + Σ_{Ru} S − Σ_{D} S，其中 S 为指令数（不计终结指令），
    n 为区域内以 r.cond 为条件分支的块数。

    Args:
        p: 程序
        r: 有效区域
        params: 评估参数，默认使用 Setting.k

    Returns:
        CostReport

    Raises:
        InvalidRegionError: 区域给条件的操作数赋值
    """
    params = params or EvalParams.default()
    result = compute_reachable_copies(p, r.cond, r.members)
    report = _cost(p, r, result, params)
    logger.debug(
        f'评估 {print_expr(r.cond)}：{len(r)} 个块，n={report.n} k={report.k} '
        f'growth={report.growth} -> {"接受" if report.accepted else "拒绝"}'
    )
    return report


def _eliminated_frequency(p: Program, r: Region, result: AnalysisResult, profile: ProfileData) -> int:
    known = result.rt_set | result.rf_set
    sites = [member for member in r.members if member in known and p.block(member).branches_on(r.cond)]
    if not sites:
        return 0
    sub = nx.DiGraph(p.graph()).subgraph(r.members)
    reaching: set[BlockId] = set()
    for site in sites:
        reaching |= nx.ancestors(sub, site)
        reaching.add(site)
    return sum(profile.get(block_id) for block_id in reaching if block_id in known)


def best_region_by_profile(
    p: Program,
    e: Expr,
    profile: ProfileData,
    params: Optional[EvalParams] = None,
    *,
    limit: Optional[int] = None,
) -> tuple[Region, int]:
    """
    在剖析数据下穷举选择区域。

    从最大有用区域出发，每次去掉一个块并重新求有用闭包，遍历全部不同的闭包；
    对通过区域评估的闭包计算目标值：区域中预测有 .t 或 .f 副本、且在区域内能到达
    某个被消除分支的块，其频率之和。条件表达式不计入指令数。

    只有频率非零的块会计入目标值，所以穷举规模按这些块计数；目标值不超过已知最优值的
    闭包不再展开（去掉块只会让目标值变小）。

    Args:
        p: 程序
        e: 条件表达式
        profile: 剖析数据
        params: 评估参数，默认使用 Setting.k
        limit: 区域中频率非零的候选块数上限，默认取 Setting.brute_force_limit

    Returns:
        (最优区域, 目标值)，没有可接受的非空区域时返回空区域和 0

    Raises:
        InstanceTooLargeError: 频率非零的候选块数超过上限
    """
    params = params or EvalParams.default()
    limit = get_setting().brute_force_limit if limit is None else limit
    props = compute_locals(p, e)
    full = compute_region(p, e, props=props).region
    candidates = sorted(block_id for block_id in full if profile.get(block_id) > 0)
    if len(candidates) > limit:
        logger.error(f'有频率的候选块数 {len(candidates)} 超过穷举上限 {limit}')
        raise InstanceTooLargeError(
            f'{len(candidates)} profiled candidate blocks exceed the brute-force limit of {limit}'
        )

    best_region = Region(frozenset(), e)
    best_value = 0
    if not candidates:
        logger.info(f'剖析选择 {print_expr(e)}：区域内没有频率非零的块')
        return best_region, best_value

    order = {block_id: index for index, block_id in enumerate(p.ids)}
    seen: set[frozenset[BlockId]] = set()
    stack = [full]
    while stack:
        closure = stack.pop()
        if closure in seen:
            continue
        seen.add(closure)
        if not closure:
            continue
        region = Region(closure, e)
        result = compute_reachable_copies(p, e, closure, props=props)
        value = _eliminated_frequency(p, region, result, profile)
        # 子闭包的目标值不会超过当前闭包，不可能更优时剪枝
        if value <= best_value:
            continue
        if _cost(p, region, result, params).accepted:
            best_region, best_value = region, value
        for block_id in sorted(closure, key=order.__getitem__, reverse=True):
            smaller = compute_region(p, e, within=closure - {block_id}, props=props).region
            if smaller not in seen:
                stack.append(smaller)

    logger.info(f'剖析选择 {print_expr(e)}：遍历 {len(seen)} 个闭包，最优目标值 {best_value}')
    return best_region, best_value
