"""
优化流水线：候选条件 → 区域选择 → 区域评估 → 变换 → 验证

命令行的 opt 命令只是本模块的薄封装。
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from pydantic import BaseModel, TypeAdapter

from py_cecd.heuristic import EvalParams, ProfileData, best_region_by_profile, evaluate_region, select_region
from py_cecd.interpreter import equivalent, input_vectors
from py_cecd.ir import Expr, Program
from py_cecd.printer import print_expr
from py_cecd.settings import get_setting
from py_cecd.transform import Step, apply_cecd

logger = logging.getLogger(__name__)


class PipelineStats(BaseModel):
    """一个候选条件的处理记录，字段名即 stats JSON 的键。"""

    cond: str
    region: list[str]
    blocks_before: int
    blocks_after: int
    instrs_before: int
    instrs_after: int
    n: int
    k: int
    predicted_growth: int
    actual_growth: int
    accepted: bool
    applied: bool
    verified: Optional[bool] = None


STATS_LIST = TypeAdapter(list[PipelineStats])


@dataclass
class OptimizeResult:
    program: Program
    stats: list[PipelineStats] = field(default_factory=list)

    @property
    def verification_failed(self) -> bool:
        return any(item.verified is False for item in self.stats)

    def stats_json(self, indent: Optional[int] = 2) -> str:
        return STATS_LIST.dump_json(self.stats, indent=indent).decode()


def candidate_conditions(p: Program) -> list[Expr]:
    """
    列出互不相同的分支条件，按分支位置数降序，数量相同时按首次出现顺序。

    Args:
        p: 程序

    Returns:
        条件列表
    """
    conditions = p.branch_conditions()
    counts = Counter(conditions)
    first_seen = list(dict.fromkeys(conditions))
    return sorted(first_seen, key=lambda cond: -counts[cond])


def verify(before: Program, after: Program, count: int, *, seed: Optional[int] = None, fuel: Optional[int] = None) -> bool:
    """
    在 count 组随机输入上比较变换前后的程序。

    Args:
        before: 原程序
        after: 变换后的程序
        count: 输入组数
        seed: 随机种子
        fuel: 步数上限

    Returns:
        全部一致时返回 True
    """
    for inputs, env in input_vectors(before, count, seed):
        if not equivalent(before, after, inputs, fuel, env=env):
            logger.warning(f'验证失败：inputs={inputs} env={env}')
            return False
    return True


def optimize(
    p: Program,
    *,
    k: Optional[int] = None,
    cond: Optional[Expr] = None,
    profile: Optional[ProfileData] = None,
    verify_count: int = 0,
    seed: Optional[int] = None,
    fuel: Optional[int] = None,
    keep_originals: Optional[bool] = None,
    stop_after: Optional[Step] = None,
) -> OptimizeResult:
    """
    对每个候选条件执行一次 CECD。

    每个条件依次选择区域（给定剖析数据时穷举选择）、评估，接受且区域非空时变换，
    之后在新程序上继续处理下一个条件。

    Args:
        p: 程序
        k: 区域评估参数，默认取 Setting.k
        cond: 只处理这一个条件
        profile: 剖析数据
        verify_count: 每次变换后用多少组随机输入验证，0 表示不验证
        seed: 验证用的随机种子
        fuel: 验证用的步数上限
        keep_originals: 见 transform.duplicate
        stop_after: 见 transform.apply_cecd

    Returns:
        OptimizeResult
    """
    params = EvalParams(k=get_setting().k if k is None else k)
    candidates = [cond] if cond is not None else candidate_conditions(p)
    result = OptimizeResult(p)

    for candidate in candidates:
        current = result.program
        text = print_expr(candidate)
        if profile is not None:
            region, objective = best_region_by_profile(current, candidate, profile, params)
            logger.info(f'{text}：剖析目标值 {objective}')
        else:
            region = select_region(current, candidate)
        report = evaluate_region(current, region, params)
        logger.info(
            f'{text}：区域 {len(region)} 个块，n={report.n} k={report.k} '
            f'预测增长 {report.growth}，{"接受" if report.accepted else "拒绝"}'
        )

        after = current
        verified: Optional[bool] = None
        applied = report.accepted and len(region) > 0
        if applied:
            after, _ = apply_cecd(current, region, keep_originals=keep_originals, stop_after=stop_after)
            if verify_count > 0:
                verified = verify(current, after, verify_count, seed=seed, fuel=fuel)

        result.stats.append(
            PipelineStats(
                cond=text,
                region=region.ordered(current),
                blocks_before=len(current),
                blocks_after=len(after),
                instrs_before=current.instruction_count(),
                instrs_after=after.instruction_count(),
                n=report.n,
                k=report.k,
                predicted_growth=report.growth,
                actual_growth=after.instruction_count() - current.instruction_count(),
                accepted=report.accepted,
                applied=applied,
                verified=verified,
            )
        )
        result.program = after
    return result
