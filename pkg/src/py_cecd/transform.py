"""
CECD 变换

三个步骤加一次清理：

1. duplicate：为区域内每个基本块创建 .t / .f / .u 三个副本并按四条边规则连接；
2. rewire：所有以区域条件为条件、指向副本的分支边，true 槽改指 .t 副本，false 槽改指 .f 副本；
3. eliminate：.t / .f 副本中以区域条件为条件的分支改为无条件跳转；
4. cleanup：删除入口不可达的基本块，再消去空的转发块。

所有函数都返回新的 Program，不修改输入。
"""

from __future__ import annotations

import enum
import logging
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from typing import Optional

import networkx as nx
from pydantic import BaseModel, ConfigDict, NonNegativeInt

from py_cecd.exceptions import InvalidRegionError, TransformError
from py_cecd.ir import (
    BasicBlock,
    BlockId,
    Branch,
    CopyKind,
    Expr,
    Goto,
    Origin,
    Program,
    copy_id,
    expr_eq,
    operands_of,
    retarget,
)
from py_cecd.printer import print_expr
from py_cecd.settings import get_setting

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Region:
    """复制区域：基本块集合加上要消除的条件。"""

    members: frozenset[BlockId]
    cond: Expr

    def __post_init__(self):
        if not isinstance(self.members, frozenset):
            object.__setattr__(self, 'members', frozenset(self.members))

    def __contains__(self, block_id: object) -> bool:
        return block_id in self.members

    def __iter__(self) -> Iterator[BlockId]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    @classmethod
    def of(cls, members: Iterable[BlockId], cond: Expr) -> Region:
        return cls(frozenset(members), cond)

    def ordered(self, p: Program) -> list[BlockId]:
        """按程序中的基本块顺序列出成员。"""
        return [block_id for block_id in p.ids if block_id in self.members]


class TransformReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    copies_created: NonNegativeInt = 0
    edges_rewired: NonNegativeInt = 0
    conditionals_eliminated: NonNegativeInt = 0
    blocks_removed_by_cleanup: NonNegativeInt = 0

    def merge(self, other: TransformReport) -> TransformReport:
        """逐项相加两个报告。"""
        return TransformReport(
            copies_created=self.copies_created + other.copies_created,
            edges_rewired=self.edges_rewired + other.edges_rewired,
            conditionals_eliminated=self.conditionals_eliminated + other.conditionals_eliminated,
            blocks_removed_by_cleanup=self.blocks_removed_by_cleanup + other.blocks_removed_by_cleanup,
        )


class Step(enum.Enum):
    DUPLICATE = 'duplicate'
    REWIRE = 'rewire'
    ELIMINATE = 'eliminate'
    CLEANUP = 'cleanup'


def check_valid(p: Program, r: Region) -> bool:
    """
    检查区域是否有效：没有成员基本块给条件的操作数赋值。

    Args:
        p: 程序
        r: 区域

    Returns:
        有效时返回 True，空区域总是有效

    Raises:
        UnknownBlockError: 成员不在程序中
    """
    operands = operands_of(r.cond)
    return not any(p.block(member).assigns_any(operands) for member in sorted(r.members))


def _require_transformable(p: Program, r: Region):
    if not check_valid(p, r):
        raise InvalidRegionError(f'region assigns an operand of {print_expr(r.cond)}')
    if p.entry in r.members:
        raise InvalidRegionError(f'region must not contain the entry block {p.entry!r}')


def duplicate(p: Program, r: Region, *, keep_originals: Optional[bool] = None) -> Program:
    """
    第一步：三重复制区域。

    边规则：区域外到区域外不变；区域内到区域内在同类副本间复制；
    区域内到区域外从三个副本各连一条；区域外到区域内改指 .u 副本。

    Args:
        p: 程序
        r: 有效区域，不含入口
        keep_originals: 是否保留原始成员（不可达），默认取 Setting.keep_originals

    Returns:
        复制后的程序；副本排在原有基本块之后，依次为全部 .t、.f、.u
    """
    _require_transformable(p, r)
    if not r.members:
        return p
    keep = get_setting().keep_originals if keep_originals is None else keep_originals

    for member in r.ordered(p):
        for kind in CopyKind:
            if copy_id(member, kind) in p:
                raise TransformError(f'copy id {copy_id(member, kind)!r} already exists')

    to_unknown = {member: copy_id(member, CopyKind.UNKNOWN) for member in r.members}
    blocks: list[BasicBlock] = []
    for block in p.blocks:
        if block.id not in r.members:
            blocks.append(BasicBlock(block.id, block.instrs, retarget(block.term, to_unknown), block.origin))
        elif keep:
            blocks.append(block)

    members = [block for block in p.blocks if block.id in r.members]
    for kind in CopyKind:
        same_kind = {member: copy_id(member, kind) for member in r.members}
        for block in members:
            blocks.append(
                BasicBlock(
                    copy_id(block.id, kind),
                    block.instrs,
                    retarget(block.term, same_kind),
                    Origin(block.id, kind),
                )
            )
    return p.replace_blocks(blocks)


def _rewire(p: Program, r: Region) -> tuple[Program, int]:
    member_of = {copy_id(member, kind): member for member in r.members for kind in CopyKind}
    rewired = 0

    def redirect(target: BlockId, kind: CopyKind) -> BlockId:
        nonlocal rewired
        member = member_of.get(target)
        if member is None:
            return target
        new_target = copy_id(member, kind)
        if new_target != target:
            rewired += 1
        return new_target

    blocks = []
    for block in p.blocks:
        term = block.term
        if isinstance(term, Branch) and expr_eq(term.cond, r.cond):
            term = Branch(
                term.cond,
                redirect(term.on_true, CopyKind.TRUE),
                redirect(term.on_false, CopyKind.FALSE),
            )
            block = BasicBlock(block.id, block.instrs, term, block.origin)
        blocks.append(block)
    return p.replace_blocks(blocks), rewired


def rewire(p: Program, r: Region) -> Program:
    """
    第二步：以 r.cond 为条件、指向成员副本的分支边，true 槽改指 .t，false 槽改指 .f。

    包括第一步产生的副本中的分支。
    """
    program, _ = _rewire(p, r)
    return program


def eliminate(p: Program, r: Region) -> tuple[Program, TransformReport]:
    """
    第三步：.t 副本中的 r.cond 分支改为跳向 true 目标，.f 副本改为跳向 false 目标。

    .u 副本保留分支。

    Args:
        p: rewire 的输出
        r: 区域

    Returns:
        (程序, 报告)，报告中 conditionals_eliminated 为被消除的分支位置数
    """
    sites: set[BlockId] = set()
    blocks = []
    for block in p.blocks:
        origin = block.origin
        term = block.term
        if (
            origin is not None
            and origin.block in r.members
            and origin.kind is not CopyKind.UNKNOWN
            and isinstance(term, Branch)
            and expr_eq(term.cond, r.cond)
        ):
            target = term.on_true if origin.kind is CopyKind.TRUE else term.on_false
            block = BasicBlock(block.id, block.instrs, Goto(target), origin)
            sites.add(origin.block)
        blocks.append(block)
    return p.replace_blocks(blocks), TransformReport(conditionals_eliminated=len(sites))


def _reachable(p: Program) -> Program:
    graph = p.graph()
    reachable = nx.descendants(graph, p.entry) | {p.entry}
    return p.replace_blocks(block for block in p.blocks if block.id in reachable)


def _forwarding_targets(p: Program) -> dict[BlockId, BlockId]:
    forwarding = {
        block.id: block.term.target
        for block in p.blocks
        if block.id != p.entry and not block.instrs and isinstance(block.term, Goto)
    }
    resolved: dict[BlockId, BlockId] = {}
    for start in forwarding:
        chain = [start]
        target = forwarding[start]
        while target in forwarding and target not in chain:
            chain.append(target)
            target = forwarding[target]
        if target in forwarding:
            # 空块成环，保持原样
            continue
        resolved[start] = target
    return resolved


def cleanup(p: Program, *, elide_forwarding: bool = True) -> tuple[Program, TransformReport]:
    """
    死代码清理：删除入口不可达的基本块，再消去空的转发块（无指令、goto 结尾）。

    入口从不被消去，全部由空块组成的环保持不变。

    Args:
        p: 程序
        elide_forwarding: 为 False 时只删除不可达块

    Returns:
        (程序, 报告)，报告中 blocks_removed_by_cleanup 为删除的块数
    """
    program = _reachable(p)
    if elide_forwarding:
        mapping = _forwarding_targets(program)
        if mapping:
            blocks = [
                BasicBlock(block.id, block.instrs, retarget(block.term, mapping), block.origin)
                for block in program.blocks
            ]
            program = _reachable(program.replace_blocks(blocks))
    removed = len(p) - len(program)
    if removed:
        logger.debug(f'清理删除了 {removed} 个基本块')
    return program, TransformReport(blocks_removed_by_cleanup=removed)


def apply_cecd(
    p: Program,
    r: Region,
    *,
    keep_originals: Optional[bool] = None,
    stop_after: Optional[Step] = None,
) -> tuple[Program, TransformReport]:
    """
    依次执行 duplicate、rewire、eliminate、cleanup。

    Args:
        p: 程序
        r: 有效区域
        keep_originals: 见 duplicate
        stop_after: 在指定步骤之后停止，用于查看中间结果

    Returns:
        (程序, 合并后的报告)

    Raises:
        InvalidRegionError: 区域给条件的操作数赋值或包含入口
    """
    program = duplicate(p, r, keep_originals=keep_originals)
    report = TransformReport(copies_created=len(r.members) * len(CopyKind))
    if stop_after is Step.DUPLICATE:
        return program, report

    program, rewired = _rewire(program, r)
    report = report.merge(TransformReport(edges_rewired=rewired))
    if stop_after is Step.REWIRE:
        return program, report

    program, eliminated = eliminate(program, r)
    report = report.merge(eliminated)
    if stop_after is Step.ELIMINATE:
        return program, report

    program, cleaned = cleanup(program)
    report = report.merge(cleaned)
    logger.info(
        f'CECD {print_expr(r.cond)}：复制 {report.copies_created} 个副本，改写 {report.edges_rewired} 条边，'
        f'消除 {report.conditionals_eliminated} 个条件，清理 {report.blocks_removed_by_cleanup} 个基本块'
    )
    return program, report
