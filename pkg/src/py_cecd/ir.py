"""
控制流图中间表示（IR）

Program 由若干基本块组成，每个基本块是一串直线指令加一个终结指令
（goto / br / exit）。所有类型在构造后不可变，可在线程间共享。

示例:
    from py_cecd.parser import parse_program

    program = parse_program('block b0 { print 7; exit; }')
    program.succ('b0')  # []
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Optional, Union

import networkx as nx

from py_cecd.exceptions import MalformedProgramError, UnknownBlockError

BlockId = str


# ==================== 表达式 ====================


class UnaryOp(enum.Enum):
    NEG = '-'
    NOT = '!'


class BinaryOp(enum.Enum):
    ADD = '+'
    SUB = '-'
    MUL = '*'
    EQ = '=='
    NE = '!='
    LT = '<'
    LE = '<='
    GT = '>'
    GE = '>='
    AND = '&&'
    OR = '||'

    @property
    def precedence(self) -> int:
        """运算符优先级，数值越大结合越紧。"""
        return _PRECEDENCE[self]


_PRECEDENCE = {
    BinaryOp.OR: 1,
    BinaryOp.AND: 2,
    BinaryOp.EQ: 3,
    BinaryOp.NE: 3,
    BinaryOp.LT: 4,
    BinaryOp.LE: 4,
    BinaryOp.GT: 4,
    BinaryOp.GE: 4,
    BinaryOp.ADD: 5,
    BinaryOp.SUB: 5,
    BinaryOp.MUL: 6,
}


@dataclass(frozen=True)
class Lit:
    """整数字面量。"""

    value: int


@dataclass(frozen=True)
class Var:
    """变量引用。"""

    name: str


@dataclass(frozen=True)
class Unary:
    op: UnaryOp
    operand: Expr


@dataclass(frozen=True)
class Binary:
    op: BinaryOp
    left: Expr
    right: Expr


# 表达式是纯的：不含赋值、调用或输入
Expr = Union[Lit, Var, Unary, Binary]


def expr_eq(a: Expr, b: Expr) -> bool:
    """
    按语法结构比较两个表达式。

    只比较 AST（运算符树、变量名、字面量），不考虑代数恒等式，
    因此 `x < 3` 与 `3 > x` 不相等。

    Args:
        a: 第一个表达式
        b: 第二个表达式

    Returns:
        结构相同时返回 True
    """
    return a == b


def operands_of(e: Expr) -> frozenset[str]:
    """
    获取表达式中出现的全部变量名。

    Args:
        e: 表达式

    Returns:
        变量名集合（去重）
    """
    names: set[str] = set()
    stack: list[Expr] = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            names.add(node.name)
        elif isinstance(node, Unary):
            stack.append(node.operand)
        elif isinstance(node, Binary):
            stack.append(node.left)
            stack.append(node.right)
    return frozenset(names)


# ==================== 指令与终结指令 ====================


@dataclass(frozen=True)
class Assign:
    target: str
    value: Expr


@dataclass(frozen=True)
class Input:
    target: str


@dataclass(frozen=True)
class Print:
    value: Expr


Instruction = Union[Assign, Input, Print]


def writes(instr: Instruction) -> Optional[str]:
    """返回指令写入的变量名，Print 返回 None。"""
    if isinstance(instr, (Assign, Input)):
        return instr.target
    return None


def reads(instr: Instruction) -> frozenset[str]:
    """返回指令读取的变量名。"""
    if isinstance(instr, (Assign, Print)):
        return operands_of(instr.value)
    return frozenset()


@dataclass(frozen=True)
class Goto:
    target: BlockId


@dataclass(frozen=True)
class Branch:
    """条件跳转，两个后继槽位可以指向同一个基本块。"""

    cond: Expr
    on_true: BlockId
    on_false: BlockId


@dataclass(frozen=True)
class Exit:
    pass


Terminator = Union[Goto, Branch, Exit]


def targets_of(term: Terminator) -> list[BlockId]:
    """按 true 在前、false 在后的顺序返回终结指令的后继。"""
    if isinstance(term, Goto):
        return [term.target]
    if isinstance(term, Branch):
        return [term.on_true, term.on_false]
    return []


def retarget(term: Terminator, mapping: Mapping[BlockId, BlockId]) -> Terminator:
    """按映射替换终结指令的后继，未出现在映射中的目标保持不变。"""
    if isinstance(term, Goto):
        return Goto(mapping.get(term.target, term.target))
    if isinstance(term, Branch):
        return Branch(term.cond, mapping.get(term.on_true, term.on_true), mapping.get(term.on_false, term.on_false))
    return term


# ==================== 基本块与程序 ====================


class CopyKind(enum.Enum):
    """复制区域时产生的三种副本。"""

    TRUE = 't'
    FALSE = 'f'
    UNKNOWN = 'u'

    @property
    def suffix(self) -> str:
        return f'.{self.value}'


class Origin(NamedTuple):
    block: BlockId
    kind: CopyKind


def copy_id(block: BlockId, kind: CopyKind) -> BlockId:
    """副本命名规则：<orig>.t / <orig>.f / <orig>.u。"""
    return f'{block}{kind.suffix}'


def origin_from_id(block: BlockId) -> Optional[Origin]:
    """从副本命名规则反推来源，不符合规则时返回 None。"""
    for kind in CopyKind:
        if block.endswith(kind.suffix) and len(block) > len(kind.suffix):
            return Origin(block[: -len(kind.suffix)], kind)
    return None


@dataclass(frozen=True)
class BasicBlock:
    id: BlockId
    instrs: tuple[Instruction, ...] = ()
    term: Terminator = field(default_factory=Exit)
    origin: Optional[Origin] = None

    @property
    def size(self) -> int:
        """S(bb)：指令数，不计终结指令。"""
        return len(self.instrs)

    def assigns_any(self, names: Iterable[str]) -> bool:
        """基本块中是否有指令写入给定变量之一。"""
        wanted = frozenset(names)
        return any(writes(instr) in wanted for instr in self.instrs)

    def branches_on(self, cond: Expr) -> bool:
        """终结指令是否是以 cond 为条件的分支。"""
        return isinstance(self.term, Branch) and expr_eq(self.term.cond, cond)


@dataclass(frozen=True)
class Program:
    """
    控制流图：有序的基本块集合加入口块。

    构造时校验：id 唯一、入口存在、所有后继都存在。
    """

    blocks: tuple[BasicBlock, ...]
    entry: BlockId

    def __post_init__(self):
        seen: set[BlockId] = set()
        for block in self.blocks:
            if block.id in seen:
                raise MalformedProgramError(f'duplicate block id {block.id!r}')
            seen.add(block.id)
        if self.entry not in seen:
            raise MalformedProgramError(f'entry block {self.entry!r} does not exist')
        for block in self.blocks:
            for target in targets_of(block.term):
                if target not in seen:
                    raise MalformedProgramError(f'block {block.id!r} jumps to undefined block {target!r}')

    @cached_property
    def _index(self) -> dict[BlockId, BasicBlock]:
        return {block.id: block for block in self.blocks}

    @cached_property
    def _preds(self) -> dict[BlockId, frozenset[BlockId]]:
        preds: dict[BlockId, set[BlockId]] = {block.id: set() for block in self.blocks}
        for block in self.blocks:
            for target in targets_of(block.term):
                preds[target].add(block.id)
        return {key: frozenset(value) for key, value in preds.items()}

    def __contains__(self, block_id: object) -> bool:
        return block_id in self._index

    def __iter__(self) -> Iterator[BasicBlock]:
        return iter(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def ids(self) -> list[BlockId]:
        return [block.id for block in self.blocks]

    def block(self, block_id: BlockId) -> BasicBlock:
        """
        按 id 获取基本块。

        Args:
            block_id: 基本块 id

        Returns:
            对应的 BasicBlock
        """
        try:
            return self._index[block_id]
        except KeyError:
            raise UnknownBlockError(f'unknown block id {block_id!r}')

    def succ(self, block_id: BlockId) -> list[BlockId]:
        """后继列表：goto 一个，branch 两个（true 在前），exit 没有。"""
        return targets_of(self.block(block_id).term)

    def pred(self, block_id: BlockId) -> frozenset[BlockId]:
        """前驱集合，是 succ 的逆关系。"""
        self.block(block_id)
        return self._preds[block_id]

    def instruction_count(self) -> int:
        """全部基本块的指令总数（不计终结指令）。"""
        return sum(block.size for block in self.blocks)

    def input_count(self) -> int:
        """程序中 Input 指令的数量。"""
        return sum(isinstance(instr, Input) for block in self.blocks for instr in block.instrs)

    def variables(self) -> frozenset[str]:
        """程序中读写过的所有变量名。"""
        names: set[str] = set()
        for block in self.blocks:
            for instr in block.instrs:
                names |= reads(instr)
                target = writes(instr)
                if target is not None:
                    names.add(target)
            if isinstance(block.term, Branch):
                names |= operands_of(block.term.cond)
        return frozenset(names)

    def branch_conditions(self) -> list[Expr]:
        """按出现顺序列出所有分支条件（含重复）。"""
        return [block.term.cond for block in self.blocks if isinstance(block.term, Branch)]

    def graph(self) -> nx.MultiDiGraph:
        """
        转换为 networkx 多重有向图，每个终结指令槽位对应一条边。

        Returns:
            MultiDiGraph，边属性 slot 取值为 goto / true / false
        """
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(self.ids)
        for block in self.blocks:
            term = block.term
            if isinstance(term, Goto):
                graph.add_edge(block.id, term.target, slot='goto')
            elif isinstance(term, Branch):
                graph.add_edge(block.id, term.on_true, slot='true')
                graph.add_edge(block.id, term.on_false, slot='false')
        return graph

    def replace_blocks(self, blocks: Iterable[BasicBlock], entry: Optional[BlockId] = None) -> Program:
        """以新的基本块序列构造程序，入口默认不变。"""
        return Program(tuple(blocks), self.entry if entry is None else entry)


def succ(p: Program, i: BlockId) -> list[BlockId]:
    """succ(p, i)，见 Program.succ。"""
    return p.succ(i)


def pred(p: Program, i: BlockId) -> frozenset[BlockId]:
    """pred(p, i)，见 Program.pred。"""
    return p.pred(i)
