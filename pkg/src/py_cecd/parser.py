"""
文本 IR 解析器

语法（`#` 到行尾为注释，空白不敏感）：

    program  := directive* block+
    directive:= "entry" IDENT ";"
    block    := "block" IDENT "{" instr* term "}"
    instr    := IDENT "=" "input" ";" | IDENT "=" expr ";" | "print" expr ";"
    term     := "goto" IDENT ";" | "br" expr IDENT IDENT ";" | "exit" ";"

未给出 entry 指令时，第一个基本块为入口。
"""

from __future__ import annotations

import logging
import re
from typing import NamedTuple, Optional

from py_cecd.exceptions import DuplicateBlockError, IRSyntaxError, UndefinedBlockError
from py_cecd.ir import (
    Assign,
    BasicBlock,
    Binary,
    BinaryOp,
    Branch,
    Exit,
    Expr,
    Goto,
    Input,
    Instruction,
    Lit,
    Print,
    Program,
    Terminator,
    Unary,
    UnaryOp,
    Var,
    origin_from_id,
)

logger = logging.getLogger(__name__)

KEYWORDS = frozenset({'block', 'entry', 'input', 'print', 'goto', 'br', 'exit'})

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_.]*)
  | (?P<op>==|!=|<=|>=|&&|\|\||[-+*<>!=;{}()])
    """,
    re.VERBOSE,
)

# 按优先级从低到高排列的二元运算符层级
_BINARY_LEVELS: list[dict[str, BinaryOp]] = [
    {'||': BinaryOp.OR},
    {'&&': BinaryOp.AND},
    {'==': BinaryOp.EQ, '!=': BinaryOp.NE},
    {'<': BinaryOp.LT, '<=': BinaryOp.LE, '>': BinaryOp.GT, '>=': BinaryOp.GE},
    {'+': BinaryOp.ADD, '-': BinaryOp.SUB},
    {'*': BinaryOp.MUL},
]


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    """
    将源文本切分为记号，丢弃空白与注释。

    Args:
        text: IR 源文本

    Returns:
        记号列表，末尾附加一个 eof 记号
    """
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise IRSyntaxError(f'unexpected character {text[pos]!r}', line, pos - line_start + 1)
        kind = match.lastgroup or ''
        value = match.group()
        if kind not in ('ws', 'comment'):
            if kind == 'ident' and value in KEYWORDS:
                kind = 'keyword'
            tokens.append(Token(kind, value, line, pos - line_start + 1))
        newlines = value.count('\n')
        if newlines:
            line += newlines
            line_start = pos + value.rindex('\n') + 1
        pos = match.end()
    tokens.append(Token('eof', '', line, pos - line_start + 1))
    return tokens


class _Parser:
    """递归下降解析器，记录块引用位置以便报告未定义块。"""

    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.references: list[tuple[str, Token]] = []

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != 'eof':
            self.pos += 1
        return token

    def error(self, message: str, token: Optional[Token] = None) -> IRSyntaxError:
        token = token or self.current
        return IRSyntaxError(message, token.line, token.column)

    def describe(self, token: Token) -> str:
        return 'end of input' if token.kind == 'eof' else repr(token.text)

    def check(self, text: str) -> bool:
        token = self.current
        return token.kind in ('op', 'keyword') and token.text == text

    def expect(self, text: str) -> Token:
        if not self.check(text):
            raise self.error(f'expected {text!r} but found {self.describe(self.current)}')
        return self.advance()

    def expect_ident(self, what: str) -> Token:
        token = self.current
        if token.kind != 'ident':
            raise self.error(f'expected {what} but found {self.describe(token)}')
        return self.advance()

    def block_ref(self) -> str:
        token = self.expect_ident('block id')
        self.references.append((token.text, token))
        return token.text

    # ---------- 程序 ----------

    def parse_program(self) -> Program:
        entry: Optional[Token] = None
        while self.check('entry'):
            self.advance()
            entry = self.expect_ident('block id')
            self.expect(';')
        blocks: list[BasicBlock] = []
        seen: dict[str, Token] = {}
        while self.current.kind != 'eof':
            start = self.current
            block = self.parse_block()
            if block.id in seen:
                first = seen[block.id]
                raise DuplicateBlockError(
                    f'duplicate block id {block.id!r} (first defined at line {first.line})', start.line, start.column
                )
            seen[block.id] = start
            blocks.append(block)
        if not blocks:
            raise self.error('program must contain at least one block')
        for name, token in self.references:
            if name not in seen:
                raise UndefinedBlockError(f'reference to undefined block {name!r}', token.line, token.column)
        if entry is not None and entry.text not in seen:
            raise UndefinedBlockError(f'entry refers to undefined block {entry.text!r}', entry.line, entry.column)
        entry_id = entry.text if entry is not None else blocks[0].id
        return Program(tuple(blocks), entry_id)

    def parse_block(self) -> BasicBlock:
        self.expect('block')
        name = self.expect_ident('block id').text
        self.expect('{')
        instrs: list[Instruction] = []
        while True:
            token = self.current
            if token.kind == 'keyword' and token.text in ('goto', 'br', 'exit'):
                term = self.parse_term()
                break
            instrs.append(self.parse_instr())
        self.expect('}')
        return BasicBlock(name, tuple(instrs), term, origin_from_id(name))

    def parse_instr(self) -> Instruction:
        if self.check('print'):
            self.advance()
            value = self.parse_expr()
            self.expect(';')
            return Print(value)
        target = self.expect_ident('instruction or terminator')
        self.expect('=')
        if self.check('input'):
            self.advance()
            self.expect(';')
            return Input(target.text)
        value = self.parse_expr()
        self.expect(';')
        return Assign(target.text, value)

    def parse_term(self) -> Terminator:
        keyword = self.advance().text
        if keyword == 'goto':
            target = self.block_ref()
            self.expect(';')
            return Goto(target)
        if keyword == 'br':
            cond = self.parse_expr()
            on_true = self.block_ref()
            on_false = self.block_ref()
            self.expect(';')
            return Branch(cond, on_true, on_false)
        self.expect(';')
        return Exit()

    # ---------- 表达式 ----------

    def parse_expr(self, level: int = 0) -> Expr:
        if level == len(_BINARY_LEVELS):
            return self.parse_unary()
        operators = _BINARY_LEVELS[level]
        left = self.parse_expr(level + 1)
        while self.current.kind == 'op' and self.current.text in operators:
            op = operators[self.advance().text]
            right = self.parse_expr(level + 1)
            left = Binary(op, left, right)
        return left

    def parse_unary(self) -> Expr:
        token = self.current
        if token.kind == 'op' and token.text == '-':
            self.advance()
            # 负号紧跟整数时折叠为负字面量
            if self.current.kind == 'int':
                return Lit(-int(self.advance().text))
            return Unary(UnaryOp.NEG, self.parse_unary())
        if token.kind == 'op' and token.text == '!':
            self.advance()
            return Unary(UnaryOp.NOT, self.parse_unary())
        return self.parse_atom()

    def parse_atom(self) -> Expr:
        token = self.current
        if token.kind == 'int':
            self.advance()
            return Lit(int(token.text))
        if token.kind == 'ident':
            self.advance()
            return Var(token.text)
        if token.kind == 'op' and token.text == '(':
            self.advance()
            inner = self.parse_expr()
            self.expect(')')
            return inner
        raise self.error(f'expected expression but found {self.describe(token)}')


def parse_program(text: str) -> Program:
    """
    解析文本 IR。

    Args:
        text: 符合语法的源文本

    Returns:
        解析得到的 Program；形如 <orig>.t/.f/.u 的块 id 会带上来源标记

    Raises:
        IRSyntaxError: 语法错误（含行列号）
        UndefinedBlockError: 引用了未定义的块
        DuplicateBlockError: 块 id 重复
    """
    program = _Parser(text).parse_program()
    logger.debug(f'解析完成：{len(program)} 个基本块，入口 {program.entry}')
    return program


def parse_expr(text: str) -> Expr:
    """
    解析单个表达式，例如命令行的 --cond 参数。

    Args:
        text: 表达式文本

    Returns:
        表达式 AST
    """
    parser = _Parser(text)
    expr = parser.parse_expr()
    if parser.current.kind != 'eof':
        raise parser.error(f'unexpected {parser.describe(parser.current)} after expression')
    return expr


__all__ = ['parse_program', 'parse_expr', 'tokenize']
