"""文本 IR 打印：输出确定，且能被 parse_program 解析回结构相同的 Program。"""

from py_cecd.ir import (
    Assign,
    BasicBlock,
    Binary,
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
)

INDENT = '    '

# 一元运算和原子的优先级高于所有二元运算
_ATOM_PRECEDENCE = 100


def _precedence(e: Expr) -> int:
    if isinstance(e, Binary):
        return e.op.precedence
    return _ATOM_PRECEDENCE


def print_expr(e: Expr) -> str:
    """
    以最少括号输出表达式。

    二元运算左结合：右操作数在优先级不高于父节点时加括号，
    左操作数在优先级低于父节点时加括号。

    Args:
        e: 表达式

    Returns:
        表达式文本
    """
    if isinstance(e, Lit):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        inner = print_expr(e.operand)
        if isinstance(e.operand, Binary):
            inner = f'({inner})'
        elif e.op is UnaryOp.NEG and isinstance(e.operand, Lit) and e.operand.value >= 0:
            # 否则会被解析成负字面量
            inner = f'({inner})'
        return f'{e.op.value}{inner}'
    left = print_expr(e.left)
    right = print_expr(e.right)
    if _precedence(e.left) < e.op.precedence:
        left = f'({left})'
    if _precedence(e.right) <= e.op.precedence:
        right = f'({right})'
    return f'{left} {e.op.value} {right}'


def _print_instr(instr: Instruction) -> str:
    if isinstance(instr, Assign):
        return f'{instr.target} = {print_expr(instr.value)};'
    if isinstance(instr, Input):
        return f'{instr.target} = input;'
    if isinstance(instr, Print):
        return f'print {print_expr(instr.value)};'
    raise TypeError(f'unsupported instruction {instr!r}')


def _print_term(term: Terminator) -> str:
    if isinstance(term, Goto):
        return f'goto {term.target};'
    if isinstance(term, Branch):
        cond = print_expr(term.cond)
        if isinstance(term.cond, Binary):
            cond = f'({cond})'
        return f'br {cond} {term.on_true} {term.on_false};'
    if isinstance(term, Exit):
        return 'exit;'
    raise TypeError(f'unsupported terminator {term!r}')


def print_block(block: BasicBlock) -> str:
    lines = [f'block {block.id} {{']
    lines.extend(f'{INDENT}{_print_instr(instr)}' for instr in block.instrs)
    lines.append(f'{INDENT}{_print_term(block.term)}')
    lines.append('}')
    return '\n'.join(lines)


def print_program(p: Program) -> str:
    """
    按基本块顺序输出程序文本。

    入口不是第一个基本块时，开头输出 entry 指令。

    Args:
        p: 程序

    Returns:
        规范化的文本 IR，以换行结尾
    """
    parts = []
    if p.blocks[0].id != p.entry:
        parts.append(f'entry {p.entry};')
    parts.extend(print_block(block) for block in p.blocks)
    return '\n\n'.join(parts) + '\n'
