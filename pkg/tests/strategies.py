"""
hypothesis 策略：随机表达式与随机程序

随机程序最多 10 个基本块、4 个变量（a, b, c, n）。除回边外所有边都指向编号更大的块；
回边只出现在形如 `n = n - 1; br (n > 0) 回边 前向;` 的回边块中，而其他块从不给 n 赋值，
所以任何执行中回边的总次数不超过 n 的初值，程序一定终止。

`entry_inputs=False` 时入口不读入任何变量，变量初值全部来自 env，回边也可以指向入口。
"""

from hypothesis import strategies as st

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
    Lit,
    Print,
    Program,
    Unary,
    UnaryOp,
    Var,
)
from py_cecd.parser import parse_expr

VARIABLES = ('a', 'b', 'c', 'n')
DATA_VARIABLES = ('a', 'b', 'c')
CONDITIONS = tuple(parse_expr(text) for text in ('a < 3', 'b > 0', 'a == b', 'c != 0', 'a + b > c'))
LOOP_COND = parse_expr('n > 0')
DECREMENT = Assign('n', Binary(BinaryOp.SUB, Var('n'), Lit(1)))

atoms = st.one_of(
    st.builds(Lit, st.integers(min_value=-9, max_value=9)),
    st.builds(Var, st.sampled_from(VARIABLES)),
)

exprs: st.SearchStrategy[Expr] = st.recursive(
    atoms,
    lambda children: st.one_of(
        st.builds(Unary, st.sampled_from(list(UnaryOp)), children),
        st.builds(Binary, st.sampled_from(list(BinaryOp)), children, children),
    ),
    max_leaves=8,
)

# 只用加减和小常数，保证数值不会膨胀
small_values = st.one_of(
    st.builds(Lit, st.integers(min_value=-3, max_value=3)),
    st.builds(Var, st.sampled_from(DATA_VARIABLES)),
    st.builds(
        Binary,
        st.sampled_from([BinaryOp.ADD, BinaryOp.SUB]),
        st.builds(Var, st.sampled_from(DATA_VARIABLES)),
        st.builds(Lit, st.integers(min_value=1, max_value=3)),
    ),
)

instructions = st.one_of(
    st.builds(Assign, st.sampled_from(DATA_VARIABLES), small_values),
    st.builds(Print, small_values),
)


def block_name(index: int) -> str:
    return f'b{index}'


@st.composite
def programs(draw, max_blocks: int = 10, entry_inputs: bool = True) -> Program:
    """生成一定终止的带循环随机程序，默认入口 b0 读入全部变量。"""
    count = draw(st.integers(min_value=1, max_value=max_blocks))
    blocks = []
    for index in range(count):
        instrs = []
        if index == 0 and entry_inputs:
            instrs.extend(Input(name) for name in VARIABLES)
        instrs.extend(draw(st.lists(instructions, max_size=3)))
        forward = list(range(index + 1, count))

        if not forward:
            kind = 'exit'
        else:
            kinds = ['exit', 'goto', 'branch', 'branch']
            if index > 0:
                kinds.append('latch')
            kind = draw(st.sampled_from(kinds))

        if kind == 'exit':
            term = Exit()
        elif kind == 'goto':
            term = Goto(block_name(draw(st.sampled_from(forward))))
        elif kind == 'branch':
            term = Branch(
                draw(st.sampled_from(CONDITIONS)),
                block_name(draw(st.sampled_from(forward))),
                block_name(draw(st.sampled_from(forward))),
            )
        else:
            instrs.append(DECREMENT)
            back = draw(st.integers(min_value=1 if entry_inputs else 0, max_value=index))
            term = Branch(LOOP_COND, block_name(back), block_name(draw(st.sampled_from(forward))))
        blocks.append(BasicBlock(block_name(index), tuple(instrs), term))
    return Program(tuple(blocks), block_name(0))


@st.composite
def programs_with_cond(draw, max_blocks: int = 10, entry_inputs: bool = True) -> tuple[Program, Expr]:
    """随机程序加上其中出现过的一个分支条件（没有分支时取条件池中的任意一个）。"""
    program = draw(programs(max_blocks, entry_inputs))
    conditions = list(dict.fromkeys(program.branch_conditions())) or list(CONDITIONS)
    return program, draw(st.sampled_from(conditions))
