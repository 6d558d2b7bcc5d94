#!/usr/bin/env python3
"""
解释器测试
"""

import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import programs

from py_cecd.interpreter import ErrorKind, Outcome, equivalent, evaluate, input_vectors, run
from py_cecd.ir import Branch, Lit, Print
from py_cecd.parser import parse_expr, parse_program

BRANCHY = """
block b0 { x = input; br (x < 3) t f; }
block t { print 1; exit; }
block f { print 0; exit; }
"""


class TestRun:
    """run 测试"""

    def test_straight_line(self):
        """测试直线程序"""
        trace, stats = run(parse_program('block b0 { print 7; exit; }'), [], 10)

        assert trace.outputs == [7]
        assert trace.outcome is Outcome.COMPLETED
        assert stats.steps == 2

    def test_branch_counts_evaluation(self):
        """测试分支求值计数"""
        trace, stats = run(parse_program(BRANCHY), [5], 100)

        assert trace.outputs == [0]
        assert stats.evals_of(parse_expr('x < 3')) == 1
        assert stats.blocks_visited == ['b0', 'f']

    def test_infinite_loop_exhausts_fuel(self):
        """测试燃料耗尽"""
        trace, stats = run(parse_program('block b0 { goto b0; }'), [], 100)

        assert trace.outcome is Outcome.FUEL_EXHAUSTED
        assert trace.outputs == []
        assert stats.steps == 100

    def test_undefined_variable(self):
        """测试读取未赋值变量"""
        trace, _ = run(parse_program('block b0 { print y; exit; }'), [], 10)

        assert trace.outcome is Outcome.RUNTIME_ERROR
        assert trace.error is ErrorKind.UNDEFINED_VARIABLE

    def test_input_exhausted(self):
        """测试输入耗尽"""
        trace, _ = run(parse_program('block b0 { x = input; print x; exit; }'), [], 10)

        assert trace.outcome is Outcome.RUNTIME_ERROR
        assert trace.error is ErrorKind.INPUT_EXHAUSTED

    def test_env_provides_initial_state(self):
        """测试初始变量绑定"""
        trace, _ = run(parse_program('block b0 { print y + 1; exit; }'), [], 10, env={'y': 4})
        assert trace.outputs == [5]

    def test_default_fuel_from_setting(self, fresh_setting):
        """测试默认燃料取自全局设置"""
        fresh_setting.fuel = 3
        trace, stats = run(parse_program('block b0 { goto b0; }'), [])

        assert trace.fuel_exhausted
        assert stats.steps == 3

    def test_invalid_fuel(self):
        with pytest.raises(ValueError):
            run(parse_program('block b0 { exit; }'), [], 0)

    def test_figure1_loop(self, figure1):
        """测试示例程序在 x 已知时的输出"""
        trace, stats = run(figure1, [3, 1], 1000, env={'x': 1})

        assert trace.completed
        assert trace.outputs == [10, 1, 1, 0]
        assert stats.evals_of(parse_expr('x < 3')) == 3

    def test_trace_finishes_once(self):
        trace, _ = run(parse_program('block b0 { exit; }'), [], 10)
        with pytest.raises(RuntimeError):
            trace.finish(Outcome.COMPLETED)

    @given(programs(), st.integers(min_value=0, max_value=1000))
    def test_deterministic(self, program, seed):
        """测试相同输入得到相同结果"""
        inputs, env = input_vectors(program, 1, seed)[0]
        first = run(program, inputs, 10000, env=env)
        second = run(program, inputs, 10000, env=env)
        assert first == second

    @given(programs(), st.integers(min_value=0, max_value=1000))
    def test_branch_total(self, program, seed):
        """测试完成的执行中条件求值总数等于执行过的分支块数"""
        inputs, env = input_vectors(program, 1, seed)[0]
        trace, stats = run(program, inputs, 10000, env=env)
        if trace.completed:
            executed = sum(1 for block_id in stats.blocks_visited if isinstance(program.block(block_id).term, Branch))
            assert stats.branches_executed == executed

    @given(programs(), st.integers(min_value=0, max_value=1000))
    def test_fuel_monotonicity(self, program, seed):
        """测试燃料单调性"""
        inputs, env = input_vectors(program, 1, seed)[0]
        trace, stats = run(program, inputs, 10000, env=env)
        if trace.completed:
            assert run(program, inputs, stats.steps, env=env)[0] == trace
            assert run(program, inputs, stats.steps + 50, env=env)[0] == trace


class TestEvaluate:
    """表达式求值测试"""

    @pytest.mark.parametrize(
        'text, expected',
        [
            ('1 + 2 * 3', 7),
            ('0 - 5', -5),
            ('3 < 4', 1),
            ('3 >= 4', 0),
            ('2 && 0', 0),
            ('0 || -1', 1),
            ('!0', 1),
            ('!7', 0),
            ('-(2 - 5)', 3),
            ('4 == 4', 1),
            ('4 != 4', 0),
        ],
    )
    def test_values(self, text, expected):
        assert evaluate(parse_expr(text), {}) == expected


class TestEquivalent:
    """equivalent 测试"""

    def test_reflexive(self, figure1):
        assert equivalent(figure1, figure1, [2, 1, 5], 1000, env={'x': 0})

    def test_figure1_and_figure4(self, figure1, figure4):
        """测试示例程序与变换结果等价"""
        for inputs, env in input_vectors(figure1, 30, 7):
            assert equivalent(figure1, figure4, inputs, 10000, env=env)

    def test_changed_print_constant(self):
        """测试打印常量不同的程序不等价"""
        original = parse_program('block b0 { print 7; exit; }')
        block = original.block('b0')
        changed = original.replace_blocks([type(block)(block.id, (Print(Lit(8)),), block.term)])

        assert not equivalent(original, changed, [], 10)

    def test_fuel_exhausted_prefix(self):
        """测试原程序燃料耗尽时只比较前缀"""
        slow = parse_program('block b0 { print 1; goto b1; } block b1 { goto b2; } block b2 { print 2; exit; }')
        fast = parse_program('block b0 { print 1; goto b2; } block b2 { print 2; exit; }')

        assert equivalent(slow, fast, [], 4)
        assert not equivalent(fast, slow, [], 4)


class TestInputVectors:
    """随机输入测试"""

    def test_shape_and_range(self, figure1):
        vectors = input_vectors(figure1, 5, 1)

        assert len(vectors) == 5
        for inputs, env in vectors:
            assert len(inputs) == 3 + 4
            assert set(env) == {'n', 'c', 'x', 'y'}
            assert all(-8 <= value <= 8 for value in inputs + list(env.values()))

    def test_reproducible(self, figure1):
        assert input_vectors(figure1, 3, 42) == input_vectors(figure1, 3, 42)
