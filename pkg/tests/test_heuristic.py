#!/usr/bin/env python3
"""
区域选择与区域评估测试
"""

import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError
from strategies import programs_with_cond

from py_cecd.exceptions import InstanceTooLargeError, InvalidRegionError
from py_cecd.heuristic import (
    EvalParams,
    ProfileData,
    best_region_by_profile,
    evaluate_region,
    select_region,
)
from py_cecd.parser import parse_expr, parse_program
from py_cecd.transform import Region

FIGURE1_PROFILE = ProfileData(freq={'bb4': 10, 'bb5': 10, 'bb7': 100, 'bb8': 100, 'bb9': 50, 'bb10': 50})

TWO_INSTRUCTION_REGION = """
block bb1 { n = input; c = input; br (c > 0) bb2 bb6; }
block bb2 { y = n + 1; goto bb3; }
block bb3 { br (x < 3) bb4 bb5; }
block bb4 { print 10; print 11; goto bb7; }
block bb5 { print 20; print 21; goto bb7; }
block bb6 { x = input; goto bb7; }
block bb7 { n = n - 1; y = n; br (n > 0) bb8 bb11; }
block bb8 { y = 1; y = 2; br (x < 3) bb9 bb10; }
block bb9 { print x; print y; goto bb7; }
block bb10 { print 0 - x; print y; goto bb7; }
block bb11 { print n; exit; }
"""


@pytest.fixture
def heavy_loop_header(figure1_text):
    """bb7 有 4 条指令的示例程序"""
    return parse_program(figure1_text.replace('n = n - 1;', 'n = n - 1;\n    c = c + 1;\n    c = c - 1;\n    c = c + 0;'))


class TestSelectRegion:
    """select_region 测试"""

    def test_figure1(self, figure1, cond_e, useful_region):
        region = select_region(figure1, cond_e)

        assert region.members == useful_region
        assert region.cond == cond_e

    def test_no_useful_nodes(self, figure1):
        assert len(select_region(figure1, parse_expr('c > 0'))) == 0


class TestEvaluateRegion:
    """evaluate_region 测试"""

    def test_figure1(self, figure1, cond_e, useful_region):
        """测试示例程序：growth = 2，n = 1"""
        report = evaluate_region(figure1, Region(useful_region, cond_e), EvalParams(k=0))

        assert report.growth == 2
        assert report.n == 1
        assert report.sizes == {'bb4': 1, 'bb5': 1, 'bb7': 1, 'bb8': 0, 'bb9': 1, 'bb10': 1}
        assert not report.accepted

    @pytest.mark.parametrize('k, accepted', [(0, False), (1, False), (2, True), (20, True)])
    def test_threshold(self, figure1, cond_e, useful_region, k, accepted):
        """测试接受条件 growth <= n * k"""
        report = evaluate_region(figure1, Region(useful_region, cond_e), EvalParams(k=k))

        assert report.accepted is accepted
        assert report.limit == k

    def test_larger_blocks(self, heavy_loop_header, cond_e, useful_region):
        """测试 bb7 有 4 条指令时 growth = 8"""
        region = Region(useful_region, cond_e)

        assert evaluate_region(heavy_loop_header, region, EvalParams(k=8)).growth == 8
        assert evaluate_region(heavy_loop_header, region, EvalParams(k=8)).accepted
        assert not evaluate_region(heavy_loop_header, region, EvalParams(k=7)).accepted

    def test_two_instructions_per_block(self, useful_region, cond_e):
        """测试区域内每块 2 条指令：growth = (8 + 8 + 4) - 12 = 8"""
        program = parse_program(TWO_INSTRUCTION_REGION)
        report = evaluate_region(program, Region(useful_region, cond_e), EvalParams(k=8))

        assert set(report.sizes.values()) == {2}
        assert report.growth == 8
        assert report.accepted
        assert not evaluate_region(program, Region(useful_region, cond_e), EvalParams(k=7)).accepted

    def test_empty_region(self, figure1, cond_e):
        """测试空区域：growth = 0 总是被接受"""
        report = evaluate_region(figure1, Region(frozenset(), cond_e), EvalParams(k=0))

        assert report.growth == 0
        assert report.n == 0
        assert report.accepted

    def test_default_k_from_setting(self, figure1, cond_e, useful_region, fresh_setting):
        fresh_setting.k = 2
        assert evaluate_region(figure1, Region(useful_region, cond_e)).accepted

    def test_invalid_region(self, figure1, cond_e):
        with pytest.raises(InvalidRegionError):
            evaluate_region(figure1, Region({'bb6', 'bb7'}, cond_e))

    def test_negative_k_rejected(self):
        with pytest.raises(ValidationError):
            EvalParams(k=-1)

    @given(programs_with_cond(), st.integers(min_value=0, max_value=5))
    def test_growth_bound(self, case, k):
        """测试 growth 不超过区域总指令数的两倍"""
        program, cond = case
        region = select_region(program, cond)
        report = evaluate_region(program, region, EvalParams(k=k))

        assert -sum(report.sizes.values()) <= report.growth <= 2 * sum(report.sizes.values())
        assert report.accepted == (report.growth <= report.n * k)


class TestProfileData:
    """剖析数据测试"""

    def test_from_json(self):
        profile = ProfileData.from_json('{"bb4": 3, "bb9": 0}')

        assert profile.get('bb4') == 3
        assert profile.get('bb9') == 0
        assert profile.get('missing') == 0

    def test_negative_frequency(self):
        with pytest.raises(ValidationError):
            ProfileData.from_json('{"bb4": -1}')


class TestBestRegionByProfile:
    """best_region_by_profile 测试"""

    def test_whole_region_when_accepted(self, figure1, cond_e, useful_region):
        """测试 k 足够大时取整个区域"""
        region, value = best_region_by_profile(figure1, cond_e, FIGURE1_PROFILE, EvalParams(k=2))

        assert region.members == useful_region
        assert value == 320

    def test_nothing_accepted(self, figure1, cond_e):
        """测试 k = 0：任何非空闭包中 bb7 都至少有两个可达副本"""
        region, value = best_region_by_profile(figure1, cond_e, FIGURE1_PROFILE, EvalParams(k=0))

        assert len(region) == 0
        assert value == 0

    def test_one_branch_side(self, figure1, cond_e):
        """测试 k = 1：只保留一侧分支的闭包 growth 为 1"""
        region, value = best_region_by_profile(figure1, cond_e, FIGURE1_PROFILE, EvalParams(k=1))

        assert value == 260
        assert region.members in ({'bb4', 'bb7', 'bb8', 'bb9'}, {'bb5', 'bb7', 'bb8', 'bb10'})
        assert evaluate_region(figure1, region, EvalParams(k=1)).growth == 1

    def test_zero_profile(self, figure1, cond_e):
        """测试频率全为 0 时返回空区域"""
        region, value = best_region_by_profile(figure1, cond_e, ProfileData(), EvalParams(k=20))

        assert len(region) == 0
        assert value == 0

    def test_prefers_cheaper_subregion(self):
        """测试整体区域被拒绝时选择被接受的子区域"""
        program = parse_program(
            """
            block b0 { x = input; br (x < 3) b1 b2; }
            block b1 { print 1; goto b3; }
            block b2 { print 2; goto b3; }
            block b3 { print 3; print 4; print 5; br (x < 3) b4 b5; }
            block b4 { print 6; goto b6; }
            block b5 { print 7; goto b6; }
            block b6 { br (x < 3) b7 b8; }
            block b7 { exit; }
            block b8 { exit; }
            """
        )
        cond = parse_expr('x < 3')
        profile = ProfileData(freq={'b3': 5, 'b4': 3, 'b5': 3, 'b6': 6})

        full = select_region(program, cond)
        assert full.members == {'b1', 'b2', 'b3', 'b4', 'b5', 'b6'}
        assert evaluate_region(program, full, EvalParams(k=1)).growth == 3
        assert not evaluate_region(program, full, EvalParams(k=1)).accepted

        region, value = best_region_by_profile(program, cond, profile, EvalParams(k=1))
        assert region.members == {'b4', 'b5', 'b6'}
        assert value == 12

    def test_too_large(self, figure1, cond_e):
        """测试候选块数超过上限"""
        with pytest.raises(InstanceTooLargeError):
            best_region_by_profile(figure1, cond_e, FIGURE1_PROFILE, limit=3)

    def test_limit_from_setting(self, figure1, cond_e, fresh_setting):
        fresh_setting.brute_force_limit = 5
        with pytest.raises(InstanceTooLargeError):
            best_region_by_profile(figure1, cond_e, FIGURE1_PROFILE)

    def test_limit_counts_profiled_blocks(self, figure1, cond_e, useful_region):
        """测试上限只按频率非零的块计数"""
        profile = ProfileData(freq={'bb7': 5, 'bb2': 9})
        region, value = best_region_by_profile(figure1, cond_e, profile, EvalParams(k=2), limit=1)

        assert region.members == useful_region
        assert value == 5

    @given(programs_with_cond(max_blocks=7), st.integers(min_value=0, max_value=3))
    def test_result_respects_budget(self, case, k):
        """测试选出的非空区域一定通过区域评估"""
        program, cond = case
        profile = ProfileData(freq={block_id: index + 1 for index, block_id in enumerate(program.ids)})
        region, value = best_region_by_profile(program, cond, profile, EvalParams(k=k))

        if len(region):
            assert evaluate_region(program, region, EvalParams(k=k)).accepted
            assert region.members <= select_region(program, cond).members
        else:
            assert value == 0
