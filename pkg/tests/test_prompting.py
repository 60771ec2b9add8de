import json
from pathlib import Path

import pytest

from icl_mt.corpus import LangPair, SentencePair
from icl_mt.prompting import (ChatMessage, KExceedsPool, Scenario, build_messages,
                              format_examples, language_name, messages_to_json,
                              select_random_examples)

from conftest import make_corpus

DATA = Path(__file__).parent / "data"
ZH_EN = LangPair("zh", "en")


def pair(src, tgt, i=0):
    return SentencePair(src, tgt, i)


class TestFormatExamples:
    def test_single_block(self):
        out = format_examples([pair("你好", "Hello")], ZH_EN)
        assert out == "Chinese: 你好\nEnglish: Hello\n"

    def test_empty(self):
        assert format_examples([], ZH_EN) == ""

    def test_four_blocks_three_separators(self):
        pairs = [pair(f"源{i}", f"tgt{i}", i) for i in range(4)]
        out = format_examples(pairs, ZH_EN)
        assert out.count("\n\n") == 3
        assert out.count("Chinese: ") == 4
        assert out.endswith("\n") and not out.endswith("\n\n")

    def test_order_preserved(self):
        pairs = [pair("乙", "second", 0), pair("甲", "first", 1)]
        out = format_examples(pairs, ZH_EN)
        assert out.index("乙") < out.index("甲")

    def test_unknown_language_falls_back_to_code(self):
        assert language_name("xx") == "XX"


class TestSelectRandom:
    def _pool(self, n=30):
        return make_corpus([(f"s{i}", f"t{i}") for i in range(n)])

    def test_k_zero(self):
        assert select_random_examples(self._pool(), 0, 1) == []

    def test_k_equals_pool_is_whole_set(self):
        pool = self._pool(8)
        chosen = select_random_examples(pool, 8, 42)
        assert sorted(p.index for p in chosen) == list(range(8))

    def test_seed_determinism(self):
        pool = self._pool()
        a = select_random_examples(pool, 4, 1234)
        b = select_random_examples(pool, 4, 1234)
        assert [p.index for p in a] == [p.index for p in b]

    def test_different_seeds_differ(self):
        pool = self._pool(100)
        a = select_random_examples(pool, 4, 1)
        b = select_random_examples(pool, 4, 2)
        assert [p.index for p in a] != [p.index for p in b]

    def test_no_replacement(self):
        pool = self._pool()
        for seed in range(20):
            chosen = select_random_examples(pool, 10, seed)
            assert len({p.index for p in chosen}) == 10

    def test_k_exceeds_pool(self):
        with pytest.raises(KExceedsPool):
            select_random_examples(self._pool(3), 4, 0)


class TestScenario:
    def test_zero_shot_requires_k_zero(self):
        with pytest.raises(ValueError):
            Scenario("zero_shot", k=2)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            Scenario("few_shot")


class TestBuildMessages:
    def test_structure_is_system_then_user(self):
        msgs = build_messages(Scenario("zero_shot"), "你好", [], ZH_EN)
        assert [m.role for m in msgs] == ["system", "user"]

    def test_zero_shot_has_no_examples_header(self):
        msgs = build_messages(Scenario("zero_shot"), "你好", [], ZH_EN)
        assert "Here are some examples" not in msgs[0].content

    def test_zero_shot_rejects_examples(self):
        with pytest.raises(ValueError):
            build_messages(Scenario("zero_shot"), "x", [pair("a", "b")], ZH_EN)

    def test_examples_appear_verbatim_in_order(self):
        pairs = [pair(f"源{i}", f"target {i}", i) for i in range(4)]
        msgs = build_messages(Scenario("retrieve_k", 4), "问题", pairs, ZH_EN)
        system = msgs[0].content
        positions = []
        for p in pairs:
            assert p.source_text in system
            assert p.target_text in system
            positions.append(system.index(p.source_text))
        assert positions == sorted(positions)

    def test_source_appears_exactly_once_in_user_message(self):
        msgs = build_messages(Scenario("zero_shot"), "这是一句话", [], ZH_EN)
        assert msgs[1].content.count("这是一句话") == 1

    def test_rule_sentences_present(self):
        msgs = build_messages(Scenario("zero_shot"), "x", [], ZH_EN)
        assert "Do not add extra blank lines" in msgs[0].content
        assert "prioritize naturalness and ease of communication" in msgs[0].content

    def test_golden_zero_shot(self):
        expected = json.loads((DATA / "golden_prompt_zero_shot.json").read_text("utf-8"))
        msgs = build_messages(Scenario("zero_shot"), "你好", [], ZH_EN)
        got = [{"role": m.role, "content": m.content} for m in msgs]
        assert got == expected

    def test_golden_retrieve_four(self):
        expected = json.loads((DATA / "golden_prompt_retrieve4.json").read_text("utf-8"))
        examples = [
            pair("你好", "Hello", 0),
            pair("谢谢你", "Thank you", 1),
            pair("早上好", "Good morning", 2),
            pair("天气不错", "Nice weather", 3),
        ]
        msgs = build_messages(Scenario("retrieve_k", 4), "今天天气很好", examples, ZH_EN)
        got = [{"role": m.role, "content": m.content} for m in msgs]
        assert got == expected

    def test_byte_stability_across_runs(self):
        pairs = [pair("一", "one", 0), pair("二", "two", 1)]
        a = build_messages(Scenario("retrieve_k", 2), "三", pairs, ZH_EN)
        b = build_messages(Scenario("retrieve_k", 2), "三", pairs, ZH_EN)
        assert a == b

    def test_json_dump_round_trips(self):
        msgs = build_messages(Scenario("zero_shot"), "你好", [], ZH_EN)
        parsed = json.loads(messages_to_json(msgs))
        assert parsed == [{"role": m.role, "content": m.content} for m in msgs]


class TestChatMessage:
    def test_empty_content_rejected(self):
        with pytest.raises(ValueError):
            ChatMessage("user", "")

    def test_bad_role(self):
        with pytest.raises(ValueError):
            ChatMessage("assistant", "hi")
