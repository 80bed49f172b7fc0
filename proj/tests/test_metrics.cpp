#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "agenteval/metrics.hpp"

using namespace agenteval;

namespace {

MissionResult mission(std::string case_id, int index, int count, ActionType at, bool passed,
                      int accepted = 0, int required = 1) {
    MissionResult r;
    r.case_id = std::move(case_id);
    r.mission_index = index;
    r.case_mission_count = count;
    r.action_type = at;
    r.relation_type = index == 0 ? RelationType::None : RelationType::Implicit;
    for (int i = 0; i <= index; ++i) r.combo_prefix.push_back(collapse_action_type(at));
    r.passed = passed;
    r.steps_accepted = passed ? required : accepted;
    r.steps_required = required;
    if (passed && is_multi_action(at)) r.optimal = true;
    return r;
}

CaseResult case_of(std::string id, std::vector<MissionResult> missions) {
    CaseResult cr;
    cr.case_id = std::move(id);
    for (const auto& m : missions) cr.combo.push_back(m.action_type);
    cr.mission_results = std::move(missions);
    cr.all_passed = std::all_of(cr.mission_results.begin(), cr.mission_results.end(),
                                [](const MissionResult& m) { return m.passed; });
    return cr;
}

}  // namespace

TEST_CASE("accuracy groups and percentages") {
    std::vector<MissionResult> results = {
        mission("a", 0, 1, ActionType::MultiSerial, true),
        mission("b", 0, 1, ActionType::MultiSerial, false),
        mission("c", 0, 1, ActionType::MultiSerial, false),
        mission("d", 0, 1, ActionType::MultiSerial, false),
        mission("e", 0, 1, ActionType::Chat, true),
    };

    auto table = accuracy(results, GroupBy::ActionType);
    REQUIRE(table.size() == 2);
    CHECK(table[0].key == "chat");
    CHECK(table[0].percent == doctest::Approx(100.0));
    CHECK(table[1].key == "multi_serial");
    CHECK(table[1].percent == doctest::Approx(25.0));

    auto by_count = accuracy(results, GroupBy::MissionCount);
    REQUIRE(by_count.size() == 1);
    CHECK(by_count[0].total == 5);
}

TEST_CASE("all passed gives 100 in every grouping") {
    std::vector<MissionResult> results = {
        mission("a", 0, 2, ActionType::Single, true),
        mission("a", 1, 2, ActionType::Chat, true),
    };
    for (GroupBy g : {GroupBy::MissionCount, GroupBy::ActionType, GroupBy::RelationType,
                      GroupBy::ComboPrefix}) {
        for (const auto& row : accuracy(results, g)) {
            CHECK(row.percent == doctest::Approx(100.0));
        }
    }
}

TEST_CASE("overall accuracy equals the size-weighted mean of group accuracies") {
    std::mt19937 rng(31337);
    std::vector<MissionResult> results;
    const ActionType kinds[] = {ActionType::Single, ActionType::Chat, ActionType::MultiSerial,
                                ActionType::Clarify};
    for (int i = 0; i < 200; ++i) {
        results.push_back(mission("c" + std::to_string(i), 0, 1, kinds[rng() % 4], rng() % 3 != 0));
    }

    auto table = accuracy(results, GroupBy::ActionType);
    double weighted = 0.0;
    int total = 0;
    for (const auto& row : table) {
        weighted += row.percent * row.total;
        total += row.total;
    }
    double overall =
        100.0 * static_cast<double>(std::count_if(results.begin(), results.end(),
                                                  [](const MissionResult& r) { return r.passed; })) /
        static_cast<double>(results.size());
    CHECK(weighted / total == doctest::Approx(overall));
}

TEST_CASE("optimal path rate counts only passed multi missions") {
    std::vector<MissionResult> results = {
        mission("a", 0, 1, ActionType::MultiParallel, true),
        mission("b", 0, 1, ActionType::MultiSerialParallel, true),
        mission("c", 0, 1, ActionType::Single, true),  // not multi: ignored
    };
    results[1].optimal = false;
    CHECK(optimal_path_rate(results) == doctest::Approx(50.0));

    results[1].optimal = true;
    CHECK(optimal_path_rate(results) == doctest::Approx(100.0));

    std::vector<MissionResult> no_multi = {mission("c", 0, 1, ActionType::Single, true)};
    CHECK_FALSE(optimal_path_rate(no_multi).has_value());

    std::vector<MissionResult> failed_multi = {mission("a", 0, 1, ActionType::MultiSerial, false)};
    CHECK_FALSE(optimal_path_rate(failed_multi).has_value());
}

TEST_CASE("accomplished progress formula") {
    SUBCASE("all passed is 100") {
        auto cr = case_of("a", {mission("a", 0, 2, ActionType::Single, true),
                                mission("a", 1, 2, ActionType::Chat, true)});
        CHECK(accomplished_progress({cr}) == doctest::Approx(100.0));
    }

    SUBCASE("failure at the first step of a 4-mission case is 0") {
        auto cr = case_of("a", {mission("a", 0, 4, ActionType::Single, false, 0, 1),
                                mission("a", 1, 4, ActionType::Chat, false, 0, 1),
                                mission("a", 2, 4, ActionType::MultiSerial, false, 0, 3),
                                mission("a", 3, 4, ActionType::Single, false, 0, 1)});
        CHECK(accomplished_progress({cr}) == doctest::Approx(0.0));
    }

    SUBCASE("pass, pass, one of three steps, unreached = 58.33") {
        auto cr = case_of("a", {mission("a", 0, 4, ActionType::Single, true),
                                mission("a", 1, 4, ActionType::Chat, true),
                                mission("a", 2, 4, ActionType::MultiSerial, false, 1, 3),
                                mission("a", 3, 4, ActionType::Single, false, 0, 1)});
        CHECK(accomplished_progress({cr}) == doctest::Approx(58.3333).epsilon(0.0001));
    }

    SUBCASE("failed mission at full step count stays below a pass") {
        auto cr = case_of("a", {mission("a", 0, 1, ActionType::MultiSerial, false, 3, 3)});
        CHECK(accomplished_progress({cr}) < 100.0);
        CHECK(accomplished_progress({cr}) > 99.0);
    }

    SUBCASE("progress is at least the case pass rate, equal only without partial credit") {
        auto passed = case_of("a", {mission("a", 0, 1, ActionType::Single, true)});
        auto partial = case_of("b", {mission("b", 0, 1, ActionType::MultiSerial, false, 1, 3)});
        auto zero = case_of("c", {mission("c", 0, 1, ActionType::Single, false, 0, 1)});

        double with_partial = accomplished_progress({passed, partial, zero});
        double pass_rate = 100.0 / 3.0;
        CHECK(with_partial > pass_rate);

        double without_partial = accomplished_progress({passed, zero});
        CHECK(without_partial == doctest::Approx(50.0));
    }
}

TEST_CASE("msss modes and fixture values") {
    std::vector<Combo> combos;
    for (ActionClass c : {ActionClass::Single, ActionClass::Chat}) combos.push_back(Combo{{c}});
    CHECK(msss(combos, 1) == doctest::Approx(50.0));

    // 8 distinct combos of length <= 2 against 4 + 16.
    std::vector<Combo> eight;
    for (const auto& c : generate_switchspace(2, true)) {
        eight.push_back(c);
        if (eight.size() == 8) break;
    }
    CHECK(msss(eight, 2) == doctest::Approx(40.0));

    // Full coverage at every length.
    auto full = generate_switchspace(4, true);
    CHECK(msss(full, 4) == doctest::Approx(100.0));
    CHECK(msss(full, 4, MsssMode::Exact) == doctest::Approx(100.0));

    // Exact mode counts only the top length.
    std::vector<Combo> only_len1 = generate_switchspace(1);
    CHECK(msss(only_len1, 4, MsssMode::Exact) == doctest::Approx(0.0));
}

TEST_CASE("msss is monotone as combos are added") {
    auto all = generate_switchspace(3, true);
    std::vector<Combo> present;
    double prev = 0.0;
    for (const auto& c : all) {
        present.push_back(c);
        double now = msss(present, 3);
        CHECK(now >= prev);
        prev = now;
    }
    CHECK(prev == doctest::Approx(100.0));
}

TEST_CASE("error distribution with and without folding") {
    std::vector<MissionResult> results;
    auto failed = [&](ErrorClass cls) {
        MissionResult r = mission("x", 0, 1, ActionType::Single, false);
        r.error = cls;
        results.push_back(r);
    };
    failed(ErrorClass::ToolError);
    failed(ErrorClass::ToolError);
    failed(ErrorClass::ToolError);
    failed(ErrorClass::ParamValueError);

    auto rows = error_distribution(results, false);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].percent == doctest::Approx(75.0));
    CHECK(rows[3].percent == doctest::Approx(25.0));

    double sum = 0.0;
    for (const auto& row : rows) sum += row.percent;
    CHECK(sum == doctest::Approx(100.0));

    // FormatError folds into ToolError in the four-class view.
    results.clear();
    failed(ErrorClass::FormatError);
    failed(ErrorClass::ParamNameHallucination);
    auto folded = error_distribution(results, true);
    REQUIRE(folded.size() == 4);
    CHECK(folded[0].error_class == ErrorClass::ToolError);
    CHECK(folded[0].percent == doctest::Approx(50.0));

    // One of each of the four taxonomy classes: 25 each.
    results.clear();
    failed(ErrorClass::ToolError);
    failed(ErrorClass::ParamNameHallucination);
    failed(ErrorClass::ParamValueHallucination);
    failed(ErrorClass::ParamValueError);
    for (const auto& row : error_distribution(results, true)) {
        CHECK(row.percent == doctest::Approx(25.0));
    }
}

TEST_CASE("adding a passed mission never lowers its accuracy cells") {
    std::vector<MissionResult> results = {
        mission("a", 0, 1, ActionType::Single, true),
        mission("b", 0, 1, ActionType::Single, false),
    };
    for (GroupBy g : {GroupBy::MissionCount, GroupBy::ActionType, GroupBy::RelationType,
                      GroupBy::ComboPrefix}) {
        auto before = accuracy(results, g);
        auto grown = results;
        grown.push_back(mission("c", 0, 1, ActionType::Single, true));
        auto after = accuracy(grown, g);
        for (const auto& row : before) {
            for (const auto& row2 : after) {
                if (row.key == row2.key) CHECK(row2.percent >= row.percent);
            }
        }
    }
}
