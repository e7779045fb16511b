#include "smsp/bench.hpp"
#include "smsp/gantt.hpp"
#include "smsp/schedule_json.hpp"
#include "support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>

using namespace smsp;

namespace {

TimedSchedule reference_timed() {
    const auto inst = testing::two_lots();
    auto eval = evaluate(testing::two_lots_reference_schedule(), inst);
    REQUIRE(eval.ok());
    return *eval.timed;
}

std::size_t count(const std::string &hay, const std::string &needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
    return n;
}

} // namespace

TEST_CASE("schedule documents") {
    const auto ts = reference_timed();
    const auto text = schedule_to_json(ts);
    CHECK(parse_schedule_json(text) == ts.schedule);
    CHECK(parse_schedule_json(schedule_to_json(ts, -1)) == ts.schedule);

    const auto doc = nlohmann::json::parse(text);
    REQUIRE(doc.is_array());
    CHECK(doc.size() == 3);
    const auto &implant = doc[2];
    CHECK(implant["group"] == "implant_128");
    CHECK(implant["machine"] == 1);
    CHECK(implant["slots"][0]["kind"] == "setup");
    CHECK(implant["slots"][0]["setup"] == "su128_1");
    CHECK(implant["slots"][1]["kind"] == "batch");
    CHECK(implant["slots"][1]["ops"][0]["lot"] == 2);
    CHECK(implant["slots"][1]["ops"][0]["index"] == 3);
    CHECK(implant["slots"][5]["kind"] == "maint");

    // times are not needed to read a schedule back
    const auto bare = parse_schedule_json(
        R"([{"group":"g","machine":1,"slots":[{"kind":"batch","ops":[{"lot":"a","index":1}]}]}])");
    REQUIRE(bare.machines.size() == 1);
    CHECK(bare.machines[0].machine.id == Term::number(1));
    CHECK(std::get<BatchSlot>(bare.machines[0].slots[0]).ops[0].lot == "a"_sym);
}

TEST_CASE("malformed schedule documents") {
    CHECK_THROWS_AS((void)parse_schedule_json("{"), ScheduleFormatError);
    CHECK_THROWS_AS((void)parse_schedule_json("{}"), ScheduleFormatError);
    CHECK_THROWS_AS((void)parse_schedule_json(R"([{"group":"g","slots":[]}])"), ScheduleFormatError);
    CHECK_THROWS_AS((void)parse_schedule_json(R"([{"group":"g","machine":1,"slots":[{"kind":"nap"}]}])"),
                    ScheduleFormatError);
    CHECK_THROWS_AS(
        (void)parse_schedule_json(R"([{"group":"g","machine":1,"slots":[{"kind":"batch","ops":[{"lot":1}]}]}])"),
        ScheduleFormatError);
    CHECK_THROWS_AS((void)parse_schedule_json(R"([{"group":"g","machine":1.5,"slots":[]}])"), ScheduleFormatError);
}

TEST_CASE("text chart") {
    const auto out = render_gantt_text(reference_timed());
    CHECK(out.find("implant_128/1") != std::string::npos);
    CHECK(out.find("lithotrack_fe_95/1") != std::string::npos);
    CHECK(out.find("l1,l2[1]") != std::string::npos);
    CHECK(out.find("implant_128_mn") != std::string::npos);
    CHECK(count(out, " |") == 3);
}

TEST_CASE("slot labels") {
    CHECK(slot_label(BatchSlot{{{Term::number(1), 2}, {Term::number(3), 2}}}) == "l1,l3[2]");
    CHECK(slot_label(SetupSlot{"su"_sym}) == "su");
    CHECK(slot_label(MaintSlot{"mn"_sym}) == "mn");
}

TEST_CASE("svg chart") {
    const auto ts = reference_timed();
    const auto out = render_gantt_svg(ts, 4.0);
    CHECK(out.find("<svg xmlns") != std::string::npos);
    CHECK(count(out, "<g class=\"machine\"") == 3);
    CHECK(count(out, "class=\"batch\"") == 9);
    CHECK(count(out, "class=\"setup\"") == 3);
    CHECK(count(out, "class=\"maint\"") == 2);
    CHECK(out.find("</svg>") != std::string::npos);
}

TEST_CASE("strategy grid") {
    const auto cfgs = standard_configs();
    REQUIRE(cfgs.size() == 8);
    int fixed = 0, flexible = 0, setup = 0;
    for (const auto &c : cfgs) {
        if (c.strategy == "Fixed") {
            ++fixed;
            CHECK(c.alloc.sub_size == 1);
        } else if (c.strategy == "Flexible") {
            ++flexible;
            CHECK_FALSE(c.alloc.by_setup);
        } else if (c.strategy == "Setup") {
            ++setup;
            CHECK(c.alloc.by_setup);
        }
        if (c.alloc.sub_size == 3) CHECK(c.alloc.lot_step == 0);
    }
    CHECK(fixed == 2);
    CHECK(flexible == 3);
    CHECK(setup == 3);
}

TEST_CASE("bench rows") {
    const auto dir = std::filesystem::temp_directory_path() / "smsp_bench_test";
    std::filesystem::create_directories(dir);
    std::filesystem::copy_file(testing::data_path("two_lots.lp"), dir / "b.lp",
                               std::filesystem::copy_options::overwrite_existing);
    std::ofstream(dir / "a.lp") << "tool(g,1)\n";

    BenchOptions opts;
    opts.stage1_limit = Seconds(5);
    opts.stage2_limit = Seconds(5);
    opts.threads = 2;
    const auto cfgs = standard_configs();
    const auto rows = run_bench({{"b", (dir / "b.lp").string()}, {"a", (dir / "a.lp").string()}}, cfgs, opts);
    REQUIRE(rows.size() == 16);
    for (std::size_t k = 0; k < 8; ++k) {
        CHECK(rows[k].instance == "a");
        CHECK(rows[k].strategy == cfgs[k].strategy);
        CHECK_FALSE(rows[k].objectives.has_value());
        CHECK(rows[k].note.rfind("unreadable", 0) == 0);
    }
    for (std::size_t k = 8; k < 16; ++k) {
        CHECK(rows[k].instance == "b");
        REQUIRE(rows[k].objectives.has_value());
        // every machine group has one machine, so all strategies coincide
        CHECK(*rows[k].objectives == Objectives{89, 1, 0});
        CHECK(rows[k].note.empty());
    }

    const auto line = bench_csv_row(rows[8]);
    CHECK(line.rfind("b,Fixed,1,0,89,1,0,", 0) == 0);
    CHECK(line.find(",yes,yes,\n") != std::string::npos);
    CHECK(count(bench_csv_header(), ",") == 11);
    CHECK(count(bench_csv_row(rows[0]), ",") >= 11);
    std::filesystem::remove_all(dir);
}
