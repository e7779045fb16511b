#include "smsp/schedule_json.hpp"

#include <json.hpp>

namespace smsp {

namespace {

using nlohmann::json;

json term_json(const Term &t) {
    if (t.is_number()) return t.value();
    return t.text();
}

Term json_term(const json &j, const char *what) {
    if (j.is_number_unsigned()) return Term::number(j.get<std::uint64_t>());
    if (j.is_number_integer()) {
        auto v = j.get<std::int64_t>();
        if (v < 0) throw ScheduleFormatError(std::string(what) + " must not be negative");
        return Term::number(static_cast<std::uint64_t>(v));
    }
    if (j.is_string()) return Term::symbol(j.get<std::string>());
    throw ScheduleFormatError(std::string(what) + " must be an integer or a string");
}

const json &field(const json &obj, const char *name) {
    auto it = obj.find(name);
    if (it == obj.end()) throw ScheduleFormatError(std::string("missing field \"") + name + "\"");
    return *it;
}

} // namespace

std::string schedule_to_json(const TimedSchedule &ts, int indent) {
    json doc = json::array();
    for (std::size_t m = 0; m < ts.schedule.machines.size(); ++m) {
        const auto &ms = ts.schedule.machines[m];
        json slots = json::array();
        for (std::size_t j = 0; j < ms.slots.size(); ++j) {
            json s;
            if (const auto *b = std::get_if<BatchSlot>(&ms.slots[j])) {
                s["kind"] = "batch";
                s["ops"] = json::array();
                for (const auto &op : b->ops) s["ops"].push_back({{"lot", term_json(op.lot)}, {"index", op.index}});
            } else if (const auto *su = std::get_if<SetupSlot>(&ms.slots[j])) {
                s["kind"] = "setup";
                s["setup"] = term_json(su->setup);
            } else {
                s["kind"] = "maint";
                s["label"] = term_json(std::get<MaintSlot>(ms.slots[j]).label);
            }
            s["start"] = ts.start[m][j];
            s["duration"] = ts.duration[m][j];
            slots.push_back(std::move(s));
        }
        doc.push_back({{"group", term_json(ms.machine.group)},
                       {"machine", term_json(ms.machine.id)},
                       {"slots", std::move(slots)}});
    }
    return doc.dump(indent) + "\n";
}

GlobalSchedule parse_schedule_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ScheduleFormatError(e.what());
    }
    if (!doc.is_array()) throw ScheduleFormatError("schedule document must be an array of machines");
    GlobalSchedule gs;
    for (const auto &jm : doc) {
        if (!jm.is_object()) throw ScheduleFormatError("machine entry must be an object");
        MachineSchedule ms;
        ms.machine = {json_term(field(jm, "group"), "group"), json_term(field(jm, "machine"), "machine")};
        const auto &slots = field(jm, "slots");
        if (!slots.is_array()) throw ScheduleFormatError("slots must be an array");
        for (const auto &js : slots) {
            const auto &kind = field(js, "kind");
            if (kind == "batch") {
                BatchSlot b;
                const auto &ops = field(js, "ops");
                if (!ops.is_array()) throw ScheduleFormatError("ops must be an array");
                for (const auto &op : ops) {
                    const auto &index = field(op, "index");
                    if (!index.is_number_integer()) throw ScheduleFormatError("index must be an integer");
                    b.ops.push_back({json_term(field(op, "lot"), "lot"), index.get<int>()});
                }
                ms.slots.emplace_back(std::move(b));
            } else if (kind == "setup") {
                ms.slots.emplace_back(SetupSlot{json_term(field(js, "setup"), "setup")});
            } else if (kind == "maint") {
                ms.slots.emplace_back(MaintSlot{json_term(field(js, "label"), "label")});
            } else {
                throw ScheduleFormatError("unknown slot kind " + kind.dump());
            }
        }
        gs.machines.push_back(std::move(ms));
    }
    return gs;
}

} // namespace smsp
