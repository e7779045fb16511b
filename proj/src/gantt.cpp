#include "smsp/gantt.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace smsp {

namespace {

const char *kind_of(const Slot &slot) {
    if (std::holds_alternative<BatchSlot>(slot)) return "batch";
    if (std::holds_alternative<SetupSlot>(slot)) return "setup";
    return "maint";
}

std::string xml_escape(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    auto s = os.str();
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

} // namespace

std::string slot_label(const Slot &slot) {
    if (const auto *b = std::get_if<BatchSlot>(&slot)) {
        std::string lots;
        for (const auto &op : b->ops) {
            if (!lots.empty()) lots += ',';
            lots += "l" + op.lot.text();
        }
        return lots + "[" + std::to_string(b->ops.empty() ? 0 : b->ops.front().index) + "]";
    }
    if (const auto *s = std::get_if<SetupSlot>(&slot)) return s->setup.text();
    return std::get<MaintSlot>(slot).label.text();
}

std::string render_gantt_text(const TimedSchedule &ts) {
    const Time span = makespan(ts);
    const Time unit = std::max<Time>(1, (span + 79) / 80);
    std::size_t name_width = 0;
    for (const auto &ms : ts.schedule.machines) name_width = std::max(name_width, machine_name(ms.machine).size());

    std::ostringstream os;
    os << "makespan " << span << ", one column = " << unit << " time unit" << (unit == 1 ? "" : "s") << "\n";
    for (std::size_t m = 0; m < ts.schedule.machines.size(); ++m) {
        const auto &ms = ts.schedule.machines[m];
        std::string bar(static_cast<std::size_t>((span + unit - 1) / unit), '.');
        for (std::size_t j = 0; j < ms.slots.size(); ++j) {
            const char mark = std::holds_alternative<BatchSlot>(ms.slots[j])   ? '#'
                              : std::holds_alternative<SetupSlot>(ms.slots[j]) ? 's'
                                                                               : 'm';
            for (Time t = ts.start[m][j]; t < ts.completion(m, j); ++t) bar[static_cast<std::size_t>(t / unit)] = mark;
        }
        os << std::left << std::setw(static_cast<int>(name_width)) << machine_name(ms.machine) << " |" << bar << "|\n";
    }
    os << "\n";
    for (std::size_t m = 0; m < ts.schedule.machines.size(); ++m) {
        const auto &ms = ts.schedule.machines[m];
        if (ms.slots.empty()) continue;
        os << machine_name(ms.machine) << ":";
        for (std::size_t j = 0; j < ms.slots.size(); ++j) {
            os << " " << slot_label(ms.slots[j]) << "@" << ts.start[m][j] << "-" << ts.completion(m, j);
        }
        os << "\n";
    }
    return os.str();
}

std::string render_gantt_svg(const TimedSchedule &ts, double scale) {
    if (!(scale > 0)) scale = 1.0;
    const Time span = makespan(ts);
    const double label_w = 170;
    const double row_h = 28;
    const double top = 24;
    const double width = label_w + static_cast<double>(span) * scale + 20;
    const double height = top + row_h * static_cast<double>(ts.schedule.machines.size()) + 24;

    std::ostringstream os;
    os << R"(<?xml version="1.0" encoding="UTF-8"?>)" << "\n";
    os << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << num(width) << R"(" height=")" << num(height)
       << R"(" font-family="sans-serif" font-size="11">)" << "\n";
    os << R"svg(  <defs>
    <pattern id="hatch-setup" width="6" height="6" patternUnits="userSpaceOnUse" patternTransform="rotate(45)">
      <rect width="6" height="6" fill="#fde9b0"/><line x1="0" y1="0" x2="0" y2="6" stroke="#b58900" stroke-width="2"/>
    </pattern>
    <pattern id="hatch-maint" width="6" height="6" patternUnits="userSpaceOnUse" patternTransform="rotate(-45)">
      <rect width="6" height="6" fill="#f4c7c3"/><line x1="0" y1="0" x2="0" y2="6" stroke="#a33" stroke-width="2"/>
    </pattern>
  </defs>
  <style>
    .batch { fill: #b9d3ee; stroke: #2a4d69; }
    .setup { fill: url(#hatch-setup); stroke: #7a5c00; }
    .maint { fill: url(#hatch-maint); stroke: #7f1d1d; }
    .axis { stroke: #999; }
  </style>
)svg";
    const double axis_y = top + row_h * static_cast<double>(ts.schedule.machines.size());
    const Time step = std::max<Time>(1, static_cast<Time>(std::ceil(40.0 / scale / 10.0)) * 10);
    for (Time t = 0; t <= span; t += step) {
        const double x = label_w + static_cast<double>(t) * scale;
        os << R"(  <line class="axis" x1=")" << num(x) << R"(" y1=")" << num(top) << R"(" x2=")" << num(x)
           << R"(" y2=")" << num(axis_y) << R"("/>)" << "\n";
        os << R"(  <text x=")" << num(x) << R"(" y=")" << num(axis_y + 14) << R"(" text-anchor="middle">)" << t
           << "</text>\n";
    }
    for (std::size_t m = 0; m < ts.schedule.machines.size(); ++m) {
        const auto &ms = ts.schedule.machines[m];
        const double y = top + row_h * static_cast<double>(m);
        os << R"(  <g class="machine" data-machine=")" << xml_escape(machine_name(ms.machine)) << R"(">)" << "\n";
        os << R"(    <text x="4" y=")" << num(y + row_h / 2 + 4) << R"(">)" << xml_escape(machine_name(ms.machine))
           << "</text>\n";
        for (std::size_t j = 0; j < ms.slots.size(); ++j) {
            const double x = label_w + static_cast<double>(ts.start[m][j]) * scale;
            const double w = static_cast<double>(ts.duration[m][j]) * scale;
            const auto label = xml_escape(slot_label(ms.slots[j]));
            os << R"(    <rect class=")" << kind_of(ms.slots[j]) << R"(" x=")" << num(x) << R"(" y=")" << num(y + 3)
               << R"(" width=")" << num(w) << R"(" height=")" << num(row_h - 6) << R"("><title>)" << label << " "
               << ts.start[m][j] << "-" << ts.completion(m, j) << "</title></rect>\n";
            os << R"(    <text x=")" << num(x + w / 2) << R"(" y=")" << num(y + row_h / 2 + 4)
               << R"(" text-anchor="middle">)" << label << "</text>\n";
        }
        os << "  </g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace smsp
