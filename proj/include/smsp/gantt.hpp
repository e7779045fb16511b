#ifndef SMSP_GANTT_HPP
#define SMSP_GANTT_HPP

#include "smsp/schedule.hpp"

#include <string>

namespace smsp {

/// Short label for a slot: "l1[3]" or "l1,l2[1]" for batches, the setup id
/// or maintenance label otherwise.
std::string slot_label(const Slot &slot);

/// One row per machine: a character timeline ('#' batch, 's' setup,
/// 'm' maintenance, '.' idle) followed by the slot list with times.
std::string render_gantt_text(const TimedSchedule &ts);

/// One row per machine, one box per slot, `scale` pixels per time unit.
/// Boxes carry the classes "batch", "setup" or "maint".
std::string render_gantt_svg(const TimedSchedule &ts, double scale = 1.0);

} // namespace smsp

#endif // SMSP_GANTT_HPP
