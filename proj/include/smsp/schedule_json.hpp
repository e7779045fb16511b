#ifndef SMSP_SCHEDULE_JSON_HPP
#define SMSP_SCHEDULE_JSON_HPP

#include "smsp/schedule.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace smsp {

class ScheduleFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// JSON schedule document:
///
///   [ { "group": G, "machine": M,
///       "slots": [ { "kind": "batch", "ops": [{"lot": L, "index": I}, ...], "start": S, "duration": D },
///                  { "kind": "setup", "setup": S, "start": .., "duration": .. },
///                  { "kind": "maint", "label": L, "start": .., "duration": .. } ] }, ... ]
///
/// Identifiers are JSON integers when numeric and strings otherwise.
std::string schedule_to_json(const TimedSchedule &ts, int indent = 2);

/// Reads a schedule document. Start and duration fields are optional and
/// ignored; they are recomputed from the instance.
GlobalSchedule parse_schedule_json(std::string_view text);

} // namespace smsp

#endif // SMSP_SCHEDULE_JSON_HPP
