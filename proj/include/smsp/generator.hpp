#ifndef SMSP_GENERATOR_HPP
#define SMSP_GENERATOR_HPP

#include "smsp/instance.hpp"

#include <cstdint>
#include <stdexcept>

namespace smsp {

struct GeneratorParams {
    int n_lots = 7;
    int n_products = 2;
    int route_len = 10;
    int n_groups = 3;
    int machines_per_group = 3;
    double batch_fraction = 0.2;
    std::uint64_t seed = 1;
};

class GeneratorError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Builds a re-entrant benchmark instance. Lots are spread round-robin over
/// products; every route visits tool groups repeatedly once route_len
/// exceeds n_groups. All durations fall in [5, 25]. Maintenance windows
/// are sized so that inserting a maintenance whenever the next batch would
/// overflow the window is always admissible, so generated instances are
/// feasible.
///
/// Output depends only on the parameters (no std:: distributions are used,
/// so it is identical across standard library implementations).
Instance generate_instance(const GeneratorParams &params);

} // namespace smsp

#endif // SMSP_GENERATOR_HPP
