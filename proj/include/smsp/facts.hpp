#ifndef SMSP_FACTS_HPP
#define SMSP_FACTS_HPP

#include "smsp/instance.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace smsp {

/// Raised by parse_facts. Carries the 1-based position of the offending
/// token or fact.
class FactError : public std::runtime_error {
public:
    enum class Kind { Syntax, Arity, Value, Dangling, Duplicate };

    FactError(Kind kind, int line, int column, const std::string &message);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int column() const { return column_; }

private:
    Kind kind_;
    int line_;
    int column_;
};

/// Reads the five-predicate fact format:
///
///   route(P,I,G,T,Min,Max,S).  setup(G,S,T,Min).  pm(G,L,lots|time,Min,Max,T).
///   tool(G,M).                 lot(L,P).
///
/// Arguments are symbols matching [a-z][A-Za-z0-9_]* or decimal integers;
/// `%` starts a comment running to end of line. A route setup of 0 means
/// any setup will do.
Instance parse_facts(std::string_view text);

/// Emits one fact per line, grouped by predicate name in ascending order.
/// Routes, setups and lots are sorted by arguments; tool and pm facts keep
/// their per-group declaration order, which is significant.
std::string serialize_facts(const Instance &inst);

Instance load_facts_file(const std::string &path);

} // namespace smsp

#endif // SMSP_FACTS_HPP
