#include "smsp/facts.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

namespace smsp {

FactError::FactError(Kind kind, int line, int column, const std::string &message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      kind_(kind), line_(line), column_(column) {}

namespace {

struct Pos {
    int line = 1;
    int column = 1;
};

struct Arg {
    Term term;
    Pos pos;
};

struct Fact {
    std::string name;
    std::vector<Arg> args;
    Pos pos;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::optional<Fact> next_fact() {
        skip_blank();
        if (at_end()) return std::nullopt;
        Fact fact;
        fact.pos = pos_;
        if (!is_lower(peek())) fail("expected predicate name");
        fact.name = read_word();
        skip_blank();
        expect('(');
        do {
            skip_blank();
            fact.args.push_back(read_term());
            skip_blank();
        } while (accept(','));
        expect(')');
        skip_blank();
        expect('.');
        return fact;
    }

private:
    static bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
    static bool is_digit(char c) { return c >= '0' && c <= '9'; }
    static bool is_word(char c) {
        return is_lower(c) || is_digit(c) || c == '_' || (c >= 'A' && c <= 'Z');
    }

    [[nodiscard]] bool at_end() const { return i_ >= text_.size(); }
    [[nodiscard]] char peek() const { return at_end() ? '\0' : text_[i_]; }

    void advance() {
        if (text_[i_] == '\n') {
            ++pos_.line;
            pos_.column = 1;
        } else {
            ++pos_.column;
        }
        ++i_;
    }

    void skip_blank() {
        while (!at_end()) {
            char c = peek();
            if (c == '%') {
                while (!at_end() && peek() != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
                advance();
            } else {
                break;
            }
        }
    }

    [[noreturn]] void fail(const std::string &what) const {
        std::string got = at_end() ? std::string("end of input") : "'" + std::string(1, peek()) + "'";
        throw FactError(FactError::Kind::Syntax, pos_.line, pos_.column, what + ", got " + got);
    }

    void expect(char c) {
        if (peek() != c || at_end()) fail(std::string("expected '") + c + "'");
        advance();
    }

    bool accept(char c) {
        if (at_end() || peek() != c) return false;
        advance();
        return true;
    }

    std::string read_word() {
        std::string out;
        while (!at_end() && is_word(peek())) {
            out.push_back(peek());
            advance();
        }
        return out;
    }

    Arg read_term() {
        Arg arg;
        arg.pos = pos_;
        if (is_lower(peek())) {
            arg.term = Term::symbol(read_word());
            return arg;
        }
        if (!is_digit(peek())) fail("expected symbol or nonnegative integer");
        std::uint64_t v = 0;
        while (!at_end() && is_digit(peek())) {
            auto d = static_cast<std::uint64_t>(peek() - '0');
            if (v > (std::numeric_limits<std::uint64_t>::max() - d) / 10) {
                throw FactError(FactError::Kind::Value, arg.pos.line, arg.pos.column, "integer out of range");
            }
            v = v * 10 + d;
            advance();
        }
        if (!at_end() && is_word(peek())) fail("malformed integer");
        arg.term = Term::number(v);
        return arg;
    }

    std::string_view text_;
    std::size_t i_ = 0;
    Pos pos_;
};

[[noreturn]] void fail_at(FactError::Kind kind, Pos p, const std::string &msg) {
    throw FactError(kind, p.line, p.column, msg);
}

std::int64_t integer(const Arg &a, const char *field, std::int64_t lo = 0) {
    if (!a.term.is_number()) {
        fail_at(FactError::Kind::Value, a.pos, std::string(field) + " must be an integer");
    }
    if (a.term.value() > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
        fail_at(FactError::Kind::Value, a.pos, std::string(field) + " out of range");
    }
    auto v = static_cast<std::int64_t>(a.term.value());
    if (v < lo) fail_at(FactError::Kind::Value, a.pos, std::string(field) + " must be at least " + std::to_string(lo));
    return v;
}

const std::map<std::string, std::size_t> kArity = {
    {"route", 7}, {"setup", 4}, {"pm", 6}, {"tool", 2}, {"lot", 2},
};

} // namespace

Instance parse_facts(std::string_view text) {
    Lexer lexer(text);
    Instance inst;

    std::map<ProductId, std::map<int, OpSpec>> steps;
    std::map<std::pair<ProductId, int>, Pos> route_pos;
    std::map<LotId, Pos> lot_pos;
    std::set<std::pair<ToolGroupId, MaintLabel>> maint_keys;
    std::set<std::pair<ToolGroupId, MachineId>> tool_keys;
    std::vector<Lot> lots;

    while (auto fact = lexer.next_fact()) {
        auto arity = kArity.find(fact->name);
        if (arity == kArity.end()) {
            fail_at(FactError::Kind::Syntax, fact->pos, "unknown predicate '" + fact->name + "'");
        }
        if (fact->args.size() != arity->second) {
            fail_at(FactError::Kind::Arity, fact->pos,
                    fact->name + " expects " + std::to_string(arity->second) + " arguments, got " +
                        std::to_string(fact->args.size()));
        }
        const auto &a = fact->args;
        if (fact->name == "route") {
            OpSpec op;
            op.product = a[0].term;
            op.index = static_cast<int>(integer(a[1], "route index", 1));
            op.group = a[2].term;
            op.proc_time = integer(a[3], "processing time");
            op.min_batch = static_cast<int>(integer(a[4], "minimum batch size"));
            op.max_batch = static_cast<int>(integer(a[5], "maximum batch size"));
            if (a[6].term.is_number() && a[6].term.value() == 0) {
                op.setup = AnySetup{};
            } else {
                op.setup = a[6].term;
            }
            auto [it, fresh] = steps[op.product].emplace(op.index, op);
            if (!fresh) {
                fail_at(FactError::Kind::Duplicate, fact->pos,
                        "duplicate route step " + op.product.text() + "," + std::to_string(op.index));
            }
            route_pos[{op.product, op.index}] = fact->pos;
        } else if (fact->name == "setup") {
            SetupSpec s;
            s.group = a[0].term;
            s.id = a[1].term;
            if (s.id.is_number() && s.id.value() == 0) {
                fail_at(FactError::Kind::Value, a[1].pos, "setup 0 is reserved for 'any setup'");
            }
            s.change_time = integer(a[2], "setup time");
            s.min_ops = static_cast<int>(integer(a[3], "setup minimum"));
            if (!inst.setups.emplace(std::pair{s.group, s.id}, s).second) {
                fail_at(FactError::Kind::Duplicate, fact->pos, "duplicate setup " + s.group.text() + "," + s.id.text());
            }
        } else if (fact->name == "pm") {
            MaintenanceSpec m;
            m.group = a[0].term;
            m.label = a[1].term;
            if (a[2].term == Term::symbol("lots")) {
                m.trigger = Trigger::Lots;
            } else if (a[2].term == Term::symbol("time")) {
                m.trigger = Trigger::Time;
            } else {
                fail_at(FactError::Kind::Value, a[2].pos, "maintenance type must be 'lots' or 'time'");
            }
            m.min = integer(a[3], "maintenance minimum");
            m.max = integer(a[4], "maintenance maximum");
            m.duration = integer(a[5], "maintenance duration");
            if (!maint_keys.insert({m.group, m.label}).second) {
                fail_at(FactError::Kind::Duplicate, fact->pos,
                        "duplicate maintenance " + m.group.text() + "," + m.label.text());
            }
            inst.maints[m.group].push_back(m);
        } else if (fact->name == "tool") {
            Machine m{a[0].term, a[1].term};
            if (!tool_keys.insert({m.group, m.id}).second) {
                fail_at(FactError::Kind::Duplicate, fact->pos, "duplicate tool " + m.group.text() + "," + m.id.text());
            }
            inst.machines[m.group].push_back(m);
        } else {
            Lot l{a[0].term, a[1].term};
            if (!lot_pos.emplace(l.id, fact->pos).second) {
                fail_at(FactError::Kind::Duplicate, fact->pos, "duplicate lot " + l.id.text());
            }
            lots.push_back(l);
        }
    }

    for (auto &[product, by_index] : steps) {
        Route r;
        r.product = product;
        for (auto &[idx, op] : by_index) {
            if (!inst.machines.contains(op.group)) {
                fail_at(FactError::Kind::Dangling, route_pos[{product, idx}],
                        "route names undeclared tool group " + op.group.text());
            }
            r.steps.push_back(op);
        }
        inst.routes.emplace(product, std::move(r));
    }
    for (auto &l : lots) {
        if (!inst.routes.contains(l.product)) {
            fail_at(FactError::Kind::Dangling, lot_pos[l.id], "lot names product without route " + l.product.text());
        }
        inst.add_lot(std::move(l));
    }
    return inst;
}

std::string serialize_facts(const Instance &inst) {
    std::ostringstream os;

    std::vector<Lot> lots = inst.lots();
    std::sort(lots.begin(), lots.end(), [](const Lot &a, const Lot &b) {
        return std::tie(a.id, a.product) < std::tie(b.id, b.product);
    });
    for (const auto &l : lots) os << "lot(" << l.id << ',' << l.product << ").\n";

    for (const auto &[group, list] : inst.maints) {
        for (const auto &m : list) {
            os << "pm(" << m.group << ',' << m.label << ',' << (m.trigger == Trigger::Lots ? "lots" : "time") << ','
               << m.min << ',' << m.max << ',' << m.duration << ").\n";
        }
    }

    for (const auto &[product, route] : inst.routes) {
        for (const auto &op : route.steps) {
            os << "route(" << op.product << ',' << op.index << ',' << op.group << ',' << op.proc_time << ','
               << op.min_batch << ',' << op.max_batch << ',' << to_string(op.setup) << ").\n";
        }
    }

    for (const auto &[key, s] : inst.setups) {
        os << "setup(" << s.group << ',' << s.id << ',' << s.change_time << ',' << s.min_ops << ").\n";
    }

    for (const auto &[group, list] : inst.machines) {
        for (const auto &m : list) os << "tool(" << m.group << ',' << m.id << ").\n";
    }
    return os.str();
}

Instance load_facts_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_facts(buf.str());
}

} // namespace smsp
