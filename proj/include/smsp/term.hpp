#ifndef SMSP_TERM_HPP
#define SMSP_TERM_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <variant>

namespace smsp {

using Time = std::int64_t;

/// An identifier from the fact format: either a lowercase symbol or a
/// nonnegative decimal integer. Integers order numerically and before
/// all symbols; symbols order lexicographically.
class Term {
public:
    Term() = default;

    static Term symbol(std::string name) {
        Term t;
        t.text_ = std::move(name);
        return t;
    }

    static Term number(std::uint64_t value) {
        Term t;
        t.numeric_ = true;
        t.value_ = value;
        t.text_ = std::to_string(value);
        return t;
    }

    [[nodiscard]] bool is_number() const { return numeric_; }
    [[nodiscard]] std::uint64_t value() const { return value_; }
    [[nodiscard]] const std::string &text() const { return text_; }

    friend bool operator==(const Term &a, const Term &b) {
        return a.numeric_ == b.numeric_ && a.text_ == b.text_;
    }

    friend std::strong_ordering operator<=>(const Term &a, const Term &b) {
        if (a.numeric_ != b.numeric_) {
            return a.numeric_ ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        if (a.numeric_) {
            return a.value_ <=> b.value_;
        }
        return a.text_.compare(b.text_) <=> 0;
    }

    friend std::ostream &operator<<(std::ostream &os, const Term &t) { return os << t.text_; }

private:
    bool numeric_ = false;
    std::uint64_t value_ = 0;
    std::string text_;
};

inline Term operator""_sym(const char *s, std::size_t n) { return Term::symbol(std::string(s, n)); }
inline Term operator""_num(unsigned long long v) { return Term::number(v); }

/// The "don't care" setup requirement. Kept distinct from every declared
/// setup id so it cannot collide with a setup that happens to be named 0.
struct AnySetup {
    friend bool operator==(AnySetup, AnySetup) { return true; }
    friend std::strong_ordering operator<=>(AnySetup, AnySetup) { return std::strong_ordering::equal; }
};

using SetupRef = std::variant<AnySetup, Term>;

inline bool is_any(const SetupRef &s) { return std::holds_alternative<AnySetup>(s); }

inline std::string to_string(const SetupRef &s) {
    return is_any(s) ? std::string("0") : std::get<Term>(s).text();
}

} // namespace smsp

template <>
struct std::hash<smsp::Term> {
    std::size_t operator()(const smsp::Term &t) const noexcept {
        return std::hash<std::string>{}(t.text()) ^ (t.is_number() ? 0x9e3779b97f4a7c15ULL : 0);
    }
};

#endif // SMSP_TERM_HPP
