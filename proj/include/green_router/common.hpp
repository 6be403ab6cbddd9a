#ifndef GREEN_ROUTER_COMMON_HPP
#define GREEN_ROUTER_COMMON_HPP

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace green_router {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Thrown when an input file does not follow its declared grammar.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Thrown when data violates a model invariant; the message names the invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense row-major square matrix.
template <typename T>
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t size, T init = T{}) : size_(size), data_(size * size, init) {}

    std::size_t size() const noexcept { return size_; }
    T& operator()(std::size_t i, std::size_t j) { return data_[i * size_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * size_ + j]; }
    void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

    bool operator==(const SquareMatrix&) const = default;

private:
    std::size_t size_ = 0;
    std::vector<T> data_;
};

/// Seeded 64-bit generator. Draws are computed from raw 64-bit outputs so
/// sequences are identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 1) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (hi <= lo) return lo;
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1u;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return lo + static_cast<std::int64_t>(x % span);
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n) - 1)); }

    template <typename It>
    void shuffle(It first, It last) {
        const auto n = static_cast<std::size_t>(last - first);
        for (std::size_t i = n; i > 1; --i) std::swap(first[i - 1], first[index(i)]);
    }

private:
    std::mt19937_64 engine_;
};

/// Shortest decimal text that parses back to the identical double.
inline std::string format_exact(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::runtime_error("cannot format value");
    return std::string(buf, ptr);
}

/// Fixed-point text; values that round to zero never carry a minus sign.
inline std::string format_fixed(double value, int decimals) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
    if (ec != std::errc{}) throw std::runtime_error("cannot format value");
    std::string out(buf, ptr);
    if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
    return out;
}

}  // namespace green_router

#endif
