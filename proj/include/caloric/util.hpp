// Small shared utilities: error types, deterministic RNG streams,
// stable number formatting, RFC-4180 CSV emission, and a chunked
// parallel_for whose results are merged in index order.
#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace caloric {

// Configuration / precondition problems: the input is wrong, not the math.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// The requested discretization cannot be made monotone.  Carries enough
// context to report the offending node and a time step that would work.
struct SchemeError : std::runtime_error {
    enum class Kind { Positivity, Dominance };
    Kind kind;
    long node = -1;              // flat node index, -1 if not applicable
    double tau_max = 0.0;        // largest admissible tau (Positivity only)
    SchemeError(Kind k, const std::string& what, long node_, double tau_max_)
        : std::runtime_error(what), kind(k), node(node_), tau_max(tau_max_) {}
};

// --- deterministic RNG streams ---------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Decorrelated sub-seed for stream `index` of a root seed.  Used for MC
// paths and data draws so results do not depend on thread count.
inline std::uint64_t substream_seed(std::uint64_t root, std::uint64_t index) {
    std::uint64_t s = root ^ (0x5851f42d4c957f2dULL * (index + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

// --- hashing (config attribution) -------------------------------------------

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v);

// --- formatting --------------------------------------------------------------

// Shortest decimal form that round-trips a double; locale independent.
std::string fmt_double(double v);

// --- CSV (RFC 4180: CRLF line endings, quote when needed) -------------------

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
    std::string serialize() const;
};

// --- parallelism -------------------------------------------------------------

// Runs fn(i) for i in [0, n).  Work is split into contiguous chunks; any
// result aggregation is the caller's job (write to slot i), which keeps
// reductions in index order and therefore bitwise reproducible.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace caloric
