#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cpt {

// Base error for precondition and contract violations across the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a computation has no defined value for the given inputs
// (empty denominator, undefined baseline). Callers that aggregate treat
// this as missing data rather than a fatal failure.
class MissingDataError : public Error {
public:
    explicit MissingDataError(const std::string& what) : Error(what) {}
};

// FNV-1a 64-bit. Stable across platforms; used for per-spec seed derivation.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ull);

// SHA-256 content digest as lowercase hex. Used for run-manifest integrity.
std::string sha256_hex(std::string_view data);

// Current UTC time formatted as ISO-8601 with seconds ("2026-01-02T03:04:05Z").
std::string utc_now_iso8601();

// Deterministic uniform/normal draws on top of a 64-bit state. The standard
// distributions are implementation-defined, which would break the mock lab's
// bit-determinism contract; these are pinned.
class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64();
    // Uniform in [0, 1).
    double next_double();
    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n);
    // Standard normal via Box-Muller.
    double next_normal(double mean = 0.0, double sd = 1.0);

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace cpt
