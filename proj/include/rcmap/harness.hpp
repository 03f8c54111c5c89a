#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "rcmap/classify.hpp"
#include "rcmap/io.hpp"
#include "rcmap/space.hpp"

namespace rcmap {

/// Gaussian binomial [n choose d]_q, saturating at UINT64_MAX.
std::uint64_t gaussian_binomial(std::uint64_t q, std::size_t n, std::size_t d);

/// Number of subspaces of Mat_{n,p}(K) with codimension in [codim_min, codim_max].
std::uint64_t subspace_count(Field f, std::size_t n, std::size_t p, std::size_t codim_min, std::size_t codim_max);

/// Visits every subspace of Mat_{n,p}(K) with the given codimension exactly
/// once. Canonical bases are produced pivot pattern by pivot pattern (pivot
/// sets in lexicographic order), and within a pattern in lexicographic
/// order of the free entries read row by row. The callback returns false
/// to stop. Throws BudgetExceeded, carrying the exact count, when more than
/// `limit` spaces would be produced.
void enumerate_subspaces(Field f, std::size_t n, std::size_t p, std::size_t codim, std::uint64_t limit,
                         const std::function<bool(const Space&)>& fn);

/// A subspace with the given codimension, grown from random vectors.
Space random_space(Field f, std::size_t n, std::size_t p, std::size_t codim, std::mt19937_64& rng);
/// Random subspace of `ambient` with codimension `extra` inside it.
Space random_subspace(const Space& ambient, std::size_t extra, std::mt19937_64& rng);
Mat random_matrix(Field f, std::size_t rows, std::size_t cols, std::mt19937_64& rng);
Mat random_invertible(Field f, std::size_t n, std::mt19937_64& rng);

/// Generator for instance `index` of a stream: depends only on its
/// arguments, so results do not depend on the number of workers.
std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Applies fn to 0..count-1 on `jobs` threads; results come back in index order.
template <class R, class Fn>
std::vector<R> parallel_map(std::size_t count, unsigned jobs, Fn&& fn) {
    std::vector<std::optional<R>> slots(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) slots[i].emplace(fn(i));
    };
    const unsigned workers = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    std::vector<R> out;
    out.reserve(count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

enum class ScanMode { Exhaustive, Random };

struct ScanConfig {
    /// Field order (a prime power).
    unsigned field = 2;
    std::size_t n = 3;
    std::size_t p = 3;
    std::size_t codim_min = 0;
    /// Defaults to the largest codimension the theorem under test allows.
    std::optional<std::size_t> codim_max;
    ScanMode mode = ScanMode::Exhaustive;
    std::uint64_t seed = 1;
    /// Instances in random mode.
    std::size_t count = 100;
    /// Target column count for preserver suites (defaults to p).
    std::optional<std::size_t> q;
    std::uint64_t element_budget = kDefaultElementBudget;
    std::uint64_t search_budget = kDefaultSearchBudget;
    /// Largest number of spaces an exhaustive scan may visit.
    std::uint64_t space_limit = std::uint64_t{1} << 20;
    unsigned jobs = 1;

    Json to_json() const;
};

struct TheoremReport {
    std::string id;
    Json config;
    std::uint64_t checked = 0;
    std::uint64_t passed = 0;
    std::uint64_t failed = 0;
    std::uint64_t refused = 0;
    /// Instances outside the theorem's hypotheses.
    std::uint64_t skipped = 0;
    /// Sharpness witnesses certified.
    std::uint64_t witnesses = 0;
    bool sharpness = false;
    /// Exhaustive scans: the closed-form number of spaces.
    std::optional<std::uint64_t> predicted_instances;
    std::map<std::string, std::uint64_t> tallies;
    Json details = Json::object();
    Json counterexamples = Json::array();
    double wall_seconds = 0;

    /// No failure, no refusal, the predicted count matched, and at least one
    /// witness for sharpness suites.
    bool ok() const;
    /// Deterministic content only (no timing).
    Json to_json() const;
    std::string to_text() const;
};

std::vector<std::string> theorem_ids();
/// The configuration a suite runs with when nothing is overridden.
ScanConfig default_config(const std::string& id);
/// Throws InvalidArgument for an unknown id and BudgetExceeded when an
/// exhaustive scan is over its limit.
TheoremReport verify_theorem(const std::string& id, const ScanConfig& config);

}  // namespace rcmap
