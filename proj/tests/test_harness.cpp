#include <set>

#include <doctest.h>

#include "oracle.hpp"
#include "rcmap/harness.hpp"

using namespace rcmap;

namespace {

/// Distinct spans of all d-tuples of vectors in K^w.
std::size_t brute_subspace_count(Field field, std::size_t w, std::size_t d) {
    const oracle::NaiveField f(field);
    std::vector<std::vector<unsigned>> vectors;
    oracle::for_each_vector(field, w, [&](const Vec& v) { vectors.emplace_back(v.entries().begin(), v.entries().end()); });
    std::set<std::set<std::vector<unsigned>>> spans;
    std::vector<std::size_t> idx(d, 0);
    std::size_t target = 1;
    for (std::size_t i = 0; i < d; ++i) target *= f.q;
    while (true) {
        std::vector<std::vector<unsigned>> rows;
        for (auto i : idx) rows.push_back(vectors[i]);
        auto s = oracle::span(f, rows, w);
        if (s.size() == target) spans.insert(std::move(s));
        std::size_t t = 0;
        while (t < d && ++idx[t] == vectors.size()) idx[t++] = 0;
        if (t == d) return spans.size();
    }
}

}  // namespace

TEST_CASE("gaussian binomials") {
    CHECK(gaussian_binomial(2, 9, 1) == 511);
    CHECK(gaussian_binomial(2, 9, 2) == 43435);
    CHECK(gaussian_binomial(4, 6, 1) == 1365);
    CHECK(gaussian_binomial(3, 4, 0) == 1);
    CHECK(gaussian_binomial(3, 4, 5) == 0);
    CHECK(gaussian_binomial(256, 64, 32) == UINT64_MAX);
    for (unsigned q : {2u, 3u})
        for (std::size_t d = 0; d <= 4; ++d) {
            if (q == 3 && d > 2) continue;
            CHECK(gaussian_binomial(q, 4, d) == brute_subspace_count(Field::of_order(q), 4, d));
        }
    CHECK(subspace_count(Field::make(2), 3, 3, 0, 2) == 43947);
    CHECK(subspace_count(Field::make(2, 2), 3, 2, 1, 1) == 1365);
}

TEST_CASE("subspace enumeration visits each space once") {
    for (unsigned q : {2u, 3u, 4u}) {
        const Field f = Field::of_order(q);
        for (std::size_t codim = 0; codim <= 3; ++codim) {
            std::set<std::vector<std::vector<Elem>>> seen;
            std::uint64_t visits = 0;
            enumerate_subspaces(f, 2, 2, codim, 1u << 20, [&](const Space& s) {
                ++visits;
                CHECK(s.codim() == codim);
                std::vector<std::vector<Elem>> key;
                for (const auto& b : s.basis()) key.push_back(b.entries());
                seen.insert(key);
                return true;
            });
            CHECK(visits == seen.size());
            CHECK(visits == gaussian_binomial(q, 4, codim));
        }
    }
    std::vector<Space> first, second;
    enumerate_subspaces(Field::make(3), 2, 2, 2, 1000, [&](const Space& s) { return first.push_back(s), true; });
    enumerate_subspaces(Field::make(3), 2, 2, 2, 1000, [&](const Space& s) { return second.push_back(s), true; });
    CHECK(first == second);

    std::size_t stopped = 0;
    enumerate_subspaces(Field::make(2), 3, 3, 1, 1000, [&](const Space&) { return ++stopped < 5; });
    CHECK(stopped == 5);

    try {
        enumerate_subspaces(Field::make(2), 3, 3, 2, 100, [](const Space&) { return true; });
        FAIL("expected BudgetExceeded");
    } catch (const BudgetExceeded& e) {
        CHECK(e.required() == 43435);
        CHECK(e.budget() == 100);
    }
}

TEST_CASE("random generators") {
    const Field f4 = Field::make(2, 2);
    auto a = instance_rng(7, 3, 11), b = instance_rng(7, 3, 11), c = instance_rng(7, 3, 12);
    CHECK(a() == b());
    CHECK(instance_rng(7, 3, 11)() != c());
    CHECK(instance_rng(7, 3, 11)() != instance_rng(7, 4, 11)());
    CHECK(instance_rng(7, 3, 11)() != instance_rng(8, 3, 11)());

    std::mt19937_64 rng(1);
    for (std::size_t codim = 0; codim <= 6; ++codim) CHECK(random_space(f4, 3, 2, codim, rng).codim() == codim);
    CHECK_THROWS_AS(random_space(f4, 3, 2, 7, rng), InvalidArgument);
    for (int i = 0; i < 10; ++i) {
        const Mat m = random_invertible(f4, 3, rng);
        CHECK(oracle::rank(m) == 3);
    }
    const Space amb = symmetric_space(f4, 3);
    const Space sub = random_subspace(amb, 2, rng);
    CHECK(sub.dim() == amb.dim() - 2);
    CHECK(sub.is_subspace_of(amb));
}

TEST_CASE("parallel map keeps index order") {
    const auto out = parallel_map<std::size_t>(1000, 4, [](std::size_t i) { return i * i; });
    REQUIRE(out.size() == 1000);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == i * i);
    CHECK(parallel_map<int>(0, 4, [](std::size_t) { return 1; }).empty());
}

TEST_CASE("suites run and report deterministically") {
    CHECK(theorem_ids().size() == 16);
    CHECK_THROWS_AS(verify_theorem("no-such-suite", ScanConfig{}), InvalidArgument);

    ScanConfig cfg = default_config("main-linear");
    cfg.n = 2;
    cfg.p = 2;
    const TheoremReport r1 = verify_theorem("main-linear", cfg);
    CHECK(r1.ok());
    // codim <= d_2(F2) = 0: only the full space.
    CHECK(r1.checked == 1);
    REQUIRE(r1.predicted_instances);
    CHECK(*r1.predicted_instances == 1);

    cfg = default_config("codim-formula");
    cfg.count = 60;
    cfg.jobs = 1;
    const TheoremReport a = verify_theorem("codim-formula", cfg);
    cfg.jobs = 4;
    const TheoremReport b = verify_theorem("codim-formula", cfg);
    CHECK(a.ok());
    CHECK(a.checked == 60);
    CHECK(a.to_json().dump() == b.to_json().dump());
    CHECK(a.to_json().dump() == verify_theorem("codim-formula", cfg).to_json().dump());
    CHECK(a.to_text().find("codim-formula") != std::string::npos);

    cfg = default_config("main-linear");
    cfg.space_limit = 10;
    CHECK_THROWS_AS(verify_theorem("main-linear", cfg), BudgetExceeded);

    for (const auto& id : {"symmetric", "K-local", "sharpness-dn", "sharpness-first"}) {
        const TheoremReport r = verify_theorem(id, default_config(id));
        CAPTURE(id);
        CHECK(r.ok());
        CHECK(r.failed == 0);
    }
    const TheoremReport sharp = verify_theorem("sharpness-dn", default_config("sharpness-dn"));
    CHECK(sharp.sharpness);
    CHECK(sharp.witnesses > 0);
}

TEST_CASE("scan config serialization") {
    ScanConfig cfg;
    cfg.q = 4;
    const Json j = cfg.to_json();
    CHECK(j["field"] == 2);
    CHECK(j["q"] == 4);
    CHECK(j["mode"] == "exhaustive");
    CHECK(j.dump() == cfg.to_json().dump());
}
