#include <random>
#include <set>

#include <doctest.h>

#include "oracle.hpp"
#include "rcmap/harness.hpp"
#include "rcmap/reflexivity.hpp"

using namespace rcmap;

namespace {

const Field F2 = Field::make(2);
const Field F3 = Field::make(3);
const Field F4 = Field::make(2, 2);

std::vector<unsigned> apply(const oracle::NaiveField& f, const Mat& m, const Vec& x) {
    std::vector<unsigned> v(m.rows(), 0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) v[i] = f.add(v[i], f.mul(m(i, j), x[j]));
    return v;
}

/// Every g with g x in S x for all x, by testing all q^{np} matrices.
std::vector<Mat> brute_closure(const Space& s) {
    const oracle::NaiveField f(s.field());
    const auto members = oracle::elements(s);
    std::vector<std::pair<Vec, std::set<std::vector<unsigned>>>> images;
    oracle::for_each_vector(s.field(), s.cols(), [&](const Vec& x) {
        std::set<std::vector<unsigned>> sx;
        for (const auto& m : members) sx.insert(apply(f, m, x));
        images.emplace_back(x, std::move(sx));
    });
    std::vector<Mat> out;
    oracle::for_each_vector(s.field(), s.rows() * s.cols(), [&](const Vec& flat) {
        const Mat g(s.field(), s.rows(), s.cols(), flat.entries());
        for (const auto& [x, sx] : images)
            if (!sx.count(apply(f, g, x))) return;
        out.push_back(g);
    });
    return out;
}

}  // namespace

TEST_CASE("closure of the 2x2 counterexample space") {
    const Space u = intro_u(F3);
    const Space r = reflexive_closure(u);
    CHECK(r.dim() == 3);
    const auto brute = brute_closure(u);
    CHECK(brute.size() == 27);
    for (const auto& g : brute) {
        CHECK(g(1, 0) == 0);
        CHECK(r.contains(g));
    }
    CHECK(r == Space::make(F3, 2, 2, brute));
    CHECK(reflexive_closure(u, kDefaultElementBudget, false) == r);

    const ReflexReport rep = reflexivity_report(u);
    CHECK(rep.dim == 2);
    CHECK(rep.closure_dim == 3);
    CHECK_FALSE(rep.is_reflexive);
    CHECK(rep.hat_rc_dim == 3);
}

TEST_CASE("closure agrees with brute force on random spaces") {
    std::mt19937_64 rng(41);
    for (unsigned q : {2u, 3u}) {
        const Field f = Field::of_order(q);
        for (int trial = 0; trial < 12; ++trial) {
            const std::size_t n = 2, p = 2 + (q == 2 ? trial % 2 : 0);
            const Space s = random_space(f, n, p, rng() % (n * p + 1), rng);
            const Space r = reflexive_closure(s);
            const auto brute = brute_closure(s);
            std::size_t expected = 1;
            for (std::size_t i = 0; i < r.dim(); ++i) expected *= q;
            CHECK(brute.size() == expected);
            for (const auto& g : brute) CHECK(r.contains(g));
            CHECK(s.is_subspace_of(r));
            CHECK(reflexive_closure(r) == r);
        }
    }
}

TEST_CASE("report correspondence and equivalence invariance") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 15; ++trial) {
        const Space s = random_space(F4, 3, 2, rng() % 6, rng);
        const ReflexReport rep = reflexivity_report(s);
        CHECK(rep.closure_dim == rep.hat_rc_dim);
        CHECK(rep.is_reflexive == (rep.closure_dim == rep.dim));
        if (rep.reduced.reduced && rep.bound_ok) CHECK(rep.is_reflexive);
        const Space t = act(random_invertible(F4, 3, rng), random_invertible(F4, 2, rng), s);
        CHECK(reflexivity_report(t).is_reflexive == rep.is_reflexive);
    }
}

TEST_CASE("full spaces are reflexive") {
    CHECK(reflexive_closure(full_space(F3, 2, 3)) == full_space(F3, 2, 3));
    const ReflexReport rep = reflexivity_report(full_space(F2, 2, 2));
    CHECK(rep.is_reflexive);
    CHECK(rep.reduced.reduced);
}

TEST_CASE("reduced spaces") {
    CHECK(is_reduced(full_space(F3, 2, 2)).reduced);
    CHECK(is_reduced(symmetric_space(F3, 2)).reduced);

    const ReducedReport zc = is_reduced(zero_column_space(F3, 3, 2));
    CHECK_FALSE(zc.reduced);
    REQUIRE(zc.kernel_vector);
    CHECK(normalize_projective(*zc.kernel_vector) == Mat::basis_vector(F3, 2, 0));

    const ReducedReport rows = is_reduced(embed_rows(full_space(F3, 1, 2), 1));
    CHECK_FALSE(rows.reduced);
    REQUIRE(rows.range_form);
    CHECK(normalize_projective(*rows.range_form) == Mat::basis_vector(F3, 2, 1));
}

TEST_CASE("dimension bound") {
    // p >= n dim S - 2n + c, with n = rows and p = columns.
    CHECK(reflexivity_bound_ok(F3, 2, 2, 1));
    CHECK_FALSE(reflexivity_bound_ok(F3, 2, 2, 2));
    CHECK(reflexivity_bound_ok(F3, 3, 5, 2));
    CHECK_FALSE(reflexivity_bound_ok(F3, 3, 5, 3));
    // Over F2 the constant is 4.
    CHECK(reflexivity_bound_ok(F2, 3, 4, 2));
    CHECK_FALSE(reflexivity_bound_ok(F4, 3, 4, 3));
    CHECK(reflexivity_bound_ok(F4, 3, 4, 2));
    CHECK_FALSE(reflexivity_bound_ok(F2, 3, 3, 2));
}
