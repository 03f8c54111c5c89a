#include <algorithm>
#include <random>
#include <set>

#include <doctest.h>

#include "oracle.hpp"
#include "rcmap/classify.hpp"
#include "rcmap/harness.hpp"

using namespace rcmap;

namespace {

const Field F2 = Field::make(2);
const Field F3 = Field::make(3);
const Field F4 = Field::make(2, 2);

/// Trace-form orthogonal by testing every p x n matrix.
std::size_t brute_orthogonal_dim(const Space& s) {
    const Field f = s.field();
    std::size_t count = 0;
    oracle::for_each_vector(f, s.rows() * s.cols(), [&](const Vec& flat) {
        Mat n(f, s.cols(), s.rows(), flat.entries());
        for (const auto& m : s.basis()) {
            Elem tr = 0;
            const Mat nm = n * m;
            for (std::size_t i = 0; i < nm.rows(); ++i) tr = f.add(tr, nm(i, i));
            if (tr) return;
        }
        ++count;
    });
    std::size_t d = 0;
    while (count > 1) count /= f.q(), ++d;
    return d;
}

}  // namespace

TEST_CASE("space construction canonicalizes") {
    CHECK(Space::make(F3, 2, 2, {Mat::identity(F3, 2)}).dim() == 1);
    const Mat e11 = Mat::unit(F3, 2, 2, 0, 0);
    CHECK(Space::make(F3, 2, 2, {e11, e11}).dim() == 1);
    const Space empty = Space::make(F3, 2, 3, {});
    CHECK(empty.dim() == 0);
    CHECK(empty.codim() == 6);
    CHECK_THROWS_AS(Space::make(F3, 2, 2, {Mat::identity(F3, 3)}), InvalidArgument);
    CHECK_THROWS_AS(Space::make(F3, 2, 2, {Mat::identity(F2, 2)}), InvalidArgument);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Mat> gens;
        for (int i = 0; i < 3; ++i) gens.push_back(random_matrix(F4, 2, 3, rng));
        const Space a = Space::make(F4, 2, 3, gens);
        std::reverse(gens.begin(), gens.end());
        gens.push_back(gens[0] + gens[1].scaled(3));
        const Space b = Space::make(F4, 2, 3, gens);
        CHECK(a == b);
        CHECK(a.basis() == b.basis());
        // Dimension agrees with the number of distinct elements.
        std::set<std::vector<Elem>> distinct;
        for (const auto& m : oracle::elements(a)) distinct.insert(m.entries());
        std::size_t expected = 1;
        for (std::size_t i = 0; i < a.dim(); ++i) expected *= 4;
        CHECK(distinct.size() == expected);
        CHECK(a.element_count() == expected);
        CHECK(a.gdim() == 2 * a.dim());
    }
}

TEST_CASE("named spaces") {
    const Space u = intro_u(F3);
    CHECK(u.dim() == 2);
    CHECK(u.codim() == 2);
    CHECK(f2_sharpness(F2, 3, 3).codim() == 3);
    CHECK(symmetric_space(F3, 3).dim() == 6);
    for (std::size_t n : {2u, 3u, 4u}) CHECK(symmetric_space(F2, n).dim() == n * (n + 1) / 2);
    CHECK(k_space(F3, 1).dim() == 6);
    for (int i : {2, 3, 4}) CHECK(k_space(F4, i).dim() == 3);
    for (std::size_t n : {2u, 3u, 4u}) CHECK(type2_canonical(F4, n, 3).codim() == 2 * n - 3);
    CHECK(type3_canonical(F4, 4).codim() == 3);
    CHECK(type1_canonical(F4, 3, 3).codim() == 2);
    CHECK(intro_u_extended(F3, 3, 3).codim() == 4);
    CHECK_THROWS_AS(intro_u_extended(F3, 2, 1), InvalidArgument);
    CHECK(zero_column_space(F3, 2, 3).codim() == 2);
    CHECK(diag_line(F3, 3).dim() == 1);
    for (const auto& name : label_names()) CHECK(label_name(parse_space_label(name)) == name);
    CHECK_THROWS_AS(parse_space_label("nonsense"), InvalidArgument);
}

TEST_CASE("trace-form orthogonal") {
    CHECK(orthogonal(full_space(F3, 2, 2)).dim() == 0);
    const Space so = orthogonal(symmetric_space(F3, 2));
    CHECK(so == Space::make(F3, 2, 2, {Mat(F3, 2, 2, {0, 1, 2, 0})}));
    std::mt19937_64 rng(5);
    for (unsigned q : {2u, 3u, 4u}) {
        const Field f = Field::of_order(q);
        for (int trial = 0; trial < 8; ++trial) {
            const std::size_t n = 1 + rng() % 3, p = 1 + rng() % 2;
            const Space s = random_space(f, n, p, rng() % (n * p + 1), rng);
            const Space perp = orthogonal(s);
            CHECK(perp.rows() == p);
            CHECK(perp.cols() == n);
            CHECK(perp.dim() + s.dim() == n * p);
            CHECK(orthogonal(perp) == s);
            if (n * p <= 6) CHECK(perp.dim() == brute_orthogonal_dim(s));
        }
    }
    const Space prime = Space::make(F4, 2, 2, {Mat::identity(F4, 2)}, Scalars::Prime);
    CHECK_THROWS_AS(orthogonal(prime), InvalidArgument);
}

TEST_CASE("equivalence action") {
    const Space u = intro_u(F3);
    CHECK(act(Mat::identity(F3, 2), Mat::identity(F3, 2), u) == u);
    const Mat swap(F3, 2, 2, {0, 1, 1, 0});
    const Space lower = act(swap, swap, u);
    CHECK(lower.dim() == 2);
    CHECK(lower == Space::make(F3, 2, 2, {Mat::identity(F3, 2), Mat::unit(F3, 2, 2, 1, 0)}));
    CHECK_THROWS_AS(act(Mat(F3, 2, 2), swap, u), InvalidArgument);

    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const Space s = random_space(F4, 3, 2, rng() % 5, rng);
        const Mat P = random_invertible(F4, 3, rng), Q = random_invertible(F4, 2, rng);
        const Space t = act(P, Q, s);
        CHECK(t.dim() == s.dim());
        CHECK(act(P, Q, full_space(F4, 3, 2)) == full_space(F4, 3, 2));
        CHECK(sx_profile(t) == sx_profile(s));
        CHECK(hat_space(t).dim() == hat_space(s).dim());
        // Members transform elementwise.
        const Mat Qi = *inverse(Q);
        for (const auto& b : s.basis()) CHECK(t.contains(P * b * Qi));
    }
}

TEST_CASE("projection modulo a vector") {
    const auto pr = project_mod(symmetric_space(F3, 2), Mat::basis_vector(F3, 2, 0));
    CHECK(pr.space == full_space(F3, 1, 2));
    CHECK((pr.pi * Mat::basis_vector(F3, 2, 0)).is_zero());

    const Vec y = Mat::column(F3, {1, 2, 0});
    std::vector<Mat> gens;
    for (std::size_t j = 0; j < 3; ++j) {
        Mat m(F3, 3, 3);
        for (std::size_t i = 0; i < 3; ++i) m(i, j) = y[i];
        gens.push_back(m);
    }
    CHECK(project_mod(Space::make(F3, 3, 3, gens), y).space.dim() == 0);
    CHECK_THROWS_AS(project_mod(full_space(F3, 2, 2), Vec(F3, 2, 1)), InvalidArgument);

    std::mt19937_64 rng(1);
    for (unsigned q : {2u, 3u, 4u}) {
        const Field f = Field::of_order(q);
        for (int trial = 0; trial < 10; ++trial) {
            const Space s = random_space(f, 3, 2, rng() % 7, rng);
            const Space perp = orthogonal(s);
            for (const auto& v : projective_points(f, 3)) {
                const auto p = project_mod(s, v);
                CHECK(p.space.codim() == s.codim() - evaluate_span(perp, v).dim());
                CHECK(rank(p.pi) == 2);
                CHECK((p.pi * v).is_zero());
            }
        }
    }
}

TEST_CASE("hat space and evaluation spans") {
    const Space hu = hat_space(intro_u(F3));
    CHECK(hu.dim() == 2);
    CHECK(hu == Space::make(F3, 2, 2, {Mat(F3, 2, 2, {1, 0, 0, 0}), Mat(F3, 2, 2, {0, 1, 1, 0})}));
    CHECK(hat_space(full_space(F3, 2, 2)).dim() == 2);
    CHECK(hat_space(zero_column_space(F3, 2, 3)).dim() == 2);

    CHECK(evaluate_span(type1_canonical(F4, 3, 3), Mat::basis_vector(F4, 3, 0)).dim() == 1);
    CHECK(evaluate_span(full_space(F4, 3, 2), Mat::column(F4, {2, 3})).dim() == 3);
    const Space ue = evaluate_span(intro_u(F3), Mat::basis_vector(F3, 2, 0));
    CHECK(ue == Space::make(F3, 2, 1, {Mat::basis_vector(F3, 2, 0)}));

    CHECK(common_kernel(zero_column_space(F3, 2, 3)) == std::vector<Vec>{Mat::basis_vector(F3, 3, 0)});
    CHECK(common_kernel(full_space(F3, 2, 2)).empty());
}

TEST_CASE("vee and coprod block structure") {
    const Space v = vee(symmetric_space(F2, 2), full_space(F2, 1, 1));
    CHECK(v.rows() == 3);
    CHECK(v.cols() == 3);
    CHECK(v.dim() == 3 + 2 + 1);
    const Space c = coprod(symmetric_space(F2, 2), zero_space(F2, 2, 1));
    CHECK(c.cols() == 3);
    CHECK(c.dim() == 3);
    CHECK(transpose_space(transpose_space(v)) == v);
    CHECK(symmetric_space(F4, 3).is_subspace_of(full_space(F4, 3, 3)));
}

TEST_CASE("prime-scalar subgroups") {
    const Space g = Space::make(F4, 2, 2, {Mat::identity(F4, 2)}, Scalars::Prime);
    CHECK(g.gdim() == 1);
    CHECK(g.contains(Mat::identity(F4, 2)));
    CHECK_FALSE(g.contains(Mat::identity(F4, 2).scaled(2)));
    CHECK(g.element_count() == 2);
}
