#include <random>

#include <doctest.h>

#include "oracle.hpp"
#include "rcmap/classify.hpp"
#include "rcmap/harness.hpp"
#include "rcmap/rcmaps.hpp"

using namespace rcmap;

namespace {

const Field F2 = Field::make(2);
const Field F3 = Field::make(3);
const Field F4 = Field::make(2, 2);

/// Counts the maps with F(M) in im M among every candidate map matrix of
/// the given flavor. Linear candidates are K-linear combinations on the
/// K-basis; additive ones are arbitrary on the GF(p)-basis.
std::uint64_t brute_rc_count(const Space& s, std::size_t m, bool linear) {
    const Field f = s.field();
    const auto members = oracle::elements(s);
    const std::size_t slots = linear ? s.dim() * m : s.gdim() * m * f.k();
    const unsigned base = linear ? f.q() : f.p();
    std::vector<unsigned> c(slots, 0);
    std::uint64_t count = 0;
    while (true) {
        AdditiveMap fm = AdditiveMap::zero(s, m);
        if (linear) {
            std::vector<Vec> images;
            for (std::size_t b = 0; b < s.dim(); ++b) {
                Vec v(f, m, 1);
                for (std::size_t r = 0; r < m; ++r) v[r] = static_cast<Elem>(c[b * m + r]);
                images.push_back(v);
            }
            fm = AdditiveMap::from_function(s, m, [&](const Mat& g) {
                const auto co = *s.coords(g);
                Vec v(f, m, 1);
                for (std::size_t b = 0; b < co.size(); ++b) v += images[b].scaled(co[b]);
                return v;
            });
        } else {
            std::vector<std::uint8_t> a(f.k() * m * s.gdim());
            for (std::size_t b = 0; b < s.gdim(); ++b)
                for (std::size_t r = 0; r < m * f.k(); ++r) a[r * s.gdim() + b] = static_cast<std::uint8_t>(c[b * m * f.k() + r]);
            fm = AdditiveMap(s, m, a);
        }
        bool rc = true;
        for (const auto& mm : members)
            if (!oracle::in_image(mm, fm(mm))) {
                rc = false;
                break;
            }
        count += rc;
        std::size_t t = 0;
        while (t < slots && ++c[t] == base) c[t++] = 0;
        if (t == slots) return count;
    }
}

std::uint64_t power(std::uint64_t b, std::size_t e) {
    std::uint64_t r = 1;
    while (e--) r *= b;
    return r;
}

AdditiveMap diag_f2(const Space& s) {
    return AdditiveMap::from_function(s, s.rows(), [&](const Mat& m) {
        Vec v(s.field(), s.rows(), 1);
        v[0] = m(0, 0);
        v[1] = m(1, 1);
        return v;
    });
}

}  // namespace

TEST_CASE("rc_space examples against brute force") {
    const RCMapSpace full = rc_space(full_space(F3, 2, 3), MapFlavor::linear());
    CHECK(full.Kdim() == 3);
    CHECK(full.same_span(local_space(full_space(F3, 2, 3)).maps));

    const Space u = intro_u(F3);
    const RCMapSpace ru = rc_space(u, MapFlavor::linear());
    CHECK(ru.Kdim() == 3);
    CHECK(local_space(u).maps.Kdim() == 2);
    CHECK(power(3, ru.kdim()) == brute_rc_count(u, 2, true));

    const Space s2 = symmetric_space(F2, 2);
    const RCMapSpace rs = rc_space(s2, MapFlavor::additive());
    CHECK(rs.kdim() == 3);
    CHECK(brute_rc_count(s2, 2, false) == 8);
}

TEST_CASE("rc dimension matches brute force on small random spaces") {
    std::mt19937_64 rng(21);
    for (unsigned q : {2u, 3u, 4u}) {
        const Field f = Field::of_order(q);
        for (int trial = 0; trial < 6; ++trial) {
            const Space s = random_space(f, 2, 2, 2 + rng() % 2, rng);
            CAPTURE(s.describe());
            const RCMapSpace lin = rc_space(s, MapFlavor::linear());
            CHECK(power(f.p(), lin.kdim()) == brute_rc_count(s, 2, true));
            if (s.gdim() * 2 * f.k() <= 12) {
                const RCMapSpace add = rc_space(s, MapFlavor::additive());
                CHECK(power(f.p(), add.kdim()) == brute_rc_count(s, 2, false));
            }
        }
    }
}

TEST_CASE("budget refusal") {
    CHECK_THROWS_AS(rc_space(full_space(F4, 3, 3), MapFlavor::additive(), 1000), BudgetExceeded);
}

TEST_CASE("local maps and witnesses") {
    const auto lf = local_space(full_space(F2, 2, 2));
    CHECK(lf.maps.Kdim() == 2);
    CHECK(lf.kernel.empty());
    const auto lz = local_space(coprod(zero_space(F3, 2, 1), full_space(F3, 2, 1)));
    CHECK(lz.maps.Kdim() == 1);
    CHECK(lz.kernel == std::vector<Vec>{Mat::basis_vector(F3, 2, 0)});
    CHECK(local_space(intro_u(F3)).maps.Kdim() == 2);

    const Space u = intro_u(F3);
    const auto w = is_local(u, AdditiveMap::evaluation(u, Mat::basis_vector(F3, 2, 0)));
    REQUIRE(w);
    CHECK(w->x == Mat::basis_vector(F3, 2, 0));
    const auto b = AdditiveMap::from_function(u, 2, [&](const Mat& m) { return Mat::column(F3, {m(0, 1), 0}); });
    CHECK(is_range_compatible(b));
    CHECK_FALSE(is_local(u, b));

    const Space z = zero_column_space(F3, 2, 3);
    const auto wz = is_local(z, AdditiveMap::zero(z, 2));
    REQUIRE(wz);
    CHECK(wz->x.is_zero());
    CHECK(wz->ambiguity == common_kernel(z));

    // Two witnesses differ by the common kernel.
    const Vec x = Mat::column(F3, {2, 1, 1});
    const auto wx = is_local(z, AdditiveMap::evaluation(z, x));
    REQUIRE(wx);
    CHECK(wx->x == Mat::column(F3, {0, 1, 1}));
}

TEST_CASE("exceptional maps") {
    const Space s2 = symmetric_space(F2, 2);
    const AdditiveMap d = exceptional_map(DiagKind{AdditiveEndo::identity(F2), 2}, s2);
    CHECK(d == diag_f2(s2));
    CHECK_FALSE(is_local(s2, d));

    const Space s3 = symmetric_space(F4, 3);
    const AdditiveMap ds = exceptional_map(DiagKind{AdditiveEndo::sqrt(F4), 3}, s3);
    for (const auto& m : oracle::elements(s3)) REQUIRE(oracle::in_image(m, ds(m)));
    CHECK_FALSE(ds.is_linear());

    const Space t1 = type1_canonical(F4, 3, 2);
    const AdditiveMap fr = exceptional_map(Type1Kind{Mat::basis_vector(F4, 2, 0), AdditiveEndo::frobenius(F4, 1)}, t1);
    CHECK(is_range_compatible(fr));
    CHECK_FALSE(fr.is_linear());
    CHECK_FALSE(is_local(t1, fr));

    // A linear endomorphism is not root-linear: the diagonal map is not range-compatible.
    CHECK_THROWS(exceptional_map(DiagKind{AdditiveEndo::identity(F4), 2}, symmetric_space(F4, 2)));
    CHECK_THROWS(exceptional_map(Type1Kind{Mat::basis_vector(F4, 2, 1), AdditiveEndo::identity(F4)}, t1));
}

TEST_CASE("decomposition into local and exceptional parts") {
    const Space s2 = symmetric_space(F2, 2);
    const auto tr = detect_type(s2);
    REQUIRE(tr.verdict == SpaceType::Type2);
    const Decomposition d = decompose_rc(s2, diag_f2(s2), tr.certificate());
    CHECK(d.x.is_zero());
    REQUIRE(d.exceptional.size() == 1);
    CHECK(d.exceptional[0].kind == "diag");
    CHECK(d.exceptional[0].alpha == AdditiveEndo::identity(F2));

    const Space t2 = type2_canonical(F4, 3, 3);
    const Vec e2 = Mat::basis_vector(F4, 3, 1);
    const AdditiveMap f = AdditiveMap::evaluation(t2, e2) + exceptional_map(DiagKind{AdditiveEndo::sqrt(F4), 2}, t2);
    const Decomposition d2 = decompose_rc(t2, f, detect_type(t2).certificate());
    CHECK(d2.x == e2);
    REQUIRE(d2.exceptional.size() == 1);
    CHECK(d2.exceptional[0].alpha == AdditiveEndo::sqrt(F4));

    const Space t1 = type1_canonical(F4, 3, 3);
    const Vec e1 = Mat::basis_vector(F4, 3, 0);
    const Decomposition d1 = decompose_rc(t1, AdditiveMap::evaluation(t1, e1), detect_type(t1).certificate());
    CHECK(d1.x == e1);
    for (const auto& part : d1.exceptional) CHECK(part.alpha.is_zero());

    // A Type-1 certificate cannot explain the diagonal map of a symmetric block.
    TypeCertificate wrong;
    wrong.type = SpaceType::None;
    CHECK_THROWS_AS(decompose_rc(s2, diag_f2(s2), wrong), DecompositionFailure);
}

TEST_CASE("projection of maps") {
    const Space s2 = symmetric_space(F2, 2);
    const Vec e1 = Mat::basis_vector(F2, 2, 0);
    const Projection pr = project_mod(s2, e1);
    const AdditiveMap pm = project_map(s2, diag_f2(s2), e1);
    const AdditiveMap expected = AdditiveMap::from_function(pr.space, 1, [&](const Mat& m) { return Mat::column(F2, {m(0, 1)}); });
    CHECK(pm == expected);

    std::mt19937_64 rng(4);
    for (unsigned q : {2u, 3u, 4u}) {
        const Field f = Field::of_order(q);
        for (int trial = 0; trial < 5; ++trial) {
            const Space s = random_space(f, 3, 2, 1 + rng() % 4, rng);
            const Vec x = random_matrix(f, 2, 1, rng);
            for (const auto& y : projective_points(f, 3)) {
                const Projection p = project_mod(s, y);
                CHECK(project_map(s, AdditiveMap::evaluation(s, x), y) == AdditiveMap::evaluation(p.space, x));
            }
            const RCMapSpace rc = rc_space(s, MapFlavor::additive());
            const Vec y = projective_points(f, 3)[rng() % (q * q + q + 1)];
            const RCMapSpace target = rc_space(project_mod(s, y).space, MapFlavor::additive());
            for (const auto& fm : rc.basis()) CHECK(target.contains(project_map(s, fm, y)));
        }
    }
}

TEST_CASE("splitting and joining") {
    const Space a = full_space(F3, 2, 1), b = full_space(F3, 2, 2);
    const Space ab = coprod(a, b);
    const Vec x1 = Mat::column(F3, {2}), x2 = Mat::column(F3, {1, 1});
    const AdditiveMap j = join_maps(a, b, AdditiveMap::evaluation(a, x1), AdditiveMap::evaluation(b, x2));
    const auto w = is_local(ab, j);
    REQUIRE(w);
    CHECK(w->x == Mat::column(F3, {2, 1, 1}));
    const auto [f, g] = split_map(a, b, j);
    CHECK(f == AdditiveMap::evaluation(a, x1));
    CHECK(g == AdditiveMap::evaluation(b, x2));

    const Space s2 = symmetric_space(F2, 2), c = full_space(F2, 2, 1);
    const AdditiveMap jd = join_maps(s2, c, diag_f2(s2), AdditiveMap::zero(c, 2));
    CHECK(is_range_compatible(jd));
    CHECK_FALSE(is_local(coprod(s2, c), jd));

    for (auto flavor : {MapFlavor::linear(), MapFlavor::additive()})
        CHECK(rc_space(coprod(s2, c), flavor).kdim() == rc_space(s2, flavor).kdim() + rc_space(c, flavor).kdim());
}

TEST_CASE("structural properties of rc spaces") {
    std::mt19937_64 rng(8);
    for (unsigned q : {2u, 3u, 4u}) {
        const Field f = Field::of_order(q);
        for (int trial = 0; trial < 6; ++trial) {
            const std::size_t n = 2 + rng() % 2, p = 1 + rng() % 2;
            const Space s = random_space(f, n, p, rng() % (n * p), rng);
            CAPTURE(s.describe());
            const auto loc = local_space(s);
            const auto lin = rc_space(s, MapFlavor::linear());
            const auto add = rc_space(s, MapFlavor::additive());
            CHECK(loc.maps.kdim() <= lin.kdim());
            CHECK(lin.kdim() <= add.kdim());
            for (const auto& m : loc.maps.basis()) CHECK(lin.contains(m));
            for (const auto& m : lin.basis()) CHECK(add.contains(m));
            for (const auto& m : add.basis()) CHECK(is_range_compatible(m));
            if (s.codim() + 2 <= n) CHECK(add.same_span(loc.maps));

            const Mat P = random_invertible(f, n, rng), Q = random_invertible(f, p, rng);
            CHECK(rc_space(act(P, Q, s), MapFlavor::additive()).kdim() == add.kdim());

            const Space e = embed_rows(s, 1);
            const auto re = rc_space(e, MapFlavor::additive());
            CHECK(re.kdim() == add.kdim());
            for (const auto& m : re.basis())
                for (std::size_t b = 0; b < e.gdim(); ++b) CHECK(m.on_basis(b)[n] == 0);
        }
    }
}

TEST_CASE("one-column spaces") {
    std::mt19937_64 rng(2);
    for (unsigned q : {3u, 4u, 8u}) {
        const Field f = Field::of_order(q);
        for (std::size_t d : {0u, 2u, 3u}) {
            const Space s = random_space(f, 3, 1, 3 - d, rng);
            // Every range-compatible homomorphism is a scalar multiple of the identity.
            CHECK(rc_space(s, MapFlavor::additive()).same_span(local_space(s).maps));
        }
        const Space line = diag_line(f, 3);
        CHECK(rc_space(line, MapFlavor::linear()).same_span(local_space(line).maps));
        if (!f.is_prime()) CHECK(rc_space(line, MapFlavor::additive()).kdim() == f.k() * f.k());
    }
}

TEST_CASE("root-linear and linear diagonal maps are independent over F4") {
    const Space s = symmetric_space(F4, 2);
    const auto rc = rc_space(s, MapFlavor::additive());
    std::vector<AdditiveMap> diag;
    for (const auto& a : endo_space(F4, EndoKind::RootLinear)) diag.push_back(exceptional_map(DiagKind{a, 2}, s));
    const auto lin = rc_space(s, MapFlavor::linear());
    std::vector<AdditiveMap> all = lin.basis();
    all.insert(all.end(), diag.begin(), diag.end());
    CHECK(canonical_span(s, 2, all).size() == lin.kdim() + diag.size());
    CHECK(rc.kdim() == lin.kdim() + diag.size());
}

TEST_CASE("semilinear flavor") {
    const Space s = full_space(F4, 2, 2);
    const auto r1 = rc_space(s, MapFlavor::semilinear(1));
    for (const auto& m : r1.basis()) CHECK(m.is_semilinear(1));
    CHECK(MapFlavor::semilinear(0) == MapFlavor::linear());
    CHECK(MapFlavor::parse("semilinear:1") == MapFlavor::semilinear(1));
    CHECK(MapFlavor::parse("additive").name() == "additive");
    CHECK_THROWS_AS(MapFlavor::parse("bilinear"), InvalidArgument);
}
