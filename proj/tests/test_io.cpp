#include <cstdio>
#include <random>

#include <doctest.h>

#include "rcmap/harness.hpp"
#include "rcmap/io.hpp"

using namespace rcmap;

namespace {

const Field F3 = Field::make(3);
const Field F4 = Field::make(2, 2);

}  // namespace

TEST_CASE("field files") {
    const Json j = field_to_json(F4);
    CHECK(j["p"] == 2);
    CHECK(j["k"] == 2);
    CHECK(j["poly"] == Json::array({1, 1, 1}));
    CHECK(field_from_json(j) == F4);
    CHECK(field_from_json(Json{{"p", 2}, {"k", 2}, {"poly", {1, 1}}}) == F4);
    CHECK(field_from_json(Json{{"p", 3}}) == F3);
    CHECK_THROWS_AS(field_from_json(Json{{"p", 2}, {"k", 2}, {"poly", {1, 0, 1}}}), InvalidArgument);
    CHECK_THROWS_AS(field_from_json(Json{{"p", 2}, {"k", 2}, {"poly", {1, 1, 2}}}), InvalidArgument);
    CHECK_THROWS_AS(field_from_json(Json{{"p", 2}, {"k", 5}}), InvalidArgument);
    CHECK(field_from_json(Json{{"p", 2}, {"k", 5}}, 64).q() == 32);
}

TEST_CASE("space files round trip") {
    std::mt19937_64 rng(61);
    for (unsigned q : {2u, 3u, 4u, 9u}) {
        const Field f = Field::of_order(q);
        for (int trial = 0; trial < 5; ++trial) {
            const Space s = random_space(f, 3, 2, rng() % 7, rng);
            const Json j = space_to_json(s);
            CHECK(j["format"] == kFormatVersion);
            CHECK(space_from_json(j) == s);
            CHECK(space_from_json(Json::parse(j.dump())) == s);
        }
    }
    const Space prime = Space::make(F4, 2, 2, {Mat::identity(F4, 2)}, Scalars::Prime);
    CHECK(space_from_json(space_to_json(prime)) == prime);

    Json bad = space_to_json(intro_u(F3));
    bad["basis"][0][0] = 7;
    CHECK_THROWS_AS(space_from_json(bad), InvalidArgument);
    bad = space_to_json(intro_u(F3));
    bad["format"] = 99;
    CHECK_THROWS_AS(space_from_json(bad), InvalidArgument);
}

TEST_CASE("map files round trip") {
    const Space u = intro_u(F4);
    const RCMapSpace rc = rc_space(u, MapFlavor::additive());
    for (const auto& b : rc.basis()) {
        const Json j = map_to_json(b, MapFlavor::additive());
        const MapFile back = map_from_json(j);
        CHECK(back.map == b);
        CHECK(back.flavor == MapFlavor::additive());
        CHECK(back.target_rows == 2);
    }
    const AdditiveMap ev = AdditiveMap::evaluation(u, Mat::column(F4, {1, 3}));
    CHECK(map_from_json(map_to_json(ev, MapFlavor::linear())).map == ev);

    // A non-linear map tagged linear is rejected.
    const AdditiveMap frob =
        AdditiveMap::from_function(u, 2, [](const Mat& m) { return Mat::column(F4, {F4.frobenius(m(0, 1)), 0}); });
    CHECK_FALSE(frob.is_linear());
    CHECK(map_from_json(map_to_json(frob, MapFlavor::semilinear(1))).map == frob);
    CHECK_THROWS_AS(map_from_json(map_to_json(frob, MapFlavor::linear())), InvalidArgument);

    std::mt19937_64 rng(67);
    const Space s = random_space(F3, 2, 2, 1, rng);
    const OpMap g = standard_preserver(s, 3, random_invertible(F3, 3, rng));
    const OpMap back = opmap_from_json(opmap_to_json(g, MapFlavor::linear()));
    CHECK(back == g);
    CHECK(back.cols() == 3);
}

TEST_CASE("flavor names") {
    for (const auto& name : {"linear", "additive", "semilinear:1", "semilinear:2"})
        CHECK(MapFlavor::parse(name).name() == name);
    CHECK(MapFlavor::parse("semilinear:0") == MapFlavor::linear());
    CHECK_THROWS_AS(MapFlavor::parse("affine"), InvalidArgument);
    CHECK_THROWS_AS(MapFlavor::parse("semilinear:x"), InvalidArgument);
}

TEST_CASE("json files on disk") {
    const std::string path = "test_io_space.json";
    const Space s = symmetric_space(F4, 2);
    write_json_file(path, space_to_json(s));
    CHECK(space_from_json(read_json_file(path)) == s);
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_json_file("does/not/exist.json"), InvalidArgument);
}

TEST_CASE("reports serialize") {
    const Space u = intro_u(F3);
    const Json t = type_report_json(detect_type(u));
    CHECK(t["verdict"] == "type1");
    const Json r = reflex_report_json(reflexivity_report(u));
    CHECK(r["closure_dim"] == 3);
    CHECK(r["is_reflexive"] == false);
    const Json rc = rc_report_json(rc_space(u, MapFlavor::linear()), local_space(u), false);
    CHECK(rc.dump() == rc_report_json(rc_space(u, MapFlavor::linear()), local_space(u), false).dump());
}
