#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "padic/catalog.hpp"
#include "padic/io.hpp"

using namespace padic;

TEST_CASE("every fixture round-trips through the JSON format bit-exactly") {
    for (const std::string& name : example_names()) {
        ExampleParams prm;
        prm.p = name.find("bessel") != std::string::npos ? 5 : 3;
        prm.m = 2;
        prm.n = 2;
        Example ex = make_example(name, prm);
        if (ex.is_family) {
            Json j = family_to_json(ex.family);
            FamilyModule back = family_from_json(j);
            CHECK(family_to_json(back) == j);
            CHECK(back.matrix() == ex.family.matrix());
        } else {
            Json j = module_to_json(ex.module);
            DiffModule back = module_from_json(j);
            CHECK(back == ex.module);
            CHECK(module_to_json(back) == j);
        }
    }
}

TEST_CASE("laurent JSON terms carry full exponent vectors") {
    Laurent l = Laurent::monomial_multi(3, Scalar::pi(3), {-2, 1});
    Json j = laurent_to_json(l);
    REQUIRE(j.size() == 1);
    CHECK(j[0][0] == -2);
    CHECK(j[0][1] == 1);
    Laurent back = laurent_from_json(3, 1, j);
    CHECK(back == l);
}

TEST_CASE("input validation maps to input_error") {
    CHECK_THROWS_AS(parse_rat("abc"), input_error);
    CHECK_THROWS_AS(parse_rat("1/0"), input_error);
    CHECK_THROWS_AS(module_from_json(Json{{"p", 3}}), std::exception);
    Json bad = Json::parse(R"({"p":3,"rank":2,"convention":"d/dq",
        "annulus":{"r_min":"0","r_max":"1"},"matrix":[[[],[]],[[],[]]]})");
    CHECK_THROWS_AS(module_from_json(bad), input_error);
}

TEST_CASE("scalar text forms parse back") {
    CHECK(Scalar::parse(5, "-3/2 + pi^2") ==
          Scalar(5, Rat(-3, 2)) + Scalar::pi_pow(5, 2));
    CHECK(Scalar::parse(5, "0").is_zero());
    CHECK_THROWS_AS(Scalar::parse(5, "1//2"), input_error);
}
