#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "rowiso/characteristic.hpp"
#include "rowiso/io.hpp"
#include "test_support.hpp"

using rowiso::CMatrix;
using rowiso::Complex;
using rowiso::CVector;
namespace io = rowiso::io;
using io::json;

TEST_CASE("matrix json round trip") {
    std::mt19937 rng(131);
    const CMatrix m = testgen::random_gaussian(3, 2, rng);
    const CMatrix back = io::matrix_from_json(io::matrix_to_json(m), "m");
    REQUIRE(rowiso::max_abs(back - m) == 0.0);

    const CMatrix empty(0, 2);
    REQUIRE(io::matrix_from_json(io::matrix_to_json(empty), "m").cols() == 2);
}

TEST_CASE("matrix parse errors name the offending field") {
    json j{{"cols", 1}, {"re", {1.0}}, {"im", {0.0}}};
    try {
        io::matrix_from_json(j, "U");
        FAIL("expected ParseError");
    } catch (const rowiso::ParseError& e) {
        REQUIRE(std::string(e.what()).find("U.rows") != std::string::npos);
    }

    json mismatch{{"rows", 1}, {"cols", 2}, {"re", {1.0, 2.0}}, {"im", {0.0}}};
    try {
        io::matrix_from_json(mismatch, "B[0]");
        FAIL("expected ParseError");
    } catch (const rowiso::ParseError& e) {
        REQUIRE(std::string(e.what()).find("B[0].im") != std::string::npos);
    }
}

TEST_CASE("vector json round trip") {
    std::mt19937 rng(137);
    const CVector v = testgen::random_unit_vector(4, rng);
    const CVector back = io::vector_from_json(io::vector_to_json(v), "omegaH");
    REQUIRE(rowiso::max_abs(CMatrix(back - v)) == 0.0);

    json bad{{"re", {1.0, 0.0}}, {"im", {0.0}}};
    REQUIRE_THROWS_AS(io::vector_from_json(bad, "omegaK"), rowiso::ParseError);
}

TEST_CASE("block arrays carry their position in error messages") {
    json blocks = json::array({io::matrix_to_json(rowiso::identity_like(1)), json{{"rows", 1}}});
    try {
        io::blocks_from_json(blocks, "t");
        FAIL("expected ParseError");
    } catch (const rowiso::ParseError& e) {
        REQUIRE(std::string(e.what()).find("t[1]") != std::string::npos);
    }
}

TEST_CASE("series serialization lists words in enumeration order") {
    const auto f = rowiso::characteristic_series(
        rowiso::RowContraction{1, {0.5 * rowiso::identity_like(1)}}, 2);
    const json j = io::series_to_json(f);
    REQUIRE(j.at("d") == 1);
    REQUIRE(j.at("degree") == 2);
    REQUIRE(j.at("entries").size() == 3);
    REQUIRE(j.at("entries")[0].at("word") == "0");
    REQUIRE(j.at("entries")[1].at("word") == "1");
    REQUIRE(j.at("entries")[2].at("word") == "11");
    const CMatrix c0 = io::matrix_from_json(j.at("entries")[0].at("matrix"), "entry");
    REQUIRE(std::abs(c0(0, 0) - (-0.5)) <= 1e-12);
}

TEST_CASE("payload parsing") {
    json contraction{{"t", json::array({io::matrix_to_json(0.5 * rowiso::identity_like(1))})}};
    const auto t = io::contraction_from_payload(contraction);
    REQUIRE(t.d == 1);
    REQUIRE(std::abs(t.t[0](0, 0) - 0.5) <= 1e-15);

    contraction["d"] = 2;
    REQUIRE_THROWS_AS(io::contraction_from_payload(contraction), rowiso::ParseError);

    json sys{{"A", json::array({io::matrix_to_json(rowiso::CMatrix::Zero(1, 1))})},
             {"B", json::array({io::matrix_to_json(rowiso::identity_like(1))})},
             {"C", io::matrix_to_json(rowiso::identity_like(1))},
             {"D", io::matrix_to_json(rowiso::CMatrix::Zero(1, 1))}};
    REQUIRE_NOTHROW(io::system_from_payload(sys));
    sys["C"] = io::matrix_to_json(rowiso::identity_like(2));
    REQUIRE_THROWS_AS(io::system_from_payload(sys), rowiso::ParseError);
}

TEST_CASE("lifting payload accepts split and assembled forms") {
    CMatrix t(2, 2);
    t << 0.3, 0.0, 0.2, 0.4;
    json assembled{{"t", json::array({io::matrix_to_json(t)})}, {"dimS", 1}};
    const auto a = io::lifting_from_payload(assembled);

    json split{{"s", json::array({io::matrix_to_json(0.3 * rowiso::identity_like(1))})},
               {"q", json::array({io::matrix_to_json(0.2 * rowiso::identity_like(1))})},
               {"r", json::array({io::matrix_to_json(0.4 * rowiso::identity_like(1))})}};
    const auto b = io::lifting_from_payload(split);

    REQUIRE(a.dim_s == b.dim_s);
    REQUIRE(a.dim_r == b.dim_r);
    REQUIRE(rowiso::max_abs(a.t_block(0) - b.t_block(0)) <= 1e-15);
}

TEST_CASE("interaction json round trip") {
    rowiso::Interaction in;
    in.dim_h = in.dim_k = in.dim_p = 2;
    std::mt19937 rng(139);
    in.u = testgen::vacuum_fixing_unitary(4, rng);
    in.omega_h = CVector(CVector::Unit(2, 0));
    in.omega_k = CVector(CVector::Unit(2, 0));
    const auto back = io::interaction_from_json(io::interaction_to_json(in));
    REQUIRE(back.dim_h == 2);
    REQUIRE(rowiso::max_abs(back.u - in.u) == 0.0);
    REQUIRE(back.omega_h.has_value());
    REQUIRE_FALSE(back.omega_p.has_value());
}

TEST_CASE("scenario parsing applies defaults and guards") {
    json doc{{"kind", "dilation"}, {"payload", json::object()}};
    auto sc = io::scenario_from_json(doc);
    REQUIRE(sc.depth == 4);
    REQUIRE(sc.degree == 4);
    REQUIRE(sc.tol == 1.0e-10);

    doc["depth"] = 2;
    sc = io::scenario_from_json(doc);
    REQUIRE(sc.degree == 2);  // degree defaults to depth

    doc["kind"] = "mystery";
    REQUIRE_THROWS_AS(io::scenario_from_json(doc), rowiso::ParseError);
    doc["kind"] = "dilation";
    doc["depth"] = 0;
    REQUIRE_THROWS_AS(io::scenario_from_json(doc), rowiso::ParseError);

    REQUIRE_THROWS_AS(io::load_scenario("/nonexistent/scenario.json"), rowiso::ParseError);
}
