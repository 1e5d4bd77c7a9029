#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "fpconv/errors.hpp"
#include "fpconv/json_io.hpp"

using namespace fpconv;

TEST_CASE("measure spec shorthands") {
    CHECK(parse_measure_spec("sc").kind() == MeasureKind::Semicircle);
    CHECK(parse_measure_spec("sc").beta() == 1.0);
    CHECK(parse_measure_spec("sc:2.0").beta() == 2.0);
    CHECK(parse_measure_spec("mp:0.5").kind() == MeasureKind::MarchenkoPastur);
    CHECK(parse_measure_spec("mp:0.5").beta() == 0.5);
    CHECK(parse_measure_spec(R"({"type":"semicircle","beta":3.0})").beta() == 3.0);

    CHECK_THROWS_AS(parse_measure_spec(""), ConfigError);
    CHECK_THROWS_AS(parse_measure_spec("gauss"), ConfigError);
    CHECK_THROWS_AS(parse_measure_spec("sc:abc"), ConfigError);
    CHECK_THROWS_AS(parse_measure_spec("{not json"), ConfigError);
}

TEST_CASE("measure spec from file") {
    const std::string path = "measure_spec_test.json";
    {
        std::ofstream out(path);
        out << R"({"type":"atomic","atoms":[[-1.0,0.5],[1.0,0.5]]})";
    }
    const Measure m = parse_measure_spec("@" + path);
    CHECK(m.kind() == MeasureKind::Atomic);
    CHECK(m.atoms().size() == 2);
    std::remove(path.c_str());
    CHECK_THROWS_AS(parse_measure_spec("@/nonexistent/measure.json"), ConfigError);
}

TEST_CASE("infinities travel as strings") {
    CHECK(json_number(std::numeric_limits<double>::infinity()) == nlohmann::json("inf"));
    CHECK(json_number(-std::numeric_limits<double>::infinity()) == nlohmann::json("-inf"));
    CHECK(json_number(1.5) == nlohmann::json(1.5));
    // Emitted documents must re-parse.
    nlohmann::json j;
    j["g_star"] = json_number(std::numeric_limits<double>::infinity());
    const auto round = nlohmann::json::parse(j.dump());
    CHECK(round["g_star"] == "inf");
}
