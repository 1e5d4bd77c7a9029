#include "fpconv/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "fpconv/errors.hpp"

namespace fpconv {

using nlohmann::json;

json measure_to_json(const Measure& m) {
    json j;
    switch (m.kind()) {
        case MeasureKind::Atomic: {
            j["type"] = "atomic";
            json atoms = json::array();
            for (const auto& a : m.atoms()) atoms.push_back({a.location, a.weight});
            j["atoms"] = atoms;
            break;
        }
        case MeasureKind::Semicircle:
            j["type"] = "semicircle";
            j["beta"] = m.beta();
            break;
        case MeasureKind::MarchenkoPastur:
            j["type"] = "marchenko_pastur";
            j["beta"] = m.beta();
            break;
        case MeasureKind::JacobiDensity:
            j["type"] = "jacobi";
            j["a"] = m.jacobi_a();
            j["b"] = m.jacobi_b();
            j["p"] = m.jacobi_p();
            j["q"] = m.jacobi_q();
            break;
    }
    return j;
}

namespace {

double need_number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError(std::string("measure spec needs numeric field '") + key + "'");
    return j[key].get<double>();
}

} // namespace

Measure measure_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw ConfigError("measure spec must be an object with a 'type' string");
    const std::string type = j["type"].get<std::string>();
    if (type == "semicircle") return Measure::semicircle(need_number(j, "beta"));
    if (type == "marchenko_pastur") return Measure::marchenko_pastur(need_number(j, "beta"));
    if (type == "jacobi")
        return Measure::jacobi(need_number(j, "a"), need_number(j, "b"), need_number(j, "p"),
                               need_number(j, "q"));
    if (type == "atomic") {
        if (!j.contains("atoms") || !j["atoms"].is_array())
            throw ConfigError("atomic measure spec needs an 'atoms' array");
        std::vector<Atom> atoms;
        for (const auto& el : j["atoms"]) {
            if (!el.is_array() || el.size() != 2 || !el[0].is_number() || !el[1].is_number())
                throw ConfigError("each atom must be a [location, weight] pair");
            atoms.push_back({el[0].get<double>(), el[1].get<double>()});
        }
        return Measure::atomic(std::move(atoms));
    }
    throw ConfigError("unknown measure type '" + type + "'");
}

Measure parse_measure_spec(const std::string& token) {
    if (token.empty()) throw ConfigError("empty measure spec");
    if (token[0] == '@') {
        std::ifstream in(token.substr(1));
        if (!in) throw ConfigError("cannot read measure file " + token.substr(1));
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad JSON in measure file: ") + e.what());
        }
        return measure_from_json(j);
    }
    if (token[0] == '{') {
        json j;
        try {
            j = json::parse(token);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad measure JSON: ") + e.what());
        }
        return measure_from_json(j);
    }
    // Shorthand tokens: sc, sc:BETA, mp, mp:BETA.
    std::string head = token;
    double beta = 1.0;
    if (const auto colon = token.find(':'); colon != std::string::npos) {
        head = token.substr(0, colon);
        std::istringstream is(token.substr(colon + 1));
        if (!(is >> beta) || !is.eof())
            throw ConfigError("bad numeric parameter in measure shorthand '" + token + "'");
    }
    if (head == "sc") return Measure::semicircle(beta);
    if (head == "mp") return Measure::marchenko_pastur(beta);
    throw ConfigError("unrecognized measure spec '" + token +
                      "' (expected JSON, @file, sc[:beta], or mp[:beta])");
}

json json_number(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    if (std::isnan(v)) return json("nan");
    return json(v);
}

} // namespace fpconv
