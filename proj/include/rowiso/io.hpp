// rowiso: JSON forms for matrices, series, battery reports and scenarios.
//
// Shared file conventions:
//   matrix   {"rows", "cols", "re": [...], "im": [...]}      row-major entries
//   vector   {"re": [...], "im": [...]}
//   word     "0" for the empty word, else digit string ("121"),
//            comma-separated letters when d > 9 ("12,3,1")
// Parse failures throw ParseError naming the offending field.

#ifndef ROWISO_IO_HPP
#define ROWISO_IO_HPP

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rowiso/characteristic.hpp"
#include "rowiso/errors.hpp"
#include "rowiso/kernel.hpp"
#include "rowiso/lifting.hpp"
#include "rowiso/markov.hpp"
#include "rowiso/matrix.hpp"
#include "rowiso/system_matrix.hpp"
#include "rowiso/transfer.hpp"

namespace rowiso {
namespace io {

using json = nlohmann::json;

inline const json& require_field(const json& j, const std::string& field) {
    if (!j.is_object() || !j.contains(field)) throw ParseError("missing field '" + field + "'");
    return j.at(field);
}

inline int int_field(const json& j, const std::string& field) {
    const json& v = require_field(j, field);
    if (!v.is_number_integer()) throw ParseError("field '" + field + "': expected an integer");
    return v.get<int>();
}

inline int int_field_or(const json& j, const std::string& field, int fallback) {
    if (!j.is_object() || !j.contains(field)) return fallback;
    if (!j.at(field).is_number_integer())
        throw ParseError("field '" + field + "': expected an integer");
    return j.at(field).get<int>();
}

inline double real_field_or(const json& j, const std::string& field, double fallback) {
    if (!j.is_object() || !j.contains(field)) return fallback;
    if (!j.at(field).is_number()) throw ParseError("field '" + field + "': expected a number");
    return j.at(field).get<double>();
}

namespace detail {

// key is looked up in j; label (e.g. "U.re") appears in error messages.
inline std::vector<double> real_array(const json& j, const std::string& key,
                                      const std::string& label, std::size_t expected) {
    if (!j.is_object() || !j.contains(key)) throw ParseError("missing field '" + label + "'");
    const json& v = j.at(key);
    if (!v.is_array()) throw ParseError("field '" + label + "': expected an array");
    if (v.size() != expected)
        throw ParseError("field '" + label + "': expected " + std::to_string(expected) +
                         " entries, found " + std::to_string(v.size()));
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& e : v) {
        if (!e.is_number()) throw ParseError("field '" + label + "': non-numeric entry");
        out.push_back(e.get<double>());
    }
    return out;
}

}  // namespace detail

inline json matrix_to_json(const CMatrix& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            re.push_back(m(i, j).real());
            im.push_back(m(i, j).imag());
        }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline CMatrix matrix_from_json(const json& j, const std::string& field) {
    if (!j.is_object()) throw ParseError("field '" + field + "': expected a matrix object");
    if (!j.contains("rows") || !j.at("rows").is_number_integer())
        throw ParseError("field '" + field + ".rows': expected an integer");
    if (!j.contains("cols") || !j.at("cols").is_number_integer())
        throw ParseError("field '" + field + ".cols': expected an integer");
    const int rows = j.at("rows").get<int>();
    const int cols = j.at("cols").get<int>();
    if (rows < 0 || cols < 0) throw ParseError("field '" + field + "': negative dimensions");
    const std::size_t count = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    const std::vector<double> re = detail::real_array(j, "re", field + ".re", count);
    const std::vector<double> im = detail::real_array(j, "im", field + ".im", count);
    CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index c = 0; c < cols; ++c) {
            const std::size_t k = static_cast<std::size_t>(i) * cols + c;
            m(i, c) = Complex(re[k], im[k]);
        }
    return m;
}

inline json vector_to_json(const CVector& v) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        re.push_back(v(i).real());
        im.push_back(v(i).imag());
    }
    return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

inline CVector vector_from_json(const json& j, const std::string& field) {
    if (!j.is_object()) throw ParseError("field '" + field + "': expected a vector object");
    if (!j.contains("re") || !j.at("re").is_array())
        throw ParseError("field '" + field + ".re': expected an array");
    const std::size_t count = j.at("re").size();
    const std::vector<double> rv = detail::real_array(j, "re", field + ".re", count);
    const std::vector<double> iv = detail::real_array(j, "im", field + ".im", count);
    CVector v(static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i) v(static_cast<Eigen::Index>(i)) = Complex(rv[i], iv[i]);
    return v;
}

inline std::vector<CMatrix> blocks_from_json(const json& j, const std::string& field) {
    if (!j.is_array()) throw ParseError("field '" + field + "': expected an array of matrices");
    std::vector<CMatrix> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(matrix_from_json(j.at(i), field + "[" + std::to_string(i) + "]"));
    return out;
}

inline json series_to_json(const FormalSeries& f) {
    json entries = json::array();
    const std::vector<Word> words = words_up_to(f.d, f.degree);
    for (std::size_t r = 0; r < words.size(); ++r)
        entries.push_back(json{{"word", words[r].str()}, {"matrix", matrix_to_json(f.coeffs[r])}});
    return json{{"d", f.d}, {"degree", f.degree}, {"entries", std::move(entries)}};
}

inline json battery_to_json(const BatteryReport& rep) {
    json conds = json::array();
    for (int i = 1; i <= 6; ++i) {
        const ConditionReport& c = rep.cond(i);
        json e{{"pass", c.pass}, {"max_dev", c.max_dev}};
        e["witness_word"] = c.witness ? json(c.witness->str()) : json(nullptr);
        conds.push_back(std::move(e));
    }
    return json{{"conditions", std::move(conds)}};
}

inline RowContraction contraction_from_payload(const json& p) {
    RowContraction t;
    t.t = blocks_from_json(require_field(p, "t"), "t");
    t.d = int_field_or(p, "d", static_cast<int>(t.t.size()));
    if (t.d != static_cast<int>(t.t.size()))
        throw ParseError("field 'd': does not match the number of blocks in 't'");
    return t;
}

inline SystemMatrix system_from_payload(const json& p) {
    SystemMatrix s;
    s.A = blocks_from_json(require_field(p, "A"), "A");
    s.B = blocks_from_json(require_field(p, "B"), "B");
    s.C = matrix_from_json(require_field(p, "C"), "C");
    s.D = matrix_from_json(require_field(p, "D"), "D");
    s.d = int_field_or(p, "d", static_cast<int>(s.A.size()));
    try {
        s.validate_shapes();
    } catch (const ValidationError& e) {
        throw ParseError(std::string("system payload: ") + e.what());
    }
    return s;
}

inline LiftingSplit lifting_from_payload(const json& p, Tolerance tol = {}) {
    if (p.contains("s") || p.contains("q") || p.contains("r")) {
        LiftingSplit split;
        split.s = blocks_from_json(require_field(p, "s"), "s");
        split.q = blocks_from_json(require_field(p, "q"), "q");
        split.r = blocks_from_json(require_field(p, "r"), "r");
        split.d = int_field_or(p, "d", static_cast<int>(split.s.size()));
        if (split.s.empty()) throw ParseError("field 's': needs at least one block");
        split.dim_s = split.s[0].rows();
        split.dim_r = split.r.empty() ? 0 : split.r[0].rows();
        return split;
    }
    const std::vector<CMatrix> blocks = blocks_from_json(require_field(p, "t"), "t");
    const int dim_s = int_field(p, "dimS");
    return LiftingSplit::from_blocks(blocks, dim_s, tol);
}

inline Interaction interaction_from_json(const json& p) {
    Interaction inter;
    inter.dim_h = int_field(p, "dimH");
    inter.dim_k = int_field(p, "dimK");
    inter.dim_p = int_field(p, "dimP");
    inter.u = matrix_from_json(require_field(p, "U"), "U");
    if (p.contains("omegaH")) inter.omega_h = vector_from_json(p.at("omegaH"), "omegaH");
    if (p.contains("omegaK")) inter.omega_k = vector_from_json(p.at("omegaK"), "omegaK");
    if (p.contains("omegaP")) inter.omega_p = vector_from_json(p.at("omegaP"), "omegaP");
    return inter;
}

inline json interaction_to_json(const Interaction& inter) {
    json p{{"dimH", inter.dim_h}, {"dimK", inter.dim_k}, {"dimP", inter.dim_p},
           {"U", matrix_to_json(inter.u)}};
    if (inter.omega_h) p["omegaH"] = vector_to_json(*inter.omega_h);
    if (inter.omega_k) p["omegaK"] = vector_to_json(*inter.omega_k);
    if (inter.omega_p) p["omegaP"] = vector_to_json(*inter.omega_p);
    return p;
}

struct Scenario {
    std::string kind;  // dilation | lifting | markov | raw
    json payload;
    int depth = 4;
    int degree = 4;
    double tol = 1.0e-10;
    json echo;  // the document as parsed, for report echoing
};

inline Scenario scenario_from_json(const json& j) {
    Scenario sc;
    const json& kind = require_field(j, "kind");
    if (!kind.is_string()) throw ParseError("field 'kind': expected a string");
    sc.kind = kind.get<std::string>();
    if (sc.kind != "dilation" && sc.kind != "lifting" && sc.kind != "markov" && sc.kind != "raw")
        throw ParseError("field 'kind': unknown scenario kind '" + sc.kind + "'");
    sc.payload = require_field(j, "payload");
    sc.depth = int_field_or(j, "depth", 4);
    if (sc.depth < 1) throw ParseError("field 'depth': must be >= 1");
    sc.degree = int_field_or(j, "degree", sc.depth);
    if (sc.degree < 0) throw ParseError("field 'degree': must be >= 0");
    sc.tol = real_field_or(j, "tol", 1.0e-10);
    if (sc.tol <= 0.0) throw ParseError("field 'tol': must be positive");
    sc.echo = j;
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError("scenario file '" + path + "': " + e.what());
    }
    return scenario_from_json(j);
}

}  // namespace io
}  // namespace rowiso

#endif  // ROWISO_IO_HPP
