#pragma once

// JSON and CSV views of the record types.  Documents have the shape
// {"meta": {A, m, N, tol, version}, "data": [...]}; complex numbers are
// {"re": x, "im": y} and non-finite doubles are written as null.

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbzs/elliptic.hpp"
#include "fbzs/monodromy.hpp"
#include "fbzs/spectrum.hpp"
#include "fbzs/tridiag.hpp"

namespace fbzs {

inline constexpr const char* version = "1.0.0";

using json = nlohmann::ordered_json;

} // namespace fbzs

namespace nlohmann {

template <>
struct adl_serializer<std::complex<double>> {
    static void to_json(fbzs::json& j, const std::complex<double>& z) {
        j = fbzs::json::object();
        j["re"] = z.real();
        j["im"] = z.imag();
    }
    static void from_json(const fbzs::json& j, std::complex<double>& z) {
        auto part = [&](const char* k) {
            const auto& v = j.at(k);
            return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
        };
        z = {part("re"), part("im")};
    }
};

} // namespace nlohmann

namespace fbzs {

namespace detail {

// null (from a non-finite value) reads back as NaN
inline double get_real(const json& j, const char* key) {
    const auto& v = j.at(key);
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

template <class E>
E enum_from(const json& j, std::initializer_list<E> all) {
    const std::string s = j.get<std::string>();
    for (E e : all)
        if (s == to_string(e)) return e;
    throw std::invalid_argument("unknown enumerator '" + s + "'");
}

} // namespace detail

inline void to_json(json& j, FloquetKind k) { j = to_string(k); }
inline void from_json(const json& j, FloquetKind& k) {
    k = detail::enum_from(j, {FloquetKind::periodic, FloquetKind::antiperiodic, FloquetKind::generic});
}
inline void to_json(json& j, EdgeSource s) { j = to_string(s); }
inline void from_json(const json& j, EdgeSource& s) {
    s = detail::enum_from(j, {EdgeSource::ode_root, EdgeSource::tridiag, EdgeSource::both});
}
inline void to_json(json& j, FamilyTag t) { j = to_string(t); }
inline void from_json(const json& j, FamilyTag& t) { t = family_from_string(j.get<std::string>()); }

inline void to_json(json& j, const EllipticValues& v) {
    j = {{"x", v.x}, {"am", v.am}, {"sn", v.sn}, {"cn", v.cn}, {"dn", v.dn}};
}
inline void from_json(const json& j, EllipticValues& v) {
    v.x = detail::get_real(j, "x");
    v.am = detail::get_real(j, "am");
    v.sn = detail::get_real(j, "sn");
    v.cn = detail::get_real(j, "cn");
    v.dn = detail::get_real(j, "dn");
}

inline void to_json(json& j, const MonodromyData& d) {
    j = {{"z", d.z},           {"x0", d.x0},         {"M11", d.M(0, 0)}, {"M12", d.M(0, 1)},
         {"M21", d.M(1, 0)},   {"M22", d.M(1, 1)},   {"Delta", d.Delta}, {"c", d.c},
         {"s", d.s},           {"est_error", d.est_error}};
}
inline void from_json(const json& j, MonodromyData& d) {
    d.z = j.at("z").get<cplx>();
    d.x0 = detail::get_real(j, "x0");
    d.M(0, 0) = j.at("M11").get<cplx>();
    d.M(0, 1) = j.at("M12").get<cplx>();
    d.M(1, 0) = j.at("M21").get<cplx>();
    d.M(1, 1) = j.at("M22").get<cplx>();
    d.Delta = j.at("Delta").get<cplx>();
    d.c = j.at("c").get<cplx>();
    d.s = j.at("s").get<cplx>();
    d.est_error = detail::get_real(j, "est_error");
}

inline void to_json(json& j, const BandEdge& e) {
    j = {{"z", e.z}, {"lambda", e.lambda()}, {"kind", e.kind}, {"source", e.source}, {"closed", e.closed}};
}
inline void from_json(const json& j, BandEdge& e) {
    e.z = j.at("z").get<cplx>();
    e.kind = j.at("kind").get<FloquetKind>();
    e.source = j.at("source").get<EdgeSource>();
    e.closed = j.at("closed").get<bool>();
}

inline void to_json(json& j, const Segment& s) {
    j = {{"lo", s.lo}, {"hi", s.hi}, {"closed", s.closed}, {"symmetric", s.symmetric}};
}
inline void from_json(const json& j, Segment& s) {
    s.lo = detail::get_real(j, "lo");
    s.hi = detail::get_real(j, "hi");
    s.closed = j.at("closed").get<bool>();
    s.symmetric = j.at("symmetric").get<bool>();
}

inline void to_json(json& j, const SpectrumReport& r) {
    j = {{"A", r.A},
         {"m", r.m},
         {"band_count", r.band_count},
         {"open_gap_count", r.open_gap_count},
         {"genus", r.genus},
         {"central_gap_present", r.central_gap_present},
         {"real_line_band", r.real_line_band},
         {"delta_at_zero", r.delta_at_zero},
         {"bands", r.bands},
         {"gaps", r.gaps},
         {"edges", r.edges},
         {"warnings", r.warnings}};
}
inline void from_json(const json& j, SpectrumReport& r) {
    r.A = detail::get_real(j, "A");
    r.m = detail::get_real(j, "m");
    r.band_count = j.at("band_count").get<int>();
    r.open_gap_count = j.at("open_gap_count").get<int>();
    r.genus = j.at("genus").get<int>();
    r.central_gap_present = j.at("central_gap_present").get<bool>();
    r.real_line_band = j.at("real_line_band").get<bool>();
    r.delta_at_zero = detail::get_real(j, "delta_at_zero");
    r.bands = j.at("bands").get<std::vector<Segment>>();
    r.gaps = j.at("gaps").get<std::vector<Segment>>();
    r.edges = j.at("edges").get<std::vector<BandEdge>>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
}

inline void to_json(json& j, const DirichletRecord& r) {
    j = {{"z", r.z},
         {"movable", r.movable},
         {"gap", r.gap},
         {"x0_values", r.x0_values},
         {"positions", r.positions}};
}
inline void from_json(const json& j, DirichletRecord& r) {
    r.z = j.at("z").get<cplx>();
    r.movable = j.at("movable").get<bool>();
    r.gap = j.at("gap").get<int>();
    r.x0_values = j.at("x0_values").get<std::vector<double>>();
    r.positions = j.at("positions").get<std::vector<cplx>>();
}

inline void to_json(json& j, const CloudPoint& p) { j = {{"nu", p.nu}, {"lambda", p.lambda}, {"z", p.z}}; }
inline void from_json(const json& j, CloudPoint& p) {
    p.nu = detail::get_real(j, "nu");
    p.lambda = j.at("lambda").get<cplx>();
    p.z = j.at("z").get<cplx>();
}

inline void to_json(json& j, const SymmetrySample& s) {
    j = {{"z", s.z},
         {"det_residual", s.det_residual},
         {"schwarz_residual", s.schwarz_residual},
         {"reflection_residual", s.reflection_residual},
         {"evenness_residual", s.evenness_residual},
         {"reality_residual", s.reality_residual},
         {"zero_residual", s.zero_residual}};
}
inline void from_json(const json& j, SymmetrySample& s) {
    s.z = j.at("z").get<cplx>();
    s.det_residual = detail::get_real(j, "det_residual");
    s.schwarz_residual = detail::get_real(j, "schwarz_residual");
    s.reflection_residual = detail::get_real(j, "reflection_residual");
    s.evenness_residual = detail::get_real(j, "evenness_residual");
    s.reality_residual = detail::get_real(j, "reality_residual");
    s.zero_residual = detail::get_real(j, "zero_residual");
}

inline void to_json(json& j, const SpineRoot& r) {
    j = {{"x", r.x}, {"delta", r.delta}, {"parabolic_x", r.parabolic_x}, {"spine", r.spine}};
}
inline void from_json(const json& j, SpineRoot& r) {
    r.x = detail::get_real(j, "x");
    r.delta = detail::get_real(j, "delta");
    r.parabolic_x = detail::get_real(j, "parabolic_x");
    r.spine = j.at("spine").get<bool>();
}

inline void to_json(json& j, const C0Diagnostic& d) {
    j = {{"integral", d.integral},
         {"series", d.series},
         {"fd", d.fd},
         {"series_terms", d.series_terms},
         {"quadrature_points", d.quadrature_points}};
}
inline void from_json(const json& j, C0Diagnostic& d) {
    d.integral = detail::get_real(j, "integral");
    d.series = detail::get_real(j, "series");
    d.fd = detail::get_real(j, "fd");
    d.series_terms = j.at("series_terms").get<int>();
    d.quadrature_points = j.at("quadrature_points").get<int>();
}

// Eigenvalue table row for one family.
struct EigenRecord {
    FamilyTag family = FamilyTag::ToPlus;
    long index = 0;
    cplx lambda;
    long N_used = 0;
};

inline void to_json(json& j, const EigenRecord& r) {
    j = {{"family", r.family}, {"index", r.index}, {"lambda", r.lambda}, {"N_used", r.N_used}};
}
inline void from_json(const json& j, EigenRecord& r) {
    r.family = j.at("family").get<FamilyTag>();
    r.index = j.at("index").get<long>();
    r.lambda = j.at("lambda").get<cplx>();
    r.N_used = j.at("N_used").get<long>();
}

struct Meta {
    double A = 0, m = 0;
    long N = 0;
    double tol = 0;
    std::string version = fbzs::version;
};

inline void to_json(json& j, const Meta& m) {
    j = {{"A", m.A}, {"m", m.m}, {"N", m.N}, {"tol", m.tol}, {"version", m.version}};
}
inline void from_json(const json& j, Meta& m) {
    m.A = detail::get_real(j, "A");
    m.m = detail::get_real(j, "m");
    m.N = j.at("N").get<long>();
    m.tol = detail::get_real(j, "tol");
    m.version = j.at("version").get<std::string>();
}

template <class T>
json make_document(const Meta& meta, const std::vector<T>& data) {
    json doc;
    doc["meta"] = meta;
    doc["data"] = data;
    return doc;
}

template <class T>
std::vector<T> document_data(const json& doc) {
    return doc.at("data").get<std::vector<T>>();
}

// Two-space indent, trailing newline.  nlohmann prints doubles with the
// shortest round-tripping representation, so output is byte-stable.
inline std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

namespace detail {

inline void flatten(const json& v, const std::string& key, std::vector<std::pair<std::string, json>>& out) {
    if (v.is_object()) {
        for (auto it = v.begin(); it != v.end(); ++it)
            flatten(it.value(), key.empty() ? it.key() : key + "_" + it.key(), out);
    } else if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], key + "_" + std::to_string(i), out);
    } else {
        out.emplace_back(key, v);
    }
}

inline std::string csv_cell(const json& v) {
    if (v.is_null()) return "nan";
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    return v.dump();
}

} // namespace detail

// One row per element of doc["data"].  Nested fields are joined with '_',
// so a complex field z becomes the two columns z_re and z_im.  Columns are
// the union over rows in first-seen order; missing cells are left empty.
inline std::string to_csv(const json& doc) {
    const json& data = doc.at("data");
    std::vector<std::string> header;
    std::vector<std::vector<std::pair<std::string, json>>> rows;
    for (const json& rec : data) {
        std::vector<std::pair<std::string, json>> flat;
        detail::flatten(rec, rec.is_object() ? "" : "value", flat);
        for (auto& [k, v] : flat)
            if (std::find(header.begin(), header.end(), k) == header.end()) header.push_back(k);
        rows.push_back(std::move(flat));
    }
    std::ostringstream os;
    for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c) os << ",";
            for (const auto& [k, v] : row)
                if (k == header[c]) {
                    os << detail::csv_cell(v);
                    break;
                }
        }
        os << "\n";
    }
    return os.str();
}

} // namespace fbzs
