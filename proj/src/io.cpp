#include "rcmap/io.hpp"

#include <fstream>
#include <sstream>

namespace rcmap {

namespace {

template <class T>
T get(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InvalidArgument(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("bad field '") + key + "': " + e.what());
    }
}

const Json& member(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InvalidArgument(std::string("missing field '") + key + "'");
    return j.at(key);
}

void check_format(const Json& j) {
    if (j.contains("format") && j.at("format") != kFormatVersion)
        throw InvalidArgument("unsupported format version " + j.at("format").dump());
}

Elem code(Field f, const Json& v) {
    if (!v.is_number_unsigned() && !v.is_number_integer()) throw InvalidArgument("field element must be an integer");
    const long long c = v.get<long long>();
    if (c < 0 || c >= static_cast<long long>(f.q())) throw InvalidArgument("field element code out of range");
    return static_cast<Elem>(c);
}

Json endo_list(const std::vector<AdditiveEndo>& v) {
    Json a = Json::array();
    for (const auto& e : v) a.push_back(endo_to_json(e));
    return a;
}

Json vec_list(const std::vector<Vec>& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(vec_to_json(x));
    return a;
}

}  // namespace

Json field_to_json(Field f) {
    Json poly = Json::array();
    for (unsigned c : f.poly()) poly.push_back(c);
    poly.push_back(1);
    return Json{{"p", f.p()}, {"k", f.k()}, {"poly", poly}};
}

Field field_from_json(const Json& j, unsigned max_order) {
    const auto p = get<unsigned>(j, "p");
    const auto k = j.contains("k") ? get<unsigned>(j, "k") : 1U;
    const Field f = Field::make(p, k, max_order);
    if (j.contains("poly")) {
        auto poly = get<std::vector<unsigned>>(j, "poly");
        if (poly.size() == k + 1) {
            if (poly.back() != 1) throw InvalidArgument("reduction polynomial must be monic");
            poly.pop_back();
        }
        const auto fixed = f.poly();
        if (poly.size() != k || !std::equal(poly.begin(), poly.end(), fixed.begin()))
            throw InvalidArgument("reduction polynomial differs from the fixed one for " + f.name());
    }
    return f;
}

Json mat_to_json(const Mat& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json r = Json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) r.push_back(m(i, c));
        rows.push_back(std::move(r));
    }
    return rows;
}

Mat mat_from_json(Field f, const Json& j) {
    if (!j.is_array()) throw InvalidArgument("matrix must be an array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = rows ? j[0].size() : 0;
    Mat m(f, rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) throw InvalidArgument("ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c) m(i, c) = code(f, j[i][c]);
    }
    return m;
}

Json vec_to_json(const Vec& v) {
    Json a = Json::array();
    for (Elem e : v.entries()) a.push_back(e);
    return a;
}

Vec vec_from_json(Field f, const Json& j) {
    if (!j.is_array()) throw InvalidArgument("vector must be an array");
    std::vector<Elem> e;
    for (const auto& x : j) e.push_back(code(f, x));
    return Mat::column(f, std::move(e));
}

Json space_to_json(const Space& s) {
    Json basis = Json::array();
    for (const auto& b : s.basis()) basis.push_back(b.entries());
    return Json{{"format", kFormatVersion},
                {"field", field_to_json(s.field())},
                {"rows", s.rows()},
                {"cols", s.cols()},
                {"scalars", s.scalars() == Scalars::Field ? "field" : "prime"},
                {"basis", basis}};
}

Space space_from_json(const Json& j, unsigned max_order) {
    check_format(j);
    const Field f = field_from_json(member(j, "field"), max_order);
    const auto rows = get<std::size_t>(j, "rows");
    const auto cols = get<std::size_t>(j, "cols");
    Scalars sc = Scalars::Field;
    if (j.contains("scalars")) {
        const auto text = get<std::string>(j, "scalars");
        if (text == "prime")
            sc = Scalars::Prime;
        else if (text != "field")
            throw InvalidArgument("scalars must be 'field' or 'prime'");
    }
    std::vector<Mat> gens;
    for (const auto& b : member(j, "basis")) {
        if (!b.is_array() || b.size() != rows * cols) throw InvalidArgument("basis matrix has the wrong length");
        std::vector<Elem> e;
        for (const auto& x : b) e.push_back(code(f, x));
        gens.emplace_back(f, rows, cols, std::move(e));
    }
    return Space::make(f, rows, cols, gens, sc);
}

Json map_to_json(const AdditiveMap& f, MapFlavor flavor, std::size_t target_cols) {
    const std::size_t g = f.gdim();
    const std::size_t nrows = f.field().k() * f.target_rows();
    Json m = Json::array();
    for (std::size_t r = 0; r < nrows; ++r) {
        Json row = Json::array();
        for (std::size_t b = 0; b < g; ++b) row.push_back(f.matrix()[r * g + b]);
        m.push_back(std::move(row));
    }
    if (target_cols == 0 || f.target_rows() % target_cols) throw InvalidArgument("target_cols does not divide the target");
    return Json{{"format", kFormatVersion},
                {"domain", space_to_json(f.domain())},
                {"flavor", flavor.name()},
                {"target_rows", f.target_rows() / target_cols},
                {"target_cols", target_cols},
                {"matrix_fp", m}};
}

MapFile map_from_json(const Json& j, unsigned max_order) {
    check_format(j);
    const Space dom = space_from_json(member(j, "domain"), max_order);
    const auto rows = get<std::size_t>(j, "target_rows");
    const auto cols = j.contains("target_cols") ? get<std::size_t>(j, "target_cols") : std::size_t{1};
    const MapFlavor flavor = j.contains("flavor") ? MapFlavor::parse(get<std::string>(j, "flavor")) : MapFlavor::additive();
    const Json& m = member(j, "matrix_fp");
    const std::size_t nrows = dom.field().k() * rows * cols;
    const std::size_t g = dom.gdim();
    if (!m.is_array() || m.size() != nrows) throw InvalidArgument("matrix_fp has the wrong number of rows");
    std::vector<std::uint8_t> a;
    a.reserve(nrows * g);
    for (const auto& row : m) {
        if (!row.is_array() || row.size() != g) throw InvalidArgument("matrix_fp has the wrong number of columns");
        for (const auto& x : row) {
            const long long v = x.get<long long>();
            if (v < 0 || v >= static_cast<long long>(dom.field().p())) throw InvalidArgument("matrix_fp entry out of range");
            a.push_back(static_cast<std::uint8_t>(v));
        }
    }
    AdditiveMap f(dom, rows * cols, std::move(a));
    if (flavor.kind == MapFlavor::Kind::Linear && !f.is_linear()) throw InvalidArgument("map file is tagged linear but is not");
    if (flavor.kind == MapFlavor::Kind::Semilinear && !f.is_semilinear(flavor.sigma))
        throw InvalidArgument("map file is tagged semilinear but is not");
    return MapFile{std::move(f), flavor, rows, cols};
}

Json opmap_to_json(const OpMap& f, MapFlavor flavor) { return map_to_json(f.map(), flavor, f.cols()); }

OpMap opmap_from_json(const Json& j, unsigned max_order) {
    MapFile mf = map_from_json(j, max_order);
    return OpMap(std::move(mf.map), mf.target_rows, mf.target_cols);
}

Json endo_to_json(const AdditiveEndo& a) {
    const unsigned k = a.field().k();
    Json m = Json::array();
    for (unsigned i = 0; i < k; ++i) {
        Json row = Json::array();
        for (unsigned j = 0; j < k; ++j) row.push_back(a.matrix()[i * k + j]);
        m.push_back(std::move(row));
    }
    return Json{{"matrix_fp", m}, {"linear", a.is_linear()}, {"root_linear", a.field().p() == 2 && a.is_root_linear()}};
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

Json rc_report_json(const RCMapSpace& rc, const LocalSpace& local, bool with_basis) {
    Json j{{"format", kFormatVersion},
           {"flavor", rc.flavor().name()},
           {"dim_fp", rc.kdim()},
           {"kdim", rc.Kdim() ? Json(*rc.Kdim()) : Json(nullptr)},
           {"local_dim", *local.maps.Kdim()},
           {"local_dim_fp", local.maps.kdim()},
           {"all_local", rc.same_span(local.maps)},
           {"common_kernel", vec_list(local.kernel)}};
    if (with_basis) {
        Json b = Json::array();
        for (const auto& f : rc.basis()) {
            Json fm = Json::array();
            const std::size_t g = f.gdim();
            for (std::size_t r = 0; r < f.field().k() * f.target_rows(); ++r) {
                Json row = Json::array();
                for (std::size_t c = 0; c < g; ++c) row.push_back(f.matrix()[r * g + c]);
                fm.push_back(std::move(row));
            }
            b.push_back(Json{{"matrix_fp", fm}, {"linear", f.is_linear()}, {"local", is_local(rc.domain(), f).has_value()}});
        }
        j["basis"] = std::move(b);
    }
    return j;
}

Json type_report_json(const TypeReport& r) {
    Json j{{"format", kFormatVersion},
           {"verdict", type_name(r.verdict)},
           {"method", r.method},
           {"search_exhausted", r.search_exhausted},
           {"nodes", r.nodes},
           {"type1_witnesses", vec_list(r.type1_witnesses)}};
    j["P"] = r.P ? mat_to_json(*r.P) : Json(nullptr);
    j["Q"] = r.Q ? mat_to_json(*r.Q) : Json(nullptr);
    return j;
}

Json adapted_report_json(const AdaptedReport& r) {
    Json entries = Json::array();
    for (const auto& e : r.entries)
        entries.push_back(Json{{"y", vec_to_json(e.y)},
                               {"perp_dim", e.perp_dim},
                               {"codim_mod_y", e.codim_direct},
                               {"codim_formula", e.codim_formula},
                               {"adapted", e.adapted},
                               {"super_codim", e.super_codim},
                               {"super_perp", e.super_perp}});
    Json j{{"format", kFormatVersion},
           {"n", r.n},
           {"p", r.p},
           {"codim", r.codim},
           {"formula_consistent", r.formula_consistent},
           {"hyperplane_cover", r.hyperplane_cover},
           {"exceptional", r.exceptional ? Json(*r.exceptional) : Json(nullptr)},
           {"search_exhausted", r.search_exhausted},
           {"entries", entries}};
    if (r.exceptional_certificate)
        j["certificate"] = Json{{"P", mat_to_json(r.exceptional_certificate->P)},
                                {"Q", mat_to_json(r.exceptional_certificate->Q)}};
    return j;
}

Json gate_report_json(const GateReport& g) {
    return Json{{"n", g.n},
                {"p", g.p},
                {"codim", g.codim},
                {"d_n", g.dn},
                {"codim_le_n_minus_2", g.codim_le_n_minus_2},
                {"codim_le_d_n", g.codim_le_dn},
                {"codim_le_2n_minus_3", g.codim_le_2n_minus_3},
                {"p_ge_2", g.p_ge_2},
                {"characteristic", g.characteristic},
                {"field_gt_2", g.field_gt_2}};
}

Json reflex_report_json(const ReflexReport& r) {
    Json red{{"reduced", r.reduced.reduced}};
    red["kernel_vector"] = r.reduced.kernel_vector ? vec_to_json(*r.reduced.kernel_vector) : Json(nullptr);
    red["range_form"] = r.reduced.range_form ? vec_to_json(*r.reduced.range_form) : Json(nullptr);
    return Json{{"format", kFormatVersion},
                {"dim", r.dim},
                {"closure_dim", r.closure_dim},
                {"is_reflexive", r.is_reflexive},
                {"reduced", red},
                {"hat_rc_dim", r.hat_rc_dim},
                {"bound_ok", r.bound_ok}};
}

Json normal_form_json(const NormalForm& nf) {
    Json j{{"form", nf.form}, {"Q", mat_to_json(nf.Q)}};
    if (!nf.R.empty()) j["R"] = endo_list(nf.R);
    if (!nf.Rprime.empty()) j["R_prime"] = endo_list(nf.Rprime);
    if (nf.form == "symmetric") j["r"] = nf.r;
    return j;
}

Json preserver_report_json(const PreserverReport& r, bool with_maps) {
    Json j{{"format", kFormatVersion},
           {"flavor", r.flavor.name()},
           {"q", r.q},
           {"restricting_dim_fp", r.restricting_kdim},
           {"enumerated", r.enumerated},
           {"candidates_checked", r.candidates_checked},
           {"preserving_count", r.preserving_count},
           {"form", r.form.empty() ? Json(nullptr) : Json(r.form)},
           {"verdict", r.verdict},
           {"fit_failures", r.fit_failures},
           {"normal_form_samples", r.normal_form_samples},
           {"normal_form_failures", r.normal_form_failures}};
    if (!r.semilinear.empty()) {
        Json s = Json::array();
        for (const auto& x : r.semilinear)
            s.push_back(Json{{"sigma", x.sigma},
                             {"restricting_dim_fp", x.restricting_kdim},
                             {"preserving_count", x.preserving_count},
                             {"enumerated", x.enumerated},
                             {"all_linear", x.all_linear}});
        j["semilinear"] = std::move(s);
    }
    if (with_maps) {
        Json maps = Json::array();
        for (const auto& p : r.preservers) {
            Json m{{"map", opmap_to_json(p.map, MapFlavor::additive())["matrix_fp"]}};
            m["fit"] = p.fit ? normal_form_json(*p.fit) : Json(nullptr);
            maps.push_back(std::move(m));
        }
        j["preservers"] = std::move(maps);
    }
    return j;
}

Json decomposition_json(const Decomposition& d) {
    Json parts = Json::array();
    for (const auto& e : d.exceptional) {
        Json p{{"kind", e.kind}, {"alpha", endo_to_json(e.alpha)}};
        if (e.x) p["x"] = vec_to_json(*e.x);
        if (e.kind == "diag") p["r"] = e.r;
        parts.push_back(std::move(p));
    }
    return Json{{"x", vec_to_json(d.x)}, {"exceptional", parts}};
}

}  // namespace rcmap
