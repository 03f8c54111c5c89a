#pragma once

#include <string>

#include <json.hpp>

#include "rcmap/additive_map.hpp"
#include "rcmap/classify.hpp"
#include "rcmap/preservers.hpp"
#include "rcmap/rcmaps.hpp"
#include "rcmap/reflexivity.hpp"
#include "rcmap/space.hpp"

namespace rcmap {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// {"p", "k", "poly"}; poly lists the k + 1 coefficients of the reduction
/// polynomial, constant term first, leading 1 included. Reading also
/// accepts the k coefficients without the leading term.
Json field_to_json(Field f);
Field field_from_json(const Json& j, unsigned max_order = kDefaultMaxOrder);

/// Matrices are arrays of rows of integer codes; vectors are flat arrays.
Json mat_to_json(const Mat& m);
Mat mat_from_json(Field f, const Json& j);
Json vec_to_json(const Vec& v);
Vec vec_from_json(Field f, const Json& j);

/// {"format", "field", "rows", "cols", "scalars", "basis"}: each basis
/// matrix is one flat row-major list of codes.
Json space_to_json(const Space& s);
Space space_from_json(const Json& j, unsigned max_order = kDefaultMaxOrder);

/// {"format", "domain", "flavor", "target_rows", "target_cols", "matrix_fp"}.
///
/// matrix_fp has k*target_rows*target_cols rows and one column per element
/// of the domain's GF(p)-basis (t^j B_i at column i*k + j). Row r*k + j
/// holds digit j of output entry r; for matrix-valued maps entry (i, c) of
/// the target is r = c*target_rows + i.
Json map_to_json(const AdditiveMap& f, MapFlavor flavor, std::size_t target_cols = 1);

struct MapFile {
    AdditiveMap map;
    MapFlavor flavor;
    std::size_t target_rows = 0;
    std::size_t target_cols = 1;
};
MapFile map_from_json(const Json& j, unsigned max_order = kDefaultMaxOrder);
Json opmap_to_json(const OpMap& f, MapFlavor flavor);
OpMap opmap_from_json(const Json& j, unsigned max_order = kDefaultMaxOrder);

Json endo_to_json(const AdditiveEndo& a);

Json read_json_file(const std::string& path);
/// Writes with two-space indentation and a trailing newline.
void write_json_file(const std::string& path, const Json& j);

Json rc_report_json(const RCMapSpace& rc, const LocalSpace& local, bool with_basis);
Json type_report_json(const TypeReport& r);
Json adapted_report_json(const AdaptedReport& r);
Json gate_report_json(const GateReport& g);
Json reflex_report_json(const ReflexReport& r);
Json preserver_report_json(const PreserverReport& r, bool with_maps);
Json normal_form_json(const NormalForm& nf);
Json decomposition_json(const Decomposition& d);

}  // namespace rcmap
