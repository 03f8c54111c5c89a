// Command-line front end: build and inspect spaces, compute range-compatible
// maps, classify, check reflexivity and preservers, enumerate, verify.

#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rcmap/harness.hpp"

using namespace rcmap;

namespace {

enum Exit { kOk = 0, kViolation = 1, kUsage = 2, kBudget = 3 };

struct Common {
    std::string space_file;
    std::string out_file;
    std::string format = "json";
    std::uint64_t seed = 1;
    std::uint64_t budget = kDefaultElementBudget;
    std::uint64_t search_budget = kDefaultSearchBudget;
    unsigned jobs = 1;
    unsigned max_order = kDefaultMaxOrder;
};

void print_text(std::ostream& out, const Json& j, const std::string& indent) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const Json& v = it.value();
        const bool nested = v.is_object() || (v.is_array() && !v.empty() && (v[0].is_object() || v[0].is_array()));
        if (nested && !(v.is_array() && v[0].is_array() && !v[0].empty() && !v[0][0].is_structured())) {
            out << indent << it.key() << ":\n";
            if (v.is_object()) {
                print_text(out, v, indent + "  ");
            } else {
                for (std::size_t i = 0; i < v.size(); ++i) {
                    out << indent << "  [" << i << "]\n";
                    if (v[i].is_object())
                        print_text(out, v[i], indent + "    ");
                    else
                        out << indent << "    " << v[i].dump() << "\n";
                }
            }
        } else {
            out << indent << it.key() << ": " << v.dump() << "\n";
        }
    }
}

/// Writes the report to --out or stdout in the chosen format.
void emit(const Common& c, const Json& j, const std::string& text = {}) {
    std::string body;
    if (c.format == "text") {
        std::ostringstream s;
        if (text.empty())
            print_text(s, j, "");
        else
            s << text;
        body = s.str();
    } else {
        body = j.dump(2) + "\n";
    }
    if (c.out_file.empty()) {
        std::cout << body;
    } else {
        std::ofstream out(c.out_file);
        if (!out) throw InvalidArgument("cannot write '" + c.out_file + "'");
        out << body;
    }
}

Space load_space(const Common& c) {
    if (c.space_file.empty()) throw InvalidArgument("--space FILE is required");
    return space_from_json(read_json_file(c.space_file), c.max_order);
}

void add_common(CLI::App* app, Common& c, bool with_space) {
    if (with_space) app->add_option("--space", c.space_file, "Space file (JSON)");
    app->add_option("--out", c.out_file, "Write the report here instead of stdout");
    app->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"json", "text"}));
    app->add_option("--seed", c.seed, "Random seed");
    app->add_option("--budget", c.budget, "Largest number of elements to enumerate");
    app->add_option("--search-budget", c.search_budget, "Node budget for equivalence searches");
    app->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
    app->add_option("--max-order", c.max_order, "Largest accepted field order")->check(CLI::Range(2U, kHardMaxOrder));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Range-compatible maps on matrix spaces over finite fields"};
    app.require_subcommand(1);
    Common c;

    // space
    auto* space = app.add_subcommand("space", "Build, transform or inspect a space");
    add_common(space, c, true);
    std::string named, op;
    unsigned field_order = 2;
    std::size_t n = 0, p = 0;
    std::optional<std::size_t> random_codim;
    space->add_option("--named", named, "Named construction")->check(CLI::IsMember(label_names()));
    space->add_option("--random-codim", random_codim, "Random subspace of this codimension");
    space->add_option("--field", field_order, "Field order");
    space->add_option("--n", n, "Rows");
    space->add_option("--p", p, "Columns");
    space->add_option("--op", op, "Transform the input space")
        ->check(CLI::IsMember({"orthogonal", "transpose", "hat", "closure"}));

    // rc
    auto* rc = app.add_subcommand("rc", "Range-compatible maps on a space");
    add_common(rc, c, true);
    std::string flavor_text = "linear", map_file;
    bool with_basis = true, decompose = false;
    rc->add_option("--flavor", flavor_text, "linear, additive or semilinear:i");
    rc->add_option("--is-local", map_file, "Map file to test for locality");
    rc->add_flag("--decompose", decompose, "With --is-local: split the map into local and exceptional parts");
    rc->add_flag("!--no-basis", with_basis, "Omit the basis");

    // classify
    auto* classify = app.add_subcommand("classify", "Exceptional type, adapted vectors and theorem gates");
    add_common(classify, c, true);

    // reflex
    auto* reflex = app.add_subcommand("reflex", "Reflexive closure and reflexivity");
    add_common(reflex, c, true);

    // preserve
    auto* preserve = app.add_subcommand("preserve", "Classify range preservers into Mat_{n,q}");
    add_common(preserve, c, true);
    std::size_t q = 0;
    std::string pflavor = "linear";
    std::size_t samples = 200;
    bool with_maps = false;
    preserve->add_option("--q", q, "Target column count")->required();
    preserve->add_option("--flavor", pflavor, "linear, additive or semilinear:i");
    preserve->add_option("--samples", samples, "Candidates drawn when enumeration is too large");
    preserve->add_flag("--maps", with_maps, "Include every preserver found");

    // enum
    auto* enumerate = app.add_subcommand("enum", "Enumerate subspaces of a given codimension");
    add_common(enumerate, c, false);
    std::size_t codim = 0;
    std::uint64_t limit = std::uint64_t{1} << 20;
    bool count_only = false;
    enumerate->add_option("--field", field_order, "Field order");
    enumerate->add_option("--n", n, "Rows")->required();
    enumerate->add_option("--p", p, "Columns")->required();
    enumerate->add_option("--codim", codim, "Codimension")->required();
    enumerate->add_option("--limit", limit, "Refuse above this many spaces");
    enumerate->add_flag("--count-only", count_only, "Report the count without the spaces");

    // verify
    auto* verify = app.add_subcommand("verify", "Run a theorem verification suite");
    add_common(verify, c, false);
    std::string id;
    bool list = false;
    ScanConfig cfg;
    std::optional<unsigned> vfield;
    std::optional<std::size_t> vn, vp, vcount, vcodim_min;
    std::optional<std::string> vmode;
    verify->add_option("id", id, "Suite id");
    verify->add_flag("--list", list, "List suite ids");
    verify->add_option("--field", vfield, "Field order");
    verify->add_option("--n", vn, "Rows");
    verify->add_option("--p", vp, "Columns");
    verify->add_option("--codim-min", vcodim_min, "Smallest codimension");
    verify->add_option("--codim-max", cfg.codim_max, "Largest codimension");
    verify->add_option("--mode", vmode, "exhaustive or random")->check(CLI::IsMember({"exhaustive", "random"}));
    verify->add_option("--count", vcount, "Instances in random mode");
    verify->add_option("--q", cfg.q, "Target columns for preserver suites");
    verify->add_option("--space-limit", cfg.space_limit, "Largest exhaustive scan");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success) ? kOk : kUsage;
    }

    try {
        if (space->parsed()) {
            std::optional<Space> s;
            if (!named.empty()) {
                s.emplace(named_space(parse_space_label(named), Field::of_order(field_order, c.max_order), {n, p}));
            } else if (random_codim) {
                std::mt19937_64 rng(c.seed);
                s.emplace(random_space(Field::of_order(field_order, c.max_order), n, p, *random_codim, rng));
            } else {
                s.emplace(load_space(c));
            }
            if (op == "orthogonal") s.emplace(orthogonal(*s));
            if (op == "transpose") s.emplace(transpose_space(*s));
            if (op == "hat") s.emplace(hat_space(*s));
            if (op == "closure") s.emplace(reflexive_closure(*s, c.budget));
            Json j = space_to_json(*s);
            if (c.format == "text") {
                Json info{{"dim", s->dim()}, {"codim", s->codim()}, {"gdim", s->gdim()}};
                emit(c, j, s->describe() + "\n" + info.dump() + "\n");
            } else {
                emit(c, j);
            }
            return kOk;
        }
        if (rc->parsed()) {
            const Space s = load_space(c);
            const MapFlavor flavor = MapFlavor::parse(flavor_text);
            const RCMapSpace maps = rc_space(s, flavor, c.budget);
            Json j = rc_report_json(maps, local_space(s), with_basis);
            if (!map_file.empty()) {
                const MapFile mf = map_from_json(read_json_file(map_file), c.max_order);
                if (mf.map.domain() != s) throw InvalidArgument("the map is defined on a different space");
                const auto w = is_local(s, mf.map);
                Json test{{"range_compatible", is_range_compatible(mf.map, c.budget)},
                          {"local", w.has_value()},
                          {"x", w ? vec_to_json(w->x) : Json(nullptr)}};
                if (decompose && !w) {
                    const TypeReport tr = detect_type(s, c.search_budget);
                    test["type"] = type_report_json(tr);
                    test["decomposition"] = decomposition_json(decompose_rc(s, mf.map, tr.certificate()));
                }
                j["map"] = std::move(test);
            }
            emit(c, j);
            return kOk;
        }
        if (classify->parsed()) {
            const Space s = load_space(c);
            Json j{{"format", kFormatVersion},
                   {"gate", gate_report_json(theorem_gate(s))},
                   {"type", type_report_json(detect_type(s, c.search_budget))}};
            if (s.rows() >= 2) j["adapted"] = adapted_report_json(adapted_vectors(s, c.search_budget));
            emit(c, j);
            return kOk;
        }
        if (reflex->parsed()) {
            const Space s = load_space(c);
            Json j = reflex_report_json(reflexivity_report(s, c.budget));
            j["closure"] = space_to_json(reflexive_closure(s, c.budget));
            emit(c, j);
            return kOk;
        }
        if (preserve->parsed()) {
            const Space s = load_space(c);
            PreserverOptions opt{c.budget, c.seed, samples};
            const PreserverReport r = classify_preservers(s, q, MapFlavor::parse(pflavor), opt);
            emit(c, preserver_report_json(r, with_maps));
            return r.verdict == "mismatch" ? kViolation : kOk;
        }
        if (enumerate->parsed()) {
            const Field f = Field::of_order(field_order, c.max_order);
            const std::size_t big = n * p;
            if (codim > big) throw InvalidArgument("codimension exceeds n*p");
            Json spaces = Json::array();
            std::uint64_t count = 0;
            const std::uint64_t predicted = gaussian_binomial(f.q(), big, big - codim);
            if (count_only) {
                if (predicted > limit) throw BudgetExceeded("subspace enumeration", predicted, limit);
                count = predicted;
            } else {
                enumerate_subspaces(f, n, p, codim, limit, [&](const Space& s) {
                    spaces.push_back(space_to_json(s));
                    ++count;
                    return true;
                });
            }
            Json j{{"format", kFormatVersion}, {"field", field_to_json(f)}, {"n", n},        {"p", p},
                   {"codim", codim},           {"count", count},           {"predicted", predicted}};
            if (!count_only) j["spaces"] = std::move(spaces);
            emit(c, j);
            return kOk;
        }
        if (verify->parsed()) {
            if (list) {
                for (const auto& s : theorem_ids()) std::cout << s << "\n";
                return kOk;
            }
            if (id.empty()) throw InvalidArgument("a suite id is required (see --list)");
            ScanConfig run = default_config(id);
            if (vfield) run.field = *vfield;
            if (vn) run.n = *vn;
            if (vp) run.p = *vp;
            if (vcount) run.count = *vcount;
            if (vcodim_min) run.codim_min = *vcodim_min;
            if (vmode) run.mode = *vmode == "random" ? ScanMode::Random : ScanMode::Exhaustive;
            if (cfg.codim_max) run.codim_max = cfg.codim_max;
            if (cfg.q) run.q = cfg.q;
            run.space_limit = cfg.space_limit;
            run.seed = c.seed;
            run.element_budget = c.budget;
            run.search_budget = c.search_budget;
            run.jobs = c.jobs;
            Field::of_order(run.field, c.max_order);
            const TheoremReport r = verify_theorem(id, run);
            emit(c, r.to_json(), r.to_text());
            if (r.failed) return kViolation;
            if (r.refused) return kBudget;
            return r.ok() ? kOk : kViolation;
        }
    } catch (const BudgetExceeded& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return kBudget;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "violation: " << e.what() << "\n";
        return kViolation;
    }
    return kUsage;
}
