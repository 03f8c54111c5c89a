// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "rcmap/harness.hpp"

using namespace rcmap;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;
    Json json = Json::object();

    void require(bool cond, const std::string& what) {
        if (!cond) {
            pass = false;
            notes.push_back(what);
        }
    }
};

struct Criterion {
    int id;
    std::string title;
    double limit_seconds;
    std::function<Outcome(unsigned jobs)> run;
};

/// Runs a suite and records its deterministic report.
TheoremReport suite(Outcome& out, const std::string& key, const std::string& id, ScanConfig cfg, unsigned jobs) {
    cfg.jobs = jobs;
    TheoremReport r = verify_theorem(id, cfg);
    out.json[key] = r.to_json();
    std::ostringstream msg;
    msg << id << ": " << r.failed << " failed, " << r.refused << " refused of " << r.checked;
    out.require(r.ok(), msg.str());
    return r;
}

/// Range-compatibility by enumerating every element and solving by brute force.
bool brute_rc(const Space& s, const AdditiveMap& fm) {
    for (const auto& m : oracle::elements(s))
        if (!oracle::in_image(m, fm(m))) return false;
    return true;
}

std::set<std::vector<unsigned>> column_span(const Mat& m) {
    const oracle::NaiveField f(m.field());
    std::vector<std::vector<unsigned>> cols;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        std::vector<unsigned> c;
        for (std::size_t i = 0; i < m.rows(); ++i) c.push_back(m(i, j));
        cols.push_back(c);
    }
    return oracle::span(f, cols, m.rows());
}

bool brute_range_preserving(const OpMap& g) {
    for (const auto& m : oracle::elements(g.domain()))
        if (column_span(g(m)) != column_span(m)) return false;
    return true;
}

Outcome criterion1(unsigned jobs) {
    Outcome out;
    ScanConfig cfg = default_config("main-linear");
    cfg.field = 2;
    cfg.n = cfg.p = 3;
    cfg.mode = ScanMode::Exhaustive;
    cfg.codim_min = 0;
    cfg.codim_max = 2;
    const TheoremReport r = suite(out, "main-linear", "main-linear", cfg, jobs);
    out.require(r.checked == 43947 && r.predicted_instances == 43947u, "expected 43947 spaces");
    out.notes.push_back(std::to_string(r.checked) + " spaces");
    return out;
}

Outcome criterion2(unsigned) {
    Outcome out;
    for (unsigned q : {3u, 4u}) {
        const Field f = Field::of_order(q);
        const Space u = intro_u(f);
        const AdditiveMap fm =
            AdditiveMap::from_function(u, 2, [&](const Mat& m) { return Mat::column(f, {m(0, 1), 0}); });
        const bool rc = brute_rc(u, fm);
        const bool local = is_local(u, fm).has_value();
        out.require(u.codim() == 2 && fm.is_linear() && rc && !local, "U over F" + std::to_string(q));
        out.json["U_F" + std::to_string(q)] = {{"codim", u.codim()}, {"rc", rc}, {"local", local}};
    }
    const Field f2 = Field::make(2);
    const Space s = f2_sharpness(f2, 3, 3);
    const AdditiveMap fm =
        AdditiveMap::from_function(s, 3, [&](const Mat& m) { return Mat::column(f2, {m(0, 0), m(1, 1), 0}); });
    const bool rc = brute_rc(s, fm);
    const bool local = is_local(s, fm).has_value();
    out.require(s.codim() == 3 && d_n(f2, 3) == 2 && fm.is_linear() && rc && !local, "F2 sharpness space");
    out.json["Sym2_F2"] = {{"codim", s.codim()}, {"rc", rc}, {"local", local}};
    return out;
}

Outcome criterion3(unsigned jobs) {
    Outcome out;
    ScanConfig cfg = default_config("first-classification");
    cfg.field = 4;
    cfg.n = 3;
    cfg.p = 2;
    cfg.mode = ScanMode::Exhaustive;
    cfg.codim_min = 1;
    cfg.codim_max = 1;
    const TheoremReport r = suite(out, "first-classification", "first-classification", cfg, jobs);
    out.require(r.checked == 1365 && r.predicted_instances == 1365u, "expected 1365 spaces");
    out.notes.push_back(std::to_string(r.checked) + " spaces");
    return out;
}

Outcome criterion4(unsigned jobs) {
    Outcome out;
    const TheoremReport r = suite(out, "symmetric", "symmetric", default_config("symmetric"), jobs);
    out.require(r.checked == 6, "six symmetric spaces");
    // Independent count over F2, n = 2: additive maps Sym2(F2) -> F2^2 are 2 x 3 bit matrices.
    const Space s = symmetric_space(Field::make(2), 2);
    std::size_t count = 0;
    for (unsigned code = 0; code < 64; ++code) {
        const AdditiveMap cand = AdditiveMap::from_function(s, 2, [&](const Mat& m) {
            const auto c = *s.coords(m);
            unsigned v0 = 0, v1 = 0;
            for (std::size_t b = 0; b < 3; ++b) {
                v0 ^= ((code >> b) & 1U) & c[b];
                v1 ^= ((code >> (3 + b)) & 1U) & c[b];
            }
            return Mat::column(Field::make(2), {static_cast<Elem>(v0), static_cast<Elem>(v1)});
        });
        count += brute_rc(s, cand);
    }
    out.require(count == 8, "oracle count of range-compatible maps over F2 should be 2^3");
    out.json["F2_n2_brute_count"] = count;
    return out;
}

Outcome criterion5(unsigned jobs) {
    Outcome out;
    const TheoremReport r = suite(out, "K-local", "K-local", default_config("K-local"), jobs);
    out.require(r.checked == 10 && r.witnesses == 1, "nine local K-spaces and one K2 witness");
    return out;
}

Outcome criterion6(unsigned jobs) {
    Outcome out;
    ScanConfig cfg = default_config("codim-formula");
    cfg.count = 1000;
    const TheoremReport r = suite(out, "codim-formula", "codim-formula", cfg, jobs);
    out.require(r.checked == 1000, "1000 spaces");
    out.notes.push_back(std::to_string(r.tallies.count("lines") ? r.tallies.at("lines") : 0) + " lines");
    return out;
}

Outcome criterion7(unsigned jobs) {
    Outcome out;
    ScanConfig cfg = default_config("reflexivity-bound");
    cfg.count = 200;
    const TheoremReport r = suite(out, "reflexivity-bound", "reflexivity-bound", cfg, jobs);
    out.require(r.checked >= 200, "200 random spaces");
    const std::uint64_t met = r.tallies.count("hypothesis_met") ? r.tallies.at("hypothesis_met") : 0;
    out.require(met > 0, "some instance meets the bound hypothesis");
    out.notes.push_back(std::to_string(met) + " meet the bound");
    const ReflexReport u = reflexivity_report(intro_u(Field::make(3)));
    out.require(u.closure_dim == 3 && u.dim == 2 && !u.is_reflexive && u.hat_rc_dim == 3, "U over F3");
    out.json["U_F3"] = reflex_report_json(u);
    return out;
}

Outcome criterion8(unsigned jobs) {
    Outcome out;
    const Field f3 = Field::make(3);
    const Space full = full_space(f3, 2, 2);
    const PreserverReport rep = classify_preservers(full, 2, MapFlavor::linear());
    out.json["Mat22_F3"] = preserver_report_json(rep, false);

    std::set<std::vector<Elem>> gl, found;
    oracle::for_each_vector(f3, 4, [&](const Vec& v) {
        if (oracle::rank(Mat(f3, 2, 2, v.entries())) == 2) gl.insert(v.entries());
    });
    bool forms = true;
    std::vector<OpMap> tested;
    for (const auto& inst : rep.preservers) {
        forms = forms && inst.fit.has_value();
        if (!inst.fit) continue;
        found.insert(inst.fit->Q.entries());
        for (const auto& m : oracle::elements(full)) forms = forms && inst.map(m) == m * inst.fit->Q;
        tested.push_back(inst.map);
    }
    out.require(gl.size() == 48 && rep.preserving_count == 48 && found == gl && forms, "48 maps M -> MQ");
    out.notes.push_back(std::to_string(rep.preserving_count) + " preservers");

    // U v Mat_{m,p}: M -> M + b at (1, 3).
    for (const Field f : {f3, Field::make(2, 2)}) {
        const Space u = intro_u(f);
        const Space t = vee(u, full_space(f, 1, 1));
        const OpMap g = OpMap::from_function(t, 3, 3, [&](const Mat& x) {
            Mat y = x;
            y(0, 2) = f.add(y(0, 2), x(0, 1));
            return y;
        });
        const bool ok = brute_range_preserving(g) && preserving_filter(g, PreserveMode::Range) &&
                        !standard_form(g).has_value() && g.is_linear();
        out.require(ok, "explicit map on U v Mat over " + f.name());
        tested.push_back(g);
    }
    // Sym2(F2) v Mat_{m,p}: M -> M + (a, c) in column 3.
    const Field f2 = Field::make(2);
    for (std::size_t m : {1u, 2u}) {
        const Space t = vee(symmetric_space(f2, 2), full_space(f2, m, m));
        const OpMap g = OpMap::from_function(t, 2 + m, 2 + m, [&](const Mat& x) {
            Mat y = x;
            y(0, 2) ^= x(0, 0);
            y(1, 2) ^= x(1, 1);
            return y;
        });
        const bool ok = brute_range_preserving(g) && preserving_filter(g, PreserveMode::Range) &&
                        !standard_form(g).has_value() && g.is_linear();
        out.require(ok, "explicit map on Sym2(F2) v Mat_" + std::to_string(m));
        tested.push_back(g);
    }
    bool duality = true;
    for (const auto& g : tested) {
        const OpMap d = transpose_dual(g);
        duality = duality && transpose_dual(d) == g &&
                  preserving_filter(d, PreserveMode::Kernel) == preserving_filter(g, PreserveMode::Range);
    }
    out.require(duality, "transpose duality");
    out.json["duality_maps"] = tested.size();
    suite(out, "preserver-standard", "preserver-standard", default_config("preserver-standard"), jobs);
    return out;
}

Outcome criterion9(unsigned jobs) {
    Outcome out;
    for (std::size_t p : {2u, 3u}) {
        ScanConfig cfg = default_config("second-classification");
        cfg.field = 4;
        cfg.n = 3;
        cfg.p = p;
        cfg.count = 500;
        cfg.mode = ScanMode::Random;
        const std::string key = "second-classification-3x" + std::to_string(p);
        const TheoremReport r = suite(out, key, "second-classification", cfg, jobs);
        const std::uint64_t nonlocal = r.tallies.count("nonlocal_spaces") ? r.tallies.at("nonlocal_spaces") : 0;
        out.require(r.checked == 500 && nonlocal > 0, key + " should meet non-local maps");
        out.notes.push_back("3x" + std::to_string(p) + ": " + std::to_string(nonlocal) + " non-local");
    }
    return out;
}

std::string join(const std::vector<std::string>& parts) {
    std::string s;
    for (const auto& p : parts) s += (s.empty() ? "" : "; ") + p;
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    bool skip_determinism = false;
    for (int i = 1; i < argc; ++i)
        if (std::string(argv[i]) == "--no-determinism") skip_determinism = true;

    const std::vector<Criterion> criteria = {
        {1, "main linear theorem, all codim <= 2 subspaces of Mat_3,3(F2)", 300, criterion1},
        {2, "sharpness at d_n + 1", 1, criterion2},
        {3, "first classification, all codim-1 subspaces of Mat_3,2(F4)", 120, criterion3},
        {4, "symmetric matrices over F2, F3, F4", 60, criterion4},
        {5, "K-spaces", 60, criterion5},
        {6, "codimension formula on 1000 random spaces", 120, criterion6},
        {7, "reflexivity", 180, criterion7},
        {8, "range preservers", 60, criterion8},
        {9, "second classification on 500 spaces per shape over F4", 600, criterion9},
    };

    bool all = true;
    std::vector<std::string> first_json;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run(1);
        } catch (const std::exception& e) {
            o.pass = false;
            o.notes.push_back(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.limit_seconds) o.require(false, "over the time limit");
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.2fs", secs);
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " [" << timing << "] "
                  << join(o.notes) << std::endl;
        all = all && o.pass;
        first_json.push_back(o.json.dump());
    }

    if (skip_determinism) {
        std::cout << "SKIP criterion 10: determinism" << std::endl;
        return all ? 0 : 1;
    }
    // A second run on four workers and a third on one must reproduce every report byte for byte.
    bool same = true;
    std::vector<std::string> diffs;
    for (unsigned jobs : {4u, 1u}) {
        for (std::size_t i = 0; i < criteria.size(); ++i) {
            std::string dump;
            try {
                dump = criteria[i].run(jobs).json.dump();
            } catch (const std::exception& e) {
                dump = e.what();
            }
            if (dump != first_json[i]) {
                same = false;
                diffs.push_back("criterion " + std::to_string(criteria[i].id) + " with jobs " + std::to_string(jobs));
            }
        }
    }
    std::cout << (same ? "PASS" : "FAIL") << " criterion 10: byte-identical JSON across runs and jobs 1/4 "
              << (same ? "" : join(diffs)) << std::endl;
    return all && same ? 0 : 1;
}
