#include "rcmap/harness.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "rcmap/preservers.hpp"
#include "rcmap/reflexivity.hpp"

namespace rcmap {

namespace {

constexpr std::size_t kMaxCounterexamples = 10;
constexpr std::size_t kChunk = 4096;

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a && b > UINT64_MAX / a) return UINT64_MAX;
    return a * b;
}

std::uint64_t sat_pow(std::uint64_t b, std::size_t e) {
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < e; ++i) r = sat_mul(r, b);
    return r;
}

struct Outcome {
    enum class Kind { Pass, Fail, Refused, Skipped };
    Kind kind = Kind::Pass;
    Json payload;
    std::map<std::string, std::uint64_t> tallies;
    std::uint64_t witnesses = 0;

    static Outcome skip() { return Outcome{Kind::Skipped, {}, {}, 0}; }
    static Outcome fail(Json payload) { return Outcome{Kind::Fail, std::move(payload), {}, 0}; }
    Outcome& tally(const std::string& key, std::uint64_t by = 1) {
        tallies[key] += by;
        return *this;
    }
};

void absorb(TheoremReport& rep, Outcome&& o) {
    for (const auto& [k, v] : o.tallies) rep.tallies[k] += v;
    rep.witnesses += o.witnesses;
    switch (o.kind) {
        case Outcome::Kind::Skipped:
            ++rep.skipped;
            return;
        case Outcome::Kind::Refused:
            ++rep.checked;
            ++rep.refused;
            return;
        case Outcome::Kind::Fail:
            ++rep.checked;
            ++rep.failed;
            if (rep.counterexamples.size() < kMaxCounterexamples) rep.counterexamples.push_back(std::move(o.payload));
            return;
        case Outcome::Kind::Pass:
            ++rep.checked;
            ++rep.passed;
            return;
    }
}

/// Runs `fn` and turns library exceptions into outcomes.
template <class Fn>
Outcome guarded(Fn&& fn, const std::function<Json()>& context) {
    try {
        return fn();
    } catch (const BudgetExceeded& e) {
        Outcome o;
        o.kind = Outcome::Kind::Refused;
        o.payload = Json{{"refusal", e.what()}};
        return o;
    } catch (const DecompositionFailure& e) {
        Json p = context();
        p["error"] = e.what();
        p["residual"] = map_to_json(e.residual(), MapFlavor::additive());
        return Outcome::fail(std::move(p));
    } catch (const Error& e) {
        Json p = context();
        p["error"] = e.what();
        return Outcome::fail(std::move(p));
    }
}

Field field_of(const ScanConfig& c) { return Field::of_order(c.field); }

long signed_bound(std::size_t n, long offset) { return 2 * static_cast<long>(n) + offset; }

std::size_t clamp_codim(long v) { return v < 0 ? 0 : static_cast<std::size_t>(v); }

using SpaceCheck = std::function<Outcome(const Space&, std::uint64_t index)>;
using SpaceGen = std::function<Space(std::uint64_t index)>;

void run_outcomes(TheoremReport& rep, std::size_t count, unsigned jobs, const std::function<Outcome(std::size_t)>& fn) {
    for (std::size_t start = 0; start < count; start += kChunk) {
        const std::size_t len = std::min(kChunk, count - start);
        auto outs = parallel_map<Outcome>(len, jobs, [&](std::size_t i) { return fn(start + i); });
        for (auto& o : outs) absorb(rep, std::move(o));
    }
}

/// Exhaustive scan over every codimension in [lo, hi], or random instances
/// produced by `gen` in random mode.
void scan_spaces(TheoremReport& rep, const ScanConfig& cfg, std::size_t lo, std::size_t hi, const SpaceGen& gen,
                 const SpaceCheck& check) {
    const Field f = field_of(cfg);
    if (cfg.mode == ScanMode::Random) {
        run_outcomes(rep, cfg.count, cfg.jobs, [&](std::size_t i) {
            std::optional<Space> s;
            return guarded(
                [&] {
                    s.emplace(gen(i));
                    return check(*s, i);
                },
                [&] { return s ? Json{{"space", space_to_json(*s)}} : Json::object(); });
        });
        return;
    }
    const std::uint64_t predicted = subspace_count(f, cfg.n, cfg.p, lo, hi);
    rep.predicted_instances = predicted;
    if (predicted > cfg.space_limit) throw BudgetExceeded("exhaustive subspace scan", predicted, cfg.space_limit);
    std::uint64_t index = 0;
    std::vector<Space> chunk;
    auto flush = [&] {
        auto outs = parallel_map<Outcome>(chunk.size(), cfg.jobs, [&](std::size_t i) {
            const Space& s = chunk[i];
            const std::uint64_t idx = index + i;
            return guarded([&] { return check(s, idx); }, [&] { return Json{{"space", space_to_json(s)}}; });
        });
        for (auto& o : outs) absorb(rep, std::move(o));
        index += chunk.size();
        chunk.clear();
    };
    for (std::size_t c = lo; c <= hi; ++c)
        enumerate_subspaces(f, cfg.n, cfg.p, c, cfg.space_limit, [&](const Space& s) {
            chunk.push_back(s);
            if (chunk.size() == kChunk) flush();
            return true;
        });
    flush();
    const std::uint64_t visited = rep.checked + rep.skipped;
    if (visited != predicted) {
        ++rep.failed;
        rep.counterexamples.push_back(Json{{"error", "instance count differs from the Gaussian-binomial prediction"},
                                           {"visited", visited},
                                           {"predicted", predicted}});
    }
}

SpaceGen uniform_gen(const ScanConfig& cfg, std::size_t lo, std::size_t hi, std::uint64_t stream) {
    return [=](std::uint64_t i) {
        auto rng = instance_rng(cfg.seed, stream, i);
        const std::size_t c = lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
        return random_space(field_of(cfg), cfg.n, cfg.p, c, rng);
    };
}

/// Three instances in four are drawn uniformly; the rest are planted
/// exceptional spaces (Type 1, or Types 2/3 in characteristic 2) moved by
/// random equivalences, so that non-local maps actually occur.
SpaceGen planted_gen(const ScanConfig& cfg, std::size_t lo, std::size_t hi, std::uint64_t stream) {
    return [=](std::uint64_t i) {
        const Field f = field_of(cfg);
        const std::size_t n = cfg.n, p = cfg.p;
        auto rng = instance_rng(cfg.seed, stream, i);
        const std::size_t kind = i % 4;
        if (kind == 0 && n >= 2 && p >= 1 && hi >= n - 1) {
            const std::size_t base = n - 1;
            const std::size_t from = std::max(lo, base);
            const std::size_t c = from + static_cast<std::size_t>(rng() % (hi - from + 1));
            const Space s0 = random_subspace(type1_canonical(f, n, p), c - base, rng);
            return act(random_invertible(f, n, rng), random_invertible(f, p, rng), s0);
        }
        if (kind == 1 && f.p() == 2 && n >= 2 && p >= 2 && 2 * n - 3 <= hi && 2 * n - 3 >= lo) {
            const bool three = (i / 4) % 2 == 1 && n == 3 && p >= 3;
            const Space c0 = three ? type3_canonical(f, p) : type2_canonical(f, n, p);
            return act(random_invertible(f, n, rng), random_invertible(f, p, rng), c0);
        }
        const std::size_t c = lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
        return random_space(f, n, p, c, rng);
    };
}

Json nonlocal_payload(const Space& s, const RCMapSpace& rc, const LocalSpace& local) {
    Json p{{"space", space_to_json(s)}};
    for (const auto& f : rc.basis())
        if (!local.maps.contains(f)) {
            p["map"] = map_to_json(f, rc.flavor());
            break;
        }
    return p;
}

/// rc_space(S, flavor) equals the local maps; otherwise the failing payload.
Outcome expect_local(const Space& s, MapFlavor flavor, std::uint64_t budget) {
    const RCMapSpace rc = rc_space(s, flavor, budget);
    const LocalSpace local = local_space(s);
    if (rc.same_span(local.maps)) return Outcome{};
    Json p = nonlocal_payload(s, rc, local);
    p["error"] = "non-local range-compatible map below the bound";
    return Outcome::fail(std::move(p));
}

// Independent oracle: dimension of the range-compatible additive maps,
// assembled from every element M and every y with y^T M = 0 (found by brute
// force) and eliminated with a separate dense reducer.
class DenseReducer {
public:
    DenseReducer(unsigned p, std::size_t width) : p_(p), width_(width) {
        inv_.assign(p, 0);
        for (unsigned a = 1; a < p; ++a)
            for (unsigned b = 1; b < p; ++b)
                if (a * b % p == 1) inv_[a] = b;
    }
    void add(std::vector<unsigned> row) {
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const unsigned c = row[pivots_[i]];
            if (!c) continue;
            for (std::size_t j = 0; j < width_; ++j) row[j] = (row[j] + (p_ - c) * rows_[i][j]) % p_;
        }
        std::size_t piv = width_;
        for (std::size_t j = 0; j < width_; ++j)
            if (row[j]) {
                piv = j;
                break;
            }
        if (piv == width_) return;
        const unsigned s = inv_[row[piv]];
        for (auto& x : row) x = x * s % p_;
        for (auto& r : rows_) {
            const unsigned c = r[piv];
            if (!c) continue;
            for (std::size_t j = 0; j < width_; ++j) r[j] = (r[j] + (p_ - c) * row[j]) % p_;
        }
        rows_.push_back(std::move(row));
        pivots_.push_back(piv);
    }
    std::size_t rank() const { return rows_.size(); }

private:
    unsigned p_;
    std::size_t width_;
    std::vector<unsigned> inv_;
    std::vector<std::vector<unsigned>> rows_;
    std::vector<std::size_t> pivots_;
};

std::size_t naive_rc_dim(const Space& s) {
    const Field f = s.field();
    const unsigned k = f.k(), p = f.p();
    const std::size_t n = s.rows(), cols = s.cols(), g = s.gdim();
    const std::size_t width = k * n * g;
    DenseReducer red(p, width);
    const auto ys = all_vectors(f, n);
    std::vector<Elem> tpow(k, 1);
    for (unsigned j = 1; j < k; ++j) tpow[j] = f.mul(tpow[j - 1], f.generator());
    s.for_each_element(
        [&](const std::vector<Elem>& flat, const std::vector<std::uint8_t>& c) {
            for (const auto& y : ys) {
                if (y.is_zero()) continue;
                bool annihilates = true;
                for (std::size_t col = 0; col < cols && annihilates; ++col) {
                    Elem acc = 0;
                    for (std::size_t r = 0; r < n; ++r) acc = f.add(acc, f.mul(y[r], flat[r * cols + col]));
                    annihilates = acc == 0;
                }
                if (!annihilates) continue;
                for (unsigned l = 0; l < k; ++l) {
                    std::vector<unsigned> row(width, 0);
                    for (std::size_t r = 0; r < n; ++r)
                        for (unsigned j = 0; j < k; ++j) {
                            const unsigned d = f.digit(f.mul(y[r], tpow[j]), l);
                            if (!d) continue;
                            for (std::size_t b = 0; b < g; ++b) row[(r * k + j) * g + b] = d * c[b] % p;
                        }
                    red.add(std::move(row));
                }
            }
            return true;
        },
        true);
    return width - red.rank();
}

// Suites.

TheoremReport suite_main_linear(const ScanConfig& cfg, bool additive) {
    TheoremReport rep;
    const Field f = field_of(cfg);
    const std::size_t bound = additive ? clamp_codim(static_cast<long>(cfg.n) - 2) : d_n(f, cfg.n);
    const std::size_t hi = std::min(cfg.codim_max.value_or(bound), cfg.n * cfg.p);
    const MapFlavor flavor = additive ? MapFlavor::additive() : MapFlavor::linear();
    scan_spaces(rep, cfg, cfg.codim_min, hi, uniform_gen(cfg, cfg.codim_min, hi, 1), [&](const Space& s, std::uint64_t) {
        if (s.codim() > bound || (!additive && cfg.p < 2) || (additive && cfg.n < 2)) return Outcome::skip();
        return expect_local(s, flavor, cfg.element_budget);
    });
    return rep;
}

TheoremReport suite_generalized_first(const ScanConfig& cfg) {
    TheoremReport rep;
    const Field f = field_of(cfg);
    const std::size_t bound = clamp_codim(static_cast<long>(cfg.n) - 2);
    const std::size_t hi = std::min(cfg.codim_max.value_or(bound), cfg.n * cfg.p);
    scan_spaces(rep, cfg, cfg.codim_min, hi, uniform_gen(cfg, cfg.codim_min, hi, 2), [&](const Space& s, std::uint64_t i) {
        if (s.codim() > bound || cfg.n < 2) return Outcome::skip();
        auto rng = instance_rng(cfg.seed, 3, i);
        std::vector<Mat> gens = s.gbasis();
        const std::size_t extra = 1 + rng() % 2;
        for (std::size_t e = 0; e < extra; ++e) gens.push_back(random_matrix(f, cfg.n, cfg.p, rng));
        const Space t = Space::make(f, cfg.n, cfg.p, gens, Scalars::Prime);
        Outcome o = expect_local(t, MapFlavor::additive(), cfg.element_budget);
        if (t.gdim() > s.gdim()) o.tally("proper_subgroups");
        return o;
    });
    return rep;
}

/// Checks (a)-(e) of the second classification on one space.
Outcome second_classification_check(const Space& s, const ScanConfig& cfg) {
    const Field f = s.field();
    Outcome o;
    const LocalSpace local = local_space(s);
    const RCMapSpace lin = rc_space(s, MapFlavor::linear(), cfg.element_budget);
    if (!lin.same_span(local.maps)) {
        Json p = nonlocal_payload(s, lin, local);
        p["error"] = "non-local range-compatible linear map";
        return Outcome::fail(std::move(p));
    }
    const RCMapSpace add = rc_space(s, MapFlavor::additive(), cfg.element_budget);
    const TypeReport tr = detect_type(s, cfg.search_budget);
    if (tr.verdict == SpaceType::Inconclusive) {
        o.kind = Outcome::Kind::Refused;
        return o;
    }
    o.tally("type_" + type_name(tr.verdict));
    if (add.same_span(local.maps)) {
        if (tr.verdict != SpaceType::None && !f.is_prime()) {
            Json p{{"space", space_to_json(s)}, {"error", "exceptional type detected but every map is local"}};
            p["type"] = type_report_json(tr);
            return Outcome::fail(std::move(p));
        }
        return o.tally("all_local");
    }
    o.tally("nonlocal_spaces");
    if (tr.verdict == SpaceType::None) {
        Json p = nonlocal_payload(s, add, local);
        p["error"] = "non-local homomorphism on a space of none of the exceptional types";
        return Outcome::fail(std::move(p));
    }
    const TypeCertificate cert = tr.certificate();
    for (const auto& fmap : add.basis()) {
        if (local.maps.contains(fmap)) continue;
        decompose_rc(s, fmap, cert);
        o.tally("decomposed_maps");
    }
    return o;
}

TheoremReport suite_second_classification(const ScanConfig& cfg) {
    TheoremReport rep;
    const Field f = field_of(cfg);
    const std::size_t bound = clamp_codim(signed_bound(cfg.n, -3));
    const std::size_t hi = std::min(cfg.codim_max.value_or(bound), cfg.n * cfg.p);
    scan_spaces(rep, cfg, cfg.codim_min, hi, planted_gen(cfg, cfg.codim_min, hi, 4), [&](const Space& s, std::uint64_t) {
        if (f.q() <= 2 || cfg.n < 2 || cfg.p < 1 || s.codim() > bound) return Outcome::skip();
        return second_classification_check(s, cfg);
    });
    return rep;
}

TheoremReport suite_three_vectors(const ScanConfig& cfg) {
    TheoremReport rep;
    const Field f = field_of(cfg);
    const std::size_t bound = clamp_codim(signed_bound(cfg.n, -3));
    const std::size_t hi = std::min(cfg.codim_max.value_or(bound), cfg.n * cfg.p);
    scan_spaces(rep, cfg, cfg.codim_min, hi, planted_gen(cfg, cfg.codim_min, hi, 5), [&](const Space& s, std::uint64_t i) {
        if (cfg.n < 3 || s.codim() > bound) return Outcome::skip();
        Outcome o;
        const RCMapSpace add = rc_space(s, MapFlavor::additive(), cfg.element_budget);
        std::vector<AdditiveMap> maps = add.basis();
        auto rng = instance_rng(cfg.seed, 6, i);
        for (int extra = 0; extra < 2 && !add.basis().empty(); ++extra) {
            AdditiveMap m = AdditiveMap::zero(s, s.rows());
            for (const auto& b : add.basis()) m = m + b.scaled(static_cast<unsigned>(rng() % f.p()));
            maps.push_back(std::move(m));
        }
        const auto ys = projective_points(f, s.rows());
        for (const auto& fm : maps) {
            std::vector<Vec> good;
            for (const auto& y : ys) {
                const Projection pr = project_mod(s, y);
                if (is_local(pr.space, project_map(s, fm, y))) good.push_back(y);
            }
            const bool hypothesis = !good.empty() && rank(rows_of(f, s.rows(), good)) >= 3;
            const bool loc = is_local(s, fm).has_value();
            if (!loc) o.tally("nonlocal_maps");
            if (!hypothesis) continue;
            o.tally("hypothesis_met");
            if (!loc) {
                Json p{{"space", space_to_json(s)}, {"map", map_to_json(fm, MapFlavor::additive())}};
                p["error"] = "local modulo three independent vectors but not local";
                return Outcome::fail(std::move(p));
            }
        }
        return o;
    });
    return rep;
}

TheoremReport suite_adapted(const ScanConfig& cfg) {
    TheoremReport rep;
    const std::size_t bound = clamp_codim(signed_bound(cfg.n, -3));
    const std::size_t hi = std::min(cfg.codim_max.value_or(bound), cfg.n * cfg.p);
    scan_spaces(rep, cfg, cfg.codim_min, hi, uniform_gen(cfg, cfg.codim_min, hi, 7), [&](const Space& s, std::uint64_t) {
        if (cfg.n < 3 || cfg.p < 2 || s.codim() > bound) return Outcome::skip();
        const AdaptedReport ar = adapted_vectors(s, cfg.search_budget);
        Json ctx{{"space", space_to_json(s)}};
        if (!ar.formula_consistent) {
            ctx["error"] = "codimension formula disagrees with the direct projection";
            return Outcome::fail(ctx);
        }
        Outcome o;
        if (ar.hyperplane_cover) {
            o.tally("hyperplane_cover");
        } else if (ar.exceptional) {
            o.tally("exceptional_" + *ar.exceptional);
        } else if (!ar.search_exhausted) {
            o.kind = Outcome::Kind::Refused;
            return o;
        } else {
            ctx["error"] = "neither a hyperplane cover nor one of the listed spaces";
            return Outcome::fail(ctx);
        }
        if (ar.exceptional != std::optional<std::string>("zero_col")) {
            std::vector<Vec> adapted;
            for (const auto& e : ar.entries)
                if (e.adapted) adapted.push_back(e.y);
            if (adapted.empty() || rank(rows_of(s.field(), s.rows(), adapted)) < s.rows()) {
                ctx["error"] = "adapted vectors do not span the target space";
                return Outcome::fail(ctx);
            }
        }
        return o;
    });
    return rep;
}

TheoremReport suite_codim_formula(const ScanConfig& cfg) {
    TheoremReport rep;
    const unsigned orders[] = {2, 3, 4};
    const std::size_t nmax = std::max<std::size_t>(cfg.n, 2), pmax = std::max<std::size_t>(cfg.p, 1);
    run_outcomes(rep, cfg.count, cfg.jobs, [&](std::size_t i) {
        auto rng = instance_rng(cfg.seed, 8, i);
        const Field f = Field::of_order(orders[i % 3]);
        const std::size_t n = 2 + rng() % (nmax - 1);
        const std::size_t p = 1 + rng() % pmax;
        const std::size_t c = rng() % (n * p + 1);
        const Space s = random_space(f, n, p, c, rng);
        return guarded(
            [&] {
                Outcome o;
                const Space perp = orthogonal(s);
                for (const auto& y : projective_points(f, n)) {
                    const std::size_t direct = project_mod(s, y).space.codim();
                    const std::size_t py = evaluate_span(perp, y).dim();
                    if (direct + py != s.codim()) {
                        Json p{{"space", space_to_json(s)}, {"y", vec_to_json(y)}, {"direct", direct}, {"perp_dim", py}};
                        p["error"] = "codim(S mod y) differs from codim S - dim S^perp y";
                        return Outcome::fail(std::move(p));
                    }
                    o.tally("lines");
                }
                return o;
            },
            [&] { return Json{{"space", space_to_json(s)}}; });
    });
    return rep;
}

TheoremReport suite_reflexivity(const ScanConfig& cfg) {
    TheoremReport rep;
    const Field f = field_of(cfg);
    const std::size_t n = cfg.n, p = cfg.p, np = n * p;
    std::size_t top = 0;
    for (std::size_t d = np; d > 0 && !top; --d)
        if (reflexivity_bound_ok(f, n, p, d)) top = d;
    run_outcomes(rep, cfg.count, cfg.jobs, [&](std::size_t i) {
        auto rng = instance_rng(cfg.seed, 9, i);
        std::size_t dim = rng() % (np + 1);
        if (i % 2 == 0 && top >= 1) dim = top;
        const Space s = random_space(f, n, p, np - dim, rng);
        return guarded(
            [&] {
                Outcome o;
                const ReflexReport r = reflexivity_report(s, cfg.element_budget);
                const Space closure = reflexive_closure(s, cfg.element_budget);
                Json ctx{{"space", space_to_json(s)}, {"report", reflex_report_json(r)}};
                if (!s.is_subspace_of(closure) || reflexive_closure(closure, cfg.element_budget) != closure) {
                    ctx["error"] = "reflexive closure is not an idempotent enlargement";
                    return Outcome::fail(ctx);
                }
                if (r.reduced.reduced) o.tally("reduced");
                if (r.is_reflexive) o.tally("reflexive");
                if (r.reduced.reduced && r.bound_ok) {
                    o.tally("hypothesis_met");
                    if (!r.is_reflexive) {
                        ctx["error"] = "reduced space meeting the dimension bound is not reflexive";
                        return Outcome::fail(ctx);
                    }
                }
                return o;
            },
            [&] { return Json{{"space", space_to_json(s)}}; });
    });
    const Field f3 = Field::make(3);
    const ReflexReport u = reflexivity_report(intro_u(f3), cfg.element_budget);
    rep.details["intro_U_F3"] = reflex_report_json(u);
    if (u.closure_dim != 3 || u.is_reflexive || u.hat_rc_dim != 3) {
        ++rep.failed;
        rep.counterexamples.push_back(Json{{"error", "intro_U over F3 should have a 3-dimensional closure"}});
    }
    return rep;
}

Json fixed_fail(const std::string& what, const Space& s) { return Json{{"error", what}, {"space", space_to_json(s)}}; }

TheoremReport suite_symmetric(const ScanConfig& cfg) {
    TheoremReport rep;
    for (std::size_t n : {2u, 3u}) {
        const Field f3 = Field::make(3);
        const Space s3 = symmetric_space(f3, n);
        absorb(rep, guarded(
                        [&] {
                            Outcome o = expect_local(s3, MapFlavor::additive(), cfg.element_budget);
                            const auto rc = rc_space(s3, MapFlavor::additive(), cfg.element_budget);
                            if (o.kind == Outcome::Kind::Pass && (rc.kdim() != n || naive_rc_dim(s3) != n))
                                return Outcome::fail(fixed_fail("dimension over F3 should be n", s3));
                            return o;
                        },
                        [&] { return Json{{"space", space_to_json(s3)}}; }));

        const Field f2 = Field::make(2);
        const Space s2 = symmetric_space(f2, n);
        absorb(rep, guarded(
                        [&] {
                            const auto rc = rc_space(s2, MapFlavor::additive(), cfg.element_budget);
                            if (rc.kdim() != n + 1 || naive_rc_dim(s2) != n + 1)
                                return Outcome::fail(fixed_fail("dimension over F2 should be n + 1", s2));
                            if (n == 2) {
                                // Every one of the 2^(2*3) additive maps, filtered by enumeration.
                                std::uint64_t rc_count = 0;
                                const std::size_t len = 2 * s2.gdim();
                                for (std::uint64_t code = 0; code < (std::uint64_t{1} << len); ++code) {
                                    std::vector<std::uint8_t> a(len);
                                    for (std::size_t b = 0; b < len; ++b) a[b] = (code >> b) & 1U;
                                    const AdditiveMap cand(s2, 2, a);
                                    if (!is_range_compatible(cand)) continue;
                                    ++rc_count;
                                    if (!rc.contains(cand))
                                        return Outcome::fail(fixed_fail("oracle map outside the computed space", s2));
                                }
                                if (rc_count != 8) return Outcome::fail(fixed_fail("oracle count should be 8", s2));
                                rep.details["F2_n2_oracle_rc_maps"] = rc_count;
                            }
                            return Outcome{};
                        },
                        [&] { return Json{{"space", space_to_json(s2)}}; }));

        const Field f4 = Field::make(2, 2);
        const Space s4 = symmetric_space(f4, n);
        absorb(rep, guarded(
                        [&] {
                            const auto rc = rc_space(s4, MapFlavor::additive(), cfg.element_budget);
                            const std::size_t naive = naive_rc_dim(s4);
                            if (rc.kdim() != 2 * n + 2 || naive != 2 * n + 2)
                                return Outcome::fail(fixed_fail("dimension over F4 should be 2n + 2", s4));
                            std::vector<AdditiveMap> gens = local_space(s4).maps.basis();
                            for (const auto& alpha : endo_space(f4, EndoKind::RootLinear))
                                gens.push_back(exceptional_map(DiagKind{alpha, n}, s4, cfg.element_budget));
                            const RCMapSpace generated(s4, n, MapFlavor::additive(), canonical_span(s4, n, gens));
                            if (!generated.same_span(rc))
                                return Outcome::fail(fixed_fail("local and diagonal maps do not generate", s4));
                            return Outcome{};
                        },
                        [&] { return Json{{"space", space_to_json(s4)}}; }));
    }
    return rep;
}

TheoremReport suite_k_local(const ScanConfig& cfg) {
    TheoremReport rep;
    for (unsigned order : {2u, 3u, 4u}) {
        const Field f = Field::of_order(order);
        for (int i : {1, 3, 4}) {
            const Space k = k_space(f, i);
            absorb(rep, guarded([&] { return expect_local(k, MapFlavor::additive(), cfg.element_budget); },
                                [&] { return Json{{"space", space_to_json(k)}, {"K", i}}; }));
        }
    }
    const Field f4 = Field::make(2, 2);
    const Space k2 = k_space(f4, 2);
    absorb(rep, guarded(
                    [&] {
                        Outcome o;
                        const RCMapSpace add = rc_space(k2, MapFlavor::additive(), cfg.element_budget);
                        const LocalSpace local = local_space(k2);
                        const TypeReport tr = detect_type(k2, cfg.search_budget);
                        if (add.same_span(local.maps) || tr.verdict != SpaceType::Type1)
                            return Outcome::fail(fixed_fail("K2 over F4 should carry a Type-1 non-local map", k2));
                        for (const auto& fm : add.basis())
                            if (!local.maps.contains(fm)) decompose_rc(k2, fm, tr.certificate());
                        o.witnesses = 1;
                        return o;
                    },
                    [&] { return Json{{"space", space_to_json(k2)}}; }));
    return rep;
}

/// A sharpness witness: codimension as stated, linear or additive as
/// requested, range-compatible by enumeration, not local.
Outcome witness(const Space& s, const AdditiveMap& fm, std::size_t codim, bool linear, std::uint64_t budget) {
    Json ctx{{"space", space_to_json(s)}, {"map", map_to_json(fm, MapFlavor::additive())}};
    if (s.codim() != codim) {
        ctx["error"] = "codimension differs from the stated one";
        return Outcome::fail(ctx);
    }
    if (linear != fm.is_linear()) {
        ctx["error"] = linear ? "witness should be linear" : "witness should be non-linear";
        return Outcome::fail(ctx);
    }
    if (!is_range_compatible(fm, budget) || is_local(s, fm)) {
        ctx["error"] = "not a non-local range-compatible map";
        return Outcome::fail(ctx);
    }
    Outcome o;
    o.witnesses = 1;
    return o;
}

TheoremReport suite_sharpness_dn(const ScanConfig& cfg) {
    TheoremReport rep;
    rep.sharpness = true;
    for (unsigned order : {3u, 4u, 5u}) {
        const Field f = Field::of_order(order);
        const Space u = intro_u(f);
        absorb(rep, guarded(
                        [&] {
                            auto fm = AdditiveMap::from_function(u, 2, [&](const Mat& m) { return Mat::column(f, {m(0, 1), 0}); });
                            return witness(u, fm, d_n(f, 2) + 1, true, cfg.element_budget);
                        },
                        [&] { return Json{{"space", space_to_json(u)}}; }));
    }
    const Field f3 = Field::make(3);
    const Space ue = intro_u_extended(f3, 3, 3);
    absorb(rep, guarded(
                    [&] {
                        auto fm = AdditiveMap::from_function(ue, 3, [&](const Mat& m) { return Mat::column(f3, {m(0, 1), 0, 0}); });
                        // 2n - 2 = d_n + 1 for fields with more than two elements.
                        return witness(ue, fm, d_n(f3, 3) + 1, true, cfg.element_budget);
                    },
                    [&] { return Json{{"space", space_to_json(ue)}}; }));
    const Field f2 = Field::make(2);
    for (std::size_t n : {2u, 3u}) {
        const Space s = f2_sharpness(f2, n, 3);
        absorb(rep, guarded(
                        [&] {
                            auto fm = AdditiveMap::from_function(s, n, [&](const Mat& m) {
                                Mat v(f2, n, 1);
                                v(0, 0) = m(0, 0);
                                v(1, 0) = m(1, 1);
                                return v;
                            });
                            return witness(s, fm, d_n(f2, n) + 1, true, cfg.element_budget);
                        },
                        [&] { return Json{{"space", space_to_json(s)}}; }));
    }
    return rep;
}

TheoremReport suite_sharpness_first(const ScanConfig& cfg) {
    TheoremReport rep;
    rep.sharpness = true;
    for (unsigned order : {4u, 8u, 9u}) {
        const Field f = Field::of_order(order);
        for (std::size_t n : {2u, 3u}) {
            const Space s = type1_canonical(f, n, 2);
            absorb(rep, guarded(
                            [&] {
                                const AdditiveEndo phi = AdditiveEndo::frobenius(f, 1);
                                const Vec e1 = Mat::basis_vector(f, 2, 0);
                                const AdditiveMap fm = exceptional_map(Type1Kind{e1, phi}, s, cfg.element_budget);
                                return witness(s, fm, n - 1, false, cfg.element_budget);
                            },
                            [&] { return Json{{"space", space_to_json(s)}}; }));
        }
    }
    // Over a prime field the same family carries only local maps.
    const Field f3 = Field::make(3);
    const Space s3 = type1_canonical(f3, 3, 2);
    absorb(rep, guarded([&] { return expect_local(s3, MapFlavor::additive(), cfg.element_budget); },
                        [&] { return Json{{"space", space_to_json(s3)}}; }));
    return rep;
}

bool has_common_kernel(const Space& s) { return !common_kernel(s).empty(); }

TheoremReport suite_preserver_standard(const ScanConfig& cfg) {
    TheoremReport rep;
    const Field f = field_of(cfg);
    const std::size_t bound = d_n(f, cfg.n);
    const std::size_t hi = std::min(cfg.codim_max.value_or(bound), cfg.n * cfg.p);
    const std::size_t q = cfg.q.value_or(cfg.p);
    scan_spaces(rep, cfg, cfg.codim_min, hi, uniform_gen(cfg, cfg.codim_min, hi, 10), [&](const Space& s, std::uint64_t i) {
        if (s.codim() > bound || has_common_kernel(s) || cfg.n < 2) return Outcome::skip();
        PreserverOptions opt{cfg.element_budget, cfg.seed + i, 20};
        const PreserverReport r = classify_preservers(s, q, MapFlavor::linear(), opt);
        const std::string expected = q >= cfg.p ? "matches" : "no preserver exists";
        Json ctx{{"space", space_to_json(s)}, {"report", preserver_report_json(r, false)}};
        if (r.verdict != expected) {
            ctx["error"] = "expected verdict '" + expected + "'";
            return Outcome::fail(ctx);
        }
        Outcome o;
        o.tally("preservers", r.preserving_count);
        for (const auto& inst : r.preservers) {
            const OpMap dual = transpose_dual(inst.map);
            if (!preserving_filter(dual, PreserveMode::Kernel, cfg.element_budget) || transpose_dual(dual) != inst.map) {
                ctx["error"] = "transpose duality fails on a preserver";
                return Outcome::fail(ctx);
            }
        }
        return o;
    });
    return rep;
}

TheoremReport suite_preserver_type1(const ScanConfig& cfg) {
    TheoremReport rep;
    const Field f = field_of(cfg);
    const std::size_t n = cfg.n, p = cfg.p;
    const std::size_t bound = clamp_codim(signed_bound(n, -3));
    run_outcomes(rep, cfg.count, cfg.jobs, [&](std::size_t i) {
        auto rng = instance_rng(cfg.seed, 11, i);
        std::optional<Space> s;
        return guarded(
            [&] {
                const bool zero_last = i % 2 == 1;
                const Space ambient = zero_last ? coprod(full_space(f, n, p - 1), zero_space(f, n, 1))
                                                : type1_canonical(f, n, p);
                if (ambient.codim() > bound) return Outcome::skip();
                const std::size_t extra = rng() % (bound - ambient.codim() + 1);
                s.emplace(random_subspace(ambient, extra, rng));
                const std::size_t q = p - 1 + (i / 2) % 3;
                if (q == 0) return Outcome::skip();
                const auto form = applicable_form(*s, MapFlavor::additive());
                if (!form || *form != (zero_last ? "zero-last-column" : "type1")) return Outcome::skip();
                PreserverOptions opt{cfg.element_budget, cfg.seed + i, 20};
                const PreserverReport r = classify_preservers(*s, q, MapFlavor::additive(), opt);
                const bool exists = form_predicts_existence(*form, *s, q);
                const std::string expected = exists ? "matches" : "no preserver exists";
                if (r.verdict != expected) {
                    Json ctx{{"space", space_to_json(*s)}, {"q", q}, {"report", preserver_report_json(r, false)}};
                    ctx["error"] = "expected verdict '" + expected + "'";
                    return Outcome::fail(ctx);
                }
                Outcome o;
                o.tally(*form);
                o.tally("preservers", r.preserving_count);
                return o;
            },
            [&] { return s ? Json{{"space", space_to_json(*s)}} : Json::object(); });
    });
    return rep;
}

TheoremReport suite_preserver_type2(const ScanConfig& cfg) {
    TheoremReport rep;
    struct Case {
        unsigned order;
        std::size_t r, n, p, q;
    };
    std::vector<Case> cases;
    for (std::size_t r : {2u, 3u})
        for (std::size_t q : {2u, 3u, 4u}) cases.push_back({2, r, 3, 3, q});
    for (std::size_t q : {1u, 2u, 3u}) cases.push_back({4, 2, 2, 2, q});
    run_outcomes(rep, cases.size(), cfg.jobs, [&](std::size_t i) {
        const Case c = cases[i];
        const Field f = Field::of_order(c.order);
        const Space s = symmetric_vee(f, c.r, c.n, c.p);
        return guarded(
            [&] {
                PreserverOptions opt{cfg.element_budget, cfg.seed + i, 20};
                const PreserverReport r = classify_preservers(s, c.q, MapFlavor::additive(), opt);
                const std::string expected = c.q >= c.p ? "matches" : "no preserver exists";
                if (r.form != "symmetric" || r.verdict != expected || (c.q >= c.p && !r.enumerated)) {
                    Json ctx{{"space", space_to_json(s)}, {"q", c.q}, {"report", preserver_report_json(r, false)}};
                    ctx["error"] = "expected an enumerated verdict '" + expected + "'";
                    return Outcome::fail(ctx);
                }
                Outcome o;
                o.tally("preservers", r.preserving_count);
                return o;
            },
            [&] { return Json{{"space", space_to_json(s)}, {"q", c.q}}; });
    });
    return rep;
}

TheoremReport suite_preserver_semilinear(const ScanConfig& cfg) {
    TheoremReport rep;
    const Field f = field_of(cfg);
    const std::size_t bound = d_n(f, cfg.n);
    const std::size_t hi = std::min(cfg.codim_max.value_or(bound), cfg.n * cfg.p);
    scan_spaces(rep, cfg, cfg.codim_min, hi, uniform_gen(cfg, cfg.codim_min, hi, 12), [&](const Space& s, std::uint64_t i) {
        if (s.codim() > bound || cfg.n < 2 || f.is_prime()) return Outcome::skip();
        PreserverOptions opt{cfg.element_budget, cfg.seed + i, 20};
        const PreserverReport r = classify_preservers(s, cfg.p, MapFlavor::semilinear(1), opt);
        Json ctx{{"space", space_to_json(s)}, {"report", preserver_report_json(r, false)}};
        if (!r.enumerated) {
            Outcome o;
            o.kind = Outcome::Kind::Refused;
            return o;
        }
        for (const auto& sum : r.semilinear)
            if (sum.sigma != 0 && (sum.preserving_count != 0 || !sum.enumerated)) {
                ctx["error"] = "semilinear preserver with a non-trivial automorphism";
                return Outcome::fail(ctx);
            }
        if (r.preserving_count == 0) {
            ctx["error"] = "no linear preserver found";
            return Outcome::fail(ctx);
        }
        for (const auto& inst : r.preservers) {
            if (!fit_normal_form(inst.map, "standard")) {
                ctx["error"] = "linear preserver is not M -> MP";
                return Outcome::fail(ctx);
            }
            // Kernel side: the transpose dual preserves kernels on S^T.
            const OpMap dual = transpose_dual(inst.map);
            if (!preserving_filter(dual, PreserveMode::Kernel, cfg.element_budget)) {
                ctx["error"] = "transpose dual is not kernel-preserving";
                return Outcome::fail(ctx);
            }
        }
        Outcome o;
        o.tally("preservers", r.preserving_count);
        return o;
    });
    return rep;
}

struct SuiteInfo {
    const char* id;
    TheoremReport (*run)(const ScanConfig&);
};

TheoremReport run_main_linear(const ScanConfig& c) { return suite_main_linear(c, false); }
TheoremReport run_first(const ScanConfig& c) { return suite_main_linear(c, true); }

const SuiteInfo kSuites[] = {
    {"main-linear", run_main_linear},
    {"first-classification", run_first},
    {"generalized-first", suite_generalized_first},
    {"second-classification", suite_second_classification},
    {"symmetric", suite_symmetric},
    {"K-local", suite_k_local},
    {"adapted-dichotomy", suite_adapted},
    {"three-vectors", suite_three_vectors},
    {"codim-formula", suite_codim_formula},
    {"reflexivity-bound", suite_reflexivity},
    {"preserver-standard", suite_preserver_standard},
    {"preserver-type1", suite_preserver_type1},
    {"preserver-type2", suite_preserver_type2},
    {"preserver-semilinear", suite_preserver_semilinear},
    {"sharpness-dn", suite_sharpness_dn},
    {"sharpness-first", suite_sharpness_first},
};

}  // namespace

std::uint64_t gaussian_binomial(std::uint64_t q, std::size_t n, std::size_t d) {
    if (d > n) return 0;
    d = std::min(d, n - d);
    // Product formula on exact rationals, kept integral by dividing as we go.
    unsigned __int128 num = 1;
    for (std::size_t i = 0; i < d; ++i) {
        const std::uint64_t top = sat_pow(q, n - i);
        const std::uint64_t bot = sat_pow(q, i + 1);
        if (top == UINT64_MAX) return UINT64_MAX;
        num = num * (top - 1) / (bot - 1);
        if (num > UINT64_MAX) return UINT64_MAX;
    }
    return static_cast<std::uint64_t>(num);
}

std::uint64_t subspace_count(Field f, std::size_t n, std::size_t p, std::size_t codim_min, std::size_t codim_max) {
    std::uint64_t total = 0;
    const std::size_t big = n * p;
    for (std::size_t c = codim_min; c <= std::min(codim_max, big); ++c) {
        const std::uint64_t g = gaussian_binomial(f.q(), big, big - c);
        total = (g == UINT64_MAX || total > UINT64_MAX - g) ? UINT64_MAX : total + g;
    }
    return total;
}

void enumerate_subspaces(Field f, std::size_t n, std::size_t p, std::size_t codim, std::uint64_t limit,
                         const std::function<bool(const Space&)>& fn) {
    const std::size_t big = n * p;
    if (codim > big) throw InvalidArgument("codimension exceeds the ambient dimension");
    const std::size_t d = big - codim;
    const std::uint64_t total = gaussian_binomial(f.q(), big, d);
    if (total > limit) throw BudgetExceeded("subspace enumeration", total, limit);
    std::vector<std::size_t> piv(d);
    for (std::size_t i = 0; i < d; ++i) piv[i] = i;
    while (true) {
        std::vector<bool> is_pivot(big, false);
        for (auto c : piv) is_pivot[c] = true;
        std::vector<std::pair<std::size_t, std::size_t>> free;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = piv[i] + 1; j < big; ++j)
                if (!is_pivot[j]) free.emplace_back(i, j);
        std::vector<Elem> digits(free.size(), 0);
        for (bool more = true; more;) {
            std::vector<Mat> gens;
            gens.reserve(d);
            for (std::size_t i = 0; i < d; ++i) {
                Mat m(f, n, p);
                m[piv[i]] = 1;
                gens.push_back(std::move(m));
            }
            for (std::size_t t = 0; t < free.size(); ++t) gens[free[t].first][free[t].second] = digits[t];
            if (!fn(Space::make(f, n, p, gens))) return;
            more = false;
            for (std::size_t t = free.size(); t-- > 0;) {
                if (++digits[t] < f.q()) {
                    more = true;
                    break;
                }
                digits[t] = 0;
            }
        }
        // Next pivot combination in lexicographic order.
        std::size_t i = d;
        while (i > 0 && piv[i - 1] == big - d + i - 1) --i;
        if (i == 0) return;
        ++piv[i - 1];
        for (std::size_t j = i; j < d; ++j) piv[j] = piv[j - 1] + 1;
    }
}

Mat random_matrix(Field f, std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    Mat m(f, rows, cols);
    for (auto& x : m.entries()) x = static_cast<Elem>(rng() % f.q());
    return m;
}

Mat random_invertible(Field f, std::size_t n, std::mt19937_64& rng) {
    while (true) {
        Mat m = random_matrix(f, n, n, rng);
        if (is_invertible(m)) return m;
    }
}

Space random_space(Field f, std::size_t n, std::size_t p, std::size_t codim, std::mt19937_64& rng) {
    if (codim > n * p) throw InvalidArgument("codimension exceeds the ambient dimension");
    return random_subspace(full_space(f, n, p), codim, rng);
}

Space random_subspace(const Space& ambient, std::size_t extra, std::mt19937_64& rng) {
    if (ambient.scalars() != Scalars::Field) throw InvalidArgument("random subspaces need field scalars");
    const Field f = ambient.field();
    const std::size_t d = ambient.dim();
    if (extra > d) throw InvalidArgument("codimension exceeds the dimension of the ambient space");
    const std::size_t target = d - extra;
    std::vector<Mat> gens;
    Space cur = zero_space(f, ambient.rows(), ambient.cols());
    while (cur.dim() < target) {
        Mat m(f, ambient.rows(), ambient.cols());
        for (const auto& b : ambient.basis()) m += b.scaled(static_cast<Elem>(rng() % f.q()));
        if (cur.contains(m)) continue;
        gens.push_back(std::move(m));
        cur = Space::make(f, ambient.rows(), ambient.cols(), gens);
    }
    return cur;
}

std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

Json ScanConfig::to_json() const {
    Json j{{"field", field},
           {"n", n},
           {"p", p},
           {"codim_min", codim_min},
           {"codim_max", codim_max ? Json(*codim_max) : Json(nullptr)},
           {"mode", mode == ScanMode::Exhaustive ? "exhaustive" : "random"},
           {"seed", seed},
           {"count", count},
           {"q", q ? Json(*q) : Json(nullptr)},
           {"element_budget", element_budget},
           {"search_budget", search_budget},
           {"space_limit", space_limit}};
    return j;
}

bool TheoremReport::ok() const {
    if (failed || refused) return false;
    if (predicted_instances && *predicted_instances != checked + skipped) return false;
    return !sharpness || witnesses > 0;
}

Json TheoremReport::to_json() const {
    Json tal = Json::object();
    for (const auto& [k, v] : tallies) tal[k] = v;
    Json j{{"format", kFormatVersion},
           {"id", id},
           {"config", config},
           {"checked", checked},
           {"passed", passed},
           {"failed", failed},
           {"refused", refused},
           {"skipped", skipped},
           {"predicted_instances", predicted_instances ? Json(*predicted_instances) : Json(nullptr)},
           {"witnesses", witnesses},
           {"tallies", tal},
           {"details", details},
           {"counterexamples", counterexamples},
           {"ok", ok()}};
    return j;
}

std::string TheoremReport::to_text() const {
    std::ostringstream out;
    out << id << ": " << (ok() ? "PASS" : "FAIL") << "  checked " << checked << ", passed " << passed << ", failed "
        << failed << ", refused " << refused << ", skipped " << skipped;
    if (predicted_instances) out << ", predicted " << *predicted_instances;
    if (sharpness) out << ", witnesses " << witnesses;
    out << "\n";
    for (const auto& [k, v] : tallies) out << "  " << k << ": " << v << "\n";
    if (!counterexamples.empty()) out << "  first counterexample: " << counterexamples[0].dump() << "\n";
    out << "  wall time " << wall_seconds << " s\n";
    return out.str();
}

std::vector<std::string> theorem_ids() {
    std::vector<std::string> ids;
    for (const auto& s : kSuites) ids.emplace_back(s.id);
    return ids;
}

ScanConfig default_config(const std::string& id) {
    ScanConfig c;
    auto set = [&](unsigned field, std::size_t n, std::size_t p, ScanMode mode, std::size_t count) {
        c.field = field;
        c.n = n;
        c.p = p;
        c.mode = mode;
        c.count = count;
    };
    constexpr auto E = ScanMode::Exhaustive;
    constexpr auto R = ScanMode::Random;
    if (id == "main-linear") set(2, 3, 3, E, 0);
    else if (id == "first-classification") set(4, 3, 2, E, 0);
    else if (id == "generalized-first") set(3, 3, 3, R, 100);
    else if (id == "second-classification") set(4, 3, 3, R, 500);
    else if (id == "adapted-dichotomy") set(2, 3, 2, E, 0);
    else if (id == "three-vectors") set(2, 3, 3, R, 200);
    else if (id == "codim-formula") set(2, 3, 3, R, 1000);
    else if (id == "reflexivity-bound") set(2, 3, 3, R, 200);
    else if (id == "preserver-standard") set(2, 3, 2, E, 0);
    else if (id == "preserver-type1") set(2, 3, 3, R, 12);
    else if (id == "preserver-semilinear") {
        set(4, 2, 2, E, 0);
        c.codim_max = 1;
    }
    return c;
}

TheoremReport verify_theorem(const std::string& id, const ScanConfig& config) {
    for (const auto& s : kSuites) {
        if (id != s.id) continue;
        const auto t0 = std::chrono::steady_clock::now();
        TheoremReport rep = s.run(config);
        rep.id = id;
        rep.config = config.to_json();
        rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return rep;
    }
    throw InvalidArgument("unknown theorem id '" + id + "'");
}

}  // namespace rcmap
