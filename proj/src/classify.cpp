#include "rcmap/classify.hpp"

#include <algorithm>

namespace rcmap {

namespace {

/// dim span{B_i v} for the K-basis of s.
std::size_t image_dim(const Space& s, const Vec& v) {
    const auto& basis = s.basis();
    const std::size_t d = basis.size();
    if (d == 0) return 0;
    Mat cols(s.field(), s.rows(), d);
    for (std::size_t i = 0; i < d; ++i) cols.set_block(0, i, basis[i] * v);
    return rank(cols);
}

Vec vector_from_code(Field f, std::size_t len, std::size_t code) {
    Vec v(f, len, 1);
    for (std::size_t i = 0; i < len; ++i) {
        v[i] = static_cast<Elem>(code % f.q());
        code /= f.q();
    }
    return v;
}

std::size_t code_of(const Vec& v) {
    std::size_t code = 0;
    for (std::size_t i = v.rows(); i-- > 0;) code = code * v.field().q() + v[i];
    return code;
}

bool is_projective(const Vec& v) {
    for (std::size_t i = 0; i < v.rows(); ++i)
        if (v[i] != 0) return v[i] == 1;
    return false;
}

class EquivalenceSearcher {
public:
    EquivalenceSearcher(const Space& s, const Space& c, std::uint64_t budget, bool scale)
        : s_(s), c_(c), f_(s.field()), budget_(budget), scale_(scale), perp_(orthogonal(c)) {
        total_ = 1;
        for (std::size_t i = 0; i < s.cols(); ++i) total_ *= f_.q();
        sdim_.assign(total_, -1);
        cdim_.assign(total_, -1);
        for (std::size_t code = 1; code < total_; ++code) {
            Vec v = vector_from_code(f_, s.cols(), code);
            if (scale_ && !is_projective(v)) continue;
            candidates_.push_back(v);
        }
    }

    EquivalenceSearch run() {
        EquivalenceSearch out;
        std::vector<Vec> z;
        search(z, out);
        out.nodes = nodes_;
        out.exhausted = !over_budget_;
        return out;
    }

private:
    int sdim(const Vec& v) {
        auto& slot = sdim_[code_of(v)];
        if (slot < 0) slot = static_cast<int>(image_dim(s_, v));
        return slot;
    }
    int cdim(const Vec& w) {
        auto& slot = cdim_[code_of(w)];
        if (slot < 0) slot = static_cast<int>(image_dim(c_, w));
        return slot;
    }

    bool tick(std::uint64_t n = 1) {
        nodes_ += n;
        if (nodes_ > budget_) over_budget_ = true;
        return !over_budget_;
    }

    /// Checks every w with w_j = 1 and arbitrary earlier coordinates.
    bool consistent(const std::vector<Vec>& z) {
        const std::size_t j = z.size() - 1;
        std::size_t combos = 1;
        for (std::size_t i = 0; i < j; ++i) combos *= f_.q();
        for (std::size_t code = 0; code < combos; ++code) {
            Vec w(f_, s_.cols(), 1);
            Vec v = z[j];
            std::size_t rest = code;
            for (std::size_t i = 0; i < j; ++i) {
                w[i] = static_cast<Elem>(rest % f_.q());
                rest /= f_.q();
                if (w[i]) v += z[i].scaled(w[i]);
            }
            w[j] = 1;
            if (sdim(v) != cdim(w)) return false;
        }
        return true;
    }

    void search(std::vector<Vec>& z, EquivalenceSearch& out) {
        if (out.found || over_budget_) return;
        const std::size_t p = s_.cols();
        if (z.size() == p) {
            leaf(z, out);
            return;
        }
        for (const auto& cand : candidates_) {
            if (!tick()) return;
            if (!z.empty()) {
                Mat m(f_, p, z.size() + 1);
                for (std::size_t i = 0; i < z.size(); ++i) m.set_block(0, i, z[i]);
                m.set_block(0, z.size(), cand);
                if (rank(m) != z.size() + 1) continue;
            }
            z.push_back(cand);
            if (consistent(z)) search(z, out);
            z.pop_back();
            if (out.found || over_budget_) return;
        }
    }

    void leaf(const std::vector<Vec>& z, EquivalenceSearch& out) {
        const std::size_t n = s_.rows(), p = s_.cols();
        Mat r(f_, p, p);
        for (std::size_t i = 0; i < p; ++i) r.set_block(0, i, z[i]);
        // tr(N P X) = sum_{a,b} P(a,b) (X N)(b,a) with X = B_i R.
        const auto& nb = perp_.basis();
        Mat sys(f_, s_.dim() * nb.size(), n * n);
        std::size_t row = 0;
        for (const auto& b : s_.basis()) {
            const Mat x = b * r;
            for (const auto& nm : nb) {
                const Mat xn = x * nm;
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t bb = 0; bb < n; ++bb) sys(row, a * n + bb) = xn(bb, a);
                ++row;
            }
        }
        const auto sols = nullspace(sys);
        if (sols.empty()) return;
        std::uint64_t count = 1;
        for (std::size_t i = 0; i < sols.size() && count <= budget_; ++i) count *= f_.q();
        std::vector<Elem> coeff(sols.size(), 0);
        const Mat q = inverse_or_throw(r, "column matrix");
        for (std::uint64_t idx = 1; idx < count; ++idx) {
            if (!tick()) return;
            std::uint64_t rest = idx;
            Mat pm(f_, n, n);
            for (std::size_t i = 0; i < sols.size(); ++i) {
                coeff[i] = static_cast<Elem>(rest % f_.q());
                rest /= f_.q();
                if (coeff[i]) pm += Mat(f_, n, n, sols[i].entries()).scaled(coeff[i]);
            }
            if (!is_invertible(pm)) continue;
            if (act(pm, q, s_) == c_) {
                out.found = Equivalence{pm, q};
                return;
            }
        }
    }

    const Space& s_;
    const Space& c_;
    Field f_;
    std::uint64_t budget_;
    bool scale_;
    Space perp_;
    std::size_t total_ = 0;
    std::vector<int> sdim_;
    std::vector<int> cdim_;
    std::vector<Vec> candidates_;
    std::uint64_t nodes_ = 0;
    bool over_budget_ = false;
};

/// Prefilter and search for an equivalence to `c`. Returns the search, or
/// nothing when the invariants already differ.
std::optional<EquivalenceSearch> match_canonical(const Space& s, const Space& c, std::uint64_t budget, bool scale) {
    if (s.rows() != c.rows() || s.cols() != c.cols() || s.dim() != c.dim()) return std::nullopt;
    if (s == c) {
        EquivalenceSearch e;
        e.found = Equivalence{Mat::identity(s.field(), s.rows()), Mat::identity(s.field(), s.cols())};
        return e;
    }
    if (sx_profile(s) != sx_profile(c)) return std::nullopt;
    if (s.element_count() <= kDefaultElementBudget && rank_profile(s) != rank_profile(c)) return std::nullopt;
    return find_equivalence(s, c, budget, scale);
}

}  // namespace

EquivalenceSearch find_equivalence(const Space& s, const Space& c, std::uint64_t budget, bool scale_columns) {
    if (s.field() != c.field() || s.rows() != c.rows() || s.cols() != c.cols())
        throw InvalidArgument("equivalence search needs spaces of the same shape");
    if (s.scalars() != Scalars::Field || c.scalars() != Scalars::Field)
        throw InvalidArgument("equivalence search needs K-linear spaces");
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < s.cols(); ++i) total *= s.field().q();
    if (total > kDefaultElementBudget) throw BudgetExceeded("equivalence search over K^p", total, kDefaultElementBudget);
    if (s.dim() != c.dim()) return {};
    if (s.cols() == 0) {
        EquivalenceSearch e;
        if (s == c) e.found = Equivalence{Mat::identity(s.field(), s.rows()), Mat::identity(s.field(), 0)};
        return e;
    }
    EquivalenceSearcher searcher(s, c, budget, scale_columns);
    return searcher.run();
}

std::vector<std::size_t> sx_profile(const Space& s) {
    std::vector<std::size_t> out;
    for (const auto& x : projective_points(s.field(), s.cols())) out.push_back(image_dim(s, x));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> rank_profile(const Space& s, std::uint64_t budget) {
    s.require_enumerable(budget, "rank profile");
    std::vector<std::size_t> out;
    s.for_each_element(
        [&](const std::vector<Elem>& m, const std::vector<std::uint8_t>&) {
            out.push_back(rank(Mat(s.field(), s.rows(), s.cols(), m)));
            return true;
        },
        true);
    std::sort(out.begin(), out.end());
    return out;
}

TypeCertificate TypeReport::certificate() const {
    TypeCertificate c;
    c.type = verdict;
    c.type1_witnesses = type1_witnesses;
    c.P = P;
    c.Q = Q;
    return c;
}

TypeReport detect_type(const Space& s, std::uint64_t budget) {
    if (s.scalars() != Scalars::Field) throw InvalidArgument("type detection needs a K-linear space");
    const Field f = s.field();
    const std::size_t n = s.rows(), p = s.cols();
    TypeReport rep;
    std::vector<SpaceType> positive;

    for (const auto& x : projective_points(f, p))
        if (image_dim(s, x) == 1) rep.type1_witnesses.push_back(x);
    if (!rep.type1_witnesses.empty()) positive.push_back(SpaceType::Type1);

    bool inconclusive = false;
    auto try_family = [&](SpaceType t, const Space& c) {
        auto m = match_canonical(s, c, budget, true);
        if (!m) return;
        rep.nodes += m->nodes;
        if (m->found) {
            positive.push_back(t);
            if (!rep.P) {
                rep.P = m->found->P;
                rep.Q = m->found->Q;
                rep.method = s == c ? "canonical" : "invariant+search";
            }
        } else if (!m->exhausted) {
            inconclusive = true;
            rep.search_exhausted = false;
        }
    };
    if (f.p() == 2 && n >= 2 && p >= 2) try_family(SpaceType::Type2, type2_canonical(f, n, p));
    if (f.p() == 2 && n == 3 && p >= 3) try_family(SpaceType::Type3, type3_canonical(f, p));

    if (positive.size() > 1) throw InvariantViolation("space verifies more than one exceptional type");
    if (positive.empty()) {
        rep.verdict = inconclusive ? SpaceType::Inconclusive : SpaceType::None;
        if (rep.method.empty()) rep.method = rep.nodes ? "invariant+search" : "prefilter";
        return rep;
    }
    rep.verdict = positive.front();
    if (rep.verdict == SpaceType::Type1) rep.method = "scan";
    return rep;
}

AdaptedReport adapted_vectors(const Space& s, std::uint64_t budget) {
    if (s.scalars() != Scalars::Field) throw InvalidArgument("adapted vectors need a K-linear space");
    const std::size_t n = s.rows(), p = s.cols();
    if (n < 2) throw InvalidArgument("adapted vectors need n >= 2");
    const Field f = s.field();
    AdaptedReport rep;
    rep.n = n;
    rep.p = p;
    rep.codim = s.codim();
    const Space perp = orthogonal(s);
    const long bound = 2 * (static_cast<long>(n) - 1) - 3;
    std::vector<Vec> non_adapted;
    for (const auto& y : projective_points(f, n)) {
        AdaptedEntry e{y};
        e.perp_dim = image_dim(perp, y);
        e.codim_formula = rep.codim - e.perp_dim;
        e.codim_direct = project_mod(s, y).space.codim();
        e.adapted = static_cast<long>(e.codim_direct) <= bound;
        e.super_codim = static_cast<long>(e.codim_direct) <= bound - 1;
        e.super_perp = e.perp_dim > 2;
        if (e.codim_formula != e.codim_direct) rep.formula_consistent = false;
        if (!e.adapted) non_adapted.push_back(y);
        rep.entries.push_back(std::move(e));
    }
    rep.hyperplane_cover = non_adapted.empty() || rank(rows_of(f, n, non_adapted)) <= n - 1;
    if (n == 3 && !rep.hyperplane_cover) {
        struct Candidate {
            const char* name;
            std::size_t min_p;
            bool scale;
        };
        const Candidate cands[] = {{"zero_col", 1, true}, {"K1", 3, true}, {"K2", 2, true}, {"K3", 2, false}};
        for (const auto& c : cands) {
            if (p < c.min_p) continue;
            Space target = zero_column_space(f, 3, p);
            const std::string name = c.name;
            if (name == "K1") target = coprod(k_space(f, 1), full_space(f, 3, p - 3));
            if (name == "K2") target = coprod(k_space(f, 2), full_space(f, 3, p - 2));
            if (name == "K3") target = coprod(k_space(f, 3), full_space(f, 3, p - 2));
            auto m = match_canonical(s, target, budget, c.scale);
            if (!m) continue;
            if (m->found) {
                rep.exceptional = name;
                rep.exceptional_certificate = m->found;
                break;
            }
            if (!m->exhausted) rep.search_exhausted = false;
        }
    }
    return rep;
}

std::size_t d_n(Field f, std::size_t n) {
    const std::size_t sub = f.q() > 2 ? 3 : 4;
    return 2 * n >= sub ? 2 * n - sub : 0;
}

GateReport theorem_gate(const Space& s) {
    GateReport g;
    g.n = s.rows();
    g.p = s.cols();
    g.codim = s.codim();
    g.dn = d_n(s.field(), g.n);
    g.codim_le_n_minus_2 = g.n >= 2 && g.codim <= g.n - 2;
    g.codim_le_dn = 2 * g.n >= (s.field().q() > 2 ? 3u : 4u) && g.codim <= g.dn;
    g.codim_le_2n_minus_3 = 2 * g.n >= 3 && g.codim <= 2 * g.n - 3;
    g.p_ge_2 = g.p >= 2;
    g.characteristic = s.field().p();
    g.field_gt_2 = s.field().q() > 2;
    return g;
}

}  // namespace rcmap
