#include "rcmap/preservers.hpp"

#include <random>

#include "rcmap/classify.hpp"
#include "rcmap/echelon.hpp"

namespace rcmap {

namespace {

/// Extends the independent rows of `top` to an invertible q x q matrix by
/// appending standard basis rows, in index order.
Mat complete_rows(const Mat& top) {
    const Field f = top.field();
    const std::size_t q = top.cols();
    Mat cur = top;
    for (std::size_t j = 0; j < q && cur.rows() < q; ++j) {
        Mat cand = vstack(cur, Mat::unit(f, 1, q, 0, j));
        if (rank(cand) == cand.rows()) cur = cand;
    }
    if (cur.rows() != q || !is_invertible(cur)) throw InvariantViolation("row completion failed");
    return cur;
}

/// Visits particular + sum c_i null_i over every coefficient vector, up to
/// `budget` points, until `pred` returns true.
template <class Pred>
bool search_coset(Field f, const Mat& particular, const std::vector<Vec>& null, std::uint64_t budget, Pred&& pred) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < null.size() && count <= budget; ++i) count *= f.q();
    if (count > budget) count = budget;
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        Mat x = particular;
        std::uint64_t rest = idx;
        for (const auto& v : null) {
            const Elem c = static_cast<Elem>(rest % f.q());
            rest /= f.q();
            if (c) x += v.scaled(c);
        }
        if (pred(x)) return true;
    }
    return false;
}

/// P with F(M) = M[:, 0:a] P and rank P = a.
std::optional<Mat> fit_right_factor(const OpMap& fm, std::size_t a, std::uint64_t budget) {
    const Space& s = fm.domain();
    const Field f = s.field();
    const std::size_t n = s.rows(), q = fm.cols();
    if (fm.rows() != n || a > s.cols()) return std::nullopt;
    const std::size_t g = s.gdim();
    Mat sys(f, g * n * q, a * q);
    Mat rhs(f, g * n * q, 1);
    std::size_t row = 0;
    for (std::size_t b = 0; b < g; ++b) {
        const Mat& gb = s.gbasis()[b];
        const Mat val = fm(gb);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < q; ++c) {
                for (std::size_t l = 0; l < a; ++l) sys(row, l * q + c) = gb(i, l);
                rhs(row, 0) = val(i, c);
                ++row;
            }
    }
    const auto sol = solve(sys, rhs);
    if (!sol.particular) return std::nullopt;
    std::optional<Mat> out;
    search_coset(f, *sol.particular, sol.nullspace, budget, [&](const Mat& x) {
        Mat pm(f, a, q, x.entries());
        if (rank(pm) != a) return false;
        out = pm;
        return true;
    });
    return out;
}

Mat prime_system_matrix(Field pf, const std::vector<std::vector<Elem>>& rows, std::size_t ncols) {
    Mat m(pf, rows.size(), ncols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < ncols; ++j) m(i, j) = rows[i][j];
    return m;
}

bool in_row_span(const Mat& rows, const Vec& v) {
    if (rows.rows() == 0) return v.is_zero();
    return in_column_space(rows.transpose(), v.transpose());
}

Mat row_vector(Field f, const std::vector<Elem>& e) { return Mat(f, 1, e.size(), e); }

std::vector<Elem> apply_components(const std::vector<AdditiveEndo>& comps, Elem x) {
    std::vector<Elem> out(comps.size());
    for (std::size_t c = 0; c < comps.size(); ++c) out[c] = comps[c](x);
    return out;
}

std::optional<NormalForm> fit_type1(const OpMap& fm, std::uint64_t budget) {
    const Space& s = fm.domain();
    const Field f = s.field();
    const Field pf = f.prime_field();
    const unsigned k = f.k();
    const std::size_t n = s.rows(), p = s.cols(), q = fm.cols();
    if (fm.rows() != n || p < 1 || q + 1 < p) return std::nullopt;
    const std::size_t nq = (p - 1) * q * k;
    const std::size_t nunk = nq + q * k * k;
    std::vector<std::vector<Elem>> rows;
    std::vector<Elem> rhs;
    for (std::size_t b = 0; b < s.gdim(); ++b) {
        const Mat& gb = s.gbasis()[b];
        const Mat val = fm(gb);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < q; ++c)
                for (unsigned l = 0; l < k; ++l) {
                    std::vector<Elem> r(nunk, 0);
                    for (std::size_t col = 0; col + 1 < p; ++col) {
                        const auto mm = f.mul_matrix(gb(i, col + 1));
                        for (unsigned d = 0; d < k; ++d) r[(col * q + c) * k + d] = mm[l * k + d];
                    }
                    if (i == 0)
                        for (unsigned d = 0; d < k; ++d) r[nq + (c * k + l) * k + d] = static_cast<Elem>(f.digit(gb(0, 0), d));
                    rows.push_back(std::move(r));
                    rhs.push_back(static_cast<Elem>(f.digit(val(i, c), l)));
                }
    }
    const auto sol = solve(prime_system_matrix(pf, rows, nunk), Mat(pf, rhs.size(), 1, rhs));
    if (!sol.particular) return std::nullopt;
    std::optional<NormalForm> out;
    search_coset(pf, *sol.particular, sol.nullspace, budget, [&](const Mat& x) {
        Mat q2(f, p - 1, q);
        std::vector<unsigned> digits(k);
        for (std::size_t l = 0; l + 1 < p; ++l)
            for (std::size_t c = 0; c < q; ++c) {
                for (unsigned d = 0; d < k; ++d) digits[d] = x[(l * q + c) * k + d];
                q2(l, c) = f.from_digits(digits);
            }
        if (rank(q2) != p - 1) return false;
        std::vector<AdditiveEndo> j;
        for (std::size_t c = 0; c < q; ++c) {
            std::vector<Elem> m(k * k);
            for (unsigned l = 0; l < k; ++l)
                for (unsigned d = 0; d < k; ++d) m[l * k + d] = x[nq + (c * k + l) * k + d];
            j.emplace_back(f, std::move(m));
        }
        for (unsigned a = 1; a < f.q(); ++a)
            if (in_row_span(q2, row_vector(f, apply_components(j, static_cast<Elem>(a))))) return false;
        const Mat full = complete_rows(q2);
        // Q = [extra rows; Q2].
        Mat qm(f, q, q);
        qm.set_block(0, 0, full.block(p - 1, 0, q - p + 1, q));
        qm.set_block(q - p + 1, 0, q2);
        const Mat qinv = inverse_or_throw(qm, "Q");
        NormalForm nf{"type1", qm, {}, {}, 0};
        for (std::size_t c = 0; c < q; ++c) {
            auto endo = AdditiveEndo::from_function(f, [&](Elem e) {
                return (row_vector(f, apply_components(j, e)) * qinv)(0, c);
            });
            if (c < q - p + 1)
                nf.R.push_back(std::move(endo));
            else
                nf.Rprime.push_back(std::move(endo));
        }
        if (build_normal_form(s, q, nf) != fm) return false;
        out = std::move(nf);
        return true;
    });
    return out;
}

std::optional<NormalForm> fit_symmetric(const OpMap& fm, std::uint64_t budget) {
    const Space& s = fm.domain();
    const Field f = s.field();
    const Field pf = f.prime_field();
    const unsigned k = f.k();
    const std::size_t n = s.rows(), p = s.cols(), q = fm.cols();
    if (f.p() != 2 || fm.rows() != n || q < p) return std::nullopt;
    std::size_t r = 0;
    for (std::size_t cand = 2; cand <= std::min(n, p); ++cand)
        if (s == symmetric_vee(f, cand, n, p)) r = cand;
    if (r == 0) return std::nullopt;
    const auto roots = endo_space(f, EndoKind::RootLinear);
    const std::size_t e = roots.size();
    const std::size_t np = p * q * k;
    const std::size_t nunk = np + q * e;
    std::vector<std::vector<Elem>> rows;
    std::vector<Elem> rhs;
    for (std::size_t b = 0; b < s.gdim(); ++b) {
        const Mat& gb = s.gbasis()[b];
        const Mat val = fm(gb);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < q; ++c)
                for (unsigned l = 0; l < k; ++l) {
                    std::vector<Elem> row(nunk, 0);
                    for (std::size_t col = 0; col < p; ++col) {
                        const auto mm = f.mul_matrix(gb(i, col));
                        for (unsigned d = 0; d < k; ++d) row[(col * q + c) * k + d] = mm[l * k + d];
                    }
                    if (i < r)
                        for (std::size_t a = 0; a < e; ++a)
                            row[np + c * e + a] = static_cast<Elem>(f.digit(roots[a](gb(i, i)), l));
                    rows.push_back(std::move(row));
                    rhs.push_back(static_cast<Elem>(f.digit(val(i, c), l)));
                }
    }
    const auto sol = solve(prime_system_matrix(pf, rows, nunk), Mat(pf, rhs.size(), 1, rhs));
    if (!sol.particular) return std::nullopt;
    std::optional<NormalForm> out;
    search_coset(pf, *sol.particular, sol.nullspace, budget, [&](const Mat& x) {
        Mat pm(f, p, q);
        std::vector<unsigned> digits(k);
        for (std::size_t l = 0; l < p; ++l)
            for (std::size_t c = 0; c < q; ++c) {
                for (unsigned d = 0; d < k; ++d) digits[d] = x[(l * q + c) * k + d];
                pm(l, c) = f.from_digits(digits);
            }
        if (rank(pm) != p) return false;
        std::vector<AdditiveEndo> j;
        for (std::size_t c = 0; c < q; ++c) {
            std::vector<unsigned> coeffs(e);
            for (std::size_t a = 0; a < e; ++a) coeffs[a] = x[np + c * e + a];
            j.push_back(combine(f, roots, coeffs));
        }
        // Rows r..p-1 of P, then the image of J, must lie in span of Q's last q - r rows.
        Mat lower = pm.block(r, 0, p - r, q);
        Mat extra(f, 0, q);
        Elem tj = 1;
        for (unsigned d = 0; d < k; ++d, tj = f.mul(tj, f.generator())) {
            const Mat w = row_vector(f, apply_components(j, tj));
            if (in_row_span(vstack(lower, extra), w)) continue;
            if (in_row_span(vstack(pm, extra), w)) return false;
            extra = vstack(extra, w);
        }
        if (p + extra.rows() > q) return false;
        const Mat qm = complete_rows(vstack(pm, extra));
        const Mat qinv = inverse_or_throw(qm, "Q");
        NormalForm nf{"symmetric", qm, {}, {}, r};
        for (std::size_t c = r; c < q; ++c)
            nf.R.push_back(AdditiveEndo::from_function(f, [&](Elem a) {
                return (row_vector(f, apply_components(j, a)) * qinv)(0, c);
            }));
        if (build_normal_form(s, q, nf) != fm) return false;
        out = std::move(nf);
        return true;
    });
    return out;
}

Mat random_invertible(Field f, std::size_t q, std::mt19937_64& rng) {
    while (true) {
        Mat m(f, q, q);
        for (auto& x : m.entries()) x = static_cast<Elem>(rng() % f.q());
        if (is_invertible(m)) return m;
    }
}

AdditiveEndo random_endo(Field f, std::mt19937_64& rng) {
    std::vector<Elem> m(f.k() * f.k());
    for (auto& x : m) x = static_cast<Elem>(rng() % f.p());
    return AdditiveEndo(f, std::move(m));
}

bool jointly_injective(Field f, const std::vector<AdditiveEndo>& comps) {
    for (unsigned a = 1; a < f.q(); ++a) {
        bool all_zero = true;
        for (const auto& c : comps) all_zero = all_zero && c(static_cast<Elem>(a)) == 0;
        if (all_zero) return false;
    }
    return true;
}

std::optional<NormalForm> random_normal_form(const Space& s, std::size_t q, const std::string& form,
                                             std::mt19937_64& rng) {
    const Field f = s.field();
    const std::size_t p = s.cols();
    NormalForm nf{form, random_invertible(f, q, rng), {}, {}, 0};
    if (form == "standard" || form == "zero-last-column") return nf;
    if (form == "type1") {
        for (int attempt = 0; attempt < 64; ++attempt) {
            nf.R.clear();
            for (std::size_t c = 0; c < q - p + 1; ++c) nf.R.push_back(random_endo(f, rng));
            if (jointly_injective(f, nf.R)) break;
        }
        if (!jointly_injective(f, nf.R)) return std::nullopt;
        for (std::size_t c = 0; c + 1 < p; ++c) nf.Rprime.push_back(random_endo(f, rng));
        return nf;
    }
    if (form == "symmetric") {
        for (std::size_t cand = 2; cand <= std::min(s.rows(), p); ++cand)
            if (s == symmetric_vee(f, cand, s.rows(), p)) nf.r = cand;
        const auto roots = endo_space(f, EndoKind::RootLinear);
        for (std::size_t c = nf.r; c < q; ++c) {
            std::vector<unsigned> coeffs(roots.size());
            for (auto& x : coeffs) x = static_cast<unsigned>(rng() % f.p());
            nf.R.push_back(combine(f, roots, coeffs));
        }
        return nf;
    }
    return std::nullopt;
}

bool range_preserving_enum(const OpMap& fm, std::uint64_t budget) {
    const Space& s = fm.domain();
    if (fm.rows() != s.rows()) return false;
    s.require_enumerable(budget, "preserver check");
    bool ok = true;
    s.for_each_element(
        [&](const std::vector<Elem>& flat, const std::vector<std::uint8_t>& c) {
            const Mat m(s.field(), s.rows(), s.cols(), flat);
            const Mat v = fm.evaluate(c);
            const std::size_t rm = rank(m);
            if (rank(v) != rm || rank(hstack(m, v)) != rm) {
                ok = false;
                return false;
            }
            return true;
        },
        false);
    return ok;
}

bool has_rank_above(const Space& s, std::size_t q, std::mt19937_64& rng, std::size_t samples) {
    const Field f = s.field();
    for (const auto& b : s.basis())
        if (rank(b) > q) return true;
    for (std::size_t i = 0; i < samples; ++i) {
        std::vector<std::uint8_t> c(s.gdim());
        for (auto& x : c) x = static_cast<std::uint8_t>(rng() % f.p());
        if (rank(s.from_gcoords(c)) > q) return true;
    }
    return false;
}

OpMap combine_ops(const RestrictingSpace& rs, const std::vector<std::uint8_t>& coeffs) {
    const Space& s = rs.rc.domain();
    const unsigned p = s.field().p();
    const std::size_t len = s.field().k() * s.rows() * rs.q * s.gdim();
    std::vector<std::uint8_t> a(len, 0);
    for (std::size_t i = 0; i < rs.basis.size(); ++i) {
        if (!coeffs[i]) continue;
        const auto& m = rs.basis[i].map().matrix();
        for (std::size_t j = 0; j < len; ++j) a[j] = static_cast<std::uint8_t>((a[j] + coeffs[i] * m[j]) % p);
    }
    return OpMap(AdditiveMap(s, s.rows() * rs.q, std::move(a)), s.rows(), rs.q);
}

PreserverReport classify_one(const Space& s, std::size_t q, MapFlavor flavor, const PreserverOptions& opt) {
    PreserverReport rep;
    rep.flavor = flavor;
    rep.q = q;
    const Field f = s.field();
    const RestrictingSpace rs = range_restricting_space(s, q, flavor, opt.budget);
    rep.restricting_kdim = rs.kdim();
    const auto form = applicable_form(s, flavor);
    rep.form = form.value_or("");

    std::uint64_t total = 1;
    bool small = true;
    for (std::size_t i = 0; i < rs.kdim(); ++i) {
        total *= f.p();
        if (total > opt.budget) {
            small = false;
            break;
        }
    }
    const std::uint64_t work_cap = std::uint64_t{1} << 27;
    small = small && s.element_count() <= opt.budget && total * s.element_count() <= work_cap;
    rep.enumerated = small;
    std::mt19937_64 rng(opt.seed);

    auto consider = [&](const OpMap& cand) {
        ++rep.candidates_checked;
        if (!range_preserving_enum(cand, opt.budget)) return;
        ++rep.preserving_count;
        PreserverInstance inst{cand, std::nullopt};
        if (form) {
            inst.fit = fit_normal_form(cand, *form);
            if (!inst.fit) ++rep.fit_failures;
        }
        rep.preservers.push_back(std::move(inst));
    };

    std::vector<std::uint8_t> coeffs(rs.kdim(), 0);
    if (small) {
        for (std::uint64_t idx = 0; idx < total; ++idx) {
            std::uint64_t rest = idx;
            for (auto& c : coeffs) {
                c = static_cast<std::uint8_t>(rest % f.p());
                rest /= f.p();
            }
            consider(combine_ops(rs, coeffs));
        }
    } else {
        for (std::size_t i = 0; i < opt.samples; ++i) {
            for (auto& c : coeffs) c = static_cast<std::uint8_t>(rng() % f.p());
            consider(combine_ops(rs, coeffs));
        }
    }

    const bool predicted = form && form_predicts_existence(*form, s, q);
    if (form && predicted) {
        for (std::size_t i = 0; i < opt.samples; ++i) {
            auto nf = random_normal_form(s, q, *form, rng);
            if (!nf) continue;
            ++rep.normal_form_samples;
            const OpMap m = build_normal_form(s, q, *nf);
            const bool flavor_ok = flavor.kind == MapFlavor::Kind::Additive ||
                                   m.is_semilinear(flavor.kind == MapFlavor::Kind::Semilinear ? flavor.sigma : 0);
            if (!flavor_ok) continue;
            if (!range_preserving_enum(m, opt.budget)) ++rep.normal_form_failures;
        }
    }

    if (!form) {
        rep.verdict = "out of theorem range";
    } else if (!predicted) {
        // Without enumeration, absence needs a member of rank > q: no map into Mat_{n,q} can keep its range.
        bool absent = rep.preserving_count == 0 && (rep.enumerated || has_rank_above(s, q, rng, opt.samples));
        rep.verdict = absent ? "no preserver exists" : rep.preserving_count > 0 ? "mismatch" : "inconclusive";
    } else {
        const bool existence_ok = !rep.enumerated || rep.preserving_count > 0;
        rep.verdict = existence_ok && rep.fit_failures == 0 && rep.normal_form_failures == 0 ? "matches" : "mismatch";
    }
    return rep;
}

}  // namespace

Vec flatten_columns(const Mat& m) {
    Vec v(m.field(), m.rows() * m.cols(), 1);
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i) v[j * m.rows() + i] = m(i, j);
    return v;
}

Mat unflatten_columns(const Vec& v, std::size_t rows, std::size_t cols) {
    if (v.size() != rows * cols) throw InvalidArgument("flattened length mismatch");
    Mat m(v.field(), rows, cols);
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) m(i, j) = v[j * rows + i];
    return m;
}

OpMap::OpMap(AdditiveMap map, std::size_t rows, std::size_t cols)
    : map_(std::move(map)), rows_(rows), cols_(cols) {
    if (map_.target_rows() != rows * cols) throw InvalidArgument("operator map target size mismatch");
}

OpMap OpMap::from_columns(const Space& domain, std::size_t rows, const std::vector<AdditiveMap>& columns) {
    std::vector<std::uint8_t> a;
    for (const auto& c : columns) {
        if (c.domain() != domain || c.target_rows() != rows) throw InvalidArgument("column map shape mismatch");
        a.insert(a.end(), c.matrix().begin(), c.matrix().end());
    }
    return OpMap(AdditiveMap(domain, rows * columns.size(), std::move(a)), rows, columns.size());
}

Mat OpMap::operator()(const Mat& m) const { return unflatten_columns(map_(m), rows_, cols_); }

Mat OpMap::evaluate(const std::vector<std::uint8_t>& c) const {
    return unflatten_columns(map_.evaluate(c), rows_, cols_);
}

AdditiveMap OpMap::column(std::size_t j) const {
    if (j >= cols_) throw InvalidArgument("column index out of range");
    const std::size_t width = domain().field().k() * rows_ * domain().gdim();
    const auto& a = map_.matrix();
    std::vector<std::uint8_t> block(a.begin() + static_cast<std::ptrdiff_t>(j * width),
                                    a.begin() + static_cast<std::ptrdiff_t>((j + 1) * width));
    return AdditiveMap(domain(), rows_, std::move(block));
}

RestrictingSpace range_restricting_space(const Space& s, std::size_t q, MapFlavor flavor, std::uint64_t budget) {
    RestrictingSpace rs{rc_space(s, flavor, budget), q, {}};
    const AdditiveMap zero = AdditiveMap::zero(s, s.rows());
    for (std::size_t j = 0; j < q; ++j)
        for (const auto& b : rs.rc.basis()) {
            std::vector<AdditiveMap> cols(q, zero);
            cols[j] = b;
            rs.basis.push_back(OpMap::from_columns(s, s.rows(), cols));
        }
    return rs;
}

OpMap transpose_dual(const OpMap& fm) {
    const Space st = transpose_space(fm.domain());
    return OpMap::from_function(st, fm.cols(), fm.rows(), [&](const Mat& n) { return fm(n.transpose()).transpose(); });
}

bool preserving_filter(const OpMap& fm, PreserveMode mode, std::uint64_t budget, std::uint64_t direct_sample) {
    if (mode == PreserveMode::Range) return range_preserving_enum(fm, budget);
    const Space& s = fm.domain();
    if (fm.cols() != s.cols()) return false;
    const bool verdict = range_preserving_enum(transpose_dual(fm), budget);
    if (verdict) {
        std::uint64_t seen = 0;
        s.for_each_element(
            [&](const std::vector<Elem>& flat, const std::vector<std::uint8_t>& c) {
                const Mat m(s.field(), s.rows(), s.cols(), flat);
                const Mat v = fm.evaluate(c);
                const std::size_t rm = rank(m);
                if (rank(v) != rm || rank(vstack(m, v)) != rm)
                    throw InvariantViolation("kernel preservation disagrees with its transpose dual");
                return ++seen < direct_sample;
            },
            false);
    }
    return verdict;
}

OpMap standard_preserver(const Space& s, std::size_t q, const Mat& Q, std::uint64_t budget) {
    if (q < s.cols()) throw InvalidArgument("standard preservers need q >= p");
    if (Q.rows() != q || Q.cols() != q || !is_invertible(Q)) throw InvalidArgument("Q must be invertible of size q");
    NormalForm nf{"standard", Q, {}, {}, 0};
    OpMap m = build_normal_form(s, q, nf);
    if (!range_preserving_enum(m, budget)) throw InvariantViolation("standard preserver failed range preservation");
    return m;
}

OpMap nonstandard_preserver(const Space& s, std::size_t m, std::size_t q, const std::vector<AdditiveMap>& maps,
                            std::uint64_t budget) {
    const std::size_t r = maps.size();
    if (q < 1 || r < q) throw InvalidArgument("need r >= q >= 1");
    const std::size_t n = s.rows(), p = s.cols();
    for (const auto& fi : maps) {
        if (fi.domain() != s || fi.target_rows() != n) throw InvalidArgument("map is not defined on the space");
        if (!is_range_compatible(fi, budget)) throw InvalidArgument("map is not range-compatible");
    }
    const Space t = vee(s, full_space(s.field(), m, q));
    OpMap g = OpMap::from_function(t, n + m, p + r, [&](const Mat& x) {
        Mat out(s.field(), n + m, p + r);
        out.set_block(0, 0, x);
        const Mat a = x.block(0, 0, n, p);
        for (std::size_t i = 0; i < r; ++i) {
            const Vec v = maps[i](a);
            for (std::size_t row = 0; row < n; ++row)
                out(row, p + i) = s.field().add(out(row, p + i), v[row]);
        }
        return out;
    });
    if (!range_preserving_enum(g, budget)) throw InvariantViolation("constructed map is not range-preserving");
    bool all_local = true;
    for (const auto& fi : maps) all_local = all_local && is_local(s, fi).has_value();
    if (standard_form(g).has_value() != all_local)
        throw InvariantViolation("standardness of the constructed map disagrees with locality of its parts");
    return g;
}

std::optional<Mat> standard_form(const OpMap& fm, std::uint64_t budget) {
    const std::size_t p = fm.domain().cols(), q = fm.cols();
    if (q < p) return std::nullopt;
    auto pm = fit_right_factor(fm, p, budget);
    if (!pm) return std::nullopt;
    return complete_rows(*pm);
}

OpMap build_normal_form(const Space& s, std::size_t q, const NormalForm& nf) {
    const Field f = s.field();
    const std::size_t n = s.rows(), p = s.cols();
    if (nf.Q.rows() != q || nf.Q.cols() != q) throw InvalidArgument("Q has the wrong size");
    if (nf.form == "standard") {
        if (q < p) throw InvalidArgument("standard form needs q >= p");
        return OpMap::from_function(s, n, q, [&](const Mat& m) {
            Mat x(f, n, q);
            x.set_block(0, 0, m);
            return x * nf.Q;
        });
    }
    if (nf.form == "zero-last-column") {
        if (p < 1 || q + 1 < p) throw InvalidArgument("zero-last-column form needs q >= p - 1");
        return OpMap::from_function(s, n, q, [&](const Mat& m) {
            Mat x(f, n, q);
            x.set_block(0, 0, m.block(0, 0, n, p - 1));
            return x * nf.Q;
        });
    }
    if (nf.form == "type1") {
        if (p < 1 || q < p) throw InvalidArgument("type-1 form needs q >= p");
        if (nf.R.size() != q - p + 1 || nf.Rprime.size() != p - 1) throw InvalidArgument("type-1 form component count");
        return OpMap::from_function(s, n, q, [&](const Mat& m) {
            Mat x(f, n, q);
            const Elem a = m(0, 0);
            for (std::size_t c = 0; c < q - p + 1; ++c) x(0, c) = nf.R[c](a);
            for (std::size_t c = 0; c + 1 < p; ++c) x(0, q - p + 1 + c) = f.add(m(0, c + 1), nf.Rprime[c](a));
            for (std::size_t i = 1; i < n; ++i)
                for (std::size_t c = 0; c + 1 < p; ++c) x(i, q - p + 1 + c) = m(i, c + 1);
            return x * nf.Q;
        });
    }
    if (nf.form == "symmetric") {
        if (q < p || nf.r < 1 || nf.r > std::min(n, p)) throw InvalidArgument("symmetric form shape");
        if (nf.R.size() != q - nf.r) throw InvalidArgument("symmetric form component count");
        return OpMap::from_function(s, n, q, [&](const Mat& m) {
            Mat x(f, n, q);
            x.set_block(0, 0, m);
            for (std::size_t i = 0; i < nf.r; ++i)
                for (std::size_t c = 0; c < q - nf.r; ++c) x(i, nf.r + c) = f.add(x(i, nf.r + c), nf.R[c](m(i, i)));
            return x * nf.Q;
        });
    }
    throw InvalidArgument("unknown normal form '" + nf.form + "'");
}

std::optional<NormalForm> fit_normal_form(const OpMap& fm, const std::string& form, std::uint64_t budget) {
    const Space& s = fm.domain();
    const std::size_t p = s.cols(), q = fm.cols();
    std::optional<NormalForm> out;
    if (form == "standard") {
        if (auto Q = standard_form(fm, budget)) out = NormalForm{"standard", *Q, {}, {}, 0};
    } else if (form == "zero-last-column") {
        if (p >= 1 && q + 1 >= p)
            if (auto pm = fit_right_factor(fm, p - 1, budget))
                out = NormalForm{"zero-last-column", complete_rows(*pm), {}, {}, 0};
    } else if (form == "type1") {
        out = fit_type1(fm, budget);
    } else if (form == "symmetric") {
        out = fit_symmetric(fm, budget);
    } else {
        throw InvalidArgument("unknown normal form '" + form + "'");
    }
    if (out && build_normal_form(s, q, *out) != fm) throw InvariantViolation("normal form does not re-evaluate to the map");
    return out;
}

std::optional<std::string> applicable_form(const Space& s, MapFlavor flavor) {
    if (s.scalars() != Scalars::Field) return std::nullopt;
    const Field f = s.field();
    const std::size_t n = s.rows(), p = s.cols();
    const long codim = static_cast<long>(s.codim());
    const long bound23 = 2 * static_cast<long>(n) - 3;
    const bool linear = flavor.kind == MapFlavor::Kind::Linear;
    const bool kernel_free = common_kernel(s).empty();
    const bool within_dn = n >= 2 && codim <= static_cast<long>(d_n(f, n)) && (f.q() > 2 || n >= 2);
    if (linear && within_dn && kernel_free && p >= 1) return std::string("standard");
    if (p >= 1 && codim <= bound23) {
        bool last_zero = true;
        for (const auto& b : s.basis())
            for (std::size_t i = 0; i < n; ++i) last_zero = last_zero && b(i, p - 1) == 0;
        if (last_zero) return std::string("zero-last-column");
    }
    if (f.p() == 2)
        for (std::size_t r = 2; r <= std::min(n, p); ++r)
            if (s == symmetric_vee(f, r, n, p)) return std::string("symmetric");
    if (n >= 1 && p >= 1 && codim <= bound23 && s.is_subspace_of(type1_canonical(f, n, p)) &&
        !s.is_subspace_of(zero_column_space(f, n, p)))
        return std::string("type1");
    if (!linear && within_dn && kernel_free && p >= 1 && detect_type(s).verdict == SpaceType::None)
        return std::string("standard");
    return std::nullopt;
}

bool form_predicts_existence(const std::string& form, const Space& s, std::size_t q) {
    const std::size_t p = s.cols();
    if (form == "zero-last-column") return q + 1 >= p;
    return q >= p;
}

PreserverReport classify_preservers(const Space& s, std::size_t q, MapFlavor flavor, const PreserverOptions& options) {
    if (flavor.kind != MapFlavor::Kind::Semilinear) return classify_one(s, q, flavor, options);
    PreserverReport rep = classify_one(s, q, MapFlavor::linear(), options);
    rep.flavor = flavor;
    const Field f = s.field();
    for (unsigned sigma = 0; sigma < f.k(); ++sigma) {
        const MapFlavor fl = MapFlavor::semilinear(sigma);
        const RestrictingSpace rs = range_restricting_space(s, q, fl, options.budget);
        SemilinearSummary sum;
        sum.sigma = sigma;
        sum.restricting_kdim = rs.kdim();
        std::uint64_t total = 1;
        bool small = true;
        for (std::size_t i = 0; i < rs.kdim(); ++i) {
            total *= f.p();
            if (total > options.budget) {
                small = false;
                break;
            }
        }
        small = small && total * s.element_count() <= (std::uint64_t{1} << 27);
        sum.enumerated = small;
        std::mt19937_64 rng(options.seed + sigma);
        std::vector<std::uint8_t> coeffs(rs.kdim(), 0);
        const std::uint64_t count = small ? total : options.samples;
        for (std::uint64_t idx = 0; idx < count; ++idx) {
            std::uint64_t rest = idx;
            for (auto& c : coeffs) {
                if (small) {
                    c = static_cast<std::uint8_t>(rest % f.p());
                    rest /= f.p();
                } else {
                    c = static_cast<std::uint8_t>(rng() % f.p());
                }
            }
            const OpMap m = combine_ops(rs, coeffs);
            if (!range_preserving_enum(m, options.budget)) continue;
            ++sum.preserving_count;
            if (!m.is_linear()) sum.all_linear = false;
        }
        rep.semilinear.push_back(sum);
    }
    return rep;
}

}  // namespace rcmap
