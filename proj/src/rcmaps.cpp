#include "rcmap/rcmaps.hpp"

#include <algorithm>

#include "rcmap/echelon.hpp"

namespace rcmap {

namespace {

/// Basis of {y : y^T M = 0} for the n x p row-major matrix m.
void left_null(Field f, std::size_t n, std::size_t p, const Elem* m, std::vector<Elem>& work,
               std::vector<std::vector<Elem>>& out) {
    const unsigned q = f.q();
    const Elem* add = f.add_table();
    const Elem* mul = f.mul_table();
    const Elem* neg = f.neg_table();
    // work = M^T, p rows by n cols.
    work.resize(p * n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < p; ++c) work[c * n + r] = m[r * p + c];
    std::vector<std::size_t> piv;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < p; ++col) {
        std::size_t sel = row;
        while (sel < p && work[sel * n + col] == 0) ++sel;
        if (sel == p) continue;
        if (sel != row)
            for (std::size_t j = 0; j < n; ++j) std::swap(work[sel * n + j], work[row * n + j]);
        const Elem s = f.inv(work[row * n + col]);
        for (std::size_t j = col; j < n; ++j) work[row * n + j] = mul[work[row * n + j] * q + s];
        for (std::size_t i = 0; i < p; ++i) {
            if (i == row) continue;
            const Elem v = work[i * n + col];
            if (v == 0) continue;
            const Elem nv = neg[v];
            for (std::size_t j = col; j < n; ++j)
                work[i * n + j] = add[work[i * n + j] * q + mul[nv * q + work[row * n + j]]];
        }
        piv.push_back(col);
        ++row;
    }
    out.clear();
    std::size_t pi = 0;
    for (std::size_t fc = 0; fc < n; ++fc) {
        if (pi < piv.size() && piv[pi] == fc) {
            ++pi;
            continue;
        }
        std::vector<Elem> y(n, 0);
        y[fc] = 1;
        for (std::size_t i = 0; i < piv.size(); ++i) y[piv[i]] = neg[work[i * n + fc]];
        out.push_back(std::move(y));
    }
}

bool first_nonzero_is_one(const std::vector<std::uint8_t>& c, unsigned group) {
    for (std::size_t i = 0; i < c.size(); i += group) {
        bool nz = false;
        for (unsigned j = 0; j < group; ++j) nz = nz || c[i + j] != 0;
        if (!nz) continue;
        if (c[i] != 1) return false;
        for (unsigned j = 1; j < group; ++j)
            if (c[i + j] != 0) return false;
        return true;
    }
    return false;
}

Mat prime_mat(Field pf, std::size_t rows, std::size_t cols, const std::vector<std::uint8_t>& a) {
    return Mat(pf, rows, cols, std::vector<Elem>(a.begin(), a.end()));
}

AdditiveMap build_type1(const Space& s, const Vec& x, const AdditiveEndo& alpha) {
    const Space sx = evaluate_span(s, x);
    if (sx.dim() != 1) throw InvalidArgument("type-1 map needs dim Sx = 1");
    const Vec& u = sx.basis()[0];
    std::size_t i0 = 0;
    while (u[i0] == 0) ++i0;
    return AdditiveMap::from_function(s, s.rows(), [&](const Mat& m) {
        const Vec v = m * x;
        return u.scaled(alpha(v[i0]));
    });
}

AdditiveMap build_diag(const Space& s, const AdditiveEndo& alpha, std::size_t r, const Mat& pl, const Mat& pr) {
    const Mat pinv = inverse_or_throw(pl, "P");
    const Mat qinv = inverse_or_throw(pr, "Q");
    const Field f = s.field();
    return AdditiveMap::from_function(s, s.rows(), [&](const Mat& m) {
        const Mat nm = pl * m * qinv;
        Vec d(f, s.rows(), 1);
        for (std::size_t i = 0; i < r; ++i) d[i] = alpha(nm(i, i));
        return pinv * d;
    });
}

}  // namespace

MapFlavor MapFlavor::parse(const std::string& text) {
    if (text == "linear") return linear();
    if (text == "additive") return additive();
    const std::string prefix = "semilinear:";
    if (text.rfind(prefix, 0) == 0) {
        const std::string rest = text.substr(prefix.size());
        if (rest.empty() || !std::all_of(rest.begin(), rest.end(), [](char c) { return c >= '0' && c <= '9'; }))
            throw InvalidArgument("bad semilinear exponent in flavor '" + text + "'");
        return semilinear(static_cast<unsigned>(std::stoul(rest)));
    }
    throw InvalidArgument("unknown map flavor '" + text + "'");
}

std::string MapFlavor::name() const {
    switch (kind) {
        case Kind::Linear: return "linear";
        case Kind::Additive: return "additive";
        case Kind::Semilinear: return "semilinear:" + std::to_string(sigma);
    }
    return "?";
}

std::vector<AdditiveMap> canonical_span(const Space& domain, std::size_t target_rows,
                                        const std::vector<AdditiveMap>& maps) {
    const Field f = domain.field();
    const std::size_t len = f.k() * target_rows * domain.gdim();
    std::vector<std::vector<std::uint8_t>> rows;
    rows.reserve(maps.size());
    for (const auto& m : maps) {
        if (m.domain() != domain || m.target_rows() != target_rows) throw InvalidArgument("map shape mismatch");
        rows.push_back(m.matrix());
    }
    std::vector<AdditiveMap> out;
    for (auto& r : prime_rref_basis(f.p(), len, rows)) out.emplace_back(domain, target_rows, std::move(r));
    return out;
}

RCMapSpace::RCMapSpace(Space domain, std::size_t target_rows, MapFlavor flavor, std::vector<AdditiveMap> basis)
    : domain_(std::move(domain)), m_(target_rows), flavor_(flavor) {
    basis_ = canonical_span(domain_, m_, basis);
}

std::optional<std::size_t> RCMapSpace::Kdim() const {
    if (flavor_.kind == MapFlavor::Kind::Additive) return std::nullopt;
    return kdim() / domain_.field().k();
}

bool RCMapSpace::contains(const AdditiveMap& f) const {
    if (f.domain() != domain_ || f.target_rows() != m_) return false;
    PrimeEchelon e(domain_.field().p(), f.matrix().size());
    for (const auto& b : basis_) e.add_row(b.matrix());
    return e.contains(f.matrix());
}

bool RCMapSpace::same_span(const RCMapSpace& o) const {
    return domain_ == o.domain_ && m_ == o.m_ && basis_ == o.basis_;
}

RCMapSpace rc_space(const Space& s, MapFlavor flavor, std::uint64_t budget) {
    const Field f = s.field();
    const unsigned k = f.k();
    const unsigned p = f.p();
    const bool additive = flavor.kind == MapFlavor::Kind::Additive;
    if (!additive && s.scalars() != Scalars::Field)
        throw InvalidArgument("linear and semilinear maps need a K-linear domain");
    if (flavor.kind == MapFlavor::Kind::Semilinear && flavor.sigma >= k)
        throw InvalidArgument("semilinear exponent must be below the extension degree");
    s.require_enumerable(budget, "rc_space");

    const std::size_t n = s.rows();
    const std::size_t g = s.gdim();
    const std::size_t nunk = k * n * g;
    PrimeEchelon ech(p, nunk);
    std::vector<std::uint8_t> row(nunk);

    if (!additive) {
        const Elem st = f.frobenius(f.generator(), flavor.sigma);
        const auto mst = f.mul_matrix(st);
        for (std::size_t b = 0; b < g; ++b) {
            const auto c = s.gcoords(s.gbasis()[b].scaled(f.generator()));
            if (!c) throw InvariantViolation("K-linear domain is not closed under scalars");
            for (std::size_t r = 0; r < n; ++r)
                for (unsigned l = 0; l < k; ++l) {
                    std::fill(row.begin(), row.end(), 0);
                    for (std::size_t b2 = 0; b2 < g; ++b2) row[(r * k + l) * g + b2] = (*c)[b2];
                    for (unsigned j = 0; j < k; ++j) {
                        auto& cell = row[(r * k + j) * g + b];
                        cell = static_cast<std::uint8_t>((cell + p - mst[l * k + j]) % p);
                    }
                    ech.add_row(row);
                }
        }
    }

    const std::size_t local_gdim = k * (s.cols() - common_kernel(s).size());
    const std::size_t target = flavor.kind == MapFlavor::Kind::Semilinear ? 0 : local_gdim;
    const unsigned group = (!additive && s.scalars() == Scalars::Field) ? k : 1;

    std::vector<Elem> work;
    std::vector<std::vector<Elem>> ys;
    if (ech.nullity() > target) {
        s.for_each_element(
            [&](const std::vector<Elem>& m, const std::vector<std::uint8_t>& c) {
                if (!first_nonzero_is_one(c, group)) return true;
                left_null(f, n, s.cols(), m.data(), work, ys);
                for (const auto& y : ys)
                    for (unsigned l = 0; l < k; ++l) {
                        std::fill(row.begin(), row.end(), 0);
                        bool any = false;
                        for (std::size_t r = 0; r < n; ++r) {
                            if (y[r] == 0) continue;
                            const auto my = f.mul_matrix(y[r]);
                            for (unsigned j = 0; j < k; ++j) {
                                const unsigned coef = my[l * k + j];
                                if (coef == 0) continue;
                                std::uint8_t* dst = &row[(r * k + j) * g];
                                for (std::size_t b = 0; b < g; ++b)
                                    if (c[b]) dst[b] = static_cast<std::uint8_t>((coef * c[b]) % p);
                                any = true;
                            }
                        }
                        if (any) ech.add_row(row);
                    }
                return ech.nullity() > target;
            },
            true);
    }
    if (ech.nullity() < target)
        throw InvariantViolation("range-compatible solution space is smaller than the local space");

    std::vector<AdditiveMap> basis;
    for (auto& v : ech.nullspace()) basis.emplace_back(s, n, std::move(v));
    return RCMapSpace(s, n, flavor, std::move(basis));
}

LocalSpace local_space(const Space& s) {
    const Field f = s.field();
    std::vector<AdditiveMap> gens;
    for (std::size_t l = 0; l < s.cols(); ++l) {
        Elem tj = 1;
        for (unsigned j = 0; j < f.k(); ++j) {
            Vec x(f, s.cols(), 1);
            x[l] = tj;
            gens.push_back(AdditiveMap::evaluation(s, x));
            tj = f.mul(tj, f.generator());
        }
    }
    return {RCMapSpace(s, s.rows(), MapFlavor::linear(), gens), common_kernel(s)};
}

std::optional<LocalWitness> is_local(const Space& s, const AdditiveMap& fm) {
    if (fm.domain() != s) throw InvalidArgument("map is not defined on this space");
    if (fm.target_rows() != s.rows()) return std::nullopt;
    const Field f = s.field();
    const std::size_t n = s.rows();
    const std::size_t g = s.gdim();
    Mat a(f, g * n, s.cols());
    Mat rhs(f, g * n, 1);
    for (std::size_t b = 0; b < g; ++b) {
        a.set_block(b * n, 0, s.gbasis()[b]);
        rhs.set_block(b * n, 0, fm.on_basis(b));
    }
    auto sol = solve(a, rhs);
    if (!sol.particular) return std::nullopt;
    Vec x = *sol.particular;
    if (!sol.nullspace.empty()) {
        const auto rr = rref(rows_of(f, s.cols(), sol.nullspace));
        for (std::size_t i = 0; i < rr.rank; ++i) {
            const Elem v = x[rr.pivots[i]];
            if (v == 0) continue;
            for (std::size_t j = 0; j < s.cols(); ++j) x[j] = f.sub(x[j], f.mul(v, rr.R(i, j)));
        }
    }
    return LocalWitness{x, sol.nullspace};
}

bool is_range_compatible(const AdditiveMap& fm, std::uint64_t budget) {
    const Space& s = fm.domain();
    if (fm.target_rows() != s.rows()) return false;
    s.require_enumerable(budget, "range-compatibility check");
    const Field f = s.field();
    const std::size_t n = s.rows();
    bool ok = true;
    std::vector<Elem> work;
    std::vector<std::vector<Elem>> ys;
    s.for_each_element(
        [&](const std::vector<Elem>& m, const std::vector<std::uint8_t>& c) {
            const Vec v = fm.evaluate(c);
            left_null(f, n, s.cols(), m.data(), work, ys);
            for (const auto& y : ys) {
                Elem acc = 0;
                for (std::size_t r = 0; r < n; ++r) acc = f.add(acc, f.mul(y[r], v[r]));
                if (acc != 0) {
                    ok = false;
                    return false;
                }
            }
            return true;
        },
        false);
    return ok;
}

AdditiveMap exceptional_map(const Type1Kind& kind, const Space& s, std::uint64_t budget) {
    if (s.scalars() != Scalars::Field) throw InvalidArgument("type-1 maps need a K-linear space");
    if (kind.x.rows() != s.cols() || kind.x.cols() != 1) throw InvalidArgument("type-1 vector length mismatch");
    if (kind.alpha.field() != s.field()) throw InvalidArgument("endomorphism field mismatch");
    AdditiveMap m = build_type1(s, kind.x, kind.alpha);
    if (!is_range_compatible(m, budget)) throw InvariantViolation("type-1 map failed range-compatibility");
    return m;
}

AdditiveMap exceptional_map(const DiagKind& kind, const Space& s, std::uint64_t budget) {
    const Field f = s.field();
    if (f.p() != 2) throw InvalidArgument("diagonal root-linear maps need characteristic 2");
    if (kind.r < 1 || kind.r > s.rows() || kind.r > s.cols()) throw InvalidArgument("diagonal size out of range");
    if (kind.alpha.field() != f) throw InvalidArgument("endomorphism field mismatch");
    if (!kind.alpha.is_root_linear()) throw InvalidArgument("alpha is not root-linear");
    for (const auto& b : s.gbasis())
        for (std::size_t i = 0; i < kind.r; ++i)
            for (std::size_t j = i + 1; j < kind.r; ++j)
                if (b(i, j) != b(j, i)) throw InvalidArgument("top-left block of the space is not symmetric");
    AdditiveMap m = build_diag(s, kind.alpha, kind.r, Mat::identity(f, s.rows()), Mat::identity(f, s.cols()));
    if (!is_range_compatible(m, budget)) throw InvariantViolation("diagonal map failed range-compatibility");
    return m;
}

std::string type_name(SpaceType t) {
    switch (t) {
        case SpaceType::None: return "none";
        case SpaceType::Type1: return "type1";
        case SpaceType::Type2: return "type2";
        case SpaceType::Type3: return "type3";
        case SpaceType::Inconclusive: return "inconclusive";
    }
    return "?";
}

Decomposition decompose_rc(const Space& s, const AdditiveMap& fm, const TypeCertificate& cert) {
    if (fm.domain() != s || fm.target_rows() != s.rows()) throw InvalidArgument("map is not defined on this space");
    if (s.scalars() != Scalars::Field) throw InvalidArgument("decomposition needs a K-linear space");
    const Field f = s.field();
    const unsigned k = f.k();
    const std::size_t pcols = s.cols();

    std::vector<AdditiveMap> gens;
    for (std::size_t l = 0; l < pcols; ++l) {
        Elem tj = 1;
        for (unsigned j = 0; j < k; ++j) {
            Vec x(f, pcols, 1);
            x[l] = tj;
            gens.push_back(AdditiveMap::evaluation(s, x));
            tj = f.mul(tj, f.generator());
        }
    }
    const std::size_t n_local = gens.size();

    const auto additive_basis = endo_space(f, EndoKind::Additive);
    for (const auto& x : cert.type1_witnesses)
        for (const auto& e : additive_basis) gens.push_back(build_type1(s, x, e));
    const std::size_t n_type1 = gens.size() - n_local;

    std::size_t r = 0;
    std::vector<AdditiveEndo> root_basis;
    if ((cert.type == SpaceType::Type2 || cert.type == SpaceType::Type3) && cert.P && cert.Q) {
        if (f.p() != 2) throw InvalidArgument("type-2/3 certificates need characteristic 2");
        r = cert.type == SpaceType::Type2 ? 2 : 3;
        root_basis = endo_space(f, EndoKind::RootLinear);
        for (const auto& a : root_basis) gens.push_back(build_diag(s, a, r, *cert.P, *cert.Q));
    }

    const Field pf = f.prime_field();
    const std::size_t len = fm.matrix().size();
    Mat sys(pf, len, gens.size());
    for (std::size_t c = 0; c < gens.size(); ++c)
        for (std::size_t i = 0; i < len; ++i) sys(i, c) = gens[c].matrix()[i];
    const auto sol = solve(sys, prime_mat(pf, len, 1, fm.matrix()));
    if (!sol.particular) {
        PrimeEchelon e(f.p(), len);
        for (const auto& gm : gens) e.add_row(gm.matrix());
        throw DecompositionFailure("map is not a sum of local and exceptional maps",
                                   AdditiveMap(s, s.rows(), e.reduce(fm.matrix())));
    }
    const Mat& lam = *sol.particular;

    Decomposition out{Vec(f, pcols, 1), {}};
    for (std::size_t l = 0; l < pcols; ++l) {
        Elem tj = 1;
        for (unsigned j = 0; j < k; ++j) {
            out.x[l] = f.add(out.x[l], f.mul(lam[l * k + j], tj));
            tj = f.mul(tj, f.generator());
        }
    }
    AdditiveMap recon = AdditiveMap::evaluation(s, out.x);
    const std::size_t ne = additive_basis.size();
    for (std::size_t w = 0; w < cert.type1_witnesses.size(); ++w) {
        std::vector<unsigned> coeffs(ne);
        for (std::size_t e = 0; e < ne; ++e) coeffs[e] = lam[n_local + w * ne + e];
        AdditiveEndo alpha = combine(f, additive_basis, coeffs);
        if (alpha.is_zero()) continue;
        AdditiveMap m = build_type1(s, cert.type1_witnesses[w], alpha);
        recon = recon + m;
        out.exceptional.push_back({"type1", cert.type1_witnesses[w], 0, alpha, m});
    }
    if (!root_basis.empty()) {
        std::vector<unsigned> coeffs(root_basis.size());
        for (std::size_t e = 0; e < root_basis.size(); ++e) coeffs[e] = lam[n_local + n_type1 + e];
        AdditiveEndo alpha = combine(f, root_basis, coeffs);
        if (!alpha.is_zero()) {
            AdditiveMap m = build_diag(s, alpha, r, *cert.P, *cert.Q);
            recon = recon + m;
            out.exceptional.push_back({"diag", std::nullopt, r, alpha, m});
        }
    }
    if (recon != fm) throw InvariantViolation("decomposition does not reconstruct the map");
    return out;
}

AdditiveMap project_map(const Space& s, const AdditiveMap& fm, const Vec& y) {
    if (fm.domain() != s || fm.target_rows() != s.rows()) throw InvalidArgument("map is not defined on this space");
    const Projection pr = project_mod(s, y);
    const Field f = s.field();
    const Field pf = f.prime_field();
    const unsigned k = f.k();
    const std::size_t g = s.gdim();
    const std::size_t g2 = pr.space.gdim();
    const std::size_t out_rows = k * (s.rows() - 1);

    // Phi^T: row b holds the coordinates of pi G_b in S mod y.
    Mat phit(pf, g, g2);
    for (std::size_t b = 0; b < g; ++b) {
        const auto c = pr.space.gcoords(pr.pi * s.gbasis()[b]);
        if (!c) throw InvariantViolation("projected basis element outside the projected space");
        for (std::size_t j = 0; j < g2; ++j) phit(b, j) = (*c)[j];
    }
    const Mat pid = prime_mat(pf, out_rows, k * s.rows(), digit_matrix(pr.pi));
    const Mat bt = (pid * prime_mat(pf, k * s.rows(), g, fm.matrix())).transpose();
    const auto sol = solve(phit, bt);
    if (!sol.particular) throw InvalidArgument("map is not well defined modulo y");
    const Mat a2 = sol.particular->transpose();
    return AdditiveMap(pr.space, s.rows() - 1, std::vector<std::uint8_t>(a2.entries().begin(), a2.entries().end()));
}

AdditiveMap join_maps(const Space& a, const Space& b, const AdditiveMap& fa, const AdditiveMap& gb) {
    if (fa.domain() != a || gb.domain() != b) throw InvalidArgument("maps are not defined on the given spaces");
    if (fa.target_rows() != gb.target_rows()) throw InvalidArgument("maps have different targets");
    const Space c = coprod(a, b);
    const std::size_t n = a.rows();
    return AdditiveMap::from_function(c, fa.target_rows(), [&](const Mat& m) {
        return fa(m.block(0, 0, n, a.cols())) + gb(m.block(0, a.cols(), n, b.cols()));
    });
}

std::pair<AdditiveMap, AdditiveMap> split_map(const Space& a, const Space& b, const AdditiveMap& fm) {
    const Space c = coprod(a, b);
    if (fm.domain() != c) throw InvalidArgument("map is not defined on the coproduct");
    const Field f = a.field();
    const std::size_t n = a.rows();
    auto left = AdditiveMap::from_function(a, fm.target_rows(), [&](const Mat& x) {
        Mat m(f, n, a.cols() + b.cols());
        m.set_block(0, 0, x);
        return fm(m);
    });
    auto right = AdditiveMap::from_function(b, fm.target_rows(), [&](const Mat& x) {
        Mat m(f, n, a.cols() + b.cols());
        m.set_block(0, a.cols(), x);
        return fm(m);
    });
    return {left, right};
}

}  // namespace rcmap
