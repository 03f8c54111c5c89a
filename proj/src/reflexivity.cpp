#include "rcmap/reflexivity.hpp"

#include "rcmap/rcmaps.hpp"

namespace rcmap {

Space reflexive_closure(const Space& s, std::uint64_t budget, bool projective_only) {
    if (s.scalars() != Scalars::Field) throw InvalidArgument("reflexive closure needs a K-linear space");
    const Field f = s.field();
    const std::size_t n = s.rows(), p = s.cols(), d = s.dim();
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < p; ++i) {
        total *= f.q();
        if (total > budget) throw BudgetExceeded("reflexive closure over K^p", total, budget);
    }
    const auto xs = projective_only ? projective_points(f, p) : all_vectors(f, p);
    std::vector<std::vector<Elem>> rows;
    for (const auto& x : xs) {
        if (x.is_zero()) continue;
        Mat sx(f, n, d);
        for (std::size_t i = 0; i < d; ++i) sx.set_block(0, i, s.basis()[i] * x);
        for (const auto& y : left_nullspace(sx)) {
            std::vector<Elem> row(n * p, 0);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < p; ++c) row[r * p + c] = f.mul(y[r], x[c]);
            rows.push_back(std::move(row));
        }
    }
    Mat sys(f, rows.size(), n * p);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < n * p; ++j) sys(i, j) = rows[i][j];
    std::vector<Mat> gens;
    for (const auto& v : nullspace(sys)) gens.emplace_back(f, n, p, v.entries());
    Space r = Space::make(f, n, p, gens);
    if (!s.is_subspace_of(r)) throw InvariantViolation("reflexive closure does not contain the space");
    return r;
}

ReducedReport is_reduced(const Space& s) {
    const Field f = s.field();
    ReducedReport rep;
    const auto ker = common_kernel(s);
    if (!ker.empty()) rep.kernel_vector = normalize_projective(ker.front());
    Mat wide(f, s.rows(), s.gdim() * s.cols());
    for (std::size_t i = 0; i < s.gdim(); ++i) wide.set_block(0, i * s.cols(), s.gbasis()[i]);
    const auto forms = left_nullspace(wide);
    if (!forms.empty()) rep.range_form = normalize_projective(forms.front());
    rep.reduced = !rep.kernel_vector && !rep.range_form;
    return rep;
}

bool reflexivity_bound_ok(Field f, std::size_t n, std::size_t p, std::size_t dim) {
    const long c = f.q() > 2 ? 3 : 4;
    return static_cast<long>(p) >= static_cast<long>(dim * n) - 2 * static_cast<long>(n) + c;
}

ReflexReport reflexivity_report(const Space& s, std::uint64_t budget) {
    ReflexReport rep;
    rep.dim = s.dim();
    const Space r = reflexive_closure(s, budget);
    rep.closure_dim = r.dim();
    rep.is_reflexive = r == s;
    rep.reduced = is_reduced(s);
    rep.hat_rc_dim = *rc_space(hat_space(s), MapFlavor::linear(), budget).Kdim();
    rep.bound_ok = reflexivity_bound_ok(s.field(), s.rows(), s.cols(), s.dim());
    if (rep.hat_rc_dim != rep.closure_dim)
        throw InvariantViolation("dim R(S) = " + std::to_string(rep.closure_dim) +
                                 " differs from the range-compatible maps on the hat space (" +
                                 std::to_string(rep.hat_rc_dim) + ")");
    return rep;
}

}  // namespace rcmap
