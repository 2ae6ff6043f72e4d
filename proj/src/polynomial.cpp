#include "rdmass/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rdmass/errors.hpp"

namespace rdmass {

namespace {

double int_pow(double x, int e) {
    double r = x;
    for (int k = 1; k < e; ++k) r *= x;
    return r;
}

int total_degree(const Term& t) {
    int d = 0;
    for (int e : t.exponents) d += e;
    return d;
}

} // namespace

void canonicalize_terms(std::vector<Term>& terms) {
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return a.exponents < b.exponents; });
    std::vector<Term> merged;
    merged.reserve(terms.size());
    for (const Term& t : terms) {
        if (!merged.empty() && merged.back().exponents == t.exponents) {
            merged.back().coefficient += t.coefficient;
        } else {
            merged.push_back(t);
        }
    }
    std::erase_if(merged, [](const Term& t) { return t.coefficient == 0.0; });
    terms = std::move(merged);
}

PolynomialVectorField::PolynomialVectorField(int species_count,
                                             std::vector<std::vector<Term>> components)
    : m_(species_count), comps_(std::move(components)) {
    if (m_ <= 0) throw ArgumentError("species count must be positive");
    if (static_cast<int>(comps_.size()) != m_)
        throw ArgumentError("field needs exactly one component per species");
    for (int i = 0; i < m_; ++i) {
        for (const Term& t : comps_[i]) {
            if (!std::isfinite(t.coefficient))
                throw ArgumentError("non-finite coefficient in component " + std::to_string(i + 1));
            if (static_cast<int>(t.exponents.size()) != m_)
                throw ArgumentError("exponent vector length mismatch in component " +
                                    std::to_string(i + 1));
            for (int e : t.exponents)
                if (e < 0)
                    throw ArgumentError("negative exponent in component " + std::to_string(i + 1));
        }
        canonicalize_terms(comps_[i]);
    }
    compile();
}

PolynomialVectorField PolynomialVectorField::zero(int species_count) {
    return PolynomialVectorField(species_count,
                                 std::vector<std::vector<Term>>(species_count));
}

void PolynomialVectorField::compile() {
    cterms_.assign(m_, {});
    factors_.clear();
    for (int i = 0; i < m_; ++i) {
        cterms_[i].reserve(comps_[i].size());
        for (const Term& t : comps_[i]) {
            CompiledTerm ct{t.coefficient, static_cast<int>(factors_.size()), 0};
            for (int j = 0; j < m_; ++j) {
                if (t.exponents[j] > 0) {
                    factors_.push_back({j, t.exponents[j]});
                    ++ct.factor_count;
                }
            }
            cterms_[i].push_back(ct);
        }
    }
}

void PolynomialVectorField::eval_into(std::span<const double> u, std::span<double> out) const {
    for (int i = 0; i < m_; ++i) {
        double acc = 0.0;
        for (const CompiledTerm& ct : cterms_[i]) {
            double p = ct.coeff;
            const Factor* f = factors_.data() + ct.factor_begin;
            for (int k = 0; k < ct.factor_count; ++k) p *= int_pow(u[f[k].var], f[k].exp);
            acc += p;
        }
        if (!std::isfinite(acc))
            throw NumericError("evaluation overflow in component " + std::to_string(i + 1));
        out[i] = acc;
    }
}

std::vector<double> PolynomialVectorField::eval(std::span<const double> u) const {
    std::vector<double> out(m_);
    eval_into(u, out);
    return out;
}

std::vector<double> PolynomialVectorField::jacobian(std::span<const double> u) const {
    std::vector<double> jac(static_cast<size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) {
        for (const Term& t : comps_[i]) {
            for (int j = 0; j < m_; ++j) {
                const int ej = t.exponents[j];
                if (ej == 0) continue;
                double p = t.coefficient * ej;
                if (ej > 1) p *= int_pow(u[j], ej - 1);
                for (int k = 0; k < m_; ++k) {
                    if (k == j || t.exponents[k] == 0) continue;
                    p *= int_pow(u[k], t.exponents[k]);
                }
                jac[static_cast<size_t>(i) * m_ + j] += p;
            }
        }
    }
    for (double v : jac)
        if (!std::isfinite(v)) throw NumericError("evaluation overflow in jacobian");
    return jac;
}

int PolynomialVectorField::max_total_degree() const {
    int d = 0;
    for (const auto& comp : comps_)
        for (const Term& t : comp) d = std::max(d, total_degree(t));
    return d;
}

std::vector<Term> PolynomialVectorField::weighted_component_sum(
    std::span<const double> weights) const {
    std::vector<Term> sum;
    for (int i = 0; i < m_; ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        for (const Term& t : comps_[i]) sum.push_back({w * t.coefficient, t.exponents});
    }
    canonicalize_terms(sum);
    return sum;
}

PolynomialVectorField PolynomialVectorField::negated() const {
    auto comps = comps_;
    for (auto& comp : comps)
        for (Term& t : comp) t.coefficient = -t.coefficient;
    return PolynomialVectorField(m_, std::move(comps));
}

PolynomialVectorField PolynomialVectorField::widened(int new_species_count) const {
    if (new_species_count < m_) throw ArgumentError("widened cannot shrink a field");
    auto comps = comps_;
    comps.resize(new_species_count);
    for (auto& comp : comps)
        for (Term& t : comp) t.exponents.resize(new_species_count, 0);
    return PolynomialVectorField(new_species_count, std::move(comps));
}

} // namespace rdmass
