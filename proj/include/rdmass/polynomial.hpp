#ifndef RDMASS_POLYNOMIAL_HPP
#define RDMASS_POLYNOMIAL_HPP

#include <span>
#include <vector>

namespace rdmass {

/// One monomial: coefficient * prod_j u_j^exponents[j].
struct Term {
    double coefficient = 0.0;
    std::vector<int> exponents; // length = species count

    friend bool operator==(const Term&, const Term&) = default;
};

/// Sparse polynomial right-hand side f = (f_1,...,f_m), the single evaluable
/// representation used by every system in this project.
///
/// Components are canonical: terms sorted by exponent vector, duplicate
/// exponent vectors merged, zero coefficients dropped. Canonical form makes
/// evaluation order (and hence floating-point results) reproducible and lets
/// conservation be certified by symbolic cancellation.
class PolynomialVectorField {
public:
    /// Single-species zero field (placeholder for default-constructed specs).
    PolynomialVectorField() : PolynomialVectorField(1, {{}}) {}

    /// Builds the canonical field. Throws ArgumentError on malformed input
    /// (wrong exponent length, negative exponent, non-finite coefficient).
    PolynomialVectorField(int species_count, std::vector<std::vector<Term>> components);

    /// Field with m components and no terms (f identically zero).
    static PolynomialVectorField zero(int species_count);

    int species_count() const { return m_; }
    const std::vector<Term>& component(int i) const { return comps_[i]; }
    const std::vector<std::vector<Term>>& components() const { return comps_; }

    /// Evaluates (f_1(u),...,f_m(u)) by exact term summation in canonical
    /// order. Throws NumericError naming the component if the result is not
    /// finite.
    std::vector<double> eval(std::span<const double> u) const;

    /// Same as eval but writes into caller storage (hot path for the grid
    /// reaction sweep; out.size() == species_count()).
    void eval_into(std::span<const double> u, std::span<double> out) const;

    /// Exact partial derivatives d f_i / d u_j by term-wise differentiation.
    /// Row-major m x m.
    std::vector<double> jacobian(std::span<const double> u) const;

    /// Max over components of the max total degree of any term. 0 for the
    /// zero field.
    int max_total_degree() const;

    /// Merged term list of sum_i weights[i] * f_i. Empty weights means all
    /// ones. An empty result certifies that the weighted sum is identically
    /// zero.
    std::vector<Term> weighted_component_sum(std::span<const double> weights = {}) const;

    /// Field with every coefficient negated.
    PolynomialVectorField negated() const;

    /// Same components re-expressed over a larger variable set (exponent
    /// vectors padded with zeros). new_species_count >= species_count().
    PolynomialVectorField widened(int new_species_count) const;

    friend bool operator==(const PolynomialVectorField& a, const PolynomialVectorField& b) {
        return a.m_ == b.m_ && a.comps_ == b.comps_;
    }

private:
    struct Factor {
        int var;
        int exp;
    };
    struct CompiledTerm {
        double coeff;
        int factor_begin;
        int factor_count;
    };

    void compile();

    int m_ = 0;
    std::vector<std::vector<Term>> comps_;
    std::vector<std::vector<CompiledTerm>> cterms_;
    std::vector<Factor> factors_;
};

/// Canonicalizes a raw term list in place: sort by exponent vector, merge
/// duplicates, drop zero coefficients.
void canonicalize_terms(std::vector<Term>& terms);

} // namespace rdmass

#endif
