#ifndef RDMASS_SYSTEM_HPP
#define RDMASS_SYSTEM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdmass/polynomial.hpp"

namespace rdmass {

enum class BalanceClass { conservative, dissipative, unknown };

enum class CheckVerdict { certified, refuted, inconclusive };
enum class CheckMethod { symbolic, structural, sampled };

const char* to_string(BalanceClass c);
const char* to_string(CheckVerdict v);
const char* to_string(CheckMethod m);

/// A point where a checked condition fails, plus the offending value.
struct Witness {
    std::vector<double> point;
    double value = 0.0;
    int component = -1; // species index for per-component conditions, else -1
};

struct CheckerReport {
    CheckVerdict verdict = CheckVerdict::inconclusive;
    CheckMethod method = CheckMethod::sampled;
    std::vector<Witness> witnesses;
    std::string note;
};

/// Mass-balance classification of the weighted component sum S = sum_i a_i f_i:
///   S identically zero      -> conservative, certified symbolically
///   S <= 0 on every sample  -> dissipative, method sampled (not a proof)
///   S > tol at some sample  -> refuted, witnesses attached
struct MassBalanceReport : CheckerReport {
    BalanceClass balance_class = BalanceClass::unknown;
};

struct GrowthReport {
    int max_total_degree = 0;
    bool at_most_quadratic = true; // degree <= 2; higher degrees run but are flagged
};

/// Reaction-diffusion system: species count, diffusion coefficients, the
/// polynomial reaction field, its declared mass-balance class, and optional
/// strictly positive dissipation weights.
struct SystemSpec {
    int m = 0;
    std::vector<double> d;
    PolynomialVectorField field;
    BalanceClass balance_class = BalanceClass::unknown;
    std::vector<double> weights; // empty = unweighted (all ones)

    double d_max() const;
    double d_min() const;
    bool equal_diffusion() const;
};

/// Validates and assembles a SystemSpec. Throws ArgumentError if any d_i <= 0,
/// any weight <= 0, or the sizes disagree with the field.
SystemSpec make_system(std::vector<double> d, PolynomialVectorField field,
                       BalanceClass balance_class = BalanceClass::unknown,
                       std::vector<double> weights = {});

/// Checks that each f_i is nonnegative on the boundary face {u_i = 0} of the
/// nonnegative orthant, which keeps the orthant forward-invariant.
///
/// Structural sufficient condition first: if every negatively-signed term of
/// f_i contains the factor u_i, the component cannot go negative on its face.
/// When that fails for some component, each face is probed at deterministic
/// corner points plus `sample_count` log-uniform random points; a value below
/// -1e-12 refutes with a witness, otherwise the result is inconclusive.
CheckerReport check_quasi_positivity(const PolynomialVectorField& field, int sample_count,
                                     std::uint64_t seed);

/// Classifies the weighted sum of components (see MassBalanceReport). Weights
/// default to all ones and must be strictly positive.
MassBalanceReport check_mass_balance(const PolynomialVectorField& field,
                                     std::span<const double> weights, int sample_count,
                                     std::uint64_t seed);

/// Degree-based growth bound: polynomial components of total degree <= 2 grow
/// at most quadratically; degree >= 3 is allowed but flagged.
GrowthReport growth_degree(const PolynomialVectorField& field);

/// Converts a mass-dissipating system into a mass-conserving one by adding a
/// species that absorbs the dissipated mass: f_{m+1} = -sum_i f_i, d_{m+1}=1.
/// The new species carries zero initial data by convention. Requires the
/// input's balance class to be conservative or dissipative.
SystemSpec augment(const SystemSpec& system);

/// The quadratic 4-species reversible reaction S1 + S2 <-> S3 + S4 with
/// forward/backward rate constants: f_1 = f_2 = -kf u1 u2 + kb u3 u4,
/// f_3 = f_4 = +kf u1 u2 - kb u3 u4. Conservative.
SystemSpec builtin_reversible(double k_f, double k_b, std::vector<double> d);

/// Lotka-Volterra interaction f_i = -tau_i u_i + u_i sum_j a_ij u_j.
/// Requires tau_i >= 0 and A + A^T <= 0 entrywise (rejects otherwise, naming
/// the entry). Conservative exactly when all tau_i = 0 and A + A^T = 0.
SystemSpec builtin_lotka_volterra(std::vector<double> tau, const std::vector<double>& a_rowmajor,
                                  std::vector<double> d);

/// Evaluates a bare canonical term list at u (used for checker sums and
/// witness re-verification).
double eval_terms(std::span<const Term> terms, std::span<const double> u);

} // namespace rdmass

#endif
