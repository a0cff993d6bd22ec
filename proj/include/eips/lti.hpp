#pragma once

#include <complex>
#include <string>
#include <vector>

#include "eips/pqi.hpp"
#include "eips/transform.hpp"

namespace eips {

/// Real polynomial, coefficients in ascending powers. Leading coefficients
/// below 1e-14 of the largest magnitude are trimmed.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> ascending);
    [[nodiscard]] static Polynomial from_roots(const std::vector<std::complex<double>>& roots,
                                               double leading = 1.0);

    [[nodiscard]] int degree() const { return static_cast<int>(c_.size()) - 1; }
    [[nodiscard]] bool is_zero() const { return c_.empty(); }
    [[nodiscard]] const std::vector<double>& coefficients() const { return c_; }
    [[nodiscard]] double leading() const { return c_.empty() ? 0.0 : c_.back(); }
    [[nodiscard]] std::complex<double> operator()(std::complex<double> s) const;

    /// Companion-matrix eigenvalues. Throws DegenerateDegree below degree 1.
    [[nodiscard]] std::vector<std::complex<double>> roots() const;

    friend Polynomial operator+(const Polynomial& p, const Polynomial& q);
    friend Polynomial operator*(double k, const Polynomial& p);
    friend Polynomial operator*(const Polynomial& p, const Polynomial& q);

private:
    std::vector<double> c_;
};

/// G = num / den with deg num <= deg den.
struct RationalTF {
    Polynomial num;
    Polynomial den;

    RationalTF(Polynomial n, Polynomial d);
    [[nodiscard]] std::complex<double> operator()(std::complex<double> s) const { return num(s) / den(s); }
    /// Limit of G(jw) as w grows.
    [[nodiscard]] double at_infinity() const;
};

/// All roots strictly in the open left half-plane (Re < -1e-9).
[[nodiscard]] bool is_stable(const Polynomial& q);

/// Cancels root pairs of num and den closer than tol.
struct Cancellation {
    RationalTF tf;
    std::size_t cancelled = 0;
};
[[nodiscard]] Cancellation cancel_common_roots(const RationalTF& g, double tol = 1e-8);

[[nodiscard]] double linf_norm(const RationalTF& g);

/// Gain bound used to turn the loop gain kappa into mu.
enum class MuBound {
    kSquaredGain,  // mu = kappa^2 + 1/4
    kLinearGain,   // mu = kappa + 1/4, only valid for kappa <= 1
};

struct EipsIndices {
    double lambda = 0.0;
    double kappa = 0.0;
    double mu = 0.0;
    PassivityIndices indices;
};

[[nodiscard]] EipsIndices eips_indices(const RationalTF& g, double lambda,
                                       MuBound bound = MuBound::kSquaredGain);

/// Grid value of lambda with the smallest mu among admissible ones.
[[nodiscard]] EipsIndices lambda_search(const RationalTF& g, const std::vector<double>& grid,
                                        MuBound bound = MuBound::kSquaredGain);

/// Input index guaranteed by a finite L2 gain beta.
[[nodiscard]] double l2gain_to_input_index(double beta);

/// (c q + d p) / (a q + b p), common roots cancelled.
[[nodiscard]] RationalTF transformed_tf(const RationalTF& g, const Transform2& t,
                                        std::vector<std::string>* warnings = nullptr);

/// nu = inf Re G(jw), rho = inf Re 1/G(jw) over the swept band and its limits.
[[nodiscard]] PassivityIndices tf_passivity_indices(const RationalTF& g);

/// Parses "c0,c1,...", ascending powers.
[[nodiscard]] Polynomial parse_polynomial(const std::string& text);

}  // namespace eips
